//! Zero/non-zero mode split, anti-derivative variables and the energy
//! functionals of the zero-mode perturbation.
//!
//! The zero mode is the transverse mean (the torus has unit measure). The
//! anti-derivatives of the zero-mode conserved perturbation are transformed
//! with the ansatz temperature and velocity into `(Phi~, Psi~, W~)` and then
//! diagonalised by the constant-structure eigenbasis `L~(theta~)`.

use crate::ansatz::{build_tilde, Ansatz, TildeState};
use crate::error::{Error, Result};
use crate::gas::{transformed_eigen, GasParams};
use crate::solver::{ChannelGrid, ConservedField, SpectralDiff};
use nalgebra::Vector3;

/// Transverse mean of each component (`zero`, length `n1`) and the remainder
/// (`nonzero`, same layout as the input).
#[derive(Debug, Clone)]
pub struct ModeSplit {
    pub zero: Vec<Vec<f64>>,
    pub nonzero: Vec<Vec<f64>>,
}

impl ModeSplit {
    /// Adds the modes back together.
    pub fn reconstruct(&self, grid: &ChannelGrid) -> Vec<Vec<f64>> {
        let p = grid.plane();
        self.zero
            .iter()
            .zip(&self.nonzero)
            .map(|(z, nz)| nz.iter().enumerate().map(|(idx, v)| v + z[idx / p]).collect())
            .collect()
    }
}

pub fn mode_split(grid: &ChannelGrid, comps: &[&[f64]]) -> ModeSplit {
    let p = grid.plane();
    let mut zero = Vec::with_capacity(comps.len());
    let mut nonzero = Vec::with_capacity(comps.len());
    for c in comps {
        let z: Vec<f64> = c.chunks(p).map(|pl| pl.iter().sum::<f64>() / p as f64).collect();
        let nz: Vec<f64> = c.iter().enumerate().map(|(idx, v)| v - z[idx / p]).collect();
        zero.push(z);
        nonzero.push(nz);
    }
    ModeSplit { zero, nonzero }
}

/// Anti-derivatives of the zero-mode conserved perturbation, by cumulative
/// trapezoid from the left end of the grid.
#[derive(Debug, Clone)]
pub struct AntiDerivs {
    pub dx: f64,
    pub phi: Vec<f64>,
    pub psi: [Vec<f64>; 3],
    pub w: Vec<f64>,
    /// Rectangle-rule integrals of the five perturbation components.
    pub totals: [f64; 5],
}

fn cumulative(f: &[f64], dx: f64) -> Vec<f64> {
    let mut out = vec![0.0; f.len()];
    for i in 1..f.len() {
        out[i] = out[i - 1] + 0.5 * dx * (f[i - 1] + f[i]);
    }
    out
}

/// `pert` is `(phi, psi1, psi2, psi3, w)` sampled at uniform spacing `dx`.
/// Fails when any component is larger than `tail_tol` at the left end.
pub fn anti_derivatives(pert: [&[f64]; 5], dx: f64, tail_tol: f64) -> Result<AntiDerivs> {
    for (c, f) in pert.iter().enumerate() {
        if f.is_empty() {
            return Err(Error::Config("empty perturbation".into()));
        }
        if f[0].abs() > tail_tol {
            return Err(Error::Numerical(format!(
                "perturbation component {c} does not decay at the left end ({:.3e})",
                f[0]
            )));
        }
    }
    let mut totals = [0.0; 5];
    for (t, f) in totals.iter_mut().zip(pert.iter()) {
        *t = f.iter().sum::<f64>() * dx;
    }
    Ok(AntiDerivs {
        dx,
        phi: cumulative(pert[0], dx),
        psi: [cumulative(pert[1], dx), cumulative(pert[2], dx), cumulative(pert[3], dx)],
        w: cumulative(pert[4], dx),
        totals,
    })
}

/// Transformed anti-derivatives `(Phi~, Psi~_1..3, W~)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Transformed {
    pub phi: Vec<f64>,
    pub psi: [Vec<f64>; 3],
    pub w: Vec<f64>,
}

/// `Phi~ = theta Phi`, `Psi~ = Psi - u Phi`, `W~ = W - u.Psi~ - (theta + |u|^2/2) Phi`.
pub fn transform(anti: &AntiDerivs, tilde: &TildeState) -> Transformed {
    let n = anti.phi.len();
    let mut out = Transformed {
        phi: vec![0.0; n],
        psi: [vec![0.0; n], vec![0.0; n], vec![0.0; n]],
        w: vec![0.0; n],
    };
    for i in 0..n {
        let th = tilde.theta[i];
        let u = [tilde.u[0][i], tilde.u[1][i], tilde.u[2][i]];
        let ph = anti.phi[i];
        out.phi[i] = th * ph;
        let mut dot = 0.0;
        let mut u2 = 0.0;
        for c in 0..3 {
            let ps = anti.psi[c][i] - u[c] * ph;
            out.psi[c][i] = ps;
            dot += u[c] * ps;
            u2 += u[c] * u[c];
        }
        out.w[i] = anti.w[i] - dot - (th + 0.5 * u2) * ph;
    }
    out
}

/// Inverse of [`transform`], returning `(Phi, Psi, W)`.
pub fn inverse_transform(tr: &Transformed, tilde: &TildeState) -> (Vec<f64>, [Vec<f64>; 3], Vec<f64>) {
    let n = tr.phi.len();
    let mut phi = vec![0.0; n];
    let mut psi = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let th = tilde.theta[i];
        let u = [tilde.u[0][i], tilde.u[1][i], tilde.u[2][i]];
        let ph = tr.phi[i] / th;
        phi[i] = ph;
        let mut dot = 0.0;
        let mut u2 = 0.0;
        for c in 0..3 {
            psi[c][i] = tr.psi[c][i] + u[c] * ph;
            dot += u[c] * tr.psi[c][i];
            u2 += u[c] * u[c];
        }
        w[i] = tr.w[i] + dot + (th + 0.5 * u2) * ph;
    }
    (phi, psi, w)
}

/// Characteristic variables `B = L~(theta~) (Phi~, Psi~_1, W~)`.
pub fn diagonalize(tr: &Transformed, theta: &[f64], gas: &GasParams) -> Result<[Vec<f64>; 3]> {
    let n = tr.phi.len();
    let mut b = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for i in 0..n {
        let l = transformed_eigen(theta[i], gas)?.left;
        let v = l * Vector3::new(tr.phi[i], tr.psi[0][i], tr.w[i]);
        for c in 0..3 {
            b[c][i] = v[c];
        }
    }
    Ok(b)
}

/// Inverse of [`diagonalize`]: `(Phi~, Psi~_1, W~) = R~ B`.
pub fn undiagonalize(b: &[Vec<f64>; 3], theta: &[f64], gas: &GasParams) -> Result<[Vec<f64>; 3]> {
    let n = b[0].len();
    let mut v = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for i in 0..n {
        let r = transformed_eigen(theta[i], gas)?.right;
        let x = r * Vector3::new(b[0][i], b[1][i], b[2][i]);
        for c in 0..3 {
            v[c][i] = x[c];
        }
    }
    Ok(v)
}

/// Fourth-order central derivative; the two cells at each end are set to 0.
pub fn d1(f: &[f64], dx: f64) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    if n < 5 {
        return out;
    }
    for i in 2..n - 2 {
        out[i] = (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * dx);
    }
    out
}

/// `k`-fold application of [`d1`].
pub fn dk(f: &[f64], dx: f64, k: usize) -> Vec<f64> {
    let mut out = f.to_vec();
    for _ in 0..k {
        out = d1(&out, dx);
    }
    out
}

fn integral(f: impl Iterator<Item = f64>, dx: f64) -> f64 {
    f.sum::<f64>() * dx
}

/// Weight kernels of the energy estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    /// `(1+t)^{-alpha}` times Gaussians centred at `0`, `l1 (1+t)`, `l3 (1+t)`.
    D { alpha: f64, c: f64, l1: f64, l3: f64 },
    /// `(1+t)^{-alpha} exp(-c x^2/(1+t))`.
    Omega { alpha: f64, c: f64 },
    /// `(1+t)^{-1/2} exp(-c x^2/(1+t))`.
    OmegaTilde { c: f64 },
}

impl Kernel {
    pub fn eval(&self, x: f64, t: f64) -> f64 {
        let s = 1.0 + t;
        let g = |c: f64, y: f64| (-c * y * y / s).exp();
        match *self {
            Kernel::D { alpha, c, l1, l3 } => s.powf(-alpha) * (g(c, x) + g(c, x - l1 * s) + g(c, x - l3 * s)),
            Kernel::Omega { alpha, c } => s.powf(-alpha) * g(c, x),
            Kernel::OmegaTilde { c } => s.powf(-0.5) * g(c, x),
        }
    }
}

/// `int |f|^2 K(x, t) dx` on the grid `x` (uniform spacing).
pub fn weighted_norm(f: &[f64], x: &[f64], kernel: Kernel, t: f64) -> f64 {
    let dx = if x.len() > 1 { x[1] - x[0] } else { 0.0 };
    integral(f.iter().zip(x).map(|(v, &xv)| v * v * kernel.eval(xv, t)), dx)
}

/// Constants entering the energy functionals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyParams {
    /// Prefactor of the wave-interaction functional `G`.
    pub c_g: f64,
    /// Coupling constant of the density-gradient correction in `E`.
    pub c_tilde: f64,
}

impl Default for EnergyParams {
    fn default() -> Self {
        EnergyParams { c_g: 1.0, c_tilde: 0.05 }
    }
}

/// Energy functionals for derivative orders `k = 0, 1, 2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergySet {
    pub e_tilde: [f64; 3],
    pub e: [f64; 3],
    pub k: [f64; 3],
    pub g: [f64; 3],
}

/// Line data needed by [`energies`].
pub struct EnergyInputs<'a> {
    pub dx: f64,
    pub transformed: &'a Transformed,
    pub b: &'a [Vec<f64>; 3],
    /// Zero-mode density perturbation `d Phi / dx`.
    pub dphi: &'a [f64],
    /// Zero-mode density.
    pub rho_zero: &'a [f64],
    pub tilde: &'a TildeState,
    pub rho_bar: &'a [f64],
    pub drho_bar: &'a [f64],
    pub rho_plus: f64,
    pub delta: f64,
    pub gas: &'a GasParams,
}

/// Weight exponent `n = 4 floor(delta^{-1/2}) + 1`. Saturates at `delta = 0`,
/// where the weight base is identically one.
pub fn weight_exponent(delta: f64) -> i32 {
    ((1.0 / delta.sqrt()).floor() as i32).saturating_mul(4).saturating_add(1)
}

pub fn energies(inp: &EnergyInputs, params: &EnergyParams) -> EnergySet {
    let dx = inp.dx;
    let n = weight_exponent(inp.delta);
    let nu = 2.0 * inp.gas.mu + inp.gas.lambda;
    let tr = inp.transformed;
    let mut out = EnergySet::default();
    let v1: Vec<f64> = inp.rho_bar.iter().map(|r| r / inp.rho_plus).collect();
    for k in 0..3 {
        let bk: Vec<Vec<f64>> = inp.b.iter().map(|f| dk(f, dx, k)).collect();
        let et = integral(
            (0..v1.len()).map(|i| {
                let w = v1[i].powi(n);
                0.5 * w * bk[0][i].powi(2) + 0.5 * bk[1][i].powi(2) + 0.5 / w * bk[2][i].powi(2)
            }),
            dx,
        );
        let vk1: Vec<Vec<f64>> = [&tr.phi, &tr.psi[0], &tr.psi[1], &tr.psi[2], &tr.w]
            .iter()
            .map(|f| dk(f, dx, k + 1))
            .collect();
        let kk = integral((0..v1.len()).map(|i| vk1.iter().map(|f| f[i] * f[i]).sum::<f64>()), dx);
        let gk = params.c_g / inp.delta.sqrt()
            * integral((0..v1.len()).map(|i| inp.drho_bar[i] * (bk[0][i].powi(2) + bk[2][i].powi(2))), dx);
        let psi2k = dk(&tr.psi[1], dx, k);
        let psi3k = dk(&tr.psi[2], dx, k);
        let psi1k = dk(&tr.psi[0], dx, k);
        let phik1 = &vk1[0];
        let extra = integral(
            (0..v1.len()).map(|i| {
                let rt = inp.tilde.rho[i];
                let tt = inp.tilde.theta[i];
                phik1[i] * psi1k[i] + nu / (2.0 * rt * tt) * phik1[i].powi(2)
                    - nu * inp.dphi[i] * phik1[i].powi(2) / (2.0 * inp.rho_zero[i] * rt)
            }),
            dx,
        );
        let transverse = integral((0..v1.len()).map(|i| psi2k[i].powi(2) + psi3k[i].powi(2)), dx);
        out.e_tilde[k] = et;
        out.k[k] = kk;
        out.g[k] = gk;
        out.e[k] = et + transverse + params.c_tilde * extra;
    }
    out
}

/// One time sample of the weighted Poincare inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoincareSample {
    pub t: f64,
    /// `int (Phi^2 + |Psi|^2 + W^2) omega_{-1} dx` at time `t`.
    pub weighted: f64,
    /// `|| d/dx (Phi, Psi, W) ||_{H^1}^2` at time `t`.
    pub dissipation: f64,
}

/// Constants `(C0, C1)` making
/// `int_0^t weighted <= C0 + C1 int_0^t dissipation` hold at every sample.
#[derive(Debug, Clone, PartialEq)]
pub struct PoincareReport {
    /// `C0 = 4 pi ||V(0)||^2`, the heat-kernel constant.
    pub c0: f64,
    pub c1: f64,
    /// `(C0, C1)` for the multiples `[0, 0.25, 0.5, 1, 2, 4]` of `c0`.
    pub frontier: Vec<(f64, f64)>,
}

pub fn poincare_diagnostic(samples: &[PoincareSample], initial_l2_sq: f64) -> Result<PoincareReport> {
    if samples.len() < 2 {
        return Err(Error::Config("Poincare diagnostic needs at least two samples".into()));
    }
    let mut lhs = vec![0.0; samples.len()];
    let mut rhs = vec![0.0; samples.len()];
    for i in 1..samples.len() {
        let dt = samples[i].t - samples[i - 1].t;
        lhs[i] = lhs[i - 1] + 0.5 * dt * (samples[i].weighted + samples[i - 1].weighted);
        rhs[i] = rhs[i - 1] + 0.5 * dt * (samples[i].dissipation + samples[i - 1].dissipation);
    }
    let base = 4.0 * std::f64::consts::PI * initial_l2_sq;
    let c1_for = |c0: f64| -> f64 {
        let mut c1: f64 = 0.0;
        for i in 1..samples.len() {
            let excess = lhs[i] - c0;
            if excess > 0.0 {
                if rhs[i] > 0.0 {
                    c1 = c1.max(excess / rhs[i]);
                } else {
                    return f64::INFINITY;
                }
            }
        }
        c1
    };
    let frontier: Vec<(f64, f64)> = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0]
        .iter()
        .map(|m| (m * base, c1_for(m * base)))
        .collect();
    Ok(PoincareReport {
        c0: base,
        c1: c1_for(base),
        frontier,
    })
}

/// Diagnostics of one snapshot of the solution.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SnapshotRecord {
    pub t: f64,
    /// Zero-mode `(rho, u, theta)` perturbation from the (shifted) bar wave.
    pub linf_bar: f64,
    pub l2_bar: f64,
    pub dl2_bar: f64,
    /// Zero-mode `(rho, u, theta)` perturbation from the ansatz.
    pub linf_tilde: f64,
    pub l2_tilde: f64,
    /// `H^1(Omega)` norm of the non-zero mode of `(rho, u, theta)`.
    pub h1_nonzero: f64,
    pub energy: EnergySet,
    /// `int |V~|^2` with `V~ = (Phi~, Psi~, W~)`.
    pub v_l2_sq: f64,
    /// `int |V~|^2 omega_{-1}`.
    pub omega_v2: f64,
    /// `||d V~/dx||_{H^1}^2`.
    pub dv_h1_sq: f64,
    /// `int omega~_{-1/2} (|d b1/dx|^2 + |d b3/dx|^2)`.
    pub omega_tilde_b13: f64,
}

/// Settings for [`analyze_snapshot`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotParams {
    pub energy: EnergyParams,
    /// Gaussian constant of `omega`.
    pub omega_c: f64,
    /// Gaussian constant of `omega~`.
    pub omega_tilde_c: f64,
    /// Largest admissible perturbation at the left end of the grid.
    pub tail_tol: f64,
}

fn h1_nonzero(grid: &ChannelGrid, comps: &[Vec<f64>], s2: &SpectralDiff, s3: &SpectralDiff) -> f64 {
    let p = grid.plane();
    let (n1, n2, n3) = (grid.n1, grid.n2, grid.n3);
    let dx = grid.dx1();
    let w = dx / p as f64;
    let mut total = 0.0;
    let mut line2 = vec![0.0; n2];
    let mut line3 = vec![0.0; n3];
    for f in comps {
        total += f.iter().map(|v| v * v).sum::<f64>() * w;
        for i in 2..n1 - 2 {
            for q in 0..p {
                let k = i * p + q;
                let d = (-f[k + 2 * p] + 8.0 * f[k + p] - 8.0 * f[k - p] + f[k - 2 * p]) / (12.0 * dx);
                total += d * d * w;
            }
        }
        for i in 0..n1 {
            let pl = &f[i * p..(i + 1) * p];
            if n2 > 1 {
                for k in 0..n3 {
                    for j in 0..n2 {
                        line2[j] = pl[j * n3 + k];
                    }
                    total += s2.derivative(&line2).iter().map(|v| v * v).sum::<f64>() * w;
                }
            }
            if n3 > 1 {
                for j in 0..n2 {
                    line3.copy_from_slice(&pl[j * n3..(j + 1) * n3]);
                    total += s3.derivative(&line3).iter().map(|v| v * v).sum::<f64>() * w;
                }
            }
        }
    }
    total.sqrt()
}

/// Full diagnostic record of `field` relative to `ansatz`.
pub fn analyze_snapshot(field: &ConservedField, ansatz: &Ansatz, params: &SnapshotParams) -> Result<SnapshotRecord> {
    let grid = field.grid;
    let t = field.t;
    let gas = *ansatz.gas();
    let ends = *ansatz.ends();
    let x = grid.x1_centres();
    let dx = grid.dx1();
    let n1 = grid.n1;
    let prim = field.primitives();
    let refs: Vec<&[f64]> = prim.iter().map(|v| v.as_slice()).collect();
    let split = mode_split(&grid, &refs);
    let cons_refs: Vec<&[f64]> = field.components().iter().map(|v| v.as_slice()).collect();
    let cons_split = mode_split(&grid, &cons_refs);
    let tilde = build_tilde(ansatz, &x, t)?;
    let shift = ansatz.coeffs.theta_bar[1];

    let mut rho_bar = vec![0.0; n1];
    let mut drho_bar = vec![0.0; n1];
    let (mut linf_bar, mut l2_bar, mut linf_tilde, mut l2_tilde) = (0.0_f64, 0.0, 0.0_f64, 0.0);
    let mut bar_pert: Vec<Vec<f64>> = vec![vec![0.0; n1]; 5];
    for i in 0..n1 {
        let wv = ansatz.profile.sample_wave(x[i] - shift, t);
        rho_bar[i] = wv.rho;
        drho_bar[i] = wv.drho_dx;
        let bar = [wv.rho, wv.u1, 0.0, 0.0, wv.theta];
        let til = [tilde.rho[i], tilde.u[0][i], tilde.u[1][i], tilde.u[2][i], tilde.theta[i]];
        for c in 0..5 {
            let db = split.zero[c][i] - bar[c];
            let dt = split.zero[c][i] - til[c];
            bar_pert[c][i] = db;
            linf_bar = linf_bar.max(db.abs());
            linf_tilde = linf_tilde.max(dt.abs());
            l2_bar += db * db * dx;
            l2_tilde += dt * dt * dx;
        }
    }
    let dl2_bar = bar_pert
        .iter()
        .map(|f| d1(f, dx).iter().map(|v| v * v).sum::<f64>() * dx)
        .sum::<f64>()
        .sqrt();

    let s2 = SpectralDiff::new(grid.n2);
    let s3 = SpectralDiff::new(grid.n3);
    let h1nz = h1_nonzero(&grid, &split.nonzero, &s2, &s3);

    let pert: Vec<Vec<f64>> = (0..5)
        .map(|c| {
            let tl = match c {
                0 => &tilde.rho,
                4 => &tilde.energy,
                _ => &tilde.m[c - 1],
            };
            cons_split.zero[c].iter().zip(tl).map(|(a, b)| a - b).collect()
        })
        .collect();
    let anti = anti_derivatives([&pert[0], &pert[1], &pert[2], &pert[3], &pert[4]], dx, params.tail_tol)?;
    let tr = transform(&anti, &tilde);
    let b = diagonalize(&tr, &tilde.theta, &gas)?;
    let energy = energies(
        &EnergyInputs {
            dx,
            transformed: &tr,
            b: &b,
            dphi: &pert[0],
            rho_zero: &cons_split.zero[0],
            tilde: &tilde,
            rho_bar: &rho_bar,
            drho_bar: &drho_bar,
            rho_plus: ends.rho_plus,
            delta: ends.delta(),
            gas: &gas,
        },
        &params.energy,
    );
    let vs = [&tr.phi, &tr.psi[0], &tr.psi[1], &tr.psi[2], &tr.w];
    let omega = Kernel::Omega {
        alpha: 1.0,
        c: params.omega_c,
    };
    let mut v_l2_sq = 0.0;
    let mut omega_v2 = 0.0;
    let mut dv_h1_sq = 0.0;
    for f in vs {
        v_l2_sq += f.iter().map(|v| v * v).sum::<f64>() * dx;
        omega_v2 += weighted_norm(f, &x, omega, t);
        let d = d1(f, dx);
        let dd = d1(&d, dx);
        dv_h1_sq += (d.iter().map(|v| v * v).sum::<f64>() + dd.iter().map(|v| v * v).sum::<f64>()) * dx;
    }
    let omt = Kernel::OmegaTilde { c: params.omega_tilde_c };
    let omega_tilde_b13 = weighted_norm(&d1(&b[0], dx), &x, omt, t) + weighted_norm(&d1(&b[2], dx), &x, omt, t);
    Ok(SnapshotRecord {
        t,
        linf_bar,
        l2_bar: l2_bar.sqrt(),
        dl2_bar,
        linf_tilde,
        l2_tilde: l2_tilde.sqrt(),
        h1_nonzero: h1nz,
        energy,
        v_l2_sq,
        omega_v2,
        dv_h1_sq,
        omega_tilde_b13,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn split_of_constant_planes_has_no_nonzero_mode() {
        let g = ChannelGrid::new(1.0, 8, 4, 2).unwrap();
        let f: Vec<f64> = (0..g.len()).map(|idx| (idx / g.plane()) as f64).collect();
        let s = mode_split(&g, &[&f]);
        assert!(s.nonzero[0].iter().all(|v| v.abs() < 1e-15));
        assert_eq!(s.zero[0], (0..8).map(|i| i as f64).collect::<Vec<_>>());
    }

    #[test]
    fn antiderivative_of_gaussian_derivative() {
        let dx = 0.01;
        let x: Vec<f64> = (0..2001).map(|i| -10.0 + i as f64 * dx).collect();
        let f: Vec<f64> = x.iter().map(|v| -2.0 * v * (-v * v).exp()).collect();
        let z = vec![0.0; x.len()];
        let a = anti_derivatives([&f, &z, &z, &z, &z], dx, 1e-10).unwrap();
        for (i, xv) in x.iter().enumerate() {
            assert!((a.phi[i] - (-xv * xv).exp()).abs() < 1e-4);
        }
        assert!((a.phi[x.len() - 1] - a.totals[0]).abs() < 1e-12);
    }

    #[test]
    fn left_tail_rejected() {
        let f = vec![1.0; 10];
        let z = vec![0.0; 10];
        assert!(anti_derivatives([&f, &z, &z, &z, &z], 0.1, 1e-10).is_err());
    }

    #[test]
    fn omega_kernel_integral() {
        let dx = 0.01;
        let x: Vec<f64> = (0..40001).map(|i| -200.0 + i as f64 * dx).collect();
        let one = vec![1.0; x.len()];
        let (t, c) = (3.0, 0.125);
        let got = weighted_norm(&one, &x, Kernel::Omega { alpha: 1.0, c }, t);
        let want = (1.0 + t).powf(-1.0) * (std::f64::consts::PI * (1.0 + t) / c).sqrt();
        assert_relative_eq!(got, want, max_relative = 1e-10);
    }

    #[test]
    fn weight_exponent_values() {
        assert_eq!(weight_exponent(0.04), 21);
        assert_eq!(weight_exponent(0.05), 17);
        assert_eq!(weight_exponent(1.0), 5);
        assert_eq!(weight_exponent(0.0), i32::MAX);
    }

    #[test]
    fn poincare_scales_quadratically() {
        let samples: Vec<PoincareSample> = (0..50)
            .map(|i| {
                let t = i as f64;
                PoincareSample {
                    t,
                    weighted: (1.0 + t).powf(-1.5),
                    dissipation: (1.0 + t).powf(-1.2),
                }
            })
            .collect();
        let r1 = poincare_diagnostic(&samples, 0.01).unwrap();
        let s = 3.0;
        let scaled: Vec<PoincareSample> = samples
            .iter()
            .map(|p| PoincareSample {
                t: p.t,
                weighted: s * s * p.weighted,
                dissipation: s * s * p.dissipation,
            })
            .collect();
        let r2 = poincare_diagnostic(&scaled, s * s * 0.01).unwrap();
        assert_relative_eq!(r2.c0, s * s * r1.c0, max_relative = 1e-12);
        assert_relative_eq!(r2.c1, r1.c1, max_relative = 1e-6);
    }
}
