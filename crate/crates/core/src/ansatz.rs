//! Diffusion-wave ansatz around the viscous contact wave.
//!
//! The initial excess mass of a perturbation is split along the left
//! acoustic eigenvector, the contact jump, the right acoustic eigenvector and
//! the two transverse momenta. Each coefficient is carried by a unit-mass
//! heat kernel (acoustic ones travelling with the far-field sound speed) or,
//! for the contact, by a shift of the wave.

use crate::error::{Error, Result};
use crate::gas::{EndStates, GasParams, StatePoint};
use crate::profile::{gaussian_fit_derivative, ProfileTable};
use crate::solver::ConservedField;
use nalgebra::{Matrix3, Vector3};

/// Coefficients `(Theta_1, ..., Theta_5)` of the excess-mass decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MassCoefficients {
    pub theta_bar: [f64; 5],
}

impl MassCoefficients {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn abs_sum(&self) -> f64 {
        self.theta_bar.iter().map(|v| v.abs()).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut t = self.theta_bar;
        t.iter_mut().for_each(|v| *v *= s);
        MassCoefficients { theta_bar: t }
    }
}

/// Acoustic family of a diffusion wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcousticFamily {
    First,
    Third,
}

/// Unit-mass heat kernel `exp(-x^2 / (4(1+t))) / sqrt(4 pi (1+t))`.
#[inline]
pub fn heat_kernel(x: f64, t: f64) -> f64 {
    let s = 1.0 + t;
    (-x * x / (4.0 * s)).exp() / (4.0 * std::f64::consts::PI * s).sqrt()
}

/// Diffusion wave `Theta_1` or `Theta_3`, centred at `lambda (1+t)`.
pub fn gaussian_wave(family: AcousticFamily, ends: &EndStates, gas: &GasParams, x1: f64, t: f64) -> f64 {
    let lam = match family {
        AcousticFamily::First => ends.lambda1_minus(gas),
        AcousticFamily::Third => ends.lambda3_plus(gas),
    };
    heat_kernel(x1 - lam * (1.0 + t), t)
}

fn decomposition_matrix(ends: &EndStates, gas: &GasParams) -> Matrix3<f64> {
    let g1 = gas.gamma - 1.0;
    let l1 = ends.lambda1_minus(gas);
    let l3 = ends.lambda3_plus(gas);
    let sm = ends.state_minus();
    let sp = ends.state_plus();
    Matrix3::new(
        1.0,
        sm.rho - sp.rho,
        1.0,
        l1,
        sm.m[0] - sp.m[0],
        l3,
        l1 * l1 / g1,
        sm.energy - sp.energy,
        l3 * l3 / g1,
    )
}

/// Splits an excess-mass vector `int (U - U_bar)` into diffusion-wave
/// coefficients.
pub fn decompose_excess(excess: [f64; 5], ends: &EndStates, gas: &GasParams) -> Result<MassCoefficients> {
    if (ends.rho_plus - ends.rho_minus).abs() < 1e-12 {
        return Err(Error::Config(
            "contact jump vanishes; the mass split is singular, use a zero-mass perturbation".into(),
        ));
    }
    let m = decomposition_matrix(ends, gas);
    let sol = m
        .lu()
        .solve(&Vector3::new(excess[0], excess[1], excess[4]))
        .ok_or_else(|| Error::Numerical("singular mass decomposition".into()))?;
    Ok(MassCoefficients {
        theta_bar: [sol[0], sol[1], sol[2], excess[2], excess[3]],
    })
}

/// Excess mass of `field` over the bar wave at the field's time, split into
/// diffusion-wave coefficients.
pub fn mass_decompose(field: &ConservedField, profile: &ProfileTable) -> Result<MassCoefficients> {
    let ex = excess_mass(field, profile);
    decompose_excess(ex, &profile.ends, &profile.gas)
}

/// `int_Omega (U - U_bar)` in the order `(rho, m1, m2, m3, E)`.
pub fn excess_mass(field: &ConservedField, profile: &ProfileTable) -> [f64; 5] {
    let t = field.t;
    field.excess_mass(|x| {
        let w = profile.sample_wave(x, t);
        StatePoint::new(w.rho, [w.m1, 0.0, 0.0], w.energy)
    })
}

/// Bar wave plus diffusion waves.
#[derive(Debug, Clone)]
pub struct Ansatz {
    pub profile: ProfileTable,
    pub coeffs: MassCoefficients,
}

impl Ansatz {
    pub fn new(profile: ProfileTable, coeffs: MassCoefficients) -> Self {
        Ansatz { profile, coeffs }
    }

    pub fn ends(&self) -> &EndStates {
        &self.profile.ends
    }

    pub fn gas(&self) -> &GasParams {
        &self.profile.gas
    }

    /// Bar wave shifted to absorb the contact coefficient.
    pub fn bar_state(&self, x1: f64, t: f64) -> StatePoint {
        let w = self.profile.sample_wave(x1 - self.coeffs.theta_bar[1], t);
        StatePoint::new(w.rho, [w.m1, 0.0, 0.0], w.energy)
    }

    /// Ansatz state at `(x1, t)`.
    pub fn state(&self, x1: f64, t: f64) -> StatePoint {
        let th = &self.coeffs.theta_bar;
        let gas = self.gas();
        let ends = self.ends();
        let g1 = gas.gamma - 1.0;
        let l1 = ends.lambda1_minus(gas);
        let l3 = ends.lambda3_plus(gas);
        let w = self.profile.sample_wave(x1 - th[1], t);
        let a1 = th[0] * heat_kernel(x1 - l1 * (1.0 + t), t);
        let a3 = th[2] * heat_kernel(x1 - l3 * (1.0 + t), t);
        let k0 = heat_kernel(x1, t);
        StatePoint::new(
            w.rho + a1 + a3,
            [w.m1 + l1 * a1 + l3 * a3, th[3] * k0, th[4] * k0],
            w.energy + l1 * l1 / g1 * a1 + l3 * l3 / g1 * a3,
        )
    }
}

/// Ansatz fields on a line of `x1` values at one time.
#[derive(Debug, Clone)]
pub struct TildeState {
    pub t: f64,
    pub x1: Vec<f64>,
    pub rho: Vec<f64>,
    pub m: [Vec<f64>; 3],
    pub energy: Vec<f64>,
    pub u: [Vec<f64>; 3],
    pub theta: Vec<f64>,
    pub p: Vec<f64>,
}

impl TildeState {
    pub fn len(&self) -> usize {
        self.x1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x1.is_empty()
    }

    pub fn state(&self, i: usize) -> StatePoint {
        StatePoint::new(self.rho[i], [self.m[0][i], self.m[1][i], self.m[2][i]], self.energy[i])
    }
}

pub fn build_tilde(ansatz: &Ansatz, x1: &[f64], t: f64) -> Result<TildeState> {
    let n = x1.len();
    let gas = *ansatz.gas();
    let mut st = TildeState {
        t,
        x1: x1.to_vec(),
        rho: vec![0.0; n],
        m: [vec![0.0; n], vec![0.0; n], vec![0.0; n]],
        energy: vec![0.0; n],
        u: [vec![0.0; n], vec![0.0; n], vec![0.0; n]],
        theta: vec![0.0; n],
        p: vec![0.0; n],
    };
    for (i, &x) in x1.iter().enumerate() {
        let s = ansatz.state(x, t);
        let pr = s.primitive(&gas).map_err(|e| {
            Error::Numerical(format!("ansatz loses positivity at x1 = {x}, t = {t}: {e}"))
        })?;
        st.rho[i] = s.rho;
        st.energy[i] = s.energy;
        st.theta[i] = pr.theta;
        st.p[i] = pr.p;
        for c in 0..3 {
            st.m[c][i] = s.m[c];
            st.u[c][i] = pr.u[c];
        }
    }
    Ok(st)
}

/// Sup-norm of the ansatz residual fluxes, normalised by the decay envelope.
#[derive(Debug, Clone)]
pub struct TildeResidualReport {
    /// Gaussian constant of the envelope.
    pub c: f64,
    pub times: Vec<f64>,
    /// `sup_x |H(x,t)| (1+t) / envelope(x,t)` for each time.
    pub normalized_sup: Vec<f64>,
    /// Unnormalised `sup_x |H(x,t)|` for each time.
    pub raw_sup: Vec<f64>,
}

impl TildeResidualReport {
    pub fn max_normalized(&self) -> f64 {
        self.normalized_sup.iter().fold(0.0, |m: f64, v| m.max(*v))
    }

    /// Largest ratio between the sups of the normalised residual over
    /// consecutive windows `[T, 2T]`, `T = t0, 2 t0, ...`, within the sampled
    /// times. Infinite if a window is empty or vanishes.
    pub fn doubling_drift(&self, t0: f64) -> f64 {
        let t_last = self.times.iter().fold(0.0_f64, |m, t| m.max(*t));
        let mut sups = Vec::new();
        let mut a = t0;
        while 2.0 * a <= t_last + 1e-9 {
            let sup = self
                .times
                .iter()
                .zip(&self.normalized_sup)
                .filter(|(t, _)| **t >= a - 1e-9 && **t <= 2.0 * a + 1e-9)
                .fold(0.0_f64, |m, (_, v)| m.max(*v));
            sups.push(sup);
            a *= 2.0;
        }
        let mut drift = 1.0_f64;
        for w in sups.windows(2) {
            let (lo, hi) = (w[0].min(w[1]), w[0].max(w[1]));
            if !(lo > 0.0) {
                return f64::INFINITY;
            }
            drift = drift.max(hi / lo);
        }
        drift
    }
}

/// Sum of the three travelling Gaussian envelopes `exp(-c (x - s)^2 / (1+t))`
/// centred at `0`, `lambda_1 (1+t)` and `lambda_3 (1+t)`.
pub fn envelope(x: f64, t: f64, c: f64, l1: f64, l3: f64) -> f64 {
    let s = 1.0 + t;
    (-c * x * x / s).exp() + (-c * (x - l1 * s).powi(2) / s).exp() + (-c * (x - l3 * s).powi(2) / s).exp()
}

/// Gaussian constant of the residual envelope: half of the smaller of the
/// fitted profile constant and the diffusion-wave constant `1/4`.
pub fn default_envelope_constant(profile: &ProfileTable) -> Result<f64> {
    let fit = gaussian_fit_derivative(profile)?;
    Ok(0.5 * fit.c0.min(0.25))
}

/// Residual fluxes `H = (H_1, H_21, H_22, H_23, H_3)` of the ansatz in the
/// full system, on a grid of spacing `h` at time `t`. Returns `(x, H)`.
pub fn residual_fluxes(ansatz: &Ansatz, t: f64, x_half: f64, h: f64) -> Result<(Vec<f64>, [Vec<f64>; 5])> {
    let gas = *ansatz.gas();
    let nu = 2.0 * gas.mu + gas.lambda;
    let n = (2.0 * x_half / h).round() as usize + 1;
    let x: Vec<f64> = (0..n).map(|i| -x_half + i as f64 * h).collect();
    let xp: Vec<f64> = (0..n + 4).map(|i| -x_half + (i as f64 - 2.0) * h).collect();
    let st = build_tilde(ansatz, &xp, t)?;
    let d1 = |f: &[f64], i: usize| (-f[i + 4] + 8.0 * f[i + 3] - 8.0 * f[i + 1] + f[i]) / (12.0 * h);
    let tau = (1e-3 * t).max(1e-4);
    let ahead = build_tilde(ansatz, &x, t + tau)?;
    let behind = build_tilde(ansatz, &x, t - tau)?;
    let mut flux = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let mut dt = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for i in 0..n {
        let k = i + 2;
        let (r, e, p) = (st.rho[k], st.energy[k], st.p[k]);
        let m = [st.m[0][k], st.m[1][k], st.m[2][k]];
        let u = [st.u[0][k], st.u[1][k], st.u[2][k]];
        let du = [d1(&st.u[0], i), d1(&st.u[1], i), d1(&st.u[2], i)];
        let dth = d1(&st.theta, i);
        flux[0][i] = m[0];
        flux[1][i] = m[0] * m[0] / r + p - nu * du[0];
        flux[2][i] = m[0] * m[1] / r - gas.mu * du[1];
        flux[3][i] = m[0] * m[2] / r - gas.mu * du[2];
        flux[4][i] = u[0] * (e + p) - gas.kappa * dth - nu * u[0] * du[0] - gas.mu * (u[1] * du[1] + u[2] * du[2]);
        let inv = 0.5 / tau;
        dt[0][i] = (ahead.rho[i] - behind.rho[i]) * inv;
        for c in 0..3 {
            dt[1 + c][i] = (ahead.m[c][i] - behind.m[c][i]) * inv;
        }
        dt[4][i] = (ahead.energy[i] - behind.energy[i]) * inv;
    }
    let mut out = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for c in 0..5 {
        let mut acc = 0.0;
        for i in 0..n {
            if i > 0 {
                acc += 0.5 * h * (dt[c][i - 1] + dt[c][i]);
            }
            out[c][i] = acc + flux[c][i] - flux[c][0];
        }
    }
    Ok((x, out))
}

/// Evaluates the ansatz residual at each time in `times` and normalises it by
/// `(1+t)^{-1}` times the three-Gaussian envelope with constant `c`
/// (defaults to [`default_envelope_constant`]).
pub fn tilde_residual(ansatz: &Ansatz, times: &[f64], c: Option<f64>) -> Result<TildeResidualReport> {
    let c = match c {
        Some(c) => c,
        None => default_envelope_constant(&ansatz.profile)?,
    };
    let gas = *ansatz.gas();
    let l1 = ansatz.ends().lambda1_minus(&gas);
    let l3 = ansatz.ends().lambda3_plus(&gas);
    let cmax = l1.abs().max(l3.abs());
    let mut normalized_sup = Vec::with_capacity(times.len());
    let mut raw_sup = Vec::with_capacity(times.len());
    for &t in times {
        if !(t >= 0.0) {
            return Err(Error::Config(format!("negative residual time {t}")));
        }
        let s = (1.0 + t).sqrt();
        let x_half = cmax * (1.0 + t) + 12.0 * s + ansatz.coeffs.theta_bar[1].abs();
        let h = 0.02 * s;
        let (x, hf) = residual_fluxes(ansatz, t, x_half, h)?;
        let (mut worst, mut raw) = (0.0_f64, 0.0_f64);
        for (i, &xv) in x.iter().enumerate() {
            let hmax = hf.iter().fold(0.0_f64, |m, f| m.max(f[i].abs()));
            raw = raw.max(hmax);
            let env = envelope(xv, t, c, l1, l3);
            if env >= 1e-8 {
                worst = worst.max(hmax * (1.0 + t) / env);
            }
        }
        normalized_sup.push(worst);
        raw_sup.push(raw);
    }
    Ok(TildeResidualReport {
        c,
        times: times.to_vec(),
        normalized_sup,
        raw_sup,
    })
}
