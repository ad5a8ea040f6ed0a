//! Self-similar entropy-wave profile.
//!
//! The density of the viscous contact wave is `rho(x, t) = f(x / sqrt(1 + t))`
//! where `f` solves
//!
//! ```text
//! -(xi / 2) f' = (a f' / f)',   f(-inf) = rho_-,  f(+inf) = rho_+,   a = kappa / gamma.
//! ```
//!
//! Velocity, temperature and pressure of the wave follow from `f` in closed
//! form. The table stores `f` and `f'` on a uniform grid; higher derivatives
//! come from the ODE itself so that sampling is `C^2` and sixth-order accurate.

use crate::error::{Error, Result};
use crate::gas::{EndStates, GasParams};

/// Tabulated self-similar profile.
#[derive(Debug, Clone)]
pub struct ProfileTable {
    pub xi: Vec<f64>,
    pub rho_bar: Vec<f64>,
    pub drho_bar: Vec<f64>,
    d2rho: Vec<f64>,
    d3rho: Vec<f64>,
    pub ends: EndStates,
    pub gas: GasParams,
    /// Final collocation residual (max norm).
    pub residual: f64,
    pub newton_iterations: usize,
}

/// Bar-wave fields at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveSample {
    pub rho: f64,
    pub u1: f64,
    pub theta: f64,
    pub p: f64,
    pub m1: f64,
    pub energy: f64,
    pub drho_dx: f64,
    pub du_dx: f64,
    pub drho_dt: f64,
}

/// Least-squares Gaussian model `f'(xi) ~ C delta exp(-c0 xi^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianFit {
    pub amplitude: f64,
    pub c0: f64,
    /// Relative L2 misfit of the model on the fitted range.
    pub residual: f64,
}

fn thomas(sub: &[f64], diag: &mut [f64], sup: &[f64], rhs: &mut [f64]) -> Result<()> {
    let n = diag.len();
    for i in 1..n {
        if diag[i - 1] == 0.0 {
            return Err(Error::Numerical("singular tridiagonal system".into()));
        }
        let w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for i in (0..n - 1).rev() {
        rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / diag[i];
    }
    Ok(())
}

/// Collocation residual of `a h'' + (xi/2) e^h h' = 0` with `h = ln f`.
fn bvp_residual(h: &[f64], xi: &[f64], a: f64, dxi: f64, out: &mut [f64]) -> f64 {
    let n = h.len();
    let mut worst: f64 = 0.0;
    for i in 1..n - 1 {
        let r = a * (h[i + 1] - 2.0 * h[i] + h[i - 1]) / (dxi * dxi)
            + 0.5 * xi[i] * h[i].exp() * (h[i + 1] - h[i - 1]) / (2.0 * dxi);
        out[i] = r;
        worst = worst.max(r.abs());
    }
    worst
}

/// Solves the similarity boundary-value problem by damped Newton iteration on
/// a second-order collocation of `ln f`, started from a `tanh` step.
pub fn solve_selfsimilar(
    ends: &EndStates,
    gas: &GasParams,
    xi_half_width: f64,
    n_points: usize,
) -> Result<ProfileTable> {
    gas.validate()?;
    if n_points < 256 {
        return Err(Error::Config(format!(
            "profile needs at least 256 points, got {n_points}"
        )));
    }
    if !(xi_half_width > 0.0) {
        return Err(Error::Config("profile half-width must be positive".into()));
    }
    let a = gas.profile_diffusivity();
    let (rm, rp) = (ends.rho_minus, ends.rho_plus);
    let n = n_points;
    let dxi = 2.0 * xi_half_width / (n - 1) as f64;
    let xi: Vec<f64> = (0..n).map(|i| -xi_half_width + i as f64 * dxi).collect();

    let width = 2.0 * a.sqrt() / rm.min(rp).sqrt();
    let mut h: Vec<f64> = xi
        .iter()
        .map(|&x| (rm + (rp - rm) * 0.5 * (1.0 + (x / width).tanh())).ln())
        .collect();
    h[0] = rm.ln();
    h[n - 1] = rp.ln();

    let mut res = vec![0.0; n];
    let mut trial = h.clone();
    let mut trial_res = vec![0.0; n];
    let mut norm = bvp_residual(&h, &xi, a, dxi, &mut res);
    let tol = 1e-10;
    let mut iterations = 0;
    let (mut sub, mut diag, mut sup, mut rhs) =
        (vec![0.0; n - 2], vec![0.0; n - 2], vec![0.0; n - 2], vec![0.0; n - 2]);
    while norm > tol {
        if iterations >= 100 {
            return Err(Error::Numerical(format!(
                "profile Newton iteration did not converge (residual {norm:.3e})"
            )));
        }
        iterations += 1;
        for i in 1..n - 1 {
            let k = i - 1;
            let e = h[i].exp();
            let adv = 0.5 * xi[i] * e / (2.0 * dxi);
            sub[k] = a / (dxi * dxi) - adv;
            sup[k] = a / (dxi * dxi) + adv;
            diag[k] = -2.0 * a / (dxi * dxi) + adv * (h[i + 1] - h[i - 1]);
            rhs[k] = -res[i];
        }
        thomas(&sub, &mut diag, &sup, &mut rhs)?;
        let mut alpha = 1.0;
        loop {
            for i in 1..n - 1 {
                trial[i] = h[i] + alpha * rhs[i - 1];
            }
            trial[0] = h[0];
            trial[n - 1] = h[n - 1];
            let tn = bvp_residual(&trial, &xi, a, dxi, &mut trial_res);
            if tn.is_finite() && (tn < norm || tn <= tol) {
                std::mem::swap(&mut h, &mut trial);
                std::mem::swap(&mut res, &mut trial_res);
                norm = tn;
                break;
            }
            alpha *= 0.5;
            if alpha < 1e-6 {
                return Err(Error::Numerical(format!(
                    "profile Newton line search stalled (residual {norm:.3e})"
                )));
            }
        }
    }

    let rho: Vec<f64> = h.iter().map(|v| v.exp()).collect();
    let mut d1 = vec![0.0; n];
    for i in 2..n - 2 {
        d1[i] = (-rho[i + 2] + 8.0 * rho[i + 1] - 8.0 * rho[i - 1] + rho[i - 2]) / (12.0 * dxi);
    }
    d1[1] = (rho[2] - rho[0]) / (2.0 * dxi);
    d1[n - 2] = (rho[n - 1] - rho[n - 3]) / (2.0 * dxi);
    // Below the rounding floor of the stencil the difference is noise of
    // either sign; the true tail derivative is smaller still.
    let rho_max = rm.max(rp);
    let floor = 3.0 * f64::EPSILON * rho_max / dxi;
    for d in d1.iter_mut() {
        if d.abs() < floor {
            *d = 0.0;
        }
    }
    let peak = d1.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let tail = d1[1].abs().max(d1[n - 2].abs());
    if peak > 0.0 && tail > 1e-10 * peak {
        return Err(Error::Config(format!(
            "profile half-width {xi_half_width} too small: tail derivative ratio {:.2e}",
            tail / peak
        )));
    }
    let mut d2 = vec![0.0; n];
    let mut d3 = vec![0.0; n];
    for i in 0..n {
        let (f, f1, x) = (rho[i], d1[i], xi[i]);
        let f2 = f1 * f1 / f - x * f * f1 / (2.0 * a);
        d2[i] = f2;
        d3[i] = 2.0 * f1 * f2 / f - f1 * f1 * f1 / (f * f) - (f * f1 + x * f1 * f1 + x * f * f2) / (2.0 * a);
    }
    // The exact profile has zero first moment of f' (the wave carries no
    // excess mass); the collocation misses it at O(dxi^2 delta^2), which would
    // show up as a spurious mass flux through the far field. Recentre.
    let jump = rp - rm;
    let xi = if jump != 0.0 {
        let moment: f64 = xi.iter().zip(&d1).map(|(x, d)| x * d).sum::<f64>() * dxi;
        let shift = -moment / jump;
        xi.iter().map(|x| x + shift).collect()
    } else {
        xi
    };
    Ok(ProfileTable {
        xi,
        rho_bar: rho,
        drho_bar: d1,
        d2rho: d2,
        d3rho: d3,
        ends: *ends,
        gas: *gas,
        residual: norm,
        newton_iterations: iterations,
    })
}

/// Quintic Hermite interpolation on `[0, 1]` returning value and derivative
/// (with respect to `s`).
#[inline]
fn quintic(s: f64, h: f64, y0: [f64; 3], y1: [f64; 3]) -> (f64, f64) {
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s3 * s;
    let s5 = s4 * s;
    let h0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
    let h1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
    let h2 = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5;
    let h5 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
    let h4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
    let h3 = 0.5 * s3 - s4 + 0.5 * s5;
    let dh0 = -30.0 * s2 + 60.0 * s3 - 30.0 * s4;
    let dh1 = 1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4;
    let dh2 = s - 4.5 * s2 + 6.0 * s3 - 2.5 * s4;
    let dh5 = 30.0 * s2 - 60.0 * s3 + 30.0 * s4;
    let dh4 = -12.0 * s2 + 28.0 * s3 - 15.0 * s4;
    let dh3 = 1.5 * s2 - 4.0 * s3 + 2.5 * s4;
    let v = y0[0] * h0 + h * y0[1] * h1 + h * h * y0[2] * h2 + y1[0] * h5 + h * y1[1] * h4 + h * h * y1[2] * h3;
    let d = y0[0] * dh0 + h * y0[1] * dh1 + h * h * y0[2] * dh2 + y1[0] * dh5 + h * y1[1] * dh4 + h * h * y1[2] * dh3;
    (v, d)
}

impl ProfileTable {
    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    pub fn half_width(&self) -> f64 {
        -self.xi[0]
    }

    /// Profile diffusion coefficient `a = kappa / gamma`.
    pub fn diffusivity(&self) -> f64 {
        self.gas.profile_diffusivity()
    }

    /// `(f, f', f'')` at `xi`; constant continuation outside the table.
    pub fn eval(&self, xi: f64) -> (f64, f64, f64) {
        let n = self.xi.len();
        let x0 = self.xi[0];
        let h = self.xi[1] - self.xi[0];
        if xi <= x0 {
            return (self.rho_bar[0], 0.0, 0.0);
        }
        if xi >= self.xi[n - 1] {
            return (self.rho_bar[n - 1], 0.0, 0.0);
        }
        let pos = (xi - x0) / h;
        let i = (pos.floor() as usize).min(n - 2);
        let s = pos - i as f64;
        let (f, _) = quintic(
            s,
            h,
            [self.rho_bar[i], self.drho_bar[i], self.d2rho[i]],
            [self.rho_bar[i + 1], self.drho_bar[i + 1], self.d2rho[i + 1]],
        );
        let (f1, df1) = quintic(
            s,
            h,
            [self.drho_bar[i], self.d2rho[i], self.d3rho[i]],
            [self.drho_bar[i + 1], self.d2rho[i + 1], self.d3rho[i + 1]],
        );
        (f, f1, df1 / h)
    }

    /// Bar-wave fields at `(x1, t)`.
    pub fn sample_wave(&self, x1: f64, t: f64) -> WaveSample {
        let a = self.diffusivity();
        let s = (1.0 + t).sqrt();
        let xi = x1 / s;
        let (f, f1, f2) = self.eval(xi);
        let rx = f1 / s;
        let rxx = f2 / (s * s);
        let u = -a * rx / (f * f);
        let ux = -a * (rxx / (f * f) - 2.0 * rx * rx / (f * f * f));
        let g = self.gas.gamma;
        let pp = self.ends.pressure(&self.gas);
        WaveSample {
            rho: f,
            u1: u,
            theta: pp / ((g - 1.0) * f) - 0.5 * u * u,
            p: pp - 0.5 * (g - 1.0) * f * u * u,
            m1: f * u,
            energy: pp / (g - 1.0),
            drho_dx: rx,
            du_dx: ux,
            drho_dt: -0.5 * xi * f1 / (1.0 + t),
        }
    }

    /// Closed-form residual fluxes `(Q1, Q2)` of the bar wave in the momentum
    /// and energy equations.
    pub fn q_closed(&self, x1: f64, t: f64) -> (f64, f64) {
        let w = self.sample_wave(x1, t);
        let g = self.gas.gamma;
        let a = self.diffusivity();
        let nu = 2.0 * self.gas.mu + self.gas.lambda;
        let q1 = -a * w.drho_dt / w.rho + 0.5 * (3.0 - g) * w.rho * w.u1 * w.u1 - nu * w.du_dx;
        let q2 = -0.5 * (g - 1.0) * w.rho * w.u1.powi(3) + self.gas.kappa * w.u1 * w.du_dx - nu * w.u1 * w.du_dx;
        (q1, q2)
    }

    /// Integral of `f'` over the table (should equal `rho_+ - rho_-`).
    pub fn jump_integral(&self) -> f64 {
        let h = self.xi[1] - self.xi[0];
        let n = self.len();
        let mut s = 0.5 * (self.drho_bar[0] + self.drho_bar[n - 1]);
        for v in &self.drho_bar[1..n - 1] {
            s += v;
        }
        s * h
    }

    pub fn is_monotone(&self) -> bool {
        let up = self.ends.rho_plus >= self.ends.rho_minus;
        self.rho_bar
            .windows(2)
            .all(|w| if up { w[1] >= w[0] } else { w[1] <= w[0] })
    }
}

/// Fits `d ~ C delta exp(-c0 xi^2)` by least squares on `ln |d|` against
/// `xi^2`, over samples with `|d|` above `1e-10` of its peak.
pub fn fit_gaussian(xi: &[f64], d: &[f64], delta: f64) -> Result<GaussianFit> {
    let peak = d.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if !(peak > 0.0) || !(delta > 0.0) {
        return Err(Error::Numerical("cannot fit a Gaussian to a zero derivative".into()));
    }
    let pts: Vec<(f64, f64)> = xi
        .iter()
        .zip(d)
        .filter(|(_, v)| v.abs() >= 1e-10 * peak)
        .map(|(x, v)| (x * x, v.abs().ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::Numerical("too few samples for a Gaussian fit".into()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::Numerical("degenerate Gaussian fit".into()));
    }
    let slope = sxy / sxx;
    let amp = (my - slope * mx).exp();
    let c0 = -slope;
    let sign = d.iter().fold(0.0, |s, v| s + v).signum();
    let (mut num, mut den) = (0.0, 0.0);
    for (x, v) in xi.iter().zip(d) {
        if v.abs() >= 1e-10 * peak {
            let model = sign * amp * (-c0 * x * x).exp();
            num += (v - model).powi(2);
            den += v * v;
        }
    }
    Ok(GaussianFit {
        amplitude: amp / delta,
        c0,
        residual: (num / den).sqrt(),
    })
}

/// Gaussian fit of the tabulated profile derivative.
pub fn gaussian_fit_derivative(profile: &ProfileTable) -> Result<GaussianFit> {
    fit_gaussian(&profile.xi, &profile.drho_bar, profile.ends.delta())
}

/// Residual fluxes of the bar wave computed two ways on one time slice.
#[derive(Debug, Clone)]
pub struct QReport {
    pub t: f64,
    pub x: Vec<f64>,
    pub q1_closed: Vec<f64>,
    pub q2_closed: Vec<f64>,
    pub q1_fd: Vec<f64>,
    pub q2_fd: Vec<f64>,
    /// `sup |Q1| (1+t) e^{c x^2/(1+t)}` over the weighted region.
    pub q1_scaled_sup: f64,
    /// `sup |Q2| (1+t)^{3/2} e^{c x^2/(1+t)}` over the weighted region.
    pub q2_scaled_sup: f64,
    /// Max difference between the closed-form and difference evaluations.
    pub fd_error: f64,
}

/// Evaluates the finite-difference residual fluxes by inserting the bar wave
/// into the planar momentum and energy equations. Returns `(x, q1, q2)`.
///
/// The fluxes are recovered in integrated form, `Q(x) = int dU/dt + F(x) - F(x0)`,
/// with fourth-order differences in `x`, central differences in `t` (step
/// `h`) and trapezoidal quadrature on the spacing `h`.
fn q_by_differences(profile: &ProfileTable, t: f64, x_half: f64, h: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let gas = &profile.gas;
    let nu = 2.0 * gas.mu + gas.lambda;
    let n = (2.0 * x_half / h).round() as usize + 1;
    let x: Vec<f64> = (0..n).map(|i| -x_half + i as f64 * h).collect();
    let tau = h;
    let ux = |xv: f64| {
        let s = |d: f64| profile.sample_wave(xv + d, t).u1;
        (-s(2.0 * h) + 8.0 * s(h) - 8.0 * s(-h) + s(-2.0 * h)) / (12.0 * h)
    };
    let flux = |xv: f64| {
        let w = profile.sample_wave(xv, t);
        let dux = ux(xv);
        let fm = w.rho * w.u1 * w.u1 + w.p - nu * dux;
        let fe = w.u1 * (w.energy + w.p) - gas.kappa * {
            let th = |d: f64| profile.sample_wave(xv + d, t).theta;
            (-th(2.0 * h) + 8.0 * th(h) - 8.0 * th(-h) + th(-2.0 * h)) / (12.0 * h)
        } - nu * w.u1 * dux;
        (fm, fe)
    };
    let dtu = |xv: f64| {
        let a = profile.sample_wave(xv, t + tau);
        let b = profile.sample_wave(xv, t - tau);
        ((a.m1 - b.m1) / (2.0 * tau), (a.energy - b.energy) / (2.0 * tau))
    };
    let (f0m, f0e) = flux(x[0]);
    let mut q1 = vec![0.0; n];
    let mut q2 = vec![0.0; n];
    let (mut im, mut ie) = (0.0, 0.0);
    let mut prev = dtu(x[0]);
    for i in 0..n {
        if i > 0 {
            let cur = dtu(x[i]);
            im += 0.5 * h * (prev.0 + cur.0);
            ie += 0.5 * h * (prev.1 + cur.1);
            prev = cur;
        }
        let (fm, fe) = flux(x[i]);
        q1[i] = im + fm - f0m;
        q2[i] = ie + fe - f0e;
    }
    (x, q1, q2)
}

/// Residual fluxes `(Q1, Q2)` of the bar wave on `[-x_half, x_half]` at time
/// `t`, closed form against finite differences with spacing `h`.
///
/// `c` is the Gaussian weight in the scaled sup-norms. Fails with a
/// consistency error when the two evaluations disagree by more than ten
/// times the truncation estimate obtained from a `2h` evaluation.
pub fn approximate_system_residual(
    profile: &ProfileTable,
    t: f64,
    x_half: f64,
    h: f64,
    c: f64,
) -> Result<QReport> {
    if !(t >= 0.0) || !(h > 0.0) || !(x_half > 4.0 * h) {
        return Err(Error::Config("invalid residual grid".into()));
    }
    let (x, q1_fd, q2_fd) = q_by_differences(profile, t, x_half, h);
    let (_, c1, c2) = q_by_differences(profile, t, x_half, 2.0 * h);
    let mut q1_closed = Vec::with_capacity(x.len());
    let mut q2_closed = Vec::with_capacity(x.len());
    let (mut s1, mut s2, mut err, mut est) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for (i, &xv) in x.iter().enumerate() {
        let (a, b) = profile.q_closed(xv, t);
        q1_closed.push(a);
        q2_closed.push(b);
        err = err.max((a - q1_fd[i]).abs()).max((b - q2_fd[i]).abs());
        if i % 2 == 0 && i / 2 < c1.len() {
            est = est
                .max((q1_fd[i] - c1[i / 2]).abs() / 3.0)
                .max((q2_fd[i] - c2[i / 2]).abs() / 3.0);
        }
        let w = (-c * xv * xv / (1.0 + t)).exp();
        if w >= 1e-12 {
            s1 = s1.max(a.abs() * (1.0 + t) / w);
            s2 = s2.max(b.abs() * (1.0 + t).powf(1.5) / w);
        }
    }
    let scale = q1_closed
        .iter()
        .chain(&q2_closed)
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    if err > 10.0 * est + 1e-9 * scale.max(1e-300) {
        return Err(Error::Consistency(format!(
            "difference residual disagrees with closed form: error {err:.3e}, estimate {est:.3e}"
        )));
    }
    Ok(QReport {
        t,
        x,
        q1_closed,
        q2_closed,
        q1_fd,
        q2_fd,
        q1_scaled_sup: s1,
        q2_scaled_sup: s2,
        fd_error: err,
    })
}
