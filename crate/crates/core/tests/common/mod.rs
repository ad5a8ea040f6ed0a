//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use ewave_core::{EndStates, GasParams};

/// Explicit conservative march of `rho_t = a (ln rho)_xx` from a `tanh` step
/// of half-width `width`, run to time `t_end`. Returns `(x, rho)` on
/// `[-half, half]`.
pub fn march_profile(ends: &EndStates, gas: &GasParams, t_end: f64, half: f64, dx: f64, width: f64) -> (Vec<f64>, Vec<f64>) {
    let a = gas.kappa / gas.gamma;
    let n = (2.0 * half / dx).round() as usize + 1;
    let x: Vec<f64> = (0..n).map(|i| -half + i as f64 * dx).collect();
    let (rm, rp) = (ends.rho_minus, ends.rho_plus);
    let mut rho: Vec<f64> = x.iter().map(|&v| rm + (rp - rm) * 0.5 * (1.0 + (v / width).tanh())).collect();
    let dt_max = 0.4 * dx * dx * rm.min(rp) / a;
    let steps = (t_end / dt_max).ceil() as usize;
    let dt = t_end / steps as f64;
    let mut lg = vec![0.0; n];
    for _ in 0..steps {
        for (l, r) in lg.iter_mut().zip(&rho) {
            *l = r.ln();
        }
        for i in 1..n - 1 {
            rho[i] += dt * a * (lg[i + 1] - 2.0 * lg[i] + lg[i - 1]) / (dx * dx);
        }
    }
    (x, rho)
}

/// Primitive fields `(rho, u1, u2, u3, theta)` as a function of position.
pub type PrimFn = dyn Fn(f64, f64, f64) -> [f64; 5];

fn d4<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}

fn shift(p: [f64; 3], dir: usize, s: f64) -> [f64; 3] {
    let mut q = p;
    q[dir] += s;
    q
}

fn partial<F: Fn([f64; 3]) -> f64>(f: &F, p: [f64; 3], dir: usize, h: f64) -> f64 {
    d4(|s| f(shift(p, dir, s - p[dir])), p[dir], h)
}

/// `dU/dt` of the compressible Navier-Stokes system with `p = (gamma-1) rho theta`,
/// `E = rho (theta + |u|^2 / 2)`, evaluated pointwise by nested central
/// differences of the analytic primitives.
pub fn ns_rhs(prim: &PrimFn, gas: &GasParams, p: [f64; 3], h: f64) -> [f64; 5] {
    let g1 = gas.gamma - 1.0;
    let (mu, lam, kappa) = (gas.mu, gas.lambda, gas.kappa);
    let at = |q: [f64; 3]| prim(q[0], q[1], q[2]);
    let energy = |v: [f64; 5]| v[0] * (v[4] + 0.5 * (v[1] * v[1] + v[2] * v[2] + v[3] * v[3]));
    let grad_u = |q: [f64; 3], c: usize, d: usize| partial(&|r: [f64; 3]| at(r)[1 + c], q, d, h);
    let stress = |q: [f64; 3], c: usize, d: usize| {
        let div = grad_u(q, 0, 0) + grad_u(q, 1, 1) + grad_u(q, 2, 2);
        mu * (grad_u(q, c, d) + grad_u(q, d, c)) + if c == d { lam * div } else { 0.0 }
    };
    let mut out = [0.0; 5];
    for d in 0..3 {
        out[0] -= partial(&|q: [f64; 3]| {
            let v = at(q);
            v[0] * v[1 + d]
        }, p, d, h);
        for c in 0..3 {
            out[1 + c] -= partial(&|q: [f64; 3]| {
                let v = at(q);
                v[0] * v[1 + c] * v[1 + d] + if c == d { g1 * v[0] * v[4] } else { 0.0 }
            }, p, d, h);
            out[1 + c] += partial(&|q: [f64; 3]| stress(q, c, d), p, d, h);
        }
        out[4] -= partial(&|q: [f64; 3]| {
            let v = at(q);
            (energy(v) + g1 * v[0] * v[4]) * v[1 + d]
        }, p, d, h);
        out[4] += partial(&|q: [f64; 3]| {
            let v = at(q);
            kappa * partial(&|r: [f64; 3]| at(r)[4], q, d, h)
                + (0..3).map(|c| stress(q, c, d) * v[1 + c]).sum::<f64>()
        }, p, d, h);
    }
    out
}
