//! Initial data: the bar wave plus a compact bump with transverse harmonics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ansatz::{decompose_excess, Ansatz, MassCoefficients};
use crate::config::{ExperimentConfig, MassMode};
use crate::error::{Error, Result};
use crate::gas::StatePoint;
use crate::profile::ProfileTable;
use crate::solver::{ChannelGrid, ConservedField};

/// `(1 - s^2)^4` on `|s| < 1`, `s = (x - center) / radius`.
pub fn bump(x: f64, center: f64, radius: f64) -> f64 {
    let s = (x - center) / radius;
    if s.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - s * s).powi(4)
    }
}

#[derive(Debug, Clone)]
pub struct InitialData {
    pub field: ConservedField,
    pub ansatz: Ansatz,
    /// `int (U0 - U_bar)` after any mass projection.
    pub excess: [f64; 5],
}

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Builds the perturbed initial field and the matching ansatz.
///
/// Primitive perturbation with `b = bump`, `eps = amplitude`, `tau = transverse`:
/// `rho = rho_bar (1 + eps b (1 + tau T1))`, `u1 = u_bar + eps b (1/2 + tau T2)`,
/// `u2 = eps b tau T3`, `u3 = eps b tau T2`, `theta = theta_bar (1 + eps b (tau T2 - 1/2))`,
/// where `T1 = cos 2pi(x2 + a)`, `T2 = cos 2pi(x2 + x3 + b)`, `T3 = cos 2pi(x3 + c)` with
/// seeded random phases. In zero-mass mode the five excess integrals are then
/// removed with a second bump at `dual_center`.
pub fn initial_field(cfg: &ExperimentConfig, profile: &ProfileTable, grid: ChannelGrid) -> Result<InitialData> {
    let p = &cfg.perturbation;
    let gas = profile.gas;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let ph: [f64; 3] = [rng.gen(), rng.gen(), rng.gen()];
    let has2 = grid.n2 > 1;
    let has3 = grid.n3 > 1;
    let (eps, tau) = (p.amplitude, p.transverse);
    let mut field = ConservedField::from_fn(grid, 0.0, |x1, x2, x3| {
        let w = profile.sample_wave(x1, 0.0);
        let b = eps * bump(x1, p.center, p.radius);
        let t1 = if has2 { (TWO_PI * (x2 + ph[0])).cos() } else { 0.0 };
        let t2 = if has2 || has3 { (TWO_PI * (x2 + x3 + ph[1])).cos() } else { 0.0 };
        let t3 = if has3 { (TWO_PI * (x3 + ph[2])).cos() } else { 0.0 };
        let rho = w.rho * (1.0 + b * (1.0 + tau * t1));
        let u = [w.u1 + b * (0.5 + tau * t2), b * tau * t3, b * tau * t2];
        let theta = w.theta * (1.0 + b * (tau * t2 - 0.5));
        StatePoint::from_primitive(rho, u, theta)
    });
    let bar = |x: f64| {
        let w = profile.sample_wave(x, 0.0);
        StatePoint::new(w.rho, [w.m1, 0.0, 0.0], w.energy)
    };
    let mut excess = field.excess_mass(bar);

    let coeffs = match p.mass {
        MassMode::Nonzero => {
            if excess.iter().all(|v| *v == 0.0) {
                MassCoefficients::zero()
            } else {
                decompose_excess(excess, &profile.ends, &gas)?
            }
        }
        MassMode::Zero => {
            let pl = grid.plane();
            let dx = grid.dx1();
            let dual: Vec<f64> = (0..grid.n1)
                .map(|i| bump(grid.x1(i as isize), p.dual_center, p.radius))
                .collect();
            let norm: f64 = dual.iter().sum::<f64>() * dx;
            for (c, comp) in field.components_mut().into_iter().enumerate() {
                for (i, d) in dual.iter().enumerate() {
                    let s = excess[c] * d / norm;
                    for v in &mut comp[i * pl..(i + 1) * pl] {
                        *v -= s;
                    }
                }
            }
            excess = field.excess_mass(bar);
            let worst = excess.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            if worst >= 1e-10 {
                return Err(Error::Config(format!(
                    "zero-mass projection left an excess of {worst:e}"
                )));
            }
            MassCoefficients::zero()
        }
    };
    field.check_admissible()?;
    Ok(InitialData {
        field,
        ansatz: Ansatz::new(profile.clone(), coeffs),
        excess,
    })
}
