//! Property tests over the public API.

use std::sync::OnceLock;

use nalgebra::Matrix3;
use proptest::prelude::*;

use crate::ansatz::{build_tilde, gaussian_wave, AcousticFamily};
use crate::config::ExperimentConfig;
use crate::decay::{fit_exponential, fit_log_corrected, fit_power};
use crate::gas::{eigenstructure_1d, flux_jacobian_1d, transformed_eigen, transformed_matrix};
use crate::modes::{anti_derivatives, diagonalize, inverse_transform, mode_split, transform, undiagonalize};
use crate::profile::solve_selfsimilar;
use crate::{Ansatz, ChannelGrid, EndStates, GasParams, MassCoefficients, ProfileTable, StatePoint};

fn gas() -> GasParams {
    GasParams::new(1.4, 0.025, 0.0, 0.05).unwrap()
}

fn profile() -> &'static ProfileTable {
    static P: OnceLock<ProfileTable> = OnceLock::new();
    P.get_or_init(|| {
        let ends = EndStates::from_strength(0.05, 1.0, 1.0).unwrap();
        solve_selfsimilar(&ends, &gas(), 12.0, 4097).unwrap()
    })
}

fn state() -> impl Strategy<Value = StatePoint> {
    (0.2..5.0_f64, -2.0..2.0_f64, 0.2..5.0_f64).prop_map(|(r, u, th)| StatePoint::from_primitive(r, [u, 0.0, 0.0], th))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigenstructure_diagonalises_and_orders(s in state()) {
        let g = gas();
        let v = s.planar();
        let es = eigenstructure_1d(&v, &g).unwrap();
        let a = flux_jacobian_1d(&v, &g);
        prop_assert!((es.left * es.right - Matrix3::identity()).abs().max() < 1e-10);
        let d = es.left * a * es.right;
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { es.lambdas[i] } else { 0.0 };
                prop_assert!((d[(i, j)] - want).abs() < 1e-10 * (1.0 + want.abs()));
            }
        }
        prop_assert!(es.lambdas[0] < es.lambdas[1] && es.lambdas[1] < es.lambdas[2]);
    }

    #[test]
    fn end_states_match_pressure(delta in 0.0..0.5_f64, rm in 0.2..5.0_f64, tm in 0.2..5.0_f64) {
        let e = EndStates::from_strength(delta, rm, tm).unwrap();
        let g = gas();
        let pm = g.gas_const() * e.rho_minus * e.theta_minus;
        let pp = g.gas_const() * e.rho_plus * e.theta_plus;
        prop_assert!((pm - pp).abs() < 1e-12 * pm);
        prop_assert!((e.delta() - delta).abs() < 1e-12);
    }

    #[test]
    fn bar_wave_pressure_identity(x in -60.0..60.0_f64, t in 0.0..200.0_f64) {
        let p = profile();
        let g = p.gas;
        let w = p.sample_wave(x, t);
        let pp = p.ends.pressure(&g);
        let lhs = g.gas_const() * w.rho * w.theta + 0.5 * (g.gamma - 1.0) * w.rho * w.u1 * w.u1;
        prop_assert!((lhs - pp).abs() < 1e-12);
    }

    #[test]
    fn gaussian_waves_keep_unit_mass(t in 0.0..100.0_f64, third in any::<bool>()) {
        let p = profile();
        let fam = if third { AcousticFamily::Third } else { AcousticFamily::First };
        let s = (1.0 + t).sqrt();
        let c = (if third { p.ends.lambda3_plus(&p.gas) } else { p.ends.lambda1_minus(&p.gas) }) * (1.0 + t);
        let h = 0.01 * s;
        let n = 8000;
        let mass: f64 = (0..=n)
            .map(|i| {
                let x = c - 40.0 * s + i as f64 * h;
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                w * gaussian_wave(fam, &p.ends, &p.gas, x, t)
            })
            .sum::<f64>()
            * h;
        prop_assert!((mass - 1.0).abs() < 1e-10);
    }

    #[test]
    fn ansatz_linear_in_coefficients(
        th in prop::array::uniform5(-0.05..0.05_f64),
        alpha in -3.0..3.0_f64,
        t in 0.0..50.0_f64,
    ) {
        // The contact coefficient acts as a shift and is held at zero here.
        let mut th = th;
        th[1] = 0.0;
        let p = profile().clone();
        let base = Ansatz::new(p.clone(), MassCoefficients::zero());
        let a = Ansatz::new(p.clone(), MassCoefficients { theta_bar: th });
        let b = Ansatz::new(p, MassCoefficients { theta_bar: th }.scaled(alpha));
        for x in [-30.0, -3.0, 0.0, 2.5, 40.0] {
            let (s0, s1, s2) = (base.state(x, t), a.state(x, t), b.state(x, t));
            let pairs = [
                (s1.rho - s0.rho, s2.rho - s0.rho),
                (s1.m[0] - s0.m[0], s2.m[0] - s0.m[0]),
                (s1.m[1] - s0.m[1], s2.m[1] - s0.m[1]),
                (s1.m[2] - s0.m[2], s2.m[2] - s0.m[2]),
                (s1.energy - s0.energy, s2.energy - s0.energy),
            ];
            for (d1, d2) in pairs {
                prop_assert!((d2 - alpha * d1).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_coefficients_give_bar_wave(x in -60.0..60.0_f64, t in 0.0..100.0_f64) {
        let a = Ansatz::new(profile().clone(), MassCoefficients::zero());
        prop_assert_eq!(a.state(x, t), a.bar_state(x, t));
    }

    #[test]
    fn mode_split_is_orthogonal_projection(vals in prop::collection::vec(-1.0..1.0_f64, 8 * 16)) {
        let grid = ChannelGrid::new(4.0, 8, 4, 4).unwrap();
        let s = mode_split(&grid, &[&vals]);
        let p = grid.plane();
        for i in 0..grid.n1 {
            let mean: f64 = s.nonzero[0][i * p..(i + 1) * p].iter().sum::<f64>() / p as f64;
            prop_assert!(mean.abs() < 1e-14);
        }
        let again = mode_split(&grid, &[&s.nonzero[0]]);
        prop_assert!(again.zero[0].iter().all(|v| v.abs() < 1e-14));
        prop_assert!(again.nonzero[0].iter().zip(&s.nonzero[0]).all(|(a, b)| (a - b).abs() < 1e-14));
        let total: f64 = vals.iter().map(|v| v * v).sum();
        let parts: f64 = s.zero[0].iter().map(|v| v * v * p as f64).sum::<f64>()
            + s.nonzero[0].iter().map(|v| v * v).sum::<f64>();
        prop_assert!((total - parts).abs() < 1e-12 * (1.0 + total));
        let back = s.reconstruct(&grid);
        prop_assert!(back[0].iter().zip(&vals).all(|(a, b)| (a - b).abs() < 1e-14));
    }

    #[test]
    fn transform_roundtrips(
        pert in prop::collection::vec(prop::array::uniform5(-1e-3..1e-3_f64), 64),
        th in prop::array::uniform5(-0.02..0.02_f64),
        t in 0.0..20.0_f64,
    ) {
        let g = gas();
        let a = Ansatz::new(profile().clone(), MassCoefficients { theta_bar: th });
        let x: Vec<f64> = (0..64).map(|i| -16.0 + 0.5 * i as f64).collect();
        let tilde = build_tilde(&a, &x, t).unwrap();
        let comps: Vec<Vec<f64>> = (0..5)
            .map(|c| pert.iter().enumerate().map(|(i, v)| if i == 0 { 0.0 } else { v[c] }).collect())
            .collect();
        let anti = anti_derivatives([&comps[0], &comps[1], &comps[2], &comps[3], &comps[4]], 0.5, 1e-10).unwrap();
        let tr = transform(&anti, &tilde);
        let (phi, psi, w) = inverse_transform(&tr, &tilde);
        let close = |u: &[f64], v: &[f64]| u.iter().zip(v).all(|(a, b)| (a - b).abs() < 1e-12);
        prop_assert!(close(&phi, &anti.phi) && close(&w, &anti.w));
        for c in 0..3 {
            prop_assert!(close(&psi[c], &anti.psi[c]));
        }
        let b = diagonalize(&tr, &tilde.theta, &g).unwrap();
        let v = undiagonalize(&b, &tilde.theta, &g).unwrap();
        prop_assert!(close(&v[0], &tr.phi) && close(&v[1], &tr.psi[0]) && close(&v[2], &tr.w));
    }

    #[test]
    fn transformed_middle_field_is_constant(theta in 0.05..20.0_f64) {
        let g = gas();
        let es = transformed_eigen(theta, &g).unwrap();
        let reference = transformed_eigen(1.0, &g).unwrap();
        prop_assert_eq!(es.lambdas[1], 0.0);
        let d = es.left * transformed_matrix(theta, &g) * es.right;
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    prop_assert!(d[(i, j)].abs() < 1e-10 * (1.0 + theta));
                }
            }
        }
        for k in 0..3 {
            prop_assert!((es.left[(1, k)] - reference.left[(1, k)]).abs() < 1e-14);
            prop_assert!((es.right[(k, 1)] - reference.right[(k, 1)]).abs() < 1e-14);
        }
    }

    #[test]
    fn fits_exact_on_their_models(rate in 0.05..2.0_f64, pref in 1e-4..10.0_f64) {
        let ts: Vec<f64> = (0..=80).map(|k| 5.0 * k as f64).collect();
        let w = (100.0, 400.0);
        let pw: Vec<f64> = ts.iter().map(|t| pref * (1.0 + t).powf(-rate)).collect();
        let lc: Vec<f64> = ts.iter().map(|t| pref * (1.0 + t).powf(-rate) * (2.0 + t).ln().sqrt()).collect();
        let ex: Vec<f64> = ts.iter().map(|t| pref * (-rate * 0.05 * t).exp()).collect();
        let f = fit_power(&ts, &pw, w).unwrap();
        prop_assert!((f.rate + rate).abs() < 1e-9 && (f.prefactor / pref - 1.0).abs() < 1e-9);
        let f = fit_log_corrected(&ts, &lc, w).unwrap();
        prop_assert!((f.rate + rate).abs() < 1e-9);
        let f = fit_exponential(&ts, &ex, w).unwrap();
        prop_assert!((f.rate - 0.05 * rate).abs() < 1e-9);
    }

    #[test]
    fn config_roundtrip(delta in 0.0..1.0_f64, amp in 1e-4..0.1_f64, seed in 0..=i64::MAX as u64, t_end in 1.0..1000.0_f64) {
        let mut c = ExperimentConfig::default();
        c.wave.delta = delta;
        c.perturbation.amplitude = amp;
        c.perturbation.seed = seed;
        c.run.t_end = t_end;
        let back = ExperimentConfig::parse(&c.emit()).unwrap();
        prop_assert_eq!(back, c);
    }
}
