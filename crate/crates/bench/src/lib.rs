//! Shared fixtures for the kernel benchmarks.

use ewave_core::ansatz::{Ansatz, MassCoefficients};
use ewave_core::profile::solve_selfsimilar;
use ewave_core::{ChannelGrid, ConservedField, EndStates, GasParams};

pub fn gas() -> GasParams {
    GasParams::new(1.4, 0.025, 0.0, 0.05).expect("valid gas")
}

/// Bar-wave ansatz for `delta = 0.05` with a small mass carried by the
/// acoustic waves.
pub fn ansatz(n_points: usize) -> Ansatz {
    let ends = EndStates::from_strength(0.05, 1.0, 1.0).expect("valid ends");
    let profile = solve_selfsimilar(&ends, &gas(), 12.0, n_points).expect("profile converges");
    Ansatz::new(
        profile,
        MassCoefficients {
            theta_bar: [1e-3, 0.0, -1e-3, 0.0, 0.0],
        },
    )
}

/// The ansatz sampled on a channel grid at `t = 1`, with a transverse ripple.
pub fn field(ansatz: &Ansatz, half_length: f64, n1: usize, n2: usize, n3: usize) -> ConservedField {
    let grid = ChannelGrid::new(half_length, n1, n2, n3).expect("valid grid");
    ConservedField::from_fn(grid, 1.0, |x1, x2, x3| {
        let mut s = ansatz.state(x1, 1.0);
        let r = 1e-3 * (-x1 * x1 / 4.0).exp() * (std::f64::consts::TAU * (x2 + x3)).cos();
        s.rho *= 1.0 + r;
        s
    })
}
