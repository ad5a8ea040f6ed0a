//! Method-of-lines solver for the 3-d compressible Navier-Stokes equations on
//! a truncated channel `[-L, L] x T^2`.
//!
//! Fourth-order central differences in `x1`, Fourier collocation in the two
//! periodic directions, SSP-RK3 in time and Dirichlet ghost planes fed by a
//! boundary-data provider (usually the ansatz).

mod checkpoint;
mod rhs;
mod stepper;

pub use checkpoint::{read_checkpoint, write_checkpoint};
pub use rhs::{Rhs, SpectralDiff};
pub use stepper::{cfl_dt, MassLedger, Solver, StepInfo};

use crate::error::{Error, Result};
use crate::gas::StatePoint;

/// Number of ghost planes on each side of the channel.
pub const GHOST: usize = 3;

/// Uniform cell-centred grid on `[-L, L] x [0,1)^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelGrid {
    pub half_length: f64,
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
}

impl ChannelGrid {
    pub fn new(half_length: f64, n1: usize, n2: usize, n3: usize) -> Result<Self> {
        if !(half_length > 0.0) {
            return Err(Error::Config("half_length must be positive".into()));
        }
        if n1 < 8 {
            return Err(Error::Config(format!("n1 = {n1} below the minimum 8")));
        }
        for (name, n) in [("n2", n2), ("n3", n3)] {
            if n != 1 && n % 2 != 0 {
                return Err(Error::Config(format!("{name} = {n} must be 1 or even")));
            }
        }
        Ok(ChannelGrid {
            half_length,
            n1,
            n2,
            n3,
        })
    }

    /// Domain-sizing rule: `L = 15 sqrt(1 + t_end)`, enlarged so that waves
    /// moving at `speed` plus `sigmas` standard deviations of a unit-diffusivity
    /// heat kernel stay inside.
    pub fn auto_half_length(t_end: f64, speed: f64, sigmas: f64) -> f64 {
        let s = 1.0 + t_end;
        (15.0 * s.sqrt()).max(speed.abs() * s + sigmas * (2.0 * s).sqrt())
    }

    #[inline]
    pub fn dx1(&self) -> f64 {
        2.0 * self.half_length / self.n1 as f64
    }

    #[inline]
    pub fn dx2(&self) -> f64 {
        1.0 / self.n2 as f64
    }

    #[inline]
    pub fn dx3(&self) -> f64 {
        1.0 / self.n3 as f64
    }

    #[inline]
    pub fn plane(&self) -> usize {
        self.n2 * self.n3
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n1 * self.plane()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Centre of cell `i` (may be negative or `>= n1` for ghost planes).
    #[inline]
    pub fn x1(&self, i: isize) -> f64 {
        -self.half_length + (i as f64 + 0.5) * self.dx1()
    }

    pub fn x1_centres(&self) -> Vec<f64> {
        (0..self.n1 as isize).map(|i| self.x1(i)).collect()
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n2 + j) * self.n3 + k
    }
}

/// Conserved variables on the grid, interior cells only.
#[derive(Debug, Clone, PartialEq)]
pub struct ConservedField {
    pub grid: ChannelGrid,
    pub t: f64,
    pub rho: Vec<f64>,
    pub m: [Vec<f64>; 3],
    pub energy: Vec<f64>,
}

impl ConservedField {
    pub fn zeros(grid: ChannelGrid, t: f64) -> Self {
        let n = grid.len();
        ConservedField {
            grid,
            t,
            rho: vec![0.0; n],
            m: [vec![0.0; n], vec![0.0; n], vec![0.0; n]],
            energy: vec![0.0; n],
        }
    }

    /// Fills the field from a point function of `(x1, x2, x3)`.
    pub fn from_fn<F: Fn(f64, f64, f64) -> StatePoint>(grid: ChannelGrid, t: f64, f: F) -> Self {
        let mut out = Self::zeros(grid, t);
        for i in 0..grid.n1 {
            let x1 = grid.x1(i as isize);
            for j in 0..grid.n2 {
                let x2 = j as f64 * grid.dx2();
                for k in 0..grid.n3 {
                    let x3 = k as f64 * grid.dx3();
                    out.set(grid.index(i, j, k), f(x1, x2, x3));
                }
            }
        }
        out
    }

    #[inline]
    pub fn get(&self, idx: usize) -> StatePoint {
        StatePoint::new(
            self.rho[idx],
            [self.m[0][idx], self.m[1][idx], self.m[2][idx]],
            self.energy[idx],
        )
    }

    #[inline]
    pub fn set(&mut self, idx: usize, s: StatePoint) {
        self.rho[idx] = s.rho;
        self.m[0][idx] = s.m[0];
        self.m[1][idx] = s.m[1];
        self.m[2][idx] = s.m[2];
        self.energy[idx] = s.energy;
    }

    pub fn components(&self) -> [&Vec<f64>; 5] {
        [&self.rho, &self.m[0], &self.m[1], &self.m[2], &self.energy]
    }

    pub fn components_mut(&mut self) -> [&mut Vec<f64>; 5] {
        let [m1, m2, m3] = &mut self.m;
        [&mut self.rho, m1, m2, m3, &mut self.energy]
    }

    /// Integral over the domain of each conserved component
    /// `(rho, m1, m2, m3, E)`; the torus has unit measure.
    pub fn total(&self) -> [f64; 5] {
        let w = self.grid.dx1() / self.grid.plane() as f64;
        let mut out = [0.0; 5];
        for (o, c) in out.iter_mut().zip(self.components()) {
            *o = c.iter().sum::<f64>() * w;
        }
        out
    }

    /// `int (U - U_ref(x1))` for a reference depending on `x1` only.
    pub fn excess_mass<F: Fn(f64) -> StatePoint>(&self, reference: F) -> [f64; 5] {
        let g = self.grid;
        let p = g.plane();
        let w = g.dx1() / p as f64;
        let mut out = [0.0; 5];
        for i in 0..g.n1 {
            let r = reference(g.x1(i as isize));
            let rv = [r.rho, r.m[0], r.m[1], r.m[2], r.energy];
            for (c, comp) in self.components().iter().enumerate() {
                let s: f64 = comp[i * p..(i + 1) * p].iter().map(|v| v - rv[c]).sum();
                out[c] += s * w;
            }
        }
        out
    }

    /// Minimum density and temperature over the grid.
    pub fn min_rho_theta(&self) -> (f64, f64) {
        let mut mr = f64::INFINITY;
        let mut mt = f64::INFINITY;
        for idx in 0..self.rho.len() {
            let s = self.get(idx);
            mr = mr.min(s.rho);
            mt = mt.min(s.theta());
        }
        (mr, mt)
    }

    /// Errors unless every cell is finite with positive density and
    /// temperature.
    pub fn check_admissible(&self) -> Result<()> {
        for idx in 0..self.rho.len() {
            let s = self.get(idx);
            let th = s.theta();
            if !(s.rho > 0.0) || !(th > 0.0) || !s.energy.is_finite() || s.m.iter().any(|v| !v.is_finite()) {
                let i = idx / self.grid.plane();
                return Err(Error::Numerical(format!(
                    "positivity lost at t = {:.6}, x1 = {:.4}: rho = {:.4e}, theta = {:.4e}",
                    self.t,
                    self.grid.x1(i as isize),
                    s.rho,
                    th
                )));
            }
        }
        Ok(())
    }

    /// Primitive arrays `(rho, u1, u2, u3, theta)`.
    pub fn primitives(&self) -> [Vec<f64>; 5] {
        let n = self.rho.len();
        let mut out = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        for idx in 0..n {
            let r = self.rho[idx];
            let inv = 1.0 / r;
            let u = [self.m[0][idx] * inv, self.m[1][idx] * inv, self.m[2][idx] * inv];
            out[0][idx] = r;
            out[1][idx] = u[0];
            out[2][idx] = u[1];
            out[3][idx] = u[2];
            out[4][idx] = self.energy[idx] * inv - 0.5 * (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
        }
        out
    }
}

/// Source of Dirichlet data for the ghost planes.
pub trait BoundaryData {
    fn state(&self, x1: f64, t: f64) -> StatePoint;
}

impl BoundaryData for crate::ansatz::Ansatz {
    fn state(&self, x1: f64, t: f64) -> StatePoint {
        crate::ansatz::Ansatz::state(self, x1, t)
    }
}

/// Spatially constant boundary data.
#[derive(Debug, Clone, Copy)]
pub struct ConstantState(pub StatePoint);

impl BoundaryData for ConstantState {
    fn state(&self, _x1: f64, _t: f64) -> StatePoint {
        self.0
    }
}
