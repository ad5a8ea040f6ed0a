use super::{BoundaryData, ChannelGrid, ConservedField, Rhs};
use crate::error::{Error, Result};
use crate::gas::GasParams;

/// Stable time step `safety * min(dx/(|u|+c), dx^2/(2 nu_max))` over all
/// cells and directions, with `nu_max = max(2 mu + lambda, kappa) / rho`.
pub fn cfl_dt(field: &ConservedField, gas: &GasParams, safety: f64) -> Result<f64> {
    if !(safety > 0.0 && safety <= 1.0) {
        return Err(Error::Config(format!("cfl safety {safety} outside (0, 1]")));
    }
    let g = field.grid;
    let dxs = [g.dx1(), g.dx2(), g.dx3()];
    let active = [true, g.n2 > 1, g.n3 > 1];
    let diff = (2.0 * gas.mu + gas.lambda).max(gas.kappa);
    let mut dt = f64::INFINITY;
    for idx in 0..field.rho.len() {
        let s = field.get(idx);
        let th = s.theta();
        if !(s.rho > 0.0) || !(th > 0.0) {
            return Err(Error::Numerical(format!(
                "inadmissible state in time-step selection: rho = {:.3e}, theta = {th:.3e}",
                s.rho
            )));
        }
        let c = gas.sound_speed(th);
        let nu = diff / s.rho;
        for d in 0..3 {
            if !active[d] {
                continue;
            }
            let u = (s.m[d] / s.rho).abs();
            dt = dt.min(dxs[d] / (u + c)).min(dxs[d] * dxs[d] / (2.0 * nu));
        }
    }
    Ok(safety * dt)
}

/// Accumulated boundary mass flux, for checking discrete conservation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MassLedger {
    pub initial_mass: f64,
    /// Time integral of (right face flux - left face flux).
    pub net_outflow: f64,
}

impl MassLedger {
    /// Relative mismatch between the mass change and the boundary outflow.
    pub fn relative_error(&self, current_mass: f64) -> f64 {
        let change = current_mass - self.initial_mass;
        (change + self.net_outflow).abs() / self.initial_mass.abs().max(1e-300)
    }
}

/// Summary of one accepted step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub dt: f64,
    pub t: f64,
}

/// Explicit SSP-RK3 integrator with ghost-plane boundary data.
pub struct Solver<'a> {
    pub gas: GasParams,
    pub safety: f64,
    /// Strength of the optional sixth-order filter in `x1` (0 disables it).
    pub filter: f64,
    pub ledger: MassLedger,
    /// Largest `|U - U_bc|` seen on the outermost interior planes.
    pub boundary_activity: f64,
    pub steps: usize,
    bc: &'a dyn BoundaryData,
    rhs: Rhs,
    k: [Vec<f64>; 5],
    stage: ConservedField,
    stage2: ConservedField,
}

impl<'a> Solver<'a> {
    pub fn new(grid: ChannelGrid, gas: GasParams, bc: &'a dyn BoundaryData, safety: f64) -> Result<Self> {
        gas.validate()?;
        if !(safety > 0.0 && safety <= 1.0) {
            return Err(Error::Config(format!("cfl safety {safety} outside (0, 1]")));
        }
        let n = grid.len();
        Ok(Solver {
            gas,
            safety,
            filter: 0.0,
            ledger: MassLedger::default(),
            boundary_activity: 0.0,
            steps: 0,
            bc,
            rhs: Rhs::new(grid, gas),
            k: [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]],
            stage: ConservedField::zeros(grid, 0.0),
            stage2: ConservedField::zeros(grid, 0.0),
        })
    }

    /// Starts the mass ledger from `field`.
    pub fn reset_ledger(&mut self, field: &ConservedField) {
        self.ledger = MassLedger {
            initial_mass: field.total()[0],
            net_outflow: 0.0,
        };
    }

    /// `dU/dt` at the field's own time.
    pub fn rhs(&mut self, field: &ConservedField) -> [Vec<f64>; 5] {
        let n = field.grid.len();
        let mut out = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        self.rhs.eval(field, field.t, self.bc, &mut out);
        out
    }

    /// One SSP-RK3 step of size `dt`.
    pub fn step_with(&mut self, field: &mut ConservedField, dt: f64) -> Result<StepInfo> {
        let t0 = field.t;
        let mut flux = [0.0; 2];
        // stage 1
        let f = self.rhs.eval(field, t0, self.bc, &mut self.k);
        accumulate(&mut flux, f, 1.0 / 6.0);
        self.stage.t = t0 + dt;
        for (c, (dst, src)) in self.stage.components_mut().into_iter().zip(field.components()).enumerate() {
            for ((d, s), k) in dst.iter_mut().zip(src).zip(&self.k[c]) {
                *d = s + dt * k;
            }
        }
        // stage 2
        let f = self.rhs.eval(&self.stage, t0 + dt, self.bc, &mut self.k);
        accumulate(&mut flux, f, 1.0 / 6.0);
        self.stage2.t = t0 + 0.5 * dt;
        {
            let st = self.stage.components();
            for (c, (dst, src)) in self.stage2.components_mut().into_iter().zip(field.components()).enumerate() {
                for (((d, s), s1), k) in dst.iter_mut().zip(src).zip(st[c]).zip(&self.k[c]) {
                    *d = 0.75 * s + 0.25 * (s1 + dt * k);
                }
            }
        }
        // stage 3
        let f = self.rhs.eval(&self.stage2, t0 + 0.5 * dt, self.bc, &mut self.k);
        accumulate(&mut flux, f, 2.0 / 3.0);
        {
            let st = self.stage2.components();
            for (c, dst) in field.components_mut().into_iter().enumerate() {
                for ((d, s2), k) in dst.iter_mut().zip(st[c]).zip(&self.k[c]) {
                    *d = *d / 3.0 + 2.0 / 3.0 * (s2 + dt * k);
                }
            }
        }
        field.t = t0 + dt;
        self.ledger.net_outflow += dt * (flux[1] - flux[0]);
        project_nyquist(field);
        if self.filter > 0.0 {
            filter_x1(field, self.filter, self.bc);
        }
        field.check_admissible()?;
        self.boundary_activity = self.boundary_activity.max(boundary_mismatch(field, self.bc));
        self.steps += 1;
        Ok(StepInfo { dt, t: field.t })
    }

    /// Step with the CFL time step, clipped so as not to pass `t_max`.
    pub fn step(&mut self, field: &mut ConservedField, t_max: f64) -> Result<StepInfo> {
        let mut dt = cfl_dt(field, &self.gas, self.safety)?;
        let remaining = t_max - field.t;
        if remaining <= 0.0 {
            return Err(Error::Config("target time already reached".into()));
        }
        if dt >= remaining {
            dt = remaining;
        } else if dt > 0.5 * remaining {
            dt = 0.5 * remaining;
        }
        self.step_with(field, dt)
    }

    /// Integrates up to exactly `t_target`.
    pub fn advance_to(&mut self, field: &mut ConservedField, t_target: f64) -> Result<()> {
        while field.t < t_target - 1e-12 * t_target.abs().max(1.0) {
            self.step(field, t_target)?;
        }
        field.t = field.t.max(t_target);
        Ok(())
    }
}

fn accumulate(acc: &mut [f64; 2], f: [f64; 2], w: f64) {
    acc[0] += w * f[0];
    acc[1] += w * f[1];
}

/// Removes the Nyquist modes in both transverse directions.
fn project_nyquist(field: &mut ConservedField) {
    let g = field.grid;
    let (n2, n3) = (g.n2, g.n3);
    let p = g.plane();
    for comp in field.components_mut() {
        for plane in comp.chunks_mut(p) {
            if n2 > 1 {
                for k in 0..n3 {
                    let mut s = 0.0;
                    for j in 0..n2 {
                        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                        s += sign * plane[j * n3 + k];
                    }
                    s /= n2 as f64;
                    for j in 0..n2 {
                        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                        plane[j * n3 + k] -= sign * s;
                    }
                }
            }
            if n3 > 1 {
                for j in 0..n2 {
                    let row = &mut plane[j * n3..(j + 1) * n3];
                    let mut s = 0.0;
                    for (k, v) in row.iter().enumerate() {
                        s += if k % 2 == 0 { *v } else { -*v };
                    }
                    s /= n3 as f64;
                    for (k, v) in row.iter_mut().enumerate() {
                        *v -= if k % 2 == 0 { s } else { -s };
                    }
                }
            }
        }
    }
}

/// Sixth-order explicit filter in `x1`, using boundary data beyond the ends.
fn filter_x1(field: &mut ConservedField, strength: f64, bc: &dyn BoundaryData) {
    let g = field.grid;
    let p = g.plane();
    let n1 = g.n1 as isize;
    let t = field.t;
    let ghost: Vec<[f64; 5]> = (-3..0)
        .chain(n1..n1 + 3)
        .map(|i| {
            let s = bc.state(g.x1(i), t);
            [s.rho, s.m[0], s.m[1], s.m[2], s.energy]
        })
        .collect();
    let w = [1.0, -6.0, 15.0, -20.0, 15.0, -6.0, 1.0];
    for (c, comp) in field.components_mut().into_iter().enumerate() {
        let src = comp.clone();
        let at = |i: isize, q: usize| -> f64 {
            if i < 0 {
                ghost[(i + 3) as usize][c]
            } else if i >= n1 {
                ghost[(i - n1 + 3) as usize][c]
            } else {
                src[i as usize * p + q]
            }
        };
        for i in 0..n1 {
            for q in 0..p {
                let mut d6 = 0.0;
                for (o, wv) in w.iter().enumerate() {
                    d6 += wv * at(i + o as isize - 3, q);
                }
                comp[i as usize * p + q] += strength / 64.0 * d6;
            }
        }
    }
}

/// Max `|U - U_bc|` over the first and last interior planes.
pub(crate) fn boundary_mismatch(field: &ConservedField, bc: &dyn BoundaryData) -> f64 {
    let g = field.grid;
    let p = g.plane();
    let mut worst: f64 = 0.0;
    for i in [0, g.n1 - 1] {
        let s = bc.state(g.x1(i as isize), field.t);
        let vals = [s.rho, s.m[0], s.m[1], s.m[2], s.energy];
        for (c, comp) in field.components().iter().enumerate() {
            for v in &comp[i * p..(i + 1) * p] {
                worst = worst.max((v - vals[c]).abs());
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gas::StatePoint;
    use crate::solver::ConstantState;

    #[test]
    fn rest_state_time_step() {
        let gas = GasParams::new(1.4, 0.025, 0.0, 0.05).unwrap();
        let g = ChannelGrid::new(0.8, 16, 1, 1).unwrap();
        let f = ConservedField::from_fn(g, 0.0, |_, _, _| StatePoint::rest(1.0, 1.0));
        let dt = cfl_dt(&f, &gas, 0.4).unwrap();
        let c = gas.sound_speed(1.0);
        let want = 0.4 * (0.1 / c).min(0.01 / (2.0 * 0.05));
        assert!((dt - want).abs() < 1e-15);
    }

    #[test]
    fn nyquist_projection_keeps_mean() {
        let g = ChannelGrid::new(1.0, 8, 4, 4).unwrap();
        let mut f = ConservedField::from_fn(g, 0.0, |x1, x2, x3| {
            let nyq = (std::f64::consts::PI * 4.0 * x2).cos() + (std::f64::consts::PI * 4.0 * x3).cos();
            StatePoint::rest(1.0 + 0.1 * nyq + 0.01 * x1, 2.0)
        });
        let before = f.total();
        project_nyquist(&mut f);
        let after = f.total();
        assert!((before[0] - after[0]).abs() < 1e-14);
        for i in 0..8 {
            let r = &f.rho[i * 16..(i + 1) * 16];
            assert!(r.iter().all(|v| (v - r[0]).abs() < 1e-14));
        }
    }

    #[test]
    fn constant_state_is_stationary() {
        let gas = GasParams::new(1.4, 0.025, 0.0, 0.05).unwrap();
        let g = ChannelGrid::new(2.0, 32, 4, 4).unwrap();
        let s = StatePoint::from_primitive(1.3, [0.2, -0.1, 0.05], 0.9);
        let bc = ConstantState(s);
        let mut f = ConservedField::from_fn(g, 0.0, |_, _, _| s);
        let mut solver = Solver::new(g, gas, &bc, 0.4).unwrap();
        solver.advance_to(&mut f, 0.5).unwrap();
        for idx in 0..f.rho.len() {
            assert!((f.rho[idx] - s.rho).abs() < 1e-13);
            assert!((f.energy[idx] - s.energy).abs() < 1e-13);
        }
    }
}
