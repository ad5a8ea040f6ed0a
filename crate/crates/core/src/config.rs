//! Experiment configuration.
//!
//! Configurations are TOML files with one table per concern. Every key has a
//! default, so a file holding only `wave.delta`, `perturbation.amplitude`
//! and `run.t_end` is complete. Unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas::{EndStates, GasParams};
use crate::solver::ChannelGrid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GasSection {
    pub gamma: f64,
    pub mu: f64,
    pub lambda: f64,
    pub kappa: f64,
    pub entropy_const: f64,
}

impl Default for GasSection {
    fn default() -> Self {
        GasSection {
            gamma: 1.4,
            mu: 0.025,
            lambda: 0.0,
            kappa: 0.05,
            entropy_const: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WaveSection {
    /// Wave strength `|rho+ - rho-| + |theta+ - theta-|`.
    pub delta: f64,
    pub rho_minus: f64,
    pub theta_minus: f64,
}

impl Default for WaveSection {
    fn default() -> Self {
        WaveSection {
            delta: 0.05,
            rho_minus: 1.0,
            theta_minus: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProfileSection {
    pub xi_half_width: f64,
    pub n_points: usize,
}

impl Default for ProfileSection {
    fn default() -> Self {
        ProfileSection {
            xi_half_width: 12.0,
            n_points: 4097,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridMode {
    Auto,
    Manual,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub mode: GridMode,
    /// Used when `mode = "manual"`.
    pub half_length: f64,
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            mode: GridMode::Auto,
            half_length: 0.0,
            n1: 4096,
            n2: 8,
            n3: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub t_end: f64,
    pub cfl_safety: f64,
    /// Strength of the sixth-order `x1` filter; 0 disables it.
    pub filter: f64,
    /// Checkpoint interval in time units; 0 disables checkpoints.
    pub checkpoint_every: f64,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            t_end: 400.0,
            cfl_safety: 0.35,
            filter: 0.0,
            checkpoint_every: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MassMode {
    Nonzero,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PerturbationSection {
    /// Size `epsilon` of the perturbation.
    pub amplitude: f64,
    pub center: f64,
    /// Support radius of the bump.
    pub radius: f64,
    /// Centre of the bump used to cancel the excess mass.
    pub dual_center: f64,
    /// Relative size of the transverse (non-zero mode) part.
    pub transverse: f64,
    pub mass: MassMode,
    /// Seed for the transverse phases.
    pub seed: u64,
}

impl Default for PerturbationSection {
    fn default() -> Self {
        PerturbationSection {
            amplitude: 0.01,
            center: 0.0,
            radius: 3.0,
            dual_center: 4.0,
            transverse: 0.5,
            mass: MassMode::Nonzero,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ObserveSection {
    /// Dense sampling interval up to `dense_until`.
    pub dense_dt: f64,
    pub dense_until: f64,
    pub dt: f64,
}

impl Default for ObserveSection {
    fn default() -> Self {
        ObserveSection {
            dense_dt: 0.25,
            dense_until: 30.0,
            dt: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitSection {
    /// Fit window; defaults to `[t_end/4, t_end]`.
    pub window_start: Option<f64>,
    pub window_end: Option<f64>,
    /// Accepted deviation of fitted exponents from the predicted ones.
    pub tolerance: f64,
    /// Non-zero-mode samples below this fraction of the initial value are
    /// excluded from the exponential fit.
    pub nonzero_floor: f64,
}

impl Default for FitSection {
    fn default() -> Self {
        FitSection {
            window_start: None,
            window_end: None,
            tolerance: 0.15,
            nonzero_floor: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnergySection {
    pub c_g: f64,
    pub c_tilde: f64,
    pub omega_c: f64,
    /// Gaussian constant of `omega~`; defaults to half the fitted profile constant.
    pub omega_tilde_c: Option<f64>,
    pub tail_tol: f64,
}

impl Default for EnergySection {
    fn default() -> Self {
        EnergySection {
            c_g: 1.0,
            c_tilde: 0.05,
            omega_c: 0.125,
            omega_tilde_c: None,
            tail_tol: 1e-10,
        }
    }
}

/// Complete description of one experiment.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub gas: GasSection,
    pub wave: WaveSection,
    pub profile: ProfileSection,
    pub grid: GridSection,
    pub run: RunSection,
    pub perturbation: PerturbationSection,
    pub observe: ObserveSection,
    pub fit: FitSection,
    pub energy: EnergySection,
}

fn range_err(key: &str, value: impl std::fmt::Display, range: &str) -> Error {
    Error::Config(format!("{key} = {value} out of range: expected {range}"))
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let at = e.span().map(|sp| {
                let line = text[..sp.start].matches('\n').count() + 1;
                format!("line {line}: ")
            });
            Error::Config(format!("{}{}", at.unwrap_or_default(), e.message().trim()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn emit(&self) -> String {
        toml::to_string(self).expect("configuration serialises")
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.gas;
        if !(g.gamma > 1.0) {
            return Err(Error::Config(format!("gas.gamma = {}: gamma must exceed 1", g.gamma)));
        }
        if !(g.mu > 0.0) {
            return Err(range_err("gas.mu", g.mu, "mu > 0"));
        }
        if !(g.mu + g.lambda >= 0.0) {
            return Err(range_err("gas.lambda", g.lambda, "lambda >= -mu"));
        }
        if !(g.kappa > 0.0) {
            return Err(range_err("gas.kappa", g.kappa, "kappa > 0"));
        }
        if !(g.entropy_const > 0.0) {
            return Err(range_err("gas.entropy_const", g.entropy_const, "> 0"));
        }
        let w = &self.wave;
        if !(w.delta >= 0.0 && w.delta <= 1.0) {
            return Err(range_err("wave.delta", w.delta, "[0, 1]"));
        }
        if !(w.rho_minus > 0.0) {
            return Err(range_err("wave.rho_minus", w.rho_minus, "> 0"));
        }
        if !(w.theta_minus > 0.0) {
            return Err(range_err("wave.theta_minus", w.theta_minus, "> 0"));
        }
        if self.profile.n_points < 256 {
            return Err(range_err("profile.n_points", self.profile.n_points, ">= 256"));
        }
        if !(self.profile.xi_half_width > 0.0) {
            return Err(range_err("profile.xi_half_width", self.profile.xi_half_width, "> 0"));
        }
        let gr = &self.grid;
        if gr.n1 < 16 {
            return Err(range_err("grid.n1", gr.n1, ">= 16"));
        }
        for (k, n) in [("grid.n2", gr.n2), ("grid.n3", gr.n3)] {
            if n != 1 && n % 2 != 0 {
                return Err(range_err(k, n, "1 or an even number"));
            }
        }
        if gr.mode == GridMode::Manual && !(gr.half_length > 0.0) {
            return Err(range_err("grid.half_length", gr.half_length, "> 0 with mode = \"manual\""));
        }
        let r = &self.run;
        if !(r.t_end > 0.0) {
            return Err(range_err("run.t_end", r.t_end, "> 0"));
        }
        if !(r.cfl_safety > 0.0 && r.cfl_safety <= 1.0) {
            return Err(range_err("run.cfl_safety", r.cfl_safety, "(0, 1]"));
        }
        if !(0.0..=1.0).contains(&r.filter) {
            return Err(range_err("run.filter", r.filter, "[0, 1]"));
        }
        if !(r.checkpoint_every >= 0.0) {
            return Err(range_err("run.checkpoint_every", r.checkpoint_every, ">= 0"));
        }
        let p = &self.perturbation;
        if p.seed > i64::MAX as u64 {
            return Err(range_err("perturbation.seed", p.seed, "[0, 2^63 - 1]"));
        }
        if !(0.0..=0.5).contains(&p.amplitude) {
            return Err(range_err("perturbation.amplitude", p.amplitude, "[0, 0.5]"));
        }
        if !(p.radius > 0.0) {
            return Err(range_err("perturbation.radius", p.radius, "> 0"));
        }
        if !(0.0..=1.0).contains(&p.transverse) {
            return Err(range_err("perturbation.transverse", p.transverse, "[0, 1]"));
        }
        if p.mass == MassMode::Zero && (p.dual_center - p.center).abs() < 1e-12 {
            return Err(range_err("perturbation.dual_center", p.dual_center, "a value different from perturbation.center"));
        }
        let o = &self.observe;
        if !(o.dt > 0.0) {
            return Err(range_err("observe.dt", o.dt, "> 0"));
        }
        if !(o.dense_dt > 0.0) {
            return Err(range_err("observe.dense_dt", o.dense_dt, "> 0"));
        }
        if !(o.dense_until >= 0.0) {
            return Err(range_err("observe.dense_until", o.dense_until, ">= 0"));
        }
        let (a, b) = self.fit_window();
        if !(a >= 0.0 && b > a) {
            return Err(range_err("fit.window_start", a, "0 <= window_start < window_end"));
        }
        if !(self.fit.tolerance > 0.0) {
            return Err(range_err("fit.tolerance", self.fit.tolerance, "> 0"));
        }
        if !(self.fit.nonzero_floor > 0.0 && self.fit.nonzero_floor < 1.0) {
            return Err(range_err("fit.nonzero_floor", self.fit.nonzero_floor, "(0, 1)"));
        }
        let e = &self.energy;
        if !(e.c_g > 0.0) {
            return Err(range_err("energy.c_g", e.c_g, "> 0"));
        }
        if !(e.c_tilde >= 0.0) {
            return Err(range_err("energy.c_tilde", e.c_tilde, ">= 0"));
        }
        if !(e.omega_c > 0.0) {
            return Err(range_err("energy.omega_c", e.omega_c, "> 0"));
        }
        if let Some(c) = e.omega_tilde_c {
            if !(c > 0.0) {
                return Err(range_err("energy.omega_tilde_c", c, "> 0"));
            }
        }
        if !(e.tail_tol > 0.0) {
            return Err(range_err("energy.tail_tol", e.tail_tol, "> 0"));
        }
        Ok(())
    }

    pub fn gas_params(&self) -> Result<GasParams> {
        let g = GasParams {
            gamma: self.gas.gamma,
            mu: self.gas.mu,
            lambda: self.gas.lambda,
            kappa: self.gas.kappa,
            entropy_const: self.gas.entropy_const,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn end_states(&self) -> Result<EndStates> {
        EndStates::from_strength(self.wave.delta, self.wave.rho_minus, self.wave.theta_minus)
    }

    /// `[t_end/4, t_end]` unless overridden.
    pub fn fit_window(&self) -> (f64, f64) {
        (
            self.fit.window_start.unwrap_or(0.25 * self.run.t_end),
            self.fit.window_end.unwrap_or(self.run.t_end),
        )
    }

    /// Grid after applying the domain-sizing rule.
    pub fn resolved_grid(&self) -> Result<ChannelGrid> {
        let gr = &self.grid;
        let half = match gr.mode {
            GridMode::Manual => gr.half_length,
            GridMode::Auto => {
                let gas = self.gas_params()?;
                let ends = self.end_states()?;
                let speed = ends.lambda3_plus(&gas).max(-ends.lambda1_minus(&gas));
                ChannelGrid::auto_half_length(self.run.t_end, speed, 8.0)
            }
        };
        ChannelGrid::new(half, gr.n1, gr.n2, gr.n3)
    }

    /// Copy with the grid fixed to its resolved values.
    pub fn with_resolved_grid(&self) -> Result<Self> {
        let g = self.resolved_grid()?;
        let mut out = self.clone();
        out.grid.mode = GridMode::Manual;
        out.grid.half_length = g.half_length;
        Ok(out)
    }

    /// Observation times, always including `0` and `t_end`.
    pub fn observation_times(&self) -> Vec<f64> {
        let o = &self.observe;
        let t_end = self.run.t_end;
        let mut ts = vec![0.0];
        let mut k = 1;
        loop {
            let t = k as f64 * o.dense_dt;
            if t > o.dense_until.min(t_end) + 1e-12 {
                break;
            }
            ts.push(t);
            k += 1;
        }
        let start = *ts.last().unwrap();
        let mut k = 1;
        loop {
            let t = start + k as f64 * o.dt;
            if t >= t_end - 1e-9 {
                break;
            }
            ts.push(t);
            k += 1;
        }
        if (ts.last().unwrap() - t_end).abs() > 1e-9 {
            ts.push(t_end);
        }
        ts
    }
}
