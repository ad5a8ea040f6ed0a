//! Theorem-level experiments: build the initial data, evolve, record
//! diagnostics, fit decay rates and judge them against their targets.

use std::fmt::Write as _;
use std::path::Path;

use super::perturbation::initial_field;
use super::{
    fit_exponential, fit_log_corrected, fit_power, source_channel_report, Check, CheckStatus, FitRecord,
    SourceChannelReport,
};
use crate::ansatz::MassCoefficients;
use crate::config::{ExperimentConfig, MassMode};
use crate::error::{Error, Result};
use crate::io;
use crate::modes::{analyze_snapshot, poincare_diagnostic, EnergyParams, PoincareReport, PoincareSample, SnapshotParams, SnapshotRecord};
use crate::profile::{gaussian_fit_derivative, solve_selfsimilar};
use crate::solver::{read_checkpoint, write_checkpoint, ConservedField, Solver};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    /// Non-zero initial mass, measured against the shifted bar wave.
    NonzeroMass,
    /// Zero initial mass, measured against the bar wave.
    ZeroMass,
    /// Evolution and diagnostics only.
    Evolve,
}

impl ExperimentKind {
    pub fn id(self) -> &'static str {
        match self {
            ExperimentKind::NonzeroMass => "theorem1",
            ExperimentKind::ZeroMass => "theorem2",
            ExperimentKind::Evolve => "evolve",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions<'a> {
    /// Directory receiving the resolved config, CSVs and checkpoints.
    pub out_dir: Option<&'a Path>,
    /// Checkpoint to continue from.
    pub resume: Option<&'a Path>,
    pub quiet: bool,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub kind: ExperimentKind,
    /// Configuration with the grid resolved.
    pub config: ExperimentConfig,
    pub coefficients: MassCoefficients,
    pub initial_excess: [f64; 5],
    pub records: Vec<SnapshotRecord>,
    pub fits: Vec<FitRecord>,
    pub checks: Vec<Check>,
    pub poincare: Option<PoincareReport>,
    /// Poincare constants from the first half of the run.
    pub poincare_half: Option<PoincareReport>,
    pub sources: Option<SourceChannelReport>,
    pub mass_ledger_error: f64,
    pub boundary_activity: f64,
    pub steps: usize,
}

impl ExperimentReport {
    /// True when no check failed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
            && self.fits.iter().all(|f| f.status != CheckStatus::Fail)
    }

    pub fn fit(&self, quantity: &str) -> Option<&FitRecord> {
        self.fits.iter().find(|f| f.quantity == quantity)
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let g = self.config.grid.clone();
        let _ = writeln!(
            s,
            "{}: L = {:.1}, n = {}x{}x{}, t_end = {}, steps = {}",
            self.kind.id(),
            g.half_length,
            g.n1,
            g.n2,
            g.n3,
            self.config.run.t_end,
            self.steps
        );
        let c = &self.coefficients.theta_bar;
        let _ = writeln!(
            s,
            "mass coefficients: [{:.4e}, {:.4e}, {:.4e}, {:.4e}, {:.4e}]",
            c[0], c[1], c[2], c[3], c[4]
        );
        for f in &self.fits {
            let _ = writeln!(
                s,
                "{:<24} {:<14} rate {:+.4} +/- {:.4} on [{:.2}, {:.2}], residual {:.3e}, target {}: {}",
                f.quantity,
                f.fit.model.name(),
                f.fit.rate,
                f.fit.half_width,
                f.fit.t_min,
                f.fit.t_max,
                f.fit.residual,
                f.target,
                f.status.name()
            );
        }
        for c in &self.checks {
            let _ = writeln!(s, "{:<24} {:.4e}  target {}: {}", c.name, c.value, c.target, c.status.name());
        }
        if let Some(p) = &self.poincare {
            let _ = writeln!(s, "poincare C0 = {:.4e}, C1 = {:.4e}", p.c0, p.c1);
            for (c0, c1) in &p.frontier {
                let _ = writeln!(s, "  frontier C0 = {c0:.4e}  C1 = {c1:.4e}");
            }
        }
        s
    }
}

pub fn run_theorem1(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<ExperimentReport> {
    if cfg.perturbation.mass != MassMode::Nonzero {
        return Err(Error::Config("theorem1 needs perturbation.mass = \"nonzero\"".into()));
    }
    run_experiment(cfg, ExperimentKind::NonzeroMass, opts)
}

pub fn run_theorem2(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<ExperimentReport> {
    if cfg.perturbation.mass != MassMode::Zero {
        return Err(Error::Config("theorem2 needs perturbation.mass = \"zero\"".into()));
    }
    run_experiment(cfg, ExperimentKind::ZeroMass, opts)
}

/// Series below this level carry no signal and are not fitted.
const MACHINE_FLOOR: f64 = 1e-13;

fn flush(out: Option<&Path>, records: &[SnapshotRecord], cfg: &ExperimentConfig) -> Result<()> {
    if let Some(dir) = out {
        io::write_diagnostics_csv(
            &dir.join("diagnostics.csv"),
            records,
            &[
                ("delta", cfg.wave.delta.to_string()),
                ("amplitude", cfg.perturbation.amplitude.to_string()),
                ("seed", cfg.perturbation.seed.to_string()),
            ],
        )?;
    }
    Ok(())
}

pub fn run_experiment(cfg: &ExperimentConfig, kind: ExperimentKind, opts: &RunOptions) -> Result<ExperimentReport> {
    cfg.validate()?;
    let cfg = cfg.with_resolved_grid()?;
    let grid = cfg.resolved_grid()?;
    let gas = cfg.gas_params()?;
    let ends = cfg.end_states()?;
    if let Some(dir) = opts.out_dir {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("config.toml"), cfg.emit())?;
    }
    let profile = solve_selfsimilar(&ends, &gas, cfg.profile.xi_half_width, cfg.profile.n_points)?;
    let omega_tilde_c = match cfg.energy.omega_tilde_c {
        Some(c) => c,
        None => match gaussian_fit_derivative(&profile) {
            Ok(fit) => 0.5 * fit.c0,
            // No wave: fall back to the heat-kernel constant of the profile.
            Err(_) => 0.125 / gas.profile_diffusivity(),
        },
    };
    let data = initial_field(&cfg, &profile, grid)?;
    let ansatz = data.ansatz;
    let params = SnapshotParams {
        energy: EnergyParams {
            c_g: cfg.energy.c_g,
            c_tilde: cfg.energy.c_tilde,
        },
        omega_c: cfg.energy.omega_c,
        omega_tilde_c,
        tail_tol: cfg.energy.tail_tol,
    };

    let mut records: Vec<SnapshotRecord> = Vec::new();
    let mut field: ConservedField = data.field;
    if let Some(path) = opts.resume {
        let ck = read_checkpoint(path)?;
        if ck.grid != grid {
            return Err(Error::Config(format!(
                "checkpoint grid {:?} does not match the configured grid {:?}",
                ck.grid, grid
            )));
        }
        if let Some(dir) = opts.out_dir {
            let diag = dir.join("diagnostics.csv");
            if diag.exists() {
                records = io::read_diagnostics_csv(&diag)?
                    .into_iter()
                    .filter(|r| r.t <= ck.t + 1e-9)
                    .collect();
            }
        }
        field = ck;
    }

    let mut solver = Solver::new(grid, gas, &ansatz, cfg.run.cfl_safety)?;
    solver.filter = cfg.run.filter;
    solver.reset_ledger(&field);

    let times = cfg.observation_times();
    let mut next_checkpoint = if cfg.run.checkpoint_every > 0.0 {
        (field.t / cfg.run.checkpoint_every).floor() * cfg.run.checkpoint_every + cfg.run.checkpoint_every
    } else {
        f64::INFINITY
    };
    let mut last_report = field.t;
    for &t in &times {
        if t < field.t - 1e-9 {
            continue;
        }
        let stepped = (|| -> Result<SnapshotRecord> {
            solver.advance_to(&mut field, t)?;
            analyze_snapshot(&field, &ansatz, &params)
        })();
        let rec = match stepped {
            Ok(r) => r,
            Err(e) => {
                flush(opts.out_dir, &records, &cfg)?;
                return Err(e);
            }
        };
        if records.last().map_or(true, |r| rec.t > r.t + 1e-9) {
            records.push(rec);
        }
        if !opts.quiet && (t - last_report >= 10.0 || t == cfg.run.t_end) {
            eprintln!(
                "t = {:7.2}  steps = {:6}  linf_bar = {:.4e}  h1_nonzero = {:.4e}",
                t, solver.steps, rec.linf_bar, rec.h1_nonzero
            );
            last_report = t;
        }
        if let Some(dir) = opts.out_dir {
            if t >= next_checkpoint - 1e-9 {
                write_checkpoint(&dir.join("checkpoint.bin"), &field)?;
                flush(opts.out_dir, &records, &cfg)?;
                next_checkpoint += cfg.run.checkpoint_every;
            }
        }
    }
    flush(opts.out_dir, &records, &cfg)?;
    if let Some(dir) = opts.out_dir {
        write_checkpoint(&dir.join("checkpoint.bin"), &field)?;
    }

    let mass_ledger_error = solver.ledger.relative_error(field.total()[0]);
    let boundary_activity = solver.boundary_activity;
    let steps = solver.steps;
    drop(solver);

    let mut report = ExperimentReport {
        kind,
        coefficients: ansatz.coeffs,
        initial_excess: data.excess,
        fits: Vec::new(),
        checks: Vec::new(),
        poincare: None,
        poincare_half: None,
        sources: None,
        mass_ledger_error,
        boundary_activity,
        steps,
        records,
        config: cfg,
    };
    judge(&mut report, &profile)?;
    if let Some(dir) = opts.out_dir {
        io::write_fits_csv(&dir.join("fits.csv"), &report.fits)?;
        if let Some(src) = &report.sources {
            io::write_source_channels_csv(&dir.join("sources.csv"), src)?;
        }
        std::fs::write(dir.join("report.txt"), report.summary())?;
    }
    Ok(report)
}

fn band(value: f64, lo: f64, hi: f64) -> CheckStatus {
    CheckStatus::from_bool(value >= lo && value <= hi)
}

fn judge(report: &mut ExperimentReport, profile: &crate::profile::ProfileTable) -> Result<()> {
    let cfg = report.config.clone();
    let id = report.kind.id().to_string();
    let ts: Vec<f64> = report.records.iter().map(|r| r.t).collect();
    let linf: Vec<f64> = report.records.iter().map(|r| r.linf_bar).collect();
    let h1: Vec<f64> = report.records.iter().map(|r| r.h1_nonzero).collect();
    let window = cfg.fit_window();
    let tol = cfg.fit.tolerance;

    report.checks.push(Check {
        name: "mass_ledger".into(),
        value: report.mass_ledger_error,
        target: "< 1e-8".into(),
        status: CheckStatus::from_bool(report.mass_ledger_error < 1e-8),
    });
    report.checks.push(Check {
        name: "boundary_activity".into(),
        value: report.boundary_activity,
        target: "< 1e-6".into(),
        status: CheckStatus::from_bool(report.boundary_activity < 1e-6),
    });
    if report.kind == ExperimentKind::Evolve {
        return Ok(());
    }

    let signal = linf.iter().fold(0.0_f64, |m, v| m.max(*v));
    if signal < MACHINE_FLOOR {
        report.checks.push(Check {
            name: "zero_mode_signal".into(),
            value: signal,
            target: "no perturbation: fits skipped".into(),
            status: CheckStatus::Skipped,
        });
        return Ok(());
    }

    let (target, lo, hi, fit) = match report.kind {
        ExperimentKind::NonzeroMass => ("-0.5", -0.5 - tol, -0.5 + tol, fit_power(&ts, &linf, window)?),
        _ => ("-0.75", -0.75 - tol, -0.75 + tol, fit_log_corrected(&ts, &linf, window)?),
    };
    report.fits.push(FitRecord {
        experiment: id.clone(),
        quantity: "linf_bar".into(),
        target: format!("{target} +/- {tol}"),
        status: band(fit.rate, lo, hi),
        fit,
    });
    if report.kind == ExperimentKind::ZeroMass {
        // Reported for comparison with the non-zero-mass law.
        let fit = fit_power(&ts, &linf, window)?;
        report.fits.push(FitRecord {
            experiment: id.clone(),
            quantity: "linf_bar_power".into(),
            target: "reported".into(),
            status: CheckStatus::Skipped,
            fit,
        });
    }
    for (q, vals) in [
        ("l2_bar", report.records.iter().map(|r| r.l2_bar).collect::<Vec<_>>()),
        ("dl2_bar", report.records.iter().map(|r| r.dl2_bar).collect()),
    ] {
        if let Ok(fit) = fit_power(&ts, &vals, window) {
            report.fits.push(FitRecord {
                experiment: id.clone(),
                quantity: q.into(),
                target: "reported".into(),
                status: CheckStatus::Skipped,
                fit,
            });
        }
    }

    // Non-zero modes: fit from t = 0 until the norm reaches the noise floor.
    let h0 = h1[0];
    if h0 > MACHINE_FLOOR {
        let floor = cfg.fit.nonzero_floor * h0;
        let end = ts
            .iter()
            .zip(&h1)
            .take_while(|(_, v)| **v > floor)
            .map(|(t, _)| *t)
            .last()
            .unwrap_or(0.0);
        match fit_exponential(&ts, &h1, (0.0, end)) {
            Ok(fit) => {
                report.fits.push(FitRecord {
                    experiment: id.clone(),
                    quantity: "h1_nonzero".into(),
                    target: "rate > 0, residual < 0.1".into(),
                    status: CheckStatus::from_bool(fit.rate > 0.0 && fit.residual < 0.1),
                    fit,
                });
            }
            Err(e) => {
                report.checks.push(Check {
                    name: "h1_nonzero_fit".into(),
                    value: end,
                    target: format!("exponential fit possible ({e})"),
                    status: CheckStatus::Fail,
                });
            }
        }
    }

    if report.kind == ExperimentKind::ZeroMass {
        let excess = report.initial_excess.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        report.checks.push(Check {
            name: "zero_mass_excess".into(),
            value: excess,
            target: "< 1e-10".into(),
            status: CheckStatus::from_bool(excess < 1e-10),
        });
        let src_times: Vec<f64> = ts.iter().copied().filter(|t| *t >= window.0 - 1e-9 && *t <= window.1 + 1e-9).collect();
        if src_times.len() >= 10 && cfg.wave.delta > 0.0 {
            let src = source_channel_report(profile, &src_times)?;
            report.checks.push(Check {
                name: "b2_source_rate_gap".into(),
                value: src.rate_b13.rate - src.rate_b2.rate,
                target: "> 0 (b2 source decays faster)".into(),
                status: CheckStatus::from_bool(src.rate_b2.rate < src.rate_b13.rate),
            });
            report.sources = Some(src);
        }
        let samples: Vec<PoincareSample> = report
            .records
            .iter()
            .map(|r| PoincareSample {
                t: r.t,
                weighted: r.omega_v2,
                dissipation: r.dv_h1_sq,
            })
            .collect();
        let v0 = report.records[0].v_l2_sq;
        let full = poincare_diagnostic(&samples, v0)?;
        let half_t = 0.5 * cfg.run.t_end;
        let half_samples: Vec<PoincareSample> = samples.iter().copied().filter(|s| s.t <= half_t + 1e-9).collect();
        let half = poincare_diagnostic(&half_samples, v0)?;
        // With the heat-kernel C0 the constant C1 is often exactly zero, so the
        // pure ratio (C0 = 0) is held to the same drift bound.
        let drift = poincare_drift(&half, &full).max(ratio_drift(half.frontier[0].1, full.frontier[0].1));
        report.checks.push(Check {
            name: "poincare_c1_drift".into(),
            value: drift,
            target: "finite C1, drift < 2".into(),
            status: CheckStatus::from_bool(drift < 2.0),
        });
        report.poincare = Some(full);
        report.poincare_half = Some(half);
    }
    Ok(())
}

/// Ratio of the larger to the smaller `C1` of two Poincare reports; 1 when
/// both vanish.
pub fn poincare_drift(a: &PoincareReport, b: &PoincareReport) -> f64 {
    ratio_drift(a.c1, b.c1)
}

fn ratio_drift(x: f64, y: f64) -> f64 {
    if !x.is_finite() || !y.is_finite() {
        return f64::INFINITY;
    }
    if x == 0.0 && y == 0.0 {
        return 1.0;
    }
    x.max(y) / x.min(y).max(1e-300)
}
