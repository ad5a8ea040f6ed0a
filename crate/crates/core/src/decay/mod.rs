//! Decay-rate regression and the two theorem-level experiments.

mod experiment;
mod perturbation;

pub use experiment::{
    poincare_drift, run_experiment, run_theorem1, run_theorem2, ExperimentKind, ExperimentReport, RunOptions,
};
pub use perturbation::{bump, initial_field, InitialData};

use crate::error::{Error, Result};
use crate::profile::ProfileTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitModel {
    /// `value ~ A (1+t)^rate`.
    Power,
    /// `value ~ A (1+t)^rate ln^{1/2}(2+t)`.
    LogCorrected,
    /// `value ~ A exp(-rate t)`; positive rate means decay.
    Exponential,
}

impl FitModel {
    pub fn name(self) -> &'static str {
        match self {
            FitModel::Power => "power",
            FitModel::LogCorrected => "log_corrected",
            FitModel::Exponential => "exponential",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "power" => Ok(FitModel::Power),
            "log_corrected" => Ok(FitModel::LogCorrected),
            "exponential" => Ok(FitModel::Exponential),
            _ => Err(Error::Config(format!(
                "model = {s}: expected one of power, log_corrected, exponential"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub model: FitModel,
    pub rate: f64,
    /// Two standard errors of the slope.
    pub half_width: f64,
    pub t_min: f64,
    pub t_max: f64,
    /// `sqrt(1 - R^2)` of the regression in log space.
    pub residual: f64,
    pub prefactor: f64,
    pub samples: usize,
}

const MIN_SAMPLES: usize = 10;

struct Line {
    slope: f64,
    intercept: f64,
    slope_se: f64,
    residual: f64,
}

fn regress(x: &[f64], y: &[f64]) -> Line {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let slope_se = if x.len() > 2 {
        (ss_res / (n - 2.0) / sxx).sqrt()
    } else {
        f64::INFINITY
    };
    // A constant series is fitted exactly.
    let residual = if syy > 0.0 { (ss_res / syy).min(1.0).sqrt() } else { 0.0 };
    Line {
        slope,
        intercept,
        slope_se,
        residual,
    }
}

fn windowed(times: &[f64], values: &[f64], window: (f64, f64)) -> Result<(Vec<f64>, Vec<f64>)> {
    if times.len() != values.len() {
        return Err(Error::Config("time and value series differ in length".into()));
    }
    let (a, b) = window;
    let eps = 1e-9 * (1.0 + b.abs());
    let mut ts = Vec::new();
    let mut vs = Vec::new();
    for (&t, &v) in times.iter().zip(values) {
        if t >= a - eps && t <= b + eps {
            if !(v > 0.0) {
                return Err(Error::Numerical(format!("non-positive value {v:e} at t = {t} in fit window")));
            }
            ts.push(t);
            vs.push(v);
        }
    }
    if ts.len() < MIN_SAMPLES {
        return Err(Error::Numerical(format!(
            "fit window [{a}, {b}] holds {} samples, need at least {MIN_SAMPLES}",
            ts.len()
        )));
    }
    Ok((ts, vs))
}

fn fit_with(model: FitModel, times: &[f64], values: &[f64], window: (f64, f64)) -> Result<RateFit> {
    let (ts, vs) = windowed(times, values, window)?;
    let x: Vec<f64> = match model {
        FitModel::Exponential => ts.clone(),
        _ => ts.iter().map(|t| (1.0 + t).ln()).collect(),
    };
    let y: Vec<f64> = match model {
        FitModel::LogCorrected => ts
            .iter()
            .zip(&vs)
            .map(|(t, v)| v.ln() - 0.5 * (2.0 + t).ln().ln())
            .collect(),
        _ => vs.iter().map(|v| v.ln()).collect(),
    };
    let line = regress(&x, &y);
    let rate = match model {
        FitModel::Exponential => -line.slope,
        _ => line.slope,
    };
    Ok(RateFit {
        model,
        rate,
        half_width: 2.0 * line.slope_se,
        t_min: ts[0],
        t_max: *ts.last().unwrap(),
        residual: line.residual,
        prefactor: line.intercept.exp(),
        samples: ts.len(),
    })
}

/// Slope of `ln value` against `ln(1+t)` over `window`.
pub fn fit_power(times: &[f64], values: &[f64], window: (f64, f64)) -> Result<RateFit> {
    fit_with(FitModel::Power, times, values, window)
}

/// Slope of `ln value - ln ln(2+t) / 2` against `ln(1+t)`.
pub fn fit_log_corrected(times: &[f64], values: &[f64], window: (f64, f64)) -> Result<RateFit> {
    fit_with(FitModel::LogCorrected, times, values, window)
}

/// Minus the slope of `ln value` against `t`.
pub fn fit_exponential(times: &[f64], values: &[f64], window: (f64, f64)) -> Result<RateFit> {
    fit_with(FitModel::Exponential, times, values, window)
}

pub fn fit_model(model: FitModel, times: &[f64], values: &[f64], window: (f64, f64)) -> Result<RateFit> {
    fit_with(model, times, values, window)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

impl CheckStatus {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Skipped => "skipped",
        }
    }
}

/// A named rate fit with its acceptance verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct FitRecord {
    pub experiment: String,
    pub quantity: String,
    pub fit: RateFit,
    pub target: String,
    pub status: CheckStatus,
}

/// A scalar acceptance check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub target: String,
    pub status: CheckStatus,
}

/// `L^2` norms of the bar-wave residual sources `(Q1, Q2)` projected on the
/// three characteristic fields at the bar temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceChannelReport {
    pub times: Vec<f64>,
    /// `[b1, b2, b3]` norms per time.
    pub norms: Vec<[f64; 3]>,
    /// Power fit of the `b2` norm.
    pub rate_b2: RateFit,
    /// Power fit of `max(b1, b3)`.
    pub rate_b13: RateFit,
}

/// Projects the bar-wave sources onto the characteristic fields:
/// `s_i = -lambda_i Q1 / ((gamma-1) sqrt(2 gamma)) - Q2 / sqrt(2 gamma)` for
/// `i = 1, 3` and `s_2 = Q2 / sqrt(gamma (gamma-1))`.
pub fn source_channel_report(profile: &ProfileTable, times: &[f64]) -> Result<SourceChannelReport> {
    let gas = profile.gas;
    let g = gas.gamma;
    let g1 = g - 1.0;
    let s = 1.0 / (2.0 * g).sqrt();
    let mut norms = Vec::with_capacity(times.len());
    for &t in times {
        let width = 2.0 * profile.half_width() * (1.0 + t).sqrt();
        let n = 4001;
        let h = 2.0 * width / (n - 1) as f64;
        let mut acc = [0.0; 3];
        for k in 0..n {
            let x = -width + k as f64 * h;
            let wv = profile.sample_wave(x, t);
            let (q1, q2) = profile.q_closed(x, t);
            let lam = (g * g1 * wv.theta).sqrt();
            let b1 = s * lam / g1 * q1 - s * q2;
            let b3 = -s * lam / g1 * q1 - s * q2;
            let b2 = q2 / (g * g1).sqrt();
            let wgt = if k == 0 || k == n - 1 { 0.5 * h } else { h };
            acc[0] += b1 * b1 * wgt;
            acc[1] += b2 * b2 * wgt;
            acc[2] += b3 * b3 * wgt;
        }
        norms.push([acc[0].sqrt(), acc[1].sqrt(), acc[2].sqrt()]);
    }
    let window = (times[0], *times.last().unwrap_or(&0.0));
    let b2: Vec<f64> = norms.iter().map(|v| v[1]).collect();
    let b13: Vec<f64> = norms.iter().map(|v| v[0].max(v[2])).collect();
    Ok(SourceChannelReport {
        rate_b2: fit_power(times, &b2, window)?,
        rate_b13: fit_power(times, &b13, window)?,
        times: times.to_vec(),
        norms,
    })
}
