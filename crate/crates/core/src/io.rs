//! Versioned CSV artifacts.
//!
//! Every file starts with a `# ewave <kind> v1` comment line, optionally
//! followed by `# key=value ...` metadata lines, then a header row.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::ansatz::TildeResidualReport;
use crate::decay::{FitRecord, SourceChannelReport};
use crate::error::{Error, Result};
use crate::gas::StructureRow;
use crate::modes::SnapshotRecord;
use crate::profile::{GaussianFit, ProfileTable};

pub const SCHEMA_VERSION: u32 = 1;

fn open_with_header(path: &Path, kind: &str, meta: &[(&str, String)]) -> Result<csv::Writer<BufWriter<File>>> {
    let mut f = BufWriter::new(File::create(path)?);
    writeln!(f, "# ewave {kind} v{SCHEMA_VERSION}")?;
    if !meta.is_empty() {
        let line: Vec<String> = meta.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(f, "# {}", line.join(" "))?;
    }
    Ok(csv::Writer::from_writer(f))
}

fn num(v: f64) -> String {
    format!("{v:.17e}")
}

pub fn write_profile_csv(path: &Path, profile: &ProfileTable, fit: Option<&GaussianFit>) -> Result<()> {
    let g = &profile.gas;
    let e = &profile.ends;
    let mut meta = vec![
        ("gamma", g.gamma.to_string()),
        ("kappa", g.kappa.to_string()),
        ("rho_minus", e.rho_minus.to_string()),
        ("rho_plus", e.rho_plus.to_string()),
        ("theta_minus", e.theta_minus.to_string()),
        ("delta", e.delta().to_string()),
    ];
    if let Some(f) = fit {
        meta.push(("amplitude", f.amplitude.to_string()));
        meta.push(("c0", f.c0.to_string()));
        meta.push(("fit_residual", f.residual.to_string()));
    }
    let mut w = open_with_header(path, "profile", &meta)?;
    w.write_record(["xi", "rho_bar", "drho_bar"])?;
    for i in 0..profile.len() {
        w.write_record([num(profile.xi[i]), num(profile.rho_bar[i]), num(profile.drho_bar[i])])?;
    }
    w.flush()?;
    Ok(())
}

pub const DIAGNOSTIC_COLUMNS: [&str; 23] = [
    "t",
    "linf_bar",
    "l2_bar",
    "dl2_bar",
    "linf_tilde",
    "l2_tilde",
    "h1_nonzero",
    "e0_tilde",
    "e1_tilde",
    "e2_tilde",
    "e0",
    "e1",
    "e2",
    "k0",
    "k1",
    "k2",
    "g0",
    "g1",
    "g2",
    "v_l2_sq",
    "omega_v2",
    "dv_h1_sq",
    "omega_tilde_b13",
];

fn record_row(r: &SnapshotRecord) -> [f64; 23] {
    let e = &r.energy;
    [
        r.t,
        r.linf_bar,
        r.l2_bar,
        r.dl2_bar,
        r.linf_tilde,
        r.l2_tilde,
        r.h1_nonzero,
        e.e_tilde[0],
        e.e_tilde[1],
        e.e_tilde[2],
        e.e[0],
        e.e[1],
        e.e[2],
        e.k[0],
        e.k[1],
        e.k[2],
        e.g[0],
        e.g[1],
        e.g[2],
        r.v_l2_sq,
        r.omega_v2,
        r.dv_h1_sq,
        r.omega_tilde_b13,
    ]
}

fn record_from_row(v: &[f64]) -> SnapshotRecord {
    let mut r = SnapshotRecord {
        t: v[0],
        linf_bar: v[1],
        l2_bar: v[2],
        dl2_bar: v[3],
        linf_tilde: v[4],
        l2_tilde: v[5],
        h1_nonzero: v[6],
        v_l2_sq: v[19],
        omega_v2: v[20],
        dv_h1_sq: v[21],
        omega_tilde_b13: v[22],
        ..Default::default()
    };
    r.energy.e_tilde.copy_from_slice(&v[7..10]);
    r.energy.e.copy_from_slice(&v[10..13]);
    r.energy.k.copy_from_slice(&v[13..16]);
    r.energy.g.copy_from_slice(&v[16..19]);
    r
}

pub fn write_diagnostics_csv(path: &Path, records: &[SnapshotRecord], meta: &[(&str, String)]) -> Result<()> {
    let mut w = open_with_header(path, "diagnostics", meta)?;
    w.write_record(DIAGNOSTIC_COLUMNS)?;
    for r in records {
        w.write_record(record_row(r).iter().map(|v| num(*v)))?;
    }
    w.flush()?;
    Ok(())
}

/// Numeric columns of a versioned CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTable {
    pub kind: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl SeriesTable {
    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let k = self
            .columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::Config(format!("column '{name}' not found (have: {})", self.columns.join(", "))))?;
        Ok(self.rows.iter().map(|r| r[k]).collect())
    }
}

/// Reads a numeric CSV written by this module (or by hand, following the
/// same layout).
pub fn read_series_csv(path: &Path) -> Result<SeriesTable> {
    let text = std::fs::read_to_string(path)?;
    let first = text.lines().next().unwrap_or("");
    let kind = match first.strip_prefix("# ewave ") {
        Some(rest) => {
            let mut it = rest.split_whitespace();
            let kind = it.next().unwrap_or("").to_string();
            let version = it.next().unwrap_or("");
            if version != format!("v{SCHEMA_VERSION}") {
                return Err(Error::Config(format!(
                    "{}: unsupported schema version '{version}'",
                    path.display()
                )));
            }
            kind
        }
        None => {
            return Err(Error::Config(format!(
                "{}: missing '# ewave <kind> v{SCHEMA_VERSION}' header",
                path.display()
            )))
        }
    };
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let columns: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| Error::Config(format!("{}: non-numeric entry '{s}'", path.display())))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(SeriesTable { kind, columns, rows })
}

pub fn read_diagnostics_csv(path: &Path) -> Result<Vec<SnapshotRecord>> {
    let table = read_series_csv(path)?;
    if table.kind != "diagnostics" || table.columns != DIAGNOSTIC_COLUMNS {
        return Err(Error::Config(format!("{} is not a diagnostics file", path.display())));
    }
    Ok(table.rows.iter().map(|r| record_from_row(r)).collect())
}

pub fn write_fits_csv(path: &Path, fits: &[FitRecord]) -> Result<()> {
    let mut w = open_with_header(path, "fits", &[])?;
    w.write_record([
        "experiment",
        "quantity",
        "model",
        "rate",
        "half_width",
        "t_min",
        "t_max",
        "residual",
        "prefactor",
        "samples",
        "target",
        "status",
    ])?;
    for f in fits {
        w.write_record([
            f.experiment.clone(),
            f.quantity.clone(),
            f.fit.model.name().to_string(),
            num(f.fit.rate),
            num(f.fit.half_width),
            num(f.fit.t_min),
            num(f.fit.t_max),
            num(f.fit.residual),
            num(f.fit.prefactor),
            f.fit.samples.to_string(),
            f.target.clone(),
            f.status.name().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_residuals_csv(path: &Path, report: &TildeResidualReport) -> Result<()> {
    let mut w = open_with_header(path, "residuals", &[("c", report.c.to_string())])?;
    w.write_record(["t", "normalized_sup", "raw_sup"])?;
    for i in 0..report.times.len() {
        w.write_record([num(report.times[i]), num(report.normalized_sup[i]), num(report.raw_sup[i])])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_source_channels_csv(path: &Path, report: &SourceChannelReport) -> Result<()> {
    let mut w = open_with_header(path, "sources", &[])?;
    w.write_record(["t", "b1", "b2", "b3"])?;
    for i in 0..report.times.len() {
        w.write_record([
            num(report.times[i]),
            num(report.norms[i][0]),
            num(report.norms[i][1]),
            num(report.norms[i][2]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_structure_csv(path: &Path, rows: &[StructureRow]) -> Result<()> {
    let mut w = open_with_header(path, "structure", &[])?;
    w.write_record([
        "system",
        "field",
        "states",
        "max_grad_l_dot_r",
        "min_grad_l_dot_r",
        "max_grad_r_dot_r",
        "left_holds",
        "right_holds",
    ])?;
    for r in rows {
        w.write_record([
            r.system.to_string(),
            r.field.to_string(),
            r.states.to_string(),
            num(r.max_l),
            num(r.min_l),
            num(r.max_r),
            r.left_holds.to_string(),
            r.right_holds.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagnostics_roundtrip() {
        let mut r = SnapshotRecord {
            t: 1.5,
            linf_bar: 0.1,
            h1_nonzero: 3e-7,
            omega_tilde_b13: 2.0,
            ..Default::default()
        };
        r.energy.g[2] = 0.25;
        r.energy.e_tilde[0] = 1.0 / 3.0;
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.csv");
        write_diagnostics_csv(&p, &[r, r], &[("seed", "7".into())]).unwrap();
        let back = read_diagnostics_csv(&p).unwrap();
        assert_eq!(back, vec![r, r]);
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("# ewave diagnostics v1\n# seed=7\nt,"));
    }

    #[test]
    fn missing_header_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.csv");
        std::fs::write(&p, "t,x\n0,1\n").unwrap();
        assert!(read_series_csv(&p).is_err());
        std::fs::write(&p, "# ewave diagnostics v9\nt,x\n0,1\n").unwrap();
        assert!(read_series_csv(&p).unwrap_err().to_string().contains("v9"));
    }

    #[test]
    fn missing_column_named() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.csv");
        std::fs::write(&p, "# ewave diagnostics v1\nt, y\n0, 1\n1, 2\n").unwrap();
        let t = read_series_csv(&p).unwrap();
        assert_eq!(t.column("y").unwrap(), vec![1.0, 2.0]);
        assert!(t.column("z").unwrap_err().to_string().contains("'z'"));
    }
}
