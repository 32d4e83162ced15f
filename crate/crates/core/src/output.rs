//! CSV emission. Every file starts with a `# schema=1` comment line followed
//! by a header row; floats are written in shortest round-trip form.

use std::io::{self, Write};

use crate::bounds::BoundPair;
use crate::geometry::Axis;
use crate::montecarlo::{ExperimentResult, SweepRow};

pub const SCHEMA_LINE: &str = "# schema=1";

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if v != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Header plus string records.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push_numbers(&mut self, values: &[f64]) {
        self.rows.push(values.iter().map(|&v| fmt_f64(v)).collect());
    }

    pub fn write<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{SCHEMA_LINE}")?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    /// Parses text written by [`Table::write`]; comment lines are skipped.
    pub fn parse(text: &str) -> Result<Self, csv::Error> {
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let columns = r.headers()?.iter().map(String::from).collect();
        let rows =
            r.records().map(|rec| rec.map(|rec| rec.iter().map(String::from).collect())).collect::<Result<_, _>>()?;
        Ok(Self { columns, rows })
    }

    /// Column by header name.
    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i].as_str()).collect())
    }

    pub fn column_f64(&self, name: &str) -> Option<Vec<f64>> {
        self.column(name)?.into_iter().map(|s| s.parse().ok()).collect()
    }
}

/// One row per family and axis.
pub fn bounds_table(bounds: &[BoundPair]) -> Table {
    let mut t = Table::new(["family", "axis", "value_m2", "sqrt_value_m", "diagnostics"]);
    for b in bounds {
        let axes: Vec<(Axis, f64, Option<f64>)> = match b.b_y {
            None => vec![(Axis::X, b.b_x, b.diagnostics.map(|d| d.h_opt_x))],
            Some(by) => vec![
                (Axis::X, b.b_x, b.diagnostics.map(|d| d.h_opt_x)),
                (Axis::Y, by, b.diagnostics.and_then(|d| d.h_opt_y)),
            ],
        };
        for (axis, v, h_opt) in axes {
            let diag = match (b.diagnostics, h_opt) {
                (Some(d), Some(h)) => {
                    format!("h_opt_m={};evaluations={};degenerate={}", fmt_f64(h), d.evaluations, d.degenerate)
                }
                _ => String::new(),
            };
            t.rows.push(vec![b.family.name().into(), axis.name().into(), fmt_f64(v), fmt_f64(v.sqrt()), diag]);
        }
    }
    t
}

pub fn experiment_table(label: &[(&str, String)], results: &[ExperimentResult]) -> Table {
    let mut cols: Vec<String> = label.iter().map(|(k, _)| k.to_string()).collect();
    cols.extend(
        [
            "n_runs",
            "seed",
            "rmse_x_m",
            "rmse_y_m",
            "rmse_m",
            "se_rmse_x_m",
            "se_rmse_y_m",
            "se_rmse_m",
            "mse_x_m2",
            "mse_y_m2",
            "fallbacks",
        ]
        .map(String::from),
    );
    let mut t = Table { columns: cols, rows: Vec::new() };
    for r in results {
        let mut row: Vec<String> = label.iter().map(|(_, v)| v.clone()).collect();
        row.extend([
            r.n_runs.to_string(),
            r.master_seed.to_string(),
            fmt_f64(r.rmse_x),
            fmt_opt(r.rmse_y),
            fmt_f64(r.rmse_total),
            fmt_f64(r.se_rmse_x),
            fmt_opt(r.se_rmse_y),
            fmt_f64(r.se_rmse_total),
            fmt_f64(r.mse_x),
            fmt_opt(r.mse_y),
            r.fallbacks.to_string(),
        ]);
        t.rows.push(row);
    }
    t
}

/// Sweep rows as a numeric table: the swept value, derived geometry, then
/// per family the bound per axis (m²) and its square roots (m), then per
/// estimator the RMSE per axis, overall, and the overall standard error.
pub fn sweep_table(param_column: &str, plane: bool, rows: &[SweepRow]) -> Table {
    let mut t = Table::new([param_column.to_string()]);
    let Some(first) = rows.first() else {
        return t;
    };
    if let Some((name, _)) = first.derived {
        t.columns.push(name.into());
    }
    if param_column != "sigma_m" {
        t.columns.push("sigma_m".into());
    }
    for b in &first.bounds {
        let f = b.family.name();
        if plane {
            t.columns.extend([
                format!("{f}_x_m2"),
                format!("{f}_y_m2"),
                format!("sqrt_{f}_x_m"),
                format!("sqrt_{f}_y_m"),
                format!("sqrt_{f}_trace_m"),
            ]);
        } else {
            t.columns.extend([format!("{f}_m2"), format!("sqrt_{f}_m")]);
        }
    }
    for (k, _) in &first.results {
        let e = k.name();
        if plane {
            t.columns.extend([format!("rmse_{e}_x_m"), format!("rmse_{e}_y_m")]);
        }
        t.columns.extend([format!("rmse_{e}_m"), format!("se_{e}_m")]);
    }
    for r in rows {
        let mut v = vec![r.value];
        if let Some((_, d)) = r.derived {
            v.push(d);
        }
        if param_column != "sigma_m" {
            v.push(r.sigma);
        }
        for b in &r.bounds {
            match b.b_y {
                Some(by) if plane => v.extend([b.b_x, by, b.b_x.sqrt(), by.sqrt(), b.trace().sqrt()]),
                _ => v.extend([b.b_x, b.b_x.sqrt()]),
            }
        }
        for (_, e) in &r.results {
            if plane {
                v.extend([e.rmse_x, e.rmse_y.unwrap_or(0.0)]);
            }
            v.extend([e.rmse_total, e.se_rmse_total]);
        }
        t.push_numbers(&v);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.0, 1.0, -2.5, 0.1 + 0.2, 1e-300, 6.02e23, 9.0 / 109.0, f64::MIN_POSITIVE, 1e15, 99999.5] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
            assert!(s.len() < 30, "{s}");
        }
    }

    #[test]
    fn table_round_trip() {
        let mut t = Table::new(["a_m", "b_m2"]);
        t.push_numbers(&[1.0 / 3.0, 2e-7]);
        t.rows.push(vec!["x,y".into(), "\"q\"".into()]);
        let s = t.to_csv_string();
        assert!(s.starts_with("# schema=1\na_m,b_m2\n"));
        assert_eq!(Table::parse(&s).unwrap(), t);
        assert_eq!(Table::parse(&s).unwrap().column_f64("a_m").map(|v| v.len()), None);
    }
}
