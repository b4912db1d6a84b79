use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

use super::runners::{
    BerezinReport, ConvergenceReport, DualityReport, FluctuationReport, LambdaReport,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown format `{other}`"))),
        }
    }
}

/// One CSV cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Missing,
}

/// `printf("%.12e")`: mantissa with 12 decimals, signed exponent of at least two digits.
pub fn format_sci(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let e: i32 = exp.parse().expect("integer exponent");
    format!("{mantissa}e{}{:02}", if e < 0 { '-' } else { '+' }, e.abs())
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format_sci(*x),
            Cell::Missing => "nan".into(),
        }
    }
}

/// A report that renders as a CSV table.
pub trait Tabular: Serialize {
    const COLUMNS: &'static [&'static str];
    fn cells(&self) -> Vec<Vec<Cell>>;

    /// Rows that breach a numerical contract.
    fn failures(&self) -> usize {
        0
    }
}

fn f(x: f64) -> Cell {
    Cell::Float(x)
}

fn int(x: usize) -> Cell {
    Cell::Int(x as i64)
}

impl Tabular for ConvergenceReport {
    const COLUMNS: &'static [&'static str] = &["N", "p_mean", "p_stderr", "p_limit", "gap"];
    fn cells(&self) -> Vec<Vec<Cell>> {
        self.rows
            .iter()
            .map(|r| vec![int(r.n), f(r.p_mean), f(r.p_stderr), f(r.p_limit), f(r.gap)])
            .collect()
    }
    fn failures(&self) -> usize {
        self.rows.iter().map(|r| r.lower_bound_violations).sum()
    }
}

impl Tabular for FluctuationReport {
    const COLUMNS: &'static [&'static str] =
        &["N", "var_sum_mean", "var_sum_stderr", "bound", "chain_violations"];
    fn cells(&self) -> Vec<Vec<Cell>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    int(r.n),
                    f(r.var_sum_mean),
                    f(r.var_sum_stderr),
                    f(r.bound),
                    int(r.chain_violations),
                ]
            })
            .collect()
    }
    fn failures(&self) -> usize {
        self.rows.iter().map(|r| r.chain_violations).sum()
    }
}

impl Tabular for DualityReport {
    const COLUMNS: &'static [&'static str] =
        &["alpha_x", "alpha_y", "alpha_z", "inf_form", "dual_form", "gap"];
    fn cells(&self) -> Vec<Vec<Cell>> {
        self.rows
            .iter()
            .map(|r| {
                let mut c: Vec<Cell> = r.alpha.iter().map(|&a| f(a)).collect();
                c.extend([f(r.inf_form), f(r.dual_form), f(r.gap)]);
                c
            })
            .collect()
    }
    fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.ok).count()
    }
}

impl Tabular for BerezinReport {
    const COLUMNS: &'static [&'static str] = &["two_j", "N", "lower", "exact", "upper"];
    fn cells(&self) -> Vec<Vec<Cell>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    Cell::Int(i64::from(r.two_j)),
                    int(r.n_sites),
                    f(r.lower),
                    f(r.exact),
                    f(r.upper),
                ]
            })
            .collect()
    }
}

impl Tabular for LambdaReport {
    const COLUMNS: &'static [&'static str] =
        &["t", "lambda", "grad_x", "grad_y", "grad_z", "lambda_star"];
    fn cells(&self) -> Vec<Vec<Cell>> {
        self.rows
            .iter()
            .map(|r| {
                let mut c = vec![f(r.t), f(r.lambda)];
                c.extend(r.gradient.iter().map(|&g| f(g)));
                c.push(r.lambda_star.map_or(Cell::Missing, f));
                c
            })
            .collect()
    }
}

pub fn to_csv<T: Tabular>(report: &T) -> String {
    let mut out = T::COLUMNS.join(",");
    out.push('\n');
    for row in report.cells() {
        let line: Vec<String> = row.iter().map(Cell::render).collect();
        writeln!(out, "{}", line.join(",")).expect("writing to a String");
    }
    out
}

/// Renders a report; fails on an empty table.
pub fn emit<T: Tabular>(report: &T, format: Format) -> Result<Vec<u8>> {
    if report.cells().is_empty() {
        return Err(Error::ContractViolation("report has no rows".into()));
    }
    Ok(match format {
        Format::Csv => to_csv(report).into_bytes(),
        Format::Json => {
            let mut v = serde_json::to_vec_pretty(report)
                .map_err(|e| Error::ContractViolation(e.to_string()))?;
            v.push(b'\n');
            v
        }
    })
}

pub fn write_report<T: Tabular>(report: &T, format: Format, path: &Path) -> Result<()> {
    let bytes = emit(report, format)?;
    std::fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
