//! `ptwell`: spectra, sweeps, critical couplings and metrics of discrete
//! PT-symmetric square wells.

mod args;
mod verify;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;

use ptwell::metric::construct_metric;
use ptwell::model::{Model, ModelDescriptor};
use ptwell::spectral::{
    critical_coupling, critical_rows_csv, linear_grid, spectrum, sweep, CriticalReport, CriticalRow,
};
use ptwell::Error;

use args::{Cli, Command, Format, Output};

/// Failure of one CLI run, carrying its exit status.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Model(Error),
    Io(std::io::Error),
    Verification(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Model(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Usage(_) | Failure::Io(_) => 2,
            Failure::Model(e) => match e {
                Error::Domain(_) | Error::PtBroken { .. } | Error::NotApplicable(_) => 2,
                Error::NonConstructible(_) | Error::Degenerate { .. } => 4,
                Error::NumericFailure { .. }
                | Error::Singular(_)
                | Error::Inconsistent(_)
                | Error::NoTransition { .. } => 3,
            },
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "{m}"),
            Failure::Model(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "output: {e}"),
            Failure::Verification(n) => write!(f, "{n} check(s) failed"),
        }
    }
}

type Run = Result<(), Failure>;

fn emit(out: &Output, text: &str) -> Run {
    match &out.out {
        Some(path) => fs::write(path, text).map_err(Failure::Io),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(Failure::Io),
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize to JSON");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct WithModel<'a, T: Serialize> {
    model: &'a ModelDescriptor,
    #[serde(rename = "Z", skip_serializing_if = "Option::is_none")]
    z: Option<f64>,
    #[serde(flatten)]
    report: T,
}

fn cmd_spectrum(a: &args::SpectrumArgs) -> Run {
    let (model, xi) = a.model.coupled(&a.coupling)?;
    let s = spectrum(&model, xi)?;
    let text = match a.output.format_or(Format::Csv) {
        Format::Csv => s.to_csv(),
        Format::Json => json(&s),
    };
    emit(&a.output, &text)
}

fn cmd_sweep(a: &args::SweepArgs) -> Run {
    let model = a.model.shape()?;
    let grid = linear_grid(a.xi_from, a.xi_to, a.steps)?;
    let table = sweep(&model, &grid)?;
    let text = match a.output.format_or(Format::Csv) {
        Format::Csv => table.to_csv(),
        Format::Json => json(&table),
    };
    emit(&a.output, &text)
}

fn cmd_critical(a: &args::CriticalArgs) -> Run {
    if a.tol.is_nan() || a.tol <= 0.0 {
        return Err(Failure::Usage(format!("--tol must be positive, got {}", a.tol)));
    }
    let n_list = a.n_list()?;
    let models = n_list.iter().map(|&n| a.model.shape_for(n)).collect::<Result<Vec<Model>, Failure>>()?;
    let reports: Vec<CriticalReport> =
        models.iter().map(|m| critical_coupling(m, None, a.tol)).collect::<Result<_, _>>()?;
    let text = match a.output.format_or(Format::Csv) {
        Format::Csv => critical_rows_csv(&reports.iter().map(CriticalRow::from_report).collect::<Vec<_>>()),
        Format::Json => {
            let descriptors: Vec<ModelDescriptor> =
                models.iter().zip(&reports).map(|(m, r)| m.descriptor(r.xi)).collect();
            let rows: Vec<_> =
                descriptors.iter().zip(&reports).map(|(d, r)| WithModel { model: d, z: None, report: r }).collect();
            json(&rows)
        }
    };
    emit(&a.output, &text)
}

fn cmd_metric(a: &args::MetricArgs) -> Run {
    let (model, xi) = a.model.coupled(&a.coupling)?;
    let theta = a.theta.as_deref();
    if let Some(t) = theta {
        if t.len() != model.dim() {
            return Err(Failure::Usage(format!("--theta needs {} weights, got {}", model.dim(), t.len())));
        }
    }
    let report = construct_metric(&model, xi, theta)?;
    let text = match a.output.format_or(Format::Json) {
        Format::Json => {
            let d = model.descriptor(xi);
            json(&WithModel { model: &d, z: Some(model.coupling_to_physical(xi)), report: &report })
        }
        Format::Csv => {
            let t = &report.metric.theta;
            let mut s = String::from("row,col,re,im\n");
            for i in 0..t.nrows() {
                for j in 0..t.ncols() {
                    s.push_str(&format!("{i},{j},{:?},{:?}\n", t[(i, j)].re, t[(i, j)].im));
                }
            }
            s
        }
    };
    emit(&a.output, &text)
}

fn cmd_verify(a: &args::VerifyArgs) -> Run {
    let checks = verify::run(a.negative_control);
    let failed = checks.iter().filter(|c| !c.passed).count();
    let text = if a.json {
        json(&verify::Summary { passed: checks.len() - failed, failed, checks: &checks })
    } else {
        let mut s = String::new();
        for c in &checks {
            s.push_str(&format!("{} {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail));
        }
        s.push_str(&format!("{} of {} checks passed\n", checks.len() - failed, checks.len()));
        for c in checks.iter().filter(|c| !c.passed) {
            s.push_str(&format!("failed: {}\n", c.name));
        }
        s
    };
    emit(&Output { format: None, out: a.out.clone() }, &text)?;
    if failed > 0 {
        Err(Failure::Verification(failed))
    } else {
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Critical(a) => cmd_critical(a),
        Command::Metric(a) => cmd_metric(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("ptwell: {f}");
            ExitCode::from(f.code())
        }
    }
}
