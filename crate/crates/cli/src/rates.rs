//! Per-`lambda` error-exponent estimates from a sweep CSV.

use std::fmt::Write as _;
use std::io::Write;

use qspoof_core::analysis::{decay_rate_fit, DecayFit};
use qspoof_core::Error as CoreError;

use crate::format::g12;
use crate::sweep::SweepRow;
use crate::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Series {
    MissClean,
    MissAttacked,
    FalseAlarm,
}

impl Series {
    pub fn name(self) -> &'static str {
        match self {
            Series::MissClean => "miss_clean",
            Series::MissAttacked => "miss_attacked",
            Series::FalseAlarm => "p_f",
        }
    }

    fn value(self, row: &SweepRow) -> f64 {
        match self {
            Series::MissClean => row.miss_clean,
            Series::MissAttacked => row.miss_attacked,
            Series::FalseAlarm => row.p_f_attacked,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FitOutcome {
    Fitted(DecayFit),
    /// Every error in the group is exactly zero; the exponent is `-inf`.
    ExactZero,
    Insufficient(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesFit {
    pub lambda: f64,
    pub series: Series,
    pub outcome: FitOutcome,
}

/// Distinct `lambda` values in ascending order.
pub fn lambdas(rows: &[SweepRow]) -> Vec<f64> {
    let mut out: Vec<f64> = rows.iter().map(|r| r.lambda).collect();
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

pub fn fit_series(rows: &[SweepRow], lambda: f64, series: Series) -> Result<FitOutcome> {
    let points: Vec<(usize, f64)> =
        rows.iter().filter(|r| r.lambda == lambda).map(|r| (r.n, series.value(r))).collect();
    match decay_rate_fit(&points) {
        Ok(fit) => Ok(FitOutcome::Fitted(fit)),
        Err(CoreError::AllErrorsZero) => Ok(FitOutcome::ExactZero),
        Err(CoreError::InsufficientData(msg)) => Ok(FitOutcome::Insufficient(msg)),
        Err(e) => Err(e.into()),
    }
}

/// Fits `miss_attacked` and `p_f` for every `lambda` group.
pub fn report(rows: &[SweepRow]) -> Result<Vec<SeriesFit>> {
    if rows.is_empty() {
        return Err(CliError::Parse("sweep CSV has no rows".into()));
    }
    let mut out = Vec::new();
    for lambda in lambdas(rows) {
        for series in [Series::MissAttacked, Series::FalseAlarm] {
            out.push(SeriesFit { lambda, series, outcome: fit_series(rows, lambda, series)? });
        }
    }
    Ok(out)
}

/// Aligned text table, slopes within each series ordered by `lambda`.
pub fn render_text(fits: &[SeriesFit]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:>10}  {:<14}  {:>16}  {:>16}  {:>10}  {:>6}  note",
        "lambda", "series", "slope", "intercept", "r2", "points"
    );
    for f in fits {
        let (slope, intercept, r2, points, note) = match &f.outcome {
            FitOutcome::Fitted(fit) => {
                let note = if fit.dropped.is_empty() {
                    String::new()
                } else {
                    format!("dropped zero errors at n = {:?}", fit.dropped)
                };
                (g12(fit.slope), g12(fit.intercept), g12(fit.r_squared), fit.points.len().to_string(), note)
            }
            FitOutcome::ExactZero => {
                ("-inf".into(), "-".into(), "-".into(), "0".into(), "exact zero, exponent -inf sentinel".into())
            }
            FitOutcome::Insufficient(msg) => {
                ("-".into(), "-".into(), "-".into(), "-".into(), format!("insufficient data: {msg}"))
            }
        };
        let _ = writeln!(
            s,
            "{:>10}  {:<14}  {:>16}  {:>16}  {:>10}  {:>6}  {}",
            g12(f.lambda),
            f.series.name(),
            slope,
            intercept,
            r2,
            points,
            note
        );
    }
    s
}

pub fn write_csv(fits: &[SeriesFit], sink: impl Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
    w.write_record(["lambda", "series", "status", "slope", "intercept", "r_squared", "points", "dropped"])?;
    for f in fits {
        let record = match &f.outcome {
            FitOutcome::Fitted(fit) => [
                g12(f.lambda),
                f.series.name().into(),
                "ok".into(),
                g12(fit.slope),
                g12(fit.intercept),
                g12(fit.r_squared),
                fit.points.len().to_string(),
                fit.dropped.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" "),
            ],
            FitOutcome::ExactZero => [
                g12(f.lambda),
                f.series.name().into(),
                "exact_zero".into(),
                "-inf".into(),
                String::new(),
                String::new(),
                "0".into(),
                String::new(),
            ],
            FitOutcome::Insufficient(_) => [
                g12(f.lambda),
                f.series.name().into(),
                "insufficient_data".into(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
            ],
        };
        w.write_record(record)?;
    }
    w.flush().map_err(crate::io_error("<csv output>"))?;
    Ok(())
}
