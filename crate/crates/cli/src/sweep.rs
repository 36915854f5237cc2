//! `(n, lambda)` grid evaluation.

use std::io::Write;
use std::path::{Path, PathBuf};

use qspoof_core::analysis::{eigenvector_separability, relative_entropy, wasserstein_single};
use qspoof_core::attacker::{best_response_rho0, beta, solve_best_response, AttackConfig, Regularization};
use qspoof_core::detector::{helstrom_from_powers, probability, HypothesisPair, ProjectiveEffect};
use qspoof_core::qmat::{check_cap, DensityOperator};
use qspoof_core::radar::{build_hypotheses, ScenarioConfig};
use qspoof_core::DEFAULT_ZERO_TOLERANCE;
use serde::{Deserialize, Serialize};

use crate::format::g12;
use crate::{io_error, Result};

pub const HEADER: [&str; 12] = [
    "n",
    "lambda",
    "tau",
    "p_d_clean",
    "p_f_clean",
    "p_d_attacked",
    "p_f_attacked",
    "miss_clean",
    "miss_attacked",
    "rel_entropy_cost",
    "wasserstein",
    "separable_eigvecs",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub lambda: f64,
    pub tau: f64,
    pub p_d_clean: f64,
    pub p_f_clean: f64,
    pub p_d_attacked: f64,
    pub p_f_attacked: f64,
    pub miss_clean: f64,
    pub miss_attacked: f64,
    /// `S(rho* || rho1^{⊗n})`.
    pub rel_entropy_cost: f64,
    /// `W(rho*, rho1^{⊗n})`.
    pub wasserstein: f64,
    /// Every eigenvector of the best-response exponent is a product vector.
    pub separable_eigvecs: bool,
}

impl SweepRow {
    fn record(&self) -> [String; 12] {
        [
            self.n.to_string(),
            g12(self.lambda),
            g12(self.tau),
            g12(self.p_d_clean),
            g12(self.p_f_clean),
            g12(self.p_d_attacked),
            g12(self.p_f_attacked),
            g12(self.miss_clean),
            g12(self.miss_attacked),
            g12(self.rel_entropy_cost),
            g12(self.wasserstein),
            self.separable_eigvecs.to_string(),
        ]
    }
}

#[derive(Debug, Clone, Default)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    /// One line per skipped grid point.
    pub skipped: Vec<String>,
}

/// Clean quantities shared by every `lambda` at a fixed `n`.
pub struct CleanStage {
    pub n: usize,
    pub tau: f64,
    pub rho1n: DensityOperator,
    pub rho0n: DensityOperator,
    pub effect: ProjectiveEffect,
    pub p_d: f64,
    pub p_f: f64,
}

impl CleanStage {
    pub fn new(cfg: &ScenarioConfig, h: &HypothesisPair, n: usize) -> Result<Self> {
        let tau = cfg.threshold.tau(n);
        let rho1n = h.rho1().tensor_power(n, cfg.dimension_cap)?;
        let rho0n = h.rho0().tensor_power(n, cfg.dimension_cap)?;
        let effect = helstrom_from_powers(rho1n.operator(), rho0n.operator(), tau, DEFAULT_ZERO_TOLERANCE)?;
        let p_d = probability(&effect, &rho1n)?;
        let p_f = probability(&effect, &rho0n)?;
        Ok(Self { n, tau, rho1n, rho0n, effect, p_d, p_f })
    }
}

/// One sweep row for `lambda` on top of a clean stage.
pub fn evaluate(cfg: &ScenarioConfig, h: &HypothesisPair, clean: &CleanStage, lambda: f64) -> Result<SweepRow> {
    let n = clean.n;
    let attack = AttackConfig::new(lambda)?;
    let rho0_star = best_response_rho0(h.rho0(), n, cfg.dimension_cap)?;
    let p_f_attacked = probability(&clean.effect, &rho0_star)?;
    let (p_d_attacked, rel_entropy_cost, wasserstein, separable_eigvecs) = match beta(&attack, n) {
        Regularization::AttackOff => (clean.p_d, 0.0, 0.0, true),
        Regularization::Beta(b) => {
            let br = solve_best_response(h.rho1(), &clean.effect, b, n, cfg.dimension_cap, cfg.log_floor)?;
            let dims = vec![cfg.single_copy_dim(); n];
            let separable = eigenvector_separability(&br.exponent, &br.exponent_spectrum, &dims, cfg.eigen_tolerance)?
                .iter()
                .all(|v| v.is_product);
            (
                probability(&clean.effect, &br.state)?,
                relative_entropy(&br.state, &clean.rho1n)?,
                wasserstein_single(&br.state, &clean.rho1n)?,
                separable,
            )
        }
    };
    Ok(SweepRow {
        n,
        lambda,
        tau: clean.tau,
        p_d_clean: clean.p_d,
        p_f_clean: clean.p_f,
        p_d_attacked,
        p_f_attacked,
        miss_clean: 1.0 - clean.p_d,
        miss_attacked: 1.0 - p_d_attacked,
        rel_entropy_cost,
        wasserstein,
        separable_eigvecs,
    })
}

/// Rows for `n = 1..=n_max` and every `lambda`, `n` ascending then `lambda`
/// ascending. Grid points over the dimension cap are skipped and reported.
pub fn run(cfg: &ScenarioConfig) -> Result<SweepOutput> {
    cfg.validate()?;
    let h = build_hypotheses(cfg)?;
    let mut lambdas = cfg.lambdas.clone();
    lambdas.sort_by(f64::total_cmp);

    let mut out = SweepOutput::default();
    for n in 1..=cfg.n_max {
        if let Err(e) = check_cap(cfg.single_copy_dim(), n, cfg.dimension_cap) {
            for &lambda in &lambdas {
                out.skipped.push(format!("n={n} lambda={} skipped: {e}", g12(lambda)));
            }
            continue;
        }
        let clean = CleanStage::new(cfg, &h, n)?;
        for &lambda in &lambdas {
            out.rows.push(evaluate(cfg, &h, &clean, lambda)?);
        }
    }
    Ok(out)
}

pub fn write_csv(rows: &[SweepRow], sink: impl Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
    w.write_record(HEADER)?;
    for row in rows {
        w.write_record(row.record())?;
    }
    w.flush().map_err(io_error("<csv output>"))?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<SweepRow>> {
    let file = std::fs::File::open(path).map_err(io_error(path))?;
    let mut reader = csv::Reader::from_reader(file);
    let headers = reader.headers().map_err(|e| crate::CliError::Parse(format!("{}: {e}", path.display())))?;
    if headers.iter().ne(HEADER) {
        return Err(crate::CliError::Parse(format!("{}: header must be `{}`", path.display(), HEADER.join(","))));
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.deserialize().enumerate() {
        rows.push(rec.map_err(|e| crate::CliError::Parse(format!("{} row {}: {e}", path.display(), i + 1)))?);
    }
    Ok(rows)
}

/// Sidecar path for skipped grid points: `<out>.warnings.txt`.
pub fn warnings_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".warnings.txt");
    PathBuf::from(name)
}

/// Runs the sweep and writes the CSV plus, when rows were skipped, the sidecar.
pub fn run_to_file(cfg: &ScenarioConfig, out: &Path) -> Result<SweepOutput> {
    let result = run(cfg)?;
    let file = std::fs::File::create(out).map_err(io_error(out))?;
    write_csv(&result.rows, std::io::BufWriter::new(file))?;
    let sidecar = warnings_path(out);
    if result.skipped.is_empty() {
        if sidecar.exists() {
            std::fs::remove_file(&sidecar).map_err(io_error(&sidecar))?;
        }
    } else {
        let mut text = result.skipped.join("\n");
        text.push('\n');
        std::fs::write(&sidecar, text).map_err(io_error(&sidecar))?;
    }
    Ok(result)
}
