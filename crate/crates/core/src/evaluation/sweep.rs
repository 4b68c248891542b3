use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cv::{cross_validate_matrix, EvalResult};
use super::folds::make_folds;
use crate::data_model::{Dataset, Dimension};
use crate::error::{Error, Result};
use crate::features::{build_matrix, FeatureMatrix, FeatureSet, WindowSpec};
use crate::lexicon::Lexicon;
use crate::regressors::{Algorithm, Hyperparameters};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub combos: Vec<FeatureSet>,
    pub algorithms: Vec<Algorithm>,
    pub dimensions: Vec<Dimension>,
    pub hyperparameters: Hyperparameters,
    pub window: WindowSpec,
    pub folds: usize,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            combos: FeatureSet::default_combinations(),
            algorithms: Algorithm::ALL.to_vec(),
            dimensions: Dimension::ALL.to_vec(),
            hyperparameters: Hyperparameters::default(),
            window: WindowSpec::default(),
            folds: 5,
            seed: 0,
        }
    }
}

impl SweepConfig {
    fn validate(&self) -> Result<()> {
        if self.combos.is_empty() || self.combos.iter().any(FeatureSet::is_empty) {
            return Err(Error::Config(
                "sweep needs at least one non-empty feature combination".into(),
            ));
        }
        if self.algorithms.is_empty() {
            return Err(Error::Config("sweep needs at least one algorithm".into()));
        }
        if self.dimensions.is_empty() {
            return Err(Error::Config("sweep needs at least one dimension".into()));
        }
        self.hyperparameters.validate()
    }

    /// Union of all requested families.
    pub fn families(&self) -> FeatureSet {
        self.combos.iter().fold(FeatureSet::new(false, false, false), |acc, c| {
            FeatureSet::new(
                acc.demographic || c.demographic,
                acc.behavioral || c.behavioral,
                acc.linguistic || c.linguistic,
            )
        })
    }
}

/// Highest-γ cell for one dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestResult {
    pub dimension: Dimension,
    pub families: Option<FeatureSet>,
    pub algorithm: Option<Algorithm>,
    pub gamma: Option<f64>,
    pub selected_features: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema_version: u32,
    pub n_users: usize,
    pub config: SweepConfig,
    pub cells: Vec<EvalResult>,
    pub best: Vec<BestResult>,
}

impl SweepReport {
    pub fn cell(&self, dimension: Dimension, families: FeatureSet, algorithm: Algorithm) -> Option<&EvalResult> {
        self.cells
            .iter()
            .find(|c| c.dimension == dimension && c.families == families && c.algorithm == algorithm)
    }

    pub fn all_converged(&self) -> bool {
        self.cells.iter().all(|c| c.converged)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let report: Self = serde_json::from_str(text)?;
        if report.schema_version != REPORT_SCHEMA_VERSION {
            return Err(Error::InvalidDataset(format!(
                "unsupported report schema version {}",
                report.schema_version
            )));
        }
        Ok(report)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// Table with dimensions as columns and (feature set, algorithm) rows;
    /// D-only rows come last as the baseline, then the per-dimension best.
    pub fn render_text(&self) -> String {
        let dims = &self.config.dimensions;
        let set_width = self
            .config
            .combos
            .iter()
            .map(|c| c.to_string().len())
            .chain(["Feature Set Baseline".len(), "Best Sensing Result".len()])
            .max()
            .unwrap_or(0);
        let mut out = String::new();
        let _ = write!(out, "{:<set_width$}  {:<9}", "Feature Set", "Algorithm");
        for d in dims {
            let _ = write!(out, "  {:>7}", d.abbreviation());
        }
        out.push('\n');
        let rule = set_width + 11 + 9 * dims.len();
        out.push_str(&"-".repeat(rule));
        out.push('\n');

        let ordered = self
            .config
            .combos
            .iter()
            .filter(|c| !c.is_baseline())
            .chain(self.config.combos.iter().filter(|c| c.is_baseline()));
        for combo in ordered {
            let label = if combo.is_baseline() {
                "Feature Set Baseline".to_string()
            } else {
                combo.to_string()
            };
            for &alg in &self.config.algorithms {
                let _ = write!(out, "{label:<set_width$}  {:<9}", alg.display_name());
                for &d in dims {
                    let g = self.cell(d, *combo, alg).and_then(|c| c.gamma_pooled);
                    let _ = write!(out, "  {:>7}", format_gamma(g));
                }
                out.push('\n');
            }
        }
        out.push_str(&"-".repeat(rule));
        out.push('\n');
        let _ = write!(out, "{:<set_width$}  {:<9}", "Best Sensing Result", "");
        for d in dims {
            let g = self.best.iter().find(|b| b.dimension == *d).and_then(|b| b.gamma);
            let _ = write!(out, "  {:>7}", format_gamma(g));
        }
        out.push_str("\n\n");
        for b in &self.best {
            match (b.families, b.algorithm) {
                (Some(f), Some(a)) => {
                    let _ = writeln!(
                        out,
                        "{}: {} with {} (gamma {}, {:.1} features)",
                        b.dimension.abbreviation(),
                        f,
                        a.display_name(),
                        format_gamma(b.gamma),
                        b.selected_features.unwrap_or(0.0)
                    );
                }
                _ => {
                    let _ = writeln!(out, "{}: undefined", b.dimension.abbreviation());
                }
            }
        }
        let _ = writeln!(
            out,
            "\n{} users, {}-fold CV, seed {}, window -{}d/+{}d",
            self.n_users,
            self.config.folds,
            self.config.seed,
            self.config.window.before / crate::features::SECONDS_PER_DAY,
            self.config.window.after / crate::features::SECONDS_PER_DAY
        );
        out
    }
}

pub fn format_gamma(g: Option<f64>) -> String {
    match g {
        Some(v) => format!("{v:.3}"),
        None => "undef".to_string(),
    }
}

fn algorithm_rank(a: Algorithm) -> usize {
    Algorithm::ALL.iter().position(|x| *x == a).unwrap_or(usize::MAX)
}

/// Best cell per dimension: highest γ, then fewer selected features, then
/// stepwise < lasso < mars < svr.
pub fn best_per_dimension(cells: &[EvalResult], dimensions: &[Dimension]) -> Vec<BestResult> {
    dimensions
        .iter()
        .map(|&d| {
            let best = cells
                .iter()
                .filter(|c| c.dimension == d && c.gamma_pooled.is_some())
                .min_by(|a, b| {
                    let (ga, gb) = (a.gamma_pooled.unwrap(), b.gamma_pooled.unwrap());
                    gb.total_cmp(&ga)
                        .then(a.mean_selected_features.total_cmp(&b.mean_selected_features))
                        .then(algorithm_rank(a.algorithm).cmp(&algorithm_rank(b.algorithm)))
                });
            BestResult {
                dimension: d,
                families: best.map(|c| c.families),
                algorithm: best.map(|c| c.algorithm),
                gamma: best.and_then(|c| c.gamma_pooled),
                selected_features: best.map(|c| c.mean_selected_features),
            }
        })
        .collect()
}

/// Runs the grid on a matrix that holds every family the combos need.
pub fn run_sweep_on_matrix(matrix: &FeatureMatrix, dataset: &Dataset, config: &SweepConfig) -> Result<SweepReport> {
    config.validate()?;
    let plan = make_folds(dataset.len(), config.folds, config.seed)?;
    let subsets: Vec<FeatureMatrix> = config.combos.iter().map(|c| matrix.select_families(*c)).collect();
    for (combo, sub) in config.combos.iter().zip(&subsets) {
        if sub.columns.is_empty() {
            return Err(Error::Config(format!(
                "feature set {combo} has no columns in the matrix"
            )));
        }
    }
    let labels: Vec<Vec<f64>> = config.dimensions.iter().map(|&d| dataset.labels(d)).collect();
    let tasks: Vec<(usize, usize, Algorithm)> = (0..config.dimensions.len())
        .flat_map(|d| (0..config.combos.len()).flat_map(move |c| config.algorithms.iter().map(move |&a| (d, c, a))))
        .collect();
    let cells = tasks
        .par_iter()
        .map(|&(d, c, a)| {
            cross_validate_matrix(
                &subsets[c],
                &labels[d],
                config.dimensions[d],
                config.combos[c],
                a,
                &config.hyperparameters,
                &plan,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let best = best_per_dimension(&cells, &config.dimensions);
    Ok(SweepReport {
        schema_version: REPORT_SCHEMA_VERSION,
        n_users: dataset.len(),
        config: config.clone(),
        cells,
        best,
    })
}

/// Extracts features once and evaluates every (dimension, combo, algorithm)
/// cell in parallel.
pub fn run_sweep(dataset: &Dataset, config: &SweepConfig, lexicon: Option<&Lexicon>) -> Result<SweepReport> {
    config.validate()?;
    let matrix = build_matrix(dataset, config.families(), &config.window, lexicon)?;
    run_sweep_on_matrix(&matrix, dataset, config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(d: Dimension, f: FeatureSet, a: Algorithm, g: Option<f64>, sel: f64) -> EvalResult {
        EvalResult {
            dimension: d,
            families: f,
            algorithm: a,
            gamma_pooled: g,
            gamma_per_fold: vec![],
            mean_selected_features: sel,
            converged: true,
            predictions: vec![],
        }
    }

    #[test]
    fn best_prefers_sparser_then_algorithm_order() {
        let d = Dimension::ALL[0];
        let cells = vec![
            cell(d, FeatureSet::ALL, Algorithm::Svr, Some(0.5), 3.0),
            cell(d, FeatureSet::ALL, Algorithm::Mars, Some(0.5), 3.0),
            cell(d, FeatureSet::D, Algorithm::Lasso, Some(0.5), 5.0),
            cell(d, FeatureSet::B, Algorithm::Stepwise, None, 0.0),
        ];
        let best = best_per_dimension(&cells, &[d]);
        assert_eq!(best[0].algorithm, Some(Algorithm::Mars));
        assert_eq!(best[0].families, Some(FeatureSet::ALL));

        let only_undefined = best_per_dimension(&cells[3..], &[d]);
        assert_eq!(only_undefined[0].gamma, None);
        assert_eq!(only_undefined[0].algorithm, None);
    }
}
