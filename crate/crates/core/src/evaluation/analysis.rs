use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::stats::{pearson, student_t_test, TTest};
use super::sweep::format_gamma;
use crate::data_model::{Dataset, Dimension, Gender, LivingPlace, PerDimension};
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

/// Pearson r of every feature against every dimension (`None` = undefined).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTable {
    pub features: Vec<String>,
    pub dimensions: Vec<Dimension>,
    /// `values[feature][dimension]`
    pub values: Vec<Vec<Option<f64>>>,
}

impl CorrelationTable {
    pub fn get(&self, feature: &str, dimension: Dimension) -> Option<f64> {
        let i = self.features.iter().position(|f| f == feature)?;
        let j = self.dimensions.iter().position(|d| *d == dimension)?;
        self.values[i][j]
    }
}

pub fn feature_correlations(matrix: &FeatureMatrix, dataset: &Dataset) -> Result<CorrelationTable> {
    let ids: Vec<&str> = dataset.records().iter().map(|r| r.profile.user_id.as_str()).collect();
    if matrix.user_ids.len() != ids.len() || matrix.user_ids.iter().zip(&ids).any(|(a, b)| a != b) {
        return Err(Error::Dimension(
            "feature matrix rows are not aligned with the dataset".into(),
        ));
    }
    let labels: Vec<Vec<f64>> = Dimension::ALL.iter().map(|&d| dataset.labels(d)).collect();
    let values = (0..matrix.values.cols())
        .map(|j| {
            let col = matrix.values.column(j);
            labels.iter().map(|y| pearson(&col, y)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CorrelationTable {
        features: matrix.column_names(),
        dimensions: Dimension::ALL.to_vec(),
        values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grouping {
    /// Male (group a) vs female (group b).
    Gender,
    /// First-tier city (group a) vs everyone else (group b).
    FirstTierVsRest,
}

impl FromStr for Grouping {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "gender" => Ok(Grouping::Gender),
            "first_tier_vs_rest" | "city_tier" => Ok(Grouping::FirstTierVsRest),
            other => Err(Error::Config(format!("unknown grouping {other:?}"))),
        }
    }
}

pub fn group_ttest(dataset: &Dataset, grouping: Grouping, dimension: Dimension) -> Result<TTest> {
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for r in dataset.records() {
        let in_a = match grouping {
            Grouping::Gender => r.profile.gender == Gender::Male,
            Grouping::FirstTierVsRest => r.profile.living_place == LivingPlace::FirstTier,
        };
        let v = r.labels[dimension] as f64;
        if in_a {
            a.push(v);
        } else {
            b.push(v);
        }
    }
    student_t_test(&a, &b)
}

pub fn age_correlations(dataset: &Dataset) -> Result<PerDimension<Option<f64>>> {
    let ages: Vec<f64> = dataset.records().iter().map(|r| r.profile.age as f64).collect();
    let mut out = PerDimension::from_fn(|_| None);
    for d in Dimension::ALL {
        out[d] = pearson(&ages, &dataset.labels(d))?;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub n_users: usize,
    pub correlations: CorrelationTable,
    pub gender_tests: PerDimension<TTest>,
    pub first_tier_tests: PerDimension<TTest>,
    pub age_correlations: PerDimension<Option<f64>>,
}

pub fn analyze(dataset: &Dataset, matrix: &FeatureMatrix) -> Result<AnalysisReport> {
    let tests = |g: Grouping| -> Result<PerDimension<TTest>> {
        let v = Dimension::ALL
            .iter()
            .map(|&d| group_ttest(dataset, g, d))
            .collect::<Result<Vec<_>>>()?;
        let mut it = v.into_iter();
        Ok(PerDimension::from_fn(|_| it.next().expect("one test per dimension")))
    };
    Ok(AnalysisReport {
        n_users: dataset.len(),
        correlations: feature_correlations(matrix, dataset)?,
        gender_tests: tests(Grouping::Gender)?,
        first_tier_tests: tests(Grouping::FirstTierVsRest)?,
        age_correlations: age_correlations(dataset)?,
    })
}

impl AnalysisReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{:<28}", "Feature");
        for d in Dimension::ALL {
            let _ = write!(out, "  {:>7}", d.abbreviation());
        }
        out.push('\n');
        for (f, row) in self.correlations.features.iter().zip(&self.correlations.values) {
            let _ = write!(out, "{f:<28}");
            for v in row {
                let _ = write!(out, "  {:>7}", format_gamma(*v));
            }
            out.push('\n');
        }
        for (title, tests) in [
            ("Gender t-test (male - female)", &self.gender_tests),
            ("City tier t-test (first tier - rest)", &self.first_tier_tests),
        ] {
            let _ = writeln!(out, "\n{title}");
            for (d, t) in tests.iter() {
                let _ = writeln!(
                    out,
                    "  {:<5} t = {:>8.3}  p = {:.3e}  means {:.2} / {:.2}{}",
                    d.abbreviation(),
                    t.t,
                    t.p,
                    t.mean_a,
                    t.mean_b,
                    if t.p < 0.005 { "  *" } else { "" }
                );
            }
        }
        let _ = writeln!(out, "\nAge correlation");
        for (d, r) in self.age_correlations.iter() {
            let _ = writeln!(out, "  {:<5} {}", d.abbreviation(), format_gamma(*r));
        }
        out
    }
}
