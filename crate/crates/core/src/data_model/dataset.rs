use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::types::{DatasetMetadata, Dimension, LabelRange, PerDimension, UserRecord};
use crate::error::{Error, Result};

/// A validated corpus: metadata header plus user records.
///
/// Construction always goes through validation, so a `Dataset` value upholds
/// every record invariant, unique user ids and metadata counts that match the
/// records.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    metadata: DatasetMetadata,
    records: Vec<UserRecord>,
}

impl Dataset {
    /// Builds a dataset, deriving the metadata counts from the records.
    pub fn new(records: Vec<UserRecord>, label_ranges: PerDimension<LabelRange>) -> Result<Self> {
        let metadata = DatasetMetadata::describe(&records, label_ranges);
        Self::from_parts(metadata, records)
    }

    /// Builds a dataset from a stored header and records, checking that the
    /// header agrees with the records.
    pub fn from_parts(metadata: DatasetMetadata, records: Vec<UserRecord>) -> Result<Self> {
        if metadata.schema_version != DatasetMetadata::SCHEMA_VERSION {
            return Err(Error::InvalidDataset(format!(
                "unsupported schema version {}",
                metadata.schema_version
            )));
        }
        for (d, r) in metadata.label_ranges.iter() {
            if r.min > r.max {
                return Err(Error::InvalidDataset(format!(
                    "label range for {d} has min {} > max {}",
                    r.min, r.max
                )));
            }
        }
        let mut seen = HashSet::with_capacity(records.len());
        for r in &records {
            r.validate(&metadata.label_ranges)
                .map_err(|rule| Error::InvalidRecord {
                    record: r.profile.user_id.clone(),
                    rule,
                })?;
            if !seen.insert(r.profile.user_id.as_str()) {
                return Err(Error::DuplicateUser(r.profile.user_id.clone()));
            }
        }
        let recomputed = DatasetMetadata::describe(&records, metadata.label_ranges);
        if recomputed != metadata {
            return Err(Error::InvalidDataset(format!(
                "metadata disagrees with records: header says {} records ({:?}, {:?}), body has {} ({:?}, {:?})",
                metadata.record_count,
                metadata.gender_counts,
                metadata.living_place_counts,
                recomputed.record_count,
                recomputed.gender_counts,
                recomputed.living_place_counts,
            )));
        }
        Ok(Self { metadata, records })
    }

    pub fn metadata(&self) -> &DatasetMetadata {
        &self.metadata
    }

    pub fn records(&self) -> &[UserRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn label_ranges(&self) -> &PerDimension<LabelRange> {
        &self.metadata.label_ranges
    }

    /// Scores of one dimension in record order.
    pub fn labels(&self, dimension: Dimension) -> Vec<f64> {
        self.records.iter().map(|r| r.labels[dimension] as f64).collect()
    }

    /// Keeps users with strictly more than `threshold` statuses.
    pub fn filter_active(&self, threshold: u64) -> Dataset {
        let records: Vec<UserRecord> = self
            .records
            .iter()
            .filter(|r| r.profile.statuses_count > threshold)
            .cloned()
            .collect();
        let metadata = DatasetMetadata::describe(&records, self.metadata.label_ranges);
        Dataset { metadata, records }
    }

    /// Copy of the dataset with one dimension's scores replaced. Used by
    /// permutation baselines; the new scores must respect the label range.
    pub fn with_labels(&self, dimension: Dimension, scores: &[i32]) -> Result<Dataset> {
        if scores.len() != self.records.len() {
            return Err(Error::Dimension(format!(
                "{} scores for {} records",
                scores.len(),
                self.records.len()
            )));
        }
        let records = self
            .records
            .iter()
            .zip(scores)
            .map(|(r, &s)| {
                let mut r = r.clone();
                r.labels[dimension] = s;
                r
            })
            .collect();
        Dataset::from_parts(self.metadata.clone(), records)
    }
}

/// Reads a dataset file: one JSON metadata line followed by one JSON record
/// per line. Blank lines are ignored.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut metadata: Option<DatasetMetadata> = None;
    let mut records = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        match metadata {
            None => {
                metadata = Some(
                    serde_json::from_str(&line).map_err(|e| parse_err(line_no, format!("bad metadata header: {e}")))?,
                );
            }
            Some(_) => {
                let record: UserRecord =
                    serde_json::from_str(&line).map_err(|e| parse_err(line_no, format!("bad record: {e}")))?;
                records.push(record);
            }
        }
    }
    let metadata = metadata.ok_or_else(|| parse_err(0, "missing metadata header".into()))?;
    Dataset::from_parts(metadata, records)
}

/// Writes `dataset` in the line-delimited format read by [`load_dataset`].
pub fn write_dataset(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    serde_json::to_writer(&mut out, &dataset.metadata)?;
    out.write_all(b"\n").map_err(io)?;
    for r in &dataset.records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n").map_err(io)?;
    }
    out.flush().map_err(io)
}
