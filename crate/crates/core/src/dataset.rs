//! Dataset containers shared across the pipeline stages.

use alloc::string::String;
use alloc::vec::Vec;

use crate::bitset::RowSet;
use crate::error::{Error, Result};

/// NSL-KDD attack families plus the normal class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum AttackCategory {
    /// Benign traffic.
    Normal,
    /// Denial of service.
    Dos,
    /// Reconnaissance / scanning.
    Probe,
    /// Remote-to-local.
    R2l,
    /// User-to-root.
    U2r,
}

impl AttackCategory {
    /// Canonical display name.
    pub fn name(self) -> &'static str {
        match self {
            AttackCategory::Normal => "normal",
            AttackCategory::Dos => "DoS",
            AttackCategory::Probe => "Probe",
            AttackCategory::R2l => "R2L",
            AttackCategory::U2r => "U2R",
        }
    }
}

/// Record filter restricting analysis to one attack family plus normals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttackFilter {
    /// Keep every record; the target is any-attack vs normal.
    All,
    /// Keep normal records plus the given family; target is that family.
    Category(AttackCategory),
}

impl AttackFilter {
    /// Parse the canonical mode names (case-insensitive).
    pub fn parse(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        Ok(match lower.as_str() {
            "all" => AttackFilter::All,
            "dos" => AttackFilter::Category(AttackCategory::Dos),
            "probe" => AttackFilter::Category(AttackCategory::Probe),
            "r2l" => AttackFilter::Category(AttackCategory::R2l),
            "u2r" => AttackFilter::Category(AttackCategory::U2r),
            _ => {
                return Err(Error::InvalidConfig(alloc::format!(
                    "unknown attack filter '{s}' (expected all/DoS/Probe/R2L/U2R)"
                )))
            }
        })
    }

    /// Canonical display name.
    pub fn name(self) -> &'static str {
        match self {
            AttackFilter::All => "all",
            AttackFilter::Category(c) => c.name(),
        }
    }
}

/// Numeric dataset after categorical encoding: column-major values, binary
/// attack labels, and per-record attack family tags.
#[derive(Debug, Clone)]
pub struct EncodedDataset {
    /// Column-major feature values.
    pub columns: Vec<Vec<f64>>,
    /// One name per column, `<feature>` or `<feature>_<category>`.
    pub column_names: Vec<String>,
    /// Binary target: true iff the record is any attack.
    pub labels: Vec<bool>,
    /// Attack family per record.
    pub categories: Vec<AttackCategory>,
}

impl EncodedDataset {
    /// Validate internal shape invariants.
    pub fn validate(&self) -> Result<()> {
        let n = self.labels.len();
        if self.categories.len() != n {
            return Err(Error::ColumnMismatch(String::from(
                "categories length differs from labels",
            )));
        }
        if self.columns.len() != self.column_names.len() {
            return Err(Error::ColumnMismatch(String::from(
                "column count differs from column-name count",
            )));
        }
        for (c, name) in self.columns.iter().zip(&self.column_names) {
            if c.len() != n {
                return Err(Error::ColumnMismatch(alloc::format!(
                    "column '{name}' has {} rows, expected {n}",
                    c.len()
                )));
            }
        }
        Ok(())
    }

    /// Record count.
    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    /// Column count.
    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    /// Apply an attack filter: `All` is the identity; a category filter keeps
    /// normal records plus that family and recomputes the binary target.
    ///
    /// Errors when the filtered data has no attack records left, since the
    /// WRAcc baseline would be undefined.
    pub fn filter_attacks(&self, filter: AttackFilter) -> Result<EncodedDataset> {
        let cat = match filter {
            AttackFilter::All => return Ok(self.clone()),
            AttackFilter::Category(c) => c,
        };
        let keep: Vec<usize> = self
            .categories
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == AttackCategory::Normal || c == cat)
            .map(|(i, _)| i)
            .collect();
        let columns = self
            .columns
            .iter()
            .map(|col| keep.iter().map(|&i| col[i]).collect())
            .collect();
        let labels: Vec<bool> = keep.iter().map(|&i| self.categories[i] == cat).collect();
        if !labels.iter().any(|&l| l) {
            return Err(Error::NoAttacksAfterFilter);
        }
        Ok(EncodedDataset {
            columns,
            column_names: self.column_names.clone(),
            labels,
            categories: keep.iter().map(|&i| self.categories[i]).collect(),
        })
    }
}

/// Binarized feature matrix with a binary target.
///
/// Columns are stored as packed row sets; bit semantics follow the fitted
/// binarization (1 = "more attack-like" when alignment is enabled).
#[derive(Debug, Clone)]
pub struct BinaryDataset {
    columns: Vec<RowSet>,
    names: Vec<String>,
    y: RowSet,
    n_rows: usize,
    p0: f64,
}

impl BinaryDataset {
    /// Assemble and validate: equal column lengths and a two-class target.
    pub fn new(columns: Vec<RowSet>, names: Vec<String>, y: RowSet) -> Result<Self> {
        let n_rows = y.len();
        if n_rows == 0 {
            return Err(Error::EmptyDataset);
        }
        if columns.len() != names.len() {
            return Err(Error::ColumnMismatch(String::from(
                "column count differs from name count",
            )));
        }
        for (c, name) in columns.iter().zip(&names) {
            if c.len() != n_rows {
                return Err(Error::ColumnMismatch(alloc::format!(
                    "column '{name}' length {} differs from target length {n_rows}",
                    c.len()
                )));
            }
        }
        let p0 = y.count_ones() as f64 / n_rows as f64;
        if !(p0 > 0.0 && p0 < 1.0) {
            return Err(Error::DegenerateLabels { p0 });
        }
        Ok(BinaryDataset {
            columns,
            names,
            y,
            n_rows,
            p0,
        })
    }

    /// Build from row-major bools; convenient for tests and small data.
    pub fn from_rows(rows: &[Vec<bool>], names: Vec<String>, labels: &[bool]) -> Result<Self> {
        let n_cols = names.len();
        let mut columns = alloc::vec![RowSet::new(rows.len()); n_cols];
        for (i, row) in rows.iter().enumerate() {
            for (j, &b) in row.iter().enumerate() {
                if b {
                    columns[j].set(i);
                }
            }
        }
        Self::new(columns, names, RowSet::from_bools(labels))
    }

    /// Record count.
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    /// Feature count.
    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    /// Baseline positive (attack) rate.
    pub fn baseline_rate(&self) -> f64 {
        self.p0
    }

    /// Per-feature membership sets.
    pub fn columns(&self) -> &[RowSet] {
        &self.columns
    }

    /// Feature names, index-aligned with `columns`.
    pub fn feature_names(&self) -> &[String] {
        &self.names
    }

    /// Positive-label row set.
    pub fn positives(&self) -> &RowSet {
        &self.y
    }

    /// Dataset restricted to the given feature indices, in the given order.
    pub fn restrict(&self, indices: &[usize]) -> BinaryDataset {
        BinaryDataset {
            columns: indices.iter().map(|&i| self.columns[i].clone()).collect(),
            names: indices.iter().map(|&i| self.names[i].clone()).collect(),
            y: self.y.clone(),
            n_rows: self.n_rows,
            p0: self.p0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn tiny_encoded() -> EncodedDataset {
        // 6 records: 2 normal, 2 probe, 1 r2l, 1 dos.
        use AttackCategory::*;
        EncodedDataset {
            columns: alloc::vec![alloc::vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]],
            column_names: alloc::vec!["f".to_string()],
            labels: alloc::vec![false, false, true, true, true, true],
            categories: alloc::vec![Normal, Normal, Probe, Probe, R2l, Dos],
        }
    }

    #[test]
    fn filter_all_is_identity() {
        let ds = tiny_encoded();
        let out = ds.filter_attacks(AttackFilter::All).unwrap();
        assert_eq!(out.n_rows(), ds.n_rows());
        assert_eq!(out.labels, ds.labels);
    }

    #[test]
    fn filter_category_keeps_normal_plus_family() {
        let ds = tiny_encoded();
        let out = ds
            .filter_attacks(AttackFilter::Category(AttackCategory::Probe))
            .unwrap();
        assert_eq!(out.n_rows(), 4);
        assert_eq!(out.labels, alloc::vec![false, false, true, true]);
        assert_eq!(out.columns[0], alloc::vec![1.0, 2.0, 3.0, 4.0]);
        // Positive rate equals |Probe| / (|Probe| + |normal|).
        let rate = out.labels.iter().filter(|&&l| l).count() as f64 / out.n_rows() as f64;
        assert_eq!(rate, 2.0 / 4.0);
    }

    #[test]
    fn filter_with_no_attacks_errors() {
        let mut ds = tiny_encoded();
        ds.categories = alloc::vec![AttackCategory::Normal; 6];
        ds.labels = alloc::vec![false; 6];
        let err = ds
            .filter_attacks(AttackFilter::Category(AttackCategory::U2r))
            .unwrap_err();
        assert_eq!(err, Error::NoAttacksAfterFilter);
    }

    #[test]
    fn binary_dataset_rejects_single_class() {
        let rows = alloc::vec![alloc::vec![true], alloc::vec![false]];
        let err =
            BinaryDataset::from_rows(&rows, alloc::vec!["a".to_string()], &[true, true]).unwrap_err();
        assert!(matches!(err, Error::DegenerateLabels { .. }));
    }

    #[test]
    fn attack_filter_parsing() {
        assert_eq!(AttackFilter::parse("R2L").unwrap().name(), "R2L");
        assert_eq!(AttackFilter::parse("all").unwrap(), AttackFilter::All);
        assert!(AttackFilter::parse("bogus").is_err());
    }
}
