use std::ops::Index;
use std::path::Path;

use crate::covariates::{load_covariates, load_covariates_by_id, AttrSchema, ColumnData, ColumnKind, CovariateTable};
use crate::error::{Error, Result};
use crate::graph::NodeIdMap;

/// How missing (`NA`) outcome cells are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingPolicy {
    /// Keep the node with outcome 0 and exclude it from sampling.
    #[default]
    FixZero,
    Reject,
}

/// Binary outcome vector with an optional mask of nodes the sampler may
/// not change.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeVector {
    values: Vec<u8>,
    fixed: Option<Vec<bool>>,
}

impl OutcomeVector {
    /// # Panics
    /// If a value is not 0 or 1.
    pub fn new(values: Vec<u8>) -> Self {
        assert!(values.iter().all(|&v| v <= 1), "outcome values must be 0 or 1");
        OutcomeVector { values, fixed: None }
    }

    pub fn zeros(n: usize) -> Self {
        OutcomeVector::new(vec![0; n])
    }

    pub fn with_fixed(mut self, fixed: Vec<bool>) -> Result<Self> {
        if fixed.len() != self.values.len() {
            return Err(Error::Outcome(format!(
                "fixed mask has {} entries for {} nodes",
                fixed.len(),
                self.values.len()
            )));
        }
        self.fixed = fixed.iter().any(|&f| f).then_some(fixed);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.values
    }

    pub fn is_fixed(&self, i: usize) -> bool {
        self.fixed.as_ref().is_some_and(|f| f[i])
    }

    pub fn fixed_mask(&self) -> Option<&[bool]> {
        self.fixed.as_deref()
    }

    pub fn free_nodes(&self) -> Vec<u32> {
        (0..self.values.len())
            .filter(|&i| !self.is_fixed(i))
            .map(|i| i as u32)
            .collect()
    }

    pub fn ones(&self) -> usize {
        self.values.iter().map(|&v| v as usize).sum()
    }

    pub fn density(&self) -> f64 {
        self.ones() as f64 / self.values.len() as f64
    }

    /// Sets node `i`. Fixed nodes can still be set explicitly; only the
    /// sampler respects the mask.
    pub fn set(&mut self, i: usize, value: u8) {
        debug_assert!(value <= 1);
        self.values[i] = value;
    }

    /// Copy of this vector's fixed mask applied to other values.
    pub fn with_values(&self, values: Vec<u8>) -> Self {
        assert_eq!(values.len(), self.values.len());
        OutcomeVector {
            values,
            fixed: self.fixed.clone(),
        }
    }

    /// Builds the outcome from a binary column of a covariate table.
    pub fn from_column(table: &CovariateTable, name: &str, policy: MissingPolicy) -> Result<Self> {
        let col = table
            .column(name)
            .ok_or_else(|| Error::Outcome(format!("no column named `{name}`")))?;
        let ColumnData::Binary(values) = &col.data else {
            return Err(Error::Outcome(format!(
                "outcome column `{name}` must be declared binary, not {:?}",
                col.data.kind()
            )));
        };
        if col.has_missing() {
            if policy == MissingPolicy::Reject {
                return Err(Error::Outcome(format!("outcome column `{name}` has missing values")));
            }
            let values = values
                .iter()
                .enumerate()
                .map(|(i, &v)| if col.is_missing(i) { 0 } else { v })
                .collect();
            return OutcomeVector::new(values).with_fixed(col.missing.clone());
        }
        Ok(OutcomeVector::new(values.clone()))
    }
}

impl Index<usize> for OutcomeVector {
    type Output = u8;

    #[inline]
    fn index(&self, i: usize) -> &u8 {
        &self.values[i]
    }
}

/// Loads an outcome column from a delimited attribute file (the column is
/// implicitly declared binary).
pub fn load_outcome(path: impl AsRef<Path>, column: &str, n: usize, policy: MissingPolicy) -> Result<OutcomeVector> {
    let schema = AttrSchema(vec![(column.to_owned(), ColumnKind::Binary)]);
    let table = load_covariates(path, n, Some(&schema))?;
    OutcomeVector::from_column(&table, column, policy)
}

/// Like [`load_outcome`], matching rows to graph nodes through an `id`
/// column when the file has one.
pub fn load_outcome_by_id(
    path: impl AsRef<Path>,
    column: &str,
    ids: &NodeIdMap,
    policy: MissingPolicy,
) -> Result<OutcomeVector> {
    let schema = AttrSchema(vec![(column.to_owned(), ColumnKind::Binary)]);
    let table = load_covariates_by_id(path, ids, Some(&schema))?;
    OutcomeVector::from_column(&table, column, policy)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_policy() {
        let mut t = CovariateTable::empty(3);
        t.push(crate::covariates::Column {
            name: "male".into(),
            data: ColumnData::Binary(vec![1, 0, 0]),
            missing: vec![false, true, false],
        })
        .unwrap();
        let y = OutcomeVector::from_column(&t, "male", MissingPolicy::FixZero).unwrap();
        assert_eq!(y.as_slice(), &[1, 0, 0]);
        assert!(y.is_fixed(1));
        assert_eq!(y.free_nodes(), vec![0, 2]);
        assert!(OutcomeVector::from_column(&t, "male", MissingPolicy::Reject).is_err());
    }

    #[test]
    fn all_false_mask_is_dropped() {
        let y = OutcomeVector::zeros(2).with_fixed(vec![false, false]).unwrap();
        assert!(y.fixed_mask().is_none());
        assert!(OutcomeVector::zeros(2).with_fixed(vec![true]).is_err());
    }
}
