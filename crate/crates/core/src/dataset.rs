//! Class-partitioned feature collections.

use crate::error::{Error, Result};
use crate::preshape::{project, PreShapeVector, RawFeature};
use std::collections::BTreeMap;

/// Raw features grouped by class label. BTreeMap keeps label iteration
/// deterministic.
#[derive(Debug, Clone, Default)]
pub struct RawSet {
    pub classes: BTreeMap<String, Vec<RawFeature>>,
}

impl RawSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, label: impl Into<String>, feature: RawFeature) {
        self.classes.entry(label.into()).or_default().push(feature);
    }

    pub fn labels(&self) -> Vec<String> {
        self.classes.keys().cloned().collect()
    }

    pub fn total(&self) -> usize {
        self.classes.values().map(|v| v.len()).sum()
    }

    /// Feature dimension, if any sample exists.
    pub fn dim(&self) -> Option<usize> {
        self.classes.values().flatten().next().map(|f| f.dim())
    }

    pub fn validate_nonempty(&self) -> Result<()> {
        if self.classes.is_empty() {
            return Err(Error::EmptyInput);
        }
        for (label, members) in &self.classes {
            if members.is_empty() {
                return Err(Error::EmptyClass {
                    label: label.clone(),
                });
            }
        }
        Ok(())
    }
}

/// One pre-shape member with its provenance flag.
#[derive(Debug, Clone)]
pub struct PreShapeMember {
    pub vector: PreShapeVector,
    pub augmented: bool,
}

/// Pre-shape vectors grouped by class label.
#[derive(Debug, Clone, Default)]
pub struct PreShapeSet {
    pub classes: BTreeMap<String, Vec<PreShapeMember>>,
}

impl PreShapeSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, label: impl Into<String>, vector: PreShapeVector, augmented: bool) {
        self.classes
            .entry(label.into())
            .or_default()
            .push(PreShapeMember { vector, augmented });
    }

    pub fn labels(&self) -> Vec<String> {
        self.classes.keys().cloned().collect()
    }

    pub fn total(&self) -> usize {
        self.classes.values().map(|v| v.len()).sum()
    }

    /// Originals and augmented members of `other` appended class-wise.
    pub fn merged(mut self, other: PreShapeSet) -> PreShapeSet {
        for (label, members) in other.classes {
            self.classes.entry(label).or_default().extend(members);
        }
        self
    }
}

/// Projects every member of a raw set onto the pre-shape sphere.
pub fn project_set(raw: &RawSet) -> Result<PreShapeSet> {
    let mut out = PreShapeSet::new();
    for (label, members) in &raw.classes {
        for feature in members {
            out.push(label.clone(), project(feature)?, false);
        }
    }
    Ok(out)
}
