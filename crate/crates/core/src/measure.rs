//! Per-community measures as interchangeable strategies.
//!
//! Every conference indicator is a weighted blend of one [`CommunityMeasure`]
//! evaluated on each community. Measures are looked up by name in a
//! [`MeasureRegistry`], e.g. `shannon`, `pielou` (observed richness),
//! `pielou:3` (fixed richness) or `simpson`.

use std::collections::BTreeMap;
use std::fmt;

use crate::distribution::CategoryDistribution;
use crate::error::{AggregateError, IndexError};
use crate::indices::{pielou_index, shannon_index, simpson_index};

/// A scalar diversity measure of one community.
pub trait CommunityMeasure: Send + Sync + fmt::Debug {
    /// Registry name, including parameters (`pielou:2`).
    fn name(&self) -> String;

    fn evaluate(&self, dist: &CategoryDistribution) -> Result<f64, IndexError>;

    /// Whether values are confined to `[0, 1]`.
    fn is_unit_bounded(&self) -> bool;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Shannon;

impl CommunityMeasure for Shannon {
    fn name(&self) -> String {
        "shannon".into()
    }

    fn evaluate(&self, dist: &CategoryDistribution) -> Result<f64, IndexError> {
        shannon_index(dist)
    }

    fn is_unit_bounded(&self) -> bool {
        false
    }
}

/// Which richness goes into the Pielou denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Richness {
    /// A schema richness fixed in advance.
    Fixed(usize),
    /// The number of categories actually present in the community.
    Observed,
}

#[derive(Debug, Clone, Copy)]
pub struct Pielou {
    pub richness: Richness,
}

impl Pielou {
    pub fn fixed(s: usize) -> Self {
        Self { richness: Richness::Fixed(s) }
    }

    pub fn observed() -> Self {
        Self { richness: Richness::Observed }
    }
}

impl CommunityMeasure for Pielou {
    fn name(&self) -> String {
        match self.richness {
            Richness::Fixed(s) => format!("pielou:{s}"),
            Richness::Observed => "pielou".into(),
        }
    }

    fn evaluate(&self, dist: &CategoryDistribution) -> Result<f64, IndexError> {
        let s = match self.richness {
            Richness::Fixed(s) => s,
            Richness::Observed => dist.observed_richness().max(1),
        };
        pielou_index(dist, s)
    }

    fn is_unit_bounded(&self) -> bool {
        true
    }
}

/// Simpson complement `1 - D`; needs integer counts.
#[derive(Debug, Clone, Copy, Default)]
pub struct SimpsonComplement;

impl CommunityMeasure for SimpsonComplement {
    fn name(&self) -> String {
        "simpson".into()
    }

    fn evaluate(&self, dist: &CategoryDistribution) -> Result<f64, IndexError> {
        simpson_index(dist).map(|s| s.complement)
    }

    fn is_unit_bounded(&self) -> bool {
        true
    }
}

type Factory = fn(Option<&str>) -> Result<Box<dyn CommunityMeasure>, String>;

struct Entry {
    description: &'static str,
    factory: Factory,
}

/// Name-indexed catalogue of community measures.
pub struct MeasureRegistry {
    entries: BTreeMap<&'static str, Entry>,
}

impl MeasureRegistry {
    pub fn empty() -> Self {
        Self { entries: BTreeMap::new() }
    }

    /// Registry with the bundled measures.
    pub fn standard() -> Self {
        let mut r = Self::empty();
        r.register("shannon", "Shannon index H' (natural log)", |arg| match arg {
            None => Ok(Box::new(Shannon)),
            Some(_) => Err("shannon takes no parameter".into()),
        });
        r.register(
            "pielou",
            "Pielou evenness J'; `pielou` uses observed richness, `pielou:<s>` a fixed one",
            |arg| match arg {
                None => Ok(Box::new(Pielou::observed())),
                Some(s) => match s.parse::<usize>() {
                    Ok(s) if s >= 1 => Ok(Box::new(Pielou::fixed(s))),
                    _ => Err(format!("invalid pielou richness `{s}`")),
                },
            },
        );
        r.register("simpson", "Simpson complement 1 - D (integer counts)", |arg| match arg {
            None => Ok(Box::new(SimpsonComplement)),
            Some(_) => Err("simpson takes no parameter".into()),
        });
        r
    }

    pub fn register(&mut self, name: &'static str, description: &'static str, factory: Factory) {
        self.entries.insert(name, Entry { description, factory });
    }

    /// Resolves `name` or `name:param`.
    pub fn resolve(&self, spec: &str) -> Result<Box<dyn CommunityMeasure>, AggregateError> {
        let (name, arg) = match spec.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (spec.trim(), None),
        };
        let entry = self
            .entries
            .get(name)
            .ok_or_else(|| AggregateError::UnknownMeasure(spec.to_string()))?;
        (entry.factory)(arg).map_err(|_| AggregateError::UnknownMeasure(spec.to_string()))
    }

    /// `(name, description)` pairs in name order.
    pub fn list(&self) -> Vec<(&'static str, &'static str)> {
        self.entries.iter().map(|(n, e)| (*n, e.description)).collect()
    }
}

impl Default for MeasureRegistry {
    fn default() -> Self {
        Self::standard()
    }
}
