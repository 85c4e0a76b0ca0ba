//! Categorized populations: the input to every diversity index.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::IndexError;

/// How the values of a [`CategoryDistribution`] were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Individuals were counted; the total `N` is known.
    Counts,
    /// Only shares were available (e.g. published percentages); `N` is unknown.
    Proportions,
}

/// Counts (or shares) per category within one community.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryDistribution {
    categories: Vec<String>,
    values: Vec<f64>,
    provenance: Provenance,
    renormalized: bool,
}

impl CategoryDistribution {
    /// Builds a distribution from non-negative, possibly fractional counts.
    pub fn new<S: Into<String>>(
        categories: impl IntoIterator<Item = S>,
        counts: impl IntoIterator<Item = f64>,
    ) -> Result<Self, IndexError> {
        let categories: Vec<String> = categories.into_iter().map(Into::into).collect();
        let values: Vec<f64> = counts.into_iter().collect();
        validate(&categories, &values)?;
        Ok(Self {
            categories,
            values,
            provenance: Provenance::Counts,
            renormalized: false,
        })
    }

    /// Builds a distribution from integer tallies.
    pub fn from_counts<S: Into<String>>(
        pairs: impl IntoIterator<Item = (S, u64)>,
    ) -> Result<Self, IndexError> {
        let (categories, values): (Vec<String>, Vec<f64>) = pairs
            .into_iter()
            .map(|(label, n)| (label.into(), n as f64))
            .unzip();
        Self::new(categories, values)
    }

    /// Builds a distribution from published percentages.
    ///
    /// Rows that do not sum to 100 are rescaled to sum to one and flagged via
    /// [`CategoryDistribution::was_renormalized`]. The resulting distribution has
    /// no known total, so count-based indices (Simpson) reject it.
    pub fn from_percentages<S: Into<String>>(
        pairs: impl IntoIterator<Item = (S, f64)>,
    ) -> Result<Self, IndexError> {
        let (categories, raw): (Vec<String>, Vec<f64>) =
            pairs.into_iter().map(|(l, v)| (l.into(), v)).unzip();
        validate(&categories, &raw)?;
        let sum: f64 = raw.iter().sum();
        if sum <= 0.0 {
            return Err(IndexError::EmptyCommunity);
        }
        let values = raw.iter().map(|v| v / sum).collect();
        Ok(Self {
            categories,
            values,
            provenance: Provenance::Proportions,
            renormalized: (sum - 100.0).abs() > 1e-9,
        })
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    /// Raw values: counts for [`Provenance::Counts`], shares otherwise.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn was_renormalized(&self) -> bool {
        self.renormalized
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass() <= 0.0
    }

    /// Total number of individuals `N`, when known.
    pub fn total(&self) -> Option<f64> {
        match self.provenance {
            Provenance::Counts => Some(self.mass()),
            Provenance::Proportions => None,
        }
    }

    fn mass(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Proportions `p_i = n_i / N`, aligned with [`categories`](Self::categories).
    pub fn proportions(&self) -> Result<Vec<f64>, IndexError> {
        let mass = self.mass();
        if mass <= 0.0 {
            return Err(IndexError::EmptyCommunity);
        }
        Ok(self.values.iter().map(|v| v / mass).collect())
    }

    /// Number of categories with a strictly positive count.
    pub fn observed_richness(&self) -> usize {
        self.values.iter().filter(|&&v| v > 0.0).count()
    }

    /// Count for one category label, zero if absent.
    pub fn count_of(&self, category: &str) -> f64 {
        self.categories
            .iter()
            .position(|c| c == category)
            .map_or(0.0, |i| self.values[i])
    }

    /// Share of one category label, zero if absent or empty.
    pub fn share_of(&self, category: &str) -> f64 {
        let mass = self.mass();
        if mass <= 0.0 {
            0.0
        } else {
            self.count_of(category) / mass
        }
    }
}

fn validate(categories: &[String], values: &[f64]) -> Result<(), IndexError> {
    if categories.len() != values.len() {
        return Err(IndexError::LengthMismatch {
            categories: categories.len(),
            counts: values.len(),
        });
    }
    if let Some(&bad) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(IndexError::InvalidCount(bad));
    }
    let mut seen = HashSet::with_capacity(categories.len());
    for c in categories {
        if !seen.insert(c.as_str()) {
            return Err(IndexError::DuplicateCategory(c.clone()));
        }
    }
    Ok(())
}

/// Pairwise disparities between categories plus the Rao-Stirling exponents.
#[derive(Debug, Clone, PartialEq)]
pub struct DisparityMatrix {
    side: usize,
    d: Vec<f64>,
    alpha: f64,
    beta: f64,
}

impl DisparityMatrix {
    /// `rows` must be square with a zero diagonal and non-negative entries.
    pub fn new(rows: Vec<Vec<f64>>, alpha: f64, beta: f64) -> Result<Self, IndexError> {
        let side = rows.len();
        let mut d = Vec::with_capacity(side * side);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != side {
                return Err(IndexError::NotSquare { row: i, len: row.len(), side });
            }
            for (j, v) in row.into_iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    return Err(IndexError::InvalidDisparity { i, j, value: v });
                }
                if i == j && v != 0.0 {
                    return Err(IndexError::InvalidDisparity { i, j, value: v });
                }
                d.push(v);
            }
        }
        Ok(Self { side, d, alpha, beta })
    }

    /// Every distinct pair at disparity one.
    pub fn uniform(side: usize, alpha: f64, beta: f64) -> Self {
        let d = (0..side * side)
            .map(|k| if k / side == k % side { 0.0 } else { 1.0 })
            .collect();
        Self { side, d, alpha, beta }
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.side + j]
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}
