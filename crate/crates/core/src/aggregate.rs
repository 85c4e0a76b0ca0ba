//! Conference-level indicators: weighted blends of per-community measures.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::cohort::{
    breakdown, BreakdownOptions, CommunityBreakdown, ConferenceEdition, Dimension, Exclusions,
    PerRole, Role, UNKNOWN,
};
use crate::error::{AggregateError, IndexError};
use crate::geo::GeoTables;
use crate::measure::{CommunityMeasure, MeasureRegistry, Pielou, Shannon};

/// Default GeoDI normalizer: Shannon values rarely exceed 3.5.
pub const GEODI_NORM: f64 = 3.5;
/// Default gender richness for GDI (binary labels).
pub const GENDER_RICHNESS: usize = 2;
/// Fixed sector richness for BDI.
pub const SECTOR_RICHNESS: usize = 3;

/// Community weights `(w_k, w_a, w_o)`, non-negative and summing to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    pub keynote: f64,
    pub author: f64,
    pub organiser: f64,
}

impl WeightVector {
    pub fn new(keynote: f64, author: f64, organiser: f64) -> Result<Self, AggregateError> {
        let bad = || AggregateError::InvalidWeights { k: keynote, a: author, o: organiser };
        let all = [keynote, author, organiser];
        if all.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(bad());
        }
        if (all.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(bad());
        }
        Ok(Self { keynote, author, organiser })
    }

    pub fn equal() -> Self {
        Self {
            keynote: 1.0 / 3.0,
            author: 1.0 / 3.0,
            organiser: 1.0 / 3.0,
        }
    }

    pub fn get(&self, role: Role) -> f64 {
        match role {
            Role::Keynote => self.keynote,
            Role::Author => self.author,
            Role::Organiser => self.organiser,
        }
    }
}

impl Default for WeightVector {
    fn default() -> Self {
        Self::equal()
    }
}

/// A weighted indicator together with the per-community values it blends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weighted {
    pub value: f64,
    pub per_community: PerRole<f64>,
}

/// Evaluates `measure` on each community and blends with `weights`.
///
/// Every community must be non-empty, even one with zero weight.
pub fn weighted(
    breakdown: &CommunityBreakdown,
    weights: &WeightVector,
    measure: &dyn CommunityMeasure,
) -> Result<Weighted, AggregateError> {
    let per_community = PerRole::try_from_fn(|role| {
        measure
            .evaluate(breakdown.get(role))
            .map_err(|source| AggregateError::Community { role, source })
    })?;
    let value = Role::ALL
        .iter()
        .map(|&r| weights.get(r) * per_community.get(r))
        .sum();
    Ok(Weighted { value, per_community })
}

fn expect_dimension(b: &CommunityBreakdown, want: Dimension) -> Result<(), AggregateError> {
    if b.dimension == want {
        Ok(())
    } else {
        Err(AggregateError::WrongDimension {
            expected: want,
            found: b.dimension,
        })
    }
}

/// Gender Diversity Index: weighted Pielou evenness with a fixed gender richness.
pub fn gdi(
    breakdown: &CommunityBreakdown,
    weights: &WeightVector,
    s_reference: usize,
) -> Result<Weighted, AggregateError> {
    expect_dimension(breakdown, Dimension::Gender)?;
    weighted(breakdown, weights, &Pielou::fixed(s_reference))
}

/// Geographical Diversity Index: weighted Shannon index over countries. Unnormalized.
pub fn geodi(breakdown: &CommunityBreakdown, weights: &WeightVector) -> Result<Weighted, AggregateError> {
    expect_dimension(breakdown, Dimension::Country)?;
    weighted(breakdown, weights, &Shannon)
}

/// Continent-level evenness, each community normalized by its own observed richness.
pub fn geodi_continents(
    breakdown: &CommunityBreakdown,
    weights: &WeightVector,
) -> Result<Weighted, AggregateError> {
    expect_dimension(breakdown, Dimension::Continent)?;
    weighted(breakdown, weights, &Pielou::observed())
}

/// Business Diversity Index: weighted Pielou evenness over three sectors.
pub fn bdi(breakdown: &CommunityBreakdown, weights: &WeightVector) -> Result<Weighted, AggregateError> {
    expect_dimension(breakdown, Dimension::Sector)?;
    weighted(breakdown, weights, &Pielou::fixed(SECTOR_RICHNESS))
}

/// Conference Diversity Index with the default 3.5 normalizer.
pub fn cdi(gdi: f64, geodi: f64, bdi: f64) -> Result<f64, IndexError> {
    cdi_with_norm(gdi, geodi, bdi, GEODI_NORM)
}

/// `(gdi + min(geodi / norm, 1) + bdi) / 3`.
pub fn cdi_with_norm(gdi: f64, geodi: f64, bdi: f64, norm: f64) -> Result<f64, IndexError> {
    let unit = |name, v: f64| {
        if (0.0..=1.0).contains(&v) {
            Ok(())
        } else {
            Err(IndexError::OutOfRange { name, value: v })
        }
    };
    unit("gdi", gdi)?;
    unit("bdi", bdi)?;
    if !(geodi >= 0.0 && geodi.is_finite()) {
        return Err(IndexError::OutOfRange { name: "geodi", value: geodi });
    }
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(IndexError::OutOfRange { name: "geodi normalizer", value: norm });
    }
    Ok((gdi + (geodi / norm).min(1.0) + bdi) / 3.0)
}

/// Options for [`compute_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct ReportConfig {
    pub weights: WeightVector,
    pub geodi_norm: f64,
    pub gender_s: usize,
    pub breakdown: BreakdownOptions,
    /// Extra geography measures (registry names) reported beside GeoDI.
    pub extra_geo_measures: Vec<String>,
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self {
            weights: WeightVector::equal(),
            geodi_norm: GEODI_NORM,
            gender_s: GENDER_RICHNESS,
            breakdown: BreakdownOptions::default(),
            extra_geo_measures: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSettings {
    pub weights: WeightVector,
    pub geodi_norm: f64,
    pub gender_s_reference: usize,
    pub unknown_policy: crate::cohort::UnknownPolicy,
    pub duplicate_policy: crate::cohort::DuplicatePolicy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityValues {
    /// Pielou J' per community for gender.
    pub gender_pielou: PerRole<f64>,
    /// Shannon H' per community over countries.
    pub country_shannon: PerRole<f64>,
    /// Pielou J' per community over continents (observed richness).
    pub continent_pielou: PerRole<f64>,
    /// Pielou J' per community over sectors (richness 3).
    pub sector_pielou: PerRole<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdcReport {
    pub represented: bool,
    pub countries: PerRole<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub records: PerRole<usize>,
    pub excluded: BTreeMap<Dimension, PerRole<Exclusions>>,
    pub country_counts: PerRole<usize>,
    pub continent_counts: PerRole<usize>,
    pub ldc: LdcReport,
    pub notes: Vec<String>,
}

/// All indicators for one conference edition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub conference: String,
    pub year: i32,
    pub gdi: f64,
    /// Weighted Shannon form of GDI, reported when more than three gender labels occur.
    pub gdi_shannon: Option<f64>,
    pub geodi: f64,
    pub geodi_normalized: f64,
    pub geodi_continents: f64,
    pub bdi: f64,
    pub cdi: f64,
    pub communities: CommunityValues,
    /// Additional geography indicators keyed by measure name; never part of CDI.
    pub extra: BTreeMap<String, Weighted>,
    pub distributions: BTreeMap<Dimension, PerRole<BTreeMap<String, u64>>>,
    pub settings: ReportSettings,
    pub diagnostics: Diagnostics,
}

impl IndexReport {
    /// CDI recomputed from the stored sub-indices.
    pub fn recompute_cdi(&self) -> Result<f64, IndexError> {
        cdi_with_norm(self.gdi, self.geodi, self.bdi, self.settings.geodi_norm)
    }
}

fn tally(b: &CommunityBreakdown) -> PerRole<BTreeMap<String, u64>> {
    b.per_community.map(|_, d| {
        d.categories()
            .iter()
            .zip(d.values())
            .map(|(c, &v)| (c.clone(), v as u64))
            .collect()
    })
}

fn known_categories(b: &CommunityBreakdown) -> PerRole<usize> {
    b.per_community
        .map(|_, d| d.categories().iter().filter(|c| c.as_str() != UNKNOWN).count())
}

/// Computes every indicator for one edition.
///
/// Records should already carry continents (see [`crate::geo::enrich_geography`]).
pub fn compute_report(
    edition: &ConferenceEdition,
    config: &ReportConfig,
    tables: &GeoTables,
    registry: &MeasureRegistry,
) -> Result<IndexReport, AggregateError> {
    let w = &config.weights;
    let opts = config.breakdown;
    let gender = breakdown(edition, Dimension::Gender, opts);
    let country = breakdown(edition, Dimension::Country, opts);
    let continent = breakdown(edition, Dimension::Continent, opts);
    let sector = breakdown(edition, Dimension::Sector, opts);

    let mut notes = Vec::new();

    let observed_gender = Role::ALL
        .iter()
        .map(|&r| gender.get(r).observed_richness())
        .max()
        .unwrap_or(0);
    let gender_s = if observed_gender > config.gender_s {
        notes.push(format!(
            "gender richness raised from {} to observed {}",
            config.gender_s, observed_gender
        ));
        observed_gender
    } else {
        config.gender_s
    };
    let g = gdi(&gender, w, gender_s)?;

    let gender_labels: BTreeSet<&String> = Role::ALL
        .iter()
        .flat_map(|&r| gender.get(r).categories())
        .collect();
    let gdi_shannon = if gender_labels.len() > 3 {
        Some(weighted(&gender, w, &Shannon)?.value)
    } else {
        None
    };

    let geo = geodi(&country, w)?;
    let cont = geodi_continents(&continent, w)?;
    let biz = bdi(&sector, w)?;
    let cdi_value = cdi_with_norm(g.value, geo.value, biz.value, config.geodi_norm)?;

    let mut extra = BTreeMap::new();
    for name in &config.extra_geo_measures {
        let measure = registry.resolve(name)?;
        match weighted(&country, w, measure.as_ref()) {
            Ok(v) => {
                extra.insert(measure.name(), v);
            }
            Err(e) => notes.push(format!("{} over countries not reported: {e}", measure.name())),
        }
    }

    for (dim, b) in [
        (Dimension::Gender, &gender),
        (Dimension::Sector, &sector),
    ] {
        for (role, d) in b.per_community.iter() {
            if d.total().unwrap_or(0.0) < 2.0 {
                notes.push(format!("{dim} {role} community has fewer than two individuals"));
            }
        }
    }

    let ldc_countries = PerRole::from_fn(|role| {
        let set: BTreeSet<String> = edition
            .records()
            .iter()
            .filter(|r| r.role == role)
            .filter_map(|r| r.country.as_ref())
            .filter(|c| tables.is_ldc(c))
            .map(|c| c.as_str().to_string())
            .collect();
        set.into_iter().collect::<Vec<_>>()
    });
    let represented = ldc_countries.iter().any(|(_, v)| !v.is_empty());

    let excluded = [&gender, &country, &continent, &sector]
        .into_iter()
        .map(|b| (b.dimension, b.excluded))
        .collect();
    let distributions = [&gender, &country, &continent, &sector]
        .into_iter()
        .map(|b| (b.dimension, tally(b)))
        .collect();

    Ok(IndexReport {
        conference: edition.conference().to_string(),
        year: edition.year(),
        gdi: g.value,
        gdi_shannon,
        geodi: geo.value,
        geodi_normalized: geo.value / config.geodi_norm,
        geodi_continents: cont.value,
        bdi: biz.value,
        cdi: cdi_value,
        communities: CommunityValues {
            gender_pielou: g.per_community,
            country_shannon: geo.per_community,
            continent_pielou: cont.per_community,
            sector_pielou: biz.per_community,
        },
        extra,
        distributions,
        settings: ReportSettings {
            weights: *w,
            geodi_norm: config.geodi_norm,
            gender_s_reference: gender_s,
            unknown_policy: opts.unknown,
            duplicate_policy: opts.duplicates,
        },
        diagnostics: Diagnostics {
            records: PerRole::from_fn(|r| edition.count_role(r)),
            excluded,
            country_counts: known_categories(&country),
            continent_counts: known_categories(&continent),
            ldc: LdcReport { represented, countries: ldc_countries },
            notes,
        },
    })
}
