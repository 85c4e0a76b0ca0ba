//! End-to-end runs: load files, enrich records, compute reports.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::aggregate::{compute_report, IndexReport, ReportConfig};
use crate::cohort::{group_editions, sample_authors, GenderLabel, ParticipantRecord, Role};
use crate::dataset::{read_dataset, RowIssue, Severity};
use crate::error::{AggregateError, CohortError, IngestError};
use crate::gender::{infer_gender, InferenceStats, NameLexicon, ProviderRegistry, ProviderSettings};
use crate::geo::{enrich_geography, GeoReport, GeoTables};
use crate::measure::MeasureRegistry;
use crate::sector::{label_sector, SectorOutcome, SectorOverrides, SectorRules};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{path}: {source}")]
    Input {
        path: PathBuf,
        #[source]
        source: IngestError,
    },
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Validation(String),
    #[error("{conference} {year}: {source}")]
    Compute {
        conference: String,
        year: i32,
        #[source]
        source: AggregateError,
    },
    #[error("{conference} {year}: {source}")]
    Sample {
        conference: String,
        year: i32,
        #[source]
        source: CohortError,
    },
}

impl PipelineError {
    /// 2 for input or validation problems, 3 for computation failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Compute { .. } => 3,
            _ => 2,
        }
    }
}

/// Lookup tables and rules used by enrichment.
pub struct Resources {
    pub geo: GeoTables,
    pub rules: SectorRules,
    pub overrides: SectorOverrides,
    pub provider_settings: ProviderSettings,
    pub providers: ProviderRegistry,
}

impl Default for Resources {
    fn default() -> Self {
        Self {
            geo: GeoTables::bundled(),
            rules: SectorRules::bundled(),
            overrides: SectorOverrides::default(),
            provider_settings: ProviderSettings::default(),
            providers: ProviderRegistry::standard(),
        }
    }
}

/// Optional replacements for the bundled data files.
#[derive(Debug, Clone, Default)]
pub struct DataPaths {
    pub continents: Option<PathBuf>,
    pub ldc: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub sector_rules: Option<PathBuf>,
    pub overrides: Option<PathBuf>,
}

fn input_err(path: &Path) -> impl FnOnce(IngestError) -> PipelineError + '_ {
    move |source| PipelineError::Input { path: path.to_path_buf(), source }
}

impl Resources {
    pub fn load(paths: &DataPaths, mut provider_settings: ProviderSettings) -> Result<Self, PipelineError> {
        let geo = match (&paths.continents, &paths.ldc) {
            (None, None) => GeoTables::bundled(),
            (c, l) => {
                let c = c.clone().ok_or_else(|| PipelineError::Config("--continents and --ldc must be given together".into()))?;
                let l = l.clone().ok_or_else(|| PipelineError::Config("--continents and --ldc must be given together".into()))?;
                GeoTables::from_paths(&c, &l).map_err(input_err(&c))?
            }
        };
        let rules = match &paths.sector_rules {
            Some(p) => SectorRules::from_path(p).map_err(input_err(p))?,
            None => SectorRules::bundled(),
        };
        let overrides = match &paths.overrides {
            Some(p) => SectorOverrides::from_path(p).map_err(input_err(p))?,
            None => SectorOverrides::default(),
        };
        if let Some(p) = &paths.lexicon {
            provider_settings.lexicon = std::sync::Arc::new(NameLexicon::from_path(p).map_err(input_err(p))?);
        }
        Ok(Self {
            geo,
            rules,
            overrides,
            provider_settings,
            providers: ProviderRegistry::standard(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileIssue {
    pub path: PathBuf,
    #[serde(flatten)]
    pub issue: RowIssue,
}

#[derive(Debug, Clone, Default)]
pub struct Loaded {
    pub records: Vec<ParticipantRecord>,
    pub issues: Vec<FileIssue>,
}

impl Loaded {
    pub fn rejected(&self) -> usize {
        self.issues.iter().filter(|i| i.issue.severity == Severity::Error).count()
    }
}

/// Parses every input file; any fatal file error aborts.
pub fn load_inputs(paths: &[PathBuf]) -> Result<Loaded, PipelineError> {
    if paths.is_empty() {
        return Err(PipelineError::Config("no input files".into()));
    }
    let mut out = Loaded::default();
    for p in paths {
        let parsed = read_dataset(p).map_err(input_err(p))?;
        out.records.extend(parsed.records);
        out.issues.extend(parsed.issues.into_iter().map(|issue| FileIssue { path: p.clone(), issue }));
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct EnrichSummary {
    pub geography: GeoReport,
    pub sector: SectorOutcome,
    pub gender: InferenceStats,
}

/// Geography, sector and gender enrichment in that order.
pub fn enrich(
    records: &mut [ParticipantRecord],
    resources: &Resources,
    provider: &str,
    overwrite_gender: bool,
) -> Result<EnrichSummary, PipelineError> {
    let provider = resources
        .providers
        .create(provider, &resources.provider_settings)
        .map_err(|e| PipelineError::Config(e.to_string()))?;
    let geography = enrich_geography(records, &resources.geo);
    let sector = label_sector(records, &resources.rules, &resources.overrides);
    let gender = infer_gender(records, provider.as_ref(), overwrite_gender);
    Ok(EnrichSummary { geography, sector, gender })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sampling {
    pub fraction: f64,
    pub seed: u64,
}

/// Groups records into editions, optionally samples authors, and computes
/// every edition in parallel. Output is sorted by conference then year.
pub fn compute_all(
    records: Vec<ParticipantRecord>,
    config: &ReportConfig,
    sampling: Option<Sampling>,
    geo: &GeoTables,
) -> Result<Vec<IndexReport>, PipelineError> {
    let registry = MeasureRegistry::standard();
    for name in &config.extra_geo_measures {
        registry.resolve(name).map_err(|e| PipelineError::Config(e.to_string()))?;
    }
    let editions = group_editions(records);
    if editions.is_empty() {
        return Err(PipelineError::Validation("no valid records".into()));
    }
    let results: Vec<Result<IndexReport, PipelineError>> = editions
        .par_iter()
        .map(|edition| {
            let sampled;
            let edition = match sampling {
                Some(s) => {
                    sampled = sample_authors(edition, s.fraction, s.seed).map_err(|source| PipelineError::Sample {
                        conference: edition.conference().to_string(),
                        year: edition.year(),
                        source,
                    })?;
                    &sampled
                }
                None => edition,
            };
            compute_report(edition, config, geo, &registry).map_err(|source| PipelineError::Compute {
                conference: edition.conference().to_string(),
                year: edition.year(),
                source,
            })
        })
        .collect();
    // editions are already sorted, and collect preserves order
    results.into_iter().collect()
}

/// What `validate` found, short of fatal errors.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub records: usize,
    pub rejected_rows: usize,
    pub warnings: Vec<String>,
    pub unknown_genders: usize,
    pub unresolved_sectors: Vec<String>,
    pub unmapped_countries: Vec<String>,
    pub missing_roles: Vec<String>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.rejected_rows == 0
    }
}

/// Parses and dry-runs enrichment without changing anything on disk.
pub fn validate(paths: &[PathBuf], resources: &Resources, provider: &str) -> Result<(ValidationReport, Vec<FileIssue>), PipelineError> {
    let loaded = load_inputs(paths)?;
    let mut records = loaded.records.clone();
    let summary = enrich(&mut records, resources, provider, false)?;

    let mut warnings: Vec<String> = loaded
        .issues
        .iter()
        .filter(|i| i.issue.severity == Severity::Warning)
        .map(|i| format!("{}: {}", i.path.display(), i.issue))
        .collect();
    let unmapped: Vec<String> = summary
        .geography
        .unmapped
        .iter()
        .map(|u| {
            let r = &records[u.record];
            format!("{} {} {} {}: unmapped country {}", r.conference, r.year, r.role, full_name(r), u.country)
        })
        .collect();
    warnings.extend(unmapped.iter().cloned());
    let unresolved: Vec<String> = summary.sector.unresolved_affiliations().into_iter().map(String::from).collect();
    warnings.extend(unresolved.iter().map(|a| format!("unresolved sector for affiliation `{a}`")));
    warnings.extend(summary.gender.warnings.iter().cloned());

    let mut missing_roles = Vec::new();
    for edition in group_editions(records.clone()) {
        for role in Role::ALL {
            if edition.count_role(role) == 0 {
                missing_roles.push(format!("{} {}: no {role} records", edition.conference(), edition.year()));
            }
        }
    }
    warnings.extend(missing_roles.iter().cloned());

    let report = ValidationReport {
        records: records.len(),
        rejected_rows: loaded.rejected(),
        warnings,
        unknown_genders: records.iter().filter(|r| r.gender == GenderLabel::Unknown).count(),
        unresolved_sectors: unresolved,
        unmapped_countries: unmapped,
        missing_roles,
    };
    Ok((report, loaded.issues))
}

fn full_name(r: &ParticipantRecord) -> String {
    format!("{} {}", r.given_name, r.family_name).trim().to_string()
}
