//! Gender inference from given names behind a pluggable provider.
//!
//! Three providers are registered by name:
//! * `offline` looks names up in a bundled lexicon of female shares;
//! * `external` asks a NamSor-style HTTP classifier, caching answers on disk
//!   and falling back to the lexicon when the service fails;
//! * `passthrough` keeps whatever labels the input already has.

use std::collections::{BTreeMap, HashMap};
use std::io::Read;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cohort::{GenderLabel, ParticipantRecord};
use crate::error::IngestError;

/// Environment variable holding the external classifier's API key.
pub const API_KEY_ENV: &str = "DIVINDEX_GENDER_API_KEY";
/// A name is labeled only when one gender holds at least this share.
pub const DEFAULT_BAND: f64 = 0.9;

const LEXICON_CSV: &str = include_str!("../data/name_lexicon.csv");

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PersonName {
    pub given: String,
    pub family: String,
}

impl PersonName {
    pub fn of(r: &ParticipantRecord) -> Self {
        Self {
            given: r.given_name.trim().to_string(),
            family: r.family_name.trim().to_string(),
        }
    }

    fn cache_key(&self) -> String {
        format!("{}|{}", self.given.to_lowercase(), self.family.to_lowercase())
    }
}

/// Labels for a batch of names, aligned with the input.
///
/// `None` means the provider has no opinion and the existing label stays.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Classification {
    pub labels: Vec<Option<GenderLabel>>,
    pub warnings: Vec<String>,
}

pub trait GenderProvider: Send + Sync {
    fn name(&self) -> &'static str;

    fn classify(&self, names: &[PersonName]) -> Classification;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub female_share: f64,
    pub count: u64,
}

/// `given_name,female_share,count` table keyed by lower-case given name.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NameLexicon {
    entries: HashMap<String, LexiconEntry>,
    version: Option<String>,
}

#[derive(Deserialize)]
struct LexiconRow {
    given_name: String,
    female_share: f64,
    count: u64,
}

impl NameLexicon {
    pub fn bundled() -> Self {
        Self::from_reader(LEXICON_CSV.as_bytes()).expect("bundled lexicon is valid")
    }

    pub fn from_path(path: &Path) -> Result<Self, IngestError> {
        let f = std::fs::File::open(path).map_err(|e| IngestError::io(path, e))?;
        Self::from_reader(f)
    }

    /// A `# version: <v>` comment line, if present, sets the lexicon version.
    pub fn from_reader(mut r: impl Read) -> Result<Self, IngestError> {
        let mut text = String::new();
        r.read_to_string(&mut text)
            .map_err(|e| IngestError::Invalid(format!("lexicon: {e}")))?;
        let version = text
            .lines()
            .filter_map(|l| l.trim().strip_prefix('#'))
            .find_map(|l| l.trim().strip_prefix("version:").map(|v| v.trim().to_string()));
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut entries = HashMap::new();
        for (i, row) in rdr.deserialize::<LexiconRow>().enumerate() {
            let row = row?;
            if !(0.0..=1.0).contains(&row.female_share) {
                return Err(IngestError::Table {
                    table: "name lexicon",
                    line: i as u64 + 2,
                    message: format!("female_share {} outside [0, 1]", row.female_share),
                });
            }
            entries.insert(
                row.given_name.to_lowercase(),
                LexiconEntry { female_share: row.female_share, count: row.count },
            );
        }
        Ok(Self { entries, version })
    }

    pub fn version(&self) -> Option<&str> {
        self.version.as_deref()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Tries the full given name, then its first word.
    pub fn lookup(&self, given: &str) -> Option<&LexiconEntry> {
        let norm = given.trim().to_lowercase();
        self.entries.get(&norm).or_else(|| {
            let first = norm.split_whitespace().next()?;
            self.entries.get(first)
        })
    }
}

/// Lexicon lookup with an ambiguity band.
#[derive(Debug, Clone)]
pub struct OfflineLexicon {
    lexicon: Arc<NameLexicon>,
    band: f64,
}

impl OfflineLexicon {
    pub fn new(lexicon: Arc<NameLexicon>, band: f64) -> Self {
        Self { lexicon, band }
    }

    pub fn label(&self, given: &str) -> GenderLabel {
        match self.lexicon.lookup(given) {
            Some(e) if e.female_share >= self.band => GenderLabel::Female,
            Some(e) if 1.0 - e.female_share >= self.band => GenderLabel::Male,
            _ => GenderLabel::Unknown,
        }
    }
}

impl GenderProvider for OfflineLexicon {
    fn name(&self) -> &'static str {
        "offline"
    }

    fn classify(&self, names: &[PersonName]) -> Classification {
        Classification {
            labels: names.iter().map(|n| Some(self.label(&n.given))).collect(),
            warnings: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Passthrough;

impl GenderProvider for Passthrough {
    fn name(&self) -> &'static str {
        "passthrough"
    }

    fn classify(&self, names: &[PersonName]) -> Classification {
        Classification {
            labels: vec![None; names.len()],
            warnings: Vec::new(),
        }
    }
}

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("request timed out")]
    Timeout,
    #[error("service unavailable: {0}")]
    Unavailable(String),
    #[error("unexpected response: {0}")]
    BadResponse(String),
    #[error("no API key (set {API_KEY_ENV})")]
    MissingKey,
}

/// What a remote classifier said about one name.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ServiceAnswer {
    pub likely_gender: String,
    #[serde(default)]
    pub probability_calibrated: Option<f64>,
}

/// One lookup against a remote name classifier.
pub trait GenderService: Send + Sync {
    fn lookup(&self, name: &PersonName) -> Result<ServiceAnswer, ServiceError>;
}

/// `GET {endpoint}/{given}/{family}` with an `X-API-KEY` header.
pub struct HttpGenderService {
    client: reqwest::blocking::Client,
    endpoint: reqwest::Url,
    api_key: Option<String>,
}

impl HttpGenderService {
    pub fn new(endpoint: &str, api_key: Option<String>, timeout: Duration) -> Result<Self, ServiceError> {
        let endpoint = reqwest::Url::parse(endpoint)
            .map_err(|e| ServiceError::Unavailable(format!("bad endpoint `{endpoint}`: {e}")))?;
        if endpoint.cannot_be_a_base() {
            return Err(ServiceError::Unavailable(format!("bad endpoint `{endpoint}`")));
        }
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| ServiceError::Unavailable(e.to_string()))?;
        Ok(Self { client, endpoint, api_key })
    }
}

impl GenderService for HttpGenderService {
    fn lookup(&self, name: &PersonName) -> Result<ServiceAnswer, ServiceError> {
        let key = self.api_key.as_deref().ok_or(ServiceError::MissingKey)?;
        let mut url = self.endpoint.clone();
        url.path_segments_mut()
            .expect("endpoint checked to be a base")
            .pop_if_empty()
            .push(&name.given)
            .push(if name.family.is_empty() { "-" } else { &name.family });
        let resp = self
            .client
            .get(url)
            .header("X-API-KEY", key)
            .send()
            .map_err(|e| {
                if e.is_timeout() {
                    ServiceError::Timeout
                } else {
                    ServiceError::Unavailable(e.to_string())
                }
            })?;
        if !resp.status().is_success() {
            return Err(ServiceError::Unavailable(format!("HTTP {}", resp.status())));
        }
        resp.json::<ServiceAnswer>().map_err(|e| {
            if e.is_timeout() {
                ServiceError::Timeout
            } else {
                ServiceError::BadResponse(e.to_string())
            }
        })
    }
}

/// Name to label cache persisted as a JSON object.
#[derive(Debug, Default)]
pub struct NameCache {
    path: Option<PathBuf>,
    entries: Mutex<BTreeMap<String, GenderLabel>>,
}

impl NameCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Loads `path` if it exists; answers are written back by [`save`](Self::save).
    pub fn open(path: impl Into<PathBuf>) -> Result<Self, IngestError> {
        let path = path.into();
        let entries = match std::fs::read_to_string(&path) {
            Ok(text) => serde_json::from_str(&text)
                .map_err(|e| IngestError::Invalid(format!("{}: {e}", path.display())))?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => BTreeMap::new(),
            Err(e) => return Err(IngestError::io(path, e)),
        };
        Ok(Self { path: Some(path), entries: Mutex::new(entries) })
    }

    fn get(&self, name: &PersonName) -> Option<GenderLabel> {
        self.entries.lock().expect("cache lock").get(&name.cache_key()).copied()
    }

    fn put(&self, name: &PersonName, label: GenderLabel) {
        self.entries.lock().expect("cache lock").insert(name.cache_key(), label);
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn save(&self) -> std::io::Result<()> {
        let Some(path) = &self.path else { return Ok(()) };
        let json = {
            let map = self.entries.lock().expect("cache lock");
            serde_json::to_string_pretty(&*map).expect("string map serializes")
        };
        std::fs::write(path, json)
    }
}

#[derive(Debug, Clone)]
pub struct ExternalConfig {
    pub endpoint: String,
    pub timeout: Duration,
    pub max_in_flight: usize,
    /// Extra attempts after the first failure.
    pub retries: usize,
    pub band: f64,
    pub cache_path: Option<PathBuf>,
}

impl Default for ExternalConfig {
    fn default() -> Self {
        Self {
            endpoint: "https://v2.namsor.com/NamSorAPIv2/api2/json/gender".into(),
            timeout: Duration::from_secs(5),
            max_in_flight: 4,
            retries: 2,
            band: DEFAULT_BAND,
            cache_path: None,
        }
    }
}

/// Remote classifier with caching and a lexicon fallback.
pub struct ExternalProvider {
    service: Box<dyn GenderService>,
    cache: NameCache,
    fallback: OfflineLexicon,
    max_in_flight: usize,
    retries: usize,
    band: f64,
}

impl ExternalProvider {
    pub fn new(
        service: Box<dyn GenderService>,
        cache: NameCache,
        fallback: OfflineLexicon,
        config: &ExternalConfig,
    ) -> Self {
        Self {
            service,
            cache,
            fallback,
            max_in_flight: config.max_in_flight.max(1),
            retries: config.retries.min(2),
            band: config.band,
        }
    }

    pub fn cache(&self) -> &NameCache {
        &self.cache
    }

    fn to_label(&self, answer: &ServiceAnswer) -> GenderLabel {
        let label: GenderLabel = answer.likely_gender.parse().unwrap_or(GenderLabel::Unknown);
        match answer.probability_calibrated {
            Some(p) if p < self.band => GenderLabel::Unknown,
            _ => label,
        }
    }

    fn ask(&self, name: &PersonName) -> Result<GenderLabel, ServiceError> {
        let mut last = None;
        for _ in 0..=self.retries {
            match self.service.lookup(name) {
                Ok(a) => return Ok(self.to_label(&a)),
                Err(ServiceError::MissingKey) => return Err(ServiceError::MissingKey),
                Err(e) => last = Some(e),
            }
        }
        Err(last.expect("at least one attempt"))
    }
}

impl GenderProvider for ExternalProvider {
    fn name(&self) -> &'static str {
        "external"
    }

    fn classify(&self, names: &[PersonName]) -> Classification {
        let mut pending: Vec<&PersonName> = names.iter().filter(|n| self.cache.get(n).is_none()).collect();
        pending.sort();
        pending.dedup();

        let answers: Vec<(&PersonName, Result<GenderLabel, ServiceError>)> = match rayon::ThreadPoolBuilder::new()
            .num_threads(self.max_in_flight)
            .build()
        {
            Ok(pool) => pool.install(|| pending.par_iter().map(|n| (*n, self.ask(n))).collect()),
            Err(_) => pending.iter().map(|n| (*n, self.ask(n))).collect(),
        };

        let mut failed: HashMap<&PersonName, String> = HashMap::new();
        for (name, result) in answers {
            match result {
                Ok(label) => self.cache.put(name, label),
                Err(e) => {
                    failed.insert(name, e.to_string());
                }
            }
        }

        let mut warnings = Vec::new();
        if !failed.is_empty() {
            let mut reasons: Vec<&str> = failed.values().map(String::as_str).collect();
            reasons.sort_unstable();
            reasons.dedup();
            warnings.push(format!(
                "degraded mode: {} name(s) resolved with the offline lexicon ({})",
                failed.len(),
                reasons.join("; ")
            ));
        }
        if let Err(e) = self.cache.save() {
            warnings.push(format!("could not write name cache: {e}"));
        }

        let labels = names
            .iter()
            .map(|n| match self.cache.get(n) {
                Some(l) => Some(l),
                None => Some(self.fallback.label(&n.given)),
            })
            .collect();
        Classification { labels, warnings }
    }
}

/// Shared inputs for constructing providers.
#[derive(Debug, Clone)]
pub struct ProviderSettings {
    pub lexicon: Arc<NameLexicon>,
    pub band: f64,
    pub external: ExternalConfig,
    pub api_key: Option<String>,
}

impl Default for ProviderSettings {
    fn default() -> Self {
        Self {
            lexicon: Arc::new(NameLexicon::bundled()),
            band: DEFAULT_BAND,
            external: ExternalConfig::default(),
            api_key: std::env::var(API_KEY_ENV).ok().filter(|k| !k.is_empty()),
        }
    }
}

type ProviderFactory = fn(&ProviderSettings) -> Result<Box<dyn GenderProvider>, IngestError>;

/// Providers selectable by name.
pub struct ProviderRegistry {
    factories: BTreeMap<&'static str, ProviderFactory>,
}

impl ProviderRegistry {
    pub fn empty() -> Self {
        Self { factories: BTreeMap::new() }
    }

    pub fn standard() -> Self {
        let mut r = Self::empty();
        r.register("offline", |s| Ok(Box::new(OfflineLexicon::new(s.lexicon.clone(), s.band))));
        r.register("passthrough", |_| Ok(Box::new(Passthrough)));
        r.register("external", |s| {
            let fallback = OfflineLexicon::new(s.lexicon.clone(), s.band);
            let cache = match &s.external.cache_path {
                Some(p) => NameCache::open(p)?,
                None => NameCache::in_memory(),
            };
            let service = HttpGenderService::new(&s.external.endpoint, s.api_key.clone(), s.external.timeout)
                .map_err(|e| IngestError::Invalid(e.to_string()))?;
            Ok(Box::new(ExternalProvider::new(Box::new(service), cache, fallback, &s.external)))
        });
        r
    }

    pub fn register(&mut self, name: &'static str, factory: ProviderFactory) {
        self.factories.insert(name, factory);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.factories.keys().copied().collect()
    }

    pub fn create(&self, name: &str, settings: &ProviderSettings) -> Result<Box<dyn GenderProvider>, IngestError> {
        let factory = self
            .factories
            .get(name)
            .ok_or_else(|| IngestError::Invalid(format!("unknown gender provider `{name}`")))?;
        factory(settings)
    }
}

impl Default for ProviderRegistry {
    fn default() -> Self {
        Self::standard()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct InferenceStats {
    pub provider: String,
    /// Records sent to the provider.
    pub requested: usize,
    /// Records whose label changed.
    pub changed: usize,
    /// Label counts over all records after inference.
    pub labels: BTreeMap<String, usize>,
    pub warnings: Vec<String>,
}

/// Labels records with unknown gender (or every named record when `overwrite`).
///
/// Records without a given name are never sent to the provider.
pub fn infer_gender(
    records: &mut [ParticipantRecord],
    provider: &dyn GenderProvider,
    overwrite: bool,
) -> InferenceStats {
    let targets: Vec<usize> = records
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.given_name.trim().is_empty())
        .filter(|(_, r)| overwrite || !r.gender.is_known())
        .map(|(i, _)| i)
        .collect();
    let names: Vec<PersonName> = targets.iter().map(|&i| PersonName::of(&records[i])).collect();
    let result = if names.is_empty() {
        Classification::default()
    } else {
        provider.classify(&names)
    };

    let mut changed = 0;
    for (&i, label) in targets.iter().zip(&result.labels) {
        if let Some(l) = label {
            if records[i].gender != *l {
                records[i].gender = *l;
                changed += 1;
            }
        }
    }
    let mut labels = BTreeMap::new();
    for r in records.iter() {
        *labels.entry(r.gender.as_str().to_string()).or_default() += 1;
    }
    InferenceStats {
        provider: provider.name().to_string(),
        requested: targets.len(),
        changed,
        labels,
        warnings: result.warnings,
    }
}
