//! Conference participants and per-community category tallies.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distribution::CategoryDistribution;
use crate::error::CohortError;

/// Label used for records whose dimension value is absent or unknown.
pub const UNKNOWN: &str = "unknown";

/// The three conference communities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Keynote,
    Author,
    Organiser,
}

impl Role {
    pub const ALL: [Role; 3] = [Role::Keynote, Role::Author, Role::Organiser];

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Keynote => "keynote",
            Role::Author => "author",
            Role::Organiser => "organiser",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "keynote" | "keynotes" => Ok(Role::Keynote),
            "author" | "authors" => Ok(Role::Author),
            "organiser" | "organisers" | "organizer" | "organizers" => Ok(Role::Organiser),
            other => Err(format!("unknown role `{other}`")),
        }
    }
}

/// One value per community, in keynote/author/organiser order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PerRole<T> {
    pub keynote: T,
    pub author: T,
    pub organiser: T,
}

impl<T> PerRole<T> {
    pub fn from_fn(mut f: impl FnMut(Role) -> T) -> Self {
        Self {
            keynote: f(Role::Keynote),
            author: f(Role::Author),
            organiser: f(Role::Organiser),
        }
    }

    pub fn try_from_fn<E>(mut f: impl FnMut(Role) -> Result<T, E>) -> Result<Self, E> {
        Ok(Self {
            keynote: f(Role::Keynote)?,
            author: f(Role::Author)?,
            organiser: f(Role::Organiser)?,
        })
    }

    pub fn get(&self, role: Role) -> &T {
        match role {
            Role::Keynote => &self.keynote,
            Role::Author => &self.author,
            Role::Organiser => &self.organiser,
        }
    }

    pub fn get_mut(&mut self, role: Role) -> &mut T {
        match role {
            Role::Keynote => &mut self.keynote,
            Role::Author => &mut self.author,
            Role::Organiser => &mut self.organiser,
        }
    }

    pub fn map<U>(&self, mut f: impl FnMut(Role, &T) -> U) -> PerRole<U> {
        PerRole::from_fn(|r| f(r, self.get(r)))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Role, &T)> {
        Role::ALL.into_iter().map(move |r| (r, self.get(r)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GenderLabel {
    Female,
    Male,
    /// Any identity beyond the binary labels.
    Other,
    /// Inference failed or was not attempted. Distinct from `Other`.
    #[default]
    Unknown,
}

impl GenderLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            GenderLabel::Female => "female",
            GenderLabel::Male => "male",
            GenderLabel::Other => "other",
            GenderLabel::Unknown => UNKNOWN,
        }
    }

    pub fn is_known(self) -> bool {
        self != GenderLabel::Unknown
    }
}

impl fmt::Display for GenderLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GenderLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "female" | "f" => Ok(GenderLabel::Female),
            "male" | "m" => Ok(GenderLabel::Male),
            "other" => Ok(GenderLabel::Other),
            "" | "unknown" => Ok(GenderLabel::Unknown),
            other => Err(format!("unknown gender label `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectorLabel {
    Academia,
    Industry,
    ResearchCentre,
}

impl SectorLabel {
    pub const ALL: [SectorLabel; 3] =
        [SectorLabel::Academia, SectorLabel::Industry, SectorLabel::ResearchCentre];

    pub fn as_str(self) -> &'static str {
        match self {
            SectorLabel::Academia => "academia",
            SectorLabel::Industry => "industry",
            SectorLabel::ResearchCentre => "research_centre",
        }
    }
}

impl fmt::Display for SectorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SectorLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace([' ', '-'], "_");
        match norm.as_str() {
            "academia" | "academic" => Ok(SectorLabel::Academia),
            "industry" => Ok(SectorLabel::Industry),
            "research_centre" | "research_center" => Ok(SectorLabel::ResearchCentre),
            _ => Err(format!("unknown sector `{}`", s.trim())),
        }
    }
}

/// The seven-continent model (the Americas are split).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Continent {
    Africa,
    Antarctica,
    Asia,
    Europe,
    #[serde(rename = "North America")]
    NorthAmerica,
    Oceania,
    #[serde(rename = "South America")]
    SouthAmerica,
}

impl Continent {
    pub const ALL: [Continent; 7] = [
        Continent::Africa,
        Continent::Antarctica,
        Continent::Asia,
        Continent::Europe,
        Continent::NorthAmerica,
        Continent::Oceania,
        Continent::SouthAmerica,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Continent::Africa => "Africa",
            Continent::Antarctica => "Antarctica",
            Continent::Asia => "Asia",
            Continent::Europe => "Europe",
            Continent::NorthAmerica => "North America",
            Continent::Oceania => "Oceania",
            Continent::SouthAmerica => "South America",
        }
    }
}

impl fmt::Display for Continent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Continent {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Continent::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown continent `{}`", s.trim()))
    }
}

/// ISO 3166-1 alpha-2 code, stored upper-case.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct CountryCode(String);

impl CountryCode {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl FromStr for CountryCode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.len() == 2 && t.bytes().all(|b| b.is_ascii_alphabetic()) {
            Ok(CountryCode(t.to_ascii_uppercase()))
        } else {
            Err(format!("`{t}` is not an ISO 3166-1 alpha-2 code"))
        }
    }
}

impl TryFrom<String> for CountryCode {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<CountryCode> for String {
    fn from(c: CountryCode) -> String {
        c.0
    }
}

impl fmt::Display for CountryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// One person in one role at one conference edition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticipantRecord {
    pub conference: String,
    pub year: i32,
    pub role: Role,
    pub given_name: String,
    pub family_name: String,
    /// Non-empty; only the first entry is used for labeling.
    pub affiliations: Vec<String>,
    /// Country of the (first) affiliation, not nationality.
    pub country: Option<CountryCode>,
    pub sector: Option<SectorLabel>,
    pub gender: GenderLabel,
    pub paper_id: Option<String>,
    /// Filled in by geographic enrichment.
    #[serde(default)]
    pub continent: Option<Continent>,
}

impl ParticipantRecord {
    pub fn primary_affiliation(&self) -> &str {
        self.affiliations.first().map_or("", String::as_str)
    }

    fn identity(&self) -> Option<(String, String, String)> {
        if self.given_name.trim().is_empty() && self.family_name.trim().is_empty() {
            return None;
        }
        Some((
            self.given_name.trim().to_lowercase(),
            self.family_name.trim().to_lowercase(),
            self.primary_affiliation().trim().to_lowercase(),
        ))
    }
}

/// All records of one (conference, year).
#[derive(Debug, Clone, PartialEq)]
pub struct ConferenceEdition {
    conference: String,
    year: i32,
    records: Vec<ParticipantRecord>,
}

impl ConferenceEdition {
    pub fn new(
        conference: impl Into<String>,
        year: i32,
        records: Vec<ParticipantRecord>,
    ) -> Result<Self, CohortError> {
        let conference = conference.into();
        if records.is_empty() {
            return Err(CohortError::EmptyEdition);
        }
        if let Some(r) = records.iter().find(|r| r.conference != conference || r.year != year) {
            return Err(CohortError::MixedEdition {
                conference,
                year,
                found_conference: r.conference.clone(),
                found_year: r.year,
            });
        }
        Ok(Self { conference, year, records })
    }

    pub fn conference(&self) -> &str {
        &self.conference
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn records(&self) -> &[ParticipantRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<ParticipantRecord> {
        self.records
    }

    pub fn count_role(&self, role: Role) -> usize {
        self.records.iter().filter(|r| r.role == role).count()
    }
}

/// Splits records into editions, sorted by conference then year.
pub fn group_editions(records: Vec<ParticipantRecord>) -> Vec<ConferenceEdition> {
    let mut groups: BTreeMap<(String, i32), Vec<ParticipantRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.conference.clone(), r.year)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((conference, year), records)| ConferenceEdition { conference, year, records })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimension {
    Gender,
    Country,
    Continent,
    Sector,
}

impl Dimension {
    pub const ALL: [Dimension; 4] =
        [Dimension::Gender, Dimension::Country, Dimension::Continent, Dimension::Sector];

    fn label(self, r: &ParticipantRecord) -> Option<String> {
        match self {
            Dimension::Gender => r.gender.is_known().then(|| r.gender.as_str().to_string()),
            Dimension::Country => r.country.as_ref().map(|c| c.as_str().to_string()),
            Dimension::Continent => r.continent.map(|c| c.as_str().to_string()),
            Dimension::Sector => r.sector.map(|s| s.as_str().to_string()),
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dimension::Gender => "gender",
            Dimension::Country => "country",
            Dimension::Continent => "continent",
            Dimension::Sector => "sector",
        })
    }
}

/// What to do with records whose label is absent or unknown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnknownPolicy {
    #[default]
    Exclude,
    AsCategory,
}

/// How repeated (name, affiliation) pairs within one role are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DuplicatePolicy {
    #[default]
    OncePerRole,
    Keep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BreakdownOptions {
    pub unknown: UnknownPolicy,
    pub duplicates: DuplicatePolicy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Exclusions {
    pub unknown: usize,
    pub duplicate: usize,
}

/// The three per-community distributions for one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct CommunityBreakdown {
    pub dimension: Dimension,
    pub per_community: PerRole<CategoryDistribution>,
    pub excluded: PerRole<Exclusions>,
}

impl CommunityBreakdown {
    /// Wraps ready-made distributions, e.g. built from published percentages.
    pub fn new(
        dimension: Dimension,
        keynote: CategoryDistribution,
        author: CategoryDistribution,
        organiser: CategoryDistribution,
    ) -> Self {
        Self {
            dimension,
            per_community: PerRole { keynote, author, organiser },
            excluded: PerRole::default(),
        }
    }

    pub fn get(&self, role: Role) -> &CategoryDistribution {
        self.per_community.get(role)
    }
}

/// Tallies each community's records by the labels of `dimension`.
///
/// Category order is lexicographic, so the result does not depend on record
/// order. A community may come back empty; aggregators report that as an
/// error naming the role.
pub fn breakdown(
    edition: &ConferenceEdition,
    dimension: Dimension,
    options: BreakdownOptions,
) -> CommunityBreakdown {
    let mut counts: PerRole<BTreeMap<String, u64>> = PerRole::default();
    let mut excluded: PerRole<Exclusions> = PerRole::default();

    for role in Role::ALL {
        // identity -> best label seen; anonymous records are never merged
        let mut people: HashMap<(String, String, String), Option<String>> = HashMap::new();
        let mut anonymous: Vec<Option<String>> = Vec::new();
        for r in edition.records.iter().filter(|r| r.role == role) {
            let label = dimension.label(r);
            match (options.duplicates, r.identity()) {
                (DuplicatePolicy::OncePerRole, Some(id)) => match people.get_mut(&id) {
                    Some(slot) => {
                        excluded.get_mut(role).duplicate += 1;
                        *slot = merge_label(slot.take(), label);
                    }
                    None => {
                        people.insert(id, label);
                    }
                },
                _ => anonymous.push(label),
            }
        }
        let tally = counts.get_mut(role);
        for label in people.into_values().chain(anonymous) {
            match (label, options.unknown) {
                (Some(l), _) => *tally.entry(l).or_default() += 1,
                (None, UnknownPolicy::AsCategory) => *tally.entry(UNKNOWN.to_string()).or_default() += 1,
                (None, UnknownPolicy::Exclude) => excluded.get_mut(role).unknown += 1,
            }
        }
    }

    let per_community = counts.map(|_, tally| {
        CategoryDistribution::from_counts(tally.iter().map(|(k, &v)| (k.clone(), v)))
            .expect("tally labels are unique and counts non-negative")
    });
    CommunityBreakdown { dimension, per_community, excluded }
}

fn merge_label(a: Option<String>, b: Option<String>) -> Option<String> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    }
}

/// Keeps a seeded random subset of the author community.
///
/// Authors sharing a `paper_id` are kept or dropped together; authors without
/// one are sampled individually. The number of groups kept is
/// `round(fraction * groups)`, at least one. Keynotes and organisers pass
/// through untouched.
pub fn sample_authors(
    edition: &ConferenceEdition,
    fraction: f64,
    seed: u64,
) -> Result<ConferenceEdition, CohortError> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(CohortError::InvalidFraction(fraction));
    }
    if fraction == 1.0 {
        return Ok(edition.clone());
    }

    // group index per author record, groups in order of first appearance
    let mut group_of_paper: HashMap<&str, usize> = HashMap::new();
    let mut n_groups = 0usize;
    let mut membership: Vec<Option<usize>> = Vec::with_capacity(edition.records.len());
    for r in &edition.records {
        if r.role != Role::Author {
            membership.push(None);
            continue;
        }
        let g = match r.paper_id.as_deref().filter(|p| !p.is_empty()) {
            Some(pid) => *group_of_paper.entry(pid).or_insert_with(|| {
                n_groups += 1;
                n_groups - 1
            }),
            None => {
                n_groups += 1;
                n_groups - 1
            }
        };
        membership.push(Some(g));
    }
    if n_groups == 0 {
        return Ok(edition.clone());
    }

    let keep = ((fraction * n_groups as f64).round() as usize).clamp(1, n_groups);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = vec![false; n_groups];
    for g in index::sample(&mut rng, n_groups, keep) {
        chosen[g] = true;
    }

    let records = edition
        .records
        .iter()
        .zip(&membership)
        .filter(|(_, m)| m.map_or(true, |g| chosen[g]))
        .map(|(r, _)| r.clone())
        .collect();
    Ok(ConferenceEdition {
        conference: edition.conference.clone(),
        year: edition.year,
        records,
    })
}
