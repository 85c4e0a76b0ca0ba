//! Affiliation to sector labeling: ordered keyword rules plus a manual overrides table.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::cohort::{ParticipantRecord, SectorLabel};
use crate::error::IngestError;

/// Bundled keyword rules, evaluated top to bottom. Company names and corporate
/// suffixes come first, so corporate research labs resolve to industry.
const DEFAULT_RULES: &[(&str, SectorLabel)] = {
    use SectorLabel::*;
    &[
        ("google", Industry),
        ("alphabet", Industry),
        ("deepmind", Industry),
        ("microsoft", Industry),
        ("facebook", Industry),
        ("meta ai", Industry),
        ("amazon", Industry),
        ("apple", Industry),
        ("ibm", Industry),
        ("nvidia", Industry),
        ("intel", Industry),
        ("openai", Industry),
        ("netflix", Industry),
        ("spotify", Industry),
        ("baidu", Industry),
        ("alibaba", Industry),
        ("tencent", Industry),
        ("huawei", Industry),
        ("samsung", Industry),
        ("uber", Industry),
        ("twitter", Industry),
        ("adobe", Industry),
        ("salesforce", Industry),
        ("yahoo", Industry),
        ("linkedin", Industry),
        ("criteo", Industry),
        ("booking.com", Industry),
        ("zalando", Industry),
        ("pinterest", Industry),
        ("bytedance", Industry),
        ("sony", Industry),
        ("naver", Industry),
        ("yandex", Industry),
        ("siemens", Industry),
        ("bosch", Industry),
        ("telefonica", Industry),
        ("inc", Industry),
        ("inc.", Industry),
        ("ltd", Industry),
        ("ltd.", Industry),
        ("llc", Industry),
        ("gmbh", Industry),
        ("corp", Industry),
        ("corp.", Industry),
        ("corporation", Industry),
        ("company", Industry),
        ("plc", Industry),
        ("s.a.", Industry),
        ("s.l.", Industry),
        ("institute of technology", Academia),
        ("institute of science", Academia),
        ("university", Academia),
        ("universität", Academia),
        ("universitat", Academia),
        ("université", Academia),
        ("universite", Academia),
        ("universidad", Academia),
        ("universidade", Academia),
        ("università", Academia),
        ("universiteit", Academia),
        ("uniwersytet", Academia),
        ("college", Academia),
        ("school", Academia),
        ("polytechnic", Academia),
        ("politecnico", Academia),
        ("polytechnique", Academia),
        ("hochschule", Academia),
        ("école", Academia),
        ("ecole", Academia),
        ("eth", Academia),
        ("epfl", Academia),
        ("mit", Academia),
        ("kaist", Academia),
        ("academy of sciences", ResearchCentre),
        ("research center", ResearchCentre),
        ("research centre", ResearchCentre),
        ("research council", ResearchCentre),
        ("supercomputing center", ResearchCentre),
        ("supercomputing centre", ResearchCentre),
        ("national laboratory", ResearchCentre),
        ("institute", ResearchCentre),
        ("institut", ResearchCentre),
        ("instituto", ResearchCentre),
        ("istituto", ResearchCentre),
        ("laboratory", ResearchCentre),
        ("laboratories", ResearchCentre),
        ("lab", ResearchCentre),
        ("labs", ResearchCentre),
        ("cnrs", ResearchCentre),
        ("inria", ResearchCentre),
        ("max planck", ResearchCentre),
        ("fraunhofer", ResearchCentre),
        ("csic", ResearchCentre),
        ("csiro", ResearchCentre),
        ("riken", ResearchCentre),
        ("cern", ResearchCentre),
        ("nasa", ResearchCentre),
    ]
};

#[derive(Debug, Clone)]
struct Rule {
    keyword: String,
    pattern: Regex,
    sector: SectorLabel,
}

/// Ordered keyword rules; the first matching keyword decides the sector.
#[derive(Debug, Clone)]
pub struct SectorRules {
    rules: Vec<Rule>,
}

impl SectorRules {
    /// Keywords match case-insensitively as whole words (or phrases).
    pub fn new<S: AsRef<str>>(rules: impl IntoIterator<Item = (S, SectorLabel)>) -> Result<Self, IngestError> {
        let rules = rules
            .into_iter()
            .map(|(kw, sector)| {
                let keyword = kw.as_ref().trim().to_lowercase();
                if keyword.is_empty() {
                    return Err(IngestError::Invalid("empty sector keyword".into()));
                }
                let pattern = Regex::new(&format!(
                    r"(?i)(?:^|[^\p{{L}}\p{{N}}]){}(?:$|[^\p{{L}}\p{{N}}])",
                    regex::escape(&keyword)
                ))
                .map_err(|e| IngestError::Invalid(e.to_string()))?;
                Ok(Rule { keyword, pattern, sector })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if rules.is_empty() {
            return Err(IngestError::Invalid("sector rule list is empty".into()));
        }
        Ok(Self { rules })
    }

    pub fn bundled() -> Self {
        Self::new(DEFAULT_RULES.iter().copied()).expect("bundled sector rules compile")
    }

    /// Reads a `keyword,sector` table, keeping file order.
    pub fn from_reader(r: impl Read) -> Result<Self, IngestError> {
        let mut rows = Vec::new();
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(r);
        for (i, rec) in rdr.deserialize::<(String, String)>().enumerate() {
            let (kw, sector) = rec?;
            let sector = sector.parse().map_err(|message| IngestError::Table {
                table: "sector rules",
                line: i as u64 + 2,
                message,
            })?;
            rows.push((kw, sector));
        }
        Self::new(rows)
    }

    pub fn from_path(path: &Path) -> Result<Self, IngestError> {
        let f = std::fs::File::open(path).map_err(|e| IngestError::io(path, e))?;
        Self::from_reader(f)
    }

    /// First matching rule as `(keyword, sector)`.
    pub fn classify(&self, affiliation: &str) -> Option<(&str, SectorLabel)> {
        self.rules
            .iter()
            .find(|r| r.pattern.is_match(affiliation))
            .map(|r| (r.keyword.as_str(), r.sector))
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

/// Manually curated `affiliation,sector` labels, matched case-insensitively.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SectorOverrides {
    entries: BTreeMap<String, SectorLabel>,
}

#[derive(Deserialize)]
struct OverrideRow {
    affiliation: String,
    sector: String,
}

fn normalize(aff: &str) -> String {
    aff.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

impl SectorOverrides {
    pub fn from_reader(r: impl Read) -> Result<Self, IngestError> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(r);
        let headers = rdr.headers()?.clone();
        for want in ["affiliation", "sector"] {
            if !headers.iter().any(|h| h == want) {
                return Err(IngestError::MissingColumn { column: want.into() });
            }
        }
        let mut entries = BTreeMap::new();
        for (i, row) in rdr.deserialize::<OverrideRow>().enumerate() {
            let row = row?;
            let sector = row.sector.parse().map_err(|message| IngestError::Table {
                table: "overrides",
                line: i as u64 + 2,
                message,
            })?;
            entries.insert(normalize(&row.affiliation), sector);
        }
        Ok(Self { entries })
    }

    pub fn from_path(path: &Path) -> Result<Self, IngestError> {
        let f = std::fs::File::open(path).map_err(|e| IngestError::io(path, e))?;
        Self::from_reader(f)
    }

    pub fn get(&self, affiliation: &str) -> Option<SectorLabel> {
        self.entries.get(&normalize(affiliation)).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnresolvedAffiliation {
    pub record: usize,
    pub affiliation: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SectorOutcome {
    pub by_rule: usize,
    pub by_override: usize,
    pub already_labeled: usize,
    pub unresolved: Vec<UnresolvedAffiliation>,
}

impl SectorOutcome {
    /// Distinct unresolved affiliations, sorted; the seed for an overrides file.
    pub fn unresolved_affiliations(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.unresolved.iter().map(|u| u.affiliation.as_str()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Labels records that have no sector yet from their first affiliation.
///
/// Overrides win over rules. Records already carrying a sector are left
/// alone, which makes the step idempotent.
pub fn label_sector(
    records: &mut [ParticipantRecord],
    rules: &SectorRules,
    overrides: &SectorOverrides,
) -> SectorOutcome {
    let mut out = SectorOutcome::default();
    for (i, r) in records.iter_mut().enumerate() {
        if r.sector.is_some() {
            out.already_labeled += 1;
            continue;
        }
        let aff = r.primary_affiliation();
        if let Some(s) = overrides.get(aff) {
            r.sector = Some(s);
            out.by_override += 1;
        } else if let Some((_, s)) = rules.classify(aff) {
            r.sector = Some(s);
            out.by_rule += 1;
        } else {
            out.unresolved.push(UnresolvedAffiliation { record: i, affiliation: aff.to_string() });
        }
    }
    out
}
