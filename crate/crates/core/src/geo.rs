//! Country to continent lookup and the UN least-developed-country set.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cohort::{Continent, CountryCode, ParticipantRecord, PerRole, Role};
use crate::error::IngestError;

const CONTINENTS_CSV: &str = include_str!("../data/continents.csv");
const LDC_CSV: &str = include_str!("../data/ldc.csv");

#[derive(Debug, Clone, PartialEq)]
pub struct GeoTables {
    continents: BTreeMap<CountryCode, Continent>,
    ldc: BTreeSet<CountryCode>,
}

#[derive(Deserialize)]
struct ContinentRow {
    country: String,
    continent: String,
}

#[derive(Deserialize)]
struct LdcRow {
    country: String,
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(r)
}

impl GeoTables {
    /// The tables shipped with the crate.
    pub fn bundled() -> Self {
        Self::from_readers(CONTINENTS_CSV.as_bytes(), LDC_CSV.as_bytes())
            .expect("bundled geography tables are valid")
    }

    pub fn from_paths(continents: &Path, ldc: &Path) -> Result<Self, IngestError> {
        let c = std::fs::File::open(continents).map_err(|e| IngestError::io(continents, e))?;
        let l = std::fs::File::open(ldc).map_err(|e| IngestError::io(ldc, e))?;
        Self::from_readers(c, l)
    }

    /// Parses `country,continent` and `country` tables. `#` starts a comment line.
    pub fn from_readers(continents: impl Read, ldc: impl Read) -> Result<Self, IngestError> {
        let mut map = BTreeMap::new();
        for (i, row) in reader(continents).deserialize::<ContinentRow>().enumerate() {
            let row = row?;
            let line = i as u64 + 2;
            let err = |message: String| IngestError::Table { table: "continents", line, message };
            let code: CountryCode = row.country.parse().map_err(err)?;
            let continent: Continent = row.continent.parse().map_err(err)?;
            if map.insert(code.clone(), continent).is_some() {
                return Err(err(format!("duplicate country {code}")));
            }
        }
        let mut set = BTreeSet::new();
        for (i, row) in reader(ldc).deserialize::<LdcRow>().enumerate() {
            let row = row?;
            let err = |message: String| IngestError::Table { table: "ldc", line: i as u64 + 2, message };
            let code: CountryCode = row.country.parse().map_err(err)?;
            if !map.contains_key(&code) {
                return Err(err(format!("LDC country {code} missing from continent table")));
            }
            set.insert(code);
        }
        Ok(Self { continents: map, ldc: set })
    }

    pub fn continent_of(&self, country: &CountryCode) -> Option<Continent> {
        self.continents.get(country).copied()
    }

    pub fn is_ldc(&self, country: &CountryCode) -> bool {
        self.ldc.contains(country)
    }

    pub fn ldc_countries(&self) -> impl Iterator<Item = &CountryCode> {
        self.ldc.iter()
    }

    pub fn len(&self) -> usize {
        self.continents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.continents.is_empty()
    }
}

/// Edition key used in enrichment reports.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EditionKey {
    pub conference: String,
    pub year: i32,
}

impl EditionKey {
    pub fn of(r: &ParticipantRecord) -> Self {
        Self { conference: r.conference.clone(), year: r.year }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnmappedCountry {
    /// Index into the enriched record slice.
    pub record: usize,
    pub country: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GeoReport {
    pub unmapped: Vec<UnmappedCountry>,
    /// LDC countries present, per edition and role.
    #[serde(with = "edition_entries")]
    pub ldc: BTreeMap<EditionKey, PerRole<BTreeSet<String>>>,
}

/// JSON object keys must be strings, so the edition map is written as a list.
mod edition_entries {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry<T> {
        #[serde(flatten)]
        edition: EditionKey,
        roles: T,
    }

    pub fn serialize<S: Serializer, T: Serialize>(map: &BTreeMap<EditionKey, T>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(map.iter().map(|(k, v)| Entry { edition: k.clone(), roles: v }))
    }

    pub fn deserialize<'de, D: Deserializer<'de>, T: Deserialize<'de>>(d: D) -> Result<BTreeMap<EditionKey, T>, D::Error> {
        let entries: Vec<Entry<T>> = Vec::deserialize(d)?;
        Ok(entries.into_iter().map(|e| (e.edition, e.roles)).collect())
    }
}

impl GeoReport {
    pub fn ldc_represented(&self) -> bool {
        self.ldc.values().any(|p| p.iter().any(|(_, s)| !s.is_empty()))
    }
}

/// Sets each record's continent from its country.
///
/// Unknown codes leave the continent absent and are listed in the report.
pub fn enrich_geography(records: &mut [ParticipantRecord], tables: &GeoTables) -> GeoReport {
    let mut report = GeoReport::default();
    for (i, r) in records.iter_mut().enumerate() {
        let entry = report.ldc.entry(EditionKey::of(r)).or_default();
        let Some(code) = r.country.as_ref() else {
            r.continent = None;
            continue;
        };
        r.continent = tables.continent_of(code);
        if r.continent.is_none() {
            report.unmapped.push(UnmappedCountry { record: i, country: code.to_string() });
        }
        if tables.is_ldc(code) {
            entry.get_mut(r.role).insert(code.to_string());
        }
    }
    report
}

/// Roles in which any LDC country appears.
pub fn ldc_roles(per_role: &PerRole<BTreeSet<String>>) -> Vec<Role> {
    per_role.iter().filter(|(_, s)| !s.is_empty()).map(|(r, _)| r).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohort::tests::person;
    use crate::cohort::GenderLabel;

    #[test]
    fn report_serializes_as_json() {
        let mut records = vec![
            person(Role::Author, "A", GenderLabel::Male, "SS"),
            person(Role::Keynote, "B", GenderLabel::Male, "FR"),
        ];
        let report = enrich_geography(&mut records, &GeoTables::bundled());
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains(r#""conference":"TestConf","year":2020"#), "{json}");
        assert!(json.contains(r#""author":["SS"]"#), "{json}");
        let back: GeoReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn bundled_tables_hold_invariants() {
        let t = GeoTables::bundled();
        assert_eq!(t.len(), 249);
        assert_eq!(t.ldc_countries().count(), 46);
        for c in t.ldc_countries() {
            assert!(t.continent_of(c).is_some());
        }
        let used: BTreeSet<Continent> = t.continents.values().copied().collect();
        assert_eq!(used.len(), 7);
    }

    #[test]
    fn lookups() {
        let t = GeoTables::bundled();
        let code = |s: &str| s.parse::<CountryCode>().unwrap();
        assert_eq!(t.continent_of(&code("FR")), Some(Continent::Europe));
        assert_eq!(t.continent_of(&code("BR")), Some(Continent::SouthAmerica));
        assert_eq!(t.continent_of(&code("US")), Some(Continent::NorthAmerica));
        assert_eq!(t.continent_of(&code("MX")), Some(Continent::NorthAmerica));
        assert_eq!(t.continent_of(&code("AU")), Some(Continent::Oceania));
        assert_eq!(t.continent_of(&code("XX")), None);
        assert!(t.is_ldc(&code("ET")));
        assert!(!t.is_ldc(&code("US")));
    }

    #[test]
    fn enrichment_and_ldc_report() {
        let t = GeoTables::bundled();
        let mut recs = vec![
            person(Role::Author, "A", GenderLabel::Male, "US"),
            person(Role::Author, "B", GenderLabel::Male, "DE"),
            person(Role::Keynote, "C", GenderLabel::Male, "JP"),
            person(Role::Organiser, "D", GenderLabel::Male, ""),
        ];
        let rep = enrich_geography(&mut recs, &t);
        assert!(!rep.ldc_represented());
        assert!(rep.unmapped.is_empty());
        assert_eq!(recs[2].continent, Some(Continent::Asia));
        assert_eq!(recs[3].continent, None);

        recs.push(person(Role::Organiser, "E", GenderLabel::Female, "XX"));
        recs.push(person(Role::Author, "F", GenderLabel::Female, "NP"));
        let rep = enrich_geography(&mut recs, &t);
        assert_eq!(rep.unmapped, vec![UnmappedCountry { record: 4, country: "XX".into() }]);
        assert!(rep.ldc_represented());
        let per_role = rep.ldc.values().next().unwrap();
        assert_eq!(ldc_roles(per_role), vec![Role::Author]);
    }

    #[test]
    fn rejects_ldc_outside_map() {
        let err = GeoTables::from_readers("country,continent\nFR,Europe\n".as_bytes(), "country\nET\n".as_bytes());
        assert!(err.is_err());
        let err = GeoTables::from_readers("country,continent\nFR,Atlantis\n".as_bytes(), "country\n".as_bytes());
        assert!(err.is_err());
    }
}
