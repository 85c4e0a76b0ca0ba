//! Participant CSV files.
//!
//! The header must be exactly
//! `conference,year,role,given_name,family_name,affiliations,country,sector,gender,paper_id`.
//! Affiliations are `;`-separated and empty cells mean "absent".

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cohort::{CountryCode, GenderLabel, ParticipantRecord, Role, SectorLabel};
use crate::error::IngestError;

pub const COLUMNS: [&str; 10] = [
    "conference",
    "year",
    "role",
    "given_name",
    "family_name",
    "affiliations",
    "country",
    "sector",
    "gender",
    "paper_id",
];

pub const MIN_YEAR: i32 = 1900;
pub const MAX_YEAR: i32 = 2100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    /// The row was rejected.
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowIssue {
    pub line: u64,
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for RowIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "line {}: {}: {}", self.line, tag, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParsedDataset {
    pub records: Vec<ParticipantRecord>,
    pub issues: Vec<RowIssue>,
}

impl ParsedDataset {
    pub fn rejected(&self) -> usize {
        self.issues.iter().filter(|i| i.severity == Severity::Error).count()
    }

    pub fn warnings(&self) -> impl Iterator<Item = &RowIssue> {
        self.issues.iter().filter(|i| i.severity == Severity::Warning)
    }
}

fn check_header(header: &csv::StringRecord) -> Result<(), IngestError> {
    let cols: Vec<&str> = header
        .iter()
        .enumerate()
        .map(|(i, h)| if i == 0 { h.trim_start_matches('\u{feff}') } else { h })
        .map(str::trim)
        .collect();
    if cols.iter().all(|c| c.is_empty()) {
        return Err(IngestError::EmptyFile);
    }
    if let Some(missing) = COLUMNS.iter().find(|c| !cols.contains(c)) {
        return Err(IngestError::MissingColumn { column: missing.to_string() });
    }
    if let Some(extra) = cols.iter().find(|c| !COLUMNS.contains(c)) {
        return Err(IngestError::UnexpectedColumn { column: extra.to_string() });
    }
    for (i, want) in COLUMNS.iter().enumerate() {
        if cols.get(i) != Some(want) {
            return Err(IngestError::MisplacedColumn { column: want.to_string(), position: i + 1 });
        }
    }
    if cols.len() != COLUMNS.len() {
        return Err(IngestError::Invalid("duplicate header columns".into()));
    }
    Ok(())
}

fn opt(s: &str) -> Option<&str> {
    let t = s.trim();
    (!t.is_empty()).then_some(t)
}

/// Converts one data row; `Err` rejects the row.
fn parse_row(row: &csv::StringRecord, warnings: &mut Vec<String>) -> Result<ParticipantRecord, String> {
    if row.len() != COLUMNS.len() {
        return Err(format!("expected {} fields, found {}", COLUMNS.len(), row.len()));
    }
    let f = |i: usize| row.get(i).unwrap_or("").trim();

    let conference = f(0).to_string();
    if conference.is_empty() {
        return Err("empty conference".into());
    }
    let year: i32 = f(1).parse().map_err(|_| format!("malformed year `{}`", f(1)))?;
    if !(MIN_YEAR..=MAX_YEAR).contains(&year) {
        return Err(format!("year {year} outside [{MIN_YEAR}, {MAX_YEAR}]"));
    }
    let role: Role = f(2).parse()?;
    let given_name = f(3).to_string();
    let family_name = f(4).to_string();
    let affiliations: Vec<String> = f(5)
        .split(';')
        .map(str::trim)
        .filter(|a| !a.is_empty())
        .map(String::from)
        .collect();
    if affiliations.is_empty() {
        return Err("no affiliation".into());
    }
    let country = match opt(f(6)) {
        None => None,
        Some(c) => match c.parse::<CountryCode>() {
            Ok(code) => Some(code),
            Err(e) => {
                warnings.push(format!("{e}; country dropped"));
                None
            }
        },
    };
    let sector = opt(f(7)).map(str::parse::<SectorLabel>).transpose()?;
    let gender: GenderLabel = f(8).parse()?;
    if given_name.is_empty() && family_name.is_empty() && !gender.is_known() {
        return Err("name required unless gender is pre-labeled".into());
    }
    let paper_id = opt(f(9)).map(String::from);

    Ok(ParticipantRecord {
        conference,
        year,
        role,
        given_name,
        family_name,
        affiliations,
        country,
        sector,
        gender,
        paper_id,
        continent: None,
    })
}

/// Parses a participant CSV. Bad rows are reported and skipped; schema
/// problems and empty input are fatal.
pub fn parse_dataset(input: impl Read) -> Result<ParsedDataset, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(input);
    check_header(rdr.headers()?)?;

    let mut out = ParsedDataset::default();
    let mut rows = 0usize;
    for row in rdr.records() {
        let row = row?;
        if row.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        rows += 1;
        let line = row.position().map_or(0, |p| p.line());
        let mut warnings = Vec::new();
        match parse_row(&row, &mut warnings) {
            Ok(rec) => out.records.push(rec),
            Err(message) => out.issues.push(RowIssue { line, severity: Severity::Error, message }),
        }
        out.issues.extend(warnings.into_iter().map(|message| RowIssue {
            line,
            severity: Severity::Warning,
            message,
        }));
    }
    if rows == 0 {
        return Err(IngestError::NoRows);
    }
    Ok(out)
}

pub fn read_dataset(path: &Path) -> Result<ParsedDataset, IngestError> {
    let f = std::fs::File::open(path).map_err(|e| IngestError::io(path, e))?;
    parse_dataset(std::io::BufReader::new(f))
}

/// Writes records in the input schema. Continents are derived data and are not written.
pub fn write_dataset(out: impl Write, records: &[ParticipantRecord]) -> Result<(), IngestError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for r in records {
        let year = r.year.to_string();
        let affiliations = r.affiliations.join(";");
        w.write_record([
            r.conference.as_str(),
            year.as_str(),
            r.role.as_str(),
            r.given_name.as_str(),
            r.family_name.as_str(),
            affiliations.as_str(),
            r.country.as_ref().map_or("", |c| c.as_str()),
            r.sector.map_or("", SectorLabel::as_str),
            if r.gender.is_known() { r.gender.as_str() } else { "" },
            r.paper_id.as_deref().unwrap_or(""),
        ])?;
    }
    w.flush().map_err(|e| IngestError::Invalid(e.to_string()))?;
    Ok(())
}
