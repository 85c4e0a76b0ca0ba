//! Rendering of index reports and CDI time series.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::aggregate::IndexReport;
use crate::cohort::{Dimension, PerRole, Role};

/// A way of rendering a batch of reports.
pub trait ReportFormat: Send + Sync {
    fn name(&self) -> &'static str;

    fn render(&self, reports: &[IndexReport]) -> String;
}

/// Full-precision JSON array of reports.
pub struct JsonFormat;

impl ReportFormat for JsonFormat {
    fn name(&self) -> &'static str {
        "json"
    }

    fn render(&self, reports: &[IndexReport]) -> String {
        let mut s = serde_json::to_string_pretty(reports).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// Plain-text tables laid out like the published gender, geography, business
/// and summary tables. Indices are printed with two decimals.
pub struct TableFormat;

fn share(report: &IndexReport, dim: Dimension, role: Role, label: &str) -> f64 {
    let Some(per_role) = report.distributions.get(&dim) else { return 0.0 };
    let tally = per_role.get(role);
    let total: u64 = tally.values().sum();
    if total == 0 {
        0.0
    } else {
        100.0 * *tally.get(label).unwrap_or(&0) as f64 / total as f64
    }
}

const AKO: [Role; 3] = [Role::Author, Role::Keynote, Role::Organiser];

fn edition_label(r: &IndexReport) -> String {
    format!("{} {}", r.conference, r.year)
}

impl ReportFormat for TableFormat {
    fn name(&self) -> &'static str {
        "table"
    }

    fn render(&self, reports: &[IndexReport]) -> String {
        let w = reports.iter().map(|r| edition_label(r).len()).max().unwrap_or(10).max(10);
        let mut s = String::new();

        let _ = writeln!(s, "Gender Diversity Index (GDI)");
        let _ = writeln!(s, "{:w$}  {:^23}  {:^23}  {:>5}", "Conference", "%Female", "%Male", "GDI");
        let _ = writeln!(s, "{:w$}  {:>7}{:>8}{:>8}  {:>7}{:>8}{:>8}", "", "Auth", "Key", "Org", "Auth", "Key", "Org");
        for r in reports {
            let _ = write!(s, "{:w$}  ", edition_label(r));
            for label in ["female", "male"] {
                for role in AKO {
                    let _ = write!(s, "{:>7.2} ", share(r, Dimension::Gender, role, label));
                }
                s.push(' ');
            }
            let _ = writeln!(s, "{:>5.2}", r.gdi);
        }

        let norm = reports.first().map_or(3.5, |r| r.settings.geodi_norm);
        let geo_head = format!("GeoDI/{norm}");
        let _ = writeln!(s, "\nGeographical Diversity Index (GeoDI)");
        let _ = writeln!(
            s,
            "{:w$}  {:^17}  {:^17}  {:>10}  {:>16}  {:>3}",
            "Conference", "#Countries", "#Continents", geo_head, "GeoDI_continents", "LDC"
        );
        let _ = writeln!(s, "{:w$}  {:>5}{:>6}{:>6}  {:>5}{:>6}{:>6}", "", "Auth", "Key", "Org", "Auth", "Key", "Org");
        for r in reports {
            let d = &r.diagnostics;
            let _ = writeln!(
                s,
                "{:w$}  {:>5}{:>6}{:>6}   {:>5}{:>6}{:>6}   {:>10.2}  {:>16.2}  {:>3}",
                edition_label(r),
                d.country_counts.author,
                d.country_counts.keynote,
                d.country_counts.organiser,
                d.continent_counts.author,
                d.continent_counts.keynote,
                d.continent_counts.organiser,
                r.geodi_normalized,
                r.geodi_continents,
                if d.ldc.represented { "yes" } else { "no" },
            );
        }

        let _ = writeln!(s, "\nBusiness Diversity Index (BDI)");
        let _ = writeln!(
            s,
            "{:w$}  {:^23}  {:^23}  {:^23}  {:>5}",
            "Conference", "%Academia", "%Industry", "%Research Centre", "BDI"
        );
        let _ = writeln!(
            s,
            "{:w$}  {:>7}{:>8}{:>8}  {:>7}{:>8}{:>8}  {:>7}{:>8}{:>8}",
            "", "Auth", "Key", "Org", "Auth", "Key", "Org", "Auth", "Key", "Org"
        );
        for r in reports {
            let _ = write!(s, "{:w$}  ", edition_label(r));
            for label in ["academia", "industry", "research_centre"] {
                for role in AKO {
                    let _ = write!(s, "{:>7.2} ", share(r, Dimension::Sector, role, label));
                }
                s.push(' ');
            }
            let _ = writeln!(s, "{:>5.2}", r.bdi);
        }

        let extras: BTreeSet<&String> = reports.iter().flat_map(|r| r.extra.keys()).collect();
        let _ = writeln!(s, "\nConference Diversity Index (CDI)");
        let _ = write!(s, "{:w$}  {:>5}  {:>10}  {:>5}  {:>5}", "Conference", "GDI", geo_head, "BDI", "CDI");
        for e in &extras {
            let _ = write!(s, "  {:>14}", format!("GeoDI[{e}]"));
        }
        s.push('\n');
        for r in reports {
            let _ = write!(
                s,
                "{:w$}  {:>5.2}  {:>10.2}  {:>5.2}  {:>5.2}",
                edition_label(r),
                r.gdi,
                r.geodi_normalized,
                r.bdi,
                r.cdi
            );
            for e in &extras {
                match r.extra.get(*e) {
                    Some(v) => {
                        let _ = write!(s, "  {:>14.2}", v.value);
                    }
                    None => {
                        let _ = write!(s, "  {:>14}", "-");
                    }
                }
            }
            s.push('\n');
        }
        s
    }
}

/// One row per edition with every index and per-community value.
pub struct CsvFormat;

fn per_role_cols(prefix: &str, v: &PerRole<f64>, head: &mut Vec<String>, row: &mut Vec<String>) {
    for (role, x) in v.iter() {
        head.push(format!("{prefix}_{role}"));
        row.push(x.to_string());
    }
}

impl ReportFormat for CsvFormat {
    fn name(&self) -> &'static str {
        "csv"
    }

    fn render(&self, reports: &[IndexReport]) -> String {
        let extras: BTreeSet<String> = reports.iter().flat_map(|r| r.extra.keys().cloned()).collect();
        let mut w = csv::Writer::from_writer(Vec::new());
        for (i, r) in reports.iter().enumerate() {
            let mut head: Vec<String> = Vec::new();
            let mut row: Vec<String> = Vec::new();
            let mut put = |h: &str, v: String| {
                head.push(h.to_string());
                row.push(v);
            };
            put("conference", r.conference.clone());
            put("year", r.year.to_string());
            put("gdi", r.gdi.to_string());
            put("gdi_shannon", r.gdi_shannon.map(|v| v.to_string()).unwrap_or_default());
            put("geodi", r.geodi.to_string());
            put("geodi_normalized", r.geodi_normalized.to_string());
            put("geodi_continents", r.geodi_continents.to_string());
            put("bdi", r.bdi.to_string());
            put("cdi", r.cdi.to_string());
            let c = &r.communities;
            per_role_cols("gender_pielou", &c.gender_pielou, &mut head, &mut row);
            per_role_cols("country_shannon", &c.country_shannon, &mut head, &mut row);
            per_role_cols("continent_pielou", &c.continent_pielou, &mut head, &mut row);
            per_role_cols("sector_pielou", &c.sector_pielou, &mut head, &mut row);
            for e in &extras {
                head.push(format!("geo_{e}"));
                row.push(r.extra.get(e).map(|v| v.value.to_string()).unwrap_or_default());
            }
            head.push("ldc_represented".into());
            row.push(r.diagnostics.ldc.represented.to_string());
            if i == 0 {
                w.write_record(&head).expect("in-memory write");
            }
            w.write_record(&row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }
}

/// Output formats selectable by name.
pub struct FormatRegistry {
    formats: BTreeMap<&'static str, Box<dyn ReportFormat>>,
}

impl FormatRegistry {
    pub fn empty() -> Self {
        Self { formats: BTreeMap::new() }
    }

    pub fn standard() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(JsonFormat));
        r.register(Box::new(TableFormat));
        r.register(Box::new(CsvFormat));
        r
    }

    pub fn register(&mut self, format: Box<dyn ReportFormat>) {
        self.formats.insert(format.name(), format);
    }

    pub fn get(&self, name: &str) -> Option<&dyn ReportFormat> {
        self.formats.get(name).map(|f| f.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.formats.keys().copied().collect()
    }
}

impl Default for FormatRegistry {
    fn default() -> Self {
        Self::standard()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesRow {
    pub conference: String,
    pub year: i32,
    pub cdi: f64,
}

/// CDI rows for the requested conferences (all when `filter` is empty),
/// sorted by conference then year. Conference names compare case-insensitively.
pub fn cdi_series(reports: &[IndexReport], filter: &[String]) -> Result<Vec<SeriesRow>, String> {
    let known: BTreeSet<String> = reports.iter().map(|r| r.conference.to_lowercase()).collect();
    if let Some(missing) = filter.iter().find(|f| !known.contains(&f.to_lowercase())) {
        return Err(format!("unknown conference `{missing}`"));
    }
    let wanted: BTreeSet<String> = filter.iter().map(|f| f.to_lowercase()).collect();
    let mut rows: Vec<SeriesRow> = reports
        .iter()
        .filter(|r| wanted.is_empty() || wanted.contains(&r.conference.to_lowercase()))
        .map(|r| SeriesRow { conference: r.conference.clone(), year: r.year, cdi: r.cdi })
        .collect();
    rows.sort_by(|a, b| a.conference.cmp(&b.conference).then(a.year.cmp(&b.year)));
    if rows.is_empty() {
        return Err("no editions match the conference filter".into());
    }
    Ok(rows)
}

pub fn series_csv(rows: &[SeriesRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

/// Standalone SVG line chart: one polyline per conference, y axis fixed to
/// [0, 1], dashed reference line at 0.5.
pub fn cdi_chart_svg(rows: &[SeriesRow]) -> String {
    let (width, height) = (640.0, 400.0);
    let (left, right, top, bottom) = (60.0, 150.0, 30.0, 50.0);
    let plot_w = width - left - right;
    let plot_h = height - top - bottom;

    let years: Vec<i32> = rows.iter().map(|r| r.year).collect();
    let (y0, y1) = (
        years.iter().copied().min().unwrap_or(0),
        years.iter().copied().max().unwrap_or(0),
    );
    let x_of = |year: i32| {
        if y1 == y0 {
            left + plot_w / 2.0
        } else {
            left + plot_w * f64::from(year - y0) / f64::from(y1 - y0)
        }
    };
    let y_of = |v: f64| top + plot_h * (1.0 - v.clamp(0.0, 1.0));

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="18" text-anchor="middle" font-size="14">Conference Diversity Index (CDI)</text>"#,
        left + plot_w / 2.0
    );
    for tick in 0..=10 {
        let v = f64::from(tick) / 10.0;
        let y = y_of(v);
        let _ = writeln!(s, r##"<line x1="{left}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#eeeeee"/>"##, left + plot_w);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{v:.1}</text>"#, left - 6.0, y + 4.0);
    }
    for year in y0..=y1 {
        let x = x_of(year);
        let _ = writeln!(
            s,
            r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{year}</text>"#,
            top + plot_h + 18.0
        );
    }
    let _ = writeln!(
        s,
        r##"<rect x="{left}" y="{top}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#333333"/>"##
    );
    let mid = y_of(0.5);
    let _ = writeln!(
        s,
        r##"<line x1="{left}" y1="{mid:.1}" x2="{:.1}" y2="{mid:.1}" stroke="#777777" stroke-dasharray="6,4"/>"##,
        left + plot_w
    );

    let mut by_conf: BTreeMap<&str, Vec<&SeriesRow>> = BTreeMap::new();
    for r in rows {
        by_conf.entry(r.conference.as_str()).or_default().push(r);
    }
    for (i, (conf, pts)) in by_conf.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let points: Vec<String> = pts.iter().map(|p| format!("{:.1},{:.1}", x_of(p.year), y_of(p.cdi))).collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            points.join(" ")
        );
        for p in pts {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{color}"/>"#,
                x_of(p.year),
                y_of(p.cdi)
            );
        }
        let ly = top + 14.0 + 18.0 * i as f64;
        let lx = left + plot_w + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}">{}</text>"#, lx + 26.0, ly + 4.0, xml_escape(conf));
    }
    s.push_str("</svg>\n");
    s
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}
