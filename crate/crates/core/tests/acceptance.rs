//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use divindex::aggregate::{bdi, cdi, gdi, ReportConfig, WeightVector};
use divindex::cohort::{Dimension, Role};
use divindex::dataset::{parse_dataset, read_dataset, write_dataset};
use divindex::distribution::CategoryDistribution;
use divindex::output::FormatRegistry;
use divindex::pipeline::{compute_all, enrich, load_inputs, Resources};
use divindex::{simpson_index, CommunityBreakdown, IndexReport};

use common::{edition_fixtures, fixture, runner, PROPERTIES};

struct Outcome {
    id: &'static str,
    title: &'static str,
    failures: Vec<String>,
    details: Vec<String>,
    /// Always printed.
    notes: Vec<String>,
    elapsed: Duration,
    budget: Option<Duration>,
}

impl Outcome {
    fn new(id: &'static str, title: &'static str, budget: Option<Duration>) -> Self {
        Self { id, title, failures: Vec::new(), details: Vec::new(), notes: Vec::new(), elapsed: Duration::ZERO, budget }
    }

    fn check(&mut self, ok: bool, what: String) {
        if ok {
            self.details.push(what);
        } else {
            self.failures.push(what);
        }
    }

    fn near(&mut self, label: &str, got: f64, want: f64, tol: f64) {
        self.check((got - want).abs() <= tol, format!("{label}: {got:.6} vs {want} ± {tol}"));
    }

    fn passed(&self) -> bool {
        self.failures.is_empty() && self.budget.map_or(true, |b| self.elapsed < b)
    }
}

/// Published gender percentages: (%female, %male) for authors, keynotes, organisers.
const GENDER: [(&str, [(f64, f64); 3]); 12] = [
    ("NeurIPS 2020", [(20.01, 79.09), (42.90, 57.10), (47.10, 52.90)]),
    ("NeurIPS 2019", [(16.60, 83.40), (42.90, 57.10), (51.90, 48.10)]),
    ("NeurIPS 2018", [(7.10, 92.90), (42.90, 57.10), (20.90, 79.10)]),
    ("NeurIPS 2017", [(9.45, 90.05), (42.90, 57.10), (21.30, 78.70)]),
    ("RecSys 2020", [(8.46, 91.50), (33.30, 66.70), (23.70, 76.30)]),
    ("RecSys 2019", [(12.70, 87.30), (100.0, 0.0), (23.10, 76.90)]),
    ("RecSys 2018", [(14.30, 85.70), (66.70, 33.30), (30.40, 69.60)]),
    ("RecSys 2017", [(15.30, 84.70), (0.0, 100.0), (13.60, 86.40)]),
    ("ICML 2020", [(15.50, 84.50), (33.30, 66.70), (37.90, 62.10)]),
    ("ICML 2019", [(11.40, 88.60), (66.70, 33.30), (38.10, 61.90)]),
    ("ICML 2018", [(9.80, 90.20), (50.00, 50.00), (28.90, 71.10)]),
    ("ICML 2017", [(7.70, 92.30), (50.00, 50.00), (29.40, 70.60)]),
];

/// Hand-arithmetic GDI from the rows above, equal weights, renormalized rows.
const GDI_ORACLE: [f64; 12] = [
    0.902908, 0.877612, 0.698206, 0.728481, 0.708759, 0.442968, 0.798710, 0.396988, 0.832502, 0.796191,
    0.776683, 0.755117,
];

const GDI_PRINTED: [f64; 12] = [0.90, 0.89, 0.70, 0.73, 0.69, 0.42, 0.80, 0.35, 0.84, 0.63, 0.78, 0.76];

/// Published sector percentages: (academia, industry, research centre) for authors, keynotes, organisers.
const SECTOR: [(&str, [(f64, f64, f64); 3]); 12] = [
    ("NeurIPS 2020", [(52.60, 31.70, 15.70), (57.10, 14.30, 28.60), (41.20, 47.10, 11.80)]),
    ("NeurIPS 2019", [(49.10, 39.50, 11.40), (85.70, 14.30, 0.0), (44.40, 40.07, 14.80)]),
    ("NeurIPS 2018", [(72.30, 9.22, 18.40), (57.10, 42.90, 0.0), (59.70, 31.30, 8.96)]),
    ("NeurIPS 2017", [(73.10, 22.20, 4.73), (57.10, 42.90, 0.0), (63.90, 29.50, 6.56)]),
    ("RecSys 2020", [(69.00, 27.60, 3.40), (66.70, 33.30, 0.0), (78.90, 18.40, 2.60)]),
    ("RecSys 2019", [(40.00, 55.40, 4.62), (100.0, 0.0, 0.0), (69.20, 23.10, 7.69)]),
    ("RecSys 2018", [(23.80, 47.60, 28.60), (33.30, 66.70, 0.0), (56.50, 39.10, 4.35)]),
    ("RecSys 2017", [(70.80, 28.30, 0.89), (50.00, 50.00, 0.0), (81.80, 13.60, 4.55)]),
    ("ICML 2020", [(48.70, 39.20, 12.10), (66.70, 33.30, 0.0), (58.60, 20.70, 20.70)]),
    ("ICML 2019", [(43.10, 42.50, 14.40), (66.70, 33.30, 0.0), (76.20, 19.00, 4.76)]),
    ("ICML 2018", [(66.70, 27.10, 6.19), (100.0, 0.0, 0.0), (77.80, 17.80, 4.44)]),
    ("ICML 2017", [(51.80, 34.20, 14.00), (50.00, 25.00, 25.00), (88.20, 11.80, 0.0)]),
];

const BDI_ORACLE: [f64; 12] = [
    0.886285, 0.723306, 0.708845, 0.672232, 0.593337, 0.493442, 0.763179, 0.580398, 0.781159, 0.700647,
    0.436032, 0.723815,
];

/// Published index values: GDI, GeoDI/3.5, BDI.
const PUBLISHED: [(&str, f64, f64, f64); 12] = [
    ("NeurIPS 2020", 0.90, 0.50, 0.89),
    ("NeurIPS 2019", 0.89, 0.19, 0.72),
    ("NeurIPS 2018", 0.70, 0.36, 0.71),
    ("NeurIPS 2017", 0.73, 0.36, 0.67),
    ("RecSys 2020", 0.69, 0.48, 0.59),
    ("RecSys 2019", 0.42, 0.36, 0.49),
    ("RecSys 2018", 0.80, 0.42, 0.78),
    ("RecSys 2017", 0.35, 0.37, 0.58),
    ("ICML 2020", 0.84, 0.33, 0.68),
    ("ICML 2019", 0.63, 0.30, 0.70),
    ("ICML 2018", 0.78, 0.34, 0.44),
    ("ICML 2017", 0.76, 0.41, 0.72),
];

fn gender_breakdown(rows: &[(f64, f64); 3]) -> CommunityBreakdown {
    let d = |(f, m): (f64, f64)| CategoryDistribution::from_percentages([("female", f), ("male", m)]).unwrap();
    CommunityBreakdown::new(Dimension::Gender, d(rows[1]), d(rows[0]), d(rows[2]))
}

fn sector_breakdown(rows: &[(f64, f64, f64); 3]) -> CommunityBreakdown {
    let d = |(a, i, r): (f64, f64, f64)| {
        CategoryDistribution::from_percentages([("academia", a), ("industry", i), ("research_centre", r)]).unwrap()
    };
    CommunityBreakdown::new(Dimension::Sector, d(rows[1]), d(rows[0]), d(rows[2]))
}

fn index_of(name: &str) -> usize {
    GENDER.iter().position(|(n, _)| *n == name).unwrap()
}

fn gdi_reproduction() -> Outcome {
    let mut o = Outcome::new("1", "GDI reproduction from printed gender percentages", Some(Duration::from_secs(1)));
    let start = Instant::now();
    let w = WeightVector::equal();
    let results: Vec<_> = GENDER.iter().map(|(_, rows)| gdi(&gender_breakdown(rows), &w, 2).unwrap()).collect();
    o.elapsed = start.elapsed();

    for (i, (name, _)) in GENDER.iter().enumerate() {
        o.near(&format!("{name} vs oracle"), results[i].value, GDI_ORACLE[i], 1e-6);
    }
    for (name, want, tol) in [("NeurIPS 2020", 0.90, 0.01), ("NeurIPS 2019", 0.89, 0.015), ("NeurIPS 2018", 0.70, 0.015), ("ICML 2020", 0.84, 0.015)] {
        o.near(&format!("{name} vs printed"), results[index_of(name)].value, want, tol);
    }
    for name in ["RecSys 2019", "RecSys 2017"] {
        let jk = results[index_of(name)].per_community.keynote;
        o.check(jk == 0.0, format!("{name} keynote J' = {jk} (must be exactly 0)"));
    }
    for name in ["RecSys 2017", "RecSys 2019"] {
        let i = index_of(name);
        o.notes.push(format!(
            "{name}: computed {:.4}, printed {:.2}, delta {:+.4} (documented deviation)",
            results[i].value,
            GDI_PRINTED[i],
            results[i].value - GDI_PRINTED[i]
        ));
    }
    o
}

fn bdi_reproduction() -> Outcome {
    let mut o = Outcome::new("2", "BDI reproduction from printed sector percentages", Some(Duration::from_secs(1)));
    let start = Instant::now();
    let w = WeightVector::equal();
    let results: Vec<_> = SECTOR.iter().map(|(_, rows)| bdi(&sector_breakdown(rows), &w).unwrap()).collect();
    o.elapsed = start.elapsed();

    for (i, (name, _)) in SECTOR.iter().enumerate() {
        o.near(&format!("{name} vs oracle"), results[i].value, BDI_ORACLE[i], 1e-6);
    }
    o.near("NeurIPS 2017 vs printed", results[index_of("NeurIPS 2017")].value, 0.67, 0.01);
    o.near("NeurIPS 2020 vs printed", results[index_of("NeurIPS 2020")].value, 0.89, 0.015);
    let jk = results[index_of("ICML 2018")].per_community.keynote;
    o.check(jk == 0.0, format!("ICML 2018 keynote J' = {jk} (must be exactly 0)"));
    o
}

fn cdi_arithmetic() -> Outcome {
    let mut o = Outcome::new("3", "CDI from published index values", None);
    for (name, g, geo_n, b) in PUBLISHED {
        let c = cdi(g, geo_n * 3.5, b).unwrap();
        o.check((0.0..=1.0).contains(&c), format!("{name}: cdi {c:.4} in [0, 1]"));
        if name == "NeurIPS 2020" {
            o.near("NeurIPS 2020", c, 0.7633, 1e-3);
        }
    }
    o
}

/// Probability that two individuals drawn without replacement share a category,
/// by listing every ordered pair.
fn brute_force_same(counts: &[u64]) -> f64 {
    let people: Vec<usize> =
        counts.iter().enumerate().flat_map(|(i, &n)| std::iter::repeat(i).take(n as usize)).collect();
    let (mut same, mut all) = (0u64, 0u64);
    for a in 0..people.len() {
        for b in 0..people.len() {
            if a != b {
                all += 1;
                same += u64::from(people[a] == people[b]);
            }
        }
    }
    same as f64 / all as f64
}

fn simpson_oracle() -> Outcome {
    let mut o = Outcome::new("4", "Simpson D equals exhaustive pair-drawing probability", Some(Duration::from_secs(5)));
    let start = Instant::now();
    let mut checked = 0usize;
    let mut worst = 0.0f64;
    for cats in 1..=3usize {
        for total in 2..=8u64 {
            // every composition of `total` into `cats` non-negative parts
            let mut parts = vec![0u64; cats];
            loop {
                let rest: u64 = parts[..cats - 1].iter().sum();
                if rest <= total {
                    parts[cats - 1] = total - rest;
                    let d = simpson_index(&common::counts(&parts)).unwrap().dominance;
                    let err = (d - brute_force_same(&parts)).abs();
                    worst = worst.max(err);
                    o.check(err <= 1e-12, format!("{parts:?}: D = {d}, brute force differs by {err:e}"));
                    checked += 1;
                }
                // odometer over the free parts
                let mut i = 0;
                while i + 1 < cats {
                    parts[i] += 1;
                    if parts[i] <= total {
                        break;
                    }
                    parts[i] = 0;
                    i += 1;
                }
                if i + 1 >= cats {
                    break;
                }
            }
        }
    }
    o.elapsed = start.elapsed();
    o.notes.push(format!("{checked} distributions, max error {worst:e}"));
    o
}

fn property_suite() -> Outcome {
    let mut o = Outcome::new("5", "randomized property suite, 10^4 cases each", Some(Duration::from_secs(30)));
    let start = Instant::now();
    for (name, prop) in PROPERTIES {
        let mut r = runner(10_000);
        match prop(&mut r) {
            Ok(()) => o.details.push(format!("{name}: ok")),
            Err(e) => o.failures.push(format!("{name}: {e}")),
        }
    }
    o.elapsed = start.elapsed();
    o
}

fn run_fixture_pipeline(paths: &[std::path::PathBuf]) -> Vec<IndexReport> {
    let resources = Resources::default();
    let mut loaded = load_inputs(paths).unwrap();
    enrich(&mut loaded.records, &resources, "offline", false).unwrap();
    compute_all(loaded.records, &ReportConfig::default(), None, &resources.geo).unwrap()
}

fn determinism() -> Outcome {
    let mut o = Outcome::new("6", "pipeline determinism and lossless round-trip", None);
    let json = FormatRegistry::standard();
    let json = json.get("json").unwrap();
    let path = vec![fixture("neurips_2020.csv")];
    let first = json.render(&run_fixture_pipeline(&path));
    let second = json.render(&run_fixture_pipeline(&path));
    o.check(first == second, format!("NeurIPS 2020 fixture: two runs byte-identical ({} bytes)", first.len()));

    for p in edition_fixtures().iter().chain([fixture("clean.csv")].iter()) {
        let parsed = read_dataset(p).unwrap();
        let mut buf = Vec::new();
        write_dataset(&mut buf, &parsed.records).unwrap();
        let again = parse_dataset(buf.as_slice()).unwrap();
        let name = p.file_name().unwrap().to_string_lossy();
        o.check(again.records == parsed.records && again.issues.is_empty(), format!("{name}: round-trip lossless"));
    }
    o
}

fn geography() -> Outcome {
    let mut o = Outcome::new("7", "geography on the 12 fixture editions", None);
    let reports = run_fixture_pipeline(&edition_fixtures());
    o.check(reports.len() == 12, format!("{} editions", reports.len()));
    let mut single = 0;
    for r in &reports {
        let name = format!("{} {}", r.conference, r.year);
        o.check((0.0..=1.0).contains(&r.geodi_continents), format!("{name}: geodi_continents {:.4}", r.geodi_continents));
        if r.diagnostics.continent_counts.keynote == 1 {
            single += 1;
            let v = r.communities.continent_pielou.keynote;
            o.check(v == 0.0, format!("{name}: single-continent keynotes contribute {v}"));
        }
        for role in Role::ALL {
            let ldc = r.diagnostics.ldc.countries.get(role);
            o.check(ldc.is_empty(), format!("{name} {role}: LDC countries {ldc:?}"));
        }
        o.check(!r.diagnostics.ldc.represented, format!("{name}: LDC report empty"));
    }
    o.check(single > 0, format!("{single} edition(s) with single-continent keynotes"));
    o
}

fn main() {
    let verbose = std::env::args().any(|a| a == "--verbose" || a == "--nocapture");
    let outcomes = [gdi_reproduction(), bdi_reproduction(), cdi_arithmetic(), simpson_oracle(), property_suite(), determinism(), geography()];
    let mut failed = 0;
    for o in &outcomes {
        let status = if o.passed() { "PASS" } else { "FAIL" };
        let timing = match o.budget {
            Some(b) => format!(" [{:.3}s, budget {}s]", o.elapsed.as_secs_f64(), b.as_secs()),
            None => String::new(),
        };
        println!("{status} criterion {}: {} ({} checks){timing}", o.id, o.title, o.details.len() + o.failures.len());
        for n in &o.notes {
            println!("    note: {n}");
        }
        for f in &o.failures {
            println!("    failed: {f}");
        }
        if verbose {
            for d in &o.details {
                println!("    ok: {d}");
            }
        }
        if !o.passed() {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
