use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use divindex::aggregate::{ReportConfig, WeightVector, GEODI_NORM, GENDER_RICHNESS};
use divindex::cohort::{BreakdownOptions, DuplicatePolicy, UnknownPolicy};
use divindex::dataset::write_dataset;
use divindex::gender::{ProviderSettings, DEFAULT_BAND};
use divindex::output::{cdi_chart_svg, cdi_series, series_csv, FormatRegistry};
use divindex::pipeline::{compute_all, enrich, load_inputs, validate, DataPaths, Loaded, PipelineError, Resources, Sampling};

#[derive(Parser)]
#[command(name = "divindex", version, about = "Diversity indices for conference participant lists")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one report per (conference, year).
    Compute {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        report: ReportArgs,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// CDI time series as `conference,year,cdi` rows.
    Series {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        report: ReportArgs,
        /// Restrict to these conferences (repeatable).
        #[arg(long = "conference")]
        conferences: Vec<String>,
        /// Also write an SVG line chart.
        #[arg(long)]
        chart: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse and dry-run enrichment; exit 2 on any rejected row.
    Validate {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Fill continent, sector and gender columns and write the enriched CSV.
    Enrich {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write unresolved affiliations as an overrides template.
        #[arg(long)]
        unresolved: Option<PathBuf>,
    },
}

#[derive(Args)]
struct InputArgs {
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = Provider::Offline)]
    provider: Provider,
    /// Re-infer gender even for pre-labeled records.
    #[arg(long)]
    overwrite_gender: bool,
    /// Skip rejected rows instead of failing.
    #[arg(long)]
    lenient: bool,
    /// Sector overrides, `affiliation,sector`.
    #[arg(long)]
    overrides: Option<PathBuf>,
    /// Sector rules, `keyword,sector`, first match wins.
    #[arg(long)]
    sector_rules: Option<PathBuf>,
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    continents: Option<PathBuf>,
    #[arg(long)]
    ldc: Option<PathBuf>,
    /// Label a name only when one gender's share reaches this value.
    #[arg(long, default_value_t = DEFAULT_BAND)]
    ambiguity_band: f64,
    #[arg(long)]
    gender_cache: Option<PathBuf>,
    #[arg(long)]
    gender_endpoint: Option<String>,
    /// Seconds.
    #[arg(long, default_value_t = 5.0)]
    gender_timeout: f64,
    #[arg(long, default_value_t = 4)]
    max_in_flight: usize,
}

#[derive(Args)]
struct ReportArgs {
    /// Community weights `keynote,author,organiser`.
    #[arg(long, value_parser = parse_weights)]
    weights: Option<WeightVector>,
    #[arg(long, default_value_t = GEODI_NORM)]
    geodi_norm: f64,
    #[arg(long, default_value_t = GENDER_RICHNESS)]
    gender_s: usize,
    #[arg(long, value_enum, default_value_t = Unknown::Exclude)]
    unknown: Unknown,
    #[arg(long, value_enum, default_value_t = Duplicates::Once)]
    duplicates: Duplicates,
    /// Fraction of papers whose authors are kept.
    #[arg(long, requires = "seed")]
    sample: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Also report the Simpson-complement geography indicator.
    #[arg(long)]
    simpson_geodi: bool,
    /// Extra geography measures by registry name, e.g. `pielou:7`.
    #[arg(long = "geo-measure")]
    geo_measures: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Provider {
    Offline,
    External,
    Passthrough,
}

#[derive(Clone, Copy, ValueEnum)]
enum Unknown {
    Exclude,
    Category,
}

#[derive(Clone, Copy, ValueEnum)]
enum Duplicates {
    Once,
    Keep,
}

fn parse_weights(s: &str) -> Result<WeightVector, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad weight `{p}`")))
        .collect::<Result<_, _>>()?;
    let [k, a, o] = parts[..] else {
        return Err("expected three weights k,a,o".into());
    };
    WeightVector::new(k, a, o).map_err(|e| e.to_string())
}

fn value_name<T: ValueEnum>(v: T) -> String {
    v.to_possible_value().expect("no skipped variants").get_name().to_string()
}

impl InputArgs {
    fn resources(&self) -> Result<Resources, PipelineError> {
        if !(0.5..=1.0).contains(&self.ambiguity_band) {
            return Err(PipelineError::Config("--ambiguity-band must be in [0.5, 1]".into()));
        }
        if !(self.gender_timeout.is_finite() && self.gender_timeout > 0.0) {
            return Err(PipelineError::Config("--gender-timeout must be positive".into()));
        }
        let mut settings = ProviderSettings { band: self.ambiguity_band, ..Default::default() };
        settings.external.band = self.ambiguity_band;
        settings.external.timeout = Duration::from_secs_f64(self.gender_timeout);
        settings.external.max_in_flight = self.max_in_flight.max(1);
        settings.external.cache_path = self.gender_cache.clone();
        if let Some(e) = &self.gender_endpoint {
            settings.external.endpoint = e.clone();
        }
        let paths = DataPaths {
            continents: self.continents.clone(),
            ldc: self.ldc.clone(),
            lexicon: self.lexicon.clone(),
            sector_rules: self.sector_rules.clone(),
            overrides: self.overrides.clone(),
        };
        Resources::load(&paths, settings)
    }

    fn provider(&self) -> String {
        value_name(self.provider)
    }

    /// Loads and enriches; rejected rows fail the run unless `--lenient`.
    fn load(&self, resources: &Resources) -> Result<Loaded, PipelineError> {
        let mut loaded = load_inputs(&self.inputs)?;
        for i in &loaded.issues {
            eprintln!("{}: {}", i.path.display(), i.issue);
        }
        let rejected = loaded.rejected();
        if rejected > 0 && !self.lenient {
            return Err(PipelineError::Validation(format!(
                "{rejected} row(s) rejected; fix them or pass --lenient"
            )));
        }
        let summary = enrich(&mut loaded.records, resources, &self.provider(), self.overwrite_gender)?;
        for w in &summary.gender.warnings {
            eprintln!("warning: {w}");
        }
        for u in &summary.geography.unmapped {
            eprintln!("warning: unmapped country {}", u.country);
        }
        Ok(loaded)
    }
}

impl ReportArgs {
    fn config(&self) -> Result<(ReportConfig, Option<Sampling>), PipelineError> {
        if !(self.geodi_norm.is_finite() && self.geodi_norm > 0.0) {
            return Err(PipelineError::Config("--geodi-norm must be positive".into()));
        }
        if self.gender_s < 1 {
            return Err(PipelineError::Config("--gender-s must be at least 1".into()));
        }
        let sampling = match (self.sample, self.seed) {
            (Some(fraction), Some(seed)) => {
                if !(fraction > 0.0 && fraction <= 1.0) {
                    return Err(PipelineError::Config("--sample must be in (0, 1]".into()));
                }
                Some(Sampling { fraction, seed })
            }
            _ => None,
        };
        let mut extra = self.geo_measures.clone();
        if self.simpson_geodi && !extra.iter().any(|m| m == "simpson") {
            extra.insert(0, "simpson".into());
        }
        let config = ReportConfig {
            weights: self.weights.unwrap_or_default(),
            geodi_norm: self.geodi_norm,
            gender_s: self.gender_s,
            breakdown: BreakdownOptions {
                unknown: match self.unknown {
                    Unknown::Exclude => UnknownPolicy::Exclude,
                    Unknown::Category => UnknownPolicy::AsCategory,
                },
                duplicates: match self.duplicates {
                    Duplicates::Once => DuplicatePolicy::OncePerRole,
                    Duplicates::Keep => DuplicatePolicy::Keep,
                },
            },
            extra_geo_measures: extra,
        };
        Ok((config, sampling))
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), PipelineError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| PipelineError::Config(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| PipelineError::Config(format!("stdout: {e}")))
        }
    }
}

fn run(cli: Cli) -> Result<i32, PipelineError> {
    match cli.command {
        Command::Compute { input, report, format, out } => {
            let (config, sampling) = report.config()?;
            let resources = input.resources()?;
            let loaded = input.load(&resources)?;
            let reports = compute_all(loaded.records, &config, sampling, &resources.geo)?;
            let formats = FormatRegistry::standard();
            let fmt = formats
                .get(&value_name(format))
                .ok_or_else(|| PipelineError::Config("unknown format".into()))?;
            write_out(out.as_deref(), &fmt.render(&reports))?;
            Ok(0)
        }
        Command::Series { input, report, conferences, chart, out } => {
            let (config, sampling) = report.config()?;
            let resources = input.resources()?;
            let loaded = input.load(&resources)?;
            let reports = compute_all(loaded.records, &config, sampling, &resources.geo)?;
            let rows = cdi_series(&reports, &conferences).map_err(PipelineError::Validation)?;
            if let Some(path) = &chart {
                fs::write(path, cdi_chart_svg(&rows))
                    .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
            }
            write_out(out.as_deref(), &series_csv(&rows))?;
            Ok(0)
        }
        Command::Validate { input } => {
            let resources = input.resources()?;
            let (report, issues) = validate(&input.inputs, &resources, &input.provider())?;
            for i in issues.iter().filter(|i| i.issue.severity == divindex::dataset::Severity::Error) {
                println!("{}: {}", i.path.display(), i.issue);
            }
            for w in &report.warnings {
                println!("warning: {w}");
            }
            println!(
                "{} record(s), {} rejected row(s), {} warning(s), {} unknown gender(s)",
                report.records,
                report.rejected_rows,
                report.warnings.len(),
                report.unknown_genders
            );
            Ok(if report.is_clean() { 0 } else { 2 })
        }
        Command::Enrich { input, out, unresolved } => {
            let resources = input.resources()?;
            let mut loaded = load_inputs(&input.inputs)?;
            for i in &loaded.issues {
                eprintln!("{}: {}", i.path.display(), i.issue);
            }
            if loaded.rejected() > 0 && !input.lenient {
                return Err(PipelineError::Validation(format!(
                    "{} row(s) rejected; fix them or pass --lenient",
                    loaded.rejected()
                )));
            }
            let summary = enrich(&mut loaded.records, &resources, &input.provider(), input.overwrite_gender)?;
            let mut buf = Vec::new();
            write_dataset(&mut buf, &loaded.records).map_err(|e| PipelineError::Config(e.to_string()))?;
            if let Some(path) = &unresolved {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["affiliation", "sector"]).expect("in-memory write");
                for a in summary.sector.unresolved_affiliations() {
                    w.write_record([a, ""]).expect("in-memory write");
                }
                let bytes = w.into_inner().expect("in-memory flush");
                fs::write(path, bytes).map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
            }
            write_out(out.as_deref(), &String::from_utf8(buf).expect("utf-8 csv"))?;
            eprintln!(
                "{}",
                serde_json::to_string_pretty(&summary).expect("summary serializes")
            );
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
