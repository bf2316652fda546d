//! Command-line front end: `train`, `classify` and `analyze`.

use crate::bibliometrics::{
    asian_group, european_group, fit_logistic, inflection_position, output_csv, output_series, population_csv,
    population_series, venue_ratio_csv, venue_ratio_series, LogisticFit, PopulationSeries, RatioWindow,
    VenueRatioSeries, DEFAULT_INFLECTION_BAND,
};
use crate::classifier::{evaluate, split, train, EthnicityLabel, Hyperparameters, Model};
use crate::collab::{
    build_graph, check_disjoint, cluster_stats, default_periods, detect_communities, largest_component, period_evolution,
    CommunityOptions, Period, StrengthMode, DEFAULT_MIN_CLUSTER_SIZE,
};
use crate::corpus::{
    format_rejects, label_authors, load_label_map, load_labeled_names, load_publications, AuthorLabels, Grouping,
    PublicationRecord,
};
use crate::features::FeatureConfig;
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::{BTreeSet, HashMap};
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use thiserror::Error;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SPLIT_RATIO: f64 = 0.7;
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },
    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    fn input(path: &Path, message: impl ToString) -> Self {
        CliError::Input {
            path: path.to_path_buf(),
            message: message.to_string(),
        }
    }
}

/// How a run ended when it did not fail outright.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Partial,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Success => 0,
            Outcome::Partial => 1,
        }
    }
}

pub const USAGE_EXIT_CODE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "ethnoname", version, about = "Name-ethnicity classification and bibliometric analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a classifier on a labeled-names file and evaluate it on a held-out split.
    Train(TrainArgs),
    /// Classify names read from a file or standard input.
    Classify(ClassifyArgs),
    /// Run the bibliometric analysis suite over a publications file.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// TOML configuration overriding the defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Seed for every random choice of the run.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Labeled names, one `name<TAB>tag` per line.
    #[arg(long)]
    pub input: PathBuf,
    /// Output directory for the report bundle.
    #[arg(long)]
    pub out: PathBuf,
    /// Where to write the model (default: <out>/model.json).
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Extra `tag<TAB>LABEL` grouping entries.
    #[arg(long)]
    pub grouping: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// One name per line; standard input when omitted.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output TSV; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Publications, one JSON record per line.
    #[arg(long)]
    pub input: PathBuf,
    /// Model used to label authors.
    #[arg(long, conflicts_with = "labels")]
    pub model: Option<PathBuf>,
    /// Precomputed `name<TAB>LABEL` author labels instead of a model.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Comma-separated periods, e.g. `1936-1980,1981-1990`.
    #[arg(long)]
    pub periods: Option<String>,
    /// Venue communities, e.g. `IR=SIGIR,CIKM;DM=KDD,ICDM`.
    #[arg(long)]
    pub groups: Option<String>,
    #[arg(long)]
    pub min_cluster_size: Option<usize>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Community {
    pub name: String,
    pub venues: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatioSpec {
    pub name: String,
    pub group_a: Vec<EthnicityLabel>,
    pub group_b: Vec<EthnicityLabel>,
}

/// Everything a run can be configured with. Command-line flags override
/// values read from a config file, which override these defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub split_ratio: f64,
    pub features: FeatureConfig,
    pub training: Hyperparameters,
    pub periods: Vec<String>,
    pub strength_mode: StrengthMode,
    pub min_cluster_size: usize,
    pub community: CommunityOptions,
    pub communities: Vec<Community>,
    pub ratios: Vec<RatioSpec>,
    pub ratio_window: RatioWindow,
    pub inflection_band: f64,
    /// Keep OTH rows and columns in matrix exports.
    pub include_oth: bool,
}

pub fn default_communities() -> Vec<Community> {
    let c = |name: &str, venues: &[&str]| Community {
        name: name.to_string(),
        venues: venues.iter().map(|v| v.to_string()).collect(),
    };
    vec![
        c("IR", &["SIGIR", "CIKM", "TREC", "CLEF"]),
        c("DM", &["KDD", "ICDM", "SDM", "PKDD", "PAKDD"]),
        c("AI", &["IJCAI", "AAAI", "ICML", "UAI", "NIPS", "AAMAS"]),
        c("AT", &["STOC", "SODA", "FOCS", "ICALP", "LICS", "CONCUR"]),
    ]
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: DEFAULT_SEED,
            split_ratio: DEFAULT_SPLIT_RATIO,
            features: FeatureConfig::default(),
            training: Hyperparameters::default(),
            periods: default_periods().iter().map(Period::to_string).collect(),
            strength_mode: StrengthMode::Fractional,
            min_cluster_size: DEFAULT_MIN_CLUSTER_SIZE,
            community: CommunityOptions::default(),
            communities: default_communities(),
            ratios: vec![
                RatioSpec {
                    name: "asian-european".into(),
                    group_a: asian_group().into_iter().collect(),
                    group_b: european_group().into_iter().collect(),
                },
                RatioSpec {
                    name: "chi-eng".into(),
                    group_a: vec![EthnicityLabel::Chi],
                    group_b: vec![EthnicityLabel::Eng],
                },
            ],
            ratio_window: RatioWindow::Cumulative,
            inflection_band: DEFAULT_INFLECTION_BAND,
            include_oth: true,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::input(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::input(path, e))
    }

    fn resolve(common: &CommonArgs) -> Result<Self, CliError> {
        let mut cfg = match &common.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(seed) = common.seed {
            cfg.seed = seed;
        }
        Ok(cfg)
    }

    pub fn parsed_periods(&self) -> Result<Vec<Period>, CliError> {
        let periods = self
            .periods
            .iter()
            .map(|p| p.parse::<Period>().map_err(|e| CliError::Usage(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        check_disjoint(&periods).map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(periods)
    }
}

/// Parses `IR=SIGIR,CIKM;DM=KDD` into communities.
pub fn parse_groups(spec: &str) -> Result<Vec<Community>, CliError> {
    spec.split(';')
        .filter(|g| !g.trim().is_empty())
        .map(|g| {
            let (name, venues) = g
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("group {g:?} must look like NAME=VENUE,VENUE")))?;
            let venues: Vec<String> = venues
                .split(',')
                .map(|v| v.trim().to_string())
                .filter(|v| !v.is_empty())
                .collect();
            if name.trim().is_empty() || venues.is_empty() {
                return Err(CliError::Usage(format!("group {g:?} needs a name and venues")));
            }
            Ok(Community {
                name: name.trim().to_string(),
                venues,
            })
        })
        .collect()
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestFailure {
    pub report: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub seed: u64,
    pub files: Vec<ManifestEntry>,
    pub failures: Vec<ManifestFailure>,
}

/// Collects output files in memory, then writes them and a manifest.
struct Bundle {
    dir: PathBuf,
    files: Vec<(String, Vec<u8>)>,
    failures: Vec<ManifestFailure>,
}

impl Bundle {
    fn new(dir: &Path) -> Self {
        Bundle {
            dir: dir.to_path_buf(),
            files: Vec::new(),
            failures: Vec::new(),
        }
    }

    fn add(&mut self, name: impl Into<String>, contents: impl Into<Vec<u8>>) {
        self.files.push((name.into(), contents.into()));
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) {
        let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
        s.push('\n');
        self.add(name, s);
    }

    /// Runs one independent report; a failure is recorded, not propagated.
    fn report<F>(&mut self, name: &str, f: F)
    where
        F: FnOnce(&mut Bundle) -> Result<(), String>,
    {
        if let Err(error) = f(self) {
            log::error!("report {name} failed: {error}");
            self.failures.push(ManifestFailure {
                report: name.to_string(),
                error,
            });
        }
    }

    fn write(self, command: &str, seed: u64) -> Result<(Manifest, Outcome), CliError> {
        let out_err = |path: &Path, source| CliError::Output {
            path: path.to_path_buf(),
            source,
        };
        std::fs::create_dir_all(&self.dir).map_err(|e| out_err(&self.dir, e))?;
        let mut entries = Vec::new();
        for (name, bytes) in &self.files {
            let path = self.dir.join(name);
            std::fs::write(&path, bytes).map_err(|e| out_err(&path, e))?;
            entries.push(ManifestEntry {
                path: name.clone(),
                bytes: bytes.len(),
                sha256: sha256_hex(bytes),
            });
        }
        entries.sort_by(|a, b| a.path.cmp(&b.path));
        let manifest = Manifest {
            command: command.to_string(),
            seed,
            files: entries,
            failures: self.failures,
        };
        let path = self.dir.join(MANIFEST_FILE);
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| out_err(&path, e))?;
        let outcome = if manifest.failures.is_empty() {
            Outcome::Success
        } else {
            Outcome::Partial
        };
        Ok((manifest, outcome))
    }
}

#[derive(Serialize)]
struct TrainSummary<'a> {
    seed: u64,
    split_ratio: f64,
    training_examples: usize,
    test_examples: usize,
    rejected_lines: usize,
    vocabulary_size: usize,
    epochs: usize,
    final_loss: f64,
    converged: bool,
    accuracy: f64,
    confusion: &'a [Vec<usize>],
}

/// Trains, evaluates on the held-out split and writes the report bundle.
pub fn cmd_train(args: &TrainArgs) -> Result<(Manifest, Outcome), CliError> {
    let cfg = RunConfig::resolve(&args.common)?;
    let mut grouping = Grouping::default();
    if let Some(g) = &args.grouping {
        grouping.extend_from_file(g).map_err(|e| CliError::input(g, e))?;
    }
    let loaded = load_labeled_names(&args.input, &grouping).map_err(|e| CliError::input(&args.input, e))?;
    let (train_set, test_set) =
        split(&loaded.items, cfg.split_ratio, cfg.seed).map_err(|e| CliError::Usage(e.to_string()))?;
    let (model, _) = train(&train_set, &cfg.features, &cfg.training, cfg.seed)
        .map_err(|e| CliError::input(&args.input, e))?;
    let report = evaluate(&model, &test_set).map_err(|e| CliError::input(&args.input, e))?;

    let model_json = model.to_json().map_err(|e| CliError::Usage(e.to_string()))?;
    let mut bundle = Bundle::new(&args.out);
    match &args.model {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|source| CliError::Output {
                    path: parent.to_path_buf(),
                    source,
                })?;
            }
            std::fs::write(path, &model_json).map_err(|source| CliError::Output {
                path: path.clone(),
                source,
            })?;
        }
        None => bundle.add("model.json", model_json),
    }

    let mut totals = [0usize; 13];
    for item in &loaded.items {
        totals[item.label.index()] += 1;
    }
    let table = crate::bibliometrics::to_csv(&["label", "names", "precision", "recall", "f1"], |w| {
        for m in &report.per_class {
            w.write_record([
                m.label.code().to_string(),
                totals[m.label.index()].to_string(),
                format!("{:.4}", m.precision),
                format!("{:.4}", m.recall),
                format!("{:.4}", m.f1),
            ])?;
        }
        Ok(())
    });
    bundle.add("evaluation.csv", table);
    let mut header = vec!["truth"];
    header.extend(EthnicityLabel::CLASSES.iter().map(|l| l.code()));
    let confusion = crate::bibliometrics::to_csv(&header, |w| {
        for (i, row) in report.confusion.iter().enumerate() {
            let mut rec = vec![EthnicityLabel::CLASSES[i].code().to_string()];
            rec.extend(row.iter().map(|c| c.to_string()));
            w.write_record(rec)?;
        }
        Ok(())
    });
    bundle.add("confusion.csv", confusion);
    let meta = model.metadata();
    bundle.json(
        "summary.json",
        &TrainSummary {
            seed: cfg.seed,
            split_ratio: cfg.split_ratio,
            training_examples: train_set.len(),
            test_examples: test_set.len(),
            rejected_lines: loaded.rejects.len(),
            vocabulary_size: model.vocabulary().len(),
            epochs: meta.epochs,
            final_loss: meta.final_loss,
            converged: meta.converged,
            accuracy: report.accuracy,
            confusion: &report.confusion,
        },
    );
    bundle.add("rejects.tsv", format_rejects(&loaded.rejects));
    println!(
        "trained on {} names, tested on {}: accuracy {:.4}",
        train_set.len(),
        test_set.len(),
        report.accuracy
    );
    bundle.write("train", cfg.seed)
}

/// Predicts each input line. Output columns: name, decided label, then
/// three (label, confidence) pairs; failed names get `ERROR` and a message.
pub fn classify_lines<R: BufRead, W: Write>(model: &Model, input: R, mut out: W) -> std::io::Result<usize> {
    let mut errors = 0;
    for line in input.lines() {
        let line = line?;
        match model.predict_str(&line) {
            Ok(p) => {
                let mut row = format!("{}\t{}", line.trim(), p.decided);
                for (label, conf) in p.top(3) {
                    row.push_str(&format!("\t{label}\t{conf:.6}"));
                }
                writeln!(out, "{row}")?;
            }
            Err(e) => {
                errors += 1;
                writeln!(out, "{}\tERROR\t{e}", line.trim())?;
            }
        }
    }
    out.flush()?;
    Ok(errors)
}

pub fn cmd_classify(args: &ClassifyArgs) -> Result<Outcome, CliError> {
    let model = Model::load(&args.model).map_err(|e| CliError::input(&args.model, e))?;
    let input: Box<dyn BufRead> = match &args.input {
        Some(p) => Box::new(std::io::BufReader::new(
            std::fs::File::open(p).map_err(|e| CliError::input(p, e))?,
        )),
        None => Box::new(std::io::stdin().lock()),
    };
    let out_path = args.out.clone().unwrap_or_else(|| PathBuf::from("-"));
    let output: Box<dyn Write> = match &args.out {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p).map_err(|source| {
            CliError::Output {
                path: p.clone(),
                source,
            }
        })?)),
        None => Box::new(std::io::stdout().lock()),
    };
    let errors = classify_lines(&model, input, output).map_err(|source| CliError::Output {
        path: out_path,
        source,
    })?;
    Ok(if errors == 0 { Outcome::Success } else { Outcome::Partial })
}

#[derive(Serialize)]
struct FitRow {
    label: EthnicityLabel,
    fit: Option<LogisticFit>,
    status: String,
    t_last: Option<i32>,
    value_at_last: Option<f64>,
    inflection: Option<&'static str>,
}

fn logistic_fits(population: &PopulationSeries, band: f64) -> Vec<FitRow> {
    EthnicityLabel::ALL
        .into_iter()
        .map(|label| {
            let points: Vec<(f64, f64)> = population
                .accumulated_points(label)
                .into_iter()
                .filter(|p| p.1 > 0.0)
                .collect();
            let t_last = population.years.last().copied();
            match fit_logistic(&points, None) {
                Ok(fit) => {
                    let t = t_last.expect("non-empty series") as f64;
                    FitRow {
                        label,
                        fit: Some(fit),
                        status: if fit.converged { "ok" } else { "not-converged" }.to_string(),
                        t_last,
                        value_at_last: Some(fit.value(t)),
                        inflection: Some(inflection_position(&fit, t, band).as_str()),
                    }
                }
                Err(e) => FitRow {
                    label,
                    fit: None,
                    status: e.to_string(),
                    t_last,
                    value_at_last: None,
                    inflection: None,
                },
            }
        })
        .collect()
}

fn fits_csv(rows: &[FitRow]) -> String {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    crate::bibliometrics::to_csv(
        &[
            "label", "status", "p0", "pm", "r", "t0", "residual", "t_last", "value_at_last", "inflection",
        ],
        |w| {
            for r in rows {
                w.write_record([
                    r.label.code().to_string(),
                    r.status.clone(),
                    opt(r.fit.map(|f| f.p0)),
                    opt(r.fit.map(|f| f.pm)),
                    opt(r.fit.map(|f| f.r)),
                    opt(r.fit.map(|f| f.t0)),
                    opt(r.fit.map(|f| f.residual)),
                    r.t_last.map(|t| t.to_string()).unwrap_or_default(),
                    opt(r.value_at_last),
                    r.inflection.unwrap_or("").to_string(),
                ])?;
            }
            Ok(())
        },
    )
}

fn label_records(args: &AnalyzeArgs, records: &[PublicationRecord]) -> Result<AuthorLabels, CliError> {
    match (&args.model, &args.labels) {
        (Some(m), _) => {
            let model = Model::load(m).map_err(|e| CliError::input(m, e))?;
            Ok(label_authors(records, &model, &mut HashMap::new()))
        }
        (None, Some(l)) => {
            let loaded = load_label_map(l).map_err(|e| CliError::input(l, e))?;
            for r in &loaded.rejects {
                log::warn!("{}: line {}: {}", l.display(), r.line, r.reason);
            }
            let map: AuthorLabels = loaded.items.into_iter().collect();
            Ok(label_authors(records, &map, &mut HashMap::new()))
        }
        (None, None) => Err(CliError::Usage("analyze needs --model or --labels".into())),
    }
}

#[derive(Serialize)]
struct AnalysisSummary {
    seed: u64,
    publications: usize,
    rejected_lines: usize,
    authors: usize,
    authors_per_label: Vec<(EthnicityLabel, usize)>,
    largest_component_nodes: usize,
    clusters: usize,
    reported_clusters: usize,
    min_cluster_size: usize,
    global_entropy: f64,
    periods: Vec<String>,
}

/// Runs every analysis over a publications file and writes the bundle.
pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<(Manifest, Outcome), CliError> {
    let mut cfg = RunConfig::resolve(&args.common)?;
    if let Some(p) = &args.periods {
        cfg.periods = p.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    }
    if let Some(g) = &args.groups {
        cfg.communities = parse_groups(g)?;
    }
    if let Some(m) = args.min_cluster_size {
        cfg.min_cluster_size = m;
    }
    let periods = cfg.parsed_periods()?;
    let loaded = load_publications(&args.input).map_err(|e| CliError::input(&args.input, e))?;
    let records = loaded.items;
    let labels = label_records(args, &records)?;

    let mut bundle = Bundle::new(&args.out);
    bundle.add("rejects.tsv", format_rejects(&loaded.rejects));
    let mut label_rows = String::from("name\tlabel\n");
    for (name, label) in &labels {
        label_rows.push_str(&format!("{name}\t{label}\n"));
    }
    bundle.add("labels.tsv", label_rows);

    let population = population_series(&records, &labels);
    let output = output_series(&records, &labels);
    bundle.add("population.csv", population_csv(&population));
    bundle.add("output.csv", output_csv(&output));

    let band = cfg.inflection_band;
    let pop_ref = &population;
    bundle.report("logistic", move |b| {
        if pop_ref.years.is_empty() {
            return Err("no publications to fit".into());
        }
        let rows = logistic_fits(pop_ref, band);
        b.add("logistic_fits.csv", fits_csv(&rows));
        b.json("logistic_fits.json", &rows);
        Ok(())
    });

    let (recs, labs) = (&records, &labels);
    let communities = cfg.communities.clone();
    let ratios = cfg.ratios.clone();
    let window = cfg.ratio_window;
    bundle.report("venue-ratios", move |b| {
        for spec in &ratios {
            let a: BTreeSet<EthnicityLabel> = spec.group_a.iter().copied().collect();
            let bset: BTreeSet<EthnicityLabel> = spec.group_b.iter().copied().collect();
            let mut rows: Vec<(String, VenueRatioSeries)> = Vec::new();
            for c in &communities {
                let s = venue_ratio_series(recs, labs, &a, &bset, &c.venues, window)
                    .map_err(|e| format!("{}: {e}", spec.name))?;
                rows.push((c.name.clone(), s));
            }
            b.add(format!("venue_ratio_{}.csv", spec.name), venue_ratio_csv(&rows));
        }
        Ok(())
    });

    let seed = cfg.seed;
    let min_size = cfg.min_cluster_size;
    let options = cfg.community;
    let mut component_nodes = 0;
    let mut cluster_counts = (0, 0, 0.0);
    bundle.report("clusters", |b| {
        let graph = build_graph(recs, labs, None);
        let lc = largest_component(&graph).map_err(|e| e.to_string())?;
        component_nodes = lc.node_count();
        let groups = detect_communities(&lc, seed, options);
        let members: Vec<Vec<_>> = groups
            .iter()
            .map(|g| g.iter().map(|&i| lc.nodes()[i].clone()).collect())
            .collect();
        let report = cluster_stats(&members, labs, min_size);
        cluster_counts = (report.clusters.len(), report.reported().count(), report.global_entropy);
        let table = crate::bibliometrics::to_csv(
            &["cluster", "size", "purity", "purity_label", "entropy", "reported"],
            |w| {
                for c in &report.clusters {
                    w.write_record([
                        c.id.to_string(),
                        c.size().to_string(),
                        c.purity.to_string(),
                        c.purity_label.code().to_string(),
                        c.entropy.to_string(),
                        (c.size() >= min_size).to_string(),
                    ])?;
                }
                Ok(())
            },
        );
        b.add("clusters.csv", table);
        b.add("cluster_assignments.tsv", report.assignments(labs));
        b.add("coauthor_edges.tsv", lc.edge_list());
        Ok(())
    });

    let include_oth = cfg.include_oth;
    let mode = cfg.strength_mode;
    bundle.report("collaboration", |b| {
        let matrices = period_evolution(recs, labs, &periods, mode).map_err(|e| e.to_string())?;
        for m in &matrices {
            b.add(format!("cs_{}.csv", m.period), m.to_csv(false, include_oth));
            b.add(format!("ncs_{}.csv", m.period), m.to_csv(true, include_oth));
        }
        Ok(())
    });

    let mut per_label = [0usize; 13];
    for l in labels.values() {
        per_label[l.index()] += 1;
    }
    bundle.json(
        "summary.json",
        &AnalysisSummary {
            seed: cfg.seed,
            publications: records.len(),
            rejected_lines: loaded.rejects.len(),
            authors: labels.len(),
            authors_per_label: EthnicityLabel::ALL.into_iter().map(|l| (l, per_label[l.index()])).collect(),
            largest_component_nodes: component_nodes,
            clusters: cluster_counts.0,
            reported_clusters: cluster_counts.1,
            min_cluster_size: cfg.min_cluster_size,
            global_entropy: cluster_counts.2,
            periods: periods.iter().map(Period::to_string).collect(),
        },
    );
    bundle.json("config.json", &cfg);
    let result = bundle.write("analyze", cfg.seed)?;
    println!(
        "analyzed {} publications ({} authors); {} files written to {}",
        records.len(),
        labels.len(),
        result.0.files.len() + 1,
        args.out.display()
    );
    Ok(result)
}

/// Entry point used by the binary.
pub fn run(cli: Cli) -> ExitCode {
    let result = match &cli.command {
        Command::Train(a) => cmd_train(a).map(|r| r.1),
        Command::Classify(a) => cmd_classify(a),
        Command::Analyze(a) => cmd_analyze(a).map(|r| r.1),
    };
    match result {
        Ok(outcome) => ExitCode::from(outcome.exit_code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(USAGE_EXIT_CODE)
        }
    }
}
