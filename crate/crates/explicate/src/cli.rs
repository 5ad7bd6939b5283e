//! Command-line front end. `run` is separate from process concerns so it can
//! be driven from tests.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use explicate_core::dataset::{split, DatasetRecord};
use explicate_core::eval::{consistency_rate, flesch_reading_ease, lime_stability, MetricsReport};
use explicate_core::features::LexiconConfig;
use explicate_core::llm::ExplanationMode;
use explicate_core::pipeline::Detector;
use explicate_core::synth::{generate, SynthConfig};
use serde_json::json;

use crate::analysis::{analyze_xai, attach_llm, validate_options, AnalysisMode, AnalysisReport, AnalyzeOptions};
use crate::config::{Config, ENV_CONFIG};
use crate::error::{Error, Result};
use crate::eval_io::{cross_dataset_eval, evaluate, export_errors, EvalReport, ReadabilitySummary};
use crate::ingest::{format_source_table, load_dataset, write_dataset, ColumnOverrides, LoadedDataset};
use crate::llm_client::LlmClient;
use crate::model_io::{lexicon_to_toml, load_lexicon, load_model, model_version, save_model, write_registry_csv};
use crate::service::{serve, AppState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "explicate", version, about = "Explainable phishing detection")]
pub struct Cli {
    /// TOML settings file.
    #[arg(long, global = true, env = ENV_CONFIG)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    /// Seed for training, splitting, LIME and the generator.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Print the effective configuration and exit.
    #[arg(long, global = true)]
    pub show_config: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Merge CSV datasets into one canonical file.
    Ingest(IngestArgs),
    /// Train a model and report held-out metrics.
    Train(TrainArgs),
    /// Compute metrics for a model over a dataset.
    Evaluate(EvaluateArgs),
    /// Classify and explain one email.
    Analyze(AnalyzeArgs),
    /// Like `analyze`, with a language-model explanation.
    Explain(AnalyzeArgs),
    /// Run the HTTP API.
    Serve(ServeArgs),
    /// Write a labeled synthetic corpus.
    Synth(SynthArgs),
    /// Write the feature registry of a model as CSV.
    ExportRegistry(ExportRegistryArgs),
    /// Write the lexicon in effect (default or --lexicon) as TOML.
    ExportLexicon(ExportLexiconArgs),
}

#[derive(Debug, Args)]
pub struct ColumnArgs {
    #[arg(long)]
    pub text_col: Option<String>,
    #[arg(long)]
    pub label_col: Option<String>,
}

impl ColumnArgs {
    fn overrides(&self) -> ColumnOverrides {
        ColumnOverrides { text: self.text_col.clone(), label: self.label_col.clone() }
    }
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub columns: ColumnArgs,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long, required = true, num_args = 1..)]
    pub data: Vec<PathBuf>,
    #[arg(long)]
    pub out_model: Option<PathBuf>,
    #[command(flatten)]
    pub columns: ColumnArgs,
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub l2_penalty: Option<f64>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub test_fraction: Option<f64>,
    #[arg(long)]
    pub min_df: Option<usize>,
    #[arg(long)]
    pub max_features: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, required = true, num_args = 1..)]
    pub data: Vec<PathBuf>,
    #[command(flatten)]
    pub columns: ColumnArgs,
    /// Evaluate only the held-out part of the configured split.
    #[arg(long)]
    pub held_out: bool,
    #[arg(long)]
    pub by_source: bool,
    #[arg(long)]
    pub export_errors: Option<PathBuf>,
    /// Generate explanations for this many records and report consistency and readability.
    #[arg(long, default_value_t = 0)]
    pub explanations: usize,
    /// Measure LIME stability over ten seeds on this many records.
    #[arg(long, default_value_t = 0)]
    pub stability: usize,
    /// Use template explanations instead of the endpoint.
    #[arg(long)]
    pub offline: bool,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, conflicts_with = "file")]
    pub text: Option<String>,
    /// .eml or .txt file; stdin when neither --text nor --file is given.
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// xai or xai+llm.
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<AnalysisMode>,
    #[arg(long, value_parser = parse_explanation_mode, default_value = "detailed")]
    pub explanation_mode: ExplanationMode,
    #[arg(long)]
    pub top_k: Option<usize>,
    #[arg(long)]
    pub offline: bool,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub bind: Option<std::net::SocketAddr>,
    #[arg(long)]
    pub static_dir: Option<PathBuf>,
    #[arg(long)]
    pub audit_log: Option<PathBuf>,
    #[arg(long = "cors-origin")]
    pub cors_origins: Vec<String>,
    #[arg(long)]
    pub offline: bool,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = SynthConfig::default().n)]
    pub n: usize,
    #[arg(long, default_value_t = SynthConfig::default().phishing_fraction)]
    pub phishing_fraction: f64,
    #[arg(long, default_value_t = SynthConfig::default().hard_fraction)]
    pub hard_fraction: f64,
}

#[derive(Debug, Args)]
pub struct ExportRegistryArgs {
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExportLexiconArgs {
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_mode(s: &str) -> std::result::Result<AnalysisMode, String> {
    AnalysisMode::parse(s).ok_or_else(|| format!("unknown mode {s:?} (expected xai or xai+llm)"))
}

fn parse_explanation_mode(s: &str) -> std::result::Result<ExplanationMode, String> {
    ExplanationMode::parse(s).ok_or_else(|| format!("unknown explanation mode {s:?}"))
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

/// Builds the effective configuration from all layers.
pub fn effective_config(cli: &Cli, env: impl Fn(&str) -> Option<String>) -> Result<Config> {
    let mut c = Config::load(cli.config.as_deref(), env)?;
    if let Some(seed) = cli.seed {
        c.train.seed = seed;
        c.split.seed = seed;
        c.lime.seed = seed;
    }
    match &cli.command {
        Command::Train(a) => {
            set(&mut c.train.epochs, a.epochs);
            set(&mut c.train.learning_rate, a.learning_rate);
            set(&mut c.train.l2_penalty, a.l2_penalty);
            set(&mut c.train.batch_size, a.batch_size);
            set(&mut c.split.test_fraction, a.test_fraction);
            set(&mut c.tfidf.min_df, a.min_df);
            set(&mut c.tfidf.max_features, a.max_features);
            if a.lexicon.is_some() {
                c.lexicon_path = a.lexicon.clone();
            }
            set(&mut c.model_path, a.out_model.clone());
        }
        Command::Evaluate(EvaluateArgs { model, .. })
        | Command::Analyze(AnalyzeArgs { model, .. })
        | Command::Explain(AnalyzeArgs { model, .. })
        | Command::ExportRegistry(ExportRegistryArgs { model, .. }) => set(&mut c.model_path, model.clone()),
        Command::Serve(a) => {
            set(&mut c.model_path, a.model.clone());
            set(&mut c.service.bind, a.bind);
            if a.static_dir.is_some() {
                c.service.static_dir = a.static_dir.clone();
            }
            if a.audit_log.is_some() {
                c.service.audit_log = a.audit_log.clone();
            }
            if !a.cors_origins.is_empty() {
                c.service.cors_origins = a.cors_origins.clone();
            }
        }
        Command::ExportLexicon(a) => {
            if a.lexicon.is_some() {
                c.lexicon_path = a.lexicon.clone();
            }
        }
        Command::Ingest(_) | Command::Synth(_) => {}
    }
    c.validate()?;
    Ok(c)
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes")
}

fn runtime() -> Result<tokio::runtime::Runtime> {
    tokio::runtime::Builder::new_multi_thread().enable_all().build().map_err(Error::Server)
}

/// Runs one command, writing its report to `out`.
pub fn run(cli: &Cli, env: impl Fn(&str) -> Option<String>, out: &mut dyn Write) -> Result<()> {
    let config = effective_config(cli, env)?;
    if cli.show_config {
        write!(out, "{}", config.to_toml()).map_err(io_out)?;
        return Ok(());
    }
    let json = cli.format == Format::Json;
    match &cli.command {
        Command::Ingest(a) => cmd_ingest(a, json, out),
        Command::Train(a) => cmd_train(a, &config, json, out),
        Command::Evaluate(a) => cmd_evaluate(a, &config, json, out),
        Command::Analyze(a) => cmd_analyze(a, &config, a.mode.unwrap_or(AnalysisMode::XaiOnly), json, out),
        Command::Explain(a) => cmd_analyze(a, &config, AnalysisMode::XaiPlusLlm, json, out),
        Command::Serve(a) => cmd_serve(a, &config),
        Command::Synth(a) => cmd_synth(a, cli.seed, json, out),
        Command::ExportRegistry(a) => cmd_export_registry(a, &config, out),
        Command::ExportLexicon(a) => {
            let text = lexicon_to_toml(&lexicons(&config)?);
            match &a.out {
                Some(path) => std::fs::write(path, text)
                    .map_err(|source| Error::FileUnwritable { path: path.clone(), source }),
                None => write!(out, "{text}").map_err(io_out),
            }
        }
    }
}

fn io_out(source: std::io::Error) -> Error {
    Error::FileUnwritable { path: PathBuf::from("<stdout>"), source }
}

fn cmd_ingest(a: &IngestArgs, json: bool, out: &mut dyn Write) -> Result<()> {
    let data = load_dataset(&a.inputs, &a.columns.overrides())?;
    write_dataset(&a.out, &data.records)?;
    if json {
        let summary = json!({
            "out": a.out,
            "records": data.records.len(),
            "files": data.files,
            "sources": data.sources,
            "duplicates_removed": data.duplicates_removed,
            "skipped": data.skipped(),
        });
        writeln!(out, "{}", to_json(&summary)).map_err(io_out)
    } else {
        write!(out, "{}", format_source_table(&data)).map_err(io_out)?;
        writeln!(out, "wrote {} records to {}", data.records.len(), a.out.display()).map_err(io_out)
    }
}

fn load_records(paths: &[PathBuf], columns: &ColumnArgs) -> Result<LoadedDataset> {
    let data = load_dataset(paths, &columns.overrides())?;
    if data.records.is_empty() {
        return Err(explicate_core::Error::TooFewRecords("no usable records in the input".into()).into());
    }
    Ok(data)
}

fn lexicons(config: &Config) -> Result<LexiconConfig> {
    match &config.lexicon_path {
        Some(p) => load_lexicon(p),
        None => Ok(LexiconConfig::default()),
    }
}

/// Splits, fits on the training part and returns the detector with the held-out records.
pub fn train_on(records: &[DatasetRecord], config: &Config) -> Result<(Detector, Vec<f64>, Vec<DatasetRecord>, usize)> {
    let (train, test) = split(records, &config.split)?;
    let texts: Vec<&str> = train.iter().map(|r| r.text.as_str()).collect();
    let labels: Vec<u8> = train.iter().map(|r| r.label).collect();
    let outcome = Detector::fit(&texts, &labels, lexicons(config)?, &config.fit_config())?;
    Ok((outcome.detector, outcome.epoch_losses, test, train.len()))
}

fn write_metrics(out: &mut dyn Write, m: &MetricsReport) -> std::io::Result<()> {
    let c = &m.confusion;
    writeln!(out, "accuracy   {:.4}", m.accuracy)?;
    writeln!(out, "precision  {:.4}{}", m.precision, if m.undefined.precision { "  (undefined)" } else { "" })?;
    writeln!(out, "recall     {:.4}", m.recall)?;
    writeln!(out, "f1         {:.4}", m.f1)?;
    writeln!(out, "fpr        {:.4}", m.fpr)?;
    writeln!(out, "fnr        {:.4}", m.fnr)?;
    writeln!(out, "confusion  tp={} fp={} tn={} fn={}", c.tp, c.fp, c.tn, c.fn_)?;
    if let Some(per) = &m.per_source {
        for (source, r) in per {
            writeln!(out, "  {source:<24} n={:<6} accuracy {:.4}  f1 {:.4}", r.confusion.total(), r.accuracy, r.f1)?;
        }
    }
    Ok(())
}

fn cmd_train(a: &TrainArgs, config: &Config, json: bool, out: &mut dyn Write) -> Result<()> {
    let data = load_records(&a.data, &a.columns)?;
    let (detector, losses, test, n_train) = train_on(&data.records, config)?;
    let (_, metrics) = evaluate(&detector, &test)?;
    save_model(&detector, &config.model_path)?;
    if json {
        let summary = json!({
            "model_path": config.model_path,
            "model_version": model_version(&detector),
            "train_records": n_train,
            "test_records": test.len(),
            "final_loss": losses.last(),
            "metrics": metrics,
        });
        writeln!(out, "{}", to_json(&summary)).map_err(io_out)
    } else {
        writeln!(out, "trained on {n_train} records, evaluated on {} held-out records", test.len()).map_err(io_out)?;
        write_metrics(out, &metrics).map_err(io_out)?;
        writeln!(out, "model written to {}", config.model_path.display()).map_err(io_out)
    }
}

fn explanation_pairs(
    detector: &Detector,
    version: &str,
    records: &[DatasetRecord],
    config: &Config,
    client: Option<&LlmClient>,
) -> Result<Vec<(explicate_core::llm::LlmExplanation, explicate_core::classifier::Prediction)>> {
    let rt = runtime()?;
    let mut pairs = Vec::with_capacity(records.len());
    for r in records {
        let options = AnalyzeOptions { mode: AnalysisMode::XaiPlusLlm, ..AnalyzeOptions::default() };
        let mut report = analyze_xai(detector, version, &r.text, &options, &config.lime, config.top_features)?;
        rt.block_on(attach_llm(&mut report, &r.text, options.explanation_mode, client, &config.llm));
        let prediction = explicate_core::classifier::Prediction {
            probability: report.probability,
            verdict: report.verdict,
            logit: report.logit,
        };
        pairs.push((report.llm.expect("attach_llm sets llm"), prediction));
    }
    Ok(pairs)
}

fn cmd_evaluate(a: &EvaluateArgs, config: &Config, json: bool, out: &mut dyn Write) -> Result<()> {
    let detector = load_model(&config.model_path)?;
    let version = model_version(&detector);
    let data = load_records(&a.data, &a.columns)?;
    let records = if a.held_out { split(&data.records, &config.split)?.1 } else { data.records };
    let metrics = if a.by_source { cross_dataset_eval(&detector, &records)? } else { evaluate(&detector, &records)?.1 };
    let exported = match &a.export_errors {
        Some(path) => Some(export_errors(&detector, &records, path)?),
        None => None,
    };
    let (mut consistency, mut readability, mut stability) = (None, None, None);
    if a.explanations > 0 {
        let client = if a.offline { None } else { Some(LlmClient::new(config.llm.clone())?) };
        let sample = &records[..a.explanations.min(records.len())];
        let pairs = explanation_pairs(&detector, &version, sample, config, client.as_ref())?;
        consistency = Some(consistency_rate(&pairs)?);
        let scores: Vec<f64> = pairs
            .iter()
            .filter_map(|(e, _)| flesch_reading_ease(e.body.split_once('\n').map_or(&e.body, |(_, rest)| rest)).ok())
            .collect();
        if !scores.is_empty() {
            readability = Some(ReadabilitySummary {
                mean_flesch: scores.iter().sum::<f64>() / scores.len() as f64,
                explanations: scores.len(),
            });
        }
    }
    if a.stability > 0 {
        let seeds: Vec<u64> = (0..10).map(|i| config.lime.seed + i).collect();
        let mut map = std::collections::BTreeMap::new();
        for (i, r) in records.iter().take(a.stability).enumerate() {
            let s = lime_stability(|t: &str| detector.probability(t), &r.text, &seeds, 5, &config.lime)?;
            map.insert(format!("record_{i}"), s);
        }
        stability = Some(map);
    }
    let report = EvalReport {
        model_version: version,
        records: records.len(),
        metrics,
        consistency,
        stability,
        readability,
        expert_scores: None,
    };
    if json {
        let mut v = serde_json::to_value(&report).expect("report serializes");
        if let Some(n) = exported {
            v["errors_exported"] = json!(n);
        }
        writeln!(out, "{}", to_json(&v)).map_err(io_out)
    } else {
        writeln!(out, "{} records, model {}", report.records, report.model_version).map_err(io_out)?;
        write_metrics(out, &report.metrics).map_err(io_out)?;
        if let Some(c) = &report.consistency {
            writeln!(out, "consistency {:.4} (agree {}, disagree {}, unparseable {})", c.rate, c.agree, c.disagree, c.unparseable)
                .map_err(io_out)?;
        }
        if let Some(r) = &report.readability {
            writeln!(out, "readability {:.1} mean Flesch over {} explanations", r.mean_flesch, r.explanations).map_err(io_out)?;
        }
        if let Some(s) = &report.stability {
            let mean = s.values().sum::<f64>() / s.len().max(1) as f64;
            writeln!(out, "lime stability {mean:.4} mean top-5 Jaccard over {} records", s.len()).map_err(io_out)?;
        }
        if let (Some(n), Some(p)) = (exported, &a.export_errors) {
            writeln!(out, "{n} misclassified records written to {}", p.display()).map_err(io_out)?;
        }
        Ok(())
    }
}

fn read_input(a: &AnalyzeArgs) -> Result<String> {
    if let Some(t) = &a.text {
        return Ok(t.clone());
    }
    if let Some(p) = &a.file {
        let bytes = std::fs::read(p).map_err(|source| Error::FileUnreadable { path: p.clone(), source })?;
        return Ok(String::from_utf8_lossy(&bytes).into_owned());
    }
    let mut bytes = Vec::new();
    std::io::stdin()
        .read_to_end(&mut bytes)
        .map_err(|source| Error::FileUnreadable { path: PathBuf::from("<stdin>"), source })?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

/// Runs the full analysis for one email as the CLI does.
pub fn analyze_text(
    detector: &Detector,
    raw: &str,
    options: &AnalyzeOptions,
    config: &Config,
    client: Option<&LlmClient>,
) -> Result<AnalysisReport> {
    validate_options(options)?;
    let mut report = analyze_xai(detector, &model_version(detector), raw, options, &config.lime, config.top_features)?;
    if options.mode == AnalysisMode::XaiPlusLlm {
        runtime()?.block_on(attach_llm(&mut report, raw, options.explanation_mode, client, &config.llm));
    }
    Ok(report)
}

pub fn format_report(report: &AnalysisReport) -> String {
    use std::fmt::Write as _;
    let mut s = String::new();
    let _ = writeln!(s, "verdict: {} (probability {:.4}, threshold {})", report.verdict.as_str(), report.probability, report.threshold);
    let _ = writeln!(s, "\nLIME tokens:");
    for a in &report.lime {
        let _ = writeln!(s, "  {:>2}. {:<20} {:+.4}", a.rank, a.token, a.weight);
    }
    if report.lime_degenerate {
        let _ = writeln!(s, "  (no local signal: every perturbation scored the same)");
    }
    let shap = &report.shap;
    let _ = writeln!(
        s,
        "\nSHAP concept groups (logit; base {:.3} -> output {:.3}, probability {:.3} -> {:.3}):",
        shap.base_logit, shap.output_logit, shap.base_probability, shap.output_probability
    );
    for g in &shap.groups {
        let tag = if g.residual { " (word-level residual)" } else { "" };
        let _ = writeln!(s, "  {:<22} {:+.4}{tag}", g.group.as_str(), g.value);
    }
    let _ = writeln!(s, "\ntop features:");
    for f in &shap.top_features {
        let _ = writeln!(s, "  {:<32} {:+.4}  [{}]", f.human_name, f.value, f.group.as_str());
    }
    if let Some(e) = &report.llm {
        let source = match e.source {
            explicate_core::llm::ExplanationSource::Remote => "remote",
            explicate_core::llm::ExplanationSource::Fallback => "template",
        };
        let consistency = report.consistency.map(|c| format!("{c:?}").to_lowercase()).unwrap_or_default();
        let _ = writeln!(s, "\nexplanation ({}, {source}, consistency {consistency}):\n{}", e.mode.as_str(), e.body);
    }
    let t = &report.timings;
    let _ = writeln!(s, "\ntimings: predict {:.1} ms, lime {:.1} ms, shap {:.1} ms, total {:.1} ms", t.predict_ms, t.lime_ms, t.shap_ms, t.total_ms);
    s
}

fn cmd_analyze(a: &AnalyzeArgs, config: &Config, mode: AnalysisMode, json: bool, out: &mut dyn Write) -> Result<()> {
    let detector = load_model(&config.model_path)?;
    let raw = read_input(a)?;
    let options = AnalyzeOptions { mode, explanation_mode: a.explanation_mode, top_k: a.top_k };
    let client = if a.offline || mode == AnalysisMode::XaiOnly { None } else { Some(LlmClient::new(config.llm.clone())?) };
    let report = analyze_text(&detector, &raw, &options, config, client.as_ref())?;
    if json {
        writeln!(out, "{}", to_json(&report)).map_err(io_out)
    } else {
        write!(out, "{}", format_report(&report)).map_err(io_out)
    }
}

fn cmd_serve(a: &ServeArgs, config: &Config) -> Result<()> {
    let detector = load_model(&config.model_path)?;
    let client = if a.offline { None } else { Some(LlmClient::new(config.llm.clone())?) };
    let state = Arc::new(AppState::new(detector, Some(config.model_path.clone()), config, client)?);
    runtime()?.block_on(serve(state, config))
}

fn cmd_synth(a: &SynthArgs, seed: Option<u64>, json: bool, out: &mut dyn Write) -> Result<()> {
    let synth = SynthConfig {
        n: a.n,
        phishing_fraction: a.phishing_fraction,
        hard_fraction: a.hard_fraction,
        seed: seed.unwrap_or(SynthConfig::default().seed),
    };
    let records = generate(&synth)?;
    write_dataset(&a.out, &records)?;
    let phishing = records.iter().filter(|r| r.label == 1).count();
    if json {
        writeln!(out, "{}", to_json(&json!({"out": a.out, "records": records.len(), "phishing": phishing}))).map_err(io_out)
    } else {
        writeln!(out, "wrote {} records ({} phishing) to {}", records.len(), phishing, a.out.display()).map_err(io_out)
    }
}

fn cmd_export_registry(a: &ExportRegistryArgs, config: &Config, out: &mut dyn Write) -> Result<()> {
    let detector = load_model(&config.model_path)?;
    match &a.out {
        Some(path) => {
            let file = std::fs::File::create(path).map_err(|source| Error::FileUnwritable { path: path.clone(), source })?;
            write_registry_csv(detector.registry(), file)
        }
        None => write_registry_csv(detector.registry(), out),
    }
}

/// Error document printed for `--format json`.
pub fn error_json(e: &Error) -> String {
    to_json(&json!({"error": {"code": e.code(), "message": e.to_string()}}))
}
