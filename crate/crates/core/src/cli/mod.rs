//! Command-line front end. Stages exchange plain files so each can be rerun
//! on its own:
//!
//! ```text
//! synth      -> pNNN_recording.csv + pNNN_annotations.csv
//! preprocess -> filtered copies of the same files
//! featurize  -> feature table for one window
//! sweep      -> report.csv, summary.json, effective_config.cfg
//! report     -> per-task tables and plot-ready panel CSVs
//! ```

mod config;

pub use config::{RunConfig, KEYS};

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::dsp::preprocess_recording;
use crate::epoch::{balance_baseline, build_dataset, EpochingConfig};
use crate::eval::{
    featurize, parse_report_csv, run_pipeline, ComparisonTask, CsvRow, SignalSource,
};
use crate::ingest::{parse_annotations, parse_recording, write_annotations, write_feature_table, write_recording};
use crate::models::ModelKind;
use crate::synth::{synth_benchmark, EffectParams, RecordingSpec};
use crate::types::{RawRecording, Window};

pub const RECORDING_SUFFIX: &str = "_recording.csv";
pub const ANNOTATION_SUFFIX: &str = "_annotations.csv";

/// Failure of a command, printed as one line on stderr.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
    Io { path: PathBuf, message: String },
    Pipeline(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io { .. } => "io",
            CliError::Pipeline(_) => "pipeline",
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Config(m) | CliError::Pipeline(m) => m.clone(),
            CliError::Io { path, message } => format!("{}: {message}", path.display()),
        }
    }
}

impl fmt::Display for CliError {
    /// `error kind=<kind> message=<JSON string>`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = serde_json::to_string(&self.message()).expect("string serializes");
        write!(f, "error kind={} message={msg}", self.kind())
    }
}

impl std::error::Error for CliError {}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn pipeline<E: fmt::Display>(context: &str) -> impl Fn(E) -> CliError + '_ {
    move |e| CliError::Pipeline(format!("{context}: {e}"))
}

#[derive(Debug, Parser)]
#[command(name = "startle-surprise", version, about = "Startle, surprise and baseline classification from physiological recordings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic benchmark dataset.
    Synth(SynthArgs),
    /// Filter every recording in a directory.
    Preprocess(PreprocessArgs),
    /// Cut epochs for one window and write a feature table.
    Featurize(FeaturizeArgs),
    /// Run the full experiment grid and write the report.
    Sweep(SweepArgs),
    /// Render a report CSV into per-task tables and panel CSVs.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Recordings per event class.
    #[arg(long, default_value_t = 17)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = crate::synth::DEFAULT_SAMPLE_RATE_HZ)]
    pub fs: f64,
    #[arg(long, default_value_t = crate::synth::DEFAULT_DURATION_S)]
    pub duration: f64,
    #[arg(long, default_value_t = crate::synth::DEFAULT_ONSET_S)]
    pub onset: f64,
    #[arg(long, default_value_t = 1.0)]
    pub separability: f64,
}

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    #[arg(long)]
    pub data_dir: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub fs_override: Option<f64>,
    #[arg(long)]
    pub notch_q: Option<f64>,
    #[arg(long)]
    pub ppg_extra_hp: bool,
}

#[derive(Debug, Args)]
pub struct FeaturizeArgs {
    #[arg(long)]
    pub data_dir: PathBuf,
    /// Epoch length in seconds: 3, 5, 7 or 10.
    #[arg(long)]
    pub window: Window,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub fs_override: Option<f64>,
    #[arg(long)]
    pub baseline_guard_s: Option<f64>,
    /// Filter the recordings before cutting epochs.
    #[arg(long)]
    pub preprocess: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Config file; flags below override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    #[arg(long)]
    pub fs_override: Option<f64>,
    /// Comma list, e.g. `3,5,7,10`.
    #[arg(long)]
    pub windows: Option<String>,
    #[arg(long)]
    pub tasks: Option<String>,
    #[arg(long)]
    pub models: Option<String>,
    #[arg(long)]
    pub seeds: Option<usize>,
    #[arg(long)]
    pub master_seed: Option<u64>,
    #[arg(long)]
    pub n_boot: Option<usize>,
    #[arg(long)]
    pub baseline_guard_s: Option<f64>,
    #[arg(long)]
    pub notch_q: Option<f64>,
    #[arg(long)]
    pub ppg_extra_hp: Option<bool>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Any config key, e.g. `--set grid.svm_c=1,10`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Report CSV written by `sweep`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code: 0 on success, 2 for bad arguments or
/// configuration, 1 for any other failure.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let first = e.to_string();
            let line = first.lines().next().unwrap_or("invalid arguments");
            let line = line.trim_start_matches("error: ");
            eprintln!("{}", CliError::Config(line.to_string()));
            return 2;
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            if matches!(e, CliError::Config(_)) {
                2
            } else {
                1
            }
        }
    }
}

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Synth(a) => cmd_synth(&a),
        Command::Preprocess(a) => cmd_preprocess(&a),
        Command::Featurize(a) => cmd_featurize(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Report(a) => cmd_report(&a),
    }
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(io_err(path))
}

pub fn cmd_synth(a: &SynthArgs) -> Result<(), CliError> {
    let spec = RecordingSpec {
        duration_s: a.duration,
        onset_s: a.onset,
        fs_hz: a.fs,
    };
    let params = EffectParams {
        separability: a.separability,
        ..EffectParams::default()
    };
    let recordings = synth_benchmark(a.n, &spec, a.seed, &params).map_err(pipeline("synth"))?;
    create_dir(&a.out)?;
    for rec in &recordings {
        save_recording(&a.out, rec)?;
    }
    Ok(())
}

fn save_recording(dir: &Path, rec: &RawRecording) -> Result<(), CliError> {
    let id = rec.participant_id();
    write(&dir.join(format!("{id}{RECORDING_SUFFIX}")), &write_recording(rec))?;
    write(&dir.join(format!("{id}{ANNOTATION_SUFFIX}")), &write_annotations(rec.annotations()))
}

/// Reads every `<id>_recording.csv` in `dir` with its `<id>_annotations.csv`,
/// in participant id order.
pub fn load_dataset(dir: &Path, fs_override: Option<f64>) -> Result<Vec<RawRecording>, CliError> {
    let mut ids = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let name = entry.map_err(io_err(dir))?.file_name();
        if let Some(id) = name.to_string_lossy().strip_suffix(RECORDING_SUFFIX) {
            ids.push(id.to_string());
        }
    }
    ids.sort();
    if ids.is_empty() {
        return Err(CliError::Io {
            path: dir.to_path_buf(),
            message: format!("no *{RECORDING_SUFFIX} files"),
        });
    }
    ids.iter()
        .map(|id| {
            let rec_path = dir.join(format!("{id}{RECORDING_SUFFIX}"));
            let ann_path = dir.join(format!("{id}{ANNOTATION_SUFFIX}"));
            let file = fs::File::open(&rec_path).map_err(io_err(&rec_path))?;
            let context = rec_path.display().to_string();
            let mut rec = parse_recording(std::io::BufReader::new(file), fs_override)
                .map_err(pipeline(&context))?
                .with_participant_id(id.clone());
            let text = fs::read_to_string(&ann_path).map_err(io_err(&ann_path))?;
            let context = ann_path.display().to_string();
            let anns = parse_annotations(text.as_bytes(), &rec).map_err(pipeline(&context))?;
            rec.set_annotations(anns).map_err(pipeline(&context))?;
            Ok(rec)
        })
        .collect()
}

pub fn cmd_preprocess(a: &PreprocessArgs) -> Result<(), CliError> {
    let mut cfg = RunConfig::default();
    if let Some(q) = a.notch_q {
        cfg.set("notch_q", &q.to_string()).map_err(CliError::Config)?;
    }
    cfg.ppg_extra_hp = a.ppg_extra_hp;
    let recordings = load_dataset(&a.data_dir, a.fs_override)?;
    create_dir(&a.out)?;
    for rec in &recordings {
        let clean = preprocess_recording(rec, &cfg.preprocess())
            .map_err(pipeline(rec.participant_id()))?;
        save_recording(&a.out, &clean)?;
    }
    Ok(())
}

pub fn cmd_featurize(a: &FeaturizeArgs) -> Result<(), CliError> {
    let mut cfg = RunConfig::default();
    if let Some(g) = a.baseline_guard_s {
        cfg.set("baseline_guard_s", &g.to_string()).map_err(CliError::Config)?;
    }
    let mut recordings = load_dataset(&a.data_dir, a.fs_override)?;
    if a.preprocess {
        recordings = recordings
            .iter()
            .map(|r| preprocess_recording(r, &cfg.preprocess()).map_err(pipeline(r.participant_id())))
            .collect::<Result<_, _>>()?;
    }
    let epoching = EpochingConfig::new(a.window, cfg.baseline_guard_s).map_err(pipeline("epoching"))?;
    let entries = balance_baseline(build_dataset(&recordings, &epoching).map_err(pipeline("epoching"))?);
    let rows: Vec<_> = featurize(&entries)
        .map_err(pipeline("features"))?
        .into_iter()
        .map(|f| (f.features, f.label))
        .collect();
    let table = write_feature_table(&rows).map_err(pipeline("feature table"))?;
    if let Some(parent) = a.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    write(&a.out, &table)
}

/// Config file (if any) with the flags applied on top.
pub fn sweep_config(a: &SweepArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match &a.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(io_err(path))?;
            RunConfig::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    let mut overrides: Vec<(String, String)> = Vec::new();
    let mut put = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            overrides.push((k.to_string(), v));
        }
    };
    put("data_dir", a.data_dir.as_ref().map(|p| p.display().to_string()));
    put("output_dir", a.output_dir.as_ref().map(|p| p.display().to_string()));
    put("fs_override", a.fs_override.map(|v| v.to_string()));
    put("windows", a.windows.clone());
    put("tasks", a.tasks.clone());
    put("models", a.models.clone());
    put("seeds", a.seeds.map(|v| v.to_string()));
    put("master_seed", a.master_seed.map(|v| v.to_string()));
    put("n_boot", a.n_boot.map(|v| v.to_string()));
    put("baseline_guard_s", a.baseline_guard_s.map(|v| v.to_string()));
    put("notch_q", a.notch_q.map(|v| v.to_string()));
    put("ppg_extra_hp", a.ppg_extra_hp.map(|v| v.to_string()));
    put("threads", a.threads.map(|v| v.to_string()));
    for kv in &a.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("--set expects KEY=VALUE, got '{kv}'")))?;
        put(k.trim(), Some(v.to_string()));
    }
    for (k, v) in overrides {
        cfg.set(&k, &v).map_err(CliError::Config)?;
    }
    Ok(cfg)
}

pub fn cmd_sweep(a: &SweepArgs) -> Result<(), CliError> {
    let cfg = sweep_config(a)?;
    let data_dir = cfg
        .data_dir
        .clone()
        .ok_or_else(|| CliError::Config("data_dir is not set".into()))?;
    let recordings = load_dataset(&data_dir, cfg.fs_override)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(pipeline("thread pool"))?;
    let report = pool
        .install(|| run_pipeline(&recordings, &cfg.pipeline()))
        .map_err(pipeline("sweep"))?;
    create_dir(&cfg.output_dir)?;
    write(&cfg.output_dir.join("effective_config.cfg"), &cfg.to_text())?;
    write(&cfg.output_dir.join("report.csv"), &report.to_csv())?;
    write(&cfg.output_dir.join("summary.json"), &report.summary_json())
}

fn cell_text(r: &CsvRow) -> String {
    format!("{:.3} [{:.3}, {:.3}]", r.mean_acc, r.ci_low, r.ci_high)
}

fn panel_csv(rows: &[&CsvRow], first: &str, chance: f64) -> String {
    let mut out = format!("{first},source,mean_acc,ci_low,ci_high,chance\n");
    for r in rows {
        let lead = if first == "model" {
            r.model.to_string()
        } else {
            r.window_s.to_string()
        };
        out.push_str(&format!(
            "{lead},{},{:.6},{:.6},{:.6},{:.6}\n",
            r.source, r.mean_acc, r.ci_low, r.ci_high, chance
        ));
    }
    out
}

/// Writes, per task present in the report:
/// - `<task>_table.txt`: every window and model against every source;
/// - `<task>_best_window.csv`: all models and sources at the window with the
///   highest accuracy cell;
/// - `<task>_best_model.csv`: all windows and sources for the model with the
///   highest accuracy averaged over its cells.
pub fn cmd_report(a: &ReportArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&a.input).map_err(io_err(&a.input))?;
    let rows = parse_report_csv(&text).map_err(|e| CliError::Pipeline(e.to_string()))?;
    create_dir(&a.out)?;
    let mut by_task: BTreeMap<ComparisonTask, Vec<&CsvRow>> = BTreeMap::new();
    for r in &rows {
        by_task.entry(r.task).or_default().push(r);
    }
    for (task, cells) in by_task {
        let chance = task.chance_level();
        let sources: Vec<SignalSource> = SignalSource::ALL
            .into_iter()
            .filter(|s| cells.iter().any(|c| c.source == *s))
            .collect();
        let mut keys: Vec<(u32, ModelKind)> = cells.iter().map(|c| (c.window_s, c.model)).collect();
        keys.sort();
        keys.dedup();

        let mut table = format!("{task} (chance {:.1}%)\n{:<8} {:<12}", chance * 100.0, "window", "model");
        for s in &sources {
            table.push_str(&format!(" {:<22}", s.name()));
        }
        table.push('\n');
        for (w, m) in &keys {
            table.push_str(&format!("{:<8} {:<12}", format!("{w} s"), m.name()));
            for s in &sources {
                let text = cells
                    .iter()
                    .find(|c| c.window_s == *w && c.model == *m && c.source == *s)
                    .map_or("-".to_string(), |c| cell_text(c));
                table.push_str(&format!(" {text:<22}"));
            }
            table.push('\n');
        }
        write(&a.out.join(format!("{task}_table.txt")), &table)?;

        // Earlier entries win ties: smaller windows, then model order.
        let best_window = cells
            .iter()
            .fold(None::<&CsvRow>, |best, c| match best {
                Some(b) if b.mean_acc > c.mean_acc || (b.mean_acc == c.mean_acc && b.window_s <= c.window_s) => Some(b),
                _ => Some(c),
            })
            .expect("task has cells")
            .window_s;
        let mut panel: Vec<&CsvRow> = cells.iter().copied().filter(|c| c.window_s == best_window).collect();
        panel.sort_by_key(|c| (c.model, c.source));
        write(
            &a.out.join(format!("{task}_best_window.csv")),
            &panel_csv(&panel, "model", chance),
        )?;

        let mut models: Vec<ModelKind> = cells.iter().map(|c| c.model).collect();
        models.sort();
        models.dedup();
        let avg = |m: ModelKind| {
            let v: Vec<f64> = cells.iter().filter(|c| c.model == m).map(|c| c.mean_acc).collect();
            v.iter().sum::<f64>() / v.len() as f64
        };
        let best_model = models
            .iter()
            .copied()
            .fold(None::<(ModelKind, f64)>, |best, m| match best {
                Some((_, b)) if b >= avg(m) => best,
                _ => Some((m, avg(m))),
            })
            .expect("task has cells")
            .0;
        let mut panel: Vec<&CsvRow> = cells.iter().copied().filter(|c| c.model == best_model).collect();
        panel.sort_by_key(|c| (c.window_s, c.source));
        write(
            &a.out.join(format!("{task}_best_model.csv")),
            &panel_csv(&panel, "window_s", chance),
        )?;
    }
    Ok(())
}
