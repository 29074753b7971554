use std::collections::BTreeMap;
use std::fs;
use std::panic;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, CommandFactory, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use radaug::augment::{Policy, PolicyKind};
use radaug::experiments::{
    eval_seed, evaluate, run_experiment, write_history, write_reports, AugPhase, ExperimentConfig,
};
use radaug::modem::{
    generate_dataset, parse_class_list, parse_snr_grid, GenConfig, ImpairmentRanges,
};
use radaug::nn::{Model, TrainConfig};
use radaug::{rsig, Error};

const EXIT_USAGE: u8 = 2;
const EXIT_DATA: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "radaug",
    version,
    about = "Synthesize I/Q datasets, train and evaluate LSTM modulation classifiers"
)]
#[command(args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Generate a labeled RSIG dataset.
    Gen(GenArgs),
    /// Train a classifier on an RSIG dataset and evaluate it on the held-out half.
    Train(TrainArgs),
    /// Evaluate a model on a dataset and write CSV reports.
    Eval(EvalArgs),
}

#[derive(Args, Debug, Serialize)]
struct Common {
    /// Flat `key = value` file; keys are flag names without the dashes.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
struct GenArgs {
    #[arg(long, default_value = "all")]
    classes: String,
    /// `start:stop:step` in dB, inclusive, or a single value.
    #[arg(long, default_value = "-20:18:2", allow_hyphen_values = true)]
    snr: String,
    #[arg(long, default_value_t = 1000)]
    per_class: usize,
    #[arg(long, default_value_t = 128)]
    len: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-3)]
    max_cfo: f64,
    #[arg(long, default_value_t = 50.0)]
    max_sro_ppm: f64,
    /// Disable the random carrier phase offset.
    #[arg(long)]
    no_random_phase: bool,
    /// Enable the random 3-tap multipath channel.
    #[arg(long)]
    multipath: bool,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Serialize)]
struct TrainArgs {
    #[arg(long)]
    data: PathBuf,
    /// Model output (RMDL).
    #[arg(long)]
    out: PathBuf,
    /// Directory for history.csv and the held-out reports (default: next to --out).
    #[arg(long)]
    report_dir: Option<PathBuf>,
    /// Also write the held-out test split as RSIG.
    #[arg(long)]
    test_out: Option<PathBuf>,
    #[arg(long, default_value = "none")]
    aug: String,
    /// Defaults to train-test when --aug is set, none otherwise.
    #[arg(long)]
    phase: Option<String>,
    /// Comma-separated standard deviations for --aug noise.
    #[arg(long)]
    noise_sigmas: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    fraction: f64,
    /// Frame length fed to the network; data twice as long is halved (default: data length).
    #[arg(long)]
    len: Option<usize>,
    #[arg(long)]
    split_before_halving: bool,
    #[arg(long, default_value_t = 80)]
    epochs: usize,
    #[arg(long, default_value_t = 128)]
    batch: usize,
    #[arg(long, default_value_t = 0.001)]
    lr: f64,
    #[arg(long, default_value_t = 0.5)]
    dropout: f64,
    #[arg(long, default_value_t = 3)]
    patience: usize,
    /// Global gradient-norm clip (off by default).
    #[arg(long)]
    clip: Option<f64>,
    #[arg(long, default_value_t = 128)]
    hidden: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Serialize)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// Test-time fusion policy.
    #[arg(long, default_value = "none")]
    tta: String,
    #[arg(long)]
    noise_sigmas: Option<String>,
    /// Seed for test-time noise.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report directory.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    common: Common,
}

/// Everything needed to replay a run.
#[derive(Serialize)]
struct RunManifest<'a> {
    tool: &'static str,
    version: &'static str,
    command_line: Vec<String>,
    config: serde_json::Value,
    seeds: BTreeMap<&'static str, u64>,
    inputs: BTreeMap<String, String>,
    outputs: BTreeMap<String, String>,
    summary: &'a str,
    started_unix: u64,
    finished_unix: u64,
}

struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidArgument(_) => EXIT_USAGE,
            _ => EXIT_DATA,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        msg: msg.into(),
    }
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_DATA,
        msg: format!("{}: {e}", path.display()),
    }
}

fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn digest(path: &Path) -> Result<String, Failure> {
    let bytes = fs::read(path).map_err(|e| io_failure(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn digests(paths: &[&Path]) -> Result<BTreeMap<String, String>, Failure> {
    paths
        .iter()
        .map(|p| Ok((p.display().to_string(), digest(p)?)))
        .collect()
}

/// Splices `--config` file entries in front of the explicit flags so the
/// explicit ones win under `args_override_self`.
fn expand_config(argv: Vec<String>) -> Result<Vec<String>, Failure> {
    let Some(sub_pos) = argv
        .iter()
        .position(|a| matches!(a.as_str(), "gen" | "train" | "eval"))
    else {
        return Ok(argv);
    };
    let rest = &argv[sub_pos + 1..];
    let mut path = None;
    for (i, a) in rest.iter().enumerate() {
        if a == "--config" {
            path = rest.get(i + 1).cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path).map_err(|e| io_failure(Path::new(&path), e))?;
    let cmd = Cli::command();
    let sub = cmd
        .find_subcommand(&argv[sub_pos])
        .expect("known subcommand");
    let mut injected = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("{path}:{}: expected key = value", n + 1)))?;
        let (key, value) = (key.trim().replace('_', "-"), value.trim());
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()) && key != "config")
            .ok_or_else(|| usage(format!("{path}:{}: unknown key {key:?}", n + 1)))?;
        if arg.get_action().takes_values() {
            injected.push(format!("--{key}={value}"));
        } else {
            match value {
                "true" => injected.push(format!("--{key}")),
                "false" => {}
                _ => {
                    return Err(usage(format!(
                        "{path}:{}: {key} expects true or false",
                        n + 1
                    )))
                }
            }
        }
    }
    let mut out = argv[..=sub_pos].to_vec();
    out.extend(injected);
    out.extend_from_slice(rest);
    Ok(out)
}

fn configure_threads(common: &Common) -> Result<(), Failure> {
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(usage("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure {
                code: EXIT_INTERNAL,
                msg: e.to_string(),
            })?;
    }
    Ok(())
}

fn parse_sigmas(s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("bad noise sigma {t:?}")))
        })
        .collect()
}

fn policy_from(name: &str, sigmas: Option<&str>) -> Result<Policy, Failure> {
    let kind: PolicyKind = name.parse()?;
    match (kind, sigmas) {
        (PolicyKind::Noise, Some(s)) => Ok(Policy::noise(&parse_sigmas(s)?)?),
        (_, Some(_)) => Err(usage("--noise-sigmas only applies to the noise policy")),
        (k, None) => Ok(Policy::builtin(k)),
    }
}

fn write_manifest(path: &Path, m: &RunManifest<'_>) -> Result<(), Failure> {
    let json = serde_json::to_string_pretty(m).map_err(|e| Failure {
        code: EXIT_INTERNAL,
        msg: e.to_string(),
    })?;
    fs::write(path, json + "\n").map_err(|e| io_failure(path, e))
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn snapshot(args: &impl Serialize) -> serde_json::Value {
    serde_json::to_value(args).unwrap_or(serde_json::Value::Null)
}

fn cmd_gen(a: &GenArgs, argv: &[String]) -> Result<(), Failure> {
    let started = now();
    let cfg = GenConfig {
        classes: parse_class_list(&a.classes)?,
        snr_grid: parse_snr_grid(&a.snr)?,
        frames_per_class_per_snr: a.per_class,
        seq_len: a.len,
        seed: a.seed,
        impairments: ImpairmentRanges {
            random_phase: !a.no_random_phase,
            max_cfo: a.max_cfo,
            max_sro_ppm: a.max_sro_ppm,
            multipath: a.multipath,
        },
    };
    cfg.validate()?;
    let ds = generate_dataset(&cfg)?;
    rsig::save(&ds, &a.out)?;
    let summary = format!(
        "{} frames: {} classes x {} SNRs x {} per class, length {}",
        ds.len(),
        cfg.classes.len(),
        cfg.snr_grid.len(),
        cfg.frames_per_class_per_snr,
        cfg.seq_len
    );
    println!("{summary}");
    write_manifest(
        &manifest_path(&a.out),
        &RunManifest {
            tool: "radaug",
            version: env!("CARGO_PKG_VERSION"),
            command_line: argv.to_vec(),
            config: snapshot(a),
            seeds: BTreeMap::from([("seed", a.seed)]),
            inputs: BTreeMap::new(),
            outputs: digests(&[&a.out])?,
            summary: &summary,
            started_unix: started,
            finished_unix: now(),
        },
    )
}

fn cmd_train(a: &TrainArgs, argv: &[String]) -> Result<(), Failure> {
    let started = now();
    let policy = policy_from(&a.aug, a.noise_sigmas.as_deref())?;
    let is_none = a.aug.eq_ignore_ascii_case("none");
    let phase = match (&a.phase, is_none) {
        (Some(p), _) => p.parse::<AugPhase>()?,
        (None, true) => AugPhase::None,
        (None, false) => AugPhase::TrainTest,
    };
    if is_none && phase != AugPhase::None {
        return Err(usage(format!(
            "--phase {phase} needs an augmentation policy (--aug)"
        )));
    }
    if !is_none && phase == AugPhase::None {
        return Err(usage(format!(
            "--aug {} has no effect with --phase none",
            a.aug
        )));
    }
    let data = rsig::load(&a.data)?;
    let cfg = ExperimentConfig {
        aug_phase: phase,
        policy,
        train_fraction: a.fraction,
        seq_len: a.len.unwrap_or(data.seq_len()),
        split_before_halving: a.split_before_halving,
        hidden: a.hidden,
        train: TrainConfig {
            epochs: a.epochs,
            batch_size: a.batch,
            initial_lr: a.lr,
            dropout: a.dropout,
            plateau_patience: a.patience,
            grad_clip: a.clip,
            seed: a.seed,
        },
        seed: a.seed,
    };
    cfg.validate()?;
    eprintln!("training: {}", cfg.describe());
    let outcome = run_experiment(&cfg, &data, |r| {
        eprintln!(
            "epoch {:>3}  loss {:.4}  acc {:.4}  lr {}",
            r.epoch, r.train_loss, r.train_acc, r.lr
        )
    })?;
    outcome.model.save(&a.out)?;
    let report_dir = match &a.report_dir {
        Some(d) => d.clone(),
        None => a.out.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    write_history(&report_dir, &outcome.history)?;
    write_reports(&report_dir, &outcome.metrics)?;
    let mut outputs: Vec<&Path> = vec![&a.out];
    if let Some(t) = &a.test_out {
        rsig::save(&outcome.test, t)?;
        outputs.push(t);
    }
    let summary = format!(
        "trained on {} frames, held-out accuracy {:.4} over {} frames",
        outcome.train_size,
        outcome.metrics.overall_accuracy(),
        outcome.metrics.total()
    );
    println!("{summary}");
    write_manifest(
        &manifest_path(&a.out),
        &RunManifest {
            tool: "radaug",
            version: env!("CARGO_PKG_VERSION"),
            command_line: argv.to_vec(),
            config: snapshot(a),
            seeds: BTreeMap::from([("seed", a.seed), ("train_seed", cfg.train.seed)]),
            inputs: digests(&[&a.data])?,
            outputs: digests(&outputs)?,
            summary: &summary,
            started_unix: started,
            finished_unix: now(),
        },
    )
}

fn cmd_eval(a: &EvalArgs, argv: &[String]) -> Result<(), Failure> {
    let started = now();
    let policy = policy_from(&a.tta, a.noise_sigmas.as_deref())?;
    let model = Model::load(&a.model)?;
    let data = rsig::load(&a.data)?;
    let tta = (!a.tta.eq_ignore_ascii_case("none")).then_some(&policy);
    let metrics = evaluate(&model, &data, tta, eval_seed(a.seed))?;
    write_reports(&a.out, &metrics)?;
    let summary = format!(
        "accuracy {:.4} over {} frames (tta: {})",
        metrics.overall_accuracy(),
        metrics.total(),
        policy.name
    );
    println!("{summary}");
    write_manifest(
        &a.out.join("manifest.json"),
        &RunManifest {
            tool: "radaug",
            version: env!("CARGO_PKG_VERSION"),
            command_line: argv.to_vec(),
            config: snapshot(a),
            seeds: BTreeMap::from([("seed", a.seed)]),
            inputs: digests(&[&a.model, &a.data])?,
            outputs: digests(&[&a.out.join("accuracy_vs_snr.csv")])?,
            summary: &summary,
            started_unix: started,
            finished_unix: now(),
        },
    )
}

fn run(argv: Vec<String>) -> Result<(), Failure> {
    let argv = expand_config(argv)?;
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return if code == 0 {
                Ok(())
            } else {
                Err(Failure {
                    code,
                    msg: String::new(),
                })
            };
        }
    };
    match &cli.cmd {
        Cmd::Gen(a) => {
            configure_threads(&a.common)?;
            cmd_gen(a, &argv)
        }
        Cmd::Train(a) => {
            configure_threads(&a.common)?;
            cmd_train(a, &argv)
        }
        Cmd::Eval(a) => {
            configure_threads(&a.common)?;
            cmd_eval(a, &argv)
        }
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    match panic::catch_unwind(|| run(argv)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(f)) => {
            if !f.msg.is_empty() {
                eprintln!("error: {}", f.msg);
            }
            ExitCode::from(f.code)
        }
        Err(_) => ExitCode::from(EXIT_INTERNAL),
    }
}
