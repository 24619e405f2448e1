//! Command-line front end: `score`, `grid` and `malmquist`.
//!
//! Exit codes: 0 on success, 2 when some rows or nodes failed (they are
//! still emitted, with a status), 1 on fatal errors.

pub mod grid;
pub mod ingest;
pub mod output;
pub mod score;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use compsbm::{malmquist_index, MaximinOptions, ModelConfig, Orientation, PanelInput, RegionRule, Returns, ScoreKind};
use serde::Deserialize;
use serde_json::{Map, Value};

use crate::grid::{GridScore, GridSpec};
use crate::output::json_number;
use crate::score::{Field, ScoreOptions};

pub const JOBS_ENV: &str = "COMPSBM_JOBS";

#[derive(Debug, Parser)]
#[command(name = "compsbm", version, about = "Slacks-based DEA scores, score grids and Malmquist indices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score every DMU of a dataset (against the others, by default).
    Score(ScoreArgs),
    /// Emit log2 of a score over a grid of (x1, x2) activities.
    Grid(GridArgs),
    /// Two-period Malmquist index of one DMU.
    Malmquist(MalmquistArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrientationArg {
    Non,
    In,
    Out,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RtsArg {
    Crs,
    Vrs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegionRuleArg {
    Projection,
    Pbar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MalmquistScore {
    Sbm,
    Compsbm,
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long, value_enum, default_value = "crs")]
    pub rts: RtsArg,
    /// Inner LP solves allowed per maximization (default 5000·(m+s)).
    #[arg(long)]
    pub budget: Option<usize>,
    /// Start the maximization at the super-efficiency projection and never
    /// report below it.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub seed_lower_bound: bool,
    /// Worker threads; 0 lets the pool decide.
    #[arg(long, env = JOBS_ENV, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    pub dataset: PathBuf,
    #[arg(long, value_enum, default_value = "non")]
    pub orientation: OrientationArg,
    /// JSON file `{"inputs": [...], "outputs": [...]}`; either key may be omitted.
    #[arg(long)]
    pub weights: Option<PathBuf>,
    /// Comma-separated columns: delta, rho_proj, max_rho, jsbm, csbm,
    /// gamma_low, gamma, gamma_se, sigma, region, converged, status.
    #[arg(long, value_delimiter = ',')]
    pub scores: Option<Vec<Field>>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Score each DMU against the full dataset, itself included.
    #[arg(long)]
    pub no_exclude: bool,
    #[arg(long, value_enum, default_value = "projection")]
    pub region_rule: RegionRuleArg,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    pub dataset: PathBuf,
    #[arg(long, default_value = "splice")]
    pub score: GridScore,
    #[arg(long)]
    pub x1min: f64,
    #[arg(long)]
    pub x1max: f64,
    #[arg(long)]
    pub x2min: f64,
    #[arg(long)]
    pub x2max: f64,
    /// Nodes per axis.
    #[arg(long, default_value_t = 41)]
    pub steps: usize,
    #[arg(long, default_value_t = 1.0)]
    pub y: f64,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct MalmquistArgs {
    pub period1: PathBuf,
    pub period2: PathBuf,
    /// DMU to evaluate.
    pub name: String,
    #[arg(long, value_enum, default_value = "sbm")]
    pub score: MalmquistScore,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightsFile {
    inputs: Option<Vec<f64>>,
    outputs: Option<Vec<f64>>,
}

fn base_config(common: &Common) -> ModelConfig {
    let rts = match common.rts {
        RtsArg::Crs => Returns::Constant,
        RtsArg::Vrs => Returns::Variable,
    };
    let mut cfg = ModelConfig::default().with_rts(rts);
    if let Some(b) = common.budget {
        cfg = cfg.with_budget(b);
    }
    cfg
}

fn maximin_options(common: &Common) -> MaximinOptions {
    MaximinOptions {
        seed_lower_bound: common.seed_lower_bound,
        ..MaximinOptions::default()
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool, String> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| format!("cannot start worker pool: {e}"))
}

/// Exit status plus what went to stdout.
enum Outcome {
    Done(String),
    Partial(String),
}

fn cmd_score(args: &ScoreArgs) -> Result<Outcome, String> {
    let data = ingest::ingest(&args.dataset).map_err(|e| e.to_string())?;
    let mut config = base_config(&args.common).with_orientation(match args.orientation {
        OrientationArg::Non => Orientation::NonOriented,
        OrientationArg::In => Orientation::Input,
        OrientationArg::Out => Orientation::Output,
    });
    if let Some(path) = &args.weights {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let w: WeightsFile = serde_json::from_str(&text).map_err(|e| format!("bad weights file {}: {e}", path.display()))?;
        config = config.with_weights(w.inputs, w.outputs);
    }
    let fields = args.scores.clone().unwrap_or_else(|| Field::DEFAULT.to_vec());
    let opts = ScoreOptions {
        config,
        fields: fields.clone(),
        exclude_self: !args.no_exclude,
        region_rule: match args.region_rule {
            RegionRuleArg::Projection => RegionRule::Projection,
            RegionRuleArg::Pbar => RegionRule::Pbar,
        },
        maximin: maximin_options(&args.common),
    };
    let rows = pool(args.common.jobs)?
        .install(|| score::score_all(&data.set, &opts))
        .map_err(|e| e.to_string())?;
    let table = score::to_table(&rows, &fields);
    let text = match args.format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    };
    if rows.iter().all(|r| r.is_ok()) {
        Ok(Outcome::Done(text))
    } else {
        Ok(Outcome::Partial(text))
    }
}

fn cmd_grid(args: &GridArgs) -> Result<Outcome, String> {
    let data = ingest::ingest(&args.dataset).map_err(|e| e.to_string())?;
    let spec = GridSpec {
        score: args.score,
        x1: (args.x1min, args.x1max),
        x2: (args.x2min, args.x2max),
        steps: args.steps,
        y: args.y,
    };
    let cfg = base_config(&args.common);
    let opts = maximin_options(&args.common);
    let nodes = pool(args.common.jobs)?
        .install(|| grid::run_grid(&data.set, &spec, &cfg, &opts))
        .map_err(|e| e.to_string())?;
    let table = grid::to_table(&nodes);
    let text = match args.format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    };
    if nodes.iter().all(|n| n.status == "ok") {
        Ok(Outcome::Done(text))
    } else {
        Ok(Outcome::Partial(text))
    }
}

fn cmd_malmquist(args: &MalmquistArgs) -> Result<Outcome, String> {
    let p1 = ingest::ingest(&args.period1).map_err(|e| e.to_string())?;
    let p2 = ingest::ingest(&args.period2).map_err(|e| e.to_string())?;
    let kind = match args.score {
        MalmquistScore::Sbm => ScoreKind::SbmGlobal,
        MalmquistScore::Compsbm => ScoreKind::CompSbm,
    };
    let panel = PanelInput::new(p1.set, p2.set, args.name.clone(), kind).map_err(|e| e.to_string())?;
    let cfg = base_config(&args.common);
    let r = pool(args.common.jobs)?
        .install(|| malmquist_index(&panel, &cfg))
        .map_err(|e| e.to_string())?;
    let mut obj = Map::new();
    obj.insert("name".into(), Value::String(args.name.clone()));
    obj.insert(
        "score".into(),
        Value::String(match kind {
            ScoreKind::SbmGlobal => "sbm".into(),
            ScoreKind::CompSbm => "compsbm".into(),
        }),
    );
    let e = r.intermediates;
    for (k, v) in [
        ("catch_up", r.catch_up),
        ("frontier_shift", r.frontier_shift),
        ("index", r.index),
        ("e1_a1", e.e1_a1),
        ("e2_a2", e.e2_a2),
        ("e2_a1", e.e2_a1),
        ("e1_a2", e.e1_a2),
    ] {
        obj.insert(k.into(), json_number(v));
    }
    let mut text = serde_json::to_string_pretty(&Value::Object(obj)).expect("serializable");
    text.push('\n');
    Ok(Outcome::Done(text))
}

/// Parses `args` (program name first) and runs the command; returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Score(a) => cmd_score(a),
        Command::Grid(a) => cmd_grid(a),
        Command::Malmquist(a) => cmd_malmquist(a),
    };
    match result {
        Ok(Outcome::Done(text)) => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Ok(Outcome::Partial(text)) => {
            let _ = out.write_all(text.as_bytes());
            let _ = writeln!(err, "compsbm: some rows failed; see the status column");
            2
        }
        Err(msg) => {
            let _ = writeln!(err, "compsbm: {msg}");
            1
        }
    }
}
