use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use vnf_lab::harness::{
    compare, evaluate, load_config, resolve_seed, run_experiment, write_metrics, AgentConfig, ExperimentConfig, Kpis,
    DEFAULTS_TOML,
};

#[derive(Parser)]
#[command(name = "vnf-lab", version, about = "Train, evaluate and compare VNF placement agents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train (or just run, for fixed policies) one agent on one seed.
    Train(TrainArgs),
    /// Evaluate an agent with exploration off, optionally from a checkpoint.
    Eval(EvalArgs),
    /// Run several agents on identical traffic and tabulate their KPIs.
    Compare(CompareArgs),
    /// Parse and validate a configuration document.
    ValidateConfig(ConfigArg),
    /// Print the shipped default configuration document.
    ExportDefaults {
        /// Write to this file instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ConfigArg {
    /// Configuration document; the shipped defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct Common {
    #[command(flatten)]
    config: ConfigArg,
    /// Random seed. Falls back to `run.seed`, then to VNF_LAB_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Agent to use instead of the one in the configuration.
    #[arg(long)]
    agent: Option<String>,
    /// Suppress the summary printed on success.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    common: Common,
    /// Training epochs (overrides `run.total_epochs`).
    #[arg(long)]
    epochs: Option<u64>,
    /// Evaluation epochs run after training (overrides `run.eval_epochs`).
    #[arg(long)]
    eval_epochs: Option<u64>,
    /// Output directory; defaults to `runs/<agent>-seed-<seed>`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    common: Common,
    /// Checkpoint written by `train`.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Evaluation epochs (overrides `run.eval_epochs`).
    #[arg(long)]
    epochs: Option<u64>,
    /// Directory for the evaluation metrics file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    config: ConfigArg,
    /// Comma-separated agent names.
    #[arg(long, value_delimiter = ',', default_value = "pat,greedy,cloud,random")]
    agents: Vec<String>,
    /// Comma-separated seeds; a single resolved seed when omitted.
    #[arg(long, value_delimiter = ',')]
    seeds: Vec<u64>,
    /// Training epochs per run (overrides `run.total_epochs`).
    #[arg(long)]
    epochs: Option<u64>,
    /// Output directory for per-run files and the comparison tables.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    quiet: bool,
}

fn base_config(arg: &ConfigArg) -> Result<ExperimentConfig> {
    match &arg.config {
        Some(p) => load_config(p).with_context(|| format!("loading {}", p.display())),
        None => Ok(ExperimentConfig::defaults()),
    }
}

/// Swaps in `name` unless the document already configures that agent.
fn with_agent(mut cfg: ExperimentConfig, name: Option<&str>) -> Result<ExperimentConfig> {
    if let Some(name) = name {
        if cfg.agent.name() != name {
            cfg.agent = AgentConfig::by_name(name)?;
        }
    }
    Ok(cfg)
}

fn print_kpis(title: &str, k: &Kpis) {
    println!("{title}");
    for (name, v) in Kpis::NAMES.iter().zip(k.values()) {
        println!("  {name:<18} {v:.6}");
    }
}

fn train(args: TrainArgs) -> Result<()> {
    let mut cfg = with_agent(base_config(&args.common.config)?, args.common.agent.as_deref())?;
    if let Some(e) = args.epochs {
        cfg.run.total_epochs = e;
    }
    if let Some(e) = args.eval_epochs {
        cfg.run.eval_epochs = e;
    }
    cfg.validate()?;
    let seed = resolve_seed(args.common.seed, cfg.run.seed)?;
    let out = args
        .out
        .unwrap_or_else(|| PathBuf::from("runs").join(format!("{}-seed-{seed}", cfg.agent.name())));
    let art = run_experiment(&cfg, seed, Some(&out))?;
    if !args.common.quiet {
        println!("{} seed {seed}: {} epochs, outputs in {}", art.summary.agent, cfg.run.total_epochs, out.display());
        print_kpis("training (all epochs)", &art.summary.train);
        print_kpis("evaluation", &art.summary.eval);
    }
    Ok(())
}

fn eval(args: EvalArgs) -> Result<()> {
    let cfg = with_agent(base_config(&args.common.config)?, args.common.agent.as_deref())?;
    cfg.validate()?;
    let epochs = args.epochs.unwrap_or(cfg.run.eval_epochs);
    if epochs == 0 {
        bail!("evaluation needs at least one epoch");
    }
    let checkpoint = match &args.checkpoint {
        Some(p) => Some(read_json(p)?),
        None if cfg.agent.is_learner() => bail!("agent `{}` needs --checkpoint to be evaluated", cfg.agent.name()),
        None => None,
    };
    let seed = resolve_seed(args.common.seed, cfg.run.seed)?;
    let rows = evaluate(&cfg, seed, checkpoint.as_ref(), epochs)?;
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        write_metrics(&dir.join("eval_metrics.csv"), &rows)?;
    }
    if !args.common.quiet {
        print_kpis(&format!("{} seed {seed}, {epochs} evaluation epochs", cfg.agent.name()), &Kpis::from_metrics(&rows));
    }
    Ok(())
}

fn read_json(path: &Path) -> Result<serde_json::Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn run_compare(args: CompareArgs) -> Result<()> {
    let mut base = base_config(&args.config)?;
    if let Some(e) = args.epochs {
        base.run.total_epochs = e;
    }
    if args.agents.is_empty() {
        bail!("no agents given");
    }
    let configs = args
        .agents
        .iter()
        .map(|a| with_agent(base.clone(), Some(a)))
        .collect::<Result<Vec<_>>>()?;
    let seeds = if args.seeds.is_empty() {
        vec![resolve_seed(None, base.run.seed)?]
    } else {
        args.seeds
    };
    let table = compare(&configs, &seeds, args.out.as_deref())?;
    if !args.quiet {
        println!("{:<10} {:>14} {:>14} {:>14} {:>14}", "agent", "network_cost", "cloud_frac", "cpu_util", "mean_reward");
        for e in &table.entries {
            let m = |k: &str| e.eval.mean(k).unwrap_or(f64::NAN);
            println!(
                "{:<10} {:>14.4} {:>14.4} {:>14.4} {:>14.4}",
                e.label,
                m("network_cost"),
                m("cloud_fraction"),
                m("cpu_util"),
                m("mean_reward")
            );
        }
        println!("evaluation means over seeds {seeds:?}");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train(a) => train(a),
        Command::Eval(a) => eval(a),
        Command::Compare(a) => run_compare(a),
        Command::ValidateConfig(a) => {
            let cfg = base_config(&a)?;
            println!(
                "ok: {} servers, {} VNFs, agent {}",
                cfg.pool.k_servers,
                cfg.vnfs.len(),
                cfg.agent.name()
            );
            Ok(())
        }
        Command::ExportDefaults { out: Some(p) } => {
            std::fs::write(&p, DEFAULTS_TOML).with_context(|| format!("writing {}", p.display()))
        }
        Command::ExportDefaults { out: None } => {
            print!("{DEFAULTS_TOML}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
