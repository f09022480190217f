use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{AgentConfig, ExperimentConfig};
use super::kpi::Kpis;
use super::metrics::{write_metrics, EpochMetrics, MetricsWriter};
use crate::agent::{Agent, PatAgent};
use crate::baselines::{CloudAgent, DdpgAgent, DdqnAgent, GreedyAgent, RandomAgent};
use crate::error::{Error, Result};
use crate::sim::{measure, AllocationState, EnvConfig, EpochReport, VnfEnv};

const ENV_STREAM: u64 = 1;
const AGENT_STREAM: u64 = 2;

/// Independent generators for traffic and for the agent, both derived from
/// `seed`. Traffic therefore never depends on which agent is running.
pub fn seed_streams(seed: u64) -> (ChaCha8Rng, ChaCha8Rng) {
    let mut env = ChaCha8Rng::seed_from_u64(seed);
    env.set_stream(ENV_STREAM);
    let mut agent = ChaCha8Rng::seed_from_u64(seed);
    agent.set_stream(AGENT_STREAM);
    (env, agent)
}

pub fn build_agent(agent: &AgentConfig, env: &EnvConfig, rng: ChaCha8Rng) -> Result<Box<dyn Agent>> {
    let (dim, k, scale) = (env.feature_len(), env.k_servers(), env.param_scale());
    Ok(match agent {
        AgentConfig::Pat(c) => Box::new(PatAgent::new(c.clone(), dim, k, scale, rng)?),
        AgentConfig::Greedy => Box::new(GreedyAgent),
        AgentConfig::Cloud => Box::new(CloudAgent),
        AgentConfig::Random => Box::new(RandomAgent::new(rng)),
        AgentConfig::Ddqn(c) => Box::new(DdqnAgent::new(c.clone(), dim, k, scale, rng)?),
        AgentConfig::Ddpg(c) => Box::new(DdpgAgent::new(c.clone(), dim, k, scale, rng)?),
    })
}

/// An environment and the agent driving it.
pub struct Session {
    env: VnfEnv,
    agent: Box<dyn Agent>,
}

impl Session {
    pub fn new(cfg: &ExperimentConfig, seed: u64) -> Result<Self> {
        let (env_rng, agent_rng) = seed_streams(seed);
        let env_cfg = cfg.env_config();
        let agent = build_agent(&cfg.agent, &env_cfg, agent_rng)?;
        Ok(Self {
            env: VnfEnv::new(env_cfg, env_rng)?,
            agent,
        })
    }

    /// Runs `agent` on the traffic of `seed`.
    pub fn with_agent(cfg: &ExperimentConfig, seed: u64, agent: Box<dyn Agent>) -> Result<Self> {
        let (env_rng, _) = seed_streams(seed);
        Ok(Self {
            env: VnfEnv::new(cfg.env_config(), env_rng)?,
            agent,
        })
    }

    pub fn env(&self) -> &VnfEnv {
        &self.env
    }

    pub fn agent(&self) -> &dyn Agent {
        self.agent.as_ref()
    }

    pub fn agent_mut(&mut self) -> &mut dyn Agent {
        self.agent.as_mut()
    }

    pub fn into_agent(self) -> Box<dyn Agent> {
        self.agent
    }

    /// One epoch. With `learn` the agent explores, observes every transition
    /// and trains; otherwise it acts greedily and learns nothing.
    pub fn run_epoch(&mut self, learn: bool) -> Result<(EpochMetrics, EpochReport)> {
        let agent = &mut self.agent;
        let report = self.env.advance_epoch(|d| agent.act(d, learn))?;
        let exploration = if learn {
            for t in &report.transitions {
                agent.observe(t);
            }
            agent.train()?;
            agent.exploration()
        } else {
            None
        };
        Ok((EpochMetrics::from_stats(&report.stats, exploration), report))
    }
}

/// Figures recorded at the end of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub agent: String,
    pub seed: u64,
    pub total_epochs: u64,
    pub eval_epochs: u64,
    pub smoothing_window: u64,
    /// Means over every training epoch.
    pub train: Kpis,
    /// Means over the trailing smoothing window of training.
    pub train_tail: Kpis,
    pub eval: Kpis,
    pub admitted: u64,
    pub departed: u64,
    pub infeasible: u64,
    pub final_eps: Option<f64>,
}

pub struct RunArtifacts {
    pub train: Vec<EpochMetrics>,
    pub eval: Vec<EpochMetrics>,
    pub summary: RunSummary,
    pub agent: Box<dyn Agent>,
}

/// One persisted allocation snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub epoch: u64,
    pub cloud_rate: f64,
    pub network_cost: f64,
    pub state: AllocationState,
}

impl Snapshot {
    /// Network cost recomputed from the stored allocation.
    pub fn recompute(&self, env: &EnvConfig) -> f64 {
        measure(env, &self.state, self.cloud_rate).network_cost
    }
}

pub fn read_snapshots(path: &Path) -> Result<Vec<Snapshot>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| Ok(serde_json::from_str(l)?))
        .collect()
}

pub const METRICS_FILE: &str = "metrics.csv";
pub const EVAL_FILE: &str = "eval_metrics.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const SNAPSHOT_FILE: &str = "snapshots.jsonl";
pub const CHECKPOINT_FILE: &str = "checkpoint.json";

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

/// Trains (for learners) for `total_epochs`, then evaluates for `eval_epochs`
/// on the continuing traffic with exploration off. With `out`, writes the
/// metrics stream, evaluation metrics, summary, optional snapshots and a
/// checkpoint for learners; rows written before a failure are kept.
pub fn run_experiment(cfg: &ExperimentConfig, seed: u64, out: Option<&Path>) -> Result<RunArtifacts> {
    cfg.validate()?;
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let run = &cfg.run;
    let env_cfg = cfg.env_config();
    let mut session = Session::new(cfg, seed)?;
    let mut writer = match out {
        Some(d) => Some(MetricsWriter::new(create(&d.join(METRICS_FILE))?)?),
        None => None,
    };
    let mut snapshots = match out {
        Some(d) if run.snapshots => Some(create(&d.join(SNAPSHOT_FILE))?),
        _ => None,
    };
    let learn = cfg.agent.is_learner();

    let mut train = Vec::with_capacity(run.total_epochs as usize);
    let mut infeasible = 0;
    let result: Result<()> = (|| {
        for epoch in 0..run.total_epochs {
            let (m, report) = session.run_epoch(learn)?;
            infeasible += report.stats.infeasible;
            if epoch % run.metrics_every == 0 {
                if let Some(w) = writer.as_mut() {
                    w.write(&m)?;
                }
            }
            if let Some(s) = snapshots.as_mut() {
                let snap = Snapshot {
                    epoch: m.epoch,
                    cloud_rate: report.traffic.cloud_rate,
                    network_cost: m.network_cost,
                    state: report.snapshot,
                };
                serde_json::to_writer(&mut *s, &snap)?;
                writeln!(s).map_err(|e| Error::io(SNAPSHOT_FILE, e))?;
            }
            train.push(m);
        }
        Ok(())
    })();
    if let Some(w) = writer.as_mut() {
        w.flush()?;
    }
    if let Some(s) = snapshots.as_mut() {
        s.flush().map_err(|e| Error::io(SNAPSHOT_FILE, e))?;
    }
    result?;
    let final_eps = session.agent().exploration().map(|e| e.eps);

    let mut eval = Vec::with_capacity(run.eval_epochs as usize);
    for _ in 0..run.eval_epochs {
        let (m, report) = session.run_epoch(false)?;
        infeasible += report.stats.infeasible;
        eval.push(m);
    }
    debug_assert_eq!(env_cfg, *session.env().config());

    let summary = RunSummary {
        agent: cfg.agent.name().to_string(),
        seed,
        total_epochs: run.total_epochs,
        eval_epochs: run.eval_epochs,
        smoothing_window: run.smoothing_window,
        train: Kpis::from_metrics(&train),
        train_tail: Kpis::trailing(&train, run.smoothing_window as usize),
        eval: Kpis::from_metrics(&eval),
        admitted: session.env().admitted(),
        departed: session.env().departed(),
        infeasible,
        final_eps,
    };
    if let Some(dir) = out {
        write_metrics(&dir.join(EVAL_FILE), &eval)?;
        write_json(&dir.join(SUMMARY_FILE), &summary)?;
        if learn {
            let ck = session.agent().checkpoint()?;
            write_json(&dir.join(CHECKPOINT_FILE), &ck)?;
            if let Some(p) = &run.checkpoint_path {
                write_json(p, &ck)?;
            }
        }
    }
    Ok(RunArtifacts {
        train,
        eval,
        summary,
        agent: session.into_agent(),
    })
}

/// Directory used for one seed of a multi-seed run.
pub fn seed_dir(root: &Path, seed: u64) -> PathBuf {
    root.join(format!("seed-{seed}"))
}

/// Runs independent seeds in parallel; results keep the order of `seeds`.
pub fn run_seeds(cfg: &ExperimentConfig, seeds: &[u64], out: Option<&Path>) -> Result<Vec<RunArtifacts>> {
    seeds
        .par_iter()
        .map(|&s| run_experiment(cfg, s, out.map(|d| seed_dir(d, s)).as_deref()))
        .collect()
}

/// Greedy evaluation of an agent restored from `checkpoint` on the traffic
/// of `seed`.
pub fn evaluate(
    cfg: &ExperimentConfig,
    seed: u64,
    checkpoint: Option<&serde_json::Value>,
    epochs: u64,
) -> Result<Vec<EpochMetrics>> {
    cfg.validate()?;
    let mut session = Session::new(cfg, seed)?;
    if let Some(ck) = checkpoint {
        session.agent_mut().restore(ck)?;
    }
    (0..epochs).map(|_| session.run_epoch(false).map(|(m, _)| m)).collect()
}
