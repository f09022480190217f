use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::experiment::{run_experiment, seed_dir, write_json, RunSummary, EVAL_FILE, METRICS_FILE};
use super::kpi::{KpiAggregate, Kpis};
use super::metrics::{fmt_sig9, read_metrics, EpochMetrics};
use crate::error::{Error, Result};

/// One agent's results across seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareEntry {
    pub label: String,
    pub agent: String,
    pub seeds: Vec<u64>,
    pub runs: Vec<RunSummary>,
    /// Training means, per seed as persisted, then aggregated.
    pub train: KpiAggregate,
    pub train_tail: KpiAggregate,
    pub eval: KpiAggregate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub smoothing_window: u64,
    pub entries: Vec<CompareEntry>,
}

/// Plot-ready record: one indicator of one seed (or of the seed mean, with
/// `seed` empty) in one phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LongRecord {
    pub agent: String,
    pub seed: Option<u64>,
    pub phase: String,
    pub metric: String,
    pub value: f64,
}

impl Comparison {
    pub fn entry(&self, label: &str) -> Option<&CompareEntry> {
        self.entries.iter().find(|e| e.label == label)
    }

    pub fn long_records(&self) -> Vec<LongRecord> {
        let mut out = Vec::new();
        for e in &self.entries {
            for (phase, agg, pick) in [
                ("train", &e.train, (|r: &RunSummary| r.train) as fn(&RunSummary) -> Kpis),
                ("train_tail", &e.train_tail, |r: &RunSummary| r.train_tail),
                ("eval", &e.eval, |r: &RunSummary| r.eval),
            ] {
                for run in &e.runs {
                    for (metric, value) in Kpis::NAMES.iter().zip(pick(run).values()) {
                        out.push(LongRecord {
                            agent: e.label.clone(),
                            seed: Some(run.seed),
                            phase: phase.into(),
                            metric: metric.to_string(),
                            value,
                        });
                    }
                }
                for (metric, ms) in &agg.indicators {
                    out.push(LongRecord {
                        agent: e.label.clone(),
                        seed: None,
                        phase: phase.into(),
                        metric: metric.clone(),
                        value: ms.mean,
                    });
                }
            }
        }
        out
    }
}

fn labels(configs: &[ExperimentConfig]) -> Vec<String> {
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    configs
        .iter()
        .map(|c| {
            let name = c.agent.name();
            let n = seen.entry(name).or_default();
            *n += 1;
            if *n == 1 {
                name.to_string()
            } else {
                format!("{name}-{n}")
            }
        })
        .collect()
}

/// Runs every configuration on the same seeded traffic and tabulates the
/// indicators. Configurations must describe the same scenario.
///
/// With `out`, each run lands in `<out>/<label>/seed-<s>/`; per-seed figures
/// are then taken from the files as written, so the table reproduces what a
/// reader of those files would compute. `compare.csv` holds long-format
/// records and `compare.json` the full table.
pub fn compare(configs: &[ExperimentConfig], seeds: &[u64], out: Option<&Path>) -> Result<Comparison> {
    let first = configs.first().ok_or_else(|| Error::validation("nothing to compare"))?;
    if seeds.is_empty() {
        return Err(Error::validation("at least one seed is required"));
    }
    for c in configs {
        c.validate()?;
        if !first.same_scenario(c) {
            return Err(Error::Mismatch(format!(
                "agent `{}` runs a different pool, VNF set, cost or traffic model than `{}`",
                c.agent.name(),
                first.agent.name()
            )));
        }
        if c.run.total_epochs != first.run.total_epochs || c.run.eval_epochs != first.run.eval_epochs {
            return Err(Error::Mismatch("run lengths differ between entries".into()));
        }
    }
    let labels = labels(configs);
    let jobs: Vec<(usize, u64)> = (0..configs.len())
        .flat_map(|i| seeds.iter().map(move |&s| (i, s)))
        .collect();
    let runs: Vec<RunSummary> = jobs
        .par_iter()
        .map(|&(i, s)| -> Result<RunSummary> {
            let dir = out.map(|d| seed_dir(&d.join(&labels[i]), s));
            let art = run_experiment(&configs[i], s, dir.as_deref())?;
            let mut summary = art.summary;
            if let Some(dir) = &dir {
                let window = configs[i].run.smoothing_window as usize;
                let train: Vec<EpochMetrics> = read_metrics(&dir.join(METRICS_FILE))?;
                summary.train = Kpis::from_metrics(&train);
                summary.train_tail = Kpis::trailing(&train, window);
                summary.eval = Kpis::from_metrics(&read_metrics(&dir.join(EVAL_FILE))?);
            }
            Ok(summary)
        })
        .collect::<Result<_>>()?;

    let entries = configs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mine = &runs[i * seeds.len()..(i + 1) * seeds.len()];
            let agg = |f: fn(&RunSummary) -> Kpis| KpiAggregate::of(&mine.iter().map(f).collect::<Vec<_>>());
            CompareEntry {
                label: labels[i].clone(),
                agent: c.agent.name().to_string(),
                seeds: seeds.to_vec(),
                runs: mine.to_vec(),
                train: agg(|r| r.train),
                train_tail: agg(|r| r.train_tail),
                eval: agg(|r| r.eval),
            }
        })
        .collect();
    let cmp = Comparison {
        smoothing_window: first.run.smoothing_window,
        entries,
    };
    if let Some(dir) = out {
        write_json(&dir.join("compare.json"), &cmp)?;
        let path = dir.join("compare.csv");
        let mut w = std::io::BufWriter::new(std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?);
        let io = |e| Error::io(&path, e);
        writeln!(w, "agent,seed,phase,metric,value").map_err(io)?;
        for r in cmp.long_records() {
            let seed = r.seed.map_or_else(|| "mean".to_string(), |s| s.to_string());
            writeln!(w, "{},{seed},{},{},{}", r.agent, r.phase, r.metric, fmt_sig9(r.value)).map_err(io)?;
        }
        w.flush().map_err(io)?;
    }
    Ok(cmp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::AgentConfig;

    fn cfg(agent: &str) -> ExperimentConfig {
        let mut c = ExperimentConfig::defaults().shrink(3, 3).unwrap();
        c.agent = AgentConfig::by_name(agent).unwrap();
        c.run.total_epochs = 40;
        c.run.eval_epochs = 10;
        c
    }

    #[test]
    fn identical_agents_give_identical_rows() {
        let cmp = compare(&[cfg("cloud"), cfg("cloud")], &[0, 1], None).unwrap();
        assert_eq!(cmp.entries[0].label, "cloud");
        assert_eq!(cmp.entries[1].label, "cloud-2");
        assert_eq!(cmp.entries[0].train, cmp.entries[1].train);
        assert_eq!(cmp.entries[0].eval.mean("cloud_fraction"), Some(1.0));
    }

    #[test]
    fn refuses_different_scenarios() {
        let mut other = cfg("greedy");
        other.pool.rho_max = 40.0;
        assert!(matches!(compare(&[cfg("cloud"), other], &[0], None), Err(Error::Mismatch(_))));
    }

    #[test]
    fn summary_equals_mean_of_seed_files() {
        let dir = tempfile::tempdir().unwrap();
        let seeds = [3, 4, 5];
        let cmp = compare(&[cfg("greedy"), cfg("random")], &seeds, Some(dir.path())).unwrap();
        for e in &cmp.entries {
            let mut sum = 0.0;
            for &s in &seeds {
                let rows = read_metrics(&seed_dir(&dir.path().join(&e.label), s).join(METRICS_FILE)).unwrap();
                sum += rows.iter().map(|r| r.network_cost).sum::<f64>() / rows.len() as f64;
            }
            let mean = e.train.mean("network_cost").unwrap();
            assert!((sum / 3.0 - mean).abs() <= 1e-12);
        }
        let text = std::fs::read_to_string(dir.path().join("compare.csv")).unwrap();
        assert!(text.starts_with("agent,seed,phase,metric,value\n"));
        assert!(text.contains("greedy,mean,eval,cloud_fraction,"));
    }
}
