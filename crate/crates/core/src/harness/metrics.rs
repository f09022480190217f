use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::agent::Exploration;
use crate::error::{Error, Result};
use crate::sim::EpochStats;

pub const CSV_HEADER: &str = "epoch,network_cost,latency_per_user,financial_per_user,sla_per_user,cpu_util,mem_util,cloud_fraction,active_users,mean_reward,eps,clip_c";

/// One row of the metrics stream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    pub epoch: u64,
    pub network_cost: f64,
    pub latency_per_user: f64,
    pub financial_per_user: f64,
    pub sla_per_user: f64,
    pub cpu_util: f64,
    pub mem_util: f64,
    pub cloud_fraction: f64,
    pub active_users: u64,
    /// Mean of `-psi` over the epoch's decisions.
    pub mean_reward: f64,
    /// Exploration levels after the epoch; zero for non-learners and in evaluation.
    pub eps: f64,
    pub clip_c: f64,
}

impl EpochMetrics {
    pub fn from_stats(stats: &EpochStats, exploration: Option<Exploration>) -> Self {
        let e = exploration.unwrap_or(Exploration { eps: 0.0, clip_c: 0.0 });
        Self {
            epoch: stats.epoch,
            network_cost: stats.network_cost,
            latency_per_user: stats.latency_per_user,
            financial_per_user: stats.financial_per_user,
            sla_per_user: stats.sla_per_user,
            cpu_util: stats.cpu_util,
            mem_util: stats.mem_util,
            cloud_fraction: stats.cloud_fraction,
            active_users: stats.active_users,
            mean_reward: -stats.mean_psi,
            eps: e.eps,
            clip_c: e.clip_c,
        }
    }

    fn floats(&self) -> [f64; 9] {
        [
            self.network_cost,
            self.latency_per_user,
            self.financial_per_user,
            self.sla_per_user,
            self.cpu_util,
            self.mem_util,
            self.cloud_fraction,
            self.mean_reward,
            self.eps,
        ]
    }

    pub fn to_csv_row(&self) -> String {
        let f = self.floats();
        let mut s = format!("{}", self.epoch);
        for v in &f[..7] {
            write!(s, ",{}", fmt_sig9(*v)).unwrap();
        }
        write!(s, ",{},{},{},{}", self.active_users, fmt_sig9(f[7]), fmt_sig9(f[8]), fmt_sig9(self.clip_c)).unwrap();
        s
    }

    pub fn parse_csv_row(line: &str) -> Result<Self> {
        let cells: Vec<&str> = line.trim_end().split(',').collect();
        if cells.len() != 12 {
            return Err(Error::Shape(format!("metrics row has {} cells, expected 12", cells.len())));
        }
        let int = |s: &str| s.parse::<u64>().map_err(|e| Error::Shape(format!("`{s}`: {e}")));
        let num = |s: &str| s.parse::<f64>().map_err(|e| Error::Shape(format!("`{s}`: {e}")));
        Ok(Self {
            epoch: int(cells[0])?,
            network_cost: num(cells[1])?,
            latency_per_user: num(cells[2])?,
            financial_per_user: num(cells[3])?,
            sla_per_user: num(cells[4])?,
            cpu_util: num(cells[5])?,
            mem_util: num(cells[6])?,
            cloud_fraction: num(cells[7])?,
            active_users: int(cells[8])?,
            mean_reward: num(cells[9])?,
            eps: num(cells[10])?,
            clip_c: num(cells[11])?,
        })
    }

    /// The row as it reads back from a metrics file.
    pub fn rounded(&self) -> Self {
        Self::parse_csv_row(&self.to_csv_row()).expect("own rows parse")
    }
}

/// Nine significant digits: positional for magnitudes in `[1e-4, 1e9)`,
/// scientific otherwise. Trailing zeros are dropped.
pub fn fmt_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let a = x.abs();
    if (1e-4..1e9).contains(&a) {
        let exp = a.log10().floor() as i32;
        let decimals = (8 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        // rounding may carry into a new digit (e.g. 9.99999999996 -> 10.00000000)
        let carried = s.parse::<f64>().map_or(false, |v| v.abs() >= 10f64.powi(exp + 1));
        let s = if carried && decimals > 0 {
            format!("{x:.prec$}", prec = decimals - 1)
        } else {
            s
        };
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.8e}")
    }
}

/// Streams metrics rows to a file.
pub struct MetricsWriter<W: Write> {
    out: W,
}

impl<W: Write> MetricsWriter<W> {
    pub fn new(mut out: W) -> Result<Self> {
        writeln!(out, "{CSV_HEADER}").map_err(|e| Error::io("<metrics>", e))?;
        Ok(Self { out })
    }

    pub fn write(&mut self, m: &EpochMetrics) -> Result<()> {
        writeln!(self.out, "{}", m.to_csv_row()).map_err(|e| Error::io("<metrics>", e))
    }

    pub fn flush(&mut self) -> Result<()> {
        self.out.flush().map_err(|e| Error::io("<metrics>", e))
    }
}

pub fn write_metrics(path: &Path, rows: &[EpochMetrics]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = MetricsWriter::new(std::io::BufWriter::new(file))?;
    for r in rows {
        w.write(r)?;
    }
    w.flush()
}

pub fn read_metrics(path: &Path) -> Result<Vec<EpochMetrics>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = std::io::BufReader::new(file).lines();
    let header = lines
        .next()
        .transpose()
        .map_err(|e| Error::io(path, e))?
        .unwrap_or_default();
    if header.trim_end() != CSV_HEADER {
        return Err(Error::Shape(format!("{}: unexpected header", path.display())));
    }
    lines
        .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
        .map(|l| EpochMetrics::parse_csv_row(&l.map_err(|e| Error::io(path, e))?))
        .collect()
}
