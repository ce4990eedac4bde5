//! Seeded Monte Carlo sweeps over `(n, m)` cells.
//!
//! Trial `t` of cell `(n, m)` draws its graphs from
//! `fold_seed(master_seed, [n, m, t])`, split into stream 1 for `x` and
//! stream 2 for `y`, so tallies do not depend on scheduling.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{sample_gnp, EdgeLaw, MAX_VERTICES};
use crate::isosearch::{common_exists, embed_exists, Budget, SearchStatus};
use crate::params::{ModelParams, Problem};
use crate::rng::fold_seed;
use crate::thresholds::m_star;

/// Column order of the CSV export and key set of the JSONL export.
pub const COLUMNS: [&str; 14] = [
    "problem",
    "n",
    "m",
    "p",
    "q",
    "trials",
    "successes",
    "unknowns",
    "p_hat",
    "ci_low",
    "ci_high",
    "mean_nodes",
    "wall_ms",
    "master_seed",
];

/// Share of unknown trials above which a cell is flagged.
pub const MAX_UNKNOWN_SHARE: f64 = 0.05;

const Z_95: f64 = 1.96;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MRule {
    /// The same list of `m` values for every `n`.
    Explicit(Vec<usize>),
    /// Offsets from the rounded theoretical threshold of each `n`:
    /// `2 log2 n + 1` for embedding, `m_star` for the common problem.
    Offsets(Vec<i64>),
}

fn default_trials() -> u32 {
    200
}

fn default_budget() -> u64 {
    Budget::default().0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: Problem,
    pub n_values: Vec<usize>,
    pub m_rule: MRule,
    pub p: f64,
    /// Edge probability of the second graph; 1/2 when absent.
    #[serde(default)]
    pub q: Option<f64>,
    #[serde(default = "default_trials")]
    pub trials: u32,
    #[serde(default)]
    pub master_seed: u64,
    /// Worker threads; 0 uses every core.
    #[serde(default)]
    pub workers: usize,
    #[serde(default = "default_budget")]
    pub node_budget: u64,
    #[serde(default)]
    pub output_csv: Option<PathBuf>,
    #[serde(default)]
    pub output_jsonl: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(problem: Problem, n_values: Vec<usize>, m_rule: MRule, p: f64) -> Self {
        ExperimentConfig {
            problem,
            n_values,
            m_rule,
            p,
            q: None,
            trials: default_trials(),
            master_seed: 0,
            workers: 0,
            node_budget: default_budget(),
            output_csv: None,
            output_jsonl: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn q_value(&self) -> f64 {
        self.q.unwrap_or(0.5)
    }

    /// Embedding runs are only covered by the theory for a host with
    /// `q = 1/2`.
    pub fn q_overridden(&self) -> bool {
        self.problem == Problem::Embed && self.q_value() != 0.5
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.n_values.is_empty() {
            return bad("n_values is empty".into());
        }
        if self.node_budget == 0 {
            return bad("node_budget must be positive".into());
        }
        ModelParams::new(self.p, self.q_value()).map_err(|e| Error::Config(e.to_string()))?;
        for &n in &self.n_values {
            if n == 0 || n > MAX_VERTICES {
                return bad(format!("n = {n} outside 1..={MAX_VERTICES}"));
            }
            if let MRule::Explicit(ms) = &self.m_rule {
                if let Some(m) = ms.iter().find(|&&m| m > n) {
                    return bad(format!("m = {m} exceeds n = {n}"));
                }
            }
        }
        match &self.m_rule {
            MRule::Explicit(ms) if ms.is_empty() => bad("m_rule lists no m values".into()),
            MRule::Offsets(os) if os.is_empty() => bad("m_rule lists no offsets".into()),
            _ => Ok(()),
        }
    }

    /// The `m` values of the cells for one `n`, ascending and deduplicated.
    pub fn m_values(&self, n: usize) -> Result<Vec<usize>> {
        let mut ms: Vec<usize> = match &self.m_rule {
            MRule::Explicit(ms) => ms.clone(),
            MRule::Offsets(offsets) => {
                let center = match self.problem {
                    Problem::Embed => 2.0 * (n as f64).log2() + 1.0,
                    Problem::Common => {
                        let params = ModelParams::new(self.p, self.q_value())?;
                        m_star(n as f64, &params, 1e-10)?.m_star
                    }
                };
                let center = center.round() as i64;
                offsets.iter().map(|o| (center + o).clamp(1, n as i64) as usize).collect()
            }
        };
        ms.sort_unstable();
        ms.dedup();
        Ok(ms)
    }
}

/// One `(n, m)` cell of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub problem: Problem,
    pub n: usize,
    pub m: usize,
    pub p: f64,
    pub q: f64,
    pub trials: u32,
    pub successes: u32,
    pub unknowns: u32,
    /// Successes over decided trials; unknowns are left out.
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean_nodes: f64,
    /// Sum of the solver times of the cell's trials.
    pub wall_ms: f64,
    pub master_seed: u64,
}

impl SweepRow {
    pub fn failures(&self) -> u32 {
        self.trials - self.successes - self.unknowns
    }

    /// More than 5% of the trials ran out of budget.
    pub fn is_invalid(&self) -> bool {
        self.unknowns as f64 > MAX_UNKNOWN_SHARE * self.trials as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// Interpolated 1/2-crossing of `p_hat` per `n`, when one exists.
    pub empirical_threshold: BTreeMap<usize, Option<f64>>,
    /// Cells flagged for too many unknown trials.
    pub invalid_cells: Vec<(usize, usize)>,
    /// Embedding host probability differs from 1/2.
    pub q_overridden: bool,
}

impl SweepResult {
    pub fn is_valid(&self) -> bool {
        self.invalid_cells.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrialOutcome {
    Found,
    Refuted,
    Unknown,
}

#[derive(Clone, Copy, Debug)]
pub struct Trial {
    pub outcome: TrialOutcome,
    pub nodes: u64,
    pub wall_ms: f64,
}

/// Seed of trial `t` in cell `(n, m)`.
pub fn trial_seed(master: u64, n: usize, m: usize, t: u32) -> u64 {
    fold_seed(master, &[n as u64, m as u64, t as u64])
}

/// Runs one trial: sample both graphs from the trial seed and search.
pub fn run_trial(config: &ExperimentConfig, n: usize, m: usize, t: u32) -> Result<Trial> {
    let seed = trial_seed(config.master_seed, n, m, t);
    let (x_seed, y_seed) = (fold_seed(seed, &[1]), fold_seed(seed, &[2]));
    let q = config.q_value();
    let budget = Budget(config.node_budget);
    let start = Instant::now();
    let outcome = match config.problem {
        Problem::Embed => {
            let x = sample_gnp(EdgeLaw::new(m, config.p, x_seed)?);
            let y = sample_gnp(EdgeLaw::new(n, q, y_seed)?);
            embed_exists(&x, &y, budget)?
        }
        Problem::Common => {
            let x = sample_gnp(EdgeLaw::new(n, config.p, x_seed)?);
            let y = sample_gnp(EdgeLaw::new(n, q, y_seed)?);
            common_exists(&x, &y, m, budget)?
        }
    };
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let outcome_kind = match outcome.status {
        SearchStatus::Found => TrialOutcome::Found,
        SearchStatus::ExhaustedNone => TrialOutcome::Refuted,
        SearchStatus::BudgetExceeded => TrialOutcome::Unknown,
    };
    Ok(Trial { outcome: outcome_kind, nodes: outcome.nodes, wall_ms })
}

/// Wilson 95% interval: `(p_hat, low, high)`.
pub fn estimate_probability(successes: u32, trials: u32) -> Result<(f64, f64, f64)> {
    if trials == 0 || successes > trials {
        return Err(Error::InvalidInput(format!("{successes} successes in {trials} trials")));
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    Ok((p, (center - half).clamp(0.0, p), (center + half).clamp(p, 1.0)))
}

/// Linear interpolation of the first downward 1/2-crossing of `p_hat` in
/// `m`. Rows must belong to one `n`; cells with no decided trial are
/// skipped.
pub fn locate_empirical_threshold(rows: &[SweepRow]) -> Option<f64> {
    let mut pts: Vec<(f64, f64)> =
        rows.iter().filter(|r| r.unknowns < r.trials).map(|r| (r.m as f64, r.p_hat)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.windows(2).find(|w| w[0].1 >= 0.5 && w[1].1 < 0.5).map(|w| {
        let ((m0, p0), (m1, p1)) = (w[0], w[1]);
        m0 + (p0 - 0.5) / (p0 - p1) * (m1 - m0)
    })
}

fn summarize(config: &ExperimentConfig, n: usize, m: usize, trials: &[Trial]) -> SweepRow {
    let count = |o| trials.iter().filter(|t| t.outcome == o).count() as u32;
    let successes = count(TrialOutcome::Found);
    let unknowns = count(TrialOutcome::Unknown);
    let decided = config.trials - unknowns;
    let (p_hat, ci_low, ci_high) = if decided == 0 {
        (0.0, 0.0, 1.0)
    } else {
        estimate_probability(successes, decided).expect("successes never exceed decided trials")
    };
    SweepRow {
        problem: config.problem,
        n,
        m,
        p: config.p,
        q: config.q_value(),
        trials: config.trials,
        successes,
        unknowns,
        p_hat,
        ci_low,
        ci_high,
        mean_nodes: trials.iter().map(|t| t.nodes as f64).sum::<f64>() / trials.len() as f64,
        wall_ms: trials.iter().map(|t| t.wall_ms).sum(),
        master_seed: config.master_seed,
    }
}

/// Runs every trial of every cell on `config.workers` threads and writes
/// the configured outputs.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepResult> {
    config.validate()?;
    let mut cells = Vec::new();
    for &n in &config.n_values {
        for m in config.m_values(n)? {
            cells.push((n, m));
        }
    }
    let units: Vec<(usize, u32)> = (0..cells.len()).flat_map(|c| (0..config.trials).map(move |t| (c, t))).collect();
    let run = || -> Result<Vec<Trial>> {
        units.par_iter().map(|&(c, t)| run_trial(config, cells[c].0, cells[c].1, t)).collect()
    };
    let trials = if config.workers == 0 {
        run()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(run)?
    };

    let per_cell = config.trials as usize;
    let rows: Vec<SweepRow> =
        cells.iter().zip(trials.chunks(per_cell.max(1))).map(|(&(n, m), ts)| summarize(config, n, m, ts)).collect();
    let mut empirical_threshold = BTreeMap::new();
    for &n in &config.n_values {
        let of_n: Vec<SweepRow> = rows.iter().filter(|r| r.n == n).cloned().collect();
        empirical_threshold.insert(n, locate_empirical_threshold(&of_n));
    }
    let invalid_cells = rows.iter().filter(|r| r.is_invalid()).map(|r| (r.n, r.m)).collect();
    let result = SweepResult { rows, empirical_threshold, invalid_cells, q_overridden: config.q_overridden() };

    if let Some(path) = &config.output_csv {
        export(&result.rows, ExportFormat::Csv, path)?;
    }
    if let Some(path) = &config.output_jsonl {
        export(&result.rows, ExportFormat::Jsonl, path)?;
    }
    Ok(result)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Jsonl,
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    wtr.write_record(COLUMNS)?;
    for row in rows {
        wtr.serialize(row)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header != COLUMNS {
        return Err(Error::Parse { line: 1, msg: format!("unexpected header {header:?}") });
    }
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

pub fn write_jsonl<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    for row in rows {
        serde_json::to_writer(&mut out, row)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        rows.push(serde_json::from_str(&line).map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() })?);
    }
    Ok(rows)
}

pub fn export(rows: &[SweepRow], format: ExportFormat, path: &Path) -> Result<()> {
    let out = BufWriter::new(File::create(path)?);
    match format {
        ExportFormat::Csv => write_csv(rows, out),
        ExportFormat::Jsonl => write_jsonl(rows, out),
    }
}

pub fn import(format: ExportFormat, path: &Path) -> Result<Vec<SweepRow>> {
    let input = BufReader::new(File::open(path)?);
    match format {
        ExportFormat::Csv => read_csv(input),
        ExportFormat::Jsonl => read_jsonl(input),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(m: usize, p_hat: f64) -> SweepRow {
        SweepRow {
            problem: Problem::Embed,
            n: 32,
            m,
            p: 0.5,
            q: 0.5,
            trials: 10,
            successes: (p_hat * 10.0) as u32,
            unknowns: 0,
            p_hat,
            ci_low: 0.0,
            ci_high: 1.0,
            mean_nodes: 12.5,
            wall_ms: 0.25,
            master_seed: 9,
        }
    }

    #[test]
    fn wilson_examples() {
        let (p, lo, hi) = estimate_probability(0, 100).unwrap();
        assert_eq!((p, lo), (0.0, 0.0));
        assert!((hi - 0.037).abs() < 5e-4, "{hi}");
        let (_, lo, hi) = estimate_probability(100, 100).unwrap();
        assert!((lo - 0.963).abs() < 5e-4 && hi == 1.0);
        let (p, lo, hi) = estimate_probability(50, 100).unwrap();
        assert_eq!(p, 0.5);
        assert!(((p - lo) - (hi - p)).abs() < 1e-12);
        assert!(estimate_probability(3, 2).is_err());
        assert!(estimate_probability(0, 0).is_err());
    }

    #[test]
    fn crossing() {
        assert_eq!(locate_empirical_threshold(&[row(9, 1.0), row(10, 0.0)]), Some(9.5));
        assert_eq!(locate_empirical_threshold(&[row(9, 1.0), row(10, 1.0)]), None);
        let r = locate_empirical_threshold(&[row(12, 0.0), row(10, 0.8), row(11, 0.2)]).unwrap();
        assert!((r - 10.5).abs() < 1e-12);
    }

    #[test]
    fn csv_round_trip_and_header_only() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{}\n", COLUMNS.join(",")));

        let rows = vec![row(3, 1.0), row(4, 0.1 + 0.2)];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        assert!(buf.starts_with(b"problem,n,m,p,q,trials,successes,unknowns,p_hat,ci_low,ci_high,mean_nodes,wall_ms,master_seed\nembed,32,3,"));
        assert_eq!(read_csv(buf.as_slice()).unwrap(), rows);

        let mut buf = Vec::new();
        write_jsonl(&rows, &mut buf).unwrap();
        assert_eq!(read_jsonl(buf.as_slice()).unwrap(), rows);
        let first: serde_json::Value = serde_json::from_slice(buf.split(|&b| b == b'\n').next().unwrap()).unwrap();
        let keys: Vec<&str> = first.as_object().unwrap().keys().map(String::as_str).collect();
        let mut expect = COLUMNS.to_vec();
        expect.sort_unstable();
        let mut keys_sorted = keys.clone();
        keys_sorted.sort_unstable();
        assert_eq!(keys_sorted, expect);
    }

    #[test]
    fn config_validation() {
        let text = r#"{"problem":"embed","n_values":[16],"m_rule":{"explicit":[2,3]},"p":0.5,"trials":5}"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(cfg.node_budget, 100_000_000);
        assert!(!cfg.q_overridden());
        for bad in [
            r#"{"problem":"embed","n_values":[16],"m_rule":{"explicit":[2]},"p":1.5}"#,
            r#"{"problem":"embed","n_values":[16],"m_rule":{"explicit":[20]},"p":0.5}"#,
            r#"{"problem":"embed","n_values":[16],"m_rule":{"explicit":[2]},"p":0.5,"trials":0}"#,
            r#"{"problem":"embed","n_values":[],"m_rule":{"explicit":[2]},"p":0.5}"#,
            r#"{"problem":"embed","n_values":[16],"m_rule":{"explicit":[2]},"p":0.5,"bogus":1}"#,
        ] {
            assert!(ExperimentConfig::from_json(bad).is_err(), "{bad}");
        }
        let cfg = ExperimentConfig::from_json(
            r#"{"problem":"embed","n_values":[32],"m_rule":{"offsets":[-20,0,1]},"p":0.5,"q":0.3}"#,
        )
        .unwrap();
        assert!(cfg.q_overridden());
        assert_eq!(cfg.m_values(32).unwrap(), vec![1, 11, 12]);
    }

    #[test]
    fn trivial_cells() {
        let mut cfg = ExperimentConfig::new(Problem::Common, vec![7], MRule::Explicit(vec![1]), 0.3);
        cfg.trials = 20;
        let res = run_sweep(&cfg).unwrap();
        assert_eq!(res.rows[0].p_hat, 1.0);
        assert_eq!(res.rows[0].unknowns, 0);

        let mut cfg = ExperimentConfig::new(Problem::Embed, vec![32], MRule::Explicit(vec![2]), 0.5);
        cfg.trials = 100;
        let res = run_sweep(&cfg).unwrap();
        assert_eq!(res.rows[0].successes, 100);
    }

    #[test]
    fn budget_unknowns_are_reported() {
        let mut cfg = ExperimentConfig::new(Problem::Common, vec![12], MRule::Explicit(vec![9]), 0.5);
        cfg.trials = 10;
        cfg.node_budget = 3;
        let res = run_sweep(&cfg).unwrap();
        assert_eq!(res.rows[0].unknowns, 10);
        assert!(!res.is_valid());
        assert_eq!(res.rows[0].failures(), 0);
    }
}
