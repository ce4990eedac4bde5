use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use isophase::experiments::{export, run_sweep, ExperimentConfig, ExportFormat};
use isophase::graphs::{sample_gnp, EdgeLaw, Graph};
use isophase::isosearch::{
    common_count, common_exists, embed_count, embed_exists, max_common_size, Budget, SearchOutcome, SearchStatus,
    Witness,
};
use isophase::moments::{
    common_bounds, count_h_dr, count_h_r, injection_count, partial_injection_count, ratio_decomposition, s_bound,
    second_moment_exact, BoundMode, Enumeration,
};
use isophase::moments::{ln_expected_common, ln_expected_embeddings};
use isophase::params::{ModelParams, Problem};
use isophase::rado::{ackermann_decode, ackermann_encode, bit_adjacent, extension_witness, Hfs};
use isophase::rng::fold_seed;
use isophase::thresholds::{in_admissible_region, region_corner, threshold_report, ThresholdConfig};
use isophase::verify::{run_suite, Suite, VerifyOptions};
use isophase::Error;
use num_bigint::BigUint;
use serde_json::{json, Value};

/// Exact solvers, threshold calculus and moment checks for random-graph
/// embedding and common induced subgraphs.
#[derive(Debug, Parser)]
#[command(name = "isophase", version)]
struct Cli {
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for sweeps and enumeration sums; 0 uses every core.
    #[arg(long, global = true, env = "ISO_PHASE_WORKERS", default_value_t = 0)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample G(n, p) and print it in the graph text format.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Is the pattern an induced subgraph of the host?
    Embed {
        #[command(flatten)]
        pair: PairArgs,
        /// Pattern size when sampling.
        #[arg(long)]
        m: Option<usize>,
        /// Count every embedding instead of stopping at the first.
        #[arg(long)]
        count: bool,
    },
    /// Common induced subgraphs of two graphs.
    Common {
        #[command(flatten)]
        pair: PairArgs,
        /// Target size; without it the largest common size is searched.
        #[arg(long)]
        m: Option<usize>,
        /// Count every m-isomorphism (requires --m).
        #[arg(long, requires = "m")]
        count: bool,
    },
    /// Embedding thresholds, m_* and the derived constants.
    Threshold {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 0.5)]
        q: f64,
        /// Slack C_n; defaults to ln ln n (1 below n = 16).
        #[arg(long)]
        cn: Option<f64>,
    },
    /// Membership of (p, q) in the admissible region, and its corner.
    Region {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
    },
    /// Cardinalities, first and second moments, bounds and the ratio split.
    Moments {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value = "common")]
        problem: Problem,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        /// Ignored for the embedding problem, whose host is G(n, 1/2).
        #[arg(long, default_value_t = 0.5)]
        q: f64,
        /// Exact second moment by enumerating map pairs.
        #[arg(long)]
        second: bool,
        /// Closed-form bounds on the ratio E N^2 / (E N)^2.
        #[arg(long)]
        bounds: bool,
        /// Sum the embedding bound in relaxed mode instead of enumerating.
        #[arg(long)]
        relaxed: bool,
        /// Split of the ratio into its five groups (common only).
        #[arg(long)]
        decompose: bool,
        /// Split constant.
        #[arg(long, default_value_t = 0.75)]
        c: f64,
        /// Largest number of map pairs an exact sum may visit.
        #[arg(long, default_value_t = 10_000_000)]
        guard: u128,
    },
    /// Run a property suite.
    Verify {
        /// edgegraph, cardinality, thresholds, rado or all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 10_000)]
        pairs: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a Monte Carlo sweep from a JSON config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's CSV path.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Overrides the config's JSONL path.
        #[arg(long)]
        jsonl: Option<PathBuf>,
    },
    /// The random graph on the naturals and on hereditarily finite sets.
    Rado {
        #[command(subcommand)]
        op: RadoOp,
    },
}

#[derive(Debug, Subcommand)]
enum RadoOp {
    /// Are a and b adjacent (bit a of b or bit b of a)?
    Adjacent { a: BigUint, b: BigUint },
    /// Ackermann code of a set in brace notation.
    Encode { set: String },
    /// Set with the given Ackermann code.
    Decode { code: BigUint },
    /// A vertex adjacent to all of U and none of V.
    Witness {
        #[arg(long, value_delimiter = ',')]
        u: Vec<u64>,
        #[arg(long, value_delimiter = ',')]
        v: Vec<u64>,
    },
}

/// Two graphs, each read from a file or sampled from `--seed`.
#[derive(Debug, Args)]
struct PairArgs {
    /// First graph (the pattern when embedding).
    #[arg(long)]
    x: Option<PathBuf>,
    /// Second graph (the host when embedding).
    #[arg(long)]
    y: Option<PathBuf>,
    /// Size of sampled graphs (the host when embedding).
    #[arg(long)]
    n: Option<usize>,
    /// Edge probability of the first sampled graph.
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// Edge probability of the second sampled graph.
    #[arg(long, default_value_t = 0.5)]
    q: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Search-node budget; 0 means unlimited.
    #[arg(long, default_value_t = Budget::default().0)]
    budget: u64,
}

impl PairArgs {
    fn budget(&self) -> Budget {
        if self.budget == 0 {
            Budget::UNLIMITED
        } else {
            Budget(self.budget)
        }
    }

    /// Sampled graphs use the same seed split as sweep trials.
    fn graphs(&self, x_size: Option<usize>) -> Result<(Graph, Graph), Failure> {
        let load =
            |path: &Option<PathBuf>, size: Option<usize>, p: f64, word: u64, name: &str| -> Result<Graph, Failure> {
                match path {
                    Some(path) => {
                        Ok(Graph::read_text(std::io::BufReader::new(fs::File::open(path).map_err(Error::from)?))?)
                    }
                    None => {
                        let size = size.ok_or_else(|| usage(format!("give --{name} or a size to sample it")))?;
                        Ok(sample_gnp(EdgeLaw::new(size, p, fold_seed(self.seed, &[word]))?))
                    }
                }
            };
        let x = load(&self.x, x_size.or(self.n), self.p, 1, "x")?;
        let y = load(&self.y, self.n, self.q, 2, "y")?;
        Ok((x, y))
    }
}

/// A failed command and its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::BudgetExceeded { .. }) { 3 } else { 2 };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

/// What a command produced: a JSON value, its plain rendering, and the
/// exit code.
struct Report {
    value: Value,
    text: String,
    code: u8,
}

impl Report {
    fn ok(value: Value, text: String) -> Self {
        Report { value, text, code: 0 }
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            if cli.json {
                let text = serde_json::to_string_pretty(&report.value).expect("json values serialize");
                emit(&format!("{text}\n"));
            } else {
                emit(&report.text);
            }
            ExitCode::from(report.code)
        }
        Err(f) => {
            if cli.json {
                emit(&format!("{}\n", json!({ "error": f.message, "exit_code": f.code })));
            }
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    match &cli.command {
        Command::Sample { n, p, seed, out } => {
            let g = sample_gnp(EdgeLaw::new(*n, *p, *seed)?);
            let text = g.to_text();
            if let Some(path) = out {
                fs::write(path, &text).map_err(Error::from)?;
            }
            let value = json!({ "n": n, "p": p, "seed": seed, "edges": g.edges().collect::<Vec<_>>() });
            Ok(Report::ok(value, if out.is_some() { String::new() } else { text }))
        }
        Command::Embed { pair, m, count } => {
            let (x, y) = pair.graphs(*m)?;
            if *count {
                let c = embed_count(&x, &y, pair.budget())?;
                let value = json!({ "count": c.value.to_string(), "nodes": c.nodes });
                Ok(Report::ok(value, format!("{} embeddings ({} nodes)\n", c.value, c.nodes)))
            } else {
                Ok(search_report(&embed_exists(&x, &y, pair.budget())?))
            }
        }
        Command::Common { pair, m, count } => {
            let (x, y) = pair.graphs(None)?;
            match m {
                Some(m) if *count => {
                    let c = common_count(&x, &y, *m, pair.budget())?;
                    let value = json!({ "m": m, "count": c.value.to_string(), "nodes": c.nodes });
                    Ok(Report::ok(value, format!("{} {m}-isomorphisms ({} nodes)\n", c.value, c.nodes)))
                }
                Some(m) => Ok(search_report(&common_exists(&x, &y, *m, pair.budget())?)),
                None => {
                    let best = max_common_size(&x, &y, pair.budget())?;
                    let pairs: Option<Vec<(usize, usize)>> = best.witness.as_ref().map(|f| f.pairs().collect());
                    let value = json!({
                        "best": best.best,
                        "exact": best.exact,
                        "smallest_refuted": best.smallest_refuted,
                        "witness": pairs,
                        "nodes": best.nodes,
                    });
                    let text = format!(
                        "largest common induced subgraph: {}{} ({} nodes)\n",
                        best.best,
                        if best.exact { "" } else { " (lower bound, budget exhausted above it)" },
                        best.nodes
                    );
                    Ok(Report { value, text, code: if best.exact { 0 } else { 3 } })
                }
            }
        }
        Command::Threshold { n, p, q, cn } => {
            let config = match cn {
                Some(cn) => ThresholdConfig::with_cn(*n, *cn)?,
                None => ThresholdConfig::new(*n)?,
            };
            let report = threshold_report(&config, &ModelParams::new(*p, *q)?)?;
            let value = serde_json::to_value(&report).map_err(Error::from)?;
            let mut text = format!(
                "n = {n}, p = {p}, q = {q}, C_n = {:.4}\n\
                 embedding: m_- = {}, m_+ = {}\n\
                 common: m_* = {:.4}, m~ = {:.4}, window [{}, {}]{}\n\
                 lambda = {:.6}, gamma = {:.6}, tau = {:.6}\n",
                report.cn,
                report.m_minus,
                report.m_plus,
                report.m_star,
                report.m_tilde,
                report.m_low,
                report.m_high,
                if report.in_region { "" } else { " (outside the admissible region)" },
                report.params.lambda,
                report.params.gamma,
                report.params.tau,
            );
            if report.slack_warning {
                text.push_str("warning: C_n / ln n >= 1\n");
            }
            Ok(Report::ok(value, text))
        }
        Command::Region { p, q } => {
            let inside = in_admissible_region(*p, *q)?;
            let (cp, cq) = region_corner();
            let params = ModelParams::new(*p, *q)?;
            let value = json!({
                "p": p,
                "q": q,
                "inside": inside,
                "corner": { "p": cp, "q": cq },
                "params": params,
            });
            let text = format!("{}\n", if inside { "inside" } else { "outside" });
            Ok(Report::ok(value, text))
        }
        Command::Moments { n, m, problem, p, q, second, bounds, relaxed, decompose, c, guard } => {
            let en = Enumeration { guard: *guard, workers: cli.workers };
            moments(*n, *m, *problem, *p, *q, (*second, *bounds, *relaxed, *decompose), *c, &en)
        }
        Command::Verify { suite, pairs, seed } => {
            let suites: Vec<Suite> = if suite == "all" { Suite::ALL.to_vec() } else { vec![suite.parse::<Suite>()?] };
            let opts = VerifyOptions { pairs: *pairs, seed: *seed, workers: cli.workers };
            let mut reports = Vec::new();
            let mut text = String::new();
            for s in suites {
                let r = run_suite(s, &opts)?;
                text.push_str(&format!(
                    "{:?}: {} ({} checks, {} violations)\n",
                    s,
                    if r.passed() { "pass" } else { "FAIL" },
                    r.total_checked(),
                    r.total_violations()
                ));
                for c in &r.checks {
                    text.push_str(&format!(
                        "  {:<28} {:>8} checked {:>4} violations\n",
                        c.name, c.checked, c.violations
                    ));
                }
                for f in &r.failures {
                    text.push_str(&format!("  failed: {f}\n"));
                }
                reports.push(r);
            }
            let passed = reports.iter().all(|r| r.passed());
            let value = json!({ "passed": passed, "suites": reports });
            Ok(Report { value, text, code: if passed { 0 } else { 1 } })
        }
        Command::Experiment { config, csv, jsonl } => {
            let mut config = ExperimentConfig::from_path(config)?;
            config.workers = if cli.workers > 0 { cli.workers } else { config.workers };
            if csv.is_some() {
                config.output_csv = csv.clone();
            }
            if jsonl.is_some() {
                config.output_jsonl = jsonl.clone();
            }
            let result = run_sweep(&config)?;
            if let Some(path) = &config.output_csv {
                export(&result.rows, ExportFormat::Csv, path)?;
            }
            if let Some(path) = &config.output_jsonl {
                export(&result.rows, ExportFormat::Jsonl, path)?;
            }
            let mut text = format!(
                "{:>5} {:>4} {:>7} {:>9} {:>8} {:>8} {:>12}\n",
                "n", "m", "p_hat", "unknowns", "ci_low", "ci_high", "mean_nodes"
            );
            for r in &result.rows {
                text.push_str(&format!(
                    "{:>5} {:>4} {:>7.3} {:>9} {:>8.3} {:>8.3} {:>12.1}{}\n",
                    r.n,
                    r.m,
                    r.p_hat,
                    r.unknowns,
                    r.ci_low,
                    r.ci_high,
                    r.mean_nodes,
                    if r.is_invalid() { "  invalid" } else { "" }
                ));
            }
            for (n, t) in &result.empirical_threshold {
                match t {
                    Some(t) => text.push_str(&format!("n = {n}: p_hat crosses 1/2 at m = {t:.2}\n")),
                    None => text.push_str(&format!("n = {n}: no 1/2 crossing in range\n")),
                }
            }
            if result.q_overridden {
                text.push_str("note: embedding host probability differs from 1/2\n");
            }
            let code = if result.is_valid() { 0 } else { 3 };
            Ok(Report { value: serde_json::to_value(&result).map_err(Error::from)?, text, code })
        }
        Command::Rado { op } => rado(op),
    }
}

fn search_report(out: &SearchOutcome) -> Report {
    let witness: Option<Value> = out.witness.as_ref().map(|w| match w {
        Witness::Embedding(f) => json!(f.image()),
        Witness::Common(f) => json!(f.pairs().collect::<Vec<_>>()),
    });
    let status = match out.status {
        SearchStatus::Found => "found",
        SearchStatus::ExhaustedNone => "none",
        SearchStatus::BudgetExceeded => "unknown",
    };
    let value = json!({ "status": status, "witness": witness, "nodes": out.nodes });
    let mut text = format!("{status} ({} nodes)\n", out.nodes);
    if let Some(w) = &witness {
        text.push_str(&format!("witness: {w}\n"));
    }
    let code = if out.status == SearchStatus::BudgetExceeded { 3 } else { 0 };
    Report { value, text, code }
}

fn moment_value(ln: f64) -> Value {
    json!({ "ln": ln, "value": ln.exp() })
}

#[allow(clippy::too_many_arguments)]
fn moments(
    n: usize,
    m: usize,
    problem: Problem,
    p: f64,
    q: f64,
    (second, bounds, relaxed, decompose): (bool, bool, bool, bool),
    c: f64,
    en: &Enumeration,
) -> Result<Report, Failure> {
    if m > n {
        return Err(usage(format!("need m <= n, got m = {m}, n = {n}")));
    }
    let params = match problem {
        Problem::Embed => ModelParams::embedding(p)?,
        Problem::Common => ModelParams::new(p, q)?,
    };
    let mut value = json!({ "problem": problem, "n": n, "m": m, "params": params });
    let mut text = format!("{problem} n = {n} m = {m} p = {p} q = {}\n", params.q);
    let (maps, ln_first, cards) = match problem {
        Problem::Embed => {
            let cards: Vec<Value> =
                (0..=m).map(|r| json!({ "r": r, "count": count_h_r(n, m, r).to_string() })).collect();
            (injection_count(n, m), ln_expected_embeddings(n, m), cards)
        }
        Problem::Common => {
            let cards: Vec<Value> = (0..=m)
                .flat_map(|d| (0..=m).map(move |r| (d, r)))
                .map(|(d, r)| json!({ "d": d, "r": r, "count": count_h_dr(n, m, d, r).to_string() }))
                .collect();
            (partial_injection_count(n, m), ln_expected_common(n, m, &params), cards)
        }
    };
    value["maps"] = json!(maps.to_string());
    value["first_moment"] = moment_value(ln_first);
    value["pair_classes"] = json!(cards);
    text.push_str(&format!("maps      {maps}\nE N       {:.6e} (ln {:.6})\n", ln_first.exp(), ln_first));

    if second {
        let s = second_moment_exact(n, m, &params, problem, en)?;
        text.push_str(&format!("E N^2     {:.6e} (ln {:.6})\nratio     {:.9}\n", s.second, s.ln_second, s.ratio));
        value["second_moment"] = moment_value(s.ln_second);
        value["ratio"] = moment_value(s.ratio.ln());
    }
    if bounds {
        let b = match problem {
            Problem::Embed => {
                let mode = if relaxed { BoundMode::Relaxed } else { BoundMode::Exact };
                s_bound(n, m, p, c, mode, en)?
            }
            Problem::Common => common_bounds(n, m, &params, c)?,
        };
        text.push_str(&format!("S         {:.6e} (S_I {:.6e}, S_II {:.6e})\n", b.s_total, b.s_one, b.s_two));
        value["bounds"] = serde_json::to_value(&b).map_err(Error::from)?;
    }
    if decompose {
        if problem != Problem::Common {
            return Err(usage("--decompose applies to the common problem"));
        }
        let d = ratio_decomposition(n, m, &params, c, en)?;
        text.push_str(&format!(
            "T00 {:.6e}  Tmm {:.6e}  small r {:.6e}  large r {:.6e}  swapped {:.6e}  total {:.9}\n",
            d.t00, d.tmm, d.small_r, d.large_r, d.swapped, d.total
        ));
        value["decomposition"] = serde_json::to_value(&d).map_err(Error::from)?;
    }
    Ok(Report::ok(value, text))
}

fn rado(op: &RadoOp) -> Result<Report, Failure> {
    match op {
        RadoOp::Adjacent { a, b } => {
            let adj = bit_adjacent(a, b)?;
            let value = json!({ "a": a.to_string(), "b": b.to_string(), "adjacent": adj });
            Ok(Report::ok(value, format!("{}\n", if adj { "adjacent" } else { "not adjacent" })))
        }
        RadoOp::Encode { set } => {
            let s = Hfs::parse(set)?;
            let code = ackermann_encode(&s)?;
            let value = json!({ "set": s.to_string(), "code": code.to_string(), "depth": s.depth() });
            Ok(Report::ok(value, format!("{code}\n")))
        }
        RadoOp::Decode { code } => {
            let s = ackermann_decode(code);
            let value = json!({ "code": code.to_string(), "set": s.to_string(), "depth": s.depth() });
            Ok(Report::ok(value, format!("{s}\n")))
        }
        RadoOp::Witness { u, v } => {
            let us: BTreeSet<u64> = u.iter().copied().collect();
            let vs: BTreeSet<u64> = v.iter().copied().collect();
            let z = extension_witness(&us, &vs)?;
            let value = json!({ "u": us, "v": vs, "witness": z.to_string() });
            Ok(Report::ok(value, format!("{z}\n")))
        }
    }
}
