//! The `riesz` command line.
//!
//! Every subcommand prints one JSON object (keys sorted, numbers rounded to
//! 12 significant digits, infinities as the string `"inf"`), or aligned
//! `key  value` lines with `--format text`.
//!
//! Exit codes: 0 success, 1 bad input, 2 invariant violation, 3 enumeration
//! cap exceeded.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::bounds::{packing_energy, verify_budget, BudgetReport};
use crate::error::{Error, Result};
use crate::line_mpd::{greedy_feasible, line_mpd_dp, line_mpd_search, LineInstance};
use crate::metric::{riesz_energy, validate_metric, Exponent, MetricInstance, REL_TOL};
use crate::oracle::{
    brute_force_mpd, brute_force_riesz, find_line_counterexample, find_line_mpd_discrepancy,
    CounterexampleConfig, OracleConfig, DEFAULT_CAP,
};
use crate::reductions::{
    clique_to_rssp, gis_to_rssp, large_s_threshold, verify_clique, verify_gis,
    verify_mpd_equivalence, Graph, PlanarInstance, Provenance, ReducedInstance,
};
use crate::ultrametric::{
    build_tree_from_matrix, parse_tree, solve_ultrametric, tree_to_metric, ultrametric_violation,
    UltrametricTree,
};

/// Largest instance the `--verify` flags will enumerate.
pub const VERIFY_MAX_N: usize = 12;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INVARIANT: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "riesz", version, about = "Minimum Riesz s-energy subset selection")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Largest number of subsets an exhaustive search may visit.
    #[arg(long, env = "RIESZ_CAP", default_value_t = DEFAULT_CAP, global = true)]
    cap: u128,
    /// Worker threads for exhaustive searches.
    #[arg(long, default_value_t = 1, global = true)]
    threads: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Dp,
    Search,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Energy of one subset.
    Energy {
        /// Metric (JSON or CSV) or tree (JSON or Newick).
        input: PathBuf,
        /// Labels or indices, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        subset: Vec<String>,
        #[arg(short = 's', default_value_t = 1.0)]
        s: f64,
    },
    /// Exact optimum on an ultrametric tree.
    SolveTree {
        /// Tree (JSON or Newick) or an ultrametric distance matrix.
        input: PathBuf,
        #[arg(short = 'k')]
        k: usize,
        #[arg(short = 's', default_value_t = 1.0)]
        s: f64,
        /// Write the DP table as CSV to this path.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Exhaustive optimum over all k-subsets.
    Brute {
        input: PathBuf,
        #[arg(short = 'k')]
        k: usize,
        #[arg(short = 's', default_value_t = 1.0)]
        s: f64,
        /// Maximize the minimum pairwise distance instead.
        #[arg(long)]
        mpd: bool,
    },
    /// Max-min dispersion on the line.
    MpdLine {
        /// `{"xs": [...]}` or one number per line.
        input: PathBuf,
        #[arg(short = 'k')]
        k: usize,
        #[arg(long, value_enum, default_value_t = Method::Dp)]
        method: Method,
        /// Only run the greedy feasibility scan at this spacing.
        #[arg(long)]
        tau: Option<f64>,
    },
    /// Reduce k-clique to the energy decision problem.
    ReduceClique {
        /// Edge list (`u v` per line) or `{"n", "edges"}` JSON.
        input: PathBuf,
        #[arg(short = 'k')]
        k: usize,
        #[arg(short = 's', default_value_t = 1.0)]
        s: f64,
        /// Check the decision against an exhaustive clique search.
        #[arg(long)]
        verify: bool,
    },
    /// Reduce geometric independent set to the energy decision problem.
    ReduceGis {
        /// `{"points", "delta", "k"}` JSON.
        input: PathBuf,
        /// Override the file's k.
        #[arg(short = 'k')]
        k: Option<usize>,
        /// Override the file's delta.
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        verify: bool,
    },
    /// Exponent above which energy minimizers are max-min optimal.
    LargeS {
        input: PathBuf,
        #[arg(short = 'k')]
        k: usize,
        /// Brute-force the minimizers just above the threshold.
        #[arg(long)]
        verify: bool,
    },
    /// Far-field budget against a hexagonal packing.
    Bounds {
        #[arg(short = 'r', default_value_t = 0.5)]
        r: f64,
        #[arg(short = 's', default_value_t = 3.0)]
        s: f64,
        #[arg(long, default_value_t = 5)]
        layers: usize,
    },
    /// Search for line instances where the naive left-right DP is suboptimal.
    Counterexample {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
        #[arg(short = 's', default_value_t = 1.0)]
        s: f64,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long, default_value_t = 4)]
        k_max: usize,
        /// Draw distinct integers below this bound instead of reals.
        #[arg(long)]
        grid: Option<usize>,
        /// Cross-check the two MPD algorithms instead.
        #[arg(long)]
        mpd: bool,
    },
    /// Check the metric axioms, or the shape of a tree.
    Validate { input: PathBuf },
}

/// Failure carrying the exit code and, for invariant breaches, a report to print.
struct Failure {
    code: i32,
    message: String,
    report: Option<Value>,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::CapExceeded { .. } => EXIT_CAP,
            Error::BudgetViolated { .. } => EXIT_INVARIANT,
            _ => EXIT_INPUT,
        };
        let report = match &e {
            Error::BudgetViolated { report, .. } => Some(budget_json(report)),
            _ => None,
        };
        Failure { code, message: e.to_string(), report }
    }
}

type CliResult = std::result::Result<Value, Failure>;

/// Parses `args` (program name first), runs the subcommand and writes to the
/// given streams. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let format = cli.global.format;
    match dispatch(&cli) {
        Ok(value) => {
            let _ = write!(out, "{}", render(&value, format));
            EXIT_OK
        }
        Err(f) => {
            if let Some(report) = &f.report {
                let _ = write!(out, "{}", render(report, format));
            }
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: &Cli) -> CliResult {
    let g = &cli.global;
    let oracle = OracleConfig { cap: g.cap, threads: g.threads.max(1), prune: false };
    match &cli.command {
        Command::Energy { input, subset, s } => {
            let m = load_metric(input)?;
            let sub = m.subset_from_tokens(subset)?;
            let s = Exponent::new(*s)?;
            Ok(json!({
                "energy": num(riesz_energy(&m, &sub, s)?),
                "s": num(s.get()),
                "subset": m.labels_of(&sub),
            }))
        }
        Command::SolveTree { input, k, s, table } => {
            let tree = load_tree(input)?;
            let sol = solve_ultrametric(&tree, *k, Exponent::new(*s)?)?;
            if let Some(path) = table {
                fs::write(path, sol.table.to_csv()).map_err(Error::from)?;
            }
            Ok(json!({
                "energy": num(sol.energy),
                "indices": sol.subset.indices(),
                "k": k,
                "s": num(*s),
                "subset": sol.labels,
            }))
        }
        Command::Brute { input, k, s, mpd } => {
            let m = load_metric(input)?;
            let res = if *mpd {
                brute_force_mpd(&m, *k, &oracle)?
            } else {
                brute_force_riesz(&m, *k, Exponent::new(*s)?, &oracle)?
            };
            let mut v = json!({
                "enumerated": res.enumerated,
                "k": k,
                "objective": if *mpd { "mpd" } else { "energy" },
                "optimum": num(res.optimum),
                "witnesses": res.witnesses.iter().map(|w| m.labels_of(w)).collect::<Vec<_>>(),
            });
            if !*mpd {
                v["s"] = num(*s);
            }
            Ok(v)
        }
        Command::MpdLine { input, k, method, tau } => {
            let inst = load_line(input)?;
            if let Some(tau) = tau {
                let g = greedy_feasible(&inst, *k, *tau)?;
                return Ok(json!({
                    "feasible": g.feasible,
                    "k": k,
                    "selected": g.selected.indices(),
                    "tau": num(*tau),
                }));
            }
            let res = match method {
                Method::Dp => line_mpd_dp(&inst, *k)?,
                Method::Search => line_mpd_search(&inst, *k)?,
            };
            Ok(json!({
                "k": k,
                "method": match method { Method::Dp => "dp", Method::Search => "search" },
                "subset": res.subset.indices(),
                "value": num(res.value),
            }))
        }
        Command::ReduceClique { input, k, s, verify } => {
            let g = load_graph(input)?;
            check_verify_size(*verify, g.vertex_count())?;
            let out = clique_to_rssp(&g, *k, Exponent::new(*s)?)?;
            let ReducedInstance::Metric(m) = &out.instance else { unreachable!() };
            let mut v = json!({
                "T": num(out.threshold),
                "distances": m.matrix().iter().map(|row| row.iter().map(|&d| num(d)).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "k": out.k,
                "n": g.vertex_count(),
                "s": num(out.s),
            });
            if *verify {
                let check = verify_clique(&g, &out, &oracle)?;
                v["min_energy"] = num(check.min_energy);
                v["minimizer"] = json!(check.minimizer.indices());
                v["clique"] = json!(check.clique);
                v["decision"] = json!(check.decision);
                v["equivalent"] = json!(check.equivalent);
            }
            Ok(v)
        }
        Command::ReduceGis { input, k, delta, verify } => {
            let mut p = load_planar(input)?;
            if let Some(k) = k {
                p.k = *k;
            }
            if let Some(d) = delta {
                p = PlanarInstance::new(p.points, *d, p.k)?;
            }
            check_verify_size(*verify, p.len())?;
            let out = match gis_to_rssp(&p) {
                Ok(out) => out,
                Err(Error::TrivialInstance { reason, answer }) => {
                    return Ok(json!({
                        "answer": answer,
                        "k": p.k,
                        "reason": reason,
                        "trivial": true,
                    }))
                }
                Err(e) => return Err(e.into()),
            };
            let Provenance::Gis { gap, exponent_bound, normalized_threshold, separated } = &out.provenance
            else {
                unreachable!()
            };
            let mut v = json!({
                "T": num(out.threshold),
                "T_normalized": num(*normalized_threshold),
                "d_min": num(gap.d_min),
                "d_min_pair": [gap.d_min_pair.0, gap.d_min_pair.1],
                "delta": num(p.delta),
                "delta_max": num(gap.delta_max),
                "delta_max_pair": [gap.delta_max_pair.0, gap.delta_max_pair.1],
                "exponent_bound": num(*exponent_bound),
                "k": out.k,
                "n": p.len(),
                "s": num(out.s),
                "separated": separated,
                "trivial": false,
            });
            if *verify {
                let check = verify_gis(&out, &oracle)?;
                v["independent_exists"] = json!(check.independent_exists);
                v["below_threshold_exists"] = json!(check.below_threshold_exists);
                v["equivalent"] = json!(check.equivalent);
                v["max_independent_energy"] = opt_num(check.max_independent_energy);
                v["min_dependent_energy"] = opt_num(check.min_dependent_energy);
                v["threshold_separates"] = json!(check.separated);
            }
            Ok(v)
        }
        Command::LargeS { input, k, verify } => {
            let m = load_metric(input)?;
            check_verify_size(*verify, m.len())?;
            let th = large_s_threshold(&m, *k, &oracle)?;
            let mut v = json!({
                "D_star": num(th.d_star),
                "R": opt_num(th.r),
                "all_optimal": th.all_optimal,
                "k": k,
                "s0": num(th.s0),
            });
            if *verify {
                let s = th.s0 * (1.0 + 1e-6) + 1.0;
                let eq = verify_mpd_equivalence(&m, *k, Exponent::new(s)?, th.d_star, &oracle)?;
                v["s_checked"] = num(s);
                v["minimizers"] = json!(eq.minimizers.iter().map(|w| m.labels_of(w)).collect::<Vec<_>>());
                v["all_mpd_optimal"] = json!(eq.all_mpd_optimal);
                if !eq.all_mpd_optimal {
                    return Err(Failure {
                        code: EXIT_INVARIANT,
                        message: format!("an energy minimizer at s = {s} misses D*"),
                        report: Some(v),
                    });
                }
            }
            Ok(v)
        }
        Command::Bounds { r, s, layers } => {
            let report = verify_budget(*r, *s, *layers)?;
            let mut v = budget_json(&report);
            let energy = packing_energy(*r, *s, *layers)?;
            v["points"] = json!(energy.points);
            v["total_energy"] = num(energy.total);
            v["linear_bound"] = num(energy.linear_bound);
            Ok(v)
        }
        Command::Counterexample { seed, budget, s, n_max, k_max, grid, mpd } => {
            let cfg = CounterexampleConfig {
                n_max: *n_max,
                k_max: *k_max,
                s: *s,
                budget: *budget,
                seed: *seed,
                grid: *grid,
                ..CounterexampleConfig::default()
            };
            if *mpd {
                let rep = find_line_mpd_discrepancy(&cfg)?;
                let found = rep.found.map(|d| {
                    json!({
                        "brute_value": num(d.brute_value),
                        "dp_value": num(d.dp_value),
                        "k": d.k,
                        "points": nums(&d.points),
                        "search_value": num(d.search_value),
                    })
                });
                return Ok(search_json(found, rep.tried, *seed));
            }
            let rep = find_line_counterexample(&cfg)?;
            let found = rep.found.map(|c| {
                json!({
                    "gap": num(c.gap),
                    "k": c.k,
                    "naive_energy": num(c.naive_energy),
                    "naive_subset": c.naive_subset.indices(),
                    "naive_value": num(c.naive_value),
                    "optimal_energy": num(c.optimal_energy),
                    "optimal_subset": c.optimal_subset.indices(),
                    "points": nums(&c.points),
                    "s": num(c.s),
                })
            });
            Ok(search_json(found, rep.tried, *seed))
        }
        Command::Validate { input } => validate(input),
    }
}

fn search_json(found: Option<Value>, tried: u64, seed: u64) -> Value {
    match found {
        Some(w) => json!({ "found": true, "seed": seed, "tried": tried, "witness": w }),
        None => json!({ "found": false, "result": "none found", "seed": seed, "tried": tried }),
    }
}

fn validate(input: &Path) -> CliResult {
    let text = read(input)?;
    if looks_like_tree(&text) {
        let tree = parse_tree(&text)?;
        return Ok(json!({
            "binary": tree.is_binary(),
            "kind": "tree",
            "leaves": tree.leaf_count(),
            "valid": true,
        }));
    }
    let m = parse_metric(&text)?;
    let report = validate_metric(&m)?;
    let v = json!({
        "kind": "metric",
        "n": m.len(),
        "ultrametric": report.is_valid() && ultrametric_violation(&m, REL_TOL).is_none(),
        "valid": report.is_valid(),
        "violations": serde_json::to_value(&report.violations).expect("serializable"),
    });
    if report.is_valid() {
        Ok(v)
    } else {
        Err(Failure {
            code: EXIT_INVARIANT,
            message: format!("{} metric axiom violation(s)", report.violations.len()),
            report: Some(v),
        })
    }
}

fn check_verify_size(verify: bool, n: usize) -> std::result::Result<(), Failure> {
    if verify && n > VERIFY_MAX_N {
        return Err(Failure {
            code: EXIT_CAP,
            message: format!("--verify is limited to n <= {VERIFY_MAX_N}, got n = {n}"),
            report: None,
        });
    }
    Ok(())
}

fn budget_json(r: &BudgetReport) -> Value {
    json!({
        "bound": num(r.bound),
        "layers": r.layers,
        "measured": num(r.measured),
        "r": num(r.r),
        "s": num(r.s),
        "slack": num(r.slack),
    })
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn looks_like_tree(text: &str) -> bool {
    let t = text.trim_start();
    t.starts_with('(') || (t.starts_with('{') && (t.contains("\"children\"") || t.contains("\"leaf\"")))
}

fn parse_metric(text: &str) -> Result<MetricInstance> {
    if text.trim_start().starts_with('{') {
        MetricInstance::from_json_str(text)
    } else {
        MetricInstance::from_csv_str(text)
    }
}

/// A metric file, or the leaf metric of a tree file.
fn load_metric(path: &Path) -> Result<MetricInstance> {
    let text = read(path)?;
    if looks_like_tree(&text) {
        Ok(tree_to_metric(&parse_tree(&text)?))
    } else {
        parse_metric(&text)
    }
}

/// A tree file, or a tree rebuilt from an ultrametric matrix.
fn load_tree(path: &Path) -> Result<UltrametricTree> {
    let text = read(path)?;
    if looks_like_tree(&text) {
        parse_tree(&text)
    } else {
        build_tree_from_matrix(&parse_metric(&text)?)
    }
}

fn load_line(path: &Path) -> Result<LineInstance> {
    let text = read(path)?;
    if text.trim_start().starts_with('{') {
        LineInstance::from_json_str(&text)
    } else {
        LineInstance::from_text(&text)
    }
}

fn load_graph(path: &Path) -> Result<Graph> {
    let text = read(path)?;
    if text.trim_start().starts_with('{') {
        Graph::from_json_str(&text)
    } else {
        Graph::from_edge_list(&text)
    }
}

fn load_planar(path: &Path) -> Result<PlanarInstance> {
    PlanarInstance::from_json_str(&read(path)?)
}

/// `x` rounded to 12 significant digits; non-finite values become strings.
pub fn num(x: f64) -> Value {
    if x.is_nan() {
        return Value::String("nan".into());
    }
    if x.is_infinite() {
        return Value::String(if x > 0.0 { "inf" } else { "-inf" }.into());
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    // Integral values print without a fractional part.
    if rounded.fract() == 0.0 && rounded.abs() < 1e15 {
        return json!(rounded as i64);
    }
    json!(rounded)
}

fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(v).expect("serializable");
            s.push('\n');
            s
        }
        Format::Text => render_text(v),
    }
}

fn render_text(v: &Value) -> String {
    let Value::Object(map) = v else {
        return format!("{v}\n");
    };
    let width = map.keys().map(String::len).max().unwrap_or(0);
    let mut out = String::new();
    for (key, value) in flatten(map) {
        out.push_str(&format!("{key:<width$}  {value}\n", width = width.max(key.len())));
    }
    out
}

fn flatten(map: &Map<String, Value>) -> Vec<(String, String)> {
    map.iter()
        .map(|(k, v)| {
            let shown = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            (k.clone(), shown)
        })
        .collect()
}
