//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails or overruns its time limit.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use serde_json::Value;

use riesz_subset::bounds::{overlap_gap, verify_budget, zeta_minus_one};
use riesz_subset::line_mpd::{line_mpd_dp, line_mpd_search, LineInstance};
use riesz_subset::metric::{rescale, Exponent, MetricInstance};
use riesz_subset::oracle::{brute_force_mpd, brute_force_riesz, find_line_counterexample, CounterexampleConfig, OracleConfig};
use riesz_subset::random::{binary_ultrametric, bounded_ratio_metric, graph, line_points, planar_instance, seeded};
use riesz_subset::reductions::{
    clique_to_rssp, gap_quantities, gis_to_rssp, large_s_threshold, Provenance, ReducedInstance,
};
use riesz_subset::ultrametric::{solve_ultrametric, tree_to_metric};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, u64);

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else { return out };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

fn energy(d: &[Vec<f64>], sub: &[usize], s: f64) -> f64 {
    let mut e = 0.0;
    for (a, &i) in sub.iter().enumerate() {
        for &j in &sub[a + 1..] {
            e += d[i][j].powf(-s);
        }
    }
    e
}

fn min_dist(d: &[Vec<f64>], sub: &[usize]) -> f64 {
    let mut m = f64::INFINITY;
    for (a, &i) in sub.iter().enumerate() {
        for &j in &sub[a + 1..] {
            m = m.min(d[i][j]);
        }
    }
    m
}

fn binom2(k: usize) -> f64 {
    (k * (k - 1) / 2) as f64
}

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn riesz(args: &[&str]) -> (Option<i32>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_riesz"))
        .args(args)
        .env_remove("RIESZ_CAP")
        .output()
        .expect("riesz binary runs");
    (out.status.code(), out.stdout)
}

fn cli_json(args: &[&str]) -> Result<Value, String> {
    let (code, stdout) = riesz(args);
    if code != Some(0) {
        return Err(format!("`riesz {}` exited with {code:?}", args.join(" ")));
    }
    serde_json::from_slice(&stdout).map_err(|e| format!("bad JSON from `riesz {}`: {e}", args.join(" ")))
}

fn two_cherries() -> Outcome {
    let v = cli_json(&["solve-tree", &data("six_taxa.json"), "-k", "3", "-s", "1"])?;
    let e = v["energy"].as_f64().ok_or("no energy")?;
    if (e - 3.0 / 11.0).abs() >= 1e-9 {
        return Err(format!("solve-tree energy {e}, expected 3/11"));
    }
    let labels: Vec<&str> = v["subset"].as_array().ok_or("no subset")?.iter().filter_map(Value::as_str).collect();
    let has = |l: &str| labels.contains(&l);
    if labels.len() != 3 || (has("a") && has("b")) || (has("c") && has("d")) {
        return Err(format!("subset {labels:?} takes a whole cherry"));
    }
    let w = cli_json(&["energy", &data("six_taxa.json"), "--subset", "a,b,e", "-s", "1"])?;
    let e2 = w["energy"].as_f64().ok_or("no energy")?;
    if (e2 - 25.0 / 77.0).abs() >= 1e-9 {
        return Err(format!("energy of {{a,b,e}} is {e2}, expected 25/77"));
    }
    Ok(format!("energy {e:.12} subset {labels:?}; E(a,b,e) = {e2:.12}"))
}

fn dp_oracle() -> Outcome {
    let mut rng = seeded(2024);
    let cfg = OracleConfig::default();
    let mut worst: f64 = 0.0;
    for case in 0..200 {
        let n = rng.gen_range(2..=12);
        let k = rng.gen_range(1..=n.min(6));
        let s = [0.5, 1.0, 2.0, 4.0][rng.gen_range(0..4)];
        let tree = binary_ultrametric(&mut rng, n);
        let s_exp = Exponent::new(s).unwrap();
        let dp = solve_ultrametric(&tree, k, s_exp).map_err(|e| e.to_string())?;
        let brute = brute_force_riesz(&tree_to_metric(&tree), k, s_exp, &cfg).map_err(|e| e.to_string())?;
        let scale = dp.energy.abs().max(brute.optimum.abs());
        let rel = if scale == 0.0 { 0.0 } else { (dp.energy - brute.optimum).abs() / scale };
        worst = worst.max(rel);
        if rel > 1e-9 {
            return Err(format!("case {case} (n={n}, k={k}, s={s}): dp {} vs brute {}", dp.energy, brute.optimum));
        }
    }
    Ok(format!("200 trees, worst relative error {worst:.2e}"))
}

fn clique_reduction() -> Outcome {
    let mut rng = seeded(31337);
    let cfg = OracleConfig::default();
    let (mut yes, mut no) = (0, 0);
    for case in 0..100 {
        let k = rng.gen_range(3..=5);
        let n = rng.gen_range(k..=10);
        let s = [1.0, 2.0][rng.gen_range(0..2)];
        let p = rng.gen_range(0.3..0.95);
        let g = graph(&mut rng, n, p);
        let out = clique_to_rssp(&g, k, Exponent::new(s).unwrap()).map_err(|e| e.to_string())?;
        let t = binom2(k) * 2f64.powf(-s);
        if out.threshold != t {
            return Err(format!("case {case}: threshold {} != {t}", out.threshold));
        }
        let ReducedInstance::Metric(m) = &out.instance else { return Err("no metric".into()) };
        let best = brute_force_riesz(m, k, Exponent::new(s).unwrap(), &cfg).map_err(|e| e.to_string())?;
        let clique = subsets(n, k)
            .iter()
            .any(|sub| sub.iter().enumerate().all(|(a, &u)| sub[a + 1..].iter().all(|&v| g.has_edge(u, v))));
        let decision = best.optimum <= t * (1.0 + 1e-12);
        if decision != clique {
            return Err(format!("case {case} (n={n}, k={k}, s={s}): min {} vs T {t}, clique {clique}", best.optimum));
        }
        if clique {
            yes += 1;
            if (best.optimum - t).abs() > 1e-12 {
                return Err(format!("case {case}: clique exists but min {} != T {t}", best.optimum));
            }
        } else {
            no += 1;
        }
    }
    Ok(format!("100 graphs ({yes} with a k-clique, {no} without)"))
}

fn gis_reduction() -> Outcome {
    let mut rng = seeded(4242);
    let cfg = OracleConfig::default();
    let (mut accepted, mut yes, mut drawn) = (0, 0, 0);
    while accepted < 100 {
        drawn += 1;
        if drawn > 10_000 {
            return Err("could not draw 100 non-trivial instances".into());
        }
        let k = rng.gen_range(3..=4);
        let n = rng.gen_range(k + 1..=10);
        let p = planar_instance(&mut rng, n, 8, k);
        if gap_quantities(&p).is_err() {
            continue;
        }
        accepted += 1;
        let out = gis_to_rssp(&p).map_err(|e| e.to_string())?;
        let Provenance::Gis { gap, .. } = out.provenance else { return Err("wrong provenance".into()) };
        // C(k,2) D_min^-s < delta_max^-s, compared in logs.
        if binom2(k).ln() - out.s * gap.d_min.ln() >= -out.s * gap.delta_max.ln() {
            return Err(format!("instance {accepted}: s = {} does not separate", out.s));
        }
        let m = p.to_metric();
        // Energies in units of D_min keep large integer exponents finite.
        let scaled = rescale(&m, 1.0 / gap.d_min).map_err(|e| e.to_string())?;
        let t = binom2(k);
        let mut below = false;
        let mut independent = false;
        for sub in subsets(n, k) {
            below |= energy(scaled.matrix(), &sub, out.s) <= t;
            independent |= min_dist(m.matrix(), &sub) >= p.delta;
        }
        if below != independent {
            return Err(format!("instance {accepted}: energy <= T {below}, independent set {independent}"));
        }
        // The library's own verification must agree.
        let v = riesz_subset::reductions::verify_gis(&out, &cfg).map_err(|e| e.to_string())?;
        if v.independent_exists != independent || !v.equivalent {
            return Err(format!("instance {accepted}: verify_gis disagrees"));
        }
        yes += usize::from(independent);
    }
    Ok(format!("100 instances ({yes} yes), {} trivial draws skipped", drawn - 100))
}

fn large_s_equivalence() -> Outcome {
    let mut rng = seeded(777);
    let cfg = OracleConfig::default();
    let mut largest_s0: f64 = 0.0;
    for case in 0..50 {
        let n = rng.gen_range(3..=8);
        let m: MetricInstance = bounded_ratio_metric(&mut rng, n);
        let th = large_s_threshold(&m, 3, &cfg).map_err(|e| e.to_string())?;
        largest_s0 = largest_s0.max(th.s0);
        let s = th.s0 * (1.0 + 1e-6) + 1.0;
        let scaled = rescale(&m, 1.0 / th.d_star).map_err(|e| e.to_string())?;
        let best = brute_force_riesz(&scaled, 3, Exponent::new(s).unwrap(), &cfg).map_err(|e| e.to_string())?;
        let d_star = subsets(n, 3).iter().map(|sub| min_dist(m.matrix(), sub)).fold(0.0, f64::max);
        if d_star != th.d_star {
            return Err(format!("case {case}: D* {} vs enumerated {d_star}", th.d_star));
        }
        for w in &best.witnesses {
            let mm = min_dist(m.matrix(), w.indices());
            if mm != d_star {
                return Err(format!("case {case}: minimizer {w} has MM {mm} < D* {d_star} at s = {s}"));
            }
        }
    }
    Ok(format!("50 metrics, largest s0 {largest_s0:.1}"))
}

fn line_mpd() -> Outcome {
    let fixed = LineInstance::new(vec![0.0, 1.0, 3.0, 6.0]).unwrap();
    let v = line_mpd_dp(&fixed, 3).map_err(|e| e.to_string())?.value;
    let w = line_mpd_search(&fixed, 3).map_err(|e| e.to_string())?.value;
    if v != 3.0 || w != 3.0 {
        return Err(format!("{{0,1,3,6}}, k=3: dp {v}, search {w}"));
    }
    let mut rng = seeded(99);
    let cfg = OracleConfig::default();
    for case in 0..200 {
        let n = rng.gen_range(2..=15);
        let k = rng.gen_range(2..=n.min(6));
        let grid = if case % 2 == 0 { Some(rng.gen_range(n..=40)) } else { None };
        let xs = line_points(&mut rng, n, grid);
        let inst = LineInstance::new(xs.clone()).unwrap();
        let dp = line_mpd_dp(&inst, k).map_err(|e| e.to_string())?.value;
        let search = line_mpd_search(&inst, k).map_err(|e| e.to_string())?.value;
        let brute = brute_force_mpd(&MetricInstance::from_line(&xs).unwrap(), k, &cfg)
            .map_err(|e| e.to_string())?
            .optimum;
        if dp != brute || search != brute {
            return Err(format!("case {case} (n={n}, k={k}): dp {dp}, search {search}, brute {brute}"));
        }
    }
    Ok("fixed case = 3; 200 random instances exact".into())
}

fn naive_dp_failure() -> Outcome {
    let cfg = CounterexampleConfig::default();
    let rep = find_line_counterexample(&cfg).map_err(|e| e.to_string())?;
    let c = rep.found.ok_or(format!("none found in {} instances", rep.tried))?;
    let m = MetricInstance::from_line(&c.points).unwrap();
    // Recompute both energies from the raw distances.
    let naive = energy(m.matrix(), c.naive_subset.indices(), 1.0);
    let opt = energy(m.matrix(), c.optimal_subset.indices(), 1.0);
    let true_opt = subsets(c.points.len(), c.k)
        .iter()
        .map(|sub| energy(m.matrix(), sub, 1.0))
        .fold(f64::INFINITY, f64::min);
    if c.points.len() > 8 || c.k > 4 || c.s != 1.0 || (opt - true_opt).abs() > 1e-12 || naive - true_opt <= 1e-6 {
        return Err(format!("witness does not check out: naive {naive}, optimum {true_opt}"));
    }
    Ok(format!("found after {} instances (n={}, k={}), gap {:.6}", rep.tried, c.points.len(), c.k, naive - true_opt))
}

fn bounds() -> Outcome {
    let mut problems = Vec::new();
    let z3 = zeta_minus_one(3.0).map_err(|e| e.to_string())?;
    let z5 = zeta_minus_one(5.0).map_err(|e| e.to_string())?;
    if (z3 - PI * PI / 6.0).abs() >= 1e-9 {
        problems.push(format!("zeta(2) = {z3}"));
    }
    if (z5 - PI.powi(4) / 90.0).abs() >= 1e-9 {
        problems.push(format!("zeta(4) = {z5}"));
    }
    for s in [1.0, 2.0, 3.0, 4.0] {
        let (f, a) = overlap_gap(1.0, s).map_err(|e| e.to_string())?;
        if (f / a - (4.0f64 / 3.0).powf(s)).abs() >= 1e-12 {
            problems.push(format!("overlap ratio at s={s} is {}", f / a));
        }
    }
    let mut layers_ok = Vec::new();
    for layers in 1..=10 {
        match verify_budget(0.5, 3.0, layers) {
            Ok(rep) if rep.measured <= PI * PI && rep.slack > 0.0 => layers_ok.push(layers),
            Ok(rep) => problems.push(format!("layers {layers}: measured {:.6}, slack {:.6}", rep.measured, rep.slack)),
            Err(e) => problems.push(format!("layers {layers}: {e}")),
        }
    }
    if problems.is_empty() {
        Ok("zeta values, overlap ratios and budgets for layers 1..=10".into())
    } else {
        Err(format!("budget holds for layers {layers_ok:?}; {}", problems.join("; ")))
    }
}

fn determinism() -> Outcome {
    let a = data("six_taxa.json");
    let commands: Vec<Vec<&str>> = vec![
        vec!["solve-tree", &a, "-k", "3", "-s", "1"],
        vec!["energy", &a, "--subset", "a,b,e"],
        vec!["brute", &a, "-k", "4", "-s", "2", "--threads", "3"],
        vec!["mpd-line", "", "-k", "3", "--method", "search"],
        vec!["reduce-clique", "", "-k", "3", "-s", "2", "--verify"],
        vec!["reduce-gis", "", "--verify"],
        vec!["large-s", "", "-k", "3", "--verify"],
        vec!["counterexample", "--seed", "5"],
        vec!["bounds", "-r", "0.5", "-s", "3", "--layers", "10"],
    ];
    let line = data("line.json");
    let tri = data("triangle.txt");
    let grid = data("grid3.json");
    let square = data("square.csv");
    for mut cmd in commands {
        match cmd[0] {
            "mpd-line" => cmd[1] = &line,
            "reduce-clique" => cmd[1] = &tri,
            "reduce-gis" => cmd[1] = &grid,
            "large-s" => cmd[1] = &square,
            _ => {}
        }
        let first = riesz(&cmd);
        let second = riesz(&cmd);
        if first != second {
            return Err(format!("`riesz {}` differs between runs", cmd.join(" ")));
        }
        if first.1.is_empty() {
            return Err(format!("`riesz {}` printed nothing", cmd.join(" ")));
        }
    }
    Ok("9 commands byte-identical across two runs".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 six-taxon worked example", two_cherries, 1),
        ("2 tree DP = brute force", dp_oracle, 60),
        ("3 clique reduction", clique_reduction, 60),
        ("4 GIS reduction", gis_reduction, 120),
        ("5 large-s MPD equivalence", large_s_equivalence, 60),
        ("6 line MPD", line_mpd, 30),
        ("7 naive line DP failure", naive_dp_failure, 120),
        ("8 far-field bounds", bounds, 10),
        ("9 determinism", determinism, 60),
    ];
    let mut failed = 0;
    for (name, check, limit) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > Duration::from_secs(limit) => {
                Err(format!("{msg}, but took {elapsed:.2?} (limit {limit} s)"))
            }
            other => other,
        };
        match outcome {
            Ok(msg) => println!("PASS  criterion {name}: {msg} [{elapsed:.2?}]"),
            Err(msg) => {
                failed += 1;
                println!("FAIL  criterion {name}: {msg} [{elapsed:.2?}]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
