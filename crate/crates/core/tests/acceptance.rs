//! One pass/fail line per acceptance criterion. Tolerances are fixed here
//! and every criterion is evaluated even when an earlier one fails.

mod common;

use std::time::{Duration, Instant};

use classmatch::cpm::{solve_cpm, verify_popular_characterization, CpmOutcome};
use classmatch::crmm::solve_crmm;
use classmatch::flow::{decompose, max_flow_ordered, residual, NeighborOrder};
use classmatch::gen::generate;
use classmatch::instance::SAMPLE;
use classmatch::matching::violations;
use classmatch::oracle::{
    oracle_decision, oracle_is_popular, oracle_max_cardinality, oracle_popular,
    oracle_rmm_signature, DEFAULT_CAP,
};
use classmatch::reduction::{brute_force_1in3, parse_formula, reduce};
use classmatch::{is_feasible, Instance, Matching, Signature};

const SAMPLE_BUDGET: Duration = Duration::from_millis(10);
const RANDOM_SEEDS: u64 = 300;
const ORACLE_BUDGET: Duration = Duration::from_secs(60);
const DECOMPOSITION_GRAPHS: usize = 100;
const HARDNESS_BUDGET: Duration = Duration::from_secs(300);
const SCALING_SIZES: [usize; 3] = [1000, 2000, 4000];
const SCALING_RATIO: f64 = 5.0;
const SCALING_REPEATS: usize = 5;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn worked_example() -> Check {
    let start = Instant::now();
    let inst = Instance::parse(SAMPLE).map_err(|e| e.to_string())?;
    let out = solve_crmm(&inst).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    ensure(out.signature == Signature(vec![3, 2]), || {
        format!("signature {}", out.signature)
    })?;
    ensure(is_feasible(&inst, &out.matching), || {
        "solver matching infeasible".into()
    })?;
    let pairs = |list: &[(&'static str, &'static str)]| {
        Matching::from_names(&inst, list.iter().copied()).map_err(|e| e.to_string())
    };
    let m = pairs(&[
        ("a1", "p4"),
        ("a2", "p1"),
        ("a3", "p3"),
        ("a4", "p5"),
        ("a5", "p2"),
    ])?;
    let m_prime = pairs(&[
        ("a1", "p1"),
        ("a2", "p1"),
        ("a3", "p3"),
        ("a4", "p5"),
        ("a5", "p2"),
    ])?;
    ensure(is_feasible(&inst, &m), || "M reported infeasible".into())?;
    let broken: Vec<String> = violations(&inst, &m_prime)
        .iter()
        .map(|v| v.describe(&inst))
        .collect();
    ensure(
        broken == ["class quota exceeded at p1 class {a1 a2 a3}"],
        || format!("M' diagnostics {broken:?}"),
    )?;
    ensure(took < SAMPLE_BUDGET, || format!("took {took:?}"))?;
    Ok(format!(
        "signature (3, 2), M feasible, M' infeasible, {took:?}"
    ))
}

fn walkthrough() -> Check {
    let inst = Instance::parse(SAMPLE).map_err(|e| e.to_string())?;
    let out = solve_crmm(&inst).map_err(|e| e.to_string())?;
    let mut json = serde_json::to_string_pretty(&out.trace).map_err(|e| e.to_string())?;
    json.push('\n');
    ensure(json == include_str!("data/sample_trace.json"), || {
        "trace differs from golden".into()
    })?;
    let first = &out.trace.iterations[0];
    ensure(first.flow_value == 3, || {
        format!("flow {}", first.flow_value)
    })?;
    for (tail, head) in [("C_p1^a3", "C_p1{a1,a2,a3}"), ("C*_p1", "C_p1{a1,a2,a3}")] {
        ensure(
            first
                .deleted_arcs
                .iter()
                .any(|a| a.tail == tail && a.head == head),
            || format!("arc {tail} -> {head} not deleted"),
        )?;
    }
    let pruned: Vec<(&str, &str)> = first
        .pruned_edges
        .iter()
        .map(|e| (e.applicant.as_str(), e.post.as_str()))
        .collect();
    ensure(pruned == [("a2", "p5")], || format!("pruned {pruned:?}"))?;
    Ok(format!(
        "flow 3, {} arcs deleted incl. both tree arcs at C_p1{{a1,a2,a3}}, (a2, p5) pruned",
        first.deleted_arcs.len()
    ))
}

fn crmm_equivalence() -> Check {
    let p = common::small_params();
    let start = Instant::now();
    for seed in 0..RANDOM_SEEDS {
        let inst = generate(seed, &p);
        let out = solve_crmm(&inst).map_err(|e| format!("seed {seed}: {e}"))?;
        let (best, _) = oracle_rmm_signature(&inst, DEFAULT_CAP).map_err(|e| e.to_string())?;
        ensure(out.signature == best, || {
            format!("seed {seed}: solver {} oracle {best}", out.signature)
        })?;
        ensure(is_feasible(&inst, &out.matching), || {
            format!("seed {seed}: infeasible")
        })?;
    }
    let took = start.elapsed();
    ensure(took < ORACLE_BUDGET, || format!("took {took:?}"))?;
    Ok(format!("{RANDOM_SEEDS} instances agree, {took:?}"))
}

fn cpm_equivalence() -> Check {
    let start = Instant::now();
    let mut none = 0;
    for seed in 0..RANDOM_SEEDS {
        let inst = generate(seed, &common::many_to_one_params(seed));
        let found = solve_cpm(&inst).map_err(|e| format!("seed {seed}: {e}"))?;
        let exists = oracle_popular(&inst, DEFAULT_CAP)
            .map_err(|e| e.to_string())?
            .is_some();
        match found {
            CpmOutcome::Popular { matching, .. } => {
                ensure(exists, || format!("seed {seed}: oracle finds none"))?;
                let popular =
                    oracle_is_popular(&inst, &matching, DEFAULT_CAP).map_err(|e| e.to_string())?;
                ensure(popular, || format!("seed {seed}: witness outvoted"))?;
                let shaped =
                    verify_popular_characterization(&inst, &matching).map_err(|e| e.to_string())?;
                ensure(shaped, || format!("seed {seed}: characterization fails"))?;
            }
            CpmOutcome::None => {
                ensure(!exists, || format!("seed {seed}: oracle finds one"))?;
                none += 1;
            }
        }
    }
    let took = start.elapsed();
    ensure(took < ORACLE_BUDGET, || format!("took {took:?}"))?;
    Ok(format!(
        "{RANDOM_SEEDS} instances agree ({none} without a popular matching), {took:?}"
    ))
}

fn decomposition_invariance() -> Check {
    let p = common::small_params();
    let mut graphs = 0;
    let mut seed = 0;
    while graphs < DECOMPOSITION_GRAPHS {
        for g in common::round_networks(&generate(seed, &p)) {
            let split = |order| {
                let f = max_flow_ordered(&g, order);
                decompose(&residual(&g, &f)).map(|d| d.parts().to_vec())
            };
            let up = split(NeighborOrder::Ascending).map_err(|e| e.to_string())?;
            let down = split(NeighborOrder::Descending).map_err(|e| e.to_string())?;
            ensure(up == down, || format!("seed {seed}: decompositions differ"))?;
            graphs += 1;
        }
        seed += 1;
    }
    Ok(format!("{graphs} networks from {seed} instances"))
}

fn deletion_invariants() -> Check {
    let p = common::small_params();
    let mut rounds = 0;
    for seed in 0..RANDOM_SEEDS {
        let inst = generate(seed, &p);
        let its = solve_crmm(&inst)
            .map_err(|e| e.to_string())?
            .trace
            .iterations;
        for (k, it) in its.iter().enumerate() {
            ensure(it.min_cut_ok, || {
                format!("seed {seed} round {}: cut", k + 1)
            })?;
            ensure(
                it.deleted_arcs.iter().all(|a| !a.tag.starts_with("pref")),
                || format!("seed {seed} round {}: preference arc deleted", k + 1),
            )?;
            ensure(
                (0..=k).all(|j| it.rl_counts[j] == its[j].rl_counts[j]),
                || format!("seed {seed} round {}: earlier counts moved", k + 1),
            )?;
            ensure(it.rl_counts[k] == it.flow_value, || {
                format!("seed {seed} round {}: new count differs from flow", k + 1)
            })?;
            rounds += 1;
        }
    }
    Ok(format!("{rounds} rounds over {RANDOM_SEEDS} instances"))
}

fn hardness() -> Check {
    let start = Instant::now();
    let (mut sat, mut unsat) = (0, 0);
    for text in common::FORMULAS {
        let f = parse_formula(text).map_err(|e| e.to_string())?;
        let truth = brute_force_1in3(&f).map_err(|e| e.to_string())?.is_some();
        let (inst, target) = reduce(&f).map_err(|e| e.to_string())?;
        let cap = inst.edges().len();
        let label = text.lines().next().unwrap_or_default();
        let decided = oracle_decision(&inst, &target, cap).map_err(|e| e.to_string())?;
        ensure(decided == truth, || format!("{label}: decision {decided}"))?;
        let popular = oracle_popular(&inst, cap)
            .map_err(|e| e.to_string())?
            .is_some();
        ensure(popular == truth, || format!("{label}: popular {popular}"))?;
        let full = oracle_max_cardinality(&inst, cap).map_err(|e| e.to_string())?
            == inst.applicant_count();
        ensure(full == truth, || format!("{label}: full matching {full}"))?;
        if truth {
            sat += 1;
        } else {
            unsat += 1;
        }
    }
    let took = start.elapsed();
    ensure(took < HARDNESS_BUDGET, || format!("took {took:?}"))?;
    Ok(format!(
        "{sat} satisfiable and {unsat} unsatisfiable formulas agree, {took:?}"
    ))
}

fn scaling() -> Check {
    let mut times = Vec::new();
    for &size in &SCALING_SIZES {
        let inst = common::scaling_instance(size, 1);
        ensure(inst.edges().len() == size, || {
            format!("{} edges instead of {size}", inst.edges().len())
        })?;
        let best = (0..SCALING_REPEATS)
            .map(|_| {
                let start = Instant::now();
                let out = solve_crmm(&inst).expect("scaling instance solves");
                std::hint::black_box(out);
                start.elapsed()
            })
            .min()
            .unwrap();
        times.push(best);
    }
    let ratios: Vec<f64> = times
        .windows(2)
        .map(|w| w[1].as_secs_f64() / w[0].as_secs_f64())
        .collect();
    let shown: Vec<String> = SCALING_SIZES
        .iter()
        .zip(&times)
        .map(|(n, t)| format!("{n}: {:.1} ms", t.as_secs_f64() * 1e3))
        .collect();
    let detail = format!(
        "{}; ratios {}",
        shown.join(", "),
        ratios
            .iter()
            .map(|r| format!("{r:.2}"))
            .collect::<Vec<_>>()
            .join(", ")
    );
    ensure(ratios.iter().all(|&r| r <= SCALING_RATIO), || {
        detail.clone()
    })?;
    Ok(detail)
}

fn main() {
    let checks: [Criterion; 8] = [
        ("worked example replay", worked_example),
        ("first-round walkthrough", walkthrough),
        ("rank-maximal oracle equivalence", crmm_equivalence),
        ("popular oracle equivalence", cpm_equivalence),
        ("decomposition invariance", decomposition_invariance),
        ("deletion invariants", deletion_invariants),
        ("hardness round trip", hardness),
        ("scaling", scaling),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in checks.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(detail) => {
                println!("criterion {} {name}: FAIL ({detail})", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
