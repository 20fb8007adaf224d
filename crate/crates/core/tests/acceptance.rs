//! Acceptance suite: twelve criteria, one PASS/FAIL line each.
//!
//! Run with `cargo test --release --test acceptance`. Failures are reported
//! without failing the run; pass `-- --strict` to exit non-zero on any FAIL.

mod common;

use std::cell::RefCell;
use std::time::{Duration, Instant};

use common::*;
use pltl::buchi::{c_min, gap_of_bscc, min_val_as1_buchi, min_val_pos_buchi, Skeleton};
use pltl::cli;
use pltl::diamond::Checker;
use pltl::formula::{is_fx, parse_formula, substitute, Formula};
use pltl::fx::{emptiness_pos_fx, fx_size, min_set_fx};
use pltl::markov::{bounded_reach_prob, Rational};
use pltl::oracle::fixtures::{example_one, fig1_chain, fig1_formula, EXAMPLE_ONE_DTMC};
use pltl::oracle::{brute_force_min_set, brute_force_sat, eval_lasso, gen_3sat_fixture, Cnf, LassoWord};
use pltl::reach::{ergodicity_data, geometric_bound, min_val_as1, min_val_geq, min_val_pos};
use pltl::valuation::{antichain_bound, MinimalSet, Valuation};
use rand::Rng;

type Outcome = Result<String, String>;

thread_local! {
    /// Every minimal set computed by the suite with its box bound.
    static MINSETS: RefCell<Vec<(MinimalSet, u64)>> = const { RefCell::new(Vec::new()) };
}

fn record(set: &MinimalSet, n: u64) {
    MINSETS.with(|m| m.borrow_mut().push((set.clone(), n)));
}

fn f(s: &str) -> Formula {
    parse_formula(s).expect("valid formula")
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(std::iter::once("pltl").chain(args.iter().copied()), &mut out, &mut err);
    let mut text = String::from_utf8(out).expect("utf-8 report");
    text.push_str(&String::from_utf8_lossy(&err));
    (code, text)
}

fn min_lines(text: &str) -> Vec<&str> {
    text.lines().filter_map(|l| l.strip_prefix("min: ")).collect()
}

fn example_one_minset_geq() -> Outcome {
    let dir = std::env::temp_dir().join(format!("pltl-acc-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let chain = dir.join("example1.dtmc");
    std::fs::write(&chain, EXAMPLE_ONE_DTMC).map_err(|e| e.to_string())?;
    let chain = chain.to_str().expect("utf-8 path");
    for k in 1..=20u32 {
        let p = Rational::new(((1i64 << k) - 1).into(), (1i64 << k).into());
        let got = min_val_geq(&example_one(), "a", &p).map_err(|e| e.to_string())?;
        if got != Some(u64::from(k)) {
            return Err(format!("k={k}: engine gave {got:?}"));
        }
        let t = format!(">={p}");
        let (code, text) = run_cli(&["minset", "--chain", chain, "--formula", "F[<=x] a", "--threshold", &t]);
        if code != 0 || min_lines(&text) != [format!("x={k}")] {
            return Err(format!("k={k}: cli exit {code}, report:\n{text}"));
        }
    }
    Ok("k = 1..20 exact".into())
}

fn example_one_qualitative() -> Outcome {
    let mc = example_one();
    let pos = min_val_pos(&mc, "a");
    let as1 = min_val_as1(&mc, "a");
    let checker = Checker::new(&f("F[<=x] a")).map_err(|e| e.to_string())?;
    let diamond_as1_empty = checker.emptiness_as1(&mc).map_err(|e| e.to_string())?;
    let (set, _) = checker.min_set(&mc).map_err(|e| e.to_string())?;
    record(&set, checker.v_bar(mc.len()).map_err(|e| e.to_string())?);
    if pos == Some(1) && as1.is_none() && diamond_as1_empty && set.points() == [vec![1]] {
        Ok("min >0 = 1, =1 empty".into())
    } else {
        Err(format!("pos {pos:?}, as1 {as1:?}, diamond =1 empty {diamond_as1_empty}, set {set}"))
    }
}

fn fig1_antichain() -> Outcome {
    let mc = fig1_chain();
    let phi = fig1_formula();
    let (set, _) = min_set_fx(&mc, &phi).map_err(|e| e.to_string())?;
    record(&set, mc.len() as u64 * fx_size(&phi).map_err(|e| e.to_string())? as u64);
    let brute = brute_force_min_set(&mc, &phi, 21).map_err(|e| e.to_string())?;
    record(&brute, 21);
    if set.len() != 16 || !set.is_antichain() || set.points() != brute.points() {
        return Err(format!("{} points, brute force {}", set.len(), brute.len()));
    }
    let shown: Vec<String> = set.valuations().map(|v| format!("({v})")).collect();
    Ok(format!("16 points, equal to brute force: {}", shown.join(" ")))
}

fn random_cnf(rng: &mut rand_chacha::ChaCha8Rng) -> Cnf {
    let n = rng.gen_range(1..=4usize);
    let k = rng.gen_range(0..=6usize);
    let clauses = (0..k)
        .map(|_| {
            (0..rng.gen_range(1..=3))
                .map(|_| {
                    let v = rng.gen_range(1..=n as i64);
                    if rng.gen_bool(0.5) { v } else { -v }
                })
                .collect()
        })
        .collect();
    Cnf::new(n, clauses).expect("literals in range")
}

fn sat_reduction() -> Outcome {
    let mut rng = rng(4);
    let (mut sat, mut unsat) = (0, 0);
    for i in 0..600 {
        let cnf = random_cnf(&mut rng);
        let (mc, phi) = gen_3sat_fixture(&cnf).map_err(|e| e.to_string())?;
        let nonempty = !emptiness_pos_fx(&mc, &phi).map_err(|e| e.to_string())?;
        let expected = brute_force_sat(&cnf);
        if nonempty != expected {
            return Err(format!("instance {i} {cnf:?}: fixture {nonempty}, brute force {expected}"));
        }
        if expected { sat += 1 } else { unsat += 1 }
        if i < 6 && cnf.clauses.len() >= 2 && cnf.clauses.len() <= 3 {
            let (set, _) = min_set_fx(&mc, &phi).map_err(|e| e.to_string())?;
            record(&set, mc.len() as u64 * fx_size(&phi).map_err(|e| e.to_string())? as u64);
        }
    }
    Ok(format!("600 instances ({sat} satisfiable, {unsat} unsatisfiable)"))
}

fn cross_engine() -> Outcome {
    let mut rng = rng(5);
    let reach = Checker::new(&f("F[<=x] a")).map_err(|e| e.to_string())?;
    let buchi = Checker::new(&f("G F[<=x] a")).map_err(|e| e.to_string())?;
    let mut compared = 0;
    for i in 0..200 {
        let mc = random_chain(&mut rng, 6, &["a"]);
        let engines = [
            (&reach, min_val_pos(&mc, "a"), min_val_as1(&mc, "a")),
            (&buchi, min_val_pos_buchi(&mc, "a"), min_val_as1_buchi(&mc, "a")),
        ];
        for (checker, pos, as1) in engines {
            for n in 0..=6u64 {
                let v = Valuation::from_pairs([("x", n)]);
                let dp = checker.check_pos(&mc, &v).map_err(|e| e.to_string())?;
                let da = checker.check_as1(&mc, &v).map_err(|e| e.to_string())?;
                let ep = pos.is_some_and(|p| p <= n);
                let ea = as1.is_some_and(|p| p <= n);
                if dp != ep || da != ea {
                    return Err(format!(
                        "chain {i}, n={n}, {:?}: diamond ({dp},{da}) vs engine ({ep},{ea})\n{mc}",
                        checker.vars()
                    ));
                }
                compared += 2;
            }
        }
    }
    Ok(format!("{compared} verdicts agree"))
}

fn bound_property() -> Outcome {
    let mut rng = rng(6);
    let mut nonempty = 0;
    for i in 0..100 {
        let mc = random_chain(&mut rng, 3, &["a", "b"]);
        let (phi, checker) = loop {
            let size = rng.gen_range(2..=4);
            let phi = random_formula_with_var(&mut rng, size, &["a", "b"], "x");
            let checker = Checker::new(&phi).map_err(|e| e.to_string())?;
            if checker.formula_size() <= 4 {
                break (phi, checker);
            }
        };
        let vbar = checker.v_bar(mc.len()).map_err(|e| e.to_string())?;
        let empty_pos = checker.emptiness_pos(&mc).map_err(|e| e.to_string())?;
        let empty_as1 = checker.emptiness_as1(&mc).map_err(|e| e.to_string())?;
        let mut exists_pos = false;
        let mut exists_as1 = false;
        for n in 0..=2 * vbar {
            let v = Valuation::from_pairs([("x", n)]);
            exists_pos = exists_pos || checker.check_pos(&mc, &v).map_err(|e| e.to_string())?;
            exists_as1 = exists_as1 || checker.check_as1(&mc, &v).map_err(|e| e.to_string())?;
            if exists_pos && exists_as1 {
                break;
            }
        }
        if empty_pos == exists_pos || empty_as1 == exists_as1 {
            return Err(format!("instance {i}: {phi} with v_bar {vbar}\n{mc}"));
        }
        if is_fx(&phi) && emptiness_pos_fx(&mc, &phi).map_err(|e| e.to_string())? != empty_pos {
            return Err(format!("instance {i}: FX bound disagrees on {phi}"));
        }
        nonempty += usize::from(exists_pos);
    }
    Ok(format!("100 instances agree ({nonempty} nonempty for >0)"))
}

fn monotonicity() -> Outcome {
    let mut rng = rng(7);
    let mut implied = 0;
    for i in 0..200 {
        let mc = random_chain(&mut rng, 4, &["a", "b"]);
        let size = rng.gen_range(2..=6);
        let phi = random_formula(&mut rng, size, &["a", "b"], &["x", "y"]);
        let checker = Checker::new(&phi).map_err(|e| e.to_string())?;
        let mut v = Valuation::new();
        let mut w = Valuation::new();
        for x in checker.vars() {
            let a = rng.gen_range(0..=4);
            v.set(x, a);
            w.set(x, a + rng.gen_range(0..=3));
        }
        if checker.check_pos(&mc, &v).map_err(|e| e.to_string())? {
            if !checker.check_pos(&mc, &w).map_err(|e| e.to_string())? {
                return Err(format!("triple {i}: {phi} holds at {v} but not at {w}\n{mc}"));
            }
            implied += 1;
        }
    }
    Ok(format!("0 violations ({implied} triples with a positive premise)"))
}

fn brute_bottleneck(sk: &Skeleton, u: usize, seen: &mut Vec<bool>, worst: u64, best: &mut Option<u64>) {
    if sk.targets[u] {
        *best = Some(best.map_or(worst, |b| b.min(worst)));
    }
    for v in 0..sk.cost.len() {
        if let (Some(c), false) = (sk.cost[u][v], seen[v]) {
            seen[v] = true;
            brute_bottleneck(sk, v, seen, worst.max(c), best);
            seen[v] = false;
        }
    }
}

fn c_min_matches_brute_force() -> Outcome {
    let mut rng = rng(8);
    for i in 0..100 {
        let n = rng.gen_range(1..=8);
        let targets = (0..n).map(|_| rng.gen_bool(0.3)).collect();
        let cost = (0..n)
            .map(|u| {
                (0..n)
                    .map(|v| (u != v && rng.gen_bool(0.4)).then(|| rng.gen_range(0..10)))
                    .collect()
            })
            .collect();
        let sk = Skeleton { source: 0, targets, cost };
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut best = None;
        brute_bottleneck(&sk, 0, &mut seen, 0, &mut best);
        if c_min(&sk) != best {
            return Err(format!("graph {i}: c_min {:?}, brute force {best:?}\n{sk:?}", c_min(&sk)));
        }
    }
    Ok("0 mismatches on 100 graphs".into())
}

fn single_bscc_dichotomy() -> Outcome {
    let mut rng = rng(9);
    let checker = Checker::new(&f("G F[<=x] a")).map_err(|e| e.to_string())?;
    for i in 0..50 {
        let mc = random_irreducible_chain(&mut rng, 6, &["a"]);
        let all: Vec<usize> = (0..mc.len()).collect();
        // longest a-free path counted in transitions, infinite on an a-free cycle
        let n_ab: Option<i64> = gap_of_bscc(&mc, &all, "a").map(|g| g as i64 - 1);
        for n in 0..=10u64 {
            let above = n_ab.is_some_and(|b| n as i64 > b);
            let v = Valuation::from_pairs([("x", n)]);
            let as1 = min_val_as1_buchi(&mc, "a").is_some_and(|m| m <= n);
            let pos = min_val_pos_buchi(&mc, "a").is_some_and(|m| m <= n);
            let d_as1 = checker.check_as1(&mc, &v).map_err(|e| e.to_string())?;
            let d_pos = checker.check_pos(&mc, &v).map_err(|e| e.to_string())?;
            if as1 != above || pos != above || d_as1 != above || d_pos != above {
                return Err(format!("chain {i}, n={n}, n_aB {n_ab:?}: as1 {as1}/{d_as1}, pos {pos}/{d_pos}\n{mc}"));
            }
        }
    }
    Ok("50 chains, n = 0..10".into())
}

fn lasso_language() -> Outcome {
    let mut rng = rng(10);
    let mut accepted = 0;
    for i in 0..100 {
        let size = rng.gen_range(1..=5);
        let phi = random_formula(&mut rng, size, &["a", "b"], &["x"]);
        let checker = Checker::new(&phi).map_err(|e| e.to_string())?;
        let mut v = Valuation::new();
        for x in checker.vars() {
            v.set(x, rng.gen_range(0..=3));
        }
        let stem_len = rng.gen_range(0..=4);
        let loop_len = rng.gen_range(1..=4);
        let stem = random_letters(&mut rng, stem_len, &["a", "b"]);
        let lp = random_letters(&mut rng, loop_len, &["a", "b"]);
        let run = checker.accepts_lasso(&stem, &lp, &v).map_err(|e| e.to_string())?;
        let w = LassoWord::new(stem, lp).map_err(|e| e.to_string())?;
        let psi = substitute(&phi, &v).map_err(|e| e.to_string())?;
        let holds = eval_lasso(&w, &psi).map_err(|e| e.to_string())?;
        if run != holds {
            return Err(format!("case {i}: {phi} at {v} on {w}: run {run}, evaluator {holds}"));
        }
        accepted += usize::from(holds);
    }
    Ok(format!("100 cases agree ({accepted} in the language)"))
}

fn geometric_bound_invariant() -> Outcome {
    let mut rng = rng(11);
    let (mut chains, mut checked, mut violations) = (0, 0, Vec::new());
    while chains < 50 {
        let mc = random_chain(&mut rng, 6, &["a"]);
        let target = mc.states_with("a");
        let Some((gamma, b)) = ergodicity_data(&mc, &target) else { continue };
        if gamma <= Rational::from_integer(0.into()) || gamma >= Rational::from_integer(1.into()) {
            continue;
        }
        chains += 1;
        for n in 0..=20u32 {
            let mu = bounded_reach_prob(&mc, &target, n as usize + 1);
            let bound = geometric_bound(&gamma, &b, n);
            checked += 1;
            if mu > bound && violations.len() < 3 {
                violations.push(format!("n={n}: mu={mu} > bound={bound} (gamma={gamma}, b={b})"));
            }
        }
    }
    if violations.is_empty() {
        Ok(format!("{checked} inequalities hold on 50 chains"))
    } else {
        Err(format!("violated on random chains, first cases: {}", violations.join("; ")))
    }
}

fn antichain_cardinality() -> Outcome {
    let sets = MINSETS.with(|m| m.borrow().clone());
    let mut checked = 0;
    for (set, n) in &sets {
        let d = set.vars().len();
        if d < 2 {
            continue;
        }
        checked += 1;
        if set.len() as u128 > antichain_bound(*n, d) {
            return Err(format!("|set| = {} exceeds ({n}*{d})^{} for {set}", set.len(), d - 1));
        }
    }
    if checked == 0 {
        return Err("no minimal set with d >= 2 was computed".into());
    }
    Ok(format!("{checked} minimal sets with d >= 2 within the bound ({} total)", sets.len()))
}

struct Criterion {
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() {
    let secs = |s| Some(Duration::from_secs(s));
    let criteria = [
        Criterion { name: "example-1 quantitative minset", limit: secs(1), run: example_one_minset_geq },
        Criterion { name: "example-1 qualitative", limit: secs(1), run: example_one_qualitative },
        Criterion { name: "fig-1 antichain", limit: secs(60), run: fig1_antichain },
        Criterion { name: "3-sat reduction", limit: secs(120), run: sat_reduction },
        Criterion { name: "cross-engine agreement", limit: secs(300), run: cross_engine },
        Criterion { name: "uniform bound", limit: None, run: bound_property },
        Criterion { name: "monotonicity", limit: None, run: monotonicity },
        Criterion { name: "bottleneck path c_min", limit: None, run: c_min_matches_brute_force },
        Criterion { name: "single-bscc dichotomy", limit: None, run: single_bscc_dichotomy },
        Criterion { name: "lasso language", limit: None, run: lasso_language },
        Criterion { name: "geometric reachability bound", limit: None, run: geometric_bound_invariant },
        Criterion { name: "antichain cardinality", limit: None, run: antichain_cardinality },
    ];
    let mut failed = 0;
    for (i, c) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = (c.run)();
        let took = start.elapsed();
        let outcome = match (outcome, c.limit) {
            (Ok(_), Some(l)) if took > l => Err(format!("took {took:.2?}, limit {l:?}")),
            (o, _) => o,
        };
        let (status, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{status} {:>2} {} [{took:.2?}]: {detail}", i + 1, c.name);
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 && std::env::args().any(|a| a == "--strict") {
        std::process::exit(1);
    }
}
