//! Seeded random instances shared by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeSet;

use pltl::formula::{Bound, Formula};
use pltl::markov::{MarkovChain, Rational};
use pltl::oracle::Letter;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

fn stochastic_row(rng: &mut ChaCha8Rng, targets: Vec<usize>, s: usize) -> Vec<(usize, usize, Rational)> {
    let weights: Vec<i64> = targets.iter().map(|_| rng.gen_range(1..=4)).collect();
    let total: i64 = weights.iter().sum();
    targets
        .into_iter()
        .zip(weights)
        .map(|(t, w)| (s, t, Rational::new(w.into(), total.into())))
        .collect()
}

fn random_labels(rng: &mut ChaCha8Rng, m: usize, props: &[&str]) -> Vec<BTreeSet<String>> {
    (0..m)
        .map(|_| {
            props
                .iter()
                .filter(|_| rng.gen_bool(0.4))
                .map(|p| p.to_string())
                .collect()
        })
        .collect()
}

/// Chain with `1..=max_m` states, up to three successors per state and
/// random rational weights; state 0 is initial.
pub fn random_chain(rng: &mut ChaCha8Rng, max_m: usize, props: &[&str]) -> MarkovChain {
    let m = rng.gen_range(1..=max_m);
    let mut trans = Vec::new();
    for s in 0..m {
        let k = rng.gen_range(1..=m.min(3));
        let mut all: Vec<usize> = (0..m).collect();
        all.shuffle(rng);
        let mut targets: Vec<usize> = all[..k].to_vec();
        targets.sort_unstable();
        trans.extend(stochastic_row(rng, targets, s));
    }
    let labels = random_labels(rng, m, props);
    MarkovChain::new(m, 0, trans, labels).expect("random chain is valid")
}

/// Strongly connected chain: a Hamiltonian cycle plus random chords.
pub fn random_irreducible_chain(rng: &mut ChaCha8Rng, max_m: usize, props: &[&str]) -> MarkovChain {
    let m = rng.gen_range(1..=max_m);
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(rng);
    let mut trans = Vec::new();
    for i in 0..m {
        let s = order[i];
        let mut targets: BTreeSet<usize> = BTreeSet::from([order[(i + 1) % m]]);
        for _ in 0..rng.gen_range(0..=2) {
            targets.insert(rng.gen_range(0..m));
        }
        trans.extend(stochastic_row(rng, targets.into_iter().collect(), s));
    }
    let labels = random_labels(rng, m, props);
    MarkovChain::new(m, 0, trans, labels).expect("random chain is valid")
}

/// NNF formula with parameters only on bounded eventualities and at most
/// `size` nodes.
pub fn random_formula(rng: &mut ChaCha8Rng, size: usize, atoms: &[&str], vars: &[&str]) -> Formula {
    let b = |f: Formula| Box::new(f);
    if size <= 1 {
        let a = atoms[rng.gen_range(0..atoms.len())];
        return match rng.gen_range(0..5) {
            0 | 1 => Formula::atom(a),
            2 | 3 => Formula::NegAtom(a.to_string()),
            _ => Formula::True,
        };
    }
    let unary = |rng: &mut ChaCha8Rng| random_formula(rng, size - 1, atoms, vars);
    match rng.gen_range(0..10) {
        0 => Formula::Next(b(unary(rng))),
        1 => Formula::Always(b(unary(rng))),
        2 => Formula::Eventually(b(unary(rng))),
        3 | 4 if !vars.is_empty() => {
            let x = vars[rng.gen_range(0..vars.len())];
            Formula::BoundedEventually(Bound::Var(x.to_string()), b(unary(rng)))
        }
        5 => Formula::BoundedAlways(rng.gen_range(0..=2), b(unary(rng))),
        op if size >= 3 => {
            let left = rng.gen_range(1..=size - 2);
            let l = random_formula(rng, left, atoms, vars);
            let r = random_formula(rng, size - 1 - left, atoms, vars);
            match op % 4 {
                0 => Formula::And(b(l), b(r)),
                1 => Formula::Or(b(l), b(r)),
                2 => Formula::Until(b(l), b(r)),
                _ => Formula::Release(b(l), b(r)),
            }
        }
        _ => Formula::Eventually(b(unary(rng))),
    }
}

/// Formula with exactly one parameter occurrence pattern over `x`.
pub fn random_formula_with_var(rng: &mut ChaCha8Rng, size: usize, atoms: &[&str], x: &str) -> Formula {
    loop {
        let f = random_formula(rng, size, atoms, &[x]);
        if !f.vars().is_empty() {
            return f;
        }
    }
}

pub fn random_letters(rng: &mut ChaCha8Rng, len: usize, props: &[&str]) -> Vec<Letter> {
    (0..len)
        .map(|_| {
            props
                .iter()
                .filter(|_| rng.gen_bool(0.5))
                .map(|p| p.to_string())
                .collect()
        })
        .collect()
}
