//! Chains used across tests, the acceptance suite and the CLI.

use std::collections::{BTreeMap, BTreeSet};

use crate::formula::{parse_formula, Formula};
use crate::markov::{MarkovChain, Rational};

/// Two states: `s0` loops with probability 1/2 and otherwise moves to the
/// absorbing `a`-state.
pub fn example_one() -> MarkovChain {
    chain_from_edges(2, &[(0, 0), (0, 1), (1, 1)], &[(1, "a")])
}

pub const EXAMPLE_ONE_DTMC: &str = "\
# s0 loops with probability 1/2, s1 is absorbing and labeled a
states 2
init 0
label 1 a
trans 0 0 1/2
trans 0 1 1/2
trans 1 1 1
";

/// Uniform probabilities over the listed successors of every state.
pub fn chain_from_edges(m: usize, edges: &[(usize, usize)], labels: &[(usize, &str)]) -> MarkovChain {
    let mut out: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for &(s, t) in edges {
        out.entry(s).or_default().insert(t);
    }
    let trans: Vec<(usize, usize, Rational)> = out
        .iter()
        .flat_map(|(&s, ts)| {
            let p = Rational::new(1.into(), (ts.len() as i64).into());
            ts.iter().map(move |&t| (s, t, p.clone()))
        })
        .collect();
    let mut ls = vec![BTreeSet::new(); m];
    for &(s, a) in labels {
        ls[s].insert(a.to_string());
    }
    MarkovChain::new(m, 0, trans, ls).expect("fixture chain is valid")
}

/// The 33-state chain with three staircases: red states `r`, then blue
/// states `b`, then a tail to the absorbing `g`. Points are named by
/// doubled drawing coordinates so midpoints stay integral.
pub fn fig1_chain() -> MarkovChain {
    let mut names: Vec<(i32, i32)> = vec![(-1, -1)];
    let mut edges: Vec<((i32, i32), (i32, i32))> = vec![((-1, -1), (2, 0))];
    let mut labels: Vec<((i32, i32), &str)> = Vec::new();
    for (shift, label) in [(0, "r"), (8, "b")] {
        let p = |x: i32, y: i32| (x + shift, y);
        // bottom row x = 1, 2, 3, 3.5, 4
        edges.push((p(2, 0), p(4, 0)));
        edges.push((p(4, 0), p(6, 0)));
        edges.push((p(6, 0), p(7, 0)));
        edges.push((p(7, 0), p(8, 0)));
        for x in 1..=4 {
            let top = p(2 * x, 2 * (4 - x));
            labels.push((top, label));
            if x < 4 {
                edges.push((p(2 * x, 0), top));
            }
            let after = p(2 * x + 2, 2 * (4 - x));
            edges.push((top, after));
            if x < 4 {
                let mid = p(2 * x + 3, 2 * (4 - x) - 1);
                edges.push((after, mid));
                edges.push((mid, p(2 * x + 4, 2 * (3 - x))));
            }
        }
    }
    for x in 9..12 {
        edges.push(((2 * x, 0), (2 * x + 2, 0)));
    }
    edges.push(((24, 0), (24, 0)));
    labels.push(((24, 0), "g"));
    for &(a, b) in &edges {
        for n in [a, b] {
            if !names.contains(&n) {
                names.push(n);
            }
        }
    }
    let id = |n: (i32, i32)| names.iter().position(|&m| m == n).expect("named");
    let e: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| (id(a), id(b))).collect();
    let l: Vec<(usize, &str)> = labels.iter().map(|&(n, a)| (id(n), a)).collect();
    chain_from_edges(names.len(), &e, &l)
}

pub fn fig1_formula() -> Formula {
    parse_formula("F[<=x1] r & F[<=x2] b & F[<=x3] g").expect("valid formula")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::bfs;

    #[test]
    fn fig1_shape() {
        let mc = fig1_chain();
        assert_eq!(mc.len(), 33);
        let count = |a: &str| mc.states_with(a).iter().filter(|&&b| b).count();
        assert_eq!((count("r"), count("b"), count("g")), (4, 4, 1));
        let dist = bfs(mc.adj(), mc.init());
        let g = (0..mc.len()).find(|&s| mc.has_label(s, "g")).unwrap();
        assert_eq!(dist[g], Some(14));
        assert!(dist.iter().all(Option::is_some));
    }

    #[test]
    fn example_one_text_matches() {
        let parsed = crate::markov::parse_chain(EXAMPLE_ONE_DTMC).unwrap();
        assert_eq!(parsed.to_string(), example_one().to_string());
    }
}
