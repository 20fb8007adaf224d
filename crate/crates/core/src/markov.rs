//! Finite discrete-time Markov chains with exact rational probabilities.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::{self, Sccs};

pub type Rational = BigRational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkovChain {
    init: usize,
    /// Outgoing transitions per state, sorted by target, zero entries dropped.
    succ: Vec<Vec<(usize, Rational)>>,
    adj: Vec<Vec<usize>>,
    labels: Vec<BTreeSet<String>>,
}

impl MarkovChain {
    /// Validates and builds a chain from `(from, to, p)` triples.
    pub fn new(
        m: usize,
        init: usize,
        transitions: impl IntoIterator<Item = (usize, usize, Rational)>,
        labels: Vec<BTreeSet<String>>,
    ) -> Result<Self> {
        if m == 0 {
            return Err(Error::Chain("chain has no states".into()));
        }
        if init >= m {
            return Err(Error::Chain(format!("initial state {init} out of range")));
        }
        if labels.len() != m {
            return Err(Error::Chain(format!(
                "expected {m} label sets, got {}",
                labels.len()
            )));
        }
        let mut succ: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); m];
        let mut seen = BTreeSet::new();
        for (s, t, p) in transitions {
            if s >= m || t >= m {
                return Err(Error::Chain(format!("unknown state in transition {s} -> {t}")));
            }
            if !seen.insert((s, t)) {
                return Err(Error::Chain(format!("duplicate transition {s} -> {t}")));
            }
            if p.is_negative() || p > Rational::one() {
                return Err(Error::Chain(format!("probability {p} of {s} -> {t} outside [0,1]")));
            }
            if !p.is_zero() {
                succ[s].push((t, p));
            }
        }
        for (s, row) in succ.iter_mut().enumerate() {
            row.sort_by_key(|(t, _)| *t);
            let sum: Rational = row.iter().map(|(_, p)| p).sum();
            if !sum.is_one() {
                return Err(Error::Chain(format!("row {s} sums to {sum}, expected 1")));
            }
        }
        let adj = succ
            .iter()
            .map(|row| row.iter().map(|(t, _)| *t).collect())
            .collect();
        Ok(MarkovChain {
            init,
            succ,
            adj,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    pub fn init(&self) -> usize {
        self.init
    }

    /// Same chain with a different initial state.
    pub fn with_init(&self, init: usize) -> Self {
        assert!(init < self.len());
        MarkovChain {
            init,
            ..self.clone()
        }
    }

    pub fn succ(&self, s: usize) -> &[(usize, Rational)] {
        &self.succ[s]
    }

    /// Support digraph.
    pub fn adj(&self) -> &[Vec<usize>] {
        &self.adj
    }

    pub fn prob(&self, s: usize, t: usize) -> Rational {
        self.succ[s]
            .binary_search_by_key(&t, |(u, _)| *u)
            .map(|i| self.succ[s][i].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    pub fn label(&self, s: usize) -> &BTreeSet<String> {
        &self.labels[s]
    }

    pub fn has_label(&self, s: usize, a: &str) -> bool {
        self.labels[s].contains(a)
    }

    /// Indicator vector of the states labeled `a`.
    pub fn states_with(&self, a: &str) -> Vec<bool> {
        (0..self.len()).map(|s| self.has_label(s, a)).collect()
    }

    /// All proposition names used by the labeling.
    pub fn propositions(&self) -> BTreeSet<String> {
        self.labels.iter().flatten().cloned().collect()
    }

    /// States reachable from the initial state.
    pub fn reachable(&self) -> Vec<bool> {
        graph::reachable(&self.adj, &[self.init], None)
    }
}

impl fmt::Display for MarkovChain {
    /// Writes the chain in the `.dtmc` format accepted by [`parse_chain`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "states {}", self.len())?;
        writeln!(f, "init {}", self.init)?;
        for (s, l) in self.labels.iter().enumerate() {
            if !l.is_empty() {
                let names: Vec<&str> = l.iter().map(String::as_str).collect();
                writeln!(f, "label {s} {}", names.join(" "))?;
            }
        }
        for (s, row) in self.succ.iter().enumerate() {
            for (t, p) in row {
                writeln!(f, "trans {s} {t} {p}")?;
            }
        }
        Ok(())
    }
}

/// Parses `num/den`, an integer, or a decimal literal, exactly.
pub fn parse_probability(text: &str) -> Result<Rational> {
    let bad = || Error::Chain(format!("bad probability `{text}`"));
    let int = |s: &str| -> Result<BigInt> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        s.parse().map_err(|_| bad())
    };
    if let Some((n, d)) = text.split_once('/') {
        let d = int(d.trim())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(int(n.trim())?, d));
    }
    let (whole, frac) = text.split_once('.').unwrap_or((text, ""));
    let whole = if whole.is_empty() { "0" } else { whole };
    if frac.is_empty() && text.ends_with('.') {
        return Err(bad());
    }
    let digits = format!("{whole}{frac}");
    let scale = num_traits::pow(BigInt::from(10), frac.len());
    Ok(Rational::new(int(&digits)?, scale))
}

/// Parses the line-oriented `.dtmc` format:
///
/// ```text
/// states 2
/// init 0
/// label 1 a
/// trans 0 0 1/2
/// trans 0 1 0.5
/// trans 1 1 1
/// ```
pub fn parse_chain(text: &str) -> Result<MarkovChain> {
    let mut m: Option<usize> = None;
    let mut init = None;
    let mut labels: Vec<BTreeSet<String>> = Vec::new();
    let mut trans = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = |msg: String| Error::Chain(format!("line {}: {msg}", no + 1));
        let words: Vec<&str> = line.split_whitespace().collect();
        let state = |w: &str| -> Result<usize> {
            let s: usize = w.parse().map_err(|_| at(format!("bad state id `{w}`")))?;
            match m {
                Some(m) if s < m => Ok(s),
                Some(_) => Err(at(format!("unknown state {s}"))),
                None => Err(at("`states` must come first".into())),
            }
        };
        match words[0] {
            "states" if words.len() == 2 => {
                if m.is_some() {
                    return Err(at("`states` given twice".into()));
                }
                let n: usize = words[1]
                    .parse()
                    .map_err(|_| at(format!("bad state count `{}`", words[1])))?;
                m = Some(n);
                labels = vec![BTreeSet::new(); n];
            }
            "init" if words.len() == 2 => {
                if init.is_some() {
                    return Err(at("`init` given twice".into()));
                }
                init = Some(state(words[1])?);
            }
            "label" if words.len() >= 3 => {
                let s = state(words[1])?;
                labels[s].extend(words[2..].iter().map(|w| w.to_string()));
            }
            "trans" if words.len() == 4 => {
                let s = state(words[1])?;
                let t = state(words[2])?;
                let p = parse_probability(words[3]).map_err(|e| at(e.to_string()))?;
                trans.push((s, t, p));
            }
            other => return Err(at(format!("cannot parse `{other}` line"))),
        }
    }
    let m = m.ok_or_else(|| Error::Chain("missing `states` line".into()))?;
    let init = init.ok_or_else(|| Error::Chain("no initial state".into()))?;
    MarkovChain::new(m, init, trans, labels)
}

#[derive(Clone, Debug)]
pub struct SccDecomposition {
    pub sccs: Sccs,
    /// Successor components of each component.
    pub condensation: Vec<BTreeSet<usize>>,
}

impl SccDecomposition {
    pub fn bottoms(&self) -> impl Iterator<Item = &[usize]> {
        (0..self.sccs.len())
            .filter(|&c| self.sccs.bottom[c])
            .map(|c| self.sccs.members[c].as_slice())
    }
}

pub fn scc_decompose(mc: &MarkovChain) -> SccDecomposition {
    let sccs = graph::tarjan(mc.adj(), None);
    let mut condensation = vec![BTreeSet::new(); sccs.len()];
    for (s, succ) in mc.adj().iter().enumerate() {
        for &t in succ {
            if sccs.comp[s] != sccs.comp[t] {
                condensation[sccs.comp[s]].insert(sccs.comp[t]);
            }
        }
    }
    SccDecomposition { sccs, condensation }
}

/// Step-by-step bounded reachability: after `k` steps `values[s]` is the
/// probability of reaching the target from `s` within `k` steps.
#[derive(Clone, Debug)]
pub struct BoundedReach<'a> {
    mc: &'a MarkovChain,
    target: &'a [bool],
    values: Vec<Rational>,
    steps: usize,
}

impl<'a> BoundedReach<'a> {
    pub fn new(mc: &'a MarkovChain, target: &'a [bool]) -> Self {
        let values = target
            .iter()
            .map(|&t| if t { Rational::one() } else { Rational::zero() })
            .collect();
        BoundedReach {
            mc,
            target,
            values,
            steps: 0,
        }
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Probability from the initial state after the current number of steps.
    pub fn current(&self) -> &Rational {
        &self.values[self.mc.init()]
    }

    pub fn step(&mut self) {
        let next = (0..self.mc.len())
            .map(|s| {
                if self.target[s] {
                    Rational::one()
                } else {
                    self.mc
                        .succ(s)
                        .iter()
                        .map(|(t, p)| p * &self.values[*t])
                        .sum()
                }
            })
            .collect();
        self.values = next;
        self.steps += 1;
    }

    pub fn advance_to(&mut self, n: usize) {
        while self.steps < n {
            self.step();
        }
    }
}

/// Probability of reaching `target` within `n` steps.
pub fn bounded_reach_prob(mc: &MarkovChain, target: &[bool], n: usize) -> Rational {
    let mut it = BoundedReach::new(mc, target);
    it.advance_to(n);
    it.current().clone()
}

/// Probability of eventually reaching `target`, from every state.
pub fn unbounded_reach_probs(mc: &MarkovChain, target: &[bool]) -> Vec<Rational> {
    let m = mc.len();
    let can = graph::can_reach(mc.adj(), target);
    let unknown: Vec<usize> = (0..m).filter(|&s| can[s] && !target[s]).collect();
    let mut index = vec![usize::MAX; m];
    for (i, &s) in unknown.iter().enumerate() {
        index[s] = i;
    }
    // (I - Q) x = r over the unknown states
    let k = unknown.len();
    let mut a = vec![vec![Rational::zero(); k + 1]; k];
    for (i, &s) in unknown.iter().enumerate() {
        a[i][i] = Rational::one();
        for (t, p) in mc.succ(s) {
            if target[*t] {
                a[i][k] += p;
            } else if can[*t] {
                a[i][index[*t]] -= p;
            }
        }
    }
    let x = solve(a);
    (0..m)
        .map(|s| {
            if target[s] {
                Rational::one()
            } else if can[s] {
                x[index[s]].clone()
            } else {
                Rational::zero()
            }
        })
        .collect()
}

pub fn unbounded_reach_prob(mc: &MarkovChain, target: &[bool]) -> Rational {
    unbounded_reach_probs(mc, target)[mc.init()].clone()
}

/// Gauss-Jordan elimination on an augmented, nonsingular system.
fn solve(mut a: Vec<Vec<Rational>>) -> Vec<Rational> {
    let k = a.len();
    for col in 0..k {
        let pivot = (col..k)
            .find(|&r| !a[r][col].is_zero())
            .expect("system is nonsingular");
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for v in a[col].iter_mut().skip(col) {
            *v *= &inv;
        }
        for r in 0..k {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..=k {
                    let delta = &f * &a[col][c];
                    a[r][c] -= delta;
                }
            }
        }
    }
    a.into_iter().map(|row| row[k].clone()).collect()
}

/// Shortest path lengths in the support digraph; `None` when unreachable.
pub fn all_pairs_distance(mc: &MarkovChain) -> Vec<Vec<Option<usize>>> {
    (0..mc.len()).map(|s| graph::bfs(mc.adj(), s)).collect()
}

/// `1 - min over row pairs of sum_k min(Q(i,k), Q(j,k))`.
pub fn ergodicity_coefficient(q: &[Vec<Rational>]) -> Result<Rational> {
    if let Some(i) = q.iter().position(|row| row.iter().all(Zero::is_zero)) {
        return Err(Error::Chain(format!("row {i} of the matrix is zero")));
    }
    let mut least: Option<Rational> = None;
    for (i, ri) in q.iter().enumerate() {
        for rj in &q[i..] {
            let overlap: Rational = ri.iter().zip(rj).map(|(x, y)| x.min(y).clone()).sum();
            if least.as_ref().map_or(true, |l| overlap < *l) {
                least = Some(overlap);
            }
        }
    }
    Ok(Rational::one() - least.unwrap_or_else(Rational::zero))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    const EXAMPLE_ONE: &str = "\
# two states, a only at 1
states 2
init 0
label 1 a
trans 0 0 1/2
trans 0 1 0.5
trans 1 1 1
";

    #[test]
    fn parses_example_one() {
        let mc = parse_chain(EXAMPLE_ONE).unwrap();
        assert_eq!(mc.len(), 2);
        assert_eq!(mc.prob(0, 0), r(1, 2));
        assert_eq!(mc.prob(0, 1), r(1, 2));
        assert!(mc.has_label(1, "a"));
        assert_eq!(parse_chain(&mc.to_string()).unwrap(), mc);
    }

    #[test]
    fn rejects_bad_chains() {
        let err = |s: &str| parse_chain(s).unwrap_err().to_string();
        assert!(err("states 1\ninit 0\ntrans 0 0 3/4\n").contains("sums to 3/4"));
        assert!(err("states 1\ninit 0\ntrans 0 1 1\n").contains("unknown state"));
        assert!(err("states 1\ninit 0\ntrans 0 0 1/2\ntrans 0 0 1/2\n").contains("duplicate"));
        assert!(err("states 1\ntrans 0 0 1\n").contains("no initial state"));
        assert!(err("states 1\ninit 0\ntrans 0 0 -1\n").contains("bad probability"));
    }

    #[test]
    fn smallest_chain() {
        let mc = parse_chain("states 1\ninit 0\nlabel 0 a\ntrans 0 0 1\n").unwrap();
        assert_eq!(mc.len(), 1);
    }

    #[test]
    fn exact_decimals() {
        assert_eq!(parse_probability("0.5").unwrap(), r(1, 2));
        assert_eq!(parse_probability("0.125").unwrap(), r(1, 8));
        assert_eq!(parse_probability("1").unwrap(), r(1, 1));
        assert_eq!(parse_probability(".25").unwrap(), r(1, 4));
        assert_eq!(parse_probability("2/6").unwrap(), r(1, 3));
        assert!(parse_probability("1/0").is_err());
        assert!(parse_probability("1.").is_err());
        assert!(parse_probability("1e-3").is_err());
    }

    #[test]
    fn scc_examples() {
        let mc = parse_chain(EXAMPLE_ONE).unwrap();
        let d = scc_decompose(&mc);
        assert_eq!(d.sccs.len(), 2);
        assert_eq!(d.bottoms().collect::<Vec<_>>(), vec![&[1][..]]);

        let cycle = parse_chain("states 3\ninit 0\ntrans 0 1 1\ntrans 1 2 1\ntrans 2 0 1\n").unwrap();
        let d = scc_decompose(&cycle);
        assert_eq!(d.sccs.len(), 1);
        assert!(d.sccs.bottom[0]);

        let fork = parse_chain(
            "states 3\ninit 0\ntrans 0 1 1/2\ntrans 0 2 1/2\ntrans 1 1 1\ntrans 2 2 1\n",
        )
        .unwrap();
        assert_eq!(scc_decompose(&fork).bottoms().count(), 2);
    }

    #[test]
    fn bounded_reachability() {
        let mc = parse_chain(EXAMPLE_ONE).unwrap();
        let t = mc.states_with("a");
        assert_eq!(bounded_reach_prob(&mc, &t, 3), r(7, 8));
        assert_eq!(bounded_reach_prob(&mc, &t, 0), r(0, 1));
        let at_start = mc.with_init(1);
        assert_eq!(bounded_reach_prob(&at_start, &t, 5), r(1, 1));
        let none = vec![false; 2];
        assert_eq!(bounded_reach_prob(&mc, &none, 4), r(0, 1));
    }

    #[test]
    fn unbounded_reachability() {
        let mc = parse_chain(EXAMPLE_ONE).unwrap();
        assert_eq!(unbounded_reach_prob(&mc, &mc.states_with("a")), r(1, 1));
        assert_eq!(unbounded_reach_prob(&mc, &mc.states_with("zzz")), r(0, 1));
        let coin = parse_chain(
            "states 3\ninit 0\nlabel 1 a\ntrans 0 1 1/2\ntrans 0 2 1/2\ntrans 1 1 1\ntrans 2 2 1\n",
        )
        .unwrap();
        assert_eq!(unbounded_reach_prob(&coin, &coin.states_with("a")), r(1, 2));
    }

    #[test]
    fn distances() {
        let mc = parse_chain(EXAMPLE_ONE).unwrap();
        let d = all_pairs_distance(&mc);
        assert_eq!(d[0][1], Some(1));
        assert_eq!(d[1][0], None);
        assert_eq!(d[0][0], Some(0));
        let line = parse_chain("states 3\ninit 0\ntrans 0 1 1\ntrans 1 2 1\ntrans 2 2 1\n").unwrap();
        assert_eq!(all_pairs_distance(&line)[0][2], Some(2));
    }

    #[test]
    fn ergodicity() {
        assert_eq!(ergodicity_coefficient(&[vec![r(1, 2)]]).unwrap(), r(1, 2));
        let same = vec![vec![r(1, 4), r(1, 2)], vec![r(1, 4), r(1, 2)]];
        assert_eq!(ergodicity_coefficient(&same).unwrap(), r(1, 4));
        let disjoint = vec![vec![r(1, 2), r(0, 1)], vec![r(0, 1), r(1, 2)]];
        assert_eq!(ergodicity_coefficient(&disjoint).unwrap(), r(1, 1));
        assert!(ergodicity_coefficient(&[vec![r(0, 1)]]).is_err());
    }
}
