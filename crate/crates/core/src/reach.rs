//! Parametric reachability `F[<=x] a`.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph;
use crate::markov::{
    ergodicity_coefficient, parse_probability, unbounded_reach_prob, MarkovChain, Rational,
};

/// Probability threshold of a query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Threshold {
    /// `>0`
    Pos,
    /// `=1`
    As1,
    /// `>=p` with `0 < p < 1`
    Geq(Rational),
}

impl FromStr for Threshold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            ">0" => return Ok(Threshold::Pos),
            "=1" => return Ok(Threshold::As1),
            _ => {}
        }
        let Some(p) = s.strip_prefix(">=") else {
            return Err(Error::Usage(format!(
                "unknown threshold `{s}`; expected `>0`, `=1` or `>=p`"
            )));
        };
        let p = parse_probability(p.trim()).map_err(|e| Error::Usage(e.to_string()))?;
        if p.is_zero() || p >= Rational::one() {
            return Err(Error::Usage(format!("threshold {p} must lie strictly between 0 and 1")));
        }
        Ok(Threshold::Geq(p))
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Pos => write!(f, ">0"),
            Threshold::As1 => write!(f, "=1"),
            Threshold::Geq(p) => write!(f, ">={p}"),
        }
    }
}

/// Dense matrix of the chain with every target state made absorbing.
fn absorbing_matrix(mc: &MarkovChain, target: &[bool]) -> Vec<Vec<Rational>> {
    let m = mc.len();
    let mut a = vec![vec![Rational::zero(); m]; m];
    for s in 0..m {
        if target[s] {
            a[s][s] = Rational::one();
        } else {
            for (t, p) in mc.succ(s) {
                a[s][*t] = p.clone();
            }
        }
    }
    a
}

fn mat_mul(x: &[Vec<Rational>], y: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let m = x.len();
    let mut out = vec![vec![Rational::zero(); m]; m];
    for i in 0..m {
        for k in 0..m {
            if x[i][k].is_zero() {
                continue;
            }
            for j in 0..m {
                if !y[k][j].is_zero() {
                    out[i][j] += &x[i][k] * &y[k][j];
                }
            }
        }
    }
    out
}

fn vec_mul(v: &[Rational], a: &[Vec<Rational>]) -> Vec<Rational> {
    let m = v.len();
    let mut out = vec![Rational::zero(); m];
    for (k, vk) in v.iter().enumerate() {
        if vk.is_zero() {
            continue;
        }
        for j in 0..m {
            if !a[k][j].is_zero() {
                out[j] += vk * &a[k][j];
            }
        }
    }
    out
}

/// Evaluates `mu_n` for arbitrary `n` through cached squarings.
struct Powers<'a> {
    target: &'a [bool],
    init: usize,
    squares: Vec<Vec<Vec<Rational>>>,
}

impl<'a> Powers<'a> {
    fn new(mc: &MarkovChain, target: &'a [bool]) -> Self {
        Powers {
            target,
            init: mc.init(),
            squares: vec![absorbing_matrix(mc, target)],
        }
    }

    fn mu(&mut self, n: u64) -> Rational {
        let m = self.target.len();
        let mut v = vec![Rational::zero(); m];
        v[self.init] = Rational::one();
        let mut k = 0;
        let mut rest = n;
        while rest > 0 {
            while self.squares.len() <= k {
                let last = self.squares.last().expect("nonempty");
                let sq = mat_mul(last, last);
                self.squares.push(sq);
            }
            if rest & 1 == 1 {
                v = vec_mul(&v, &self.squares[k]);
            }
            rest >>= 1;
            k += 1;
        }
        (0..m).filter(|&s| self.target[s]).map(|s| v[s].clone()).sum()
    }

    /// Least `n` in `(lo, hi]` with `mu_n >= p`, given `mu_hi >= p`.
    fn search(&mut self, p: &Rational, mut lo: u64, mut hi: u64) -> u64 {
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.mu(mid) >= *p {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

/// Non-target states reachable from the initial state without passing a
/// target state.
fn transient_region(mc: &MarkovChain, target: &[bool]) -> Vec<bool> {
    let non_target: Vec<bool> = target.iter().map(|t| !t).collect();
    graph::reachable(mc.adj(), &[mc.init()], Some(&non_target))
}

/// Least `n` with `Pr(reach target within n) >= p`, `None` if no `n` works.
pub fn min_val_geq_target(mc: &MarkovChain, target: &[bool], p: &Rational) -> Option<u64> {
    if target[mc.init()] {
        return Some(0);
    }
    let limit = unbounded_reach_prob(mc, target);
    if limit < *p {
        return None;
    }
    let mut powers = Powers::new(mc, target);
    if powers.mu(0) >= *p {
        return Some(0);
    }
    if limit == *p {
        // The limit is attained at a finite n iff no probability mass can
        // circulate forever among states that may still reach the target.
        let can = graph::can_reach(mc.adj(), target);
        let region = transient_region(mc, target);
        let live: Vec<bool> = (0..mc.len()).map(|s| region[s] && can[s]).collect();
        let depth = graph::longest_path_nodes(mc.adj(), &live, &[mc.init()])? as u64;
        return Some(powers.search(p, 0, depth.max(1)));
    }
    let mut hi = mc.len() as u64;
    let mut lo = 0;
    while powers.mu(hi) < *p {
        lo = hi;
        hi *= 2;
    }
    Some(powers.search(p, lo, hi))
}

pub fn min_val_geq(mc: &MarkovChain, a: &str, p: &Rational) -> Result<Option<u64>> {
    check_open_unit(p)?;
    Ok(min_val_geq_target(mc, &mc.states_with(a), p))
}

/// True when `V>=p(F[<=x] a)` is empty.
pub fn emptiness_geq(mc: &MarkovChain, a: &str, p: &Rational) -> Result<bool> {
    Ok(min_val_geq(mc, a, p)?.is_none())
}

fn check_open_unit(p: &Rational) -> Result<()> {
    if p.is_zero() || *p >= Rational::one() || *p < Rational::zero() {
        return Err(Error::Usage(format!("threshold {p} must lie strictly between 0 and 1")));
    }
    Ok(())
}

/// Length of a shortest path to an `a`-state.
pub fn min_val_pos(mc: &MarkovChain, a: &str) -> Option<u64> {
    min_val_pos_target(mc, &mc.states_with(a))
}

pub fn min_val_pos_target(mc: &MarkovChain, target: &[bool]) -> Option<u64> {
    let dist = graph::bfs(mc.adj(), mc.init());
    (0..mc.len())
        .filter(|&s| target[s])
        .filter_map(|s| dist[s])
        .min()
        .map(|d| d as u64)
}

/// Length of a longest path to an `a`-state, `None` when an `a`-free cycle
/// is reachable.
pub fn min_val_as1(mc: &MarkovChain, a: &str) -> Option<u64> {
    min_val_as1_target(mc, &mc.states_with(a))
}

pub fn min_val_as1_target(mc: &MarkovChain, target: &[bool]) -> Option<u64> {
    let region = transient_region(mc, target);
    graph::longest_path_nodes(mc.adj(), &region, &[mc.init()]).map(|n| n as u64)
}

/// Transient matrix and exit vector of the chain with targets collapsed into
/// one absorbing state, restricted to states that can still reach it. The
/// initial state comes first. `None` if the initial state is a target or
/// cannot reach one.
pub fn collapsed_transient(
    mc: &MarkovChain,
    target: &[bool],
) -> Option<(Vec<Vec<Rational>>, Vec<Rational>)> {
    if target[mc.init()] {
        return None;
    }
    let can = graph::can_reach(mc.adj(), target);
    let region = transient_region(mc, target);
    if !can[mc.init()] {
        return None;
    }
    let mut states = vec![mc.init()];
    states.extend((0..mc.len()).filter(|&s| s != mc.init() && region[s] && can[s]));
    let mut index = vec![usize::MAX; mc.len()];
    for (i, &s) in states.iter().enumerate() {
        index[s] = i;
    }
    let k = states.len();
    let mut q = vec![vec![Rational::zero(); k]; k];
    let mut r = vec![Rational::zero(); k];
    for (i, &s) in states.iter().enumerate() {
        for (t, p) in mc.succ(s) {
            if target[*t] {
                r[i] += p;
            } else if index[*t] != usize::MAX {
                q[i][index[*t]] = p.clone();
            }
        }
    }
    Some((q, r))
}

/// Ergodicity coefficient `gamma` of the collapsed transient matrix and the
/// largest exit probability `b`.
pub fn ergodicity_data(mc: &MarkovChain, target: &[bool]) -> Option<(Rational, Rational)> {
    let (q, r) = collapsed_transient(mc, target)?;
    let gamma = ergodicity_coefficient(&q).ok()?;
    let b = r.iter().max().cloned().unwrap_or_else(Rational::zero);
    Some((gamma, b))
}

/// `b * (1 - gamma^(n+1)) / (1 - gamma)`, the geometric bound on
/// `mu_(n+1)`; requires `gamma < 1`.
pub fn geometric_bound(gamma: &Rational, b: &Rational, n: u32) -> Rational {
    let g = num_traits::pow(gamma.clone(), n as usize + 1);
    b * (Rational::one() - g) / (Rational::one() - gamma)
}
