//! Valuations, minimal valuation sets and the bisection search.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Assignment of naturals to parameter names.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Valuation(BTreeMap<String, u64>);

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every name in `names` mapped to `value`.
    pub fn uniform<'a>(names: impl IntoIterator<Item = &'a String>, value: u64) -> Self {
        Valuation(names.into_iter().map(|x| (x.clone(), value)).collect())
    }

    pub fn from_pairs<S: Into<String>>(pairs: impl IntoIterator<Item = (S, u64)>) -> Self {
        Valuation(pairs.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    /// Builds a valuation from a point whose coordinates follow `names`.
    pub fn from_point(names: &[String], point: &[u64]) -> Self {
        Valuation(names.iter().cloned().zip(point.iter().copied()).collect())
    }

    pub fn get(&self, name: &str) -> Option<u64> {
        self.0.get(name).copied()
    }

    pub fn set(&mut self, name: &str, value: u64) {
        self.0.insert(name.to_string(), value);
    }

    pub fn names(&self) -> Vec<String> {
        self.0.keys().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Coordinates in the order of `names`.
    pub fn point(&self, names: &[String]) -> Result<Vec<u64>> {
        names
            .iter()
            .map(|x| {
                self.get(x)
                    .ok_or_else(|| Error::Valuation(format!("no value for variable {x}")))
            })
            .collect()
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for Valuation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut out = BTreeMap::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Valuation(format!("expected name=value, got `{part}`")))?;
            let k = k.trim();
            let v: u64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Valuation(format!("bad value for {k}: `{}`", v.trim())))?;
            if out.insert(k.to_string(), v).is_some() {
                return Err(Error::Valuation(format!("variable {k} assigned twice")));
            }
        }
        Ok(Valuation(out))
    }
}

/// Componentwise order.
pub fn leq(v: &Valuation, w: &Valuation) -> Result<bool> {
    if v.0.len() != w.0.len() || v.0.keys().ne(w.0.keys()) {
        return Err(Error::Valuation(format!(
            "variable sets differ: {{{}}} vs {{{}}}",
            v.names().join(","),
            w.names().join(",")
        )));
    }
    Ok(v.0.values().zip(w.0.values()).all(|(a, b)| a <= b))
}

fn dominates(u: &[u64], v: &[u64]) -> bool {
    u.iter().zip(v).all(|(a, b)| a <= b)
}

/// The box `{0..bound}^d` over `vars`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypercube {
    pub vars: Vec<String>,
    pub bound: u64,
}

impl Hypercube {
    pub fn new(vars: impl IntoIterator<Item = String>, bound: u64) -> Self {
        Hypercube {
            vars: vars.into_iter().collect(),
            bound,
        }
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    /// Number of points, saturating.
    pub fn volume(&self) -> u128 {
        let side = self.bound as u128 + 1;
        (0..self.dim()).fold(1u128, |acc, _| acc.saturating_mul(side))
    }
}

/// Upper bound on the size of an antichain in `{0..n}^d`, for `d >= 2` and
/// `n >= 1` (for `n = 0` the only antichain is the single origin).
pub fn antichain_bound(n: u64, d: usize) -> u128 {
    let base = n as u128 * d as u128;
    (1..d).fold(1u128, |acc, _| acc.saturating_mul(base))
}

/// Antichain of minimal valuations, kept in lexicographic order.
///
/// Represents the upward closure of its elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimalSet {
    vars: Vec<String>,
    points: Vec<Vec<u64>>,
}

impl MinimalSet {
    pub fn new(vars: Vec<String>) -> Self {
        MinimalSet {
            vars,
            points: Vec::new(),
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn points(&self) -> &[Vec<u64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn valuations(&self) -> impl Iterator<Item = Valuation> + '_ {
        self.points
            .iter()
            .map(|p| Valuation::from_point(&self.vars, p))
    }

    fn check_dim(&self, v: &Valuation) -> Result<Vec<u64>> {
        if v.len() != self.vars.len() {
            return Err(Error::Valuation(format!(
                "expected {} variables, got {}",
                self.vars.len(),
                v.len()
            )));
        }
        v.point(&self.vars)
    }

    pub fn insert_minimal(&mut self, v: &Valuation) -> Result<()> {
        let p = self.check_dim(v)?;
        self.insert_point(p);
        Ok(())
    }

    /// Returns false when `p` was already covered.
    pub(crate) fn insert_point(&mut self, p: Vec<u64>) -> bool {
        if self.covers(&p) {
            return false;
        }
        self.points.retain(|u| !dominates(&p, u));
        let at = self.points.partition_point(|u| u < &p);
        self.points.insert(at, p);
        true
    }

    pub fn member(&self, v: &Valuation) -> Result<bool> {
        let p = self.check_dim(v)?;
        Ok(self.covers(&p))
    }

    /// Whether some stored point lies below `p`. Only points whose first
    /// coordinate is at most `p[0]` can qualify, and they form a prefix of
    /// the sorted list.
    pub(crate) fn covers(&self, p: &[u64]) -> bool {
        let Some(&first) = p.first() else {
            return !self.points.is_empty();
        };
        let end = self.points.partition_point(|u| u[0] <= first);
        self.points[..end].iter().any(|u| dominates(u, p))
    }

    pub fn is_antichain(&self) -> bool {
        self.points.iter().enumerate().all(|(i, u)| {
            self.points
                .iter()
                .enumerate()
                .all(|(j, w)| i == j || !dominates(u, w))
        })
    }
}

impl fmt::Display for MinimalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in self.valuations() {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

struct Search<'a, F> {
    oracle: F,
    vars: &'a [String],
    bound: u64,
    /// Minimal known-true points.
    known_true: MinimalSet,
    /// Maximal known-false points, stored as `bound - p` so that the
    /// antichain machinery applies unchanged.
    known_false: MinimalSet,
    calls: usize,
}

impl<F: FnMut(&Valuation) -> Result<bool>> Search<'_, F> {
    fn query(&mut self, p: &[u64]) -> Result<bool> {
        if self.known_true.covers(p) {
            return Ok(true);
        }
        let flipped: Vec<u64> = p.iter().map(|c| self.bound - c).collect();
        if self.known_false.covers(&flipped) {
            return Ok(false);
        }
        self.calls += 1;
        let b = (self.oracle)(&Valuation::from_point(self.vars, p))?;
        if b {
            self.known_true.insert_point(p.to_vec());
        } else {
            self.known_false.insert_point(flipped);
        }
        Ok(b)
    }

    /// Minimal points, as suffixes, of the slice with the leading
    /// coordinates fixed to `prefix`.
    fn slice(&mut self, prefix: &mut Vec<u64>) -> Result<Vec<Vec<u64>>> {
        let k = prefix.len();
        let d = self.vars.len();
        if k == d {
            return Ok(if self.query(prefix)? { vec![vec![]] } else { vec![] });
        }
        if k + 1 == d {
            return self.line(prefix);
        }
        let mut at = BTreeMap::new();
        let top = self.sub_slice(prefix, self.bound)?;
        if top.is_empty() {
            return Ok(top);
        }
        at.insert(self.bound, top);
        let bottom = self.sub_slice(prefix, 0)?;
        at.insert(0, bottom);
        self.refine(prefix, 0, self.bound, &mut at)?;

        // A point (c, q) is minimal iff q is minimal in slice c and (c-1, q)
        // is false. Slices only change at refined positions.
        let mut out = Vec::new();
        let mut prev: Option<&Vec<Vec<u64>>> = None;
        for (&c, cur) in &at {
            for q in cur {
                let covered = prev.is_some_and(|ps| ps.iter().any(|u| dominates(u, q)));
                if !covered {
                    let mut p = Vec::with_capacity(q.len() + 1);
                    p.push(c);
                    p.extend_from_slice(q);
                    out.push(p);
                }
            }
            prev = Some(cur);
        }
        Ok(out)
    }

    fn sub_slice(&mut self, prefix: &mut Vec<u64>, c: u64) -> Result<Vec<Vec<u64>>> {
        prefix.push(c);
        let r = self.slice(prefix);
        prefix.pop();
        r
    }

    /// Bisects `[lo, hi]` until neighbouring computed slices are equal or
    /// adjacent.
    fn refine(
        &mut self,
        prefix: &mut Vec<u64>,
        lo: u64,
        hi: u64,
        at: &mut BTreeMap<u64, Vec<Vec<u64>>>,
    ) -> Result<()> {
        if hi - lo <= 1 || at[&lo] == at[&hi] {
            return Ok(());
        }
        let mid = lo + (hi - lo) / 2;
        let s = self.sub_slice(prefix, mid)?;
        at.insert(mid, s);
        self.refine(prefix, mid, hi, at)?;
        self.refine(prefix, lo, mid, at)
    }

    /// Binary search for the least true value of the last coordinate.
    fn line(&mut self, prefix: &mut Vec<u64>) -> Result<Vec<Vec<u64>>> {
        let (mut a, mut b) = (0, self.bound + 1);
        while a < b {
            let mid = a + (b - a) / 2;
            prefix.push(mid);
            let t = self.query(prefix);
            prefix.pop();
            if t? {
                b = mid;
            } else {
                a = mid + 1;
            }
        }
        Ok(if a <= self.bound { vec![vec![a]] } else { vec![] })
    }
}

/// Minimal points of `{v in h | oracle(v)}` for a monotone `oracle`,
/// together with the number of oracle calls made.
///
/// The first coordinate is bisected: the minimal set of the slice at each
/// probed value is computed recursively, and an interval is abandoned once
/// the slices at both of its ends agree. The last coordinate is a plain
/// binary search. Every point is passed to the oracle at most once.
pub fn bisection_min_set<F>(h: &Hypercube, oracle: F) -> Result<(MinimalSet, usize)>
where
    F: FnMut(&Valuation) -> Result<bool>,
{
    let mut s = Search {
        oracle,
        vars: &h.vars,
        bound: h.bound,
        known_true: MinimalSet::new(h.vars.clone()),
        known_false: MinimalSet::new(h.vars.clone()),
        calls: 0,
    };
    let mut out = MinimalSet::new(h.vars.clone());
    for p in s.slice(&mut Vec::new())? {
        out.insert_point(p);
    }
    Ok((out, s.calls))
}

/// Exhaustive scan of `h`.
pub fn brute_force_min_set<F>(h: &Hypercube, mut oracle: F) -> Result<MinimalSet>
where
    F: FnMut(&Valuation) -> Result<bool>,
{
    let d = h.dim();
    let mut out = MinimalSet::new(h.vars.clone());
    let mut p = vec![0u64; d];
    loop {
        if !out.covers(&p) && oracle(&Valuation::from_point(&h.vars, &p))? {
            out.insert_point(p.clone());
        }
        let mut k = d;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            if p[k] < h.bound {
                p[k] += 1;
                break;
            }
            p[k] = 0;
        }
    }
}
