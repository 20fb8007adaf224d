//! Reference evaluators used to validate the engines: three-valued
//! semantics on finite prefixes, exact evaluation on lasso words, sampling,
//! brute-force valuation scans and reduction fixtures.

pub mod fixtures;
pub mod sample;
pub mod sat;

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Not;
use std::str::FromStr;

use crate::diamond::Checker;
use crate::error::{Error, Result};
use crate::formula::{Bound, Formula};
use crate::markov::MarkovChain;
use crate::valuation::{brute_force_min_set as scan, Hypercube, MinimalSet};

pub use sample::{sample_lower_bound, SampleReport};
pub use sat::{brute_force_sat, gen_3sat_fixture, parse_dimacs, Cnf};

pub type Letter = BTreeSet<String>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict3 {
    True,
    False,
    Unknown,
}

impl Verdict3 {
    fn of(b: bool) -> Self {
        if b {
            Verdict3::True
        } else {
            Verdict3::False
        }
    }

    pub fn and(self, o: Self) -> Self {
        use Verdict3::*;
        match (self, o) {
            (False, _) | (_, False) => False,
            (True, True) => True,
            _ => Unknown,
        }
    }

    pub fn or(self, o: Self) -> Self {
        !(!self).and(!o)
    }
}

impl Not for Verdict3 {
    type Output = Verdict3;

    fn not(self) -> Self {
        match self {
            Verdict3::True => Verdict3::False,
            Verdict3::False => Verdict3::True,
            Verdict3::Unknown => Verdict3::Unknown,
        }
    }
}

impl fmt::Display for Verdict3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict3::True => "certainly-true",
            Verdict3::False => "certainly-false",
            Verdict3::Unknown => "unknown",
        })
    }
}

/// Verdict of `psi` on every infinite extension of the prefix `u`.
///
/// Positions at or beyond `u.len()` are all alike (nothing is known about
/// them), so unbounded operators only need to look one position past the
/// prefix. Parametric bounds evaluate to unknown.
pub fn eval_prefix(u: &[Letter], psi: &Formula) -> Verdict3 {
    eval3(u, psi, 0)
}

fn eval3(u: &[Letter], psi: &Formula, i: usize) -> Verdict3 {
    use Formula as F;
    use Verdict3::*;
    let n = u.len();
    let horizon = i.max(n);
    match psi {
        F::True => True,
        F::False => False,
        F::Atom(a) => u.get(i).map_or(Unknown, |l| Verdict3::of(l.contains(a))),
        F::NegAtom(a) => u.get(i).map_or(Unknown, |l| Verdict3::of(!l.contains(a))),
        F::Not(x) => !eval3(u, x, i),
        F::And(x, y) => eval3(u, x, i).and(eval3(u, y, i)),
        F::Or(x, y) => eval3(u, x, i).or(eval3(u, y, i)),
        F::Next(x) => eval3(u, x, i + 1),
        F::Eventually(x) => (i..=horizon).fold(False, |acc, j| acc.or(eval3(u, x, j))),
        F::Always(x) => (i..=horizon).fold(True, |acc, j| acc.and(eval3(u, x, j))),
        F::BoundedEventually(Bound::Const(c), x) => window(i, *c, horizon)
            .fold(False, |acc, j| acc.or(eval3(u, x, j))),
        F::BoundedEventually(Bound::Var(_), _) => Unknown,
        F::BoundedAlways(c, x) => window(i, *c, horizon).fold(True, |acc, j| acc.and(eval3(u, x, j))),
        F::Until(x, y) => {
            let mut acc = False;
            let mut prefix = True;
            for j in i..=horizon {
                acc = acc.or(prefix.and(eval3(u, y, j)));
                prefix = prefix.and(eval3(u, x, j));
            }
            acc
        }
        F::Release(x, y) => {
            let mut acc = True;
            let mut prefix = False;
            for j in i..=horizon {
                acc = acc.and(prefix.or(eval3(u, y, j)));
                prefix = prefix.or(eval3(u, x, j));
            }
            acc
        }
    }
}

/// Positions `i..=i+c`, with everything past `horizon` represented by
/// `horizon` itself.
fn window(i: usize, c: u64, horizon: usize) -> impl Iterator<Item = usize> {
    let last = (i as u64).saturating_add(c).min(horizon as u64) as usize;
    i..=last.max(i)
}

/// Ultimately periodic word `stem . loop^omega`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LassoWord {
    pub stem: Vec<Letter>,
    pub lp: Vec<Letter>,
}

impl LassoWord {
    pub fn new(stem: Vec<Letter>, lp: Vec<Letter>) -> Result<Self> {
        if lp.is_empty() {
            return Err(Error::Usage("lasso loop must be nonempty".into()));
        }
        Ok(LassoWord { stem, lp })
    }

    pub fn positions(&self) -> usize {
        self.stem.len() + self.lp.len()
    }

    fn succ(&self, i: usize) -> usize {
        if i + 1 < self.positions() {
            i + 1
        } else {
            self.stem.len()
        }
    }

    fn letter(&self, i: usize) -> &Letter {
        if i < self.stem.len() {
            &self.stem[i]
        } else {
            &self.lp[i - self.stem.len()]
        }
    }
}

/// Parses a letter list such as `{a,b} {} {c}`.
pub fn parse_letters(text: &str) -> Result<Vec<Letter>> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('{')
            .and_then(|r| r.split_once('}'))
            .ok_or_else(|| Error::Usage(format!("expected a letter like {{a,b}} at '{rest}'")))?;
        let letter = body
            .0
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(String::from)
            .collect();
        out.push(letter);
        rest = body.1.trim_start();
    }
    Ok(out)
}

impl FromStr for LassoWord {
    type Err = Error;

    /// `stem | loop`, each a letter list; the stem may be empty.
    fn from_str(s: &str) -> Result<Self> {
        let (stem, lp) = s
            .split_once('|')
            .ok_or_else(|| Error::Usage("lasso word needs 'stem | loop'".into()))?;
        LassoWord::new(parse_letters(stem)?, parse_letters(lp)?)
    }
}

fn show_letters(f: &mut fmt::Formatter<'_>, ls: &[Letter]) -> fmt::Result {
    for (i, l) in ls.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        let items: Vec<&str> = l.iter().map(String::as_str).collect();
        write!(f, "{{{}}}", items.join(","))?;
    }
    Ok(())
}

impl fmt::Display for LassoWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        show_letters(f, &self.stem)?;
        f.write_str(" | ")?;
        show_letters(f, &self.lp)
    }
}

/// Largest constant bound `eval_lasso` accepts.
pub const MAX_LASSO_CONSTANT: u64 = 1_000_000;

/// Exact truth of `psi` on the lasso word, by fixpoint evaluation over its
/// positions (a position determines its suffix).
pub fn eval_lasso(w: &LassoWord, psi: &Formula) -> Result<bool> {
    if !psi.vars().is_empty() {
        return Err(Error::Valuation(format!("formula still has parameters: {psi}")));
    }
    if psi.max_constant() > MAX_LASSO_CONSTANT {
        return Err(Error::Resource {
            what: "constant bound in lasso evaluation".into(),
            limit: MAX_LASSO_CONSTANT as usize,
        });
    }
    Ok(truth(w, psi)[0])
}

fn truth(w: &LassoWord, psi: &Formula) -> Vec<bool> {
    use Formula as F;
    let n = w.positions();
    let shift = |v: &[bool]| -> Vec<bool> { (0..n).map(|i| v[w.succ(i)]).collect() };
    let fix = |init: bool, step: &dyn Fn(&[bool], usize) -> bool| -> Vec<bool> {
        let mut cur = vec![init; n];
        loop {
            let next: Vec<bool> = (0..n).map(|i| step(&cur, i)).collect();
            if next == cur {
                return cur;
            }
            cur = next;
        }
    };
    match psi {
        F::True => vec![true; n],
        F::False => vec![false; n],
        F::Atom(a) => (0..n).map(|i| w.letter(i).contains(a)).collect(),
        F::NegAtom(a) => (0..n).map(|i| !w.letter(i).contains(a)).collect(),
        F::Not(x) => truth(w, x).into_iter().map(|b| !b).collect(),
        F::And(x, y) => zip(truth(w, x), truth(w, y), |a, b| a && b),
        F::Or(x, y) => zip(truth(w, x), truth(w, y), |a, b| a || b),
        F::Next(x) => shift(&truth(w, x)),
        F::BoundedEventually(Bound::Const(c), x) | F::BoundedAlways(c, x) => {
            let any = matches!(psi, F::BoundedEventually(..));
            let body = truth(w, x);
            // c steps suffice to cover every position reachable in c steps
            let reach = (*c).min(n as u64) as usize;
            let mut acc = body.clone();
            let mut cur = body.clone();
            for _ in 0..reach {
                cur = shift(&cur);
                acc = zip(acc, cur.clone(), |a, b| if any { a || b } else { a && b });
            }
            acc
        }
        F::BoundedEventually(Bound::Var(_), _) => unreachable!("checked by caller"),
        F::Eventually(x) => {
            let b = truth(w, x);
            fix(false, &|cur, i| b[i] || cur[w.succ(i)])
        }
        F::Always(x) => {
            let b = truth(w, x);
            fix(true, &|cur, i| b[i] && cur[w.succ(i)])
        }
        F::Until(x, y) => {
            let (a, b) = (truth(w, x), truth(w, y));
            fix(false, &|cur, i| b[i] || (a[i] && cur[w.succ(i)]))
        }
        F::Release(x, y) => {
            let (a, b) = (truth(w, x), truth(w, y));
            fix(true, &|cur, i| b[i] && (a[i] || cur[w.succ(i)]))
        }
    }
}

fn zip(a: Vec<bool>, b: Vec<bool>, f: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| f(x, y)).collect()
}

/// Exhaustive scan of `{0..n}^d` with the general checker as point oracle.
pub fn brute_force_min_set(mc: &MarkovChain, phi: &Formula, n: u64) -> Result<MinimalSet> {
    const MAX_POINTS: u128 = 1 << 22;
    let checker = Checker::new(phi)?;
    let h = Hypercube::new(checker.vars().iter().cloned(), n);
    if h.volume() > MAX_POINTS {
        return Err(Error::Resource {
            what: "hypercube points for brute force".into(),
            limit: MAX_POINTS as usize,
        });
    }
    scan(&h, |v| checker.check_pos(mc, v))
}
