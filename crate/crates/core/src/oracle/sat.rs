//! CNF input and the chain/formula pair whose positive-probability set is
//! nonempty exactly when the CNF is satisfiable.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::markov::{MarkovChain, Rational};

/// Clauses over variables `1..=vars`; literal `-i` is the negation of `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cnf {
    pub vars: usize,
    pub clauses: Vec<Vec<i64>>,
}

impl Cnf {
    pub fn new(vars: usize, clauses: Vec<Vec<i64>>) -> Result<Self> {
        for c in &clauses {
            if c.len() > 3 {
                return Err(Error::Usage(format!("clause {c:?} has more than 3 literals")));
            }
            if let Some(l) = c.iter().find(|l| **l == 0 || l.unsigned_abs() as usize > vars) {
                return Err(Error::Usage(format!("literal {l} outside 1..={vars}")));
            }
        }
        Ok(Cnf { vars, clauses })
    }

    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter()
                .any(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0))
        })
    }
}

/// Reads `p cnf n k` followed by 0-terminated clauses; `c` lines are
/// comments.
pub fn parse_dimacs(text: &str) -> Result<Cnf> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        let err = |m: String| Error::Usage(format!("line {}: {m}", no + 1));
        if let Some(rest) = line.strip_prefix('p') {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            match parts.as_slice() {
                ["cnf", n, k] => {
                    let n = n.parse().map_err(|_| err(format!("bad variable count '{n}'")))?;
                    let k = k.parse().map_err(|_| err(format!("bad clause count '{k}'")))?;
                    header = Some((n, k));
                }
                _ => return Err(err("expected 'p cnf <vars> <clauses>'".into())),
            }
            continue;
        }
        if header.is_none() {
            return Err(err("clause before header".into()));
        }
        for tok in line.split_whitespace() {
            let l: i64 = tok.parse().map_err(|_| err(format!("bad literal '{tok}'")))?;
            if l == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                current.push(l);
            }
        }
    }
    let (n, k) = header.ok_or_else(|| Error::Usage("missing 'p cnf' header".into()))?;
    if !current.is_empty() {
        return Err(Error::Usage("last clause is not 0-terminated".into()));
    }
    if clauses.len() != k {
        return Err(Error::Usage(format!(
            "header announces {k} clauses, found {}",
            clauses.len()
        )));
    }
    Cnf::new(n, clauses)
}

/// Satisfiability by enumerating all assignments.
pub fn brute_force_sat(cnf: &Cnf) -> bool {
    (0..1u64 << cnf.vars).any(|bits| {
        let a: Vec<bool> = (0..cnf.vars).map(|i| bits >> i & 1 == 1).collect();
        cnf.satisfied_by(&a)
    })
}

/// States `s0..sn`, `t1..tn`, `!t1..!tn` (indices `0..=n`, `n+i`, `2n+i`).
/// From `s(i-1)` the chain moves to `ti` or `!ti` with probability 1/2 each
/// and then to `si`; `sn` is absorbing. Clause `j` labels the literal states
/// that satisfy it with `cj`, and the formula is the conjunction of
/// `F[<=yj] cj`.
pub fn gen_3sat_fixture(cnf: &Cnf) -> Result<(MarkovChain, Formula)> {
    let n = cnf.vars;
    let m = 3 * n + 1;
    let half = Rational::new(1.into(), 2.into());
    let one = Rational::from_integer(1.into());
    let mut trans = Vec::new();
    for i in 1..=n {
        trans.push((i - 1, n + i, half.clone()));
        trans.push((i - 1, 2 * n + i, half.clone()));
        trans.push((n + i, i, one.clone()));
        trans.push((2 * n + i, i, one.clone()));
    }
    trans.push((n, n, one));
    let mut labels = vec![BTreeSet::new(); m];
    for (j, clause) in cnf.clauses.iter().enumerate() {
        for &l in clause {
            let i = l.unsigned_abs() as usize;
            let state = if l > 0 { n + i } else { 2 * n + i };
            labels[state].insert(format!("c{}", j + 1));
        }
    }
    let mc = MarkovChain::new(m, 0, trans, labels)?;
    let phi = Formula::conjunction((1..=cnf.clauses.len()).map(|j| {
        Formula::eventually_within(&format!("y{j}"), Formula::atom(&format!("c{j}")))
    }));
    Ok((mc, phi))
}
