//! Formulas built from literals, conjunction, disjunction, next and
//! (bounded) eventually.
//!
//! Emptiness of the positive-probability set reduces to reachability: split
//! the formula into disjunction-free parts, drop the parameters, and search
//! the product of the chain with a deterministic automaton whose single
//! final state means "every extension satisfies".

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::diamond::Checker;
use crate::error::{Error, Result};
use crate::formula::{is_fx, rewrite_constant_bounds, strip_params, to_nnf, Formula};
use crate::markov::MarkovChain;
use crate::valuation::{MinimalSet, Valuation};

/// Disjunction-free formulas whose disjunction is equivalent to `phi`.
pub fn dnf_split(phi: &Formula) -> Result<Vec<Formula>> {
    let phi = rewrite_constant_bounds(&to_nnf(phi)?);
    if !is_fx(&phi) {
        return Err(Error::Fragment(format!("not a next/eventually formula: {phi}")));
    }
    Ok(split(&phi))
}

fn split(phi: &Formula) -> Vec<Formula> {
    use Formula::*;
    match phi {
        Or(a, b) => {
            let mut out = split(a);
            out.extend(split(b));
            out
        }
        And(a, b) => {
            let right = split(b);
            split(a)
                .into_iter()
                .flat_map(|l| right.iter().map(move |r| Formula::and(l.clone(), r.clone())))
                .collect()
        }
        Next(a) => split(a).into_iter().map(Formula::next).collect(),
        Eventually(a) => split(a)
            .into_iter()
            .map(|x| Eventually(Box::new(x)))
            .collect(),
        BoundedEventually(bound, a) => split(a)
            .into_iter()
            .map(|x| BoundedEventually(bound.clone(), Box::new(x)))
            .collect(),
        _ => vec![phi.clone()],
    }
}

type Clause = BTreeSet<Formula>;
type Dnf = BTreeSet<Clause>;

fn top() -> Dnf {
    Dnf::from([Clause::new()])
}

/// Conjuncts of `phi`; `None` when one of them is `false`.
fn conjuncts(phi: &Formula) -> Option<Clause> {
    fn go(phi: &Formula, out: &mut Clause) -> bool {
        match phi {
            Formula::True => true,
            Formula::False => false,
            Formula::And(a, b) => go(a, out) && go(b, out),
            _ => {
                out.insert(phi.clone());
                true
            }
        }
    }
    let mut out = Clause::new();
    go(phi, &mut out).then_some(out)
}

fn minimize(d: Dnf) -> Dnf {
    if d.contains(&Clause::new()) {
        return top();
    }
    let all: Vec<Clause> = d.into_iter().collect();
    all.iter()
        .enumerate()
        .filter(|(i, c)| {
            !all.iter()
                .enumerate()
                .any(|(j, o)| j != *i && o.is_subset(c) && (o.len() < c.len() || j < *i))
        })
        .map(|(_, c)| c.clone())
        .collect()
}

fn conj(a: &Dnf, b: &Dnf) -> Dnf {
    let mut out = Dnf::new();
    for x in a {
        for y in b {
            out.insert(x.union(y).cloned().collect());
        }
    }
    minimize(out)
}

struct Letter<'a> {
    mask: u64,
    bit: &'a BTreeMap<String, usize>,
}

impl Letter<'_> {
    fn has(&self, a: &str) -> bool {
        self.bit.get(a).is_some_and(|&i| self.mask >> i & 1 == 1)
    }
}

fn progress_clause(clause: &Clause, l: &Letter) -> Dnf {
    let mut acc = top();
    for o in clause {
        acc = conj(&acc, &progress(o, l));
        if acc.is_empty() {
            break;
        }
    }
    acc
}

fn progress(o: &Formula, l: &Letter) -> Dnf {
    use Formula::*;
    match o {
        True => top(),
        False => Dnf::new(),
        Atom(a) if l.has(a) => top(),
        NegAtom(a) if !l.has(a) => top(),
        Atom(_) | NegAtom(_) => Dnf::new(),
        Next(x) => conjuncts(x).into_iter().collect(),
        Eventually(x) => {
            let mut out = match conjuncts(x) {
                Some(c) => progress_clause(&c, l),
                None => Dnf::new(),
            };
            out.insert(Clause::from([o.clone()]));
            minimize(out)
        }
        And(..) => match conjuncts(o) {
            Some(c) => progress_clause(&c, l),
            None => Dnf::new(),
        },
        other => unreachable!("not disjunction-free next/eventually: {other}"),
    }
}

/// Deterministic automaton over letters (bit masks over `atoms`). States
/// are residual obligations in disjunctive normal form; a missing
/// transition rejects, and the final state (no obligation left) is
/// absorbing.
#[derive(Clone, Debug)]
pub struct Dba {
    pub atoms: Vec<String>,
    pub states: Vec<Vec<Vec<Formula>>>,
    pub delta: Vec<Vec<Option<usize>>>,
    pub init: usize,
    pub final_state: Option<usize>,
}

pub const MAX_DBA_STATES: usize = 100_000;

/// Builds the automaton of a disjunction-free, parameter-free formula.
pub fn build_dba(phi: &Formula) -> Result<Dba> {
    if !is_fx(phi) || !phi.vars().is_empty() || contains_or(phi) {
        return Err(Error::Fragment(format!(
            "expected a disjunction-free parameter-free next/eventually formula: {phi}"
        )));
    }
    let phi = rewrite_constant_bounds(phi);
    if contains_or(&phi) {
        return Err(Error::Fragment(format!("constant bounds introduce disjunction: {phi}")));
    }
    let atoms: Vec<String> = phi.atoms().into_iter().collect();
    if atoms.len() > 20 {
        return Err(Error::Resource {
            what: "atoms in automaton alphabet".into(),
            limit: 20,
        });
    }
    let bit: BTreeMap<String, usize> = atoms.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
    let start: Dnf = conjuncts(&phi).into_iter().collect();
    let mut index: HashMap<Dnf, usize> = HashMap::new();
    let mut states: Vec<Dnf> = Vec::new();
    let mut delta: Vec<Vec<Option<usize>>> = Vec::new();
    index.insert(start.clone(), 0);
    states.push(start);
    let mut next = 0;
    while next < states.len() {
        let here = states[next].clone();
        let mut row = Vec::with_capacity(1 << atoms.len());
        for mask in 0..(1u64 << atoms.len()) {
            let l = Letter { mask, bit: &bit };
            let mut succ = Dnf::new();
            for c in &here {
                succ.extend(progress_clause(c, &l));
            }
            let succ = minimize(succ);
            if succ.is_empty() {
                row.push(None);
                continue;
            }
            let id = match index.get(&succ) {
                Some(&id) => id,
                None => {
                    if states.len() >= MAX_DBA_STATES {
                        return Err(Error::Resource {
                            what: "automaton states".into(),
                            limit: MAX_DBA_STATES,
                        });
                    }
                    index.insert(succ.clone(), states.len());
                    states.push(succ);
                    states.len() - 1
                }
            };
            row.push(Some(id));
        }
        delta.push(row);
        next += 1;
    }
    let final_state = index.get(&top()).copied();
    Ok(Dba {
        atoms,
        states: states
            .into_iter()
            .map(|d| d.into_iter().map(|c| c.into_iter().collect()).collect())
            .collect(),
        delta,
        init: 0,
        final_state,
    })
}

fn contains_or(phi: &Formula) -> bool {
    let mut found = false;
    phi.visit(&mut |f| found |= matches!(f, Formula::Or(..)));
    found
}

impl Dba {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn mask_of<'a>(&self, props: impl IntoIterator<Item = &'a String>) -> u64 {
        let mut m = 0;
        for p in props {
            if let Some(i) = self.atoms.iter().position(|a| a == p) {
                m |= 1 << i;
            }
        }
        m
    }

    pub fn step(&self, q: usize, mask: u64) -> Option<usize> {
        self.delta[q][mask as usize]
    }

    /// Whether reading `letters` from the initial state reaches the final
    /// state.
    pub fn accepts_prefix(&self, letters: &[u64]) -> bool {
        let mut q = self.init;
        if Some(q) == self.final_state {
            return true;
        }
        for &m in letters {
            match self.step(q, m) {
                Some(n) => q = n,
                None => return false,
            }
            if Some(q) == self.final_state {
                return true;
            }
        }
        false
    }

    /// True when no cycle other than a self-loop exists, i.e. reachability
    /// is a partial order on states.
    pub fn is_partial_order(&self) -> bool {
        let adj: Vec<Vec<usize>> = self
            .delta
            .iter()
            .enumerate()
            .map(|(q, row)| {
                let set: BTreeSet<usize> = row.iter().flatten().copied().filter(|&n| n != q).collect();
                set.into_iter().collect()
            })
            .collect();
        !crate::graph::has_cycle(&adj, &vec![true; self.len()])
    }

    /// Length of the longest simple path from the initial to the final
    /// state, by exhaustive search; `None` without a final state or when
    /// the search exceeds `budget` steps.
    pub fn diameter(&self, budget: usize) -> Option<usize> {
        let fin = self.final_state?;
        let adj: Vec<BTreeSet<usize>> = self
            .delta
            .iter()
            .map(|row| row.iter().flatten().copied().collect())
            .collect();
        let mut on_path = vec![false; self.len()];
        let mut best: Option<usize> = None;
        let mut steps = 0usize;
        fn dfs(
            q: usize,
            depth: usize,
            fin: usize,
            adj: &[BTreeSet<usize>],
            on_path: &mut [bool],
            best: &mut Option<usize>,
            steps: &mut usize,
            budget: usize,
        ) -> bool {
            *steps += 1;
            if *steps > budget {
                return false;
            }
            if q == fin {
                *best = Some(best.map_or(depth, |b: usize| b.max(depth)));
                return true;
            }
            on_path[q] = true;
            for &n in &adj[q] {
                if !on_path[n] && !dfs(n, depth + 1, fin, adj, on_path, best, steps, budget) {
                    return false;
                }
            }
            on_path[q] = false;
            true
        }
        let done = dfs(self.init, 0, fin, &adj, &mut on_path, &mut best, &mut steps, budget);
        if done {
            best
        } else {
            None
        }
    }
}

/// A finite path of the chain every extension of which satisfies one
/// disjunct at the uniform valuation `valuation`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FxWitness {
    pub disjunct: usize,
    pub path: Vec<usize>,
    pub valuation: Valuation,
}

/// Size of `phi` with constant bounds unfolded.
pub fn fx_size(phi: &Formula) -> Result<usize> {
    Ok(rewrite_constant_bounds(&to_nnf(phi)?).size())
}

/// Shortest path of `mc` driving the automaton of `phi_bar` from its
/// initial state to the final one, reading `L(s0)` first.
pub fn shortest_accepting_path(mc: &MarkovChain, dba: &Dba) -> Option<Vec<usize>> {
    let fin = dba.final_state?;
    let masks: Vec<u64> = (0..mc.len()).map(|s| dba.mask_of(mc.label(s))).collect();
    let s0 = mc.init();
    let q0 = dba.step(dba.init, masks[s0])?;
    let mut parent: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    let mut queue = VecDeque::from([(s0, q0)]);
    parent.insert((s0, q0), (s0, q0));
    while let Some((s, q)) = queue.pop_front() {
        if q == fin {
            let mut path = vec![s];
            let mut cur = (s, q);
            while parent[&cur] != cur {
                cur = parent[&cur];
                path.push(cur.0);
            }
            path.reverse();
            return Some(path);
        }
        for (t, _) in mc.succ(s) {
            if let Some(r) = dba.step(q, masks[*t]) {
                if !parent.contains_key(&(*t, r)) {
                    parent.insert((*t, r), (s, q));
                    queue.push_back((*t, r));
                }
            }
        }
    }
    None
}

/// Witness for nonemptiness of the positive-probability set; `None` when
/// it is empty. The first disjunct in split order with a witness wins.
pub fn find_witness_fx(mc: &MarkovChain, phi: &Formula) -> Result<Option<FxWitness>> {
    let parts = dnf_split(phi)?;
    let bound = (mc.len() * fx_size(phi)?) as u64;
    let vars: Vec<String> = phi.vars().into_iter().collect();
    for (i, part) in parts.iter().enumerate() {
        let dba = build_dba(&strip_params(part))?;
        if let Some(path) = shortest_accepting_path(mc, &dba) {
            return Ok(Some(FxWitness {
                disjunct: i,
                path,
                valuation: Valuation::uniform(&vars, bound),
            }));
        }
    }
    Ok(None)
}

/// True when no valuation gives positive probability.
pub fn emptiness_pos_fx(mc: &MarkovChain, phi: &Formula) -> Result<bool> {
    Ok(find_witness_fx(mc, phi)?.is_none())
}

/// True when no valuation gives probability one; decided at the uniform
/// value `m * |phi|`.
pub fn emptiness_as1_fx(mc: &MarkovChain, phi: &Formula) -> Result<bool> {
    dnf_split(phi)?;
    let checker = Checker::new(phi)?;
    let v = Valuation::uniform(checker.vars(), (mc.len() * fx_size(phi)?) as u64);
    Ok(!checker.check_as1(mc, &v)?)
}

/// Minimal valuations with positive probability, searched in
/// `{0..m*|phi|}^d` with the general checker as membership oracle.
pub fn min_set_fx(mc: &MarkovChain, phi: &Formula) -> Result<(MinimalSet, usize)> {
    dnf_split(phi)?;
    let checker = Checker::new(phi)?;
    checker.min_set_within(mc, (mc.len() * fx_size(phi)?) as u64)
}
