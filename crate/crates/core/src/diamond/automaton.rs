//! Tableau automaton over consistent subsets of the closure.
//!
//! A state is an exact truth assignment to the closure: atoms are read from
//! the letter, boolean connectives are computed, and temporal subformulas
//! are guessed subject to their local expansion laws. Successor constraints
//! propagate obligations; Büchi sets reject runs that postpone an eventuality
//! forever. Parametric eventualities are only constrained in the forward
//! direction here and are pinned exactly by the counters of the instantiated
//! automaton.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::formula::{closure, rewrite_constant_bounds, Bound, Formula};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    True,
    False,
    Atom(usize),
    NegAtom(usize),
    And(usize, usize),
    Or(usize, usize),
    Next(usize),
    Until(usize, usize),
    Release(usize, usize),
    Always(usize),
    Eventually(usize),
    /// Parametric eventuality with its variable and body.
    Param(String, usize),
}

/// Closure elements in an order where children precede parents.
#[derive(Clone, Debug)]
pub struct Closure {
    pub formulas: Vec<Formula>,
    pub nodes: Vec<Node>,
    pub root: usize,
    /// Atomic propositions; bit `i` of a letter mask is `atoms[i]`.
    pub atoms: Vec<String>,
}

impl Closure {
    /// Builds the closure of a negation normal form formula after unfolding
    /// constant bounds.
    pub fn new(phi: &Formula) -> Result<Self> {
        if !phi.is_nnf() {
            return Err(Error::Fragment(format!("formula is not in negation normal form: {phi}")));
        }
        let phi = rewrite_constant_bounds(phi);
        let mut formulas: Vec<Formula> = closure(&phi).into_iter().collect();
        formulas.sort_by_key(|f| f.size());
        let index: BTreeMap<&Formula, usize> =
            formulas.iter().enumerate().map(|(i, f)| (f, i)).collect();
        let atoms: Vec<String> = phi.atoms().into_iter().collect();
        let atom = |a: &String| atoms.iter().position(|b| b == a).expect("atom listed");
        let nodes = formulas
            .iter()
            .map(|f| {
                use Formula as F;
                Ok(match f {
                    F::True => Node::True,
                    F::False => Node::False,
                    F::Atom(a) => Node::Atom(atom(a)),
                    F::NegAtom(a) => Node::NegAtom(atom(a)),
                    F::And(x, y) => Node::And(index[&**x], index[&**y]),
                    F::Or(x, y) => Node::Or(index[&**x], index[&**y]),
                    F::Next(x) => Node::Next(index[&**x]),
                    F::Until(x, y) => Node::Until(index[&**x], index[&**y]),
                    F::Release(x, y) => Node::Release(index[&**x], index[&**y]),
                    F::Always(x) => Node::Always(index[&**x]),
                    F::Eventually(x) => Node::Eventually(index[&**x]),
                    F::BoundedEventually(Bound::Var(v), x) => Node::Param(v.clone(), index[&**x]),
                    other => {
                        return Err(Error::Fragment(format!("unsupported subformula {other}")))
                    }
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let root = index[&phi];
        Ok(Closure {
            formulas,
            nodes,
            root,
            atoms,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Letter mask of a proposition set.
    pub fn mask_of<'a>(&self, props: impl IntoIterator<Item = &'a String>) -> u64 {
        let mut m = 0;
        for p in props {
            if let Some(i) = self.atoms.iter().position(|a| a == p) {
                m |= 1 << i;
            }
        }
        m
    }
}

/// A parametric eventuality of the closure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamSlot {
    pub elem: usize,
    pub body: usize,
    pub var: String,
}

#[derive(Clone, Debug)]
pub struct GAutomaton {
    pub closure: Closure,
    /// Truth assignment of each state over the closure.
    pub states: Vec<Vec<bool>>,
    pub letter: Vec<u64>,
    pub initial: Vec<usize>,
    pub succ: Vec<Vec<usize>>,
    /// Büchi sets, one per until, release, always and eventually element.
    pub buchi: Vec<Vec<bool>>,
    pub params: Vec<ParamSlot>,
}

const MAX_ATOMS: usize = 24;

impl GAutomaton {
    pub fn build(phi: &Formula) -> Result<Self> {
        let closure = Closure::new(phi)?;
        if closure.atoms.len() > MAX_ATOMS {
            return Err(Error::Resource {
                what: "atomic propositions in formula".into(),
                limit: MAX_ATOMS,
            });
        }
        let states = enumerate_states(&closure);
        let letter = states
            .iter()
            .map(|h| {
                closure
                    .nodes
                    .iter()
                    .enumerate()
                    .filter_map(|(e, n)| match n {
                        Node::Atom(i) if h[e] => Some(1u64 << i),
                        _ => None,
                    })
                    .sum::<u64>()
                    | negative_only_atoms(&closure, h)
            })
            .collect();
        let initial = (0..states.len()).filter(|&i| states[i][closure.root]).collect();
        let succ = states
            .iter()
            .map(|h| {
                (0..states.len())
                    .filter(|&j| step_allowed(&closure, h, &states[j]))
                    .collect()
            })
            .collect();
        let mut buchi = Vec::new();
        let mut params = Vec::new();
        for (e, n) in closure.nodes.iter().enumerate() {
            let set: Option<Vec<bool>> = match *n {
                Node::Until(_, b) => Some(states.iter().map(|h| !h[e] || h[b]).collect()),
                Node::Release(_, b) => Some(states.iter().map(|h| !h[b] || h[e]).collect()),
                Node::Eventually(c) => Some(states.iter().map(|h| !h[e] || h[c]).collect()),
                Node::Always(c) => Some(states.iter().map(|h| !h[c] || h[e]).collect()),
                Node::Param(ref var, body) => {
                    params.push(ParamSlot {
                        elem: e,
                        body,
                        var: var.clone(),
                    });
                    None
                }
                _ => None,
            };
            buchi.extend(set);
        }
        Ok(GAutomaton {
            closure,
            states,
            letter,
            initial,
            succ,
            buchi,
            params,
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Number of Büchi sets after degeneralization (at least one).
    pub fn index_count(&self) -> usize {
        self.buchi.len().max(1)
    }

    /// Membership of state `h` in Büchi set `i`; with no sets every state
    /// is accepting.
    pub fn in_buchi(&self, i: usize, h: usize) -> bool {
        self.buchi.get(i).map_or(true, |set| set[h])
    }

    /// Degeneralized successor index.
    pub fn next_index(&self, i: usize, h: usize) -> usize {
        if self.in_buchi(i, h) {
            (i + 1) % self.index_count()
        } else {
            i
        }
    }

    fn state_name(&self, h: usize) -> String {
        let members: Vec<String> = self.states[h]
            .iter()
            .enumerate()
            .filter(|&(e, &b)| b && !matches!(self.closure.nodes[e], Node::True))
            .map(|(e, _)| self.closure.formulas[e].to_string())
            .collect();
        format!("{{{}}}", members.join(", "))
    }

    fn letter_name(&self, mask: u64) -> String {
        let names: Vec<&str> = (0..self.closure.atoms.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| self.closure.atoms[i].as_str())
            .collect();
        format!("{{{}}}", names.join(","))
    }

    /// Plain-text adjacency listing of the generalized automaton and its
    /// degeneralization: header lines, then `src letter dst` per edge.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        let k = self.index_count();
        let _ = writeln!(out, "# automaton G");
        let _ = writeln!(out, "states {}", self.len());
        for h in 0..self.len() {
            let _ = writeln!(out, "state {h} {}", self.state_name(h));
        }
        let _ = writeln!(out, "initial {}", join(&self.initial));
        for (i, set) in self.buchi.iter().enumerate() {
            let members: Vec<usize> = (0..self.len()).filter(|&h| set[h]).collect();
            let _ = writeln!(out, "buchi {i} {}", join(&members));
        }
        for p in &self.params {
            let members: Vec<usize> = (0..self.len())
                .filter(|&h| !self.states[h][p.elem] || self.states[h][p.body])
                .collect();
            let _ = writeln!(out, "param {} {}", p.var, join(&members));
        }
        for h in 0..self.len() {
            for &g in &self.succ[h] {
                let _ = writeln!(out, "{h} {} {g}", self.letter_name(self.letter[g]));
            }
        }
        let _ = writeln!(out, "# automaton U");
        let _ = writeln!(out, "states {}", self.len() * k);
        let init: Vec<usize> = self.initial.iter().map(|&h| h * k).collect();
        let _ = writeln!(out, "initial {}", join(&init));
        let acc: Vec<usize> = (0..self.len())
            .filter(|&h| self.in_buchi(0, h))
            .map(|h| h * k)
            .collect();
        let _ = writeln!(out, "accepting {}", join(&acc));
        for h in 0..self.len() {
            for i in 0..k {
                let j = self.next_index(i, h);
                for &g in &self.succ[h] {
                    let _ = writeln!(
                        out,
                        "{} {} {}",
                        h * k + i,
                        self.letter_name(self.letter[g]),
                        g * k + j
                    );
                }
            }
        }
        out
    }
}

fn join(xs: &[usize]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    parts.join(" ")
}

/// Bits of atoms that occur only negated and are false in `h`.
fn negative_only_atoms(c: &Closure, h: &[bool]) -> u64 {
    let mut m = 0;
    for (e, n) in c.nodes.iter().enumerate() {
        if let Node::NegAtom(i) = *n {
            if !h[e] {
                m |= 1 << i;
            }
        }
    }
    m
}

fn enumerate_states(c: &Closure) -> Vec<Vec<bool>> {
    let mut out = Vec::new();
    for mask in 0..(1u64 << c.atoms.len()) {
        let mut h = vec![false; c.len()];
        fill(c, mask, 0, &mut h, &mut out);
    }
    out
}

/// Assigns elements from `e` on; branches on temporal elements whose value
/// the local laws leave open.
fn fill(c: &Closure, mask: u64, e: usize, h: &mut Vec<bool>, out: &mut Vec<Vec<bool>>) {
    if e == c.len() {
        out.push(h.clone());
        return;
    }
    let forced = match c.nodes[e] {
        Node::True => Some(true),
        Node::False => Some(false),
        Node::Atom(i) => Some(mask >> i & 1 == 1),
        Node::NegAtom(i) => Some(mask >> i & 1 == 0),
        Node::And(a, b) => Some(h[a] && h[b]),
        Node::Or(a, b) => Some(h[a] || h[b]),
        Node::Next(_) => None,
        Node::Until(a, b) => {
            if h[b] {
                Some(true)
            } else if !h[a] {
                Some(false)
            } else {
                None
            }
        }
        Node::Release(a, b) => {
            if !h[b] {
                Some(false)
            } else if h[a] {
                Some(true)
            } else {
                None
            }
        }
        Node::Always(x) => (!h[x]).then_some(false),
        Node::Eventually(x) | Node::Param(_, x) => h[x].then_some(true),
    };
    match forced {
        Some(v) => {
            h[e] = v;
            fill(c, mask, e + 1, h, out);
        }
        None => {
            for v in [false, true] {
                h[e] = v;
                fill(c, mask, e + 1, h, out);
            }
        }
    }
}

fn step_allowed(c: &Closure, h: &[bool], g: &[bool]) -> bool {
    c.nodes.iter().enumerate().all(|(e, n)| match *n {
        Node::Next(x) => h[e] == g[x],
        Node::Until(a, b) if h[a] && !h[b] => h[e] == g[e],
        Node::Release(a, b) if h[b] && !h[a] => h[e] == g[e],
        Node::Always(x) if h[x] => h[e] == g[e],
        Node::Eventually(x) if !h[x] => h[e] == g[e],
        Node::Param(_, x) if !h[x] && h[e] => g[e],
        _ => true,
    })
}
