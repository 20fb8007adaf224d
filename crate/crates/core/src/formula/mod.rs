//! Parametric LTL formulas: AST, normalization, classification.
//!
//! The only parametric operator kept after normalization is the bounded
//! eventuality `F[<=x] phi`; constant bounds may decorate `F` and `G`.

mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::valuation::Valuation;

pub use parse::parse_formula;

/// Bound of a bounded eventuality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bound {
    Var(String),
    Const(u64),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(String),
    NegAtom(String),
    /// General negation; only present before [`to_nnf`].
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Release(Box<Formula>, Box<Formula>),
    Always(Box<Formula>),
    Eventually(Box<Formula>),
    BoundedEventually(Bound, Box<Formula>),
    BoundedAlways(u64, Box<Formula>),
}

/// Most specific fragment a normalized formula belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FragmentClass {
    /// `F[<=x] a`
    Reach,
    /// `G F[<=x] a`
    Buchi,
    /// Conjunction of `G F[<=xi] ai` with distinct variables.
    GeneralizedBuchi,
    /// Next / eventually fragment.
    FX,
    /// Negation normal form with parameters only on bounded eventualities.
    Diamond,
    FullPLTL,
}

impl fmt::Display for FragmentClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FragmentClass::Reach => "reach",
            FragmentClass::Buchi => "buchi",
            FragmentClass::GeneralizedBuchi => "generalized-buchi",
            FragmentClass::FX => "fx",
            FragmentClass::Diamond => "diamond",
            FragmentClass::FullPLTL => "full-pltl",
        };
        f.write_str(s)
    }
}

fn bx(f: Formula) -> Box<Formula> {
    Box::new(f)
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(name.to_string())
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(bx(a), bx(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(bx(a), bx(b))
    }

    pub fn next(a: Formula) -> Formula {
        Formula::Next(bx(a))
    }

    pub fn eventually_within(var: &str, a: Formula) -> Formula {
        Formula::BoundedEventually(Bound::Var(var.to_string()), bx(a))
    }

    /// Left-nested conjunction; `True` for an empty list.
    pub fn conjunction(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    pub fn disjunction(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::False)
    }

    pub fn children(&self) -> Vec<&Formula> {
        use Formula::*;
        match self {
            True | False | Atom(_) | NegAtom(_) => vec![],
            Not(a) | Next(a) | Always(a) | Eventually(a) => vec![a],
            BoundedEventually(_, a) | BoundedAlways(_, a) => vec![a],
            And(a, b) | Or(a, b) | Until(a, b) | Release(a, b) => vec![a, b],
        }
    }

    /// Node count of the syntax tree.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Parameter variables, sorted.
    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::BoundedEventually(Bound::Var(x), _) = f {
                out.insert(x.clone());
            }
        });
        out
    }

    /// Atomic propositions, sorted.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Atom(a) | Formula::NegAtom(a) = f {
                out.insert(a.clone());
            }
        });
        out
    }

    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    /// Largest constant bound occurring in the formula.
    pub fn max_constant(&self) -> u64 {
        let mut m = 0;
        self.visit(&mut |f| match f {
            Formula::BoundedEventually(Bound::Const(c), _) | Formula::BoundedAlways(c, _) => {
                m = m.max(*c)
            }
            _ => {}
        });
        m
    }

    fn map_children(&self, mut g: impl FnMut(&Formula) -> Result<Formula>) -> Result<Formula> {
        use Formula::*;
        Ok(match self {
            True | False | Atom(_) | NegAtom(_) => self.clone(),
            Not(a) => Not(bx(g(a)?)),
            Next(a) => Next(bx(g(a)?)),
            Always(a) => Always(bx(g(a)?)),
            Eventually(a) => Eventually(bx(g(a)?)),
            BoundedEventually(b, a) => BoundedEventually(b.clone(), bx(g(a)?)),
            BoundedAlways(c, a) => BoundedAlways(*c, bx(g(a)?)),
            And(a, b) => And(bx(g(a)?), bx(g(b)?)),
            Or(a, b) => Or(bx(g(a)?), bx(g(b)?)),
            Until(a, b) => Until(bx(g(a)?), bx(g(b)?)),
            Release(a, b) => Release(bx(g(a)?), bx(g(b)?)),
        })
    }

    pub fn is_nnf(&self) -> bool {
        let mut ok = true;
        self.visit(&mut |f| {
            if matches!(f, Formula::Not(_)) {
                ok = false;
            }
        });
        ok
    }
}

/// Pushes negation down to atoms.
///
/// Fails when a negation reaches a parametric bounded eventuality, whose dual
/// (a parametric bounded always) is outside the supported fragment.
pub fn to_nnf(phi: &Formula) -> Result<Formula> {
    nnf(phi, false)
}

fn nnf(phi: &Formula, neg: bool) -> Result<Formula> {
    use Formula::*;
    let rec = |f: &Formula, n: bool| nnf(f, n).map(bx);
    Ok(match (phi, neg) {
        (True, false) | (False, true) => True,
        (False, false) | (True, true) => False,
        (Atom(a), false) => Atom(a.clone()),
        (Atom(a), true) => NegAtom(a.clone()),
        (NegAtom(a), false) => NegAtom(a.clone()),
        (NegAtom(a), true) => Atom(a.clone()),
        (Not(a), n) => return nnf(a, !n),
        (And(a, b), false) => And(rec(a, false)?, rec(b, false)?),
        (And(a, b), true) => Or(rec(a, true)?, rec(b, true)?),
        (Or(a, b), false) => Or(rec(a, false)?, rec(b, false)?),
        (Or(a, b), true) => And(rec(a, true)?, rec(b, true)?),
        (Next(a), n) => Next(rec(a, n)?),
        (Until(a, b), false) => Until(rec(a, false)?, rec(b, false)?),
        (Until(a, b), true) => Release(rec(a, true)?, rec(b, true)?),
        (Release(a, b), false) => Release(rec(a, false)?, rec(b, false)?),
        (Release(a, b), true) => Until(rec(a, true)?, rec(b, true)?),
        (Always(a), false) => Always(rec(a, false)?),
        (Always(a), true) => Eventually(rec(a, true)?),
        (Eventually(a), false) => Eventually(rec(a, false)?),
        (Eventually(a), true) => Always(rec(a, true)?),
        (BoundedEventually(b, a), false) => BoundedEventually(b.clone(), rec(a, false)?),
        (BoundedEventually(Bound::Const(c), a), true) => BoundedAlways(*c, rec(a, true)?),
        (BoundedEventually(Bound::Var(_), _), true) => {
            return Err(Error::Fragment(format!(
                "negated parametric bound is not expressible: !({phi})"
            )))
        }
        (BoundedAlways(c, a), false) => BoundedAlways(*c, rec(a, false)?),
        (BoundedAlways(c, a), true) => BoundedEventually(Bound::Const(*c), rec(a, true)?),
    })
}

/// Unfolds `F[<=c]` and `G[<=c]` into nested next operators.
pub fn rewrite_constant_bounds(phi: &Formula) -> Formula {
    use Formula::*;
    match phi {
        BoundedEventually(Bound::Const(c), a) => unfold(&rewrite_constant_bounds(a), *c, true),
        BoundedAlways(c, a) => unfold(&rewrite_constant_bounds(a), *c, false),
        _ => phi
            .map_children(|c| Ok(rewrite_constant_bounds(c)))
            .expect("infallible"),
    }
}

fn unfold(body: &Formula, c: u64, eventually: bool) -> Formula {
    let mut acc = body.clone();
    for _ in 0..c {
        let tail = Formula::next(acc);
        acc = if eventually {
            Formula::or(body.clone(), tail)
        } else {
            Formula::and(body.clone(), tail)
        };
    }
    acc
}

pub fn classify(phi: &Formula) -> FragmentClass {
    if !phi.is_nnf() {
        return FragmentClass::FullPLTL;
    }
    if reach_shape(phi).is_some() {
        return FragmentClass::Reach;
    }
    if buchi_shape(phi).is_some() {
        return FragmentClass::Buchi;
    }
    if generalized_buchi_shape(phi).is_some() {
        return FragmentClass::GeneralizedBuchi;
    }
    if is_fx(phi) {
        return FragmentClass::FX;
    }
    FragmentClass::Diamond
}

/// `(var, prop)` for `F[<=var] prop`.
pub fn reach_shape(phi: &Formula) -> Option<(&str, &str)> {
    match phi {
        Formula::BoundedEventually(Bound::Var(x), a) => match a.as_ref() {
            Formula::Atom(a) => Some((x, a)),
            _ => None,
        },
        _ => None,
    }
}

/// `(var, prop)` for `G F[<=var] prop`.
pub fn buchi_shape(phi: &Formula) -> Option<(&str, &str)> {
    match phi {
        Formula::Always(inner) => reach_shape(inner),
        _ => None,
    }
}

/// Conjuncts `(var, prop)` of a generalized Büchi formula, in syntactic order.
pub fn generalized_buchi_shape(phi: &Formula) -> Option<Vec<(&str, &str)>> {
    let mut conjuncts = Vec::new();
    flatten_and(phi, &mut conjuncts);
    if conjuncts.len() < 2 {
        return None;
    }
    let parts: Option<Vec<_>> = conjuncts.iter().map(|c| buchi_shape(c)).collect();
    let parts = parts?;
    let distinct: BTreeSet<_> = parts.iter().map(|(x, _)| *x).collect();
    (distinct.len() == parts.len()).then_some(parts)
}

pub fn flatten_and<'a>(phi: &'a Formula, out: &mut Vec<&'a Formula>) {
    match phi {
        Formula::And(a, b) => {
            flatten_and(a, out);
            flatten_and(b, out);
        }
        _ => out.push(phi),
    }
}

pub fn is_fx(phi: &Formula) -> bool {
    use Formula::*;
    match phi {
        True | False | Atom(_) | NegAtom(_) => true,
        And(a, b) | Or(a, b) => is_fx(a) && is_fx(b),
        Next(a) | Eventually(a) | BoundedEventually(_, a) => is_fx(a),
        _ => false,
    }
}

/// Replaces every variable bound by its value.
pub fn substitute(phi: &Formula, v: &Valuation) -> Result<Formula> {
    match phi {
        Formula::BoundedEventually(Bound::Var(x), a) => {
            let c = v
                .get(x)
                .ok_or_else(|| Error::Valuation(format!("no value for variable {x}")))?;
            Ok(Formula::BoundedEventually(
                Bound::Const(c),
                bx(substitute(a, v)?),
            ))
        }
        _ => phi.map_children(|c| substitute(c, v)),
    }
}

/// All subformulas, including `phi` itself.
pub fn closure(phi: &Formula) -> BTreeSet<Formula> {
    let mut out = BTreeSet::new();
    phi.visit(&mut |f| {
        out.insert(f.clone());
    });
    out
}

/// Replaces every parametric bounded eventuality by an unbounded one.
pub fn strip_params(phi: &Formula) -> Formula {
    match phi {
        Formula::BoundedEventually(Bound::Var(_), a) => Formula::Eventually(bx(strip_params(a))),
        _ => phi
            .map_children(|c| Ok(strip_params(c)))
            .expect("infallible"),
    }
}

/// Renames repeated variables so each occurs once. Returns the renamed
/// formula and a map from new names back to the original ones.
pub fn rename_apart(phi: &Formula) -> (Formula, BTreeMap<String, String>) {
    fn go(
        phi: &Formula,
        seen: &mut BTreeMap<String, usize>,
        origin: &mut BTreeMap<String, String>,
    ) -> Formula {
        match phi {
            Formula::BoundedEventually(Bound::Var(x), a) => {
                let count = seen.entry(x.clone()).or_insert(0);
                *count += 1;
                let name = if *count == 1 {
                    x.clone()
                } else {
                    format!("{x}#{count}")
                };
                origin.insert(name.clone(), x.clone());
                let body = go(a, seen, origin);
                Formula::BoundedEventually(Bound::Var(name), bx(body))
            }
            _ => phi
                .map_children(|c| Ok(go(c, seen, origin)))
                .expect("infallible"),
        }
    }
    let mut seen = BTreeMap::new();
    let mut origin = BTreeMap::new();
    let out = go(phi, &mut seen, &mut origin);
    (out, origin)
}

/// Parse, push negations inward and check the result is in the supported
/// fragment. Constant bounds are kept.
pub fn normalize(text: &str) -> Result<Formula> {
    to_nnf(&parse_formula(text)?)
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Var(x) => write!(f, "{x}"),
            Bound::Const(c) => write!(f, "{c}"),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Formula::*;
        match self {
            True => write!(f, "true"),
            False => write!(f, "false"),
            Atom(a) => write!(f, "{a}"),
            NegAtom(a) => write!(f, "!{a}"),
            Not(a) => write!(f, "!({a})"),
            And(a, b) => write!(f, "({a} & {b})"),
            Or(a, b) => write!(f, "({a} | {b})"),
            Next(a) => write!(f, "X {a}"),
            Until(a, b) => write!(f, "({a} U {b})"),
            Release(a, b) => write!(f, "({a} R {b})"),
            Always(a) => write!(f, "G {a}"),
            Eventually(a) => write!(f, "F {a}"),
            BoundedEventually(b, a) => write!(f, "F[<={b}] {a}"),
            BoundedAlways(c, a) => write!(f, "G[<={c}] {a}"),
        }
    }
}
