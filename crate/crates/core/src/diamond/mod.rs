//! Qualitative checking of NNF formulas whose parameters bound eventualities.
//!
//! The formula is compiled once into a tableau automaton ([`GAutomaton`]);
//! each query instantiates the parametric counters for one valuation, builds
//! the product with the chain and inspects its SCCs.

pub mod automaton;
pub mod product;

use std::collections::BTreeSet;

pub use automaton::GAutomaton;
pub use product::Product;

use crate::error::{Error, Result};
use crate::formula::{to_nnf, Formula};
use crate::markov::{MarkovChain, Rational};
use crate::valuation::{bisection_min_set, Hypercube, MinimalSet, Valuation};

pub const DEFAULT_MAX_NODES: usize = 10_000_000;

#[derive(Clone, Debug)]
pub struct Checker {
    aut: GAutomaton,
    vars: Vec<String>,
    cap: usize,
}

impl Checker {
    pub fn new(phi: &Formula) -> Result<Self> {
        let phi = to_nnf(phi)?;
        let aut = GAutomaton::build(&phi)?;
        let vars = phi.vars().into_iter().collect();
        Ok(Checker {
            aut,
            vars,
            cap: DEFAULT_MAX_NODES,
        })
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn automaton(&self) -> &GAutomaton {
        &self.aut
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Size of the formula the automaton was built from (constant bounds
    /// unfolded).
    pub fn formula_size(&self) -> usize {
        self.aut.closure.formulas[self.aut.closure.root].size()
    }

    fn bounds(&self, v: &Valuation) -> Result<Vec<u64>> {
        self.aut
            .params
            .iter()
            .map(|p| {
                v.get(&p.var)
                    .ok_or_else(|| Error::Valuation(format!("no value for variable {}", p.var)))
            })
            .collect()
    }

    pub fn product(&self, mc: &MarkovChain, v: &Valuation) -> Result<Product> {
        Product::build(&self.aut, mc, &self.bounds(v)?, self.cap)
    }

    /// `Pr(M |= v(phi)) > 0`.
    pub fn check_pos(&self, mc: &MarkovChain, v: &Valuation) -> Result<bool> {
        let p = self.product(mc, v)?;
        Ok(p.complete_accepting_scc(mc, self.cap)?.is_some())
    }

    /// `Pr(M |= v(phi)) = 1`.
    pub fn check_as1(&self, mc: &MarkovChain, v: &Valuation) -> Result<bool> {
        self.product(mc, v)?.almost_sure(mc, self.cap)
    }

    /// Whether the instantiated automaton has an accepting run on
    /// `stem . loop^omega`.
    pub fn accepts_lasso(
        &self,
        stem: &[BTreeSet<String>],
        lp: &[BTreeSet<String>],
        v: &Valuation,
    ) -> Result<bool> {
        let word = lasso_chain(stem, lp)?;
        let p = self.product(&word, v)?;
        Ok(!p.accepting_sccs().is_empty())
    }

    /// Uniform value beyond which emptiness cannot change:
    /// `m * |phi| * 2^|phi|`.
    pub fn v_bar(&self, m: usize) -> Result<u64> {
        let size = self.formula_size();
        let over = || Error::Resource {
            what: "uniform bound m*|phi|*2^|phi|".into(),
            limit: u64::MAX as usize,
        };
        let pow = 1u64.checked_shl(size as u32).filter(|_| size < 64).ok_or_else(over)?;
        (m as u64)
            .checked_mul(size as u64)
            .and_then(|x| x.checked_mul(pow))
            .ok_or_else(over)
    }

    pub fn emptiness_pos(&self, mc: &MarkovChain) -> Result<bool> {
        let v = Valuation::uniform(&self.vars, self.v_bar(mc.len())?);
        Ok(!self.check_pos(mc, &v)?)
    }

    pub fn emptiness_as1(&self, mc: &MarkovChain) -> Result<bool> {
        let v = Valuation::uniform(&self.vars, self.v_bar(mc.len())?);
        Ok(!self.check_as1(mc, &v)?)
    }

    /// Minimal valuations with positive probability over `{0..n}^d`, with
    /// the number of point queries issued.
    pub fn min_set_within(&self, mc: &MarkovChain, n: u64) -> Result<(MinimalSet, usize)> {
        let h = Hypercube::new(self.vars.iter().cloned(), n);
        bisection_min_set(&h, |v| self.check_pos(mc, v))
    }

    pub fn min_set(&self, mc: &MarkovChain) -> Result<(MinimalSet, usize)> {
        self.min_set_within(mc, self.v_bar(mc.len())?)
    }
}

/// The lasso `stem . loop^omega` as a deterministic chain.
pub fn lasso_chain(stem: &[BTreeSet<String>], lp: &[BTreeSet<String>]) -> Result<MarkovChain> {
    if lp.is_empty() {
        return Err(Error::Usage("lasso loop must be nonempty".into()));
    }
    let n = stem.len() + lp.len();
    let transitions: Vec<_> = (0..n)
        .map(|i| {
            let j = if i + 1 < n { i + 1 } else { stem.len() };
            (i, j, Rational::from_integer(1.into()))
        })
        .collect();
    let labels = stem.iter().chain(lp).cloned().collect();
    MarkovChain::new(n, 0, transitions, labels)
}

pub fn check_pos(mc: &MarkovChain, phi: &Formula, v: &Valuation) -> Result<bool> {
    Checker::new(phi)?.check_pos(mc, v)
}

pub fn check_as1(mc: &MarkovChain, phi: &Formula, v: &Valuation) -> Result<bool> {
    Checker::new(phi)?.check_as1(mc, v)
}

pub fn emptiness_pos_diamond(mc: &MarkovChain, phi: &Formula) -> Result<bool> {
    Checker::new(phi)?.emptiness_pos(mc)
}

pub fn emptiness_as1_diamond(mc: &MarkovChain, phi: &Formula) -> Result<bool> {
    Checker::new(phi)?.emptiness_as1(mc)
}

pub fn min_set_diamond(mc: &MarkovChain, phi: &Formula) -> Result<(MinimalSet, usize)> {
    Checker::new(phi)?.min_set(mc)
}

#[cfg(test)]
mod tests;
