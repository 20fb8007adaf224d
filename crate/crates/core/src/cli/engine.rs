//! Dispatch of `check`, `minset`, `member` and `prob` to the engines.

use crate::buchi::{
    emptiness_as1_genbuchi, emptiness_pos_genbuchi, min_val_as1_buchi, min_val_pos_buchi,
};
use crate::diamond::Checker;
use crate::error::{Error, Result};
use crate::formula::{
    buchi_shape, classify, generalized_buchi_shape, reach_shape, strip_params, substitute,
    Formula, FragmentClass,
};
use crate::fx::{build_dba, find_witness_fx, fx_size, min_set_fx, shortest_accepting_path};
use crate::markov::{bounded_reach_prob, MarkovChain};
use crate::oracle::{eval_prefix, Letter, Verdict3};
use crate::reach::{min_val_as1, min_val_geq, min_val_pos, Threshold};
use crate::valuation::{antichain_bound, bisection_min_set, Hypercube, MinimalSet, Valuation};

use super::Report;

pub struct Problem {
    pub mc: MarkovChain,
    pub phi: Formula,
    pub fragment: FragmentClass,
    pub cap: usize,
}

impl Problem {
    pub fn new(mc: MarkovChain, phi: Formula, cap: usize) -> Result<Self> {
        let fragment = classify(&phi);
        if fragment == FragmentClass::FullPLTL {
            return Err(Error::Fragment(format!(
                "formula is outside the supported fragment: {phi}"
            )));
        }
        Ok(Problem {
            mc,
            phi,
            fragment,
            cap,
        })
    }

    fn checker(&self) -> Result<Checker> {
        Ok(Checker::new(&self.phi)?.with_cap(self.cap))
    }

    fn vars(&self) -> Vec<String> {
        self.phi.vars().into_iter().collect()
    }

    pub fn validate(&self, t: &Threshold) -> Result<()> {
        if matches!(t, Threshold::Geq(_)) && self.fragment != FragmentClass::Reach {
            return Err(Error::Usage(format!(
                "threshold {t} is not supported for fragment {}: quantitative thresholds \
                 >=p are available only for F[<=x] a; every fragment supports >0 and =1",
                self.fragment
            )));
        }
        Ok(())
    }
}

/// Least value for single-variable fragments, `None` when no value works.
fn single_min(p: &Problem, t: &Threshold) -> Result<Option<(String, Option<u64>)>> {
    if let Some((x, a)) = reach_shape(&p.phi) {
        let n = match t {
            Threshold::Pos => min_val_pos(&p.mc, a),
            Threshold::As1 => min_val_as1(&p.mc, a),
            Threshold::Geq(q) => min_val_geq(&p.mc, a, q)?,
        };
        return Ok(Some((x.to_string(), n)));
    }
    if let Some((x, a)) = buchi_shape(&p.phi) {
        let n = match t {
            Threshold::Pos => min_val_pos_buchi(&p.mc, a),
            _ => min_val_as1_buchi(&p.mc, a),
        };
        return Ok(Some((x.to_string(), n)));
    }
    Ok(None)
}

/// Per-variable least values for a conjunction of recurrences with
/// probability one (the conjunction holds almost surely iff each part does).
fn genbuchi_as1_point(p: &Problem, parts: &[(&str, &str)]) -> Option<Valuation> {
    let mut v = Valuation::new();
    for (x, a) in parts {
        let n = min_val_as1_buchi(&p.mc, a)?;
        let cur = v.get(x).unwrap_or(0);
        v.set(x, cur.max(n));
    }
    Some(v)
}

fn box_bound(p: &Problem) -> Result<u64> {
    let m = p.mc.len() as u64;
    match p.fragment {
        FragmentClass::GeneralizedBuchi => Ok(2 * m),
        FragmentClass::FX | FragmentClass::Reach => Ok(m * fx_size(&p.phi)? as u64),
        _ => p.checker()?.v_bar(p.mc.len()),
    }
}

fn certify_path(p: &Problem, path: &[usize], v: &Valuation) -> Result<Verdict3> {
    let letters: Vec<Letter> = path.iter().map(|&s| p.mc.label(s).clone()).collect();
    Ok(eval_prefix(&letters, &substitute(&p.phi, v)?))
}

pub fn check(p: &Problem, t: &Threshold, witness: bool, r: &mut Report) -> Result<()> {
    p.validate(t)?;
    let m = p.mc.len() as u64;
    let mut path: Option<Vec<usize>> = None;
    let found: Option<Valuation> = if let Some((x, n)) = single_min(p, t)? {
        if let Some(n) = n {
            r.push("min-value", n);
            if p.fragment == FragmentClass::Reach && *t == Threshold::Pos {
                let dba = build_dba(&strip_params(&p.phi))?;
                path = shortest_accepting_path(&p.mc, &dba);
            }
        }
        n.map(|n| Valuation::from_pairs([(x, n)]))
    } else {
        match (p.fragment, t) {
            (FragmentClass::GeneralizedBuchi, Threshold::Pos) => {
                let parts = generalized_buchi_shape(&p.phi).expect("classified");
                let atoms: Vec<&str> = parts.iter().map(|(_, a)| *a).collect();
                (!emptiness_pos_genbuchi(&p.mc, &atoms))
                    .then(|| Valuation::uniform(&p.vars(), 2 * m))
            }
            (FragmentClass::GeneralizedBuchi, _) => {
                let parts = generalized_buchi_shape(&p.phi).expect("classified");
                let atoms: Vec<&str> = parts.iter().map(|(_, a)| *a).collect();
                if emptiness_as1_genbuchi(&p.mc, &atoms) {
                    None
                } else {
                    genbuchi_as1_point(p, &parts)
                }
            }
            (FragmentClass::FX, Threshold::Pos) => find_witness_fx(&p.mc, &p.phi)?.map(|w| {
                r.push("witness-disjunct", w.disjunct);
                path = Some(w.path);
                w.valuation
            }),
            _ => {
                let checker = p.checker()?;
                let bound = box_bound(p)?;
                let v = Valuation::uniform(checker.vars(), bound);
                let product = checker.product(&p.mc, &v)?;
                r.push("automaton-states", checker.automaton().len());
                r.push("product-nodes", product.len());
                let ok = match t {
                    Threshold::Pos => product.complete_accepting_scc(&p.mc, checker.cap())?.is_some(),
                    _ => product.almost_sure(&p.mc, checker.cap())?,
                };
                ok.then_some(v)
            }
        }
    };
    r.push("verdict", if found.is_some() { "nonempty" } else { "empty" });
    if witness {
        if let Some(v) = &found {
            r.push("witness-valuation", v);
            if let Some(path) = &path {
                let shown: Vec<String> = path.iter().map(|s| s.to_string()).collect();
                r.push("witness-path", shown.join(" "));
                r.push("witness-certified", certify_path(p, path, v)?);
            }
        }
    }
    Ok(())
}

fn report_set(p: &Problem, set: &MinimalSet, n: Option<u64>, r: &mut Report) {
    r.push("minimal-set-size", set.len());
    let d = set.vars().len();
    if let (Some(n), true) = (n, d >= 2) {
        r.push("antichain-bound", antichain_bound(n, d));
    }
    for v in set.valuations() {
        r.push("min", if p.vars().is_empty() { "(no parameters)".to_string() } else { v.to_string() });
    }
}

pub fn minset(p: &Problem, t: &Threshold, r: &mut Report) -> Result<()> {
    p.validate(t)?;
    let vars = p.vars();
    if let Some((x, n)) = single_min(p, t)? {
        let mut set = MinimalSet::new(vec![x.clone()]);
        if let Some(n) = n {
            set.insert_minimal(&Valuation::from_pairs([(x, n)]))?;
        }
        report_set(p, &set, None, r);
        return Ok(());
    }
    if vars.is_empty() {
        let mut set = MinimalSet::new(Vec::new());
        let v = Valuation::new();
        let checker = p.checker()?;
        let ok = match t {
            Threshold::Pos => checker.check_pos(&p.mc, &v)?,
            _ => checker.check_as1(&p.mc, &v)?,
        };
        if ok {
            set.insert_minimal(&v)?;
        }
        report_set(p, &set, None, r);
        return Ok(());
    }
    let n = box_bound(p)?;
    r.push("search-bound", n);
    let (set, calls) = match (p.fragment, t) {
        (FragmentClass::GeneralizedBuchi, Threshold::As1) => {
            let parts = generalized_buchi_shape(&p.phi).expect("classified");
            let mut set = MinimalSet::new(vars.clone());
            if let Some(v) = genbuchi_as1_point(p, &parts) {
                set.insert_minimal(&v)?;
            }
            (set, 0)
        }
        (FragmentClass::FX, Threshold::Pos) => min_set_fx(&p.mc, &p.phi)?,
        (_, Threshold::Pos) => p.checker()?.min_set_within(&p.mc, n)?,
        _ => {
            let checker = p.checker()?;
            let h = Hypercube::new(vars.iter().cloned(), n);
            bisection_min_set(&h, |v| checker.check_as1(&p.mc, v))?
        }
    };
    r.push("oracle-calls", calls);
    report_set(p, &set, Some(n), r);
    Ok(())
}

pub fn member(p: &Problem, t: &Threshold, v: &Valuation, r: &mut Report) -> Result<()> {
    p.validate(t)?;
    let value = |x: &str| {
        v.get(x)
            .ok_or_else(|| Error::Valuation(format!("no value for variable {x}")))
    };
    let answer = if let (Some((x, a)), Threshold::Geq(q)) = (reach_shape(&p.phi), t) {
        let n = value(x)?;
        let mu = bounded_reach_prob(&p.mc, &p.mc.states_with(a), n as usize);
        r.push("probability", &mu);
        mu >= *q
    } else if let Some((x, n)) = single_min(p, t)? {
        let have = value(&x)?;
        n.is_some_and(|n| n <= have)
    } else {
        let checker = p.checker()?;
        match t {
            Threshold::Pos => checker.check_pos(&p.mc, v)?,
            _ => checker.check_as1(&p.mc, v)?,
        }
    };
    r.push("member", answer);
    Ok(())
}

pub fn prob(p: &Problem, v: &Valuation, r: &mut Report) -> Result<()> {
    let Some((x, a)) = reach_shape(&p.phi) else {
        return Err(Error::Usage(format!(
            "exact probabilities are available only for F[<=x] a, not for fragment {}",
            p.fragment
        )));
    };
    let n = v
        .get(x)
        .ok_or_else(|| Error::Valuation(format!("no value for variable {x}")))?;
    let mu = bounded_reach_prob(&p.mc, &p.mc.states_with(a), n as usize);
    r.push("probability", &mu);
    Ok(())
}
