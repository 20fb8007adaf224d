use std::collections::BTreeSet;

use proptest::prelude::*;

use super::*;
use crate::buchi::{min_val_as1_buchi, min_val_pos_buchi};
use crate::formula::normalize;
use crate::markov::parse_chain;
use crate::reach::{min_val_as1, min_val_pos};

fn chain(s: &str) -> MarkovChain {
    parse_chain(s).unwrap()
}

fn example_one() -> MarkovChain {
    chain("states 2\ninit 0\nlabel 1 a\ntrans 0 0 1/2\ntrans 0 1 1/2\ntrans 1 1 1\n")
}

fn line() -> MarkovChain {
    chain("states 3\ninit 0\nlabel 2 a\ntrans 0 1 1\ntrans 1 2 1\ntrans 2 2 1\n")
}

fn checker(s: &str) -> Checker {
    Checker::new(&normalize(s).unwrap()).unwrap()
}

fn x(n: u64) -> Valuation {
    Valuation::from_pairs([("x", n)])
}

fn letters(text: &[&str]) -> Vec<BTreeSet<String>> {
    text.iter()
        .map(|l| l.chars().map(|c| c.to_string()).collect())
        .collect()
}

#[test]
fn example_one_positive() {
    let c = checker("F[<=x] a");
    assert!(c.check_pos(&example_one(), &x(1)).unwrap());
    assert!(!c.check_pos(&example_one(), &x(0)).unwrap());
    let (set, _) = c.min_set(&example_one()).unwrap();
    assert_eq!(set.points(), &[vec![1]]);
}

#[test]
fn example_one_almost_sure() {
    let c = checker("F[<=x] a");
    assert!(!c.check_as1(&example_one(), &x(5)).unwrap());
    assert!(c.emptiness_as1(&example_one()).unwrap());
    assert!(!c.emptiness_pos(&example_one()).unwrap());
    assert!(c.check_as1(&line(), &x(2)).unwrap());
    assert!(!c.check_as1(&line(), &x(1)).unwrap());
    assert!(!c.emptiness_as1(&line()).unwrap());
}

#[test]
fn invariants() {
    let loop_a = chain("states 1\ninit 0\nlabel 0 a\ntrans 0 0 1\n");
    let c = checker("G a");
    assert!(c.check_pos(&loop_a, &Valuation::new()).unwrap());
    assert!(c.check_as1(&loop_a, &Valuation::new()).unwrap());
    assert!(!c.check_pos(&example_one(), &Valuation::new()).unwrap());
    assert!(checker("G !a & F[<=x] a").emptiness_pos(&example_one()).unwrap());
}

#[test]
fn propositional_at_initial_state() {
    let mc = chain("states 2\ninit 0\nlabel 0 a\nlabel 0 b\ntrans 0 1 1\ntrans 1 1 1\n");
    assert!(checker("a & b").check_pos(&mc, &Valuation::new()).unwrap());
    assert!(checker("a & !c").check_as1(&mc, &Valuation::new()).unwrap());
    assert!(!checker("a & c").check_pos(&mc, &Valuation::new()).unwrap());
}

#[test]
fn zero_budget_forces_immediate_hit() {
    let c = checker("F[<=x] a");
    let now = chain("states 1\ninit 0\nlabel 0 a\ntrans 0 0 1\n");
    assert!(c.check_as1(&now, &x(0)).unwrap());
    assert!(!c.check_pos(&line(), &x(0)).unwrap());
}

#[test]
fn accepting_but_incomplete_component() {
    // 0 -> 1 (a) or 2 (no a), both absorbing; X a kills the branch into 2
    let mc = chain(
        "states 3\ninit 0\nlabel 1 a\ntrans 0 1 1/2\ntrans 0 2 1/2\ntrans 1 1 1\ntrans 2 2 1\n",
    );
    let c = checker("X G a");
    assert!(c.check_pos(&mc, &Valuation::new()).unwrap());
    assert!(!c.check_as1(&mc, &Valuation::new()).unwrap());
    // every product component through state 2 is absent; through 1 complete
    let p = c.product(&mc, &Valuation::new()).unwrap();
    assert!(p.nodes.iter().all(|n| n.s != 2));
}

#[test]
fn product_is_reachable_only() {
    let c = checker("F[<=x] a");
    let p = c.product(&example_one(), &x(3)).unwrap();
    let reach = crate::graph::reachable(&p.adj, &p.initial, None);
    assert!(reach.iter().all(|&r| r));
    for n in &p.nodes {
        assert!(n.k.iter().all(|&k| k <= 4));
    }
}

#[test]
fn recurrence_examples() {
    let c = checker("G F[<=x] a");
    let (set, _) = c.min_set(&example_one()).unwrap();
    assert_eq!(set.points(), &[vec![1]]);
    let free = chain("states 2\ninit 0\nlabel 0 a\ntrans 0 1 1\ntrans 1 1 1\n");
    assert!(c.emptiness_pos(&free).unwrap());
    let all_a = chain("states 1\ninit 0\nlabel 0 a\ntrans 0 0 1\n");
    assert!(!c.emptiness_as1(&all_a).unwrap());
}

#[test]
fn fork_matches_brute_force() {
    let mc = chain(
        "states 5\ninit 0\nlabel 2 a\nlabel 4 b\n\
         trans 0 1 1/2\ntrans 0 3 1/2\ntrans 1 2 1\ntrans 2 4 1\ntrans 3 4 1\ntrans 4 2 1\n",
    );
    let c = checker("F[<=x] a & F[<=y] b");
    let (bis, _) = c.min_set_within(&mc, 6).unwrap();
    let h = Hypercube::new(c.vars().iter().cloned(), 6);
    let brute = crate::valuation::brute_force_min_set(&h, |v| c.check_pos(&mc, v)).unwrap();
    assert_eq!(bis, brute);
    assert_eq!(bis.points(), &[vec![2, 3], vec![3, 2]]);
}

#[test]
fn disjunction_of_bounds_is_not_lost() {
    // a arrives late, b early: only the second disjunct holds
    let w = letters(&["", "", "b", "", "", "", "a"]);
    let c = checker("F[<=x] a | F[<=y] b");
    let v = Valuation::from_pairs([("x", 3), ("y", 3)]);
    assert!(c.accepts_lasso(&w, &letters(&[""]), &v).unwrap());
    let v = Valuation::from_pairs([("x", 3), ("y", 1)]);
    assert!(!c.accepts_lasso(&w, &letters(&[""]), &v).unwrap());
}

#[test]
fn lasso_examples() {
    let c = checker("G F[<=x] a");
    assert!(c.accepts_lasso(&[], &letters(&["a"]), &x(0)).unwrap());
    assert!(c.accepts_lasso(&letters(&[""]), &letters(&["a", ""]), &x(1)).unwrap());
    assert!(!c.accepts_lasso(&letters(&[""]), &letters(&["a", ""]), &x(0)).unwrap());
    let u = checker("a U b");
    assert!(u.accepts_lasso(&letters(&["a", "a"]), &letters(&["b"]), &Valuation::new()).unwrap());
    assert!(!u.accepts_lasso(&[], &letters(&["a"]), &Valuation::new()).unwrap());
    let r = checker("a R b");
    assert!(r.accepts_lasso(&[], &letters(&["b"]), &Valuation::new()).unwrap());
    assert!(!r.accepts_lasso(&letters(&["b"]), &letters(&[""]), &Valuation::new()).unwrap());
}

#[test]
fn v_bar_value() {
    assert_eq!(checker("F[<=x] a").v_bar(2).unwrap(), 2 * 2 * 4);
}

#[test]
fn resource_cap_is_reported() {
    let c = checker("F[<=x] a").with_cap(2);
    let err = c.check_pos(&line(), &x(50)).unwrap_err();
    assert!(matches!(err, Error::Resource { .. }));
}

fn arb_chain(max_m: usize) -> impl Strategy<Value = MarkovChain> {
    (1..=max_m).prop_flat_map(|m| {
        (
            proptest::collection::vec(proptest::collection::vec(0..m, 1..=2), m),
            proptest::collection::vec(0u8..4, m),
        )
            .prop_map(move |(succ, labels)| {
                let mut text = format!("states {m}\ninit 0\n");
                for (s, l) in labels.iter().enumerate() {
                    if l & 1 == 1 {
                        text += &format!("label {s} a\n");
                    }
                    if l & 2 == 2 {
                        text += &format!("label {s} b\n");
                    }
                }
                for (s, ts) in succ.iter().enumerate() {
                    let ts: BTreeSet<usize> = ts.iter().copied().collect();
                    for t in &ts {
                        text += &format!("trans {s} {t} 1/{}\n", ts.len());
                    }
                }
                parse_chain(&text).unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn agrees_with_reach_engine(mc in arb_chain(5), n in 0u64..5) {
        let c = checker("F[<=x] a");
        let pos = min_val_pos(&mc, "a").is_some_and(|m| m <= n);
        let as1 = min_val_as1(&mc, "a").is_some_and(|m| m <= n);
        prop_assert_eq!(c.check_pos(&mc, &x(n)).unwrap(), pos);
        prop_assert_eq!(c.check_as1(&mc, &x(n)).unwrap(), as1);
    }

    #[test]
    fn agrees_with_buchi_engine(mc in arb_chain(5), n in 0u64..5) {
        let c = checker("G F[<=x] a");
        let pos = min_val_pos_buchi(&mc, "a").is_some_and(|m| m <= n);
        let as1 = min_val_as1_buchi(&mc, "a").is_some_and(|m| m <= n);
        prop_assert_eq!(c.check_pos(&mc, &x(n)).unwrap(), pos);
        prop_assert_eq!(c.check_as1(&mc, &x(n)).unwrap(), as1);
    }

    #[test]
    fn monotone_in_valuation(mc in arb_chain(4), n in 0u64..4, d in 0u64..3) {
        let c = checker("F[<=x] (a U b) | G F[<=x] b");
        if c.check_pos(&mc, &x(n)).unwrap() {
            prop_assert!(c.check_pos(&mc, &x(n + d)).unwrap());
        }
        if c.check_as1(&mc, &x(n)).unwrap() {
            prop_assert!(c.check_as1(&mc, &x(n + d)).unwrap());
        }
    }
}
