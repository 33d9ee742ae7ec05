use proptest::prelude::*;

use strategic_maxima::lab::{search_violations, Deviations};
use strategic_maxima::mechanism::{run_mechanism, AgentId, Instance, MechanismKind, PaymentPolicy};
use strategic_maxima::pareto::wmax_set;
use strategic_maxima::{Vector, VectorSet};

fn bids(max_n: usize, max_k: usize, hi: i64) -> impl Strategy<Value = (usize, Vec<Vector>)> {
    (1..=max_k).prop_flat_map(move |k| {
        (
            Just(k),
            prop::collection::vec(prop::collection::vec(1..=hi, k), 2..=max_n)
                .prop_map(|rows| rows.iter().map(|r| Vector::from_ints(r)).collect()),
        )
    })
}

fn distinct_columns(rows: &[Vector]) -> bool {
    let k = rows[0].dim();
    (0..k).all(|j| {
        let mut col: Vec<_> = rows.iter().map(|r| r.get(j)).collect();
        col.sort();
        col.windows(2).all(|w| w[0] != w[1])
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn outcome_follows_agents_under_reordering((k, rows) in bids(9, 3, 6), rot in 0usize..9) {
        let inst = Instance::new(k, rows.clone(), None).unwrap();
        let Ok(base) = run_mechanism(&inst, MechanismKind::Pareto, PaymentPolicy::LexMin) else {
            return Ok(());
        };
        let n = rows.len();
        let mut shifted = rows.clone();
        shifted.rotate_left(rot % n);
        let other = run_mechanism(&Instance::new(k, shifted, None).unwrap(), MechanismKind::Pareto, PaymentPolicy::LexMin).unwrap();
        for (pos, a) in other.agents.iter().enumerate() {
            let orig = &base.agents[(pos + rot % n) % n];
            prop_assert_eq!(&a.bid, &orig.bid);
            prop_assert_eq!(a.winner, orig.winner);
            prop_assert_eq!(&a.payment, &orig.payment);
            prop_assert_eq!(&a.pay_candidates, &orig.pay_candidates);
        }
    }

    #[test]
    fn runs_are_deterministic((k, rows) in bids(10, 4, 5)) {
        let inst = Instance::new(k, rows, None).unwrap();
        for kind in [MechanismKind::Pareto, MechanismKind::WeaklyPareto] {
            let a = run_mechanism(&inst, kind, PaymentPolicy::LexMax);
            let b = run_mechanism(&inst, kind, PaymentPolicy::LexMax);
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn weakly_pareto_payments_are_affordable((k, rows) in bids(10, 3, 6)) {
        let inst = Instance::new(k, rows, None).unwrap();
        if let Ok(out) = run_mechanism(&inst, MechanismKind::WeaklyPareto, PaymentPolicy::LexMin) {
            let winners: Vec<Vector> = out.winning_bids();
            for a in out.winners() {
                prop_assert!(a.bid.weakly_dominates(&a.payment));
                prop_assert!(a.payment.is_nonnegative());
            }
            let market: Vec<Vector> = out.agents.iter().filter(|a| !a.removed_as_duplicate).map(|a| a.bid.clone()).collect();
            let mut want = wmax_set(&VectorSet::new(k, market).unwrap()).into_members();
            want.sort();
            let mut got = winners;
            got.sort();
            prop_assert_eq!(got, want);
        }
    }

    #[test]
    fn strict_maxima_win_under_both_mechanisms((k, rows) in bids(10, 3, 6)) {
        let inst = Instance::new(k, rows, None).unwrap();
        if let (Ok(m), Ok(mp)) = (
            run_mechanism(&inst, MechanismKind::Pareto, PaymentPolicy::LexMin),
            run_mechanism(&inst, MechanismKind::WeaklyPareto, PaymentPolicy::LexMin),
        ) {
            for (a, b) in m.agents.iter().zip(&mp.agents) {
                prop_assert!(!a.winner || b.winner);
            }
        }
    }

    #[test]
    fn no_profitable_lie_on_distinct_values((k, rows) in bids(4, 2, 40)) {
        prop_assume!(distinct_columns(&rows));
        let inst = Instance::new(k, rows.clone(), Some(rows)).unwrap();
        let s = search_violations(&inst, MechanismKind::Pareto, PaymentPolicy::LexMin, &Deviations::Grid { budget: 400 }).unwrap();
        prop_assert!(s.violations.is_empty(), "{:?}", s.violations.first());
    }
}

#[test]
fn agent_ids_are_one_based_and_ordered() {
    let rows = vec![Vector::from_ints(&[2, 1]), Vector::from_ints(&[1, 2])];
    let out = run_mechanism(
        &Instance::new(2, rows, None).unwrap(),
        MechanismKind::Pareto,
        PaymentPolicy::LexMin,
    )
    .unwrap();
    let ids: Vec<AgentId> = out.agents.iter().map(|a| a.id).collect();
    assert_eq!(ids, [AgentId(1), AgentId(2)]);
}
