mod common;

use bimonotone::generate::{make_fixture, perturb, FixtureSpec, PerturbDirection};
use bimonotone::{
    bimonotone_check, constant_on_domain_check, inverse_graph, monotone_check, paramonotone_check, skew_form_check,
    GraphPoint, OperatorGraph, ToleranceConfig,
};
use proptest::prelude::*;

fn arb_spec() -> impl Strategy<Value = FixtureSpec> {
    (1usize..7)
        .prop_flat_map(|n| {
            (
                Just(n),
                0..=n,
                1usize..8,
                1usize..4,
                any::<bool>(),
                any::<u64>(),
                any::<bool>(),
            )
        })
        .prop_map(|(n, k, m, branches, orth, seed, zero)| {
            let mut s = FixtureSpec::new(n, k, m, seed);
            s.branches = branches;
            s.noise_orthogonal = if orth { 1.0 } else { 0.0 };
            s.zero_operator = zero;
            s
        })
}

/// Bimonotone fixtures, possibly with one dual perturbed inside the span.
fn arb_graph() -> impl Strategy<Value = OperatorGraph> {
    (arb_spec(), prop_oneof![Just(0.0), Just(1e-3), Just(0.5)], any::<u64>()).prop_map(|(spec, amp, seed)| {
        let fx = make_fixture(&spec).unwrap();
        if fx.truth.basis0.rank() == 0 {
            return fx.graph;
        }
        let index = (seed % fx.graph.len() as u64) as usize;
        perturb(&fx.graph, index, PerturbDirection::InSpan, amp, &fx.truth.basis0, seed).unwrap()
    })
}

fn shuffled(g: &OperatorGraph, seed: u64) -> OperatorGraph {
    let mut pts: Vec<GraphPoint> = g.points().to_vec();
    // deterministic Fisher-Yates with an LCG
    let mut s = seed | 1;
    for i in (1..pts.len()).rev() {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        pts.swap(i, (s >> 33) as usize % (i + 1));
    }
    OperatorGraph::new(g.dimension(), pts).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn bimonotone_implies_monotone(g in arb_graph()) {
        let tol = ToleranceConfig::default();
        if bimonotone_check(&g, &tol).verdict {
            prop_assert!(monotone_check(&g, &tol).verdict);
        }
    }

    #[test]
    fn bimonotone_invariant_under_inverse(g in arb_graph()) {
        let tol = ToleranceConfig::default();
        let a = bimonotone_check(&g, &tol);
        let b = bimonotone_check(&inverse_graph(&g), &tol);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn skew_form_agrees_on_translated_graphs(g in arb_graph(), pick in any::<usize>()) {
        let tol = ToleranceConfig::default();
        let b = g.points()[pick % g.len()].clone();
        let t = g.translate(&b.x, &b.xstar).unwrap();
        let skew = skew_form_check(&t, &tol).unwrap();
        prop_assert_eq!(bimonotone_check(&t, &tol).verdict, skew.verdict);
    }

    #[test]
    fn constant_implies_bimonotone_and_paramonotone(g in arb_graph()) {
        let tol = ToleranceConfig::default();
        if constant_on_domain_check(&g, &tol).verdict {
            prop_assert!(bimonotone_check(&g, &tol).verdict);
            prop_assert!(paramonotone_check(&g, &tol).is_paramonotone());
        }
    }

    #[test]
    fn reports_are_permutation_invariant(g in arb_graph(), seed in any::<u64>()) {
        let tol = ToleranceConfig::default();
        let h = shuffled(&g, seed);
        let pairs = [
            (monotone_check(&g, &tol), monotone_check(&h, &tol)),
            (bimonotone_check(&g, &tol), bimonotone_check(&h, &tol)),
            (constant_on_domain_check(&g, &tol), constant_on_domain_check(&h, &tol)),
        ];
        for (a, b) in pairs {
            prop_assert_eq!(a.verdict, b.verdict);
            prop_assert_eq!(a.worst_violation, b.worst_violation);
        }
        let (pa, pb) = (paramonotone_check(&g, &tol), paramonotone_check(&h, &tol));
        prop_assert_eq!(pa.is_paramonotone(), pb.is_paramonotone());
        if let (Some(a), Some(b)) = (pa.report(), pb.report()) {
            prop_assert_eq!(a.worst_violation, b.worst_violation);
        }
    }

    #[test]
    fn false_verdicts_carry_witnesses(g in arb_graph()) {
        let tol = ToleranceConfig::default();
        for r in [monotone_check(&g, &tol), bimonotone_check(&g, &tol), constant_on_domain_check(&g, &tol)] {
            prop_assert_eq!(r.verdict, r.worst_violation <= 1.0);
            if !r.verdict {
                prop_assert!(r.witness.is_some());
            }
        }
    }
}

#[test]
fn full_span_bimonotone_paramonotone_is_constant() {
    let tol = ToleranceConfig::default();
    for seed in 0..40u64 {
        let n = 1 + (seed as usize % 5);
        let mut spec = FixtureSpec::new(n, n, n + 2, seed);
        spec.zero_operator = seed % 2 == 0;
        let g = make_fixture(&spec).unwrap().graph;
        if bimonotone_check(&g, &tol).verdict && paramonotone_check(&g, &tol).is_paramonotone() {
            assert!(constant_on_domain_check(&g, &tol).verdict, "seed {seed}");
        }
    }
}

#[test]
fn in_span_noise_breaks_bimonotonicity() {
    let tol = ToleranceConfig::default();
    let mut spec = FixtureSpec::new(4, 3, 8, 11);
    spec.noise_in_span = 1e-3;
    let g = make_fixture(&spec).unwrap().graph;
    let r = bimonotone_check(&g, &tol);
    assert!(!r.verdict);
    // violation of order 1e-3 in raw units, i.e. far beyond the ~1e-8 threshold
    let raw = common::max_abs_pairing(&g);
    assert!(raw > 1e-4 && raw < 1e-1, "{raw}");
}
