mod common;

use lo_core::behavior::{uniform_box, Behavior};
use lo_core::boxes::{
    fig4_family, lhs_polynomial, pr_box, tensor_power, tensor_product, AffineFamily,
};
use lo_core::cliques::{
    complete_to_maximal, enumerate_maximal_cliques, lift_clique, par_enumerate_maximal_cliques,
    Clique,
};
use lo_core::fixtures;
use lo_core::graph::OrthogonalityGraph;
use lo_core::inequality::{gyni, LoInequality};
use lo_core::lp::{lp_solve, Sense};
use lo_core::nspolytope::{ns_constraint_system, ns_max, satisfies_ns_system};
use lo_core::rational::{rat, Rational};
use lo_core::scenario::Scenario;
use lo_core::symmetry::{all_symmetries, apply_symmetry, apply_symmetry_to_behavior};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sc(n: usize, m: usize, d: usize) -> Scenario {
    Scenario::new(n, m, d).unwrap()
}

/// Marginal of the parties in `keep` (a bitmask), compared across every
/// choice of the other parties' settings.
fn subset_marginals_agree(b: &Behavior, keep: usize) -> bool {
    let s = b.scenario();
    let n = s.parties();
    let mut seen: std::collections::HashMap<(Vec<usize>, Vec<usize>), Rational> =
        Default::default();
    for xs in 0..s.joint_settings_count() {
        let x = s.joint_settings(xs);
        let mut marg: std::collections::HashMap<Vec<usize>, Rational> = Default::default();
        for a_idx in 0..s.joint_outcomes_count() {
            let a = s.joint_outcomes(a_idx);
            let kept: Vec<usize> = (0..n)
                .filter(|i| keep >> i & 1 == 1)
                .map(|i| a[i])
                .collect();
            *marg.entry(kept).or_insert_with(Rational::zero) += b.prob_at(s.index_of(&a, &x));
        }
        let kx: Vec<usize> = (0..n)
            .filter(|i| keep >> i & 1 == 1)
            .map(|i| x[i])
            .collect();
        for (ka, p) in marg {
            match seen.get(&(ka.clone(), kx.clone())) {
                Some(q) if *q != p => return false,
                Some(_) => {}
                None => {
                    seen.insert((ka, kx.clone()), p);
                }
            }
        }
    }
    true
}

fn brute_force_no_signaling(b: &Behavior) -> bool {
    (1..(1usize << b.scenario().parties())).all(|keep| subset_marginals_agree(b, keep))
}

#[test]
fn no_signaling_check_matches_subset_marginals() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for s in [sc(2, 2, 2), sc(3, 2, 2), sc(2, 3, 2), sc(2, 2, 3)] {
        for _ in 0..10 {
            let b = common::random_ns_vertex(s, &mut rng);
            assert!(b.is_no_signaling());
            assert!(brute_force_no_signaling(&b));
            assert!(satisfies_ns_system(&b));
        }
        // random nonnegative normalized tables usually signal
        for _ in 0..10 {
            let mut table = vec![Rational::zero(); s.event_count()];
            for x in 0..s.joint_settings_count() {
                let settings = s.joint_settings(x);
                let w: Vec<i64> = (0..s.joint_outcomes_count())
                    .map(|_| rng.gen_range(0..4))
                    .collect();
                let total: i64 = w.iter().sum::<i64>().max(1);
                for (a, &wa) in w.iter().enumerate() {
                    let idx = s.index_of(&s.joint_outcomes(a), &settings);
                    table[idx] = if w.iter().all(|&v| v == 0) {
                        if a == 0 {
                            Rational::one()
                        } else {
                            Rational::zero()
                        }
                    } else {
                        rat(wa, total)
                    };
                }
            }
            let b = Behavior::new(s, table).unwrap();
            assert_eq!(b.is_no_signaling(), brute_force_no_signaling(&b));
        }
    }
}

#[test]
fn reduction_to_support_preserves_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let s = sc(3, 2, 2);
    let g = OrthogonalityGraph::build(s).unwrap();
    let cliques = enumerate_maximal_cliques(g.bits(), 1, None).cliques;
    for _ in 0..20 {
        let b = common::random_local_mixture(s, &mut rng);
        let support = b.support();
        for c in cliques.iter().take(200) {
            let ineq = LoInequality::from_clique(&g, c).unwrap();
            let kept: Vec<usize> = ineq
                .event_ids()
                .iter()
                .copied()
                .filter(|k| support.contains(k))
                .collect();
            let restricted = LoInequality::from_indices(s, kept).unwrap();
            assert_eq!(ineq.evaluate(&b).unwrap(), restricted.evaluate(&b).unwrap());
        }
    }
}

#[test]
fn bipartite_lo_equals_ns() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for s in [sc(2, 2, 2), sc(2, 3, 2)] {
        let ineqs = common::maximal_clique_inequalities(s);
        for ineq in &ineqs {
            assert_eq!(ns_max(ineq).unwrap(), Rational::one());
        }
        for _ in 0..25 {
            let b = common::random_ns_vertex(s, &mut rng);
            assert!(ineqs.iter().all(|i| !i.is_violated_by(&b).unwrap()));
        }
    }
}

#[test]
fn bipartite_maximal_cliques_have_d_squared_events() {
    for m in 1..=3 {
        for d in 2..=3 {
            let s = sc(2, m, d);
            for ineq in common::maximal_clique_inequalities(s) {
                assert_eq!(ineq.len(), d * d, "{s}");
                let events = ineq.events();
                // one party's setting is fixed, the other's is a function of
                // the first party's outcome
                let fixed_a = events
                    .iter()
                    .all(|e| e.settings[0] == events[0].settings[0]);
                let fixed_b = events
                    .iter()
                    .all(|e| e.settings[1] == events[0].settings[1]);
                let b_of_a = events.iter().all(|e| {
                    events
                        .iter()
                        .all(|f| e.outcomes[0] != f.outcomes[0] || e.settings[1] == f.settings[1])
                });
                let a_of_b = events.iter().all(|e| {
                    events
                        .iter()
                        .all(|f| e.outcomes[1] != f.outcomes[1] || e.settings[0] == f.settings[0])
                });
                assert!(
                    (fixed_a && b_of_a) || (fixed_b && a_of_b),
                    "{s}: {:?}",
                    ineq.to_text()
                );
            }
        }
    }
}

#[test]
fn pr_possible_events_graph() {
    let pr = pr_box();
    let g = OrthogonalityGraph::build(pr.scenario()).unwrap();
    let sub = g.support_subgraph(&pr).unwrap();
    assert_eq!(sub.order(), 8);
    let cliques = enumerate_maximal_cliques(sub.bits(), 1, None).cliques;
    // each possible event has probability 1/2, so any clique beyond 2 would
    // already violate LO in the bipartite case
    assert_eq!(cliques.iter().map(Clique::len).max(), Some(2));
    let naive = common::naive_maximal_cliques(sub.bits());
    assert_eq!(naive.iter().map(Clique::len).max(), Some(2));
    let pr2 = tensor_power(&pr, 2).unwrap();
    let g2 = OrthogonalityGraph::build(pr2.scenario()).unwrap();
    assert_eq!(g2.support_vertices(&pr2).unwrap().len(), 64);
}

#[test]
fn five_event_completion_reaches_ten() {
    let five = fixtures::five_event().unwrap();
    let full = OrthogonalityGraph::build(five.scenario()).unwrap();
    let seed = Clique::new(five.event_ids().to_vec());
    let done = complete_to_maximal(full.bits(), &seed).unwrap();
    assert!(done.is_maximal_in(full.bits()));
    assert!(done.len() >= 10);
    assert!(seed.vertices().iter().all(|v| done.vertices().contains(v)));
    // lifting from the support subgraph gives the same vertices
    let pr2 = tensor_power(&pr_box(), 2).unwrap();
    let sub = full.support_subgraph(&pr2).unwrap();
    let local: Vec<usize> = five
        .event_ids()
        .iter()
        .map(|&e| sub.vertex_of_event(e).unwrap())
        .collect();
    assert_eq!(lift_clique(&sub, &full, &Clique::new(local)).unwrap(), seed);
}

#[test]
fn parallel_enumeration_matches_sequential() {
    let g = OrthogonalityGraph::build(sc(3, 2, 2)).unwrap();
    let mut a = enumerate_maximal_cliques(g.bits(), 1, None).cliques;
    let mut b = par_enumerate_maximal_cliques(g.bits(), 1, None).cliques;
    a.sort();
    b.sort();
    assert_eq!(a, b);
    assert!(a.iter().all(|c| c.is_maximal_in(g.bits())));
}

#[test]
fn noisy_lhs_is_monotone_on_a_grid() {
    let family = AffineFamily::noisy_pr();
    for ineq in [
        fixtures::five_event().unwrap(),
        fixtures::ten_event().unwrap(),
    ] {
        let p = lhs_polynomial(&family, &ineq, 2).unwrap();
        let mut last = p.eval(&Rational::zero());
        for k in 1..=200 {
            let q = rat(k, 200);
            let v = p.eval(&q);
            assert!(v >= last, "LHS decreases at q = {q}");
            // polynomial agrees with evaluating the product box
            if k % 40 == 0 {
                let b = tensor_power(&family.at(&q).unwrap(), 2).unwrap();
                assert_eq!(ineq.evaluate(&b).unwrap(), v);
            }
            last = v;
        }
    }
}

#[test]
fn tensor_products_are_associative_and_no_signaling() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let s1 = sc(1, 2, 2);
    let b1 = common::random_ns_vertex(pr_box().scenario(), &mut rng);
    let b2 = common::random_local_mixture(s1, &mut rng);
    let b3 = fig4_family(&rat(1, 3), &rat(1, 6)).unwrap();
    let left = tensor_product(&[&tensor_product(&[&b1, &b2]).unwrap(), &b3]).unwrap();
    let right = tensor_product(&[&b1, &tensor_product(&[&b2, &b3]).unwrap()]).unwrap();
    let flat = tensor_product(&[&b1, &b2, &b3]).unwrap();
    assert_eq!(left, flat);
    assert_eq!(right, flat);
    assert!(flat.is_no_signaling());
}

#[test]
fn ns_max_is_at_least_the_uniform_value_and_one() {
    let s = sc(3, 2, 2);
    let u = uniform_box(s);
    for ineq in common::maximal_clique_inequalities(s).iter().take(60) {
        let v = ns_max(ineq).unwrap();
        assert!(v >= ineq.evaluate(&u).unwrap());
        assert!(v >= Rational::one());
    }
}

#[test]
fn lp_value_ignores_row_order_and_duplicates() {
    let g = gyni(3).unwrap();
    let base = ns_constraint_system(g.scenario()).with_objective(g.coefficients());
    let mut shuffled = base.clone();
    shuffled.constraints.reverse();
    let dup = shuffled.constraints[3].clone();
    shuffled.constraints.push(dup);
    let a = lp_solve(&base, Sense::Maximize).unwrap();
    let b = lp_solve(&shuffled, Sense::Maximize).unwrap();
    assert_eq!(a.value, b.value);
    assert!(shuffled.is_feasible_point(&b.point));
}

fn op_strategy() -> impl Strategy<Value = usize> {
    0usize..3072
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn evaluation_is_relabeling_invariant(op_index in op_strategy(), seed in any::<u64>(), which in 0usize..64) {
        let s = sc(3, 2, 2);
        let ops = all_symmetries(s);
        let op = &ops[op_index];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = common::random_local_mixture(s, &mut rng);
        let ineqs = common::maximal_clique_inequalities(s);
        let ineq = &ineqs[which % ineqs.len()];
        let image = apply_symmetry(op, ineq).unwrap();
        let relabeled = apply_symmetry_to_behavior(op, &b).unwrap();
        prop_assert_eq!(image.evaluate(&relabeled).unwrap(), ineq.evaluate(&b).unwrap());
        prop_assert_eq!(apply_symmetry(&op.inverse(), &image).unwrap(), ineq.clone());
    }

    #[test]
    fn enumeration_matches_naive(n in 1usize..14, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_graph(n, 0.5, &mut rng);
        let mut fast = enumerate_maximal_cliques(&g, 1, None).cliques;
        fast.sort();
        prop_assert_eq!(fast, common::naive_maximal_cliques(&g));
    }
}
