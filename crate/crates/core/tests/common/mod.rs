#![allow(dead_code)]

use lo_core::behavior::{deterministic_box, strategy_from_index, Behavior};
use lo_core::bitset::BitGraph;
use lo_core::cliques::{enumerate_maximal_cliques, Clique};
use lo_core::graph::OrthogonalityGraph;
use lo_core::inequality::LoInequality;
use lo_core::lp::{lp_solve, Sense};
use lo_core::nspolytope::ns_constraint_system;
use lo_core::rational::{int, Rational};
use lo_core::scenario::Scenario;
use rand::Rng;

/// A vertex of the NS polytope: the optimizer of a random integer objective.
pub fn random_ns_vertex<R: Rng>(scenario: Scenario, rng: &mut R) -> Behavior {
    let objective = (0..scenario.event_count())
        .map(|_| int(rng.gen_range(-10..=10)))
        .collect();
    let lp = ns_constraint_system(scenario).with_objective(objective);
    let sol = lp_solve(&lp, Sense::Maximize).expect("NS polytope is feasible and bounded");
    Behavior::new(scenario, sol.point).expect("LP vertex is a behavior")
}

/// A random convex combination of a few local deterministic boxes.
pub fn random_local_mixture<R: Rng>(scenario: Scenario, rng: &mut R) -> Behavior {
    let strategies =
        (scenario.outcomes().pow(scenario.settings() as u32)).pow(scenario.parties() as u32);
    let k = rng.gen_range(1..=4);
    let boxes: Vec<Behavior> = (0..k)
        .map(|_| {
            let g = strategy_from_index(scenario, rng.gen_range(0..strategies));
            deterministic_box(scenario, &g).unwrap()
        })
        .collect();
    let raw: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=9)).collect();
    let total: i64 = raw.iter().sum();
    let parts: Vec<(Rational, &Behavior)> = raw
        .iter()
        .zip(&boxes)
        .map(|(&w, b)| (Rational::new(w.into(), total.into()), b))
        .collect();
    Behavior::mixture(&parts).unwrap()
}

pub fn random_graph<R: Rng>(n: usize, density: f64, rng: &mut R) -> BitGraph {
    let mut g = BitGraph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(density) {
                g.add_edge(u, v);
            }
        }
    }
    g
}

/// Every clique by plain extension in increasing vertex order, then the
/// maximal ones.
pub fn naive_maximal_cliques(g: &BitGraph) -> Vec<Clique> {
    fn grow(g: &BitGraph, current: &mut Vec<usize>, from: usize, out: &mut Vec<Vec<usize>>) {
        out.push(current.clone());
        for v in from..g.order() {
            if current.iter().all(|&u| g.has_edge(u, v)) {
                current.push(v);
                grow(g, current, v + 1, out);
                current.pop();
            }
        }
    }
    let mut all = Vec::new();
    grow(g, &mut Vec::new(), 0, &mut all);
    let mut maximal: Vec<Clique> = all
        .into_iter()
        .filter(|c| !c.is_empty())
        .filter(|c| (0..g.order()).all(|v| c.contains(&v) || !c.iter().all(|&u| g.has_edge(u, v))))
        .map(Clique::new)
        .collect();
    maximal.sort();
    maximal
}

/// Every maximal-clique inequality of a scenario.
pub fn maximal_clique_inequalities(scenario: Scenario) -> Vec<LoInequality> {
    let g = OrthogonalityGraph::build(scenario).unwrap();
    enumerate_maximal_cliques(g.bits(), 1, None)
        .cliques
        .iter()
        .map(|c| LoInequality::from_clique(&g, c).unwrap())
        .collect()
}
