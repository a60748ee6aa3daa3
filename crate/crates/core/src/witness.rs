//! Search for LO inequalities violated by a given behavior.
//!
//! Only events in the support can contribute, so we look for a maximum
//! weight clique (weight = probability) in the support subgraph, then lift
//! it to the full graph and complete it to a maximal clique. Completion adds
//! only zero-probability events, so the value is unchanged.

use num_traits::{One, Zero};

use crate::behavior::Behavior;
use crate::bitset::{BitGraph, BitSet};
use crate::cliques::{complete_to_maximal, lift_clique, Clique};
use crate::error::Result;
use crate::graph::OrthogonalityGraph;
use crate::inequality::LoInequality;
use crate::rational::{to_f64, Rational};

const SLACK: f64 = 1e-9;

struct Search<'a> {
    g: &'a BitGraph,
    colors: &'a [usize],
    color_count: usize,
    weights: &'a [Rational],
    approx: Vec<f64>,
    order: Vec<usize>,
    best: Rational,
    best_approx: f64,
    best_clique: Option<Vec<usize>>,
}

impl Search<'_> {
    /// Each color class is an independent set, so a clique takes at most one
    /// vertex from it.
    fn bound_exceeds_best(&self, weight: &Rational, weight_approx: f64, cand: &BitSet) -> bool {
        let mut top: Vec<Option<usize>> = vec![None; self.color_count];
        for v in cand.iter() {
            let slot = &mut top[self.colors[v]];
            if slot.is_none_or(|u| self.approx[v] > self.approx[u]) {
                *slot = Some(v);
            }
        }
        let bound: f64 = weight_approx + top.iter().flatten().map(|&v| self.approx[v]).sum::<f64>();
        if bound > self.best_approx + SLACK {
            return true;
        }
        if bound < self.best_approx - SLACK {
            return false;
        }
        // too close for floating point; the maximum within a class is
        // recomputed exactly since f64 may misorder near-equal weights
        let mut exact = weight.clone();
        let mut top_exact: Vec<Option<&Rational>> = vec![None; self.color_count];
        for v in cand.iter() {
            let slot = &mut top_exact[self.colors[v]];
            if slot.is_none_or(|u| self.weights[v] > *u) {
                *slot = Some(&self.weights[v]);
            }
        }
        for w in top_exact.into_iter().flatten() {
            exact += w;
        }
        exact > self.best
    }

    fn expand(
        &mut self,
        clique: &mut Vec<usize>,
        weight: Rational,
        weight_approx: f64,
        mut cand: BitSet,
    ) {
        if weight > self.best {
            self.best_approx = to_f64(&weight);
            self.best = weight.clone();
            self.best_clique = Some(clique.clone());
        }
        for i in 0..self.order.len() {
            let v = self.order[i];
            if !cand.contains(v) {
                continue;
            }
            if !self.bound_exceeds_best(&weight, weight_approx, &cand) {
                return;
            }
            cand.remove(v);
            clique.push(v);
            let next = cand.intersection(self.g.neighbors(v));
            self.expand(
                clique,
                &weight + &self.weights[v],
                weight_approx + self.approx[v],
                next,
            );
            clique.pop();
        }
    }
}

/// Maximum weight clique among those of weight strictly above `floor`.
/// `colors` must partition the vertices into independent sets; it only
/// affects speed.
pub fn max_weight_clique_above(
    g: &BitGraph,
    weights: &[Rational],
    colors: &[usize],
    floor: &Rational,
) -> Option<(Clique, Rational)> {
    assert_eq!(weights.len(), g.order());
    assert_eq!(colors.len(), g.order());
    let approx: Vec<f64> = weights.iter().map(to_f64).collect();
    let mut order: Vec<usize> = (0..g.order()).collect();
    order.sort_by(|&a, &b| weights[b].cmp(&weights[a]).then(a.cmp(&b)));
    let mut search = Search {
        g,
        colors,
        color_count: colors.iter().max().map_or(0, |c| c + 1),
        weights,
        approx,
        order,
        best: floor.clone(),
        best_approx: to_f64(floor),
        best_clique: None,
    };
    search.expand(
        &mut Vec::new(),
        Rational::zero(),
        0.0,
        BitSet::full(g.order()),
    );
    let best = search.best;
    search.best_clique.map(|c| (Clique::new(c), best))
}

/// A maximal clique of `full` whose LO inequality `behavior` violates,
/// with the violation value; the most violated one found by exhaustive
/// search of the support subgraph. `None` if the behavior satisfies every
/// LO inequality of the scenario.
pub fn violation_witness(
    behavior: &Behavior,
    full: &OrthogonalityGraph,
) -> Result<Option<(Clique, Rational)>> {
    let support = full.support_subgraph(behavior)?;
    let weights: Vec<Rational> = support
        .event_ids()
        .iter()
        .map(|&k| behavior.prob_at(k).clone())
        .collect();
    // events sharing a joint outcome are never orthogonal
    let colors: Vec<usize> = (0..support.order())
        .map(|v| {
            let e = support.event(v);
            e.outcomes
                .iter()
                .fold(0, |acc, &a| acc * full.scenario().outcomes() + a)
        })
        .collect();
    let Some((clique, _)) =
        max_weight_clique_above(support.bits(), &weights, &colors, &Rational::one())
    else {
        return Ok(None);
    };
    let lifted = lift_clique(&support, full, &clique)?;
    let maximal = complete_to_maximal(full.bits(), &lifted)?;
    let ineq = LoInequality::from_clique(full, &maximal)?;
    let value = ineq.evaluate(behavior)?;
    Ok(Some((maximal, value)))
}
