//! Orthogonality graphs of events.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::behavior::Behavior;
use crate::bitset::{BitGraph, BitSet};
use crate::error::{LoError, Result};
use crate::scenario::{Event, Scenario};

/// Largest graph we build; adjacency is O(V²) bits.
pub const MAX_GRAPH_VERTICES: usize = 1 << 16;

/// `e` and `f` are orthogonal iff some party uses the same setting in both
/// with different outcomes.
pub fn are_orthogonal(scenario: Scenario, e: &Event, f: &Event) -> Result<bool> {
    for event in [e, f] {
        if event.parties() != scenario.parties() {
            return Err(LoError::ScenarioMismatch {
                expected: format!("{} parties", scenario.parties()),
                found: format!("event {event}"),
            });
        }
        scenario.check_event(event)?;
    }
    Ok(e.is_orthogonal_to(f))
}

/// Orthogonality graph over a set of events of one scenario. Vertex `k`
/// carries the canonical event index `event_ids[k]`; for the full graph these
/// coincide.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthogonalityGraph {
    scenario: Scenario,
    event_ids: Vec<usize>,
    graph: BitGraph,
}

impl OrthogonalityGraph {
    /// Full graph with `(md)^n` vertices.
    pub fn build(scenario: Scenario) -> Result<Self> {
        let count = scenario.event_count();
        if count > MAX_GRAPH_VERTICES {
            return Err(LoError::CapacityExceeded(format!(
                "{scenario} has {count} events; graphs are limited to {MAX_GRAPH_VERTICES}"
            )));
        }
        let events: Vec<Event> = (0..count).map(|k| scenario.event_at(k)).collect();
        let rows = events
            .par_iter()
            .map(|e| {
                BitSet::from_indices(
                    count,
                    events
                        .iter()
                        .enumerate()
                        .filter(|(_, f)| e.is_orthogonal_to(f))
                        .map(|(j, _)| j),
                )
            })
            .collect();
        Ok(OrthogonalityGraph {
            scenario,
            event_ids: (0..count).collect(),
            graph: BitGraph::from_rows(rows),
        })
    }

    /// Reassembles a graph from labels and adjacency, rechecking every pair.
    pub fn from_parts(scenario: Scenario, event_ids: Vec<usize>, graph: BitGraph) -> Result<Self> {
        if event_ids.len() != graph.order() {
            return Err(LoError::InvalidParameter(
                "label count differs from order".into(),
            ));
        }
        for (u, &eu) in event_ids.iter().enumerate() {
            if eu >= scenario.event_count() {
                return Err(LoError::InvalidVertex(eu));
            }
            let e = scenario.event_at(eu);
            for (v, &ev) in event_ids.iter().enumerate() {
                if graph.has_edge(u, v) != e.is_orthogonal_to(&scenario.event_at(ev)) {
                    return Err(LoError::InvalidParameter(format!(
                        "adjacency of vertices {u} and {v} disagrees with orthogonality"
                    )));
                }
            }
        }
        Ok(OrthogonalityGraph {
            scenario,
            event_ids,
            graph,
        })
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn order(&self) -> usize {
        self.graph.order()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn bits(&self) -> &BitGraph {
        &self.graph
    }

    pub fn is_full(&self) -> bool {
        self.event_ids.len() == self.scenario.event_count()
            && self.event_ids.iter().enumerate().all(|(k, &e)| k == e)
    }

    /// Canonical event index of vertex `v`.
    pub fn event_id(&self, v: usize) -> usize {
        self.event_ids[v]
    }

    pub fn event_ids(&self) -> &[usize] {
        &self.event_ids
    }

    pub fn event(&self, v: usize) -> Event {
        self.scenario.event_at(self.event_ids[v])
    }

    /// Inverse of `event_id`, if the event is a vertex here.
    pub fn vertex_of_event(&self, event_id: usize) -> Option<usize> {
        if self.is_full() {
            return (event_id < self.order()).then_some(event_id);
        }
        self.event_ids.iter().position(|&e| e == event_id)
    }

    pub fn induced_subgraph(&self, keep: &[usize]) -> Result<OrthogonalityGraph> {
        let mut sorted = keep.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if let Some(&bad) = sorted.iter().find(|&&v| v >= self.order()) {
            return Err(LoError::InvalidVertex(bad));
        }
        Ok(OrthogonalityGraph {
            scenario: self.scenario,
            event_ids: sorted.iter().map(|&v| self.event_ids[v]).collect(),
            graph: self.graph.induced(&sorted),
        })
    }

    /// Vertices whose events have positive probability under `behavior`.
    pub fn support_vertices(&self, behavior: &Behavior) -> Result<Vec<usize>> {
        self.scenario.ensure_same(&behavior.scenario())?;
        Ok((0..self.order())
            .filter(|&v| {
                use num_traits::Signed;
                behavior.prob_at(self.event_ids[v]).is_positive()
            })
            .collect())
    }

    /// Possible-events subgraph of `behavior`.
    pub fn support_subgraph(&self, behavior: &Behavior) -> Result<OrthogonalityGraph> {
        let keep = self.support_vertices(behavior)?;
        self.induced_subgraph(&keep)
    }

    /// One vertex per line as `id: a…|x…`, then one edge per line as `u v`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# scenario {},{},{}",
            self.scenario.parties(),
            self.scenario.settings(),
            self.scenario.outcomes()
        );
        let _ = writeln!(
            out,
            "# vertices {} edges {}",
            self.order(),
            self.edge_count()
        );
        for v in 0..self.order() {
            let _ = writeln!(out, "{v}: {}", self.event(v));
        }
        for (u, v) in self.graph.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    /// Parses `to_text` output and rechecks it against the scenario.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut scenario = None;
        let mut labels: Vec<(usize, Event)> = Vec::new();
        let mut edges = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if let Some(rest) = line.strip_prefix("# scenario") {
                scenario = Some(Scenario::parse(rest)?);
            } else if line.starts_with('#') {
                continue;
            } else if let Some((id, ev)) = line.split_once(':') {
                let id = id
                    .trim()
                    .parse()
                    .map_err(|_| LoError::Parse(format!("bad vertex line {line:?}")))?;
                labels.push((id, ev.parse()?));
            } else {
                let mut it = line.split_whitespace().map(str::parse::<usize>);
                match (it.next(), it.next(), it.next()) {
                    (Some(Ok(u)), Some(Ok(v)), None) => edges.push((u, v)),
                    _ => return Err(LoError::Parse(format!("bad edge line {line:?}"))),
                }
            }
        }
        let scenario =
            scenario.ok_or_else(|| LoError::Parse("missing '# scenario' header".into()))?;
        let order = labels.len();
        let mut event_ids = vec![usize::MAX; order];
        for (id, ev) in labels {
            if id >= order {
                return Err(LoError::InvalidVertex(id));
            }
            event_ids[id] = scenario.event_index(&ev)?;
        }
        if let Some(&(u, v)) = edges.iter().find(|(u, v)| *u >= order || *v >= order) {
            return Err(LoError::InvalidVertex(u.max(v)));
        }
        OrthogonalityGraph::from_parts(scenario, event_ids, BitGraph::from_edges(order, edges))
    }
}

/// Maps canonical event indices of `graph` back to vertices in bulk.
pub(crate) fn vertex_lookup(graph: &OrthogonalityGraph) -> HashMap<usize, usize> {
    graph
        .event_ids()
        .iter()
        .enumerate()
        .map(|(v, &e)| (e, v))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behavior::uniform_box;

    fn ev(s: &str) -> Event {
        s.parse().unwrap()
    }

    #[test]
    fn orthogonality_examples() {
        let s = Scenario::new(2, 2, 2).unwrap();
        assert!(are_orthogonal(s, &ev("00|00"), &ev("10|00")).unwrap());
        assert!(!are_orthogonal(s, &ev("00|00"), &ev("11|11")).unwrap());
        assert!(!are_orthogonal(s, &ev("00|00"), &ev("00|00")).unwrap());
        assert!(matches!(
            are_orthogonal(s, &ev("000|000"), &ev("00|00")),
            Err(LoError::ScenarioMismatch { .. })
        ));
    }

    #[test]
    fn full_graph_222_brute_force() {
        let s = Scenario::new(2, 2, 2).unwrap();
        let g = OrthogonalityGraph::build(s).unwrap();
        // brute-force pair check over all 120 pairs
        let mut edges = 0;
        for u in 0..16 {
            for v in u + 1..16 {
                if s.event_at(u).is_orthogonal_to(&s.event_at(v)) {
                    edges += 1;
                }
            }
        }
        assert_eq!(edges, 56);
        assert_eq!(g.order(), 16);
        assert_eq!(g.edge_count(), 56);
        assert!((0..16).all(|v| g.bits().degree(v) == 7));
    }

    #[test]
    fn larger_orders() {
        for (n, order) in [(3, 64), (4, 256)] {
            let g = OrthogonalityGraph::build(Scenario::new(n, 2, 2).unwrap()).unwrap();
            assert_eq!(g.order(), order);
            for v in 0..order {
                assert!(!g.bits().has_edge(v, v));
            }
        }
        assert!(matches!(
            OrthogonalityGraph::build(Scenario::new(9, 2, 2).unwrap()),
            Err(LoError::CapacityExceeded(_))
        ));
    }

    #[test]
    fn induced_subgraphs() {
        let s = Scenario::new(2, 2, 2).unwrap();
        let g = OrthogonalityGraph::build(s).unwrap();
        assert_eq!(g.induced_subgraph(&[]).unwrap().order(), 0);
        let all: Vec<usize> = (0..16).collect();
        assert_eq!(g.induced_subgraph(&all).unwrap(), g);
        assert!(matches!(
            g.induced_subgraph(&[3, 16]),
            Err(LoError::InvalidVertex(16))
        ));
        let sub = g.induced_subgraph(&[15, 3]).unwrap();
        assert_eq!(sub.event(0), s.event_at(3));
        assert_eq!(sub.vertex_of_event(15), Some(1));
        assert_eq!(g.support_vertices(&uniform_box(s)).unwrap().len(), 16);
        let other = uniform_box(Scenario::new(3, 2, 2).unwrap());
        assert!(g.support_vertices(&other).is_err());
    }

    #[test]
    fn text_round_trip() {
        let g = OrthogonalityGraph::build(Scenario::new(2, 2, 2).unwrap()).unwrap();
        let sub = g.induced_subgraph(&[0, 5, 9, 12]).unwrap();
        let back = OrthogonalityGraph::from_text(&sub.to_text()).unwrap();
        assert_eq!(back, sub);
        assert!(g.bits().has_edge(0, 1));
        let tampered = g.to_text().replace("\n0 1\n", "\n");
        assert!(OrthogonalityGraph::from_text(&tampered).is_err());
    }
}
