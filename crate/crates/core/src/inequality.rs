//! LO inequalities: sets of pairwise orthogonal events with bound one.

use std::fmt::Write as _;

use num_traits::One;

use crate::behavior::Behavior;
use crate::cliques::Clique;
use crate::error::{LoError, Result};
use crate::graph::OrthogonalityGraph;
use crate::rational::Rational;
use crate::scenario::{Event, Scenario};

/// `Σ_{e∈events} P(e) ≤ 1` for pairwise orthogonal events. Events are kept
/// as sorted canonical indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LoInequality {
    scenario: Scenario,
    events: Vec<usize>,
}

impl LoInequality {
    /// Validates that the events are distinct, in range, and pairwise
    /// orthogonal.
    pub fn new(scenario: Scenario, events: &[Event]) -> Result<Self> {
        let ids = events
            .iter()
            .map(|e| scenario.event_index(e))
            .collect::<Result<Vec<_>>>()?;
        LoInequality::from_indices(scenario, ids)
    }

    pub fn from_indices(scenario: Scenario, mut ids: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = ids.iter().find(|&&k| k >= scenario.event_count()) {
            return Err(LoError::InvalidEvent(format!("index {bad} out of range")));
        }
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(LoError::NotAnLOInequality("repeated event".into()));
        }
        let events: Vec<Event> = ids.iter().map(|&k| scenario.event_at(k)).collect();
        for (i, e) in events.iter().enumerate() {
            if let Some(f) = events[i + 1..].iter().find(|f| !e.is_orthogonal_to(f)) {
                return Err(LoError::NotAnLOInequality(format!(
                    "{e} and {f} are not orthogonal"
                )));
            }
        }
        Ok(LoInequality {
            scenario,
            events: ids,
        })
    }

    pub(crate) fn from_sorted_unchecked(scenario: Scenario, events: Vec<usize>) -> Self {
        LoInequality { scenario, events }
    }

    /// Inequality of a clique of `graph`.
    pub fn from_clique(graph: &OrthogonalityGraph, clique: &Clique) -> Result<Self> {
        if let Some(&bad) = clique.vertices().iter().find(|&&v| v >= graph.order()) {
            return Err(LoError::InvalidVertex(bad));
        }
        LoInequality::from_indices(graph.scenario(), clique.event_ids(graph))
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn event_ids(&self) -> &[usize] {
        &self.events
    }

    pub fn events(&self) -> Vec<Event> {
        self.events
            .iter()
            .map(|&k| self.scenario.event_at(k))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn bound(&self) -> Rational {
        Rational::one()
    }

    /// Unit coefficient vector over the full event space.
    pub fn coefficients(&self) -> Vec<Rational> {
        let mut c = vec![Rational::from_integer(0.into()); self.scenario.event_count()];
        for &k in &self.events {
            c[k] = Rational::one();
        }
        c
    }

    /// `Σ_{e} P(e)`; a value above one is a violation.
    pub fn evaluate(&self, behavior: &Behavior) -> Result<Rational> {
        self.scenario.ensure_same(&behavior.scenario())?;
        Ok(self.events.iter().map(|&k| behavior.prob_at(k)).sum())
    }

    pub fn is_violated_by(&self, behavior: &Behavior) -> Result<bool> {
        Ok(self.evaluate(behavior)? > self.bound())
    }

    /// Header `# scenario n,m,d`, then one `a…|x…` event per line.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "# scenario {},{},{}\n",
            self.scenario.parties(),
            self.scenario.settings(),
            self.scenario.outcomes()
        );
        for e in self.events() {
            let _ = writeln!(out, "{e}");
        }
        out
    }

    /// Parses one inequality. Blank lines and other `#` comments are
    /// ignored; without a header the scenario is inferred as `(n,2,2)` from
    /// the event width, or taken from `fallback`.
    pub fn from_text(text: &str, fallback: Option<Scenario>) -> Result<Self> {
        let mut list = parse_inequality_list(text, fallback)?;
        match list.len() {
            1 => Ok(list.remove(0)),
            0 => Err(LoError::Parse("no events found".into())),
            k => Err(LoError::Parse(format!(
                "expected one inequality, found {k}"
            ))),
        }
    }
}

/// Parses a file holding one or more inequalities. Inequalities are
/// separated by blank lines or written one per line with comma-separated
/// events (the clique listing format).
pub fn parse_inequality_list(text: &str, fallback: Option<Scenario>) -> Result<Vec<LoInequality>> {
    let mut scenario = fallback;
    let mut groups: Vec<Vec<Event>> = Vec::new();
    let mut current: Vec<Event> = Vec::new();
    let flush = |current: &mut Vec<Event>, groups: &mut Vec<Vec<Event>>| {
        if !current.is_empty() {
            groups.push(std::mem::take(current));
        }
    };
    for line in text.lines().map(str::trim) {
        if line.is_empty() {
            flush(&mut current, &mut groups);
        } else if let Some(rest) = line.strip_prefix("# scenario") {
            scenario = Some(Scenario::parse(rest)?);
        } else if line.starts_with('#') {
            continue;
        } else if line.contains(',') {
            flush(&mut current, &mut groups);
            let events = line
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(str::parse)
                .collect::<Result<Vec<Event>>>()?;
            groups.push(events);
        } else {
            current.push(line.parse()?);
        }
    }
    flush(&mut current, &mut groups);
    let scenario = match scenario {
        Some(s) => s,
        None => {
            let width = groups
                .first()
                .and_then(|g| g.first())
                .map(Event::parties)
                .ok_or_else(|| LoError::Parse("no events found".into()))?;
            Scenario::new(width, 2, 2)?
        }
    };
    groups
        .iter()
        .map(|events| LoInequality::new(scenario, events))
        .collect()
}

/// Guess-your-neighbour's-input for odd `n ≥ 3`: events `(a | shift(a))`
/// over all `a` of even parity, where party `i` gets `a_{i−1}` (cyclically).
pub fn gyni(parties: usize) -> Result<LoInequality> {
    if parties < 3 || parties.is_multiple_of(2) {
        return Err(LoError::InvalidArity(format!(
            "GYNI needs an odd number of parties >= 3, got {parties}"
        )));
    }
    let scenario = Scenario::new(parties, 2, 2)?;
    let events: Vec<Event> = (0..1usize << parties)
        .map(|k| scenario.joint_outcomes(k))
        .filter(|a| a.iter().sum::<usize>() % 2 == 0)
        .map(|a| {
            let settings = (0..parties)
                .map(|i| a[(i + parties - 1) % parties])
                .collect();
            Event::new(a, settings)
        })
        .collect();
    LoInequality::new(scenario, &events)
}
