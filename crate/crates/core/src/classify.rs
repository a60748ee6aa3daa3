//! Equivalence classes of LO inequalities under relabelings, party
//! permutations and the no-signaling/normalization equalities.
//!
//! Two inequalities are equivalent when some relabeling maps one onto a
//! coefficient vector that differs from the other by an element of the
//! equality span. Two canonical forms decide this:
//!
//! * `LocalSignature`: the set of local deterministic strategies under which
//!   some event of the inequality occurs. Differences of deterministic boxes
//!   span the directions of the NS affine hull, so `c − c'` lies in the
//!   equality span iff `c·D − c'·D` is the same for every deterministic box
//!   `D`. For LO inequalities `c·D ∈ {0, 1}` and the constant is forced to
//!   zero, so the signature is a complete invariant. Relabelings permute
//!   strategies, and the key is the lexicographically least image.
//! * `ReducedVector`: the coefficient vector reduced modulo a row-echelon
//!   basis of the equality span, minimized lexicographically over the
//!   images of the inequality under the group.
//!
//! Both give the same partition; the first is much cheaper.

use std::collections::{HashMap, HashSet};
use std::ops::ControlFlow;

use num_traits::One;

use crate::cliques::{expand_branch, Branch};
use crate::error::{LoError, Result};
use crate::graph::OrthogonalityGraph;
use crate::inequality::LoInequality;
use crate::nspolytope::{ns_max, NsQuotient};
use crate::rational::Rational;
use crate::scenario::Scenario;
use crate::symmetry::{all_symmetries, group_order};

/// Largest permutation table (group order × permuted points) we store.
pub const MAX_TABLE_ENTRIES: u64 = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CanonicalForm {
    LocalSignature,
    ReducedVector,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CanonicalKey {
    /// Strategy bits, least significant bit of word 0 is strategy 0.
    Signature(Vec<u64>),
    /// Reduced coefficients scaled to integers.
    Reduced(Vec<i64>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceClass {
    pub key: CanonicalKey,
    /// Lexicographically least event list among all inequalities of the
    /// class's symmetry orbits seen.
    pub representative: LoInequality,
    /// Inputs that fell into this class.
    pub members: usize,
    /// Size of the representative's orbit under the relabeling group.
    pub orbit_size: u64,
    /// Distinct symmetry orbits merged into this class.
    pub symmetry_orbits: usize,
    /// Total inequalities over those orbits.
    pub inequality_count: u64,
    pub ns_max: Rational,
    pub trivial: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub scenario: Scenario,
    pub classes: Vec<EquivalenceClass>,
    pub inputs: usize,
}

impl Classification {
    pub fn nontrivial(&self) -> impl Iterator<Item = &EquivalenceClass> {
        self.classes.iter().filter(|c| !c.trivial)
    }

    pub fn nontrivial_count(&self) -> usize {
        self.nontrivial().count()
    }

    pub fn trivial_count(&self) -> usize {
        self.classes.len() - self.nontrivial_count()
    }
}

type EventKey = Vec<u16>;

struct ClassState {
    key: CanonicalKey,
    members: usize,
    orbits: usize,
    inequality_count: u64,
    best: (EventKey, u64),
}

/// Incremental classifier. Feed inequalities with [`Classifier::add`], then
/// call [`Classifier::finish`].
pub struct Classifier {
    scenario: Scenario,
    form: CanonicalForm,
    group: usize,
    /// `event_perms[op * E + e]` is the image of event `e` under op.
    event_perms: Vec<u16>,
    /// `strategy_src[op * S + j]`: the strategy whose bit lands at `j`.
    strategy_src: Vec<u16>,
    /// Strategies consistent with each event.
    event_strategies: Vec<Vec<u16>>,
    strategies: usize,
    reduced_units: Vec<Vec<i64>>,
    /// Known inequality → class index; holds the orbit images that contain
    /// event 0, plus every input seen.
    known: HashMap<EventKey, usize>,
    /// Orbit minima already recorded.
    orbit_minima: HashSet<EventKey>,
    /// Event each group element sends onto event 0.
    anchor_preimage: Vec<u16>,
    /// Raw signature → canonical key, for inequalities that are
    /// NS-equivalent without being relabelings of each other.
    signature_keys: HashMap<Vec<u64>, CanonicalKey>,
    by_key: HashMap<CanonicalKey, usize>,
    classes: Vec<ClassState>,
    inputs: usize,
}

fn strategy_count(scenario: Scenario) -> Option<u64> {
    (scenario.outcomes() as u64)
        .checked_pow(scenario.settings() as u32)?
        .checked_pow(scenario.parties() as u32)
}

impl Classifier {
    pub fn new(scenario: Scenario, form: CanonicalForm) -> Result<Self> {
        let too_big = || {
            LoError::CapacityExceeded(format!(
                "relabeling group of {scenario} is too large to enumerate"
            ))
        };
        let order = group_order(scenario).ok_or_else(too_big)?;
        let events = scenario.event_count() as u64;
        let strategies = strategy_count(scenario).ok_or_else(too_big)?;
        let widest = events.max(strategies);
        if widest > u16::MAX as u64 + 1
            || order
                .checked_mul(widest)
                .is_none_or(|t| t > MAX_TABLE_ENTRIES)
        {
            return Err(too_big());
        }
        let ops = all_symmetries(scenario);
        let mut event_perms = Vec::with_capacity(ops.len() * events as usize);
        let mut strategy_src = Vec::new();
        for op in &ops {
            event_perms.extend(op.event_permutation(scenario).into_iter().map(|k| k as u16));
            if form == CanonicalForm::LocalSignature {
                strategy_src.extend(
                    op.strategy_permutation(scenario)
                        .into_iter()
                        .map(|k| k as u16),
                );
            }
        }
        let anchor_preimage = (0..ops.len())
            .map(|op| {
                let table = &event_perms[op * events as usize..(op + 1) * events as usize];
                table.iter().position(|&k| k == 0).expect("permutation") as u16
            })
            .collect();
        let event_strategies = if form == CanonicalForm::LocalSignature {
            consistent_strategies(scenario)
        } else {
            Vec::new()
        };
        let reduced_units = if form == CanonicalForm::ReducedVector {
            NsQuotient::new(scenario).scaled_unit_reductions().0
        } else {
            Vec::new()
        };
        Ok(Classifier {
            scenario,
            form,
            group: ops.len(),
            event_perms,
            strategy_src,
            event_strategies,
            strategies: strategies as usize,
            reduced_units,
            known: HashMap::new(),
            orbit_minima: HashSet::new(),
            anchor_preimage,
            signature_keys: HashMap::new(),
            by_key: HashMap::new(),
            classes: Vec::new(),
            inputs: 0,
        })
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn group_order(&self) -> usize {
        self.group
    }

    fn signature(&self, events: &[u16]) -> Vec<u64> {
        let mut bits = vec![0u64; self.strategies.div_ceil(64)];
        for &e in events {
            for &g in &self.event_strategies[e as usize] {
                bits[g as usize / 64] |= 1 << (g % 64);
            }
        }
        bits
    }

    fn min_signature(&self, events: &[u16]) -> Vec<u64> {
        let sig = self.signature(events);
        let bit = |j: u16| (sig[j as usize / 64] >> (j % 64)) & 1;
        let s = self.strategies;
        let mut best: Vec<u8> = (0..s).map(|j| bit(j as u16) as u8).collect();
        for op in 1..self.group {
            let src = &self.strategy_src[op * s..(op + 1) * s];
            let mut j = 0;
            while j < s {
                let b = bit(src[j]) as u8;
                if b != best[j] {
                    break;
                }
                j += 1;
            }
            if j < s && bit(src[j]) < best[j] as u64 {
                for (k, slot) in best.iter_mut().enumerate().skip(j) {
                    *slot = bit(src[k]) as u8;
                }
            }
        }
        let mut words = vec![0u64; s.div_ceil(64)];
        for (j, &b) in best.iter().enumerate() {
            words[j / 64] |= (b as u64) << (j % 64);
        }
        words
    }

    fn min_reduced(&self, events: &[u16]) -> Vec<i64> {
        let e = self.scenario.event_count();
        let coordinate = |op: usize, j: usize| -> i64 {
            let table = &self.event_perms[op * e..(op + 1) * e];
            events
                .iter()
                .map(|&k| self.reduced_units[table[k as usize] as usize][j])
                .sum()
        };
        let mut best: Vec<i64> = (0..e).map(|j| coordinate(0, j)).collect();
        for op in 1..self.group {
            let mut j = 0;
            let mut v = 0;
            while j < e {
                v = coordinate(op, j);
                if v != best[j] {
                    break;
                }
                j += 1;
            }
            if j < e && v < best[j] {
                best[j] = v;
                for (k, slot) in best.iter_mut().enumerate().skip(j + 1) {
                    *slot = coordinate(op, k);
                }
            }
        }
        best
    }

    /// Canonical key of an inequality of this scenario.
    pub fn canonical_key(&self, ineq: &LoInequality) -> Result<CanonicalKey> {
        self.scenario.ensure_same(&ineq.scenario())?;
        let events: EventKey = ineq.event_ids().iter().map(|&k| k as u16).collect();
        Ok(self.key_of(&events))
    }

    fn key_of(&self, events: &[u16]) -> CanonicalKey {
        match self.form {
            CanonicalForm::LocalSignature => CanonicalKey::Signature(self.min_signature(events)),
            CanonicalForm::ReducedVector => CanonicalKey::Reduced(self.min_reduced(events)),
        }
    }

    /// Orbit size, least image, and the distinct images containing the
    /// anchor event 0. Only elements sending some event onto it are
    /// visited: the least image starts with the anchor, and since the group
    /// is transitive on events every event lies in the same number of
    /// images, so `|orbit|·|C| = E·|anchored images|`.
    fn orbit(&self, events: &[u16]) -> (u64, EventKey, HashSet<EventKey>) {
        let e = self.scenario.event_count();
        let mut anchored: HashSet<EventKey> = HashSet::new();
        for op in 0..self.group {
            if events.binary_search(&self.anchor_preimage[op]).is_err() {
                continue;
            }
            let table = &self.event_perms[op * e..(op + 1) * e];
            let mut image: EventKey = events.iter().map(|&k| table[k as usize]).collect();
            image.sort_unstable();
            anchored.insert(image);
        }
        let size = (anchored.len() * e) as u64 / events.len() as u64;
        debug_assert_eq!(size * events.len() as u64, (anchored.len() * e) as u64);
        let min = anchored.iter().min().expect("group is transitive").clone();
        (size, min, anchored)
    }

    pub fn add(&mut self, ineq: &LoInequality) -> Result<()> {
        self.scenario.ensure_same(&ineq.scenario())?;
        let events: EventKey = ineq.event_ids().iter().map(|&k| k as u16).collect();
        self.add_events(events);
        Ok(())
    }

    fn add_events(&mut self, events: EventKey) {
        self.inputs += 1;
        if let Some(&c) = self.known.get(&events) {
            self.classes[c].members += 1;
            return;
        }
        let key = match self.form {
            CanonicalForm::LocalSignature => {
                let raw = self.signature(&events);
                match self.signature_keys.get(&raw) {
                    Some(k) => k.clone(),
                    None => {
                        let k = self.key_of(&events);
                        self.signature_keys.insert(raw, k.clone());
                        k
                    }
                }
            }
            CanonicalForm::ReducedVector => self.key_of(&events),
        };
        let class = match self.by_key.get(&key) {
            Some(&c) => c,
            None => {
                let c = self.classes.len();
                self.by_key.insert(key.clone(), c);
                self.classes.push(ClassState {
                    key,
                    members: 0,
                    orbits: 0,
                    inequality_count: 0,
                    best: (events.clone(), 0),
                });
                c
            }
        };
        self.classes[class].members += 1;
        let (size, min, anchored) = self.orbit(&events);
        if self.orbit_minima.insert(min.clone()) {
            let state = &mut self.classes[class];
            state.orbits += 1;
            state.inequality_count += size;
            if state.orbits == 1 || min < state.best.0 {
                state.best = (min, size);
            }
            for image in anchored {
                self.known.insert(image, class);
            }
        }
        self.known.insert(events, class);
    }

    /// Solves one NS program per class and sorts classes by representative.
    pub fn finish(self) -> Result<Classification> {
        let scenario = self.scenario;
        let mut classes = self
            .classes
            .into_iter()
            .map(|s| {
                let representative = LoInequality::from_indices(
                    scenario,
                    s.best.0.iter().map(|&k| k as usize).collect(),
                )?;
                let value = ns_max(&representative)?;
                Ok(EquivalenceClass {
                    key: s.key,
                    trivial: value == Rational::one(),
                    ns_max: value,
                    representative,
                    members: s.members,
                    orbit_size: s.best.1,
                    symmetry_orbits: s.orbits,
                    inequality_count: s.inequality_count,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        classes.sort_by(|a, b| {
            a.representative
                .event_ids()
                .cmp(b.representative.event_ids())
        });
        Ok(Classification {
            scenario,
            classes,
            inputs: self.inputs,
        })
    }
}

/// Strategy indices (party 0 most significant, setting 0 most significant)
/// under which each event occurs.
fn consistent_strategies(scenario: Scenario) -> Vec<Vec<u16>> {
    let (m, d) = (scenario.settings(), scenario.outcomes());
    let per_party = d.pow(m as u32);
    (0..scenario.event_count())
        .map(|k| {
            let e = scenario.event_at(k);
            let mut acc: Vec<usize> = vec![0];
            for (&a, &x) in e.outcomes.iter().zip(&e.settings) {
                let local: Vec<usize> = (0..per_party)
                    .filter(|&g| (g / d.pow((m - 1 - x) as u32)) % d == a)
                    .collect();
                acc = acc
                    .iter()
                    .flat_map(|&h| local.iter().map(move |&g| h * per_party + g))
                    .collect();
            }
            acc.into_iter().map(|g| g as u16).collect()
        })
        .collect()
}

/// Classifies a stream of inequalities of one scenario.
pub fn classify<I>(ineqs: I, scenario: Scenario, form: CanonicalForm) -> Result<Classification>
where
    I: IntoIterator<Item = LoInequality>,
{
    let mut c = Classifier::new(scenario, form)?;
    for ineq in ineqs {
        c.add(&ineq)?;
    }
    c.finish()
}

/// Classifies every maximal clique of the scenario's orthogonality graph.
///
/// The relabeling group is transitive on events, so every orbit of maximal
/// cliques meets the cliques through event 0 and only those are enumerated.
/// `members` then counts cliques through event 0, while
/// `inequality_count` counts the whole class.
pub fn classify_scenario(scenario: Scenario, form: CanonicalForm) -> Result<Classification> {
    let mut c = Classifier::new(scenario, form)?;
    let graph = OrthogonalityGraph::build(scenario)?;
    let g = graph.bits();
    let _ = expand_branch(g, &Branch::containing(g, 0), 1, |clique| {
        let mut events: EventKey = clique.iter().map(|&v| v as u16).collect();
        events.sort_unstable();
        c.add_events(events);
        ControlFlow::Continue(())
    });
    c.finish()
}
