//! Distributed guessing problems.
//!
//! Each player `j` sees `f_j(a)` for a hidden `a ∈ S` (uniform prior) and
//! must output `a_j`. Instances where no deterministic strategy beats a
//! blind guess correspond one-to-one to LO inequalities.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LoError, Result};
use crate::inequality::LoInequality;
use crate::rational::Rational;
use crate::scenario::{digit_string, parse_digit_string, Event, Scenario};

/// Largest deterministic strategy space `classical_value` will search.
pub const MAX_STRATEGIES: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DgpInstance {
    scenario: Scenario,
    /// `(a, f(a))` pairs, sorted by `a`.
    entries: Vec<(Vec<usize>, Vec<usize>)>,
}

impl DgpInstance {
    /// `entries` lists each `a ∈ S` with its encoding `f(a)`.
    pub fn new(scenario: Scenario, mut entries: Vec<(Vec<usize>, Vec<usize>)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(LoError::InvalidParameter("S is empty".into()));
        }
        let n = scenario.parties();
        for (a, x) in &entries {
            if a.len() != n || a.iter().any(|&v| v >= scenario.outcomes()) {
                return Err(LoError::InvalidParameter(format!(
                    "{} is not an outcome vector of {scenario}",
                    digit_string(a)
                )));
            }
            if x.len() != n || x.iter().any(|&v| v >= scenario.settings()) {
                return Err(LoError::InvalidParameter(format!(
                    "f({}) = {} is not a setting vector of {scenario}",
                    digit_string(a),
                    digit_string(x)
                )));
            }
        }
        entries.sort();
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(LoError::InvalidParameter(format!(
                "{} appears twice in S",
                digit_string(&w[0].0)
            )));
        }
        Ok(DgpInstance { scenario, entries })
    }

    /// Builds `f` from a function on outcome vectors.
    pub fn from_fn<F>(scenario: Scenario, set: &[Vec<usize>], f: F) -> Result<Self>
    where
        F: Fn(&[usize]) -> Vec<usize>,
    {
        DgpInstance::new(scenario, set.iter().map(|a| (a.clone(), f(a))).collect())
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn entries(&self) -> &[(Vec<usize>, Vec<usize>)] {
        &self.entries
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    /// The events `(a|f(a))`.
    pub fn events(&self) -> Vec<Event> {
        self.entries
            .iter()
            .map(|(a, x)| Event::new(a.clone(), x.clone()))
            .collect()
    }

    /// Every two distinct `a, a'` differ at some `j` with `f_j(a) = f_j(a')`.
    pub fn is_maximally_difficult(&self) -> bool {
        let events = self.events();
        events
            .iter()
            .enumerate()
            .all(|(i, e)| events[i + 1..].iter().all(|f| e.is_orthogonal_to(f)))
    }

    /// Exact optimal winning probability over deterministic local strategies.
    pub fn classical_value(&self) -> Result<Rational> {
        let (n, m, d) = (
            self.scenario.parties(),
            self.scenario.settings(),
            self.scenario.outcomes(),
        );
        let per_party = (d as u64).checked_pow(m as u32);
        let total = per_party.and_then(|p| p.checked_pow(n as u32));
        let per_party = match (per_party, total) {
            (Some(p), Some(t)) if t <= MAX_STRATEGIES => p as usize,
            _ => {
                return Err(LoError::CapacityExceeded(format!(
                    "{scenario} has more than {MAX_STRATEGIES} deterministic strategies",
                    scenario = self.scenario
                )))
            }
        };
        let words = self.size().div_ceil(64);
        // wins[j][g]: elements of S that player j answers correctly under
        // local strategy g (setting 0 most significant)
        let wins: Vec<Vec<Vec<u64>>> = (0..n)
            .map(|j| {
                (0..per_party)
                    .map(|g| {
                        let mut mask = vec![0u64; words];
                        for (i, (a, x)) in self.entries.iter().enumerate() {
                            if (g / d.pow((m - 1 - x[j]) as u32)) % d == a[j] {
                                mask[i / 64] |= 1 << (i % 64);
                            }
                        }
                        mask
                    })
                    .collect()
            })
            .collect();
        let best = (0..per_party)
            .into_par_iter()
            .map(|g| {
                let mut best = 0;
                search(&wins, 1, wins[0][g].clone(), &mut best);
                best
            })
            .max()
            .unwrap_or(0);
        Ok(Rational::new(best.into(), self.size().into()))
    }

    /// `{(a|f(a)) : a ∈ S}`; rejects instances that are not maximally
    /// difficult.
    pub fn to_inequality(&self) -> Result<LoInequality> {
        if !self.is_maximally_difficult() {
            return Err(LoError::NotAnLOInequality(
                "some pair of inputs is distinguishable by every player".into(),
            ));
        }
        LoInequality::new(self.scenario, &self.events())
    }

    /// `S` = outcome parts, `f` = setting parts.
    pub fn from_inequality(ineq: &LoInequality) -> Result<Self> {
        DgpInstance::new(
            ineq.scenario(),
            ineq.events()
                .into_iter()
                .map(|e| (e.outcomes, e.settings))
                .collect(),
        )
    }

    pub fn to_json(&self) -> DgpFile {
        DgpFile {
            n: self.scenario.parties(),
            m: self.scenario.settings(),
            d: self.scenario.outcomes(),
            set: self.entries.iter().map(|(a, _)| digit_string(a)).collect(),
            encoding: self
                .entries
                .iter()
                .map(|(a, x)| (digit_string(a), digit_string(x)))
                .collect(),
        }
    }

    pub fn from_json(file: &DgpFile) -> Result<Self> {
        let scenario = Scenario::new(file.n, file.m, file.d)?;
        let mut seen = HashSet::new();
        let mut entries = Vec::with_capacity(file.set.len());
        for key in &file.set {
            let a = parse_digit_string(key)?;
            let x = file
                .encoding
                .get(key)
                .ok_or_else(|| LoError::InvalidParameter(format!("f is undefined on {key}")))?;
            seen.insert(key.as_str());
            entries.push((a, parse_digit_string(x)?));
        }
        if let Some(extra) = file.encoding.keys().find(|k| !seen.contains(k.as_str())) {
            return Err(LoError::InvalidParameter(format!(
                "f is defined on {extra}, which is not in S"
            )));
        }
        DgpInstance::new(scenario, entries)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: DgpFile =
            serde_json::from_str(text).map_err(|e| LoError::Parse(e.to_string()))?;
        DgpInstance::from_json(&file)
    }
}

fn search(wins: &[Vec<Vec<u64>>], party: usize, alive: Vec<u64>, best: &mut usize) {
    let count: usize = alive.iter().map(|w| w.count_ones() as usize).sum();
    if count <= *best {
        return;
    }
    if party == wins.len() {
        *best = count;
        return;
    }
    for mask in &wins[party] {
        let next: Vec<u64> = alive.iter().zip(mask).map(|(a, b)| a & b).collect();
        search(wins, party + 1, next, best);
    }
}

/// On-disk instance: `{"n":3,"m":2,"d":2,"S":["000",...],"f":{"000":"000",...}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DgpFile {
    pub n: usize,
    pub m: usize,
    pub d: usize,
    #[serde(rename = "S")]
    pub set: Vec<String>,
    #[serde(rename = "f")]
    pub encoding: BTreeMap<String, String>,
}

/// Guess-your-neighbor's-input: `f(a) = (aₙ, a₁, …, aₙ₋₁)` on even-parity
/// strings.
pub fn gyni_instance(parties: usize) -> Result<DgpInstance> {
    if parties < 3 || parties.is_multiple_of(2) {
        return Err(LoError::InvalidArity(format!(
            "guess-your-neighbor's-input needs an odd number of parties ≥ 3, got {parties}"
        )));
    }
    let scenario = Scenario::new(parties, 2, 2)?;
    let set: Vec<Vec<usize>> = (0..1usize << parties)
        .map(|k| {
            (0..parties)
                .map(|i| (k >> (parties - 1 - i)) & 1)
                .collect::<Vec<_>>()
        })
        .filter(|a| a.iter().sum::<usize>() % 2 == 0)
        .collect();
    DgpInstance::from_fn(scenario, &set, |a| {
        (0..parties)
            .map(|i| a[(i + parties - 1) % parties])
            .collect()
    })
}
