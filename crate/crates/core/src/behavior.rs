//! Behaviors (boxes): conditional distributions `P(a₁…aₙ|x₁…xₙ)` with exact
//! rational entries.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{LoError, Result};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::scenario::{digit_string, Event, Scenario};

/// A validated behavior. The table is indexed by canonical event index, and
/// every setting block is nonnegative and sums to exactly one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Behavior {
    scenario: Scenario,
    table: Vec<Rational>,
}

impl Behavior {
    /// Validates nonnegativity and per-setting normalization exactly.
    pub fn new(scenario: Scenario, table: Vec<Rational>) -> Result<Self> {
        if table.len() != scenario.event_count() {
            return Err(LoError::InvalidBehavior(format!(
                "table has {} entries, {} needs {}",
                table.len(),
                scenario,
                scenario.event_count()
            )));
        }
        if let Some(k) = table.iter().position(|p| p.is_negative()) {
            return Err(LoError::InvalidBehavior(format!(
                "negative probability at {}",
                scenario.event_at(k)
            )));
        }
        for x in 0..scenario.joint_settings_count() {
            let settings = scenario.joint_settings(x);
            let total: Rational = (0..scenario.joint_outcomes_count())
                .map(|a| &table[scenario.index_of(&scenario.joint_outcomes(a), &settings)])
                .sum();
            if !total.is_one() {
                return Err(LoError::InvalidBehavior(format!(
                    "settings {} sum to {}, not 1",
                    digit_string(&settings),
                    total
                )));
            }
        }
        Ok(Behavior { scenario, table })
    }

    /// Builds from a function of (outcomes, settings), then validates.
    pub fn from_fn<F>(scenario: Scenario, mut prob: F) -> Result<Self>
    where
        F: FnMut(&[usize], &[usize]) -> Rational,
    {
        let table = (0..scenario.event_count())
            .map(|k| {
                let e = scenario.event_at(k);
                prob(&e.outcomes, &e.settings)
            })
            .collect();
        Behavior::new(scenario, table)
    }

    pub(crate) fn from_table_unchecked(scenario: Scenario, table: Vec<Rational>) -> Self {
        debug_assert_eq!(table.len(), scenario.event_count());
        Behavior { scenario, table }
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn table(&self) -> &[Rational] {
        &self.table
    }

    pub fn prob(&self, event: &Event) -> Result<&Rational> {
        Ok(&self.table[self.scenario.event_index(event)?])
    }

    pub fn prob_at(&self, index: usize) -> &Rational {
        &self.table[index]
    }

    /// Indices of events with positive probability.
    pub fn support(&self) -> Vec<usize> {
        self.table
            .iter()
            .enumerate()
            .filter(|(_, p)| p.is_positive())
            .map(|(k, _)| k)
            .collect()
    }

    /// Single-party no-signaling test: for every party `i`, every setting
    /// `xᵢ`, and every assignment of the other parties' settings and
    /// outcomes, `Σ_{aᵢ} P` is the same as for `xᵢ = 0`. Independence of
    /// marginals over larger party subsets follows by summing these
    /// conditions.
    pub fn is_no_signaling(&self) -> bool {
        let s = self.scenario;
        let (n, m, d) = (s.parties(), s.settings(), s.outcomes());
        let local = s.local_count();
        (0..n).all(|party| {
            let stride = local.pow((n - 1 - party) as u32);
            let contexts = s.event_count() / local;
            let marginal = |x: usize| -> Vec<Rational> {
                (0..contexts)
                    .map(|ctx| {
                        let (high, low) = (ctx / stride, ctx % stride);
                        (0..d)
                            .map(|a| &self.table[(high * local + x * d + a) * stride + low])
                            .sum()
                    })
                    .collect()
            };
            let reference = marginal(0);
            (1..m).all(|x| marginal(x) == reference)
        })
    }

    /// Probability-weighted mixture `Σ wᵢ Bᵢ`; weights must be a probability vector.
    pub fn mixture(parts: &[(Rational, &Behavior)]) -> Result<Behavior> {
        let first = parts
            .first()
            .ok_or_else(|| LoError::InvalidParameter("empty mixture".into()))?;
        let scenario = first.1.scenario;
        let mut total = Rational::zero();
        for (w, b) in parts {
            scenario.ensure_same(&b.scenario)?;
            if w.is_negative() {
                return Err(LoError::InvalidParameter(format!("negative weight {w}")));
            }
            total += w;
        }
        if !total.is_one() {
            return Err(LoError::InvalidParameter(format!(
                "mixture weights sum to {total}"
            )));
        }
        let table = (0..scenario.event_count())
            .map(|k| parts.iter().map(|(w, b)| w * &b.table[k]).sum())
            .collect();
        Ok(Behavior { scenario, table })
    }

    pub fn to_json(&self) -> BehaviorFile {
        let mut probabilities = BTreeMap::new();
        for (k, p) in self.table.iter().enumerate() {
            if !p.is_zero() {
                let e = self.scenario.event_at(k);
                probabilities.insert(
                    format!(
                        "{}|{}",
                        digit_string(&e.outcomes),
                        digit_string(&e.settings)
                    ),
                    format_rational(p),
                );
            }
        }
        BehaviorFile {
            n: self.scenario.parties(),
            m: self.scenario.settings(),
            d: self.scenario.outcomes(),
            probabilities,
        }
    }

    pub fn from_json(file: &BehaviorFile) -> Result<Behavior> {
        let scenario = Scenario::new(file.n, file.m, file.d)?;
        let mut table = vec![Rational::zero(); scenario.event_count()];
        for (key, value) in &file.probabilities {
            let event: Event = key.parse()?;
            let k = scenario.event_index(&event)?;
            table[k] = parse_rational(value)?;
        }
        Behavior::new(scenario, table)
    }

    pub fn from_json_str(text: &str) -> Result<Behavior> {
        let file: BehaviorFile =
            serde_json::from_str(text).map_err(|e| LoError::Parse(e.to_string()))?;
        Behavior::from_json(&file)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("behavior serializes")
    }
}

/// On-disk behavior: `{"n":3,"m":2,"d":2,"P":{"000|000":"1/8", ...}}`.
/// Missing keys are zero; values are `p/q` strings or integers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BehaviorFile {
    pub n: usize,
    pub m: usize,
    pub d: usize,
    #[serde(rename = "P", with = "prob_values")]
    pub probabilities: BTreeMap<String, String>,
}

mod prob_values {
    use std::collections::BTreeMap;

    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use serde_json::Value;

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<String, String>,
        ser: S,
    ) -> Result<S::Ok, S::Error> {
        map.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> Result<BTreeMap<String, String>, D::Error> {
        let raw = BTreeMap::<String, Value>::deserialize(de)?;
        raw.into_iter()
            .map(|(k, v)| match v {
                Value::String(s) => Ok((k, s)),
                Value::Number(n) if n.is_i64() || n.is_u64() => Ok((k, n.to_string())),
                other => Err(D::Error::custom(format!(
                    "probability for {k} must be an integer or a \"p/q\" string, got {other}"
                ))),
            })
            .collect()
    }
}

/// The uniform box `P ≡ 1/dⁿ`.
pub fn uniform_box(scenario: Scenario) -> Behavior {
    let p = Rational::new(1.into(), scenario.joint_outcomes_count().into());
    Behavior::from_table_unchecked(scenario, vec![p; scenario.event_count()])
}

/// Local deterministic box: party `i` answers `strategy[i][xᵢ]`.
pub fn deterministic_box(scenario: Scenario, strategy: &[Vec<usize>]) -> Result<Behavior> {
    if strategy.len() != scenario.parties()
        || strategy
            .iter()
            .any(|g| g.len() != scenario.settings() || g.iter().any(|&a| a >= scenario.outcomes()))
    {
        return Err(LoError::InvalidParameter(format!(
            "strategy does not fit scenario {scenario}"
        )));
    }
    Ok(deterministic_box_unchecked(scenario, strategy))
}

pub(crate) fn deterministic_box_unchecked(scenario: Scenario, strategy: &[Vec<usize>]) -> Behavior {
    let table = (0..scenario.event_count())
        .map(|k| {
            let e = scenario.event_at(k);
            let hit = e
                .outcomes
                .iter()
                .zip(&e.settings)
                .zip(strategy)
                .all(|((&a, &x), g)| g[x] == a);
            if hit {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect();
    Behavior::from_table_unchecked(scenario, table)
}

/// Decodes deterministic strategy number `k` in `[0, (d^m)^n)`.
pub fn strategy_from_index(scenario: Scenario, mut k: usize) -> Vec<Vec<usize>> {
    let (n, m, d) = (scenario.parties(), scenario.settings(), scenario.outcomes());
    let per_party = d.pow(m as u32);
    let mut out = vec![vec![0; m]; n];
    for g in out.iter_mut().rev() {
        let mut local = k % per_party;
        k /= per_party;
        for slot in g.iter_mut().rev() {
            *slot = local % d;
            local /= d;
        }
    }
    out
}
