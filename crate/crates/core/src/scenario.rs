//! Bell scenarios and events.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{LoError, Result};

/// Largest supported event space, `(m·d)^n ≤ 2^32`.
pub const MAX_EVENT_COUNT: u64 = 1 << 32;

/// A homogeneous Bell scenario `(n, m, d)`: `n` parties, each with `m`
/// settings and `d` outcomes per setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Scenario {
    parties: usize,
    settings: usize,
    outcomes: usize,
}

impl Scenario {
    pub fn new(parties: usize, settings: usize, outcomes: usize) -> Result<Self> {
        if parties == 0 || settings == 0 || outcomes < 2 {
            return Err(LoError::InvalidScenario(format!(
                "({parties},{settings},{outcomes}) needs n >= 1, m >= 1, d >= 2"
            )));
        }
        let local = (settings as u64)
            .checked_mul(outcomes as u64)
            .ok_or_else(|| LoError::CapacityExceeded("m*d overflows".into()))?;
        let mut count: u64 = 1;
        for _ in 0..parties {
            count = count
                .checked_mul(local)
                .filter(|c| *c <= MAX_EVENT_COUNT)
                .ok_or_else(|| {
                    LoError::CapacityExceeded(format!(
                        "({parties},{settings},{outcomes}) has more than 2^32 events"
                    ))
                })?;
        }
        Ok(Scenario {
            parties,
            settings,
            outcomes,
        })
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn settings(&self) -> usize {
        self.settings
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    /// `m·d`, the number of local (outcome, setting) pairs of one party.
    pub fn local_count(&self) -> usize {
        self.settings * self.outcomes
    }

    /// `(m·d)^n`.
    pub fn event_count(&self) -> usize {
        self.local_count().pow(self.parties as u32)
    }

    /// `m^n`.
    pub fn joint_settings_count(&self) -> usize {
        self.settings.pow(self.parties as u32)
    }

    /// `d^n`.
    pub fn joint_outcomes_count(&self) -> usize {
        self.outcomes.pow(self.parties as u32)
    }

    /// Decodes the `k`-th joint setting (party 0 most significant).
    pub fn joint_settings(&self, k: usize) -> Vec<usize> {
        digits(k, self.settings, self.parties)
    }

    /// Decodes the `k`-th joint outcome (party 0 most significant).
    pub fn joint_outcomes(&self, k: usize) -> Vec<usize> {
        digits(k, self.outcomes, self.parties)
    }

    /// Index from separate outcome and setting vectors. Both must be in range.
    pub fn index_of(&self, outcomes: &[usize], settings: &[usize]) -> usize {
        let local = self.local_count();
        outcomes
            .iter()
            .zip(settings)
            .fold(0, |acc, (&a, &x)| acc * local + x * self.outcomes + a)
    }

    /// Canonical index `Σᵢ (xᵢ·d + aᵢ)·(m·d)^(n−1−i)`.
    pub fn event_index(&self, event: &Event) -> Result<usize> {
        self.check_event(event)?;
        Ok(self.index_of(&event.outcomes, &event.settings))
    }

    pub fn event_from_index(&self, index: usize) -> Result<Event> {
        if index >= self.event_count() {
            return Err(LoError::InvalidEvent(format!(
                "index {index} out of range for {self}"
            )));
        }
        Ok(self.event_at(index))
    }

    /// Unchecked inverse of `index_of`; callers guarantee the range.
    pub(crate) fn event_at(&self, mut index: usize) -> Event {
        let local = self.local_count();
        let mut outcomes = vec![0; self.parties];
        let mut settings = vec![0; self.parties];
        for i in (0..self.parties).rev() {
            let pair = index % local;
            index /= local;
            settings[i] = pair / self.outcomes;
            outcomes[i] = pair % self.outcomes;
        }
        Event { outcomes, settings }
    }

    pub fn check_event(&self, event: &Event) -> Result<()> {
        if event.outcomes.len() != self.parties || event.settings.len() != self.parties {
            return Err(LoError::InvalidEvent(format!(
                "{event} has {} parties, scenario {self} has {}",
                event.outcomes.len(),
                self.parties
            )));
        }
        if event.settings.iter().any(|&x| x >= self.settings)
            || event.outcomes.iter().any(|&a| a >= self.outcomes)
        {
            return Err(LoError::InvalidEvent(format!(
                "{event} out of range for {self}"
            )));
        }
        Ok(())
    }

    pub(crate) fn ensure_same(&self, other: &Scenario) -> Result<()> {
        if self != other {
            return Err(LoError::ScenarioMismatch {
                expected: self.to_string(),
                found: other.to_string(),
            });
        }
        Ok(())
    }

    /// Parses `n,m,d`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.trim().trim_matches(['(', ')']).split(',').collect();
        if parts.len() != 3 {
            return Err(LoError::Parse(format!("expected n,m,d, got {text:?}")));
        }
        let mut nums = [0usize; 3];
        for (slot, part) in nums.iter_mut().zip(&parts) {
            *slot = part
                .trim()
                .parse()
                .map_err(|_| LoError::Parse(format!("expected n,m,d, got {text:?}")))?;
        }
        Scenario::new(nums[0], nums[1], nums[2])
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.parties, self.settings, self.outcomes)
    }
}

fn digits(mut k: usize, base: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = k % base;
        k /= base;
    }
    out
}

/// A joint outcome/setting assignment `(a₁…aₙ|x₁…xₙ)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Event {
    pub outcomes: Vec<usize>,
    pub settings: Vec<usize>,
}

impl Event {
    pub fn new(outcomes: Vec<usize>, settings: Vec<usize>) -> Self {
        Event { outcomes, settings }
    }

    pub fn parties(&self) -> usize {
        self.outcomes.len()
    }

    /// Some party uses the same setting in both events with different outcomes.
    pub fn is_orthogonal_to(&self, other: &Event) -> bool {
        self.settings
            .iter()
            .zip(&other.settings)
            .zip(self.outcomes.iter().zip(&other.outcomes))
            .any(|((x, y), (a, b))| x == y && a != b)
    }
}

/// Renders as `a₁…aₙ|x₁…xₙ`; values above 9 are separated by dots.
impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wide = self.outcomes.iter().chain(&self.settings).any(|&v| v > 9);
        let join = |vals: &[usize]| -> String {
            if wide {
                vals.iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(".")
            } else {
                vals.iter().map(|v| v.to_string()).collect()
            }
        };
        write!(f, "{}|{}", join(&self.outcomes), join(&self.settings))
    }
}

impl FromStr for Event {
    type Err = LoError;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim().trim_matches(['(', ')']);
        let (outs, sets) = text
            .split_once('|')
            .ok_or_else(|| LoError::Parse(format!("event {text:?} lacks '|'")))?;
        let outcomes = parse_digit_string(outs.trim())?;
        let settings = parse_digit_string(sets.trim())?;
        if outcomes.len() != settings.len() {
            return Err(LoError::Parse(format!(
                "event {text:?} has unequal outcome and setting lengths"
            )));
        }
        Ok(Event { outcomes, settings })
    }
}

/// Parses `0110` or, for wide alphabets, `10.2.3`.
pub fn parse_digit_string(text: &str) -> Result<Vec<usize>> {
    let bad = || LoError::Parse(format!("bad digit string {text:?}"));
    if text.contains('.') {
        text.split('.')
            .map(|p| p.parse().map_err(|_| bad()))
            .collect()
    } else {
        text.chars()
            .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad))
            .collect()
    }
}

pub fn digit_string(values: &[usize]) -> String {
    if values.iter().any(|&v| v > 9) {
        values
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(".")
    } else {
        values.iter().map(|v| v.to_string()).collect()
    }
}
