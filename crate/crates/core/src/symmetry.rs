//! Relabelings of a Bell scenario: party permutations, per-party setting
//! permutations, and per-(party, setting) outcome permutations.
//!
//! An operation maps the event `(a|x)` to the event in which source party
//! `i` sits at position `party_perm[i]` with setting `setting_perms[i][xᵢ]`
//! and outcome `outcome_perms[i][xᵢ][aᵢ]`. Every such map is an automorphism
//! of the orthogonality graph.

use crate::behavior::Behavior;
use crate::error::{LoError, Result};
use crate::inequality::LoInequality;
use crate::scenario::{Event, Scenario};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymmetryOp {
    party_perm: Vec<usize>,
    setting_perms: Vec<Vec<usize>>,
    outcome_perms: Vec<Vec<Vec<usize>>>,
}

fn is_permutation(p: &[usize], len: usize) -> bool {
    let mut seen = vec![false; len];
    p.len() == len
        && p.iter()
            .all(|&v| v < len && !std::mem::replace(&mut seen[v], true))
}

fn invert(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &v) in p.iter().enumerate() {
        inv[v] = i;
    }
    inv
}

impl SymmetryOp {
    pub fn new(
        party_perm: Vec<usize>,
        setting_perms: Vec<Vec<usize>>,
        outcome_perms: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        let n = party_perm.len();
        let bad = |what: &str| Err(LoError::InvalidSymmetry(what.to_string()));
        if n == 0 || !is_permutation(&party_perm, n) {
            return bad("party map is not a permutation");
        }
        if setting_perms.len() != n || outcome_perms.len() != n {
            return bad("per-party tables have the wrong length");
        }
        let m = setting_perms[0].len();
        if m == 0 || setting_perms.iter().any(|s| !is_permutation(s, m)) {
            return bad("setting map is not a permutation");
        }
        let d = outcome_perms[0].first().map_or(0, Vec::len);
        if d < 2
            || outcome_perms
                .iter()
                .any(|o| o.len() != m || o.iter().any(|p| !is_permutation(p, d)))
        {
            return bad("outcome map is not a permutation");
        }
        Ok(SymmetryOp {
            party_perm,
            setting_perms,
            outcome_perms,
        })
    }

    pub fn identity(scenario: Scenario) -> Self {
        let (n, m, d) = (scenario.parties(), scenario.settings(), scenario.outcomes());
        SymmetryOp {
            party_perm: (0..n).collect(),
            setting_perms: vec![(0..m).collect(); n],
            outcome_perms: vec![vec![(0..d).collect(); m]; n],
        }
    }

    /// Pure party permutation: source party `i` moves to `perm[i]`.
    pub fn permute_parties(scenario: Scenario, perm: Vec<usize>) -> Result<Self> {
        let mut op = SymmetryOp::identity(scenario);
        if !is_permutation(&perm, scenario.parties()) {
            return Err(LoError::InvalidSymmetry(
                "party map is not a permutation".into(),
            ));
        }
        op.party_perm = perm;
        Ok(op)
    }

    pub fn parties(&self) -> usize {
        self.party_perm.len()
    }

    pub fn check_scenario(&self, scenario: Scenario) -> Result<()> {
        if self.party_perm.len() != scenario.parties()
            || self.setting_perms[0].len() != scenario.settings()
            || self.outcome_perms[0][0].len() != scenario.outcomes()
        {
            return Err(LoError::InvalidSymmetry(format!(
                "operation dimensions do not match {scenario}"
            )));
        }
        Ok(())
    }

    pub fn apply_event(&self, event: &Event) -> Event {
        let n = self.parties();
        let mut outcomes = vec![0; n];
        let mut settings = vec![0; n];
        for i in 0..n {
            let (a, x) = (event.outcomes[i], event.settings[i]);
            let target = self.party_perm[i];
            settings[target] = self.setting_perms[i][x];
            outcomes[target] = self.outcome_perms[i][x][a];
        }
        Event::new(outcomes, settings)
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose(&self, first: &SymmetryOp) -> SymmetryOp {
        let n = self.parties();
        let mut party_perm = vec![0; n];
        let mut setting_perms = vec![Vec::new(); n];
        let mut outcome_perms = vec![Vec::new(); n];
        for i in 0..n {
            let mid = first.party_perm[i];
            party_perm[i] = self.party_perm[mid];
            setting_perms[i] = first.setting_perms[i]
                .iter()
                .map(|&y| self.setting_perms[mid][y])
                .collect();
            outcome_perms[i] = first.outcome_perms[i]
                .iter()
                .enumerate()
                .map(|(x, perm)| {
                    let y = first.setting_perms[i][x];
                    perm.iter()
                        .map(|&b| self.outcome_perms[mid][y][b])
                        .collect()
                })
                .collect();
        }
        SymmetryOp {
            party_perm,
            setting_perms,
            outcome_perms,
        }
    }

    pub fn inverse(&self) -> SymmetryOp {
        let n = self.parties();
        let m = self.setting_perms[0].len();
        let d = self.outcome_perms[0][0].len();
        let mut party_perm = vec![0; n];
        let mut setting_perms = vec![Vec::new(); n];
        let mut outcome_perms = vec![vec![Vec::new(); m]; n];
        for i in 0..n {
            let target = self.party_perm[i];
            party_perm[target] = i;
            setting_perms[target] = invert(&self.setting_perms[i]);
            for x in 0..m {
                let y = self.setting_perms[i][x];
                outcome_perms[target][y] = invert(&self.outcome_perms[i][x]);
            }
        }
        debug_assert!(outcome_perms.iter().flatten().all(|p| p.len() == d));
        SymmetryOp {
            party_perm,
            setting_perms,
            outcome_perms,
        }
    }

    /// Image of every canonical event index.
    pub fn event_permutation(&self, scenario: Scenario) -> Vec<usize> {
        (0..scenario.event_count())
            .map(|k| scenario.index_of_event(&self.apply_event(&scenario.event_at(k))))
            .collect()
    }

    /// Image of every deterministic strategy index: the relabeled box
    /// `op·D_g` is `D_{g'}` with `g'_{π(i)}(sᵢ(x)) = oᵢₓ(gᵢ(x))`.
    pub fn strategy_permutation(&self, scenario: Scenario) -> Vec<usize> {
        let (n, m, d) = (scenario.parties(), scenario.settings(), scenario.outcomes());
        let per_party = d.pow(m as u32);
        let total = per_party.pow(n as u32);
        let local: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                (0..per_party)
                    .map(|g| {
                        let table = local_strategy(g, m, d);
                        let mut image = vec![0; m];
                        for x in 0..m {
                            image[self.setting_perms[i][x]] = self.outcome_perms[i][x][table[x]];
                        }
                        image.iter().fold(0, |acc, &a| acc * d + a)
                    })
                    .collect()
            })
            .collect();
        (0..total)
            .map(|k| {
                let mut parts = vec![0; n];
                let mut rest = k;
                for i in (0..n).rev() {
                    parts[i] = rest % per_party;
                    rest /= per_party;
                }
                let mut image = vec![0; n];
                for i in 0..n {
                    image[self.party_perm[i]] = local[i][parts[i]];
                }
                image.iter().fold(0, |acc, &g| acc * per_party + g)
            })
            .collect()
    }
}

fn local_strategy(mut g: usize, m: usize, d: usize) -> Vec<usize> {
    let mut table = vec![0; m];
    for slot in table.iter_mut().rev() {
        *slot = g % d;
        g /= d;
    }
    table
}

impl Scenario {
    pub(crate) fn index_of_event(&self, e: &Event) -> usize {
        self.index_of(&e.outcomes, &e.settings)
    }
}

/// Relabels an inequality; orthogonality is preserved.
pub fn apply_symmetry(op: &SymmetryOp, ineq: &LoInequality) -> Result<LoInequality> {
    let s = ineq.scenario();
    op.check_scenario(s)?;
    let mut ids: Vec<usize> = ineq
        .events()
        .iter()
        .map(|e| s.index_of_event(&op.apply_event(e)))
        .collect();
    ids.sort_unstable();
    Ok(LoInequality::from_sorted_unchecked(s, ids))
}

/// Relabels a behavior so that `(op·P)(op·e) = P(e)`.
pub fn apply_symmetry_to_behavior(op: &SymmetryOp, behavior: &Behavior) -> Result<Behavior> {
    let s = behavior.scenario();
    op.check_scenario(s)?;
    let perm = op.event_permutation(s);
    let mut table = behavior.table().to_vec();
    for (k, p) in behavior.table().iter().enumerate() {
        table[perm[k]] = p.clone();
    }
    Ok(Behavior::from_table_unchecked(s, table))
}

fn permutations(len: usize) -> Vec<Vec<usize>> {
    if len == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(len - 1) {
        for pos in 0..len {
            let mut q = p.clone();
            q.insert(pos, len - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Order of the full relabeling group, `n!·(m!·(d!)^m)^n`, if it fits.
pub fn group_order(scenario: Scenario) -> Option<u64> {
    let fact = |k: usize| (1..=k as u64).try_fold(1u64, |acc, v| acc.checked_mul(v));
    let local = fact(scenario.settings())?
        .checked_mul(fact(scenario.outcomes())?.checked_pow(scenario.settings() as u32)?)?;
    fact(scenario.parties())?.checked_mul(local.checked_pow(scenario.parties() as u32)?)
}

/// Every element of the relabeling group of `scenario`, identity first.
pub fn all_symmetries(scenario: Scenario) -> Vec<SymmetryOp> {
    let (n, m, d) = (scenario.parties(), scenario.settings(), scenario.outcomes());
    let party_perms = permutations(n);
    let outcome_perms = permutations(d);
    // local relabelings of one party: (setting perm, outcome perm per setting)
    let mut locals: Vec<(Vec<usize>, Vec<Vec<usize>>)> = Vec::new();
    for sp in permutations(m) {
        let combos = outcome_perms.len().pow(m as u32);
        for mut c in 0..combos {
            let mut per_setting = vec![Vec::new(); m];
            for slot in per_setting.iter_mut().rev() {
                *slot = outcome_perms[c % outcome_perms.len()].clone();
                c /= outcome_perms.len();
            }
            locals.push((sp.clone(), per_setting));
        }
    }
    let local_combos = locals.len().pow(n as u32);
    let mut out = Vec::with_capacity(party_perms.len() * local_combos);
    for pp in &party_perms {
        for mut c in 0..local_combos {
            let mut setting_perms = vec![Vec::new(); n];
            let mut outcome_tables = vec![Vec::new(); n];
            for i in (0..n).rev() {
                let (sp, op) = &locals[c % locals.len()];
                c /= locals.len();
                setting_perms[i] = sp.clone();
                outcome_tables[i] = op.clone();
            }
            out.push(SymmetryOp {
                party_perm: pp.clone(),
                setting_perms,
                outcome_perms: outcome_tables,
            });
        }
    }
    out
}
