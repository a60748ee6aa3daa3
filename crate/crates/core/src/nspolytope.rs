//! The no-signaling polytope: its equality system, exact maximization of LO
//! functionals over it, and the quotient of coefficient vectors by the span
//! of its equalities.

use num_traits::{One, Signed, Zero};

use crate::behavior::Behavior;
use crate::error::Result;
use crate::inequality::LoInequality;
use crate::lp::{lp_solve, ExactLP, Sense};
use crate::rational::Rational;
use crate::scenario::Scenario;

/// Normalization rows (one per joint setting, `mⁿ` rows) followed by
/// single-party no-signaling rows: for each party `i`, each pair of its
/// settings `x < x'`, and each assignment of the other parties' settings and
/// outcomes, `Σ_{aᵢ} P(…aᵢ…|…x…) − Σ_{aᵢ} P(…aᵢ…|…x'…) = 0`. The rows are
/// linearly dependent; the solver drops the redundancy.
pub fn ns_constraint_system(scenario: Scenario) -> ExactLP {
    let (n, m, d) = (scenario.parties(), scenario.settings(), scenario.outcomes());
    let count = scenario.event_count();
    let local = scenario.local_count();
    let mut lp = ExactLP::new(count);
    for x in 0..scenario.joint_settings_count() {
        let settings = scenario.joint_settings(x);
        let mut row = vec![Rational::zero(); count];
        for a in 0..scenario.joint_outcomes_count() {
            row[scenario.index_of(&scenario.joint_outcomes(a), &settings)] = Rational::one();
        }
        lp.add_constraint(row, Rational::one());
    }
    for party in 0..n {
        let stride = local.pow((n - 1 - party) as u32);
        let contexts = count / local;
        for x in 0..m {
            for y in x + 1..m {
                for ctx in 0..contexts {
                    let (high, low) = (ctx / stride, ctx % stride);
                    let mut row = vec![Rational::zero(); count];
                    for a in 0..d {
                        row[(high * local + x * d + a) * stride + low] = Rational::one();
                        row[(high * local + y * d + a) * stride + low] = -Rational::one();
                    }
                    lp.add_constraint(row, Rational::zero());
                }
            }
        }
    }
    lp
}

/// Maximum of `Σ_{e∈ineq} P(e)` over the no-signaling polytope.
pub fn ns_max(ineq: &LoInequality) -> Result<Rational> {
    Ok(ns_max_with_witness(ineq)?.0)
}

/// The maximum together with a maximizing vertex of the polytope.
pub fn ns_max_with_witness(ineq: &LoInequality) -> Result<(Rational, Behavior)> {
    let scenario = ineq.scenario();
    let lp = ns_constraint_system(scenario).with_objective(ineq.coefficients());
    let sol = lp_solve(&lp, Sense::Maximize)?;
    let witness = Behavior::new(scenario, sol.point)?;
    Ok((sol.value, witness))
}

/// Coefficient vectors modulo the span of the normalization and
/// no-signaling rows, represented by a reduced row-echelon basis of that
/// span. `reduce` zeroes every pivot coordinate, which picks a unique
/// representative of each coset.
#[derive(Debug, Clone)]
pub struct NsQuotient {
    basis: Vec<(usize, Vec<Rational>)>,
    dimension: usize,
}

impl NsQuotient {
    pub fn new(scenario: Scenario) -> Self {
        let lp = ns_constraint_system(scenario);
        let width = lp.variables();
        let mut rows: Vec<Vec<Rational>> =
            lp.constraints.into_iter().map(|c| c.coefficients).collect();
        let mut basis: Vec<(usize, Vec<Rational>)> = Vec::new();
        let mut next = 0;
        for col in 0..width {
            let Some(found) = (next..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
                continue;
            };
            rows.swap(next, found);
            let inv = rows[next][col].recip();
            for v in rows[next].iter_mut() {
                *v *= &inv;
            }
            let pivot = rows[next].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != next && !row[col].is_zero() {
                    let f = row[col].clone();
                    for (v, p) in row.iter_mut().zip(&pivot) {
                        if !p.is_zero() {
                            *v -= &f * p;
                        }
                    }
                }
            }
            next += 1;
        }
        for (r, row) in rows.into_iter().take(next).enumerate() {
            let col = row
                .iter()
                .position(|v| !v.is_zero())
                .expect("nonzero pivot row");
            debug_assert!(r < width);
            basis.push((col, row));
        }
        NsQuotient {
            basis,
            dimension: width,
        }
    }

    /// Rank of the equality span.
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn reduce(&self, coefficients: &[Rational]) -> Vec<Rational> {
        let mut c = coefficients.to_vec();
        for (col, row) in &self.basis {
            if c[*col].is_zero() {
                continue;
            }
            let f = c[*col].clone();
            for (v, p) in c.iter_mut().zip(row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        c
    }

    /// Reduced images of the unit vectors, scaled to a common integer
    /// denominator. Since reduction is linear, the reduced vector of an
    /// inequality is the sum of its events' rows (times `1/scale`).
    pub fn scaled_unit_reductions(&self) -> (Vec<Vec<i64>>, i64) {
        let units: Vec<Vec<Rational>> = (0..self.dimension)
            .map(|k| {
                let mut e = vec![Rational::zero(); self.dimension];
                e[k] = Rational::one();
                self.reduce(&e)
            })
            .collect();
        let mut lcm = num_bigint::BigInt::one();
        for v in units.iter().flatten() {
            lcm = num_integer::Integer::lcm(&lcm, v.denom());
        }
        let scale: i64 = i64::try_from(&lcm).expect("denominator fits i64");
        let scaled = units
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| {
                        let s = v * Rational::from_integer(lcm.clone());
                        debug_assert!(s.is_integer());
                        i64::try_from(s.to_integer()).expect("scaled entry fits i64")
                    })
                    .collect()
            })
            .collect();
        (scaled, scale)
    }

    /// Whether two coefficient vectors differ by an element of the span.
    pub fn equivalent(&self, a: &[Rational], b: &[Rational]) -> bool {
        let diff: Vec<Rational> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        self.reduce(&diff).iter().all(|v| v.is_zero())
    }
}

/// Nonnegative feasibility check of a behavior against the equality system.
pub fn satisfies_ns_system(behavior: &Behavior) -> bool {
    let lp = ns_constraint_system(behavior.scenario());
    lp.is_feasible_point(behavior.table()) && behavior.table().iter().all(|p| !p.is_negative())
}
