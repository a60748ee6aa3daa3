//! Standard behaviors: the PR box, its noisy mixtures, the three-parameter
//! family mixing PR, a local point and white noise, tensor products of
//! boxes distributed over separate parties, and noise thresholds.

use num_traits::{One, Signed, Zero};

use crate::behavior::{uniform_box, Behavior};
use crate::error::{LoError, Result};
use crate::inequality::LoInequality;
use crate::poly::{smallest_root_in, Polynomial, RootBracket};
use crate::rational::{rat, Rational};
use crate::scenario::Scenario;

/// `PR(ab|xy) = 1/2` if `a ⊕ b = x·y`, else 0.
pub fn pr_box() -> Behavior {
    let s = Scenario::new(2, 2, 2).expect("(2,2,2)");
    Behavior::from_fn(s, |a, x| {
        if (a[0] ^ a[1]) == (x[0] & x[1]) {
            rat(1, 2)
        } else {
            Rational::zero()
        }
    })
    .expect("PR box is normalized")
}

/// `P_L(ab|xy) = δ_{a,0} δ_{b,0}`.
pub fn local_zero_box() -> Behavior {
    let s = Scenario::new(2, 2, 2).expect("(2,2,2)");
    Behavior::from_fn(s, |a, _| {
        if a[0] == 0 && a[1] == 0 {
            Rational::one()
        } else {
            Rational::zero()
        }
    })
    .expect("deterministic box is normalized")
}

fn check_unit(name: &str, v: &Rational) -> Result<()> {
    if v.is_negative() || *v > Rational::one() {
        return Err(LoError::InvalidParameter(format!(
            "{name} = {v} is outside [0, 1]"
        )));
    }
    Ok(())
}

/// `q·PR + (1−q)·P_I`.
pub fn noisy_pr(q: &Rational) -> Result<Behavior> {
    check_unit("q", q)?;
    let noise = uniform_box(pr_box().scenario());
    Behavior::mixture(&[(q.clone(), &pr_box()), (Rational::one() - q, &noise)])
}

/// `ξ·PR + γ·P_L + (1−ξ−γ)·P_I` for `ξ, γ ≥ 0`, `ξ + γ ≤ 1`.
pub fn fig4_family(xi: &Rational, gamma: &Rational) -> Result<Behavior> {
    check_unit("xi", xi)?;
    check_unit("gamma", gamma)?;
    let rest = Rational::one() - xi - gamma;
    if rest.is_negative() {
        return Err(LoError::InvalidParameter(format!(
            "xi + gamma = {} exceeds 1",
            xi + gamma
        )));
    }
    let noise = uniform_box(pr_box().scenario());
    Behavior::mixture(&[
        (xi.clone(), &pr_box()),
        (gamma.clone(), &local_zero_box()),
        (rest, &noise),
    ])
}

/// Party layout of a product box: factors' parties are concatenated in
/// order (`A₁B₁A₂B₂…` for copies of a bipartite box).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductLayout {
    factors: Vec<Scenario>,
    product: Scenario,
}

impl ProductLayout {
    pub fn new(factors: &[Scenario]) -> Result<Self> {
        let first = *factors
            .first()
            .ok_or_else(|| LoError::InvalidParameter("empty product".into()))?;
        if factors
            .iter()
            .any(|f| f.settings() != first.settings() || f.outcomes() != first.outcomes())
        {
            return Err(LoError::InvalidParameter(
                "product factors must share m and d".into(),
            ));
        }
        let parties = factors.iter().map(Scenario::parties).sum();
        let product = Scenario::new(parties, first.settings(), first.outcomes())
            .map_err(|e| LoError::CapacityExceeded(e.to_string()))?;
        Ok(ProductLayout {
            factors: factors.to_vec(),
            product,
        })
    }

    pub fn product(&self) -> Scenario {
        self.product
    }

    pub fn factors(&self) -> &[Scenario] {
        &self.factors
    }

    /// `(factor index, party within factor)` of product party `j`.
    pub fn locate(&self, mut party: usize) -> Option<(usize, usize)> {
        for (f, s) in self.factors.iter().enumerate() {
            if party < s.parties() {
                return Some((f, party));
            }
            party -= s.parties();
        }
        None
    }

    /// Splits a product event index into one event index per factor.
    pub fn split_index(&self, index: usize) -> Vec<usize> {
        let mut rest = index;
        let local = self.product.local_count();
        let mut out = vec![0; self.factors.len()];
        for (slot, f) in out.iter_mut().zip(&self.factors).rev() {
            let width = local.pow(f.parties() as u32);
            *slot = rest % width;
            rest /= width;
        }
        out
    }
}

/// Product behavior on the concatenated-party scenario.
pub fn tensor_product(factors: &[&Behavior]) -> Result<Behavior> {
    let scenarios: Vec<Scenario> = factors.iter().map(|b| b.scenario()).collect();
    let layout = ProductLayout::new(&scenarios)?;
    if layout.product().event_count() > crate::graph::MAX_GRAPH_VERTICES {
        return Err(LoError::CapacityExceeded(format!(
            "product scenario {} has {} events",
            layout.product(),
            layout.product().event_count()
        )));
    }
    let table = (0..layout.product().event_count())
        .map(|k| {
            layout
                .split_index(k)
                .iter()
                .zip(factors)
                .map(|(&i, b)| b.prob_at(i).clone())
                .product()
        })
        .collect();
    Ok(Behavior::from_table_unchecked(layout.product(), table))
}

/// `copies`-fold product of one box.
pub fn tensor_power(b: &Behavior, copies: usize) -> Result<Behavior> {
    let factors = vec![b; copies];
    tensor_product(&factors)
}

/// A behavior family affine in a parameter `q ∈ [0, 1]`:
/// `P_q = q·at_one + (1−q)·at_zero`.
#[derive(Debug, Clone)]
pub struct AffineFamily {
    pub at_zero: Behavior,
    pub at_one: Behavior,
}

impl AffineFamily {
    pub fn new(at_zero: Behavior, at_one: Behavior) -> Result<Self> {
        at_zero.scenario().ensure_same(&at_one.scenario())?;
        Ok(AffineFamily { at_zero, at_one })
    }

    /// `q·PR + (1−q)·P_I`.
    pub fn noisy_pr() -> Self {
        let pr = pr_box();
        AffineFamily {
            at_zero: uniform_box(pr.scenario()),
            at_one: pr,
        }
    }

    pub fn scenario(&self) -> Scenario {
        self.at_zero.scenario()
    }

    pub fn at(&self, q: &Rational) -> Result<Behavior> {
        check_unit("q", q)?;
        Behavior::mixture(&[
            (q.clone(), &self.at_one),
            (Rational::one() - q, &self.at_zero),
        ])
    }

    fn entry(&self, index: usize) -> Polynomial {
        let a = self.at_zero.prob_at(index).clone();
        let b = self.at_one.prob_at(index) - &a;
        Polynomial::linear(a, b)
    }
}

/// `q ↦ evaluate(ineq, P_q^{⊗copies})` as an exact polynomial.
pub fn lhs_polynomial(
    family: &AffineFamily,
    ineq: &LoInequality,
    copies: usize,
) -> Result<Polynomial> {
    if copies == 0 {
        return Err(LoError::InvalidParameter(
            "copies must be at least 1".into(),
        ));
    }
    let layout = ProductLayout::new(&vec![family.scenario(); copies])?;
    layout.product().ensure_same(&ineq.scenario())?;
    let mut total = Polynomial::zero();
    for &k in ineq.event_ids() {
        let term = layout
            .split_index(k)
            .iter()
            .fold(Polynomial::constant(Rational::one()), |acc, &i| {
                acc.mul(&family.entry(i))
            });
        total = total.add(&term);
    }
    Ok(total)
}

/// Bracket `[lower, upper]` of the smallest `q ∈ (0, 1]` at which the
/// left-hand side reaches one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Threshold {
    pub lower: Rational,
    pub upper: Rational,
    pub lhs: Polynomial,
}

impl Threshold {
    pub fn midpoint(&self) -> f64 {
        (crate::rational::to_f64(&self.lower) + crate::rational::to_f64(&self.upper)) / 2.0
    }

    pub fn width(&self) -> Rational {
        &self.upper - &self.lower
    }
}

/// Default bracket width, well inside the required `10⁻⁴`.
pub fn default_tolerance() -> Rational {
    Rational::new(1.into(), 1_000_000.into())
}

/// Smallest `q ∈ (0, 1]` with `LHS(q) = 1`, bracketed to `tolerance` by
/// bisection on Sturm root counts.
pub fn lo_threshold(
    family: &AffineFamily,
    ineq: &LoInequality,
    copies: usize,
    tolerance: &Rational,
) -> Result<Threshold> {
    let lhs = lhs_polynomial(family, ineq, copies)?;
    let excess = lhs.sub(&Polynomial::constant(Rational::one()));
    match smallest_root_in(&excess, &Rational::one(), tolerance) {
        None => Err(LoError::NoViolationInRange),
        Some(RootBracket::Exact(r)) => Ok(Threshold {
            lower: r.clone(),
            upper: r,
            lhs,
        }),
        Some(RootBracket::Between(lower, upper)) => Ok(Threshold { lower, upper, lhs }),
    }
}
