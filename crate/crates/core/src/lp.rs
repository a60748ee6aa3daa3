//! Exact rational linear programming: two-phase primal simplex on a dense
//! tableau. Entering columns follow the largest reduced cost, with Bland's
//! anti-cycling rule after a run of degenerate pivots. Arithmetic starts in
//! checked 64-bit rationals and restarts with big rationals on overflow.
//!
//! Problems have the standard form `opt c·x  s.t.  A x = b,  x ≥ 0`.
//! Redundant equality rows are allowed; phase one detects and drops them.

use num_rational::Ratio;
use num_traits::{CheckedDiv, CheckedMul, CheckedSub, Signed, Zero};

use crate::error::{LoError, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

/// One equality `coefficients · x = rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqConstraint {
    pub coefficients: Vec<Rational>,
    pub rhs: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactLP {
    pub objective: Vec<Rational>,
    pub constraints: Vec<EqConstraint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub value: Rational,
    /// A basic (vertex) optimizer.
    pub point: Vec<Rational>,
    pub pivots: usize,
}

impl ExactLP {
    pub fn new(variables: usize) -> Self {
        ExactLP {
            objective: vec![Rational::zero(); variables],
            constraints: Vec::new(),
        }
    }

    pub fn variables(&self) -> usize {
        self.objective.len()
    }

    pub fn add_constraint(&mut self, coefficients: Vec<Rational>, rhs: Rational) {
        debug_assert_eq!(coefficients.len(), self.variables());
        self.constraints.push(EqConstraint { coefficients, rhs });
    }

    pub fn with_objective(&self, objective: Vec<Rational>) -> Self {
        ExactLP {
            objective,
            constraints: self.constraints.clone(),
        }
    }

    fn check_shape(&self) -> Result<()> {
        let n = self.variables();
        if let Some(i) = self
            .constraints
            .iter()
            .position(|c| c.coefficients.len() != n)
        {
            return Err(LoError::InvalidParameter(format!(
                "constraint {i} has {} coefficients, expected {n}",
                self.constraints[i].coefficients.len()
            )));
        }
        Ok(())
    }

    /// Every equality holds exactly and every coordinate is nonnegative.
    pub fn is_feasible_point(&self, point: &[Rational]) -> bool {
        point.len() == self.variables()
            && point.iter().all(|v| !v.is_negative())
            && self.constraints.iter().all(|c| {
                let lhs: Rational = c
                    .coefficients
                    .iter()
                    .zip(point)
                    .filter(|(a, _)| !a.is_zero())
                    .map(|(a, v)| a * v)
                    .sum();
                lhs == c.rhs
            })
    }

    pub fn objective_at(&self, point: &[Rational]) -> Rational {
        self.objective
            .iter()
            .zip(point)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, v)| c * v)
            .sum()
    }
}

/// Arithmetic the tableau runs on. `None` means the result does not fit;
/// the solve is then repeated with big rationals.
trait Scalar: Clone + PartialOrd + Sized {
    fn from_rational(v: &Rational) -> Option<Self>;
    fn to_rational(&self) -> Rational;
    fn nil() -> Self;
    fn is_nil(&self) -> bool;
    fn positive(&self) -> bool;
    fn sub(&self, other: &Self) -> Option<Self>;
    fn mul(&self, other: &Self) -> Option<Self>;
    fn div(&self, other: &Self) -> Option<Self>;
}

type Small = Ratio<i64>;

impl Scalar for Small {
    fn from_rational(v: &Rational) -> Option<Self> {
        Some(Ratio::new_raw(
            i64::try_from(v.numer()).ok()?,
            i64::try_from(v.denom()).ok()?,
        ))
    }
    fn to_rational(&self) -> Rational {
        Rational::new((*self.numer()).into(), (*self.denom()).into())
    }
    fn nil() -> Self {
        Zero::zero()
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn sub(&self, other: &Self) -> Option<Self> {
        self.checked_sub(other)
    }
    fn mul(&self, other: &Self) -> Option<Self> {
        self.checked_mul(other)
    }
    fn div(&self, other: &Self) -> Option<Self> {
        self.checked_div(other)
    }
}

impl Scalar for Rational {
    fn from_rational(v: &Rational) -> Option<Self> {
        Some(v.clone())
    }
    fn to_rational(&self) -> Rational {
        self.clone()
    }
    fn nil() -> Self {
        Zero::zero()
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn sub(&self, other: &Self) -> Option<Self> {
        Some(self - other)
    }
    fn mul(&self, other: &Self) -> Option<Self> {
        Some(self * other)
    }
    fn div(&self, other: &Self) -> Option<Self> {
        Some(self / other)
    }
}

enum Failure {
    Lp(LoError),
    Overflow,
}

impl From<LoError> for Failure {
    fn from(e: LoError) -> Self {
        Failure::Lp(e)
    }
}

type Step<T> = std::result::Result<T, Failure>;

fn fits<T>(v: Option<T>) -> Step<T> {
    v.ok_or(Failure::Overflow)
}

/// Degenerate pivots in a row before falling back to Bland's rule.
const DEGENERATE_STREAK: usize = 50;

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    /// Reduced costs for maximization; the last slot holds `-value`.
    cost: Vec<T>,
    basis: Vec<usize>,
    /// Columns that may not enter the basis.
    banned: Vec<bool>,
    pivots: usize,
}

impl<T: Scalar> Tableau<T> {
    fn width(&self) -> usize {
        self.cost.len() - 1
    }

    fn pivot(&mut self, r: usize, col: usize) -> Step<()> {
        let w = self.width();
        let pivot_value = self.rows[r][col].clone();
        let nonzero: Vec<usize> = (0..=w).filter(|&j| !self.rows[r][j].is_nil()).collect();
        for &j in &nonzero {
            self.rows[r][j] = fits(self.rows[r][j].div(&pivot_value))?;
        }
        let pivot_row = self.rows[r].clone();
        let eliminate = |row: &mut Vec<T>| -> Step<()> {
            if row[col].is_nil() {
                return Ok(());
            }
            let factor = row[col].clone();
            for &j in &nonzero {
                row[j] = fits(row[j].sub(&fits(factor.mul(&pivot_row[j]))?))?;
            }
            Ok(())
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row)?;
            }
        }
        eliminate(&mut self.cost)?;
        self.basis[r] = col;
        self.pivots += 1;
        Ok(())
    }

    /// Largest reduced cost enters; after a run of degenerate pivots, Bland's
    /// rule (lowest index entering, lowest basic index on ratio ties) takes
    /// over, which cannot cycle.
    fn run(&mut self) -> Step<()> {
        let w = self.width();
        let mut streak = 0;
        loop {
            let bland = streak >= DEGENERATE_STREAK;
            let mut entering: Option<usize> = None;
            for j in 0..w {
                if self.banned[j] || !self.cost[j].positive() {
                    continue;
                }
                if bland {
                    entering = Some(j);
                    break;
                }
                if entering.is_none_or(|e| self.cost[j] > self.cost[e]) {
                    entering = Some(j);
                }
            }
            let Some(col) = entering else {
                return Ok(());
            };
            let mut best: Option<(T, usize)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[col].positive() {
                    let ratio = fits(row[w].div(&row[col]))?;
                    let better = match &best {
                        None => true,
                        Some((r, b)) => {
                            ratio < *r || (ratio == *r && self.basis[i] < self.basis[*b])
                        }
                    };
                    if better {
                        best = Some((ratio, i));
                    }
                }
            }
            match best {
                Some((ratio, r)) => {
                    if ratio.is_nil() {
                        streak += 1;
                    } else {
                        streak = 0;
                    }
                    self.pivot(r, col)?
                }
                None => return Err(LoError::Unbounded.into()),
            }
        }
    }

    fn set_objective(&mut self, objective: &[T]) -> Step<()> {
        let w = self.width();
        let mut cost = vec![T::nil(); w + 1];
        cost[..objective.len()].clone_from_slice(objective);
        for (i, row) in self.rows.iter().enumerate() {
            let cb = cost[self.basis[i]].clone();
            if cb.is_nil() {
                continue;
            }
            for j in 0..=w {
                if !row[j].is_nil() {
                    cost[j] = fits(cost[j].sub(&fits(cb.mul(&row[j]))?))?;
                }
            }
        }
        self.cost = cost;
        Ok(())
    }
}

/// Solves `lp` exactly. Returns the optimal value and a vertex optimizer.
pub fn lp_solve(lp: &ExactLP, sense: Sense) -> Result<LpSolution> {
    lp.check_shape()?;
    match solve_with::<Small>(lp, sense) {
        Ok(sol) => Ok(sol),
        Err(Failure::Lp(e)) => Err(e),
        Err(Failure::Overflow) => match solve_with::<Rational>(lp, sense) {
            Ok(sol) => Ok(sol),
            Err(Failure::Lp(e)) => Err(e),
            Err(Failure::Overflow) => unreachable!("big rationals do not overflow"),
        },
    }
}

fn solve_with<T: Scalar>(lp: &ExactLP, sense: Sense) -> Step<LpSolution> {
    let convert = |v: &Rational| fits(T::from_rational(v));
    let n = lp.variables();
    let m = lp.constraints.len();
    let width = n + m;
    let one = convert(&Rational::from_integer(1.into()))?;
    let mut rows = Vec::with_capacity(m);
    for (i, c) in lp.constraints.iter().enumerate() {
        let negate = c.rhs.is_negative();
        let flip = |v: &Rational| if negate { -v.clone() } else { v.clone() };
        let mut row = vec![T::nil(); width + 1];
        for (j, a) in c.coefficients.iter().enumerate() {
            if !Zero::is_zero(a) {
                row[j] = convert(&flip(a))?;
            }
        }
        row[n + i] = one.clone();
        row[width] = convert(&flip(&c.rhs))?;
        rows.push(row);
    }
    let mut t = Tableau {
        rows,
        cost: vec![T::nil(); width + 1],
        basis: (n..width).collect(),
        banned: vec![false; width],
        pivots: 0,
    };

    // phase one: maximize -Σ artificials
    let minus_one = convert(&Rational::from_integer((-1).into()))?;
    let mut phase_one = vec![T::nil(); width];
    for c in phase_one.iter_mut().skip(n) {
        *c = minus_one.clone();
    }
    t.set_objective(&phase_one)?;
    t.run()?;
    if !t.cost[width].is_nil() {
        return Err(LoError::Infeasible.into());
    }

    // drive zero-level artificials out of the basis; drop redundant rows
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] >= n {
            match (0..n).find(|&j| !t.rows[r][j].is_nil()) {
                Some(col) => t.pivot(r, col)?,
                None => {
                    t.rows.remove(r);
                    t.basis.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }
    for j in n..width {
        t.banned[j] = true;
    }

    let objective = lp
        .objective
        .iter()
        .map(|c| match sense {
            Sense::Maximize => convert(c),
            Sense::Minimize => convert(&-c.clone()),
        })
        .collect::<Step<Vec<T>>>()?;
    t.set_objective(&objective)?;
    t.run()?;

    let mut point = vec![Rational::zero(); n];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n {
            point[b] = t.rows[i][width].to_rational();
        }
    }
    let value = lp.objective_at(&point);
    Ok(LpSolution {
        value,
        point,
        pivots: t.pivots,
    })
}
