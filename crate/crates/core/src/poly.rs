//! Univariate polynomials with rational coefficients and Sturm-sequence
//! root isolation.

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

/// Coefficients in ascending degree; no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn constant(c: Rational) -> Self {
        Polynomial::new(vec![c])
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    /// `a + b·q`.
    pub fn linear(a: Rational, b: Rational) -> Self {
        Polynomial::new(vec![a, b])
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    fn lead(&self) -> &Rational {
        self.coeffs.last().expect("nonzero polynomial")
    }

    pub fn eval(&self, q: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * q + c)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(other.coeffs.len());
        Polynomial::new(
            (0..len)
                .map(|i| {
                    let a = self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero);
                    let b = other.coeffs.get(i).cloned().unwrap_or_else(Rational::zero);
                    a + b
                })
                .collect(),
        )
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, k: &Rational) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer((i as i64).into()))
                .collect(),
        )
    }

    /// Quotient and remainder of division by a nonzero polynomial.
    pub fn div_rem(&self, divisor: &Polynomial) -> (Polynomial, Polynomial) {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let mut rem = self.coeffs.clone();
        let dd = divisor.degree();
        if self.is_zero() || self.degree() < dd {
            return (Polynomial::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); self.degree() - dd + 1];
        let lead = divisor.lead().clone();
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lead;
            if !c.is_zero() {
                for (j, dc) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * dc;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Polynomial::new(quot), Polynomial::new(rem))
    }

    pub fn gcd(&self, other: &Polynomial) -> Polynomial {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let lead = a.lead().clone();
        a.scale(&lead.recip())
    }

    /// Divides out the factor `q^k` of largest `k`.
    pub fn without_root_at_zero(&self) -> Polynomial {
        let skip = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        Polynomial::new(self.coeffs[skip..].to_vec())
    }

    /// `p / gcd(p, p')`: same roots, all simple.
    pub fn squarefree(&self) -> Polynomial {
        if self.degree() == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0
    }
}

/// Sturm chain of a square-free polynomial.
#[derive(Debug, Clone)]
pub struct SturmChain {
    chain: Vec<Polynomial>,
}

impl SturmChain {
    pub fn new(p: &Polynomial) -> Self {
        let mut chain = vec![p.clone(), p.derivative()];
        while !chain.last().expect("nonempty").is_zero() {
            let k = chain.len();
            let r = chain[k - 2].div_rem(&chain[k - 1]).1;
            chain.push(r.scale(&-Rational::one()));
        }
        chain.pop();
        SturmChain { chain }
    }

    fn sign_changes(&self, q: &Rational) -> usize {
        let signs: Vec<bool> = self
            .chain
            .iter()
            .map(|p| p.eval(q))
            .filter(|v| !v.is_zero())
            .map(|v| v.is_positive())
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Distinct roots in the half-open interval `(a, b]`. Holds even when
    /// `a` or `b` is a root: at a simple root the sign change between the
    /// first two members disappears exactly as the root is crossed.
    pub fn count_roots(&self, a: &Rational, b: &Rational) -> usize {
        self.sign_changes(a).saturating_sub(self.sign_changes(b))
    }
}

/// An isolated root: either known exactly or known to lie in `(lower, upper]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RootBracket {
    Exact(Rational),
    Between(Rational, Rational),
}

impl RootBracket {
    pub fn lower(&self) -> &Rational {
        match self {
            RootBracket::Exact(r) => r,
            RootBracket::Between(a, _) => a,
        }
    }

    pub fn upper(&self) -> &Rational {
        match self {
            RootBracket::Exact(r) => r,
            RootBracket::Between(_, b) => b,
        }
    }
}

/// Smallest root of `p` in `(0, limit]`, bracketed to width at most
/// `tolerance`. `None` if there is no root there (or `p ≡ 0`).
pub fn smallest_root_in(
    p: &Polynomial,
    limit: &Rational,
    tolerance: &Rational,
) -> Option<RootBracket> {
    let reduced = p.without_root_at_zero();
    if reduced.degree() == 0 {
        return None;
    }
    let s = reduced.squarefree();
    let sturm = SturmChain::new(&s);
    let two = Rational::from_integer(2.into());
    let mut lo = Rational::zero();
    let mut hi = limit.clone();
    if sturm.count_roots(&lo, &hi) == 0 {
        return None;
    }
    // invariant: no root in (0, lo], at least one in (lo, hi]
    loop {
        if s.eval(&hi).is_zero() && sturm.count_roots(&lo, &hi) == 1 {
            return Some(RootBracket::Exact(hi));
        }
        if &hi - &lo <= *tolerance {
            return Some(RootBracket::Between(lo, hi));
        }
        let mid = (&lo + &hi) / &two;
        if sturm.count_roots(&lo, &mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}
