//! Dense univariate polynomials over an exact field.
//!
//! This is the exact workhorse behind root counting and certification:
//! Euclidean gcd, squarefree parts, Sturm sequences, certified real-root
//! isolation to arbitrary rational width, and recovery of rational roots by
//! simplest-fraction reconstruction inside isolating intervals (no integer
//! factoring involved).

use crate::scalar::{rat, Field, Rat, Ring};
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Polynomial `c[0] + c[1] u + … + c[n] u^n`; invariant: no trailing zero.
#[derive(Clone, PartialEq)]
pub struct UniPoly<T> {
    pub coeffs: Vec<T>,
}

impl<T: Ring> UniPoly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn constant(c: T) -> Self {
        UniPoly::new(vec![c])
    }

    /// The monomial u.
    pub fn var() -> Self {
        UniPoly::new(vec![T::zero(), T::one()])
    }

    pub fn deg(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn lead(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn eval(&self, x: &T) -> T {
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return UniPoly::new(vec![]);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.clone() * T::from_int(i as i64))
            .collect();
        UniPoly::new(coeffs)
    }

    pub fn scale(&self, s: &T) -> Self {
        UniPoly::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    /// Coefficient reversal: `u^n f(1/u)` for `n = deg f`.
    pub fn reversed(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        UniPoly::new(c)
    }
}

impl<T: Field> UniPoly<T> {
    /// Euclidean division; divisor must be nonzero.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        let dd = d.deg().expect("division by zero polynomial");
        let mut rem = self.coeffs.clone();
        if rem.len() < d.coeffs.len() {
            return (UniPoly::new(vec![]), self.clone());
        }
        let lead_inv = d.lead().unwrap().inv();
        let qlen = rem.len() - dd;
        let mut q = vec![T::zero(); qlen];
        for k in (0..qlen).rev() {
            let c = rem[k + dd].clone() * lead_inv.clone();
            if !c.is_zero() {
                for j in 0..dd {
                    rem[k + j] = rem[k + j].clone() - c.clone() * d.coeffs[j].clone();
                }
            }
            rem[k + dd] = T::zero();
            q[k] = c;
        }
        (UniPoly::new(q), UniPoly::new(rem))
    }

    /// Monic gcd (1 for coprime inputs, 0 only if both are 0).
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.coeffs.is_empty() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        match a.lead() {
            Some(l) if !l.is_zero() => {
                let inv = l.inv();
                a.scale(&inv)
            }
            _ => a,
        }
    }

    /// `self / squarefree-defect`: same roots, all simple.
    pub fn squarefree_part(&self) -> Self {
        if self.deg().unwrap_or(0) == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        if g.deg() == Some(0) {
            return self.clone();
        }
        let (q, r) = self.divrem(&g);
        debug_assert!(r.coeffs.is_empty());
        q
    }

    pub fn is_squarefree(&self) -> bool {
        match self.deg() {
            None | Some(0) => true,
            _ => self.gcd(&self.derivative()).deg() == Some(0),
        }
    }

    pub fn monic(&self) -> Self {
        match self.lead() {
            Some(l) if !l.is_zero() => self.scale(&l.inv()),
            _ => self.clone(),
        }
    }

    /// Exact quotient; panics if the division is not exact.
    pub fn div_exact(&self, d: &Self) -> Self {
        let (q, r) = self.divrem(d);
        assert!(r.coeffs.is_empty(), "inexact polynomial division");
        q
    }

    /// Resultant via the Euclidean remainder sequence.
    pub fn resultant(&self, other: &Self) -> T {
        fn go<T: Field>(f: &UniPoly<T>, g: &UniPoly<T>) -> T {
            let m = match f.deg() {
                None => return T::zero(),
                Some(m) => m,
            };
            let n = match g.deg() {
                None => return T::zero(),
                Some(n) => n,
            };
            if n == 0 {
                return pow_t(g.coeffs[0].clone(), m as u32);
            }
            if m == 0 {
                return pow_t(f.coeffs[0].clone(), n as u32);
            }
            let (_, r) = f.divrem(g);
            let sign = if (m * n) % 2 == 1 {
                -T::one()
            } else {
                T::one()
            };
            match r.deg() {
                None => T::zero(),
                Some(s) => {
                    sign * pow_t(g.lead().unwrap().clone(), (m - s) as u32) * go(g, &r)
                }
            }
        }
        go(self, other)
    }
}

fn pow_t<T: Ring>(x: T, n: u32) -> T {
    let mut acc = T::one();
    for _ in 0..n {
        acc = acc * x.clone();
    }
    acc
}

impl<T: Ring> Add for UniPoly<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i).cloned().unwrap_or_else(T::zero);
            let b = o.coeffs.get(i).cloned().unwrap_or_else(T::zero);
            c.push(a + b);
        }
        UniPoly::new(c)
    }
}
impl<T: Ring> Sub for UniPoly<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}
impl<T: Ring> Neg for UniPoly<T> {
    type Output = Self;
    fn neg(self) -> Self {
        UniPoly::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}
impl<T: Ring> Mul for UniPoly<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return UniPoly::new(vec![]);
        }
        let mut c = vec![T::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] = c[i + j].clone() + a.clone() * b.clone();
            }
        }
        UniPoly::new(c)
    }
}
impl<T: Ring> Zero for UniPoly<T> {
    fn zero() -> Self {
        UniPoly::new(vec![])
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}
impl<T: Ring> One for UniPoly<T> {
    fn one() -> Self {
        UniPoly::constant(T::one())
    }
}
impl<T: Ring> Ring for UniPoly<T> {
    fn from_int(n: i64) -> Self {
        UniPoly::new(vec![T::from_int(n)])
    }
    fn div_int(&self, n: i64) -> Self {
        UniPoly::new(self.coeffs.iter().map(|c| c.div_int(n)).collect())
    }
}

impl<T: Ring + fmt::Debug> fmt::Debug for UniPoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UniPoly{:?}", self.coeffs)
    }
}

// ---------------------------------------------------------------------------
// Rational-specific machinery: Sturm isolation and rational-root recovery.
// ---------------------------------------------------------------------------

pub type QPoly = UniPoly<Rat>;

impl QPoly {
    /// Cauchy bound: all real roots lie in (-B, B).
    pub fn root_bound(&self) -> Rat {
        let n = self.deg().unwrap_or(0);
        if n == 0 {
            return Rat::one();
        }
        let lead = self.coeffs[n].clone();
        let mut m = Rat::zero();
        for c in &self.coeffs[..n] {
            let a = (c / &lead).abs();
            if a > m {
                m = a;
            }
        }
        m + Rat::one()
    }

    fn sturm_chain(&self) -> Vec<QPoly> {
        let mut chain = vec![self.clone(), self.derivative()];
        loop {
            let k = chain.len();
            if chain[k - 1].is_zero() {
                chain.pop();
                break;
            }
            let (_, r) = chain[k - 2].divrem(&chain[k - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(-r);
        }
        chain
    }

    fn sign_variations(chain: &[QPoly], x: &Rat) -> usize {
        let mut last = 0i8;
        let mut v = 0;
        for p in chain {
            let e = p.eval(x);
            let s = if e.is_zero() {
                0
            } else if e.is_positive() {
                1
            } else {
                -1
            };
            if s != 0 {
                if last != 0 && s != last {
                    v += 1;
                }
                last = s;
            }
        }
        v
    }

    /// Number of distinct real roots in the half-open interval (a, b].
    pub fn count_roots_in(&self, chain: &[QPoly], a: &Rat, b: &Rat) -> usize {
        Self::sign_variations(chain, a) - Self::sign_variations(chain, b)
    }

    /// Certified isolation of every distinct real root.
    ///
    /// The input need not be squarefree (isolation runs on its squarefree
    /// part). Returns half-open intervals `(lo, hi]` of width `< eps`, in
    /// increasing order, each containing exactly one real root.
    pub fn isolate_real_roots(&self, eps: &Rat) -> Vec<(Rat, Rat)> {
        let sf = self.squarefree_part();
        if sf.deg().unwrap_or(0) == 0 {
            return vec![];
        }
        let chain = sf.sturm_chain();
        let b = sf.root_bound();
        let mut work = vec![(-b.clone(), b.clone())];
        let mut done = vec![];
        while let Some((lo, hi)) = work.pop() {
            let n = sf.count_roots_in(&chain, &lo, &hi);
            if n == 0 {
                continue;
            }
            if n == 1 && (&hi - &lo) < *eps {
                done.push((lo, hi));
                continue;
            }
            let mid = (&lo + &hi) / rat(2, 1);
            work.push((lo, mid.clone()));
            work.push((mid, hi));
        }
        done.sort_by(|a, b| a.0.cmp(&b.0));
        done
    }

    /// All rational roots, found by simplest-fraction reconstruction inside
    /// isolating intervals (denominators up to ~10^28 with the default
    /// isolation width; far beyond anything this crate produces).
    pub fn rational_roots(&self) -> Vec<Rat> {
        let eps = rat(1, 1) / Rat::from_integer(num_bigint::BigInt::from(10).pow(30));
        let mut out = vec![];
        for (lo, hi) in self.isolate_real_roots(&eps) {
            // the interval is half-open (lo, hi]; try hi first (hits integer roots)
            if self.eval(&hi).is_zero() {
                out.push(hi);
                continue;
            }
            let c = simplest_in_interval(&lo, &hi);
            if self.eval(&c).is_zero() {
                out.push(c);
            }
        }
        out
    }

    /// Number of distinct complex roots = degree of the squarefree part.
    pub fn distinct_complex_roots(&self) -> usize {
        self.squarefree_part().deg().unwrap_or(0)
    }
}

/// The rational with smallest denominator in the open interval `(lo, hi)`,
/// by continued-fraction descent (Stern–Brocot).
pub fn simplest_in_interval(lo: &Rat, hi: &Rat) -> Rat {
    assert!(lo < hi);
    if *hi <= Rat::zero() {
        return -simplest_in_interval(&-hi.clone(), &-lo.clone());
    }
    if *lo < Rat::zero() {
        return Rat::zero();
    }
    fn go(lo: &Rat, hi: &Rat) -> Rat {
        let fl = lo.floor();
        if &(fl.clone() + Rat::one()) < hi {
            return fl + Rat::one();
        }
        if lo == &fl {
            // (n, hi) with hi <= n+1: candidates n + 1/k, smallest admissible k
            let k = (Rat::one() / (hi - lo)).floor() + Rat::one();
            return lo + Rat::one() / k;
        }
        let frac_lo = lo - fl.clone();
        let frac_hi = hi - fl.clone();
        fl + Rat::one() / go(&(Rat::one() / frac_hi), &(Rat::one() / frac_lo))
    }
    go(lo, hi)
}
