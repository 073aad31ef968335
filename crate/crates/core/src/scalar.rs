//! Scalar abstractions shared by the exact and the floating-point lanes.
//!
//! Everything geometric in this crate is written against two small traits:
//!
//! * [`Ring`] / [`Field`] — what binary forms, wedges and the exact linear
//!   algebra need. The exact lane instantiates them with [`Rat`]
//!   (arbitrary-precision rationals); the numeric lane with [`Cplx<R>`].
//! * [`Real`] — what the floating-point machinery (root finding, least
//!   squares, Newton) needs. Implemented for `f64` and for [`Dd`]
//!   (double-double, 128-bit storage and a 106-bit mantissa), which backs
//!   the high-precision lane selected by `precision_bits > 53`.

use num_traits::{One, Zero};
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Arbitrary-precision rational scalar used throughout the exact lane.
pub type Rat = num_rational::BigRational;

/// Commutative ring with enough structure for transvectants: integer
/// embeddings and exact division by (nonzero) integer constants.
pub trait Ring:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
{
    fn from_int(n: i64) -> Self;
    /// Exact division by a nonzero integer constant.
    fn div_int(&self, n: i64) -> Self;
}

/// Ring with total division by nonzero elements.
pub trait Field: Ring + Div<Output = Self> {
    fn inv(&self) -> Self {
        Self::one() / self.clone()
    }
}

impl Ring for Rat {
    fn from_int(n: i64) -> Self {
        Rat::from_integer(n.into())
    }
    fn div_int(&self, n: i64) -> Self {
        assert!(n != 0, "division by zero integer");
        self / Rat::from_integer(n.into())
    }
}
impl Field for Rat {}

impl Ring for f64 {
    fn from_int(n: i64) -> Self {
        n as f64
    }
    fn div_int(&self, n: i64) -> Self {
        self / n as f64
    }
}
impl Field for f64 {}

/// Convenience constructor for small rationals.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

/// Convenience constructor for integer rationals.
pub fn rint(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

/// Real scalar for the floating-point lane.
pub trait Real:
    Copy
    + PartialEq
    + PartialOrd
    + Debug
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn maxv(self, o: Self) -> Self;
    /// Machine epsilon of the representation.
    fn eps() -> Self;
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn maxv(self, o: Self) -> Self {
        f64::max(self, o)
    }
    fn eps() -> Self {
        f64::EPSILON
    }
}

/// Double-double real: two non-overlapping f64s, ~106 significand bits.
///
/// Wraps `twofloat::TwoFloat`, whose addition, multiplication and square
/// root are accurate, but whose division drops the residual term (the
/// `1 - b·(1/b)` step needs a fused multiply-add and does not get one), so
/// quotients come out with only f64 accuracy. Division here is rebuilt from
/// the accurate primitives with two Newton corrections.
#[derive(Clone, Copy, PartialEq, PartialOrd, Debug)]
pub struct Dd(pub twofloat::TwoFloat);

impl Dd {
    fn tf(x: f64) -> twofloat::TwoFloat {
        twofloat::TwoFloat::from(x)
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        Dd(self.0 + o.0)
    }
}
impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        Dd(self.0 - o.0)
    }
}
impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        Dd(self.0 * o.0)
    }
}
impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd(-self.0)
    }
}
impl Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        let q0 = self.0.hi() / o.0.hi();
        if !q0.is_finite() || o.0.hi() == 0.0 {
            return Dd(Dd::tf(q0));
        }
        // r and the correction are computed in accurate dd arithmetic
        let mut q = Dd::tf(q0);
        for _ in 0..2 {
            let r = self.0 - o.0 * q;
            q = q + Dd::tf(r.hi() / o.0.hi());
        }
        Dd(q)
    }
}
impl Zero for Dd {
    fn zero() -> Self {
        Dd(Dd::tf(0.0))
    }
    fn is_zero(&self) -> bool {
        self.0 == Dd::tf(0.0)
    }
}
impl One for Dd {
    fn one() -> Self {
        Dd(Dd::tf(1.0))
    }
}

impl Real for Dd {
    fn from_f64(x: f64) -> Self {
        Dd(Dd::tf(x))
    }
    fn to_f64(self) -> f64 {
        f64::from(self.0)
    }
    fn abs(self) -> Self {
        Dd(self.0.abs())
    }
    fn sqrt(self) -> Self {
        Dd(self.0.sqrt())
    }
    fn maxv(self, o: Self) -> Self {
        if self > o {
            self
        } else {
            o
        }
    }
    fn eps() -> Self {
        // 2^-104
        Dd(Dd::tf(4.93038065763132e-32))
    }
}

/// Complex number over a [`Real`] scalar.
///
/// `num_complex` requires `Float` for anything beyond ring operations, which
/// the double-double type does not implement; this small type carries exactly
/// the operations the crate needs and nothing else.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct Cplx<R> {
    pub re: R,
    pub im: R,
}

impl<R: Real> Cplx<R> {
    pub fn new(re: R, im: R) -> Self {
        Cplx { re, im }
    }
    pub fn real(re: R) -> Self {
        Cplx { re, im: R::zero() }
    }
    pub fn from_f64s(re: f64, im: f64) -> Self {
        Cplx::new(R::from_f64(re), R::from_f64(im))
    }
    pub fn conj(self) -> Self {
        Cplx::new(self.re, -self.im)
    }
    pub fn norm_sqr(self) -> R {
        self.re * self.re + self.im * self.im
    }
    /// Modulus, with scaling to dodge overflow on wildly unbalanced parts.
    pub fn abs(self) -> R {
        let (a, b) = (self.re.abs(), self.im.abs());
        let m = a.maxv(b);
        if m.is_zero() {
            return R::zero();
        }
        let (x, y) = (a / m, b / m);
        m * (x * x + y * y).sqrt()
    }
    /// Principal square root.
    pub fn sqrt(self) -> Self {
        let r = self.abs();
        if r.is_zero() {
            return Cplx::new(R::zero(), R::zero());
        }
        let two = R::from_f64(2.0);
        let re = ((r + self.re) / two).sqrt();
        let im_mag = ((r - self.re) / two).sqrt();
        let im = if self.im < R::zero() { -im_mag } else { im_mag };
        // re can be 0 when self is a negative real; keep the branch with im >= 0 then.
        Cplx::new(re, im)
    }
    pub fn scale(self, s: R) -> Self {
        Cplx::new(self.re * s, self.im * s)
    }
    pub fn to_c64(self) -> Cplx<f64> {
        Cplx::new(self.re.to_f64(), self.im.to_f64())
    }
}

impl<R: Real> Add for Cplx<R> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Cplx::new(self.re + o.re, self.im + o.im)
    }
}
impl<R: Real> Sub for Cplx<R> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Cplx::new(self.re - o.re, self.im - o.im)
    }
}
impl<R: Real> Mul for Cplx<R> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Cplx::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}
impl<R: Real> Div for Cplx<R> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        // Smith's algorithm keeps intermediate magnitudes tame.
        if o.re.abs() >= o.im.abs() {
            let r = o.im / o.re;
            let d = o.re + o.im * r;
            Cplx::new((self.re + self.im * r) / d, (self.im - self.re * r) / d)
        } else {
            let r = o.re / o.im;
            let d = o.re * r + o.im;
            Cplx::new((self.re * r + self.im) / d, (self.im * r - self.re) / d)
        }
    }
}
impl<R: Real> Neg for Cplx<R> {
    type Output = Self;
    fn neg(self) -> Self {
        Cplx::new(-self.re, -self.im)
    }
}
impl<R: Real> Zero for Cplx<R> {
    fn zero() -> Self {
        Cplx::new(R::zero(), R::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}
impl<R: Real> One for Cplx<R> {
    fn one() -> Self {
        Cplx::new(R::one(), R::zero())
    }
}

impl<R: Real> Ring for Cplx<R> {
    fn from_int(n: i64) -> Self {
        Cplx::real(R::from_f64(n as f64))
    }
    fn div_int(&self, n: i64) -> Self {
        let d = R::from_f64(n as f64);
        Cplx::new(self.re / d, self.im / d)
    }
}
impl<R: Real> Field for Cplx<R> {}

/// Complex over f64; the default numeric scalar.
pub type C64 = Cplx<f64>;
/// Complex over double-double; the `precision_bits > 53` scalar.
pub type Cdd = Cplx<Dd>;

/// Exact-to-float embedding, used when rational data enters the numeric lane.
pub fn rat_to_f64(x: &Rat) -> f64 {
    // Scale down by a common power of two so both parts fit in f64 range.
    use num_traits::ToPrimitive;
    if let Some(v) = x.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let bits_n = x.numer().bits() as i64;
    let bits_d = x.denom().bits() as i64;
    let shift = (bits_n.max(bits_d) - 900).max(0) as u64;
    let n = (x.numer() >> shift).to_f64().unwrap_or(0.0);
    let d = (x.denom() >> shift).to_f64().unwrap_or(1.0);
    n / d
}

/// Exact-to-real embedding for the generic numeric lane.
///
/// Splits the numerator into two f64 chunks so the double-double lane keeps
/// more than 53 bits of the rational when it has them.
pub fn rat_to_real<R: Real>(x: &Rat) -> R {
    let hi = rat_to_f64(x);
    let rem = x - Rat::from_float(hi).unwrap_or_else(Rat::zero);
    let lo = rat_to_f64(&rem);
    R::from_f64(hi) + R::from_f64(lo)
}

/// Exact-to-complex embedding.
pub fn rat_to_cplx<R: Real>(x: &Rat) -> Cplx<R> {
    Cplx::real(rat_to_real(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_division_and_sqrt() {
        let a = C64::from_f64s(3.0, -4.0);
        let b = C64::from_f64s(-1.0, 2.0);
        let q = a / b;
        let back = q * b;
        assert!((back - a).abs() < 1e-14);
        let s = a.sqrt();
        assert!((s * s - a).abs() < 1e-14);
        // negative real axis: principal branch has non-negative imaginary part
        let m = C64::from_f64s(-4.0, 0.0).sqrt();
        assert!((m - C64::from_f64s(0.0, 2.0)).abs() < 1e-15);
    }

    #[test]
    fn dd_carries_extra_precision() {
        let one = <Dd as Real>::from_f64(1.0);
        let three = <Dd as Real>::from_f64(3.0);
        let x = one / three;
        let err = x * three - one;
        assert!(Real::abs(err).to_f64() < 1e-30);
    }

    #[test]
    fn dd_division_matches_rationals() {
        // randomized cross-check of the repaired division against exact arithmetic
        let mut s = 0x9e3779b97f4a7c15u64;
        for _ in 0..200 {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let a = ((s >> 16) % 100_000) as i64 - 50_000;
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let b = ((s >> 16) % 100_000) as i64 + 1;
            let qr = rat(a, b);
            let qd = <Dd as Real>::from_f64(a as f64) / <Dd as Real>::from_f64(b as f64);
            let diff = &qr - Rat::from_float(qd.0.hi()).unwrap() - Rat::from_float(qd.0.lo()).unwrap();
            let err = rat_to_f64(&diff).abs();
            assert!(err <= 1e-28 * (a.abs().max(1) as f64 / b as f64).max(1e-3), "a={a} b={b} err={err}");
        }
    }

    #[test]
    fn rational_embedding_beyond_f64() {
        // 1 + 2^-80 is invisible in f64 but survives in double-double
        let x = Rat::one() + rat(1, 1) / Rat::from_integer(num_bigint::BigInt::from(2).pow(80));
        let dd: Dd = rat_to_real(&x);
        assert!((dd - <Dd as Real>::from_f64(1.0)).to_f64() > 0.0);
        assert_eq!(rat_to_f64(&x), 1.0);
    }
}
