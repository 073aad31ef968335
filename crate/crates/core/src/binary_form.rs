//! Binary forms, the SL(2) action and transvectants.
//!
//! `BinaryForm` holds a homogeneous form of fixed degree d in x, y with
//! coefficient of `x^(d-i) y^i` at index i. The basis convention is fixed
//! here once; every other module reads it from this one.
//!
//! The l-th transvectant of F (degree m) and G (degree n) is
//!
//! ```text
//! (F,G)_l = (m-l)!/m! · (n-l)!/n! · Σ_{i=0..l} (-1)^i C(l,i)
//!           · ∂^l F/∂x^(l-i)∂y^i · ∂^l G/∂x^i∂y^(l-i)
//! ```
//!
//! a form of degree m+n-2l. It is bilinear, SL(2)-equivariant and satisfies
//! `(F,G)_l = (-1)^l (G,F)_l`.

use crate::scalar::{Field, Rat, Ring};
use crate::unipoly::UniPoly;
use num_traits::{One, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FormError {
    #[error("transvectant index {l} out of range for degrees {m}, {n}")]
    TransvectantRange { l: usize, m: usize, n: usize },
    #[error("operation requires a nonzero form")]
    ZeroForm,
    #[error("Möbius transformation must have nonzero determinant")]
    SingularMobius,
    #[error("form has a repeated root")]
    RepeatedRoots,
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
}

/// Homogeneous binary form of a fixed degree.
#[derive(Clone, PartialEq)]
pub struct BinaryForm<T> {
    degree: usize,
    coeffs: Vec<T>,
}

impl<T: Ring> BinaryForm<T> {
    /// Builds a form of degree `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty());
        BinaryForm {
            degree: coeffs.len() - 1,
            coeffs,
        }
    }

    pub fn zero_of_degree(d: usize) -> Self {
        BinaryForm {
            degree: d,
            coeffs: vec![T::zero(); d + 1],
        }
    }

    /// The monomial `x^(d-i) y^i`.
    pub fn monomial(d: usize, i: usize) -> Self {
        assert!(i <= d);
        let mut c = vec![T::zero(); d + 1];
        c[i] = T::one();
        BinaryForm { degree: d, coeffs: c }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &T {
        &self.coeffs[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.degree, o.degree);
        BinaryForm::from_parts(
            self.degree,
            self.coeffs
                .iter()
                .zip(&o.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!(self.degree, o.degree);
        BinaryForm::from_parts(
            self.degree,
            self.coeffs
                .iter()
                .zip(&o.coeffs)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        )
    }

    pub fn neg(&self) -> Self {
        BinaryForm::from_parts(self.degree, self.coeffs.iter().map(|a| -a.clone()).collect())
    }

    pub fn scale(&self, s: &T) -> Self {
        BinaryForm::from_parts(
            self.degree,
            self.coeffs.iter().map(|a| a.clone() * s.clone()).collect(),
        )
    }

    /// Product of forms; degrees add.
    pub fn mul(&self, o: &Self) -> Self {
        let d = self.degree + o.degree;
        let mut c = vec![T::zero(); d + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] = c[i + j].clone() + a.clone() * b.clone();
            }
        }
        BinaryForm { degree: d, coeffs: c }
    }

    pub fn pow(&self, n: usize) -> Self {
        let mut acc = BinaryForm::monomial(0, 0);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, x: &T, y: &T) -> T {
        let d = self.degree;
        // Horner in x/y: Σ c_i x^(d-i) y^i
        let mut xp = vec![T::one()];
        let mut yp = vec![T::one()];
        for k in 1..=d {
            xp.push(xp[k - 1].clone() * x.clone());
            yp.push(yp[k - 1].clone() * y.clone());
        }
        let mut acc = T::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            acc = acc + c.clone() * xp[d - i].clone() * yp[i].clone();
        }
        acc
    }

    /// ∂/∂x; returns the zero form of degree 0 when the degree is 0.
    pub fn dx(&self) -> Self {
        let d = self.degree;
        if d == 0 {
            return BinaryForm::zero_of_degree(0);
        }
        let coeffs = (0..d)
            .map(|i| self.coeffs[i].clone() * T::from_int((d - i) as i64))
            .collect();
        BinaryForm {
            degree: d - 1,
            coeffs,
        }
    }

    /// ∂/∂y.
    pub fn dy(&self) -> Self {
        let d = self.degree;
        if d == 0 {
            return BinaryForm::zero_of_degree(0);
        }
        let coeffs = (1..=d)
            .map(|i| self.coeffs[i].clone() * T::from_int(i as i64))
            .collect();
        BinaryForm {
            degree: d - 1,
            coeffs,
        }
    }

    fn from_parts(degree: usize, coeffs: Vec<T>) -> Self {
        debug_assert_eq!(coeffs.len(), degree + 1);
        BinaryForm { degree, coeffs }
    }

    /// Dehomogenization f(u) = F(1, u).
    pub fn to_unipoly(&self) -> UniPoly<T> {
        UniPoly::new(self.coeffs.clone())
    }

    /// Homogenization to the given degree (low coefficients are f's).
    pub fn from_unipoly(f: &UniPoly<T>, degree: usize) -> Self {
        assert!(f.deg().unwrap_or(0) <= degree);
        let mut c = f.coeffs.clone();
        c.resize(degree + 1, T::zero());
        BinaryForm {
            degree,
            coeffs: c,
        }
    }

    /// Maps coefficients through `f`, e.g. to embed exact data in a numeric lane.
    pub fn map<S: Ring>(&self, f: impl Fn(&T) -> S) -> BinaryForm<S> {
        BinaryForm {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }
}

fn falling(m: usize, l: usize) -> i64 {
    let mut acc: i64 = 1;
    for k in 0..l {
        acc = acc.checked_mul((m - k) as i64).expect("degree too large");
    }
    acc
}

fn binom(l: usize, i: usize) -> i64 {
    let mut acc: i64 = 1;
    for k in 0..i {
        acc = acc * (l - k) as i64 / (k + 1) as i64;
    }
    acc
}

/// The l-th transvectant `(F,G)_l`, a form of degree `m + n - 2l`.
pub fn transvectant<T: Ring>(
    f: &BinaryForm<T>,
    g: &BinaryForm<T>,
    l: usize,
) -> Result<BinaryForm<T>, FormError> {
    let (m, n) = (f.degree(), g.degree());
    if l > m.min(n) {
        return Err(FormError::TransvectantRange { l, m, n });
    }
    // l-th order partials of f: dfs[i] = ∂^l f / ∂x^(l-i) ∂y^i
    let mut dfs = Vec::with_capacity(l + 1);
    let mut dgs = Vec::with_capacity(l + 1);
    for i in 0..=l {
        let mut df = f.clone();
        let mut dg = g.clone();
        for _ in 0..(l - i) {
            df = df.dx();
        }
        for _ in 0..i {
            df = df.dy();
        }
        for _ in 0..i {
            dg = dg.dx();
        }
        for _ in 0..(l - i) {
            dg = dg.dy();
        }
        dfs.push(df);
        dgs.push(dg);
    }
    let mut acc = BinaryForm::zero_of_degree(m + n - 2 * l);
    for i in 0..=l {
        let term = dfs[i].mul(&dgs[i]).scale(&T::from_int(binom(l, i)));
        acc = if i % 2 == 0 {
            acc.add(&term)
        } else {
            acc.sub(&term)
        };
    }
    Ok(acc.map(|c| c.div_int(falling(m, l)).div_int(falling(n, l))))
}

/// An invertible 2×2 matrix acting on forms by `x ↦ ax+by, y ↦ cx+dy`.
#[derive(Clone, Debug, PartialEq)]
pub struct Mobius<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Ring> Mobius<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Result<Self, FormError> {
        let m = Mobius { a, b, c, d };
        if m.det().is_zero() {
            return Err(FormError::SingularMobius);
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        Mobius {
            a: T::one(),
            b: T::zero(),
            c: T::zero(),
            d: T::one(),
        }
    }

    pub fn det(&self) -> T {
        self.a.clone() * self.d.clone() - self.b.clone() * self.c.clone()
    }

    /// Composition in action order: `act(compose(g,h), F) = act(g, act(h, F))`.
    pub fn compose(g: &Self, h: &Self) -> Self {
        // substitution acts on the right, so the matrix product is h·g
        Mobius {
            a: h.a.clone() * g.a.clone() + h.b.clone() * g.c.clone(),
            b: h.a.clone() * g.b.clone() + h.b.clone() * g.d.clone(),
            c: h.c.clone() * g.a.clone() + h.d.clone() * g.c.clone(),
            d: h.c.clone() * g.b.clone() + h.d.clone() * g.d.clone(),
        }
    }
}

impl<T: Field> Mobius<T> {
    pub fn inverse(&self) -> Self {
        let det = self.det();
        Mobius {
            a: self.d.clone() / det.clone(),
            b: -self.b.clone() / det.clone(),
            c: -self.c.clone() / det.clone(),
            d: self.a.clone() / det,
        }
    }
}

/// Substitution action `F(x,y) ↦ F(ax+by, cx+dy)`.
pub fn act<T: Ring>(g: &Mobius<T>, f: &BinaryForm<T>) -> BinaryForm<T> {
    let d = f.degree();
    let lx = BinaryForm::new(vec![g.a.clone(), g.b.clone()]);
    let ly = BinaryForm::new(vec![g.c.clone(), g.d.clone()]);
    // powers of the two images
    let mut px = vec![BinaryForm::monomial(0, 0)];
    let mut py = vec![BinaryForm::monomial(0, 0)];
    for k in 1..=d {
        px.push(px[k - 1].mul(&lx));
        py.push(py[k - 1].mul(&ly));
    }
    let mut acc = BinaryForm::zero_of_degree(d);
    for (i, c) in f.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        acc = acc.add(&px[d - i].mul(&py[i]).scale(c));
    }
    acc
}

/// Oracle for the combinant determinant rule: whether
/// `(aF+bG, cF+dG)_(2k-1) = (ad-bc)·(F,G)_(2k-1)` holds (it always does).
pub fn combinant_determinant_check<T: Ring>(
    f: &BinaryForm<T>,
    g: &BinaryForm<T>,
    a: &T,
    b: &T,
    c: &T,
    d: &T,
    k: usize,
) -> Result<bool, FormError> {
    let l = 2 * k - 1;
    let lhs = transvectant(
        &f.scale(a).add(&g.scale(b)),
        &f.scale(c).add(&g.scale(d)),
        l,
    )?;
    let det = a.clone() * d.clone() - b.clone() * c.clone();
    let rhs = transvectant(f, g, l)?.scale(&det);
    Ok(lhs == rhs)
}

// ---------------------------------------------------------------------------
// Exact structure of rational forms: gcd, repeated roots, square detection.
// ---------------------------------------------------------------------------

/// Rational binary form; the exact lane's concrete instantiation.
pub type QForm = BinaryForm<Rat>;

impl<T: Field> BinaryForm<T> {
    /// First-nonzero-coefficient-1 projective normalization.
    pub fn normalize_projective(&self) -> Self {
        for c in &self.coeffs {
            if !c.is_zero() {
                let inv = c.inv();
                return self.scale(&inv);
            }
        }
        self.clone()
    }

    /// Monic-style gcd of two binary forms (projective common factor).
    pub fn form_gcd(&self, o: &Self) -> Self {
        assert!(!self.is_zero() && !o.is_zero());
        let f = self.to_unipoly();
        let g = o.to_unipoly();
        let gu = f.gcd(&g);
        // dehomogenization at x = 1 keeps roots at (1:0) but drops the factor x
        // (the root at u = ∞), whose multiplicity is the degree defect
        let fx = self.degree - f.deg().unwrap();
        let gx = o.degree - g.deg().unwrap();
        let xmult = fx.min(gx);
        let base = BinaryForm::from_unipoly(&gu, gu.deg().unwrap());
        let mut c = base.coeffs;
        c.resize(c.len() + xmult, T::zero());
        BinaryForm::new(c)
    }

    /// True iff the form has a repeated root on the projective line.
    pub fn has_repeated_root(&self) -> bool {
        if self.degree < 2 || self.is_zero() {
            return false;
        }
        let (fx, fy) = (self.dx(), self.dy());
        if fx.is_zero() || fy.is_zero() {
            // a power of a single variable
            return true;
        }
        fx.form_gcd(&fy).degree() >= 1
    }

    /// If `F = c·q²` for a form q of half degree, returns `(q, c)` with q
    /// projectively normalized. Exact, no thresholds.
    pub fn square_root(&self) -> Option<(Self, T)> {
        let d = self.degree;
        if d % 2 != 0 || self.is_zero() {
            return None;
        }
        if d == 0 {
            return Some((BinaryForm::monomial(0, 0), self.coeffs[0].clone()));
        }
        let (fx, fy) = (self.dx(), self.dy());
        if fy.is_zero() {
            // F = c·x^d
            return Some((BinaryForm::monomial(d / 2, 0), self.coeffs[0].clone()));
        }
        if fx.is_zero() {
            return Some((BinaryForm::monomial(d / 2, d / 2), self.coeffs[d].clone()));
        }
        let g = self.form_gcd(&fx.form_gcd(&fy));
        // for F = c q² with q squarefree, gcd(F, F_x, F_y) = q; for q = l^k patterns the
        // gcd is l^(2k-1), whose squarefree part recovers l.
        let q = if g.degree() == d / 2 {
            g
        } else {
            // collapse to the radical and rebuild by multiplicity
            let rad = radical(&g);
            if rad.degree() == 0 {
                return None;
            }
            let mut q = BinaryForm::monomial(0, 0);
            let half = d / 2;
            if half % rad.degree() != 0 {
                return None;
            }
            for _ in 0..(half / rad.degree()) {
                q = q.mul(&rad);
            }
            q
        };
        if q.degree() != d / 2 {
            return None;
        }
        let q = q.normalize_projective();
        let q2 = q.mul(&q);
        // find scale c with F = c q²
        let k = q2.coeffs.iter().position(|c| !c.is_zero())?;
        let c = self.coeffs[k].clone() / q2.coeffs[k].clone();
        if self == &q2.scale(&c) {
            Some((q, c))
        } else {
            None
        }
    }
}

/// Product of the distinct irreducible factors (squarefree part).
pub fn radical<T: Field>(f: &BinaryForm<T>) -> BinaryForm<T> {
    if f.degree() == 0 || f.is_zero() {
        return f.clone();
    }
    let u = f.to_unipoly();
    let xmult = f.degree() - u.deg().unwrap();
    let sf = u.squarefree_part();
    let base = BinaryForm::from_unipoly(&sf, sf.deg().unwrap());
    let mut c = base.coeffs().to_vec();
    if xmult > 0 {
        c.resize(c.len() + 1, T::zero());
    }
    BinaryForm::new(c)
}

impl QForm {
    /// All rational roots on P¹ with multiplicities, as `((x:y), mult)`;
    /// `None` when the form does not split completely over the rationals.
    pub fn rational_roots_projective(&self) -> Option<Vec<((Rat, Rat), usize)>> {
        assert!(!self.is_zero());
        let f = self.to_unipoly();
        // the dehomogenization F(1,u) drops the factor x; its multiplicity is
        // the degree defect and contributes the projective root (0:1)
        let x_mult = self.degree() - f.deg().unwrap();
        let mut out = vec![];
        if x_mult > 0 {
            out.push(((Rat::zero(), Rat::one()), x_mult));
        }
        let mut rem = f;
        for r in self.to_unipoly().squarefree_part().rational_roots() {
            let lin = UniPoly::new(vec![-r.clone(), Rat::one()]);
            let mut mult = 0;
            loop {
                let (q, rr) = rem.divrem(&lin);
                if rr.is_zero() {
                    rem = q;
                    mult += 1;
                } else {
                    break;
                }
            }
            out.push(((Rat::one(), r), mult));
        }
        if out.iter().map(|(_, m)| m).sum::<usize>() == self.degree() {
            Some(out)
        } else {
            None
        }
    }
}

impl<T: Ring + fmt::Debug> fmt::Debug for BinaryForm<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.degree;
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:?})", c)?;
            if d - i > 0 {
                write!(f, "x^{}", d - i)?;
            }
            if i > 0 {
                write!(f, "y^{}", i)?;
            }
        }
        if first {
            write!(f, "0[deg {}]", d)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rint};

    pub fn qf(c: &[i64]) -> QForm {
        BinaryForm::new(c.iter().map(|&x| rint(x)).collect())
    }

    fn x4() -> QForm {
        qf(&[1, 0, 0, 0, 0])
    }
    fn y4() -> QForm {
        qf(&[0, 0, 0, 0, 1])
    }

    #[test]
    fn transvectant_frozen_values() {
        // (x⁴, y⁴)₄ = 1 by direct term-by-term evaluation of the defining sum
        let t = transvectant(&x4(), &y4(), 4).unwrap();
        assert_eq!(t, qf(&[1]));
        // odd transvectant of a form with itself vanishes
        let f = qf(&[1, 0, 0, 0, 1]);
        assert!(transvectant(&f, &f, 3).unwrap().is_zero());
        // (x², y²)₂ = 1 and (xy, xy)₂ = -1/2 fix the pairing normalization
        let t = transvectant(&qf(&[1, 0, 0]), &qf(&[0, 0, 1]), 2).unwrap();
        assert_eq!(t, qf(&[1]));
        let xy = qf(&[0, 1, 0]);
        let t = transvectant(&xy, &xy, 2).unwrap();
        assert_eq!(t, BinaryForm::new(vec![rat(-1, 2)]));
        // (x⁴, y⁴)₃ = xy and (x⁴, x³y)₁ = x⁶/4, the two splitting components
        assert_eq!(transvectant(&x4(), &y4(), 3).unwrap(), qf(&[0, 1, 0]));
        let s1 = transvectant(&x4(), &qf(&[0, 1, 0, 0, 0]), 1).unwrap();
        assert_eq!(s1, BinaryForm::new(vec![rat(1, 4), rint(0), rint(0), rint(0), rint(0), rint(0), rint(0)]));
        assert!(transvectant(&x4(), &qf(&[0, 1, 0, 0, 0]), 3).unwrap().is_zero());
    }

    #[test]
    fn transvectant_range_error() {
        assert_eq!(
            transvectant(&qf(&[1, 0, 0]), &y4(), 3).unwrap_err(),
            FormError::TransvectantRange { l: 3, m: 2, n: 4 }
        );
    }

    #[test]
    fn act_identity_and_swap() {
        let id = Mobius::identity();
        assert_eq!(act(&id, &x4()), x4());
        let swap = Mobius::new(rint(0), rint(1), rint(1), rint(0)).unwrap();
        assert_eq!(act(&swap, &x4()), y4());
        assert!(Mobius::new(rint(1), rint(2), rint(2), rint(4)).is_err());
    }

    #[test]
    fn act_composes() {
        let g1 = Mobius::new(rint(1), rint(2), rint(0), rint(1)).unwrap();
        let g2 = Mobius::new(rint(3), rint(0), rint(1), rint(1)).unwrap();
        let f = qf(&[2, -1, 0, 3, 5]);
        let lhs = act(&g1, &act(&g2, &f));
        let rhs = act(&Mobius::compose(&g1, &g2), &f);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn combinant_rule_cases() {
        let f = qf(&[1, 2, 0, -1, 3]);
        let g = qf(&[0, 1, 1, 4, -2]);
        let (one, zero) = (rint(1), rint(0));
        assert!(combinant_determinant_check(&f, &g, &one, &zero, &zero, &one, 2).unwrap());
        let (a, b, c, d) = (rat(2, 3), rint(5), rat(-1, 7), rint(4));
        assert!(combinant_determinant_check(&f, &g, &a, &b, &c, &d, 2).unwrap());
        assert!(combinant_determinant_check(&f, &g, &a, &b, &c, &d, 1).unwrap());
        // determinant 0: left side collapses to the zero form
        let lhs = transvectant(&f.add(&g), &f.add(&g), 3).unwrap();
        assert!(lhs.is_zero());
    }

    #[test]
    fn square_root_detection() {
        let (q, c) = x4().square_root().unwrap();
        assert_eq!(q, qf(&[1, 0, 0]));
        assert_eq!(c, rint(1));
        let (q, c) = qf(&[0, 0, 1, 0, 0]).square_root().unwrap();
        assert_eq!(q, qf(&[0, 1, 0]));
        assert_eq!(c, rint(1));
        // (x² - 2y²)² has irrational double roots yet a rational square root
        let f = qf(&[1, 0, -4, 0, 4]);
        let (q, _) = f.square_root().unwrap();
        assert_eq!(q, qf(&[1, 0, -2]));
        assert!(qf(&[1, 0, 0, 0, 1]).square_root().is_none());
        assert!(qf(&[1, 1, 0, 0, 0]).square_root().is_none());
        let (q, c) = qf(&[3, 0, 0, 0, 0]).square_root().unwrap();
        assert_eq!(q, qf(&[1, 0, 0]));
        assert_eq!(c, rint(3));
    }

    #[test]
    fn repeated_roots_and_radical() {
        assert!(x4().has_repeated_root());
        assert!(!qf(&[0, 1, 0, 0, -1]).has_repeated_root()); // x³y - y⁴... roots 0,∞? x³y - y⁴ = y(x³-y³): distinct
        let r = radical(&x4());
        assert_eq!(r.normalize_projective(), qf(&[1, 0]));
    }

    #[test]
    fn projective_rational_roots() {
        // xy(x-y)(2y-x): roots 0, ∞, 1, 2 — the cross-ratio normal form
        let f = qf(&[0, -1, 3, -2, 0]);
        let roots = f.rational_roots_projective().unwrap();
        assert_eq!(roots.len(), 4);
        let f = qf(&[1, 0, 0, 0, 1]); // x⁴+y⁴: no rational roots
        assert!(f.rational_roots_projective().is_none());
    }
}
