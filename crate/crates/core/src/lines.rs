//! The line geometry of B as conic polarity on a projective plane.
//!
//! Lines on B form a P² (the projective space of binary quadrics); the
//! quadrics with a double root form the invariant conic Ω of special lines.
//! Two lines on B meet exactly when their classes are orthogonal for the
//! bilinear form of Ω, realized here as the second transvectant, whose
//! matrix in the (x², xy, y²) basis is
//!
//! ```text
//!         ⎡ 0    0   1 ⎤
//!   G  =  ⎢ 0  -1/2  0 ⎥        (q,q)₂ = 2·(q₀q₂ - q₁²/4)
//!         ⎣ 1    0   0 ⎦
//! ```
//!
//! so squares are isotropic. A line class [q] lifts to a flag
//! `⟨q²⟩ ⊂ W = ker (q²,·)₃` and to an actual line of P(Λ²V₄) inside B,
//! `{[q²∧β] : β ∈ W}`; through every point of B off the branch divisor pass
//! exactly three lines, cut out by the rank-drop cubic of its trisecant
//! pencil.

use crate::binary_form::{transvectant, BinaryForm, QForm};
use crate::exact_mat::{kernel_basis, rank, solve};
use crate::numeric::{form_roots_projective, null_vector, proj_dist};
use crate::scalar::{rat_to_cplx, Cplx, Field, Rat, Real, Ring};
use crate::wedge::{
    pencil_of, rank_drop_cubic, trisecant_pencil, wedge, Pencil, TrisecantKernel, Wedge2,
    WedgeError,
};
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LineError {
    #[error("line class must be a nonzero quadric")]
    ZeroClass,
    #[error("point is not on B")]
    NotOnB,
    #[error("wedge error: {0}")]
    Wedge(#[from] WedgeError),
    #[error("lines {0} and {1} are polar (the lines on B meet)")]
    PolarPair(usize, usize),
    #[error("squares span has dimension {0}, expected 3")]
    BadSpan(usize),
    #[error("rank-drop locus is degenerate at this point")]
    DegenerateFiber,
}

/// A point of the plane of lines: a nonzero binary quadric up to scale,
/// stored with first nonzero coefficient 1 (exact lane) or largest-modulus
/// coefficient 1 (numeric lane).
#[derive(Clone, Debug, PartialEq)]
pub struct LinePoint<T: Ring> {
    q: BinaryForm<T>,
}

impl<T: Field> LinePoint<T> {
    pub fn new(q: BinaryForm<T>) -> Result<Self, LineError> {
        if q.is_zero() {
            return Err(LineError::ZeroClass);
        }
        assert_eq!(q.degree(), 2);
        Ok(LinePoint {
            q: q.normalize_projective(),
        })
    }

    pub fn form(&self) -> &BinaryForm<T> {
        &self.q
    }

    pub fn coords(&self) -> [T; 3] {
        [
            self.q.coeff(0).clone(),
            self.q.coeff(1).clone(),
            self.q.coeff(2).clone(),
        ]
    }
}

impl<R: Real> LinePoint<Cplx<R>> {
    /// Numeric normalization: divide by the coefficient of largest modulus.
    pub fn new_numeric(q: BinaryForm<Cplx<R>>) -> Result<Self, LineError> {
        let mags: Vec<R> = q.coeffs().iter().map(|c| c.abs()).collect();
        let mut best = 0;
        for i in 1..3 {
            if mags[i] > mags[best] {
                best = i;
            }
        }
        // on ties prefer an exactly-unit coefficient, so renormalizing a
        // normalized class is the identity
        for i in 0..3 {
            if mags[i] == mags[best] && *q.coeff(i) == Cplx::one() {
                best = i;
                break;
            }
        }
        if mags[best].is_zero() {
            return Err(LineError::ZeroClass);
        }
        // divide by the pivot and pin it to exactly one (self-division
        // leaves rounding dust in the imaginary part), so renormalization
        // is a fixed point
        let pivot = *q.coeff(best);
        let mut coeffs: Vec<Cplx<R>> = q.coeffs().iter().map(|c| *c / pivot).collect();
        coeffs[best] = Cplx::one();
        Ok(LinePoint {
            q: BinaryForm::new(coeffs),
        })
    }

    pub fn to_vec(&self) -> Vec<Cplx<R>> {
        self.q.coeffs().to_vec()
    }
}

/// Embeds an exact line class in the numeric lane.
pub fn line_to_numeric<R: Real>(p: &LinePoint<Rat>) -> LinePoint<Cplx<R>> {
    LinePoint {
        q: p.q.map(rat_to_cplx),
    }
}

/// The polarity pairing `(p,q)₂`; zero iff the two lines on B intersect.
pub fn polar_pairing<T: Ring>(p: &BinaryForm<T>, q: &BinaryForm<T>) -> T {
    transvectant(p, q, 2).unwrap().coeff(0).clone()
}

/// Matrix of the pairing in the (x², xy, y²) basis.
pub fn omega_matrix<T: Ring>() -> [[T; 3]; 3] {
    let z = T::zero;
    [
        [z(), z(), T::one()],
        [z(), -T::one().div_int(2), z()],
        [T::one(), z(), z()],
    ]
}

/// Matrix of the dual conic (inverse of [`omega_matrix`] up to scale).
pub fn omega_dual_matrix<T: Ring>() -> [[T; 3]; 3] {
    let z = T::zero;
    [
        [z(), z(), T::one()],
        [z(), -T::from_int(2), z()],
        [T::one(), z(), z()],
    ]
}

/// Membership on the conic of special lines: self-pairing zero, which is
/// the same as having a double root.
pub fn on_omega(p: &LinePoint<Rat>) -> bool {
    polar_pairing(&p.q, &p.q).is_zero()
}

/// Flag model of a line: the square and the net it generates.
#[derive(Clone, Debug)]
pub struct Flag {
    pub alpha: QForm,
    pub w: [QForm; 3],
}

/// The flag `⟨q²⟩ ⊂ ker (q²,·)₃` of a line class.
pub fn flag_of_line(p: &LinePoint<Rat>) -> Flag {
    let alpha = p.q.mul(&p.q);
    match trisecant_pencil(&alpha).expect("square is nonzero") {
        TrisecantKernel::Cone(w) => {
            debug_assert!(w
                .iter()
                .all(|v| polar_pairing_33(&alpha, v).is_zero()));
            Flag { alpha, w }
        }
        TrisecantKernel::Pencil(_) => unreachable!("squares always span a net"),
    }
}

fn polar_pairing_33(a: &QForm, v: &QForm) -> QForm {
    transvectant(a, v, 3).unwrap()
}

/// Inverse of the flag construction: the third transvectant of a spanning
/// complement of α in W recovers the line class.
pub fn sigma3(flag: &Flag) -> Result<LinePoint<Rat>, LineError> {
    // pick two members of W independent of α
    let mut complement: Vec<&QForm> = vec![];
    for v in &flag.w {
        let mut rows = vec![flag.alpha.coeffs().to_vec()];
        rows.extend(complement.iter().map(|f| f.coeffs().to_vec()));
        rows.push(v.coeffs().to_vec());
        if rank(&rows) == rows.len() {
            complement.push(v);
        }
        if complement.len() == 2 {
            break;
        }
    }
    if complement.len() != 2 {
        return Err(LineError::BadSpan(2));
    }
    LinePoint::new(transvectant(complement[0], complement[1], 3).unwrap())
}

/// A line of P(Λ²V₄) contained in B, spanned by two wedge points.
#[derive(Clone, Debug)]
pub struct AmbientLine<T: Ring> {
    pub p0: Wedge2<T>,
    pub p1: Wedge2<T>,
}

impl<T: Ring> AmbientLine<T> {
    pub fn point_at(&self, s: &T, t: &T) -> Wedge2<T> {
        self.p0.scale(s).add(&self.p1.scale(t))
    }
}

/// The actual line on B corresponding to a line class: `{[q²∧β] : β ∈ W}`.
pub fn ambient_line(p: &LinePoint<Rat>) -> AmbientLine<Rat> {
    let flag = flag_of_line(p);
    // two independent wedges q²∧β as β runs through a complement of ⟨q²⟩
    let mut pts: Vec<Wedge2<Rat>> = vec![];
    for v in &flag.w {
        let w = wedge(&flag.alpha, v);
        if w.is_zero() {
            continue;
        }
        if pts.is_empty() {
            pts.push(w);
            continue;
        }
        let rows = vec![pts[0].coords.to_vec(), w.coords.to_vec()];
        if rank(&rows) == 2 {
            pts.push(w);
            break;
        }
    }
    assert_eq!(pts.len(), 2, "flag did not span an ambient line");
    AmbientLine {
        p0: pts[0].clone(),
        p1: pts[1].clone(),
    }
}

/// Exact incidence oracle: two lines of P(Λ²V₄) meet iff their four spanning
/// points stay in a rank-3 system.
pub fn ambient_lines_meet(a: &AmbientLine<Rat>, b: &AmbientLine<Rat>) -> bool {
    let rows = vec![
        a.p0.coords.to_vec(),
        a.p1.coords.to_vec(),
        b.p0.coords.to_vec(),
        b.p1.coords.to_vec(),
    ];
    rank(&rows) <= 3
}

/// Common point of two ambient lines, when they meet.
pub fn ambient_common_point(a: &AmbientLine<Rat>, b: &AmbientLine<Rat>) -> Option<Wedge2<Rat>> {
    let rows = vec![
        a.p0.coords.to_vec(),
        a.p1.coords.to_vec(),
        b.p0.coords.to_vec(),
        b.p1.coords.to_vec(),
    ];
    // kernel of the transpose combination: s·a0 + t·a1 - u·b0 - v·b1 = 0
    let cols: Vec<Vec<Rat>> = (0..10)
        .map(|k| {
            vec![
                rows[0][k].clone(),
                rows[1][k].clone(),
                -rows[2][k].clone(),
                -rows[3][k].clone(),
            ]
        })
        .collect();
    let ker = kernel_basis(&cols);
    let c = ker.first()?;
    let pt = a.p0.scale(&c[0]).add(&a.p1.scale(&c[1]));
    if pt.is_zero() {
        None
    } else {
        Some(pt)
    }
}

/// The polar line `{p : (p,q)₂ = 0}` of a line class, as a functional.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarLine<T> {
    pub l: [T; 3],
}

impl<T: Ring> PolarLine<T> {
    pub fn eval(&self, p: &[T; 3]) -> T {
        self.l[0].clone() * p[0].clone()
            + self.l[1].clone() * p[1].clone()
            + self.l[2].clone() * p[2].clone()
    }
}

/// `M(l)`: the one-dimensional part of the locus of lines meeting l is the
/// Ω-polar line of [l] (tangent to Ω exactly for special lines).
pub fn m_of_line<T: Field>(p: &LinePoint<T>) -> PolarLine<T> {
    let g = omega_matrix::<T>();
    let c = p.coords();
    PolarLine {
        l: std::array::from_fn(|i| {
            g[i][0].clone() * c[0].clone()
                + g[i][1].clone() * c[1].clone()
                + g[i][2].clone() * c[2].clone()
        }),
    }
}

/// Two spanning points of a polar line (exact).
pub fn polar_line_points(line: &PolarLine<Rat>) -> [LinePoint<Rat>; 2] {
    let ker = kernel_basis(&[line.l.to_vec()]);
    assert_eq!(ker.len(), 2);
    [
        LinePoint::new(BinaryForm::new(ker[0].clone())).unwrap(),
        LinePoint::new(BinaryForm::new(ker[1].clone())).unwrap(),
    ]
}

/// Intersection point of two polar lines.
pub fn polar_lines_cross(a: &PolarLine<Rat>, b: &PolarLine<Rat>) -> Result<LinePoint<Rat>, LineError> {
    let c = crate::exact_mat::cross3(&a.l, &b.l);
    LinePoint::new(BinaryForm::new(c.to_vec()))
}

/// The trisecant pencil and rank-drop cubic of a point of B.
pub fn fiber_cubic(b: &Wedge2<Rat>) -> Result<(Pencil<Rat>, QForm), LineError> {
    if !crate::wedge::on_b(b)? {
        return Err(LineError::NotOnB);
    }
    let pencil = pencil_of(b)?;
    let cubic = rank_drop_cubic(&pencil).map_err(|_| LineError::DegenerateFiber)?;
    Ok((pencil, cubic))
}

/// The three lines through a point of B, when the fiber cubic splits over
/// the rationals; `None` if it does not (use the numeric variant then).
/// Entries carry multiplicities (a double line means the point is on the
/// branch divisor).
pub fn lines_through_point_exact(
    b: &Wedge2<Rat>,
) -> Result<Option<Vec<(LinePoint<Rat>, usize)>>, LineError> {
    let (pencil, cubic) = fiber_cubic(b)?;
    let Some(roots) = cubic.rational_roots_projective() else {
        return Ok(None);
    };
    let mut out = vec![];
    for ((s, t), mult) in roots {
        let alpha = pencil.a.scale(&s).add(&pencil.b.scale(&t));
        let q = crate::wedge::square_root_on_cone(&alpha).ok_or(LineError::DegenerateFiber)?;
        out.push((LinePoint::new(q)?, mult));
    }
    Ok(Some(out))
}

/// The three lines through a point of B, numerically (complex scalars).
pub fn lines_through_point_numeric<R: Real>(
    b: &Wedge2<Rat>,
) -> Result<Vec<LinePoint<Cplx<R>>>, LineError> {
    let (pencil, cubic) = fiber_cubic(b)?;
    let coeffs: Vec<Cplx<R>> = cubic.coeffs().iter().map(rat_to_cplx).collect();
    let roots = form_roots_projective(&coeffs, 1e-13);
    let pa = pencil.a.map(rat_to_cplx::<R>);
    let pb = pencil.b.map(rat_to_cplx::<R>);
    let mut out = vec![];
    for (s, t) in roots {
        let alpha = pa.scale(&s).add(&pb.scale(&t));
        let (q, _resid) = quartic_sqrt_numeric(&alpha).ok_or(LineError::DegenerateFiber)?;
        out.push(LinePoint::new_numeric(q)?);
    }
    Ok(out)
}

/// Numeric square root of a (near-)square quartic, with the relative
/// residual of the reconstruction.
pub fn quartic_sqrt_numeric<R: Real>(
    f: &BinaryForm<Cplx<R>>,
) -> Option<(BinaryForm<Cplx<R>>, R)> {
    let c: Vec<Cplx<R>> = f.coeffs().to_vec();
    let norms: Vec<R> = c.iter().map(|z| z.abs()).collect();
    let scale = norms.iter().fold(R::zero(), |m, &x| m.maxv(x));
    if scale.is_zero() {
        return None;
    }
    let two = Cplx::<R>::from_f64s(2.0, 0.0);
    // three charts: anchor at x⁴, y⁴ or the middle coefficient
    let candidates = [0usize, 4, 2];
    let mut best: Option<(BinaryForm<Cplx<R>>, R)> = None;
    for &anchor in &candidates {
        if norms[anchor] < scale * R::from_f64(1e-3) && best.is_some() {
            continue;
        }
        let q = match anchor {
            0 => {
                let a = c[0].sqrt();
                if a.abs().is_zero() {
                    continue;
                }
                let b = c[1] / (two * a);
                let cc = (c[2] - b * b) / (two * a);
                BinaryForm::new(vec![a, b, cc])
            }
            4 => {
                let cc = c[4].sqrt();
                if cc.abs().is_zero() {
                    continue;
                }
                let b = c[3] / (two * cc);
                let a = (c[2] - b * b) / (two * cc);
                BinaryForm::new(vec![a, b, cc])
            }
            _ => {
                let b = c[2].sqrt();
                if b.abs().is_zero() {
                    continue;
                }
                let a = c[1] / (two * b);
                let cc = c[3] / (two * b);
                BinaryForm::new(vec![a, b, cc])
            }
        };
        let sq = q.mul(&q);
        let mut err = R::zero();
        for i in 0..5 {
            err = err.maxv((*sq.coeff(i) - c[i]).abs());
        }
        let resid = err / scale;
        match &best {
            Some((_, r)) if *r <= resid => {}
            _ => best = Some((q, resid)),
        }
    }
    best
}

/// Membership of a wedge point on an ambient line, numerically.
pub fn wedge_on_ambient_line_numeric<R: Real>(
    b: &[Cplx<R>; 10],
    line: &AmbientLine<Rat>,
) -> R {
    let rows: Vec<Vec<Cplx<R>>> = vec![
        line.p0.coords.iter().map(rat_to_cplx).collect(),
        line.p1.coords.iter().map(rat_to_cplx).collect(),
        b.to_vec(),
    ];
    // distance of b from the span of (p0, p1): smallest σ of the transpose
    let cols: Vec<Vec<Cplx<R>>> = (0..10)
        .map(|k| (0..3).map(|r| rows[r][k]).collect())
        .collect();
    let (_, ratio) = null_vector(&cols);
    ratio
}

/// Solves the sum-of-three-squares certificate: scalars c with
/// `c₁H₁² + c₂H₂² + c₃H₃² = dual conic`, H_i the coordinate vectors of the
/// three line classes. Returns the coefficients and the residual.
pub fn vsp_certificate_numeric<R: Real>(
    triple: &[LinePoint<Cplx<R>>; 3],
) -> (Option<[Cplx<R>; 3]>, R) {
    let dual = omega_dual_matrix::<Rat>();
    // 6 equations (upper triangle), 3 unknowns
    let mut rows: Vec<Vec<Cplx<R>>> = vec![];
    let mut rhs: Vec<Cplx<R>> = vec![];
    for i in 0..3 {
        for j in i..3 {
            let row: Vec<Cplx<R>> = triple
                .iter()
                .map(|h| {
                    let v = h.coords();
                    v[i] * v[j]
                })
                .collect();
            rows.push(row);
            rhs.push(rat_to_cplx(&dual[i][j]));
        }
    }
    match crate::numeric::lstsq(&rows, &rhs) {
        None => (None, R::one()),
        Some(c) => {
            let mut err = R::zero();
            let mut scale = R::zero();
            for (row, b) in rows.iter().zip(&rhs) {
                let got = row
                    .iter()
                    .zip(&c)
                    .fold(Cplx::<R>::zero(), |acc, (a, x)| acc + *a * *x);
                err = err.maxv((got - *b).abs());
                scale = scale.maxv(b.abs()).maxv(got.abs());
            }
            let resid = err / scale.maxv(R::one());
            (Some([c[0], c[1], c[2]]), resid)
        }
    }
}

/// Exact sum-of-three-squares certificate for a rational triple.
pub fn vsp_certificate_exact(triple: &[LinePoint<Rat>; 3]) -> Option<[Rat; 3]> {
    let dual = omega_dual_matrix::<Rat>();
    let mut rows = vec![];
    let mut rhs = vec![];
    for i in 0..3 {
        for j in i..3 {
            rows.push(
                triple
                    .iter()
                    .map(|h| {
                        let v = h.coords();
                        &v[i] * &v[j]
                    })
                    .collect::<Vec<_>>(),
            );
            rhs.push(dual[i][j].clone());
        }
    }
    let sol = solve(&rows, &rhs)?;
    // solve() ignores residuals on underdetermined rows; verify for real
    for (row, b) in rows.iter().zip(&rhs) {
        let got: Rat = row.iter().zip(&sol).map(|(a, x)| a * x).sum();
        if &got != b {
            return None;
        }
    }
    Some([sol[0].clone(), sol[1].clone(), sol[2].clone()])
}

/// Common polarized-section plane of four pairwise disjoint lines: the span
/// of their squares when it is 3-dimensional.
pub fn plane_from_lines(qs: &[LinePoint<Rat>; 4]) -> Result<[QForm; 3], LineError> {
    for i in 0..4 {
        for j in (i + 1)..4 {
            if polar_pairing(&qs[i].q, &qs[j].q).is_zero() {
                return Err(LineError::PolarPair(i, j));
            }
        }
    }
    let squares: Vec<QForm> = qs.iter().map(|p| p.q.mul(&p.q)).collect();
    let rows: Vec<Vec<Rat>> = squares.iter().map(|f| f.coeffs().to_vec()).collect();
    let r = rank(&rows);
    if r != 3 {
        return Err(LineError::BadSpan(r));
    }
    // pick three independent squares as the basis
    let mut picked: Vec<usize> = vec![];
    for i in 0..4 {
        let mut trial: Vec<Vec<Rat>> = picked.iter().map(|&k| rows[k].clone()).collect();
        trial.push(rows[i].clone());
        if rank(&trial) == trial.len() {
            picked.push(i);
        }
        if picked.len() == 3 {
            break;
        }
    }
    Ok([
        squares[picked[0]].clone(),
        squares[picked[1]].clone(),
        squares[picked[2]].clone(),
    ])
}

/// Chordal distance between two numeric line classes.
pub fn line_dist<R: Real>(a: &LinePoint<Cplx<R>>, b: &LinePoint<Cplx<R>>) -> R {
    proj_dist(&a.to_vec(), &b.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rint, C64};

    fn qf(c: &[i64]) -> QForm {
        BinaryForm::new(c.iter().map(|&x| rint(x)).collect())
    }
    fn lp(c: &[i64; 3]) -> LinePoint<Rat> {
        LinePoint::new(qf(&c[..])).unwrap()
    }

    #[test]
    fn pairing_frozen_values() {
        let x2 = lp(&[1, 0, 0]);
        let y2 = lp(&[0, 0, 1]);
        let xy = lp(&[0, 1, 0]);
        assert!(polar_pairing(x2.form(), x2.form()).is_zero());
        assert_eq!(polar_pairing(x2.form(), y2.form()), rint(1));
        assert_eq!(polar_pairing(xy.form(), xy.form()), rat(-1, 2));
        // matrix of the pairing matches the transvectant
        let g = omega_matrix::<Rat>();
        for (i, a) in [x2.clone(), xy.clone(), y2.clone()].iter().enumerate() {
            for (j, b) in [x2.clone(), xy.clone(), y2.clone()].iter().enumerate() {
                assert_eq!(polar_pairing(a.form(), b.form()), g[i][j]);
            }
        }
    }

    #[test]
    fn omega_membership() {
        assert!(on_omega(&lp(&[1, 0, 0])));
        assert!(!on_omega(&lp(&[0, 1, 0])));
        assert!(on_omega(&lp(&[1, 2, 1]))); // (x+y)²
        assert!(!on_omega(&lp(&[1, 0, 1])));
    }

    #[test]
    fn flag_and_sigma3_roundtrip() {
        let q = lp(&[1, 0, 0]);
        let flag = flag_of_line(&q);
        assert_eq!(flag.alpha, qf(&[1, 0, 0, 0, 0]));
        // W contains x⁴ and x³y
        let rows: Vec<Vec<Rat>> = flag.w.iter().map(|f| f.coeffs().to_vec()).collect();
        let mut with = rows.clone();
        with.push(qf(&[0, 1, 0, 0, 0]).coeffs().to_vec());
        assert_eq!(rank(&with), 3);
        assert_eq!(sigma3(&flag).unwrap(), q);
        // random classes round-trip too
        for c in [[2i64, 3, -1], [1, -4, 2], [5, 1, 1], [0, 2, -7]] {
            let p = lp(&c);
            assert_eq!(sigma3(&flag_of_line(&p)).unwrap(), p);
        }
    }

    #[test]
    fn ambient_lines_and_incidence() {
        // five sampled points of the ambient line of [x²] are on B
        let line = ambient_line(&lp(&[1, 0, 0]));
        for k in 0..5i64 {
            let pt = line.point_at(&rint(1), &rint(k));
            assert!(crate::wedge::on_b(&pt).unwrap());
        }
        // polarity ⟺ ambient incidence on a frozen sample
        let pairs: [([i64; 3], [i64; 3]); 4] = [
            ([1, 0, 0], [0, 1, 0]), // polar (pairing 0)
            ([1, 0, 0], [0, 0, 1]), // pairing 1
            ([1, 1, 1], [1, 2, 1]), // ?
            ([2, -1, 3], [1, 4, 1]),
        ];
        for (a, b) in pairs {
            let (pa, pb) = (lp(&a), lp(&b));
            let polar = polar_pairing(pa.form(), pb.form()).is_zero();
            let meet = ambient_lines_meet(&ambient_line(&pa), &ambient_line(&pb));
            assert_eq!(polar, meet, "mismatch at {:?} {:?}", a, b);
            if meet {
                let common = ambient_common_point(&ambient_line(&pa), &ambient_line(&pb));
                assert!(crate::wedge::on_b(&common.unwrap()).unwrap());
            }
        }
    }

    #[test]
    fn polar_line_structure() {
        // non-special: [q] not on its own polar line
        let q = lp(&[1, 0, 1]);
        let ml = m_of_line(&q);
        assert!(!ml.eval(&q.coords()).is_zero());
        // special: polar line is tangent to Ω at [q]
        let s = lp(&[1, 0, 0]);
        let ml = m_of_line(&s);
        assert!(ml.eval(&s.coords()).is_zero());
        let pts = polar_line_points(&ml);
        // restrict Ω to the line: Gram matrix of the two spanning points
        let g00 = polar_pairing(pts[0].form(), pts[0].form());
        let g01 = polar_pairing(pts[0].form(), pts[1].form());
        let g11 = polar_pairing(pts[1].form(), pts[1].form());
        assert!((g00 * g11 - g01.clone() * g01).is_zero(), "tangency");
        // symmetry: p ∈ M(q) ⟺ q ∈ M(p)
        let a = lp(&[3, 1, -2]);
        let b = lp(&[1, 5, 2]);
        assert_eq!(
            m_of_line(&a).eval(&b.coords()).is_zero(),
            m_of_line(&b).eval(&a.coords()).is_zero()
        );
    }

    #[test]
    fn triple_fiber_exact_rational_case() {
        // the pencil of (x⁴+y⁴)∧x²y² carries lines [x²+y²], [x²-y²], [xy]
        let b = wedge(&qf(&[1, 0, 0, 0, 1]), &qf(&[0, 0, 1, 0, 0]));
        let lines = lines_through_point_exact(&b).unwrap().unwrap();
        assert_eq!(lines.len(), 3);
        let got: Vec<_> = lines.iter().map(|(p, m)| (p.clone(), *m)).collect();
        for expect in [[1i64, 0, 1], [1, 0, -1], [0, 1, 0]] {
            assert!(got.iter().any(|(p, m)| *m == 1 && *p == lp(&expect)));
        }
        // pairwise polar
        for i in 0..3 {
            for j in (i + 1)..3 {
                assert!(polar_pairing(got[i].0.form(), got[j].0.form()).is_zero());
            }
        }
        // VSP certificate: ½H₁² - ½H₂² - 2H₃² with H = (x²+y², x²-y², xy)
        let triple = [lp(&[1, 0, 1]), lp(&[1, 0, -1]), lp(&[0, 1, 0])];
        let c = vsp_certificate_exact(&triple).unwrap();
        assert_eq!(c, [rat(1, 2), rat(-1, 2), rint(-2)]);
    }

    #[test]
    fn branch_point_has_double_special_line() {
        // x⁴∧x²y² is on the branch divisor: [x²] twice, [xy] once
        let b = wedge(&qf(&[1, 0, 0, 0, 0]), &qf(&[0, 0, 1, 0, 0]));
        let lines = lines_through_point_exact(&b).unwrap().unwrap();
        let mut with_mult: Vec<(LinePoint<Rat>, usize)> = lines;
        with_mult.sort_by_key(|(_, m)| *m);
        assert_eq!(with_mult.len(), 2);
        assert_eq!(with_mult[0], (lp(&[0, 1, 0]), 1));
        assert_eq!(with_mult[1], (lp(&[1, 0, 0]), 2));
        assert!(on_omega(&with_mult[1].0));
    }

    #[test]
    fn triple_fiber_numeric_matches_exact() {
        let b = wedge(&qf(&[1, 0, 0, 0, 1]), &qf(&[0, 0, 1, 0, 0]));
        let numeric = lines_through_point_numeric::<f64>(&b).unwrap();
        assert_eq!(numeric.len(), 3);
        for expect in [[1i64, 0, 1], [1, 0, -1], [0, 1, 0]] {
            let e = line_to_numeric::<f64>(&lp(&expect));
            assert!(numeric.iter().any(|p| line_dist(p, &e) < 1e-10));
        }
        // numeric VSP certificate agrees
        let triple: [LinePoint<C64>; 3] =
            [numeric[0].clone(), numeric[1].clone(), numeric[2].clone()];
        let (c, resid) = vsp_certificate_numeric(&triple);
        assert!(c.is_some());
        assert!(resid < 1e-12);
    }

    #[test]
    fn numeric_square_root() {
        let q = qf(&[2, -3, 5]).map(|c| rat_to_cplx::<f64>(c));
        let f = q.mul(&q);
        let (r, resid) = quartic_sqrt_numeric(&f).unwrap();
        assert!(resid < 1e-14);
        let rn = LinePoint::new_numeric(r).unwrap();
        let qn = LinePoint::new_numeric(q).unwrap();
        assert!(line_dist(&rn, &qn) < 1e-14);
        // non-squares are flagged by the residual
        let (_, resid) = quartic_sqrt_numeric(
            &qf(&[1, 0, 0, 0, 1]).map(|c| rat_to_cplx::<f64>(c)),
        )
        .unwrap();
        assert!(resid > 1e-2);
    }

    #[test]
    fn plane_from_lines_checks() {
        // quadruple with a polar pair is rejected: [x²],[xy] are polar
        let bad = [lp(&[1, 0, 0]), lp(&[0, 1, 0]), lp(&[0, 0, 1]), lp(&[1, 1, 1])];
        assert_eq!(
            plane_from_lines(&bad).unwrap_err(),
            LineError::PolarPair(0, 1)
        );
        // pairwise non-polar quadruple with a 4-dimensional square span
        let wide = [
            lp(&[1, 0, 1]),
            lp(&[1, 0, 2]),
            lp(&[1, 0, 3]),
            lp(&[1, 1, 1]),
        ];
        assert_eq!(plane_from_lines(&wide).unwrap_err(), LineError::BadSpan(4));
        // the known four-point section closes up
        let good = [lp(&[1, 0, 0]), lp(&[0, 0, 1]), lp(&[1, 1, 1]), lp(&[1, 2, 1])];
        let k = plane_from_lines(&good).unwrap();
        let rows: Vec<Vec<Rat>> = k.iter().map(|f| f.coeffs().to_vec()).collect();
        assert_eq!(rank(&rows), 3);
        // all four squares lie in the span
        for p in &good {
            let mut with = rows.clone();
            with.push(p.form().mul(p.form()).coeffs().to_vec());
            assert_eq!(rank(&with), 3);
        }
    }
}
