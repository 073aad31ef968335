//! Λ²V₄ with its Plücker structure.
//!
//! Points of the Grassmannian G(2,V₄) sit inside P(Λ²V₄) as decomposable
//! classes (the five Plücker quadrics `ω∧ω = 0`). The splitting
//! Λ²V₄ ≅ V₆ ⊕ V₂ is realized on decomposables by the first and third
//! transvectants; the threefold B is the locus where the V₂ component dies.
//! A quartic [F] off the cone of squares determines the pencil
//! `ker (F,·)₃` — the unique trisecant of the projected Veronese surface
//! through [F] — and that kernel jumps to rank 3 exactly on the cone.

use crate::binary_form::{transvectant, BinaryForm, QForm};
use crate::exact_mat::{kernel_basis, rank};
use crate::scalar::{Field, Rat, Ring};
use num_traits::{One, Zero};
use thiserror::Error;

/// Index pairs for the Λ² basis e_i∧e_j, lexicographic.
pub const PAIRS: [(usize, usize); 10] = [
    (0, 1),
    (0, 2),
    (0, 3),
    (0, 4),
    (1, 2),
    (1, 3),
    (1, 4),
    (2, 3),
    (2, 4),
    (3, 4),
];

pub fn pair_index(i: usize, j: usize) -> usize {
    PAIRS.iter().position(|&p| p == (i, j)).expect("bad pair")
}

#[derive(Debug, Error, PartialEq)]
pub enum WedgeError {
    #[error("operation requires a nonzero element")]
    Zero,
    #[error("basis must span a subspace of dimension {expected}, found {found}")]
    BadDimension { expected: usize, found: usize },
    #[error("element is not decomposable")]
    NotDecomposable,
    #[error("point does not lie on B (nonzero V₂ component)")]
    NotOnB,
    #[error("trisecant kernel has unexpected dimension {0}")]
    KernelDimension(usize),
}

/// Element of Λ²V₄ in Plücker coordinates over the pair basis.
#[derive(Clone, PartialEq, Debug)]
pub struct Wedge2<T> {
    pub coords: [T; 10],
}

/// Two independent quartics spanning a pencil (a line in P(V₄)).
#[derive(Clone, Debug)]
pub struct Pencil<T: Ring> {
    pub a: BinaryForm<T>,
    pub b: BinaryForm<T>,
}

impl<T: Ring> Wedge2<T> {
    pub fn zero() -> Self {
        Wedge2 {
            coords: std::array::from_fn(|_| T::zero()),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        Wedge2 {
            coords: std::array::from_fn(|k| self.coords[k].clone() + o.coords[k].clone()),
        }
    }

    pub fn scale(&self, s: &T) -> Self {
        Wedge2 {
            coords: std::array::from_fn(|k| self.coords[k].clone() * s.clone()),
        }
    }

    pub fn neg(&self) -> Self {
        Wedge2 {
            coords: std::array::from_fn(|k| -self.coords[k].clone()),
        }
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&T) -> S) -> Wedge2<S> {
        Wedge2 {
            coords: std::array::from_fn(|k| f(&self.coords[k])),
        }
    }

    /// The five Λ⁴ coordinates of ω∧ω (Plücker expressions).
    pub fn pluecker(&self) -> [T; 5] {
        let c = |i: usize, j: usize| self.coords[pair_index(i, j)].clone();
        let quad = |a: usize, b: usize, cc: usize, d: usize| {
            c(a, b) * c(cc, d) - c(a, cc) * c(b, d) + c(a, d) * c(b, cc)
        };
        [
            quad(0, 1, 2, 3),
            quad(0, 1, 2, 4),
            quad(0, 1, 3, 4),
            quad(0, 2, 3, 4),
            quad(1, 2, 3, 4),
        ]
    }
}

/// Antisymmetric wedge of two quartics.
pub fn wedge<T: Ring>(f: &BinaryForm<T>, g: &BinaryForm<T>) -> Wedge2<T> {
    assert_eq!(f.degree(), 4);
    assert_eq!(g.degree(), 4);
    Wedge2 {
        coords: std::array::from_fn(|k| {
            let (i, j) = PAIRS[k];
            f.coeff(i).clone() * g.coeff(j).clone() - f.coeff(j).clone() * g.coeff(i).clone()
        }),
    }
}

/// Decomposability test: ω = α∧β iff ω∧ω = 0.
pub fn is_decomposable<T: Ring>(w: &Wedge2<T>) -> Result<bool, WedgeError> {
    if w.is_zero() {
        return Err(WedgeError::Zero);
    }
    Ok(w.pluecker().iter().all(|p| p.is_zero()))
}

/// The two splitting components (V₆, V₂); linear in ω, and on decomposables
/// `split(F∧G) = ((F,G)₁, (F,G)₃)`.
pub fn split<T: Ring>(w: &Wedge2<T>) -> (BinaryForm<T>, BinaryForm<T>) {
    let mut s1 = BinaryForm::zero_of_degree(6);
    let mut s3 = BinaryForm::zero_of_degree(2);
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        if w.coords[k].is_zero() {
            continue;
        }
        let ei = BinaryForm::<T>::monomial(4, i);
        let ej = BinaryForm::<T>::monomial(4, j);
        s1 = s1.add(&transvectant(&ei, &ej, 1).unwrap().scale(&w.coords[k]));
        s3 = s3.add(&transvectant(&ei, &ej, 3).unwrap().scale(&w.coords[k]));
    }
    (s1, s3)
}

/// Membership in B: decomposable with vanishing V₂ component.
pub fn on_b<T: Ring>(w: &Wedge2<T>) -> Result<bool, WedgeError> {
    Ok(is_decomposable(w)? && split(w).1.is_zero())
}

/// Square root on the cone over the projected Veronese surface: the
/// projective q with q² ∝ F, when F is a square.
pub fn square_root_on_cone(f: &QForm) -> Option<QForm> {
    if f.is_zero() {
        return None;
    }
    f.square_root().map(|(q, _)| q)
}

/// Result of the trisecant-kernel computation at a quartic.
#[derive(Clone, Debug)]
pub enum TrisecantKernel<T: Ring> {
    /// Generic case: a pencil (containing the input quartic).
    Pencil(Pencil<T>),
    /// Cone case (the quartic is a square): a net, dimension 3.
    Cone([BinaryForm<T>; 3]),
}

/// 3×5 matrix of the map `v ↦ (F,v)₃ : V₄ → V₂` (rows over the V₂ basis).
pub fn third_transvectant_matrix<T: Ring>(f: &BinaryForm<T>) -> Vec<Vec<T>> {
    let mut m = vec![vec![T::zero(); 5]; 3];
    for j in 0..5 {
        let t = transvectant(f, &BinaryForm::<T>::monomial(4, j), 3).unwrap();
        for (r, row) in m.iter_mut().enumerate() {
            row[j] = t.coeff(r).clone();
        }
    }
    m
}

/// The kernel of `(F,·)₃`: the unique trisecant pencil through [F] off the
/// cone, a net exactly when F is a square.
pub fn trisecant_pencil(f: &QForm) -> Result<TrisecantKernel<Rat>, WedgeError> {
    if f.is_zero() {
        return Err(WedgeError::Zero);
    }
    let m = third_transvectant_matrix(f);
    let ker = kernel_basis(&m);
    match ker.len() {
        2 => {
            // rebase so the pencil visibly contains F
            let k0 = BinaryForm::new(ker[0].clone());
            let k1 = BinaryForm::new(ker[1].clone());
            let w = if rank(&[f.coeffs().to_vec(), ker[0].clone()]) == 2 {
                k0
            } else {
                k1
            };
            Ok(TrisecantKernel::Pencil(Pencil { a: f.clone(), b: w }))
        }
        3 => Ok(TrisecantKernel::Cone([
            BinaryForm::new(ker[0].clone()),
            BinaryForm::new(ker[1].clone()),
            BinaryForm::new(ker[2].clone()),
        ])),
        d => Err(WedgeError::KernelDimension(d)),
    }
}

/// The point of B determined by a quartic off the cone.
pub fn b_from_point(f: &QForm) -> Result<Wedge2<Rat>, WedgeError> {
    match trisecant_pencil(f)? {
        TrisecantKernel::Pencil(p) => Ok(wedge(&p.a, &p.b)),
        TrisecantKernel::Cone(_) => Err(WedgeError::KernelDimension(3)),
    }
}

/// Rank-drop form of a pencil: the binary cubic in (s,t) whose roots are the
/// squares `s·a + t·b` in the pencil, extracted as the gcd of the ten 3×3
/// minors of the interpolated matrix `s·M_a + t·M_b`.
pub fn rank_drop_cubic(p: &Pencil<Rat>) -> Result<QForm, WedgeError> {
    let minors = pencil_minors(p);
    let mut g: Option<QForm> = None;
    for m in minors {
        if m.is_zero() {
            continue;
        }
        g = Some(match g {
            None => m,
            Some(prev) => prev.form_gcd(&m),
        });
        if g.as_ref().map(|f| f.degree()) == Some(0) {
            break;
        }
    }
    match g {
        Some(c) if c.degree() == 3 => Ok(c.normalize_projective()),
        Some(_) | None => Err(WedgeError::KernelDimension(3)),
    }
}

/// The ten 3×3 minors of `s·M_a + t·M_b` as binary cubics in (s,t).
pub fn pencil_minors<T: Ring>(p: &Pencil<T>) -> Vec<BinaryForm<T>> {
    let ma = third_transvectant_matrix(&p.a);
    let mb = third_transvectant_matrix(&p.b);
    // entries as degree-1 forms in (s,t)
    let entry = |r: usize, c: usize| BinaryForm::new(vec![ma[r][c].clone(), mb[r][c].clone()]);
    let mut out = Vec::with_capacity(10);
    for c0 in 0..5usize {
        for c1 in (c0 + 1)..5 {
            for c2 in (c1 + 1)..5 {
                let cols = [c0, c1, c2];
                let e = |r: usize, c: usize| entry(r, cols[c]);
                let mut det = BinaryForm::zero_of_degree(3);
                det = det.add(&e(0, 0).mul(&e(1, 1).mul(&e(2, 2)).sub(&e(1, 2).mul(&e(2, 1)))));
                det = det.sub(&e(0, 1).mul(&e(1, 0).mul(&e(2, 2)).sub(&e(1, 2).mul(&e(2, 0)))));
                det = det.add(&e(0, 2).mul(&e(1, 0).mul(&e(2, 1)).sub(&e(1, 1).mul(&e(2, 0)))));
                out.push(det);
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Plane sections of the cone: K ∩ (squares), the open-stratum condition.
// ---------------------------------------------------------------------------

/// Intersection of a plane K ⊂ P(V₄) with the surface of squares.
#[derive(Clone, Debug, PartialEq)]
pub enum PlaneSection {
    /// K contains a curve of squares.
    Degenerate,
    /// Finitely many square classes; 4 distinct ⟺ K is in the open stratum.
    Finite {
        distinct: usize,
        rational: Vec<QForm>,
    },
}

/// Symmetric 3×3 matrix (Hankel in the functional's coefficients) of the
/// conic `ℓ(q²) = 0` on the (a:b:c) plane of quadrics q = ax²+bxy+cy².
fn square_conic(l: &[Rat]) -> [[Rat; 3]; 3] {
    [
        [l[0].clone(), l[1].clone(), l[2].clone()],
        [l[1].clone(), l[2].clone(), l[3].clone()],
        [l[2].clone(), l[3].clone(), l[4].clone()],
    ]
}

fn conic_apply(m: &[[Rat; 3]; 3], u: &[Rat; 3], v: &[Rat; 3]) -> Rat {
    let mut acc = Rat::zero();
    for i in 0..3 {
        for j in 0..3 {
            acc += &m[i][j] * &u[i] * &v[j];
        }
    }
    acc
}

/// All q with q² in the span of `basis` (a 3-dimensional subspace of V₄).
///
/// Exact elimination: the two annihilator functionals of K cut two conics on
/// the plane of quadrics; their intersection is computed through a resultant
/// after a unimodular chart change making both conics monic in the last
/// coordinate. The count of distinct classes is certified (radical degree of
/// the resultant); representatives are returned exactly when rational.
pub fn veronese_plane_section(basis: &[QForm; 3]) -> Result<PlaneSection, WedgeError> {
    let rows: Vec<Vec<Rat>> = basis.iter().map(|f| f.coeffs().to_vec()).collect();
    let r = rank(&rows);
    if r != 3 {
        return Err(WedgeError::BadDimension {
            expected: 3,
            found: r,
        });
    }
    let ann = kernel_basis(&rows);
    debug_assert_eq!(ann.len(), 2);
    let m1 = square_conic(&ann[0]);
    let m2 = square_conic(&ann[1]);

    // identity chart plus a few fixed unimodular mixes
    let charts: [[[i64; 3]; 3]; 5] = [
        [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
        [[1, 0, 1], [0, 1, 0], [1, 0, 2]],
        [[1, 1, 1], [0, 1, 1], [0, 0, 1]],
        [[2, 0, 1], [1, 1, 0], [0, 1, 1]],
        [[1, 2, 0], [0, 1, 3], [1, 0, 1]],
    ];

    let mut best: Option<(usize, Vec<QForm>)> = None;
    for ch in &charts {
        let u: [[Rat; 3]; 3] =
            std::array::from_fn(|i| std::array::from_fn(|j| Rat::from_integer(ch[i][j].into())));
        let col = |j: usize| -> [Rat; 3] { std::array::from_fn(|i| u[i][j].clone()) };
        let tr = |m: &[[Rat; 3]; 3]| -> [[Rat; 3]; 3] {
            std::array::from_fn(|i| std::array::from_fn(|j| conic_apply(m, &col(i), &col(j))))
        };
        let (n1, n2) = (tr(&m1), tr(&m2));
        if n1[2][2].is_zero() || n2[2][2].is_zero() {
            continue;
        }
        // write n(x0,x1,c) = α c² + β(x0,x1) c + γ(x0,x1)
        let decomp = |n: &[[Rat; 3]; 3]| {
            let alpha = n[2][2].clone();
            let beta = BinaryForm::new(vec![
                &n[0][2] * Rat::from_integer(2.into()),
                &n[1][2] * Rat::from_integer(2.into()),
            ]);
            let gamma = BinaryForm::new(vec![
                n[0][0].clone(),
                &n[0][1] * Rat::from_integer(2.into()),
                n[1][1].clone(),
            ]);
            (alpha, beta, gamma)
        };
        let (a1, b1, g1) = decomp(&n1);
        let (a2, b2, g2) = decomp(&n2);
        // resultant of two quadratics in c with constant nonzero leads:
        // (a1·g2 - a2·g1)² - (a1·b2 - a2·b1)(b1·g2 - b2·g1), a binary quartic
        let ac = g2.scale(&a1).sub(&g1.scale(&a2));
        let ab = b2.scale(&a1).sub(&b1.scale(&a2));
        let bc = b1.mul(&g2).sub(&b2.mul(&g1));
        let res = ac.mul(&ac).sub(&ab.mul(&bc));
        if res.is_zero() {
            return Ok(PlaneSection::Degenerate);
        }
        let distinct = crate::binary_form::radical(&res).degree();
        // rational points: for each rational root of the resultant, the
        // common root in c of the two specialized quadratics
        let mut rational = vec![];
        for (x0, x1) in rational_projective_roots_partial(&res) {
            let q1c = specialize_c(&a1, &b1, &g1, &x0, &x1);
            let q2c = specialize_c(&a2, &b2, &g2, &x0, &x1);
            let g = q1c.gcd(&q2c);
            if g.deg() == Some(1) {
                let c = -g.coeff(0) / g.coeff(1);
                // undo the chart: quadric coordinates are U·(x0,x1,c)
                let v = [x0, x1, c];
                let q: [Rat; 3] =
                    std::array::from_fn(|i| (0..3).map(|j| &u[i][j] * &v[j]).sum());
                let qf = BinaryForm::new(q.to_vec()).normalize_projective();
                let sq = qf.mul(&qf);
                let mut check = rows.clone();
                check.push(sq.coeffs().to_vec());
                debug_assert_eq!(rank(&check), 3);
                if !rational.contains(&qf) {
                    rational.push(qf);
                }
            }
        }
        let better = match &best {
            None => true,
            Some((d, r)) => distinct > *d || (distinct == *d && rational.len() > r.len()),
        };
        if better {
            best = Some((distinct, rational));
        }
        if let Some((4, ref r)) = best {
            if r.len() == 4 {
                break;
            }
        }
    }
    match best {
        Some((distinct, rational)) => Ok(PlaneSection::Finite { distinct, rational }),
        None => Err(WedgeError::NotDecomposable),
    }
}

fn specialize_c(
    a: &Rat,
    b: &QForm,
    g: &QForm,
    x0: &Rat,
    x1: &Rat,
) -> crate::unipoly::QPoly {
    crate::unipoly::UniPoly::new(vec![g.eval(x0, x1), b.eval(x0, x1), a.clone()])
}

/// Rational projective roots of a nonzero binary form, not requiring a full
/// splitting. A root u = r of F(1,u) is the point (1:r); a degree defect is
/// a root at (0:1).
fn rational_projective_roots_partial(f: &QForm) -> Vec<(Rat, Rat)> {
    let u = f.to_unipoly();
    let mut out = vec![];
    if f.degree() > u.deg().unwrap_or(0) {
        out.push((Rat::zero(), Rat::one()));
    }
    for r in u.squarefree_part().rational_roots() {
        out.push((Rat::one(), r));
    }
    out
}

/// Extracts a spanning pencil from a decomposable, nonzero wedge.
pub fn pencil_of<T: Field>(w: &Wedge2<T>) -> Result<Pencil<T>, WedgeError> {
    if w.is_zero() {
        return Err(WedgeError::Zero);
    }
    // columns of the antisymmetric matrix A(ω) span the 2-space
    let a = |i: usize, j: usize| -> T {
        use std::cmp::Ordering;
        match i.cmp(&j) {
            Ordering::Less => w.coords[pair_index(i, j)].clone(),
            Ordering::Greater => -w.coords[pair_index(j, i)].clone(),
            Ordering::Equal => T::zero(),
        }
    };
    let cols: Vec<Vec<T>> = (0..5).map(|j| (0..5).map(|i| a(i, j)).collect()).collect();
    let mut picked: Vec<Vec<T>> = vec![];
    for c in cols {
        if c.iter().all(|x| x.is_zero()) {
            continue;
        }
        let mut trial = picked.clone();
        trial.push(c);
        if rank(&trial) == trial.len() {
            picked = trial;
        }
        if picked.len() == 2 {
            break;
        }
    }
    if picked.len() != 2 {
        return Err(WedgeError::NotDecomposable);
    }
    Ok(Pencil {
        a: BinaryForm::new(picked[0].clone()),
        b: BinaryForm::new(picked[1].clone()),
    })
}
