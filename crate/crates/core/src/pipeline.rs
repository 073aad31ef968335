//! Forward construction of conic-type sextics and their plane models.
//!
//! An instance starts from a plane K ⊂ P(V₄) meeting the surface of squares
//! in four distinct rational points, plus a smooth conic in K avoiding those
//! points. Every rational parameter t on the conic gives a quartic F_t, its
//! trisecant pencil, and an exact point b(t) of B; the three lines through
//! b(t) are three points of the plane model M(R). The instance then carries:
//!
//! * the four line classes ε (square roots of K ∩ squares) and the six
//!   bisecant classes β_ij (pairwise intersections of their polar lines),
//! * exact sample points b(t) with numeric line triples,
//! * a symbolic-in-t lane: the primitive degree-6 coordinate vector ω(t) of
//!   the curve in P(Λ²V₄), from which the bisecant incidence polynomials
//!   (degree 2 each, six of them) and the degree-12 branch polynomial are
//!   computed exactly.
//!
//! The branch polynomial uses the invariant quadric on the V₆ summand:
//! `(s,s)₆` vanishes on B exactly along the branch divisor of the triple
//! cover (the unique invariant anticanonical section), so its pullback to
//! the curve is an exact degree-12 detector whose simple roots certify the
//! Hurwitz count. This is validated against the double-root definition in
//! the tests.

use crate::binary_form::{transvectant, BinaryForm, QForm};
use crate::exact_mat::{det3, rank, solve};
use crate::lines::{
    line_to_numeric, lines_through_point_numeric, m_of_line, polar_lines_cross, polar_pairing,
    quartic_sqrt_numeric, vsp_certificate_numeric, LineError, LinePoint, PolarLine,
};
use crate::numeric::{form_roots_projective, Rng};
use crate::scalar::{rat, rat_to_cplx, rat_to_real, Cplx, Rat, Real};
use crate::unipoly::{QPoly, UniPoly};
use crate::wedge::{
    on_b, third_transvectant_matrix, trisecant_pencil, veronese_plane_section, wedge,
    PlaneSection, Pencil, TrisecantKernel, Wedge2, WedgeError,
};
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("could not build a generic instance in {0} attempts")]
    Resampling(u32),
    #[error("instance is not generic: {0}")]
    NonGeneric(String),
    #[error("wedge error: {0}")]
    Wedge(#[from] WedgeError),
    #[error("line error: {0}")]
    Line(#[from] LineError),
    #[error("schema error: {0}")]
    Schema(String),
}

/// Numeric configuration shared by the pipeline and the reconstruction.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NumCfg {
    pub samples: usize,
    pub tolerance: f64,
    pub multistart: usize,
    pub precision_bits: u32,
    pub threads: usize,
}

impl Default for NumCfg {
    fn default() -> Self {
        NumCfg {
            samples: 48,
            tolerance: 1e-8,
            multistart: 64,
            precision_bits: 128,
            threads: 0,
        }
    }
}

impl NumCfg {
    pub fn pool(&self) -> rayon::ThreadPool {
        let mut b = rayon::ThreadPoolBuilder::new();
        if self.threads > 0 {
            b = b.num_threads(self.threads);
        }
        b.build().expect("thread pool")
    }
}

/// One exact sample of the curve with its numeric line triple (stored at
/// f64 precision in files; high-precision lanes recompute from `b`).
#[derive(Clone, Debug)]
pub struct Sample {
    pub t: Rat,
    pub b: Wedge2<Rat>,
    pub triple: [LinePoint<Cplx<f64>>; 3],
}

/// A generated conic-type instance with all derived exact data.
#[derive(Clone, Debug)]
pub struct CTInstance {
    pub seed: u64,
    /// Basis of K: the squares of the first three Veronese classes.
    pub k_basis: [QForm; 3],
    /// The four line classes over K ∩ (squares); the fourth is derived.
    pub eps: [LinePoint<Rat>; 4],
    /// Bisecant classes indexed by `lattice::TRANSPOSITIONS`.
    pub beta: [LinePoint<Rat>; 6],
    /// Conic matrix in K-coordinates.
    pub conic: [[Rat; 3]; 3],
    /// Rational parametrization: K-coordinates of the point at t are
    /// `param · (1, t, t²)ᵀ`.
    pub param: [[Rat; 3]; 3],
    pub samples: Vec<Sample>,
    /// Rejected seeds of the generator loop (for the record).
    pub attempts: u32,
}

fn eye3() -> [[Rat; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { Rat::one() } else { Rat::zero() }))
}

fn mat3_mul(a: &[[Rat; 3]; 3], b: &[[Rat; 3]; 3]) -> [[Rat; 3]; 3] {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| (0..3).map(|k| &a[i][k] * &b[k][j]).sum())
    })
}

fn mat3_inv(a: &[[Rat; 3]; 3]) -> Option<[[Rat; 3]; 3]> {
    let d = det3(a);
    if d.is_zero() {
        return None;
    }
    let cof = |r: usize, c: usize| -> Rat {
        let (r1, r2) = match r {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let (c1, c2) = match c {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let m = &a[r1][c1] * &a[r2][c2] - &a[r1][c2] * &a[r2][c1];
        if (r + c) % 2 == 0 {
            m
        } else {
            -m
        }
    };
    Some(std::array::from_fn(|i| {
        std::array::from_fn(|j| cof(j, i) / d.clone())
    }))
}

fn mat3_transpose(a: &[[Rat; 3]; 3]) -> [[Rat; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i].clone()))
}

fn conic_value(q: &[[Rat; 3]; 3], u: &[Rat; 3], v: &[Rat; 3]) -> Rat {
    let mut acc = Rat::zero();
    for i in 0..3 {
        for j in 0..3 {
            acc += &q[i][j] * &u[i] * &v[j];
        }
    }
    acc
}

/// Builds a deterministic instance from a seed: a plane K with four rational
/// Veronese points in general position and a smooth rational-parametrized
/// conic avoiding them, then populates `cfg.samples` curve samples.
pub fn build_instance(seed: u64, cfg: &NumCfg) -> Result<CTInstance, PipelineError> {
    let mut rng = Rng::new(seed);
    let max_attempts = 400;
    for attempt in 0..max_attempts {
        let Some(core) = try_build_core(&mut rng) else {
            continue;
        };
        let (k_basis, eps, beta) = core;
        // conic: random invertible parametrization matrix, conic avoiding
        // the four Veronese points of K
        let mut found = None;
        for _ in 0..8 {
            let param: [[Rat; 3]; 3] = std::array::from_fn(|_| {
                std::array::from_fn(|_| Rat::from_integer(rng.int(-5, 5).into()))
            });
            let Some(pinv) = mat3_inv(&param) else {
                continue;
            };
            // the rational normal conic y₀y₂ = y₁² has matrix s0
            let mut s0 = [
                [Rat::zero(), Rat::zero(), Rat::one()],
                [Rat::zero(), -Rat::from_integer(2.into()), Rat::zero()],
                [Rat::one(), Rat::zero(), Rat::zero()],
            ];
            // normalize: vᵀ s0 v = 2(y₀y₂ - y₁²)
            s0[1][1] = -Rat::from_integer(2.into());
            let q = mat3_mul(&mat3_transpose(&pinv), &mat3_mul(&s0, &pinv));
            // K-coordinates of the four Veronese squares
            let vpts = veronese_coords(&k_basis, &eps);
            let Some(vpts) = vpts else {
                break;
            };
            if vpts.iter().any(|v| conic_value(&q, v, v).is_zero()) {
                continue;
            }
            found = Some((param, q));
            break;
        }
        let Some((param, conic)) = found else {
            continue;
        };
        let mut inst = CTInstance {
            seed,
            k_basis,
            eps,
            beta,
            conic,
            param,
            samples: vec![],
            attempts: attempt + 1,
        };
        match sample_curve(&mut inst, cfg).and_then(|()| symbolic_checks(&inst)) {
            Ok(()) => return Ok(inst),
            Err(_) => continue,
        }
    }
    Err(PipelineError::Resampling(max_attempts))
}

/// Genericity certificates of the symbolic lane: the curve coordinates have
/// degree 6, the branch polynomial is a squarefree degree-12 polynomial, and
/// each bisecant incidence polynomial is quadratic and squarefree (the
/// rational chart on the conic misses one point; a hit at t = ∞ shows up as
/// a degree drop and asks for a different parametrization).
fn symbolic_checks(inst: &CTInstance) -> Result<(), PipelineError> {
    let curve = symbolic_curve(inst)?;
    let phi = branch_polynomial(&curve);
    if phi.deg() != Some(12) || !phi.is_squarefree() {
        return Err(PipelineError::NonGeneric(format!(
            "branch polynomial degree {:?}",
            phi.deg()
        )));
    }
    for b in &inst.beta {
        let line = crate::lines::ambient_line(b);
        let g = bisecant_polynomial(&curve, &line);
        if g.deg() != Some(2) || !g.is_squarefree() {
            return Err(PipelineError::NonGeneric(format!(
                "bisecant polynomial degree {:?}",
                g.deg()
            )));
        }
    }
    Ok(())
}

/// Random plane with four rational Veronese points in general position and
/// the derived bisecant classes.
type CoreData = ([QForm; 3], [LinePoint<Rat>; 4], [LinePoint<Rat>; 6]);

fn try_build_core(rng: &mut Rng) -> Option<CoreData> {
    let q: [QForm; 3] = std::array::from_fn(|_| {
        BinaryForm::new(vec![rng.small_rat(), rng.small_rat0(), rng.small_rat()])
    });
    // pairwise independent, pairwise non-polar, off the special conic
    for i in 0..3 {
        if polar_pairing(&q[i], &q[i]).is_zero() {
            return None;
        }
        for j in (i + 1)..3 {
            if polar_pairing(&q[i], &q[j]).is_zero() {
                return None;
            }
            if rank(&[q[i].coeffs().to_vec(), q[j].coeffs().to_vec()]) != 2 {
                return None;
            }
        }
    }
    let squares: [QForm; 3] = std::array::from_fn(|i| q[i].mul(&q[i]));
    let rows: Vec<Vec<Rat>> = squares.iter().map(|f| f.coeffs().to_vec()).collect();
    if rank(&rows) != 3 {
        return None;
    }
    // the fourth point of K ∩ (squares), certified by exact elimination
    let section = veronese_plane_section(&squares).ok()?;
    let PlaneSection::Finite { distinct, rational } = section else {
        return None;
    };
    if distinct != 4 || rational.len() != 4 {
        return None;
    }
    let mut eps: Vec<LinePoint<Rat>> = vec![];
    for lead in &q {
        let lp = LinePoint::new(lead.clone()).ok()?;
        if !rational.contains(lp.form()) {
            return None;
        }
        eps.push(lp);
    }
    let fourth = rational
        .iter()
        .find(|f| eps.iter().all(|e| e.form() != *f))?
        .clone();
    let fourth = LinePoint::new(fourth).ok()?;
    if polar_pairing(fourth.form(), fourth.form()).is_zero() {
        return None;
    }
    for e in &eps {
        if polar_pairing(e.form(), fourth.form()).is_zero() {
            return None;
        }
    }
    eps.push(fourth);
    let eps: [LinePoint<Rat>; 4] = [
        eps[0].clone(),
        eps[1].clone(),
        eps[2].clone(),
        eps[3].clone(),
    ];
    // bisecants: pairwise intersections of the polar lines
    let polars: [PolarLine<Rat>; 4] = std::array::from_fn(|i| m_of_line(&eps[i]));
    let mut beta: Vec<LinePoint<Rat>> = vec![];
    for &(i, j) in crate::lattice::TRANSPOSITIONS.iter() {
        let b = polar_lines_cross(&polars[i - 1], &polars[j - 1]).ok()?;
        if polar_pairing(b.form(), b.form()).is_zero() {
            return None; // node on the special conic: resample
        }
        beta.push(b);
    }
    // nodes pairwise distinct and distinct from the eps
    for i in 0..6 {
        for j in (i + 1)..6 {
            if beta[i] == beta[j] {
                return None;
            }
        }
        if eps.iter().any(|e| *e == beta[i]) {
            return None;
        }
    }
    // no three of the four polar lines concurrent: β₁₂ ∉ L₃ etc.
    for &(i, j) in crate::lattice::TRANSPOSITIONS.iter() {
        for k in 1..=4usize {
            if k == i || k == j {
                continue;
            }
            if polars[k - 1]
                .eval(&beta[crate::lattice::transposition_index(i, j)].coords())
                .is_zero()
            {
                return None;
            }
        }
    }
    let beta: [LinePoint<Rat>; 6] = std::array::from_fn(|k| beta[k].clone());
    Some((squares, eps, beta))
}

/// K-coordinates of the four Veronese squares in the `k_basis` frame.
fn veronese_coords(k_basis: &[QForm; 3], eps: &[LinePoint<Rat>; 4]) -> Option<Vec<[Rat; 3]>> {
    let cols: Vec<Vec<Rat>> = (0..5)
        .map(|r| {
            (0..3)
                .map(|j| k_basis[j].coeff(r).clone())
                .collect()
        })
        .collect();
    let mut out = vec![];
    for e in eps {
        let sq = e.form().mul(e.form());
        let rhs: Vec<Rat> = (0..5).map(|r| sq.coeff(r).clone()).collect();
        let x = solve(&cols, &rhs)?;
        out.push([x[0].clone(), x[1].clone(), x[2].clone()]);
    }
    Some(out)
}

/// Exact recomputation of the normalized sample point of B at parameter t.
pub fn trisecant_pencil_of_sample(inst: &CTInstance, t: &Rat) -> Option<Wedge2<Rat>> {
    let f = quartic_at(inst, t);
    match trisecant_pencil(&f).ok()? {
        TrisecantKernel::Pencil(p) => Some(normalize_wedge(&wedge(&p.a, &p.b))),
        TrisecantKernel::Cone(_) => None,
    }
}

/// The quartic over the conic point at parameter t (exact).
pub fn quartic_at(inst: &CTInstance, t: &Rat) -> QForm {
    let y = [Rat::one(), t.clone(), t * t];
    let c: [Rat; 3] =
        std::array::from_fn(|i| (0..3).map(|j| &inst.param[i][j] * &y[j]).sum());
    let mut f = BinaryForm::zero_of_degree(4);
    for i in 0..3 {
        f = f.add(&inst.k_basis[i].scale(&c[i]));
    }
    f
}

/// Primitive integer normalization of a rational wedge (common denominator
/// cleared, gcd divided out, first nonzero coordinate positive).
pub fn normalize_wedge(w: &Wedge2<Rat>) -> Wedge2<Rat> {
    use num_bigint::BigInt;
    let mut denom = BigInt::from(1);
    for c in &w.coords {
        let d = c.denom().clone();
        let g = num_integer::Integer::gcd(&denom, &d);
        denom = denom / g * d;
    }
    let ints: Vec<BigInt> = w
        .coords
        .iter()
        .map(|c| c.numer() * (&denom / c.denom()))
        .collect();
    let mut g = BigInt::from(0);
    for v in &ints {
        g = num_integer::Integer::gcd(&g, v);
    }
    if g.is_zero() {
        return w.clone();
    }
    let mut vals: Vec<BigInt> = ints.into_iter().map(|v| v / &g).collect();
    if let Some(first) = vals.iter().find(|v| !v.is_zero()) {
        if first.is_negative() {
            for v in vals.iter_mut() {
                *v = -v.clone();
            }
        }
    }
    Wedge2 {
        coords: std::array::from_fn(|k| Rat::from_integer(vals[k].clone())),
    }
}

/// Populates the samples: exact b(t) plus numeric triples, in parallel but
/// with order-independent results.
pub fn sample_curve(inst: &mut CTInstance, cfg: &NumCfg) -> Result<(), PipelineError> {
    let n = cfg.samples.max(28);
    // parameters spread over the whole projective line: u ∈ (0,1) uniform,
    // t = (2u-1)/(u(1-u)); integer parameters would pile up near the
    // parametrization's limit point and starve the fit of rank
    let ts: Vec<Rat> = (0..n as i64)
        .map(|k| {
            let u = rat(k + 1, n as i64 + 2);
            let one = Rat::one();
            (Rat::from_integer(2.into()) * &u - &one) / (&u * (&one - &u))
        })
        .collect();
    let pool = cfg.pool();
    let inst_ref = &*inst;
    let results: Vec<Result<Sample, PipelineError>> = pool.install(|| {
        ts.par_iter()
            .map(|t| {
                let f = quartic_at(inst_ref, t);
                let b = match trisecant_pencil(&f).map_err(PipelineError::from)? {
                    TrisecantKernel::Pencil(p) => normalize_wedge(&wedge(&p.a, &p.b)),
                    TrisecantKernel::Cone(_) => {
                        return Err(PipelineError::NonGeneric(format!(
                            "sample t={} landed on the cone",
                            t
                        )))
                    }
                };
                debug_assert!(on_b(&b).unwrap());
                let triple = lines_through_point_numeric::<f64>(&b)?;
                if triple.len() != 3 {
                    return Err(PipelineError::NonGeneric(format!(
                        "sample t={} has a degenerate fiber",
                        t
                    )));
                }
                Ok(Sample {
                    t: t.clone(),
                    b,
                    triple: [triple[0].clone(), triple[1].clone(), triple[2].clone()],
                })
            })
            .collect()
    });
    let mut samples = vec![];
    for r in results {
        samples.push(r?);
    }
    inst.samples = samples;
    Ok(())
}

// ---------------------------------------------------------------------------
// The symbolic-in-t lane.
// ---------------------------------------------------------------------------

/// The primitive coordinate vector ω(t) of the curve inside P(Λ²V₄), each
/// coordinate a rational polynomial in t (degree 6 for a generic instance).
pub struct SymbolicCurve {
    pub omega: [QPoly; 10],
    pub degree: usize,
}

type TPoly = UniPoly<Rat>;
type TForm = BinaryForm<TPoly>;

/// The quartic family F_t with polynomial coefficients.
fn quartic_family(inst: &CTInstance) -> TForm {
    let y: [TPoly; 3] = [
        UniPoly::one(),
        UniPoly::var(),
        UniPoly::var() * UniPoly::var(),
    ];
    let c: [TPoly; 3] = std::array::from_fn(|i| {
        (0..3)
            .map(|j| UniPoly::constant(inst.param[i][j].clone()) * y[j].clone())
            .fold(TPoly::zero(), |a, b| a + b)
    });
    let mut f: TForm = BinaryForm::zero_of_degree(4);
    for i in 0..3 {
        let ki: TForm = inst.k_basis[i].map(|r| UniPoly::constant(r.clone()));
        f = f.add(&ki.scale(&c[i]));
    }
    f
}

fn poly_content(ps: &[TPoly]) -> TPoly {
    let mut g = TPoly::zero();
    for p in ps {
        if p.is_zero() {
            continue;
        }
        g = if g.is_zero() { p.clone() } else { g.gcd(p) };
        if g.deg() == Some(0) {
            break;
        }
    }
    g
}

/// Builds ω(t) from the trisecant kernels of the quartic family: the wedge
/// of F_t with a Cramer null vector of the third-transvectant matrix,
/// divided by its polynomial content.
pub fn symbolic_curve(inst: &CTInstance) -> Result<SymbolicCurve, PipelineError> {
    let f = quartic_family(inst);
    let m = third_transvectant_matrix(&f); // 3×5 over Q[t]
    // Cramer null vectors over 4-column subsets
    let mut best: Option<[QPoly; 10]> = None;
    for skip in 0..5usize {
        let cols: Vec<usize> = (0..5).filter(|&c| c != skip).collect();
        let mut v: [TPoly; 5] = std::array::from_fn(|_| TPoly::zero());
        for (pos, &dropped) in cols.iter().enumerate() {
            // minor over cols minus `dropped`
            let kept: Vec<usize> = cols.iter().copied().filter(|&c| c != dropped).collect();
            let d = det3_poly(&m, &kept);
            v[dropped] = if pos % 2 == 0 { d } else { -d };
        }
        if v.iter().all(|p| p.is_zero()) {
            continue;
        }
        let vf: TForm = BinaryForm::new(v.to_vec());
        let w = crate::wedge::wedge(&f, &vf);
        if w.is_zero() {
            continue;
        }
        let content = poly_content(&w.coords);
        let omega: [QPoly; 10] = std::array::from_fn(|k| {
            if w.coords[k].is_zero() {
                QPoly::zero()
            } else {
                w.coords[k].div_exact(&content)
            }
        });
        let degree = omega.iter().filter_map(|p| p.deg()).max().unwrap_or(0);
        match &best {
            Some(b)
                if b.iter().filter_map(|p| p.deg()).max().unwrap_or(0) <= degree => {}
            _ => best = Some(omega),
        }
    }
    let omega = best.ok_or_else(|| {
        PipelineError::NonGeneric("no usable trisecant null vector".into())
    })?;
    let degree = omega.iter().filter_map(|p| p.deg()).max().unwrap_or(0);
    if degree != 6 {
        return Err(PipelineError::NonGeneric(format!(
            "curve coordinate degree {} (expected 6)",
            degree
        )));
    }
    // consistency: ω(t) matches the per-sample wedges projectively
    Ok(SymbolicCurve { omega, degree })
}

fn det3_poly(m: &[Vec<TPoly>], cols: &[usize]) -> TPoly {
    let e = |r: usize, c: usize| m[r][cols[c]].clone();
    e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1))
        - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
        + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0))
}

/// The degree-12 branch polynomial: pullback of the invariant quadric
/// `(s,s)₆` on the V₆ summand along ω(t).
pub fn branch_polynomial(curve: &SymbolicCurve) -> QPoly {
    let w: Wedge2<TPoly> = Wedge2 {
        coords: std::array::from_fn(|k| curve.omega[k].clone()),
    };
    let (s1, _s3) = crate::wedge::split(&w);
    transvectant(&s1, &s1, 6).unwrap().coeff(0).clone()
}

/// Branch data of an instance.
#[derive(Clone, Debug, Serialize)]
pub struct BranchReport {
    pub degree: usize,
    pub distinct_roots: usize,
    pub all_simple: bool,
    /// Max |disc of the fiber cubic| over the numeric branch parameters —
    /// the cross-check against the double-root definition.
    pub cross_check: f64,
    pub count: usize,
    pub hurwitz_genus: i64,
}

/// Exact branch count along the curve with numeric cross-validation.
pub fn branch_report(inst: &CTInstance) -> Result<BranchReport, PipelineError> {
    let curve = symbolic_curve(inst)?;
    let phi = branch_polynomial(&curve);
    let degree = phi.deg().unwrap_or(0);
    let sf = phi.squarefree_part();
    let distinct = sf.deg().unwrap_or(0);
    let all_simple = distinct == degree;
    // numeric roots: at each the fiber cubic must have (near-)vanishing
    // discriminant, tying the invariant-quadric shortcut to the definition
    let coeffs: Vec<Cplx<f64>> = phi.coeffs.iter().map(rat_to_cplx).collect();
    let roots = crate::numeric::roots(&coeffs);
    let mut cross = 0.0f64;
    for t in roots {
        let d = fiber_cubic_disc_at(inst, t);
        cross = cross.max(d);
    }
    Ok(BranchReport {
        degree,
        distinct_roots: distinct,
        all_simple,
        cross_check: cross,
        count: distinct,
        hurwitz_genus: crate::lattice::hurwitz_genus(3, 0, distinct as i64).unwrap_or(-1),
    })
}

/// |discriminant| of the fiber cubic at a complex parameter, normalized.
fn fiber_cubic_disc_at(inst: &CTInstance, t: Cplx<f64>) -> f64 {
    let Some(cubic) = cubic_at_complex::<f64>(inst, t) else {
        return f64::INFINITY;
    };
    let c: Vec<Cplx<f64>> = cubic.coeffs().to_vec();
    // binary cubic discriminant: 18abcd - 4b³d + b²c² - 4ac³ - 27a²d²
    let (a, b, cc, d) = (c[0], c[1], c[2], c[3]);
    let i18 = Cplx::from_f64s(18.0, 0.0);
    let i4 = Cplx::from_f64s(4.0, 0.0);
    let i27 = Cplx::from_f64s(27.0, 0.0);
    let disc = i18 * a * b * cc * d - i4 * b * b * b * d + b * b * cc * cc
        - i4 * a * cc * cc * cc
        - i27 * a * a * d * d;
    let scale = c.iter().fold(0.0f64, |m, z| m.max(z.abs()));
    if scale == 0.0 {
        return f64::INFINITY;
    }
    disc.abs() / scale.powi(4)
}

/// Fiber cubic at a complex parameter of the conic.
fn cubic_at_complex<R: Real>(inst: &CTInstance, t: Cplx<R>) -> Option<BinaryForm<Cplx<R>>> {
    let (a, b) = pencil_at_complex(inst, t)?;
    let minors = crate::wedge::pencil_minors(&Pencil { a, b });
    // geometric factor: the largest-norm minor (all are proportional)
    let mut best: Option<(R, BinaryForm<Cplx<R>>)> = None;
    for m in minors {
        let norm = m
            .coeffs()
            .iter()
            .fold(R::zero(), |acc, z| acc.maxv(z.abs()));
        match &best {
            Some((n, _)) if *n >= norm => {}
            _ => best = Some((norm, m)),
        }
    }
    best.map(|(_, m)| m)
}

/// Trisecant pencil at a complex parameter, by pivoted elimination on the
/// third-transvectant matrix.
fn pencil_at_complex<R: Real>(
    inst: &CTInstance,
    t: Cplx<R>,
) -> Option<(BinaryForm<Cplx<R>>, BinaryForm<Cplx<R>>)> {
    let y = [Cplx::<R>::one(), t, t * t];
    let c: [Cplx<R>; 3] = std::array::from_fn(|i| {
        (0..3).fold(Cplx::zero(), |acc, j| {
            acc + rat_to_cplx::<R>(&inst.param[i][j]) * y[j]
        })
    });
    let mut f: BinaryForm<Cplx<R>> = BinaryForm::zero_of_degree(4);
    for i in 0..3 {
        f = f.add(&inst.k_basis[i].map(rat_to_cplx).scale(&c[i]));
    }
    let m = third_transvectant_matrix(&f);
    let ker = kernel_numeric(&m);
    if ker.len() != 2 {
        return None;
    }
    Some((
        BinaryForm::new(ker[0].clone()),
        BinaryForm::new(ker[1].clone()),
    ))
}

/// Numeric right kernel by column-pivoted elimination.
pub fn kernel_numeric<R: Real>(m: &[Vec<Cplx<R>>]) -> Vec<Vec<Cplx<R>>> {
    let rows = m.len();
    let cols = m[0].len();
    let mut a = m.to_vec();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(R::zero(), |acc, z| acc.maxv(z.abs()));
    if scale.is_zero() {
        return (0..cols)
            .map(|j| {
                (0..cols)
                    .map(|k| {
                        if k == j {
                            Cplx::one()
                        } else {
                            Cplx::zero()
                        }
                    })
                    .collect()
            })
            .collect();
    }
    let thr = scale * R::eps().sqrt();
    let mut pivots: Vec<usize> = vec![];
    let mut r = 0;
    for _ in 0..cols {
        // choose the remaining column with the largest pivot in row range
        let mut best: Option<(usize, usize, R)> = None;
        for c in 0..cols {
            if pivots.contains(&c) {
                continue;
            }
            for i in r..rows {
                let v = a[i][c].abs();
                match &best {
                    Some((_, _, m)) if *m >= v => {}
                    _ => best = Some((i, c, v)),
                }
            }
        }
        let Some((pi, pc, pv)) = best else { break };
        if pv <= thr {
            break;
        }
        a.swap(r, pi);
        let inv = Cplx::one() / a[r][pc];
        for j in 0..cols {
            a[r][j] = a[r][j] * inv;
        }
        for i in 0..rows {
            if i != r {
                let f = a[i][pc];
                if !f.abs().is_zero() {
                    for j in 0..cols {
                        let t = a[r][j];
                        a[i][j] = a[i][j] - f * t;
                    }
                }
            }
        }
        pivots.push(pc);
        r += 1;
        if r == rows {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![Cplx::<R>::zero(); cols];
            v[fc] = Cplx::one();
            for (pr, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[pr][fc];
            }
            v
        })
        .collect()
}

/// The numeric line triple at a complex conic parameter.
pub fn triple_at_complex<R: Real>(
    inst: &CTInstance,
    t: Cplx<R>,
) -> Option<[LinePoint<Cplx<R>>; 3]> {
    let cubic = cubic_at_complex(inst, t)?;
    let (a, b) = pencil_at_complex(inst, t)?;
    let roots = form_roots_projective(cubic.coeffs(), 1e-12);
    if roots.len() != 3 {
        return None;
    }
    let mut out = vec![];
    for (s, u) in roots {
        let alpha = a.scale(&s).add(&b.scale(&u));
        let (q, _res) = quartic_sqrt_numeric(&alpha)?;
        out.push(LinePoint::new_numeric(q).ok()?);
    }
    Some([out[0].clone(), out[1].clone(), out[2].clone()])
}

/// Bisecant incidence data: for each of the six bisecant classes, the
/// exact degree-2 polynomial whose roots are the curve parameters hit.
#[derive(Clone, Debug, Serialize)]
pub struct BisecantReport {
    /// (degree, squarefree) per transposition index.
    pub pattern: Vec<(usize, bool)>,
    pub all_two_simple: bool,
}

/// The incidence polynomial of a fixed ambient line along the curve: gcd of
/// the 3×3 minors of the two spanning wedges stacked with ω(t).
pub fn bisecant_polynomial(
    curve: &SymbolicCurve,
    line: &crate::lines::AmbientLine<Rat>,
) -> QPoly {
    let w0: Vec<Rat> = line.p0.coords.to_vec();
    let w1: Vec<Rat> = line.p1.coords.to_vec();
    let mut g = QPoly::zero();
    for c0 in 0..10usize {
        for c1 in (c0 + 1)..10 {
            for c2 in (c1 + 1)..10 {
                let cols = [c0, c1, c2];
                // expand along the polynomial row
                let cof = |skip: usize| -> Rat {
                    let keep: Vec<usize> =
                        cols.iter().copied().filter(|&c| c != skip).collect();
                    &w0[keep[0]] * &w1[keep[1]] - &w0[keep[1]] * &w1[keep[0]]
                };
                let mut minor = QPoly::zero();
                for (pos, &c) in cols.iter().enumerate() {
                    let sign = if pos % 2 == 0 { Rat::one() } else { -Rat::one() };
                    minor = minor
                        + curve.omega[c].clone()
                            * UniPoly::constant(sign * cof(c));
                }
                if minor.is_zero() {
                    continue;
                }
                g = if g.is_zero() { minor } else { g.gcd(&minor) };
                if g.deg() == Some(0) {
                    return g;
                }
            }
        }
    }
    g
}

pub fn bisecant_report(inst: &CTInstance) -> Result<BisecantReport, PipelineError> {
    let curve = symbolic_curve(inst)?;
    let mut pattern = vec![];
    for b in &inst.beta {
        let line = crate::lines::ambient_line(b);
        let g = bisecant_polynomial(&curve, &line);
        let deg = g.deg().unwrap_or(0);
        pattern.push((deg, g.is_squarefree()));
    }
    let all_two_simple = pattern.iter().all(|&(d, sf)| d == 2 && sf);
    Ok(BisecantReport {
        pattern,
        all_two_simple,
    })
}

// ---------------------------------------------------------------------------
// Plane-model fitting.
// ---------------------------------------------------------------------------

/// Monomial exponents of degree 6 in three variables, deterministic order.
pub fn sextic_monomials() -> Vec<(usize, usize, usize)> {
    let mut out = vec![];
    for i in (0..=6usize).rev() {
        for j in (0..=(6 - i)).rev() {
            out.push((i, j, 6 - i - j));
        }
    }
    out
}

fn monomial_row<R: Real>(p: &[Cplx<R>; 3]) -> Vec<Cplx<R>> {
    let mut xp = [[Cplx::<R>::one(); 7]; 3];
    for v in 0..3 {
        for k in 1..=6 {
            xp[v][k] = xp[v][k - 1] * p[v];
        }
    }
    sextic_monomials()
        .iter()
        .map(|&(i, j, k)| xp[0][i] * xp[1][j] * xp[2][k])
        .collect()
}

/// Evaluation of a coefficient vector at a point, relative to scales.
pub fn sextic_eval_rel<R: Real>(coeffs: &[R], p: &[Cplx<R>; 3]) -> R {
    let n = p
        .iter()
        .fold(R::zero(), |acc, z| acc + z.norm_sqr())
        .sqrt();
    if n.is_zero() {
        return R::zero();
    }
    let q: [Cplx<R>; 3] = std::array::from_fn(|i| p[i].scale(R::one() / n));
    let row = monomial_row(&q);
    let v = row
        .iter()
        .zip(coeffs)
        .fold(Cplx::<R>::zero(), |acc, (m, c)| acc + m.scale(*c));
    let cn = coeffs.iter().fold(R::zero(), |acc, c| acc + *c * *c).sqrt();
    if cn.is_zero() {
        R::one()
    } else {
        v.abs() / cn
    }
}

/// Result of fitting the plane sextic through the sampled triples.
#[derive(Clone, Debug)]
pub struct PlaneFit<R> {
    pub coeffs: Vec<R>,
    /// σ_min/σ_max of the (normalized) interpolation matrix.
    pub residual: f64,
    /// Gap to the second-smallest singular value, σ₁/σ₂.
    pub gap: f64,
}

/// Fits the degree-6 plane model through all sampled triple points. The
/// model is a real curve, so real and imaginary parts of each complex
/// sample row constrain a real coefficient vector.
pub fn fit_sextic<R: Real>(inst: &CTInstance, _cfg: &NumCfg) -> Result<PlaneFit<R>, PipelineError> {
    let mut rows: Vec<Vec<Cplx<R>>> = vec![];
    for s in &inst.samples {
        let Some(triple) = triple_at_complex::<R>(inst, Cplx::real(rat_to_real(&s.t))) else {
            return Err(PipelineError::NonGeneric(format!(
                "fiber degenerated at t={}",
                s.t
            )));
        };
        for lp in triple.iter() {
            let v = lp.to_vec();
            let n = v
                .iter()
                .fold(R::zero(), |acc, z| acc + z.norm_sqr())
                .sqrt();
            let p: [Cplx<R>; 3] = std::array::from_fn(|i| v[i].scale(R::one() / n));
            let row = monomial_row(&p);
            let re: Vec<Cplx<R>> = row.iter().map(|z| Cplx::real(z.re)).collect();
            let im: Vec<Cplx<R>> = row.iter().map(|z| Cplx::real(z.im)).collect();
            rows.push(re);
            rows.push(im);
        }
    }
    let (sv, vecs) = crate::numeric::singular_values(&rows);
    let smax = sv[sv.len() - 1];
    let residual = (sv[0] / smax).to_f64();
    let gap = (sv[0] / sv[1]).to_f64();
    let coeffs: Vec<R> = (0..28).map(|r| vecs[r][0].re).collect();
    Ok(PlaneFit {
        coeffs,
        residual,
        gap,
    })
}

/// Node certificate of the fitted curve at a point: relative value,
/// gradient norm, and the (absolute value of the) chart Hessian
/// determinant, which must be bounded away from zero for an ordinary node.
#[derive(Clone, Debug, Serialize)]
pub struct NodeCert {
    pub value: f64,
    pub gradient: f64,
    pub hessian_det: f64,
}

pub fn node_certificate<R: Real>(coeffs: &[R], p: &[Cplx<R>; 3]) -> NodeCert {
    // work in the chart of the largest coordinate
    let mags: [R; 3] = std::array::from_fn(|i| p[i].abs());
    let mut chart = 0;
    for i in 1..3 {
        if mags[i] > mags[chart] {
            chart = i;
        }
    }
    let scale = p[chart];
    let q: [Cplx<R>; 3] = std::array::from_fn(|i| p[i] / scale);
    let cn = coeffs.iter().fold(R::zero(), |acc, c| acc + *c * *c).sqrt();
    let others: Vec<usize> = (0..3).filter(|&i| i != chart).collect();
    // finite differences are exact enough here; use analytic partials instead
    let eval = |pt: &[Cplx<R>; 3]| -> Cplx<R> {
        monomial_row(pt)
            .iter()
            .zip(coeffs)
            .fold(Cplx::zero(), |acc, (m, c)| acc + m.scale(*c))
    };
    let value = eval(&q).abs() / cn;
    // analytic first and second derivatives via monomial expansion
    let monos = sextic_monomials();
    let mut grad = [Cplx::<R>::zero(); 2];
    let mut hess = [[Cplx::<R>::zero(); 2]; 2];
    let mut xp = [[Cplx::<R>::one(); 8]; 3];
    for v in 0..3 {
        for k in 1..=7 {
            xp[v][k] = xp[v][k - 1] * q[v];
        }
    }
    for ((i, j, k), c) in monos.iter().zip(coeffs) {
        let e = [*i, *j, *k];
        let term = |d: &[usize; 3]| -> Cplx<R> {
            let mut coef = 1.0;
            let mut ok = true;
            for v in 0..3 {
                for step in 0..d[v] {
                    if e[v] < step + 1 {
                        ok = false;
                    } else {
                        coef *= (e[v] - step) as f64;
                    }
                }
            }
            if !ok {
                return Cplx::zero();
            }
            let mut acc = Cplx::from_f64s(coef, 0.0).scale(*c);
            for v in 0..3 {
                acc = acc * xp[v][e[v] - d[v]];
            }
            acc
        };
        for (a, &va) in others.iter().enumerate() {
            let mut d = [0usize; 3];
            d[va] = 1;
            grad[a] = grad[a] + term(&d);
            for (b, &vb) in others.iter().enumerate() {
                let mut d2 = [0usize; 3];
                d2[va] += 1;
                d2[vb] += 1;
                hess[a][b] = hess[a][b] + term(&d2);
            }
        }
    }
    let gradient = (grad[0].norm_sqr() + grad[1].norm_sqr()).sqrt() / cn;
    // scale-free double-point measure: |det H| / ‖H‖² is O(1) for an
    // ordinary node and collapses for cusps and higher multiplicities
    let hnorm2 = hess[0][0].norm_sqr()
        + hess[0][1].norm_sqr()
        + hess[1][0].norm_sqr()
        + hess[1][1].norm_sqr();
    let hdet = if hnorm2.sqrt() < cn * R::from_f64(1e-10) {
        R::zero()
    } else {
        (hess[0][0] * hess[1][1] - hess[0][1] * hess[1][0]).abs() / hnorm2
    };
    NodeCert {
        value: value.to_f64(),
        gradient: gradient.to_f64(),
        hessian_det: hdet.to_f64(),
    }
}

/// Alternating-least-squares factor search: the smallest relative residual
/// over low-degree factorizations of the fitted sextic. Large residual
/// certifies (numerically) that no degree ≤ 3 factor exists.
pub fn factor_search_residual<R: Real>(coeffs: &[R], seed: u64) -> f64 {
    let monos_of = |d: usize| -> Vec<(usize, usize, usize)> {
        let mut out = vec![];
        for i in (0..=d).rev() {
            for j in (0..=(d - i)).rev() {
                out.push((i, j, d - i - j));
            }
        }
        out
    };
    let target: Vec<Cplx<R>> = coeffs.iter().map(|c| Cplx::real(*c)).collect();
    let tn = target
        .iter()
        .fold(R::zero(), |acc, z| acc + z.norm_sqr())
        .sqrt();
    let mono6 = sextic_monomials();
    let mut best = f64::INFINITY;
    let mut rng = Rng::new(seed ^ 0xfac7055);
    for da in 1..=3usize {
        let db = 6 - da;
        let ma = monos_of(da);
        let mb = monos_of(db);
        // product matrix: coefficient of each degree-6 monomial is bilinear
        let pos6 = |m: &(usize, usize, usize)| mono6.iter().position(|x| x == m).unwrap();
        for _start in 0..4 {
            let mut bvec: Vec<Cplx<R>> = (0..mb.len()).map(|_| rng.c_unit()).collect();
            let mut resid = f64::INFINITY;
            for _iter in 0..30 {
                // solve for A given B: rows indexed by degree-6 monomials
                let mut rows = vec![vec![Cplx::<R>::zero(); ma.len()]; mono6.len()];
                for (ia, a) in ma.iter().enumerate() {
                    for (ib, b) in mb.iter().enumerate() {
                        let m6 = (a.0 + b.0, a.1 + b.1, a.2 + b.2);
                        rows[pos6(&m6)][ia] = rows[pos6(&m6)][ia] + bvec[ib];
                    }
                }
                let Some(avec) = crate::numeric::lstsq(&rows, &target) else {
                    break;
                };
                // solve for B given A
                let mut rows2 = vec![vec![Cplx::<R>::zero(); mb.len()]; mono6.len()];
                for (ia, a) in ma.iter().enumerate() {
                    for (ib, b) in mb.iter().enumerate() {
                        let m6 = (a.0 + b.0, a.1 + b.1, a.2 + b.2);
                        rows2[pos6(&m6)][ib] = rows2[pos6(&m6)][ib] + avec[ia];
                    }
                }
                let Some(nb) = crate::numeric::lstsq(&rows2, &target) else {
                    break;
                };
                bvec = nb;
                // residual of the product
                let mut prod = vec![Cplx::<R>::zero(); mono6.len()];
                for (ia, a) in ma.iter().enumerate() {
                    for (ib, b) in mb.iter().enumerate() {
                        let m6 = (a.0 + b.0, a.1 + b.1, a.2 + b.2);
                        prod[pos6(&m6)] = prod[pos6(&m6)] + avec[ia] * bvec[ib];
                    }
                }
                let err = prod
                    .iter()
                    .zip(&target)
                    .fold(R::zero(), |acc, (x, y)| acc + (*x - *y).norm_sqr())
                    .sqrt();
                resid = (err / tn).to_f64();
            }
            best = best.min(resid);
        }
    }
    best
}

// ---------------------------------------------------------------------------
// Structure checks built on the fit.
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct CollinearityReport {
    /// σ₃/σ₁ of the stacked 5×3 coordinate matrix per transposition.
    pub rank_ratios: Vec<f64>,
    pub max_ratio: f64,
}

/// For each bisecant class: the two residual pairs of the triples at its
/// incidence parameters plus the complementary node must be collinear.
pub fn collinearity_report<R: Real>(
    inst: &CTInstance,
    cfg: &NumCfg,
) -> Result<CollinearityReport, PipelineError> {
    let curve = symbolic_curve(inst)?;
    let mut ratios = vec![];
    for (k, &(i, j)) in crate::lattice::TRANSPOSITIONS.iter().enumerate() {
        let line = crate::lines::ambient_line(&inst.beta[k]);
        let g = bisecant_polynomial(&curve, &line);
        if g.deg() != Some(2) {
            return Err(PipelineError::NonGeneric(format!(
                "bisecant polynomial degree {:?}",
                g.deg()
            )));
        }
        let gc: Vec<Cplx<R>> = g.coeffs.iter().map(rat_to_cplx).collect();
        let roots = crate::numeric::roots(&gc);
        let beta_n = line_to_numeric::<R>(&inst.beta[k]);
        let mut residuals: Vec<Vec<Cplx<R>>> = vec![];
        for t in roots {
            let Some(triple) = triple_at_complex::<R>(inst, t) else {
                return Err(PipelineError::NonGeneric(
                    "fiber degenerated at a bisecant parameter".into(),
                ));
            };
            // drop the member matching the bisecant class
            let mut dists: Vec<(usize, R)> = triple
                .iter()
                .enumerate()
                .map(|(idx, p)| (idx, crate::lines::line_dist(p, &beta_n)))
                .collect();
            dists.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
            let drop = dists[0].0;
            for (idx, p) in triple.iter().enumerate() {
                if idx != drop {
                    residuals.push(p.to_vec());
                }
            }
        }
        // complementary node
        let (r, s) = complement_pair(i, j);
        let node = line_to_numeric::<R>(&inst.beta[crate::lattice::transposition_index(r, s)]);
        residuals.push(node.to_vec());
        if residuals.len() != 5 {
            return Err(PipelineError::NonGeneric("missed residual points".into()));
        }
        let (sv, _) = crate::numeric::singular_values(
            &residuals
                .iter()
                .map(|v| normalize_cvec(v))
                .collect::<Vec<_>>(),
        );
        // rows are 5, cols 3: σ ascending, want rank ≤ 2: σ₁/σ₃ small
        let ratio = (sv[0] / sv[2]).to_f64();
        ratios.push(ratio);
        let _ = cfg;
    }
    let max_ratio = ratios.iter().cloned().fold(0.0f64, f64::max);
    Ok(CollinearityReport {
        rank_ratios: ratios,
        max_ratio,
    })
}

fn normalize_cvec<R: Real>(v: &[Cplx<R>]) -> Vec<Cplx<R>> {
    let n = v
        .iter()
        .fold(R::zero(), |acc, z| acc + z.norm_sqr())
        .sqrt();
    if n.is_zero() {
        return v.to_vec();
    }
    v.iter().map(|z| z.scale(R::one() / n)).collect()
}

pub fn complement_pair(i: usize, j: usize) -> (usize, usize) {
    let mut rest: Vec<usize> = (1..=4).filter(|&k| k != i && k != j).collect();
    rest.sort();
    (rest[0], rest[1])
}

#[derive(Clone, Debug, Serialize)]
pub struct VspSweep {
    pub solvable: usize,
    pub total: usize,
    pub max_residual: f64,
    pub min_coeff: f64,
}

/// Sum-of-three-squares certificates over all samples.
pub fn vsp_sweep<R: Real>(inst: &CTInstance) -> VspSweep {
    let mut solvable = 0;
    let mut maxr = 0.0f64;
    let mut minc = f64::INFINITY;
    for s in &inst.samples {
        let Some(triple) = triple_at_complex::<R>(inst, Cplx::real(rat_to_real(&s.t))) else {
            continue;
        };
        let (c, resid) = vsp_certificate_numeric(&triple);
        if let Some(c) = c {
            let small = c
                .iter()
                .fold(f64::INFINITY, |m, z| m.min(z.abs().to_f64()));
            if resid.to_f64() < 1e-6 {
                solvable += 1;
                maxr = maxr.max(resid.to_f64());
                minc = minc.min(small);
            }
        }
    }
    VspSweep {
        solvable,
        total: inst.samples.len(),
        max_residual: maxr,
        min_coeff: minc,
    }
}

// ---------------------------------------------------------------------------
// Serialization (schema_version 1).
// ---------------------------------------------------------------------------

pub fn rat_to_string(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn rat_from_string(s: &str) -> Result<Rat, PipelineError> {
    let (n, d) = s
        .split_once('/')
        .ok_or_else(|| PipelineError::Schema(format!("bad rational: {s}")))?;
    let n: num_bigint::BigInt = n
        .parse()
        .map_err(|_| PipelineError::Schema(format!("bad numerator: {s}")))?;
    let d: num_bigint::BigInt = d
        .parse()
        .map_err(|_| PipelineError::Schema(format!("bad denominator: {s}")))?;
    if d.is_zero() {
        return Err(PipelineError::Schema("zero denominator".into()));
    }
    Ok(Rat::new(n, d))
}

pub fn c64_to_string(z: &Cplx<f64>) -> String {
    // canonicalize signed zeros so renormalization is byte-stable
    let fix = |x: f64| if x == 0.0 { 0.0 } else { x };
    format!("{:?},{:?}", fix(z.re), fix(z.im))
}

pub fn c64_from_string(s: &str) -> Result<Cplx<f64>, PipelineError> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| PipelineError::Schema(format!("bad complex: {s}")))?;
    Ok(Cplx::new(
        re.parse()
            .map_err(|_| PipelineError::Schema(format!("bad real part: {s}")))?,
        im.parse()
            .map_err(|_| PipelineError::Schema(format!("bad imaginary part: {s}")))?,
    ))
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct SampleFile {
    pub t: String,
    pub b: Vec<String>,
    pub triple: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct InstanceFile {
    pub schema_version: u32,
    pub seed: u64,
    pub k_basis: Vec<Vec<String>>,
    pub conic: Vec<Vec<String>>,
    pub param: Vec<Vec<String>>,
    pub samples: Vec<SampleFile>,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub reports: serde_json::Value,
}

pub fn instance_to_file(inst: &CTInstance) -> InstanceFile {
    InstanceFile {
        schema_version: 1,
        seed: inst.seed,
        k_basis: inst
            .k_basis
            .iter()
            .map(|f| f.coeffs().iter().map(rat_to_string).collect())
            .collect(),
        conic: inst
            .conic
            .iter()
            .map(|row| row.iter().map(rat_to_string).collect())
            .collect(),
        param: inst
            .param
            .iter()
            .map(|row| row.iter().map(rat_to_string).collect())
            .collect(),
        samples: inst
            .samples
            .iter()
            .map(|s| SampleFile {
                t: rat_to_string(&s.t),
                b: s.b.coords.iter().map(rat_to_string).collect(),
                triple: s
                    .triple
                    .iter()
                    .map(|lp| lp.to_vec().iter().map(c64_to_string).collect())
                    .collect(),
            })
            .collect(),
        reports: serde_json::Value::Null,
    }
}

pub fn instance_from_file(file: &InstanceFile) -> Result<CTInstance, PipelineError> {
    if file.schema_version != 1 {
        return Err(PipelineError::Schema(format!(
            "unsupported schema_version {}",
            file.schema_version
        )));
    }
    let parse_form = |v: &Vec<String>| -> Result<QForm, PipelineError> {
        let coeffs: Result<Vec<Rat>, _> = v.iter().map(|s| rat_from_string(s)).collect();
        Ok(BinaryForm::new(coeffs?))
    };
    if file.k_basis.len() != 3 || file.k_basis.iter().any(|r| r.len() != 5) {
        return Err(PipelineError::Schema("k_basis must be 3×5".into()));
    }
    if file.conic.len() != 3 || file.conic.iter().any(|r| r.len() != 3) {
        return Err(PipelineError::Schema("conic must be 3×3".into()));
    }
    if file.param.len() != 3 || file.param.iter().any(|r| r.len() != 3) {
        return Err(PipelineError::Schema("param must be 3×3".into()));
    }
    let k_basis: [QForm; 3] = [
        parse_form(&file.k_basis[0])?,
        parse_form(&file.k_basis[1])?,
        parse_form(&file.k_basis[2])?,
    ];
    let mat = |m: &Vec<Vec<String>>| -> Result<[[Rat; 3]; 3], PipelineError> {
        let mut out = eye3();
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = rat_from_string(&m[i][j])?;
            }
        }
        Ok(out)
    };
    // rebuild derived data from the basis
    let squares = k_basis.clone();
    let section = veronese_plane_section(&squares)?;
    let PlaneSection::Finite { distinct, rational } = section else {
        return Err(PipelineError::Schema("degenerate plane in file".into()));
    };
    if distinct != 4 || rational.len() != 4 {
        return Err(PipelineError::Schema(
            "plane in file has no rational four-point section".into(),
        ));
    }
    // recover eps in the stored order: square roots of the three basis forms
    // first, then the derived point
    let mut eps: Vec<LinePoint<Rat>> = vec![];
    for f in &k_basis {
        let q = crate::wedge::square_root_on_cone(f)
            .ok_or_else(|| PipelineError::Schema("k_basis entry is not a square".into()))?;
        eps.push(LinePoint::new(q).map_err(PipelineError::from)?);
    }
    let fourth = rational
        .iter()
        .find(|f| eps.iter().all(|e| e.form() != *f))
        .ok_or_else(|| PipelineError::Schema("missing fourth section point".into()))?;
    eps.push(LinePoint::new(fourth.clone()).map_err(PipelineError::from)?);
    let eps: [LinePoint<Rat>; 4] = [
        eps[0].clone(),
        eps[1].clone(),
        eps[2].clone(),
        eps[3].clone(),
    ];
    let polars: [PolarLine<Rat>; 4] = std::array::from_fn(|i| m_of_line(&eps[i]));
    let mut beta = vec![];
    for &(i, j) in crate::lattice::TRANSPOSITIONS.iter() {
        beta.push(polar_lines_cross(&polars[i - 1], &polars[j - 1]).map_err(PipelineError::from)?);
    }
    let beta: [LinePoint<Rat>; 6] = std::array::from_fn(|k| beta[k].clone());
    let mut samples = vec![];
    for s in &file.samples {
        if s.b.len() != 10 || s.triple.len() != 3 || s.triple.iter().any(|t| t.len() != 3) {
            return Err(PipelineError::Schema("malformed sample".into()));
        }
        let t = rat_from_string(&s.t)?;
        let coords: Result<Vec<Rat>, _> = s.b.iter().map(|x| rat_from_string(x)).collect();
        let coords = coords?;
        let b = Wedge2 {
            coords: std::array::from_fn(|k| coords[k].clone()),
        };
        let mut triple = vec![];
        for tv in &s.triple {
            let vals: Result<Vec<Cplx<f64>>, _> = tv.iter().map(|x| c64_from_string(x)).collect();
            let vals = vals?;
            triple.push(
                LinePoint::new_numeric(BinaryForm::new(vals))
                    .map_err(PipelineError::from)?,
            );
        }
        samples.push(Sample {
            t,
            b,
            triple: [triple[0].clone(), triple[1].clone(), triple[2].clone()],
        });
    }
    Ok(CTInstance {
        seed: file.seed,
        k_basis,
        eps,
        beta,
        conic: mat(&file.conic)?,
        param: mat(&file.param)?,
        samples,
        attempts: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rint;

    fn cfg_small() -> NumCfg {
        NumCfg {
            samples: 30,
            threads: 1,
            ..NumCfg::default()
        }
    }

    #[test]
    fn instance_build_is_deterministic() {
        let cfg = cfg_small();
        let a = build_instance(7, &cfg).unwrap();
        let b = build_instance(7, &cfg).unwrap();
        assert_eq!(a.k_basis[0], b.k_basis[0]);
        assert_eq!(a.conic, b.conic);
        assert_eq!(a.samples.len(), b.samples.len());
        for (x, y) in a.samples.iter().zip(&b.samples) {
            assert_eq!(x.b, y.b);
        }
        let c = build_instance(8, &cfg).unwrap();
        assert!(a.k_basis != c.k_basis || a.conic != c.conic);
    }

    #[test]
    fn instance_invariants() {
        let inst = build_instance(3, &cfg_small()).unwrap();
        // eps pairwise non-polar, beta incidences exact
        for i in 0..4 {
            for j in (i + 1)..4 {
                assert!(!polar_pairing(inst.eps[i].form(), inst.eps[j].form()).is_zero());
            }
        }
        for (k, &(i, j)) in crate::lattice::TRANSPOSITIONS.iter().enumerate() {
            assert!(polar_pairing(inst.beta[k].form(), inst.eps[i - 1].form()).is_zero());
            assert!(polar_pairing(inst.beta[k].form(), inst.eps[j - 1].form()).is_zero());
        }
        // every sample exactly on B
        for s in &inst.samples {
            assert!(on_b(&s.b).unwrap());
        }
        // plane closes up through the lines module round trip
        let k = crate::lines::plane_from_lines(&inst.eps).unwrap();
        let mut rows: Vec<Vec<Rat>> = k.iter().map(|f| f.coeffs().to_vec()).collect();
        for f in &inst.k_basis {
            rows.push(f.coeffs().to_vec());
        }
        assert_eq!(rank(&rows), 3);
    }

    #[test]
    fn samples_have_polar_triples() {
        let inst = build_instance(11, &cfg_small()).unwrap();
        for s in inst.samples.iter().take(6) {
            for i in 0..3 {
                for j in (i + 1)..3 {
                    let p = polar_pairing(s.triple[i].form(), s.triple[j].form());
                    assert!(p.abs() < 1e-9, "pairing {} at t={}", p.abs(), s.t);
                }
            }
        }
    }

    #[test]
    fn symbolic_curve_matches_samples() {
        let inst = build_instance(5, &cfg_small()).unwrap();
        let curve = symbolic_curve(&inst).unwrap();
        assert_eq!(curve.degree, 6);
        // ω(t) evaluated at a sample parameter is proportional to the stored b
        let s = &inst.samples[3];
        let at: Vec<Rat> = curve.omega.iter().map(|p| p.eval(&s.t)).collect();
        let w = Wedge2::<Rat> {
            coords: std::array::from_fn(|k| at[k].clone()),
        };
        let w = normalize_wedge(&w);
        assert_eq!(w, s.b);
    }

    #[test]
    fn branch_count_is_twelve() {
        let inst = build_instance(2, &cfg_small()).unwrap();
        let br = branch_report(&inst).unwrap();
        assert_eq!(br.degree, 12);
        assert_eq!(br.count, 12);
        assert!(br.all_simple);
        assert_eq!(br.hurwitz_genus, 4);
        assert!(br.cross_check < 1e-6, "cross check {}", br.cross_check);
    }

    #[test]
    fn bisecants_hit_twice() {
        let inst = build_instance(13, &cfg_small()).unwrap();
        let bis = bisecant_report(&inst).unwrap();
        assert!(bis.all_two_simple, "{:?}", bis.pattern);
    }

    #[test]
    fn fit_finds_the_sextic() {
        let inst = build_instance(17, &cfg_small()).unwrap();
        let fit = fit_sextic::<f64>(&inst, &cfg_small()).unwrap();
        assert!(fit.residual < 1e-10, "residual {}", fit.residual);
        assert!(fit.gap < 1e-6, "gap {}", fit.gap);
        // nodes: value and gradient vanish, Hessian does not
        for b in &inst.beta {
            let bn = line_to_numeric::<f64>(b);
            let v = bn.to_vec();
            let cert = node_certificate(&fit.coeffs, &[v[0], v[1], v[2]]);
            assert!(cert.value < 1e-9, "node value {}", cert.value);
            assert!(cert.gradient < 1e-7, "node gradient {}", cert.gradient);
            assert!(cert.hessian_det > 1e-9, "node hessian {}", cert.hessian_det);
        }
        // smooth at the samples
        for s in inst.samples.iter().take(4) {
            let p = s.triple[0].to_vec();
            let cert = node_certificate(&fit.coeffs, &[p[0], p[1], p[2]]);
            assert!(cert.value < 1e-8);
            assert!(cert.gradient > 1e-6, "sample should be a smooth point");
        }
        // no low-degree factor
        let fr = factor_search_residual(&fit.coeffs, 17);
        assert!(fr > 1e-3, "factor residual {}", fr);
    }

    #[test]
    fn collinearity_of_residual_points() {
        let inst = build_instance(23, &cfg_small()).unwrap();
        let rep = collinearity_report::<f64>(&inst, &cfg_small()).unwrap();
        assert_eq!(rep.rank_ratios.len(), 6);
        assert!(rep.max_ratio < 1e-8, "{:?}", rep.rank_ratios);
    }

    #[test]
    fn vsp_certificates_sweep() {
        let inst = build_instance(29, &cfg_small()).unwrap();
        let sweep = vsp_sweep::<f64>(&inst);
        assert_eq!(sweep.solvable, sweep.total);
        assert!(sweep.min_coeff > 1e-8);
    }

    #[test]
    fn file_roundtrip_is_exact() {
        let inst = build_instance(31, &cfg_small()).unwrap();
        let file = instance_to_file(&inst);
        let json = serde_json::to_string_pretty(&file).unwrap();
        let parsed: InstanceFile = serde_json::from_str(&json).unwrap();
        let back = instance_from_file(&parsed).unwrap();
        assert_eq!(back.k_basis[1], inst.k_basis[1]);
        assert_eq!(back.eps[3], inst.eps[3]);
        assert_eq!(back.beta[5], inst.beta[5]);
        for (a, b) in back.samples.iter().zip(&inst.samples) {
            assert_eq!(a.t, b.t);
            assert_eq!(a.b, b.b);
        }
        // byte-identical re-serialization
        let json2 = serde_json::to_string_pretty(&instance_to_file(&back)).unwrap();
        assert_eq!(json, json2);
    }

    #[test]
    fn corrupted_sample_detected() {
        let inst = build_instance(37, &cfg_small()).unwrap();
        let mut file = instance_to_file(&inst);
        file.samples[2].b[0] = rat_to_string(&rint(999));
        let back = instance_from_file(&file).unwrap();
        let bad = back.samples.iter().any(|s| !on_b(&s.b).unwrap());
        assert!(bad);
    }
}
