//! Reconstruction of a conic-type sextic from its plane spin-curve model.
//!
//! Input: a six-nodal plane sextic whose nodes form the (4,6) configuration
//! of four general lines. Sought: a smooth conic Q that identifies the
//! plane with the plane of lines of B (carrying Q to the invariant conic)
//! so that the configuration data lifts coherently: the four poles of the
//! configuration lines become four disjoint lines of B spanning a common
//! hyperplane section, and the polar lines of two complementary nodes cut
//! the sextic in two Q-orthogonal point pairs each.
//!
//! The solver works on charts of the admissible conic family (the conics
//! with `Q(n₁₄, n₂₃) = 0`). The four orthogonality residuals vanish in
//! particular on the smaller subfamily where all three complementary node
//! pairs are Q-orthogonal — on B complementary bisecants always meet — so
//! multistart Gauss–Newton runs there first, and the square 4-parameter
//! Newton of the full admissible family polishes the result. Certificates
//! then rebuild the instance: the recovered intersection points of the
//! bisecants with the sextic pin down the conic in the recovered plane K,
//! and sampled line triples of the rebuilt curve must land on the input
//! sextic.

use crate::binary_form::BinaryForm;
use crate::lines::m_of_line;
use crate::numeric::{form_roots_projective, lstsq, proj_dist};
use crate::pipeline::{
    kernel_numeric, sextic_eval_rel, sextic_monomials, CTInstance, NumCfg, PlaneFit,
};
use crate::scalar::{rat_to_cplx, Cplx, Rat, Real};
use crate::wedge::pair_index;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ReconError {
    #[error("configuration is degenerate: {0}")]
    BadConfiguration(String),
    #[error("model validation failed: {0}")]
    BadModel(String),
    #[error("conic is singular")]
    SingularConic,
    #[error("no convergent start (best residual {0:.3e})")]
    NoConvergence(f64),
    #[error("certificate {0} failed (measure {1:.3e})")]
    Certificate(usize, f64),
}

type C<R> = Cplx<R>;
pub type Sym3<R> = [[Cplx<R>; 3]; 3];

fn cross3c<R: Real>(u: &[C<R>; 3], v: &[C<R>; 3]) -> [C<R>; 3] {
    [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]
}

fn vec_norm<R: Real>(v: &[C<R>]) -> R {
    v.iter()
        .fold(R::zero(), |acc, z| acc + z.norm_sqr())
        .sqrt()
}

fn normalize3<R: Real>(v: &[C<R>; 3]) -> [C<R>; 3] {
    let n = vec_norm(v);
    if n.is_zero() {
        return *v;
    }
    std::array::from_fn(|i| v[i].scale(R::one() / n))
}

/// Four general lines of the plane with their six intersection nodes.
#[derive(Clone, Debug)]
pub struct Configuration46<R: Real> {
    pub lines: [[C<R>; 3]; 4],
    /// n_ij indexed like `lattice::TRANSPOSITIONS`.
    pub nodes: [[C<R>; 3]; 6],
}

impl<R: Real> Configuration46<R> {
    pub fn new(lines: [[C<R>; 3]; 4]) -> Result<Self, ReconError> {
        let lines: [[C<R>; 3]; 4] = std::array::from_fn(|i| normalize3(&lines[i]));
        for i in 0..4 {
            if vec_norm(&lines[i]).is_zero() {
                return Err(ReconError::BadConfiguration("zero line".into()));
            }
            for j in (i + 1)..4 {
                let c = cross3c(&lines[i], &lines[j]);
                if vec_norm(&c).to_f64() < 1e-9 {
                    return Err(ReconError::BadConfiguration(format!(
                        "lines {i} and {j} coincide"
                    )));
                }
            }
        }
        // no three concurrent: det of each line triple stays away from zero
        for a in 0..4 {
            for b in (a + 1)..4 {
                for c in (b + 1)..4 {
                    let d = det3c(&lines[a], &lines[b], &lines[c]);
                    if d.abs().to_f64() < 1e-9 {
                        return Err(ReconError::BadConfiguration(format!(
                            "lines {a},{b},{c} are concurrent"
                        )));
                    }
                }
            }
        }
        let nodes: [[C<R>; 3]; 6] = std::array::from_fn(|k| {
            let (i, j) = crate::lattice::TRANSPOSITIONS[k];
            normalize3(&cross3c(&lines[i - 1], &lines[j - 1]))
        });
        for i in 0..6 {
            for j in (i + 1)..6 {
                if proj_dist(&nodes[i], &nodes[j]).to_f64() < 1e-9 {
                    return Err(ReconError::BadConfiguration("coincident nodes".into()));
                }
            }
        }
        Ok(Configuration46 { lines, nodes })
    }
}

fn det3c<R: Real>(a: &[C<R>; 3], b: &[C<R>; 3], c: &[C<R>; 3]) -> C<R> {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
}

/// A conic of the model plane: symmetric 3×3 matrix up to scale.
#[derive(Clone, Debug)]
pub struct ConicQ<R: Real> {
    pub m: Sym3<R>,
}

impl<R: Real> ConicQ<R> {
    pub fn new(m: Sym3<R>) -> Self {
        ConicQ { m }
    }

    pub fn eval(&self, u: &[C<R>; 3], v: &[C<R>; 3]) -> C<R> {
        let mut acc = C::<R>::zero();
        for i in 0..3 {
            for j in 0..3 {
                acc = acc + self.m[i][j] * u[i] * v[j];
            }
        }
        acc
    }

    pub fn frobenius(&self) -> R {
        let mut acc = R::zero();
        for i in 0..3 {
            for j in 0..3 {
                acc = acc + self.m[i][j].norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn det(&self) -> C<R> {
        det3c(
            &[self.m[0][0], self.m[0][1], self.m[0][2]],
            &[self.m[1][0], self.m[1][1], self.m[1][2]],
            &[self.m[2][0], self.m[2][1], self.m[2][2]],
        )
    }

    /// Relative smoothness measure |det| / ‖Q‖³.
    pub fn smoothness(&self) -> f64 {
        let f = self.frobenius();
        (self.det().abs() / (f * f * f)).to_f64()
    }

    /// Normalized pairing, scale-free in all three arguments.
    pub fn pairing(&self, u: &[C<R>; 3], v: &[C<R>; 3]) -> C<R> {
        let s = self.frobenius() * vec_norm(u) * vec_norm(v);
        self.eval(u, v).scale(R::one() / s)
    }

    /// Polar line of a point.
    pub fn pol_line(&self, p: &[C<R>; 3]) -> [C<R>; 3] {
        std::array::from_fn(|i| (0..3).fold(C::zero(), |acc, j| acc + self.m[i][j] * p[j]))
    }

    /// Pole of a line (adjugate applied to the line vector).
    pub fn pol_point(&self, l: &[C<R>; 3]) -> [C<R>; 3] {
        let m = &self.m;
        let cof = |r0: usize, r1: usize, c0: usize, c1: usize| {
            m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]
        };
        let adj: Sym3<R> = [
            [cof(1, 2, 1, 2), -cof(1, 2, 0, 2), cof(1, 2, 0, 1)],
            [-cof(0, 2, 1, 2), cof(0, 2, 0, 2), -cof(0, 2, 0, 1)],
            [cof(0, 1, 1, 2), -cof(0, 1, 0, 2), cof(0, 1, 0, 1)],
        ];
        // adjugate is symmetric for symmetric m; apply its transpose rows
        std::array::from_fn(|i| (0..3).fold(C::zero(), |acc, j| acc + adj[j][i] * l[j]))
    }
}

/// A plane sextic with its (4,6) configuration, validated to be singular
/// with ordinary nodes exactly at the six configuration nodes.
#[derive(Clone, Debug)]
pub struct SexticModel<R: Real> {
    pub coeffs: Vec<R>,
    pub conf: Configuration46<R>,
}

impl<R: Real> SexticModel<R> {
    pub fn new(coeffs: Vec<R>, conf: Configuration46<R>, tol: f64) -> Result<Self, ReconError> {
        assert_eq!(coeffs.len(), 28);
        for (k, n) in conf.nodes.iter().enumerate() {
            let cert = crate::pipeline::node_certificate(&coeffs, n);
            if cert.value > tol {
                return Err(ReconError::BadModel(format!(
                    "node {k}: sextic does not pass through it (value {:.3e})",
                    cert.value
                )));
            }
            if cert.gradient > tol.sqrt() {
                return Err(ReconError::BadModel(format!(
                    "node {k}: not singular (gradient {:.3e})",
                    cert.gradient
                )));
            }
            if cert.hessian_det < 1e-9 {
                return Err(ReconError::BadModel(format!(
                    "node {k}: not an ordinary node (hessian measure {:.3e})",
                    cert.hessian_det
                )));
            }
        }
        Ok(SexticModel { coeffs, conf })
    }

    /// Restriction of the sextic to a line through two spanning points, as a
    /// degree-6 binary form in the line parameters (s, u).
    pub fn restrict_to_line(&self, p0: &[C<R>; 3], p1: &[C<R>; 3]) -> BinaryForm<C<R>> {
        let lx: [BinaryForm<C<R>>; 3] = std::array::from_fn(|v| {
            BinaryForm::new(vec![p0[v], p1[v]])
        });
        let mut pw: [Vec<BinaryForm<C<R>>>; 3] = std::array::from_fn(|_| vec![]);
        for v in 0..3 {
            let mut acc = BinaryForm::monomial(0, 0);
            pw[v].push(acc.clone());
            for _ in 0..6 {
                acc = acc.mul(&lx[v]);
                pw[v].push(acc.clone());
            }
        }
        let mut out: BinaryForm<C<R>> = BinaryForm::zero_of_degree(6);
        for ((i, j, k), c) in sextic_monomials().iter().zip(&self.coeffs) {
            let term = pw[0][*i].mul(&pw[1][*j]).mul(&pw[2][*k]);
            out = out.add(&term.scale(&C::real(*c)));
        }
        out
    }
}

/// Two spanning points of a plane line, chosen from the coordinate frame.
pub fn span_of_line<R: Real>(l: &[C<R>; 3]) -> ([C<R>; 3], [C<R>; 3]) {
    let mags: [R; 3] = std::array::from_fn(|i| l[i].abs());
    let mut k = 0;
    for i in 1..3 {
        if mags[i] > mags[k] {
            k = i;
        }
    }
    let e = |i: usize| -> [C<R>; 3] {
        std::array::from_fn(|j| if i == j { C::one() } else { C::zero() })
    };
    let others: Vec<usize> = (0..3).filter(|&i| i != k).collect();
    (
        normalize3(&cross3c(l, &e(others[0]))),
        normalize3(&cross3c(l, &e(others[1]))),
    )
}

// ---------------------------------------------------------------------------
// Admissible conic families.
// ---------------------------------------------------------------------------

fn sym_basis<R: Real>() -> [Sym3<R>; 6] {
    let mut out: [Sym3<R>; 6] = std::array::from_fn(|_| {
        std::array::from_fn(|_| std::array::from_fn(|_| C::zero()))
    });
    let idx = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];
    for (k, &(i, j)) in idx.iter().enumerate() {
        out[k][i][j] = C::one();
        out[k][j][i] = C::one();
    }
    out
}

/// Basis of the conics with the given node pairs orthogonal. `pairs` are
/// indices into `TRANSPOSITIONS`, paired with their complements.
fn constrained_family<R: Real>(
    conf: &Configuration46<R>,
    pairs: &[(usize, usize)],
) -> Vec<Sym3<R>> {
    let basis = sym_basis::<R>();
    let rows: Vec<Vec<C<R>>> = pairs
        .iter()
        .map(|&(a, b)| {
            basis
                .iter()
                .map(|e| ConicQ::new(*e).eval(&conf.nodes[a], &conf.nodes[b]))
                .collect()
        })
        .collect();
    let ker = kernel_numeric(&rows);
    ker.iter()
        .map(|v| {
            let mut m: Sym3<R> =
                std::array::from_fn(|_| std::array::from_fn(|_| C::zero()));
            for (k, e) in basis.iter().enumerate() {
                for i in 0..3 {
                    for j in 0..3 {
                        m[i][j] = m[i][j] + e[i][j] * v[k];
                    }
                }
            }
            m
        })
        .collect()
}

/// The admissible 5-dimensional linear family `{Q : Q(n₁₄, n₂₃) = 0}`.
pub fn admissible_family<R: Real>(conf: &Configuration46<R>) -> Vec<Sym3<R>> {
    let k14 = crate::lattice::transposition_index(1, 4);
    let k23 = crate::lattice::transposition_index(2, 3);
    constrained_family(conf, &[(k14, k23)])
}

/// The subfamily with all three complementary node pairs orthogonal.
/// The three pair functionals of a complete quadrilateral satisfy one
/// linear relation (n₁₂⊙n₃₄ - n₁₃⊙n₂₄ + n₁₄⊙n₂₃ = 0 in suitable scalings),
/// so this family is 4-dimensional: two conditions buy the third. Every
/// conic that lifts the configuration onto B lies here — complementary
/// bisecants always meet — and the multistart search runs on its charts.
pub fn strict_family<R: Real>(conf: &Configuration46<R>) -> Vec<Sym3<R>> {
    let t = |i, j| crate::lattice::transposition_index(i, j);
    constrained_family(
        conf,
        &[(t(1, 2), t(3, 4)), (t(1, 3), t(2, 4)), (t(1, 4), t(2, 3))],
    )
}

// ---------------------------------------------------------------------------
// The incidence residual.
// ---------------------------------------------------------------------------

/// Diagnostics of one polar-line slice: the four residual intersection
/// points and the matched orthogonality values.
#[derive(Clone, Debug)]
pub struct SliceData<R: Real> {
    pub points: [[C<R>; 3]; 4],
    /// matched pairs as indices into `points`
    pub matching: [(usize, usize); 2],
    pub residuals: [C<R>; 2],
}

/// The four orthogonality residuals of the polar lines of the node pair
/// (n₁₂, n₃₄): each line meets the sextic in the complementary node (twice)
/// plus four simple points, which must pair into Q-orthogonal couples.
pub fn incidence_residual<R: Real>(
    q: &ConicQ<R>,
    model: &SexticModel<R>,
) -> Result<([C<R>; 4], [SliceData<R>; 2]), ReconError> {
    if q.smoothness() < 1e-12 {
        return Err(ReconError::SingularConic);
    }
    let k12 = crate::lattice::transposition_index(1, 2);
    let k34 = crate::lattice::transposition_index(3, 4);
    let sa = slice(q, model, k12, k34)?;
    let sb = slice(q, model, k34, k12)?;
    Ok((
        [
            sa.residuals[0],
            sa.residuals[1],
            sb.residuals[0],
            sb.residuals[1],
        ],
        [sa, sb],
    ))
}

/// One slice: polar line of node `kn`, expected to pass near the node `kc`.
pub fn slice<R: Real>(
    q: &ConicQ<R>,
    model: &SexticModel<R>,
    kn: usize,
    kc: usize,
) -> Result<SliceData<R>, ReconError> {
    let line = q.pol_line(&model.conf.nodes[kn]);
    if vec_norm(&line).to_f64() < 1e-14 {
        return Err(ReconError::SingularConic);
    }
    let (p0, p1) = span_of_line(&line);
    let restr = model.restrict_to_line(&p0, &p1);
    if restr.is_zero() {
        return Err(ReconError::BadModel("line lies on the sextic".into()));
    }
    let roots = form_roots_projective(restr.coeffs(), 1e-12);
    if roots.len() != 6 {
        return Err(ReconError::BadModel("polar line is tangent at infinity".into()));
    }
    let pts: Vec<[C<R>; 3]> = roots
        .iter()
        .map(|(s, u)| normalize3(&std::array::from_fn(|i| p0[i] * *s + p1[i] * *u)))
        .collect();
    // drop the two points nearest the complementary node
    let node = &model.conf.nodes[kc];
    let mut order: Vec<usize> = (0..6).collect();
    order.sort_by(|&a, &b| {
        proj_dist(&pts[a], node)
            .partial_cmp(&proj_dist(&pts[b], node))
            .unwrap()
    });
    let keep: Vec<usize> = order[2..].to_vec();
    let pp: [[C<R>; 3]; 4] = std::array::from_fn(|i| pts[keep[i]]);
    // best of the three perfect matchings
    let matchings = [[(0usize, 1usize), (2, 3)], [(0, 2), (1, 3)], [(0, 3), (1, 2)]];
    let mut best: Option<([(usize, usize); 2], [C<R>; 2], R)> = None;
    for m in matchings {
        let r0 = q.pairing(&pp[m[0].0], &pp[m[0].1]);
        let r1 = q.pairing(&pp[m[1].0], &pp[m[1].1]);
        let score = r0.norm_sqr() + r1.norm_sqr();
        match &best {
            Some((_, _, s)) if *s <= score => {}
            _ => best = Some((m, [r0, r1], score)),
        }
    }
    let (matching, residuals, _) = best.unwrap();
    Ok(SliceData {
        points: pp,
        matching,
        residuals,
    })
}

// ---------------------------------------------------------------------------
// The solver.
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct SolveDiagnostics {
    pub starts: usize,
    pub converged: usize,
    pub screened: usize,
    pub trace_length: usize,
    pub best_residual: f64,
}

pub struct SolveResult<R: Real> {
    pub q: ConicQ<R>,
    pub residual: f64,
    pub diagnostics: SolveDiagnostics,
    /// All screened candidate conics, best first.
    pub candidates: Vec<(ConicQ<R>, f64)>,
}

fn family_point<R: Real>(family: &[Sym3<R>], base: usize, w: &[C<R>]) -> ConicQ<R> {
    let mut m: Sym3<R> = family[base];
    let mut wi = 0;
    for (k, e) in family.iter().enumerate() {
        if k == base {
            continue;
        }
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = m[i][j] + e[i][j] * w[wi];
            }
        }
        wi += 1;
    }
    ConicQ::new(m)
}

fn residual_norm<R: Real>(r: &[C<R>]) -> f64 {
    r.iter().fold(0.0f64, |m, z| m.max(z.abs().to_f64()))
}

/// All twelve orthogonality residuals: the matched pairs on the polar lines
/// of all six nodes. On a conic that lifts the configuration onto B every
/// component vanishes (each bisecant meets the curve in two points whose
/// trigonal partners pair up), so the overdetermined system isolates the
/// identification where the four-condition square system alone leaves a
/// positive-dimensional near-solution set on the strict family.
pub fn full_residual<R: Real>(
    q: &ConicQ<R>,
    model: &SexticModel<R>,
) -> Result<Vec<C<R>>, ReconError> {
    let mut out = vec![];
    for k in 0..6 {
        let (i, j) = crate::lattice::TRANSPOSITIONS[k];
        let (r, s) = crate::pipeline::complement_pair(i, j);
        let kc = crate::lattice::transposition_index(r, s);
        let sl = slice(q, model, k, kc)?;
        out.push(sl.residuals[0]);
        out.push(sl.residuals[1]);
    }
    Ok(out)
}

fn eval_residual<R: Real>(
    family: &[Sym3<R>],
    base: usize,
    w: &[C<R>],
    model: &SexticModel<R>,
    full: bool,
) -> Option<Vec<C<R>>> {
    let q = family_point(family, base, w);
    if q.smoothness() < 1e-13 {
        return None;
    }
    if full {
        full_residual(&q, model).ok()
    } else {
        incidence_residual(&q, model).ok().map(|(r, _)| r.to_vec())
    }
}

/// Damped Gauss–Newton on `dim` chart parameters against the residuals.
fn gauss_newton<R: Real>(
    family: &[Sym3<R>],
    base: usize,
    start: Vec<C<R>>,
    model: &SexticModel<R>,
    iters: usize,
    full: bool,
) -> Option<(Vec<C<R>>, f64, usize)> {
    let dim = start.len();
    let mut w = start;
    let mut r = eval_residual(family, base, &w, model, full)?;
    let m = r.len();
    let mut rn = residual_norm(&r);
    let h = R::from_f64(1e-7);
    let mut steps = 0;
    for _ in 0..iters {
        if rn < 1e-13 {
            break;
        }
        let mut jac: Vec<Vec<C<R>>> = vec![vec![C::zero(); dim]; m];
        for d in 0..dim {
            let mut wp = w.clone();
            wp[d] = wp[d] + C::real(h);
            let rp = eval_residual(family, base, &wp, model, full)?;
            for i in 0..m {
                jac[i][d] = (rp[i] - r[i]).scale(R::one() / h);
            }
        }
        let rhs: Vec<C<R>> = r.iter().map(|z| -*z).collect();
        let dw = lstsq(&jac, &rhs)?;
        let mut improved = false;
        let mut scale = R::one();
        for _ in 0..7 {
            let wn: Vec<C<R>> = (0..dim).map(|d| w[d] + dw[d].scale(scale)).collect();
            if let Some(rnew) = eval_residual(family, base, &wn, model, full) {
                let nn = residual_norm(&rnew);
                if nn < rn {
                    w = wn;
                    r = rnew;
                    rn = nn;
                    improved = true;
                    break;
                }
            }
            scale = scale / R::from_f64(2.0);
        }
        steps += 1;
        if !improved {
            break;
        }
    }
    Some((w, rn, steps))
}

/// Finds an identification conic: multistart Gauss–Newton on the strict
/// family, then a square Newton polish in a chart of the admissible family.
/// With `init` present, only the polish runs from the given conic.
pub fn solve_q<R: Real>(
    model: &SexticModel<R>,
    init: Option<&ConicQ<R>>,
    cfg: &NumCfg,
    seed: u64,
) -> Result<SolveResult<R>, ReconError> {
    let adm = admissible_family(model.conf_ref());
    if adm.len() != 5 {
        return Err(ReconError::BadConfiguration(format!(
            "admissible family has dimension {}",
            adm.len()
        )));
    }
    if let Some(q0) = init {
        let (q, rn, steps) = polish_in_admissible(&adm, q0, model)?;
        return Ok(SolveResult {
            residual: rn,
            diagnostics: SolveDiagnostics {
                starts: 0,
                converged: 1,
                screened: 1,
                trace_length: steps,
                best_residual: rn,
            },
            candidates: vec![(q.clone(), rn)],
            q,
        });
    }
    let strict = strict_family(model.conf_ref());
    if strict.len() != 4 {
        return Err(ReconError::BadConfiguration(format!(
            "strict family has dimension {}",
            strict.len()
        )));
    }
    // Candidate search: for a fixed guess of the polar line of a node (one
    // parameter λ in the pencil through the complementary node), every
    // remaining condition on Q is linear, so candidate λ are the rank drops
    // of a stacked linear system. A tan-spread grid with local refinement
    // replaces blind multistart, which measurably never lands in the true
    // basin here; `multistart` sizes the grid.
    let grid = (4 * cfg.multistart).max(64);
    let pool = cfg.pool();
    // solve in a canonical frame: four nodes in general position go to the
    // standard projective frame, which makes the search invariant under
    // projective scrambles of the input (a badly conditioned frame can cost
    // several digits of model self-consistency in the f64 shadow)
    let frame = frame_projectivity(&model.conf);
    let (framed, back): (SexticModel<R>, Option<[[C<R>; 3]; 3]>) = match &frame {
        Some(h) => match scramble_model(model, h) {
            Ok(fm) => {
                let hinv = inv3(h);
                (fm, hinv)
            }
            Err(_) => (model.clone(), None),
        },
        None => (model.clone(), None),
    };
    let work_model = if back.is_some() { &framed } else { model };
    // candidate localization, refinement, deduplication and screening all
    // run on the f64 shadow; only the survivors (generically a single
    // conic) are lifted and re-refined at the working precision
    let model64 = downcast_model(work_model)?;
    let strict64 = strict_family(&model64.conf);
    let mut raw: Vec<(ConicQ<f64>, f64)> = vec![];
    let mut evals = 0usize;
    for (kn, kc) in complementary_axis_pairs() {
        let (cands, n) = pencil_sweep(&model64, kn, kc, grid, &pool);
        evals += n;
        raw.extend(cands);
    }
    let _ = seed;
    let mut best_overall = f64::INFINITY;
    let mut candidates: Vec<(ConicQ<f64>, f64, usize)> = vec![];
    for (idx, (q, _sigma)) in raw.into_iter().enumerate() {
        let Ok(wc) = strict_coords(&strict64, &q) else {
            continue;
        };
        let Some((wf, rn, _st)) = gauss_newton(&strict64, wc.0, wc.1, &model64, 30, true)
        else {
            continue;
        };
        best_overall = best_overall.min(rn);
        // loose gate: this stage only separates honest candidates (the
        // f64 shadow's noise floor can reach 1e-5 on hard instances) from
        // spurious ones (full residuals 0.1 and up); the working-precision
        // refinement below drives survivors to the reported tolerance
        if rn > 1e-3 {
            continue;
        }
        let qf = family_point(&strict64, wc.0, &wf);
        let qv: Vec<C<f64>> = qf.m.iter().flatten().cloned().collect();
        if candidates.iter().any(|(c, _, _)| {
            let cv: Vec<C<f64>> = c.m.iter().flatten().cloned().collect();
            proj_dist(&qv, &cv) < 1e-6
        }) {
            continue;
        }
        candidates.push((qf, rn, idx));
    }
    let converged = candidates.len();
    let mut screened: Vec<(ConicQ<R>, f64, usize)> = vec![];
    for (q, rn, idx) in candidates {
        if screen_candidate(&q, &model64) {
            // lift, transport to the input frame, re-refine there
            let mut ql = lift_conic::<R>(&q);
            if let Some(hinv) = &back {
                match scramble_conic(&ql, hinv) {
                    Some(t) => ql = t,
                    None => continue,
                }
            }
            let Ok(wc) = strict_coords(&strict, &ql) else {
                continue;
            };
            match gauss_newton(&strict, wc.0, wc.1, model, 6, true) {
                Some((wf, rnp, _)) => {
                    screened.push((family_point(&strict, wc.0, &wf), rnp.min(rn), idx))
                }
                None => screened.push((ql, rn, idx)),
            }
        }
    }
    let screened_count = screened.len();
    // the admissible-chart square polish, then order by the full residual
    let mut out: Vec<(ConicQ<R>, f64, f64, usize)> = vec![];
    for (q, _rn, idx) in &screened {
        if let Ok((qp, rnp, _steps)) = polish_in_admissible(&adm, q, model) {
            // the refinement can drift into the degenerate stratum where
            // two poles become polar and the residual still shrinks;
            // re-screen at working precision
            if !screen_candidate(&qp, model) {
                continue;
            }
            let fr = full_residual(&qp, model)
                .map(|r| residual_norm(&r))
                .unwrap_or(f64::INFINITY);
            out.push((qp, rnp, fr, *idx));
        }
    }
    out.sort_by(|a, b| (a.2, a.3).partial_cmp(&(b.2, b.3)).unwrap());
    if out.is_empty() {
        return Err(ReconError::NoConvergence(best_overall));
    }
    let best = out[0].clone();
    Ok(SolveResult {
        q: best.0.clone(),
        residual: best.1,
        diagnostics: SolveDiagnostics {
            starts: evals,
            converged,
            screened: screened_count,
            trace_length: 0,
            best_residual: best.1,
        },
        candidates: out.into_iter().map(|(q, rn, _, _)| (q, rn)).collect(),
    })
}


/// Projectivity sending four nodes in general position (n₁₂, n₁₃, n₂₄, n₃₄)
/// to the standard frame; None when too degenerate to help.
fn frame_projectivity<R: Real>(conf: &Configuration46<R>) -> Option<[[C<R>; 3]; 3]> {
    let pick = [0usize, 1, 4, 5];
    let n0 = conf.nodes[pick[0]];
    let n1 = conf.nodes[pick[1]];
    let n2 = conf.nodes[pick[3]];
    let target = conf.nodes[pick[2]];
    // target = α n0 + β n1 + γ n2
    let rows: Vec<Vec<C<R>>> = (0..3).map(|i| vec![n0[i], n1[i], n2[i]]).collect();
    let coef = lstsq(&rows, &target.to_vec())?;
    if coef.iter().any(|z| z.abs().to_f64() < 1e-8) {
        return None;
    }
    let m: [[C<R>; 3]; 3] = std::array::from_fn(|i| {
        [n0[i] * coef[0], n1[i] * coef[1], n2[i] * coef[2]]
    });
    inv3(&m)
}

/// f64 shadow of a model, for the candidate sweep.
fn downcast_model<R: Real>(model: &SexticModel<R>) -> Result<SexticModel<f64>, ReconError> {
    let lines: [[C<f64>; 3]; 4] = std::array::from_fn(|i| {
        std::array::from_fn(|j| model.conf.lines[i][j].to_c64())
    });
    let conf = Configuration46::new(lines)?;
    Ok(SexticModel {
        coeffs: model.coeffs.iter().map(|c| c.to_f64()).collect(),
        conf,
    })
}

/// Lifts an f64 conic into the working precision.
fn lift_conic<R: Real>(q: &ConicQ<f64>) -> ConicQ<R> {
    ConicQ::new(std::array::from_fn(|i| {
        std::array::from_fn(|j| Cplx::from_f64s(q.m[i][j].re, q.m[i][j].im))
    }))
}


/// Debug helpers exposing sweep internals (test support).
pub fn debug_pencil_basis<R: Real>(p: &[C<R>; 3]) -> ([C<R>; 3], [C<R>; 3]) {
    line_pencil_basis(p)
}

pub fn debug_sweep_sigma<R: Real>(
    model: &SexticModel<R>,
    kn: usize,
    kc: usize,
    l0: &[C<R>; 3],
    l1: &[C<R>; 3],
    lam: Cplx<R>,
) -> Vec<(f64, Vec<Cplx<R>>)> {
    sweep_sigma(model, kn, kc, l0, l1, lam)
}


/// Verbose certificate walk for diagnostics.
pub fn debug_certify_verbose<R: Real>(
    model: &SexticModel<R>,
    q: &ConicQ<R>,
    cfg: &NumCfg,
) -> Result<String, ReconError> {
    let psi = identification(q).ok_or(ReconError::SingularConic)?;
    let poles: [[C<R>; 3]; 4] =
        std::array::from_fn(|i| normalize3(&q.pol_point(&model.conf.lines[i])));
    let squares = lifted_squares(&psi, &poles);
    let kbasis = row_space_basis(&squares, 3);
    let k12 = crate::lattice::transposition_index(1, 2);
    let k34 = crate::lattice::transposition_index(3, 4);
    let mut pts = vec![];
    let mut log = String::new();
    for k in 0..6 {
        let (i, j) = crate::lattice::TRANSPOSITIONS[k];
        let (r, s) = crate::pipeline::complement_pair(i, j);
        let kc = crate::lattice::transposition_index(r, s);
        match slice(q, model, k, kc) {
            Ok(sl) => {
                let res: Vec<f64> = sl.residuals.iter().map(|z| z.abs().to_f64()).collect();
                log.push_str(&format!("slice {k}: res {:?}; ", res));
                if res.iter().all(|&x| x < 1e-5) || k == k12 || k == k34 {
                    for (a, b) in sl.matching {
                        match bisecant_meeting_point(&psi, &sl.points[a], &sl.points[b], &model.conf.nodes[k], &kbasis) {
                            Ok(m) => { pts.push(m.1); log.push_str(&format!("meet {:.1e}; ", m.0)); }
                            Err(e) => log.push_str(&format!("meet ERR {:?}; ", e)),
                        }
                    }
                }
            }
            Err(e) => log.push_str(&format!("slice {k} ERR {:?}; ", e)),
        }
    }
    log.push_str(&format!("pts {}; ", pts.len()));
    match rebuild_and_compare(model, &psi, &kbasis, &pts, cfg) {
        Ok(w) => log.push_str(&format!("rebuild worst {:.3e}", w)),
        Err(e) => log.push_str(&format!("rebuild ERR {:?}", e)),
    }
    Ok(log)
}

/// The six ordered (node, complementary node) axis pairs.
fn complementary_axis_pairs() -> Vec<(usize, usize)> {
    crate::lattice::TRANSPOSITIONS
        .iter()
        .map(|&(i, j)| {
            let (r, s) = crate::pipeline::complement_pair(i, j);
            (
                crate::lattice::transposition_index(i, j),
                crate::lattice::transposition_index(r, s),
            )
        })
        .collect()
}

/// Two independent lines through a point (a basis of its pencil of lines).
fn line_pencil_basis<R: Real>(p: &[C<R>; 3]) -> ([C<R>; 3], [C<R>; 3]) {
    // same construction as span_of_line with the roles of points and lines
    // exchanged: a "line through p" is a covector orthogonal to p
    span_of_line(p)
}

/// One-parameter sweep: candidate conics from rank drops of the linear
/// system attached to each pencil line. Returns candidates and the number
/// of σ evaluations.
fn pencil_sweep<R: Real>(
    model: &SexticModel<R>,
    kn: usize,
    kc: usize,
    grid: usize,
    pool: &rayon::ThreadPool,
) -> (Vec<(ConicQ<R>, f64)>, usize) {
    let (l0, l1) = line_pencil_basis(&model.conf.nodes[kc]);
    let lam_of = |x: f64| -> C<R> { C::real(R::from_f64(x)) };
    let grid_pts: Vec<f64> = (0..grid)
        .map(|k| (std::f64::consts::PI * ((k as f64 + 0.5) / grid as f64 - 0.5)).tan())
        .collect();
    let min_sigma = |x: f64| -> f64 {
        sweep_sigma(model, kn, kc, &l0, &l1, lam_of(x))
            .iter()
            .fold(f64::INFINITY, |m, (s, _)| m.min(*s))
    };
    let sig: Vec<f64> = pool.install(|| grid_pts.par_iter().map(|&x| min_sigma(x)).collect());
    let mut evals = grid;
    let mut cands = vec![];
    for k in 0..grid {
        let prev = sig[(k + grid - 1) % grid];
        let next = sig[(k + 1) % grid];
        if sig[k] < prev && sig[k] <= next && sig[k] < 0.5 {
            // golden-section refinement of the local minimum
            let span = (grid_pts[(k + 1) % grid] - grid_pts[(k + grid - 1) % grid]).abs();
            let mut lo = grid_pts[k] - span / 2.0;
            let mut hi = grid_pts[k] + span / 2.0;
            let phi = 0.618_033_988_749_895;
            let mut x1 = hi - phi * (hi - lo);
            let mut x2 = lo + phi * (hi - lo);
            let mut f1 = min_sigma(x1);
            let mut f2 = min_sigma(x2);
            for _ in 0..48 {
                if f1 < f2 {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - phi * (hi - lo);
                    f1 = min_sigma(x1);
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + phi * (hi - lo);
                    f2 = min_sigma(x2);
                }
                evals += 1;
            }
            let xbest = if f1 < f2 { x1 } else { x2 };
            for (s, qv) in sweep_sigma(model, kn, kc, &l0, &l1, lam_of(xbest)) {
                if s < 1e-3 {
                    let m: Sym3<R> = [
                        [qv[0], qv[1], qv[2]],
                        [qv[1], qv[3], qv[4]],
                        [qv[2], qv[4], qv[5]],
                    ];
                    cands.push((ConicQ::new(m), s));
                }
            }
        }
    }
    (cands, evals)
}

/// σ_min/σ_max of the linear system for a fixed pencil line, one entry per
/// matching of the four residual points, each with its kernel vector (6
/// symmetric coordinates). Distinct matchings can produce distinct tiny-σ
/// kernels at the same line, so all of them become candidates.
fn sweep_sigma<R: Real>(
    model: &SexticModel<R>,
    kn: usize,
    kc: usize,
    l0: &[C<R>; 3],
    l1: &[C<R>; 3],
    lam: C<R>,
) -> Vec<(f64, Vec<C<R>>)> {
    let line: [C<R>; 3] = std::array::from_fn(|i| l0[i] + l1[i] * lam);
    let (p0, p1) = span_of_line(&line);
    let restr = model.restrict_to_line(&p0, &p1);
    if restr.is_zero() {
        return vec![];
    }
    let roots = form_roots_projective(restr.coeffs(), 1e-12);
    if roots.len() != 6 {
        return vec![];
    }
    let pts: Vec<[C<R>; 3]> = roots
        .iter()
        .map(|(s, u)| normalize3(&std::array::from_fn(|i| p0[i] * *s + p1[i] * *u)))
        .collect();
    let node = &model.conf.nodes[kc];
    let mut order: Vec<usize> = (0..6).collect();
    order.sort_by(|&a, &b| {
        proj_dist(&pts[a], node)
            .partial_cmp(&proj_dist(&pts[b], node))
            .unwrap()
    });
    let keep: Vec<usize> = order[2..].to_vec();
    let x: [[C<R>; 3]; 4] = std::array::from_fn(|i| pts[keep[i]]);
    // linear functional rows over the 6-dimensional space of conics
    let basis = sym_basis::<R>();
    let pair_row = |u: &[C<R>; 3], v: &[C<R>; 3]| -> Vec<C<R>> {
        basis
            .iter()
            .map(|e| ConicQ::new(*e).eval(u, v))
            .collect()
    };
    let t = crate::lattice::transposition_index;
    let mut rows: Vec<Vec<C<R>>> = vec![
        pair_row(&model.conf.nodes[t(1, 4)], &model.conf.nodes[t(2, 3)]),
        pair_row(&model.conf.nodes[t(1, 2)], &model.conf.nodes[t(3, 4)]),
    ];
    // polar-line proportionality: cross(Q·n, line) = 0, three linear rows
    let n = &model.conf.nodes[kn];
    for comp in 0..3 {
        let row: Vec<C<R>> = basis
            .iter()
            .map(|e| {
                let qn = ConicQ::new(*e).pol_line(n);
                cross3c(&qn, &line)[comp]
            })
            .collect();
        rows.push(row);
    }
    let matchings = [[(0usize, 1usize), (2, 3)], [(0, 2), (1, 3)], [(0, 3), (1, 2)]];
    let mut out = vec![];
    for m in matchings {
        let mut sys = rows.clone();
        sys.push(pair_row(&x[m[0].0], &x[m[0].1]));
        sys.push(pair_row(&x[m[1].0], &x[m[1].1]));
        for r in sys.iter_mut() {
            let n = vec_norm(r);
            if n.to_f64() > 0.0 {
                for z in r.iter_mut() {
                    *z = z.scale(R::one() / n);
                }
            }
        }
        let (sv, vecs) = crate::numeric::singular_values(&sys);
        let smax = sv[sv.len() - 1];
        if smax.is_zero() {
            continue;
        }
        let s = (sv[0] / smax).to_f64();
        let kvec: Vec<C<R>> = (0..6).map(|r| vecs[r][0]).collect();
        out.push((s, kvec));
    }
    out
}

/// Chart coordinates of a conic on the strict family (base index and chart
/// parameters), for seeding the Gauss–Newton refinement.
fn strict_coords<R: Real>(
    strict: &[Sym3<R>],
    q: &ConicQ<R>,
) -> Result<(usize, Vec<C<R>>), ReconError> {
    let to_vec = |m: &Sym3<R>| -> Vec<C<R>> {
        vec![m[0][0], m[0][1], m[0][2], m[1][1], m[1][2], m[2][2]]
    };
    let cols: Vec<Vec<C<R>>> = strict.iter().map(&to_vec).collect();
    let rows = transpose_rows(&cols);
    let coords = lstsq(&rows, &to_vec(&q.m)).ok_or(ReconError::SingularConic)?;
    let mut base = 0;
    for i in 1..coords.len() {
        if coords[i].abs() > coords[base].abs() {
            base = i;
        }
    }
    if coords[base].abs().to_f64() < 1e-14 {
        return Err(ReconError::SingularConic);
    }
    let w: Vec<C<R>> = (0..coords.len())
        .filter(|&k| k != base)
        .map(|k| coords[k] / coords[base])
        .collect();
    Ok((base, w))
}

/// Quick geometric screen: smooth conic, poles of the four lines pairwise
/// non-orthogonal, and their lifted squares spanning a 3-space.
fn screen_candidate<R: Real>(q: &ConicQ<R>, model: &SexticModel<R>) -> bool {
    if q.smoothness() < 1e-10 {
        return false;
    }
    let poles: [[C<R>; 3]; 4] =
        std::array::from_fn(|i| normalize3(&q.pol_point(&model.conf.lines[i])));
    for i in 0..4 {
        for j in (i + 1)..4 {
            // only reject orthogonality at solver-noise level: honest
            // instances can carry nearly-polar line pairs
            if q.pairing(&poles[i], &poles[j]).abs().to_f64() < 1e-8 {
                return false;
            }
        }
    }
    let Some(psi) = identification(q) else {
        return false;
    };
    let squares = lifted_squares(&psi, &poles);
    let (sv, _) = crate::numeric::singular_values(&transpose_rows(&squares));
    // 5×4: σ ascending; rank 3 means σ₁ ≈ 0 and σ₂ solidly positive
    let r3 = (sv[0] / sv[3]).to_f64();
    let r2 = (sv[1] / sv[3]).to_f64();
    r3 < 1e-4 && r2 > 1e-4
}

fn transpose_rows<R: Real>(rows: &[Vec<C<R>>]) -> Vec<Vec<C<R>>> {
    let n = rows[0].len();
    (0..n)
        .map(|i| rows.iter().map(|r| r[i]).collect())
        .collect()
}

fn polish_in_admissible<R: Real>(
    adm: &[Sym3<R>],
    q0: &ConicQ<R>,
    model: &SexticModel<R>,
) -> Result<(ConicQ<R>, f64, usize), ReconError> {
    // chart coordinates of q0 in the admissible basis: least squares of the
    // 6 symmetric entries against the 5 basis elements
    let to_vec = |m: &Sym3<R>| -> Vec<C<R>> {
        vec![m[0][0], m[0][1], m[0][2], m[1][1], m[1][2], m[2][2]]
    };
    let cols: Vec<Vec<C<R>>> = adm.iter().map(&to_vec).collect();
    let rows = transpose_rows(&cols);
    let rhs = to_vec(&q0.m);
    let coords = lstsq(&rows, &rhs).ok_or(ReconError::SingularConic)?;
    // chart: divide by the largest coordinate
    let mut base = 0;
    for i in 1..5 {
        if coords[i].abs() > coords[base].abs() {
            base = i;
        }
    }
    if coords[base].abs().to_f64() < 1e-14 {
        return Err(ReconError::SingularConic);
    }
    let w: Vec<C<R>> = (0..5)
        .filter(|&k| k != base)
        .map(|k| coords[k] / coords[base])
        .collect();
    let (wf, _rn, steps) =
        gauss_newton(adm, base, w, model, 6, false).ok_or(ReconError::NoConvergence(f64::INFINITY))?;
    let q = family_point(adm, base, &wf);
    let (r4, _) = incidence_residual(&q, model).map_err(|_| ReconError::NoConvergence(f64::INFINITY))?;
    Ok((q, residual_norm(&r4), steps))
}

// ---------------------------------------------------------------------------
// Identification with the plane of lines and the certificates.
// ---------------------------------------------------------------------------

/// Congruence factorization Q = CᵀC of a complex symmetric 3×3 matrix, by
/// symmetric elimination with congruence fixes for zero diagonals.
pub fn sym_sqrt_factor<R: Real>(q: &Sym3<R>) -> Option<[[C<R>; 3]; 3]> {
    let mut a: Sym3<R> = *q;
    // n accumulates M⁻¹ for the congruence MᵀQM = D
    let mut n: [[C<R>; 3]; 3] = std::array::from_fn(|i| {
        std::array::from_fn(|j| if i == j { C::one() } else { C::zero() })
    });
    let scale = ConicQ::new(*q).frobenius();
    if scale.is_zero() {
        return None;
    }
    for k in 0..3 {
        // ensure a pivot comparable to the remaining submatrix, otherwise
        // the factor blows up (the interesting conics have zero diagonals,
        // where tiny solver residue must not be accepted as a pivot)
        let mut sub_max = R::zero();
        for i in k..3 {
            for j in k..3 {
                sub_max = sub_max.maxv(a[i][j].abs());
            }
        }
        if sub_max.is_zero() {
            return None;
        }
        let thr = sub_max * R::from_f64(0.1);
        let mut p = k;
        for i in (k + 1)..3 {
            if a[i][i].abs() > a[p][p].abs() {
                p = i;
            }
        }
        if a[p][p].abs() <= thr {
            // congruence fix: add a column with a large off-diagonal entry
            let mut bi = k;
            let mut bj = k + 1;
            let mut bm = R::zero();
            for i in k..3 {
                for j in (i + 1)..3 {
                    if a[i][j].abs() > bm {
                        bm = a[i][j].abs();
                        bi = i;
                        bj = j;
                    }
                }
            }
            if bm <= thr {
                return None;
            }
            // x_bi ← x_bi + x_bj : row/col update on a, row update on n
            for t in 0..3 {
                let v = a[t][bj];
                a[t][bi] = a[t][bi] + v;
            }
            for t in 0..3 {
                let v = a[bj][t];
                a[bi][t] = a[bi][t] + v;
            }
            // the inverse transform subtracts: row_bj ← row_bj - row_bi
            for t in 0..3 {
                let v = n[bi][t];
                n[bj][t] = n[bj][t] - v;
            }
            p = bi;
        }
        if p != k {
            // symmetric swap of k and p; mirrored as a row swap on n
            a.swap(k, p);
            for row in a.iter_mut() {
                row.swap(k, p);
            }
            n.swap(k, p);
        }
        let piv = a[k][k];
        for i in (k + 1)..3 {
            let f = a[i][k] / piv;
            if f.abs().is_zero() {
                continue;
            }
            // col_i ← col_i - f·col_k and row_i ← row_i - f·row_k
            for t in 0..3 {
                let v = a[t][k];
                a[t][i] = a[t][i] - v * f;
            }
            for t in 0..3 {
                let v = a[k][t];
                a[i][t] = a[i][t] - v * f;
            }
            // n: row_k ← row_k + f·row_i
            for t in 0..3 {
                let v = n[i][t];
                n[k][t] = n[k][t] + v * f;
            }
        }
    }
    // C = diag(√d) · N
    let mut c: [[C<R>; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| C::zero()));
    for i in 0..3 {
        let s = a[i][i].sqrt();
        for j in 0..3 {
            c[i][j] = n[i][j] * s;
        }
    }
    Some(c)
}

/// The identification map ψ with ψᵀ·G·ψ = Q, carrying model-plane points to
/// line classes (G the pairing matrix of the invariant conic).
pub struct Identification<R: Real> {
    pub psi: [[C<R>; 3]; 3],
    pub psi_inv: [[C<R>; 3]; 3],
}

pub fn identification<R: Real>(q: &ConicQ<R>) -> Option<Identification<R>> {
    let comega: Sym3<R> = {
        let g = crate::lines::omega_matrix::<Rat>();
        let gm: Sym3<R> =
            std::array::from_fn(|i| std::array::from_fn(|j| rat_to_cplx(&g[i][j])));
        sym_sqrt_factor(&gm)?
    };
    let cq = sym_sqrt_factor(&q.m)?;
    let c0inv = inv3(&comega)?;
    let psi = mat3c_mul(&c0inv, &cq);
    let psi_inv = inv3(&psi)?;
    Some(Identification { psi, psi_inv })
}

fn mat3c_mul<R: Real>(a: &[[C<R>; 3]; 3], b: &[[C<R>; 3]; 3]) -> [[C<R>; 3]; 3] {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| (0..3).fold(C::zero(), |acc, k| acc + a[i][k] * b[k][j]))
    })
}

fn inv3<R: Real>(m: &[[C<R>; 3]; 3]) -> Option<[[C<R>; 3]; 3]> {
    let d = det3c(
        &[m[0][0], m[0][1], m[0][2]],
        &[m[1][0], m[1][1], m[1][2]],
        &[m[2][0], m[2][1], m[2][2]],
    );
    if d.abs().is_zero() {
        return None;
    }
    let cof = |r: usize, c: usize| -> C<R> {
        let rs: Vec<usize> = (0..3).filter(|&x| x != r).collect();
        let cs: Vec<usize> = (0..3).filter(|&x| x != c).collect();
        let v = m[rs[0]][cs[0]] * m[rs[1]][cs[1]] - m[rs[0]][cs[1]] * m[rs[1]][cs[0]];
        if (r + c) % 2 == 0 {
            v
        } else {
            -v
        }
    };
    Some(std::array::from_fn(|i| {
        std::array::from_fn(|j| cof(j, i) / d)
    }))
}

pub fn apply3<R: Real>(m: &[[C<R>; 3]; 3], v: &[C<R>; 3]) -> [C<R>; 3] {
    std::array::from_fn(|i| (0..3).fold(C::zero(), |acc, j| acc + m[i][j] * v[j]))
}

/// Squares of the lifted line classes (quadric coefficient 5-vectors).
fn lifted_squares<R: Real>(psi: &Identification<R>, poles: &[[C<R>; 3]; 4]) -> Vec<Vec<C<R>>> {
    poles
        .iter()
        .map(|p| {
            let v = normalize3(&apply3(&psi.psi, p));
            let f = BinaryForm::new(v.to_vec());
            f.mul(&f).coeffs().to_vec()
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificates {
    /// (i) poles pairwise non-orthogonal (min |pairing|).
    pub disjoint: (bool, f64),
    /// (ii) lifted squares span a 3-space (σ-ratios).
    pub common_section: (bool, f64),
    /// (iii) matched pairs lift to intersecting lines meeting on the
    /// corresponding bisecant, with the meeting point over the section
    /// plane (max of the rank measures).
    pub bisecant_points: (bool, f64),
    /// (iv) rebuilt conic reproduces the sextic through sampled triples
    /// (max relative evaluation).
    pub curve_match: (bool, f64),
}

impl Certificates {
    pub fn all_pass(&self) -> bool {
        self.disjoint.0 && self.common_section.0 && self.bisecant_points.0 && self.curve_match.0
    }
}

/// Full certification of a solved conic against the model.
pub fn certify_reconstruction<R: Real>(
    model: &SexticModel<R>,
    q: &ConicQ<R>,
    cfg: &NumCfg,
) -> Result<Certificates, ReconError> {
    let tol = cfg.tolerance;
    let psi = identification(q).ok_or(ReconError::SingularConic)?;
    let poles: [[C<R>; 3]; 4] =
        std::array::from_fn(|i| normalize3(&q.pol_point(&model.conf.lines[i])));
    // (i)
    let mut min_pair = f64::INFINITY;
    for i in 0..4 {
        for j in (i + 1)..4 {
            min_pair = min_pair.min(q.pairing(&poles[i], &poles[j]).abs().to_f64());
        }
    }
    let c1 = (min_pair > 1e-7, min_pair);
    // (ii)
    let squares = lifted_squares(&psi, &poles);
    let tall = transpose_rows(&squares);
    let (sv, _) = crate::numeric::singular_values(&tall);
    let ratio3 = (sv[0] / sv[3]).to_f64();
    let ratio2 = (sv[1] / sv[3]).to_f64();
    let c2 = (ratio3 < tol.sqrt() && ratio2 > tol.sqrt(), ratio3);
    // section plane basis from the squares
    let kbasis = row_space_basis(&squares, 3);
    // (iii): both complementary slices
    let k12 = crate::lattice::transposition_index(1, 2);
    let k34 = crate::lattice::transposition_index(3, 4);
    let mut worst3 = 0.0f64;
    let mut conic_pts: Vec<[C<R>; 3]> = vec![];
    for (kn, kc) in [(k12, k34), (k34, k12)] {
        let sl = slice(q, model, kn, kc)?;
        for (a, b) in sl.matching {
            let m = bisecant_meeting_point(&psi, &sl.points[a], &sl.points[b], &model.conf.nodes[kn], &kbasis)?;
            worst3 = worst3.max(m.0);
            conic_pts.push(m.1);
        }
    }
    let c3 = (worst3 < tol.sqrt(), worst3);
    // (iv): collect meeting points from all six polar lines when clean,
    // fit the conic in section coordinates, rebuild and compare
    for k in 0..6 {
        if k == k12 || k == k34 {
            continue;
        }
        let (i, j) = crate::lattice::TRANSPOSITIONS[k];
        let (r, s) = crate::pipeline::complement_pair(i, j);
        let kc = crate::lattice::transposition_index(r, s);
        if let Ok(sl) = slice(q, model, k, kc) {
            let ok = sl.residuals.iter().all(|z| z.abs().to_f64() < 1e-5);
            if ok {
                for (a, b) in sl.matching {
                    if let Ok(m) = bisecant_meeting_point(
                        &psi,
                        &sl.points[a],
                        &sl.points[b],
                        &model.conf.nodes[k],
                        &kbasis,
                    ) {
                        if m.0 < 1e-5 {
                            conic_pts.push(m.1);
                        }
                    }
                }
            }
        }
    }
    let c4 = match rebuild_and_compare(model, &psi, &kbasis, &conic_pts, cfg) {
        Ok(worst) => (worst < tol.sqrt().max(1e-6), worst),
        Err(_) => (false, f64::INFINITY),
    };
    Ok(Certificates {
        disjoint: c1,
        common_section: c2,
        bisecant_points: c3,
        curve_match: c4,
    })
}

/// Modified Gram–Schmidt basis of the row space (keeps `want` vectors).
fn row_space_basis<R: Real>(rows: &[Vec<C<R>>], want: usize) -> Vec<Vec<C<R>>> {
    let mut basis: Vec<Vec<C<R>>> = vec![];
    let mut work: Vec<Vec<C<R>>> = rows.to_vec();
    for _ in 0..want {
        // pick the row of largest remaining norm
        let (bi, bn) = work
            .iter()
            .enumerate()
            .map(|(i, r)| (i, vec_norm(r)))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        if bn.to_f64() < 1e-12 {
            break;
        }
        let v: Vec<C<R>> = work[bi].iter().map(|z| z.scale(R::one() / bn)).collect();
        for w in work.iter_mut() {
            let ip = v
                .iter()
                .zip(w.iter())
                .fold(C::<R>::zero(), |acc, (a, b)| acc + a.conj() * *b);
            for (x, vv) in w.iter_mut().zip(&v) {
                *x = *x - *vv * ip;
            }
        }
        basis.push(v);
    }
    basis
}

/// Lifts two model-plane points to line classes, intersects their ambient
/// lines, checks the meeting point sits on the bisecant's ambient line, and
/// returns its coordinates over the section plane. The returned f64 is the
/// worst rank-measure of the chain.
fn bisecant_meeting_point<R: Real>(
    psi: &Identification<R>,
    x1: &[C<R>; 3],
    x2: &[C<R>; 3],
    node: &[C<R>; 3],
    kbasis: &[Vec<C<R>>],
) -> Result<(f64, [C<R>; 3]), ReconError> {
    let lift = |p: &[C<R>; 3]| -> Result<[Vec<C<R>>; 2], ReconError> {
        let v = normalize3(&apply3(&psi.psi, p));
        ambient_line_numeric(&v)
    };
    let a1 = lift(x1)?;
    let a2 = lift(x2)?;
    // two lines meet: 4 spanning wedges have rank 3
    let stacked: Vec<Vec<C<R>>> = vec![a1[0].clone(), a1[1].clone(), a2[0].clone(), a2[1].clone()];
    let tall = transpose_rows(&stacked);
    let (sv, vecs) = crate::numeric::singular_values(&tall);
    let meet_measure = (sv[0] / sv[3]).to_f64();
    // null combination gives the common point
    let comb: Vec<C<R>> = (0..4).map(|r| vecs[r][0]).collect();
    let w: Vec<C<R>> = (0..10)
        .map(|k| a1[0][k] * comb[0] + a1[1][k] * comb[1])
        .collect();
    // the common point must be on the bisecant's ambient line
    let bq = normalize3(&apply3(&psi.psi, node));
    let bl = ambient_line_numeric(&bq)?;
    let stacked2: Vec<Vec<C<R>>> = vec![bl[0].clone(), bl[1].clone(), w.clone()];
    let tall2 = transpose_rows(&stacked2);
    let (sv2, _) = crate::numeric::singular_values(&tall2);
    let on_bisecant = (sv2[0] / sv2[2]).to_f64();
    // intersect the pencil of w with the section plane
    if kbasis.len() != 3 {
        return Err(ReconError::BadModel(format!(
            "section basis has dimension {}",
            kbasis.len()
        )));
    }
    let pencil = pencil_from_wedge(&w).ok_or(ReconError::SingularConic)?;
    let mut cols: Vec<Vec<C<R>>> = vec![pencil[0].clone(), pencil[1].clone()];
    for k in kbasis {
        cols.push(k.iter().map(|z| -*z).collect());
    }
    let tall3 = transpose_rows(&cols); // 5×5
    let (sv3, vecs3) = crate::numeric::singular_values(&tall3);
    let meets_plane = (sv3[0] / sv3[4]).to_f64();
    let comb3: Vec<C<R>> = (0..5).map(|r| vecs3[r][0]).collect();
    let coords = [comb3[2], comb3[3], comb3[4]];
    let worst = meet_measure.max(on_bisecant).max(meets_plane);
    Ok((worst, coords))
}

/// The ambient line of a numeric line class: two spanning wedges.
fn ambient_line_numeric<R: Real>(q: &[C<R>; 3]) -> Result<[Vec<C<R>>; 2], ReconError> {
    let f = BinaryForm::new(q.to_vec());
    let alpha = f.mul(&f);
    let m = crate::wedge::third_transvectant_matrix(&alpha);
    let ker = kernel_numeric(&m);
    if ker.len() != 3 {
        return Err(ReconError::BadModel(format!(
            "net dimension {} at a lifted class",
            ker.len()
        )));
    }
    let mut wedges: Vec<Vec<C<R>>> = vec![];
    for v in &ker {
        let w = crate::wedge::wedge(&alpha, &BinaryForm::new(v.clone()));
        let wv: Vec<C<R>> = w.coords.to_vec();
        let n = vec_norm(&wv);
        if n.to_f64() < 1e-12 {
            continue;
        }
        let wn: Vec<C<R>> = wv.iter().map(|z| z.scale(R::one() / n)).collect();
        if wedges.is_empty() {
            wedges.push(wn);
        } else if wedges.len() == 1 {
            if proj_dist(&wedges[0], &wn).to_f64() > 1e-6 {
                wedges.push(wn);
            }
        }
        if wedges.len() == 2 {
            break;
        }
    }
    if wedges.len() != 2 {
        return Err(ReconError::BadModel("ambient line collapsed".into()));
    }
    Ok([wedges[0].clone(), wedges[1].clone()])
}

/// Extracts a spanning pencil from a (near-)decomposable complex wedge.
fn pencil_from_wedge<R: Real>(w: &[C<R>]) -> Option<[Vec<C<R>>; 2]> {
    let a = |i: usize, j: usize| -> C<R> {
        use std::cmp::Ordering;
        match i.cmp(&j) {
            Ordering::Less => w[pair_index(i, j)],
            Ordering::Greater => -w[pair_index(j, i)],
            Ordering::Equal => C::zero(),
        }
    };
    let cols: Vec<Vec<C<R>>> = (0..5)
        .map(|j| (0..5).map(|i| a(i, j)).collect())
        .collect();
    let basis = row_space_basis(&cols, 2);
    if basis.len() != 2 {
        return None;
    }
    Some([basis[0].clone(), basis[1].clone()])
}

/// Rebuilds the curve from the recovered conic points and measures how far
/// the sampled line triples fall from the input sextic.
fn rebuild_and_compare<R: Real>(
    model: &SexticModel<R>,
    psi: &Identification<R>,
    kbasis: &[Vec<C<R>>],
    conic_pts: &[[C<R>; 3]],
    _cfg: &NumCfg,
) -> Result<f64, ReconError> {
    if conic_pts.len() < 5 {
        return Err(ReconError::BadModel(format!(
            "only {} conic points recovered",
            conic_pts.len()
        )));
    }
    // conic through the recovered points: null vector of the 6-monomial rows
    let rows: Vec<Vec<C<R>>> = conic_pts
        .iter()
        .map(|p| {
            let p = normalize3(p);
            vec![
                p[0] * p[0],
                p[0] * p[1],
                p[0] * p[2],
                p[1] * p[1],
                p[1] * p[2],
                p[2] * p[2],
            ]
        })
        .collect();
    let (cvec, _ratio) = crate::numeric::null_vector(&rows);
    let half = |z: C<R>| z.scale(R::from_f64(0.5));
    let cq: Sym3<R> = [
        [cvec[0], half(cvec[1]), half(cvec[2])],
        [half(cvec[1]), cvec[3], half(cvec[4])],
        [half(cvec[2]), half(cvec[4]), cvec[5]],
    ];
    let conic = ConicQ::new(cq);
    if conic.smoothness() < 1e-13 {
        return Err(ReconError::SingularConic);
    }
    // a point on the conic: intersect with the coordinate line x₀ = 0,
    // where it restricts to the binary quadric in (x₁, x₂)
    let base_pt: [C<R>; 3] = {
        let bform = [
            conic.m[1][1],
            conic.m[1][2].scale(R::from_f64(2.0)),
            conic.m[2][2],
        ];
        let prs = form_roots_projective(&bform, 1e-12);
        let (s, u) = prs[0];
        [C::zero(), s, u]
    };
    // rational parametrization through the base point
    let dir0: [C<R>; 3] = [C::one(), C::zero(), C::zero()];
    let dir1: [C<R>; 3] = [C::zero(), C::one(), C::zero()];
    let mut worst = 0.0f64;
    let mut checked = 0;
    for step in 0..16 {
        let tau = C::<R>::from_f64s(-1.8 + 0.24 * step as f64, 0.15);
        let u: [C<R>; 3] = std::array::from_fn(|i| dir0[i] + dir1[i] * tau);
        let ucu = conic.eval(&u, &u);
        let pcu = conic.eval(&base_pt, &u);
        // second intersection of the line through base_pt with direction u
        let x: [C<R>; 3] =
            std::array::from_fn(|i| base_pt[i] * ucu - u[i] * pcu.scale(R::from_f64(2.0)));
        if vec_norm(&x).to_f64() < 1e-12 {
            continue;
        }
        // lift to V₄ through the section-plane coordinates
        let quartic: Vec<C<R>> = (0..5)
            .map(|r| (0..3).fold(C::zero(), |acc, j| acc + kbasis[j][r] * x[j]))
            .collect();
        let f = BinaryForm::new(quartic);
        let m = crate::wedge::third_transvectant_matrix(&f);
        let ker = kernel_numeric(&m);
        if ker.len() != 2 {
            continue;
        }
        let pencil = crate::wedge::Pencil {
            a: BinaryForm::new(ker[0].clone()),
            b: BinaryForm::new(ker[1].clone()),
        };
        let minors = crate::wedge::pencil_minors(&pencil);
        let mut bestm: Option<(R, BinaryForm<C<R>>)> = None;
        for mm in minors {
            let norm = mm
                .coeffs()
                .iter()
                .fold(R::zero(), |acc, z| acc.maxv(z.abs()));
            match &bestm {
                Some((n, _)) if *n >= norm => {}
                _ => bestm = Some((norm, mm)),
            }
        }
        let Some((_, cubic)) = bestm else { continue };
        let roots = form_roots_projective(cubic.coeffs(), 1e-12);
        for (s, uu) in roots {
            let alpha = pencil.a.scale(&s).add(&pencil.b.scale(&uu));
            let Some((qq, _res)) = crate::lines::quartic_sqrt_numeric(&alpha) else {
                continue;
            };
            let v = [*qq.coeff(0), *qq.coeff(1), *qq.coeff(2)];
            let back = apply3(&psi.psi_inv, &v);
            let e = sextic_eval_rel(&model.coeffs, &back);
            worst = worst.max(e.to_f64());
            checked += 1;
        }
    }
    if checked < 24 {
        return Err(ReconError::BadModel("too few rebuilt triples".into()));
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// Building models and ground truth from forward instances.
// ---------------------------------------------------------------------------

/// The plane model of a forward instance: fitted sextic plus the polar-line
/// configuration.
pub fn model_from_instance<R: Real>(
    inst: &CTInstance,
    fit: &PlaneFit<R>,
    tol: f64,
) -> Result<SexticModel<R>, ReconError> {
    let lines: [[C<R>; 3]; 4] = std::array::from_fn(|i| {
        let pl = m_of_line(&inst.eps[i]);
        std::array::from_fn(|j| rat_to_cplx(&pl.l[j]))
    });
    let conf = Configuration46::new(lines)?;
    SexticModel::new(fit.coeffs.clone(), conf, tol)
}

/// The known identification conic of an unscrambled forward instance: the
/// pairing matrix of the invariant conic itself.
pub fn ground_truth_conic<R: Real>() -> ConicQ<R> {
    let g = crate::lines::omega_matrix::<Rat>();
    ConicQ::new(std::array::from_fn(|i| {
        std::array::from_fn(|j| rat_to_cplx(&g[i][j]))
    }))
}

/// Transports a model by a projectivity g (points x ↦ g·x).
pub fn scramble_model<R: Real>(
    model: &SexticModel<R>,
    g: &[[C<R>; 3]; 3],
) -> Result<SexticModel<R>, ReconError> {
    let ginv = inv3(g).ok_or(ReconError::BadConfiguration("singular projectivity".into()))?;
    // P'(x) = P(g⁻¹ x): substitute the rows of g⁻¹
    let imgs: [Vec<C<R>>; 3] = std::array::from_fn(|v| ginv[v].to_vec());
    let monos = sextic_monomials();
    // trivariate polynomial multiplication over dense degree-d tables
    let mul = |a: &std::collections::HashMap<(usize, usize, usize), C<R>>,
               b: &std::collections::HashMap<(usize, usize, usize), C<R>>| {
        let mut out: std::collections::HashMap<(usize, usize, usize), C<R>> =
            std::collections::HashMap::new();
        for (ka, va) in a {
            for (kb, vb) in b {
                let k = (ka.0 + kb.0, ka.1 + kb.1, ka.2 + kb.2);
                let e = out.entry(k).or_insert_with(C::zero);
                *e = *e + *va * *vb;
            }
        }
        out
    };
    let lin = |v: &Vec<C<R>>| {
        let mut m = std::collections::HashMap::new();
        m.insert((1, 0, 0), v[0]);
        m.insert((0, 1, 0), v[1]);
        m.insert((0, 0, 1), v[2]);
        m
    };
    let mut acc: std::collections::HashMap<(usize, usize, usize), C<R>> =
        std::collections::HashMap::new();
    for ((i, j, k), c) in monos.iter().zip(&model.coeffs) {
        let mut term = std::collections::HashMap::new();
        term.insert((0usize, 0usize, 0usize), C::<R>::real(*c));
        for _ in 0..*i {
            term = mul(&term, &lin(&imgs[0]));
        }
        for _ in 0..*j {
            term = mul(&term, &lin(&imgs[1]));
        }
        for _ in 0..*k {
            term = mul(&term, &lin(&imgs[2]));
        }
        for (key, v) in term {
            let e = acc.entry(key).or_insert_with(C::zero);
            *e = *e + v;
        }
    }
    let mut coeffs: Vec<R> = vec![];
    let mut imag_max = 0.0f64;
    for m in &monos {
        let z = acc.get(m).cloned().unwrap_or_else(C::zero);
        imag_max = imag_max.max(z.im.abs().to_f64());
        coeffs.push(z.re);
    }
    let cn = coeffs.iter().fold(R::zero(), |a, c| a + *c * *c).sqrt();
    if imag_max > 1e-8 * cn.to_f64().max(1.0) {
        return Err(ReconError::BadModel(
            "scramble produced complex coefficients".into(),
        ));
    }
    // lines transport by the inverse transpose
    let lines: [[C<R>; 3]; 4] = std::array::from_fn(|i| {
        let l = &model.conf.lines[i];
        std::array::from_fn(|r| (0..3).fold(C::zero(), |acc, c| acc + ginv[c][r] * l[c]))
    });
    let conf = Configuration46::new(lines)?;
    SexticModel::new(coeffs, conf, 1e-6)
}

/// Transports a conic along the same projectivity: Q' = g⁻ᵀ Q g⁻¹.
pub fn scramble_conic<R: Real>(q: &ConicQ<R>, g: &[[C<R>; 3]; 3]) -> Option<ConicQ<R>> {
    let ginv = inv3(g)?;
    let gt: [[C<R>; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| ginv[j][i]));
    Some(ConicQ::new(mat3c_mul(&gt, &mat3c_mul(&q.m, &ginv))))
}

impl<R: Real> SexticModel<R> {
    pub fn conf_ref(&self) -> &Configuration46<R> {
        &self.conf
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{build_instance, fit_sextic};
    use crate::scalar::C64;

    fn cfg() -> NumCfg {
        NumCfg {
            samples: 30,
            threads: 1,
            multistart: 24,
            ..NumCfg::default()
        }
    }

    fn forward_model(seed: u64) -> (CTInstance, SexticModel<f64>) {
        let cfg = cfg();
        let inst = build_instance(seed, &cfg).unwrap();
        let fit = fit_sextic::<f64>(&inst, &cfg).unwrap();
        let model = model_from_instance(&inst, &fit, 1e-7).unwrap();
        (inst, model)
    }

    #[test]
    fn polarity_ops_are_involutive() {
        let mut rng = Rng::new(5);
        for _ in 0..20 {
            let m: Sym3<f64> = {
                let mut m: Sym3<f64> = std::array::from_fn(|_| {
                    std::array::from_fn(|_| C64::from_f64s(0.0, 0.0))
                });
                for i in 0..3 {
                    for j in i..3 {
                        let v = rng.c_unit::<f64>();
                        m[i][j] = v;
                        m[j][i] = v;
                    }
                }
                m
            };
            let q = ConicQ::new(m);
            if q.smoothness() < 1e-3 {
                continue;
            }
            let l: [C64; 3] = std::array::from_fn(|_| rng.c_unit::<f64>());
            let p = q.pol_point(&l);
            let back = q.pol_line(&p);
            assert!(proj_dist(&back, &l) < 1e-10);
        }
        // identity conic: pole of {z=0} is (0:0:1)
        let idq = ConicQ::new(std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                if i == j {
                    C64::from_f64s(1.0, 0.0)
                } else {
                    C64::from_f64s(0.0, 0.0)
                }
            })
        }));
        let p = idq.pol_point(&[C64::zero(), C64::zero(), C64::one()]);
        assert!(proj_dist(&p, &[C64::zero(), C64::zero(), C64::one()]) < 1e-14);
    }

    #[test]
    fn admissible_family_dimensions() {
        let (_inst, model) = forward_model(41);
        let adm = admissible_family(&model.conf);
        assert_eq!(adm.len(), 5);
        let k14 = crate::lattice::transposition_index(1, 4);
        let k23 = crate::lattice::transposition_index(2, 3);
        for e in &adm {
            let v = ConicQ::new(*e).eval(&model.conf.nodes[k14], &model.conf.nodes[k23]);
            assert!(v.abs() < 1e-10);
        }
        let strict = strict_family(&model.conf);
        // one classical linear relation among the three pair functionals
        assert_eq!(strict.len(), 4);
        for e in &strict {
            let q = ConicQ::new(*e);
            for (a, b) in [(1, 2), (1, 3), (1, 4)] {
                let (r, s) = crate::pipeline::complement_pair(a, b);
                let ka = crate::lattice::transposition_index(a, b);
                let kb = crate::lattice::transposition_index(r, s);
                let v = q.eval(&model.conf.nodes[ka], &model.conf.nodes[kb]);
                assert!(v.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn ground_truth_residual_vanishes() {
        let (_inst, model) = forward_model(43);
        let q = ground_truth_conic::<f64>();
        let (r, slices) = incidence_residual(&q, &model).unwrap();
        for z in r {
            assert!(z.abs() < 1e-9, "residual {:?}", z.abs());
        }
        for s in &slices {
            assert_eq!(s.points.len(), 4);
        }
        // random admissible conics do not satisfy the conditions
        let adm = admissible_family(&model.conf);
        let mut rng = Rng::new(99);
        let mut nonzero = 0;
        for _ in 0..10 {
            let w: Vec<C64> = (0..4).map(|_| rng.c_unit::<f64>()).collect();
            let q = family_point(&adm, 0, &w);
            if q.smoothness() < 1e-6 {
                continue;
            }
            if let Ok((r, _)) = incidence_residual(&q, &model) {
                if residual_norm(&r) > 1e-3 {
                    nonzero += 1;
                }
            }
        }
        assert!(nonzero >= 7);
    }

    #[test]
    fn sym_factorization_reconstructs() {
        let mut rng = Rng::new(12);
        for trial in 0..30 {
            let mut m: Sym3<f64> =
                std::array::from_fn(|_| std::array::from_fn(|_| C64::zero()));
            for i in 0..3 {
                for j in i..3 {
                    let v = rng.c_unit::<f64>();
                    m[i][j] = v;
                    m[j][i] = v;
                }
            }
            if trial % 4 == 0 {
                // exercise the zero-diagonal fix
                m[0][0] = C64::zero();
                m[1][1] = C64::zero();
                m[2][2] = C64::zero();
            }
            if ConicQ::new(m).smoothness() < 1e-4 {
                continue;
            }
            let c = sym_sqrt_factor(&m).unwrap();
            // CᵀC = m
            let ct: [[C64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| c[j][i]));
            let prod = mat3c_mul(&ct, &c);
            for i in 0..3 {
                for j in 0..3 {
                    assert!((prod[i][j] - m[i][j]).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn identification_carries_conic() {
        let q = ground_truth_conic::<f64>();
        let psi = identification(&q).unwrap();
        // ψᵀ G ψ = Q: on the ground truth ψ must preserve the pairing
        let g = ground_truth_conic::<f64>();
        let mut rng = Rng::new(3);
        for _ in 0..10 {
            let u: [C64; 3] = std::array::from_fn(|_| rng.c_unit::<f64>());
            let v: [C64; 3] = std::array::from_fn(|_| rng.c_unit::<f64>());
            let lhs = g.eval(&apply3(&psi.psi, &u), &apply3(&psi.psi, &v));
            let rhs = q.eval(&u, &v);
            assert!((lhs - rhs).abs() < 1e-10);
        }
    }

    #[test]
    fn ground_truth_certifies() {
        let (_inst, model) = forward_model(47);
        let q = ground_truth_conic::<f64>();
        let cert = certify_reconstruction(&model, &q, &cfg()).unwrap();
        assert!(cert.disjoint.0, "{:?}", cert);
        assert!(cert.common_section.0, "{:?}", cert);
        assert!(cert.bisecant_points.0, "{:?}", cert);
        assert!(cert.curve_match.0, "{:?}", cert);
    }

    #[test]
    fn seeded_solve_converges_fast() {
        let (_inst, model) = forward_model(53);
        let q0 = ground_truth_conic::<f64>();
        let sol = solve_q(&model, Some(&q0), &cfg(), 53).unwrap();
        assert!(sol.residual < 1e-9, "residual {}", sol.residual);
        assert!(sol.diagnostics.trace_length <= 3, "{:?}", sol.diagnostics);
    }

    #[test]
    fn multistart_solve_recovers_certified_conic() {
        let (_inst, model) = forward_model(59);
        let sol = solve_q(&model, None, &cfg(), 59).unwrap();
        assert!(sol.residual < 1e-8, "residual {}", sol.residual);
        let cert = certify_reconstruction(&model, &sol.q, &cfg()).unwrap();
        assert!(cert.all_pass(), "{:?}", cert);
    }

    #[test]
    fn scrambled_solve_certifies() {
        let (_inst, model) = forward_model(61);
        let mut rng = Rng::new(601);
        let g: [[C64; 3]; 3] = std::array::from_fn(|_| {
            std::array::from_fn(|_| {
                C64::from_f64s(rng.int(-4, 4) as f64 + 0.5 * rng.int(0, 1) as f64, 0.0)
            })
        });
        let scr = scramble_model(&model, &g).unwrap();
        // the transported ground truth still has vanishing residual
        let qt = scramble_conic(&ground_truth_conic::<f64>(), &g).unwrap();
        let (r, _) = incidence_residual(&qt, &scr).unwrap();
        assert!(residual_norm(&r) < 1e-7, "{}", residual_norm(&r));
        let sol = solve_q(&scr, None, &cfg(), 61).unwrap();
        let cert = certify_reconstruction(&scr, &sol.q, &cfg()).unwrap();
        assert!(cert.all_pass(), "{:?}", cert);
    }


    #[test]
    fn truth_is_isolated_and_satisfies_all_slices() {
        let (_inst, model) = forward_model(59);
        let strict = strict_family(&model.conf);
        let q0 = ground_truth_conic::<f64>();
        let (base, w) = strict_coords(&strict, &q0).unwrap();
        // the embedded ground truth zeroes all twelve residual components
        let r0 = eval_residual(&strict, base, &w, &model, true).unwrap();
        assert!(residual_norm(&r0) < 1e-9);
        // and is an isolated full-rank zero on the strict chart
        let h = 1e-7;
        let m = r0.len();
        let mut jac: Vec<Vec<C64>> = vec![vec![C64::zero(); 3]; m];
        for d in 0..3 {
            let mut wp = w.clone();
            wp[d] = wp[d] + C64::from_f64s(h, 0.0);
            let rp = eval_residual(&strict, base, &wp, &model, true).unwrap();
            for i in 0..m {
                jac[i][d] = (rp[i] - r0[i]).scale(1.0 / h);
            }
        }
        let (sv, _) = crate::numeric::singular_values(&jac);
        assert!(sv[0] > 1e-3, "jacobian sigmas {:?}", sv);
    }

    #[test]
    fn triple_point_model_rejected() {
        // a sextic with a triple point at a claimed node must fail validation
        let (_inst, model) = forward_model(67);
        // impose vanishing of value, gradient, and all second derivatives at
        // node 0 on top of double points at the other nodes: solve in the
        // null space of those conditions
        let n0 = model.conf.nodes[0];
        let mut rows: Vec<Vec<C64>> = vec![];
        let push_derivs = |rows: &mut Vec<Vec<C64>>, p: &[C64; 3], order2: bool| {
            // value + gradient rows (and all second derivatives if order2)
            let monos = sextic_monomials();
            let deriv_row = |d: [usize; 3]| -> Vec<C64> {
                monos
                    .iter()
                    .map(|&(i, j, k)| {
                        let e = [i, j, k];
                        let mut coef = 1.0;
                        let mut ok = true;
                        for v in 0..3 {
                            for s in 0..d[v] {
                                if e[v] < s + 1 {
                                    ok = false;
                                } else {
                                    coef *= (e[v] - s) as f64;
                                }
                            }
                        }
                        if !ok {
                            return C64::zero();
                        }
                        let mut acc = C64::from_f64s(coef, 0.0);
                        for v in 0..3 {
                            for _ in 0..(e[v] - d[v]) {
                                acc = acc * p[v];
                            }
                        }
                        acc
                    })
                    .collect()
            };
            rows.push(deriv_row([0, 0, 0]));
            rows.push(deriv_row([1, 0, 0]));
            rows.push(deriv_row([0, 1, 0]));
            rows.push(deriv_row([0, 0, 1]));
            if order2 {
                for d in [[2, 0, 0], [0, 2, 0], [0, 0, 2], [1, 1, 0], [1, 0, 1], [0, 1, 1]] {
                    rows.push(deriv_row(d));
                }
            }
        };
        push_derivs(&mut rows, &n0, true);
        for k in 1..6 {
            push_derivs(&mut rows, &model.conf.nodes[k], false);
        }
        let ker = kernel_numeric(&rows);
        assert!(!ker.is_empty());
        let coeffs: Vec<f64> = ker[0].iter().map(|z| z.re).collect();
        let err = SexticModel::new(coeffs, model.conf.clone(), 1e-7);
        assert!(err.is_err());
    }
}
