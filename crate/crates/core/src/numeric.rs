//! Floating-point machinery: deterministic seeded sampling, Aberth–Ehrlich
//! root finding, and small dense (complex) linear algebra.
//!
//! Everything here is generic over the [`Real`] scalar so the whole numeric
//! lane runs identically in f64 and in double-double; all iterations have
//! deterministic initialization and order, which is what makes instance
//! files and reports byte-reproducible across runs and worker counts.

use crate::scalar::{rat, Cplx, Rat, Real};
use num_traits::{One, Zero};

/// SplitMix64: tiny, portable, deterministic.
#[derive(Clone, Debug)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in `[lo, hi]` inclusive.
    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        let span = (hi - lo + 1) as u64;
        lo + (self.next_u64() % span) as i64
    }

    /// Small nonzero rational with numerator in ±[1,9] and denominator in [1,4].
    pub fn small_rat(&mut self) -> Rat {
        let n = loop {
            let n = self.int(-9, 9);
            if n != 0 {
                break n;
            }
        };
        rat(n, self.int(1, 4))
    }

    /// Small rational allowing zero.
    pub fn small_rat0(&mut self) -> Rat {
        rat(self.int(-9, 9), self.int(1, 4))
    }

    pub fn f64_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Complex number roughly uniform on an annulus of radius ~1.
    pub fn c_unit<R: Real>(&mut self) -> Cplx<R> {
        let a = self.f64_unit() * std::f64::consts::TAU;
        let r = 0.3 + self.f64_unit();
        Cplx::from_f64s(r * a.cos(), r * a.sin())
    }
}

// ---------------------------------------------------------------------------
// Polynomial roots.
// ---------------------------------------------------------------------------

pub fn poly_eval<R: Real>(c: &[Cplx<R>], z: Cplx<R>) -> Cplx<R> {
    let mut acc = Cplx::zero();
    for k in c.iter().rev() {
        acc = acc * z + *k;
    }
    acc
}

fn poly_deriv<R: Real>(c: &[Cplx<R>]) -> Vec<Cplx<R>> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(i, k)| Cplx::<R>::from_f64s(i as f64, 0.0) * *k)
        .collect()
}

/// All complex roots of `c[0] + c[1] z + … + c[n] z^n` (the leading
/// coefficient must dominate machine noise), by Aberth–Ehrlich with
/// deterministic initialization. High-precision lanes warm-start from the
/// f64 roots and finish with a few Newton corrections.
pub fn roots<R: Real>(c: &[Cplx<R>]) -> Vec<Cplx<R>> {
    let n = c.len() - 1;
    if n == 0 {
        return vec![];
    }
    if n == 1 {
        return vec![-c[0] / c[1]];
    }
    if R::eps() < R::from_f64(f64::EPSILON / 2.0) {
        // downcast, solve in f64, polish at full precision
        let c64: Vec<Cplx<f64>> = c.iter().map(|z| z.to_c64()).collect();
        if c64.iter().all(|z| z.re.is_finite() && z.im.is_finite())
            && c64[n].abs() > 0.0
        {
            let d = poly_deriv(c);
            let mut out: Vec<Cplx<R>> = roots(&c64)
                .into_iter()
                .map(|z| Cplx::from_f64s(z.re, z.im))
                .collect();
            for zi in out.iter_mut() {
                for _ in 0..4 {
                    let p = poly_eval(c, *zi);
                    let dp = poly_eval(&d, *zi);
                    if dp.abs().is_zero() {
                        break;
                    }
                    *zi = *zi - p / dp;
                }
            }
            out.sort_by(|a, b| {
                (a.re.to_f64(), a.im.to_f64())
                    .partial_cmp(&(b.re.to_f64(), b.im.to_f64()))
                    .unwrap()
            });
            return out;
        }
    }
    let d = poly_deriv(c);
    let lead = c[n].abs();
    let mut radius = R::zero();
    for k in c[..n].iter() {
        radius = radius.maxv(k.abs() / lead);
    }
    let radius = R::one() + radius;
    let mut z: Vec<Cplx<R>> = (0..n)
        .map(|i| {
            let ang = std::f64::consts::TAU * (i as f64 + 0.3711) / n as f64;
            Cplx::from_f64s(ang.cos(), ang.sin()).scale(radius)
        })
        .collect();
    let tol = R::eps() * R::from_f64(64.0);
    let scale: R = c.iter().fold(R::zero(), |m, k| m.maxv(k.abs()));
    for _ in 0..220 {
        let mut moved = R::zero();
        for i in 0..n {
            let p = poly_eval(c, z[i]);
            if p.abs() <= tol * scale {
                continue;
            }
            let dp = poly_eval(&d, z[i]);
            let newton = if dp.abs().is_zero() {
                Cplx::from_f64s(1e-12, 1e-12)
            } else {
                p / dp
            };
            let mut s = Cplx::zero();
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    s = s + Cplx::one() / (z[i] - *zj);
                }
            }
            let denom = Cplx::one() - newton * s;
            let w = if denom.abs().is_zero() {
                newton
            } else {
                newton / denom
            };
            z[i] = z[i] - w;
            moved = moved.maxv(w.abs());
        }
        if moved <= tol * radius {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let p = poly_eval(c, *zi);
            let dp = poly_eval(&d, *zi);
            if dp.abs().is_zero() {
                break;
            }
            *zi = *zi - p / dp;
        }
    }
    z.sort_by(|a, b| {
        (a.re.to_f64(), a.im.to_f64())
            .partial_cmp(&(b.re.to_f64(), b.im.to_f64()))
            .unwrap()
    });
    z
}

/// Projective roots of a complex binary form given by coefficients over
/// `x^(d-i) y^i`: pairs (x:y), with degree defects (relative to `rtol`)
/// turned into roots at (0:1).
pub fn form_roots_projective<R: Real>(coeffs: &[Cplx<R>], rtol: f64) -> Vec<(Cplx<R>, Cplx<R>)> {
    // as a polynomial in u = y/x the coefficient of u^i is coeffs[i], so a
    // small trailing block (high powers of y... the u-lead) drops the degree
    let d = coeffs.len() - 1;
    let scale: R = coeffs.iter().fold(R::zero(), |m, k| m.maxv(k.abs()));
    let thr = scale * R::from_f64(rtol);
    let mut hi = d;
    let mut out = vec![];
    while hi > 0 && coeffs[hi].abs() <= thr {
        out.push((Cplx::zero(), Cplx::one()));
        hi -= 1;
    }
    let trimmed = &coeffs[..=hi];
    if trimmed.len() > 1 {
        for r in roots(trimmed) {
            out.push((Cplx::one(), r));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Dense complex linear algebra (small sizes).
// ---------------------------------------------------------------------------

pub type CMat<R> = Vec<Vec<Cplx<R>>>;

pub fn mat_vec<R: Real>(m: &[Vec<Cplx<R>>], v: &[Cplx<R>]) -> Vec<Cplx<R>> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(Cplx::zero(), |acc, (a, b)| acc + *a * *b)
        })
        .collect()
}

/// Solves a square system by partial-pivoted elimination.
pub fn solve_square<R: Real>(m: &[Vec<Cplx<R>>], b: &[Cplx<R>]) -> Option<Vec<Cplx<R>>> {
    let n = m.len();
    let mut a: CMat<R> = m.to_vec();
    let mut rhs = b.to_vec();
    for c in 0..n {
        let (p, mx) = (c..n)
            .map(|i| (i, a[i][c].abs()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())?;
        if mx.is_zero() {
            return None;
        }
        a.swap(c, p);
        rhs.swap(c, p);
        for i in (c + 1)..n {
            let f = a[i][c] / a[c][c];
            for j in c..n {
                let t = a[c][j];
                a[i][j] = a[i][j] - f * t;
            }
            let t = rhs[c];
            rhs[i] = rhs[i] - f * t;
        }
    }
    let mut x = vec![Cplx::zero(); n];
    for i in (0..n).rev() {
        let mut acc = rhs[i];
        for j in (i + 1)..n {
            acc = acc - a[i][j] * x[j];
        }
        x[i] = acc / a[i][i];
    }
    Some(x)
}

/// AᴴA of a tall matrix.
pub fn gram<R: Real>(a: &[Vec<Cplx<R>>]) -> CMat<R> {
    let cols = a[0].len();
    let mut g = vec![vec![Cplx::<R>::zero(); cols]; cols];
    for row in a {
        for i in 0..cols {
            for j in 0..cols {
                g[i][j] = g[i][j] + row[i].conj() * row[j];
            }
        }
    }
    g
}

/// Singular values (ascending) and right singular vectors of a matrix with
/// `rows ≥ cols`, by one-sided (Hestenes) Jacobi on the columns. Working on
/// A itself rather than AᴴA keeps small singular values accurate down to
/// machine precision instead of its square root.
pub fn singular_values<R: Real>(a: &[Vec<Cplx<R>>]) -> (Vec<R>, CMat<R>) {
    let rows = a.len();
    let cols = a[0].len();
    assert!(rows >= cols, "one-sided Jacobi wants a tall matrix");
    let mut m: CMat<R> = a.to_vec();
    let mut v: CMat<R> = (0..cols)
        .map(|i| {
            (0..cols)
                .map(|j| if i == j { Cplx::one() } else { Cplx::zero() })
                .collect()
        })
        .collect();
    let tol = R::eps() * R::from_f64(cols as f64 * 8.0);
    let col_dot = |m: &CMat<R>, p: usize, q: usize| -> Cplx<R> {
        (0..rows).fold(Cplx::zero(), |acc, i| acc + m[i][p].conj() * m[i][q])
    };
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let app = col_dot(&m, p, p).re;
                let aqq = col_dot(&m, q, q).re;
                let apq = col_dot(&m, p, q);
                let mag = apq.abs();
                if mag <= tol * (app * aqq).sqrt() || mag.is_zero() {
                    continue;
                }
                rotated = true;
                // columns rotate by [[c, -s·e^{iφ}], [s·e^{-iφ}, c]] where
                // a_pq = |a_pq|·e^{iφ}; the annihilating t = tanθ solves
                // t² - 2τt - 1 = 0 with τ = (aqq - app)/(2|a_pq|)
                let phase = apq.scale(R::one() / mag);
                let tau = (aqq - app) / (R::from_f64(2.0) * mag);
                let root = (R::one() + tau * tau).sqrt();
                let t = if tau >= R::zero() {
                    -(R::one() / (tau + root))
                } else {
                    R::one() / (-tau + root)
                };
                let c = R::one() / (R::one() + t * t).sqrt();
                let s = t * c;
                let w = phase.scale(s);
                for i in 0..rows {
                    let (aip, aiq) = (m[i][p], m[i][q]);
                    m[i][p] = aip.scale(c) + aiq * w.conj();
                    m[i][q] = aiq.scale(c) - aip * w;
                }
                for i in 0..cols {
                    let (vip, viq) = (v[i][p], v[i][q]);
                    v[i][p] = vip.scale(c) + viq * w.conj();
                    v[i][q] = viq.scale(c) - vip * w;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sig: Vec<(R, usize)> = (0..cols)
        .map(|j| (col_dot(&m, j, j).re.maxv(R::zero()).sqrt(), j))
        .collect();
    sig.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let vals = sig.iter().map(|&(s, _)| s).collect();
    let vecs = (0..cols)
        .map(|r| sig.iter().map(|&(_, j)| v[r][j]).collect())
        .collect();
    (vals, vecs)
}

/// Null vector of a tall matrix: the right singular vector of least σ,
/// together with the ratio σ_min/σ_max.
pub fn null_vector<R: Real>(a: &[Vec<Cplx<R>>]) -> (Vec<Cplx<R>>, R) {
    let (s, v) = singular_values(a);
    let n = v.len();
    let vec = (0..n).map(|r| v[r][0]).collect();
    let smax = s[s.len() - 1];
    let ratio = if smax.is_zero() {
        R::zero()
    } else {
        s[0] / smax
    };
    (vec, ratio)
}

/// Numeric rank: count of singular values above `rtol·σ_max`.
pub fn numeric_rank<R: Real>(a: &[Vec<Cplx<R>>], rtol: f64) -> usize {
    let (s, _) = singular_values(a);
    let smax = s[s.len() - 1];
    if smax.is_zero() {
        return 0;
    }
    s.iter()
        .filter(|&&x| x > smax * R::from_f64(rtol))
        .count()
}

/// Least-squares solution via normal equations.
pub fn lstsq<R: Real>(a: &[Vec<Cplx<R>>], b: &[Cplx<R>]) -> Option<Vec<Cplx<R>>> {
    let g = gram(a);
    let cols = a[0].len();
    let mut rhs = vec![Cplx::<R>::zero(); cols];
    for (row, bi) in a.iter().zip(b) {
        for j in 0..cols {
            rhs[j] = rhs[j] + row[j].conj() * *bi;
        }
    }
    solve_square(&g, &rhs)
}

/// Scale-invariant chordal distance (sine of the angle) between projective
/// vectors, computed from the orthogonal component so that near-parallel
/// vectors do not lose half the digits to cancellation.
pub fn proj_dist<R: Real>(u: &[Cplx<R>], v: &[Cplx<R>]) -> R {
    let nu2 = u.iter().fold(R::zero(), |acc, x| acc + x.norm_sqr());
    let nv2 = v.iter().fold(R::zero(), |acc, x| acc + x.norm_sqr());
    if nu2.is_zero() || nv2.is_zero() {
        return R::one();
    }
    let ip = u
        .iter()
        .zip(v)
        .fold(Cplx::<R>::zero(), |acc, (x, y)| acc + x.conj() * *y);
    let coef = ip.scale(R::one() / nu2);
    let perp2 = u
        .iter()
        .zip(v)
        .fold(R::zero(), |acc, (x, y)| acc + (*y - *x * coef).norm_sqr());
    (perp2 / nv2).maxv(R::zero()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Dd, C64};

    #[test]
    fn rng_is_deterministic() {
        let mut a = Rng::new(7);
        let mut b = Rng::new(7);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        let mut c = Rng::new(8);
        assert_ne!(Rng::new(7).next_u64(), c.next_u64());
    }

    #[test]
    fn cubic_roots_f64() {
        // (z-1)(z-2)(z+3) = z³ - 7z + 6
        let c: Vec<C64> = [6.0, -7.0, 0.0, 1.0]
            .iter()
            .map(|&x| C64::from_f64s(x, 0.0))
            .collect();
        let mut r: Vec<f64> = roots(&c).iter().map(|z| z.re).collect();
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((r[0] + 3.0).abs() < 1e-12);
        assert!((r[1] - 1.0).abs() < 1e-12);
        assert!((r[2] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn roots_complex_pair_dd() {
        // z² + 1
        let one = Cplx::<Dd>::one();
        let c = vec![one, Cplx::zero(), one];
        let r = roots(&c);
        assert_eq!(r.len(), 2);
        for z in r {
            let err = (z * z + one).abs();
            assert!(err.to_f64() < 1e-28);
        }
    }

    #[test]
    fn projective_form_roots() {
        // x²y = x·x·y: roots (0:1) twice and (1:0) once
        let c: Vec<C64> = [0.0, 1.0, 0.0, 0.0]
            .iter()
            .map(|&x| C64::from_f64s(x, 0.0))
            .collect();
        let r = form_roots_projective(&c, 1e-12);
        assert_eq!(r.len(), 3);
        let at_01 = r.iter().filter(|(x, _)| x.abs() < 1e-12).count();
        let at_zero = r
            .iter()
            .filter(|(x, y)| x.abs() > 0.5 && y.abs() < 1e-12)
            .count();
        assert_eq!(at_01, 2);
        assert_eq!(at_zero, 1);
    }

    #[test]
    fn svd_rank_and_nullvector() {
        // rank-2 matrix (third row is the sum of the first two)
        let rows: Vec<Vec<C64>> = vec![
            vec![1.0, 2.0, 3.0, 1.0],
            vec![0.0, 1.0, 1.0, -1.0],
            vec![1.0, 3.0, 4.0, 0.0],
            vec![2.0, 5.0, 7.0, 1.0],
        ]
        .into_iter()
        .map(|r| r.into_iter().map(|x| C64::from_f64s(x, 0.0)).collect())
        .collect();
        assert_eq!(numeric_rank(&rows, 1e-10), 2);
        let (v, ratio) = null_vector(&rows);
        assert!(ratio < 1e-13);
        let mv = mat_vec(&rows, &v);
        for x in mv {
            assert!(x.abs() < 1e-13);
        }
    }

    #[test]
    fn square_solve_and_lstsq() {
        let a: Vec<Vec<C64>> = vec![
            vec![C64::from_f64s(2.0, 0.0), C64::from_f64s(0.0, 1.0)],
            vec![C64::from_f64s(1.0, -1.0), C64::from_f64s(3.0, 0.0)],
        ];
        let b = vec![C64::from_f64s(1.0, 0.0), C64::from_f64s(0.0, 0.0)];
        let x = solve_square(&a, &b).unwrap();
        let r = mat_vec(&a, &x);
        assert!((r[0] - b[0]).abs() < 1e-14 && (r[1] - b[1]).abs() < 1e-14);
        let x2 = lstsq(&a, &b).unwrap();
        assert!((x2[0] - x[0]).abs() < 1e-12 && (x2[1] - x[1]).abs() < 1e-12);
    }

    #[test]
    fn proj_dist_scale_invariance() {
        let u = vec![C64::from_f64s(1.0, 2.0), C64::from_f64s(0.0, -1.0)];
        let v: Vec<C64> = u.iter().map(|z| *z * C64::from_f64s(0.0, 3.0)).collect();
        assert!(proj_dist(&u, &v) < 1e-12);
        let w = vec![C64::from_f64s(0.0, 1.0), C64::from_f64s(1.0, 0.0)];
        assert!(proj_dist(&u, &w) > 0.1);
    }
}
