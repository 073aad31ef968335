//! Exact intersection theory on blow-ups of the plane.
//!
//! Two lattices: `PicZ` for the quintic del Pezzo surface (plane blown up in
//! four points, classes `dλ - Σ mᵢeᵢ`) and `PicS` for the six-point blow-up
//! carrying the nodal plane sextic (classes `a·h - Σ n_ij·E_ij`, E-indices
//! running over the six transpositions of {1,2,3,4}). Both carry the
//! standard unimodular form λ² = h² = 1, exceptional squares -1.

use crate::exact_mat::solve;
use crate::scalar::Rat;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

/// The six transpositions (i,j), 1 ≤ i < j ≤ 4, indexing the nodes and the
/// exceptional classes on S.
pub const TRANSPOSITIONS: [(usize, usize); 6] = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)];

pub fn transposition_index(i: usize, j: usize) -> usize {
    TRANSPOSITIONS
        .iter()
        .position(|&p| p == (i, j) || p == (j, i))
        .expect("bad transposition")
}

#[derive(Debug, Error, PartialEq)]
pub enum LatticeError {
    #[error("cremona indices must be three distinct values in 1..=4")]
    BadCremonaIndices,
    #[error("class fails the degree/genus preconditions of the trichotomy")]
    NotASexticClass,
    #[error("branch count {0} is inconsistent (parity or negative genus)")]
    BadBranchCount(i64),
}

/// Divisor class on the 4-point blow-up Z: `d·λ - Σ mᵢ·eᵢ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PicZ {
    pub d: i64,
    pub m: [i64; 4],
}

impl PicZ {
    pub fn new(d: i64, m: [i64; 4]) -> Self {
        PicZ { d, m }
    }

    pub fn lambda(k: i64) -> Self {
        PicZ { d: k, m: [0; 4] }
    }

    pub fn canonical() -> Self {
        // K_Z = -3λ + Σeᵢ
        PicZ {
            d: -3,
            m: [-1; 4],
        }
    }

    /// The hyperplane class 3λ - Σeᵢ of the embedding in P⁵.
    pub fn hyperplane() -> Self {
        PicZ { d: 3, m: [1; 4] }
    }

    pub fn dot(&self, o: &PicZ) -> i64 {
        self.d * o.d - self.m.iter().zip(&o.m).map(|(a, b)| a * b).sum::<i64>()
    }

    /// Degree for the anticanonical-half polarization: D·(3λ - Σeᵢ).
    pub fn degree(&self) -> i64 {
        self.dot(&Self::hyperplane())
    }

    /// Arithmetic genus by adjunction: (D² + D·K)/2 + 1.
    pub fn arith_genus(&self) -> i64 {
        (self.dot(self) + self.dot(&Self::canonical())) / 2 + 1
    }

    pub fn add(&self, o: &PicZ) -> PicZ {
        PicZ {
            d: self.d + o.d,
            m: std::array::from_fn(|i| self.m[i] + o.m[i]),
        }
    }
}

/// Divisor class on the 6-point blow-up S: `h·H + Σ e[k]·E_k` with plain
/// coefficients (so the nodal sextic is h = 6, e = [-2,…]).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PicS {
    pub h: i64,
    pub e: [i64; 6],
}

impl PicS {
    pub fn new(h: i64, e: [i64; 6]) -> Self {
        PicS { h, e }
    }

    pub fn canonical() -> Self {
        PicS {
            h: -3,
            e: [1; 6],
        }
    }

    pub fn dot(&self, o: &PicS) -> i64 {
        self.h * o.h - self.e.iter().zip(&o.e).map(|(a, b)| a * b).sum::<i64>()
    }

    pub fn arith_genus(&self) -> i64 {
        (self.dot(self) + self.dot(&Self::canonical())) / 2 + 1
    }

    pub fn add(&self, o: &PicS) -> PicS {
        PicS {
            h: self.h + o.h,
            e: std::array::from_fn(|i| self.e[i] + o.e[i]),
        }
    }

    pub fn sub(&self, o: &PicS) -> PicS {
        PicS {
            h: self.h - o.h,
            e: std::array::from_fn(|i| self.e[i] - o.e[i]),
        }
    }

    pub fn scale(&self, k: i64) -> PicS {
        PicS {
            h: self.h * k,
            e: std::array::from_fn(|i| self.e[i] * k),
        }
    }

    /// The class of the six-nodal plane sextic, 6H - 2Σ E_k.
    pub fn nodal_sextic() -> Self {
        PicS { h: 6, e: [-2; 6] }
    }

    /// Configuration-line class L_i = h - Σ_{j≠i} E_ij (the line through the
    /// three nodes with index i).
    pub fn config_line(i: usize) -> Self {
        assert!((1..=4).contains(&i));
        let mut e = [0i64; 6];
        for (k, &(a, b)) in TRANSPOSITIONS.iter().enumerate() {
            if a == i || b == i {
                e[k] = -1;
            }
        }
        PicS { h: 1, e }
    }

    /// Single exceptional class E_ij.
    pub fn exceptional(i: usize, j: usize) -> Self {
        let mut e = [0i64; 6];
        e[transposition_index(i, j)] = 1;
        PicS { h: 0, e }
    }
}

/// Trichotomy label for smooth rational sextics relative to a hyperplane
/// section of B.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SexticCase {
    /// Spanning P⁶ (no class on Z); never produced by the lattice test.
    I,
    /// 5λ - 2(e₁+e₂+e₃) - 3e₄ up to the Weyl action.
    II,
    /// 2λ: the conic-type case.
    III,
    Other,
}

/// Standard quadratic transformation centred at three of the four points.
pub fn cremona(d: &PicZ, idx: [usize; 3]) -> Result<PicZ, LatticeError> {
    let mut s = idx;
    s.sort();
    if s[0] == s[1] || s[1] == s[2] || s.iter().any(|&i| !(1..=4).contains(&i)) {
        return Err(LatticeError::BadCremonaIndices);
    }
    let (i, j, k) = (s[0] - 1, s[1] - 1, s[2] - 1);
    let t = d.d - d.m[i] - d.m[j] - d.m[k];
    let mut m = d.m;
    m[i] += t;
    m[j] += t;
    m[k] += t;
    Ok(PicZ { d: d.d + t, m })
}

/// Weyl-group orbit of a class under index permutations and Cremona moves.
pub fn weyl_orbit(d: &PicZ) -> Vec<PicZ> {
    use std::collections::BTreeSet;
    let mut seen: BTreeSet<PicZ> = BTreeSet::new();
    let mut work = vec![*d];
    seen.insert(*d);
    while let Some(c) = work.pop() {
        let mut push = |n: PicZ| {
            if seen.insert(n) {
                work.push(n);
            }
        };
        // adjacent transpositions generate the permutations
        for i in 0..3 {
            let mut m = c.m;
            m.swap(i, i + 1);
            push(PicZ { d: c.d, m });
        }
        for idx in [[1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]] {
            push(cremona(&c, idx).unwrap());
        }
    }
    seen.into_iter().collect()
}

/// Places a numerical sextic class in the trichotomy, normalizing by the
/// Weyl action.
pub fn classify_sextic(d: &PicZ) -> Result<SexticCase, LatticeError> {
    if d.degree() != 6 || d.arith_genus() != 0 {
        return Err(LatticeError::NotASexticClass);
    }
    let orbit = weyl_orbit(d);
    if orbit.contains(&PicZ::lambda(2)) {
        return Ok(SexticCase::III);
    }
    if orbit.contains(&PicZ::new(5, [2, 2, 2, 3])) {
        return Ok(SexticCase::II);
    }
    Ok(SexticCase::Other)
}

/// Genus from the Hurwitz formula `2g - 2 = deg·(2g₀ - 2) + b` for a simply
/// branched cover.
pub fn hurwitz_genus(cover_degree: i64, base_genus: i64, branch_points: i64) -> Result<i64, LatticeError> {
    let rhs = cover_degree * (2 * base_genus - 2) + branch_points;
    if rhs % 2 != 0 {
        return Err(LatticeError::BadBranchCount(branch_points));
    }
    let g = rhs / 2 + 1;
    if g < 0 {
        return Err(LatticeError::BadBranchCount(branch_points));
    }
    Ok(g)
}

/// Report of the divisor-class identities behind the half-canonical data of
/// the nodal sextic model.
#[derive(Clone, Debug, Serialize)]
pub struct ThetaReport {
    /// Σ Lᵢ = 4h - 2Σ E_ij (each node lies on two configuration lines).
    pub sum_of_lines: bool,
    /// (3h - ΣE) - (h + E₁₂ - E₃₄) = L₁ + L₂ (adjunction class versus the
    /// explicit half-canonical representative).
    pub adjunction_vs_half: bool,
    /// 2θ ≡ K_C and 2(θ - δ) ≡ 0 modulo the configuration lines, with
    /// 2δ ≡ h + E₁₂ - E₃₄ and θ = h - δ.
    pub theta_squares_to_canonical: bool,
    pub two_torsion: bool,
}

impl ThetaReport {
    pub fn all_hold(&self) -> bool {
        self.sum_of_lines
            && self.adjunction_vs_half
            && self.theta_squares_to_canonical
            && self.two_torsion
    }
}

/// Membership of a class in the integer span of the four configuration
/// lines; used to model linear equivalence after restriction to the curve.
pub fn in_config_line_span(c: &PicS) -> bool {
    let lines: Vec<PicS> = (1..=4).map(PicS::config_line).collect();
    // 7 equations (h and six E's), 4 unknowns, solved over Q then checked
    // for integrality
    let rows: Vec<Vec<Rat>> = (0..7)
        .map(|r| {
            lines
                .iter()
                .map(|l| {
                    let v = if r == 0 { l.h } else { l.e[r - 1] };
                    Rat::from_integer(v.into())
                })
                .collect()
        })
        .collect();
    let rhs: Vec<Rat> = (0..7)
        .map(|r| {
            let v = if r == 0 { c.h } else { c.e[r - 1] };
            Rat::from_integer(v.into())
        })
        .collect();
    match solve(&rows, &rhs) {
        None => false,
        Some(x) => x.iter().all(|v| v.denom().is_one() || v.is_zero()),
    }
}

/// Checks the divisor-class identities of the spin structure exactly.
pub fn verify_theta_identities() -> ThetaReport {
    let lines: Vec<PicS> = (1..=4).map(PicS::config_line).collect();
    let sum_lines = lines.iter().fold(PicS::new(0, [0; 6]), |a, l| a.add(l));
    let sum_of_lines = sum_lines == PicS::new(4, [-2; 6]);

    let e12 = transposition_index(1, 2);
    let e34 = transposition_index(3, 4);
    // h + E₁₂ - E₃₄
    let mut half = PicS::new(1, [0; 6]);
    half.e[e12] = 1;
    half.e[e34] = -1;
    let adj = PicS::new(3, [-1; 6]); // class restricting to K_C
    let l12 = lines[0].add(&lines[1]);
    let adjunction_vs_half = adj.sub(&half) == l12;

    // 2δ ≡ half, θ = h - δ so 2θ = 2h - 2δ
    let two_delta = half;
    let two_theta = PicS::new(2, [0; 6]).sub(&two_delta);
    let theta_squares_to_canonical = in_config_line_span(&adj.sub(&two_theta));
    let two_torsion = in_config_line_span(&two_theta.sub(&two_delta));

    ThetaReport {
        sum_of_lines,
        adjunction_vs_half,
        theta_squares_to_canonical,
        two_torsion,
    }
}
