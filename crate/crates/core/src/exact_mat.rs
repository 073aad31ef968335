//! Exact dense linear algebra over a field.
//!
//! Plain Gaussian elimination with exact zero tests; meant for rational
//! coefficients at desk scale. The floating-point lane has its own pivoted
//! routines in `numeric`.

use crate::scalar::Field;

/// Reduced row echelon form, in place; returns the pivot columns.
pub fn rref<T: Field>(m: &mut Vec<Vec<T>>) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return vec![];
    }
    let cols = m[0].len();
    let mut pivots = vec![];
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv();
        for j in c..cols {
            m[r][j] = m[r][j].clone() * inv.clone();
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    m[i][j] = m[i][j].clone() - f.clone() * m[r][j].clone();
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

pub fn rank<T: Field>(rows: &[Vec<T>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// Basis of the right kernel `{v : Mv = 0}`.
pub fn kernel_basis<T: Field>(rows: &[Vec<T>]) -> Vec<Vec<T>> {
    if rows.is_empty() {
        return vec![];
    }
    let cols = rows[0].len();
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = vec![];
    for &fc in &free {
        let mut v = vec![T::zero(); cols];
        v[fc] = T::one();
        for (pr, &pc) in pivots.iter().enumerate() {
            v[pc] = -m[pr][fc].clone();
        }
        basis.push(v);
    }
    basis
}

/// Solves `Mx = b`; `None` when inconsistent. Underdetermined systems get
/// the solution with free variables set to zero.
pub fn solve<T: Field>(rows: &[Vec<T>], b: &[T]) -> Option<Vec<T>> {
    let cols = if rows.is_empty() { 0 } else { rows[0].len() };
    let mut m: Vec<Vec<T>> = rows
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut row = r.clone();
            row.push(bi.clone());
            row
        })
        .collect();
    let pivots = rref(&mut m);
    if pivots.contains(&cols) {
        return None; // pivot in the augmented column
    }
    let mut x = vec![T::zero(); cols];
    for (pr, &pc) in pivots.iter().enumerate() {
        x[pc] = m[pr][cols].clone();
    }
    Some(x)
}

/// Determinant by fraction-free-ish elimination (field version).
pub fn det<T: Field>(rows: &[Vec<T>]) -> T {
    let n = rows.len();
    let mut m = rows.to_vec();
    let mut acc = T::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return T::zero();
        };
        if p != c {
            m.swap(c, p);
            acc = -acc;
        }
        acc = acc * m[c][c].clone();
        let inv = m[c][c].inv();
        for i in (c + 1)..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone() * inv.clone();
            for j in c..n {
                m[i][j] = m[i][j].clone() - f.clone() * m[c][j].clone();
            }
        }
    }
    acc
}

/// 3×3 determinant without elimination.
pub fn det3<T: Field>(m: &[[T; 3]; 3]) -> T {
    let a = m[0][0].clone() * (m[1][1].clone() * m[2][2].clone() - m[1][2].clone() * m[2][1].clone());
    let b = m[0][1].clone() * (m[1][0].clone() * m[2][2].clone() - m[1][2].clone() * m[2][0].clone());
    let c = m[0][2].clone() * (m[1][0].clone() * m[2][1].clone() - m[1][1].clone() * m[2][0].clone());
    a - b + c
}

/// Cross product; as projective data, the intersection point of two lines
/// (or the line through two points).
pub fn cross3<T: Field>(u: &[T; 3], v: &[T; 3]) -> [T; 3] {
    [
        u[1].clone() * v[2].clone() - u[2].clone() * v[1].clone(),
        u[2].clone() * v[0].clone() - u[0].clone() * v[2].clone(),
        u[0].clone() * v[1].clone() - u[1].clone() * v[0].clone(),
    ]
}
