//! Cross-ratio moduli of binary quartics.
//!
//! A quartic with four distinct roots on P¹ is classified up to Möbius
//! equivalence by the orbit of its cross-ratio under the anharmonic group,
//! `{t, 1/t, 1-t, 1/(1-t), (t-1)/t, t/(t-1)}`. When the quartic splits over
//! the rationals the orbit is computed from the roots; otherwise it is
//! returned as the root set of an explicit degree-6 resolvent built from the
//! two basic transvectant invariants, which is itself a complete invariant.

use crate::binary_form::{transvectant, BinaryForm, FormError, QForm};
use crate::scalar::{Rat, Ring};
use crate::unipoly::{QPoly, UniPoly};
use num_traits::{One, Zero};

/// Cross-ratio orbit of a quartic pencil, a complete Möbius invariant.
#[derive(Clone, Debug, PartialEq)]
pub enum CrossRatioOrbit {
    /// Orbit values, sorted and deduplicated (6, 3 or 2 of them).
    Exact(Vec<Rat>),
    /// Monic squarefree resolvent whose complex roots are the orbit, plus
    /// whatever orbit values happen to be rational.
    Resolvent {
        poly: QPoly,
        rational_values: Vec<Rat>,
    },
}

/// Degree-0 invariant `(F,F)₄`.
fn inv_i<T: Ring>(f: &BinaryForm<T>) -> T {
    transvectant(f, f, 4).unwrap().coeff(0).clone()
}

/// Degree-0 invariant `(F,(F,F)₂)₄`.
fn inv_j<T: Ring>(f: &BinaryForm<T>) -> T {
    let h = transvectant(f, f, 2).unwrap();
    transvectant(f, &h, 4).unwrap().coeff(0).clone()
}

/// The normal-form quartic `xy(x-y)(zy-x)` with z as a polynomial variable.
fn normal_form_pencil() -> BinaryForm<UniPoly<Rat>> {
    let z = UniPoly::<Rat>::var();
    let one = UniPoly::<Rat>::one();
    BinaryForm::new(vec![
        UniPoly::zero(),
        -one.clone(),
        one + z.clone(),
        -z,
        UniPoly::zero(),
    ])
}

fn anharmonic_orbit(t: &Rat) -> Vec<Rat> {
    let one = Rat::one();
    let mut orbit = vec![
        t.clone(),
        one.clone() / t,
        &one - t,
        one.clone() / (&one - t),
        (t - &one) / t,
        t / (t - &one),
    ];
    orbit.sort();
    orbit.dedup();
    orbit
}

/// Cross-ratio orbit of the four roots of a quartic with distinct roots.
pub fn quartic_pencil_modulus(f: &QForm) -> Result<CrossRatioOrbit, FormError> {
    if f.is_zero() {
        return Err(FormError::ZeroForm);
    }
    if f.degree() != 4 {
        return Err(FormError::DegreeMismatch {
            expected: 4,
            found: f.degree(),
        });
    }
    if f.has_repeated_root() {
        return Err(FormError::RepeatedRoots);
    }
    if let Some(roots) = f.rational_roots_projective() {
        let pts: Vec<&(Rat, Rat)> = roots.iter().map(|(p, _)| p).collect();
        debug_assert_eq!(pts.len(), 4);
        // bracket (ij) = x_i y_j - x_j y_i handles the point at infinity uniformly
        let br = |i: usize, j: usize| &pts[i].0 * &pts[j].1 - &pts[j].0 * &pts[i].1;
        let t = (br(0, 2) * br(1, 3)) / (br(0, 3) * br(1, 2));
        return Ok(CrossRatioOrbit::Exact(anharmonic_orbit(&t)));
    }
    // Resolvent: z is in the orbit of F iff the absolute invariant I³/J² of
    // the normal form at z matches that of F.
    let (i_f, j_f) = (inv_i(f), inv_j(f));
    let pencil = normal_form_pencil();
    let (i_z, j_z) = (inv_i(&pencil), inv_j(&pencil));
    let n = i_z.clone() * i_z.clone() * i_z * UniPoly::constant(&j_f * &j_f)
        - j_z.clone() * j_z * UniPoly::constant(&i_f * &i_f * &i_f);
    debug_assert!(!n.is_zero(), "resolvent vanished on a nondegenerate quartic");
    let poly = n.squarefree_part().monic();
    let rational_values = poly.rational_roots();
    if rational_values.len() == poly.deg().unwrap_or(0) {
        let mut vals = rational_values;
        vals.sort();
        return Ok(CrossRatioOrbit::Exact(vals));
    }
    Ok(CrossRatioOrbit::Resolvent {
        poly,
        rational_values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binary_form::{act, Mobius};
    use crate::scalar::{rat, rint};

    fn qf(c: &[i64]) -> QForm {
        BinaryForm::new(c.iter().map(|&x| rint(x)).collect())
    }

    #[test]
    fn normal_form_orbit() {
        // xy(x-y)(2y-x): roots 0, ∞, 1, 2 already in normal form
        let f = qf(&[0, -1, 3, -2, 0]);
        let orbit = quartic_pencil_modulus(&f).unwrap();
        assert_eq!(
            orbit,
            CrossRatioOrbit::Exact(vec![rint(-1), rat(1, 2), rint(2)])
        );
    }

    #[test]
    fn harmonic_quadruple() {
        // xy(x-y)(x+y): roots 0, ∞, 1, -1; harmonic, 3-element orbit with -1
        let f = qf(&[0, 1, 0, -1, 0]);
        match quartic_pencil_modulus(&f).unwrap() {
            CrossRatioOrbit::Exact(vals) => {
                assert_eq!(vals.len(), 3);
                assert!(vals.contains(&rint(-1)));
            }
            other => panic!("expected exact orbit, got {:?}", other),
        }
    }

    #[test]
    fn resolvent_path_recovers_harmonic() {
        // x⁴+y⁴ has no rational roots but a harmonic (hence rational) orbit
        let f = qf(&[1, 0, 0, 0, 1]);
        let orbit = quartic_pencil_modulus(&f).unwrap();
        assert_eq!(
            orbit,
            CrossRatioOrbit::Exact(vec![rint(-1), rat(1, 2), rint(2)])
        );
    }

    #[test]
    fn degenerate_inputs_rejected() {
        assert_eq!(
            quartic_pencil_modulus(&qf(&[1, 0, 0, 0, 0])).unwrap_err(),
            FormError::RepeatedRoots
        );
        assert_eq!(
            quartic_pencil_modulus(&BinaryForm::zero_of_degree(4)).unwrap_err(),
            FormError::ZeroForm
        );
    }

    #[test]
    fn mobius_invariance_exact_and_resolvent() {
        let g = Mobius::new(rint(2), rint(1), rint(-1), rint(3)).unwrap();
        // rational-split quartic
        let f = qf(&[0, -1, 3, -2, 0]);
        assert_eq!(
            quartic_pencil_modulus(&f).unwrap(),
            quartic_pencil_modulus(&act(&g, &f)).unwrap()
        );
        // irrational orbit: resolvents must agree exactly after normalization
        let f = qf(&[1, 1, 0, 0, 1]);
        let a = quartic_pencil_modulus(&f).unwrap();
        let b = quartic_pencil_modulus(&act(&g, &f)).unwrap();
        assert_eq!(a, b);
        match a {
            CrossRatioOrbit::Resolvent { poly, .. } => {
                assert_eq!(poly.deg(), Some(6));
                assert!(poly.is_squarefree());
            }
            CrossRatioOrbit::Exact(_) => panic!("expected irrational orbit"),
        }
    }
}
