//! Exact-arithmetic laboratory for the quintic del Pezzo threefold B and the
//! genus-4 spin-curve data carried by its rational sextics of conic type.
//!
//! The crate has two lanes:
//!
//! * an exact lane over arbitrary-precision rationals — binary forms,
//!   transvectants, the Plücker model of B inside Λ²V₄, the line geometry of
//!   B as conic polarity on P², and Picard-lattice arithmetic on blow-ups of
//!   the plane;
//! * a floating-point lane (f64 or double-double, selected by
//!   `precision_bits`) — root extraction, plane-sextic fitting, and the
//!   reconstruction solver that recovers a conic-type sextic from a six-nodal
//!   plane sextic on a (4,6) configuration.
//!
//! Concrete type aliases for both lanes live at the crate root; all core
//! geometry is generic over the scalar.

pub mod binary_form;
pub mod verify;
pub mod reconstruction;
pub mod pipeline;
pub mod lattice;
pub mod lines;
pub mod numeric;
pub mod cross_ratio;
pub mod exact_mat;





pub mod scalar;
pub mod unipoly;
pub mod wedge;

pub use binary_form::{act, transvectant, BinaryForm, FormError, Mobius};
pub use cross_ratio::{quartic_pencil_modulus, CrossRatioOrbit};
pub use scalar::{rat, rint, Cplx, Dd, Field, Rat, Real, Ring, C64, Cdd};

/// Rational binary form (the exact lane).
pub type QForm = BinaryForm<Rat>;
/// Complex binary form over f64 (the default numeric lane).
pub type CForm = BinaryForm<C64>;
/// Complex binary form over double-double (the high-precision lane).
pub type DdForm = BinaryForm<Cdd>;
/// Rational univariate polynomial.
pub type QPoly = unipoly::UniPoly<Rat>;
