//! Exact construction and certification of biangular line packings built
//! from representations of `SL(2, F_q)`.
//!
//! The real family lives at `q = 2^(2k+1)` in dimension `q - 1`; the complex
//! family at `q = 3^k` in dimension `(q - 1)/2`. All arithmetic is exact, in
//! `Z[ζ₃]` over a common integer denominator.

pub mod certify;
pub mod characters;
pub mod cyclotomic;
pub mod error;
pub mod gf;
pub mod packing;
pub mod quad_ext;
pub mod report;
pub mod repr;
pub mod selftest;

pub use certify::{full_certificate, special_bound, welch_bound, Certificate, ExactNumber, Rational};
pub use characters::{AdditiveChar, BesselTable, CircleChar, CyclicChar, MulChar};
pub use cyclotomic::{Cyclo, ScaledCyclo};
pub use error::{Error, Result};
pub use gf::{Field, FieldElement, FieldSpec};
pub use packing::{build_phi_even, build_phi_odd, gram, Family, FieldTag, GramData, LineSystem};
pub use quad_ext::{ExtElement, QuadExt, RepStrategy};
pub use report::Check;
pub use repr::{GroupElement, ReprMatrix, Representation};
