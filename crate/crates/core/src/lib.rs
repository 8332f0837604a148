//! Exact computation in Bianchi groups `PSL_2(O_d)`.
//!
//! The crate covers arithmetic in imaginary quadratic orders, 2x2 matrix
//! algebra up to sign, circle triples and their discriminants, quaternion
//! algebras `(-d, D / Q)` with the embedding into `M_2(Q(sqrt(-d)))`, finite
//! congruence quotients `PSL_2(O_d / (n))`, and the construction of
//! certified elements `g_k` in the normal closure of a parabolic `sigma` that
//! stabilize the circles `|z|^2 = D_k`.

pub mod appendix;
pub mod circles;
pub mod congruence;
pub mod numtheory;
pub mod pipeline;
pub mod psl2;
pub mod quadint;
pub mod quat;
pub mod witness;

pub use circles::{CircleTriple, HermitianMat};
pub use congruence::{FiniteSubgroup, ResidueElement, ResidueMatrix};
pub use pipeline::{CompressionWitness, GeneralParams, Mode, SlopeParams};
pub use psl2::{classify, eval_word, psl_eq, IsometryClass, Mat2, PslElement, Word};
pub use quadint::{QuadError, QuadInt, QuadRat};
pub use quat::{QuatAlgebra, Quaternion};
