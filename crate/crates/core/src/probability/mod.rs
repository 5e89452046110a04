//! Finite-alphabet probability primitives.
//!
//! Everything here is immutable once constructed. Sequences over an alphabet of
//! size `k` are identified with integers in `[0, k^n)` in lexicographic order
//! (first symbol most significant), which is the canonical enumeration order used
//! by every exact computation in the crate.

mod alphabet;
mod channel;
mod joint;
pub mod json;
mod pmf;
pub(crate) mod sequence;
pub mod tensor;
pub(crate) mod typical;

pub use alphabet::{Alphabet, ERASURE_SYMBOL};
pub use channel::{channel_output_pmf, Channel};
pub use joint::JointPmf;
pub use pmf::{make_pmf, Pmf, NORMALIZATION_TOLERANCE};
pub use sequence::{product_probability, sequence_count, SequenceIndex};
pub use typical::{empirical_counts, empirical_pmf, is_letter_typical, joint_typicality_test};
