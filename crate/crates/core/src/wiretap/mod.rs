//! Finite wiretap codes: construction, typicality decoding, exact error
//! probabilities, and exact leakage to type I and type II eavesdroppers.

mod code;
mod decode;
mod leakage;
mod sanov;

pub use code::{build_wiretap_code, WiretapCode, DEFAULT_TYPICALITY_EPS};
pub use decode::{
    decode, error_probabilities, expurgate, sample_output, wilson_interval, Decoded, ErrorMode,
    ErrorReport, ExpurgationResult, MessageError, WILSON_Z99,
};
pub use leakage::{
    binomial, combinations, decomposition_check, eavesdropper_conditional_wtc2, leakage_from_family,
    observed_count, ss_metric_wtc1, ss_metric_wtc2, wtc1_conditionals, DecompositionCheck,
    LeakageReport, SubsetEntry, SubsetLeakage, SubsetMode,
};
pub use sanov::{sanov_bound, sanov_crossover, SanovBound};
