//! Exponents, the sharp Gagliardo–Nirenberg constant, and verifiers for the
//! Grönwall and bootstrap lemmas.

mod exponents;
mod gn;
mod verify;

pub use exponents::{classify, exponents, exponents_rational, Criticality, ExponentSet, RationalExponents};
pub use gn::{gn_estimate, gn_profile_family, sharp_constant, weinstein_ratio, GnEstimate, GnMethod};
pub use verify::{
    bootstrap_verify, damped_weight_identity, gronwall_verify, scat1_gronwall_replay, scat3_bootstrap_replay,
    BootstrapReport, GronwallBranch, GronwallReport, Scat3Replay, WeightIdentity,
};
