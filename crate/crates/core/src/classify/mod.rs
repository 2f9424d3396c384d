//! Recovering a bundle from a field theory that is only known through
//! queries.

mod oracle;
mod preflight;
mod reconstruct;

pub use oracle::{CompositionBugOracle, OracleEvaluator, TftBackedOracle, TftOracle, ZeroTransportOracle};
pub use preflight::{
    preflight, PreflightCheck, PreflightReport, CONSTANT_IDENTITY, IDENTITY_TOLERANCE, INVERTIBILITY,
    INVERTIBILITY_FLOOR, MULTIPLICATIVITY, MULTIPLICATIVITY_TOLERANCE, SPLIT_COUNT,
};
pub use reconstruct::{
    compare_on, convergence_study, extract_form, reconstruct, reconstruct_connection, roundtrip, sample_bordisms,
    ConvergenceStudy, ExtractedForm, Probe, Reconstruction, ReconstructionReport, ReconstructionSettings, RoundTrip,
    DEFAULT_DEGREE, DEFAULT_STEP, FORM_DEGENERACY_THRESHOLD, FORM_SYMMETRY_TOLERANCE, MIN_STEP,
    RECONSTRUCTED_COMPATIBILITY, ROUNDTRIP_TOLERANCE,
};
