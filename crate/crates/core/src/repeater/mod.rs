//! Entanglement swapping with Clare's optimal projective basis.
//!
//! Two pairs `|Φ_θ>` (Alice–Clare) and `|Φ_η>` (Clare–Bob) are joined by a
//! four-outcome projective measurement on Clare's two qubits. Two of the
//! outcomes leave Alice and Bob maximally entangled with no further action;
//! after the other two Bob applies a Procrustean filter. The overall success
//! probability reaches `min{2 sin²θ, 2 sin²η}`, the same as a Bell-basis
//! measurement, while Bob has to act less often.

mod basis;
mod protocol;
mod sampling;

pub use basis::{
    build_optimal_basis, projection_bounds, third_success_gap, OptimalBasis, ProjectiveMeasurement,
};
pub use protocol::{
    compare_with_bell, direct_success_closed_form, direct_success_prob, outcome_records,
    run_protocol_analytic, run_protocol_analytic_with, same_state_success_closed_form,
    AnalyticRun, Comparison, ExpectedLedger, OutcomeRecord, ProtocolSummary,
};
pub use sampling::{run_protocol_sampled, sample_once, LoccLedger, ProtocolRun, SampledRun, Sampler};
