use serde::{Deserialize, Serialize};

use super::basis::{build_optimal_basis, clare_branches, ProjectiveMeasurement};
use crate::concentration::{apply_measurement, procrustean_for, GeneralMeasurement};
use crate::error::{Error, Result};
use crate::qmath::Ket;
use crate::states::{is_max_entangled, make_joint, AngleRange, MAX_ENTANGLED_TOL};

/// Classical bits Clare sends Bob to announce one of four outcomes.
pub const CLASSICAL_BITS: u32 = 2;

/// What happens after one of Clare's outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    /// 1-based outcome label.
    pub outcome: usize,
    pub probability: f64,
    /// Alice–Bob state after the projection, normalized.
    pub post_state: Ket,
    /// Post-state already maximally entangled; Bob does nothing.
    pub maximal: bool,
    /// Bob applies a filter on this outcome.
    pub bob_acts: bool,
    /// Conditional probability of ending maximally entangled.
    pub bob_success: f64,
    #[serde(skip)]
    pub(crate) bob_measurement: Option<GeneralMeasurement>,
}

/// Per-run LOCC cost averaged over Clare's outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectedLedger {
    pub classical_bits_sent: u32,
    pub bob_acts_probability: f64,
    pub expected_local_measurements: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticRun {
    pub theta: f64,
    pub eta: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub p_ms: f64,
    pub per_outcome: Vec<OutcomeRecord>,
    pub ledger: ExpectedLedger,
}

impl AnalyticRun {
    /// Total probability of outcomes that need no action from Bob.
    pub fn direct_success(&self) -> f64 {
        self.per_outcome
            .iter()
            .filter(|o| o.maximal)
            .map(|o| o.probability)
            .fold(0.0, |acc, p| acc + p)
    }
}

/// Outcome analysis for an arbitrary rank-1 measurement of Clare's qubits.
///
/// Bob's filter is derived from each post-state's own Schmidt decomposition,
/// so the result does not depend on which pair is the less entangled one.
pub fn outcome_records(theta: f64, eta: f64, kets: &[Ket], range: AngleRange) -> Result<Vec<OutcomeRecord>> {
    let joint = make_joint(theta, eta, range)?;
    let branches = clare_branches(&joint, kets)?;
    branches
        .into_iter()
        .enumerate()
        .map(|(k, (p, post))| {
            let maximal = p > 0.0 && is_max_entangled(&post, 2, 2, MAX_ENTANGLED_TOL);
            let (bob_acts, bob_success, bob_measurement) = if p <= 0.0 {
                (false, 0.0, None)
            } else if maximal {
                (false, 1.0, None)
            } else {
                match procrustean_for(&post, 1) {
                    Ok(m) => {
                        let success = apply_measurement(&m, &post, &[2, 2], 1)?[0].probability;
                        (true, success, Some(m))
                    }
                    Err(Error::NoEntanglement) => (false, 0.0, None),
                    Err(e) => return Err(e),
                }
            };
            Ok(OutcomeRecord {
                outcome: k + 1,
                probability: p,
                post_state: post,
                maximal,
                bob_acts,
                bob_success,
                bob_measurement,
            })
        })
        .collect()
}

fn summarize(records: &[OutcomeRecord]) -> (f64, ExpectedLedger) {
    let p_ms = records.iter().map(|o| o.probability * o.bob_success).fold(0.0, |acc, p| acc + p);
    let bob_acts_probability: f64 = records.iter().filter(|o| o.bob_acts).map(|o| o.probability).fold(0.0, |acc, p| acc + p);
    (
        p_ms,
        ExpectedLedger {
            classical_bits_sent: CLASSICAL_BITS,
            bob_acts_probability,
            expected_local_measurements: 1.0 + bob_acts_probability,
        },
    )
}

pub fn run_protocol_analytic_with(theta: f64, eta: f64, beta1: f64, beta2: f64) -> Result<AnalyticRun> {
    let basis = build_optimal_basis(theta, eta, beta1, beta2)?;
    let per_outcome = outcome_records(basis.joint.theta, basis.joint.eta, &basis.kets, AngleRange::Strict)?;
    let (p_ms, ledger) = summarize(&per_outcome);
    Ok(AnalyticRun {
        theta: basis.joint.theta,
        eta: basis.joint.eta,
        beta1,
        beta2,
        p_ms,
        per_outcome,
        ledger,
    })
}

/// Exact success probability of the full protocol with `β₁ = β₂ = 0`.
pub fn run_protocol_analytic(theta: f64, eta: f64) -> Result<AnalyticRun> {
    run_protocol_analytic_with(theta, eta, 0.0, 0.0)
}

/// `p(φ₁) + p(φ₂)`: probability that Bob never has to act on the two
/// generically successful projections.
pub fn direct_success_prob(theta: f64, eta: f64) -> Result<f64> {
    let basis = build_optimal_basis(theta, eta, 0.0, 0.0)?;
    let br = basis.branches();
    Ok(br[0].0 + br[1].0)
}

/// `sin²2θ sin²2η / (2(1 − cos²2θ cos²2η))`.
pub fn direct_success_closed_form(theta: f64, eta: f64) -> f64 {
    let s = (2.0 * theta).sin().powi(2) * (2.0 * eta).sin().powi(2);
    let c = (2.0 * theta).cos().powi(2) * (2.0 * eta).cos().powi(2);
    s / (2.0 * (1.0 - c))
}

/// `sin²2θ (3 + cos²2θ) / (4(1 + cos²2θ))`, total over three successful
/// projections when both pairs share the angle `θ`.
pub fn same_state_success_closed_form(theta: f64) -> f64 {
    let s = (2.0 * theta).sin().powi(2);
    let c = (2.0 * theta).cos().powi(2);
    s * (3.0 + c) / (4.0 * (1.0 + c))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSummary {
    pub p_ms: f64,
    pub direct_success: f64,
    pub ledger: ExpectedLedger,
}

/// Optimal-basis protocol against a Bell measurement followed by Bob's filter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub theta: f64,
    pub eta: f64,
    pub optimal: ProtocolSummary,
    pub bell: ProtocolSummary,
    pub rate_difference: f64,
}

pub fn compare_with_bell(theta: f64, eta: f64) -> Result<Comparison> {
    let optimal = run_protocol_analytic(theta, eta)?;
    let bell_kets = ProjectiveMeasurement::bell().rank_one_kets()?;
    let bell_records = outcome_records(theta, eta, &bell_kets, AngleRange::Strict)?;
    let (bell_p, bell_ledger) = summarize(&bell_records);
    let bell_direct = bell_records
        .iter()
        .filter(|o| o.maximal)
        .map(|o| o.probability)
        .fold(0.0, |acc, p| acc + p);
    Ok(Comparison {
        theta: optimal.theta,
        eta: optimal.eta,
        rate_difference: optimal.p_ms - bell_p,
        optimal: ProtocolSummary {
            p_ms: optimal.p_ms,
            direct_success: optimal.direct_success(),
            ledger: optimal.ledger,
        },
        bell: ProtocolSummary {
            p_ms: bell_p,
            direct_success: bell_direct,
            ledger: bell_ledger,
        },
    })
}
