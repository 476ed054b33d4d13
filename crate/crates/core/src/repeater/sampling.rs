use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::protocol::{run_protocol_analytic, AnalyticRun, CLASSICAL_BITS};
use crate::concentration::{apply_measurement, sample_index, Branch};
use crate::error::Result;
use crate::qmath::Ket;
use crate::states::{is_max_entangled, MAX_ENTANGLED_TOL};

/// Samples per independent random stream.
const CHUNK: usize = 4096;

/// LOCC cost of one protocol run.
///
/// A local measurement is one completed measurement by one party; Clare's
/// four-outcome projection and Bob's two-outcome filter count as one each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoccLedger {
    pub classical_bits_sent: u32,
    pub local_measurements: u32,
    pub measurement_outcomes_total: u32,
}

/// One sampled execution of the protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolRun {
    pub outcome: usize,
    pub clare_prob: f64,
    pub bob_acted: bool,
    pub bob_outcome: Option<usize>,
    pub final_success: bool,
    pub final_state: Ket,
    pub ledger: LoccLedger,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledRun {
    pub theta: f64,
    pub eta: f64,
    pub n: u64,
    pub seed: u64,
    pub successes: u64,
    pub estimate: f64,
    pub stderr: f64,
    pub outcome_counts: [u64; 4],
    pub bob_acts_count: u64,
    pub bob_acts_frequency: f64,
    pub mean_classical_bits: f64,
    pub mean_local_measurements: f64,
}

struct OutcomePlan {
    probability: f64,
    post_state: Ket,
    bob: Option<Vec<(Branch, bool)>>,
    maximal: bool,
}

/// Precomputed Born distributions for repeated sampling of one scenario.
pub struct Sampler {
    clare_probs: Vec<f64>,
    outcomes: Vec<OutcomePlan>,
}

impl Sampler {
    pub fn new(run: &AnalyticRun) -> Result<Self> {
        let outcomes = run
            .per_outcome
            .iter()
            .map(|o| {
                let bob = match &o.bob_measurement {
                    Some(m) => Some(
                        apply_measurement(m, &o.post_state, &[2, 2], 1)?
                            .into_iter()
                            .map(|b| {
                                let ok = b
                                    .state
                                    .as_ref()
                                    .is_some_and(|s| is_max_entangled(s, 2, 2, MAX_ENTANGLED_TOL));
                                (b, ok)
                            })
                            .collect(),
                    ),
                    None => None,
                };
                Ok(OutcomePlan {
                    probability: o.probability,
                    post_state: o.post_state.clone(),
                    bob,
                    maximal: o.maximal,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            clare_probs: outcomes.iter().map(|o| o.probability).collect(),
            outcomes,
        })
    }

    /// Clare measures, announces her outcome with two bits, Bob filters if needed.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> ProtocolRun {
        let k = sample_index(&self.clare_probs, rng);
        let plan = &self.outcomes[k];
        let mut ledger = LoccLedger {
            classical_bits_sent: CLASSICAL_BITS,
            local_measurements: 1,
            measurement_outcomes_total: self.clare_probs.len() as u32,
        };
        match &plan.bob {
            Some(branches) => {
                let probs: Vec<f64> = branches.iter().map(|(b, _)| b.probability).collect();
                let j = sample_index(&probs, rng);
                let (branch, ok) = &branches[j];
                ledger.local_measurements += 1;
                ledger.measurement_outcomes_total += branches.len() as u32;
                ProtocolRun {
                    outcome: k + 1,
                    clare_prob: plan.probability,
                    bob_acted: true,
                    bob_outcome: Some(j),
                    final_success: *ok,
                    final_state: branch.state.clone().unwrap_or_else(|| Ket::zeros(4)),
                    ledger,
                }
            }
            None => ProtocolRun {
                outcome: k + 1,
                clare_prob: plan.probability,
                bob_acted: false,
                bob_outcome: None,
                final_success: plan.maximal,
                final_state: plan.post_state.clone(),
                ledger,
            },
        }
    }
}

/// A single protocol execution drawn from `rng`.
pub fn sample_once(theta: f64, eta: f64, rng: &mut ChaCha8Rng) -> Result<ProtocolRun> {
    let run = run_protocol_analytic(theta, eta)?;
    Ok(Sampler::new(&run)?.sample(rng))
}

#[derive(Default)]
struct Tally {
    successes: u64,
    outcomes: [u64; 4],
    bob_acts: u64,
    bits: u64,
    measurements: u64,
}

impl Tally {
    fn merge(mut self, o: Tally) -> Tally {
        self.successes += o.successes;
        for k in 0..4 {
            self.outcomes[k] += o.outcomes[k];
        }
        self.bob_acts += o.bob_acts;
        self.bits += o.bits;
        self.measurements += o.measurements;
        self
    }
}

/// Monte-Carlo estimate of the protocol's success probability.
///
/// Samples are split into fixed-size chunks, each drawn from its own ChaCha
/// stream of `seed`, so the result depends only on `(seed, n)` and not on
/// the thread count.
pub fn run_protocol_sampled(theta: f64, eta: f64, n: u64, seed: u64) -> Result<SampledRun> {
    let run = run_protocol_analytic(theta, eta)?;
    let sampler = Sampler::new(&run)?;
    let n_usize = n as usize;
    let chunks = n_usize.div_ceil(CHUNK);
    let tally = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = CHUNK.min(n_usize - c * CHUNK);
            let mut t = Tally::default();
            for _ in 0..len {
                let r = sampler.sample(&mut rng);
                t.successes += r.final_success as u64;
                t.outcomes[r.outcome - 1] += 1;
                t.bob_acts += r.bob_acted as u64;
                t.bits += r.ledger.classical_bits_sent as u64;
                t.measurements += r.ledger.local_measurements as u64;
            }
            t
        })
        .reduce(Tally::default, Tally::merge);

    let nf = n.max(1) as f64;
    let estimate = tally.successes as f64 / nf;
    Ok(SampledRun {
        theta: run.theta,
        eta: run.eta,
        n,
        seed,
        successes: tally.successes,
        estimate,
        stderr: (estimate * (1.0 - estimate) / nf).sqrt(),
        outcome_counts: tally.outcomes,
        bob_acts_count: tally.bob_acts,
        bob_acts_frequency: tally.bob_acts as f64 / nf,
        mean_classical_bits: tally.bits as f64 / nf,
        mean_local_measurements: tally.measurements as f64 / nf,
    })
}
