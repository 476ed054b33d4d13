//! Single-pair entanglement concentration with a two-outcome local filter.
//!
//! For `|Φ_λ> = cos λ|00> + sin λ|11>` with `cos λ ≥ sin λ`, the filter
//! `M₀ = tan λ|0><0| + |1><1|`, `M₁ = √(1 − tan²λ)|0><0|` applied on one side
//! leaves a maximally entangled pair on outcome 0 with probability `2 sin²λ`,
//! which is the largest probability any LOCC protocol can reach.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{apply_local, schmidt, ComplexMatrix, Ket};

/// Completeness tolerance for measurement sets.
pub const COMPLETENESS_TOL: f64 = 1e-10;

const NORMALIZATION_TOL: f64 = 1e-10;

/// Measurement operators `{M_i}` with `Σ M_i†M_i = I`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralMeasurement {
    operators: Vec<ComplexMatrix>,
}

impl GeneralMeasurement {
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let m = Self { operators };
        let deviation = m.completeness_deviation()?;
        if deviation > COMPLETENESS_TOL {
            return Err(Error::IncompleteMeasurement { deviation });
        }
        Ok(m)
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn outcomes(&self) -> usize {
        self.operators.len()
    }

    pub fn dim(&self) -> usize {
        self.operators.first().map_or(0, ComplexMatrix::cols)
    }

    /// `‖Σ M_i†M_i − I‖_∞` entrywise.
    pub fn completeness_deviation(&self) -> Result<f64> {
        let Some(first) = self.operators.first() else {
            return Err(Error::IncompleteMeasurement {
                deviation: f64::INFINITY,
            });
        };
        let d = first.cols();
        let mut sum = ComplexMatrix::zeros(d, d);
        for m in &self.operators {
            if m.cols() != d {
                return Err(Error::DimensionMismatch(
                    "measurement operators act on different spaces".into(),
                ));
            }
            sum = &sum + &(&m.adjoint() * m);
        }
        Ok(sum.max_abs_diff(&ComplexMatrix::identity(d)))
    }
}

/// One branch of a measurement: Born probability and the normalized post-state
/// (`None` when the branch has zero probability).
#[derive(Debug, Clone)]
pub struct Branch {
    pub probability: f64,
    pub state: Option<Ket>,
}

/// `P_E(Φ_λ) = min{2cos²λ, 2sin²λ}`.
pub fn p_e_angle(lambda: f64) -> f64 {
    let c = lambda.cos().powi(2);
    (2.0 * c).min(2.0 * (1.0 - c))
}

/// Optimal single-copy concentration probability of a two-qubit pure state:
/// twice its smallest squared Schmidt coefficient.
pub fn p_e(psi: &Ket) -> Result<f64> {
    if psi.dim() != 4 {
        return Err(Error::NotTwoQubit {
            dim_a: psi.dim(),
            dim_b: 1,
        });
    }
    let s = schmidt(psi, 2, 2)?;
    Ok((2.0 * s.min_coefficient().powi(2)).min(1.0))
}

fn diag2(a: f64, b: f64) -> ComplexMatrix {
    ComplexMatrix::from_real_diag(&[a, b])
}

/// The Procrustean filter for `|Φ_λ>` in the computational basis.
///
/// For `λ > π/4` the roles of `|0>` and `|1>` are swapped.
pub fn procrustean(lambda: f64) -> Result<GeneralMeasurement> {
    if lambda == 0.0 || lambda == FRAC_PI_2 {
        return Err(Error::NoEntanglement);
    }
    if !(lambda > 0.0 && lambda < FRAC_PI_2) {
        return Err(Error::AngleOutOfRange {
            name: "lambda",
            value: lambda,
            range: "(0, pi/2)",
        });
    }
    let ops = if lambda <= FRAC_PI_4 {
        let t = lambda.tan().min(1.0);
        vec![diag2(t, 1.0), diag2((1.0 - t * t).max(0.0).sqrt(), 0.0)]
    } else {
        let t = (1.0 / lambda.tan()).min(1.0);
        vec![diag2(1.0, t), diag2(0.0, (1.0 - t * t).max(0.0).sqrt())]
    };
    GeneralMeasurement::new(ops)
}

/// Procrustean filter for an arbitrary two-qubit pure state, built in the
/// Schmidt basis of the measured `wire` (0 = first party, 1 = second).
/// Outcome 0 is the successful one.
pub fn procrustean_for(psi: &Ket, wire: usize) -> Result<GeneralMeasurement> {
    if psi.dim() != 4 {
        return Err(Error::NotTwoQubit {
            dim_a: psi.dim(),
            dim_b: 1,
        });
    }
    if wire > 1 {
        return Err(Error::InvalidWire { wire, wires: 2 });
    }
    let s = schmidt(psi, 2, 2)?;
    let (big, small) = (s.coefficients[0], s.coefficients[1]);
    if small <= 1e-15 {
        return Err(Error::NoEntanglement);
    }
    let basis = if wire == 0 { &s.left } else { &s.right };
    let ratio = (small / big).min(1.0);
    let p_big = basis[0].projector();
    let p_small = basis[1].projector();
    let m0 = &p_big.scale_real(ratio) + &p_small;
    let m1 = p_big.scale_real((1.0 - ratio * ratio).max(0.0).sqrt());
    GeneralMeasurement::new(vec![m0, m1])
}

/// Born-rule branches of `m` applied to `wire` of a multi-partite ket.
pub fn apply_measurement(
    m: &GeneralMeasurement,
    psi: &Ket,
    dims: &[usize],
    wire: usize,
) -> Result<Vec<Branch>> {
    let deviation = m.completeness_deviation()?;
    if deviation > COMPLETENESS_TOL {
        return Err(Error::IncompleteMeasurement { deviation });
    }
    psi.ensure_normalized(NORMALIZATION_TOL)?;
    m.operators
        .iter()
        .map(|op| {
            let out = apply_local(op, psi, dims, &[wire])?;
            let probability = out.norm_sqr();
            Ok(Branch {
                probability,
                state: (probability > 0.0).then(|| out.normalized()).flatten(),
            })
        })
        .collect()
}

/// Draws an index from a discrete distribution (probabilities need not sum exactly to 1).
pub fn sample_index<R: Rng + ?Sized>(probabilities: &[f64], rng: &mut R) -> usize {
    let total: f64 = probabilities.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    for (i, &p) in probabilities.iter().enumerate() {
        if u < p {
            return i;
        }
        u -= p;
    }
    probabilities.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// Probability of outcome 0 of `procrustean(λ)` on Bob's side of `|Φ_λ>`.
pub fn success_probability(lambda: f64) -> Result<f64> {
    let m = procrustean(lambda)?;
    let psi = Ket::from_real(&[lambda.cos(), 0.0, 0.0, lambda.sin()]);
    Ok(apply_measurement(&m, &psi, &[2, 2], 1)?[0].probability)
}
