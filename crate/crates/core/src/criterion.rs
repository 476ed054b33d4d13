//! Deciding whether a rank-1 projective measurement of Clare's qubits reaches
//! the optimal concentration rate.
//!
//! With `T₁ = cos²θ|0><0| − sin²θ|1><1|` and `T₂ = cos²η|0><0| + sin²η|1><1|`
//! (for `θ ≤ η`), the rate reached when Bob filters every outcome is
//!
//! ```text
//! p_s = 1 − Σ_k √( tr(T₁⊗T₂ P_k)² + sin²2θ |tr(|0><1|⊗T₂ P_k)|² )
//! ```
//!
//! so the measurement is optimal iff the sum equals `cos 2θ`. [`achieved_rate`]
//! computes `p_s` independently from the post-measurement states.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{contract, eigh, reduced_state, tensor, ComplexMatrix, Ket, C64};
use crate::repeater::{build_optimal_basis, ProjectiveMeasurement};
use crate::states::{make_joint, wires, AngleRange};

/// Default tolerance of the optimality flag.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    /// Criterion sum.
    pub lhs: f64,
    /// `cos 2θ` for the smaller angle.
    pub rhs: f64,
    /// Rate computed from the post-measurement states.
    pub p_s: f64,
    /// `2 sin²θ` for the smaller angle.
    pub optimal_rate: f64,
    pub optimal: bool,
    /// Whether the rate route agrees with the criterion route.
    pub routes_agree: bool,
    pub tolerance: f64,
}

/// `(T₁, T₂)`; requires `θ ≤ η` within `(0, π/4]`.
pub fn t_operators(theta: f64, eta: f64) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let theta = AngleRange::Strict.check("theta", theta)?;
    let eta = AngleRange::Strict.check("eta", eta)?;
    if theta > eta {
        return Err(Error::AngleOrdering { theta, eta });
    }
    let t1 = ComplexMatrix::from_real_diag(&[theta.cos().powi(2), -theta.sin().powi(2)]);
    let t2 = ComplexMatrix::from_real_diag(&[eta.cos().powi(2), eta.sin().powi(2)]);
    Ok((t1, t2))
}

fn swap_qubits() -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(4, 4);
    for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        s[(i, j)] = C64::new(1.0, 0.0);
    }
    s
}

/// Puts the smaller angle on Clare's first qubit, conjugating the measurement
/// by SWAP when the angles have to be exchanged.
fn ordered(
    meas: &ProjectiveMeasurement,
    theta: f64,
    eta: f64,
) -> Result<(ProjectiveMeasurement, f64, f64)> {
    if theta <= eta {
        Ok((meas.clone(), theta, eta))
    } else {
        Ok((meas.conjugated(&swap_qubits())?, eta, theta))
    }
}

fn check_shape(meas: &ProjectiveMeasurement) -> Result<()> {
    if meas.dim() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "Clare's measurement acts on dimension {}, expected 4",
            meas.dim()
        )));
    }
    meas.rank_one_kets().map(|_| ())
}

/// Criterion sum for a complete rank-1 projective measurement.
pub fn criterion_lhs(meas: &ProjectiveMeasurement, theta: f64, eta: f64) -> Result<f64> {
    check_shape(meas)?;
    AngleRange::Strict.check("theta", theta)?;
    AngleRange::Strict.check("eta", eta)?;
    let (meas, theta, eta) = ordered(meas, theta, eta)?;
    let (t1, t2) = t_operators(theta, eta)?;
    let t12 = tensor(&t1, &t2);
    let mut flip = ComplexMatrix::zeros(2, 2);
    flip[(0, 1)] = C64::new(1.0, 0.0);
    let x2 = tensor(&flip, &t2);
    let s2 = (2.0 * theta).sin().powi(2);
    Ok(meas
        .projectors()
        .iter()
        .map(|p| {
            let a = (&t12 * p).trace().re;
            let b = (&x2 * p).trace().norm_sqr();
            (a * a + s2 * b).sqrt()
        })
        .sum())
}

/// `Σ_k p_k · P_E(φ_k)`, with `P_E` twice the smallest eigenvalue of Alice's
/// reduced state after outcome `k`.
pub fn achieved_rate(meas: &ProjectiveMeasurement, theta: f64, eta: f64) -> Result<f64> {
    check_shape(meas)?;
    let joint = make_joint(theta, eta, AngleRange::Strict)?;
    let kets = meas.rank_one_kets()?;
    let mut total = 0.0;
    for k in &kets {
        let ab = contract(&joint.ket, &wires::DIMS, &wires::CLARE, k)?;
        let p = ab.norm_sqr();
        if p <= 0.0 {
            continue;
        }
        let post = ab.normalized().expect("nonzero");
        let rho_a = reduced_state(&post, &[2, 2], &[0])?;
        let lambda_min = eigh(&rho_a)?.values[0].max(0.0);
        total += p * 2.0 * lambda_min;
    }
    Ok(total)
}

pub fn is_optimal(meas: &ProjectiveMeasurement, theta: f64, eta: f64, tol: f64) -> Result<CriterionReport> {
    let lhs = criterion_lhs(meas, theta, eta)?;
    let p_s = achieved_rate(meas, theta, eta)?;
    let small = AngleRange::Strict.check("theta", theta)?.min(AngleRange::Strict.check("eta", eta)?);
    let rhs = (2.0 * small).cos();
    let optimal_rate = 2.0 * small.sin().powi(2);
    let optimal = (lhs - rhs).abs() <= tol;
    let rate_optimal = (p_s - optimal_rate).abs() <= tol;
    Ok(CriterionReport {
        lhs,
        rhs,
        p_s,
        optimal_rate,
        optimal,
        routes_agree: optimal == rate_optimal,
        tolerance: tol,
    })
}

/// Named measurements for quick checks: `bell`, `optimal`, `computational`.
pub fn built_in(name: &str, theta: f64, eta: f64) -> Option<Result<ProjectiveMeasurement>> {
    match name {
        "bell" => Some(Ok(ProjectiveMeasurement::bell())),
        "computational" => Some(Ok(ProjectiveMeasurement::computational())),
        "optimal" => Some(build_optimal_basis(theta, eta, 0.0, 0.0).map(|b| b.measurement())),
        _ => None,
    }
}

/// Rank-1 measurement from four kets, as read from a basis file.
pub fn from_kets(kets: &[Ket]) -> Result<ProjectiveMeasurement> {
    if kets.len() != 4 || kets.iter().any(|k| k.dim() != 4) {
        return Err(Error::DimensionMismatch(format!(
            "expected four kets of dimension 4, got {} kets",
            kets.len()
        )));
    }
    ProjectiveMeasurement::from_basis(kets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_6};

    #[test]
    fn t_operator_examples() {
        let (t1, t2) = t_operators(FRAC_PI_4, FRAC_PI_4).unwrap();
        assert!(t1.max_abs_diff(&ComplexMatrix::from_real_diag(&[0.5, -0.5])) < 1e-15);
        assert!(t2.max_abs_diff(&ComplexMatrix::from_real_diag(&[0.5, 0.5])) < 1e-15);
        let (t1, t2) = t_operators(FRAC_PI_6, FRAC_PI_4).unwrap();
        assert!(t1.max_abs_diff(&ComplexMatrix::from_real_diag(&[0.75, -0.25])) < 1e-15);
        assert!(t2.max_abs_diff(&ComplexMatrix::from_real_diag(&[0.5, 0.5])) < 1e-15);
        for (t, e) in [(0.1, 0.2), (0.3, 0.7)] {
            let (t1, t2) = t_operators(t, e).unwrap();
            assert!((tensor(&t1, &t2).trace().re - (2.0 * t).cos()).abs() < 1e-15);
            assert!((t2.trace().re - 1.0).abs() < 1e-15);
        }
        assert!(matches!(t_operators(0.5, 0.2), Err(Error::AngleOrdering { .. })));
    }

    #[test]
    fn canonical_measurements_at_pi6_pi4() {
        let (t, e) = (FRAC_PI_6, FRAC_PI_4);
        let opt = built_in("optimal", t, e).unwrap().unwrap();
        assert!((criterion_lhs(&opt, t, e).unwrap() - 0.5).abs() < 1e-12);
        assert!((achieved_rate(&opt, t, e).unwrap() - 0.5).abs() < 1e-12);
        let bell = ProjectiveMeasurement::bell();
        assert!((criterion_lhs(&bell, t, e).unwrap() - 0.5).abs() < 1e-12);
        let comp = ProjectiveMeasurement::computational();
        assert!((criterion_lhs(&comp, t, e).unwrap() - 1.0).abs() < 1e-12);
        assert!(achieved_rate(&comp, t, e).unwrap().abs() < 1e-15);
    }

    #[test]
    fn optimality_flags() {
        let (t, e) = (0.3, 0.55);
        for name in ["bell", "optimal"] {
            let m = built_in(name, t, e).unwrap().unwrap();
            let r = is_optimal(&m, t, e, DEFAULT_TOL).unwrap();
            assert!(r.optimal && r.routes_agree, "{name}: {r:?}");
        }
        let r = is_optimal(&ProjectiveMeasurement::computational(), t, e, DEFAULT_TOL).unwrap();
        assert!(!r.optimal && r.routes_agree);
        assert!(built_in("nope", t, e).is_none());
    }

    #[test]
    fn reversed_angles_are_relabeled() {
        let m = built_in("optimal", 0.6, 0.2).unwrap().unwrap();
        let r = is_optimal(&m, 0.6, 0.2, DEFAULT_TOL).unwrap();
        assert!(r.optimal, "{r:?}");
        assert!((r.rhs - 0.4f64.cos()).abs() < 1e-15);
        assert!((r.p_s - (1.0 - r.lhs)).abs() < 1e-10);
    }

    #[test]
    fn rate_identity_on_random_bases() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let u = random::unitary(4, &mut rng);
            let kets: Vec<Ket> = (0..4).map(|j| u.column(j)).collect();
            let m = from_kets(&kets).unwrap();
            let (t, e) = (0.2, 0.6);
            let lhs = criterion_lhs(&m, t, e).unwrap();
            let p_s = achieved_rate(&m, t, e).unwrap();
            assert!((p_s - (1.0 - lhs)).abs() < 1e-10);
            assert!(lhs >= (2.0 * t).cos() - 1e-10);
            assert!(p_s <= 2.0 * t.sin().powi(2) + 1e-10);
        }
    }

    #[test]
    fn rejects_higher_rank() {
        let m = ProjectiveMeasurement::new(vec![
            &Ket::basis(4, 0).projector() + &Ket::basis(4, 1).projector(),
            Ket::basis(4, 2).projector(),
            Ket::basis(4, 3).projector(),
        ])
        .unwrap();
        assert!(matches!(
            criterion_lhs(&m, 0.3, 0.5),
            Err(Error::ProjectorRank { index: 0, rank: 2 })
        ));
        assert!(from_kets(&[Ket::basis(4, 0)]).is_err());
    }
}
