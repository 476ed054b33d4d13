//! Upper bounds on a single successful outcome for general pure inputs.
//!
//! Alice–Clare share `Σ_k √a_k |k>|k>` and Clare–Bob share `Σ_t √b_t |t>|t>`.
//! A measurement element of Clare that leaves Alice and Bob in
//! `|Ω_U> = (U ⊗ I)|Ω>` succeeds with probability at most
//! `p_max = d / Σ_{k ≤ d_A} 1/(a_k b_{d_A+1−k})`, with `d = d_B ≥ d_A`.
//!
//! Index convention: the joint Alice–Bob space (and Clare's mirror of it) is
//! indexed `k·d + t`, Alice's digit first. Alice's coefficients are padded with
//! zeros up to `d`, and inverses are taken on the support only.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{eigh, op_norm_inf, pinv_sqrt, support_projector, ComplexMatrix, Ket, C64, DEFAULT_CUTOFF};
use crate::states::SchmidtState;

/// Slack for PSD, trace and operator-inequality checks.
const CHECK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub p_max: f64,
    pub optimal_u: ComplexMatrix,
    pub m_i: ComplexMatrix,
    pub achieved_p: f64,
    pub post_fidelity: f64,
}

fn ensure_state(rho: &ComplexMatrix) -> Result<()> {
    rho.ensure_hermitian()?;
    let tr = rho.trace().re;
    if (tr - 1.0).abs() > CHECK_TOL {
        return Err(Error::NotNormalized { norm_sqr: tr });
    }
    let min = eigh(rho)?.values[0];
    if min < -CHECK_TOL {
        return Err(Error::NegativeEigenvalue { eigenvalue: min });
    }
    Ok(())
}

/// `1 / ‖ρ^{-1/2} ρ_i ρ^{-1/2}‖_∞`: the largest weight with which `ρ_i` can
/// appear in an ensemble decomposition of `ρ`.
///
/// Fails with [`Error::SupportViolation`] when `ρ_i` has weight outside the
/// support of `ρ`, since no such decomposition exists then.
pub fn steering_bound(rho: &ComplexMatrix, rho_i: &ComplexMatrix) -> Result<f64> {
    if rho.rows() != rho_i.rows() || !rho.is_square() || !rho_i.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "steering bound needs equal square matrices, got {}x{} and {}x{}",
            rho.rows(),
            rho.cols(),
            rho_i.rows(),
            rho_i.cols()
        )));
    }
    ensure_state(rho)?;
    ensure_state(rho_i)?;
    let support = support_projector(rho, DEFAULT_CUTOFF)?;
    let leakage = 1.0 - (&support * rho_i).trace().re;
    if leakage > CHECK_TOL {
        return Err(Error::SupportViolation { leakage });
    }
    let r = pinv_sqrt(rho, DEFAULT_CUTOFF)?;
    let x = (&(&r * rho_i) * &r).hermitian_part();
    Ok(1.0 / op_norm_inf(&x)?)
}

fn hermitian_pair(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    a.ensure_hermitian()?;
    b.ensure_hermitian()?;
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "operands have dimensions {} and {}",
            a.rows(),
            b.rows()
        )));
    }
    Ok(())
}

/// `λ↑(A)ᵀ λ↓(B)`, a lower bound on `tr(AB)` for Hermitian `A`, `B`.
pub fn trace_rearrangement_lb(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    hermitian_pair(a, b)?;
    let up = eigh(a)?.ascending();
    let down = eigh(b)?.descending();
    Ok(up.iter().zip(&down).map(|(x, y)| x * y).sum())
}

/// `V diag(λ↓(B)) V†` with `V` the ascending eigenbasis of `A`: the operator
/// with the spectrum of `B` that makes the rearrangement bound tight.
pub fn rearrangement_equality_partner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    hermitian_pair(a, b)?;
    let ea = eigh(a)?;
    let down = eigh(b)?.descending();
    let v = &ea.vectors;
    let d = ComplexMatrix::from_real_diag(&down);
    Ok((&(v * &d) * &v.adjoint()).hermitian_part())
}

/// Orders the pair so that the first state has the smaller dimension.
fn ordered<'a>(a: &'a SchmidtState, b: &'a SchmidtState) -> (&'a [f64], &'a [f64]) {
    if a.dim() <= b.dim() {
        (a.coefficients(), b.coefficients())
    } else {
        (b.coefficients(), a.coefficients())
    }
}

/// Closed-form bound on the probability of one successful outcome.
pub fn p_max(a: &SchmidtState, b: &SchmidtState) -> f64 {
    let (a, b) = ordered(a, b);
    let da = a.len();
    let sum: f64 = (0..da).map(|k| 1.0 / (a[k] * b[da - 1 - k])).sum();
    b.len() as f64 / sum
}

/// Permutation reversing `|0>, …, |d_A − 1>` and fixing the remaining states.
///
/// # Panics
/// If `d_a > d` or `d_a == 0`.
pub fn optimal_u(d_a: usize, d: usize) -> ComplexMatrix {
    assert!(d_a >= 1 && d_a <= d, "need 1 <= d_a <= d, got d_a = {d_a}, d = {d}");
    let mut u = ComplexMatrix::zeros(d, d);
    for k in 0..d {
        let image = if k < d_a { d_a - 1 - k } else { k };
        u[(image, k)] = C64::new(1.0, 0.0);
    }
    u
}

/// `|Ω_U> = (U ⊗ I)|Ω>`, amplitude `U_{kt}/√d` at index `k·d + t`.
pub fn omega_u(u: &ComplexMatrix) -> Ket {
    let d = u.rows();
    let s = 1.0 / (d as f64).sqrt();
    Ket::from_amplitudes(u.entries().iter().map(|z| z * s).collect())
}

/// `ρ_A ⊗ ρ_B` with `ρ_A` padded by zero eigenvalues up to dimension `d`.
pub fn initial_product(a: &SchmidtState, b: &SchmidtState) -> ComplexMatrix {
    let (a, b) = ordered(a, b);
    let d = b.len();
    let diag: Vec<f64> = (0..d * d)
        .map(|i| a.get(i / d).copied().unwrap_or(0.0) * b[i % d])
        .collect();
    ComplexMatrix::from_real_diag(&diag)
}

/// `tr(V ρ_B^{-1} V† ρ_A^{-1})`, inverses on the support.
pub fn pairing_trace(a: &SchmidtState, b: &SchmidtState, v: &ComplexMatrix) -> Result<f64> {
    let (a, b) = ordered(a, b);
    let d = b.len();
    if v.rows() != d || !v.is_square() {
        return Err(Error::DimensionMismatch(format!("unitary must be {d}x{d}")));
    }
    let inv_a: Vec<f64> = (0..d).map(|k| a.get(k).map_or(0.0, |x| 1.0 / x)).collect();
    let inv_b: Vec<f64> = b.iter().map(|x| 1.0 / x).collect();
    let m = &(&(v * &ComplexMatrix::from_real_diag(&inv_b)) * &v.adjoint())
        * &ComplexMatrix::from_real_diag(&inv_a);
    Ok(m.trace().re)
}

/// Builds `M = √p_max |Ω_U><Ω_U| ρ_AB^{-1/2}` with the reversal `U`, checks
/// `M†M ≤ I`, and applies `M` to Clare's half of the joint state.
///
/// Clare's subsystem mirrors Alice–Bob, so the joint amplitude is the
/// diagonal matrix `Ψ = diag(√(a_k b_t))` between the Alice–Bob and Clare
/// indices, and measuring Clare maps it to `Ψ Mᵀ`.
///
/// When `d_A < d_B` the Alice–Bob post-state only has Schmidt rank `d_A`,
/// so it cannot equal the `d`-dimensional `|Ω_U>`: the reported
/// `achieved_p` is `p_max·d_A/d` and `post_fidelity` is `d_A/d`.
pub fn achieving_operator(a: &SchmidtState, b: &SchmidtState) -> Result<BoundResult> {
    let (ca, cb) = ordered(a, b);
    let (d_a, d) = (ca.len(), cb.len());
    let p = p_max(a, b);
    let u = optimal_u(d_a, d);
    let omega = omega_u(&u);
    let rho = initial_product(a, b);
    let r = pinv_sqrt(&rho, DEFAULT_CUTOFF)?;
    let m_i = (&omega.projector() * &r).scale_real(p.sqrt());

    let mm = (&m_i.adjoint() * &m_i).hermitian_part();
    let excess = eigh(&mm)?.values.last().copied().unwrap_or(0.0) - 1.0;
    if excess > CHECK_TOL {
        return Err(Error::OperatorInequality { excess });
    }

    let psi = ComplexMatrix::from_real_diag(
        &(0..d * d).map(|i| rho[(i, i)].re.max(0.0).sqrt()).collect::<Vec<_>>(),
    );
    let out = &psi * &m_i.transpose();
    let achieved_p = out.frobenius_norm().powi(2);
    let post_fidelity = if achieved_p > 0.0 {
        let post = (&out * &out.adjoint()).scale_real(1.0 / achieved_p);
        let v = post.apply(&omega)?;
        omega.inner(&v).re.clamp(0.0, 1.0)
    } else {
        0.0
    };
    Ok(BoundResult {
        p_max: p,
        optimal_u: u,
        m_i,
        achieved_p,
        post_fidelity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repeater::projection_bounds;

    fn s(v: &[f64]) -> SchmidtState {
        SchmidtState::new(v.to_vec()).unwrap()
    }

    #[test]
    fn steering_examples() {
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!((steering_bound(&half, &half).unwrap() - 1.0).abs() < 1e-12);
        let zero = Ket::basis(2, 0).projector();
        assert!((steering_bound(&half, &zero).unwrap() - 0.5).abs() < 1e-12);
        assert!(matches!(
            steering_bound(&zero, &Ket::basis(2, 1).projector()),
            Err(Error::SupportViolation { .. })
        ));
        assert!(matches!(
            steering_bound(&half, &ComplexMatrix::identity(2)),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn rearrangement_examples() {
        let i3 = ComplexMatrix::identity(3);
        assert!((trace_rearrangement_lb(&i3, &i3).unwrap() - 3.0).abs() < 1e-14);
        let a = ComplexMatrix::from_real_diag(&[1.0, 2.0]);
        let b = ComplexMatrix::from_real_diag(&[3.0, 4.0]);
        assert!((trace_rearrangement_lb(&a, &b).unwrap() - 10.0).abs() < 1e-13);
        assert!(((&a * &b).trace().re - 11.0).abs() < 1e-14);
        let partner = rearrangement_equality_partner(&a, &b).unwrap();
        assert!(((&a * &partner).trace().re - 10.0).abs() < 1e-13);
        assert!(trace_rearrangement_lb(&a, &i3).is_err());
    }

    #[test]
    fn p_max_examples() {
        assert!((p_max(&s(&[0.5, 0.5]), &s(&[0.5, 0.5])) - 0.25).abs() < 1e-15);
        assert!((p_max(&s(&[0.75, 0.25]), &s(&[0.75, 0.25])) - 0.1875).abs() < 1e-15);
        let (t, e) = (0.4, 0.7);
        let pm = p_max(&SchmidtState::from_angle(t).unwrap(), &SchmidtState::from_angle(e).unwrap());
        assert!((pm - projection_bounds(t, e).unwrap().1).abs() < 1e-12);
        let big = s(&[0.5, 0.3, 0.2]);
        let small = s(&[0.6, 0.4]);
        assert_eq!(p_max(&big, &small), p_max(&small, &big));
    }

    #[test]
    fn reversal_unitaries() {
        let x = optimal_u(2, 2);
        assert_eq!(x[(0, 1)], C64::new(1.0, 0.0));
        assert_eq!(x[(1, 0)], C64::new(1.0, 0.0));
        let u = optimal_u(2, 3);
        assert_eq!(u[(1, 0)].re, 1.0);
        assert_eq!(u[(0, 1)].re, 1.0);
        assert_eq!(u[(2, 2)].re, 1.0);
        assert_eq!(optimal_u(1, 4), ComplexMatrix::identity(4));
        assert!(optimal_u(3, 5).unitary_deviation() == 0.0);
    }

    #[test]
    fn achieving_operator_examples() {
        let r = achieving_operator(&s(&[0.5, 0.5]), &s(&[0.5, 0.5])).unwrap();
        assert!((r.achieved_p - 0.25).abs() < 1e-12);
        assert!((r.post_fidelity - 1.0).abs() < 1e-12);
        let r = achieving_operator(&s(&[0.75, 0.25]), &s(&[0.75, 0.25])).unwrap();
        assert!((r.achieved_p - 0.1875).abs() < 1e-12);
        let r = achieving_operator(&s(&[0.5, 0.3, 0.2]), &s(&[0.4, 0.35, 0.25])).unwrap();
        assert!((r.achieved_p - r.p_max).abs() < 1e-10);
        assert!((r.post_fidelity - 1.0).abs() < 1e-10);
    }

    #[test]
    fn unequal_dimensions_fall_short() {
        let a = s(&[0.6, 0.4]);
        let b = s(&[0.5, 0.3, 0.2]);
        let r = achieving_operator(&a, &b).unwrap();
        assert!((r.achieved_p - r.p_max * 2.0 / 3.0).abs() < 1e-12);
        assert!((r.post_fidelity - 2.0 / 3.0).abs() < 1e-12);
        assert!(r.achieved_p <= r.p_max + 1e-10);
        // the d-dimensional target is not inside the support of ρ_A ⊗ ρ_B
        let target = omega_u(&r.optimal_u).projector();
        assert!(matches!(
            steering_bound(&initial_product(&a, &b), &target),
            Err(Error::SupportViolation { .. })
        ));
    }

    #[test]
    fn steering_bound_equals_p_max_at_reversal() {
        let (t, e) = (0.35, 0.6);
        let a = SchmidtState::from_angle(t).unwrap();
        let b = SchmidtState::from_angle(e).unwrap();
        let rho = initial_product(&a, &b);
        let sb = steering_bound(&rho, &omega_u(&optimal_u(2, 2)).projector()).unwrap();
        assert!((sb - projection_bounds(t, e).unwrap().1).abs() < 1e-10);
        let other = steering_bound(&rho, &omega_u(&ComplexMatrix::identity(2)).projector()).unwrap();
        assert!(other <= sb + 1e-12);
        let sum = pairing_trace(&a, &b, &optimal_u(2, 2)).unwrap();
        assert!((2.0 / sum - sb).abs() < 1e-10);
    }
}
