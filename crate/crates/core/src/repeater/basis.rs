use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{contract, eigh, ComplexMatrix, Ket, C64};
use crate::states::{make_joint, wires, AngleRange, JointScenario};

const PROJECTOR_TOL: f64 = 1e-10;

/// Complete set of orthogonal projectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveMeasurement {
    projectors: Vec<ComplexMatrix>,
}

impl ProjectiveMeasurement {
    /// Validates Hermiticity, idempotence, mutual orthogonality and completeness (1e-10).
    pub fn new(projectors: Vec<ComplexMatrix>) -> Result<Self> {
        let Some(first) = projectors.first() else {
            return Err(Error::NotProjective("no projectors".into()));
        };
        let d = first.rows();
        let mut sum = ComplexMatrix::zeros(d, d);
        for (k, p) in projectors.iter().enumerate() {
            if p.rows() != d || p.cols() != d {
                return Err(Error::NotProjective(format!("projector {k} is not {d}x{d}")));
            }
            let herm = p.hermitian_deviation();
            if herm > PROJECTOR_TOL {
                return Err(Error::NotProjective(format!(
                    "projector {k} is not Hermitian (deviation {herm:e})"
                )));
            }
            let idem = (p * p).max_abs_diff(p);
            if idem > PROJECTOR_TOL {
                return Err(Error::NotProjective(format!(
                    "projector {k} is not idempotent (deviation {idem:e})"
                )));
            }
            for (l, q) in projectors.iter().enumerate().skip(k + 1) {
                let overlap = (p * q).max_abs();
                if overlap > PROJECTOR_TOL {
                    return Err(Error::NotProjective(format!(
                        "projectors {k} and {l} are not orthogonal (overlap {overlap:e})"
                    )));
                }
            }
            sum = &sum + p;
        }
        let deviation = sum.max_abs_diff(&ComplexMatrix::identity(d));
        if deviation > PROJECTOR_TOL {
            return Err(Error::NotProjective(format!(
                "projectors do not sum to the identity (deviation {deviation:e})"
            )));
        }
        Ok(Self { projectors })
    }

    /// Rank-1 projectors onto the given kets, which must form an orthonormal basis.
    pub fn from_basis(kets: &[Ket]) -> Result<Self> {
        Self::new(kets.iter().map(Ket::projector).collect())
    }

    /// Bell basis `Φ⁺, Φ⁻, Ψ⁺, Ψ⁻`.
    pub fn bell() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let kets = [
            [s, 0.0, 0.0, s],
            [s, 0.0, 0.0, -s],
            [0.0, s, s, 0.0],
            [0.0, s, -s, 0.0],
        ]
        .map(|a| Ket::from_real(&a));
        Self::from_basis(&kets).expect("Bell basis is orthonormal")
    }

    /// `|00>, |01>, |10>, |11>`.
    pub fn computational() -> Self {
        let kets: Vec<Ket> = (0..4).map(|i| Ket::basis(4, i)).collect();
        Self::from_basis(&kets).expect("computational basis is orthonormal")
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].rows()
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.projectors
            .iter()
            .map(|p| p.trace().re.round() as usize)
            .collect()
    }

    /// The kets `|φ_k>` with `P_k = |φ_k><φ_k|`; fails on any projector of rank ≠ 1.
    pub fn rank_one_kets(&self) -> Result<Vec<Ket>> {
        self.projectors
            .iter()
            .enumerate()
            .map(|(index, p)| {
                let rank = p.trace().re.round() as usize;
                if rank != 1 {
                    return Err(Error::ProjectorRank { index, rank });
                }
                let es = eigh(p)?;
                Ok(es.vector(es.values.len() - 1))
            })
            .collect()
    }

    /// `{U P_k U†}`.
    pub fn conjugated(&self, u: &ComplexMatrix) -> Result<Self> {
        let ud = u.adjoint();
        Self::new(self.projectors.iter().map(|p| &(u * p) * &ud).collect())
    }
}

/// Bounds `(lower, upper)` on the probability of any single projection of
/// Clare's qubits that leaves Alice and Bob maximally entangled.
pub fn projection_bounds(theta: f64, eta: f64) -> Result<(f64, f64)> {
    let theta = AngleRange::Strict.check("theta", theta)?;
    let eta = AngleRange::Strict.check("eta", eta)?;
    let num = (2.0 * theta).sin().powi(2) * (2.0 * eta).sin().powi(2);
    let cc = (2.0 * theta).cos() * (2.0 * eta).cos();
    Ok((num / (4.0 * (1.0 + cc)), num / (4.0 * (1.0 - cc))))
}

/// Clare's four projection kets and the free phases used to build them.
#[derive(Debug, Clone)]
pub struct OptimalBasis {
    pub kets: [Ket; 4],
    pub beta1: f64,
    pub beta2: f64,
    pub joint: JointScenario,
}

impl OptimalBasis {
    pub fn measurement(&self) -> ProjectiveMeasurement {
        ProjectiveMeasurement::from_basis(&self.kets).expect("constructed basis is orthonormal")
    }

    /// Born probability and normalized Alice–Bob state for each projection.
    pub fn branches(&self) -> Vec<(f64, Ket)> {
        clare_branches(&self.joint, &self.kets).expect("dimensions fixed by construction")
    }

    pub fn gram(&self) -> ComplexMatrix {
        let mut g = ComplexMatrix::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                g[(i, j)] = self.kets[i].inner(&self.kets[j]);
            }
        }
        g
    }
}

/// Projects Clare's qubits of the joint state onto each ket; returns the
/// probability and the normalized Alice–Bob state (zero ket for null branches).
pub(crate) fn clare_branches(joint: &JointScenario, kets: &[Ket]) -> Result<Vec<(f64, Ket)>> {
    kets.iter()
        .map(|k| {
            let ab = contract(&joint.ket, &wires::DIMS, &wires::CLARE, k)?;
            let p = ab.norm_sqr();
            Ok((p, ab.normalized().unwrap_or(ab)))
        })
        .collect()
}

/// Builds `|φ₁>…|φ₄>`:
///
/// ```text
/// |φ₁> ∝ f₂|01> + e^{iβ₁} f₁|10>      |φ₃> ∝ f₁|01> − e^{iβ₁} f₂|10>
/// |φ₂> ∝ f₃|00> + e^{iβ₂} f₀|11>      |φ₄> ∝ f₀|00> − e^{iβ₂} f₃|11>
/// ```
pub fn build_optimal_basis(theta: f64, eta: f64, beta1: f64, beta2: f64) -> Result<OptimalBasis> {
    let joint = make_joint(theta, eta, AngleRange::Strict)?;
    let [f0, f1, f2, f3] = joint.f;
    let e1 = C64::from_polar(1.0, beta1);
    let e2 = C64::from_polar(1.0, beta2);
    let n12 = (f1 * f1 + f2 * f2).sqrt();
    let n03 = (f0 * f0 + f3 * f3).sqrt();
    let z = C64::new(0.0, 0.0);
    let r = |x: f64| C64::new(x, 0.0);
    let kets = [
        Ket::from_amplitudes(vec![z, r(f2 / n12), e1 * (f1 / n12), z]),
        Ket::from_amplitudes(vec![r(f3 / n03), z, z, e2 * (f0 / n03)]),
        Ket::from_amplitudes(vec![z, r(f1 / n12), -e1 * (f2 / n12), z]),
        Ket::from_amplitudes(vec![r(f0 / n03), z, z, -e2 * (f3 / n03)]),
    ];
    Ok(OptimalBasis {
        kets,
        beta1,
        beta2,
        joint,
    })
}

/// Smallest reduced-state eigenvalue gap `λ_max − λ_min` of Alice–Bob over
/// projections onto kets in the span of `|φ₃>, |φ₄>`, scanned on a
/// `resolution × resolution` grid of the Bloch sphere of that span.
///
/// A strictly positive value means no ket orthogonal to `|φ₁>, |φ₂>` is a
/// successful projection.
pub fn third_success_gap(theta: f64, eta: f64, resolution: usize) -> Result<f64> {
    let basis = build_optimal_basis(theta, eta, 0.0, 0.0)?;
    let n = resolution.max(2);
    let mut best = f64::INFINITY;
    for i in 0..=n {
        let a = std::f64::consts::FRAC_PI_2 * i as f64 / n as f64;
        for j in 0..n {
            let b = std::f64::consts::TAU * j as f64 / n as f64;
            let k = &basis.kets[2].scale(C64::new(a.cos(), 0.0))
                + &basis.kets[3].scale(C64::from_polar(a.sin(), b));
            let (p, ab) = clare_branches(&basis.joint, std::slice::from_ref(&k))?.remove(0);
            if p <= 0.0 {
                continue;
            }
            let rho = crate::qmath::reduced_state(&ab, &[2, 2], &[0])?;
            let es = eigh(&rho)?;
            best = best.min(es.values[1] - es.values[0]);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{is_max_entangled, MAX_ENTANGLED_TOL};
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_6};

    #[test]
    fn bounds_examples() {
        let (lo, hi) = projection_bounds(FRAC_PI_4, FRAC_PI_4).unwrap();
        assert!((lo - 0.25).abs() < 1e-15 && (hi - 0.25).abs() < 1e-15);
        // sin²(π/3)² = 9/16, cos(π/3)² = 1/4
        let (lo, hi) = projection_bounds(FRAC_PI_6, FRAC_PI_6).unwrap();
        assert!((lo - 9.0 / 80.0).abs() < 1e-15, "{lo}");
        assert!((hi - 3.0 / 16.0).abs() < 1e-15, "{hi}");
        assert!(matches!(
            projection_bounds(1.0, 0.3),
            Err(Error::AngleOutOfRange { .. })
        ));
    }

    #[test]
    fn symmetric_basis() {
        let b = build_optimal_basis(FRAC_PI_4, FRAC_PI_4, 0.0, 0.0).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(b.kets[0].max_abs_diff(&Ket::from_real(&[0.0, s, s, 0.0])) < 1e-15);
        assert!(b.kets[1].max_abs_diff(&Ket::from_real(&[s, 0.0, 0.0, s])) < 1e-15);
        let br = b.branches();
        assert!((br[0].0 - 0.25).abs() < 1e-15);
        assert!((br[1].0 - 0.25).abs() < 1e-15);
    }

    #[test]
    fn pi6_pi4_first_projection() {
        let b = build_optimal_basis(FRAC_PI_6, FRAC_PI_4, 0.0, 0.0).unwrap();
        assert!((b.branches()[0].0 - 3.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn gram_is_identity_and_successes_are_maximal() {
        for (t, e, b1, b2) in [(0.3, 0.5, 0.0, 0.0), (0.7, 0.1, 1.3, -2.0), (0.05, 0.78, 3.0, 0.4)] {
            let b = build_optimal_basis(t, e, b1, b2).unwrap();
            // direct inner-product oracle
            for i in 0..4 {
                for j in 0..4 {
                    let want = if i == j { 1.0 } else { 0.0 };
                    let ip = b.kets[i].inner(&b.kets[j]);
                    assert!((ip.re - want).abs() < 1e-12 && ip.im.abs() < 1e-12);
                }
            }
            let br = b.branches();
            assert!(is_max_entangled(&br[0].1, 2, 2, MAX_ENTANGLED_TOL));
            assert!(is_max_entangled(&br[1].1, 2, 2, MAX_ENTANGLED_TOL));
            let total: f64 = br.iter().map(|x| x.0).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn non_successful_post_states_match_closed_form() {
        let (t, e, b1, b2) = (0.3, 0.6, 0.7, 2.1);
        let b = build_optimal_basis(t, e, b1, b2).unwrap();
        let [f0, f1, f2, f3] = b.joint.f;
        let n3 = (f1.powi(4) + f2.powi(4)).sqrt();
        let n4 = (f0.powi(4) + f3.powi(4)).sqrt();
        let z = C64::new(0.0, 0.0);
        let want3 = Ket::from_amplitudes(vec![
            z,
            C64::new(f1 * f1 / n3, 0.0),
            -C64::from_polar(f2 * f2 / n3, -b1),
            z,
        ]);
        let want4 = Ket::from_amplitudes(vec![
            C64::new(f0 * f0 / n4, 0.0),
            z,
            z,
            -C64::from_polar(f3 * f3 / n4, -b2),
        ]);
        let br = b.branches();
        assert!((br[2].1.overlap(&want3) - 1.0).abs() < 1e-12);
        assert!((br[3].1.overlap(&want4) - 1.0).abs() < 1e-12);
        assert!(((f1.powi(4) + f2.powi(4)) / (f1 * f1 + f2 * f2) - br[2].0).abs() < 1e-14);
        assert!(((f0.powi(4) + f3.powi(4)) / (f0 * f0 + f3 * f3) - br[3].0).abs() < 1e-14);
    }

    #[test]
    fn projective_validation() {
        assert!(ProjectiveMeasurement::bell().rank_one_kets().is_ok());
        let half = ProjectiveMeasurement::new(vec![
            &Ket::basis(4, 0).projector() + &Ket::basis(4, 1).projector(),
            &Ket::basis(4, 2).projector() + &Ket::basis(4, 3).projector(),
        ])
        .unwrap();
        assert!(matches!(
            half.rank_one_kets(),
            Err(Error::ProjectorRank { index: 0, rank: 2 })
        ));
        let overlap = vec![
            Ket::basis(4, 0).projector(),
            Ket::basis(4, 0).projector(),
            Ket::basis(4, 2).projector(),
            Ket::basis(4, 3).projector(),
        ];
        assert!(matches!(ProjectiveMeasurement::new(overlap), Err(Error::NotProjective(_))));
        let scaled = vec![Ket::basis(2, 0).projector().scale_real(2.0), Ket::basis(2, 1).projector()];
        assert!(matches!(ProjectiveMeasurement::new(scaled), Err(Error::NotProjective(_))));
    }

    #[test]
    fn no_third_successful_projection() {
        for (t, e) in [(0.3, 0.5), (0.2, 0.7), (0.6, 0.1), (0.3, FRAC_PI_4)] {
            let gap = third_success_gap(t, e, 120).unwrap();
            assert!(gap > 1e-3, "theta={t} eta={e}: gap {gap}");
        }
        // equal angles: |φ₃> itself succeeds
        assert!(third_success_gap(0.4, 0.4, 60).unwrap() < 1e-12);
    }
}
