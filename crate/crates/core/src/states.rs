//! State constructors for the swapping scenario.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{schmidt, tensor, tensor_kets, ComplexMatrix, Ket, C64};

/// Wire layout of the four-qubit joint state.
///
/// Alice shares the left pair with Clare's first qubit, Clare's second qubit
/// shares the right pair with Bob: `A ⊗ C1 ⊗ C2 ⊗ B`.
pub mod wires {
    pub const ALICE: usize = 0;
    pub const CLARE_LEFT: usize = 1;
    pub const CLARE_RIGHT: usize = 2;
    pub const BOB: usize = 3;
    pub const DIMS: [usize; 4] = [2, 2, 2, 2];
    pub const CLARE: [usize; 2] = [CLARE_LEFT, CLARE_RIGHT];
}

/// Default tolerance for deciding maximal entanglement of protocol outputs.
pub const MAX_ENTANGLED_TOL: f64 = 1e-9;

const UNITARY_TOL: f64 = 1e-10;

/// Admissible range for a Schmidt angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AngleRange {
    /// `(0, π/4]`, the canonical range all protocol formulas assume.
    #[default]
    Strict,
    /// `(0, π/2)`.
    Permissive,
}

impl AngleRange {
    /// Validates `value`; strict mode tolerates 1e-12 of round-off above π/4 and clamps it.
    pub fn check(self, name: &'static str, value: f64) -> Result<f64> {
        match self {
            AngleRange::Strict if value > 0.0 && value <= FRAC_PI_4 + 1e-12 => Ok(value.min(FRAC_PI_4)),
            AngleRange::Permissive if value > 0.0 && value < FRAC_PI_2 => Ok(value),
            AngleRange::Strict => Err(Error::AngleOutOfRange {
                name,
                value,
                range: "(0, pi/4]",
            }),
            AngleRange::Permissive => Err(Error::AngleOutOfRange {
                name,
                value,
                range: "(0, pi/2)",
            }),
        }
    }
}

/// `cos(angle)|00> + sin(angle)|11>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitPure {
    angle: f64,
}

/// A two-qubit pure state brought to canonical form:
/// `(alice ⊗ bob)|ψ> = e^{iφ}|Φ_angle>` with `angle ∈ [0, π/4]`.
#[derive(Debug, Clone)]
pub struct Canonical {
    pub state: TwoQubitPure,
    pub alice: ComplexMatrix,
    pub bob: ComplexMatrix,
}

impl TwoQubitPure {
    pub fn new(angle: f64) -> Result<Self> {
        AngleRange::Permissive.check("angle", angle)?;
        Ok(Self { angle })
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn ket(&self) -> Ket {
        Ket::from_real(&[self.angle.cos(), 0.0, 0.0, self.angle.sin()])
    }

    /// Angle reflected into `(0, π/4]`; `|Φ_λ>` and `|Φ_{π/2−λ}>` differ by `X ⊗ X`.
    pub fn canonical_angle(&self) -> f64 {
        if self.angle > FRAC_PI_4 {
            FRAC_PI_2 - self.angle
        } else {
            self.angle
        }
    }

    /// Local unitaries mapping an arbitrary two-qubit pure state to `|Φ_λ>`, `λ ∈ [0, π/4]`.
    pub fn canonicalize(psi: &Ket) -> Result<Canonical> {
        if psi.dim() != 4 {
            return Err(Error::DimensionMismatch(format!(
                "two-qubit state needs 4 amplitudes, got {}",
                psi.dim()
            )));
        }
        let s = schmidt(psi, 2, 2)?;
        let angle = s.coefficients[1].atan2(s.coefficients[0]);
        // rows <k| of the local maps send u_k, v_k to |k>
        let rows = |vs: &[Ket]| {
            let entries = vs
                .iter()
                .flat_map(|v| v.amplitudes().iter().map(|z| z.conj()).collect::<Vec<_>>())
                .collect();
            ComplexMatrix::from_rows(2, 2, entries)
        };
        Ok(Canonical {
            state: TwoQubitPure { angle },
            alice: rows(&s.left)?,
            bob: rows(&s.right)?,
        })
    }
}

/// Bipartite pure state `Σ_k √a_k |k>|k>` given by its squared Schmidt coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtState {
    coefficients: Vec<f64>,
}

impl SchmidtState {
    /// Validates positivity and normalization (1e-12); the coefficients are
    /// sorted nonincreasing, which is a local relabeling of the basis.
    pub fn new(mut coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidSchmidt("empty coefficient list".into()));
        }
        if let Some(bad) = coefficients.iter().find(|&&a| a <= 0.0 || !a.is_finite()) {
            return Err(Error::InvalidSchmidt(format!(
                "coefficients must be strictly positive, found {bad}"
            )));
        }
        let sum: f64 = coefficients.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidSchmidt(format!("coefficients sum to {sum}, expected 1")));
        }
        coefficients.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { coefficients })
    }

    /// `(cos²λ, sin²λ)`.
    pub fn from_angle(angle: f64) -> Result<Self> {
        AngleRange::Permissive.check("angle", angle)?;
        Self::new(vec![angle.cos().powi(2), angle.sin().powi(2)])
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn dim(&self) -> usize {
        self.coefficients.len()
    }

    pub fn ket(&self) -> Ket {
        let d = self.dim();
        let mut amps = vec![C64::new(0.0, 0.0); d * d];
        for (k, &a) in self.coefficients.iter().enumerate() {
            amps[k * d + k] = C64::new(a.sqrt(), 0.0);
        }
        Ket::from_amplitudes(amps)
    }
}

/// State description accepted in config files: `{"angle": x}` or `{"schmidt": [a1, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Angle { angle: f64 },
    Schmidt { schmidt: Vec<f64> },
}

impl StateSpec {
    /// Canonical Schmidt angle in `(0, π/4]`; Schmidt lists must be two-qubit.
    pub fn to_angle(&self) -> Result<f64> {
        match self {
            StateSpec::Angle { angle } => Ok(TwoQubitPure::new(*angle)?.canonical_angle()),
            StateSpec::Schmidt { schmidt } => {
                let s = SchmidtState::new(schmidt.clone())?;
                if s.dim() != 2 {
                    return Err(Error::NotTwoQubit {
                        dim_a: s.dim(),
                        dim_b: s.dim(),
                    });
                }
                Ok(s.coefficients[1].sqrt().atan2(s.coefficients[0].sqrt()))
            }
        }
    }

    pub fn to_schmidt(&self) -> Result<SchmidtState> {
        match self {
            StateSpec::Angle { angle } => SchmidtState::from_angle(*angle),
            StateSpec::Schmidt { schmidt } => SchmidtState::new(schmidt.clone()),
        }
    }
}

/// The four-qubit starting point: `|Φ_θ>` on Alice–Clare and `|Φ_η>` on Clare–Bob.
#[derive(Debug, Clone)]
pub struct JointScenario {
    pub theta: f64,
    pub eta: f64,
    /// Amplitudes `f_k` of `Σ_k f_k |k>_AB |k>_C`, `k = 2i + j`.
    pub f: [f64; 4],
    /// 16 amplitudes in [`wires`] order.
    pub ket: Ket,
}

pub fn make_joint(theta: f64, eta: f64, range: AngleRange) -> Result<JointScenario> {
    let theta = range.check("theta", theta)?;
    let eta = range.check("eta", eta)?;
    let (ct, st) = (theta.cos(), theta.sin());
    let (ce, se) = (eta.cos(), eta.sin());
    let f = [ct * ce, ct * se, st * ce, st * se];
    let mut amps = vec![C64::new(0.0, 0.0); 16];
    for i in 0..2 {
        for j in 0..2 {
            // |i>_A |i>_C1 |j>_C2 |j>_B
            let idx = (i << 3) | (i << 2) | (j << 1) | j;
            amps[idx] = C64::new(f[2 * i + j], 0.0);
        }
    }
    Ok(JointScenario {
        theta,
        eta,
        f,
        ket: Ket::from_amplitudes(amps),
    })
}

/// `(U ⊗ I) (1/√d) Σ_k |k>|k>`.
pub fn max_entangled(u: &ComplexMatrix, d: usize) -> Result<Ket> {
    if u.rows() != d || u.cols() != d {
        return Err(Error::DimensionMismatch(format!(
            "unitary is {}x{}, expected {d}x{d}",
            u.rows(),
            u.cols()
        )));
    }
    u.ensure_unitary(UNITARY_TOL)?;
    let s = 1.0 / (d as f64).sqrt();
    let mut amps = vec![C64::new(0.0, 0.0); d * d];
    for k in 0..d {
        amps[k * d + k] = C64::new(s, 0.0);
    }
    let omega = Ket::from_amplitudes(amps);
    tensor(u, &ComplexMatrix::identity(d)).apply(&omega)
}

/// True iff every Schmidt coefficient equals `1/√min(dim_a, dim_b)` within `tol`.
pub fn is_max_entangled(psi: &Ket, dim_a: usize, dim_b: usize, tol: f64) -> bool {
    let Some(normalized) = psi.normalized() else {
        return false;
    };
    let Ok(s) = schmidt(&normalized, dim_a, dim_b) else {
        return false;
    };
    let target = 1.0 / (dim_a.min(dim_b) as f64).sqrt();
    s.coefficients.iter().all(|c| (c - target).abs() <= tol)
}

/// `|Φ_θ> ⊗ |Φ_η>` on `A C1 ⊗ C2 B`, the same layout as [`make_joint`].
pub fn pair_product(theta: f64, eta: f64) -> Ket {
    tensor_kets(
        &TwoQubitPure { angle: theta }.ket(),
        &TwoQubitPure { angle: eta }.ket(),
    )
}
