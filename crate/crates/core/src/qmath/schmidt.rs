use super::{eigh, random::gram_schmidt, ComplexMatrix, Ket, C64};
use crate::error::{Error, Result};

const NORMALIZATION_TOL: f64 = 1e-12;

/// Schmidt decomposition `|ψ> = Σ_k c_k |u_k>|v_k>` with `c_1 ≥ c_2 ≥ … ≥ 0`.
#[derive(Debug, Clone)]
pub struct Schmidt {
    pub coefficients: Vec<f64>,
    pub left: Vec<Ket>,
    pub right: Vec<Ket>,
}

impl Schmidt {
    /// Smallest Schmidt coefficient.
    pub fn min_coefficient(&self) -> f64 {
        self.coefficients.last().copied().unwrap_or(0.0)
    }

    pub fn reconstruct(&self) -> Ket {
        let dim = self.left[0].dim() * self.right[0].dim();
        let mut out = Ket::zeros(dim);
        for (k, &c) in self.coefficients.iter().enumerate() {
            let term = super::tensor_kets(&self.left[k], &self.right[k]).scale(C64::new(c, 0.0));
            out = &out + &term;
        }
        out
    }
}

/// Schmidt decomposition of a normalized bipartite ket with `dim_a * dim_b` amplitudes.
///
/// Returns `min(dim_a, dim_b)` coefficients and orthonormal local vectors on both sides.
pub fn schmidt(psi: &Ket, dim_a: usize, dim_b: usize) -> Result<Schmidt> {
    if dim_a * dim_b != psi.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{dim_a}x{dim_b} split of a ket with dimension {}",
            psi.dim()
        )));
    }
    psi.ensure_normalized(NORMALIZATION_TOL)?;

    // ψ_{ij} as a dim_a x dim_b coefficient matrix C; ρ_A = C C†.
    let c = ComplexMatrix::from_rows(dim_a, dim_b, psi.amplitudes().to_vec())?;
    let rho_a = (&c * &c.adjoint()).hermitian_part();
    let es = eigh(&rho_a)?;
    let r = dim_a.min(dim_b);

    let mut coefficients = Vec::with_capacity(r);
    let mut left = Vec::with_capacity(r);
    let mut right_raw = Vec::with_capacity(r);
    let ct = c.transpose();
    for k in (0..dim_a).rev().take(r) {
        let lam = es.values[k].max(0.0);
        let u = es.vector(k);
        // <u_k|_A ψ = c_k |v_k>, i.e. v_k = C^T conj(u_k) / c_k
        let uc = Ket::from_amplitudes(u.amplitudes().iter().map(|z| z.conj()).collect());
        let w = ct.apply(&uc)?;
        coefficients.push(lam.sqrt());
        left.push(u);
        right_raw.push(w);
    }

    // Normalize the right vectors that carry weight; complete the rest orthonormally.
    let mut right: Vec<Ket> = Vec::with_capacity(r);
    for (k, w) in right_raw.iter().enumerate() {
        let v = if coefficients[k] > 1e-7 {
            w.scale(C64::new(1.0 / coefficients[k], 0.0))
        } else {
            let mut candidates = right.clone();
            candidates.extend((0..dim_b).map(|i| Ket::basis(dim_b, i)));
            gram_schmidt(&candidates)[right.len()].clone()
        };
        right.push(v);
    }
    // re-orthonormalize to clean up round-off in the weighted vectors
    let cleaned = gram_schmidt(&right);
    if cleaned.len() == right.len() {
        right = cleaned;
    }

    Ok(Schmidt {
        coefficients,
        left,
        right,
    })
}
