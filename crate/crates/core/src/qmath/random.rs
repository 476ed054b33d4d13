//! Random test objects: kets, unitaries, Hermitian and density matrices.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{ComplexMatrix, Ket, C64};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Uniformly random normalized ket.
pub fn ket<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Ket {
    loop {
        let k = Ket::from_amplitudes((0..dim).map(|_| gaussian(rng)).collect());
        if let Some(n) = k.normalized() {
            return n;
        }
    }
}

/// Complex Ginibre matrix with standard normal entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_rows(rows, cols, (0..rows * cols).map(|_| gaussian(rng)).collect())
        .expect("entry count matches")
}

/// Haar-distributed unitary via Gram-Schmidt QR of a Ginibre matrix.
pub fn unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(dim, dim, rng);
    let cols: Vec<Ket> = (0..dim).map(|j| g.column(j)).collect();
    ComplexMatrix::from_columns(&gram_schmidt(&cols)).expect("equal column length")
}

/// Orthonormalizes `vectors` in order (modified Gram-Schmidt, applied twice).
/// Vectors that become numerically dependent are dropped.
pub fn gram_schmidt(vectors: &[Ket]) -> Vec<Ket> {
    let mut out: Vec<Ket> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for u in &out {
                let c = u.inner(&w);
                w = &w - &u.scale(c);
            }
        }
        if w.norm() > 1e-10 * v.norm().max(1.0) {
            out.push(w.normalized().expect("nonzero"));
        }
    }
    out
}

/// Random Hermitian matrix `(G + G†)/2`.
pub fn hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    ginibre(dim, dim, rng).hermitian_part()
}

/// Random density matrix of the given rank, `G G† / tr(G G†)`.
pub fn density<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(dim, rank, rng);
    let rho = (&g * &g.adjoint()).hermitian_part();
    let tr = rho.trace().re;
    rho.scale_real(1.0 / tr)
}

/// Random probability vector sorted nonincreasing, entries bounded below by `floor`.
pub fn schmidt_coefficients<R: Rng + ?Sized>(dim: usize, floor: f64, rng: &mut R) -> Vec<f64> {
    let mut w: Vec<f64> = (0..dim).map(|_| floor + rng.gen::<f64>()).collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    w.sort_by(|a, b| b.total_cmp(a));
    w
}
