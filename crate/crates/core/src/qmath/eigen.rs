use super::{ComplexMatrix, Ket, C64};
use crate::error::{Error, Result};

/// Support cutoff for pseudo-inverses.
pub const DEFAULT_CUTOFF: f64 = 1e-12;

const NEGATIVE_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a Hermitian matrix, eigenvalues in ascending order.
///
/// Column `i` of `vectors` is the eigenvector for `values[i]`.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenSystem {
    /// Eigenvalues in nondecreasing order, λ↑.
    pub fn ascending(&self) -> Vec<f64> {
        self.values.clone()
    }

    /// Eigenvalues in nonincreasing order, λ↓.
    pub fn descending(&self) -> Vec<f64> {
        self.values.iter().rev().copied().collect()
    }

    pub fn vector(&self, i: usize) -> Ket {
        self.vectors.column(i)
    }

    /// `V diag(f(λ)) V†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vik * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|x| x)
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
pub fn eigh(a: &ComplexMatrix) -> Result<EigenSystem> {
    a.ensure_hermitian()?;
    let n = a.rows();
    let mut m = a.hermitian_part();
    let mut v = ComplexMatrix::identity(n);

    let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-17 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, col)] = v[(i, src)];
        }
    }
    Ok(EigenSystem { values, vectors })
}

/// Zeroes `m[p][q]` with the unitary `W = diag(1, e^{-iφ}) · R(θ)` on the (p, q) plane,
/// `m ← W† m W`, `v ← v W`.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let pc = phase.conj();
    // W = [[c, s], [-s e^{-iφ}, c e^{-iφ}]]
    let w = [
        [C64::new(c, 0.0), C64::new(s, 0.0)],
        [pc * (-s), pc * c],
    ];
    let n = m.rows();
    for i in 0..n {
        let mp = m[(i, p)];
        let mq = m[(i, q)];
        m[(i, p)] = mp * w[0][0] + mq * w[1][0];
        m[(i, q)] = mp * w[0][1] + mq * w[1][1];
        let vp = v[(i, p)];
        let vq = v[(i, q)];
        v[(i, p)] = vp * w[0][0] + vq * w[1][0];
        v[(i, q)] = vp * w[0][1] + vq * w[1][1];
    }
    for j in 0..n {
        let mp = m[(p, j)];
        let mq = m[(q, j)];
        m[(p, j)] = w[0][0].conj() * mp + w[1][0].conj() * mq;
        m[(q, j)] = w[0][1].conj() * mp + w[1][1].conj() * mq;
    }
    m[(p, q)] = C64::new(0.0, 0.0);
    m[(q, p)] = C64::new(0.0, 0.0);
    m[(p, p)].im = 0.0;
    m[(q, q)].im = 0.0;
}

/// `ρ^{-1/2}` on the support of `ρ`; eigenvalues at or below `cutoff` map to zero.
pub fn pinv_sqrt(rho: &ComplexMatrix, cutoff: f64) -> Result<ComplexMatrix> {
    let es = eigh(rho)?;
    if let Some(&min) = es.values.first() {
        if min < -NEGATIVE_TOL {
            return Err(Error::NegativeEigenvalue { eigenvalue: min });
        }
    }
    Ok(es.reconstruct_with(|x| if x > cutoff { 1.0 / x.sqrt() } else { 0.0 }))
}

/// Projector onto the eigenspaces of `rho` with eigenvalue above `cutoff`.
pub fn support_projector(rho: &ComplexMatrix, cutoff: f64) -> Result<ComplexMatrix> {
    let es = eigh(rho)?;
    Ok(es.reconstruct_with(|x| if x > cutoff { 1.0 } else { 0.0 }))
}

/// Operator norm of a Hermitian matrix: its largest eigenvalue magnitude.
pub fn op_norm_inf(a: &ComplexMatrix) -> Result<f64> {
    let es = eigh(a)?;
    Ok(es.values.iter().map(|x| x.abs()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn eigenpairs_of_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in [1, 2, 3, 5, 8, 16] {
            let a = random::hermitian(d, &mut rng);
            let es = eigh(&a).unwrap();
            for k in 0..d {
                let v = es.vector(k);
                let av = a.apply(&v).unwrap();
                let lv = v.scale(C64::new(es.values[k], 0.0));
                assert!(av.max_abs_diff(&lv) < 1e-10, "d={d} k={k}");
            }
            assert!(es.reconstruct().max_abs_diff(&a) < 1e-10);
            assert!(es.vectors.unitary_deviation() < 1e-12);
            assert!(es.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn degenerate_spectrum() {
        let a = ComplexMatrix::identity(4).scale_real(0.25);
        let es = eigh(&a).unwrap();
        assert!(es.values.iter().all(|&x| (x - 0.25).abs() < 1e-16));
        assert_eq!(es.descending(), vec![0.25; 4]);
    }

    #[test]
    fn pinv_sqrt_diagonal() {
        let r = pinv_sqrt(&ComplexMatrix::from_real_diag(&[4.0, 1.0]), DEFAULT_CUTOFF).unwrap();
        assert!(r.max_abs_diff(&ComplexMatrix::from_real_diag(&[0.5, 1.0])) < 1e-15);
    }

    #[test]
    fn pinv_sqrt_kernel_maps_to_zero() {
        let r = pinv_sqrt(&ComplexMatrix::from_real_diag(&[1.0, 0.0]), DEFAULT_CUTOFF).unwrap();
        assert!(r.max_abs_diff(&ComplexMatrix::from_real_diag(&[1.0, 0.0])) < 1e-15);
    }

    #[test]
    fn pinv_sqrt_random_psd_gives_support_projector() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (d, rank) in [(2, 1), (3, 2), (4, 4), (6, 3)] {
            let rho = random::density(d, rank, &mut rng);
            let s = pinv_sqrt(&rho, DEFAULT_CUTOFF).unwrap();
            let proj = &(&s * &rho) * &s;
            // oracle: projector from an independent eigendecomposition
            let es = eigh(&rho).unwrap();
            let mut want = ComplexMatrix::zeros(d, d);
            for k in 0..d {
                if es.values[k] > 1e-9 {
                    let v = es.vector(k);
                    want = &want + &v.projector();
                }
            }
            assert!(proj.max_abs_diff(&want) < 1e-9, "d={d} rank={rank}");
        }
    }

    #[test]
    fn pinv_sqrt_rejects_negative() {
        let r = pinv_sqrt(&ComplexMatrix::from_real_diag(&[1.0, -0.5]), DEFAULT_CUTOFF);
        assert!(matches!(r, Err(Error::NegativeEigenvalue { .. })));
    }

    #[test]
    fn op_norm_examples() {
        assert_eq!(op_norm_inf(&ComplexMatrix::identity(4)).unwrap(), 1.0);
        assert_eq!(op_norm_inf(&ComplexMatrix::from_real_diag(&[3.0, -5.0])).unwrap(), 5.0);
        let mut bad = ComplexMatrix::identity(2);
        bad[(0, 1)] = C64::new(1.0, 0.0);
        assert!(matches!(op_norm_inf(&bad), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn op_norm_rank_one_matches_power_iteration() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = random::ket(5, &mut rng).scale(C64::new(1.7, 0.0));
        let a = v.projector();
        // power iteration oracle
        let mut x = Ket::basis(5, 0);
        x = &x + &random::ket(5, &mut rng);
        let mut est = 0.0;
        for _ in 0..50 {
            let y = a.apply(&x).unwrap();
            est = y.norm() / x.norm();
            x = y.normalized().unwrap();
        }
        assert!((est - v.norm_sqr()).abs() < 1e-12);
        assert!((op_norm_inf(&a).unwrap() - v.norm_sqr()).abs() < 1e-12);
    }
}
