//! Dense complex linear algebra at small dimension.
//!
//! Composite systems use one index convention throughout the crate: the
//! first subsystem is the most significant digit, so for subsystems with
//! dimensions `(d_0, d_1, ..., d_{n-1})` the basis state `|i_0 i_1 ... i_{n-1}>`
//! sits at index `sum_k i_k * prod_{m>k} d_m`. In particular
//! `tensor(a, b)[(i_a * dim_b + i_b, ...)]`. The four-qubit swapping scenario is
//! laid out as Alice, Clare's first qubit, Clare's second qubit, Bob; see
//! [`crate::states::wires`].

mod eigen;
mod matrix;
pub mod random;
mod schmidt;
pub mod text;

pub use eigen::{eigh, op_norm_inf, pinv_sqrt, support_projector, EigenSystem, DEFAULT_CUTOFF};
pub use matrix::{ComplexMatrix, Ket};
pub use schmidt::{schmidt, Schmidt};

use crate::error::{Error, Result};
use num_complex::Complex64;

pub type C64 = Complex64;

/// Tolerance used by Hermitian-flagged operations.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Kronecker product `a ⊗ b`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows() * b.rows();
    let cols = a.cols() * b.cols();
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ia in 0..a.rows() {
        for ja in 0..a.cols() {
            let x = a[(ia, ja)];
            if x == C64::new(0.0, 0.0) {
                continue;
            }
            for ib in 0..b.rows() {
                for jb in 0..b.cols() {
                    out[(ia * b.rows() + ib, ja * b.cols() + jb)] = x * b[(ib, jb)];
                }
            }
        }
    }
    out
}

/// Kronecker product of two kets.
pub fn tensor_kets(a: &Ket, b: &Ket) -> Ket {
    let mut amps = Vec::with_capacity(a.dim() * b.dim());
    for x in a.amplitudes() {
        for y in b.amplitudes() {
            amps.push(x * y);
        }
    }
    Ket::from_amplitudes(amps)
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

fn check_wires(dims: &[usize], wires: &[usize]) -> Result<()> {
    for (n, &w) in wires.iter().enumerate() {
        if w >= dims.len() {
            return Err(Error::InvalidWire {
                wire: w,
                wires: dims.len(),
            });
        }
        if wires[..n].contains(&w) {
            return Err(Error::DimensionMismatch(format!("wire {w} listed twice")));
        }
    }
    Ok(())
}

/// Offsets into the full index space for each basis state of the sub-register `wires`
/// (enumerated in the order the wires are listed).
fn sub_offsets(dims: &[usize], wires: &[usize]) -> Vec<usize> {
    let st = strides(dims);
    let sub_dim: usize = wires.iter().map(|&w| dims[w]).product();
    let mut offsets = Vec::with_capacity(sub_dim);
    for s in 0..sub_dim {
        let mut rem = s;
        let mut off = 0;
        for &w in wires.iter().rev() {
            off += (rem % dims[w]) * st[w];
            rem /= dims[w];
        }
        offsets.push(off);
    }
    offsets
}

/// Index of `i` restricted to `wires`, and `i` with those digits zeroed.
fn split_index(i: usize, dims: &[usize], st: &[usize], wires: &[usize]) -> (usize, usize) {
    let mut sub = 0;
    let mut base = i;
    for &w in wires {
        let digit = (i / st[w]) % dims[w];
        sub = sub * dims[w] + digit;
        base -= digit * st[w];
    }
    (sub, base)
}

fn check_dims(total: usize, dims: &[usize]) -> Result<()> {
    let prod: usize = dims.iter().product();
    if prod != total {
        return Err(Error::DimensionMismatch(format!(
            "subsystem dimensions {dims:?} multiply to {prod}, operand has dimension {total}"
        )));
    }
    Ok(())
}

/// Reduced operator on the subsystems listed in `keep` (kept in ascending wire order).
pub fn partial_trace(rho: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    if !rho.is_square() {
        return Err(Error::NotSquare {
            rows: rho.rows(),
            cols: rho.cols(),
        });
    }
    check_dims(rho.rows(), dims)?;
    check_wires(dims, keep)?;
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    let traced: Vec<usize> = (0..dims.len()).filter(|w| !keep.contains(w)).collect();
    let st = strides(dims);
    let out_dim: usize = keep.iter().map(|&w| dims[w]).product();
    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    let n = rho.rows();
    let split: Vec<(usize, usize)> = (0..n)
        .map(|i| {
            let (k, _) = split_index(i, dims, &st, &keep);
            let (t, _) = split_index(i, dims, &st, &traced);
            (k, t)
        })
        .collect();
    for i in 0..n {
        for j in 0..n {
            if split[i].1 == split[j].1 {
                out[(split[i].0, split[j].0)] += rho[(i, j)];
            }
        }
    }
    Ok(out)
}

/// Reduced density operator of a pure state on the subsystems in `keep`.
pub fn reduced_state(psi: &Ket, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    partial_trace(&psi.projector(), dims, keep)
}

/// Applies a square operator acting on `wires` (in the listed order) to a
/// multi-partite ket, identity elsewhere.
pub fn apply_local(op: &ComplexMatrix, psi: &Ket, dims: &[usize], wires: &[usize]) -> Result<Ket> {
    check_dims(psi.dim(), dims)?;
    check_wires(dims, wires)?;
    let sub_dim: usize = wires.iter().map(|&w| dims[w]).product();
    if op.rows() != sub_dim || op.cols() != sub_dim {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, wires {wires:?} span dimension {sub_dim}",
            op.rows(),
            op.cols()
        )));
    }
    let st = strides(dims);
    let offsets = sub_offsets(dims, wires);
    let mut out = vec![C64::new(0.0, 0.0); psi.dim()];
    for (i, &amp) in psi.amplitudes().iter().enumerate() {
        if amp == C64::new(0.0, 0.0) {
            continue;
        }
        let (s, base) = split_index(i, dims, &st, wires);
        for (t, off) in offsets.iter().enumerate() {
            out[base + off] += op[(t, s)] * amp;
        }
    }
    Ok(Ket::from_amplitudes(out))
}

/// Contracts the sub-register `wires` with `<bra|`, leaving an unnormalized ket on
/// the remaining wires in ascending order.
pub fn contract(psi: &Ket, dims: &[usize], wires: &[usize], bra: &Ket) -> Result<Ket> {
    check_dims(psi.dim(), dims)?;
    check_wires(dims, wires)?;
    let sub_dim: usize = wires.iter().map(|&w| dims[w]).product();
    if bra.dim() != sub_dim {
        return Err(Error::DimensionMismatch(format!(
            "bra has dimension {}, wires {wires:?} span dimension {sub_dim}",
            bra.dim()
        )));
    }
    let rest: Vec<usize> = (0..dims.len()).filter(|w| !wires.contains(w)).collect();
    let st = strides(dims);
    let out_dim: usize = rest.iter().map(|&w| dims[w]).product();
    let mut out = vec![C64::new(0.0, 0.0); out_dim];
    for (i, &amp) in psi.amplitudes().iter().enumerate() {
        let (s, _) = split_index(i, dims, &st, wires);
        let (r, _) = split_index(i, dims, &st, &rest);
        out[r] += bra.amplitudes()[s].conj() * amp;
    }
    Ok(Ket::from_amplitudes(out))
}
