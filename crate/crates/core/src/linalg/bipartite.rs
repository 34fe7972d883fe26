use num_complex::Complex64;

use super::{Bipartition, HermitianMatrix};
use crate::error::Result;

/// Partial trace over the second factor: `(X_A)_{ij} = sum_b X_{(i,b),(j,b)}`.
pub fn partial_trace_b(x: &HermitianMatrix, bp: Bipartition) -> Result<HermitianMatrix> {
    bp.check(x)?;
    let (n, k) = (bp.n(), bp.k());
    Ok(HermitianMatrix::from_lower(n, |i, j| {
        (0..k).map(|b| x.get(i * k + b, j * k + b)).sum()
    }))
}

/// Partial transpose on the second factor: `Y_{(i,a),(j,b)} = X_{(i,b),(j,a)}`.
pub fn partial_transpose(x: &HermitianMatrix, bp: Bipartition) -> Result<HermitianMatrix> {
    bp.check(x)?;
    let (n, k) = (bp.n(), bp.k());
    let d = n * k;
    let mut data = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..n {
        for a in 0..k {
            for j in 0..n {
                for b in 0..k {
                    data[(i * k + a) * d + j * k + b] = x.get(i * k + b, j * k + a);
                }
            }
        }
    }
    Ok(HermitianMatrix::from_raw(d, data))
}

/// Reduction map on the second factor: `X_A (x) I_k - X`.
pub fn reduction_b(x: &HermitianMatrix, bp: Bipartition) -> Result<HermitianMatrix> {
    let xa = partial_trace_b(x, bp)?;
    let k = bp.k();
    Ok(HermitianMatrix::from_lower(bp.dim(), |r, c| {
        let (i, a) = (r / k, r % k);
        let (j, b) = (c / k, c % k);
        let block = if a == b {
            xa.get(i, j)
        } else {
            Complex64::new(0.0, 0.0)
        };
        block - x.get(r, c)
    }))
}
