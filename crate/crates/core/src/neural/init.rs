use nalgebra::DMatrix;

use crate::rng::RngStream;

/// `gain · Q` where `Q` is a random `rows × cols` matrix with orthonormal rows
/// (`rows ≤ cols`) or orthonormal columns (`rows > cols`). Returned row-major.
///
/// `Q` comes from the QR factorization of a Gaussian matrix, with column
/// signs fixed by `diag(R)` so the draw is Haar-distributed.
pub fn orthogonal_init(rows: usize, cols: usize, gain: f64, rng: &mut RngStream) -> Vec<f64> {
    assert!(rows >= 1 && cols >= 1, "orthogonal_init needs a non-empty shape");
    let tall_rows = rows.max(cols);
    let tall_cols = rows.min(cols);
    let draws: Vec<f64> = (0..tall_rows * tall_cols).map(|_| rng.gaussian()).collect();
    let a = DMatrix::from_row_slice(tall_rows, tall_cols, &draws);
    let qr = a.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..tall_cols {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    let q = if rows < cols { q.transpose() } else { q };
    let mut out = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            out.push(gain * q[(i, j)]);
        }
    }
    out
}
