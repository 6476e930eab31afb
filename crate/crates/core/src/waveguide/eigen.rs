//! Shift-invert inverse iteration on a real sparse non-symmetric matrix.

use crate::{Error, Result};
use faer::prelude::*;
use faer::sparse::linalg::solvers::Lu;
use faer::sparse::{SparseColMat, Triplet};

/// Compressed sparse rows, duplicates summed.
#[derive(Debug, Clone)]
pub(crate) struct Csr {
    pub n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl Csr {
    pub fn from_triplets(n: usize, mut entries: Vec<(usize, usize, f64)>) -> Self {
        entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(entries.len());
        let mut vals: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last = None;
        for (r, c, v) in entries {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Csr { n, row_ptr, cols, vals }
    }

    pub fn mul(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
            *yi = self.cols[a..b].iter().zip(&self.vals[a..b]).map(|(&c, &v)| v * x[c]).sum();
        }
    }

    /// LU factorization of `A - σI`.
    pub fn factor_shifted(&self, sigma: f64) -> Result<ShiftInvert> {
        let mut trip = Vec::with_capacity(self.vals.len() + self.n);
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                trip.push(Triplet::new(i, self.cols[k], self.vals[k]));
            }
            trip.push(Triplet::new(i, i, -sigma));
        }
        let m = SparseColMat::<usize, f64>::try_new_from_triplets(self.n, self.n, &trip)
            .map_err(|e| Error::Factorization(format!("{e:?}")))?;
        let lu = m.sp_lu().map_err(|e| Error::Factorization(format!("{e:?}")))?;
        Ok(ShiftInvert { sigma, lu })
    }
}

pub(crate) struct ShiftInvert {
    pub sigma: f64,
    lu: Lu<usize, f64>,
}

impl ShiftInvert {
    fn solve(&self, x: &mut [f64]) {
        let mut col = Col::<f64>::from_fn(x.len(), |i| x[i]);
        self.lu.solve_in_place(col.as_mat_mut());
        for (i, v) in x.iter_mut().enumerate() {
            *v = col[i];
        }
    }
}

pub(crate) struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
}

fn normalize(x: &mut [f64]) {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= n);
}

/// Inverse iteration with `(A - σI)^{-1}`, re-projecting onto an invariant
/// subspace after every solve. Stops when `‖Ay - λy‖ < tol·|λ|` for unit `y`.
pub(crate) fn inverse_iteration(
    a: &Csr,
    op: &ShiftInvert,
    project: &dyn Fn(&mut [f64]),
    mut y: Vec<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<EigenPair> {
    project(&mut y);
    normalize(&mut y);
    let mut ay = vec![0.0; a.n];
    let mut residual = f64::INFINITY;
    let mut value = op.sigma;
    for _ in 0..max_iter {
        op.solve(&mut y);
        project(&mut y);
        normalize(&mut y);
        a.mul(&y, &mut ay);
        value = y.iter().zip(&ay).map(|(p, q)| p * q).sum();
        residual = ay.iter().zip(&y).map(|(q, p)| (q - value * p).powi(2)).sum::<f64>().sqrt();
        if residual < tol * value.abs() {
            return Ok(EigenPair { value, vector: y, residual: residual / value.abs() });
        }
    }
    Err(Error::EigenNoConvergence { iterations: max_iter, residual: residual / value.abs() })
}
