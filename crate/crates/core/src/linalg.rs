//! Sparse symmetric storage and SPD solves: a sparse Cholesky direct path
//! (faer) and a block-Jacobi preconditioned conjugate gradient fallback.

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Side};

use crate::error::FoldError;

/// Symmetric sparse matrix in CSR form; both triangles are stored.
#[derive(Clone, Debug)]
pub struct SparseSym {
    pub dim: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseSym {
    /// Build from (row, col, value) triplets; duplicates are summed.
    pub fn from_triplets(dim: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut rows: Vec<std::collections::BTreeMap<usize, f64>> = vec![Default::default(); dim];
        for &(i, j, v) in triplets {
            *rows[i].entry(j).or_insert(0.0) += v;
        }
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for r in rows {
            for (j, v) in r {
                col_idx.push(j);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        SparseSym { dim, row_ptr, col_idx, values }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.dim {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.values[k] * x[self.col_idx[k]];
            }
            y[i] = s;
        }
    }

    /// max_ij |A_ij - A_ji|
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[k];
                let mut aji = 0.0;
                for l in self.row_ptr[j]..self.row_ptr[j + 1] {
                    if self.col_idx[l] == i {
                        aji = self.values[l];
                    }
                }
                worst = worst.max((self.values[k] - aji).abs());
            }
        }
        worst
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMethod {
    Direct,
    /// Block-Jacobi preconditioned CG with the given block size.
    Cg { block_size: usize },
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub method: SolveMethod,
    pub iterations: usize,
    /// Final relative residual ‖b − Ax‖ / ‖b‖.
    pub residual: f64,
}

/// Inverse of a dense SPD block by pivoted Gaussian elimination.
fn invert_block(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut m = vec![0.0; n * 2 * n];
    for i in 0..n {
        for j in 0..n {
            m[i * 2 * n + j] = a[i * n + j];
        }
        m[i * 2 * n + n + i] = 1.0;
    }
    for col in 0..n {
        let piv = (col..n).max_by(|&a_, &b_| {
            m[a_ * 2 * n + col].abs().total_cmp(&m[b_ * 2 * n + col].abs())
        })?;
        if m[piv * 2 * n + col].abs() < 1e-300 {
            return None;
        }
        if piv != col {
            for j in 0..2 * n {
                m.swap(col * 2 * n + j, piv * 2 * n + j);
            }
        }
        let d = m[col * 2 * n + col];
        for j in 0..2 * n {
            m[col * 2 * n + j] /= d;
        }
        for r in 0..n {
            if r != col {
                let f = m[r * 2 * n + col];
                if f != 0.0 {
                    for j in 0..2 * n {
                        m[r * 2 * n + j] -= f * m[col * 2 * n + j];
                    }
                }
            }
        }
    }
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            inv[i * n + j] = m[i * 2 * n + n + j];
        }
    }
    Some(inv)
}

struct BlockJacobi {
    block_size: usize,
    inverses: Vec<Vec<f64>>, // one dense inverse per block
}

impl BlockJacobi {
    fn build(a: &SparseSym, block_size: usize) -> Result<Self, FoldError> {
        let bs = block_size.max(1);
        let nblocks = a.dim.div_ceil(bs);
        let mut inverses = Vec::with_capacity(nblocks);
        for b in 0..nblocks {
            let lo = b * bs;
            let hi = (lo + bs).min(a.dim);
            let n = hi - lo;
            let mut block = vec![0.0; n * n];
            for i in lo..hi {
                for k in a.row_ptr[i]..a.row_ptr[i + 1] {
                    let j = a.col_idx[k];
                    if (lo..hi).contains(&j) {
                        block[(i - lo) * n + (j - lo)] = a.values[k];
                    }
                }
            }
            let inv = invert_block(&block, n).ok_or(FoldError::IndefiniteMatrix)?;
            inverses.push(inv);
        }
        Ok(BlockJacobi { block_size: bs, inverses })
    }

    fn apply(&self, r: &[f64], z: &mut [f64]) {
        let bs = self.block_size;
        for (b, inv) in self.inverses.iter().enumerate() {
            let lo = b * bs;
            let hi = (lo + ((inv.len() as f64).sqrt().round() as usize)).min(r.len());
            let n = hi - lo;
            for i in 0..n {
                let mut s = 0.0;
                for j in 0..n {
                    s += inv[i * n + j] * r[lo + j];
                }
                z[lo + i] = s;
            }
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn solve_direct(a: &SparseSym, b: &[f64]) -> Result<Vec<f64>, FoldError> {
    let mut triplets = Vec::with_capacity(a.nnz());
    for i in 0..a.dim {
        for k in a.row_ptr[i]..a.row_ptr[i + 1] {
            triplets.push(Triplet { row: i, col: a.col_idx[k], val: a.values[k] });
        }
    }
    let mat: SparseColMat<usize, f64> =
        SparseColMat::try_new_from_triplets(a.dim, a.dim, &triplets)
            .map_err(|_| FoldError::IndefiniteMatrix)?;
    let llt = mat.sp_cholesky(Side::Lower).map_err(|_| FoldError::IndefiniteMatrix)?;
    let rhs = Mat::from_fn(a.dim, 1, |i, _| b[i]);
    let x = llt.solve(&rhs);
    Ok((0..a.dim).map(|i| x[(i, 0)]).collect())
}

fn solve_cg(a: &SparseSym, b: &[f64], block_size: usize) -> Result<(Vec<f64>, usize, f64), FoldError> {
    let dim = a.dim;
    let precond = BlockJacobi::build(a, block_size)?;
    let budget = (50.0 * (dim as f64).sqrt()).ceil() as usize + 10;
    let bnorm = norm(b);
    if bnorm == 0.0 {
        return Ok((vec![0.0; dim], 0, 0.0));
    }
    let tol = 1e-12 * bnorm;
    let mut x = vec![0.0; dim];
    let mut r = b.to_vec();
    let mut z = vec![0.0; dim];
    precond.apply(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; dim];
    for it in 0..budget {
        a.matvec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(FoldError::IndefiniteMatrix);
        }
        let alpha = rz / pap;
        for i in 0..dim {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rnorm = norm(&r);
        if rnorm <= tol {
            return Ok((x, it + 1, rnorm / bnorm));
        }
        precond.apply(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..dim {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(FoldError::IterationBudgetExceeded(budget))
}

/// Solve Ax = b for symmetric positive definite A.
pub fn solve_spd(
    a: &SparseSym,
    b: &[f64],
    method: SolveMethod,
) -> Result<(Vec<f64>, SolveReport), FoldError> {
    assert_eq!(a.dim, b.len(), "matrix/rhs size mismatch");
    match method {
        SolveMethod::Direct => {
            let x = solve_direct(a, b)?;
            let mut ax = vec![0.0; a.dim];
            a.matvec(&x, &mut ax);
            let bnorm = norm(b).max(1e-300);
            let res = (0..a.dim).map(|i| (b[i] - ax[i]).powi(2)).sum::<f64>().sqrt() / bnorm;
            Ok((x, SolveReport { method, iterations: 1, residual: res }))
        }
        SolveMethod::Cg { block_size } => {
            let (x, iterations, residual) = solve_cg(a, b, block_size)?;
            Ok((x, SolveReport { method, iterations, residual }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_solve() {
        let a = SparseSym::from_triplets(3, &[(0, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0)]);
        for m in [SolveMethod::Direct, SolveMethod::Cg { block_size: 1 }] {
            let (x, _) = solve_spd(&a, &[1.0, -2.0, 3.0], m).unwrap();
            assert!((x[0] - 1.0).abs() < 1e-12);
            assert!((x[1] + 2.0).abs() < 1e-12);
            assert!((x[2] - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_by_two() {
        let a = SparseSym::from_triplets(2, &[(0, 0, 2.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 2.0)]);
        for m in [SolveMethod::Direct, SolveMethod::Cg { block_size: 2 }] {
            let (x, _) = solve_spd(&a, &[3.0, 3.0], m).unwrap();
            assert!((x[0] - 1.0).abs() < 1e-12, "{x:?}");
            assert!((x[1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn random_spd_agreement() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _case in 0..20 {
            let n = 8 + (rng.random::<f64>() * 16.0) as usize;
            // A = BᵀB + I is SPD
            let bmat: Vec<f64> = (0..n * n).map(|_| rng.random::<f64>() - 0.5).collect();
            let mut trip = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    let mut s = if i == j { 1.0 } else { 0.0 };
                    for k in 0..n {
                        s += bmat[k * n + i] * bmat[k * n + j];
                    }
                    trip.push((i, j, s));
                }
            }
            let a = SparseSym::from_triplets(n, &trip);
            assert!(a.asymmetry() < 1e-12);
            let rhs: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
            let (xd, rd) = solve_spd(&a, &rhs, SolveMethod::Direct).unwrap();
            let (xc, _) = solve_spd(&a, &rhs, SolveMethod::Cg { block_size: 4 }).unwrap();
            assert!(rd.residual < 1e-10);
            for i in 0..n {
                assert!((xd[i] - xc[i]).abs() < 1e-8, "direct/cg disagree at {i}");
            }
        }
    }

    #[test]
    fn indefinite_detected() {
        // eigenvalues 3 and -1
        let a = SparseSym::from_triplets(2, &[(0, 0, 1.0), (0, 1, 2.0), (1, 0, 2.0), (1, 1, 1.0)]);
        let err = solve_spd(&a, &[1.0, 0.0], SolveMethod::Cg { block_size: 1 });
        assert!(matches!(err, Err(FoldError::IndefiniteMatrix)));
        let err = solve_spd(&a, &[1.0, 0.0], SolveMethod::Direct);
        assert!(err.is_err());
    }
}
