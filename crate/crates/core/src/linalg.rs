//! Dense LU factorization with partial pivoting and exact 1-norm conditioning.
//!
//! The Newton systems handled here are at most a few dozen unknowns, so the
//! inverse is formed explicitly (column by column from the factors) whenever a
//! condition number is requested.

use nalgebra::{DMatrix, DVector};

/// Induced 1-norm: the largest absolute column sum.
pub fn norm1(a: &DMatrix<f64>) -> f64 {
    a.column_iter()
        .map(|col| col.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Reason a factorization was rejected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularPivot {
    pub column: usize,
    pub pivot: f64,
}

/// Packed LU factors `P A = L U` with unit lower-triangular `L`.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: DMatrix<f64>,
    perm: Vec<usize>,
}

impl Lu {
    /// Factorizes `a`, rejecting any pivot whose magnitude falls below
    /// `pivot_floor` (pass `0.0` to reject only exact zeros).
    pub fn factor(a: &DMatrix<f64>, pivot_floor: f64) -> Result<Self, SingularPivot> {
        assert!(a.is_square(), "LU requires a square matrix");
        let n = a.nrows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();

        for k in 0..n {
            let (mut p, mut best) = (k, lu[(k, k)].abs());
            for i in k + 1..n {
                let v = lu[(i, k)].abs();
                if v > best {
                    p = i;
                    best = v;
                }
            }
            if !(best > pivot_floor) || best == 0.0 {
                return Err(SingularPivot {
                    column: k,
                    pivot: best,
                });
            }
            if p != k {
                lu.swap_rows(p, k);
                perm.swap(p, k);
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor != 0.0 {
                    for j in k + 1..n {
                        let ukj = lu[(k, j)];
                        lu[(i, j)] -= factor * ukj;
                    }
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// Smallest pivot magnitude on the diagonal of `U`.
    pub fn min_pivot(&self) -> f64 {
        (0..self.dim())
            .map(|i| self.lu[(i, i)].abs())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut x = DVector::from_iterator(n, self.perm.iter().map(|&p| b[p]));
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        x
    }

    pub fn inverse(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut inv = DMatrix::zeros(n, n);
        let mut e = DVector::zeros(n);
        for j in 0..n {
            e.fill(0.0);
            e[j] = 1.0;
            inv.set_column(j, &self.solve(&e));
        }
        inv
    }

    /// Exact `‖A‖₁ ‖A⁻¹‖₁` given the original matrix `a`.
    pub fn cond1(&self, a: &DMatrix<f64>) -> f64 {
        norm1(a) * norm1(&self.inverse())
    }
}

/// Solves `a x = b` by LU with partial pivoting, rejecting only exact zero pivots.
pub fn solve(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>, SingularPivot> {
    Ok(Lu::factor(a, 0.0)?.solve(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_permuted_system() {
        let a = DMatrix::from_row_slice(3, 3, &[0.0, 2.0, 1.0, 1.0, 1.0, 0.0, 3.0, 0.0, 1.0]);
        let x = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let b = &a * &x;
        let got = solve(&a, &b).unwrap();
        assert!((got - x).amax() < 1e-14);
    }

    #[test]
    fn rejects_singular() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        let err = Lu::factor(&a, 0.0).unwrap_err();
        assert_eq!(err.column, 1);
    }

    #[test]
    fn identity_has_unit_condition() {
        let a = DMatrix::<f64>::identity(4, 4);
        let lu = Lu::factor(&a, 0.0).unwrap();
        assert_eq!(lu.cond1(&a), 1.0);
    }

    #[test]
    fn diagonal_condition() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![1e-3, 2.0, 5.0]));
        let lu = Lu::factor(&a, 0.0).unwrap();
        assert!((lu.cond1(&a) - 5e3).abs() < 1e-9);
    }
}
