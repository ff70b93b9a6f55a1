//! Dense Gaussian elimination with partial pivoting, generic over [`Scalar`].

use thiserror::Error;

use crate::number::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("singular system: no usable pivot in column {column}")]
    Singular { column: usize },
    #[error("dimension mismatch: {rows}x{cols} matrix with rhs of length {rhs}")]
    Dimension { rows: usize, cols: usize, rhs: usize },
}

/// Row-major dense square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::zero(); n * n] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.n + c]
    }

    pub fn add_to(&mut self, r: usize, c: usize, value: &T) {
        let slot = &mut self.data[r * self.n + c];
        *slot = slot.clone() + value.clone();
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.n..(r + 1) * self.n]
    }
}

/// Solves `a · x = b`, consuming both.
///
/// The pivot in each column is the entry of largest magnitude at or below the
/// diagonal. Zero entries are skipped during elimination, which keeps exact
/// rational solves on sparse graph matrices cheap.
pub fn gaussian_solve<T: Scalar>(a: DenseMatrix<T>, b: Vec<T>) -> Result<Vec<T>, SolveError> {
    let n = a.n;
    if b.len() != n {
        return Err(SolveError::Dimension { rows: n, cols: n, rhs: b.len() });
    }
    let mut rows: Vec<Vec<T>> = a.data.chunks(n.max(1)).take(n).map(<[T]>::to_vec).collect();
    let mut rhs = b;
    let scale = rows
        .iter()
        .flatten()
        .fold(T::zero(), |m, x| if x.abs() > m { x.abs() } else { m });

    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| {
                rows[i][col]
                    .abs()
                    .partial_cmp(&rows[j][col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
                    // prefer the earliest row on ties
                    .then(j.cmp(&i))
            })
            .unwrap_or(col);
        if rows[pivot_row][col].negligible(&scale) {
            return Err(SolveError::Singular { column: col });
        }
        rows.swap(col, pivot_row);
        rhs.swap(col, pivot_row);

        let (upper, lower) = rows.split_at_mut(col + 1);
        let pivot = &upper[col];
        for (offset, row) in lower.iter_mut().enumerate() {
            if row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone() / pivot[col].clone();
            row[col] = T::zero();
            for k in col + 1..n {
                if !pivot[k].is_zero() {
                    row[k] = row[k].clone() - factor.clone() * pivot[k].clone();
                }
            }
            let r = col + 1 + offset;
            rhs[r] = rhs[r].clone() - factor * rhs[col].clone();
        }
    }

    let mut x = vec![T::zero(); n];
    for r in (0..n).rev() {
        let mut acc = rhs[r].clone();
        for k in r + 1..n {
            if !rows[r][k].is_zero() {
                acc = acc - rows[r][k].clone() * x[k].clone();
            }
        }
        x[r] = acc / rows[r][r].clone();
    }
    Ok(x)
}
