//! Small dense integer matrices: just enough linear algebra for lattice
//! automorphisms (determinants, unimodular inverses, products).

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has determinant {det}, expected +-1")]
    NotUnimodular { det: i64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
}

/// Row-major square integer matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    n: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self, MatrixError> {
        let n = rows.len();
        for r in &rows {
            if r.len() != n {
                return Err(MatrixError::NotSquare { rows: n, cols: r.len() });
            }
        }
        Ok(IntMatrix { n, data: rows.into_iter().flatten().collect() })
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix { n, data: vec![0; n * n] };
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        (0..self.n).map(|i| self.data[i * self.n..(i + 1) * self.n].to_vec()).collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == IntMatrix::identity(self.n)
    }

    /// Column `j` as a vector; columns are the images of basis vectors.
    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn mul_vec(&self, v: &[i64]) -> Result<Vec<i64>, MatrixError> {
        if v.len() != self.n {
            return Err(MatrixError::DimensionMismatch { left: self.n, right: v.len() });
        }
        Ok((0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect())
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, MatrixError> {
        if self.n != other.n {
            return Err(MatrixError::DimensionMismatch { left: self.n, right: other.n });
        }
        let n = self.n;
        let mut out = IntMatrix { n, data: vec![0; n * n] };
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    /// Exact determinant by fraction-free (Bareiss) elimination in i128.
    pub fn det(&self) -> i64 {
        let n = self.n;
        if n == 0 {
            return 1;
        }
        let mut a: Vec<i128> = self.data.iter().map(|&x| x as i128).collect();
        let mut sign: i128 = 1;
        let mut prev: i128 = 1;
        for k in 0..n - 1 {
            if a[k * n + k] == 0 {
                let mut swap = None;
                for i in k + 1..n {
                    if a[i * n + k] != 0 {
                        swap = Some(i);
                        break;
                    }
                }
                match swap {
                    Some(i) => {
                        for j in 0..n {
                            a.swap(k * n + j, i * n + j);
                        }
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i * n + j] = (a[i * n + j] * a[k * n + k] - a[i * n + k] * a[k * n + j])
                        / prev;
                }
                a[i * n + k] = 0;
            }
            prev = a[k * n + k];
        }
        (sign * a[n * n - 1]) as i64
    }

    /// Inverse of a unimodular matrix (integer entries, exact).
    pub fn inverse_unimodular(&self) -> Result<IntMatrix, MatrixError> {
        let det = self.det();
        if det != 1 && det != -1 {
            return Err(MatrixError::NotUnimodular { det });
        }
        let n = self.n;
        let mut inv = IntMatrix { n, data: vec![0; n * n] };
        // Adjugate via cofactors; n is small here.
        for i in 0..n {
            for j in 0..n {
                let minor = self.minor(j, i);
                let c = minor.det() * if (i + j) % 2 == 0 { 1 } else { -1 };
                inv.data[i * n + j] = c * det; // divide by det = multiply, det = +-1
            }
        }
        Ok(inv)
    }

    fn minor(&self, drop_row: usize, drop_col: usize) -> IntMatrix {
        let n = self.n;
        let mut data = Vec::with_capacity((n - 1) * (n - 1));
        for i in 0..n {
            if i == drop_row {
                continue;
            }
            for j in 0..n {
                if j == drop_col {
                    continue;
                }
                data.push(self.get(i, j));
            }
        }
        IntMatrix { n: n - 1, data }
    }
}
