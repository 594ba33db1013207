use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::rat::Val;
use crate::valued_field::FieldElem;

/// Dense row-major matrix over `K`.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElem>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![FieldElem::zero(); rows * cols],
        }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Matrix::zeros(d, d);
        for i in 0..d {
            m[(i, i)] = FieldElem::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<FieldElem>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::DimensionMismatch {
                expected: c,
                got: bad.len(),
            });
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_columns(cols: &[Vec<FieldElem>]) -> Result<Self> {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        let mut m = Matrix::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            if col.len() != r {
                return Err(Error::DimensionMismatch {
                    expected: r,
                    got: col.len(),
                });
            }
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        Ok(m)
    }

    pub fn diagonal(entries: Vec<FieldElem>) -> Self {
        let d = entries.len();
        let mut m = Matrix::zeros(d, d);
        for (i, x) in entries.into_iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[FieldElem] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<FieldElem> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row(&self, i: usize) -> &[FieldElem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Least common ramification of all entries.
    pub fn ramification(&self) -> u32 {
        self.data
            .iter()
            .fold(1u32, |acc, x| acc.lcm(&x.ramification()))
    }

    pub fn ramify(&self, m: u32) -> Matrix {
        self.map(|x| x.ramify(m))
    }

    pub fn lift_to(&self, ram: u32) -> Matrix {
        self.map(|x| x.lift_to(ram))
    }

    pub fn map(&self, f: impl Fn(&FieldElem) -> FieldElem) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = &out[(i, j)] + &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[FieldElem]) -> Result<Vec<FieldElem>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(FieldElem::zero(), |acc, (a, b)| &acc + &(a * b))
            })
            .collect())
    }

    /// Submatrix on the given rows and columns.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m[(a, b)] = self[(i, j)].clone();
            }
        }
        m
    }

    /// Minimal entry valuation, `+∞` for the zero matrix.
    pub fn min_val(&self) -> Val {
        self.data
            .iter()
            .map(FieldElem::val)
            .min()
            .unwrap_or(Val::Infinity)
    }

    /// True iff every entry off the diagonal vanishes.
    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// `row[target] -= factor * row[source]`.
    pub fn row_axpy(&mut self, target: usize, source: usize, factor: &FieldElem) {
        for j in 0..self.cols {
            let s = &self[(source, j)];
            if s.is_zero() {
                continue;
            }
            let delta = factor * s;
            self[(target, j)] = &self[(target, j)] - &delta;
        }
    }

    /// `col[target] -= factor * col[source]`.
    pub fn col_axpy(&mut self, target: usize, source: usize, factor: &FieldElem) {
        for i in 0..self.rows {
            let s = &self[(i, source)];
            if s.is_zero() {
                continue;
            }
            let delta = factor * s;
            self[(i, target)] = &self[(i, target)] - &delta;
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = FieldElem;
    fn index(&self, (i, j): (usize, usize)) -> &FieldElem {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut FieldElem {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}
