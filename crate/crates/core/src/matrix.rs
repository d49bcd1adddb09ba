//! Polynomial matrices between graded free modules.

use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::qseries::{Cutoff, NovikovSeries};
use crate::ring::GradedPolynomial;

/// Twists `n` of the free summands `R(n)`, in basis order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TwistList(pub Vec<i64>);

impl TwistList {
    pub fn new(twists: Vec<i64>) -> Self {
        TwistList(twists)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn twisted(&self, by: i64) -> Self {
        TwistList(self.0.iter().map(|t| t + by).collect())
    }

    pub fn concat(&self, other: &TwistList) -> Self {
        TwistList(self.0.iter().chain(other.0.iter()).copied().collect())
    }
}

impl Index<usize> for TwistList {
    type Output = i64;
    fn index(&self, index: usize) -> &i64 {
        &self.0[index]
    }
}

impl fmt::Display for TwistList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(i64::to_string).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("dimension mismatch: {left_cols} columns against {right_rows} rows")]
    Dimension { left_cols: usize, right_rows: usize },
    #[error("twist mismatch: composing through {left} and {right}")]
    TwistMismatch { left: TwistList, right: TwistList },
    #[error("entry ({row}, {col}) is not homogeneous of degree {expected}")]
    Grading { row: usize, col: usize, expected: i64 },
}

/// Dense row-major matrix of polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<GradedPolynomial>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        PolyMatrix {
            rows,
            cols,
            entries: vec![GradedPolynomial::zero(); rows * cols],
        }
    }

    pub fn identity(size: usize) -> Self {
        Self::scalar(size, &GradedPolynomial::one())
    }

    pub fn scalar(size: usize, value: &GradedPolynomial) -> Self {
        let mut out = Self::zeros(size, size);
        for index in 0..size {
            out.set(index, index, value.clone());
        }
        out
    }

    pub fn from_rows(rows: Vec<Vec<GradedPolynomial>>) -> Self {
        let row_count = rows.len();
        let col_count = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == col_count), "ragged matrix rows");
        PolyMatrix {
            rows: row_count,
            cols: col_count,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> &GradedPolynomial {
        &self.entries[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: GradedPolynomial) {
        self.entries[row * self.cols + col] = value;
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &GradedPolynomial)> {
        self.entries
            .iter()
            .enumerate()
            .map(move |(index, p)| (index / self.cols, index % self.cols, p))
    }

    pub fn map(&self, f: impl Fn(&GradedPolynomial) -> GradedPolynomial) -> Self {
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn mul(&self, other: &PolyMatrix) -> Result<PolyMatrix, MatrixError> {
        if self.cols != other.rows {
            return Err(MatrixError::Dimension {
                left_cols: self.cols,
                right_rows: other.rows,
            });
        }
        let mut out = PolyMatrix::zeros(self.rows, other.cols);
        for row in 0..self.rows {
            for col in 0..other.cols {
                let mut sum = GradedPolynomial::zero();
                for mid in 0..self.cols {
                    let left = self.get(row, mid);
                    let right = other.get(mid, col);
                    if left.is_zero() && left.cutoff().is_exact()
                        || right.is_zero() && right.cutoff().is_exact()
                    {
                        continue;
                    }
                    sum = sum.add(&left.mul(right));
                }
                out.set(row, col, sum);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in add");
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &PolyMatrix) -> PolyMatrix {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> PolyMatrix {
        self.map(GradedPolynomial::neg)
    }

    pub fn scale(&self, factor: &NovikovSeries) -> PolyMatrix {
        self.map(|p| p.scale(factor))
    }

    pub fn truncate(&self, cutoff: Cutoff) -> PolyMatrix {
        self.map(|p| p.truncate(cutoff))
    }

    pub fn transpose(&self) -> PolyMatrix {
        let mut out = PolyMatrix::zeros(self.cols, self.rows);
        for (row, col, p) in self.entries() {
            out.set(col, row, p.clone());
        }
        out
    }

    /// Block matrix `[[a, b], [c, d]]`.
    pub fn block(
        top_left: &PolyMatrix,
        top_right: &PolyMatrix,
        bottom_left: &PolyMatrix,
        bottom_right: &PolyMatrix,
    ) -> PolyMatrix {
        let rows = top_left.rows + bottom_left.rows;
        let cols = top_left.cols + top_right.cols;
        let mut out = PolyMatrix::zeros(rows, cols);
        let place = |out: &mut PolyMatrix, block: &PolyMatrix, r0: usize, c0: usize| {
            for (row, col, p) in block.entries() {
                out.set(r0 + row, c0 + col, p.clone());
            }
        };
        place(&mut out, top_left, 0, 0);
        place(&mut out, top_right, 0, top_left.cols);
        place(&mut out, bottom_left, top_left.rows, 0);
        place(&mut out, bottom_right, top_left.rows, top_left.cols);
        out
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> PolyMatrix {
        let mut out = PolyMatrix::zeros(rows.len(), cols.len());
        for (i, row) in rows.clone().enumerate() {
            for (j, col) in cols.clone().enumerate() {
                out.set(i, j, self.get(row, col).clone());
            }
        }
        out
    }

    pub fn precision(&self) -> Cutoff {
        self.entries
            .iter()
            .map(GradedPolynomial::precision)
            .fold(Cutoff::Exact, Cutoff::min)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(GradedPolynomial::is_zero)
    }

    pub fn agrees_below(&self, other: &PolyMatrix, limit: Cutoff) -> Option<bool> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Some(false);
        }
        let mut all = true;
        for (a, b) in self.entries.iter().zip(&other.entries) {
            match a.agrees_below(b, limit) {
                None => return None,
                Some(false) => all = false,
                Some(true) => {}
            }
        }
        Some(all)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            (0..self.rows)
                .map(|row| {
                    Value::Array(
                        (0..self.cols)
                            .map(|col| Value::from(self.get(row, col).render()))
                            .collect(),
                    )
                })
                .collect(),
        )
    }
}

/// A degree-zero map between graded free modules; entry `(i, j)` is
/// homogeneous of degree `target[i] - source[j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMatrix {
    pub matrix: PolyMatrix,
    pub source: TwistList,
    pub target: TwistList,
}

impl GradedMatrix {
    pub fn new(matrix: PolyMatrix, source: TwistList, target: TwistList) -> Self {
        assert_eq!(matrix.rows(), target.len(), "row count differs from target rank");
        assert_eq!(matrix.cols(), source.len(), "column count differs from source rank");
        GradedMatrix {
            matrix,
            source,
            target,
        }
    }

    pub fn zero(source: TwistList, target: TwistList) -> Self {
        let matrix = PolyMatrix::zeros(target.len(), source.len());
        GradedMatrix::new(matrix, source, target)
    }

    pub fn entry_degree(&self, row: usize, col: usize) -> i64 {
        self.target[row] - self.source[col]
    }

    pub fn check_grading(&self) -> Result<(), MatrixError> {
        for (row, col, p) in self.matrix.entries() {
            let expected = self.entry_degree(row, col);
            if !p.is_homogeneous_of(expected) || (expected < 0 && !p.is_zero()) {
                return Err(MatrixError::Grading { row, col, expected });
            }
        }
        Ok(())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &GradedMatrix) -> Result<GradedMatrix, MatrixError> {
        if self.source != other.target {
            return Err(MatrixError::TwistMismatch {
                left: self.source.clone(),
                right: other.target.clone(),
            });
        }
        Ok(GradedMatrix::new(
            self.matrix.mul(&other.matrix)?,
            other.source.clone(),
            self.target.clone(),
        ))
    }

    pub fn twisted(&self, by: i64) -> GradedMatrix {
        GradedMatrix::new(self.matrix.clone(), self.source.twisted(by), self.target.twisted(by))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "source": self.source.0,
            "target": self.target.0,
            "entries": self.matrix.to_json(),
        })
    }
}
