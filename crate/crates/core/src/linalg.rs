//! Linear systems over the Novikov field, and polynomial matrices whose
//! coefficients are linear forms in unknowns.
//!
//! Unknowns are indexed by `usize`. Elimination pivots on the coefficient of
//! lowest valuation (exact coefficients first), so precision loss stays
//! proportional to pivot valuations. Free unknowns are set to zero.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::matrix::{GradedMatrix, PolyMatrix, TwistList};
use crate::qseries::{Cutoff, NovikovSeries, SeriesError};
use crate::ring::{GradedPolynomial, Monomial};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("linear system is inconsistent: residual {residual}")]
    Inconsistent { residual: String },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// `Σ coeffs[v] u_v + constant`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearForm {
    pub coeffs: BTreeMap<usize, NovikovSeries>,
    pub constant: NovikovSeries,
}

impl Default for LinearForm {
    fn default() -> Self {
        LinearForm {
            coeffs: BTreeMap::new(),
            constant: NovikovSeries::exact_zero(),
        }
    }
}

impl LinearForm {
    pub fn variable(index: usize) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(index, NovikovSeries::one());
        LinearForm {
            coeffs,
            constant: NovikovSeries::exact_zero(),
        }
    }

    pub fn constant(value: NovikovSeries) -> Self {
        LinearForm {
            coeffs: BTreeMap::new(),
            constant: value,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.constant.is_zero()
    }

    pub fn add_assign(&mut self, other: &LinearForm) {
        for (var, coeff) in &other.coeffs {
            add_coeff(&mut self.coeffs, *var, coeff.clone());
        }
        self.constant = self.constant.add_series(&other.constant);
    }

    pub fn scaled(&self, factor: &NovikovSeries) -> LinearForm {
        let mut coeffs = BTreeMap::new();
        for (var, coeff) in &self.coeffs {
            add_coeff(&mut coeffs, *var, coeff.mul_series(factor));
        }
        LinearForm {
            coeffs,
            constant: self.constant.mul_series(factor),
        }
    }

    pub fn negated(&self) -> LinearForm {
        LinearForm {
            coeffs: self.coeffs.iter().map(|(v, c)| (*v, c.negate())).collect(),
            constant: self.constant.negate(),
        }
    }

    pub fn evaluate(&self, values: &[NovikovSeries]) -> NovikovSeries {
        let mut total = self.constant.clone();
        for (var, coeff) in &self.coeffs {
            total = total.add_series(&coeff.mul_series(&values[*var]));
        }
        total
    }
}

fn add_coeff(map: &mut BTreeMap<usize, NovikovSeries>, var: usize, coeff: NovikovSeries) {
    let sum = match map.remove(&var) {
        Some(existing) => existing.add_series(&coeff),
        None => coeff,
    };
    if !(sum.is_zero() && sum.is_exact()) {
        map.insert(var, sum);
    }
}

/// Polynomial whose coefficients are linear forms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolicPolynomial {
    pub terms: BTreeMap<Monomial, LinearForm>,
}

impl SymbolicPolynomial {
    pub fn known(poly: &GradedPolynomial) -> Self {
        SymbolicPolynomial {
            terms: poly
                .terms()
                .iter()
                .map(|(m, c)| (*m, LinearForm::constant(c.clone())))
                .collect(),
        }
    }

    pub fn add_assign(&mut self, other: &SymbolicPolynomial) {
        for (monomial, form) in &other.terms {
            self.terms.entry(*monomial).or_default().add_assign(form);
        }
        self.terms.retain(|_, form| !form.is_zero());
    }

    pub fn negated(&self) -> Self {
        SymbolicPolynomial {
            terms: self.terms.iter().map(|(m, f)| (*m, f.negated())).collect(),
        }
    }

    pub fn mul_known(&self, poly: &GradedPolynomial) -> Self {
        let mut out = SymbolicPolynomial::default();
        for (ma, form) in &self.terms {
            for (mb, coeff) in poly.terms() {
                out.terms
                    .entry(ma.times(*mb))
                    .or_default()
                    .add_assign(&form.scaled(coeff));
            }
        }
        out.terms.retain(|_, form| !form.is_zero());
        out
    }

    pub fn evaluate(&self, values: &[NovikovSeries]) -> GradedPolynomial {
        GradedPolynomial::from_terms(
            self.terms
                .iter()
                .map(|(m, form)| (*m, form.evaluate(values))),
        )
    }
}

/// Matrix of symbolic polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<SymbolicPolynomial>,
}

impl SymbolicMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SymbolicMatrix {
            rows,
            cols,
            entries: vec![SymbolicPolynomial::default(); rows * cols],
        }
    }

    pub fn known(matrix: &PolyMatrix) -> Self {
        SymbolicMatrix {
            rows: matrix.rows(),
            cols: matrix.cols(),
            entries: matrix
                .entries()
                .map(|(_, _, p)| SymbolicPolynomial::known(p))
                .collect(),
        }
    }

    pub fn get(&self, row: usize, col: usize) -> &SymbolicPolynomial {
        &self.entries[row * self.cols + col]
    }

    pub fn get_mut(&mut self, row: usize, col: usize) -> &mut SymbolicPolynomial {
        &mut self.entries[row * self.cols + col]
    }

    /// `known * self`.
    pub fn left_mul(&self, known: &PolyMatrix) -> SymbolicMatrix {
        assert_eq!(known.cols(), self.rows, "dimension mismatch in left_mul");
        let mut out = SymbolicMatrix::zeros(known.rows(), self.cols);
        for row in 0..known.rows() {
            for col in 0..self.cols {
                let mut sum = SymbolicPolynomial::default();
                for mid in 0..self.rows {
                    let factor = known.get(row, mid);
                    if factor.is_zero() {
                        continue;
                    }
                    sum.add_assign(&self.get(mid, col).mul_known(factor));
                }
                *out.get_mut(row, col) = sum;
            }
        }
        out
    }

    /// `self * known`.
    pub fn right_mul(&self, known: &PolyMatrix) -> SymbolicMatrix {
        assert_eq!(self.cols, known.rows(), "dimension mismatch in right_mul");
        let mut out = SymbolicMatrix::zeros(self.rows, known.cols());
        for row in 0..self.rows {
            for col in 0..known.cols() {
                let mut sum = SymbolicPolynomial::default();
                for mid in 0..self.cols {
                    let factor = known.get(mid, col);
                    if factor.is_zero() {
                        continue;
                    }
                    sum.add_assign(&self.get(row, mid).mul_known(factor));
                }
                *out.get_mut(row, col) = sum;
            }
        }
        out
    }

    pub fn add_assign(&mut self, other: &SymbolicMatrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            a.add_assign(b);
        }
    }

    pub fn negated(&self) -> SymbolicMatrix {
        SymbolicMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(SymbolicPolynomial::negated).collect(),
        }
    }

    pub fn evaluate(&self, values: &[NovikovSeries]) -> PolyMatrix {
        let rows = (0..self.rows)
            .map(|row| {
                (0..self.cols)
                    .map(|col| self.get(row, col).evaluate(values))
                    .collect()
            })
            .collect();
        PolyMatrix::from_rows(rows)
    }
}

/// Allocates unknowns.
#[derive(Debug, Default)]
pub struct UnknownPool {
    count: usize,
}

impl UnknownPool {
    pub fn new() -> Self {
        UnknownPool { count: 0 }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Generic homogeneous polynomial of the given degree (zero for negative
    /// degree or degree above `degree_bound`).
    pub fn polynomial(&mut self, degree: i64, degree_bound: Option<u32>) -> SymbolicPolynomial {
        let mut poly = SymbolicPolynomial::default();
        if degree < 0 || degree_bound.is_some_and(|bound| degree > i64::from(bound)) {
            return poly;
        }
        for monomial in Monomial::of_degree(degree as u32) {
            poly.terms.insert(monomial, LinearForm::variable(self.count));
            self.count += 1;
        }
        poly
    }

    /// Generic graded matrix `source -> target`.
    pub fn graded_matrix(
        &mut self,
        source: &TwistList,
        target: &TwistList,
        degree_bound: Option<u32>,
    ) -> SymbolicMatrix {
        let mut out = SymbolicMatrix::zeros(target.len(), source.len());
        for row in 0..target.len() {
            for col in 0..source.len() {
                *out.get_mut(row, col) = self.polynomial(target[row] - source[col], degree_bound);
            }
        }
        out
    }

    /// Generic graded matrix with a prescribed subset of entries held fixed.
    pub fn graded_matrix_with(
        &mut self,
        fixed: &GradedMatrix,
        free: impl Fn(usize, usize) -> bool,
        degree_bound: Option<u32>,
    ) -> SymbolicMatrix {
        let mut out = SymbolicMatrix::known(&fixed.matrix);
        for row in 0..fixed.target.len() {
            for col in 0..fixed.source.len() {
                if free(row, col) {
                    *out.get_mut(row, col) =
                        self.polynomial(fixed.entry_degree(row, col), degree_bound);
                }
            }
        }
        out
    }
}

/// `Σ coeffs[v] u_v = rhs`.
#[derive(Clone, Debug)]
struct Row {
    coeffs: BTreeMap<usize, NovikovSeries>,
    rhs: NovikovSeries,
    /// The equation is known only below this exponent.
    precision: Cutoff,
}

/// A linear system whose equations are known below a common precision.
/// Unknowns are assumed to have non-negative valuation when precision is
/// propagated through elimination.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    num_vars: usize,
    rows: Vec<Row>,
    data_precision: Cutoff,
}

impl LinearSystem {
    pub fn new(num_vars: usize) -> Self {
        LinearSystem {
            num_vars,
            rows: Vec::new(),
            data_precision: Cutoff::Exact,
        }
    }

    /// Caps the precision of every equation, for systems built from data
    /// truncated at `precision`.
    pub fn with_data_precision(num_vars: usize, precision: Cutoff) -> Self {
        LinearSystem {
            data_precision: precision,
            ..Self::new(num_vars)
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_equations(&self) -> usize {
        self.rows.len()
    }

    /// Adds the equation `form = 0`.
    pub fn push_zero(&mut self, form: &LinearForm) {
        if form.is_zero() {
            return;
        }
        let precision = form
            .coeffs
            .values()
            .map(NovikovSeries::cutoff)
            .fold(self.data_precision.min(form.constant.cutoff()), Cutoff::min);
        self.rows.push(Row {
            coeffs: form.coeffs.clone(),
            rhs: form.constant.negate(),
            precision,
        });
    }

    /// Adds `lhs = rhs` for every monomial of a symbolic polynomial identity.
    pub fn push_polynomial_identity(&mut self, lhs: &SymbolicPolynomial, rhs: &GradedPolynomial) {
        let mut difference = lhs.clone();
        difference.add_assign(&SymbolicPolynomial::known(rhs).negated());
        for form in difference.terms.values() {
            self.push_zero(form);
        }
    }

    pub fn push_matrix_identity(&mut self, lhs: &SymbolicMatrix, rhs: &PolyMatrix) {
        for row in 0..lhs.rows {
            for col in 0..lhs.cols {
                self.push_polynomial_identity(lhs.get(row, col), rhs.get(row, col));
            }
        }
    }

    /// Gauss-Jordan elimination. Coefficients that are exact but not monomial
    /// are truncated at `working_cutoff` before inversion.
    pub fn solve(&self, working_cutoff: Cutoff) -> Result<Vec<NovikovSeries>, SolveError> {
        let mut rows = self.rows.clone();
        let mut pivot_of_row: Vec<Option<usize>> = vec![None; rows.len()];
        loop {
            let Some((row_index, var)) = choose_pivot(&rows, &pivot_of_row) else {
                break;
            };
            let pivot = rows[row_index].coeffs[&var].clone();
            let pivot = if pivot.is_exact() && pivot.len() > 1 {
                pivot.truncate(working_cutoff)
            } else {
                pivot
            };
            let inverse = pivot.inv()?;
            let normalized = {
                let row = &rows[row_index];
                let mut coeffs = BTreeMap::new();
                for (v, c) in &row.coeffs {
                    if *v == var {
                        continue;
                    }
                    let scaled = c.mul_series(&inverse);
                    if !(scaled.is_zero() && scaled.is_exact()) {
                        coeffs.insert(*v, scaled);
                    }
                }
                Row {
                    coeffs,
                    rhs: row.rhs.mul_series(&inverse),
                    precision: row.precision.plus(inverse.order()),
                }
            };
            for (other_index, other) in rows.iter_mut().enumerate() {
                if other_index == row_index {
                    continue;
                }
                let Some(factor) = other.coeffs.remove(&var) else {
                    continue;
                };
                for (v, c) in &normalized.coeffs {
                    add_coeff(&mut other.coeffs, *v, c.mul_series(&factor).negate());
                }
                other.rhs = other.rhs.sub_series(&normalized.rhs.mul_series(&factor));
                other.precision = other.precision.min(normalized.precision.plus(factor.order()));
            }
            let mut stored = normalized;
            stored.coeffs.insert(var, NovikovSeries::one());
            rows[row_index] = stored;
            pivot_of_row[row_index] = Some(var);
        }
        let mut values = vec![NovikovSeries::exact_zero(); self.num_vars];
        for (row, pivot) in rows.iter().zip(&pivot_of_row) {
            let rhs = row.rhs.truncate(row.precision);
            match pivot {
                Some(var) => values[*var] = rhs,
                None => {
                    if !rhs.is_zero() {
                        return Err(SolveError::Inconsistent {
                            residual: rhs.to_string(),
                        });
                    }
                }
            }
        }
        Ok(values)
    }
}

fn pivot_rank(coeff: &NovikovSeries, row_len: usize) -> (crate::qseries::QExp, bool, usize, usize) {
    let valuation = coeff.valuation().unwrap_or(crate::qseries::QExp::ZERO);
    (valuation, !coeff.is_exact(), coeff.len(), row_len)
}

fn choose_pivot(rows: &[Row], pivot_of_row: &[Option<usize>]) -> Option<(usize, usize)> {
    let mut best: Option<((crate::qseries::QExp, bool, usize, usize), usize, usize)> = None;
    for (row_index, row) in rows.iter().enumerate() {
        if pivot_of_row[row_index].is_some() {
            continue;
        }
        for (var, coeff) in &row.coeffs {
            if coeff.is_zero() {
                continue;
            }
            let rank = pivot_rank(coeff, row.coeffs.len());
            let better = match &best {
                None => true,
                Some((best_rank, _, _)) => rank < *best_rank,
            };
            if better {
                best = Some((rank, row_index, *var));
            }
        }
    }
    best.map(|(_, row, var)| (row, var))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::{integer, QExp};

    #[test]
    fn solves_small_system() {
        // u0 + T u1 = 1 ; u1 = T
        let mut system = LinearSystem::new(2);
        let mut first = LinearForm::variable(0);
        first.add_assign(&LinearForm::variable(1).scaled(&NovikovSeries::monomial(
            QExp::integer(1),
            integer(1),
            Cutoff::Exact,
        )));
        first.constant = NovikovSeries::from_integer(-1);
        system.push_zero(&first);
        let mut second = LinearForm::variable(1);
        second.constant = NovikovSeries::monomial(QExp::integer(1), integer(-1), Cutoff::Exact);
        system.push_zero(&second);
        let values = system.solve(Cutoff::at(10)).unwrap();
        assert_eq!(values[1].coeff_at(1), integer(1));
        assert_eq!(values[0].constant_term(), integer(1));
        assert_eq!(values[0].coeff_at(2), integer(-1));
    }

    #[test]
    fn detects_inconsistency() {
        let mut system = LinearSystem::new(1);
        let mut first = LinearForm::variable(0);
        first.constant = NovikovSeries::from_integer(-1);
        system.push_zero(&first);
        let mut second = LinearForm::variable(0);
        second.constant = NovikovSeries::from_integer(-2);
        system.push_zero(&second);
        assert!(matches!(
            system.solve(Cutoff::at(10)),
            Err(SolveError::Inconsistent { .. })
        ));
    }
}
