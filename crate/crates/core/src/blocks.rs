//! The two alternating 4×4 blocks shared by both pipelines, and the
//! factorizations `M₀`, `M₁` they define.
//!
//! Basis order is the distinguished summand first, then the `x`, `y`, `z`
//! summands.

use crate::matrix::{PolyMatrix, TwistList};
use crate::mfcat::{MatrixFactorization, MfError};
use crate::qseries::{Cutoff, NovikovSeries, QExp, SeriesError};
use crate::ring::{build_w, GradedPolynomial, Monomial, NamedSeriesBundle, RingError, Var};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BlockError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Mf(#[from] MfError),
}

/// Extra precision used while dividing by `α`.
const DIVISION_MARGIN: i64 = 2;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorizationBlocks {
    pub cutoff: QExp,
    pub bundle: NamedSeriesBundle,
    /// First row `(0 x y z)`, skew part `w/α`.
    pub even: PolyMatrix,
    /// First row `(0 w_x w_y w_z)`, skew part `α`-linear.
    pub odd: PolyMatrix,
}

fn skew(entries: [&GradedPolynomial; 3]) -> [[GradedPolynomial; 3]; 3] {
    let zero = GradedPolynomial::zero();
    let [ex, ey, ez] = entries;
    [
        [zero.clone(), ez.clone(), ey.neg()],
        [ez.neg(), zero.clone(), ex.clone()],
        [ey.clone(), ex.neg(), zero],
    ]
}

fn bordered(border: [&GradedPolynomial; 3], inner: [[GradedPolynomial; 3]; 3]) -> PolyMatrix {
    let mut rows = vec![vec![GradedPolynomial::zero()]];
    rows[0].extend(border.iter().map(|p| (*p).clone()));
    for (index, inner_row) in inner.into_iter().enumerate() {
        let mut row = vec![border[index].clone()];
        row.extend(inner_row);
        rows.push(row);
    }
    PolyMatrix::from_rows(rows)
}

impl FactorizationBlocks {
    pub fn new(cutoff: QExp) -> Result<Self, BlockError> {
        let limit = Cutoff::Finite(cutoff);
        let wide = build_w(cutoff + QExp::integer(DIVISION_MARGIN))?;
        let inverse_alpha = wide.alpha.inv()?;
        let over_alpha = |var: Var| wide.w_component(var).scale(&inverse_alpha).truncate(limit);
        let (wx_a, wy_a, wz_a) = (over_alpha(Var::X), over_alpha(Var::Y), over_alpha(Var::Z));
        let linear = |var: Var| GradedPolynomial::var(var);
        let (x, y, z) = (linear(Var::X), linear(Var::Y), linear(Var::Z));
        // Skew part of the even block: rows (0, wz, -wy), (-wz, 0, wx), (wy, -wx, 0) over α.
        let even = bordered([&x, &y, &z], skew([&wx_a, &wy_a, &wz_a]));
        let alpha_times = |var: Var| {
            GradedPolynomial::term(Monomial::var(var), wide.alpha.truncate(limit))
        };
        let (ax, ay, az) = (alpha_times(Var::X), alpha_times(Var::Y), alpha_times(Var::Z));
        // Skew part of the odd block: rows (0, -αz, αy), (αz, 0, -αx), (-αy, αx, 0).
        let odd_inner = skew([&ax, &ay, &az]).map(|row| row.map(|p| p.neg()));
        let bundle = build_w(cutoff)?;
        let odd = bordered([&bundle.wx, &bundle.wy, &bundle.wz], odd_inner);
        Ok(FactorizationBlocks {
            cutoff,
            bundle,
            even,
            odd,
        })
    }

    pub fn w(&self) -> &GradedPolynomial {
        &self.bundle.w
    }

    /// Rows `1..4` of the odd block.
    pub fn odd_tail(&self) -> PolyMatrix {
        self.odd.submatrix(1..4, 0..4)
    }

    /// `M₀`: `R ⊕ R(-1)^3 -> R ⊕ R(1)^3 -> R(3) ⊕ R(2)^3`.
    pub fn m0(&self) -> MatrixFactorization {
        self.factorization(TwistList::new(vec![0, -1, -1, -1]))
    }

    /// `M₁`: `R(1) ⊕ R^3 -> R(1) ⊕ R(2)^3 -> R(4) ⊕ R(3)^3`.
    pub fn m1(&self) -> MatrixFactorization {
        self.factorization(TwistList::new(vec![1, 0, 0, 0]))
    }

    /// The factorization `(even, odd)` with the given even twists.
    pub fn factorization(&self, p0_twists: TwistList) -> MatrixFactorization {
        let p1_twists = TwistList::new(vec![
            p0_twists[0],
            p0_twists[1] + 2,
            p0_twists[2] + 2,
            p0_twists[3] + 2,
        ]);
        MatrixFactorization::new(p0_twists, p1_twists, self.even.clone(), self.odd.clone())
            .expect("4x4 blocks have consistent shapes")
    }
}

/// `T^exponent` as an exact series.
pub fn t_power(exponent: i64) -> NovikovSeries {
    NovikovSeries::monomial(QExp::integer(exponent), crate::qseries::integer(1), Cutoff::Exact)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mfcat::mf_validate;
    use crate::ring::constant_coefficient;

    #[test]
    fn blocks_factor_w() {
        let blocks = FactorizationBlocks::new(QExp::integer(60)).unwrap();
        let w = blocks.w();
        assert!(mf_validate(&blocks.m0(), w, Cutoff::at(60)).unwrap());
        assert!(mf_validate(&blocks.m1(), w, Cutoff::at(60)).unwrap());
    }

    #[test]
    fn even_block_leading_entries() {
        let blocks = FactorizationBlocks::new(QExp::integer(30)).unwrap();
        let entry = blocks.even.get(1, 2);
        assert_eq!(constant_coefficient(entry, Monomial::new(1, 1, 0)), crate::qseries::integer(-1));
        assert_eq!(blocks.m0().p1_twists, TwistList::new(vec![0, 1, 1, 1]));
    }
}
