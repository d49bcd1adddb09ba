//! Graded matrix factorizations of a cubic `W` and their hom complexes.
//!
//! An object is a pair `p0: P0 -> P1`, `p1: P1 -> P0(d)` with both composites
//! equal to `W · id`. Read as a quasi-periodic sequence, `K^{2i} = P0(i d)`,
//! `K^{2i+1} = P1(i d)`, `k^{2i} = p0` and `k^{2i+1} = p1`.
//!
//! A morphism of parity `j` is stored by its two components `f^0: K^0 -> L^j`
//! and `f^1: K^1 -> L^{1+j}`; `f^{i+2} = f^i(d)` fixes the rest. The
//! differential is `(df)^i = l^{i+j} f^i + (-1)^j f^{i+1} k^i`, so closed
//! degree-zero morphisms anticommute with the factorization maps.

use serde_json::{json, Value};
use thiserror::Error;

use crate::linalg::{LinearSystem, SolveError, SymbolicMatrix, UnknownPool};
use crate::matrix::{GradedMatrix, MatrixError, PolyMatrix, TwistList};
use crate::qseries::{Cutoff, QExp};
use crate::ring::GradedPolynomial;

/// Degree of the potential.
pub const POTENTIAL_DEGREE: i64 = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MfError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("data is known only below T^{available}, the check needs T^{required}")]
    Precision { available: Cutoff, required: Cutoff },
    #[error("morphism component {component} is not graded: entry ({row}, {col}) should have degree {expected}")]
    MorphismGrading {
        component: usize,
        row: usize,
        col: usize,
        expected: i64,
    },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("the cone needs a closed morphism of parity 0")]
    NotClosed,
    #[error(transparent)]
    Solve(#[from] SolveError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixFactorization {
    pub p0_twists: TwistList,
    pub p1_twists: TwistList,
    pub p0: PolyMatrix,
    pub p1: PolyMatrix,
    pub d: i64,
}

fn parity(index: i64) -> usize {
    index.rem_euclid(2) as usize
}

impl MatrixFactorization {
    pub fn new(
        p0_twists: TwistList,
        p1_twists: TwistList,
        p0: PolyMatrix,
        p1: PolyMatrix,
    ) -> Result<Self, MfError> {
        let (n0, n1) = (p0_twists.len(), p1_twists.len());
        if (p0.rows(), p0.cols()) != (n1, n0) || (p1.rows(), p1.cols()) != (n0, n1) {
            return Err(MfError::Shape(format!(
                "p0 is {}x{}, p1 is {}x{} for ranks {n0}, {n1}",
                p0.rows(),
                p0.cols(),
                p1.rows(),
                p1.cols()
            )));
        }
        Ok(MatrixFactorization {
            p0_twists,
            p1_twists,
            p0,
            p1,
            d: POTENTIAL_DEGREE,
        })
    }

    /// `K^i`.
    pub fn module(&self, index: i64) -> TwistList {
        let period = index.div_euclid(2);
        if parity(index) == 0 {
            self.p0_twists.twisted(period * self.d)
        } else {
            self.p1_twists.twisted(period * self.d)
        }
    }

    /// Matrix of `k^i`.
    pub fn map(&self, index: i64) -> &PolyMatrix {
        if parity(index) == 0 {
            &self.p0
        } else {
            &self.p1
        }
    }

    pub fn p0_graded(&self) -> GradedMatrix {
        GradedMatrix::new(self.p0.clone(), self.module(0), self.module(1))
    }

    pub fn p1_graded(&self) -> GradedMatrix {
        GradedMatrix::new(self.p1.clone(), self.module(1), self.module(2))
    }

    pub fn precision(&self) -> Cutoff {
        self.p0.precision().min(self.p1.precision())
    }

    pub fn truncate(&self, cutoff: Cutoff) -> Self {
        MatrixFactorization {
            p0: self.p0.truncate(cutoff),
            p1: self.p1.truncate(cutoff),
            ..self.clone()
        }
    }

    pub fn twist(&self, by: i64) -> Self {
        MatrixFactorization {
            p0_twists: self.p0_twists.twisted(by),
            p1_twists: self.p1_twists.twisted(by),
            ..self.clone()
        }
    }

    /// `K[1]`: `K[1]^i = K^{i+1}`, `k[1]^i = -k^{i+1}`.
    pub fn shift(&self) -> Self {
        MatrixFactorization {
            p0_twists: self.p1_twists.clone(),
            p1_twists: self.p0_twists.twisted(self.d),
            p0: self.p1.neg(),
            p1: self.p0.neg(),
            d: self.d,
        }
    }

    /// `K[-1]`.
    pub fn unshift(&self) -> Self {
        MatrixFactorization {
            p0_twists: self.p1_twists.twisted(-self.d),
            p1_twists: self.p0_twists.clone(),
            p0: self.p1.neg(),
            p1: self.p0.neg(),
            d: self.d,
        }
    }

    /// `K[n]` for any integer `n`.
    pub fn shift_by(&self, amount: i64) -> Self {
        let mut out = self.clone();
        for _ in 0..amount.abs() {
            out = if amount > 0 { out.shift() } else { out.unshift() };
        }
        out
    }

    pub fn rank(&self) -> (usize, usize) {
        (self.p0_twists.len(), self.p1_twists.len())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "P0": self.p0_twists.0,
            "P1": self.p1_twists.0,
            "p0": self.p0.to_json(),
            "p1": self.p1.to_json(),
            "d": self.d,
        })
    }
}

/// Outcome of [`mf_validate`] with the failing conditions spelled out.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub composites_ok: bool,
    pub grading_ok: bool,
    pub valuation_ok: bool,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.composites_ok && self.grading_ok && self.valuation_ok
    }
}

pub fn check_factorization(
    mf: &MatrixFactorization,
    w: &GradedPolynomial,
    cutoff: Cutoff,
) -> Result<ValidationReport, MfError> {
    let available = mf.precision().min(w.precision());
    if available < cutoff {
        return Err(MfError::Precision {
            available,
            required: cutoff,
        });
    }
    let (n0, n1) = mf.rank();
    let first = mf.p1.mul(&mf.p0)?;
    let second = mf.p0.mul(&mf.p1)?;
    let composites_ok = first.agrees_below(&PolyMatrix::scalar(n0, w), cutoff) == Some(true)
        && second.agrees_below(&PolyMatrix::scalar(n1, w), cutoff) == Some(true);
    let grading_ok = mf.p0_graded().check_grading().is_ok() && mf.p1_graded().check_grading().is_ok();
    let valuation_ok = [&mf.p0, &mf.p1].iter().all(|m| {
        m.entries()
            .all(|(_, _, p)| p.min_valuation().map_or(true, |v| !v.is_negative()))
    });
    Ok(ValidationReport {
        composites_ok,
        grading_ok,
        valuation_ok,
    })
}

/// True iff both composites equal `W · id` below the cutoff and every entry is
/// graded with non-negative valuation.
pub fn mf_validate(mf: &MatrixFactorization, w: &GradedPolynomial, cutoff: Cutoff) -> Result<bool, MfError> {
    Ok(check_factorization(mf, w, cutoff)?.passed())
}

pub fn mf_shift(mf: &MatrixFactorization) -> MatrixFactorization {
    mf.shift()
}

pub fn mf_twist(mf: &MatrixFactorization, by: i64) -> MatrixFactorization {
    mf.twist(by)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MfMorphism {
    pub parity: i64,
    pub f0: PolyMatrix,
    pub f1: PolyMatrix,
}

impl MfMorphism {
    pub fn zero(source: &MatrixFactorization, target: &MatrixFactorization, parity: i64) -> Self {
        MfMorphism {
            parity,
            f0: PolyMatrix::zeros(target.module(parity).len(), source.module(0).len()),
            f1: PolyMatrix::zeros(target.module(parity + 1).len(), source.module(1).len()),
        }
    }

    /// The closed unit `e^i = (-1)^i id`; the plain identity is not closed
    /// for the anticommuting differential.
    pub fn identity(mf: &MatrixFactorization) -> Self {
        let (n0, n1) = mf.rank();
        MfMorphism {
            parity: 0,
            f0: PolyMatrix::identity(n0),
            f1: PolyMatrix::identity(n1).neg(),
        }
    }

    /// Converts a commuting chain map `(f^0, f^1)` of parity `j` into a closed
    /// morphism for the anticommuting differential: `g^i = (-1)^{i(j+1)} f^i`.
    pub fn from_chain_map(parity: i64, f0: PolyMatrix, f1: PolyMatrix) -> Self {
        let f1 = if parity.rem_euclid(2) == 0 { f1.neg() } else { f1 };
        MfMorphism { parity, f0, f1 }
    }

    /// Matrix of `f^i`.
    pub fn component(&self, index: i64) -> &PolyMatrix {
        if parity(index) == 0 {
            &self.f0
        } else {
            &self.f1
        }
    }

    pub fn add(&self, other: &MfMorphism) -> MfMorphism {
        assert_eq!(self.parity, other.parity, "adding morphisms of different parity");
        MfMorphism {
            parity: self.parity,
            f0: self.f0.add(&other.f0),
            f1: self.f1.add(&other.f1),
        }
    }

    pub fn sub(&self, other: &MfMorphism) -> MfMorphism {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> MfMorphism {
        MfMorphism {
            parity: self.parity,
            f0: self.f0.neg(),
            f1: self.f1.neg(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.f0.is_zero() && self.f1.is_zero()
    }

    pub fn precision(&self) -> Cutoff {
        self.f0.precision().min(self.f1.precision())
    }

    pub fn truncate(&self, cutoff: Cutoff) -> MfMorphism {
        MfMorphism {
            parity: self.parity,
            f0: self.f0.truncate(cutoff),
            f1: self.f1.truncate(cutoff),
        }
    }

    pub fn agrees_below(&self, other: &MfMorphism, limit: Cutoff) -> Option<bool> {
        if self.parity != other.parity {
            return Some(false);
        }
        match (self.f0.agrees_below(&other.f0, limit), self.f1.agrees_below(&other.f1, limit)) {
            (Some(a), Some(b)) => Some(a && b),
            _ => None,
        }
    }

    /// Graded views of `f^0` and `f^1` between the given objects.
    pub fn graded_components(
        &self,
        source: &MatrixFactorization,
        target: &MatrixFactorization,
    ) -> [GradedMatrix; 2] {
        [0i64, 1].map(|index| {
            GradedMatrix::new(
                self.component(index).clone(),
                source.module(index),
                target.module(index + self.parity),
            )
        })
    }

    pub fn check_grading(
        &self,
        source: &MatrixFactorization,
        target: &MatrixFactorization,
    ) -> Result<(), MfError> {
        for (component, graded) in self.graded_components(source, target).iter().enumerate() {
            if let Err(MatrixError::Grading { row, col, expected }) = graded.check_grading() {
                return Err(MfError::MorphismGrading {
                    component,
                    row,
                    col,
                    expected,
                });
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "parity": self.parity,
            "f0": self.f0.to_json(),
            "f1": self.f1.to_json(),
        })
    }
}

fn check_shapes(
    f: &MfMorphism,
    source: &MatrixFactorization,
    target: &MatrixFactorization,
) -> Result<(), MfError> {
    for index in 0..2i64 {
        let matrix = f.component(index);
        let rows = target.module(index + f.parity).len();
        let cols = source.module(index).len();
        if (matrix.rows(), matrix.cols()) != (rows, cols) {
            return Err(MfError::Shape(format!(
                "component {index} is {}x{}, expected {rows}x{cols}",
                matrix.rows(),
                matrix.cols()
            )));
        }
    }
    Ok(())
}

/// `(df)^i = l^{i+j} f^i + (-1)^j f^{i+1} k^i`.
pub fn hom_diff(
    f: &MfMorphism,
    source: &MatrixFactorization,
    target: &MatrixFactorization,
) -> Result<MfMorphism, MfError> {
    check_shapes(f, source, target)?;
    f.check_grading(source, target)?;
    let sign_flip = parity(f.parity) == 1;
    let component = |index: i64| -> Result<PolyMatrix, MfError> {
        let left = target.map(index + f.parity).mul(f.component(index))?;
        let right = f.component(index + 1).mul(source.map(index))?;
        Ok(if sign_flip { left.sub(&right) } else { left.add(&right) })
    };
    Ok(MfMorphism {
        parity: f.parity + 1,
        f0: component(0)?,
        f1: component(1)?,
    })
}

/// Composite `g ∘ f` of `f: K -> L` (parity `j`) and `g: L -> N` (parity
/// `k`): `(g f)^i = (-1)^{i + j(k+1)} g^{i+j} f^i`. Closed inputs give a
/// closed output and the unit `e` is two-sided.
pub fn compose(g: &MfMorphism, f: &MfMorphism) -> Result<MfMorphism, MfError> {
    let base = if parity(f.parity * (g.parity + 1)) == 1 { -1 } else { 1 };
    let signed = |matrix: PolyMatrix, sign: i64| if sign < 0 { matrix.neg() } else { matrix };
    Ok(MfMorphism {
        parity: f.parity + g.parity,
        f0: signed(g.component(f.parity).mul(&f.f0)?, base),
        f1: signed(g.component(f.parity + 1).mul(&f.f1)?, -base),
    })
}

/// Mapping cone on `L^i ⊕ K^{i+1}`. With the anticommuting differential the
/// off-diagonal block carries the sign `(-1)^{i+1}`:
/// `c^i = [[l^i, (-1)^{i+1} f^{i+1}], [0, -k^{i+1}]]`.
pub fn mf_cone(
    f: &MfMorphism,
    source: &MatrixFactorization,
    target: &MatrixFactorization,
    cutoff: Cutoff,
) -> Result<MatrixFactorization, MfError> {
    if f.parity != 0 || !hom_diff(f, source, target)?.truncate(cutoff).is_zero() {
        return Err(MfError::NotClosed);
    }
    let zero_block = |rows: usize, cols: usize| PolyMatrix::zeros(rows, cols);
    let (l0, l1) = target.rank();
    let (k0, k1) = source.rank();
    let c0 = PolyMatrix::block(&target.p0, &f.f1.neg(), &zero_block(k0, l0), &source.p1.neg());
    let c1 = PolyMatrix::block(&target.p1, &f.f0, &zero_block(k1, l1), &source.p0.neg());
    MatrixFactorization::new(
        target.p0_twists.concat(&source.p1_twists),
        target.p1_twists.concat(&source.p0_twists.twisted(source.d)),
        c0,
        c1,
    )
}

/// Result of a bounded null-homotopy search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NullHomotopy {
    Found(MfMorphism),
    NotFound,
}

/// Working precision above `cutoff` for systems built from exact data.
pub const SOLVER_MARGIN: i64 = 8;

/// Searches for `h` of parity `j - 1` with `dh = f`, entries of polynomial
/// degree at most `degree_bound`, verified below `cutoff`.
pub fn is_null_homotopic(
    f: &MfMorphism,
    source: &MatrixFactorization,
    target: &MatrixFactorization,
    degree_bound: u32,
    cutoff: QExp,
) -> Result<NullHomotopy, MfError> {
    check_shapes(f, source, target)?;
    let limit = Cutoff::Finite(cutoff);
    if f.truncate(limit).is_zero() {
        return Ok(NullHomotopy::Found(MfMorphism::zero(source, target, f.parity - 1)));
    }
    let parity_h = f.parity - 1;
    let mut pool = UnknownPool::new();
    let h0 = pool.graded_matrix(&source.module(0), &target.module(parity_h), Some(degree_bound));
    let h1 = pool.graded_matrix(&source.module(1), &target.module(parity_h + 1), Some(degree_bound));
    let flip = parity(parity_h) == 1;
    let combine = |left: SymbolicMatrix, right: SymbolicMatrix| {
        let mut out = left;
        out.add_assign(&if flip { right.negated() } else { right });
        out
    };
    let d0 = combine(h0.left_mul(target.map(parity_h)), h1.right_mul(source.map(0)));
    let d1 = combine(h1.left_mul(target.map(parity_h + 1)), h0.right_mul(source.map(1)));
    let precision = source.precision().min(target.precision()).min(f.precision());
    let mut system = LinearSystem::with_data_precision(pool.count(), precision);
    system.push_matrix_identity(&d0, &f.f0);
    system.push_matrix_identity(&d1, &f.f1);
    let working = match precision {
        Cutoff::Exact => Cutoff::Finite(cutoff + QExp::integer(SOLVER_MARGIN)),
        finite => finite,
    };
    let values = match system.solve(working) {
        Ok(values) => values,
        Err(SolveError::Inconsistent { .. }) => return Ok(NullHomotopy::NotFound),
        Err(other) => return Err(other.into()),
    };
    let h = MfMorphism {
        parity: parity_h,
        f0: h0.evaluate(&values).truncate(limit),
        f1: h1.evaluate(&values).truncate(limit),
    };
    match hom_diff(&h, source, target)?.agrees_below(f, limit) {
        Some(true) => Ok(NullHomotopy::Found(h)),
        Some(false) => Ok(NullHomotopy::NotFound),
        None => Err(MfError::Precision {
            available: f.precision(),
            required: limit,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{Monomial, Var};

    fn toy() -> (MatrixFactorization, GradedPolynomial) {
        let x = GradedPolynomial::var(Var::X);
        let x2 = GradedPolynomial::term(Monomial::new(2, 0, 0), crate::qseries::NovikovSeries::one());
        let w = x.mul(&x2);
        let mf = MatrixFactorization::new(
            TwistList::new(vec![0]),
            TwistList::new(vec![1]),
            PolyMatrix::from_rows(vec![vec![x]]),
            PolyMatrix::from_rows(vec![vec![x2]]),
        )
        .unwrap();
        (mf, w)
    }

    #[test]
    fn rank_one_toy_factorization() {
        let (mf, w) = toy();
        assert!(mf_validate(&mf, &w, Cutoff::at(10)).unwrap());
        assert!(mf_validate(&mf.shift(), &w, Cutoff::at(10)).unwrap());
        assert_eq!(mf.shift().shift(), mf.twist(3));
        assert_eq!(mf.shift().unshift(), mf);
    }

    #[test]
    fn identity_is_closed_and_cone_is_contractible() {
        let (mf, w) = toy();
        let id = MfMorphism::identity(&mf);
        assert!(hom_diff(&id, &mf, &mf).unwrap().is_zero());
        let cone = mf_cone(&id, &mf, &mf, Cutoff::at(10)).unwrap();
        assert!(mf_validate(&cone, &w, Cutoff::at(10)).unwrap());
        let id_cone = MfMorphism::identity(&cone);
        let result = is_null_homotopic(&id_cone, &cone, &cone, 2, QExp::integer(10)).unwrap();
        assert!(matches!(result, NullHomotopy::Found(_)));
        let not = is_null_homotopic(&id, &mf, &mf, 2, QExp::integer(10)).unwrap();
        assert_eq!(not, NullHomotopy::NotFound);
    }
}
