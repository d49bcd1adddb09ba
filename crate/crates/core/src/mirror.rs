//! Both functors on the generating objects `O(−i)`, `O(−i+1)` and the
//! morphisms `x, y, z, x*, y*, z*`, and the comparison between them.

use num_rational::Rational64;
use serde_json::{json, Value};
use thiserror::Error;

use crate::fukaya::{
    apply_symplectomorphism, morphism_strips, strip_matrix, FukayaError, FloerGenerator,
    LinearLagrangian, SeidelConfig, StripComplex, SymplectoImage,
};
use crate::linalg::{LinearSystem, SolveError, SymbolicMatrix, UnknownPool};
use crate::matrix::{GradedMatrix, PolyMatrix, TwistList};
use crate::mfcat::{
    is_null_homotopic, mf_validate, MatrixFactorization, MfError, MfMorphism, NullHomotopy,
    POTENTIAL_DEGREE, SOLVER_MARGIN,
};
use crate::orlov::{constant_pattern, Generator, OrlovError, OrlovPipeline};
use crate::qseries::{Coeff, Cutoff, NovikovSeries, QExp};
use crate::ring::{GradedPolynomial, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MirrorError {
    #[error("twist {0} of generator {1} is not an integer")]
    NonIntegralTwist(Rational64, String),
    #[error(transparent)]
    Fukaya(#[from] FukayaError),
    #[error(transparent)]
    Orlov(#[from] OrlovError),
    #[error(transparent)]
    Mf(#[from] MfError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Twists `−kd/2 − (d/2)α_g` (even) and `(1−k)d/2 − (d/2)α_g` (odd) with
/// the character `α_{−j} = −2j/3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GradingRecipe {
    pub d: i64,
}

impl Default for GradingRecipe {
    fn default() -> Self {
        GradingRecipe {
            d: POTENTIAL_DEGREE,
        }
    }
}

impl GradingRecipe {
    pub fn character(&self, label: i64) -> Rational64 {
        Rational64::new(2 * label, 3)
    }

    pub fn twist(&self, generator: &FloerGenerator) -> Result<i64, MirrorError> {
        let half_d = Rational64::new(self.d, 2);
        let k = Rational64::from_integer(generator.degree);
        let base = if generator.is_even() { -k } else { Rational64::from_integer(1) - k };
        let value = half_d * base - half_d * self.character(generator.branch_label());
        if !value.is_integer() {
            return Err(MirrorError::NonIntegralTwist(value, generator.name.clone()));
        }
        Ok(value.to_integer())
    }
}

/// Wraps the strip matrices with the recipe's twist lists.
pub fn grade_mf(complex: &StripComplex, recipe: &GradingRecipe) -> Result<MatrixFactorization, MirrorError> {
    let twists = |generators: &[FloerGenerator]| -> Result<TwistList, MirrorError> {
        Ok(TwistList::new(
            generators.iter().map(|g| recipe.twist(g)).collect::<Result<_, _>>()?,
        ))
    };
    Ok(MatrixFactorization::new(
        twists(&complex.even)?,
        twists(&complex.odd)?,
        complex.even_to_odd.clone(),
        complex.odd_to_even.clone(),
    )?)
}

/// `L_(1,n)` through the origin.
pub fn pz_lagrangian(slope: i64) -> Result<LinearLagrangian, FukayaError> {
    LinearLagrangian::through(1, slope, Rational64::from_integer(0))
}

/// Image of a Lagrangian under the localized mirror functor after `𝒮_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FukayaObject {
    pub image: SymplectoImage,
    pub complex: StripComplex,
    pub factorization: MatrixFactorization,
}

/// `𝒮_i`, then `m₁` on `CF((𝕃, b), ·)`, graded by the recipe; the shift of
/// `𝒮_i` is applied to the factorization at the end.
pub fn lm_object(
    config: &SeidelConfig,
    index: i64,
    lagrangian: &LinearLagrangian,
    cutoff: QExp,
) -> Result<FukayaObject, MirrorError> {
    let image = apply_symplectomorphism(index, lagrangian);
    let unshifted = image.lagrangian.clone().shifted(-image.grading_shift);
    let complex = strip_matrix(config, &unshifted, cutoff)?;
    let factorization = grade_mf(&complex, &GradingRecipe::default())?.shift_by(image.grading_shift);
    Ok(FukayaObject {
        image,
        complex,
        factorization,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SheafObject {
    /// `O(−i)`.
    Structure,
    /// `O(−i+1)`.
    Next,
}

pub fn orlov_object(
    pipeline: &OrlovPipeline,
    index: i64,
    which: SheafObject,
) -> Result<MatrixFactorization, MirrorError> {
    let base = match which {
        SheafObject::Structure => pipeline.object_o()?,
        SheafObject::Next => pipeline.object_o1()?,
    };
    Ok(base.twist(-index))
}

/// Exponent of the smallest polygon with a non-constant output.
pub const MINIMAL_POLYGON_EXPONENT: i64 = 1;

/// A closed morphism whose degree-zero entries agree with the given
/// constants modulo `T^{MINIMAL_POLYGON_EXPONENT}`.
pub fn closed_extension(
    constants: &MfMorphism,
    source: &MatrixFactorization,
    target: &MatrixFactorization,
    cutoff: QExp,
) -> Result<Option<MfMorphism>, MirrorError> {
    let parity = constants.parity;
    let limit = Cutoff::Finite(cutoff);
    let mut pool = UnknownPool::new();
    let [graded0, graded1] = constants.graded_components(source, target);
    let step = GradedPolynomial::constant(NovikovSeries::monomial(
        QExp::integer(MINIMAL_POLYGON_EXPONENT),
        crate::qseries::integer(1),
        Cutoff::Exact,
    ));
    let mut symbolic = |graded: &GradedMatrix| {
        let mut out = pool.graded_matrix_with(graded, |row, col| graded.entry_degree(row, col) != 0, None);
        for row in 0..graded.target.len() {
            for col in 0..graded.source.len() {
                if graded.entry_degree(row, col) == 0 {
                    let correction = pool.polynomial(0, None).mul_known(&step);
                    out.get_mut(row, col).add_assign(&correction);
                }
            }
        }
        out
    };
    let (f0, f1) = (symbolic(&graded0), symbolic(&graded1));
    let flip = parity.rem_euclid(2) == 1;
    let combine = |left: SymbolicMatrix, right: SymbolicMatrix| {
        let mut out = left;
        out.add_assign(&if flip { right.negated() } else { right });
        out
    };
    let d0 = combine(f0.left_mul(target.map(parity)), f1.right_mul(source.map(0)));
    let d1 = combine(f1.left_mul(target.map(parity + 1)), f0.right_mul(source.map(1)));
    let precision = source.precision().min(target.precision());
    let mut system = LinearSystem::with_data_precision(pool.count(), precision);
    system.push_matrix_identity(&d0, &PolyMatrix::zeros(d0.rows, d0.cols));
    system.push_matrix_identity(&d1, &PolyMatrix::zeros(d1.rows, d1.cols));
    let working = match precision {
        Cutoff::Exact => Cutoff::Finite(cutoff + QExp::integer(SOLVER_MARGIN)),
        finite => finite,
    };
    let values = match system.solve(working) {
        Ok(values) => values,
        Err(SolveError::Inconsistent { .. }) => return Ok(None),
        Err(other) => return Err(other.into()),
    };
    Ok(Some(MfMorphism {
        parity,
        f0: f0.evaluate(&values).truncate(limit),
        f1: f1.evaluate(&values).truncate(limit),
    }))
}

/// Area-zero entries of `LM(w)` placed in the two components.
pub fn fukaya_constants(
    config: &SeidelConfig,
    source: &FukayaObject,
    target: &FukayaObject,
    corner: Var,
) -> Result<MfMorphism, MirrorError> {
    let entries = morphism_strips(config, &source.complex, &target.complex, corner)?;
    let degree = crate::fukaya::intersection_degree(
        &source.complex.lagrangian,
        &target.complex.lagrangian,
    )?;
    let mut morphism = MfMorphism::zero(&source.factorization, &target.factorization, degree);
    let locate = |complex: &StripComplex, name: &str| -> (i64, usize) {
        if let Some(index) = complex.even.iter().position(|g| g.name == name) {
            (0, index)
        } else {
            let index = complex.odd.iter().position(|g| g.name == name).expect("generator exists");
            (1, index)
        }
    };
    for entry in entries {
        let (component, col) = locate(&source.complex, &entry.from);
        let (_, row) = locate(&target.complex, &entry.to);
        let matrix = if component == 0 { &mut morphism.f0 } else { &mut morphism.f1 };
        matrix.set(row, col, GradedPolynomial::integer_constant(entry.value));
    }
    Ok(morphism)
}

/// Constant terms of degree-zero entries, with `None` off degree zero.
fn constant_terms(
    morphism: &MfMorphism,
    source: &MatrixFactorization,
    target: &MatrixFactorization,
) -> Vec<Vec<Vec<Option<Coeff>>>> {
    morphism
        .graded_components(source, target)
        .iter()
        .map(|graded| {
            constant_pattern(graded)
                .into_iter()
                .map(|row| row.into_iter().map(|entry| entry.map(|series| series.constant_term())).collect())
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comparison {
    pub name: String,
    pub kind: &'static str,
    pub twist_match: bool,
    pub matrix_match: bool,
    pub constant_match: Option<bool>,
    pub homotopy_match: Option<bool>,
}

impl Comparison {
    pub fn passed(&self) -> bool {
        match self.kind {
            "object" => self.twist_match && self.matrix_match,
            _ => self.twist_match && self.constant_match == Some(true) && self.homotopy_match == Some(true),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "kind": self.kind,
            "twist_match": self.twist_match,
            "matrix_match": self.matrix_match,
            "constant_match": self.constant_match,
            "homotopy_match": self.homotopy_match,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramReport {
    pub index: i64,
    pub cutoff: QExp,
    pub degree_bound: u32,
    pub j: i64,
    pub rotation: i64,
    pub nominal_shift: i64,
    pub grading_shift: i64,
    pub comparisons: Vec<Comparison>,
}

impl DiagramReport {
    pub fn pass(&self) -> bool {
        self.comparisons.iter().all(Comparison::passed)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "index": self.index,
            "cutoff": self.cutoff.to_string(),
            "degree_bound": self.degree_bound,
            "normalization": { "twist": 0, "parity": 0 },
            "symplectomorphism": {
                "j": self.j,
                "rotation": self.rotation,
                "nominal_shift": self.nominal_shift,
                "grading_shift": self.grading_shift,
            },
            "comparisons": self.comparisons.iter().map(Comparison::to_json).collect::<Vec<_>>(),
            "pass": self.pass(),
        })
    }
}

/// Both pipelines on the generators at index `i`.
pub struct DiagramData {
    pub orlov_objects: [MatrixFactorization; 2],
    pub fukaya_objects: [FukayaObject; 2],
    pub orlov_morphisms: Vec<(Generator, MfMorphism)>,
    pub fukaya_constants: Vec<(Generator, MfMorphism)>,
}

pub fn diagram_data(
    config: &SeidelConfig,
    index: i64,
    cutoff: QExp,
) -> Result<DiagramData, MirrorError> {
    let orlov = || -> Result<_, MirrorError> {
        let pipeline = OrlovPipeline::new(cutoff)?;
        let objects = [
            orlov_object(&pipeline, index, SheafObject::Structure)?,
            orlov_object(&pipeline, index, SheafObject::Next)?,
        ];
        let morphisms = Generator::ALL
            .iter()
            .map(|g| Ok((*g, pipeline.lift(*g)?.morphism)))
            .collect::<Result<Vec<_>, MirrorError>>()?;
        Ok((objects, morphisms))
    };
    let fukaya = || -> Result<_, MirrorError> {
        let objects = [
            lm_object(config, index, &pz_lagrangian(3 * index)?, cutoff)?,
            lm_object(config, index, &pz_lagrangian(3 * index - 3)?, cutoff)?,
        ];
        let constants = Generator::ALL
            .iter()
            .map(|g| {
                let (source, target) = if g.is_dual() { (&objects[1], &objects[0]) } else { (&objects[0], &objects[1]) };
                Ok((*g, fukaya_constants(config, source, target, g.variable())?))
            })
            .collect::<Result<Vec<_>, MirrorError>>()?;
        Ok((objects, constants))
    };
    #[cfg(feature = "parallel")]
    let (orlov_side, fukaya_side) = rayon::join(orlov, fukaya);
    #[cfg(not(feature = "parallel"))]
    let (orlov_side, fukaya_side) = (orlov(), fukaya());
    let (orlov_objects, orlov_morphisms) = orlov_side?;
    let (fukaya_objects, fukaya_constants) = fukaya_side?;
    Ok(DiagramData {
        orlov_objects,
        fukaya_objects,
        orlov_morphisms,
        fukaya_constants,
    })
}

fn compare_objects(name: &str, orlov: &MatrixFactorization, fukaya: &MatrixFactorization, limit: Cutoff) -> Comparison {
    let twist_match = orlov.p0_twists == fukaya.p0_twists && orlov.p1_twists == fukaya.p1_twists;
    let matrix_match = orlov.p0.agrees_below(&fukaya.p0, limit) == Some(true)
        && orlov.p1.agrees_below(&fukaya.p1, limit) == Some(true);
    Comparison {
        name: name.to_string(),
        kind: "object",
        twist_match,
        matrix_match,
        constant_match: None,
        homotopy_match: None,
    }
}

/// Precision computed above the reported cutoff, spent by elimination
/// against pivots of positive valuation.
pub const HOMOTOPY_MARGIN: i64 = 16;

/// Objects and morphisms produced by one side of the diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctorImage {
    pub provenance: &'static str,
    pub objects: Vec<(String, MatrixFactorization)>,
    pub morphisms: Vec<(String, MfMorphism)>,
}

impl FunctorImage {
    pub fn morphism(&self, name: &str) -> Option<&MfMorphism> {
        self.morphisms.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }
}

const OBJECT_NAMES: [&str; 2] = ["O", "O(1)"];

impl DiagramData {
    pub fn endpoints(&self, generator: Generator) -> (&MatrixFactorization, &MatrixFactorization) {
        let (source, target) = if generator.is_dual() { (1, 0) } else { (0, 1) };
        (
            &self.fukaya_objects[source].factorization,
            &self.fukaya_objects[target].factorization,
        )
    }

    /// Closed extension of the area-zero entries for one generator.
    pub fn fukaya_morphism(&self, generator: Generator, cutoff: QExp) -> Result<Option<MfMorphism>, MirrorError> {
        let (source, target) = self.endpoints(generator);
        let (_, constants) = self
            .fukaya_constants
            .iter()
            .find(|(g, _)| *g == generator)
            .expect("all generators present");
        if constants.check_grading(source, target).is_err() {
            return Ok(None);
        }
        closed_extension(constants, source, target, cutoff)
    }

    pub fn images(&self, cutoff: QExp) -> Result<[FunctorImage; 2], MirrorError> {
        let orlov = FunctorImage {
            provenance: "orlov",
            objects: OBJECT_NAMES.iter().map(|n| n.to_string()).zip(self.orlov_objects.iter().cloned()).collect(),
            morphisms: self.orlov_morphisms.iter().map(|(g, m)| (g.name().to_string(), m.clone())).collect(),
        };
        let mut morphisms = Vec::new();
        for generator in Generator::ALL {
            if let Some(morphism) = self.fukaya_morphism(generator, cutoff)? {
                morphisms.push((generator.name().to_string(), morphism));
            }
        }
        let fukaya = FunctorImage {
            provenance: "fukaya",
            objects: OBJECT_NAMES
                .iter()
                .map(|n| n.to_string())
                .zip(self.fukaya_objects.iter().map(|o| o.factorization.clone()))
                .collect(),
            morphisms,
        };
        Ok([orlov, fukaya])
    }
}

/// `ℒℳ ∘ 𝒮_i` against `𝒢_i ∘ Φ` on objects and morphisms.
pub fn diagram_check_with(
    config: &SeidelConfig,
    index: i64,
    cutoff: QExp,
    degree_bound: u32,
) -> Result<DiagramReport, MirrorError> {
    let limit = Cutoff::Finite(cutoff);
    let working = cutoff + QExp::integer(HOMOTOPY_MARGIN);
    let data = diagram_data(config, index, working)?;
    let mut comparisons: Vec<Comparison> = OBJECT_NAMES
        .iter()
        .zip(data.orlov_objects.iter().zip(&data.fukaya_objects))
        .map(|(name, (orlov, fukaya))| compare_objects(name, orlov, &fukaya.factorization, limit))
        .collect();
    for ((generator, orlov), (_, constants)) in data.orlov_morphisms.iter().zip(&data.fukaya_constants) {
        let (fukaya_source, fukaya_target) = data.endpoints(*generator);
        let twist_match = orlov.parity.rem_euclid(2) == constants.parity.rem_euclid(2)
            && orlov.check_grading(fukaya_source, fukaya_target).is_ok()
            && constants.check_grading(fukaya_source, fukaya_target).is_ok();
        let constant_match = twist_match
            && constant_terms(orlov, fukaya_source, fukaya_target)
                == constant_terms(constants, fukaya_source, fukaya_target);
        let extended = if twist_match { data.fukaya_morphism(*generator, working)? } else { None };
        let (matrix_match, homotopy_match) = match &extended {
            Some(full) => {
                let difference = full.sub(orlov).truncate(limit);
                let homotopic = matches!(
                    is_null_homotopic(&difference, fukaya_source, fukaya_target, degree_bound, cutoff)?,
                    NullHomotopy::Found(_)
                );
                (full.agrees_below(orlov, limit) == Some(true), homotopic)
            }
            None => (false, false),
        };
        comparisons.push(Comparison {
            name: generator.name().to_string(),
            kind: "morphism",
            twist_match,
            matrix_match,
            constant_match: Some(constant_match),
            homotopy_match: Some(homotopy_match),
        });
    }
    let image = &data.fukaya_objects[0].image;
    Ok(DiagramReport {
        index,
        cutoff,
        degree_bound,
        j: image.j,
        rotation: image.rotation,
        nominal_shift: image.nominal_shift,
        grading_shift: image.grading_shift,
        comparisons,
    })
}

pub fn diagram_check(index: i64, cutoff: QExp, degree_bound: u32) -> Result<DiagramReport, MirrorError> {
    diagram_check_with(&SeidelConfig::standard(), index, cutoff, degree_bound)
}

/// Every object produced on either side factors `W`.
pub fn validate_objects(data: &DiagramData, w: &GradedPolynomial, limit: Cutoff) -> Result<bool, MirrorError> {
    let mut all = true;
    for mf in data.orlov_objects.iter().chain(data.fukaya_objects.iter().map(|o| &o.factorization)) {
        all &= mf_validate(mf, w, limit)?;
    }
    Ok(all)
}
