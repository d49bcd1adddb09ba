use lgcy_core::blocks::FactorizationBlocks;
use lgcy_core::fukaya::{
    addition_formula_sides, apply_symplectomorphism, enumerate_decorated_polygons, standard_triangle_counts,
    strip_matrix, unit_output_name, Direction, FloerGenerator, GeneratorKind, SeidelConfig,
};
use lgcy_core::mfcat::{compose, is_null_homotopic, NullHomotopy};
use lgcy_core::mirror::{
    diagram_check_with, diagram_data, grade_mf, lm_object, orlov_object, pz_lagrangian, GradingRecipe, MirrorError,
    SheafObject, HOMOTOPY_MARGIN,
};
use lgcy_core::orlov::OrlovPipeline;
use lgcy_core::qseries::{integer, QExp};
use lgcy_core::ring::build_w;
use lgcy_core::{Cutoff, Monomial};
use num_rational::Rational64;

fn ratio(numer: i64, denom: i64) -> Rational64 {
    Rational64::new(numer, denom)
}

#[test]
fn decimal_cutoffs_are_exact() {
    assert_eq!(QExp::parse_decimal("0.5").unwrap(), QExp::new(1, 2));
    assert_eq!(QExp::parse_decimal("200").unwrap(), QExp::integer(200));
}

#[test]
fn potential_below_first_exponent_is_empty() {
    let bundle = build_w(QExp::new(1, 2)).unwrap();
    assert!(bundle.w.is_zero() && bundle.phi.is_zero() && bundle.psi.is_zero());
    assert_eq!(bundle.sign_s, None);
}

#[test]
fn branch_phases() {
    let phase = |a, b| Direction::new(a, b).unwrap().phase();
    assert_eq!(phase(1, 2), Some(ratio(1, 2)));
    assert_eq!(phase(1, -1), Some(ratio(-1, 6)));
    assert_eq!(phase(-2, -1), Some(ratio(-5, 6)));
    assert_eq!(phase(1, 0), Some(ratio(0, 1)));
    assert_eq!(phase(1, -2), None);
}

#[test]
fn symplectomorphism_images() {
    let config = SeidelConfig::standard();
    let vertical = apply_symplectomorphism(0, &pz_lagrangian(0).unwrap());
    assert_eq!(vertical.lagrangian.direction.vector(), (1, 2));
    assert_eq!(vertical.lagrangian.offset, config.branches[0].offset);
    let rotated = apply_symplectomorphism(0, &pz_lagrangian(-3).unwrap());
    assert_eq!(rotated.lagrangian.direction, config.branches[1].direction);
    assert_eq!(rotated.lagrangian.offset, config.branches[1].offset);
    for index in -6..=6 {
        let image = apply_symplectomorphism(index, &pz_lagrangian(3 * index).unwrap());
        assert_eq!(image.before_rotation.direction.vector(), (1, 2));
        assert_eq!(image.grading_shift, 2 * image.j);
        assert_eq!(image.nominal_shift, -image.j);
    }
}

#[test]
fn triangles_below_smallest_area_keep_only_the_degenerate_term() {
    let counts = standard_triangle_counts(QExp::new(1, 8)).unwrap();
    let first = counts.series("q(0,0)", Monomial::ONE);
    assert_eq!(first.len(), 1);
    assert_eq!(first.coeff_at(0), integer(1));
    assert!(counts.series("q(1/2,0)", Monomial::ONE).is_zero());
}

#[test]
fn triangle_areas_are_quarter_squares() {
    let counts = standard_triangle_counts(QExp::integer(10)).unwrap();
    let half = counts.series("q(1/2,0)", Monomial::ONE);
    for exponent in [QExp::new(1, 4), QExp::new(9, 4), QExp::new(25, 4)] {
        assert_eq!(half.coeff(exponent).unwrap(), integer(2));
    }
    let origin = counts.series("q(0,0)", Monomial::ONE);
    for exponent in [1, 4, 9] {
        assert_eq!(origin.coeff_at(exponent), integer(2));
    }
}

#[test]
fn addition_formula_needs_the_doubled_nome() {
    let (left, right) = addition_formula_sides(QExp::integer(20), 2);
    assert!(left.agrees_with(&right));
    let (left, right) = addition_formula_sides(QExp::integer(20), 1);
    assert!(!left.agrees_with(&right));
}

#[test]
fn decorated_polygons_have_positive_area_and_no_mixed_cubic() {
    let config = SeidelConfig::standard();
    for output in 0..3 {
        let counts = enumerate_decorated_polygons(&config, output, QExp::integer(60));
        let name = unit_output_name(output);
        for monomial in counts.monomials(&name) {
            assert!(counts.series(&name, monomial).iter().all(|(exponent, _)| exponent.is_positive()));
        }
        assert!(counts.series(&name, Monomial::new(2, 1, 0)).is_zero());
        assert_eq!(counts.series(&name, Monomial::new(3, 0, 0)).coeff_at(9), integer(-1));
    }
}

#[test]
fn strip_generator_degrees() {
    let config = SeidelConfig::standard();
    let image = apply_symplectomorphism(0, &pz_lagrangian(0).unwrap());
    let complex = strip_matrix(&config, &image.lagrangian, QExp::integer(20)).unwrap();
    assert_eq!(complex.even.iter().map(|g| g.degree).collect::<Vec<_>>(), [0, 2, 2, 2]);
    assert!(complex.odd.iter().all(|g| g.degree == 1));
}

#[test]
fn grading_recipe_twists() {
    let config = SeidelConfig::standard();
    let area = QExp::integer(20);
    let first = lm_object(&config, 0, &pz_lagrangian(0).unwrap(), area).unwrap().factorization;
    assert_eq!(first.p0_twists.0, [0, -1, -1, -1]);
    let second = lm_object(&config, 0, &pz_lagrangian(-3).unwrap(), area).unwrap().factorization;
    assert_eq!(second.p0_twists.0, [1, 0, 0, 0]);
    assert_eq!(second.p1_twists.0, [1, 2, 2, 2]);
}

#[test]
fn grading_recipe_rejects_half_integers() {
    let generator = FloerGenerator {
        name: "odd-even".to_string(),
        kind: GeneratorKind::Minimum,
        family: 0,
        label: None,
        degree: 1,
    };
    assert!(matches!(
        GradingRecipe::default().twist(&generator),
        Err(MirrorError::NonIntegralTwist(..))
    ));
}

#[test]
fn shift_of_the_image_matches_the_shifted_grading() {
    let config = SeidelConfig::standard();
    let area = QExp::integer(20);
    for index in [-4, -1, 1, 2, 5] {
        let lagrangian = pz_lagrangian(3 * index).unwrap();
        let image = apply_symplectomorphism(index, &lagrangian);
        let direct = grade_mf(&strip_matrix(&config, &image.lagrangian, area).unwrap(), &GradingRecipe::default()).unwrap();
        let object = lm_object(&config, index, &lagrangian, area).unwrap();
        assert_eq!(direct, object.factorization, "index {index}");
        assert!(direct.p0_graded().check_grading().is_ok());
    }
}

#[test]
fn orlov_objects_twist_with_the_index() {
    let pipeline = OrlovPipeline::new(QExp::integer(20)).unwrap();
    let base = orlov_object(&pipeline, 0, SheafObject::Structure).unwrap();
    let twisted = orlov_object(&pipeline, 2, SheafObject::Structure).unwrap();
    assert_eq!(twisted, base.twist(-2));
    let blocks = FactorizationBlocks::new(QExp::integer(20)).unwrap();
    assert_eq!(base, blocks.m0().truncate(Cutoff::at(20)));
}

#[test]
fn moved_spin_marker_breaks_the_diagram() {
    let config = SeidelConfig::standard().with_moved_marker();
    let report = diagram_check_with(&config, 0, QExp::integer(30), 6).unwrap();
    assert!(!report.pass());
    let objects: Vec<_> = report.comparisons.iter().filter(|c| c.kind == "object").collect();
    assert!(objects.iter().all(|c| c.twist_match && !c.matrix_match));
}

#[test]
fn dual_composites_agree_up_to_homotopy() {
    let cutoff = QExp::integer(30);
    let working = cutoff + QExp::integer(HOMOTOPY_MARGIN);
    let data = diagram_data(&SeidelConfig::standard(), 0, working).unwrap();
    let [orlov, fukaya] = data.images(working).unwrap();
    let structure = &data.fukaya_objects[0].factorization;
    let composite = |image: &lgcy_core::mirror::FunctorImage, name: &str| {
        let dual = format!("{name}*");
        compose(image.morphism(&dual).unwrap(), image.morphism(name).unwrap()).unwrap()
    };
    let homotopic = |f: &lgcy_core::MfMorphism| {
        matches!(is_null_homotopic(f, structure, structure, 6, cutoff).unwrap(), NullHomotopy::Found(_))
    };
    let reference = composite(&orlov, "x");
    assert!(!homotopic(&reference));
    for name in ["x", "y", "z"] {
        let (left, right) = (composite(&orlov, name), composite(&fukaya, name));
        assert!(homotopic(&left.sub(&right)), "{name}");
        assert!(homotopic(&left.sub(&reference)), "{name}");
    }
    assert_eq!(Cutoff::Finite(working), structure.precision());
}
