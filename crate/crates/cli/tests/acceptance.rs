//! One line per acceptance criterion; exits non-zero if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use lgcy_core::blocks::FactorizationBlocks;
use lgcy_core::fukaya::{
    addition_formula_check, apply_symplectomorphism, enumerate_decorated_polygons, morphism_strips,
    standard_triangle_counts, strip_matrix, ConstantEntry, SeidelConfig, StripComplex,
};
use lgcy_core::mfcat::{is_null_homotopic, mf_validate, NullHomotopy};
use lgcy_core::mirror::{diagram_check, lm_object, pz_lagrangian};
use lgcy_core::orlov::{chain_null_homotopy, Generator, OrlovPipeline};
use lgcy_core::qseries::{integer, NovikovSeries};
use lgcy_core::ring::build_w;
use lgcy_core::{Cutoff, Monomial, QExp, Var};
use num_rational::Rational64;

type Verdict = Result<(bool, String), Box<dyn std::error::Error>>;

const HEADLINE_CUTOFF: i64 = 200;
const POLYGON_CUTOFF: i64 = 130;
const THETA_CUTOFF: i64 = 50;
const DEGREE_BOUND: u32 = 6;
const POTENTIAL_BUDGET: Duration = Duration::from_secs(5);
const MF_BUDGET: Duration = Duration::from_secs(10);
const POLYGON_BUDGET: Duration = Duration::from_secs(300);

fn cutoff(value: i64) -> QExp {
    QExp::integer(value)
}

fn coefficient(series: &NovikovSeries, exponent: i64) -> i64 {
    let value = series.coeff_at(exponent);
    assert!(value.is_integer());
    i64::try_from(value.to_integer()).expect("small coefficient")
}

fn potential_identity() -> Verdict {
    let start = Instant::now();
    let bundle = build_w(cutoff(HEADLINE_CUTOFF))?;
    let elapsed = start.elapsed();
    let signs = bundle.sign_s.ok_or("sign pattern undetermined")?;
    let limit = Cutoff::at(HEADLINE_CUTOFF);
    let w = &bundle.w;
    let sign = |s: i8| integer(i64::from(s));
    let channels = w.coefficient(Monomial::new(3, 0, 0)).agrees_below(&bundle.phi, limit) == Some(true)
        && w.coefficient(Monomial::new(0, 3, 0)).agrees_below(&bundle.phi.scale(&sign(signs.s1)), limit) == Some(true)
        && w.coefficient(Monomial::new(0, 0, 3)).agrees_below(&bundle.phi, limit) == Some(true)
        && w.coefficient(Monomial::new(1, 1, 1)).agrees_below(&bundle.psi.scale(&sign(signs.s2)), limit) == Some(true);
    let phi_terms = [(9, -1), (81, 3)].iter().all(|(e, c)| coefficient(&bundle.phi, *e) == *c);
    let psi_terms = [(1, -1), (25, -5), (49, 7)].iter().all(|(e, c)| coefficient(&bundle.psi, *e) == *c);
    let pass = channels && phi_terms && psi_terms && elapsed < POTENTIAL_BUDGET;
    Ok((
        pass,
        format!(
            "(s1, s2) = ({}, {}), channels {channels}, phi {phi_terms}, psi {psi_terms}, {elapsed:.2?}",
            signs.s1, signs.s2
        ),
    ))
}

fn mf_identities() -> Verdict {
    let start = Instant::now();
    let blocks = FactorizationBlocks::new(cutoff(HEADLINE_CUTOFF))?;
    let limit = Cutoff::at(HEADLINE_CUTOFF);
    let m0 = mf_validate(&blocks.m0(), blocks.w(), limit)?;
    let m1 = mf_validate(&blocks.m1(), blocks.w(), limit)?;
    let elapsed = start.elapsed();
    Ok((m0 && m1 && elapsed < MF_BUDGET, format!("M0 {m0}, M1 {m1}, {elapsed:.2?}")))
}

fn orlov_equality() -> Verdict {
    let limit = Cutoff::at(HEADLINE_CUTOFF);
    let pipeline = OrlovPipeline::new(cutoff(HEADLINE_CUTOFF))?;
    let pairs = [
        (pipeline.object_o()?, pipeline.blocks.m0().truncate(limit)),
        (pipeline.object_o1()?, pipeline.blocks.m1().truncate(limit)),
    ];
    let equal: Vec<bool> = pairs.iter().map(|(tail, expected)| tail == expected).collect();
    Ok((equal.iter().all(|e| *e), format!("normalization (twist 0, parity 0), O {} O(1) {}", equal[0], equal[1])))
}

fn polygon_oracle() -> Verdict {
    let start = Instant::now();
    let area = cutoff(POLYGON_CUTOFF);
    let config = SeidelConfig::standard();
    let reference = build_w(area)?.w;
    let mut agree = true;
    let mut printed = true;
    for output in 0..3 {
        let counts = enumerate_decorated_polygons(&config, output, area);
        let name = lgcy_core::fukaya::unit_output_name(output);
        agree &= counts.polynomial(&name).agrees_below(&reference, Cutoff::Finite(area)) == Some(true);
        let cubic = counts.series(&name, Monomial::new(3, 0, 0));
        let mixed = counts.series(&name, Monomial::new(1, 1, 1));
        printed &= coefficient(&cubic, 9) == -1
            && coefficient(&mixed, 1) == -1
            && coefficient(&mixed, 25) == -5
            && coefficient(&mixed, 49) == 7
            && counts.series(&name, Monomial::new(2, 1, 0)).is_zero();
    }
    let elapsed = start.elapsed();
    Ok((agree && printed && elapsed < POLYGON_BUDGET, format!("channels equal W {agree}, printed terms {printed}, {elapsed:.2?}")))
}

/// `Σ_m q^{(m+c)²}` by direct summation.
fn square_series(shift: Rational64, limit: i64) -> NovikovSeries {
    let mut series = NovikovSeries::zero(Cutoff::at(limit));
    for m in -limit..=limit {
        let exponent = (Rational64::from_integer(m) + shift).pow(2);
        if exponent < Rational64::from_integer(limit) {
            series.accumulate(QExp::from_ratio(exponent), integer(1));
        }
    }
    series
}

fn theta_counts() -> Verdict {
    let counts = standard_triangle_counts(cutoff(THETA_CUTOFF))?;
    let limit = Cutoff::at(THETA_CUTOFF);
    let first = counts.series("q(0,0)", Monomial::ONE).agrees_below(&square_series(Rational64::from_integer(0), THETA_CUTOFF), limit)
        == Some(true);
    let second = counts
        .series("q(1/2,0)", Monomial::ONE)
        .agrees_below(&square_series(Rational64::new(1, 2), THETA_CUTOFF), limit)
        == Some(true);
    let formula = addition_formula_check(cutoff(THETA_CUTOFF));
    Ok((first && second && formula, format!("q0 {first}, q1 {second}, addition formula {formula}")))
}

fn strip_matrix_mf() -> Verdict {
    let area = cutoff(HEADLINE_CUTOFF);
    let limit = Cutoff::Finite(area);
    let config = SeidelConfig::standard();
    let blocks = FactorizationBlocks::new(area)?;
    let mut details = Vec::new();
    let mut pass = true;
    for (slope, expected, twists) in [(0, blocks.m0(), [0, -1, -1, -1]), (-3, blocks.m1(), [1, 0, 0, 0])] {
        let object = lm_object(&config, 0, &pz_lagrangian(slope)?, area)?;
        let mf = &object.factorization;
        let squares = mf_validate(mf, blocks.w(), limit)?;
        let equal = mf.p0_twists == expected.p0_twists
            && mf.p1_twists == expected.p1_twists
            && mf.p0.agrees_below(&expected.p0, limit) == Some(true)
            && mf.p1.agrees_below(&expected.p1, limit) == Some(true);
        let printed = mf.p0_twists.0 == twists;
        pass &= squares && equal && printed;
        details.push(format!("L(1,{slope}): W·id {squares}, equal {equal}, twists {}", mf.p0_twists));
    }
    Ok((pass, details.join("; ")))
}

/// `(component, row, col)` of an area-zero entry.
fn entry_position(source: &StripComplex, target: &StripComplex, entry: &ConstantEntry) -> (usize, usize, usize) {
    let locate = |complex: &StripComplex, name: &str| {
        match complex.even.iter().position(|g| g.name == name) {
            Some(index) => (0, index),
            None => (1, complex.odd.iter().position(|g| g.name == name).expect("known generator")),
        }
    };
    let (component, col) = locate(source, &entry.from);
    let (_, row) = locate(target, &entry.to);
    (component, row, col)
}

fn morphism_match() -> Verdict {
    let report = diagram_check(0, cutoff(HEADLINE_CUTOFF), DEGREE_BOUND)?;
    let morphisms: Vec<_> = report.comparisons.iter().filter(|c| c.kind == "morphism").collect();
    let all = morphisms.len() == 6 && morphisms.iter().all(|c| c.passed());
    let config = SeidelConfig::standard();
    let area = cutoff(HEADLINE_CUTOFF);
    let source = strip_matrix(&config, &apply_symplectomorphism(0, &pz_lagrangian(0)?).lagrangian, area)?;
    let target = strip_matrix(&config, &apply_symplectomorphism(0, &pz_lagrangian(-3)?).lagrangian, area)?;
    let entries = |from: &StripComplex, to: &StripComplex, var| {
        morphism_strips(&config, from, to, var)
            .map(|list| list.iter().map(|e| (entry_position(from, to, e), e.value)).collect::<Vec<_>>())
    };
    let x = entries(&source, &target, Var::X)?;
    let x_dual = entries(&target, &source, Var::X)?;
    let printed_x = x.contains(&((0, 1, 0), 1)) && x.contains(&((1, 0, 1), -1)) && x.len() == 2;
    let printed_dual = x_dual.contains(&((0, 0, 1), 1)) && x_dual.contains(&((0, 1, 0), 1)) && x_dual.len() == 2;
    let names: Vec<_> = morphisms.iter().filter(|c| c.passed()).map(|c| c.name.clone()).collect();
    Ok((
        all && printed_x && printed_dual,
        format!("passing {names:?}, x pattern {printed_x}, x* pattern {printed_dual}"),
    ))
}

fn homotopy_soundness() -> Verdict {
    let area = cutoff(HEADLINE_CUTOFF);
    let pipeline = OrlovPipeline::new(area)?;
    let w = pipeline.blocks.w();
    let mut rows_certified = Vec::new();
    for row in 1..=3 {
        let (map, source, target) = pipeline.alternative_row(row)?;
        let homotopy = chain_null_homotopy(&map, &source, &target, w, DEGREE_BOUND, area)?;
        rows_certified.push(homotopy.is_some_and(|h| !h.is_empty()));
    }
    let x = pipeline.lift(Generator::X)?.morphism;
    let not_trivial = matches!(
        is_null_homotopic(&x, &pipeline.object_o()?, &pipeline.object_o1()?, DEGREE_BOUND, area)?,
        NullHomotopy::NotFound
    );
    Ok((
        rows_certified.iter().all(|c| *c) && not_trivial,
        format!("alternative rows {rows_certified:?}, x not null-homotopic {not_trivial}"),
    ))
}

fn symplecto_arithmetic() -> Verdict {
    let area = cutoff(HEADLINE_CUTOFF);
    let config = SeidelConfig::standard();
    let base = FactorizationBlocks::new(area)?.m0();
    let mut failures = Vec::new();
    for index in -6..=6 {
        let lagrangian = pz_lagrangian(3 * index)?;
        let image = apply_symplectomorphism(index, &lagrangian);
        let j = (-index).div_euclid(3);
        let rotation = -index - 3 * j;
        let branch = &config.branches[rotation as usize];
        let geometry = image.before_rotation.direction.vector() == (1, 2)
            && image.rotation == rotation
            && image.nominal_shift == -j
            && image.lagrangian.direction == branch.direction
            && image.lagrangian.offset == branch.offset;
        let twists = lm_object(&config, index, &lagrangian, area)?.factorization;
        let expected = base.twist(-index);
        let twist_ok = twists.p0_twists == expected.p0_twists && twists.p1_twists == expected.p1_twists;
        let diagram = diagram_check(index, area, DEGREE_BOUND)?.pass();
        if !(geometry && twist_ok && diagram) {
            failures.push(format!("i={index}: geometry {geometry} twists {twist_ok} diagram {diagram}"));
        }
    }
    Ok((failures.is_empty(), if failures.is_empty() { "i in [-6, 6]".to_string() } else { failures.join("; ") }))
}

fn determinism() -> Verdict {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_lgcy"))
            .args(["diagram", "--index", "0", "--output", "json"])
            .output()
    };
    let (first, second) = (run()?, run()?);
    let identical = first.stdout == second.stdout && !first.stdout.is_empty();
    let status = first.status.success() && second.status.success();
    Ok((identical && status, format!("{} bytes, identical {identical}, status ok {status}", first.stdout.len())))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("potential identity", potential_identity),
        ("MF identities", mf_identities),
        ("Orlov pipeline equality", orlov_equality),
        ("polygon-count oracle", polygon_oracle),
        ("theta counts", theta_counts),
        ("strip-matrix MF", strip_matrix_mf),
        ("morphism match", morphism_match),
        ("homotopy solver soundness", homotopy_soundness),
        ("symplectomorphism arithmetic", symplecto_arithmetic),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (number, (name, check)) in criteria.iter().enumerate() {
        let (pass, detail) = match check() {
            Ok(verdict) => verdict,
            Err(err) => (false, format!("error: {err}")),
        };
        failed += usize::from(!pass);
        println!("criterion {:>2}: {} {name}: {detail}", number + 1, if pass { "PASS" } else { "FAIL" });
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
