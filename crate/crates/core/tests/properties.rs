use std::collections::BTreeSet;

use lgcy_core::blocks::FactorizationBlocks;
use lgcy_core::fukaya::{intersect, LinearLagrangian};
use lgcy_core::mfcat::hom_diff;
use lgcy_core::qseries::{integer, Cutoff, NovikovSeries, QExp};
use lgcy_core::ring::{GradedPolynomial, Monomial};
use lgcy_core::{MfMorphism, PolyMatrix, TwistList};
use num_integer::Integer;
use num_rational::Rational64;
use proptest::prelude::*;

const SERIES_CUTOFF: i64 = 12;

fn series_strategy(with_unit: bool) -> impl Strategy<Value = NovikovSeries> {
    let term = (0i64..40, 1i64..=4, -3i64..=3);
    (prop::collection::vec(term, 0..5), prop::bool::ANY, -3i64..=3).prop_map(move |(terms, exact, unit)| {
        let cutoff = if exact { Cutoff::Exact } else { Cutoff::at(SERIES_CUTOFF) };
        let mut series = NovikovSeries::zero(cutoff);
        for (numer, denom, coeff) in terms {
            series.accumulate(QExp::new(numer + denom, denom), integer(coeff));
        }
        if with_unit {
            series.accumulate(QExp::ZERO, integer(if unit == 0 { 1 } else { unit }));
        }
        series
    })
}

fn polynomial_strategy() -> impl Strategy<Value = GradedPolynomial> {
    let term = (0u32..3, 0u32..3, 0u32..3, series_strategy(false));
    prop::collection::vec(term, 0..4).prop_map(|terms| {
        GradedPolynomial::from_terms(terms.into_iter().map(|(x, y, z, c)| (Monomial::new(x, y, z), c)))
    })
}

fn same(left: &NovikovSeries, right: &NovikovSeries) -> bool {
    left.agrees_below(right, Cutoff::at(SERIES_CUTOFF)) == Some(true)
}

fn same_poly(left: &GradedPolynomial, right: &GradedPolynomial) -> bool {
    left.agrees_below(right, Cutoff::at(SERIES_CUTOFF)) == Some(true)
}

proptest! {
    #[test]
    fn series_ring_axioms(a in series_strategy(false), b in series_strategy(false), c in series_strategy(false)) {
        prop_assert!(same(&(&a + &b), &(&b + &a)));
        prop_assert!(same(&(&a * &b), &(&b * &a)));
        prop_assert!(same(&(&(&a * &b) * &c), &(&a * &(&b * &c))));
        prop_assert!(same(&(&a * &(&b + &c)), &(&(&a * &b) + &(&a * &c))));
        prop_assert!(same(&(&a - &a), &NovikovSeries::exact_zero()));
    }

    #[test]
    fn series_inverse(a in series_strategy(true)) {
        let a = a.truncate(Cutoff::at(SERIES_CUTOFF));
        let inverse = a.inv().unwrap();
        prop_assert!(same(&(&a * &inverse), &NovikovSeries::one()));
    }

    #[test]
    fn polynomial_ring_axioms(a in polynomial_strategy(), b in polynomial_strategy(), c in polynomial_strategy()) {
        prop_assert!(same_poly(&a.add(&b), &b.add(&a)));
        prop_assert!(same_poly(&a.mul(&b), &b.mul(&a)));
        prop_assert!(same_poly(&a.mul(&b).mul(&c), &a.mul(&b.mul(&c))));
        prop_assert!(same_poly(&a.mul(&b.add(&c)), &a.mul(&b).add(&a.mul(&c))));
    }
}

/// Random graded matrix between twist lists with small integer coefficients.
fn graded_matrix(source: &TwistList, target: &TwistList, seeds: &[i64]) -> PolyMatrix {
    let mut seed = seeds.iter().cycle();
    let mut matrix = PolyMatrix::zeros(target.len(), source.len());
    for row in 0..target.len() {
        for col in 0..source.len() {
            let degree = target[row] - source[col];
            if degree < 0 {
                continue;
            }
            let terms = Monomial::of_degree(degree as u32)
                .into_iter()
                .map(|m| (m, NovikovSeries::from_integer(*seed.next().unwrap())));
            matrix.set(row, col, GradedPolynomial::from_terms(terms));
        }
    }
    matrix
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn hom_differential_squares_to_zero(seeds in prop::collection::vec(-2i64..=2, 1..30), parity in 0i64..2) {
        let blocks = FactorizationBlocks::new(QExp::integer(30)).unwrap();
        let (source, target) = (blocks.m0(), blocks.m1());
        let morphism = MfMorphism {
            parity,
            f0: graded_matrix(&source.module(0), &target.module(parity), &seeds),
            f1: graded_matrix(&source.module(1), &target.module(parity + 1), &seeds),
        };
        let once = hom_diff(&morphism, &source, &target).unwrap();
        let twice = hom_diff(&once, &source, &target).unwrap();
        prop_assert!(twice.truncate(Cutoff::at(30)).is_zero());
    }
}

/// A point on `{b u − a v ≡ offset}`.
fn point_on(a: i64, b: i64, offset: Rational64) -> (Rational64, Rational64) {
    if b != 0 {
        (offset / b, Rational64::from_integer(0))
    } else {
        (Rational64::from_integer(0), -offset / a)
    }
}

fn fractional(value: Rational64) -> Rational64 {
    value - value.floor()
}

/// Walks the first closed geodesic on a fine grid and records the distinct
/// points of the torus that lie on the second.
fn scanned_intersections(first: (i64, i64, Rational64), second: (i64, i64, Rational64)) -> usize {
    let (a1, b1, c1) = first;
    let (a2, b2, c2) = second;
    let det = (a1 * b2 - a2 * b1).abs();
    let (u0, v0) = point_on(a1, b1, c1);
    let steps = 24 * det * c2.denom() * c1.denom();
    let mut found = BTreeSet::new();
    for k in 0..steps {
        let t = Rational64::new(k, steps);
        let (u, v) = (u0 + t * a1, v0 + t * b1);
        if fractional(u * b2 - v * a2 - c2).numer() == &0 {
            found.insert((fractional(u), fractional(v)));
        }
    }
    found.len()
}

fn coprime_direction() -> impl Strategy<Value = (i64, i64)> {
    (-6i64..=6, -6i64..=6).prop_filter("primitive", |(a, b)| a.gcd(b) == 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn intersection_counts_match_scan(
        (a1, b1) in coprime_direction(),
        (a2, b2) in coprime_direction(),
        numer in 0i64..6,
        denom in 1i64..=3,
    ) {
        prop_assume!(a1 * b2 - a2 * b1 != 0);
        let offset = Rational64::new(numer, denom);
        let first = LinearLagrangian::with_offset(lgcy_core::fukaya::Direction::new(a1, b1).unwrap(), Rational64::from_integer(0));
        let second = LinearLagrangian::with_offset(lgcy_core::fukaya::Direction::new(a2, b2).unwrap(), offset);
        let points = intersect(&first, &second).unwrap();
        prop_assert_eq!(points.len() as i64, (a1 * b2 - a2 * b1).abs());
        prop_assert_eq!(
            points.len(),
            scanned_intersections((a1, b1, Rational64::from_integer(0)), (a2, b2, fractional(offset)))
        );
    }
}
