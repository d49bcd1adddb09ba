//! The graded ring `Λ[x, y, z]` with `deg x = deg y = deg z = 1`, and the
//! closed-form series that make up the superpotential.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::qseries::{integer, Coeff, Cutoff, NovikovSeries, QExp};

/// `x^a y^b z^c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial {
    pub x: u32,
    pub y: u32,
    pub z: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X,
    Y,
    Z,
}

impl Var {
    pub const ALL: [Var; 3] = [Var::X, Var::Y, Var::Z];

    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
            Var::Z => "z",
        }
    }

    pub fn index(self) -> usize {
        match self {
            Var::X => 0,
            Var::Y => 1,
            Var::Z => 2,
        }
    }
}

impl Monomial {
    pub const ONE: Monomial = Monomial { x: 0, y: 0, z: 0 };

    pub fn new(x: u32, y: u32, z: u32) -> Self {
        Monomial { x, y, z }
    }

    pub fn var(var: Var) -> Self {
        let mut exps = [0; 3];
        exps[var.index()] = 1;
        Monomial::from_exponents(exps)
    }

    pub fn from_exponents(exps: [u32; 3]) -> Self {
        Monomial {
            x: exps[0],
            y: exps[1],
            z: exps[2],
        }
    }

    pub fn exponents(self) -> [u32; 3] {
        [self.x, self.y, self.z]
    }

    pub fn degree(self) -> u32 {
        self.x + self.y + self.z
    }

    pub fn times(self, other: Monomial) -> Monomial {
        Monomial::new(self.x + other.x, self.y + other.y, self.z + other.z)
    }

    /// All monomials of the given total degree, in canonical (descending lex) order.
    pub fn of_degree(degree: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        for a in (0..=degree).rev() {
            for b in (0..=degree - a).rev() {
                out.push(Monomial::new(a, b, degree - a - b));
            }
        }
        out
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree() == 0 {
            return write!(f, "1");
        }
        let mut parts = Vec::new();
        for (var, exp) in Var::ALL.iter().zip(self.exponents()) {
            match exp {
                0 => {}
                1 => parts.push(var.name().to_string()),
                _ => parts.push(format!("{}^{}", var.name(), exp)),
            }
        }
        write!(f, "{}", parts.join("*"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Degree {
    Zero,
    Homogeneous(u32),
    Inhomogeneous,
}

/// Element of `Λ[x, y, z]`.
///
/// The coefficient of a monomial that is not stored is zero below `cutoff`;
/// stored coefficients carry their own cutoffs as well.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedPolynomial {
    terms: BTreeMap<Monomial, NovikovSeries>,
    cutoff: Cutoff,
}

impl Default for GradedPolynomial {
    fn default() -> Self {
        GradedPolynomial::zero()
    }
}

impl GradedPolynomial {
    pub fn zero() -> Self {
        GradedPolynomial {
            terms: BTreeMap::new(),
            cutoff: Cutoff::Exact,
        }
    }

    pub fn zero_below(cutoff: Cutoff) -> Self {
        GradedPolynomial {
            terms: BTreeMap::new(),
            cutoff,
        }
    }

    pub fn one() -> Self {
        Self::term(Monomial::ONE, NovikovSeries::one())
    }

    pub fn var(var: Var) -> Self {
        Self::term(Monomial::var(var), NovikovSeries::one())
    }

    pub fn constant(value: NovikovSeries) -> Self {
        Self::term(Monomial::ONE, value)
    }

    pub fn integer_constant(value: i64) -> Self {
        Self::constant(NovikovSeries::from_integer(value))
    }

    pub fn term(monomial: Monomial, coeff: NovikovSeries) -> Self {
        let mut poly = Self::zero();
        poly.accumulate(monomial, coeff);
        poly
    }

    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, NovikovSeries)>,
    {
        let mut poly = Self::zero();
        for (monomial, coeff) in terms {
            poly.accumulate(monomial, coeff);
        }
        poly
    }

    /// Adds `coeff * monomial`; a coefficient that cancels below its cutoff is
    /// dropped and its cutoff folded into the polynomial's.
    pub fn accumulate(&mut self, monomial: Monomial, coeff: NovikovSeries) {
        let sum = match self.terms.remove(&monomial) {
            Some(existing) => existing.add_series(&coeff),
            None => coeff.truncate(self.cutoff),
        };
        if sum.is_zero() {
            self.cutoff = self.cutoff.min(sum.cutoff());
        } else {
            self.terms.insert(monomial, sum);
        }
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, NovikovSeries> {
        &self.terms
    }

    pub fn cutoff(&self) -> Cutoff {
        self.cutoff
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, monomial: Monomial) -> NovikovSeries {
        self.terms
            .get(&monomial)
            .cloned()
            .unwrap_or_else(|| NovikovSeries::zero(self.cutoff))
    }

    /// Smallest cutoff of any coefficient, stored or not.
    pub fn precision(&self) -> Cutoff {
        self.terms
            .values()
            .map(NovikovSeries::cutoff)
            .fold(self.cutoff, Cutoff::min)
    }

    /// Lowest exponent any coefficient may carry.
    pub fn order(&self) -> Cutoff {
        self.terms
            .values()
            .map(NovikovSeries::order)
            .fold(self.cutoff, Cutoff::min)
    }

    /// Smallest valuation among stored coefficients.
    pub fn min_valuation(&self) -> Option<QExp> {
        self.terms.values().filter_map(|c| c.valuation().ok()).min()
    }

    pub fn degree(&self) -> Degree {
        let mut degrees = self.terms.keys().map(|m| m.degree());
        match degrees.next() {
            None => Degree::Zero,
            Some(first) => {
                if degrees.all(|d| d == first) {
                    Degree::Homogeneous(first)
                } else {
                    Degree::Inhomogeneous
                }
            }
        }
    }

    pub fn is_homogeneous_of(&self, degree: i64) -> bool {
        match self.degree() {
            Degree::Zero => true,
            Degree::Homogeneous(d) => i64::from(d) == degree,
            Degree::Inhomogeneous => false,
        }
    }

    pub fn truncate(&self, cutoff: Cutoff) -> Self {
        let mut out = Self::zero_below(self.cutoff.min(cutoff));
        for (monomial, coeff) in &self.terms {
            out.accumulate(*monomial, coeff.truncate(cutoff));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = Self::zero_below(self.cutoff.min(other.cutoff));
        for (monomial, coeff) in &self.terms {
            out.accumulate(*monomial, coeff.truncate(other.cutoff));
        }
        for (monomial, coeff) in &other.terms {
            if self.terms.contains_key(monomial) {
                out.accumulate(*monomial, coeff.clone());
            } else {
                out.accumulate(*monomial, coeff.truncate(self.cutoff));
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        GradedPolynomial {
            terms: self.terms.iter().map(|(m, c)| (*m, c.negate())).collect(),
            cutoff: self.cutoff,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let absent = self
            .cutoff
            .plus(other.order())
            .min(other.cutoff.plus(self.order()));
        let mut out = Self::zero_below(absent);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.accumulate(ma.times(*mb), ca.mul_series(cb));
            }
        }
        out
    }

    pub fn scale(&self, factor: &NovikovSeries) -> Self {
        let mut out = Self::zero_below(self.cutoff.plus(factor.order()));
        for (monomial, coeff) in &self.terms {
            out.accumulate(*monomial, coeff.mul_series(factor));
        }
        out
    }

    pub fn scale_rational(&self, factor: &Coeff) -> Self {
        if factor.is_zero() {
            return Self::zero();
        }
        GradedPolynomial {
            terms: self.terms.iter().map(|(m, c)| (*m, c.scale(factor))).collect(),
            cutoff: self.cutoff,
        }
    }

    pub fn times_monomial(&self, monomial: Monomial) -> Self {
        GradedPolynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.times(monomial), c.clone()))
                .collect(),
            cutoff: self.cutoff,
        }
    }

    /// Equality of all coefficients below `limit`; `None` when the data is not
    /// known that far.
    pub fn agrees_below(&self, other: &Self, limit: Cutoff) -> Option<bool> {
        if self.precision() < limit || other.precision() < limit {
            return None;
        }
        let lhs = self.truncate(limit);
        let rhs = other.truncate(limit);
        Some(lhs.terms == rhs.terms)
    }

    /// Canonical text: monomials in descending lex order (x > y > z).
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return match self.cutoff {
                Cutoff::Exact => "0".to_string(),
                Cutoff::Finite(limit) => format!("O(T^{limit})"),
            };
        }
        self.terms
            .iter()
            .rev()
            .map(|(m, c)| format!("({c})*{m}"))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .rev()
                .map(|(m, c)| json!({ "monomial": m.exponents(), "series": c.to_quadruples() }))
                .collect(),
        )
    }
}

impl fmt::Display for GradedPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

pub fn poly_add(a: &GradedPolynomial, b: &GradedPolynomial) -> GradedPolynomial {
    a.add(b)
}

pub fn poly_mul(a: &GradedPolynomial, b: &GradedPolynomial) -> GradedPolynomial {
    a.mul(b)
}

pub fn poly_scale(a: &GradedPolynomial, factor: &NovikovSeries) -> GradedPolynomial {
    a.scale(factor)
}

pub fn poly_degree(a: &GradedPolynomial) -> Degree {
    a.degree()
}

fn series_from(terms: impl IntoIterator<Item = (i64, i64)>, cutoff: QExp) -> NovikovSeries {
    NovikovSeries::from_integer_terms(terms, Cutoff::Finite(cutoff))
}

fn sign(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Largest `k` worth summing: all exponents `(6k-1)^2` beyond the cutoff.
fn k_range(cutoff: QExp) -> i64 {
    let mut k: i64 = 0;
    while QExp::integer((6 * k - 1).pow(2)) < cutoff || k == 0 {
        k += 1;
    }
    k
}

/// `φ = Σ_{k≥0} (-1)^{k+1} (2k+1) T^{(6k+3)^2}`.
pub fn series_phi(cutoff: QExp) -> NovikovSeries {
    series_from(
        (0..=k_range(cutoff)).map(|k| ((6 * k + 3).pow(2), sign(k + 1) * (2 * k + 1))),
        cutoff,
    )
}

/// `ψ = -T + Σ_{k≥1} (-1)^{k+1} ((6k+1) T^{(6k+1)^2} - (6k-1) T^{(6k-1)^2})`.
pub fn series_psi(cutoff: QExp) -> NovikovSeries {
    let mut terms = vec![(1, -1)];
    for k in 1..=k_range(cutoff) {
        terms.push(((6 * k + 1).pow(2), sign(k + 1) * (6 * k + 1)));
        terms.push(((6 * k - 1).pow(2), -sign(k + 1) * (6 * k - 1)));
    }
    series_from(terms, cutoff)
}

/// `α = Σ_{k≥0} ((-1)^k T^{(6k+1)^2} + (-1)^{k+1} T^{(6k+5)^2})`.
pub fn series_alpha(cutoff: QExp) -> NovikovSeries {
    series_from(
        (0..=k_range(cutoff)).flat_map(|k| {
            [((6 * k + 1).pow(2), sign(k)), ((6 * k + 5).pow(2), sign(k + 1))]
        }),
        cutoff,
    )
}

/// Mixed-term series of `w_x`: `Σ_{k≥1} (-1)^{k+1} (2k T^{(6k+1)^2} - 2k T^{(6k-1)^2})`.
pub fn series_mixed_a(cutoff: QExp) -> NovikovSeries {
    series_from(
        (1..=k_range(cutoff)).flat_map(|k| {
            [
                ((6 * k + 1).pow(2), sign(k + 1) * 2 * k),
                ((6 * k - 1).pow(2), -sign(k + 1) * 2 * k),
            ]
        }),
        cutoff,
    )
}

/// Mixed-term series of `w_z` without its `-T` term:
/// `Σ_{k≥1} (-1)^{k+1} ((2k+1) T^{(6k+1)^2} - (2k-1) T^{(6k-1)^2})`.
pub fn series_mixed_b(cutoff: QExp) -> NovikovSeries {
    series_from(
        (1..=k_range(cutoff)).flat_map(|k| {
            [
                ((6 * k + 1).pow(2), sign(k + 1) * (2 * k + 1)),
                ((6 * k - 1).pow(2), -sign(k + 1) * (2 * k - 1)),
            ]
        }),
        cutoff,
    )
}

fn quadratic(pairs: Vec<(Monomial, NovikovSeries)>, cutoff: QExp) -> GradedPolynomial {
    let mut poly = GradedPolynomial::zero_below(Cutoff::Finite(cutoff));
    for (monomial, coeff) in pairs {
        poly.accumulate(monomial, coeff);
    }
    poly
}

/// `w_x = φ x² + A yz`.
pub fn series_wx(cutoff: QExp) -> GradedPolynomial {
    quadratic(
        vec![
            (Monomial::new(2, 0, 0), series_phi(cutoff)),
            (Monomial::new(0, 1, 1), series_mixed_a(cutoff)),
        ],
        cutoff,
    )
}

/// `w_y = -φ y² + A zx`.
pub fn series_wy(cutoff: QExp) -> GradedPolynomial {
    quadratic(
        vec![
            (Monomial::new(0, 2, 0), series_phi(cutoff).negate()),
            (Monomial::new(1, 0, 1), series_mixed_a(cutoff)),
        ],
        cutoff,
    )
}

/// `w_z = φ z² + (B - T) xy`.
pub fn series_wz(cutoff: QExp) -> GradedPolynomial {
    let minus_t = series_from([(1, -1)], cutoff);
    quadratic(
        vec![
            (Monomial::new(0, 0, 2), series_phi(cutoff)),
            (Monomial::new(1, 1, 0), series_mixed_b(cutoff).add_series(&minus_t)),
        ],
        cutoff,
    )
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("no sign pattern (s1, s2) matches W = φ(x³ + s1 y³ + z³) + s2 ψ xyz")]
    NoSignPattern,
}

/// Signs in `W = φ(x³ + s1 y³ + z³) + s2 ψ xyz`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SignPattern {
    pub s1: i8,
    pub s2: i8,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedSeriesBundle {
    pub cutoff: QExp,
    pub phi: NovikovSeries,
    pub psi: NovikovSeries,
    pub alpha: NovikovSeries,
    pub wx: GradedPolynomial,
    pub wy: GradedPolynomial,
    pub wz: GradedPolynomial,
    pub w: GradedPolynomial,
    /// `None` when the cutoff is too low to tell the patterns apart.
    pub sign_s: Option<SignPattern>,
}

impl NamedSeriesBundle {
    pub fn w_component(&self, var: Var) -> &GradedPolynomial {
        match var {
            Var::X => &self.wx,
            Var::Y => &self.wy,
            Var::Z => &self.wz,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "cutoff": self.cutoff.to_string(),
            "phi": self.phi.to_quadruples(),
            "psi": self.psi.to_quadruples(),
            "alpha": self.alpha.to_quadruples(),
            "wx": self.wx.to_json(),
            "wy": self.wy.to_json(),
            "wz": self.wz.to_json(),
            "W": self.w.to_json(),
            "sign_s": self.sign_s.map(|s| [s.s1, s.s2]),
        })
    }
}

/// `x w_x + y w_y + z w_z`.
pub fn assemble_w(
    wx: &GradedPolynomial,
    wy: &GradedPolynomial,
    wz: &GradedPolynomial,
) -> GradedPolynomial {
    wx.times_monomial(Monomial::var(Var::X))
        .add(&wy.times_monomial(Monomial::var(Var::Y)))
        .add(&wz.times_monomial(Monomial::var(Var::Z)))
}

/// Finds the signs with `W = φ(x³ + s1 y³ + z³) + s2 ψ xyz` below the cutoff,
/// `None` if several fit.
pub fn resolve_sign_pattern(w: &GradedPolynomial, cutoff: QExp) -> Result<Option<SignPattern>, RingError> {
    let limit = Cutoff::Finite(cutoff);
    let phi = series_phi(cutoff);
    let psi = series_psi(cutoff);
    let mut found = Vec::new();
    for s1 in [1i8, -1] {
        for s2 in [1i8, -1] {
            let candidate = GradedPolynomial::from_terms([
                (Monomial::new(3, 0, 0), phi.clone()),
                (Monomial::new(0, 3, 0), phi.scale(&integer(i64::from(s1)))),
                (Monomial::new(0, 0, 3), phi.clone()),
                (Monomial::new(1, 1, 1), psi.scale(&integer(i64::from(s2)))),
            ]);
            if w.agrees_below(&candidate, limit) == Some(true) {
                found.push(SignPattern { s1, s2 });
            }
        }
    }
    match found.as_slice() {
        [] => Err(RingError::NoSignPattern),
        [single] => Ok(Some(*single)),
        _ => Ok(None),
    }
}

pub fn build_w(cutoff: QExp) -> Result<NamedSeriesBundle, RingError> {
    let wx = series_wx(cutoff);
    let wy = series_wy(cutoff);
    let wz = series_wz(cutoff);
    let w = assemble_w(&wx, &wy, &wz);
    let sign_s = resolve_sign_pattern(&w, cutoff)?;
    Ok(NamedSeriesBundle {
        cutoff,
        phi: series_phi(cutoff),
        psi: series_psi(cutoff),
        alpha: series_alpha(cutoff),
        wx,
        wy,
        wz,
        w,
        sign_s,
    })
}

/// Coefficient of `T^0` in the coefficient series of `monomial`.
pub fn constant_coefficient(poly: &GradedPolynomial, monomial: Monomial) -> Coeff {
    poly.terms()
        .get(&monomial)
        .map(NovikovSeries::constant_term)
        .unwrap_or_else(Coeff::zero)
}

pub fn is_unit_constant(poly: &GradedPolynomial) -> bool {
    poly.terms().len() == 1
        && poly
            .terms()
            .get(&Monomial::ONE)
            .is_some_and(|c| c.len() == 1 && c.constant_term().is_one())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cut() -> QExp {
        QExp::integer(200)
    }

    #[test]
    fn named_series_leading_terms() {
        let phi = series_phi(cut());
        assert_eq!(phi.coeff_at(9), integer(-1));
        assert_eq!(phi.coeff_at(81), integer(3));
        assert_eq!(phi.coeff_at(10), integer(0));
        let psi = series_psi(cut());
        assert_eq!(psi.coeff_at(1), integer(-1));
        assert_eq!(psi.coeff_at(25), integer(-5));
        assert_eq!(psi.coeff_at(49), integer(7));
        let alpha = series_alpha(cut());
        assert_eq!(alpha.coeff_at(1), integer(1));
        assert_eq!(alpha.coeff_at(25), integer(-1));
        assert_eq!(alpha.coeff_at(121), integer(1));
    }

    #[test]
    fn w_components() {
        let wx = series_wx(cut());
        assert_eq!(wx.coefficient(Monomial::new(2, 0, 0)).coeff_at(9), integer(-1));
        assert_eq!(poly_degree(&wx), Degree::Homogeneous(2));
        let wy = series_wy(cut());
        assert_eq!(wy.coefficient(Monomial::new(0, 2, 0)).coeff_at(9), integer(1));
        let wz = series_wz(cut());
        assert_eq!(wz.coefficient(Monomial::new(1, 1, 0)).coeff_at(1), integer(-1));
    }

    #[test]
    fn superpotential_signs() {
        let bundle = build_w(cut()).unwrap();
        assert_eq!(bundle.sign_s, Some(SignPattern { s1: -1, s2: 1 }));
        assert_eq!(bundle.w.degree(), Degree::Homogeneous(3));
        assert_eq!(bundle.w.coefficient(Monomial::new(3, 0, 0)).coeff_at(9), integer(-1));
        assert_eq!(bundle.w.coefficient(Monomial::new(1, 1, 1)).coeff_at(1), integer(-1));
    }

    #[test]
    fn commutativity_and_inhomogeneity() {
        let x = GradedPolynomial::var(Var::X);
        let y = GradedPolynomial::var(Var::Y);
        assert!(x.mul(&y).sub(&y.mul(&x)).is_zero());
        assert_eq!(x.add(&x.mul(&x)).degree(), Degree::Inhomogeneous);
    }

    #[test]
    fn monomials_of_degree_are_canonical() {
        let two = Monomial::of_degree(2);
        assert_eq!(two.len(), 6);
        assert_eq!(two[0], Monomial::new(2, 0, 0));
        assert_eq!(two[5], Monomial::new(0, 0, 2));
    }

    #[test]
    fn truncated_cancellation_keeps_precision() {
        let a = GradedPolynomial::term(
            Monomial::var(Var::X),
            NovikovSeries::from_integer_terms([(1, 1)], Cutoff::at(5)),
        );
        let diff = a.sub(&a);
        assert!(diff.is_zero());
        assert_eq!(diff.precision(), Cutoff::at(5));
    }
}
