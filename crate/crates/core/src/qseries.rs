//! Truncated Novikov series.
//!
//! A [`NovikovSeries`] is a finite sum of terms `c T^e` with rational
//! exponents and rational coefficients, known exactly for every exponent
//! strictly below its [`Cutoff`]. Terms at or above the cutoff are unknown and
//! never stored. A series built from closed-form data with no truncation at
//! all carries [`Cutoff::Exact`].
//!
//! Invariants:
//! - no stored coefficient is zero
//! - every stored exponent is admitted by the cutoff

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;
use thiserror::Error;

/// Coefficient field of every series.
pub type Coeff = BigRational;

/// An exponent of `T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QExp(Rational64);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseExpError {
    #[error("empty number")]
    Empty,
    #[error("malformed decimal number `{0}`")]
    Malformed(String),
    #[error("number `{0}` is out of range")]
    Overflow(String),
}

impl QExp {
    pub const ZERO: QExp = QExp(Rational64::new_raw(0, 1));

    pub fn new(numer: i64, denom: i64) -> Self {
        QExp(Rational64::new(numer, denom))
    }

    pub fn integer(value: i64) -> Self {
        QExp(Rational64::from_integer(value))
    }

    pub fn from_ratio(value: Rational64) -> Self {
        QExp(value)
    }

    pub fn ratio(self) -> Rational64 {
        self.0
    }

    pub fn numer(self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(self) -> i64 {
        *self.0.denom()
    }

    pub fn is_integer(self) -> bool {
        self.0.is_integer()
    }

    pub fn is_positive(self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(self) -> bool {
        self.0.is_negative()
    }

    /// Parses an exact decimal such as `200`, `0.5` or `-1.25`, or a fraction `9/4`.
    pub fn parse_decimal(text: &str) -> Result<Self, ParseExpError> {
        let text = text.trim();
        if text.is_empty() {
            return Err(ParseExpError::Empty);
        }
        let malformed = || ParseExpError::Malformed(text.to_string());
        let overflow = || ParseExpError::Overflow(text.to_string());
        if let Some((num, den)) = text.split_once('/') {
            let num: i64 = num.trim().parse().map_err(|_| malformed())?;
            let den: i64 = den.trim().parse().map_err(|_| malformed())?;
            if den == 0 {
                return Err(malformed());
            }
            return Ok(QExp::new(num, den));
        }
        let (negative, body) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text.strip_prefix('+').unwrap_or(text)),
        };
        let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
        if whole.is_empty() && frac.is_empty() {
            return Err(malformed());
        }
        if !whole.chars().chain(frac.chars()).all(|ch| ch.is_ascii_digit()) {
            return Err(malformed());
        }
        let digits = format!("{whole}{frac}");
        let numer: i64 = if digits.is_empty() {
            0
        } else {
            digits.parse().map_err(|_| overflow())?
        };
        let scale = 10i64
            .checked_pow(u32::try_from(frac.len()).map_err(|_| overflow())?)
            .ok_or_else(overflow)?;
        let value = QExp::new(numer, scale);
        Ok(if negative { -value } else { value })
    }
}

impl FromStr for QExp {
    type Err = ParseExpError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        QExp::parse_decimal(text)
    }
}

impl From<i64> for QExp {
    fn from(value: i64) -> Self {
        QExp::integer(value)
    }
}

impl Add for QExp {
    type Output = QExp;
    fn add(self, rhs: QExp) -> QExp {
        QExp(self.0 + rhs.0)
    }
}

impl Sub for QExp {
    type Output = QExp;
    fn sub(self, rhs: QExp) -> QExp {
        QExp(self.0 - rhs.0)
    }
}

impl Neg for QExp {
    type Output = QExp;
    fn neg(self) -> QExp {
        QExp(-self.0)
    }
}

impl Mul<i64> for QExp {
    type Output = QExp;
    fn mul(self, rhs: i64) -> QExp {
        QExp(self.0 * rhs)
    }
}

impl fmt::Display for QExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// Precision ceiling of a series: exponents strictly below a finite cutoff are
/// known exactly; an exact series is known everywhere.
///
/// Also used as an extended exponent (with `Exact` playing +∞) when bounding
/// the lowest possibly-nonzero exponent of a product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cutoff {
    Finite(QExp),
    Exact,
}

impl Cutoff {
    pub fn at(value: i64) -> Self {
        Cutoff::Finite(QExp::integer(value))
    }

    pub fn admits(self, exponent: QExp) -> bool {
        match self {
            Cutoff::Finite(limit) => exponent < limit,
            Cutoff::Exact => true,
        }
    }

    pub fn shifted(self, by: QExp) -> Self {
        match self {
            Cutoff::Finite(limit) => Cutoff::Finite(limit + by),
            Cutoff::Exact => Cutoff::Exact,
        }
    }

    pub fn plus(self, other: Cutoff) -> Self {
        match (self, other) {
            (Cutoff::Finite(a), Cutoff::Finite(b)) => Cutoff::Finite(a + b),
            _ => Cutoff::Exact,
        }
    }

    pub fn finite(self) -> Option<QExp> {
        match self {
            Cutoff::Finite(limit) => Some(limit),
            Cutoff::Exact => None,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Cutoff::Exact)
    }
}

impl PartialOrd for Cutoff {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cutoff {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Cutoff::Finite(a), Cutoff::Finite(b)) => a.cmp(b),
            (Cutoff::Finite(_), Cutoff::Exact) => Ordering::Less,
            (Cutoff::Exact, Cutoff::Finite(_)) => Ordering::Greater,
            (Cutoff::Exact, Cutoff::Exact) => Ordering::Equal,
        }
    }
}

impl From<QExp> for Cutoff {
    fn from(value: QExp) -> Self {
        Cutoff::Finite(value)
    }
}

impl fmt::Display for Cutoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cutoff::Finite(limit) => write!(f, "{limit}"),
            Cutoff::Exact => write!(f, "exact"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("the zero series has no valuation")]
    ZeroValuation,
    #[error("the zero series is not invertible")]
    ZeroInverse,
    #[error("the inverse of an exact series with several terms needs a finite cutoff")]
    UnboundedInverse,
    #[error("coefficient at T^{exponent} is beyond the cutoff {cutoff}")]
    BeyondCutoff { exponent: QExp, cutoff: Cutoff },
}

pub fn rational(numer: i64, denom: i64) -> Coeff {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn integer(value: i64) -> Coeff {
    BigRational::from_integer(BigInt::from(value))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NovikovSeries {
    terms: BTreeMap<QExp, Coeff>,
    cutoff: Cutoff,
}

impl NovikovSeries {
    pub fn zero(cutoff: Cutoff) -> Self {
        NovikovSeries {
            terms: BTreeMap::new(),
            cutoff,
        }
    }

    pub fn exact_zero() -> Self {
        Self::zero(Cutoff::Exact)
    }

    pub fn one() -> Self {
        Self::constant(Coeff::one())
    }

    /// Exact constant series.
    pub fn constant(value: Coeff) -> Self {
        Self::monomial(QExp::ZERO, value, Cutoff::Exact)
    }

    pub fn from_integer(value: i64) -> Self {
        Self::constant(integer(value))
    }

    pub fn monomial(exponent: QExp, coeff: Coeff, cutoff: Cutoff) -> Self {
        let mut series = Self::zero(cutoff);
        series.accumulate(exponent, coeff);
        series
    }

    /// Sums the given terms; repeated exponents are merged.
    pub fn from_terms<I>(terms: I, cutoff: Cutoff) -> Self
    where
        I: IntoIterator<Item = (QExp, Coeff)>,
    {
        let mut series = Self::zero(cutoff);
        for (exponent, coeff) in terms {
            series.accumulate(exponent, coeff);
        }
        series
    }

    pub fn from_integer_terms<I>(terms: I, cutoff: Cutoff) -> Self
    where
        I: IntoIterator<Item = (i64, i64)>,
    {
        Self::from_terms(
            terms
                .into_iter()
                .map(|(exponent, coeff)| (QExp::integer(exponent), integer(coeff))),
            cutoff,
        )
    }

    /// Adds `coeff T^exponent` in place, ignoring exponents beyond the cutoff.
    pub fn accumulate(&mut self, exponent: QExp, coeff: Coeff) {
        if coeff.is_zero() || !self.cutoff.admits(exponent) {
            return;
        }
        match self.terms.entry(exponent) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                let sum = slot.get() + &coeff;
                if sum.is_zero() {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
        }
    }

    pub fn terms(&self) -> &BTreeMap<QExp, Coeff> {
        &self.terms
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (&QExp, &Coeff)> {
        self.terms.iter()
    }

    pub fn cutoff(&self) -> Cutoff {
        self.cutoff
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when no term is stored: zero below the cutoff.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.cutoff.is_exact()
    }

    pub fn coeff(&self, exponent: QExp) -> Result<Coeff, SeriesError> {
        if !self.cutoff.admits(exponent) {
            return Err(SeriesError::BeyondCutoff {
                exponent,
                cutoff: self.cutoff,
            });
        }
        Ok(self.terms.get(&exponent).cloned().unwrap_or_else(Coeff::zero))
    }

    /// Coefficient at an integer exponent; zero when absent or beyond the cutoff.
    pub fn coeff_at(&self, exponent: i64) -> Coeff {
        self.terms
            .get(&QExp::integer(exponent))
            .cloned()
            .unwrap_or_else(Coeff::zero)
    }

    pub fn valuation(&self) -> Result<QExp, SeriesError> {
        self.terms
            .keys()
            .next()
            .copied()
            .ok_or(SeriesError::ZeroValuation)
    }

    /// Lowest exponent that may carry a nonzero coefficient: the valuation, or
    /// the cutoff for a series that vanishes below it.
    pub fn order(&self) -> Cutoff {
        match self.terms.keys().next() {
            Some(exponent) => Cutoff::Finite(*exponent),
            None => self.cutoff,
        }
    }

    pub fn leading_term(&self) -> Option<(QExp, &Coeff)> {
        self.terms.iter().next().map(|(e, c)| (*e, c))
    }

    /// Constant coefficient (exponent 0); zero when absent.
    pub fn constant_term(&self) -> Coeff {
        self.coeff_at(0)
    }

    pub fn truncate(&self, cutoff: Cutoff) -> Self {
        let cutoff = self.cutoff.min(cutoff);
        NovikovSeries {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| cutoff.admits(**e))
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
            cutoff,
        }
    }

    pub fn scale(&self, factor: &Coeff) -> Self {
        if factor.is_zero() {
            return Self::exact_zero();
        }
        NovikovSeries {
            terms: self.terms.iter().map(|(e, c)| (*e, c * factor)).collect(),
            cutoff: self.cutoff,
        }
    }

    /// Multiplies by `T^shift`.
    pub fn shift(&self, shift: QExp) -> Self {
        NovikovSeries {
            terms: self.terms.iter().map(|(e, c)| (*e + shift, c.clone())).collect(),
            cutoff: self.cutoff.shifted(shift),
        }
    }

    pub fn add_series(&self, other: &Self) -> Self {
        let mut result = self.truncate(other.cutoff);
        for (exponent, coeff) in &other.terms {
            result.accumulate(*exponent, coeff.clone());
        }
        result
    }

    pub fn sub_series(&self, other: &Self) -> Self {
        let mut result = self.truncate(other.cutoff);
        for (exponent, coeff) in &other.terms {
            result.accumulate(*exponent, -coeff.clone());
        }
        result
    }

    pub fn negate(&self) -> Self {
        NovikovSeries {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
            cutoff: self.cutoff,
        }
    }

    /// Cauchy product, truncated at `min(cutoff_a + val_b, cutoff_b + val_a)`.
    pub fn mul_series(&self, other: &Self) -> Self {
        let cutoff = self.order().plus(other.cutoff).min(other.order().plus(self.cutoff));
        let mut result = Self::zero(cutoff);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exponent = *ea + *eb;
                if !cutoff.admits(exponent) {
                    break;
                }
                result.accumulate(exponent, ca * cb);
            }
        }
        result
    }

    pub fn pow(&self, power: u32) -> Self {
        let mut result = Self::one();
        for _ in 0..power {
            result = result.mul_series(self);
        }
        result
    }

    /// Multiplicative inverse by factoring out the leading term and expanding
    /// a geometric series. The result has cutoff `cutoff - 2 val`.
    pub fn inv(&self) -> Result<Self, SeriesError> {
        let (valuation, lead) = self.leading_term().ok_or(SeriesError::ZeroInverse)?;
        let lead_inv = lead.recip();
        if self.terms.len() == 1 {
            return Ok(Self::monomial(-valuation, lead_inv, self.cutoff.shifted(-valuation * 2)));
        }
        let relative = match self.cutoff {
            Cutoff::Finite(limit) => Cutoff::Finite(limit - valuation),
            Cutoff::Exact => return Err(SeriesError::UnboundedInverse),
        };
        // a = lead T^v (1 + rest), rest has strictly positive exponents
        let mut rest = Self::zero(relative);
        for (exponent, coeff) in self.terms.iter().skip(1) {
            rest.accumulate(*exponent - valuation, coeff * &lead_inv);
        }
        let step = rest.negate();
        let mut sum = Self::one().truncate(relative);
        let mut power = Self::one().truncate(relative);
        loop {
            power = power.mul_series(&step).truncate(relative);
            if power.is_zero() {
                break;
            }
            sum = sum.add_series(&power);
        }
        Ok(sum.scale(&lead_inv).shift(-valuation))
    }

    pub fn div_series(&self, other: &Self) -> Result<Self, SeriesError> {
        Ok(self.mul_series(&other.inv()?))
    }

    /// Agreement of two series below `limit`; `None` when either is not known
    /// that far.
    pub fn agrees_below(&self, other: &Self, limit: Cutoff) -> Option<bool> {
        if self.cutoff < limit || other.cutoff < limit {
            return None;
        }
        Some(self.truncate(limit).terms == other.truncate(limit).terms)
    }

    /// `[exp_num, exp_den, coeff_num, coeff_den]` quadruples in exponent order.
    pub fn to_quadruples(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(e, c)| {
                    Value::Array(vec![
                        Value::from(e.numer()),
                        Value::from(e.denom()),
                        big_to_json(c.numer()),
                        big_to_json(c.denom()),
                    ])
                })
                .collect(),
        )
    }
}

fn big_to_json(value: &BigInt) -> Value {
    match value.to_i64() {
        Some(small) => Value::from(small),
        None => Value::from(value.to_string()),
    }
}

pub fn coeff_to_string(value: &Coeff) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

impl fmt::Display for NovikovSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (exponent, coeff) in &self.terms {
            let magnitude = coeff.abs();
            let sign = if coeff.is_negative() { "-" } else { "+" };
            if first {
                if coeff.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let is_unit = magnitude.is_one();
            if *exponent == QExp::ZERO {
                write!(f, "{}", coeff_to_string(&magnitude))?;
            } else {
                if !is_unit {
                    write!(f, "{}", coeff_to_string(&magnitude))?;
                }
                write!(f, "T^{exponent}")?;
            }
        }
        if let Cutoff::Finite(limit) = self.cutoff {
            if first {
                write!(f, "O(T^{limit})")
            } else {
                write!(f, " + O(T^{limit})")
            }
        } else if first {
            write!(f, "0")
        } else {
            Ok(())
        }
    }
}

impl Add for &NovikovSeries {
    type Output = NovikovSeries;
    fn add(self, rhs: &NovikovSeries) -> NovikovSeries {
        self.add_series(rhs)
    }
}

impl Sub for &NovikovSeries {
    type Output = NovikovSeries;
    fn sub(self, rhs: &NovikovSeries) -> NovikovSeries {
        self.sub_series(rhs)
    }
}

impl Mul for &NovikovSeries {
    type Output = NovikovSeries;
    fn mul(self, rhs: &NovikovSeries) -> NovikovSeries {
        self.mul_series(rhs)
    }
}

impl Neg for &NovikovSeries {
    type Output = NovikovSeries;
    fn neg(self) -> NovikovSeries {
        self.negate()
    }
}

impl Add for NovikovSeries {
    type Output = NovikovSeries;
    fn add(self, rhs: NovikovSeries) -> NovikovSeries {
        self.add_series(&rhs)
    }
}

impl Sub for NovikovSeries {
    type Output = NovikovSeries;
    fn sub(self, rhs: NovikovSeries) -> NovikovSeries {
        self.sub_series(&rhs)
    }
}

impl Mul for NovikovSeries {
    type Output = NovikovSeries;
    fn mul(self, rhs: NovikovSeries) -> NovikovSeries {
        self.mul_series(&rhs)
    }
}

impl Neg for NovikovSeries {
    type Output = NovikovSeries;
    fn neg(self) -> NovikovSeries {
        self.negate()
    }
}

/// Free-function forms of the ring operations.
pub fn qs_add(a: &NovikovSeries, b: &NovikovSeries) -> NovikovSeries {
    a.add_series(b)
}

pub fn qs_mul(a: &NovikovSeries, b: &NovikovSeries) -> NovikovSeries {
    a.mul_series(b)
}

pub fn qs_inv(a: &NovikovSeries) -> Result<NovikovSeries, SeriesError> {
    a.inv()
}

pub fn qs_valuation(a: &NovikovSeries) -> Result<QExp, SeriesError> {
    a.valuation()
}

/// Integer floor of a rational exponent.
pub fn floor_exp(value: QExp) -> i64 {
    value.ratio().numer().div_floor(value.ratio().denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(terms: &[(i64, i64)], cutoff: i64) -> NovikovSeries {
        NovikovSeries::from_integer_terms(terms.iter().copied(), Cutoff::at(cutoff))
    }

    #[test]
    fn cancellation_purges_zero_terms() {
        let sum = series(&[(1, 1), (4, 1)], 10) + series(&[(1, -1)], 10);
        assert_eq!(sum, series(&[(4, 1)], 10));
    }

    #[test]
    fn fractional_exponents_add() {
        let a = NovikovSeries::monomial(QExp::integer(1), integer(1), Cutoff::Exact);
        let b = NovikovSeries::monomial(QExp::new(1, 4), integer(1), Cutoff::Exact);
        let product = &a * &b;
        assert_eq!(product.valuation().unwrap(), QExp::new(5, 4));
        assert!(product.is_exact());
    }

    #[test]
    fn product_cutoff_uses_valuations() {
        let a = series(&[(2, 1)], 10);
        let b = series(&[(3, 1)], 7);
        assert_eq!((&a * &b).cutoff(), Cutoff::at(9));
    }

    #[test]
    fn inverse_of_binomial() {
        let a = series(&[(1, 1), (25, -1)], 200);
        let inv = a.inv().unwrap();
        assert_eq!(inv.valuation().unwrap(), QExp::integer(-1));
        assert_eq!(inv.cutoff(), Cutoff::at(198));
        assert_eq!(inv.coeff_at(23), integer(1));
        let product = &a * &inv;
        assert_eq!(product.terms().len(), 1);
        assert_eq!(product.constant_term(), integer(1));
    }

    #[test]
    fn exact_monomial_inverse_stays_exact() {
        let a = NovikovSeries::monomial(QExp::integer(3), integer(2), Cutoff::Exact);
        let inv = a.inv().unwrap();
        assert!(inv.is_exact());
        assert_eq!(inv.coeff(QExp::integer(-3)).unwrap(), rational(1, 2));
    }

    #[test]
    fn zero_has_no_inverse_or_valuation() {
        assert_eq!(NovikovSeries::exact_zero().inv(), Err(SeriesError::ZeroInverse));
        assert_eq!(
            NovikovSeries::zero(Cutoff::at(3)).valuation(),
            Err(SeriesError::ZeroValuation)
        );
    }

    #[test]
    fn decimal_parsing() {
        assert_eq!(QExp::parse_decimal("200").unwrap(), QExp::integer(200));
        assert_eq!(QExp::parse_decimal("0.5").unwrap(), QExp::new(1, 2));
        assert_eq!(QExp::parse_decimal("-1.25").unwrap(), QExp::new(-5, 4));
        assert_eq!(QExp::parse_decimal("9/4").unwrap(), QExp::new(9, 4));
        assert!(QExp::parse_decimal("1e3").is_err());
        assert!(QExp::parse_decimal(".").is_err());
    }

    #[test]
    fn rendering() {
        let a = series(&[(9, -1), (81, 3)], 200);
        assert_eq!(a.to_string(), "-T^9 + 3T^81 + O(T^200)");
        assert_eq!(NovikovSeries::exact_zero().to_string(), "0");
    }
}
