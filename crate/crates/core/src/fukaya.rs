//! Combinatorial Floer theory on the hexagonal torus `C/(Z + ξZ)`, `ξ = e^{2πi/3}`.
//!
//! Points are written in lattice coordinates `(u, v)` meaning `u + vξ`; all
//! geometry is exact over the rationals. A linear Lagrangian with direction
//! `(a, b)` is the image of the line `{P : b u − a v ≡ offset mod 1}`.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::matrix::PolyMatrix;
use crate::qseries::{integer, Cutoff, NovikovSeries, QExp};
use crate::ring::{GradedPolynomial, Monomial, Var};

pub type Coord = Rational64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FukayaError {
    #[error("direction ({0}, {1}) is not primitive")]
    NotPrimitive(i64, i64),
    #[error("lagrangians are parallel")]
    Parallel,
    #[error("lagrangian has no grading")]
    Ungraded,
    #[error("fractional gradings of different orders ({0} and {1})")]
    MixedOrders(u32, u32),
    #[error("unsupported position: {0}")]
    Unsupported(String),
}

fn ratio(numer: i64, denom: i64) -> Coord {
    Coord::new(numer, denom)
}

fn whole(value: i64) -> Coord {
    Coord::from_integer(value)
}

fn frac(value: Coord) -> Coord {
    value - value.floor()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticePoint {
    pub u: Coord,
    pub v: Coord,
}

impl LatticePoint {
    pub fn new(u: Coord, v: Coord) -> Self {
        LatticePoint { u, v }
    }

    /// Representative in `[0, 1)²`.
    pub fn reduced(self) -> Self {
        LatticePoint::new(frac(self.u), frac(self.v))
    }

    /// Rotation by `−2π/3`.
    pub fn tau(self) -> Self {
        LatticePoint::new(self.v - self.u, -self.u)
    }

    pub fn translated(self, du: Coord, dv: Coord) -> Self {
        LatticePoint::new(self.u + du, self.v + dv)
    }

    fn dot(self, vector: (i64, i64)) -> Coord {
        self.u * vector.0 + self.v * vector.1
    }

    fn minus(self, other: LatticePoint) -> (Coord, Coord) {
        (self.u - other.u, self.v - other.v)
    }

    pub fn to_json(self) -> Value {
        json!([self.u.to_string(), self.v.to_string()])
    }
}

fn cross(origin: LatticePoint, first: LatticePoint, second: LatticePoint) -> Coord {
    let (au, av) = first.minus(origin);
    let (bu, bv) = second.minus(origin);
    au * bv - av * bu
}

/// The torus with its fundamental domain as the unit of area.
#[derive(Clone, Copy, Debug, Default)]
pub struct TorusLattice;

impl TorusLattice {
    pub const FUNDAMENTAL_AREA: i64 = 1;

    /// Signed shoelace area; counterclockwise is positive.
    pub fn signed_area(polygon: &[LatticePoint]) -> Coord {
        let mut twice = Coord::zero();
        for (index, point) in polygon.iter().enumerate() {
            let next = polygon[(index + 1) % polygon.len()];
            twice += point.u * next.v - next.u * point.v;
        }
        twice / 2
    }

    /// `u + vξ = (u − v/2) + i·(v/2)·√3`, returned as `(u − v/2, v/2)`.
    pub fn complex_parts(point: LatticePoint) -> (Coord, Coord) {
        (point.u - point.v / 2, point.v / 2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Direction {
    pub a: i64,
    pub b: i64,
}

impl Direction {
    pub fn new(a: i64, b: i64) -> Result<Self, FukayaError> {
        if a.gcd(&b) != 1 {
            return Err(FukayaError::NotPrimitive(a, b));
        }
        Ok(Direction { a, b })
    }

    pub fn normal(self) -> (i64, i64) {
        (self.b, -self.a)
    }

    pub fn vector(self) -> (i64, i64) {
        (self.a, self.b)
    }

    pub fn cross(self, other: Direction) -> i64 {
        self.a * other.b - self.b * other.a
    }

    pub fn is_vertical(self) -> bool {
        2 * self.a == self.b && self.b > 0
    }

    /// Oriented angle in units of `π`, in `(−1, 1]`, when it is a multiple of `π/6`.
    pub fn phase(self) -> Option<Coord> {
        let (a, b) = (self.a, self.b);
        let real = 2 * a - b;
        let base = if b == 0 {
            whole(0)
        } else if real == 0 {
            ratio(1, 2)
        } else if a == b {
            ratio(1, 3)
        } else if a == 0 {
            ratio(-1, 3)
        } else if a == 2 * b {
            ratio(1, 6)
        } else if a == -b {
            ratio(-1, 6)
        } else {
            return None;
        };
        let backwards = real < 0 || (real == 0 && b < 0);
        Some(match (backwards, base.is_positive()) {
            (false, _) => base,
            (true, true) => base - 1,
            (true, false) => base + 1,
        })
    }
}

/// Phase datum measured against `Ω^{⊗order}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FractionalPhase {
    pub order: u32,
    pub value: Coord,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearLagrangian {
    pub direction: Direction,
    pub offset: Coord,
    pub shift: i64,
    pub spin_marker: Option<LatticePoint>,
    /// Ordinary phase in units of `π`, before the shift.
    pub phase: Option<Coord>,
    pub fractional: Option<FractionalPhase>,
}

impl LinearLagrangian {
    /// The line through `(c, 0)` in direction `a + bξ`.
    pub fn through(a: i64, b: i64, c: Coord) -> Result<Self, FukayaError> {
        let direction = Direction::new(a, b)?;
        Ok(Self::with_offset(direction, c * b))
    }

    pub fn with_offset(direction: Direction, offset: Coord) -> Self {
        LinearLagrangian {
            direction,
            offset: frac(offset),
            shift: 0,
            spin_marker: None,
            phase: direction.phase(),
            fractional: None,
        }
    }

    pub fn shifted(mut self, by: i64) -> Self {
        self.shift += by;
        self
    }

    pub fn with_phase(mut self, phase: Coord) -> Self {
        self.phase = Some(phase);
        self
    }

    pub fn with_fractional(mut self, order: u32, value: Coord) -> Self {
        self.fractional = Some(FractionalPhase { order, value });
        self
    }

    pub fn with_spin_marker(mut self, marker: LatticePoint) -> Self {
        self.spin_marker = Some(marker);
        self
    }

    /// Phase after the shift; `[1]` lowers the phase by `π`.
    pub fn effective_phase(&self) -> Option<Coord> {
        self.phase.map(|phase| phase - self.shift)
    }

    pub fn contains(&self, point: LatticePoint) -> bool {
        frac(point.dot(self.direction.normal()) - self.offset).is_zero()
    }

    /// A point on the line.
    pub fn base_point(&self) -> LatticePoint {
        let (nu, nv) = self.direction.normal();
        if nu != 0 {
            LatticePoint::new(self.offset / nu, whole(0))
        } else {
            LatticePoint::new(whole(0), self.offset / nv)
        }
    }

    /// Image under an integer linear map followed by a translation.
    fn transformed(&self, linear: [[i64; 2]; 2], translation: LatticePoint) -> Self {
        let map = |point: LatticePoint| {
            LatticePoint::new(
                point.u * linear[0][0] + point.v * linear[0][1] + translation.u,
                point.u * linear[1][0] + point.v * linear[1][1] + translation.v,
            )
        };
        let (a, b) = self.direction.vector();
        let direction = Direction {
            a: linear[0][0] * a + linear[0][1] * b,
            b: linear[1][0] * a + linear[1][1] * b,
        };
        let offset = map(self.base_point()).dot(direction.normal());
        let mut image = LinearLagrangian::with_offset(direction, offset);
        image.shift = self.shift;
        image.spin_marker = self.spin_marker.map(map);
        image
    }

    pub fn to_json(&self) -> Value {
        json!({
            "direction": [self.direction.a, self.direction.b],
            "offset": self.offset.to_string(),
            "shift": self.shift,
            "phase": self.phase.map(|p| p.to_string()),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionPoint {
    pub location: LatticePoint,
    pub source: Direction,
    pub target: Direction,
    pub degree: Option<i64>,
    pub parity: u8,
}

/// Meeting point of `n1·P = c1` and `n2·P = c2`.
fn meet(n1: (i64, i64), c1: Coord, n2: (i64, i64), c2: Coord) -> Option<LatticePoint> {
    let det = n1.0 * n2.1 - n1.1 * n2.0;
    if det == 0 {
        return None;
    }
    Some(LatticePoint::new(
        (c1 * n2.1 - c2 * n1.1) / det,
        (c2 * n1.0 - c1 * n2.0) / det,
    ))
}

/// The `|a₁b₂ − a₂b₁|` transverse intersection points, sorted.
pub fn intersect(
    first: &LinearLagrangian,
    second: &LinearLagrangian,
) -> Result<Vec<IntersectionPoint>, FukayaError> {
    let det = first.direction.cross(second.direction).abs();
    if det == 0 {
        return Err(FukayaError::Parallel);
    }
    let degree = intersection_degree(first, second).ok();
    let parity = orientation_parity(first.direction, second.direction);
    let mut locations = std::collections::BTreeSet::new();
    for k1 in 0..det {
        for k2 in 0..det {
            let point = meet(
                first.direction.normal(),
                first.offset + k1,
                second.direction.normal(),
                second.offset + k2,
            )
            .ok_or(FukayaError::Parallel)?;
            locations.insert(point.reduced());
        }
    }
    Ok(locations
        .into_iter()
        .map(|location| IntersectionPoint {
            location,
            source: first.direction,
            target: second.direction,
            degree,
            parity,
        })
        .collect())
}

/// `ℤ/2` degree of a point of `CF(source, target)`: even exactly when the
/// target turns clockwise from the source.
pub fn orientation_parity(source: Direction, target: Direction) -> u8 {
    u8::from(source.cross(target) > 0)
}

/// Positive-definite rotation from the target line to the source line, in
/// units of `π`, strictly between 0 and 1.
fn positive_path(source_angle: Coord, target_angle: Coord) -> Result<Coord, FukayaError> {
    let path = frac(source_angle - target_angle);
    if path.is_zero() {
        return Err(FukayaError::Parallel);
    }
    Ok(path)
}

/// Integer degree of the intersection points of `CF(source, target)`.
pub fn intersection_degree(
    source: &LinearLagrangian,
    target: &LinearLagrangian,
) -> Result<i64, FukayaError> {
    let (Some(first), Some(second)) = (source.effective_phase(), target.effective_phase()) else {
        return Err(FukayaError::Ungraded);
    };
    let degree = second - first + positive_path(first, second)?;
    Ok(degree.to_integer())
}

/// Fractional degree `(θ₂ − θ₁ + order·path) / order` for `Ω^{⊗order}` phases.
pub fn fractional_degree(
    source: &LinearLagrangian,
    target: &LinearLagrangian,
) -> Result<Coord, FukayaError> {
    let (Some(first), Some(second)) = (source.fractional, target.fractional) else {
        return Err(FukayaError::Ungraded);
    };
    if first.order != second.order {
        return Err(FukayaError::MixedOrders(first.order, second.order));
    }
    let (Some(source_angle), Some(target_angle)) = (source.direction.phase(), target.direction.phase())
    else {
        return Err(FukayaError::Ungraded);
    };
    let order = i64::from(first.order);
    let shifts = whole(order * (target.shift - source.shift));
    let numer = second.value - first.value - shifts + positive_path(source_angle, target_angle)? * order;
    Ok(numer / order)
}

/// Image of a Lagrangian under `𝒮_i = τ^d ∘ t_(0,1/2) ∘ (1 0; −3i+2 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplectoImage {
    pub index: i64,
    pub before_rotation: LinearLagrangian,
    pub lagrangian: LinearLagrangian,
    pub rotation: i64,
    pub j: i64,
    /// The formal shift `[−j]` attached to `𝒮_i`.
    pub nominal_shift: i64,
    /// Shift making the graded image equal `τ^{−i}` of the vertical branch.
    pub grading_shift: i64,
}

pub fn apply_symplectomorphism(index: i64, lagrangian: &LinearLagrangian) -> SymplectoImage {
    let j = Integer::div_floor(&-index, &3);
    let rotation = -index - 3 * j;
    let sheared = lagrangian.transformed(
        [[1, 0], [2 - 3 * index, 1]],
        LatticePoint::new(whole(0), ratio(1, 2)),
    );
    let mut rotated = sheared.clone();
    for _ in 0..rotation {
        rotated = rotated.transformed([[-1, 1], [-1, 0]], LatticePoint::new(whole(0), whole(0)));
    }
    let phase = sheared.direction.phase();
    rotated.phase = phase.map(|angle| angle - ratio(2 * rotation, 3));
    rotated.shift = lagrangian.shift + 2 * j;
    SymplectoImage {
        index,
        before_rotation: sheared,
        lagrangian: rotated,
        rotation,
        j,
        nominal_shift: -j,
        grading_shift: 2 * j,
    }
}

/// Signed area-weighted counts keyed by output generator and insertion monomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountSeries {
    pub cutoff: Cutoff,
    entries: BTreeMap<String, BTreeMap<Monomial, NovikovSeries>>,
}

impl CountSeries {
    pub fn new(cutoff: Cutoff) -> Self {
        CountSeries {
            cutoff,
            entries: BTreeMap::new(),
        }
    }

    pub fn record(&mut self, generator: &str, monomial: Monomial, exponent: QExp, sign: i64) {
        let cutoff = self.cutoff;
        self.entries
            .entry(generator.to_string())
            .or_default()
            .entry(monomial)
            .or_insert_with(|| NovikovSeries::zero(cutoff))
            .accumulate(exponent, integer(sign));
    }

    pub fn record_series(&mut self, generator: &str, monomial: Monomial, series: &NovikovSeries) {
        for (exponent, coeff) in series.iter() {
            let cutoff = self.cutoff;
            self.entries
                .entry(generator.to_string())
                .or_default()
                .entry(monomial)
                .or_insert_with(|| NovikovSeries::zero(cutoff))
                .accumulate(*exponent, coeff.clone());
        }
    }

    pub fn series(&self, generator: &str, monomial: Monomial) -> NovikovSeries {
        self.entries
            .get(generator)
            .and_then(|by_monomial| by_monomial.get(&monomial))
            .cloned()
            .unwrap_or_else(|| NovikovSeries::zero(self.cutoff))
    }

    pub fn generators(&self) -> impl Iterator<Item = &String> {
        self.entries.keys()
    }

    pub fn monomials(&self, generator: &str) -> Vec<Monomial> {
        self.entries
            .get(generator)
            .map(|by_monomial| {
                by_monomial
                    .iter()
                    .filter(|(_, series)| !series.is_zero())
                    .map(|(monomial, _)| *monomial)
                    .collect()
            })
            .unwrap_or_default()
    }

    /// The coefficients of one output as a polynomial.
    pub fn polynomial(&self, generator: &str) -> GradedPolynomial {
        let mut poly = GradedPolynomial::zero_below(self.cutoff);
        if let Some(by_monomial) = self.entries.get(generator) {
            for (monomial, series) in by_monomial {
                poly.accumulate(*monomial, series.clone());
            }
        }
        poly
    }

    pub fn to_json(&self) -> Value {
        let mut outputs = Map::new();
        for (generator, by_monomial) in &self.entries {
            let mut inner = Map::new();
            for (monomial, series) in by_monomial {
                if !series.is_zero() {
                    inner.insert(monomial.to_string(), series.to_quadruples());
                }
            }
            outputs.insert(generator.clone(), Value::Object(inner));
        }
        json!({ "cutoff": self.cutoff.to_string(), "outputs": outputs })
    }
}

/// Number of lifts of `marker` on the line `normal·P = value` strictly between `from` and `to`.
fn marker_lifts_between(
    marker: LatticePoint,
    normal: (i64, i64),
    value: Coord,
    direction: (i64, i64),
    from: LatticePoint,
    to: LatticePoint,
) -> usize {
    let gap = value - marker.dot(normal);
    if !gap.is_integer() {
        return 0;
    }
    let steps = gap.to_integer();
    let bezout = normal.0.extended_gcd(&normal.1);
    let (mu, mv) = (bezout.x * steps / bezout.gcd, bezout.y * steps / bezout.gcd);
    let anchor = marker.translated(whole(mu), whole(mv));
    let length = whole(direction.0 * direction.0 + direction.1 * direction.1);
    let position = |point: LatticePoint| {
        let (du, dv) = point.minus(anchor);
        (du * direction.0 + dv * direction.1) / length
    };
    let (low, high) = {
        let (a, b) = (position(from), position(to));
        if a < b { (a, b) } else { (b, a) }
    };
    let first = low.floor().to_integer() + 1;
    let last = high.ceil().to_integer() - 1;
    usize::try_from((last - first + 1).max(0)).unwrap_or(0)
}

/// Boundary sign of a polygon: the arc leaving the output is ignored, a
/// disagreeing arc out of corner `p` contributes `(−1)^{|p|}`, the arc into the
/// output `(−1)^{|p_k| + |q|}`, and every spin marker crossed `(−1)`.
pub fn boundary_sign(arcs: &[BoundaryArc], corner_parities: &[u8], output_parity: u8) -> i64 {
    let mut flips = 0u32;
    let corners = corner_parities.len();
    for (index, arc) in arcs.iter().enumerate() {
        flips += arc.markers as u32;
        if index == 0 || arc.agrees {
            continue;
        }
        let parity = if index == corners {
            corner_parities[corners - 1] + output_parity
        } else {
            corner_parities[index - 1]
        };
        flips += u32::from(parity % 2);
    }
    if flips % 2 == 0 { 1 } else { -1 }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundaryArc {
    pub agrees: bool,
    pub markers: usize,
}

fn arc_on(
    lagrangian: &LinearLagrangian,
    value: Coord,
    from: LatticePoint,
    to: LatticePoint,
) -> BoundaryArc {
    let (du, dv) = to.minus(from);
    let along = du * lagrangian.direction.a + dv * lagrangian.direction.b;
    let markers = lagrangian.spin_marker.map_or(0, |marker| {
        marker_lifts_between(
            marker,
            lagrangian.direction.normal(),
            value,
            lagrangian.direction.vector(),
            from,
            to,
        )
    });
    BoundaryArc {
        agrees: along.is_positive(),
        markers,
    }
}

pub const TRIANGLE_OUTPUT: &str = "q";

/// Counts of triangles with corners `p1 ∈ CF(L0, L1)`, `p2 ∈ CF(L1, L2)` and
/// counterclockwise boundary, keyed by the output point of `CF(L0, L2)`.
///
/// Exponents are areas in units of the fundamental domain. The constant
/// triangle at a triple intersection counts once.
pub fn enumerate_triangles(
    lines: [&LinearLagrangian; 3],
    p1: &IntersectionPoint,
    p2: &IntersectionPoint,
    area_cutoff: QExp,
) -> Result<CountSeries, FukayaError> {
    let [l0, l1, l2] = lines;
    let normals = lines.map(|line| line.direction.normal());
    let corner = p1.location;
    let (value0, value1) = (corner.dot(normals[0]), corner.dot(normals[1]));
    let concurrent = corner.dot(normals[2]);
    let lift_value = |step: i64| concurrent + frac(l2.offset - concurrent) + step;
    let vertices = |value2: Coord| -> Result<(LatticePoint, LatticePoint), FukayaError> {
        let p12 = meet(normals[1], value1, normals[2], value2).ok_or(FukayaError::Parallel)?;
        let p20 = meet(normals[2], value2, normals[0], value0).ok_or(FukayaError::Parallel)?;
        Ok((p12, p20))
    };
    let parities = [
        orientation_parity(l0.direction, l1.direction),
        orientation_parity(l1.direction, l2.direction),
    ];
    let output_parity = orientation_parity(l0.direction, l2.direction);
    let limit = Cutoff::Finite(area_cutoff);
    let mut counts = CountSeries::new(limit);
    for direction in [1i64, -1] {
        let mut step = if direction > 0 { 0 } else { -1 };
        loop {
            let value2 = lift_value(step);
            let (p12, p20) = vertices(value2)?;
            let area = TorusLattice::signed_area(&[corner, p12, p20]);
            if !limit.admits(QExp::from_ratio(area.abs())) {
                break;
            }
            step += direction;
            if p12.reduced() != p2.location || area.is_negative() {
                continue;
            }
            if area.is_zero() && (p12 != corner || p20 != corner) {
                continue;
            }
            let arcs = [
                arc_on(l0, value0, p20, corner),
                arc_on(l1, value1, corner, p12),
                arc_on(l2, value2, p12, p20),
            ];
            let sign = boundary_sign(&arcs, &parities, output_parity);
            let output_point = p20.reduced();
            let name = format!("{TRIANGLE_OUTPUT}({},{})", output_point.u, output_point.v);
            counts.record(&name, Monomial::ONE, QExp::from_ratio(area), sign);
        }
    }
    Ok(counts)
}

/// `θ[c](w^scale)` at nome `q^nome`: `Σ_m q^{nome (m+c)²/2} w^{scale (m+c)}`,
/// keyed by the `w` exponent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaSeries {
    pub cutoff: Cutoff,
    pub terms: BTreeMap<QExp, NovikovSeries>,
}

impl ThetaSeries {
    pub fn new(characteristic: Coord, scale: i64, nome: i64, cutoff: QExp) -> Self {
        let limit = Cutoff::Finite(cutoff);
        let mut terms = BTreeMap::new();
        let reach = (cutoff.ratio() * 2 / nome).ceil().to_integer();
        let mut bound = 1i64;
        while bound * bound <= reach {
            bound += 1;
        }
        for index in -bound - 1..=bound + 1 {
            let shifted = characteristic + index;
            let exponent = QExp::from_ratio(shifted * shifted * nome / 2);
            if !limit.admits(exponent) {
                continue;
            }
            terms
                .entry(QExp::from_ratio(shifted * scale))
                .or_insert_with(|| NovikovSeries::zero(limit))
                .accumulate(exponent, integer(1));
        }
        ThetaSeries { cutoff: limit, terms }
    }

    /// Value at `w = 1`.
    pub fn at_one(&self) -> NovikovSeries {
        self.terms
            .values()
            .fold(NovikovSeries::zero(self.cutoff), |sum, series| sum.add_series(series))
    }

    pub fn mul(&self, other: &ThetaSeries) -> ThetaSeries {
        let cutoff = self.cutoff.min(other.cutoff);
        let mut terms: BTreeMap<QExp, NovikovSeries> = BTreeMap::new();
        for (left_w, left) in &self.terms {
            for (right_w, right) in &other.terms {
                let product = left.mul_series(right).truncate(cutoff);
                let slot = terms
                    .entry(*left_w + *right_w)
                    .or_insert_with(|| NovikovSeries::zero(cutoff));
                *slot = slot.add_series(&product);
            }
        }
        terms.retain(|_, series| !series.is_zero());
        ThetaSeries { cutoff, terms }
    }

    pub fn scaled(&self, factor: &NovikovSeries) -> ThetaSeries {
        let mut terms: BTreeMap<QExp, NovikovSeries> = self
            .terms
            .iter()
            .map(|(w, series)| (*w, series.mul_series(factor).truncate(self.cutoff)))
            .collect();
        terms.retain(|_, series| !series.is_zero());
        ThetaSeries {
            cutoff: self.cutoff,
            terms,
        }
    }

    pub fn add(&self, other: &ThetaSeries) -> ThetaSeries {
        let cutoff = self.cutoff.min(other.cutoff);
        let mut terms = self.terms.clone();
        for (w, series) in &other.terms {
            let slot = terms.entry(*w).or_insert_with(|| NovikovSeries::zero(cutoff));
            *slot = slot.add_series(series).truncate(cutoff);
        }
        terms.retain(|_, series| !series.is_zero());
        ThetaSeries { cutoff, terms }
    }

    pub fn agrees_with(&self, other: &ThetaSeries) -> bool {
        let limit = self.cutoff.min(other.cutoff);
        let keys: std::collections::BTreeSet<_> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter().all(|w| {
            let zero = NovikovSeries::zero(limit);
            let left = self.terms.get(w).unwrap_or(&zero);
            let right = other.terms.get(w).unwrap_or(&zero);
            left.agrees_below(right, limit) == Some(true)
        })
    }
}

/// `θ[c](1) = Σ_m q^{(m+c)²/2}`.
pub fn theta_series(characteristic: Coord, cutoff: QExp) -> NovikovSeries {
    ThetaSeries::new(characteristic, 1, 1, cutoff).at_one()
}

/// `m₂(p, p)` for `L_(1,0)`, `L_(1,−1)`, `L_(1,−2)` through the origin.
pub fn standard_triangle_counts(area_cutoff: QExp) -> Result<CountSeries, FukayaError> {
    let [l0, l1, l2] = [0, -1, -2].map(|slope| LinearLagrangian::through(1, slope, whole(0)));
    let (l0, l1, l2) = (l0?, l1?, l2?);
    let first = intersect(&l0, &l1)?;
    let second = intersect(&l1, &l2)?;
    enumerate_triangles([&l0, &l1, &l2], &first[0], &second[0], area_cutoff)
}

/// `θ[c](1)` at the nome `q²`, the unit in which triangle areas are counted.
pub fn theta_in_area_units(characteristic: Coord, cutoff: QExp) -> NovikovSeries {
    let half_cutoff = QExp::from_ratio(cutoff.ratio() / 2);
    let series = theta_series(characteristic, half_cutoff);
    NovikovSeries::from_terms(
        series.iter().map(|(exponent, coeff)| (*exponent * 2, coeff.clone())),
        Cutoff::Finite(cutoff),
    )
}

/// `θ[0](w)² = θ[0](1)θ[0](w²) + θ[1/2](1)θ[1/2](w²)`, the right side taken at
/// the doubled nome `q²`.
pub fn addition_formula_check(cutoff: QExp) -> bool {
    let (left, right) = addition_formula_sides(cutoff, 2);
    left.agrees_with(&right)
}

/// Both sides of the addition formula with the right side at nome `q^nome`.
pub fn addition_formula_sides(cutoff: QExp, nome: i64) -> (ThetaSeries, ThetaSeries) {
    let half = ratio(1, 2);
    let plain = ThetaSeries::new(whole(0), 1, 1, cutoff);
    let left = plain.mul(&plain);
    let term = |characteristic: Coord| {
        let constant = ThetaSeries::new(characteristic, 1, nome, cutoff).at_one();
        ThetaSeries::new(characteristic, 2, nome, cutoff).scaled(&constant)
    };
    (left, term(whole(0)).add(&term(half)))
}

/// Branch families of the Seidel Lagrangian: normals, directions, and a
/// parameter taking the value 3 along one period.
const NORMALS: [(i64, i64); 3] = [(2, -1), (1, 1), (1, -2)];
const DIRECTIONS: [(i64, i64); 3] = [(1, 2), (1, -1), (-2, -1)];
const PARAMS: [(i64, i64); 3] = [(1, 1), (2, -1), (-1, -1)];
const PERIOD: i64 = 3;

fn half() -> Coord {
    ratio(1, 2)
}

fn family_meet(first: usize, value1: Coord, second: usize, value2: Coord) -> LatticePoint {
    meet(NORMALS[first], value1, NORMALS[second], value2).expect("branch families are transverse")
}

fn family_param(family: usize, point: LatticePoint) -> Coord {
    point.dot(PARAMS[family])
}

fn point_at(family: usize, value: Coord, param: Coord) -> LatticePoint {
    meet(NORMALS[family], value, PARAMS[family], param).expect("parameter is transverse")
}

fn agrees(family: usize, from: LatticePoint, to: LatticePoint) -> bool {
    let (du, dv) = to.minus(from);
    (du * DIRECTIONS[family].0 + dv * DIRECTIONS[family].1).is_positive()
}

/// Lifts `start + 3k` strictly inside the open interval.
fn lifts_in(start: Coord, low: Coord, high: Coord) -> i64 {
    let first = ((low - start) / PERIOD).floor().to_integer() + 1;
    let last = ((high - start) / PERIOD).ceil().to_integer() - 1;
    (last - first + 1).max(0)
}

fn modulo_period(value: Coord) -> Coord {
    value - (value / PERIOD).floor() * PERIOD
}

/// `y` on the half-period orbit, `x` and `z` told apart by `2(u − v) mod 1`.
pub fn immersed_label(point: LatticePoint) -> Var {
    let point = point.reduced();
    if (point.u * 2).is_integer() && (point.v * 2).is_integer() {
        Var::Y
    } else if frac((point.u - point.v) * 2) == ratio(1, 3) {
        Var::X
    } else {
        Var::Z
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImmersedPoint {
    pub name: String,
    pub location: LatticePoint,
    pub label: Var,
    /// Branch families meeting here, in the order `(f, f+1)`.
    pub families: (usize, usize),
}

/// Morse data on a Lagrangian overlapping branch 0, in the branch parameter:
/// the minimum `a₀`, the maximum `b₀` and the spin marker.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MorseCalibration {
    pub minimum: Coord,
    pub maximum: Coord,
    pub marker: Option<Coord>,
}

impl MorseCalibration {
    /// The same data on a Lagrangian overlapping `family`, transported by `τ^family`.
    pub fn on_family(self, family: usize) -> MorseCalibration {
        let offset = if family == 0 { whole(0) } else { ratio(3, 2) };
        MorseCalibration {
            minimum: modulo_period(self.minimum + offset),
            maximum: modulo_period(self.maximum + offset),
            marker: self.marker.map(|marker| modulo_period(marker + offset)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeidelConfig {
    pub branches: [LinearLagrangian; 3],
    pub immersed: Vec<ImmersedPoint>,
    pub morse: MorseCalibration,
    /// Sign of each generator in the basis of `CF(𝕃, L′)`; the distinguished
    /// pair `a₀, b₀` is fixed to `+1`.
    pub crossing_gauge: i64,
    /// Sign applied to the odd-to-even block.
    pub odd_block_sign: i64,
}

impl SeidelConfig {
    pub fn standard() -> Self {
        let marker = |family: usize, param: Coord| point_at(family, half(), param);
        let markers = [
            marker(0, ratio(7, 4)),
            marker(1, ratio(1, 4)),
            marker(2, ratio(1, 4)),
        ];
        let branches = [0usize, 1, 2].map(|family| {
            let (a, b) = DIRECTIONS[family];
            let direction = Direction { a, b };
            LinearLagrangian::with_offset(direction, half())
                .with_phase(ratio(1, 2) - ratio(2 * family as i64, 3))
                .with_fractional(3, ratio(-1, 2))
                .with_spin_marker(markers[family])
        });
        let mut immersed = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        for family in 0..3 {
            let next = (family + 1) % 3;
            for k1 in 0..3 {
                for k2 in 0..3 {
                    let point = family_meet(family, half() + k1, next, half() + k2).reduced();
                    if seen.insert(point) {
                        immersed.push((point, (family, next)));
                    }
                }
            }
        }
        immersed.sort();
        let mut counters = [0usize; 3];
        let immersed = immersed
            .into_iter()
            .map(|(location, families)| {
                let label = immersed_label(location);
                counters[label.index()] += 1;
                ImmersedPoint {
                    name: format!("{}{}", label.name().to_uppercase(), counters[label.index()]),
                    location,
                    label,
                    families,
                }
            })
            .collect();
        SeidelConfig {
            branches,
            immersed,
            morse: MorseCalibration {
                minimum: ratio(9, 8),
                maximum: ratio(23, 8),
                marker: Some(ratio(7, 4)),
            },
            crossing_gauge: -1,
            odd_block_sign: -1,
        }
    }

    /// The configuration with the marker of the test Lagrangian moved to the
    /// opposite half of the circle.
    pub fn with_moved_marker(mut self) -> Self {
        self.morse.marker = self.morse.marker.map(|marker| modulo_period(marker + ratio(3, 2)));
        self
    }

    fn branch_arc(&self, family: usize, value: Coord, from: LatticePoint, to: LatticePoint) -> usize {
        self.branches[family].spin_marker.map_or(0, |marker| {
            marker_lifts_between(marker, NORMALS[family], value, DIRECTIONS[family], from, to)
        })
    }

    /// Area of the minimal triangle cut out by the three branches.
    pub fn minimal_area() -> Coord {
        let corners = [
            family_meet(0, half(), 1, half()),
            family_meet(1, half(), 2, half()),
            family_meet(2, half(), 0, half()),
        ];
        TorusLattice::signed_area(&corners).abs()
    }

    /// Fractional degree of an immersed corner as a morphism from branch
    /// `f + 1` to branch `f`.
    pub fn corner_degree(&self, point: &ImmersedPoint) -> Result<Coord, FukayaError> {
        let (family, next) = point.families;
        fractional_degree(&self.branches[next], &self.branches[family])
    }

    pub fn to_json(&self) -> Value {
        json!({
            "branches": self.branches.iter().map(LinearLagrangian::to_json).collect::<Vec<_>>(),
            "immersed": self.immersed.iter().map(|point| json!({
                "name": point.name,
                "location": point.location.to_json(),
                "label": point.label.name(),
            })).collect::<Vec<_>>(),
        })
    }
}

fn monomial_of(labels: &[Var]) -> Monomial {
    labels.iter().fold(Monomial::ONE, |acc, label| acc.times(Monomial::var(*label)))
}

pub fn unit_output_name(family: usize) -> String {
    format!("e{}", family + 1)
}

/// Signed counts of triangles bounded by the three branches with immersed
/// corners, whose side on branch `output` covers a fixed point of it.
/// Exponents are areas in units of the minimal triangle.
pub fn enumerate_decorated_polygons(
    config: &SeidelConfig,
    output: usize,
    area_cutoff: QExp,
) -> CountSeries {
    let limit = Cutoff::Finite(area_cutoff);
    let unit = SeidelConfig::minimal_area();
    let mut anchor = point_at(0, half(), ratio(1, 8));
    for _ in 0..output {
        anchor = anchor.tau();
    }
    let steps = (half() - anchor.dot(NORMALS[output])).to_integer();
    let bezout = NORMALS[output].0.extended_gcd(&NORMALS[output].1);
    let anchor = anchor.translated(whole(bezout.x * steps), whole(bezout.y * steps));
    let anchor_param = family_param(output, anchor);
    let mut bound = 0i64;
    while whole(bound * bound) < area_cutoff.ratio() {
        bound += 1;
    }
    let range = -bound - 3..=bound + 3;
    let others: Vec<usize> = (0..3).filter(|family| *family != output).collect();
    let mut counts = CountSeries::new(limit);
    for first in range.clone() {
        for second in range.clone() {
            let mut values = [half(); 3];
            values[others[0]] = half() + first;
            values[others[1]] = half() + second;
            let p01 = family_meet(0, values[0], 1, values[1]);
            let p12 = family_meet(1, values[1], 2, values[2]);
            let p20 = family_meet(2, values[2], 0, values[0]);
            let area = TorusLattice::signed_area(&[p01, p20, p12]);
            if !area.is_positive() {
                continue;
            }
            let exponent = QExp::from_ratio(area / unit);
            if !limit.admits(exponent) {
                continue;
            }
            let sides = [(0usize, p01, p20), (2, p20, p12), (1, p12, p01)];
            let (_, from, to) = sides.iter().find(|(family, _, _)| *family == output).copied().expect("output side");
            let (low, high) = {
                let (a, b) = (family_param(output, from), family_param(output, to));
                if a < b { (a, b) } else { (b, a) }
            };
            if !(low < anchor_param && anchor_param < high) {
                continue;
            }
            let mut flips = 0usize;
            for (family, from, to) in sides {
                flips += usize::from(!agrees(family, from, to));
                flips += config.branch_arc(family, values[family], from, to);
            }
            let sign = if flips % 2 == 0 { 1 } else { -1 };
            let labels = [p01, p12, p20].map(immersed_label);
            counts.record(&unit_output_name(output), monomial_of(&labels), exponent, sign);
        }
    }
    counts
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GeneratorKind {
    /// Minimum of the Morse function on the overlapped branch.
    Minimum,
    /// Maximum of the Morse function on the overlapped branch.
    Maximum,
    /// Even crossing with the branch two steps ahead.
    EvenCrossing(usize),
    /// Odd crossing with the branch one step ahead.
    OddCrossing(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FloerGenerator {
    pub name: String,
    pub kind: GeneratorKind,
    /// Branch family the generator lies on.
    pub family: usize,
    pub label: Option<Var>,
    pub degree: i64,
}

impl FloerGenerator {
    /// Label of the branch in `ℤ/3`, `L^{−f}` having label `−f`.
    pub fn branch_label(&self) -> i64 {
        -(self.family as i64)
    }

    pub fn is_even(&self) -> bool {
        matches!(self.kind, GeneratorKind::Minimum | GeneratorKind::EvenCrossing(_))
    }
}

/// `m₁` on `CF((𝕃, b), L′)` for `L′` overlapping a branch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StripComplex {
    pub family: usize,
    pub lagrangian: LinearLagrangian,
    pub even: Vec<FloerGenerator>,
    pub odd: Vec<FloerGenerator>,
    /// Rows odd generators, columns even generators.
    pub even_to_odd: PolyMatrix,
    /// Rows even generators, columns odd generators.
    pub odd_to_even: PolyMatrix,
}

impl StripComplex {
    pub fn to_json(&self) -> Value {
        let names = |gens: &[FloerGenerator]| gens.iter().map(|g| g.name.clone()).collect::<Vec<_>>();
        json!({
            "family": self.family,
            "even": names(&self.even),
            "odd": names(&self.odd),
            "even_to_odd": self.even_to_odd.to_json(),
            "odd_to_even": self.odd_to_even.to_json(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum StripEnd {
    Minimum,
    Maximum,
    Even(Var),
    Odd(Var),
}

impl StripEnd {
    fn gauge(self, config: &SeidelConfig) -> i64 {
        match self {
            StripEnd::Minimum | StripEnd::Maximum => 1,
            _ => config.crossing_gauge,
        }
    }

    fn index(self) -> usize {
        match self {
            StripEnd::Minimum | StripEnd::Maximum => 0,
            StripEnd::Even(var) | StripEnd::Odd(var) => var.index() + 1,
        }
    }
}

type StripCounts = BTreeMap<(StripEnd, StripEnd), BTreeMap<(QExp, Monomial), i64>>;

struct StripModel<'a> {
    config: &'a SeidelConfig,
    main: usize,
    odd_family: usize,
    even_family: usize,
    morse: MorseCalibration,
    unit: Coord,
    limit: Cutoff,
    counts: StripCounts,
}

/// Zero-area strips between points on `L′` use at most this many periods.
const BAND_WINDOW: i64 = 8;

impl StripModel<'_> {
    fn sign_of(flips: usize) -> i64 {
        if flips % 2 == 0 { 1 } else { -1 }
    }

    fn marker_arc(&self, from: Coord, to: Coord) -> usize {
        self.morse.marker.map_or(0, |marker| {
            usize::try_from(lifts_in(marker, from.min(to), from.max(to))).unwrap_or(0)
        })
    }

    fn record(&mut self, input: StripEnd, output: StripEnd, exponent: Coord, labels: &[Var], sign: i64) {
        let slot = self
            .counts
            .entry((output, input))
            .or_default()
            .entry((QExp::from_ratio(exponent), monomial_of(labels)))
            .or_insert(0);
        *slot += sign;
    }

    fn triangles(&mut self, window: i64) {
        let (main, odd_family, even_family) = (self.main, self.odd_family, self.even_family);
        let morse = self.morse;
        for odd_step in -window..window {
            for even_step in -window..window {
                let odd_value = half() + odd_step;
                let even_value = half() + even_step;
                let start = family_meet(main, half(), odd_family, odd_value);
                let end = family_meet(main, half(), even_family, even_value);
                let apex = family_meet(odd_family, odd_value, even_family, even_value);
                let area = TorusLattice::signed_area(&[start, end, apex]);
                if !area.is_positive() || !self.limit.admits(QExp::from_ratio(area / self.unit)) {
                    continue;
                }
                let (start_param, end_param) = (family_param(main, start), family_param(main, end));
                let mut inputs = Vec::new();
                if whole(0) <= start_param && start_param < whole(PERIOD) {
                    inputs.push((false, start_param));
                }
                let maximum = morse.maximum;
                if start_param.min(end_param) < maximum && maximum < start_param.max(end_param) {
                    inputs.push((true, maximum));
                }
                for (input_is_morse, input_param) in inputs {
                    let mut outputs = vec![(false, end_param)];
                    let low = input_param.min(end_param);
                    let high = input_param.max(end_param);
                    let first = ((low - morse.minimum) / PERIOD).floor().to_integer() + 1;
                    let last = ((high - morse.minimum) / PERIOD).ceil().to_integer() - 1;
                    for lift in first..=last {
                        outputs.push((true, morse.minimum + lift * PERIOD));
                    }
                    for (output_is_morse, output_param) in outputs {
                        let mut flips = 0usize;
                        let mut labels = vec![immersed_label(apex)];
                        let input_point = point_at(main, half(), input_param);
                        let output_point = point_at(main, half(), output_param);
                        if output_is_morse {
                            flips += self.config.branch_arc(main, half(), output_point, end);
                            labels.push(immersed_label(end));
                            flips += usize::from(!agrees(even_family, end, apex));
                        }
                        flips += self.config.branch_arc(even_family, even_value, end, apex);
                        flips += usize::from(!agrees(odd_family, apex, start));
                        flips += self.config.branch_arc(odd_family, odd_value, apex, start);
                        if input_is_morse {
                            labels.push(immersed_label(start));
                            flips += usize::from(!agrees(main, start, input_point));
                            flips += self.config.branch_arc(main, half(), start, input_point);
                        }
                        flips += usize::from(output_param <= input_param);
                        flips += self.marker_arc(input_param, output_param);
                        let input = if input_is_morse { StripEnd::Maximum } else { StripEnd::Odd(immersed_label(start)) };
                        let output = if output_is_morse { StripEnd::Minimum } else { StripEnd::Even(immersed_label(end)) };
                        self.record(input, output, area / self.unit, &labels, Self::sign_of(flips));
                    }
                }
            }
        }
    }

    fn trapezoids(&mut self, window: i64) {
        let (main, odd_family, even_family) = (self.main, self.odd_family, self.even_family);
        for even_step in -window..window {
            let even_value = half() + even_step;
            let start = family_meet(main, half(), even_family, even_value);
            let start_param = family_param(main, start);
            if !(whole(0) <= start_param && start_param < whole(PERIOD)) {
                continue;
            }
            for odd_step in -window..window {
                let odd_value = half() + odd_step;
                let end = family_meet(main, half(), odd_family, odd_value);
                for far_step in -window..window {
                    if far_step == 0 {
                        continue;
                    }
                    let far_value = half() + far_step;
                    let far_odd = family_meet(main, far_value, odd_family, odd_value);
                    let far_even = family_meet(main, far_value, even_family, even_value);
                    let polygon = [start, end, far_odd, far_even];
                    let convex = (0..4).all(|k| cross(polygon[k], polygon[(k + 1) % 4], polygon[(k + 2) % 4]).is_positive());
                    if !convex {
                        continue;
                    }
                    let area = TorusLattice::signed_area(&polygon);
                    if !self.limit.admits(QExp::from_ratio(area / self.unit)) {
                        continue;
                    }
                    let mut flips = self.config.branch_arc(odd_family, odd_value, end, far_odd);
                    flips += usize::from(!agrees(main, far_odd, far_even));
                    flips += self.config.branch_arc(main, far_value, far_odd, far_even);
                    flips += usize::from(!agrees(even_family, far_even, start));
                    flips += self.config.branch_arc(even_family, even_value, far_even, start);
                    let end_param = family_param(main, end);
                    flips += usize::from(end_param <= start_param);
                    flips += self.marker_arc(start_param, end_param);
                    let labels = [immersed_label(far_odd), immersed_label(far_even)];
                    self.record(
                        StripEnd::Even(immersed_label(start)),
                        StripEnd::Odd(immersed_label(end)),
                        area / self.unit,
                        &labels,
                        Self::sign_of(flips),
                    );
                }
            }
        }
    }

    /// The point of `L′` at `param` runs from a minimum towards a maximum.
    fn rising(&self, param: Coord) -> bool {
        modulo_period(param - self.morse.minimum) < modulo_period(param - self.morse.maximum)
    }

    fn bands(&mut self) {
        let (main, odd_family, even_family) = (self.main, self.odd_family, self.even_family);
        let morse = self.morse;
        let mut inputs = vec![(StripEnd::Minimum, morse.minimum, None)];
        let mut outputs = Vec::new();
        for step in -BAND_WINDOW..BAND_WINDOW {
            let even = family_meet(main, half(), even_family, half() + step);
            inputs.push((StripEnd::Even(immersed_label(even)), family_param(main, even), Some(even)));
            let odd = family_meet(main, half(), odd_family, half() + step);
            outputs.push((StripEnd::Odd(immersed_label(odd)), family_param(main, odd), Some(odd)));
            outputs.push((StripEnd::Maximum, morse.maximum + step * PERIOD, None));
        }
        for (input, input_param, input_point) in &inputs {
            if !(whole(0) <= *input_param && *input_param < whole(PERIOD)) {
                continue;
            }
            for (output, output_param, output_point) in &outputs {
                let low = (*input_param).min(*output_param);
                let high = (*input_param).max(*output_param);
                if lifts_in(morse.minimum, low, high) > 0 || lifts_in(morse.maximum, low, high) > 0 {
                    continue;
                }
                let increasing = output_param > input_param;
                if increasing != self.rising((low + high) / 2) {
                    continue;
                }
                let from = point_at(main, half(), *input_param);
                let to = point_at(main, half(), *output_param);
                let mut flips = 0usize;
                let mut labels = Vec::new();
                if let Some(point) = output_point {
                    labels.push(immersed_label(*point));
                    flips += usize::from(!agrees(main, to, from));
                }
                flips += self.config.branch_arc(main, half(), to, from);
                if let Some(point) = input_point {
                    labels.push(immersed_label(*point));
                    let (du, dv) = to.minus(from);
                    let (da, db) = DIRECTIONS[even_family];
                    flips += usize::from(!(dv * da - du * db).is_positive());
                }
                flips += usize::from(!increasing);
                flips += self.marker_arc(*input_param, *output_param);
                self.record(*input, *output, whole(0), &labels, Self::sign_of(flips));
            }
        }
    }
}

/// Family index of a branch direction, when `L′` overlaps that branch.
fn overlapped_family(lagrangian: &LinearLagrangian) -> Result<usize, FukayaError> {
    let vector = lagrangian.direction.vector();
    let family = DIRECTIONS
        .iter()
        .position(|direction| *direction == vector)
        .ok_or_else(|| FukayaError::Unsupported(format!("direction {vector:?} is not a branch direction")))?;
    let probe = point_at(family, half(), whole(0));
    if !lagrangian.contains(probe) {
        return Err(FukayaError::Unsupported("lagrangian does not overlap a branch".to_string()));
    }
    Ok(family)
}

impl StripComplex {
    /// Strip counts keyed by `input->output`.
    pub fn counts(&self, area_cutoff: QExp) -> CountSeries {
        let mut counts = CountSeries::new(Cutoff::Finite(area_cutoff));
        let blocks = [
            (&self.even, &self.odd, &self.even_to_odd),
            (&self.odd, &self.even, &self.odd_to_even),
        ];
        for (inputs, outputs, matrix) in blocks {
            for (row, col, entry) in matrix.entries() {
                let key = format!("{}->{}", inputs[col].name, outputs[row].name);
                for (monomial, series) in entry.terms() {
                    counts.record_series(&key, *monomial, series);
                }
            }
        }
        counts
    }
}

/// `m₁` on `CF((𝕃, b), L′)` in the limit where `L′` overlaps a branch, with
/// entries `Σ ± T^{area} x^i y^j z^k` summed below `area_cutoff` (area in
/// units of the minimal triangle).
pub fn strip_matrix(
    config: &SeidelConfig,
    lagrangian: &LinearLagrangian,
    area_cutoff: QExp,
) -> Result<StripComplex, FukayaError> {
    let main = overlapped_family(lagrangian)?;
    let limit = Cutoff::Finite(area_cutoff);
    let mut reach = 0i64;
    while whole(reach * reach) < area_cutoff.ratio() {
        reach += 1;
    }
    let mut model = StripModel {
        config,
        main,
        odd_family: (main + 1) % 3,
        even_family: (main + 2) % 3,
        morse: config.morse.on_family(main),
        unit: SeidelConfig::minimal_area(),
        limit,
        counts: BTreeMap::new(),
    };
    let window = 2 * reach + 4;
    model.triangles(window);
    model.trapezoids(window);
    model.bands();

    let degree_on = |family: usize| intersection_degree(&config.branches[family], lagrangian);
    let own_phase = lagrangian.effective_phase().ok_or(FukayaError::Ungraded)?;
    let morse_degree = own_phase - config.branches[main].effective_phase().ok_or(FukayaError::Ungraded)?;
    if !morse_degree.is_integer() {
        return Err(FukayaError::Unsupported("phase differs from the overlapped branch".to_string()));
    }
    let morse_degree = morse_degree.to_integer();
    let even_degree = degree_on(model.even_family)?;
    let odd_degree = degree_on(model.odd_family)?;
    let generator = |name: String, kind, family, label, degree| FloerGenerator { name, kind, family, label, degree };
    let mut even = vec![generator("a0".into(), GeneratorKind::Minimum, main, None, morse_degree)];
    let mut odd = vec![generator("b0".into(), GeneratorKind::Maximum, main, None, morse_degree + 1)];
    for var in Var::ALL {
        even.push(generator(format!("a{}", var.name()), GeneratorKind::EvenCrossing(model.even_family), model.even_family, Some(var), even_degree));
        odd.push(generator(format!("b{}", var.name()), GeneratorKind::OddCrossing(model.odd_family), model.odd_family, Some(var), odd_degree));
    }

    let mut even_to_odd = PolyMatrix::zeros(4, 4);
    let mut odd_to_even = PolyMatrix::zeros(4, 4);
    for ((output, input), terms) in &model.counts {
        let mut sign = output.gauge(config) * input.gauge(config);
        let target = match (input, output) {
            (StripEnd::Minimum | StripEnd::Even(_), StripEnd::Maximum | StripEnd::Odd(_)) => &mut even_to_odd,
            (StripEnd::Maximum | StripEnd::Odd(_), StripEnd::Minimum | StripEnd::Even(_)) => {
                sign *= config.odd_block_sign;
                &mut odd_to_even
            }
            _ => return Err(FukayaError::Unsupported("strip preserves parity".to_string())),
        };
        let mut entry = target.get(output.index(), input.index()).clone();
        for ((exponent, monomial), count) in terms {
            if *count != 0 {
                entry.accumulate(*monomial, NovikovSeries::monomial(*exponent, integer(sign * count), limit));
            }
        }
        target.set(output.index(), input.index(), entry);
    }
    let finish = |matrix: PolyMatrix| matrix.map(|entry| {
        let mut poly = GradedPolynomial::zero_below(limit);
        for (monomial, series) in entry.terms() {
            poly.accumulate(*monomial, series.clone());
        }
        poly
    });
    Ok(StripComplex {
        family: main,
        lagrangian: lagrangian.clone(),
        even,
        odd,
        even_to_odd: finish(even_to_odd),
        odd_to_even: finish(odd_to_even),
    })
}

/// Constant entry of `m₂(·, w)` from `source` to `target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstantEntry {
    pub from: String,
    pub to: String,
    pub value: i64,
}

/// Area-zero part of the map `p ↦ ±m₂(p, w)` from `CF(𝕃, L₁′)` to `CF(𝕃, L₂′)`,
/// for `w` the intersection of the two overlapped branches labelled `corner`.
///
/// A strip either runs from a Morse point on the first branch to the crossing
/// of `L₂′` at `w`, or from the crossing of `L₁′` at `w` to a Morse point on the
/// second branch; it is kept when the Floer degree is preserved.
pub fn morphism_strips(
    config: &SeidelConfig,
    source: &StripComplex,
    target: &StripComplex,
    corner: Var,
) -> Result<Vec<ConstantEntry>, FukayaError> {
    let morphism_degree = intersection_degree(&source.lagrangian, &target.lagrangian)?;
    let (first, second) = (source.family, target.family);
    let all = |complex: &StripComplex| complex.even.iter().chain(complex.odd.iter()).cloned().collect::<Vec<_>>();
    let (source_gens, target_gens) = (all(source), all(target));
    let gauge = |generator: &FloerGenerator| match generator.kind {
        GeneratorKind::Minimum | GeneratorKind::Maximum => 1,
        _ => config.crossing_gauge,
    };
    let at_corner = |generator: &FloerGenerator, family: usize| {
        generator.label == Some(corner) && generator.family == family
    };
    let is_morse = |generator: &FloerGenerator| matches!(generator.kind, GeneratorKind::Minimum | GeneratorKind::Maximum);
    let mut entries = Vec::new();
    for input in &source_gens {
        for output in &target_gens {
            let through_morse = is_morse(input) && at_corner(output, first);
            let into_morse = at_corner(input, second) && is_morse(output);
            if !(through_morse || into_morse) || output.degree != input.degree + morphism_degree {
                continue;
            }
            let functor_sign = if input.degree.rem_euclid(2) == 0 { -1 } else { 1 };
            entries.push(ConstantEntry {
                from: input.name.clone(),
                to: output.name.clone(),
                value: gauge(input) * gauge(output) * functor_sign,
            });
        }
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_count(first: &LinearLagrangian, second: &LinearLagrangian) -> usize {
        let det = first.direction.cross(second.direction).abs();
        let grid = 12 * det;
        let mut found = std::collections::BTreeSet::new();
        let steps = 2 * grid;
        for k in 0..steps {
            let t = ratio(k, steps);
            let point = first
                .base_point()
                .translated(t * first.direction.a, t * first.direction.b);
            if second.contains(point) {
                found.insert(point.reduced());
            }
        }
        found.len()
    }

    #[test]
    fn intersection_counts_match_scan() {
        let pairs = [((1, 0), (1, -3)), ((1, 0), (0, 1)), ((1, 2), (1, -1))];
        for ((a1, b1), (a2, b2)) in pairs {
            let first = LinearLagrangian::through(a1, b1, whole(0)).unwrap();
            let second = LinearLagrangian::through(a2, b2, ratio(1, 3)).unwrap();
            let points = intersect(&first, &second).unwrap();
            assert_eq!(points.len() as i64, (a1 * b2 - a2 * b1).abs());
            assert_eq!(points.len(), brute_force_count(&first, &second));
        }
    }

    #[test]
    fn vertical_direction() {
        let direction = Direction::new(1, 2).unwrap();
        assert!(direction.is_vertical());
        assert_eq!(direction.phase(), Some(ratio(1, 2)));
        assert_eq!(Direction::new(-2, -1).unwrap().phase(), Some(ratio(-5, 6)));
    }

    #[test]
    fn immersed_orbits() {
        let config = SeidelConfig::standard();
        assert_eq!(config.immersed.len(), 9);
        for point in &config.immersed {
            assert_eq!(immersed_label(point.location.tau()), point.label);
            assert_eq!(config.corner_degree(point).unwrap(), ratio(1, 3));
        }
    }

    #[test]
    fn theta_low_terms() {
        let zero = theta_series(whole(0), QExp::integer(3));
        assert_eq!(zero.coeff_at(0), integer(1));
        assert_eq!(zero.coeff(QExp::new(1, 2)).unwrap(), integer(2));
        assert_eq!(zero.coeff_at(2), integer(2));
        let half_char = theta_series(ratio(1, 2), QExp::integer(2));
        assert_eq!(half_char.coeff(QExp::new(1, 8)).unwrap(), integer(2));
        assert_eq!(half_char.coeff(QExp::new(9, 8)).unwrap(), integer(2));
    }
}
