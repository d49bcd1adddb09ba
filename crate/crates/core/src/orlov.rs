//! Complexes of graded free `A = R/W` modules, read as `R`-matrices whose
//! consecutive composites are divisible by `W`, and the passage from their
//! quasi-periodic tails to matrix factorizations.
//!
//! Positions are cohomological: `maps[k]` goes from position `k - marker` to
//! position `k - marker + 1`. Chain maps are commuting (`d f = f d`).

use std::collections::BTreeMap;

use serde_json::{json, Value};
use thiserror::Error;

use crate::blocks::{BlockError, FactorizationBlocks};
use crate::linalg::{LinearSystem, SolveError, SymbolicMatrix, UnknownPool};
use crate::matrix::{GradedMatrix, PolyMatrix, TwistList};
use crate::mfcat::{MatrixFactorization, MfError, MfMorphism, POTENTIAL_DEGREE};
use crate::qseries::{Cutoff, QExp};
use crate::ring::{GradedPolynomial, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrlovError {
    #[error(transparent)]
    Blocks(#[from] BlockError),
    #[error(transparent)]
    Mf(#[from] MfError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("no quasi-periodic window found within {length} positions")]
    PeriodicityNotDetected { length: usize },
    #[error("the seed does not lift: {0}")]
    Inconsistent(String),
    #[error("precision exhausted while lifting")]
    Precision,
    #[error("position {0} is outside the complex")]
    Position(i64),
    #[error("the resolution needs at least two rows, got {0}")]
    TooFewRows(usize),
}

/// Working precision added on top of the requested cutoff.
pub const LIFT_MARGIN: i64 = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AComplex {
    pub modules: Vec<TwistList>,
    pub maps: Vec<PolyMatrix>,
    /// Index into `modules` of position 0.
    pub marker: usize,
}

impl AComplex {
    pub fn new(modules: Vec<TwistList>, maps: Vec<PolyMatrix>, marker: usize) -> Self {
        assert!(
            modules.is_empty() && maps.is_empty() || maps.len() + 1 == modules.len(),
            "a complex needs one map between consecutive modules"
        );
        for (index, map) in maps.iter().enumerate() {
            assert_eq!(map.cols(), modules[index].len(), "map {index} has wrong source rank");
            assert_eq!(map.rows(), modules[index + 1].len(), "map {index} has wrong target rank");
        }
        AComplex {
            modules,
            maps,
            marker,
        }
    }

    pub fn empty() -> Self {
        AComplex {
            modules: Vec::new(),
            maps: Vec::new(),
            marker: 0,
        }
    }

    pub fn lowest(&self) -> i64 {
        -(self.marker as i64)
    }

    pub fn highest(&self) -> i64 {
        self.lowest() + self.modules.len() as i64 - 1
    }

    fn slot(&self, position: i64) -> Option<usize> {
        let index = position - self.lowest();
        (index >= 0 && (index as usize) < self.modules.len()).then_some(index as usize)
    }

    /// The module at `position`; empty outside the complex.
    pub fn module(&self, position: i64) -> TwistList {
        self.slot(position)
            .map_or_else(|| TwistList::new(Vec::new()), |index| self.modules[index].clone())
    }

    /// The differential leaving `position`.
    pub fn map(&self, position: i64) -> Option<&PolyMatrix> {
        self.slot(position).and_then(|index| self.maps.get(index))
    }

    /// The differential leaving `position`, zero where the complex has none.
    pub fn map_or_zero(&self, position: i64) -> PolyMatrix {
        self.map(position).cloned().unwrap_or_else(|| {
            PolyMatrix::zeros(self.module(position + 1).len(), self.module(position).len())
        })
    }

    pub fn graded_map(&self, position: i64) -> Option<GradedMatrix> {
        self.map(position).map(|map| {
            GradedMatrix::new(map.clone(), self.module(position), self.module(position + 1))
        })
    }

    /// Common precision of all maps.
    pub fn precision(&self) -> Cutoff {
        self.maps.iter().map(PolyMatrix::precision).fold(Cutoff::Exact, Cutoff::min)
    }

    pub fn twist(&self, by: i64) -> Self {
        AComplex {
            modules: self.modules.iter().map(|m| m.twisted(by)).collect(),
            ..self.clone()
        }
    }

    /// Same modules and maps with every position moved by `by`.
    pub fn reindexed(&self, by: i64) -> Self {
        let marker = self.marker as i64 - by;
        assert!(marker >= 0, "reindexing would move position 0 below the complex");
        AComplex {
            marker: marker as usize,
            ..self.clone()
        }
    }

    /// Keeps positions `<= top`.
    pub fn truncated_above(&self, top: i64) -> Self {
        let Some(last) = self.slot(top) else {
            return self.clone();
        };
        AComplex {
            modules: self.modules[..=last].to_vec(),
            maps: self.maps[..last].to_vec(),
            marker: self.marker,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "lowest_position": self.lowest(),
            "marker": self.marker,
            "modules": self.modules.iter().map(|m| m.0.clone()).collect::<Vec<_>>(),
            "maps": self.maps.iter().map(PolyMatrix::to_json).collect::<Vec<_>>(),
        })
    }

    /// Mapping cone of a chain map `f: source -> self` of shift 0, on
    /// `C^n = self^n ⊕ source^{n+1}` with
    /// `d^n = [[d^n, (-1)^{n+1} f^{n+1}], [0, d_source^{n+1}]]`.
    pub fn cone(&self, source: &AComplex, map: &ChainMap) -> AComplex {
        assert_eq!(map.shift, 0, "the cone needs a chain map of shift 0");
        let low = self.lowest().min(source.lowest() - 1);
        let high = self.highest().max(source.highest() - 1);
        let mut modules = Vec::new();
        for position in low..=high {
            modules.push(self.module(position).concat(&source.module(position + 1)));
        }
        let first = modules.iter().position(|m| !m.is_empty()).unwrap_or(0);
        let last = modules.iter().rposition(|m| !m.is_empty()).unwrap_or(0);
        let mut maps = Vec::new();
        for position in low + first as i64..low + last as i64 {
            let sign_flip = (position + 1).rem_euclid(2) == 1;
            let component = map.component_or_zero(position + 1, source, self);
            let off_diagonal = if sign_flip { component.neg() } else { component };
            let lower_left = PolyMatrix::zeros(
                source.module(position + 2).len(),
                self.module(position).len(),
            );
            maps.push(PolyMatrix::block(
                &self.map_or_zero(position),
                &off_diagonal,
                &lower_left,
                &source.map_or_zero(position + 1),
            ));
        }
        AComplex::new(
            modules[first..=last].to_vec(),
            maps,
            (-(low + first as i64)) as usize,
        )
    }
}

/// Components `f^p: source^p -> target^{p + shift}` keyed by source position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    pub shift: i64,
    pub components: BTreeMap<i64, PolyMatrix>,
}

impl ChainMap {
    pub fn component_or_zero(&self, position: i64, source: &AComplex, target: &AComplex) -> PolyMatrix {
        self.components.get(&position).cloned().unwrap_or_else(|| {
            PolyMatrix::zeros(
                target.module(position + self.shift).len(),
                source.module(position).len(),
            )
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "shift": self.shift,
            "components": self
                .components
                .iter()
                .map(|(position, m)| json!({"position": position, "matrix": m.to_json()}))
                .collect::<Vec<_>>(),
        })
    }
}

/// Decides whether every entry of `value` is `c · W` below the cutoff.
pub fn divisible_by_w(value: &GradedMatrix, w: &GradedPolynomial, cutoff: Cutoff) -> bool {
    if value.matrix.truncate(cutoff).is_zero() {
        return true;
    }
    let mut pool = UnknownPool::new();
    let quotient = pool.graded_matrix(&value.source, &value.target.twisted(-POTENTIAL_DEGREE), None);
    let product = quotient.left_mul(&PolyMatrix::scalar(value.target.len(), w));
    let precision = value.matrix.precision().min(w.precision()).min(cutoff);
    let mut system = LinearSystem::with_data_precision(pool.count(), precision);
    system.push_matrix_identity(&product, &value.matrix.truncate(cutoff));
    match system.solve(precision) {
        Ok(values) => {
            let recovered = PolyMatrix::scalar(value.target.len(), w).mul(&quotient.evaluate(&values));
            recovered.is_ok_and(|r| r.agrees_below(&value.matrix, cutoff) == Some(true))
        }
        Err(_) => false,
    }
}

/// True iff every consecutive composite is divisible by `W` below the cutoff.
pub fn verify_complex(complex: &AComplex, w: &GradedPolynomial, cutoff: Cutoff) -> bool {
    complex.maps.windows(2).enumerate().all(|(index, pair)| {
        let position = complex.lowest() + index as i64;
        let Ok(composite) = pair[1].mul(&pair[0]) else {
            return false;
        };
        let graded = GradedMatrix::new(
            composite,
            complex.module(position),
            complex.module(position + 2),
        );
        divisible_by_w(&graded, w, cutoff)
    })
}

/// `(x y z)`.
fn augmentation() -> PolyMatrix {
    PolyMatrix::from_rows(vec![Var::ALL.iter().map(|v| GradedPolynomial::var(*v)).collect()])
}

/// The totalized Koszul double complex resolving `k[-2]`: positions `2`
/// (`A`), `1` (`A(-1)^3`), then `rows` alternating 4×4 blocks below,
/// ending at position `1 - rows`.
pub fn koszul_resolution_k(blocks: &FactorizationBlocks, rows: usize) -> Result<AComplex, OrlovError> {
    if rows < 2 {
        return Err(OrlovError::TooFewRows(rows));
    }
    let mut modules = vec![TwistList::new(vec![0]), TwistList::new(vec![-1, -1, -1])];
    let mut maps = vec![augmentation(), blocks.odd_tail()];
    for depth in 0..=rows as i64 {
        let period = depth.div_euclid(2) * POTENTIAL_DEGREE;
        let twists = if depth % 2 == 0 {
            vec![-3, -2, -2, -2]
        } else {
            vec![-3, -4, -4, -4]
        };
        modules.push(TwistList::new(twists).twisted(-period));
        if depth > 0 {
            maps.push(if depth % 2 == 1 {
                blocks.even.clone()
            } else {
                blocks.odd.clone()
            });
        }
    }
    modules.reverse();
    maps.reverse();
    let marker = modules.len() - 3;
    Ok(AComplex::new(modules, maps, marker))
}

/// `φ = (0 w_x w_y w_z)` from position 0 of the Koszul resolution to `A`.
pub fn phi_map(blocks: &FactorizationBlocks) -> PolyMatrix {
    blocks.odd.submatrix(0..1, 0..4)
}

/// The complex consisting of `A(twist)` at position 0.
pub fn free_rank_one(twist: i64) -> AComplex {
    AComplex::new(vec![TwistList::new(vec![twist])], Vec::new(), 0)
}

/// `C(φ)` for `φ: k[-2] -> A`, ending `A ⊕ A(-1)^3 -> A -> 0`.
pub fn cone_phi(blocks: &FactorizationBlocks, rows: usize) -> Result<AComplex, OrlovError> {
    let resolution = koszul_resolution_k(blocks, rows)?;
    let phi = ChainMap {
        shift: 0,
        components: BTreeMap::from([(0, phi_map(blocks))]),
    };
    Ok(free_rank_one(0).cone(&resolution, &phi))
}

/// Resolution `⋯ -> A(-2) ⊕ A(-1)^3 -> A^3` of `A(1)_{≥0}`, with `A^3` at
/// position 0.
pub fn resolution_a1(blocks: &FactorizationBlocks, rows: usize) -> Result<AComplex, OrlovError> {
    Ok(koszul_resolution_k(blocks, rows)?
        .truncated_above(1)
        .twist(1)
        .reindexed(-1))
}

/// The quasi-periodic window of a complex: positions `start, start + 1`
/// whose maps repeat two steps earlier, twisted by `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PeriodicWindow {
    pub start: i64,
    /// Largest position whose outgoing map belongs to the periodic range.
    pub last_periodic_map: i64,
}

fn repeats(complex: &AComplex, position: i64) -> bool {
    let (Some(here), Some(before)) = (complex.map(position), complex.map(position - 2)) else {
        return false;
    };
    here == before
        && complex.module(position) == complex.module(position - 2).twisted(POTENTIAL_DEGREE)
        && complex.module(position + 1) == complex.module(position - 1).twisted(POTENTIAL_DEGREE)
}

pub fn periodic_window(complex: &AComplex) -> Result<PeriodicWindow, OrlovError> {
    let not_found = OrlovError::PeriodicityNotDetected {
        length: complex.modules.len(),
    };
    let mut start = -2;
    while start - 2 >= complex.lowest() {
        if repeats(complex, start) && repeats(complex, start + 1) {
            let mut last = start + 1;
            while repeats(complex, last + 1) {
                last += 1;
            }
            return Ok(PeriodicWindow {
                start,
                last_periodic_map: last,
            });
        }
        start -= 2;
    }
    Err(not_found)
}

/// One period of the tail, twisted so that index `i` of the factorization
/// sits at position `i` of the periodically extended complex.
pub fn extract_periodic_tail(complex: &AComplex) -> Result<MatrixFactorization, OrlovError> {
    let window = periodic_window(complex)?;
    let twist = -window.start / 2 * POTENTIAL_DEGREE;
    Ok(MatrixFactorization::new(
        complex.module(window.start).twisted(twist),
        complex.module(window.start + 1).twisted(twist),
        complex.map_or_zero(window.start),
        complex.map_or_zero(window.start + 1),
    )?)
}

/// Prescribed entries of the top component of a lift; the others are solved for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Seed {
    pub position: i64,
    pub fixed: BTreeMap<(usize, usize), GradedPolynomial>,
}

impl Seed {
    /// A seed with every entry fixed.
    pub fn full(position: i64, matrix: &PolyMatrix) -> Self {
        let fixed = matrix
            .entries()
            .map(|(row, col, p)| ((row, col), p.clone()))
            .collect();
        Seed { position, fixed }
    }

    /// A seed fixing one column.
    pub fn column(position: i64, col: usize, values: Vec<GradedPolynomial>) -> Self {
        let fixed = values
            .into_iter()
            .enumerate()
            .map(|(row, p)| ((row, col), p))
            .collect();
        Seed { position, fixed }
    }
}

/// A lifted chain map and the closed morphism of factorizations it induces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lift {
    pub chain_map: ChainMap,
    pub morphism: MfMorphism,
}

fn symbolic_component(
    pool: &mut UnknownPool,
    source: &TwistList,
    target: &TwistList,
    fixed: Option<&Seed>,
) -> SymbolicMatrix {
    match fixed {
        None => pool.graded_matrix(source, target, None),
        Some(seed) => {
            let mut matrix = PolyMatrix::zeros(target.len(), source.len());
            for ((row, col), value) in &seed.fixed {
                matrix.set(*row, *col, value.clone());
            }
            let graded = GradedMatrix::new(matrix, source.clone(), target.clone());
            pool.graded_matrix_with(&graded, |row, col| !seed.fixed.contains_key(&(row, col)), None)
        }
    }
}

/// Lifts a seed at the top of `source` to a chain map `source -> target`
/// of the given shift, down to two positions inside both periodic ranges.
/// Squares outside the periodic ranges commute modulo `W`; the rest commute
/// exactly, with the lowest component identified with the one two steps up.
pub fn lift_chain_map(
    source: &AComplex,
    target: &AComplex,
    shift: i64,
    seed: &Seed,
    w: &GradedPolynomial,
    cutoff: QExp,
) -> Result<Lift, OrlovError> {
    let source_window = periodic_window(source)?;
    let target_window = periodic_window(target)?;
    // Squares at q and q - 1 must both be periodic on both sides.
    let mut bottom = seed.position - 1;
    while bottom > source_window.last_periodic_map || bottom + shift > target_window.last_periodic_map {
        bottom -= 1;
    }
    if bottom - 1 < source.lowest() || bottom - 1 + shift < target.lowest() {
        return Err(OrlovError::Position(bottom - 1));
    }
    let mut pool = UnknownPool::new();
    let mut unknowns: BTreeMap<i64, SymbolicMatrix> = BTreeMap::new();
    for position in bottom..=seed.position {
        let fixed = (position == seed.position).then_some(seed);
        unknowns.insert(
            position,
            symbolic_component(
                &mut pool,
                &source.module(position),
                &target.module(position + shift),
                fixed,
            ),
        );
    }
    let mut system_parts: Vec<(SymbolicMatrix, SymbolicMatrix)> = Vec::new();
    for position in (bottom - 1)..seed.position {
        // Square from `position` to `position + 1`.
        let lower = if position < bottom {
            &unknowns[&(position + 2)]
        } else {
            &unknowns[&position]
        };
        let upper = &unknowns[&(position + 1)];
        let mut left = lower.left_mul(&target.map_or_zero(position + shift));
        let right = upper.right_mul(&source.map_or_zero(position));
        left.add_assign(&right.negated());
        let exact = position <= source_window.last_periodic_map
            && position + shift <= target_window.last_periodic_map;
        let remainder = if exact {
            SymbolicMatrix::zeros(left.rows, left.cols)
        } else {
            let quotient = pool.graded_matrix(
                &source.module(position),
                &target.module(position + 1 + shift).twisted(-POTENTIAL_DEGREE),
                None,
            );
            quotient.left_mul(&PolyMatrix::scalar(quotient.rows, w))
        };
        system_parts.push((left, remainder));
    }
    let precision = source.precision().min(target.precision()).min(w.precision());
    let mut system = LinearSystem::with_data_precision(pool.count(), precision);
    for (left, remainder) in &system_parts {
        let mut difference = left.clone();
        difference.add_assign(&remainder.negated());
        let zero = PolyMatrix::zeros(difference.rows, difference.cols);
        system.push_matrix_identity(&difference, &zero);
    }
    let limit = Cutoff::Finite(cutoff);
    let values = system.solve(precision).map_err(|e| match e {
        SolveError::Inconsistent { residual } => OrlovError::Inconsistent(residual),
        other => other.into(),
    })?;
    let components: BTreeMap<i64, PolyMatrix> = unknowns
        .iter()
        .map(|(position, m)| (*position, m.evaluate(&values).truncate(limit)))
        .collect();
    let (even, odd) = if bottom.rem_euclid(2) == 0 {
        (&components[&bottom], &components[&(bottom + 1)])
    } else {
        (&components[&(bottom + 1)], &components[&bottom])
    };
    let morphism = MfMorphism::from_chain_map(shift, even.clone(), odd.clone());
    let source_mf = extract_periodic_tail(source)?;
    let target_mf = extract_periodic_tail(target)?;
    let diff = crate::mfcat::hom_diff(&morphism, &source_mf, &target_mf)?;
    let zero = MfMorphism::zero(&source_mf, &target_mf, shift + 1);
    match diff.agrees_below(&zero, limit) {
        Some(true) => Ok(Lift {
            chain_map: ChainMap { shift, components },
            morphism,
        }),
        Some(false) => Err(OrlovError::Inconsistent("lift is not closed".into())),
        None => Err(OrlovError::Precision),
    }
}

/// Searches for `h^p: source^p -> target^{p + shift - 1}` with
/// `f^p = d h^p + h^{p+1} d` modulo `W` at every position where `f` or the
/// complexes are defined. Returns the homotopy keyed by source position.
pub fn chain_null_homotopy(
    map: &ChainMap,
    source: &AComplex,
    target: &AComplex,
    w: &GradedPolynomial,
    degree_bound: u32,
    cutoff: QExp,
) -> Result<Option<BTreeMap<i64, PolyMatrix>>, OrlovError> {
    let shift = map.shift;
    let low = source.lowest();
    let high = source.highest();
    let mut pool = UnknownPool::new();
    let mut homotopy = BTreeMap::new();
    for position in low..=high + 1 {
        homotopy.insert(
            position,
            pool.graded_matrix(
                &source.module(position),
                &target.module(position + shift - 1),
                Some(degree_bound),
            ),
        );
    }
    let mut system_rows = Vec::new();
    for position in low..=high {
        let rows = target.module(position + shift).len();
        let cols = source.module(position).len();
        if rows == 0 || cols == 0 {
            continue;
        }
        let mut lhs = homotopy[&position].left_mul(&target.map_or_zero(position + shift - 1));
        lhs.add_assign(&homotopy[&(position + 1)].right_mul(&source.map_or_zero(position)));
        let quotient = pool.graded_matrix(
            &source.module(position),
            &target.module(position + shift).twisted(-POTENTIAL_DEGREE),
            Some(degree_bound),
        );
        lhs.add_assign(&quotient.left_mul(&PolyMatrix::scalar(rows, w)));
        system_rows.push((lhs, map.component_or_zero(position, source, target)));
    }
    let precision = source
        .precision()
        .min(target.precision())
        .min(w.precision())
        .min(map.components.values().map(PolyMatrix::precision).fold(Cutoff::Exact, Cutoff::min));
    let mut system = LinearSystem::with_data_precision(pool.count(), precision);
    for (lhs, rhs) in &system_rows {
        system.push_matrix_identity(lhs, rhs);
    }
    let values = match system.solve(precision) {
        Ok(values) => values,
        Err(SolveError::Inconsistent { .. }) => return Ok(None),
        Err(other) => return Err(other.into()),
    };
    let limit = Cutoff::Finite(cutoff);
    let result: BTreeMap<i64, PolyMatrix> = homotopy
        .iter()
        .map(|(position, m)| (*position, m.evaluate(&values).truncate(limit)))
        .filter(|(_, m)| m.rows() > 0 && m.cols() > 0)
        .collect();
    // Check the identity modulo W directly.
    for position in low..=high {
        let rows = target.module(position + shift).len();
        let cols = source.module(position).len();
        if rows == 0 || cols == 0 {
            continue;
        }
        let pick = |p: i64| {
            result.get(&p).cloned().unwrap_or_else(|| {
                PolyMatrix::zeros(target.module(p + shift - 1).len(), source.module(p).len())
            })
        };
        let first = target.map_or_zero(position + shift - 1).mul(&pick(position)).map_err(MfError::from)?;
        let second = pick(position + 1).mul(&source.map_or_zero(position)).map_err(MfError::from)?;
        let residual = map
            .component_or_zero(position, source, target)
            .sub(&first.add(&second));
        let graded = GradedMatrix::new(
            residual,
            source.module(position),
            target.module(position + shift),
        );
        if !divisible_by_w(&graded, w, limit) {
            return Ok(None);
        }
    }
    Ok(Some(result))
}

/// The six generating morphisms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generator {
    X,
    Y,
    Z,
    XDual,
    YDual,
    ZDual,
}

impl Generator {
    pub const ALL: [Generator; 6] = [
        Generator::X,
        Generator::Y,
        Generator::Z,
        Generator::XDual,
        Generator::YDual,
        Generator::ZDual,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Generator::X => "x",
            Generator::Y => "y",
            Generator::Z => "z",
            Generator::XDual => "x*",
            Generator::YDual => "y*",
            Generator::ZDual => "z*",
        }
    }

    pub fn variable(self) -> Var {
        match self {
            Generator::X | Generator::XDual => Var::X,
            Generator::Y | Generator::YDual => Var::Y,
            Generator::Z | Generator::ZDual => Var::Z,
        }
    }

    pub fn is_dual(self) -> bool {
        matches!(self, Generator::XDual | Generator::YDual | Generator::ZDual)
    }

    /// Parity of the morphism of factorizations: `M₀ -> M₁` or `M₁ -> M₀[1]`.
    pub fn parity(self) -> i64 {
        i64::from(self.is_dual())
    }
}

/// Both objects of the comparison at `i = 0` as complexes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrlovPipeline {
    /// Precision of every reported result.
    pub cutoff: QExp,
    /// Blocks carry `LIFT_MARGIN` extra precision for elimination.
    pub blocks: FactorizationBlocks,
    pub cone: AComplex,
    pub resolution: AComplex,
}

/// Rows of the double complex kept in both resolutions.
pub const DEFAULT_ROWS: usize = 6;

impl OrlovPipeline {
    pub fn new(cutoff: QExp) -> Result<Self, OrlovError> {
        let blocks = FactorizationBlocks::new(cutoff + QExp::integer(LIFT_MARGIN))?;
        let cone = cone_phi(&blocks, DEFAULT_ROWS)?;
        let resolution = resolution_a1(&blocks, DEFAULT_ROWS)?;
        Ok(OrlovPipeline {
            cutoff,
            blocks,
            cone,
            resolution,
        })
    }

    fn limit(&self) -> Cutoff {
        Cutoff::Finite(self.cutoff)
    }

    pub fn object_o(&self) -> Result<MatrixFactorization, OrlovError> {
        Ok(extract_periodic_tail(&self.cone)?.truncate(self.limit()))
    }

    pub fn object_o1(&self) -> Result<MatrixFactorization, OrlovError> {
        Ok(extract_periodic_tail(&self.resolution)?.truncate(self.limit()))
    }

    /// Lifts the degree-zero data of a generator.
    pub fn lift(&self, generator: Generator) -> Result<Lift, OrlovError> {
        let index = generator.variable().index();
        let unit = |hot: bool| {
            if hot {
                GradedPolynomial::one()
            } else {
                GradedPolynomial::zero()
            }
        };
        let w = self.blocks.w();
        let cutoff = self.cutoff;
        if generator.is_dual() {
            let row = (0..3).map(|k| unit(k == index)).collect();
            let seed = Seed::full(0, &PolyMatrix::from_rows(vec![row]));
            lift_chain_map(&self.resolution, &self.cone, 1, &seed, w, cutoff)
        } else {
            let column = (0..3).map(|k| unit(k == index)).collect();
            let seed = Seed::column(0, 0, column);
            lift_chain_map(&self.cone, &self.resolution, 0, &seed, w, cutoff)
        }
    }

    /// The chain map `k[-2] -> A(-1)` given by row `row` (1, 2 or 3) of the
    /// odd block, from position 0 of the Koszul resolution.
    pub fn alternative_row(&self, row: usize) -> Result<(ChainMap, AComplex, AComplex), OrlovError> {
        let resolution = koszul_resolution_k(&self.blocks, DEFAULT_ROWS)?;
        let map = ChainMap {
            shift: 0,
            components: BTreeMap::from([(0, self.blocks.odd.submatrix(row..row + 1, 0..4))]),
        };
        Ok((map, resolution, free_rank_one(-1)))
    }
}

/// Degree-zero entries of a matrix between the given twist lists, as the
/// constant coefficient of the constant monomial (`None` marks a `*`).
pub fn constant_pattern(graded: &GradedMatrix) -> Vec<Vec<Option<crate::qseries::NovikovSeries>>> {
    (0..graded.target.len())
        .map(|row| {
            (0..graded.source.len())
                .map(|col| {
                    (graded.entry_degree(row, col) == 0).then(|| {
                        graded
                            .matrix
                            .get(row, col)
                            .coefficient(crate::ring::Monomial::ONE)
                    })
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_complex_has_no_period() {
        let blocks = FactorizationBlocks::new(QExp::integer(20)).unwrap();
        let complex = AComplex::new(
            vec![TwistList::new(vec![-3, -2, -2, -2]), TwistList::new(vec![0, -1, -1, -1])],
            vec![blocks.odd.clone()],
            1,
        );
        assert!(matches!(
            extract_periodic_tail(&complex),
            Err(OrlovError::PeriodicityNotDetected { .. })
        ));
    }

    #[test]
    fn empty_complex_is_a_complex() {
        let w = GradedPolynomial::zero();
        assert!(verify_complex(&AComplex::empty(), &w, Cutoff::at(10)));
    }
}
