//! Correlation polytopes and exact vertex/facet conversion.
//!
//! Both directions reduce to extreme rays of a homogenized cone:
//!
//! * vertices `v_i` to facets: rays of `{ (b, y) : b + y.v_i >= 0 }`, each
//!   giving the facet `-y.x <= b`;
//! * facets `n_j.x <= o_j` to vertices: rays of
//!   `{ (t, x) : o_j t - n_j.x >= 0, t >= 0 }`, each ray with `t > 0` giving
//!   the vertex `x / t`.

mod dd;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::enumeration::{self, Assignment};
use crate::error::{Error, Result};
use crate::rational::{fmt_fraction, parse_rational, primitive_integers, Rational};
use crate::scenario::Scenario;

use dd::{extreme_rays, independent_rows, ConeRays};

pub const MAX_DIMENSION: usize = 8;
pub const MAX_VERTICES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalVector(pub Vec<Rational>);

impl RationalVector {
    pub fn from_ints(values: &[i64]) -> Self {
        RationalVector(values.iter().map(|&v| Rational::from_integer(v.into())).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn dot(&self, other: &RationalVector) -> Rational {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn components(&self) -> &[Rational] {
        &self.0
    }
}

impl fmt::Display for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(fmt_fraction).collect();
        f.write_str(&parts.join(" "))
    }
}

/// `normal . x <= offset`, kept in canonical scaling: normal and offset are
/// coprime integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HalfSpace {
    normal: RationalVector,
    offset: Rational,
}

impl HalfSpace {
    pub fn new(normal: RationalVector, offset: Rational) -> Result<Self> {
        if normal.0.iter().all(Zero::is_zero) {
            return Err(Error::InvalidScenario("half-space normal is zero".into()));
        }
        let mut all = normal.0;
        all.push(offset);
        let ints = primitive_integers(&all);
        let mut comps: Vec<Rational> = ints.into_iter().map(Rational::from_integer).collect();
        let offset = comps.pop().expect("offset present");
        Ok(HalfSpace { normal: RationalVector(comps), offset })
    }

    pub fn from_ints(normal: &[i64], offset: i64) -> Self {
        HalfSpace::new(RationalVector::from_ints(normal), Rational::from_integer(offset.into()))
            .expect("nonzero normal")
    }

    pub fn normal(&self) -> &RationalVector {
        &self.normal
    }

    pub fn offset(&self) -> &Rational {
        &self.offset
    }

    pub fn dim(&self) -> usize {
        self.normal.dim()
    }

    /// offset - normal . x; nonnegative iff `x` satisfies the inequality.
    pub fn slack(&self, x: &RationalVector) -> Rational {
        &self.offset - self.normal.dot(x)
    }

    pub fn contains(&self, x: &RationalVector) -> bool {
        !self.slack(x).is_negative()
    }

    pub fn is_tight(&self, x: &RationalVector) -> bool {
        self.slack(x).is_zero()
    }

    fn sort_key(&self) -> (&Rational, &RationalVector) {
        (&self.offset, &self.normal)
    }
}

impl PartialOrd for HalfSpace {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HalfSpace {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl fmt::Display for HalfSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <= {}", self.normal, fmt_fraction(&self.offset))
    }
}

/// A polytope with both of its descriptions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polytope {
    pub vertices: Vec<RationalVector>,
    pub facets: Vec<HalfSpace>,
}

impl Polytope {
    pub fn from_vertices(vertices: Vec<RationalVector>) -> Result<Self> {
        let facets = facets_from_vertices(&vertices)?;
        let mut vertices = vertices;
        vertices.sort();
        vertices.dedup();
        Ok(Polytope { vertices, facets })
    }

    pub fn from_facets(facets: Vec<HalfSpace>) -> Result<Self> {
        let vertices = vertices_from_facets(&facets)?;
        let mut facets = facets;
        facets.sort();
        facets.dedup();
        Ok(Polytope { vertices, facets })
    }

    pub fn dim(&self) -> usize {
        self.vertices
            .first()
            .map(RationalVector::dim)
            .or_else(|| self.facets.first().map(HalfSpace::dim))
            .unwrap_or(0)
    }

    /// Checks that every vertex satisfies every facet, every facet is tight
    /// at `dim` or more vertices and every vertex at `dim` or more facets.
    pub fn is_consistent(&self) -> bool {
        let d = self.dim();
        let all_inside = self
            .facets
            .iter()
            .all(|f| self.vertices.iter().all(|v| f.contains(v)));
        let facets_tight = self
            .facets
            .iter()
            .all(|f| self.vertices.iter().filter(|v| f.is_tight(v)).count() >= d);
        let vertices_tight = self
            .vertices
            .iter()
            .all(|v| self.facets.iter().filter(|f| f.is_tight(v)).count() >= d);
        all_inside && facets_tight && vertices_tight
    }
}

/// Affine hull dimension of a point set (-1 is reported as 0 for the empty set).
pub fn affine_dimension(points: &[RationalVector]) -> usize {
    let lifted: Vec<Vec<Rational>> = points
        .iter()
        .map(|p| std::iter::once(Rational::one()).chain(p.0.iter().cloned()).collect())
        .collect();
    independent_rows(&lifted).len().saturating_sub(1)
}

fn common_dimension(dims: impl Iterator<Item = usize>) -> Result<Option<usize>> {
    let mut dim = None;
    for d in dims {
        match dim {
            None => dim = Some(d),
            Some(e) if e != d => return Err(Error::DimensionMismatch { expected: e, got: d }),
            _ => {}
        }
    }
    Ok(dim)
}

/// Complete irredundant facet list of the convex hull of `vertices`, sorted by
/// (offset, normal).
pub fn facets_from_vertices(vertices: &[RationalVector]) -> Result<Vec<HalfSpace>> {
    let Some(d) = common_dimension(vertices.iter().map(RationalVector::dim))? else {
        return Err(Error::DegeneratePolytope { dim: 0, hull_dim: 0 });
    };
    if d > MAX_DIMENSION || vertices.len() > MAX_VERTICES {
        return Err(Error::PolytopeTooLarge(format!(
            "{} points in dimension {d} (limits: {MAX_VERTICES} points, dimension {MAX_DIMENSION})",
            vertices.len()
        )));
    }
    let mut points = vertices.to_vec();
    points.sort();
    points.dedup();
    let hull_dim = affine_dimension(&points);
    if d == 0 || hull_dim < d {
        return Err(Error::DegeneratePolytope { dim: d, hull_dim });
    }

    let rows: Vec<Vec<Rational>> = points
        .iter()
        .map(|p| std::iter::once(Rational::one()).chain(p.0.iter().cloned()).collect())
        .collect();
    let rays = match extreme_rays(&rows) {
        ConeRays::Pointed(rays) => rays,
        ConeRays::Lineality { rank } => {
            return Err(Error::DegeneratePolytope { dim: d, hull_dim: rank.saturating_sub(1) })
        }
    };
    let mut facets: Vec<HalfSpace> = rays
        .into_iter()
        .map(|ray| {
            let offset = Rational::from_integer(ray[0].clone());
            let normal = RationalVector(ray[1..].iter().map(|c| Rational::from_integer(-c)).collect());
            HalfSpace::new(normal, offset).expect("facet normal of a full-dimensional hull")
        })
        .collect();
    facets.sort();
    facets.dedup();
    Ok(facets)
}

/// Complete vertex list of `{ x : normal . x <= offset }`, sorted.
pub fn vertices_from_facets(facets: &[HalfSpace]) -> Result<Vec<RationalVector>> {
    let Some(d) = common_dimension(facets.iter().map(HalfSpace::dim))? else {
        return Err(Error::UnboundedPolyhedron);
    };
    let mut rows: Vec<Vec<Rational>> = vec![std::iter::once(Rational::one())
        .chain(std::iter::repeat_n(Rational::zero(), d))
        .collect()];
    rows.extend(facets.iter().map(|f| {
        std::iter::once(f.offset.clone())
            .chain(f.normal.0.iter().map(|c| -c))
            .collect()
    }));
    let rays = match extreme_rays(&rows) {
        ConeRays::Pointed(rays) => rays,
        ConeRays::Lineality { .. } => return Err(Error::UnboundedPolyhedron),
    };
    let (finite, directions): (Vec<_>, Vec<_>) = rays.into_iter().partition(|r| r[0].is_positive());
    if finite.is_empty() {
        return Err(Error::EmptyPolyhedron);
    }
    if !directions.is_empty() {
        return Err(Error::UnboundedPolyhedron);
    }
    let mut vertices: Vec<RationalVector> = finite
        .into_iter()
        .map(|r| {
            let t = &r[0];
            RationalVector(r[1..].iter().map(|c| BigRational::new(c.clone(), t.clone())).collect())
        })
        .collect();
    vertices.sort();
    vertices.dedup();
    Ok(vertices)
}

/// A coordinate of an expectation row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coordinate {
    /// Value of the contextual variable with this canonical index.
    Single(usize),
    /// Product of the two values in the context with this index.
    Joint(usize),
}

/// `(E(x_y), E(y_x), E(x_y y_x))` for context `k`.
pub fn context_triple(s: &Scenario, k: usize) -> Vec<Coordinate> {
    let (l, r) = s.context_variables(k);
    vec![Coordinate::Single(l), Coordinate::Single(r), Coordinate::Joint(k)]
}

/// All joint coordinates in context order.
pub fn joint_projection(s: &Scenario) -> Vec<Coordinate> {
    (0..s.contexts().len()).map(Coordinate::Joint).collect()
}

/// All singles followed by all joints (the full expectation row).
pub fn full_projection(s: &Scenario) -> Vec<Coordinate> {
    (0..s.variable_count())
        .map(Coordinate::Single)
        .chain((0..s.contexts().len()).map(Coordinate::Joint))
        .collect()
}

pub fn coordinate_name(s: &Scenario, c: Coordinate) -> String {
    match c {
        Coordinate::Single(j) => s.variable_name(&s.contextual_variables()[j]),
        Coordinate::Joint(k) => s.joint_name(k),
    }
}

fn check_projection(s: &Scenario, projection: &[Coordinate]) -> Result<()> {
    for c in projection {
        let ok = match *c {
            Coordinate::Single(j) => j < s.variable_count(),
            Coordinate::Joint(k) => k < s.contexts().len(),
        };
        if !ok {
            return Err(Error::InvalidScenario(format!("projection coordinate {c:?} out of range")));
        }
    }
    Ok(())
}

/// Distinct projected expectation rows over all assignments, sorted.
pub fn correlation_vertices(s: &Scenario, projection: &[Coordinate]) -> Result<Vec<RationalVector>> {
    correlation_vertices_where(s, projection, |_| true)
}

/// As [`correlation_vertices`], restricted to assignments accepted by `keep`.
pub fn correlation_vertices_where(
    s: &Scenario,
    projection: &[Coordinate],
    keep: impl Fn(&Assignment) -> bool,
) -> Result<Vec<RationalVector>> {
    check_projection(s, projection)?;
    let mut out = Vec::new();
    for a in enumeration::enumerate_assignments(s)? {
        if !keep(&a) {
            continue;
        }
        let row = enumeration::expectation_row(s, &a)?;
        let point: Vec<i64> = projection
            .iter()
            .map(|c| match *c {
                Coordinate::Single(j) => i64::from(row.singles[j]),
                Coordinate::Joint(k) => i64::from(row.joints[k]),
            })
            .collect();
        out.push(RationalVector::from_ints(&point));
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Largest functional value over all assignments, or only the noncontextual ones.
pub fn maximize_functional(s: &Scenario, restrict_noncontextual: bool) -> Result<i64> {
    Ok(functional_range(s, restrict_noncontextual)?.1)
}

/// (min, max) of the functional over all or only noncontextual assignments.
pub fn functional_range(s: &Scenario, restrict_noncontextual: bool) -> Result<(i64, i64)> {
    let mut lo = i64::MAX;
    let mut hi = i64::MIN;
    for a in enumeration::enumerate_assignments(s)? {
        if restrict_noncontextual && !enumeration::is_noncontextual(s, &a) {
            continue;
        }
        let v = enumeration::functional_value(s, &a)?;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok((lo, hi))
}

/// Facets of every context's `(single, single, joint)` polytope, one list per
/// context in declaration order.
pub fn per_context_facets(s: &Scenario) -> Result<Vec<Vec<HalfSpace>>> {
    (0..s.contexts().len())
        .map(|k| facets_from_vertices(&correlation_vertices(s, &context_triple(s, k))?))
        .collect()
}

/// Text export, one facet per line as `n_1 ... n_d offset` meaning
/// `n . x <= offset`.
pub fn write_h_representation(facets: &[HalfSpace]) -> String {
    let d = facets.first().map_or(0, HalfSpace::dim);
    let mut out = format!("# H-representation dim={d} facets={} (n_1 .. n_d b: n.x <= b)\n", facets.len());
    for f in facets {
        let mut parts: Vec<String> = f.normal.0.iter().map(fmt_fraction).collect();
        parts.push(fmt_fraction(&f.offset));
        out.push_str(&parts.join(" "));
        out.push('\n');
    }
    out
}

/// Text export, one vertex per line.
pub fn write_v_representation(vertices: &[RationalVector]) -> String {
    let d = vertices.first().map_or(0, RationalVector::dim);
    let mut out = format!("# V-representation dim={d} vertices={}\n", vertices.len());
    for v in vertices {
        out.push_str(&v.to_string());
        out.push('\n');
    }
    out
}

fn parse_rows(text: &str) -> Result<Vec<Vec<Rational>>> {
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let row = content
            .split_whitespace()
            .map(|w| {
                parse_rational(w).map_err(|_| Error::Parse {
                    line: i + 1,
                    message: format!("`{w}` is not a rational number"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first().map(Vec::len) {
            if first != row.len() {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("expected {first} entries, found {}", row.len()),
                });
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn parse_h_representation(text: &str) -> Result<Vec<HalfSpace>> {
    parse_rows(text)?
        .into_iter()
        .map(|mut row| {
            let offset = row.pop().ok_or(Error::Parse { line: 0, message: "empty row".into() })?;
            HalfSpace::new(RationalVector(row), offset)
        })
        .collect()
}

pub fn parse_v_representation(text: &str) -> Result<Vec<RationalVector>> {
    Ok(parse_rows(text)?.into_iter().map(RationalVector).collect())
}

/// Canonical integer form of a facet, for comparisons in tests and reports.
pub fn facet_integers(f: &HalfSpace) -> (Vec<BigInt>, BigInt) {
    let n = f.normal.0.iter().map(|c| c.to_integer()).collect();
    (n, f.offset.to_integer())
}
