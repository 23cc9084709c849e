//! Lines, points, affine maps and the two independent triangle-area routes.
//!
//! Areas come primarily from the shoelace formula on exact vertices. The
//! second route parametrizes every line by where it crosses a reference line
//! `ℓ` (`x`) and by the cotangent of its angle with `ℓ` (`y`); the triangle
//! cut from `ℓ` by two lines then has area `scale·(x_j−x_i)²/(2|y_i−y_j|)`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::scalar::{denominator_lcm, Field, Scalar, ScalarError, Sign};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("degenerate line: a and b are both zero")]
    DegenerateLine,
    #[error("identical lines have no intersection")]
    IdenticalLines,
    #[error("affine map is singular")]
    SingularMap,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Exact point in the plane.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Point {
    pub x: Scalar,
    pub y: Scalar,
}

impl Point {
    pub fn new(x: Scalar, y: Scalar) -> Self {
        Point { x, y }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// The locus `a·x + b·y + c = 0`, stored in canonical scaling.
///
/// Canonical scaling divides by the first nonzero coefficient; when the
/// result is rational it is then cleared to coprime integers with a positive
/// leading entry. Two lines are equal iff their triples are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Line {
    a: Scalar,
    b: Scalar,
    c: Scalar,
}

impl Line {
    pub fn new(a: Scalar, b: Scalar, c: Scalar) -> Result<Self, GeometryError> {
        if a.is_zero() && b.is_zero() {
            return Err(GeometryError::DegenerateLine);
        }
        a.field().join(b.field())?.join(c.field())?;
        let lead = if a.is_zero() { b.clone() } else { a.clone() };
        let inv = lead.checked_recip()?;
        let (a, b, c) = (&a * &inv, &b * &inv, &c * &inv);
        match (a.as_rational(), b.as_rational(), c.as_rational()) {
            (Some(qa), Some(qb), Some(qc)) => {
                let l = denominator_lcm([qa, qb, qc]);
                let ints: Vec<BigInt> = [qa, qb, qc]
                    .iter()
                    .map(|q| (*q * num_rational::BigRational::from_integer(l.clone())).to_integer())
                    .collect();
                let g = ints.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
                let g = if g.is_zero() { BigInt::one() } else { g };
                let mut it = ints.into_iter().map(|v| Scalar::from_bigint(v / &g));
                Ok(Line {
                    a: it.next().unwrap(),
                    b: it.next().unwrap(),
                    c: it.next().unwrap(),
                })
            }
            _ => Ok(Line { a, b, c }),
        }
    }

    pub fn from_ints(a: i64, b: i64, c: i64) -> Result<Self, GeometryError> {
        Line::new(Scalar::from_int(a), Scalar::from_int(b), Scalar::from_int(c))
    }

    /// Line through two distinct points.
    pub fn through(p: &Point, q: &Point) -> Result<Self, GeometryError> {
        Line::new(&p.y - &q.y, &q.x - &p.x, &p.x * &q.y - &q.x * &p.y)
    }

    /// Line through `p` with direction `(dx, dy)`.
    pub fn through_with_direction(p: &Point, dx: &Scalar, dy: &Scalar) -> Result<Self, GeometryError> {
        let c = -(dy * &p.x) + dx * &p.y;
        Line::new(dy.clone(), -dx, c)
    }

    pub fn a(&self) -> &Scalar {
        &self.a
    }

    pub fn b(&self) -> &Scalar {
        &self.b
    }

    pub fn c(&self) -> &Scalar {
        &self.c
    }

    pub fn coefficients(&self) -> [&Scalar; 3] {
        [&self.a, &self.b, &self.c]
    }

    pub fn field(&self) -> Field {
        self.a
            .field()
            .join(self.b.field())
            .and_then(|f| f.join(self.c.field()))
            .expect("line coefficients share a field")
    }

    /// Value of `a·x + b·y + c`; its sign says which side `p` is on.
    pub fn eval(&self, p: &Point) -> Scalar {
        &self.a * &p.x + &self.b * &p.y + &self.c
    }

    pub fn side(&self, p: &Point) -> Sign {
        self.eval(p).sign()
    }

    pub fn is_horizontal(&self) -> bool {
        self.a.is_zero()
    }

    /// Canonical direction `(b, −a)/m` with `m` the first nonzero of `(a, b)`;
    /// the positive side `a·x + b·y + c > 0` lies to its left.
    pub fn direction(&self) -> (Scalar, Scalar) {
        let m = if self.a.is_zero() { &self.b } else { &self.a };
        (&self.b / m, -&self.a / m)
    }

    pub fn is_parallel(&self, other: &Line) -> bool {
        cross2(&self.a, &self.b, &other.a, &other.b).is_zero()
    }

    /// `det [[a1, b1], [a2, b2]]`; zero exactly for parallel lines.
    pub fn normal_cross(&self, other: &Line) -> Scalar {
        cross2(&self.a, &self.b, &other.a, &other.b)
    }

    /// Parallel copy moved so that it passes through `p`.
    pub fn parallel_through(&self, p: &Point) -> Line {
        let c = -(&self.a * &p.x + &self.b * &p.y);
        Line::new(self.a.clone(), self.b.clone(), c).expect("normal is nonzero")
    }
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.a, self.b, self.c)
    }
}

pub(crate) fn cross2(a1: &Scalar, b1: &Scalar, a2: &Scalar, b2: &Scalar) -> Scalar {
    a1 * b2 - a2 * b1
}

/// Result of intersecting two distinct lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Intersection {
    Point(Point),
    Parallel,
}

pub fn intersect(l1: &Line, l2: &Line) -> Result<Intersection, GeometryError> {
    if l1 == l2 {
        return Err(GeometryError::IdenticalLines);
    }
    let det = l1.normal_cross(l2);
    if det.is_zero() {
        return Ok(Intersection::Parallel);
    }
    let x = (&l1.b * &l2.c - &l2.b * &l1.c) / &det;
    let y = (&l1.c * &l2.a - &l2.c * &l1.a) / &det;
    Ok(Intersection::Point(Point::new(x, y)))
}

/// How three lines relate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TripleStatus {
    Proper,
    Concurrent,
    HasParallelPair,
}

/// Area of the triangle cut out by three lines, with its degeneracy status.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleArea {
    pub status: TripleStatus,
    /// Present iff `status` is proper; always positive.
    pub area: Option<Scalar>,
}

/// Shoelace area of the triangle with the given vertices.
pub fn shoelace(p: &Point, q: &Point, r: &Point) -> Scalar {
    let twice = (&q.x - &p.x) * (&r.y - &p.y) - (&r.x - &p.x) * (&q.y - &p.y);
    twice.abs() / Scalar::from_int(2)
}

pub fn triple_area(l1: &Line, l2: &Line, l3: &Line) -> TripleArea {
    let vertex = |p: &Line, q: &Line| match intersect(p, q) {
        Ok(Intersection::Point(v)) => Some(v),
        _ => None,
    };
    let (Some(p12), Some(p13), Some(p23)) = (vertex(l1, l2), vertex(l1, l3), vertex(l2, l3)) else {
        return TripleArea {
            status: TripleStatus::HasParallelPair,
            area: None,
        };
    };
    let area = shoelace(&p12, &p13, &p23);
    if area.is_zero() {
        TripleArea {
            status: TripleStatus::Concurrent,
            area: None,
        }
    } else {
        TripleArea {
            status: TripleStatus::Proper,
            area: Some(area),
        }
    }
}

/// Affine map `p ↦ M·p + t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMap {
    pub m: [[Scalar; 2]; 2],
    pub t: [Scalar; 2],
}

impl AffineMap {
    pub fn identity() -> Self {
        Self::linear([[Scalar::one(), Scalar::zero()], [Scalar::zero(), Scalar::one()]])
    }

    pub fn linear(m: [[Scalar; 2]; 2]) -> Self {
        AffineMap {
            m,
            t: [Scalar::zero(), Scalar::zero()],
        }
    }

    pub fn translation(dx: Scalar, dy: Scalar) -> Self {
        let mut map = Self::identity();
        map.t = [dx, dy];
        map
    }

    /// `(x, y) ↦ (x, y + λ·x)`.
    pub fn shear_y(lambda: Scalar) -> Self {
        Self::linear([[Scalar::one(), Scalar::zero()], [lambda, Scalar::one()]])
    }

    pub fn diagonal(sx: Scalar, sy: Scalar) -> Self {
        Self::linear([[sx, Scalar::zero()], [Scalar::zero(), sy]])
    }

    pub fn uniform_scale(f: Scalar) -> Self {
        Self::diagonal(f.clone(), f)
    }

    pub fn det(&self) -> Scalar {
        cross2(&self.m[0][0], &self.m[1][0], &self.m[0][1], &self.m[1][1])
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        let m = &self.m;
        let o = &other.m;
        let mm = [
            [
                &m[0][0] * &o[0][0] + &m[0][1] * &o[1][0],
                &m[0][0] * &o[0][1] + &m[0][1] * &o[1][1],
            ],
            [
                &m[1][0] * &o[0][0] + &m[1][1] * &o[1][0],
                &m[1][0] * &o[0][1] + &m[1][1] * &o[1][1],
            ],
        ];
        let t = [
            &m[0][0] * &other.t[0] + &m[0][1] * &other.t[1] + &self.t[0],
            &m[1][0] * &other.t[0] + &m[1][1] * &other.t[1] + &self.t[1],
        ];
        AffineMap { m: mm, t }
    }

    pub fn apply_point(&self, p: &Point) -> Point {
        Point::new(
            &self.m[0][0] * &p.x + &self.m[0][1] * &p.y + &self.t[0],
            &self.m[1][0] * &p.x + &self.m[1][1] * &p.y + &self.t[1],
        )
    }

    /// Image of a line: normal `M^{-T}·n`, offset `c − n'·t`.
    pub fn apply_line(&self, l: &Line) -> Result<Line, GeometryError> {
        let det = self.det();
        if det.is_zero() {
            return Err(GeometryError::SingularMap);
        }
        // M^{-T} = (1/det) [[m11, -m10], [-m01, m00]]
        let m = &self.m;
        let a = (&m[1][1] * &l.a - &m[1][0] * &l.b) / &det;
        let b = (&m[0][0] * &l.b - &m[0][1] * &l.a) / &det;
        let c = &l.c - (&a * &self.t[0] + &b * &self.t[1]);
        Line::new(a, b, c)
    }
}

/// Frame coordinates of a line relative to a reference line `ℓ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameParam {
    /// Affine parameter of `ℓ ∩ ℓ_i` along the canonical direction of `ℓ`.
    pub x: Scalar,
    /// Cotangent of the directed angle from `ℓ` to `ℓ_i`.
    pub y: Scalar,
    /// Squared length of the direction vector of `ℓ`.
    pub scale: Scalar,
}

impl FrameParam {
    /// Area of the triangle this line and `other` cut from `ℓ`; `None` when
    /// they meet on `ℓ` or are parallel.
    pub fn area_with(&self, other: &FrameParam) -> Option<Scalar> {
        let dy = &self.y - &other.y;
        let dx = &other.x - &self.x;
        if dy.is_zero() || dx.is_zero() {
            return None;
        }
        Some(&self.scale * dx.square() / (Scalar::from_int(2) * dy.abs()))
    }

    /// The same line in a frame whose direction vector has unit length.
    pub fn normalized(&self) -> FrameParam {
        FrameParam {
            x: self.x.clone(),
            y: &self.y / &self.scale,
            scale: Scalar::one(),
        }
    }
}

/// Origin and direction used to parametrize lines against `ℓ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub ell: Line,
    pub origin: Point,
    pub direction: (Scalar, Scalar),
}

impl Frame {
    pub fn new(ell: &Line) -> Frame {
        let (a, b, c) = (ell.a(), ell.b(), ell.c());
        let nn = a.square() + b.square();
        let k = -c / &nn;
        Frame {
            ell: ell.clone(),
            origin: Point::new(&k * a, &k * b),
            direction: ell.direction(),
        }
    }

    pub fn scale(&self) -> Scalar {
        self.direction.0.square() + self.direction.1.square()
    }

    /// Frame coordinates of `line`, or `None` when it is parallel to `ℓ`.
    pub fn param(&self, line: &Line) -> Option<FrameParam> {
        let (dx, dy) = &self.direction;
        let nd = line.a() * dx + line.b() * dy;
        if nd.is_zero() {
            return None;
        }
        let x = -line.eval(&self.origin) / &nd;
        let (ex, ey) = line.direction();
        let dot = dx * &ex + dy * &ey;
        let cross = dx * &ey - dy * &ex;
        Some(FrameParam {
            x,
            y: dot / cross,
            scale: self.scale(),
        })
    }

    /// Point of `ℓ` with parameter `x`.
    pub fn point_at(&self, x: &Scalar) -> Point {
        Point::new(
            &self.origin.x + x * &self.direction.0,
            &self.origin.y + x * &self.direction.1,
        )
    }
}

/// Frame coordinates of every line in `others` against `ell`; parallel lines
/// yield `None`.
pub fn frame_params(ell: &Line, others: &[Line]) -> Result<Vec<Option<FrameParam>>, GeometryError> {
    if others.iter().any(|l| l == ell) {
        return Err(GeometryError::IdenticalLines);
    }
    let frame = Frame::new(ell);
    Ok(others.iter().map(|l| frame.param(l)).collect())
}

/// Cyclic three-term frame formula: twice the triangle area equals
/// `|Σ (x_j−x_i)²/(y_i−y_j)|·scale` over the cycle `i→j→k→i`. Needs the
/// three lines to cross `ℓ` at distinct points with distinct slopes.
pub fn three_term_area(p: [&FrameParam; 3]) -> Option<Scalar> {
    let mut sum = Scalar::zero();
    for (i, j) in [(0, 1), (1, 2), (2, 0)] {
        let dy = &p[i].y - &p[j].y;
        let dx = &p[j].x - &p[i].x;
        if dy.is_zero() || dx.is_zero() {
            return None;
        }
        sum = sum + dx.square() / dy;
    }
    Some(&p[0].scale * sum.abs() / Scalar::from_int(2))
}

/// An area-preserving frame: a determinant-1 map applied to the arrangement
/// and a horizontal reference line lying strictly below every intersection
/// of the mapped lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReferenceFrame {
    pub map: AffineMap,
    pub shear: Scalar,
    pub ell: Line,
}

/// Picks the shear `(x, y) ↦ (x, y + λx)` with the smallest admissible
/// non-negative integer `λ` that leaves no line horizontal, then places
/// `ℓ: y = h` with `h = min(−1, ⌊min y⌋ − 1)` over all intersections.
pub fn choose_reference_frame(lines: &[Line]) -> ReferenceFrame {
    let forbidden: Vec<Scalar> = lines
        .iter()
        .filter(|l| !l.b().is_zero())
        .map(|l| l.a() / l.b())
        .collect();
    let mut lambda = 0i64;
    while forbidden.contains(&Scalar::from_int(lambda)) {
        lambda += 1;
    }
    let map = AffineMap::shear_y(Scalar::from_int(lambda));
    let mapped: Vec<Line> = lines
        .iter()
        .map(|l| map.apply_line(l).expect("shear is invertible"))
        .collect();
    let mut min_y: Option<Scalar> = None;
    for i in 0..mapped.len() {
        for j in i + 1..mapped.len() {
            if let Ok(Intersection::Point(p)) = intersect(&mapped[i], &mapped[j]) {
                if min_y.as_ref().map_or(true, |m| p.y < *m) {
                    min_y = Some(p.y);
                }
            }
        }
    }
    let mut h = BigInt::from(-1);
    if let Some(m) = min_y {
        let below = m.floor() - BigInt::one();
        if below < h {
            h = below;
        }
    }
    let ell = Line::new(Scalar::zero(), Scalar::one(), -Scalar::from_bigint(h)).expect("horizontal");
    ReferenceFrame {
        map,
        shear: Scalar::from_int(lambda),
        ell,
    }
}

impl ReferenceFrame {
    pub fn apply(&self, lines: &[Line]) -> Vec<Line> {
        lines
            .iter()
            .map(|l| self.map.apply_line(l).expect("shear is invertible"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(a: i64, b: i64, c: i64) -> Line {
        Line::from_ints(a, b, c).unwrap()
    }

    fn s(t: &str) -> Scalar {
        t.parse().unwrap()
    }

    #[test]
    fn canonical_scaling() {
        let a = Line::new(s("-2"), s("4"), s("6")).unwrap();
        assert_eq!(a, l(1, -2, -3));
        let b = Line::new(s("0"), s("2/3"), s("-1/2")).unwrap();
        assert_eq!(b.to_string(), "0 4 -3");
        let q = Line::new(s("2"), s("1*sqrt(5)"), s("1")).unwrap();
        assert_eq!(q.a(), &Scalar::one());
        assert!(Line::new(s("0"), s("0"), s("1")).is_err());
    }

    #[test]
    fn intersections() {
        assert_eq!(
            intersect(&l(1, 0, 0), &l(0, 1, 0)).unwrap(),
            Intersection::Point(Point::new(s("0"), s("0")))
        );
        assert_eq!(intersect(&l(0, 1, 0), &l(0, 1, -1)).unwrap(), Intersection::Parallel);
        assert_eq!(
            intersect(&l(1, 1, -1), &l(1, -1, 0)).unwrap(),
            Intersection::Point(Point::new(s("1/2"), s("1/2")))
        );
        assert_eq!(intersect(&l(1, 1, -1), &l(2, 2, -2)), Err(GeometryError::IdenticalLines));
    }

    #[test]
    fn triple_area_examples() {
        let t = triple_area(&l(1, 0, 0), &l(0, 1, 0), &l(1, 1, -1));
        assert_eq!(t.status, TripleStatus::Proper);
        assert_eq!(t.area, Some(s("1/2")));
        let c = triple_area(&l(1, 0, 0), &l(0, 1, 0), &l(1, -1, 0));
        assert_eq!(c.status, TripleStatus::Concurrent);
        let p = triple_area(&l(1, 0, 0), &l(1, 0, -1), &l(0, 1, 0));
        assert_eq!(p.status, TripleStatus::HasParallelPair);
    }

    #[test]
    fn frame_examples() {
        let ell = l(0, 1, 0);
        let diag = l(1, -1, 0);
        let p = frame_params(&ell, &[diag]).unwrap();
        let p = p[0].clone().unwrap();
        assert_eq!((p.x.clone(), p.y.clone(), p.scale.clone()), (s("0"), s("1"), s("1")));

        let a = FrameParam { x: s("0"), y: s("2"), scale: s("1") };
        let b = FrameParam { x: s("2"), y: s("0"), scale: s("1") };
        assert_eq!(a.area_with(&b), Some(s("1")));

        // parallel to ℓ is excluded
        assert_eq!(frame_params(&ell, &[l(0, 1, -3)]).unwrap(), vec![None]);
        assert!(frame_params(&ell, &[ell.clone()]).is_err());
    }

    #[test]
    fn frame_area_matches_shoelace_on_slanted_reference() {
        let ell = l(2, 3, -1);
        let others = [l(1, 0, 0), l(0, 1, 0), l(5, -1, 7)];
        let ps = frame_params(&ell, &others).unwrap();
        for i in 0..3 {
            for j in i + 1..3 {
                let fa = ps[i].as_ref().unwrap().area_with(ps[j].as_ref().unwrap());
                assert_eq!(fa, triple_area(&ell, &others[i], &others[j]).area);
            }
        }
        let three = three_term_area([ps[0].as_ref().unwrap(), ps[1].as_ref().unwrap(), ps[2].as_ref().unwrap()]);
        assert_eq!(three, triple_area(&others[0], &others[1], &others[2]).area);
    }

    #[test]
    fn affine_maps_move_lines_consistently() {
        let map = AffineMap {
            m: [[s("2"), s("1")], [s("3"), s("2")]],
            t: [s("1/2"), s("-3")],
        };
        assert_eq!(map.det(), s("1"));
        let line = l(3, -2, 5);
        let p = Point::new(s("1"), s("4"));
        assert!(line.eval(&p).is_zero());
        let image = map.apply_line(&line).unwrap();
        assert!(image.eval(&map.apply_point(&p)).is_zero());
    }

    #[test]
    fn reference_frame_identity_when_possible() {
        let lines = [l(1, 1, 0), l(1, -1, 0), l(1, 2, -3)];
        let rf = choose_reference_frame(&lines);
        assert_eq!(rf.map, AffineMap::identity());
        assert_eq!(rf.ell, l(0, 1, 1));
    }

    #[test]
    fn reference_frame_shears_away_horizontals() {
        let lines = [l(1, 0, 0), l(0, 1, 0), l(1, 1, -1)];
        let rf = choose_reference_frame(&lines);
        assert_eq!(rf.shear, s("2"));
        let mapped = rf.apply(&lines);
        assert!(mapped.iter().all(|m| !m.is_horizontal()));
        for i in 0..3 {
            for j in i + 1..3 {
                if let Intersection::Point(p) = intersect(&mapped[i], &mapped[j]).unwrap() {
                    assert_eq!(rf.ell.side(&p), Sign::Positive);
                }
            }
        }
        assert_eq!(
            triple_area(&mapped[0], &mapped[1], &mapped[2]).area,
            Some(s("1/2"))
        );
    }
}
