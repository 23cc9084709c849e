//! Generators for the extremal arrangements and random test inputs.
//!
//! The grids use the rational directions `(1,0)`, `(0,1)` and `(1,−1)`, an
//! affine image of the 60° lattice: incidences and area-equality classes are
//! the same, and every coefficient stays in `Q`.

use std::fmt;
use std::str::FromStr;

use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::arrangement::Arrangement;
use crate::census::{census, CensusError};
use crate::geometry::{AffineMap, Line, Point};
use crate::scalar::{Radicand, Rational, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("{kind} needs n >= 3, got {n}")]
    TooSmall { kind: &'static str, n: usize },
    #[error("{kind} needs k >= {min}, got {k}")]
    BadParameter { kind: &'static str, k: usize, min: usize },
    #[error("scale factor must be positive")]
    NonPositiveScale,
    #[error("arrangement has no proper triangle to normalize")]
    NoProperTriangle,
    #[error(transparent)]
    Census(#[from] CensusError),
    #[error("unknown construction kind {0:?}")]
    UnknownKind(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Hexgrid,
    Trigrid,
    Pentagon,
    MaxChain,
    StExtremal,
    Random,
}

impl FromStr for Kind {
    type Err = ConstructionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "hexgrid" => Kind::Hexgrid,
            "trigrid" => Kind::Trigrid,
            "pentagon" => Kind::Pentagon,
            "max-chain" | "max_chain" => Kind::MaxChain,
            "st-extremal" | "st_extremal" => Kind::StExtremal,
            "random" => Kind::Random,
            other => return Err(ConstructionError::UnknownKind(other.to_string())),
        })
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Hexgrid => "hexgrid",
            Kind::Trigrid => "trigrid",
            Kind::Pentagon => "pentagon",
            Kind::MaxChain => "max-chain",
            Kind::StExtremal => "st-extremal",
            Kind::Random => "random",
        })
    }
}

fn int_line(a: i64, b: i64, c: Rational) -> Line {
    Line::new(Scalar::from_int(a), Scalar::from_int(b), Scalar::from(c)).expect("nonzero normal")
}

fn half(odd: i64) -> Rational {
    Rational::new(odd.into(), 2.into())
}

/// Kagome arrangement: the families `x`, `y`, `x+y` at offsets `±½, ±3/2, …`,
/// added one layer of six at a time. A partial outer layer takes consecutive
/// positions clockwise from `x = +offset`.
pub fn hexgrid(n: usize) -> Result<Arrangement, ConstructionError> {
    if n < 3 {
        return Err(ConstructionError::TooSmall { kind: "hexgrid", n });
    }
    // (normal, sign of offset) in clockwise order.
    const ORDER: [((i64, i64), i64); 6] = [((1, 0), 1), ((0, 1), -1), ((1, 1), -1), ((1, 0), -1), ((0, 1), 1), ((1, 1), 1)];
    let mut lines = Vec::with_capacity(n);
    let mut layer = 1i64;
    while lines.len() < n {
        let offset = half(2 * layer - 1);
        for &((a, b), s) in &ORDER {
            if lines.len() == n {
                break;
            }
            lines.push(int_line(a, b, -offset.clone() * Rational::from_integer(s.into())));
        }
        layer += 1;
    }
    Ok(Arrangement::new(lines).expect("grid lines are distinct"))
}

/// The `n` lines of the triangular grid `x, y, x+y ∈ Z` closest to a grid
/// point when `n ≡ 3 (mod 6)` and to the centre `(1/3, 1/3)` of a grid
/// triangle otherwise.
pub fn trigrid(n: usize) -> Result<Arrangement, ConstructionError> {
    if n < 3 {
        return Err(ConstructionError::TooSmall { kind: "trigrid", n });
    }
    const FAMILIES: [(i64, i64); 3] = [(1, 0), (0, 1), (1, 1)];
    let (cx, cy) = if n % 6 == 3 {
        (Rational::from_integer(0.into()), Rational::from_integer(0.into()))
    } else {
        (Rational::new(1.into(), 3.into()), Rational::new(1.into(), 3.into()))
    };
    let r = n as i64;
    let mut cands: Vec<(Rational, i64, i64, usize)> = Vec::new();
    for k in -r..=r {
        for (f, &(a, b)) in FAMILIES.iter().enumerate() {
            let at_center = Rational::from_integer(a.into()) * &cx + Rational::from_integer(b.into()) * &cy;
            let dist = (Rational::from_integer(k.into()) - at_center).abs();
            cands.push((dist, k.abs(), k, f));
        }
    }
    cands.sort();
    let lines = cands[..n]
        .iter()
        .map(|&(_, _, k, f)| {
            let (a, b) = FAMILIES[f];
            int_line(a, b, Rational::from_integer((-k).into()))
        })
        .collect();
    Ok(Arrangement::new(lines).expect("grid lines are distinct"))
}

fn sqrt5() -> Radicand {
    Radicand::new(5).expect("5 is square-free")
}

fn q5(r: (i64, i64), s: (i64, i64)) -> Scalar {
    Scalar::quad(
        Rational::new(r.0.into(), r.1.into()),
        Rational::new(s.0.into(), s.1.into()),
        sqrt5(),
    )
}

/// The five side lines of an affine-regular pentagon over `Q(√5)`.
///
/// Vertices `(1,0), (c₁,1), (c₂,g), (c₂,−g), (c₁,−1)` with
/// `c₁ = (√5−1)/4`, `c₂ = −(√5+1)/4`, `g = (√5−1)/2`: the regular pentagon
/// with its `y` axis rescaled, which keeps every area ratio.
pub fn pentagon() -> Arrangement {
    let vertices = pentagon_vertices();
    let lines = (0..5)
        .map(|i| Line::through(&vertices[i], &vertices[(i + 1) % 5]).expect("distinct vertices"))
        .collect();
    Arrangement::new(lines).expect("pentagon sides are distinct")
}

pub fn pentagon_vertices() -> [Point; 5] {
    let c1 = q5((-1, 4), (1, 4));
    let c2 = q5((-1, 4), (-1, 4));
    let g = q5((-1, 2), (1, 2));
    [
        Point::new(Scalar::one(), Scalar::zero()),
        Point::new(c1.clone(), Scalar::one()),
        Point::new(c2.clone(), g.clone()),
        Point::new(c2, -g),
        Point::new(c1, -Scalar::one()),
    ]
}

/// Incidence-extremal instance transported to lines with unit triangles on `ℓ`.
#[derive(Clone, Debug)]
pub struct StExtremal {
    pub k: usize,
    /// Line 0 is `ℓ` (the x axis); then one line per point, then one per
    /// incidence line.
    pub arrangement: Arrangement,
    pub points: Vec<(i64, i64)>,
    /// `(m, b)` for `y = m·x + b`.
    pub lines: Vec<(i64, i64)>,
}

impl StExtremal {
    pub const ELL: usize = 0;

    /// Incidences of the underlying point–line instance, by direct enumeration.
    pub fn incidences(&self) -> usize {
        self.points
            .iter()
            .map(|&(p, q)| self.lines.iter().filter(|&&(m, b)| q == m * p + b).count())
            .sum()
    }
}

/// Line through `(x, 0)` whose cotangent against the x axis is `y`.
pub fn line_from_param(x: &Scalar, y: &Scalar) -> Line {
    Line::new(Scalar::one(), -y, -x).expect("a = 1")
}

/// Points `{1..k}×{1..2k²}` and lines `y = m·x + b`, `m ∈ 1..k`, `b ∈ 1..k²`,
/// pulled back through the lift: a point `(p,q)` becomes the parameter pair
/// `(p, (q+p²)/2)` and a line `(m,b)` becomes `(−m/2, (b−m²/4)/2)`.
pub fn st_extremal(k: usize) -> Result<StExtremal, ConstructionError> {
    if k < 1 {
        return Err(ConstructionError::BadParameter {
            kind: "st_extremal",
            k,
            min: 1,
        });
    }
    let ki = k as i64;
    let points: Vec<(i64, i64)> = (1..=ki)
        .flat_map(|p| (1..=2 * ki * ki).map(move |q| (p, q)))
        .collect();
    let lines: Vec<(i64, i64)> = (1..=ki).flat_map(|m| (1..=ki * ki).map(move |b| (m, b))).collect();
    let mut out = vec![Line::from_ints(0, 1, 0).expect("x axis")];
    for &(p, q) in &points {
        let x = Scalar::from_int(p);
        let y = Scalar::ratio(q + p * p, 2);
        out.push(line_from_param(&x, &y));
    }
    for &(m, b) in &lines {
        let x = Scalar::ratio(-m, 2);
        let y = Scalar::ratio(4 * b - m * m, 8);
        out.push(line_from_param(&x, &y));
    }
    // Point parameters have x > 0 and line parameters x < 0, so no two coincide.
    let arrangement = Arrangement::new(out).expect("parameter pairs are distinct");
    Ok(StExtremal {
        k,
        arrangement,
        points,
        lines,
    })
}

/// Uniform scaling about the origin; areas scale by `factor²`.
pub fn scale(arr: &Arrangement, factor: &Scalar) -> Result<Arrangement, ConstructionError> {
    if !factor.is_positive() {
        return Err(ConstructionError::NonPositiveScale);
    }
    Ok(arr.map(&AffineMap::uniform_scale(factor.clone())).expect("positive scale"))
}

/// Rescales so that the minimum proper area becomes 1. Uses a uniform
/// scaling when `1/min` is a square in the field, and `diag(1/min, 1)`
/// otherwise; both multiply every area by `1/min`.
pub fn scale_to_unit_min(arr: &Arrangement) -> Result<Arrangement, ConstructionError> {
    let c = census(arr)?;
    let (min, _) = c.min_group().ok_or(ConstructionError::NoProperTriangle)?;
    let target = Scalar::one() / min;
    let map = match target.sqrt_exact() {
        Some(f) => AffineMap::uniform_scale(f),
        None => AffineMap::diagonal(target, Scalar::one()),
    };
    Ok(arr.map(&map).expect("positive scale"))
}

/// `n` random lines with integer coefficients in `[−range, range]`.
/// With `general` set, rejects any line that would create a parallel pair
/// or a concurrent triple. After 1000 rejections in a row the range doubles,
/// so small ranges cannot stall.
pub fn random_arrangement(n: usize, range: i64, general: bool, seed: u64) -> Arrangement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut range = range.max(1);
    let mut misses = 0u32;
    let mut raw: Vec<[i128; 3]> = Vec::with_capacity(n);
    let mut vertices: Vec<[i128; 3]> = Vec::new();
    let mut lines: Vec<Line> = Vec::with_capacity(n);
    while lines.len() < n {
        if misses == 1000 {
            range *= 2;
            misses = 0;
        }
        misses += 1;
        let (a, b, c) = (
            rng.gen_range(-range..=range),
            rng.gen_range(-range..=range),
            rng.gen_range(-range..=range),
        );
        let Ok(l) = Line::from_ints(a, b, c) else { continue };
        if lines.contains(&l) {
            continue;
        }
        let h = [a as i128, b as i128, c as i128];
        if general {
            let parallel = raw.iter().any(|r| r[0] * h[1] - r[1] * h[0] == 0);
            let concurrent = vertices.iter().any(|v| v[0] * h[0] + v[1] * h[1] + v[2] * h[2] == 0);
            if parallel || concurrent {
                continue;
            }
            vertices.extend(raw.iter().map(|r| {
                [
                    r[1] * h[2] - r[2] * h[1],
                    r[2] * h[0] - r[0] * h[2],
                    r[0] * h[1] - r[1] * h[0],
                ]
            }));
        }
        raw.push(h);
        lines.push(l);
        misses = 0;
    }
    Arrangement::new(lines).expect("distinct lines")
}

/// Closed-form facial-triangle count of the kagome construction.
pub fn hexgrid_formula(n: usize) -> usize {
    let (l, j) = (n / 6, n % 6);
    if j == 0 {
        6 * l * l
    } else {
        6 * l * l + 2 * j * l + j - 2
    }
}

/// Closed-form facial-triangle count of the triangular-grid construction.
pub fn trigrid_formula(n: usize) -> i64 {
    let (mut l, mut j) = ((n / 6) as i64, (n % 6) as i64);
    if j == 3 {
        return 6 * l * l + 6 * l;
    }
    if j > 3 {
        l += 1;
        j -= 6;
    }
    6 * l * l + 2 * j * l - 2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::count_facial;
    use crate::par::ExecMode;

    #[test]
    fn small_grids_match_formulas() {
        for n in 3..=13 {
            assert_eq!(count_facial(&hexgrid(n).unwrap(), ExecMode::Sequential), hexgrid_formula(n), "hex {n}");
            let tri = count_facial(&trigrid(n).unwrap(), ExecMode::Sequential) as i64;
            if n == 4 {
                assert_eq!(tri, 1);
            } else {
                assert_eq!(tri, trigrid_formula(n), "tri {n}");
            }
        }
    }

    #[test]
    fn trigrid_centres() {
        let t = trigrid(9).unwrap();
        assert!(t.lines().contains(&Line::from_ints(1, 0, 0).unwrap()));
        assert!(!t.classification().concurrent_triples.is_empty());
        assert!(hexgrid(12).unwrap().classification().concurrent_triples.is_empty());
    }

    #[test]
    fn pentagon_is_generic() {
        let p = pentagon();
        assert_eq!(p.len(), 5);
        let c = p.classification();
        assert!(c.parallel_classes.is_empty() && c.concurrent_triples.is_empty());
        assert_eq!(census(&p).unwrap().max_group().unwrap().1.len(), 5);
    }

    #[test]
    fn st_extremal_sizes() {
        let s = st_extremal(2).unwrap();
        assert_eq!(s.arrangement.len(), 25);
        assert_eq!(s.incidences(), 16);
        assert_eq!(st_extremal(3).unwrap().incidences(), 81);
    }

    #[test]
    fn scaling() {
        let a: Arrangement = "1 0 0\n0 1 0\n1 1 -1\n".parse().unwrap();
        let b = scale(&a, &Scalar::from_int(2)).unwrap();
        assert_eq!(census(&b).unwrap().min_group().unwrap().0, &Scalar::from_int(2));
        let u = scale_to_unit_min(&hexgrid(6).unwrap()).unwrap();
        assert_eq!(census(&u).unwrap().min_group().unwrap().0, &Scalar::one());
    }

    #[test]
    fn random_general_position() {
        let a = random_arrangement(12, 50, true, 7);
        assert!(!a.has_parallel_pair());
        assert!(a.classification().concurrent_triples.is_empty());
        assert_eq!(a, random_arrangement(12, 50, true, 7));
    }
}
