//! Dual conics, tangency, the equal-area hyperbola and the general-position
//! validator.
//!
//! A dual conic is a symmetric form `D` on line coefficient vectors; the line
//! `l = (a, b, c)` is tangent iff `lᵀ·D·l = 0`. Degenerate forms (rank < 3)
//! are allowed: `p·pᵀ` is the pencil of lines through `p`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::binomial;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::arrangement::Arrangement;
use crate::census::AreaCensus;
use crate::geometry::{intersect, AffineMap, Intersection, Line, Point};
use crate::linalg;
use crate::par::{self, ExecMode};
use crate::scalar::{Scalar, Sign};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConicError {
    #[error("the zero matrix is not a conic")]
    Zero,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("lines are parallel or identical")]
    NoVertex,
    #[error("quadrant must be 1..=4, got {0}")]
    BadQuadrant(u8),
    #[error("area must be positive")]
    NonPositiveArea,
    #[error("expected {expected} lines, got {found}")]
    WrongCount { expected: usize, found: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualConic {
    m: [[Scalar; 3]; 3],
}

fn coeffs(l: &Line) -> [Scalar; 3] {
    [l.a().clone(), l.b().clone(), l.c().clone()]
}

fn mat_mul(a: &[[Scalar; 3]; 3], b: &[[Scalar; 3]; 3]) -> [[Scalar; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..3).fold(Scalar::zero(), |s, k| s + &a[i][k] * &b[k][j])))
}

fn transpose(a: &[[Scalar; 3]; 3]) -> [[Scalar; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i].clone()))
}

impl DualConic {
    pub fn new(m: [[Scalar; 3]; 3]) -> Result<Self, ConicError> {
        if m.iter().flatten().all(Scalar::is_zero) {
            return Err(ConicError::Zero);
        }
        for i in 0..3 {
            for j in 0..i {
                if m[i][j] != m[j][i] {
                    return Err(ConicError::NotSymmetric);
                }
            }
        }
        Ok(DualConic { m })
    }

    /// Coefficients of `A a² + B b² + C c² + D ab + E ac + F bc`.
    pub fn from_form(f: &[Scalar]) -> Result<Self, ConicError> {
        let h = |v: &Scalar| v / &Scalar::from_int(2);
        Self::new([
            [f[0].clone(), h(&f[3]), h(&f[4])],
            [h(&f[3]), f[1].clone(), h(&f[5])],
            [h(&f[4]), h(&f[5]), f[2].clone()],
        ])
    }

    /// Dual of the circle with centre `(cx, cy)` and radius `r`.
    pub fn circle(cx: &Scalar, cy: &Scalar, r: &Scalar) -> Self {
        // Tangent iff (a·cx + b·cy + c)² = r²(a² + b²).
        let p = [cx.clone(), cy.clone(), Scalar::one()];
        let mut m: [[Scalar; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| &p[i] * &p[j]));
        let r2 = r.square();
        m[0][0] = &m[0][0] - &r2;
        m[1][1] = &m[1][1] - &r2;
        Self::new(m).expect("nonzero")
    }

    /// All lines through `p`: the rank-1 form `p·pᵀ`.
    pub fn point(p: &Point) -> Self {
        let v = [p.x.clone(), p.y.clone(), Scalar::one()];
        Self::new(std::array::from_fn(|i| std::array::from_fn(|j| &v[i] * &v[j]))).expect("nonzero")
    }

    pub fn matrix(&self) -> &[[Scalar; 3]; 3] {
        &self.m
    }

    pub fn form(&self, l: &Line) -> Scalar {
        let v = coeffs(l);
        let mut s = Scalar::zero();
        for i in 0..3 {
            for j in 0..3 {
                s = s + &v[i] * &self.m[i][j] * &v[j];
            }
        }
        s
    }

    pub fn rank(&self) -> usize {
        linalg::rank(&self.m.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    /// The same conic after the point map `m`: lines transform by the inverse
    /// transpose, so the dual form becomes `H·D·Hᵀ` with `H` the homogeneous
    /// matrix of `m`.
    pub fn transform(&self, m: &AffineMap) -> Self {
        let z = Scalar::zero;
        let h = [
            [m.m[0][0].clone(), m.m[0][1].clone(), m.t[0].clone()],
            [m.m[1][0].clone(), m.m[1][1].clone(), m.t[1].clone()],
            [z(), z(), Scalar::one()],
        ];
        DualConic {
            m: mat_mul(&mat_mul(&h, &self.m), &transpose(&h)),
        }
    }

    /// Whether `self` is a nonzero multiple of `other`.
    pub fn same_conic(&self, other: &DualConic) -> bool {
        let a: Vec<&Scalar> = self.m.iter().flatten().collect();
        let b: Vec<&Scalar> = other.m.iter().flatten().collect();
        let Some(k) = (0..9).find(|&i| !a[i].is_zero()) else { return false };
        if b[k].is_zero() {
            return false;
        }
        let ratio = b[k] / a[k];
        (0..9).all(|i| &(a[i] * &ratio) == b[i])
    }
}

pub fn tangent(l: &Line, d: &DualConic) -> bool {
    d.form(l).is_zero()
}

fn tangency_row(l: &Line) -> Vec<Scalar> {
    let [a, b, c] = coeffs(l);
    vec![a.square(), b.square(), c.square(), &a * &b, &a * &c, &b * &c]
}

fn int_row(l: &Line) -> Option<Vec<BigInt>> {
    let [a, b, c] = [l.a(), l.b(), l.c()].map(|v| v.as_rational().filter(|q| q.is_integer()).map(|q| q.numer().clone()));
    let (a, b, c) = (a?, b?, c?);
    Some(vec![&a * &a, &b * &b, &c * &c, &a * &b, &a * &c, &b * &c])
}

/// Outcome of the six-line test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SixTangent {
    /// A common tangent conic exists, possibly degenerate.
    pub common: bool,
    /// Dimension of the space of common tangent conics.
    pub kernel_dim: usize,
    /// Largest rank found among certificate conics; 3 means a proper conic.
    pub certificate_rank: Option<usize>,
}

fn six_singular(lines: &[&Line]) -> bool {
    if let Some(rows) = lines.iter().map(|l| int_row(l)).collect::<Option<Vec<_>>>() {
        return linalg::det_bigint(rows) == BigInt::from(0);
    }
    let rows: Vec<Vec<Scalar>> = lines.iter().map(|l| tangency_row(l)).collect();
    linalg::det(&rows).is_zero()
}

/// Whether six lines share a tangent conic: the 6×6 matrix with rows
/// `(a², b², c², ab, ac, bc)` is singular.
pub fn six_tangent_test(lines: &[Line]) -> Result<SixTangent, ConicError> {
    if lines.len() != 6 {
        return Err(ConicError::WrongCount {
            expected: 6,
            found: lines.len(),
        });
    }
    let refs: Vec<&Line> = lines.iter().collect();
    if !six_singular(&refs) {
        return Ok(SixTangent {
            common: false,
            kernel_dim: 0,
            certificate_rank: None,
        });
    }
    let rows: Vec<Vec<Scalar>> = lines.iter().map(tangency_row).collect();
    let k = linalg::kernel(&rows);
    Ok(SixTangent {
        common: true,
        kernel_dim: k.len(),
        certificate_rank: max_rank(&k),
    })
}

/// Largest conic rank over the basis vectors and one generic combination
/// of them (coefficients `1, 2, 4, …`), which attains the maximum over the
/// span for all but finitely many coefficient choices.
fn max_rank(basis: &[Vec<Scalar>]) -> Option<usize> {
    let rank = |v: &[Scalar]| DualConic::from_form(v).map(|d| d.rank()).unwrap_or(0);
    let mut best = basis.iter().map(|v| rank(v)).max()?;
    let mut combo = vec![Scalar::zero(); 6];
    let mut w = Scalar::one();
    for v in basis {
        for (c, x) in combo.iter_mut().zip(v) {
            *c = &*c + &w * x;
        }
        w = &w * &Scalar::from_int(2);
    }
    best = best.max(rank(&combo));
    Some(best)
}

/// Conics tangent to up to five given lines: a basis of the kernel of the
/// tangency rows. Five lines always leave at least one.
pub fn common_tangent_conics(lines: &[Line]) -> Vec<DualConic> {
    let rows: Vec<Vec<Scalar>> = lines.iter().map(tangency_row).collect();
    linalg::kernel(&rows)
        .iter()
        .map(|v| DualConic::from_form(v).expect("kernel vectors are nonzero"))
        .collect()
}

/// Quadrant of `p` relative to `l1`, `l2` from the signs `(l1(p), l2(p))`:
/// 1 is `(+,+)`, 2 is `(−,+)`, 3 is `(−,−)`, 4 is `(+,−)`. `None` on a line.
pub fn quadrant_containing(l1: &Line, l2: &Line, p: &Point) -> Option<u8> {
    match (l1.side(p), l2.side(p)) {
        (Sign::Positive, Sign::Positive) => Some(1),
        (Sign::Negative, Sign::Positive) => Some(2),
        (Sign::Negative, Sign::Negative) => Some(3),
        (Sign::Positive, Sign::Negative) => Some(4),
        _ => None,
    }
}

fn vertex(l1: &Line, l2: &Line) -> Option<Point> {
    match intersect(l1, l2) {
        Ok(Intersection::Point(p)) => Some(p),
        _ => None,
    }
}

/// Quadrant at `l1 ∩ l2` holding the triangle cut by `l3`, or `None` when
/// the three lines do not form a triangle.
pub fn triangle_quadrant(l1: &Line, l2: &Line, l3: &Line) -> Option<u8> {
    let (o, p, q) = (vertex(l1, l2)?, vertex(l1, l3)?, vertex(l2, l3)?);
    let three = Scalar::from_int(3);
    let g = Point::new((&o.x + &p.x + &q.x) / &three, (&o.y + &p.y + &q.y) / &three);
    quadrant_containing(l1, l2, &g)
}

/// Dual conic of the hyperbola, asymptotic to `l1` and `l2`, whose tangents
/// cut triangles of area `λ` from the given quadrant at `l1 ∩ l2`.
/// Opposite quadrants share a conic.
///
/// In skew coordinates `O + s·u₁ + t·u₂` along the two lines the hyperbola
/// is `s·t = c`; a tangent meets the axes at `2s₀`, `2t₀` and cuts a
/// triangle of area `2c·|u₁ × u₂|`.
pub fn equal_area_conic(l1: &Line, l2: &Line, quadrant: u8, lambda: &Scalar) -> Result<DualConic, ConicError> {
    if !(1..=4).contains(&quadrant) {
        return Err(ConicError::BadQuadrant(quadrant));
    }
    if !lambda.is_positive() {
        return Err(ConicError::NonPositiveArea);
    }
    let o = vertex(l1, l2).ok_or(ConicError::NoVertex)?;
    // u1 runs along l1 into l2's positive side, u2 along l2 into l1's, so
    // sign(l1) = sign(t) and sign(l2) = sign(s).
    let orient = |along: &Line, other: &Line| {
        let (dx, dy) = along.direction();
        if (other.a() * &dx + other.b() * &dy).is_positive() {
            (dx, dy)
        } else {
            (-dx, -dy)
        }
    };
    let u1 = orient(l1, l2);
    let u2 = orient(l2, l1);
    let cross = (&u1.0 * &u2.1 - &u1.1 * &u2.0).abs();
    let mut c = lambda / &(Scalar::from_int(2) * cross);
    if quadrant % 2 == 0 {
        c = -c;
    }
    let z = Scalar::zero;
    let m2c = -(Scalar::from_int(2) * c);
    let skew = [[z(), m2c.clone(), z()], [m2c, z(), z()], [z(), z(), Scalar::one()]];
    let t = [
        [u1.0.clone(), u1.1.clone(), z()],
        [u2.0.clone(), u2.1.clone(), z()],
        [o.x.clone(), o.y.clone(), Scalar::one()],
    ];
    DualConic::new(mat_mul(&mat_mul(&transpose(&t), &skew), &t))
}

/// Lines forming a `λ`-area triangle with a fixed pair, maximized over
/// pairs and areas.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairAreaProfile {
    pub max_lines: usize,
    pub max_per_quadrant: usize,
    /// Pair and area attaining `max_lines`.
    pub witness: Option<([usize; 2], String)>,
}

pub fn pair_area_profile(arr: &Arrangement, cen: &AreaCensus) -> PairAreaProfile {
    let n = arr.len();
    let mut best = PairAreaProfile {
        max_lines: 0,
        max_per_quadrant: 0,
        witness: None,
    };
    for i in 0..n {
        for j in i + 1..n {
            let (li, lj) = (arr.line(i), arr.line(j));
            if li.is_parallel(lj) {
                continue;
            }
            let mut by_area: HashMap<&Scalar, [usize; 4]> = HashMap::new();
            for k in (0..n).filter(|&k| k != i && k != j) {
                let mut t = [i, j, k];
                t.sort_unstable();
                let r = cen.record(t);
                if r.area.is_zero() {
                    continue;
                }
                let q = triangle_quadrant(li, lj, arr.line(k)).expect("proper triangle");
                by_area.entry(&r.area).or_default()[(q - 1) as usize] += 1;
            }
            for (area, counts) in by_area {
                let total: usize = counts.iter().sum();
                best.max_per_quadrant = best.max_per_quadrant.max(*counts.iter().max().unwrap());
                if total > best.max_lines {
                    best.max_lines = total;
                    best.witness = Some(([i, j], area.to_string()));
                }
            }
        }
    }
    best
}

/// How 6-subsets were covered.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Coverage {
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SixWitness {
    pub lines: [usize; 6],
    pub certificate_rank: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeneralPositionReport {
    pub n: usize,
    pub parallel_pairs: Vec<[usize; 2]>,
    pub concurrent_triples: Vec<[usize; 3]>,
    pub coverage: Coverage,
    pub subsets_total: u64,
    pub subsets_checked: u64,
    pub coverage_fraction: f64,
    pub six_tangent_found: u64,
    /// At most [`WITNESS_CAP`] examples.
    pub six_tangent_witnesses: Vec<SixWitness>,
    pub passes: bool,
}

pub const WITNESS_CAP: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GeneralPositionOptions {
    /// Check every 6-subset when there are at most this many.
    pub exhaustive_cap: u64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for GeneralPositionOptions {
    fn default() -> Self {
        GeneralPositionOptions {
            exhaustive_cap: 250_000,
            samples: 20_000,
            seed: 0,
        }
    }
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

pub fn validate_general_position(arr: &Arrangement, opts: &GeneralPositionOptions) -> GeneralPositionReport {
    let n = arr.len();
    let class = arr.classification();
    let mut parallel_pairs = Vec::new();
    for c in &class.parallel_classes {
        for (a, &i) in c.iter().enumerate() {
            for &j in &c[a + 1..] {
                parallel_pairs.push([i, j]);
            }
        }
    }
    let lines = arr.lines();
    let total = if n >= 6 { binomial(n as u64, 6) } else { 0 };
    let check = |s: [usize; 6]| -> Option<SixWitness> {
        let sel: Vec<&Line> = s.iter().map(|&i| &lines[i]).collect();
        six_singular(&sel).then(|| SixWitness {
            lines: s,
            certificate_rank: None,
        })
    };
    let (coverage, checked, hits): (Coverage, u64, Vec<SixWitness>) = if total <= opts.exhaustive_cap {
        let hits = par::flat_map_indexed(n.saturating_sub(5), ExecMode::default(), |first| {
            let mut out = Vec::new();
            let mut rest: Vec<usize> = (first + 1..first + 6).collect();
            loop {
                let s = [first, rest[0], rest[1], rest[2], rest[3], rest[4]];
                out.extend(check(s));
                // Enumerate 5-subsets of first+1..n by shifting indices.
                let mut shifted: Vec<usize> = rest.iter().map(|&r| r - first - 1).collect();
                if !next_combination(&mut shifted, n - first - 1) {
                    break;
                }
                rest = shifted.iter().map(|&r| r + first + 1).collect();
            }
            out
        });
        (Coverage::Exhaustive, total, hits)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut hits = Vec::new();
        for _ in 0..opts.samples {
            let mut idx = sample(&mut rng, n, 6).into_vec();
            idx.sort_unstable();
            hits.extend(check([idx[0], idx[1], idx[2], idx[3], idx[4], idx[5]]));
        }
        (
            Coverage::Sampled {
                samples: opts.samples,
                seed: opts.seed,
            },
            opts.samples as u64,
            hits,
        )
    };
    let found = hits.len() as u64;
    let witnesses = hits
        .into_iter()
        .take(WITNESS_CAP)
        .map(|mut w| {
            let six: Vec<Line> = w.lines.iter().map(|&i| lines[i].clone()).collect();
            w.certificate_rank = six_tangent_test(&six).expect("six lines").certificate_rank;
            w
        })
        .collect();
    let passes = parallel_pairs.is_empty() && class.concurrent_triples.is_empty() && found == 0;
    GeneralPositionReport {
        n,
        parallel_pairs,
        concurrent_triples: class.concurrent_triples.clone(),
        coverage,
        subsets_total: total,
        subsets_checked: checked,
        coverage_fraction: if total == 0 { 1.0 } else { checked as f64 / total as f64 },
        six_tangent_found: found,
        six_tangent_witnesses: witnesses,
        passes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::census;

    fn l(a: i64, b: i64, c: i64) -> Line {
        Line::from_ints(a, b, c).unwrap()
    }

    fn unit_circle() -> DualConic {
        DualConic::circle(&Scalar::zero(), &Scalar::zero(), &Scalar::one())
    }

    #[test]
    fn circle_tangency() {
        assert!(tangent(&l(1, 0, -1), &unit_circle()));
        assert!(!tangent(&l(1, 0, 0), &unit_circle()));
        assert_eq!(unit_circle().rank(), 3);
    }

    #[test]
    fn concurrent_six() {
        let six: Vec<Line> = (1..=6).map(|k| l(k, 1, -k - 1)).collect();
        let r = six_tangent_test(&six).unwrap();
        assert!(r.common);
        assert_eq!(r.kernel_dim, 3);
        assert!(r.certificate_rank.unwrap() < 3);
        assert!(tangent(&six[0], &DualConic::point(&Point::new(Scalar::one(), Scalar::one()))));
    }

    #[test]
    fn five_lines_have_a_conic() {
        let five = vec![l(1, 2, 3), l(-2, 1, 5), l(3, -1, 2), l(1, 1, -7), l(4, -3, 1)];
        let ks = common_tangent_conics(&five);
        assert!(!ks.is_empty());
        for line in &five {
            assert!(tangent(line, &ks[0]));
        }
        let mut six = five.clone();
        six.push(l(2, 5, -1));
        assert!(!six_tangent_test(&six).unwrap().common);
    }

    #[test]
    fn hyperbola_on_axes() {
        let (x, y) = (l(1, 0, 0), l(0, 1, 0));
        let d = equal_area_conic(&x, &y, 1, &Scalar::one()).unwrap();
        let tangent_line = Line::new(Scalar::ratio(1, 2), Scalar::one(), Scalar::from_int(-1)).unwrap();
        assert!(tangent(&tangent_line, &d));
        assert!(!tangent(&l(1, 1, -1), &d));
        assert_eq!(triangle_quadrant(&x, &y, &tangent_line), Some(1));
        // The opposite quadrant shares the conic; the adjacent ones do not.
        assert!(tangent(&l(1, 2, 2), &d));
        assert!(!tangent(&l(1, -2, -2), &d));
        assert!(tangent(&l(1, -2, -2), &equal_area_conic(&x, &y, 4, &Scalar::one()).unwrap()));
    }

    #[test]
    fn equal_area_lines_are_tangent() {
        let arr: Arrangement = "2 1 -3\n1 -3 4\n1 1 0\n1 0 -1\n0 1 2\n3 -1 1\n1 2 -9\n".parse().unwrap();
        let cen = census(&arr).unwrap();
        for r in cen.records() {
            if r.area.is_zero() {
                continue;
            }
            let [i, j, k] = r.indices;
            let (li, lj, lk) = (arr.line(i), arr.line(j), arr.line(k));
            let q = triangle_quadrant(li, lj, lk).unwrap();
            assert!(tangent(lk, &equal_area_conic(li, lj, q, &r.area).unwrap()));
        }
    }

    #[test]
    fn transform_preserves_tangency() {
        let m = AffineMap {
            m: [[Scalar::from_int(2), Scalar::one()], [Scalar::one(), Scalar::one()]],
            t: [Scalar::from_int(3), Scalar::from_int(-1)],
        };
        let d = unit_circle().transform(&m);
        let t = m.apply_line(&l(1, 0, -1)).unwrap();
        assert!(tangent(&t, &d));
    }

    #[test]
    fn validator() {
        let six: Vec<Line> = (1..=6).map(|k| l(k, 1, -k - 1)).collect();
        let rep = validate_general_position(&Arrangement::new(six).unwrap(), &Default::default());
        assert!(!rep.passes);
        assert_eq!(rep.subsets_checked, 1);
        let gp = crate::constructions::random_arrangement(10, 1000, true, 3);
        let rep = validate_general_position(&gp, &Default::default());
        assert!(rep.passes, "{rep:?}");
        assert_eq!(rep.subsets_checked, 210);
    }
}
