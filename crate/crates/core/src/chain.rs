//! Arrangements with many triangles of maximum area.
//!
//! Starting from the affine-regular pentagon (five maximum triangles), each
//! step glues in another pentagon so that seven new maximum triangles appear.
//! The sliding distances are roots of quadratics, so the offsets leave
//! `Q(√5)` and are carried as [`RealExpr`]s; normals stay exact. Areas are
//! certified against the target with [`RealExpr::compare`], where equality is
//! claimed only for triples that are tight by construction.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::arrangement::Arrangement;
use crate::bounds::find_cycle;
use crate::census::census;
use crate::constructions::pentagon;
use crate::geometry::Line;
use crate::interval::{Comparison, PrecisionPolicy, RealExpr};
use crate::scalar::{Rational, Scalar, Sign};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error("could not separate the two parts within {0} doublings")]
    Placement(u32),
    #[error("no sliding direction gave a separated first root")]
    NoSeparatedRoot,
    #[error("slide along the singleton line did not fix the first tight triangle")]
    SingletonDrift,
    #[error("approximated line is degenerate")]
    Degenerate,
}

/// Line `a·x + b·y + c = 0` with an exact normal and a certified offset.
#[derive(Clone, Debug)]
pub struct ChainLine {
    pub a: Scalar,
    pub b: Scalar,
    pub c: RealExpr,
}

impl ChainLine {
    fn from_line(l: &Line) -> Self {
        ChainLine {
            a: l.a().clone(),
            b: l.b().clone(),
            c: RealExpr::exact(l.c().clone()),
        }
    }

    /// Image under `p ↦ M·p` with `det M = 1`.
    fn linear(&self, m: &[[Scalar; 2]; 2]) -> Self {
        ChainLine {
            a: &m[1][1] * &self.a - &m[1][0] * &self.b,
            b: &m[0][0] * &self.b - &m[0][1] * &self.a,
            c: self.c.clone(),
        }
    }

    /// Image under `p ↦ p + t·v`.
    fn translate(&self, t: &RealExpr, v: &(Scalar, Scalar)) -> Self {
        let nv = &self.a * &v.0 + &self.b * &v.1;
        ChainLine {
            a: self.a.clone(),
            b: self.b.clone(),
            c: self.c.sub(&t.scale(&nv)),
        }
    }

    fn cross(&self, other: &ChainLine) -> Scalar {
        &self.a * &other.b - &self.b * &other.a
    }

    /// Rational line whose offset is within `2^-bits` of the true one.
    pub fn approximate(&self, bits: u32) -> Result<Line, ChainError> {
        let c = self.c.approx(bits).ok_or(ChainError::Degenerate)?;
        Line::new(self.a.clone(), self.b.clone(), Scalar::from(c)).map_err(|_| ChainError::Degenerate)
    }
}

/// `det` of three lines is `Σ c_i·cof_i`; the cofactors are exact.
fn cofactors(l: [&ChainLine; 3]) -> [Scalar; 3] {
    [l[1].cross(l[2]), -l[0].cross(l[2]), l[0].cross(l[1])]
}

/// `2·|C12·C13·C23|`, zero when two lines are parallel.
fn weight(l: [&ChainLine; 3]) -> Scalar {
    let w = l[0].cross(l[1]) * l[0].cross(l[2]) * l[1].cross(l[2]);
    Scalar::from_int(2) * w.abs()
}

fn det3(l: [&ChainLine; 3]) -> RealExpr {
    let cof = cofactors(l);
    l.iter()
        .zip(&cof)
        .fold(RealExpr::zero(), |acc, (line, k)| acc.add(&line.c.scale(k)))
}

fn area(l: [&ChainLine; 3]) -> Option<RealExpr> {
    let w = weight(l);
    if w.is_zero() {
        return None;
    }
    let d = det3(l);
    Some(d.mul(&d).scale(&(Scalar::one() / w)))
}

/// A group of lines with the triples known to reach the target area.
#[derive(Clone, Debug)]
struct Part {
    lines: Vec<ChainLine>,
    tight: BTreeSet<[usize; 3]>,
}

impl Part {
    fn pentagon() -> (Part, Scalar) {
        let arr = pentagon();
        let cen = census(&arr).expect("five lines");
        let (a, tight) = cen.max_group().expect("proper triangles");
        let part = Part {
            lines: arr.lines().iter().map(ChainLine::from_line).collect(),
            tight: tight.iter().copied().collect(),
        };
        (part, a.clone())
    }

    fn map(&self, f: impl Fn(&ChainLine) -> ChainLine) -> Part {
        Part {
            lines: self.lines.iter().map(f).collect(),
            tight: self.tight.clone(),
        }
    }
}

/// Cross triple: two lines of one part and one of the other. Indices are
/// global, with the first part's lines first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Cross {
    idx: [usize; 3],
    /// Which of the three lines belong to the moving (first) part.
    moving: [bool; 3],
}

impl Cross {
    /// The line that is alone on its side.
    fn singleton(&self) -> usize {
        let count = self.moving.iter().filter(|&&m| m).count();
        let lone = (0..3).find(|&p| self.moving[p] == (count == 1)).expect("mixed triple");
        self.idx[lone]
    }
}

fn cross_triples(n_moving: usize, n_total: usize) -> Vec<Cross> {
    let mut out = Vec::new();
    for i in 0..n_total {
        for j in i + 1..n_total {
            for k in j + 1..n_total {
                let moving = [i < n_moving, j < n_moving, k < n_moving];
                if moving.iter().any(|&m| m) && !moving.iter().all(|&m| m) {
                    out.push(Cross { idx: [i, j, k], moving });
                }
            }
        }
    }
    out
}

fn pick<'a>(lines: &'a [ChainLine], idx: [usize; 3]) -> [&'a ChainLine; 3] {
    [&lines[idx[0]], &lines[idx[1]], &lines[idx[2]]]
}

/// Shear parameter: the smallest `λ >= 0` keeping every `f(line, λ)` nonzero.
fn avoid(lines: &[ChainLine], f: impl Fn(&ChainLine, &Scalar) -> Scalar) -> Scalar {
    (0..)
        .map(Scalar::from_int)
        .find(|lam| lines.iter().all(|l| !f(l, lam).is_zero()))
        .expect("finitely many bad values")
}

/// Height `s` minimizing the largest triangle cut from the part by `y = s`.
/// Lines must not be horizontal.
fn centre(lines: &[(f64, f64, f64)]) -> f64 {
    let mut pairs = Vec::new();
    for (p, lp) in lines.iter().enumerate() {
        for lq in &lines[p + 1..] {
            let det = lp.0 * lq.1 - lp.1 * lq.0;
            if det == 0.0 {
                continue;
            }
            let s = (lp.2 * lq.0 - lp.0 * lq.2) / det;
            let spread = (lp.1 / lp.0 - lq.1 / lq.0).abs() / 2.0;
            pairs.push((s, spread));
        }
    }
    let f = |s: f64| pairs.iter().map(|&(h, w)| w * (s - h) * (s - h)).fold(0.0, f64::max);
    let (mut lo, mut hi) = pairs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(s, _)| (lo.min(s), hi.max(s)));
    if !lo.is_finite() {
        return 0.0;
    }
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) < f(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    (lo + hi) / 2.0
}

fn to_rational(x: f64) -> Scalar {
    let q = Rational::from_float((x * 1024.0).round() / 1024.0).unwrap_or_default();
    Scalar::from(q)
}

fn floats(lines: &[ChainLine]) -> Vec<(f64, f64, f64)> {
    lines.iter().map(|l| (l.a.to_f64(), l.b.to_f64(), l.c.to_f64())).collect()
}

const MAX_DOUBLINGS: u32 = 48;

/// Directions tried for the first slide, in order.
fn slide_directions() -> impl Iterator<Item = (Scalar, Scalar)> {
    let mut dirs = vec![(1, 0), (1, 1)];
    for m in 2..12 {
        dirs.push((m, 1));
        dirs.push((1, m));
    }
    dirs.into_iter().map(|(x, y)| (Scalar::from_int(x), Scalar::from_int(y)))
}

/// Roots of `D(t)² = A·W` for the moving part translated by `t·v`.
/// `None` when the area does not change along `v`.
fn roots(lines: &[ChainLine], c: &Cross, v: &(Scalar, Scalar), target: &Scalar) -> Option<(Scalar, RealExpr, RealExpr)> {
    let l = pick(lines, c.idx);
    let w = weight(l);
    if w.is_zero() {
        return None;
    }
    let cof = cofactors(l);
    let mut d1 = Scalar::zero();
    for p in 0..3 {
        if c.moving[p] {
            let nv = &l[p].a * &v.0 + &l[p].b * &v.1;
            d1 = d1 - nv * &cof[p];
        }
    }
    if d1.is_zero() {
        return None;
    }
    let d0 = det3(l);
    let r = RealExpr::exact(target * &w).sqrt();
    let inv = Scalar::one() / &d1;
    let plus = r.sub(&d0).scale(&inv);
    let minus = r.neg().sub(&d0).scale(&inv);
    Some((d1, plus, minus))
}

/// The certified smallest of `cands`, if it is strictly below all others.
fn separated_min(cands: &[(usize, RealExpr)], policy: &PrecisionPolicy) -> Option<usize> {
    let best = (0..cands.len()).min_by(|&x, &y| {
        cands[x].1.to_f64().partial_cmp(&cands[y].1.to_f64()).unwrap_or(std::cmp::Ordering::Equal)
    })?;
    let ok = (0..cands.len())
        .filter(|&o| o != best)
        .all(|o| cands[best].1.compare(&cands[o].1, false, policy) == Comparison::Less);
    ok.then_some(best)
}

fn combine(first: &Part, second: &Part, target: &Scalar, policy: &PrecisionPolicy) -> Result<Part, ChainError> {
    let one = Scalar::one;
    let zero = Scalar::zero;
    // No horizontal line in the first part, no vertical line in the second.
    let lam = avoid(&first.lines, |l, lam| &l.a - lam * &l.b);
    let l_part = first.map(|l| l.linear(&[[one(), zero()], [lam.clone(), one()]]));
    let mu = avoid(&second.lines, |l, mu| &l.b - mu * &l.a);
    let k_part = second.map(|l| l.linear(&[[one(), mu.clone()], [zero(), one()]]));

    let s0 = to_rational(centre(&floats(&l_part.lines)));
    let swapped: Vec<(f64, f64, f64)> = floats(&k_part.lines).into_iter().map(|(a, b, c)| (b, a, c)).collect();
    let r0 = to_rational(centre(&swapped));
    let y_axis = (zero(), one());
    let x_axis = (one(), zero());
    let l_part = l_part.map(|l| l.translate(&RealExpr::exact(-&s0), &y_axis));
    let k_part = k_part.map(|l| l.translate(&RealExpr::exact(-&r0), &x_axis));

    let n_l = l_part.lines.len();
    let n = n_l + k_part.lines.len();
    let crosses = cross_triples(n_l, n);
    let target_expr = RealExpr::exact(target.clone());

    let mut sigma = one();
    let mut lines = Vec::new();
    let mut placed = false;
    for _ in 0..MAX_DOUBLINGS {
        let inv = &one() / &sigma;
        lines = l_part
            .lines
            .iter()
            .map(|l| l.linear(&[[inv.clone(), zero()], [zero(), sigma.clone()]]))
            .chain(k_part.lines.iter().map(|l| l.linear(&[[sigma.clone(), zero()], [zero(), inv.clone()]])))
            .collect::<Vec<_>>();
        let parallel = lines[..n_l].iter().any(|p| lines[n_l..].iter().any(|q| p.cross(q).is_zero()));
        if !parallel
            && crosses.iter().all(|c| {
                area(pick(&lines, c.idx)).map_or(true, |a| a.compare(&target_expr, false, policy) == Comparison::Less)
            })
        {
            placed = true;
            break;
        }
        sigma = sigma * Scalar::from_int(2);
    }
    if !placed {
        return Err(ChainError::Placement(MAX_DOUBLINGS));
    }

    // First slide: the moving part travels along v until one cross triple
    // reaches the target. Each such triple has exactly one positive root.
    let mut first_hit = None;
    for v in slide_directions() {
        let cands: Vec<(usize, RealExpr)> = crosses
            .iter()
            .enumerate()
            .filter_map(|(i, c)| {
                roots(&lines, c, &v, target).map(|(d1, plus, minus)| (i, if d1.is_positive() { plus } else { minus }))
            })
            .collect();
        if let Some(b) = separated_min(&cands, policy) {
            first_hit = Some((v, cands[b].0, cands[b].1.clone()));
            break;
        }
    }
    let (v, star, t0) = first_hit.ok_or(ChainError::NoSeparatedRoot)?;
    for l in &mut lines[..n_l] {
        *l = l.translate(&t0, &v);
    }

    // Second slide along the singleton line of the first tight triple,
    // which keeps that triple's area fixed.
    let lone = &lines[crosses[star].singleton()];
    let w = (lone.b.clone(), -&lone.a);
    if roots(&lines, &crosses[star], &w, target).is_some() {
        return Err(ChainError::SingletonDrift);
    }
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for (i, c) in crosses.iter().enumerate() {
        if i == star {
            continue;
        }
        if let Some((d1, plus, minus)) = roots(&lines, c, &w, target) {
            let (p, m) = if d1.is_positive() { (plus, minus) } else { (minus, plus) };
            pos.push((i, p));
            neg.push((i, m.neg()));
        }
    }
    let (second_hit, t1) = if let Some(b) = separated_min(&pos, policy) {
        (pos[b].0, pos[b].1.clone())
    } else if let Some(b) = separated_min(&neg, policy) {
        (neg[b].0, neg[b].1.neg())
    } else {
        return Err(ChainError::NoSeparatedRoot);
    };
    for l in &mut lines[..n_l] {
        *l = l.translate(&t1, &w);
    }

    let mut tight: BTreeSet<[usize; 3]> = l_part.tight.clone();
    tight.extend(k_part.tight.iter().map(|t| t.map(|i| i + n_l)));
    tight.insert(crosses[star].idx);
    tight.insert(crosses[second_hit].idx);
    Ok(Part { lines, tight })
}

/// Certified census of a chain against the target area.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ChainCertificate {
    /// Triples certified equal to the target.
    pub equal: usize,
    pub less: usize,
    pub greater: usize,
    pub undecided: usize,
    /// Triples with a parallel pair.
    pub degenerate: usize,
    /// Largest number of maximum triangles on one line.
    pub per_line_max: usize,
    /// `G_ℓ^±` are forests for every line; `None` if a side could not be
    /// certified.
    pub gell_forests: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct MaxChain {
    pub k: usize,
    pub lines: Vec<ChainLine>,
    /// Maximum area of the pentagon, shared by every tight triple.
    pub target: Scalar,
    /// Triples tight by construction.
    pub tight: Vec<[usize; 3]>,
    pub certificate: ChainCertificate,
}

impl MaxChain {
    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    /// Rational approximation of the offsets. Ties between maximum areas
    /// are not preserved.
    pub fn approximate(&self, bits: u32) -> Result<Arrangement, ChainError> {
        let lines = self.lines.iter().map(|l| l.approximate(bits)).collect::<Result<Vec<_>, _>>()?;
        Arrangement::new(lines).map_err(|_| ChainError::Degenerate)
    }
}

/// `5 + 7k` lines, starting from the pentagon and gluing `k` more copies.
pub fn max_chain(k: usize, policy: &PrecisionPolicy) -> Result<MaxChain, ChainError> {
    let (base, target) = Part::pentagon();
    let mut cur = base.clone();
    for _ in 0..k {
        cur = combine(&cur, &base, &target, policy)?;
    }
    let certificate = certify(&cur, &target, policy);
    Ok(MaxChain {
        k,
        lines: cur.lines,
        target,
        tight: cur.tight.into_iter().collect(),
        certificate,
    })
}

fn certify(part: &Part, target: &Scalar, policy: &PrecisionPolicy) -> ChainCertificate {
    let lines = &part.lines;
    let n = lines.len();
    let target_expr = RealExpr::exact(target.clone());
    let mut cert = ChainCertificate::default();
    let mut maxes = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let idx = [i, j, k];
                let Some(a) = area(pick(lines, idx)) else {
                    cert.degenerate += 1;
                    continue;
                };
                match a.compare(&target_expr, part.tight.contains(&idx), policy) {
                    Comparison::Equal => {
                        cert.equal += 1;
                        maxes.push(idx);
                    }
                    Comparison::Less => cert.less += 1,
                    Comparison::Greater => cert.greater += 1,
                    Comparison::Undecided => cert.undecided += 1,
                }
            }
        }
    }
    let mut per_line = vec![0usize; n];
    for t in &maxes {
        for &i in t {
            per_line[i] += 1;
        }
    }
    cert.per_line_max = per_line.into_iter().max().unwrap_or(0);
    cert.gell_forests = gell_forests(lines, &maxes, policy);
    cert
}

/// Position of `ℓ ∩ ℓ_i` along the direction `(b, −a)` of `ℓ`, scaled by
/// `a² + b²`.
fn along(ell: &ChainLine, other: &ChainLine) -> RealExpr {
    let det = ell.cross(other);
    // x·b − y·a with x = (b·c_i − b_i·c)/det, y = (c·a_i − c_i·a)/det.
    let num = other
        .c
        .scale(&(&ell.b * &ell.b + &ell.a * &ell.a))
        .sub(&ell.c.scale(&(&other.b * &ell.b + &other.a * &ell.a)));
    num.scale(&(Scalar::one() / det))
}

/// Splits the maximum triangles through each line by the sign of
/// `Δx·Δy` in the frame of that line and checks both halves are forests.
fn gell_forests(lines: &[ChainLine], maxes: &[[usize; 3]], policy: &PrecisionPolicy) -> Option<bool> {
    for (e, ell) in lines.iter().enumerate() {
        let mut plus = Vec::new();
        let mut minus = Vec::new();
        for t in maxes.iter().filter(|t| t.contains(&e)) {
            let mut rest = t.iter().copied().filter(|&i| i != e);
            let (i, j) = (rest.next()?, rest.next()?);
            let dx = along(ell, &lines[i]).sub(&along(ell, &lines[j])).sign(policy)?;
            let d = (ell.b.clone(), -&ell.a);
            let slope = |l: &ChainLine| {
                let dl = (l.b.clone(), -&l.a);
                (&d.0 * &dl.0 + &d.1 * &dl.1) / (&d.0 * &dl.1 - &d.1 * &dl.0)
            };
            let dy = (slope(&lines[i]) - slope(&lines[j])).sign();
            if dx == Sign::Zero || dy == Sign::Zero {
                return None;
            }
            if dx == dy {
                plus.push([i, j]);
            } else {
                minus.push([i, j]);
            }
        }
        if find_cycle(&plus).is_some() || find_cycle(&minus).is_some() {
            return Some(false);
        }
    }
    Some(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(k: usize) -> MaxChain {
        max_chain(k, &PrecisionPolicy::default()).unwrap()
    }

    #[test]
    fn base_pentagon() {
        let c = run(0);
        assert_eq!(c.len(), 5);
        assert_eq!(c.certificate.equal, 5);
        assert_eq!(c.certificate.less, 5);
    }

    #[test]
    fn one_step() {
        let c = run(1);
        assert_eq!(c.len(), 10);
        assert_eq!(c.tight.len(), 12);
        assert_eq!(c.certificate.equal, 12);
        assert_eq!((c.certificate.greater, c.certificate.undecided), (0, 0));
        assert_eq!(c.certificate.gell_forests, Some(true));
        assert!(c.certificate.per_line_max <= 2 * (c.len() - 2));
    }

    #[test]
    fn two_steps() {
        let c = run(2);
        assert_eq!(c.len(), 15);
        assert_eq!(c.certificate.equal, 19);
        assert_eq!((c.certificate.greater, c.certificate.undecided), (0, 0));
        assert_eq!(c.certificate.gell_forests, Some(true));
    }

    #[test]
    fn approximation_is_close() {
        let c = run(1);
        let arr = c.approximate(200).unwrap();
        let cen = census(&arr).unwrap();
        let (top, _) = cen.max_group().unwrap();
        assert!((top.to_f64() - c.target.to_f64()).abs() < 1e-9);
    }
}
