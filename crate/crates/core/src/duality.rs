//! Unit triangles on a line as point–line incidences.
//!
//! With unit frame scale, the pair `(x_i, y_i)` lifts to the point
//! `(x_i, 2y_i − x_i²)` and to the line `v = −2x_j·u + 2y_j + x_j²`. Point `i`
//! lies on line `j` iff `2(y_i − y_j) = (x_i − x_j)²`, i.e. iff the triangle
//! cut from `ℓ` by lines `i` and `j` has area 1.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::arrangement::Arrangement;
use crate::census::{count_area_on_line, CensusError};
use crate::geometry::{Frame, FrameParam};
use crate::par::{self, ExecMode};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DualityError {
    #[error("frame parameter {0} has scale {1}, expected 1")]
    UnnormalizedFrame(usize, Scalar),
    #[error("line index {0} out of range")]
    BadIndex(usize),
    #[error(transparent)]
    Census(#[from] CensusError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LiftedPoint {
    pub u: Scalar,
    pub v: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DualLine {
    pub slope: Scalar,
    pub intercept: Scalar,
}

impl DualLine {
    pub fn contains(&self, p: &LiftedPoint) -> bool {
        &self.slope * &p.u + &self.intercept == p.v
    }
}

/// Lifts unit-scale frame parameters to points and dual lines, index by index.
pub fn lift(params: &[FrameParam]) -> Result<(Vec<LiftedPoint>, Vec<DualLine>), DualityError> {
    let two = Scalar::from_int(2);
    let mut points = Vec::with_capacity(params.len());
    let mut lines = Vec::with_capacity(params.len());
    for (i, p) in params.iter().enumerate() {
        if !p.scale.is_one() {
            return Err(DualityError::UnnormalizedFrame(i, p.scale.clone()));
        }
        let xx = p.x.square();
        points.push(LiftedPoint {
            u: p.x.clone(),
            v: &two * &p.y - &xx,
        });
        lines.push(DualLine {
            slope: -(&two * &p.x),
            intercept: &two * &p.y + xx,
        });
    }
    Ok((points, lines))
}

/// Number of pairs `(point i, line j)`, `i ≠ j`, with the point on the line.
/// Points and lines are matched by position: entry `i` of both lists comes
/// from the same source line.
pub fn incidence_count(points: &[LiftedPoint], lines: &[DualLine]) -> usize {
    incidence_count_with(points, lines, ExecMode::default())
}

pub fn incidence_count_with(points: &[LiftedPoint], lines: &[DualLine], mode: ExecMode) -> usize {
    let mut by_u: HashMap<&Scalar, HashMap<&Scalar, Vec<usize>>> = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        by_u.entry(&p.u).or_default().entry(&p.v).or_default().push(i);
    }
    let columns: Vec<(&Scalar, &HashMap<&Scalar, Vec<usize>>)> = by_u.iter().map(|(u, m)| (*u, m)).collect();
    par::sum_indexed(lines.len(), mode, |j| {
        let l = &lines[j];
        columns
            .iter()
            .map(|(u, col)| {
                let v = &l.slope * *u + &l.intercept;
                col.get(&v).map_or(0, |ids| ids.iter().filter(|&&i| i != j).count())
            })
            .sum()
    })
}

/// Unit-scale frame parameters of every line against line `ell`; entries for
/// `ell` itself and for lines parallel to it are dropped. Returns the source
/// indices alongside.
pub fn unit_frame(arr: &Arrangement, ell: usize) -> Result<(Vec<usize>, Vec<FrameParam>), DualityError> {
    if ell >= arr.len() {
        return Err(DualityError::BadIndex(ell));
    }
    let frame = Frame::new(arr.line(ell));
    let mut idx = Vec::new();
    let mut params = Vec::new();
    for (i, l) in arr.lines().iter().enumerate() {
        if i == ell {
            continue;
        }
        if let Some(p) = frame.param(l) {
            idx.push(i);
            params.push(p.normalized());
        }
    }
    Ok((idx, params))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualityCheck {
    pub ell: usize,
    pub unit_triangles_on_ell: usize,
    pub incidences: usize,
    pub holds: bool,
}

/// Compares the census count of unit triangles on `ell` with the incidence
/// count of the lifted configuration.
pub fn check_duality(arr: &Arrangement, ell: usize) -> Result<DualityCheck, DualityError> {
    let (_, params) = unit_frame(arr, ell)?;
    let (pts, lines) = lift(&params)?;
    let incidences = incidence_count(&pts, &lines);
    let unit = count_area_on_line(arr, ell, &Scalar::one())?;
    Ok(DualityCheck {
        ell,
        unit_triangles_on_ell: unit,
        incidences,
        holds: unit == incidences,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(x: Scalar, y: Scalar) -> FrameParam {
        FrameParam {
            x,
            y,
            scale: Scalar::one(),
        }
    }

    #[test]
    fn lift_examples() {
        let (p, l) = lift(&[
            fp(Scalar::one(), Scalar::one()),
            fp(Scalar::zero(), Scalar::ratio(1, 2)),
            fp(Scalar::from_int(2), Scalar::zero()),
        ])
        .unwrap();
        assert_eq!(p[0], LiftedPoint { u: Scalar::one(), v: Scalar::one() });
        assert_eq!(l[1], DualLine { slope: Scalar::zero(), intercept: Scalar::one() });
        assert_eq!(l[2], DualLine { slope: Scalar::from_int(-4), intercept: Scalar::from_int(4) });
        assert!(!l[2].contains(&p[0]));
        assert_eq!(incidence_count(&p[..1], &l[2..]), 0);
    }

    #[test]
    fn rejects_unnormalized() {
        let mut q = fp(Scalar::one(), Scalar::one());
        q.scale = Scalar::from_int(2);
        assert!(matches!(lift(&[q]), Err(DualityError::UnnormalizedFrame(0, _))));
    }

    #[test]
    fn same_source_excluded() {
        // Every point lies on its own dual line.
        let (p, l) = lift(&[fp(Scalar::ratio(3, 2), Scalar::from_int(-4))]).unwrap();
        assert!(l[0].contains(&p[0]));
        assert_eq!(incidence_count(&p, &l), 0);
    }

    #[test]
    fn matches_census_on_small_arrangement() {
        let arr: Arrangement = "0 1 0\n1 0 0\n1 2 -2\n2 1 -2\n1 0 -1\n1 -1 3\n".parse().unwrap();
        for ell in 0..arr.len() {
            assert!(check_duality(&arr, ell).unwrap().holds);
        }
        assert!(check_duality(&arr, 0).unwrap().incidences > 0);
    }
}
