//! Exhaustive triangle-area census over all line triples.

use std::collections::BTreeMap;

use num_integer::binomial;
use serde::Serialize;
use thiserror::Error;

use crate::arrangement::Arrangement;
use crate::geometry::{choose_reference_frame, Frame, FrameParam, TripleStatus};
use crate::par::{self, ExecMode};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CensusError {
    #[error("at least 3 lines are required, found {0}")]
    TooFewLines(usize),
    #[error("frame precondition violated at lines {0} and {1}")]
    FramePrecondition(usize, usize),
    #[error("line index {0} out of range")]
    BadIndex(usize),
}

/// One line triple with `i < j < k`. Degenerate triples carry area zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleRecord {
    pub indices: [usize; 3],
    pub status: TripleStatus,
    pub area: Scalar,
}

/// Every triple of an arrangement, grouped by exact area.
#[derive(Clone, Debug)]
pub struct AreaCensus {
    n: usize,
    records: Vec<TriangleRecord>,
    groups: BTreeMap<Scalar, Vec<[usize; 3]>>,
    concurrent: usize,
    with_parallel_pair: usize,
}

/// Position of `(i, j, k)` in the lexicographic order of the triples of `0..n`.
pub fn triple_rank(n: usize, [i, j, k]: [usize; 3]) -> usize {
    let m = n - 1 - i;
    let a = j - i - 1;
    let b = k - i - 1;
    binomial(n, 3) - binomial(n - i, 3) + binomial(m, 2) - binomial(m - a, 2) + (b - a - 1)
}

pub fn census(arr: &Arrangement) -> Result<AreaCensus, CensusError> {
    census_with(arr, ExecMode::default())
}

pub fn census_with(arr: &Arrangement, mode: ExecMode) -> Result<AreaCensus, CensusError> {
    let n = arr.len();
    if n < 3 {
        return Err(CensusError::TooFewLines(n));
    }
    let kernel = arr.kernel();
    let records = par::flat_map_indexed(n, mode, |i| {
        let mut out = Vec::new();
        for j in i + 1..n {
            for k in j + 1..n {
                let status = kernel.status(i, j, k);
                let area = match status {
                    TripleStatus::Proper => kernel.area(i, j, k),
                    _ => Scalar::zero(),
                };
                out.push(TriangleRecord {
                    indices: [i, j, k],
                    status,
                    area,
                });
            }
        }
        out
    });
    let mut groups: BTreeMap<Scalar, Vec<[usize; 3]>> = BTreeMap::new();
    let mut concurrent = 0;
    let mut with_parallel_pair = 0;
    for r in &records {
        match r.status {
            TripleStatus::Proper => groups.entry(r.area.clone()).or_default().push(r.indices),
            TripleStatus::Concurrent => concurrent += 1,
            TripleStatus::HasParallelPair => with_parallel_pair += 1,
        }
    }
    Ok(AreaCensus {
        n,
        records,
        groups,
        concurrent,
        with_parallel_pair,
    })
}

/// Summary suitable for reports; areas are exact strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusSummary {
    pub n: usize,
    pub triples: usize,
    pub proper: usize,
    pub concurrent: usize,
    pub with_parallel_pair: usize,
    pub distinct_areas: usize,
    pub min_area: Option<String>,
    pub min_count: usize,
    pub max_area: Option<String>,
    pub max_count: usize,
    /// Group size → number of areas with that many triangles.
    pub histogram: BTreeMap<usize, usize>,
}

impl AreaCensus {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn records(&self) -> &[TriangleRecord] {
        &self.records
    }

    pub fn record(&self, triple: [usize; 3]) -> &TriangleRecord {
        &self.records[triple_rank(self.n, triple)]
    }

    pub fn groups(&self) -> &BTreeMap<Scalar, Vec<[usize; 3]>> {
        &self.groups
    }

    pub fn concurrent(&self) -> usize {
        self.concurrent
    }

    pub fn with_parallel_pair(&self) -> usize {
        self.with_parallel_pair
    }

    pub fn proper(&self) -> usize {
        self.records.len() - self.concurrent - self.with_parallel_pair
    }

    pub fn distinct_areas(&self) -> usize {
        self.groups.len()
    }

    pub fn min_group(&self) -> Option<(&Scalar, &Vec<[usize; 3]>)> {
        self.groups.iter().next()
    }

    pub fn max_group(&self) -> Option<(&Scalar, &Vec<[usize; 3]>)> {
        self.groups.iter().next_back()
    }

    pub fn triangles_with_area(&self, lambda: &Scalar) -> &[[usize; 3]] {
        self.groups.get(lambda).map_or(&[], |v| v.as_slice())
    }

    pub fn count_area(&self, lambda: &Scalar) -> usize {
        self.triangles_with_area(lambda).len()
    }

    /// For each line, the number of `λ`-area triangles it supports.
    pub fn per_line_counts(&self, lambda: &Scalar) -> Vec<usize> {
        let mut counts = vec![0; self.n];
        for t in self.triangles_with_area(lambda) {
            for &i in t {
                counts[i] += 1;
            }
        }
        counts
    }

    pub fn histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for v in self.groups.values() {
            *h.entry(v.len()).or_insert(0) += 1;
        }
        h
    }

    pub fn summary(&self) -> CensusSummary {
        let min = self.min_group();
        let max = self.max_group();
        CensusSummary {
            n: self.n,
            triples: self.records.len(),
            proper: self.proper(),
            concurrent: self.concurrent,
            with_parallel_pair: self.with_parallel_pair,
            distinct_areas: self.distinct_areas(),
            min_area: min.map(|(a, _)| a.to_string()),
            min_count: min.map_or(0, |(_, v)| v.len()),
            max_area: max.map(|(a, _)| a.to_string()),
            max_count: max.map_or(0, |(_, v)| v.len()),
            histogram: self.histogram(),
        }
    }
}

/// Triples whose open interior meets no other line.
pub fn facial_triangles(arr: &Arrangement) -> Vec<[usize; 3]> {
    facial_triangles_with(arr, ExecMode::default())
}

pub fn facial_triangles_with(arr: &Arrangement, mode: ExecMode) -> Vec<[usize; 3]> {
    let n = arr.len();
    let kernel = arr.kernel();
    par::flat_map_indexed(n, mode, |i| {
        let mut out = Vec::new();
        for j in i + 1..n {
            for k in j + 1..n {
                if kernel.is_facial(i, j, k) {
                    out.push([i, j, k]);
                }
            }
        }
        out
    })
}

pub fn count_facial(arr: &Arrangement, mode: ExecMode) -> usize {
    let n = arr.len();
    let kernel = arr.kernel();
    par::sum_indexed(n, mode, |i| {
        let mut c = 0;
        for j in i + 1..n {
            for k in j + 1..n {
                c += kernel.is_facial(i, j, k) as usize;
            }
        }
        c
    })
}

/// Number of `λ`-area triangles supported by line `ell`, without a full census.
pub fn count_area_on_line(arr: &Arrangement, ell: usize, lambda: &Scalar) -> Result<usize, CensusError> {
    let n = arr.len();
    if ell >= n {
        return Err(CensusError::BadIndex(ell));
    }
    let kernel = arr.kernel();
    let others: Vec<usize> = (0..n).filter(|&i| i != ell).collect();
    let mut count = 0;
    for (a, &i) in others.iter().enumerate() {
        for &j in &others[a + 1..] {
            let mut t = [ell, i, j];
            t.sort_unstable();
            if kernel.status(t[0], t[1], t[2]) == TripleStatus::Proper && kernel.area(t[0], t[1], t[2]) == *lambda {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Counts x-ordered triples `i < j < k` of frame parameters satisfying
/// `(x_j−x_i)²/(y_i−y_j) + (x_k−x_j)²/(y_j−y_k) + (x_i−x_k)²/(y_k−y_i) = 2`,
/// i.e. unit-area triangles, after moving the arrangement into a reference
/// frame where `ℓ` is horizontal and below every intersection.
pub fn count_eq1_solutions(arr: &Arrangement) -> Result<usize, CensusError> {
    let n = arr.len();
    if n < 3 {
        return Err(CensusError::TooFewLines(n));
    }
    let rf = choose_reference_frame(arr.lines());
    let frame = Frame::new(&rf.ell);
    let mut params: Vec<(usize, FrameParam)> = rf
        .apply(arr.lines())
        .iter()
        .enumerate()
        .map(|(i, l)| (i, frame.param(l).expect("no line is horizontal after the shear")))
        .collect();
    params.sort_by(|a, b| a.1.x.cmp(&b.1.x));
    for w in params.windows(2) {
        if w[0].1.x == w[1].1.x || w[0].1.y < w[1].1.y {
            return Err(CensusError::FramePrecondition(w[0].0, w[1].0));
        }
    }
    let p: Vec<&FrameParam> = params.iter().map(|(_, p)| p).collect();
    let two = Scalar::from_int(2);
    let term = |a: &FrameParam, b: &FrameParam| (&b.x - &a.x).square() / (&a.y - &b.y);
    let mut count = 0;
    for i in 0..n {
        for j in i + 1..n {
            if p[i].y == p[j].y {
                continue;
            }
            let tij = term(p[i], p[j]);
            for k in j + 1..n {
                if p[j].y == p[k].y {
                    continue;
                }
                let sum = &tij + &term(p[j], p[k]) + term(p[k], p[i]);
                if &p[0].scale * sum == two {
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}
