//! Closed-form bounds and structural checks on maximum- and minimum-area
//! triangles.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::arrangement::Arrangement;
use crate::census::{census, count_facial, AreaCensus, CensusError};
use crate::constructions::{hexgrid_formula, trigrid_formula};
use crate::geometry::{Frame, FrameParam};
use crate::par::{self, ExecMode};
use crate::scalar::{Rational, Scalar, Sign};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundsError {
    #[error("bounds need n >= 3, got {0}")]
    TooFewLines(usize),
    #[error("every triple is degenerate")]
    NoProperTriangle,
    #[error("line index {0} out of range")]
    BadIndex(usize),
    #[error(transparent)]
    Census(#[from] CensusError),
}

/// `⌊n(n−2)/3⌋`, less one when `n ≡ 0, 2 (mod 6)`.
pub fn kobon_bound(n: usize) -> Result<usize, BoundsError> {
    if n < 3 {
        return Err(BoundsError::TooFewLines(n));
    }
    let base = n * (n - 2) / 3;
    Ok(if n % 6 == 0 || n % 6 == 2 { base - 1 } else { base })
}

fn ratio_string(num: usize, den: usize) -> String {
    Rational::new(num.into(), den.into()).to_string()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormulaBounds {
    pub n: usize,
    /// Facial-triangle count of the kagome construction.
    pub m_lower_hex: usize,
    /// Facial-triangle count of the triangular-grid construction.
    pub m_lower_tri: i64,
    /// `⌊(n²−n)/6⌋`.
    pub m_lower: usize,
    /// `⌊(n²−2n)/3⌋`.
    pub m_upper: usize,
    /// `5 + 7k` from the pentagon chain when `n = 5(k+1)`.
    pub max_lower_chain: Option<usize>,
    /// Strict upper bound `2n(n−2)/3` on the maximum-area count.
    pub max_upper: String,
    /// The strengthened `n(n−1)/3`.
    pub max_upper_remark: String,
    /// `2(n−2)` maximum-area triangles on any one line.
    pub per_line_max: usize,
}

pub fn formula_bounds(n: usize) -> Result<FormulaBounds, BoundsError> {
    if n < 3 {
        return Err(BoundsError::TooFewLines(n));
    }
    Ok(FormulaBounds {
        n,
        m_lower_hex: hexgrid_formula(n),
        m_lower_tri: trigrid_formula(n),
        m_lower: (n * n - n) / 6,
        m_upper: (n * n - 2 * n) / 3,
        max_lower_chain: (n % 5 == 0).then(|| 5 + 7 * (n / 5 - 1)),
        max_upper: ratio_string(2 * n * (n - 2), 3),
        max_upper_remark: ratio_string(n * (n - 1), 3),
        per_line_max: 2 * (n - 2),
    })
}

/// Graphs on the lines crossing `ℓ`; an edge joins two lines forming a
/// maximum-area triangle with `ℓ`, in `E⁺` when `x_i−x_j` and `y_i−y_j`
/// have the same sign and in `E⁻` otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GellGraph {
    pub ell: usize,
    pub plus: Vec<[usize; 2]>,
    pub minus: Vec<[usize; 2]>,
}

impl GellGraph {
    pub fn edge_count(&self) -> usize {
        self.plus.len() + self.minus.len()
    }

    /// A cycle in `E⁺` or `E⁻`, as a closed vertex walk.
    pub fn find_cycle(&self) -> Option<Vec<usize>> {
        find_cycle(&self.plus).or_else(|| find_cycle(&self.minus))
    }
}

/// First cycle closed while adding `edges` in order, as `[v, …, v]`.
pub fn find_cycle(edges: &[[usize; 2]]) -> Option<Vec<usize>> {
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut parent: BTreeMap<usize, usize> = BTreeMap::new();
    fn root(parent: &mut BTreeMap<usize, usize>, v: usize) -> usize {
        let p = *parent.entry(v).or_insert(v);
        if p == v {
            return v;
        }
        let r = root(parent, p);
        parent.insert(v, r);
        r
    }
    for &[u, v] in edges {
        let (ru, rv) = (root(&mut parent, u), root(&mut parent, v));
        if ru == rv {
            let mut path = forest_path(&adj, u, v);
            path.push(u);
            return Some(path);
        }
        parent.insert(ru, rv);
        adj.entry(u).or_default().push(v);
        adj.entry(v).or_default().push(u);
    }
    None
}

fn forest_path(adj: &BTreeMap<usize, Vec<usize>>, from: usize, to: usize) -> Vec<usize> {
    let mut prev: BTreeMap<usize, usize> = BTreeMap::new();
    let mut queue = std::collections::VecDeque::from([from]);
    prev.insert(from, from);
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for &w in adj.get(&v).into_iter().flatten() {
            if let std::collections::btree_map::Entry::Vacant(e) = prev.entry(w) {
                e.insert(v);
                queue.push_back(w);
            }
        }
    }
    let mut path = vec![to];
    let mut v = to;
    while v != from {
        v = prev[&v];
        path.push(v);
    }
    path.reverse();
    path
}

/// Builds `G_ℓ^±` for line `ell` with `a_max` the maximum proper area.
pub fn build_gell_graphs(arr: &Arrangement, ell: usize, a_max: &Scalar) -> Result<GellGraph, BoundsError> {
    if ell >= arr.len() {
        return Err(BoundsError::BadIndex(ell));
    }
    let frame = Frame::new(arr.line(ell));
    let params: Vec<(usize, FrameParam)> = arr
        .lines()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != ell)
        .filter_map(|(i, l)| frame.param(l).map(|p| (i, p)))
        .collect();
    let two_a = Scalar::from_int(2) * a_max;
    let mut g = GellGraph {
        ell,
        plus: Vec::new(),
        minus: Vec::new(),
    };
    for (a, (i, pi)) in params.iter().enumerate() {
        for (j, pj) in &params[a + 1..] {
            let dx = &pi.x - &pj.x;
            let dy = &pi.y - &pj.y;
            if dx.is_zero() || dy.is_zero() {
                continue;
            }
            if &pi.scale * dx.square() == &two_a * dy.abs() {
                if dx.sign() == dy.sign() {
                    g.plus.push([*i, *j]);
                } else {
                    g.minus.push([*i, *j]);
                }
            }
        }
    }
    Ok(g)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
    /// Minimal witness of a failure, in exact terms.
    pub witness: Option<String>,
}

impl Check {
    fn new(name: &'static str, ok: bool, detail: String, witness: Option<String>) -> Check {
        Check {
            name,
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            detail,
            witness: if ok { None } else { witness },
        }
    }

    fn na(name: &'static str, detail: &str) -> Check {
        Check {
            name,
            status: CheckStatus::NotApplicable,
            detail: detail.to_string(),
            witness: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub n: usize,
    pub checks: Vec<Check>,
    /// Lines `ℓ` with `|E⁺| + |E⁻| > n − 1`; informational only.
    pub remark_exceeding: Vec<usize>,
    pub passes: bool,
}

impl VerifyReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn triple_string(t: &[usize; 3]) -> String {
    format!("({}, {}, {})", t[0], t[1], t[2])
}

pub fn verify_arrangement(arr: &Arrangement) -> Result<VerifyReport, BoundsError> {
    let cen = census(arr)?;
    verify_with_census(arr, &cen, ExecMode::default())
}

pub fn verify_with_census(arr: &Arrangement, cen: &AreaCensus, mode: ExecMode) -> Result<VerifyReport, BoundsError> {
    let n = arr.len();
    let kobon = kobon_bound(n)?;
    let kernel = arr.kernel();
    let mut checks = Vec::new();

    let facial = count_facial(arr, mode);
    checks.push(Check::new(
        "facial_within_kobon",
        facial <= kobon,
        format!("{facial} facial triangles, bound {kobon}"),
        None,
    ));

    let Some((a_min, mins)) = cen.min_group() else {
        for name in [
            "min_area_facial",
            "per_line_max",
            "global_max",
            "gell_forests",
            "gell_matches_census",
            "interior_or_parallel",
            "same_side",
        ] {
            checks.push(Check::na(name, "no proper triangle"));
        }
        let passes = checks.iter().all(|c| c.status != CheckStatus::Fail);
        return Ok(VerifyReport {
            n,
            checks,
            remark_exceeding: Vec::new(),
            passes,
        });
    };
    let not_facial = mins.iter().find(|t| !kernel.is_facial(t[0], t[1], t[2]));
    checks.push(Check::new(
        "min_area_facial",
        not_facial.is_none(),
        format!("{} triangles of minimum area {a_min}", mins.len()),
        not_facial.map(triple_string),
    ));

    let (a_max, maxes) = cen.max_group().expect("nonempty");
    let per_line = cen.per_line_counts(a_max);
    let bound = 2 * (n - 2);
    let worst = (0..n).max_by_key(|&i| (per_line[i], std::cmp::Reverse(i))).unwrap();
    checks.push(Check::new(
        "per_line_max",
        per_line[worst] <= bound,
        format!("at most {} maximum-area triangles on one line, bound {bound}", per_line[worst]),
        Some(format!("line {worst}")),
    ));
    let global_ok = 3 * maxes.len() < 2 * n * (n - 2);
    checks.push(Check::new(
        "global_max",
        global_ok,
        format!("{} triangles of maximum area {a_max}, bound {}", maxes.len(), ratio_string(2 * n * (n - 2), 3)),
        None,
    ));

    let graphs: Vec<GellGraph> = par::flat_map_indexed(n, mode, |ell| {
        vec![build_gell_graphs(arr, ell, a_max).expect("index in range")]
    });
    let cycle = graphs.iter().find_map(|g| g.find_cycle().map(|c| (g.ell, c)));
    checks.push(Check::new(
        "gell_forests",
        cycle.is_none(),
        "G_l+ and G_l- are forests for every line".to_string(),
        cycle.map(|(ell, c)| format!("line {ell}: cycle {c:?}")),
    ));
    let mismatch = graphs.iter().find(|g| g.edge_count() != per_line[g.ell]);
    checks.push(Check::new(
        "gell_matches_census",
        mismatch.is_none(),
        "edge counts equal per-line maximum-area counts".to_string(),
        mismatch.map(|g| format!("line {}: {} edges, census {}", g.ell, g.edge_count(), per_line[g.ell])),
    ));

    let mut bad_interior = None;
    'outer: for t in maxes {
        let [i, j, k] = *t;
        for m in (0..n).filter(|&m| m != i && m != j && m != k) {
            let parallel = kernel.parallel(m, i) || kernel.parallel(m, j) || kernel.parallel(m, k);
            if !parallel && !kernel.crosses_interior(m, i, j, k) {
                bad_interior = Some(format!("line {m} misses triangle {}", triple_string(t)));
                break 'outer;
            }
        }
    }
    checks.push(Check::new(
        "interior_or_parallel",
        bad_interior.is_none(),
        "every other line meets each maximum-area triangle or is parallel to a side".to_string(),
        bad_interior,
    ));

    if arr.has_parallel_pair() {
        checks.push(Check::na("same_side", "arrangement has a parallel pair"));
    } else {
        let mut bad = None;
        for ell in 0..n {
            let mut side: Option<Sign> = None;
            for t in maxes.iter().filter(|t| t.contains(&ell)) {
                let others: Vec<usize> = t.iter().copied().filter(|&v| v != ell).collect();
                let s = kernel.side(ell, others[0], others[1]);
                match side {
                    None => side = Some(s),
                    Some(prev) if prev != s => {
                        bad = Some(format!("line {ell}, triangle {}", triple_string(t)));
                    }
                    _ => {}
                }
            }
            if bad.is_some() {
                break;
            }
        }
        checks.push(Check::new(
            "same_side",
            bad.is_none(),
            "maximum-area triangles on each line lie on one side of it".to_string(),
            bad,
        ));
    }

    let remark_exceeding = graphs.iter().filter(|g| g.edge_count() > n - 1).map(|g| g.ell).collect();
    let passes = checks.iter().all(|c| c.status != CheckStatus::Fail);
    Ok(VerifyReport {
        n,
        checks,
        remark_exceeding,
        passes,
    })
}
