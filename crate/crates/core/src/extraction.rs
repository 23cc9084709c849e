//! Subsets of lines whose triangles all have pairwise distinct areas.
//!
//! The triples of an arrangement form a complete 3-uniform hypergraph
//! coloured by area; a rainbow subset is one whose induced triples all get
//! distinct colours. Degenerate triples get a colour that always conflicts.

use std::collections::HashSet;

use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::arrangement::Arrangement;
use crate::census::{triple_rank, AreaCensus};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtractionError {
    #[error("the triple system has no vertices")]
    Empty,
    #[error("brute force is limited to {max} vertices, got {n}")]
    TooLarge { n: usize, max: usize },
}

/// One line per direction, keeping the first of each parallel class.
/// Returns the sub-arrangement and the kept indices.
pub fn dedupe_slopes(arr: &Arrangement) -> (Arrangement, Vec<usize>) {
    let mut drop = vec![false; arr.len()];
    for class in &arr.classification().parallel_classes {
        for &i in &class[1..] {
            drop[i] = true;
        }
    }
    let kept: Vec<usize> = (0..arr.len()).filter(|&i| !drop[i]).collect();
    (arr.subset(&kept), kept)
}

/// Area colouring of all triples of `0..n`. Colours are dense ids into a
/// palette of areas; `None` marks a degenerate triple.
#[derive(Clone, Debug)]
pub struct ColoredTripleSystem {
    n: usize,
    colors: Vec<Option<u32>>,
    palette: Vec<Scalar>,
}

impl ColoredTripleSystem {
    pub fn from_census(cen: &AreaCensus) -> Self {
        let n = cen.n();
        let mut colors = vec![None; cen.records().len()];
        let mut palette = Vec::with_capacity(cen.groups().len());
        for (id, (area, triples)) in cen.groups().iter().enumerate() {
            palette.push(area.clone());
            for &t in triples {
                colors[triple_rank(n, t)] = Some(id as u32);
            }
        }
        ColoredTripleSystem { n, colors, palette }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn color_id(&self, mut t: [usize; 3]) -> Option<u32> {
        t.sort_unstable();
        self.colors[triple_rank(self.n, t)]
    }

    pub fn color(&self, t: [usize; 3]) -> Option<&Scalar> {
        self.color_id(t).map(|c| &self.palette[c as usize])
    }
}

/// Whether every triple inside `subset` has its own colour.
pub fn is_rainbow(sys: &ColoredTripleSystem, subset: &[usize]) -> bool {
    let mut seen = HashSet::new();
    for (a, &i) in subset.iter().enumerate() {
        for (b, &j) in subset.iter().enumerate().skip(a + 1) {
            for &k in &subset[b + 1..] {
                match sys.color_id([i, j, k]) {
                    Some(c) if seen.insert(c) => {}
                    _ => return false,
                }
            }
        }
    }
    true
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    #[default]
    Greedy,
    SampleDelete,
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "greedy" => Ok(Strategy::Greedy),
            "sample-delete" | "sample_delete" => Ok(Strategy::SampleDelete),
            other => Err(format!("unknown strategy {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Extraction {
    pub strategy: Strategy,
    /// Sorted vertex subset.
    pub vertices: Vec<usize>,
    /// Seed of each trial, in order.
    pub seeds: Vec<u64>,
    /// Seed of the trial that produced `vertices`.
    pub best_seed: u64,
}

/// Random vertex order; a vertex joins when it creates no colour collision.
fn greedy(sys: &ColoredTripleSystem, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut order: Vec<usize> = (0..sys.n).collect();
    order.shuffle(rng);
    let mut chosen: Vec<usize> = Vec::new();
    let mut used: HashSet<u32> = HashSet::new();
    'next: for v in order {
        let mut fresh: HashSet<u32> = HashSet::new();
        for (a, &i) in chosen.iter().enumerate() {
            for &j in &chosen[a + 1..] {
                match sys.color_id([v, i, j]) {
                    Some(c) if !used.contains(&c) && fresh.insert(c) => {}
                    _ => continue 'next,
                }
            }
        }
        used.extend(fresh);
        chosen.push(v);
    }
    chosen.sort_unstable();
    chosen
}

/// Keeps each vertex with probability `n^{−4/5}`, then removes a vertex from
/// each conflict (a degenerate triple, or a triple repeating an earlier
/// colour) until none is left.
fn sample_delete(sys: &ColoredTripleSystem, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let p = (sys.n as f64).powf(-0.8);
    let mut s: Vec<usize> = (0..sys.n).filter(|_| rng.gen_bool(p.min(1.0))).collect();
    'restart: loop {
        let mut seen = HashSet::new();
        for a in 0..s.len() {
            for b in a + 1..s.len() {
                for c in b + 1..s.len() {
                    match sys.color_id([s[a], s[b], s[c]]) {
                        Some(col) if seen.insert(col) => {}
                        _ => {
                            s.remove(c);
                            continue 'restart;
                        }
                    }
                }
            }
        }
        return s;
    }
}

/// Runs `trials` seeded attempts (seeds `seed, seed+1, …`) and keeps the
/// largest result, breaking ties lexicographically. The result is checked
/// exhaustively before it is returned.
pub fn extract_rainbow(
    sys: &ColoredTripleSystem,
    strategy: Strategy,
    seed: u64,
    trials: usize,
) -> Result<Extraction, ExtractionError> {
    if sys.is_empty() {
        return Err(ExtractionError::Empty);
    }
    let seeds: Vec<u64> = (0..trials.max(1) as u64).map(|t| seed.wrapping_add(t)).collect();
    let mut best: Option<(Vec<usize>, u64)> = None;
    for &s in &seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let cand = match strategy {
            Strategy::Greedy => greedy(sys, &mut rng),
            Strategy::SampleDelete => sample_delete(sys, &mut rng),
        };
        let better = match &best {
            None => true,
            Some((b, _)) => cand.len() > b.len() || (cand.len() == b.len() && cand < *b),
        };
        if better {
            best = Some((cand, s));
        }
    }
    let (vertices, best_seed) = best.expect("at least one trial");
    assert!(is_rainbow(sys, &vertices), "extraction returned a non-rainbow subset");
    Ok(Extraction {
        strategy,
        vertices,
        seeds,
        best_seed,
    })
}

pub const BRUTE_FORCE_MAX: usize = 16;

/// A largest rainbow subset by exhaustive search.
pub fn brute_force_optimum(sys: &ColoredTripleSystem) -> Result<Vec<usize>, ExtractionError> {
    let n = sys.n;
    if n > BRUTE_FORCE_MAX {
        return Err(ExtractionError::TooLarge { n, max: BRUTE_FORCE_MAX });
    }
    let mut best: Vec<usize> = Vec::new();
    for mask in 0u32..(1 << n) {
        let size = mask.count_ones() as usize;
        if size <= best.len() {
            continue;
        }
        let s: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        if is_rainbow(sys, &s) {
            best = s;
        }
    }
    Ok(best)
}

/// Largest number of same-coloured triples through one vertex pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConflictScan {
    pub max_same_color: usize,
    pub witness: Option<([usize; 2], String)>,
}

/// Pairs lying in at least this many same-coloured triples contradict the
/// general-position hypothesis.
pub const CONFLICT_CAP: usize = 21;

pub fn conflict_scan(sys: &ColoredTripleSystem) -> ConflictScan {
    let n = sys.n;
    let mut scan = ConflictScan {
        max_same_color: 0,
        witness: None,
    };
    for i in 0..n {
        for j in i + 1..n {
            let mut counts: std::collections::HashMap<u32, usize> = std::collections::HashMap::new();
            for k in (0..n).filter(|&k| k != i && k != j) {
                if let Some(c) = sys.color_id([i, j, k]) {
                    *counts.entry(c).or_insert(0) += 1;
                }
            }
            let mut counts: Vec<(u32, usize)> = counts.into_iter().collect();
            counts.sort_unstable();
            for (c, v) in counts {
                if v > scan.max_same_color {
                    scan.max_same_color = v;
                    scan.witness = Some(([i, j], sys.palette[c as usize].to_string()));
                }
            }
        }
    }
    scan
}

/// `n^{1/5}`, the growth rate the extracted size is compared against.
pub fn fifth_root(n: usize) -> f64 {
    n.to_f64().unwrap_or(0.0).powf(0.2)
}
