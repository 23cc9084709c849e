//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Expected values come from independent sources: the published table, the
//! closed forms re-typed here, and direct counts that avoid the code under
//! test where practical.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use triarea::bounds::{kobon_bound, verify_arrangement, CheckStatus};
use triarea::census::{census, count_area_on_line, count_facial};
use triarea::chain::max_chain;
use triarea::conic::{
    common_tangent_conics, pair_area_profile, six_tangent_test, validate_general_position, GeneralPositionOptions,
};
use triarea::constructions::{
    hexgrid, line_from_param, pentagon, random_arrangement, scale_to_unit_min, st_extremal, trigrid, StExtremal,
};
use triarea::duality::check_duality;
use triarea::extraction::{brute_force_optimum, extract_rainbow, is_rainbow, ColoredTripleSystem, Strategy};
use triarea::{Arrangement, ExecMode, Line, PrecisionPolicy, Scalar};

/// Facial counts printed in the published table, n = 3..12.
const TABLE_HEX: [usize; 10] = [1, 2, 3, 6, 7, 10, 13, 16, 19, 24];
const TABLE_TRI: [usize; 10] = [0, 1, 2, 4, 6, 8, 12, 14, 18, 22];

fn hex_closed_form(n: i64) -> i64 {
    let (l, j) = (n / 6, n % 6);
    if j == 0 {
        6 * l * l
    } else {
        6 * l * l + 2 * j * l + j - 2
    }
}

/// `n = 6l + j` with `j ∈ {0, ±1, ±2}`, or `j = 3`.
fn tri_closed_form(n: i64) -> i64 {
    for l in 0..=n / 6 + 1 {
        let j = n - 6 * l;
        if j == 3 {
            return 6 * l * l + 6 * l;
        }
        if (-2..=2).contains(&j) {
            return 6 * l * l + 2 * j * l - 2;
        }
    }
    unreachable!("every n has such a split")
}

enum Verdict {
    Pass(String),
    Fail(String),
    /// A failure analysed as unattainable; reported but not fatal.
    KnownFail(String),
    NotReproducible(String),
}

fn pass_if(ok: bool, detail: String) -> Verdict {
    if ok {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

fn within(ok: bool, elapsed: Duration, limit: Duration, detail: String) -> Verdict {
    let detail = format!("{detail}; {:.1}s (limit {}s)", elapsed.as_secs_f64(), limit.as_secs());
    pass_if(ok && elapsed <= limit, detail)
}

fn c1_table() -> Verdict {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_triarea"))
        .args(["reproduce", "table1", "--json"])
        .output()
        .expect("binary runs");
    let elapsed = start.elapsed();
    let v: serde_json::Value = match serde_json::from_slice(&out.stdout) {
        Ok(v) => v,
        Err(e) => return Verdict::Fail(format!("bad report: {e}")),
    };
    let rows = v["results"]["rows"].as_array().cloned().unwrap_or_default();
    let mut bad = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let n = 3 + i as i64;
        let get = |k: &str| row[k].as_i64().unwrap_or(i64::MIN);
        if get("n") != n
            || get("hexagonal") != TABLE_HEX[i] as i64
            || get("triangular_formula") != tri_closed_form(n)
            || get("triangular") != TABLE_TRI[i] as i64
            || row["flagged"].as_bool() != Some(n == 4)
        {
            bad.push(n);
        }
    }
    within(
        out.status.success() && rows.len() == 10 && bad.is_empty(),
        elapsed,
        Duration::from_secs(10),
        format!("hexagonal row matches the table, triangular row matches the formulas, n=4 flagged; mismatches {bad:?}"),
    )
}

fn c2_formulas() -> Verdict {
    let start = Instant::now();
    let mut hex_bad = Vec::new();
    let mut tri_bad = Vec::new();
    for n in 3..=60usize {
        let h = count_facial(&hexgrid(n).unwrap(), ExecMode::default()) as i64;
        if h != hex_closed_form(n as i64) {
            hex_bad.push(n);
        }
        let t = count_facial(&trigrid(n).unwrap(), ExecMode::default()) as i64;
        if t != tri_closed_form(n as i64) {
            tri_bad.push((n, t));
        }
    }
    let elapsed = start.elapsed();
    let detail = format!(
        "n=3..60, hexgrid mismatches {hex_bad:?}, trigrid mismatches {tri_bad:?}; {:.1}s",
        elapsed.as_secs_f64()
    );
    if hex_bad.is_empty() && tri_bad.is_empty() && elapsed <= Duration::from_secs(300) {
        Verdict::Pass(detail)
    } else if hex_bad.is_empty() && tri_bad == [(4, 1)] && elapsed <= Duration::from_secs(300) {
        Verdict::KnownFail(format!(
            "{detail}; the 4-line grid has 1 facial triangle (as in the table) where the closed form gives 0"
        ))
    } else {
        Verdict::Fail(detail)
    }
}

fn c3_unit_lower_bound() -> Verdict {
    let mut parts = Vec::new();
    let mut ok = true;
    for n in [6usize, 12, 18, 24] {
        let arr = scale_to_unit_min(&hexgrid(n).unwrap()).unwrap();
        let got = census(&arr).unwrap().count_area(&Scalar::one());
        let want = hex_closed_form(n as i64) as usize;
        ok &= got >= want;
        parts.push(format!("n={n}: {got} >= {want}"));
    }
    pass_if(ok, parts.join(", "))
}

/// Lines crossing the x axis at small half-integers with small cotangents,
/// which produces plenty of unit triangles on the axis.
fn param_arrangement(n: usize, seed: u64) -> Arrangement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lines = vec![Line::from_ints(0, 1, 0).unwrap()];
    while lines.len() < n {
        let x = Scalar::ratio(rng.gen_range(-12..=12), 2);
        let y = Scalar::ratio(rng.gen_range(-12..=12), 2);
        let l = line_from_param(&x, &y);
        if !lines.contains(&l) {
            lines.push(l);
        }
    }
    Arrangement::new(lines).unwrap()
}

fn c4_duality() -> Verdict {
    let mut total_unit = 0;
    let mut bad = Vec::new();
    for seed in 0..100u64 {
        let n = 6 + (seed as usize % 25);
        let (arr, ell) = if seed % 2 == 0 {
            (param_arrangement(n, seed), 0)
        } else {
            let arr = scale_to_unit_min(&random_arrangement(n, 5, false, seed)).unwrap();
            let cen = census(&arr).unwrap();
            let ell = cen.min_group().unwrap().1[0][0];
            (arr, ell)
        };
        let chk = check_duality(&arr, ell).unwrap();
        total_unit += chk.unit_triangles_on_ell;
        if !chk.holds {
            bad.push(seed);
        }
    }
    pass_if(
        bad.is_empty(),
        format!("100 arrangements, {total_unit} unit triangles on the chosen lines; mismatching seeds {bad:?}"),
    )
}

fn c5_st_extremal() -> Verdict {
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut ok = true;
    for k in 1..=4usize {
        let s = st_extremal(k).unwrap();
        let got = count_area_on_line(&s.arrangement, StExtremal::ELL, &Scalar::one()).unwrap();
        let want = k.pow(4);
        ok &= got >= want;
        parts.push(format!("k={k}: {got} >= {want}"));
    }
    within(ok, start.elapsed(), Duration::from_secs(60), parts.join(", "))
}

fn c6_max_chain() -> Verdict {
    let policy = PrecisionPolicy::default();
    let mut parts = Vec::new();
    let mut ok = true;
    for k in 0..=2usize {
        match max_chain(k, &policy) {
            Ok(c) => {
                let cert = &c.certificate;
                let want = 5 + 7 * k;
                ok &= cert.equal >= want && cert.undecided == 0 && cert.greater == 0;
                parts.push(format!(
                    "k={k}: {} lines, {} certified (>= {want}), {} undecided",
                    c.len(),
                    cert.equal,
                    cert.undecided
                ));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("k={k}: {e}"));
            }
        }
    }
    pass_if(ok, format!("{} bits max; {}", policy.max_bits, parts.join(", ")))
}

fn c7_invariants() -> Verdict {
    let mut inputs: Vec<(String, Arrangement)> = Vec::new();
    for seed in 0..520u64 {
        let n = 4 + (seed as usize % 9);
        let range = 3 + (seed as i64 % 6);
        inputs.push((format!("random seed {seed}"), random_arrangement(n, range, seed % 3 == 0, seed)));
    }
    for n in 3..=14 {
        inputs.push((format!("hexgrid {n}"), hexgrid(n).unwrap()));
        inputs.push((format!("trigrid {n}"), trigrid(n).unwrap()));
    }
    inputs.push(("pentagon".into(), pentagon()));
    for k in 1..=2 {
        inputs.push((format!("st_extremal {k}"), st_extremal(k).unwrap().arrangement));
    }
    inputs.push(("scaled hexgrid 12".into(), scale_to_unit_min(&hexgrid(12).unwrap()).unwrap()));

    let mut violations = Vec::new();
    for (name, arr) in &inputs {
        let rep = verify_arrangement(arr).unwrap();
        for c in rep.checks.iter().filter(|c| c.status == CheckStatus::Fail) {
            violations.push(format!("{name}: {}", c.name));
        }
        let facial = count_facial(arr, ExecMode::default());
        if facial > kobon_bound(arr.len()).unwrap() {
            violations.push(format!("{name}: kobon"));
        }
    }
    let policy = PrecisionPolicy::default();
    for k in 0..=2 {
        let c = max_chain(k, &policy).unwrap();
        let cert = &c.certificate;
        if cert.gell_forests != Some(true) || cert.per_line_max > 2 * (c.len() - 2) {
            violations.push(format!("max_chain {k}"));
        }
    }
    pass_if(
        violations.is_empty(),
        format!("{} arrangements plus max_chain k=0..2; violations {violations:?}", inputs.len()),
    )
}

fn circle_tangent(t: i64) -> Line {
    // Tangent to the unit circle at ((1−t²)/(1+t²), 2t/(1+t²)).
    let d = 1 + t * t;
    Line::new(Scalar::ratio(1 - t * t, d), Scalar::ratio(2 * t, d), Scalar::from_int(-1)).unwrap()
}

fn c8_conics() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let pool = random_arrangement(40, 30, true, 8);
    let mut pick = |k: usize| -> Vec<Line> {
        let mut idx: Vec<usize> = (0..pool.len()).collect();
        for i in 0..k {
            let j = rng.gen_range(i..idx.len());
            idx.swap(i, j);
        }
        idx[..k].iter().map(|&i| pool.line(i).clone()).collect()
    };
    let fives_ok = (0..100).all(|_| !common_tangent_conics(&pick(5)).is_empty());
    let sixes_negative = (0..100).filter(|_| !six_tangent_test(&pick(6)).unwrap().common).count();

    let concurrent: Vec<Line> = [(1, 0), (0, 1), (1, 1), (1, -1), (1, 2), (2, 1)]
        .iter()
        .map(|&(a, b)| Line::from_ints(a, b, -(a + 2 * b)).unwrap())
        .collect();
    let incircle: Vec<Line> = (0..6).map(circle_tangent).collect();
    let conc_ok = six_tangent_test(&concurrent).unwrap().common;
    let circ = six_tangent_test(&incircle).unwrap();
    let circ_ok = circ.common && circ.certificate_rank == Some(3);

    let mut max_lines = 0;
    let mut max_quadrant = 0;
    let mut validated = 0;
    for seed in 0..30u64 {
        let arr = random_arrangement(9 + (seed as usize % 4), 4, true, 800 + seed);
        if !validate_general_position(&arr, &GeneralPositionOptions::default()).passes {
            continue;
        }
        validated += 1;
        let prof = pair_area_profile(&arr, &census(&arr).unwrap());
        max_lines = max_lines.max(prof.max_lines);
        max_quadrant = max_quadrant.max(prof.max_per_quadrant);
    }
    pass_if(
        fives_ok && sixes_negative == 100 && conc_ok && circ_ok && validated > 0 && max_lines <= 20 && max_quadrant <= 5,
        format!(
            "5-subsets with a conic: {}, random 6-subsets negative {sixes_negative}/100, concurrent six {conc_ok}, \
             incircle six {circ_ok}; {validated} validated arrangements, max {max_lines} lines per pair and area, \
             max {max_quadrant} per quadrant",
            if fives_ok { "100/100" } else { "not all" }
        ),
    )
}

fn c9_extraction() -> Verdict {
    let mut min_size = usize::MAX;
    let mut bad = Vec::new();
    for seed in 0..50u64 {
        let arr = random_arrangement(100, 20, true, 9000 + seed);
        let sys = ColoredTripleSystem::from_census(&census(&arr).unwrap());
        let ex = extract_rainbow(&sys, Strategy::Greedy, seed, 1).unwrap();
        if !is_rainbow(&sys, &ex.vertices) || ex.vertices.len() < 3 {
            bad.push(seed);
        }
        min_size = min_size.min(ex.vertices.len());
    }
    let mut over = Vec::new();
    for seed in 0..40u64 {
        let n = 4 + (seed as usize % 5);
        let arr = random_arrangement(n, 3, false, 90 + seed);
        let sys = ColoredTripleSystem::from_census(&census(&arr).unwrap());
        let opt = brute_force_optimum(&sys).unwrap().len();
        for strategy in [Strategy::Greedy, Strategy::SampleDelete] {
            let ex = extract_rainbow(&sys, strategy, seed, 4).unwrap();
            if ex.vertices.len() > opt || !is_rainbow(&sys, &ex.vertices) {
                over.push(seed);
            }
        }
    }
    pass_if(
        bad.is_empty() && over.is_empty(),
        format!(
            "50 arrangements n=100 (coefficients in [-20, 20]), smallest subset {min_size}, failures {bad:?}; 40 small inputs, above optimum {over:?}"
        ),
    )
}

fn c10() -> Verdict {
    Verdict::NotReproducible(
        "the O(n^(9/4+e)) upper bound and the incidence bound are asymptotic; criteria 4 and 5 exercise the same \
         transformations"
            .into(),
    )
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Verdict); 10] = [
        (1, c1_table),
        (2, c2_formulas),
        (3, c3_unit_lower_bound),
        (4, c4_duality),
        (5, c5_st_extremal),
        (6, c6_max_chain),
        (7, c7_invariants),
        (8, c8_conics),
        (9, c9_extraction),
        (10, c10),
    ];
    let mut failed = false;
    for (id, f) in criteria {
        let (tag, detail) = match f() {
            Verdict::Pass(d) => ("PASS", d),
            Verdict::Fail(d) => {
                failed = true;
                ("FAIL", d)
            }
            Verdict::KnownFail(d) => ("FAIL (analysed, not fatal)", d),
            Verdict::NotReproducible(d) => ("NOT REPRODUCIBLE", d),
        };
        println!("criterion {id}: {tag}: {detail}");
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
