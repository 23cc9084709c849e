use proptest::prelude::*;

use triarea::bounds::kobon_bound;
use triarea::census::{census, census_with, count_eq1_solutions, count_facial, facial_triangles};
use triarea::constructions::{line_from_param, random_arrangement, scale_to_unit_min};
use triarea::duality::check_duality;
use triarea::{
    intersect, three_term_area, triple_area, AffineMap, Arrangement, ExecMode, Frame, Intersection, Line, Point, Radicand,
    Rational, Scalar, Sign,
};

fn q5(r: (i64, i64), s: (i64, i64)) -> Scalar {
    Scalar::quad(
        Rational::new(r.0.into(), r.1.into()),
        Rational::new(s.0.into(), s.1.into()),
        Radicand::new(5).unwrap(),
    )
}

fn field_elem() -> impl Strategy<Value = Scalar> {
    ((-30i64..30, 1i64..8), (-30i64..30, 1i64..8)).prop_map(|(r, s)| q5(r, s))
}

fn small_line() -> impl Strategy<Value = (i64, i64, i64)> {
    (-9i64..=9, -9i64..=9, -9i64..=9).prop_filter("nonzero normal", |&(a, b, _)| a != 0 || b != 0)
}

fn arrangement(max_n: usize) -> impl Strategy<Value = Arrangement> {
    (4..=max_n, any::<u64>(), 2i64..8, any::<bool>())
        .prop_map(|(n, seed, range, general)| random_arrangement(n, range, general, seed))
}

/// Shoelace from vertex coordinates, kept local so it does not share code
/// with the library.
fn shoelace(p: &Point, q: &Point, r: &Point) -> Scalar {
    let twice = (&q.x - &p.x) * (&r.y - &p.y) - (&r.x - &p.x) * (&q.y - &p.y);
    twice.abs() / Scalar::from_int(2)
}

fn vertex(a: &Line, b: &Line) -> Option<Point> {
    match intersect(a, b) {
        Ok(Intersection::Point(p)) => Some(p),
        _ => None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(a in field_elem(), b in field_elem(), c in field_elem()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        if !a.is_zero() {
            prop_assert!((&a * &(Scalar::one() / &a)).is_one());
        }
    }

    #[test]
    fn sign_is_multiplicative_and_matches_floats(a in field_elem(), b in field_elem()) {
        prop_assert_eq!((&a * &b).sign(), a.sign().times(b.sign()));
        let f = a.to_f64();
        if f.abs() > 1e-9 {
            prop_assert_eq!(a.sign(), if f > 0.0 { Sign::Positive } else { Sign::Negative });
        }
        prop_assert_eq!(a < b, (&b - &a).sign() == Sign::Positive);
    }

    #[test]
    fn frame_formula_matches_shoelace(
        l in prop::array::uniform3(small_line()),
        e in small_line(),
    ) {
        let lines: Vec<Line> = l.iter().map(|&(a, b, c)| Line::from_ints(a, b, c).unwrap()).collect();
        let ell = Line::from_ints(e.0, e.1, e.2).unwrap();
        let frame = Frame::new(&ell);
        let params: Option<Vec<_>> = lines.iter().map(|x| frame.param(x)).collect();
        let verts = (vertex(&lines[0], &lines[1]), vertex(&lines[1], &lines[2]), vertex(&lines[0], &lines[2]));
        if let (Some(p), (Some(u), Some(v), Some(w))) = (params, verts) {
            let direct = shoelace(&u, &v, &w);
            if !direct.is_zero() {
                if let Some(formula) = three_term_area([&p[0], &p[1], &p[2]]) {
                    prop_assert_eq!(&formula, &direct);
                    prop_assert_eq!(triple_area(&lines[0], &lines[1], &lines[2]).area, Some(direct));
                }
            }
        }
    }

    #[test]
    fn census_is_affine_invariant(arr in arrangement(9), s in -4i64..=4, q in 1i64..=4, tx in -5i64..=5) {
        let map = AffineMap::shear_y(Scalar::from_int(s))
            .compose(&AffineMap::diagonal(Scalar::from_int(q), Scalar::ratio(1, q)))
            .compose(&AffineMap::translation(Scalar::from_int(tx), Scalar::ratio(1, 3)));
        prop_assert!(map.det().is_one());
        let image = arr.map(&map).unwrap();
        let (a, b) = (census(&arr).unwrap(), census(&image).unwrap());
        prop_assert_eq!(a.groups(), b.groups());
        prop_assert_eq!((a.concurrent(), a.with_parallel_pair()), (b.concurrent(), b.with_parallel_pair()));
    }

    #[test]
    fn per_line_counts_sum_to_three_times(arr in arrangement(9)) {
        let cen = census(&arr).unwrap();
        for (area, group) in cen.groups() {
            let total: usize = cen.per_line_counts(area).iter().sum();
            prop_assert_eq!(total, 3 * group.len());
        }
    }

    #[test]
    fn eq1_matches_unit_census(arr in arrangement(9)) {
        let unit = scale_to_unit_min(&arr);
        prop_assume!(unit.is_ok());
        let unit = unit.unwrap();
        let direct = census(&unit).unwrap().count_area(&Scalar::one());
        prop_assert!(direct >= 1);
        prop_assert_eq!(count_eq1_solutions(&unit).unwrap(), direct);
    }

    #[test]
    fn duality_counts_agree(params in prop::collection::vec((-8i64..=8, -8i64..=8), 3..16)) {
        let mut lines = vec![Line::from_ints(0, 1, 0).unwrap()];
        for (x, y) in params {
            let l = line_from_param(&Scalar::ratio(x, 2), &Scalar::ratio(y, 2));
            if !lines.contains(&l) {
                lines.push(l);
            }
        }
        prop_assume!(lines.len() >= 3);
        let arr = Arrangement::new(lines).unwrap();
        let chk = check_duality(&arr, 0).unwrap();
        prop_assert!(chk.holds, "{:?}", chk);
    }

    #[test]
    fn facial_structure(arr in arrangement(10)) {
        let cen = census(&arr).unwrap();
        let facial = facial_triangles(&arr);
        prop_assert!(facial.len() <= kobon_bound(arr.len()).unwrap());
        if let Some((_, mins)) = cen.min_group() {
            for t in mins {
                prop_assert!(facial.contains(t), "min triangle {:?} is not facial", t);
            }
        }
    }

    #[test]
    fn execution_modes_agree(arr in arrangement(10)) {
        let seq = census_with(&arr, ExecMode::Sequential).unwrap();
        let par = census_with(&arr, ExecMode::Parallel).unwrap();
        prop_assert_eq!(seq.records(), par.records());
        prop_assert_eq!(count_facial(&arr, ExecMode::Sequential), count_facial(&arr, ExecMode::Parallel));
    }
}
