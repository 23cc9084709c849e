//! Small exact dense linear algebra over `Scalar` and `BigInt`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::scalar::Scalar;

/// Reduced row echelon form; returns the pivot columns.
fn rref(m: &mut [Vec<Scalar>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = Scalar::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let d = &f * &m[r][j];
                    m[i][j] = &m[i][j] - &d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub(crate) fn rank(m: &[Vec<Scalar>]) -> usize {
    rref(&mut m.to_vec()).len()
}

/// A basis of `{v : M·v = 0}`.
pub(crate) fn kernel(m: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    let cols = m.first().map_or(0, Vec::len);
    let mut a = m.to_vec();
    let pivots = rref(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Scalar::zero(); cols];
            v[f] = Scalar::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -&a[r][f];
            }
            v
        })
        .collect()
}

/// Determinant by fraction-free Bareiss elimination.
pub(crate) fn det_bigint(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

pub(crate) fn det(m: &[Vec<Scalar>]) -> Scalar {
    let mut a = m.to_vec();
    let n = a.len();
    let mut d = Scalar::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Scalar::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d = &d * &a[c][c];
        let inv = Scalar::one() / &a[c][c];
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            for j in c..n {
                let t = &f * &a[c][j];
                a[i][j] = &a[i][j] - &t;
            }
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: i64) -> Scalar {
        Scalar::from_int(v)
    }

    #[test]
    fn determinants_agree() {
        let rows = [[2, -1, 0, 3], [1, 4, -2, 0], [0, 5, 1, 1], [7, 0, -3, 2]];
        let sm: Vec<Vec<Scalar>> = rows.iter().map(|r| r.iter().map(|&v| s(v)).collect()).collect();
        let bm: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
        let d = det(&sm);
        assert_eq!(d, Scalar::from_bigint(det_bigint(bm)));
        assert_eq!(d, s(-178));
    }

    #[test]
    fn kernel_of_rank_deficient() {
        let m = vec![vec![s(1), s(2), s(3)], vec![s(2), s(4), s(6)]];
        assert_eq!(rank(&m), 1);
        let k = kernel(&m);
        assert_eq!(k.len(), 2);
        for v in &k {
            let dot = &m[0][0] * &v[0] + &m[0][1] * &v[1] + &m[0][2] * &v[2];
            assert!(dot.is_zero());
        }
    }
}
