//! Homogeneous predicate kernel shared by the census and the verifiers.
//!
//! Vertices are kept as homogeneous cross products `l_i × l_j`, so side
//! tests and vertex determinants need no division. Arrangements whose
//! canonical coefficients are integers of at most 40 bits run on `i128`;
//! everything else runs on exact [`Scalar`]s.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use crate::geometry::{Line, TripleStatus};
use crate::scalar::{Rational, Scalar, Sign};

const FAST_PATH_BITS: u64 = 40;

pub(crate) trait Coord: Clone + Send + Sync {
    fn mul(&self, o: &Self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn sign(&self) -> Sign;
    /// `det² / (2·|w0·w1·w2|)`.
    fn area_ratio(det: &Self, w: [&Self; 3]) -> Scalar;
}

impl Coord for i128 {
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn sign(&self) -> Sign {
        Sign::of_i128(*self)
    }
    fn area_ratio(det: &Self, w: [&Self; 3]) -> Scalar {
        let d = BigInt::from(*det);
        let den = BigInt::from(*w[0]) * BigInt::from(*w[1]) * BigInt::from(*w[2]) * BigInt::from(2);
        Scalar::from(Rational::new(&d * &d, den.abs()))
    }
}

impl Coord for Scalar {
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn sign(&self) -> Sign {
        Scalar::sign(self)
    }
    fn area_ratio(det: &Self, w: [&Self; 3]) -> Scalar {
        let den = w[0] * w[1] * w[2] * Scalar::from_int(2);
        det.square() / den.abs()
    }
}

pub(crate) type Homog<T> = [T; 3];

fn cross<T: Coord>(p: &Homog<T>, q: &Homog<T>) -> Homog<T> {
    [
        p[1].mul(&q[2]).sub(&p[2].mul(&q[1])),
        p[2].mul(&q[0]).sub(&p[0].mul(&q[2])),
        p[0].mul(&q[1]).sub(&p[1].mul(&q[0])),
    ]
}

fn dot<T: Coord>(p: &Homog<T>, q: &Homog<T>) -> T {
    p[0].mul(&q[0]).add(&p[1].mul(&q[1])).add(&p[2].mul(&q[2]))
}

/// Line coefficients over one numeric backend, with every pairwise vertex
/// precomputed.
pub(crate) struct LineSet<T: Coord> {
    lines: Vec<Homog<T>>,
    vertices: Vec<Homog<T>>,
    n: usize,
}

impl<T: Coord> LineSet<T> {
    fn new(lines: Vec<Homog<T>>) -> Self {
        let n = lines.len();
        let mut vertices = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                vertices.push(cross(&lines[i], &lines[j]));
            }
        }
        LineSet { lines, vertices, n }
    }

    fn vertex(&self, i: usize, j: usize) -> &Homog<T> {
        &self.vertices[i * self.n + j]
    }

    fn parallel(&self, i: usize, j: usize) -> bool {
        self.vertex(i, j)[2].sign() == Sign::Zero
    }

    /// Side of line `m` at vertex `l_i ∩ l_j` (which must exist).
    fn side(&self, m: usize, i: usize, j: usize) -> Sign {
        let v = self.vertex(i, j);
        dot(&self.lines[m], v).sign().times(v[2].sign())
    }

    fn status(&self, i: usize, j: usize, k: usize) -> TripleStatus {
        if self.parallel(i, j) || self.parallel(i, k) || self.parallel(j, k) {
            TripleStatus::HasParallelPair
        } else if dot(&self.lines[k], self.vertex(i, j)).sign() == Sign::Zero {
            TripleStatus::Concurrent
        } else {
            TripleStatus::Proper
        }
    }

    /// The vertex determinant `det[P_ij; P_ik; P_jk]` equals `det(l_i, l_j, l_k)²`,
    /// so the shoelace reduces to `det² / (2·|W_ij·W_ik·W_jk|)`.
    fn area(&self, i: usize, j: usize, k: usize) -> Scalar {
        let det = dot(&self.lines[k], self.vertex(i, j));
        T::area_ratio(&det, [&self.vertex(i, j)[2], &self.vertex(i, k)[2], &self.vertex(j, k)[2]])
    }

    /// Whether line `m` passes through the open interior of the triangle.
    fn crosses_interior(&self, m: usize, i: usize, j: usize, k: usize) -> bool {
        let s = [self.side(m, i, j), self.side(m, i, k), self.side(m, j, k)];
        s.contains(&Sign::Positive) && s.contains(&Sign::Negative)
    }
}

pub(crate) enum Kernel {
    Int(LineSet<i128>),
    Exact(LineSet<Scalar>),
}

fn small_int(s: &Scalar) -> Option<i128> {
    let q: &Rational = s.as_rational()?;
    if !q.is_integer() || q.numer().abs().bits() > FAST_PATH_BITS {
        return None;
    }
    q.numer().to_i128()
}

macro_rules! dispatch {
    ($self:expr, $ls:ident => $body:expr) => {
        match $self {
            Kernel::Int($ls) => $body,
            Kernel::Exact($ls) => $body,
        }
    };
}

impl Kernel {
    pub(crate) fn build(lines: &[Line]) -> Kernel {
        let ints: Option<Vec<Homog<i128>>> = lines
            .iter()
            .map(|l| Some([small_int(l.a())?, small_int(l.b())?, small_int(l.c())?]))
            .collect();
        match ints {
            Some(v) => Kernel::Int(LineSet::new(v)),
            None => Kernel::Exact(LineSet::new(
                lines
                    .iter()
                    .map(|l| [l.a().clone(), l.b().clone(), l.c().clone()])
                    .collect(),
            )),
        }
    }

    pub(crate) fn is_fast(&self) -> bool {
        matches!(self, Kernel::Int(_))
    }

    pub(crate) fn parallel(&self, i: usize, j: usize) -> bool {
        dispatch!(self, ls => ls.parallel(i, j))
    }

    pub(crate) fn status(&self, i: usize, j: usize, k: usize) -> TripleStatus {
        dispatch!(self, ls => ls.status(i, j, k))
    }

    pub(crate) fn area(&self, i: usize, j: usize, k: usize) -> Scalar {
        dispatch!(self, ls => ls.area(i, j, k))
    }

    /// Side of line `m` at the vertex `l_i ∩ l_j`.
    pub(crate) fn side(&self, m: usize, i: usize, j: usize) -> Sign {
        dispatch!(self, ls => ls.side(m, i, j))
    }

    pub(crate) fn crosses_interior(&self, m: usize, i: usize, j: usize, k: usize) -> bool {
        dispatch!(self, ls => ls.crosses_interior(m, i, j, k))
    }

    /// A proper triangle whose open interior meets no other line.
    pub(crate) fn is_facial(&self, i: usize, j: usize, k: usize) -> bool {
        if self.status(i, j, k) != TripleStatus::Proper {
            return false;
        }
        dispatch!(self, ls => (0..ls.n)
            .filter(|&m| m != i && m != j && m != k)
            .all(|m| !ls.crosses_interior(m, i, j, k)))
    }
}
