//! Arrangements of distinct lines and their text file format.
//!
//! ```text
//! # field: Q(sqrt 5)
//! 1 -1/2+1/2*sqrt(5) 3
//! 0 1 -1
//! ```
//!
//! One line per row as `a b c` in scalar syntax. `#` starts a comment; the
//! `# field:` header declares the field and defaults to `Q` when absent.
//! Printing always emits canonical coefficients, so a printed arrangement
//! parses back to the identical one and reprints byte for byte.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use thiserror::Error;

use crate::geometry::{GeometryError, Line};
use crate::kernel::Kernel;
use crate::scalar::{Field, Scalar, ScalarError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArrangementError {
    #[error("line {0} duplicates line {1}")]
    DuplicateLine(usize, usize),
    #[error("line {index} lies in {found}, outside the declared field {declared}")]
    FieldMismatch {
        index: usize,
        declared: Field,
        found: Field,
    },
    #[error("row {row}: expected three coefficients, found {found}")]
    WrongArity { row: usize, found: usize },
    #[error("row {row}: {source}")]
    Row { row: usize, source: GeometryError },
    #[error("row {row}: {source}")]
    Scalar { row: usize, source: ScalarError },
    #[error("bad field header: {0}")]
    Header(ScalarError),
}

/// Which lines are parallel and which triples pass through a common point.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Classification {
    /// Direction classes with at least two members, each sorted.
    pub parallel_classes: Vec<Vec<usize>>,
    pub concurrent_triples: Vec<[usize; 3]>,
}

/// A finite ordered list of pairwise distinct lines over one field.
pub struct Arrangement {
    lines: Vec<Line>,
    field: Field,
    classification: OnceLock<Classification>,
    kernel: OnceLock<Kernel>,
}

impl Clone for Arrangement {
    fn clone(&self) -> Self {
        Arrangement {
            lines: self.lines.clone(),
            field: self.field,
            classification: OnceLock::new(),
            kernel: OnceLock::new(),
        }
    }
}

impl fmt::Debug for Arrangement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Arrangement")
            .field("field", &self.field)
            .field("lines", &self.lines)
            .finish()
    }
}

impl PartialEq for Arrangement {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.lines == other.lines
    }
}

impl Eq for Arrangement {}

impl Arrangement {
    /// Builds an arrangement in the smallest field containing every line.
    pub fn new(lines: Vec<Line>) -> Result<Self, ArrangementError> {
        let mut field = Field::Rational;
        for (index, l) in lines.iter().enumerate() {
            field = field.join(l.field()).map_err(|_| ArrangementError::FieldMismatch {
                index,
                declared: field,
                found: l.field(),
            })?;
        }
        Self::with_field(field, lines)
    }

    pub fn with_field(field: Field, lines: Vec<Line>) -> Result<Self, ArrangementError> {
        for (index, l) in lines.iter().enumerate() {
            if field.join(l.field()) != Ok(field) {
                return Err(ArrangementError::FieldMismatch {
                    index,
                    declared: field,
                    found: l.field(),
                });
            }
        }
        let mut seen = std::collections::HashMap::with_capacity(lines.len());
        for (i, l) in lines.iter().enumerate() {
            if let Some(&j) = seen.get(l) {
                return Err(ArrangementError::DuplicateLine(i, j));
            }
            seen.insert(l.clone(), i);
        }
        Ok(Arrangement {
            lines,
            field,
            classification: OnceLock::new(),
            kernel: OnceLock::new(),
        })
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn line(&self, i: usize) -> &Line {
        &self.lines[i]
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub(crate) fn kernel(&self) -> &Kernel {
        self.kernel.get_or_init(|| Kernel::build(&self.lines))
    }

    /// Whether predicates run on the bounded-integer fast path.
    pub fn uses_integer_kernel(&self) -> bool {
        self.kernel().is_fast()
    }

    pub fn classification(&self) -> &Classification {
        self.classification.get_or_init(|| {
            let n = self.len();
            let k = self.kernel();
            let mut class_of: Vec<Option<usize>> = vec![None; n];
            let mut classes: Vec<Vec<usize>> = Vec::new();
            for i in 0..n {
                if class_of[i].is_some() {
                    continue;
                }
                let members: Vec<usize> = (i..n).filter(|&j| j == i || k.parallel(i, j)).collect();
                if members.len() > 1 {
                    for &m in &members {
                        class_of[m] = Some(classes.len());
                    }
                    classes.push(members);
                }
            }
            let mut concurrent = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if k.parallel(i, j) {
                        continue;
                    }
                    for m in j + 1..n {
                        if k.status(i, j, m) == crate::geometry::TripleStatus::Concurrent {
                            concurrent.push([i, j, m]);
                        }
                    }
                }
            }
            Classification {
                parallel_classes: classes,
                concurrent_triples: concurrent,
            }
        })
    }

    pub fn has_parallel_pair(&self) -> bool {
        !self.classification().parallel_classes.is_empty()
    }

    /// A new arrangement with the given subset of lines, in that order.
    pub fn subset(&self, indices: &[usize]) -> Arrangement {
        Arrangement::with_field(self.field, indices.iter().map(|&i| self.lines[i].clone()).collect())
            .expect("subset of distinct lines")
    }

    /// Image under an invertible affine map.
    pub fn map(&self, m: &crate::geometry::AffineMap) -> Result<Arrangement, GeometryError> {
        let lines = self
            .lines
            .iter()
            .map(|l| m.apply_line(l))
            .collect::<Result<Vec<_>, _>>()?;
        let field = lines
            .iter()
            .try_fold(self.field, |f, l| f.join(l.field()))
            .map_err(GeometryError::Scalar)?;
        Ok(Arrangement::with_field(field, lines).expect("invertible maps keep lines distinct"))
    }
}

/// Splits a row on whitespace, re-joining pieces of one scalar that were
/// written with interior spaces (`1/2 + 3/4 * sqrt(5)`). A piece continues
/// the previous scalar when it is a bare `-`, starts with `+ * / )`, or the
/// previous piece ends with `+ - * / (`; any other piece with a leading `-`
/// starts a new scalar.
fn split_row(row: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for piece in row.split_whitespace() {
        let continues = out.last().is_some_and(|prev: &String| {
            prev.ends_with(['+', '-', '*', '/', '('])
                || piece == "-"
                || piece.starts_with(['+', '*', '/', ')'])
                || (piece.starts_with("sqrt") && prev.ends_with('*'))
        });
        if continues {
            out.last_mut().unwrap().push_str(piece);
        } else {
            out.push(piece.to_string());
        }
    }
    out
}

impl FromStr for Arrangement {
    type Err = ArrangementError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut field = Field::Rational;
        let mut lines = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let row = idx + 1;
            let trimmed = raw.trim();
            if let Some(comment) = trimmed.strip_prefix('#') {
                if let Some(decl) = comment.trim().strip_prefix("field:") {
                    field = decl.trim().parse().map_err(ArrangementError::Header)?;
                }
                continue;
            }
            let body = trimmed.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let tokens = split_row(body);
            if tokens.len() != 3 {
                return Err(ArrangementError::WrongArity {
                    row,
                    found: tokens.len(),
                });
            }
            let coeffs = tokens
                .iter()
                .map(|t| t.parse::<Scalar>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|source| ArrangementError::Scalar { row, source })?;
            let mut it = coeffs.into_iter();
            let line = Line::new(it.next().unwrap(), it.next().unwrap(), it.next().unwrap())
                .map_err(|source| ArrangementError::Row { row, source })?;
            lines.push(line);
        }
        Arrangement::with_field(field, lines)
    }
}

impl fmt::Display for Arrangement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# field: {}", self.field)?;
        for l in &self.lines {
            writeln!(f, "{l}")?;
        }
        Ok(())
    }
}
