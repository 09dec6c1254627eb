//! Validated finite spaces and elementary metric quantities.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Read access shared by every kind of finite space.
pub trait FiniteSpace {
    fn labels(&self) -> &[String];
    /// Entry `(i, j)` of the distance (or dissimilarity) matrix.
    fn dist(&self, i: usize, j: usize) -> &Scalar;

    fn len(&self) -> usize {
        self.labels().len()
    }

    fn is_empty(&self) -> bool {
        self.labels().is_empty()
    }

    fn label(&self, i: usize) -> &str {
        &self.labels()[i]
    }

    fn index_of(&self, label: &str) -> Option<usize> {
        self.labels().iter().position(|l| l == label)
    }

    /// Rows of the matrix, cloned.
    fn to_rows(&self) -> Vec<Vec<Scalar>> {
        let n = self.len();
        (0..n).map(|i| (0..n).map(|j| self.dist(i, j).clone()).collect()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Matrix {
    labels: Vec<String>,
    data: Vec<Scalar>,
}

impl Matrix {
    fn n(&self) -> usize {
        self.labels.len()
    }

    fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.n() + j]
    }

    fn label(&self, i: usize) -> String {
        self.labels[i].clone()
    }
}

macro_rules! space_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq)]
        pub struct $name(Matrix);

        impl FiniteSpace for $name {
            fn labels(&self) -> &[String] {
                &self.0.labels
            }

            fn dist(&self, i: usize, j: usize) -> &Scalar {
                self.0.get(i, j)
            }
        }
    };
}

space_type!(
    /// A finite metric space.
    MetricSpace
);
space_type!(
    /// A finite metric space satisfying the strong triangle inequality.
    UltrametricSpace
);
space_type!(
    /// A finite set with an ultra-dissimilarity: symmetric, strong triangle
    /// inequality, and `max(u(x,x), u(y,y)) <= u(x,y)` with equality only on the
    /// diagonal. Diagonal entries are birth times.
    UltraDissimilaritySpace
);

/// Which axioms [`validate`] checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceKind {
    Metric,
    Ultrametric,
    UltraDissimilarity,
}

/// Result of [`validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValidatedSpace {
    Metric(MetricSpace),
    Ultrametric(UltrametricSpace),
    UltraDissimilarity(UltraDissimilaritySpace),
}

/// Labels `p0, p1, ...` used when the input carries none.
pub fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("p{i}")).collect()
}

fn build_matrix(rows: Vec<Vec<Scalar>>, labels: Option<Vec<String>>) -> Result<Matrix> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::EmptySpace);
    }
    let labels = match labels {
        Some(l) if l.len() != n => return Err(Error::LabelMismatch { labels: l.len(), points: n }),
        Some(l) => l,
        None => default_labels(n),
    };
    let mut seen = HashSet::new();
    for l in &labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::DuplicateLabel(l.clone()));
        }
    }
    let mut data = Vec::with_capacity(n * n);
    for (row, r) in rows.into_iter().enumerate() {
        if r.len() != n {
            return Err(Error::NotSquare { row, len: r.len(), expected: n });
        }
        data.extend(r);
    }
    let m = Matrix { labels, data };
    for i in 0..n {
        for j in 0..n {
            if m.get(i, j).is_negative() {
                return Err(Error::NegativeEntry(m.label(i), m.label(j)));
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if m.get(i, j) != m.get(j, i) {
                return Err(Error::AsymmetricMatrix(m.label(i), m.label(j)));
            }
        }
    }
    Ok(m)
}

fn check_metric_definiteness(m: &Matrix) -> Result<()> {
    let n = m.n();
    for i in 0..n {
        if !m.get(i, i).is_zero() {
            return Err(Error::DefinitenessViolation(m.label(i), m.label(i)));
        }
        for j in i + 1..n {
            if m.get(i, j).is_zero() {
                return Err(Error::DefinitenessViolation(m.label(i), m.label(j)));
            }
        }
    }
    Ok(())
}

fn check_triangle(m: &Matrix) -> Result<()> {
    let n = m.n();
    for i in 0..n {
        for j in i + 1..n {
            for k in 0..n {
                if m.get(i, j) > &(m.get(i, k) + m.get(k, j)) {
                    return Err(Error::TriangleViolation(m.label(i), m.label(j), m.label(k)));
                }
            }
        }
    }
    Ok(())
}

fn check_strong_triangle(m: &Matrix) -> Result<()> {
    let n = m.n();
    for i in 0..n {
        for j in i..n {
            for k in 0..n {
                if m.get(i, j) > Scalar::max_of(m.get(i, k), m.get(k, j)) {
                    return Err(Error::StrongTriangleViolation(m.label(i), m.label(j), m.label(k)));
                }
            }
        }
    }
    Ok(())
}

fn check_birth_definiteness(m: &Matrix) -> Result<()> {
    let n = m.n();
    for i in 0..n {
        for j in i + 1..n {
            if Scalar::max_of(m.get(i, i), m.get(j, j)) >= m.get(i, j) {
                return Err(Error::DefinitenessViolation(m.label(i), m.label(j)));
            }
        }
    }
    Ok(())
}

impl MetricSpace {
    pub fn new(rows: Vec<Vec<Scalar>>, labels: Option<Vec<String>>) -> Result<Self> {
        let m = build_matrix(rows, labels)?;
        check_metric_definiteness(&m)?;
        check_triangle(&m)?;
        Ok(MetricSpace(m))
    }

    /// Reinterpret as an ultrametric space if the strong triangle inequality holds.
    pub fn to_ultrametric(&self) -> Result<UltrametricSpace> {
        check_strong_triangle(&self.0)?;
        Ok(UltrametricSpace(self.0.clone()))
    }
}

impl UltrametricSpace {
    pub fn new(rows: Vec<Vec<Scalar>>, labels: Option<Vec<String>>) -> Result<Self> {
        let m = build_matrix(rows, labels)?;
        check_metric_definiteness(&m)?;
        check_strong_triangle(&m)?;
        Ok(UltrametricSpace(m))
    }

    /// Build from integer entries; convenient in tests and examples.
    pub fn from_integers(rows: &[Vec<i64>], labels: Option<&[&str]>) -> Result<Self> {
        let rows = rows.iter().map(|r| r.iter().map(|&v| Scalar::from_integer(v)).collect()).collect();
        Self::new(rows, labels.map(|l| l.iter().map(|s| s.to_string()).collect()))
    }

    /// Constructor for matrices already known to be ultrametric (e.g. read off a tree).
    pub(crate) fn from_trusted(labels: Vec<String>, data: Vec<Scalar>) -> Self {
        debug_assert_eq!(labels.len() * labels.len(), data.len());
        UltrametricSpace(Matrix { labels, data })
    }

    pub fn as_metric(&self) -> MetricSpace {
        MetricSpace(self.0.clone())
    }

    pub fn as_dissimilarity(&self) -> UltraDissimilaritySpace {
        UltraDissimilaritySpace(self.0.clone())
    }

    /// Apply `f` to every entry. `f` must be strictly increasing with `f(0) = 0`
    /// for the result to stay ultrametric.
    pub(crate) fn map_distances(&self, f: impl Fn(&Scalar) -> Scalar) -> Self {
        UltrametricSpace(Matrix { labels: self.0.labels.clone(), data: self.0.data.iter().map(f).collect() })
    }

    pub fn relabel(&self, labels: Vec<String>) -> Result<Self> {
        Self::new(self.to_rows(), Some(labels))
    }
}

impl UltraDissimilaritySpace {
    pub fn new(rows: Vec<Vec<Scalar>>, labels: Option<Vec<String>>) -> Result<Self> {
        let m = build_matrix(rows, labels)?;
        check_strong_triangle(&m)?;
        check_birth_definiteness(&m)?;
        Ok(UltraDissimilaritySpace(m))
    }

    pub fn from_integers(rows: &[Vec<i64>], labels: Option<&[&str]>) -> Result<Self> {
        let rows = rows.iter().map(|r| r.iter().map(|&v| Scalar::from_integer(v)).collect()).collect();
        Self::new(rows, labels.map(|l| l.iter().map(|s| s.to_string()).collect()))
    }

    pub(crate) fn from_trusted(labels: Vec<String>, data: Vec<Scalar>) -> Self {
        UltraDissimilaritySpace(Matrix { labels, data })
    }

    pub fn birth(&self, i: usize) -> &Scalar {
        self.dist(i, i)
    }

    /// True when every birth time is zero.
    pub fn is_ultrametric(&self) -> bool {
        (0..self.len()).all(|i| self.birth(i).is_zero())
    }

    /// The ultrametric obtained by zeroing the diagonal.
    pub fn underlying_ultrametric(&self) -> UltrametricSpace {
        let n = self.len();
        let mut data = self.0.data.clone();
        for i in 0..n {
            data[i * n + i] = Scalar::zero();
        }
        UltrametricSpace(Matrix { labels: self.0.labels.clone(), data })
    }
}

/// Check `rows` against the axioms of `kind` and return the typed space.
pub fn validate(rows: Vec<Vec<Scalar>>, labels: Option<Vec<String>>, kind: SpaceKind) -> Result<ValidatedSpace> {
    Ok(match kind {
        SpaceKind::Metric => ValidatedSpace::Metric(MetricSpace::new(rows, labels)?),
        SpaceKind::Ultrametric => ValidatedSpace::Ultrametric(UltrametricSpace::new(rows, labels)?),
        SpaceKind::UltraDissimilarity => {
            ValidatedSpace::UltraDissimilarity(UltraDissimilaritySpace::new(rows, labels)?)
        }
    })
}

/// Ascending list of the distinct values occurring in a matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spectrum(Vec<Scalar>);

impl Spectrum {
    pub fn from_values(mut values: Vec<Scalar>) -> Self {
        values.sort();
        values.dedup();
        Spectrum(values)
    }

    pub fn values(&self) -> &[Scalar] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: &Scalar) -> bool {
        self.0.binary_search(v).is_ok()
    }

    pub fn max(&self) -> Option<&Scalar> {
        self.0.last()
    }

    pub fn min_positive(&self) -> Option<&Scalar> {
        self.0.iter().find(|v| !v.is_zero())
    }

    /// Sorted union of two spectra.
    pub fn merge(&self, other: &Spectrum) -> Spectrum {
        Spectrum::from_values(self.0.iter().chain(other.0.iter()).cloned().collect())
    }
}

pub fn spectrum<S: FiniteSpace + ?Sized>(space: &S) -> Spectrum {
    let n = space.len();
    let mut values = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in i..n {
            values.push(space.dist(i, j).clone());
        }
    }
    Spectrum::from_values(values)
}

pub fn diameter<S: FiniteSpace + ?Sized>(space: &S) -> Scalar {
    let n = space.len();
    let mut best = Scalar::zero();
    for i in 0..n {
        for j in i..n {
            if space.dist(i, j) > &best {
                best = space.dist(i, j).clone();
            }
        }
    }
    best
}

/// Minimum off-diagonal entry; `None` for a one-point space.
pub fn separation<S: FiniteSpace + ?Sized>(space: &S) -> Option<Scalar> {
    let n = space.len();
    let mut best: Option<&Scalar> = None;
    for i in 0..n {
        for j in i + 1..n {
            let d = space.dist(i, j);
            if best.is_none_or(|b| d < b) {
                best = Some(d);
            }
        }
    }
    best.cloned()
}
