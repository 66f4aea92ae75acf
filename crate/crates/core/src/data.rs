//! Validated containers for instances, targets, probabilities and utilities.

use ndarray::{concatenate, Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{AlError, Result};

/// Row-major matrix of finite real-valued instances.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix(Array2<f64>);

impl FeatureMatrix {
    pub fn new(values: Array2<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(AlError::NonFinite("feature matrix"));
        }
        Ok(Self(values))
    }

    /// Builds a matrix from row vectors. Every row must have the same length.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut flat = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(AlError::Shape(format!(
                    "row {i} has {} columns, expected {cols}",
                    row.len()
                )));
            }
            flat.extend_from_slice(row);
        }
        let values = Array2::from_shape_vec((rows.len(), cols), flat)
            .map_err(|e| AlError::Shape(e.to_string()))?;
        Self::new(values)
    }

    pub fn empty(cols: usize) -> Self {
        Self(Array2::zeros((0, cols)))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.0.nrows() == 0
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.0.row(i)
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.0.view()
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.0
    }

    pub fn into_array(self) -> Array2<f64> {
        self.0
    }

    /// Rows at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Self {
        Self(self.0.select(Axis(0), indices))
    }

    /// Vertically stacks `other` beneath `self`.
    pub fn stack(&self, other: &FeatureMatrix) -> Result<Self> {
        if self.cols() != other.cols() {
            return Err(AlError::Shape(format!(
                "feature count {} does not match {}",
                other.cols(),
                self.cols()
            )));
        }
        let values = concatenate(Axis(0), &[self.0.view(), other.0.view()])
            .map_err(|e| AlError::Shape(e.to_string()))?;
        Ok(Self(values))
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.0.rows().into_iter().map(|r| r.to_vec()).collect()
    }
}

/// Training targets, and also what estimators predict.
#[derive(Debug, Clone, PartialEq)]
pub enum Targets {
    /// Integer class identifiers.
    Classes(Vec<usize>),
    /// Binary relevance matrix, one column per label.
    Multilabel(Array2<u8>),
    /// Real-valued regression targets.
    Continuous(Vec<f64>),
}

impl Targets {
    pub fn kind(&self) -> &'static str {
        match self {
            Targets::Classes(_) => "classes",
            Targets::Multilabel(_) => "multilabel",
            Targets::Continuous(_) => "continuous",
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Targets::Classes(y) => y.len(),
            Targets::Multilabel(y) => y.nrows(),
            Targets::Continuous(y) => y.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Targets::Classes(_) => Ok(()),
            Targets::Multilabel(y) => {
                if y.iter().any(|&v| v > 1) {
                    Err(AlError::InvalidArgument(
                        "multilabel entries must be 0 or 1".into(),
                    ))
                } else {
                    Ok(())
                }
            }
            Targets::Continuous(y) => {
                if y.iter().all(|v| v.is_finite()) {
                    Ok(())
                } else {
                    Err(AlError::NonFinite("continuous targets"))
                }
            }
        }
    }

    pub fn select(&self, indices: &[usize]) -> Self {
        match self {
            Targets::Classes(y) => Targets::Classes(indices.iter().map(|&i| y[i]).collect()),
            Targets::Multilabel(y) => Targets::Multilabel(y.select(Axis(0), indices)),
            Targets::Continuous(y) => Targets::Continuous(indices.iter().map(|&i| y[i]).collect()),
        }
    }

    pub fn concat(&self, other: &Targets) -> Result<Self> {
        match (self, other) {
            (Targets::Classes(a), Targets::Classes(b)) => {
                Ok(Targets::Classes(a.iter().chain(b).copied().collect()))
            }
            (Targets::Continuous(a), Targets::Continuous(b)) => {
                Ok(Targets::Continuous(a.iter().chain(b).copied().collect()))
            }
            (Targets::Multilabel(a), Targets::Multilabel(b)) => {
                if a.ncols() != b.ncols() {
                    return Err(AlError::Shape(format!(
                        "label count {} does not match {}",
                        b.ncols(),
                        a.ncols()
                    )));
                }
                let stacked = concatenate(Axis(0), &[a.view(), b.view()])
                    .map_err(|e| AlError::Shape(e.to_string()))?;
                Ok(Targets::Multilabel(stacked))
            }
            (a, b) => Err(AlError::TargetKind {
                expected: a.kind(),
                found: b.kind(),
            }),
        }
    }

    pub fn as_classes(&self) -> Result<&[usize]> {
        match self {
            Targets::Classes(y) => Ok(y),
            other => Err(AlError::TargetKind {
                expected: "classes",
                found: other.kind(),
            }),
        }
    }

    pub fn as_continuous(&self) -> Result<&[f64]> {
        match self {
            Targets::Continuous(y) => Ok(y),
            other => Err(AlError::TargetKind {
                expected: "continuous",
                found: other.kind(),
            }),
        }
    }
}

/// Per-instance class distributions. Column `j` is the probability of
/// `classes()[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMatrix {
    values: Array2<f64>,
    classes: Vec<usize>,
}

pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

impl ProbabilityMatrix {
    /// Columns are taken to be classes `0..k`.
    pub fn new(values: Array2<f64>) -> Result<Self> {
        let classes = (0..values.ncols()).collect();
        Self::with_classes(values, classes)
    }

    pub fn with_classes(values: Array2<f64>, classes: Vec<usize>) -> Result<Self> {
        if classes.len() != values.ncols() {
            return Err(AlError::Shape(format!(
                "{} class ids for {} probability columns",
                classes.len(),
                values.ncols()
            )));
        }
        for (i, row) in values.rows().into_iter().enumerate() {
            if row.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(AlError::InvalidProbabilities(format!(
                    "row {i} has an entry outside [0, 1]"
                )));
            }
            let sum: f64 = row.sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(AlError::InvalidProbabilities(format!(
                    "row {i} sums to {sum}"
                )));
            }
        }
        Ok(Self { values, classes })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let m = FeatureMatrix::from_rows(rows)?;
        Self::new(m.into_array())
    }

    pub fn rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_classes(&self) -> usize {
        self.values.ncols()
    }

    pub fn classes(&self) -> &[usize] {
        &self.classes
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.values.row(i)
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.values.view()
    }

    /// Most probable class per row, ties to the lower column.
    pub fn argmax_classes(&self) -> Vec<usize> {
        self.values
            .rows()
            .into_iter()
            .map(|row| {
                let mut best = 0;
                for (j, &p) in row.iter().enumerate() {
                    if p > row[best] {
                        best = j;
                    }
                }
                self.classes[best]
            })
            .collect()
    }
}

/// One informativeness score per pool instance; larger means query earlier.
///
/// Instances can be excluded from selection through a mask, which keeps every
/// stored value finite.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityArray {
    values: Vec<f64>,
    excluded: Option<Vec<bool>>,
}

impl UtilityArray {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(AlError::NonFinite("utilities"));
        }
        Ok(Self {
            values,
            excluded: None,
        })
    }

    pub fn with_exclusions(values: Vec<f64>, excluded: Vec<bool>) -> Result<Self> {
        if excluded.len() != values.len() {
            return Err(AlError::Shape(format!(
                "exclusion mask of length {} for {} utilities",
                excluded.len(),
                values.len()
            )));
        }
        let mut u = Self::new(values)?;
        if excluded.iter().any(|&e| e) {
            u.excluded = Some(excluded);
        }
        Ok(u)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_excluded(&self, i: usize) -> bool {
        self.excluded.as_ref().is_some_and(|m| m[i])
    }

    /// Indices that a selector may pick.
    pub fn eligible(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.values.len()).filter(|&i| !self.is_excluded(i))
    }
}

/// Pool rows picked by a query, in selection order.
#[derive(Debug, Clone, PartialEq)]
pub struct QuerySelection {
    pub indices: Vec<usize>,
    pub instances: FeatureMatrix,
}

impl QuerySelection {
    pub fn from_pool(pool: &FeatureMatrix, indices: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; pool.rows()];
        for &i in &indices {
            if i >= pool.rows() {
                return Err(AlError::InvalidArgument(format!(
                    "index {i} out of range for pool of {}",
                    pool.rows()
                )));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(AlError::InvalidArgument(format!(
                    "index {i} selected twice"
                )));
            }
        }
        let instances = pool.select(&indices);
        Ok(Self { indices, instances })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn feature_matrix_rejects_ragged_and_nan() {
        assert!(FeatureMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
        assert_eq!(
            FeatureMatrix::from_rows(&[vec![f64::NAN]]),
            Err(AlError::NonFinite("feature matrix"))
        );
    }

    #[test]
    fn stack_checks_columns() {
        let a = FeatureMatrix::from_rows(&[[1.0, 2.0]]).unwrap();
        let b = FeatureMatrix::from_rows(&[[1.0]]).unwrap();
        assert!(a.stack(&b).is_err());
        assert_eq!(a.stack(&a).unwrap().rows(), 2);
        assert_eq!(FeatureMatrix::empty(2).stack(&a).unwrap(), a);
    }

    #[test]
    fn probability_rows_must_sum_to_one() {
        assert!(ProbabilityMatrix::new(array![[0.5, 0.4]]).is_err());
        assert!(ProbabilityMatrix::new(array![[1.2, -0.2]]).is_err());
        let p = ProbabilityMatrix::new(array![[0.3, 0.7], [0.5, 0.5]]).unwrap();
        assert_eq!(p.argmax_classes(), vec![1, 0]);
    }

    #[test]
    fn targets_concat_requires_same_kind() {
        let a = Targets::Classes(vec![0, 1]);
        let b = Targets::Continuous(vec![0.5]);
        assert!(a.concat(&b).is_err());
        assert_eq!(a.concat(&a).unwrap().len(), 4);
        assert!(Targets::Multilabel(array![[0, 2]]).validate().is_err());
    }

    #[test]
    fn selection_rejects_duplicates() {
        let pool = FeatureMatrix::from_rows(&[[0.0], [1.0]]).unwrap();
        assert!(QuerySelection::from_pool(&pool, vec![1, 1]).is_err());
        assert!(QuerySelection::from_pool(&pool, vec![2]).is_err());
        let s = QuerySelection::from_pool(&pool, vec![1, 0]).unwrap();
        assert_eq!(s.instances.row(0)[0], 1.0);
    }

    #[test]
    fn utilities_reject_infinities() {
        assert!(UtilityArray::new(vec![f64::NEG_INFINITY]).is_err());
        let u = UtilityArray::with_exclusions(vec![1.0, 2.0], vec![false, true]).unwrap();
        assert_eq!(u.eligible().collect::<Vec<_>>(), vec![0]);
    }
}
