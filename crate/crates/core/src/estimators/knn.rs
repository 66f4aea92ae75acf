use ndarray::Array2;

use crate::data::{FeatureMatrix, ProbabilityMatrix, Targets};
use crate::error::{AlError, Result};
use crate::estimator::{check_fit_inputs, check_predict_inputs, unique_classes, Capabilities, Estimator};

/// k-nearest-neighbor classifier with Euclidean distance.
///
/// Distance ties are broken by training row order, so results never depend
/// on sort stability.
#[derive(Debug, Clone)]
pub struct KnnClassifier {
    k: usize,
    model: Option<KnnModel>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    pub x: FeatureMatrix,
    pub y: Vec<usize>,
    pub classes: Vec<usize>,
}

impl KnnClassifier {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(AlError::InvalidArgument("k must be at least 1".into()));
        }
        Ok(Self { k, model: None })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    fn fitted(&self) -> Result<&KnnModel> {
        self.model.as_ref().ok_or(AlError::NotFitted)
    }

    /// Training row indices of the k nearest neighbors of `query`, nearest first.
    pub fn neighbors(&self, query: &[f64]) -> Result<Vec<usize>> {
        let model = self.fitted()?;
        let mut dist: Vec<(f64, usize)> = model
            .x
            .view()
            .rows()
            .into_iter()
            .enumerate()
            .map(|(i, row)| {
                let d2: f64 = row.iter().zip(query).map(|(a, b)| (a - b) * (a - b)).sum();
                (d2, i)
            })
            .collect();
        dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        Ok(dist.into_iter().take(self.k).map(|(_, i)| i).collect())
    }
}

impl Estimator for KnnClassifier {
    fn name(&self) -> &'static str {
        "knn"
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            probabilistic: true,
            ..Capabilities::default()
        }
    }

    fn fit(&mut self, x: &FeatureMatrix, y: &Targets) -> Result<()> {
        check_fit_inputs(x, y)?;
        let labels = y.as_classes()?;
        if self.k > x.rows() {
            return Err(AlError::InvalidArgument(format!(
                "k = {} exceeds the {} training rows",
                self.k,
                x.rows()
            )));
        }
        self.model = Some(KnnModel {
            x: x.clone(),
            y: labels.to_vec(),
            classes: unique_classes(labels),
        });
        Ok(())
    }

    fn is_fitted(&self) -> bool {
        self.model.is_some()
    }

    fn n_features(&self) -> Option<usize> {
        self.model.as_ref().map(|m| m.x.cols())
    }

    fn classes(&self) -> Result<&[usize]> {
        Ok(&self.fitted()?.classes)
    }

    fn predict(&self, x: &FeatureMatrix) -> Result<Targets> {
        Ok(Targets::Classes(self.predict_proba(x)?.argmax_classes()))
    }

    fn predict_proba(&self, x: &FeatureMatrix) -> Result<ProbabilityMatrix> {
        check_predict_inputs(self.n_features(), x)?;
        let model = self.fitted()?;
        let mut proba = Array2::zeros((x.rows(), model.classes.len()));
        for (i, row) in x.view().rows().into_iter().enumerate() {
            let query = row.to_vec();
            for n in self.neighbors(&query)? {
                let c = model.classes.binary_search(&model.y[n]).expect("known class");
                proba[[i, c]] += 1.0;
            }
        }
        proba /= self.k as f64;
        ProbabilityMatrix::with_classes(proba, model.classes.clone())
    }

    fn clone_box(&self) -> Box<dyn Estimator> {
        Box::new(self.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane() -> (FeatureMatrix, Targets) {
        let x = FeatureMatrix::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 2.0], [3.0, 3.0], [-1.0, -1.0]])
            .unwrap();
        (x, Targets::Classes(vec![0, 1, 1, 0, 0]))
    }

    #[test]
    fn one_nn_on_training_point_is_one_hot() {
        let (x, y) = plane();
        let mut knn = KnnClassifier::new(1).unwrap();
        knn.fit(&x, &y).unwrap();
        let p = knn.predict_proba(&x).unwrap();
        for (i, &label) in y.as_classes().unwrap().iter().enumerate() {
            assert_eq!(p.row(i)[label], 1.0);
        }
    }

    #[test]
    fn three_nn_matches_exhaustive_sort() {
        let (x, y) = plane();
        let mut knn = KnnClassifier::new(3).unwrap();
        knn.fit(&x, &y).unwrap();
        let q = [0.6, 0.4];
        // squared distances: 0.52, 0.32, 2.92, 12.12, 3.52
        assert_eq!(knn.neighbors(&q).unwrap(), vec![1, 0, 2]);
        let p = knn.predict_proba(&FeatureMatrix::from_rows(&[q]).unwrap()).unwrap();
        assert!((p.row(0)[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!((p.row(0)[1] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn distance_ties_go_to_lower_index() {
        let x = FeatureMatrix::from_rows(&[[1.0], [-1.0]]).unwrap();
        let mut knn = KnnClassifier::new(1).unwrap();
        knn.fit(&x, &Targets::Classes(vec![1, 0])).unwrap();
        assert_eq!(knn.neighbors(&[0.0]).unwrap(), vec![0]);
    }

    #[test]
    fn k_larger_than_training_set_fails() {
        let x = FeatureMatrix::from_rows(&[[1.0]]).unwrap();
        let mut knn = KnnClassifier::new(2).unwrap();
        assert!(knn.fit(&x, &Targets::Classes(vec![0])).is_err());
        assert!(KnnClassifier::new(0).is_err());
    }
}
