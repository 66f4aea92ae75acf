//! Built-in estimators implementing [`Estimator`](crate::estimator::Estimator).

mod gnb;
mod gp;
mod knn;
mod logistic;

pub use gnb::{GaussianNb, GaussianNbModel, VARIANCE_FLOOR};
pub use gp::{GaussianProcess, GpModel, RbfKernel, INITIAL_JITTER, MAX_JITTER};
pub use knn::{KnnClassifier, KnnModel};
pub use logistic::{LogisticOvr, LogisticOvrModel, LogisticParams};
