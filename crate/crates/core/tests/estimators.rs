use al_core::estimators::{GaussianNb, GaussianProcess, KnnClassifier, LogisticOvr, RbfKernel};
use al_core::*;
use proptest::prelude::*;

fn labeled(n: std::ops::Range<usize>, k: usize) -> impl Strategy<Value = (Vec<[f64; 2]>, Vec<usize>)> {
    proptest::collection::vec(((-4.0f64..4.0, -4.0f64..4.0), 0..k), n)
        .prop_map(|v| v.into_iter().map(|((a, b), c)| ([a, b], c)).unzip())
}

fn queries() -> impl Strategy<Value = Vec<[f64; 2]>> {
    proptest::collection::vec((-6.0f64..6.0, -6.0f64..6.0).prop_map(|(a, b)| [a, b]), 1..10)
}

fn assert_rows_sum_to_one(p: &ProbabilityMatrix) -> std::result::Result<(), TestCaseError> {
    for i in 0..p.rows() {
        let row = p.row(i);
        prop_assert!((row.sum() - 1.0).abs() <= 1e-9);
        prop_assert!(row.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn classifier_rows_sum_to_one((x, y) in labeled(2..30, 3), q in queries(), k in 1usize..5) {
        let x = FeatureMatrix::from_rows(&x).unwrap();
        let q = FeatureMatrix::from_rows(&q).unwrap();
        let y = Targets::Classes(y);
        let mut models: Vec<Box<dyn Estimator>> = vec![
            Box::new(GaussianNb::new()),
            Box::new(KnnClassifier::new(k.min(x.rows())).unwrap()),
        ];
        if let Targets::Classes(c) = &y {
            if c.iter().any(|&v| v != c[0]) {
                models.push(Box::new(LogisticOvr::new()));
            }
        }
        for mut m in models {
            m.fit(&x, &y).unwrap();
            assert_rows_sum_to_one(&m.predict_proba(&q).unwrap())?;
        }
    }

    #[test]
    fn gnb_priors_sum_to_one((x, y) in labeled(1..30, 4)) {
        let mut m = GaussianNb::new();
        m.fit(&FeatureMatrix::from_rows(&x).unwrap(), &Targets::Classes(y)).unwrap();
        let total: f64 = m.model().unwrap().log_priors.iter().map(|l| l.exp()).sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn knn_with_full_neighborhood_gives_class_frequencies((x, y) in labeled(1..25, 3), q in queries()) {
        let n = y.len();
        let mut m = KnnClassifier::new(n).unwrap();
        m.fit(&FeatureMatrix::from_rows(&x).unwrap(), &Targets::Classes(y.clone())).unwrap();
        let p = m.predict_proba(&FeatureMatrix::from_rows(&q).unwrap()).unwrap();
        for (j, &c) in p.classes().iter().enumerate() {
            let freq = y.iter().filter(|&&v| v == c).count() as f64 / n as f64;
            for i in 0..p.rows() {
                prop_assert!((p.row(i)[j] - freq).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn logistic_loss_never_increases((x, y) in labeled(4..30, 2)) {
        prop_assume!(y.iter().any(|&v| v != y[0]));
        let mut m = LogisticOvr::new();
        m.fit(&FeatureMatrix::from_rows(&x).unwrap(), &Targets::Classes(y)).unwrap();
        for history in &m.model().unwrap().loss_history {
            for w in history.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-12, "{} -> {}", w[0], w[1]);
            }
        }
    }

    #[test]
    fn gp_mean_is_linear_in_targets(
        pts in proptest::collection::vec((-3.0f64..3.0, -2.0f64..2.0), 1..12),
        q in queries(),
        a in -5.0f64..5.0,
    ) {
        let x: Vec<[f64; 2]> = pts.iter().enumerate().map(|(i, &(v, _))| [v + 7.0 * i as f64, 0.0]).collect();
        let y: Vec<f64> = pts.iter().map(|&(_, t)| t).collect();
        let x = FeatureMatrix::from_rows(&x).unwrap();
        let q = FeatureMatrix::from_rows(&q).unwrap();
        let kernel = RbfKernel::new(1.0, 1.0, 0.05).unwrap();
        let mut base = GaussianProcess::new(kernel);
        base.fit(&x, &Targets::Continuous(y.clone())).unwrap();
        let mut scaled = GaussianProcess::new(kernel);
        scaled.fit(&x, &Targets::Continuous(y.iter().map(|v| a * v).collect())).unwrap();
        let (m0, s0) = base.predict_with_std(&q).unwrap();
        let (m1, s1) = scaled.predict_with_std(&q).unwrap();
        for i in 0..m0.len() {
            prop_assert!((m1[i] - a * m0[i]).abs() <= 1e-8);
            prop_assert!(s0[i] >= 0.0 && s0[i].is_finite());
            prop_assert!((s0[i] - s1[i]).abs() <= 1e-12);
        }
    }

    #[test]
    fn gp_variance_is_nonnegative(
        pts in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0, -2.0f64..2.0), 1..20),
        q in queries(),
        noise in 0.0f64..0.5,
    ) {
        let x: Vec<[f64; 2]> = pts.iter().map(|&(a, b, _)| [a, b]).collect();
        let y: Vec<f64> = pts.iter().map(|&(_, _, t)| t).collect();
        let mut gp = GaussianProcess::new(RbfKernel::new(0.8, 1.5, noise).unwrap());
        gp.fit(&FeatureMatrix::from_rows(&x).unwrap(), &Targets::Continuous(y)).unwrap();
        let (_, std) = gp.predict_with_std(&FeatureMatrix::from_rows(&q).unwrap()).unwrap();
        prop_assert!(std.iter().all(|&s| s >= 0.0 && s.is_finite()));
    }
}
