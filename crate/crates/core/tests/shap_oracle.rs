use explicate_core::shap::{shap_brute_force, shap_linear};
use explicate_core::{FeatureVector, LinearModel};
use proptest::prelude::*;

// Shapley values from the permutation definition: average marginal
// contribution of each feature over every ordering of the features.
fn permutation_shapley(model: &LinearModel, x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let value = |present: &[bool]| -> f64 {
        (0..n)
            .map(|j| model.weights[j] * if present[j] { x[j] } else { model.background_means[j] })
            .sum::<f64>()
            + model.bias
    };
    let mut order: Vec<usize> = (0..n).collect();
    let mut phi = vec![0.0; n];
    let mut count = 0.0;
    loop {
        let mut present = vec![false; n];
        let mut before = value(&present);
        for &j in &order {
            present[j] = true;
            let after = value(&present);
            phi[j] += after - before;
            before = after;
        }
        count += 1.0;
        if !next_permutation(&mut order) {
            break;
        }
    }
    phi.iter().map(|p| p / count).collect()
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else { return false };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).unwrap();
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn model_and_point(max_dim: usize) -> impl Strategy<Value = (LinearModel, Vec<f64>)> {
    (1..=max_dim).prop_flat_map(|n| {
        (
            prop::collection::vec(-5.0..5.0f64, n),
            -3.0..3.0f64,
            prop::collection::vec(-2.0..2.0f64, n),
            prop::collection::vec(prop_oneof![Just(0.0), -4.0..4.0f64], n),
        )
            .prop_map(|(w, b, mu, x)| (LinearModel::new(w, b, mu).unwrap(), x))
    })
}

proptest! {
    #[test]
    fn closed_form_matches_subset_enumeration((model, x) in model_and_point(10)) {
        let fv = FeatureVector::from_dense(&x);
        let exact = shap_linear(&model, &fv).unwrap();
        let brute = shap_brute_force(&model, &fv).unwrap();
        for (a, b) in exact.phi.iter().zip(&brute) {
            prop_assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn closed_form_matches_permutation_definition((model, x) in model_and_point(6)) {
        let exact = shap_linear(&model, &FeatureVector::from_dense(&x)).unwrap();
        for (a, b) in exact.phi.iter().zip(permutation_shapley(&model, &x)) {
            prop_assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn efficiency_on_logit_scale((model, x) in model_and_point(40)) {
        let fv = FeatureVector::from_dense(&x);
        let e = shap_linear(&model, &fv).unwrap();
        let logit = model.logit(&fv).unwrap();
        prop_assert!((e.base_value + e.phi.iter().sum::<f64>() - logit).abs() < 1e-9);
        prop_assert!((e.output_logit - logit).abs() < 1e-12);
    }

    #[test]
    fn feature_at_baseline_gets_no_credit((model, x) in model_and_point(8)) {
        let mut x = x;
        x[0] = model.background_means[0];
        let e = shap_linear(&model, &FeatureVector::from_dense(&x)).unwrap();
        prop_assert!(e.phi[0].abs() < 1e-12);
    }
}
