//! Generic James-Stein shrinkage.
//!
//! [`general_lambda`] is the optimal intensity for shrinking any estimator
//! toward a target, given plug-in estimates of the first two moments. The
//! multinomial intensity in [`crate::freq::shrinkage_lambda`] is its special
//! case with zero bias, zero covariance and a fixed target.
//!
//! The two normal-mean estimators handle a single observation `x ~ N_p(μ, I)`.

use crate::error::{invalid, Error, Result};

/// One observation from a `p`-variate normal with identity covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalMeanSample {
    x: Vec<f64>,
}

impl NormalMeanSample {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if x.is_empty() {
            return Err(invalid("sample must have at least one component"));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(invalid("sample components must be finite"));
        }
        Ok(Self { x })
    }

    pub fn values(&self) -> &[f64] {
        &self.x
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn mean(&self) -> f64 {
        self.x.iter().sum::<f64>() / self.x.len() as f64
    }
}

/// Classic James-Stein estimator shrinking toward zero, `(1 - (p-2)/Σx²) x`.
///
/// The factor is not truncated and may be negative.
pub fn js_zero_target(sample: &NormalMeanSample) -> Result<Vec<f64>> {
    let p = sample.dim();
    if p < 3 {
        return Err(Error::Domain(format!("James-Stein needs p >= 3, got {p}")));
    }
    let ss: f64 = sample.values().iter().map(|v| v * v).sum();
    if ss == 0.0 {
        return Err(Error::Domain("sum of squares is zero".into()));
    }
    let factor = 1.0 - (p as f64 - 2.0) / ss;
    Ok(sample.values().iter().map(|v| factor * v).collect())
}

/// Shrinkage toward the component mean with `λ = (p-3)/Σ(x - x̄)²`, truncated to `[0, 1]`.
///
/// Returns the shrunk vector and the intensity used.
pub fn js_mean_target(sample: &NormalMeanSample) -> Result<(Vec<f64>, f64)> {
    let p = sample.dim();
    if p < 4 {
        return Err(Error::Domain(format!(
            "mean-target shrinkage needs p >= 4, got {p}"
        )));
    }
    let mean = sample.mean();
    let ss: f64 = sample.values().iter().map(|v| (v - mean) * (v - mean)).sum();
    let lambda = if ss == 0.0 {
        1.0
    } else {
        ((p as f64 - 3.0) / ss).clamp(0.0, 1.0)
    };
    let shrunk = sample
        .values()
        .iter()
        .map(|&v| lambda * mean + (1.0 - lambda) * v)
        .collect();
    Ok((shrunk, lambda))
}

/// Moment estimates feeding [`general_lambda`], one entry per component.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralShrinkageInputs {
    pub estimates: Vec<f64>,
    pub targets: Vec<f64>,
    pub variances: Vec<f64>,
    pub covariances: Vec<f64>,
    pub biases: Vec<f64>,
}

impl GeneralShrinkageInputs {
    /// Inputs for an unbiased estimator shrunk toward a fixed target.
    pub fn unbiased_fixed_target(estimates: Vec<f64>, targets: Vec<f64>, variances: Vec<f64>) -> Self {
        let p = estimates.len();
        Self {
            estimates,
            targets,
            variances,
            covariances: vec![0.0; p],
            biases: vec![0.0; p],
        }
    }

    fn validate(&self) -> Result<()> {
        let p = self.estimates.len();
        if p == 0 {
            return Err(invalid("shrinkage inputs are empty"));
        }
        for (name, len) in [
            ("targets", self.targets.len()),
            ("variances", self.variances.len()),
            ("covariances", self.covariances.len()),
            ("biases", self.biases.len()),
        ] {
            if len != p {
                return Err(invalid(format!("{name} has length {len}, expected {p}")));
            }
        }
        if self.variances.iter().any(|&v| !(v >= 0.0)) {
            return Err(invalid("variances must be >= 0"));
        }
        Ok(())
    }
}

/// Estimated optimal shrinkage intensity from plug-in moments.
///
/// `λ = Σ [Var - Cov + Bias·(θ̂ - θ̂ᵀ)] / Σ (θ̂ - θ̂ᵀ)²`, clamped to `[0, 1]`;
/// a zero denominator gives `λ = 1`.
pub fn general_lambda(inputs: &GeneralShrinkageInputs) -> Result<f64> {
    inputs.validate()?;
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 0..inputs.estimates.len() {
        let gap = inputs.estimates[k] - inputs.targets[k];
        num += inputs.variances[k] - inputs.covariances[k] + inputs.biases[k] * gap;
        den += gap * gap;
    }
    if den == 0.0 {
        return Ok(1.0);
    }
    Ok((num / den).clamp(0.0, 1.0))
}

/// Monte Carlo squared-error risk of the identity, zero-target and mean-target
/// estimators for `x ~ N_p(μ, I)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskSummary {
    pub draws: usize,
    pub ml: f64,
    pub zero_target: f64,
    /// `None` when `p < 4`.
    pub mean_target: Option<f64>,
}

/// Simulates `draws` observations from `N_p(mean, I)` and averages the total squared error.
pub fn simulate_risk(mean: &[f64], draws: usize, seed: u64) -> Result<RiskSummary> {
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    let p = mean.len();
    if p < 3 {
        return Err(Error::Domain(format!("James-Stein needs p >= 3, got {p}")));
    }
    if draws == 0 {
        return Err(invalid("need at least one draw"));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let sq = |est: &[f64]| -> f64 { est.iter().zip(mean).map(|(e, m)| (e - m) * (e - m)).sum() };
    let (mut ml, mut zero, mut avg) = (0.0, 0.0, 0.0);
    for _ in 0..draws {
        let x: Vec<f64> = mean
            .iter()
            .map(|m| m + <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng))
            .collect();
        ml += sq(&x);
        let s = NormalMeanSample::new(x)?;
        zero += sq(&js_zero_target(&s)?);
        if p >= 4 {
            avg += sq(&js_mean_target(&s)?.0);
        }
    }
    let d = draws as f64;
    Ok(RiskSummary {
        draws,
        ml: ml / d,
        zero_target: zero / d,
        mean_target: (p >= 4).then_some(avg / d),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freq::{estimate_ml, ml_variance, shrinkage_lambda, CountVector, FrequencyVector};
    use proptest::prelude::*;

    fn sample(x: &[f64]) -> NormalMeanSample {
        NormalMeanSample::new(x.to_vec()).unwrap()
    }

    fn close(a: &[f64], b: &[f64]) {
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < 1e-12, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn zero_target_examples() {
        close(&js_zero_target(&sample(&[1.0, 1.0, 1.0])).unwrap(), &[2.0 / 3.0; 3]);
        close(&js_zero_target(&sample(&[1.0, 1.0, 0.0, 0.0])).unwrap(), &[0.0; 4]);
        close(&js_zero_target(&sample(&[10.0, 0.0, 0.0])).unwrap(), &[9.9, 0.0, 0.0]);
        assert!(js_zero_target(&sample(&[0.0; 3])).is_err());
        assert!(js_zero_target(&sample(&[1.0, 2.0])).is_err());
        // untruncated: factor 1 - 1/0.01 < 0
        let out = js_zero_target(&sample(&[0.1, 0.0, 0.0])).unwrap();
        assert!(out[0] < 0.0);
    }

    #[test]
    fn mean_target_examples() {
        let (v, l) = js_mean_target(&sample(&[0.0, 0.0, 0.0, 0.0, 5.0])).unwrap();
        assert!((l - 0.1).abs() < 1e-15);
        close(&v, &[0.1, 0.1, 0.1, 0.1, 4.6]);
        let (v, l) = js_mean_target(&sample(&[1.0; 4])).unwrap();
        assert_eq!(l, 1.0);
        close(&v, &[1.0; 4]);
        let (v, l) = js_mean_target(&sample(&[0.0, 0.0, 1.0, 1.0])).unwrap();
        assert_eq!(l, 1.0);
        close(&v, &[0.5; 4]);
        assert!(js_mean_target(&sample(&[1.0, 2.0, 3.0])).is_err());
    }

    #[test]
    fn sample_validation() {
        assert!(NormalMeanSample::new(vec![]).is_err());
        assert!(NormalMeanSample::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn general_lambda_examples() {
        let inputs = GeneralShrinkageInputs::unbiased_fixed_target(
            vec![0.75, 0.25],
            vec![0.5, 0.5],
            vec![0.1875, 0.1875],
        );
        assert_eq!(general_lambda(&inputs).unwrap(), 1.0);
        let counts = CountVector::new(vec![3, 1]).unwrap();
        let u = FrequencyVector::uniform(2).unwrap();
        assert_eq!(shrinkage_lambda(&counts, &u).unwrap(), 1.0);

        let inputs = GeneralShrinkageInputs {
            estimates: vec![0.3, 0.7],
            targets: vec![0.5, 0.5],
            variances: vec![0.02, 0.05],
            covariances: vec![0.02, 0.05],
            biases: vec![0.0, 0.0],
        };
        assert_eq!(general_lambda(&inputs).unwrap(), 0.0);

        let inputs = GeneralShrinkageInputs {
            estimates: vec![1.0],
            targets: vec![0.5],
            variances: vec![0.0],
            covariances: vec![0.0],
            biases: vec![0.1],
        };
        assert!((general_lambda(&inputs).unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn general_lambda_edge_cases() {
        let same = GeneralShrinkageInputs::unbiased_fixed_target(vec![0.5; 2], vec![0.5; 2], vec![0.1; 2]);
        assert_eq!(general_lambda(&same).unwrap(), 1.0);
        let negative = GeneralShrinkageInputs {
            estimates: vec![1.0],
            targets: vec![0.0],
            variances: vec![0.1],
            covariances: vec![0.5],
            biases: vec![0.0],
        };
        assert_eq!(general_lambda(&negative).unwrap(), 0.0);
        let bad = GeneralShrinkageInputs::unbiased_fixed_target(vec![0.5; 2], vec![0.5], vec![0.1; 2]);
        assert!(general_lambda(&bad).is_err());
        let bad = GeneralShrinkageInputs::unbiased_fixed_target(vec![0.5], vec![0.5], vec![-0.1]);
        assert!(general_lambda(&bad).is_err());
    }

    #[test]
    fn risk_simulation_shows_dominance() {
        let r = simulate_risk(&[0.0; 10], 2000, 11).unwrap();
        assert!((r.ml - 10.0).abs() < 0.5);
        assert!(r.zero_target < 0.5 * r.ml);
        assert!(r.mean_target.unwrap() < r.ml);
        assert!(simulate_risk(&[0.0; 2], 10, 1).is_err());
    }

    proptest! {
        #[test]
        fn specializes_to_multinomial_lambda(
            y in prop::collection::vec(0u64..40, 2..300)
                .prop_filter("n >= 2", |v| v.iter().sum::<u64>() >= 2)
        ) {
            let c = CountVector::new(y).unwrap();
            let u = FrequencyVector::uniform(c.dim()).unwrap();
            let inputs = GeneralShrinkageInputs::unbiased_fixed_target(
                estimate_ml(&c).unwrap().into_vec(),
                u.probs().to_vec(),
                ml_variance(&c).unwrap(),
            );
            let a = general_lambda(&inputs).unwrap();
            let b = shrinkage_lambda(&c, &u).unwrap();
            prop_assert!((a - b).abs() <= 1e-12);
        }

        #[test]
        fn general_lambda_in_unit_interval(
            rows in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0, 0.0f64..2.0, -2.0f64..2.0, -1.0f64..1.0), 1..20)
        ) {
            let inputs = GeneralShrinkageInputs {
                estimates: rows.iter().map(|r| r.0).collect(),
                targets: rows.iter().map(|r| r.1).collect(),
                variances: rows.iter().map(|r| r.2).collect(),
                covariances: rows.iter().map(|r| r.3).collect(),
                biases: rows.iter().map(|r| r.4).collect(),
            };
            let l = general_lambda(&inputs).unwrap();
            prop_assert!((0.0..=1.0).contains(&l));
        }

        #[test]
        fn mean_target_between_value_and_mean(x in prop::collection::vec(-10.0f64..10.0, 4..30)) {
            let s = NormalMeanSample::new(x.clone()).unwrap();
            let m = s.mean();
            let (v, l) = js_mean_target(&s).unwrap();
            prop_assert!((0.0..=1.0).contains(&l));
            for (xi, vi) in x.iter().zip(&v) {
                let (lo, hi) = if *xi < m { (*xi, m) } else { (m, *xi) };
                prop_assert!(*vi >= lo - 1e-12 && *vi <= hi + 1e-12);
            }
        }
    }
}
