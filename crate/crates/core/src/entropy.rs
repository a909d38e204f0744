//! Entropy estimators (natural log).

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::freq::{
    estimate_bayes, estimate_ml, estimate_shrink, good_turing, CountVector, FrequencyVector,
    PriorSpec, ShrinkageEstimate,
};

/// Shannon entropy `-Σ θ log θ` with `0 log 0 = 0`.
pub fn entropy_plugin(freqs: &FrequencyVector) -> f64 {
    plugin(freqs.probs())
}

fn plugin(probs: &[f64]) -> f64 {
    -probs
        .iter()
        .filter(|&&t| t > 0.0)
        .map(|&t| t * t.ln())
        .sum::<f64>()
}

pub fn entropy_ml(counts: &CountVector) -> Result<f64> {
    Ok(entropy_plugin(&estimate_ml(counts)?))
}

/// The Miller-Madow bias correction `(m_{>0} - 1) / (2n)`.
pub fn miller_madow_correction(counts: &CountVector) -> Result<f64> {
    if counts.total() == 0 {
        return Err(invalid("Miller-Madow needs n >= 1"));
    }
    Ok((counts.nonzero_cells() as f64 - 1.0) / (2.0 * counts.total() as f64))
}

/// ML plugin entropy plus the Miller-Madow correction. Not clamped to `log p`.
pub fn entropy_miller_madow(counts: &CountVector) -> Result<f64> {
    Ok(entropy_ml(counts)? + miller_madow_correction(counts)?)
}

pub fn entropy_bayes(counts: &CountVector, prior: &PriorSpec) -> Result<f64> {
    Ok(entropy_plugin(&estimate_bayes(counts, prior)?))
}

/// Chao-Shen estimator: Good-Turing coverage correction with Horvitz-Thompson weights.
///
/// When every observation is a singleton the coverage estimate would be zero;
/// the singleton count is then taken as `n - 1`.
pub fn entropy_chao_shen(counts: &CountVector) -> Result<f64> {
    let n = counts.total();
    if n == 0 {
        return Err(invalid("Chao-Shen needs n >= 1"));
    }
    let gt = if counts.singletons() as u64 == n {
        let m1 = n.saturating_sub(1) as f64;
        let factor = 1.0 - m1 / n as f64;
        estimate_ml(counts)?
            .into_vec()
            .into_iter()
            .map(|t| factor * t)
            .collect()
    } else {
        good_turing(counts)?
    };
    let n = n as f64;
    let h = gt
        .iter()
        .zip(counts.counts())
        .filter(|(_, &y)| y > 0)
        .map(|(&t, _)| {
            let inclusion = -(n * (-t).ln_1p()).exp_m1();
            t * t.ln() / inclusion
        })
        .sum::<f64>();
    Ok(-h)
}

/// Plugin entropy of the shrinkage frequencies (uniform target), plus those frequencies.
pub fn entropy_shrink(counts: &CountVector) -> Result<(f64, ShrinkageEstimate)> {
    let est = estimate_shrink(counts, None)?;
    Ok((entropy_plugin(&est.freqs), est))
}

/// Which entropy estimator to apply to a count vector.
#[derive(Debug, Clone, PartialEq)]
pub enum EstimatorKind {
    Ml,
    MillerMadow,
    Bayes(PriorSpec),
    ChaoShen,
    Shrink,
}

impl EstimatorKind {
    /// The eight estimators of the standard comparison.
    pub fn standard_set() -> Vec<EstimatorKind> {
        let mut v = vec![EstimatorKind::Ml, EstimatorKind::MillerMadow];
        v.extend(PriorSpec::presets().into_iter().map(EstimatorKind::Bayes));
        v.push(EstimatorKind::ChaoShen);
        v.push(EstimatorKind::Shrink);
        v
    }

    /// Whether the estimator yields a compatible frequency vector.
    pub fn produces_frequencies(&self) -> bool {
        !matches!(self, EstimatorKind::MillerMadow | EstimatorKind::ChaoShen)
    }

    /// Frequency estimate, for the kinds that have one.
    pub fn frequencies(&self, counts: &CountVector) -> Result<FrequencyVector> {
        match self {
            EstimatorKind::Ml => estimate_ml(counts),
            EstimatorKind::Bayes(prior) => estimate_bayes(counts, prior),
            EstimatorKind::Shrink => Ok(estimate_shrink(counts, None)?.freqs),
            EstimatorKind::MillerMadow | EstimatorKind::ChaoShen => Err(
                Error::UnsupportedEstimator(format!("{self} does not estimate cell frequencies")),
            ),
        }
    }

    pub fn entropy(&self, counts: &CountVector) -> Result<f64> {
        match self {
            EstimatorKind::Ml => entropy_ml(counts),
            EstimatorKind::MillerMadow => entropy_miller_madow(counts),
            EstimatorKind::Bayes(prior) => entropy_bayes(counts, prior),
            EstimatorKind::ChaoShen => entropy_chao_shen(counts),
            EstimatorKind::Shrink => Ok(entropy_shrink(counts)?.0),
        }
    }

    pub fn label(&self) -> String {
        match self {
            EstimatorKind::Ml => "ml".into(),
            EstimatorKind::MillerMadow => "miller-madow".into(),
            EstimatorKind::Bayes(p) => format!("bayes-{}", p.label()),
            EstimatorKind::ChaoShen => "chao-shen".into(),
            EstimatorKind::Shrink => "shrink".into(),
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    /// Accepts `ml`, `miller-madow`/`mm`, `chao-shen`/`cs`, `shrink`, and
    /// `bayes-<prior>` or `bayes:<prior>` where `<prior>` is anything
    /// [`PriorSpec`] parses.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        Ok(match lower.as_str() {
            "ml" => EstimatorKind::Ml,
            "miller-madow" | "mm" => EstimatorKind::MillerMadow,
            "chao-shen" | "cs" => EstimatorKind::ChaoShen,
            "shrink" | "js" => EstimatorKind::Shrink,
            other => match other
                .strip_prefix("bayes-")
                .or_else(|| other.strip_prefix("bayes:"))
            {
                Some(prior) => EstimatorKind::Bayes(prior.parse()?),
                None => return Err(invalid(format!("unknown estimator `{s}`"))),
            },
        })
    }
}
