//! Multinomial cell-frequency estimators.
//!
//! Everything here works on a [`CountVector`] of observed cell counts
//! `y_1..y_p` and returns either a [`FrequencyVector`] (a point on the
//! probability simplex) or, for the shrinkage estimator, a
//! [`ShrinkageEstimate`] carrying the intensity that produced it.

use std::fmt;

use crate::error::{invalid, Error, Result};

/// Tolerance used when validating that a vector lies on the simplex.
pub const SIMPLEX_TOLERANCE: f64 = 1e-9;

/// Observed nonnegative cell counts with fixed, known dimension `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountVector {
    counts: Vec<u64>,
    total: u64,
    nonzero: usize,
    singletons: usize,
}

impl CountVector {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(invalid("count vector must have at least one cell"));
        }
        let total = counts.iter().sum();
        let nonzero = counts.iter().filter(|&&y| y > 0).count();
        let singletons = counts.iter().filter(|&&y| y == 1).count();
        Ok(Self {
            counts,
            total,
            nonzero,
            singletons,
        })
    }

    /// Parses signed values, rejecting negatives.
    pub fn from_signed(values: &[i64]) -> Result<Self> {
        let counts = values
            .iter()
            .map(|&v| u64::try_from(v).map_err(|_| invalid(format!("negative count {v}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(counts)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Number of cells `p`.
    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    /// Total count `n`.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of cells with a positive count.
    pub fn nonzero_cells(&self) -> usize {
        self.nonzero
    }

    /// Number of cells observed exactly once.
    pub fn singletons(&self) -> usize {
        self.singletons
    }

    fn require_total(&self, min: u64) -> Result<()> {
        if self.total < min {
            Err(invalid(format!(
                "need a total count of at least {min}, got {}",
                self.total
            )))
        } else {
            Ok(())
        }
    }
}

/// A point on the probability simplex. Entries may be exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyVector {
    probs: Vec<f64>,
}

impl FrequencyVector {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(invalid("frequency vector must be nonempty"));
        }
        if let Some(bad) = probs
            .iter()
            .find(|&&x| !x.is_finite() || !(0.0..=1.0 + SIMPLEX_TOLERANCE).contains(&x))
        {
            return Err(invalid(format!("frequency {bad} outside [0, 1]")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(invalid(format!("frequencies sum to {sum}, not 1")));
        }
        Ok(Self { probs })
    }

    /// The uniform (maximum entropy) distribution over `p` cells.
    pub fn uniform(p: usize) -> Result<Self> {
        if p == 0 {
            return Err(invalid("uniform distribution needs p >= 1"));
        }
        Ok(Self {
            probs: vec![1.0 / p as f64; p],
        })
    }

    // Callers guarantee the simplex invariant by construction.
    pub(crate) fn from_raw(probs: Vec<f64>) -> Self {
        debug_assert!(!probs.is_empty());
        Self { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.probs
    }
}

/// Dirichlet prior pseudocounts for the Bayes estimator.
#[derive(Debug, Clone, PartialEq)]
pub enum PriorSpec {
    /// The same pseudocount `a` for every cell.
    Symmetric(f64),
    /// One pseudocount per cell.
    PerCell(Vec<f64>),
    /// `a = 1/p` (Perks).
    Perks,
    /// `a = sqrt(n)/p` (minimax), with `n` taken from the counts at call time.
    Minimax,
}

impl PriorSpec {
    /// `a = 0`: reduces to maximum likelihood.
    pub const NONE: PriorSpec = PriorSpec::Symmetric(0.0);
    /// `a = 1/2` (Jeffreys).
    pub const JEFFREYS: PriorSpec = PriorSpec::Symmetric(0.5);
    /// `a = 1` (Bayes-Laplace uniform prior).
    pub const LAPLACE: PriorSpec = PriorSpec::Symmetric(1.0);

    /// The four non-trivial presets: Jeffreys, Laplace, Perks, minimax.
    pub fn presets() -> [PriorSpec; 4] {
        [
            Self::JEFFREYS,
            Self::LAPLACE,
            PriorSpec::Perks,
            PriorSpec::Minimax,
        ]
    }

    /// Resolves the per-cell pseudocounts for a `p`-cell table with total count `n`.
    pub fn pseudocounts(&self, p: usize, n: u64) -> Result<Vec<f64>> {
        let a = match self {
            PriorSpec::Symmetric(a) => vec![*a; p],
            PriorSpec::PerCell(a) => {
                if a.len() != p {
                    return Err(invalid(format!(
                        "prior has {} pseudocounts for {p} cells",
                        a.len()
                    )));
                }
                a.clone()
            }
            PriorSpec::Perks => vec![1.0 / p as f64; p],
            PriorSpec::Minimax => vec![(n as f64).sqrt() / p as f64; p],
        };
        if let Some(bad) = a.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(invalid(format!("pseudocount {bad} must be finite and >= 0")));
        }
        Ok(a)
    }

    /// Stable short label, used in reports and parsed back by the CLI.
    pub fn label(&self) -> String {
        match self {
            PriorSpec::Symmetric(a) if *a == 0.5 => "jeffreys".into(),
            PriorSpec::Symmetric(a) if *a == 1.0 => "laplace".into(),
            PriorSpec::Symmetric(a) => format!("a={a}"),
            PriorSpec::PerCell(_) => "per-cell".into(),
            PriorSpec::Perks => "perks".into(),
            PriorSpec::Minimax => "minimax".into(),
        }
    }
}

impl fmt::Display for PriorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl std::str::FromStr for PriorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let spec = match s.to_ascii_lowercase().as_str() {
            "jeffreys" | "1/2" => Self::JEFFREYS,
            "laplace" => Self::LAPLACE,
            "perks" | "1/p" => PriorSpec::Perks,
            "minimax" | "sqrt(n)/p" => PriorSpec::Minimax,
            "none" => Self::NONE,
            other => {
                let a: f64 = other
                    .strip_prefix("a=")
                    .unwrap_or(other)
                    .parse()
                    .map_err(|_| invalid(format!("unknown prior `{s}`")))?;
                if !a.is_finite() || a < 0.0 {
                    return Err(invalid(format!("pseudocount {a} must be finite and >= 0")));
                }
                PriorSpec::Symmetric(a)
            }
        };
        Ok(spec)
    }
}

/// Shrunk frequencies together with the intensity and target that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct ShrinkageEstimate {
    pub freqs: FrequencyVector,
    pub lambda: f64,
    pub target: FrequencyVector,
}

/// Maximum likelihood frequencies `y_k / n`.
pub fn estimate_ml(counts: &CountVector) -> Result<FrequencyVector> {
    counts.require_total(1)?;
    let n = counts.total() as f64;
    Ok(FrequencyVector::from_raw(
        counts.counts().iter().map(|&y| y as f64 / n).collect(),
    ))
}

/// Dirichlet posterior mean `(y_k + a_k) / (n + A)`.
pub fn estimate_bayes(counts: &CountVector, prior: &PriorSpec) -> Result<FrequencyVector> {
    let a = prior.pseudocounts(counts.dim(), counts.total())?;
    let big_a: f64 = a.iter().sum();
    let denom = counts.total() as f64 + big_a;
    if denom <= 0.0 {
        return Err(invalid("Bayes estimate needs n + A > 0"));
    }
    Ok(FrequencyVector::from_raw(
        counts
            .counts()
            .iter()
            .zip(&a)
            .map(|(&y, &ak)| (y as f64 + ak) / denom)
            .collect(),
    ))
}

/// Unbiased per-cell variance estimate of the ML frequencies, `t(1-t)/(n-1)`.
pub fn ml_variance(counts: &CountVector) -> Result<Vec<f64>> {
    counts.require_total(2)?;
    let ml = estimate_ml(counts)?;
    let nm1 = (counts.total() - 1) as f64;
    Ok(ml.probs().iter().map(|&t| t * (1.0 - t) / nm1).collect())
}

fn check_target(counts: &CountVector, target: &FrequencyVector) -> Result<()> {
    if target.dim() != counts.dim() {
        return Err(invalid(format!(
            "target has {} cells, counts have {}",
            target.dim(),
            counts.dim()
        )));
    }
    Ok(())
}

/// Closed-form estimate of the optimal shrinkage intensity toward a fixed target.
///
/// `λ = (1 - Σ t_ml²) / ((n-1) Σ (t_k - t_ml)²)`, truncated at 1. When the ML
/// estimate already equals the target the denominator vanishes and `λ = 1`.
pub fn shrinkage_lambda(counts: &CountVector, target: &FrequencyVector) -> Result<f64> {
    counts.require_total(2)?;
    check_target(counts, target)?;
    let ml = estimate_ml(counts)?;
    let sum_sq: f64 = ml.probs().iter().map(|t| t * t).sum();
    let gap_sq: f64 = target
        .probs()
        .iter()
        .zip(ml.probs())
        .map(|(t, m)| (t - m) * (t - m))
        .sum();
    if gap_sq == 0.0 {
        return Ok(1.0);
    }
    let raw = (1.0 - sum_sq) / ((counts.total() - 1) as f64 * gap_sq);
    Ok(raw.clamp(0.0, 1.0))
}

/// Shrinkage estimate with the data-driven intensity. `None` means the uniform target.
pub fn estimate_shrink(
    counts: &CountVector,
    target: Option<&FrequencyVector>,
) -> Result<ShrinkageEstimate> {
    let target = match target {
        Some(t) => t.clone(),
        None => FrequencyVector::uniform(counts.dim())?,
    };
    let lambda = shrinkage_lambda(counts, &target)?;
    shrink_with_lambda(counts, target, lambda)
}

/// Shrinkage estimate with a caller-chosen intensity in `[0, 1]`.
pub fn estimate_shrink_with_lambda(
    counts: &CountVector,
    target: Option<&FrequencyVector>,
    lambda: f64,
) -> Result<ShrinkageEstimate> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Domain(format!("shrinkage intensity {lambda} outside [0, 1]")));
    }
    let target = match target {
        Some(t) => {
            check_target(counts, t)?;
            t.clone()
        }
        None => FrequencyVector::uniform(counts.dim())?,
    };
    shrink_with_lambda(counts, target, lambda)
}

fn shrink_with_lambda(
    counts: &CountVector,
    target: FrequencyVector,
    lambda: f64,
) -> Result<ShrinkageEstimate> {
    let ml = estimate_ml(counts)?;
    let freqs = target
        .probs()
        .iter()
        .zip(ml.probs())
        .map(|(&t, &m)| lambda * t + (1.0 - lambda) * m)
        .collect();
    Ok(ShrinkageEstimate {
        freqs: FrequencyVector::from_raw(freqs),
        lambda,
        target,
    })
}

/// Dirichlet prior mass `A = n λ / (1 - λ)` equivalent to shrinkage with intensity `λ`.
///
/// With `a_k = t_k A` the Bayes posterior mean reproduces the shrinkage estimate.
pub fn shrink_to_bayes_a(counts: &CountVector, lambda: f64) -> Result<f64> {
    if lambda == 1.0 {
        return Err(Error::Domain(
            "lambda = 1 corresponds to an infinite prior mass".into(),
        ));
    }
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::Domain(format!("lambda {lambda} outside [0, 1)")));
    }
    Ok(counts.total() as f64 * lambda / (1.0 - lambda))
}

/// First-order approximation `A ≈ n λ` (the pseudo-Bayes prior mass).
pub fn pseudo_bayes_a(counts: &CountVector, lambda: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Domain(format!("lambda {lambda} outside [0, 1]")));
    }
    Ok(counts.total() as f64 * lambda)
}

/// Good-Turing corrected frequencies `(1 - m_1/n) y_k/n`.
///
/// Not normalized: the entries sum to `1 - m_1/n`.
pub fn good_turing(counts: &CountVector) -> Result<Vec<f64>> {
    let ml = estimate_ml(counts)?;
    let factor = 1.0 - counts.singletons() as f64 / counts.total() as f64;
    Ok(ml.into_vec().into_iter().map(|t| factor * t).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cv(y: &[u64]) -> CountVector {
        CountVector::new(y.to_vec()).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn count_vector_derived_fields() {
        let c = cv(&[0, 1, 3, 1, 0]);
        assert_eq!(c.total(), 5);
        assert_eq!(c.nonzero_cells(), 3);
        assert_eq!(c.singletons(), 2);
        assert!(CountVector::new(vec![]).is_err());
        assert!(CountVector::from_signed(&[-1, 2]).is_err());
    }

    #[test]
    fn ml_examples() {
        close(estimate_ml(&cv(&[4, 6])).unwrap().probs(), &[0.4, 0.6], 1e-15);
        close(estimate_ml(&cv(&[0, 0, 10])).unwrap().probs(), &[0.0, 0.0, 1.0], 0.0);
        close(estimate_ml(&cv(&[1, 1, 1, 1])).unwrap().probs(), &[0.25; 4], 0.0);
        assert!(matches!(estimate_ml(&cv(&[0, 0])), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn bayes_examples() {
        let f = estimate_bayes(&cv(&[0, 2]), &PriorSpec::JEFFREYS).unwrap();
        close(f.probs(), &[0.5 / 3.0, 2.5 / 3.0], 1e-15);
        let f = estimate_bayes(&cv(&[4, 6]), &PriorSpec::NONE).unwrap();
        close(f.probs(), &[0.4, 0.6], 1e-15);
        let f = estimate_bayes(&cv(&[0, 0]), &PriorSpec::LAPLACE).unwrap();
        close(f.probs(), &[0.5, 0.5], 0.0);
        assert!(estimate_bayes(&cv(&[0, 0]), &PriorSpec::NONE).is_err());
    }

    #[test]
    fn bayes_presets_resolve() {
        let c = cv(&[9, 0, 0, 0]);
        assert_eq!(PriorSpec::Perks.pseudocounts(4, 9).unwrap(), vec![0.25; 4]);
        assert_eq!(PriorSpec::Minimax.pseudocounts(4, 9).unwrap(), vec![0.75; 4]);
        let f = estimate_bayes(&c, &PriorSpec::Minimax).unwrap();
        close(f.probs(), &[9.75 / 12.0, 0.75 / 12.0, 0.75 / 12.0, 0.75 / 12.0], 1e-15);
        assert!(PriorSpec::PerCell(vec![1.0]).pseudocounts(2, 1).is_err());
        assert!(PriorSpec::Symmetric(-1.0).pseudocounts(2, 1).is_err());
        assert!(estimate_bayes(&c, &PriorSpec::PerCell(vec![1.0, 0.0, 0.0, 0.0]))
            .unwrap()
            .probs()[0]
            == 1.0);
    }

    #[test]
    fn prior_parsing() {
        assert_eq!("jeffreys".parse::<PriorSpec>().unwrap(), PriorSpec::JEFFREYS);
        assert_eq!("0.5".parse::<PriorSpec>().unwrap(), PriorSpec::JEFFREYS);
        assert_eq!("1/p".parse::<PriorSpec>().unwrap(), PriorSpec::Perks);
        assert_eq!("a=2".parse::<PriorSpec>().unwrap(), PriorSpec::Symmetric(2.0));
        assert!("-3".parse::<PriorSpec>().is_err());
        assert!("bogus".parse::<PriorSpec>().is_err());
    }

    #[test]
    fn ml_variance_examples() {
        close(&ml_variance(&cv(&[5, 5])).unwrap(), &[0.25 / 9.0; 2], 1e-15);
        close(&ml_variance(&cv(&[10, 0])).unwrap(), &[0.0, 0.0], 0.0);
        close(&ml_variance(&cv(&[1, 1])).unwrap(), &[0.25, 0.25], 0.0);
        assert!(ml_variance(&cv(&[1, 0])).is_err());
    }

    #[test]
    fn lambda_examples() {
        let u = FrequencyVector::uniform(2).unwrap();
        let l = shrinkage_lambda(&cv(&[8, 2]), &u).unwrap();
        assert!((l - 0.197530864).abs() < 1e-6);
        assert_eq!(shrinkage_lambda(&cv(&[3, 1]), &u).unwrap(), 1.0);
        assert_eq!(shrinkage_lambda(&cv(&[5, 5]), &u).unwrap(), 1.0);
        assert!(shrinkage_lambda(&cv(&[1, 0]), &u).is_err());
        assert!(shrinkage_lambda(&cv(&[1, 4, 0]), &u).is_err());
    }

    #[test]
    fn shrink_examples() {
        let e = estimate_shrink(&cv(&[8, 2]), None).unwrap();
        assert!((e.lambda - 0.197531).abs() < 1e-6);
        close(e.freqs.probs(), &[0.740741, 0.259259], 1e-6);
        let e = estimate_shrink(&cv(&[5, 5]), None).unwrap();
        assert_eq!(e.lambda, 1.0);
        close(e.freqs.probs(), &[0.5, 0.5], 0.0);
        let c = cv(&[3, 0, 7, 1]);
        let e = estimate_shrink_with_lambda(&c, None, 0.0).unwrap();
        assert_eq!(e.freqs, estimate_ml(&c).unwrap());
        assert!(estimate_shrink_with_lambda(&c, None, 1.5).is_err());
    }

    #[test]
    fn shrink_with_custom_target() {
        let t = FrequencyVector::new(vec![0.7, 0.2, 0.1]).unwrap();
        let c = cv(&[0, 5, 5]);
        let e = estimate_shrink(&c, Some(&t)).unwrap();
        for k in 0..3 {
            let ml = c.counts()[k] as f64 / 10.0;
            assert_eq!(e.freqs.probs()[k], e.lambda * t.probs()[k] + (1.0 - e.lambda) * ml);
        }
    }

    #[test]
    fn bayes_mass_examples() {
        let c10 = cv(&[5, 5]);
        let c9 = cv(&[7, 2]);
        assert_eq!(shrink_to_bayes_a(&c10, 0.5).unwrap(), 10.0);
        assert_eq!(shrink_to_bayes_a(&c10, 0.0).unwrap(), 0.0);
        assert!((shrink_to_bayes_a(&c9, 0.197531).unwrap() - 2.215385).abs() < 1e-5);
        assert!(matches!(shrink_to_bayes_a(&c10, 1.0), Err(Error::Domain(_))));
        assert_eq!(pseudo_bayes_a(&c10, 0.5).unwrap(), 5.0);
        assert_eq!(pseudo_bayes_a(&c10, 0.0).unwrap(), 0.0);
        assert!((pseudo_bayes_a(&c9, 0.197531).unwrap() - 1.777779).abs() < 1e-6);
    }

    #[test]
    fn good_turing_examples() {
        close(&good_turing(&cv(&[2, 1])).unwrap(), &[4.0 / 9.0, 2.0 / 9.0], 1e-15);
        close(&good_turing(&cv(&[5, 5])).unwrap(), &[0.5, 0.5], 0.0);
        close(&good_turing(&cv(&[1, 1])).unwrap(), &[0.0, 0.0], 0.0);
        assert!(good_turing(&cv(&[0])).is_err());
    }

    fn counts_strategy() -> impl Strategy<Value = Vec<u64>> {
        prop::collection::vec(0u64..50, 1..1000)
            .prop_filter("need n >= 2", |v| v.iter().sum::<u64>() >= 2)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn estimates_stay_on_simplex(y in counts_strategy()) {
            let c = CountVector::new(y).unwrap();
            let ests = [
                estimate_ml(&c).unwrap(),
                estimate_bayes(&c, &PriorSpec::JEFFREYS).unwrap(),
                estimate_bayes(&c, &PriorSpec::Minimax).unwrap(),
                estimate_shrink(&c, None).unwrap().freqs,
            ];
            for f in &ests {
                let s: f64 = f.probs().iter().sum();
                prop_assert!((s - 1.0).abs() <= 1e-12);
                prop_assert!(f.probs().iter().all(|&x| x >= 0.0));
            }
        }

        #[test]
        fn lambda_in_unit_interval(y in counts_strategy()) {
            let c = CountVector::new(y).unwrap();
            let l = shrinkage_lambda(&c, &FrequencyVector::uniform(c.dim()).unwrap()).unwrap();
            prop_assert!((0.0..=1.0).contains(&l));
        }

        #[test]
        fn shrinkage_matches_equivalent_bayes(y in counts_strategy(), lambda in 0.0f64..0.999) {
            let c = CountVector::new(y).unwrap();
            let t = FrequencyVector::uniform(c.dim()).unwrap();
            let s = estimate_shrink_with_lambda(&c, Some(&t), lambda).unwrap();
            let a = shrink_to_bayes_a(&c, lambda).unwrap();
            let prior = PriorSpec::PerCell(t.probs().iter().map(|tk| tk * a).collect());
            let b = estimate_bayes(&c, &prior).unwrap();
            for (x, y) in s.freqs.probs().iter().zip(b.probs()) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
        }

        #[test]
        fn endpoints(y in counts_strategy()) {
            let c = CountVector::new(y).unwrap();
            let t = FrequencyVector::uniform(c.dim()).unwrap();
            let s0 = estimate_shrink_with_lambda(&c, Some(&t), 0.0).unwrap();
            prop_assert_eq!(s0.freqs, estimate_ml(&c).unwrap());
            let s1 = estimate_shrink_with_lambda(&c, Some(&t), 1.0).unwrap();
            prop_assert_eq!(s1.freqs, t);
        }
    }
}
