//! # entroshrink
//!
//! Entropy and mutual information estimation for small-sample count data.
//!
//! The centerpiece is a James-Stein-type shrinkage estimator of multinomial
//! cell frequencies: the ML frequencies `y_k / n` are pulled toward a target
//! (by default the uniform distribution) with an intensity `λ` computed in
//! closed form from the data. Plugging the shrunk frequencies into the
//! Shannon formula gives an entropy estimate that behaves well even when
//! `n` is far smaller than the number of cells `p`.
//!
//! Reference estimators are provided alongside it for comparison:
//! maximum likelihood, Miller-Madow, Dirichlet-Bayes with the usual
//! pseudocount presets, and Chao-Shen.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`freq`] | count vectors, frequency estimators, shrinkage intensity |
//! | [`entropy`] | plugin, Miller-Madow, Bayes, Chao-Shen, shrinkage entropy |
//! | [`shrinkage`] | generic shrinkage recipe, normal-mean James-Stein estimators |
//! | [`mi`] | discretization, contingency tables, pairwise MI |
//! | [`network`] | data-processing-inequality pruning, DOT/GraphML/CSV export |
//! | [`bench`] | Monte Carlo comparison of estimators |
//! | [`cli`] | the `entroshrink` command line |
//!
//! All entropies are in nats.
//!
//! ```
//! use entroshrink::{entropy, freq::CountVector};
//!
//! let counts = CountVector::new(vec![8, 2]).unwrap();
//! let (h, est) = entropy::entropy_shrink(&counts).unwrap();
//! assert!((est.lambda - 0.197531).abs() < 1e-6);
//! assert!(h > entropy::entropy_ml(&counts).unwrap());
//! ```
//!
//! Runnable walkthroughs live in `examples/`; `cargo run --example <name>`.

pub mod bench;
pub mod cli;
pub mod entropy;
mod error;
pub mod freq;
pub mod mi;
pub mod network;
pub mod shrinkage;

pub use entropy::EstimatorKind;
pub use error::{Error, Result};
pub use freq::{CountVector, FrequencyVector, PriorSpec, ShrinkageEstimate};
