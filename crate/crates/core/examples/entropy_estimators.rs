//! Every entropy estimator on one undersampled draw, next to the true entropy.

use entroshrink::bench::{draw_counts, draw_true_freqs, ScenarioKind, ScenarioSpec};
use entroshrink::entropy::{entropy_plugin, EstimatorKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> entroshrink::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let scenario = ScenarioSpec::new(ScenarioKind::DirichletUniform, 1000)?;
    let theta = draw_true_freqs(&scenario, &mut rng)?;
    let counts = draw_counts(&theta, 100, &mut rng);

    println!("p = 1000, n = 100, {} cells observed", counts.nonzero_cells());
    println!("{:<16} {:.4}", "true", entropy_plugin(&theta));
    for est in EstimatorKind::standard_set() {
        println!("{:<16} {:.4}", est.label(), est.entropy(&counts)?);
    }
    Ok(())
}
