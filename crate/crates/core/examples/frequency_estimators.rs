//! Cell-frequency estimates for a small sample over many cells.

use entroshrink::freq::{estimate_bayes, estimate_ml, estimate_shrink, good_turing};
use entroshrink::{CountVector, PriorSpec};

fn main() -> entroshrink::Result<()> {
    let counts = CountVector::new(vec![4, 2, 1, 1, 0, 0, 0, 0, 0, 0])?;

    let show = |name: &str, f: &[f64]| {
        let cells: Vec<String> = f.iter().map(|x| format!("{x:.3}")).collect();
        println!("{name:<12} {}", cells.join(" "));
    };

    show("ml", estimate_ml(&counts)?.probs());
    for prior in PriorSpec::presets() {
        show(&prior.label(), estimate_bayes(&counts, &prior)?.probs());
    }
    show("good-turing", &good_turing(&counts)?);

    let s = estimate_shrink(&counts, None)?;
    show("shrink", s.freqs.probs());
    println!("shrinkage intensity {:.4}", s.lambda);
    Ok(())
}
