//! James-Stein estimators of a normal mean, and their simulated risk.

use entroshrink::shrinkage::{js_mean_target, js_zero_target, simulate_risk, NormalMeanSample};

fn main() -> entroshrink::Result<()> {
    let x = NormalMeanSample::new(vec![1.2, -0.4, 0.8, 2.1, -1.0, 0.3])?;
    println!("observed     {:?}", x.values());
    println!("zero target  {:.3?}", js_zero_target(&x)?);
    let (est, lambda) = js_mean_target(&x)?;
    println!("mean target  {est:.3?} (lambda {lambda:.3})");

    println!("\n  mu    ml    js0    js-mean");
    for mu in [0.0, 0.5, 1.0, 2.0, 4.0] {
        let r = simulate_risk(&[mu; 10], 20_000, 1)?;
        println!(
            "{mu:>4.1} {:>6.3} {:>6.3} {:>6.3}",
            r.ml,
            r.zero_target,
            r.mean_target.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
