//! A reduced Monte Carlo comparison of the entropy estimators.

use entroshrink::bench::{run_bench, write_report, BenchConfig};

fn main() -> entroshrink::Result<()> {
    let config = BenchConfig {
        sample_sizes: vec![10, 100, 1000],
        runs: 50,
        ..BenchConfig::standard(42)?
    };
    let result = run_bench(&config)?;

    for s in &config.scenarios {
        let label = s.label();
        println!("{label}");
        for &n in &config.sample_sizes {
            let mut row = format!("  n={n:<5}");
            for e in &config.estimators {
                let c = result.cell(&label, n, &e.label()).unwrap();
                row.push_str(&format!(" {}={:.3}", e.label(), c.entropy_mse));
            }
            println!("{row}");
        }
    }
    let report = write_report(&result);
    println!("report: {} lines", report.lines().count());
    Ok(())
}
