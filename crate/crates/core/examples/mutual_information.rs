//! Discretize a small expression matrix and estimate pairwise MI.

use entroshrink::mi::{self, ExpressionMatrix};
use entroshrink::EstimatorKind;

const DATA: &str = "\
gene,s1,s2,s3,s4,s5,s6,s7,s8,s9,s10
a,0.1,0.9,1.8,0.2,1.1,1.9,0.3,0.8,2.0,0.1
b,0.2,1.0,1.7,0.1,0.9,2.1,0.4,1.1,1.9,0.3
c,1.5,0.2,0.9,1.8,0.4,0.7,2.0,0.1,1.2,0.6
";

fn main() -> entroshrink::Result<()> {
    let m = ExpressionMatrix::from_csv(DATA.as_bytes(), true)?;
    let scheme = mi::DiscretizationScheme::for_matrix(&m, 3)?;
    let d = mi::discretize(&m, &scheme);
    for (name, row) in m.names().iter().zip(&d.rows) {
        println!("{name}: {row:?}");
    }

    for est in [EstimatorKind::Ml, EstimatorKind::Shrink] {
        let g = mi::mi_all_pairs(&m, &scheme, &est)?;
        println!(
            "{:<7} a-b {:.4}  a-c {:.4}  b-c {:.4}",
            est.label(),
            g.weight(0, 1),
            g.weight(0, 2),
            g.weight(1, 2)
        );
    }
    println!("gaussian MI at rho = 0.9: {:.4}", mi::gaussian_mi(0.9)?);
    Ok(())
}
