//! Prune a weighted graph with the triplet rule and export it.

use entroshrink::network::{degree_ranking, dpi_prune, export_graph, nonzero_edges, ExportFormat, MiGraph};

fn main() -> entroshrink::Result<()> {
    let names = ["x", "y", "z", "w"].map(String::from).to_vec();
    // upper triangle: xy, xz, xw, yz, yw, zw
    let g = MiGraph::from_upper_triangle(names, vec![0.5, 0.2, 0.05, 0.3, 0.4, 0.35])?;
    let pruned = dpi_prune(&g, 0.0)?;

    println!("{} of {} edges survive", pruned.n_edges(), g.n_pairs());
    for (s, t, w) in nonzero_edges(&pruned) {
        println!("  {s} - {t}  {w:.2}");
    }
    for (node, deg) in degree_ranking(&pruned) {
        println!("degree {node}: {deg}");
    }
    print!("{}", export_graph(&pruned, ExportFormat::Dot));
    Ok(())
}
