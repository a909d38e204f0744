//! Association networks from pairwise MI.
//!
//! A [`MiGraph`] holds the MI of every unordered pair plus a mask of edges that
//! survive pruning. [`dpi_prune`] applies the data-processing-inequality
//! triplet rule: in every triplet, the edge that is strictly the weakest is
//! treated as an indirect association and dropped.

use std::fmt::Write as _;
use std::io::Read;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};

/// Weighted undirected graph on labelled nodes, stored as an upper triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct MiGraph {
    names: Vec<String>,
    weights: Vec<f64>,
    present: Vec<bool>,
}

fn pair_count(g: usize) -> usize {
    g * g.saturating_sub(1) / 2
}

impl MiGraph {
    /// Complete graph from row-major upper-triangle weights `(0,1), (0,2), ..., (G-2,G-1)`.
    pub fn from_upper_triangle(names: Vec<String>, weights: Vec<f64>) -> Result<Self> {
        let g = names.len();
        if weights.len() != pair_count(g) {
            return Err(invalid(format!(
                "{} weights for {g} nodes, expected {}",
                weights.len(),
                pair_count(g)
            )));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(invalid(format!("edge weight {w} must be finite and >= 0")));
        }
        let present = vec![true; weights.len()];
        Ok(Self {
            names,
            weights,
            present,
        })
    }

    /// Complete graph from a full G×G matrix, which must be symmetric with zero diagonal.
    pub fn from_matrix(names: Vec<String>, matrix: &[Vec<f64>]) -> Result<Self> {
        let g = names.len();
        if matrix.len() != g || matrix.iter().any(|r| r.len() != g) {
            return Err(invalid(format!("weight matrix must be {g}x{g}")));
        }
        let mut upper = Vec::with_capacity(pair_count(g));
        for i in 0..g {
            if matrix[i][i] != 0.0 {
                return Err(invalid(format!("diagonal entry {i} is nonzero")));
            }
            for j in i + 1..g {
                if matrix[i][j] != matrix[j][i] {
                    return Err(invalid(format!("weights ({i},{j}) and ({j},{i}) differ")));
                }
                upper.push(matrix[i][j]);
            }
        }
        Self::from_upper_triangle(names, upper)
    }

    fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        let g = self.names.len();
        i * (2 * g - i - 1) / 2 + (j - i - 1)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn n_nodes(&self) -> usize {
        self.names.len()
    }

    pub fn n_pairs(&self) -> usize {
        self.weights.len()
    }

    /// The estimated MI of a pair, regardless of pruning. Zero on the diagonal.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        if i == j {
            0.0
        } else {
            self.weights[self.index(i, j)]
        }
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && self.present[self.index(i, j)]
    }

    /// Weight if the edge survives, otherwise zero.
    pub fn effective_weight(&self, i: usize, j: usize) -> f64 {
        if self.has_edge(i, j) {
            self.weight(i, j)
        } else {
            0.0
        }
    }

    pub fn upper_triangle(&self) -> &[f64] {
        &self.weights
    }

    /// Surviving edges as `(i, j)` with `i < j`, in input order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let g = self.n_nodes();
        (0..g)
            .flat_map(move |i| (i + 1..g).map(move |j| (i, j)))
            .filter(|&(i, j)| self.has_edge(i, j))
    }

    pub fn n_edges(&self) -> usize {
        self.present.iter().filter(|&&p| p).count()
    }

    pub fn degree(&self, i: usize) -> usize {
        (0..self.n_nodes()).filter(|&j| self.has_edge(i, j)).count()
    }

    /// Same graph with nodes reordered: node `k` of the result is node `order[k]` here.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let g = self.n_nodes();
        let mut seen = vec![false; g];
        if order.len() != g || order.iter().any(|&o| o >= g || std::mem::replace(&mut seen[o], true)) {
            return Err(invalid("order is not a permutation of the nodes"));
        }
        let names = order.iter().map(|&o| self.names[o].clone()).collect();
        let mut weights = Vec::with_capacity(self.n_pairs());
        let mut present = Vec::with_capacity(self.n_pairs());
        for a in 0..g {
            for b in a + 1..g {
                weights.push(self.weight(order[a], order[b]));
                present.push(self.has_edge(order[a], order[b]));
            }
        }
        Ok(Self {
            names,
            weights,
            present,
        })
    }
}

/// Data-processing-inequality pruning over every triplet of the complete graph.
///
/// An edge is removed when some triplet contains it as the weakest edge by a
/// margin greater than `epsilon` against both others. All triplets are
/// examined against the input weights before anything is removed, so the
/// result does not depend on enumeration order. Ties are kept.
pub fn dpi_prune(graph: &MiGraph, epsilon: f64) -> Result<MiGraph> {
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(invalid(format!("epsilon must be finite and >= 0, got {epsilon}")));
    }
    let g = graph.n_nodes();
    let mut remove = vec![false; graph.n_pairs()];
    for i in 0..g {
        for j in i + 1..g {
            let wij = graph.weight(i, j);
            for k in j + 1..g {
                let wjk = graph.weight(j, k);
                let wik = graph.weight(i, k);
                if wij < wjk - epsilon && wij < wik - epsilon {
                    remove[graph.index(i, j)] = true;
                } else if wjk < wij - epsilon && wjk < wik - epsilon {
                    remove[graph.index(j, k)] = true;
                } else if wik < wij - epsilon && wik < wjk - epsilon {
                    remove[graph.index(i, k)] = true;
                }
            }
        }
    }
    let mut out = graph.clone();
    for (p, r) in out.present.iter_mut().zip(remove) {
        *p &= !r;
    }
    Ok(out)
}

/// Surviving edges by descending weight, ties broken by the (source, target) names.
pub fn nonzero_edges(graph: &MiGraph) -> Vec<(String, String, f64)> {
    let mut edges: Vec<(String, String, f64)> = graph
        .edges()
        .map(|(i, j)| {
            (
                graph.names[i].clone(),
                graph.names[j].clone(),
                graph.weight(i, j),
            )
        })
        .collect();
    edges.sort_by(|a, b| {
        b.2.total_cmp(&a.2)
            .then_with(|| a.0.cmp(&b.0))
            .then_with(|| a.1.cmp(&b.1))
    });
    edges
}

/// Nodes by descending degree in the surviving graph; equal degrees keep input order.
pub fn degree_ranking(graph: &MiGraph) -> Vec<(String, usize)> {
    let mut ranking: Vec<(String, usize)> = (0..graph.n_nodes())
        .map(|i| (graph.names[i].clone(), graph.degree(i)))
        .collect();
    ranking.sort_by_key(|r| std::cmp::Reverse(r.1));
    ranking
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    GraphMl,
    EdgeList,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dot" => Ok(ExportFormat::Dot),
            "graphml" => Ok(ExportFormat::GraphMl),
            "csv" | "edge-list" | "edgelist" => Ok(ExportFormat::EdgeList),
            _ => Err(invalid(format!("unknown graph format `{s}` (dot, graphml, csv)"))),
        }
    }
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
        .replace('\'', "&apos;")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Serializes the surviving edges. Weights are printed with six decimals.
///
/// DOT lists isolated nodes as bare statements so every node appears; GraphML
/// lists all nodes; the edge list has the header `source,target,mi`.
pub fn export_graph(graph: &MiGraph, format: ExportFormat) -> String {
    let mut out = String::new();
    match format {
        ExportFormat::Dot => {
            out.push_str("graph {\n");
            for (i, name) in graph.names.iter().enumerate() {
                if graph.degree(i) == 0 {
                    let _ = writeln!(out, "  {};", dot_quote(name));
                }
            }
            for (i, j) in graph.edges() {
                let _ = writeln!(
                    out,
                    "  {} -- {} [weight={:.6}];",
                    dot_quote(&graph.names[i]),
                    dot_quote(&graph.names[j]),
                    graph.weight(i, j)
                );
            }
            out.push_str("}\n");
        }
        ExportFormat::GraphMl => {
            out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
            out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
            out.push_str(
                "  <key id=\"mi\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n",
            );
            out.push_str("  <graph id=\"G\" edgedefault=\"undirected\">\n");
            for name in &graph.names {
                let _ = writeln!(out, "    <node id=\"{}\"/>", xml_escape(name));
            }
            for (i, j) in graph.edges() {
                let _ = writeln!(
                    out,
                    "    <edge source=\"{}\" target=\"{}\"><data key=\"mi\">{:.6}</data></edge>",
                    xml_escape(&graph.names[i]),
                    xml_escape(&graph.names[j]),
                    graph.weight(i, j)
                );
            }
            out.push_str("  </graph>\n</graphml>\n");
        }
        ExportFormat::EdgeList => {
            out.push_str("source,target,mi\n");
            for (i, j) in graph.edges() {
                let _ = writeln!(
                    out,
                    "{},{},{:.6}",
                    csv_field(&graph.names[i]),
                    csv_field(&graph.names[j]),
                    graph.weight(i, j)
                );
            }
        }
    }
    out
}

/// Reads an edge list written by [`export_graph`] back into a graph over `names`.
///
/// Pairs not listed get weight zero and are marked absent.
pub fn import_edge_list<R: Read>(reader: R, names: Vec<String>) -> Result<MiGraph> {
    let g = names.len();
    let mut graph = MiGraph::from_upper_triangle(names, vec![0.0; pair_count(g)])?;
    graph.present.iter_mut().for_each(|p| *p = false);
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["source", "target", "mi"] {
        return Err(Error::Format("edge list header must be source,target,mi".into()));
    }
    let lookup = |n: &str| {
        graph
            .names
            .iter()
            .position(|x| x == n)
            .ok_or_else(|| Error::Format(format!("unknown node `{n}`")))
    };
    let mut entries = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let (i, j) = (lookup(&rec[0])?, lookup(&rec[1])?);
        if i == j {
            return Err(Error::Format(format!("self loop on `{}`", &rec[0])));
        }
        let w: f64 = rec[2]
            .parse()
            .map_err(|_| Error::Format(format!("bad weight `{}`", &rec[2])))?;
        entries.push((i, j, w));
    }
    for (i, j, w) in entries {
        let idx = graph.index(i, j);
        graph.weights[idx] = w;
        graph.present[idx] = true;
    }
    Ok(graph)
}
