//! Galois-level oracle for the dual graph.
//!
//! Vertices are the elements of `G`; `γ ~ γ'` when `γ ∘ γ'⁻¹` is a
//! nontrivial element of a conjugate of some `⟨c_j⟩`. Mapping `γ` to the
//! orbital of `(1, γ(1))` and taking the quotient recovers the dual graph
//! exactly when the cover is Galois; otherwise connectivity of the quotient
//! implies connectivity of the fiber product.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::{FiberAnalysis, FiberError};
use crate::graphs::{Connectivity, Graph};
use crate::perm::Permutation;

pub const DEFAULT_ORDER_CAP: u128 = 10080;

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub group_order: u128,
    pub galois: bool,
    #[serde(skip)]
    pub element_graph: Graph,
    #[serde(skip)]
    pub quotient: Graph,
    pub quotient_edges: Vec<[usize; 2]>,
    pub dual_graph_edges: Vec<[usize; 2]>,
    pub quotient_connectivity: Connectivity,
    pub dual_connectivity: Connectivity,
    /// Edge sets coincide.
    pub edges_equal: bool,
    /// Every quotient edge is a dual-graph edge.
    pub quotient_subset_of_dual: bool,
}

impl OracleReport {
    /// The check the oracle supports: equality for Galois covers,
    /// connectivity implication otherwise.
    pub fn agrees(&self) -> bool {
        if self.galois {
            self.edges_equal
        } else {
            !self.quotient_connectivity.holds() || self.dual_connectivity.holds()
        }
    }
}

pub(super) fn run(analysis: &FiberAnalysis<'_>, cap: u128) -> Result<OracleReport, FiberError> {
    let group = analysis.group();
    let order = group.order();
    if order > cap {
        return Err(FiberError::OrderCapExceeded { order, cap });
    }
    let cover = analysis.cover();
    let elements = group.elements();
    let index: HashMap<&Permutation, usize> =
        elements.iter().enumerate().map(|(i, g)| (g, i)).collect();

    let mut connectors: BTreeSet<Permutation> = BTreeSet::new();
    for c in cover.branch_cycles() {
        let powers: Vec<Permutation> = (1..c.order()).map(|k| c.pow(k)).collect();
        for g in &elements {
            for p in &powers {
                connectors.insert(g.conjugate(p));
            }
        }
    }

    let mut element_graph = Graph::with_vertices(elements.len());
    for (i, gamma) in elements.iter().enumerate() {
        for s in &connectors {
            // γ ∘ γ'⁻¹ = s  ⇔  γ' = s⁻¹ ∘ γ
            let other = s.inverse().compose_unchecked(gamma);
            let j = index[&other];
            element_graph.add_edge(i, j).unwrap();
        }
    }

    let mut parts: Vec<Vec<usize>> = vec![Vec::new(); analysis.orbitals().len()];
    for (i, gamma) in elements.iter().enumerate() {
        parts[analysis.orbital_of(0, gamma.apply(0))].push(i);
    }
    let quotient = element_graph
        .quotient_by_partition(&parts)
        .expect("every orbital contains a pair (1, γ(1))");
    let dual = analysis.dual_graph();
    let quotient = quotient
        .relabel(dual.labels().to_vec())
        .expect("same vertex count");

    let q_edges: BTreeSet<(usize, usize)> = quotient.edges().collect();
    let d_edges: BTreeSet<(usize, usize)> = dual.edges().collect();
    Ok(OracleReport {
        group_order: order,
        galois: order == cover.degree() as u128,
        quotient_edges: q_edges.iter().map(|&(a, b)| [a, b]).collect(),
        dual_graph_edges: d_edges.iter().map(|&(a, b)| [a, b]).collect(),
        quotient_connectivity: quotient.is_connected(),
        dual_connectivity: dual.is_connected(),
        edges_equal: q_edges == d_edges,
        quotient_subset_of_dual: q_edges.is_subset(&d_edges),
        element_graph,
        quotient,
    })
}
