use std::path::Path;

use dmac_core::analysis::{build_oracle, component_labels, measure_girth, structure_checks, GraphOracle};
use dmac_core::kat::run_kat;
use petgraph::algo::{connected_components, dijkstra, is_bipartite_undirected};
use petgraph::graph::{NodeIndex, UnGraph};

fn to_petgraph(o: &GraphOracle) -> UnGraph<(), ()> {
    let mut g = UnGraph::new_undirected();
    let nodes: Vec<NodeIndex> = (0..o.vertex_count()).map(|_| g.add_node(())).collect();
    for (u, ns) in o.adjacency().iter().enumerate() {
        for &v in ns {
            if u < v as usize {
                g.add_edge(nodes[u], nodes[v as usize], ());
            }
        }
    }
    g
}

/// Shortest cycle through each edge: remove it, then find the shortest path
/// between its ends.
fn girth_by_edge_removal(o: &GraphOracle) -> Option<usize> {
    let g = to_petgraph(o);
    let mut best = None;
    for e in g.edge_indices() {
        let (a, b) = g.edge_endpoints(e).unwrap();
        let mut h = g.clone();
        h.remove_edge(e);
        let d = dijkstra(&h, a, Some(b), |_| 1usize);
        if let Some(&len) = d.get(&b) {
            best = Some(best.map_or(len + 1, |x: usize| x.min(len + 1)));
        }
    }
    best
}

#[test]
fn components_match_petgraph() {
    for (n, q) in [(2, 3), (3, 3), (4, 3), (5, 2), (6, 2), (7, 2), (3, 5)] {
        let o = build_oracle(n, q).unwrap();
        let g = to_petgraph(&o);
        assert_eq!(component_labels(&o).1, connected_components(&g), "D({n},{q})");
        assert_eq!(structure_checks(&o).edges, g.edge_count());
        assert!(is_bipartite_undirected(&g, NodeIndex::new(0)));
    }
}

#[test]
fn girth_matches_edge_removal() {
    for (n, q) in [(2, 3), (3, 3), (2, 5), (4, 3), (6, 2)] {
        let o = build_oracle(n, q).unwrap();
        assert_eq!(measure_girth(&o), girth_by_edge_removal(&o), "D({n},{q})");
    }
}

#[test]
fn disconnected_for_larger_n() {
    let r = structure_checks(&build_oracle(6, 2).unwrap());
    assert!(r.components > 1);
    let r = structure_checks(&build_oracle(3, 3).unwrap());
    assert_eq!(r.components, 1);
}

#[test]
fn shipped_vectors() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../vectors/seed.toml");
    let outcomes = run_kat(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(outcomes.len(), 2);
    for o in outcomes {
        assert!(o.passed(), "{o}");
    }
}
