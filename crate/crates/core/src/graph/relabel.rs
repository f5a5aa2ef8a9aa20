use super::{build_geometric_graph, graph_bandwidth, Permutation, Realization};
use std::cmp::Ordering;

/// Labels vertices in increasing order of their x-coordinate, breaking ties
/// by y, then z, then by original label.
pub fn vertex_relabel(x: &Realization) -> Permutation {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| {
        x.position(a)
            .iter()
            .zip(x.position(b))
            .map(|(ca, cb)| ca.total_cmp(cb))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
    });
    let mut map = vec![0; order.len()];
    for (new, &old) in order.iter().enumerate() {
        map[old] = new;
    }
    Permutation::new(map).expect("sorted order is a permutation")
}

/// Bandwidth of the geometric graph of `x` after [`vertex_relabel`].
pub fn phi_of_relabeling(x: &Realization) -> usize {
    let g = build_geometric_graph(x);
    let p = vertex_relabel(x);
    graph_bandwidth(&p.permute_graph(&g).expect("sizes agree"))
}
