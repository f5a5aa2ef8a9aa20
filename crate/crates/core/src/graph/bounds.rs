//! Bandwidth bounds: the sliding-strip count bound, the diameter bound, and
//! an exhaustive minimal-bandwidth oracle for small graphs.

use super::{bfs, GraphError, GraphResult, Realization, WsnGraph};

/// Largest vertex count accepted by [`min_bandwidth_bruteforce`].
pub const BRUTEFORCE_MAX_VERTICES: usize = 9;

/// For each point (in increasing x order), the window start `a = x` and the
/// number of points with x-coordinate in the closed strip `[a, a + r]`.
pub fn strip_count_process(x: &Realization) -> Vec<(f64, usize)> {
    let mut xs = x.x_coords();
    xs.sort_by(f64::total_cmp);
    strip_counts_sorted(&xs, x.radius())
}

fn strip_counts_sorted(xs: &[f64], r: f64) -> Vec<(f64, usize)> {
    let mut out = Vec::with_capacity(xs.len());
    let (mut lo, mut hi) = (0, 0);
    for &a in xs {
        while xs[lo] < a {
            lo += 1;
        }
        while hi < xs.len() && xs[hi] - a <= r {
            hi += 1;
        }
        out.push((a, hi - lo));
    }
    out
}

/// Maximum number of points whose x-coordinate lies in any closed strip of
/// width `r`, for x-coordinates already sorted ascending. Zero for no points.
pub fn scan_statistic_sorted(xs: &[f64], r: f64) -> usize {
    debug_assert!(xs.windows(2).all(|w| w[0] <= w[1]));
    let mut best = 0;
    let mut hi = 0;
    for (lo, &a) in xs.iter().enumerate() {
        while hi < xs.len() && xs[hi] - a <= r {
            hi += 1;
        }
        best = best.max(hi - lo);
    }
    best
}

/// Upper bound on the bandwidth reached by vertex relabeling: the largest
/// number of points inside any x-strip of width equal to the sensing radius.
pub fn phi_max(x: &Realization) -> usize {
    let mut xs = x.x_coords();
    xs.sort_by(f64::total_cmp);
    scan_statistic_sorted(&xs, x.radius())
}

/// Number of points with x-coordinate in `[a, a + width]`.
pub fn strip_count(x: &Realization, a: f64, width: f64) -> usize {
    x.x_coords()
        .into_iter()
        .filter(|&c| c >= a && c - a <= width)
        .count()
}

/// Vertex count minus hop diameter. Requires a connected, nonempty graph.
pub fn diameter_bound(g: &WsnGraph) -> GraphResult<usize> {
    let n = g.n_vertices();
    if n == 0 {
        return Err(GraphError::Disconnected);
    }
    let adj = g.adjacency();
    let mut diameter = 0;
    for src in 0..n {
        for d in bfs(&adj, src) {
            diameter = diameter.max(d.ok_or(GraphError::Disconnected)?);
        }
    }
    Ok(n - diameter)
}

/// Exact minimal bandwidth over all labelings, by backtracking search.
pub fn min_bandwidth_bruteforce(g: &WsnGraph) -> GraphResult<usize> {
    let n = g.n_vertices();
    if n > BRUTEFORCE_MAX_VERTICES {
        return Err(GraphError::TooLarge {
            n,
            max: BRUTEFORCE_MAX_VERTICES,
        });
    }
    if g.n_edges() == 0 {
        return Ok(0);
    }
    let adj = g.adjacency();
    let max_degree = adj.iter().map(Vec::len).max().unwrap_or(0);
    let lower = max_degree.div_ceil(2).max(1);
    for b in lower..n {
        let mut slot_of = vec![None; n];
        if place(&adj, b, 0, &mut slot_of) {
            return Ok(b);
        }
    }
    Ok(n - 1)
}

/// Tries to fill slots `slot..n` so every edge spans at most `b` slots.
fn place(adj: &[Vec<usize>], b: usize, slot: usize, slot_of: &mut [Option<usize>]) -> bool {
    let n = adj.len();
    if slot == n {
        return true;
    }
    // A placed vertex that still has unplaced neighbours must stay within reach.
    for (v, s) in slot_of.iter().enumerate() {
        if let Some(s) = *s {
            if slot > s + b && adj[v].iter().any(|&u| slot_of[u].is_none()) {
                return false;
            }
        }
    }
    for v in 0..n {
        if slot_of[v].is_some() {
            continue;
        }
        let fits = adj[v]
            .iter()
            .all(|&u| slot_of[u].is_none_or(|s| slot - s <= b));
        if fits {
            slot_of[v] = Some(slot);
            if place(adj, b, slot + 1, slot_of) {
                return true;
            }
            slot_of[v] = None;
        }
    }
    false
}
