//! Graph isomorphism for small graphs: invariant filtering followed by a
//! degree-constrained backtracking search. Meant for checking constructions,
//! not for large inputs.

use crate::graph::SimpleGraph;

fn component_profile(g: &SimpleGraph) -> Vec<(usize, usize, Vec<usize>)> {
    let mut prof: Vec<_> = g
        .components()
        .into_iter()
        .map(|c| {
            let sub = g.induced(&c);
            (c.len(), sub.edge_count(), sub.degree_sequence())
        })
        .collect();
    prof.sort();
    prof
}

/// Returns a vertex map `m` with `a ≅ b` via `v ↦ m[v]`, if one exists.
pub fn find_isomorphism(a: &SimpleGraph, b: &SimpleGraph) -> Option<Vec<usize>> {
    let n = a.order();
    if n != b.order()
        || a.edge_count() != b.edge_count()
        || a.degree_sequence() != b.degree_sequence()
        || component_profile(a) != component_profile(b)
    {
        return None;
    }
    // BFS order inside each component so most vertices have a mapped neighbour.
    let mut order = Vec::with_capacity(n);
    for comp in a.components() {
        let root = *comp
            .iter()
            .max_by_key(|&&v| (a.degree(v), usize::MAX - v))?;
        let mut queue = std::collections::VecDeque::from([root]);
        let mut seen = vec![false; n];
        seen[root] = true;
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for v in a.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    let deg_b: Vec<usize> = (0..n).map(|v| b.degree(v)).collect();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    if extend(a, b, &order, &deg_b, 0, &mut map, &mut used) {
        Some(map)
    } else {
        None
    }
}

fn extend(
    a: &SimpleGraph,
    b: &SimpleGraph,
    order: &[usize],
    deg_b: &[usize],
    pos: usize,
    map: &mut [usize],
    used: &mut [bool],
) -> bool {
    let Some(&x) = order.get(pos) else {
        return true;
    };
    let dx = a.degree(x);
    'cand: for y in 0..b.order() {
        if used[y] || deg_b[y] != dx {
            continue;
        }
        for &x2 in &order[..pos] {
            if a.has_edge(x, x2) != b.has_edge(y, map[x2]) {
                continue 'cand;
            }
        }
        map[x] = y;
        used[y] = true;
        if extend(a, b, order, deg_b, pos + 1, map, used) {
            return true;
        }
        used[y] = false;
        map[x] = usize::MAX;
    }
    false
}

pub fn is_isomorphic(a: &SimpleGraph, b: &SimpleGraph) -> bool {
    find_isomorphism(a, b).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relabelled_graphs_are_isomorphic() {
        let g = SimpleGraph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)]).unwrap();
        let h = g.relabel(&[5, 3, 1, 0, 2, 4]).unwrap();
        let m = find_isomorphism(&g, &h).unwrap();
        for (u, v) in g.edges() {
            assert!(h.has_edge(m[u], m[v]));
        }
    }

    #[test]
    fn same_degree_sequence_different_graphs() {
        // C6 versus 2K3
        let c6 =
            SimpleGraph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]).unwrap();
        let k3 = SimpleGraph::complete(3);
        assert!(!is_isomorphic(&c6, &k3.disjoint_union(&k3)));
    }

    #[test]
    fn backtracking_separates_equal_profiles() {
        // two trees with the same degree sequence (3,2,2,1,1,1) on 6 vertices
        let a = SimpleGraph::from_edges(6, &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 5)]).unwrap();
        let b = SimpleGraph::from_edges(6, &[(0, 1), (0, 2), (0, 3), (1, 4), (4, 5)]).unwrap();
        assert_eq!(a.degree_sequence(), b.degree_sequence());
        assert!(!is_isomorphic(&a, &b));
    }
}
