//! Backtracking subgraph embedding (not necessarily induced).
//!
//! Pattern vertices are mapped in a connected order: each component is
//! traversed depth-first from a maximum-degree root, so every non-root vertex
//! is chosen among the host neighbours of its already-mapped parent.
//! Components are embedded one after another into the remaining free
//! vertices; isolated pattern vertices only need spare host vertices.
//!
//! Two prunings keep the search small on structured hosts:
//! * a host vertex needs at least the pattern vertex's degree;
//! * host twins (equal open or equal closed neighbourhoods) are
//!   interchangeable by an automorphism that fixes every other vertex, so
//!   once one member of a twin class has failed at a level, the rest are
//!   skipped at that level.

use std::collections::HashMap;

use smallvec::SmallVec;

use crate::graph::{iter_bits, SimpleGraph};

#[derive(Clone, Debug)]
struct Step {
    vertex: usize,
    parent: Option<usize>,
    /// Earlier positions (other than the parent) adjacent to this vertex.
    checks: SmallVec<[usize; 4]>,
    degree: usize,
}

#[derive(Clone, Debug)]
struct Plan {
    steps: Vec<Step>,
}

/// Host graph with the per-vertex data the search consults.
pub struct Host<'g> {
    graph: &'g SimpleGraph,
    degree: Vec<usize>,
    twin: Vec<u32>,
    all: Vec<u64>,
}

impl<'g> Host<'g> {
    pub fn new(graph: &'g SimpleGraph) -> Self {
        let n = graph.order();
        let degree = (0..n).map(|v| graph.degree(v)).collect();
        let open: Vec<Vec<u64>> = (0..n).map(|v| graph.neighbor_words(v).to_vec()).collect();
        let mut open_count: HashMap<&[u64], usize> = HashMap::new();
        for key in &open {
            *open_count.entry(key.as_slice()).or_default() += 1;
        }
        let mut ids: HashMap<(bool, Vec<u64>), u32> = HashMap::new();
        let mut twin = Vec::with_capacity(n);
        for (v, key) in open.iter().enumerate() {
            // A vertex never has both a false twin and a true twin.
            let class_key = if open_count[key.as_slice()] >= 2 {
                (false, key.clone())
            } else {
                let mut closed = key.clone();
                closed[v / 64] |= 1 << (v % 64);
                (true, closed)
            };
            let next = ids.len() as u32;
            twin.push(*ids.entry(class_key).or_insert(next));
        }
        let mut all = vec![0u64; graph.word_count()];
        for v in 0..n {
            all[v / 64] |= 1 << (v % 64);
        }
        Host {
            graph,
            degree,
            twin,
            all,
        }
    }

    pub fn graph(&self) -> &SimpleGraph {
        self.graph
    }

    /// Twin class of every vertex; equal ids mean swappable vertices.
    pub fn twin_classes(&self) -> &[u32] {
        &self.twin
    }
}

/// Precomputed search plans for one pattern.
#[derive(Clone, Debug)]
pub struct Embedder {
    order: usize,
    edges: Vec<(usize, usize)>,
    isolated: Vec<usize>,
    free_plan: Plan,
    /// `anchored[2e]` starts with edge `e` as `(p, q)`, `anchored[2e+1]` as `(q, p)`.
    anchored: Vec<Plan>,
}

impl Embedder {
    pub fn new(pattern: &SimpleGraph) -> Self {
        let order = pattern.order();
        let mut comps: Vec<Vec<usize>> = Vec::new();
        let mut isolated = Vec::new();
        for c in pattern.components() {
            if c.len() == 1 {
                isolated.push(c[0]);
            } else {
                comps.push(c);
            }
        }
        comps.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
        let root_of = |c: &[usize]| {
            *c.iter()
                .max_by_key(|&&v| (pattern.degree(v), std::cmp::Reverse(v)))
                .unwrap()
        };

        let mut free_order = Vec::new();
        for c in &comps {
            dfs_order(pattern, root_of(c), None, &mut free_order);
        }
        let free_plan = make_plan(pattern, &free_order);

        let edges = pattern.edges();
        let mut anchored = Vec::with_capacity(2 * edges.len());
        for &(p, q) in &edges {
            for (first, second) in [(p, q), (q, p)] {
                let mut ord = Vec::new();
                dfs_order(pattern, first, Some(second), &mut ord);
                for c in &comps {
                    if !c.contains(&first) {
                        dfs_order(pattern, root_of(c), None, &mut ord);
                    }
                }
                anchored.push(make_plan(pattern, &ord));
            }
        }
        Embedder {
            order,
            edges,
            isolated,
            free_plan,
            anchored,
        }
    }

    pub fn pattern_order(&self) -> usize {
        self.order
    }

    pub fn pattern_edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Some embedding of the pattern, as `map[pattern vertex] = host vertex`.
    pub fn find(&self, host: &Host) -> Option<Vec<usize>> {
        if self.order > host.graph.order() {
            return None;
        }
        let mut s = Search::new(self, &self.free_plan, host);
        if s.extend(0) {
            Some(s.into_map())
        } else {
            None
        }
    }

    /// Some embedding that maps a pattern edge onto host edge `uv`.
    /// Returns `None` when `uv` is not a host edge.
    pub fn find_through_edge(&self, host: &Host, u: usize, v: usize) -> Option<Vec<usize>> {
        if self.order > host.graph.order() || !host.graph.has_edge(u, v) {
            return None;
        }
        for plan in &self.anchored {
            let (s0, s1) = (&plan.steps[0], &plan.steps[1]);
            if host.degree[u] < s0.degree || host.degree[v] < s1.degree {
                continue;
            }
            let mut s = Search::new(self, plan, host);
            s.place(0, u);
            s.place(1, v);
            if s.extend(2) {
                return Some(s.into_map());
            }
        }
        None
    }
}

/// Depth-first preorder from `root`; `first` (a neighbour of root) is
/// visited before the other neighbours.
fn dfs_order(g: &SimpleGraph, root: usize, first: Option<usize>, out: &mut Vec<usize>) {
    fn visit(
        g: &SimpleGraph,
        v: usize,
        first: Option<usize>,
        seen: &mut Vec<bool>,
        out: &mut Vec<usize>,
    ) {
        seen[v] = true;
        out.push(v);
        let mut nbrs: Vec<usize> = g.neighbors(v).collect();
        if let Some(f) = first {
            if let Some(i) = nbrs.iter().position(|&w| w == f) {
                nbrs.remove(i);
                nbrs.insert(0, f);
            }
        }
        for w in nbrs {
            if !seen[w] {
                visit(g, w, None, seen, out);
            }
        }
    }
    let mut seen = vec![false; g.order()];
    for &v in out.iter() {
        seen[v] = true;
    }
    visit(g, root, first, &mut seen, out);
}

fn make_plan(g: &SimpleGraph, order: &[usize]) -> Plan {
    let mut pos = vec![usize::MAX; g.order()];
    let mut steps = Vec::with_capacity(order.len());
    for (i, &v) in order.iter().enumerate() {
        let earlier: SmallVec<[usize; 4]> =
            g.neighbors(v).map(|w| pos[w]).filter(|&p| p < i).collect();
        // preorder DFS: the parent is the latest earlier neighbour
        let parent = earlier.iter().copied().max();
        let checks = earlier
            .iter()
            .copied()
            .filter(|&p| Some(p) != parent)
            .collect();
        steps.push(Step {
            vertex: v,
            parent,
            checks,
            degree: g.degree(v),
        });
        pos[v] = i;
    }
    Plan { steps }
}

struct Search<'a> {
    emb: &'a Embedder,
    plan: &'a Plan,
    host: &'a Host<'a>,
    img: Vec<usize>,
    used: Vec<u64>,
}

impl<'a> Search<'a> {
    fn new(emb: &'a Embedder, plan: &'a Plan, host: &'a Host<'a>) -> Self {
        Search {
            emb,
            plan,
            host,
            img: vec![usize::MAX; plan.steps.len()],
            used: vec![0; host.all.len()],
        }
    }

    #[inline]
    fn place(&mut self, pos: usize, w: usize) {
        self.img[pos] = w;
        self.used[w / 64] |= 1 << (w % 64);
    }

    #[inline]
    fn unplace(&mut self, pos: usize, w: usize) {
        self.img[pos] = usize::MAX;
        self.used[w / 64] &= !(1 << (w % 64));
    }

    fn extend(&mut self, pos: usize) -> bool {
        let Some(step) = self.plan.steps.get(pos) else {
            let used: usize = self.used.iter().map(|w| w.count_ones() as usize).sum();
            return self.host.graph.order() - used >= self.emb.isolated.len();
        };
        let base: &[u64] = match step.parent {
            Some(p) => self.host.graph.neighbor_words(self.img[p]),
            None => &self.host.all,
        };
        let cands: SmallVec<[u64; 4]> = base.iter().zip(&self.used).map(|(b, u)| b & !u).collect();
        let mut tried: SmallVec<[u32; 8]> = SmallVec::new();
        for w in iter_bits(&cands) {
            if self.host.degree[w] < step.degree {
                continue;
            }
            if !step
                .checks
                .iter()
                .all(|&c| self.host.graph.has_edge(w, self.img[c]))
            {
                continue;
            }
            let class = self.host.twin[w];
            if tried.contains(&class) {
                continue;
            }
            self.place(pos, w);
            if self.extend(pos + 1) {
                return true;
            }
            self.unplace(pos, w);
            tried.push(class);
        }
        false
    }

    fn into_map(self) -> Vec<usize> {
        let mut map = vec![usize::MAX; self.emb.order];
        let mut used = self.used;
        for (step, &w) in self.plan.steps.iter().zip(&self.img) {
            map[step.vertex] = w;
        }
        let mut spare = 0;
        for &v in &self.emb.isolated {
            while (used[spare / 64] >> (spare % 64)) & 1 == 1 {
                spare += 1;
            }
            used[spare / 64] |= 1 << (spare % 64);
            map[v] = spare;
        }
        map
    }
}

/// Whether `host` contains a copy of `pattern`.
pub fn contains_graph(host: &SimpleGraph, pattern: &SimpleGraph) -> bool {
    Embedder::new(pattern).find(&Host::new(host)).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_map(host: &SimpleGraph, pattern: &SimpleGraph, map: &[usize]) {
        let mut seen = std::collections::HashSet::new();
        for &m in map {
            assert!(m < host.order());
            assert!(seen.insert(m), "map not injective: {map:?}");
        }
        for (a, b) in pattern.edges() {
            assert!(host.has_edge(map[a], map[b]));
        }
    }

    fn path(n: usize) -> SimpleGraph {
        SimpleGraph::from_edges(n, &(1..n).map(|v| (v - 1, v)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn finds_paths_in_cliques() {
        let k5 = SimpleGraph::complete(5);
        let host = Host::new(&k5);
        let p5 = path(5);
        let map = Embedder::new(&p5).find(&host).unwrap();
        check_map(&k5, &p5, &map);
        assert!(Embedder::new(&path(6)).find(&host).is_none());
    }

    #[test]
    fn anchored_search_uses_the_edge() {
        let p4 = path(4);
        let host = Host::new(&p4);
        let emb = Embedder::new(&p4);
        let map = emb.find_through_edge(&host, 1, 2).unwrap();
        check_map(&p4, &p4, &map);
        assert!(emb.find_through_edge(&host, 0, 2).is_none());
    }

    #[test]
    fn disconnected_patterns_need_disjoint_room() {
        // 2K_2 ∪ K_1 into a path on 4 vertices: 0-1, 2-3, no spare vertex
        let pat = SimpleGraph::from_edges(5, &[(0, 1), (2, 3)]).unwrap();
        assert!(!contains_graph(&path(4), &pat));
        assert!(contains_graph(&path(5), &pat));
        let map = Embedder::new(&pat).find(&Host::new(&path(5))).unwrap();
        check_map(&path(5), &pat, &map);
    }

    #[test]
    fn twin_classes_of_complete_bipartite() {
        let g = SimpleGraph::complete(2).join(&SimpleGraph::empty(3)); // K_2 + 3 isolated
        let host = Host::new(&g);
        let t = host.twin_classes();
        assert_eq!(t[0], t[1]);
        assert_eq!(t[2], t[3]);
        assert_eq!(t[3], t[4]);
        assert_ne!(t[0], t[2]);
    }
}
