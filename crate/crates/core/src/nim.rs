//! NIM-H edges: edges of a colored `K_n` that lie in no monochromatic copy
//! of `H`.
//!
//! Two independent routes compute the same report:
//! * [`nim_edges`] marks coverage: for every edge of a class not yet known to
//!   be covered it looks for one copy of `H` through it and marks all edges
//!   that copy uses, so most edges are settled without their own search;
//! * [`nim_edges_anchored`] asks the anchored question separately for every
//!   edge.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coloring::EdgeColoring;
use crate::embed::{Embedder, Host};
use crate::error::{invalid, Error, Result};
use crate::graph::{edge_index_unchecked, pair_count, SimpleGraph};
use crate::pattern::PatternGraph;
use crate::pool::in_pool;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NimReport {
    pub n: usize,
    pub k: usize,
    pub pattern: String,
    pub count: usize,
    pub per_color_breakdown: Vec<usize>,
    /// Sorted canonical edge indices.
    pub nim_edges: Vec<usize>,
}

#[derive(Clone, Copy, Debug)]
pub struct NimOptions {
    pub max_pattern_order: usize,
    pub max_n: usize,
    /// 1 runs on the calling thread; 0 uses rayon's default pool.
    pub threads: usize,
}

impl Default for NimOptions {
    fn default() -> Self {
        NimOptions {
            max_pattern_order: 16,
            max_n: 64,
            threads: 1,
        }
    }
}

/// Pattern-specific machinery for repeated NIM queries.
#[derive(Clone, Debug)]
pub struct NimEngine {
    embedder: Embedder,
}

impl NimEngine {
    pub fn new(pattern: &SimpleGraph) -> Self {
        NimEngine {
            embedder: Embedder::new(pattern),
        }
    }

    pub fn embedder(&self) -> &Embedder {
        &self.embedder
    }

    /// NIM edges of one color class by coverage marking.
    pub fn class_nim_edges(&self, class: &SimpleGraph) -> Vec<(usize, usize)> {
        let edges = class.edges();
        if edges.len() < self.embedder.pattern_edges().len() {
            return edges;
        }
        let n = class.order();
        let host = Host::new(class);
        let mut covered = vec![0u64; pair_count(n).div_ceil(64)];
        let mut remaining = edges.len();
        let mut out = Vec::new();
        for &(u, v) in &edges {
            if remaining == 0 {
                break;
            }
            let idx = edge_index_unchecked(u, v, n);
            if (covered[idx / 64] >> (idx % 64)) & 1 == 1 {
                continue;
            }
            match self.embedder.find_through_edge(&host, u, v) {
                Some(map) => {
                    for &(a, b) in self.embedder.pattern_edges() {
                        let e = edge_index_unchecked(map[a], map[b], n);
                        if (covered[e / 64] >> (e % 64)) & 1 == 0 {
                            covered[e / 64] |= 1 << (e % 64);
                            remaining -= 1;
                        }
                    }
                }
                None => {
                    out.push((u, v));
                    remaining -= 1;
                }
            }
        }
        out
    }

    pub fn class_nim_count(&self, class: &SimpleGraph) -> usize {
        self.class_nim_edges(class).len()
    }

    /// NIM edges of one class, one anchored search per edge.
    pub fn class_nim_edges_anchored(&self, class: &SimpleGraph) -> Vec<(usize, usize)> {
        let host = Host::new(class);
        class
            .edges()
            .into_iter()
            .filter(|&(u, v)| self.embedder.find_through_edge(&host, u, v).is_none())
            .collect()
    }
}

/// Whether `g` has a subgraph isomorphic to `h`.
pub fn contains(g: &SimpleGraph, h: &PatternGraph) -> bool {
    Embedder::new(h.graph()).find(&Host::new(g)).is_some()
}

/// Whether some copy of `h` in `g` uses the edge `uv`.
pub fn contains_through_edge(
    g: &SimpleGraph,
    h: &PatternGraph,
    (u, v): (usize, usize),
) -> Result<bool> {
    if !g.has_edge(u, v) {
        return invalid(format!("({u},{v}) is not an edge of the host graph"));
    }
    Ok(Embedder::new(h.graph())
        .find_through_edge(&Host::new(g), u, v)
        .is_some())
}

fn check(c: &EdgeColoring, h: &PatternGraph, opts: &NimOptions) -> Result<()> {
    if h.order() < 2 {
        return invalid("pattern needs at least 2 vertices");
    }
    if h.order() > opts.max_pattern_order {
        return Err(Error::ResourceLimit(format!(
            "pattern has {} vertices, limit {}",
            h.order(),
            opts.max_pattern_order
        )));
    }
    if c.order() > opts.max_n {
        return Err(Error::ResourceLimit(format!(
            "coloring has {} vertices, limit {}",
            c.order(),
            opts.max_n
        )));
    }
    Ok(())
}

fn assemble(c: &EdgeColoring, h: &PatternGraph, per_class: Vec<Vec<(usize, usize)>>) -> NimReport {
    let n = c.order();
    let per_color_breakdown: Vec<usize> = per_class.iter().map(Vec::len).collect();
    let mut nim: Vec<usize> = per_class
        .into_iter()
        .flatten()
        .map(|(u, v)| edge_index_unchecked(u, v, n))
        .collect();
    nim.sort_unstable();
    NimReport {
        n,
        k: c.color_count(),
        pattern: h.spec().to_string(),
        count: nim.len(),
        per_color_breakdown,
        nim_edges: nim,
    }
}

fn run_classes(
    c: &EdgeColoring,
    opts: &NimOptions,
    f: impl Fn(&SimpleGraph) -> Vec<(usize, usize)> + Sync,
) -> Result<Vec<Vec<(usize, usize)>>> {
    let classes = c.color_classes();
    if opts.threads == 1 {
        return Ok(classes.iter().map(f).collect());
    }
    in_pool(opts.threads, || classes.par_iter().map(&f).collect())
}

/// NIM report by coverage marking.
pub fn nim_edges(c: &EdgeColoring, h: &PatternGraph) -> Result<NimReport> {
    nim_edges_with(c, h, &NimOptions::default())
}

pub fn nim_edges_with(c: &EdgeColoring, h: &PatternGraph, opts: &NimOptions) -> Result<NimReport> {
    check(c, h, opts)?;
    let engine = NimEngine::new(h.graph());
    let per_class = run_classes(c, opts, |g| engine.class_nim_edges(g))?;
    Ok(assemble(c, h, per_class))
}

/// NIM report from independent per-edge anchored queries.
pub fn nim_edges_anchored(c: &EdgeColoring, h: &PatternGraph) -> Result<NimReport> {
    nim_edges_anchored_with(c, h, &NimOptions::default())
}

pub fn nim_edges_anchored_with(
    c: &EdgeColoring,
    h: &PatternGraph,
    opts: &NimOptions,
) -> Result<NimReport> {
    check(c, h, opts)?;
    let engine = NimEngine::new(h.graph());
    let per_class = run_classes(c, opts, |g| engine.class_nim_edges_anchored(g))?;
    Ok(assemble(c, h, per_class))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::{make_path, make_star, parse_pattern};

    #[test]
    fn contains_examples() {
        assert!(contains(&SimpleGraph::complete(3), &make_path(3)));
        let c4 = SimpleGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert!(!contains(&c4, &make_star(3)));
        let k5_15 = SimpleGraph::empty(5).join(&SimpleGraph::empty(15));
        assert!(!contains(&k5_15, &parse_pattern("dstar:3+path:6").unwrap()));
        let k6_15 = SimpleGraph::empty(6).join(&SimpleGraph::empty(15));
        assert!(contains(&k6_15, &parse_pattern("dstar:3+path:6").unwrap()));
    }

    #[test]
    fn contains_through_edge_examples() {
        let p4 = make_path(4);
        assert!(contains_through_edge(p4.graph(), &p4, (1, 2)).unwrap());
        let star = make_star(3);
        assert!(!contains_through_edge(star.graph(), &p4, (0, 1)).unwrap());
        assert!(contains_through_edge(star.graph(), &p4, (1, 2)).is_err());
    }

    #[test]
    fn small_reports() {
        let mono = EdgeColoring::uniform(4, 1, 0).unwrap();
        assert_eq!(nim_edges(&mono, &make_path(3)).unwrap().count, 0);

        // red perfect matching {01, 23}, blue C4
        let g = SimpleGraph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let c = EdgeColoring::from_graph(&g);
        let r = nim_edges(&c, &make_path(3)).unwrap();
        assert_eq!(r.count, 2);
        assert_eq!(r.nim_edges, vec![0, 5]);
        assert_eq!(r.per_color_breakdown, vec![2, 0]);
        assert_eq!(r, nim_edges_anchored(&c, &make_path(3)).unwrap());
    }

    #[test]
    fn guardrails() {
        let c = EdgeColoring::uniform(4, 1, 0).unwrap();
        assert!(matches!(
            nim_edges(&c, &make_path(17)),
            Err(Error::ResourceLimit(_))
        ));
        assert!(matches!(
            nim_edges(&c, &make_path(1)),
            Err(Error::InvalidArgument(_))
        ));
        let big = EdgeColoring::uniform(65, 1, 0).unwrap();
        assert!(nim_edges(&big, &make_path(3)).is_err());
        let opts = NimOptions {
            max_n: 100,
            ..NimOptions::default()
        };
        assert_eq!(nim_edges_with(&big, &make_path(3), &opts).unwrap().count, 0);
    }
}
