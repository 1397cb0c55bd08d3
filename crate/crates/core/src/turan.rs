//! Turán numbers `ex(n, H)`: closed forms for paths and balanced forests,
//! an exhaustive oracle for everything small, and the extremal graphs for
//! paths.

use serde::{Deserialize, Serialize};

use crate::embed::{Embedder, Host};
use crate::error::{invalid, Error, Result};
use crate::graph::{all_pairs, pair_count, SimpleGraph};
use crate::pattern::PatternGraph;
use crate::pool::in_pool;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TuranMethod {
    FaudreeSchelp,
    BushawKettle,
    Oracle,
}

/// Parameters of the extremal construction behind a value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Recipe {
    /// `n = a(ℓ-1) + b`; extremal graphs exist for every `t` in
    /// `t_min..=t_max` (a single `t = a` when the extremal graph is
    /// `aK_{ℓ-1} ∪ K_b`).
    Path {
        a: usize,
        b: usize,
        t_min: usize,
        t_max: usize,
    },
    /// Balanced forest on `2m` vertices; the value is certified only from
    /// `threshold` vertices on.
    Forest {
        m: usize,
        perfect_matching: bool,
        threshold: u128,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TuranResult {
    pub n: usize,
    pub pattern: String,
    pub value: u64,
    pub method: TuranMethod,
    pub recipe: Option<Recipe>,
    /// Formula used below the size where it is known to hold.
    pub below_threshold: bool,
    /// Edges of an `H`-free graph with `value` edges (oracle only).
    pub witness: Option<Vec<(usize, usize)>>,
}

#[inline]
fn choose2(x: usize) -> u64 {
    pair_count(x) as u64
}

fn path_split(n: usize, l: usize) -> (usize, usize) {
    (n / (l - 1), n % (l - 1))
}

/// Whether `(n, ℓ)` falls in the case with a one-parameter family of
/// extremal graphs: `ℓ` even and `b ∈ {ℓ/2 - 1, ℓ/2}`.
fn has_family(n: usize, l: usize) -> bool {
    let (_, b) = path_split(n, l);
    l.is_multiple_of(2) && (b == l / 2 || b + 1 == l / 2)
}

/// `ex(n, P_ℓ) = a·C(ℓ-1, 2) + C(b, 2)` where `n = a(ℓ-1) + b`, `0 ≤ b ≤ ℓ-2`.
pub fn ex_path(n: usize, l: usize) -> Result<TuranResult> {
    if l < 2 {
        return invalid(format!("path order must be at least 2 (got {l})"));
    }
    let (a, b) = path_split(n, l);
    let value = a as u64 * choose2(l - 1) + choose2(b);
    let (t_min, t_max) = if has_family(n, l) { (0, a) } else { (a, a) };
    Ok(TuranResult {
        n,
        pattern: format!("path:{l}"),
        value,
        method: TuranMethod::FaudreeSchelp,
        recipe: Some(Recipe::Path { a, b, t_min, t_max }),
        below_threshold: false,
        witness: None,
    })
}

fn add_clique(g: &mut SimpleGraph, vertices: std::ops::Range<usize>) {
    for u in vertices.clone() {
        for v in u + 1..vertices.end {
            g.add_edge(u, v);
        }
    }
}

/// `tK_{ℓ-1} ∪ (K_{ℓ/2-1} + \overline{K}_{n - t(ℓ-1) - ℓ/2 + 1})` for even `ℓ`.
///
/// Vertices: the `t` cliques first, then the `ℓ/2 - 1` hub vertices, then
/// the independent set. Defined whenever the independent set size is
/// non-negative, extremal or not.
pub fn clique_hub_graph(n: usize, l: usize, t: usize) -> Result<SimpleGraph> {
    if l < 2 || l % 2 == 1 {
        return invalid(format!(
            "clique/hub family needs an even path order (got {l})"
        ));
    }
    let used = t * (l - 1) + l / 2 - 1;
    if used > n {
        return invalid(format!(
            "t = {t} too large: {t} cliques of order {} and {} hub vertices exceed n = {n}",
            l - 1,
            l / 2 - 1
        ));
    }
    let mut g = SimpleGraph::empty(n);
    for i in 0..t {
        add_clique(&mut g, i * (l - 1)..(i + 1) * (l - 1));
    }
    let hub = t * (l - 1)..used;
    add_clique(&mut g, hub.clone());
    for h in hub {
        for v in used..n {
            g.add_edge(h, v);
        }
    }
    Ok(g)
}

/// An extremal `P_ℓ`-free graph on `n` vertices.
///
/// In the family case (`ℓ` even, `b ∈ {ℓ/2-1, ℓ/2}`) any `0 ≤ t ≤ a` gives
/// [`clique_hub_graph`]; otherwise only `t = a` is valid and the graph is
/// `aK_{ℓ-1} ∪ K_b`.
pub fn extremal_path_graph(n: usize, l: usize, t: usize) -> Result<SimpleGraph> {
    let ex = ex_path(n, l)?;
    let (a, b) = path_split(n, l);
    let g = if has_family(n, l) {
        if t > a {
            return invalid(format!("t = {t} exceeds a = {a} (n = {n}, l = {l})"));
        }
        clique_hub_graph(n, l, t)?
    } else {
        if t != a {
            return invalid(format!(
                "extremal graph is unique here (l = {l}, b = {b} not in {{l/2-1, l/2}} or l odd): t must equal a = {a}"
            ));
        }
        let mut g = SimpleGraph::empty(n);
        for i in 0..=a {
            let end = ((i + 1) * (l - 1)).min(n);
            add_clique(&mut g, i * (l - 1)..end);
        }
        g
    };
    if g.edge_count() as u64 != ex.value {
        return Err(Error::Invariant(format!(
            "extremal graph has {} edges, expected {}",
            g.edge_count(),
            ex.value
        )));
    }
    if n <= 64 {
        let path = crate::pattern::make_path(l);
        if Embedder::new(path.graph()).find(&Host::new(&g)).is_some() {
            return Err(Error::Invariant(format!("extremal graph contains P_{l}")));
        }
    }
    Ok(g)
}

/// `ex(n, H)` for a balanced forest `H` on `2m` vertices with at least two
/// components:
/// `C(m-1, 2) + (m-1)(n-m+1)` with a perfect matching, `(m-1)(n-m+1)` without.
pub fn ex_balanced_forest(n: usize, h: &PatternGraph) -> Result<TuranResult> {
    if !h.is_acyclic() {
        return invalid("pattern is not a forest");
    }
    if h.order() % 2 == 1 {
        return invalid("pattern has odd order");
    }
    if !h.is_balanced() {
        return invalid("pattern is not a balanced forest");
    }
    if h.graph().components().len() < 2 {
        return invalid("pattern is connected; the formula needs at least two components");
    }
    let m = h.order() / 2;
    if n + 1 < m {
        return invalid(format!("formula undefined for n = {n} < m - 1 = {}", m - 1));
    }
    let pm = h.has_perfect_matching();
    let base = (m as u64 - 1) * (n + 1 - m) as u64;
    let value = if pm { choose2(m - 1) + base } else { base };
    let m2 = (m as u128) * (m as u128);
    let threshold = 3 * m2
        + 32u128
            .saturating_mul(m2)
            .saturating_mul(central_binomial(m));
    Ok(TuranResult {
        n,
        pattern: h.spec().to_string(),
        value,
        method: TuranMethod::BushawKettle,
        recipe: Some(Recipe::Forest {
            m,
            perfect_matching: pm,
            threshold,
        }),
        below_threshold: (n as u128) < threshold,
        witness: None,
    })
}

fn central_binomial(m: usize) -> u128 {
    let mut c: u128 = 1;
    for i in 0..m as u128 {
        match c.checked_mul(2 * m as u128 - i) {
            Some(x) => c = x / (i + 1),
            None => return u128::MAX,
        }
    }
    c
}

#[derive(Clone, Copy, Debug)]
pub struct OracleOptions {
    pub max_n: usize,
    pub max_pattern_order: usize,
    /// 1 = sequential; otherwise the search is split after the first
    /// decisions and shards run on a rayon pool (0 = default size).
    pub threads: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            max_n: 10,
            max_pattern_order: 12,
            threads: 1,
        }
    }
}

pub fn turan_oracle(n: usize, h: &PatternGraph) -> Result<TuranResult> {
    turan_oracle_with(n, h, &OracleOptions::default())
}

/// Exact `ex(n, H)` by depth-first edge addition.
///
/// Each node keeps the undecided edges that can still be added without
/// creating `H`; an edge that stops being addable never becomes addable
/// again, so it is dropped for the rest of the branch. A branch is cut when
/// its edges plus all addable edges cannot beat the best graph found.
pub fn turan_oracle_with(n: usize, h: &PatternGraph, opts: &OracleOptions) -> Result<TuranResult> {
    if n > opts.max_n {
        return Err(Error::ResourceLimit(format!(
            "oracle limited to n <= {}, got {n}",
            opts.max_n
        )));
    }
    if h.order() > opts.max_pattern_order {
        return Err(Error::ResourceLimit(format!(
            "oracle limited to patterns on <= {} vertices",
            opts.max_pattern_order
        )));
    }
    let search = OracleSearch {
        n,
        pairs: all_pairs(n),
        embedder: Embedder::new(h.graph()),
    };
    let g = SimpleGraph::empty(n);
    let addable: Vec<usize> = (0..search.pairs.len())
        .filter(|&e| search.can_add(&g, e))
        .collect();

    let mut best = Best::default();
    if let Some((&first, rest)) = addable.split_first() {
        // Some edge fits, so an extremal graph has one; relabel it to (0, 1).
        debug_assert_eq!(first, 0);
        let mut g1 = g.clone();
        let (u, v) = search.pairs[first];
        g1.add_edge(u, v);
        let rest: Vec<usize> = rest
            .iter()
            .copied()
            .filter(|&e| search.can_add(&g1, e))
            .collect();
        if opts.threads == 1 {
            search.dfs(&mut g1, &rest, 1, &mut best);
        } else {
            best = search.parallel(g1, rest, opts.threads)?;
        }
    } else {
        best.edges = Some(Vec::new());
    }

    let witness = best.edges.unwrap_or_default();
    let check = SimpleGraph::from_edges(n, &witness)?;
    if search.embedder.find(&Host::new(&check)).is_some() {
        return Err(Error::Invariant(
            "oracle witness contains the pattern".into(),
        ));
    }
    Ok(TuranResult {
        n,
        pattern: h.spec().to_string(),
        value: witness.len() as u64,
        method: TuranMethod::Oracle,
        recipe: None,
        below_threshold: false,
        witness: Some(witness),
    })
}

#[derive(Default, Clone)]
struct Best {
    count: usize,
    edges: Option<Vec<(usize, usize)>>,
}

struct OracleSearch {
    n: usize,
    pairs: Vec<(usize, usize)>,
    embedder: Embedder,
}

impl OracleSearch {
    fn can_add(&self, g: &SimpleGraph, e: usize) -> bool {
        let (u, v) = self.pairs[e];
        let mut g2 = g.clone();
        g2.add_edge(u, v);
        self.embedder
            .find_through_edge(&Host::new(&g2), u, v)
            .is_none()
    }

    fn dfs(&self, g: &mut SimpleGraph, addable: &[usize], count: usize, best: &mut Best) {
        if best.edges.is_some() && count + addable.len() <= best.count {
            return;
        }
        let Some((&e, rest)) = addable.split_first() else {
            best.count = count;
            best.edges = Some(g.edges());
            return;
        };
        let (u, v) = self.pairs[e];
        g.add_edge(u, v);
        let kept: Vec<usize> = rest
            .iter()
            .copied()
            .filter(|&f| self.can_add(g, f))
            .collect();
        self.dfs(g, &kept, count + 1, best);
        g.remove_edge(u, v);
        self.dfs(g, rest, count, best);
    }

    /// Splits on the first few addable edges; every shard searches with its
    /// own best and the results merge by maximum, first shard winning ties.
    fn parallel(&self, g: SimpleGraph, addable: Vec<usize>, threads: usize) -> Result<Best> {
        use rayon::prelude::*;
        let mut shards = vec![(g, addable, 1usize)];
        for _ in 0..6 {
            let mut next = Vec::new();
            for (g, addable, count) in shards {
                match addable.split_first() {
                    None => next.push((g, addable, count)),
                    Some((&e, rest)) => {
                        let (u, v) = self.pairs[e];
                        let mut gi = g.clone();
                        gi.add_edge(u, v);
                        let kept = rest
                            .iter()
                            .copied()
                            .filter(|&f| self.can_add(&gi, f))
                            .collect();
                        next.push((gi, kept, count + 1));
                        next.push((g, rest.to_vec(), count));
                    }
                }
            }
            shards = next;
        }
        let results: Vec<Best> = in_pool(threads, || {
            shards
                .into_par_iter()
                .map(|(mut g, addable, count)| {
                    let mut b = Best::default();
                    self.dfs(&mut g, &addable, count, &mut b);
                    b
                })
                .collect()
        })?;
        let mut best = Best::default();
        for r in results {
            if r.edges.is_some() && (best.edges.is_none() || r.count > best.count) {
                best = r;
            }
        }
        debug_assert!(self.n < 2 || best.edges.is_some());
        Ok(best)
    }
}

/// Both sides of `ex(n1) + ex(n2) < ex(n1 - c) + ex(n2 + c + ℓ)` for `P_ℓ`.
pub fn ex_shift_gap(n1: usize, n2: usize, c: usize, l: usize) -> Result<(u64, u64)> {
    if c > n1 {
        return invalid(format!("c = {c} exceeds n1 = {n1}"));
    }
    let ex = |n| ex_path(n, l).map(|r| r.value);
    Ok((ex(n1)? + ex(n2)?, ex(n1 - c)? + ex(n2 + c + l)?))
}

/// Which closed form (or the oracle) applies to a pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodChoice {
    Formula,
    Oracle,
    /// Formula when one applies, otherwise the oracle.
    Auto,
}

/// Number of vertices if `g` is a path, `None` otherwise.
pub fn path_length(g: &SimpleGraph) -> Option<usize> {
    let n = g.order();
    (n >= 1 && g.components().len() == 1 && g.is_acyclic() && (0..n).all(|v| g.degree(v) <= 2))
        .then_some(n)
}

pub fn turan_number(n: usize, h: &PatternGraph, method: MethodChoice) -> Result<TuranResult> {
    let formula = || -> Result<TuranResult> {
        if let Some(l) = path_length(h.graph()) {
            let mut r = ex_path(n, l)?;
            r.pattern = h.spec().to_string();
            return Ok(r);
        }
        if h.is_acyclic() && h.is_balanced() && h.graph().components().len() >= 2 {
            return ex_balanced_forest(n, h);
        }
        Err(Error::Unsupported(format!(
            "no closed form for pattern {}",
            h.spec()
        )))
    };
    match method {
        MethodChoice::Formula => formula(),
        MethodChoice::Oracle => turan_oracle(n, h),
        MethodChoice::Auto => match formula() {
            Err(Error::Unsupported(_)) => turan_oracle(n, h),
            other => other,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iso::is_isomorphic;
    use crate::pattern::{forest_union, make_double_star, make_path, make_star, parse_pattern};

    #[test]
    fn ex_path_examples() {
        assert_eq!(ex_path(13, 4).unwrap().value, 12);
        assert_eq!(ex_path(3, 4).unwrap().value, 3);
        assert_eq!(ex_path(16, 4).unwrap().value, 15);
        assert_eq!(
            ex_path(13, 4).unwrap().recipe,
            Some(Recipe::Path {
                a: 4,
                b: 1,
                t_min: 0,
                t_max: 4
            })
        );
        assert_eq!(
            ex_path(12, 5).unwrap().recipe,
            Some(Recipe::Path {
                a: 3,
                b: 0,
                t_min: 3,
                t_max: 3
            })
        );
        assert_eq!(ex_path(10, 2).unwrap().value, 0);
        assert!(ex_path(5, 1).is_err());
    }

    #[test]
    fn extremal_graph_examples() {
        let g = extremal_path_graph(13, 4, 2).unwrap();
        let k3 = SimpleGraph::complete(3);
        let expect = k3
            .disjoint_union(&k3)
            .disjoint_union(&SimpleGraph::empty(1).join(&SimpleGraph::empty(6)));
        assert!(is_isomorphic(&g, &expect));
        assert_eq!(g.edge_count(), 12);

        let g4 = extremal_path_graph(13, 4, 4).unwrap();
        assert_eq!(g4.edge_count(), 12);
        assert_eq!(g4.components().len(), 5);

        let star = extremal_path_graph(7, 4, 0).unwrap();
        assert!(is_isomorphic(&star, make_star(6).graph()));

        assert!(extremal_path_graph(13, 4, 5).is_err());
        // l = 5, n = 12: b = 0, unique extremal graph 3K_4
        assert!(extremal_path_graph(12, 5, 1).is_err());
        assert_eq!(extremal_path_graph(12, 5, 3).unwrap().edge_count(), 18);
    }

    #[test]
    fn balanced_forest_examples() {
        let m2 = forest_union(&make_path(2), &make_path(2)).unwrap();
        let r = ex_balanced_forest(10, &m2).unwrap();
        assert_eq!(r.value, 9);
        assert!(r.below_threshold);

        let h = parse_pattern("dstar:3+path:6").unwrap();
        for n in [20, 30, 100] {
            assert_eq!(ex_balanced_forest(n, &h).unwrap().value, 5 * (n as u64 - 5));
        }
        let pp = forest_union(&make_path(4), &make_path(4)).unwrap();
        assert_eq!(ex_balanced_forest(20, &pp).unwrap().value, 54);

        assert!(ex_balanced_forest(20, &make_double_star(3).unwrap()).is_err());
        assert!(ex_balanced_forest(20, &parse_pattern("path:3+path:3").unwrap()).is_err());
        // threshold 3m^2 + 32 m^2 C(2m, m) with m = 2
        match ex_balanced_forest(10, &m2).unwrap().recipe {
            Some(Recipe::Forest { threshold, .. }) => assert_eq!(threshold, 12 + 128 * 6),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(turan_oracle(5, &make_path(3)).unwrap().value, 2);
        assert_eq!(turan_oracle(7, &make_path(4)).unwrap().value, 6);
        let r = turan_oracle(6, &make_star(3)).unwrap();
        assert_eq!(r.value, 6);
        let w = SimpleGraph::from_edges(6, &r.witness.unwrap()).unwrap();
        assert!((0..6).all(|v| w.degree(v) <= 2));
        assert!(matches!(
            turan_oracle(11, &make_path(3)),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn oracle_is_thread_count_independent() {
        let h = make_path(5);
        let seq = turan_oracle(8, &h).unwrap();
        let par = turan_oracle_with(
            8,
            &h,
            &OracleOptions {
                threads: 4,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(seq.value, par.value);
    }

    #[test]
    fn ex_shift_gap_examples() {
        assert_eq!(ex_shift_gap(10, 10, 3, 4).unwrap(), (18, 22));
        assert_eq!(ex_shift_gap(6, 6, 0, 4).unwrap(), (12, 15));
        assert_eq!(ex_shift_gap(4, 4, 1, 4).unwrap(), (6, 12));
        assert!(ex_shift_gap(3, 4, 4, 4).is_err());
    }

    #[test]
    fn formula_dispatch() {
        let r = turan_number(
            13,
            &parse_pattern("spider:2,1").unwrap(),
            MethodChoice::Formula,
        )
        .unwrap();
        assert_eq!(r.value, ex_path(13, 4).unwrap().value);
        assert!(matches!(
            turan_number(8, &make_star(3), MethodChoice::Formula),
            Err(Error::Unsupported(_))
        ));
        assert_eq!(
            turan_number(6, &make_star(3), MethodChoice::Auto)
                .unwrap()
                .method,
            TuranMethod::Oracle
        );
    }
}
