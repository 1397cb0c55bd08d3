//! Maximising the NIM count over all colorings: exhaustive branch and bound
//! for tiny `n`, seeded steepest-ascent hill climbing beyond that.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coloring::{Color, EdgeColoring};
use crate::constructions::{extremal_overlay, p2k_multicoloring, tail_construction};
use crate::error::{invalid, Error, Result};
use crate::graph::{all_pairs, pair_count, SimpleGraph};
use crate::nim::{nim_edges_with, NimEngine, NimOptions};
use crate::pattern::{parse_pattern, PatternGraph};
use crate::pool::in_pool;
use crate::turan::{extremal_path_graph, path_length, turan_number, MethodChoice, Recipe};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMethod {
    Exhaustive,
    HillClimb,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchResult {
    pub n: usize,
    pub k: usize,
    pub pattern: String,
    pub best_count: usize,
    pub witness: EdgeColoring,
    pub method: SearchMethod,
    pub exhaustive: bool,
    pub colorings_examined: u64,
    #[serde(with = "secs")]
    pub elapsed: Duration,
}

mod secs {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let secs = f64::deserialize(d)?;
        Duration::try_from_secs_f64(secs).map_err(serde::de::Error::custom)
    }
}

impl SearchResult {
    /// Equality of everything except the wall-clock time.
    pub fn same_outcome(&self, other: &SearchResult) -> bool {
        (
            self.n,
            self.k,
            &self.pattern,
            self.best_count,
            &self.witness,
        ) == (
            other.n,
            other.k,
            &other.pattern,
            other.best_count,
            &other.witness,
        ) && (self.method, self.exhaustive, self.colorings_examined)
            == (other.method, other.exhaustive, other.colorings_examined)
    }

    /// Recomputes the witness's NIM count and checks it against `best_count`.
    pub fn revalidate(&self) -> Result<()> {
        let h = parse_pattern(&self.pattern)?;
        let report = nim_edges_with(&self.witness, &h, &wide_nim())?;
        if report.count != self.best_count {
            return Err(Error::Invariant(format!(
                "witness has {} NIM edges, record claims {}",
                report.count, self.best_count
            )));
        }
        Ok(())
    }
}

fn wide_nim() -> NimOptions {
    NimOptions {
        max_n: usize::MAX,
        ..NimOptions::default()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ExhaustiveOptions {
    /// Upper limit on `k^(m-1)`, the number of colorings with edge 0 fixed.
    pub budget: u64,
    pub threads: usize,
}

impl Default for ExhaustiveOptions {
    fn default() -> Self {
        ExhaustiveOptions {
            budget: 1 << 20,
            threads: 1,
        }
    }
}

const SHARD_DEPTH: usize = 6;

pub fn exhaustive_f(n: usize, k: usize, h: &PatternGraph) -> Result<SearchResult> {
    exhaustive_f_with(n, k, h, &ExhaustiveOptions::default())
}

/// Exact maximum over all `k`-colorings of `K_n`.
///
/// Edge 0 is pinned to color 0. The remaining space is split by the colors
/// of the next few edges into shards searched independently, each with its
/// own incumbent, so the result and the leaf count do not depend on the
/// thread count. A branch is cut once the edges already known to be covered
/// leave no room to beat the shard's incumbent: covering is monotone under
/// adding edges to a class.
pub fn exhaustive_f_with(
    n: usize,
    k: usize,
    h: &PatternGraph,
    opts: &ExhaustiveOptions,
) -> Result<SearchResult> {
    let start = Instant::now();
    if k == 0 {
        return invalid("k must be at least 1");
    }
    if h.order() < 2 {
        return invalid("pattern needs at least 2 vertices");
    }
    let m = pair_count(n);
    let leaves = u32::try_from(m.saturating_sub(1))
        .ok()
        .and_then(|e| (k as u64).checked_pow(e));
    match leaves {
        Some(l) if l <= opts.budget => {}
        _ => {
            return Err(Error::ResourceLimit(format!(
                "{k}^{} colorings exceed the budget of {}; use hill climbing instead",
                m.saturating_sub(1),
                opts.budget
            )))
        }
    }
    let result = |best_count, colors: Vec<Color>, examined| -> Result<SearchResult> {
        Ok(SearchResult {
            n,
            k,
            pattern: h.spec().to_string(),
            best_count,
            witness: EdgeColoring::new(n, k, colors)?,
            method: SearchMethod::Exhaustive,
            exhaustive: true,
            colorings_examined: examined,
            elapsed: start.elapsed(),
        })
    };
    if m == 0 {
        return result(0, Vec::new(), 1);
    }

    let engine = NimEngine::new(h.graph());
    let edges = all_pairs(n);
    let depth = SHARD_DEPTH.min(m - 1);
    let shards = (k as u64).pow(depth as u32);
    let run = |s: u64| {
        let mut prefix = vec![0 as Color; depth];
        let mut rest = s;
        for slot in prefix.iter_mut().rev() {
            *slot = (rest % k as u64) as Color;
            rest /= k as u64;
        }
        Shard::new(&engine, &edges, n, k).run(&prefix)
    };
    let outcomes: Vec<ShardOutcome> = if opts.threads == 1 {
        (0..shards).map(run).collect()
    } else {
        in_pool(opts.threads, || {
            (0..shards).into_par_iter().map(run).collect()
        })?
    };
    let examined = outcomes.iter().map(|o| o.examined).sum();
    let mut best: Option<(usize, Vec<Color>)> = None;
    for o in outcomes {
        if let Some((v, colors)) = o.best {
            if best.as_ref().is_none_or(|(b, _)| v > *b) {
                best = Some((v, colors));
            }
        }
    }
    let (value, colors) = best.expect("the all-zero shard reaches at least one leaf");
    result(value, colors, examined)
}

struct ShardOutcome {
    best: Option<(usize, Vec<Color>)>,
    examined: u64,
}

struct Shard<'a> {
    engine: &'a NimEngine,
    edges: &'a [(usize, usize)],
    m: usize,
    k: usize,
    colors: Vec<Color>,
    classes: Vec<SimpleGraph>,
    covered: Vec<usize>,
    covered_total: usize,
    best: Option<(usize, Vec<Color>)>,
    examined: u64,
}

impl<'a> Shard<'a> {
    fn new(engine: &'a NimEngine, edges: &'a [(usize, usize)], n: usize, k: usize) -> Self {
        Shard {
            engine,
            edges,
            m: edges.len(),
            k,
            colors: vec![0; edges.len()],
            classes: vec![SimpleGraph::empty(n); k],
            covered: vec![0; k],
            covered_total: 0,
            best: None,
            examined: 0,
        }
    }

    fn run(mut self, prefix: &[Color]) -> ShardOutcome {
        self.assign(0, 0);
        for (i, &c) in prefix.iter().enumerate() {
            self.assign(i + 1, c);
        }
        self.dfs(prefix.len() + 1);
        ShardOutcome {
            best: self.best,
            examined: self.examined,
        }
    }

    fn bound(&self) -> usize {
        self.m - self.covered_total
    }

    fn beaten(&self) -> bool {
        self.best.as_ref().is_some_and(|(b, _)| self.bound() <= *b)
    }

    /// Colors edge `e` with `c` and returns the class's previous covered count.
    fn assign(&mut self, e: usize, c: Color) -> usize {
        let (u, v) = self.edges[e];
        let ci = c as usize;
        self.colors[e] = c;
        self.classes[ci].add_edge(u, v);
        let before = self.covered[ci];
        let class = &self.classes[ci];
        let now = class.edge_count() - self.engine.class_nim_count(class);
        self.covered[ci] = now;
        self.covered_total = self.covered_total + now - before;
        before
    }

    fn unassign(&mut self, e: usize, before: usize) {
        let (u, v) = self.edges[e];
        let ci = self.colors[e] as usize;
        self.classes[ci].remove_edge(u, v);
        self.covered_total = self.covered_total + before - self.covered[ci];
        self.covered[ci] = before;
    }

    fn dfs(&mut self, e: usize) {
        if self.beaten() {
            return;
        }
        if e == self.m {
            self.examined += 1;
            self.best = Some((self.bound(), self.colors.clone()));
            return;
        }
        for c in 0..self.k as Color {
            let before = self.assign(e, c);
            self.dfs(e + 1);
            self.unassign(e, before);
        }
    }
}

/// Colorings known to do well, used as hill-climbing starting points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedConstruction {
    Overlay,
    Tail,
    P2k,
}

impl std::str::FromStr for SeedConstruction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "overlay" => Ok(SeedConstruction::Overlay),
            "tail" => Ok(SeedConstruction::Tail),
            "p2k" => Ok(SeedConstruction::P2k),
            other => invalid(format!("unknown construction seed {other:?}")),
        }
    }
}

/// An `H`-free graph on `n` vertices with `ex(n, H)` edges, when one can be
/// produced: extremal path graphs, the balanced-forest recipe, or the
/// oracle's witness.
pub fn extremal_graph(n: usize, h: &PatternGraph) -> Result<SimpleGraph> {
    if let Some(l) = path_length(h.graph()) {
        if l >= 2 && n >= 1 {
            let a = n / (l - 1);
            return extremal_path_graph(n, l, a);
        }
    }
    let t = turan_number(n, h, MethodChoice::Auto)?;
    match (t.witness, t.recipe) {
        (Some(edges), _) => SimpleGraph::from_edges(n, &edges),
        (
            None,
            Some(Recipe::Forest {
                m,
                perfect_matching,
                ..
            }),
        ) if n >= m - 1 => {
            let mut hub = SimpleGraph::empty(m - 1);
            if perfect_matching {
                hub = SimpleGraph::complete(m - 1);
            }
            Ok(hub.join(&SimpleGraph::empty(n - m + 1)))
        }
        _ => Err(Error::Unsupported(format!(
            "no extremal graph available for {} at n = {n}",
            h.spec()
        ))),
    }
}

/// The construction coloring for `(n, k, H)`.
pub fn construction_seed(
    kind: SeedConstruction,
    n: usize,
    k: usize,
    h: &PatternGraph,
) -> Result<EdgeColoring> {
    match kind {
        SeedConstruction::Overlay => {
            if k < 2 {
                return invalid("overlay needs at least 2 colors");
            }
            let red = extremal_graph(n, h)?;
            let two = extremal_overlay(n, h, &red)?;
            EdgeColoring::new(n, k, two.colors().to_vec())
        }
        SeedConstruction::Tail => {
            if k != 2 {
                return invalid("tail construction is a 2-coloring");
            }
            Ok(tail_construction(n, h)?.coloring)
        }
        SeedConstruction::P2k => match path_length(h.graph()) {
            Some(l) if l % 2 == 0 && l == k => Ok(p2k_multicoloring(n, l / 2)?.0),
            _ => invalid(format!(
                "p2k seed needs H = P_2k with k = 2k colors, got {} and k = {k}",
                h.spec()
            )),
        },
    }
}

#[derive(Clone, Copy, Debug)]
pub struct HillOptions {
    pub seed: u64,
    /// Maximum improving moves per restart.
    pub iterations: usize,
    pub restarts: usize,
    /// Replaces the random start of the first restart.
    pub seed_construction: Option<SeedConstruction>,
    pub max_n: usize,
}

impl Default for HillOptions {
    fn default() -> Self {
        HillOptions {
            seed: 0,
            iterations: 1000,
            restarts: 1,
            seed_construction: None,
            max_n: 40,
        }
    }
}

/// Steepest-ascent local search over single-edge recolorings.
///
/// Every restart starts from a fresh coloring drawn from a ChaCha8 stream
/// seeded with `seed` (the first restart takes the construction seed when
/// one is given). Each step applies the recoloring with the largest gain;
/// ties go to the lowest edge index, then the lowest color. The best
/// coloring over all restarts is returned, the earliest restart on ties.
pub fn hill_climb_f(
    n: usize,
    k: usize,
    h: &PatternGraph,
    opts: &HillOptions,
) -> Result<SearchResult> {
    let start = Instant::now();
    if k == 0 {
        return invalid("k must be at least 1");
    }
    if h.order() < 2 {
        return invalid("pattern needs at least 2 vertices");
    }
    if n > opts.max_n {
        return Err(Error::ResourceLimit(format!(
            "n = {n} above the hill-climb limit {}",
            opts.max_n
        )));
    }
    let engine = NimEngine::new(h.graph());
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut examined = 0u64;
    let mut best: Option<(usize, EdgeColoring)> = None;
    for r in 0..opts.restarts.max(1) {
        let initial = match (r, opts.seed_construction) {
            (0, Some(kind)) => construction_seed(kind, n, k, h)?,
            _ => EdgeColoring::random(n, k, &mut rng)?,
        };
        let (value, coloring) = climb(&engine, initial, opts.iterations, &mut examined);
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, coloring));
        }
    }
    let (best_count, witness) = best.expect("at least one restart");
    Ok(SearchResult {
        n,
        k,
        pattern: h.spec().to_string(),
        best_count,
        witness,
        method: SearchMethod::HillClimb,
        exhaustive: false,
        colorings_examined: examined,
        elapsed: start.elapsed(),
    })
}

fn climb(
    engine: &NimEngine,
    mut c: EdgeColoring,
    iterations: usize,
    examined: &mut u64,
) -> (usize, EdgeColoring) {
    let edges = all_pairs(c.order());
    let k = c.color_count();
    let mut classes = c.color_classes();
    let mut nim: Vec<usize> = classes.iter().map(|g| engine.class_nim_count(g)).collect();
    *examined += 1;
    for _ in 0..iterations {
        let mut step: Option<(isize, usize, Color, usize, usize)> = None;
        for (e, &(u, v)) in edges.iter().enumerate() {
            let old = c.color_at(e) as usize;
            classes[old].remove_edge(u, v);
            let old_nim = engine.class_nim_count(&classes[old]);
            for new in 0..k {
                if new == old {
                    continue;
                }
                classes[new].add_edge(u, v);
                let new_nim = engine.class_nim_count(&classes[new]);
                classes[new].remove_edge(u, v);
                *examined += 1;
                let gain = (old_nim + new_nim) as isize - (nim[old] + nim[new]) as isize;
                if gain > 0 && step.is_none_or(|(g, ..)| gain > g) {
                    step = Some((gain, e, new as Color, old_nim, new_nim));
                }
            }
            classes[old].add_edge(u, v);
        }
        let Some((_, e, new, old_nim, new_nim)) = step else {
            break;
        };
        let (u, v) = edges[e];
        let old = c.color_at(e) as usize;
        classes[old].remove_edge(u, v);
        classes[new as usize].add_edge(u, v);
        nim[old] = old_nim;
        nim[new as usize] = new_nim;
        c.set_color_at(e, new).expect("color below k");
    }
    (nim.iter().sum(), c)
}

/// A search value set against the Turán number.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TuranComparison {
    pub n: usize,
    pub k: usize,
    pub pattern: String,
    pub best_count: usize,
    pub ex: u64,
    /// `(k-1)·ex(n, H)`, equal to `ex` for two colors.
    pub reference: u64,
    pub gap: i64,
    pub label: String,
}

pub fn compare_to_turan(result: &SearchResult) -> Result<TuranComparison> {
    let h = parse_pattern(&result.pattern)?;
    let t = turan_number(result.n, &h, MethodChoice::Auto).map_err(|e| match e {
        Error::ResourceLimit(msg) | Error::Unsupported(msg) => Error::Unsupported(format!(
            "no Turan value for {} at n = {}: {msg}",
            result.pattern, result.n
        )),
        other => other,
    })?;
    let reference = (result.k.max(1) as u64 - 1) * t.value;
    Ok(TuranComparison {
        n: result.n,
        k: result.k,
        pattern: result.pattern.clone(),
        best_count: result.best_count,
        ex: t.value,
        reference,
        gap: result.best_count as i64 - reference as i64,
        label: format!("observed at n={}; theorems are asymptotic", result.n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::{make_path, make_star};

    #[test]
    fn exhaustive_small_paths() {
        let p3 = make_path(3);
        for (n, want) in [(3, 1), (4, 2), (5, 2)] {
            let r = exhaustive_f(n, 2, &p3).unwrap();
            assert_eq!(r.best_count, want, "n = {n}");
            r.revalidate().unwrap();
        }
    }

    #[test]
    fn exhaustive_is_thread_independent() {
        let h = make_star(3);
        let a = exhaustive_f(5, 2, &h).unwrap();
        let opts = ExhaustiveOptions {
            threads: 3,
            ..ExhaustiveOptions::default()
        };
        let b = exhaustive_f_with(5, 2, &h, &opts).unwrap();
        assert!(a.same_outcome(&b));
    }

    #[test]
    fn exhaustive_budget() {
        let err = exhaustive_f(8, 2, &make_path(3)).unwrap_err();
        assert!(matches!(err, Error::ResourceLimit(ref m) if m.contains("hill")));
        assert_eq!(exhaustive_f(1, 2, &make_path(3)).unwrap().best_count, 0);
    }

    #[test]
    fn hill_from_seeds() {
        let opts = HillOptions {
            seed_construction: Some(SeedConstruction::P2k),
            iterations: 0,
            ..HillOptions::default()
        };
        assert!(
            hill_climb_f(13, 4, &make_path(4), &opts)
                .unwrap()
                .best_count
                >= 39
        );
        let opts = HillOptions {
            restarts: 5,
            seed_construction: Some(SeedConstruction::Overlay),
            ..HillOptions::default()
        };
        let r = hill_climb_f(7, 2, &make_path(4), &opts).unwrap();
        assert!(r.best_count >= 6);
        r.revalidate().unwrap();
    }

    #[test]
    fn hill_is_deterministic() {
        let opts = HillOptions {
            seed: 7,
            restarts: 3,
            ..HillOptions::default()
        };
        let a = hill_climb_f(6, 3, &make_path(3), &opts).unwrap();
        let b = hill_climb_f(6, 3, &make_path(3), &opts).unwrap();
        assert!(a.same_outcome(&b));
        a.revalidate().unwrap();
    }

    #[test]
    fn comparisons() {
        let r = exhaustive_f(5, 2, &make_path(3)).unwrap();
        assert_eq!(compare_to_turan(&r).unwrap().gap, 0);
        let opts = HillOptions {
            seed_construction: Some(SeedConstruction::P2k),
            iterations: 0,
            ..HillOptions::default()
        };
        let r = hill_climb_f(13, 4, &make_path(4), &opts).unwrap();
        let cmp = compare_to_turan(&r).unwrap();
        assert_eq!((cmp.reference, cmp.gap), (36, 3));
    }

    #[test]
    fn result_json_round_trip() {
        let r = exhaustive_f(4, 2, &make_path(3)).unwrap();
        let back: SearchResult = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert!(r.same_outcome(&back));
    }
}
