//! Pattern graphs `H`: paths, stars, spiders, double brooms, double stars
//! and disjoint unions, together with the structural data the NIM
//! constructions depend on (bipartition, tails, balance, perfect matchings).
//!
//! Patterns can be written in a small DSL:
//!
//! ```text
//! pattern := term ("+" term)*
//! term    := "path:" INT | "star:" INT | "spider:" INT ("," INT)*
//!          | "dbroom:" INT "," INT "," INT | "dstar:" INT
//! ```
//!
//! `+` is disjoint union, left-associative.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::SimpleGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Path,
    Star,
    Spider,
    DoubleBroom,
    DoubleStar,
    Union,
    Custom,
}

/// A tail `v0 v1 v2`: `v2` is a leaf hanging off `v1`, and `v1` has exactly
/// the two neighbours `v0`, `v2`.
pub type Tail = (usize, usize, usize);

#[derive(Clone, Debug)]
pub struct PatternGraph {
    graph: SimpleGraph,
    family: Family,
    spec: String,
    bipartition: Option<(Vec<usize>, Vec<usize>)>,
    tails: Vec<Tail>,
    balanced: bool,
    has_perfect_matching: bool,
}

impl PatternGraph {
    fn build(graph: SimpleGraph, family: Family, spec: String) -> Self {
        let acyclic = graph.is_acyclic();
        let bip = bipartition(&graph).ok();
        let tails = find_tails(&graph);
        let balanced = acyclic && is_balanced(&graph).unwrap_or(false);
        let has_perfect_matching = if acyclic {
            has_perfect_matching_forest(&graph).unwrap_or(false)
        } else {
            has_perfect_matching_exhaustive(&graph)
        };
        PatternGraph {
            graph,
            family,
            spec,
            bipartition: bip,
            tails,
            balanced,
            has_perfect_matching,
        }
    }

    /// Wraps an arbitrary graph (e.g. loaded from a file).
    pub fn custom(graph: SimpleGraph) -> Self {
        Self::build(graph, Family::Custom, "custom".into())
    }

    pub fn graph(&self) -> &SimpleGraph {
        &self.graph
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// DSL text that regenerates this pattern (`"custom"` for loaded graphs).
    pub fn spec(&self) -> &str {
        &self.spec
    }

    pub fn order(&self) -> usize {
        self.graph.order()
    }

    pub fn bipartition(&self) -> Option<(&[usize], &[usize])> {
        self.bipartition
            .as_ref()
            .map(|(a, b)| (a.as_slice(), b.as_slice()))
    }

    pub fn tails(&self) -> &[Tail] {
        &self.tails
    }

    pub fn is_balanced(&self) -> bool {
        self.balanced
    }

    pub fn has_perfect_matching(&self) -> bool {
        self.has_perfect_matching
    }

    pub fn is_acyclic(&self) -> bool {
        self.graph.is_acyclic()
    }

    /// Disjoint union with `other`; flags are recomputed on the result.
    pub fn union(&self, other: &PatternGraph) -> PatternGraph {
        Self::build(
            self.graph.disjoint_union(&other.graph),
            Family::Union,
            format!("{}+{}", self.spec, other.spec),
        )
    }

    pub fn summary(&self) -> PatternSummary {
        PatternSummary {
            spec: self.spec.clone(),
            family: self.family,
            n: self.order(),
            edges: self.graph.edges(),
            bipartition: self.bipartition.clone(),
            tails: self.tails.clone(),
            acyclic: self.is_acyclic(),
            balanced: self.balanced,
            has_perfect_matching: self.has_perfect_matching,
        }
    }
}

/// Serializable description of a pattern, as printed by the CLI.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PatternSummary {
    pub spec: String,
    pub family: Family,
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub bipartition: Option<(Vec<usize>, Vec<usize>)>,
    pub tails: Vec<Tail>,
    pub acyclic: bool,
    pub balanced: bool,
    pub has_perfect_matching: bool,
}

fn path_graph(vertices: usize) -> SimpleGraph {
    let mut g = SimpleGraph::empty(vertices);
    for v in 1..vertices {
        g.add_edge(v - 1, v);
    }
    g
}

/// `P_ℓ` on vertices `0..ℓ` in path order.
pub fn make_path(vertices: usize) -> PatternGraph {
    PatternGraph::build(
        path_graph(vertices),
        Family::Path,
        format!("path:{vertices}"),
    )
}

/// `K_{1,s}` with centre 0.
pub fn make_star(leaves: usize) -> PatternGraph {
    let mut g = SimpleGraph::empty(leaves + 1);
    for v in 1..=leaves {
        g.add_edge(0, v);
    }
    PatternGraph::build(g, Family::Star, format!("star:{leaves}"))
}

/// Spider with centre 0 and one branch of `ℓ_i` edges per entry; branch
/// vertices are numbered consecutively outward.
pub fn make_spider(lengths: &[usize]) -> Result<PatternGraph> {
    if lengths.is_empty() {
        return invalid("spider needs at least one branch");
    }
    if lengths.contains(&0) {
        return invalid("spider branch lengths must be at least 1");
    }
    let n = 1 + lengths.iter().sum::<usize>();
    let mut g = SimpleGraph::empty(n);
    let mut next = 1;
    for &len in lengths {
        let mut prev = 0;
        for _ in 0..len {
            g.add_edge(prev, next);
            prev = next;
            next += 1;
        }
    }
    let spec = format!(
        "spider:{}",
        lengths
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(",")
    );
    Ok(PatternGraph::build(g, Family::Spider, spec))
}

fn double_broom_graph(t: usize, s1: usize, s2: usize) -> Result<SimpleGraph> {
    if t < 2 {
        return invalid(format!(
            "double broom needs a path of at least 2 vertices (t = {t})"
        ));
    }
    if s1 == 0 || s2 == 0 {
        return invalid("double broom needs at least one leaf at each end");
    }
    let mut g = path_graph(t + s1 + s2);
    // undo the path edges past t-1, then hang the leaves
    for v in t..t + s1 + s2 {
        g.remove_edge(v - 1, v);
    }
    for v in t..t + s1 {
        g.add_edge(0, v);
    }
    for v in t + s1..t + s1 + s2 {
        g.add_edge(t - 1, v);
    }
    Ok(g)
}

/// Path `0..t` with `s1` leaves on vertex 0 and `s2` leaves on vertex `t-1`.
pub fn make_double_broom(t: usize, s1: usize, s2: usize) -> Result<PatternGraph> {
    Ok(PatternGraph::build(
        double_broom_graph(t, s1, s2)?,
        Family::DoubleBroom,
        format!("dbroom:{t},{s1},{s2}"),
    ))
}

/// Double star `S_{a-1,a-1}` on `2a` vertices.
pub fn make_double_star(a: usize) -> Result<PatternGraph> {
    if a < 2 {
        return invalid(format!("double star needs a >= 2 (a = {a})"));
    }
    Ok(PatternGraph::build(
        double_broom_graph(2, a - 1, a - 1)?,
        Family::DoubleStar,
        format!("dstar:{a}"),
    ))
}

/// Disjoint union of two forests.
pub fn forest_union(h1: &PatternGraph, h2: &PatternGraph) -> Result<PatternGraph> {
    if !h1.is_acyclic() || !h2.is_acyclic() {
        return invalid("forest union requires acyclic operands");
    }
    Ok(h1.union(h2))
}

/// Every tail `(v0, v1, v2)`, sorted.
pub fn find_tails(g: &SimpleGraph) -> Vec<Tail> {
    let mut out = Vec::new();
    for v1 in 0..g.order() {
        if g.degree(v1) != 2 {
            continue;
        }
        let mut nb = g.neighbors(v1);
        let (x, y) = (nb.next().unwrap(), nb.next().unwrap());
        if g.degree(y) == 1 {
            out.push((x, v1, y));
        }
        if g.degree(x) == 1 {
            out.push((y, v1, x));
        }
    }
    out.sort_unstable();
    out
}

/// Per-component 2-coloring, returned as `(A, B)` with `|A| ≤ |B|`.
///
/// In every component the smaller side goes to `A`; on a tie, the side of
/// the component's lowest vertex does. `A` and `B` are sorted.
pub fn bipartition(g: &SimpleGraph) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = g.order();
    let mut side = vec![u8::MAX; n];
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for comp in g.components() {
        let root = comp[0];
        side[root] = 0;
        let mut stack = vec![root];
        while let Some(u) = stack.pop() {
            for v in g.neighbors(u) {
                if side[v] == u8::MAX {
                    side[v] = 1 - side[u];
                    stack.push(v);
                } else if side[v] == side[u] {
                    return Err(Error::NotBipartite(v));
                }
            }
        }
        let (s0, s1): (Vec<usize>, Vec<usize>) = comp.iter().partition(|&&v| side[v] == 0);
        if s0.len() <= s1.len() {
            a.extend(s0);
            b.extend(s1);
        } else {
            a.extend(s1);
            b.extend(s0);
        }
    }
    a.sort_unstable();
    b.sort_unstable();
    Ok((a, b))
}

fn require_forest(g: &SimpleGraph) -> Result<()> {
    if g.is_acyclic() {
        Ok(())
    } else {
        invalid("graph has a cycle; operation is defined for forests only")
    }
}

/// Perfect matching test for forests by repeatedly matching a leaf with its
/// neighbour. Exact for forests.
pub fn has_perfect_matching_forest(g: &SimpleGraph) -> Result<bool> {
    require_forest(g)?;
    let n = g.order();
    let mut alive = vec![true; n];
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut remaining = n;
    while remaining > 0 {
        let mut leaf = None;
        for v in 0..n {
            if alive[v] {
                match deg[v] {
                    0 => return Ok(false),
                    1 if leaf.is_none() => leaf = Some(v),
                    _ => {}
                }
            }
        }
        let Some(leaf) = leaf else {
            return Err(Error::Invariant("forest without a leaf".into()));
        };
        let partner = g
            .neighbors(leaf)
            .find(|&w| alive[w])
            .expect("leaf has a live neighbour");
        alive[leaf] = false;
        alive[partner] = false;
        remaining -= 2;
        for w in g.neighbors(partner) {
            if alive[w] {
                deg[w] -= 1;
            }
        }
    }
    Ok(true)
}

/// Perfect matching test for any graph by exhaustive search: match the
/// lowest unmatched vertex with each of its unmatched neighbours in turn.
pub fn has_perfect_matching_exhaustive(g: &SimpleGraph) -> bool {
    fn go(g: &SimpleGraph, matched: &mut [bool]) -> bool {
        let Some(u) = matched.iter().position(|m| !m) else {
            return true;
        };
        matched[u] = true;
        let nbrs: Vec<usize> = g.neighbors(u).filter(|&w| !matched[w]).collect();
        for w in nbrs {
            matched[w] = true;
            if go(g, matched) {
                return true;
            }
            matched[w] = false;
        }
        matched[u] = false;
        false
    }
    g.order().is_multiple_of(2) && go(g, &mut vec![false; g.order()])
}

/// A forest is balanced when every component has equal bipartition sides.
pub fn is_balanced(g: &SimpleGraph) -> Result<bool> {
    require_forest(g)?;
    for comp in g.components() {
        let sub = g.induced(&comp);
        let (a, b) = bipartition(&sub)?;
        if a.len() != b.len() {
            return Ok(false);
        }
    }
    Ok(true)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn syntax<T>(&self, pos: usize, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos,
            msg: msg.into(),
        })
    }

    fn int(&mut self) -> Result<usize> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.syntax(start, "expected an integer");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        match text.parse::<usize>() {
            Ok(v) if v <= 1 << 20 => Ok(v),
            _ => self.syntax(start, format!("integer {text} too large")),
        }
    }

    fn term(&mut self) -> Result<PatternGraph> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_lowercase() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .to_string();
        if name.is_empty() {
            return self.syntax(start, "expected a family name");
        }
        if self.src.get(self.pos) != Some(&b':') {
            return self.syntax(self.pos, "expected ':'");
        }
        self.pos += 1;
        let mut args = vec![self.int()?];
        while self.src.get(self.pos) == Some(&b',') {
            self.pos += 1;
            args.push(self.int()?);
        }
        let arity = |want: usize| -> Result<()> {
            if args.len() == want {
                Ok(())
            } else {
                Err(Error::Syntax {
                    pos: start,
                    msg: format!("{name} takes {want} argument(s), got {}", args.len()),
                })
            }
        };
        match name.as_str() {
            "path" => {
                arity(1)?;
                if args[0] == 0 {
                    return invalid("path needs at least 1 vertex");
                }
                Ok(make_path(args[0]))
            }
            "star" => {
                arity(1)?;
                Ok(make_star(args[0]))
            }
            "spider" => make_spider(&args),
            "dbroom" => {
                arity(3)?;
                make_double_broom(args[0], args[1], args[2])
            }
            "dstar" => {
                arity(1)?;
                make_double_star(args[0])
            }
            other => self.syntax(start, format!("unknown family '{other}'")),
        }
    }
}

/// Parses the pattern DSL (see module docs).
pub fn parse_pattern(text: &str) -> Result<PatternGraph> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let mut acc = p.term()?;
    while p.src.get(p.pos) == Some(&b'+') {
        p.pos += 1;
        let rhs = p.term()?;
        acc = acc.union(&rhs);
    }
    if p.pos != p.src.len() {
        return p.syntax(p.pos, format!("unexpected '{}'", p.src[p.pos] as char));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iso::is_isomorphic;

    #[test]
    fn paths_and_stars() {
        let p2 = make_path(2);
        assert_eq!(p2.graph().edges(), vec![(0, 1)]);
        let p4 = make_path(4);
        assert_eq!(p4.tails(), &[(1, 2, 3), (2, 1, 0)]);
        let s3 = make_star(3);
        let (a, b) = s3.bipartition().unwrap();
        assert_eq!((a.len(), b.len()), (1, 3));
        assert_eq!(make_star(0).order(), 1);
    }

    #[test]
    fn spiders() {
        assert!(is_isomorphic(
            make_spider(&[1, 1, 1]).unwrap().graph(),
            make_star(3).graph()
        ));
        assert!(is_isomorphic(
            make_spider(&[2, 2]).unwrap().graph(),
            make_path(5).graph()
        ));
        let s = make_spider(&[2, 2, 1]).unwrap();
        assert_eq!(s.order(), 6);
        assert_eq!(s.graph().degree_sequence(), vec![3, 2, 2, 1, 1, 1]);
        assert_eq!(s.family(), Family::Spider);
        assert!(make_spider(&[]).is_err());
        assert!(make_spider(&[2, 0]).is_err());
    }

    #[test]
    fn double_brooms_and_stars() {
        assert!(is_isomorphic(
            make_double_broom(2, 1, 1).unwrap().graph(),
            make_path(4).graph()
        ));
        let s22 = make_double_broom(2, 2, 2).unwrap();
        assert!(!s22.has_perfect_matching());
        let b = make_double_broom(3, 1, 2).unwrap();
        assert_eq!(b.order(), 6);
        let d = b.graph();
        assert_eq!((d.degree(0), d.degree(2)), (2, 3));
        assert!(make_double_broom(1, 1, 1).is_err());

        let ds2 = make_double_star(2).unwrap();
        assert!(is_isomorphic(ds2.graph(), make_path(4).graph()));
        assert!(ds2.has_perfect_matching());
        let ds3 = make_double_star(3).unwrap();
        assert!(ds3.is_balanced());
        assert!(!ds3.has_perfect_matching());
        let ds4 = make_double_star(4).unwrap();
        assert_eq!(ds4.graph().degree_sequence(), vec![4, 4, 1, 1, 1, 1, 1, 1]);
        assert!(make_double_star(1).is_err());
    }

    #[test]
    fn forest_unions() {
        let h = forest_union(&make_double_star(3).unwrap(), &make_path(6)).unwrap();
        assert_eq!(h.order(), 12);
        assert!(h.is_balanced());
        assert!(!h.has_perfect_matching());

        let m2 = forest_union(&make_path(2), &make_path(2)).unwrap();
        assert!(m2.has_perfect_matching());
        let pp = forest_union(&make_path(4), &make_path(4)).unwrap();
        assert!(pp.is_balanced() && pp.has_perfect_matching());

        let tri = PatternGraph::custom(SimpleGraph::complete(3));
        assert!(forest_union(&tri, &make_path(2)).is_err());
    }

    #[test]
    fn tails_of_examples() {
        assert!(find_tails(make_star(3).graph()).is_empty());
        // S22 occupies 0..6, P6 occupies 6..12 with path order 6-7-8-9-10-11
        let h = parse_pattern("dstar:3+path:6").unwrap();
        assert_eq!(h.tails(), &[(8, 7, 6), (9, 10, 11)]);
    }

    #[test]
    fn bipartition_conventions() {
        let c4 = SimpleGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let (a, b) = bipartition(&c4).unwrap();
        assert_eq!((a, b), (vec![0, 2], vec![1, 3]));
        assert!(matches!(
            bipartition(&SimpleGraph::complete(3)),
            Err(Error::NotBipartite(_))
        ));
    }

    #[test]
    fn forest_ops_reject_cycles() {
        let c4 = SimpleGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert!(has_perfect_matching_forest(&c4).is_err());
        assert!(is_balanced(&c4).is_err());
        // the custom pattern still gets a flag via exhaustive search
        assert!(PatternGraph::custom(c4).has_perfect_matching());
    }

    #[test]
    fn dsl_examples_and_errors() {
        assert!(is_isomorphic(
            parse_pattern("path:4").unwrap().graph(),
            make_path(4).graph()
        ));
        let h = parse_pattern("dstar:3+path:6").unwrap();
        assert_eq!(h.spec(), "dstar:3+path:6");
        assert_eq!(h.family(), Family::Union);
        assert_eq!(parse_pattern("spider:2,2,1").unwrap().order(), 6);

        match parse_pattern("path:4+") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 7),
            other => panic!("{other:?}"),
        }
        match parse_pattern("path4") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_pattern("cycle:4"),
            Err(Error::Syntax { pos: 0, .. })
        ));
        assert!(matches!(
            parse_pattern("path:4,5"),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(
            parse_pattern("path:4 "),
            Err(Error::Syntax { pos: 6, .. })
        ));
        assert!(matches!(
            parse_pattern("dbroom:1,2,3"),
            Err(Error::InvalidArgument(_))
        ));
    }
}
