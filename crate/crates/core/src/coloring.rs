//! Edge colorings of `K_n` stored as one color per canonical edge index.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{all_pairs, check_permutation, dot_id, edge_index, pair_count, SimpleGraph};

pub type Color = u16;

/// A `k`-coloring of `E(K_n)`. Color index `i` stands for the class `c_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ColoringFile", into = "ColoringFile")]
pub struct EdgeColoring {
    n: usize,
    k: usize,
    colors: Vec<Color>,
}

/// On-disk form: `{"n": …, "k": …, "colors": [...]}` in canonical edge order.
#[derive(Serialize, Deserialize)]
struct ColoringFile {
    n: usize,
    k: usize,
    colors: Vec<u64>,
}

impl From<EdgeColoring> for ColoringFile {
    fn from(c: EdgeColoring) -> Self {
        c.to_file()
    }
}

impl TryFrom<ColoringFile> for EdgeColoring {
    type Error = Error;

    fn try_from(file: ColoringFile) -> Result<Self> {
        EdgeColoring::from_file(file)
    }
}

impl EdgeColoring {
    pub fn new(n: usize, k: usize, colors: Vec<Color>) -> Result<Self> {
        validate_shape(n, k, colors.len())?;
        if let Some((idx, &c)) = colors.iter().enumerate().find(|(_, &c)| c as usize >= k) {
            return invalid(format!("colors[{idx}] = {c} >= k = {k}"));
        }
        Ok(EdgeColoring { n, k, colors })
    }

    /// Every edge gets `color`.
    pub fn uniform(n: usize, k: usize, color: Color) -> Result<Self> {
        Self::new(n, k, vec![color; pair_count(n)])
    }

    /// Uniformly random coloring drawn from `rng`.
    pub fn random<R: Rng>(n: usize, k: usize, rng: &mut R) -> Result<Self> {
        validate_shape(n, k, pair_count(n))?;
        let colors = (0..pair_count(n))
            .map(|_| rng.gen_range(0..k) as Color)
            .collect();
        Ok(EdgeColoring { n, k, colors })
    }

    /// Two-coloring with color 0 on `graph`'s edges and color 1 elsewhere.
    pub fn from_graph(graph: &SimpleGraph) -> Self {
        let n = graph.order();
        let colors = all_pairs(n)
            .into_iter()
            .map(|(u, v)| if graph.has_edge(u, v) { 0 } else { 1 })
            .collect();
        EdgeColoring { n, k: 2, colors }
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn color_count(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    pub fn color_of(&self, u: usize, v: usize) -> Result<Color> {
        Ok(self.colors[edge_index(u, v, self.n)?])
    }

    #[inline]
    pub fn color_at(&self, index: usize) -> Color {
        self.colors[index]
    }

    pub fn set_color_at(&mut self, index: usize, color: Color) -> Result<()> {
        if index >= self.colors.len() {
            return invalid(format!("edge index {index} out of range"));
        }
        if color as usize >= self.k {
            return invalid(format!("color {color} >= k = {}", self.k));
        }
        self.colors[index] = color;
        Ok(())
    }

    /// The graph `G_i` of all edges with color `i`.
    pub fn color_class(&self, i: usize) -> Result<SimpleGraph> {
        if i >= self.k {
            return invalid(format!("color {i} >= k = {}", self.k));
        }
        let mut g = SimpleGraph::empty(self.n);
        for ((u, v), &c) in all_pairs(self.n).into_iter().zip(&self.colors) {
            if c as usize == i {
                g.add_edge(u, v);
            }
        }
        Ok(g)
    }

    /// All `k` color classes in one pass.
    pub fn color_classes(&self) -> Vec<SimpleGraph> {
        let mut gs = vec![SimpleGraph::empty(self.n); self.k];
        for ((u, v), &c) in all_pairs(self.n).into_iter().zip(&self.colors) {
            gs[c as usize].add_edge(u, v);
        }
        gs
    }

    /// Renames color `c` to `perm[c]`.
    pub fn permute_colors(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.k)?;
        Ok(EdgeColoring {
            n: self.n,
            k: self.k,
            colors: self
                .colors
                .iter()
                .map(|&c| perm[c as usize] as Color)
                .collect(),
        })
    }

    /// Coloring `c'` with `c'(perm[u], perm[v]) = c(u, v)`.
    pub fn relabel_vertices(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.n)?;
        let mut colors = vec![0; self.colors.len()];
        for (idx, (u, v)) in all_pairs(self.n).into_iter().enumerate() {
            colors[edge_index(perm[u], perm[v], self.n)?] = self.colors[idx];
        }
        Ok(EdgeColoring {
            n: self.n,
            k: self.k,
            colors,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("coloring serialization")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self.to_file()).expect("coloring serialization")
    }

    fn to_file(&self) -> ColoringFile {
        ColoringFile {
            n: self.n,
            k: self.k,
            colors: self.colors.iter().map(|&c| c as u64).collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ColoringFile = serde_json::from_str(text)?;
        Self::from_file(file)
    }

    pub fn from_json_value(value: serde_json::Value) -> Result<Self> {
        Self::from_file(serde_json::from_value(value)?)
    }

    fn from_file(file: ColoringFile) -> Result<Self> {
        validate_shape(file.n, file.k, file.colors.len())?;
        let mut colors = Vec::with_capacity(file.colors.len());
        for (idx, c) in file.colors.into_iter().enumerate() {
            if c >= file.k as u64 {
                return invalid(format!("colors[{idx}] = {c} >= k = {}", file.k));
            }
            colors.push(c as Color);
        }
        Ok(EdgeColoring {
            n: file.n,
            k: file.k,
            colors,
        })
    }

    /// Graphviz rendering of color class `i` (all vertices kept).
    pub fn class_to_dot(&self, i: usize) -> Result<String> {
        Ok(self.color_class(i)?.to_dot(&dot_id(&format!("color_{i}"))))
    }
}

fn validate_shape(n: usize, k: usize, len: usize) -> Result<()> {
    if k == 0 {
        return invalid("k must be at least 1");
    }
    if k > Color::MAX as usize + 1 {
        return Err(Error::ResourceLimit(format!(
            "k = {k} exceeds {}",
            Color::MAX as usize + 1
        )));
    }
    if len != pair_count(n) {
        return invalid(format!("colors length {len} != {}", pair_count(n)));
    }
    Ok(())
}
