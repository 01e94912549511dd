//! Minimality of the metallic Wang shifts.
//!
//! A nonempty self-similar subshift of a primitive expansive substitution
//! is minimal exactly when every small pattern that both occurs in the
//! shift and recurs under the substitution's straddling dynamics already
//! belongs to the substitutive language. This module builds the three
//! straddling graphs (2x2 squares and both dominoes), extracts their
//! recurrent vertices, and compares solver-computed languages against
//! substitutive ones to evaluate that criterion.

use std::collections::BTreeSet;
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::error::{Error, Result};
use crate::metallic::build_omega;
use crate::solver::{patterns_with_surrounding, SolverConfig};
use crate::tiles::WangTileSet;
use crate::words::{Pattern2D, Substitution2D};

/// The three pattern shapes whose straddling dynamics certify minimality.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GraphShape {
    TwoByTwo,
    TwoByOne,
    OneByTwo,
}

impl GraphShape {
    pub const ALL: [GraphShape; 3] = [GraphShape::TwoByTwo, GraphShape::TwoByOne, GraphShape::OneByTwo];

    pub fn dims(self) -> (usize, usize) {
        match self {
            GraphShape::TwoByTwo => (2, 2),
            GraphShape::TwoByOne => (2, 1),
            GraphShape::OneByTwo => (1, 2),
        }
    }
}

impl fmt::Display for GraphShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (w, h) = self.dims();
        write!(f, "{w}x{h}")
    }
}

/// The straddling graph of one shape.
///
/// Vertices are the shape-patterns whose letters are dimension
/// compatible: horizontal neighbors must have images of equal height,
/// vertical neighbors images of equal width. An edge `u -> v` means that
/// `v` occurs straddling the images of `u`'s letters — centered on the
/// crossing for squares, on the shared boundary for dominoes — so paths
/// trace how straddling patterns reproduce under the substitution.
#[derive(Clone, Debug)]
pub struct AdjacencyGraph {
    pub shape: GraphShape,
    /// All vertices, sorted.
    pub vertices: Vec<Pattern2D>,
    /// Directed edges as index pairs into `vertices`.
    pub edges: BTreeSet<(usize, usize)>,
}

impl AdjacencyGraph {
    pub fn vertex_index(&self, p: &Pattern2D) -> Option<usize> {
        self.vertices.binary_search(p).ok()
    }
}

/// Builds the straddling graph of `shape` for the substitution `s`.
///
/// A straddling occurrence whose letters are not dimension compatible
/// cannot be a vertex and contributes no edge; for substitutions with a
/// product structure this never happens.
pub fn build_graph(s: &Substitution2D, shape: GraphShape) -> Result<AdjacencyGraph> {
    let k = s.letters();
    let width = |a: usize| s.image(a).width();
    let height = |a: usize| s.image(a).height();

    let mut set: BTreeSet<Pattern2D> = BTreeSet::new();
    match shape {
        GraphShape::TwoByOne => {
            for e in 0..k {
                for f in 0..k {
                    if height(e) == height(f) {
                        set.insert(Pattern2D::new(2, 1, vec![e, f])?);
                    }
                }
            }
        }
        GraphShape::OneByTwo => {
            for g in 0..k {
                for e in 0..k {
                    if width(e) == width(g) {
                        set.insert(Pattern2D::new(1, 2, vec![g, e])?);
                    }
                }
            }
        }
        GraphShape::TwoByTwo => {
            for c in 0..k {
                for d in 0..k {
                    for a in 0..k {
                        for b in 0..k {
                            if height(a) == height(b)
                                && height(c) == height(d)
                                && width(a) == width(c)
                                && width(b) == width(d)
                            {
                                set.insert(Pattern2D::new(2, 2, vec![c, d, a, b])?);
                            }
                        }
                    }
                }
            }
        }
    }
    let vertices: Vec<Pattern2D> = set.into_iter().collect();

    let mut edges = BTreeSet::new();
    for (si, v) in vertices.iter().enumerate() {
        for target in straddling_targets(s, shape, v)? {
            if let Ok(ti) = vertices.binary_search(&target) {
                edges.insert((si, ti));
            }
        }
    }
    Ok(AdjacencyGraph { shape, vertices, edges })
}

/// The patterns straddling the images of `v`'s letters.
fn straddling_targets(s: &Substitution2D, shape: GraphShape, v: &Pattern2D) -> Result<Vec<Pattern2D>> {
    let mut out = Vec::new();
    match shape {
        GraphShape::TwoByOne => {
            let left = s.image(v.get(0, 0));
            let right = s.image(v.get(1, 0));
            for j in 0..left.height() {
                let a = left.get(left.width() - 1, j);
                let b = right.get(0, j);
                out.push(Pattern2D::new(2, 1, vec![a, b])?);
            }
        }
        GraphShape::OneByTwo => {
            let top = s.image(v.get(0, 1));
            let bottom = s.image(v.get(0, 0));
            for i in 0..top.width() {
                let a = top.get(i, 0);
                let c = bottom.get(i, bottom.height() - 1);
                out.push(Pattern2D::new(1, 2, vec![c, a])?);
            }
        }
        GraphShape::TwoByTwo => {
            let tl = s.image(v.get(0, 1));
            let tr = s.image(v.get(1, 1));
            let bl = s.image(v.get(0, 0));
            let br = s.image(v.get(1, 0));
            let a = tl.get(tl.width() - 1, 0);
            let b = tr.get(0, 0);
            let c = bl.get(bl.width() - 1, bl.height() - 1);
            let d = br.get(0, br.height() - 1);
            out.push(Pattern2D::new(2, 2, vec![c, d, a, b])?);
        }
    }
    Ok(out)
}

/// The vertices lying on a directed cycle: members of a strongly
/// connected component of size at least two, plus self-looped vertices.
pub fn recurrent_vertices(g: &AdjacencyGraph) -> BTreeSet<Pattern2D> {
    let mut graph: DiGraph<(), ()> = DiGraph::new();
    let nodes: Vec<_> = (0..g.vertices.len()).map(|_| graph.add_node(())).collect();
    for &(a, b) in &g.edges {
        graph.add_edge(nodes[a], nodes[b], ());
    }
    let mut recurrent = BTreeSet::new();
    for component in tarjan_scc(&graph) {
        if component.len() >= 2 {
            for node in component {
                recurrent.insert(g.vertices[node.index()].clone());
            }
        }
    }
    for &(a, b) in &g.edges {
        if a == b {
            recurrent.insert(g.vertices[a].clone());
        }
    }
    recurrent
}

/// Search radii for the three shape languages.
#[derive(Clone, Copy, Debug)]
pub struct MinimalityRadii {
    pub two_by_two: usize,
    pub two_by_one: usize,
    pub one_by_two: usize,
}

impl MinimalityRadii {
    pub fn for_shape(&self, shape: GraphShape) -> usize {
        match shape {
            GraphShape::TwoByTwo => self.two_by_two,
            GraphShape::TwoByOne => self.two_by_one,
            GraphShape::OneByTwo => self.one_by_two,
        }
    }
}

impl Default for MinimalityRadii {
    fn default() -> Self {
        MinimalityRadii { two_by_two: 3, two_by_one: 1, one_by_two: 1 }
    }
}

/// What the criterion saw for one shape.
#[derive(Clone, Debug)]
pub struct ShapeReport {
    pub shape: GraphShape,
    /// Surrounding radius the solver language was computed at. The
    /// solver language over-approximates the true one, so criterion
    /// verdicts derived from it are sound.
    pub radius: usize,
    pub solver_language: BTreeSet<Pattern2D>,
    pub substitutive_language: BTreeSet<Pattern2D>,
    /// `None` when the two languages were equal outright and the
    /// recurrent-vertex computation was skipped.
    pub recurrent: Option<BTreeSet<Pattern2D>>,
    pub languages_equal: bool,
    /// Patterns that occur, recur, and are not substitutive — any entry
    /// refutes the criterion for this shape.
    pub violations: BTreeSet<Pattern2D>,
    /// Set when a solver resource cap interrupted this shape.
    pub inconclusive: Option<String>,
}

impl ShapeReport {
    pub fn holds(&self) -> bool {
        self.inconclusive.is_none() && self.violations.is_empty()
    }
}

/// Outcome of the minimality criterion across all three shapes.
#[derive(Clone, Debug)]
pub struct MinimalityReport {
    pub n: u16,
    pub shapes: Vec<ShapeReport>,
    /// True when some shape hit a resource cap before finishing.
    pub inconclusive: bool,
    /// True when every shape finished and the criterion holds
    /// everywhere.
    pub minimal: bool,
}

/// Evaluates the minimality criterion for the order-`n` core set.
///
/// For each shape the occurring patterns are computed from tile
/// surroundings at the configured radius and the substitutive patterns
/// from the block substitution's language. When the two agree the shape
/// is settled; otherwise the recurrent vertices of the straddling graph
/// are computed, and any occurring recurrent pattern outside the
/// substitutive language is a violation. A solver resource cap marks the
/// shape (and the report) inconclusive instead of failing.
pub fn check_minimality(n: u16, radii: &MinimalityRadii, config: &SolverConfig) -> Result<MinimalityReport> {
    if n == 0 || n > 4 {
        return Err(Error::domain("minimality check supports 1 <= n <= 4"));
    }
    let tiles = WangTileSet::metallic(n, false)?;
    let omega = build_omega(n, false)?;
    let mut shapes = Vec::new();
    for shape in GraphShape::ALL {
        let radius = radii.for_shape(shape);
        let (w, h) = shape.dims();
        let substitutive = omega.substitutive_language(w, h, 64)?;
        let solver_language = match patterns_with_surrounding(&tiles, w, h, radius, config) {
            Ok(language) => language,
            Err(Error::Resource(msg)) => {
                shapes.push(ShapeReport {
                    shape,
                    radius,
                    solver_language: BTreeSet::new(),
                    substitutive_language: substitutive,
                    recurrent: None,
                    languages_equal: false,
                    violations: BTreeSet::new(),
                    inconclusive: Some(msg),
                });
                continue;
            }
            Err(e) => return Err(e),
        };
        let languages_equal = solver_language == substitutive;
        let (recurrent, violations) = if languages_equal {
            (None, BTreeSet::new())
        } else {
            let recurrent = recurrent_vertices(&build_graph(&omega, shape)?);
            let violations = solver_language
                .iter()
                .filter(|p| recurrent.contains(*p) && !substitutive.contains(*p))
                .cloned()
                .collect();
            (Some(recurrent), violations)
        };
        shapes.push(ShapeReport {
            shape,
            radius,
            solver_language,
            substitutive_language: substitutive,
            recurrent,
            languages_equal,
            violations,
            inconclusive: None,
        });
    }
    let inconclusive = shapes.iter().any(|s| s.inconclusive.is_some());
    let minimal = !inconclusive && shapes.iter().all(|s| s.violations.is_empty());
    Ok(MinimalityReport { n, shapes, inconclusive, minimal })
}
