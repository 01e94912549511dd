//! Constraint solving over Wang tiles: rectangle tilings with optional
//! fixed cells and boundary words, torus tilings via a row-transfer
//! search, and the surrounding queries used for language enumeration.
//!
//! The rectangle solver is a complete backtracking search: cells are
//! decided in row-major order from the bottom-left, branching on tile
//! indices in ascending order, with arc-consistency propagation of
//! per-cell candidate sets after every decision. The first solution found
//! is therefore the lexicographically least one. For SW-deterministic
//! sets with fully specified bottom and left boundary words the solver
//! short-circuits to a direct fill that never backtracks.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::tiles::{Corner, EdgeLabel, WangTileSet};
use crate::words::Pattern2D;

/// Caps for the search. Exceeding a cap is a loud resource error, never a
/// silent truncation: callers interpret "no solution" as a proof.
#[derive(Clone, Copy, Debug)]
pub struct SolverConfig {
    /// Maximum number of branching decisions in a rectangle search.
    pub node_cap: u64,
    /// Maximum number of wrapping rows enumerated in a torus search.
    pub row_cap: usize,
    /// Branch on tile indices in descending order instead of ascending.
    pub descending: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { node_cap: 20_000_000, row_cap: 1_000_000, descending: false }
    }
}

/// The shape being tiled.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Region {
    Rectangle { width: usize, height: usize },
    Torus { width: usize, height: usize },
}

impl Region {
    pub fn width(&self) -> usize {
        match *self {
            Region::Rectangle { width, .. } | Region::Torus { width, .. } => width,
        }
    }

    pub fn height(&self) -> usize {
        match *self {
            Region::Rectangle { height, .. } | Region::Torus { height, .. } => height,
        }
    }
}

/// Which way a pair of cells is adjacent: side by side or stacked.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Axis {
    Horizontal,
    Vertical,
}

impl Axis {
    pub fn perpendicular(self) -> Axis {
        match self {
            Axis::Horizontal => Axis::Vertical,
            Axis::Vertical => Axis::Horizontal,
        }
    }
}

/// A rectangle or torus to tile, with optional pinned cells and optional
/// boundary words (boundary words apply to rectangles only).
pub struct TilingProblem<'a, L: EdgeLabel> {
    tileset: &'a WangTileSet<L>,
    region: Region,
    fixed: Vec<(usize, usize, usize)>,
    bottom: Option<Vec<L>>,
    left: Option<Vec<L>>,
    right: Option<Vec<L>>,
    top: Option<Vec<L>>,
}

/// Outcome of a rectangle search, with enough statistics to see how the
/// solution was found.
#[derive(Clone, Debug)]
pub struct Solved {
    pub pattern: Option<Pattern2D>,
    /// Number of branching decisions taken.
    pub nodes: u64,
    /// Whether the deterministic bottom-left fill was used (no search).
    pub fast_path: bool,
}

impl<'a, L: EdgeLabel> TilingProblem<'a, L> {
    pub fn new(tileset: &'a WangTileSet<L>, region: Region) -> Self {
        TilingProblem { tileset, region, fixed: Vec::new(), bottom: None, left: None, right: None, top: None }
    }

    /// Pins the cell at `(x, y)` to the tile with the given index.
    pub fn fix(mut self, x: usize, y: usize, tile: usize) -> Self {
        self.fixed.push((x, y, tile));
        self
    }

    /// Pins a whole pattern of tile indices with its lower-left corner at
    /// `(x, y)`.
    pub fn fix_pattern(mut self, x: usize, y: usize, p: &Pattern2D) -> Self {
        for j in 0..p.height() {
            for i in 0..p.width() {
                self.fixed.push((x + i, y + j, p.get(i, j)));
            }
        }
        self
    }

    pub fn with_bottom(mut self, word: Vec<L>) -> Self {
        self.bottom = Some(word);
        self
    }

    pub fn with_left(mut self, word: Vec<L>) -> Self {
        self.left = Some(word);
        self
    }

    pub fn with_right(mut self, word: Vec<L>) -> Self {
        self.right = Some(word);
        self
    }

    pub fn with_top(mut self, word: Vec<L>) -> Self {
        self.top = Some(word);
        self
    }

    /// Solves the problem, returning the lexicographically least valid
    /// assignment (in row-major cell order, ascending tile indices), or
    /// `None` when provably no tiling exists.
    pub fn solve(&self, config: &SolverConfig) -> Result<Option<Pattern2D>> {
        Ok(self.solve_detailed(config)?.pattern)
    }

    pub fn solve_detailed(&self, config: &SolverConfig) -> Result<Solved> {
        let (w, h) = (self.region.width(), self.region.height());
        if w == 0 || h == 0 {
            return Err(Error::domain("region dimensions must be positive"));
        }
        if let Region::Torus { width, height } = self.region {
            if !self.fixed.is_empty() || self.bottom.is_some() || self.left.is_some() || self.right.is_some() || self.top.is_some() {
                return Err(Error::domain("fixed cells and boundary words are not supported on a torus"));
            }
            let pattern = solve_torus(self.tileset, width, height, config)?;
            return Ok(Solved { pattern, nodes: 0, fast_path: false });
        }
        for &(x, y, t) in &self.fixed {
            if x >= w || y >= h {
                return Err(Error::domain(format!("fixed cell ({x}, {y}) lies outside the {w}x{h} region")));
            }
            if t >= self.tileset.len() {
                return Err(Error::domain(format!("fixed tile index {t} out of range for a {}-tile set", self.tileset.len())));
            }
        }
        for (word, len, name) in [
            (&self.bottom, w, "bottom"),
            (&self.top, w, "top"),
            (&self.left, h, "left"),
            (&self.right, h, "right"),
        ] {
            if let Some(word) = word {
                if word.len() != len {
                    return Err(Error::alignment(format!(
                        "{name} boundary word has length {}, expected {len}",
                        word.len()
                    )));
                }
            }
        }
        if self.tileset.is_empty() {
            return Ok(Solved { pattern: None, nodes: 0, fast_path: false });
        }
        if self.tileset.len() > MAX_TILES {
            return Err(Error::resource(format!(
                "tile sets larger than {MAX_TILES} tiles are not supported by the solver"
            )));
        }

        if let Some(solved) = self.try_fast_path()? {
            return Ok(solved);
        }

        let comp = Compiled::new(self.tileset);
        let mut grid = vec![Bits::full(self.tileset.len()); w * h];
        // Boundary words restrict the border cells; a label absent from
        // the set simply empties the cell, proving unsatisfiability.
        if let Some(word) = &self.bottom {
            for x in 0..w {
                grid[x].and_assign(&comp.eq_mask(&comp.bottom_eq, &word[x]));
            }
        }
        if let Some(word) = &self.top {
            for x in 0..w {
                grid[(h - 1) * w + x].and_assign(&comp.eq_mask(&comp.top_eq, &word[x]));
            }
        }
        if let Some(word) = &self.left {
            for y in 0..h {
                grid[y * w].and_assign(&comp.eq_mask(&comp.left_eq, &word[y]));
            }
        }
        if let Some(word) = &self.right {
            for y in 0..h {
                grid[y * w + w - 1].and_assign(&comp.eq_mask(&comp.right_eq, &word[y]));
            }
        }
        for &(x, y, t) in &self.fixed {
            let mut only = Bits::empty();
            only.set(t);
            grid[y * w + x].and_assign(&only);
        }

        let mut nodes = 0u64;
        if !propagate_all(&comp, &mut grid, w, h) {
            return Ok(Solved { pattern: None, nodes, fast_path: false });
        }
        let pattern = search(&comp, grid, w, h, config, &mut nodes)?;
        Ok(Solved { pattern, nodes, fast_path: false })
    }

    /// The deterministic fill of an SW-deterministic set from fully given
    /// bottom and left boundary words (no search, at most one solution).
    fn try_fast_path(&self) -> Result<Option<Solved>> {
        let (bottom, left) = match (&self.bottom, &self.left) {
            (Some(b), Some(l)) => (b, l),
            _ => return Ok(None),
        };
        if !self.tileset.is_deterministic(Corner::SW) {
            return Ok(None);
        }
        let (w, h) = (self.region.width(), self.region.height());
        let mut by_corner: HashMap<(&L, &L), usize> = HashMap::new();
        for (i, t) in self.tileset.tiles().iter().enumerate() {
            by_corner.insert((&t.left, &t.bottom), i);
        }
        let mut cells: Vec<usize> = Vec::with_capacity(w * h);
        for y in 0..h {
            for x in 0..w {
                let l = if x == 0 { &left[y] } else { &self.tileset.tile(cells[y * w + x - 1]).right };
                let b = if y == 0 { &bottom[x] } else { &self.tileset.tile(cells[(y - 1) * w + x]).top };
                match by_corner.get(&(l, b)) {
                    Some(&t) => cells.push(t),
                    None => return Ok(Some(Solved { pattern: None, nodes: 0, fast_path: true })),
                }
            }
        }
        // The fill satisfies bottom/left by construction; the remaining
        // constraints are checked against the unique candidate.
        let ok = self.fixed.iter().all(|&(x, y, t)| cells[y * w + x] == t)
            && self
                .right
                .as_ref()
                .map_or(true, |word| (0..h).all(|y| self.tileset.tile(cells[y * w + w - 1]).right == word[y]))
            && self
                .top
                .as_ref()
                .map_or(true, |word| (0..w).all(|x| self.tileset.tile(cells[(h - 1) * w + x]).top == word[x]));
        let pattern = if ok { Some(Pattern2D::new(w, h, cells)?) } else { None };
        Ok(Some(Solved { pattern, nodes: 0, fast_path: true }))
    }
}

/// Checks that every cell of the pattern indexes into the tile set and
/// that every adjacent pair of cells agrees on the shared edge. Reports
/// the first offending position.
pub fn validate_pattern<L: EdgeLabel>(tileset: &WangTileSet<L>, p: &Pattern2D) -> Result<()> {
    for y in 0..p.height() {
        for x in 0..p.width() {
            let i = p.get(x, y);
            if i >= tileset.len() {
                return Err(Error::domain(format!(
                    "cell ({x}, {y}) holds letter {i}, out of range for a {}-tile set",
                    tileset.len()
                )));
            }
        }
    }
    for y in 0..p.height() {
        for x in 0..p.width() {
            let t = tileset.tile(p.get(x, y));
            if x + 1 < p.width() && t.right != tileset.tile(p.get(x + 1, y)).left {
                return Err(Error::domain(format!(
                    "edge mismatch between cells ({x}, {y}) and ({}, {y})",
                    x + 1
                )));
            }
            if y + 1 < p.height() && t.top != tileset.tile(p.get(x, y + 1)).bottom {
                return Err(Error::domain(format!(
                    "edge mismatch between cells ({x}, {y}) and ({x}, {})",
                    y + 1
                )));
            }
        }
    }
    Ok(())
}

/// True when the pattern, pinned at the center, extends to a valid tiling
/// of the rectangle grown by `radius` cells on every side.
pub fn has_surrounding<L: EdgeLabel>(
    tileset: &WangTileSet<L>,
    center: &Pattern2D,
    radius: usize,
    config: &SolverConfig,
) -> Result<bool> {
    for &cell in center.cells() {
        if cell >= tileset.len() {
            return Err(Error::domain(format!("pattern letter {cell} out of range for a {}-tile set", tileset.len())));
        }
    }
    let region = Region::Rectangle { width: center.width() + 2 * radius, height: center.height() + 2 * radius };
    let problem = TilingProblem::new(tileset, region).fix_pattern(radius, radius, center);
    Ok(problem.solve(config)?.is_some())
}

/// All ordered adjacent tile pairs along `axis` that admit a surrounding
/// of the given radius. Pairs read left-to-right (horizontal) or
/// bottom-to-top (vertical).
pub fn dominoes_with_surrounding<L: EdgeLabel>(
    tileset: &WangTileSet<L>,
    axis: Axis,
    radius: usize,
    config: &SolverConfig,
) -> Result<BTreeSet<(usize, usize)>> {
    let mut found = BTreeSet::new();
    for (a, ta) in tileset.tiles().iter().enumerate() {
        for (b, tb) in tileset.tiles().iter().enumerate() {
            let compatible = match axis {
                Axis::Horizontal => ta.right == tb.left,
                Axis::Vertical => ta.top == tb.bottom,
            };
            if !compatible {
                continue;
            }
            let pattern = match axis {
                Axis::Horizontal => Pattern2D::new(2, 1, vec![a, b])?,
                Axis::Vertical => Pattern2D::new(1, 2, vec![a, b])?,
            };
            if has_surrounding(tileset, &pattern, radius, config)? {
                found.insert((a, b));
            }
        }
    }
    Ok(found)
}

/// All valid `w`x`h` patterns that admit a surrounding of the given
/// radius.
pub fn patterns_with_surrounding<L: EdgeLabel>(
    tileset: &WangTileSet<L>,
    w: usize,
    h: usize,
    radius: usize,
    config: &SolverConfig,
) -> Result<BTreeSet<Pattern2D>> {
    let mut found = BTreeSet::new();
    for pattern in valid_patterns(tileset, w, h) {
        if has_surrounding(tileset, &pattern, radius, config)? {
            found.insert(pattern);
        }
    }
    Ok(found)
}

/// Result of pruning a tile set by surrounding existence.
#[derive(Clone, Debug)]
pub struct PruneResult<L: EdgeLabel> {
    /// Original indices of the surviving tiles, in order.
    pub kept: Vec<usize>,
    /// Original indices of the removed tiles, in order.
    pub dropped: Vec<usize>,
    pub tiles: WangTileSet<L>,
}

/// Keeps the tiles that admit a surrounding of the given radius,
/// preserving their order.
pub fn tiles_allowing_surrounding<L: EdgeLabel>(
    tileset: &WangTileSet<L>,
    radius: usize,
    config: &SolverConfig,
) -> Result<PruneResult<L>> {
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for i in 0..tileset.len() {
        if has_surrounding(tileset, &Pattern2D::cell(i), radius, config)? {
            kept.push(i);
        } else {
            dropped.push(i);
        }
    }
    let tiles = tileset.subset(&kept)?;
    Ok(PruneResult { kept, dropped, tiles })
}

/// Finds a valid `width`x`height` tiling with wrap-around matching on
/// both axes, or proves there is none. Works by enumerating all
/// horizontally wrapping rows, then looking for a closed walk of length
/// `height` in the sits-on-top-of relation between rows.
pub fn solve_torus<L: EdgeLabel>(
    tileset: &WangTileSet<L>,
    width: usize,
    height: usize,
    config: &SolverConfig,
) -> Result<Option<Pattern2D>> {
    if width == 0 || height == 0 {
        return Err(Error::domain("torus dimensions must be positive"));
    }
    let rows = wrapping_rows(tileset, width, config)?;
    if rows.is_empty() {
        return Ok(None);
    }

    // Rows are adjacent when the top word of the lower row equals the
    // bottom word of the upper row.
    let word = |row: &[usize], top: bool| -> Vec<&L> {
        row.iter().map(|&t| if top { &tileset.tile(t).top } else { &tileset.tile(t).bottom }).collect()
    };
    let mut by_bottom: HashMap<Vec<&L>, Vec<usize>> = HashMap::new();
    let mut by_top: HashMap<Vec<&L>, Vec<usize>> = HashMap::new();
    for (i, row) in rows.iter().enumerate() {
        by_bottom.entry(word(row, false)).or_default().push(i);
        by_top.entry(word(row, true)).or_default().push(i);
    }
    let successors = |i: usize| by_bottom.get(&word(&rows[i], true)).map_or(&[][..], |v| &v[..]);
    let predecessors = |i: usize| by_top.get(&word(&rows[i], false)).map_or(&[][..], |v| &v[..]);

    for start in 0..rows.len() {
        // reach[k] = rows from which `start` is reachable in exactly k steps.
        let mut reach: Vec<Vec<bool>> = vec![vec![false; rows.len()]; height + 1];
        reach[0][start] = true;
        for k in 1..=height {
            for i in 0..rows.len() {
                if reach[k - 1][i] {
                    for &p in predecessors(i) {
                        reach[k][p] = true;
                    }
                }
            }
        }
        if !reach[height][start] {
            continue;
        }
        // Walk forward along the smallest successors that stay on track.
        let mut cells = Vec::with_capacity(width * height);
        let mut cur = start;
        for step in 0..height {
            cells.extend_from_slice(&rows[cur]);
            if step + 1 < height {
                cur = *successors(cur)
                    .iter()
                    .find(|&&s| reach[height - step - 1][s])
                    .expect("reachability table promised a continuation");
            }
        }
        return Ok(Some(Pattern2D::new(width, height, cells)?));
    }
    Ok(None)
}

/// All rows of the given width whose horizontal matching wraps around,
/// in lexicographic order.
fn wrapping_rows<L: EdgeLabel>(
    tileset: &WangTileSet<L>,
    width: usize,
    config: &SolverConfig,
) -> Result<Vec<Vec<usize>>> {
    let mut rows = Vec::new();
    let mut row = Vec::with_capacity(width);
    extend_row(tileset, width, &mut row, &mut rows, config.row_cap)?;
    Ok(rows)
}

fn extend_row<L: EdgeLabel>(
    tileset: &WangTileSet<L>,
    width: usize,
    row: &mut Vec<usize>,
    rows: &mut Vec<Vec<usize>>,
    cap: usize,
) -> Result<()> {
    if row.len() == width {
        if tileset.tile(row[width - 1]).right == tileset.tile(row[0]).left {
            if rows.len() >= cap {
                return Err(Error::resource(format!("more than {cap} wrapping rows of width {width}; raise the row cap")));
            }
            rows.push(row.clone());
        }
        return Ok(());
    }
    for t in 0..tileset.len() {
        if let Some(&prev) = row.last() {
            if tileset.tile(prev).right != tileset.tile(t).left {
                continue;
            }
        }
        row.push(t);
        extend_row(tileset, width, row, rows, cap)?;
        row.pop();
    }
    Ok(())
}

/// All edge-matched `w`x`h` patterns over the set, with no requirement of
/// extendability, in lexicographic order.
pub fn valid_patterns<L: EdgeLabel>(tileset: &WangTileSet<L>, w: usize, h: usize) -> Vec<Pattern2D> {
    let mut out = Vec::new();
    let mut cells: Vec<usize> = Vec::with_capacity(w * h);
    loop {
        if cells.len() == w * h {
            out.push(Pattern2D::new(w, h, cells.clone()).expect("enumerated cells fill the rectangle"));
        } else {
            let idx = cells.len();
            let (x, y) = (idx % w, idx / w);
            let next = (0..tileset.len()).find(|&t| fits(tileset, &cells, w, x, y, t));
            if let Some(t) = next {
                cells.push(t);
                continue;
            }
        }
        // Backtrack to the next candidate at the deepest position.
        loop {
            match cells.pop() {
                None => return out,
                Some(last) => {
                    let idx = cells.len();
                    let (x, y) = (idx % w, idx / w);
                    if let Some(t) = (last + 1..tileset.len()).find(|&t| fits(tileset, &cells, w, x, y, t)) {
                        cells.push(t);
                        break;
                    }
                }
            }
        }
    }
}

fn fits<L: EdgeLabel>(tileset: &WangTileSet<L>, cells: &[usize], w: usize, x: usize, y: usize, t: usize) -> bool {
    let tile = tileset.tile(t);
    if x > 0 && tileset.tile(cells[y * w + x - 1]).right != tile.left {
        return false;
    }
    if y > 0 && tileset.tile(cells[(y - 1) * w + x]).top != tile.bottom {
        return false;
    }
    true
}

// ---------------------------------------------------------------------------
// Internal search machinery.

const BITS_WORDS: usize = 4;
const MAX_TILES: usize = BITS_WORDS * 64;

/// A fixed-size bitset over tile indices.
#[derive(Clone, Copy, PartialEq, Eq)]
struct Bits([u64; BITS_WORDS]);

impl Bits {
    fn empty() -> Self {
        Bits([0; BITS_WORDS])
    }

    fn full(n: usize) -> Self {
        let mut b = Bits::empty();
        for w in 0..BITS_WORDS {
            let lo = w * 64;
            if n >= lo + 64 {
                b.0[w] = u64::MAX;
            } else if n > lo {
                b.0[w] = (1u64 << (n - lo)) - 1;
            }
        }
        b
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn and_assign(&mut self, other: &Bits) {
        for w in 0..BITS_WORDS {
            self.0[w] &= other.0[w];
        }
    }

    fn or_assign(&mut self, other: &Bits) {
        for w in 0..BITS_WORDS {
            self.0[w] |= other.0[w];
        }
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let b = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    fn sole(&self) -> usize {
        self.iter().next().expect("bitset should be a singleton")
    }
}

/// Per-tile neighbor masks compiled once per solve.
struct Compiled {
    n: usize,
    /// right_of[t]: tiles whose left label equals t's right label.
    right_of: Vec<Bits>,
    left_of: Vec<Bits>,
    above: Vec<Bits>,
    below: Vec<Bits>,
    left_eq: Vec<(usize, Bits)>,
    right_eq: Vec<(usize, Bits)>,
    bottom_eq: Vec<(usize, Bits)>,
    top_eq: Vec<(usize, Bits)>,
    label_ids: HashMap<String, usize>,
}

impl Compiled {
    fn new<L: EdgeLabel>(ts: &WangTileSet<L>) -> Compiled {
        let n = ts.len();
        let mut label_ids: HashMap<String, usize> = HashMap::new();
        let mut id_of = |l: &L| {
            let next = label_ids.len();
            *label_ids.entry(l.to_string()).or_insert(next)
        };
        let ids: Vec<[usize; 4]> = ts
            .tiles()
            .iter()
            .map(|t| [id_of(&t.right), id_of(&t.top), id_of(&t.left), id_of(&t.bottom)])
            .collect();
        let nlabels = label_ids.len();
        let mut eq = vec![[Bits::empty(); 4]; nlabels];
        for (i, tid) in ids.iter().enumerate() {
            for side in 0..4 {
                eq[tid[side]][side].set(i);
            }
        }
        let pick = |side: usize| -> Vec<(usize, Bits)> { eq.iter().enumerate().map(|(l, m)| (l, m[side])).collect() };
        let right_of = ids.iter().map(|tid| eq[tid[0]][2]).collect();
        let left_of = ids.iter().map(|tid| eq[tid[2]][0]).collect();
        let above = ids.iter().map(|tid| eq[tid[1]][3]).collect();
        let below = ids.iter().map(|tid| eq[tid[3]][1]).collect();
        Compiled {
            n,
            right_of,
            left_of,
            above,
            below,
            right_eq: pick(0),
            top_eq: pick(1),
            left_eq: pick(2),
            bottom_eq: pick(3),
            label_ids,
        }
    }

    /// Tiles whose given side carries the given label; empty for labels
    /// the set never uses.
    fn eq_mask<L: EdgeLabel>(&self, table: &[(usize, Bits)], label: &L) -> Bits {
        match self.label_ids.get(&label.to_string()) {
            Some(&id) => table[id].1,
            None => Bits::empty(),
        }
    }
}

/// Re-establishes arc consistency over the whole grid. Returns false when
/// some cell has no candidates left.
fn propagate_all(comp: &Compiled, grid: &mut [Bits], w: usize, h: usize) -> bool {
    let mut queue: VecDeque<usize> = (0..grid.len()).collect();
    let mut queued = vec![true; grid.len()];
    propagate(comp, grid, w, h, &mut queue, &mut queued)
}

fn propagate(
    comp: &Compiled,
    grid: &mut [Bits],
    w: usize,
    h: usize,
    queue: &mut VecDeque<usize>,
    queued: &mut [bool],
) -> bool {
    while let Some(c) = queue.pop_front() {
        queued[c] = false;
        if grid[c].is_empty() {
            return false;
        }
        let (x, y) = (c % w, c / w);
        let neighbors: [(bool, usize, &Vec<Bits>); 4] = [
            (x + 1 < w, c + 1, &comp.right_of),
            (x > 0, c.wrapping_sub(1), &comp.left_of),
            (y + 1 < h, c + w, &comp.above),
            (y > 0, c.wrapping_sub(w), &comp.below),
        ];
        for (in_bounds, nb, masks) in neighbors {
            if !in_bounds {
                continue;
            }
            let mut allowed = Bits::empty();
            for t in grid[c].iter() {
                allowed.or_assign(&masks[t]);
            }
            let mut new = grid[nb];
            new.and_assign(&allowed);
            if new != grid[nb] {
                grid[nb] = new;
                if new.is_empty() {
                    return false;
                }
                if !queued[nb] {
                    queued[nb] = true;
                    queue.push_back(nb);
                }
            }
        }
    }
    true
}

fn search(
    comp: &Compiled,
    grid: Vec<Bits>,
    w: usize,
    h: usize,
    config: &SolverConfig,
    nodes: &mut u64,
) -> Result<Option<Pattern2D>> {
    let cell = (0..grid.len()).find(|&c| grid[c].count() > 1);
    let cell = match cell {
        Some(c) => c,
        None => {
            let cells: Vec<usize> = grid.iter().map(|b| b.sole()).collect();
            return Ok(Some(Pattern2D::new(w, h, cells)?));
        }
    };
    let mut values: Vec<usize> = grid[cell].iter().collect();
    if config.descending {
        values.reverse();
    }
    for v in values {
        *nodes += 1;
        if *nodes > config.node_cap {
            return Err(Error::resource(format!(
                "rectangle search exceeded the node cap of {}; raise it to continue",
                config.node_cap
            )));
        }
        let mut next = grid.clone();
        next[cell] = Bits::empty();
        next[cell].set(v);
        let mut queue = VecDeque::with_capacity(4);
        queue.push_back(cell);
        let mut queued = vec![false; next.len()];
        queued[cell] = true;
        if propagate(comp, &mut next, w, h, &mut queue, &mut queued) {
            if let Some(p) = search(comp, next, w, h, config, nodes)? {
                return Ok(Some(p));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metallic::{build_omega, tau, tau_inverse};
    use crate::tiles::{Label, WangTile};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    /// Exhaustive lexicographic search, the oracle for small instances.
    fn brute_force(
        ts: &WangTileSet<u32>,
        w: usize,
        h: usize,
        fixed: &[(usize, usize, usize)],
        bottom: Option<&[u32]>,
        left: Option<&[u32]>,
    ) -> Option<Pattern2D> {
        let n = ts.len();
        let mut cells = vec![0usize; w * h];
        loop {
            let ok = (0..w * h).all(|c| {
                let (x, y) = (c % w, c / w);
                let t = ts.tile(cells[c]);
                (x == 0 || ts.tile(cells[c - 1]).right == t.left)
                    && (y == 0 || ts.tile(cells[c - w]).top == t.bottom)
                    && bottom.map_or(true, |word| y != 0 || t.bottom == word[x])
                    && left.map_or(true, |word| x != 0 || t.left == word[y])
            }) && fixed.iter().all(|&(x, y, t)| cells[y * w + x] == t);
            if ok {
                return Some(Pattern2D::new(w, h, cells).unwrap());
            }
            // Next assignment in lexicographic order (last cell varies
            // fastest would be colex; we want the FIRST cell least
            // significant? No: row-major lex-least means earlier cells
            // are more significant, so increment from the last cell).
            let mut i = w * h;
            loop {
                if i == 0 {
                    return None;
                }
                i -= 1;
                cells[i] += 1;
                if cells[i] < n {
                    break;
                }
                cells[i] = 0;
            }
        }
    }

    fn random_set(rng: &mut ChaCha8Rng, tiles: usize, labels: u32) -> WangTileSet<u32> {
        loop {
            let mut v: Vec<WangTile<u32>> = Vec::new();
            while v.len() < tiles {
                let t = WangTile::new(
                    rng.gen_range(0..labels),
                    rng.gen_range(0..labels),
                    rng.gen_range(0..labels),
                    rng.gen_range(0..labels),
                );
                if !v.contains(&t) {
                    v.push(t);
                }
            }
            if let Ok(ts) = WangTileSet::new_custom(v) {
                return ts;
            }
        }
    }

    #[test]
    fn agrees_with_brute_force_on_small_rectangles() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for case in 0..60 {
            let (tiles, labels) = (rng.gen_range(2..=5), rng.gen_range(2..=3));
            let ts = random_set(&mut rng, tiles, labels);
            let (w, h) = *[(2, 2), (3, 2), (2, 3), (3, 3), (4, 2)].iter().nth(case % 5).unwrap();
            let mut problem = TilingProblem::new(&ts, Region::Rectangle { width: w, height: h });
            let mut fixed = Vec::new();
            let mut bottom = None;
            let mut left = None;
            if case % 3 == 0 {
                let f = (rng.gen_range(0..w), rng.gen_range(0..h), rng.gen_range(0..ts.len()));
                fixed.push(f);
                problem = problem.fix(f.0, f.1, f.2);
            }
            if case % 4 == 1 {
                let word: Vec<u32> = (0..w).map(|_| rng.gen_range(0..3)).collect();
                bottom = Some(word.clone());
                problem = problem.with_bottom(word);
            }
            if case % 5 == 2 {
                let word: Vec<u32> = (0..h).map(|_| rng.gen_range(0..3)).collect();
                left = Some(word.clone());
                problem = problem.with_left(word);
            }
            let got = problem.solve(&cfg()).unwrap();
            let want = brute_force(&ts, w, h, &fixed, bottom.as_deref(), left.as_deref());
            assert_eq!(got, want, "case {case} on {ts:?}");
        }
    }

    #[test]
    fn single_tile_examples() {
        let ts = WangTileSet::new_custom(vec![WangTile::new(0u32, 1, 0, 1)]).unwrap();
        let p = TilingProblem::new(&ts, Region::Rectangle { width: 3, height: 3 }).solve(&cfg()).unwrap();
        assert_eq!(p, Some(Pattern2D::new(3, 3, vec![0; 9]).unwrap()));
        assert!(solve_torus(&ts, 1, 1, &cfg()).unwrap().is_some());

        // A tile that cannot sit beside itself tiles no 2x1 rectangle.
        let lone = WangTileSet::new_custom(vec![WangTile::new(0u32, 1, 1, 1)]).unwrap();
        assert_eq!(valid_patterns(&lone, 2, 1), vec![]);
        assert_eq!(
            TilingProblem::new(&lone, Region::Rectangle { width: 2, height: 1 }).solve(&cfg()).unwrap(),
            None
        );
    }

    #[test]
    fn deterministic_fill_reproduces_the_substitution_images() {
        // With full bottom and left boundary words on an SW-deterministic
        // set, the solver must return the unique fill without branching.
        for n in [1u16, 2] {
            let ts = WangTileSet::metallic(n, false).unwrap();
            let omega = build_omega(n, false).unwrap();
            for (i, tile) in ts.tiles().iter().enumerate() {
                let image = omega.image(i);
                let bottom = tau(n, tile.bottom).unwrap();
                let left = tau(n, tile.left).unwrap();
                let solved = TilingProblem::new(
                    &ts,
                    Region::Rectangle { width: image.width(), height: image.height() },
                )
                .with_bottom(bottom)
                .with_left(left)
                .solve_detailed(&cfg())
                .unwrap();
                assert!(solved.fast_path, "fast path should apply for tile {i} of n={n}");
                assert_eq!(solved.nodes, 0);
                assert_eq!(solved.pattern.as_ref(), Some(image), "tile {i} of n={n}");
            }
        }
    }

    #[test]
    fn boundary_words_from_the_label_map_force_a_square() {
        // Bottom and left words for the label (0,0,1) at n=1 pin down a
        // 2x2 square whose top and right words decode back to labels.
        let ts = WangTileSet::metallic(1, false).unwrap();
        let word = tau(1, Label::t(0, 0, 1)).unwrap();
        let p = TilingProblem::new(&ts, Region::Rectangle { width: 2, height: 2 })
            .with_bottom(word.clone())
            .with_left(word)
            .solve(&cfg())
            .unwrap()
            .expect("the square should exist");
        let top: Vec<Label> = (0..2).map(|x| ts.tile(p.get(x, 1)).top).collect();
        let right: Vec<Label> = (0..2).map(|y| ts.tile(p.get(1, y)).right).collect();
        assert!(tau_inverse(1, &top).is_ok(), "top word {top:?} should be an encoded label");
        assert!(tau_inverse(1, &right).is_ok(), "right word {right:?} should be an encoded label");
    }

    #[test]
    fn surroundings_shrink_as_the_radius_grows() {
        let ts = crate::fixtures::t1_reference();
        let r1 = dominoes_with_surrounding(&ts, Axis::Vertical, 1, &cfg()).unwrap();
        let r2 = dominoes_with_surrounding(&ts, Axis::Vertical, 2, &cfg()).unwrap();
        assert!(r2.is_subset(&r1), "radius-2 pairs must be a subset of radius-1 pairs");
        assert_eq!(r1.len(), 30);
        assert_eq!(r1.iter().next(), Some(&(0, 5)));
    }

    #[test]
    fn last_blue_tiles_admit_no_immediate_surrounding() {
        // No tile carries the label (0,0,n+1) on its left or bottom, so
        // the two blue tiles carrying it on their right or top cannot be
        // surrounded at all. The two deleted diagonal junctions are less
        // local: they do admit small surroundings and only die later.
        use crate::tiles::classify;
        let extended = WangTileSet::metallic(2, true).unwrap();
        for (i, tile) in extended.tiles().iter().enumerate() {
            let c = classify(2, tile).unwrap();
            if c.is_last_blue() {
                assert!(
                    !has_surrounding(&extended, &Pattern2D::cell(i), 1, &cfg()).unwrap(),
                    "last blue tile {i} should admit no radius-1 surrounding"
                );
            } else if c.in_deleted {
                assert!(
                    has_surrounding(&extended, &Pattern2D::cell(i), 1, &cfg()).unwrap(),
                    "diagonal junction {i} is only excluded by a non-local argument"
                );
            }
        }
    }

    #[test]
    fn torus_matches_brute_force_on_small_cases() {
        fn brute_torus(ts: &WangTileSet<u32>, w: usize, h: usize) -> bool {
            let n = ts.len();
            let mut cells = vec![0usize; w * h];
            loop {
                let ok = (0..w * h).all(|c| {
                    let (x, y) = (c % w, c / w);
                    let t = ts.tile(cells[c]);
                    let left = ts.tile(cells[y * w + (x + w - 1) % w]);
                    let below = ts.tile(cells[((y + h - 1) % h) * w + x]);
                    left.right == t.left && below.top == t.bottom
                });
                if ok {
                    return true;
                }
                let mut i = w * h;
                loop {
                    if i == 0 {
                        return false;
                    }
                    i -= 1;
                    cells[i] += 1;
                    if cells[i] < n {
                        break;
                    }
                    cells[i] = 0;
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for case in 0..40 {
            let tiles = rng.gen_range(2..=4);
            let ts = random_set(&mut rng, tiles, 2);
            let (w, h) = *[(1, 1), (2, 2), (3, 2), (2, 3), (3, 3)].iter().nth(case % 5).unwrap();
            let got = solve_torus(&ts, w, h, &cfg()).unwrap().is_some();
            let want = brute_torus(&ts, w, h);
            assert_eq!(got, want, "case {case} on {ts:?} torus {w}x{h}");
        }
    }

    #[test]
    fn torus_solutions_really_wrap() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut checked = 0;
        while checked < 10 {
            let ts = random_set(&mut rng, 4, 2);
            if let Some(p) = solve_torus(&ts, 3, 3, &cfg()).unwrap() {
                for y in 0..3 {
                    for x in 0..3 {
                        let t = ts.tile(p.get(x, y));
                        assert_eq!(ts.tile(p.get((x + 2) % 3, y)).right, t.left);
                        assert_eq!(ts.tile(p.get(x, (y + 2) % 3)).top, t.bottom);
                    }
                }
                checked += 1;
            }
        }
    }

    #[test]
    fn node_cap_is_a_loud_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ts = random_set(&mut rng, 5, 2);
        let tight = SolverConfig { node_cap: 1, ..SolverConfig::default() };
        let r = TilingProblem::new(&ts, Region::Rectangle { width: 4, height: 4 }).solve(&tight);
        match r {
            Err(Error::Resource(_)) => {}
            other => panic!("expected a resource error, got {other:?}"),
        }
    }

    #[test]
    fn pruning_the_extended_set_recovers_the_core() {
        // One radius-1 sweep over the 22-tile extended set already kills
        // the four deleted tiles; iterating to a fixpoint leaves the core.
        let mut current = WangTileSet::metallic(1, true).unwrap();
        let core = WangTileSet::metallic(1, false).unwrap();
        for _ in 0..4 {
            let pruned = tiles_allowing_surrounding(&current, 1, &cfg()).unwrap();
            if pruned.tiles.len() == current.len() {
                break;
            }
            current = pruned.tiles;
        }
        assert!(current.same_set(&core), "pruning should stabilize on the 16 core tiles");
    }
}
