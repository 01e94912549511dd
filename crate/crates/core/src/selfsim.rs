//! Self-similarity machinery: locating the lattice of junction tiles in a
//! pattern, decoding a pattern back through the block substitution
//! (desubstitution), and the marker/fusion pipeline that reconstructs the
//! substitution from the tile set alone and certifies it against the
//! block construction.
//!
//! Desubstitution works on finite patterns: complete return blocks are
//! decoded by reading their four boundary words and inverting the
//! boundary map, then verified cell by cell against the rebuilt block.
//! Incomplete blocks at the border are trimmed rather than reported as
//! errors, and the reported shift is the position of the lower-left
//! complete block's corner.

use std::collections::{BTreeMap, BTreeSet};

use petgraph::unionfind::UnionFind;

use crate::equiv::{equivalences_all, EquivalenceCertificate};
use crate::error::{Error, Result};
use crate::matrix::{Factorization, IntPoly};
use crate::metallic::{block_image, build_omega_for, tau_inverse, Block};
use crate::solver::{
    dominoes_with_surrounding, tiles_allowing_surrounding, validate_pattern, Axis, SolverConfig,
};
use crate::tiles::{classify, EdgeLabel, Label, LabelWord, WangTile, WangTileSet};
use crate::words::{Pattern2D, Substitution2D};

/// The lattice of junction positions inside a pattern.
///
/// Junctions in a valid pattern sit exactly on a Cartesian product of
/// column and row offsets, with consecutive gaps of `n` or `n+1` cells;
/// the gaps delimit the return blocks of the block substitution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReturnBlockGrid {
    /// x coordinates of the junction columns, strictly increasing.
    pub column_offsets: Vec<usize>,
    /// y coordinates of the junction rows, strictly increasing.
    pub row_offsets: Vec<usize>,
    /// Position of the lowest, leftmost junction:
    /// `(column_offsets[0], row_offsets[0])`.
    pub shift: (usize, usize),
}

/// Locates the junction grid of a pattern over a metallic tile set.
///
/// Only the layout of junction tiles is inspected; edge consistency is
/// the caller's concern (solver output always has it, and a hand-built
/// pattern with junctions in the wrong places is diagnosed all the same).
/// Fails with a diagnostic position when the junction positions do not
/// form a Cartesian product, when a gap falls outside `{n, n+1}`, or when
/// a border margin is too wide to be the visible part of a single cropped
/// block.
pub fn find_junction_grid(tileset: &WangTileSet<Label>, p: &Pattern2D) -> Result<ReturnBlockGrid> {
    let n = tileset.family().metallic_index().ok_or_else(|| {
        Error::domain("junction grids are defined for metallic tile sets; this set has no metallic index")
    })?;
    grid_for(n, tileset, p)
}

fn grid_for(n: u16, tileset: &WangTileSet<Label>, p: &Pattern2D) -> Result<ReturnBlockGrid> {
    for (i, &letter) in p.cells().iter().enumerate() {
        if letter >= tileset.len() {
            return Err(Error::domain(format!(
                "cell ({}, {}) holds letter {letter}, out of range for a {}-tile set",
                i % p.width(),
                i / p.width(),
                tileset.len()
            )));
        }
    }
    let nn = n as usize;
    let mut cols = BTreeSet::new();
    let mut rows = BTreeSet::new();
    let mut count = 0usize;
    for y in 0..p.height() {
        for x in 0..p.width() {
            if classify(n, tileset.tile(p.get(x, y)))?.kind.is_junction() {
                cols.insert(x);
                rows.insert(y);
                count += 1;
            }
        }
    }
    if count == 0 {
        return Err(Error::domain("the pattern contains no junction tile"));
    }
    let cols: Vec<usize> = cols.into_iter().collect();
    let rows: Vec<usize> = rows.into_iter().collect();
    for &a in &cols {
        for &b in &rows {
            if !classify(n, tileset.tile(p.get(a, b)))?.kind.is_junction() {
                return Err(Error::domain(format!(
                    "junction positions are not a grid: expected a junction at ({a}, {b})"
                )));
            }
        }
    }
    for (name, offsets, extent) in
        [("column", &cols, p.width()), ("row", &rows, p.height())]
    {
        for w in offsets.windows(2) {
            let gap = w[1] - w[0];
            if gap < nn || gap > nn + 1 {
                return Err(Error::domain(format!(
                    "junction {name} gap {gap} at offset {} is outside {{{n}, {}}}",
                    w[0],
                    nn + 1
                )));
            }
        }
        if offsets[0] > nn {
            return Err(Error::domain(format!(
                "margin of {} cells before the first junction {name} exceeds {n}",
                offsets[0]
            )));
        }
        let trailing = extent - 1 - offsets[offsets.len() - 1];
        if trailing > nn {
            return Err(Error::domain(format!(
                "margin of {trailing} cells after the last junction {name} exceeds {n}"
            )));
        }
    }
    let shift = (cols[0], rows[0]);
    Ok(ReturnBlockGrid { column_offsets: cols, row_offsets: rows, shift })
}

/// Outcome of decoding a pattern through the block substitution.
#[derive(Clone, Debug)]
pub struct Desubstituted {
    /// Index space of `pattern`: the canonical extended set for the same
    /// metallic index, which contains every tile a block can decode to.
    pub tiles: WangTileSet<Label>,
    /// The decoded preimage, one letter per complete block.
    pub pattern: Pattern2D,
    /// Position in the input of the lower-left complete block's corner.
    pub shift: (usize, usize),
    /// Input columns/rows dropped on each side as incomplete blocks:
    /// `(left, bottom, right, top)`.
    pub trimmed: (usize, usize, usize, usize),
}

/// Decodes every complete return block of `p` back to its preimage tile.
///
/// The input pattern is indexed by `tileset`, whose tiles must all belong
/// to the extended set of order `n` (any ordering). Each block is decoded
/// by inverting its four boundary words and then verified cell by cell
/// against the rebuilt block, so a successful decode is a proof that the
/// visible region is an image of the returned pattern. Blocks whose full
/// extent is not visible are trimmed; a block of known extent that fails
/// to decode is an error carrying its grid coordinates.
pub fn desubstitute(n: u16, tileset: &WangTileSet<Label>, p: &Pattern2D) -> Result<Desubstituted> {
    let extended = WangTileSet::metallic(n, true)?;
    for (i, t) in tileset.tiles().iter().enumerate() {
        if extended.index_of(t).is_none() {
            return Err(Error::domain(format!(
                "tile {i} ({t}) is not a tile of the order-{n} extended set"
            )));
        }
    }
    validate_pattern(tileset, p)?;
    let grid = grid_for(n, tileset, p)?;
    let outcome = attempt_decode(n, &extended, tileset, p, &grid.column_offsets, &grid.row_offsets, true)?
        .expect("strict decoding reports failures as errors");
    let lc = outcome.widths.len();
    let lr = outcome.heights.len();
    let right_edge = grid.column_offsets[lc - 1] + outcome.widths[lc - 1];
    let top_edge = grid.row_offsets[lr - 1] + outcome.heights[lr - 1];
    Ok(Desubstituted {
        tiles: extended,
        pattern: outcome.pattern,
        shift: grid.shift,
        trimmed: (
            grid.column_offsets[0],
            grid.row_offsets[0],
            p.width() - right_edge,
            p.height() - top_edge,
        ),
    })
}

/// All candidate junction grids under which the pattern fully decodes.
///
/// Candidates are every pair of offset sequences with gaps in `{n, n+1}`
/// and margins at most `n`, regardless of where the junctions actually
/// sit. A candidate counts only when its complete blocks all decode
/// *and* every border margin is the visible slice of some cropped block
/// image, so each returned grid is a genuine alternative reading of the
/// pattern as a (possibly shifted) image of the block substitution. On
/// an image of the substitution exactly one candidate should survive —
/// the true grid — which makes this an exhaustive
/// alternative-representation search for recognizability experiments.
pub fn decoding_grids(
    n: u16,
    tileset: &WangTileSet<Label>,
    p: &Pattern2D,
) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    let extended = WangTileSet::metallic(n, true)?;
    validate_pattern(tileset, p)?;
    let images: Vec<Block> =
        extended.tiles().iter().map(|t| block_image(n, t)).collect::<Result<_>>()?;
    let mut found = Vec::new();
    for cols in offset_sequences(n as usize, p.width()) {
        for rows in offset_sequences(n as usize, p.height()) {
            let Some(outcome) = attempt_decode(n, &extended, tileset, p, &cols, &rows, false)?
            else {
                continue;
            };
            if margins_are_slices(&images, tileset, p, &cols, &rows, &outcome) {
                found.push((cols.clone(), rows.clone()));
            }
        }
    }
    Ok(found)
}

/// Checks that every border margin left over by a candidate decode is
/// the matching slice of some block image: a left margin must be the
/// right end of a block, a bottom margin the top end, and corner margins
/// the corresponding corner piece. The slice must be proper — a margin
/// whose cells form an image in full is really a complete band, and that
/// reading is its own candidate grid. Margins that cannot be read this
/// way disqualify the candidate, because no taller or wider preimage
/// could have produced them.
fn margins_are_slices(
    images: &[Block],
    tileset: &WangTileSet<Label>,
    p: &Pattern2D,
    cols: &[usize],
    rows: &[usize],
    outcome: &DecodeOutcome,
) -> bool {
    // Horizontal bands: (start, extent, anchored to the image's right?).
    // A left margin shows the right end of a hidden block; interior and
    // right-margin bands are anchored to the image's left edge. `None`
    // extent marks a full band that must match the image exactly.
    let right_edge = cols[outcome.widths.len() - 1] + outcome.widths[outcome.widths.len() - 1];
    let top_edge = rows[outcome.heights.len() - 1] + outcome.heights[outcome.heights.len() - 1];
    let mut xbands: Vec<(usize, usize, bool, bool)> = Vec::new();
    if cols[0] > 0 {
        xbands.push((0, cols[0], true, false));
    }
    for (i, &w) in outcome.widths.iter().enumerate() {
        xbands.push((cols[i], w, false, true));
    }
    if right_edge < p.width() {
        xbands.push((right_edge, p.width() - right_edge, false, false));
    }
    let mut ybands: Vec<(usize, usize, bool, bool)> = Vec::new();
    if rows[0] > 0 {
        ybands.push((0, rows[0], true, false));
    }
    for (j, &h) in outcome.heights.iter().enumerate() {
        ybands.push((rows[j], h, false, true));
    }
    if top_edge < p.height() {
        ybands.push((top_edge, p.height() - top_edge, false, false));
    }

    for &(y0, h, far_y, full_y) in &ybands {
        for &(x0, w, far_x, full_x) in &xbands {
            if full_x && full_y {
                continue; // a complete block, already decoded
            }
            let fits = images.iter().any(|img| {
                if full_x && img.width() != w {
                    return false;
                }
                if full_y && img.height() != h {
                    return false;
                }
                if !full_x && img.width() <= w {
                    return false;
                }
                if !full_y && img.height() <= h {
                    return false;
                }
                let sx = if far_x { img.width() - w } else { 0 };
                let sy = if far_y { img.height() - h } else { 0 };
                (0..h).all(|dy| {
                    (0..w).all(|dx| {
                        img.get(sx + dx, sy + dy) == tileset.tile(p.get(x0 + dx, y0 + dy))
                    })
                })
            });
            if !fits {
                return false;
            }
        }
    }
    true
}

/// All strictly increasing sequences in `0..extent` whose gaps lie in
/// `{n, n+1}` and whose margins are at most `n`.
fn offset_sequences(n: usize, extent: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for start in 0..=n.min(extent.saturating_sub(1)) {
        let mut stack = vec![vec![start]];
        while let Some(seq) = stack.pop() {
            let last = seq[seq.len() - 1];
            if extent - 1 - last <= n {
                out.push(seq.clone());
            }
            for gap in [n, n + 1] {
                if last + gap < extent {
                    let mut next = seq.clone();
                    next.push(last + gap);
                    stack.push(next);
                }
            }
        }
    }
    out
}

struct DecodeOutcome {
    pattern: Pattern2D,
    /// Widths of the complete block columns, leftmost first.
    widths: Vec<usize>,
    /// Heights of the complete block rows, bottom first.
    heights: Vec<usize>,
}

/// Extent of the final block line along one axis before resolution.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Extent {
    Complete(usize),
    /// Exactly `n` cells are visible: either a complete narrow block or
    /// the cropped left part of a wide one. Resolved by decoding.
    Tentative,
    Margin,
}

fn line_extents(n: usize, offsets: &[usize], extent: usize) -> Vec<Extent> {
    let mut out = Vec::with_capacity(offsets.len());
    for (i, &o) in offsets.iter().enumerate() {
        if i + 1 < offsets.len() {
            out.push(Extent::Complete(offsets[i + 1] - o));
        } else {
            let avail = extent - o;
            if avail == n + 1 {
                out.push(Extent::Complete(n + 1));
            } else if avail == n {
                out.push(Extent::Tentative);
            } else {
                out.push(Extent::Margin);
            }
        }
    }
    out
}

/// Decodes the complete blocks of `p` under the given candidate grid.
///
/// In strict mode a block of known extent that fails to decode is an
/// error and an empty grid of complete blocks is an error; in lenient
/// mode both simply report "does not decode" (`None`). Blocks in a
/// tentative final column or row are never errors: a failure there marks
/// the line as a trimmed margin.
fn attempt_decode(
    n: u16,
    extended: &WangTileSet<Label>,
    tileset: &WangTileSet<Label>,
    p: &Pattern2D,
    cols: &[usize],
    rows: &[usize],
    strict: bool,
) -> Result<Option<DecodeOutcome>> {
    let nn = n as usize;
    let col_ext = line_extents(nn, cols, p.width());
    let row_ext = line_extents(nn, rows, p.height());

    let decode_ok = |x0: usize, y0: usize, w: usize, h: usize| -> bool {
        decode_block(n, extended, tileset, p, x0, y0, w, h).is_ok()
    };

    // Resolve a tentative final column by decoding its blocks against
    // every row of known height, and symmetrically for a tentative final
    // row, repeating until neither axis makes progress. Whichever line
    // resolves second also covers the shared corner block. When neither
    // axis starts with a known line the corner is the only candidate
    // block and decides both extents at once.
    let mut col_w: Vec<Option<usize>> = col_ext
        .iter()
        .map(|e| match e {
            Extent::Complete(w) => Some(*w),
            _ => None,
        })
        .collect();
    let mut row_h: Vec<Option<usize>> = row_ext
        .iter()
        .map(|e| match e {
            Extent::Complete(h) => Some(*h),
            _ => None,
        })
        .collect();
    let lc = cols.len() - 1;
    let lr = rows.len() - 1;
    let mut col_open = col_ext[lc] == Extent::Tentative;
    let mut row_open = row_ext[lr] == Extent::Tentative;
    loop {
        let mut progress = false;
        if col_open && row_h.iter().any(Option::is_some) {
            let ok = (0..rows.len()).all(|j| match row_h[j] {
                Some(h) => decode_ok(cols[lc], rows[j], nn, h),
                None => true,
            });
            col_w[lc] = if ok { Some(nn) } else { None };
            col_open = false;
            progress = true;
        }
        if row_open && col_w.iter().any(Option::is_some) {
            let ok = (0..cols.len()).all(|i| match col_w[i] {
                Some(w) => decode_ok(cols[i], rows[lr], w, nn),
                None => true,
            });
            row_h[lr] = if ok { Some(nn) } else { None };
            row_open = false;
            progress = true;
        }
        if !progress {
            break;
        }
    }
    if col_open && row_open {
        let ok = decode_ok(cols[lc], rows[lr], nn, nn);
        col_w[lc] = if ok { Some(nn) } else { None };
        row_h[lr] = if ok { Some(nn) } else { None };
    }
    // A line that is still open has no complete partner line to hold a
    // block, so it stays a margin.

    let widths: Vec<usize> = col_w.iter().map_while(|w| *w).collect();
    let heights: Vec<usize> = row_h.iter().map_while(|h| *h).collect();
    if widths.is_empty() || heights.is_empty() {
        return if strict {
            Err(Error::domain("the pattern contains no complete return block"))
        } else {
            Ok(None)
        };
    }

    let mut letters = vec![0usize; widths.len() * heights.len()];
    for (rj, &h) in heights.iter().enumerate() {
        for (ci, &w) in widths.iter().enumerate() {
            match decode_block(n, extended, tileset, p, cols[ci], rows[rj], w, h) {
                Ok(idx) => letters[rj * widths.len() + ci] = idx,
                Err(e) => {
                    // Failures in a tentative line were consumed during
                    // resolution; reaching here means a known-extent
                    // block does not decode.
                    return if strict {
                        Err(Error::domain(format!("block at grid position ({ci}, {rj}): {e}")))
                    } else {
                        Ok(None)
                    };
                }
            }
        }
    }
    let pattern = Pattern2D::new(widths.len(), heights.len(), letters)?;
    Ok(Some(DecodeOutcome { pattern, widths, heights }))
}

/// Decodes one block with its lower-left corner at `(x0, y0)` and the
/// given extent, returning the preimage tile's index in `extended`.
fn decode_block(
    n: u16,
    extended: &WangTileSet<Label>,
    tileset: &WangTileSet<Label>,
    p: &Pattern2D,
    x0: usize,
    y0: usize,
    w: usize,
    h: usize,
) -> Result<usize> {
    let bottom: Vec<Label> = (0..w).map(|dx| tileset.tile(p.get(x0 + dx, y0)).bottom).collect();
    let top: Vec<Label> = (0..w).map(|dx| tileset.tile(p.get(x0 + dx, y0 + h - 1)).top).collect();
    let left: Vec<Label> = (0..h).map(|dy| tileset.tile(p.get(x0, y0 + dy)).left).collect();
    let right: Vec<Label> = (0..h).map(|dy| tileset.tile(p.get(x0 + w - 1, y0 + dy)).right).collect();
    let decoded = WangTile::new(
        tau_inverse(n, &right)?,
        tau_inverse(n, &top)?,
        tau_inverse(n, &left)?,
        tau_inverse(n, &bottom)?,
    );
    let idx = extended
        .index_of(&decoded)
        .ok_or_else(|| Error::domain(format!("decoded boundary labels {decoded} form no known tile")))?;
    let image = block_image(n, &decoded)?;
    if image.width() != w || image.height() != h {
        return Err(Error::domain(format!(
            "decoded tile {decoded} rebuilds to a {}x{} block, not {w}x{h}",
            image.width(),
            image.height()
        )));
    }
    for dy in 0..h {
        for dx in 0..w {
            if image.get(dx, dy) != tileset.tile(p.get(x0 + dx, y0 + dy)) {
                return Err(Error::domain(format!(
                    "cell ({}, {}) disagrees with the rebuilt block of {decoded}",
                    x0 + dx,
                    y0 + dy
                )));
            }
        }
    }
    Ok(idx)
}

/// Tests the marker-set conditions directly: along the perpendicular
/// axis membership is constant on surrounded dominoes, and along the
/// marker axis no surrounded domino has both entries in the set.
pub fn is_marker_set<L: EdgeLabel>(
    tileset: &WangTileSet<L>,
    markers: &BTreeSet<usize>,
    axis: Axis,
    radius: usize,
    config: &SolverConfig,
) -> Result<bool> {
    if let Some(&i) = markers.iter().find(|&&i| i >= tileset.len()) {
        return Err(Error::domain(format!(
            "marker index {i} out of range for a {}-tile set",
            tileset.len()
        )));
    }
    if markers.is_empty() {
        return Ok(false);
    }
    let constancy = dominoes_with_surrounding(tileset, axis.perpendicular(), radius, config)?;
    let adjacency = dominoes_with_surrounding(tileset, axis, radius, config)?;
    Ok(constancy.iter().all(|(a, b)| markers.contains(a) == markers.contains(b))
        && adjacency.iter().all(|(a, b)| !(markers.contains(a) && markers.contains(b))))
}

/// Searches for marker sets: tile sets whose occurrences in any tiling
/// fill whole lines perpendicular to `axis`, no two of them adjacent.
///
/// Tiles with no surrounding of the search radius can never occur, so
/// they are not candidates. The remaining tiles are grouped into classes
/// forced to share lines (the transitive closure of surrounded
/// perpendicular dominoes); classes adjacent to themselves along `axis`
/// are unusable, and every maximal independent union of the remaining
/// classes is returned, largest first. The empty list means no marker
/// set exists at this radius.
pub fn find_markers<L: EdgeLabel>(
    tileset: &WangTileSet<L>,
    axis: Axis,
    radius: usize,
    config: &SolverConfig,
) -> Result<Vec<BTreeSet<usize>>> {
    if radius == 0 {
        return Err(Error::domain("marker search needs radius >= 1"));
    }
    let constancy = dominoes_with_surrounding(tileset, axis.perpendicular(), radius, config)?;
    let adjacency = dominoes_with_surrounding(tileset, axis, radius, config)?;
    let alive = tiles_allowing_surrounding(tileset, radius, config)?.kept;

    let mut uf: UnionFind<usize> = UnionFind::new(tileset.len());
    for &(a, b) in &constancy {
        uf.union(a, b);
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in alive {
        groups.entry(uf.find(i)).or_default().push(i);
    }
    let mut classes: Vec<Vec<usize>> = groups.into_values().collect();
    classes.sort_by_key(|c| c[0]);
    let mut class_of = vec![0usize; tileset.len()];
    for (c, members) in classes.iter().enumerate() {
        for &i in members {
            class_of[i] = c;
        }
    }

    let mut looped = vec![false; classes.len()];
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for &(a, b) in &adjacency {
        let (ca, cb) = (class_of[a], class_of[b]);
        if ca == cb {
            looped[ca] = true;
        } else {
            edges.insert((ca.min(cb), ca.max(cb)));
        }
    }
    let nodes: Vec<usize> = (0..classes.len()).filter(|&c| !looped[c]).collect();
    let compatible =
        |u: usize, v: usize| !edges.contains(&(u.min(v), u.max(v)));

    let mut unions = Vec::new();
    let mut current = Vec::new();
    maximal_cliques(&mut current, nodes, Vec::new(), &compatible, &mut unions);

    let mut sets: Vec<BTreeSet<usize>> = unions
        .into_iter()
        .filter(|u| !u.is_empty())
        .map(|u| u.iter().flat_map(|&c| classes[c].iter().copied()).collect())
        .collect();
    sets.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    sets.dedup();
    for m in &sets {
        debug_assert!(is_marker_set(tileset, m, axis, radius, config)?);
    }
    Ok(sets)
}

/// Bron–Kerbosch enumeration of maximal cliques of the compatibility
/// relation (equivalently, maximal independent sets of its complement).
fn maximal_cliques(
    current: &mut Vec<usize>,
    mut candidates: Vec<usize>,
    mut excluded: Vec<usize>,
    compatible: &dyn Fn(usize, usize) -> bool,
    out: &mut Vec<Vec<usize>>,
) {
    if candidates.is_empty() && excluded.is_empty() {
        out.push(current.clone());
        return;
    }
    while let Some(v) = candidates.pop() {
        current.push(v);
        maximal_cliques(
            current,
            candidates.iter().copied().filter(|&u| compatible(u, v)).collect(),
            excluded.iter().copied().filter(|&u| compatible(u, v)).collect(),
            compatible,
            out,
        );
        current.pop();
        excluded.push(v);
    }
}

/// Which end of a fused pair the marker occupies, in reading order:
/// `Left` is the left cell of a horizontal pair or the bottom cell of a
/// vertical pair; `Right` the right or top cell.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    Left,
    Right,
}

/// One marker-fusion step: the tile set it produced and the substitution
/// mapping each produced tile back to its source cells.
#[derive(Clone, Debug)]
pub struct FusionStep {
    pub markers: BTreeSet<usize>,
    pub axis: Axis,
    pub side: Side,
    /// Indices of the non-marker tiles kept unchanged, ascending; they
    /// come first in the produced set.
    pub kept: Vec<usize>,
    /// The merged `(first cell, second cell)` pairs, in marker-major
    /// order; they follow the kept tiles in the produced set.
    pub pairs: Vec<(usize, usize)>,
    pub tiles: WangTileSet<LabelWord>,
    /// Maps each produced tile to its 1- or 2-cell source pattern.
    pub substitution: Substitution2D,
}

/// Merges every marker occurrence with its neighbor on `side`.
///
/// A marker tile never stands alone in a tiling once its line is
/// absorbed, so each surrounded marker/neighbor domino becomes one new
/// tile whose labels along the fusion axis concatenate and whose
/// perpendicular labels come from the outer edges. A non-marker tile is
/// kept unchanged exactly when some surrounded domino shows it with a
/// non-marker on its absorbing side.
pub fn fuse(
    tileset: &WangTileSet<LabelWord>,
    markers: &BTreeSet<usize>,
    axis: Axis,
    side: Side,
    radius: usize,
    config: &SolverConfig,
) -> Result<FusionStep> {
    if !is_marker_set(tileset, markers, axis, radius, config)? {
        return Err(Error::domain(
            "fusion needs a marker set for the requested axis and radius",
        ));
    }
    let dominoes = dominoes_with_surrounding(tileset, axis, radius, config)?;
    let mut pairs: Vec<(usize, usize)> = dominoes
        .iter()
        .copied()
        .filter(|&(a, b)| match side {
            Side::Left => markers.contains(&a),
            Side::Right => markers.contains(&b),
        })
        .collect();
    if side == Side::Right {
        pairs.sort_by_key(|&(a, b)| (b, a));
    }
    let kept: Vec<usize> = (0..tileset.len())
        .filter(|t| {
            !markers.contains(t)
                && dominoes.iter().any(|&(a, b)| match side {
                    Side::Left => b == *t && !markers.contains(&a),
                    Side::Right => a == *t && !markers.contains(&b),
                })
        })
        .collect();

    let mut tiles = Vec::with_capacity(kept.len() + pairs.len());
    let mut images = Vec::with_capacity(kept.len() + pairs.len());
    for &t in &kept {
        tiles.push(tileset.tile(t).clone());
        images.push(Pattern2D::cell(t));
    }
    for &(a, b) in &pairs {
        let ta = tileset.tile(a);
        let tb = tileset.tile(b);
        let (fused, image) = match axis {
            Axis::Horizontal => (
                WangTile::new(
                    tb.right.clone(),
                    ta.top.join(&tb.top),
                    ta.left.clone(),
                    ta.bottom.join(&tb.bottom),
                ),
                Pattern2D::new(2, 1, vec![a, b])?,
            ),
            Axis::Vertical => (
                WangTile::new(
                    ta.right.join(&tb.right),
                    tb.top.clone(),
                    ta.left.join(&tb.left),
                    ta.bottom.clone(),
                ),
                Pattern2D::new(1, 2, vec![a, b])?,
            ),
        };
        tiles.push(fused);
        images.push(image);
    }
    let tiles = WangTileSet::new_custom(tiles)?;
    let substitution = Substitution2D::new(images)?;
    Ok(FusionStep { markers: markers.clone(), axis, side, kept, pairs, tiles, substitution })
}

/// Search radii for the self-similarity pipeline. The first fusion works
/// at a larger radius than the rest because the initial tile set admits
/// more spurious dominoes than its fused descendants.
#[derive(Clone, Copy, Debug)]
pub struct PipelineRadii {
    /// Radius for all marker searches.
    pub markers: usize,
    /// Radius for the first fusion step.
    pub fuse_first: usize,
    /// Radius for the remaining fusion steps.
    pub fuse_rest: usize,
    /// Radius for the final pruning pass.
    pub prune: usize,
}

impl Default for PipelineRadii {
    fn default() -> Self {
        PipelineRadii { markers: 1, fuse_first: 2, fuse_rest: 1, prune: 2 }
    }
}

/// What one pipeline stage did: tile counts, and either the marker set a
/// fusion used or the indices a pruning stage removed.
#[derive(Clone, Debug)]
pub struct StageReport {
    pub name: String,
    pub tiles_before: usize,
    pub tiles_after: usize,
    /// Search radius the stage ran at, where one applies.
    pub radius: Option<usize>,
    pub markers: Option<BTreeSet<usize>>,
    pub dropped: Option<Vec<usize>>,
}

/// Result of a successful self-similarity verification.
#[derive(Clone, Debug)]
pub struct SelfSimilarityReport {
    /// One entry per pipeline stage, in execution order.
    pub stages: Vec<StageReport>,
    /// Bijection from the input tiles to the final fused set.
    pub certificate: EquivalenceCertificate<Label, LabelWord>,
    /// The verified substitution on the input set's own indices.
    pub composed: Substitution2D,
    pub char_poly: IntPoly,
    pub char_poly_factored: Factorization,
    /// Dominant eigenvalue of the composed substitution's incidence
    /// matrix.
    pub perron: f64,
}

/// Verifies that the canonical core set of order `n` is self-similar by
/// reconstructing its substitution from the tiles alone.
pub fn verify_self_similarity(
    n: u16,
    radii: &PipelineRadii,
    config: &SolverConfig,
) -> Result<SelfSimilarityReport> {
    let tiles = WangTileSet::metallic(n, false)?;
    verify_self_similarity_for(n, &tiles, radii, config)
}

/// Runs the fusion pipeline on an arbitrary ordering of the order-`n`
/// core set: `n` fusions along each axis, a pruning pass, an equivalence
/// check against the input set, and composition of all step
/// substitutions. The composed substitution is finally cross-checked
/// against the independent block construction; any stage that cannot
/// proceed fails with an error naming it.
pub fn verify_self_similarity_for(
    n: u16,
    tileset: &WangTileSet<Label>,
    radii: &PipelineRadii,
    config: &SolverConfig,
) -> Result<SelfSimilarityReport> {
    if n == 0 || n > 4 {
        return Err(Error::domain("self-similarity search supports 1 <= n <= 4"));
    }
    // Block columns have widths n and n+1, so assembling them takes n
    // fusions along e1 (and likewise n along e2 for the rows). Every
    // fusion but the last per axis pairs markers with the cell after
    // them; the last absorbs the leftover single-cell markers into the
    // cell before them. At n = 2 this is the classical four-stage run.
    let mut plan: Vec<(Axis, Side, usize, String)> = Vec::new();
    for (axis, word) in [(Axis::Horizontal, "e1"), (Axis::Vertical, "e2")] {
        for k in 1..=n as usize {
            let side = if k == n as usize { Side::Right } else { Side::Left };
            let radius = if plan.is_empty() { radii.fuse_first } else { radii.fuse_rest };
            let pos = match (axis, side) {
                (Axis::Horizontal, Side::Left) => "left",
                (Axis::Horizontal, Side::Right) => "right",
                (Axis::Vertical, Side::Left) => "bottom",
                (Axis::Vertical, Side::Right) => "top",
            };
            plan.push((axis, side, radius, format!("fuse {k}/{n} along {word}, markers {pos}")));
        }
    }
    let mut stages = Vec::new();
    let mut steps: Vec<Substitution2D> = Vec::new();
    let mut current = tileset.to_words();
    for (axis, side, radius, name) in plan {
        // A marker set found at radius r stays one at every radius >= r,
        // so when the configured radius turns up nothing we widen the
        // search a little and fuse at the widened radius.
        let cap = radii.markers + 2;
        let mut marker_radius = radii.markers;
        let markers = loop {
            let sets = find_markers(&current, axis, marker_radius, config)?;
            if let Some(m) = sets.into_iter().next() {
                break m;
            }
            if marker_radius >= cap {
                return Err(Error::domain(format!(
                    "pipeline stage \"{name}\": no marker set exists at radius <= {cap}"
                )));
            }
            marker_radius += 1;
        };
        let step = fuse(&current, &markers, axis, side, radius.max(marker_radius), config)?;
        stages.push(StageReport {
            name: name.to_string(),
            tiles_before: current.len(),
            tiles_after: step.tiles.len(),
            radius: Some(marker_radius),
            markers: Some(markers),
            dropped: None,
        });
        steps.push(step.substitution);
        current = step.tiles;
    }

    let pruned = tiles_allowing_surrounding(&current, radii.prune, config)?;
    stages.push(StageReport {
        name: "prune by surroundings".to_string(),
        tiles_before: current.len(),
        tiles_after: pruned.tiles.len(),
        radius: Some(radii.prune),
        markers: None,
        dropped: Some(pruned.dropped.clone()),
    });
    steps.push(Substitution2D::new(pruned.kept.iter().map(|&k| Pattern2D::cell(k)).collect())?);
    let current = pruned.tiles;

    let mut prefix = steps[0].clone();
    for s in &steps[1..] {
        prefix = prefix.compose(s)?;
    }
    let omega = build_omega_for(n, tileset)?;
    let certificates = equivalences_all(tileset, &current);
    if certificates.is_empty() {
        return Err(Error::domain(
            "pipeline stage \"equivalence\": the final set is not a relabeling of the input set",
        ));
    }
    stages.push(StageReport {
        name: "equivalence".to_string(),
        tiles_before: current.len(),
        tiles_after: tileset.len(),
        radius: None,
        markers: None,
        dropped: None,
    });
    for certificate in certificates {
        let relabel = Substitution2D::new(
            certificate.tile_bijection.iter().map(|&j| Pattern2D::cell(j)).collect(),
        )?;
        let composed = prefix.compose(&relabel)?;
        if composed != omega {
            continue;
        }
        let incidence = composed.incidence();
        let char_poly = incidence.char_poly();
        let char_poly_factored = char_poly.factor();
        let (perron, _) = incidence.perron_eigenvalue(1e-12, 100_000)?;
        let mut stages = stages;
        stages.push(StageReport {
            name: "cross-check".to_string(),
            tiles_before: tileset.len(),
            tiles_after: tileset.len(),
            radius: None,
            markers: None,
            dropped: None,
        });
        return Ok(SelfSimilarityReport {
            stages,
            certificate,
            composed,
            char_poly,
            char_poly_factored,
            perron,
        });
    }
    Err(Error::domain(
        "pipeline stage \"cross-check\": no certificate reconciles the composed substitution with the block construction",
    ))
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::fixtures;
    use crate::metallic::build_omega;
    use crate::solver::{valid_patterns, Region, TilingProblem};
    use crate::tiles::TileKind;

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    fn v0(l: Label) -> u16 {
        match l {
            Label::Triple(a, _, _) => a,
            Label::Opaque(_) => panic!("opaque label in a metallic tile"),
        }
    }

    /// A pseudo-random valid pattern, produced by pinning a random cell
    /// and letting the solver fill the rest.
    fn random_valid(ts: &WangTileSet<Label>, w: usize, h: usize, rng: &mut ChaCha8Rng) -> Pattern2D {
        loop {
            let x = rng.gen_range(0..w);
            let y = rng.gen_range(0..h);
            let t = rng.gen_range(0..ts.len());
            let mut c = cfg();
            c.descending = rng.gen();
            let problem =
                TilingProblem::new(ts, Region::Rectangle { width: w, height: h }).fix(x, y, t);
            if let Ok(Some(p)) = problem.solve(&c) {
                return p;
            }
        }
    }

    /// Reindexes a pattern over `from` into the index space of `to`.
    fn reindex(from: &WangTileSet<Label>, to: &WangTileSet<Label>, p: &Pattern2D) -> Pattern2D {
        let map: Vec<usize> = from
            .tiles()
            .iter()
            .map(|t| to.index_of(t).expect("tile missing from the target set"))
            .collect();
        Pattern2D::new(p.width(), p.height(), p.cells().iter().map(|&c| map[c]).collect()).unwrap()
    }

    fn expected_first_markers() -> BTreeSet<usize> {
        [0, 1, 2, 5, 6, 7, 10, 11, 12, 15, 16, 17, 20, 21].into_iter().collect()
    }

    #[test]
    fn junction_grids_of_block_images() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=3u16 {
            let core = WangTileSet::metallic(n, false).unwrap();
            let omega = build_omega(n, false).unwrap();
            for _ in 0..4 {
                let x = random_valid(&core, 3, 3, &mut rng);
                let y = omega.apply(&x).unwrap();
                let grid = find_junction_grid(&core, &y).unwrap();
                assert_eq!(grid.shift, (0, 0), "image grids start at the origin");
                assert_eq!(grid.column_offsets.len(), 3);
                assert_eq!(grid.row_offsets.len(), 3);
                for offs in [&grid.column_offsets, &grid.row_offsets] {
                    for w in offs.windows(2) {
                        let gap = w[1] - w[0];
                        assert!(
                            gap == n as usize || gap == n as usize + 1,
                            "gap {gap} out of range for n = {n}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn junction_grid_reports_failures() {
        let core = WangTileSet::metallic(1, false).unwrap();
        let white = core
            .tiles()
            .iter()
            .position(|t| matches!(classify(1, t).unwrap().kind, TileKind::White { .. }))
            .unwrap();
        let err = find_junction_grid(&core, &Pattern2D::cell(white)).unwrap_err();
        assert!(err.to_string().contains("no junction tile"), "{err}");

        // Hand-built layouts (edge consistency does not matter here):
        // junctions on a diagonal are not a Cartesian product.
        let junction = core
            .tiles()
            .iter()
            .position(|t| matches!(classify(1, t).unwrap().kind, TileKind::Junction { .. }))
            .unwrap();
        let diagonal =
            Pattern2D::new(2, 2, vec![junction, white, white, junction]).unwrap();
        let err = find_junction_grid(&core, &diagonal).unwrap_err();
        assert!(err.to_string().contains("not a grid"), "{err}");

        // Two junction columns three cells apart cannot both be real:
        // return blocks of order 1 are one or two cells wide.
        let gap3 = Pattern2D::new(4, 1, vec![junction, white, white, junction]).unwrap();
        let err = find_junction_grid(&core, &gap3).unwrap_err();
        assert!(err.to_string().contains("outside {1, 2}"), "{err}");

        // A junction further than n cells from the border leaves a margin
        // no cropped block could fill.
        let wide_margin = Pattern2D::new(4, 1, vec![white, white, junction, white]).unwrap();
        let err = find_junction_grid(&core, &wide_margin).unwrap_err();
        assert!(err.to_string().contains("margin"), "{err}");

        let err = find_junction_grid(&core, &Pattern2D::cell(core.len())).unwrap_err();
        assert!(err.to_string().contains("out of range"), "{err}");
    }

    #[test]
    fn junction_gaps_on_random_valid_patterns() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for n in 1..=3u16 {
            let core = WangTileSet::metallic(n, false).unwrap();
            for _ in 0..3 {
                let p = random_valid(&core, 6, 6, &mut rng);
                let mut cols = BTreeSet::new();
                let mut rows = BTreeSet::new();
                for y in 0..p.height() {
                    for x in 0..p.width() {
                        if classify(n, core.tile(p.get(x, y))).unwrap().kind.is_junction() {
                            cols.insert(x);
                            rows.insert(y);
                        }
                    }
                }
                for offs in [cols, rows] {
                    let offs: Vec<usize> = offs.into_iter().collect();
                    for w in offs.windows(2) {
                        let gap = w[1] - w[0];
                        assert!(
                            gap == n as usize || gap == n as usize + 1,
                            "junction gap {gap} on a valid pattern, n = {n}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn desubstitution_inverts_the_block_substitution() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for n in 1..=3u16 {
            let core = WangTileSet::metallic(n, false).unwrap();
            let ext = WangTileSet::metallic(n, true).unwrap();
            let omega_core = build_omega(n, false).unwrap();
            let omega_ext = build_omega(n, true).unwrap();
            for _ in 0..4 {
                let w = rng.gen_range(2..=4);
                let h = rng.gen_range(2..=4);
                let x = random_valid(&core, w, h, &mut rng);
                let y = omega_core.apply(&x).unwrap();
                let d = desubstitute(n, &core, &y).unwrap();
                assert_eq!(d.shift, (0, 0));
                assert_eq!(d.trimmed, (0, 0, 0, 0));
                assert_eq!(d.pattern, reindex(&core, &d.tiles, &x));
                // Reapplying the substitution to the decode reproduces
                // the input exactly.
                assert_eq!(omega_ext.apply(&d.pattern).unwrap(), reindex(&core, &ext, &y));

                // Block size laws, read off the junction grid: the gap
                // after a junction column is the width of the decoded
                // tile's bottom image, and a yellow tile in a block's
                // bottom row pins the block height to n.
                let grid = find_junction_grid(&core, &y).unwrap();
                for ci in 0..grid.column_offsets.len() - 1 {
                    let gap = grid.column_offsets[ci + 1] - grid.column_offsets[ci];
                    let t = d.tiles.tile(d.pattern.get(ci, 0));
                    assert_eq!(gap, n as usize + 1 - v0(t.bottom) as usize);
                }
                for rj in 0..d.pattern.height() {
                    for ci in 0..d.pattern.width() {
                        let t = d.tiles.tile(d.pattern.get(ci, rj));
                        let img = block_image(n, t).unwrap();
                        let yellow_bottom = (0..img.width()).any(|dx| {
                            matches!(
                                classify(n, img.get(dx, 0)).unwrap().kind,
                                TileKind::YellowH { .. } | TileKind::YellowV { .. }
                            )
                        });
                        if yellow_bottom {
                            assert_eq!(img.height(), n as usize);
                        }
                    }
                }
            }
            // The extended set round-trips through its own substitution.
            for _ in 0..2 {
                let x = random_valid(&ext, 3, 3, &mut rng);
                let y = omega_ext.apply(&x).unwrap();
                let d = desubstitute(n, &ext, &y).unwrap();
                assert_eq!(d.pattern, x);
                assert_eq!(d.shift, (0, 0));
            }
        }
    }

    #[test]
    fn desubstitution_reports_the_crop_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for n in 1..=2u16 {
            let nn = n as usize;
            let core = WangTileSet::metallic(n, false).unwrap();
            let ext = WangTileSet::metallic(n, true).unwrap();
            let omega = build_omega(n, false).unwrap();
            // Pin a corner tile whose image block is (n+1) x (n+1) so
            // every shift in {0..n}^2 is realizable by cropping.
            let corner = core
                .tiles()
                .iter()
                .position(|t| v0(t.left) == 0 && v0(t.bottom) == 0)
                .unwrap();
            let big = TilingProblem::new(&core, Region::Rectangle { width: 4, height: 4 })
                .fix(0, 0, corner)
                .solve(&cfg())
                .unwrap()
                .expect("solvable");
            let x = big.sub_pattern(1, 1, 3, 3).unwrap();
            let y = omega.apply(&big).unwrap();
            let _ = &mut rng;
            for k1 in 0..=nn {
                for k2 in 0..=nn {
                    let cx = nn + 1 - k1;
                    let cy = nn + 1 - k2;
                    let cropped = y.sub_pattern(cx, cy, y.width() - cx, y.height() - cy).unwrap();
                    let d = desubstitute(n, &core, &cropped).unwrap();
                    assert_eq!(d.shift, (k1, k2), "n = {n}");
                    assert_eq!(d.trimmed, (k1, k2, 0, 0));
                    assert_eq!(d.pattern, reindex(&core, &ext, &x));
                }
            }
        }
    }

    #[test]
    fn truncated_margins_are_trimmed_or_honestly_decoded() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let core = WangTileSet::metallic(1, false).unwrap();
        let ext = WangTileSet::metallic(1, true).unwrap();
        let omega = build_omega(1, false).unwrap();
        let omega_ext = build_omega(1, true).unwrap();
        let mut trims = 0;
        for _ in 0..20 {
            let x = random_valid(&core, 2, 2, &mut rng);
            if v0(core.tile(x.get(1, 0)).bottom) != 0 {
                continue; // want a wide final block column
            }
            let y = omega.apply(&x).unwrap();
            let cut = y.sub_pattern(0, 0, y.width() - 1, y.height()).unwrap();
            let d = desubstitute(1, &core, &cut).unwrap();
            // Whatever was decoded, it is a true preimage of the
            // untrimmed region.
            let (l, b, r, t) = d.trimmed;
            let kept = cut
                .sub_pattern(l, b, cut.width() - l - r, cut.height() - b - t)
                .unwrap();
            assert_eq!(omega_ext.apply(&d.pattern).unwrap(), reindex(&core, &ext, &kept));
            if d.pattern.width() == 1 {
                trims += 1;
                assert_eq!(d.trimmed, (0, 0, 1, 0));
                assert_eq!(d.pattern, reindex(&core, &ext, &x.sub_pattern(0, 0, 1, 2).unwrap()));
            }
        }
        assert!(trims > 0, "no sample exercised the trimming path");

        // A single junction cell is its own complete block: the decode
        // recovers the white preimage rather than trimming everything.
        let junction = core.index_of(&WangTile::new(
            Label::t(0, 1, 1),
            Label::t(0, 1, 1),
            Label::t(0, 1, 2),
            Label::t(0, 1, 2),
        ));
        let junction = junction.expect("the all-ones junction is a core tile");
        let d = desubstitute(1, &core, &Pattern2D::cell(junction)).unwrap();
        let white = d
            .tiles
            .index_of(&WangTile::new(
                Label::t(1, 1, 2),
                Label::t(1, 1, 2),
                Label::t(1, 1, 1),
                Label::t(1, 1, 1),
            ))
            .unwrap();
        assert_eq!(d.pattern, Pattern2D::cell(white));
        assert_eq!(d.trimmed, (0, 0, 0, 0));
    }

    #[test]
    fn alternative_grids_never_decode_small_images() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for n in 1..=2u16 {
            let core = WangTileSet::metallic(n, false).unwrap();
            let omega = build_omega(n, false).unwrap();
            for _ in 0..3 {
                let x = random_valid(&core, 3, 3, &mut rng);
                let y = omega.apply(&x).unwrap();
                let grids = decoding_grids(n, &core, &y).unwrap();
                let truth = find_junction_grid(&core, &y).unwrap();
                assert_eq!(
                    grids,
                    vec![(truth.column_offsets, truth.row_offsets)],
                    "decoding grid not unique for n = {n}"
                );
            }
        }
    }

    #[test]
    fn marker_sets_match_the_reference_order() {
        let t2 = fixtures::t2_reference();
        let sets = find_markers(&t2, Axis::Horizontal, 1, &cfg()).unwrap();
        assert_eq!(sets, vec![expected_first_markers()]);
    }

    #[test]
    fn marker_search_commutes_with_transposition() {
        for ts in [fixtures::t1_reference(), WangTileSet::metallic(1, false).unwrap()] {
            let flipped = ts.hat_image();
            let by_rows = find_markers(&ts, Axis::Vertical, 1, &cfg()).unwrap();
            let by_cols = find_markers(&flipped, Axis::Horizontal, 1, &cfg()).unwrap();
            assert_eq!(by_rows, by_cols);
        }
    }

    #[test]
    fn find_markers_outputs_are_maximal_marker_sets() {
        for ts in [fixtures::t1_reference(), fixtures::t2_reference()] {
            for axis in [Axis::Horizontal, Axis::Vertical] {
                let sets = find_markers(&ts, axis, 1, &cfg()).unwrap();
                assert!(!sets.is_empty());
                for m in &sets {
                    assert!(is_marker_set(&ts, m, axis, 1, &cfg()).unwrap());
                    for t in 0..ts.len() {
                        if !m.contains(&t) {
                            let mut bigger = m.clone();
                            bigger.insert(t);
                            assert!(
                                !is_marker_set(&ts, &bigger, axis, 1, &cfg()).unwrap(),
                                "adding tile {t} kept a marker set, so {m:?} was not maximal"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn fuse_rejects_non_marker_sets() {
        let t2 = fixtures::t2_reference().to_words();
        let m: BTreeSet<usize> = [3].into_iter().collect();
        let err = fuse(&t2, &m, Axis::Horizontal, Side::Left, 1, &cfg()).unwrap_err();
        assert!(err.to_string().contains("marker set"), "{err}");
        assert!(find_markers(&t2, Axis::Horizontal, 0, &cfg()).is_err());
    }

    #[test]
    fn fusion_pipeline_reconstructs_the_reference_intermediates() {
        let t2 = fixtures::t2_reference().to_words();
        let c = cfg();

        let m1 = expected_first_markers();
        let s1 = fuse(&t2, &m1, Axis::Horizontal, Side::Left, 2, &c).unwrap();
        assert_eq!(s1.tiles.len(), 28);
        assert_eq!(s1.kept, vec![4, 9, 13, 14, 19, 23, 24]);
        assert_eq!(s1.pairs.len(), 21);
        assert_eq!(s1.tiles.len(), s1.kept.len() + s1.pairs.len());

        // Applying the step substitution to valid patterns over the new
        // set lands on valid patterns over the old set.
        for p in valid_patterns(&s1.tiles, 2, 2).into_iter().take(40) {
            let back = s1.substitution.apply(&p).unwrap();
            validate_pattern(&t2, &back).unwrap();
        }

        let m2 = find_markers(&s1.tiles, Axis::Horizontal, 1, &c).unwrap();
        assert_eq!(m2, vec![(0..=6).collect::<BTreeSet<usize>>()]);
        let s2 = fuse(&s1.tiles, &m2[0], Axis::Horizontal, Side::Right, 1, &c).unwrap();

        let m3 = find_markers(&s2.tiles, Axis::Vertical, 1, &c).unwrap();
        let expected_m3: BTreeSet<usize> =
            [9, 10, 11, 12, 13, 14, 15, 16, 24, 25, 27, 28, 29, 30, 31, 32, 33]
                .into_iter()
                .collect();
        assert_eq!(m3, vec![expected_m3]);
        let s3 = fuse(&s2.tiles, &m3[0], Axis::Vertical, Side::Left, 1, &c).unwrap();

        // The tiles kept unchanged by the third fusion, as printed in
        // the reference run: (right, top, left, bottom).
        let expected_kept = [
            ("112", "013113", "113", "002112"),
            ("113", "013113", "113", "012112"),
            ("112", "012113", "113", "001112"),
            ("113", "012113", "113", "011112"),
            ("113", "013113113", "113", "002112112"),
            ("113", "002113113", "112", "001112112"),
            ("113", "012113113", "113", "001112112"),
        ];
        for (i, (r, t, l, b)) in expected_kept.iter().enumerate() {
            let tile = s3.tiles.tile(i);
            assert_eq!(tile.right.to_string(), *r, "tile {i} right");
            assert_eq!(tile.top.to_string(), *t, "tile {i} top");
            assert_eq!(tile.left.to_string(), *l, "tile {i} left");
            assert_eq!(tile.bottom.to_string(), *b, "tile {i} bottom");
        }

        let m4 = find_markers(&s3.tiles, Axis::Vertical, 1, &c).unwrap();
        assert_eq!(m4, vec![(0..=6).collect::<BTreeSet<usize>>()]);
        let s4 = fuse(&s3.tiles, &m4[0], Axis::Vertical, Side::Right, 1, &c).unwrap();
        assert_eq!(s4.tiles.len(), 29);

        // Four tiles admit no radius-2 surrounding. Our enumeration
        // numbers them 5, 19, 20 and 25; their labels are what counts.
        let pruned = tiles_allowing_surrounding(&s4.tiles, 2, &c).unwrap();
        assert_eq!(pruned.dropped, vec![5, 19, 20, 25]);
        assert_eq!(pruned.tiles.len(), 25);
        let expected_dropped = [
            ("012113", "012112113", "012113", "002113113"),
            ("012112113", "012113", "002113113", "012113"),
            ("002113113", "013113113", "012112113", "002112112"),
            ("013113113", "002113113", "002112112", "012112113"),
        ];
        for (&d, (r, t, l, b)) in pruned.dropped.iter().zip(expected_dropped.iter()) {
            let tile = s4.tiles.tile(d);
            assert_eq!(tile.right.to_string(), *r, "dropped tile {d} right");
            assert_eq!(tile.top.to_string(), *t, "dropped tile {d} top");
            assert_eq!(tile.left.to_string(), *l, "dropped tile {d} left");
            assert_eq!(tile.bottom.to_string(), *b, "dropped tile {d} bottom");
        }
    }

    #[test]
    fn verify_self_similarity_matches_the_reference_run() {
        let t2 = fixtures::t2_reference();
        let report =
            verify_self_similarity_for(2, &t2, &PipelineRadii::default(), &cfg()).unwrap();

        assert_eq!(report.stages.len(), 7);
        assert_eq!(report.stages[0].markers.as_ref().unwrap(), &expected_first_markers());
        assert_eq!(
            report.stages[1].markers.as_ref().unwrap(),
            &(0..=6).collect::<BTreeSet<usize>>()
        );
        let expected_m3: BTreeSet<usize> =
            [9, 10, 11, 12, 13, 14, 15, 16, 24, 25, 27, 28, 29, 30, 31, 32, 33]
                .into_iter()
                .collect();
        assert_eq!(report.stages[2].markers.as_ref().unwrap(), &expected_m3);
        assert_eq!(
            report.stages[3].markers.as_ref().unwrap(),
            &(0..=6).collect::<BTreeSet<usize>>()
        );
        assert_eq!(report.stages[4].dropped.as_ref().unwrap(), &vec![5, 19, 20, 25]);
        assert_eq!(report.stages[4].tiles_after, 25);

        assert_eq!(report.composed, fixtures::omega2_reference());

        let expected_map: BTreeMap<String, String> = [
            ("113", "012112"),
            ("111", "013113"),
            ("112", "012113"),
            ("012", "002112113"),
            ("011", "002113113"),
            ("013", "002112112"),
            ("001", "012113113"),
            ("000", "013113113"),
            ("002", "012112113"),
        ]
        .into_iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
        let vert: BTreeMap<String, String> = report
            .certificate
            .vertical_label_bijection
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        let horiz: BTreeMap<String, String> = report
            .certificate
            .horizontal_label_bijection
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        assert_eq!(vert, expected_map);
        assert_eq!(horiz, expected_map);

        assert_eq!(
            report.char_poly_factored.to_string(),
            "(x - 1)^3 x^11 (x + 1)^5 (x^2 + 2x - 1)^2 (x^2 - 6x + 1)"
        );
        let beta2_squared = 3.0 + 2.0 * 2f64.sqrt();
        assert!((report.perron - beta2_squared).abs() < 1e-8);
    }

    #[test]
    fn pipeline_closes_at_the_first_metallic_index() {
        let report = verify_self_similarity(1, &PipelineRadii::default(), &cfg()).unwrap();
        // One fusion per axis, then prune, equivalence and cross-check.
        assert_eq!(report.stages.len(), 5);
        assert_eq!(report.composed, build_omega(1, false).unwrap());
        let phi_squared = (3.0 + 5f64.sqrt()) / 2.0;
        assert!((report.perron - phi_squared).abs() < 1e-8);
        assert!(report.char_poly_factored.to_string().contains("x^2 - 3x + 1"));
    }

    #[test]
    fn pipeline_rejects_unsupported_indices() {
        let err = verify_self_similarity(5, &PipelineRadii::default(), &cfg()).unwrap_err();
        assert!(err.to_string().contains("1 <= n <= 4"), "{err}");
    }
}
