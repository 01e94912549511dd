//! The boundary word substitution `tau_n`, strip and block construction,
//! and the expansive self-substitution `omega_n` of the metallic tile
//! sets.
//!
//! For a label `v = (v0, v1, v2)` the word `tau_n(v)` has length
//! `n + 1 - v0` and consists of a head label starting with 0 followed by
//! labels `11n` and `11(n+1)`. Rectangular blocks are determined by their
//! bottom and left boundary words via SW-determinism; `omega_n` maps each
//! tile `t` to the unique block whose four boundary words are the
//! `tau_n`-images of the edge labels of `t`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::tiles::{classify, Label, TileKind, WangTile, WangTileSet};
use crate::words::{Pattern2D, Substitution2D};

/// All `3n + 4` edge labels of the metallic family of index `n`, in
/// lexicographic order.
pub fn alphabet(n: u16) -> Vec<Label> {
    let mut out = Vec::new();
    for v0 in 0..=1 {
        for v1 in v0..=1 {
            for v2 in v1..=(n + 1) {
                out.push(Label::Triple(v0, v1, v2));
            }
        }
    }
    out
}

fn triple(n: u16, l: Label) -> Result<(u16, u16, u16)> {
    match l {
        Label::Triple(a, b, c) if l.in_alphabet(n) => Ok((a, b, c)),
        _ => Err(Error::domain(format!("label {l} is not in the alphabet for n = {n}"))),
    }
}

/// The boundary word of label `v`: a word over the alphabet of length
/// `n + 1 - v0`.
pub fn tau(n: u16, v: Label) -> Result<Vec<Label>> {
    let (x, y, z) = triple(n, v)?;
    let head_digit = x + 1 - y;
    let mut w = Vec::with_capacity((n + 1 - x) as usize);
    if x == z {
        w.push(Label::Triple(0, head_digit, n + 1));
        w.extend(std::iter::repeat(Label::Triple(1, 1, n + 1)).take((n - z) as usize));
    } else {
        w.push(Label::Triple(0, head_digit, n));
        w.extend(std::iter::repeat(Label::Triple(1, 1, n)).take((z - x - 1) as usize));
        w.extend(std::iter::repeat(Label::Triple(1, 1, n + 1)).take((n + 1 - z) as usize));
    }
    debug_assert_eq!(w.len() as u16, n + 1 - x);
    Ok(w)
}

/// Decodes a boundary word back to its label. Errors if `w` is not an
/// image of [`tau`].
pub fn tau_inverse(n: u16, w: &[Label]) -> Result<Label> {
    let fail = || {
        let shown: Vec<String> = w.iter().map(|l| l.to_string()).collect();
        Error::domain(format!("word [{}] is not a boundary word for n = {n}", shown.join(" ")))
    };
    let len = w.len() as u16;
    if len != n && len != n + 1 {
        return Err(fail());
    }
    let x = n + 1 - len;
    let (h0, h1, h2) = match w[0] {
        Label::Triple(a, b, c) => (a, b, c),
        _ => return Err(fail()),
    };
    if h0 != 0 || h1 > x + 1 {
        return Err(fail());
    }
    let y = x + 1 - h1;
    let z = if h2 == n + 1 {
        x
    } else {
        let runs = w[1..].iter().filter(|&&l| l == Label::Triple(1, 1, n)).count() as u16;
        x + 1 + runs
    };
    let v = Label::Triple(x, y, z);
    if v.in_alphabet(n) && tau(n, v)? == w {
        Ok(v)
    } else {
        Err(fail())
    }
}

/// The unique bottom row over a boundary word: a corner seed followed by
/// a chain of stripe tiles.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StripResult {
    /// `(right label, bottom label)` of the corner position.
    pub corner: (Label, Label),
    /// The stripe tiles to the right of the corner, left to right.
    pub tiles: Vec<WangTile<Label>>,
    /// Top labels of the stripe tiles.
    pub gamma: Vec<Label>,
    /// Right label of the right-most position (the corner itself if the
    /// chain is empty).
    pub delta: Label,
}

/// Builds the unique horizontal strip over the boundary word of `v`:
/// given the bottom labels `tau_n(v)`, the corner's right label and each
/// following stripe tile are forced.
pub fn horizontal_strip(n: u16, v: Label) -> Result<StripResult> {
    let w = tau(n, v)?;
    let corner_right = match w[0] {
        Label::Triple(0, 0, m) if m == n => Label::Triple(0, 0, 0),
        Label::Triple(0, 1, m) if m == n => Label::Triple(0, 0, 1),
        Label::Triple(0, 1, m) if m == n + 1 => Label::Triple(0, 1, 1),
        other => return Err(Error::domain(format!("label {other} cannot head a boundary word"))),
    };
    let mut tiles = Vec::with_capacity(w.len() - 1);
    let mut right = corner_right;
    for &bottom in &w[1..] {
        let t = stripe_tile(n, right, bottom)?;
        right = t.right;
        tiles.push(t);
    }
    let gamma = tiles.iter().map(|t| t.top).collect();
    Ok(StripResult { corner: (corner_right, w[0]), tiles, gamma, delta: right })
}

/// The unique stripe tile with the given left and bottom labels: blue,
/// green, yellow or antigreen depending on the second digit of the left
/// label and the last digit of the bottom label.
fn stripe_tile(n: u16, left: Label, bottom: Label) -> Result<WangTile<Label>> {
    let (l0, l1, i) = triple(n, left)?;
    let (b0, b1, m) = triple(n, bottom)?;
    let fail = || Error::domain(format!("no stripe tile with left {left} and bottom {bottom} for n = {n}"));
    if l0 != 0 || b0 != 1 || b1 != 1 {
        return Err(fail());
    }
    let (right, top) = match (l1, m) {
        (0, m) if m == n && i < n + 1 => (Label::Triple(0, 0, i + 1), Label::Triple(1, 1, 1)),
        (0, m) if m == n + 1 && i < n + 1 => (Label::Triple(0, 1, i + 1), Label::Triple(1, 1, 1)),
        (1, m) if m == n + 1 && (1..=n).contains(&i) => (Label::Triple(0, 1, i + 1), Label::Triple(1, 1, 2)),
        (1, m) if m == n && (1..=n).contains(&i) => (Label::Triple(0, 0, i + 1), Label::Triple(1, 1, 2)),
        _ => return Err(fail()),
    };
    Ok(WangTile::new(right, top, left, bottom))
}

/// A rectangular block of concrete tiles, rows bottom to top.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Block {
    width: usize,
    height: usize,
    tiles: Vec<WangTile<Label>>,
}

impl Block {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> &WangTile<Label> {
        assert!(x < self.width && y < self.height);
        &self.tiles[y * self.width + x]
    }

    pub fn bottom_word(&self) -> Vec<Label> {
        (0..self.width).map(|x| self.get(x, 0).bottom).collect()
    }

    pub fn top_word(&self) -> Vec<Label> {
        (0..self.width).map(|x| self.get(x, self.height - 1).top).collect()
    }

    pub fn left_word(&self) -> Vec<Label> {
        (0..self.height).map(|y| self.get(0, y).left).collect()
    }

    pub fn right_word(&self) -> Vec<Label> {
        (0..self.height).map(|y| self.get(self.width - 1, y).right).collect()
    }
}

/// Lookup table from `(left, bottom)` to the unique extended-family tile,
/// the workhorse of block construction.
pub(crate) struct SwTable {
    pub(crate) tiles: WangTileSet<Label>,
    map: HashMap<(Label, Label), usize>,
}

impl SwTable {
    pub(crate) fn new(n: u16) -> Result<SwTable> {
        let tiles = WangTileSet::metallic(n, true)?;
        let mut map = HashMap::new();
        for (i, t) in tiles.tiles().iter().enumerate() {
            let prev = map.insert((t.left, t.bottom), i);
            debug_assert!(prev.is_none(), "extended set must be SW-deterministic");
        }
        Ok(SwTable { tiles, map })
    }

    pub(crate) fn lookup(&self, left: Label, bottom: Label) -> Option<&WangTile<Label>> {
        self.map.get(&(left, bottom)).map(|&i| self.tiles.tile(i))
    }
}

/// Fills the rectangle determined by a bottom and a left boundary word,
/// using SW-determinism of the extended family. Errors if some cell has
/// no matching tile.
pub fn sw_fill(n: u16, bottom: &[Label], left: &[Label]) -> Result<Block> {
    let table = SwTable::new(n)?;
    sw_fill_with(&table, bottom, left)
}

pub(crate) fn sw_fill_with(table: &SwTable, bottom: &[Label], left: &[Label]) -> Result<Block> {
    let (w, h) = (bottom.len(), left.len());
    if w == 0 || h == 0 {
        return Err(Error::domain("boundary words must be non-empty"));
    }
    let mut tiles: Vec<WangTile<Label>> = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let l = if x == 0 { left[y] } else { tiles[y * w + x - 1].right };
            let b = if y == 0 { bottom[x] } else { tiles[(y - 1) * w + x].top };
            let t = table.lookup(l, b).ok_or_else(|| {
                Error::domain(format!("no tile with left {l} and bottom {b} at cell ({x},{y})"))
            })?;
            tiles.push(t.clone());
        }
    }
    Ok(Block { width: w, height: h, tiles })
}

/// The block image of a tile: the unique rectangle whose four boundary
/// words are the `tau_n`-images of the tile's edge labels.
///
/// The bottom and left words force the block; that the right and top
/// words then agree with their images is verified and reported as an
/// error if violated.
pub fn block_image(n: u16, t: &WangTile<Label>) -> Result<Block> {
    let table = SwTable::new(n)?;
    block_image_with(&table, n, t)
}

pub(crate) fn block_image_with(table: &SwTable, n: u16, t: &WangTile<Label>) -> Result<Block> {
    let wb = tau(n, t.bottom)?;
    let wl = tau(n, t.left)?;
    let block = sw_fill_with(table, &wb, &wl)?;
    if block.right_word() != tau(n, t.right)? {
        return Err(Error::domain(format!("block of {t} has a right word that is not the image of {}", t.right)));
    }
    if block.top_word() != tau(n, t.top)? {
        return Err(Error::domain(format!("block of {t} has a top word that is not the image of {}", t.top)));
    }
    Ok(block)
}

/// The self-substitution on an arbitrary ordering of a metallic tile
/// (sub)set: each tile maps to its block image, expressed in the indices
/// of `ts`. Errors if some block uses a tile outside `ts`.
pub fn build_omega_for(n: u16, ts: &WangTileSet<Label>) -> Result<Substitution2D> {
    let table = SwTable::new(n)?;
    let index: HashMap<&WangTile<Label>, usize> =
        ts.tiles().iter().enumerate().map(|(i, t)| (t, i)).collect();
    let mut images = Vec::with_capacity(ts.len());
    for t in ts.tiles() {
        let block = block_image_with(&table, n, t)?;
        let mut cells = Vec::with_capacity(block.width() * block.height());
        for y in 0..block.height() {
            for x in 0..block.width() {
                let cell = block.get(x, y);
                let &i = index.get(cell).ok_or_else(|| {
                    Error::tileset(format!("image of {t} contains {cell}, which is not in the given set"))
                })?;
                cells.push(i);
            }
        }
        images.push(Pattern2D::new(block.width(), block.height(), cells)?);
    }
    Substitution2D::new(images)
}

/// The self-substitution of the metallic set of index `n` in canonical
/// order (core when `extended` is false).
pub fn build_omega(n: u16, extended: bool) -> Result<Substitution2D> {
    build_omega_for(n, &WangTileSet::metallic(n, extended)?)
}

/// Whether the rectangle with left word `tau_n(u)` and bottom word
/// `tau_n(v)` exists, by the closed-form criterion on the pair of labels.
///
/// With `Z = {v0 = 0}` and `M = {v2 >= n}`, the pair is admissible
/// exactly when it lies in
/// `(V\Z)^2  u  (M n Z)^2  u  (M\Z x Z)  u  (Z x M\Z)`.
pub fn boundary_compatible(n: u16, u: Label, v: Label) -> Result<bool> {
    let (u0, _, u2) = triple(n, u)?;
    let (v0, _, v2) = triple(n, v)?;
    let in_z = |a0: u16| a0 == 0;
    let in_m = |a2: u16| a2 >= n;
    let both_outside_z = !in_z(u0) && !in_z(v0);
    let both_mz = in_m(u2) && in_z(u0) && in_m(v2) && in_z(v0);
    let mnz_z = in_m(u2) && !in_z(u0) && in_z(v0);
    let z_mnz = in_z(u0) && in_m(v2) && !in_z(v0);
    Ok(both_outside_z || both_mz || mnz_z || z_mnz)
}

/// The expansion of the one-dimensional boundary combinatorics: letter 0
/// maps to `0 1^n`, letter 1 to `0 1^(n-1)`, as width-1 rows.
pub fn rho(n: u16) -> Substitution2D {
    let row = |letters: Vec<usize>| Pattern2D::from_rows_bottom_up(vec![letters]).expect("non-empty");
    let mut a = vec![0];
    a.extend(std::iter::repeat(1).take(n as usize));
    let mut b = vec![0];
    b.extend(std::iter::repeat(1).take(n as usize - 1));
    Substitution2D::new(vec![row(a), row(b)]).expect("two letters")
}

/// The two-letter shape class of a core tile: `(0, 0)` for junctions,
/// `(1, 0)` for horizontal stripes, `(0, 1)` for vertical stripes,
/// `(1, 1)` for whites. The first letter tracks block width
/// (`0` iff width `n+1`), the second block height.
pub fn zeta(n: u16, t: &WangTile<Label>) -> Result<(usize, usize)> {
    let c = classify(n, t)?;
    Ok(match c.kind {
        TileKind::Junction { .. } => (0, 0),
        TileKind::White { .. } => (1, 1),
        k if k.is_horizontal_stripe() => (1, 0),
        _ => (0, 1),
    })
}

/// Checks that the self-substitution refines onto the product of two
/// copies of [`rho`]: for every core tile `t` with class `(x, y)`, the
/// cell `(i, j)` of its block has class
/// `(rho(x) at position i, rho(y) at position j)`.
pub fn zeta_refinement_check(n: u16) -> Result<bool> {
    let core = WangTileSet::metallic(n, false)?;
    let table = SwTable::new(n)?;
    let r = rho(n);
    for t in core.tiles() {
        let (x, y) = zeta(n, t)?;
        let block = block_image_with(&table, n, t)?;
        let rx = r.image(x);
        let ry = r.image(y);
        if block.width() != rx.width() || block.height() != ry.width() {
            return Ok(false);
        }
        for j in 0..block.height() {
            for i in 0..block.width() {
                let expect = (rx.get(i, 0), ry.get(j, 0));
                if zeta(n, block.get(i, j))? != expect {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
