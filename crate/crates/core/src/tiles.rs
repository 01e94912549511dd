//! Wang tiles, edge labels and the metallic tile families.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};

/// An edge label: either an integer triple `(v0, v1, v2)` or an opaque
/// integer for externally supplied alphabets.
///
/// Triples print as joined digits (`013`) when every component is below
/// ten, and hyphen-separated (`0-1-13`) otherwise.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Triple(u16, u16, u16),
    Opaque(u32),
}

impl Label {
    /// Shorthand constructor for triples.
    pub fn t(v0: u16, v1: u16, v2: u16) -> Self {
        Label::Triple(v0, v1, v2)
    }

    /// Whether this is a triple satisfying `0 <= v0 <= v1 <= 1` and
    /// `v1 <= v2 <= n+1`.
    pub fn in_alphabet(&self, n: u16) -> bool {
        match *self {
            Label::Triple(v0, v1, v2) => v0 <= v1 && v1 <= 1 && v1 <= v2 && v2 <= n + 1,
            Label::Opaque(_) => false,
        }
    }

    /// Parses a triple from joined digits (`013`) or hyphen-separated
    /// components (`0-1-13`).
    pub fn parse_triple(s: &str) -> Result<Label> {
        let parts: Vec<u16> = if s.contains('-') {
            s.split('-')
                .map(|p| p.parse().map_err(|_| bad_triple(s)))
                .collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|c| c.to_digit(10).map(|d| d as u16).ok_or_else(|| bad_triple(s)))
                .collect::<Result<_>>()?
        };
        match parts[..] {
            [a, b, c] => Ok(Label::Triple(a, b, c)),
            _ => Err(bad_triple(s)),
        }
    }
}

fn bad_triple(s: &str) -> Error {
    Error::domain(format!("cannot parse label triple from {s:?}"))
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Label::Triple(a, b, c) => {
                if a < 10 && b < 10 && c < 10 {
                    write!(f, "{a}{b}{c}")
                } else {
                    write!(f, "{a}-{b}-{c}")
                }
            }
            Label::Opaque(k) => write!(f, "{k}"),
        }
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A finite word of labels, used as the edge alphabet of fused tile sets.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabelWord(pub Vec<Label>);

impl LabelWord {
    pub fn single(l: Label) -> Self {
        LabelWord(vec![l])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Concatenation `self` then `other`.
    pub fn join(&self, other: &Self) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        LabelWord(v)
    }
}

impl From<Label> for LabelWord {
    fn from(l: Label) -> Self {
        LabelWord::single(l)
    }
}

impl fmt::Display for LabelWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for LabelWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Bound required of an edge label type.
pub trait EdgeLabel: Clone + Eq + Ord + std::hash::Hash + fmt::Debug + fmt::Display {}
impl<T: Clone + Eq + Ord + std::hash::Hash + fmt::Debug + fmt::Display> EdgeLabel for T {}

/// A Wang tile with edge labels `(right, top, left, bottom)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WangTile<L> {
    pub right: L,
    pub top: L,
    pub left: L,
    pub bottom: L,
}

impl<L: EdgeLabel> WangTile<L> {
    pub fn new(right: L, top: L, left: L, bottom: L) -> Self {
        WangTile { right, top, left, bottom }
    }

    /// Reflection along the main diagonal: `(r, t, l, b) -> (t, r, b, l)`.
    /// Exchanges the roles of horizontal and vertical edges; an involution.
    pub fn hat(&self) -> Self {
        WangTile {
            right: self.top.clone(),
            top: self.right.clone(),
            left: self.bottom.clone(),
            bottom: self.left.clone(),
        }
    }
}

impl<L: EdgeLabel> fmt::Display for WangTile<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.right, self.top, self.left, self.bottom)
    }
}

impl<L: EdgeLabel> fmt::Debug for WangTile<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn triple_tile(r: (u16, u16, u16), t: (u16, u16, u16), l: (u16, u16, u16), b: (u16, u16, u16)) -> WangTile<Label> {
    WangTile::new(
        Label::Triple(r.0, r.1, r.2),
        Label::Triple(t.0, t.1, t.2),
        Label::Triple(l.0, l.1, l.2),
        Label::Triple(b.0, b.1, b.2),
    )
}

/// Which metallic family a tile set belongs to, if any.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Family {
    /// The core set `T_n` with `(n+3)^2` tiles.
    MetallicCore { n: u16 },
    /// The extended set `T'_n` with `n^2 + 8n + 13` tiles.
    MetallicExtended { n: u16 },
    /// Anything else (external sets, fused sets, fixtures).
    Custom,
}

impl Family {
    pub fn metallic_index(&self) -> Option<u16> {
        match *self {
            Family::MetallicCore { n } | Family::MetallicExtended { n } => Some(n),
            Family::Custom => None,
        }
    }
}

/// A corner, naming a pair of edges: SW is `(left, bottom)`, NE is
/// `(right, top)`, NW is `(left, top)`, SE is `(right, bottom)`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Corner {
    SW,
    NW,
    NE,
    SE,
}

/// A finite set of Wang tiles, indexed by position.
#[derive(Clone, PartialEq, Eq)]
pub struct WangTileSet<L> {
    family: Family,
    tiles: Vec<WangTile<L>>,
}

impl<L: EdgeLabel> fmt::Debug for WangTileSet<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WangTileSet({:?}, {} tiles)", self.family, self.tiles.len())
    }
}

impl<L: EdgeLabel> WangTileSet<L> {
    /// Builds a set from explicit tiles. Fails on duplicate tiles.
    pub fn new_custom(tiles: Vec<WangTile<L>>) -> Result<Self> {
        Self::with_family(Family::Custom, tiles)
    }

    pub(crate) fn with_family(family: Family, tiles: Vec<WangTile<L>>) -> Result<Self> {
        let mut seen: HashMap<&WangTile<L>, usize> = HashMap::new();
        for (i, t) in tiles.iter().enumerate() {
            if let Some(&j) = seen.get(t) {
                return Err(Error::tileset(format!("duplicate tile {t} at indices {j} and {i}")));
            }
            seen.insert(t, i);
        }
        Ok(WangTileSet { family, tiles })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn tiles(&self) -> &[WangTile<L>] {
        &self.tiles
    }

    pub fn tile(&self, i: usize) -> &WangTile<L> {
        &self.tiles[i]
    }

    pub fn index_of(&self, t: &WangTile<L>) -> Option<usize> {
        self.tiles.iter().position(|u| u == t)
    }

    /// The labels appearing on vertical edges (right or left).
    pub fn vertical_labels(&self) -> BTreeSet<L> {
        self.tiles
            .iter()
            .flat_map(|t| [t.right.clone(), t.left.clone()])
            .collect()
    }

    /// The labels appearing on horizontal edges (top or bottom).
    pub fn horizontal_labels(&self) -> BTreeSet<L> {
        self.tiles
            .iter()
            .flat_map(|t| [t.top.clone(), t.bottom.clone()])
            .collect()
    }

    /// Whether no two tiles agree on the pair of edges named by `corner`.
    ///
    /// SW-determinism, for instance, means a tile is determined by its
    /// `(left, bottom)` pair, so a rectangle is determined by its bottom
    /// and left boundary words.
    pub fn is_deterministic(&self, corner: Corner) -> bool {
        let mut seen = BTreeSet::new();
        for t in &self.tiles {
            let key = match corner {
                Corner::SW => (t.left.clone(), t.bottom.clone()),
                Corner::NW => (t.left.clone(), t.top.clone()),
                Corner::NE => (t.right.clone(), t.top.clone()),
                Corner::SE => (t.right.clone(), t.bottom.clone()),
            };
            if !seen.insert(key) {
                return false;
            }
        }
        true
    }

    /// The tile-wise `hat` image, in the same tile order.
    ///
    /// For the metallic families this permutes the set: junctions map to
    /// junctions, horizontal stripes to vertical stripes and back, and
    /// whites transpose their indices.
    pub fn hat_image(&self) -> Self {
        WangTileSet {
            family: self.family,
            tiles: self.tiles.iter().map(WangTile::hat).collect(),
        }
    }

    /// Restricts to the tiles at `indices` (in the given order), producing
    /// a custom-family set.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let mut tiles = Vec::with_capacity(indices.len());
        for &i in indices {
            let t = self
                .tiles
                .get(i)
                .ok_or_else(|| Error::domain(format!("tile index {i} out of range (set has {})", self.len())))?;
            tiles.push(t.clone());
        }
        Self::with_family(Family::Custom, tiles)
    }
}

impl WangTileSet<Label> {
    /// The metallic Wang tile set of index `n`: the core set `T_n` when
    /// `extended` is false, else the extended set `T'_n`.
    ///
    /// Canonical order: junctions (lexicographic in `(k, l, r, s)`),
    /// whites (`(i, j)` lexicographic), horizontal stripes blue, green,
    /// yellow (and antigreen in the extended set), each by ascending
    /// index, then the vertical stripes in the same order.
    pub fn metallic(n: u16, extended: bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("metallic index n must be >= 1"));
        }
        if n > 1000 {
            return Err(Error::domain(format!("metallic index n = {n} too large (max 1000)")));
        }
        let nb = n + 1;
        let mut tiles = Vec::new();

        // Junctions j(k,l,r,s) = ((0,k,l),(0,r,s),(0,s,r+n),(0,l,k+n)).
        let pairs = [(0u16, 0u16), (0, 1), (1, 1)];
        for &(k, l) in &pairs {
            for &(r, s) in &pairs {
                let diagonal = ((k, l) == (0, 0) && (r, s) == (1, 1)) || ((k, l) == (1, 1) && (r, s) == (0, 0));
                if diagonal && !extended {
                    continue;
                }
                tiles.push(triple_tile((0, k, l), (0, r, s), (0, s, r + n), (0, l, k + n)));
            }
        }

        // Whites w(i,j) = ((1,1,i+1),(1,1,j+1),(1,1,i),(1,1,j)).
        for i in 1..=n {
            for j in 1..=n {
                tiles.push(triple_tile((1, 1, i + 1), (1, 1, j + 1), (1, 1, i), (1, 1, j)));
            }
        }

        // Horizontal stripes. Blue loses its last tile in the core set.
        let b_top = if extended { n } else { n - 1 };
        for i in 0..=b_top {
            tiles.push(triple_tile((0, 0, i + 1), (1, 1, 1), (0, 0, i), (1, 1, n)));
        }
        for i in 0..=n {
            tiles.push(triple_tile((0, 1, i + 1), (1, 1, 1), (0, 0, i), (1, 1, nb)));
        }
        for i in 1..=n {
            tiles.push(triple_tile((0, 1, i + 1), (1, 1, 2), (0, 1, i), (1, 1, nb)));
        }
        if extended {
            for i in 1..=n {
                tiles.push(triple_tile((0, 0, i + 1), (1, 1, 2), (0, 1, i), (1, 1, n)));
            }
        }

        // Vertical stripes: hats of the horizontal stripes, same order.
        // Horizontal stripe count: blue, green, yellow (and antigreen).
        let stripe_count = if extended { 4 * n as usize + 2 } else { 3 * n as usize + 1 };
        let first_stripe = tiles.len() - stripe_count;
        let hats: Vec<_> = tiles[first_stripe..].iter().map(WangTile::hat).collect();
        tiles.extend(hats);

        let family = if extended {
            Family::MetallicExtended { n }
        } else {
            Family::MetallicCore { n }
        };
        Self::with_family(family, tiles)
    }

    /// The tile-wise half-turn image, in the same tile order: each edge
    /// moves to the opposite side and is relabeled by the involution
    /// `sigma(v0,v1,v2) = (v0, 1+v0-v1, n+1+v0-v2)`.
    ///
    /// The core set is invariant under this map as a set.
    pub fn half_turn_image(&self, n: u16) -> Result<Self> {
        let tiles = self
            .tiles
            .iter()
            .map(|t| {
                Ok(WangTile::new(
                    sigma(n, t.left)?,
                    sigma(n, t.bottom)?,
                    sigma(n, t.right)?,
                    sigma(n, t.top)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::with_family(self.family, tiles)
    }

    /// Same tiles as a multiset, ignoring order.
    pub fn same_set(&self, other: &Self) -> bool {
        let mut a: Vec<_> = self.tiles.clone();
        let mut b: Vec<_> = other.tiles.clone();
        a.sort();
        b.sort();
        a == b
    }

    /// The same tiles with every edge label wrapped as a one-letter word,
    /// ready for fusion steps that concatenate labels.
    pub fn to_words(&self) -> WangTileSet<LabelWord> {
        let tiles = self
            .tiles
            .iter()
            .map(|t| {
                WangTile::new(
                    LabelWord::single(t.right),
                    LabelWord::single(t.top),
                    LabelWord::single(t.left),
                    LabelWord::single(t.bottom),
                )
            })
            .collect();
        WangTileSet { family: Family::Custom, tiles }
    }
}

/// The label involution underlying the half-turn. Defined for alphabet
/// triples with `v2 <= n + v1`; the only alphabet label outside that
/// domain is `(0, 0, n+1)`.
pub fn sigma(n: u16, l: Label) -> Result<Label> {
    match l {
        Label::Triple(v0, v1, v2) if l.in_alphabet(n) && v2 <= n + v1 => {
            Ok(Label::Triple(v0, 1 + v0 - v1, n + 1 + v0 - v2))
        }
        _ => Err(Error::domain(format!("half-turn involution undefined on label {l} for n = {n}"))),
    }
}

/// The ten tile shapes of the metallic families.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TileKind {
    White { i: u16, j: u16 },
    BlueH { i: u16 },
    GreenH { i: u16 },
    YellowH { i: u16 },
    AntigreenH { i: u16 },
    BlueV { i: u16 },
    GreenV { i: u16 },
    YellowV { i: u16 },
    AntigreenV { i: u16 },
    Junction { k: u16, l: u16, r: u16, s: u16 },
}

impl TileKind {
    pub fn is_junction(&self) -> bool {
        matches!(self, TileKind::Junction { .. })
    }

    pub fn is_vertical_stripe(&self) -> bool {
        matches!(
            self,
            TileKind::BlueV { .. } | TileKind::GreenV { .. } | TileKind::YellowV { .. } | TileKind::AntigreenV { .. }
        )
    }

    pub fn is_horizontal_stripe(&self) -> bool {
        matches!(
            self,
            TileKind::BlueH { .. } | TileKind::GreenH { .. } | TileKind::YellowH { .. } | TileKind::AntigreenH { .. }
        )
    }
}

/// Classification of a tile within the extended family of index `n`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Classification {
    pub kind: TileKind,
    /// Whether the tile belongs to the core set `T_n` (false exactly for
    /// the antigreen stripes, the blue stripes of index `n`, and the two
    /// diagonal junctions).
    pub in_core: bool,
    /// Whether the tile is one of the four deleted tiles: the last blue
    /// stripe of each orientation and the two diagonal junctions.
    pub in_deleted: bool,
}

impl Classification {
    /// The last blue stripe tile of either orientation (index `n`).
    pub fn is_last_blue(&self) -> bool {
        self.in_deleted && matches!(self.kind, TileKind::BlueH { .. } | TileKind::BlueV { .. })
    }

    pub fn is_antigreen(&self) -> bool {
        matches!(self.kind, TileKind::AntigreenH { .. } | TileKind::AntigreenV { .. })
    }
}

/// Identifies which family member a tile is, for the extended set of
/// index `n`. Errors if the tile is not in `T'_n`.
pub fn classify(n: u16, tile: &WangTile<Label>) -> Result<Classification> {
    let kind = kind_of(n, tile).ok_or_else(|| {
        Error::domain(format!("tile {tile} is not a member of the extended metallic set for n = {n}"))
    })?;
    let in_deleted = match kind {
        TileKind::BlueH { i } | TileKind::BlueV { i } => i == n,
        TileKind::Junction { k, l, r, s } => ((k, l) == (0, 0) && (r, s) == (1, 1)) || ((k, l) == (1, 1) && (r, s) == (0, 0)),
        _ => false,
    };
    let in_core = match kind {
        TileKind::AntigreenH { .. } | TileKind::AntigreenV { .. } => false,
        _ => !in_deleted,
    };
    Ok(Classification { kind, in_core, in_deleted })
}

fn kind_of(n: u16, tile: &WangTile<Label>) -> Option<TileKind> {
    let (r, t, l, b) = match (tile.right, tile.top, tile.left, tile.bottom) {
        (Label::Triple(a0, a1, a2), Label::Triple(b0, b1, b2), Label::Triple(c0, c1, c2), Label::Triple(d0, d1, d2)) => {
            ((a0, a1, a2), (b0, b1, b2), (c0, c1, c2), (d0, d1, d2))
        }
        _ => return None,
    };
    for lab in [tile.right, tile.top, tile.left, tile.bottom] {
        if !lab.in_alphabet(n) {
            return None;
        }
    }
    let nb = n + 1;
    let pairs = [(0u16, 0u16), (0, 1), (1, 1)];

    // White: all four labels start 11.
    if r.0 == 1 && t.0 == 1 && l.0 == 1 && b.0 == 1 {
        let (i, j) = (l.2, b.2);
        if (1..=n).contains(&i) && (1..=n).contains(&j) && r == (1, 1, i + 1) && t == (1, 1, j + 1) {
            return Some(TileKind::White { i, j });
        }
        return None;
    }

    // Junction: all four labels start 0.
    if r.0 == 0 && t.0 == 0 && l.0 == 0 && b.0 == 0 {
        let (k, l_idx) = (r.1, r.2);
        let (rr, s) = (t.1, t.2);
        if pairs.contains(&(k, l_idx))
            && pairs.contains(&(rr, s))
            && l == (0, s, rr + n)
            && b == (0, l_idx, k + n)
        {
            return Some(TileKind::Junction { k, l: l_idx, r: rr, s });
        }
        return None;
    }

    // Horizontal stripe: vertical edges start 0, horizontal edges start 1.
    if r.0 == 0 && l.0 == 0 && t.0 == 1 && b.0 == 1 {
        let i = l.2;
        let kind = match (l.1, r.1, t.2, b.2) {
            (0, 0, 1, z) if z == n && i <= n && r == (0, 0, i + 1) => TileKind::BlueH { i },
            (0, 1, 1, z) if z == nb && i <= n && r == (0, 1, i + 1) => TileKind::GreenH { i },
            (1, 1, 2, z) if z == nb && (1..=n).contains(&i) && r == (0, 1, i + 1) => TileKind::YellowH { i },
            (1, 0, 2, z) if z == n && (1..=n).contains(&i) && r == (0, 0, i + 1) => TileKind::AntigreenH { i },
            _ => return None,
        };
        // The unnamed components must match the family tables exactly.
        let expected = match kind {
            TileKind::BlueH { i } => triple_tile((0, 0, i + 1), (1, 1, 1), (0, 0, i), (1, 1, n)),
            TileKind::GreenH { i } => triple_tile((0, 1, i + 1), (1, 1, 1), (0, 0, i), (1, 1, nb)),
            TileKind::YellowH { i } => triple_tile((0, 1, i + 1), (1, 1, 2), (0, 1, i), (1, 1, nb)),
            TileKind::AntigreenH { i } => triple_tile((0, 0, i + 1), (1, 1, 2), (0, 1, i), (1, 1, n)),
            _ => unreachable!(),
        };
        return (*tile == expected).then_some(kind);
    }

    // Vertical stripe: the hat of a horizontal stripe.
    if t.0 == 0 && b.0 == 0 && r.0 == 1 && l.0 == 1 {
        let hat = tile.hat();
        return match kind_of(n, &hat)? {
            TileKind::BlueH { i } => Some(TileKind::BlueV { i }),
            TileKind::GreenH { i } => Some(TileKind::GreenV { i }),
            TileKind::YellowH { i } => Some(TileKind::YellowV { i }),
            TileKind::AntigreenH { i } => Some(TileKind::AntigreenV { i }),
            _ => None,
        };
    }

    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_display_and_parse() {
        assert_eq!(Label::t(0, 1, 3).to_string(), "013");
        assert_eq!(Label::t(0, 1, 13).to_string(), "0-1-13");
        assert_eq!(Label::Opaque(7).to_string(), "7");
        assert_eq!(Label::parse_triple("013").unwrap(), Label::t(0, 1, 3));
        assert_eq!(Label::parse_triple("0-1-13").unwrap(), Label::t(0, 1, 13));
        assert!(Label::parse_triple("01").is_err());
        assert!(Label::parse_triple("abc").is_err());
    }

    #[test]
    fn alphabet_census_is_3n_plus_4() {
        // Count triples satisfying the alphabet constraints directly.
        for n in 1u16..=8 {
            let mut count = 0;
            for v0 in 0..=1 {
                for v1 in 0..=1 {
                    for v2 in 0..=(n + 1) {
                        if Label::t(v0, v1, v2).in_alphabet(n) {
                            count += 1;
                        }
                    }
                }
            }
            assert_eq!(count, 3 * n + 4, "alphabet size for n = {n}");
        }
    }

    #[test]
    fn metallic_census() {
        for n in 1u16..=8 {
            let core = WangTileSet::metallic(n, false).unwrap();
            let ext = WangTileSet::metallic(n, true).unwrap();
            assert_eq!(core.len() as u16, (n + 3) * (n + 3), "core size for n = {n}");
            assert_eq!(ext.len() as u16, n * n + 8 * n + 13, "extended size for n = {n}");
            // The core is exactly the extended set minus the antigreens,
            // the last blues and the two diagonal junctions.
            for t in core.tiles() {
                assert!(ext.index_of(t).is_some(), "core tile {t} missing from extended set");
            }
        }
        assert!(WangTileSet::metallic(0, false).is_err());
    }

    #[test]
    fn metallic_labels_cover_the_alphabet() {
        for n in 1u16..=6 {
            let ext = WangTileSet::metallic(n, true).unwrap();
            let mut used = ext.vertical_labels();
            used.extend(ext.horizontal_labels());
            assert_eq!(used.len() as u16, 3 * n + 4, "extended set must use the whole alphabet for n = {n}");
            assert!(used.iter().all(|l| l.in_alphabet(n)));
        }
    }

    #[test]
    fn classify_roundtrip_on_families() {
        for n in 1u16..=6 {
            let ext = WangTileSet::metallic(n, true).unwrap();
            let core = WangTileSet::metallic(n, false).unwrap();
            let mut core_count = 0;
            for t in ext.tiles() {
                let c = classify(n, t).unwrap();
                if c.in_core {
                    core_count += 1;
                    assert!(core.index_of(t).is_some(), "{t} claimed in core");
                } else {
                    assert!(core.index_of(t).is_none(), "{t} claimed outside core");
                }
            }
            assert_eq!(core_count, core.len());
        }
    }

    #[test]
    fn classify_flags_excluded_tiles() {
        // Last blue stripes and the two diagonal junctions are in no core set.
        let n = 2;
        let b2 = triple_tile((0, 0, 3), (1, 1, 1), (0, 0, 2), (1, 1, 2));
        let c = classify(n, &b2).unwrap();
        assert_eq!(c.kind, TileKind::BlueH { i: 2 });
        assert!(!c.in_core);

        // Vertical blue stripe of index n: the hat of the tile above.
        let b2v = b2.hat();
        assert_eq!(b2v, triple_tile((1, 1, 1), (0, 0, 3), (1, 1, 2), (0, 0, 2)));
        let c = classify(n, &b2v).unwrap();
        assert_eq!(c.kind, TileKind::BlueV { i: 2 });
        assert!(!c.in_core);

        let diag = triple_tile((0, 0, 0), (0, 1, 1), (0, 1, 3), (0, 0, 2));
        let c = classify(n, &diag).unwrap();
        assert_eq!(c.kind, TileKind::Junction { k: 0, l: 0, r: 1, s: 1 });
        assert!(!c.in_core);

        // A tile with mismatched components is rejected.
        let bogus = triple_tile((0, 0, 3), (1, 1, 1), (0, 0, 2), (1, 1, 3));
        assert!(classify(n, &bogus).is_err());
        assert!(classify(n, &WangTile::new(Label::Opaque(1), Label::Opaque(1), Label::Opaque(1), Label::Opaque(1))).is_err());
    }

    #[test]
    fn hat_is_an_involution_and_permutes_the_family() {
        for n in 1u16..=5 {
            for extended in [false, true] {
                let ts = WangTileSet::metallic(n, extended).unwrap();
                let hat = ts.hat_image();
                assert!(ts.same_set(&hat), "hat image must equal the set for n = {n}");
                assert_eq!(hat.hat_image(), ts, "hat must be an involution");
            }
        }
    }

    #[test]
    fn hat_exchanges_stripe_orientations() {
        let n = 2;
        let ext = WangTileSet::metallic(n, true).unwrap();
        for t in ext.tiles() {
            let k = classify(n, t).unwrap().kind;
            let hk = classify(n, &t.hat()).unwrap().kind;
            match k {
                TileKind::White { i, j } => assert_eq!(hk, TileKind::White { i: j, j: i }),
                TileKind::Junction { k, l, r, s } => assert_eq!(hk, TileKind::Junction { k: r, l: s, r: k, s: l }),
                TileKind::BlueH { i } => assert_eq!(hk, TileKind::BlueV { i }),
                TileKind::BlueV { i } => assert_eq!(hk, TileKind::BlueH { i }),
                TileKind::GreenH { i } => assert_eq!(hk, TileKind::GreenV { i }),
                TileKind::GreenV { i } => assert_eq!(hk, TileKind::GreenH { i }),
                TileKind::YellowH { i } => assert_eq!(hk, TileKind::YellowV { i }),
                TileKind::YellowV { i } => assert_eq!(hk, TileKind::YellowH { i }),
                TileKind::AntigreenH { i } => assert_eq!(hk, TileKind::AntigreenV { i }),
                TileKind::AntigreenV { i } => assert_eq!(hk, TileKind::AntigreenH { i }),
            }
        }
    }

    #[test]
    fn half_turn_fixes_the_core_set() {
        for n in 1u16..=5 {
            let core = WangTileSet::metallic(n, false).unwrap();
            let img = core.half_turn_image(n).unwrap();
            assert!(core.same_set(&img), "half-turn must permute the core set for n = {n}");
            assert_eq!(img.half_turn_image(n).unwrap(), core, "half-turn must be an involution");
        }
    }

    #[test]
    fn half_turn_undefined_on_the_last_blue_right_label() {
        // sigma is undefined on (0,0,n+1), which only the extended set uses.
        let n = 2;
        assert!(sigma(n, Label::t(0, 0, n + 1)).is_err());
        let ext = WangTileSet::metallic(n, true).unwrap();
        assert!(ext.half_turn_image(n).is_err());
        // On its domain sigma is an involution into the alphabet.
        for v0 in 0..=1u16 {
            for v1 in v0..=1 {
                for v2 in v1..=(n + 1) {
                    let l = Label::t(v0, v1, v2);
                    if v2 <= n + v1 {
                        let s = sigma(n, l).unwrap();
                        assert!(s.in_alphabet(n));
                        assert_eq!(sigma(n, s).unwrap(), l);
                    }
                }
            }
        }
    }

    #[test]
    fn determinism_of_the_families() {
        for n in 1u16..=5 {
            let ext = WangTileSet::metallic(n, true).unwrap();
            let core = WangTileSet::metallic(n, false).unwrap();
            for corner in [Corner::SW, Corner::NE] {
                assert!(ext.is_deterministic(corner), "T'_{n} must be {corner:?}-deterministic");
                assert!(core.is_deterministic(corner), "T_{n} must be {corner:?}-deterministic");
            }
            // NW and SE fail: blue and green stripes of equal index share
            // (left, top), green and yellow share (right, bottom).
            for corner in [Corner::NW, Corner::SE] {
                assert!(!core.is_deterministic(corner), "T_{n} is not {corner:?}-deterministic");
            }
        }
        // A two-tile set sharing a (left, bottom) pair is not SW-deterministic.
        let ts = WangTileSet::new_custom(vec![
            WangTile::new(Label::Opaque(0), Label::Opaque(0), Label::Opaque(1), Label::Opaque(1)),
            WangTile::new(Label::Opaque(2), Label::Opaque(2), Label::Opaque(1), Label::Opaque(1)),
        ])
        .unwrap();
        assert!(!ts.is_deterministic(Corner::SW));
        assert!(ts.is_deterministic(Corner::NE));
    }

    #[test]
    fn duplicate_tiles_are_rejected() {
        let t = WangTile::new(Label::Opaque(0), Label::Opaque(0), Label::Opaque(0), Label::Opaque(0));
        let err = WangTileSet::new_custom(vec![t.clone(), t]).unwrap_err();
        assert!(err.to_string().contains("duplicate tile"));
    }

    #[test]
    fn label_words_concatenate() {
        let a = LabelWord::single(Label::t(0, 1, 2));
        let b = LabelWord::single(Label::t(1, 1, 2));
        let ab = a.join(&b);
        assert_eq!(ab.len(), 2);
        assert_eq!(ab.to_string(), "012112");
    }
}
