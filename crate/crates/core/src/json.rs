//! JSON formats for tile sets, patterns, and substitutions.
//!
//! A tile set is `{"n": 2, "family": "metallic-core", "tiles": [...]}`
//! where each tile is `{"right": [1,1,1], "top": [0,1,3], "left":
//! [1,1,3], "bottom": [0,0,2]}` and the array position is the tile
//! index. A pattern is `{"width": w, "height": h, "rows": [...]}` with
//! rows listed bottom to top, matching the Cartesian convention used
//! everywhere else in this crate. A substitution is an object mapping
//! each letter to its image pattern.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tiles::{Family, Label, WangTile, WangTileSet};
use crate::words::{Pattern2D, Substitution2D};

/// On-disk form of a tile set.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TileSetFile {
    /// Metallic order, present when `family` names a metallic set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u16>,
    pub family: String,
    pub tiles: Vec<TileEntry>,
}

/// On-disk form of one tile: four `(v0, v1, v2)` edge labels.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct TileEntry {
    pub right: [u16; 3],
    pub top: [u16; 3],
    pub left: [u16; 3],
    pub bottom: [u16; 3],
}

fn to_entry(tile: &WangTile<Label>, index: usize) -> Result<TileEntry> {
    let part = |l: &Label| match *l {
        Label::Triple(a, b, c) => Ok([a, b, c]),
        Label::Opaque(_) => Err(Error::domain(format!(
            "tile {index} has an opaque label and cannot be written as a triple"
        ))),
    };
    Ok(TileEntry {
        right: part(&tile.right)?,
        top: part(&tile.top)?,
        left: part(&tile.left)?,
        bottom: part(&tile.bottom)?,
    })
}

fn from_entry(e: &TileEntry) -> WangTile<Label> {
    let l = |p: [u16; 3]| Label::Triple(p[0], p[1], p[2]);
    WangTile::new(l(e.right), l(e.top), l(e.left), l(e.bottom))
}

pub fn tileset_to_file(ts: &WangTileSet<Label>) -> Result<TileSetFile> {
    let (family, n) = match ts.family() {
        Family::MetallicCore { n } => ("metallic-core".to_string(), Some(n)),
        Family::MetallicExtended { n } => ("metallic-extended".to_string(), Some(n)),
        Family::Custom => ("custom".to_string(), None),
    };
    let tiles = ts
        .tiles()
        .iter()
        .enumerate()
        .map(|(i, t)| to_entry(t, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(TileSetFile { n, family, tiles })
}

/// Rebuilds a tile set, verifying that a metallic `family` tag matches
/// the canonical tiles (in any order).
pub fn tileset_from_file(f: &TileSetFile) -> Result<WangTileSet<Label>> {
    let tiles: Vec<WangTile<Label>> = f.tiles.iter().map(from_entry).collect();
    let family = match f.family.as_str() {
        "metallic-core" | "metallic-extended" => {
            let extended = f.family == "metallic-extended";
            let n = f.n.ok_or_else(|| {
                Error::domain(format!("family {:?} requires the \"n\" field", f.family))
            })?;
            let canonical = WangTileSet::metallic(n, extended)?;
            let claimed = WangTileSet::new_custom(tiles.clone())?;
            if !claimed.same_set(&canonical) {
                return Err(Error::tileset(format!(
                    "file claims family {:?} with n = {n} but the tiles differ from it",
                    f.family
                )));
            }
            canonical.family()
        }
        _ => Family::Custom,
    };
    WangTileSet::with_family(family, tiles)
}

pub fn tileset_to_json(ts: &WangTileSet<Label>) -> Result<String> {
    Ok(serde_json::to_string_pretty(&tileset_to_file(ts)?)?)
}

pub fn tileset_from_json(s: &str) -> Result<WangTileSet<Label>> {
    tileset_from_file(&serde_json::from_str(s)?)
}

/// On-disk form of a pattern; `rows[0]` is the bottom row.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PatternFile {
    pub width: usize,
    pub height: usize,
    pub rows: Vec<Vec<usize>>,
}

pub fn pattern_to_file(p: &Pattern2D) -> PatternFile {
    PatternFile {
        width: p.width(),
        height: p.height(),
        rows: (0..p.height()).map(|y| p.row(y)).collect(),
    }
}

pub fn pattern_from_file(f: &PatternFile) -> Result<Pattern2D> {
    if f.rows.len() != f.height {
        return Err(Error::domain(format!(
            "pattern declares height {} but has {} rows",
            f.height,
            f.rows.len()
        )));
    }
    for (y, row) in f.rows.iter().enumerate() {
        if row.len() != f.width {
            return Err(Error::domain(format!(
                "pattern declares width {} but row {y} has {} letters",
                f.width,
                row.len()
            )));
        }
    }
    Pattern2D::from_rows_bottom_up(f.rows.clone())
}

pub fn pattern_to_json(p: &Pattern2D) -> Result<String> {
    Ok(serde_json::to_string_pretty(&pattern_to_file(p))?)
}

pub fn pattern_from_json(s: &str) -> Result<Pattern2D> {
    pattern_from_file(&serde_json::from_str(s)?)
}

pub fn substitution_to_file(s: &Substitution2D) -> BTreeMap<usize, PatternFile> {
    (0..s.letters()).map(|a| (a, pattern_to_file(s.image(a)))).collect()
}

/// Rebuilds a substitution; the letters must be exactly `0..k`.
pub fn substitution_from_file(map: &BTreeMap<usize, PatternFile>) -> Result<Substitution2D> {
    for (expected, &found) in map.keys().enumerate() {
        if expected != found {
            return Err(Error::domain(format!(
                "substitution letters must be contiguous from 0; missing {expected}"
            )));
        }
    }
    let images = map.values().map(pattern_from_file).collect::<Result<Vec<_>>>()?;
    Substitution2D::new(images)
}

pub fn substitution_to_json(s: &Substitution2D) -> Result<String> {
    Ok(serde_json::to_string_pretty(&substitution_to_file(s))?)
}

pub fn substitution_from_json(s: &str) -> Result<Substitution2D> {
    substitution_from_file(&serde_json::from_str(s)?)
}
