//! Metallic-mean Wang tile sets.
//!
//! For each integer `n >= 1` this crate constructs a family of Wang tile
//! sets: a core set `T_n` with `(n+3)^2` tiles and an extended set `T'_n`
//! with `n^2 + 8n + 13` tiles, whose tilings are governed by the metallic
//! mean `beta = (n + sqrt(n^2+4))/2`. On top of the raw tile data it
//! provides:
//!
//! * rectangular patterns and 2d substitutions ([`words`]),
//! * the expansive self-substitution `omega_n` on `T_n`, built from the
//!   boundary word substitution `tau_n` ([`metallic`]),
//! * a backtracking tiling solver for rectangles, tori, fixed cells and
//!   boundary words ([`solver`]),
//! * desubstitution, marker detection and tile fusion, culminating in an
//!   automatic self-similarity check ([`selfsim`]),
//! * primitivity, spectral data and a minimality criterion based on
//!   recurrent vertices of adjacency graphs ([`minimality`], [`matrix`]),
//! * deterministic SVG / TikZ rendering ([`render`]).
//!
//! Edge labels are integer triples `(v0, v1, v2)` with
//! `0 <= v0 <= v1 <= 1` and `v1 <= v2 <= n+1`; there are `3n + 4` of them.
//! Tiles are quadruples `(right, top, left, bottom)` of labels. The crate
//! also handles opaque integer labels (for externally supplied sets) and
//! label words (for fused tile sets) through the same generic tile types.
//!
//! # Conventions
//!
//! Coordinates are Cartesian: `x` grows to the right, `y` grows upward, and
//! a pattern's rows are indexed bottom to top. Tile indices within a set
//! are positions in its tile vector. The canonical order of the metallic
//! sets lists junction tiles first (lexicographic in their four indices),
//! then white tiles, then horizontal stripes (blue, green, yellow, and in
//! the extended set antigreen), then the vertical mirrors of those stripes
//! in the same order.

pub mod equiv;
pub mod error;
pub mod fixtures;
pub mod json;
pub mod matrix;
pub mod metallic;
pub mod minimality;
pub mod render;
pub mod selfsim;
pub mod solver;
pub mod tiles;
pub mod words;

pub use error::{Error, Result};
pub use tiles::{Corner, Family, Label, LabelWord, WangTile, WangTileSet};
pub use words::{Pattern2D, Substitution2D};
