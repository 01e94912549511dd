//! Hand-checked reference data shared across the test suite and the CLI
//! examples: the 16- and 25-tile metallic sets in their classic display
//! ordering, the Ammann set of 16 Wang tiles, the expected substitution
//! tables for those orderings, and a small three-letter substitution used
//! to exercise the minimality machinery.

use crate::tiles::{Label, WangTile, WangTileSet};
use crate::words::{Pattern2D, Substitution2D};

fn triple_set(spec: &[(&str, &str, &str, &str)]) -> WangTileSet<Label> {
    let tiles = spec
        .iter()
        .map(|&(r, t, l, b)| {
            WangTile::new(
                Label::parse_triple(r).expect("bad right label in fixture"),
                Label::parse_triple(t).expect("bad top label in fixture"),
                Label::parse_triple(l).expect("bad left label in fixture"),
                Label::parse_triple(b).expect("bad bottom label in fixture"),
            )
        })
        .collect();
    WangTileSet::new_custom(tiles).expect("fixture tile set should be valid")
}

/// The 16 metallic tiles of index 1 in their classic display ordering.
///
/// This ordering groups the vertical stripe tiles and the white tile first,
/// then the junctions interleaved with the horizontal stripe tiles, and is
/// the index space used by [`omega1_reference`].
pub fn t1_reference() -> WangTileSet<Label> {
    triple_set(&[
        ("111", "012", "112", "001"),
        ("111", "001", "111", "000"),
        ("112", "012", "112", "011"),
        ("112", "112", "111", "111"),
        ("111", "011", "112", "000"),
        ("011", "001", "011", "012"),
        ("011", "011", "012", "012"),
        ("012", "112", "011", "112"),
        ("001", "000", "001", "011"),
        ("001", "001", "011", "011"),
        ("001", "011", "012", "011"),
        ("001", "111", "000", "111"),
        ("000", "000", "001", "001"),
        ("000", "001", "011", "001"),
        ("011", "111", "000", "112"),
        ("012", "111", "001", "112"),
    ])
}

/// The 25 metallic tiles of index 2 in their classic display ordering,
/// the index space used by [`omega2_reference`].
pub fn t2_reference() -> WangTileSet<Label> {
    triple_set(&[
        ("111", "013", "113", "002"),
        ("111", "002", "112", "001"),
        ("112", "013", "113", "012"),
        ("112", "113", "111", "112"),
        ("113", "113", "112", "112"),
        ("111", "012", "113", "001"),
        ("111", "001", "112", "000"),
        ("112", "012", "113", "011"),
        ("112", "112", "111", "111"),
        ("113", "112", "112", "111"),
        ("111", "011", "113", "000"),
        ("011", "001", "012", "013"),
        ("011", "011", "013", "013"),
        ("012", "112", "011", "113"),
        ("013", "112", "012", "113"),
        ("001", "000", "002", "012"),
        ("001", "001", "012", "012"),
        ("001", "011", "013", "012"),
        ("001", "111", "000", "112"),
        ("002", "111", "001", "112"),
        ("000", "000", "002", "002"),
        ("000", "001", "012", "002"),
        ("011", "111", "000", "113"),
        ("012", "111", "001", "113"),
        ("013", "111", "002", "113"),
    ])
}

/// The Ammann aperiodic set of 16 Wang tiles, with its traditional opaque
/// numeric edge labels. Equivalent to the 16 metallic tiles of index 1 via
/// the label bijection [`ammann_label_map`].
pub fn ammann16() -> WangTileSet<u32> {
    let spec: [(u32, u32, u32, u32); 16] = [
        (2, 5, 1, 3),
        (2, 3, 2, 6),
        (1, 5, 1, 4),
        (1, 1, 2, 2),
        (2, 4, 1, 6),
        (4, 3, 4, 5),
        (4, 4, 5, 5),
        (5, 1, 4, 1),
        (3, 6, 3, 4),
        (3, 3, 4, 4),
        (3, 4, 5, 4),
        (3, 2, 6, 2),
        (6, 6, 3, 3),
        (6, 3, 4, 3),
        (4, 2, 6, 1),
        (5, 2, 3, 1),
    ];
    let tiles = spec.iter().map(|&(r, t, l, b)| WangTile::new(r, t, l, b)).collect();
    WangTileSet::new_custom(tiles).expect("fixture tile set should be valid")
}

/// The edge label bijection carrying [`ammann16`] onto [`t1_reference`]:
/// the same map works for both the horizontal and the vertical labels.
pub fn ammann_label_map() -> Vec<(u32, Label)> {
    vec![
        (1, Label::t(1, 1, 2)),
        (2, Label::t(1, 1, 1)),
        (3, Label::t(0, 0, 1)),
        (4, Label::t(0, 1, 1)),
        (5, Label::t(0, 1, 2)),
        (6, Label::t(0, 0, 0)),
    ]
}

fn table(rows_top_first: &[&[&[usize]]]) -> Substitution2D {
    let images = rows_top_first
        .iter()
        .map(|rows| {
            let bottom_up: Vec<Vec<usize>> = rows.iter().rev().map(|r| r.to_vec()).collect();
            Pattern2D::from_rows_bottom_up(bottom_up).expect("fixture image should be rectangular")
        })
        .collect();
    Substitution2D::new(images).expect("fixture table should be a valid substitution")
}

/// The expected tile substitution for the metallic set of index 1, written
/// in the index space of [`t1_reference`]. Image rows are listed top first,
/// the way the table is usually displayed.
pub fn omega1_reference() -> Substitution2D {
    table(&[
        &[&[9, 15]],
        &[&[6, 7]],
        &[&[13, 14]],
        &[&[6]],
        &[&[5, 7]],
        &[&[4, 3], &[12, 11]],
        &[&[1, 3], &[12, 11]],
        &[&[4], &[8]],
        &[&[0, 3], &[13, 14]],
        &[&[4, 3], &[12, 14]],
        &[&[1, 3], &[12, 14]],
        &[&[2], &[6]],
        &[&[0, 3], &[9, 15]],
        &[&[4, 3], &[8, 15]],
        &[&[2], &[10]],
        &[&[0], &[9]],
    ])
}

/// The expected tile substitution for the metallic set of index 2, written
/// in the index space of [`t2_reference`]. Image rows are listed top first.
pub fn omega2_reference() -> Substitution2D {
    table(&[
        &[&[1, 8, 9], &[16, 19, 24]],
        &[&[5, 8, 4], &[16, 23, 14]],
        &[&[1, 8, 9], &[21, 18, 23]],
        &[&[7, 9], &[17, 23]],
        &[&[5, 8], &[16, 23]],
        &[&[1, 8, 4], &[16, 23, 14]],
        &[&[5, 3, 4], &[11, 13, 14]],
        &[&[1, 8, 4], &[21, 22, 13]],
        &[&[7, 4], &[12, 13]],
        &[&[5, 3], &[11, 13]],
        &[&[1, 3, 4], &[11, 13, 14]],
        &[&[5, 3, 4], &[6, 8, 9], &[20, 18, 19]],
        &[&[1, 3, 4], &[6, 8, 9], &[20, 18, 19]],
        &[&[7, 4], &[10, 8], &[15, 19]],
        &[&[5, 3], &[6, 8], &[15, 19]],
        &[&[0, 3, 4], &[1, 8, 9], &[21, 18, 23]],
        &[&[5, 3, 4], &[6, 8, 9], &[20, 18, 23]],
        &[&[1, 3, 4], &[6, 8, 9], &[20, 18, 23]],
        &[&[2, 4], &[7, 9], &[17, 23]],
        &[&[2, 4], &[5, 8], &[16, 23]],
        &[&[0, 3, 4], &[1, 8, 9], &[16, 19, 24]],
        &[&[5, 3, 4], &[6, 8, 9], &[15, 19, 24]],
        &[&[2, 4], &[7, 9], &[17, 19]],
        &[&[2, 4], &[5, 8], &[16, 19]],
        &[&[0, 3], &[1, 8], &[16, 19]],
    ])
}

/// A three-letter substitution with 5x3 images whose substitutive language
/// is a strict subset of what the recurrent-vertex graphs report. Useful
/// for testing the minimality machinery on something small: the domino
/// with letter 0 on top of letter 1 is a recurrent vertex of the graph but
/// never occurs in the substitutive shift.
pub fn nu_example() -> Substitution2D {
    let a = 0;
    let b = 1;
    let c = 2;
    table(&[
        &[&[c, c, c, c, c], &[c, c, c, c, c], &[c, c, a, c, c]],
        &[&[c, c, b, c, a], &[c, c, c, c, c], &[c, c, c, c, c]],
        &[&[c, c, a, c, c], &[c, c, c, b, c], &[c, c, c, c, c]],
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metallic::build_omega_for;
    use crate::tiles::{classify, Corner, TileKind};

    #[test]
    fn reference_sets_are_reorderings_of_the_generated_ones() {
        let t1 = t1_reference();
        assert_eq!(t1.len(), 16);
        assert!(t1.same_set(&WangTileSet::metallic(1, false).unwrap()));

        let t2 = t2_reference();
        assert_eq!(t2.len(), 25);
        assert!(t2.same_set(&WangTileSet::metallic(2, false).unwrap()));
    }

    #[test]
    fn reference_set_census() {
        let t1 = t1_reference();
        let mut whites = 0;
        let mut junctions = 0;
        let mut horizontal = 0;
        let mut vertical = 0;
        for tile in t1.tiles() {
            let c = classify(1, tile).unwrap();
            assert!(c.in_core, "reference tile {tile:?} should lie in the core set");
            match c.kind {
                TileKind::White { .. } => whites += 1,
                TileKind::Junction { .. } => junctions += 1,
                k if k.is_horizontal_stripe() => horizontal += 1,
                _ => vertical += 1,
            }
        }
        assert_eq!((whites, junctions, horizontal, vertical), (1, 7, 4, 4));
    }

    #[test]
    fn omega1_reference_matches_the_block_construction() {
        let omega = build_omega_for(1, &t1_reference()).unwrap();
        assert_eq!(omega, omega1_reference());
    }

    #[test]
    fn omega2_reference_matches_the_block_construction() {
        let omega = build_omega_for(2, &t2_reference()).unwrap();
        assert_eq!(omega, omega2_reference());
    }

    #[test]
    fn omega2_reference_charpoly_factors() {
        let poly = omega2_reference().incidence().char_poly();
        assert_eq!(
            poly.factor().to_string(),
            "(x - 1)^3 x^11 (x + 1)^5 (x^2 + 2x - 1)^2 (x^2 - 6x + 1)"
        );
    }

    #[test]
    fn omega1_reference_image_shapes() {
        // Every image is at most 2x2 and the shape matches the head digits
        // of the bottom and left labels of the corresponding tile.
        let t1 = t1_reference();
        let omega = omega1_reference();
        for (i, tile) in t1.tiles().iter().enumerate() {
            let (w, h) = omega.image(i).shape();
            let first = |l: &Label| match l {
                Label::Triple(v0, _, _) => *v0 as usize,
                Label::Opaque(_) => unreachable!("fixture uses triples"),
            };
            assert_eq!(w, 2 - first(&tile.bottom), "width of image {i}");
            assert_eq!(h, 2 - first(&tile.left), "height of image {i}");
        }
    }

    #[test]
    fn ammann16_structure() {
        let a = ammann16();
        assert_eq!(a.len(), 16);
        assert_eq!(a.vertical_labels().len(), 6);
        assert_eq!(a.horizontal_labels().len(), 6);
        assert!(a.is_deterministic(Corner::SW));
        assert!(a.is_deterministic(Corner::NE));
        assert!(!a.is_deterministic(Corner::NW));
        assert!(!a.is_deterministic(Corner::SE));
    }

    #[test]
    fn ammann_label_map_transports_the_reference_set() {
        // Relabeling the Ammann tiles edge by edge must reproduce the
        // reference ordering exactly, tile for tile.
        let map: std::collections::BTreeMap<u32, Label> = ammann_label_map().into_iter().collect();
        let relabeled: Vec<WangTile<Label>> = ammann16()
            .tiles()
            .iter()
            .map(|t| WangTile::new(map[&t.right], map[&t.top], map[&t.left], map[&t.bottom]))
            .collect();
        assert_eq!(relabeled, t1_reference().tiles());
    }

    #[test]
    fn nu_example_shapes() {
        let nu = nu_example();
        assert_eq!(nu.letters(), 3);
        for letter in 0..3 {
            assert_eq!(nu.image(letter).shape(), (5, 3));
        }
        // Letter 2 is by far the most frequent letter of every image.
        let counts = nu.incidence();
        assert!(counts.entry(2, 0) >= 12 && counts.entry(2, 1) >= 12 && counts.entry(2, 2) >= 12);
    }
}
