//! Deterministic SVG and TikZ rendering of patterns and substitutions.
//!
//! SVG is the primary format: self-contained, diffable, byte-identical
//! for identical inputs. TikZ output mirrors the same drawing for LaTeX
//! documents. Tiles are colored by their class in the metallic family —
//! white, blue, green, yellow, gray junctions — and antigreen tiles are
//! drawn split, yellow below the falling diagonal and blue above it.
//! Sets without a metallic classification render white.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::tiles::{classify, Label, WangTile, WangTileSet};
use crate::words::{Pattern2D, Substitution2D};

/// Fill classes used by the metallic drawings.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ColorClass {
    White,
    Blue,
    Green,
    Yellow,
    Junction,
    Antigreen,
}

impl ColorClass {
    pub const ALL: [ColorClass; 6] = [
        ColorClass::White,
        ColorClass::Blue,
        ColorClass::Green,
        ColorClass::Yellow,
        ColorClass::Junction,
        ColorClass::Antigreen,
    ];
}

/// The fill class of a classified metallic tile.
pub fn color_class(kind: &crate::tiles::TileKind) -> ColorClass {
    use crate::tiles::TileKind::*;
    match kind {
        White { .. } => ColorClass::White,
        BlueH { .. } | BlueV { .. } => ColorClass::Blue,
        GreenH { .. } | GreenV { .. } => ColorClass::Green,
        YellowH { .. } | YellowV { .. } => ColorClass::Yellow,
        Junction { .. } => ColorClass::Junction,
        AntigreenH { .. } | AntigreenV { .. } => ColorClass::Antigreen,
    }
}

/// Visual knobs for both emitters. Colors are `#rrggbb` strings.
#[derive(Clone, Debug)]
pub struct RenderStyle {
    /// Cell side in pixels (SVG only; TikZ cells are 1 unit).
    pub cell_size: f64,
    pub white: String,
    pub blue: String,
    pub green: String,
    pub yellow: String,
    pub junction: String,
    pub label_font_size: f64,
    pub show_labels: bool,
    pub show_index: bool,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            cell_size: 48.0,
            white: "#ffffff".to_string(),
            blue: "#a8cfe4".to_string(),
            green: "#b5dfa8".to_string(),
            yellow: "#f2e394".to_string(),
            junction: "#c9c9c9".to_string(),
            label_font_size: 9.0,
            show_labels: true,
            show_index: false,
        }
    }
}

impl RenderStyle {
    /// Fills for a class: `[below, above]` halves of the falling
    /// diagonal. Solid classes use the same color twice, so the mapping
    /// is total.
    pub fn fills(&self, class: ColorClass) -> [&str; 2] {
        match class {
            ColorClass::White => [&self.white, &self.white],
            ColorClass::Blue => [&self.blue, &self.blue],
            ColorClass::Green => [&self.green, &self.green],
            ColorClass::Yellow => [&self.yellow, &self.yellow],
            ColorClass::Junction => [&self.junction, &self.junction],
            ColorClass::Antigreen => [&self.yellow, &self.blue],
        }
    }
}

fn tile_class(tileset: &WangTileSet<Label>, index: usize) -> ColorClass {
    match tileset.family().metallic_index() {
        Some(n) => classify(n, tileset.tile(index))
            .map(|c| color_class(&c.kind))
            .unwrap_or(ColorClass::White),
        None => ColorClass::White,
    }
}

/// Formats a pixel coordinate without trailing `.0` noise.
fn px(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn check_letters(p: &Pattern2D, tileset: &WangTileSet<Label>) -> Result<()> {
    for &cell in p.cells() {
        if cell >= tileset.len() {
            return Err(Error::domain(format!(
                "letter {cell} is outside the tile set of {} tiles",
                tileset.len()
            )));
        }
    }
    Ok(())
}

/// Cells touching an edge whose two labels disagree.
fn mismatched_cells(p: &Pattern2D, tileset: &WangTileSet<Label>) -> Vec<(usize, usize)> {
    let mut bad = std::collections::BTreeSet::new();
    for y in 0..p.height() {
        for x in 0..p.width() {
            let t = tileset.tile(p.get(x, y));
            if x + 1 < p.width() && t.right != tileset.tile(p.get(x + 1, y)).left {
                bad.insert((x, y));
                bad.insert((x + 1, y));
            }
            if y + 1 < p.height() && t.top != tileset.tile(p.get(x, y + 1)).bottom {
                bad.insert((x, y));
                bad.insert((x, y + 1));
            }
        }
    }
    bad.into_iter().collect()
}

/// Emits one cell (fill, border, labels) at pixel position `(ox, oy)`,
/// the cell's top-left corner in SVG coordinates.
fn svg_cell(
    out: &mut String,
    ox: f64,
    oy: f64,
    tile: &WangTile<Label>,
    class: ColorClass,
    index: usize,
    invalid: bool,
    style: &RenderStyle,
) {
    let s = style.cell_size;
    let [below, above] = style.fills(class);
    if below == above {
        let _ = writeln!(
            out,
            r##"<rect class="cell" x="{}" y="{}" width="{}" height="{}" fill="{}" stroke="#000000" stroke-width="1"/>"##,
            px(ox),
            px(oy),
            px(s),
            px(s),
            below
        );
    } else {
        // Split along the falling diagonal: below-half holds the
        // south-west corner, above-half the north-east corner.
        let _ = writeln!(
            out,
            r##"<path class="half" d="M{},{} L{},{} L{},{} Z" fill="{}"/>"##,
            px(ox),
            px(oy),
            px(ox + s),
            px(oy + s),
            px(ox),
            px(oy + s),
            below
        );
        let _ = writeln!(
            out,
            r##"<path class="half" d="M{},{} L{},{} L{},{} Z" fill="{}"/>"##,
            px(ox),
            px(oy),
            px(ox + s),
            px(oy),
            px(ox + s),
            px(oy + s),
            above
        );
        let _ = writeln!(
            out,
            r##"<rect class="cell" x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#000000" stroke-width="1"/>"##,
            px(ox),
            px(oy),
            px(s),
            px(s)
        );
    }
    if style.show_labels {
        let f = style.label_font_size;
        let pad = s * 0.06;
        let mid = |v: f64| px(v);
        let _ = writeln!(
            out,
            r##"<text x="{}" y="{}" font-size="{}" text-anchor="end" dominant-baseline="middle">{}</text>"##,
            mid(ox + s - pad),
            mid(oy + s / 2.0),
            px(f),
            xml_escape(&tile.right.to_string())
        );
        let _ = writeln!(
            out,
            r##"<text x="{}" y="{}" font-size="{}" text-anchor="middle" dominant-baseline="hanging">{}</text>"##,
            mid(ox + s / 2.0),
            mid(oy + pad),
            px(f),
            xml_escape(&tile.top.to_string())
        );
        let _ = writeln!(
            out,
            r##"<text x="{}" y="{}" font-size="{}" text-anchor="start" dominant-baseline="middle">{}</text>"##,
            mid(ox + pad),
            mid(oy + s / 2.0),
            px(f),
            xml_escape(&tile.left.to_string())
        );
        let _ = writeln!(
            out,
            r##"<text x="{}" y="{}" font-size="{}" text-anchor="middle">{}</text>"##,
            mid(ox + s / 2.0),
            mid(oy + s - pad),
            px(f),
            xml_escape(&tile.bottom.to_string())
        );
    }
    if style.show_index {
        let _ = writeln!(
            out,
            r##"<text x="{}" y="{}" font-size="{}" text-anchor="middle" dominant-baseline="middle" fill="#444444">{}</text>"##,
            px(ox + s / 2.0),
            px(oy + s / 2.0),
            px(style.label_font_size * 1.2),
            index
        );
    }
    if invalid {
        let _ = writeln!(
            out,
            r##"<rect class="invalid" x="{}" y="{}" width="{}" height="{}" fill="none" stroke="red" stroke-width="3"/>"##,
            px(ox + 1.5),
            px(oy + 1.5),
            px(s - 3.0),
            px(s - 3.0)
        );
    }
}

/// Emits a pattern at pixel offset `(dx, dy)`; `(dx, dy)` is the
/// top-left corner of the pattern's bounding box.
fn svg_pattern_at(
    out: &mut String,
    p: &Pattern2D,
    tileset: &WangTileSet<Label>,
    style: &RenderStyle,
    dx: f64,
    dy: f64,
) {
    let s = style.cell_size;
    let bad = mismatched_cells(p, tileset);
    for y in (0..p.height()).rev() {
        for x in 0..p.width() {
            let t = p.get(x, y);
            svg_cell(
                out,
                dx + x as f64 * s,
                dy + (p.height() - 1 - y) as f64 * s,
                tileset.tile(t),
                tile_class(tileset, t),
                t,
                bad.contains(&(x, y)),
                style,
            );
        }
    }
}

fn svg_document(width: f64, height: f64, body: String) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n{body}</svg>\n",
        w = px(width),
        h = px(height),
    )
}

const MARGIN: f64 = 2.0;

/// Renders a pattern as an SVG document.
///
/// Validity is rechecked cell by cell: cells beside a mismatched edge
/// are outlined red rather than rejected, so broken patterns can still
/// be inspected. Letters outside the tile set are an error.
pub fn render_pattern(p: &Pattern2D, tileset: &WangTileSet<Label>, style: &RenderStyle) -> Result<String> {
    check_letters(p, tileset)?;
    let s = style.cell_size;
    let mut body = String::new();
    svg_pattern_at(&mut body, p, tileset, style, MARGIN, MARGIN);
    Ok(svg_document(
        p.width() as f64 * s + 2.0 * MARGIN,
        p.height() as f64 * s + 2.0 * MARGIN,
        body,
    ))
}

/// Renders letter-to-image panels (tile, arrow, image block) as SVG.
///
/// One panel per entry, laid out in rows of four; an empty slice gives
/// an empty document.
pub fn render_panels(
    images: &[Pattern2D],
    tileset: &WangTileSet<Label>,
    style: &RenderStyle,
) -> Result<String> {
    for (a, img) in images.iter().enumerate() {
        if a >= tileset.len() {
            return Err(Error::domain(format!(
                "substitution has {} letters but the tile set only {}",
                images.len(),
                tileset.len()
            )));
        }
        check_letters(img, tileset)?;
    }
    let s = style.cell_size;
    let arrow = s * 0.9;
    let gap = s * 0.5;
    let max_w = images.iter().map(|p| p.width()).max().unwrap_or(1) as f64;
    let max_h = images.iter().map(|p| p.height()).max().unwrap_or(1).max(1) as f64;
    let slot_w = s + arrow + max_w * s;
    let slot_h = max_h * s;
    let cols = images.len().clamp(1, 4);
    let rows = images.len().div_ceil(cols);

    let mut body = String::new();
    for (a, img) in images.iter().enumerate() {
        let col = (a % cols) as f64;
        let row = (a / cols) as f64;
        let ox = MARGIN + col * (slot_w + gap);
        let oy = MARGIN + row * (slot_h + gap);
        let _ = writeln!(body, r##"<g class="panel">"##);
        let source_y = oy + (slot_h - s) / 2.0;
        svg_cell(
            &mut body,
            ox,
            source_y,
            tileset.tile(a),
            tile_class(tileset, a),
            a,
            false,
            style,
        );
        let ay = oy + slot_h / 2.0;
        let x1 = ox + s + arrow * 0.15;
        let x2 = ox + s + arrow * 0.75;
        let _ = writeln!(
            body,
            r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#000000" stroke-width="1.5"/>"##,
            px(x1),
            px(ay),
            px(x2),
            px(ay)
        );
        let _ = writeln!(
            body,
            r##"<path d="M{},{} L{},{} L{},{} Z" fill="#000000"/>"##,
            px(x2 + arrow * 0.15),
            px(ay),
            px(x2),
            px(ay - arrow * 0.1),
            px(x2),
            px(ay + arrow * 0.1)
        );
        let img_y = oy + (slot_h - img.height() as f64 * s) / 2.0;
        svg_pattern_at(&mut body, img, tileset, style, ox + s + arrow, img_y);
        let _ = writeln!(body, "</g>");
    }
    let width = if images.is_empty() {
        2.0 * MARGIN
    } else {
        2.0 * MARGIN + cols as f64 * slot_w + (cols as f64 - 1.0) * gap
    };
    let height = if images.is_empty() {
        2.0 * MARGIN
    } else {
        2.0 * MARGIN + rows as f64 * slot_h + (rows as f64 - 1.0) * gap
    };
    Ok(svg_document(width, height, body))
}

/// Renders a substitution as per-letter panels, one per alphabet letter.
pub fn render_substitution(
    s: &Substitution2D,
    tileset: &WangTileSet<Label>,
    style: &RenderStyle,
) -> Result<String> {
    render_panels(s.images(), tileset, style)
}

fn tikz_color(def: &mut String, name: &str, value: &str) -> String {
    if let Some(hex) = value.strip_prefix('#') {
        if hex.len() == 6 && hex.chars().all(|c| c.is_ascii_hexdigit()) {
            let _ = writeln!(def, "\\definecolor{{{name}}}{{HTML}}{{{}}}", hex.to_uppercase());
            return name.to_string();
        }
    }
    value.to_string()
}

struct TikzPalette {
    defs: String,
    white: String,
    blue: String,
    green: String,
    yellow: String,
    junction: String,
}

impl TikzPalette {
    fn new(style: &RenderStyle) -> Self {
        let mut defs = String::new();
        let white = tikz_color(&mut defs, "tileWhite", &style.white);
        let blue = tikz_color(&mut defs, "tileBlue", &style.blue);
        let green = tikz_color(&mut defs, "tileGreen", &style.green);
        let yellow = tikz_color(&mut defs, "tileYellow", &style.yellow);
        let junction = tikz_color(&mut defs, "tileJunction", &style.junction);
        TikzPalette { defs, white, blue, green, yellow, junction }
    }

    /// `[below, above]` halves, as for the SVG fills.
    fn fills(&self, class: ColorClass) -> [&str; 2] {
        match class {
            ColorClass::White => [&self.white, &self.white],
            ColorClass::Blue => [&self.blue, &self.blue],
            ColorClass::Green => [&self.green, &self.green],
            ColorClass::Yellow => [&self.yellow, &self.yellow],
            ColorClass::Junction => [&self.junction, &self.junction],
            ColorClass::Antigreen => [&self.yellow, &self.blue],
        }
    }
}

/// Emits one cell with its south-west corner at `(x, y)` in TikZ
/// coordinates (y grows upward, one unit per cell).
fn tikz_cell(
    out: &mut String,
    x: f64,
    y: f64,
    tile: &WangTile<Label>,
    class: ColorClass,
    index: usize,
    invalid: bool,
    palette: &TikzPalette,
    style: &RenderStyle,
) {
    let [below, above] = palette.fills(class);
    if below == above {
        let _ = writeln!(out, "\\fill[{below}] ({x},{y}) rectangle ({},{});", x + 1.0, y + 1.0);
    } else {
        let _ = writeln!(
            out,
            "\\fill[{below}] ({x},{}) -- ({x},{y}) -- ({},{y}) -- cycle;",
            y + 1.0,
            x + 1.0
        );
        let _ = writeln!(
            out,
            "\\fill[{above}] ({x},{}) -- ({},{}) -- ({},{y}) -- cycle;",
            y + 1.0,
            x + 1.0,
            y + 1.0,
            x + 1.0
        );
    }
    let _ = writeln!(out, "\\draw ({x},{y}) rectangle ({},{});", x + 1.0, y + 1.0);
    if style.show_labels {
        let n = |t: &Label| format!("{{{t}}}");
        let _ = writeln!(out, "\\node[font=\\tiny,anchor=east] at ({},{}) {};", x + 0.97, y + 0.5, n(&tile.right));
        let _ = writeln!(out, "\\node[font=\\tiny,anchor=north] at ({},{}) {};", x + 0.5, y + 0.97, n(&tile.top));
        let _ = writeln!(out, "\\node[font=\\tiny,anchor=west] at ({},{}) {};", x + 0.03, y + 0.5, n(&tile.left));
        let _ = writeln!(out, "\\node[font=\\tiny,anchor=south] at ({},{}) {};", x + 0.5, y + 0.03, n(&tile.bottom));
    }
    if style.show_index {
        let _ = writeln!(out, "\\node[font=\\tiny,gray] at ({},{}) {{{index}}};", x + 0.5, y + 0.5);
    }
    if invalid {
        let _ = writeln!(
            out,
            "\\draw[red,very thick] ({},{}) rectangle ({},{});",
            x + 0.05,
            y + 0.05,
            x + 0.95,
            y + 0.95
        );
    }
}

fn tikz_pattern_at(
    out: &mut String,
    p: &Pattern2D,
    tileset: &WangTileSet<Label>,
    palette: &TikzPalette,
    style: &RenderStyle,
    dx: f64,
    dy: f64,
) {
    let bad = mismatched_cells(p, tileset);
    for y in 0..p.height() {
        for x in 0..p.width() {
            let t = p.get(x, y);
            tikz_cell(
                out,
                dx + x as f64,
                dy + y as f64,
                tileset.tile(t),
                tile_class(tileset, t),
                t,
                bad.contains(&(x, y)),
                palette,
                style,
            );
        }
    }
}

fn tikz_document(palette: &TikzPalette, body: String) -> String {
    format!(
        "\\begin{{tikzpicture}}[x=1em,y=1em]\n{}{}\\end{{tikzpicture}}\n",
        palette.defs, body
    )
}

/// Renders a pattern as a TikZ picture; same conventions as
/// [`render_pattern`], with y growing upward.
pub fn render_pattern_tikz(
    p: &Pattern2D,
    tileset: &WangTileSet<Label>,
    style: &RenderStyle,
) -> Result<String> {
    check_letters(p, tileset)?;
    let palette = TikzPalette::new(style);
    let mut body = String::new();
    tikz_pattern_at(&mut body, p, tileset, &palette, style, 0.0, 0.0);
    Ok(tikz_document(&palette, body))
}

/// Renders a substitution as TikZ panels, one per letter.
pub fn render_substitution_tikz(
    s: &Substitution2D,
    tileset: &WangTileSet<Label>,
    style: &RenderStyle,
) -> Result<String> {
    let images = s.images();
    for img in images {
        check_letters(img, tileset)?;
    }
    if s.letters() > tileset.len() {
        return Err(Error::domain(format!(
            "substitution has {} letters but the tile set only {}",
            s.letters(),
            tileset.len()
        )));
    }
    let palette = TikzPalette::new(style);
    let max_w = images.iter().map(|p| p.width()).max().unwrap_or(1) as f64;
    let max_h = images.iter().map(|p| p.height()).max().unwrap_or(1).max(1) as f64;
    let slot_w = 1.0 + 1.2 + max_w;
    let slot_h = max_h;
    let cols = images.len().clamp(1, 4);
    let mut body = String::new();
    for (a, img) in images.iter().enumerate() {
        let col = (a % cols) as f64;
        let row = (a / cols) as f64;
        let ox = col * (slot_w + 0.8);
        // TikZ y grows upward; later rows sit lower.
        let oy = -row * (slot_h + 0.8);
        let _ = writeln!(body, "% panel {a}");
        let source_y = oy + (slot_h - 1.0) / 2.0;
        tikz_cell(
            &mut body,
            ox,
            source_y,
            tileset.tile(a),
            tile_class(tileset, a),
            a,
            false,
            &palette,
            style,
        );
        let ay = oy + slot_h / 2.0;
        let _ = writeln!(
            body,
            "\\draw[->] ({},{ay}) -- ({},{ay});",
            ox + 1.15,
            ox + 2.05
        );
        let img_y = oy + (slot_h - img.height() as f64) / 2.0;
        tikz_pattern_at(&mut body, img, tileset, &palette, style, ox + 2.2, img_y);
    }
    Ok(tikz_document(&palette, body))
}
