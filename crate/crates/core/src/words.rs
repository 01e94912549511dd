//! Rectangular patterns over an indexed alphabet and 2d substitutions.
//!
//! A [`Pattern2D`] stores letters (usize indices) on a `width x height`
//! rectangle in Cartesian orientation: `(0, 0)` is the lower-left cell,
//! `x` grows rightward, `y` grows upward. A [`Substitution2D`] maps each
//! letter to a pattern; applying it to a pattern glues the images in a
//! grid, which requires image heights to agree along rows and image
//! widths along columns.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::IncidenceMatrix;

/// A rectangular block of letters, rows indexed bottom to top.
///
/// Ordering compares `(width, height)` first, then cells scanned column by
/// column, bottom to top within each column. This column-major scan is the
/// order used when reporting "smallest" patterns.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Pattern2D {
    width: usize,
    height: usize,
    cells: Vec<usize>,
}

impl Pattern2D {
    /// Builds a pattern from row-major cells, bottom row first.
    pub fn new(width: usize, height: usize, cells: Vec<usize>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::domain("pattern dimensions must be positive"));
        }
        if cells.len() != width * height {
            return Err(Error::domain(format!(
                "pattern of size {width}x{height} needs {} cells, got {}",
                width * height,
                cells.len()
            )));
        }
        Ok(Pattern2D { width, height, cells })
    }

    /// A single-cell pattern.
    pub fn cell(letter: usize) -> Self {
        Pattern2D { width: 1, height: 1, cells: vec![letter] }
    }

    /// Builds a pattern from rows listed bottom to top.
    pub fn from_rows_bottom_up(rows: Vec<Vec<usize>>) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::domain("pattern needs at least one non-empty row"));
        }
        let width = rows[0].len();
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::domain("pattern rows must have equal length"));
        }
        let height = rows.len();
        let cells = rows.into_iter().flatten().collect();
        Pattern2D::new(width, height, cells)
    }

    /// Builds a pattern from columns listed left to right, each bottom to
    /// top. This matches the column-major convention of the shipped
    /// substitution fixtures.
    pub fn from_cols_bottom_up(cols: Vec<Vec<usize>>) -> Result<Self> {
        if cols.is_empty() || cols[0].is_empty() {
            return Err(Error::domain("pattern needs at least one non-empty column"));
        }
        let height = cols[0].len();
        if cols.iter().any(|c| c.len() != height) {
            return Err(Error::domain("pattern columns must have equal length"));
        }
        let width = cols.len();
        let mut cells = vec![0; width * height];
        for (x, col) in cols.iter().enumerate() {
            for (y, &v) in col.iter().enumerate() {
                cells[y * width + x] = v;
            }
        }
        Pattern2D::new(width, height, cells)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The letter at Cartesian position `(x, y)`.
    pub fn get(&self, x: usize, y: usize) -> usize {
        assert!(x < self.width && y < self.height, "cell ({x},{y}) out of range");
        self.cells[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, letter: usize) {
        assert!(x < self.width && y < self.height, "cell ({x},{y}) out of range");
        self.cells[y * self.width + x] = letter;
    }

    /// Row `y`, left to right.
    pub fn row(&self, y: usize) -> Vec<usize> {
        (0..self.width).map(|x| self.get(x, y)).collect()
    }

    /// Column `x`, bottom to top.
    pub fn col(&self, x: usize) -> Vec<usize> {
        (0..self.height).map(|y| self.get(x, y)).collect()
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    /// The largest letter appearing, plus one.
    pub fn alphabet_bound(&self) -> usize {
        self.cells.iter().copied().max().map_or(0, |m| m + 1)
    }

    /// The sub-pattern of size `w x h` whose lower-left corner is `(x, y)`.
    pub fn sub_pattern(&self, x: usize, y: usize, w: usize, h: usize) -> Result<Pattern2D> {
        if x + w > self.width || y + h > self.height {
            return Err(Error::domain(format!(
                "sub-pattern {w}x{h} at ({x},{y}) exceeds pattern of size {}x{}",
                self.width, self.height
            )));
        }
        let mut cells = Vec::with_capacity(w * h);
        for yy in y..y + h {
            for xx in x..x + w {
                cells.push(self.get(xx, yy));
            }
        }
        Pattern2D::new(w, h, cells)
    }

    /// Concatenation along the first axis: `self` on the left, `other` on
    /// the right. Heights must agree.
    pub fn concat_x(&self, other: &Pattern2D) -> Result<Pattern2D> {
        if self.height != other.height {
            return Err(Error::alignment(format!(
                "horizontal concatenation needs equal heights, got {} and {}",
                self.height, other.height
            )));
        }
        let mut rows = Vec::with_capacity(self.height);
        for y in 0..self.height {
            let mut row = self.row(y);
            row.extend(other.row(y));
            rows.push(row);
        }
        Pattern2D::from_rows_bottom_up(rows)
    }

    /// Concatenation along the second axis: `self` at the bottom, `other`
    /// on top. Widths must agree.
    pub fn concat_y(&self, other: &Pattern2D) -> Result<Pattern2D> {
        if self.width != other.width {
            return Err(Error::alignment(format!(
                "vertical concatenation needs equal widths, got {} and {}",
                self.width, other.width
            )));
        }
        let mut cells = self.cells.clone();
        cells.extend_from_slice(&other.cells);
        Pattern2D::new(self.width, self.height + other.height, cells)
    }

    /// All `w x h` sub-patterns, as a set.
    pub fn factors(&self, w: usize, h: usize) -> BTreeSet<Pattern2D> {
        let mut out = BTreeSet::new();
        if w > self.width || h > self.height {
            return out;
        }
        for y in 0..=(self.height - h) {
            for x in 0..=(self.width - w) {
                out.insert(self.sub_pattern(x, y, w, h).expect("in range"));
            }
        }
        out
    }

    fn col_major_cells(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.width).flat_map(move |x| (0..self.height).map(move |y| self.get(x, y)))
    }
}

impl Ord for Pattern2D {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.width, self.height)
            .cmp(&(other.width, other.height))
            .then_with(|| self.col_major_cells().cmp(other.col_major_cells()))
    }
}

impl PartialOrd for Pattern2D {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Pattern2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for y in (0..self.height).rev() {
            for x in 0..self.width {
                if x > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(x, y))?;
            }
            if y > 0 {
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Pattern2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pattern2D[")?;
        for y in (0..self.height).rev() {
            if y < self.height - 1 {
                write!(f, " / ")?;
            }
            for x in 0..self.width {
                if x > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(x, y))?;
            }
        }
        write!(f, "]")
    }
}

/// A 2d substitution: one rectangular image per letter `0..k`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Substitution2D {
    images: Vec<Pattern2D>,
}

impl Substitution2D {
    pub fn new(images: Vec<Pattern2D>) -> Result<Self> {
        if images.is_empty() {
            return Err(Error::domain("substitution needs at least one letter"));
        }
        Ok(Substitution2D { images })
    }

    /// Number of letters in the domain alphabet.
    pub fn letters(&self) -> usize {
        self.images.len()
    }

    pub fn image(&self, letter: usize) -> &Pattern2D {
        &self.images[letter]
    }

    pub fn images(&self) -> &[Pattern2D] {
        &self.images
    }

    /// Applies the substitution to a pattern, gluing images in a grid.
    ///
    /// Image heights must agree along each row of `p` and image widths
    /// along each column; a mismatch is reported with the offending letter
    /// pair.
    pub fn apply(&self, p: &Pattern2D) -> Result<Pattern2D> {
        for &c in p.cells() {
            if c >= self.letters() {
                return Err(Error::domain(format!(
                    "letter {c} outside substitution alphabet of size {}",
                    self.letters()
                )));
            }
        }
        // Row heights from column 0, column widths from row 0; then verify
        // every cell against both.
        let row_heights: Vec<usize> = (0..p.height()).map(|y| self.image(p.get(0, y)).height()).collect();
        let col_widths: Vec<usize> = (0..p.width()).map(|x| self.image(p.get(x, 0)).width()).collect();
        for y in 0..p.height() {
            for x in 0..p.width() {
                let img = self.image(p.get(x, y));
                if img.height() != row_heights[y] {
                    return Err(Error::alignment(format!(
                        "letters {} and {} in row {y} have image heights {} and {}",
                        p.get(0, y),
                        p.get(x, y),
                        row_heights[y],
                        img.height()
                    )));
                }
                if img.width() != col_widths[x] {
                    return Err(Error::alignment(format!(
                        "letters {} and {} in column {x} have image widths {} and {}",
                        p.get(x, 0),
                        p.get(x, y),
                        col_widths[x],
                        img.width()
                    )));
                }
            }
        }
        let total_w: usize = col_widths.iter().sum();
        let total_h: usize = row_heights.iter().sum();
        let mut out = Pattern2D::new(total_w, total_h, vec![0; total_w * total_h])?;
        let mut y_off = 0;
        for y in 0..p.height() {
            let mut x_off = 0;
            for x in 0..p.width() {
                let img = self.image(p.get(x, y));
                for yy in 0..img.height() {
                    for xx in 0..img.width() {
                        out.set(x_off + xx, y_off + yy, img.get(xx, yy));
                    }
                }
                x_off += col_widths[x];
            }
            y_off += row_heights[y];
        }
        Ok(out)
    }

    /// `k`-fold application starting from the single letter `a`.
    pub fn iterate(&self, a: usize, k: usize) -> Result<Pattern2D> {
        let mut p = Pattern2D::cell(a);
        for _ in 0..k {
            p = self.apply(&p)?;
        }
        Ok(p)
    }

    /// Function composition: `(self . inner)(a) = self(inner(a))`.
    ///
    /// The result maps `inner`'s alphabet into `self`'s image alphabet.
    pub fn compose(&self, inner: &Substitution2D) -> Result<Substitution2D> {
        let images = inner
            .images
            .iter()
            .map(|img| self.apply(img))
            .collect::<Result<Vec<_>>>()?;
        Substitution2D::new(images)
    }

    /// The incidence matrix: entry `(b, a)` counts occurrences of letter
    /// `b` in the image of letter `a`.
    pub fn incidence(&self) -> IncidenceMatrix {
        let k = self.letters();
        let bound = self.images.iter().map(Pattern2D::alphabet_bound).max().unwrap_or(0);
        let size = k.max(bound);
        let mut m = IncidenceMatrix::zero(size);
        for (a, img) in self.images.iter().enumerate() {
            for &b in img.cells() {
                *m.entry_mut(b, a) += 1;
            }
        }
        m
    }

    /// The set of `w x h` patterns occurring in some iterated image of
    /// some letter, for shapes up to `2 x 2`.
    ///
    /// Computed as a fixpoint: seed with the factors of every letter
    /// image, then repeatedly apply the substitution to every known small
    /// pattern and collect factors again, until stable. Errors if not
    /// stable within `round_cap` rounds.
    pub fn substitutive_language(&self, w: usize, h: usize, round_cap: usize) -> Result<BTreeSet<Pattern2D>> {
        if !(w >= 1 && h >= 1 && w <= 2 && h <= 2) {
            return Err(Error::domain(format!("language shape {w}x{h} not supported (max 2x2)")));
        }
        let shapes = [(1, 1), (2, 1), (1, 2), (2, 2)];
        let mut known: BTreeSet<Pattern2D> = BTreeSet::new();
        for img in &self.images {
            for &(fw, fh) in &shapes {
                known.extend(img.factors(fw, fh));
            }
        }
        for _ in 0..round_cap {
            let mut next = known.clone();
            for p in &known {
                let img = self.apply(p)?;
                for &(fw, fh) in &shapes {
                    next.extend(img.factors(fw, fh));
                }
            }
            if next == known {
                return Ok(known.into_iter().filter(|p| p.shape() == (w, h)).collect());
            }
            known = next;
        }
        Err(Error::Convergence(format!(
            "substitutive language not stable within {round_cap} rounds"
        )))
    }
}
