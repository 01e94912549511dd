//! Incidence matrices and their spectral data: primitivity exponents,
//! Perron eigenvalue by power iteration, and exact characteristic
//! polynomials over big integers (division-free Berkowitz algorithm) with
//! factor extraction up to quadratic factors.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A square nonnegative integer matrix. Entry `(row, col)` of an
/// incidence matrix counts occurrences of letter `row` in the image of
/// letter `col`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IncidenceMatrix {
    size: usize,
    data: Vec<u64>,
}

impl IncidenceMatrix {
    pub fn zero(size: usize) -> Self {
        IncidenceMatrix { size, data: vec![0; size * size] }
    }

    /// Builds a matrix from rows (each of length `rows.len()`).
    pub fn from_rows(rows: &[&[u64]]) -> Result<Self> {
        let size = rows.len();
        if rows.iter().any(|r| r.len() != size) {
            return Err(Error::domain("matrix rows must be square"));
        }
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Ok(IncidenceMatrix { size, data })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn entry(&self, row: usize, col: usize) -> u64 {
        self.data[row * self.size + col]
    }

    pub fn entry_mut(&mut self, row: usize, col: usize) -> &mut u64 {
        &mut self.data[row * self.size + col]
    }

    /// Column sums, i.e. image sizes when this is an incidence matrix.
    pub fn column_sums(&self) -> Vec<u64> {
        (0..self.size)
            .map(|c| (0..self.size).map(|r| self.entry(r, c)).sum())
            .collect()
    }

    fn bool_mul(&self, a: &[bool], b: &[bool]) -> Vec<bool> {
        let n = self.size;
        let mut out = vec![false; n * n];
        for i in 0..n {
            for k in 0..n {
                if a[i * n + k] {
                    for j in 0..n {
                        if b[k * n + j] {
                            out[i * n + j] = true;
                        }
                    }
                }
            }
        }
        out
    }

    /// The least `k <= max_power` with `M^k` entrywise positive.
    ///
    /// Errors if no such power exists within the budget (the matrix may
    /// simply not be primitive).
    pub fn primitivity_exponent(&self, max_power: usize) -> Result<usize> {
        if self.size == 0 {
            return Err(Error::domain("empty matrix"));
        }
        let support: Vec<bool> = self.data.iter().map(|&e| e > 0).collect();
        let mut power = support.clone();
        for k in 1..=max_power {
            if power.iter().all(|&b| b) {
                return Ok(k);
            }
            power = self.bool_mul(&power, &support);
        }
        Err(Error::Convergence(format!(
            "no entrywise-positive power up to {max_power}; matrix may not be primitive"
        )))
    }

    pub fn is_primitive(&self, max_power: usize) -> bool {
        self.primitivity_exponent(max_power).is_ok()
    }

    /// Dominant eigenvalue and its left-to-right eigenvector by power
    /// iteration, starting from the all-ones vector.
    ///
    /// Stops when successive Rayleigh quotients differ by less than `tol`;
    /// errors after `max_iter` steps. The eigenvector is normalized to sum
    /// one, so for a primitive incidence matrix it gives letter
    /// frequencies.
    pub fn perron_eigenvalue(&self, tol: f64, max_iter: usize) -> Result<(f64, Vec<f64>)> {
        let n = self.size;
        if n == 0 {
            return Err(Error::domain("empty matrix"));
        }
        let mul = |v: &[f64]| -> Vec<f64> {
            (0..n)
                .map(|i| (0..n).map(|j| self.entry(i, j) as f64 * v[j]).sum())
                .collect()
        };
        let mut v = vec![1.0; n];
        let mut prev_rayleigh = f64::NAN;
        for _ in 0..max_iter {
            let w = mul(&v);
            let num: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
            let den: f64 = v.iter().map(|a| a * a).sum();
            if den == 0.0 {
                return Err(Error::Convergence("power iteration collapsed to zero".into()));
            }
            let rayleigh = num / den;
            let norm: f64 = w.iter().map(|x| x.abs()).sum();
            if norm == 0.0 {
                return Err(Error::Convergence("matrix is nilpotent on the start vector".into()));
            }
            let w: Vec<f64> = w.iter().map(|x| x / norm).collect();
            if (rayleigh - prev_rayleigh).abs() < tol {
                let sum: f64 = w.iter().sum();
                let freq = w.iter().map(|x| x / sum).collect();
                return Ok((rayleigh, freq));
            }
            prev_rayleigh = rayleigh;
            v = w;
        }
        Err(Error::Convergence(format!(
            "power iteration did not stabilize within {max_iter} iterations (tol {tol})"
        )))
    }

    /// Exact characteristic polynomial `det(xI - M)` by the division-free
    /// Berkowitz algorithm over big integers.
    pub fn char_poly(&self) -> IntPoly {
        let n = self.size;
        let a = |i: usize, j: usize| BigInt::from(self.entry(i, j));
        // Coefficients highest power first; start with the empty matrix.
        let mut coeffs: Vec<BigInt> = vec![BigInt::one()];
        for r in 1..=n {
            // Toeplitz column for the r-th leading principal submatrix:
            // t[0] = 1, t[1] = -A[r-1][r-1], t[j] = -(row . M^(j-2) . col).
            let mut t: Vec<BigInt> = Vec::with_capacity(r + 1);
            t.push(BigInt::one());
            t.push(-a(r - 1, r - 1));
            if r > 1 {
                let row: Vec<BigInt> = (0..r - 1).map(|j| a(r - 1, j)).collect();
                let mut w: Vec<BigInt> = (0..r - 1).map(|i| a(i, r - 1)).collect();
                for _ in 2..=r {
                    let dot: BigInt = row.iter().zip(&w).map(|(x, y)| x * y).sum();
                    t.push(-dot);
                    // w = M * w for the (r-1) x (r-1) principal block.
                    w = (0..r - 1)
                        .map(|i| (0..r - 1).map(|j| a(i, j) * &w[j]).sum())
                        .collect();
                }
            }
            let mut next = vec![BigInt::zero(); r + 1];
            for (i, c) in coeffs.iter().enumerate() {
                for (j, tj) in t.iter().enumerate() {
                    if i + j <= r {
                        next[i + j] += c * tj;
                    }
                }
            }
            coeffs = next;
        }
        coeffs.reverse();
        IntPoly::new(coeffs)
    }
}

impl fmt::Display for IncidenceMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.size {
            for c in 0..self.size {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.entry(r, c))?;
            }
            if r + 1 < self.size {
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

/// An integer polynomial, coefficients stored constant term first.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    /// Builds a polynomial, trimming leading zeros. The zero polynomial
    /// has an empty coefficient vector.
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        IntPoly::from_i64(&[1])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        IntPoly::from_i64(&[0, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    pub fn pow(&self, k: u32) -> IntPoly {
        let mut out = IntPoly::one();
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Exact division; `None` if `other` does not divide `self` over the
    /// integers (requires `other` monic here).
    fn div_exact(&self, other: &IntPoly) -> Option<IntPoly> {
        assert!(other.coeffs.last().is_some_and(One::is_one), "divisor must be monic");
        if self.is_zero() {
            return Some(IntPoly::zero());
        }
        if self.degree() < other.degree() {
            return None;
        }
        let mut rem = self.coeffs.clone();
        let d = other.degree();
        let mut quot = vec![BigInt::zero(); rem.len() - d];
        for i in (d..rem.len()).rev() {
            let q = rem[i].clone();
            if q.is_zero() {
                continue;
            }
            quot[i - d] = q.clone();
            for (j, b) in other.coeffs.iter().enumerate() {
                let idx = i - d + j;
                rem[idx] -= &q * b;
            }
        }
        if rem.iter().all(Zero::is_zero) {
            Some(IntPoly::new(quot))
        } else {
            None
        }
    }

    /// Factors a monic polynomial into `x^k`, monic linear and monic
    /// irreducible quadratic factors, with multiplicities, plus a
    /// remaining cofactor for anything of higher degree.
    ///
    /// Candidates are found by rational root search (divisors of the
    /// constant term) and quadratic trial division (`x^2 + bx + c` with
    /// `c` dividing the constant term and `|b|` within twice the Cauchy
    /// root bound). Factors are sorted by degree, then coefficients.
    pub fn factor(&self) -> Factorization {
        assert!(!self.is_zero(), "cannot factor the zero polynomial");
        assert!(self.coeffs.last().is_some_and(One::is_one), "factor expects a monic polynomial");
        let mut rest = self.clone();
        let mut factors: Vec<(IntPoly, u32)> = Vec::new();

        let mut push = |f: IntPoly, m: u32, factors: &mut Vec<(IntPoly, u32)>| {
            if m > 0 {
                factors.push((f, m));
            }
        };

        // Powers of x.
        let mut xmult = 0;
        while !rest.is_zero() && rest.coeff(0).is_zero() && rest.degree() >= 1 {
            rest = rest.div_exact(&IntPoly::x()).expect("x divides");
            xmult += 1;
        }
        push(IntPoly::x(), xmult, &mut factors);

        // Linear factors x - r for r dividing the constant term.
        let mut roots: Vec<BigInt> = divisors_signed(&rest.coeff(0));
        roots.sort();
        for r in roots {
            let lin = IntPoly::new(vec![-r.clone(), BigInt::one()]);
            let mut mult = 0;
            while let Some(q) = rest.div_exact(&lin) {
                rest = q;
                mult += 1;
                if rest.degree() == 0 {
                    break;
                }
            }
            push(lin, mult, &mut factors);
        }

        // Quadratic factors x^2 + bx + c.
        if rest.degree() >= 2 {
            let bound = cauchy_bound(&rest);
            let mut quads: Vec<IntPoly> = Vec::new();
            for c in divisors_signed(&rest.coeff(0)) {
                let hi: BigInt = bound.clone() * 2;
                let mut b: BigInt = -hi.clone();
                while b <= hi {
                    quads.push(IntPoly::new(vec![c.clone(), b.clone(), BigInt::one()]));
                    b += 1;
                }
            }
            quads.sort();
            quads.dedup();
            for quad in quads {
                if rest.degree() < 2 {
                    break;
                }
                let mut mult = 0;
                while rest.degree() >= 2 {
                    match rest.div_exact(&quad) {
                        Some(q) => {
                            rest = q;
                            mult += 1;
                        }
                        None => break,
                    }
                }
                push(quad, mult, &mut factors);
            }
        }

        factors.sort_by(|a, b| (a.0.degree(), a.0.coeffs()).cmp(&(b.0.degree(), b.0.coeffs())));
        let remainder = if rest == IntPoly::one() { None } else { Some(rest) };
        Factorization { factors, remainder }
    }
}

fn cauchy_bound(p: &IntPoly) -> BigInt {
    // 1 + max |a_i| bounds the absolute value of any root of a monic p.
    let mut m = BigInt::zero();
    for c in p.coeffs() {
        let a = c.abs();
        if a > m {
            m = a;
        }
    }
    m + 1
}

fn divisors_signed(c: &BigInt) -> Vec<BigInt> {
    // Both signs of every divisor of |c|; for c = 0 only 0 has every
    // divisor, but that case is handled by the x-power extraction first.
    let c = c.abs();
    if c.is_zero() {
        return vec![];
    }
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= c {
        if (&c % &d).is_zero() {
            let e = &c / &d;
            out.push(d.clone());
            out.push(-d.clone());
            if e != d {
                out.push(e.clone());
                out.push(-e);
            }
        }
        d += 1;
    }
    out
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let show_coeff = k == 0 || !mag.is_one();
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match k {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Result of [`IntPoly::factor`]: factors with multiplicities, and
/// whatever could not be split into pieces of degree at most two.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Factorization {
    pub factors: Vec<(IntPoly, u32)>,
    pub remainder: Option<IntPoly>,
}

impl Factorization {
    /// Multiplies the factorization back together.
    pub fn expand(&self) -> IntPoly {
        let mut out = self.remainder.clone().unwrap_or_else(IntPoly::one);
        for (f, m) in &self.factors {
            out = out.mul(&f.pow(*m));
        }
        out
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (p, m) in &self.factors {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            let needs_parens = p.coeffs().iter().filter(|c| !c.is_zero()).count() > 1;
            if needs_parens {
                write!(f, "({p})")?;
            } else {
                write!(f, "{p}")?;
            }
            if *m > 1 {
                write!(f, "^{m}")?;
            }
        }
        if let Some(r) = &self.remainder {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "({r})")?;
        }
        if first && self.remainder.is_none() {
            write!(f, "1")?;
        }
        Ok(())
    }
}
