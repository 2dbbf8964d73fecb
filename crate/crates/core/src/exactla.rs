//! Exact rational scalars, dense matrices and the handful of elimination
//! routines the algebraic checks are built on.
//!
//! Everything here is exact. Floating point only enters in [`crate::probe`].

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num::{BigInt, One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ParseRationalError;

/// Exact rational scalar, always kept in lowest terms with a positive denominator.
pub type Rational = num::BigRational;

/// A column vector of rationals.
pub type RatVector = Vec<Rational>;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Parses `"p/q"` or `"p"` in base ten. A leading `-` or `−` (U+2212) negates.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let trimmed = text.trim();
    let (negative, body) = if let Some(rest) = trimmed.strip_prefix('-') {
        (true, rest)
    } else if let Some(rest) = trimmed.strip_prefix('\u{2212}') {
        (true, rest)
    } else {
        (false, trimmed)
    };
    let bad = || ParseRationalError(text.to_string());
    let digits_only = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    let (numer, denom) = match body.split_once('/') {
        Some((p, q)) => (p, q),
        None => (body, "1"),
    };
    if !digits_only(numer) || !digits_only(denom) {
        return Err(bad());
    }
    let numer: BigInt = numer.parse().map_err(|_| bad())?;
    let denom: BigInt = denom.parse().map_err(|_| bad())?;
    if denom.is_zero() {
        return Err(bad());
    }
    let value = Rational::new(numer, denom);
    Ok(if negative { -value } else { value })
}

/// Formats as `"p/q"`, or `"p"` when the denominator is one.
pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

pub fn rational_to_f64(value: &Rational) -> f64 {
    use num::ToPrimitive;
    value.to_f64().unwrap_or(f64::NAN)
}

/// Serde adapter for a single rational stored as a string.
pub mod rational_string {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

fn bit_size(value: &Rational) -> u64 {
    value.numer().bits() + value.denom().bits()
}

/// Dense row-major matrix of exact rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must equal rows*cols");
        RatMatrix { rows, cols, entries }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, entries: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            entries.extend(row.iter().map(|&v| int(v)));
        }
        RatMatrix::new(r, c, entries)
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            entries.extend(row);
        }
        RatMatrix::new(r, c, entries)
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(height: usize, columns: &[RatVector]) -> Self {
        let mut m = Self::zeros(height, columns.len());
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), height);
            for (r, v) in col.iter().enumerate() {
                m[(r, c)] = v.clone();
            }
        }
        m
    }

    /// `u vᵀ`.
    pub fn outer(u: &[Rational], v: &[Rational]) -> Self {
        let mut m = Self::zeros(u.len(), v.len());
        for (i, a) in u.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in v.iter().enumerate() {
                m[(i, j)] = a * b;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    /// Row-major flattening, the vectorization used for span and rank tests.
    pub fn to_vector(&self) -> RatVector {
        self.entries.clone()
    }

    pub fn from_vector(rows: usize, cols: usize, v: &[Rational]) -> Self {
        RatMatrix::new(rows, cols, v.to_vec())
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> RatVector {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        RatMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|v| v * factor).collect() }
    }

    pub fn mul_vec(&self, v: &[Rational]) -> RatVector {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// Commutator `AB - BA`.
    pub fn bracket(&self, other: &RatMatrix) -> Self {
        &(self * other) - &(other * self)
    }

    /// Copies out the `rows × cols` block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        let mut b = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                b[(r, c)] = self[(r0 + r, c0 + c)].clone();
            }
        }
        b
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &RatMatrix) {
        for r in 0..block.rows {
            for c in 0..block.cols {
                self[(r0 + r, c0 + c)] = block[(r, c)].clone();
            }
        }
    }

    /// Block-diagonal direct sum of square or rectangular pieces.
    pub fn direct_sum(parts: &[RatMatrix]) -> Self {
        let rows = parts.iter().map(RatMatrix::rows).sum();
        let cols = parts.iter().map(RatMatrix::cols).sum();
        let mut m = Self::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for p in parts {
            m.set_block(r0, c0, p);
            r0 += p.rows;
            c0 += p.cols;
        }
        m
    }

    /// Iterates over nonzero entries as `(row, col, value)`.
    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, usize, &Rational)> + '_ {
        let cols = self.cols;
        self.entries.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(move |(k, v)| (k / cols, k % cols, v))
    }

    /// Largest absolute entry, zero for an empty or zero matrix.
    pub fn max_abs(&self) -> Rational {
        self.entries.iter().map(|v| v.abs()).max().unwrap_or_else(Rational::zero)
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|r| self.row(r).iter().map(rational_to_f64).collect()).collect()
    }

    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|r| self.row(r).iter().map(format_rational).collect()).collect()
    }

    pub fn from_string_rows(rows: &[Vec<String>]) -> Result<Self, ParseRationalError> {
        let parsed = rows
            .iter()
            .map(|row| row.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(first) = parsed.first() {
            if parsed.iter().any(|row| row.len() != first.len()) {
                return Err(ParseRationalError("ragged matrix rows".into()));
            }
        }
        Ok(Self::from_rows(parsed))
    }

    /// Reduced row echelon form with the pivot columns, in order.
    ///
    /// Among the nonzero candidates in a column the pivot is the entry with the
    /// smallest numerator+denominator bit length, which keeps fractions short.
    pub fn row_reduce(&self) -> Echelon {
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut prow = 0;
        for col in 0..a.cols {
            if prow == a.rows {
                break;
            }
            let best = (prow..a.rows).filter(|&r| !a[(r, col)].is_zero()).min_by_key(|&r| bit_size(&a[(r, col)]));
            let Some(best) = best else { continue };
            a.swap_rows(prow, best);
            let inv = a[(prow, col)].recip();
            for c in col..a.cols {
                let v = &a[(prow, c)] * &inv;
                a[(prow, c)] = v;
            }
            for r in 0..a.rows {
                if r == prow || a[(r, col)].is_zero() {
                    continue;
                }
                let factor = a[(r, col)].clone();
                for c in col..a.cols {
                    if a[(prow, c)].is_zero() {
                        continue;
                    }
                    let delta = &factor * &a[(prow, c)];
                    a[(r, c)] -= delta;
                }
            }
            pivots.push(col);
            prow += 1;
        }
        Echelon { reduced: a, pivots }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        self.row_reduce().pivots.len()
    }

    /// A basis of `{v : M v = 0}`; one vector per free column, in column order.
    pub fn kernel_basis(&self) -> Vec<RatVector> {
        let Echelon { reduced, pivots } = self.row_reduce();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![Rational::zero(); self.cols];
                v[free] = Rational::one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = -reduced[(r, free)].clone();
                }
                v
            })
            .collect()
    }

    /// Some exact solution of `M x = rhs`, or `None` when the system is inconsistent.
    pub fn solve(&self, rhs: &[Rational]) -> Option<RatVector> {
        assert_eq!(rhs.len(), self.rows);
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        aug.set_block(0, 0, self);
        for (r, v) in rhs.iter().enumerate() {
            aug[(r, self.cols)] = v.clone();
        }
        let Echelon { reduced, pivots } = aug.row_reduce();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (r, &p) in pivots.iter().enumerate() {
            x[p] = reduced[(r, self.cols)].clone();
        }
        Some(x)
    }

    /// Inverse, or `None` if singular.
    pub fn inverse(&self) -> Option<RatMatrix> {
        assert!(self.is_square());
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        aug.set_block(0, 0, self);
        aug.set_block(0, n, &Self::identity(n));
        let Echelon { reduced, pivots } = aug.row_reduce();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        Some(reduced.block(0, n, n, n))
    }

    pub fn pow(&self, exponent: usize) -> RatMatrix {
        assert!(self.is_square());
        let mut acc = Self::identity(self.rows);
        for _ in 0..exponent {
            acc = &acc * self;
        }
        acc
    }
}

/// Result of [`RatMatrix::row_reduce`].
#[derive(Clone, Debug)]
pub struct Echelon {
    pub reduced: RatMatrix,
    pub pivots: Vec<usize>,
}

impl Index<(usize, usize)> for RatMatrix {
    type Output = Rational;

    fn index(&self, (r, c): (usize, usize)) -> &Rational {
        debug_assert!(r < self.rows && c < self.cols);
        &self.entries[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Rational {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.entries[r * self.cols + c]
    }
}

impl Mul for &RatMatrix {
    type Output = RatMatrix;

    fn mul(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut out = RatMatrix::zeros(self.rows, rhs.cols);
        for (i, k, a) in self.nonzeros() {
            for j in 0..rhs.cols {
                let b = &rhs[(k, j)];
                if !b.is_zero() {
                    out[(i, j)] += a * b;
                }
            }
        }
        out
    }
}

impl Add for &RatMatrix {
    type Output = RatMatrix;

    fn add(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &RatMatrix {
    type Output = RatMatrix;

    fn sub(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &RatMatrix {
    type Output = RatMatrix;

    fn neg(self) -> RatMatrix {
        RatMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|v| -v).collect() }
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for row in self.to_string_rows() {
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Serialize for RatMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_string_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(d)?;
        RatMatrix::from_string_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// Polynomial with rational coefficients, lowest degree first.
/// The zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// `tᵏ`.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = Rational::one();
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(One::is_one)
    }

    pub fn eval_matrix(&self, m: &RatMatrix) -> RatMatrix {
        let mut acc = RatMatrix::zeros(m.rows(), m.cols());
        // Horner
        for c in self.coeffs.iter().rev() {
            acc = &acc * m;
            for i in 0..m.rows() {
                acc[(i, i)] += c;
            }
        }
        acc
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut terms = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let coeff = if c.is_one() && k > 0 { String::new() } else { format!("({c})") };
            terms.push(match k {
                0 => format_rational(c),
                1 => format!("{coeff}t"),
                _ => format!("{coeff}t^{k}"),
            });
        }
        write!(f, "{}", terms.join(" + "))
    }
}

/// `[L⁰, L¹, …, Lᵈ]`.
pub fn matrix_powers(l: &RatMatrix, d: usize) -> Vec<RatMatrix> {
    assert!(l.is_square(), "matrix_powers needs a square matrix");
    let mut out = Vec::with_capacity(d + 1);
    out.push(RatMatrix::identity(l.rows()));
    for k in 1..=d {
        let next = &out[k - 1] * l;
        out.push(next);
    }
    out
}

/// Monic polynomial of least degree annihilating `l`, found by testing
/// `I, L, L², …` for the first linear dependence.
pub fn minimal_polynomial(l: &RatMatrix) -> Poly {
    assert!(l.is_square(), "minimal_polynomial needs a square matrix");
    let n = l.rows();
    let mut powers = vec![RatMatrix::identity(n)];
    for d in 1..=n.max(1) {
        let next = &powers[d - 1] * l;
        powers.push(next);
        let columns: Vec<RatVector> = powers.iter().map(RatMatrix::to_vector).collect();
        let kernel = RatMatrix::from_columns(n * n, &columns).kernel_basis();
        if let Some(v) = kernel.into_iter().next() {
            let lead = v[d].clone();
            debug_assert!(!lead.is_zero());
            return Poly::new(v.iter().map(|c| c / &lead).collect());
        }
    }
    // Only reachable for n == 0, where the empty matrix is annihilated by 1.
    Poly::new(vec![Rational::one()])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jordan(n: usize) -> RatMatrix {
        let mut m = RatMatrix::zeros(n, n);
        for i in 0..n.saturating_sub(1) {
            m[(i, i + 1)] = int(1);
        }
        m
    }

    #[test]
    fn rank_examples() {
        assert_eq!(RatMatrix::identity(3).rank(), 3);
        assert_eq!(RatMatrix::zeros(2, 5).rank(), 0);
        assert_eq!(RatMatrix::from_i64_rows(&[&[1, 2], &[2, 4]]).rank(), 1);
    }

    #[test]
    fn kernel_examples() {
        assert!(RatMatrix::identity(4).kernel_basis().is_empty());
        let k = RatMatrix::zeros(2, 2).kernel_basis();
        assert_eq!(k.len(), 2);
        assert_eq!(RatMatrix::from_columns(2, &k).rank(), 2);

        let k = RatMatrix::from_i64_rows(&[&[1, 1]]).kernel_basis();
        assert_eq!(k.len(), 1);
        assert_eq!(&k[0][0] + &k[0][1], int(0));
        assert!(!k[0][0].is_zero());
    }

    #[test]
    fn minimal_polynomial_examples() {
        for n in 1..=5 {
            assert_eq!(minimal_polynomial(&jordan(n)), Poly::monomial(n));
        }
        let blocks = RatMatrix::direct_sum(&[jordan(2), jordan(3)]);
        assert_eq!(minimal_polynomial(&blocks), Poly::monomial(3));

        let lambda = rat(-7, 3);
        for n in 1..=4 {
            let l = RatMatrix::identity(n).scale(&lambda);
            assert_eq!(minimal_polynomial(&l), Poly::new(vec![-lambda.clone(), int(1)]));
        }
    }

    #[test]
    fn minimal_polynomial_of_mixed_spectrum() {
        // diag(1, J2 + 2I): (t-1)(t-2)^2 = t^3 - 5t^2 + 8t - 4
        let mut l =
            RatMatrix::direct_sum(&[RatMatrix::identity(1), &jordan(2) + &RatMatrix::identity(2).scale(&int(2))]);
        let p = minimal_polynomial(&l);
        assert_eq!(p.coeffs(), &[int(-4), int(8), int(-5), int(1)]);
        assert!(p.eval_matrix(&l).is_zero());
        l[(0, 0)] = int(2);
        assert_eq!(minimal_polynomial(&l).degree(), Some(2));
    }

    #[test]
    fn matrix_powers_examples() {
        let l = RatMatrix::from_i64_rows(&[&[5, 1], &[0, 3]]);
        assert_eq!(matrix_powers(&l, 0), vec![RatMatrix::identity(2)]);
        assert_eq!(matrix_powers(&jordan(2), 2), vec![RatMatrix::identity(2), jordan(2), RatMatrix::zeros(2, 2)]);
        let d = RatMatrix::from_i64_rows(&[&[2]]);
        let p: Vec<_> = matrix_powers(&d, 3).iter().map(|m| m[(0, 0)].clone()).collect();
        assert_eq!(p, vec![int(1), int(2), int(4), int(8)]);
    }

    #[test]
    fn rational_strings() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-4").unwrap(), int(-4));
        assert_eq!(parse_rational("\u{2212}2/3").unwrap(), rat(-2, 3));
        assert_eq!(parse_rational("0/5").unwrap(), int(0));
        for bad in ["", "1/0", "a", "1/2/3", "--1", "1.5", "/2", "+-1"] {
            assert!(parse_rational(bad).is_err(), "{bad:?} should not parse");
        }
        assert_eq!(format_rational(&rat(6, -4)), "-3/2");
        assert_eq!(format_rational(&int(7)), "7");
    }

    #[test]
    fn solve_and_inverse() {
        let m = RatMatrix::from_i64_rows(&[&[2, 1], &[1, 1]]);
        let x = m.solve(&[int(3), int(2)]).unwrap();
        assert_eq!(x, vec![int(1), int(1)]);
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, RatMatrix::identity(2));
        let singular = RatMatrix::from_i64_rows(&[&[1, 2], &[2, 4]]);
        assert!(singular.inverse().is_none());
        assert!(singular.solve(&[int(1), int(0)]).is_none());
    }
}
