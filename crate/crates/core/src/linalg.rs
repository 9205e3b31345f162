//! Dense matrices over `F_q` and the matrix families used by the protocols.
//!
//! [`mat_vec_mul`] is the reference product `x · A` that every protocol run
//! is checked against.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gf::{Fe, PrimeField};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixFq {
    field: PrimeField,
    rows: usize,
    cols: usize,
    entries: Vec<Fe>,
}

impl MatrixFq {
    pub fn new(field: &PrimeField, rows: usize, cols: usize, entries: Vec<Fe>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionError(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|e| !field.contains(**e)) {
            return Err(Error::FieldMismatch {
                left: field.modulus(),
                right: bad.modulus(),
            });
        }
        Ok(Self {
            field: field.clone(),
            rows,
            cols,
            entries,
        })
    }

    pub fn from_fn(
        field: &PrimeField,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Fe,
    ) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self {
            field: field.clone(),
            rows,
            cols,
            entries,
        }
    }

    /// Builds a matrix from integer rows, reducing every entry mod `q`.
    pub fn from_rows(field: &PrimeField, rows: &[Vec<u64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionError("ragged rows".into()));
        }
        Ok(Self::from_fn(field, rows.len(), cols, |i, j| field.elem(rows[i][j])))
    }

    pub fn zeros(field: &PrimeField, rows: usize, cols: usize) -> Self {
        Self::from_fn(field, rows, cols, |_, _| field.zero())
    }

    pub fn identity(field: &PrimeField, n: usize) -> Self {
        Self::from_fn(field, n, n, |i, j| if i == j { field.one() } else { field.zero() })
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
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

    pub fn get(&self, i: usize, j: usize) -> Fe {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Fe) {
        assert!(self.field.contains(v));
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Fe] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Fe> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn entries(&self) -> &[Fe] {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(&self.field, self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Column slice `[start, start + width)`.
    pub fn columns(&self, start: usize, width: usize) -> Self {
        Self::from_fn(&self.field, self.rows, width, |i, j| self.get(i, start + j))
    }

    /// Row permutation: row `i` of the result is row `perm[i]` of `self`.
    pub fn permute_rows(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.rows);
        Self::from_fn(&self.field, self.rows, self.cols, |i, j| self.get(perm[i], j))
    }

    pub fn mul(&self, other: &MatrixFq) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionError(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field.modulus(),
                right: other.field.modulus(),
            });
        }
        let zero = self.field.zero();
        Ok(Self::from_fn(&self.field, self.rows, other.cols, |i, j| {
            (0..self.cols).fold(zero, |acc, l| acc + self.get(i, l) * other.get(l, j))
        }))
    }

    /// Gauss-Jordan inverse. Pivots on the first nonzero entry of each column.
    pub fn invert(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionError(format!(
                "cannot invert a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(&self.field, n);
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a.get(r, col).is_zero())
                .ok_or(Error::SingularMatrix)?;
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let scale = a.get(col, col).inv()?;
            a.scale_row(col, scale);
            inv.scale_row(col, scale);
            for r in 0..n {
                let factor = a.get(r, col);
                if r != col && !factor.is_zero() {
                    a.axpy_row(r, col, factor);
                    inv.axpy_row(r, col, factor);
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, r: usize, s: Fe) {
        for v in &mut self.entries[r * self.cols..(r + 1) * self.cols] {
            *v = *v * s;
        }
    }

    // row[dst] -= factor * row[src]
    fn axpy_row(&mut self, dst: usize, src: usize, factor: Fe) {
        for j in 0..self.cols {
            let v = self.get(dst, j) - factor * self.get(src, j);
            self.entries[dst * self.cols + j] = v;
        }
    }

    /// Serializes as `q rows cols` followed by one line of residues per row.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.field.modulus(), self.rows, self.cols);
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|v| v.value().to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty matrix file".into()))?;
        let head: Vec<u64> = header
            .split(' ')
            .map(|t| t.parse::<u64>().map_err(|e| Error::Parse(format!("header `{header}`: {e}"))))
            .collect::<Result<_>>()?;
        let [q, rows, cols] = head[..] else {
            return Err(Error::Parse(format!("header `{header}` must be `q rows cols`")));
        };
        let field = PrimeField::new(q)?;
        let (rows, cols) = (rows as usize, cols as usize);
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing row {i}")))?;
            let vals = if line.is_empty() { Vec::new() } else { line.split(' ').collect() };
            if vals.len() != cols {
                return Err(Error::Parse(format!("row {i} has {} entries, expected {cols}", vals.len())));
            }
            for t in vals {
                let v: u64 = t.parse().map_err(|e| Error::Parse(format!("row {i}: `{t}`: {e}")))?;
                if v >= q {
                    return Err(Error::Parse(format!("row {i}: {v} is not a residue mod {q}")));
                }
                entries.push(field.elem(v));
            }
        }
        if lines.any(|l| !l.is_empty()) {
            return Err(Error::Parse("trailing data after last row".into()));
        }
        Self::new(&field, rows, cols, entries)
    }
}

/// Row-vector product `x · A`.
pub fn mat_vec_mul(x: &[Fe], a: &MatrixFq) -> Result<Vec<Fe>> {
    if x.len() != a.rows {
        return Err(Error::DimensionError(format!(
            "vector of length {} times {}x{} matrix",
            x.len(),
            a.rows,
            a.cols
        )));
    }
    if let Some(bad) = x.iter().find(|v| !a.field.contains(**v)) {
        return Err(Error::FieldMismatch {
            left: a.field.modulus(),
            right: bad.modulus(),
        });
    }
    let zero = a.field.zero();
    Ok((0..a.cols)
        .map(|j| x.iter().enumerate().fold(zero, |acc, (i, &xi)| acc + xi * a.get(i, j)))
        .collect())
}

fn ensure_distinct(points: &[Fe]) -> Result<()> {
    let mut sorted: Vec<u32> = points.iter().map(|p| p.value()).collect();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DuplicatePoints);
    }
    Ok(())
}

/// `V[i][j] = points[j]^i`.
pub fn vandermonde(field: &PrimeField, points: &[Fe]) -> Result<MatrixFq> {
    if let Some(bad) = points.iter().find(|p| !field.contains(**p)) {
        return Err(Error::FieldMismatch {
            left: field.modulus(),
            right: bad.modulus(),
        });
    }
    ensure_distinct(points)?;
    let n = points.len();
    Ok(MatrixFq::from_fn(field, n, n, |i, j| points[j].pow(i as u64)))
}

/// The `K x K` DFT matrix `D[i][j] = beta^(i*j)` for the primitive root `beta`.
pub fn dft_matrix(field: &PrimeField, k: usize) -> Result<MatrixFq> {
    let beta = field.root_of_unity(k)?;
    Ok(MatrixFq::from_fn(field, k, k, |i, j| beta.pow((i * j % k) as u64)))
}

/// `L[i][j] = Phi_i(alpha_j)` where `Phi_i` is the Lagrange basis polynomial
/// on the nodes `omega`. Evaluated from the product formula directly.
pub fn lagrange_matrix(field: &PrimeField, omega: &[Fe], alpha: &[Fe]) -> Result<MatrixFq> {
    if omega.len() != alpha.len() {
        return Err(Error::DimensionError(format!(
            "{} interpolation nodes vs {} evaluation points",
            omega.len(),
            alpha.len()
        )));
    }
    ensure_distinct(omega)?;
    let n = omega.len();
    // denominators prod_{l != i} (omega_i - omega_l)
    let denom_inv: Vec<Fe> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&l| l != i)
                .fold(field.one(), |acc, l| acc * (omega[i] - omega[l]))
                .inv()
        })
        .collect::<Result<_>>()?;
    Ok(MatrixFq::from_fn(field, n, n, |i, j| {
        let num = (0..n)
            .filter(|&l| l != i)
            .fold(field.one(), |acc, l| acc * (alpha[j] - omega[l]));
        num * denom_inv[i]
    }))
}

/// Reverses the `digits` base-`base` digits of `k`.
pub fn digit_reverse(k: usize, digits: usize, base: usize) -> Result<usize> {
    let limit = base.checked_pow(digits as u32).unwrap_or(usize::MAX);
    if k >= limit {
        return Err(Error::OutOfRange {
            value: k,
            digits,
            base,
        });
    }
    let (mut k, mut out) = (k, 0);
    for _ in 0..digits {
        out = out * base + k % base;
        k /= base;
    }
    Ok(out)
}

/// SplitMix64 with the standard increment and mixing constants.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform residue in `[0, q)` by rejection sampling.
    pub fn next_below(&mut self, q: u64) -> u64 {
        let limit = u64::MAX - u64::MAX % q;
        loop {
            let v = self.next_u64();
            if v < limit {
                return v % q;
            }
        }
    }

    pub fn next_fe(&mut self, field: &PrimeField) -> Fe {
        field.elem(self.next_below(field.modulus() as u64))
    }
}

/// Seeded pseudo-random matrix, filled in row-major order.
pub fn random_matrix(field: &PrimeField, rows: usize, cols: usize, seed: u64) -> MatrixFq {
    let mut rng = SplitMix64::new(seed);
    MatrixFq::from_fn(field, rows, cols, |_, _| rng.next_fe(field))
}

pub fn random_vector(field: &PrimeField, len: usize, seed: u64) -> Vec<Fe> {
    let mut rng = SplitMix64::new(seed);
    (0..len).map(|_| rng.next_fe(field)).collect()
}

/// Parses the vector form of the matrix file (a single row).
pub fn vector_from_text(text: &str) -> Result<Vec<Fe>> {
    let m = MatrixFq::from_text(text)?;
    if m.rows() != 1 {
        return Err(Error::Parse(format!("vector file has {} rows, expected 1", m.rows())));
    }
    Ok(m.row(0).to_vec())
}

pub fn vector_to_text(field: &PrimeField, x: &[Fe]) -> Result<String> {
    Ok(MatrixFq::new(field, 1, x.len(), x.to_vec())?.to_text())
}
