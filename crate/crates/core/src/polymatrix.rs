//! Dense matrices over the polynomial ring.

use std::collections::HashMap;
use std::fmt;

use crate::error::{ReesError, Result};
use crate::field::Field;
use crate::groebner::Ideal;
use crate::polyring::{Polynomial, RingRef};

#[derive(Clone, PartialEq)]
pub struct PolyMatrix<F: Field> {
    ring: RingRef<F>,
    rows: usize,
    cols: usize,
    entries: Vec<Polynomial<F>>,
}

impl<F: Field> PolyMatrix<F> {
    /// Row-major entries; `entries.len()` must equal `rows * cols`.
    pub fn new(ring: &RingRef<F>, rows: usize, cols: usize, entries: Vec<Polynomial<F>>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(ReesError::Shape(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if entries.iter().any(|e| **e.ring() != **ring) {
            return Err(ReesError::RingMismatch);
        }
        Ok(PolyMatrix {
            ring: ring.clone(),
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(ring: &RingRef<F>, rows: Vec<Vec<Polynomial<F>>>) -> Result<Self> {
        let n = rows.len();
        let c = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != c) {
            return Err(ReesError::Shape("ragged rows".into()));
        }
        Self::new(ring, n, c, rows.into_iter().flatten().collect())
    }

    /// Parses a rectangular array of polynomial strings.
    pub fn parse(ring: &RingRef<F>, rows: &[&[&str]]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|s| Polynomial::parse(s, ring)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(ring, parsed)
    }

    pub fn identity(ring: &RingRef<F>, n: usize) -> Self {
        let entries = (0..n * n)
            .map(|k| {
                if k / n == k % n {
                    Polynomial::one(ring)
                } else {
                    Polynomial::zero(ring)
                }
            })
            .collect();
        PolyMatrix {
            ring: ring.clone(),
            rows: n,
            cols: n,
            entries,
        }
    }

    pub fn ring(&self) -> &RingRef<F> {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Polynomial<F> {
        &self.entries[r * self.cols + c]
    }

    pub fn column(&self, c: usize) -> Vec<Polynomial<F>> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn row(&self, r: usize) -> Vec<Polynomial<F>> {
        self.entries[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    pub fn entries(&self) -> &[Polynomial<F>] {
        &self.entries
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let entries = rows
            .iter()
            .flat_map(|&r| cols.iter().map(move |&c| (r, c)))
            .map(|(r, c)| self.get(r, c).clone())
            .collect();
        PolyMatrix {
            ring: self.ring.clone(),
            rows: rows.len(),
            cols: cols.len(),
            entries,
        }
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        self.submatrix(&(0..self.rows).collect::<Vec<_>>(), cols)
    }

    pub fn delete_row(&self, row: usize) -> Self {
        let rows: Vec<usize> = (0..self.rows).filter(|&r| r != row).collect();
        self.submatrix(&rows, &(0..self.cols).collect::<Vec<_>>())
    }

    /// `[self | other]`.
    pub fn hconcat(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(ReesError::Shape(format!(
                "cannot concatenate {} rows with {} rows",
                self.rows, other.rows
            )));
        }
        let mut entries = Vec::with_capacity(self.entries.len() + other.entries.len());
        for r in 0..self.rows {
            entries.extend(self.row(r));
            entries.extend(other.row(r));
        }
        Ok(PolyMatrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols + other.cols,
            entries,
        })
    }

    /// Appends columns given as vectors of length `rows`.
    pub fn with_columns(&self, columns: &[Vec<Polynomial<F>>]) -> Result<Self> {
        if columns.is_empty() {
            return Ok(self.clone());
        }
        let entries = (0..self.rows)
            .flat_map(|r| columns.iter().map(move |c| c[r].clone()))
            .collect();
        let extra = PolyMatrix::new(&self.ring, self.rows, columns.len(), entries)?;
        self.hconcat(&extra)
    }

    /// Row vector times matrix: `v * self`.
    pub fn left_mul_row(&self, v: &[Polynomial<F>]) -> Result<Vec<Polynomial<F>>> {
        if v.len() != self.rows {
            return Err(ReesError::Shape(format!(
                "row vector of length {} against {} rows",
                v.len(),
                self.rows
            )));
        }
        Ok((0..self.cols)
            .map(|c| {
                v.iter()
                    .enumerate()
                    .fold(Polynomial::zero(&self.ring), |acc, (r, a)| &acc + &(a * self.get(r, c)))
            })
            .collect())
    }

    /// Determinant by cofactor expansion along rows, memoized on the set of
    /// remaining columns.
    pub fn determinant(&self) -> Result<Polynomial<F>> {
        if self.rows != self.cols {
            return Err(ReesError::Shape(format!(
                "determinant of a non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        if self.rows == 0 {
            return Ok(Polynomial::one(&self.ring));
        }
        if self.rows > 30 {
            return Err(ReesError::Shape("determinant size exceeds 30".into()));
        }
        let mut memo = HashMap::new();
        Ok(self.cofactor(0, (1u32 << self.cols) - 1, &mut memo))
    }

    fn cofactor(&self, row: usize, cols: u32, memo: &mut HashMap<u32, Polynomial<F>>) -> Polynomial<F> {
        if row == self.rows {
            return Polynomial::one(&self.ring);
        }
        if let Some(v) = memo.get(&cols) {
            return v.clone();
        }
        let mut acc = Polynomial::zero(&self.ring);
        let mut sign_positive = true;
        for c in 0..self.cols {
            if cols >> c & 1 == 0 {
                continue;
            }
            let entry = self.get(row, c);
            if !entry.is_zero() {
                let minor = self.cofactor(row + 1, cols & !(1 << c), memo);
                let term = entry * &minor;
                acc = if sign_positive { &acc + &term } else { &acc - &term };
            }
            sign_positive = !sign_positive;
        }
        memo.insert(cols, acc.clone());
        acc
    }

    /// All `r x r` minors, row sets then column sets in lexicographic order.
    pub fn minors(&self, r: usize) -> Result<Vec<Polynomial<F>>> {
        if r == 0 || r > self.rows.min(self.cols) {
            return Err(ReesError::Validation(format!(
                "minor size {r} out of range for a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let mut out = Vec::new();
        if r == self.rows && self.cols < 32 {
            // maximal minors share their lower cofactors
            let mut memo = HashMap::new();
            for cols in combinations(self.cols, r) {
                let mask = cols.iter().fold(0u32, |m, &c| m | 1 << c);
                out.push(self.cofactor(0, mask, &mut memo));
            }
            return Ok(out);
        }
        for rows in combinations(self.rows, r) {
            for cols in combinations(self.cols, r) {
                out.push(self.submatrix(&rows, &cols).determinant()?);
            }
        }
        Ok(out)
    }

    /// `I_r(M)`; zero minors are dropped, so the ideal may have no generators.
    pub fn minor_ideal(&self, r: usize) -> Result<Ideal<F>> {
        Ideal::new(&self.ring, self.minors(r)?)
    }

    /// Like [`PolyMatrix::minor_ideal`], but `r` beyond the smaller dimension
    /// yields the zero ideal instead of an error.
    pub fn minor_ideal_or_zero(&self, r: usize) -> Result<Ideal<F>> {
        if r > self.rows.min(self.cols) {
            return Ok(Ideal::zero(&self.ring));
        }
        self.minor_ideal(r)
    }

    /// Signed maximal minors `(-1)^(i+1) det(M without row i)` of an
    /// `m x (m-1)` matrix; with this signing `[a_1 .. a_m] * M = 0`.
    pub fn hilbert_burch_generators(&self) -> Result<Vec<Polynomial<F>>> {
        if self.rows < 2 || self.cols + 1 != self.rows {
            return Err(ReesError::Shape(format!(
                "Hilbert-Burch matrix must be m x (m-1), got {}x{}",
                self.rows, self.cols
            )));
        }
        (0..self.rows)
            .map(|i| {
                let det = self.delete_row(i).determinant()?;
                Ok(if i % 2 == 0 { det } else { det.neg() })
            })
            .collect()
    }
}

impl<F: Field> fmt::Display for PolyMatrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.entries.iter().map(|e| e.to_compact_string()).collect();
        let width = cells.iter().map(|s| s.len()).max().unwrap_or(1);
        for r in 0..self.rows {
            let line: Vec<String> = (0..self.cols)
                .map(|c| format!("{:<width$}", cells[r * self.cols + c]))
                .collect();
            writeln!(f, "{}", line.join("  ").trim_end())?;
        }
        Ok(())
    }
}

impl<F: Field> fmt::Debug for PolyMatrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyMatrix {}x{}\n{}", self.rows, self.cols, self)
    }
}

/// `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(pos) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return out;
        };
        idx[pos] += 1;
        for j in pos + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
