//! Sparse matrices over exact rational scalars.
//!
//! Entries are stored in a `BTreeMap` keyed by `(row, col)`, so iteration
//! order (and therefore serialization) is deterministic. Zero entries are
//! never stored.
//!
//! The JSON wire format is
//! `{"rows": r, "cols": c, "entries": [[row, col, "num/den"], ...]}`
//! with entries sorted by `(row, col)`.

use crate::scalar::Scalar;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Default)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Scalar>,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    /// Builds a matrix from dense integer rows. Handy in tests.
    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Matrix::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, Scalar::from_int(v));
            }
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, cols: &[Vec<Scalar>]) -> Self {
        let mut m = Matrix::zero(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
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

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        assert!(r < self.rows && c < self.cols, "index out of range");
        self.entries.get(&(r, c)).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        assert!(r < self.rows && c < self.cols, "index out of range");
        if v.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), v);
        }
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: Scalar) {
        let cur = self.get(r, c);
        self.set(r, c, cur + v);
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v))
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zero(self.cols, self.rows);
        for (r, c, v) in self.iter() {
            t.set(c, r, v.clone());
        }
        t
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        if s.is_zero() {
            return Matrix::zero(self.rows, self.cols);
        }
        let mut m = Matrix::zero(self.rows, self.cols);
        for (r, c, v) in self.iter() {
            m.set(r, c, v * s);
        }
        m
    }

    pub fn neg(&self) -> Matrix {
        self.scale(&-Scalar::one())
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in add");
        let mut m = self.clone();
        for (r, c, v) in other.iter() {
            m.add_to(r, c, v.clone());
        }
        m
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.neg())
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in mul");
        // Group the right factor by row for sparse traversal.
        let mut by_row: BTreeMap<usize, Vec<(usize, &Scalar)>> = BTreeMap::new();
        for (r, c, v) in other.iter() {
            by_row.entry(r).or_default().push((c, v));
        }
        let mut out = Matrix::zero(self.rows, other.cols);
        for (r, k, a) in self.iter() {
            if let Some(row) = by_row.get(&k) {
                for &(c, b) in row {
                    out.add_to(r, c, a * b);
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len(), "shape mismatch in apply");
        let mut out = vec![Scalar::zero(); self.rows];
        for (r, c, a) in self.iter() {
            if !v[c].is_zero() {
                out[r] += a * &v[c];
            }
        }
        out
    }

    pub fn column(&self, c: usize) -> Vec<Scalar> {
        assert!(c < self.cols);
        let mut out = vec![Scalar::zero(); self.rows];
        for (r, cc, v) in self.iter() {
            if cc == c {
                out[r] = v.clone();
            }
        }
        out
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "row mismatch in hstack");
        let mut m = Matrix::zero(self.rows, self.cols + other.cols);
        for (r, c, v) in self.iter() {
            m.set(r, c, v.clone());
        }
        for (r, c, v) in other.iter() {
            m.set(r, c + self.cols, v.clone());
        }
        m
    }

    /// Vertical concatenation, `self` on top.
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols, "col mismatch in vstack");
        let mut m = Matrix::zero(self.rows + other.rows, self.cols);
        for (r, c, v) in self.iter() {
            m.set(r, c, v.clone());
        }
        for (r, c, v) in other.iter() {
            m.set(r + self.rows, c, v.clone());
        }
        m
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn paste(&mut self, r0: usize, c0: usize, block: &Matrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols, "paste out of range");
        for (r, c, v) in block.iter() {
            self.set(r0 + r, c0 + c, v.clone());
        }
    }

    /// Direct sum placed along the diagonal.
    pub fn block_diag(blocks: &[&Matrix]) -> Matrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Matrix::zero(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            m.paste(r0, c0, b);
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }

    /// Kronecker (tensor) product with row-major index pairing:
    /// output index `(i * other.rows + k, j * other.cols + l)` holds
    /// `self[i,j] * other[k,l]`.
    pub fn kronecker(&self, other: &Matrix) -> Matrix {
        let mut m = Matrix::zero(self.rows * other.rows, self.cols * other.cols);
        for (i, j, a) in self.iter() {
            for (k, l, b) in other.iter() {
                m.set(i * other.rows + k, j * other.cols + l, a * b);
            }
        }
        m
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows.min(16) {
            write!(f, "  ")?;
            for c in 0..self.cols.min(16) {
                write!(f, "{} ", self.get(r, c))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixWire {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, Scalar)>,
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let wire = MatrixWire {
            rows: self.rows,
            cols: self.cols,
            entries: self.iter().map(|(r, c, v)| (r, c, v.clone())).collect(),
        };
        wire.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let wire = MatrixWire::deserialize(de)?;
        let mut m = Matrix::zero(wire.rows, wire.cols);
        for (r, c, v) in wire.entries {
            if r >= wire.rows || c >= wire.cols {
                return Err(D::Error::custom(format!(
                    "entry ({r}, {c}) outside a {}x{} matrix",
                    wire.rows, wire.cols
                )));
            }
            if m.entries.contains_key(&(r, c)) {
                return Err(D::Error::custom(format!("duplicate entry at ({r}, {c})")));
            }
            m.set(r, c, v);
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_transpose() {
        let a = Matrix::from_int_rows(&[&[1, 2], &[3, 4]]);
        let b = Matrix::from_int_rows(&[&[0, 1], &[1, 0]]);
        assert_eq!(a.mul(&b), Matrix::from_int_rows(&[&[2, 1], &[4, 3]]));
        assert_eq!(a.transpose(), Matrix::from_int_rows(&[&[1, 3], &[2, 4]]));
        assert_eq!(a.mul(&Matrix::identity(2)), a);
    }

    #[test]
    fn sparse_zero_discipline() {
        let mut m = Matrix::zero(2, 2);
        m.set(0, 0, Scalar::one());
        m.add_to(0, 0, -Scalar::one());
        assert!(m.is_zero_matrix());
        assert_eq!(m.nnz(), 0);
    }

    #[test]
    fn json_round_trip_sorted() {
        let mut m = Matrix::zero(2, 3);
        m.set(1, 2, Scalar::ratio(1, 2));
        m.set(0, 1, Scalar::from_int(-3));
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"rows":2,"cols":3,"entries":[[0,1,"-3"],[1,2,"1/2"]]}"#);
        let back: Matrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn json_rejects_out_of_range() {
        let bad = r#"{"rows":1,"cols":1,"entries":[[0,5,"1"]]}"#;
        assert!(serde_json::from_str::<Matrix>(bad).is_err());
        let dup = r#"{"rows":1,"cols":1,"entries":[[0,0,"1"],[0,0,"2"]]}"#;
        assert!(serde_json::from_str::<Matrix>(dup).is_err());
    }

    #[test]
    fn kronecker_shape() {
        let a = Matrix::from_int_rows(&[&[1, 0], &[0, 1]]);
        let b = Matrix::from_int_rows(&[&[2]]);
        let k = a.kronecker(&b);
        assert_eq!((k.rows(), k.cols()), (2, 2));
        assert_eq!(k.get(0, 0), Scalar::from_int(2));
    }
}
