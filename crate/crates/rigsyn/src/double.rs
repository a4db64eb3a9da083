//! Double complexes with anticommuting differentials and their totalization.
//!
//! A double complex here stores spaces `C^{p,q}` with a horizontal
//! differential `dh: C^{p,q} → C^{p+1,q}` and a vertical one
//! `dv: C^{p,q} → C^{p,q+1}` satisfying `dh² = 0`, `dv² = 0`, and
//! `dh dv + dv dh = 0`, so the total differential `dh + dv` squares to zero
//! with no extra signs.

use crate::complex::{ChainMap, Complex};
use crate::error::Error;
use crate::matrix::Matrix;
use crate::Result;
use std::collections::BTreeMap;

#[derive(Clone, Debug)]
pub struct DoubleComplex {
    dims: BTreeMap<(i64, i64), usize>,
    dh: BTreeMap<(i64, i64), Matrix>,
    dv: BTreeMap<(i64, i64), Matrix>,
}

impl DoubleComplex {
    /// Builds a double complex, checking shapes, both square-zero laws, and
    /// anticommutation of the two differentials.
    pub fn new(
        dims: BTreeMap<(i64, i64), usize>,
        dh: BTreeMap<(i64, i64), Matrix>,
        dv: BTreeMap<(i64, i64), Matrix>,
    ) -> Result<Self> {
        let dims: BTreeMap<(i64, i64), usize> =
            dims.into_iter().filter(|&(_, d)| d > 0).collect();
        let dim_at = |p: i64, q: i64| dims.get(&(p, q)).copied().unwrap_or(0);
        let keep = |map: BTreeMap<(i64, i64), Matrix>,
                        dp: i64,
                        dq: i64,
                        what: &'static str|
         -> Result<BTreeMap<(i64, i64), Matrix>> {
            let mut kept = BTreeMap::new();
            for ((p, q), m) in map {
                if m.rows() != dim_at(p + dp, q + dq) || m.cols() != dim_at(p, q) {
                    return Err(Error::invalid(
                        what,
                        format!(
                            "at ({p},{q}): got {}x{}, expected {}x{}",
                            m.rows(),
                            m.cols(),
                            dim_at(p + dp, q + dq),
                            dim_at(p, q)
                        ),
                    ));
                }
                if m.rows() > 0 && m.cols() > 0 {
                    kept.insert((p, q), m);
                }
            }
            Ok(kept)
        };
        let dh = keep(dh, 1, 0, "horizontal differential shape")?;
        let dv = keep(dv, 0, 1, "vertical differential shape")?;
        let dc = DoubleComplex { dims, dh, dv };
        for &(p, q) in dc.dims.keys() {
            if !dc.dh(p + 1, q).mul(&dc.dh(p, q)).is_zero_matrix() {
                return Err(Error::invalid(
                    "horizontal square",
                    format!("dh² ≠ 0 starting at ({p},{q})"),
                ));
            }
            if !dc.dv(p, q + 1).mul(&dc.dv(p, q)).is_zero_matrix() {
                return Err(Error::invalid(
                    "vertical square",
                    format!("dv² ≠ 0 starting at ({p},{q})"),
                ));
            }
            let mixed = dc
                .dv(p + 1, q)
                .mul(&dc.dh(p, q))
                .add(&dc.dh(p, q + 1).mul(&dc.dv(p, q)));
            if !mixed.is_zero_matrix() {
                return Err(Error::invalid(
                    "anticommutation",
                    format!("dh dv + dv dh ≠ 0 starting at ({p},{q})"),
                ));
            }
        }
        Ok(dc)
    }

    /// Assembles a double complex from a finite sequence of complexes and
    /// horizontal chain maps `horiz[p]: cols[p] → cols[p+1]` composing to
    /// zero. Column `p` sits at horizontal degree `p`; the vertical
    /// differential of column `p` is multiplied by `(−1)^p` so that the
    /// squares anticommute.
    pub fn from_complex_of_complexes(cols: &[Complex], horiz: &[ChainMap]) -> Result<Self> {
        if !cols.is_empty() && horiz.len() + 1 != cols.len() {
            return Err(Error::invalid(
                "column count",
                format!("{} columns need {} maps, got {}", cols.len(), cols.len() - 1, horiz.len()),
            ));
        }
        for (p, f) in horiz.iter().enumerate() {
            if f.source() != &cols[p] || f.target() != &cols[p + 1] {
                return Err(Error::invalid(
                    "horizontal map endpoints",
                    format!("map {p} does not join columns {p} and {}", p + 1),
                ));
            }
        }
        for p in 1..horiz.len() {
            let square = horiz[p].compose(&horiz[p - 1])?;
            let (lo, hi) = cols[p - 1].support();
            for n in lo..=hi {
                if !square.comp(n).is_zero_matrix() {
                    return Err(Error::invalid(
                        "horizontal square",
                        format!("maps {} then {} do not compose to zero", p - 1, p),
                    ));
                }
            }
        }

        let mut dims = BTreeMap::new();
        let mut dh = BTreeMap::new();
        let mut dv = BTreeMap::new();
        for (p, col) in cols.iter().enumerate() {
            let p = p as i64;
            for (&q, &dim) in col.dims() {
                dims.insert((p, q), dim);
            }
            let (lo, hi) = col.support();
            for q in lo..=hi {
                let m = col.d(q);
                let m = if p.rem_euclid(2) == 1 { m.neg() } else { m };
                dv.insert((p, q), m);
            }
        }
        for (p, f) in horiz.iter().enumerate() {
            let (lo, hi) = cols[p].support();
            for q in lo..=hi {
                dh.insert((p as i64, q), f.comp(q));
            }
        }
        DoubleComplex::new(dims, dh, dv)
    }

    pub fn dim(&self, p: i64, q: i64) -> usize {
        self.dims.get(&(p, q)).copied().unwrap_or(0)
    }

    pub fn dims(&self) -> &BTreeMap<(i64, i64), usize> {
        &self.dims
    }

    pub fn dh(&self, p: i64, q: i64) -> Matrix {
        match self.dh.get(&(p, q)) {
            Some(m) => m.clone(),
            None => Matrix::zero(self.dim(p + 1, q), self.dim(p, q)),
        }
    }

    pub fn dv(&self, p: i64, q: i64) -> Matrix {
        match self.dv.get(&(p, q)) {
            Some(m) => m.clone(),
            None => Matrix::zero(self.dim(p, q + 1), self.dim(p, q)),
        }
    }

    /// Totalization: `Tot^n = ⊕_{p+q=n} C^{p,q}` with differential
    /// `dh + dv`, plus the block layout for moving vectors in and out.
    pub fn tot(&self) -> TotComplex {
        let mut layout: BTreeMap<i64, Vec<TotBlock>> = BTreeMap::new();
        for (&(p, q), &dim) in &self.dims {
            layout.entry(p + q).or_default().push(TotBlock { p, q, offset: 0, dim });
        }
        for blocks in layout.values_mut() {
            blocks.sort_by_key(|b| b.p);
            let mut off = 0;
            for b in blocks.iter_mut() {
                b.offset = off;
                off += b.dim;
            }
        }

        let offset_of = |layout: &BTreeMap<i64, Vec<TotBlock>>, p: i64, q: i64| -> Option<usize> {
            layout
                .get(&(p + q))?
                .iter()
                .find(|b| b.p == p)
                .map(|b| b.offset)
        };

        let mut dims = BTreeMap::new();
        let mut d = BTreeMap::new();
        for (&n, blocks) in &layout {
            dims.insert(n, blocks.iter().map(|b| b.dim).sum());
        }
        for (&n, blocks) in &layout {
            let rows = layout
                .get(&(n + 1))
                .map_or(0, |bs| bs.iter().map(|b| b.dim).sum());
            let cols: usize = blocks.iter().map(|b| b.dim).sum();
            if rows == 0 || cols == 0 {
                continue;
            }
            let mut m = Matrix::zero(rows, cols);
            for b in blocks {
                if let Some(r) = offset_of(&layout, b.p + 1, b.q) {
                    m.paste(r, b.offset, &self.dh(b.p, b.q));
                }
                if let Some(r) = offset_of(&layout, b.p, b.q + 1) {
                    m.paste(r, b.offset, &self.dv(b.p, b.q));
                }
            }
            d.insert(n, m);
        }
        let complex =
            Complex::new(dims, d).expect("totalization of a double complex is a complex");
        TotComplex { complex, layout }
    }
}

/// One `(p, q)` block inside a total degree of a totalization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TotBlock {
    pub p: i64,
    pub q: i64,
    pub offset: usize,
    pub dim: usize,
}

/// A totalized double complex with its block layout.
#[derive(Clone, Debug)]
pub struct TotComplex {
    pub complex: Complex,
    layout: BTreeMap<i64, Vec<TotBlock>>,
}

impl TotComplex {
    pub fn blocks(&self, n: i64) -> &[TotBlock] {
        self.layout.get(&n).map_or(&[], |v| v.as_slice())
    }

    pub fn block(&self, p: i64, q: i64) -> Option<TotBlock> {
        self.layout
            .get(&(p + q))?
            .iter()
            .find(|b| b.p == p)
            .copied()
    }

    /// Embeds a vector living in block `(p, q)` into total degree `p + q`.
    pub fn embed(&self, p: i64, q: i64, v: &[crate::Scalar]) -> Vec<crate::Scalar> {
        let n = p + q;
        let total = self.complex.dim(n);
        let mut out = vec![crate::Scalar::zero(); total];
        if let Some(b) = self.block(p, q) {
            assert_eq!(v.len(), b.dim, "block dimension mismatch");
            out[b.offset..b.offset + b.dim].clone_from_slice(v);
        } else {
            assert!(v.is_empty(), "nonzero vector for an absent block");
        }
        out
    }

    /// Extracts the `(p, q)` component of a vector in total degree `p + q`.
    pub fn extract(&self, p: i64, q: i64, v: &[crate::Scalar]) -> Vec<crate::Scalar> {
        match self.block(p, q) {
            Some(b) => v[b.offset..b.offset + b.dim].to_vec(),
            None => Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_commuting_squares() {
        // A unit square of lines with all maps the identity commutes, so the
        // constructor must reject it.
        let mut dims = BTreeMap::new();
        for pq in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            dims.insert(pq, 1);
        }
        let mut dh = BTreeMap::new();
        dh.insert((0, 0), Matrix::identity(1));
        dh.insert((0, 1), Matrix::identity(1));
        let mut dv = BTreeMap::new();
        dv.insert((0, 0), Matrix::identity(1));
        dv.insert((1, 0), Matrix::identity(1));
        assert!(DoubleComplex::new(dims.clone(), dh.clone(), dv.clone()).is_err());

        // Negating one vertical edge fixes it.
        dv.insert((1, 0), Matrix::identity(1).neg());
        let dc = DoubleComplex::new(dims, dh, dv).unwrap();
        let tot = dc.tot();
        assert_eq!(tot.complex.dim(0), 1);
        assert_eq!(tot.complex.dim(1), 2);
        assert_eq!(tot.complex.dim(2), 1);
        assert!(tot.complex.is_acyclic());
    }

    #[test]
    fn complex_of_complexes_gets_column_signs() {
        // Two identical columns joined by the identity: tot is acyclic.
        let mut dims = BTreeMap::new();
        dims.insert(0, 1);
        dims.insert(1, 2);
        let mut d = BTreeMap::new();
        d.insert(0, Matrix::from_int_rows(&[&[1], &[-1]]));
        let col = Complex::new(dims, d).unwrap();
        let id = ChainMap::identity(&col);
        let dc = DoubleComplex::from_complex_of_complexes(
            &[col.clone(), col.clone()],
            std::slice::from_ref(&id),
        )
        .unwrap();
        // Column 1's vertical differential carries the sign.
        assert_eq!(dc.dv(1, 0), col.d(0).neg());
        let tot = dc.tot();
        assert!(tot.complex.is_acyclic());
    }

    #[test]
    fn tot_layout_embeds_and_extracts() {
        let a = Complex::concentrated(0, 2);
        let b = Complex::concentrated(1, 3);
        let z = ChainMap::zero(&a, &b.shift(1));
        // One column a at p=0, one column b[1] at p=1; zero horizontal map.
        let dc =
            DoubleComplex::from_complex_of_complexes(&[a, b.shift(1)], std::slice::from_ref(&z))
                .unwrap();
        let tot = dc.tot();
        // Total degree 0: block (0,0) dim 2; total degree 1: block (1,0) dim 3.
        assert_eq!(tot.blocks(0).len(), 1);
        assert_eq!(tot.blocks(1).len(), 1);
        let v = vec![crate::Scalar::from_int(4), crate::Scalar::from_int(5)];
        let e = tot.embed(0, 0, &v);
        assert_eq!(tot.extract(0, 0, &e), v);
    }
}
