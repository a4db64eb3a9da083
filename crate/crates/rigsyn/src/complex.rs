//! Bounded cochain complexes of finite-dimensional Q-vector spaces, chain
//! maps, and the standard constructions on them: shifts, cones, tensor
//! products, Hom complexes, cohomology with explicit cycle bases, induced
//! maps, and the long exact sequence of a cone.
//!
//! Degrees are cohomological: `d(n)` maps degree `n` to degree `n + 1`.
//! Each space carries the standard coordinate basis; all maps are matrices.

use crate::error::Error;
use crate::linalg::{coords_in_basis, image_basis, kernel_basis, quotient_data, Subspace};
use crate::matrix::Matrix;
use crate::report::{ExactSequenceReport, LesEntry};
use crate::Result;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A cochain complex supported in finitely many degrees.
///
/// Only degrees with nonzero dimension are stored in `dims`, and only
/// differentials with nonzero source and target are stored in `d`. Reads
/// outside the stored window see zero spaces and zero maps.
///
/// Deserialization goes through [`Complex::new`], so decoded values satisfy
/// the same invariants as constructed ones.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ComplexWire", into = "ComplexWire")]
pub struct Complex {
    dims: BTreeMap<i64, usize>,
    d: BTreeMap<i64, Matrix>,
}

#[derive(Serialize, Deserialize)]
struct ComplexWire {
    dims: BTreeMap<i64, usize>,
    d: BTreeMap<i64, Matrix>,
}

impl From<Complex> for ComplexWire {
    fn from(c: Complex) -> Self {
        ComplexWire { dims: c.dims, d: c.d }
    }
}

impl TryFrom<ComplexWire> for Complex {
    type Error = Error;

    fn try_from(w: ComplexWire) -> Result<Self> {
        Complex::new(w.dims, w.d)
    }
}

impl Complex {
    /// Builds a complex, checking shapes and `d ∘ d = 0`.
    pub fn new(dims: BTreeMap<i64, usize>, d: BTreeMap<i64, Matrix>) -> Result<Self> {
        let dims: BTreeMap<i64, usize> =
            dims.into_iter().filter(|&(_, dim)| dim > 0).collect();
        let dim_at = |n: i64| dims.get(&n).copied().unwrap_or(0);
        let mut kept = BTreeMap::new();
        for (n, m) in d {
            if m.rows() != dim_at(n + 1) || m.cols() != dim_at(n) {
                return Err(Error::invalid(
                    "differential shape",
                    format!(
                        "d({n}) is {}x{}, expected {}x{}",
                        m.rows(),
                        m.cols(),
                        dim_at(n + 1),
                        dim_at(n)
                    ),
                ));
            }
            if m.rows() > 0 && m.cols() > 0 {
                kept.insert(n, m);
            }
        }
        let c = Complex { dims, d: kept };
        for &n in c.dims.keys() {
            if !c.d(n + 1).mul(&c.d(n)).is_zero_matrix() {
                return Err(Error::NotComplex { degree: n });
            }
        }
        Ok(c)
    }

    /// The zero complex.
    pub fn zero() -> Self {
        Complex { dims: BTreeMap::new(), d: BTreeMap::new() }
    }

    /// A single space of dimension `dim` placed in degree `n`.
    pub fn concentrated(n: i64, dim: usize) -> Self {
        let mut dims = BTreeMap::new();
        if dim > 0 {
            dims.insert(n, dim);
        }
        Complex { dims, d: BTreeMap::new() }
    }

    pub fn dim(&self, n: i64) -> usize {
        self.dims.get(&n).copied().unwrap_or(0)
    }

    pub fn dims(&self) -> &BTreeMap<i64, usize> {
        &self.dims
    }

    /// The differential out of degree `n`, materialized at full shape.
    pub fn d(&self, n: i64) -> Matrix {
        match self.d.get(&n) {
            Some(m) => m.clone(),
            None => Matrix::zero(self.dim(n + 1), self.dim(n)),
        }
    }

    /// Degree window `(lo, hi)` containing every nonzero space; `(0, 0)` for
    /// the zero complex.
    pub fn support(&self) -> (i64, i64) {
        match (self.dims.keys().next(), self.dims.keys().next_back()) {
            (Some(&lo), Some(&hi)) => (lo, hi),
            _ => (0, 0),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.values().sum()
    }

    /// The shifted complex with `shift(k)^n = self^{n+k}` and differential
    /// scaled by `(-1)^k`.
    pub fn shift(&self, k: i64) -> Self {
        let dims = self.dims.iter().map(|(&n, &dim)| (n - k, dim)).collect();
        let d = self
            .d
            .iter()
            .map(|(&n, m)| {
                let m = if k.rem_euclid(2) == 1 { m.neg() } else { m.clone() };
                (n - k, m)
            })
            .collect();
        Complex { dims, d }
    }

    /// Cohomology at degree `n`: dimension, the cycle subspace, and the
    /// projection matrix sending cycle-basis coordinates to class coordinates.
    pub fn cohomology(&self, n: i64) -> CohomologyData {
        let cycles = Matrix::from_columns(self.dim(n), &kernel_basis(&self.d(n)));
        let cycle_space = Subspace::from_spanning(&cycles);
        let boundaries = image_basis(&self.d(n - 1));
        let (dim, projection) = quotient_data(&boundaries, &cycle_space)
            .expect("boundaries lie inside cycles in a complex");
        CohomologyData { dim, cycles: cycle_space, projection }
    }

    /// All cohomology dimensions over the support window.
    pub fn cohomology_dims(&self) -> BTreeMap<i64, usize> {
        let (lo, hi) = self.support();
        let mut out = BTreeMap::new();
        for n in lo..=hi {
            let h = self.cohomology(n).dim;
            if h > 0 {
                out.insert(n, h);
            }
        }
        out
    }

    pub fn is_acyclic(&self) -> bool {
        self.cohomology_dims().is_empty()
    }

    /// Direct sum, together with the inclusion and projection chain maps of
    /// each summand. Blocks are ordered as given.
    pub fn direct_sum(parts: &[&Complex]) -> (Complex, Vec<ChainMap>, Vec<ChainMap>) {
        let mut degrees: Vec<i64> = Vec::new();
        for p in parts {
            degrees.extend(p.dims.keys().copied());
        }
        degrees.sort_unstable();
        degrees.dedup();

        let mut dims = BTreeMap::new();
        let mut d = BTreeMap::new();
        for &n in &degrees {
            let total: usize = parts.iter().map(|p| p.dim(n)).sum();
            dims.insert(n, total);
            let blocks: Vec<Matrix> = parts.iter().map(|p| p.d(n)).collect();
            let refs: Vec<&Matrix> = blocks.iter().collect();
            d.insert(n, Matrix::block_diag(&refs));
        }
        let sum = Complex::new(dims, d).expect("direct sum of complexes is a complex");

        let mut inclusions = Vec::with_capacity(parts.len());
        let mut projections = Vec::with_capacity(parts.len());
        for (idx, part) in parts.iter().enumerate() {
            let mut inc = BTreeMap::new();
            let mut proj = BTreeMap::new();
            for &n in &degrees {
                let before: usize = parts[..idx].iter().map(|p| p.dim(n)).sum();
                let here = part.dim(n);
                let total = sum.dim(n);
                let mut i = Matrix::zero(total, here);
                i.paste(before, 0, &Matrix::identity(here));
                inc.insert(n, i);
                let mut p = Matrix::zero(here, total);
                p.paste(0, before, &Matrix::identity(here));
                proj.insert(n, p);
            }
            inclusions.push(
                ChainMap::new((*part).clone(), sum.clone(), inc)
                    .expect("summand inclusion is a chain map"),
            );
            projections.push(
                ChainMap::new(sum.clone(), (*part).clone(), proj)
                    .expect("summand projection is a chain map"),
            );
        }
        (sum, inclusions, projections)
    }
}

/// Output of [`Complex::cohomology`].
#[derive(Clone, Debug)]
pub struct CohomologyData {
    pub dim: usize,
    /// Basis of the cycle subspace in degree `n`.
    pub cycles: Subspace,
    /// Maps cycle-basis coordinates onto class coordinates; its kernel is
    /// spanned by the coordinates of boundaries.
    pub projection: Matrix,
}

impl CohomologyData {
    /// Class coordinates of a cycle given in ambient coordinates.
    ///
    /// Fails with [`Error::Inconsistent`] when the vector is not a cycle.
    pub fn class_of(&self, cycle: &[crate::Scalar]) -> Result<Vec<crate::Scalar>> {
        let coords = coords_in_basis(self.cycles.basis(), cycle)?;
        Ok(self.projection.apply(&coords))
    }
}

/// A degree-preserving map of complexes commuting with the differentials.
///
/// Deserialization goes through [`ChainMap::new`], so decoded values satisfy
/// the same invariants as constructed ones.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ChainMapWire", into = "ChainMapWire")]
pub struct ChainMap {
    source: Complex,
    target: Complex,
    comps: BTreeMap<i64, Matrix>,
}

#[derive(Serialize, Deserialize)]
struct ChainMapWire {
    source: Complex,
    target: Complex,
    comps: BTreeMap<i64, Matrix>,
}

impl From<ChainMap> for ChainMapWire {
    fn from(f: ChainMap) -> Self {
        ChainMapWire { source: f.source, target: f.target, comps: f.comps }
    }
}

impl TryFrom<ChainMapWire> for ChainMap {
    type Error = Error;

    fn try_from(w: ChainMapWire) -> Result<Self> {
        ChainMap::new(w.source, w.target, w.comps)
    }
}

impl ChainMap {
    /// Builds a chain map, checking component shapes and the commutation
    /// `d ∘ f = f ∘ d` in every degree.
    pub fn new(source: Complex, target: Complex, comps: BTreeMap<i64, Matrix>) -> Result<Self> {
        let comps: BTreeMap<i64, Matrix> = comps
            .into_iter()
            .filter(|(_, m)| m.rows() > 0 && m.cols() > 0)
            .collect();
        for (&n, m) in &comps {
            if m.rows() != target.dim(n) || m.cols() != source.dim(n) {
                return Err(Error::invalid(
                    "chain map shape",
                    format!(
                        "component {n} is {}x{}, expected {}x{}",
                        m.rows(),
                        m.cols(),
                        target.dim(n),
                        source.dim(n)
                    ),
                ));
            }
        }
        let f = ChainMap { source, target, comps };
        let (lo, hi) = f.source.support();
        for n in lo..=hi {
            let left = f.target.d(n).mul(&f.comp(n));
            let right = f.comp(n + 1).mul(&f.source.d(n));
            if !left.sub(&right).is_zero_matrix() {
                return Err(Error::NotChainMap { degree: n });
            }
        }
        Ok(f)
    }

    pub fn identity(c: &Complex) -> Self {
        let comps = c
            .dims
            .iter()
            .map(|(&n, &dim)| (n, Matrix::identity(dim)))
            .collect();
        ChainMap { source: c.clone(), target: c.clone(), comps }
    }

    pub fn zero(source: &Complex, target: &Complex) -> Self {
        ChainMap {
            source: source.clone(),
            target: target.clone(),
            comps: BTreeMap::new(),
        }
    }

    pub fn source(&self) -> &Complex {
        &self.source
    }

    pub fn target(&self) -> &Complex {
        &self.target
    }

    /// The component in degree `n`, materialized at full shape.
    pub fn comp(&self, n: i64) -> Matrix {
        match self.comps.get(&n) {
            Some(m) => m.clone(),
            None => Matrix::zero(self.target.dim(n), self.source.dim(n)),
        }
    }

    /// Composition `self ∘ g`.
    pub fn compose(&self, g: &ChainMap) -> Result<ChainMap> {
        if g.target != self.source {
            return Err(Error::invalid(
                "composition",
                "inner target does not match outer source".to_string(),
            ));
        }
        let (lo, hi) = g.source.support();
        let mut comps = BTreeMap::new();
        for n in lo..=hi {
            comps.insert(n, self.comp(n).mul(&g.comp(n)));
        }
        ChainMap::new(g.source.clone(), self.target.clone(), comps)
    }

    pub fn add(&self, g: &ChainMap) -> Result<ChainMap> {
        if self.source.dims != g.source.dims || self.target.dims != g.target.dims {
            return Err(Error::invalid(
                "chain map sum",
                "sources or targets differ".to_string(),
            ));
        }
        let (lo, hi) = self.source.support();
        let mut comps = BTreeMap::new();
        for n in lo..=hi {
            comps.insert(n, self.comp(n).add(&g.comp(n)));
        }
        ChainMap::new(self.source.clone(), self.target.clone(), comps)
    }

    pub fn scale(&self, c: &crate::Scalar) -> ChainMap {
        let comps = self.comps.iter().map(|(&n, m)| (n, m.scale(c))).collect();
        ChainMap {
            source: self.source.clone(),
            target: self.target.clone(),
            comps,
        }
    }

    pub fn neg(&self) -> ChainMap {
        self.scale(&crate::Scalar::from_int(-1))
    }

    /// Shifts source, target, and components by `k` degrees.
    pub fn shift(&self, k: i64) -> ChainMap {
        ChainMap {
            source: self.source.shift(k),
            target: self.target.shift(k),
            comps: self.comps.iter().map(|(&n, m)| (n - k, m.clone())).collect(),
        }
    }

    /// The matrix of `H^n(f)` from `H^n(source)` to `H^n(target)`, in the
    /// class coordinates produced by [`Complex::cohomology`].
    pub fn induced_map(&self, n: i64) -> Matrix {
        let src = self.source.cohomology(n);
        let tgt = self.target.cohomology(n);
        let f = self.comp(n);
        let mut out = Matrix::zero(tgt.dim, src.dim);
        // Representing cycles: the columns of the source cycle basis whose
        // classes form a basis; pick preimages of class coordinates by
        // scanning cycle basis vectors and keeping the linearly independent
        // classes in order.
        let mut chosen: Vec<Vec<crate::Scalar>> = Vec::new();
        let mut span = crate::linalg::Echelon::new(src.dim);
        for j in 0..src.cycles.dim() {
            let class = src.projection.column(j);
            let sparse: Vec<(usize, crate::Scalar)> = class
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (i, v.clone()))
                .collect();
            if span.insert_rational(sparse) {
                chosen.push(src.cycles.basis().column(j));
            }
            if chosen.len() == src.dim {
                break;
            }
        }
        debug_assert_eq!(chosen.len(), src.dim);
        // The classes of the chosen cycles form a basis of H^n(source); its
        // change of basis to the canonical class coordinates:
        let mut basis_classes = Matrix::zero(src.dim, src.dim);
        for (j, cyc) in chosen.iter().enumerate() {
            let cls = src.class_of(cyc).expect("chosen vectors are cycles");
            for (i, v) in cls.into_iter().enumerate() {
                basis_classes.set(i, j, v);
            }
        }
        let inv = crate::linalg::solve(&basis_classes, &Matrix::identity(src.dim))
            .expect("classes of chosen cycles are a basis");
        for (j, cyc) in chosen.iter().enumerate() {
            let image = f.apply(cyc);
            let cls = tgt
                .class_of(&image)
                .expect("chain maps send cycles to cycles");
            for (i, v) in cls.into_iter().enumerate() {
                out.set(i, j, v);
            }
        }
        out.mul(&inv)
    }

    /// True when every induced map on cohomology is an isomorphism.
    pub fn is_quasi_iso(&self) -> bool {
        let (slo, shi) = self.source.support();
        let (tlo, thi) = self.target.support();
        let lo = slo.min(tlo);
        let hi = shi.max(thi);
        for n in lo..=hi {
            let hs = self.source.cohomology(n).dim;
            let ht = self.target.cohomology(n).dim;
            if hs != ht {
                return false;
            }
            if hs > 0 && crate::linalg::rank(&self.induced_map(n)) != hs {
                return false;
            }
        }
        true
    }
}

/// The mapping cone of `f`, with `Cone(f)^n = source^{n+1} ⊕ target^n` and
/// differential `d(a, b) = (−d a, f a + d b)`. Returns the cone together
/// with the inclusion `target → Cone(f)` and the projection
/// `Cone(f) → source[1]`.
pub fn cone(f: &ChainMap) -> (Complex, ChainMap, ChainMap) {
    let src = f.source();
    let tgt = f.target();
    let (slo, shi) = src.support();
    let (tlo, thi) = tgt.support();
    let lo = (slo - 1).min(tlo);
    let hi = (shi - 1).max(thi);

    let mut dims = BTreeMap::new();
    let mut d = BTreeMap::new();
    for n in lo..=hi {
        let dim = src.dim(n + 1) + tgt.dim(n);
        if dim > 0 {
            dims.insert(n, dim);
        }
    }
    for n in lo..=hi {
        let rows = src.dim(n + 2) + tgt.dim(n + 1);
        let cols = src.dim(n + 1) + tgt.dim(n);
        let mut m = Matrix::zero(rows, cols);
        m.paste(0, 0, &src.d(n + 1).neg());
        m.paste(src.dim(n + 2), 0, &f.comp(n + 1));
        m.paste(src.dim(n + 2), src.dim(n + 1), &tgt.d(n));
        d.insert(n, m);
    }
    let cone = Complex::new(dims, d).expect("cone of a chain map is a complex");

    let mut inc = BTreeMap::new();
    let mut proj = BTreeMap::new();
    for n in lo..=hi {
        let mut i = Matrix::zero(cone.dim(n), tgt.dim(n));
        i.paste(src.dim(n + 1), 0, &Matrix::identity(tgt.dim(n)));
        inc.insert(n, i);
        let mut p = Matrix::zero(src.dim(n + 1), cone.dim(n));
        p.paste(0, 0, &Matrix::identity(src.dim(n + 1)));
        proj.insert(n, p);
    }
    let inclusion = ChainMap::new(tgt.clone(), cone.clone(), inc)
        .expect("cone inclusion is a chain map");
    let projection = ChainMap::new(cone.clone(), src.shift(1), proj)
        .expect("cone projection is a chain map");
    (cone, inclusion, projection)
}

/// Tensor product of complexes with the Koszul sign:
/// `d(x ⊗ y) = dx ⊗ y + (−1)^{|x|} x ⊗ dy`.
///
/// In degree `n` the blocks run over `p + q = n` with `p` increasing, and
/// within the block `(p, q)` the basis pairs are ordered with the left factor
/// major, matching [`Matrix::kronecker`].
pub fn tensor(a: &Complex, b: &Complex) -> Complex {
    if a.is_zero() || b.is_zero() {
        return Complex::zero();
    }
    let (alo, ahi) = a.support();
    let (blo, bhi) = b.support();
    let lo = alo + blo;
    let hi = ahi + bhi;

    let block_dims = |n: i64| -> Vec<(i64, usize)> {
        let mut out = Vec::new();
        for p in alo..=ahi {
            let q = n - p;
            let dim = a.dim(p) * b.dim(q);
            if dim > 0 {
                out.push((p, dim));
            }
        }
        out
    };
    let offset = |n: i64, p: i64| -> usize {
        block_dims(n)
            .iter()
            .take_while(|&&(pp, _)| pp < p)
            .map(|&(_, d)| d)
            .sum()
    };

    let mut dims = BTreeMap::new();
    let mut d = BTreeMap::new();
    for n in lo..=hi {
        let total: usize = block_dims(n).iter().map(|&(_, d)| d).sum();
        if total > 0 {
            dims.insert(n, total);
        }
    }
    for n in lo..=hi {
        let rows: usize = block_dims(n + 1).iter().map(|&(_, d)| d).sum();
        let cols: usize = block_dims(n).iter().map(|&(_, d)| d).sum();
        if rows == 0 || cols == 0 {
            continue;
        }
        let mut m = Matrix::zero(rows, cols);
        for &(p, _) in &block_dims(n) {
            let q = n - p;
            let col = offset(n, p);
            // dx ⊗ y lands in block (p + 1, q).
            if a.dim(p + 1) > 0 && b.dim(q) > 0 {
                let blk = Matrix::kronecker(&a.d(p), &Matrix::identity(b.dim(q)));
                m.paste(offset(n + 1, p + 1), col, &blk);
            }
            // (−1)^p x ⊗ dy lands in block (p, q + 1).
            if a.dim(p) > 0 && b.dim(q + 1) > 0 {
                let mut blk = Matrix::kronecker(&Matrix::identity(a.dim(p)), &b.d(q));
                if p.rem_euclid(2) == 1 {
                    blk = blk.neg();
                }
                m.paste(offset(n + 1, p), col, &blk);
            }
        }
        d.insert(n, m);
    }
    Complex::new(dims, d).expect("tensor product of complexes is a complex")
}

/// The Hom complex `Hom(M, N)` with
/// `Hom^n = ⊕_k Hom(M^k, N^{k+n})` and `(δf) = d_N ∘ f − (−1)^n f ∘ d_M`.
///
/// Within degree `n`, blocks run over `k` increasing; the block for `k`
/// enumerates matrix entries row-major, i.e. index `i · dim M^k + j`
/// corresponds to the entry sending basis vector `j` of `M^k` to basis
/// vector `i` of `N^{k+n}`.
pub fn hom_complex(m: &Complex, n: &Complex) -> Complex {
    if m.is_zero() || n.is_zero() {
        return Complex::zero();
    }
    let (mlo, mhi) = m.support();
    let (nlo, nhi) = n.support();
    let lo = nlo - mhi;
    let hi = nhi - mlo;

    let block_dims = |deg: i64| -> Vec<(i64, usize)> {
        let mut out = Vec::new();
        for k in mlo..=mhi {
            let dim = m.dim(k) * n.dim(k + deg);
            if dim > 0 {
                out.push((k, dim));
            }
        }
        out
    };
    let offset = |deg: i64, k: i64| -> usize {
        block_dims(deg)
            .iter()
            .take_while(|&&(kk, _)| kk < k)
            .map(|&(_, d)| d)
            .sum()
    };

    let mut dims = BTreeMap::new();
    let mut d = BTreeMap::new();
    for deg in lo..=hi {
        let total: usize = block_dims(deg).iter().map(|&(_, d)| d).sum();
        if total > 0 {
            dims.insert(deg, total);
        }
    }
    for deg in lo..=hi {
        let rows: usize = block_dims(deg + 1).iter().map(|&(_, d)| d).sum();
        let cols: usize = block_dims(deg).iter().map(|&(_, d)| d).sum();
        if rows == 0 || cols == 0 {
            continue;
        }
        let mut mat = Matrix::zero(rows, cols);
        for &(k, _) in &block_dims(deg) {
            let col = offset(deg, k);
            // d_N ∘ f stays at source level k.
            if m.dim(k) > 0 && n.dim(k + deg + 1) > 0 {
                let blk = Matrix::kronecker(&n.d(k + deg), &Matrix::identity(m.dim(k)));
                mat.paste(offset(deg + 1, k), col, &blk);
            }
            // −(−1)^deg f ∘ d_M lands at source level k − 1.
            if m.dim(k - 1) > 0 && n.dim(k + deg) > 0 {
                let mut blk = Matrix::kronecker(
                    &Matrix::identity(n.dim(k + deg)),
                    &m.d(k - 1).transpose(),
                );
                if deg.rem_euclid(2) == 0 {
                    blk = blk.neg();
                }
                mat.paste(offset(deg + 1, k - 1), col, &blk);
            }
        }
        d.insert(deg, mat);
    }
    Complex::new(dims, d).expect("Hom of complexes is a complex")
}

/// Checks exactness of the long sequence
/// `… → H^n(src) → H^n(tgt) → H^n(Cone f) → H^{n+1}(src) → …`
/// induced by a chain map `f`, with connecting map the cone projection.
pub fn les_of_cone(f: &ChainMap) -> ExactSequenceReport {
    les_of_cone_labeled(
        f,
        "long exact sequence of a cone",
        |n| format!("H^{n}(source)"),
        |n| format!("H^{n}(target)"),
        |n| format!("H^{n}(cone)"),
    )
}

/// [`les_of_cone`] with caller-supplied title and slot labels, for sequences
/// whose terms have domain-specific names.
pub fn les_of_cone_labeled(
    f: &ChainMap,
    title: &str,
    label_src: impl Fn(i64) -> String,
    label_tgt: impl Fn(i64) -> String,
    label_cone: impl Fn(i64) -> String,
) -> ExactSequenceReport {
    let (cone_c, inc, proj) = cone(f);
    let src = f.source();
    let tgt = f.target();
    let (slo, shi) = src.support();
    let (tlo, thi) = tgt.support();
    let (clo, chi) = cone_c.support();
    let lo = slo.min(tlo).min(clo) - 1;
    let hi = shi.max(thi).max(chi) + 1;

    // The sequence as a flat list of (label, dim, outgoing matrix).
    let mut labels = Vec::new();
    let mut dims_list = Vec::new();
    let mut maps = Vec::new();
    for n in lo..=hi {
        labels.push(label_src(n));
        dims_list.push(src.cohomology(n).dim);
        maps.push(f.induced_map(n));

        labels.push(label_tgt(n));
        dims_list.push(tgt.cohomology(n).dim);
        maps.push(inc.induced_map(n));

        labels.push(label_cone(n));
        dims_list.push(cone_c.cohomology(n).dim);
        // The connecting map lands in H^{n+1}(source) = H^n(source[1]).
        maps.push(proj.induced_map(n));
    }

    let mut entries = Vec::new();
    for i in 0..labels.len() {
        let incoming_rank = if i == 0 { 0 } else { crate::linalg::rank(&maps[i - 1]) };
        let last = i + 1 == labels.len();
        let outgoing_rank = if last { None } else { Some(crate::linalg::rank(&maps[i])) };
        let exact = match outgoing_rank {
            // ker(out) = im(in) given im ⊆ ker, which holds iff the
            // composite vanishes and the dimensions match.
            Some(out) => {
                let composite_zero = if i == 0 {
                    true
                } else {
                    maps[i].mul(&maps[i - 1]).is_zero_matrix()
                };
                composite_zero && dims_list[i] - out == incoming_rank
            }
            None => true,
        };
        entries.push(LesEntry {
            label: labels[i].clone(),
            dim: dims_list[i],
            outgoing_rank,
            incoming_rank,
            exact,
        });
    }
    ExactSequenceReport { title: title.to_string(), entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Scalar;

    fn two_term(map: Matrix) -> Complex {
        let mut dims = BTreeMap::new();
        dims.insert(0, map.cols());
        dims.insert(1, map.rows());
        let mut d = BTreeMap::new();
        d.insert(0, map);
        Complex::new(dims, d).unwrap()
    }

    #[test]
    fn rejects_non_square_zero_differential() {
        let mut dims = BTreeMap::new();
        dims.insert(0, 1);
        dims.insert(1, 1);
        dims.insert(2, 1);
        let mut d = BTreeMap::new();
        d.insert(0, Matrix::from_int_rows(&[&[1]]));
        d.insert(1, Matrix::from_int_rows(&[&[1]]));
        assert!(matches!(
            Complex::new(dims, d),
            Err(Error::NotComplex { degree: 0 })
        ));
    }

    #[test]
    fn diagonal_into_difference_has_h0_zero_h1_one() {
        // K → K^2, x ↦ (x, −x).
        let c = two_term(Matrix::from_int_rows(&[&[1], &[-1]]));
        assert_eq!(c.cohomology(0).dim, 0);
        assert_eq!(c.cohomology(1).dim, 1);
        let dims = c.cohomology_dims();
        assert_eq!(dims.get(&1), Some(&1));
        assert_eq!(dims.len(), 1);
    }

    #[test]
    fn shift_moves_cohomology() {
        let c = two_term(Matrix::from_int_rows(&[&[1], &[-1]]));
        let s = c.shift(1);
        assert_eq!(s.dim(-1), 1);
        assert_eq!(s.dim(0), 2);
        assert_eq!(s.cohomology(0).dim, 1);
        assert_eq!(s.cohomology(-1).dim, 0);
        // d is negated by an odd shift.
        assert_eq!(s.d(-1), c.d(0).neg());
        // H^n(c[k]) = H^{n+k}(c) across a double shift too.
        assert_eq!(c.shift(2).cohomology(-1).dim, c.cohomology(1).dim);
    }

    #[test]
    fn cone_of_scalar_multiple_of_identity_is_acyclic() {
        // Multiplication by 1 − 1/5 on K concentrated in degree 0.
        let k = Complex::concentrated(0, 1);
        let mut comps = BTreeMap::new();
        let c = Scalar::one() - Scalar::ratio(1, 5);
        comps.insert(0, Matrix::identity(1).scale(&c));
        let f = ChainMap::new(k.clone(), k, comps).unwrap();
        let (cone_c, _, _) = cone(&f);
        assert_eq!(cone_c.dim(-1), 1);
        assert_eq!(cone_c.dim(0), 1);
        assert!(cone_c.is_acyclic());
    }

    #[test]
    fn chain_map_commutation_is_enforced() {
        let c = two_term(Matrix::from_int_rows(&[&[1], &[-1]]));
        let mut comps = BTreeMap::new();
        comps.insert(0, Matrix::from_int_rows(&[&[2]]));
        comps.insert(1, Matrix::identity(2));
        // d∘f scales by 2 in degree 0 while f∘d does not: rejected.
        assert!(matches!(
            ChainMap::new(c.clone(), c.clone(), comps.clone()),
            Err(Error::NotChainMap { degree: 0 })
        ));
        comps.insert(1, Matrix::identity(2).scale(&Scalar::from_int(2)));
        assert!(ChainMap::new(c.clone(), c.clone(), comps).is_ok());
    }

    #[test]
    fn cone_of_zero_map_splits() {
        let src = two_term(Matrix::from_int_rows(&[&[2], &[3]]));
        let tgt = Complex::concentrated(0, 1);
        let z = ChainMap::zero(&src, &tgt);
        let (c, inc, proj) = cone(&z);
        assert_eq!(c.dim(-1), 1);
        assert_eq!(c.dim(0), 3);
        assert_eq!(inc.comp(0).rows(), 3);
        assert_eq!(proj.comp(-1).cols(), 1);
        let mut expected = src.shift(1).cohomology_dims();
        for (n, h) in tgt.cohomology_dims() {
            *expected.entry(n).or_insert(0) += h;
        }
        assert_eq!(c.cohomology_dims(), expected);
    }

    #[test]
    fn les_of_identity_cone_is_exact_with_acyclic_cone() {
        let c = two_term(Matrix::from_int_rows(&[&[1], &[-1]]));
        let id = ChainMap::identity(&c);
        let (cone_c, _, _) = cone(&id);
        assert!(cone_c.is_acyclic());
        let report = les_of_cone(&id);
        assert!(report.is_exact(), "{report}");
    }

    #[test]
    fn les_detects_interesting_connecting_map() {
        // f: K[0] → K[0] the zero map; cone has H^{-1} and H^0 each of dim 1
        // and the connecting map must be an isomorphism for exactness.
        let k = Complex::concentrated(0, 1);
        let f = ChainMap::zero(&k, &k);
        let report = les_of_cone(&f);
        assert!(report.is_exact(), "{report}");
    }

    #[test]
    fn tensor_kuenneth_dimensions() {
        // (K → K^2) ⊗ (K → K^2): H-dims multiply since char 0.
        let c = two_term(Matrix::from_int_rows(&[&[1], &[-1]]));
        let t = tensor(&c, &c);
        assert_eq!(t.dim(0), 1);
        assert_eq!(t.dim(1), 4);
        assert_eq!(t.dim(2), 4);
        let h = t.cohomology_dims();
        assert_eq!(h.get(&2), Some(&1));
        assert_eq!(h.len(), 1);

        // Tensor with a concentrated line shifts nothing, scales nothing.
        let line = Complex::concentrated(0, 1);
        let u = tensor(&line, &c);
        assert_eq!(u.cohomology_dims(), c.cohomology_dims());
    }

    #[test]
    fn tensor_koszul_sign_makes_squares_anticommute() {
        // d² = 0 on the tensor of two copies of a length-two complex with
        // identity differential requires the Koszul sign; Complex::new checks.
        let disk = two_term(Matrix::identity(1));
        let t = tensor(&disk, &disk);
        assert!(t.is_acyclic());
    }

    #[test]
    fn hom_complex_shapes_and_cohomology() {
        // The disk K → K is contractible, so End(disk) is acyclic: the
        // identity is a coboundary of the contracting homotopy.
        let disk = two_term(Matrix::identity(1));
        let h = hom_complex(&disk, &disk);
        assert_eq!(h.dim(-1), 1);
        assert_eq!(h.dim(0), 2);
        assert_eq!(h.dim(1), 1);
        assert!(h.is_acyclic());

        let point = Complex::concentrated(0, 1);
        assert!(hom_complex(&point, &disk).is_acyclic());

        // End(K[0]) is K in degree 0.
        let dims = hom_complex(&point, &point).cohomology_dims();
        assert_eq!(dims.get(&0), Some(&1));
        assert_eq!(dims.len(), 1);

        // Hom(K[0], c) recovers c's cohomology; Hom(c, K[0]) dualizes it.
        let c = two_term(Matrix::from_int_rows(&[&[1], &[-1]]));
        assert_eq!(hom_complex(&point, &c).cohomology_dims(), c.cohomology_dims());
        let dual_dims = hom_complex(&c, &point).cohomology_dims();
        assert_eq!(dual_dims.get(&-1), Some(&1));
        assert_eq!(dual_dims.len(), 1);
    }

    #[test]
    fn induced_map_of_identity_is_identity() {
        let c = two_term(Matrix::from_int_rows(&[&[1], &[-1]]));
        let id = ChainMap::identity(&c);
        let m = id.induced_map(1);
        assert_eq!(m, Matrix::identity(1));
        assert!(id.is_quasi_iso());
    }

    #[test]
    fn induced_map_detects_degree_two_scaling() {
        let k = Complex::concentrated(0, 1);
        let mut comps = BTreeMap::new();
        comps.insert(0, Matrix::identity(1).scale(&Scalar::from_int(2)));
        let f = ChainMap::new(k.clone(), k.clone(), comps).unwrap();
        let m = f.induced_map(0);
        assert_eq!(m.get(0, 0), Scalar::from_int(2));
        assert!(f.is_quasi_iso());
        assert!(!ChainMap::zero(&k, &k).is_quasi_iso());
    }

    #[test]
    fn serde_decode_revalidates_invariants() {
        let c = two_term(Matrix::from_int_rows(&[&[1], &[-1]]));
        let json = serde_json::to_string(&c).unwrap();
        let back: Complex = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);

        // A payload violating d² = 0 is rejected at decode time.
        let bad = r#"{"dims":{"0":1,"1":1,"2":1},"d":{
            "0":{"rows":1,"cols":1,"entries":[[0,0,"1"]]},
            "1":{"rows":1,"cols":1,"entries":[[0,0,"1"]]}}}"#;
        assert!(serde_json::from_str::<Complex>(bad).is_err());

        let id = ChainMap::identity(&c);
        let json = serde_json::to_string(&id).unwrap();
        let back: ChainMap = serde_json::from_str(&json).unwrap();
        assert_eq!(back.comp(0), Matrix::identity(1));

        // A component that fails to commute with d is rejected too.
        let mut comps = BTreeMap::new();
        comps.insert(0, Matrix::from_int_rows(&[&[2]]));
        comps.insert(1, Matrix::identity(2));
        let bad = serde_json::json!({
            "source": serde_json::to_value(&c).unwrap(),
            "target": serde_json::to_value(&c).unwrap(),
            "comps": comps,
        });
        assert!(serde_json::from_value::<ChainMap>(bad).is_err());
    }

    #[test]
    fn direct_sum_inclusions_and_projections() {
        let a = Complex::concentrated(0, 2);
        let b = two_term(Matrix::from_int_rows(&[&[1], &[-1]]));
        let (s, incs, projs) = Complex::direct_sum(&[&a, &b]);
        assert_eq!(s.dim(0), 3);
        assert_eq!(s.dim(1), 2);
        let roundtrip = projs[1].compose(&incs[1]).unwrap();
        assert_eq!(roundtrip.comp(0), Matrix::identity(1));
        assert_eq!(roundtrip.comp(1), Matrix::identity(2));
        let cross = projs[0].compose(&incs[1]).unwrap();
        assert!(cross.comp(0).is_zero_matrix());
    }
}
