//! Compatible families of polynomial simplex forms over a truncated
//! cosimplicial DGA.
//!
//! A family assigns to each level `m ≤ L` an element of
//! `ω(Δ^m) ⊗ level_m`, where `ω(Δ^m)` is the polynomial de Rham algebra of
//! [`crate::forms`], subject to two exchange rules: pulling the form factor
//! back along a face must agree with pushing the payload forward along the
//! matching coface, and pushing the form factor along a degeneracy must
//! agree with collapsing the payload by the matching codegeneracy. With the
//! total degree of the forms capped at `D` (a `dT` factor counting one)
//! this is a finite linear system;
//! [`ts_normalize`] solves it degree by degree and packages the result as a
//! cochain complex with a levelwise product ([`ts_product`]) and an
//! integration chain map onto the total complex of the levels
//! ([`integration_map`]). [`stabilization_scan`] watches the cohomology
//! table as `D` grows.
//!
//! Both exchange rules preserve the form degree and the internal payload
//! degree separately, so the solver works one (form degree, internal
//! degree) block at a time instead of attacking a whole total degree at
//! once.

use std::collections::BTreeMap;

use crate::complex::{ChainMap, Complex};
use crate::cosimplicial::CosimplicialDGA;
use crate::double::{DoubleComplex, TotComplex};
use crate::error::Error;
use crate::forms::{
    codegeneracy_pullback, coface_pullback, exterior_d, integrate, wedge, PolyForm,
};
use crate::linalg::{kernel_of_rows, solve};
use crate::matrix::Matrix;
use crate::report::{Check, Report};
use crate::{Result, Scalar};

/// Enumerated monomial-form bases: for each level `m` and form degree `k`,
/// the forms `T^a dT_S` with `S ⊆ {1..m}`, `|S| = k`, and total degree
/// `|a| + k ≤ bound`. Counting `dT` as degree one makes the exterior
/// derivative degree-preserving, so the truncated spaces form a subcomplex.
#[derive(Clone, Debug)]
struct FormBases {
    bound: usize,
    levels: Vec<Vec<FormDegree>>,
}

#[derive(Clone, Debug)]
struct FormDegree {
    keys: Vec<(Vec<u32>, Vec<usize>)>,
    index: BTreeMap<(Vec<u32>, Vec<usize>), usize>,
}

impl FormBases {
    fn new(level: usize, bound: usize) -> Self {
        let mut levels = Vec::with_capacity(level + 1);
        for m in 0..=level {
            let mut degrees = Vec::with_capacity(m + 1);
            for k in 0..=m {
                let mut keys = Vec::new();
                if k <= bound {
                    let monos = monomials(m, bound - k);
                    for sub in k_subsets(m, k) {
                        for mono in &monos {
                            keys.push((mono.clone(), sub.clone()));
                        }
                    }
                }
                let index =
                    keys.iter().cloned().enumerate().map(|(i, key)| (key, i)).collect();
                degrees.push(FormDegree { keys, index });
            }
            levels.push(degrees);
        }
        FormBases { bound, levels }
    }

    fn dim(&self, m: usize, k: usize) -> usize {
        if k > m {
            0
        } else {
            self.levels[m][k].keys.len()
        }
    }

    fn form(&self, m: usize, k: usize, idx: usize) -> PolyForm {
        let (exps, subset) = &self.levels[m][k].keys[idx];
        PolyForm::monomial(m, exps, subset, Scalar::one())
            .expect("enumerated keys are valid monomial forms")
    }

    /// Coordinates of a form in the `(m, k)` basis; a term past the total
    /// degree bound is a truncation error.
    fn expand(&self, a: &PolyForm, m: usize, k: usize) -> Result<Vec<(usize, Scalar)>> {
        let mut out = Vec::with_capacity(a.terms().len());
        for ((mono, sub), c) in a.terms() {
            match self.levels[m][k].index.get(&(mono.clone(), sub.clone())) {
                Some(&i) => out.push((i, c.clone())),
                None => {
                    return Err(Error::TruncationExceeded {
                        level: mono.iter().map(|&e| e as usize).sum::<usize>() + k,
                        limit: self.bound,
                    })
                }
            }
        }
        out.sort_by_key(|&(i, _)| i);
        Ok(out)
    }

    /// Rows of the face pullback `ω(Δ^{m+1})^k → ω(Δ^m)^k`.
    fn face_rows(&self, m: usize, k: usize, i: usize) -> Vec<Vec<(usize, Scalar)>> {
        let mut rows = vec![Vec::new(); self.dim(m, k)];
        if k > m {
            return rows;
        }
        for f in 0..self.dim(m + 1, k) {
            let image = coface_pullback(&self.form(m + 1, k, f), i);
            let coords = self
                .expand(&image, m, k)
                .expect("face pullbacks preserve the degree bound");
            for (g, c) in coords {
                rows[g].push((f, c));
            }
        }
        rows
    }

    /// Rows of the degeneracy pullback `ω(Δ^m)^k → ω(Δ^{m+1})^k`.
    fn degeneracy_rows(&self, m: usize, k: usize, i: usize) -> Vec<Vec<(usize, Scalar)>> {
        let mut rows = vec![Vec::new(); self.dim(m + 1, k)];
        for f in 0..self.dim(m, k) {
            let image = codegeneracy_pullback(&self.form(m, k, f), i);
            let coords = self
                .expand(&image, m + 1, k)
                .expect("degeneracy pullbacks preserve the degree bound");
            for (g, c) in coords {
                rows[g].push((f, c));
            }
        }
        rows
    }

    fn constant_index(&self, m: usize) -> usize {
        self.levels[m][0].index[&(vec![0; m], Vec::new())]
    }
}

/// Exponent vectors in `n` variables of total degree at most `bound`,
/// lexicographically ordered.
fn monomials(n: usize, bound: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; n];
    fill_monomials(&mut current, 0, bound as u32, &mut out);
    out
}

fn fill_monomials(current: &mut Vec<u32>, pos: usize, left: u32, out: &mut Vec<Vec<u32>>) {
    if pos == current.len() {
        out.push(current.clone());
        return;
    }
    for e in 0..=left {
        current[pos] = e;
        fill_monomials(current, pos + 1, left - e, out);
    }
    current[pos] = 0;
}

/// Sorted `k`-element subsets of `{1..n}`, lexicographically ordered.
fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fill_subsets(1, n, k, &mut current, &mut out);
    out
}

fn fill_subsets(
    from: usize,
    n: usize,
    k: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if current.len() == k {
        out.push(current.clone());
        return;
    }
    for j in from..=n {
        current.push(j);
        fill_subsets(j + 1, n, k, current, out);
        current.pop();
    }
}

fn matrix_rows(m: &Matrix) -> Vec<Vec<(usize, Scalar)>> {
    let mut rows = vec![Vec::new(); m.rows()];
    for (r, c, v) in m.iter() {
        rows[r].push((c, v.clone()));
    }
    rows
}

fn matrix_cols(m: &Matrix) -> Vec<Vec<(usize, Scalar)>> {
    let mut cols = vec![Vec::new(); m.cols()];
    for (r, c, v) in m.iter() {
        cols[c].push((r, v.clone()));
    }
    cols
}

/// One homogeneous piece of the ambient product space at a total degree:
/// level `m`, form degree `k`, internal degree `r`, laid out form-major.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct TsBlock {
    m: usize,
    k: usize,
    r: i64,
    offset: usize,
    forms: usize,
    payload: usize,
}

fn blocks_dim(blocks: &[TsBlock]) -> usize {
    blocks.last().map_or(0, |b| b.offset + b.forms * b.payload)
}

/// An element of the compatible-families complex, stored as coordinates in
/// the computed basis of its total degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TsElement {
    pub degree: i64,
    pub coords: Vec<Scalar>,
}

impl TsElement {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn scale(&self, s: &Scalar) -> TsElement {
        TsElement {
            degree: self.degree,
            coords: self.coords.iter().map(|c| c.clone() * s.clone()).collect(),
        }
    }

    pub fn neg(&self) -> TsElement {
        self.scale(&-Scalar::one())
    }

    pub fn add(&self, other: &TsElement) -> Result<TsElement> {
        if self.degree != other.degree || self.coords.len() != other.coords.len() {
            return Err(Error::invalid(
                "element degrees",
                format!("{} vs {}", self.degree, other.degree),
            ));
        }
        Ok(TsElement {
            degree: self.degree,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        })
    }

    pub fn sub(&self, other: &TsElement) -> Result<TsElement> {
        self.add(&other.neg())
    }
}

/// Compatible polynomial-form families over a cosimplicial DGA, truncated
/// at level `level` and polynomial degree `degree_bound`: per total degree a
/// basis of the solution space, plus the induced differential
/// `∂ ⊗ id + (−1)^k id ⊗ d`.
#[derive(Clone, Debug)]
pub struct TSComplex {
    source: CosimplicialDGA,
    level: usize,
    degree_bound: usize,
    forms: FormBases,
    layout: BTreeMap<i64, Vec<TsBlock>>,
    bases: BTreeMap<i64, Matrix>,
    complex: Complex,
}

impl TSComplex {
    pub fn source(&self) -> &CosimplicialDGA {
        &self.source
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    /// The underlying cochain complex of compatible families.
    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    pub fn dim(&self, q: i64) -> usize {
        self.complex.dim(q)
    }

    /// Basis of the compatible subspace at total degree `q`, as columns over
    /// the ambient product coordinates.
    pub fn basis(&self, q: i64) -> Matrix {
        self.bases
            .get(&q)
            .cloned()
            .unwrap_or_else(|| Matrix::zero(self.ambient_dim(q), 0))
    }

    pub fn basis_element(&self, q: i64, j: usize) -> TsElement {
        let mut coords = vec![Scalar::zero(); self.dim(q)];
        coords[j] = Scalar::one();
        TsElement { degree: q, coords }
    }

    pub fn differential(&self, x: &TsElement) -> TsElement {
        TsElement {
            degree: x.degree + 1,
            coords: self.complex.d(x.degree).apply(&x.coords),
        }
    }

    /// The unit family: the constant form `1` tensored with the level units.
    pub fn unit(&self) -> Result<TsElement> {
        let mut amb = vec![Scalar::zero(); self.ambient_dim(0)];
        for b in self.blocks(0) {
            if b.k != 0 || b.r != 0 {
                continue;
            }
            let f0 = self.forms.constant_index(b.m);
            for (p, c) in self.source.unit(b.m).coords.iter().enumerate() {
                amb[b.offset + f0 * b.payload + p] = c.clone();
            }
        }
        self.element_from_ambient(0, amb, "unit compatibility")
    }

    /// The `(level, form degree, internal degree)` coefficient block of an
    /// element, as a forms × payload matrix.
    pub fn block_component(&self, x: &TsElement, m: usize, k: usize, r: i64) -> Matrix {
        let amb = self.ambient_vector(x);
        let fd = self.forms.dim(m, k);
        let pd = self.source.level(m).dim(r);
        let mut out = Matrix::zero(fd, pd);
        if let Some(b) = self
            .blocks(x.degree)
            .iter()
            .find(|b| b.m == m && b.k == k && b.r == r)
        {
            for f in 0..fd {
                for p in 0..pd {
                    let v = amb[b.offset + f * pd + p].clone();
                    if !v.is_zero() {
                        out.set(f, p, v);
                    }
                }
            }
        }
        out
    }

    fn blocks(&self, q: i64) -> &[TsBlock] {
        self.layout.get(&q).map_or(&[], |v| v.as_slice())
    }

    fn ambient_dim(&self, q: i64) -> usize {
        blocks_dim(self.blocks(q))
    }

    fn ambient_vector(&self, x: &TsElement) -> Vec<Scalar> {
        match self.bases.get(&x.degree) {
            Some(basis) => basis.apply(&x.coords),
            None => vec![Scalar::zero(); self.ambient_dim(x.degree)],
        }
    }

    fn element_from_ambient(
        &self,
        q: i64,
        amb: Vec<Scalar>,
        what: &'static str,
    ) -> Result<TsElement> {
        match self.bases.get(&q) {
            Some(basis) => {
                let rhs = Matrix::from_columns(amb.len(), &[amb]);
                let coords = solve(basis, &rhs).map_err(|_| {
                    Error::invalid(what, "the element leaves the compatibility subspace")
                })?;
                Ok(TsElement { degree: q, coords: coords.column(0) })
            }
            None => {
                if amb.iter().any(|c| !c.is_zero()) {
                    return Err(Error::invalid(
                        what,
                        "the element leaves the compatibility subspace",
                    ));
                }
                Ok(TsElement { degree: q, coords: Vec::new() })
            }
        }
    }

    /// The differential on ambient coordinates, `∂ ⊗ id + (−1)^k id ⊗ d`;
    /// composing it with [`TSComplex::basis`] exhibits the compatibility
    /// subspace as closed under the differential.
    pub fn ambient_differential(&self, q: i64) -> Matrix {
        ambient_differential(&self.forms, &self.source, self.blocks(q), self.blocks(q + 1))
    }
}

/// Solves the face and degeneracy exchange system over the truncated
/// monomial-form bases and returns the resulting complex of compatible
/// families. `level` may not exceed the truncation of `src`.
pub fn ts_normalize(
    src: &CosimplicialDGA,
    level: usize,
    degree_bound: usize,
) -> Result<TSComplex> {
    if level > src.truncation() {
        return Err(Error::TruncationExceeded { level, limit: src.truncation() });
    }
    let forms = FormBases::new(level, degree_bound);
    let (mut lo, mut hi) = src.level(0).support();
    for m in 1..=level {
        let (a, b) = src.level(m).support();
        lo = lo.min(a);
        hi = hi.max(b);
    }

    let mut layout: BTreeMap<i64, Vec<TsBlock>> = BTreeMap::new();
    for q in lo..=(hi + level as i64) {
        let mut blocks = Vec::new();
        let mut off = 0usize;
        for m in 0..=level {
            for k in 0..=m {
                let r = q - k as i64;
                let fd = forms.dim(m, k);
                let pd = src.level(m).dim(r);
                if fd * pd == 0 {
                    continue;
                }
                blocks.push(TsBlock { m, k, r, offset: off, forms: fd, payload: pd });
                off += fd * pd;
            }
        }
        if !blocks.is_empty() {
            layout.insert(q, blocks);
        }
    }

    let mut columns: BTreeMap<i64, Vec<Vec<Scalar>>> = BTreeMap::new();
    for k in 0..=level {
        for r in lo..=hi {
            let vectors = compatibility_kernel(src, &forms, level, k, r);
            if vectors.is_empty() {
                continue;
            }
            let q = r + k as i64;
            let blocks = &layout[&q];
            let dim_q = blocks_dim(blocks);
            for v in vectors {
                let mut amb = vec![Scalar::zero(); dim_q];
                for b in blocks.iter().filter(|b| b.k == k) {
                    if let Some(seg) = v.get(&b.m) {
                        amb[b.offset..b.offset + seg.len()].clone_from_slice(seg);
                    }
                }
                columns.entry(q).or_default().push(amb);
            }
        }
    }

    let mut bases = BTreeMap::new();
    let mut dims = BTreeMap::new();
    for (&q, cols) in &columns {
        bases.insert(q, Matrix::from_columns(blocks_dim(&layout[&q]), cols));
        dims.insert(q, cols.len());
    }

    let mut d = BTreeMap::new();
    for (&q, basis) in &bases {
        let empty = Vec::new();
        let tgt = layout.get(&(q + 1)).unwrap_or(&empty);
        let image = ambient_differential(&forms, src, &layout[&q], tgt).mul(basis);
        match bases.get(&(q + 1)) {
            Some(next) => {
                let dq = solve(next, &image).map_err(|_| {
                    Error::invalid(
                        "compatibility closure",
                        format!("the differential leaves the subspace at degree {q}"),
                    )
                })?;
                d.insert(q, dq);
            }
            None => {
                if !image.is_zero_matrix() {
                    return Err(Error::invalid(
                        "compatibility closure",
                        format!("the differential leaves the subspace at degree {q}"),
                    ));
                }
            }
        }
    }

    let complex = Complex::new(dims, d)?;
    Ok(TSComplex {
        source: src.clone(),
        level,
        degree_bound,
        forms,
        layout,
        bases,
        complex,
    })
}

/// Kernel of the exchange system at one (form degree, internal degree)
/// block, returned per vector as level → dense form-major coefficients.
fn compatibility_kernel(
    src: &CosimplicialDGA,
    forms: &FormBases,
    level: usize,
    k: usize,
    r: i64,
) -> Vec<BTreeMap<usize, Vec<Scalar>>> {
    // Variables, highest level first: face rows then pivot on the level they
    // determine and back-substitution flows from low levels up.
    let mut offs: BTreeMap<usize, usize> = BTreeMap::new();
    let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
    let mut total = 0usize;
    for m in (0..=level).rev() {
        let n = forms.dim(m, k) * src.level(m).dim(r);
        if n > 0 {
            offs.insert(m, total);
            sizes.insert(m, n);
            total += n;
        }
    }
    if total == 0 {
        return Vec::new();
    }
    let mut rows: Vec<Vec<(usize, Scalar)>> = Vec::new();
    for m in 0..level {
        let fd_m = forms.dim(m, k);
        let pd_m = src.level(m).dim(r);
        let fd_n = forms.dim(m + 1, k);
        let pd_n = src.level(m + 1).dim(r);
        // Face exchange (id ⊗ δ_i) x_m = (δ^i ⊗ id) x_{m+1}, one row per
        // basis pair of ω(Δ^m)^k ⊗ level_{m+1}.
        if fd_m > 0 && pd_n > 0 {
            for i in 0..=(m + 1) {
                let delta = matrix_rows(&src.coface(i, m + 1).comp(r));
                let face = forms.face_rows(m, k, i);
                for f in 0..fd_m {
                    for p in 0..pd_n {
                        let mut row = Vec::new();
                        if let Some(&o) = offs.get(&m) {
                            for (pp, v) in &delta[p] {
                                row.push((o + f * pd_m + pp, v.clone()));
                            }
                        }
                        if let Some(&o) = offs.get(&(m + 1)) {
                            for (ff, v) in &face[f] {
                                row.push((o + ff * pd_n + p, -v.clone()));
                            }
                        }
                        if !row.is_empty() {
                            rows.push(row);
                        }
                    }
                }
            }
        }
        // Degeneracy exchange (σ^i ⊗ id) x_m = (id ⊗ σ_i) x_{m+1}, one row
        // per basis pair of ω(Δ^{m+1})^k ⊗ level_m.
        if fd_n > 0 && pd_m > 0 {
            for i in 0..=m {
                let sigma = matrix_rows(&src.codegeneracy(i, m + 1).comp(r));
                let degen = forms.degeneracy_rows(m, k, i);
                for f in 0..fd_n {
                    for p in 0..pd_m {
                        let mut row = Vec::new();
                        if let Some(&o) = offs.get(&m) {
                            for (ff, v) in &degen[f] {
                                row.push((o + ff * pd_m + p, v.clone()));
                            }
                        }
                        if let Some(&o) = offs.get(&(m + 1)) {
                            for (pp, v) in &sigma[p] {
                                row.push((o + f * pd_n + pp, -v.clone()));
                            }
                        }
                        if !row.is_empty() {
                            rows.push(row);
                        }
                    }
                }
            }
        }
    }
    kernel_of_rows(total, rows)
        .into_iter()
        .map(|v| {
            let mut blocks = BTreeMap::new();
            for (&m, &o) in &offs {
                let seg = &v[o..o + sizes[&m]];
                if seg.iter().any(|s| !s.is_zero()) {
                    blocks.insert(m, seg.to_vec());
                }
            }
            blocks
        })
        .collect()
}

fn ambient_differential(
    forms: &FormBases,
    src: &CosimplicialDGA,
    src_blocks: &[TsBlock],
    tgt_blocks: &[TsBlock],
) -> Matrix {
    let mut out = Matrix::zero(blocks_dim(tgt_blocks), blocks_dim(src_blocks));
    let find = |m: usize, k: usize, r: i64| {
        tgt_blocks.iter().find(|b| b.m == m && b.k == k && b.r == r)
    };
    for b in src_blocks {
        // Exterior derivative of the form factor. A top-degree form has zero
        // derivative, matching the absent target block.
        if let Some(t) = find(b.m, b.k + 1, b.r) {
            for f in 0..b.forms {
                let image = exterior_d(&forms.form(b.m, b.k, f));
                let coords = forms
                    .expand(&image, b.m, b.k + 1)
                    .expect("the exterior derivative preserves the total degree");
                for (g, c) in coords {
                    for p in 0..b.payload {
                        out.add_to(
                            t.offset + g * t.payload + p,
                            b.offset + f * b.payload + p,
                            c.clone(),
                        );
                    }
                }
            }
        }
        // Level differential on the payload, signed by the form degree.
        if let Some(t) = find(b.m, b.k, b.r + 1) {
            let dm = src.level(b.m).d(b.r);
            for (pp, p, v) in dm.iter() {
                let s = if b.k % 2 == 0 { v.clone() } else { -v.clone() };
                for f in 0..b.forms {
                    out.add_to(
                        t.offset + f * t.payload + pp,
                        b.offset + f * b.payload + p,
                        s.clone(),
                    );
                }
            }
        }
    }
    out
}

/// Levelwise product: wedge on the form factors, the level multiplication
/// on the payloads. The result is re-expressed in the compatibility basis;
/// a wedge whose polynomial degree outgrows the bound is a
/// `TruncationExceeded` error.
pub fn ts_product(t: &TSComplex, x: &TsElement, y: &TsElement) -> Result<TsElement> {
    let q = x.degree + y.degree;
    let ax = t.ambient_vector(x);
    let ay = t.ambient_vector(y);
    let mut amb = vec![Scalar::zero(); t.ambient_dim(q)];
    for bx in t.blocks(x.degree) {
        for by in t.blocks(y.degree) {
            if bx.m != by.m {
                continue;
            }
            let m = bx.m;
            // An absent target block is a zero space: either the wedge
            // degree exceeds the simplex dimension or the payload product
            // lands in degree zero space.
            let Some(tb) = t
                .blocks(q)
                .iter()
                .find(|b| b.m == m && b.k == bx.k + by.k && b.r == bx.r + by.r)
                .copied()
            else {
                continue;
            };
            let mu = t.source.product_comp(m, bx.r, by.r);
            if mu.is_zero_matrix() {
                continue;
            }
            let mu_cols = matrix_cols(&mu);
            for f1 in 0..bx.forms {
                let xs: Vec<(usize, &Scalar)> = (0..bx.payload)
                    .map(|p| (p, &ax[bx.offset + f1 * bx.payload + p]))
                    .filter(|(_, c)| !c.is_zero())
                    .collect();
                if xs.is_empty() {
                    continue;
                }
                for f2 in 0..by.forms {
                    let ys: Vec<(usize, &Scalar)> = (0..by.payload)
                        .map(|p| (p, &ay[by.offset + f2 * by.payload + p]))
                        .filter(|(_, c)| !c.is_zero())
                        .collect();
                    if ys.is_empty() {
                        continue;
                    }
                    // Multiply payloads first so that a truncation error is
                    // only raised for terms that actually carry mass.
                    let mut pay = vec![Scalar::zero(); tb.payload];
                    for (p1, a) in &xs {
                        for (p2, b) in &ys {
                            for (pt, v) in &mu_cols[p1 * by.payload + p2] {
                                pay[*pt] += (*a).clone() * (*b).clone() * v.clone();
                            }
                        }
                    }
                    if pay.iter().all(|c| c.is_zero()) {
                        continue;
                    }
                    let w = wedge(&t.forms.form(m, bx.k, f1), &t.forms.form(m, by.k, f2))?;
                    if w.is_zero() {
                        continue;
                    }
                    for (g, c) in t.forms.expand(&w, m, bx.k + by.k)? {
                        for (pt, v) in pay.iter().enumerate() {
                            if !v.is_zero() {
                                amb[tb.offset + g * tb.payload + pt] +=
                                    c.clone() * v.clone();
                            }
                        }
                    }
                }
            }
        }
    }
    t.element_from_ambient(q, amb, "product compatibility")
}

/// The total complex of the levels up to `level`: alternating coface sums
/// horizontally, level differentials with the level-parity sign vertically.
pub fn simple_total(src: &CosimplicialDGA, level: usize) -> Result<TotComplex> {
    if level > src.truncation() {
        return Err(Error::TruncationExceeded { level, limit: src.truncation() });
    }
    let mut dims = BTreeMap::new();
    let mut dh = BTreeMap::new();
    let mut dv = BTreeMap::new();
    for m in 0..=level {
        let c = src.level(m);
        let (lo, hi) = c.support();
        for r in lo..=hi {
            if c.dim(r) == 0 {
                continue;
            }
            dims.insert((m as i64, r), c.dim(r));
            if m < level {
                let mut total = Matrix::zero(src.level(m + 1).dim(r), c.dim(r));
                for i in 0..=(m + 1) {
                    let face = src.coface(i, m + 1).comp(r);
                    total = if i % 2 == 0 { total.add(&face) } else { total.sub(&face) };
                }
                if !total.is_zero_matrix() {
                    dh.insert((m as i64, r), total);
                }
            }
            let vert = if m % 2 == 0 { c.d(r) } else { c.d(r).neg() };
            if !vert.is_zero_matrix() {
                dv.insert((m as i64, r), vert);
            }
        }
    }
    Ok(DoubleComplex::new(dims, dh, dv)?.tot())
}

/// Integration over the simplices: each family maps to the collection of
/// integrals of its top form-degree parts, a chain map onto the total
/// complex of the levels.
pub fn integration_map(t: &TSComplex) -> Result<ChainMap> {
    let tot = simple_total(&t.source, t.level)?;
    let integrals: Vec<Vec<Scalar>> = (0..=t.level)
        .map(|m| {
            (0..t.forms.dim(m, m))
                .map(|f| {
                    integrate(&t.forms.form(m, m, f))
                        .expect("top form-degree basis elements integrate")
                })
                .collect()
        })
        .collect();
    let mut comps = BTreeMap::new();
    for (&q, basis) in &t.bases {
        let rows = tot.complex.dim(q);
        let mut mat = Matrix::zero(rows, basis.cols());
        for j in 0..basis.cols() {
            let amb = basis.column(j);
            let mut out = vec![Scalar::zero(); rows];
            for b in t.blocks(q) {
                if b.k != b.m {
                    continue;
                }
                let mut pay = vec![Scalar::zero(); b.payload];
                for f in 0..b.forms {
                    let ival = &integrals[b.m][f];
                    if ival.is_zero() {
                        continue;
                    }
                    for (p, slot) in pay.iter_mut().enumerate() {
                        let c = &amb[b.offset + f * b.payload + p];
                        if !c.is_zero() {
                            *slot += ival.clone() * c.clone();
                        }
                    }
                }
                if pay.iter().all(|v| v.is_zero()) {
                    continue;
                }
                for (o, e) in out.iter_mut().zip(tot.embed(b.m as i64, b.r, &pay)) {
                    *o = o.clone() + e;
                }
            }
            for (i, v) in out.into_iter().enumerate() {
                if !v.is_zero() {
                    mat.set(i, j, v);
                }
            }
        }
        comps.insert(q, mat);
    }
    ChainMap::new(t.complex.clone(), tot.complex.clone(), comps)
}

/// Recomputes the compatible-families cohomology under each polynomial
/// degree bound in `bounds` and reports the bound from which the dimension
/// tables in degrees below `level − 1` stop moving, cross-checking the
/// stabilized table against the total complex of the levels.
pub fn stabilization_scan(
    src: &CosimplicialDGA,
    level: usize,
    bounds: &[usize],
) -> Result<Report> {
    let mut report = Report::new("polynomial degree stabilization");
    if bounds.is_empty() {
        report.require("scan range", false, "no degree bounds supplied");
        return Ok(report);
    }
    let mut bounds = bounds.to_vec();
    bounds.sort_unstable();
    bounds.dedup();
    let tot = simple_total(src, level)?;
    let (lo, _) = tot.complex.support();
    let window: Vec<i64> = (lo..level as i64 - 1).collect();
    let reference: BTreeMap<i64, usize> =
        window.iter().map(|&q| (q, tot.complex.cohomology(q).dim)).collect();
    let mut tables: Vec<(usize, BTreeMap<i64, usize>)> = Vec::new();
    for &bound in &bounds {
        let t = ts_normalize(src, level, bound)?;
        let table: BTreeMap<i64, usize> =
            window.iter().map(|&q| (q, t.complex().cohomology(q).dim)).collect();
        report.push(Check::of(
            format!("cohomology table at degree bound {bound}"),
            true,
            serde_json::to_string(&table).expect("dimension tables serialize"),
        ));
        tables.push((bound, table));
    }
    let stable = (0..tables.len())
        .find(|&i| (i..tables.len()).all(|j| tables[j].1 == tables[i].1))
        .expect("the last table agrees with itself");
    report.push(Check::of(
        "dimensions stabilize within the scanned bounds",
        stable + 1 < tables.len(),
        format!("stable from degree bound {}", tables[stable].0),
    ));
    report.push(Check::of(
        "stabilized dimensions match the total complex",
        tables[stable].1 == reference,
        format!(
            "families {} vs total {}",
            serde_json::to_string(&tables[stable].1).expect("dimension tables serialize"),
            serde_json::to_string(&reference).expect("dimension tables serialize"),
        ),
    ));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cosimplicial::{
        is_total_coboundary, normalization, simple_complex, unpack_total,
    };
    use crate::godement::{bar_dga, FiniteSite, SheafAlgebra};

    fn line() -> Complex {
        Complex::new(BTreeMap::from([(0, 1)]), BTreeMap::new()).unwrap()
    }

    /// The constant cosimplicial algebra on the ground field: every level a
    /// line in degree zero, every structure map the identity.
    fn constant_dga(level: usize) -> CosimplicialDGA {
        let levels = vec![line(); level + 1];
        let mut cofaces = BTreeMap::new();
        let mut codegeneracies = BTreeMap::new();
        for m in 1..=level {
            for i in 0..=m {
                cofaces.insert((i, m), ChainMap::identity(&levels[m]));
            }
            for i in 0..m {
                codegeneracies.insert((i, m), ChainMap::identity(&levels[m]));
            }
        }
        let products =
            vec![BTreeMap::from([((0, 0), Matrix::identity(1))]); level + 1];
        let units = vec![vec![Scalar::one()]; level + 1];
        CosimplicialDGA::new(levels, cofaces, codegeneracies, products, units).unwrap()
    }

    fn chain_bar_dga(points: usize, n_max: usize) -> CosimplicialDGA {
        let site = FiniteSite::chain(points);
        let whole = site.whole();
        let alg = SheafAlgebra::constant_line(site);
        bar_dga(&alg, &whole, n_max).unwrap()
    }

    #[test]
    fn constant_families_have_line_cohomology() {
        let src = constant_dga(4);
        let t = ts_normalize(&src, 4, 2).unwrap();
        assert_eq!(t.complex().cohomology(0).dim, 1);
        for q in 1..3 {
            assert_eq!(t.complex().cohomology(q).dim, 0, "degree {q}");
        }
        let u = t.unit().unwrap();
        assert!(!u.is_zero());
        assert!(t.differential(&u).is_zero());
        assert_eq!(ts_product(&t, &u, &u).unwrap(), u);
    }

    #[test]
    fn rejects_levels_beyond_the_truncation() {
        let src = constant_dga(2);
        assert!(matches!(
            ts_normalize(&src, 3, 0),
            Err(Error::TruncationExceeded { level: 3, limit: 2 })
        ));
    }

    #[test]
    fn family_dimensions_dominate_the_normalization() {
        for src in [constant_dga(3), chain_bar_dga(2, 3)] {
            let t = ts_normalize(&src, 3, 2).unwrap();
            let module = src.module_at(0).unwrap();
            let (n, _) = normalization(&module).unwrap();
            let (lo, hi) = n.support();
            for q in lo..=hi {
                assert!(
                    t.dim(q) >= n.dim(q),
                    "degree {q}: families {} < normalization {}",
                    t.dim(q),
                    n.dim(q)
                );
            }
        }
    }

    #[test]
    fn two_point_bar_families_match_the_simple_complex() {
        let src = chain_bar_dga(2, 4);
        let t = ts_normalize(&src, 4, 1).unwrap();
        let tot = simple_total(&src, 4).unwrap();
        for q in 0..3 {
            assert_eq!(
                t.complex().cohomology(q).dim,
                tot.complex.cohomology(q).dim,
                "degree {q}"
            );
        }
        let integral = integration_map(&t).unwrap();
        for q in 0..3 {
            let rank = crate::linalg::rank(&integral.induced_map(q));
            assert_eq!(rank, t.complex().cohomology(q).dim, "degree {q} injects");
            assert_eq!(rank, tot.complex.cohomology(q).dim, "degree {q} surjects");
        }
    }

    #[test]
    fn compatibility_is_closed_under_the_differential() {
        let src = chain_bar_dga(2, 3);
        let t = ts_normalize(&src, 3, 1).unwrap();
        let (lo, hi) = t.complex().support();
        for q in lo..=hi {
            let lhs = t.ambient_differential(q).mul(&t.basis(q));
            let rhs = t.basis(q + 1).mul(&t.complex().d(q));
            assert_eq!(lhs, rhs, "degree {q}");
        }
    }

    #[test]
    fn products_are_graded_commutative_and_satisfy_leibniz() {
        let site = FiniteSite::point();
        let alg = SheafAlgebra::exterior_point();
        let src = bar_dga(&alg, &site.whole(), 3).unwrap();
        let t = ts_normalize(&src, 3, 1).unwrap();
        let (lo, hi) = t.complex().support();
        let mut checked = 0usize;
        for qx in lo..=hi.min(2) {
            for qy in lo..=hi.min(2) {
                for jx in 0..t.dim(qx) {
                    for jy in 0..t.dim(qy) {
                        let x = t.basis_element(qx, jx);
                        let y = t.basis_element(qy, jy);
                        let Ok(xy) = ts_product(&t, &x, &y) else { continue };
                        let yx = ts_product(&t, &y, &x).unwrap();
                        let sign = if (qx * qy) % 2 == 0 {
                            Scalar::one()
                        } else {
                            -Scalar::one()
                        };
                        assert_eq!(xy, yx.scale(&sign), "commutativity at ({qx},{qy})");
                        let (Ok(dx_y), Ok(x_dy)) = (
                            ts_product(&t, &t.differential(&x), &y),
                            ts_product(&t, &x, &t.differential(&y)),
                        ) else {
                            continue;
                        };
                        let sx = if qx % 2 == 0 { Scalar::one() } else { -Scalar::one() };
                        let expected = dx_y.add(&x_dy.scale(&sx)).unwrap();
                        assert_eq!(
                            t.differential(&xy),
                            expected,
                            "Leibniz at ({qx},{qy})"
                        );
                        checked += 1;
                    }
                }
            }
        }
        assert!(checked >= 4, "only {checked} pairs were checkable");
        let u = t.unit().unwrap();
        for q in lo..=hi.min(2) {
            for j in 0..t.dim(q) {
                let x = t.basis_element(q, j);
                assert_eq!(ts_product(&t, &u, &x).unwrap(), x, "unit law at {q}");
            }
        }
    }

    #[test]
    fn expansion_reports_monomials_past_the_bound() {
        let fb = FormBases::new(2, 1);
        let quadratic =
            PolyForm::monomial(2, &[2, 0], &[], Scalar::one()).unwrap();
        assert!(matches!(
            fb.expand(&quadratic, 2, 0),
            Err(Error::TruncationExceeded { level: 2, limit: 1 })
        ));
    }

    #[test]
    fn integration_is_multiplicative_up_to_coboundary() {
        let src = chain_bar_dga(2, 3);
        let t = ts_normalize(&src, 3, 1).unwrap();
        let tot = simple_total(&src, 3).unwrap();
        let integral = integration_map(&t).unwrap();
        let mut checked = 0usize;
        let (lo, hi) = t.complex().support();
        for qx in lo..=hi.min(1) {
            for qy in lo..=hi.min(1) {
                if qx + qy >= 2 {
                    continue;
                }
                let cx = t.complex().cohomology(qx).cycles;
                let cy = t.complex().cohomology(qy).cycles;
                for jx in 0..cx.dim() {
                    for jy in 0..cy.dim() {
                        let x = TsElement { degree: qx, coords: cx.basis().column(jx) };
                        let y = TsElement { degree: qy, coords: cy.basis().column(jy) };
                        assert!(t.differential(&x).is_zero());
                        assert!(t.differential(&y).is_zero());
                        let Ok(xy) = ts_product(&t, &x, &y) else { continue };
                        let int_xy = unpack_total(
                            &tot,
                            qx + qy,
                            &integral.comp(qx + qy).apply(&xy.coords),
                        );
                        let int_x =
                            unpack_total(&tot, qx, &integral.comp(qx).apply(&x.coords));
                        let int_y =
                            unpack_total(&tot, qy, &integral.comp(qy).apply(&y.coords));
                        let aw =
                            crate::cosimplicial::alexander_whitney(&src, &int_x, &int_y)
                                .unwrap();
                        let diff = int_xy.sub(&aw);
                        assert!(
                            is_total_coboundary(&src, &diff).unwrap(),
                            "defect at ({qx},{qy}) is not a coboundary"
                        );
                        checked += 1;
                    }
                }
            }
        }
        assert!(checked >= 1, "no cocycle pairs were checkable");
    }

    #[test]
    fn stabilization_scan_settles_at_degree_zero_for_constants() {
        let src = constant_dga(4);
        let report = stabilization_scan(&src, 4, &[0, 1, 2]).unwrap();
        assert!(report.is_ok(), "{report}");
        let stable = report
            .checks
            .iter()
            .find(|c| c.label.contains("stabilize within"))
            .unwrap();
        assert_eq!(stable.detail, "stable from degree bound 0");
    }

    #[test]
    fn scan_of_the_two_point_bar_matches_the_simple_complex() {
        let src = chain_bar_dga(2, 3);
        let report = stabilization_scan(&src, 3, &[0, 1]).unwrap();
        let table = report
            .checks
            .iter()
            .find(|c| c.label.contains("match the total complex"))
            .unwrap();
        assert!(table.ok, "{report}");
        let simple = simple_complex(&src.module_at(0).unwrap()).unwrap();
        assert_eq!(simple.cohomology(0).dim, 1);
    }
}
