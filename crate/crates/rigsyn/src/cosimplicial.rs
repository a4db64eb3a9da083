//! Truncated cosimplicial modules and differential graded algebras.
//!
//! A cosimplicial module stores finite-dimensional levels `M^0..M^L` with
//! coface matrices `δ_i: M^{m−1} → M^m` and codegeneracy matrices
//! `σ_i: M^m → M^{m−1}`. The module offers identity validation, the simple
//! complex (alternating coface sums), and the normalization (intersection
//! of codegeneracy kernels). Cosimplicial DGAs add per-level products and
//! the Alexander–Whitney product on the associated total object.

use crate::complex::{ChainMap, Complex};
use crate::double::{DoubleComplex, TotComplex};
use crate::error::Error;
use crate::linalg::{image_basis, kernel_basis, solve};
use crate::matrix::Matrix;
use crate::report::Report;
use crate::{Result, Scalar};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A cosimplicial module truncated at level `L`.
///
/// Shapes are enforced at construction; the cosimplicial identities are the
/// business of [`validate`], which reports rather than rejects.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CosimplicialWire", into = "CosimplicialWire")]
pub struct CosimplicialModule {
    dims: Vec<usize>,
    cofaces: BTreeMap<(usize, usize), Matrix>,
    codegeneracies: BTreeMap<(usize, usize), Matrix>,
}

impl CosimplicialModule {
    /// Builds a module from level dimensions and structure matrices keyed by
    /// `(i, m)`: coface `δ_i(m): M^{m−1} → M^m` for `0 ≤ i ≤ m ≤ L`,
    /// codegeneracy `σ_i(m): M^m → M^{m−1}` for `0 ≤ i ≤ m − 1`. Every map
    /// in range must be present with matching shape.
    pub fn new(
        dims: Vec<usize>,
        cofaces: BTreeMap<(usize, usize), Matrix>,
        codegeneracies: BTreeMap<(usize, usize), Matrix>,
    ) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::invalid("levels", "at least level 0 is required"));
        }
        let level = dims.len() - 1;
        for m in 1..=level {
            for i in 0..=m {
                let d = cofaces.get(&(i, m)).ok_or(Error::MissingStructure {
                    detail: format!("coface ({i}, {m})"),
                })?;
                if d.rows() != dims[m] || d.cols() != dims[m - 1] {
                    return Err(Error::invalid(
                        "coface shape",
                        format!("({i}, {m}) is {}x{}", d.rows(), d.cols()),
                    ));
                }
            }
            for i in 0..m {
                let s = codegeneracies.get(&(i, m)).ok_or(Error::MissingStructure {
                    detail: format!("codegeneracy ({i}, {m})"),
                })?;
                if s.rows() != dims[m - 1] || s.cols() != dims[m] {
                    return Err(Error::invalid(
                        "codegeneracy shape",
                        format!("({i}, {m}) is {}x{}", s.rows(), s.cols()),
                    ));
                }
            }
        }
        for &(i, m) in cofaces.keys() {
            if m < 1 || m > level || i > m {
                return Err(Error::invalid("coface index", format!("({i}, {m})")));
            }
        }
        for &(i, m) in codegeneracies.keys() {
            if m < 1 || m > level || i >= m {
                return Err(Error::invalid("codegeneracy index", format!("({i}, {m})")));
            }
        }
        Ok(CosimplicialModule { dims, cofaces, codegeneracies })
    }

    /// Truncation level `L`.
    pub fn level(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn dim(&self, m: usize) -> usize {
        self.dims[m]
    }

    pub fn coface(&self, i: usize, m: usize) -> &Matrix {
        &self.cofaces[&(i, m)]
    }

    pub fn codegeneracy(&self, i: usize, m: usize) -> &Matrix {
        &self.codegeneracies[&(i, m)]
    }
}

#[derive(Serialize, Deserialize)]
struct CosimplicialWire {
    dims: Vec<usize>,
    cofaces: Vec<(usize, usize, Matrix)>,
    codegeneracies: Vec<(usize, usize, Matrix)>,
}

impl From<CosimplicialModule> for CosimplicialWire {
    fn from(m: CosimplicialModule) -> Self {
        CosimplicialWire {
            dims: m.dims,
            cofaces: m.cofaces.into_iter().map(|((i, l), x)| (i, l, x)).collect(),
            codegeneracies: m
                .codegeneracies
                .into_iter()
                .map(|((i, l), x)| (i, l, x))
                .collect(),
        }
    }
}

impl TryFrom<CosimplicialWire> for CosimplicialModule {
    type Error = Error;

    fn try_from(w: CosimplicialWire) -> Result<Self> {
        let mut cofaces = BTreeMap::new();
        for (i, m, x) in w.cofaces {
            if cofaces.insert((i, m), x).is_some() {
                return Err(Error::invalid("coface keys", format!("duplicate ({i}, {m})")));
            }
        }
        let mut codegeneracies = BTreeMap::new();
        for (i, m, x) in w.codegeneracies {
            if codegeneracies.insert((i, m), x).is_some() {
                return Err(Error::invalid(
                    "codegeneracy keys",
                    format!("duplicate ({i}, {m})"),
                ));
            }
        }
        CosimplicialModule::new(w.dims, cofaces, codegeneracies)
    }
}

/// Checks every cosimplicial identity within the truncation window and
/// reports each one individually.
pub fn validate(m: &CosimplicialModule) -> Report {
    let level = m.level();
    let mut report = Report::new("cosimplicial identities".to_string());
    for lv in 1..level {
        for j in 1..=(lv + 1) {
            for i in 0..j {
                let lhs = m.coface(j, lv + 1).mul(m.coface(i, lv));
                let rhs = m.coface(i, lv + 1).mul(m.coface(j - 1, lv));
                report.require(
                    format!("coface identity (i={i}, j={j}, m={lv})"),
                    lhs == rhs,
                    "delta_j delta_i = delta_i delta_{j-1}".to_string(),
                );
            }
        }
    }
    for lv in 2..=level {
        for j in 0..=(lv - 2) {
            for i in 0..=j {
                let lhs = m.codegeneracy(j, lv - 1).mul(m.codegeneracy(i, lv));
                let rhs = m.codegeneracy(i, lv - 1).mul(m.codegeneracy(j + 1, lv));
                report.require(
                    format!("codegeneracy identity (i={i}, j={j}, m={lv})"),
                    lhs == rhs,
                    "sigma_j sigma_i = sigma_i sigma_{j+1}".to_string(),
                );
            }
        }
    }
    for lv in 1..=level {
        for j in 0..lv {
            for i in 0..=lv {
                let lhs = m.codegeneracy(j, lv).mul(m.coface(i, lv));
                let (rhs, law) = if i == j || i == j + 1 {
                    (Matrix::identity(m.dim(lv - 1)), "identity")
                } else if i < j {
                    (
                        m.coface(i, lv - 1).mul(m.codegeneracy(j - 1, lv - 1)),
                        "delta_i sigma_{j-1}",
                    )
                } else {
                    (
                        m.coface(i - 1, lv - 1).mul(m.codegeneracy(j, lv - 1)),
                        "delta_{i-1} sigma_j",
                    )
                };
                report.require(
                    format!("mixed identity (i={i}, j={j}, m={lv})"),
                    lhs == rhs,
                    format!("sigma_j delta_i = {law}"),
                );
            }
        }
    }
    report
}

/// The simple complex: `sM^q = M^q` with differential
/// `Σ_{i=0}^{q+1} (−1)^i δ_i`, truncated at the module's level.
pub fn simple_complex(m: &CosimplicialModule) -> Result<Complex> {
    let level = m.level();
    let mut dims = BTreeMap::new();
    for (q, &d) in m.dims.iter().enumerate() {
        if d > 0 {
            dims.insert(q as i64, d);
        }
    }
    let mut d = BTreeMap::new();
    for q in 0..level {
        let mut total = Matrix::zero(m.dim(q + 1), m.dim(q));
        for i in 0..=(q + 1) {
            let face = m.coface(i, q + 1);
            total = if i % 2 == 0 { total.add(face) } else { total.sub(face) };
        }
        if !total.is_zero_matrix() {
            d.insert(q as i64, total);
        }
    }
    Complex::new(dims, d)
}

/// The normalization `N^q = ∩_i ker(σ_i)` with its inclusion into the
/// simple complex; the differential restricts to the kernels.
pub fn normalization(m: &CosimplicialModule) -> Result<(Complex, ChainMap)> {
    let level = m.level();
    let s = simple_complex(m)?;
    let mut bases: Vec<Matrix> = Vec::new();
    for q in 0..=level {
        if q == 0 {
            bases.push(Matrix::identity(m.dim(0)));
            continue;
        }
        let mut stacked = Matrix::zero(0, m.dim(q));
        for i in 0..q {
            stacked = stacked.vstack(m.codegeneracy(i, q));
        }
        let kernel = kernel_basis(&stacked);
        bases.push(Matrix::from_columns(m.dim(q), &kernel));
    }
    let mut dims = BTreeMap::new();
    let mut dn = BTreeMap::new();
    let mut inc = BTreeMap::new();
    for (q, basis) in bases.iter().enumerate() {
        if basis.cols() == 0 {
            continue;
        }
        dims.insert(q as i64, basis.cols());
        inc.insert(q as i64, basis.clone());
        if q < level && bases[q + 1].cols() > 0 {
            let image = s.d(q as i64).mul(basis);
            dn.insert(q as i64, solve(&bases[q + 1], &image)?);
        }
    }
    let n = Complex::new(dims, dn)?;
    let inclusion = ChainMap::new(n.clone(), s, inc)?;
    Ok((n, inclusion))
}

/// A cosimplicial differential graded algebra truncated at level `L`:
/// levels are complexes, structure maps are chain maps, and each level
/// carries a unital, associative, graded-commutative product stored as
/// degreewise structure matrices against row-major tensor coordinates.
#[derive(Clone, Debug)]
pub struct CosimplicialDGA {
    levels: Vec<Complex>,
    cofaces: BTreeMap<(usize, usize), ChainMap>,
    codegeneracies: BTreeMap<(usize, usize), ChainMap>,
    products: Vec<BTreeMap<(i64, i64), Matrix>>,
    units: Vec<Vec<Scalar>>,
}

pub(crate) fn chain_maps_equal(f: &ChainMap, g: &ChainMap) -> bool {
    if f.source() != g.source() || f.target() != g.target() {
        return false;
    }
    let (lo, hi) = f.source().support();
    (lo..=hi).all(|n| f.comp(n) == g.comp(n))
}

impl CosimplicialDGA {
    pub fn new(
        levels: Vec<Complex>,
        cofaces: BTreeMap<(usize, usize), ChainMap>,
        codegeneracies: BTreeMap<(usize, usize), ChainMap>,
        products: Vec<BTreeMap<(i64, i64), Matrix>>,
        units: Vec<Vec<Scalar>>,
    ) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::invalid("levels", "at least level 0 is required"));
        }
        let level = levels.len() - 1;
        if products.len() != levels.len() || units.len() != levels.len() {
            return Err(Error::invalid(
                "level data",
                "products and units must cover every level",
            ));
        }
        let dga = CosimplicialDGA { levels, cofaces, codegeneracies, products, units };
        for m in 1..=level {
            for i in 0..=m {
                let f = dga.cofaces.get(&(i, m)).ok_or(Error::MissingStructure {
                    detail: format!("coface ({i}, {m})"),
                })?;
                if f.source() != &dga.levels[m - 1] || f.target() != &dga.levels[m] {
                    return Err(Error::invalid("coface endpoints", format!("({i}, {m})")));
                }
            }
            for i in 0..m {
                let f = dga.codegeneracies.get(&(i, m)).ok_or(Error::MissingStructure {
                    detail: format!("codegeneracy ({i}, {m})"),
                })?;
                if f.source() != &dga.levels[m] || f.target() != &dga.levels[m - 1] {
                    return Err(Error::invalid(
                        "codegeneracy endpoints",
                        format!("({i}, {m})"),
                    ));
                }
            }
        }
        dga.check_cosimplicial_identities()?;
        for m in 0..=level {
            dga.check_level_algebra(m)?;
        }
        dga.check_structure_morphisms()?;
        Ok(dga)
    }

    fn check_cosimplicial_identities(&self) -> Result<()> {
        let level = self.truncation();
        for lv in 1..level {
            for j in 1..=(lv + 1) {
                for i in 0..j {
                    let lhs = self.coface(j, lv + 1).compose(self.coface(i, lv))?;
                    let rhs = self.coface(i, lv + 1).compose(self.coface(j - 1, lv))?;
                    if !chain_maps_equal(&lhs, &rhs) {
                        return Err(Error::invalid(
                            "cosimplicial identity",
                            format!("coface (i={i}, j={j}, m={lv})"),
                        ));
                    }
                }
            }
        }
        for lv in 1..=level {
            for j in 0..lv {
                for i in 0..=lv {
                    let lhs =
                        self.codegeneracy(j, lv).compose(self.coface(i, lv))?;
                    let rhs = if i == j || i == j + 1 {
                        ChainMap::identity(&self.levels[lv - 1])
                    } else if i < j {
                        self.coface(i, lv - 1)
                            .compose(self.codegeneracy(j - 1, lv - 1))?
                    } else {
                        self.coface(i - 1, lv - 1)
                            .compose(self.codegeneracy(j, lv - 1))?
                    };
                    if !chain_maps_equal(&lhs, &rhs) {
                        return Err(Error::invalid(
                            "cosimplicial identity",
                            format!("mixed (i={i}, j={j}, m={lv})"),
                        ));
                    }
                }
            }
        }
        for lv in 2..=level {
            for j in 0..=(lv - 2) {
                for i in 0..=j {
                    let lhs =
                        self.codegeneracy(j, lv - 1).compose(self.codegeneracy(i, lv))?;
                    let rhs =
                        self.codegeneracy(i, lv - 1).compose(self.codegeneracy(j + 1, lv))?;
                    if !chain_maps_equal(&lhs, &rhs) {
                        return Err(Error::invalid(
                            "cosimplicial identity",
                            format!("codegeneracy (i={i}, j={j}, m={lv})"),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_level_algebra(&self, m: usize) -> Result<()> {
        let c = &self.levels[m];
        let (lo, hi) = c.support();
        let unit = &self.units[m];
        if unit.len() != c.dim(0) {
            return Err(Error::invalid("unit", format!("level {m} unit has wrong size")));
        }
        for a in lo..=hi {
            for b in lo..=hi {
                let mu = self.product_comp(m, a, b);
                if mu.rows() != c.dim(a + b) || mu.cols() != c.dim(a) * c.dim(b) {
                    return Err(Error::invalid(
                        "product shape",
                        format!("level {m}, degrees ({a}, {b})"),
                    ));
                }
                // Graded commutativity against the tensor swap.
                let swapped = self.product_comp(m, b, a).mul(&swap_matrix(c.dim(a), c.dim(b)));
                let expected =
                    if (a * b) % 2 == 0 { swapped.clone() } else { swapped.neg() };
                if mu != expected {
                    return Err(Error::invalid(
                        "graded commutativity",
                        format!("level {m}, degrees ({a}, {b})"),
                    ));
                }
                // Leibniz: d ∘ μ = μ ∘ (d ⊗ id + (−1)^a id ⊗ d).
                let left = c.d(a + b).mul(&mu);
                let mut right = self
                    .product_comp(m, a + 1, b)
                    .mul(&Matrix::kronecker(&c.d(a), &Matrix::identity(c.dim(b))));
                let second = self
                    .product_comp(m, a, b + 1)
                    .mul(&Matrix::kronecker(&Matrix::identity(c.dim(a)), &c.d(b)));
                right = if a % 2 == 0 { right.add(&second) } else { right.sub(&second) };
                if left != right {
                    return Err(Error::invalid(
                        "product Leibniz",
                        format!("level {m}, degrees ({a}, {b})"),
                    ));
                }
                for e in lo..=hi {
                    let assoc_l = self
                        .product_comp(m, a + b, e)
                        .mul(&Matrix::kronecker(&mu, &Matrix::identity(c.dim(e))));
                    let assoc_r = self.product_comp(m, a, b + e).mul(&Matrix::kronecker(
                        &Matrix::identity(c.dim(a)),
                        &self.product_comp(m, b, e),
                    ));
                    if assoc_l != assoc_r {
                        return Err(Error::invalid(
                            "associativity",
                            format!("level {m}, degrees ({a}, {b}, {e})"),
                        ));
                    }
                }
            }
            // Unit laws in degree a.
            let dim = c.dim(a);
            if dim == 0 {
                continue;
            }
            let mut left_unit = Matrix::zero(dim, dim);
            let mu_l = self.product_comp(m, 0, a);
            for col in 0..dim {
                let mut tensor = vec![Scalar::zero(); unit.len() * dim];
                for (u_idx, u) in unit.iter().enumerate() {
                    tensor[u_idx * dim + col] = u.clone();
                }
                let out = mu_l.apply(&tensor);
                for (row, v) in out.into_iter().enumerate() {
                    left_unit.set(row, col, v);
                }
            }
            if left_unit != Matrix::identity(dim) {
                return Err(Error::invalid("unit law", format!("level {m}, degree {a}")));
            }
        }
        Ok(())
    }

    fn check_structure_morphisms(&self) -> Result<()> {
        let maps: Vec<(&ChainMap, usize, usize)> = self
            .cofaces
            .iter()
            .map(|(&(_, m), f)| (f, m - 1, m))
            .chain(self.codegeneracies.iter().map(|(&(_, m), f)| (f, m, m - 1)))
            .collect();
        for (f, src, tgt) in maps {
            let c = &self.levels[src];
            let (lo, hi) = c.support();
            for a in lo..=hi {
                for b in lo..=hi {
                    let lhs = f.comp(a + b).mul(&self.product_comp(src, a, b));
                    let rhs = self
                        .product_comp(tgt, a, b)
                        .mul(&Matrix::kronecker(&f.comp(a), &f.comp(b)));
                    if lhs != rhs {
                        return Err(Error::invalid(
                            "structure map multiplicativity",
                            format!("levels {src} -> {tgt}, degrees ({a}, {b})"),
                        ));
                    }
                }
            }
            if f.comp(0).apply(&self.units[src]) != self.units[tgt] {
                return Err(Error::invalid(
                    "structure map unit",
                    format!("levels {src} -> {tgt}"),
                ));
            }
        }
        Ok(())
    }

    pub fn truncation(&self) -> usize {
        self.levels.len() - 1
    }

    /// The cosimplicial vector space sitting in one internal degree: level
    /// dimensions and structure matrices all taken at degree `r`.
    pub fn module_at(&self, r: i64) -> Result<CosimplicialModule> {
        let dims: Vec<usize> = self.levels.iter().map(|c| c.dim(r)).collect();
        let mut cofaces = BTreeMap::new();
        let mut codegeneracies = BTreeMap::new();
        for m in 1..=self.truncation() {
            for i in 0..=m {
                cofaces.insert((i, m), self.coface(i, m).comp(r));
            }
            for i in 0..m {
                codegeneracies.insert((i, m), self.codegeneracy(i, m).comp(r));
            }
        }
        CosimplicialModule::new(dims, cofaces, codegeneracies)
    }

    pub fn level(&self, m: usize) -> &Complex {
        &self.levels[m]
    }

    pub fn coface(&self, i: usize, m: usize) -> &ChainMap {
        &self.cofaces[&(i, m)]
    }

    pub fn codegeneracy(&self, i: usize, m: usize) -> &ChainMap {
        &self.codegeneracies[&(i, m)]
    }

    /// The product component `level_m^a ⊗ level_m^b → level_m^{a+b}`,
    /// materialized as zero when absent.
    pub fn product_comp(&self, m: usize, a: i64, b: i64) -> Matrix {
        let c = &self.levels[m];
        self.products[m]
            .get(&(a, b))
            .cloned()
            .unwrap_or_else(|| Matrix::zero(c.dim(a + b), c.dim(a) * c.dim(b)))
    }

    /// The unit of level `m` as an element.
    pub fn unit(&self, m: usize) -> DgaElement {
        DgaElement { level: m, degree: 0, coords: self.units[m].clone() }
    }

    fn multiply(&self, m: usize, a: &DgaElement, b: &DgaElement) -> DgaElement {
        let mut tensor = vec![Scalar::zero(); a.coords.len() * b.coords.len()];
        for (i, x) in a.coords.iter().enumerate() {
            for (j, y) in b.coords.iter().enumerate() {
                tensor[i * b.coords.len() + j] = x.clone() * y.clone();
            }
        }
        DgaElement {
            level: m,
            degree: a.degree + b.degree,
            coords: self.product_comp(m, a.degree, b.degree).apply(&tensor),
        }
    }
}

fn swap_matrix(dim_a: usize, dim_b: usize) -> Matrix {
    // V_a ⊗ V_b → V_b ⊗ V_a in row-major coordinates.
    let mut m = Matrix::zero(dim_a * dim_b, dim_a * dim_b);
    for i in 0..dim_a {
        for j in 0..dim_b {
            m.set(j * dim_a + i, i * dim_b + j, Scalar::one());
        }
    }
    m
}

/// A homogeneous component of the total object: a vector sitting at
/// cosimplicial level `level` and internal chain degree `degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DgaElement {
    pub level: usize,
    pub degree: i64,
    pub coords: Vec<Scalar>,
}

/// A finite sum of homogeneous components, keyed by (level, degree).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TotalElement {
    parts: BTreeMap<(usize, i64), Vec<Scalar>>,
}

impl TotalElement {
    pub fn zero() -> Self {
        TotalElement::default()
    }

    pub fn parts(&self) -> impl Iterator<Item = DgaElement> + '_ {
        self.parts.iter().map(|(&(level, degree), coords)| DgaElement {
            level,
            degree,
            coords: coords.clone(),
        })
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn add_part(&mut self, e: &DgaElement) {
        if e.coords.iter().all(|c| c.is_zero()) {
            return;
        }
        let slot = self
            .parts
            .entry((e.level, e.degree))
            .or_insert_with(|| vec![Scalar::zero(); e.coords.len()]);
        for (s, c) in slot.iter_mut().zip(&e.coords) {
            *s = s.clone() + c.clone();
        }
        if slot.iter().all(|c| c.is_zero()) {
            self.parts.remove(&(e.level, e.degree));
        }
    }

    pub fn add(&self, other: &TotalElement) -> TotalElement {
        let mut out = self.clone();
        for p in other.parts() {
            out.add_part(&p);
        }
        out
    }

    pub fn neg(&self) -> TotalElement {
        let mut out = TotalElement::zero();
        for mut p in self.parts() {
            for c in &mut p.coords {
                *c = -c.clone();
            }
            out.add_part(&p);
        }
        out
    }

    pub fn sub(&self, other: &TotalElement) -> TotalElement {
        self.add(&other.neg())
    }
}

impl From<DgaElement> for TotalElement {
    fn from(e: DgaElement) -> Self {
        let mut t = TotalElement::zero();
        t.add_part(&e);
        t
    }
}

/// The total differential `D = Σ (−1)^i δ_i + (−1)^{level} d` on total
/// elements; components that would climb past the truncation level are
/// rejected.
pub fn total_differential(dga: &CosimplicialDGA, x: &TotalElement) -> Result<TotalElement> {
    let mut out = TotalElement::zero();
    for part in x.parts() {
        if part.level + 1 > dga.truncation() {
            return Err(Error::TruncationExceeded {
                level: part.level + 1,
                limit: dga.truncation(),
            });
        }
        let mut horizontal =
            vec![Scalar::zero(); dga.level(part.level + 1).dim(part.degree)];
        for i in 0..=(part.level + 1) {
            let image = dga.coface(i, part.level + 1).comp(part.degree).apply(&part.coords);
            for (h, v) in horizontal.iter_mut().zip(image) {
                *h = if i % 2 == 0 { h.clone() + v } else { h.clone() - v };
            }
        }
        out.add_part(&DgaElement {
            level: part.level + 1,
            degree: part.degree,
            coords: horizontal,
        });
        let mut vertical = dga.level(part.level).d(part.degree).apply(&part.coords);
        if part.level % 2 == 1 {
            for v in &mut vertical {
                *v = -v.clone();
            }
        }
        out.add_part(&DgaElement {
            level: part.level,
            degree: part.degree + 1,
            coords: vertical,
        });
    }
    Ok(out)
}

/// The Alexander–Whitney product: each pair of components multiplies as
/// `(−1)^{deg(a)·level(b)} · front(a) · back(b)` at level
/// `level(a) + level(b)`, where `front` climbs by the top cofaces and
/// `back` by the zeroth.
pub fn alexander_whitney(
    dga: &CosimplicialDGA,
    x: &TotalElement,
    y: &TotalElement,
) -> Result<TotalElement> {
    let mut out = TotalElement::zero();
    for a in x.parts() {
        for b in y.parts() {
            let target = a.level + b.level;
            if target > dga.truncation() {
                return Err(Error::TruncationExceeded {
                    level: target,
                    limit: dga.truncation(),
                });
            }
            let mut front = a.coords.clone();
            for m in (a.level + 1)..=target {
                front = dga.coface(m, m).comp(a.degree).apply(&front);
            }
            let mut back = b.coords.clone();
            for m in (b.level + 1)..=target {
                back = dga.coface(0, m).comp(b.degree).apply(&back);
            }
            let mut product = dga.multiply(
                target,
                &DgaElement { level: target, degree: a.degree, coords: front },
                &DgaElement { level: target, degree: b.degree, coords: back },
            );
            if (a.degree * b.level as i64) % 2 != 0 {
                for c in &mut product.coords {
                    *c = -c.clone();
                }
            }
            out.add_part(&product);
        }
    }
    Ok(out)
}

/// The bigraded total complex of a cosimplicial DGA: horizontal direction
/// the alternating coface sums, vertical the level differentials with the
/// level-parity sign.
pub fn dga_total(dga: &CosimplicialDGA) -> Result<TotComplex> {
    let mut dims = BTreeMap::new();
    let mut dh = BTreeMap::new();
    let mut dv = BTreeMap::new();
    for (m, c) in dga.levels.iter().enumerate() {
        let (lo, hi) = c.support();
        for q in lo..=hi {
            if c.dim(q) == 0 {
                continue;
            }
            dims.insert((m as i64, q), c.dim(q));
            if m < dga.truncation() {
                let mut total = Matrix::zero(dga.level(m + 1).dim(q), c.dim(q));
                for i in 0..=(m + 1) {
                    let face = dga.coface(i, m + 1).comp(q);
                    total = if i % 2 == 0 { total.add(&face) } else { total.sub(&face) };
                }
                if !total.is_zero_matrix() {
                    dh.insert((m as i64, q), total);
                }
            }
            let vert = if m % 2 == 0 { c.d(q) } else { c.d(q).neg() };
            if !vert.is_zero_matrix() {
                dv.insert((m as i64, q), vert);
            }
        }
    }
    Ok(DoubleComplex::new(dims, dh, dv)?.tot())
}

/// Unpacks a coordinate vector of a total complex at degree `n` into its
/// (level, internal degree) components.
pub fn unpack_total(tot: &TotComplex, n: i64, v: &[Scalar]) -> TotalElement {
    let mut out = TotalElement::zero();
    for b in tot.blocks(n) {
        out.add_part(&DgaElement {
            level: b.p as usize,
            degree: b.q,
            coords: tot.extract(b.p, b.q, v),
        });
    }
    out
}

/// Checks that a total element is a coboundary in the total complex.
pub fn is_total_coboundary(dga: &CosimplicialDGA, x: &TotalElement) -> Result<bool> {
    if x.is_zero() {
        return Ok(true);
    }
    let tot = dga_total(dga)?;
    let degrees: Vec<i64> = x.parts().map(|p| p.level as i64 + p.degree).collect();
    let n = degrees[0];
    if degrees.iter().any(|&d| d != n) {
        return Err(Error::invalid(
            "total degree",
            "coboundary test needs a homogeneous element",
        ));
    }
    let mut vec = vec![Scalar::zero(); tot.complex.dim(n)];
    for p in x.parts() {
        let embedded = tot.embed(p.level as i64, p.degree, &p.coords);
        for (v, e) in vec.iter_mut().zip(embedded) {
            *v = v.clone() + e;
        }
    }
    let image = image_basis(&tot.complex.d(n - 1));
    Ok(image.contains(&vec))
}
