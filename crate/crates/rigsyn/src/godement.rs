//! Godement bar resolutions for sheaves on finite poset sites.
//!
//! Points carry a specialization order (`a ≤ b` reads "b is a generization
//! of a") and opens are the up-sets of that order, so the minimal open
//! around a point is its generization set. A sheaf is a functor on the
//! poset: a stalk complex per point with generization chain maps. The bar
//! construction iterates the points functor: the stalk of the n-th level
//! at p is a direct sum over weak chains p ≤ c_0 ≤ ... ≤ c_n of the stalk
//! at the chain's top, and the structure maps are chain insertions and
//! collapses.

use crate::complex::{ChainMap, Complex};
use crate::cosimplicial::{chain_maps_equal, CosimplicialDGA, CosimplicialModule};
use crate::double::DoubleComplex;
use crate::error::Error;
use crate::linalg::{kernel_basis, solve};
use crate::matrix::Matrix;
use crate::report::Report;
use crate::{Result, Scalar};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A finite poset with its Alexandrov topology of up-sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SiteWire", into = "SiteWire")]
pub struct FiniteSite {
    names: Vec<String>,
    leq: Vec<Vec<bool>>,
}

impl FiniteSite {
    /// Builds a site from point names and generating relations `a ≤ b`,
    /// closing under reflexivity and transitivity.
    pub fn new(names: Vec<String>, relations: &[(usize, usize)]) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::invalid("site", "at least one point is required"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for name in &names {
            if !seen.insert(name.clone()) {
                return Err(Error::invalid("site", format!("duplicate point {name}")));
            }
        }
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in relations {
            if a >= n || b >= n {
                return Err(Error::invalid("order", format!("pair ({a}, {b}) out of range")));
            }
            leq[a][b] = true;
        }
        // Floyd-Warshall style transitive closure.
        for k in 0..n {
            for a in 0..n {
                if leq[a][k] {
                    for b in 0..n {
                        if leq[k][b] {
                            leq[a][b] = true;
                        }
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                if a != b && leq[a][b] && leq[b][a] {
                    return Err(Error::invalid(
                        "order",
                        format!("points {} and {} are mutually comparable", names[a], names[b]),
                    ));
                }
            }
        }
        Ok(FiniteSite { names, leq })
    }

    pub fn point() -> Self {
        FiniteSite::new(vec!["pt".to_string()], &[]).unwrap()
    }

    /// A totally ordered site `p0 ≤ p1 ≤ ...`; `p0` is the closed point and
    /// the last point is the generic one.
    pub fn chain(n: usize) -> Self {
        let names = (0..n).map(|i| format!("p{i}")).collect();
        let relations: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        FiniteSite::new(names, &relations).unwrap()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, p: usize) -> &str {
        &self.names[p]
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    /// The minimal open around `p`: all generizations of `p`.
    pub fn min_open(&self, p: usize) -> Vec<usize> {
        (0..self.len()).filter(|&q| self.leq[p][q]).collect()
    }

    pub fn whole(&self) -> Vec<usize> {
        (0..self.len()).collect()
    }

    pub fn is_open(&self, open: &[usize]) -> bool {
        open.iter().all(|&p| p < self.len())
            && open.iter().all(|&p| self.min_open(p).iter().all(|q| open.contains(q)))
    }

    /// Every open, smallest first; exponential in the number of points.
    pub fn opens(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut out: Vec<Vec<usize>> = Vec::new();
        for mask in 0u32..(1 << n) {
            let candidate: Vec<usize> = (0..n).filter(|&p| mask & (1 << p) != 0).collect();
            if self.is_open(&candidate) {
                out.push(candidate);
            }
        }
        out.sort_by_key(|o| (o.len(), o.clone()));
        out
    }
}

#[derive(Serialize, Deserialize)]
struct SiteWire {
    points: Vec<String>,
    order: Vec<(usize, usize)>,
}

impl From<FiniteSite> for SiteWire {
    fn from(s: FiniteSite) -> Self {
        let mut order = Vec::new();
        for a in 0..s.len() {
            for b in 0..s.len() {
                if a != b && s.leq[a][b] {
                    order.push((a, b));
                }
            }
        }
        SiteWire { points: s.names, order }
    }
}

impl TryFrom<SiteWire> for FiniteSite {
    type Error = Error;

    fn try_from(w: SiteWire) -> Result<Self> {
        FiniteSite::new(w.points, &w.order)
    }
}

/// A sheaf on a finite poset site: one stalk complex per point and a
/// generization chain map for every comparable pair, composing
/// functorially. Sections over an open are the limit of the stalks.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "SheafWire", into = "SheafWire")]
pub struct PosetSheaf {
    site: FiniteSite,
    stalks: Vec<Complex>,
    gens: BTreeMap<(usize, usize), ChainMap>,
}

impl PosetSheaf {
    /// Builds a sheaf; `gens` must hold exactly the maps for distinct
    /// comparable pairs `p ≤ q`, and triangles must commute.
    pub fn new(
        site: FiniteSite,
        stalks: Vec<Complex>,
        gens: BTreeMap<(usize, usize), ChainMap>,
    ) -> Result<Self> {
        if stalks.len() != site.len() {
            return Err(Error::invalid("stalks", "one stalk per point is required"));
        }
        for p in 0..site.len() {
            for q in 0..site.len() {
                let required = p != q && site.leq(p, q);
                match gens.get(&(p, q)) {
                    Some(g) if required => {
                        if g.source() != &stalks[p] || g.target() != &stalks[q] {
                            return Err(Error::invalid(
                                "restriction endpoints",
                                format!("({p}, {q})"),
                            ));
                        }
                    }
                    Some(_) => {
                        return Err(Error::invalid(
                            "restriction keys",
                            format!("({p}, {q}) is not a comparable pair"),
                        ))
                    }
                    None if required => {
                        return Err(Error::MissingStructure {
                            detail: format!("restriction ({p}, {q})"),
                        })
                    }
                    None => {}
                }
            }
        }
        let sheaf = PosetSheaf { site, stalks, gens };
        for p in 0..sheaf.site.len() {
            for q in 0..sheaf.site.len() {
                for r in 0..sheaf.site.len() {
                    if p != q && q != r && p != r
                        && sheaf.site.leq(p, q)
                        && sheaf.site.leq(q, r)
                    {
                        let via = sheaf.gen(q, r).compose(&sheaf.gen(p, q))?;
                        if !chain_maps_equal(&via, &sheaf.gen(p, r)) {
                            return Err(Error::invalid(
                                "restriction functoriality",
                                format!("path {p} -> {q} -> {r}"),
                            ));
                        }
                    }
                }
            }
        }
        Ok(sheaf)
    }

    pub fn constant(site: FiniteSite, stalk: &Complex) -> Self {
        let mut gens = BTreeMap::new();
        for p in 0..site.len() {
            for q in 0..site.len() {
                if p != q && site.leq(p, q) {
                    gens.insert((p, q), ChainMap::identity(stalk));
                }
            }
        }
        PosetSheaf { site: site.clone(), stalks: vec![stalk.clone(); site.len()], gens }
    }

    /// The constant sheaf with one-dimensional stalks in degree 0.
    pub fn constant_line(site: FiniteSite) -> Self {
        let line =
            Complex::new([(0i64, 1usize)].into_iter().collect(), BTreeMap::new()).unwrap();
        PosetSheaf::constant(site, &line)
    }

    /// The sheaf concentrated at one point.
    pub fn skyscraper(site: FiniteSite, at: usize, stalk: &Complex) -> Self {
        let stalks: Vec<Complex> = (0..site.len())
            .map(|p| if p == at { stalk.clone() } else { Complex::zero() })
            .collect();
        let mut gens = BTreeMap::new();
        for p in 0..site.len() {
            for q in 0..site.len() {
                if p != q && site.leq(p, q) {
                    gens.insert((p, q), ChainMap::zero(&stalks[p], &stalks[q]));
                }
            }
        }
        PosetSheaf { site, stalks, gens }
    }

    pub fn site(&self) -> &FiniteSite {
        &self.site
    }

    pub fn stalk(&self, p: usize) -> &Complex {
        &self.stalks[p]
    }

    /// The generization map for `p ≤ q` (identity when `p = q`).
    pub fn gen(&self, p: usize, q: usize) -> ChainMap {
        if p == q {
            ChainMap::identity(&self.stalks[p])
        } else {
            self.gens[&(p, q)].clone()
        }
    }

    /// The degree window covering every stalk.
    fn degree_window(&self) -> (i64, i64) {
        let mut lo = 0;
        let mut hi = 0;
        for s in &self.stalks {
            let (a, b) = s.support();
            lo = lo.min(a);
            hi = hi.max(b);
        }
        (lo, hi)
    }

    /// Sections over an open: the subspace of ⊕ stalks matching under every
    /// generization map, as a complex plus its degreewise basis in the
    /// ambient direct sum (points in ascending order).
    pub fn sections(&self, open: &[usize]) -> Result<(Complex, BTreeMap<i64, Matrix>)> {
        if !self.site.is_open(open) {
            return Err(Error::invalid("open", "not an up-set of the site"));
        }
        let parts: Vec<&Complex> = open.iter().map(|&p| &self.stalks[p]).collect();
        let (lo, hi) = self.degree_window();
        let mut bases = BTreeMap::new();
        let mut dims = BTreeMap::new();
        for r in lo..=hi {
            let offsets = block_offsets(&parts, r);
            let ambient = *offsets.last().unwrap_or(&0);
            let mut constraints = Matrix::zero(0, ambient);
            for (pi, &p) in open.iter().enumerate() {
                for (qi, &q) in open.iter().enumerate() {
                    if p == q || !self.site.leq(p, q) {
                        continue;
                    }
                    let g = self.gen(p, q).comp(r);
                    let mut row = Matrix::zero(g.rows(), ambient);
                    row.paste(0, offsets[pi], &g);
                    let mut minus = Matrix::zero(g.rows(), ambient);
                    minus.paste(0, offsets[qi], &Matrix::identity(g.rows()));
                    constraints = constraints.vstack(&row.sub(&minus));
                }
            }
            let basis = Matrix::from_columns(ambient, &kernel_basis(&constraints));
            if basis.cols() > 0 {
                dims.insert(r, basis.cols());
            }
            bases.insert(r, basis);
        }
        let mut d = BTreeMap::new();
        for r in lo..hi {
            let ambient_d = Matrix::block_diag(
                &parts.iter().map(|c| c.d(r)).collect::<Vec<_>>().iter().collect::<Vec<_>>(),
            );
            let image = ambient_d.mul(&bases[&r]);
            if bases[&(r + 1)].cols() > 0 && !image.is_zero_matrix() {
                d.insert(r, solve(&bases[&(r + 1)], &image)?);
            }
        }
        Ok((Complex::new(dims, d)?, bases))
    }
}

fn block_offsets(parts: &[&Complex], degree: i64) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(parts.len() + 1);
    let mut acc = 0;
    for c in parts {
        offsets.push(acc);
        acc += c.dim(degree);
    }
    offsets.push(acc);
    offsets
}

#[derive(Serialize, Deserialize)]
struct SheafWire {
    site: FiniteSite,
    stalks: Vec<Complex>,
    restrictions: Vec<(usize, usize, BTreeMap<i64, Matrix>)>,
}

impl From<PosetSheaf> for SheafWire {
    fn from(s: PosetSheaf) -> Self {
        let restrictions = s
            .gens
            .iter()
            .map(|(&(p, q), g)| {
                let (lo, hi) = g.source().support();
                let mut comps = BTreeMap::new();
                for r in lo..=hi {
                    let m = g.comp(r);
                    if m.rows() > 0 && m.cols() > 0 {
                        comps.insert(r, m);
                    }
                }
                (p, q, comps)
            })
            .collect();
        SheafWire { site: s.site, stalks: s.stalks, restrictions }
    }
}

impl TryFrom<SheafWire> for PosetSheaf {
    type Error = Error;

    fn try_from(w: SheafWire) -> Result<Self> {
        let mut gens = BTreeMap::new();
        for (p, q, comps) in w.restrictions {
            if p >= w.stalks.len() || q >= w.stalks.len() {
                return Err(Error::invalid("restriction keys", format!("({p}, {q})")));
            }
            let map = ChainMap::new(w.stalks[p].clone(), w.stalks[q].clone(), comps)?;
            if gens.insert((p, q), map).is_some() {
                return Err(Error::invalid("restriction keys", format!("duplicate ({p}, {q})")));
            }
        }
        PosetSheaf::new(w.site, w.stalks, gens)
    }
}

/// The bar cosimplicial object `B^n = (points functor)^{n+1} F`, truncated
/// at `n_max`. Stalks are indexed by weak chains; cofaces insert a chain
/// entry (the last one through the sheaf's generization maps) and
/// codegeneracies collapse equal adjacent entries.
#[derive(Clone, Debug)]
pub struct BarCosimplicial {
    sheaf: PosetSheaf,
    n_max: usize,
    /// chains[n][p]: the weak chains p ≤ c_0 ≤ ... ≤ c_n, in lexicographic
    /// order of point indices.
    chains: Vec<Vec<Vec<Vec<usize>>>>,
    stalks: Vec<Vec<Complex>>,
}

/// Builds the bar cosimplicial object of a sheaf.
pub fn bar(f: &PosetSheaf, n_max: usize) -> Result<BarCosimplicial> {
    let site = f.site();
    let mut chains = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut per_point = Vec::with_capacity(site.len());
        for p in 0..site.len() {
            per_point.push(enumerate_chains(site, p, n + 1));
        }
        chains.push(per_point);
    }
    let mut stalks = Vec::with_capacity(n_max + 1);
    for level_chains in &chains {
        let mut per_point = Vec::with_capacity(site.len());
        for point_chains in level_chains {
            let parts: Vec<&Complex> =
                point_chains.iter().map(|c| f.stalk(*c.last().unwrap())).collect();
            per_point.push(direct_sum_complex(&parts)?);
        }
        stalks.push(per_point);
    }
    Ok(BarCosimplicial { sheaf: f.clone(), n_max, chains, stalks })
}

fn enumerate_chains(site: &FiniteSite, p: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(len);
    fn go(
        site: &FiniteSite,
        floor: usize,
        remaining: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if remaining == 0 {
            out.push(current.clone());
            return;
        }
        for q in 0..site.len() {
            if site.leq(floor, q) {
                current.push(q);
                go(site, q, remaining - 1, current, out);
                current.pop();
            }
        }
    }
    go(site, p, len, &mut current, &mut out);
    out
}

fn direct_sum_complex(parts: &[&Complex]) -> Result<Complex> {
    let mut lo = 0;
    let mut hi = 0;
    for c in parts {
        let (a, b) = c.support();
        lo = lo.min(a);
        hi = hi.max(b);
    }
    let mut dims = BTreeMap::new();
    let mut d = BTreeMap::new();
    for r in lo..=hi {
        let dim: usize = parts.iter().map(|c| c.dim(r)).sum();
        if dim > 0 {
            dims.insert(r, dim);
        }
    }
    for r in lo..hi {
        let blocks: Vec<Matrix> = parts.iter().map(|c| c.d(r)).collect();
        let diag = Matrix::block_diag(&blocks.iter().collect::<Vec<_>>());
        if !diag.is_zero_matrix() {
            d.insert(r, diag);
        }
    }
    Complex::new(dims, d)
}

impl BarCosimplicial {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn sheaf(&self) -> &PosetSheaf {
        &self.sheaf
    }

    pub fn chains(&self, n: usize, p: usize) -> &[Vec<usize>] {
        &self.chains[n][p]
    }

    /// The stalk of `B^n` at `p`.
    pub fn stalk(&self, n: usize, p: usize) -> &Complex {
        &self.stalks[n][p]
    }

    fn chain_index(&self, n: usize, p: usize, chain: &[usize]) -> usize {
        self.chains[n][p].iter().position(|c| c == chain).unwrap()
    }

    fn offsets(&self, n: usize, p: usize, degree: i64) -> Vec<usize> {
        let parts: Vec<&Complex> = self.chains[n][p]
            .iter()
            .map(|c| self.sheaf.stalk(*c.last().unwrap()))
            .collect();
        block_offsets(&parts, degree)
    }

    /// The coface `δ_i: B^{n−1}_p → B^n_p` as a chain map on stalks.
    pub fn coface_at(&self, i: usize, n: usize, p: usize) -> Result<ChainMap> {
        if n == 0 || n > self.n_max || i > n {
            return Err(Error::invalid("coface index", format!("(i={i}, n={n})")));
        }
        let src = &self.stalks[n - 1][p];
        let tgt = &self.stalks[n][p];
        let (lo, hi) = self.sheaf.degree_window();
        let mut comps = BTreeMap::new();
        for r in lo..=hi {
            let mut m = Matrix::zero(tgt.dim(r), src.dim(r));
            let src_offsets = self.offsets(n - 1, p, r);
            let tgt_offsets = self.offsets(n, p, r);
            for (ci, chain) in self.chains[n - 1][p].iter().enumerate() {
                let top = *chain.last().unwrap();
                if i < n {
                    // Insert r_pt at slot i, bounded by the neighbors.
                    let floor = if i == 0 { p } else { chain[i - 1] };
                    let ceil = chain[i];
                    for r_pt in 0..self.sheaf.site().len() {
                        if self.sheaf.site().leq(floor, r_pt)
                            && self.sheaf.site().leq(r_pt, ceil)
                        {
                            let mut longer = chain.clone();
                            longer.insert(i, r_pt);
                            let ti = self.chain_index(n, p, &longer);
                            let payload = self.sheaf.stalk(top).dim(r);
                            m.paste(
                                tgt_offsets[ti],
                                src_offsets[ci],
                                &Matrix::identity(payload),
                            );
                        }
                    }
                } else {
                    // Append r_pt above the top, through the generization map.
                    for r_pt in 0..self.sheaf.site().len() {
                        if self.sheaf.site().leq(top, r_pt) {
                            let mut longer = chain.clone();
                            longer.push(r_pt);
                            let ti = self.chain_index(n, p, &longer);
                            m.paste(
                                tgt_offsets[ti],
                                src_offsets[ci],
                                &self.sheaf.gen(top, r_pt).comp(r),
                            );
                        }
                    }
                }
            }
            if !m.is_zero_matrix() {
                comps.insert(r, m);
            }
        }
        ChainMap::new(src.clone(), tgt.clone(), comps)
    }

    /// The codegeneracy `σ_i: B^n_p → B^{n−1}_p`: collapse of equal entries
    /// at slots i, i+1.
    pub fn codegeneracy_at(&self, i: usize, n: usize, p: usize) -> Result<ChainMap> {
        if n == 0 || n > self.n_max || i >= n {
            return Err(Error::invalid("codegeneracy index", format!("(i={i}, n={n})")));
        }
        let src = &self.stalks[n][p];
        let tgt = &self.stalks[n - 1][p];
        let (lo, hi) = self.sheaf.degree_window();
        let mut comps = BTreeMap::new();
        for r in lo..=hi {
            let mut m = Matrix::zero(tgt.dim(r), src.dim(r));
            let src_offsets = self.offsets(n, p, r);
            let tgt_offsets = self.offsets(n - 1, p, r);
            for (ci, chain) in self.chains[n][p].iter().enumerate() {
                if chain[i] != chain[i + 1] {
                    continue;
                }
                let mut shorter = chain.clone();
                shorter.remove(i + 1);
                let ti = self.chain_index(n - 1, p, &shorter);
                let payload = self.sheaf.stalk(*chain.last().unwrap()).dim(r);
                m.paste(tgt_offsets[ti], src_offsets[ci], &Matrix::identity(payload));
            }
            if !m.is_zero_matrix() {
                comps.insert(r, m);
            }
        }
        ChainMap::new(src.clone(), tgt.clone(), comps)
    }

    /// The augmentation `F_p → B^0_p` whose chain components are the
    /// generization maps.
    pub fn augmentation_at(&self, p: usize) -> Result<ChainMap> {
        let src = self.sheaf.stalk(p);
        let tgt = &self.stalks[0][p];
        let (lo, hi) = self.sheaf.degree_window();
        let mut comps = BTreeMap::new();
        for r in lo..=hi {
            let mut m = Matrix::zero(tgt.dim(r), src.dim(r));
            let tgt_offsets = self.offsets(0, p, r);
            for (ci, chain) in self.chains[0][p].iter().enumerate() {
                m.paste(tgt_offsets[ci], 0, &self.sheaf.gen(p, chain[0]).comp(r));
            }
            if !m.is_zero_matrix() {
                comps.insert(r, m);
            }
        }
        ChainMap::new(src.clone(), tgt.clone(), comps)
    }

    /// The contraction `h: B^n_p → B^{n−1}_p` induced by the counit: drop
    /// the first chain entry when it equals the base point. For `n = 0` the
    /// target is the stalk of `F` itself.
    pub fn contraction_at(&self, n: usize, p: usize) -> Result<ChainMap> {
        if n > self.n_max {
            return Err(Error::invalid("contraction index", format!("n={n}")));
        }
        let src = &self.stalks[n][p];
        let tgt: &Complex =
            if n == 0 { self.sheaf.stalk(p) } else { &self.stalks[n - 1][p] };
        let (lo, hi) = self.sheaf.degree_window();
        let mut comps = BTreeMap::new();
        for r in lo..=hi {
            let mut m = Matrix::zero(tgt.dim(r), src.dim(r));
            let src_offsets = self.offsets(n, p, r);
            for (ci, chain) in self.chains[n][p].iter().enumerate() {
                if chain[0] != p {
                    continue;
                }
                let payload = self.sheaf.stalk(*chain.last().unwrap()).dim(r);
                if n == 0 {
                    // The only surviving chain is (p); project onto F_p.
                    m.paste(0, src_offsets[ci], &Matrix::identity(payload));
                } else {
                    let shorter = chain[1..].to_vec();
                    let ti = self.chain_index(n - 1, p, &shorter);
                    let tgt_offsets = self.offsets(n - 1, p, r);
                    m.paste(tgt_offsets[ti], src_offsets[ci], &Matrix::identity(payload));
                }
            }
            if !m.is_zero_matrix() {
                comps.insert(r, m);
            }
        }
        ChainMap::new(src.clone(), tgt.clone(), comps)
    }

    /// `B^n` as a sheaf: the generization maps project onto the chains that
    /// remain visible from the higher point.
    pub fn level_sheaf(&self, n: usize) -> Result<PosetSheaf> {
        let site = self.sheaf.site();
        let mut gens = BTreeMap::new();
        let (lo, hi) = self.sheaf.degree_window();
        for p in 0..site.len() {
            for q in 0..site.len() {
                if p == q || !site.leq(p, q) {
                    continue;
                }
                let src = &self.stalks[n][p];
                let tgt = &self.stalks[n][q];
                let mut comps = BTreeMap::new();
                for r in lo..=hi {
                    let mut m = Matrix::zero(tgt.dim(r), src.dim(r));
                    let src_offsets = self.offsets(n, p, r);
                    let tgt_offsets = self.offsets(n, q, r);
                    for (ti, chain) in self.chains[n][q].iter().enumerate() {
                        let ci = self.chain_index(n, p, chain);
                        let payload = self.sheaf.stalk(*chain.last().unwrap()).dim(r);
                        m.paste(tgt_offsets[ti], src_offsets[ci], &Matrix::identity(payload));
                    }
                    if !m.is_zero_matrix() {
                        comps.insert(r, m);
                    }
                }
                gens.insert((p, q), ChainMap::new(src.clone(), tgt.clone(), comps)?);
            }
        }
        PosetSheaf::new(site.clone(), self.stalks[n].clone(), gens)
    }

    /// The cosimplicial module of sections over an open in one internal
    /// degree.
    pub fn sections_cosimplicial(
        &self,
        open: &[usize],
        degree: i64,
    ) -> Result<CosimplicialModule> {
        let mut dims = Vec::with_capacity(self.n_max + 1);
        let mut bases = Vec::with_capacity(self.n_max + 1);
        for n in 0..=self.n_max {
            let sheaf = self.level_sheaf(n)?;
            let (complex, basis) = sheaf.sections(open)?;
            dims.push(complex.dim(degree));
            bases.push(basis[&degree].clone());
        }
        let mut cofaces = BTreeMap::new();
        let mut codegeneracies = BTreeMap::new();
        for n in 1..=self.n_max {
            for i in 0..=n {
                let ambient = self
                    .ambient_map(open, |p| self.coface_at(i, n, p).map(|f| f.comp(degree)))?;
                cofaces.insert((i, n), solve(&bases[n], &ambient.mul(&bases[n - 1]))?);
            }
            for i in 0..n {
                let ambient = self.ambient_map(open, |p| {
                    self.codegeneracy_at(i, n, p).map(|f| f.comp(degree))
                })?;
                codegeneracies.insert((i, n), solve(&bases[n - 1], &ambient.mul(&bases[n]))?);
            }
        }
        CosimplicialModule::new(dims, cofaces, codegeneracies)
    }

    /// The same cosimplicial module, over the minimal open of a point.
    pub fn stalk_cosimplicial(&self, p: usize, degree: i64) -> Result<CosimplicialModule> {
        self.sections_cosimplicial(&self.sheaf.site().min_open(p), degree)
    }

    fn ambient_map(
        &self,
        open: &[usize],
        per_point: impl Fn(usize) -> Result<Matrix>,
    ) -> Result<Matrix> {
        let mut blocks = Vec::with_capacity(open.len());
        for &p in open {
            blocks.push(per_point(p)?);
        }
        Ok(Matrix::block_diag(&blocks.iter().collect::<Vec<_>>()))
    }
}

/// The Godement resolution over an open: the total complex of the section
/// levels of the bar cosimplicial, plus the augmentation from the sections
/// of `F`.
pub fn gdm(f: &PosetSheaf, open: &[usize], n_max: usize) -> Result<(Complex, ChainMap)> {
    let b = bar(f, n_max)?;
    let mut level_complexes = Vec::with_capacity(n_max + 1);
    let mut level_bases = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let sheaf = b.level_sheaf(n)?;
        let (complex, bases) = sheaf.sections(open)?;
        level_complexes.push(complex);
        level_bases.push(bases);
    }
    let (f_sections, f_bases) = f.sections(open)?;
    let (lo, hi) = f.degree_window();

    let mut dims = BTreeMap::new();
    let mut dh = BTreeMap::new();
    let mut dv = BTreeMap::new();
    for (n, c) in level_complexes.iter().enumerate() {
        for r in lo..=hi {
            if c.dim(r) == 0 {
                continue;
            }
            dims.insert((n as i64, r), c.dim(r));
            if n < n_max {
                let mut total = Matrix::zero(level_complexes[n + 1].dim(r), c.dim(r));
                for i in 0..=(n + 1) {
                    let ambient = b
                        .ambient_map(open, |p| b.coface_at(i, n + 1, p).map(|m| m.comp(r)))?;
                    let restricted = solve(
                        &level_bases[n + 1][&r],
                        &ambient.mul(&level_bases[n][&r]),
                    )?;
                    total = if i % 2 == 0 {
                        total.add(&restricted)
                    } else {
                        total.sub(&restricted)
                    };
                }
                if !total.is_zero_matrix() {
                    dh.insert((n as i64, r), total);
                }
            }
            let vert = if n % 2 == 0 { c.d(r) } else { c.d(r).neg() };
            if !vert.is_zero_matrix() {
                dv.insert((n as i64, r), vert);
            }
        }
    }
    let tot = DoubleComplex::new(dims, dh, dv)?.tot();

    let mut aug_comps = BTreeMap::new();
    for r in lo..=hi {
        let ambient = b.ambient_map(open, |p| b.augmentation_at(p).map(|m| m.comp(r)))?;
        let restricted = solve(&level_bases[0][&r], &ambient.mul(&f_bases[&r]))?;
        if restricted.rows() == 0 || restricted.cols() == 0 {
            continue;
        }
        // Embed the level-0 block into the total complex.
        let mut embedded = Matrix::zero(tot.complex.dim(r), restricted.cols());
        for col in 0..restricted.cols() {
            let vec = tot.embed(0, r, &restricted.column(col));
            for (row, v) in vec.into_iter().enumerate() {
                embedded.set(row, col, v);
            }
        }
        if !embedded.is_zero_matrix() {
            aug_comps.insert(r, embedded);
        }
    }
    let augmentation = ChainMap::new(f_sections, tot.complex.clone(), aug_comps)?;
    Ok((tot.complex, augmentation))
}

/// Verifies, stalk by stalk, that the counit contraction is a homotopy
/// between the identity and zero on the augmented bar complex:
/// `h∘η = id` on `F_p` and `d h + h d = id` on `B^n_p` for
/// `n < n_max − 1`.
pub fn stalkwise_homotopy_check(f: &PosetSheaf, n_max: usize) -> Result<Report> {
    let b = bar(f, n_max)?;
    let mut report = Report::new("Godement stalkwise contraction");
    let (lo, hi) = f.degree_window();
    for p in 0..f.site().len() {
        let eta = b.augmentation_at(p)?;
        let h0 = b.contraction_at(0, p)?;
        let split = h0.compose(&eta)?;
        let id_f = ChainMap::identity(f.stalk(p));
        report.require(
            format!("counit splits the augmentation at {}", f.site().name(p)),
            chain_maps_equal(&split, &id_f),
            "h^0 eta = id",
        );
        for n in 0..n_max.saturating_sub(1) {
            let d_out = alternating_coface(&b, n + 1, p)?;
            let h_next = b.contraction_at(n + 1, p)?;
            let into: ChainMap = if n == 0 {
                eta.clone()
            } else {
                alternating_coface(&b, n, p)?
            };
            let h_here = b.contraction_at(n, p)?;
            for r in lo..=hi {
                let dim = b.stalk(n, p).dim(r);
                if dim == 0 {
                    continue;
                }
                let lhs = into
                    .comp(r)
                    .mul(&h_here.comp(r))
                    .add(&h_next.comp(r).mul(&d_out.comp(r)));
                report.require(
                    format!(
                        "contraction identity at {} (level {n}, degree {r})",
                        f.site().name(p)
                    ),
                    lhs == Matrix::identity(dim),
                    "d h + h d = id",
                );
            }
        }
    }
    Ok(report)
}

/// The alternating coface sum `Σ (−1)^i δ_i : B^{n−1}_p → B^n_p`.
fn alternating_coface(b: &BarCosimplicial, n: usize, p: usize) -> Result<ChainMap> {
    let mut total = ChainMap::zero(b.stalk(n - 1, p), b.stalk(n, p));
    for i in 0..=n {
        let face = b.coface_at(i, n, p)?;
        total = if i % 2 == 0 { total.add(&face)? } else { total.add(&face.neg())? };
    }
    Ok(total)
}

/// A sheaf of graded-commutative algebras: a sheaf whose stalks carry
/// degreewise products and units, with multiplicative generization maps.
#[derive(Clone, Debug)]
pub struct SheafAlgebra {
    sheaf: PosetSheaf,
    products: Vec<BTreeMap<(i64, i64), Matrix>>,
    units: Vec<Vec<Scalar>>,
}

impl SheafAlgebra {
    pub fn new(
        sheaf: PosetSheaf,
        products: Vec<BTreeMap<(i64, i64), Matrix>>,
        units: Vec<Vec<Scalar>>,
    ) -> Result<Self> {
        let n = sheaf.site().len();
        if products.len() != n || units.len() != n {
            return Err(Error::invalid("algebra data", "one product and unit per point"));
        }
        // Validation is delegated to the cosimplicial DGA constructor over
        // the one-point covers: each stalk with its own product must be a
        // DGA level, and generization maps must be multiplicative.
        for p in 0..n {
            CosimplicialDGA::new(
                vec![sheaf.stalk(p).clone()],
                BTreeMap::new(),
                BTreeMap::new(),
                vec![products[p].clone()],
                vec![units[p].clone()],
            )?;
        }
        let alg = SheafAlgebra { sheaf, products, units };
        for p in 0..n {
            for q in 0..n {
                if p == q || !alg.sheaf.site().leq(p, q) {
                    continue;
                }
                let g = alg.sheaf.gen(p, q);
                let (lo, hi) = alg.sheaf.stalk(p).support();
                for a in lo..=hi {
                    for bdeg in lo..=hi {
                        let lhs = g.comp(a + bdeg).mul(&alg.product_comp(p, a, bdeg));
                        let rhs = alg
                            .product_comp(q, a, bdeg)
                            .mul(&Matrix::kronecker(&g.comp(a), &g.comp(bdeg)));
                        if lhs != rhs {
                            return Err(Error::invalid(
                                "multiplicative restriction",
                                format!("({p}, {q}) at degrees ({a}, {bdeg})"),
                            ));
                        }
                    }
                }
                if g.comp(0).apply(&alg.units[p]) != alg.units[q] {
                    return Err(Error::invalid(
                        "restriction unit",
                        format!("({p}, {q})"),
                    ));
                }
            }
        }
        Ok(alg)
    }

    /// The constant sheaf of ground-field algebras.
    pub fn constant_line(site: FiniteSite) -> Self {
        let sheaf = PosetSheaf::constant_line(site);
        let n = sheaf.site().len();
        SheafAlgebra {
            sheaf,
            products: vec![[((0i64, 0i64), Matrix::identity(1))].into_iter().collect(); n],
            units: vec![vec![Scalar::one()]; n],
        }
    }

    /// The one-point sheaf holding an exterior algebra on a degree-1
    /// generator.
    pub fn exterior_point() -> Self {
        let stalk = Complex::new(
            [(0i64, 1usize), (1, 1)].into_iter().collect(),
            BTreeMap::new(),
        )
        .unwrap();
        let sheaf = PosetSheaf::constant(FiniteSite::point(), &stalk);
        let mut product = BTreeMap::new();
        product.insert((0i64, 0i64), Matrix::identity(1));
        product.insert((0, 1), Matrix::identity(1));
        product.insert((1, 0), Matrix::identity(1));
        SheafAlgebra { sheaf, products: vec![product], units: vec![vec![Scalar::one()]] }
    }

    pub fn sheaf(&self) -> &PosetSheaf {
        &self.sheaf
    }

    fn product_comp(&self, p: usize, a: i64, b: i64) -> Matrix {
        let c = self.sheaf.stalk(p);
        self.products[p]
            .get(&(a, b))
            .cloned()
            .unwrap_or_else(|| Matrix::zero(c.dim(a + b), c.dim(a) * c.dim(b)))
    }
}

/// The bar cosimplicial object of an algebra sheaf, as a cosimplicial DGA
/// of sections over an open. Stalk products multiply payloads over equal
/// chains; sections inherit them.
pub fn bar_dga(f: &SheafAlgebra, open: &[usize], n_max: usize) -> Result<CosimplicialDGA> {
    let b = bar(f.sheaf(), n_max)?;
    let (lo, hi) = f.sheaf().degree_window();
    let mut levels = Vec::with_capacity(n_max + 1);
    let mut bases = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let sheaf = b.level_sheaf(n)?;
        let (complex, basis) = sheaf.sections(open)?;
        levels.push(complex);
        bases.push(basis);
    }
    let mut cofaces = BTreeMap::new();
    let mut codegeneracies = BTreeMap::new();
    for n in 1..=n_max {
        for i in 0..=n {
            let mut comps = BTreeMap::new();
            for r in lo..=hi {
                let ambient =
                    b.ambient_map(open, |p| b.coface_at(i, n, p).map(|m| m.comp(r)))?;
                let restricted = solve(&bases[n][&r], &ambient.mul(&bases[n - 1][&r]))?;
                if restricted.rows() > 0 && restricted.cols() > 0 {
                    comps.insert(r, restricted);
                }
            }
            cofaces.insert(
                (i, n),
                ChainMap::new(levels[n - 1].clone(), levels[n].clone(), comps)?,
            );
        }
        for i in 0..n {
            let mut comps = BTreeMap::new();
            for r in lo..=hi {
                let ambient =
                    b.ambient_map(open, |p| b.codegeneracy_at(i, n, p).map(|m| m.comp(r)))?;
                let restricted = solve(&bases[n - 1][&r], &ambient.mul(&bases[n][&r]))?;
                if restricted.rows() > 0 && restricted.cols() > 0 {
                    comps.insert(r, restricted);
                }
            }
            codegeneracies.insert(
                (i, n),
                ChainMap::new(levels[n].clone(), levels[n - 1].clone(), comps)?,
            );
        }
    }

    let mut products = Vec::with_capacity(n_max + 1);
    let mut units = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut level_products = BTreeMap::new();
        for a in lo..=hi {
            for bdeg in lo..=hi {
                let rows = levels[n].dim(a + bdeg);
                let cols = levels[n].dim(a) * levels[n].dim(bdeg);
                if rows == 0 || cols == 0 {
                    continue;
                }
                // Ambient product on ⊕_{p ∈ open} stalks: per point, per
                // chain-diagonal payload product.
                let ambient_mu = |p: usize| -> Matrix {
                    let chains = b.chains(n, p);
                    let off_a = b.offsets(n, p, a);
                    let off_b = b.offsets(n, p, bdeg);
                    let off_ab = b.offsets(n, p, a + bdeg);
                    let dim_a = *off_a.last().unwrap();
                    let dim_b = *off_b.last().unwrap();
                    let dim_ab = *off_ab.last().unwrap();
                    let mut m = Matrix::zero(dim_ab, dim_a * dim_b);
                    for (ci, chain) in chains.iter().enumerate() {
                        let top = *chain.last().unwrap();
                        let mu = f.product_comp(top, a, bdeg);
                        let pa = f.sheaf().stalk(top).dim(a);
                        let pb = f.sheaf().stalk(top).dim(bdeg);
                        for row in 0..mu.rows() {
                            for xa in 0..pa {
                                for xb in 0..pb {
                                    let v = mu.get(row, xa * pb + xb);
                                    if !v.is_zero() {
                                        m.add_to(
                                            off_ab[ci] + row,
                                            (off_a[ci] + xa) * dim_b + (off_b[ci] + xb),
                                            v,
                                        );
                                    }
                                }
                            }
                        }
                    }
                    m
                };
                let mut blocks = Vec::new();
                let mut amb_a = Vec::new();
                let mut amb_b = Vec::new();
                for &p in open {
                    blocks.push(ambient_mu(p));
                    amb_a.push(*b.offsets(n, p, a).last().unwrap());
                    amb_b.push(*b.offsets(n, p, bdeg).last().unwrap());
                }
                // Assemble the pointwise product against the row-major
                // tensor coordinates of the full ambient sums.
                let tot_a: usize = amb_a.iter().sum();
                let tot_b: usize = amb_b.iter().sum();
                let tot_ab: usize = blocks.iter().map(|m| m.rows()).sum();
                let mut ambient = Matrix::zero(tot_ab, tot_a * tot_b);
                let mut row_off = 0;
                let mut a_off = 0;
                let mut b_off = 0;
                for (pi, block) in blocks.iter().enumerate() {
                    let pa = amb_a[pi];
                    let pb = amb_b[pi];
                    for (row, col, v) in block.iter() {
                        let xa = col / pb;
                        let xb = col % pb;
                        ambient.add_to(
                            row_off + row,
                            (a_off + xa) * tot_b + (b_off + xb),
                            v.clone(),
                        );
                    }
                    row_off += block.rows();
                    a_off += pa;
                    b_off += pb;
                }
                let image = ambient
                    .mul(&Matrix::kronecker(&bases[n][&a], &bases[n][&bdeg]));
                let restricted = solve(&bases[n][&(a + bdeg)], &image)?;
                if !restricted.is_zero_matrix() {
                    level_products.insert((a, bdeg), restricted);
                }
            }
        }
        products.push(level_products);

        // The unit section: the family of stalk units over every chain.
        let mut ambient_unit = Vec::new();
        for &p in open {
            let chains = b.chains(n, p);
            let mut u = vec![Scalar::zero(); *b.offsets(n, p, 0).last().unwrap()];
            let offsets = b.offsets(n, p, 0);
            for (ci, chain) in chains.iter().enumerate() {
                let top = *chain.last().unwrap();
                for (k, v) in f.units[top].iter().enumerate() {
                    u[offsets[ci] + k] = v.clone();
                }
            }
            ambient_unit.extend(u);
        }
        let unit_mat = solve(
            &bases[n][&0],
            &Matrix::from_columns(ambient_unit.len(), &[ambient_unit]),
        )?;
        units.push(unit_mat.column(0));
    }

    CosimplicialDGA::new(levels, cofaces, codegeneracies, products, units)
}

/// The multiplicative resolution of an algebra sheaf over an open: the
/// compatible-family normalization of its bar cosimplicial DGA. Unlike the
/// simple complex behind `gdm`, the product here is graded-commutative on
/// the nose rather than up to homotopy.
pub fn tgdm(
    f: &SheafAlgebra,
    open: &[usize],
    n_max: usize,
    degree_bound: usize,
) -> Result<crate::ts::TSComplex> {
    crate::ts::ts_normalize(&bar_dga(f, open, n_max)?, n_max, degree_bound)
}
