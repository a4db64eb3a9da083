//! Syntomic cohomology of packaged cohomological data: the two-term cone
//! model, the zigzag homotopy limit, the long exact sequence, the
//! localization sequence with its connecting map, hypercover assembly, and
//! curated worked examples.
//!
//! A package bundles what the constructions consume: rigid cohomology of the
//! special fiber with its Frobenius, rigid cohomology with K-coefficients,
//! the filtered de Rham complexes of the generic fiber with their transition
//! maps, and the specialization map tying the two sides together. The cone
//! model and the homotopy-limit model are computed along independent paths
//! and agree whenever the zigzag's comparison maps are quasi-isomorphisms.

use crate::complex::{cone, les_of_cone_labeled, ChainMap, Complex};
use crate::double::DoubleComplex;
use crate::error::Error;
use crate::fence::{ArrowDirection, FenceArrow, FenceDiagram};
use crate::fisoc::{FrobComplex, DEFAULT_PRIME};
use crate::matrix::Matrix;
use crate::report::{ExactSequenceReport, Report};
use crate::{Result, Scalar};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Version tag of the package JSON schema.
pub const PACKAGE_SCHEMA_VERSION: u32 = 1;

/// The intermediate nodes of the comparison zigzag, with the maps joining
/// them. `a` sits between the Frobenius side and the de Rham side (mapping
/// to the K-coefficient complex and to `b`), `c` maps to `b` along the
/// specialization route and to `d`, and `dr_to_c` feeds the full de Rham
/// complex into `c`.
///
/// `a_to_rigk`, `a_to_b`, `c_to_d`, and `dr_to_c` are comparison maps and
/// must be quasi-isomorphisms; `c_to_b` carries the specialization and may
/// lose cohomology.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZigzagNodes {
    pub a: Complex,
    pub b: Complex,
    pub c: Complex,
    pub d: Complex,
    pub a_to_rigk: ChainMap,
    pub a_to_b: ChainMap,
    pub c_to_b: ChainMap,
    pub c_to_d: ChainMap,
    pub dr_to_c: ChainMap,
}

/// A bundle of cohomological input data for the syntomic constructions.
///
/// Fields: the special fiber's cohomology with Frobenius (`rig`), the same
/// with K-coefficients (`rig_k`), the base-change map between them, the
/// filtered de Rham complexes of the generic fiber (`fdr`, step `i` holding
/// the `i`-th filtration piece, step 0 the whole complex) with transition
/// maps `fdr_maps[i]: fdr[i + 1] → fdr[i]`, the specialization map
/// `sp: fdr[0] → rig_k`, and optionally the zigzag intermediates.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "PackageWire", into = "PackageWire")]
pub struct SyntomicPackage {
    prime: i64,
    rig: FrobComplex,
    rig_k: Complex,
    bc: ChainMap,
    fdr: BTreeMap<i64, Complex>,
    fdr_maps: BTreeMap<i64, ChainMap>,
    sp: ChainMap,
    zigzag: Option<ZigzagNodes>,
}

impl SyntomicPackage {
    /// Builds a package, checking that every map joins the declared
    /// endpoints and that the zigzag comparison maps (when present) are
    /// quasi-isomorphisms.
    pub fn new(
        rig: FrobComplex,
        rig_k: Complex,
        bc: ChainMap,
        fdr: BTreeMap<i64, Complex>,
        fdr_maps: BTreeMap<i64, ChainMap>,
        sp: ChainMap,
        zigzag: Option<ZigzagNodes>,
    ) -> Result<Self> {
        if bc.source() != rig.complex() || bc.target() != &rig_k {
            return Err(Error::invalid(
                "base change",
                "endpoints differ from rig and rig_k".to_string(),
            ));
        }
        let f0 = fdr.get(&0).ok_or(Error::MissingFiltration { step: 0 })?;
        if sp.source() != f0 || sp.target() != &rig_k {
            return Err(Error::invalid(
                "specialization",
                "endpoints differ from fdr[0] and rig_k".to_string(),
            ));
        }
        for (&i, t) in &fdr_maps {
            let src_ok = fdr.get(&(i + 1)).is_some_and(|c| t.source() == c);
            let tgt_ok = fdr.get(&i).is_some_and(|c| t.target() == c);
            if !src_ok || !tgt_ok {
                return Err(Error::invalid(
                    "filtration transition",
                    format!("map at step {i} does not join fdr[{}] to fdr[{i}]", i + 1),
                ));
            }
        }
        if let Some(z) = &zigzag {
            let endpoints: [(&str, &ChainMap, &Complex, &Complex); 5] = [
                ("a_to_rigk", &z.a_to_rigk, &z.a, &rig_k),
                ("a_to_b", &z.a_to_b, &z.a, &z.b),
                ("c_to_b", &z.c_to_b, &z.c, &z.b),
                ("c_to_d", &z.c_to_d, &z.c, &z.d),
                ("dr_to_c", &z.dr_to_c, f0, &z.c),
            ];
            for (name, map, src, tgt) in endpoints {
                if map.source() != src || map.target() != tgt {
                    return Err(Error::invalid(
                        "zigzag endpoints",
                        format!("{name} does not join the declared nodes"),
                    ));
                }
            }
            for (name, map) in [
                ("a_to_rigk", &z.a_to_rigk),
                ("a_to_b", &z.a_to_b),
                ("c_to_d", &z.c_to_d),
                ("dr_to_c", &z.dr_to_c),
            ] {
                if !map.is_quasi_iso() {
                    return Err(Error::invalid(
                        "zigzag comparison",
                        format!("{name} is not a quasi-isomorphism"),
                    ));
                }
            }
        }
        Ok(SyntomicPackage {
            prime: rig.prime(),
            rig,
            rig_k,
            bc,
            fdr,
            fdr_maps,
            sp,
            zigzag,
        })
    }

    /// The empty package over `prime`: every complex is zero.
    pub fn trivial(prime: i64) -> Self {
        let zero = Complex::zero();
        let rig = FrobComplex::new(zero.clone(), BTreeMap::new(), prime)
            .expect("zero complex admits the empty Frobenius");
        let fdr: BTreeMap<i64, Complex> =
            (0..=2).map(|i| (i, zero.clone())).collect();
        let fdr_maps: BTreeMap<i64, ChainMap> = (0..=1)
            .map(|i| (i, ChainMap::zero(&zero, &zero)))
            .collect();
        SyntomicPackage::new(
            rig,
            zero.clone(),
            ChainMap::zero(&zero, &zero),
            fdr,
            fdr_maps,
            ChainMap::zero(&zero, &zero),
            None,
        )
        .expect("trivial package is valid")
        .with_collapsed_zigzag()
    }

    /// Installs the zigzag whose four comparison maps are identities and
    /// whose specialization route is `sp` itself: `a = b = rig_k` and
    /// `c = d = fdr[0]`.
    pub fn with_collapsed_zigzag(mut self) -> Self {
        let f0 = self.fdr.get(&0).expect("packages always hold fdr[0]").clone();
        let id_k = ChainMap::identity(&self.rig_k);
        let id_f = ChainMap::identity(&f0);
        self.zigzag = Some(ZigzagNodes {
            a: self.rig_k.clone(),
            b: self.rig_k.clone(),
            c: f0.clone(),
            d: f0,
            a_to_rigk: id_k.clone(),
            a_to_b: id_k,
            c_to_b: self.sp.clone(),
            c_to_d: id_f.clone(),
            dr_to_c: id_f,
        });
        self
    }

    pub fn prime(&self) -> i64 {
        self.prime
    }

    pub fn rig(&self) -> &FrobComplex {
        &self.rig
    }

    pub fn rig_k(&self) -> &Complex {
        &self.rig_k
    }

    pub fn bc(&self) -> &ChainMap {
        &self.bc
    }

    pub fn sp(&self) -> &ChainMap {
        &self.sp
    }

    pub fn zigzag(&self) -> Option<&ZigzagNodes> {
        self.zigzag.as_ref()
    }

    /// The filtration step used for twist `i`: step `i` itself for `i ≥ 0`,
    /// and the whole de Rham complex for `i < 0` (the filtration is
    /// exhaustive).
    pub fn fdr_at(&self, i: i64) -> Result<&Complex> {
        let eff = i.max(0);
        self.fdr
            .get(&eff)
            .ok_or(Error::MissingFiltration { step: eff })
    }

    /// The composite inclusion `fdr[i] → fdr[0]` through every declared
    /// transition map.
    pub fn filtration_inclusion(&self, i: i64) -> Result<ChainMap> {
        let eff = i.max(0);
        let mut cur = ChainMap::identity(self.fdr_at(i)?);
        for j in (0..eff).rev() {
            let step = self
                .fdr_maps
                .get(&j)
                .ok_or(Error::MissingFiltration { step: j + 1 })?;
            cur = step.compose(&cur)?;
        }
        Ok(cur)
    }

    /// The specialization restricted to the `i`-th filtration piece:
    /// `sp ∘ (fdr[i] → fdr[0])`.
    pub fn sp_incl(&self, i: i64) -> Result<ChainMap> {
        self.sp.compose(&self.filtration_inclusion(i)?)
    }

    /// The two-node comparison `rig ⊕ fdr[i] → rig ⊕ rig_k`,
    /// `(x, y) ↦ (g x, sp y − bc x)`, for the given first-row map `g`.
    fn two_node_map(&self, i: i64, g: &ChainMap) -> Result<ChainMap> {
        let fi = self.fdr_at(i)?.clone();
        let (_, _, src_projs) = Complex::direct_sum(&[self.rig.complex(), &fi]);
        let (_, tgt_incs, _) = Complex::direct_sum(&[self.rig.complex(), &self.rig_k]);
        let row0 = tgt_incs[0].compose(&g.compose(&src_projs[0])?)?;
        let to_rigk = self
            .sp_incl(i)?
            .compose(&src_projs[1])?
            .add(&self.bc.compose(&src_projs[0])?.neg())?;
        let row1 = tgt_incs[1].compose(&to_rigk)?;
        row0.add(&row1)
    }

    /// The comparison map whose shifted cone is the syntomic complex:
    /// `f(x, y) = ((1 − φ/p^i) x, sp y − bc x)`.
    pub fn syntomic_map(&self, i: i64) -> Result<ChainMap> {
        self.two_node_map(i, &self.rig.frobenius_deviation(i))
    }

    /// The homotopy fiber of `id − φ/p^i` on the Frobenius side, together
    /// with its projection to the underlying complex.
    fn abs_fiber(&self, i: i64) -> (Complex, ChainMap) {
        let g = self.rig.frobenius_deviation(i);
        let (c, _, proj) = cone(&g);
        (c.shift(-1), proj.shift(-1))
    }

    /// The map `v: Fib(id − φ/p^i) ⊕ fdr[i] → rig_k` computing
    /// `a_* − b_*`; its cone realizes the syntomic complex shifted by one.
    fn comparison_to_rigk(&self, i: i64) -> Result<ChainMap> {
        let (a, a_to_rig) = self.abs_fiber(i);
        let fi = self.fdr_at(i)?.clone();
        let (_, _, projs) = Complex::direct_sum(&[&a, &fi]);
        let a_route = self.bc.compose(&a_to_rig)?.compose(&projs[0])?;
        let b_route = self.sp_incl(i)?.compose(&projs[1])?;
        a_route.add(&b_route.neg())
    }
}

/// Dimensions of a complex over its support window, zeros included; degrees
/// absent from the map lie outside the window and are zero.
fn window_dims(c: &Complex, shift: i64) -> BTreeMap<i64, usize> {
    if c.is_zero() {
        return BTreeMap::new();
    }
    let (lo, hi) = c.support();
    (lo..=hi).map(|n| (n + shift, c.cohomology(n).dim)).collect()
}

/// Syntomic cohomology dimensions at twist `i` via the two-node cone model:
/// degree `n` holds `H^{n−1}` of the cone of [`SyntomicPackage::syntomic_map`].
///
/// Every degree in the cone's support window is reported, zeros included;
/// degrees absent from the map are zero.
pub fn syntomic_cone(pkg: &SyntomicPackage, i: i64) -> Result<BTreeMap<i64, usize>> {
    let f = pkg.syntomic_map(i)?;
    let (c, _, _) = cone(&f);
    Ok(window_dims(&c, 1))
}

/// The same dimensions computed from the cone of `φ − p^i · id` in the first
/// row instead of `id − φ/p^i`; the two conventions differ by a degreewise
/// scaling isomorphism, so the outputs agree.
pub fn besser_cone_dims(pkg: &SyntomicPackage, i: i64) -> Result<BTreeMap<i64, usize>> {
    let scale = -Scalar::from_int(pkg.prime()).pow(i);
    let g = pkg
        .rig
        .phi()
        .add(&ChainMap::identity(pkg.rig.complex()).scale(&scale))?;
    let f = pkg.two_node_map(i, &g)?;
    let (c, _, _) = cone(&f);
    Ok(window_dims(&c, 1))
}

/// The full zigzag as a fence diagram: bottom nodes
/// `[rig, a, c, fdr[i]]`, top nodes `[rig, rig_k, b, d]`, with the doubled
/// left-most arrow pair `id` and `φ/p^i` encoding the Frobenius equalizer.
pub fn fence_for(pkg: &SyntomicPackage, i: i64) -> Result<FenceDiagram> {
    let z = pkg.zigzag().ok_or(Error::MissingNodes)?;
    let rig_c = pkg.rig().complex().clone();
    let incl = pkg.filtration_inclusion(i)?;
    let fi = incl.source().clone();
    let phi_scaled = pkg.rig().phi().scale(&Scalar::from_int(pkg.prime()).pow(-i));
    let f_to_d = z.c_to_d.compose(&z.dr_to_c.compose(&incl)?)?;

    let bottom = vec![rig_c.clone(), z.a.clone(), z.c.clone(), fi];
    let top = vec![rig_c.clone(), pkg.rig_k().clone(), z.b.clone(), z.d.clone()];
    let arrows = vec![
        FenceArrow {
            from: 0,
            to: 0,
            direction: ArrowDirection::Rightward,
            map: ChainMap::identity(&rig_c),
        },
        FenceArrow { from: 0, to: 0, direction: ArrowDirection::Leftward, map: phi_scaled },
        FenceArrow {
            from: 0,
            to: 1,
            direction: ArrowDirection::Rightward,
            map: pkg.bc().clone(),
        },
        FenceArrow {
            from: 1,
            to: 1,
            direction: ArrowDirection::Leftward,
            map: z.a_to_rigk.clone(),
        },
        FenceArrow {
            from: 1,
            to: 2,
            direction: ArrowDirection::Rightward,
            map: z.a_to_b.clone(),
        },
        FenceArrow {
            from: 2,
            to: 2,
            direction: ArrowDirection::Leftward,
            map: z.c_to_b.clone(),
        },
        FenceArrow {
            from: 2,
            to: 3,
            direction: ArrowDirection::Rightward,
            map: z.c_to_d.clone(),
        },
        FenceArrow { from: 3, to: 3, direction: ArrowDirection::Leftward, map: f_to_d },
    ];
    FenceDiagram::new(bottom, top, arrows)
}

/// Syntomic cohomology dimensions at twist `i` via the homotopy limit of the
/// zigzag fence. Agrees with [`syntomic_cone`] whenever the zigzag's
/// comparison maps are quasi-isomorphisms; the reported window may be wider
/// than the cone's, with the extra degrees zero.
pub fn syntomic_holim(pkg: &SyntomicPackage, i: i64) -> Result<BTreeMap<i64, usize>> {
    let h = fence_for(pkg, i)?.holim();
    Ok(window_dims(&h, 0))
}

/// The long exact sequence
/// `… → H^n_syn → H^n_φ ⊕ F^iH^n_dR → H^n_rig,K → H^{n+1}_syn → …`
/// with exactness verified at every slot.
pub fn syntomic_les(pkg: &SyntomicPackage, i: i64) -> Result<ExactSequenceReport> {
    let v = pkg.comparison_to_rigk(i)?;
    Ok(les_of_cone_labeled(
        &v,
        &format!("syntomic long exact sequence at twist {i}"),
        |n| format!("H^{n}_phi + F^{i}H^{n}_dR"),
        |n| format!("H^{n}_rig,K"),
        |n| format!("H^{}_syn", n + 1),
    ))
}

struct LocalizationParts {
    /// Homotopy fiber of `Fib(id − φ/p^i) → rig_k`; its `H^n` are the
    /// special-fiber-supported groups.
    e_loc: Complex,
    /// Homotopy fiber of the two-column comparison; its `H^n` are the
    /// syntomic groups.
    syn: Complex,
    f: Complex,
    j: ChainMap,
    pi: ChainMap,
    /// Connecting map matrices `H^n(f) → H^{n+1}(e_loc)`.
    delta: BTreeMap<i64, Matrix>,
    window: (i64, i64),
}

fn localization_parts(pkg: &SyntomicPackage, i: i64) -> Result<LocalizationParts> {
    let (a, a_to_rig) = pkg.abs_fiber(i);
    let fi = pkg.fdr_at(i)?.clone();
    let a0 = pkg.bc().compose(&a_to_rig)?;
    let v = pkg.comparison_to_rigk(i)?;

    let (cone_v, _, _) = cone(&v);
    let syn = cone_v.shift(-1);
    let (cone_a0, inc_a0, _) = cone(&a0);
    let e_loc = cone_a0.shift(-1);

    let lo = [e_loc.support().0, syn.support().0, fi.support().0]
        .into_iter()
        .min()
        .unwrap()
        - 1;
    let hi = [e_loc.support().1, syn.support().1, fi.support().1]
        .into_iter()
        .max()
        .unwrap()
        + 1;

    // In fiber coordinates `syn^n = a^n ⊕ fi^n ⊕ rig_k^{n−1}` and
    // `e_loc^n = a^n ⊕ rig_k^{n−1}`, so the inclusion and the projection
    // onto the filtration piece are degreewise split.
    let mut j_comps = BTreeMap::new();
    let mut pi_comps = BTreeMap::new();
    for n in lo..=hi {
        let an = a.dim(n);
        let fn_ = fi.dim(n);
        let kn = pkg.rig_k().dim(n - 1);
        let mut jm = Matrix::zero(syn.dim(n), e_loc.dim(n));
        jm.paste(0, 0, &Matrix::identity(an));
        jm.paste(an + fn_, an, &Matrix::identity(kn));
        j_comps.insert(n, jm);
        let mut pm = Matrix::zero(fn_, syn.dim(n));
        pm.paste(0, an, &Matrix::identity(fn_));
        pi_comps.insert(n, pm);
    }
    let j = ChainMap::new(e_loc.clone(), syn.clone(), j_comps)?;
    let pi = ChainMap::new(syn.clone(), fi.clone(), pi_comps)?;

    // Connecting map: lift a filtration class into the fiber, apply the
    // differential, and read off the residual class; concretely that lands
    // the specialization in the `rig_k` slot of `e_loc` one degree up.
    let sp_incl = pkg.sp_incl(i)?;
    let res = inc_a0.shift(-1);
    let mut delta = BTreeMap::new();
    for n in (lo - 1)..=(hi + 1) {
        delta.insert(n, res.induced_map(n + 1).mul(&sp_incl.induced_map(n)));
    }

    Ok(LocalizationParts { e_loc, syn, f: fi, j, pi, delta, window: (lo, hi) })
}

/// Verifies the localization sequence
/// `… → H^n_s → H^n_syn → F^iH^n_dR → H^{n+1}_s → …`
/// at twist `i`: exactness at every slot, with the syntomic column
/// cross-checked against the cone model.
pub fn localization(pkg: &SyntomicPackage, i: i64) -> Result<Report> {
    let parts = localization_parts(pkg, i)?;
    let cone_dims = syntomic_cone(pkg, i)?;
    let (lo, hi) = parts.window;
    let mut report = Report::new(format!("localization sequence at twist {i}"));

    for n in lo..=hi {
        let e_dim = parts.e_loc.cohomology(n).dim;
        let syn_dim = parts.syn.cohomology(n).dim;
        let f_dim = parts.f.cohomology(n).dim;

        report.require(
            format!("syntomic column matches the cone model at degree {n}"),
            syn_dim == cone_dims.get(&n).copied().unwrap_or(0),
            format!(
                "fiber model gives {syn_dim}, cone model gives {}",
                cone_dims.get(&n).copied().unwrap_or(0)
            ),
        );

        let j_here = parts.j.induced_map(n);
        let pi_here = parts.pi.induced_map(n);
        let delta_prev = &parts.delta[&(n - 1)];
        let delta_here = &parts.delta[&n];

        let rank = crate::linalg::rank;
        report.require(
            format!("exact at H^{n}_s"),
            j_here.mul(delta_prev).is_zero_matrix()
                && e_dim - rank(&j_here) == rank(delta_prev),
            format!(
                "dim {e_dim}, incoming rank {}, outgoing rank {}",
                rank(delta_prev),
                rank(&j_here)
            ),
        );
        report.require(
            format!("exact at H^{n}_syn"),
            pi_here.mul(&j_here).is_zero_matrix()
                && syn_dim - rank(&pi_here) == rank(&j_here),
            format!(
                "dim {syn_dim}, incoming rank {}, outgoing rank {}",
                rank(&j_here),
                rank(&pi_here)
            ),
        );
        report.require(
            format!("exact at F^{i}H^{n}_dR"),
            delta_here.mul(&pi_here).is_zero_matrix()
                && f_dim - rank(delta_here) == rank(&pi_here),
            format!(
                "dim {f_dim}, incoming rank {}, outgoing rank {}",
                rank(&pi_here),
                rank(delta_here)
            ),
        );
    }
    Ok(report)
}

/// Dimensions of the special-fiber-supported groups `H^n_s` at twist `i`,
/// over their support window (zeros included).
pub fn localization_dims(pkg: &SyntomicPackage, i: i64) -> Result<BTreeMap<i64, usize>> {
    let parts = localization_parts(pkg, i)?;
    Ok(window_dims(&parts.e_loc, 0))
}

/// Ranks of the connecting maps `F^iH^n_dR → H^{n+1}_s`, keyed by `n`, over
/// the support window of the filtration piece.
pub fn localization_delta_ranks(
    pkg: &SyntomicPackage,
    i: i64,
) -> Result<BTreeMap<i64, usize>> {
    let parts = localization_parts(pkg, i)?;
    if parts.f.is_zero() {
        return Ok(BTreeMap::new());
    }
    let (lo, hi) = parts.f.support();
    Ok((lo..=hi)
        .map(|n| (n, crate::linalg::rank(&parts.delta[&n])))
        .collect())
}

/// Levels of a hypercover as formal disjoint unions of named building
/// blocks, with face maps given as block-level assignments.
///
/// `levels[p]` lists the blocks of the `p`-th level; `faces[p][j][b]` names
/// the block of level `p` that block `b` of level `p + 1` lands in under the
/// `j`-th face map, so `faces[p]` holds `p + 2` assignments.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HypercoverData {
    pub prime: i64,
    pub levels: Vec<Vec<String>>,
    pub faces: Vec<Vec<Vec<usize>>>,
}

/// Cohomology rows of a library block: the degrees `q` where it has a line,
/// with Frobenius eigenvalue `p^{q/2}`.
fn block_rows(name: &str) -> Option<&'static [i64]> {
    match name {
        "point" => Some(&[0]),
        "p1" => Some(&[0, 2]),
        _ => None,
    }
}

fn check_hypercover(h: &HypercoverData) -> Result<()> {
    for level in &h.levels {
        for name in level {
            if block_rows(name).is_none() {
                return Err(Error::BlockUnknown { name: name.clone() });
            }
        }
    }
    if h.faces.len() + 1 != h.levels.len().max(1) {
        return Err(Error::invalid(
            "hypercover shape",
            format!(
                "{} levels need {} face families, got {}",
                h.levels.len(),
                h.levels.len().saturating_sub(1),
                h.faces.len()
            ),
        ));
    }
    for (p, fam) in h.faces.iter().enumerate() {
        if fam.len() != p + 2 {
            return Err(Error::invalid(
                "face count",
                format!("level {} needs {} face maps, got {}", p + 1, p + 2, fam.len()),
            ));
        }
        for (j, assign) in fam.iter().enumerate() {
            if assign.len() != h.levels[p + 1].len() {
                return Err(Error::invalid(
                    "face shape",
                    format!("face {j} at level {} covers {} blocks, expected {}",
                        p + 1,
                        assign.len(),
                        h.levels[p + 1].len()
                    ),
                ));
            }
            if let Some(&bad) = assign.iter().find(|&&t| t >= h.levels[p].len()) {
                return Err(Error::invalid(
                    "face target",
                    format!("face {j} at level {} points at missing block {bad}", p + 1),
                ));
            }
        }
    }
    // Simplicial identities d_i ∘ d_j = d_{j−1} ∘ d_i for i < j, checked on
    // block assignments.
    for p in 1..h.faces.len() {
        let upper = &h.faces[p];
        let lower = &h.faces[p - 1];
        for j in 1..upper.len() {
            for i in 0..j {
                for b in 0..h.levels[p + 1].len() {
                    let left = lower[i][upper[j][b]];
                    let right = lower[j - 1][upper[i][b]];
                    if left != right {
                        return Err(Error::SimplicialIdentityViolation {
                            detail: format!(
                                "d_{i} d_{j} ≠ d_{} d_{i} on block {b} of level {}",
                                j - 1,
                                p + 1
                            ),
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

/// Assembles a hypercover into a Frobenius complex: row `q` of the first
/// page holds one line per block with cohomology in degree `q`, the
/// alternating sum of face pullbacks gives the horizontal differential, the
/// total complex is taken, and the output is its cohomology with the induced
/// Frobenius (zero differential on the output model).
pub fn hypercover_assemble(h: &HypercoverData) -> Result<FrobComplex> {
    check_hypercover(h)?;

    // Blocks of level p contributing to row q, by block index.
    let row_blocks = |p: usize, q: i64| -> Vec<usize> {
        h.levels[p]
            .iter()
            .enumerate()
            .filter(|(_, name)| block_rows(name).expect("names checked").contains(&q))
            .map(|(b, _)| b)
            .collect()
    };
    let qs: Vec<i64> = vec![0, 2];

    let mut dims = BTreeMap::new();
    let mut dh = BTreeMap::new();
    for (p, _) in h.levels.iter().enumerate() {
        for &q in &qs {
            let rows = row_blocks(p, q);
            if rows.is_empty() {
                continue;
            }
            dims.insert((p as i64, q), rows.len());
        }
    }
    for (p, fam) in h.faces.iter().enumerate() {
        for &q in &qs {
            let source = row_blocks(p, q);
            let target = row_blocks(p + 1, q);
            if source.is_empty() || target.is_empty() {
                continue;
            }
            let col_of: BTreeMap<usize, usize> =
                source.iter().enumerate().map(|(idx, &b)| (b, idx)).collect();
            let mut m = Matrix::zero(target.len(), source.len());
            for (row, &b) in target.iter().enumerate() {
                for (j, assign) in fam.iter().enumerate() {
                    if let Some(&col) = col_of.get(&assign[b]) {
                        let sign = if j % 2 == 0 { 1 } else { -1 };
                        m.add_to(row, col, Scalar::from_int(sign));
                    }
                }
            }
            dh.insert((p as i64, q), m);
        }
    }
    let double = DoubleComplex::new(dims, dh, BTreeMap::new())?;
    let tot = double.tot();

    // Frobenius on the total complex: p^{q/2} on the row-q part.
    let (lo, hi) = tot.complex.support();
    let mut phi = BTreeMap::new();
    for n in lo..=hi {
        if tot.complex.dim(n) == 0 {
            continue;
        }
        let blocks: Vec<Matrix> = tot
            .blocks(n)
            .iter()
            .map(|b| {
                Matrix::identity(b.dim)
                    .scale(&Scalar::from_int(h.prime).pow(b.q / 2))
            })
            .collect();
        let refs: Vec<&Matrix> = blocks.iter().collect();
        phi.insert(n, Matrix::block_diag(&refs));
    }
    let assembled = FrobComplex::new(tot.complex.clone(), phi, h.prime)?;

    // Minimal output model: cohomology with the induced Frobenius.
    let mut out_dims = BTreeMap::new();
    let mut out_phi = BTreeMap::new();
    for n in lo..=hi {
        let hdim = tot.complex.cohomology(n).dim;
        if hdim > 0 {
            out_dims.insert(n, hdim);
            out_phi.insert(n, assembled.phi().induced_map(n));
        }
    }
    let model = Complex::new(out_dims, BTreeMap::new())?;
    FrobComplex::new(model, out_phi, h.prime)
}

/// The hypercover of a curve with one node: level 0 is the node plus the
/// normalization, level 1 is the two preimages of the node, one face sending
/// both to the node and the other embedding them into the normalization.
pub fn nodal_cubic_hypercover() -> HypercoverData {
    HypercoverData {
        prime: DEFAULT_PRIME,
        levels: vec![
            vec!["point".to_string(), "p1".to_string()],
            vec!["point".to_string(), "point".to_string()],
        ],
        faces: vec![vec![vec![0, 0], vec![1, 1]]],
    }
}

/// A curated example: either a full package or a bare Frobenius complex.
#[derive(Clone, Debug)]
pub enum BuiltinExample {
    Package(Box<SyntomicPackage>),
    Frob(FrobComplex),
}

pub fn builtin_names() -> [&'static str; 4] {
    ["gm", "p1", "elliptic-mult", "nodal-cubic"]
}

fn line_complex(lines: &[(i64, usize)]) -> Complex {
    let dims = lines.iter().copied().collect();
    Complex::new(dims, BTreeMap::new()).expect("zero differentials always square to zero")
}

fn line_frob(prime: i64, lines: &[(i64, i64)]) -> FrobComplex {
    let c = line_complex(&lines.iter().map(|&(n, _)| (n, 1)).collect::<Vec<_>>());
    let phi = lines
        .iter()
        .map(|&(n, e)| (n, Matrix::identity(1).scale(&Scalar::from_int(prime).pow(e))))
        .collect();
    FrobComplex::new(c, phi, prime).expect("diagonal Frobenius lines are valid")
}

/// The generic-fiber side shared by the curve packages: de Rham dimensions
/// `(1, 2, 1)`, first filtration step one line in each of degrees 1 and 2,
/// second step zero.
fn curve_fdr() -> (BTreeMap<i64, Complex>, BTreeMap<i64, ChainMap>) {
    let f0 = line_complex(&[(0, 1), (1, 2), (2, 1)]);
    let f1 = line_complex(&[(1, 1), (2, 1)]);
    let f2 = Complex::zero();
    let mut t0 = BTreeMap::new();
    t0.insert(1, Matrix::from_int_rows(&[&[0], &[1]]));
    t0.insert(2, Matrix::identity(1));
    let inc = ChainMap::new(f1.clone(), f0.clone(), t0).expect("filtration step includes");
    let zero = ChainMap::zero(&f2, &f1);
    let fdr = [(0, f0), (1, f1), (2, f2)].into_iter().collect();
    let fdr_maps = [(0, inc), (1, zero)].into_iter().collect();
    (fdr, fdr_maps)
}

/// Elliptic curve with multiplicative reduction at the default prime: the
/// special fiber contributes the multiplicative-group lines (eigenvalues
/// 1 and p), the generic fiber the curve's filtered de Rham data, and the
/// specialization identifies the degree-1 filtration line with the
/// Frobenius-side line of degree 1.
fn elliptic_mult_package() -> SyntomicPackage {
    let prime = DEFAULT_PRIME;
    let rig = line_frob(prime, &[(0, 0), (1, 1)]);
    let rig_k = rig.complex().clone();
    let bc = ChainMap::new(
        rig_k.clone(),
        rig_k.clone(),
        rig_k.dims().iter().map(|(&n, &d)| (n, Matrix::identity(d))).collect(),
    )
    .expect("identity base change");
    let (fdr, fdr_maps) = curve_fdr();
    let mut sp_comps = BTreeMap::new();
    sp_comps.insert(0, Matrix::identity(1));
    sp_comps.insert(1, Matrix::from_int_rows(&[&[0, 1]]));
    // Degree 2 is forced to zero: the target vanishes there.
    let sp = ChainMap::new(fdr[&0].clone(), rig_k.clone(), sp_comps)
        .expect("specialization is a chain map");
    SyntomicPackage::new(rig, rig_k, bc, fdr, fdr_maps, sp, None)
        .expect("curated package is valid")
        .with_collapsed_zigzag()
}

/// Nodal curve package: the special-fiber side is assembled from
/// [`nodal_cubic_hypercover`], the generic-fiber side reuses the elliptic
/// filtered de Rham data. The special fiber is singular, so the syntomic
/// numbers this package produces are formal evaluations of the machinery on
/// the assembled input, not canonical invariants of the curve.
fn nodal_cubic_package() -> Result<SyntomicPackage> {
    let rig = hypercover_assemble(&nodal_cubic_hypercover())?;
    let rig_k = rig.complex().clone();
    let bc = ChainMap::new(
        rig_k.clone(),
        rig_k.clone(),
        rig_k.dims().iter().map(|(&n, &d)| (n, Matrix::identity(d))).collect(),
    )?;
    let (fdr, fdr_maps) = curve_fdr();
    let mut sp_comps = BTreeMap::new();
    sp_comps.insert(0, Matrix::identity(1));
    sp_comps.insert(1, Matrix::from_int_rows(&[&[0, 1]]));
    sp_comps.insert(2, Matrix::identity(1));
    let sp = ChainMap::new(fdr[&0].clone(), rig_k.clone(), sp_comps)?;
    Ok(SyntomicPackage::new(rig, rig_k, bc, fdr, fdr_maps, sp, None)?
        .with_collapsed_zigzag())
}

/// Returns a curated example by name; see [`builtin_names`].
pub fn builtin_example(name: &str) -> Result<BuiltinExample> {
    match name {
        "gm" => Ok(BuiltinExample::Frob(line_frob(DEFAULT_PRIME, &[(0, 0), (1, 1)]))),
        "p1" => Ok(BuiltinExample::Frob(line_frob(DEFAULT_PRIME, &[(0, 0), (2, 1)]))),
        "elliptic-mult" => Ok(BuiltinExample::Package(Box::new(elliptic_mult_package()))),
        "nodal-cubic" => Ok(BuiltinExample::Package(Box::new(nodal_cubic_package()?))),
        other => Err(Error::UnknownExample { name: other.to_string() }),
    }
}

#[derive(Serialize, Deserialize)]
struct PackageWire {
    schema_version: u32,
    prime: i64,
    rig: FrobComplex,
    #[serde(rename = "rigK")]
    rig_k: Complex,
    bc: BTreeMap<i64, Matrix>,
    fdr: BTreeMap<i64, Complex>,
    fdr_maps: BTreeMap<i64, BTreeMap<i64, Matrix>>,
    sp: BTreeMap<i64, Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    zigzag: Option<ZigzagNodes>,
}

fn comps_of(f: &ChainMap) -> BTreeMap<i64, Matrix> {
    let (slo, shi) = f.source().support();
    let (tlo, thi) = f.target().support();
    (slo.min(tlo)..=shi.max(thi))
        .map(|n| (n, f.comp(n)))
        .filter(|(_, m)| m.rows() > 0 && m.cols() > 0)
        .collect()
}

impl From<SyntomicPackage> for PackageWire {
    fn from(p: SyntomicPackage) -> Self {
        PackageWire {
            schema_version: PACKAGE_SCHEMA_VERSION,
            prime: p.prime,
            bc: comps_of(&p.bc),
            sp: comps_of(&p.sp),
            fdr_maps: p.fdr_maps.iter().map(|(&i, f)| (i, comps_of(f))).collect(),
            rig: p.rig,
            rig_k: p.rig_k,
            fdr: p.fdr,
            zigzag: p.zigzag,
        }
    }
}

impl TryFrom<PackageWire> for SyntomicPackage {
    type Error = Error;

    fn try_from(w: PackageWire) -> Result<Self> {
        if w.schema_version != PACKAGE_SCHEMA_VERSION {
            return Err(Error::invalid(
                "schema_version",
                format!("got {}, supported {}", w.schema_version, PACKAGE_SCHEMA_VERSION),
            ));
        }
        if w.rig.prime() != w.prime {
            return Err(Error::invalid(
                "prime",
                format!("package says {}, rig says {}", w.prime, w.rig.prime()),
            ));
        }
        let bc = ChainMap::new(w.rig.complex().clone(), w.rig_k.clone(), w.bc)?;
        let f0 = w
            .fdr
            .get(&0)
            .ok_or(Error::MissingFiltration { step: 0 })?
            .clone();
        let sp = ChainMap::new(f0, w.rig_k.clone(), w.sp)?;
        let mut fdr_maps = BTreeMap::new();
        for (i, comps) in w.fdr_maps {
            let src = w
                .fdr
                .get(&(i + 1))
                .ok_or(Error::MissingFiltration { step: i + 1 })?
                .clone();
            let tgt = w
                .fdr
                .get(&i)
                .ok_or(Error::MissingFiltration { step: i })?
                .clone();
            fdr_maps.insert(i, ChainMap::new(src, tgt, comps)?);
        }
        SyntomicPackage::new(w.rig, w.rig_k, bc, w.fdr, fdr_maps, sp, w.zigzag)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fisoc::abs_rigid;
    use crate::gen;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn elliptic() -> SyntomicPackage {
        match builtin_example("elliptic-mult").unwrap() {
            BuiltinExample::Package(p) => *p,
            _ => panic!("elliptic-mult is a package"),
        }
    }

    fn nodal() -> SyntomicPackage {
        match builtin_example("nodal-cubic").unwrap() {
            BuiltinExample::Package(p) => *p,
            _ => panic!("nodal-cubic is a package"),
        }
    }

    fn dims_agree(a: &BTreeMap<i64, usize>, b: &BTreeMap<i64, usize>) -> bool {
        let keys: std::collections::BTreeSet<i64> =
            a.keys().chain(b.keys()).copied().collect();
        keys.into_iter().all(|n| {
            a.get(&n).copied().unwrap_or(0) == b.get(&n).copied().unwrap_or(0)
        })
    }

    #[test]
    fn trivial_package_is_all_zero() {
        let pkg = SyntomicPackage::trivial(5);
        for i in 0..=2 {
            assert!(syntomic_cone(&pkg, i).unwrap().is_empty());
            assert!(syntomic_holim(&pkg, i).unwrap().is_empty());
            assert!(localization_dims(&pkg, i).unwrap().is_empty());
            let les = syntomic_les(&pkg, i).unwrap();
            assert!(les.is_exact(), "{les}");
            assert!(les.entries.iter().all(|e| e.dim == 0));
            let loc = localization(&pkg, i).unwrap();
            assert!(loc.is_ok(), "{loc}");
        }
    }

    #[test]
    fn elliptic_cone_matches_worked_values() {
        let pkg = elliptic();
        let dims = syntomic_cone(&pkg, 1).unwrap();
        let expected: BTreeMap<i64, usize> =
            [(0, 0), (1, 2), (2, 2)].into_iter().collect();
        assert_eq!(dims, expected);
    }

    #[test]
    fn elliptic_holim_agrees_with_cone_and_reports_top_degree_zero() {
        let pkg = elliptic();
        let cone_dims = syntomic_cone(&pkg, 1).unwrap();
        let holim_dims = syntomic_holim(&pkg, 1).unwrap();
        assert!(dims_agree(&cone_dims, &holim_dims), "{cone_dims:?} vs {holim_dims:?}");
        // The fence window reaches one degree higher; the extra slot is zero.
        assert_eq!(holim_dims.get(&3), Some(&0));
        assert_eq!(holim_dims.get(&1), Some(&2));
        assert_eq!(holim_dims.get(&2), Some(&2));
        assert_eq!(holim_dims.get(&0), Some(&0));
    }

    #[test]
    fn cone_agrees_with_holim_on_builtin_packages_at_all_twists() {
        for pkg in [elliptic(), nodal(), SyntomicPackage::trivial(5)] {
            for i in 0..=2 {
                let c = syntomic_cone(&pkg, i).unwrap();
                let h = syntomic_holim(&pkg, i).unwrap();
                assert!(dims_agree(&c, &h), "twist {i}: {c:?} vs {h:?}");
            }
        }
    }

    fn fatten_zigzag(rng: &mut ChaCha8Rng, pkg: &SyntomicPackage) -> SyntomicPackage {
        let z = pkg.zigzag().expect("builtin packages carry a zigzag").clone();
        let (fat_a, proj_a) = gen::fatten_with_projection(rng, &z.a);
        let a_to_rigk = z.a_to_rigk.compose(&proj_a).unwrap();
        let a_to_b = z.a_to_b.compose(&proj_a).unwrap();
        let (fat_c, inc_c, proj_c) = gen::fatten_with_retraction(rng, &z.c);
        let dr_to_c = inc_c.compose(&z.dr_to_c).unwrap();
        let c_to_b = z.c_to_b.compose(&proj_c).unwrap();
        let c_to_d = z.c_to_d.compose(&proj_c).unwrap();
        let (fat_b, inc_b) = gen::fatten_with_inclusion(rng, &z.b);
        let a_to_b = inc_b.compose(&a_to_b).unwrap();
        let c_to_b = inc_b.compose(&c_to_b).unwrap();
        let (fat_d, inc_d) = gen::fatten_with_inclusion(rng, &z.d);
        let c_to_d = inc_d.compose(&c_to_d).unwrap();
        let fat = ZigzagNodes {
            a: fat_a,
            b: fat_b,
            c: fat_c,
            d: fat_d,
            a_to_rigk,
            a_to_b,
            c_to_b,
            c_to_d,
            dr_to_c,
        };
        SyntomicPackage::new(
            pkg.rig.clone(),
            pkg.rig_k.clone(),
            pkg.bc.clone(),
            pkg.fdr.clone(),
            pkg.fdr_maps.clone(),
            pkg.sp.clone(),
            Some(fat),
        )
        .expect("fattened zigzag stays valid")
    }

    #[test]
    fn holim_is_invariant_under_zigzag_resolutions() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for pkg in [elliptic(), nodal()] {
            let base = syntomic_cone(&pkg, 1).unwrap();
            for _ in 0..3 {
                let fat = fatten_zigzag(&mut rng, &pkg);
                let h = syntomic_holim(&fat, 1).unwrap();
                assert!(dims_agree(&base, &h), "{base:?} vs {h:?}");
            }
        }
    }

    #[test]
    fn rejects_zigzag_whose_comparison_is_not_quasi_iso() {
        let pkg = elliptic();
        let mut z = pkg.zigzag().unwrap().clone();
        z.a_to_rigk = ChainMap::zero(&z.a, pkg.rig_k());
        let err = SyntomicPackage::new(
            pkg.rig.clone(),
            pkg.rig_k.clone(),
            pkg.bc.clone(),
            pkg.fdr.clone(),
            pkg.fdr_maps.clone(),
            pkg.sp.clone(),
            Some(z),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Invalid { what: "zigzag comparison", .. }));
    }

    #[test]
    fn missing_filtration_and_missing_nodes_are_reported() {
        let pkg = elliptic();
        assert!(matches!(
            syntomic_cone(&pkg, 3),
            Err(Error::MissingFiltration { step: 3 })
        ));
        let bare = SyntomicPackage::new(
            pkg.rig.clone(),
            pkg.rig_k.clone(),
            pkg.bc.clone(),
            pkg.fdr.clone(),
            pkg.fdr_maps.clone(),
            pkg.sp.clone(),
            None,
        )
        .unwrap();
        assert!(matches!(syntomic_holim(&bare, 1), Err(Error::MissingNodes)));
        // Negative twists fall back to the whole de Rham complex.
        assert!(syntomic_cone(&pkg, -1).is_ok());
    }

    #[test]
    fn elliptic_les_is_exact_with_worked_entries() {
        let pkg = elliptic();
        let les = syntomic_les(&pkg, 1).unwrap();
        assert!(les.is_exact(), "{les}");
        let syn1 = les.entries.iter().find(|e| e.label == "H^1_syn").unwrap();
        assert_eq!(syn1.dim, 2);
        let syn2 = les.entries.iter().find(|e| e.label == "H^2_syn").unwrap();
        assert_eq!(syn2.dim, 2);
        // The degree-1 middle column has dimension 2 and rank-1 outgoing map,
        // so its kernel is one line.
        let mid = les
            .entries
            .iter()
            .find(|e| e.label == "H^1_phi + F^1H^1_dR")
            .unwrap();
        assert_eq!(mid.dim, 2);
        assert_eq!(mid.outgoing_rank, Some(1));
        // Degree 0: the syntomic group vanishes and the sequence starts
        // injectively one step later.
        let syn0 = les.entries.iter().find(|e| e.label == "H^0_syn").unwrap();
        assert_eq!(syn0.dim, 0);
    }

    #[test]
    fn les_columns_match_their_independent_computations() {
        let pkg = elliptic();
        let les = syntomic_les(&pkg, 1).unwrap();
        for n in 0..=2 {
            let mid = les
                .entries
                .iter()
                .find(|e| e.label == format!("H^{n}_phi + F^1H^{n}_dR"))
                .unwrap();
            let expected =
                abs_rigid(pkg.rig(), 1, n) + pkg.fdr_at(1).unwrap().cohomology(n).dim;
            assert_eq!(mid.dim, expected, "middle column at n = {n}");
            let right = les
                .entries
                .iter()
                .find(|e| e.label == format!("H^{n}_rig,K"))
                .unwrap();
            assert_eq!(right.dim, pkg.rig_k().cohomology(n).dim);
        }
    }

    #[test]
    fn elliptic_localization_dims_and_vanishing_delta() {
        let pkg = elliptic();
        let dims = localization_dims(&pkg, 1).unwrap();
        let expected: BTreeMap<i64, usize> =
            [(0, 0), (1, 1), (2, 1)].into_iter().collect();
        assert_eq!(dims, expected);
        let deltas = localization_delta_ranks(&pkg, 1).unwrap();
        assert!(deltas.values().all(|&r| r == 0), "{deltas:?}");
        let report = localization(&pkg, 1).unwrap();
        assert!(report.is_ok(), "{report}");
    }

    #[test]
    fn nodal_localization_keeps_the_special_fiber() {
        let pkg = nodal();
        let dims = localization_dims(&pkg, 1).unwrap();
        // One line from each rigid degree of the special fiber, shifted up:
        // the degree-3 entry comes from the twist-eigenvalue line.
        let expected: BTreeMap<i64, usize> =
            [(0, 0), (1, 1), (2, 1), (3, 1)].into_iter().collect();
        assert_eq!(dims, expected);
        let report = localization(&pkg, 1).unwrap();
        assert!(report.is_ok(), "{report}");
    }

    #[test]
    fn localization_is_exact_across_builtins_and_twists() {
        for pkg in [elliptic(), nodal(), SyntomicPackage::trivial(5)] {
            for i in 0..=2 {
                let report = localization(&pkg, i).unwrap();
                assert!(report.is_ok(), "twist {i}:\n{report}");
            }
        }
    }

    #[test]
    fn besser_convention_gives_identical_dimensions() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for pkg in [elliptic(), nodal(), SyntomicPackage::trivial(5)] {
            for i in 0..=2 {
                assert_eq!(
                    besser_cone_dims(&pkg, i).unwrap(),
                    syntomic_cone(&pkg, i).unwrap(),
                    "twist {i}"
                );
            }
        }
        let fat = fatten_zigzag(&mut rng, &elliptic());
        assert_eq!(besser_cone_dims(&fat, 1).unwrap(), syntomic_cone(&fat, 1).unwrap());
    }

    fn random_package(rng: &mut ChaCha8Rng) -> SyntomicPackage {
        let rig = gen::random_frob_complex(rng, 5);
        let rig_k = rig.complex().clone();
        let bc = ChainMap::new(
            rig_k.clone(),
            rig_k.clone(),
            rig_k.dims().iter().map(|(&n, &d)| (n, Matrix::identity(d))).collect(),
        )
        .unwrap();
        let f0 = gen::random_complex(rng);
        let f1 = gen::random_complex(rng);
        let f2 = gen::random_complex(rng);
        let t0 = gen::random_chain_map(rng, &f1, &f0);
        let t1 = gen::random_chain_map(rng, &f2, &f1);
        let sp = gen::random_chain_map(rng, &f0, &rig_k);
        let fdr = [(0, f0), (1, f1), (2, f2)].into_iter().collect();
        let fdr_maps = [(0, t0), (1, t1)].into_iter().collect();
        SyntomicPackage::new(rig, rig_k, bc, fdr, fdr_maps, sp, None)
            .expect("random package is valid")
    }

    #[test]
    fn les_and_localization_sweep_on_random_packages() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for case in 0..15 {
            let pkg = random_package(&mut rng);
            for i in 0..=2 {
                let les = syntomic_les(&pkg, i).unwrap();
                assert!(les.is_exact(), "case {case}, twist {i}:\n{les}");
                let loc = localization(&pkg, i).unwrap();
                assert!(loc.is_ok(), "case {case}, twist {i}:\n{loc}");
                assert_eq!(
                    besser_cone_dims(&pkg, i).unwrap(),
                    syntomic_cone(&pkg, i).unwrap()
                );
            }
        }
    }

    #[test]
    fn nodal_hypercover_assembles_the_expected_frobenius_lines() {
        let rig = hypercover_assemble(&nodal_cubic_hypercover()).unwrap();
        let dims: BTreeMap<i64, usize> = rig.complex().dims().clone();
        let expected: BTreeMap<i64, usize> =
            [(0, 1), (1, 1), (2, 1)].into_iter().collect();
        assert_eq!(dims, expected);
        assert_eq!(rig.phi().comp(0), Matrix::identity(1));
        assert_eq!(rig.phi().comp(1), Matrix::identity(1));
        assert_eq!(rig.phi().comp(2), Matrix::identity(1).scale(&Scalar::from_int(5)));
    }

    #[test]
    fn degenerate_hypercover_preserves_the_blocks() {
        // Three levels of the same projective line with all faces the
        // identity assignment: the output is the line's own cohomology.
        let h = HypercoverData {
            prime: 5,
            levels: vec![vec!["p1".into()], vec!["p1".into()], vec!["p1".into()]],
            faces: vec![vec![vec![0], vec![0]], vec![vec![0], vec![0], vec![0]]],
        };
        let out = hypercover_assemble(&h).unwrap();
        let expected: BTreeMap<i64, usize> = [(0, 1), (2, 1)].into_iter().collect();
        assert_eq!(out.complex().dims().clone(), expected);
        assert_eq!(out.phi().comp(2), Matrix::identity(1).scale(&Scalar::from_int(5)));
    }

    #[test]
    fn disjoint_points_add_up() {
        let h = HypercoverData {
            prime: 5,
            levels: vec![vec!["point".into(), "point".into()]],
            faces: vec![],
        };
        let out = hypercover_assemble(&h).unwrap();
        assert_eq!(out.complex().dim(0), 2);
        assert_eq!(out.phi().comp(0), Matrix::identity(2));
    }

    #[test]
    fn hypercover_validation_errors() {
        let unknown = HypercoverData {
            prime: 5,
            levels: vec![vec!["torus".into()]],
            faces: vec![],
        };
        assert!(matches!(
            hypercover_assemble(&unknown),
            Err(Error::BlockUnknown { .. })
        ));

        let twisted = HypercoverData {
            prime: 5,
            levels: vec![
                vec!["point".into(), "point".into()],
                vec!["point".into(), "point".into()],
                vec!["point".into(), "point".into()],
            ],
            faces: vec![
                vec![vec![0, 1], vec![1, 0]],
                vec![vec![0, 0], vec![0, 0], vec![0, 1]],
            ],
        };
        assert!(matches!(
            hypercover_assemble(&twisted),
            Err(Error::SimplicialIdentityViolation { .. })
        ));
    }

    #[test]
    fn builtin_examples_by_name() {
        match builtin_example("gm").unwrap() {
            BuiltinExample::Frob(m) => {
                assert_eq!(m.complex().dim(0), 1);
                assert_eq!(m.complex().dim(1), 1);
                assert_eq!(m.phi().comp(1), Matrix::identity(1).scale(&Scalar::from_int(5)));
            }
            _ => panic!("gm is a bare Frobenius complex"),
        }
        match builtin_example("p1").unwrap() {
            BuiltinExample::Frob(m) => {
                assert_eq!(m.complex().dim(0), 1);
                assert_eq!(m.complex().dim(2), 1);
            }
            _ => panic!("p1 is a bare Frobenius complex"),
        }
        assert!(matches!(
            builtin_example("nope"),
            Err(Error::UnknownExample { .. })
        ));
    }

    #[test]
    fn nodal_builtin_i_shriek_dims() {
        let pkg = nodal();
        let dims = localization_dims(&pkg, 1).unwrap();
        assert_eq!(dims.get(&1), Some(&1));
        assert_eq!(dims.get(&2), Some(&1));
    }

    #[test]
    fn package_json_round_trip() {
        let pkg = elliptic();
        let json = serde_json::to_string(&pkg).unwrap();
        assert!(json.contains("\"schema_version\":1"));
        let back: SyntomicPackage = serde_json::from_str(&json).unwrap();
        assert_eq!(syntomic_cone(&back, 1).unwrap(), syntomic_cone(&pkg, 1).unwrap());
        assert_eq!(
            syntomic_holim(&back, 1).unwrap(),
            syntomic_holim(&pkg, 1).unwrap()
        );

        let bumped = json.replace("\"schema_version\":1", "\"schema_version\":9");
        assert!(serde_json::from_str::<SyntomicPackage>(&bumped).is_err());
    }

    #[test]
    fn filtration_steps_include_injectively_on_cohomology() {
        // Surrogate strictness check on the shipped packages.
        for pkg in [elliptic(), nodal()] {
            for i in 0..=1 {
                let inc = pkg.filtration_inclusion(i + 1).unwrap();
                let (lo, hi) = inc.source().support();
                for n in lo..=hi {
                    let h = inc.source().cohomology(n).dim;
                    assert_eq!(crate::linalg::rank(&inc.induced_map(n)), h);
                }
            }
        }
    }
}
