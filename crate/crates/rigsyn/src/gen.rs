//! Seeded random generators for test sweeps: complexes built from dots and
//! disks behind a change of basis, chain maps sampled from the kernel of the
//! commutation constraints, Frobenius complexes with structured eigenvalues,
//! and quasi-isomorphic fattenings.
//!
//! Everything is deterministic given the RNG state; dimensions stay small so
//! exact arithmetic sweeps run fast.

use crate::complex::{ChainMap, Complex};
use crate::fisoc::FrobComplex;
use crate::godement::{FiniteSite, PosetSheaf};
use crate::linalg::kernel_basis;
use crate::matrix::Matrix;
use crate::Scalar;
use rand::Rng;
use std::collections::BTreeMap;

/// A random unimodular matrix: the identity hit by a few elementary row
/// operations, so it is invertible with small integer entries.
pub fn random_unimodular(rng: &mut impl Rng, n: usize) -> Matrix {
    let mut m = Matrix::identity(n);
    if n < 2 {
        return m;
    }
    let ops = rng.gen_range(n..2 * n + 2);
    for _ in 0..ops {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n);
        while j == i {
            j = rng.gen_range(0..n);
        }
        let c = Scalar::from_int(*[-2, -1, 1, 2].get(rng.gen_range(0..4)).unwrap());
        // row_j += c * row_i
        for col in 0..n {
            let v = m.get(i, col) * c.clone();
            let cur = m.get(j, col);
            m.set(j, col, cur + v);
        }
    }
    m
}

fn inverse(m: &Matrix) -> Matrix {
    crate::linalg::solve(m, &Matrix::identity(m.rows())).expect("unimodular matrices invert")
}

/// Building blocks: a dot is `K` in one degree, a disk is `K → K` with an
/// invertible differential (so it is contractible).
#[derive(Clone, Copy, Debug)]
enum Summand {
    Dot { degree: i64 },
    Disk { degree: i64 },
}

fn random_summands(rng: &mut impl Rng) -> Vec<Summand> {
    let count = rng.gen_range(1..=4);
    (0..count)
        .map(|_| {
            let degree = rng.gen_range(0..=2);
            if rng.gen_bool(0.5) {
                Summand::Dot { degree }
            } else {
                Summand::Disk { degree }
            }
        })
        .collect()
}

fn assemble(summands: &[Summand], eigenvalue: impl Fn(usize) -> Scalar) -> (Complex, BTreeMap<i64, Matrix>) {
    let mut dims: BTreeMap<i64, usize> = BTreeMap::new();
    // Per-summand slots: (degree, index within degree).
    let mut slots: Vec<Vec<(i64, usize)>> = Vec::new();
    for s in summands {
        match *s {
            Summand::Dot { degree } => {
                let idx = *dims.entry(degree).or_insert(0);
                dims.insert(degree, idx + 1);
                slots.push(vec![(degree, idx)]);
            }
            Summand::Disk { degree } => {
                let i0 = *dims.entry(degree).or_insert(0);
                dims.insert(degree, i0 + 1);
                let i1 = *dims.entry(degree + 1).or_insert(0);
                dims.insert(degree + 1, i1 + 1);
                slots.push(vec![(degree, i0), (degree + 1, i1)]);
            }
        }
    }
    let dim_at = |n: i64| dims.get(&n).copied().unwrap_or(0);
    let mut d: BTreeMap<i64, Matrix> = BTreeMap::new();
    let mut phi: BTreeMap<i64, Matrix> = BTreeMap::new();
    for (&n, &dim) in &dims {
        d.insert(n, Matrix::zero(dim_at(n + 1), dim));
        phi.insert(n, Matrix::zero(dim, dim));
    }
    for (k, s) in summands.iter().enumerate() {
        let ev = eigenvalue(k);
        match *s {
            Summand::Dot { .. } => {
                let (n, i) = slots[k][0];
                phi.get_mut(&n).unwrap().set(i, i, ev);
            }
            Summand::Disk { degree } => {
                let (n0, i0) = slots[k][0];
                let (_, i1) = slots[k][1];
                d.get_mut(&degree).unwrap().set(i1, i0, Scalar::one());
                phi.get_mut(&n0).unwrap().set(i0, i0, ev.clone());
                phi.get_mut(&(n0 + 1)).unwrap().set(i1, i1, ev);
            }
        }
    }
    let c = Complex::new(dims, d).expect("dots and disks form a complex");
    (c, phi)
}

fn conjugate(c: &Complex, extra: &BTreeMap<i64, Matrix>, rng: &mut impl Rng) -> (Complex, BTreeMap<i64, Matrix>, BTreeMap<i64, Matrix>) {
    let (lo, hi) = c.support();
    let mut s: BTreeMap<i64, Matrix> = BTreeMap::new();
    let mut s_inv: BTreeMap<i64, Matrix> = BTreeMap::new();
    for n in lo..=hi {
        let u = random_unimodular(rng, c.dim(n));
        s_inv.insert(n, inverse(&u));
        s.insert(n, u);
    }
    let at = |m: &BTreeMap<i64, Matrix>, n: i64, dim: usize| {
        m.get(&n).cloned().unwrap_or_else(|| Matrix::identity(dim))
    };
    let mut d = BTreeMap::new();
    let mut conj_extra = BTreeMap::new();
    for n in lo..=hi {
        let sn_inv = at(&s_inv, n, c.dim(n));
        let sn1 = at(&s, n + 1, c.dim(n + 1));
        d.insert(n, sn1.mul(&c.d(n)).mul(&sn_inv));
        if let Some(e) = extra.get(&n) {
            let sn = at(&s, n, c.dim(n));
            conj_extra.insert(n, sn.mul(e).mul(&sn_inv));
        }
    }
    let cc = Complex::new(c.dims().clone(), d).expect("conjugation preserves complexes");
    (cc, conj_extra, s)
}

/// A random bounded complex with dimensions at most 4 per degree, supported
/// in degrees 0..=3, with nontrivial differentials but known cohomology by
/// construction.
pub fn random_complex(rng: &mut impl Rng) -> Complex {
    let summands = random_summands(rng);
    let (c, _) = assemble(&summands, |_| Scalar::one());
    let (cc, _, _) = conjugate(&c, &BTreeMap::new(), rng);
    cc
}

/// A random Frobenius complex over the given prime: eigenvalues are drawn
/// from `{1, p, p², 2}` per summand, then everything is conjugated.
pub fn random_frob_complex(rng: &mut impl Rng, prime: i64) -> FrobComplex {
    let summands = random_summands(rng);
    let evs: Vec<Scalar> = (0..summands.len())
        .map(|_| match rng.gen_range(0..5) {
            0 => Scalar::one(),
            1 | 2 => Scalar::from_int(prime),
            3 => Scalar::from_int(prime * prime),
            _ => Scalar::from_int(2),
        })
        .collect();
    let (c, phi) = assemble(&summands, |k| evs[k].clone());
    let (cc, conj_phi, _) = conjugate(&c, &phi, rng);
    FrobComplex::new(cc, conj_phi, prime).expect("structured Frobenius is valid")
}

/// A random chain map `src → tgt`, sampled as a random integer combination
/// of a basis of the space of all chain maps (the kernel of the commutation
/// constraints).
pub fn random_chain_map(rng: &mut impl Rng, src: &Complex, tgt: &Complex) -> ChainMap {
    let (slo, shi) = src.support();
    let (tlo, thi) = tgt.support();
    let lo = slo.min(tlo);
    let hi = shi.max(thi);

    // Unknowns: entries of each component, row-major, degrees in order.
    let mut offsets: BTreeMap<i64, usize> = BTreeMap::new();
    let mut total = 0usize;
    for n in lo..=hi {
        offsets.insert(n, total);
        total += tgt.dim(n) * src.dim(n);
    }
    if total == 0 {
        return ChainMap::zero(src, tgt);
    }

    // Constraints per degree: d_tgt ∘ f_n − f_{n+1} ∘ d_src = 0.
    let mut rows: Vec<Matrix> = Vec::new();
    for n in lo..=hi {
        let eqs = tgt.dim(n + 1) * src.dim(n);
        if eqs == 0 {
            continue;
        }
        let mut block = Matrix::zero(eqs, total);
        if tgt.dim(n) > 0 {
            let a = Matrix::kronecker(&tgt.d(n), &Matrix::identity(src.dim(n)));
            block.paste(0, offsets[&n], &a);
        }
        if src.dim(n + 1) > 0 {
            let b = Matrix::kronecker(&Matrix::identity(tgt.dim(n + 1)), &src.d(n).transpose());
            block.paste(0, offsets[&(n + 1)], &b.neg());
        }
        rows.push(block);
    }
    let constraints = rows
        .into_iter()
        .reduce(|acc, m| acc.vstack(&m))
        .unwrap_or_else(|| Matrix::zero(0, total));

    let basis = kernel_basis(&constraints);
    let mut flat = vec![Scalar::zero(); total];
    for v in &basis {
        let c = Scalar::from_int(rng.gen_range(-2..=2));
        if c.is_zero() {
            continue;
        }
        for (i, x) in v.iter().enumerate() {
            if !x.is_zero() {
                flat[i] = flat[i].clone() + x.clone() * c.clone();
            }
        }
    }

    let mut comps = BTreeMap::new();
    for n in lo..=hi {
        let r = tgt.dim(n);
        let c = src.dim(n);
        if r * c == 0 {
            continue;
        }
        let off = offsets[&n];
        let mut m = Matrix::zero(r, c);
        for i in 0..r {
            for j in 0..c {
                m.set(i, j, flat[off + i * c + j].clone());
            }
        }
        comps.insert(n, m);
    }
    ChainMap::new(src.clone(), tgt.clone(), comps)
        .expect("kernel of the commutation constraints consists of chain maps")
}

/// A contractible complex: a random positive number of disks.
pub fn random_contractible(rng: &mut impl Rng) -> Complex {
    let count = rng.gen_range(1..=2);
    let summands: Vec<Summand> = (0..count)
        .map(|_| Summand::Disk { degree: rng.gen_range(0..=2) })
        .collect();
    let (c, _) = assemble(&summands, |_| Scalar::one());
    let (cc, _, _) = conjugate(&c, &BTreeMap::new(), rng);
    cc
}

/// Fattens `c` to a quasi-isomorphic complex with a projection back:
/// `(c ⊕ contractible)` behind a change of basis, and the chain projection
/// onto `c`. For replacing nodes that are sources of arrows.
pub fn fatten_with_projection(rng: &mut impl Rng, c: &Complex) -> (Complex, ChainMap) {
    let pad = random_contractible(rng);
    let (sum, _, projs) = Complex::direct_sum(&[c, &pad]);
    let (fat, _, s) = conjugate(&sum, &BTreeMap::new(), rng);
    let (lo, hi) = sum.support();
    let mut comps = BTreeMap::new();
    for n in lo..=hi {
        let s_inv = match s.get(&n) {
            Some(m) => inverse(m),
            None => Matrix::identity(sum.dim(n)),
        };
        comps.insert(n, projs[0].comp(n).mul(&s_inv));
    }
    let proj = ChainMap::new(fat.clone(), c.clone(), comps)
        .expect("projection off a contractible pad is a chain map");
    (fat, proj)
}

/// Fattens `c` to a quasi-isomorphic complex carrying both an inclusion and
/// a retraction (`proj ∘ inc = id`). For replacing nodes with both incoming
/// and outgoing maps.
pub fn fatten_with_retraction(rng: &mut impl Rng, c: &Complex) -> (Complex, ChainMap, ChainMap) {
    let pad = random_contractible(rng);
    let (sum, incs, projs) = Complex::direct_sum(&[c, &pad]);
    let (fat, _, s) = conjugate(&sum, &BTreeMap::new(), rng);
    let (lo, hi) = sum.support();
    let mut inc_comps = BTreeMap::new();
    let mut proj_comps = BTreeMap::new();
    for n in lo..=hi {
        let sn = s.get(&n).cloned().unwrap_or_else(|| Matrix::identity(sum.dim(n)));
        let sn_inv = inverse(&sn);
        inc_comps.insert(n, sn.mul(&incs[0].comp(n)));
        proj_comps.insert(n, projs[0].comp(n).mul(&sn_inv));
    }
    let inc = ChainMap::new(c.clone(), fat.clone(), inc_comps)
        .expect("inclusion beside a contractible pad is a chain map");
    let proj = ChainMap::new(fat.clone(), c.clone(), proj_comps)
        .expect("projection off a contractible pad is a chain map");
    (fat, inc, proj)
}

/// Fattens `c` to a quasi-isomorphic complex with an inclusion into it. For
/// replacing nodes that are targets of arrows.
pub fn fatten_with_inclusion(rng: &mut impl Rng, c: &Complex) -> (Complex, ChainMap) {
    let pad = random_contractible(rng);
    let (sum, incs, _) = Complex::direct_sum(&[c, &pad]);
    let (fat, _, s) = conjugate(&sum, &BTreeMap::new(), rng);
    let (lo, hi) = sum.support();
    let mut comps = BTreeMap::new();
    for n in lo..=hi {
        let sn = match s.get(&n) {
            Some(m) => m.clone(),
            None => Matrix::identity(sum.dim(n)),
        };
        comps.insert(n, sn.mul(&incs[0].comp(n)));
    }
    let inc = ChainMap::new(c.clone(), fat.clone(), comps)
        .expect("inclusion beside a contractible pad is a chain map");
    (fat, inc)
}

/// A random poset site: up to `max_points` points with generating edges
/// only from lower to higher indices, so the closure is always a partial
/// order.
pub fn random_site(rng: &mut impl Rng, max_points: usize) -> FiniteSite {
    let n = rng.gen_range(1..=max_points);
    let names = (0..n).map(|i| format!("x{i}")).collect();
    let mut relations = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen_bool(0.4) {
                relations.push((i, j));
            }
        }
    }
    FiniteSite::new(names, &relations).expect("index-ordered edges give a poset")
}

/// A random sheaf on the site: a direct sum of one to three convex pieces
/// (constants on an up-set or a down-set, skyscrapers) in degrees 0 and 1,
/// hidden behind a pointwise change of basis. Convexity of each support
/// makes the restriction maps functorial by construction.
pub fn random_sheaf(rng: &mut impl Rng, site: &FiniteSite) -> PosetSheaf {
    struct Piece {
        support: Vec<bool>,
        degree: i64,
        dim: usize,
    }
    let count = rng.gen_range(1..=3);
    let mut pieces = Vec::with_capacity(count);
    for _ in 0..count {
        let at = rng.gen_range(0..site.len());
        let support: Vec<bool> = match rng.gen_range(0..3) {
            0 => (0..site.len()).map(|q| site.leq(at, q)).collect(),
            1 => (0..site.len()).map(|q| site.leq(q, at)).collect(),
            _ => (0..site.len()).map(|q| q == at).collect(),
        };
        pieces.push(Piece {
            support,
            degree: rng.gen_range(0..=1),
            dim: rng.gen_range(1..=2),
        });
    }

    let stalks: Vec<Complex> = (0..site.len())
        .map(|p| {
            let mut dims: BTreeMap<i64, usize> = BTreeMap::new();
            for piece in pieces.iter().filter(|piece| piece.support[p]) {
                *dims.entry(piece.degree).or_insert(0) += piece.dim;
            }
            Complex::new(dims, BTreeMap::new()).expect("zero differential")
        })
        .collect();
    let offset = |p: usize, k: usize| -> usize {
        pieces[..k]
            .iter()
            .filter(|piece| piece.support[p] && piece.degree == pieces[k].degree)
            .map(|piece| piece.dim)
            .sum()
    };

    let mut basis: Vec<BTreeMap<i64, (Matrix, Matrix)>> = Vec::with_capacity(site.len());
    for stalk in &stalks {
        let mut per_degree = BTreeMap::new();
        for (&r, &dim) in stalk.dims() {
            let s = random_unimodular(rng, dim);
            let s_inv = inverse(&s);
            per_degree.insert(r, (s, s_inv));
        }
        basis.push(per_degree);
    }

    let mut gens = BTreeMap::new();
    for p in 0..site.len() {
        for q in 0..site.len() {
            if p == q || !site.leq(p, q) {
                continue;
            }
            let mut comps = BTreeMap::new();
            for (&r, &rows) in stalks[q].dims() {
                let cols = stalks[p].dim(r);
                if cols == 0 {
                    continue;
                }
                let mut m = Matrix::zero(rows, cols);
                for (k, piece) in pieces.iter().enumerate() {
                    if piece.degree == r && piece.support[p] && piece.support[q] {
                        m.paste(offset(q, k), offset(p, k), &Matrix::identity(piece.dim));
                    }
                }
                let (sq, _) = &basis[q][&r];
                let (_, sp_inv) = &basis[p][&r];
                let conj = sq.mul(&m).mul(sp_inv);
                if !conj.is_zero_matrix() {
                    comps.insert(r, conj);
                }
            }
            gens.insert(
                (p, q),
                ChainMap::new(stalks[p].clone(), stalks[q].clone(), comps)
                    .expect("any degreewise map commutes with a zero differential"),
            );
        }
    }
    PosetSheaf::new(site.clone(), stalks, gens).expect("convex pieces are functorial")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unimodular_matrices_are_invertible() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 0..5 {
            let m = random_unimodular(&mut rng, n);
            assert_eq!(crate::linalg::rank(&m), n);
        }
    }

    #[test]
    fn random_complexes_validate_and_stay_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let c = random_complex(&mut rng);
            let (lo, hi) = c.support();
            assert!(lo >= 0 && hi <= 3);
            assert!(c.total_dim() <= 8);
        }
    }

    #[test]
    fn random_chain_maps_commute_and_vary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut nonzero = 0;
        for _ in 0..20 {
            let a = random_complex(&mut rng);
            let b = random_complex(&mut rng);
            let f = random_chain_map(&mut rng, &a, &b);
            let (lo, hi) = a.support();
            if (lo..=hi).any(|n| !f.comp(n).is_zero_matrix()) {
                nonzero += 1;
            }
        }
        assert!(nonzero >= 5, "only {nonzero} nonzero maps in 20 draws");
    }

    #[test]
    fn contractible_pads_are_acyclic_and_fattenings_are_quasi_isos() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            assert!(random_contractible(&mut rng).is_acyclic());
            let c = random_complex(&mut rng);
            let (_, proj) = fatten_with_projection(&mut rng, &c);
            assert!(proj.is_quasi_iso());
            let (_, inc) = fatten_with_inclusion(&mut rng, &c);
            assert!(inc.is_quasi_iso());
        }
    }

    #[test]
    fn retraction_fattening_splits() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..10 {
            let c = random_complex(&mut rng);
            let (_, inc, proj) = fatten_with_retraction(&mut rng, &c);
            assert!(inc.is_quasi_iso());
            assert!(proj.is_quasi_iso());
            let (lo, hi) = c.support();
            for n in lo..=hi {
                assert_eq!(proj.comp(n).mul(&inc.comp(n)), Matrix::identity(c.dim(n)));
            }
        }
    }

    #[test]
    fn random_frob_complexes_have_quasi_iso_frobenius() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let m = random_frob_complex(&mut rng, 5);
            assert!(m.phi().is_quasi_iso());
        }
    }

    #[test]
    fn random_sites_and_sheaves_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..25 {
            let site = random_site(&mut rng, 4);
            assert!(site.len() <= 4);
            let sheaf = random_sheaf(&mut rng, &site);
            // The round trip re-runs the functoriality validation.
            let json = serde_json::to_string(&sheaf).unwrap();
            let back: PosetSheaf = serde_json::from_str(&json).unwrap();
            assert_eq!(back.stalk(0).dims(), sheaf.stalk(0).dims());
        }
    }

    #[test]
    fn random_sheaves_pass_the_stalkwise_contraction() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..3 {
            let site = random_site(&mut rng, 3);
            let sheaf = random_sheaf(&mut rng, &site);
            let report = crate::godement::stalkwise_homotopy_check(&sheaf, 3).unwrap();
            assert!(report.is_ok(), "{report}");
        }
    }
}
