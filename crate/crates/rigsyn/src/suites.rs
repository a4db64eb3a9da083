//! Seeded verification sweeps shared by the command-line front end and the
//! integration tests.
//!
//! Each suite draws its cases from the generators in [`crate::gen`] with a
//! caller-supplied seed, runs a family of exact checks, and returns a
//! [`Report`]. Passing rows record how many witnesses were checked; failing
//! rows pin down the first bad case (seed, case index, and location) so a
//! counterexample can be replayed.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::{cone, les_of_cone, ChainMap, Complex};
use crate::cosimplicial::{alexander_whitney, is_total_coboundary, unpack_total, CosimplicialDGA};
use crate::error::Error;
use crate::Result;
use crate::fence::{ArrowDirection, FenceArrow, FenceDiagram};
use crate::fisoc::{abs_rigid, hom_drig, ses_check, FrobComplex};
use crate::forms::{coface_pullback, exterior_d, integrate, PolyForm};
use crate::gen;
use crate::godement::{bar_dga, gdm, stalkwise_homotopy_check, FiniteSite, PosetSheaf, SheafAlgebra};
use crate::linalg::rank;
use crate::report::{Check, Report};
use crate::ring_axioms::{
    check_monoid, check_orientation, check_stability, derham_toy, perturbed, unit_model,
    GradedMonoidData, Perturbation,
};
use crate::scalar::Scalar;
use crate::syntomic::{besser_cone_dims, builtin_example, syntomic_cone, BuiltinExample};
use crate::ts::{integration_map, simple_total, stabilization_scan, ts_normalize, ts_product, TsElement};

/// True when `f` induces isomorphisms on cohomology in all degrees below
/// `bound` (starting from the lower end of either support window).
fn quasi_iso_below(f: &ChainMap, bound: i64) -> bool {
    let (slo, _) = f.source().support();
    let (tlo, _) = f.target().support();
    for n in slo.min(tlo)..bound {
        let hs = f.source().cohomology(n).dim;
        if hs != f.target().cohomology(n).dim {
            return false;
        }
        if hs > 0 && rank(&f.induced_map(n)) != hs {
            return false;
        }
    }
    true
}

fn sweep_row(label: &str, first_failure: Option<String>, witnesses: String) -> Check {
    match first_failure {
        None => Check::of(label, true, witnesses),
        Some(detail) => Check::fail(label, detail),
    }
}

/// Long exact sequences of mapping cones on random chain maps, plus the
/// agreement of the two cone conventions (`id - phi/p^i` against
/// `phi - p^i id`) on random Frobenius complexes and on the shipped curve
/// packages.
pub fn cone_les_suite(seed: u64, cases: usize, prime: i64) -> Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Report::new("mapping cone exact sequences");

    let mut positions = 0usize;
    let mut first = None;
    for case in 0..cases {
        let src = gen::random_complex(&mut rng);
        let tgt = gen::random_complex(&mut rng);
        let f = gen::random_chain_map(&mut rng, &src, &tgt);
        let les = les_of_cone(&f);
        positions += les.entries.len();
        if !les.is_exact() && first.is_none() {
            let spot = les
                .entries
                .iter()
                .find(|e| !e.exact)
                .map(|e| e.label.clone())
                .unwrap_or_default();
            first = Some(format!("case {case} (seed {seed}): inexact at {spot}"));
        }
    }
    report.push(sweep_row(
        "cone long exact sequence on random chain maps",
        first,
        format!("{cases} cones, {positions} exactness positions"),
    ));

    let mut twists_checked = 0usize;
    let mut first = None;
    for case in 0..cases {
        let m = gen::random_frob_complex(&mut rng, prime);
        for i in -3..=3 {
            let scaled_id =
                ChainMap::identity(m.complex()).scale(&-Scalar::from_int(prime).pow(i));
            let besser = m.phi().add(&scaled_id)?;
            let a = cone(&m.frobenius_deviation(i)).0.cohomology_dims();
            let b = cone(&besser).0.cohomology_dims();
            twists_checked += 1;
            if a != b && first.is_none() {
                first = Some(format!(
                    "case {case} (seed {seed}), twist {i}: {a:?} against {b:?}"
                ));
            }
        }
    }
    report.push(sweep_row(
        "both cone conventions have the same cohomology",
        first,
        format!("{cases} Frobenius complexes, {twists_checked} twists"),
    ));

    for name in ["elliptic-mult", "nodal-cubic"] {
        let BuiltinExample::Package(pkg) = builtin_example(name)? else {
            continue;
        };
        let mut row = Check::of(
            format!("{name}: package cone conventions agree"),
            true,
            "twists -1..=2",
        );
        for i in -1..=2 {
            let a = syntomic_cone(&pkg, i)?;
            let b = besser_cone_dims(&pkg, i)?;
            if a != b {
                row = Check::fail(
                    format!("{name}: package cone conventions agree"),
                    format!("twist {i}: {a:?} against {b:?}"),
                );
                break;
            }
        }
        report.push(row);
    }

    Ok(report)
}

/// Replaces one node of a random fence diagram by a fattened model connected
/// through the comparison quasi-isomorphism and checks that the homotopy
/// limit keeps its cohomology dimensions.
pub fn holim_invariance_suite(seed: u64, cases: usize) -> Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Report::new("homotopy limit invariance");
    let mut first = None;

    for case in 0..cases {
        let nb = rng.gen_range(1..=2);
        let nt = rng.gen_range(1..=2);
        let bottom: Vec<Complex> = (0..nb).map(|_| gen::random_complex(&mut rng)).collect();
        let top: Vec<Complex> = (0..nt).map(|_| gen::random_complex(&mut rng)).collect();
        let mut arrows = Vec::new();
        for b in 0..nb {
            for _ in 0..rng.gen_range(1..=2) {
                let t = rng.gen_range(0..nt);
                let direction = if rng.gen_bool(0.5) {
                    ArrowDirection::Rightward
                } else {
                    ArrowDirection::Leftward
                };
                arrows.push(FenceArrow {
                    from: b,
                    to: t,
                    direction,
                    map: gen::random_chain_map(&mut rng, &bottom[b], &top[t]),
                });
            }
        }
        let before = FenceDiagram::new(bottom.clone(), top.clone(), arrows.clone())?
            .holim()
            .cohomology_dims();

        let after = if rng.gen_bool(0.5) {
            let b = rng.gen_range(0..nb);
            let (fat, proj) = gen::fatten_with_projection(&mut rng, &bottom[b]);
            let mut bottom = bottom;
            bottom[b] = fat;
            let arrows = arrows
                .iter()
                .map(|a| {
                    Ok(FenceArrow {
                        from: a.from,
                        to: a.to,
                        direction: a.direction,
                        map: if a.from == b { a.map.compose(&proj)? } else { a.map.clone() },
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            FenceDiagram::new(bottom, top, arrows)?.holim().cohomology_dims()
        } else {
            let t = rng.gen_range(0..nt);
            let (fat, inc) = gen::fatten_with_inclusion(&mut rng, &top[t]);
            let mut top = top;
            top[t] = fat;
            let arrows = arrows
                .iter()
                .map(|a| {
                    Ok(FenceArrow {
                        from: a.from,
                        to: a.to,
                        direction: a.direction,
                        map: if a.to == t { inc.compose(&a.map)? } else { a.map.clone() },
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            FenceDiagram::new(bottom, top, arrows)?.holim().cohomology_dims()
        };

        if before != after && first.is_none() {
            first = Some(format!(
                "case {case} (seed {seed}): {before:?} became {after:?}"
            ));
        }
    }

    report.push(sweep_row(
        "holim cohomology survives node replacement",
        first,
        format!("{cases} fence diagrams"),
    ));
    Ok(report)
}

/// The degeneration sequence and the maps-from-the-unit route on a sweep of
/// random Frobenius complexes, over all twists with `|i| <= 3` and every
/// degree in the support window.
pub fn ses_suite(seed: u64, cases: usize, prime: i64) -> Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Report::new("absolute cohomology sequences");
    let unit = FrobComplex::unit(prime);

    let mut triples = 0usize;
    let mut ses_first = None;
    let mut hom_first = None;
    for case in 0..cases {
        let m = gen::random_frob_complex(&mut rng, prime);
        let (lo, hi) = m.complex().support();
        for i in -3..=3 {
            let twisted = m.twist(i);
            for n in lo..=(hi + 1) {
                triples += 1;
                let r = ses_check(&m, i, n);
                if !r.is_ok() && ses_first.is_none() {
                    let row = r.failures().next().map(|c| c.label.clone()).unwrap_or_default();
                    ses_first =
                        Some(format!("case {case} (seed {seed}), twist {i}, degree {n}: {row}"));
                }
                let lhs = hom_drig(&unit, &twisted, n);
                let rhs = abs_rigid(&m, i, n);
                if lhs != rhs && hom_first.is_none() {
                    hom_first = Some(format!(
                        "case {case} (seed {seed}), twist {i}, degree {n}: {lhs} against {rhs}"
                    ));
                }
            }
        }
    }

    report.push(sweep_row(
        "three-slot exactness of the degeneration sequence",
        ses_first,
        format!("{cases} complexes, {triples} (twist, degree) checks"),
    ));
    report.push(sweep_row(
        "maps from the unit compute absolute cohomology",
        hom_first,
        format!("{cases} complexes, {triples} (twist, degree) checks"),
    ));
    Ok(report)
}

/// Godement resolutions on small posets: the augmentation is a stalkwise
/// quasi-isomorphism below the bar margin and the contraction homotopy
/// identities hold as matrices, for constant, skyscraper, and random sheaves.
pub fn godement_suite(seed: u64, n_max: usize) -> Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Report::new("Godement resolutions on finite posets");

    let mut sites = vec![FiniteSite::point(), FiniteSite::chain(2), FiniteSite::chain(3)];
    sites.push(gen::random_site(&mut rng, 4));
    sites.push(gen::random_site(&mut rng, 4));

    let margin = n_max as i64 - 1;
    let mut stalks_checked = 0usize;
    let mut sheaves_checked = 0usize;
    let mut qis_first = None;
    let mut homotopy_first = None;

    for (s, site) in sites.into_iter().enumerate() {
        let sky_at = rng.gen_range(0..site.len());
        let sky_stalk = Complex::concentrated(0, rng.gen_range(1..=2));
        let sheaves = [
            ("constant", PosetSheaf::constant_line(site.clone())),
            ("skyscraper", PosetSheaf::skyscraper(site.clone(), sky_at, &sky_stalk)),
            ("random", gen::random_sheaf(&mut rng, &site)),
        ];
        for (kind, sheaf) in sheaves {
            for p in 0..site.len() {
                let (_, aug) = gdm(&sheaf, &site.min_open(p), n_max)?;
                stalks_checked += 1;
                if !quasi_iso_below(&aug, margin) && qis_first.is_none() {
                    qis_first = Some(format!(
                        "site {s} (seed {seed}), {kind} sheaf, point {p}: \
                         augmentation is not a quasi-isomorphism below degree {margin}"
                    ));
                }
            }
            let homotopy = stalkwise_homotopy_check(&sheaf, n_max)?;
            sheaves_checked += 1;
            if !homotopy.is_ok() && homotopy_first.is_none() {
                let row = homotopy.failures().next().map(|c| c.label.clone()).unwrap_or_default();
                homotopy_first = Some(format!("site {s} (seed {seed}), {kind} sheaf: {row}"));
            }
        }
    }

    report.push(sweep_row(
        "augmentation is a stalkwise quasi-isomorphism below the margin",
        qis_first,
        format!("{stalks_checked} stalks across 5 sites"),
    ));
    report.push(sweep_row(
        "contraction homotopy identities hold as matrices",
        homotopy_first,
        format!("{sheaves_checked} sheaves"),
    ));
    Ok(report)
}

fn eq_up_to_sign(a: &[Scalar], b: &[Scalar], negate: bool) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| if negate { *x == -y } else { x == y })
}

fn basis_element(t: &crate::ts::TSComplex, degree: i64, index: usize) -> TsElement {
    let mut coords = vec![Scalar::zero(); t.complex().dim(degree)];
    coords[index] = Scalar::one();
    TsElement { degree, coords }
}

fn commutativity_row(
    name: &str,
    t: &crate::ts::TSComplex,
    cap: usize,
) -> Check {
    let label = format!("{name}: products are graded-commutative");
    let (lo, hi) = t.complex().support();
    let mut pairs = Vec::new();
    for qx in lo..=hi {
        for qy in qx..=hi {
            if qx + qy > hi {
                continue;
            }
            for jx in 0..t.complex().dim(qx) {
                for jy in 0..t.complex().dim(qy) {
                    pairs.push((qx, jx, qy, jy));
                }
            }
        }
    }
    let step = (pairs.len() / cap).max(1);
    let mut checked = 0usize;
    for (qx, jx, qy, jy) in pairs.into_iter().step_by(step) {
        let x = basis_element(t, qx, jx);
        let y = basis_element(t, qy, jy);
        let (Ok(xy), Ok(yx)) = (ts_product(t, &x, &y), ts_product(t, &y, &x)) else {
            continue;
        };
        let negate = (qx * qy) % 2 != 0;
        if !eq_up_to_sign(&xy.coords, &yx.coords, negate) {
            return Check::fail(
                label,
                format!("basis pair ({qx}, {jx}) x ({qy}, {jy}) breaks the sign rule"),
            );
        }
        checked += 1;
    }
    Check::of(label, true, format!("{checked} basis pairs"))
}

fn multiplicativity_row(
    name: &str,
    src: &CosimplicialDGA,
    t: &crate::ts::TSComplex,
    level: usize,
) -> Result<Check> {
    let label = format!("{name}: integration is multiplicative up to coboundary");
    let tot = simple_total(src, level)?;
    let integral = integration_map(t)?;
    let margin = level as i64 - 1;
    let (lo, hi) = t.complex().support();
    let mut checked = 0usize;
    for qx in lo..=hi {
        for qy in lo..=hi {
            if qx + qy >= margin || qx + qy > hi {
                continue;
            }
            let cx = t.complex().cohomology(qx).cycles;
            let cy = t.complex().cohomology(qy).cycles;
            for jx in 0..cx.dim() {
                for jy in 0..cy.dim() {
                    let x = TsElement { degree: qx, coords: cx.basis().column(jx) };
                    let y = TsElement { degree: qy, coords: cy.basis().column(jy) };
                    let Ok(xy) = ts_product(t, &x, &y) else { continue };
                    let int_xy =
                        unpack_total(&tot, qx + qy, &integral.comp(qx + qy).apply(&xy.coords));
                    let int_x = unpack_total(&tot, qx, &integral.comp(qx).apply(&x.coords));
                    let int_y = unpack_total(&tot, qy, &integral.comp(qy).apply(&y.coords));
                    let aw = alexander_whitney(src, &int_x, &int_y)?;
                    if !is_total_coboundary(src, &int_xy.sub(&aw))? {
                        return Ok(Check::fail(
                            label,
                            format!("class pair ({qx}, {jx}) x ({qy}, {jy}) has a non-exact defect"),
                        ));
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(Check::of(label, true, format!("{checked} class pairs")))
}

/// The truncation scan, the integration quasi-isomorphism, exact graded
/// commutativity, and multiplicativity up to coboundary on the shipped bar
/// covers, together with simplex volume integrals and a seeded Stokes sweep.
pub fn ts_suite(level: usize, degree_bounds: &[usize], seed: u64, form_cases: usize) -> Result<Report> {
    if degree_bounds.is_empty() {
        return Err(Error::invalid("degree bounds", "at least one bound is required"));
    }
    let mut report = Report::new("truncated polynomial-forms checks");

    let bar_over = |site: FiniteSite| -> Result<CosimplicialDGA> {
        bar_dga(&SheafAlgebra::constant_line(site.clone()), &site.whole(), level)
    };
    let named = [
        ("constant cover", bar_over(FiniteSite::point())?),
        ("two-point cover", bar_over(FiniteSite::chain(2))?),
        ("three-point chain", bar_over(FiniteSite::chain(3))?),
    ];
    let top_bound = *degree_bounds.iter().max().unwrap();
    let margin = level as i64 - 1;

    for (name, src) in &named {
        report.absorb(name, stabilization_scan(src, level, degree_bounds)?);
        let t = ts_normalize(src, level, top_bound)?;
        let integral = integration_map(&t)?;
        report.push(Check::of(
            format!("{name}: integration induces isomorphisms below degree {margin}"),
            quasi_iso_below(&integral, margin),
            format!("degree bound {top_bound}"),
        ));
        report.push(commutativity_row(name, &t, 120));
        report.push(multiplicativity_row(name, src, &t, level)?);
    }

    let mut volumes_ok = true;
    for n in 1..=3usize {
        let subset: Vec<usize> = (1..=n).collect();
        let form = PolyForm::monomial(n, &vec![0; n], &subset, Scalar::one())?;
        let expected = Scalar::one() / Scalar::from_int((1..=n as i64).product());
        volumes_ok &= integrate(&form)? == expected;
    }
    report.push(Check::of(
        "volume forms integrate to inverse factorials",
        volumes_ok,
        "dT_1...dT_n for n = 1, 2, 3",
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut first = None;
    for case in 0..form_cases {
        let n = rng.gen_range(1..=3usize);
        let mut form = PolyForm::zero(n, n - 1);
        for _ in 0..rng.gen_range(1..=3) {
            let mut exps = vec![0u32; n];
            for _ in 0..rng.gen_range(0..=3) {
                exps[rng.gen_range(0..n)] += 1;
            }
            let all: Vec<usize> = (1..=n).collect();
            let mut subset: Vec<usize> =
                all.choose_multiple(&mut rng, n - 1).copied().collect();
            subset.sort_unstable();
            let c = Scalar::from_int(rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 });
            form = form.add(&PolyForm::monomial(n, &exps, &subset, c)?)?;
        }
        let lhs = integrate(&exterior_d(&form))?;
        let mut rhs = Scalar::zero();
        for i in 0..=n {
            let face = integrate(&coface_pullback(&form, i))?;
            rhs = rhs + if i % 2 == 0 { face } else { -face };
        }
        if lhs != rhs && first.is_none() {
            first = Some(format!("case {case} (seed {seed}): n = {n}, {lhs} against {rhs}"));
        }
    }
    report.push(sweep_row(
        "Stokes boundary identity on sampled forms",
        first,
        format!("{form_cases} forms with at most 3 coordinates"),
    ));

    Ok(report)
}

/// Looks up a named graded-monoid model.
pub fn ring_axioms_model(name: &str) -> Result<GradedMonoidData> {
    match name {
        "derham-toy" => Ok(derham_toy()),
        "unit" => Ok(unit_model()),
        other => Err(Error::UnknownExample { name: other.to_string() }),
    }
}

fn run_axiom_checks(d: &GradedMonoidData, report: &mut Report) -> Result<()> {
    report.absorb("monoid", check_monoid(d));
    for x in d.site().objects() {
        if d.site().pairing(x).is_some() {
            report.absorb(&format!("stability over {x}"), check_stability(d, x)?);
        }
    }
    let base_paired = d
        .site()
        .pairing(d.site().base())
        .map(|p| p.product == d.site().gm())
        .unwrap_or(false);
    if base_paired {
        report.absorb("orientation", check_orientation(d)?);
    }
    Ok(())
}

struct AxiomFailures {
    monoid: Vec<String>,
    stability: Vec<String>,
    orientation: Vec<String>,
}

fn axiom_failures(d: &GradedMonoidData) -> Result<AxiomFailures> {
    let monoid = check_monoid(d).failures().map(|c| c.label.clone()).collect();
    let mut stability = Vec::new();
    for x in d.site().objects() {
        if d.site().pairing(x).is_some() {
            stability.extend(check_stability(d, x)?.failures().map(|c| c.label.clone()));
        }
    }
    let orientation = check_orientation(d)?.failures().map(|c| c.label.clone()).collect();
    Ok(AxiomFailures { monoid, stability, orientation })
}

/// For each seeded defect, every axiom check is rerun on the perturbed data;
/// the defect must trip its own diagram family and nothing else.
fn detection_controls(d: &GradedMonoidData, seed: u64) -> Result<Report> {
    let mut report = Report::new("seeded defect detection");
    let plan = [
        (Perturbation::Unit, "unit diagram", "unit diagrams"),
        (Perturbation::Mu, "associativity diagram", "associativity diagrams"),
        (Perturbation::Orientation, "", "orientation check"),
    ];
    for (k, (what, prefix, family)) in plan.into_iter().enumerate() {
        let p = perturbed(d, what, seed.wrapping_add(k as u64))?;
        let got = axiom_failures(&p)?;
        let label = format!("a seeded {} defect trips only the {family}", what.name());
        let (caught, strays): (Vec<&String>, Vec<&String>) = match what {
            Perturbation::Orientation => (
                got.orientation.iter().collect(),
                got.monoid.iter().chain(&got.stability).collect(),
            ),
            _ => {
                let (hit, miss): (Vec<&String>, Vec<&String>) =
                    got.monoid.iter().partition(|l| l.starts_with(prefix));
                (hit, miss.into_iter().chain(&got.stability).chain(&got.orientation).collect())
            }
        };
        report.push(if caught.is_empty() {
            Check::fail(label, "the defect went undetected")
        } else if let Some(stray) = strays.first() {
            Check::fail(label, format!("unrelated failure: {stray}"))
        } else {
            let n = caught.len();
            let plural = if n == 1 { "" } else { "s" };
            Check::of(label, true, format!("{n} failing row{plural}, all in the family"))
        });
    }
    Ok(report)
}

/// Monoid, stability, and orientation checks on a named model, together with
/// the seeded defect-detection controls where the model supports them.
pub fn ring_axioms_suite(model: &str, seed: u64) -> Result<Report> {
    let d = ring_axioms_model(model)?;
    let mut report = Report::new(format!("ring axioms on the {model} model"));
    run_axiom_checks(&d, &mut report)?;
    if model == "derham-toy" {
        report.absorb("detection", detection_controls(&d, seed)?);
    }
    Ok(report)
}

/// The axiom checks on a named model after injecting a seeded defect. The
/// resulting report is expected to fail; its rows locate the broken diagram.
pub fn perturbed_ring_axioms(model: &str, what: Perturbation, seed: u64) -> Result<Report> {
    let d = ring_axioms_model(model)?;
    let p = perturbed(&d, what, seed)?;
    let mut report = Report::new(format!(
        "ring axioms on the {model} model with a seeded {} defect",
        what.name()
    ));
    run_axiom_checks(&p, &mut report)?;
    Ok(report)
}

/// Runs every suite. `cases` sets the sweep width of the random suites; the
/// fence and form sweeps use a quarter of it.
pub fn all_suites(seed: u64, cases: usize, prime: i64) -> Result<Report> {
    let mut report = Report::new("full verification sweep");
    report.absorb("cone-les", cone_les_suite(seed, cases, prime)?);
    report.absorb("holim-invariance", holim_invariance_suite(seed, cases.div_ceil(4))?);
    report.absorb("ses", ses_suite(seed, cases, prime)?);
    report.absorb("godement", godement_suite(seed, 5)?);
    report.absorb("ts-quasi-iso", ts_suite(5, &[0, 1, 2], seed, cases.div_ceil(4))?);
    report.absorb("ring-axioms", ring_axioms_suite("derham-toy", seed)?);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cone_les_suite_passes_on_a_small_sweep() {
        let report = cone_les_suite(11, 12, 5).unwrap();
        assert!(report.is_ok(), "{report}");
        assert!(report.checks.len() >= 4);
    }

    #[test]
    fn holim_invariance_suite_passes_on_a_small_sweep() {
        let report = holim_invariance_suite(3, 10).unwrap();
        assert!(report.is_ok(), "{report}");
    }

    #[test]
    fn ses_suite_passes_on_a_small_sweep() {
        let report = ses_suite(7, 10, 5).unwrap();
        assert!(report.is_ok(), "{report}");
    }

    #[test]
    fn godement_suite_passes_with_a_low_margin() {
        let report = godement_suite(5, 4).unwrap();
        assert!(report.is_ok(), "{report}");
    }

    #[test]
    fn ts_suite_passes_at_a_low_level() {
        let report = ts_suite(3, &[0, 1], 2, 10).unwrap();
        assert!(report.is_ok(), "{report}");
        let stokes = report.checks.iter().find(|c| c.label.contains("Stokes")).unwrap();
        assert!(stokes.detail.contains("10 forms"));
    }

    #[test]
    fn ring_axioms_suite_passes_and_detects_all_three_defects() {
        let report = ring_axioms_suite("derham-toy", 41).unwrap();
        assert!(report.is_ok(), "{report}");
        let detection: Vec<_> = report
            .checks
            .iter()
            .filter(|c| c.label.starts_with("detection:"))
            .collect();
        assert_eq!(detection.len(), 3);
    }

    #[test]
    fn ring_axioms_suite_on_the_unit_model_skips_detection() {
        let report = ring_axioms_suite("unit", 0).unwrap();
        assert!(report.is_ok(), "{report}");
        assert!(report.checks.iter().all(|c| !c.label.starts_with("detection:")));
    }

    #[test]
    fn perturbed_ring_axioms_fail() {
        for what in [Perturbation::Unit, Perturbation::Mu, Perturbation::Orientation] {
            let report = perturbed_ring_axioms("derham-toy", what, 19).unwrap();
            assert!(!report.is_ok(), "{what:?} went undetected");
        }
    }

    #[test]
    fn unknown_model_is_rejected() {
        assert!(matches!(
            ring_axioms_model("nope"),
            Err(crate::error::Error::UnknownExample { .. })
        ));
    }
}
