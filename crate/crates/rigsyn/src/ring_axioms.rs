//! Hypothesis checks for graded multiplicative cohomology data on a finite
//! catalogue of test objects: the unit/associativity/commutativity diagrams
//! of a graded monoid, the Gm-suspension isomorphism, and the sign of the
//! inverse map on the degree-one class.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex::{ChainMap, Complex};
use crate::error::Error;
use crate::linalg::{kernel_basis, rank, Subspace};
use crate::matrix::Matrix;
use crate::report::{Check, Report};
use crate::{Result, Scalar};

/// A named map between test objects; pullback data refers to maps by name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteMap {
    pub name: String,
    pub source: String,
    pub target: String,
}

/// Pairs an object X with the object playing X×Gm and names the structure
/// maps between them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductPairing {
    pub object: String,
    /// The object standing in for `object` × Gm.
    pub product: String,
    /// Projection product → object.
    pub projection: String,
    /// Projection product → Gm.
    pub gm_projection: String,
    /// Unit section object → product; its pullback retracts the
    /// projection's.
    pub section: String,
}

/// The catalogue of named test objects and structure maps a data model
/// lives on. The base object and Gm are distinguished; products, sections,
/// and the inverse map of Gm are declared by name so pullback data can be
/// attached to them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TestSiteWire", into = "TestSiteWire")]
pub struct TestSite {
    objects: Vec<String>,
    maps: Vec<SiteMap>,
    base: String,
    gm: String,
    inverse: String,
    pairings: Vec<ProductPairing>,
}

#[derive(Serialize, Deserialize)]
struct TestSiteWire {
    objects: Vec<String>,
    maps: Vec<SiteMap>,
    base: String,
    gm: String,
    inverse: String,
    pairings: Vec<ProductPairing>,
}

impl From<TestSite> for TestSiteWire {
    fn from(s: TestSite) -> Self {
        TestSiteWire {
            objects: s.objects,
            maps: s.maps,
            base: s.base,
            gm: s.gm,
            inverse: s.inverse,
            pairings: s.pairings,
        }
    }
}

impl TryFrom<TestSiteWire> for TestSite {
    type Error = Error;

    fn try_from(w: TestSiteWire) -> Result<Self> {
        TestSite::new(w.objects, w.maps, w.base, w.gm, w.inverse, w.pairings)
    }
}

impl TestSite {
    pub fn new(
        objects: Vec<String>,
        maps: Vec<SiteMap>,
        base: String,
        gm: String,
        inverse: String,
        pairings: Vec<ProductPairing>,
    ) -> Result<Self> {
        if objects.is_empty() {
            return Err(Error::invalid("test site", "no objects"));
        }
        let names: BTreeSet<&String> = objects.iter().collect();
        if names.len() != objects.len() {
            return Err(Error::invalid("test site", "duplicate object names"));
        }
        let exists = |o: &String| names.contains(o);
        if !exists(&base) || !exists(&gm) {
            return Err(Error::invalid(
                "test site",
                "the base object and Gm must be listed",
            ));
        }
        let mut map_names = BTreeSet::new();
        for m in &maps {
            if !map_names.insert(&m.name) {
                return Err(Error::invalid(
                    "test site",
                    format!("duplicate map name {:?}", m.name),
                ));
            }
            if !exists(&m.source) || !exists(&m.target) {
                return Err(Error::invalid(
                    "test site",
                    format!("map {:?} has an unknown endpoint", m.name),
                ));
            }
        }
        let endpoint_check = |name: &String, source: &String, target: &String| -> Result<()> {
            match maps.iter().find(|m| &m.name == name) {
                Some(m) if &m.source == source && &m.target == target => Ok(()),
                Some(m) => Err(Error::invalid(
                    "test site",
                    format!(
                        "map {:?} runs {} → {}, expected {} → {}",
                        name, m.source, m.target, source, target
                    ),
                )),
                None => Err(Error::invalid(
                    "test site",
                    format!("map {name:?} is not declared"),
                )),
            }
        };
        endpoint_check(&inverse, &gm, &gm)?;
        let mut paired = BTreeSet::new();
        for p in &pairings {
            if !paired.insert(&p.object) {
                return Err(Error::invalid(
                    "test site",
                    format!("two pairings for {:?}", p.object),
                ));
            }
            if !exists(&p.object) || !exists(&p.product) {
                return Err(Error::invalid(
                    "test site",
                    format!("pairing of {:?} names an unknown object", p.object),
                ));
            }
            endpoint_check(&p.projection, &p.product, &p.object)?;
            endpoint_check(&p.gm_projection, &p.product, &gm)?;
            endpoint_check(&p.section, &p.object, &p.product)?;
        }
        Ok(TestSite { objects, maps, base, gm, inverse, pairings })
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn maps(&self) -> &[SiteMap] {
        &self.maps
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    pub fn gm(&self) -> &str {
        &self.gm
    }

    /// Name of the inverse map Gm → Gm.
    pub fn inverse(&self) -> &str {
        &self.inverse
    }

    pub fn pairing(&self, object: &str) -> Option<&ProductPairing> {
        self.pairings.iter().find(|p| p.object == object)
    }
}

/// Degreewise product matrices E_i^a ⊗ E_j^b → E_{i+j}^{a+b}, keyed by the
/// twist pair and then the degree pair. Absent entries are zero.
pub type MuTable = BTreeMap<(usize, usize), BTreeMap<(i64, i64), Matrix>>;

/// A graded monoid of complexes over a test site: one complex per object
/// and twist, unit cocycles, degreewise products, pullbacks along every
/// declared map, and a chosen degree-one cocycle over Gm in twist one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GradedMonoidWire", into = "GradedMonoidWire")]
pub struct GradedMonoidData {
    site: TestSite,
    e: BTreeMap<String, Vec<Complex>>,
    eta: BTreeMap<String, Vec<Scalar>>,
    mu: BTreeMap<String, MuTable>,
    pullbacks: BTreeMap<String, Vec<ChainMap>>,
    c: Vec<Scalar>,
}

#[derive(Serialize, Deserialize)]
struct GradedMonoidWire {
    site: TestSite,
    e: BTreeMap<String, Vec<Complex>>,
    eta: BTreeMap<String, Vec<Scalar>>,
    /// Product entries flattened to (i, j, a, b, matrix) per object.
    mu: BTreeMap<String, Vec<(usize, usize, i64, i64, Matrix)>>,
    pullbacks: BTreeMap<String, Vec<ChainMap>>,
    c: Vec<Scalar>,
}

impl From<GradedMonoidData> for GradedMonoidWire {
    fn from(d: GradedMonoidData) -> Self {
        let mu = d
            .mu
            .into_iter()
            .map(|(x, table)| {
                let flat = table
                    .into_iter()
                    .flat_map(|((i, j), comps)| {
                        comps.into_iter().map(move |((a, b), m)| (i, j, a, b, m))
                    })
                    .collect();
                (x, flat)
            })
            .collect();
        GradedMonoidWire {
            site: d.site,
            e: d.e,
            eta: d.eta,
            mu,
            pullbacks: d.pullbacks,
            c: d.c,
        }
    }
}

impl TryFrom<GradedMonoidWire> for GradedMonoidData {
    type Error = Error;

    fn try_from(w: GradedMonoidWire) -> Result<Self> {
        let mut mu: BTreeMap<String, MuTable> = BTreeMap::new();
        for (x, flat) in w.mu {
            let table: &mut MuTable = mu.entry(x).or_default();
            for (i, j, a, b, m) in flat {
                if table.entry((i, j)).or_default().insert((a, b), m).is_some() {
                    return Err(Error::invalid(
                        "graded monoid",
                        format!("duplicate product entry ({i}, {j}) at degrees ({a}, {b})"),
                    ));
                }
            }
        }
        GradedMonoidData::new(w.site, w.e, w.eta, mu, w.pullbacks, w.c)
    }
}

impl GradedMonoidData {
    pub fn new(
        site: TestSite,
        e: BTreeMap<String, Vec<Complex>>,
        eta: BTreeMap<String, Vec<Scalar>>,
        mu: BTreeMap<String, MuTable>,
        pullbacks: BTreeMap<String, Vec<ChainMap>>,
        c: Vec<Scalar>,
    ) -> Result<Self> {
        let twists = e.values().next().map_or(0, Vec::len);
        if twists < 2 {
            return Err(Error::MissingStructure {
                detail: "at least twists 0 and 1 are required".into(),
            });
        }
        for x in site.objects() {
            match e.get(x) {
                Some(v) if v.len() == twists => {}
                _ => {
                    return Err(Error::invalid(
                        "graded monoid",
                        format!("{x:?} needs one complex per twist"),
                    ))
                }
            }
        }
        if e.len() != site.objects().len() || eta.len() != site.objects().len() {
            return Err(Error::invalid(
                "graded monoid",
                "complexes and units must be keyed by the site's objects",
            ));
        }
        for x in site.objects() {
            let e0 = &e[x][0];
            let u = eta
                .get(x)
                .ok_or_else(|| Error::invalid("graded monoid", format!("{x:?} has no unit")))?;
            if u.len() != e0.dim(0) {
                return Err(Error::invalid(
                    "graded monoid",
                    format!("unit over {x:?} has the wrong length"),
                ));
            }
            if !e0.d(0).apply(u).iter().all(Scalar::is_zero) {
                return Err(Error::invalid(
                    "graded monoid",
                    format!("unit over {x:?} is not a cocycle"),
                ));
            }
        }
        for (x, table) in &mu {
            if !site.objects().iter().any(|o| o == x) {
                return Err(Error::invalid(
                    "graded monoid",
                    format!("products over unknown object {x:?}"),
                ));
            }
            for (&(i, j), comps) in table {
                if i + j >= twists {
                    return Err(Error::invalid(
                        "graded monoid",
                        format!("product ({i}, {j}) over {x:?} lands past the twist range"),
                    ));
                }
                for (&(a, b), m) in comps {
                    let (rows, cols) =
                        (e[x][i + j].dim(a + b), e[x][i].dim(a) * e[x][j].dim(b));
                    if m.rows() != rows || m.cols() != cols {
                        return Err(Error::invalid(
                            "graded monoid",
                            format!("product ({i}, {j}) over {x:?} has degree ({a}, {b}) of the wrong shape"),
                        ));
                    }
                }
            }
        }
        let data = GradedMonoidData { site, e, eta, mu, pullbacks, c };
        for x in data.site.objects() {
            for i in 0..twists {
                for j in 0..twists - i {
                    if !data.mu_is_chain_map(x, i, j) {
                        return Err(Error::invalid(
                            "graded monoid",
                            format!("product ({i}, {j}) over {x:?} is not a chain map"),
                        ));
                    }
                }
            }
        }
        for m in data.site.maps() {
            let per_twist = data.pullbacks.get(&m.name).ok_or_else(|| {
                Error::MissingStructure {
                    detail: format!("pullbacks along {:?}", m.name),
                }
            })?;
            if per_twist.len() != twists {
                return Err(Error::invalid(
                    "graded monoid",
                    format!("pullbacks along {:?} need one map per twist", m.name),
                ));
            }
            for (i, f) in per_twist.iter().enumerate() {
                if f.source() != &data.e[&m.target][i] || f.target() != &data.e[&m.source][i] {
                    return Err(Error::invalid(
                        "graded monoid",
                        format!("pullback along {:?} at twist {i} has the wrong endpoints", m.name),
                    ));
                }
            }
        }
        if data.pullbacks.len() != data.site.maps().len() {
            return Err(Error::invalid(
                "graded monoid",
                "pullbacks must be keyed by the declared maps",
            ));
        }
        for p in &data.site.pairings.clone() {
            for i in 0..twists {
                let proj = data.pullback(&p.projection, i);
                let sect = data.pullback(&p.section, i);
                let ex = &data.e[&p.object][i];
                let (lo, hi) = ex.support();
                for n in lo..=hi {
                    if sect.comp(n).mul(&proj.comp(n)) != Matrix::identity(ex.dim(n)) {
                        return Err(Error::invalid(
                            "graded monoid",
                            format!(
                                "section of {:?} does not retract the projection at twist {i} degree {n}",
                                p.object
                            ),
                        ));
                    }
                }
            }
        }
        let egm = &data.e[data.site.gm()][1];
        if data.c.len() != egm.dim(1) {
            return Err(Error::invalid(
                "graded monoid",
                "the degree-one class has the wrong length",
            ));
        }
        if !egm.d(1).apply(&data.c).iter().all(Scalar::is_zero) {
            return Err(Error::invalid(
                "graded monoid",
                "the degree-one class is not a cocycle",
            ));
        }
        Ok(data)
    }

    pub fn site(&self) -> &TestSite {
        &self.site
    }

    /// Number of twists; twist indices run `0..twists()`.
    pub fn twists(&self) -> usize {
        self.e.values().next().map_or(0, Vec::len)
    }

    pub fn complex(&self, object: &str, twist: usize) -> &Complex {
        &self.e[object][twist]
    }

    pub fn unit(&self, object: &str) -> &[Scalar] {
        &self.eta[object]
    }

    /// The chosen degree-one cocycle of twist one over Gm, used both to
    /// suspend classes and to test the inverse map's sign.
    pub fn suspension_cocycle(&self) -> &[Scalar] {
        &self.c
    }

    /// Product component E_i^a ⊗ E_j^b → E_{i+j}^{a+b}; zero when absent.
    pub fn mu_comp(&self, object: &str, i: usize, j: usize, a: i64, b: i64) -> Matrix {
        self.mu
            .get(object)
            .and_then(|t| t.get(&(i, j)))
            .and_then(|c| c.get(&(a, b)))
            .cloned()
            .unwrap_or_else(|| {
                Matrix::zero(
                    self.e[object][i + j].dim(a + b),
                    self.e[object][i].dim(a) * self.e[object][j].dim(b),
                )
            })
    }

    pub fn pullback(&self, map: &str, twist: usize) -> &ChainMap {
        &self.pullbacks[map][twist]
    }

    fn mu_is_chain_map(&self, x: &str, i: usize, j: usize) -> bool {
        let (ei, ej, et) = (&self.e[x][i], &self.e[x][j], &self.e[x][i + j]);
        let (alo, ahi) = ei.support();
        let (blo, bhi) = ej.support();
        for a in alo..=ahi {
            for b in blo..=bhi {
                let lhs = et.d(a + b).mul(&self.mu_comp(x, i, j, a, b));
                let first = self
                    .mu_comp(x, i, j, a + 1, b)
                    .mul(&ei.d(a).kronecker(&Matrix::identity(ej.dim(b))));
                let second = self
                    .mu_comp(x, i, j, a, b + 1)
                    .mul(&Matrix::identity(ei.dim(a)).kronecker(&ej.d(b)));
                let second = if a % 2 == 0 { second } else { second.neg() };
                if lhs != first.add(&second) {
                    return false;
                }
            }
        }
        true
    }
}

/// Verifies the unit, commutativity, and associativity diagrams of the
/// graded products over every object, as exact matrix identities. One check
/// per diagram instance; degrees are quantified inside each check.
pub fn check_monoid(d: &GradedMonoidData) -> Report {
    let mut report = Report::new("graded monoid diagrams");
    let tw = d.twists();
    for x in d.site().objects() {
        let unit_col = Matrix::from_columns(d.complex(x, 0).dim(0), &[d.unit(x).to_vec()]);
        for i in 0..tw {
            let ex = d.complex(x, i);
            let (lo, hi) = ex.support();
            let mut bad = None;
            for n in lo..=hi {
                let id = Matrix::identity(ex.dim(n));
                if d.mu_comp(x, 0, i, 0, n).mul(&unit_col.kronecker(&id)) != id {
                    bad = Some((n, "left"));
                    break;
                }
                if d.mu_comp(x, i, 0, n, 0).mul(&id.kronecker(&unit_col)) != id {
                    bad = Some((n, "right"));
                    break;
                }
            }
            report.push(match bad {
                None => Check::pass(format!("unit diagram at {x} twist {i}")),
                Some((n, side)) => Check::fail(
                    format!("unit diagram at {x} twist {i}"),
                    format!("{side} unit fails in degree {n}"),
                ),
            });
        }
        for i in 0..tw {
            for j in i..tw {
                if i + j >= tw {
                    break;
                }
                let (ei, ej) = (d.complex(x, i), d.complex(x, j));
                let (alo, ahi) = ei.support();
                let (blo, bhi) = ej.support();
                let mut bad = None;
                'comm: for a in alo..=ahi {
                    for b in blo..=bhi {
                        let gamma = signed_swap(ei.dim(a), ej.dim(b), (a * b) % 2 != 0);
                        if d.mu_comp(x, i, j, a, b) != d.mu_comp(x, j, i, b, a).mul(&gamma) {
                            bad = Some((a, b));
                            break 'comm;
                        }
                    }
                }
                report.push(match bad {
                    None => Check::pass(format!("commutativity diagram at {x} twists ({i}, {j})")),
                    Some((a, b)) => Check::fail(
                        format!("commutativity diagram at {x} twists ({i}, {j})"),
                        format!("fails in degrees ({a}, {b})"),
                    ),
                });
            }
        }
        for i in 0..tw {
            for j in 0..tw - i {
                for k in 0..tw - i - j {
                    let (ei, ej, ek) = (d.complex(x, i), d.complex(x, j), d.complex(x, k));
                    let (alo, ahi) = ei.support();
                    let (blo, bhi) = ej.support();
                    let (elo, ehi) = ek.support();
                    let mut bad = None;
                    'assoc: for a in alo..=ahi {
                        for b in blo..=bhi {
                            for n in elo..=ehi {
                                let lhs = d.mu_comp(x, i + j, k, a + b, n).mul(
                                    &d.mu_comp(x, i, j, a, b)
                                        .kronecker(&Matrix::identity(ek.dim(n))),
                                );
                                let rhs = d.mu_comp(x, i, j + k, a, b + n).mul(
                                    &Matrix::identity(ei.dim(a))
                                        .kronecker(&d.mu_comp(x, j, k, b, n)),
                                );
                                if lhs != rhs {
                                    bad = Some((a, b, n));
                                    break 'assoc;
                                }
                            }
                        }
                    }
                    report.push(match bad {
                        None => Check::pass(format!(
                            "associativity diagram at {x} twists ({i}, {j}, {k})"
                        )),
                        Some((a, b, n)) => Check::fail(
                            format!("associativity diagram at {x} twists ({i}, {j}, {k})"),
                            format!("fails in degrees ({a}, {b}, {n})"),
                        ),
                    });
                }
            }
        }
    }
    report
}

/// Verifies that suspension by the chosen degree-one class is an
/// isomorphism over `x`: for each twist i and degree n, the class map
/// H^n(x, i) → H^{n+1}(x×Gm, i+1) / im(projection pullback) sending a class
/// to the product of its pullback with the Gm class must be bijective. Also
/// reports the split sequence 0 → H^n(x) → H^n(x×Gm) → reduced → 0 at each
/// spot.
pub fn check_stability(d: &GradedMonoidData, x: &str) -> Result<Report> {
    if !d.site().objects().iter().any(|o| o == x) {
        return Err(Error::MissingStructure { detail: format!("object {x:?}") });
    }
    let pairing = d
        .site()
        .pairing(x)
        .ok_or_else(|| Error::MissingStructure {
            detail: format!("a Gm-product pairing for {x:?}"),
        })?
        .clone();
    let p = pairing.product.as_str();
    let qc = d
        .pullback(&pairing.gm_projection, 1)
        .comp(1)
        .apply(d.suspension_cocycle());
    let mut report = Report::new(format!("Gm-suspension over {x}"));
    for i in 0..d.twists() - 1 {
        let ex = d.complex(x, i);
        let ep = d.complex(p, i);
        let et = d.complex(p, i + 1);
        let (xlo, xhi) = ex.support();
        let (plo, phi) = ep.support();
        let (tlo, thi) = et.support();
        let lo = xlo.min(plo).min(tlo - 1);
        let hi = xhi.max(phi).max(thi - 1);
        for n in lo..=hi {
            let hx = ex.cohomology(n);
            let hp = ep.cohomology(n);
            let im_same = d.pullback(&pairing.projection, i).induced_map(n);
            let reduced_same = hp.dim - rank(&im_same);
            report.push(Check::of(
                format!("split sequence at twist {i} degree {n}"),
                rank(&im_same) == hx.dim,
                format!(
                    "product {} = object {} + reduced {}",
                    hp.dim, hx.dim, reduced_same
                ),
            ));

            let ht = et.cohomology(n + 1);
            let im = d.pullback(&pairing.projection, i + 1).induced_map(n + 1);
            let pull = d.pullback(&pairing.projection, i).comp(n);
            let mut images = Vec::new();
            for t in 0..hx.cycles.dim() {
                let px = pull.apply(&hx.cycles.basis().column(t));
                let y = d
                    .mu_comp(p, i, 1, n, 1)
                    .apply(&kron_vec(&px, &qc));
                let class = ht
                    .class_of(&y)
                    .expect("products of cocycles against a cocycle are cocycles");
                images.push(class);
            }
            let psi = Matrix::from_columns(ht.dim, &images);
            let joint = rank(&im.hstack(&psi));
            let injective = joint - rank(&im) == hx.dim;
            let surjective = joint == ht.dim;
            let reduced = ht.dim - rank(&im);
            report.push(Check::of(
                format!("suspension map at twist {i} degree {n}"),
                injective && surjective,
                if injective && surjective {
                    format!("dimension {} onto reduced dimension {}", hx.dim, reduced)
                } else {
                    format!(
                        "dimension {} against reduced dimension {}: injective {}, surjective {}",
                        hx.dim, reduced, injective, surjective
                    )
                },
            ));
        }
    }
    Ok(report)
}

/// Verifies that the inverse map of Gm negates the reduced degree-one
/// class: with classes over the base quotiented out, pulling the chosen
/// cocycle back along the inverse must give its own negative.
pub fn check_orientation(d: &GradedMonoidData) -> Result<Report> {
    let site = d.site();
    let pairing = site
        .pairing(site.base())
        .ok_or_else(|| Error::MissingStructure {
            detail: "a Gm-product pairing for the base object".into(),
        })?
        .clone();
    if pairing.product != site.gm() {
        return Err(Error::MissingStructure {
            detail: "the base object's pairing must have product Gm".into(),
        });
    }
    let egm = d.complex(site.gm(), 1);
    let eb = d.complex(site.base(), 1);
    let c = d.suspension_cocycle();

    // Coboundaries plus pulled-back base cocycles span the part of degree
    // one that the reduced class ignores.
    let mut cols: Vec<Vec<Scalar>> = Vec::new();
    let boundary = egm.d(0);
    for t in 0..boundary.cols() {
        cols.push(boundary.column(t));
    }
    let base_pull = d.pullback(&pairing.projection, 1).comp(1);
    for z in kernel_basis(&eb.d(1)) {
        cols.push(base_pull.apply(&z));
    }
    let sub = Subspace::from_spanning(&Matrix::from_columns(egm.dim(1), &cols));

    let mut report = Report::new("inverse-map orientation");
    let h1 = egm.cohomology(1);
    let reduced = h1.dim - rank(&d.pullback(&pairing.projection, 1).induced_map(1));
    report.push(Check::of(
        "reduced class of the degree-one cocycle",
        true,
        if sub.contains(c) {
            format!("vanishes; the reduced group has dimension {reduced}")
        } else {
            format!("is nonzero in the reduced group of dimension {reduced}")
        },
    ));

    let pulled = d.pullback(site.inverse(), 1).comp(1).apply(c);
    let sum: Vec<Scalar> = pulled.iter().zip(c).map(|(a, b)| a + b).collect();
    report.push(Check::of(
        "the inverse map negates the reduced class",
        sub.contains(&sum),
        "the pullback plus the class must be a coboundary modulo base classes",
    ));
    Ok(report)
}

/// A single deliberate defect for negative-control runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Perturbation {
    /// Negate the unit cocycle over one object.
    Unit,
    /// Negate the twist (1, 1) product over one object.
    Mu,
    /// Replace the inverse pullback on twist one by the identity.
    Orientation,
}

impl FromStr for Perturbation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(Perturbation::Unit),
            "mu" => Ok(Perturbation::Mu),
            "orientation" => Ok(Perturbation::Orientation),
            _ => Err(Error::invalid(
                "perturbation",
                format!("unknown name {s:?}; expected unit, mu, or orientation"),
            )),
        }
    }
}

impl Perturbation {
    pub fn name(self) -> &'static str {
        match self {
            Perturbation::Unit => "unit",
            Perturbation::Mu => "mu",
            Perturbation::Orientation => "orientation",
        }
    }
}

/// Rebuilds `base` with one seeded defect. The seed picks the afflicted
/// object when several are eligible; the result revalidates, so it is a
/// well-formed data model that fails exactly one family of diagrams.
pub fn perturbed(
    base: &GradedMonoidData,
    what: Perturbation,
    seed: u64,
) -> Result<GradedMonoidData> {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut eta = base.eta.clone();
    let mut mu = base.mu.clone();
    let mut pullbacks = base.pullbacks.clone();
    match what {
        Perturbation::Unit => {
            let eligible: Vec<&String> = base
                .site
                .objects()
                .iter()
                .filter(|x| base.eta[*x].iter().any(|v| !v.is_zero()))
                .collect();
            if eligible.is_empty() {
                return Err(Error::MissingStructure {
                    detail: "no object carries a nonzero unit".into(),
                });
            }
            let x = eligible[rng.gen_range(0..eligible.len())].clone();
            for v in eta.get_mut(&x).unwrap() {
                *v = -&*v;
            }
        }
        Perturbation::Mu => {
            let eligible: Vec<&String> = base
                .site
                .objects()
                .iter()
                .filter(|x| {
                    base.mu
                        .get(*x)
                        .and_then(|t| t.get(&(1, 1)))
                        .is_some_and(|c| c.values().any(|m| !m.is_zero_matrix()))
                })
                .collect();
            if eligible.is_empty() {
                return Err(Error::MissingStructure {
                    detail: "no object carries a nonzero twist (1, 1) product".into(),
                });
            }
            let x = eligible[rng.gen_range(0..eligible.len())].clone();
            let table = mu.get_mut(&x).unwrap().get_mut(&(1, 1)).unwrap();
            for m in table.values_mut() {
                *m = m.neg();
            }
        }
        Perturbation::Orientation => {
            let gm = base.site.gm().to_string();
            let name = base.site.inverse().to_string();
            pullbacks.get_mut(&name).unwrap()[1] = ChainMap::identity(&base.e[&gm][1]);
        }
    }
    GradedMonoidData::new(base.site.clone(), base.e.clone(), eta, mu, pullbacks, base.c.clone())
}

/// The smallest passing model: base and Gm both carry the ground line in
/// degree zero at every twist, all products are the identity. It has no
/// product pairings, so only the monoid diagrams apply.
pub fn unit_model() -> GradedMonoidData {
    let line = Complex::new([(0i64, 1usize)].into_iter().collect(), BTreeMap::new()).unwrap();
    let objects = vec!["S".to_string(), "Gm".to_string()];
    let maps = vec![SiteMap {
        name: "u".into(),
        source: "Gm".into(),
        target: "Gm".into(),
    }];
    let site = TestSite::new(objects, maps, "S".into(), "Gm".into(), "u".into(), vec![]).unwrap();
    let twists = 3;
    let mut table: MuTable = BTreeMap::new();
    for i in 0..twists {
        for j in 0..twists - i {
            table.insert((i, j), [((0i64, 0i64), Matrix::identity(1))].into_iter().collect());
        }
    }
    let e: BTreeMap<String, Vec<Complex>> = ["S", "Gm"]
        .into_iter()
        .map(|x| (x.to_string(), vec![line.clone(); twists]))
        .collect();
    let eta = ["S", "Gm"]
        .into_iter()
        .map(|x| (x.to_string(), vec![Scalar::one()]))
        .collect();
    let mu = ["S", "Gm"].into_iter().map(|x| (x.to_string(), table.clone())).collect();
    let pullbacks = [("u".to_string(), vec![ChainMap::identity(&line); twists])]
        .into_iter()
        .collect();
    GradedMonoidData::new(site, e, eta, mu, pullbacks, vec![]).unwrap()
}

/// Exterior-algebra model of the multiplicative group: the base carries the
/// ground line, Gm adds an odd generator in degree one (the logarithmic
/// class of its coordinate), and the product object two such generators.
/// All twists coincide; the chosen degree-one class is the generator, and
/// the inverse map negates it.
pub fn derham_toy() -> GradedMonoidData {
    let twists = 5usize;
    let zero_d = BTreeMap::new;
    let e_s = Complex::new([(0i64, 1usize)].into_iter().collect(), zero_d()).unwrap();
    let e_gm = Complex::new([(0i64, 1usize), (1, 1)].into_iter().collect(), zero_d()).unwrap();
    let e_gm2 =
        Complex::new([(0i64, 1usize), (1, 2), (2, 1)].into_iter().collect(), zero_d()).unwrap();

    let objects = vec!["S".to_string(), "Gm".to_string(), "Gm×Gm".to_string()];
    let maps = vec![
        SiteMap { name: "p_s".into(), source: "Gm".into(), target: "S".into() },
        SiteMap { name: "id_gm".into(), source: "Gm".into(), target: "Gm".into() },
        SiteMap { name: "s1_s".into(), source: "S".into(), target: "Gm".into() },
        SiteMap { name: "p_gm".into(), source: "Gm×Gm".into(), target: "Gm".into() },
        SiteMap { name: "q_gm".into(), source: "Gm×Gm".into(), target: "Gm".into() },
        SiteMap { name: "s1_gm".into(), source: "Gm".into(), target: "Gm×Gm".into() },
        SiteMap { name: "u".into(), source: "Gm".into(), target: "Gm".into() },
    ];
    let pairings = vec![
        ProductPairing {
            object: "S".into(),
            product: "Gm".into(),
            projection: "p_s".into(),
            gm_projection: "id_gm".into(),
            section: "s1_s".into(),
        },
        ProductPairing {
            object: "Gm".into(),
            product: "Gm×Gm".into(),
            projection: "p_gm".into(),
            gm_projection: "q_gm".into(),
            section: "s1_gm".into(),
        },
    ];
    let site =
        TestSite::new(objects, maps, "S".into(), "Gm".into(), "u".into(), pairings).unwrap();

    // Exterior products. Over Gm×Gm the degree-one basis is (a, b) with
    // a the first factor's generator; a·b spans degree two and b·a = −a·b.
    let one = || Matrix::identity(1);
    let table_s: BTreeMap<(i64, i64), Matrix> = [((0i64, 0i64), one())].into_iter().collect();
    let table_gm: BTreeMap<(i64, i64), Matrix> =
        [((0i64, 0i64), one()), ((0, 1), one()), ((1, 0), one())].into_iter().collect();
    let mut wedge = Matrix::zero(1, 4);
    wedge.set(0, 1, Scalar::one());
    wedge.set(0, 2, -Scalar::one());
    let table_gm2: BTreeMap<(i64, i64), Matrix> = [
        ((0i64, 0i64), one()),
        ((0, 1), Matrix::identity(2)),
        ((1, 0), Matrix::identity(2)),
        ((0, 2), one()),
        ((2, 0), one()),
        ((1, 1), wedge),
    ]
    .into_iter()
    .collect();
    let spread = |t: BTreeMap<(i64, i64), Matrix>| {
        let mut out: MuTable = BTreeMap::new();
        for i in 0..twists {
            for j in 0..twists - i {
                out.insert((i, j), t.clone());
            }
        }
        out
    };

    let e: BTreeMap<String, Vec<Complex>> = [
        ("S".to_string(), vec![e_s.clone(); twists]),
        ("Gm".to_string(), vec![e_gm.clone(); twists]),
        ("Gm×Gm".to_string(), vec![e_gm2.clone(); twists]),
    ]
    .into_iter()
    .collect();
    let eta: BTreeMap<String, Vec<Scalar>> = ["S", "Gm", "Gm×Gm"]
        .into_iter()
        .map(|x| (x.to_string(), vec![Scalar::one()]))
        .collect();
    let mu: BTreeMap<String, MuTable> = [
        ("S".to_string(), spread(table_s)),
        ("Gm".to_string(), spread(table_gm)),
        ("Gm×Gm".to_string(), spread(table_gm2)),
    ]
    .into_iter()
    .collect();

    let map = |source: &Complex, target: &Complex, comps: Vec<(i64, Matrix)>| {
        ChainMap::new(source.clone(), target.clone(), comps.into_iter().collect()).unwrap()
    };
    let col = |entries: &[i64]| {
        Matrix::from_columns(
            entries.len(),
            &[entries.iter().map(|&v| Scalar::from_int(v)).collect::<Vec<_>>()],
        )
    };
    let row = |entries: &[i64]| {
        let mut m = Matrix::zero(1, entries.len());
        for (t, &v) in entries.iter().enumerate() {
            m.set(0, t, Scalar::from_int(v));
        }
        m
    };
    let per_twist = |f: ChainMap| vec![f; twists];
    let pullbacks: BTreeMap<String, Vec<ChainMap>> = [
        ("p_s".to_string(), per_twist(map(&e_s, &e_gm, vec![(0, one())]))),
        ("id_gm".to_string(), per_twist(ChainMap::identity(&e_gm))),
        ("s1_s".to_string(), per_twist(map(&e_gm, &e_s, vec![(0, one())]))),
        (
            "p_gm".to_string(),
            per_twist(map(&e_gm, &e_gm2, vec![(0, one()), (1, col(&[1, 0]))])),
        ),
        (
            "q_gm".to_string(),
            per_twist(map(&e_gm, &e_gm2, vec![(0, one()), (1, col(&[0, 1]))])),
        ),
        (
            "s1_gm".to_string(),
            per_twist(map(&e_gm2, &e_gm, vec![(0, one()), (1, row(&[1, 0]))])),
        ),
        (
            "u".to_string(),
            per_twist(map(&e_gm, &e_gm, vec![(0, one()), (1, row(&[-1]))])),
        ),
    ]
    .into_iter()
    .collect();

    GradedMonoidData::new(site, e, eta, mu, pullbacks, vec![Scalar::one()]).unwrap()
}

fn kron_vec(x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
    let mut out = Vec::with_capacity(x.len() * y.len());
    for a in x {
        for b in y {
            out.push(a * b);
        }
    }
    out
}

/// V_a ⊗ V_b → V_b ⊗ V_a, negated when both factors sit in odd degree.
fn signed_swap(dim_a: usize, dim_b: usize, negate: bool) -> Matrix {
    let mut m = Matrix::zero(dim_a * dim_b, dim_a * dim_b);
    let sign = if negate { -Scalar::one() } else { Scalar::one() };
    for i in 0..dim_a {
        for j in 0..dim_b {
            m.set(j * dim_a + i, i * dim_b + j, sign.clone());
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn failing_labels(r: &Report) -> Vec<String> {
        r.failures().map(|c| c.label.clone()).collect()
    }

    #[test]
    fn unit_model_passes_the_monoid_diagrams() {
        let d = unit_model();
        let report = check_monoid(&d);
        assert!(report.is_ok(), "{report}");
        assert!(matches!(
            check_stability(&d, "S"),
            Err(Error::MissingStructure { .. })
        ));
        assert!(matches!(
            check_orientation(&d),
            Err(Error::MissingStructure { .. })
        ));
    }

    #[test]
    fn derham_model_passes_all_three_checks() {
        let d = derham_toy();
        let monoid = check_monoid(&d);
        assert!(monoid.is_ok(), "{monoid}");
        for x in ["S", "Gm"] {
            let stability = check_stability(&d, x).unwrap();
            assert!(stability.is_ok(), "{stability}");
        }
        let orientation = check_orientation(&d).unwrap();
        assert!(orientation.is_ok(), "{orientation}");
        assert!(orientation.checks[0].detail.contains("is nonzero"));
    }

    #[test]
    fn suspension_rows_cover_the_expected_window() {
        let d = derham_toy();
        let report = check_stability(&d, "Gm").unwrap();
        let row = report
            .checks
            .iter()
            .find(|c| c.label == "suspension map at twist 0 degree 1")
            .unwrap();
        assert!(row.ok);
        assert_eq!(row.detail, "dimension 1 onto reduced dimension 1");
    }

    #[test]
    fn zero_class_breaks_suspension_where_cohomology_lives() {
        let mut d = derham_toy();
        d.c = vec![Scalar::zero()];
        let report = check_stability(&d, "S").unwrap();
        assert!(!report.is_ok());
        for c in report.failures() {
            assert!(c.label.starts_with("suspension map"), "{}", c.label);
        }
        // The orientation identity is vacuous for the zero class.
        let orientation = check_orientation(&d).unwrap();
        assert!(orientation.is_ok(), "{orientation}");
        assert!(orientation.checks[0].detail.contains("vanishes"));
    }

    #[test]
    fn unit_perturbation_is_caught_by_the_unit_rows_alone() {
        let d = derham_toy();
        for seed in [0u64, 11, 97] {
            let p = perturbed(&d, Perturbation::Unit, seed).unwrap();
            let monoid = check_monoid(&p);
            assert!(!monoid.is_ok());
            for label in failing_labels(&monoid) {
                assert!(label.starts_with("unit diagram"), "{label}");
            }
            assert!(check_stability(&p, "S").unwrap().is_ok());
            assert!(check_stability(&p, "Gm").unwrap().is_ok());
            assert!(check_orientation(&p).unwrap().is_ok());
        }
    }

    #[test]
    fn product_sign_perturbation_is_caught_by_associativity_alone() {
        let d = derham_toy();
        for seed in [0u64, 1, 2, 3] {
            let p = perturbed(&d, Perturbation::Mu, seed).unwrap();
            let monoid = check_monoid(&p);
            assert!(!monoid.is_ok());
            for label in failing_labels(&monoid) {
                assert!(label.starts_with("associativity diagram"), "{label}");
            }
            assert!(check_stability(&p, "S").unwrap().is_ok());
            assert!(check_stability(&p, "Gm").unwrap().is_ok());
            assert!(check_orientation(&p).unwrap().is_ok());
        }
    }

    #[test]
    fn inverse_perturbation_is_caught_by_orientation_alone() {
        let d = derham_toy();
        let p = perturbed(&d, Perturbation::Orientation, 5).unwrap();
        assert!(check_monoid(&p).is_ok());
        assert!(check_stability(&p, "S").unwrap().is_ok());
        assert!(check_stability(&p, "Gm").unwrap().is_ok());
        let orientation = check_orientation(&p).unwrap();
        assert!(!orientation.is_ok());
        let bad: Vec<_> = failing_labels(&orientation);
        assert_eq!(bad, vec!["the inverse map negates the reduced class".to_string()]);
    }

    #[test]
    fn perturbation_names_round_trip() {
        for p in [Perturbation::Unit, Perturbation::Mu, Perturbation::Orientation] {
            assert_eq!(p.name().parse::<Perturbation>().unwrap(), p);
        }
        assert!("associativity".parse::<Perturbation>().is_err());
    }

    #[test]
    fn site_validation_rejects_broken_references() {
        let objects = vec!["S".to_string(), "Gm".to_string()];
        let maps = vec![SiteMap {
            name: "u".into(),
            source: "Gm".into(),
            target: "Gm".into(),
        }];
        assert!(TestSite::new(
            objects.clone(),
            maps.clone(),
            "S".into(),
            "Gm".into(),
            "missing".into(),
            vec![],
        )
        .is_err());
        assert!(TestSite::new(
            objects.clone(),
            maps.clone(),
            "S".into(),
            "Gm".into(),
            "u".into(),
            vec![ProductPairing {
                object: "S".into(),
                product: "Gm".into(),
                projection: "nope".into(),
                gm_projection: "u".into(),
                section: "u".into(),
            }],
        )
        .is_err());
        let dup = vec!["S".to_string(), "S".to_string()];
        assert!(TestSite::new(dup, maps, "S".into(), "Gm".into(), "u".into(), vec![]).is_err());
    }

    #[test]
    fn data_validation_rejects_a_broken_section() {
        let d = derham_toy();
        let mut pullbacks = d.pullbacks.clone();
        let gm2 = d.complex("Gm×Gm", 0).clone();
        let gm = d.complex("Gm", 0).clone();
        let mut comps = BTreeMap::new();
        comps.insert(0i64, Matrix::identity(1));
        comps.insert(1, Matrix::zero(1, 2));
        pullbacks.insert(
            "s1_gm".into(),
            vec![ChainMap::new(gm2, gm, comps).unwrap(); d.twists()],
        );
        let err = GradedMonoidData::new(
            d.site.clone(),
            d.e.clone(),
            d.eta.clone(),
            d.mu.clone(),
            pullbacks,
            d.c.clone(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("retract"), "{err}");

        let mut short = d.pullbacks.clone();
        short.get_mut("u").unwrap().pop();
        assert!(GradedMonoidData::new(
            d.site.clone(),
            d.e.clone(),
            d.eta.clone(),
            d.mu.clone(),
            short,
            d.c.clone(),
        )
        .is_err());
    }

    #[test]
    fn graded_monoid_json_round_trip() {
        let d = derham_toy();
        let json = serde_json::to_string(&d).unwrap();
        let back: GradedMonoidData = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d);
        // Tampering with the section matrix is caught at decode time.
        let tampered = json.replace("\"s1_gm\":[", "\"s1_gm\":[null,");
        assert!(serde_json::from_str::<GradedMonoidData>(&tampered).is_err());
    }
}
