//! Polynomial differential forms on the algebraic n-simplex.
//!
//! The coordinate ring of the n-simplex is presented as the free polynomial
//! ring on `T_1, …, T_n`, with the zeroth barycentric coordinate eliminated
//! as `T_0 = 1 − Σ T_j`. A form of degree `q` is a sum of terms
//! `c · T^a · dT_{s_1} ∧ … ∧ dT_{s_q}` with `s_1 < … < s_q`; the module
//! provides the wedge product, the exterior derivative, the pullbacks along
//! face and degeneracy maps of simplices, and exact integration over the
//! simplex, together with a parser and printer for a small text syntax like
//! `1/6 * T1^2 T2 dT1^dT2`.

use crate::error::Error;
use crate::{Result, Scalar};
use std::collections::BTreeMap;
use std::fmt;

type Monomial = Vec<u32>;
type Subset = Vec<usize>;
type Poly = BTreeMap<Monomial, Scalar>;

/// A polynomial differential form on the n-simplex.
///
/// Terms are keyed by the exponent vector of `T_1..T_n` and the strictly
/// increasing index subset of the wedge factors; stored coefficients are
/// nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyForm {
    n: usize,
    q: usize,
    terms: BTreeMap<(Monomial, Subset), Scalar>,
}

impl PolyForm {
    pub fn zero(n: usize, q: usize) -> Self {
        PolyForm { n, q, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((vec![0; n], Vec::new()), c);
        }
        PolyForm { n, q: 0, terms }
    }

    pub fn one(n: usize) -> Self {
        PolyForm::constant(n, Scalar::one())
    }

    /// The coordinate function `T_j`, `1 ≤ j ≤ n`.
    pub fn coordinate(n: usize, j: usize) -> Self {
        assert!((1..=n).contains(&j), "coordinate index out of range");
        let mut exps = vec![0; n];
        exps[j - 1] = 1;
        let mut terms = BTreeMap::new();
        terms.insert((exps, Vec::new()), Scalar::one());
        PolyForm { n, q: 0, terms }
    }

    /// The one-form `dT_j`, `1 ≤ j ≤ n`.
    pub fn d_coordinate(n: usize, j: usize) -> Self {
        assert!((1..=n).contains(&j), "coordinate index out of range");
        let mut terms = BTreeMap::new();
        terms.insert((vec![0; n], vec![j]), Scalar::one());
        PolyForm { n, q: 1, terms }
    }

    /// A single term `c · T^exps · dT_S`; the subset must be strictly
    /// increasing inside `1..=n`.
    pub fn monomial(n: usize, exps: &[u32], subset: &[usize], c: Scalar) -> Result<Self> {
        if exps.len() != n {
            return Err(Error::DimensionMismatch { left: exps.len(), right: n });
        }
        let increasing = subset.windows(2).all(|w| w[0] < w[1]);
        let in_range = subset.iter().all(|s| (1..=n).contains(s));
        if !increasing || !in_range {
            return Err(Error::invalid(
                "wedge subset",
                "indices must be strictly increasing within the coordinate range",
            ));
        }
        let q = subset.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((exps.to_vec(), subset.to_vec()), c);
        }
        Ok(PolyForm { n, q, terms })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.q
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<(Monomial, Subset), Scalar> {
        &self.terms
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        if s.is_zero() {
            return PolyForm::zero(self.n, self.q);
        }
        let terms = self
            .terms
            .iter()
            .map(|(k, v)| (k.clone(), v.clone() * s.clone()))
            .collect();
        PolyForm { n: self.n, q: self.q, terms }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Scalar::one())
    }

    pub fn add(&self, other: &PolyForm) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { left: self.n, right: other.n });
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.q != other.q {
            return Err(Error::DegreeMismatch { n: self.q, got: other.q });
        }
        let mut terms = self.terms.clone();
        for (k, v) in &other.terms {
            let entry = terms.entry(k.clone()).or_insert_with(Scalar::zero);
            *entry = entry.clone() + v.clone();
        }
        terms.retain(|_, v| !v.is_zero());
        Ok(PolyForm { n: self.n, q: self.q, terms })
    }

    pub fn sub(&self, other: &PolyForm) -> Result<Self> {
        self.add(&other.neg())
    }
}

/// Graded product of two forms on the same simplex.
pub fn wedge(a: &PolyForm, b: &PolyForm) -> Result<PolyForm> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch { left: a.n, right: b.n });
    }
    let mut terms: BTreeMap<(Monomial, Subset), Scalar> = BTreeMap::new();
    for ((ea, sa), ca) in &a.terms {
        for ((eb, sb), cb) in &b.terms {
            if sa.iter().any(|x| sb.contains(x)) {
                continue;
            }
            // Sign of sorting the concatenation sa ++ sb: one transposition
            // per out-of-order pair across the two halves.
            let inversions = sa
                .iter()
                .map(|x| sb.iter().filter(|y| x > y).count())
                .sum::<usize>();
            let sign = if inversions % 2 == 0 { Scalar::one() } else { -Scalar::one() };
            let exps: Monomial = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            let mut subset: Subset = sa.iter().chain(sb.iter()).copied().collect();
            subset.sort_unstable();
            let entry = terms.entry((exps, subset)).or_insert_with(Scalar::zero);
            *entry = entry.clone() + ca.clone() * cb.clone() * sign;
        }
    }
    terms.retain(|_, v| !v.is_zero());
    Ok(PolyForm { n: a.n, q: a.q + b.q, terms })
}

/// Exterior derivative: `d(T^a dT_S) = Σ_j ∂_j(T^a) dT_j ∧ dT_S`.
pub fn exterior_d(a: &PolyForm) -> PolyForm {
    let mut terms: BTreeMap<(Monomial, Subset), Scalar> = BTreeMap::new();
    for ((exps, subset), c) in &a.terms {
        for j in 1..=a.n {
            let e = exps[j - 1];
            if e == 0 || subset.contains(&j) {
                continue;
            }
            let mut dexps = exps.clone();
            dexps[j - 1] -= 1;
            let before = subset.iter().filter(|&&s| s < j).count();
            let sign = if before % 2 == 0 { Scalar::one() } else { -Scalar::one() };
            let mut dsubset = subset.clone();
            dsubset.push(j);
            dsubset.sort_unstable();
            let coeff = c.clone() * Scalar::from_int(e as i64) * sign;
            let entry = terms.entry((dexps, dsubset)).or_insert_with(Scalar::zero);
            *entry = entry.clone() + coeff;
        }
    }
    terms.retain(|_, v| !v.is_zero());
    PolyForm { n: a.n, q: a.q + 1, terms }
}

/// An affine-linear expression `c + Σ lin[k] · T_{k+1}` in the target
/// coordinates of a substitution.
struct Affine {
    c: Scalar,
    lin: Vec<Scalar>,
}

impl Affine {
    fn zero(nt: usize) -> Self {
        Affine { c: Scalar::zero(), lin: vec![Scalar::zero(); nt] }
    }

    fn var(nt: usize, j: usize) -> Self {
        let mut a = Affine::zero(nt);
        a.lin[j - 1] = Scalar::one();
        a
    }

    fn as_poly(&self, nt: usize) -> Poly {
        let mut p = Poly::new();
        if !self.c.is_zero() {
            p.insert(vec![0; nt], self.c.clone());
        }
        for (k, l) in self.lin.iter().enumerate() {
            if !l.is_zero() {
                let mut exps = vec![0; nt];
                exps[k] = 1;
                p.insert(exps, l.clone());
            }
        }
        p
    }
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let m: Monomial = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
            let entry = out.entry(m).or_insert_with(Scalar::zero);
            *entry = entry.clone() + ca.clone() * cb.clone();
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// Expands `∧_{rows} (Σ_k lin_k dT_{k+1})` into sorted wedge subsets with
/// signs.
fn expand_wedge(rows: &[&Vec<Scalar>]) -> Vec<(Subset, Scalar)> {
    let mut states: Vec<(Vec<usize>, Scalar)> = vec![(Vec::new(), Scalar::one())];
    for row in rows {
        let mut next = Vec::new();
        for (chosen, coeff) in &states {
            for (k, l) in row.iter().enumerate() {
                if l.is_zero() || chosen.contains(&k) {
                    continue;
                }
                let mut c2 = chosen.clone();
                c2.push(k);
                next.push((c2, coeff.clone() * l.clone()));
            }
        }
        states = next;
    }
    let mut out: BTreeMap<Subset, Scalar> = BTreeMap::new();
    for (chosen, coeff) in states {
        let mut inversions = 0;
        for i in 0..chosen.len() {
            for j in (i + 1)..chosen.len() {
                if chosen[i] > chosen[j] {
                    inversions += 1;
                }
            }
        }
        let sign = if inversions % 2 == 0 { Scalar::one() } else { -Scalar::one() };
        let mut subset: Subset = chosen.iter().map(|&k| k + 1).collect();
        subset.sort_unstable();
        let entry = out.entry(subset).or_insert_with(Scalar::zero);
        *entry = entry.clone() + coeff * sign;
    }
    out.retain(|_, v| !v.is_zero());
    out.into_iter().collect()
}

/// Pulls a form back along a coordinate substitution `T_j ↦ subs[j−1]`.
fn substitute(a: &PolyForm, n_target: usize, subs: &[Affine]) -> PolyForm {
    assert_eq!(subs.len(), a.n);
    let unit: Poly = [(vec![0; n_target], Scalar::one())].into_iter().collect();
    let mut terms: BTreeMap<(Monomial, Subset), Scalar> = BTreeMap::new();
    for ((exps, subset), c) in &a.terms {
        let mut poly = unit.clone();
        for (j, &e) in exps.iter().enumerate() {
            if e > 0 {
                let base = subs[j].as_poly(n_target);
                for _ in 0..e {
                    poly = poly_mul(&poly, &base);
                }
            }
        }
        if poly.is_empty() {
            continue;
        }
        let rows: Vec<&Vec<Scalar>> = subset.iter().map(|&s| &subs[s - 1].lin).collect();
        for (sub, wc) in expand_wedge(&rows) {
            for (mono, pc) in &poly {
                let entry = terms
                    .entry((mono.clone(), sub.clone()))
                    .or_insert_with(Scalar::zero);
                *entry = entry.clone() + c.clone() * pc.clone() * wc.clone();
            }
        }
    }
    terms.retain(|_, v| !v.is_zero());
    PolyForm { n: n_target, q: a.q, terms }
}

/// Pullback along the `i`-th face inclusion of the simplex (the face where
/// the `i`-th barycentric coordinate vanishes), `0 ≤ i ≤ n`; sends forms on
/// the n-simplex to forms on the (n−1)-simplex.
pub fn coface_pullback(a: &PolyForm, i: usize) -> PolyForm {
    let n = a.n;
    assert!(n >= 1, "the 0-simplex has no faces");
    assert!(i <= n, "face index out of range");
    let nt = n - 1;
    let subs: Vec<Affine> = (1..=n)
        .map(|j| {
            if i == 0 {
                if j == 1 {
                    // T_1 lands on the eliminated coordinate 1 − Σ U_k.
                    let mut s = Affine::zero(nt);
                    s.c = Scalar::one();
                    s.lin = vec![-Scalar::one(); nt];
                    s
                } else {
                    Affine::var(nt, j - 1)
                }
            } else if j < i {
                Affine::var(nt, j)
            } else if j == i {
                Affine::zero(nt)
            } else {
                Affine::var(nt, j - 1)
            }
        })
        .collect();
    substitute(a, nt, &subs)
}

/// Pullback along the `i`-th degeneracy (the collapse adding the `i`-th and
/// `(i+1)`-st barycentric coordinates), `0 ≤ i ≤ n`; sends forms on the
/// n-simplex to forms on the (n+1)-simplex.
pub fn codegeneracy_pullback(a: &PolyForm, i: usize) -> PolyForm {
    let m = a.n;
    assert!(i <= m, "degeneracy index out of range");
    let nt = m + 1;
    let subs: Vec<Affine> = (1..=m)
        .map(|j| {
            if i == 0 {
                Affine::var(nt, j + 1)
            } else if j < i {
                Affine::var(nt, j)
            } else if j == i {
                let mut s = Affine::zero(nt);
                s.lin[i - 1] = Scalar::one();
                s.lin[i] = Scalar::one();
                s
            } else {
                Affine::var(nt, j + 1)
            }
        })
        .collect();
    substitute(a, nt, &subs)
}

/// Exact integral over the n-simplex of a top-degree form: each monomial
/// `T^a dT_1∧…∧dT_n` contributes `(∏ a_j!) / (n + Σ a_j)!`. Forms of lower
/// degree must be zero.
pub fn integrate(a: &PolyForm) -> Result<Scalar> {
    if a.q != a.n {
        if a.is_zero() {
            return Ok(Scalar::zero());
        }
        return Err(Error::DegreeMismatch { n: a.n, got: a.q });
    }
    let mut total = Scalar::zero();
    for ((exps, _), c) in &a.terms {
        // Stored subsets of full size are exactly 1..=n, already sorted.
        let mut value = c.clone();
        let mut degree_sum = 0u64;
        for &e in exps {
            for k in 1..=e as u64 {
                value = value * Scalar::from_int(k as i64);
            }
            degree_sum += e as u64;
        }
        for k in 1..=(a.n as u64 + degree_sum) {
            value = value / Scalar::from_int(k as i64);
        }
        total = total + value;
    }
    Ok(total)
}

impl fmt::Display for PolyForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((exps, subset), c) in &self.terms {
            let negative = c.is_negative();
            let magnitude = if negative { -c.clone() } else { c.clone() };
            if first {
                if negative {
                    write!(f, "-")?;
                }
                first = false;
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut body = Vec::new();
            for (j, &e) in exps.iter().enumerate() {
                if e == 1 {
                    body.push(format!("T{}", j + 1));
                } else if e > 1 {
                    body.push(format!("T{}^{e}", j + 1));
                }
            }
            if !subset.is_empty() {
                let chain: Vec<String> = subset.iter().map(|s| format!("dT{s}")).collect();
                body.push(chain.join("^"));
            }
            if body.is_empty() {
                write!(f, "{magnitude}")?;
            } else if magnitude.is_one() {
                write!(f, "{}", body.join(" "))?;
            } else {
                write!(f, "{magnitude} * {}", body.join(" "))?;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, detail: &str) -> Error {
        Error::FormParse { at: self.pos, detail: detail.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn parse_uint(&mut self) -> Result<u64> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected a number"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.err("number out of range"))
    }

    fn parse_rational(&mut self) -> Result<Scalar> {
        let num = self.parse_uint()? as i64;
        if self.eat(b'/') {
            let den = self.parse_uint()? as i64;
            if den == 0 {
                return Err(self.err("zero denominator"));
            }
            Ok(Scalar::ratio(num, den))
        } else {
            Ok(Scalar::from_int(num))
        }
    }
}

impl PolyForm {
    /// Parses the textual syntax, e.g. `1/6 * T1^2 T2 dT1^dT2`; coordinates
    /// range over `T1..T{n}`.
    pub fn parse(input: &str, n: usize) -> Result<Self> {
        let mut p = Parser { bytes: input.as_bytes(), pos: 0 };
        p.skip_ws();
        if p.peek().is_none() {
            return Err(p.err("empty input"));
        }
        let mut result: Option<PolyForm> = None;
        let mut pending_sign = if p.eat(b'-') {
            -Scalar::one()
        } else {
            p.eat(b'+');
            Scalar::one()
        };
        loop {
            p.skip_ws();
            let term = parse_term(&mut p, n, &pending_sign)?;
            result = Some(match result {
                None => term,
                Some(acc) => acc.add(&term).map_err(|_| p.err("terms of mixed degree"))?,
            });
            p.skip_ws();
            match p.peek() {
                None => break,
                Some(b'+') => {
                    p.pos += 1;
                    pending_sign = Scalar::one();
                }
                Some(b'-') => {
                    p.pos += 1;
                    pending_sign = -Scalar::one();
                }
                Some(_) => return Err(p.err("expected + or - between terms")),
            }
        }
        Ok(result.expect("at least one term parsed"))
    }
}

fn parse_term(p: &mut Parser, n: usize, sign: &Scalar) -> Result<PolyForm> {
    let mut coeff = sign.clone();
    let mut saw_anything = false;
    if p.peek().is_some_and(|b| b.is_ascii_digit()) {
        coeff = coeff * p.parse_rational()?;
        saw_anything = true;
        p.skip_ws();
        if p.eat(b'*') {
            p.skip_ws();
        }
    }
    let mut exps = vec![0u32; n];
    let mut wedge_seq: Vec<usize> = Vec::new();
    loop {
        match p.peek() {
            Some(b'T') => {
                p.pos += 1;
                let j = p.parse_uint()? as usize;
                if j < 1 || j > n {
                    return Err(p.err("coordinate index out of range"));
                }
                let e = if p.eat(b'^') { p.parse_uint()? as u32 } else { 1 };
                exps[j - 1] += e;
                saw_anything = true;
            }
            Some(b'd') => {
                p.pos += 1;
                if !p.eat(b'T') {
                    return Err(p.err("expected dT"));
                }
                let j = p.parse_uint()? as usize;
                if j < 1 || j > n {
                    return Err(p.err("coordinate index out of range"));
                }
                wedge_seq.push(j);
                saw_anything = true;
                while p.peek() == Some(b'^') {
                    p.pos += 1;
                    if !p.eat(b'd') || !p.eat(b'T') {
                        return Err(p.err("expected dT after ^"));
                    }
                    let k = p.parse_uint()? as usize;
                    if k < 1 || k > n {
                        return Err(p.err("coordinate index out of range"));
                    }
                    wedge_seq.push(k);
                }
            }
            _ => break,
        }
        p.skip_ws();
    }
    if !saw_anything {
        return Err(p.err("expected a term"));
    }
    // Canonicalize the written wedge order: repeated factors kill the term,
    // otherwise sorting contributes the permutation sign.
    let mut sorted = wedge_seq.clone();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Ok(PolyForm::zero(n, wedge_seq.len()));
    }
    let mut inversions = 0;
    for i in 0..wedge_seq.len() {
        for j in (i + 1)..wedge_seq.len() {
            if wedge_seq[i] > wedge_seq[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 1 {
        coeff = -coeff;
    }
    PolyForm::monomial(n, &exps, &sorted, coeff)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: i64) -> Scalar {
        Scalar::from_int(v)
    }

    /// All exponent vectors of length `n` with total degree at most `max`.
    fn monomials(n: usize, max: u32) -> Vec<Vec<u32>> {
        if n == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for rest in monomials(n - 1, max) {
            let used: u32 = rest.iter().sum();
            for e in 0..=(max - used) {
                let mut m = rest.clone();
                m.push(e);
                out.push(m);
            }
        }
        out
    }

    fn subsets(n: usize, q: usize) -> Vec<Vec<usize>> {
        fn go(start: usize, n: usize, q: usize) -> Vec<Vec<usize>> {
            if q == 0 {
                return vec![Vec::new()];
            }
            let mut out = Vec::new();
            for first in start..=n {
                for mut rest in go(first + 1, n, q - 1) {
                    rest.insert(0, first);
                    out.push(rest);
                }
            }
            out
        }
        go(1, n, q)
    }

    fn sample_forms(n: usize, q: usize, max_deg: u32) -> Vec<PolyForm> {
        let mut out = Vec::new();
        for exps in monomials(n, max_deg) {
            for sub in subsets(n, q) {
                out.push(PolyForm::monomial(n, &exps, &sub, Scalar::one()).unwrap());
            }
        }
        out
    }

    #[test]
    fn wedge_unit_and_alternation() {
        let one = PolyForm::one(2);
        let b = PolyForm::parse("T1 dT2", 2).unwrap();
        assert_eq!(wedge(&one, &b).unwrap(), b);
        assert_eq!(wedge(&b, &one).unwrap(), b);

        let dt1 = PolyForm::d_coordinate(2, 1);
        let dt2 = PolyForm::d_coordinate(2, 2);
        assert!(wedge(&dt1, &dt1).unwrap().is_zero());
        assert_eq!(wedge(&dt1, &dt2).unwrap(), wedge(&dt2, &dt1).unwrap().neg());
    }

    #[test]
    fn wedge_is_graded_commutative_and_associative() {
        let n = 2;
        for qa in 0..=2usize {
            for qb in 0..=2usize {
                for a in sample_forms(n, qa, 1) {
                    for b in sample_forms(n, qb, 1) {
                        let ab = wedge(&a, &b).unwrap();
                        let ba = wedge(&b, &a).unwrap();
                        let expected = if (qa * qb) % 2 == 0 { ba.clone() } else { ba.neg() };
                        assert_eq!(ab, expected, "a = {a}, b = {b}");
                    }
                }
            }
        }
        let a = PolyForm::parse("T1 dT1", 3).unwrap();
        let b = PolyForm::parse("T2 dT2", 3).unwrap();
        let c = PolyForm::parse("T3 dT3 + dT2", 3).unwrap();
        assert_eq!(
            wedge(&wedge(&a, &b).unwrap(), &c).unwrap(),
            wedge(&a, &wedge(&b, &c).unwrap()).unwrap()
        );
    }

    #[test]
    fn exterior_d_basics() {
        assert!(exterior_d(&PolyForm::one(2)).is_zero());
        assert_eq!(
            exterior_d(&PolyForm::coordinate(2, 1)),
            PolyForm::d_coordinate(2, 1)
        );
        let t1t2 = PolyForm::parse("T1 T2", 2).unwrap();
        let expected = PolyForm::parse("T2 dT1 + T1 dT2", 2).unwrap();
        assert_eq!(exterior_d(&t1t2), expected);
    }

    #[test]
    fn exterior_d_squares_to_zero() {
        for q in 0..=2usize {
            for a in sample_forms(3, q, 2) {
                assert!(exterior_d(&exterior_d(&a)).is_zero(), "a = {a}");
            }
        }
    }

    #[test]
    fn d_satisfies_leibniz() {
        for a in sample_forms(2, 1, 1) {
            for b in sample_forms(2, 0, 2) {
                let lhs = exterior_d(&wedge(&a, &b).unwrap());
                let rhs = wedge(&exterior_d(&a), &b)
                    .unwrap()
                    .add(&wedge(&a, &exterior_d(&b)).unwrap().neg())
                    .unwrap();
                assert_eq!(lhs, rhs, "a = {a}, b = {b}");
            }
        }
    }

    #[test]
    fn coface_pullback_examples() {
        let c = PolyForm::constant(2, s(7));
        assert_eq!(coface_pullback(&c, 0), PolyForm::constant(1, s(7)));

        // On the interval, the 0th face sends T_1 to the constant 1.
        let t1 = PolyForm::coordinate(1, 1);
        assert_eq!(coface_pullback(&t1, 0), PolyForm::one(0));
        assert!(coface_pullback(&PolyForm::d_coordinate(1, 1), 0).is_zero());
        // The 1st face sends T_1 to 0.
        assert!(coface_pullback(&t1, 1).is_zero());
    }

    #[test]
    fn coface_simplicial_identities() {
        for n in 2..=3usize {
            for q in 0..=1usize {
                for a in sample_forms(n, q, 2) {
                    for j in 1..=n {
                        for i in 0..j {
                            let lhs = coface_pullback(&coface_pullback(&a, j), i);
                            let rhs = coface_pullback(&coface_pullback(&a, i), j - 1);
                            assert_eq!(lhs, rhs, "a = {a}, i = {i}, j = {j}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn codegeneracy_sections_and_commutation() {
        for n in 1..=2usize {
            for q in 0..=1usize {
                for a in sample_forms(n, q, 2) {
                    for i in 0..=n {
                        let up = codegeneracy_pullback(&a, i);
                        assert_eq!(coface_pullback(&up, i), a, "a = {a}, i = {i}");
                        assert_eq!(
                            exterior_d(&up),
                            codegeneracy_pullback(&exterior_d(&a), i),
                            "a = {a}, i = {i}"
                        );
                    }
                }
            }
        }
        assert_eq!(
            codegeneracy_pullback(&PolyForm::constant(1, s(3)), 0),
            PolyForm::constant(2, s(3))
        );
    }

    #[test]
    fn integrate_worked_values() {
        assert_eq!(integrate(&PolyForm::d_coordinate(1, 1)).unwrap(), s(1));
        let vol2 = PolyForm::parse("dT1^dT2", 2).unwrap();
        assert_eq!(integrate(&vol2).unwrap(), Scalar::ratio(1, 2));
        let t1vol = PolyForm::parse("T1 dT1^dT2", 2).unwrap();
        assert_eq!(integrate(&t1vol).unwrap(), Scalar::ratio(1, 6));
    }

    #[test]
    fn integrate_degree_mismatch() {
        let low = PolyForm::d_coordinate(2, 1);
        assert!(matches!(integrate(&low), Err(Error::DegreeMismatch { .. })));
        assert_eq!(integrate(&PolyForm::zero(2, 1)).unwrap(), Scalar::zero());
    }

    // Independent oracle: iterated symbolic integration of T^a over the
    // simplex 0 ≤ T_i, Σ T_i ≤ 1, innermost variable first.
    fn iterated_integral(exps: &[u32]) -> Scalar {
        type P = BTreeMap<Vec<u32>, Scalar>;
        fn mul(a: &P, b: &P) -> P {
            let mut out = P::new();
            for (ma, ca) in a {
                for (mb, cb) in b {
                    let m: Vec<u32> = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                    let e = out.entry(m).or_insert_with(Scalar::zero);
                    *e = e.clone() + ca.clone() * cb.clone();
                }
            }
            out.retain(|_, v| !v.is_zero());
            out
        }
        let n = exps.len();
        if n == 0 {
            return Scalar::one();
        }
        let mut p = P::new();
        p.insert(exps.to_vec(), Scalar::one());
        for v in (0..n).rev() {
            let mut next = P::new();
            for (mono, c) in &p {
                let e = mono[v];
                let scaled = c.clone() / Scalar::from_int(e as i64 + 1);
                // (1 − T_1 − … − T_v)^{e+1}, in the earlier variables only.
                let mut upper = P::new();
                let mut base = P::new();
                base.insert(vec![0; n], Scalar::one());
                for k in 0..v {
                    let mut m = vec![0; n];
                    m[k] = 1;
                    base.insert(m, -Scalar::one());
                }
                upper.insert(vec![0; n], Scalar::one());
                for _ in 0..=e {
                    upper = mul(&upper, &base);
                }
                let mut rest = mono.clone();
                rest[v] = 0;
                let mut rest_p = P::new();
                rest_p.insert(rest, scaled);
                for (m, cc) in mul(&upper, &rest_p) {
                    let entry = next.entry(m).or_insert_with(Scalar::zero);
                    *entry = entry.clone() + cc;
                }
                next.retain(|_, val| !val.is_zero());
            }
            p = next;
        }
        p.get(&vec![0; n]).cloned().unwrap_or_else(Scalar::zero)
    }

    #[test]
    fn integrate_matches_iterated_integration() {
        for n in 1..=3usize {
            for exps in monomials(n, 3) {
                let subset: Vec<usize> = (1..=n).collect();
                let form = PolyForm::monomial(n, &exps, &subset, Scalar::one()).unwrap();
                assert_eq!(
                    integrate(&form).unwrap(),
                    iterated_integral(&exps),
                    "exps = {exps:?}"
                );
            }
        }
    }

    #[test]
    fn stokes_over_the_boundary() {
        for n in 1..=3usize {
            for a in sample_forms(n, n - 1, 2) {
                let lhs = integrate(&exterior_d(&a)).unwrap();
                let mut rhs = Scalar::zero();
                for i in 0..=n {
                    let face = integrate(&coface_pullback(&a, i)).unwrap();
                    let sign = if i % 2 == 0 { Scalar::one() } else { -Scalar::one() };
                    rhs = rhs + sign * face;
                }
                assert_eq!(lhs, rhs, "a = {a}");
            }
        }
    }

    #[test]
    fn parse_print_round_trip() {
        let text = "1/6 * T1^2 T2 dT1^dT2";
        let form = PolyForm::parse(text, 2).unwrap();
        assert_eq!(form.to_string(), text);
        assert_eq!(PolyForm::parse(&form.to_string(), 2).unwrap(), form);

        for q in 0..=2usize {
            for f in sample_forms(2, q, 2) {
                let combined = f
                    .scale(&Scalar::ratio(-3, 7))
                    .add(&sample_forms(2, q, 2)[0].scale(&s(2)))
                    .unwrap();
                let printed = combined.to_string();
                assert_eq!(
                    PolyForm::parse(&printed, 2).unwrap(),
                    combined,
                    "printed = {printed}"
                );
            }
        }
    }

    #[test]
    fn parse_handles_signs_and_reordered_wedges() {
        let a = PolyForm::parse("-T1 + 2 * T2", 2).unwrap();
        let b = PolyForm::coordinate(2, 2)
            .scale(&s(2))
            .add(&PolyForm::coordinate(2, 1).neg())
            .unwrap();
        assert_eq!(a, b);

        let swapped = PolyForm::parse("dT2^dT1", 2).unwrap();
        assert_eq!(swapped, PolyForm::parse("dT1^dT2", 2).unwrap().neg());
        assert!(PolyForm::parse("dT1^dT1", 2).unwrap().is_zero());
    }

    #[test]
    fn parse_rejects_malformed_input() {
        assert!(matches!(
            PolyForm::parse("T9", 2),
            Err(Error::FormParse { .. })
        ));
        assert!(matches!(
            PolyForm::parse("1 +", 2),
            Err(Error::FormParse { .. })
        ));
        assert!(matches!(
            PolyForm::parse("", 2),
            Err(Error::FormParse { .. })
        ));
        assert!(matches!(
            PolyForm::parse("dT1 + T1", 2),
            Err(Error::FormParse { .. })
        ));
        assert!(matches!(
            PolyForm::parse("1/0", 2),
            Err(Error::FormParse { .. })
        ));
    }
}
