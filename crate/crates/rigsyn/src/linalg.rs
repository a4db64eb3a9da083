//! Exact linear algebra over the rationals.
//!
//! The workhorse is an integer row-echelon engine: incoming rational rows are
//! scaled to integers, reduced against the existing pivot rows with
//! fraction-free two-row combinations, and content-stripped after every
//! combination so entries stay small. Rationals only reappear during
//! back-substitution. Pivoting is deterministic (leading nonzero column of
//! each reduced row), so every derived output is canonical: kernel vectors
//! are primitive integer vectors with positive leading coordinate, image
//! bases are the pivot columns of the input in column order.

use crate::error::Error;
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

/// Sparse integer row: `(column, value)` pairs sorted by column, values nonzero.
type IntRow = Vec<(usize, BigInt)>;

fn row_scale_combine(a: &IntRow, ca: &BigInt, b: &IntRow, cb: &BigInt) -> IntRow {
    let mut out = IntRow::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(&(ca_col, _)), Some(&(cb_col, _))) => {
                if ca_col < cb_col {
                    let v = ca * &a[i].1;
                    i += 1;
                    (ca_col, v)
                } else if cb_col < ca_col {
                    let v = cb * &b[j].1;
                    j += 1;
                    (cb_col, v)
                } else {
                    let v = ca * &a[i].1 + cb * &b[j].1;
                    i += 1;
                    j += 1;
                    (ca_col, v)
                }
            }
            (Some(&(c, _)), None) => {
                let v = ca * &a[i].1;
                i += 1;
                (c, v)
            }
            (None, Some(&(c, _))) => {
                let v = cb * &b[j].1;
                j += 1;
                (c, v)
            }
            (None, None) => unreachable!(),
        };
        if !next.1.is_zero() {
            out.push(next);
        }
    }
    out
}

fn row_strip_content(row: &mut IntRow) {
    if row.is_empty() {
        return;
    }
    let mut g = BigInt::zero();
    for (_, v) in row.iter() {
        g = g.gcd(v);
        if g.is_one() {
            break;
        }
    }
    let negate = row[0].1.is_negative();
    if g.is_one() && !negate {
        return;
    }
    if negate {
        g = -g;
    }
    for (_, v) in row.iter_mut() {
        *v = &*v / &g;
    }
}

/// Incrementally built row-echelon form with deterministic pivoting.
pub struct Echelon {
    ncols: usize,
    /// pivot column -> content-stripped row with positive leading entry.
    pivots: BTreeMap<usize, IntRow>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon { ncols, pivots: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_cols(&self) -> Vec<usize> {
        self.pivots.keys().copied().collect()
    }

    /// Reduces `row` against the current pivots, returning the residual.
    fn reduce(&self, mut row: IntRow) -> IntRow {
        loop {
            let Some(&(lead_col, ref lead_val)) = row.first() else {
                return row;
            };
            let Some(pivot) = self.pivots.get(&lead_col) else {
                return row;
            };
            let p_val = &pivot[0].1;
            let g = lead_val.gcd(p_val);
            let ca = p_val / &g;
            let cb = -(lead_val / &g);
            row = row_scale_combine(&row, &ca, pivot, &cb);
            row_strip_content(&mut row);
        }
    }

    /// Inserts a row; returns `true` if it added a new pivot.
    pub fn insert(&mut self, row: IntRow) -> bool {
        debug_assert!(row.iter().all(|&(c, _)| c < self.ncols));
        let mut residual = self.reduce(row);
        if residual.is_empty() {
            return false;
        }
        row_strip_content(&mut residual);
        let col = residual[0].0;
        self.pivots.insert(col, residual);
        true
    }

    pub fn insert_rational(&mut self, row: Vec<(usize, Scalar)>) -> bool {
        self.insert(int_row_from_rational(row))
    }

    /// Inserts every row of `m`, in row order.
    pub fn insert_matrix_rows(&mut self, m: &Matrix) {
        for row in rational_rows(m) {
            self.insert_rational(row);
        }
    }

    /// Back-substitution: given values for all non-pivot columns (only the
    /// nonzero ones need to be listed), extends them to the unique vector in
    /// the row-space-orthogonal sense: for each pivot column p (descending),
    /// solves `row_p · v = 0`.
    fn complete_kernel_vector(&self, free: &[(usize, Scalar)]) -> Vec<Scalar> {
        let mut v = vec![Scalar::zero(); self.ncols];
        for (c, val) in free {
            v[*c] = val.clone();
        }
        for (&p, row) in self.pivots.iter().rev() {
            let mut acc = Scalar::zero();
            for (c, a) in row.iter().skip(1) {
                if !v[*c].is_zero() {
                    acc += Scalar::from_bigint(a.clone()) * v[*c].clone();
                }
            }
            if acc.is_zero() {
                v[p] = Scalar::zero();
            } else {
                v[p] = -(acc / Scalar::from_bigint(row[0].1.clone()));
            }
        }
        v
    }
}

fn int_row_from_rational(row: Vec<(usize, Scalar)>) -> IntRow {
    let mut denom_lcm = BigInt::one();
    for (_, v) in row.iter() {
        denom_lcm = denom_lcm.lcm(v.denom());
    }
    let mut out: IntRow = row
        .into_iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(c, v)| (c, v.numer() * (&denom_lcm / v.denom())))
        .collect();
    out.sort_by_key(|&(c, _)| c);
    row_strip_content(&mut out);
    out
}

fn rational_rows(m: &Matrix) -> Vec<Vec<(usize, Scalar)>> {
    let mut rows: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); m.rows()];
    for (r, c, v) in m.iter() {
        rows[r].push((c, v.clone()));
    }
    rows
}

/// Rank of a matrix.
pub fn rank(m: &Matrix) -> usize {
    let mut e = Echelon::new(m.cols());
    e.insert_matrix_rows(m);
    e.rank()
}

/// Canonical basis of `ker m` (vectors `v` with `m v = 0`), one primitive
/// integer vector per free column, free columns in increasing order, leading
/// nonzero coordinate positive.
pub fn kernel_basis(m: &Matrix) -> Vec<Vec<Scalar>> {
    let mut e = Echelon::new(m.cols());
    e.insert_matrix_rows(m);
    kernel_from_echelon(&e)
}

fn kernel_from_echelon(e: &Echelon) -> Vec<Vec<Scalar>> {
    let pivot_cols = e.pivot_cols();
    let mut out = Vec::new();
    for f in 0..e.ncols {
        if pivot_cols.binary_search(&f).is_ok() {
            continue;
        }
        let v = e.complete_kernel_vector(&[(f, Scalar::one())]);
        out.push(canonical_vector(v));
    }
    out
}

/// Scales a rational vector to a primitive integer vector whose first
/// nonzero coordinate is positive.
pub fn canonical_vector(v: Vec<Scalar>) -> Vec<Scalar> {
    let mut denom_lcm = BigInt::one();
    for s in v.iter() {
        denom_lcm = denom_lcm.lcm(s.denom());
    }
    let ints: Vec<BigInt> =
        v.iter().map(|s| s.numer() * (&denom_lcm / s.denom())).collect();
    let mut g = BigInt::zero();
    for x in ints.iter() {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return v;
    }
    if let Some(first) = ints.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            g = -g;
        }
    }
    ints.into_iter().map(|x| Scalar::from_bigint(x / &g)).collect()
}

/// A linear subspace of `K^ambient`, stored as a basis matrix whose columns
/// are independent.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    ambient: usize,
    basis: Matrix,
}

impl Subspace {
    /// Wraps a basis matrix, verifying column independence.
    pub fn new(basis: Matrix) -> crate::Result<Self> {
        if rank(&basis) != basis.cols() {
            return Err(Error::invalid("subspace", "basis columns are dependent"));
        }
        Ok(Subspace { ambient: basis.rows(), basis })
    }

    /// Builds a subspace from a spanning set, keeping the pivot columns.
    pub fn from_spanning(m: &Matrix) -> Self {
        let mut e = Echelon::new(m.rows());
        let mut keep = Vec::new();
        for c in 0..m.cols() {
            let col = m.column(c);
            let row: Vec<(usize, Scalar)> =
                col.into_iter().enumerate().filter(|(_, v)| !v.is_zero()).collect();
            if e.insert_rational(row) {
                keep.push(c);
            }
        }
        let mut basis = Matrix::zero(m.rows(), keep.len());
        for (j, &c) in keep.iter().enumerate() {
            for (i, v) in m.column(c).into_iter().enumerate() {
                basis.set(i, j, v);
            }
        }
        Subspace { ambient: m.rows(), basis }
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Matrix::zero(ambient, 0) }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace { ambient, basis: Matrix::identity(ambient) }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        assert_eq!(v.len(), self.ambient, "ambient mismatch");
        let mut b = Matrix::zero(self.ambient, 1);
        for (i, s) in v.iter().enumerate() {
            b.set(i, 0, s.clone());
        }
        solve(&self.basis, &b).is_ok()
    }
}

/// Basis of the column space: the pivot columns of `m`, in column order.
pub fn image_basis(m: &Matrix) -> Subspace {
    Subspace::from_spanning(m)
}

/// Solves `A X = B` exactly. Returns the unique solution with all free
/// variables zero, or `Error::Inconsistent`.
pub fn solve(a: &Matrix, b: &Matrix) -> crate::Result<Matrix> {
    assert_eq!(a.rows(), b.rows(), "shape mismatch in solve");
    let n = a.cols();
    let k = b.cols();
    // Augmented system: rows of [A | B]; extra columns are n..n + k, one per
    // right-hand side, eliminated in a single pass.
    let mut e = Echelon::new(n + k);
    let mut rows = rational_rows(a);
    for (r, c, v) in b.iter() {
        rows[r].push((n + c, v.clone()));
    }
    for row in rows {
        e.insert_rational(row);
    }
    if e.pivots.range(n..).next().is_some() {
        return Err(Error::Inconsistent);
    }
    // Rows of [A | b_j] annihilate (x; -e_j) exactly when A x = b_j, so pin
    // the j-th augmented coordinate to -1 (the others stay zero) and
    // back-substitute.
    let mut x = Matrix::zero(n, k);
    for j in 0..k {
        let v = e.complete_kernel_vector(&[(n + j, -Scalar::one())]);
        for (i, s) in v.into_iter().take(n).enumerate() {
            if !s.is_zero() {
                x.set(i, j, s);
            }
        }
    }
    Ok(x)
}

/// Canonical kernel basis of a linear system given directly as sparse
/// rational rows over `ncols` variables, without materializing a matrix.
pub fn kernel_of_rows<I>(ncols: usize, rows: I) -> Vec<Vec<Scalar>>
where
    I: IntoIterator<Item = Vec<(usize, Scalar)>>,
{
    let mut e = Echelon::new(ncols);
    for row in rows {
        e.insert_rational(row);
    }
    kernel_from_echelon(&e)
}

/// Data describing the quotient `inside / sub`.
///
/// `sub` must be contained in `inside` (checked; the error reports the first
/// offending basis column). Returns the quotient dimension together with a
/// projection matrix acting on `inside`-coordinates: a vector expressed in
/// the basis of `inside` is sent to its class in the quotient, and the
/// projection kills exactly the image of `sub`.
pub fn quotient_data(sub: &Subspace, inside: &Subspace) -> crate::Result<(usize, Matrix)> {
    assert_eq!(sub.ambient(), inside.ambient(), "ambient mismatch");
    // Express each basis vector of `sub` in `inside` coordinates.
    let mut coords = Matrix::zero(inside.dim(), sub.dim());
    for j in 0..sub.dim() {
        let mut b = Matrix::zero(sub.ambient(), 1);
        for (i, v) in sub.basis().column(j).into_iter().enumerate() {
            b.set(i, 0, v);
        }
        match solve(inside.basis(), &b) {
            Ok(x) => {
                for (i, v) in x.column(0).into_iter().enumerate() {
                    coords.set(i, j, v);
                }
            }
            Err(Error::Inconsistent) => return Err(Error::NotContained { column: j }),
            Err(e) => return Err(e),
        }
    }
    // Quotient coordinates: a basis of the left kernel of `coords`.
    let left_kernel = kernel_basis(&coords.transpose());
    let dim = left_kernel.len();
    let mut projection = Matrix::zero(dim, inside.dim());
    for (r, v) in left_kernel.into_iter().enumerate() {
        for (c, s) in v.into_iter().enumerate() {
            projection.set(r, c, s);
        }
    }
    Ok((dim, projection))
}

/// Expresses `v` in the given basis columns, if possible.
pub fn coords_in_basis(basis: &Matrix, v: &[Scalar]) -> crate::Result<Vec<Scalar>> {
    let mut b = Matrix::zero(basis.rows(), 1);
    for (i, s) in v.iter().enumerate() {
        b.set(i, 0, s.clone());
    }
    Ok(solve(basis, &b)?.column(0))
}

/// Coefficients of `det(tI - a)`, lowest degree first, monic of degree
/// `a.rows()`. Uses the trace recurrence (Faddeev-LeVerrier), staying in
/// exact rationals throughout.
pub fn char_poly(a: &Matrix) -> Vec<Scalar> {
    assert_eq!(a.rows(), a.cols(), "characteristic polynomial of a non-square matrix");
    let n = a.rows();
    let mut coeffs = vec![Scalar::zero(); n + 1];
    coeffs[n] = Scalar::one();
    let mut m = Matrix::identity(n);
    for k in 1..=n {
        m = a.mul(&m);
        let mut tr = Scalar::zero();
        for i in 0..n {
            tr += m.get(i, i);
        }
        let c = -(tr / Scalar::from_int(k as i64));
        coeffs[n - k] = c.clone();
        for i in 0..n {
            m.set(i, i, m.get(i, i) + c.clone());
        }
    }
    coeffs
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            out.push(&n / &d);
        }
        d += BigInt::one();
    }
    out
}

fn poly_eval(coeffs: &[Scalar], at: &Scalar) -> Scalar {
    let mut acc = Scalar::zero();
    for c in coeffs.iter().rev() {
        acc = acc * at.clone() + c.clone();
    }
    acc
}

/// Divides by `t - r`, assuming `r` is a root; coefficients lowest first.
fn deflate(coeffs: &[Scalar], r: &Scalar) -> Vec<Scalar> {
    let d = coeffs.len() - 1;
    let mut q = vec![Scalar::zero(); d];
    q[d - 1] = coeffs[d].clone();
    for j in (0..d - 1).rev() {
        q[j] = coeffs[j + 1].clone() + r.clone() * q[j + 1].clone();
    }
    q
}

/// All rational roots of the polynomial with the given coefficients (lowest
/// degree first), with multiplicities and sorted ascending, together with
/// the degree of the unfactored remainder. The zero polynomial and the
/// empty coefficient list return no roots.
pub fn rational_roots(coeffs: &[Scalar]) -> (Vec<(Scalar, usize)>, usize) {
    let mut coeffs: Vec<Scalar> = coeffs.to_vec();
    while coeffs.last().is_some_and(Scalar::is_zero) {
        coeffs.pop();
    }
    if coeffs.len() <= 1 {
        return (Vec::new(), 0);
    }
    let mut roots: BTreeMap<Scalar, usize> = BTreeMap::new();
    while coeffs.len() > 1 && coeffs[0].is_zero() {
        *roots.entry(Scalar::zero()).or_insert(0) += 1;
        coeffs.remove(0);
    }
    if coeffs.len() > 1 {
        // Clear denominators; candidates are then divisor ratios of the
        // outer coefficients.
        let mut scale = BigInt::one();
        for c in &coeffs {
            scale = scale.lcm(c.denom());
        }
        let ints: Vec<BigInt> =
            coeffs.iter().map(|c| c.numer() * (&scale / c.denom())).collect();
        let mut candidates = Vec::new();
        for num in divisors(&ints[0]) {
            for den in divisors(ints.last().unwrap()) {
                let q = Scalar::from_parts(num.clone(), den);
                candidates.push(-q.clone());
                candidates.push(q);
            }
        }
        candidates.sort();
        candidates.dedup();
        for r in candidates {
            while coeffs.len() > 1 && poly_eval(&coeffs, &r).is_zero() {
                *roots.entry(r.clone()).or_insert(0) += 1;
                coeffs = deflate(&coeffs, &r);
            }
        }
    }
    (roots.into_iter().collect(), coeffs.len() - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: i64) -> Scalar {
        Scalar::from_int(v)
    }

    #[test]
    fn rank_of_dependent_rows() {
        // Hand row-reduction: second row is twice the first.
        let m = Matrix::from_int_rows(&[&[1, 2], &[2, 4]]);
        assert_eq!(rank(&m), 1);
        assert_eq!(rank(&Matrix::identity(3)), 3);
        assert_eq!(rank(&Matrix::zero(2, 5)), 0);
    }

    #[test]
    fn kernel_of_sum_functional() {
        // ker [1 1] is spanned by (1, -1).
        let m = Matrix::from_int_rows(&[&[1, 1]]);
        let k = kernel_basis(&m);
        assert_eq!(k, vec![vec![s(1), s(-1)]]);
    }

    #[test]
    fn kernel_canonical_and_correct() {
        let m = Matrix::from_int_rows(&[&[1, 2, 3], &[4, 5, 6]]);
        let k = kernel_basis(&m);
        assert_eq!(k.len(), 1);
        for v in &k {
            let mv = m.apply(v);
            assert!(mv.iter().all(|x| x.is_zero()));
        }
        assert_eq!(k[0], vec![s(1), s(-2), s(1)]);
    }

    #[test]
    fn image_keeps_pivot_columns() {
        let m = Matrix::from_int_rows(&[&[1, 2], &[2, 4]]);
        let im = image_basis(&m);
        assert_eq!(im.dim(), 1);
        assert_eq!(im.basis().column(0), vec![s(1), s(2)]);
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let a = Matrix::from_int_rows(&[&[2, 0], &[0, 3]]);
        let b = Matrix::from_int_rows(&[&[1], &[1]]);
        let x = solve(&a, &b).unwrap();
        assert_eq!(x.column(0), vec![Scalar::ratio(1, 2), Scalar::ratio(1, 3)]);

        let a2 = Matrix::from_int_rows(&[&[1, 1], &[2, 2]]);
        let b2 = Matrix::from_int_rows(&[&[1], &[3]]);
        assert!(matches!(solve(&a2, &b2), Err(Error::Inconsistent)));
    }

    #[test]
    fn quotient_line_in_plane() {
        // span{(1,1)} inside K^2: quotient has dimension 1 and the projection
        // kills (1,1).
        let sub = Subspace::new(Matrix::from_int_rows(&[&[1], &[1]])).unwrap();
        let inside = Subspace::full(2);
        let (dim, proj) = quotient_data(&sub, &inside).unwrap();
        assert_eq!(dim, 1);
        let killed = proj.apply(&[s(1), s(1)]);
        assert!(killed.iter().all(|x| x.is_zero()));
        let seen = proj.apply(&[s(1), s(0)]);
        assert!(seen.iter().any(|x| !x.is_zero()));
    }

    #[test]
    fn quotient_rejects_outside_vectors() {
        let sub = Subspace::new(Matrix::from_int_rows(&[&[1], &[0], &[0]])).unwrap();
        let inside = Subspace::new(Matrix::from_int_rows(&[&[0, 0], &[1, 0], &[0, 1]])).unwrap();
        match quotient_data(&sub, &inside) {
            Err(Error::NotContained { column }) => assert_eq!(column, 0),
            other => panic!("expected NotContained, got {other:?}"),
        }
    }

    #[test]
    fn quotient_by_zero_and_by_everything() {
        let inside = Subspace::full(3);
        let (dim, _) = quotient_data(&Subspace::zero(3), &inside).unwrap();
        assert_eq!(dim, 3);
        let (dim2, proj2) = quotient_data(&inside.clone(), &inside).unwrap();
        assert_eq!(dim2, 0);
        assert_eq!(proj2.rows(), 0);
    }

    #[test]
    fn rational_entries_exact() {
        let mut m = Matrix::zero(1, 2);
        m.set(0, 0, Scalar::ratio(1, 3));
        m.set(0, 1, Scalar::ratio(1, 6));
        // ker: x/3 + y/6 = 0 -> y = -2x: canonical (1, -2).
        let k = kernel_basis(&m);
        assert_eq!(k, vec![vec![s(1), s(-2)]]);
    }

    #[test]
    fn char_poly_of_small_matrices() {
        // det(t - 2) = t - 2.
        assert_eq!(char_poly(&Matrix::from_int_rows(&[&[2]])), vec![s(-2), s(1)]);
        // Rotation has t^2 + 1.
        let rot = Matrix::from_int_rows(&[&[0, 1], &[-1, 0]]);
        assert_eq!(char_poly(&rot), vec![s(1), s(0), s(1)]);
        // diag(1, 1, 5): (t-1)^2 (t-5) = t^3 - 7t^2 + 11t - 5.
        let d = Matrix::from_int_rows(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 5]]);
        assert_eq!(char_poly(&d), vec![s(-5), s(11), s(-7), s(1)]);
        // Empty matrix: the empty product is 1.
        assert_eq!(char_poly(&Matrix::zero(0, 0)), vec![s(1)]);
    }

    #[test]
    fn rational_roots_with_multiplicity() {
        // (t-1)^2 (t-5).
        let (roots, residual) = rational_roots(&[s(-5), s(11), s(-7), s(1)]);
        assert_eq!(roots, vec![(s(1), 2), (s(5), 1)]);
        assert_eq!(residual, 0);
        // t^2 (t + 1/2): roots 0, 0, -1/2.
        let (roots, residual) =
            rational_roots(&[s(0), s(0), Scalar::ratio(1, 2), s(1)]);
        assert_eq!(roots, vec![(Scalar::ratio(-1, 2), 1), (s(0), 2)]);
        assert_eq!(residual, 0);
        // t^2 - 2 has no rational roots.
        let (roots, residual) = rational_roots(&[s(-2), s(0), s(1)]);
        assert!(roots.is_empty());
        assert_eq!(residual, 2);
        // (t^2 + 1)(t - 3): only the rational factor comes off.
        let (roots, residual) = rational_roots(&[s(-3), s(1), s(-3), s(1)]);
        assert_eq!(roots, vec![(s(3), 1)]);
        assert_eq!(residual, 2);
        // Constants and the zero polynomial have no roots.
        assert_eq!(rational_roots(&[s(4)]), (vec![], 0));
        assert_eq!(rational_roots(&[]), (vec![], 0));
        assert_eq!(rational_roots(&[s(0), s(0)]), (vec![], 0));
    }

    #[test]
    fn eigenvalues_of_a_non_diagonal_matrix() {
        // [[2, 1], [1, 2]] has eigenvalues 1 and 3.
        let m = Matrix::from_int_rows(&[&[2, 1], &[1, 2]]);
        let (roots, residual) = rational_roots(&char_poly(&m));
        assert_eq!(roots, vec![(s(1), 1), (s(3), 1)]);
        assert_eq!(residual, 0);
    }
}
