//! Exact integer/rational linear algebra for symmetric bilinear forms.
//!
//! Everything here is computed over `BigInt`/`BigRational`; there is no
//! floating point and hence no tolerance anywhere. The services offered are
//! the ones lattice theory needs: inertia (signature), the radical, the
//! determinant and the Smith normal form of the Gram matrix, and the
//! invariant factors of the discriminant group.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Exact rational scalar used throughout the crate.
///
/// Values are kept in lowest terms with a positive denominator by the
/// underlying representation.
pub type BigRat = BigRational;

/// An integer symmetric bilinear form, stored as a dense Gram matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SymmetricForm {
    n: usize,
    entries: Vec<BigInt>,
}

/// Inertia counts of a symmetric form: positive, negative and zero
/// eigenvalue multiplicities.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Signature {
    pub n_plus: usize,
    pub n_minus: usize,
    pub n_zero: usize,
}

impl Signature {
    pub fn rank(&self) -> usize {
        self.n_plus + self.n_minus
    }
}

/// The discriminant group of a nondegenerate integral lattice, as its
/// invariant factor decomposition. Factors are >= 2 and each divides the
/// next; trivial factors are dropped, so the unimodular case is empty.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DiscriminantGroup {
    factors: Vec<BigInt>,
}

impl DiscriminantGroup {
    pub fn from_factors(factors: Vec<BigInt>) -> Result<Self> {
        for w in factors.windows(2) {
            if !(&w[1] % &w[0]).is_zero() {
                return Err(Error::InvalidInput(
                    "invariant factors must form a divisibility chain".into(),
                ));
            }
        }
        if factors.iter().any(|f| *f < BigInt::from(2)) {
            return Err(Error::InvalidInput("invariant factors must be >= 2".into()));
        }
        Ok(Self { factors })
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.factors
    }

    /// Group order, i.e. the absolute determinant of the lattice.
    pub fn order(&self) -> BigInt {
        self.factors.iter().product()
    }

    /// Number of invariant factors divisible by the prime `p`.
    pub fn p_length(&self, p: u64) -> Result<usize> {
        if !crate::arith::is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        let p = BigInt::from(p);
        Ok(self.factors.iter().filter(|f| (*f % &p).is_zero()).count())
    }
}

impl SymmetricForm {
    /// Build a form from a row-major entry vector, checking symmetry.
    pub fn new(n: usize, entries: Vec<BigInt>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: entries.len(),
            });
        }
        let form = Self { n, entries };
        for i in 0..n {
            for j in 0..i {
                if form.entry(i, j) != form.entry(j, i) {
                    return Err(Error::NotSymmetric { i, j });
                }
            }
        }
        Ok(form)
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            entries.extend(row.iter().map(|&x| BigInt::from(x)));
        }
        Self::new(n, entries)
    }

    pub fn zero(n: usize) -> Self {
        Self {
            n,
            entries: vec![BigInt::zero(); n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.n + j]
    }

    pub fn set_entry(&mut self, i: usize, j: usize, value: BigInt) {
        self.entries[i * self.n + j] = value.clone();
        self.entries[j * self.n + i] = value;
    }

    /// Orthogonal direct sum of two forms.
    pub fn direct_sum(&self, other: &SymmetricForm) -> SymmetricForm {
        let n = self.n + other.n;
        let mut sum = SymmetricForm::zero(n);
        for i in 0..self.n {
            for j in 0..self.n {
                sum.entries[i * n + j] = self.entry(i, j).clone();
            }
        }
        for i in 0..other.n {
            for j in 0..other.n {
                sum.entries[(self.n + i) * n + (self.n + j)] = other.entry(i, j).clone();
            }
        }
        sum
    }

    /// The induced form on the subset of indices `keep` (in the given order).
    pub fn restrict(&self, keep: &[usize]) -> SymmetricForm {
        let m = keep.len();
        let mut entries = Vec::with_capacity(m * m);
        for &i in keep {
            for &j in keep {
                entries.push(self.entry(i, j).clone());
            }
        }
        SymmetricForm { n: m, entries }
    }

    /// Matrix-vector product `G·x`.
    pub fn apply(&self, x: &[BigInt]) -> Result<Vec<BigInt>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok((0..self.n)
            .map(|i| (0..self.n).map(|j| self.entry(i, j) * &x[j]).sum())
            .collect())
    }

    /// Bilinear value `xᵀ·G·y`.
    pub fn pair(&self, x: &[BigInt], y: &[BigInt]) -> Result<BigInt> {
        let gy = self.apply(y)?;
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok(x.iter().zip(&gy).map(|(a, b)| a * b).sum())
    }

    /// Gram matrix of rational vectors with respect to this form. Fails if
    /// some pairing is not an integer.
    pub fn gram_of_vectors(&self, vectors: &[Vec<BigRat>]) -> Result<SymmetricForm> {
        let m = vectors.len();
        let mut entries = Vec::with_capacity(m * m);
        for x in vectors {
            for y in vectors {
                if x.len() != self.n || y.len() != self.n {
                    return Err(Error::DimensionMismatch {
                        expected: self.n,
                        got: x.len().max(y.len()),
                    });
                }
                let mut acc = BigRat::zero();
                for i in 0..self.n {
                    for j in 0..self.n {
                        acc += &x[i] * &y[j] * BigRat::from(self.entry(i, j).clone());
                    }
                }
                if !acc.is_integer() {
                    return Err(Error::InvalidInput(format!(
                        "pairing {acc} is not integral"
                    )));
                }
                entries.push(acc.to_integer());
            }
        }
        SymmetricForm::new(m, entries)
    }

    /// Inertia of the form, computed by exact symmetric Gaussian reduction.
    ///
    /// The reduction pivots on nonzero diagonal entries; when every
    /// remaining diagonal entry vanishes but an off-diagonal one does not,
    /// that 2x2 block is hyperbolic and contributes one positive and one
    /// negative direction.
    pub fn signature(&self) -> Signature {
        let n = self.n;
        let mut m: Vec<BigRat> = self
            .entries
            .iter()
            .map(|e| BigRat::from(e.clone()))
            .collect();
        let at = |m: &[BigRat], i: usize, j: usize| m[i * n + j].clone();
        let mut active: Vec<usize> = (0..n).collect();
        let mut sig = Signature {
            n_plus: 0,
            n_minus: 0,
            n_zero: 0,
        };
        while !active.is_empty() {
            // Diagonal pivot: first active index with a nonzero diagonal.
            if let Some(pos) = active.iter().position(|&i| !m[i * n + i].is_zero()) {
                let p = active.remove(pos);
                let d = at(&m, p, p);
                if d.is_positive() {
                    sig.n_plus += 1;
                } else {
                    sig.n_minus += 1;
                }
                for &k in &active {
                    let f = at(&m, k, p) / &d;
                    if f.is_zero() {
                        continue;
                    }
                    for &l in &active {
                        let upd = &f * at(&m, p, l);
                        m[k * n + l] -= upd;
                    }
                }
                // Zero out the eliminated row/column against future reads.
                for &k in &active {
                    m[k * n + p] = BigRat::zero();
                    m[p * n + k] = BigRat::zero();
                }
                continue;
            }
            // All diagonals vanish; look for a hyperbolic 2x2 block.
            let mut block = None;
            'outer: for (pi, &i) in active.iter().enumerate() {
                for &j in active.iter().skip(pi + 1) {
                    if !m[i * n + j].is_zero() {
                        block = Some((i, j));
                        break 'outer;
                    }
                }
            }
            let Some((i, j)) = block else {
                sig.n_zero += active.len();
                break;
            };
            let a = at(&m, i, j);
            sig.n_plus += 1;
            sig.n_minus += 1;
            active.retain(|&k| k != i && k != j);
            for &k in &active {
                let ki = at(&m, k, i);
                let kj = at(&m, k, j);
                if ki.is_zero() && kj.is_zero() {
                    continue;
                }
                for &l in &active {
                    let upd = (&ki * at(&m, j, l) + &kj * at(&m, i, l)) / &a;
                    m[k * n + l] -= upd;
                }
            }
            for &k in &active {
                m[k * n + i] = BigRat::zero();
                m[i * n + k] = BigRat::zero();
                m[k * n + j] = BigRat::zero();
                m[j * n + k] = BigRat::zero();
            }
        }
        debug_assert_eq!(sig.n_plus + sig.n_minus + sig.n_zero, n);
        sig
    }

    /// A saturated integral basis of the radical `{x : G·x = 0}`.
    ///
    /// The basis comes from the right transform of the Smith normal form, so
    /// its Z-span is the full kernel sublattice and every vector is
    /// primitive. Vectors are sign-normalized (first nonzero entry positive).
    pub fn kernel_basis(&self) -> Vec<Vec<BigInt>> {
        let (diag, q) = smith_with_right_transform(self.n, &self.entries);
        let mut basis = Vec::new();
        for (t, d) in diag.iter().enumerate() {
            if d.is_zero() {
                let mut col: Vec<BigInt> = (0..self.n).map(|r| q[r * self.n + t].clone()).collect();
                if let Some(first) = col.iter().find(|x| !x.is_zero()) {
                    if first.is_negative() {
                        for x in col.iter_mut() {
                            *x = -x.clone();
                        }
                    }
                }
                basis.push(col);
            }
        }
        basis
    }

    /// Solve `G·x = rhs` exactly over the rationals, if consistent.
    ///
    /// Gauss–Jordan with columns pivoted left to right; free variables are
    /// set to zero, so the representative is deterministic.
    pub fn solve(&self, rhs: &[BigInt]) -> Result<Option<Vec<BigRat>>> {
        let n = self.n;
        if rhs.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: rhs.len(),
            });
        }
        let mut m: Vec<Vec<BigRat>> = (0..n)
            .map(|i| {
                (0..=n)
                    .map(|j| {
                        if j < n {
                            BigRat::from(self.entry(i, j).clone())
                        } else {
                            BigRat::from(rhs[i].clone())
                        }
                    })
                    .collect()
            })
            .collect();
        let mut pivot_of_col: Vec<Option<usize>> = vec![None; n];
        let mut row = 0;
        for col in 0..n {
            let Some(p) = (row..n).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(row, p);
            let inv = m[row][col].clone();
            for j in col..=n {
                m[row][j] = &m[row][j] / &inv;
            }
            for r in 0..n {
                if r != row && !m[r][col].is_zero() {
                    let f = m[r][col].clone();
                    for j in col..=n {
                        let upd = &f * &m[row][j];
                        m[r][j] -= upd;
                    }
                }
            }
            pivot_of_col[col] = Some(row);
            row += 1;
            if row == n {
                break;
            }
        }
        for r in row..n {
            if !m[r][n].is_zero() {
                return Ok(None);
            }
        }
        let mut x = vec![BigRat::zero(); n];
        for (col, pivot) in pivot_of_col.iter().enumerate() {
            if let Some(r) = pivot {
                x[col] = m[*r][n].clone();
            }
        }
        Ok(Some(x))
    }

    /// Determinant by fraction-free Bareiss elimination.
    pub fn determinant(&self) -> BigInt {
        let n = self.n;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.entries.clone();
        let mut sign = 1i64;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[k * n + k].is_zero() {
                // Pivot search below row k.
                match (k + 1..n).find(|&r| !m[r * n + k].is_zero()) {
                    Some(r) => {
                        for c in 0..n {
                            m.swap(k * n + c, r * n + c);
                        }
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &m[i * n + j] * &m[k * n + k] - &m[i * n + k] * &m[k * n + j];
                    m[i * n + j] = num / &prev;
                }
            }
            prev = m[k * n + k].clone();
        }
        let det = m[(n - 1) * n + (n - 1)].clone();
        if sign < 0 {
            -det
        } else {
            det
        }
    }

    /// Invariant factors of `coker(G : Zⁿ → Zⁿ)` for a nondegenerate form.
    pub fn smith_form(&self) -> Result<DiscriminantGroup> {
        let (diag, _) = smith_with_right_transform(self.n, &self.entries);
        if diag.iter().any(|d| d.is_zero()) {
            return Err(Error::DegenerateForm);
        }
        let factors: Vec<BigInt> = diag.into_iter().filter(|d| !d.is_one()).collect();
        DiscriminantGroup::from_factors(factors)
    }
}

/// Smith normal form of an n x n integer matrix, returning the diagonal
/// (nonnegative, divisibility-chained, zeros last) and the right transform
/// `Q` such that the column relation `A·Q = P⁻¹·S` holds; columns of `Q`
/// over zero diagonal entries are a saturated kernel basis.
fn smith_with_right_transform(n: usize, entries: &[BigInt]) -> (Vec<BigInt>, Vec<BigInt>) {
    let mut a = entries.to_vec();
    let mut q = vec![BigInt::zero(); n * n];
    for i in 0..n {
        q[i * n + i] = BigInt::one();
    }

    let swap_rows = |a: &mut Vec<BigInt>, r1: usize, r2: usize| {
        for c in 0..n {
            a.swap(r1 * n + c, r2 * n + c);
        }
    };
    let swap_cols = |a: &mut Vec<BigInt>, q: &mut Vec<BigInt>, c1: usize, c2: usize| {
        for r in 0..n {
            a.swap(r * n + c1, r * n + c2);
            q.swap(r * n + c1, r * n + c2);
        }
    };

    let mut t = 0;
    while t < n {
        // Find the active entry with minimal absolute value.
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..n {
            for j in t..n {
                if a[i * n + j].is_zero() {
                    continue;
                }
                match pivot {
                    None => pivot = Some((i, j)),
                    Some((pi, pj)) => {
                        if a[i * n + j].abs() < a[pi * n + pj].abs() {
                            pivot = Some((i, j));
                        }
                    }
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        if pi != t {
            swap_rows(&mut a, pi, t);
        }
        if pj != t {
            swap_cols(&mut a, &mut q, pj, t);
        }

        loop {
            let mut clean = true;
            for i in t + 1..n {
                if a[i * n + t].is_zero() {
                    continue;
                }
                let f = rounded_div(&a[i * n + t], &a[t * n + t]);
                if !f.is_zero() {
                    for c in t..n {
                        let upd = &f * &a[t * n + c];
                        a[i * n + c] -= upd;
                    }
                }
                if !a[i * n + t].is_zero() {
                    // Remainder smaller than the pivot: promote it.
                    swap_rows(&mut a, i, t);
                    clean = false;
                }
            }
            for j in t + 1..n {
                if a[t * n + j].is_zero() {
                    continue;
                }
                let f = rounded_div(&a[t * n + j], &a[t * n + t]);
                if !f.is_zero() {
                    for r in 0..n {
                        let upd = &f * &a[r * n + t];
                        a[r * n + j] -= upd;
                        let updq = &f * &q[r * n + t];
                        q[r * n + j] -= updq;
                    }
                }
                if !a[t * n + j].is_zero() {
                    swap_cols(&mut a, &mut q, j, t);
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        t += 1;
    }

    let mut diag: Vec<BigInt> = (0..n).map(|i| a[i * n + i].abs()).collect();
    // Enforce the divisibility chain among nonzero entries; this permutes
    // and merges factors only, so kernel positions are untouched.
    let nz = diag.iter().filter(|d| !d.is_zero()).count();
    loop {
        let mut changed = false;
        for i in 0..nz {
            for j in i + 1..nz {
                if !(&diag[j] % &diag[i]).is_zero() {
                    let g = diag[i].gcd(&diag[j]);
                    let l = &diag[i] / &g * &diag[j];
                    diag[i] = g;
                    diag[j] = l;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    (diag, q)
}

/// Quotient of `a` by `b` rounded to the nearest integer (ties toward
/// zero); keeps Smith-form remainders small.
fn rounded_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    if r.abs() * 2u8 > b.abs() {
        if (a.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(rows: &[Vec<i64>]) -> SymmetricForm {
        SymmetricForm::from_rows(rows).unwrap()
    }

    #[test]
    fn signature_single_root() {
        let s = form(&[vec![-2]]).signature();
        assert_eq!((s.n_plus, s.n_minus, s.n_zero), (0, 1, 0));
    }

    #[test]
    fn signature_affine_a1() {
        let s = form(&[vec![-2, 2], vec![2, -2]]).signature();
        assert_eq!((s.n_plus, s.n_minus, s.n_zero), (0, 1, 1));
    }

    #[test]
    fn signature_hyperbolic_triple() {
        // Sign counts frozen from the characteristic polynomial
        // x^3 + 6x^2 + 6x - 8 via Descartes' rule (all roots real).
        let s = form(&[vec![-2, 2, 1], vec![2, -2, 1], vec![1, 1, -2]]).signature();
        assert_eq!((s.n_plus, s.n_minus, s.n_zero), (1, 2, 0));
    }

    #[test]
    fn signature_zero_diagonal_block() {
        let s = form(&[vec![0, 1], vec![1, 0]]).signature();
        assert_eq!((s.n_plus, s.n_minus, s.n_zero), (1, 1, 0));
        let s = form(&[vec![0, 3, 0], vec![3, 0, 1], vec![0, 1, 0]]).signature();
        assert_eq!(s.n_plus + s.n_minus + s.n_zero, 3);
    }

    #[test]
    fn kernel_affine_a1() {
        let k = form(&[vec![-2, 2], vec![2, -2]]).kernel_basis();
        assert_eq!(k, vec![vec![BigInt::from(1), BigInt::from(1)]]);
    }

    #[test]
    fn kernel_nondegenerate_is_empty() {
        assert!(form(&[vec![-2]]).kernel_basis().is_empty());
    }

    #[test]
    fn kernel_affine_a2_cycle() {
        let g = form(&[vec![-2, 1, 1], vec![1, -2, 1], vec![1, 1, -2]]);
        let k = g.kernel_basis();
        assert_eq!(k.len(), 1);
        assert_eq!(k[0], vec![BigInt::from(1); 3]);
        let gv = g.apply(&k[0]).unwrap();
        assert!(gv.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn determinant_matches_smith_order() {
        let a2 = form(&[vec![-2, 1], vec![1, -2]]);
        assert_eq!(a2.determinant(), BigInt::from(3));
        let dg = a2.smith_form().unwrap();
        assert_eq!(dg.invariant_factors(), &[BigInt::from(3)]);
        assert_eq!(dg.order(), BigInt::from(3));
    }

    #[test]
    fn smith_of_hyperbolic_plane_is_trivial() {
        let u = form(&[vec![0, 1], vec![1, 0]]);
        assert!(u.smith_form().unwrap().invariant_factors().is_empty());
    }

    #[test]
    fn smith_rejects_degenerate() {
        let g = form(&[vec![-2, 2], vec![2, -2]]);
        assert!(matches!(g.smith_form(), Err(Error::DegenerateForm)));
    }

    #[test]
    fn p_length_counts_divisible_factors() {
        let dg = DiscriminantGroup::from_factors(vec![BigInt::from(2), BigInt::from(14)]).unwrap();
        assert_eq!(dg.p_length(7).unwrap(), 1);
        let dg = DiscriminantGroup::from_factors(vec![BigInt::from(2), BigInt::from(4)]).unwrap();
        assert_eq!(dg.p_length(7).unwrap(), 0);
        let dg = DiscriminantGroup::from_factors(vec![BigInt::from(3), BigInt::from(9)]).unwrap();
        assert_eq!(dg.p_length(3).unwrap(), 2);
    }

    #[test]
    fn kernel_dimension_matches_signature() {
        let grams: Vec<Vec<Vec<i64>>> = vec![
            vec![vec![-2, 2], vec![2, -2]],
            vec![vec![-2, 1, 1], vec![1, -2, 1], vec![1, 1, -2]],
            vec![vec![0, 0], vec![0, 0]],
            vec![vec![-2, 1], vec![1, -2]],
        ];
        for rows in grams {
            let g = form(&rows);
            let sig = g.signature();
            let k = g.kernel_basis();
            assert_eq!(sig.n_zero, k.len());
            for v in &k {
                assert!(g.apply(v).unwrap().iter().all(|x| x.is_zero()));
            }
        }
    }

    #[test]
    fn rejects_asymmetric_input() {
        let r = SymmetricForm::from_rows(&[vec![0, 1], vec![2, 0]]);
        assert!(matches!(r, Err(Error::NotSymmetric { .. })));
    }
}
