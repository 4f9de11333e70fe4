//! Exact integer linear algebra.
//!
//! Everything here works over arbitrary-precision integers. The main entry
//! points are [`smith_normal_form`], [`hermite_normal_form`], [`determinant`]
//! and [`solve_in_lattice`]; [`IntegerSolver`] caches a Smith decomposition so
//! repeated solves against one matrix are cheap.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from rows of machine integers. Panics on ragged input.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        assert!(
            rows.iter().all(|row| row.as_ref().len() == c),
            "ragged rows"
        );
        Self::from_fn(r, c, |i, j| BigInt::from(rows[i].as_ref()[j]))
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(dim: usize, cols: &[Vec<BigInt>]) -> Self {
        assert!(cols.iter().all(|c| c.len() == dim), "ragged columns");
        Self::from_fn(dim, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn diagonal(entries: &[BigInt]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, d) in entries.iter().enumerate() {
            m[(i, i)] = d.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * k).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "vector length");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(BigInt::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += k * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        for j in 0..self.cols {
            let v = &self.data[src * self.cols + j] * k;
            self.data[dst * self.cols + j] += v;
        }
    }

    /// col[dst] += k * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        for i in 0..self.rows {
            let v = &self.data[i * self.cols + src] * k;
            self.data[i * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let x = &mut self.data[i * self.cols + j];
            *x = -std::mem::take(x);
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let x = &mut self.data[i * self.cols + j];
            *x = -std::mem::take(x);
        }
    }

    /// Replaces columns (a, b) by (a*x + b*y, a*z + b*w).
    fn combine_cols(&mut self, a: usize, b: usize, x: &BigInt, y: &BigInt, z: &BigInt, w: &BigInt) {
        for i in 0..self.rows {
            let ca = self.data[i * self.cols + a].clone();
            let cb = self.data[i * self.cols + b].clone();
            self.data[i * self.cols + a] = &ca * x + &cb * y;
            self.data[i * self.cols + b] = &ca * z + &cb * w;
        }
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;

    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;

    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions");
        IntMatrix::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).fold(BigInt::zero(), |acc, k| acc + &self[(i, k)] * &rhs[(k, j)])
        })
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            write!(f, "[{}]", row.join(", "))?;
            if i + 1 < self.rows {
                write!(f, ", ")?;
            }
        }
        write!(f, "]")
    }
}

/// Converts machine integers to a big-integer vector.
pub fn big_vec(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// Result of [`smith_normal_form`]: `u * m * v` is diagonal with entries `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub v: IntMatrix,
    /// Invariant factors, `min(rows, cols)` of them, nonnegative, each
    /// dividing the next; zeros sit at the tail.
    pub d: Vec<BigInt>,
}

impl SmithDecomposition {
    /// Number of nonzero invariant factors.
    pub fn rank(&self) -> usize {
        self.d.iter().take_while(|x| !x.is_zero()).count()
    }

    /// The diagonal matrix `u * m * v` with the shape of the input.
    pub fn diagonal_matrix(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.u.rows(), self.v.cols());
        for (i, d) in self.d.iter().enumerate() {
            m[(i, i)] = d.clone();
        }
        m
    }
}

/// Smith normal form with unimodular transforms.
///
/// Pivots on the smallest-magnitude nonzero entry of the remaining block and
/// sweeps its row and column until the pivot divides everything left.
pub fn smith_normal_form(m: &IntMatrix) -> SmithDecomposition {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let steps = rows.min(cols);

    for t in 0..steps {
        loop {
            let Some((pi, pj)) = smallest_nonzero(&a, t) else {
                // remaining block is zero
                let d = (0..steps).map(|i| a[(i, i)].clone()).collect();
                return SmithDecomposition { u, v, d };
            };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let pivot = a[(t, t)].clone();
            let mut clean = true;
            for i in t + 1..rows {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let k = -(&a[(i, t)] / &pivot);
                a.add_row_multiple(i, t, &k);
                u.add_row_multiple(i, t, &k);
                clean &= a[(i, t)].is_zero();
            }
            for j in t + 1..cols {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let k = -(&a[(t, j)] / &pivot);
                a.add_col_multiple(j, t, &k);
                v.add_col_multiple(j, t, &k);
                clean &= a[(t, j)].is_zero();
            }
            if !clean {
                continue;
            }

            let bad_row =
                (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[(i, j)].is_multiple_of(&pivot)));
            match bad_row {
                Some(i) => {
                    // pull a non-multiple into row t; the next sweep shrinks the pivot
                    let one = BigInt::one();
                    a.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if a[(t, t)].is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
    }

    let d = (0..steps).map(|i| a[(i, i)].clone()).collect();
    SmithDecomposition { u, v, d }
}

fn smallest_nonzero(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..a.rows() {
        for j in t..a.cols() {
            let x = &a[(i, j)];
            if x.is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| x.magnitude() < a[(bi, bj)].magnitude()) {
                best = Some((i, j));
            }
        }
    }
    best
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn determinant(m: &IntMatrix) -> Result<BigInt> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[(k, k)].is_zero() {
            match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                Some(i) => {
                    a.swap_rows(k, i);
                    sign = -sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let val = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                a[(i, j)] = val;
            }
        }
        prev = a[(k, k)].clone();
    }
    Ok(sign * &a[(n - 1, n - 1)])
}

/// Column-style Hermite normal form of a square nonsingular matrix.
///
/// Returns `h = m * w` for some unimodular `w`, with `h` lower triangular,
/// positive diagonal, and `0 <= h[i][j] < h[i][i]` for `j < i`. The columns of
/// `h` span the same lattice as the columns of `m`, and `h` is unique for that
/// lattice.
pub fn hermite_normal_form(m: &IntMatrix) -> Result<IntMatrix> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let mut h = m.clone();
    for i in 0..n {
        for j in i + 1..n {
            if h[(i, j)].is_zero() {
                continue;
            }
            let a = h[(i, i)].clone();
            let b = h[(i, j)].clone();
            let eg = a.extended_gcd(&b);
            // [x  -b/g]
            // [y   a/g]  has determinant 1
            let (x, y) = (eg.x, eg.y);
            let z = -(&b / &eg.gcd);
            let w = &a / &eg.gcd;
            h.combine_cols(i, j, &x, &y, &z, &w);
        }
        if h[(i, i)].is_zero() {
            return Err(Error::Singular);
        }
        if h[(i, i)].is_negative() {
            h.negate_col(i);
        }
        let piv = h[(i, i)].clone();
        for j in 0..i {
            let k = -h[(i, j)].div_floor(&piv);
            if !k.is_zero() {
                h.add_col_multiple(j, i, &k);
            }
        }
    }
    Ok(h)
}

/// Solves integer systems `a * x = b` against one fixed matrix.
#[derive(Clone, Debug)]
pub struct IntegerSolver {
    cols: usize,
    snf: SmithDecomposition,
}

impl IntegerSolver {
    pub fn new(a: &IntMatrix) -> Self {
        Self {
            cols: a.cols(),
            snf: smith_normal_form(a),
        }
    }

    pub fn decomposition(&self) -> &SmithDecomposition {
        &self.snf
    }

    /// Some integer solution, or `None` when the system has none.
    pub fn solve(&self, b: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(b.len(), self.snf.u.rows(), "right-hand side length");
        let c = self.snf.u.mul_vec(b);
        let mut z = vec![BigInt::zero(); self.cols];
        for (i, ci) in c.iter().enumerate() {
            let d = self.snf.d.get(i);
            match d {
                Some(d) if !d.is_zero() => {
                    let (q, r) = ci.div_rem(d);
                    if !r.is_zero() {
                        return None;
                    }
                    z[i] = q;
                }
                _ => {
                    if !ci.is_zero() {
                        return None;
                    }
                }
            }
        }
        Some(self.snf.v.mul_vec(&z))
    }

    /// Basis of the integer kernel (columns of `v` past the rank).
    pub fn kernel_basis(&self) -> Vec<Vec<BigInt>> {
        let rank = self.snf.rank();
        (rank..self.cols).map(|j| self.snf.v.column(j)).collect()
    }
}

/// A full-rank sublattice of `Z^N`, stored by an explicit basis.
#[derive(Clone, Debug)]
pub struct Lattice {
    basis: IntMatrix,
    coords: IntegerSolver,
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.basis == other.basis
    }
}

impl Lattice {
    /// `basis` is `N x r` with linearly independent columns.
    pub fn from_basis(basis: IntMatrix) -> Result<Self> {
        let coords = IntegerSolver::new(&basis);
        if coords.decomposition().rank() != basis.cols() {
            return Err(Error::DegenerateBasis);
        }
        Ok(Self { basis, coords })
    }

    pub fn full(n: usize) -> Self {
        Self::from_basis(IntMatrix::identity(n)).expect("identity basis")
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn basis_vector(&self, j: usize) -> Vec<BigInt> {
        self.basis.column(j)
    }

    /// Coordinates of `v` in the lattice basis, `None` if `v` is not a member.
    pub fn coordinates(&self, v: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
        if v.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                got: v.len(),
            });
        }
        Ok(self.coords.solve(v))
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        matches!(self.coordinates(v), Ok(Some(_)))
    }

    pub fn to_ambient(&self, coords: &[BigInt]) -> Vec<BigInt> {
        self.basis.mul_vec(coords)
    }

    /// Matrix of an ambient endomorphism in lattice coordinates.
    pub fn restrict(&self, m: &IntMatrix) -> Result<IntMatrix> {
        let n = self.ambient_dim();
        if m.rows() != n || m.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: m.rows(),
            });
        }
        let cols = (0..self.rank())
            .map(|j| {
                let image = m.mul_vec(&self.basis_vector(j));
                self.coordinates(&image)?.ok_or(Error::NotStabilizing)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(IntMatrix::from_columns(self.rank(), &cols))
    }
}

/// Decides whether `m * x = v` has a solution `x` in `lattice`.
///
/// `m` acts on the ambient space and must map the lattice into itself; `v`
/// must be a lattice vector. The system is rewritten in lattice coordinates
/// and solved exactly there.
pub fn solve_in_lattice(
    m: &IntMatrix,
    v: &[BigInt],
    lattice: &Lattice,
) -> Result<Option<Vec<BigInt>>> {
    let rhs = lattice.coordinates(v)?.ok_or(Error::NotInLattice)?;
    let restricted = lattice.restrict(m)?;
    let solver = IntegerSolver::new(&restricted);
    Ok(solver.solve(&rhs).map(|x| lattice.to_ambient(&x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn check_snf(m: &IntMatrix) -> SmithDecomposition {
        let s = smith_normal_form(m);
        assert_eq!(&(&s.u * m) * &s.v, s.diagonal_matrix());
        assert_eq!(determinant(&s.u).unwrap().abs(), b(1));
        assert_eq!(determinant(&s.v).unwrap().abs(), b(1));
        for w in s.d.windows(2) {
            if w[1].is_zero() {
                continue;
            }
            assert!(!w[0].is_zero(), "zero before nonzero");
            assert!(w[1].is_multiple_of(&w[0]));
        }
        assert!(s.d.iter().all(|x| !x.is_negative()));
        s
    }

    /// Cofactor expansion along the first row; test oracle only.
    fn cofactor_det(m: &[Vec<i64>]) -> i64 {
        let n = m.len();
        if n == 1 {
            return m[0][0];
        }
        (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(k, _)| k != j)
                            .map(|(_, &x)| x)
                            .collect()
                    })
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * cofactor_det(&minor)
            })
            .sum()
    }

    #[test]
    fn snf_identity_and_coprime_diagonal() {
        let s = check_snf(&IntMatrix::identity(2));
        assert_eq!(s.d, vec![b(1), b(1)]);
        let s = check_snf(&IntMatrix::from_rows(&[[2, 0], [0, 3]]));
        assert_eq!(s.d, vec![b(1), b(6)]);
    }

    #[test]
    fn snf_b2_coxeter_q2() {
        // W: (x1, x2) -> (-x2, x1); M = 2W - I
        let m = [vec![-1, -2], vec![2, -1]];
        assert_eq!(cofactor_det(&m).abs(), 5);
        // exhaustive index: count residues of Z^2 modulo M Z^2 in a 5x5 box
        // via the membership test v in M Z^2 <=> M^{-1} v integral
        let mut reps: Vec<(i64, i64)> = Vec::new();
        for x in 0..5 {
            for y in 0..5 {
                let fresh = reps.iter().all(|&(a, c)| {
                    let (dx, dy) = (x - a, y - c);
                    // M^{-1} = adj(M)/det, det = 5
                    let (p, q) = (-dx + 2 * dy, -2 * dx - dy);
                    p % 5 != 0 || q % 5 != 0
                });
                if fresh {
                    reps.push((x, y));
                }
            }
        }
        assert_eq!(reps.len(), 5);
        let s = check_snf(&IntMatrix::from_rows(&m));
        assert_eq!(s.d, vec![b(1), b(5)]);
    }

    #[test]
    fn snf_rectangular_and_zero() {
        let s = check_snf(&IntMatrix::from_rows(&[
            [2, 4, 4],
            [-6, 6, 12],
            [10, -4, -16],
        ]));
        assert_eq!(s.d, vec![b(2), b(6), b(12)]);
        let s = check_snf(&IntMatrix::zeros(2, 3));
        assert_eq!(s.d, vec![b(0), b(0)]);
        let s = check_snf(&IntMatrix::from_rows(&[[1, 2], [2, 4], [3, 6]]));
        assert_eq!(s.d, vec![b(1), b(0)]);
    }

    #[test]
    fn determinant_basics() {
        assert_eq!(determinant(&IntMatrix::identity(4)).unwrap(), b(1));
        assert_eq!(
            determinant(&IntMatrix::from_rows(&[[2, 0], [0, 3]])).unwrap(),
            b(6)
        );
        assert_eq!(
            determinant(&IntMatrix::zeros(2, 3)),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        );
        assert_eq!(
            determinant(&IntMatrix::from_rows(&[[0, 1], [1, 0]])).unwrap(),
            b(-1)
        );
    }

    #[test]
    fn determinant_of_b_coxeter_minus_identity() {
        // q W - I for the signed cycle (x1..xn) -> (-xn, x1, .., x_{n-1})
        for n in 2..=6usize {
            for q in [2i64, 3, 5] {
                let mut m = vec![vec![0i64; n]; n];
                for i in 0..n {
                    m[i][i] = -1;
                }
                m[0][n - 1] = -q;
                for i in 1..n {
                    m[i][i - 1] = q;
                }
                let oracle = cofactor_det(&m);
                assert_eq!(oracle.abs(), q.pow(n as u32) + 1);
                let det = determinant(&IntMatrix::from_rows(&m)).unwrap();
                assert_eq!(det, b(oracle));
            }
        }
    }

    #[test]
    fn hnf_is_canonical() {
        let m = IntMatrix::from_rows(&[[-1, -2], [2, -1]]);
        let h = hermite_normal_form(&m).unwrap();
        assert_eq!(h[(0, 1)], b(0));
        assert!(h[(0, 0)].is_positive() && h[(1, 1)].is_positive());
        assert_eq!(&h[(0, 0)] * &h[(1, 1)], b(5));
        // same lattice after a unimodular column change
        let w = IntMatrix::from_rows(&[[1, 3], [0, 1]]);
        assert_eq!(hermite_normal_form(&(&m * &w)).unwrap(), h);
        assert_eq!(
            hermite_normal_form(&IntMatrix::from_rows(&[[1, 2], [2, 4]])),
            Err(Error::Singular)
        );
    }

    #[test]
    fn lattice_membership_and_solve() {
        // sum-even lattice in Z^2, basis e1 - e2, 2 e2
        let l = Lattice::from_basis(IntMatrix::from_rows(&[[1, 0], [-1, 2]])).unwrap();
        assert!(l.contains(&big_vec(&[1, 1])));
        assert!(!l.contains(&big_vec(&[1, 0])));

        let m = IntMatrix::from_rows(&[[-1, -2], [2, -1]]);
        assert_eq!(
            solve_in_lattice(&m, &big_vec(&[0, 0]), &l).unwrap(),
            Some(big_vec(&[0, 0]))
        );
        let e = big_vec(&[2, 0]);
        let me = m.mul_vec(&e);
        let x = solve_in_lattice(&m, &me, &l).unwrap().unwrap();
        assert_eq!(m.mul_vec(&x), me);
        assert_eq!(
            solve_in_lattice(&m, &big_vec(&[1, 0]), &l),
            Err(Error::NotInLattice)
        );
        let swap_sign = IntMatrix::from_rows(&[[1, 0], [0, 2]]);
        assert_eq!(
            solve_in_lattice(&swap_sign, &big_vec(&[0, 0]), &l),
            Err(Error::NotStabilizing)
        );
        assert_eq!(
            Lattice::from_basis(IntMatrix::from_rows(&[[1, 2], [1, 2]])).unwrap_err(),
            Error::DegenerateBasis
        );
    }

    #[test]
    fn b_coxeter_cannot_reach_minus_two_e1() {
        for n in 2..=6usize {
            for q in [2i64, 3, 4] {
                let m = IntMatrix::from_fn(n, n, |i, j| {
                    let mut x = 0;
                    if i == j {
                        x -= 1;
                    }
                    if i == 0 && j == n - 1 {
                        x -= q;
                    }
                    if i > 0 && j == i - 1 {
                        x += q;
                    }
                    BigInt::from(x)
                });
                let mut v = vec![0i64; n];
                v[0] = -2;
                let l = Lattice::full(n);
                assert_eq!(solve_in_lattice(&m, &big_vec(&v), &l).unwrap(), None);
            }
        }
    }

    fn small_matrix(max_dim: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1..=max_dim)
            .prop_flat_map(|n| prop::collection::vec(prop::collection::vec(-9i64..=9, n), n))
    }

    /// Rational solve by exact fraction elimination, test oracle only.
    fn rational_solve(a: &[Vec<i64>], rhs: &[i64]) -> Option<Vec<(BigInt, BigInt)>> {
        use num_rational::BigRational;
        let n = a.len();
        let mut m: Vec<Vec<BigRational>> = a
            .iter()
            .zip(rhs)
            .map(|(row, &r)| {
                row.iter()
                    .chain(std::iter::once(&r))
                    .map(|&x| BigRational::from_integer(BigInt::from(x)))
                    .collect()
            })
            .collect();
        for c in 0..n {
            let p = (c..n).find(|&i| !m[i][c].is_zero())?;
            m.swap(c, p);
            let piv = m[c][c].clone();
            for x in m[c].iter_mut() {
                *x = &*x / &piv;
            }
            for i in 0..n {
                if i != c && !m[i][c].is_zero() {
                    let f = m[i][c].clone();
                    for j in 0..=n {
                        let t = &m[c][j] * &f;
                        m[i][j] -= t;
                    }
                }
            }
        }
        Some(
            m.iter()
                .map(|row| (row[n].numer().clone(), row[n].denom().clone()))
                .collect(),
        )
    }

    proptest! {
        #[test]
        fn snf_product_is_abs_det(rows in small_matrix(4)) {
            let m = IntMatrix::from_rows(&rows);
            let s = check_snf(&m);
            let det = determinant(&m).unwrap();
            if !det.is_zero() {
                let prod = s.d.iter().fold(BigInt::one(), |acc, x| acc * x);
                prop_assert_eq!(prod, det.abs());
            }
        }

        #[test]
        fn snf_is_idempotent(rows in small_matrix(4)) {
            let s = smith_normal_form(&IntMatrix::from_rows(&rows));
            let again = smith_normal_form(&IntMatrix::diagonal(&s.d));
            prop_assert_eq!(again.d, s.d);
        }

        #[test]
        fn solve_matches_rational_oracle(rows in small_matrix(4), seed in prop::collection::vec(-20i64..=20, 4)) {
            let n = rows.len();
            let rhs = &seed[..n];
            let m = IntMatrix::from_rows(&rows);
            let got = solve_in_lattice(&m, &big_vec(rhs), &Lattice::full(n)).unwrap();
            if let Some(sol) = rational_solve(&rows, rhs) {
                let integral = sol.iter().all(|(_, d)| d.is_one());
                prop_assert_eq!(got.is_some(), integral);
            }
            if let Some(x) = got {
                prop_assert_eq!(m.mul_vec(&x), big_vec(rhs));
            }
        }

        #[test]
        fn hnf_spans_same_lattice(rows in small_matrix(3)) {
            let m = IntMatrix::from_rows(&rows);
            prop_assume!(!determinant(&m).unwrap().is_zero());
            let h = hermite_normal_form(&m).unwrap();
            let lm = Lattice::from_basis(m.clone()).unwrap();
            let lh = Lattice::from_basis(h.clone()).unwrap();
            for j in 0..m.cols() {
                prop_assert!(lh.contains(&m.column(j)));
                prop_assert!(lm.contains(&h.column(j)));
            }
        }
    }
}
