//! Dense integer and rational matrices with the normal forms used
//! throughout: column-style Hermite normal form, Smith normal form with
//! unimodular transforms, fraction-free determinants and exact solving.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Dense matrix over the integers, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl std::fmt::Debug for Mat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[BigInt]) {
        assert_eq!(v.len(), self.rows);
        for i in 0..self.rows {
            self[(i, j)] = v[i].clone();
        }
    }

    /// Horizontal concatenation [self | other].
    pub fn hcat(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows);
        let mut m = Mat::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        let mut m = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = a * &other[(k, j)];
                    m[(i, j)] += t;
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| &self[(i, j)] * &v[j]).sum())
            .collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut m = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// col_b += q * col_a
    fn addmul_col(&mut self, b: usize, a: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let t = &self[(i, a)] * q;
            self[(i, b)] += t;
        }
    }

    /// row_b += q * row_a
    fn addmul_row(&mut self, b: usize, a: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let t = &self[(a, j)] * q;
            self[(b, j)] += t;
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let t = -self[(i, j)].clone();
            self[(i, j)] = t;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let t = -self[(i, j)].clone();
            self[(i, j)] = t;
        }
    }

    /// Inverse of a matrix with determinant ±1.
    pub fn inv_unimodular(&self) -> Mat {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let q = QMat::from_rows(
            (0..n)
                .map(|i| (0..n).map(|j| BigRational::from_integer(self[(i, j)].clone())).collect())
                .collect(),
        );
        let mut out = Mat::zeros(n, n);
        for j in 0..n {
            let mut e = vec![BigRational::zero(); n];
            e[j] = BigRational::one();
            let col = q.solve(&e).expect("unimodular matrix is invertible");
            for i in 0..n {
                assert!(col[i].denom().is_one(), "matrix is not unimodular");
                out[(i, j)] = col[i].numer().clone();
            }
        }
        out
    }

    /// Fraction-free determinant (Bareiss). Panics unless square.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a[(i, k)].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let t = &a[(k, k)] * &a[(i, j)] - &a[(i, k)] * &a[(k, j)];
                    a[(i, j)] = &t / &prev;
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * a[(n - 1, n - 1)].clone()
    }
}

/// Column Hermite normal form of the lattice spanned by the columns of `a`.
///
/// Returns the echelon matrix `h` (same row count, `rank` columns) together
/// with the pivot row of each column. Pivot entries are positive, entries to
/// the right of a pivot are reduced into `[0, pivot)`, and in the full-rank
/// square case `h` is upper triangular with positive diagonal.
pub fn hnf(a: &Mat) -> (Mat, Vec<usize>) {
    let mut w = a.clone();
    let n = w.rows;
    let mut pivots: Vec<usize> = Vec::new();
    // `hi` is the exclusive upper bound on columns still in play.
    let mut hi = w.cols;
    for row in (0..n).rev() {
        if hi == 0 {
            break;
        }
        // Gcd-out the entries of `row` across columns 0..hi.
        loop {
            let mut best: Option<usize> = None;
            for j in 0..hi {
                if !w[(row, j)].is_zero() {
                    best = match best {
                        None => Some(j),
                        Some(b) => {
                            if w[(row, j)].abs() < w[(row, b)].abs() {
                                Some(j)
                            } else {
                                Some(b)
                            }
                        }
                    };
                }
            }
            let Some(p) = best else { break };
            // Reduce every other column in play by column p.
            let mut done = true;
            for j in 0..hi {
                if j == p || w[(row, j)].is_zero() {
                    continue;
                }
                let q = -(&w[(row, j)] / &w[(row, p)]);
                w.addmul_col(j, p, &q);
                if !w[(row, j)].is_zero() {
                    done = false;
                }
            }
            if done {
                w.swap_cols(p, hi - 1);
                if w[(row, hi - 1)].is_negative() {
                    w.negate_col(hi - 1);
                }
                pivots.push(row);
                hi -= 1;
                break;
            }
        }
    }
    pivots.reverse();
    // Keep only the pivot columns hi..cols, in order.
    let rank = pivots.len();
    let mut h = Mat::zeros(n, rank);
    for (out, j) in (hi..w.cols).enumerate() {
        for i in 0..n {
            h[(i, out)] = w[(i, j)].clone();
        }
    }
    // Reduce entries to the right of each pivot, highest pivot row first
    // so later reductions do not disturb finished rows.
    for jp in (0..rank).rev() {
        let prow = pivots[jp];
        for j in jp + 1..rank {
            let q = -h[(prow, j)].div_euclid(&h[(prow, jp)]);
            h.addmul_col(j, jp, &q);
        }
    }
    (h, pivots)
}

/// Express `v` in terms of the columns of an HNF matrix, if it lies in the
/// lattice they span. `pivots[j]` is the pivot row of column `j`.
pub fn hnf_solve(h: &Mat, pivots: &[usize], v: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(h.rows, v.len());
    let mut rem: Vec<BigInt> = v.to_vec();
    let mut coeff = vec![BigInt::zero(); h.cols];
    for j in (0..h.cols).rev() {
        let p = pivots[j];
        if !(&rem[p] % &h[(p, j)]).is_zero() {
            return None;
        }
        let q = &rem[p] / &h[(p, j)];
        for i in 0..h.rows {
            let t = &h[(i, j)] * &q;
            rem[i] -= t;
        }
        coeff[j] = q;
    }
    if rem.iter().all(|x| x.is_zero()) {
        Some(coeff)
    } else {
        None
    }
}

/// Integer kernel of `m`: columns spanning {x : m x = 0}.
pub fn kernel(m: &Mat) -> Mat {
    let f = snf(m);
    let k = m.rows.min(m.cols);
    let mut free_cols = Vec::new();
    for j in 0..m.cols {
        if j >= k || f.s[(j, j)].is_zero() {
            free_cols.push(j);
        }
    }
    let mut out = Mat::zeros(m.cols, free_cols.len());
    for (t, &j) in free_cols.iter().enumerate() {
        for i in 0..m.cols {
            out[(i, t)] = f.v[(i, j)].clone();
        }
    }
    out
}

/// Solve `m x = rhs` over the integers via the Smith normal form; None when
/// no integral solution exists.
pub fn solve_linear(m: &Mat, rhs: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(m.rows, rhs.len());
    let f = snf(m);
    let ur = f.u.mul_vec(rhs);
    let k = m.rows.min(m.cols);
    let mut w = vec![BigInt::zero(); m.cols];
    for i in 0..m.rows {
        if i < k && !f.s[(i, i)].is_zero() {
            let (q, r) = num_integer::Integer::div_rem(&ur[i], &f.s[(i, i)]);
            if !r.is_zero() {
                return None;
            }
            w[i] = q;
        } else if !ur[i].is_zero() {
            return None;
        }
    }
    Some(f.v.mul_vec(&w))
}

/// Smith normal form: unimodular `u`, `v` with `u * a * v = s`, `s` diagonal
/// with each diagonal entry dividing the next, all nonnegative.
pub struct Snf {
    pub u: Mat,
    pub s: Mat,
    pub v: Mat,
}

/// Invariant factors off the diagonal of `s`, including trailing zeros.
pub fn snf_diagonal(s: &Mat) -> Vec<BigInt> {
    (0..s.rows.min(s.cols)).map(|i| s[(i, i)].clone()).collect()
}

pub fn snf(a: &Mat) -> Snf {
    let mut s = a.clone();
    let mut u = Mat::identity(s.rows);
    let mut v = Mat::identity(s.cols);
    let n = s.rows.min(s.cols);
    let mut t = 0;
    while t < n {
        // Pivot: nonzero entry of minimal absolute value in the trailing
        // submatrix, ties broken by lowest (row, col).
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..s.rows {
            for j in t..s.cols {
                if s[(i, j)].is_zero() {
                    continue;
                }
                pivot = match pivot {
                    None => Some((i, j)),
                    Some((pi, pj)) => {
                        if s[(i, j)].abs() < s[(pi, pj)].abs() {
                            Some((i, j))
                        } else {
                            Some((pi, pj))
                        }
                    }
                };
            }
        }
        let Some((pi, pj)) = pivot else { break };
        s.swap_rows(t, pi);
        u.swap_rows(t, pi);
        s.swap_cols(t, pj);
        v.swap_cols(t, pj);

        let mut clean = true;
        for i in t + 1..s.rows {
            if s[(i, t)].is_zero() {
                continue;
            }
            let q = -(&s[(i, t)] / &s[(t, t)]);
            s.addmul_row(i, t, &q);
            u.addmul_row(i, t, &q);
            if !s[(i, t)].is_zero() {
                clean = false;
            }
        }
        for j in t + 1..s.cols {
            if s[(t, j)].is_zero() {
                continue;
            }
            let q = -(&s[(t, j)] / &s[(t, t)]);
            s.addmul_col(j, t, &q);
            v.addmul_col(j, t, &q);
            if !s[(t, j)].is_zero() {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        // Divisibility: fold in any entry the pivot does not divide.
        let mut offender = None;
        'scan: for i in t + 1..s.rows {
            for j in t + 1..s.cols {
                if !(&s[(i, j)] % &s[(t, t)]).is_zero() {
                    offender = Some(i);
                    break 'scan;
                }
            }
        }
        if let Some(i) = offender {
            s.addmul_row(t, i, &BigInt::one());
            u.addmul_row(t, i, &BigInt::one());
            continue;
        }
        if s[(t, t)].is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    Snf { u, s, v }
}

/// Dense matrix over the rationals, used for integral-basis changes.
#[derive(Clone, Debug)]
pub struct QMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigRational>,
}

impl std::ops::Index<(usize, usize)> for QMat {
    type Output = BigRational;
    fn index(&self, (i, j): (usize, usize)) -> &BigRational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigRational {
        &mut self.data[i * self.cols + j]
    }
}

impl QMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMat { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        QMat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn det(&self) -> BigRational {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut det = BigRational::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !a[(i, k)].is_zero()) else {
                return BigRational::zero();
            };
            if p != k {
                for j in 0..n {
                    let t = a[(p, j)].clone();
                    a[(p, j)] = a[(k, j)].clone();
                    a[(k, j)] = t;
                }
                det = -det;
            }
            det *= a[(k, k)].clone();
            let inv = a[(k, k)].recip();
            for j in k..n {
                a[(k, j)] = &a[(k, j)] * &inv;
            }
            for i in k + 1..n {
                if a[(i, k)].is_zero() {
                    continue;
                }
                let f = a[(i, k)].clone();
                for j in k..n {
                    let t = &a[(k, j)] * &f;
                    a[(i, j)] -= t;
                }
            }
        }
        det
    }

    /// Solve `self * x = b` exactly. Panics unless square; `None` if singular.
    pub fn solve(&self, b: &[BigRational]) -> Option<Vec<BigRational>> {
        assert_eq!(self.rows, self.cols);
        assert_eq!(b.len(), self.rows);
        let n = self.rows;
        let mut a = self.clone();
        let mut rhs = b.to_vec();
        for k in 0..n {
            let p = (k..n).find(|&i| !a[(i, k)].is_zero())?;
            if p != k {
                for j in 0..n {
                    let t = a[(p, j)].clone();
                    a[(p, j)] = a[(k, j)].clone();
                    a[(k, j)] = t;
                }
                rhs.swap(p, k);
            }
            let inv = a[(k, k)].recip();
            for j in k..n {
                a[(k, j)] = &a[(k, j)] * &inv;
            }
            rhs[k] = &rhs[k] * &inv;
            for i in 0..n {
                if i == k || a[(i, k)].is_zero() {
                    continue;
                }
                let f = a[(i, k)].clone();
                for j in k..n {
                    let t = &a[(k, j)] * &f;
                    a[(i, j)] -= t;
                }
                let t = &rhs[k] * &f;
                rhs[i] -= t;
            }
        }
        Some(rhs)
    }
}

/// Euclidean-style division helper on BigInt: floor division with
/// remainder in [0, |d|).
trait DivEuclid {
    fn div_euclid(&self, d: &BigInt) -> BigInt;
}

impl DivEuclid for BigInt {
    fn div_euclid(&self, d: &BigInt) -> BigInt {
        let (q, r) = num_integer::Integer::div_rem(self, d);
        if r.is_negative() {
            if d.is_negative() {
                q + 1
            } else {
                q - 1
            }
        } else {
            q
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn mat2(rows: &[&[i64]]) -> Mat {
        Mat::from_i64(rows)
    }

    #[test]
    fn det_small() {
        let a = mat2(&[&[2, 4], &[6, 8]]);
        assert_eq!(a.det(), BigInt::from(-8));
        let b = mat2(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]]);
        assert_eq!(b.det(), BigInt::from(-3));
    }

    #[test]
    fn hnf_square_upper_triangular() {
        let a = mat2(&[&[2, 4, 4], &[-6, 6, 12], &[10, 4, 16]]);
        let (h, pivots) = hnf(&a);
        assert_eq!(pivots, vec![0, 1, 2]);
        for i in 0..3 {
            assert!(h[(i, i)].is_positive());
            for j in 0..i {
                assert!(h[(i, j)].is_zero());
            }
            for j in i + 1..3 {
                assert!(!h[(i, j)].is_negative() && h[(i, j)] < h[(i, i)]);
            }
        }
        // Lattice determinant is preserved up to sign.
        let dh: BigInt = (0..3).map(|i| h[(i, i)].clone()).product();
        assert_eq!(dh, a.det().abs());
    }

    #[test]
    fn hnf_membership() {
        let a = mat2(&[&[2, 0], &[0, 3]]);
        let (h, p) = hnf(&a);
        assert!(hnf_solve(&h, &p, &[BigInt::from(4), BigInt::from(-3)]).is_some());
        assert!(hnf_solve(&h, &p, &[BigInt::from(1), BigInt::from(0)]).is_none());
    }

    #[test]
    fn snf_examples() {
        // Identity stays the identity.
        let snf1 = snf(&Mat::identity(3));
        assert_eq!(snf_diagonal(&snf1.s), vec![BigInt::one(); 3]);

        // Invariant factors (2, 4).
        let a = mat2(&[&[2, 4], &[6, 8]]);
        let r = snf(&a);
        assert_eq!(
            snf_diagonal(&r.s).iter().map(|x| x.to_i64().unwrap()).collect::<Vec<_>>(),
            vec![2, 4]
        );
        assert_eq!(r.u.mul(&a).mul(&r.v), r.s);
        assert_eq!(r.u.det().abs(), BigInt::one());
        assert_eq!(r.v.det().abs(), BigInt::one());

        // Zero matrix: all invariant factors zero (free of rank 2).
        let z = Mat::zeros(2, 2);
        let rz = snf(&z);
        assert_eq!(snf_diagonal(&rz.s), vec![BigInt::zero(), BigInt::zero()]);
    }

    #[test]
    fn qmat_solve_and_det() {
        use num_bigint::BigInt as Z;
        let q = |n: i64, d: i64| BigRational::new(Z::from(n), Z::from(d));
        let a = QMat::from_rows(vec![vec![q(1, 1), q(1, 2)], vec![q(0, 1), q(1, 2)]]);
        assert_eq!(a.det(), q(1, 2));
        let x = a.solve(&[q(2, 1), q(1, 1)]).unwrap();
        assert_eq!(x, vec![q(1, 1), q(2, 1)]);
    }
}
