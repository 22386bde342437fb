//! Free-standing order arithmetic for fixture generation: multiplication
//! tables over a rational basis, charpoly-based integrality testing,
//! maximal-order computation by p-saturation, and prime factorization
//! above small primes via the quotient algebra. Independent of the main
//! library's validated Field type so that fixtures are produced by a
//! second code path.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use fontaine::fieldcore::Elem;
use fontaine::mat::{hnf, hnf_solve, Mat, QMat};
use fontaine::poly::IntPoly;

pub fn qz(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// An order in Q[x]/(f), presented by basis rows in the power basis.
pub struct Ord {
    pub n: usize,
    pub poly: IntPoly,
    pub basis: Vec<Vec<BigRational>>,
    table: Vec<Mat>,
    pub one: Elem,
}

impl Ord {
    pub fn new(poly: IntPoly, basis: Vec<Vec<BigRational>>) -> Ord {
        let n = poly.degree() as usize;
        assert_eq!(basis.len(), n);
        let bt = QMat::from_rows(transpose(&basis));
        let mut table = Vec::with_capacity(n);
        for i in 0..n {
            let mut ti = Mat::zeros(n, n);
            for j in 0..n {
                let prod = polymul_mod(&basis[i], &basis[j], &poly);
                let coords = bt.solve(&prod).expect("basis invertible");
                for (k, c) in coords.iter().enumerate() {
                    assert!(c.denom().is_one(), "basis is not multiplicatively closed");
                    ti[(k, j)] = c.numer().clone();
                }
            }
            table.push(ti);
        }
        let mut e0 = vec![BigRational::zero(); n];
        e0[0] = BigRational::one();
        let one_q = bt.solve(&e0).expect("basis invertible");
        let one: Elem = one_q
            .iter()
            .map(|c| {
                assert!(c.denom().is_one(), "1 not in the order");
                c.numer().clone()
            })
            .collect();
        Ord { n, poly, basis, table, one }
    }

    pub fn basis_row_power(&self, i: usize) -> Vec<BigRational> {
        self.basis[i].clone()
    }

    pub fn to_power(&self, x: &Elem) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); self.n];
        for (i, xi) in x.iter().enumerate() {
            for j in 0..self.n {
                let t = &self.basis[i][j] * BigRational::from_integer(xi.clone());
                out[j] += t;
            }
        }
        out
    }

    pub fn mul_matrix(&self, x: &Elem) -> Mat {
        let mut m = Mat::zeros(self.n, self.n);
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for r in 0..self.n {
                for c in 0..self.n {
                    let t = &self.table[i][(r, c)] * xi;
                    m[(r, c)] += t;
                }
            }
        }
        m
    }

    pub fn mul(&self, x: &Elem, y: &Elem) -> Elem {
        self.mul_matrix(x).mul_vec(y)
    }

    pub fn add(&self, x: &Elem, y: &Elem) -> Elem {
        x.iter().zip(y).map(|(a, b)| a + b).collect()
    }

    pub fn sub(&self, x: &Elem, y: &Elem) -> Elem {
        x.iter().zip(y).map(|(a, b)| a - b).collect()
    }

    pub fn neg(&self, x: &Elem) -> Elem {
        x.iter().map(|a| -a.clone()).collect()
    }

    pub fn from_int(&self, k: i64) -> Elem {
        self.one.iter().map(|c| c * BigInt::from(k)).collect()
    }

    pub fn norm(&self, x: &Elem) -> BigInt {
        self.mul_matrix(x).det()
    }

    pub fn pow(&self, x: &Elem, k: u64) -> Elem {
        let mut acc = self.one.clone();
        let mut base = x.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn is_torsion(&self, x: &Elem) -> bool {
        let mut acc = x.clone();
        for _ in 1..=30 {
            if acc == self.one {
                return true;
            }
            acc = self.mul(&acc, x);
        }
        false
    }

    pub fn torsion_order(&self, x: &Elem) -> Option<usize> {
        let mut acc = x.clone();
        for m in 1..=30 {
            if acc == self.one {
                return Some(m);
            }
            acc = self.mul(&acc, x);
        }
        None
    }

    pub fn disc(&self) -> BigInt {
        let b = QMat::from_rows(self.basis.clone());
        let det = b.det();
        let d = BigRational::from_integer(self.poly.discriminant()) * &det * &det;
        assert!(d.denom().is_one(), "order discriminant must be an integer");
        d.numer().clone()
    }

    // ----- ideals (columns = generators over Z in the order basis) -----

    pub fn ideal_from_columns(&self, cols: Mat) -> Mat {
        let (h, pivots) = hnf(&cols);
        assert_eq!(pivots, (0..self.n).collect::<Vec<_>>(), "ideal not full rank");
        h
    }

    pub fn ideal_from_generators(&self, gens: &[Elem]) -> Mat {
        let mut cols = Mat::zeros(self.n, gens.len() * self.n);
        for (g, gen) in gens.iter().enumerate() {
            let m = self.mul_matrix(gen);
            for j in 0..self.n {
                for i in 0..self.n {
                    cols[(i, g * self.n + j)] = m[(i, j)].clone();
                }
            }
        }
        self.ideal_from_columns(cols)
    }

    pub fn ideal_mul(&self, a: &Mat, b: &Mat) -> Mat {
        let mut cols = Mat::zeros(self.n, self.n * self.n);
        for ja in 0..self.n {
            let m = self.mul_matrix(&a.column(ja));
            for jb in 0..self.n {
                let prod = m.mul_vec(&b.column(jb));
                for i in 0..self.n {
                    cols[(i, ja * self.n + jb)] = prod[i].clone();
                }
            }
        }
        self.ideal_from_columns(cols)
    }

    pub fn ideal_contains(&self, a: &Mat, v: &Elem) -> bool {
        let pivots: Vec<usize> = (0..self.n).collect();
        hnf_solve(a, &pivots, v).is_some()
    }

    pub fn ideal_norm(&self, a: &Mat) -> BigInt {
        (0..self.n).map(|i| a[(i, i)].clone()).product()
    }
}

fn transpose(rows: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let n = rows.len();
    (0..n).map(|j| (0..n).map(|i| rows[i][j].clone()).collect()).collect()
}

fn polymul_mod(a: &[BigRational], b: &[BigRational], f: &IntPoly) -> Vec<BigRational> {
    let n = f.degree() as usize;
    let mut prod = vec![BigRational::zero(); 2 * n.max(1)];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            let t = ai * bj;
            prod[i + j] += t;
        }
    }
    for k in (n..prod.len()).rev() {
        let c = prod[k].clone();
        if c.is_zero() {
            continue;
        }
        prod[k] = BigRational::zero();
        for i in 0..n {
            let t = BigRational::from_integer(f.0[i].clone()) * &c;
            prod[k - n + i] -= t;
        }
    }
    prod.truncate(n);
    prod
}

/// Characteristic polynomial (monic, ascending coefficients) of the
/// element with the given power-basis coordinates, via Faddeev–LeVerrier.
pub fn charpoly_power(alpha: &[BigRational], f: &IntPoly) -> Vec<BigRational> {
    let n = f.degree() as usize;
    // Multiplication matrix on the power basis.
    let mut m = vec![vec![BigRational::zero(); n]; n];
    let mut col: Vec<BigRational> = alpha.to_vec();
    for j in 0..n {
        for i in 0..n {
            m[i][j] = col[i].clone();
        }
        // multiply by theta: shift and reduce.
        let mut next = vec![BigRational::zero(); n + 1];
        for (i, c) in col.iter().enumerate() {
            next[i + 1] = c.clone();
        }
        let top = next[n].clone();
        next[n] = BigRational::zero();
        for i in 0..n {
            let t = BigRational::from_integer(f.0[i].clone()) * &top;
            next[i] -= t;
        }
        next.truncate(n);
        col = next;
    }
    // Faddeev–LeVerrier: c_k coefficients of det(xI - M).
    let idmat = |k: usize, l: usize| if k == l { BigRational::one() } else { BigRational::zero() };
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut aux: Vec<Vec<BigRational>> = (0..n).map(|i| (0..n).map(|j| idmat(i, j)).collect()).collect();
    let mut mk: Vec<Vec<BigRational>> = aux.clone();
    for k in 1..=n {
        // mk = M * aux
        let mut next = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for l in 0..n {
                if m[i][l].is_zero() {
                    continue;
                }
                for j in 0..n {
                    let t = &m[i][l] * &aux[l][j];
                    next[i][j] += t;
                }
            }
        }
        mk = next;
        let trace: BigRational = (0..n).map(|i| mk[i][i].clone()).sum();
        let ck = -trace / BigRational::from_integer(BigInt::from(k as i64));
        coeffs[n - k] = ck.clone();
        // aux = mk + ck * I
        aux = mk.clone();
        for i in 0..n {
            aux[i][i] += &ck;
        }
    }
    let _ = mk;
    coeffs
}

pub fn is_integral(alpha: &[BigRational], f: &IntPoly) -> bool {
    charpoly_power(alpha, f).iter().all(|c| c.denom().is_one())
}

/// Maximal order of Q[x]/(f) as basis rows, by p-saturation at every
/// prime whose square divides the running discriminant.
pub fn maximal_order(f: &IntPoly) -> Vec<Vec<BigRational>> {
    let n = f.degree() as usize;
    let basis: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                .collect()
        })
        .collect();
    saturate(f, basis)
}

/// p-saturate a full-rank lattice of integral elements to the maximal
/// order containing it.
pub fn saturate(f: &IntPoly, mut basis: Vec<Vec<BigRational>>) -> Vec<Vec<BigRational>> {
    let n = f.degree() as usize;
    'outer: loop {
        let b = QMat::from_rows(basis.clone());
        let det = b.det();
        let disc = BigRational::from_integer(f.discriminant()) * &det * &det;
        assert!(disc.denom().is_one());
        let disc_int = disc.numer().abs();
        for p in small_primes_squared_dividing(&disc_int) {
            // Candidates v/p for v over F_p in the current basis.
            let pn = (p as usize).pow(n as u32);
            for code in 1..pn {
                let mut c = code;
                let mut alpha = vec![BigRational::zero(); n];
                for i in 0..n {
                    let digit = (c % p as usize) as i64;
                    c /= p as usize;
                    if digit != 0 {
                        for j in 0..n {
                            let t = &basis[i][j] * qz(digit);
                            alpha[j] += t;
                        }
                    }
                }
                for a in alpha.iter_mut() {
                    *a /= qz(p as i64);
                }
                if alpha.iter().all(|x| x.denom().is_one()) {
                    continue; // already in the lattice's rational span trivially
                }
                if is_integral(&alpha, f) && !in_lattice_pub(&basis, &alpha) {
                    basis = lattice_join_pub(&basis, &alpha);
                    continue 'outer;
                }
            }
        }
        return basis;
    }
}

fn small_primes_squared_dividing(d: &BigInt) -> Vec<u64> {
    let mut out = Vec::new();
    for p in [2u64, 3, 5, 7, 11, 13] {
        let p2 = BigInt::from(p * p);
        if (d % p2).is_zero() {
            out.push(p);
        }
    }
    out
}

pub fn in_lattice_pub(basis: &[Vec<BigRational>], v: &[BigRational]) -> bool {
    let bt = QMat::from_rows(transpose(basis));
    match bt.solve(v) {
        None => false,
        Some(coords) => coords.iter().all(|c| c.denom().is_one()),
    }
}

/// Lattice generated by the rows of `basis` together with `extra`.
pub fn lattice_join_pub(basis: &[Vec<BigRational>], extra: &[BigRational]) -> Vec<Vec<BigRational>> {
    let n = basis[0].len();
    let mut den = BigInt::one();
    for row in basis.iter().chain(std::iter::once(&extra.to_vec())) {
        for c in row {
            den = num_integer::Integer::lcm(&den, c.denom());
        }
    }
    // Integer matrix columns = all generators scaled by den.
    let mut cols = Mat::zeros(n, basis.len() + 1);
    for (j, row) in basis.iter().chain(std::iter::once(&extra.to_vec())).enumerate() {
        for i in 0..n {
            let scaled = &row[i] * BigRational::from_integer(den.clone());
            assert!(scaled.denom().is_one());
            cols[(i, j)] = scaled.numer().clone();
        }
    }
    let (h, pivots) = hnf(&cols);
    assert_eq!(pivots.len(), n, "joined lattice must stay full rank");
    (0..n)
        .map(|j| {
            (0..n)
                .map(|i| BigRational::new(h[(i, j)].clone(), den.clone()))
                .collect()
        })
        .collect()
}

/// Prime ideals of the order above p, via the maximal ideals of O/pO.
/// Returns (lattice HNF, e, f) per prime. Brute-force subspace search;
/// fine for n <= 4 and p <= 7.
pub fn primes_above(ord: &Ord, p: u64) -> Vec<(Mat, usize, usize)> {
    let n = ord.n;
    // Multiplication table mod p as vectors over F_p.
    let red = |x: &BigInt| -> u64 {
        let m = num_integer::Integer::mod_floor(x, &BigInt::from(p));
        u64::try_from(m).unwrap()
    };
    let mul_mod = |a: &[u64], b: &[u64]| -> Vec<u64> {
        let ab: Elem = {
            let av: Elem = a.iter().map(|&x| BigInt::from(x)).collect();
            let bv: Elem = b.iter().map(|&x| BigInt::from(x)).collect();
            ord.mul(&av, &bv)
        };
        ab.iter().map(|c| red(c)).collect()
    };
    let one_mod: Vec<u64> = ord.one.iter().map(|c| red(c)).collect();

    // Enumerate proper subspaces via echelon bases, keep maximal ideals.
    let mut primes: Vec<(Mat, usize, usize)> = Vec::new();
    for w in subspaces_fp(p, n) {
        let d = w.len();
        // d == 0 is the zero ideal: relevant exactly when O/pO is a field
        // (p inert). d == n is the unit ideal.
        if d == n {
            continue;
        }
        // Ideal test: basis_i * w_j stays in the span.
        let basis_vecs: Vec<Vec<u64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1 } else { 0 }).collect())
            .collect();
        let span_contains = |v: &[u64]| -> bool { reduce_against(&w, v, p).iter().all(|&x| x == 0) };
        let is_ideal = w.iter().all(|wv| {
            basis_vecs.iter().all(|bv| span_contains(&mul_mod(bv, wv)))
        });
        if !is_ideal || span_contains(&one_mod) {
            continue;
        }
        // Quotient must be a field: no zero divisors among nonzero cosets.
        let f_deg = n - d;
        let cosets = coset_reps(&w, p, n);
        let nonzero: Vec<&Vec<u64>> =
            cosets.iter().filter(|c| c.iter().any(|&x| x != 0)).collect();
        let mut field = true;
        'zd: for a in &nonzero {
            for b in &nonzero {
                if span_contains(&mul_mod(a, b)) {
                    field = false;
                    break 'zd;
                }
            }
        }
        if !field {
            continue;
        }
        // Prime lattice: pO + lifts of w.
        let mut gens: Vec<Elem> = vec![ord.from_int(p as i64)];
        for wv in &w {
            gens.push(wv.iter().map(|&x| BigInt::from(x)).collect());
        }
        let lattice = {
            let mut cols = Mat::zeros(n, gens.len() * n);
            for (g, gen) in gens.iter().enumerate() {
                let m = ord.mul_matrix(gen);
                for j in 0..n {
                    for i in 0..n {
                        cols[(i, g * n + j)] = m[(i, j)].clone();
                    }
                }
            }
            ord.ideal_from_columns(cols)
        };
        // Ramification index: largest k with pO inside the k-th power.
        let p_ideal = ord.ideal_from_generators(&[ord.from_int(p as i64)]);
        let mut e = 0usize;
        let mut power = ord.ideal_from_generators(&[ord.one.clone()]);
        loop {
            power = ord.ideal_mul(&power, &lattice);
            let inside = (0..n).all(|j| ord.ideal_contains(&power, &p_ideal.column(j)));
            if inside {
                e += 1;
                assert!(e <= n);
            } else {
                break;
            }
        }
        if primes.iter().all(|(l, _, _)| *l != lattice) {
            primes.push((lattice, e, f_deg));
        }
    }
    // Sanity: sum e*f = n and the product reproduces pO.
    let total: usize = primes.iter().map(|(_, e, f)| e * f).sum();
    assert_eq!(total, n, "prime factorization of {p} is incomplete");
    let mut prod = ord.ideal_from_generators(&[ord.one.clone()]);
    for (lat, e, _) in &primes {
        for _ in 0..*e {
            prod = ord.ideal_mul(&prod, lat);
        }
    }
    let p_ideal = ord.ideal_from_generators(&[ord.from_int(p as i64)]);
    assert_eq!(prod, p_ideal, "product of prime powers must be pO");
    primes
}

/// Reduce v against echelon basis rows over F_p; zero iff v in the span.
fn reduce_against(basis: &[Vec<u64>], v: &[u64], p: u64) -> Vec<u64> {
    let mut r: Vec<u64> = v.to_vec();
    for b in basis {
        let pivot = b.iter().position(|&x| x != 0).unwrap();
        if r[pivot] != 0 {
            let factor = r[pivot] * mod_inv(b[pivot], p) % p;
            for i in 0..r.len() {
                r[i] = (r[i] + p * p - factor * b[i] % p) % p;
            }
        }
    }
    r
}

fn coset_reps(w: &[Vec<u64>], p: u64, n: usize) -> Vec<Vec<u64>> {
    // Reduce every vector of F_p^n against w, dedupe.
    let mut seen = std::collections::BTreeSet::new();
    let total = (p as usize).pow(n as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let mut v = vec![0u64; n];
        for vi in v.iter_mut() {
            *vi = (c % p as usize) as u64;
            c /= p as usize;
        }
        let r = reduce_against(w, &v, p);
        if seen.insert(r.clone()) {
            out.push(r);
        }
    }
    out
}

/// All subspaces of F_p^n in echelon form (list of basis rows), all dims.
fn subspaces_fp(p: u64, n: usize) -> Vec<Vec<Vec<u64>>> {
    let mut out: Vec<Vec<Vec<u64>>> = vec![vec![]];
    // Grow by choosing pivot positions then free entries.
    fn rec(
        p: u64,
        n: usize,
        start: usize,
        current: &mut Vec<Vec<u64>>,
        out: &mut Vec<Vec<Vec<u64>>>,
    ) {
        for pivot in start..n {
            // New row with pivot 1 at `pivot`, zeros before, free after,
            // and zero at previous pivot columns (reduced echelon).
            let prev_pivots: Vec<usize> =
                current.iter().map(|r| r.iter().position(|&x| x != 0).unwrap()).collect();
            let free_cols: Vec<usize> =
                (pivot + 1..n).filter(|c| !prev_pivots.contains(c)).collect();
            let combos = (p as usize).pow(free_cols.len() as u32);
            for code in 0..combos {
                let mut row = vec![0u64; n];
                row[pivot] = 1;
                let mut c = code;
                for &col in &free_cols {
                    row[col] = (c % p as usize) as u64;
                    c /= p as usize;
                }
                // Clear this pivot column from previous rows to keep the
                // canonical form (not strictly necessary for spans).
                current.push(row);
                out.push(current.clone());
                rec(p, n, pivot + 1, current, out);
                current.pop();
            }
        }
    }
    let mut cur = Vec::new();
    rec(p, n, 0, &mut cur, &mut out);
    out
}

fn mod_inv(a: u64, p: u64) -> u64 {
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maximal_order_of_sqrt5() {
        // x^2 - 5: maximal order is Z[(1+√5)/2], index 2.
        let f = IntPoly::from_i64(&[-5, 0, 1]);
        let basis = maximal_order(&f);
        let ord = Ord::new(f, basis);
        assert_eq!(ord.disc(), BigInt::from(5));
    }

    #[test]
    fn charpoly_integrality() {
        let f = IntPoly::from_i64(&[-5, 0, 1]);
        // (1+θ)/2 is integral, θ/2 is not.
        assert!(is_integral(&[qz(1) / qz(2), qz(1) / qz(2)], &f));
        assert!(!is_integral(&[qz(0), qz(1) / qz(2)], &f));
    }

    #[test]
    fn primes_above_two_in_z_i() {
        // Z[i]: 2 = (1+i)^2.
        let f = IntPoly::from_i64(&[1, 0, 1]);
        let ord = Ord::new(
            f,
            vec![vec![qz(1), qz(0)], vec![qz(0), qz(1)]],
        );
        let ps = primes_above(&ord, 2);
        assert_eq!(ps.len(), 1);
        assert_eq!((ps[0].1, ps[0].2), (2, 1));
    }

    #[test]
    fn primes_above_two_split_inert() {
        // Z[w], w^2 = w + 4 (Q(√17)): 2 splits.
        let f = IntPoly::from_i64(&[-4, -1, 1]);
        let ord = Ord::new(f, vec![vec![qz(1), qz(0)], vec![qz(0), qz(1)]]);
        let ps = primes_above(&ord, 2);
        assert_eq!(ps.len(), 2);
        assert!(ps.iter().all(|(_, e, f)| *e == 1 && *f == 1));
        // Q(√5): 2 inert.
        let f5 = IntPoly::from_i64(&[-1, -1, 1]);
        let ord5 = Ord::new(f5, vec![vec![qz(1), qz(0)], vec![qz(0), qz(1)]]);
        let ps5 = primes_above(&ord5, 2);
        assert_eq!(ps5.len(), 1);
        assert_eq!((ps5[0].1, ps5[0].2), (1, 2));
    }
}
