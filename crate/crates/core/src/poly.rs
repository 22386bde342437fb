//! Exact univariate polynomial arithmetic: Sturm-sequence real root
//! isolation, resultants and discriminants, and factorization over small
//! prime fields (used to cross-check the splitting of 2).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::mat::Mat;

/// Integer polynomial, coefficients ascending (c\[0\] is the constant term).
/// Trailing zeros are trimmed; the zero polynomial is the empty vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPoly(pub Vec<BigInt>);

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly(coeffs)
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly(vec![])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; -1 for the zero polynomial.
    pub fn degree(&self) -> isize {
        self.0.len() as isize - 1
    }

    pub fn leading(&self) -> BigInt {
        self.0.last().cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.0.last().map_or(false, |c| c.is_one())
    }

    pub fn derivative(&self) -> IntPoly {
        if self.0.len() <= 1 {
            return IntPoly::zero();
        }
        IntPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn eval_q(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    pub fn eval_z(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    /// Resultant of `self` and `g` via the Sylvester matrix.
    pub fn resultant(&self, g: &IntPoly) -> BigInt {
        let n = self.degree();
        let m = g.degree();
        assert!(n >= 0 && m >= 0, "resultant of zero polynomial");
        let (n, m) = (n as usize, m as usize);
        if n == 0 {
            return num_traits::pow::pow(self.0[0].clone(), m);
        }
        if m == 0 {
            return num_traits::pow::pow(g.0[0].clone(), n);
        }
        let size = n + m;
        let mut s = Mat::zeros(size, size);
        for row in 0..m {
            for (k, c) in self.0.iter().rev().enumerate() {
                s[(row, row + k)] = c.clone();
            }
        }
        for row in 0..n {
            for (k, c) in g.0.iter().rev().enumerate() {
                s[(m + row, row + k)] = c.clone();
            }
        }
        s.det()
    }

    /// Discriminant of a monic polynomial.
    pub fn discriminant(&self) -> BigInt {
        assert!(self.is_monic());
        let n = self.degree();
        assert!(n >= 1);
        if n == 1 {
            return BigInt::one();
        }
        let res = self.resultant(&self.derivative());
        let sign = if (n * (n - 1) / 2) % 2 == 0 { 1 } else { -1 };
        BigInt::from(sign) * res
    }

    /// Cauchy bound: all real roots lie in (-b, b).
    pub fn root_bound(&self) -> BigRational {
        let lc = self.leading().abs();
        let mut m = BigRational::zero();
        for c in &self.0[..self.0.len() - 1] {
            let r = BigRational::new(c.abs(), lc.clone());
            if r > m {
                m = r;
            }
        }
        m + BigRational::one()
    }
}

/// Rational polynomial used inside Sturm sequences.
#[derive(Clone, Debug)]
struct QPoly(Vec<BigRational>);

impl QPoly {
    fn from_int(p: &IntPoly) -> Self {
        QPoly(p.0.iter().map(|c| BigRational::from_integer(c.clone())).collect())
    }

    fn trim(&mut self) {
        while self.0.last().map_or(false, |c| c.is_zero()) {
            self.0.pop();
        }
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    fn rem(&self, d: &QPoly) -> QPoly {
        let mut r = self.clone();
        r.trim();
        let dd = d.0.len();
        assert!(dd > 0);
        let lead = d.0.last().unwrap();
        while r.0.len() >= dd {
            let k = r.0.len() - dd;
            let f = r.0.last().unwrap() / lead;
            for i in 0..dd {
                let t = &d.0[i] * &f;
                r.0[k + i] -= t;
            }
            r.0.pop();
            r.trim();
        }
        r
    }
}

/// Sturm chain of a squarefree integer polynomial.
pub struct Sturm {
    chain: Vec<QPoly>,
    pub poly: IntPoly,
}

impl Sturm {
    pub fn new(f: &IntPoly) -> Self {
        let mut chain = vec![QPoly::from_int(f), QPoly::from_int(&f.derivative())];
        chain[0].trim();
        chain[1].trim();
        loop {
            let k = chain.len();
            if chain[k - 1].is_zero() {
                chain.pop();
                break;
            }
            let mut r = chain[k - 2].rem(&chain[k - 1]);
            if r.is_zero() {
                break;
            }
            for c in r.0.iter_mut() {
                *c = -c.clone();
            }
            chain.push(r);
        }
        Sturm { chain, poly: f.clone() }
    }

    fn variations(&self, x: &BigRational) -> usize {
        let mut count = 0;
        let mut last = 0i8;
        for p in &self.chain {
            let v = p.eval(x);
            let s = if v.is_zero() {
                0
            } else if v.is_positive() {
                1
            } else {
                -1
            };
            if s != 0 {
                if last != 0 && s != last {
                    count += 1;
                }
                last = s;
            }
        }
        count
    }

    /// Number of distinct real roots in the half-open interval (a, b].
    pub fn count_roots(&self, a: &BigRational, b: &BigRational) -> usize {
        assert!(a < b);
        self.variations(a) - self.variations(b)
    }
}

/// Closed isolating interval for one real root: the root is the unique root
/// in (lo, hi), and neither endpoint is a root.
#[derive(Clone, Debug, PartialEq)]
pub struct RootInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

/// Isolate all real roots of a squarefree polynomial, ascending.
pub fn isolate_real_roots(f: &IntPoly) -> Vec<RootInterval> {
    assert!(f.degree() >= 1);
    if f.degree() == 1 {
        // Root is -c0/c1; pad by 1 on each side.
        let r = BigRational::new(-f.0[0].clone(), f.0[1].clone());
        return vec![RootInterval { lo: &r - BigRational::one(), hi: &r + BigRational::one() }];
    }
    let sturm = Sturm::new(f);
    let b = f.root_bound();
    let mut stack = vec![(-b.clone(), b.clone())];
    let mut found: Vec<RootInterval> = Vec::new();
    while let Some((lo, hi)) = stack.pop() {
        let n = sturm.count_roots(&lo, &hi);
        if n == 0 {
            continue;
        }
        if n == 1 {
            found.push(RootInterval { lo, hi });
            continue;
        }
        let two = BigRational::from_integer(BigInt::from(2));
        let mut mid = (&lo + &hi) / &two;
        // Irreducible inputs of degree >= 2 have no rational roots, but be
        // safe for general squarefree callers: nudge off a root hit.
        while f.eval_q(&mid).is_zero() {
            mid = (&lo + &mid) / &two;
        }
        stack.push((lo, mid.clone()));
        stack.push((mid, hi));
    }
    found.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap());
    found
}

/// Halve an isolating interval around its root.
pub fn refine(f: &IntPoly, iv: &RootInterval) -> RootInterval {
    let two = BigRational::from_integer(BigInt::from(2));
    let mut mid = (&iv.lo + &iv.hi) / &two;
    while f.eval_q(&mid).is_zero() {
        // Rational root: return a degenerate-but-valid shrink around it.
        let quarter = (&iv.hi - &iv.lo) / BigRational::from_integer(BigInt::from(4));
        return RootInterval { lo: &mid - &quarter, hi: mid + quarter };
    }
    let flo = f.eval_q(&iv.lo);
    let fmid = f.eval_q(&mid);
    if (flo.is_negative() && fmid.is_negative()) || (flo.is_positive() && fmid.is_positive()) {
        RootInterval { lo: mid, hi: iv.hi.clone() }
    } else {
        RootInterval { lo: iv.lo.clone(), hi: mid }
    }
}

/// Certified sign of `p` at the algebraic number isolated by `iv` as a root
/// of `f`. Requires gcd(p, f) = 1 at that root (i.e. p does not vanish
/// there), which holds whenever f is irreducible and p is nonzero mod f.
pub fn sign_at_root(p: &IntPoly, f: &IntPoly, iv: &RootInterval) -> i32 {
    assert!(!p.is_zero());
    if p.degree() == 0 {
        return if p.0[0].is_positive() { 1 } else { -1 };
    }
    let sturm_p = Sturm::new(&p.squarefree_part());
    let mut cur = iv.clone();
    loop {
        // If p has no root in (lo, hi] and p(hi) != 0, its sign is constant
        // on the whole interval, which contains the target root.
        let phi = p.eval_q(&cur.hi);
        if !phi.is_zero() && sturm_p.count_roots(&cur.lo, &cur.hi) == 0 {
            return if phi.is_positive() { 1 } else { -1 };
        }
        cur = refine(f, &cur);
    }
}

impl IntPoly {
    /// f / gcd(f, f'), primitive part. Used to make Sturm inputs squarefree.
    pub fn squarefree_part(&self) -> IntPoly {
        if self.degree() <= 1 {
            return self.clone();
        }
        // Rational gcd via the Euclidean algorithm, then clear denominators.
        let mut a = QPoly::from_int(self);
        let mut b = QPoly::from_int(&self.derivative());
        a.trim();
        b.trim();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if a.0.len() <= 1 {
            return self.clone();
        }
        // Divide self by the gcd (monicized) over Q; result has integer
        // content up to a rational scalar; normalize to primitive integer.
        let lead = a.0.last().unwrap().clone();
        let g: Vec<BigRational> = a.0.iter().map(|c| c / &lead).collect();
        let mut num = QPoly::from_int(self);
        let gq = QPoly(g);
        // Long division num / gq.
        let mut quot = vec![BigRational::zero(); num.0.len() - gq.0.len() + 1];
        let dd = gq.0.len();
        while num.0.len() >= dd && !num.is_zero() {
            let k = num.0.len() - dd;
            let f = num.0.last().unwrap().clone();
            quot[k] = f.clone();
            for i in 0..dd {
                let t = &gq.0[i] * &f;
                num.0[k + i] -= t;
            }
            num.0.pop();
            num.trim();
        }
        // Clear denominators.
        let mut denlcm = BigInt::one();
        for c in &quot {
            denlcm = num_integer::Integer::lcm(&denlcm, c.denom());
        }
        let ints: Vec<BigInt> = quot
            .iter()
            .map(|c| c.numer() * (&denlcm / c.denom()))
            .collect();
        let mut content = BigInt::zero();
        for c in &ints {
            content = num_integer::Integer::gcd(&content, c);
        }
        if content.is_zero() {
            return self.clone();
        }
        IntPoly::new(ints.iter().map(|c| c / &content).collect())
    }
}

/// Polynomial over F_p for small p, coefficients in [0, p).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModPoly {
    pub p: u64,
    pub coeffs: Vec<u64>,
}

impl ModPoly {
    pub fn new(p: u64, mut coeffs: Vec<u64>) -> Self {
        for c in coeffs.iter_mut() {
            *c %= p;
        }
        while coeffs.last().map_or(false, |&c| c == 0) {
            coeffs.pop();
        }
        ModPoly { p, coeffs }
    }

    pub fn from_int(p: u64, f: &IntPoly) -> Self {
        let pi = BigInt::from(p);
        ModPoly::new(
            p,
            f.0.iter()
                .map(|c| {
                    let r = num_integer::Integer::mod_floor(c, &pi);
                    u64::try_from(r).unwrap()
                })
                .collect(),
        )
    }

    pub fn degree(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn monic(&self) -> ModPoly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = mod_inv(*self.coeffs.last().unwrap(), self.p);
        ModPoly::new(self.p, self.coeffs.iter().map(|&c| c * inv % self.p).collect())
    }

    pub fn mul(&self, other: &ModPoly) -> ModPoly {
        if self.is_zero() || other.is_zero() {
            return ModPoly::new(self.p, vec![]);
        }
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + a * b) % self.p;
            }
        }
        ModPoly::new(self.p, out)
    }

    pub fn rem(&self, d: &ModPoly) -> ModPoly {
        assert!(!d.is_zero());
        let mut r = self.clone();
        let dd = d.coeffs.len();
        let lead_inv = mod_inv(*d.coeffs.last().unwrap(), self.p);
        while r.coeffs.len() >= dd {
            let k = r.coeffs.len() - dd;
            let f = *r.coeffs.last().unwrap() * lead_inv % self.p;
            for i in 0..dd {
                let t = d.coeffs[i] * f % self.p;
                r.coeffs[k + i] = (r.coeffs[k + i] + self.p - t) % self.p;
            }
            while r.coeffs.last().map_or(false, |&c| c == 0) {
                r.coeffs.pop();
            }
        }
        r
    }

    pub fn gcd(&self, other: &ModPoly) -> ModPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> ModPoly {
        if self.coeffs.len() <= 1 {
            return ModPoly::new(self.p, vec![]);
        }
        ModPoly::new(
            self.p,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * (i as u64 % self.p) % self.p)
                .collect(),
        )
    }

    pub fn is_squarefree(&self) -> bool {
        let g = self.gcd(&self.derivative());
        g.degree() == 0
    }

    /// Irreducible factors with multiplicity, by exhaustive trial division.
    /// Intended for tiny p and degree.
    pub fn factor(&self) -> Vec<(ModPoly, usize)> {
        let mut out: Vec<(ModPoly, usize)> = Vec::new();
        let mut rest = self.monic();
        let mut d = 1usize;
        while rest.degree() > 0 {
            if 2 * d > rest.degree() as usize {
                out.push((rest.clone(), 1));
                break;
            }
            let mut hit = false;
            for cand in monic_polys(self.p, d) {
                if !is_irreducible_small(&cand) {
                    continue;
                }
                let mut mult = 0;
                while rest.degree() > 0 && rest.rem(&cand).is_zero() {
                    rest = divide_exact(&rest, &cand);
                    mult += 1;
                }
                if mult > 0 {
                    out.push((cand, mult));
                    hit = true;
                }
            }
            let _ = hit;
            d += 1;
        }
        out.sort_by_key(|(f, _)| (f.degree(), f.coeffs.clone()));
        out
    }
}

fn divide_exact(a: &ModPoly, d: &ModPoly) -> ModPoly {
    let mut r = a.clone();
    let dd = d.coeffs.len();
    let lead_inv = mod_inv(*d.coeffs.last().unwrap(), a.p);
    let mut q = vec![0u64; r.coeffs.len() - dd + 1];
    while r.coeffs.len() >= dd {
        let k = r.coeffs.len() - dd;
        let f = *r.coeffs.last().unwrap() * lead_inv % a.p;
        q[k] = f;
        for i in 0..dd {
            let t = d.coeffs[i] * f % a.p;
            r.coeffs[k + i] = (r.coeffs[k + i] + a.p - t) % a.p;
        }
        while r.coeffs.last().map_or(false, |&c| c == 0) {
            r.coeffs.pop();
        }
    }
    assert!(r.is_zero(), "not an exact division");
    ModPoly::new(a.p, q)
}

fn monic_polys(p: u64, d: usize) -> Vec<ModPoly> {
    let total = (p as usize).pow(d as u32);
    let mut out = Vec::with_capacity(total);
    for mut k in 0..total {
        let mut coeffs = Vec::with_capacity(d + 1);
        for _ in 0..d {
            coeffs.push((k % p as usize) as u64);
            k /= p as usize;
        }
        coeffs.push(1);
        out.push(ModPoly::new(p, coeffs));
    }
    out
}

fn is_irreducible_small(f: &ModPoly) -> bool {
    let d = f.degree();
    if d <= 0 {
        return false;
    }
    if d == 1 {
        return true;
    }
    for e in 1..=(d as usize / 2) {
        for g in monic_polys(f.p, e) {
            if f.rem(&g).is_zero() {
                return false;
            }
        }
    }
    true
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // p is prime and small; Fermat.
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

/// Decide irreducibility over Q for a monic integer polynomial: mod-p
/// factor degree patterns first, then an exhaustive Mignotte-bounded
/// search for monic factors of the degrees the patterns leave open.
pub fn irreducible_over_q(f: &IntPoly) -> bool {
    let n = f.degree();
    if n <= 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let disc = f.discriminant();
    if disc.is_zero() {
        return false;
    }
    // possible[d] = a proper factor of degree d has not yet been excluded.
    let n = n as usize;
    let mut possible = vec![true; n];
    possible[0] = false;
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73,
        79, 83, 89, 97]
    {
        if (&disc % BigInt::from(p)).is_zero() {
            continue;
        }
        let fp = ModPoly::from_int(p, f);
        if fp.degree() != f.degree() {
            continue;
        }
        let degs: Vec<usize> = fp.factor().iter().map(|(g, m)| {
            assert_eq!(*m, 1);
            g.degree() as usize
        }).collect();
        // Subset sums achievable from this pattern.
        let mut reach = vec![false; n + 1];
        reach[0] = true;
        for d in degs {
            for s in (0..=n - d).rev() {
                if reach[s] {
                    reach[s + d] = true;
                }
            }
        }
        for d in 1..n {
            if !reach[d] {
                possible[d] = false;
            }
        }
        if possible[1..].iter().all(|&b| !b) {
            return true;
        }
    }
    // Any factorization has a monic factor of degree at most n/2; search
    // those degrees exhaustively.
    for d in 1..=n / 2 {
        if possible[d] && find_monic_factor(f, d).is_some() {
            return false;
        }
    }
    true
}

/// Exhaustive search for a monic integer factor of degree d, coefficients
/// bounded by Mignotte: |g_k| <= binom(d, k) * ||f||_2.
fn find_monic_factor(f: &IntPoly, d: usize) -> Option<IntPoly> {
    if d == 1 {
        // Integer roots divide the constant term.
        let c0 = &f.0[0];
        if c0.is_zero() {
            return Some(IntPoly::from_i64(&[0, 1]));
        }
        let lim = c0.abs();
        let mut t = -lim.clone();
        while t <= lim {
            if !t.is_zero() && (c0 % &t).is_zero() && f.eval_z(&t).is_zero() {
                return Some(IntPoly::new(vec![-t, BigInt::one()]));
            }
            t += 1;
        }
        return None;
    }
    // ||f||_2 bound on the Mahler measure.
    let norm2: BigInt = f.0.iter().map(|c| c * c).sum();
    let mut m = BigInt::one();
    while &m * &m < norm2 {
        m += 1;
    }
    let binom = |a: usize, b: usize| -> BigInt {
        let mut r = BigInt::one();
        for i in 0..b {
            r = r * BigInt::from((a - i) as u64) / BigInt::from((i + 1) as u64);
        }
        r
    };
    let bounds: Vec<BigInt> = (0..d).map(|k| binom(d, k) * &m).collect();
    // Odometer over coefficient vectors (g_0, ..., g_{d-1}).
    let mut coeffs: Vec<BigInt> = bounds.iter().map(|b| -b.clone()).collect();
    loop {
        let mut g = coeffs.clone();
        g.push(BigInt::one());
        let g = IntPoly::new(g);
        if g.degree() == d as isize && divides_exactly(&g, f) {
            return Some(g);
        }
        // increment
        let mut i = 0;
        loop {
            if i == d {
                return None;
            }
            coeffs[i] += 1;
            if coeffs[i] <= bounds[i] {
                break;
            }
            coeffs[i] = -bounds[i].clone();
            i += 1;
        }
    }
}

fn divides_exactly(g: &IntPoly, f: &IntPoly) -> bool {
    // Monic g: synthetic division of f by g over Z.
    let mut rem = f.0.clone();
    let dg = g.degree() as usize;
    while rem.len() > dg {
        let lead = rem.last().unwrap().clone();
        let k = rem.len() - 1 - dg;
        if !lead.is_zero() {
            for i in 0..dg {
                let t = &g.0[i] * &lead;
                rem[k + i] -= t;
            }
        }
        rem.pop();
    }
    rem.iter().all(|c| c.is_zero())
}
