//! Certified archimedean embedding data for the small fields used in the
//! fixture corpus, plus exact lattice-point enumeration (LDL-based
//! Fincke-Pohst over the rationals) and certified unit-group and
//! class-number computations.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use fontaine::fieldcore::Elem;
use fontaine::mat::{hnf, hnf_solve, Mat};
use fontaine::poly::{isolate_real_roots, IntPoly};

use crate::interval::{inv_iv, ln_iv, q, sqrt_iv, Iv};
use crate::ord::Ord;

#[derive(Clone, Debug)]
pub struct CIv {
    pub re: Iv,
    pub im: Iv,
}

impl CIv {
    fn mul(&self, o: &CIv) -> CIv {
        CIv {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    fn add(&self, o: &CIv) -> CIv {
        CIv { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    fn scale(&self, c: &BigRational) -> CIv {
        let ci = Iv::point(c.clone());
        CIv { re: self.re.mul(&ci), im: self.im.mul(&ci) }
    }

    pub fn norm_sq(&self) -> Iv {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }
}

/// Certified embeddings of the power-basis root: real roots as intervals,
/// one representative per complex-conjugate pair.
#[derive(Clone, Debug)]
pub struct Embeddings {
    pub real: Vec<Iv>,
    pub complex: Vec<CIv>,
    pub bits: u32,
}

/// Build embeddings for the supported shapes: any polynomial for its real
/// roots; complex pairs for degree 2, cubics (one pair), and biquadratic
/// quartics x^4 + a x^2 + c.
pub fn embeddings(poly: &IntPoly, bits: u32) -> Embeddings {
    let eps = BigRational::new(BigInt::one(), BigInt::one() << bits);
    let n = poly.degree() as usize;
    let mut intervals = isolate_real_roots(poly);
    // Refine real roots until each interval is narrower than eps.
    for iv in intervals.iter_mut() {
        while &iv.hi - &iv.lo > eps {
            *iv = fontaine::poly::refine(poly, iv);
        }
    }
    let real: Vec<Iv> = intervals.iter().map(|iv| Iv::of(iv.lo.clone(), iv.hi.clone())).collect();
    let r1 = real.len();
    let r2 = (n - r1) / 2;
    let mut complex = Vec::new();
    if r2 > 0 {
        let c = |k: usize| BigRational::from_integer(poly.0[k].clone());
        match (n, r1) {
            (2, 0) => {
                // x^2 + c1 x + c0: root = -c1/2 ± i sqrt(c0 - c1^2/4).
                let re = -c(1) / q(2, 1);
                let im2 = c(0) - &re * &re;
                complex.push(CIv { re: Iv::point(re), im: sqrt_iv(&im2, &eps) });
            }
            (3, 1) => {
                // Re = (trace - real root)/2; |z|^2 = |c0| / |real root|.
                let tr = -c(2);
                let rho = &real[0];
                let re = Iv::point(tr).sub(rho).mul(&Iv::point(q(1, 2)));
                let abs2 = Iv::point(c(0).abs()).div(&rho.abs());
                let im2 = abs2.sub(&re.mul(&re));
                assert!(!im2.hi.is_negative());
                let im_lo = sqrt_iv(&im2.lo.clone().max(BigRational::zero()), &eps);
                let im_hi = sqrt_iv(&im2.hi, &eps);
                complex.push(CIv { re, im: Iv::of(im_lo.lo, im_hi.hi) });
            }
            (4, _) if c(1) == c(3) && c(0).is_one() && !c(1).is_zero() => {
                // Palindromic x^4 + p x^3 + q x^2 + p x + 1: with
                // y = x + 1/x, y^2 + p y + (q - 2) = 0. Roots with |y| < 2
                // form unit-circle conjugate pairs: Re = y/2,
                // Im = sqrt(1 - y^2/4); |y| > 2 gives real pairs (already
                // covered by the real isolation above).
                let pp = c(3);
                let qq = c(2) - q(2, 1);
                let disc_y = &pp * &pp - q(4, 1) * &qq;
                assert!(!disc_y.is_negative(), "complex y-pairs unsupported");
                let sd = sqrt_iv(&disc_y, &eps);
                let half = Iv::point(q(1, 2));
                for sign in [1i64, -1] {
                    let y = Iv::point(-pp.clone())
                        .add(&sd.mul(&Iv::point(q(sign, 1))))
                        .mul(&half);
                    // |y| < 2 <=> complex pair.
                    if y.max_abs() < q(2, 1) {
                        let re = y.mul(&half);
                        let im2 = Iv::point(q(1, 1)).sub(&re.mul(&re));
                        let lo = sqrt_iv(&im2.lo.clone().max(BigRational::zero()), &eps);
                        let hi = sqrt_iv(&im2.hi, &eps);
                        complex.push(CIv { re, im: Iv::of(lo.lo, hi.hi) });
                    }
                }
            }
            (4, _) if c(1).is_zero() && c(3).is_zero() => {
                // Biquadratic x^4 + a x^2 + c: x^2 = y, y^2 + a y + c = 0.
                let a = c(2);
                let cc = c(0);
                let disc_y = &a * &a - q(4, 1) * &cc;
                if !disc_y.is_negative() {
                    let sd = sqrt_iv(&disc_y, &eps);
                    let half = Iv::point(q(1, 2));
                    let y1 = Iv::point(-a.clone()).add(&sd).mul(&half);
                    let y2 = Iv::point(-a.clone()).sub(&sd).mul(&half);
                    for y in [y1, y2] {
                        if y.is_negative() {
                            // roots ± i sqrt(-y)
                            let m = y.neg();
                            let lo = sqrt_iv(&m.lo, &eps);
                            let hi = sqrt_iv(&m.hi, &eps);
                            complex.push(CIv {
                                re: Iv::point(BigRational::zero()),
                                im: Iv::of(lo.lo, hi.hi),
                            });
                        }
                    }
                } else {
                    // Complex pair of y's: |y| = sqrt(c), Re y = -a/2.
                    // Roots x = ±(p + qi), ±(p - qi) with
                    // p = sqrt((|y| + Re y)/2), q = sqrt((|y| - Re y)/2).
                    assert!(cc.is_positive());
                    let ay = sqrt_iv(&cc, &(eps.clone() * eps.clone()));
                    let rey = -a / q(2, 1);
                    let p2 = ay.add(&Iv::point(rey.clone())).mul(&Iv::point(q(1, 2)));
                    let q2 = ay.sub(&Iv::point(rey)).mul(&Iv::point(q(1, 2)));
                    let p = Iv::of(
                        sqrt_iv(&p2.lo.clone().max(BigRational::zero()), &eps).lo,
                        sqrt_iv(&p2.hi, &eps).hi,
                    );
                    let qq = Iv::of(
                        sqrt_iv(&q2.lo.clone().max(BigRational::zero()), &eps).lo,
                        sqrt_iv(&q2.hi, &eps).hi,
                    );
                    // Pairs: (p + qi) and (-p + qi) represent the two
                    // conjugate classes.
                    complex.push(CIv { re: p.clone(), im: qq.clone() });
                    complex.push(CIv { re: p.neg(), im: qq });
                }
            }
            _ => panic!("unsupported embedding shape: degree {n}, r1 {r1}"),
        }
    }
    assert_eq!(complex.len(), r2);
    Embeddings { real, complex, bits }
}

/// Evaluate an order element at every embedding, given its power-basis
/// rational coordinates.
pub fn eval_embeddings(emb: &Embeddings, power: &[BigRational]) -> (Vec<Iv>, Vec<CIv>) {
    let mut reals = Vec::new();
    for root in &emb.real {
        let mut acc = Iv::point(BigRational::zero());
        for c in power.iter().rev() {
            acc = acc.mul(root).add(&Iv::point(c.clone()));
        }
        reals.push(acc);
    }
    let mut cplx = Vec::new();
    for root in &emb.complex {
        let mut acc = CIv { re: Iv::point(BigRational::zero()), im: Iv::point(BigRational::zero()) };
        for c in power.iter().rev() {
            acc = acc.mul(root);
            acc.re = acc.re.add(&Iv::point(c.clone()));
        }
        cplx.push(acc);
    }
    (reals, cplx)
}

/// Interval Gram matrix of the T2 form on a list of order elements.
pub fn gram_of(ord: &Ord, emb: &Embeddings, vecs: &[Elem]) -> Vec<Vec<Iv>> {
    let n = vecs.len();
    let evals: Vec<(Vec<Iv>, Vec<CIv>)> =
        vecs.iter().map(|v| eval_embeddings(emb, &ord.to_power(v))).collect();
    let mut g = vec![vec![Iv::point(BigRational::zero()); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = Iv::point(BigRational::zero());
            for k in 0..emb.real.len() {
                acc = acc.add(&evals[i].0[k].mul(&evals[j].0[k]));
            }
            for k in 0..emb.complex.len() {
                let a = &evals[i].1[k];
                let b = &evals[j].1[k];
                let dot = a.re.mul(&b.re).add(&a.im.mul(&b.im));
                acc = acc.add(&dot.mul(&Iv::point(q(2, 1))));
            }
            g[i][j] = acc;
        }
    }
    g
}

/// All integer vectors x with x^T G_mid x <= bound, where G_mid is the
/// rational midpoint of the interval Gram matrix. The caller accounts for
/// the interval width when choosing `bound` (see `points_in_t2_ball`).
fn ldl_enumerate(gmid: &[Vec<BigRational>], bound: &BigRational) -> Vec<Vec<BigInt>> {
    let n = gmid.len();
    // LDL^T decomposition, exact over Q.
    let mut l = vec![vec![BigRational::zero(); n]; n];
    let mut d = vec![BigRational::zero(); n];
    for j in 0..n {
        let mut dj = gmid[j][j].clone();
        for k in 0..j {
            dj -= &l[j][k] * &l[j][k] * &d[k];
        }
        assert!(dj.is_positive(), "Gram midpoint must be positive definite");
        d[j] = dj;
        l[j][j] = BigRational::one();
        for i in j + 1..n {
            let mut v = gmid[i][j].clone();
            for k in 0..j {
                v -= &l[i][k] * &l[j][k] * &d[k];
            }
            l[i][j] = v / &d[j];
        }
    }
    // Q(x) = sum_j d_j (x_j + sum_{i>j} l_ij x_i)^2; recurse from the last
    // coordinate down.
    let mut out = Vec::new();
    let mut x = vec![BigInt::zero(); n];
    fn rec(
        j: isize,
        n: usize,
        l: &[Vec<BigRational>],
        d: &[BigRational],
        rem: &BigRational,
        x: &mut Vec<BigInt>,
        out: &mut Vec<Vec<BigInt>>,
    ) {
        if j < 0 {
            out.push(x.clone());
            return;
        }
        let j = j as usize;
        // shift = sum_{i > j} l_ij x_i.
        let mut shift = BigRational::zero();
        for i in j + 1..n {
            shift += &l[i][j] * BigRational::from_integer(x[i].clone());
        }
        // d_j (x_j + shift)^2 <= rem.
        let lim = rem / &d[j];
        let r = sqrt_iv(&lim, &q(1, 1024)).hi;
        let lo_q = -&r - &shift;
        let hi_q = &r - &shift;
        let lo = lo_q.ceil().to_integer();
        let hi = hi_q.floor().to_integer();
        let mut t = lo;
        while t <= hi {
            let val = BigRational::from_integer(t.clone()) + &shift;
            let used = &d[j] * &val * &val;
            if &used <= rem {
                x[j] = t.clone();
                let next = rem - &used;
                rec(j as isize - 1, n, l, d, &next, x, out);
            }
            t += 1;
        }
        x[j] = BigInt::zero();
    }
    rec(n as isize - 1, n, &l, &d, bound, &mut x, &mut out);
    out
}

/// Complete list of nonzero lattice combinations of `basis` whose true T2
/// is at most `t2_bound`. Sound: enumerates the midpoint form up to
/// bound + margin, with the margin certified to dominate the interval
/// widths over the search box.
pub fn points_in_ball_basis(
    ord: &Ord,
    emb: &Embeddings,
    basis: &[Elem],
    t2_bound: &BigRational,
) -> Vec<Elem> {
    let mut bits = emb.bits;
    let mut owned;
    let mut emb = emb;
    loop {
        match try_points(ord, emb, basis, t2_bound) {
            Some(pts) => return pts,
            None => {
                bits = bits.checked_add(64).expect("precision runaway");
                assert!(bits <= 1024, "embedding precision runaway");
                owned = embeddings(&ord.poly, bits);
                emb = &owned;
            }
        }
    }
}

fn try_points(
    ord: &Ord,
    emb: &Embeddings,
    basis: &[Elem],
    t2_bound: &BigRational,
) -> Option<Vec<Elem>> {
    let n = basis.len();
    let g = gram_of(ord, emb, basis);
    // Midpoint rounding tracks the embedding precision so refinement can
    // always shrink the margin below 1.
    let round_bits = emb.bits.saturating_sub(8).clamp(24, 512);
    let gmid: Vec<Vec<BigRational>> = g
        .iter()
        .map(|row| {
            row.iter()
                .map(|iv| {
                    crate::interval::round_down(&((&iv.lo + &iv.hi) / q(2, 1)), round_bits)
                })
                .collect()
        })
        .collect();
    let floor = BigRational::new(BigInt::one(), BigInt::one() << (round_bits - 2));
    let wmax = g
        .iter()
        .flat_map(|row| row.iter().map(|iv| iv.width()))
        .max()
        .unwrap()
        + floor;
    // Coordinate bound on the search region from the embedding matrix
    // inverse: |x_i| <= ||Vinv||_inf * sqrt(n * t2_bound) over the slightly
    // enlarged ball.
    let vinv_norm = embedding_inverse_norm(ord, emb, basis);
    let enlarged = t2_bound + q(1, 1);
    let coord = vinv_norm
        .mul(&Iv::point(sqrt_iv(&(BigRational::from_integer(BigInt::from(n as i64)) * &enlarged), &q(1, 64)).hi))
        .hi;
    let margin = &wmax * (BigRational::from_integer(BigInt::from(n as i64)) * &coord).pow(2);
    if margin >= BigRational::one() {
        return None;
    }
    let bound = crate::interval::round_up(&(t2_bound + margin), 24);
    Some(
        ldl_enumerate(&gmid, &bound)
            .into_iter()
            .filter(|y| y.iter().any(|c| !c.is_zero()))
            .map(|y| {
                // x = sum y_j basis_j as an order element.
                let mut x = vec![BigInt::zero(); ord.n];
                for (j, b) in basis.iter().enumerate() {
                    for i in 0..ord.n {
                        let t = &b[i] * &y[j];
                        x[i] += t;
                    }
                }
                x
            })
            .collect(),
    )
}

/// || V^-1 ||_inf over the real embedding matrix of the given lattice
/// basis (rows indexed by embeddings as a real vector space).
fn embedding_inverse_norm(ord: &Ord, emb: &Embeddings, basis: &[Elem]) -> Iv {
    let n = basis.len();
    let evals: Vec<(Vec<Iv>, Vec<CIv>)> =
        basis.iter().map(|v| eval_embeddings(emb, &ord.to_power(v))).collect();
    // Real matrix rows: each real embedding; Re and Im of each complex.
    let mut m: Vec<Vec<Iv>> = Vec::new();
    for k in 0..emb.real.len() {
        m.push((0..n).map(|i| evals[i].0[k].clone()).collect());
    }
    for k in 0..emb.complex.len() {
        m.push((0..n).map(|i| evals[i].1[k].re.clone()).collect());
        m.push((0..n).map(|i| evals[i].1[k].im.clone()).collect());
    }
    // Transpose: columns are basis vectors; x = Vinv * embedding-vector.
    let mt: Vec<Vec<Iv>> = (0..n).map(|i| (0..n).map(|k| m[k][i].clone()).collect()).collect();
    let inv = inv_iv(&mt);
    let mut norm = Iv::point(BigRational::zero());
    for row in &inv {
        let mut s = Iv::point(BigRational::zero());
        for e in row {
            s = s.add(&e.abs());
        }
        if s.hi > norm.hi {
            norm = s;
        }
    }
    norm
}

/// Certified log-embedding vector of a unit: one entry per real embedding
/// (log |σ x|) and per complex pair (2 log |σ x|).
pub fn log_vector(ord: &Ord, emb: &Embeddings, x: &Elem) -> Vec<Iv> {
    let power = ord.to_power(x);
    let (re, cx) = eval_embeddings(emb, &power);
    let eps = q(1, 1_000_000_000);
    let mut out = Vec::new();
    for r in re {
        let a = r.abs();
        assert!(a.lo.is_positive(), "unit embedding interval touches zero; refine");
        let iv = Iv::of(ln_iv(&a.lo, &eps).lo, ln_iv(&a.hi, &eps).hi);
        out.push(crate::interval::round_iv(&iv, 48));
    }
    for c in cx {
        let n2 = c.norm_sq();
        assert!(n2.lo.is_positive(), "unit embedding interval touches zero; refine");
        let iv = Iv::of(ln_iv(&n2.lo, &eps).lo, ln_iv(&n2.hi, &eps).hi);
        out.push(crate::interval::round_iv(&iv, 48));
    }
    out
}

/// Units (|norm| = 1) with every |log| coordinate at most `radius`,
/// excluding roots of unity. Complete within the stated radius.
pub fn units_in_log_box(ord: &Ord, emb: &Embeddings, radius: &BigRational) -> Vec<Elem> {
    // |log|σx|| <= radius for all embeddings means T2 <= n * exp(2 radius).
    let e2r = exp_upper(&(q(2, 1) * radius));
    let t2 = BigRational::from_integer(BigInt::from(ord.n as i64)) * e2r;
    let basis: Vec<Elem> = (0..ord.n)
        .map(|i| {
            (0..ord.n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    let pts = points_in_ball_basis(ord, emb, &basis, &t2);
    let mut out = Vec::new();
    for x in pts {
        if ord.norm(&x).abs() != BigInt::one() {
            continue;
        }
        if ord.is_torsion(&x) {
            continue;
        }
        // Check the log box on the certified intervals.
        let lv = log_vector(ord, emb, &x);
        let r1 = emb.real.len();
        let fits = lv.iter().enumerate().all(|(k, iv)| {
            // Complex entries carry 2 log |σ|; compare per |log σ|.
            let scale = if k < r1 { q(1, 1) } else { q(2, 1) };
            iv.max_abs() <= radius.clone() * scale
        });
        if fits {
            out.push(x);
        }
    }
    out
}

/// Rational upper bound for exp(x), x >= 0 rational, via the series with
/// a geometric tail bound.
pub fn exp_upper(x: &BigRational) -> BigRational {
    assert!(!x.is_negative());
    // For x <= 1/2 use the series; else square down.
    if x > &q(1, 2) {
        let h = exp_upper(&(x / q(2, 1)));
        return &h * &h;
    }
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    for k in 1..32u32 {
        term = term * x / BigRational::from_integer(BigInt::from(k));
        sum += &term;
    }
    // Tail: term * x/(1-x) with x <= 1/2, bounded by term.
    crate::interval::round_up(&(sum + term), 32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_ratio_units() {
        // Z[w], w^2 = w + 1 (Q(√5)); units in a small log box must include
        // ±w, ±w^{-1} and nothing of smaller height.
        let ord = Ord::new(
            IntPoly::from_i64(&[-1, -1, 1]),
            vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]],
        );
        let emb = embeddings(&ord.poly, 40);
        let units = units_in_log_box(&ord, &emb, &q(3, 4));
        // log w ≈ 0.481: w, -w, w^{-1} = w - 1, -(w-1) all fit.
        assert_eq!(units.len(), 4, "{units:?}");
        for u in &units {
            assert_eq!(ord.norm(u).abs(), BigInt::one());
        }
    }

    #[test]
    fn exp_upper_is_an_upper_bound() {
        let e = exp_upper(&q(1, 1));
        assert!(e > q(27182, 10000) && e < q(27184, 10000));
    }
}
