//! Certified rational interval arithmetic: the primitive layer for the
//! unit-lattice and class-number certifications. Everything is outward
//! rounded; no floating point enters any certified statement.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq)]
pub struct Iv {
    pub lo: BigRational,
    pub hi: BigRational,
}

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Iv {
    pub fn point(x: BigRational) -> Iv {
        Iv { lo: x.clone(), hi: x }
    }

    pub fn of(lo: BigRational, hi: BigRational) -> Iv {
        assert!(lo <= hi);
        Iv { lo, hi }
    }

    pub fn from_int(x: i64) -> Iv {
        Iv::point(BigRational::from_integer(BigInt::from(x)))
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn add(&self, o: &Iv) -> Iv {
        Iv { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn sub(&self, o: &Iv) -> Iv {
        Iv { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }

    pub fn neg(&self) -> Iv {
        Iv { lo: -self.hi.clone(), hi: -self.lo.clone() }
    }

    pub fn mul(&self, o: &Iv) -> Iv {
        let cands = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = cands.iter().min().unwrap().clone();
        let hi = cands.iter().max().unwrap().clone();
        Iv { lo, hi }
    }

    pub fn recip(&self) -> Iv {
        assert!(!self.contains_zero(), "division by an interval containing zero");
        Iv { lo: self.hi.recip(), hi: self.lo.recip() }
    }

    pub fn div(&self, o: &Iv) -> Iv {
        self.mul(&o.recip())
    }

    pub fn abs(&self) -> Iv {
        if self.contains_zero() {
            let hi = self.lo.abs().max(self.hi.abs());
            Iv { lo: BigRational::zero(), hi }
        } else if self.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn max_abs(&self) -> BigRational {
        self.lo.abs().max(self.hi.abs())
    }
}

/// Round down/up to a dyadic grid: sound outward rounding that keeps
/// rationals produced by transcendental bounds small.
pub fn round_down(x: &BigRational, bits: u32) -> BigRational {
    let scale = BigInt::one() << bits;
    let scaled = x * BigRational::from_integer(scale.clone());
    BigRational::new(scaled.floor().to_integer(), scale)
}

pub fn round_up(x: &BigRational, bits: u32) -> BigRational {
    let scale = BigInt::one() << bits;
    let scaled = x * BigRational::from_integer(scale.clone());
    BigRational::new(scaled.ceil().to_integer(), scale)
}

pub fn round_iv(iv: &Iv, bits: u32) -> Iv {
    Iv { lo: round_down(&iv.lo, bits), hi: round_up(&iv.hi, bits) }
}

/// Certified square root interval of a nonnegative rational, to within eps.
pub fn sqrt_iv(x: &BigRational, eps: &BigRational) -> Iv {
    assert!(!x.is_negative());
    if x.is_zero() {
        return Iv::point(BigRational::zero());
    }
    let one = BigRational::one();
    let mut lo = BigRational::zero();
    let mut hi = if x >= &one { x.clone() } else { one.clone() };
    let two = BigRational::from_integer(BigInt::from(2));
    while &(&hi - &lo) > eps {
        let mid = (&lo + &hi) / &two;
        if &(&mid * &mid) <= x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Iv { lo, hi }
}

/// Certified natural log of a positive rational, to within eps.
/// Range-reduce by powers of 2, then atanh series with explicit tail.
pub fn ln_iv(x: &BigRational, eps: &BigRational) -> Iv {
    assert!(x.is_positive());
    let two = BigRational::from_integer(BigInt::from(2));
    let mut m = x.clone();
    let mut k: i64 = 0;
    let three_halves = q(3, 2);
    let three_quarters = q(3, 4);
    while m > three_halves {
        m /= &two;
        k += 1;
    }
    while m < three_quarters {
        m *= &two;
        k -= 1;
    }
    // ln m = 2 atanh t, t = (m-1)/(m+1), |t| <= 1/5.
    let t = (&m - BigRational::one()) / (&m + BigRational::one());
    let ln_m = atanh_iv(&t, &(eps / &two));
    // ln 2 = 2 atanh(1/3).
    let ln2 = atanh_iv(&q(1, 3), &(eps / &(BigRational::from_integer(BigInt::from(4 * (k.abs() + 1))))));
    let ln2 = Iv { lo: &ln2.lo * &two, hi: &ln2.hi * &two };
    let ln_m = Iv { lo: &ln_m.lo * &two, hi: &ln_m.hi * &two };
    let kq = BigRational::from_integer(BigInt::from(k));
    let scaled = Iv {
        lo: ln2.lo.clone().min(ln2.hi.clone()) * &kq,
        hi: ln2.hi.clone().max(ln2.lo.clone()) * &kq,
    };
    let scaled = if k >= 0 { scaled } else { Iv { lo: scaled.lo.clone().min(scaled.hi.clone()), hi: scaled.hi.max(scaled.lo) } };
    round_iv(&ln_m.add(&scaled), 48)
}

/// atanh t = sum t^{2i+1}/(2i+1) for |t| < 1/2, with tail bound
/// |tail| <= |t|^{2n+1} / (1 - t^2).
fn atanh_iv(t: &BigRational, eps: &BigRational) -> Iv {
    assert!(t.abs() < q(1, 2));
    let t2 = t * t;
    let mut term = t.clone();
    let mut sum = BigRational::zero();
    let mut i = 0u32;
    loop {
        sum += &term / BigRational::from_integer(BigInt::from(2 * i + 1));
        term *= &t2;
        i += 1;
        // Remaining tail is bounded by |term| / (1 - t^2).
        let tail = term.abs() / (BigRational::one() - &t2);
        if &tail < eps {
            return Iv { lo: &sum - &tail, hi: &sum + &tail };
        }
    }
}

/// Interval matrix inverse by Gaussian elimination with interval pivots.
/// Panics if a pivot interval contains zero (refine inputs first).
pub fn inv_iv(m: &[Vec<Iv>]) -> Vec<Vec<Iv>> {
    let n = m.len();
    let mut a: Vec<Vec<Iv>> = m.to_vec();
    let mut inv: Vec<Vec<Iv>> = (0..n)
        .map(|i| (0..n).map(|j| Iv::from_int((i == j) as i64)).collect())
        .collect();
    for k in 0..n {
        // Choose a pivot row whose pivot interval excludes zero.
        let p = (k..n)
            .find(|&i| !a[i][k].contains_zero())
            .expect("interval pivot contains zero; refine embeddings");
        a.swap(k, p);
        inv.swap(k, p);
        let piv = a[k][k].clone();
        for j in 0..n {
            a[k][j] = a[k][j].div(&piv);
            inv[k][j] = inv[k][j].div(&piv);
        }
        for i in 0..n {
            if i == k {
                continue;
            }
            let f = a[i][k].clone();
            if f.lo.is_zero() && f.hi.is_zero() {
                continue;
            }
            for j in 0..n {
                a[i][j] = a[i][j].sub(&f.mul(&a[k][j]));
                inv[i][j] = inv[i][j].sub(&f.mul(&inv[k][j]));
            }
        }
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_and_ln() {
        let eps = q(1, 1_000_000);
        let s = sqrt_iv(&q(2, 1), &eps);
        assert!(s.lo.clone() * s.lo.clone() <= q(2, 1));
        assert!(s.hi.clone() * s.hi.clone() >= q(2, 1));
        assert!(s.width() <= eps);

        let l = ln_iv(&q(2, 1), &eps);
        // ln 2 = 0.693147...
        assert!(l.lo < q(6932, 10000) && l.hi > q(6931, 10000));
        let l10 = ln_iv(&q(10, 1), &eps);
        assert!(l10.lo < q(23026, 10000) && l10.hi > q(23025, 10000));
        let lhalf = ln_iv(&q(1, 2), &eps);
        assert!(lhalf.hi < BigRational::zero());
    }

    #[test]
    fn interval_inverse() {
        let eps = q(1, 1_000_000);
        let m = vec![
            vec![Iv::from_int(2), Iv::from_int(1)],
            vec![Iv::from_int(1), Iv::from_int(1)],
        ];
        let inv = inv_iv(&m);
        // inverse = [[1, -1], [-1, 2]]
        assert!(inv[0][0].lo <= BigRational::one() && BigRational::one() <= inv[0][0].hi);
        assert!(inv[0][1].contains_zero() == false);
        let _ = eps;
    }
}
