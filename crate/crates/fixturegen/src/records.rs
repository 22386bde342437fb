//! Assemble validated FieldRecords from certified order data.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use fontaine::fieldcore::{Elem, Field, FieldRecord, PrimeAboveTwo};
use fontaine::mat::Mat;

use crate::embed::Embeddings;
use crate::ord::{primes_above, Ord};
use crate::units::{generator_search, UnitData};

/// Build the factorization of 2 with two-element generators and, when
/// requested, principal generators (base fields, h = 1).
pub fn two_factorization(
    ord: &Ord,
    emb: &Embeddings,
    units: &UnitData,
    with_generators: bool,
) -> Vec<PrimeAboveTwo> {
    let mut primes = primes_above(ord, 2);
    // Deterministic order: by residue degree, then by HNF entries.
    primes.sort_by_key(|(lat, _, f)| {
        let mut entries = Vec::new();
        for i in 0..ord.n {
            for j in 0..ord.n {
                entries.push(lat[(i, j)].clone());
            }
        }
        (*f, entries)
    });
    let two = ord.from_int(2);
    primes
        .into_iter()
        .map(|(lat, e, f)| {
            // Second generator: a lattice column with (2, x) spanning it.
            let mut second: Option<Elem> = None;
            'cols: for j in 0..ord.n {
                let x = lat.column(j);
                if ord.ideal_from_generators(&[two.clone(), x.clone()]) == lat {
                    second = Some(x);
                    break 'cols;
                }
            }
            // Fall back to sums of two columns if single columns fail.
            if second.is_none() {
                'pairs: for j in 0..ord.n {
                    for k in j + 1..ord.n {
                        let x = ord.add(&lat.column(j), &lat.column(k));
                        if ord.ideal_from_generators(&[two.clone(), x.clone()]) == lat {
                            second = Some(x);
                            break 'pairs;
                        }
                    }
                }
            }
            let second = second.expect("prime over 2 has a two-element generating set");
            let generator = if with_generators {
                let norm = ord.ideal_norm(&lat);
                Some(
                    generator_search(ord, emb, units, &lat, &norm)
                        .expect("base-field primes are principal"),
                )
            } else {
                None
            };
            PrimeAboveTwo { two_generators: (two.clone(), second), e, f, generator }
        })
        .collect()
}

pub struct RecordSpec<'a> {
    pub label: String,
    pub ord: &'a Ord,
    pub emb: &'a Embeddings,
    pub units: &'a UnitData,
    pub h: BigInt,
    pub h_plus: BigInt,
    pub with_generators: bool,
}

pub fn build_record(spec: RecordSpec<'_>) -> FieldRecord {
    let ord = spec.ord;
    let r1 = spec.emb.real.len();
    let r2 = spec.emb.complex.len();
    FieldRecord {
        label: spec.label,
        degree: ord.n,
        poly: ord.poly.0.clone(),
        integral_basis: ord.basis.clone(),
        disc: ord.disc(),
        signature: (r1, r2),
        h: spec.h,
        h_plus: spec.h_plus,
        torsion_unit: spec.units.torsion.clone(),
        units: spec.units.fundamentals.clone(),
        two_factorization: two_factorization(ord, spec.emb, spec.units, spec.with_generators),
    }
}

/// Final gate: the produced record must pass the library's own validator.
pub fn validate_base(rec: &FieldRecord) -> Field {
    match Field::new_base(rec.clone()) {
        Ok(f) => f,
        Err(e) => panic!("generated base record {} failed validation: {e}", rec.label),
    }
}

pub fn validate_extension(rec: &FieldRecord) -> Field {
    match Field::new_extension(rec.clone()) {
        Ok(f) => f,
        Err(e) => panic!("generated extension record {} failed validation: {e}", rec.label),
    }
}

/// Verify that a quartic extension record really contains a square root
/// of the unit-class representative `u` of the base field: find an
/// embedding of the base into the extension and then an exact square
/// root. Panics when the verification fails.
pub fn verify_kummer_class(
    base: &Ord,
    base_emb: &Embeddings,
    u: &Elem,
    ext: &Ord,
    ext_emb: &Embeddings,
) {
    // Roots of the base polynomial inside the extension: complete search
    // in the T2 ball given by the Cauchy root bound.
    let bound = base.poly.root_bound();
    let n = BigInt::from(ext.n as i64);
    let t2 = num_rational::BigRational::from_integer(n) * &bound * &bound
        + num_rational::BigRational::one();
    let basis: Vec<Elem> = (0..ext.n)
        .map(|i| {
            (0..ext.n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    let candidates = crate::embed::points_in_ball_basis(ext, ext_emb, &basis, &t2);
    let mut roots: Vec<Elem> = Vec::new();
    for r in candidates {
        // Evaluate the base polynomial at r inside the extension.
        let mut acc = ext.from_int(0);
        for c in base.poly.0.iter().rev() {
            acc = ext.mul(&acc, &r);
            let ci: Elem = ext.one.iter().map(|o| o * c).collect();
            acc = ext.add(&acc, &ci);
        }
        if acc.iter().all(|c| c.is_zero()) {
            roots.push(r);
        }
    }
    assert!(!roots.is_empty(), "base field does not embed in the claimed extension");
    // u as a polynomial in the base generator, evaluated at each root;
    // some embedding must make it a square. The power coordinates may
    // carry denominators, so evaluate D*u and divide the result, which is
    // integral because u is.
    let upow = base.to_power(u);
    let _ = base_emb;
    let mut den = BigInt::one();
    for c in &upow {
        den = num_integer::Integer::lcm(&den, c.denom());
    }
    for root in &roots {
        let mut img = ext.from_int(0);
        for c in upow.iter().rev() {
            img = ext.mul(&img, root);
            let scaled = c.numer() * (&den / c.denom());
            let ci: Elem = ext.one.iter().map(|o| o * &scaled).collect();
            img = ext.add(&img, &ci);
        }
        // img currently equals den * u's image; divide exactly.
        let img: Elem = img
            .iter()
            .map(|c| {
                let (q, r) = num_integer::Integer::div_rem(c, &den);
                assert!(r.is_zero(), "unit image must be integral");
                q
            })
            .collect();
        // Search for y with y^2 = img: |sigma(y)|^2 = |sigma(img)|, so
        // T2(y) <= sum |sigma(img)| <= n * max; use a generous ball.
        let (re, cx) = crate::embed::eval_embeddings(ext_emb, &ext.to_power(&img));
        let mut t2y = num_rational::BigRational::one();
        for iv in &re {
            t2y += iv.abs().hi;
        }
        for c in &cx {
            let m = c.norm_sq();
            t2y += crate::interval::sqrt_iv(&m.hi, &crate::interval::q(1, 64)).hi
                * crate::interval::q(2, 1);
        }
        let ys = crate::embed::points_in_ball_basis(ext, ext_emb, &basis, &t2y);
        for y in ys {
            if ext.mul(&y, &y) == img {
                return;
            }
        }
    }
    panic!("no square root of the unit class found in the extension");
}

/// Convenience: build a Mat ideal from i64 entries (tests).
#[allow(dead_code)]
pub fn mat_from(rows: &[&[i64]]) -> Mat {
    Mat::from_i64(rows)
}
