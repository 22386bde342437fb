//! The degree-2 corpus: the 16 quadratic fields with odd discriminant,
//! narrow class number one, and root discriminant at most 9.5. Units come
//! from an exact Pell sweep; class numbers are proved by exhibiting
//! generators under the Minkowski bound.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use fontaine::fieldcore::{Elem, FieldRecord};
use fontaine::poly::IntPoly;

use crate::embed::{embeddings, Embeddings};
use crate::ord::{qz, Ord};
use crate::records::{build_record, validate_base, RecordSpec};
use crate::units::{verify_class_number_one, UnitData};

/// Fundamental discriminants of the corpus: 10 real, 6 imaginary.
pub const REAL_DISCS: [i64; 10] = [5, 13, 17, 29, 37, 41, 53, 61, 73, 89];
pub const IMAG_DISCS: [i64; 6] = [-3, -7, -11, -19, -43, -67];

pub fn quad_ord(d: i64) -> Ord {
    assert!(d % 4 == 1 || d % 4 == -3);
    // O = Z[w], w = (1+√d)/2, minimal polynomial x^2 - x - (d-1)/4.
    let c = (d - 1) / 4;
    let f = IntPoly::from_i64(&[-c, -1, 1]);
    Ord::new(f, vec![vec![qz(1), qz(0)], vec![qz(0), qz(1)]])
}

/// Exact fundamental unit of the real quadratic field of discriminant d:
/// the smallest (x + y√d)/2 > 1 with x ≡ y (mod 2), |x² - d y²| = 4,
/// found by ascending y. Returned in integral-basis coordinates.
pub fn pell_fundamental_unit(d: i64) -> Elem {
    assert!(d > 0);
    let dd = BigInt::from(d);
    let mut y = BigInt::one();
    loop {
        for sign in [-4i64, 4] {
            let x2 = &dd * &y * &y + BigInt::from(sign);
            if x2.is_negative() {
                continue;
            }
            let x = x2.sqrt();
            if &x * &x == x2 {
                // epsilon = (x + y√d)/2 = (x - y)/2 + y w.
                let a = (&x - &y) / BigInt::from(2);
                assert!(((&x - &y) % BigInt::from(2)).is_zero());
                return vec![a, y];
            }
        }
        y += 1;
    }
}

pub fn torsion_unit(d: i64, ord: &Ord) -> (Elem, usize) {
    if d == -3 {
        // zeta_6 = (1+√-3)/2 = w itself.
        let z = vec![BigInt::zero(), BigInt::one()];
        assert_eq!(ord.torsion_order(&z), Some(6));
        (z, 6)
    } else {
        (ord.from_int(-1), 2)
    }
}

pub struct QuadField {
    pub d: i64,
    pub record: FieldRecord,
    pub ord: Ord,
    pub emb: Embeddings,
    pub units: UnitData,
}

pub fn build_quad(d: i64) -> QuadField {
    let ord = quad_ord(d);
    let emb = embeddings(&ord.poly, 48);
    let (torsion, torsion_order) = torsion_unit(d, &ord);
    let fundamentals = if d > 0 {
        let u = pell_fundamental_unit(d);
        assert_eq!(ord.norm(&u).abs(), BigInt::one());
        // All real fields in the corpus have a norm -1 unit (d prime,
        // 1 mod 4); this forces narrow class number one.
        assert_eq!(ord.norm(&u), BigInt::from(-1), "corpus units have norm -1");
        vec![u]
    } else {
        vec![]
    };
    let units = UnitData { torsion, torsion_order, fundamentals };
    verify_class_number_one(&ord, &emb, &units)
        .unwrap_or_else(|e| panic!("class number of disc {d} is not 1: {e}"));
    let h_plus = crate::units::narrow_class_number(&ord, &emb, &units, &BigInt::one());
    assert!(h_plus.is_one(), "corpus field disc {d} must have narrow class number 1");
    let label = if d > 0 {
        format!("2.2.{}.1", d)
    } else {
        format!("2.0.{}.1", -d)
    };
    let record = build_record(RecordSpec {
        label,
        ord: &ord,
        emb: &emb,
        units: &units,
        h: BigInt::one(),
        h_plus,
        with_generators: true,
    });
    validate_base(&record);
    QuadField { d, record, ord, emb, units }
}

pub fn build_corpus() -> Vec<QuadField> {
    let mut all: Vec<i64> = REAL_DISCS.iter().chain(IMAG_DISCS.iter()).copied().collect();
    // Deterministic corpus order: by |disc|, real before imaginary on ties.
    all.sort_by_key(|d| (d.abs(), d.is_negative()));
    all.into_iter().map(build_quad).collect()
}

/// The truthful record for disc 21: class number 1 but narrow class
/// number 2 (the fundamental unit (5+√21)/2 has norm +1 and is totally
/// positive). Validates as an extension record; the base validator must
/// reject it, which the acceptance suite asserts.
pub fn build_sqrt21() -> FieldRecord {
    let ord = quad_ord(21);
    let emb = embeddings(&ord.poly, 48);
    let u = pell_fundamental_unit(21);
    assert_eq!(ord.norm(&u), BigInt::one());
    let units = UnitData { torsion: ord.from_int(-1), torsion_order: 2, fundamentals: vec![u] };
    verify_class_number_one(&ord, &emb, &units).unwrap();
    let h_plus = crate::units::narrow_class_number(&ord, &emb, &units, &BigInt::one());
    assert_eq!(h_plus, BigInt::from(2));
    let record = build_record(RecordSpec {
        label: "2.2.21.1".into(),
        ord: &ord,
        emb: &emb,
        units: &units,
        h: BigInt::one(),
        h_plus,
        with_generators: true,
    });
    crate::records::validate_extension(&record);
    record
}

/// The rational field as a degree-1 record.
pub fn build_q() -> FieldRecord {
    let rec = FieldRecord {
        label: "1.1.1.1".into(),
        degree: 1,
        poly: vec![BigInt::zero(), BigInt::one()],
        integral_basis: vec![vec![qz(1)]],
        disc: BigInt::one(),
        signature: (1, 0),
        h: BigInt::one(),
        h_plus: BigInt::one(),
        torsion_unit: vec![BigInt::from(-1)],
        units: vec![],
        two_factorization: vec![fontaine::fieldcore::PrimeAboveTwo {
            two_generators: (vec![BigInt::from(2)], vec![BigInt::from(2)]),
            e: 1,
            f: 1,
            generator: Some(vec![BigInt::from(2)]),
        }],
    };
    validate_base(&rec);
    rec
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pell_units_match_the_classics() {
        assert_eq!(pell_fundamental_unit(5), vec![BigInt::zero(), BigInt::one()]);
        // (3+√13)/2 = 1 + w.
        assert_eq!(pell_fundamental_unit(13), vec![BigInt::one(), BigInt::one()]);
        // 4 + √17 = 3 + 2w -> x = 8, y = 2.
        assert_eq!(pell_fundamental_unit(17), vec![BigInt::from(3), BigInt::from(2)]);
        // 32 + 5√41: x = 64, y = 10.
        let u41 = pell_fundamental_unit(41);
        assert_eq!(u41, vec![BigInt::from(27), BigInt::from(10)]);
        // 1068 + 125√73: x = 2136, y = 250.
        let u73 = pell_fundamental_unit(73);
        assert_eq!(u73[1], BigInt::from(250));
    }

    #[test]
    fn all_sixteen_fields_build_and_validate() {
        let corpus = build_corpus();
        assert_eq!(corpus.len(), 16);
        let real = corpus.iter().filter(|f| f.d > 0).count();
        assert_eq!(real, 10);
        build_q();
    }
}

#[cfg(test)]
mod slow_tests {
    use super::*;

    #[test]
    fn single_field_5() {
        let f = build_quad(5);
        assert_eq!(f.record.label, "2.2.5.1");
    }

    #[test]
    fn single_field_73() {
        let f = build_quad(73);
        assert_eq!(f.record.label, "2.2.73.1");
    }
}
