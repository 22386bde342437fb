//! Extension packs: quartic records for the quadratic extensions K(√u)
//! of the degree <= 2 Fontaine fields, with certified maximal orders,
//! unit groups, class numbers, and verified Kummer classes.

use num_bigint::BigInt;
use num_traits::One;

use fontaine::fieldcore::FieldRecord;
use fontaine::poly::IntPoly;

use crate::embed::{embeddings, Embeddings};
use crate::ord::{maximal_order, Ord};
use crate::quad::{quad_ord, QuadField};
use crate::records::{build_record, validate_extension, verify_kummer_class, RecordSpec};
use crate::units::{certified_units, narrow_class_number, verify_class_number_one};

pub struct PackEntry {
    pub square_class: u32,
    pub record: FieldRecord,
}

pub struct Pack {
    pub base_label: String,
    pub entries: Vec<PackEntry>,
}

/// Build one quartic extension record from its biquadratic defining
/// polynomial, verifying that it contains a square root of the base-field
/// unit class `mask`.
fn quartic_record(
    label: &str,
    poly: IntPoly,
    base: &Ord,
    base_emb: &Embeddings,
    umask_rep: &fontaine::fieldcore::Elem,
) -> FieldRecord {
    let basis = maximal_order(&poly);
    let ord = Ord::new(poly, basis);
    let emb = embeddings(&ord.poly, 48);
    let units = certified_units(&ord, &emb);
    let h = crate::units::class_group_order(&ord, &emb, &units);
    let h_plus = narrow_class_number(&ord, &emb, &units, &h);
    verify_kummer_class(base, base_emb, umask_rep, &ord, &emb);
    let record = build_record(RecordSpec {
        label: label.to_string(),
        ord: &ord,
        emb: &emb,
        units: &units,
        h,
        h_plus,
        with_generators: false,
    });
    validate_extension(&record);
    record
}

/// Unit-class representative on the base order for a mask over
/// (torsion, fundamental...), mirroring the library's convention.
fn class_rep(
    base: &Ord,
    torsion: &fontaine::fieldcore::Elem,
    fundamentals: &[fontaine::fieldcore::Elem],
    mask: u32,
) -> fontaine::fieldcore::Elem {
    let mut acc = base.one.clone();
    if mask & 1 != 0 {
        acc = base.mul(&acc, torsion);
    }
    for (i, u) in fundamentals.iter().enumerate() {
        if mask & (1 << (i + 1)) != 0 {
            acc = base.mul(&acc, u);
        }
    }
    acc
}

/// Pack for the rational field: the single class -1 gives Q(i).
pub fn pack_for_q() -> Pack {
    let poly = IntPoly::from_i64(&[1, 0, 1]);
    let basis = maximal_order(&poly);
    let ord = Ord::new(poly, basis);
    let emb = embeddings(&ord.poly, 48);
    let units = certified_units(&ord, &emb);
    assert_eq!(units.torsion_order, 4);
    verify_class_number_one(&ord, &emb, &units).unwrap();
    let record = build_record(RecordSpec {
        label: "2.0.4.1".into(),
        ord: &ord,
        emb: &emb,
        units: &units,
        h: BigInt::one(),
        h_plus: BigInt::one(),
        with_generators: false,
    });
    validate_extension(&record);
    Pack { base_label: "1.1.1.1".into(), entries: vec![PackEntry { square_class: 1, record }] }
}

/// Packs for the real quadratic Fontaine fields d in {5, 13, 17}: the
/// three unit square classes -1, ε, -ε give K(i) and the two conjugate
/// biquadratic fields x^4 ∓ t x^2 - 1 where ε² = t ε + 1.
pub fn pack_for_real_quad(base: &QuadField) -> Pack {
    let d = base.d;
    // ε = (x + y √d)/2 with trace t = x: ε² = t·ε - N(ε) = t·ε + 1.
    let u = &base.units.fundamentals[0];
    let trace = {
        // trace of a + b w is 2a + b.
        let a = &u[0];
        let b = &u[1];
        i64::try_from(a * BigInt::from(2) + b).expect("small trace")
    };
    assert_eq!(base.ord.norm(u), BigInt::from(-1));
    // K(i): theta = i + sqrt(d): x^4 - 2(d-1) x^2 + (d+1)^2.
    let ki = IntPoly::new(vec![
        BigInt::from((d + 1) * (d + 1)),
        BigInt::from(0),
        BigInt::from(-2 * (d - 1)),
        BigInt::from(0),
        BigInt::one(),
    ]);
    // K(√ε): x^4 - t x^2 - 1; K(√-ε): x^4 + t x^2 - 1.
    let keps = IntPoly::from_i64(&[-1, 0, -trace, 0, 1]);
    let kmeps = IntPoly::from_i64(&[-1, 0, trace, 0, 1]);
    let base_ord = quad_ord(d);
    let m1 = class_rep(&base_ord, &base.units.torsion, &base.units.fundamentals, 1);
    let m2 = class_rep(&base_ord, &base.units.torsion, &base.units.fundamentals, 2);
    let m3 = class_rep(&base_ord, &base.units.torsion, &base.units.fundamentals, 3);
    let entries = vec![
        PackEntry {
            square_class: 1,
            record: quartic_record(
                &format!("4.0.pack{}.1", d),
                ki,
                &base_ord,
                &base.emb,
                &m1,
            ),
        },
        PackEntry {
            square_class: 2,
            record: quartic_record(
                &format!("4.2.pack{}.2", d),
                keps,
                &base_ord,
                &base.emb,
                &m2,
            ),
        },
        PackEntry {
            square_class: 3,
            record: quartic_record(
                &format!("4.2.pack{}.3", d),
                kmeps,
                &base_ord,
                &base.emb,
                &m3,
            ),
        },
    ];
    Pack { base_label: base.record.label.clone(), entries }
}

/// Pack for Q(√-3): the class of ζ6 gives Q(ζ12), x^4 - x^2 + 1.
pub fn pack_for_minus3(base: &QuadField) -> Pack {
    assert_eq!(base.d, -3);
    let poly = IntPoly::from_i64(&[1, 0, -1, 0, 1]);
    let base_ord = quad_ord(-3);
    let rep = class_rep(&base_ord, &base.units.torsion, &[], 1);
    let record = quartic_record("4.0.144.1", poly, &base_ord, &base.emb, &rep);
    Pack {
        base_label: base.record.label.clone(),
        entries: vec![PackEntry { square_class: 1, record }],
    }
}

/// Pack for Q(√-7): the class of -1 gives Q(√-7, i), x^4 + 16x^2 + 36.
pub fn pack_for_minus7(base: &QuadField) -> Pack {
    assert_eq!(base.d, -7);
    let poly = IntPoly::from_i64(&[36, 0, 16, 0, 1]);
    let base_ord = quad_ord(-7);
    let rep = class_rep(&base_ord, &base.units.torsion, &[], 1);
    let record = quartic_record("4.0.784.1", poly, &base_ord, &base.emb, &rep);
    Pack {
        base_label: base.record.label.clone(),
        entries: vec![PackEntry { square_class: 1, record }],
    }
}

/// The cyclotomic field of conductor 5 (x^4+x^3+x^2+x+1, disc 125): an
/// odd-discriminant quartic base field used by the oracle suite.
pub fn zeta5_record() -> FieldRecord {
    let poly = IntPoly::from_i64(&[1, 1, 1, 1, 1]);
    let basis = maximal_order(&poly);
    let ord = Ord::new(poly, basis);
    let emb = embeddings(&ord.poly, 48);
    let units = certified_units(&ord, &emb);
    assert_eq!(units.torsion_order, 10);
    assert_eq!(units.fundamentals.len(), 1);
    verify_class_number_one(&ord, &emb, &units).unwrap();
    let record = build_record(RecordSpec {
        label: "4.0.125.1".into(),
        ord: &ord,
        emb: &emb,
        units: &units,
        h: BigInt::one(),
        h_plus: BigInt::one(),
        with_generators: true,
    });
    crate::records::validate_base(&record)
        .num_primes();
    record
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::build_quad;

    #[test]
    fn q_pack_builds() {
        let p = pack_for_q();
        assert_eq!(p.entries.len(), 1);
        assert_eq!(p.entries[0].record.degree, 2);
    }

    #[test]
    fn sqrt5_pack_builds() {
        let base = build_quad(5);
        let p = pack_for_real_quad(&base);
        assert_eq!(p.entries.len(), 3);
        for e in &p.entries {
            assert_eq!(e.record.degree, 4);
        }
        // K(i) = Q(√5, i) has discriminant 400 and signature (0, 2).
        assert_eq!(p.entries[0].record.disc, BigInt::from(400));
        assert_eq!(p.entries[0].record.signature, (0, 2));
        // K(√ε) has discriminant -400 and signature (2, 1).
        assert_eq!(p.entries[1].record.disc, BigInt::from(-400));
        assert_eq!(p.entries[1].record.signature, (2, 1));
    }

    #[test]
    fn minus3_pack_builds() {
        let base = build_quad(-3);
        let p = pack_for_minus3(&base);
        assert_eq!(p.entries[0].record.disc, BigInt::from(144));
        // Q(zeta12) has torsion order 12.
        assert_eq!(
            fontaine::fieldcore::Field::new_extension(p.entries[0].record.clone())
                .unwrap()
                .num_primes(),
            1
        );
    }

    #[test]
    fn minus7_pack_builds() {
        let base = build_quad(-7);
        let p = pack_for_minus7(&base);
        assert_eq!(p.entries[0].record.disc, BigInt::from(784));
    }

    #[test]
    fn sqrt17_pack_builds() {
        let base = build_quad(17);
        let p = pack_for_real_quad(&base);
        assert_eq!(p.entries.len(), 3);
        // The witness field K(√-ε) is entry for mask 3: disc -1156.
        assert_eq!(p.entries[2].record.disc, BigInt::from(-1156));
    }
}
