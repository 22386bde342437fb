use num_bigint::BigInt;
use num_rational::BigRational;

use super::*;

fn bi(x: i64) -> BigInt {
    BigInt::from(x)
}

fn br(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

pub fn record_q() -> FieldRecord {
    FieldRecord {
        label: "1.1.1.1".into(),
        degree: 1,
        poly: vec![bi(0), bi(1)],
        integral_basis: vec![vec![br(1)]],
        disc: bi(1),
        signature: (1, 0),
        h: bi(1),
        h_plus: bi(1),
        torsion_unit: vec![bi(-1)],
        units: vec![],
        two_factorization: vec![PrimeAboveTwo {
            two_generators: (vec![bi(2)], vec![bi(2)]),
            e: 1,
            f: 1,
            generator: Some(vec![bi(2)]),
        }],
    }
}

/// Q(√5): O = Z[w], w = (1+√5)/2 a root of x^2 - x - 1; 2 inert.
pub fn record_sqrt5() -> FieldRecord {
    FieldRecord {
        label: "2.2.5.1".into(),
        degree: 2,
        poly: vec![bi(-1), bi(-1), bi(1)],
        integral_basis: vec![vec![br(1), br(0)], vec![br(0), br(1)]],
        disc: bi(5),
        signature: (2, 0),
        h: bi(1),
        h_plus: bi(1),
        torsion_unit: vec![bi(-1), bi(0)],
        units: vec![vec![bi(0), bi(1)]],
        two_factorization: vec![PrimeAboveTwo {
            two_generators: (vec![bi(2), bi(0)], vec![bi(0), bi(2)]),
            e: 1,
            f: 2,
            generator: Some(vec![bi(2), bi(0)]),
        }],
    }
}

/// Q(√17): O = Z[w], w = (1+√17)/2 a root of x^2 - x - 4; 2 splits.
pub fn record_sqrt17() -> FieldRecord {
    FieldRecord {
        label: "2.2.17.1".into(),
        degree: 2,
        poly: vec![bi(-4), bi(-1), bi(1)],
        integral_basis: vec![vec![br(1), br(0)], vec![br(0), br(1)]],
        disc: bi(17),
        signature: (2, 0),
        h: bi(1),
        h_plus: bi(1),
        torsion_unit: vec![bi(-1), bi(0)],
        units: vec![vec![bi(3), bi(2)]],
        two_factorization: vec![
            PrimeAboveTwo {
                two_generators: (vec![bi(2), bi(0)], vec![bi(0), bi(1)]),
                e: 1,
                f: 1,
                generator: Some(vec![bi(2), bi(1)]),
            },
            PrimeAboveTwo {
                two_generators: (vec![bi(2), bi(0)], vec![bi(1), bi(1)]),
                e: 1,
                f: 1,
                generator: Some(vec![bi(3), bi(-1)]),
            },
        ],
    }
}

#[test]
fn validates_the_three_sample_fields() {
    Field::new_base(record_q()).unwrap();
    Field::new_base(record_sqrt5()).unwrap();
    Field::new_base(record_sqrt17()).unwrap();
}

#[test]
fn factor_two_is_a_verifier() {
    // Corrupt f on the inert prime.
    let mut rec = record_sqrt5();
    rec.two_factorization[0].f = 1;
    assert!(Field::new_base(rec).is_err());

    // Claim ramification where the discriminant is odd.
    let mut rec = record_sqrt5();
    rec.two_factorization[0].e = 2;
    rec.two_factorization[0].f = 1;
    assert!(matches!(Field::new_base(rec), Err(FieldError::RamifiedAtTwo)));

    // Generator spanning the wrong lattice.
    let mut rec = record_sqrt17();
    rec.two_factorization[0].generator = Some(vec![bi(3), bi(-1)]);
    assert!(Field::new_base(rec).is_err());

    // Wrong unit (norm not ±1).
    let mut rec = record_sqrt5();
    rec.units = vec![vec![bi(2), bi(0)]];
    assert!(matches!(Field::new_base(rec), Err(FieldError::UnitCheck(_))));

    // Lying about the narrow class number trips the sign-image check:
    // Q(√5) has a unit of every sign pattern, so h+ = 2 is inconsistent.
    let mut rec = record_sqrt5();
    rec.h_plus = bi(2);
    assert!(Field::new_base(rec).is_err());
}

#[test]
fn element_arithmetic_and_norms() {
    let k = Field::new_base(record_sqrt5()).unwrap();
    let w = vec![bi(0), bi(1)];
    // w^2 = w + 1.
    assert_eq!(k.mul(&w, &w), vec![bi(1), bi(1)]);
    assert_eq!(k.norm(&w), bi(-1));
    let k17 = Field::new_base(record_sqrt17()).unwrap();
    assert_eq!(k17.norm(&vec![bi(2), bi(1)]), bi(2));
    assert_eq!(k17.norm(&vec![bi(3), bi(2)]), bi(-1));
}

#[test]
fn ideal_multiplication() {
    let k = Field::new_base(record_sqrt17()).unwrap();
    let two = k.two_ideal();
    // (2O) * O = 2O.
    assert_eq!(k.ideal_mul(&two, &IdealHnf::whole_ring(2)), two);
    // p * pbar = 2O.
    let p = k.prime_ideal(0).clone();
    let pbar = k.prime_ideal(1).clone();
    assert_eq!(k.ideal_mul(&p, &pbar), two);
    // p^2 has norm 4.
    assert_eq!(k.ideal_pow(&p, 2).norm(), bi(4));
    // Norm is multiplicative across a spread of ideals.
    let ideals = [
        p.clone(),
        pbar.clone(),
        two.clone(),
        k.ideal_from_generators(&[vec![bi(3), bi(1)]]).unwrap(),
        k.ideal_from_generators(&[vec![bi(5), bi(0)], vec![bi(0), bi(5)]]).unwrap(),
    ];
    for a in &ideals {
        for b in &ideals {
            assert_eq!(k.ideal_mul(a, b).norm(), a.norm() * b.norm());
        }
    }
}

#[test]
fn residue_unit_group_small_cases() {
    // m = O: trivial group.
    let k = Field::new_base(record_q()).unwrap();
    let g = ResidueUnitGroup::new(&k, &[0]).unwrap();
    assert!(g.group.is_trivial());

    // Q mod 8: C2 x C2.
    let g8 = ResidueUnitGroup::new(&k, &[3]).unwrap();
    assert_eq!(g8.order(), bi(4));
    assert_eq!(
        g8.group.invariant_factors(),
        &[bi(2), bi(2)]
    );

    // Q(√17) mod pbar^2: order 2.
    let k17 = Field::new_base(record_sqrt17()).unwrap();
    let gp = ResidueUnitGroup::new(&k17, &[0, 2]).unwrap();
    assert_eq!(gp.order(), bi(2));
}

#[test]
fn residue_unit_group_matches_enumeration() {
    // Count units by brute force for assorted moduli of norm <= 2^10.
    let cases: Vec<(FieldRecord, Vec<usize>)> = vec![
        (record_q(), vec![1]),
        (record_q(), vec![2]),
        (record_q(), vec![4]),
        (record_q(), vec![10]),
        (record_sqrt5(), vec![1]),
        (record_sqrt5(), vec![2]),
        (record_sqrt17(), vec![1, 0]),
        (record_sqrt17(), vec![2, 1]),
        (record_sqrt17(), vec![3, 2]),
        (record_sqrt17(), vec![0, 4]),
    ];
    for (rec, exps) in cases {
        let k = Field::new_base(rec).unwrap();
        let g = ResidueUnitGroup::new(&k, &exps).unwrap();
        let all = g.ring.enumerate();
        let units = all
            .iter()
            .filter(|x| g.ring.inverse(&k, x).is_some())
            .count();
        assert_eq!(BigInt::from(units), g.order(), "modulus exponents {exps:?}");
        // Discrete logs recompose on every unit.
        for x in all.iter().filter(|x| g.ring.inverse(&k, x).is_some()) {
            let e = g.dlog(&k, x).expect("unit has a dlog");
            let mut acc = g.ring.reduce(&k.one);
            for (gen, ei) in g.gens.iter().zip(&e) {
                let p = g.ring.pow(&k, gen, ei);
                acc = g.ring.mul(&k, &acc, &p);
            }
            assert_eq!(&acc, x, "dlog recomposition, exponents {exps:?}");
        }
        // Non-units have no dlog.
        for x in all.iter().filter(|x| g.ring.inverse(&k, x).is_none()) {
            assert!(g.dlog(&k, x).is_none());
        }
    }
}

#[test]
fn real_signs_by_root_isolation() {
    let k = Field::new_base(record_sqrt5()).unwrap();
    // Roots ascending: (1-√5)/2 < (1+√5)/2, so w = theta has signs (-, +).
    assert_eq!(k.real_signs(&vec![bi(0), bi(1)]), vec![-1, 1]);
    assert_eq!(k.real_signs(&k.one), vec![1, 1]);
    assert_eq!(k.real_signs(&k.from_int(-1)), vec![-1, -1]);
}

#[test]
fn real_signs_are_multiplicative() {
    let k = Field::new_base(record_sqrt17()).unwrap();
    // Deterministic pseudo-random pairs.
    let mut state = 0x12345678u64;
    let mut next = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 33) as i64 % 7) - 3
    };
    let mut tested = 0;
    while tested < 100 {
        let x = vec![bi(next()), bi(next())];
        let y = vec![bi(next()), bi(next())];
        if x.iter().all(|c| c.is_zero()) || y.iter().all(|c| c.is_zero()) {
            continue;
        }
        let sx = k.real_signs(&x);
        let sy = k.real_signs(&y);
        let sxy = k.real_signs(&k.mul(&x, &y));
        for i in 0..2 {
            assert_eq!(sx[i] * sy[i], sxy[i]);
        }
        tested += 1;
    }
}

#[test]
fn rejects_even_discriminant_and_bad_narrow_class_number() {
    // Q(√2): x^2 - 2, disc 8.
    let rec = FieldRecord {
        label: "2.2.8.1".into(),
        degree: 2,
        poly: vec![bi(-2), bi(0), bi(1)],
        integral_basis: vec![vec![br(1), br(0)], vec![br(0), br(1)]],
        disc: bi(8),
        signature: (2, 0),
        h: bi(1),
        h_plus: bi(1),
        torsion_unit: vec![bi(-1), bi(0)],
        units: vec![vec![bi(1), bi(1)]],
        two_factorization: vec![PrimeAboveTwo {
            two_generators: (vec![bi(0), bi(1)], vec![bi(2), bi(0)]),
            e: 2,
            f: 1,
            generator: Some(vec![bi(0), bi(1)]),
        }],
    };
    assert!(matches!(Field::new_base(rec), Err(FieldError::EvenDiscriminant)));
}

#[test]
fn ramified_extension_record_is_accepted() {
    // Q(i) as an extension record: 2 ramifies, torsion generator i.
    let rec = FieldRecord {
        label: "2.0.4.1".into(),
        degree: 2,
        poly: vec![bi(1), bi(0), bi(1)],
        integral_basis: vec![vec![br(1), br(0)], vec![br(0), br(1)]],
        disc: bi(-4),
        signature: (0, 1),
        h: bi(1),
        h_plus: bi(1),
        torsion_unit: vec![bi(0), bi(1)],
        units: vec![],
        two_factorization: vec![PrimeAboveTwo {
            two_generators: (vec![bi(1), bi(1)], vec![bi(1), bi(1)]),
            e: 2,
            f: 1,
            generator: Some(vec![bi(1), bi(1)]),
        }],
    };
    let k = Field::new_extension(rec).unwrap();
    assert_eq!(k.num_primes(), 1);
    // (O/P^2)^x has order 2; the class of i generates it.
    let g = ResidueUnitGroup::new(&k, &[2]).unwrap();
    assert_eq!(g.order(), bi(2));
    let i_elt = vec![bi(0), bi(1)];
    let d = g.dlog(&k, &i_elt).unwrap();
    assert!(d.iter().any(|e| e.is_one()));
}
