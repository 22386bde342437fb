//! Scratch harness: classify the known fields end-to-end while the
//! corpus builders are under construction.

use std::collections::BTreeMap;

use fontaine::fieldcore::Field;
use fontaine::ingest::ExtensionPack;
use fontaine::pipeline::{classify, Caps, OdlyzkoTable};

use crate::quad::{build_corpus, build_q};
use crate::quartic::{pack_for_minus3, pack_for_minus7, pack_for_q, pack_for_real_quad, Pack};

fn to_ext_pack(p: &Pack) -> ExtensionPack {
    let mut base_quadratics = BTreeMap::new();
    for e in &p.entries {
        base_quadratics.insert(e.square_class, e.record.clone());
    }
    ExtensionPack {
        base_label: p.base_label.clone(),
        provenance: "fixturegen certified search".into(),
        base_quadratics,
        witness_quadratics: None,
    }
}

pub fn witness_17_details() {
    use crate::quad::build_quad;
    use crate::quartic::pack_for_real_quad;
    let base = build_quad(17);
    let pack = pack_for_real_quad(&base);
    // mask 3 = -epsilon: the witness field.
    let wit = &pack.entries[2].record;
    println!("witness record: h = {}, h+ = {}, disc = {}", wit.h, wit.h_plus, wit.disc);
    println!("units: torsion {:?}, fundamentals {:?}", wit.torsion_unit, wit.units);
    println!("two_factorization: {:?}", wit.two_factorization.iter().map(|p| (p.e, p.f)).collect::<Vec<_>>());
    let kw = Field::new_extension(wit.clone()).unwrap();
    // R invariants via the engine's cokernel + h.
    let g = fontaine::fieldcore::ResidueUnitGroup::new(&kw, &vec![2; kw.num_primes()]).unwrap();
    println!("(O/P^2)^x invariants: {:?}", g.group.invariant_factors().iter().map(|d| d.to_string()).collect::<Vec<_>>());
    let ok = fontaine::rayclass::extension_ray_class_is_2group(&kw).unwrap();
    let order = fontaine::rayclass::extension_ray_class_order(&kw).unwrap();
    println!("R 2-group: {ok}, |R| = {order}");
    // Also show K(i) for d=17: h should be 2 or 4.
    println!("K(i) h = {}", pack.entries[0].record.h);
    // cok invariants: rebuild by hand like extension_unit_cokernel does.
    use fontaine::abgroup::FinAbGroup;
    use num_bigint::BigInt;
    let sign_block = FinAbGroup::from_invariants(&vec![BigInt::from(2); kw.r1]);
    let ambient = g.group.direct_sum(&sign_block);
    let mut images = Vec::new();
    let mut gens = vec![kw.record.torsion_unit.clone()];
    gens.extend(kw.record.units.iter().cloned());
    for u in &gens {
        let mut v = g.dlog(&kw, u).unwrap();
        v.extend(kw.sign_bits(u));
        images.push(v);
    }
    let cok = ambient.quotient(&images);
    println!("cok invariants: {:?}", cok.invariant_factors().iter().map(|d| d.to_string()).collect::<Vec<_>>());
}

pub fn run_probe() {
    let table = OdlyzkoTable::default_grh();
    let caps = Caps::default();

    let q_rec = build_q();
    let q_pack = to_ext_pack(&pack_for_q());
    let kq = Field::new_base(q_rec).unwrap();
    let v = classify(&kq, Some(&q_pack), &table, &caps);
    println!("Q: {:?} path {:?}", v.outcome, v.path);

    for f in build_corpus() {
        let pack = match f.d {
            5 | 13 | 17 => Some(to_ext_pack(&pack_for_real_quad(&f))),
            -3 => Some(to_ext_pack(&pack_for_minus3(&f))),
            -7 => Some(to_ext_pack(&pack_for_minus7(&f))),
            _ => None,
        };
        let k = Field::new_base(f.record.clone()).unwrap();
        let v = classify(&k, pack.as_ref(), &table, &caps);
        println!("{} (d={}): {:?} path {:?}", f.record.label, f.d, v.outcome, v.path);
        if f.d == 17 {
            println!("  evidence: {}", serde_json::to_string_pretty(&v.evidence).unwrap());
        }
    }
}
