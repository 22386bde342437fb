//! Generates the committed fixture corpus: field records, extension
//! packs, ray class oracle values, service cache pages, and the checksum
//! manifest. Every number in the output is produced by the certified
//! machinery in this crate and revalidated through the library.

mod cubic;
mod embed;
mod interval;
mod oracle;
mod ord;
mod probe;
mod quad;
mod quartic;
mod records;
mod units;

use std::path::{Path, PathBuf};

use fontaine::fieldcore::{Field, FieldRecord};
use fontaine::ingest::{
    build_manifest, FieldQuery, PackEntryJson, PackJson, RecordJson, WitnessQuadraticsJson,
};
use fontaine::rayclass::Modulus;

fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

fn write(path: &Path, contents: &str) {
    std::fs::create_dir_all(path.parent().unwrap()).unwrap();
    std::fs::write(path, contents).unwrap();
    println!("wrote {}", path.display());
}

fn record_line(rec: &FieldRecord) -> String {
    serde_json::to_string(&RecordJson::from_record(rec)).unwrap()
}

fn service_page(records: &[&FieldRecord]) -> String {
    let results: Vec<RecordJson> = records.iter().map(|r| RecordJson::from_record(r)).collect();
    serde_json::to_string(&serde_json::json!({
        "results": results,
        "next": false,
    }))
    .unwrap()
}

fn emit_all() {
    let dir = fixtures_dir();
    let quads = quad::build_corpus();
    let q_rec = quad::build_q();

    // records/deg1.jsonl, deg2.jsonl
    write(&dir.join("records/deg1.jsonl"), &format!("{}\n", record_line(&q_rec)));
    let deg2: String = quads.iter().map(|f| record_line(&f.record) + "\n").collect();
    write(&dir.join("records/deg2.jsonl"), &deg2);

    // The truthful record for disc 21 (narrow class number 2): used by the
    // acceptance suite to check the ingestion gate.
    write(
        &dir.join("records/quad_sqrt21.json"),
        &serde_json::to_string_pretty(&RecordJson::from_record(&quad::build_sqrt21())).unwrap(),
    );

    // Individual record files for the CLI examples.
    write(
        &dir.join("records/q.json"),
        &serde_json::to_string_pretty(&RecordJson::from_record(&q_rec)).unwrap(),
    );
    for f in &quads {
        if [5, 13, 17, -3, -7].contains(&f.d) {
            let name = format!("records/{}.json", f.record.label);
            write(
                &dir.join(name),
                &serde_json::to_string_pretty(&RecordJson::from_record(&f.record)).unwrap(),
            );
        }
    }

    // Extension packs.
    let mut packs: Vec<quartic::Pack> = vec![quartic::pack_for_q()];
    for f in &quads {
        match f.d {
            5 | 13 | 17 => packs.push(quartic::pack_for_real_quad(f)),
            -3 => packs.push(quartic::pack_for_minus3(f)),
            -7 => packs.push(quartic::pack_for_minus7(f)),
            _ => {}
        }
    }
    for p in &packs {
        let dto = PackJson {
            schema: fontaine::ingest::PACK_SCHEMA.into(),
            base_label: p.base_label.clone(),
            provenance: "fixturegen: certified unit search and class-number proofs".into(),
            base_quadratics: p
                .entries
                .iter()
                .map(|e| PackEntryJson {
                    square_class: e.square_class,
                    record: RecordJson::from_record(&e.record),
                })
                .collect(),
            witness_quadratics: None::<WitnessQuadraticsJson>,
        };
        write(
            &dir.join(format!("packs/{}.pack.json", p.base_label)),
            &serde_json::to_string_pretty(&dto).unwrap(),
        );
    }

    // Degree-3 corpus.
    let cubics = cubic::cubic_corpus();
    println!("cubic corpus: {} fields", cubics.len());
    let deg3: String = cubics.iter().map(|f| record_line(&f.record) + "\n").collect();
    write(&dir.join("records/deg3.jsonl"), &deg3);

    // Service cache pages for offline fetch replay.
    let q2 = FieldQuery { degree: 2, max_root_disc: "9.5".into() };
    let refs2: Vec<&FieldRecord> = quads.iter().map(|f| &f.record).collect();
    write(
        &dir.join(format!("cache/q_{}.json", q2.cache_key())),
        &serde_json::to_string(&vec![service_page(&refs2)]).unwrap(),
    );
    let q3 = FieldQuery { degree: 3, max_root_disc: "9.5".into() };
    let refs3: Vec<&FieldRecord> = cubics.iter().map(|f| &f.record).collect();
    write(
        &dir.join(format!("cache/q_{}.json", q3.cache_key())),
        &serde_json::to_string(&vec![service_page(&refs3)]).unwrap(),
    );
    let q1 = FieldQuery { degree: 1, max_root_disc: "9.5".into() };
    write(
        &dir.join(format!("cache/q_{}.json", q1.cache_key())),
        &serde_json::to_string(&vec![service_page(&[&q_rec])]).unwrap(),
    );

    // Ray class oracle fixtures from the independent brute-force route.
    emit_oracle(&dir, &q_rec, &quads, &cubics);

    // Root discriminant table copy for the CLI path.
    write(
        &dir.join("odlyzko/odlyzko_grh.csv"),
        include_str!("../../core/data/odlyzko_grh.csv"),
    );

    // Checksum manifest last.
    let manifest = build_manifest(&dir).unwrap();
    write(&dir.join("MANIFEST.json"), &serde_json::to_string_pretty(&manifest).unwrap());
}

fn emit_oracle(
    dir: &Path,
    q_rec: &FieldRecord,
    quads: &[quad::QuadField],
    cubics: &[cubic::CubicField],
) {
    let mut cases: Vec<(FieldRecord, Modulus)> = vec![
        (q_rec.clone(), Modulus::new(vec![3], true)),
        (q_rec.clone(), Modulus::new(vec![4], true)),
        (q_rec.clone(), Modulus::new(vec![2], false)),
    ];
    let by_d = |d: i64| -> &quad::QuadField { quads.iter().find(|f| f.d == d).unwrap() };
    cases.push((by_d(5).record.clone(), Modulus::new(vec![2], true)));
    cases.push((by_d(5).record.clone(), Modulus::new(vec![3], true)));
    cases.push((by_d(13).record.clone(), Modulus::new(vec![2], true)));
    cases.push((by_d(17).record.clone(), Modulus::new(vec![0, 2], true)));
    cases.push((by_d(17).record.clone(), Modulus::new(vec![2, 2], true)));
    cases.push((by_d(-7).record.clone(), Modulus::new(vec![3, 0], true)));
    cases.push((by_d(-3).record.clone(), Modulus::new(vec![2], true)));
    // A cubic with 2 inert (x^3 - x - 1, disc -23).
    let c23 = cubics
        .iter()
        .find(|f| f.record.disc == num_bigint::BigInt::from(-23))
        .expect("disc -23 cubic in corpus");
    cases.push((c23.record.clone(), Modulus::new(vec![2], true)));
    // Degree 4: the cyclotomic field of conductor 5 (odd disc 125).
    let zeta5 = quartic::zeta5_record();
    write(
        &dir.join("records/4.0.125.1.json"),
        &serde_json::to_string_pretty(&RecordJson::from_record(&zeta5)).unwrap(),
    );
    cases.push((zeta5.clone(), Modulus::new(vec![2], true)));
    cases.push((zeta5, Modulus::new(vec![1], true)));

    for (rec, modulus) in &cases {
        let field = Field::new_base(rec.clone()).expect("oracle fields are base fields");
        let inv = oracle::brute_force_ray_class(&field, modulus);
        let inv_str: Vec<String> = inv.iter().map(|d| d.to_string()).collect();
        let body = serde_json::json!({
            "label": rec.label,
            "modulus": {"exps": modulus.exps, "infinite": modulus.infinite},
            "invariant_factors": inv_str,
        });
        let name = format!("rayclass/{}__{}.json", rec.label, modulus.token());
        write(&dir.join(&name), &serde_json::to_string_pretty(&body).unwrap());
    }
    println!("oracle fixtures: {} cases", cases.len());
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    match args.get(1).map(String::as_str) {
        Some("probe") => probe::run_probe(),
        Some("w17") => probe::witness_17_details(),
        Some("cubics") => {
            let t0 = std::time::Instant::now();
            let corpus = cubic::cubic_corpus();
            println!("cubic corpus: {} fields in {:?}", corpus.len(), t0.elapsed());
            for f in &corpus {
                println!(
                    "{}  disc {}  sig {:?}  h {}",
                    f.record.label, f.record.disc, f.record.signature, f.record.h
                );
            }
        }
        Some("all") => emit_all(),
        _ => println!("usage: fixturegen all|probe|w17|cubics"),
    }
}
