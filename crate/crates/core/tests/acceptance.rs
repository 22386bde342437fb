//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line. Fixture-driven tests refuse to run when the checksum manifest
//! does not verify.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use fontaine::fieldcore::{Field, FieldRecord};
use fontaine::ingest::{
    self, load_pack, load_records, verify_manifest, FetchClient, FetchConfig, FieldQuery,
    RecordJson,
};
use fontaine::mat::{snf, snf_diagonal, Mat};
use fontaine::pipeline::{classify, tally, validate_batch, Caps, OdlyzkoTable, Outcome, Path as VPath};
use fontaine::rayclass::{tower_test, witness_field, Modulus, RayClassGroup, TowerStatus};
use fontaine::schemecalc::{
    sort_filtration, Constituent, CtxDichotomy, FiltrationWord, RewriteContext,
};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn checked_fixtures() -> PathBuf {
    let dir = fixtures();
    verify_manifest(&dir).expect("fixture checksum manifest must verify");
    dir
}

fn load_corpus(name: &str) -> Vec<FieldRecord> {
    let out = load_records(&checked_fixtures().join("records").join(name)).unwrap();
    assert!(out.rejections.is_empty(), "corpus records must validate");
    out.records
}

fn pack_for(label: &str, rec: &FieldRecord) -> Option<fontaine::ingest::ExtensionPack> {
    let p = checked_fixtures().join("packs").join(format!("{label}.pack.json"));
    if p.exists() {
        Some(load_pack(&p, rec).unwrap())
    } else {
        None
    }
}

fn classify_with_pack(rec: &FieldRecord, table: &OdlyzkoTable) -> fontaine::pipeline::Verdict {
    let k = Field::new_base(rec.clone()).unwrap();
    let pack = pack_for(&rec.label, rec);
    classify(&k, pack.as_ref(), table, &Caps::default())
}

fn line(criterion: &str, pass: bool, detail: &str) {
    println!("criterion {criterion}: {} — {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {criterion}: {detail}");
}

#[test]
fn criterion1_known_fields() {
    let t0 = std::time::Instant::now();
    let table = OdlyzkoTable::default_grh();
    let deg1 = load_corpus("deg1.jsonl");
    let deg2 = load_corpus("deg2.jsonl");
    let by_label: BTreeMap<String, &FieldRecord> =
        deg1.iter().chain(deg2.iter()).map(|r| (r.label.clone(), r)).collect();

    // Q: Fontaine through the one-prime path.
    let vq = classify_with_pack(by_label["1.1.1.1"], &table);
    assert_eq!(vq.outcome, Outcome::Fontaine);
    assert_eq!(vq.path, Some(VPath::OnePrime));

    // d = 5, 13: Fontaine.
    for label in ["2.2.5.1", "2.2.13.1"] {
        let v = classify_with_pack(by_label[label], &table);
        assert_eq!(v.outcome, Outcome::Fontaine, "{label} must be Fontaine");
    }

    // d = 8, 12: rejected at the validation gate (even discriminant).
    for (poly, disc, unit) in [
        (vec![-2i64, 0, 1], 8i64, vec![1i64, 1]),
        (vec![-3, 0, 1], 12, vec![2, 1]),
    ] {
        let rec = FieldRecord {
            label: format!("2.2.{disc}.1"),
            degree: 2,
            poly: poly.iter().map(|&c| BigInt::from(c)).collect(),
            integral_basis: vec![
                vec![num_rational::BigRational::from_integer(1.into()),
                     num_rational::BigRational::from_integer(0.into())],
                vec![num_rational::BigRational::from_integer(0.into()),
                     num_rational::BigRational::from_integer(1.into())],
            ],
            disc: BigInt::from(disc),
            signature: (2, 0),
            h: BigInt::one(),
            h_plus: BigInt::one(),
            torsion_unit: vec![BigInt::from(-1), BigInt::zero()],
            units: vec![unit.iter().map(|&c| BigInt::from(c)).collect()],
            two_factorization: vec![],
        };
        assert!(
            Field::new_base(rec).is_err(),
            "even-discriminant field must be rejected at validation"
        );
    }

    // d = 21: the truthful record (narrow class number 2) must be rejected
    // at the hypothesis gate...
    let dto: RecordJson = serde_json::from_str(
        &std::fs::read_to_string(checked_fixtures().join("records/quad_sqrt21.json")).unwrap(),
    )
    .unwrap();
    let rec21 = dto.to_record().unwrap();
    assert!(matches!(
        Field::new_base(rec21.clone()),
        Err(fontaine::fieldcore::FieldError::NarrowClassNumber)
    ));

    // ... and d = 17, 21 are stated Fontaine by the criterion. These two
    // legs are expected to fail; see the repository notes on fixture
    // limits (17 needs step-5 witness-quadratic data beyond the shipped
    // corpus; 21 does not satisfy the standing hypotheses at all).
    let v17 = classify_with_pack(by_label["2.2.17.1"], &table);
    let ok17 = v17.outcome == Outcome::Fontaine;
    let ok21 = false; // rejected above; cannot be Fontaine
    let elapsed = t0.elapsed();
    let timing_ok = elapsed.as_secs() < 10;
    line(
        "1",
        ok17 && ok21 && timing_ok,
        &format!(
            "Q, 5, 13 Fontaine; 8, 12 rejected; 17 -> {:?} (want Fontaine); 21 -> rejected \
             (criterion says Fontaine); {elapsed:?}",
            v17.outcome
        ),
    );
}

#[test]
fn criterion2_table2_deg2_row() {
    let t0 = std::time::Instant::now();
    let table = OdlyzkoTable::default_grh();
    let deg2 = load_corpus("deg2.jsonl");
    assert_eq!(deg2.len(), 16, "deg-2 corpus has 16 records");
    let mut verdicts = Vec::new();
    let mut degrees = Vec::new();
    for rec in &deg2 {
        verdicts.push(classify_with_pack(rec, &table));
        degrees.push(rec.degree);
    }
    validate_batch(&verdicts).unwrap();
    // Remaining fields must be Rejected or Inconclusive, never Fontaine.
    for v in &verdicts {
        if matches!(v.outcome, Outcome::Fontaine) {
            continue;
        }
        assert!(
            matches!(v.outcome, Outcome::Rejected { .. } | Outcome::Inconclusive { .. })
                || matches!(v.outcome, Outcome::NoProsaic),
            "unexpected outcome {:?}",
            v.outcome
        );
    }
    let t = tally(&verdicts, &degrees);
    let row = &t.rows[0];
    let got = (
        row.one_prime_d1,
        row.two_prime_d1,
        row.two_prime_d2,
        row.three_prime_d1,
        row.three_prime_d2,
    );
    let want = (3, 1, 1, 0, 0);
    let elapsed = t0.elapsed();
    // The two_prime_d2 = 1 leg requires step-5 witness-quadratic data for
    // Q(√17) that is beyond the shipped corpus; see the notes.
    let never_fontaine_leak = verdicts
        .iter()
        .filter(|v| matches!(v.outcome, Outcome::Fontaine))
        .count()
        == row.total;
    line(
        "2",
        got == want && never_fontaine_leak && elapsed.as_secs() < 60,
        &format!("tallies {got:?} (want {want:?}), {} records, {elapsed:?}", deg2.len()),
    );
}

#[test]
fn criterion3_deg3_corpus_and_consistency() {
    let dir = checked_fixtures();
    // Offline fetch replays exactly 64 records.
    let client = FetchClient::new(
        FetchConfig {
            base_url: "http://unused.invalid".into(),
            page_size: 100,
            offline: true,
            cache_dir: dir.join("cache"),
        },
        None,
    );
    let recs = client
        .fetch_fields(&FieldQuery { degree: 3, max_root_disc: "9.5".into() })
        .unwrap();
    let corpus_ok = recs.len() == 64;

    // Without packs, every field that passes steps 1-2 must be reported
    // Inconclusive (missing pack), never silently counted; nothing can be
    // Fontaine.
    let table = OdlyzkoTable::default_grh();
    let mut verdicts = Vec::new();
    let mut degrees = Vec::new();
    let mut inconclusive_candidates = 0;
    for rec in &recs {
        let k = Field::new_base(rec.clone()).unwrap();
        let v = classify(&k, None, &table, &Caps::default());
        if matches!(v.outcome, Outcome::Inconclusive { .. }) {
            inconclusive_candidates += 1;
        }
        assert!(
            !matches!(v.outcome, Outcome::Fontaine),
            "no Fontaine verdict without extension packs"
        );
        degrees.push(rec.degree);
        verdicts.push(v);
    }
    validate_batch(&verdicts).unwrap();
    line(
        "3 (corpus+consistency)",
        corpus_ok,
        &format!(
            "{} records (want 64); {} pack-limited fields reported inconclusive",
            recs.len(),
            inconclusive_candidates
        ),
    );
}

#[test]
fn criterion3_one_prime_d1_tally() {
    // The spec'd tally of 16 one-prime D1 completions requires the
    // degree-6 extension packs, which the shipped corpus does not carry
    // (see the notes); fields are Inconclusive instead. Asserted as
    // specified; expected to fail honestly.
    let dir = checked_fixtures();
    let client = FetchClient::new(
        FetchConfig {
            base_url: "http://unused.invalid".into(),
            page_size: 100,
            offline: true,
            cache_dir: dir.join("cache"),
        },
        None,
    );
    let recs = client
        .fetch_fields(&FieldQuery { degree: 3, max_root_disc: "9.5".into() })
        .unwrap();
    let table = OdlyzkoTable::default_grh();
    let mut verdicts = Vec::new();
    let mut degrees = Vec::new();
    for rec in &recs {
        let k = Field::new_base(rec.clone()).unwrap();
        degrees.push(rec.degree);
        verdicts.push(classify(&k, None, &table, &Caps::default()));
    }
    let t = tally(&verdicts, &degrees);
    let got = t.rows[0].one_prime_d1;
    line("3 (one-prime D1 tally)", got == 16, &format!("tally {got} (want 16)"));
}

#[test]
fn criterion4_rayclass_oracle_suite() {
    let dir = checked_fixtures();
    let mut records: BTreeMap<String, FieldRecord> = BTreeMap::new();
    for name in ["deg1.jsonl", "deg2.jsonl", "deg3.jsonl"] {
        for r in load_corpus(name) {
            records.insert(r.label.clone(), r);
        }
    }
    // The quartic oracle field ships as a standalone record inside the
    // rayclass fixture itself.
    let mut cases = 0;
    for entry in std::fs::read_dir(dir.join("rayclass")).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().map_or(true, |e| e != "json") {
            continue;
        }
        let fixture: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let label = fixture["label"].as_str().unwrap();
        let rec = records
            .get(label)
            .cloned()
            .or_else(|| {
                let p = dir.join(format!("records/{label}.json"));
                p.exists().then(|| {
                    let dto: RecordJson =
                        serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
                    dto.to_record().unwrap()
                })
            })
            .unwrap_or_else(|| panic!("record {label} for oracle fixture"));
        let field = Field::new_base(rec).unwrap();
        let exps: Vec<usize> = fixture["modulus"]["exps"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_u64().unwrap() as usize)
            .collect();
        let infinite = fixture["modulus"]["infinite"].as_bool().unwrap();
        let r = RayClassGroup::new(&field, Modulus::new(exps, infinite)).unwrap();
        let got: Vec<String> =
            r.group.invariant_factors().iter().map(|d| d.to_string()).collect();
        let want: Vec<String> = fixture["invariant_factors"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_str().unwrap().to_string())
            .collect();
        assert_eq!(got, want, "oracle mismatch at {}", path.display());
        cases += 1;
    }
    line("4", cases >= 10, &format!("{cases} oracle fixtures matched exactly"));
}

#[test]
fn criterion5_snf_property_suite() {
    // Oracle: invariant factors via gcds of k x k minors.
    fn minors_gcd(m: &Mat, k: usize) -> BigInt {
        let rows: Vec<usize> = (0..m.rows).collect();
        let cols: Vec<usize> = (0..m.cols).collect();
        let mut g = BigInt::zero();
        for rsel in combinations(&rows, k) {
            for csel in combinations(&cols, k) {
                let mut sub = Mat::zeros(k, k);
                for (i, &r) in rsel.iter().enumerate() {
                    for (j, &c) in csel.iter().enumerate() {
                        sub[(i, j)] = m[(r, c)].clone();
                    }
                }
                g = num_integer::Integer::gcd(&g, &sub.det());
            }
        }
        g
    }
    fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        if items.len() < k {
            return vec![];
        }
        let mut out = Vec::new();
        for (i, &x) in items.iter().enumerate() {
            for mut rest in combinations(&items[i + 1..], k - 1) {
                let mut v = vec![x];
                v.append(&mut rest);
                out.push(v);
            }
        }
        out
    }
    fn oracle_factors(m: &Mat) -> Vec<BigInt> {
        let n = m.rows.min(m.cols);
        let mut out = Vec::new();
        let mut prev = BigInt::one();
        for k in 1..=n {
            let g = minors_gcd(m, k);
            if g.is_zero() {
                out.push(BigInt::zero());
                // all further are zero as well
                for _ in k + 1..=n {
                    out.push(BigInt::zero());
                }
                break;
            }
            out.push(&g / &prev);
            prev = g;
        }
        out
    }
    fn check(m: &Mat) {
        let s = snf(m);
        assert_eq!(s.u.mul(m).mul(&s.v), s.s, "transform identity");
        assert_eq!(s.u.det().abs(), BigInt::one());
        assert_eq!(s.v.det().abs(), BigInt::one());
        let got = snf_diagonal(&s.s);
        let want = oracle_factors(m);
        assert_eq!(got, want, "gcd-of-minors oracle disagrees for {m:?}");
    }

    // Exhaustive 2x2 with entries in [-5, 5].
    let mut exhaustive = 0u64;
    for a in -5i64..=5 {
        for b in -5i64..=5 {
            for c in -5i64..=5 {
                for d in -5i64..=5 {
                    check(&Mat::from_i64(&[&[a, b], &[c, d]]));
                    exhaustive += 1;
                }
            }
        }
    }
    // 10^4 random matrices up to 4x4 with entries in [-20, 20].
    let mut state = 0x5eed5eedu64;
    let mut rand = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        state >> 33
    };
    for _ in 0..10_000 {
        let rows = (rand() % 4 + 1) as usize;
        let cols = (rand() % 4 + 1) as usize;
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = BigInt::from((rand() % 41) as i64 - 20);
            }
        }
        check(&m);
    }
    line("5", true, &format!("{exhaustive} exhaustive 2x2 + 10000 random, zero failures"));
}

#[test]
fn criterion6_sorter_property_suite() {
    let shapes = [
        RewriteContext::new(1, CtxDichotomy::D1, true, true),
        RewriteContext::new(2, CtxDichotomy::D2, true, true),
        RewriteContext::new(3, CtxDichotomy::D2, true, true),
    ];
    let mut sorted_count = 0u64;
    for ctx in shapes {
        let universe: Vec<Constituent> =
            (0..(1u8 << ctx.nprimes)).map(|mask| Constituent { mask }).collect();
        // Exhaustive words of length <= 6.
        let mut words: Vec<Vec<Constituent>> = vec![vec![]];
        for len in 1..=6usize {
            let mut level: Vec<Vec<Constituent>> = vec![vec![]];
            for _ in 0..len {
                let mut next = Vec::new();
                for w in &level {
                    for &k in &universe {
                        let mut v = w.clone();
                        v.push(k);
                        next.push(v);
                    }
                }
                level = next;
            }
            words.extend(level);
        }
        for entries in words {
            check_word(ctx, entries);
            sorted_count += 1;
        }
    }
    // 10^4 random words of length <= 12 over the 3-prime shape.
    let ctx = RewriteContext::new(3, CtxDichotomy::D2, true, true);
    let universe: Vec<Constituent> = (0..8u8).map(|mask| Constituent { mask }).collect();
    let mut state = 0xabcdefu64;
    let mut rand = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        state >> 33
    };
    for _ in 0..10_000 {
        let len = (rand() % 12 + 1) as usize;
        let entries: Vec<Constituent> =
            (0..len).map(|_| universe[(rand() % 8) as usize]).collect();
        check_word(ctx, entries);
        sorted_count += 1;
    }
    line("6", true, &format!("{sorted_count} words sorted with all invariants, zero failures"));

    fn check_word(ctx: RewriteContext, entries: Vec<Constituent>) {
        let w = FiltrationWord { entries: entries.clone(), ctx };
        let (sorted, trace) = sort_filtration(&w).expect("QE-true contexts always sort");
        assert!(sorted.is_sorted(), "canonical block order");
        // Idempotence.
        let (again, t2) = sort_filtration(&sorted).unwrap();
        assert_eq!(again.entries, sorted.entries);
        assert!(t2.is_empty());
        // Replay the trace; check multiset/support preservation and the
        // strictly increasing potential.
        let potential = |w: &[Constituent]| -> usize {
            w.iter().enumerate().map(|(i, &k)| (i + 1) * ctx.canonical_position(k)).sum()
        };
        let support = |w: &[Constituent]| -> Vec<usize> {
            let mut s = vec![0; ctx.nprimes];
            for e in w {
                for (i, slot) in s.iter_mut().enumerate() {
                    if e.mask & (1 << i) != 0 {
                        *slot += 1;
                    }
                }
            }
            s
        };
        let mut cur = entries.clone();
        let mut pot = potential(&cur);
        for step in &trace {
            let before = cur.clone();
            cur[step.index] = Constituent::parse(&step.after.0, ctx.nprimes).unwrap();
            cur[step.index + 1] = Constituent::parse(&step.after.1, ctx.nprimes).unwrap();
            if step.kind == "swap" {
                let mut a = before.clone();
                let mut b = cur.clone();
                a.sort();
                b.sort();
                assert_eq!(a, b, "plain swaps preserve the multiset");
            }
            assert_eq!(support(&before), support(&cur), "support multiset preserved");
            let np = potential(&cur);
            assert!(np > pot, "termination potential strictly increases");
            pot = np;
        }
        assert_eq!(cur, sorted.entries, "trace replays to the sorted word");
    }
}

#[test]
fn criterion7_consistency_assertions() {
    // Prop-style cross-checks on every corpus field: trivial witness
    // forces d_pi >= r1 + r2; a finite single-prime tower forces
    // d_pi <= r1 + r2 - 1.
    let mut fields = 0;
    for name in ["deg1.jsonl", "deg2.jsonl", "deg3.jsonl"] {
        for rec in load_corpus(name) {
            let k = Field::new_base(rec).unwrap();
            let rank = k.r1 + k.r2;
            for idx in 0..k.num_primes() {
                let w = witness_field(&k, idx).unwrap();
                let d = k.primes_above_two()[idx].local_degree();
                if w.witness_degree.is_one() {
                    assert!(d >= rank, "{}: dpi(i) violated", k.record.label);
                }
                let mut rho = vec![false; k.num_primes()];
                rho[idx] = true;
                let t = tower_test(&k, &rho, 8).unwrap();
                if matches!(t.status, TowerStatus::Finite { .. }) {
                    assert!(d <= rank - 1, "{}: dpi(iii) violated", k.record.label);
                }
            }
            fields += 1;
        }
    }
    line("7", fields >= 17, &format!("{fields} fields cross-checked, zero violations"));
}

#[test]
fn criterion8_batch_determinism() {
    // Byte-identical verdict streams across parallelism settings, via the
    // real CLI binary.
    let dir = checked_fixtures();
    let input = dir.join("records/deg2.jsonl");
    let packs = dir.join("packs");
    let bin = env!("CARGO_BIN_EXE_fontaine");
    let run = |threads: usize| -> (String, i32) {
        let out = std::process::Command::new(bin)
            .args([
                "batch",
                "--input",
                input.to_str().unwrap(),
                "--packs",
                packs.to_str().unwrap(),
                "--parallelism",
                &threads.to_string(),
            ])
            .output()
            .unwrap();
        (String::from_utf8(out.stdout).unwrap(), out.status.code().unwrap())
    };
    let (out1, code1) = run(1);
    let (out4, code4) = run(4);
    let identical = out1 == out4 && code1 == code4 && !out1.is_empty();
    line("8", identical, &format!("streams identical across parallelism ({} bytes)", out1.len()));
}

#[test]
fn shipped_table_lookup_is_pinned() {
    // Committed lookup values for the embedded table.
    let t = OdlyzkoTable::default_grh();
    assert_eq!(t.degree_bound_four_delta(&BigInt::from(5), 2).unwrap(), 24);
    let via_file = ingest::load_odlyzko(&checked_fixtures().join("odlyzko/odlyzko_grh.csv"))
        .unwrap();
    assert_eq!(via_file.degree_bound_four_delta(&BigInt::from(5), 2).unwrap(), 24);
}

const _: fn(&Path) = |_p| {};
