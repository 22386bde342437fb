//! Ingestion: field-record and extension-pack JSON, the root-discriminant
//! table CSV, a small REST client with an offline replay cache, and the
//! fixture checksum manifest.
//!
//! All integers are encoded as strings in JSON; rationals as "a" or "a/b".
//! No floating point appears in records.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::fieldcore::{Elem, Field, FieldRecord, PrimeAboveTwo};
use crate::pipeline::OdlyzkoTable;

pub const RECORD_SCHEMA: &str = "fontaine.fieldrecord.v1";
pub const PACK_SCHEMA: &str = "fontaine.fieldpack.v1";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("validation error in field '{field}': {msg}")]
    Validation { field: String, msg: String },
    #[error("root discriminant table is not monotone: {0}")]
    NonMonotone(String),
    #[error("network error: {0}")]
    Network(String),
    #[error("service schema drift: {0}")]
    SchemaDrift(String),
    #[error("fixture checksum mismatch: {0}")]
    Checksum(String),
}

// ----- JSON encoding of field records -----

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RecordJson {
    pub schema: String,
    pub label: String,
    pub degree: usize,
    pub poly: Vec<String>,
    pub integral_basis: Vec<Vec<String>>,
    pub disc: String,
    pub signature: (usize, usize),
    pub h: String,
    pub h_plus: String,
    pub units: UnitsJson,
    pub two_factorization: Vec<PrimeJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UnitsJson {
    pub torsion: Vec<String>,
    pub fundamental: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PrimeJson {
    pub two_generators: (Vec<String>, Vec<String>),
    pub e: usize,
    pub f: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<Vec<String>>,
}

fn parse_int(s: &str, field: &str) -> Result<BigInt, IngestError> {
    s.parse().map_err(|_| IngestError::Validation {
        field: field.into(),
        msg: format!("not an integer: {s:?}"),
    })
}

fn parse_rat(s: &str, field: &str) -> Result<BigRational, IngestError> {
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(parse_int(s, field)?)),
        Some((a, b)) => {
            let num = parse_int(a, field)?;
            let den = parse_int(b, field)?;
            if den == BigInt::from(0) {
                return Err(IngestError::Validation {
                    field: field.into(),
                    msg: "zero denominator".into(),
                });
            }
            Ok(BigRational::new(num, den))
        }
    }
}

fn parse_vec(v: &[String], field: &str) -> Result<Elem, IngestError> {
    v.iter().map(|s| parse_int(s, field)).collect()
}

impl RecordJson {
    pub fn to_record(&self) -> Result<FieldRecord, IngestError> {
        if self.schema != RECORD_SCHEMA {
            return Err(IngestError::Validation {
                field: "schema".into(),
                msg: format!("expected {RECORD_SCHEMA}, got {}", self.schema),
            });
        }
        Ok(FieldRecord {
            label: self.label.clone(),
            degree: self.degree,
            poly: self
                .poly
                .iter()
                .map(|s| parse_int(s, "poly"))
                .collect::<Result<_, _>>()?,
            integral_basis: self
                .integral_basis
                .iter()
                .map(|row| row.iter().map(|s| parse_rat(s, "integral_basis")).collect())
                .collect::<Result<_, _>>()?,
            disc: parse_int(&self.disc, "disc")?,
            signature: self.signature,
            h: parse_int(&self.h, "h")?,
            h_plus: parse_int(&self.h_plus, "h_plus")?,
            torsion_unit: parse_vec(&self.units.torsion, "units.torsion")?,
            units: self
                .units
                .fundamental
                .iter()
                .map(|u| parse_vec(u, "units.fundamental"))
                .collect::<Result<_, _>>()?,
            two_factorization: self
                .two_factorization
                .iter()
                .map(|p| -> Result<PrimeAboveTwo, IngestError> {
                    Ok(PrimeAboveTwo {
                        two_generators: (
                            parse_vec(&p.two_generators.0, "two_generators")?,
                            parse_vec(&p.two_generators.1, "two_generators")?,
                        ),
                        e: p.e,
                        f: p.f,
                        generator: p
                            .generator
                            .as_ref()
                            .map(|g| parse_vec(g, "generator"))
                            .transpose()?,
                    })
                })
                .collect::<Result<_, _>>()?,
        })
    }

    pub fn from_record(rec: &FieldRecord) -> RecordJson {
        RecordJson {
            schema: RECORD_SCHEMA.into(),
            label: rec.label.clone(),
            degree: rec.degree,
            poly: rec.poly.iter().map(|c| c.to_string()).collect(),
            integral_basis: rec
                .integral_basis
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|c| {
                            if c.denom().is_one() {
                                c.numer().to_string()
                            } else {
                                format!("{}/{}", c.numer(), c.denom())
                            }
                        })
                        .collect()
                })
                .collect(),
            disc: rec.disc.to_string(),
            signature: rec.signature,
            h: rec.h.to_string(),
            h_plus: rec.h_plus.to_string(),
            units: UnitsJson {
                torsion: rec.torsion_unit.iter().map(|c| c.to_string()).collect(),
                fundamental: rec
                    .units
                    .iter()
                    .map(|u| u.iter().map(|c| c.to_string()).collect())
                    .collect(),
            },
            two_factorization: rec
                .two_factorization
                .iter()
                .map(|p| PrimeJson {
                    two_generators: (
                        p.two_generators.0.iter().map(|c| c.to_string()).collect(),
                        p.two_generators.1.iter().map(|c| c.to_string()).collect(),
                    ),
                    e: p.e,
                    f: p.f,
                    generator: p
                        .generator
                        .as_ref()
                        .map(|g| g.iter().map(|c| c.to_string()).collect()),
                })
                .collect(),
        }
    }
}

/// A record that failed Hypothesis-K validation, reported rather than
/// raised.
#[derive(Clone, Debug, Serialize)]
pub struct Rejection {
    pub line: usize,
    pub label: String,
    pub reason: String,
}

#[derive(Debug, Default)]
pub struct LoadOutcome {
    pub records: Vec<FieldRecord>,
    pub rejections: Vec<Rejection>,
}

/// Load a JSON-lines file of field records, validating each against the
/// standing hypotheses. Violations become structured rejections.
pub fn load_records(path: &Path) -> Result<LoadOutcome, IngestError> {
    let contents = std::fs::read_to_string(path)?;
    load_records_str(&contents)
}

pub fn load_records_str(contents: &str) -> Result<LoadOutcome, IngestError> {
    let mut out = LoadOutcome::default();
    for (i, line) in contents.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let dto: RecordJson = serde_json::from_str(line)
            .map_err(|e| IngestError::Parse { line: lineno, msg: e.to_string() })?;
        let rec = dto.to_record()?;
        match Field::new_base(rec.clone()) {
            Ok(_) => out.records.push(rec),
            Err(e) => out.rejections.push(Rejection {
                line: lineno,
                label: rec.label.clone(),
                reason: e.to_string(),
            }),
        }
    }
    Ok(out)
}

// ----- extension packs -----

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PackJson {
    pub schema: String,
    pub base_label: String,
    pub provenance: String,
    pub base_quadratics: Vec<PackEntryJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_quadratics: Option<WitnessQuadraticsJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PackEntryJson {
    /// Bitmask over the unit square-class generators (bit 0 = torsion).
    pub square_class: u32,
    pub record: RecordJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessQuadraticsJson {
    pub declared_two_rank: usize,
    pub complete: bool,
    pub records: Vec<RecordJson>,
}

#[derive(Clone, Debug)]
pub struct WitnessQuadratics {
    pub declared_two_rank: usize,
    pub complete: bool,
    pub records: Vec<FieldRecord>,
}

/// Records for the quadratic extensions needed by the pack-consuming
/// steps, keyed by unit square class.
#[derive(Clone, Debug)]
pub struct ExtensionPack {
    pub base_label: String,
    pub provenance: String,
    pub base_quadratics: BTreeMap<u32, FieldRecord>,
    pub witness_quadratics: Option<WitnessQuadratics>,
}

pub fn load_pack(path: &Path, base: &FieldRecord) -> Result<ExtensionPack, IngestError> {
    let contents = std::fs::read_to_string(path)?;
    load_pack_str(&contents, base)
}

pub fn load_pack_str(contents: &str, base: &FieldRecord) -> Result<ExtensionPack, IngestError> {
    let dto: PackJson = serde_json::from_str(contents)
        .map_err(|e| IngestError::Parse { line: 0, msg: e.to_string() })?;
    if dto.schema != PACK_SCHEMA {
        return Err(IngestError::Validation {
            field: "schema".into(),
            msg: format!("expected {PACK_SCHEMA}"),
        });
    }
    if dto.provenance.trim().is_empty() {
        return Err(IngestError::Validation {
            field: "provenance".into(),
            msg: "must be non-empty".into(),
        });
    }
    if dto.base_label != base.label {
        return Err(IngestError::Validation {
            field: "base_label".into(),
            msg: format!("pack is for {}, base is {}", dto.base_label, base.label),
        });
    }
    let mut base_quadratics = BTreeMap::new();
    for e in &dto.base_quadratics {
        let rec = e.record.to_record()?;
        if rec.degree % base.degree != 0 {
            return Err(IngestError::Validation {
                field: "base_quadratics".into(),
                msg: format!(
                    "degree {} does not factor through base degree {}",
                    rec.degree, base.degree
                ),
            });
        }
        if base_quadratics.insert(e.square_class, rec).is_some() {
            return Err(IngestError::Validation {
                field: "base_quadratics".into(),
                msg: format!("duplicate square class {}", e.square_class),
            });
        }
    }
    let witness_quadratics = dto
        .witness_quadratics
        .as_ref()
        .map(|w| -> Result<WitnessQuadratics, IngestError> {
            Ok(WitnessQuadratics {
                declared_two_rank: w.declared_two_rank,
                complete: w.complete,
                records: w
                    .records
                    .iter()
                    .map(|r| r.to_record())
                    .collect::<Result<_, _>>()?,
            })
        })
        .transpose()?;
    Ok(ExtensionPack {
        base_label: dto.base_label,
        provenance: dto.provenance,
        base_quadratics,
        witness_quadratics,
    })
}

// ----- root discriminant table -----

/// CSV with header "degree,grh_root_disc_bound"; bounds are exact decimal
/// strings.
pub fn load_odlyzko(path: &Path) -> Result<OdlyzkoTable, IngestError> {
    let contents = std::fs::read_to_string(path)?;
    parse_odlyzko_csv(&contents)
}

pub fn parse_odlyzko_csv(contents: &str) -> Result<OdlyzkoTable, IngestError> {
    let mut lines = contents.lines().enumerate();
    let header = lines
        .next()
        .ok_or(IngestError::Parse { line: 1, msg: "empty table".into() })?
        .1
        .trim();
    if header != "degree,grh_root_disc_bound" {
        return Err(IngestError::Parse { line: 1, msg: format!("bad header {header:?}") });
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (d, b) = line.split_once(',').ok_or(IngestError::Parse {
            line: i + 1,
            msg: "expected two columns".into(),
        })?;
        let deg: u64 = d.trim().parse().map_err(|_| IngestError::Parse {
            line: i + 1,
            msg: format!("bad degree {d:?}"),
        })?;
        rows.push((deg, parse_decimal(b.trim()).map_err(|m| IngestError::Parse {
            line: i + 1,
            msg: m,
        })?));
    }
    OdlyzkoTable::new(rows).map_err(IngestError::NonMonotone)
}

/// Exact decimal string to rational: "13.05" -> 1305/100.
pub fn parse_decimal(s: &str) -> Result<BigRational, String> {
    let (int_part, frac_part) = match s.split_once('.') {
        None => (s, ""),
        Some((a, b)) => (a, b),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(format!("bad decimal {s:?}"));
    }
    let digits = format!("{}{}", int_part, frac_part);
    let num: BigInt = digits.parse().map_err(|_| format!("bad decimal {s:?}"))?;
    let den = num_traits::pow::pow(BigInt::from(10), frac_part.len());
    Ok(BigRational::new(num, den))
}

// ----- REST client with offline cache -----

/// Transport abstraction so tests can count or forbid network calls.
pub trait HttpBackend: Send + Sync {
    fn get(&self, url: &str) -> Result<String, String>;
}

/// Minimal HTTP/1.1 GET over a TcpStream; enough for the pinned service
/// schema and for tests against a localhost listener.
pub struct TcpHttpBackend {
    pub timeout: std::time::Duration,
}

impl HttpBackend for TcpHttpBackend {
    fn get(&self, url: &str) -> Result<String, String> {
        let rest = url
            .strip_prefix("http://")
            .ok_or_else(|| format!("only http:// urls are supported, got {url}"))?;
        let (host, path) = match rest.split_once('/') {
            Some((h, p)) => (h, format!("/{p}")),
            None => (rest, "/".to_string()),
        };
        let addr = if host.contains(':') { host.to_string() } else { format!("{host}:80") };
        let mut stream = std::net::TcpStream::connect(&addr).map_err(|e| e.to_string())?;
        stream.set_read_timeout(Some(self.timeout)).map_err(|e| e.to_string())?;
        stream.set_write_timeout(Some(self.timeout)).map_err(|e| e.to_string())?;
        use std::io::Write;
        let request = format!(
            "GET {path} HTTP/1.1\r\nHost: {host}\r\nConnection: close\r\nAccept: application/json\r\n\r\n"
        );
        stream.write_all(request.as_bytes()).map_err(|e| e.to_string())?;
        let mut buf = String::new();
        stream.read_to_string(&mut buf).map_err(|e| e.to_string())?;
        let (head, body) = buf
            .split_once("\r\n\r\n")
            .ok_or_else(|| "malformed http response".to_string())?;
        let status = head.lines().next().unwrap_or_default();
        if !status.contains("200") {
            return Err(format!("http status: {status}"));
        }
        Ok(body.to_string())
    }
}

#[derive(Clone, Debug)]
pub struct FetchConfig {
    pub base_url: String,
    pub page_size: usize,
    pub offline: bool,
    pub cache_dir: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldQuery {
    pub degree: usize,
    /// Maximum root discriminant, an exact decimal string.
    pub max_root_disc: String,
}

impl FieldQuery {
    /// Canonical query string; the cache key is its digest. The corpus
    /// constraints (odd discriminant, narrow class number one) are part of
    /// the pinned service contract.
    pub fn canonical(&self) -> String {
        format!(
            "degree={}&max_rd={}&odd_disc=1&h_plus=1",
            self.degree, self.max_root_disc
        )
    }

    pub fn cache_key(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }
}

#[derive(Serialize, Deserialize)]
struct ServicePage {
    results: Vec<RecordJson>,
    #[serde(default)]
    next: bool,
}

pub struct FetchClient<'a> {
    pub config: FetchConfig,
    backend: Option<&'a dyn HttpBackend>,
}

impl<'a> FetchClient<'a> {
    pub fn new(config: FetchConfig, backend: Option<&'a dyn HttpBackend>) -> Self {
        FetchClient { config, backend }
    }

    fn cache_path(&self, q: &FieldQuery) -> PathBuf {
        self.config.cache_dir.join(format!("q_{}.json", q.cache_key()))
    }

    /// Fetch records matching the query. Offline mode replays the cache
    /// byte-identically and never touches the transport.
    pub fn fetch_fields(&self, q: &FieldQuery) -> Result<Vec<FieldRecord>, IngestError> {
        let path = self.cache_path(q);
        let raw: Vec<String> = if path.exists() {
            serde_json::from_str(&std::fs::read_to_string(&path)?)
                .map_err(|e| IngestError::Parse { line: 0, msg: e.to_string() })?
        } else if self.config.offline {
            return Err(IngestError::Network(format!(
                "offline mode and no cache for query {}",
                q.canonical()
            )));
        } else {
            let backend = self.backend.ok_or_else(|| {
                IngestError::Network("no transport configured".into())
            })?;
            let mut pages = Vec::new();
            let mut page = 0usize;
            loop {
                let url = format!(
                    "{}/fields?{}&page={}&page_size={}",
                    self.config.base_url,
                    q.canonical(),
                    page,
                    self.config.page_size
                );
                let body = backend.get(&url).map_err(IngestError::Network)?;
                let parsed: ServicePage = serde_json::from_str(&body)
                    .map_err(|e| IngestError::SchemaDrift(format!("{e}; payload: {body}")))?;
                let more = parsed.next;
                pages.push(body);
                page += 1;
                if !more {
                    break;
                }
            }
            std::fs::create_dir_all(&self.config.cache_dir)?;
            let tmp = path.with_extension("tmp");
            std::fs::write(&tmp, serde_json::to_string(&pages).unwrap())?;
            std::fs::rename(&tmp, &path)?;
            pages
        };

        let mut out = Vec::new();
        for body in &raw {
            let parsed: ServicePage = serde_json::from_str(body)
                .map_err(|e| IngestError::SchemaDrift(format!("{e}; payload: {body}")))?;
            for r in &parsed.results {
                out.push(r.to_record()?);
            }
        }
        Ok(out)
    }
}

// ----- fixture checksum manifest -----

#[derive(Serialize, Deserialize)]
pub struct Manifest {
    pub files: BTreeMap<String, String>,
}

pub fn file_sha256(path: &Path) -> Result<String, IngestError> {
    let bytes = std::fs::read(path)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Verify every file listed in `<dir>/MANIFEST.json` against its digest.
pub fn verify_manifest(dir: &Path) -> Result<(), IngestError> {
    let manifest_path = dir.join("MANIFEST.json");
    let manifest: Manifest = serde_json::from_str(&std::fs::read_to_string(&manifest_path)?)
        .map_err(|e| IngestError::Parse { line: 0, msg: e.to_string() })?;
    for (rel, digest) in &manifest.files {
        let path = dir.join(rel);
        let actual = file_sha256(&path)
            .map_err(|_| IngestError::Checksum(format!("{rel}: missing file")))?;
        if &actual != digest {
            return Err(IngestError::Checksum(format!(
                "{rel}: expected {digest}, found {actual}"
            )));
        }
    }
    Ok(())
}

/// Build a manifest for a directory tree (used by the fixture generator).
pub fn build_manifest(dir: &Path) -> Result<Manifest, IngestError> {
    let mut files = BTreeMap::new();
    fn walk(
        root: &Path,
        dir: &Path,
        files: &mut BTreeMap<String, String>,
    ) -> Result<(), IngestError> {
        let mut entries: Vec<_> =
            std::fs::read_dir(dir)?.collect::<Result<Vec<_>, _>>()?;
        entries.sort_by_key(|e| e.path());
        for entry in entries {
            let path = entry.path();
            if path.is_dir() {
                walk(root, &path, files)?;
            } else if path.file_name().map_or(false, |n| n != "MANIFEST.json") {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                files.insert(rel, file_sha256(&path)?);
            }
        }
        Ok(())
    }
    walk(dir, dir, &mut files)?;
    Ok(Manifest { files })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_parsing() {
        assert_eq!(parse_decimal("9.5").unwrap(), BigRational::new(95.into(), 10.into()));
        assert_eq!(parse_decimal("12").unwrap(), BigRational::from_integer(12.into()));
        assert!(parse_decimal("a.b").is_err());
    }

    #[test]
    fn embedded_table_parses_and_is_monotone() {
        let t = OdlyzkoTable::default_grh();
        assert!(t.rows().len() > 20);
    }

    #[test]
    fn record_json_round_trip() {
        let rec = crate::fieldcore::tests::record_sqrt5();
        let dto = RecordJson::from_record(&rec);
        let back = dto.to_record().unwrap();
        assert_eq!(rec, back);
        // serialize(parse(x)) is normalized: identical JSON both ways.
        let s1 = serde_json::to_string(&dto).unwrap();
        let s2 = serde_json::to_string(&RecordJson::from_record(&back)).unwrap();
        assert_eq!(s1, s2);
    }

    #[test]
    fn loads_and_rejects_by_hypothesis() {
        let good = serde_json::to_string(&RecordJson::from_record(
            &crate::fieldcore::tests::record_sqrt5(),
        ))
        .unwrap();
        // Q(√2) has even discriminant: rejected, not an error.
        let mut bad_rec = crate::fieldcore::tests::record_sqrt5();
        bad_rec.label = "2.2.8.1".into();
        bad_rec.poly = vec![BigInt::from(-2), BigInt::from(0), BigInt::from(1)];
        bad_rec.disc = BigInt::from(8);
        bad_rec.units = vec![vec![BigInt::from(1), BigInt::from(1)]];
        bad_rec.two_factorization[0].two_generators =
            (vec![BigInt::from(0), BigInt::from(1)], vec![BigInt::from(2), BigInt::from(0)]);
        bad_rec.two_factorization[0].e = 2;
        bad_rec.two_factorization[0].f = 1;
        bad_rec.two_factorization[0].generator = Some(vec![BigInt::from(0), BigInt::from(1)]);
        let bad = serde_json::to_string(&RecordJson::from_record(&bad_rec)).unwrap();
        let out = load_records_str(&format!("{good}\n{bad}\n")).unwrap();
        assert_eq!(out.records.len(), 1);
        assert_eq!(out.rejections.len(), 1);
        assert!(out.rejections[0].reason.contains("discriminant")
            || out.rejections[0].reason.contains("basis"));
        // Malformed JSON is a parse error with its line number.
        let err = load_records_str("{not json}\n").unwrap_err();
        assert!(matches!(err, IngestError::Parse { line: 1, .. }));
    }

    #[test]
    fn offline_cache_miss_never_touches_transport() {
        use std::sync::atomic::{AtomicUsize, Ordering};
        struct Counting(AtomicUsize);
        impl HttpBackend for Counting {
            fn get(&self, _url: &str) -> Result<String, String> {
                self.0.fetch_add(1, Ordering::SeqCst);
                Ok("{}".into())
            }
        }
        let backend = Counting(AtomicUsize::new(0));
        let dir = std::env::temp_dir().join("fontaine-test-cache-miss");
        let _ = std::fs::remove_dir_all(&dir);
        let client = FetchClient::new(
            FetchConfig {
                base_url: "http://127.0.0.1:1".into(),
                page_size: 10,
                offline: true,
                cache_dir: dir,
            },
            Some(&backend),
        );
        let q = FieldQuery { degree: 2, max_root_disc: "9.5".into() };
        let err = client.fetch_fields(&q).unwrap_err();
        assert!(matches!(err, IngestError::Network(_)));
        assert_eq!(backend.0.load(Ordering::SeqCst), 0, "offline must not call the network");
    }

    #[test]
    fn fetch_against_local_mock_and_replay() {
        use std::io::Write;
        // Tiny canned HTTP server on localhost.
        let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let rec = RecordJson::from_record(&crate::fieldcore::tests::record_sqrt5());
        let page = serde_json::to_string(&ServicePage { results: vec![rec], next: false }).unwrap();
        let handle = std::thread::spawn(move || {
            let (mut sock, _) = listener.accept().unwrap();
            let mut buf = [0u8; 4096];
            use std::io::Read;
            let _ = sock.read(&mut buf);
            let resp = format!(
                "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
                page.len(),
                page
            );
            sock.write_all(resp.as_bytes()).unwrap();
        });
        let dir = tempfile::tempdir().unwrap();
        let backend = TcpHttpBackend { timeout: std::time::Duration::from_secs(5) };
        let cfg = FetchConfig {
            base_url: format!("http://{addr}"),
            page_size: 10,
            offline: false,
            cache_dir: dir.path().to_path_buf(),
        };
        let client = FetchClient::new(cfg.clone(), Some(&backend));
        let q = FieldQuery { degree: 2, max_root_disc: "9.5".into() };
        let got = client.fetch_fields(&q).unwrap();
        assert_eq!(got.len(), 1);
        handle.join().unwrap();
        // Replay offline from the cache: identical record list.
        let offline = FetchClient::new(FetchConfig { offline: true, ..cfg }, None);
        let replay = offline.fetch_fields(&q).unwrap();
        assert_eq!(got, replay);
    }

    #[test]
    fn manifest_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("a.json"), b"hello").unwrap();
        let manifest = build_manifest(dir.path()).unwrap();
        std::fs::write(
            dir.path().join("MANIFEST.json"),
            serde_json::to_string_pretty(&manifest).unwrap(),
        )
        .unwrap();
        verify_manifest(dir.path()).unwrap();
        // Tamper and observe the failure.
        std::fs::write(dir.path().join("a.json"), b"tampered").unwrap();
        assert!(matches!(verify_manifest(dir.path()), Err(IngestError::Checksum(_))));
    }
}
