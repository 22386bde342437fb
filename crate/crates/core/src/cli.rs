//! Command-line front end: classify one field, batch-run a corpus, fetch
//! records, sort filtration words, and emit tally reports.
//!
//! Exit codes: 0 all conclusive (a rejection is conclusive), 2 some
//! verdict inconclusive, 1 error, 64 usage.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Deserialize;

use crate::fieldcore::Field;
use crate::ingest::{
    self, load_odlyzko, load_pack, load_records, ExtensionPack, FetchClient, FetchConfig,
    FieldQuery, RecordJson, TcpHttpBackend,
};
use crate::pipeline::{self, classify, Caps, OdlyzkoTable, Outcome, Verdict};
use crate::schemecalc::{CtxDichotomy, FiltrationWord, RewriteContext};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "fontaine", version, about = "Number-field classifier for everywhere-good-reduction nonexistence")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args, Debug, Clone)]
struct CommonOpts {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// JSON config file; values present in it override the flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Classify a single field record (JSON document).
    Classify {
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        pack: Option<PathBuf>,
        #[arg(long)]
        odlyzko: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        tower_cap: usize,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Classify every record of a JSON-lines corpus.
    Batch {
        #[arg(long)]
        input: PathBuf,
        /// Directory of extension packs named `<label>.pack.json`.
        #[arg(long)]
        packs: Option<PathBuf>,
        #[arg(long)]
        odlyzko: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        tower_cap: usize,
        /// Emit the per-degree tally instead of the verdict stream.
        #[arg(long)]
        tally: bool,
        /// Worker threads; the output order never depends on this.
        #[arg(long, default_value_t = 1)]
        parallelism: usize,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Fetch field records from the configured service (or replay cache).
    Fetch {
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        max_rd: String,
        #[arg(long, default_value_t = false)]
        offline: bool,
        #[arg(long)]
        cache_dir: Option<PathBuf>,
        #[arg(long, default_value = "http://localhost:8080")]
        base_url: String,
        #[arg(long, default_value_t = 100)]
        page_size: usize,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Sort a filtration word into canonical block order.
    SortWord {
        word: String,
        #[arg(long, default_value_t = 1)]
        primes: usize,
        #[arg(long, value_parser = ["d1", "d2"], default_value = "d1")]
        dichotomy: String,
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        qe1: bool,
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        qe2: bool,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Aggregate a verdict stream (JSON lines) into a tally.
    Tally {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Verify the checksum manifest of a fixtures directory.
    FixturesVerify {
        #[arg(long, default_value = "fixtures")]
        dir: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
}

/// Optional config file; any present field overrides the matching flag.
#[derive(Debug, Default, Deserialize)]
struct FileConfig {
    tower_cap: Option<usize>,
    odlyzko: Option<PathBuf>,
    parallelism: Option<usize>,
    offline: Option<bool>,
    cache_dir: Option<PathBuf>,
    base_url: Option<String>,
    page_size: Option<usize>,
}

fn read_config(path: &Option<PathBuf>) -> Result<FileConfig, String> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let s = std::fs::read_to_string(p).map_err(|e| format!("config: {e}"))?;
            serde_json::from_str(&s).map_err(|e| format!("config: {e}"))
        }
    }
}

fn load_table(path: &Option<PathBuf>) -> Result<OdlyzkoTable, String> {
    match path {
        None => Ok(OdlyzkoTable::default_grh()),
        Some(p) => load_odlyzko(p).map_err(|e| e.to_string()),
    }
}

fn env_offline() -> bool {
    std::env::var("FONTAINE_OFFLINE").map_or(false, |v| v == "1" || v == "true")
}

fn env_cache_dir() -> Option<PathBuf> {
    std::env::var_os("FONTAINE_CACHE_DIR").map(PathBuf::from)
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            // clap's own help/version output is not a usage error.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            EXIT_ERROR
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, String> {
    match cli.cmd {
        Cmd::Classify { field, pack, odlyzko, tower_cap, common } => {
            let cfg = read_config(&common.config)?;
            let tower_cap = cfg.tower_cap.unwrap_or(tower_cap);
            if tower_cap < 4 {
                eprintln!("error: tower cap must be at least 4");
                return Ok(EXIT_USAGE);
            }
            if common.format == Format::Csv {
                eprintln!("error: csv output is not defined for classify");
                return Ok(EXIT_USAGE);
            }
            let table = load_table(&cfg.odlyzko.clone().or(odlyzko))?;
            let contents = std::fs::read_to_string(&field).map_err(|e| e.to_string())?;
            let dto: RecordJson = serde_json::from_str(&contents).map_err(|e| e.to_string())?;
            let rec = dto.to_record().map_err(|e| e.to_string())?;
            let verdict = match Field::new_base(rec.clone()) {
                Err(e) => Verdict {
                    schema: pipeline::VERDICT_SCHEMA.to_string(),
                    label: rec.label.clone(),
                    outcome: Outcome::Rejected { step: 0, reason: format!("validation: {e}") },
                    path: None,
                    evidence: serde_json::json!({}),
                },
                Ok(k) => {
                    let pack_data: Option<ExtensionPack> = match &pack {
                        None => None,
                        Some(p) => Some(load_pack(p, &rec).map_err(|e| e.to_string())?),
                    };
                    classify(&k, pack_data.as_ref(), &table, &Caps { tower_cap })
                }
            };
            emit_verdicts(&[verdict.clone()], common.format);
            Ok(exit_for(&[verdict]))
        }
        Cmd::Batch { input, packs, odlyzko, tower_cap, tally, parallelism, common } => {
            let cfg = read_config(&common.config)?;
            let tower_cap = cfg.tower_cap.unwrap_or(tower_cap);
            let parallelism = cfg.parallelism.unwrap_or(parallelism).max(1);
            if tower_cap < 4 {
                eprintln!("error: tower cap must be at least 4");
                return Ok(EXIT_USAGE);
            }
            let table = load_table(&cfg.odlyzko.clone().or(odlyzko))?;
            let (verdicts, degrees) =
                run_batch(&input, packs.as_deref(), &table, tower_cap, parallelism)?;
            if tally {
                let t = pipeline::tally(&verdicts, &degrees);
                match common.format {
                    Format::Csv => print!("{}", pipeline::tally_csv(&t)),
                    Format::Json => {
                        println!("{}", serde_json::to_string_pretty(&t).unwrap())
                    }
                    Format::Text => {
                        print!("{}", pipeline::tally_csv(&t).replace(',', "\t"))
                    }
                }
            } else {
                if common.format == Format::Csv {
                    eprintln!("error: csv output is only defined for --tally");
                    return Ok(EXIT_USAGE);
                }
                emit_verdicts(&verdicts, common.format);
            }
            Ok(exit_for(&verdicts))
        }
        Cmd::Fetch { degree, max_rd, offline, cache_dir, base_url, page_size, common } => {
            let cfg = read_config(&common.config)?;
            if common.format == Format::Csv {
                eprintln!("error: csv output is not defined for fetch");
                return Ok(EXIT_USAGE);
            }
            ingest::parse_decimal(&max_rd)?;
            let config = FetchConfig {
                base_url: cfg.base_url.unwrap_or(base_url),
                page_size: cfg.page_size.unwrap_or(page_size),
                offline: cfg.offline.unwrap_or(offline || env_offline()),
                cache_dir: cfg
                    .cache_dir
                    .or(cache_dir)
                    .or_else(env_cache_dir)
                    .unwrap_or_else(|| PathBuf::from("cache")),
            };
            let backend = TcpHttpBackend { timeout: std::time::Duration::from_secs(30) };
            let client = FetchClient::new(
                config.clone(),
                if config.offline { None } else { Some(&backend) },
            );
            let q = FieldQuery { degree, max_root_disc: max_rd };
            let records = client.fetch_fields(&q).map_err(|e| e.to_string())?;
            match common.format {
                Format::Json => {
                    for r in &records {
                        println!("{}", serde_json::to_string(&RecordJson::from_record(r)).unwrap());
                    }
                }
                Format::Text => {
                    for r in &records {
                        println!("{}\tdegree {}\tdisc {}", r.label, r.degree, r.disc);
                    }
                    eprintln!("{} records", records.len());
                }
                Format::Csv => unreachable!(),
            }
            Ok(EXIT_OK)
        }
        Cmd::SortWord { word, primes, dichotomy, qe1, qe2, common } => {
            if !(1..=3).contains(&primes) {
                eprintln!("error: --primes must be 1, 2, or 3");
                return Ok(EXIT_USAGE);
            }
            if common.format == Format::Csv {
                eprintln!("error: csv output is not defined for sort-word");
                return Ok(EXIT_USAGE);
            }
            let d = if dichotomy == "d1" { CtxDichotomy::D1 } else { CtxDichotomy::D2 };
            let ctx = RewriteContext::new(primes, d, qe1, qe2);
            let w = FiltrationWord::parse(&word, ctx).map_err(|e| e.to_string())?;
            let (sorted, trace) =
                crate::schemecalc::sort_filtration(&w).map_err(|e| e.to_string())?;
            match common.format {
                Format::Json => println!(
                    "{}",
                    serde_json::json!({
                        "input": w.render(),
                        "sorted": sorted.render(),
                        "trace": trace,
                    })
                ),
                Format::Text => println!("{}", sorted.render()),
                Format::Csv => unreachable!(),
            }
            Ok(EXIT_OK)
        }
        Cmd::Tally { input, common } => {
            let contents = std::fs::read_to_string(&input).map_err(|e| e.to_string())?;
            let mut verdicts: Vec<Verdict> = Vec::new();
            let mut degrees: Vec<usize> = Vec::new();
            for (i, line) in contents.lines().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                let v: serde_json::Value =
                    serde_json::from_str(line).map_err(|e| format!("line {}: {e}", i + 1))?;
                let verdict: Verdict = serde_json::from_value(v.clone())
                    .map_err(|e| format!("line {}: {e}", i + 1))?;
                // Degree from the label prefix "<n>.<r1>...." per the
                // labelling convention used in the corpus.
                let deg = verdict
                    .label
                    .split('.')
                    .next()
                    .and_then(|d| d.parse().ok())
                    .ok_or_else(|| format!("line {}: label lacks a degree prefix", i + 1))?;
                degrees.push(deg);
                verdicts.push(verdict);
            }
            let t = pipeline::tally(&verdicts, &degrees);
            match common.format {
                Format::Csv => print!("{}", pipeline::tally_csv(&t)),
                Format::Json => println!("{}", serde_json::to_string_pretty(&t).unwrap()),
                Format::Text => print!("{}", pipeline::tally_csv(&t).replace(',', "\t")),
            }
            Ok(EXIT_OK)
        }
        Cmd::FixturesVerify { dir, common } => {
            match ingest::verify_manifest(&dir) {
                Ok(()) => {
                    match common.format {
                        Format::Json => println!("{}", serde_json::json!({"ok": true})),
                        _ => println!("fixtures ok"),
                    }
                    Ok(EXIT_OK)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    Ok(EXIT_ERROR)
                }
            }
        }
    }
}

type BatchOutcome = (Vec<Verdict>, Vec<usize>);

fn run_batch(
    input: &std::path::Path,
    packs: Option<&std::path::Path>,
    table: &OdlyzkoTable,
    tower_cap: usize,
    parallelism: usize,
) -> Result<BatchOutcome, String> {
    let loaded = load_records(input).map_err(|e| e.to_string())?;
    let mut work: Vec<(usize, crate::fieldcore::FieldRecord)> = Vec::new();
    let mut slots: Vec<Option<Verdict>> = Vec::new();
    let mut degrees: Vec<usize> = Vec::new();
    // Rejections first, in file order, as step-0 verdicts.
    for rej in &loaded.rejections {
        slots.push(Some(Verdict {
            schema: pipeline::VERDICT_SCHEMA.to_string(),
            label: rej.label.clone(),
            outcome: Outcome::Rejected { step: 0, reason: rej.reason.clone() },
            path: None,
            evidence: serde_json::json!({"line": rej.line}),
        }));
        degrees.push(
            rej.label.split('.').next().and_then(|d| d.parse().ok()).unwrap_or(0),
        );
    }
    for rec in &loaded.records {
        degrees.push(rec.degree);
        work.push((slots.len(), rec.clone()));
        slots.push(None);
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| e.to_string())?;
    let caps = Caps { tower_cap };
    let computed: Vec<(usize, Verdict)> = pool.install(|| {
        work.par_iter()
            .map(|(slot, rec)| {
                let verdict = match Field::new_base(rec.clone()) {
                    Err(e) => Verdict {
                        schema: pipeline::VERDICT_SCHEMA.to_string(),
                        label: rec.label.clone(),
                        outcome: Outcome::Rejected {
                            step: 0,
                            reason: format!("validation: {e}"),
                        },
                        path: None,
                        evidence: serde_json::json!({}),
                    },
                    Ok(k) => {
                        let pack = packs.and_then(|dir| {
                            let p = dir.join(format!("{}.pack.json", rec.label));
                            if p.exists() {
                                load_pack(&p, rec).ok()
                            } else {
                                None
                            }
                        });
                        classify(&k, pack.as_ref(), table, &caps)
                    }
                };
                (*slot, verdict)
            })
            .collect()
    });
    for (slot, v) in computed {
        slots[slot] = Some(v);
    }
    Ok((slots.into_iter().map(Option::unwrap).collect(), degrees))
}

fn emit_verdicts(verdicts: &[Verdict], format: Format) {
    match format {
        Format::Json => {
            for v in verdicts {
                println!("{}", serde_json::to_string(v).unwrap());
            }
        }
        Format::Text => {
            for v in verdicts {
                let outcome = match &v.outcome {
                    Outcome::Fontaine => "Fontaine".to_string(),
                    Outcome::NoProsaic => "no prosaic abelian scheme".to_string(),
                    Outcome::Rejected { step, reason } => {
                        format!("rejected at step {step}: {reason}")
                    }
                    Outcome::Inconclusive { missing } => format!("inconclusive: {missing}"),
                };
                let path = v.path.map(|p| format!(" [{p:?}]")).unwrap_or_default();
                println!("{}: {}{}", v.label, outcome, path);
            }
        }
        Format::Csv => unreachable!("guarded by callers"),
    }
}

fn exit_for(verdicts: &[Verdict]) -> i32 {
    if verdicts.iter().any(|v| matches!(v.outcome, Outcome::Inconclusive { .. })) {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    }
}
