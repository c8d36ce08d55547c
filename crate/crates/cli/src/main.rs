use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use ttower::db::{self, CurveDb, MissingCurves};
use ttower::lemmas::{select, Tier, Verifier};
use ttower::report::{write_atomic, Status};
use ttower_core::elliptic::division_poly;
use ttower_core::knowledge::KnowledgeTables;
use ttower_core::tower::{
    certify_no_root, recheck, torsion_over_field, torsion_over_tower, CertifyConfig, CertifyOutcome, FieldSpec,
    NoRootCertificate, PolyRecipe, TorsionConfig, Verdict,
};
use ttower_core::Error as CoreError;

#[derive(Parser)]
#[command(name = "ttower", version, about = "Torsion of elliptic curves over abelian towers: lemma checks and certificates")]
struct Cli {
    /// Ingest store (default: $TTOWER_DB or .ttower/curves.jsonl).
    #[arg(long, global = true)]
    db: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate a JSON-lines file of curve records and add it to the store.
    Ingest { file: PathBuf },
    /// Torsion over a tower (K, K5, Zp:p, cyclo:p^inf) or a finite field (cyclo:p^k, LAYER(p,n), ...).
    Torsion {
        label: String,
        #[arg(long)]
        field: String,
        #[arg(long)]
        json: bool,
    },
    /// Division polynomial X_n in the integral short model, over Z or mod q.
    Divpoly {
        label: String,
        n: usize,
        #[arg(long = "mod")]
        modulus: Option<u64>,
    },
    /// No-root certificate for X_n over a finite abelian field.
    Certify {
        label: String,
        n: usize,
        #[arg(long)]
        field: String,
        #[arg(long, default_value_t = 3)]
        witnesses: usize,
        /// Use X_{l^k}/X_{l^(k-1)} (points of exact order n = l^k).
        #[arg(long)]
        primitive: bool,
        /// Write the certificate here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one lemma (or all lemmas sharing a prefix), or the whole tier with --all.
    Verify {
        id: Option<String>,
        #[arg(long)]
        all: bool,
        #[arg(long, default_value = "fast")]
        tier: Tier,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for report.json and the certificate files.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the JSON report instead of the text view.
        #[arg(long)]
        json: bool,
    },
    /// Re-verify a certificate file against its curve record.
    Recheck {
        certificate: PathBuf,
        #[arg(long, default_value_t = 3)]
        min_witnesses: usize,
    },
    /// List registered lemmas.
    Lemmas,
}

/// Failure classes, mapped to exit codes.
enum Failure {
    Indeterminate(anyhow::Error),
    Config(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Failure {
        if e.downcast_ref::<MissingCurves>().is_some() {
            return Failure::Config(e);
        }
        match e.downcast_ref::<CoreError>() {
            Some(CoreError::Indeterminate(_)) | Some(CoreError::SearchBound(_)) => Failure::Indeterminate(e),
            _ => Failure::Config(e),
        }
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Failure {
        Failure::from(anyhow::Error::from(e))
    }
}

impl From<MissingCurves> for Failure {
    fn from(e: MissingCurves) -> Failure {
        Failure::Config(e.into())
    }
}

type Outcome = std::result::Result<u8, Failure>;

fn open_db(cli_db: &Option<PathBuf>) -> Result<CurveDb> {
    CurveDb::open(&db::store_path(cli_db.clone()))
}

fn curve(db: &CurveDb, label: &str) -> std::result::Result<ttower_core::elliptic::Curve, Failure> {
    db.require(&[label]).map(|mut v| v.remove(0)).map_err(Failure::from)
}

fn parse_field(s: &str) -> std::result::Result<FieldSpec, Failure> {
    s.parse::<FieldSpec>().map_err(|e| Failure::Config(anyhow!(e)))
}

fn factor_deadline() -> TorsionConfig {
    let mut cfg = TorsionConfig::default();
    if let Some(b) = Verifier::budget_from_env() {
        cfg.factor.deadline = Some(std::time::Instant::now() + b);
    }
    cfg
}

fn run(cli: Cli) -> Outcome {
    match cli.cmd {
        Cmd::Ingest { file } => {
            let store = db::store_path(cli.db);
            let (added, known) = db::ingest(&file, &store)?;
            println!("ingested {added} new records ({known} already present) into {}", store.display());
            Ok(0)
        }
        Cmd::Torsion { label, field, json } => {
            let db = open_db(&cli.db)?;
            let e = curve(&db, &label)?;
            let f = parse_field(&field)?;
            let tables = KnowledgeTables::builtin();
            let cfg = factor_deadline();
            let r = match &f {
                FieldSpec::Tower(t) => torsion_over_tower(&e, *t, &tables, &cfg)?,
                _ => torsion_over_field(&e, &f, &tables, &cfg)?,
            };
            if json {
                println!("{}", serde_json::to_string_pretty(&r).map_err(anyhow::Error::from)?);
            } else {
                println!("{label} over {}: {} (over Q: {})", r.field, r.group, r.over_q);
                for p in &r.primes {
                    println!("  l = {}: field {}, reduction bound {}, counts {:?}", p.l, p.field, p.bound, p.counts);
                    for ev in &p.evidence {
                        let kinds: Vec<String> = ev
                            .artifacts
                            .iter()
                            .map(|a| serde_json::to_value(a).ok().and_then(|v| v["kind"].as_str().map(String::from)).unwrap_or_default())
                            .collect();
                        println!("    order {:>4} {:?} [{}]", ev.order, ev.verdict, kinds.join(", "));
                    }
                }
            }
            if r.evidence().any(|ev| ev.verdict == Verdict::Indeterminate) {
                return Ok(2);
            }
            Ok(if r.consistent() { 0 } else { 1 })
        }
        Cmd::Divpoly { label, n, modulus } => {
            let db = open_db(&cli.db)?;
            let e = curve(&db, &label)?;
            let d = division_poly(&e, n, modulus)?;
            let m = &d.model;
            println!("# model Y^2 = X^3 + ({})X + ({}), X = ({})x + ({})", m.a, m.b, m.alpha, m.beta);
            println!("# degree {}", d.degree());
            match &d.short {
                ttower_core::elliptic::DivisionPolyData::OverZ(p) => println!("{p}"),
                ttower_core::elliptic::DivisionPolyData::ModQ(p) => println!("{p}"),
            }
            Ok(0)
        }
        Cmd::Certify { label, n, field, witnesses, primitive, out } => {
            let db = open_db(&cli.db)?;
            let e = curve(&db, &label)?;
            let f = parse_field(&field)?;
            let recipe = if primitive { PolyRecipe::primitive_division(&e, n)? } else { PolyRecipe::division(&e, n) };
            let cfg = CertifyConfig { min_witnesses: witnesses, ..CertifyConfig::default() };
            match certify_no_root(&recipe, Some(&label), &f, &Default::default(), &cfg)? {
                CertifyOutcome::Certified(c) => {
                    match out {
                        Some(path) => {
                            write_atomic(&path, &c.to_json())?;
                            println!("certificate written to {}", path.display());
                        }
                        None => println!("{}", c.to_json()),
                    }
                    Ok(0)
                }
                CertifyOutcome::RootLikely { witnesses } => {
                    let w: Vec<String> = witnesses.iter().map(|w| format!("{}:{}", w.q, w.roots)).collect();
                    println!("ROOT_LIKELY: roots at every examined split prime (q:roots {})", w.join(" "));
                    Ok(1)
                }
            }
        }
        Cmd::Verify { id, all, tier, seed, out, json } => {
            if all == id.is_some() {
                return Err(Failure::Config(anyhow!("give a lemma id or --all")));
            }
            let db = open_db(&cli.db)?;
            let v = Verifier::new(db, KnowledgeTables::builtin(), seed, Verifier::budget_from_env());
            let defs = select(id.as_deref(), tier);
            if defs.is_empty() {
                eprintln!("no lemma matches {}", id.as_deref().unwrap_or("the tier"));
            }
            let (report, certs) = v.verify(&defs, tier)?;
            if let Some(dir) = &out {
                for c in &certs {
                    write_atomic(&dir.join(&c.file), &c.certificate.to_json())?;
                }
                write_atomic(&dir.join("report.json"), &report.to_json())?;
            }
            if json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.render_text());
            }
            Ok(report.exit_code() as u8)
        }
        Cmd::Recheck { certificate, min_witnesses } => {
            let text = fs::read_to_string(&certificate)
                .with_context(|| format!("reading {}", certificate.display()))?;
            let cert = NoRootCertificate::from_json(&text)?;
            let ainvs = match &cert.curve_label {
                Some(label) => {
                    let db = open_db(&cli.db)?;
                    Some(curve(&db, label)?.ainvs_strings())
                }
                None => None,
            };
            match recheck(&cert, ainvs.as_deref(), min_witnesses) {
                Ok(()) => {
                    println!("{} {}", Status::Pass.as_str(), certificate.display());
                    Ok(0)
                }
                Err(err) => {
                    println!("{} {}: {err}", Status::Fail.as_str(), certificate.display());
                    Ok(1)
                }
            }
        }
        Cmd::Lemmas => {
            for l in ttower::registry() {
                println!("{:<24} {:<4} {}", l.id, l.tier.as_str(), l.title);
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Indeterminate(e)) => {
            eprintln!("INDETERMINATE: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
