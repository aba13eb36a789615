//! Command line front end: classify, factorize, verify and generate maps.
//!
//! Exit codes: 0 on success, 1 when a checked property is negative
//! (factorizing a non-semicausal map, or a verification that fails), 2 for
//! usage, IO and schema problems.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use semicausal::causality::{is_causal, BipartiteMap};
use semicausal::corpus;
use semicausal::dilation::Dilation;
use semicausal::error::{Error, Result};
use semicausal::factorize::{semilocalize, verify_decomposition};
use semicausal::schema::{
    self, bipartite_choi_file, bipartite_kraus_file, single_choi_file, single_kraus_file,
    ChannelFile, Metadata, ParsedMap, VerdictReport,
};

#[derive(Parser)]
#[command(
    name = "semicausal",
    version,
    about = "Classify bipartite quantum operations and factorize semicausal ones"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Numerical tolerance for classification and factorization.
    #[arg(long, global = true, default_value_t = semicausal::DEFAULT_TOL)]
    tol: f64,

    /// Output style for results on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Machine,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the signalling structure of a bipartite map.
    Check {
        /// Channel file with dA/dB dims.
        file: PathBuf,
    },
    /// Factorize a semicausal map into an Alice factor G and a Bob channel F.
    Decompose {
        /// Channel file with dA/dB dims.
        file: PathBuf,
        /// Directory receiving G.json, F.json and report.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Check shipped factors G and F against the original map.
    Verify {
        /// The original bipartite channel file.
        original: PathBuf,
        /// Alice factor file (din/dout dims).
        g: PathBuf,
        /// Bob factor file (din/dout dims).
        f: PathBuf,
    },
    /// Generate a corpus instance and write it as a channel file.
    Gen {
        /// One of `named:<name>`, `random_channel`, `random_semicausal`.
        kind: String,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Input dimension for random_channel.
        #[arg(long)]
        din: Option<usize>,
        /// Output dimension for random_channel.
        #[arg(long)]
        dout: Option<usize>,
        /// Number of Kraus operators for random_channel.
        #[arg(long)]
        kraus_rank: Option<usize>,
        /// Alice dimension for random_semicausal.
        #[arg(long)]
        da: Option<usize>,
        /// Bob dimension for random_semicausal.
        #[arg(long)]
        db: Option<usize>,
        /// Message dimension for random_semicausal.
        #[arg(long)]
        dc: Option<usize>,
        /// RNG seed; the same seed reproduces the same file byte for byte.
        #[arg(long)]
        seed: Option<u64>,
        /// Make random_semicausal strictly subunital instead of unital.
        #[arg(long)]
        selective: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Check { file } => check(file, cli.tol, cli.format),
        Command::Decompose { file, out } => decompose(file, out, cli.tol, cli.format),
        Command::Verify { original, g, f } => verify(original, g, f, cli.tol, cli.format),
        Command::Gen { kind, out, din, dout, kraus_rank, da, db, dc, seed, selective } => gen(
            kind,
            out.as_deref(),
            GenParams {
                din: *din,
                dout: *dout,
                kraus_rank: *kraus_rank,
                da: *da,
                db: *db,
                dc: *dc,
                seed: *seed,
                selective: *selective,
            },
        ),
    }
}

fn load_any(path: &Path) -> Result<(ChannelFile, ParsedMap)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
    schema::parse_channel(&text)
        .map_err(|e| Error::Schema(format!("{}: {e}", path.display())))
}

fn load_bipartite(path: &Path) -> Result<(ChannelFile, BipartiteMap)> {
    let (file, parsed) = load_any(path)?;
    match parsed {
        ParsedMap::Bipartite(m) => Ok((file, m)),
        ParsedMap::Single(_) => Err(Error::Schema(format!(
            "{} declares din/dout dims; this command needs a bipartite map with dA/dB",
            path.display()
        ))),
    }
}

fn load_single(path: &Path) -> Result<semicausal::CpMap> {
    let (_, parsed) = load_any(path)?;
    match parsed {
        ParsedMap::Single(e) => Ok(e),
        ParsedMap::Bipartite(_) => Err(Error::Schema(format!(
            "{} declares dA/dB dims; factor files need din/dout",
            path.display()
        ))),
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn check(path: &Path, tol: f64, format: Format) -> Result<ExitCode> {
    let start = Instant::now();
    let (file, m) = load_bipartite(path)?;
    let verdict = is_causal(&m, tol);
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    match format {
        Format::Human => {
            if let Some(name) = file.name() {
                println!("map: {name}");
            }
            println!("dims: dA={} dB={}", m.dims().da, m.dims().db);
            println!(
                "B -> A blocked: {:<3} (residual {:.3e})",
                yes_no(verdict.semicausal_b_to_a_blocked),
                verdict.residual_b_to_a
            );
            println!(
                "A -> B blocked: {:<3} (residual {:.3e})",
                yes_no(verdict.semicausal_a_to_b_blocked),
                verdict.residual_a_to_b
            );
            println!("causal: {}", yes_no(verdict.causal));
            println!("product localizable: {}", yes_no(verdict.product_localizable));
        }
        Format::Machine => {
            let payload = serde_json::json!({
                "command": "check",
                "file": path.display().to_string(),
                "name": file.name(),
                "dims": {"dA": m.dims().da, "dB": m.dims().db},
                "tol": tol,
                "verdict": serde_json::to_value(VerdictReport::from(&verdict))?,
                "elapsed_ms": elapsed_ms,
            });
            println!("{payload}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn decompose(path: &Path, out: &Path, tol: f64, format: Format) -> Result<ExitCode> {
    let start = Instant::now();
    let (_, m) = load_bipartite(path)?;
    let dims = m.dims();
    let d = match semilocalize(&m, tol) {
        Ok(d) => d,
        Err(Error::NotSemicausal { residual, tol }) => {
            match format {
                Format::Human => {
                    println!("not semicausal: B -> A residual {residual:.3e} exceeds tolerance {tol:.3e}");
                }
                Format::Machine => {
                    let payload = serde_json::json!({
                        "command": "decompose",
                        "semicausal": false,
                        "residual_b_to_a": residual,
                        "tol": tol,
                    });
                    println!("{payload}");
                }
            }
            return Ok(ExitCode::from(1));
        }
        Err(e) => return Err(e),
    };
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;

    std::fs::create_dir_all(out)?;
    let g_file = single_kraus_file(
        dims.da,
        dims.da * d.d_c,
        &[d.w.clone()],
        Some(Metadata { name: Some("G".into()), ..Metadata::default() }),
    );
    schema::save_channel(&out.join("G.json"), &g_file)?;
    let f_ops =
        Dilation::from_parts(d.d_c * dims.db, dims.db, d.d_d, d.u.u().clone())?.kraus_slices();
    let f_file = single_kraus_file(
        d.d_c * dims.db,
        dims.db,
        &f_ops,
        Some(Metadata { name: Some("F".into()), ..Metadata::default() }),
    );
    schema::save_channel(&out.join("F.json"), &f_file)?;

    let report = serde_json::json!({
        "command": "decompose",
        "file": path.display().to_string(),
        "dims": {"dA": dims.da, "dB": dims.db},
        "tol": tol,
        "semicausal": true,
        "d_c": d.d_c,
        "d_d": d.d_d,
        "reconstruction_residual": d.reconstruction_residual,
        "f_unitality": d.f_unitality,
        "elapsed_ms": elapsed_ms,
    });
    let mut report_text = serde_json::to_string_pretty(&report)?;
    report_text.push('\n');
    std::fs::write(out.join("report.json"), report_text)?;

    match format {
        Format::Human => {
            println!("semicausal: yes");
            println!("d_C = {}, d_D = {}", d.d_c, d.d_d);
            println!("reconstruction residual: {:.3e}", d.reconstruction_residual);
            println!("F unitality defect: {:.3e}", d.f_unitality);
            println!("wrote G.json, F.json, report.json to {}", out.display());
        }
        Format::Machine => println!("{report}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(original: &Path, g_path: &Path, f_path: &Path, tol: f64, format: Format) -> Result<ExitCode> {
    let start = Instant::now();
    let (_, m) = load_bipartite(original)?;
    let g = load_single(g_path)?;
    let f = load_single(f_path)?;
    let report = verify_decomposition(&m, &g, &f, tol)?;
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    match format {
        Format::Human => {
            println!("d_C = {}", report.d_c);
            println!("choi distance: {:.3e}", report.choi_distance);
            println!("F unitality defect: {:.3e}", report.f_unitality_defect);
            println!("verdict: {}", if report.pass { "pass" } else { "fail" });
        }
        Format::Machine => {
            let payload = serde_json::json!({
                "command": "verify",
                "file": original.display().to_string(),
                "tol": tol,
                "report": serde_json::to_value(schema::VerifyReport::from(&report))?,
                "elapsed_ms": elapsed_ms,
            });
            println!("{payload}");
        }
    }
    Ok(if report.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

struct GenParams {
    din: Option<usize>,
    dout: Option<usize>,
    kraus_rank: Option<usize>,
    da: Option<usize>,
    db: Option<usize>,
    dc: Option<usize>,
    seed: Option<u64>,
    selective: bool,
}

fn require(value: Option<usize>, flag: &str, kind: &str) -> Result<usize> {
    value.ok_or_else(|| Error::Schema(format!("{kind} requires --{flag}")))
}

fn gen(kind: &str, out: Option<&Path>, p: GenParams) -> Result<ExitCode> {
    let file = if let Some(name) = kind.strip_prefix("named:") {
        let ex = corpus::named(name)?;
        bipartite_kraus_file(
            ex.map.dims(),
            &ex.kraus,
            Some(Metadata { name: Some(ex.name.into()), ..Metadata::default() }),
        )
    } else {
        match kind {
            "random_channel" => {
                let din = require(p.din, "din", kind)?;
                let dout = require(p.dout, "dout", kind)?;
                let kraus_rank = require(p.kraus_rank, "kraus-rank", kind)?;
                let seed = p.seed.ok_or_else(|| Error::Schema("random_channel requires --seed".into()))?;
                let e = corpus::random_channel(din, dout, kraus_rank, seed)?;
                single_choi_file(&e, Some(Metadata { seed: Some(seed), ..Metadata::default() }))
            }
            "random_semicausal" => {
                let da = require(p.da, "da", kind)?;
                let db = require(p.db, "db", kind)?;
                let dc = require(p.dc, "dc", kind)?;
                let seed = p
                    .seed
                    .ok_or_else(|| Error::Schema("random_semicausal requires --seed".into()))?;
                let m = corpus::random_semicausal(da, db, dc, seed, p.selective)?;
                bipartite_choi_file(&m, Some(Metadata { seed: Some(seed), ..Metadata::default() }))
            }
            other => {
                return Err(Error::Schema(format!(
                    "unknown gen kind `{other}`; use named:<name>, random_channel or random_semicausal"
                )));
            }
        }
    };
    match out {
        Some(path) => schema::save_channel(path, &file)?,
        None => print!("{}", schema::render_channel(&file)),
    }
    Ok(ExitCode::SUCCESS)
}
