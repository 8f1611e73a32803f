use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use walshlab::counterexample::{growth_run, rational_sweep, BlockParameter};
use walshlab::error::WalshError;
use walshlab::harness::{
    format_f64, growth_table, kernel_table, parse_t, scan_table, selftest, selftest_table,
    sweep_table, OutputFormat, Table,
};
use walshlab::index::FrequencyIndex;
use walshlab::kernels::conjugate_dirichlet;
use walshlab::lebesgue::{fejer_l1_norm, lebesgue_exact, scan, ScanConfig};
use walshlab::scalar::{format_rat, rat, Rat};

#[derive(Parser)]
#[command(name = "walshlab", version, about = "Conjugate Walsh-Fourier analysis toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Backend {
    Exact,
    Float,
    Auto,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact Lebesgue constant of the conjugate kernel, with its breakdown.
    Lebesgue {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value = "0")]
        t: String,
    },
    /// Two-sided bound verification scan over dyadic octaves of n.
    Scan {
        #[arg(long, default_value_t = 0)]
        exp_min: u32,
        #[arg(long, default_value_t = 8)]
        exp_max: u32,
        #[arg(long, default_value_t = 32)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Comma list of checks that must hold for exit 0: ts,mtk,sws,toledo.
        #[arg(long, default_value = "ts,mtk,sws,toledo")]
        checks: String,
    },
    /// Per-octave maxima of conjugate Fejér kernel L1 norms.
    FejerNorms {
        #[arg(long, default_value = "0")]
        t: String,
        #[arg(long, default_value_t = 14)]
        exp_max: u32,
        #[arg(long, default_value_t = 16)]
        samples: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Growth table of the divergence family.
    Counterexample {
        #[arg(long = "A-max", default_value_t = 5)]
        a_max: usize,
        /// "alternating" or explicit blocks "q-p,q-p,...".
        #[arg(long, default_value = "alternating")]
        pattern: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Dump the conjugate Dirichlet kernel pointwise.
    Kernel {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value = "0")]
        t: String,
        #[arg(long)]
        depth: u32,
        #[arg(long, value_enum, default_value_t = Backend::Auto)]
        backend: Backend,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Run the oracle-equivalence suite.
    Selftest {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

fn emit(table: &Table, format: Format, out: Option<&PathBuf>) -> Result<(), String> {
    let rendered = table.render(format.into());
    match out {
        Some(path) => std::fs::write(path, rendered).map_err(|e| format!("write {path:?}: {e}")),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}

fn parse_pattern(spec: &str, blocks: usize) -> Result<BlockParameter, WalshError> {
    if spec == "alternating" {
        return Ok(BlockParameter::alternating(blocks));
    }
    let mut q = Vec::new();
    let mut p = Vec::new();
    for part in spec.split(',') {
        let (a, b) = part
            .split_once('-')
            .ok_or_else(|| WalshError::BadBlockParameter(format!("bad block {part:?}")))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<u32>()
                .map_err(|_| WalshError::BadBlockParameter(format!("bad position {s:?}")))
        };
        q.push(parse(a)?);
        p.push(parse(b)?);
    }
    BlockParameter::from_blocks(q, p)
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.cmd {
        Cmd::Lebesgue { n, t } => {
            let n = FrequencyIndex::new(n).map_err(|e| e.to_string())?;
            let t = parse_t(&t).map_err(|e| e.to_string())?;
            let b = lebesgue_exact(n, &t);
            let compact = |r: &Rat| {
                if r.is_integer() {
                    r.numer().to_string()
                } else {
                    format_rat(r)
                }
            };
            println!("{}", compact(&b.total));
            println!("J1={} J2={} J3={}", compact(&b.j1), compact(&b.j2), compact(&b.j3));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Scan { exp_min, exp_max, samples, seed, out, format, checks } => {
            let config = ScanConfig { exp_min, exp_max, samples, seed, ..ScanConfig::default() };
            let (reports, summary) = scan(&config);
            emit(&scan_table(&reports), format, out.as_ref())?;
            let mut ok = true;
            for check in checks.split(',').map(str::trim).filter(|c| !c.is_empty()) {
                let pass = match check {
                    "ts" => summary.upper_violations == 0,
                    "mtk" => summary.mtk_violations == 0,
                    "sws" => summary.sws_violations == 0,
                    "toledo" => {
                        let cap = rat(17, 15);
                        (1..=1u64 << exp_max.min(12)).all(|n| fejer_l1_norm(n) <= cap)
                    }
                    other => return Err(format!("unknown check {other:?}")),
                };
                if !pass {
                    eprintln!("check failed: {check}");
                    ok = false;
                }
            }
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Cmd::FejerNorms { t, exp_max, samples, seed, out, format } => {
            let t = parse_t(&t).map_err(|e| e.to_string())?;
            let rows = rational_sweep(&t, exp_max, samples, seed);
            emit(&sweep_table(&rows), format, out.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Counterexample { a_max, pattern, out, format } => {
            let pattern = parse_pattern(&pattern, a_max).map_err(|e| e.to_string())?;
            let rows = growth_run(a_max, &pattern).map_err(|e| e.to_string())?;
            for row in &rows {
                if let Some(exact) = &row.y_exact {
                    let shadow = walshlab::scalar::Scalar::to_f64(exact);
                    if (row.y - shadow).abs() > 1e-9 * shadow.abs().max(1.0) {
                        eprintln!(
                            "backend disagreement at A={}: float {} vs exact {}",
                            row.a,
                            format_f64(row.y),
                            format_rat(exact)
                        );
                        return Ok(ExitCode::FAILURE);
                    }
                }
            }
            emit(&growth_table(&rows, &pattern), format, out.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Kernel { n, t, depth, backend, out, format } => {
            let t = parse_t(&t).map_err(|e| e.to_string())?;
            let exact = match backend {
                Backend::Exact => true,
                Backend::Float => false,
                Backend::Auto => depth <= walshlab::MAX_DEPTH_EXACT,
            };
            let table = if exact {
                let k: walshlab::cylinder::CylinderFunction<Rat> =
                    conjugate_dirichlet(n, &t, depth).map_err(|e| e.to_string())?;
                kernel_table(&k)
            } else {
                let k: walshlab::cylinder::CylinderFunction<f64> =
                    conjugate_dirichlet(n, &t, depth).map_err(|e| e.to_string())?;
                kernel_table(&k)
            };
            emit(&table, format, out.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Selftest { out, format } => {
            let results = selftest();
            emit(&selftest_table(&results), format, out.as_ref())?;
            Ok(if results.iter().all(|r| r.pass) { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
