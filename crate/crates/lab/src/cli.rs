//! Command line definition and dispatch.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use bonse_core::bounds::{
    asymptotic_psi, closed_form_bound, n_upper, rh_error_report, rh_n_upper,
    unconditional_log_threshold,
};
use bonse_core::scan::{
    plateau_scale_report, scan_alpha_envelope, scan_psi, tail_sups, ScanConfig,
};
use bonse_core::sieve::DEFAULT_SEGMENT_LEN;
use bonse_core::{Error as CoreError, Rational};
use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::conjecture::{verify_conjecture, CaseSel, Verdict};
use crate::driver::{run_psi, RunOptions};
use crate::lemmas::{verify_lemmas, LemmaConfig};
use crate::report::{emit, render, safe_u64, Format, PsiRecord};

pub const CHECKPOINT_DIR_ENV: &str = "BONSELAB_CHECKPOINT_DIR";

/// Process exit statuses.
pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_UNCERTIFIED: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "bonse-lab", version, about = "Certified thresholds for the continuous Bonse inequality")]
pub struct Cli {
    /// Machine-readable output; a plain table when omitted.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Checkpoint file for long scans.
    #[arg(long, global = true)]
    pub checkpoint: Option<PathBuf>,

    /// Continue from the checkpoint file if it exists.
    #[arg(long, global = true)]
    pub resume: bool,

    /// Byte budget for the sieve.
    #[arg(long, global = true)]
    pub mem_budget: Option<u64>,

    /// Print a progress line every N steps.
    #[arg(long, global = true, default_value_t = 0)]
    pub report_every: u64,

    /// Scan ceiling: caps Ψ scans (results past it are uncertified) and
    /// automatically extended tail scans.
    #[arg(long, global = true)]
    pub n_max: Option<u64>,

    #[arg(long, global = true, default_value_t = DEFAULT_SEGMENT_LEN)]
    pub segment_len: u64,

    /// Steps between checkpoint saves.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub checkpoint_every: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Ψ(x) for one or more x, in a single pass.
    Psi {
        /// Exact decimal or fraction, e.g. 0.1 or 1/3.
        #[arg(long = "x", required = true, num_args = 1.., allow_negative_numbers = true)]
        xs: Vec<String>,
    },
    /// α_n with enclosures over a range of n.
    ScanAlpha {
        #[arg(long, default_value_t = 8)]
        from: u64,
        #[arg(long)]
        to: u64,
    },
    /// Certified tail suprema A_m.
    TailSup {
        #[arg(long = "m", required = true, num_args = 1..)]
        ms: Vec<u64>,
        /// Scan at least this far even if the tail certifies earlier.
        #[arg(long)]
        scan_to: Option<u64>,
    },
    /// Plateau gaps Δ_m and the normalized Δ_m · m log² m.
    Plateau {
        #[arg(long = "m", required = true, num_args = 1..)]
        ms: Vec<u64>,
    },
    /// Unconditional scan ceiling and closed-form bounds.
    Bound {
        #[arg(long = "x", required = true, num_args = 1.., allow_negative_numbers = true)]
        xs: Vec<String>,
    },
    /// Conditional threshold, or with --n the error-term comparison table.
    RhBound {
        #[arg(long = "x", num_args = 1.., allow_negative_numbers = true)]
        xs: Vec<String>,
        #[arg(long = "n", num_args = 1..)]
        ns: Vec<f64>,
    },
    /// The five published plateau values.
    VerifyConjecture {
        #[arg(long, value_enum, default_value_t = CaseSel::All)]
        case: CaseSel,
    },
    /// Explicit bounds for π, p_n and ϑ against sieve data.
    VerifyLemmas {
        #[arg(long, default_value_t = 1_000_000)]
        limit: u64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// CSV files for the staircase, the α envelope and the plateau gaps.
    PlotData {
        /// Output directory (defaults to --out, then the current directory).
        #[arg(long)]
        dir: Option<PathBuf>,
        #[arg(
            long = "x",
            num_args = 1..,
            allow_negative_numbers = true,
            default_values_t = ["0.1", "0.2", "0.3", "0.4", "0.5", "0.6", "0.7", "0.8", "0.9", "1", "1.1", "1.2", "1.3"].map(String::from)
        )]
        xs: Vec<String>,
        #[arg(long, default_value_t = 8)]
        n_from: u64,
        #[arg(long, default_value_t = 1000)]
        n_to: u64,
        #[arg(long = "m", num_args = 1.., default_values_t = [8u64, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20, 21])]
        ms: Vec<u64>,
    },
}

impl Cli {
    fn scan_config(&self) -> ScanConfig {
        let mut c = ScanConfig {
            segment_len: self.segment_len,
            mem_budget: self.mem_budget,
            ..ScanConfig::default()
        };
        if let Some(n) = self.n_max {
            c.n_max = n;
        }
        c
    }

    fn run_options(&self, name: &str) -> RunOptions {
        let checkpoint = self.checkpoint.clone().or_else(|| {
            std::env::var_os(CHECKPOINT_DIR_ENV).map(|d| Path::new(&d).join(format!("{name}.ckpt")))
        });
        RunOptions {
            checkpoint,
            resume: self.resume,
            checkpoint_every: self.checkpoint_every,
            report_every: self.report_every,
        }
    }

    fn write<T: Serialize>(&self, rows: &[T]) -> Result<()> {
        emit(&render(rows, self.format)?, self.out.as_deref())
    }
}

fn parse_xs(xs: &[String]) -> Result<Vec<Rational>> {
    xs.iter()
        .map(|s| s.parse::<Rational>().map_err(anyhow::Error::from))
        .collect()
}

#[derive(Serialize)]
struct AlphaRow {
    n: u64,
    alpha_lo: f64,
    alpha_hi: f64,
    a: f64,
    a_radius: f64,
    b: f64,
    b_radius: f64,
}

#[derive(Serialize)]
struct TailRow {
    m: u64,
    lo: f64,
    hi: f64,
    argmax: u64,
    #[serde(with = "safe_u64")]
    reached: u64,
    tail_bound: Option<f64>,
    certified: bool,
}

#[derive(Serialize)]
struct GapRow {
    m: u64,
    gap: f64,
    normalized: f64,
}

#[derive(Serialize)]
struct BoundRow {
    x: String,
    y_star: f64,
    #[serde(with = "safe_u64::option")]
    n_upper: Option<u64>,
    closed_form: f64,
    asymptotic: f64,
}

#[derive(Serialize)]
struct RhRow {
    x: String,
    y_star: f64,
    n_rh: String,
    solved: bool,
}

#[derive(Serialize)]
struct RhTableRow {
    n: f64,
    unconditional: f64,
    conditional: f64,
    ratio: f64,
}

#[derive(Serialize)]
struct StairRow {
    x: String,
    #[serde(with = "safe_u64")]
    psi: u64,
    certified: bool,
}

/// Runs one parsed command line and returns the exit status.
pub fn run(cli: &Cli) -> Result<u8> {
    let config = cli.scan_config();
    match &cli.command {
        Command::Psi { xs } => {
            let xs = parse_xs(xs)?;
            let started = Instant::now();
            let results = run_psi(&xs, cli.n_max, &config, &cli.run_options("psi"))?;
            let ms = started.elapsed().as_millis() as u64;
            let records: Vec<PsiRecord> = results.iter().map(|r| PsiRecord::new(r, ms)).collect();
            for r in results.iter().filter(|r| !r.indeterminate_ns.is_empty()) {
                eprintln!("x = {}: undecided signs at n = {:?}", r.x, r.indeterminate_ns);
            }
            cli.write(&records)?;
            Ok(if records.iter().all(|r| r.certified) { EXIT_OK } else { EXIT_UNCERTIFIED })
        }
        Command::ScanAlpha { from, to } => {
            let mut rows = Vec::new();
            let s = scan_alpha_envelope(*from, *to, &config, |r| {
                rows.push(AlphaRow {
                    n: r.n,
                    alpha_lo: r.alpha_lo,
                    alpha_hi: r.alpha_hi,
                    a: r.a.value,
                    a_radius: r.a.radius,
                    b: r.b.value,
                    b_radius: r.b.radius,
                })
            })?;
            eprintln!("max alpha_n over [{}, {}] at n = {}: [{}, {}]", s.n_from, s.n_to, s.argmax, s.max_lo, s.max_hi);
            cli.write(&rows)?;
            Ok(EXIT_OK)
        }
        Command::TailSup { ms, scan_to } => {
            let rows: Vec<TailRow> = tail_sups(ms, *scan_to, &config)?
                .into_iter()
                .map(|t| TailRow {
                    m: t.m,
                    lo: t.lo,
                    hi: t.hi,
                    argmax: t.argmax,
                    reached: t.reached,
                    tail_bound: t.tail_bound,
                    certified: t.certified,
                })
                .collect();
            cli.write(&rows)?;
            Ok(if rows.iter().all(|r| r.certified) { EXIT_OK } else { EXIT_UNCERTIFIED })
        }
        Command::Plateau { ms } => match plateau_scale_report(ms, &config) {
            Ok(report) => {
                let rows: Vec<GapRow> = report
                    .into_iter()
                    .map(|r| GapRow { m: r.m, gap: r.gap, normalized: r.normalized })
                    .collect();
                cli.write(&rows)?;
                Ok(EXIT_OK)
            }
            Err(e @ CoreError::UncertifiedTail { .. }) => {
                eprintln!("{e}");
                Ok(EXIT_UNCERTIFIED)
            }
            Err(e) => Err(e.into()),
        },
        Command::Bound { xs } => {
            let c = &config.constants;
            let rows = parse_xs(xs)?
                .into_iter()
                .map(|x| {
                    let xf = x.to_f64();
                    let n_up = match n_upper(xf, c) {
                        Ok(n) => Some(n),
                        Err(CoreError::Overflow { .. }) => None,
                        Err(e) => return Err(e.into()),
                    };
                    Ok(BoundRow {
                        x: x.to_string(),
                        y_star: unconditional_log_threshold(xf, c)?,
                        n_upper: n_up,
                        closed_form: closed_form_bound(xf, c)?,
                        asymptotic: asymptotic_psi(xf, c)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            cli.write(&rows)?;
            Ok(EXIT_OK)
        }
        Command::RhBound { xs, ns } => {
            if !ns.is_empty() {
                let rows: Vec<RhTableRow> = rh_error_report(ns)?
                    .into_iter()
                    .map(|r| RhTableRow {
                        n: r.n,
                        unconditional: r.unconditional,
                        conditional: r.conditional,
                        ratio: r.ratio,
                    })
                    .collect();
                cli.write(&rows)?;
                return Ok(EXIT_OK);
            }
            let rows = parse_xs(xs)?
                .into_iter()
                .map(|x| {
                    let t = rh_n_upper(x.to_f64(), &config.constants)?;
                    Ok(RhRow {
                        x: x.to_string(),
                        y_star: t.y_star,
                        n_rh: t.n_rh.to_string(),
                        solved: t.solved,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            cli.write(&rows)?;
            Ok(if rows.iter().all(|r| r.solved) { EXIT_OK } else { EXIT_UNCERTIFIED })
        }
        Command::VerifyConjecture { case } => {
            let rows = verify_conjecture(*case, &config, &cli.run_options("conjecture"))?;
            cli.write(&rows)?;
            Ok(if rows.iter().any(|r| r.verdict == Verdict::Fail) {
                EXIT_ERROR
            } else if rows.iter().any(|r| r.verdict == Verdict::Indeterminate) {
                EXIT_UNCERTIFIED
            } else {
                EXIT_OK
            })
        }
        Command::VerifyLemmas { limit, samples, seed } => {
            let rows = verify_lemmas(&LemmaConfig {
                limit: *limit,
                samples: *samples,
                seed: *seed,
                segment_len: cli.segment_len,
            })?;
            cli.write(&rows)?;
            if let Some(r) = rows.iter().find(|r| r.violations > 0) {
                eprintln!("{} violated: {}", r.lemma, r.first_violation.as_deref().unwrap_or("?"));
                return Ok(EXIT_ERROR);
            }
            Ok(EXIT_OK)
        }
        Command::PlotData { dir, xs, n_from, n_to, ms } => {
            let dir = dir.clone().or_else(|| cli.out.clone()).unwrap_or_else(|| PathBuf::from("."));
            std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
            let csv = Some(Format::Csv);

            let xs = parse_xs(xs)?;
            let stairs: Vec<StairRow> = scan_psi(&xs, cli.n_max, &config)?
                .iter()
                .map(|r| StairRow { x: r.x.to_string(), psi: r.psi, certified: r.certified })
                .collect();
            emit(&render(&stairs, csv)?, Some(&dir.join("staircase.csv")))?;

            let mut envelope = Vec::new();
            scan_alpha_envelope(*n_from, *n_to, &config, |r| {
                envelope.push(AlphaRow {
                    n: r.n,
                    alpha_lo: r.alpha_lo,
                    alpha_hi: r.alpha_hi,
                    a: r.a.value,
                    a_radius: r.a.radius,
                    b: r.b.value,
                    b_radius: r.b.radius,
                })
            })?;
            emit(&render(&envelope, csv)?, Some(&dir.join("envelope.csv")))?;

            let gaps: Vec<GapRow> = plateau_scale_report(ms, &config)?
                .into_iter()
                .map(|r| GapRow { m: r.m, gap: r.gap, normalized: r.normalized })
                .collect();
            emit(&render(&gaps, csv)?, Some(&dir.join("gaps.csv")))?;
            eprintln!("wrote staircase.csv, envelope.csv and gaps.csv to {}", dir.display());
            Ok(if stairs.iter().all(|r| r.certified) { EXIT_OK } else { EXIT_UNCERTIFIED })
        }
    }
}
