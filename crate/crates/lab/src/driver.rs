//! Runs a `Ψ` scan in chunks, saving checkpoints and printing progress.

use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use bonse_core::scan::{PsiResult, PsiScan, ScanConfig};
use bonse_core::Rational;

use crate::checkpoint;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub checkpoint: Option<PathBuf>,
    pub resume: bool,
    /// Steps between checkpoint saves.
    pub checkpoint_every: u64,
    /// Steps between progress lines on stderr; 0 for none.
    pub report_every: u64,
}

pub fn run_psi(
    xs: &[Rational],
    ceiling: Option<u64>,
    config: &ScanConfig,
    opts: &RunOptions,
) -> Result<Vec<PsiResult>> {
    let mut scan = match (&opts.checkpoint, opts.resume) {
        (Some(path), true) if path.exists() => {
            let state = checkpoint::load(path)
                .with_context(|| format!("loading checkpoint {}", path.display()))?;
            let saved: Vec<Rational> = state.trackers.iter().map(|t| t.x).collect();
            if saved != xs {
                bail!(
                    "checkpoint {} was written for x = {:?}, not {:?}",
                    path.display(),
                    saved.iter().map(ToString::to_string).collect::<Vec<_>>(),
                    xs.iter().map(ToString::to_string).collect::<Vec<_>>()
                );
            }
            eprintln!("resuming at n = {}", state.n);
            PsiScan::resume(&state, ceiling, config)?
        }
        (None, true) => bail!("--resume needs a checkpoint path"),
        _ => PsiScan::new(xs, ceiling, config)?,
    };

    let started = Instant::now();
    let every = |k: u64| if k == 0 { u64::MAX } else { k };
    let ckpt_every = if opts.checkpoint.is_some() { every(opts.checkpoint_every) } else { u64::MAX };
    let report_every = every(opts.report_every);
    while !scan.is_done() {
        let n = scan.n();
        let next_ckpt = (n / ckpt_every + 1).saturating_mul(ckpt_every);
        let next_report = (n / report_every + 1).saturating_mul(report_every);
        let target = next_ckpt.min(next_report).min(scan.n_stop() + 1);
        scan.run_to(target - 1)?;
        let n = scan.n();
        if let Some(path) = &opts.checkpoint {
            if n % ckpt_every == 0 || scan.is_done() {
                checkpoint::save(&scan.state(), path)
                    .with_context(|| format!("writing checkpoint {}", path.display()))?;
            }
        }
        if n % report_every == 0 {
            eprintln!(
                "n = {n} of {}  theta radius {:.2e}  {:.1} s",
                scan.n_stop(),
                scan.theta().radius,
                started.elapsed().as_secs_f64()
            );
        }
    }
    Ok(scan.results())
}
