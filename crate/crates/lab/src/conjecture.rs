//! The five published `Ψ` plateaus, checked in one pass.

use anyhow::Result;
use bonse_core::scan::{PsiResult, ScanConfig};
use bonse_core::Rational;
use serde::Serialize;

use crate::driver::{run_psi, RunOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CaseSel {
    I,
    Ii,
    Iii,
    Iv,
    V,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseRow {
    pub case: &'static str,
    pub claim: String,
    pub observed: String,
    pub verdict: Verdict,
}

struct Case {
    id: &'static str,
    sel: CaseSel,
    /// One point, or the two endpoints of an interval.
    xs: &'static [&'static str],
    expected: u64,
}

const CASES: [Case; 5] = [
    Case { id: "i", sel: CaseSel::I, xs: &["0.9", "1.3"], expected: 21 },
    Case { id: "ii", sel: CaseSel::Ii, xs: &["0.5", "0.8"], expected: 149 },
    Case { id: "iii", sel: CaseSel::Iii, xs: &["0.3", "0.4"], expected: 59_875 },
    Case { id: "iv", sel: CaseSel::Iv, xs: &["0.2"], expected: 442_414 },
    Case { id: "v", sel: CaseSel::V, xs: &["0.1"], expected: 24_154_953 },
];

pub fn verify_conjecture(sel: CaseSel, config: &ScanConfig, opts: &RunOptions) -> Result<Vec<CaseRow>> {
    let cases: Vec<&Case> = CASES.iter().filter(|c| sel == CaseSel::All || c.sel == sel).collect();
    let xs: Vec<Rational> = cases
        .iter()
        .flat_map(|c| c.xs.iter())
        .map(|s| s.parse())
        .collect::<Result<_, _>>()?;
    let results = run_psi(&xs, None, config, opts)?;
    let mut it = results.iter();
    Ok(cases
        .iter()
        .map(|c| {
            let rs: Vec<&PsiResult> = it.by_ref().take(c.xs.len()).collect();
            let claim = match c.xs {
                [a, b] => format!("Psi(x) = {} on [{a}, {b}]", c.expected),
                [a] => format!("Psi({a}) = {}", c.expected),
                _ => unreachable!(),
            };
            let observed = c
                .xs
                .iter()
                .zip(&rs)
                .map(|(x, r)| {
                    let tag = if r.certified { "" } else { " (uncertified)" };
                    format!("Psi({x}) = {}{tag}", r.psi)
                })
                .collect::<Vec<_>>()
                .join(", ");
            let verdict = if rs.iter().any(|r| !r.certified) {
                Verdict::Indeterminate
            } else if rs.iter().all(|r| r.psi == c.expected) {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
            CaseRow {
                case: c.id,
                claim,
                observed,
                verdict,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cases_one_and_two() {
        let opts = RunOptions::default();
        let rows = verify_conjecture(CaseSel::I, &ScanConfig::default(), &opts).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].verdict, Verdict::Pass);
        assert_eq!(rows[0].observed, "Psi(0.9) = 21, Psi(1.3) = 21");
        let rows = verify_conjecture(CaseSel::Ii, &ScanConfig::default(), &opts).unwrap();
        assert_eq!(rows[0].verdict, Verdict::Pass);
    }
}
