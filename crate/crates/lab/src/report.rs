//! Output records and their JSON / CSV / table renderings.

use std::io::Write;

use anyhow::{Context, Result};
use bonse_core::scan::PsiResult;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Integers at or above 2^53 travel as strings so JSON readers keep them exact.
pub mod safe_u64 {
    use serde::{de, Deserialize, Deserializer, Serializer};

    const LIMIT: u64 = 1 << 53;

    pub fn serialize<S: Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
        if *v >= LIMIT {
            s.serialize_str(&v.to_string())
        } else {
            s.serialize_u64(*v)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(u64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) => s.parse().map_err(de::Error::custom),
        }
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(v: &Option<u64>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(v) => super::serialize(v, s),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<u64>, D::Error> {
            match Option::<Repr>::deserialize(d)? {
                None => Ok(None),
                Some(Repr::Num(v)) => Ok(Some(v)),
                Some(Repr::Str(s)) if s.is_empty() => Ok(None),
                Some(Repr::Str(s)) => s.parse().map(Some).map_err(de::Error::custom),
            }
        }
    }
}

/// One `Ψ(x)` result as emitted by `psi`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsiRecord {
    /// Exact `num/den`.
    pub x: String,
    #[serde(with = "safe_u64")]
    pub psi: u64,
    #[serde(with = "safe_u64::option")]
    pub last_nonpositive: Option<u64>,
    #[serde(with = "safe_u64")]
    pub n_upper: u64,
    pub certified: bool,
    pub runtime_ms: u64,
}

impl PsiRecord {
    pub fn new(r: &PsiResult, runtime_ms: u64) -> Self {
        PsiRecord {
            x: r.x.to_string(),
            psi: r.psi,
            last_nonpositive: r.last_nonpositive,
            n_upper: r.n_upper_used,
            certified: r.certified,
            runtime_ms,
        }
    }
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<Vec<Vec<String>>> {
    let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().context("flushing CSV")?;
    let mut out = Vec::new();
    let mut rd = csv::ReaderBuilder::new().has_headers(false).from_reader(bytes.as_slice());
    for rec in rd.records() {
        out.push(rec?.iter().map(str::to_string).collect());
    }
    Ok(out)
}

/// Right-aligned columns, two spaces apart.
fn aligned(table: &[Vec<String>]) -> String {
    let cols = table.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| table.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut s = String::new();
    for row in table {
        let line: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, v)| format!("{v:>w$}", w = widths[c]))
            .collect();
        s.push_str(line.join("  ").trim_end());
        s.push('\n');
    }
    s
}

/// Renders rows in the requested format; `None` is an aligned table.
pub fn render<T: Serialize>(rows: &[T], format: Option<Format>) -> Result<String> {
    Ok(match format {
        Some(Format::Json) => {
            let mut s = serde_json::to_string_pretty(rows)?;
            s.push('\n');
            s
        }
        Some(Format::Csv) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in rows {
                w.serialize(r)?;
            }
            String::from_utf8(w.into_inner().context("flushing CSV")?)?
        }
        None => aligned(&to_csv(rows)?),
    })
}

/// Writes to `path`, or to standard output when there is none.
pub fn emit(text: &str, path: Option<&std::path::Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<PsiRecord> {
        vec![
            PsiRecord {
                x: "1/10".into(),
                psi: 24_154_953,
                last_nonpositive: Some(24_154_952),
                n_upper: 43_565_840,
                certified: true,
                runtime_ms: 1234,
            },
            PsiRecord {
                x: "2/1".into(),
                psi: 8,
                last_nonpositive: None,
                n_upper: 1 << 60,
                certified: false,
                runtime_ms: 0,
            },
        ]
    }

    #[test]
    fn csv_is_stable() {
        let golden = "x,psi,last_nonpositive,n_upper,certified,runtime_ms\n\
                      1/10,24154953,24154952,43565840,true,1234\n\
                      2/1,8,,1152921504606846976,false,0\n";
        assert_eq!(render(&sample(), Some(Format::Csv)).unwrap(), golden);
    }

    #[test]
    fn json_round_trip() {
        let text = render(&sample(), Some(Format::Json)).unwrap();
        assert!(text.contains("\"n_upper\": \"1152921504606846976\""));
        assert!(text.contains("\"psi\": 24154953"));
        let back: Vec<PsiRecord> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, sample());
    }

    #[test]
    fn csv_round_trip() {
        let text = render(&sample(), Some(Format::Csv)).unwrap();
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        let back: Vec<PsiRecord> = rd.deserialize().collect::<Result<_, _>>().unwrap();
        assert_eq!(back, sample());
    }

    #[test]
    fn table_aligns() {
        let t = render(&sample(), None).unwrap();
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].trim_start().starts_with('x'));
        assert!(lines[1].ends_with("1234"));
    }
}
