//! Binary checkpoint files for [`ScanState`].
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! "BNSESCAN"  u32 version
//! u64 n  u64 p_n  u64 p_next
//! f64 theta.hi  f64 theta.lo  f64 theta.radius  u64 theta.count
//! u64 π(n)  u64 π(log n)  u64 π(π(n))
//! u64 trackers, then per tracker:
//!     i64 x.num  u64 x.den  i64 last_nonpositive (−1: none)
//!     u64 k  k × u64 indeterminate indices
//! u64 len  len bytes of the high-precision ϑ snapshot as "mid±rad" (0: absent)
//!     when present: u64 base_count  4 × u64 limbs  i64 exp2  u64 truncations
//! u32 CRC-32C of everything above
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use bonse_core::counters::PrimeCounts;
use bonse_core::hp::HpReal;
use bonse_core::scan::{HpState, ScanState, TrackerState};
use bonse_core::{Rational, ThetaAccumulator};

pub const MAGIC: &[u8; 8] = b"BNSESCAN";
pub const VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CheckpointError {
    #[error("checkpoint I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("checkpoint is truncated")]
    Truncated,

    #[error("not a checkpoint file")]
    BadMagic,

    #[error("checkpoint format version {found} is not supported (expected {VERSION})")]
    Version { found: u32 },

    #[error("checkpoint is corrupt: stored CRC-32C {stored:#010x}, computed {computed:#010x}")]
    Checksum { stored: u32, computed: u32 },

    #[error("checkpoint field out of range: {0}")]
    Field(&'static str),
}

type Result<T> = std::result::Result<T, CheckpointError>;

pub fn encode(state: &ScanState) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(256);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    let u = |out: &mut Vec<u8>, v: u64| out.extend_from_slice(&v.to_le_bytes());
    let f = |out: &mut Vec<u8>, v: f64| out.extend_from_slice(&v.to_bits().to_le_bytes());
    let i = |out: &mut Vec<u8>, v: i64| out.extend_from_slice(&v.to_le_bytes());

    u(&mut out, state.n);
    u(&mut out, state.p_n);
    u(&mut out, state.p_next);
    f(&mut out, state.theta.hi);
    f(&mut out, state.theta.lo);
    f(&mut out, state.theta.radius);
    u(&mut out, state.theta.count);
    u(&mut out, state.counts.pi_n);
    u(&mut out, state.counts.pi_log_n);
    u(&mut out, state.counts.pi_pi_n);

    u(&mut out, state.trackers.len() as u64);
    for t in &state.trackers {
        let num = i64::try_from(t.x.numerator()).map_err(|_| CheckpointError::Field("x numerator"))?;
        let den = u64::try_from(t.x.denominator()).map_err(|_| CheckpointError::Field("x denominator"))?;
        i(&mut out, num);
        u(&mut out, den);
        let last = match t.last_nonpositive {
            Some(n) => i64::try_from(n).map_err(|_| CheckpointError::Field("last_nonpositive"))?,
            None => -1,
        };
        i(&mut out, last);
        u(&mut out, t.indeterminate.len() as u64);
        for &n in &t.indeterminate {
            u(&mut out, n);
        }
    }

    match &state.hp {
        Some(hp) => {
            let text = hp.base.to_decimal_string();
            u(&mut out, text.len() as u64);
            out.extend_from_slice(text.as_bytes());
            u(&mut out, hp.base_count);
            for limb in hp.limbs {
                u(&mut out, limb);
            }
            i(&mut out, hp.exp2);
            u(&mut out, hp.truncations);
        }
        None => u(&mut out, 0),
    }

    let crc = crc32c::crc32c(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(len).ok_or(CheckpointError::Truncated)?;
        let s = self.bytes.get(self.pos..end).ok_or(CheckpointError::Truncated)?;
        self.pos = end;
        Ok(s)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn i64(&mut self) -> Result<i64> {
        Ok(i64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_bits(self.u64()?))
    }

    fn len(&mut self) -> Result<usize> {
        let v = self.u64()?;
        // a length can never exceed what is left of the file
        if v > (self.bytes.len() - self.pos) as u64 {
            return Err(CheckpointError::Truncated);
        }
        Ok(v as usize)
    }
}

pub fn decode(bytes: &[u8]) -> Result<ScanState> {
    if bytes.len() < MAGIC.len() + 4 {
        return Err(CheckpointError::Truncated);
    }
    if &bytes[..8] != MAGIC {
        return Err(CheckpointError::BadMagic);
    }
    let found = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if found != VERSION {
        return Err(CheckpointError::Version { found });
    }
    // A body that parses but fails the checksum is corrupt; one that runs out
    // of bytes first is truncated.
    let parsed = parse_body(bytes);
    if bytes.len() < 16 {
        return Err(CheckpointError::Truncated);
    }
    let (body, trailer) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(trailer.try_into().unwrap());
    let computed = crc32c::crc32c(body);
    match parsed {
        Err(CheckpointError::Truncated) if stored != computed => Err(CheckpointError::Truncated),
        _ if stored != computed => Err(CheckpointError::Checksum { stored, computed }),
        other => other,
    }
}

fn parse_body(bytes: &[u8]) -> Result<ScanState> {
    let mut r = Reader { bytes, pos: 12 };
    let n = r.u64()?;
    let p_n = r.u64()?;
    let p_next = r.u64()?;
    let theta = ThetaAccumulator {
        hi: r.f64()?,
        lo: r.f64()?,
        radius: r.f64()?,
        count: r.u64()?,
    };
    let counts = PrimeCounts {
        n,
        pi_n: r.u64()?,
        pi_log_n: r.u64()?,
        pi_pi_n: r.u64()?,
    };

    let count = r.len()?;
    let mut trackers = Vec::with_capacity(count.min(1 << 16));
    for _ in 0..count {
        let num = r.i64()?;
        let den = r.u64()?;
        if den == 0 {
            return Err(CheckpointError::Field("x denominator"));
        }
        let last = r.i64()?;
        let last_nonpositive = match last {
            -1 => None,
            v if v >= 0 => Some(v as u64),
            _ => return Err(CheckpointError::Field("last_nonpositive")),
        };
        let k = r.len()?;
        let mut indeterminate = Vec::with_capacity(k.min(1 << 16));
        for _ in 0..k {
            indeterminate.push(r.u64()?);
        }
        trackers.push(TrackerState {
            x: Rational::new(num as i128, den as i128),
            last_nonpositive,
            indeterminate,
        });
    }

    let text_len = r.len()?;
    let hp = if text_len == 0 {
        None
    } else {
        let text = std::str::from_utf8(r.take(text_len)?)
            .map_err(|_| CheckpointError::Field("snapshot text"))?;
        let base = HpReal::from_decimal_str(text).map_err(|_| CheckpointError::Field("snapshot text"))?;
        let base_count = r.u64()?;
        let mut limbs = [0u64; 4];
        for limb in &mut limbs {
            *limb = r.u64()?;
        }
        Some(HpState {
            base,
            base_count,
            limbs,
            exp2: r.i64()?,
            truncations: r.u64()?,
        })
    };

    r.take(4)?;
    if r.pos != bytes.len() {
        return Err(CheckpointError::Field("trailing bytes"));
    }
    Ok(ScanState {
        n,
        p_n,
        p_next,
        theta,
        counts,
        trackers,
        hp,
    })
}

/// Writes to a sibling temporary file and renames it into place.
pub fn save(state: &ScanState, path: &Path) -> Result<()> {
    let bytes = encode(state)?;
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = Path::new(&tmp);
    {
        let mut f = fs::File::create(tmp)?;
        f.write_all(&bytes)?;
        f.sync_all()?;
    }
    fs::rename(tmp, path)?;
    Ok(())
}

pub fn load(path: &Path) -> Result<ScanState> {
    decode(&fs::read(path)?)
}
