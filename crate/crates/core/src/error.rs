use alloc::string::String;

use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// The sieve was asked to go past the range its base primes cover.
    #[error("sieve limit {requested} exceeds the configured limit {limit}")]
    SieveLimit { requested: u64, limit: u64 },

    /// The base prime table plus one segment would not fit the memory budget.
    #[error("sieve needs {needed} bytes but the memory budget is {budget} bytes")]
    MemoryBudget { needed: u64, budget: u64 },

    /// A divisor required to be certified positive was not.
    #[error("b_n = {value} ± {radius} is not certified positive")]
    NotPositive { value: f64, radius: f64 },

    /// The tail supremum needed for a plateau gap was not certified.
    #[error("tail supremum A_{m} is not certified (scanned to n = {reached})")]
    UncertifiedTail { m: u64, reached: u64 },

    /// A threshold does not fit in 64 bits.
    #[error("threshold exp({log_value}) does not fit in 64 bits")]
    Overflow { log_value: f64 },

    #[error("cannot parse {input:?} as an exact rational: {reason}")]
    Parse { input: String, reason: &'static str },

    /// A restored scan state is internally inconsistent.
    #[error("inconsistent scan state: {0}")]
    State(&'static str),
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }
}
