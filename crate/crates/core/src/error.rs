use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("alphabet is empty")]
    EmptyAlphabet,

    #[error("duplicate symbol `{0}` in alphabet")]
    DuplicateLabel(String),

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("tensor has {found} entries, expected {expected}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("negative probability {value} at index {index:?}")]
    NegativeEntry { index: Vec<usize>, value: f64 },

    #[error("non-finite probability at index {index:?}")]
    NonFinite { index: Vec<usize> },

    #[error("probabilities sum to {}, deviation {} from 1", short(*total), short(*deviation))]
    Normalization { total: f64, deviation: f64 },

    #[error("channel row {row} sums to {sum}")]
    NotRowStochastic { row: usize, sum: f64 },

    #[error("conditioning on zero-probability symbol `{0}`")]
    ZeroWeight(String),

    #[error("alphabet mismatch: expected {expected} symbols, found {found}")]
    AlphabetMismatch { expected: usize, found: usize },

    #[error("distribution has empty support")]
    EmptySupport,

    #[error("malformed product alphabet: {0}")]
    MalformedProduct(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no mixing weight in the search grid lowers I(X:Y|Z) = {original} (best {best})")]
    NoStrictDecrease { original: f64, best: f64 },

    #[error("enumeration needs {states} states, limit is {limit}")]
    SizeBound { states: f64, limit: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{0}")]
    Io(String),
}

// Six significant decimals for readable magnitudes, scientific otherwise.
fn short(v: f64) -> String {
    if v == 0.0 || (1e-4..1e6).contains(&v.abs()) {
        let s = format!("{v:.6}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.3e}")
    }
}

#[cfg(test)]
mod tests {
    use super::Error;

    #[test]
    fn normalization_message_is_readable() {
        let e = Error::Normalization {
            total: 0.98,
            deviation: 0.020000000000000018,
        };
        assert_eq!(e.to_string(), "probabilities sum to 0.98, deviation 0.02 from 1");
        let e = Error::Normalization {
            total: 1.0 + 3e-8,
            deviation: 3e-8,
        };
        assert_eq!(e.to_string(), "probabilities sum to 1, deviation 3.000e-8 from 1");
    }
}
