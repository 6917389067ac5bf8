use lft_core::verify::VerifyError;
use lft_core::{FieldError, HypError, NumericError, SeriesError, SymbolError, TransformError};
use serde_json::{json, Value};
use thiserror::Error;

pub const EXIT_HYPOTHESIS: i32 = 2;
pub const EXIT_EXTENSION: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_INTERNAL: i32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("{message}")]
    NeedsExtension { message: String, orders: Vec<u64> },
    #[error("{0}")]
    Verification(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => EXIT_USAGE,
            CliError::Hypothesis(_) => EXIT_HYPOTHESIS,
            CliError::NeedsExtension { .. } => EXIT_EXTENSION,
            CliError::Verification(_) => EXIT_VERIFICATION,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }

    pub fn to_json(&self) -> Value {
        let kind = match self {
            CliError::Usage(_) => "usage",
            CliError::Input(_) => "input",
            CliError::Hypothesis(_) => "hypothesis_violation",
            CliError::NeedsExtension { .. } => "needs_extension",
            CliError::Verification(_) => "verification_failure",
            CliError::Internal(_) => "internal",
        };
        let mut body = json!({ "kind": kind, "code": self.exit_code(), "message": self.to_string() });
        if let CliError::NeedsExtension { orders, .. } = self {
            body["required_orders"] = json!(orders);
        }
        json!({ "error": body })
    }
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        match &e {
            FieldError::NoRootInField {
                required_extra_orders, ..
            } => CliError::NeedsExtension {
                message: e.to_string(),
                orders: required_extra_orders.clone(),
            },
            FieldError::OrderNotAvailable(n) => CliError::NeedsExtension {
                message: e.to_string(),
                orders: vec![*n],
            },
            FieldError::DivisionByZero | FieldError::DlogOfZero => CliError::Internal(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        match e {
            SeriesError::Field(f) => f.into(),
            SeriesError::NotCoprime { .. } => CliError::Hypothesis(e.to_string()),
            SeriesError::PrecisionUnderflow(_) => CliError::Verification(e.to_string()),
            SeriesError::BadSeed(_) => CliError::Input(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<SymbolError> for CliError {
    fn from(e: SymbolError) -> Self {
        match e {
            SymbolError::Field(f) => f.into(),
            SymbolError::Series(s) => s.into(),
            SymbolError::DepthTooLarge { .. } => CliError::Hypothesis(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<TransformError> for CliError {
    fn from(e: TransformError) -> Self {
        let orders = e.missing_orders();
        if !orders.is_empty() {
            return CliError::NeedsExtension {
                message: e.to_string(),
                orders,
            };
        }
        match e {
            TransformError::HypothesisViolation { condition } => CliError::Hypothesis(condition),
            TransformError::UnsupportedTameTrivial | TransformError::WrongPoint { .. } => {
                CliError::Hypothesis(e.to_string())
            }
            TransformError::PrecisionUnderflow { .. } | TransformError::VerificationFailed(_) => {
                CliError::Verification(e.to_string())
            }
            TransformError::Field(f) => f.into(),
            TransformError::Series(s) => s.into(),
            TransformError::Symbol(s) => s.into(),
        }
    }
}

impl From<HypError> for CliError {
    fn from(e: HypError) -> Self {
        match e {
            HypError::DisjointnessViolated(_) | HypError::SmallCharacteristic { .. } => {
                CliError::Hypothesis(e.to_string())
            }
            HypError::Empty => CliError::Usage(e.to_string()),
            HypError::Transform(t) => t.into(),
            HypError::Symbol(s) => s.into(),
        }
    }
}

impl From<NumericError> for CliError {
    fn from(e: NumericError) -> Self {
        match e {
            NumericError::OrderNotAvailable { order, .. } => CliError::NeedsExtension {
                message: e.to_string(),
                orders: vec![order],
            },
            NumericError::TrivialCharacter | NumericError::ZeroArgument => CliError::Hypothesis(e.to_string()),
            NumericError::Field(f) => f.into(),
            NumericError::TooLarge(_) | NumericError::Empty => CliError::Input(e.to_string()),
            NumericError::BadTable { .. } => CliError::Internal(e.to_string()),
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        CliError::Usage(e.to_string())
    }
}
