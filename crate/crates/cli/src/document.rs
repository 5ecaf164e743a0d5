//! Input documents: one action per file, tagged by `"type"`.
//!
//! ```json
//! {"type": "toral", "r": 2, "generators": [[[0, 1], [1, 1]]]}
//! {"type": "solenoid", "generators": [[["2", "0"], ["0", "1/3"]]]}
//! {"type": "laurent", "p": 2, "d": 2,
//!  "g": [{"exponents": [0, 0], "coefficient": 1},
//!        {"exponents": [1, 0], "coefficient": 1},
//!        {"exponents": [0, 1], "coefficient": 1}]}
//! ```
//!
//! Matrix entries are JSON integers or decimal strings (`"-3"`, `"1/2"`).

use ergodic_core::action::{validate, CommutingAction, MatrixKind, RawAction, ValidationError};
use ergodic_core::exact::laurent::Term;
use ergodic_core::exact::RatMatrix;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ActionDocument {
    Toral {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r: Option<usize>,
        generators: Vec<RatMatrix>,
    },
    Solenoid {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r: Option<usize>,
        generators: Vec<RatMatrix>,
    },
    Laurent {
        p: u64,
        d: usize,
        g: Vec<Term>,
    },
}

#[derive(Deserialize)]
struct Tag {
    #[serde(rename = "type")]
    kind: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixBody {
    #[serde(rename = "type")]
    _kind: String,
    #[serde(default)]
    r: Option<usize>,
    generators: Vec<RatMatrix>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LaurentBody {
    #[serde(rename = "type")]
    _kind: String,
    p: u64,
    d: usize,
    g: Vec<Term>,
}

fn schema_error(e: serde_json::Error) -> DocumentError {
    DocumentError::Schema { line: e.line(), column: e.column(), message: e.to_string() }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DocumentError {
    /// Malformed JSON or a schema mismatch, with 1-based position.
    Schema { line: usize, column: usize, message: String },
    Invalid(Vec<ValidationError>),
}

impl std::fmt::Display for DocumentError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DocumentError::Schema { line, column, message } => {
                write!(f, "schema error at line {line}, column {column}: {message}")
            }
            DocumentError::Invalid(errors) => {
                let parts: Vec<String> = errors.iter().map(ToString::to_string).collect();
                write!(f, "invalid action: {}", parts.join("; "))
            }
        }
    }
}

impl ActionDocument {
    /// Reads the tag first, then the body straight from the text, so every
    /// schema error keeps its position.
    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        let tag: Tag = serde_json::from_str(text).map_err(schema_error)?;
        match tag.kind.as_str() {
            "toral" | "solenoid" => {
                let body: MatrixBody = serde_json::from_str(text).map_err(schema_error)?;
                Ok(if tag.kind == "toral" {
                    ActionDocument::Toral { r: body.r, generators: body.generators }
                } else {
                    ActionDocument::Solenoid { r: body.r, generators: body.generators }
                })
            }
            "laurent" => {
                let body: LaurentBody = serde_json::from_str(text).map_err(schema_error)?;
                Ok(ActionDocument::Laurent { p: body.p, d: body.d, g: body.g })
            }
            other => Err(DocumentError::Schema {
                line: 1,
                column: 1,
                message: format!("unknown type `{other}`, expected `toral`, `solenoid` or `laurent`"),
            }),
        }
    }

    pub fn to_raw(&self) -> RawAction {
        match self {
            ActionDocument::Toral { r, generators } => {
                RawAction::Matrix { kind: MatrixKind::Toral, r: *r, generators: generators.clone() }
            }
            ActionDocument::Solenoid { r, generators } => {
                RawAction::Matrix { kind: MatrixKind::Solenoid, r: *r, generators: generators.clone() }
            }
            ActionDocument::Laurent { p, d, g } => RawAction::Laurent { p: *p, d: *d, g: g.clone() },
        }
    }

    pub fn validate(&self) -> Result<CommutingAction, DocumentError> {
        validate(self.to_raw()).map_err(DocumentError::Invalid)
    }
}
