//! Structured reports and their exit codes.

use ergodic_core::action::ValidationError;
use ergodic_core::exact::RationalSubspace;
use ergodic_core::laurent_engine::{BoundedVerdict, ErgodicDirection};
use ergodic_core::oracle::{CrossValidation, DemoE2};
use ergodic_core::toral::{ErgodicElement, FiltrationReport, LargestErgodic, Verdict};
use serde::{Deserialize, Serialize};

use crate::document::ActionDocument;

pub const SCHEMA_VERSION: u32 = 1;

pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const VALIDATION: i32 = 2;
    pub const NOT_ERGODIC: i32 = 3;
    pub const REPLAY: i32 = 4;
    pub const EXHAUSTED: i32 = 5;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<ActionDocument>,
    pub flags: Flags,
    pub outcome: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

/// Effective parameters, defaults filled in.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_bound: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_exponent_sum: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search_box: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allow_bounded: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub box_radius: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorVerdicts {
    /// 1-based.
    pub index: usize,
    pub ergodic: Verdict,
    pub distal: Verdict,
    pub mixing: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    MatrixAnalysis {
        generators: Vec<GeneratorVerdicts>,
        group_ergodic: Verdict,
        group_distal: Verdict,
        finite_orbit_subspace: RationalSubspace,
        largest_ergodic: LargestErgodic,
    },
    LaurentAnalysis {
        /// `α_{e_i}` for each unit vector.
        generators: Vec<BoundedVerdict>,
        group: BoundedVerdict,
    },
    ErgodicElement {
        element: ErgodicElement,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        spot_check: Option<CrossValidation>,
    },
    ErgodicDirection {
        result: ErgodicDirection,
    },
    NotErgodicGroup {
        witness: Verdict,
    },
    NotErgodicLaurentGroup {
        witness: BoundedVerdict,
    },
    SearchExhausted {
        bound: u64,
    },
    Filtration {
        filtration: FiltrationReport,
        /// Computed independently of the chain.
        group_verdict: Verdict,
        consistent: bool,
    },
    OracleCheck {
        cross_validation: CrossValidation,
    },
    DemoE2 {
        demo: DemoE2,
        verified: bool,
    },
    ValidationFailed {
        errors: Vec<ValidationError>,
    },
    SchemaError {
        line: usize,
        column: usize,
        message: String,
    },
    IoError {
        message: String,
    },
    Unsupported {
        message: String,
    },
    Verification {
        report_command: String,
        certificates_checked: usize,
        failures: Vec<String>,
    },
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::MatrixAnalysis { .. }
            | Outcome::LaurentAnalysis { .. }
            | Outcome::ErgodicDirection { .. } => exit::OK,
            Outcome::ErgodicElement { spot_check, .. } => {
                if spot_check.as_ref().is_some_and(|c| !c.passed()) {
                    exit::REPLAY
                } else {
                    exit::OK
                }
            }
            Outcome::NotErgodicGroup { .. } | Outcome::NotErgodicLaurentGroup { .. } => exit::NOT_ERGODIC,
            Outcome::SearchExhausted { .. } => exit::EXHAUSTED,
            Outcome::Filtration { consistent, .. } => {
                if *consistent {
                    exit::OK
                } else {
                    exit::REPLAY
                }
            }
            Outcome::OracleCheck { cross_validation } => {
                if cross_validation.passed() {
                    exit::OK
                } else {
                    exit::REPLAY
                }
            }
            Outcome::DemoE2 { verified, .. } => {
                if *verified {
                    exit::OK
                } else {
                    exit::REPLAY
                }
            }
            Outcome::ValidationFailed { .. } | Outcome::SchemaError { .. } | Outcome::Unsupported { .. } => {
                exit::VALIDATION
            }
            Outcome::IoError { .. } => exit::IO,
            Outcome::Verification { failures, .. } => {
                if failures.is_empty() {
                    exit::OK
                } else {
                    exit::REPLAY
                }
            }
        }
    }
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn exit_code(&self) -> i32 {
        self.outcome.exit_code()
    }
}
