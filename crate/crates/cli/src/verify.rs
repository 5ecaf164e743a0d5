//! Certificate replay for parsed reports.

use ergodic_core::action::{CommutingAction, LaurentCyclicAction, MatrixAction, ProductDemoSpec};
use ergodic_core::exact::RatMatrix;
use ergodic_core::laurent_engine::{direction_scan_order, BoundedKind, BoundedVerdict};
use ergodic_core::oracle::{cross_validate, demo_e2, spot_check};
use ergodic_core::toral::{finite_orbit_subspace, Certificate, ReplayError, Verdict, VerdictKind};

use crate::report::{Outcome, Report};
use crate::SPOT_CHECK_SAMPLES;

#[derive(Default)]
struct Checker {
    checked: usize,
    failures: Vec<String>,
}

impl Checker {
    fn replay(&mut self, label: &str, result: Result<(), ReplayError>) {
        self.checked += 1;
        if let Err(e) = result {
            self.failures.push(format!("{label}: {e}"));
        }
    }

    fn require(&mut self, label: &str, cond: bool) {
        if !cond {
            self.failures.push(label.to_string());
        }
    }

    fn verdict(&mut self, label: &str, v: &Verdict, subject: &RatMatrix) {
        self.require(&format!("{label}: subject differs from the input"), v.subject() == Some(subject));
        self.replay(label, v.replay());
    }

    fn group_verdict(&mut self, label: &str, v: &Verdict, duals: &[RatMatrix]) {
        let acting = match &v.certificate {
            Certificate::NoFiniteOrbitCharacter { acting, .. } | Certificate::WitnessCharacter { acting, .. } => {
                Some(acting.as_slice())
            }
            _ => None,
        };
        self.require(&format!("{label}: acting matrices differ from the input"), acting == Some(duals));
        self.replay(label, v.replay());
    }

    fn bounded(&mut self, label: &str, v: &BoundedVerdict, action: &LaurentCyclicAction, direction: Option<&[i64]>) {
        self.require(&format!("{label}: presentation differs from the input"), &v.presentation == action.presentation());
        self.require(&format!("{label}: direction"), v.direction.as_deref() == direction);
        self.replay(label, v.replay());
    }
}

/// Replays every certificate against the echoed input. Returns the number
/// of certificates replayed and the failures.
pub fn verify(report: &Report) -> (usize, Vec<String>) {
    let mut c = Checker::default();
    let action = report.input.as_ref().map(|d| d.validate());
    let matrix = match &action {
        Some(Ok(CommutingAction::Matrix(a))) => Some(a),
        _ => None,
    };
    let laurent = match &action {
        Some(Ok(CommutingAction::Laurent(a))) => Some(a),
        _ => None,
    };
    let need_matrix = |c: &mut Checker| {
        if matrix.is_none() {
            c.failures.push("report needs a valid matrix action as input".into());
        }
        matrix
    };
    match &report.outcome {
        Outcome::MatrixAnalysis { generators, group_ergodic, group_distal, finite_orbit_subspace: fin, largest_ergodic } => {
            let Some(a) = need_matrix(&mut c) else { return (c.checked, c.failures) };
            let duals = a.duals();
            c.require("generator count", generators.len() == duals.len());
            for (g, d) in generators.iter().zip(duals) {
                c.require(&format!("generator {} index", g.index), duals.get(g.index - 1) == Some(d));
                c.verdict(&format!("generator {} ergodic", g.index), &g.ergodic, d);
                c.verdict(&format!("generator {} distal", g.index), &g.distal, d);
                c.require(
                    &format!("generator {} mixing flag", g.index),
                    g.mixing == (g.ergodic.kind == VerdictKind::Ergodic),
                );
            }
            c.group_verdict("group ergodic", group_ergodic, duals);
            match &group_distal.certificate {
                Certificate::Generatorwise { verdicts } => {
                    c.require("group distal arity", verdicts.len() == duals.len());
                    for (v, d) in verdicts.iter().zip(duals) {
                        c.require("group distal subject", v.subject() == Some(d));
                    }
                }
                _ => c.failures.push("group distal: unexpected certificate".into()),
            }
            c.replay("group distal", group_distal.replay());
            c.require("finite-orbit subspace", fin == &finite_orbit_subspace(a));
            c.require(
                "finite-orbit subspace vs group verdict",
                fin.is_zero() == (group_ergodic.kind == VerdictKind::Ergodic),
            );
            c.require("largest ergodic subgroup duals", largest_ergodic.duals == duals);
            c.replay("largest ergodic subgroup", largest_ergodic.replay());
        }
        Outcome::LaurentAnalysis { generators, group } => {
            let Some(a) = laurent else {
                c.failures.push("report needs a valid Laurent action as input".into());
                return (c.checked, c.failures);
            };
            c.require("generator count", generators.len() == a.nvars());
            for (i, v) in generators.iter().enumerate() {
                let n: Vec<i64> = (0..a.nvars()).map(|j| (i == j) as i64).collect();
                c.bounded(&format!("generator {}", i + 1), v, a, Some(&n));
            }
            c.bounded("group", group, a, None);
        }
        Outcome::ErgodicElement { element, spot_check: spot } => {
            let Some(a) = need_matrix(&mut c) else { return (c.checked, c.failures) };
            c.replay("ergodic element", element.replay(a));
            if let Some(spot) = spot {
                let again = MatrixAction::new(a.kind(), Some(a.dim()), vec![element.element.clone()])
                    .ok()
                    .and_then(|cyclic| spot_check(&cyclic, spot.norm_bound, spot.cap, SPOT_CHECK_SAMPLES).ok());
                c.require("spot check reproduces", again.as_ref() == Some(spot));
                c.require("spot check passed", spot.passed());
            }
        }
        Outcome::ErgodicDirection { result } => {
            let Some(a) = laurent else {
                c.failures.push("report needs a valid Laurent action as input".into());
                return (c.checked, c.failures);
            };
            c.bounded("direction", &result.verdict, a, Some(&result.direction));
            let bounded_ok = report.flags.allow_bounded == Some(true) && result.verdict.kind == BoundedKind::ErgodicUpTo;
            c.require("direction verdict kind", result.verdict.kind == BoundedKind::Ergodic || bounded_ok);
            let order = direction_scan_order(a.nvars(), report.flags.search_box.unwrap_or(0));
            c.require(
                "direction position in scan order",
                result.directions_tried >= 1 && order.get(result.directions_tried - 1) == Some(&result.direction),
            );
        }
        Outcome::NotErgodicGroup { witness } => {
            let Some(a) = need_matrix(&mut c) else { return (c.checked, c.failures) };
            c.require("witness kind", witness.kind == VerdictKind::NotErgodic);
            c.group_verdict("group witness", witness, a.duals());
        }
        Outcome::NotErgodicLaurentGroup { witness } => {
            let Some(a) = laurent else {
                c.failures.push("report needs a valid Laurent action as input".into());
                return (c.checked, c.failures);
            };
            c.require("witness kind", witness.kind == BoundedKind::NotErgodic);
            c.bounded("group witness", witness, a, None);
        }
        Outcome::Filtration { filtration, group_verdict, consistent } => {
            let Some(a) = need_matrix(&mut c) else { return (c.checked, c.failures) };
            c.require("filtration duals", filtration.duals == a.duals());
            c.replay("filtration", filtration.replay());
            c.group_verdict("group verdict", group_verdict, a.duals());
            let agrees = filtration.group_ergodic == (group_verdict.kind == VerdictKind::Ergodic);
            c.require("residual zero iff group ergodic", agrees && *consistent);
        }
        Outcome::OracleCheck { cross_validation } => {
            let Some(a) = need_matrix(&mut c) else { return (c.checked, c.failures) };
            let again = cross_validate(a, cross_validation.norm_bound, cross_validation.cap).ok();
            c.require("oracle check reproduces", again.as_ref() == Some(cross_validation));
        }
        Outcome::DemoE2 { demo, verified } => {
            c.checked += 1;
            c.require("demo identities and chain", demo.verify() && *verified);
            let again = ProductDemoSpec::new(demo.box_radius).map(demo_e2).ok();
            c.require("demo reproduces", again.as_ref() == Some(demo));
        }
        Outcome::SearchExhausted { .. }
        | Outcome::ValidationFailed { .. }
        | Outcome::SchemaError { .. }
        | Outcome::IoError { .. }
        | Outcome::Unsupported { .. }
        | Outcome::Verification { .. } => {}
    }
    (c.checked, c.failures)
}
