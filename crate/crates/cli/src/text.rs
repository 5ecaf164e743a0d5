use std::fmt::Write;

use ergodic_core::laurent_engine::BoundedVerdict;
use ergodic_core::toral::{Certificate, Verdict, VerdictKind};

use crate::report::{Outcome, Report};

fn kind(v: &Verdict) -> &'static str {
    match v.kind {
        VerdictKind::Ergodic => "ergodic",
        VerdictKind::NotErgodic => "not ergodic",
        VerdictKind::Distal => "distal",
        VerdictKind::NotDistal => "not distal",
    }
}

fn bounded(v: &BoundedVerdict) -> String {
    let mut s = serde_json::to_value(v.kind).ok().and_then(|x| x.as_str().map(|s| s.replace('_', " "))).unwrap_or_default();
    if let Some(w) = &v.witness {
        let _ = write!(s, " (finite orbit, K = {}, n = {:?})", w.k, w.direction);
    }
    if v.kind.ne(&ergodic_core::laurent_engine::BoundedKind::Ergodic) && v.witness.is_none() {
        let _ = write!(s, " (K ≤ {})", v.k_max);
    }
    s
}

fn witness(v: &Verdict) -> String {
    match &v.certificate {
        Certificate::WitnessCharacter { character, orbit, .. } => {
            let c: Vec<String> = character.iter().map(ToString::to_string).collect();
            format!(" witness ({}) with orbit of size {}", c.join(", "), orbit.len())
        }
        _ => String::new(),
    }
}

pub fn render(report: &Report) -> String {
    let mut out = String::new();
    let o = &mut out;
    let _ = writeln!(o, "{}", report.command);
    match &report.outcome {
        Outcome::MatrixAnalysis { generators, group_ergodic, group_distal, finite_orbit_subspace, largest_ergodic } => {
            for g in generators {
                let mixing = if g.mixing { ", mixing of all orders" } else { "" };
                let _ = writeln!(o, "  generator {}: {}, {}{}", g.index, kind(&g.ergodic), kind(&g.distal), mixing);
            }
            let _ = writeln!(o, "  group: {}{}, {}", kind(group_ergodic), witness(group_ergodic), kind(group_distal));
            let _ = writeln!(o, "  finite-orbit subspace: dim {}", finite_orbit_subspace.dim());
            let _ = writeln!(
                o,
                "  largest ergodic subgroup: annihilator dim {} (rounds {:?})",
                largest_ergodic.subspace.dim(),
                largest_ergodic.rounds
            );
        }
        Outcome::LaurentAnalysis { generators, group } => {
            for (i, v) in generators.iter().enumerate() {
                let _ = writeln!(o, "  generator {}: {}", i + 1, bounded(v));
            }
            let _ = writeln!(o, "  group: {}", bounded(group));
        }
        Outcome::ErgodicElement { element, spot_check } => {
            let _ = writeln!(o, "  exponents {:?}: {}", element.exponents, kind(&element.verdict));
            let _ = writeln!(o, "  determinant route nonzero: {}", element.det_route_nonzero);
            let _ = writeln!(o, "  candidates tried: {}", element.candidates_tried);
            if let Some(c) = spot_check {
                let _ = writeln!(o, "  spot check: {} characters, {} failures", c.characters_checked, c.failures.len());
            }
        }
        Outcome::ErgodicDirection { result } => {
            let _ = writeln!(o, "  direction {:?}: {}", result.direction, bounded(&result.verdict));
            let _ = writeln!(o, "  directions tried: {}", result.directions_tried);
        }
        Outcome::NotErgodicGroup { witness: w } => {
            let _ = writeln!(o, "  group not ergodic;{}", witness(w));
        }
        Outcome::NotErgodicLaurentGroup { witness: w } => {
            let _ = writeln!(o, "  group not ergodic: {}", bounded(w));
        }
        Outcome::SearchExhausted { bound } => {
            let _ = writeln!(o, "  search exhausted at bound {bound}");
        }
        Outcome::Filtration { filtration, group_verdict, consistent } => {
            let dims: Vec<String> = filtration.chain.iter().map(|w| w.dim().to_string()).collect();
            let _ = writeln!(o, "  chain dims: {}", dims.join(" ⊇ "));
            for s in &filtration.stages {
                let _ = writeln!(
                    o,
                    "  stage {}: {} -> {}, section {}, {} on W_{}",
                    s.generator,
                    s.dim_before,
                    s.dim_after,
                    kind(&s.section),
                    kind(&s.restricted),
                    s.generator
                );
            }
            let _ = writeln!(o, "  residual dim {}, group {}", filtration.residual.dim(), kind(group_verdict));
            let _ = writeln!(o, "  consistent: {consistent}");
        }
        Outcome::OracleCheck { cross_validation: c } => {
            let _ = writeln!(o, "  characters checked: {}", c.characters_checked);
            let _ = writeln!(o, "  inside finite-orbit subspace: {}", c.inside_finite_orbit_subspace);
            let _ = writeln!(o, "  finite orbits: {}, exceeded cap: {}", c.finite_orbits, c.exceeded_cap);
            let _ = writeln!(o, "  failures: {}", c.failures.len());
        }
        Outcome::DemoE2 { demo, verified } => {
            let _ = writeln!(o, "  box radius {}: {} identities j·i − i·j = 0", demo.box_radius, demo.identities.len());
            let counts: Vec<String> = demo.chain.iter().map(|l| l.factors.to_string()).collect();
            let _ = writeln!(o, "  chain factor counts: {}", counts.join(" > "));
            let _ = writeln!(o, "  verified: {verified}");
        }
        Outcome::ValidationFailed { errors } => {
            for e in errors {
                let _ = writeln!(o, "  error: {e}");
            }
        }
        Outcome::SchemaError { line, column, message } => {
            let _ = writeln!(o, "  schema error at {line}:{column}: {message}");
        }
        Outcome::IoError { message } | Outcome::Unsupported { message } => {
            let _ = writeln!(o, "  error: {message}");
        }
        Outcome::Verification { report_command, certificates_checked, failures } => {
            let _ = writeln!(o, "  {report_command}: {certificates_checked} certificates replayed");
            for f in failures {
                let _ = writeln!(o, "  failure: {f}");
            }
        }
    }
    if let Some(ms) = report.wall_time_ms {
        let _ = writeln!(o, "  wall time: {ms} ms");
    }
    out
}
