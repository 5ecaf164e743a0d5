//! Acceptance criteria, exact and at zero tolerance. Each criterion prints
//! one PASS or FAIL line with its wall time; the run exits nonzero if any
//! fails. Runs without the test harness so the lines are never captured.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use ergodic_core::action::{LaurentCyclicAction, MatrixAction, ProductDemoSpec};
use ergodic_core::exact::{laurent_divides, LaurentPoly, RatMatrix};
use ergodic_core::laurent_engine::{
    alpha_is_ergodic, default_k_max, find_ergodic_direction, group_is_ergodic, BoundedKind,
};
use ergodic_core::oracle::{cross_validate, demo_e2, spot_check};
use ergodic_core::toral::{
    det_route_nonzero, distal_verdict, ergodic_distal_filtration, ergodic_verdict, exponent_bound,
    finite_orbit_subspace, find_ergodic_exponents, is_distal_element, is_distal_group, is_ergodic_element,
    is_ergodic_group, VerdictKind,
};

type Check = Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn toral(gens: Vec<RatMatrix>) -> MatrixAction {
    MatrixAction::toral(gens).expect("valid toral action")
}

fn one(rows: &[&[i64]]) -> MatrixAction {
    toral(vec![RatMatrix::from_i64(rows)])
}

fn kind(v: &ergodic_core::toral::Verdict) -> VerdictKind {
    v.kind
}

/// Quasi-unipotent via `(N^M − L^M I)^r = 0` for `B = N / L`.
fn quasi_unipotent(b: &RatMatrix) -> bool {
    let n = b.rows();
    let m = exponent_bound(n);
    let (l, num) = b.clear_denominators();
    let shifted = &num.pow(m) - &ergodic_core::exact::IntMatrix::scalar(n, l.pow(m as u32));
    shifted.pow(n as u64).is_zero()
}

fn c1_single_elements() -> Check {
    let fib = one(&[&[0, 1], &[1, 1]]);
    ensure(kind(&is_ergodic_element(&fib, &[1]).unwrap()) == VerdictKind::Ergodic, || "Fibonacci".into())?;
    for (name, a) in [("shear", one(&[&[1, 1], &[0, 1]])), ("rotation", one(&[&[0, -1], &[1, 0]]))] {
        let e = is_ergodic_element(&a, &[1]).unwrap();
        let d = is_distal_element(&a, &[1]).unwrap();
        ensure(e.kind == VerdictKind::NotErgodic && d.kind == VerdictKind::Distal, || format!("{name}: {:?} {:?}", e.kind, d.kind))?;
        e.replay().map_err(|err| format!("{name}: {err}"))?;
        d.replay().map_err(|err| format!("{name}: {err}"))?;
    }
    Ok(())
}

fn block_pair() -> MatrixAction {
    toral(vec![
        RatMatrix::from_i64(&[&[0, 1, 0, 0], &[1, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]),
        RatMatrix::from_i64(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 0, 1], &[0, 0, 1, 1]]),
    ])
}

fn c2_positive_exponents() -> Check {
    let a = block_pair();
    for unit in [[1, 0], [0, 1]] {
        let v = is_ergodic_element(&a, &unit).unwrap();
        ensure(v.kind == VerdictKind::NotErgodic, || format!("generator {unit:?} is ergodic"))?;
    }
    ensure(is_ergodic_group(&a).kind == VerdictKind::Ergodic, || "group verdict".into())?;
    let found = find_ergodic_exponents(&a, None).map_err(|e| e.to_string())?;
    ensure(found.exponents.iter().all(|&e| e > 0), || format!("{:?}", found.exponents))?;
    let signed: Vec<i64> = found.exponents.iter().map(|&e| e as i64).collect();
    let dual = a.dual_element(&signed).unwrap();
    ensure(ergodic_verdict(&dual).kind == VerdictKind::Ergodic, || "gcd route".into())?;
    ensure(det_route_nonzero(&dual), || "determinant route".into())?;
    found.replay(&a).map_err(|e| e.to_string())?;
    let cyclic = toral(vec![found.element.clone()]);
    let spot = spot_check(&cyclic, 3, 100_000, 8).map_err(|e| e.to_string())?;
    ensure(spot.passed() && spot.finite_orbits == 0, || format!("{:?}", spot.failures))
}

fn fuzz_families(n: usize) -> Vec<common::Family> {
    let mut rng = common::rng(0xacce);
    (0..n).map(|_| common::random_family(&mut rng, 6, 3)).collect()
}

fn c3_two_routes(families: &[common::Family]) -> Check {
    let mut rng = common::rng(0x2047);
    for (f, fam) in families.iter().enumerate() {
        let a = toral(fam.generators.clone());
        let p = common::to_rat(&common::random_unimodular(&mut rng, fam.r));
        let conj = a.conjugate(&p).ok_or("conjugate failed")?;
        for _ in 0..4 {
            let n = common::random_exponents(&mut rng, fam.num_generators(), 3);
            let b = a.dual_element(&n).unwrap();
            let gcd = ergodic_verdict(&b).kind == VerdictKind::Ergodic;
            ensure(gcd == det_route_nonzero(&b), || format!("family {f} n={n:?}: routes disagree"))?;
            ensure(gcd == fam.element_ergodic(&n), || format!("family {f} n={n:?}: ground truth"))?;
            let primal = a.element(&n).unwrap();
            ensure(ergodic_verdict(&primal).kind == ergodic_verdict(&b).kind, || format!("family {f}: primal/dual ergodic"))?;
            ensure(distal_verdict(&primal).kind == distal_verdict(&b).kind, || format!("family {f}: primal/dual distal"))?;
            let cb = conj.dual_element(&n).unwrap();
            ensure(ergodic_verdict(&cb).kind == ergodic_verdict(&b).kind, || format!("family {f}: conjugation"))?;
            ensure(distal_verdict(&cb).kind == distal_verdict(&b).kind, || format!("family {f}: conjugation distal"))?;
        }
    }
    Ok(())
}

fn c4_ergodic_times_distal() -> Check {
    let mut rng = common::rng(0xb12);
    for k in 0..50 {
        let (alpha, beta) = common::random_ergodic_distal_pair(&mut rng);
        let a = toral(vec![alpha, beta]);
        ensure(is_ergodic_element(&a, &[1, 0]).unwrap().kind == VerdictKind::Ergodic, || format!("pair {k}: α"))?;
        ensure(is_distal_element(&a, &[0, 1]).unwrap().kind == VerdictKind::Distal, || format!("pair {k}: β"))?;
        for i in (-5i64..=5).filter(|&i| i != 0) {
            for j in -5i64..=5 {
                let v = is_ergodic_element(&a, &[i, j]).unwrap();
                ensure(v.kind == VerdictKind::Ergodic, || format!("pair {k}: i={i} j={j}"))?;
            }
        }
    }
    Ok(())
}

fn c5_filtration(families: &[common::Family]) -> Check {
    for (f, fam) in families.iter().enumerate() {
        let a = toral(fam.generators.clone());
        let filt = ergodic_distal_filtration(&a);
        filt.replay().map_err(|e| format!("family {f}: {e}"))?;
        let group = is_ergodic_group(&a).kind == VerdictKind::Ergodic;
        ensure(filt.residual.is_zero() == group, || format!("family {f}: residual vs group verdict"))?;
        ensure(group == fam.group_ergodic(), || format!("family {f}: group ground truth"))?;
        for d in a.duals() {
            ensure(quasi_unipotent(&filt.residual.restrict(d)), || format!("family {f}: residual not quasi-unipotent"))?;
        }
    }
    Ok(())
}

fn c6_kolchin() -> Check {
    let mut rng = common::rng(0xc1);
    for k in 0..100 {
        let a = toral(common::random_unipotent_family(&mut rng, 6, 3));
        ensure(is_distal_group(&a).kind == VerdictKind::Distal, || format!("family {k}: not distal"))?;
        ensure(!finite_orbit_subspace(&a).is_zero(), || format!("family {k}: no finite orbit"))?;
    }
    Ok(())
}

fn c7_oracle() -> Check {
    let mut rng = common::rng(0x07ac);
    for k in 0..20 {
        let fam = common::random_family(&mut rng, if k % 5 == 4 { 3 } else { 2 }, 2);
        let a = toral(fam.generators.clone());
        let report = cross_validate(&a, 3, 100_000).map_err(|e| e.to_string())?;
        ensure(report.passed(), || format!("action {k}: {:?}", report.failures))?;
    }
    Ok(())
}

fn laurent(p: u64, d: usize, terms: &[(&[i64], i64)]) -> LaurentCyclicAction {
    let g = LaurentPoly::from_terms(p, d, terms.iter().map(|(e, c)| (e.to_vec(), *c))).unwrap();
    LaurentCyclicAction::new(g).unwrap()
}

fn c8_laurent() -> Check {
    let a = laurent(2, 1, &[(&[2], 1), (&[1], 1), (&[0], 1)]);
    let v = alpha_is_ergodic(&a, &[1], default_k_max(&a)).map_err(|e| e.to_string())?;
    ensure(v.kind == BoundedKind::NotErgodic, || format!("d=1: {:?}", v.kind))?;
    let w = v.witness.as_ref().ok_or("d=1: no witness")?;
    ensure(w.k == 3, || format!("d=1: K={}", w.k))?;
    let h = LaurentPoly::u_pow_minus_one(2, &[1], 3);
    let fixed = h.mul(&w.m);
    ensure(laurent_divides(a.presentation(), &fixed).unwrap().as_ref() == Some(&w.quotient), || "d=1: division".into())?;
    ensure(laurent_divides(a.presentation(), &w.m).unwrap().is_none(), || "d=1: m in (g)".into())?;
    v.replay().map_err(|e| e.to_string())?;

    let led = laurent(2, 2, &[(&[0, 0], 1), (&[1, 0], 1), (&[0, 1], 1)]);
    let k = default_k_max(&led);
    for n in [[1, 0], [0, 1]] {
        let v = alpha_is_ergodic(&led, &n, k).map_err(|e| e.to_string())?;
        ensure(v.kind == BoundedKind::Ergodic, || format!("Ledrappier {n:?}: {:?}", v.kind))?;
        v.replay().map_err(|e| e.to_string())?;
    }
    let g = group_is_ergodic(&led, k).map_err(|e| e.to_string())?;
    ensure(g.kind == BoundedKind::Ergodic, || "Ledrappier group".into())?;
    let dir = find_ergodic_direction(&led, 4, k, false).map_err(|e| e.to_string())?;
    ensure(dir.direction == vec![1, 0], || format!("direction {:?}", dir.direction))
}

fn c9_demo() -> Check {
    let demo = demo_e2(ProductDemoSpec::new(4).unwrap());
    ensure(demo.identities.len() == 80, || format!("{} identities", demo.identities.len()))?;
    for f in &demo.identities {
        ensure(f.exponent == 0 && f.group_witness_exponent != 0, || format!("({}, {})", f.i, f.j))?;
    }
    ensure(demo.chain.len() == 4, || format!("chain length {}", demo.chain.len()))?;
    ensure(demo.chain.windows(2).all(|w| w[0].factors > w[1].factors), || "chain not strictly descending".into())?;
    ensure(demo.verify(), || "demo certificates".into())
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

fn golden_commands() -> Vec<Vec<String>> {
    let all = [
        "fibonacci", "identity", "rotation", "unipotent", "block_pair", "mixed", "solenoid", "ledrappier",
        "laurent_d1", "laurent_reducible", "noncommuting",
    ];
    let matrix = ["fibonacci", "identity", "rotation", "unipotent", "block_pair", "mixed", "solenoid"];
    let mut cmds = Vec::new();
    for name in all {
        cmds.push(vec!["analyze".into(), data(&format!("{name}.json"))]);
        cmds.push(vec!["find-ergodic".into(), data(&format!("{name}.json"))]);
    }
    for name in matrix {
        cmds.push(vec!["filtration".into(), data(&format!("{name}.json"))]);
    }
    cmds.push(vec!["find-ergodic".into(), "--spot-check".into(), data("block_pair.json")]);
    cmds.push(vec!["oracle-check".into(), data("fibonacci.json")]);
    cmds.push(vec!["oracle-check".into(), data("unipotent.json"), "--norm-bound".into(), "2".into()]);
    cmds.push(vec!["demo-e2".into(), "--box".into(), "4".into()]);
    cmds
}

fn c10_determinism() -> Check {
    let bin = env!("CARGO_BIN_EXE_ergodic");
    for args in golden_commands() {
        let first = Command::new(bin).args(&args).output().map_err(|e| e.to_string())?;
        let second = Command::new(bin).args(&args).output().map_err(|e| e.to_string())?;
        ensure(first.stdout == second.stdout && first.status == second.status, || format!("{args:?} differs"))?;
        let verified = Command::new(bin).arg("--verify-report").args(&args).output().map_err(|e| e.to_string())?;
        ensure(verified.stdout == first.stdout, || format!("{args:?}: --verify-report changed the report"))?;
        let stderr = String::from_utf8_lossy(&verified.stderr);
        ensure(stderr.contains(" 0 failures"), || format!("{args:?}: {stderr}"))?;
        ensure(verified.status.code() != Some(4), || format!("{args:?}: replay exit"))?;
    }
    Ok(())
}

fn criterion(n: u32, name: &str, limit: Option<Duration>, check: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let result = check();
    let took = start.elapsed();
    let result = match (result, limit) {
        (Ok(()), Some(l)) if took > l => Err(format!("took {took:.2?}, limit {l:?}")),
        (r, _) => r,
    };
    match &result {
        Ok(()) => println!("criterion {n:>2} PASS {name} ({took:.2?})"),
        Err(e) => println!("criterion {n:>2} FAIL {name} ({took:.2?}): {e}"),
    }
    result.is_ok()
}

fn main() -> std::process::ExitCode {
    let secs = |s| Some(Duration::from_secs(s));
    let mut passed = Vec::new();
    passed.push(criterion(1, "single-element verdicts", secs(1), c1_single_elements));
    passed.push(criterion(2, "positive ergodic exponents for the block pair", secs(5), c2_positive_exponents));
    let start = Instant::now();
    let families = fuzz_families(200);
    let built = start.elapsed();
    passed.push(criterion(3, "two-route equivalence on 200 families", Some(Duration::from_secs(60) - built), || {
        c3_two_routes(&families)
    }));
    passed.push(criterion(4, "ergodic times distal on 50 pairs", secs(30), c4_ergodic_times_distal));
    passed.push(criterion(5, "filtration soundness on the fuzzed families", secs(30), || c5_filtration(&families)));
    passed.push(criterion(6, "commuting unipotents on 100 families", secs(30), c6_kolchin));
    passed.push(criterion(7, "oracle cross-validation on 20 actions", secs(120), c7_oracle));
    passed.push(criterion(8, "Laurent engine", secs(5), c8_laurent));
    passed.push(criterion(9, "product demo with box 4", secs(1), c9_demo));
    passed.push(criterion(10, "report determinism and replay", None, c10_determinism));
    let failed: Vec<usize> = passed.iter().enumerate().filter(|(_, ok)| !**ok).map(|(i, _)| i + 1).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", passed.len());
        std::process::ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::ExitCode::FAILURE
    }
}
