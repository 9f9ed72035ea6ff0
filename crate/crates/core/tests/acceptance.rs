//! Acceptance gate: one PASS/FAIL line per criterion, exit status 1 on any
//! failure.

use std::f64::consts::FRAC_PI_4;
use std::process::ExitCode;
use std::time::Instant;

use normcoh::axioms::{
    check_b3, check_c3, f_n_theta, falsify_with, necessity_sweep, usi_catalog_c3_test, FalsifyConfig, SWEEP_MAX_N,
    VIOLATION_TOL,
};
use normcoh::catalog::{all_norms, catalog_state, catalog_states, j_state, usi_catalog};
use normcoh::channels::necessity_family;
use normcoh::measures::{c_nu_min_diag, c_nu_symmetric};
use normcoh::oracles::{brute_force_min_diag, run_extreme_point_suite, run_oracle_suite, OracleSuiteConfig};
use normcoh::{ComplexMatrix, MeasureSpec, NormSpec, PExponent, Result, SolverConfig};

type Outcome = Result<(bool, String)>;

fn ac1() -> Outcome {
    let cfg = SolverConfig::default();
    let norm = NormSpec::trace_norm();
    let j2 = c_nu_min_diag(&j_state(2), &norm, &cfg)?;
    let j3 = c_nu_min_diag(&catalog_state("J3/3+[0]").expect("catalog").state, &norm, &cfg)?;
    let target = [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0];
    let min_err = j3.minimizer.iter().zip(target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let (e2, e3) = ((j2.value - 1.0).abs(), (j3.value - 4.0 / 3.0).abs());
    Ok((
        e2 <= 1e-6 && e3 <= 1e-6 && min_err <= 1e-4,
        format!("C(J2/2) err {e2:.2e}, C(J3/3+[0]) err {e3:.2e}, minimizer err {min_err:.2e}"),
    ))
}

fn ac2() -> Outcome {
    let measure = MeasureSpec::trace_norm();
    let rho2 = catalog_state("J3/3+[0]").expect("catalog").state;
    let r = check_c3(&measure, &j_state(2), &rho2, 0.5, VIOLATION_TOL)?;
    let joint = normcoh::DensityState::weighted_direct_sum(&[(0.5, &j_state(2)), (0.5, &rho2)])?;
    let sigma = ComplexMatrix::from_diag(&[0.5, 0.5, 0.0, 0.0, 0.0, 0.0]);
    let upper = NormSpec::trace_norm().eval(&joint.hermitian().as_matrix().sub(&sigma)?)?;
    Ok((
        r.is_violated() && r.gap >= 1.0 / 6.0 - 1e-6 && (upper - 1.0).abs() < 1e-12,
        format!("C3 gap {:.9} (need >= 1/6), explicit upper bound {upper:.12}", r.gap),
    ))
}

fn ac3() -> Outcome {
    let cfg = SolverConfig::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for norm in usi_catalog() {
        let reports = usi_catalog_c3_test(&norm, &cfg)?;
        let worst = reports.iter().map(|r| r.gap).fold(0.0, f64::max);
        let hits = reports.iter().filter(|r| r.is_violated()).count();
        ok &= hits >= 1;
        parts.push(format!("{} {hits}/{} max {worst:.4}", norm.label(), reports.len()));
    }
    Ok((ok, parts.join("; ")))
}

fn ac4() -> Outcome {
    let measure = MeasureSpec::c_qp(2.0, 2.0)?;
    let r = check_c3(&measure, &j_state(2), &j_state(2), 0.5, VIOLATION_TOL)?;
    let want = 2f64.sqrt() / 2.0 - 0.5;
    let err = (r.gap - want).abs();
    Ok((
        r.is_violated() && err <= 1e-9,
        format!("q=2 C3 gap {:.10} vs {want:.10}, err {err:.2e}", r.gap),
    ))
}

fn ac5() -> Outcome {
    let measure = MeasureSpec::c_qp(1.0, f64::INFINITY)?;
    let r = check_b3(&measure, &j_state(4), &necessity_family(3, FRAC_PI_4), VIOLATION_TOL)?;
    let c = FRAC_PI_4.cos();
    let want = (3.0 * c - 1.0) * (1.0 - c) / 4.0;
    let err_inf = (r.gap - want).abs();
    let closed = f_n_theta(3, FRAC_PI_4, PExponent::INFINITY)? / 4.0;
    let hit = necessity_sweep(PExponent::new(3.0)?, SWEEP_MAX_N, VIOLATION_TOL)?;
    let (ok3, msg3) = match hit {
        Some(h) => {
            let d = (h.scaled_gap - h.f).abs();
            (
                h.report.is_violated() && d <= 1e-9,
                format!("p=3 hit n={} cos={} f={:.6} diff {d:.2e}", h.n, h.cos_theta, h.f),
            )
        }
        None => (false, "p=3 sweep found nothing".to_string()),
    };
    Ok((
        r.is_violated() && err_inf <= 1e-9 && (closed - want).abs() <= 1e-12 && ok3,
        format!("l_{{1,inf}} gap {:.10} err {err_inf:.2e}; {msg3}", r.gap),
    ))
}

fn ac6() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, p) in [1.0, 1.25, 1.5, 1.75, 2.0].into_iter().enumerate() {
        let cfg = FalsifyConfig {
            trials: 1000,
            seed: 6000 + i as u64,
            ..FalsifyConfig::default()
        };
        let v = falsify_with(&MeasureSpec::c_qp(1.0, p)?, &cfg)?;
        ok &= v.is_empty();
        parts.push(format!("p={p}: {} violations", v.len()));
    }
    Ok((ok, parts.join(", ")))
}

fn ac7() -> Outcome {
    let s = run_oracle_suite(&OracleSuiteConfig::default())?;
    let worst = s.lines.iter().map(|l| l.worst_margin).fold(f64::NEG_INFINITY, f64::max);
    let failed: Vec<String> = s
        .lines
        .iter()
        .filter(|l| !l.pass)
        .map(|l| format!("{}@p={}", l.check, l.p))
        .collect();
    Ok((
        s.pass,
        format!(
            "{} checks x 10^4 instances, worst margin {worst:.2e}, failing: [{}]",
            s.lines.len(),
            failed.join(", ")
        ),
    ))
}

fn resolution_for(dim: usize) -> usize {
    match dim {
        1 | 2 => 2001,
        3 => 301,
        _ => 121,
    }
}

fn ac8() -> Outcome {
    let cfg = SolverConfig::default();
    let solver_tol = 1e-6;
    let mut ok = true;
    let mut pairs = 0;
    let mut worst_slack = f64::NEG_INFINITY;
    for s in catalog_states().into_iter().filter(|s| s.dim() <= 4) {
        for norm in all_norms() {
            let solved = c_nu_min_diag(&s.state, &norm, &cfg)?;
            let brute = brute_force_min_diag(&s.state, &norm, resolution_for(s.dim()))?;
            let slack = (solved.value - brute.value).abs() - (brute.error_bound + solver_tol);
            worst_slack = worst_slack.max(slack);
            if slack > 0.0 {
                ok = false;
                eprintln!("AC8 mismatch {} {}: solver {} brute {}", s.label, norm.label(), solved.value, brute.value);
            }
            pairs += 1;
        }
    }
    let mut sym_pairs = 0;
    let mut sym_worst = 0.0f64;
    for s in catalog_states().into_iter().filter(|s| s.is_circulant_symmetric()) {
        for norm in all_norms() {
            let full = c_nu_min_diag(&s.state, &norm, &cfg)?;
            let sym = c_nu_symmetric(&s.weighted_blocks(), &norm, &cfg)?;
            let d = (full.value - sym.value).abs();
            sym_worst = sym_worst.max(d);
            if d > 1e-6 {
                ok = false;
                eprintln!("AC8 symmetric mismatch {} {}: {} vs {}", s.label, norm.label(), full.value, sym.value);
            }
            sym_pairs += 1;
        }
    }
    Ok((
        ok,
        format!(
            "{pairs} oracle pairs, worst slack {worst_slack:.2e}; {sym_pairs} symmetric pairs, worst diff {sym_worst:.2e}"
        ),
    ))
}

fn ac9() -> Outcome {
    let s = run_extreme_point_suite(100, 9)?;
    Ok((
        s.pass,
        format!(
            "{} matrices, worst average err {:.2e}, worst unit-norm err {:.2e}, min separation/bound {:.3}",
            s.matrices, s.worst_average_error, s.worst_unit_error, s.min_separation_ratio
        ),
    ))
}

type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("AC1", "trace-norm values and minimizer", ac1),
        ("AC2", "trace-norm C3 contradiction", ac2),
        ("AC3", "USI catalog C3 violations", ac3),
        ("AC4", "q=2 C3 gap", ac4),
        ("AC5", "p<=2 necessity", ac5),
        ("AC6", "C_{1,p} sufficiency falsifier", ac6),
        ("AC7", "lemma oracles", ac7),
        ("AC8", "solver vs oracle, symmetric reduction", ac8),
        ("AC9", "extreme-point witnesses", ac9),
    ];
    let mut all = true;
    for (id, name, run) in criteria {
        let start = Instant::now();
        let (pass, detail) = match run() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        all &= pass;
        println!(
            "{id} {} {name}: {detail} ({:.1}s)",
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
