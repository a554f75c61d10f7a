//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the quantities it pinned. Run with `cargo test -p blspec-cli --test
//! acceptance -- --nocapture` to see the lines.

use blspec::bounds::{
    lemma_key_audit, theorem1_bound, tool1_bound, tool2_bound, tool3_bound, soundness_scan,
    Theorem1Tail, Tool2Params,
};
use blspec::exact::{from_f64, ri, rq, to_f64, Rat};
use blspec::kernels::{concentration_cutoff, tail_term, PairDistribution};
use blspec::spectrum::sharpness_point;
use blspec::spherical::{distance_walk, kernel_matches_v2, moment_agreement_check};
use blspec::stein::{bound_audit, eval_v1, eval_v2, SolutionVersion};
use blspec::sweep::{self, even_range};
use std::collections::HashMap;
use std::process::Command;

fn pass(criterion: u32, name: &str, detail: String) {
    println!("criterion {criterion:2} ({name}): PASS — {detail}");
}

#[test]
fn criterion_01_exact_identity_suite() {
    let reports = sweep::identity_sweep(&even_range(2, 200)).unwrap();
    let mut checked = 0;
    for rep in &reports {
        assert!(rep.ok(), "{}: {:?}", rep.scope, rep.failures);
        checked += rep.checked;
    }
    pass(
        1,
        "exact identities",
        format!("{checked} exact checks over {} sizes, zero tolerance", reports.len()),
    );
}

#[test]
fn criterion_02_kolmogorov_rate() {
    let ns = [4u64, 16, 64, 256, 1024];
    let reports = sweep::kolmogorov_sweep(&ns).unwrap();
    println!("n,distance,scaled");
    for r in &reports {
        println!("{},{:.12},{:.12}", r.n, r.distance, r.scaled);
        assert!(r.scaled <= 1.0, "n={}: scaled {}", r.n, r.scaled);
    }
    // stabilization across the upper half of the sweep
    let upper: Vec<f64> = reports[2..].iter().map(|r| r.scaled).collect();
    for pair in upper.windows(2) {
        let rel = (pair[1] - pair[0]).abs() / pair[0];
        assert!(rel < 0.25, "consecutive scaled distances differ by {rel}");
    }
    pass(
        2,
        "kolmogorov rate",
        format!(
            "distance*sqrt(n) <= 1 for all sizes; upper-half drift {:.3}%",
            100.0 * (upper[2] - upper[0]).abs() / upper[0]
        ),
    );
}

#[test]
fn criterion_03_sharpness() {
    let limit = 2.0 * (-2.0f64).exp();
    for n in [16u64, 36, 64, 100, 144, 196, 256] {
        let p = sharpness_point(n).unwrap();
        let err = (p.scaled - limit).abs();
        assert!(
            err <= 1.0 / (n as f64).sqrt(),
            "n={n}: |{} - {limit}| = {err}",
            p.scaled
        );
        if n == 16 {
            let expect = (1820.0 / 12870.0 - (-2.5f64).exp()).abs();
            assert!((p.delta - expect).abs() < 1e-12);
            assert!((p.delta - 0.0593291).abs() <= 1e-6);
        }
    }
    pass(
        3,
        "sharpness",
        format!("scaled discrepancy within 1/sqrt(n) of {limit:.7} at seven sizes"),
    );
}

#[test]
fn criterion_04_bound_soundness() {
    let grid: Vec<f64> = (1..=50).map(|j| j as f64 / 10.0).collect();
    let mut evaluated = 0;
    for n in [16u64, 64, 256] {
        let report = soundness_scan(n, &grid).unwrap();
        assert!(report.all_sound, "n={n}");
        assert_eq!(report.rows[0].entries.len(), 5, "five modes at n={n}");
        evaluated += report.rows.iter().map(|r| r.entries.len()).sum::<usize>();
        assert!(report.min_ratio >= 1.0);
    }
    pass(
        4,
        "bound soundness",
        format!("{evaluated} bound evaluations, zero violations"),
    );
}

#[test]
fn criterion_05_tail_domination_and_smoothing_lemma() {
    let grid: Vec<f64> = (1..=50).map(|j| j as f64 / 10.0).collect();
    let mut checks = 0;
    for n in [16u64, 64, 256] {
        let ni = n as i128;
        let p1 = PairDistribution::v1(n).unwrap();
        let p2 = PairDistribution::v2(n).unwrap();
        let c = concentration_cutoff(n);
        let params = Tool2Params::stock(n).unwrap();
        let lambda2 = rq(4, ni);
        let kappa = ri(2);
        let tool1 = tool1_bound(&p1, &c).unwrap();
        for &t in &grid {
            let t_rat = from_f64(t).unwrap();
            let tail1 = tail_term(&p1, &t_rat);
            assert!(tool1 >= tail1, "tool1 at n={n}, t={t}");
            let t2 = tool2_bound(&p1, t, &params).unwrap();
            assert!(t2.total >= to_f64(&tail1), "tool2 at n={n}, t={t}");
            let tail2 = tail_term(&p2, &t_rat);
            let t3 = tool3_bound(&p2, t, &kappa, &lambda2).unwrap();
            assert!(t3.total >= to_f64(&tail2), "tool3 at n={n}, t={t}");
            checks += 3;
        }
        // 5 x 5 x 5 grid of (a, b, K); degenerate a > b combinations skipped
        let w0 = p1.measure().w(0).clone();
        for ai in 0..5i128 {
            for bi in ai..5i128 {
                for ki in 1..=5i128 {
                    let a = &w0 * rq(ai, 4);
                    let b = &w0 * rq(bi, 4);
                    let cap = rq(ki, 2);
                    for p in [&p1, &p2] {
                        let audit = lemma_key_audit(p, &a, &b, &cap).unwrap();
                        assert!(audit.holds, "lemma at n={n}, a={ai}/4, b={bi}/4, K={ki}/2");
                        checks += 1;
                    }
                }
            }
        }
    }
    pass(
        5,
        "tail domination",
        format!("{checks} dominance and smoothing-lemma checks, zero violations"),
    );
}

#[test]
fn criterion_06_stein_solution_audit() {
    let mut worst_residual = 0.0f64;
    for &t in &[0.1, 0.5, 1.0, 2.0, 5.0] {
        for version in [SolutionVersion::V1, SolutionVersion::V2] {
            let audit = bound_audit(version, t, 10_000).unwrap();
            assert!(
                audit.max_abs_residual <= 1e-12,
                "{version} t={t}: residual {}",
                audit.max_abs_residual
            );
            assert!(audit.ok(), "{version} t={t}: {:?}", audit.describe_failures());
            worst_residual = worst_residual.max(audit.max_abs_residual);
        }
        // one-sided derivatives against one-sided differences from the left
        let left_diff = |g: &dyn Fn(f64) -> f64, x: f64, h: f64| {
            (3.0 * g(x) - 4.0 * g(x - h) + g(x - 2.0 * h)) / (2.0 * h)
        };
        let h = 1e-5 * t.max(0.1);
        let f1 = |x: f64| eval_v1(t, x).unwrap().f;
        assert!((left_diff(&f1, t, h) - eval_v1(t, t).unwrap().f1).abs() < 1e-6);
        let f2 = |x: f64| eval_v2(t, x).unwrap().f;
        assert!((left_diff(&f2, t, h) - eval_v2(t, t).unwrap().f1).abs() < 1e-6);
    }
    pass(
        6,
        "stein solutions",
        format!("10^4-point grids, worst residual {worst_residual:.2e}, derivative bounds hold"),
    );
}

#[test]
fn criterion_07_concentration() {
    let ns = even_range(4, 2000);
    let conc = sweep::concentration_sweep(&ns).unwrap();
    for c in &conc {
        assert!(c.holds, "concentration fails at n={}", c.n);
    }
    let rows = sweep::binomial_tail_sweep(&ns).unwrap();
    let mut checked = 0;
    for r in &rows {
        assert!(r.all_hold, "binomial tail fails at n={}", r.n);
        checked += r.checked;
    }
    pass(
        7,
        "concentration",
        format!(
            "exceedance bound at {} sizes; binomial envelope at {checked} (n, a) pairs",
            conc.len()
        ),
    );
}

/// Brute-force distribution of the subset walk on J(n, k): masks over
/// {0..n-1}, uniform step swaps one member for one non-member.
fn brute_force_walk(n: u64, k: u64, steps: usize) -> Vec<Vec<Rat>> {
    let start: u32 = (1u32 << k) - 1;
    let mut dist: HashMap<u32, Rat> = HashMap::new();
    dist.insert(start, ri(1));
    let degree = (k * (n - k)) as i128;
    let mut out = Vec::with_capacity(steps + 1);
    let to_hist = |dist: &HashMap<u32, Rat>| {
        let mut hist = vec![Rat::from_integer(0.into()); k as usize + 1];
        for (mask, p) in dist {
            let overlap = (mask & start).count_ones() as usize;
            hist[k as usize - overlap] += p;
        }
        hist
    };
    out.push(to_hist(&dist));
    for _ in 0..steps {
        let mut next: HashMap<u32, Rat> = HashMap::new();
        for (mask, p) in &dist {
            let share = p * rq(1, degree);
            for a in 0..n as u32 {
                if mask & (1 << a) == 0 {
                    continue;
                }
                for b in 0..n as u32 {
                    if mask & (1 << b) != 0 {
                        continue;
                    }
                    let swapped = mask ^ (1 << a) ^ (1 << b);
                    *next.entry(swapped).or_insert_with(|| ri(0)) += &share;
                }
            }
        }
        dist = next;
        out.push(to_hist(&dist));
    }
    out
}

#[test]
fn criterion_08_spherical_cross_validation() {
    for n in even_range(2, 100) {
        let rep = kernel_matches_v2(n).unwrap();
        assert!(rep.ok(), "n={n}: {:?}", rep.failures);
    }
    for n in 2..=30u64 {
        for k in 0..=n / 2 {
            let rep = blspec::spherical::hahn_recurrence_check(n, k).unwrap();
            assert!(rep.ok(), "recurrence n={n} k={k}: {:?}", rep.failures);
            let rep = blspec::spherical::orthogonality_check(n, k).unwrap();
            assert!(rep.ok(), "orthogonality n={n} k={k}: {:?}", rep.failures);
        }
    }
    for n in 2..=10u64 {
        for k in 1..=n / 2 {
            let brute = brute_force_walk(n, k, 4);
            let table = distance_walk(n, k, 4).unwrap();
            for l in 0..=4usize {
                for r in 0..=k as usize {
                    assert_eq!(
                        table.prob(l, r),
                        &brute[l][r],
                        "walk n={n}, k={k}, l={l}, r={r}"
                    );
                }
            }
        }
    }
    for n in 2..=20u64 {
        let rep = moment_agreement_check(n, n / 2, 4).unwrap();
        assert!(rep.ok(), "moments n={n}: {:?}", rep.failures);
    }
    pass(
        8,
        "spherical cross-validation",
        "induced chain = fast kernel to n=100; recurrence/orthogonality to n=30; walks vs brute force to n=10; moment routes to n=20".to_string(),
    );
}

#[test]
fn criterion_09_log_factor_pipeline() {
    // theorem 1 + tool 1 with the stated cutoff; the total is t-independent
    let mut fitted = Vec::new();
    for n in [64u64, 128, 256, 512, 1024] {
        let ni = n as i128;
        let p = PairDistribution::v1(n).unwrap();
        let c = concentration_cutoff(n);
        let bb = theorem1_bound(&p, 1.0, &rq(2, ni * ni), &Theorem1Tail::Tool1 { c }).unwrap();
        assert!(bb.sound);
        let scale = ((n as f64).ln() / n as f64).sqrt();
        fitted.push(bb.total / scale);
    }
    let max = fitted.iter().cloned().fold(f64::MIN, f64::max);
    let min = fitted.iter().cloned().fold(f64::MAX, f64::min);
    assert!(
        max / min <= 2.0,
        "fitted constants unstable: {fitted:?} (ratio {})",
        max / min
    );
    pass(
        9,
        "log-factor pipeline",
        format!("total <= C sqrt(ln n / n) with C in [{min:.3}, {max:.3}], ratio {:.3}", max / min),
    );
}

fn run_cli(args: &[&str]) -> (String, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_blspec"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
        out.status.code().unwrap_or(-1),
    )
}

#[test]
fn criterion_10_cli_determinism_and_exit_codes() {
    let configs: Vec<Vec<&str>> = vec![
        vec!["kolmogorov", "--n-list", "4,16,64,256", "--format", "csv"],
        vec!["sharpness", "--n-list", "16,36,64,100", "--format", "csv"],
        vec![
            "bounds", "--n", "64", "--t-grid", "0:2:10", "--variant", "v1", "--format", "csv",
        ],
        vec!["verify", "--suite", "lemmas", "--n-max", "40", "--format", "csv"],
    ];
    for args in &configs {
        let (first, _, code1) = run_cli(args);
        let (second, _, code2) = run_cli(args);
        assert_eq!(code1, 0, "args {args:?}");
        assert_eq!(code2, 0);
        assert_eq!(first, second, "non-deterministic output for {args:?}");
        assert!(!first.is_empty());
    }
    let (kolm, _, _) = run_cli(&["kolmogorov", "--n-list", "4", "--format", "csv"]);
    assert!(kolm.contains("0.333333333333"), "got: {kolm}");

    let (_, stderr, code) = run_cli(&[
        "verify",
        "--suite",
        "lemmas",
        "--n-max",
        "8",
        "--inject-failure",
    ]);
    assert_eq!(code, 1, "injected failure must exit 1; stderr: {stderr}");
    assert!(stderr.contains("FAIL"));

    let (_, _, code) = run_cli(&["kolmogorov", "--no-such-flag"]);
    assert_eq!(code, 2, "usage errors must exit 2");

    pass(
        10,
        "cli determinism",
        "byte-identical CSV across repeated runs; exit codes 0/1/2 honored".to_string(),
    );
}
