//! Verification suites behind `blspec verify`. Each suite emits one row per
//! work item and accumulates failure strings; any failure maps to exit
//! code 1.

use crate::emit::{Cell, Table};
use blspec::bounds::{lemma_key_audit, soundness_scan, tool1_bound};
use blspec::exact::{ri, rq};
use blspec::kernels::{detailed_balance_check, kernel_v1, tail_term, PairDistribution};
use blspec::spectrum::SpectralMeasure;
use blspec::stein::{bound_audit, SolutionVersion};
use blspec::sweep::{self, even_range};
use blspec::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Lemmas,
    Spectral,
    Solutions,
    Concentration,
    Gelfand,
    Bounds,
    All,
}

pub struct SuiteOutcome {
    pub table: Table,
    pub failures: Vec<String>,
}

pub fn run(suite: Suite, n_max: u64, inject_failure: bool) -> Result<SuiteOutcome> {
    let mut table = Table::new("verify", vec!["suite", "scope", "checked", "ok"]);
    let mut failures = Vec::new();
    let mut emit = |suite: &str, scope: String, checked: usize, ok: bool| {
        table.push(vec![
            Cell::S(suite.to_string()),
            Cell::S(scope),
            Cell::U(checked as u64),
            Cell::B(ok),
        ]);
    };

    if matches!(suite, Suite::Lemmas | Suite::All) {
        for rep in sweep::identity_sweep(&even_range(2, n_max))? {
            if !rep.ok() {
                failures.extend(rep.failures.iter().map(|f| format!("lemmas {}: {f}", rep.scope)));
            }
            emit("lemmas", rep.scope.clone(), rep.checked, rep.ok());
        }
    }

    if matches!(suite, Suite::Spectral | Suite::All) {
        for rep in sweep::spectral_sweep(&even_range(2, n_max))? {
            if !rep.ok() {
                failures.extend(rep.failures.iter().map(|f| format!("{}: {f}", rep.scope)));
            }
            emit("spectral", rep.scope.clone(), rep.checked, rep.ok());
        }
    }

    if matches!(suite, Suite::Solutions | Suite::All) {
        for &t in &[0.1, 0.5, 1.0, 2.0, 5.0] {
            for version in [SolutionVersion::V1, SolutionVersion::V2] {
                let audit = bound_audit(version, t, 10_000)?;
                let ok = audit.ok();
                failures.extend(audit.describe_failures());
                emit(
                    "solutions",
                    format!("{version} t={t}"),
                    audit.checks.len() + 1,
                    ok,
                );
            }
        }
    }

    if matches!(suite, Suite::Concentration | Suite::All) {
        let ns = even_range(4, n_max);
        for c in sweep::concentration_sweep(&ns)? {
            if !c.holds {
                failures.push(format!("concentration fails at n={}", c.n));
            }
            emit("concentration", format!("n={}", c.n), 1, c.holds);
        }
        for row in sweep::binomial_tail_sweep(&ns)? {
            if !row.all_hold {
                failures.push(format!("binomial tail bound fails at n={}", row.n));
            }
            emit(
                "concentration",
                format!("binomial n={}", row.n),
                row.checked as usize,
                row.all_hold,
            );
        }
    }

    if matches!(suite, Suite::Gelfand | Suite::All) {
        for n in 2..=n_max.min(30) {
            for k in 1..=n / 2 {
                let rec = blspec::spherical::hahn_recurrence_check(n, k)?;
                let orth = blspec::spherical::orthogonality_check(n, k)?;
                let ok = rec.ok() && orth.ok();
                if !ok {
                    failures.extend(rec.failures);
                    failures.extend(orth.failures);
                }
                emit(
                    "gelfand",
                    format!("n={n}, k={k}"),
                    rec.checked + orth.checked,
                    ok,
                );
            }
        }
        for n in 2..=n_max.min(20) {
            let rep = blspec::spherical::moment_agreement_check(n, n / 2, 4)?;
            let ok = rep.ok();
            if !ok {
                failures.extend(rep.failures);
            }
            emit("gelfand", format!("moments n={n}"), rep.checked, ok);
        }
    }

    if matches!(suite, Suite::Bounds | Suite::All) {
        let grid: Vec<f64> = (1..=50).map(|j| j as f64 / 10.0).collect();
        for n in [16u64, 64] {
            if n > n_max {
                continue;
            }
            let report = soundness_scan(n, &grid)?;
            if !report.all_sound {
                failures.push(format!("soundness scan failed at n={n}"));
            }
            emit(
                "bounds",
                format!("scan n={n}"),
                report.rows.len() * report.rows[0].entries.len(),
                report.all_sound,
            );

            // smoothing-lemma grid and tool-1 tail dominance
            let p = PairDistribution::v1(n)?;
            let w0 = p.measure().w(0).clone();
            let mut lemma_ok = true;
            let mut checked = 0;
            for ai in 0..5 {
                for bi in ai..5 {
                    for ki in 1..=5 {
                        let a = &w0 * rq(ai, 4);
                        let b = &w0 * rq(bi, 4);
                        let cap = rq(ki, 2);
                        let audit = lemma_key_audit(&p, &a, &b, &cap)?;
                        lemma_ok &= audit.holds;
                        checked += 1;
                    }
                }
            }
            if !lemma_ok {
                failures.push(format!("smoothing lemma fails somewhere at n={n}"));
            }
            emit("bounds", format!("smoothing lemma n={n}"), checked, lemma_ok);

            let c = blspec::kernels::concentration_cutoff(n);
            let mut dominance_ok = true;
            for &t in &grid {
                let t_rat = blspec::kernels::rat_from_f64(t)?;
                dominance_ok &= tool1_bound(&p, &c)? >= tail_term(&p, &t_rat);
            }
            if !dominance_ok {
                failures.push(format!("tool-1 dominance fails at n={n}"));
            }
            emit("bounds", format!("tool1 dominance n={n}"), grid.len(), dominance_ok);
        }
    }

    if inject_failure {
        // deliberately broken kernel: doubling one rate must break reversibility
        let m = SpectralMeasure::new(4)?;
        let bad = kernel_v1(4)?.with_scaled_up(0, &ri(2));
        let violations = detailed_balance_check(m.pis(), &bad)?;
        let detected = !violations.is_empty();
        emit("inject", "scaled up(0) by 2 at n=4".to_string(), 1, !detected);
        failures.push(if detected {
            "injected kernel fault detected (expected)".to_string()
        } else {
            "injected kernel fault was NOT detected".to_string()
        });
    }

    Ok(SuiteOutcome { table, failures })
}
