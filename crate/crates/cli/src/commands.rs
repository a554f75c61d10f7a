//! Table builders for each subcommand. Every builder returns the table to
//! emit plus the list of verification failures (empty on success); the
//! caller maps non-empty failures to exit code 1.

use crate::emit::{Cell, Table};
use blspec::bounds::{
    soundness_scan, theorem1_bound, theorem2_bound, Theorem1Tail, Theorem2Tail, Tool2Params,
};
use blspec::exact::{parse_rat, ri, rq, to_f64, Rat};
use blspec::kernels::{
    concentration_cutoff, detailed_balance_check, kernel_v1, kernel_v2, ConditionalMoments,
    PairDistribution,
};
use blspec::spectrum::SpectralMeasure;
use blspec::spherical::{
    distance_walk, gelfand_kernel, gelfand_measure, hahn_recurrence_check,
    moment_agreement_check_at, orthogonality_check, SphericalTable,
};
use blspec::stein::{bound_audit, SolutionVersion};
use blspec::Result;

pub fn spectrum(n: u64) -> Result<Table> {
    let m = SpectralMeasure::new(n)?;
    let mut t = Table::new(
        "spectrum",
        vec!["n", "state", "pi", "w", "tau", "pi_float", "w_float", "tau_float"],
    );
    for i in 0..m.num_states() {
        t.push(vec![
            Cell::U(n),
            Cell::U(i as u64),
            Cell::R(m.pi(i).clone()),
            Cell::R(m.w(i).clone()),
            Cell::R(m.tau(i).clone()),
            Cell::F(to_f64(m.pi(i))),
            Cell::F(to_f64(m.w(i))),
            Cell::F(to_f64(m.tau(i))),
        ]);
    }
    Ok(t)
}

pub fn kolmogorov(ns: &[u64]) -> Result<Table> {
    let reports = blspec::sweep::kolmogorov_sweep(ns)?;
    let mut t = Table::new(
        "kolmogorov",
        vec!["n", "distance", "scaled", "witness_state", "witness_side"],
    );
    for r in reports {
        t.push(vec![
            Cell::U(r.n),
            Cell::F(r.distance),
            Cell::F(r.scaled),
            Cell::U(r.witness_state as u64),
            Cell::S(r.witness_side.to_string()),
        ]);
    }
    Ok(t)
}

pub fn sharpness(ns: &[u64]) -> Result<Table> {
    let points = blspec::sweep::sharpness_sweep(ns)?;
    let mut t = Table::new("sharpness", vec!["n", "t_n", "delta", "scaled"]);
    for p in points {
        t.push(vec![
            Cell::U(p.n),
            Cell::R(p.t_n),
            Cell::F(p.delta),
            Cell::F(p.scaled),
        ]);
    }
    Ok(t)
}

pub enum KernelChoice {
    V1,
    V2,
    Gelfand { k: u64 },
}

pub fn kernels(n: u64, choice: &KernelChoice) -> Result<(Table, Vec<String>)> {
    let (kernel, pi, label) = match choice {
        KernelChoice::V1 => (
            kernel_v1(n)?,
            SpectralMeasure::new(n)?.pis().to_vec(),
            "v1".to_string(),
        ),
        KernelChoice::V2 => (
            kernel_v2(n)?,
            SpectralMeasure::new(n)?.pis().to_vec(),
            "v2".to_string(),
        ),
        KernelChoice::Gelfand { k } => (
            gelfand_kernel(n, *k)?,
            gelfand_measure(n, *k)?,
            format!("gelfand k={k}"),
        ),
    };
    let violations = detailed_balance_check(&pi, &kernel)?;
    let mut failures = Vec::new();
    for v in &violations {
        failures.push(format!(
            "detailed balance fails at state {} for {label}",
            v.state
        ));
    }
    let mut t = Table::new(
        "kernels",
        vec!["n", "variant", "state", "pi", "up", "down", "stay", "balanced"],
    );
    for i in 0..kernel.size() {
        t.push(vec![
            Cell::U(n),
            Cell::S(label.clone()),
            Cell::U(i as u64),
            Cell::R(pi[i].clone()),
            Cell::R(kernel.up(i).clone()),
            Cell::R(kernel.down(i).clone()),
            Cell::R(kernel.stay(i).clone()),
            Cell::B(violations.is_empty()),
        ]);
    }
    Ok((t, failures))
}

pub fn moments(n: u64, v2: bool) -> Result<Table> {
    let p = if v2 {
        PairDistribution::v2(n)?
    } else {
        PairDistribution::v1(n)?
    };
    let cm = ConditionalMoments::new(&p);
    let mut t = Table::new(
        "moments",
        vec!["n", "variant", "state", "w", "e_d", "e_d2", "e_d3", "e_d4"],
    );
    let label = if v2 { "v2" } else { "v1" };
    for (i, sm) in cm.per_state.iter().enumerate() {
        t.push(vec![
            Cell::U(n),
            Cell::S(label.to_string()),
            Cell::U(i as u64),
            Cell::R(p.measure().w(i).clone()),
            Cell::R(sm.drift.clone()),
            Cell::R(sm.d2.clone()),
            Cell::R(sm.d3.clone()),
            Cell::R(sm.d4.clone()),
        ]);
    }
    Ok(t)
}

pub struct BoundsConfig {
    pub v2: bool,
    pub tail: Option<String>,
    pub lambda: Option<String>,
    pub c: Option<String>,
    pub kappa: Option<String>,
    pub k1: Option<String>,
    pub k2: Option<String>,
    pub big_k1_sq: Option<String>,
    pub big_k2: Option<String>,
    pub big_k3: Option<String>,
}

fn parse_named(label: &str, s: &Option<String>, default: Rat) -> Result<Rat> {
    match s {
        None => Ok(default),
        Some(text) => parse_rat(text).ok_or_else(|| {
            blspec::Error::Param(format!("cannot parse {label} value '{text}'"))
        }),
    }
}

pub fn bounds(n: u64, ts: &[f64], cfg: &BoundsConfig) -> Result<(Table, Vec<String>)> {
    let ni = n as i128;
    let mut failures = Vec::new();
    let header = if cfg.v2 {
        vec!["n", "t", "theorem", "lambda", "variance", "third_moment", "tail", "total", "exact", "sound"]
    } else {
        vec!["n", "t", "theorem", "lambda", "drift", "variance", "third_moment", "tail", "total", "exact", "sound"]
    };
    let mut table = Table::new("bounds", header);
    if cfg.v2 {
        let p = PairDistribution::v2(n)?;
        let lambda = parse_named("lambda", &cfg.lambda, rq(4, ni))?;
        let kappa = parse_named("kappa", &cfg.kappa, rq(2, 1))?;
        let tail_kind = cfg.tail.as_deref().unwrap_or("tool3");
        for &t in ts {
            let tail = match tail_kind {
                "exact" => Theorem2Tail::Exact,
                "tool1" => Theorem2Tail::Tool1 {
                    c: parse_named("c", &cfg.c, concentration_cutoff(n))?,
                },
                "tool3" => Theorem2Tail::Tool3 {
                    kappa: kappa.clone(),
                },
                other => {
                    return Err(blspec::Error::Param(format!(
                        "tail mode '{other}' is not available for v2 (use exact, tool1, tool3)"
                    )))
                }
            };
            let bb = theorem2_bound(&p, t, &lambda, &tail)?;
            if !bb.sound {
                failures.push(format!("unsound bound at n={n}, t={t}"));
            }
            table.push(vec![
                Cell::U(n),
                Cell::F(t),
                Cell::S(bb.theorem.to_string()),
                Cell::F(bb.lambda),
                Cell::F(bb.terms[0].1),
                Cell::F(bb.terms[1].1),
                Cell::F(bb.terms[2].1),
                Cell::F(bb.total),
                Cell::F(bb.exact),
                Cell::B(bb.sound),
            ]);
        }
    } else {
        let p = PairDistribution::v1(n)?;
        let lambda = parse_named("lambda", &cfg.lambda, rq(2, ni * ni))?;
        let tail_kind = cfg.tail.as_deref().unwrap_or("tool2");
        for &t in ts {
            let tail = match tail_kind {
                "exact" => Theorem1Tail::Exact,
                "tool1" => Theorem1Tail::Tool1 {
                    c: parse_named("c", &cfg.c, concentration_cutoff(n))?,
                },
                "tool2" => {
                    let stock = Tool2Params::stock(n);
                    let params = if cfg.k1.is_some()
                        || cfg.k2.is_some()
                        || cfg.big_k1_sq.is_some()
                        || cfg.big_k2.is_some()
                        || cfg.big_k3.is_some()
                    {
                        let base = stock?;
                        Tool2Params::new(
                            parse_named("k1", &cfg.k1, base.k1)?,
                            parse_named("k2", &cfg.k2, base.k2)?,
                            parse_named("big-k1-sq", &cfg.big_k1_sq, base.big_k1_sq)?,
                            parse_named("big-k2", &cfg.big_k2, base.big_k2)?,
                            parse_named("big-k3", &cfg.big_k3, base.big_k3)?,
                        )?
                    } else {
                        stock?
                    };
                    Theorem1Tail::Tool2(params)
                }
                other => {
                    return Err(blspec::Error::Param(format!(
                        "tail mode '{other}' is not available for v1 (use exact, tool1, tool2)"
                    )))
                }
            };
            let bb = theorem1_bound(&p, t, &lambda, &tail)?;
            if !bb.sound {
                failures.push(format!("unsound bound at n={n}, t={t}"));
            }
            table.push(vec![
                Cell::U(n),
                Cell::F(t),
                Cell::S(bb.theorem.to_string()),
                Cell::F(bb.lambda),
                Cell::F(bb.terms[0].1),
                Cell::F(bb.terms[1].1),
                Cell::F(bb.terms[2].1),
                Cell::F(bb.terms[3].1),
                Cell::F(bb.total),
                Cell::F(bb.exact),
                Cell::B(bb.sound),
            ]);
        }
    }
    Ok((table, failures))
}

pub fn solutions(v2: bool, ts: &[f64], grid_size: usize) -> Result<(Table, Vec<String>)> {
    let version = if v2 {
        SolutionVersion::V2
    } else {
        SolutionVersion::V1
    };
    let mut table = Table::new(
        "solutions",
        vec!["version", "t", "grid", "check", "observed", "allowed", "ok"],
    );
    let mut failures = Vec::new();
    for &t in ts {
        let audit = bound_audit(version, t, grid_size)?;
        failures.extend(audit.describe_failures());
        table.push(vec![
            Cell::S(version.to_string()),
            Cell::F(t),
            Cell::U(grid_size as u64),
            Cell::S("residual".to_string()),
            Cell::F(audit.max_abs_residual),
            Cell::F(1e-12),
            Cell::B(audit.max_abs_residual <= 1e-12),
        ]);
        for c in &audit.checks {
            table.push(vec![
                Cell::S(version.to_string()),
                Cell::F(t),
                Cell::U(grid_size as u64),
                Cell::S(c.name.to_string()),
                Cell::F(c.observed),
                Cell::F(c.allowed),
                Cell::B(c.ok),
            ]);
        }
    }
    Ok((table, failures))
}

pub fn gelfand(n: u64, k_max: u64, steps: usize) -> Result<(Table, Vec<String>)> {
    let mut table = Table::new(
        "gelfand",
        vec!["n", "k", "structure", "recurrence", "orthogonality", "walk", "moments", "v2_match"],
    );
    let mut failures = Vec::new();
    fn note(failures: &mut Vec<String>, ok: bool, detail: Vec<String>, label: String) -> bool {
        if !ok {
            failures.push(format!("{label}: {}", detail.join("; ")));
        }
        ok
    }
    for k in 1..=k_max.min(n / 2) {
        let structure = SphericalTable::new(n, k)?.structure_check();
        let s_ok = note(
            &mut failures,
            structure.ok(),
            structure.failures,
            format!("structure n={n}, k={k}"),
        );
        let rec = hahn_recurrence_check(n, k)?;
        let r_ok = note(
            &mut failures,
            rec.ok(),
            rec.failures,
            format!("recurrence n={n}, k={k}"),
        );
        let orth = orthogonality_check(n, k)?;
        let o_ok = note(
            &mut failures,
            orth.ok(),
            orth.failures,
            format!("orthogonality n={n}, k={k}"),
        );
        let walk = distance_walk(n, k, steps)?;
        let mut w_ok = true;
        for l in 0..=walk.steps() {
            let total: Rat = walk.step_dist(l).iter().sum();
            w_ok &= total == ri(1);
        }
        if !w_ok {
            failures.push(format!("walk rows do not sum to one at n={n}, k={k}"));
        }
        let moments = moment_agreement_check_at(n, k, 4)?;
        let m_ok = note(
            &mut failures,
            moments.ok(),
            moments.failures,
            format!("moments n={n}, k={k}"),
        );
        let v2_cell = if n % 2 == 0 && k == n / 2 {
            let rep = blspec::spherical::kernel_matches_v2(n)?;
            let ok = note(&mut failures, rep.ok(), rep.failures, format!("v2 match n={n}"));
            Cell::B(ok)
        } else {
            Cell::S("-".to_string())
        };
        table.push(vec![
            Cell::U(n),
            Cell::U(k),
            Cell::B(s_ok),
            Cell::B(r_ok),
            Cell::B(o_ok),
            Cell::B(w_ok),
            Cell::B(m_ok),
            v2_cell,
        ]);
    }
    Ok((table, failures))
}

pub fn scan(n: u64, t_grid: &[f64]) -> Result<(Table, Vec<String>)> {
    let report = soundness_scan(n, t_grid)?;
    let with_tool2 = report.rows.first().map(|r| r.entries.len() == 5).unwrap_or(false);
    let header = if with_tool2 {
        vec!["n", "t", "thm1_exact", "thm1_tool1", "thm1_tool2", "thm2_exact", "thm2_tool3", "exact", "min_ratio", "sound"]
    } else {
        vec!["n", "t", "thm1_exact", "thm1_tool1", "thm2_exact", "thm2_tool3", "exact", "min_ratio", "sound"]
    };
    let mut table = Table::new("scan", header);
    let mut failures = Vec::new();
    for row in &report.rows {
        let row_sound = row.entries.iter().all(|(_, _, s)| *s);
        if !row_sound {
            failures.push(format!("unsound bound at n={n}, t={}", row.t));
        }
        let mut cells = vec![Cell::U(n), Cell::F(row.t)];
        for (_, total, _) in &row.entries {
            cells.push(Cell::F(*total));
        }
        cells.push(Cell::F(row.exact));
        cells.push(Cell::F(row.min_ratio));
        cells.push(Cell::B(row_sound));
        table.push(cells);
    }
    Ok((table, failures))
}
