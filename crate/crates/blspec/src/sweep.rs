//! Sweeps over chain sizes. With the `parallel` feature the work items fan
//! out via rayon; assembly always preserves input order, so results are
//! byte-for-byte reproducible either way.

use crate::error::Result;
use crate::exact::to_f64;
use crate::kernels::{
    concentration_check, detailed_balance_check, kernel_relation_check, kernel_v1, kernel_v2,
    verify_v1_moments, verify_v2_moments, ConcentrationCheck,
};
use crate::par;
use crate::report::IdentityReport;
use crate::spectrum::{sharpness_point, KolmogorovReport, SharpnessPoint, SpectralMeasure};
use crate::spherical::kernel_matches_v2;

/// Even integers in `[lo, hi]`.
pub fn even_range(lo: u64, hi: u64) -> Vec<u64> {
    let start = if lo % 2 == 0 { lo.max(2) } else { lo + 1 };
    (start..=hi).step_by(2).collect()
}

fn collect<T>(results: Vec<Result<T>>) -> Result<Vec<T>> {
    results.into_iter().collect()
}

/// Kolmogorov distance to Exp(1) for each requested size.
pub fn kolmogorov_sweep(ns: &[u64]) -> Result<Vec<KolmogorovReport>> {
    collect(par::map_vec(ns, |&n| {
        Ok(SpectralMeasure::new(n)?.kolmogorov_distance())
    }))
}

/// Exact measure invariants for one size: unit mass, first and second
/// moments, the zero-atom mass, the eigenvalue tie `w = (n/2) tau + 1`,
/// strict monotonicity, CDF step sizes, and the scaled-distance cap.
pub fn spectral_checks(n: u64) -> Result<IdentityReport> {
    use crate::exact::{ri, rq, Rat};
    use crate::spectrum::Side;

    let m = SpectralMeasure::new(n)?;
    let ni = n as i128;
    let mut rep = IdentityReport::new(format!("spectral n={n}"));
    let total: Rat = m.pis().iter().sum();
    rep.check_eq("sum pi", &total, &ri(1));
    let mean: Rat = (0..m.num_states()).map(|i| m.pi(i) * m.w(i)).sum();
    rep.check_eq("E(W)", &mean, &ri(1));
    let second: Rat = (0..m.num_states()).map(|i| m.pi(i) * m.w(i) * m.w(i)).sum();
    rep.check_eq("E(W^2)", &second, &ri(2));
    rep.check_eq("P(W=0)", m.pi(m.num_states() - 1), &rq(2, ni + 2));
    let mut monotone = true;
    for i in 0..m.num_states() {
        let lifted = rq(ni / 2, 1) * m.tau(i) + ri(1);
        rep.check_eq(format!("w({i}) = (n/2) tau + 1"), &lifted, m.w(i));
        if i > 0 && m.w(i) >= m.w(i - 1) {
            monotone = false;
        }
    }
    rep.check_bool("w strictly decreasing", monotone);
    for i in [0, m.num_states() / 2, m.num_states() - 1] {
        let right = m.cdf_w(m.w(i), Side::Right)?;
        let left = m.cdf_w(m.w(i), Side::Left)?;
        rep.check_eq(format!("cdf step at state {i}"), &(right - left), m.pi(i));
    }
    let report = m.kolmogorov_distance();
    rep.check_bool("distance * sqrt(n) <= 1", report.scaled <= 1.0);
    rep.check_bool(
        "distance >= zero-atom mass",
        report.distance >= to_f64(m.pi(m.num_states() - 1)) - 1e-15,
    );
    Ok(rep)
}

pub fn spectral_sweep(ns: &[u64]) -> Result<Vec<IdentityReport>> {
    collect(par::map_vec(ns, |&n| spectral_checks(n)))
}

/// Sharpness discrepancy at `t_n = 2 + 2/sqrt(n)` for even square sizes.
pub fn sharpness_sweep(ns: &[u64]) -> Result<Vec<SharpnessPoint>> {
    collect(par::map_vec(ns, |&n| sharpness_point(n)))
}

/// The full exact-identity battery for one size: both moment lemmas,
/// detailed balance for all three kernels, the off-diagonal kernel
/// relation, and the induced-chain equality at `k = n/2`.
pub fn identity_checks(n: u64) -> Result<IdentityReport> {
    let mut rep = IdentityReport::new(format!("n={n}"));
    rep.merge(verify_v1_moments(n)?);
    rep.merge(verify_v2_moments(n)?);
    let m = SpectralMeasure::new(n)?;
    for kernel in [kernel_v1(n)?, kernel_v2(n)?] {
        let label = format!("balance {}", kernel.variant);
        let violations = detailed_balance_check(m.pis(), &kernel)?;
        rep.check_bool(label, violations.is_empty());
    }
    rep.merge(kernel_relation_check(n)?);
    rep.merge(kernel_matches_v2(n)?);
    Ok(rep)
}

pub fn identity_sweep(ns: &[u64]) -> Result<Vec<IdentityReport>> {
    collect(par::map_vec(ns, |&n| identity_checks(n)))
}

/// Exceedance probability of the slow pair at its stated cutoff, per size.
pub fn concentration_sweep(ns: &[u64]) -> Result<Vec<ConcentrationCheck>> {
    collect(par::map_vec(ns, |&n| concentration_check(n)))
}

/// Binomial-ratio tail rows: one summary per size covering every shift.
#[derive(Debug, Clone)]
pub struct BinomialTailSweepRow {
    pub n: u64,
    pub checked: u64,
    pub all_hold: bool,
    /// Maximum of `ratio - bound` over the row, as a float diagnostic.
    pub worst_margin: f64,
}

pub fn binomial_tail_sweep(ns: &[u64]) -> Result<Vec<BinomialTailSweepRow>> {
    collect(par::map_vec(ns, |&n| {
        let mut all_hold = true;
        let mut worst = f64::NEG_INFINITY;
        // incremental unreduced ratio r_a = C(n, n/2 - a) / C(n, n/2)
        let mut num = num_bigint::BigInt::from(1u32);
        let mut den = num_bigint::BigInt::from(1u32);
        for a in 0..=n / 2 {
            if a > 0 {
                num *= num_bigint::BigInt::from(n / 2 - a + 1);
                den *= num_bigint::BigInt::from(n / 2 + a);
            }
            let ratio = to_f64(&crate::exact::Rat::new_raw(num.clone(), den.clone()));
            let bound = (-((a as f64) * (a as f64 - 1.0)) / n as f64).exp();
            if ratio > bound + 1e-15 {
                all_hold = false;
            }
            worst = worst.max(ratio - bound);
        }
        Ok(BinomialTailSweepRow {
            n,
            checked: n / 2 + 1,
            all_hold,
            worst_margin: worst,
        })
    }))
}
