//! Spectral measure of the Bernoulli-Laplace chain and its Kolmogorov
//! distance to the unit exponential.
//!
//! For even `n` the chain on two urns of `n/2` balls has eigenvalues
//! `tau(i) = 1 - i(n-i+1)/(n/2)^2` with multiplicity `C(n,i) - C(n,i-1)`
//! (multiplicity 1 at `i = 0`). Under the uniform measure on eigenvalues the
//! statistic `W = (n/2) tau + 1` has atoms `w(i) = (n-2i)(n+2-2i)/(2n)` and
//! converges to Exp(1); everything here is kept as exact rationals so the
//! distance computations expose no rounding.

use crate::error::{Error, Result};
use crate::exact::{binom, ri, rq, to_f64, Rat};
use num_traits::{One, Signed, Zero};

/// Which side of a CDF step to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Left => write!(f, "left"),
            Side::Right => write!(f, "right"),
        }
    }
}

/// Exact law of `W`: states `0..=n/2` with probabilities `pi`, atom values
/// `w` (strictly decreasing in the state index) and chain eigenvalues `tau`.
#[derive(Debug, Clone)]
pub struct SpectralMeasure {
    n: u64,
    pi: Vec<Rat>,
    w: Vec<Rat>,
    tau: Vec<Rat>,
    /// `cdf_from[i] = P[W <= w(i)]`, i.e. the mass on states `>= i`;
    /// one trailing zero entry so `cdf_from[i+1] = P[W < w(i)]`.
    cdf_from: Vec<Rat>,
}

pub(crate) fn require_even(n: u64) -> Result<()> {
    if n < 2 || n % 2 != 0 {
        Err(Error::InvalidN(n))
    } else {
        Ok(())
    }
}

impl SpectralMeasure {
    pub fn new(n: u64) -> Result<Self> {
        require_even(n)?;
        let half = (n / 2) as usize;
        let total = binom(n, n / 2);
        let mut pi = Vec::with_capacity(half + 1);
        pi.push(Rat::new(1.into(), total.clone()));
        let mut c_prev = num_bigint::BigInt::one(); // C(n, 0)
        for i in 1..=half {
            let c_i = &c_prev * num_bigint::BigInt::from(n - i as u64 + 1)
                / num_bigint::BigInt::from(i as u64);
            pi.push(Rat::new(&c_i - &c_prev, total.clone()));
            c_prev = c_i;
        }
        let ni = n as i128;
        let mut w = Vec::with_capacity(half + 1);
        let mut tau = Vec::with_capacity(half + 1);
        for i in 0..=half as i128 {
            w.push(rq((ni - 2 * i) * (ni + 2 - 2 * i), 2 * ni));
            tau.push(ri(1) - rq(i * (ni - i + 1), (ni / 2) * (ni / 2)));
        }
        let mut cdf_from = vec![Rat::zero(); half + 2];
        for i in (0..=half).rev() {
            cdf_from[i] = &cdf_from[i + 1] + &pi[i];
        }
        Ok(Self {
            n,
            pi,
            w,
            tau,
            cdf_from,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn num_states(&self) -> usize {
        self.pi.len()
    }

    pub fn pi(&self, i: usize) -> &Rat {
        &self.pi[i]
    }

    pub fn pis(&self) -> &[Rat] {
        &self.pi
    }

    pub fn w(&self, i: usize) -> &Rat {
        &self.w[i]
    }

    pub fn tau(&self, i: usize) -> &Rat {
        &self.tau[i]
    }

    /// `P[W <= w(i)]` as an exact rational.
    pub fn cdf_at_state(&self, i: usize) -> &Rat {
        &self.cdf_from[i]
    }

    /// Exact CDF of `W` at `t >= 0`; `Right` gives `P[W <= t]`, `Left` gives
    /// `P[W < t]`.
    pub fn cdf_w(&self, t: &Rat, side: Side) -> Result<Rat> {
        if t.is_negative() {
            return Err(Error::Domain(format!(
                "cdf_w needs t >= 0, got {}",
                to_f64(t)
            )));
        }
        let states = self.num_states();
        let idx = match side {
            Side::Right => (0..states).find(|&i| &self.w[i] <= t).unwrap_or(states),
            Side::Left => (0..states).find(|&i| &self.w[i] < t).unwrap_or(states),
        };
        Ok(self.cdf_from[idx].clone())
    }

    /// Supremum over `t > 0` of `|P[W <= t] - P[Z <= t]|` for `Z ~ Exp(1)`.
    ///
    /// `F_W` is a right-continuous step function and `F_Z` is continuous and
    /// increasing, so the supremum is attained (possibly as a one-sided limit)
    /// at an atom, from the left or from the right; both sides of every atom
    /// are scanned and the achieving atom and side are recorded.
    pub fn kolmogorov_distance(&self) -> KolmogorovReport {
        let mut best = f64::NEG_INFINITY;
        let mut state = 0;
        let mut side = Side::Right;
        for i in 0..self.num_states() {
            let a = to_f64(&self.w[i]);
            let fz = -(-a).exp_m1();
            let right = (to_f64(&self.cdf_from[i]) - fz).abs();
            if right > best {
                best = right;
                state = i;
                side = Side::Right;
            }
            let left = (to_f64(&self.cdf_from[i + 1]) - fz).abs();
            if left > best {
                best = left;
                state = i;
                side = Side::Left;
            }
        }
        KolmogorovReport {
            n: self.n,
            distance: best,
            witness_state: state,
            witness_side: side,
            scaled: best * (self.n as f64).sqrt(),
        }
    }
}

/// Kolmogorov distance of `W` to Exp(1) together with the achieving atom.
#[derive(Debug, Clone)]
pub struct KolmogorovReport {
    pub n: u64,
    pub distance: f64,
    pub witness_state: usize,
    pub witness_side: Side,
    pub scaled: f64,
}

/// `P[Z <= t]` for `Z ~ Exp(1)`; rejects negative `t`.
pub fn exp_cdf(t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::Domain(format!("exp_cdf needs t >= 0, got {t}")));
    }
    Ok(-(-t).exp_m1())
}

/// Left-side discrepancy at the atom `t_n = 2 + 2/sqrt(n)` for even square `n`.
#[derive(Debug, Clone)]
pub struct SharpnessPoint {
    pub n: u64,
    pub t_n: Rat,
    pub delta: f64,
    pub scaled: f64,
}

fn int_sqrt(n: u64) -> u64 {
    let mut s = (n as f64).sqrt() as u64;
    while s > 0 && s * s > n {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= n {
        s += 1;
    }
    s
}

/// For `n` an even perfect square, evaluates the tail discrepancy
/// `|P[W >= t_n] - P[Z >= t_n]|` at the atom `t_n = w(n/2 - sqrt(n))`,
/// where `P[W >= t_n]` collapses to the exact binomial ratio
/// `C(n, n/2 - sqrt(n)) / C(n, n/2)`.
pub fn sharpness_point(n: u64) -> Result<SharpnessPoint> {
    require_even(n)?;
    let s = int_sqrt(n);
    if s * s != n {
        return Err(Error::NotEvenSquare(n));
    }
    let a = n / 2 - s;
    let ratio = Rat::new(binom(n, a), binom(n, n / 2));
    let t_n = rq(2 * s as i128 + 2, s as i128);
    let delta = (to_f64(&ratio) - (-to_f64(&t_n)).exp()).abs();
    Ok(SharpnessPoint {
        n,
        t_n,
        delta,
        scaled: delta * s as f64,
    })
}

/// Exact binomial ratio against the sub-Gaussian envelope `e^{-a(a-1)/n}`.
#[derive(Debug, Clone)]
pub struct BinomialTailCheck {
    pub n: u64,
    pub a: u64,
    pub ratio: Rat,
    pub bound: f64,
    pub holds: bool,
}

/// Checks `C(n, n/2 - a) / C(n, n/2) <= e^{-a(a-1)/n}`. The ratio is exact;
/// the comparison is in doubles with a `1e-15` guard for the float boundary
/// cases `a <= 1` where both sides are 1.
pub fn binomial_tail_bound_check(n: u64, a: u64) -> Result<BinomialTailCheck> {
    require_even(n)?;
    if a > n / 2 {
        return Err(Error::OutOfRange(format!("a = {a} exceeds n/2 = {}", n / 2)));
    }
    let ratio = Rat::new(binom(n, n / 2 - a), binom(n, n / 2));
    let bound = (-((a as f64) * (a as f64 - 1.0)) / n as f64).exp();
    let holds = to_f64(&ratio) <= bound + 1e-15;
    Ok(BinomialTailCheck {
        n,
        a,
        ratio,
        bound,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::fmt_rat;

    #[test]
    fn rejects_bad_n() {
        assert!(SpectralMeasure::new(3).is_err());
        assert!(SpectralMeasure::new(0).is_err());
        assert!(SpectralMeasure::new(2).is_ok());
    }

    #[test]
    fn small_measures() {
        let m = SpectralMeasure::new(2).unwrap();
        assert_eq!(m.pis(), &[rq(1, 2), rq(1, 2)]);
        assert_eq!(&[m.w(0).clone(), m.w(1).clone()], &[ri(2), ri(0)]);

        let m = SpectralMeasure::new(4).unwrap();
        assert_eq!(m.pis(), &[rq(1, 6), rq(1, 2), rq(1, 3)]);
        assert_eq!(m.w(0), &ri(3));
        assert_eq!(m.w(1), &ri(1));
        assert_eq!(m.w(2), &ri(0));
    }

    #[test]
    fn measure_identities_hold() {
        for n in [2u64, 4, 6, 10, 36, 100] {
            let m = SpectralMeasure::new(n).unwrap();
            let ni = n as i128;
            let mut total = Rat::zero();
            let mut mean = Rat::zero();
            let mut second = Rat::zero();
            for i in 0..m.num_states() {
                assert!(m.pi(i).is_positive(), "pi({i}) > 0 at n={n}");
                total += m.pi(i);
                mean += m.pi(i) * m.w(i);
                second += m.pi(i) * m.w(i) * m.w(i);
                // w = (n/2) tau + 1 ties eigenvalues to the statistic
                let lifted = rq(ni / 2, 1) * m.tau(i) + ri(1);
                assert_eq!(&lifted, m.w(i));
                if i > 0 {
                    assert!(m.w(i) < m.w(i - 1), "w strictly decreasing");
                }
            }
            assert_eq!(total, ri(1));
            assert_eq!(mean, ri(1));
            assert_eq!(second, ri(2));
            assert_eq!(m.pi(m.num_states() - 1), &rq(2, ni + 2));
            assert_eq!(m.w(m.num_states() - 1), &ri(0));
            assert_eq!(m.w(m.num_states() - 2), &rq(4, ni));
        }
    }

    #[test]
    fn cdf_examples() {
        let m = SpectralMeasure::new(4).unwrap();
        assert_eq!(m.cdf_w(&ri(1), Side::Right).unwrap(), rq(5, 6));
        assert_eq!(m.cdf_w(&ri(1), Side::Left).unwrap(), rq(1, 3));
        assert_eq!(m.cdf_w(&ri(5), Side::Right).unwrap(), ri(1));
        assert_eq!(m.cdf_w(&ri(0), Side::Left).unwrap(), ri(0));
        assert!(m.cdf_w(&ri(-1), Side::Right).is_err());
        // step size at an atom equals its mass
        for i in 0..m.num_states() {
            let gap = m.cdf_w(m.w(i), Side::Right).unwrap() - m.cdf_w(m.w(i), Side::Left).unwrap();
            assert_eq!(&gap, m.pi(i));
        }
    }

    #[test]
    fn exp_cdf_values() {
        assert_eq!(exp_cdf(0.0).unwrap(), 0.0);
        assert!((exp_cdf(1.0).unwrap() - 0.6321205588285577).abs() < 1e-15);
        assert!((exp_cdf(2.5).unwrap() - (1.0 - 0.08208499862389880)).abs() < 1e-15);
        assert!(exp_cdf(-0.1).is_err());
    }

    #[test]
    fn kolmogorov_small_cases() {
        let r = SpectralMeasure::new(4).unwrap().kolmogorov_distance();
        assert!((r.distance - 1.0 / 3.0).abs() < 1e-14);
        assert_eq!(r.witness_state, 2);
        assert_eq!(r.witness_side, Side::Right);
        assert!((r.scaled - 2.0 / 3.0).abs() < 1e-14);

        let r = SpectralMeasure::new(2).unwrap().kolmogorov_distance();
        assert!((r.distance - 0.5).abs() < 1e-14);
        assert_eq!(r.witness_state, 1);

        // the zero atom forces at least its own mass
        for n in [6u64, 20, 50] {
            let m = SpectralMeasure::new(n).unwrap();
            let r = m.kolmogorov_distance();
            assert!(r.distance >= to_f64(m.pi(m.num_states() - 1)) - 1e-15);
        }
    }

    #[test]
    fn sharpness_examples() {
        let p = sharpness_point(16).unwrap();
        assert_eq!(fmt_rat(&p.t_n), "5/2");
        let expect = (1820.0 / 12870.0 - (-2.5f64).exp()).abs();
        assert!((p.delta - expect).abs() < 1e-15);
        assert!((p.delta - 0.0593291).abs() < 1e-6);
        assert!((p.scaled - 4.0 * expect).abs() < 1e-14);

        let p = sharpness_point(4).unwrap();
        assert_eq!(p.t_n, ri(3));
        assert!((p.delta - (1.0 / 6.0 - (-3.0f64).exp()).abs()).abs() < 1e-15);

        assert!(sharpness_point(8).is_err());
        assert!(sharpness_point(25).is_err());
    }

    #[test]
    fn binomial_tail_examples() {
        let c = binomial_tail_bound_check(4, 0).unwrap();
        assert_eq!(c.ratio, ri(1));
        assert!(c.holds && c.bound == 1.0);

        let c = binomial_tail_bound_check(4, 2).unwrap();
        assert_eq!(c.ratio, rq(1, 6));
        assert!((c.bound - (-0.5f64).exp()).abs() < 1e-15);
        assert!(c.holds);

        let c = binomial_tail_bound_check(16, 4).unwrap();
        assert_eq!(c.ratio, rq(1820, 12870));
        assert!((c.bound - (-0.75f64).exp()).abs() < 1e-15);
        assert!(c.holds);

        assert!(binomial_tail_bound_check(4, 3).is_err());
    }
}
