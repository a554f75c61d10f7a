//! Reversible birth-death kernels on the spectral states and the exact
//! moment identities of the same-law pairs they generate.
//!
//! Variant `V1` moves with probabilities `O(1/n^2)` and has constant drift
//! `E(D|W) = -2/n^2` away from the zero atom; variant `V2` moves at every
//! step and has linear drift `E(D|W) = -(4/n)(W-1)`. Both are reversible
//! with respect to the spectral measure, and `V1` is the `V2` kernel
//! reweighted by `(4/n^2) / (W(i)-W(j))^2` off the diagonal.

use crate::error::{Error, Result};
use crate::exact::{from_f64, ri, rq, Int, Rat};
use crate::report::IdentityReport;
use crate::spectrum::{require_even, SpectralMeasure};
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelVariant {
    V1,
    V2,
    GelfandL,
}

impl std::fmt::Display for KernelVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KernelVariant::V1 => write!(f, "v1"),
            KernelVariant::V2 => write!(f, "v2"),
            KernelVariant::GelfandL => write!(f, "gelfand"),
        }
    }
}

/// Tridiagonal stochastic kernel with exact rational entries.
#[derive(Debug, Clone)]
pub struct BirthDeathKernel {
    pub variant: KernelVariant,
    up: Vec<Rat>,
    down: Vec<Rat>,
    stay: Vec<Rat>,
}

impl BirthDeathKernel {
    pub(crate) fn from_rows(
        variant: KernelVariant,
        up: Vec<Rat>,
        down: Vec<Rat>,
        stay: Vec<Rat>,
    ) -> Result<Self> {
        let k = Self {
            variant,
            up,
            down,
            stay,
        };
        for i in 0..k.size() {
            let row = k.up(i) + k.down(i) + k.stay(i);
            if !row.is_one() || k.up(i).is_negative() || k.down(i).is_negative() || k.stay(i).is_negative()
            {
                return Err(Error::Identity(format!(
                    "kernel row {i} is not a probability distribution"
                )));
            }
        }
        Ok(k)
    }

    pub fn size(&self) -> usize {
        self.up.len()
    }

    pub fn up(&self, i: usize) -> &Rat {
        &self.up[i]
    }

    pub fn down(&self, i: usize) -> &Rat {
        &self.down[i]
    }

    pub fn stay(&self, i: usize) -> &Rat {
        &self.stay[i]
    }

    /// Copy with `up(i)` scaled by `factor`; deliberately breaks the row-sum
    /// and reversibility invariants for failure-injection tests.
    pub fn with_scaled_up(mut self, i: usize, factor: &Rat) -> Self {
        self.up[i] = &self.up[i] * factor;
        self
    }
}

/// The slow kernel: off-diagonal rates `O(1/n^2)`, upward rate forced to
/// zero at the top state.
pub fn kernel_v1(n: u64) -> Result<BirthDeathKernel> {
    require_even(n)?;
    let half = (n / 2) as usize;
    let ni = n as i128;
    let mut up = Vec::with_capacity(half + 1);
    let mut down = Vec::with_capacity(half + 1);
    let mut stay = Vec::with_capacity(half + 1);
    for i in 0..=half as i128 {
        let u = if i < ni / 2 {
            rq(ni - i + 1, ni * (ni - 2 * i) * (ni - 2 * i + 1))
        } else {
            Rat::zero()
        };
        let d = if i > 0 {
            rq(i, ni * (ni - 2 * i + 1) * (ni - 2 * i + 2))
        } else {
            Rat::zero()
        };
        stay.push(ri(1) - &u - &d);
        up.push(u);
        down.push(d);
    }
    BirthDeathKernel::from_rows(KernelVariant::V1, up, down, stay)
}

/// The fast kernel: moves to a neighbor at every step (`stay = 0`).
pub fn kernel_v2(n: u64) -> Result<BirthDeathKernel> {
    require_even(n)?;
    let half = (n / 2) as usize;
    let ni = n as i128;
    let mut up = Vec::with_capacity(half + 1);
    let mut down = Vec::with_capacity(half + 1);
    for i in 0..=half as i128 {
        up.push(rq(
            (ni - i + 1) * (ni - 2 * i),
            ni * (ni - 2 * i + 1),
        ));
        down.push(rq(i * (ni - 2 * i + 2), ni * (ni - 2 * i + 1)));
    }
    let stay = vec![Rat::zero(); half + 1];
    BirthDeathKernel::from_rows(KernelVariant::V2, up, down, stay)
}

/// A single detailed-balance failure: `pi(i) up(i) != pi(i+1) down(i+1)`.
#[derive(Debug, Clone)]
pub struct BalanceViolation {
    pub state: usize,
    pub lhs: Rat,
    pub rhs: Rat,
}

/// Exact check of `pi(i) K(i,i+1) = pi(i+1) K(i+1,i)` for every edge.
pub fn detailed_balance_check(
    pi: &[Rat],
    kernel: &BirthDeathKernel,
) -> Result<Vec<BalanceViolation>> {
    if pi.len() != kernel.size() {
        return Err(Error::SizeMismatch(format!(
            "measure has {} states, kernel has {}",
            pi.len(),
            kernel.size()
        )));
    }
    let mut violations = Vec::new();
    for i in 0..pi.len() - 1 {
        let lhs = &pi[i] * kernel.up(i);
        let rhs = &pi[i + 1] * kernel.down(i + 1);
        if lhs != rhs {
            violations.push(BalanceViolation { state: i, lhs, rhs });
        }
    }
    Ok(violations)
}

/// One transition of the stationary pair: mass `prob` on `(i, j)` with
/// increment `d = w(j) - w(i)`.
#[derive(Debug, Clone)]
pub struct PairAtom {
    pub from: usize,
    pub to: usize,
    pub prob: Rat,
    pub d: Rat,
}

/// Joint law of `(W, W')` for a kernel started in stationarity.
#[derive(Debug, Clone)]
pub struct PairDistribution {
    measure: SpectralMeasure,
    kernel: BirthDeathKernel,
    atoms: Vec<PairAtom>,
}

impl PairDistribution {
    pub fn new(measure: SpectralMeasure, kernel: BirthDeathKernel) -> Result<Self> {
        if measure.num_states() != kernel.size() {
            return Err(Error::SizeMismatch(format!(
                "measure has {} states, kernel has {}",
                measure.num_states(),
                kernel.size()
            )));
        }
        let mut atoms = Vec::new();
        for i in 0..kernel.size() {
            let mut push = |j: usize, p: &Rat| {
                if !p.is_zero() {
                    atoms.push(PairAtom {
                        from: i,
                        to: j,
                        prob: measure.pi(i) * p,
                        d: measure.w(j) - measure.w(i),
                    });
                }
            };
            if i > 0 {
                push(i - 1, kernel.down(i));
            }
            push(i, kernel.stay(i));
            if i + 1 < kernel.size() {
                push(i + 1, kernel.up(i));
            }
        }
        Ok(Self {
            measure,
            kernel,
            atoms,
        })
    }

    pub fn v1(n: u64) -> Result<Self> {
        Self::new(SpectralMeasure::new(n)?, kernel_v1(n)?)
    }

    pub fn v2(n: u64) -> Result<Self> {
        Self::new(SpectralMeasure::new(n)?, kernel_v2(n)?)
    }

    pub fn n(&self) -> u64 {
        self.measure.n()
    }

    pub fn measure(&self) -> &SpectralMeasure {
        &self.measure
    }

    pub fn kernel(&self) -> &BirthDeathKernel {
        &self.kernel
    }

    pub fn atoms(&self) -> &[PairAtom] {
        &self.atoms
    }
}

/// Per-state conditional moments of `D = W' - W`, all exact.
#[derive(Debug, Clone)]
pub struct StateMoments {
    pub drift: Rat,
    pub d2: Rat,
    pub d3: Rat,
    pub abs_d3: Rat,
    pub d4: Rat,
}

/// Conditional moments for every state plus the aggregates used by the
/// bound engine.
#[derive(Debug, Clone)]
pub struct ConditionalMoments {
    pub per_state: Vec<StateMoments>,
    pub mean_w: Rat,
    pub e_w2: Rat,
    pub e_d: Rat,
    pub e_d2: Rat,
    pub e_d3: Rat,
    pub e_abs_d3: Rat,
    pub e_d4: Rat,
    /// `E|E(D|W)|`
    pub e_abs_drift: Rat,
    pub e_abs_w_minus_1: Rat,
}

impl ConditionalMoments {
    /// Direct enumeration over the at most three outgoing atoms per state;
    /// no closed forms are consulted here so the identity checks stay
    /// independent of what they verify.
    pub fn new(p: &PairDistribution) -> Self {
        let states = p.measure().num_states();
        let zero = StateMoments {
            drift: Rat::zero(),
            d2: Rat::zero(),
            d3: Rat::zero(),
            abs_d3: Rat::zero(),
            d4: Rat::zero(),
        };
        let mut per_state = vec![zero; states];
        for i in 0..states {
            let pi = p.measure().pi(i);
            let sm = &mut per_state[i];
            for a in p.atoms().iter().filter(|a| a.from == i) {
                let k = &a.prob / pi; // kernel probability of this transition
                let d2 = &a.d * &a.d;
                let d3 = &d2 * &a.d;
                sm.drift += &k * &a.d;
                sm.d2 += &k * &d2;
                sm.d3 += &k * &d3;
                sm.abs_d3 += &k * d3.abs();
                sm.d4 += &k * &d2 * &d2;
            }
        }
        let mut agg = Self {
            per_state,
            mean_w: Rat::zero(),
            e_w2: Rat::zero(),
            e_d: Rat::zero(),
            e_d2: Rat::zero(),
            e_d3: Rat::zero(),
            e_abs_d3: Rat::zero(),
            e_d4: Rat::zero(),
            e_abs_drift: Rat::zero(),
            e_abs_w_minus_1: Rat::zero(),
        };
        for i in 0..states {
            let pi = p.measure().pi(i);
            let w = p.measure().w(i);
            let sm = &agg.per_state[i];
            agg.mean_w += pi * w;
            agg.e_w2 += pi * w * w;
            agg.e_d += pi * &sm.drift;
            agg.e_d2 += pi * &sm.d2;
            agg.e_d3 += pi * &sm.d3;
            agg.e_abs_d3 += pi * &sm.abs_d3;
            agg.e_d4 += pi * &sm.d4;
            agg.e_abs_drift += pi * sm.drift.abs();
            agg.e_abs_w_minus_1 += pi * (w - ri(1)).abs();
        }
        agg
    }
}

/// Exact check of the five closed-form moments of the `V1` pair plus the
/// third-moment form `E(D^3|W) = -(16/n^3)(W-1)` used alongside them.
pub fn verify_v1_moments(n: u64) -> Result<IdentityReport> {
    let p = PairDistribution::v1(n)?;
    let cm = ConditionalMoments::new(&p);
    let ni = n as i128;
    let mut rep = IdentityReport::new(format!("v1 moments n={n}"));
    let last = p.measure().num_states() - 1;
    for (i, sm) in cm.per_state.iter().enumerate() {
        let w = p.measure().w(i);
        let want_drift = if i == last { rq(1, ni) } else { -rq(2, ni * ni) };
        rep.check_eq(format!("E(D|i={i})"), &sm.drift, &want_drift);
        rep.check_eq(format!("E(D^2|i={i})"), &sm.d2, &rq(4, ni * ni));
        let want_d3 = -rq(16, ni * ni * ni) * (w - ri(1));
        rep.check_eq(format!("E(D^3|i={i})"), &sm.d3, &want_d3);
        let want_d4 = (rq(32, ni * ni * ni) - rq(64, ni * ni * ni * ni)) * w
            + rq(64, ni * ni * ni * ni);
        rep.check_eq(format!("E(D^4|i={i})"), &sm.d4, &want_d4);
    }
    rep.check_eq("E(W)", &cm.mean_w, &ri(1));
    rep.check_eq("E(D)", &cm.e_d, &ri(0));
    rep.check_eq("E(D^3)", &cm.e_d3, &ri(0));
    rep.check_eq("E(D^4)", &cm.e_d4, &rq(32, ni * ni * ni));
    rep.check_eq(
        "E|E(D|W)|",
        &cm.e_abs_drift,
        &rq(4, ni * (ni + 2)),
    );
    Ok(rep)
}

/// Exact check of the six closed-form moment statements for the `V2` pair,
/// including the per-state envelope
/// `E(D^4|W) <= (256/n^2) W^2 + (256/n^4) 1{W=0}`.
pub fn verify_v2_moments(n: u64) -> Result<IdentityReport> {
    let p = PairDistribution::v2(n)?;
    let cm = ConditionalMoments::new(&p);
    let ni = n as i128;
    let mut rep = IdentityReport::new(format!("v2 moments n={n}"));
    for (i, sm) in cm.per_state.iter().enumerate() {
        let w = p.measure().w(i);
        let wm1 = w - ri(1);
        rep.check_eq(
            format!("E(D|i={i})"),
            &sm.drift,
            &(-rq(4, ni) * &wm1),
        );
        let want_d2 = rq(8, ni) * w - rq(16, ni * ni) * &wm1;
        rep.check_eq(format!("E(D^2|i={i})"), &sm.d2, &want_d2);
        let want_d4 = rq(32, ni * ni)
            * (ri(2) * w * w
                + (rq(12, ni) * w - rq(8, ni) * w * w)
                + rq(8, ni * ni) * (ri(1) - w));
        rep.check_eq(format!("E(D^4|i={i})"), &sm.d4, &want_d4);
        let mut envelope = rq(256, ni * ni) * w * w;
        if w.is_zero() {
            envelope += rq(256, ni * ni * ni * ni);
        }
        rep.check_le(format!("E(D^4|i={i}) envelope"), &sm.d4, &envelope);
    }
    rep.check_eq("E(W)", &cm.mean_w, &ri(1));
    rep.check_eq("E(W^2)", &cm.e_w2, &ri(2)); // Var(W) = 1
    rep.check_eq("E(D)", &cm.e_d, &ri(0));
    rep.check_eq("E(D^2)", &cm.e_d2, &rq(8, ni));
    rep.check_eq("E(D^3)", &cm.e_d3, &ri(0));
    Ok(rep)
}

/// Exact check that the `V1` kernel is the `V2` kernel reweighted by
/// `(4/n^2)/(W(i)-W(j))^2` off the diagonal, plus the induced moment
/// relation `E(D1^r | i) = (4/n^2) E(D2^{r-2} | i)` for `r = 2, 3, 4`.
pub fn kernel_relation_check(n: u64) -> Result<IdentityReport> {
    let m = SpectralMeasure::new(n)?;
    let v1 = kernel_v1(n)?;
    let v2 = kernel_v2(n)?;
    let ni = n as i128;
    let scale = rq(4, ni * ni);
    let mut rep = IdentityReport::new(format!("kernel relation n={n}"));
    for i in 0..m.num_states() {
        if i + 1 < m.num_states() && !v2.up(i).is_zero() {
            let gap = m.w(i) - m.w(i + 1);
            let want = &scale * v2.up(i) / (&gap * &gap);
            rep.check_eq(format!("up({i})"), v1.up(i), &want);
        }
        if i > 0 && !v2.down(i).is_zero() {
            let gap = m.w(i) - m.w(i - 1);
            let want = &scale * v2.down(i) / (&gap * &gap);
            rep.check_eq(format!("down({i})"), v1.down(i), &want);
        }
    }
    let cm1 = ConditionalMoments::new(&PairDistribution::new(m.clone(), v1)?);
    let cm2 = ConditionalMoments::new(&PairDistribution::new(m, v2)?);
    for i in 0..cm1.per_state.len() {
        rep.check_eq(
            format!("moment relation r=2, i={i}"),
            &cm1.per_state[i].d2,
            &scale, // E(D2^0 | i) = 1
        );
        rep.check_eq(
            format!("moment relation r=3, i={i}"),
            &cm1.per_state[i].d3,
            &(&scale * &cm2.per_state[i].drift),
        );
        rep.check_eq(
            format!("moment relation r=4, i={i}"),
            &cm1.per_state[i].d4,
            &(&scale * &cm2.per_state[i].d2),
        );
    }
    Ok(rep)
}

/// Exact `E(D^2 1{|W - t| <= |D|})`; ties count, matching the non-strict
/// indicator in the bound statements.
pub fn tail_term(p: &PairDistribution, t: &Rat) -> Rat {
    let mut acc = Rat::zero();
    for a in p.atoms() {
        if a.d.is_zero() {
            continue;
        }
        if (p.measure().w(a.from) - t).abs() <= a.d.abs() {
            acc += &a.prob * &a.d * &a.d;
        }
    }
    acc
}

/// Exact `P(|D| > c)` (strict).
pub fn exceed_prob(p: &PairDistribution, c: &Rat) -> Rat {
    let mut acc = Rat::zero();
    for a in p.atoms() {
        if a.d.abs() > *c {
            acc += &a.prob;
        }
    }
    acc
}

/// Exact `E(D^2 1{|D| > c})` (strict).
pub fn truncated_d2(p: &PairDistribution, c: &Rat) -> Rat {
    let mut acc = Rat::zero();
    for a in p.atoms() {
        if a.d.abs() > *c {
            acc += &a.prob * &a.d * &a.d;
        }
    }
    acc
}

/// The truncation level `c = (4/n)(ceil(sqrt(2.5 n ln n)) + 1)`; exact once
/// the integer ceiling is fixed.
pub fn concentration_cutoff(n: u64) -> Rat {
    let m = (2.5 * n as f64 * (n as f64).ln()).sqrt().ceil() as i128;
    rq(4 * (m + 1), n as i128)
}

/// `P(|D| > c)` for the `V1` pair at the stated cutoff, compared exactly
/// against `n^{-5/2}` (squared comparison avoids the irrational bound).
#[derive(Debug, Clone)]
pub struct ConcentrationCheck {
    pub n: u64,
    pub cutoff: Rat,
    pub prob: Rat,
    pub bound: f64,
    pub holds: bool,
}

pub fn concentration_check(n: u64) -> Result<ConcentrationCheck> {
    let p = PairDistribution::v1(n)?;
    let cutoff = concentration_cutoff(n);
    let prob = exceed_prob(&p, &cutoff);
    let n5 = Rat::new(Int::one(), Int::from(n).pow(5));
    let holds = &prob * &prob <= n5;
    Ok(ConcentrationCheck {
        n,
        cutoff,
        prob,
        bound: (n as f64).powf(-2.5),
        holds,
    })
}

/// Support bound `|D| <= 2 + 4/n`, used to shortcut tail sums.
pub fn max_abs_d(p: &PairDistribution) -> Rat {
    p.atoms()
        .iter()
        .map(|a| a.d.abs())
        .max()
        .unwrap_or_else(Rat::zero)
}

/// Rational `t` from a double, for indicator evaluations.
pub fn rat_from_f64(t: f64) -> Result<Rat> {
    from_f64(t).ok_or_else(|| Error::Domain(format!("non-finite parameter {t}")))
}
