//! Spherical functions of the pair (symmetric group, Young subgroup
//! `S_k x S_{n-k}`), the birth-death chain they induce, and an algebraic
//! route to the pair moments through distance walks on the Johnson graph
//! `J(n, k)`.
//!
//! The value `omega_i(r)` is the hypergeometric sum
//! `sum_m (-i)_m (i-n-1)_m (-r)_m / ((k-n)_m (-k)_m m!)` with rising
//! factorials, a Hahn-polynomial evaluation. The functions satisfy the
//! three-term recurrence `-r omega_i = A_i omega_{i+1} - (A_i + B_i)
//! omega_i + B_i omega_{i-1}` whose coefficients, rescaled by
//! `n / (k(n-k))`, are exactly the transition rates of the chain `L` below;
//! at `k = n/2` that chain coincides with the fast kernel of
//! [`crate::kernels`]. Moments of one `L`-step started in stationarity can
//! therefore be computed two independent ways — by direct kernel
//! enumeration and by the walk/spherical-function sums — and the crate
//! cross-checks them entry by entry.
//!
//! Scale bookkeeping: one step of the statistic changes by
//! `sqrt(k(n-k)) (omega_j(1) - omega_i(1))`, so odd moments carry a single
//! irrational factor `sqrt(k(n-k))` unless `k = n/2`. [`SqrtScaled`] keeps
//! the rational coefficient and that flag separate, which keeps every
//! comparison exact.

use crate::error::{Error, Result};
use crate::exact::{binom, powi, ri, rq, Int, Rat};
use crate::kernels::{BirthDeathKernel, ConditionalMoments, KernelVariant, PairDistribution};
use crate::report::IdentityReport;
use crate::spectrum::SpectralMeasure;
use num_traits::{One, Zero};

fn require_nk(n: u64, k: u64) -> Result<()> {
    if n < 1 || k > n / 2 {
        return Err(Error::OutOfRange(format!(
            "need 0 <= k <= n/2, got n={n}, k={k}"
        )));
    }
    Ok(())
}

/// `omega_i(j)` as an exact rational; indices `i, j <= k`.
pub fn spherical_value(n: u64, k: u64, i: u64, j: u64) -> Result<Rat> {
    require_nk(n, k)?;
    if i > k || j > k {
        return Err(Error::OutOfRange(format!(
            "spherical indices out of range: i={i}, j={j}, k={k}"
        )));
    }
    let (ni, ki, ii, ji) = (n as i128, k as i128, i as i128, j as i128);
    let mut sum = Rat::one();
    let mut term = Rat::one();
    for m in 0..ii.min(ji) {
        // ratio of consecutive rising-factorial products
        let num = (-ii + m) * (ii - ni - 1 + m) * (-ji + m);
        let den = (ki - ni + m) * (-ki + m) * (m + 1);
        term *= rq(num, den);
        sum += &term;
    }
    Ok(sum)
}

/// Values, dimensions, and distance-sphere sizes for one pair `(n, k)`.
#[derive(Debug, Clone)]
pub struct SphericalTable {
    n: u64,
    k: u64,
    omega: Vec<Vec<Rat>>,
    dims: Vec<Int>,
    dist_count: Vec<Int>,
}

impl SphericalTable {
    pub fn new(n: u64, k: u64) -> Result<Self> {
        require_nk(n, k)?;
        let size = (k + 1) as usize;
        let mut omega = Vec::with_capacity(size);
        for i in 0..=k {
            let mut row = Vec::with_capacity(size);
            for r in 0..=k {
                row.push(spherical_value(n, k, i, r)?);
            }
            omega.push(row);
        }
        let mut dims = vec![Int::one()];
        for i in 1..=k {
            dims.push(binom(n, i) - binom(n, i - 1));
        }
        let dist_count = (0..=k).map(|r| binom(k, r) * binom(n - k, r)).collect();
        Ok(Self {
            n,
            k,
            omega,
            dims,
            dist_count,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn omega(&self, i: usize, r: usize) -> &Rat {
        &self.omega[i][r]
    }

    pub fn dim(&self, i: usize) -> &Int {
        &self.dims[i]
    }

    pub fn count(&self, r: usize) -> &Int {
        &self.dist_count[r]
    }

    /// Structural identities: normalizations, the closed form of `omega_1`,
    /// and the two total counts.
    pub fn structure_check(&self) -> IdentityReport {
        let mut rep = IdentityReport::new(format!("spherical table n={}, k={}", self.n, self.k));
        let (ni, ki) = (self.n as i128, self.k as i128);
        for i in 0..=self.k as usize {
            rep.check_eq(format!("omega_{i}(0)"), self.omega(i, 0), &ri(1));
        }
        for r in 0..=self.k as usize {
            rep.check_eq(format!("omega_0({r})"), self.omega(0, r), &ri(1));
            if self.k >= 1 {
                let want = ri(1) - rq(ni * r as i128, ki * (ni - ki));
                rep.check_eq(format!("omega_1({r})"), self.omega(1, r), &want);
            }
        }
        let dim_sum: Int = self.dims.iter().sum();
        let cnt_sum: Int = self.dist_count.iter().sum();
        let total = binom(self.n, self.k);
        rep.check_bool("sum of dims = C(n,k)", dim_sum == total);
        rep.check_bool("sum of sphere sizes = C(n,k)", cnt_sum == total);
        rep
    }
}

/// Recurrence coefficient `A_i = (n+1-i)(n-k-i)(k-i) / ((n+1-2i)(n-2i))`;
/// zero at `i = k` where the vanishing numerator factor wins over the
/// possibly vanishing denominator (`k = n/2`).
fn coef_a(n: i128, k: i128, i: i128) -> Rat {
    if i == k {
        return Rat::zero();
    }
    rq(
        (n + 1 - i) * (n - k - i) * (k - i),
        (n + 1 - 2 * i) * (n - 2 * i),
    )
}

/// Recurrence coefficient `B_i = i(n+1-k-i)(k+1-i) / ((n+2-2i)(n+1-2i))`.
fn coef_b(n: i128, k: i128, i: i128) -> Rat {
    rq(
        i * (n + 1 - k - i) * (k + 1 - i),
        (n + 2 - 2 * i) * (n + 1 - 2 * i),
    )
}

/// Exact check of the three-term recurrence for all `0 <= i <= k` and all
/// distances `r`; the `i = k` row has no `omega_{k+1}` term since `A_k = 0`.
pub fn hahn_recurrence_check(n: u64, k: u64) -> Result<IdentityReport> {
    let table = SphericalTable::new(n, k)?;
    let (ni, ki) = (n as i128, k as i128);
    let mut rep = IdentityReport::new(format!("hahn recurrence n={n}, k={k}"));
    for i in 0..=k as usize {
        let a = coef_a(ni, ki, i as i128);
        let b = coef_b(ni, ki, i as i128);
        for r in 0..=k as usize {
            let lhs = ri(-(r as i128)) * table.omega(i, r);
            let mut rhs = -(&a + &b) * table.omega(i, r);
            if i + 1 <= k as usize {
                rhs += &a * table.omega(i + 1, r);
            }
            if i > 0 {
                rhs += &b * table.omega(i - 1, r);
            }
            rep.check_eq(format!("i={i}, r={r}"), &lhs, &rhs);
        }
    }
    // A_0 collapses to k(n-k)/n, which pins the closed form of omega_1
    if k >= 1 {
        rep.check_eq("A_0", &coef_a(ni, ki, 0), &rq(ki * (ni - ki), ni));
    }
    Ok(rep)
}

/// Exact orthogonality check:
/// `sum_r (cnt_r / C(n,k)) omega_i(r) omega_j(r) = delta_ij / d_i`.
pub fn orthogonality_check(n: u64, k: u64) -> Result<IdentityReport> {
    let table = SphericalTable::new(n, k)?;
    let total = binom(n, k);
    let mut rep = IdentityReport::new(format!("orthogonality n={n}, k={k}"));
    for i in 0..=k as usize {
        for j in i..=k as usize {
            let mut acc = Rat::zero();
            for r in 0..=k as usize {
                acc += Rat::new(table.count(r).clone(), total.clone())
                    * table.omega(i, r)
                    * table.omega(j, r);
            }
            let want = if i == j {
                Rat::new(Int::one(), table.dim(i).clone())
            } else {
                Rat::zero()
            };
            rep.check_eq(format!("<omega_{i}, omega_{j}>"), &acc, &want);
        }
    }
    Ok(rep)
}

/// Stationary law of the induced chain: `pi(i) = d_i / C(n, k)`.
pub fn gelfand_measure(n: u64, k: u64) -> Result<Vec<Rat>> {
    let table = SphericalTable::new(n, k)?;
    let total = binom(n, k);
    Ok((0..=k as usize)
        .map(|i| Rat::new(table.dim(i).clone(), total.clone()))
        .collect())
}

/// The induced birth-death chain on `{0..k}`. Rates are the recurrence
/// coefficients rescaled by `n/(k(n-k))`; the `i = k` row at `k = n/2` hits
/// vanishing factors in both numerator and denominator and is resolved by
/// `up(k) = 0` with the row summing to one.
pub fn gelfand_kernel(n: u64, k: u64) -> Result<BirthDeathKernel> {
    require_nk(n, k)?;
    if k < 1 {
        return Err(Error::OutOfRange(format!(
            "the induced chain needs k >= 1, got k={k}"
        )));
    }
    let (ni, ki) = (n as i128, k as i128);
    let mut up = Vec::with_capacity(k as usize + 1);
    let mut down = Vec::with_capacity(k as usize + 1);
    let mut stay = Vec::with_capacity(k as usize + 1);
    for i in 0..=ki {
        let u = if i == ki {
            Rat::zero()
        } else {
            rq(
                ni * (ni + 1 - i) * (ni - i - ki) * (ki - i),
                ki * (ni - ki) * (ni + 1 - 2 * i) * (ni - 2 * i),
            )
        };
        let d = rq(
            i * ni * (ni + 1 - i - ki) * (ki + 1 - i),
            ki * (ni - ki) * (ni + 2 - 2 * i) * (ni + 1 - 2 * i),
        );
        let s = if i == ki && 2 * ki == ni {
            ri(1) - &d // up and the stay formula both degenerate to 0/0 here
        } else {
            rq(
                i * (ni + 1 - i) * (ni - 2 * ki) * (ni - 2 * ki),
                ki * (ni - ki) * (ni - 2 * i) * (ni + 2 - 2 * i),
            )
        };
        up.push(u);
        down.push(d);
        stay.push(s);
    }
    BirthDeathKernel::from_rows(KernelVariant::GelfandL, up, down, stay)
}

/// Distance distribution of simple random walk on `J(n, k)` after each of
/// `0..=steps` steps, started at a fixed vertex.
#[derive(Debug, Clone)]
pub struct DistanceWalkTable {
    pub n: u64,
    pub k: u64,
    p: Vec<Vec<Rat>>,
}

impl DistanceWalkTable {
    /// `p_l(r)`, the chance of being at distance `r` after `l` steps.
    pub fn prob(&self, l: usize, r: usize) -> &Rat {
        &self.p[l][r]
    }

    pub fn step_dist(&self, l: usize) -> &[Rat] {
        &self.p[l]
    }

    pub fn steps(&self) -> usize {
        self.p.len() - 1
    }
}

/// Iterates the distance-class transition rates of the walk: from distance
/// `r` it moves out with rate `(k-r)(n-k-r)/(k(n-k))`, back with
/// `r^2/(k(n-k))`, and stays otherwise. Distance-transitivity of `J(n,k)`
/// makes the distance process Markov; the brute-force subset enumeration in
/// the test suite pins these rates.
pub fn distance_walk(n: u64, k: u64, steps: usize) -> Result<DistanceWalkTable> {
    require_nk(n, k)?;
    if k < 1 || n - k < 1 {
        return Err(Error::OutOfRange(format!(
            "the walk needs 1 <= k and k <= n-1, got n={n}, k={k}"
        )));
    }
    let (ni, ki) = (n as i128, k as i128);
    let denom = ki * (ni - ki);
    let size = k as usize + 1;
    let mut table = Vec::with_capacity(steps + 1);
    let mut current = vec![Rat::zero(); size];
    current[0] = Rat::one();
    table.push(current.clone());
    for _ in 0..steps {
        let mut next = vec![Rat::zero(); size];
        for r in 0..size {
            if current[r].is_zero() {
                continue;
            }
            let rr = r as i128;
            let out = rq((ki - rr) * (ni - ki - rr), denom);
            let back = rq(rr * rr, denom);
            let hold = ri(1) - &out - &back;
            if r + 1 < size {
                next[r + 1] += &current[r] * out;
            }
            if r > 0 {
                next[r - 1] += &current[r] * back;
            }
            next[r] += &current[r] * hold;
        }
        table.push(next.clone());
        current = next;
    }
    Ok(DistanceWalkTable { n, k, p: table })
}

/// A rational coefficient times an optional factor `sqrt(k(n-k))`.
///
/// Even moments are plain rationals; odd ones carry the root once. Zero
/// coefficients drop the flag so equality is canonical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SqrtScaled {
    pub coef: Rat,
    pub has_sqrt: bool,
}

impl SqrtScaled {
    fn new(coef: Rat, has_sqrt: bool) -> Self {
        let has_sqrt = has_sqrt && !coef.is_zero();
        Self { coef, has_sqrt }
    }

    /// The value as a plain rational when the root factor is absent or the
    /// base `k(n-k)` is a perfect square (always the case at `k = n/2`).
    pub fn to_rat(&self, n: u64, k: u64) -> Option<Rat> {
        if !self.has_sqrt {
            return Some(self.coef.clone());
        }
        let base = (k * (n - k)) as i128;
        let root = (base as f64).sqrt().round() as i128;
        if root * root == base {
            Some(&self.coef * ri(root))
        } else {
            None
        }
    }
}

fn moment_prefactor(n: u64, k: u64, m: u32) -> (Rat, bool) {
    let base = rq((k * (n - k)) as i128, 1);
    (powi(&base, m / 2), m % 2 == 1)
}

/// Unconditional `E(D^m)` for one stationary `L`-step via the walk sums
/// `sum_l (-1)^{m-l} C(m,l) sum_r (1/cnt_r) omega_1(r) p_l(r) p_{m-l}(r)`,
/// scaled by `(k(n-k))^{m/2}`.
pub fn algebraic_moment(n: u64, k: u64, m: u32) -> Result<SqrtScaled> {
    require_nk(n, k)?;
    if k < 1 {
        return Err(Error::OutOfRange("moments need k >= 1".into()));
    }
    let table = SphericalTable::new(n, k)?;
    let walk = distance_walk(n, k, m as usize)?;
    let mut sum = Rat::zero();
    for l in 0..=m {
        let mut inner = Rat::zero();
        for r in 0..=k as usize {
            let cnt = table.count(r);
            if cnt.is_zero() {
                continue;
            }
            inner += Rat::new(Int::one(), cnt.clone())
                * table.omega(1, r)
                * walk.prob(l as usize, r)
                * walk.prob((m - l) as usize, r);
        }
        let signed = if (m - l) % 2 == 1 { -inner } else { inner };
        sum += ri(binom_small(m, l)) * signed;
    }
    let (pref, has_sqrt) = moment_prefactor(n, k, m);
    Ok(SqrtScaled::new(pref * sum, has_sqrt))
}

/// Conditional `E(D^m | i)` via
/// `sum_l (-1)^{m-l} C(m,l) omega_i(1)^{m-l} sum_r omega_i(r) omega_1(r) p_l(r)`,
/// scaled by `(k(n-k))^{m/2}`.
pub fn algebraic_conditional_moment(n: u64, k: u64, i: u64, m: u32) -> Result<SqrtScaled> {
    require_nk(n, k)?;
    if k < 1 || i > k {
        return Err(Error::OutOfRange(format!(
            "conditional moment needs k >= 1 and i <= k, got i={i}, k={k}"
        )));
    }
    let table = SphericalTable::new(n, k)?;
    let walk = distance_walk(n, k, m as usize)?;
    let omega_i1 = table.omega(i as usize, 1).clone();
    let mut sum = Rat::zero();
    for l in 0..=m {
        let mut inner = Rat::zero();
        for r in 0..=k as usize {
            inner += table.omega(i as usize, r) * table.omega(1, r) * walk.prob(l as usize, r);
        }
        let mut term = powi(&omega_i1, m - l) * inner;
        if (m - l) % 2 == 1 {
            term = -term;
        }
        sum += ri(binom_small(m, l)) * term;
    }
    let (pref, has_sqrt) = moment_prefactor(n, k, m);
    Ok(SqrtScaled::new(pref * sum, has_sqrt))
}

fn binom_small(m: u32, l: u32) -> i128 {
    let mut acc: i128 = 1;
    for j in 0..l.min(m - l) {
        acc = acc * (m - j) as i128 / (j + 1) as i128;
    }
    acc
}

/// Conditional `E(D^m | i)` by direct kernel enumeration, with the step
/// increment `sqrt(k(n-k)) (omega_j(1) - omega_i(1))`.
pub fn kernel_conditional_moment(n: u64, k: u64, i: u64, m: u32) -> Result<SqrtScaled> {
    let kernel = gelfand_kernel(n, k)?;
    let table = SphericalTable::new(n, k)?;
    if i > k {
        return Err(Error::OutOfRange(format!("state {i} exceeds k={k}")));
    }
    let iu = i as usize;
    let omega_i1 = table.omega(iu, 1);
    let mut sum = Rat::zero();
    if i > 0 {
        sum += kernel.down(iu) * powi(&(table.omega(iu - 1, 1) - omega_i1), m);
    }
    if iu + 1 <= k as usize {
        sum += kernel.up(iu) * powi(&(table.omega(iu + 1, 1) - omega_i1), m);
    }
    if m == 0 {
        sum += kernel.stay(iu);
    }
    let (pref, has_sqrt) = moment_prefactor(n, k, m);
    Ok(SqrtScaled::new(pref * sum, has_sqrt))
}

/// Unconditional `E(D^m)` by kernel enumeration under the stationary law.
pub fn kernel_moment(n: u64, k: u64, m: u32) -> Result<SqrtScaled> {
    let pi = gelfand_measure(n, k)?;
    let mut coef = Rat::zero();
    let mut has_sqrt = false;
    for i in 0..=k {
        let sm = kernel_conditional_moment(n, k, i, m)?;
        has_sqrt |= sm.has_sqrt;
        coef += &pi[i as usize] * sm.coef;
    }
    Ok(SqrtScaled::new(coef, has_sqrt || m % 2 == 1))
}

/// Cross-validates the algebraic and kernel moment routes for one `k`:
/// every `m <= m_max` and every state; at `k = n/2` (even `n`) additionally
/// matches the fast-kernel pair moments on the spectral scale.
pub fn moment_agreement_check_at(n: u64, k: u64, m_max: u32) -> Result<IdentityReport> {
    let mut rep = IdentityReport::new(format!("moment agreement n={n}, k={k}"));
    for m in 1..=m_max {
        let alg = algebraic_moment(n, k, m)?;
        let ker = kernel_moment(n, k, m)?;
        rep.check_bool(
            format!("m={m}: unconditional routes agree ({alg:?} vs {ker:?})"),
            alg == ker,
        );
        for i in 0..=k {
            let alg = algebraic_conditional_moment(n, k, i, m)?;
            let ker = kernel_conditional_moment(n, k, i, m)?;
            rep.check_bool(
                format!("m={m}, i={i}: conditional routes agree"),
                alg == ker,
            );
        }
    }
    if n % 2 == 0 && k == n / 2 {
        let pair = PairDistribution::v2(n)?;
        let cm = ConditionalMoments::new(&pair);
        for i in 0..=k {
            for m in 1..=m_max.min(4) {
                let got = kernel_conditional_moment(n, k, i, m)?
                    .to_rat(n, k)
                    .expect("k = n/2 scale is rational");
                let want = match m {
                    1 => &cm.per_state[i as usize].drift,
                    2 => &cm.per_state[i as usize].d2,
                    3 => &cm.per_state[i as usize].d3,
                    _ => &cm.per_state[i as usize].d4,
                };
                rep.check_eq(format!("i={i}, m={m} vs fast pair"), &got, want);
            }
        }
    }
    Ok(rep)
}

/// [`moment_agreement_check_at`] for every `1 <= k <= k_max`.
pub fn moment_agreement_check(n: u64, k_max: u64, m_max: u32) -> Result<IdentityReport> {
    let mut rep = IdentityReport::new(format!("moment agreement n={n}"));
    for k in 1..=k_max.min(n / 2) {
        rep.merge(moment_agreement_check_at(n, k, m_max)?);
    }
    Ok(rep)
}

/// Entry-by-entry equality of the induced chain at `k = n/2` with the fast
/// kernel, plus detailed balance against the spectral measure.
pub fn kernel_matches_v2(n: u64) -> Result<IdentityReport> {
    let mut rep = IdentityReport::new(format!("induced chain vs fast kernel n={n}"));
    if n % 2 != 0 {
        return Err(Error::InvalidN(n));
    }
    let l = gelfand_kernel(n, n / 2)?;
    let v2 = crate::kernels::kernel_v2(n)?;
    if l.size() != v2.size() {
        return Err(Error::SizeMismatch("state counts differ".into()));
    }
    for i in 0..l.size() {
        rep.check_eq(format!("up({i})"), l.up(i), v2.up(i));
        rep.check_eq(format!("down({i})"), l.down(i), v2.down(i));
        rep.check_eq(format!("stay({i})"), l.stay(i), v2.stay(i));
    }
    let m = SpectralMeasure::new(n)?;
    let violations = crate::kernels::detailed_balance_check(m.pis(), &l)?;
    rep.check_bool("detailed balance", violations.is_empty());
    // the spectral atoms are the lifted eigenvalue statistic
    let table = SphericalTable::new(n, n / 2)?;
    for i in 0..=(n / 2) as usize {
        let lifted = rq(n as i128 / 2, 1) * table.omega(i, 1) + ri(1);
        rep.check_eq(format!("w({i}) lift"), &lifted, m.w(i));
    }
    Ok(rep)
}
