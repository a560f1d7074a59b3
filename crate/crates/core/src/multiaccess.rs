//! Sum spectral efficiency of the nine evaluated access schemes, and the
//! user-scheduling rules that decide which user the IRS is tuned for under
//! FDMA.
//!
//! User indices are 0-based throughout. Rates are in bits/s/Hz.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::beamforming::{
    alternating_optimize, effective_channel, mrt_beamformer, AoOptions, AoResult, ReflectionState,
};
use crate::channel::ChannelSet;
use crate::error::{invalid, Error, Result};
use crate::geometry::LargeScaleGains;
use crate::numerics::{dot, ComplexVector, RngStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SchemeId {
    Tdma,
    Noma,
    Fdma,
    TdmaIrs,
    FdmaRp,
    FdmaNear,
    FdmaFar,
    FdmaEus,
    FdmaRu,
}

impl SchemeId {
    pub const ALL: [SchemeId; 9] = [
        SchemeId::Tdma,
        SchemeId::Noma,
        SchemeId::Fdma,
        SchemeId::TdmaIrs,
        SchemeId::FdmaRp,
        SchemeId::FdmaNear,
        SchemeId::FdmaFar,
        SchemeId::FdmaEus,
        SchemeId::FdmaRu,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeId::Tdma => "TDMA",
            SchemeId::Noma => "NOMA",
            SchemeId::Fdma => "FDMA",
            SchemeId::TdmaIrs => "TDMA-IRS",
            SchemeId::FdmaRp => "FDMA-RP",
            SchemeId::FdmaNear => "FDMA-Near",
            SchemeId::FdmaFar => "FDMA-Far",
            SchemeId::FdmaEus => "FDMA-EUS",
            SchemeId::FdmaRu => "FDMA-RU",
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeId {
    type Err = Error;
    /// Case-insensitive; `_` and `-` are interchangeable.
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('_', "-");
        SchemeId::ALL
            .into_iter()
            .find(|id| id.name().to_ascii_uppercase() == norm)
            .ok_or_else(|| Error::Config(format!("unknown scheme `{s}`")))
    }
}

impl TryFrom<String> for SchemeId {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SchemeId> for String {
    fn from(s: SchemeId) -> String {
        s.name().to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateResult {
    pub scheme: SchemeId,
    pub sum_rate: f64,
    pub per_user_rates: Vec<f64>,
    /// User the IRS was optimized for, if any.
    pub selected_user: Option<usize>,
}

impl RateResult {
    fn from_rates(
        scheme: SchemeId,
        per_user_rates: Vec<f64>,
        selected_user: Option<usize>,
    ) -> Self {
        Self {
            scheme,
            sum_rate: per_user_rates.iter().sum(),
            per_user_rates,
            selected_user,
        }
    }
}

/// NOMA power split across users.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PowerAllocation {
    /// `"auto"`: `α_k ∝ 1/‖f_k‖²`, normalized to sum to one.
    Rule(AllocationRule),
    /// Explicit per-user coefficients.
    Fixed(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AllocationRule {
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NomaConfig {
    pub power_coefficients: PowerAllocation,
}

impl Default for NomaConfig {
    fn default() -> Self {
        Self {
            power_coefficients: PowerAllocation::Rule(AllocationRule::Auto),
        }
    }
}

impl NomaConfig {
    pub fn fixed(alpha: Vec<f64>) -> Self {
        Self {
            power_coefficients: PowerAllocation::Fixed(alpha),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let PowerAllocation::Fixed(a) = &self.power_coefficients {
            check_alpha(a)?;
        }
        Ok(())
    }

    fn coefficients(&self, direct_gains: &[f64]) -> Result<Vec<f64>> {
        match &self.power_coefficients {
            PowerAllocation::Rule(AllocationRule::Auto) => {
                let inv: Vec<f64> = direct_gains.iter().map(|g| 1.0 / g).collect();
                let total: f64 = inv.iter().sum();
                Ok(inv.iter().map(|v| v / total).collect())
            }
            PowerAllocation::Fixed(a) => {
                if a.len() != direct_gains.len() {
                    return Err(Error::Config(format!(
                        "NOMA needs {} power coefficients, got {}",
                        direct_gains.len(),
                        a.len()
                    )));
                }
                check_alpha(a)?;
                Ok(a.clone())
            }
        }
    }
}

fn check_alpha(a: &[f64]) -> Result<()> {
    if a.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
        return Err(Error::Config("NOMA power coefficients must be >= 0".into()));
    }
    let s: f64 = a.iter().sum();
    if s > 1.0 + 1e-12 {
        return Err(Error::Config(format!(
            "NOMA power coefficients sum to {s} > 1"
        )));
    }
    Ok(())
}

/// Transmit power and noise, both in watts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub pd_watts: f64,
    pub sigma_n2_watts: f64,
}

impl LinkBudget {
    pub fn new(pd_watts: f64, sigma_n2_watts: f64) -> Result<Self> {
        if !(pd_watts >= 0.0) || !(sigma_n2_watts > 0.0) {
            return invalid(format!(
                "need pd >= 0 and noise > 0, got pd={pd_watts} noise={sigma_n2_watts}"
            ));
        }
        Ok(Self {
            pd_watts,
            sigma_n2_watts,
        })
    }

    pub fn snr(&self, gain: f64) -> f64 {
        self.pd_watts * gain / self.sigma_n2_watts
    }
}

/// Rate of one FDMA user on a `1/K` subchannel. Per-subchannel power and
/// noise both scale by `1/K`, so only the bandwidth factor remains.
pub fn fdma_user_rate(
    effective_gain: f64,
    pd_watts: f64,
    sigma_n2_watts: f64,
    k_users: usize,
) -> f64 {
    (1.0 + pd_watts * effective_gain / sigma_n2_watts).log2() / k_users as f64
}

fn mrt_gain(c: &ComplexVector) -> Result<f64> {
    let w = mrt_beamformer(c)?;
    Ok(dot(c, w.vector())?.norm_sqr())
}

fn check_users(ch: &ChannelSet) -> Result<usize> {
    match ch.n_users() {
        0 => invalid("need at least one user"),
        k => Ok(k),
    }
}

/// FDMA sum rate with one common reflection for every subchannel and
/// per-user MRT against that reflection.
pub fn fdma_sum_rate(
    scheme: SchemeId,
    ch: &ChannelSet,
    theta: &ReflectionState,
    budget: LinkBudget,
    k_hat: Option<usize>,
) -> Result<RateResult> {
    let k = check_users(ch)?;
    let rates =
        ch.g.iter()
            .zip(&ch.f)
            .map(|(g, f)| {
                let c = effective_channel(g, theta, &ch.h, f)?;
                Ok(fdma_user_rate(
                    mrt_gain(&c)?,
                    budget.pd_watts,
                    budget.sigma_n2_watts,
                    k,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
    Ok(RateResult::from_rates(scheme, rates, k_hat))
}

fn direct_link_rates(ch: &ChannelSet, budget: LinkBudget) -> Result<Vec<f64>> {
    let k = check_users(ch)?;
    ch.f.iter()
        .map(|f| {
            Ok(fdma_user_rate(
                mrt_gain(f)?,
                budget.pd_watts,
                budget.sigma_n2_watts,
                k,
            ))
        })
        .collect()
}

/// FDMA without IRS: direct-link MRT on each `1/K` subchannel.
pub fn fdma_noirs_sum_rate(ch: &ChannelSet, budget: LinkBudget) -> Result<RateResult> {
    Ok(RateResult::from_rates(
        SchemeId::Fdma,
        direct_link_rates(ch, budget)?,
        None,
    ))
}

/// TDMA without IRS: each user gets a `1/K` slot at full power and band.
pub fn tdma_noirs_sum_rate(ch: &ChannelSet, budget: LinkBudget) -> Result<RateResult> {
    Ok(RateResult::from_rates(
        SchemeId::Tdma,
        direct_link_rates(ch, budget)?,
        None,
    ))
}

/// Power-domain NOMA without IRS, ideal SIC, weakest user decoded first.
pub fn noma_sum_rate(ch: &ChannelSet, budget: LinkBudget, cfg: &NomaConfig) -> Result<RateResult> {
    let k = check_users(ch)?;
    let gains: Vec<f64> = ch.f.iter().map(|f| f.norm_sqr()).collect();
    if gains.iter().any(|&g| !(g > 0.0)) {
        return Err(Error::DegenerateChannel(
            "NOMA needs nonzero direct links".into(),
        ));
    }
    let alpha = cfg.coefficients(&gains)?;
    let beams =
        ch.f.iter()
            .map(mrt_beamformer)
            .collect::<Result<Vec<_>>>()?;

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| gains[a].total_cmp(&gains[b]).then(a.cmp(&b)));

    let mut rates = vec![0.0; k];
    for (pos, &user) in order.iter().enumerate() {
        let f = &ch.f[user];
        let signal = alpha[user] * budget.pd_watts * dot(f, beams[user].vector())?.norm_sqr();
        let mut interference = 0.0;
        for &later in &order[pos + 1..] {
            interference +=
                alpha[later] * budget.pd_watts * dot(f, beams[later].vector())?.norm_sqr();
        }
        rates[user] = (1.0 + signal / (budget.sigma_n2_watts + interference)).log2();
    }
    Ok(RateResult::from_rates(SchemeId::Noma, rates, None))
}

/// TDMA with a reflection re-optimized for each slot's user.
pub fn tdma_irs_sum_rate(
    ch: &ChannelSet,
    budget: LinkBudget,
    ao: &AoOptions,
) -> Result<RateResult> {
    SchemeEvaluator::new(ch, budget, ao).tdma_irs()
}

/// Best IRS-aided user by exhaustive search; ties go to the lowest index.
pub fn schedule_exhaustive(
    ch: &ChannelSet,
    budget: LinkBudget,
    ao: &AoOptions,
) -> Result<(usize, RateResult)> {
    let mut ev = SchemeEvaluator::new(ch, budget, ao);
    let r = ev.exhaustive()?;
    Ok((
        r.selected_user.expect("exhaustive search selects a user"),
        r,
    ))
}

fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// User with the largest `E‖g_k‖² = N·σ_g²(k)`. `N` is common to all users,
/// so the comparison uses `σ_g²` directly.
pub fn schedule_nearest(gains: &LargeScaleGains) -> usize {
    argmax_first(&gains.sigma_g2)
}

/// User with the smallest `E‖g_k‖²`.
pub fn schedule_farthest(gains: &LargeScaleGains) -> usize {
    let neg: Vec<f64> = gains.sigma_g2.iter().map(|v| -v).collect();
    argmax_first(&neg)
}

pub fn schedule_random(k_users: usize, rng: &mut RngStream) -> Result<usize> {
    if k_users == 0 {
        return invalid("need at least one user");
    }
    Ok(rng.index(k_users))
}

/// Per-drop random choices that are independent of the channel.
#[derive(Debug, Clone, PartialEq)]
pub struct DropRandomness {
    pub random_reflection: ReflectionState,
    pub random_user: usize,
}

/// Evaluates schemes on one channel realization, sharing alternating
/// optimization results between schemes that tune the IRS for the same user.
pub struct SchemeEvaluator<'a> {
    ch: &'a ChannelSet,
    budget: LinkBudget,
    ao: &'a AoOptions,
    joint: Vec<Option<AoResult>>,
    common: Vec<Option<RateResult>>,
}

impl<'a> SchemeEvaluator<'a> {
    pub fn new(ch: &'a ChannelSet, budget: LinkBudget, ao: &'a AoOptions) -> Self {
        let k = ch.n_users();
        Self {
            ch,
            budget,
            ao,
            joint: vec![None; k],
            common: vec![None; k],
        }
    }

    pub fn channels(&self) -> &ChannelSet {
        self.ch
    }

    /// Joint reflection/beamformer optimization for `user`.
    pub fn joint(&mut self, user: usize) -> Result<&AoResult> {
        if self.joint[user].is_none() {
            let r = alternating_optimize(&self.ch.g[user], &self.ch.h, &self.ch.f[user], self.ao)?;
            self.joint[user] = Some(r);
        }
        Ok(self.joint[user].as_ref().expect("filled above"))
    }

    /// FDMA sum rate `C(user)` with the IRS tuned for `user`.
    pub fn fdma_tuned_for(&mut self, user: usize) -> Result<RateResult> {
        if self.common[user].is_none() {
            let theta = self.joint(user)?.reflection.clone();
            let r = fdma_sum_rate(SchemeId::FdmaEus, self.ch, &theta, self.budget, Some(user))?;
            self.common[user] = Some(r);
        }
        Ok(self.common[user].clone().expect("filled above"))
    }

    fn tagged(&mut self, scheme: SchemeId, user: usize) -> Result<RateResult> {
        let mut r = self.fdma_tuned_for(user)?;
        r.scheme = scheme;
        Ok(r)
    }

    pub fn exhaustive(&mut self) -> Result<RateResult> {
        let k = check_users(self.ch)?;
        let mut best = self.fdma_tuned_for(0)?;
        for user in 1..k {
            let r = self.fdma_tuned_for(user)?;
            if r.sum_rate > best.sum_rate {
                best = r;
            }
        }
        best.scheme = SchemeId::FdmaEus;
        Ok(best)
    }

    pub fn tdma_irs(&mut self) -> Result<RateResult> {
        let k = check_users(self.ch)?;
        let budget = self.budget;
        let rates = (0..k)
            .map(|user| {
                let gain = self.joint(user)?.objective();
                Ok(fdma_user_rate(
                    gain,
                    budget.pd_watts,
                    budget.sigma_n2_watts,
                    k,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RateResult::from_rates(SchemeId::TdmaIrs, rates, None))
    }

    pub fn evaluate(
        &mut self,
        scheme: SchemeId,
        noma: &NomaConfig,
        random: &DropRandomness,
    ) -> Result<RateResult> {
        match scheme {
            SchemeId::Tdma => tdma_noirs_sum_rate(self.ch, self.budget),
            SchemeId::Fdma => fdma_noirs_sum_rate(self.ch, self.budget),
            SchemeId::Noma => noma_sum_rate(self.ch, self.budget, noma),
            SchemeId::TdmaIrs => self.tdma_irs(),
            SchemeId::FdmaRp => fdma_sum_rate(
                SchemeId::FdmaRp,
                self.ch,
                &random.random_reflection,
                self.budget,
                None,
            ),
            SchemeId::FdmaNear => {
                let u = schedule_nearest(&self.ch.gains);
                self.tagged(SchemeId::FdmaNear, u)
            }
            SchemeId::FdmaFar => {
                let u = schedule_farthest(&self.ch.gains);
                self.tagged(SchemeId::FdmaFar, u)
            }
            SchemeId::FdmaEus => self.exhaustive(),
            SchemeId::FdmaRu => self.tagged(SchemeId::FdmaRu, random.random_user),
        }
    }
}
