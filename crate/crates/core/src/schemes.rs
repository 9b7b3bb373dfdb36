//! Analytic average service rates for the four access schemes under a
//! backlogged secondary transmitter.
//!
//! The primary queue is served when the primary packet survives both the
//! channel and any secondary interference; the secondary queue is served in
//! slots where the primary queue is empty. The empty-queue probability is
//! `1 - lambda_p / mu_p`, which makes every secondary rate a function of the
//! primary arrival rate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phy::{misdetection_prob, success_prob, LinkParams, SensingModel};

/// Access scheme identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Sense, then transmit with probability one on an idle declaration.
    Conventional,
    /// Sense, then transmit with probability `idle_access` on idle only.
    IdleOnly,
    /// Sense, then transmit with probability `idle_access` on idle and
    /// `busy_access` on busy.
    IdleBusy,
    /// No sensing; transmit with probability `idle_access` every slot.
    NoSensing,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::NoSensing,
        Scheme::Conventional,
        Scheme::IdleOnly,
        Scheme::IdleBusy,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Conventional => "conventional",
            Scheme::IdleOnly => "idle_only",
            Scheme::IdleBusy => "idle_busy",
            Scheme::NoSensing => "no_sensing",
        }
    }

    pub fn parse(s: &str) -> Result<Scheme> {
        match s {
            "conventional" => Ok(Scheme::Conventional),
            "idle_only" => Ok(Scheme::IdleOnly),
            "idle_busy" => Ok(Scheme::IdleBusy),
            "no_sensing" => Ok(Scheme::NoSensing),
            _ => Err(Error::Config(format!(
                "unknown scheme {s:?}; expected one of conventional, idle_only, idle_busy, no_sensing"
            ))),
        }
    }

    pub fn uses_sensing(&self) -> bool {
        !matches!(self, Scheme::NoSensing)
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How link success probabilities are produced.
///
/// `Constant` fixes both probabilities regardless of the sensing duration;
/// `Physical` derives them from the link parameters, with the secondary value
/// shrinking as sensing eats into the transmission window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SuccessModel {
    Constant { p_ppd: f64, p_ssd: f64 },
    Physical,
}

/// All physical and MAC parameters of one primary+secondary link pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkEnv {
    pub primary_link: LinkParams,
    pub secondary_link: LinkParams,
    pub sensing: SensingModel,
    pub success: SuccessModel,
}

impl NetworkEnv {
    pub fn validate(&self) -> Result<()> {
        self.primary_link.validate()?;
        self.secondary_link.validate()?;
        self.sensing.validate()?;
        if let SuccessModel::Constant { p_ppd, p_ssd } = self.success {
            for (name, p) in [("success.p_ppd", p_ppd), ("success.p_ssd", p_ssd)] {
                if !(0.0..=1.0).contains(&p) || !p.is_finite() {
                    return Err(Error::InvalidParam(format!(
                        "{name} must be a probability in [0,1], got {p}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Primary-link success probability (always at `tau = 0`).
    pub fn p_success_primary(&self) -> Result<f64> {
        match self.success {
            SuccessModel::Constant { p_ppd, .. } => Ok(p_ppd),
            SuccessModel::Physical => success_prob(&self.primary_link, 0.0),
        }
    }

    /// Secondary-link success probability after sensing for `tau` seconds.
    pub fn p_success_secondary(&self, tau: f64) -> Result<f64> {
        match self.success {
            SuccessModel::Constant { p_ssd, .. } => {
                if tau < 0.0 || tau >= self.secondary_link.slot_duration {
                    return Err(Error::Domain(format!(
                        "tau = {tau} outside [0, slot_duration)"
                    )));
                }
                Ok(p_ssd)
            }
            SuccessModel::Physical => success_prob(&self.secondary_link, tau),
        }
    }

    pub fn p_misdetect(&self, tau: f64) -> Result<f64> {
        misdetection_prob(&self.sensing, tau)
    }

    pub fn p_false_alarm(&self) -> f64 {
        self.sensing.p_fa()
    }

    pub fn slot_duration(&self) -> f64 {
        self.secondary_link.slot_duration
    }

    /// Short hex digest of the environment parameters, used to tag emitted
    /// region curves with their generating environment.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut hasher = Sha256::new();
        hasher.update(format!("{self:?}"));
        hex::encode(&hasher.finalize()[..8])
    }
}

/// Access scheme plus its knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccessPolicy {
    pub scheme: Scheme,
    /// Sensing duration in seconds (0 for [`Scheme::NoSensing`]).
    pub tau: f64,
    /// Transmit probability after an idle declaration (every slot for
    /// [`Scheme::NoSensing`]).
    pub idle_access: f64,
    /// Transmit probability after a busy declaration.
    pub busy_access: f64,
}

impl AccessPolicy {
    pub fn conventional(tau: f64) -> Self {
        Self { scheme: Scheme::Conventional, tau, idle_access: 1.0, busy_access: 0.0 }
    }

    pub fn idle_only(tau: f64, idle_access: f64) -> Self {
        Self { scheme: Scheme::IdleOnly, tau, idle_access, busy_access: 0.0 }
    }

    pub fn idle_busy(tau: f64, idle_access: f64, busy_access: f64) -> Self {
        Self { scheme: Scheme::IdleBusy, tau, idle_access, busy_access }
    }

    pub fn no_sensing(idle_access: f64) -> Self {
        Self { scheme: Scheme::NoSensing, tau: 0.0, idle_access, busy_access: 0.0 }
    }

    /// A policy under which the secondary never transmits.
    pub fn silent(scheme: Scheme) -> Self {
        Self { scheme, tau: 0.0, idle_access: 0.0, busy_access: 0.0 }
    }

    pub fn validate(&self, env: &NetworkEnv) -> Result<()> {
        for (name, p) in [("idle_access", self.idle_access), ("busy_access", self.busy_access)] {
            if !(0.0..=1.0).contains(&p) || !p.is_finite() {
                return Err(Error::InvalidParam(format!(
                    "{name} must be a probability in [0,1], got {p}"
                )));
            }
        }
        if !self.tau.is_finite() || self.tau < 0.0 || self.tau >= env.slot_duration() {
            return Err(Error::InvalidParam(format!(
                "tau = {} outside [0, slot_duration)",
                self.tau
            )));
        }
        match self.scheme {
            Scheme::Conventional => {
                if self.idle_access != 1.0 || self.busy_access != 0.0 {
                    return Err(Error::InvalidParam(
                        "conventional scheme forces idle_access = 1, busy_access = 0".into(),
                    ));
                }
            }
            Scheme::IdleOnly => {
                if self.busy_access != 0.0 {
                    return Err(Error::InvalidParam(
                        "idle_only scheme forces busy_access = 0".into(),
                    ));
                }
            }
            Scheme::IdleBusy => {}
            Scheme::NoSensing => {
                if self.tau != 0.0 {
                    return Err(Error::InvalidParam("no_sensing scheme forces tau = 0".into()));
                }
            }
        }
        Ok(())
    }
}

/// Average service rates of the primary and secondary queues, packets/slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ServiceRates {
    pub mu_p: f64,
    pub mu_s: f64,
    /// True iff `lambda_p <= mu_p` held at evaluation.
    pub feasible: bool,
}

/// `1 - lambda_p / mu_p`, the stationary probability of an empty primary
/// queue, clamped to a total function: an overloaded primary yields 0 and an
/// infeasible flag.
fn empty_queue_factor(lambda_p: f64, mu_p: f64) -> (f64, bool) {
    if lambda_p <= 0.0 {
        return (1.0, true);
    }
    if mu_p <= 0.0 || lambda_p > mu_p {
        return (0.0, false);
    }
    (1.0 - lambda_p / mu_p, true)
}

fn check_lambda_p(lambda_p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lambda_p) || !lambda_p.is_finite() {
        return Err(Error::InvalidParam(format!(
            "lambda_p must be in [0,1] packets/slot, got {lambda_p}"
        )));
    }
    Ok(())
}

/// Service rates for the conventional scheme: sense for `tau`, transmit with
/// probability one on an idle declaration.
pub fn rates_conventional(env: &NetworkEnv, tau: f64, lambda_p: f64) -> Result<ServiceRates> {
    check_lambda_p(lambda_p)?;
    let p_md = env.p_misdetect(tau)?;
    let mu_p = env.p_success_primary()? * (1.0 - p_md);
    let (empty, feasible) = empty_queue_factor(lambda_p, mu_p);
    let mu_s = env.p_success_secondary(tau)? * (1.0 - env.p_false_alarm()) * empty;
    Ok(ServiceRates { mu_p, mu_s, feasible })
}

/// Service rates when the secondary transmits with probability `idle_access`
/// on an idle declaration and stays silent on a busy declaration.
pub fn rates_idle_only(
    env: &NetworkEnv,
    tau: f64,
    idle_access: f64,
    lambda_p: f64,
) -> Result<ServiceRates> {
    check_lambda_p(lambda_p)?;
    let p_md = env.p_misdetect(tau)?;
    let mu_p = env.p_success_primary()? * (1.0 - idle_access * p_md);
    let (empty, feasible) = empty_queue_factor(lambda_p, mu_p);
    let mu_s =
        idle_access * env.p_success_secondary(tau)? * (1.0 - env.p_false_alarm()) * empty;
    Ok(ServiceRates { mu_p, mu_s, feasible })
}

/// Service rates when the secondary transmits with probability `idle_access`
/// on idle and `busy_access` on busy declarations.
pub fn rates_idle_busy(
    env: &NetworkEnv,
    tau: f64,
    idle_access: f64,
    busy_access: f64,
    lambda_p: f64,
) -> Result<ServiceRates> {
    check_lambda_p(lambda_p)?;
    let p_md = env.p_misdetect(tau)?;
    let mu_p = env.p_success_primary()?
        * (p_md * (1.0 - idle_access) + (1.0 - p_md) * (1.0 - busy_access));
    let (empty, feasible) = empty_queue_factor(lambda_p, mu_p);
    let p_fa = env.p_false_alarm();
    let mu_s = env.p_success_secondary(tau)?
        * (idle_access * (1.0 - p_fa) + busy_access * p_fa)
        * empty;
    Ok(ServiceRates { mu_p, mu_s, feasible })
}

/// Service rates for sensing-free random access with probability
/// `idle_access` every slot.
pub fn rates_no_sensing(env: &NetworkEnv, idle_access: f64, lambda_p: f64) -> Result<ServiceRates> {
    check_lambda_p(lambda_p)?;
    let mu_p = (1.0 - idle_access) * env.p_success_primary()?;
    let (empty, feasible) = empty_queue_factor(lambda_p, mu_p);
    let mu_s = idle_access * env.p_success_secondary(0.0)? * empty;
    Ok(ServiceRates { mu_p, mu_s, feasible })
}

/// Service rates for an arbitrary validated policy.
pub fn service_rates(env: &NetworkEnv, policy: &AccessPolicy, lambda_p: f64) -> Result<ServiceRates> {
    policy.validate(env)?;
    match policy.scheme {
        Scheme::Conventional => rates_conventional(env, policy.tau, lambda_p),
        Scheme::IdleOnly => rates_idle_only(env, policy.tau, policy.idle_access, lambda_p),
        Scheme::IdleBusy => {
            rates_idle_busy(env, policy.tau, policy.idle_access, policy.busy_access, lambda_p)
        }
        Scheme::NoSensing => rates_no_sensing(env, policy.idle_access, lambda_p),
    }
}

/// Closed-form boundary of the sensing-free scheme: the maximum over the
/// access probability of the secondary service rate.
pub fn boundary_no_sensing(env: &NetworkEnv, lambda_p: f64) -> Result<ServiceRates> {
    check_lambda_p(lambda_p)?;
    let p_ppd = env.p_success_primary()?;
    let p_ssd = env.p_success_secondary(0.0)?;
    if lambda_p > p_ppd {
        return Ok(ServiceRates { mu_p: p_ppd, mu_s: 0.0, feasible: false });
    }
    let root = if p_ppd > 0.0 { (lambda_p / p_ppd).sqrt() } else { 0.0 };
    let boundary = p_ssd * (1.0 - root) * (1.0 - root);
    Ok(ServiceRates { mu_p: p_ppd, mu_s: boundary, feasible: true })
}
