//! Closed-form physical-layer quantities.
//!
//! Transmission rate and Rayleigh-fading success probability as functions of
//! the sensing duration, plus the sensing receiver operating characteristic:
//! misdetection probability for a target false-alarm probability.

use serde::{Deserialize, Serialize};
use statrs::function::erf;

use crate::error::{Error, Result};

/// Parameters of one transmitter-receiver link.
///
/// Packet size, slot length, and bandwidth fix the required rate; the mean
/// SNR and mean channel gain fix the Rayleigh outage probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkParams {
    /// Packet size in bits.
    pub bits_per_packet: f64,
    /// Slot duration in seconds.
    pub slot_duration: f64,
    /// Channel bandwidth in Hz.
    pub bandwidth: f64,
    /// Received SNR at unit channel gain (dimensionless ratio).
    pub snr: f64,
    /// Mean of the exponentially distributed channel gain.
    pub mean_gain: f64,
}

impl LinkParams {
    pub fn new(
        bits_per_packet: f64,
        slot_duration: f64,
        bandwidth: f64,
        snr: f64,
        mean_gain: f64,
    ) -> Result<Self> {
        let link = Self {
            bits_per_packet,
            slot_duration,
            bandwidth,
            snr,
            mean_gain,
        };
        link.validate()?;
        Ok(link)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("bits_per_packet", self.bits_per_packet),
            ("slot_duration", self.slot_duration),
            ("bandwidth", self.bandwidth),
            ("snr", self.snr),
            ("mean_gain", self.mean_gain),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParam(format!(
                    "{name} must be strictly positive and finite, got {v}"
                )));
            }
        }
        let load = self.bits_per_packet / (self.slot_duration * self.bandwidth);
        if !load.is_finite() {
            return Err(Error::InvalidParam(
                "bits_per_packet / (slot_duration * bandwidth) is not finite".into(),
            ));
        }
        Ok(())
    }
}

/// How sensing errors are produced.
///
/// `Exogenous` fixes both error probabilities as constants independent of the
/// sensing duration. `Roc` ties the misdetection probability to the sensing
/// duration through the energy-detector operating characteristic for a fixed
/// target false-alarm probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SensingModel {
    Exogenous { p_fa: f64, p_md: f64 },
    Roc { p_fa: f64, sampling_freq: f64, sensing_snr: f64 },
}

impl SensingModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SensingModel::Exogenous { p_fa, p_md } => {
                check_prob("p_fa", p_fa)?;
                check_prob("p_md", p_md)?;
            }
            SensingModel::Roc { p_fa, sampling_freq, sensing_snr } => {
                check_prob("p_fa", p_fa)?;
                if !(sampling_freq > 0.0) || !sampling_freq.is_finite() {
                    return Err(Error::InvalidParam(format!(
                        "sampling_freq must be strictly positive, got {sampling_freq}"
                    )));
                }
                if !(sensing_snr > 0.0) || !sensing_snr.is_finite() {
                    return Err(Error::InvalidParam(format!(
                        "sensing_snr must be strictly positive, got {sensing_snr}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// False-alarm probability (target value in ROC mode).
    pub fn p_fa(&self) -> f64 {
        match *self {
            SensingModel::Exogenous { p_fa, .. } | SensingModel::Roc { p_fa, .. } => p_fa,
        }
    }
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
        return Err(Error::InvalidParam(format!(
            "{name} must be a probability in [0,1], got {p}"
        )));
    }
    Ok(())
}

/// Rate needed to fit one packet into the post-sensing remainder of a slot.
pub fn transmission_rate(link: &LinkParams, tau: f64) -> Result<f64> {
    check_tau(link, tau)?;
    Ok(link.bits_per_packet / (link.slot_duration - tau))
}

/// Probability the packet is received correctly: the transmission rate does
/// not exceed the instantaneous Rayleigh channel capacity.
///
/// The primary link uses this with `tau = 0`.
pub fn success_prob(link: &LinkParams, tau: f64) -> Result<f64> {
    check_tau(link, tau)?;
    let rate = link.bits_per_packet / (link.slot_duration - tau);
    let threshold = ((rate / link.bandwidth).exp2() - 1.0) / (link.snr * link.mean_gain);
    Ok((-threshold).exp())
}

fn check_tau(link: &LinkParams, tau: f64) -> Result<()> {
    if !tau.is_finite() || tau < 0.0 {
        return Err(Error::Domain(format!("tau must be finite and >= 0, got {tau}")));
    }
    if tau >= link.slot_duration {
        return Err(Error::Domain(format!(
            "no transmission time remains: tau = {tau} >= slot_duration = {}",
            link.slot_duration
        )));
    }
    Ok(())
}

/// Standard normal complementary CDF.
pub fn gaussian_tail(x: f64) -> f64 {
    0.5 * erf::erfc(x / std::f64::consts::SQRT_2)
}

/// Inverse of [`gaussian_tail`] on (0, 1).
///
/// Rational approximation followed by two Newton refinements; absolute error
/// below 1e-9 across the open interval.
pub fn gaussian_tail_inverse(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!(
            "gaussian_tail_inverse requires p in (0,1), got {p}"
        )));
    }
    let mut x = std::f64::consts::SQRT_2 * erf::erfc_inv(2.0 * p);
    for _ in 0..2 {
        let pdf = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        if pdf == 0.0 {
            break;
        }
        x += (gaussian_tail(x) - p) / pdf;
    }
    Ok(x)
}

/// Misdetection probability after sensing for `tau` seconds.
///
/// In ROC mode the detection threshold is set for the target false-alarm
/// probability and the misdetection probability falls as the sensing window
/// grows; in exogenous mode `tau` is ignored.
pub fn misdetection_prob(sensing: &SensingModel, tau: f64) -> Result<f64> {
    if !tau.is_finite() || tau < 0.0 {
        return Err(Error::Domain(format!("tau must be finite and >= 0, got {tau}")));
    }
    match *sensing {
        SensingModel::Exogenous { p_md, .. } => Ok(p_md),
        SensingModel::Roc { p_fa, sampling_freq, sensing_snr } => {
            let q_inv = gaussian_tail_inverse(p_fa)?;
            let arg = (q_inv - (tau * sampling_freq).sqrt() * sensing_snr)
                / (2.0 * sensing_snr + 1.0).sqrt();
            Ok((1.0 - gaussian_tail(arg)).clamp(0.0, 1.0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn link(b: f64, t: f64, w: f64, snr: f64, gain: f64) -> LinkParams {
        LinkParams::new(b, t, w, snr, gain).unwrap()
    }

    #[test]
    fn rate_at_zero_tau_is_packet_over_slot() {
        let l = link(1000.0, 1.0, 100.0, 1.0, 1.0);
        assert_eq!(transmission_rate(&l, 0.0).unwrap(), 1000.0);
    }

    #[test]
    fn rate_with_half_slot_sensing_doubles() {
        let l = link(1000.0, 1.0, 100.0, 1.0, 1.0);
        assert_eq!(transmission_rate(&l, 0.5).unwrap(), 2000.0);
    }

    #[test]
    fn rate_rejects_full_slot_sensing() {
        let l = link(1000.0, 1.0, 100.0, 1.0, 1.0);
        assert!(matches!(transmission_rate(&l, 1.0), Err(Error::Domain(_))));
        assert!(matches!(success_prob(&l, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn success_prob_unit_threshold() {
        // b/(T W) = 1 bit/s/Hz with unit snr*gain: exp(-(2-1)/1) = exp(-1).
        let l = link(100.0, 1.0, 100.0, 1.0, 1.0);
        let p = success_prob(&l, 0.0).unwrap();
        assert!((p - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn success_prob_approaches_one_at_high_snr() {
        let l = link(100.0, 1.0, 100.0, 1e9, 1.0);
        assert!(success_prob(&l, 0.0).unwrap() > 1.0 - 1e-8);
    }

    #[test]
    fn gaussian_tail_symmetry() {
        assert!((gaussian_tail(0.0) - 0.5).abs() < 1e-15);
        assert!(gaussian_tail_inverse(0.5).unwrap().abs() < 1e-12);
    }

    #[test]
    fn gaussian_tail_five_percent_point() {
        assert!((gaussian_tail(1.6449) - 0.05).abs() < 1e-4);
    }

    #[test]
    fn gaussian_tail_inverse_rejects_endpoints() {
        assert!(gaussian_tail_inverse(0.0).is_err());
        assert!(gaussian_tail_inverse(1.0).is_err());
    }

    #[test]
    fn gaussian_tail_inverse_round_trip() {
        for &p in &[1e-9, 1e-6, 0.01, 0.2, 0.5, 0.8, 0.99, 1.0 - 1e-9] {
            let x = gaussian_tail_inverse(p).unwrap();
            assert!(
                (gaussian_tail(x) - p).abs() < 1e-10,
                "round trip failed at p = {p}"
            );
        }
    }

    #[test]
    fn misdetection_roc_at_zero_tau_complements_target() {
        let s = SensingModel::Roc { p_fa: 0.5, sampling_freq: 1000.0, sensing_snr: 1.0 };
        assert!((misdetection_prob(&s, 0.0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn misdetection_roc_matches_hand_evaluation() {
        // P_FA = 0.2, snr = 1, f_s = 1000, tau = 1e-3:
        // 1 - Q((Q^{-1}(0.2) - 1) / sqrt(3)).
        let s = SensingModel::Roc { p_fa: 0.2, sampling_freq: 1000.0, sensing_snr: 1.0 };
        let expected = 1.0 - gaussian_tail((gaussian_tail_inverse(0.2).unwrap() - 1.0) / 3f64.sqrt());
        let got = misdetection_prob(&s, 1e-3).unwrap();
        assert!((got - expected).abs() < 1e-12);
        assert!((got - 0.4636).abs() < 5e-4);
    }

    #[test]
    fn misdetection_exogenous_ignores_tau() {
        let s = SensingModel::Exogenous { p_fa: 0.2, p_md: 0.3 };
        assert_eq!(misdetection_prob(&s, 0.0).unwrap(), 0.3);
        assert_eq!(misdetection_prob(&s, 0.42).unwrap(), 0.3);
    }

    #[test]
    fn misdetection_monotone_in_tau() {
        let s = SensingModel::Roc { p_fa: 0.2, sampling_freq: 500.0, sensing_snr: 0.7 };
        let mut prev = f64::INFINITY;
        for i in 0..1000 {
            let tau = 0.5 * i as f64 / 999.0;
            let p = misdetection_prob(&s, tau).unwrap();
            assert!(p <= prev + 1e-12);
            assert!((0.0..=1.0).contains(&p));
            prev = p;
        }
    }

    #[test]
    fn success_prob_monotone_in_tau() {
        let l = link(500.0, 1.0, 1000.0, 3.0, 1.0);
        let mut prev = f64::INFINITY;
        for i in 0..1000 {
            let tau = 0.9 * i as f64 / 999.0;
            let p = success_prob(&l, tau).unwrap();
            assert!(p <= prev + 1e-15);
            assert!((0.0..=1.0).contains(&p));
            prev = p;
        }
    }

    #[test]
    fn invalid_link_params_rejected() {
        assert!(LinkParams::new(0.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(LinkParams::new(100.0, -1.0, 1.0, 1.0, 1.0).is_err());
        assert!(LinkParams::new(100.0, 1.0, 1.0, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn invalid_sensing_model_rejected() {
        assert!(SensingModel::Exogenous { p_fa: 1.5, p_md: 0.3 }.validate().is_err());
        assert!(SensingModel::Roc { p_fa: 0.2, sampling_freq: 0.0, sensing_snr: 1.0 }
            .validate()
            .is_err());
    }
}
