//! Config-file ingestion.
//!
//! One TOML document describes the network environment, the scheme under
//! study, sweep grid sizes, and simulation settings. Unknown keys are
//! rejected; every omitted key takes a documented default (see the config
//! reference in the README).

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::optimizer::Grids;
use crate::phy::{LinkParams, SensingModel};
use crate::schemes::{NetworkEnv, Scheme, SuccessModel};
use crate::sim::{SecondaryArrivals, SimConfig};

/// Fully validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub env: NetworkEnv,
    pub scheme: Scheme,
    pub grids: Grids,
    pub lambda_p_points: usize,
    pub sim: SimConfig,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    scheme: Option<String>,
    bits_per_packet: Option<f64>,
    slot_duration: Option<f64>,
    bandwidth: Option<f64>,
    snr_p_pd: Option<f64>,
    snr_s_sd: Option<f64>,
    mean_gain_p_pd: Option<f64>,
    mean_gain_s_sd: Option<f64>,
    #[serde(default)]
    sensing: SensingSection,
    #[serde(default)]
    success: SuccessSection,
    #[serde(default)]
    sweep: SweepSection,
    #[serde(default)]
    sim: SimSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SensingSection {
    mode: Option<String>,
    p_fa: Option<f64>,
    p_md: Option<f64>,
    f_s: Option<f64>,
    snr: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SuccessSection {
    mode: Option<String>,
    p_ppd: Option<f64>,
    p_ssd: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    lambda_p_points: Option<usize>,
    tau_points: Option<usize>,
    b_points: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimSection {
    slots: Option<u64>,
    seed: Option<u64>,
    lambda_p: Option<f64>,
    lambda_s: Option<LambdaS>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum LambdaS {
    Rate(f64),
    Marker(String),
}

/// Parse and validate a TOML config document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let file: FileConfig =
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;

    let scheme = match file.scheme.as_deref() {
        Some(s) => Scheme::parse(s)?,
        None => Scheme::IdleBusy,
    };

    let slot_duration = file.slot_duration.unwrap_or(1.0);
    let bits = file.bits_per_packet.unwrap_or(1000.0);
    let bandwidth = file.bandwidth.unwrap_or(1000.0);
    let primary_link = LinkParams::new(
        bits,
        slot_duration,
        bandwidth,
        file.snr_p_pd.unwrap_or(10.0),
        file.mean_gain_p_pd.unwrap_or(1.0),
    )?;
    let secondary_link = LinkParams::new(
        bits,
        slot_duration,
        bandwidth,
        file.snr_s_sd.unwrap_or(10.0),
        file.mean_gain_s_sd.unwrap_or(1.0),
    )?;

    let sensing = match file.sensing.mode.as_deref().unwrap_or("exogenous") {
        "exogenous" => SensingModel::Exogenous {
            p_fa: file.sensing.p_fa.unwrap_or(0.2),
            p_md: file.sensing.p_md.unwrap_or(0.3),
        },
        "roc" => SensingModel::Roc {
            p_fa: file.sensing.p_fa.unwrap_or(0.2),
            sampling_freq: file.sensing.f_s.ok_or_else(|| {
                Error::Config("sensing.mode = \"roc\" requires sensing.f_s".into())
            })?,
            sensing_snr: file.sensing.snr.ok_or_else(|| {
                Error::Config("sensing.mode = \"roc\" requires sensing.snr".into())
            })?,
        },
        other => {
            return Err(Error::Config(format!(
                "sensing.mode must be \"exogenous\" or \"roc\", got {other:?}"
            )))
        }
    };

    let success = match file.success.mode.as_deref().unwrap_or("physical") {
        "physical" => SuccessModel::Physical,
        "constant" => SuccessModel::Constant {
            p_ppd: file.success.p_ppd.unwrap_or(0.9),
            p_ssd: file.success.p_ssd.unwrap_or(0.8),
        },
        other => {
            return Err(Error::Config(format!(
                "success.mode must be \"constant\" or \"physical\", got {other:?}"
            )))
        }
    };

    let env = NetworkEnv { primary_link, secondary_link, sensing, success };
    env.validate()?;

    let grids = Grids {
        tau_points: file.sweep.tau_points.unwrap_or(101),
        b_points: file.sweep.b_points.unwrap_or(101),
    };
    grids.validate()?;
    let lambda_p_points = file.sweep.lambda_p_points.unwrap_or(50);
    if lambda_p_points < 2 {
        return Err(Error::Config(format!(
            "sweep.lambda_p_points must be >= 2, got {lambda_p_points}"
        )));
    }

    let lambda_s = match file.sim.lambda_s {
        None => SecondaryArrivals::Backlogged,
        Some(LambdaS::Rate(r)) => SecondaryArrivals::Bernoulli(r),
        Some(LambdaS::Marker(s)) if s == "backlogged" => SecondaryArrivals::Backlogged,
        Some(LambdaS::Marker(s)) => {
            return Err(Error::Config(format!(
                "sim.lambda_s must be a rate or \"backlogged\", got {s:?}"
            )))
        }
    };
    let sim = SimConfig::new(
        file.sim.slots.unwrap_or(100_000),
        file.sim.seed.unwrap_or(42),
        file.sim.lambda_p.unwrap_or(0.2),
        lambda_s,
    );
    sim.validate()?;

    Ok(RunConfig { env, scheme, grids, lambda_p_points, sim })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document_takes_defaults() {
        let cfg = parse_config("snr_p_pd = 8.0\nsnr_s_sd = 6.0\nscheme = \"conventional\"\n")
            .unwrap();
        assert_eq!(cfg.scheme, Scheme::Conventional);
        assert_eq!(cfg.grids.tau_points, 101);
        assert_eq!(cfg.lambda_p_points, 50);
        assert_eq!(cfg.sim.seed, 42);
        assert!(matches!(cfg.env.success, SuccessModel::Physical));
        assert_eq!(cfg.env.primary_link.snr, 8.0);
    }

    #[test]
    fn out_of_range_probability_names_key() {
        let err = parse_config("[sensing]\np_fa = 1.5\n").unwrap_err();
        assert!(err.to_string().contains("p_fa"), "{err}");
    }

    #[test]
    fn roc_mode_requires_sampling_freq() {
        let err = parse_config("[sensing]\nmode = \"roc\"\nsnr = 0.5\n").unwrap_err();
        assert!(err.to_string().contains("f_s"), "{err}");
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(parse_config("bogus_key = 1\n").is_err());
        assert!(parse_config("[sim]\nbogus = 1\n").is_err());
    }

    #[test]
    fn lambda_s_marker_and_rate() {
        let cfg = parse_config("[sim]\nlambda_s = \"backlogged\"\n").unwrap();
        assert_eq!(cfg.sim.lambda_s, SecondaryArrivals::Backlogged);
        let cfg = parse_config("[sim]\nlambda_s = 0.25\n").unwrap();
        assert_eq!(cfg.sim.lambda_s, SecondaryArrivals::Bernoulli(0.25));
        assert!(parse_config("[sim]\nlambda_s = \"nope\"\n").is_err());
    }

    #[test]
    fn shipped_reference_config_parses() {
        let text = std::fs::read_to_string(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../fig2.cfg"
        ))
        .unwrap();
        let cfg = parse_config(&text).unwrap();
        assert!(matches!(
            cfg.env.sensing,
            SensingModel::Exogenous { p_fa, p_md } if p_fa == 0.2 && p_md == 0.3
        ));
        assert!(matches!(
            cfg.env.success,
            SuccessModel::Constant { p_ppd, p_ssd } if p_ppd == 0.9 && p_ssd == 0.8
        ));
    }
}
