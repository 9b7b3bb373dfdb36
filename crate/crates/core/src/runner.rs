//! Command execution: region curves, optimizer traces, simulation reports,
//! and scheme comparison, emitted as CSV plus a plain-text gnuplot script.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::optimizer::{best_scheme, maximize_scheme, region_curve, RegionCurve};
use crate::schemes::Scheme;
use crate::sim::simulate;

/// CLI command selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Region,
    Optimize,
    Simulate,
    Compare,
}

/// Fixed column order for region/compare outputs.
pub const REGION_HEADER: &str = "scheme,lambda_p,lambda_s_max,tau,a_s,b_s,feasible";

fn region_csv(curve: &RegionCurve) -> String {
    let mut out = String::new();
    out.push_str(REGION_HEADER);
    out.push('\n');
    for row in &curve.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            curve.scheme,
            row.lambda_p,
            row.lambda_s_max,
            row.policy.tau,
            row.policy.idle_access,
            row.policy.busy_access,
            row.feasible
        );
    }
    out
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    Ok(path)
}

/// Run one command; returns the list of files written.
pub fn run(command: Command, cfg: &RunConfig, output_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(output_dir)?;
    let mut written = Vec::new();
    match command {
        Command::Region => {
            let mut plot = plot_header("region boundaries");
            for scheme in Scheme::ALL {
                let curve = region_curve(scheme, &cfg.env, cfg.lambda_p_points, &cfg.grids)?;
                let name = format!("region_{scheme}.csv");
                written.push(write_file(output_dir, &name, &region_csv(&curve))?);
                let _ = writeln!(
                    plot,
                    "# env {}\nplot_curve('{name}', '{scheme}')",
                    curve.env_digest
                );
            }
            written.push(write_file(output_dir, "plot_region.txt", &plot)?);
        }
        Command::Optimize => {
            let curve = region_curve(cfg.scheme, &cfg.env, cfg.lambda_p_points, &cfg.grids)?;
            let mut out = String::from("lambda_p,tau,a_s,b_s,lambda_s_max\n");
            for row in &curve.rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    row.lambda_p,
                    row.policy.tau,
                    row.policy.idle_access,
                    row.policy.busy_access,
                    row.lambda_s_max
                );
            }
            written.push(write_file(output_dir, "optimize.csv", &out)?);
            let mut plot = plot_header("optimal policy trace");
            let _ = writeln!(plot, "plot_curve('optimize.csv', '{}')", cfg.scheme);
            written.push(write_file(output_dir, "plot_optimize.txt", &plot)?);
        }
        Command::Simulate => {
            // Simulate the optimized policy for the configured scheme at the
            // configured primary arrival rate.
            let opt = maximize_scheme(cfg.scheme, &cfg.env, cfg.sim.lambda_p, &cfg.grids)?;
            if !opt.feasible {
                return Err(Error::Infeasible(format!(
                    "scheme {} cannot support lambda_p = {}",
                    cfg.scheme, cfg.sim.lambda_p
                )));
            }
            let report = simulate(&cfg.env, &opt.policy, &cfg.sim)?;
            let mut out = String::from(
                "scheme,lambda_p,tau,a_s,b_s,empirical_mu_p,empirical_mu_s,\
                 empirical_mu_s_uncond,mean_qp,final_qp_trend,final_qs_trend,verdict,seed\n",
            );
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                cfg.scheme,
                cfg.sim.lambda_p,
                opt.policy.tau,
                opt.policy.idle_access,
                opt.policy.busy_access,
                report.empirical_mu_p,
                report.empirical_mu_s,
                report.empirical_mu_s_uncond,
                report.mean_qp,
                report.final_qp_trend,
                report.final_qs_trend,
                report.stability_verdict,
                report.seed_used
            );
            written.push(write_file(output_dir, "simulate.csv", &out)?);
        }
        Command::Compare => {
            let p_ppd = cfg.env.p_success_primary()?;
            let mut out = String::new();
            out.push_str(REGION_HEADER);
            out.push('\n');
            let mut crossover = String::from(
                "lambda_p,no_sensing,dual_short_tau,dual_long_tau,\
                 no_sensing_beats_long_tau,short_tau_beats_no_sensing\n",
            );
            for i in 0..cfg.lambda_p_points {
                let lambda_p = p_ppd * i as f64 / (cfg.lambda_p_points - 1) as f64;
                let (scheme, opt) = best_scheme(&cfg.env, lambda_p, &cfg.grids)?;
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    scheme,
                    lambda_p,
                    opt.lambda_s_max,
                    opt.policy.tau,
                    opt.policy.idle_access,
                    opt.policy.busy_access,
                    opt.feasible
                );
                // Crossover flags: sensing-free vs dual access pinned at the
                // shortest positive and longest grid sensing durations.
                let taus = cfg.grids.tau_grid(&cfg.env);
                let short = fixed_tau_dual(cfg, taus[1], lambda_p)?;
                let long = fixed_tau_dual(cfg, *taus.last().unwrap(), lambda_p)?;
                let free = maximize_scheme(Scheme::NoSensing, &cfg.env, lambda_p, &cfg.grids)?
                    .lambda_s_max;
                let _ = writeln!(
                    crossover,
                    "{},{},{},{},{},{}",
                    lambda_p,
                    free,
                    short,
                    long,
                    free > long,
                    short > free
                );
            }
            written.push(write_file(output_dir, "compare.csv", &out)?);
            written.push(write_file(output_dir, "crossover.csv", &crossover)?);
            let mut plot = plot_header("best scheme per lambda_p");
            let _ = writeln!(plot, "plot_curve('compare.csv', 'best')");
            let _ = writeln!(plot, "plot_curve('crossover.csv', 'crossover')");
            written.push(write_file(output_dir, "plot_compare.txt", &plot)?);
        }
    }
    Ok(written)
}

/// Dual-access boundary at one pinned sensing duration.
fn fixed_tau_dual(cfg: &RunConfig, tau: f64, lambda_p: f64) -> Result<f64> {
    use crate::optimizer::optimal_idle_access_with_busy;
    use crate::schemes::rates_idle_busy;
    let mut best: f64 = 0.0;
    for &b in &cfg.grids.b_grid() {
        let Ok(a) = optimal_idle_access_with_busy(&cfg.env, tau, b, lambda_p) else { continue };
        let r = rates_idle_busy(&cfg.env, tau, a, b, lambda_p)?;
        if r.feasible {
            best = best.max(r.mu_s);
        }
    }
    Ok(best)
}

fn plot_header(title: &str) -> String {
    format!(
        "# gnuplot-style plot script: {title}\n\
         # Each CSV has a one-line header; columns are documented in the README.\n\
         set datafile separator ','\n\
         set key autotitle columnhead\n\
         set xlabel 'lambda_p (packets/slot)'\n\
         set ylabel 'lambda_s_max (packets/slot)'\n"
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn fig_cfg() -> RunConfig {
        let mut cfg = parse_config(include_str!("../../../fig2.cfg")).unwrap();
        cfg.lambda_p_points = 8;
        cfg.grids.tau_points = 3;
        cfg.grids.b_points = 11;
        cfg.sim.slots = 20_000;
        cfg.sim.warmup_slots = 2_000;
        cfg
    }

    #[test]
    fn region_emits_one_csv_per_scheme_plus_plot() {
        let dir = tempfile::tempdir().unwrap();
        let files = run(Command::Region, &fig_cfg(), dir.path()).unwrap();
        assert_eq!(files.len(), 5);
        let text = std::fs::read_to_string(dir.path().join("region_no_sensing.csv")).unwrap();
        assert!(text.starts_with(REGION_HEADER));
        assert_eq!(text.lines().count(), 9);
    }

    #[test]
    fn simulate_is_byte_identical_across_runs() {
        let dir1 = tempfile::tempdir().unwrap();
        let dir2 = tempfile::tempdir().unwrap();
        let cfg = fig_cfg();
        run(Command::Simulate, &cfg, dir1.path()).unwrap();
        run(Command::Simulate, &cfg, dir2.path()).unwrap();
        let a = std::fs::read(dir1.path().join("simulate.csv")).unwrap();
        let b = std::fs::read(dir2.path().join("simulate.csv")).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn compare_emits_rows_and_crossover_flags() {
        let dir = tempfile::tempdir().unwrap();
        run(Command::Compare, &fig_cfg(), dir.path()).unwrap();
        let text = std::fs::read_to_string(dir.path().join("compare.csv")).unwrap();
        assert!(text.starts_with(REGION_HEADER));
        let crossover = std::fs::read_to_string(dir.path().join("crossover.csv")).unwrap();
        assert!(crossover.lines().count() > 1);
    }

    #[test]
    fn optimize_emits_policy_trace() {
        let dir = tempfile::tempdir().unwrap();
        run(Command::Optimize, &fig_cfg(), dir.path()).unwrap();
        let text = std::fs::read_to_string(dir.path().join("optimize.csv")).unwrap();
        assert!(text.starts_with("lambda_p,tau,a_s,b_s,lambda_s_max"));
    }
}
