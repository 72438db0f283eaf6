//! Config files, run directories, suites and the convergence and blow-up
//! studies.

mod config;
mod persist;
mod studies;
mod verifiers;

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

pub use config::{parse_config, parse_config_str, parse_sim_config, to_toml, ConfigFile, ExperimentSuite, ReportKind, SuiteHeader};
pub use persist::{
    bootstrap_text, gronwall_text, identity_text, kv_section, liminf_text, read_diagnostics, read_manifest, run_experiment,
    scattering_report_from_dir, simulate, Manifest, ManifestRun, RunOutcome, CONFIG_FILE, DIAGNOSTICS_FILE, MANIFEST_FILE,
};
pub use studies::{blowup_refinement, convergence_study, damping_horizon, soliton, BlowupStudy, ConvergenceReport, Reference, ORDER_WINDOW};
pub use verifiers::{check_bootstrap_csv, check_gronwall_csv, exit_code, read_columns, EXIT_PASS, EXIT_USAGE, EXIT_VERDICT_FAILURE};

use crate::error::Result;

pub const WORKERS_ENV: &str = "DNLS_WORKERS";

/// Worker count: `DNLS_WORKERS` if set to a positive integer, else the
/// available parallelism.
pub fn worker_count() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs every config of the suite under `out_root`, at most `workers` at a
/// time. Results come back in suite order.
pub fn run_suite(suite: &ExperimentSuite, out_root: &Path, workers: usize) -> Vec<Result<RunOutcome>> {
    let n = suite.runs.len();
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<RunOutcome>>>> = Mutex::new((0..n).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers.clamp(1, n.max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let cfg = &suite.runs[i];
                let out = run_experiment(cfg, out_root, &suite.reports_for(cfg));
                slots.lock().unwrap_or_else(|e| e.into_inner())[i] = Some(out);
            });
        }
    });
    slots
        .into_inner()
        .unwrap_or_else(|e| e.into_inner())
        .into_iter()
        .map(|r| r.expect("every run slot is filled"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::damping::DampingProfile;
    use crate::solver::{InitialDataSpec, SimConfig};

    fn suite() -> ExperimentSuite {
        let runs = (0..3)
            .map(|i| {
                let mut cfg = SimConfig::new_1d(
                    128,
                    16.0,
                    InitialDataSpec::Gaussian {
                        amplitude: 0.8 + 0.2 * i as f64,
                        width: 1.0,
                        center: vec![],
                        wave_vector: vec![],
                        noise: 0.02,
                    },
                );
                cfg.name = format!("r{i}");
                cfg.seed = i;
                cfg.time.dt = 1e-2;
                cfg.damping = DampingProfile::constant(0.2).unwrap();
                cfg
            })
            .collect();
        ExperimentSuite {
            name: "t".into(),
            runs,
            reports: vec![ReportKind::Identities],
            output_dir: None,
            seed: 0,
        }
    }

    #[test]
    fn parallel_sweep_matches_sequential() {
        let s = suite();
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let par = run_suite(&s, a.path(), 3);
        let seq = run_suite(&s, b.path(), 1);
        for (x, y) in par.iter().zip(&seq) {
            assert_eq!(x.as_ref().unwrap().records, y.as_ref().unwrap().records);
        }
        for r in &s.runs {
            let fa = std::fs::read(a.path().join(&r.name).join(DIAGNOSTICS_FILE)).unwrap();
            let fb = std::fs::read(b.path().join(&r.name).join(DIAGNOSTICS_FILE)).unwrap();
            assert_eq!(fa, fb);
            assert!(b.path().join(&r.name).join(MANIFEST_FILE).exists());
        }
    }
}
