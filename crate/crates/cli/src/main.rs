use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dnls_core::diagnostics::{identity_report, IdentityTolerances};
use dnls_core::experiments::{
    self, bootstrap_text, check_bootstrap_csv, check_gronwall_csv, convergence_study, gronwall_text, identity_text,
    parse_config, parse_sim_config, read_diagnostics, run_experiment, run_suite, scattering_report_from_dir,
    ConfigFile, ReportKind, EXIT_PASS, EXIT_USAGE, EXIT_VERDICT_FAILURE,
};
use dnls_core::inequalities::sharp_constant;
use dnls_core::{Error, Result};

/// Damped NLS simulator and verification toolkit.
#[derive(Parser)]
#[command(name = "dnls", version)]
struct Cli {
    /// Where runs and reports are written.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one config and write diagnostics, checkpoints and reports.
    Run { config: PathBuf },
    /// Run every config of a suite file, in parallel (DNLS_WORKERS).
    Sweep { suite: PathBuf },
    /// Check the mass, energy and virial identities on a diagnostics CSV.
    VerifyIdentities {
        csv: PathBuf,
        /// Config describing the run; defaults to config.toml next to the CSV.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Rebuild the scattering report of a run directory.
    ScatteringReport { run_dir: PathBuf },
    /// Sharp Gagliardo-Nirenberg constant by numerical ascent.
    GnConstant {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        p: f64,
    },
    /// Grönwall lemma check on a CSV with columns t,f,g,h.
    CheckGronwall {
        csv: PathBuf,
        #[arg(long = "C")]
        c: f64,
        #[arg(long)]
        beta: f64,
    },
    /// Bootstrap lemma check on a CSV with columns t,X.
    CheckBootstrap {
        csv: PathBuf,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        theta: f64,
    },
    /// Time-step convergence order of a config.
    Convergence {
        config: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "4e-3,2e-3,1e-3,5e-4")]
        dts: Vec<f64>,
    },
}

fn emit(out: Option<&Path>, file: &str, text: &str) -> Result<()> {
    print!("{text}");
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join(file);
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

fn outcome_line(name: &str, dir: &Path, verdict: bool, skipped: &[(ReportKind, String)]) {
    println!("{name}: {} ({})", if verdict { "pass" } else { "fail" }, dir.display());
    for (kind, why) in skipped {
        println!("  skipped {kind:?}: {why}");
    }
}

fn execute(cli: Cli) -> Result<bool> {
    let out = cli.output_dir.as_deref();
    match cli.command {
        Command::Run { config } => {
            let cfg = match parse_config(&config)? {
                ConfigFile::Single(c) => c,
                ConfigFile::Suite(_) => return Err(Error::Config("suite files go through `dnls sweep`".into())),
            };
            let root = out.unwrap_or(Path::new("runs"));
            let r = run_experiment(&cfg, root, &ReportKind::defaults_for(&cfg))?;
            outcome_line(&cfg.name, &r.dir, r.verdict, &r.skipped);
            Ok(r.verdict)
        }
        Command::Sweep { suite } => {
            let suite = match parse_config(&suite)? {
                ConfigFile::Suite(s) => s,
                ConfigFile::Single(c) => experiments::ExperimentSuite {
                    name: c.name.clone(),
                    reports: ReportKind::defaults_for(&c),
                    runs: vec![c],
                    output_dir: None,
                    seed: 0,
                },
            };
            let root = out.map(Path::to_path_buf).or_else(|| suite.output_dir.clone()).unwrap_or_else(|| "runs".into());
            let mut all = true;
            for (cfg, r) in suite.runs.iter().zip(run_suite(&suite, &root, experiments::worker_count())) {
                match r {
                    Ok(r) => {
                        outcome_line(&cfg.name, &r.dir, r.verdict, &r.skipped);
                        all &= r.verdict;
                    }
                    Err(e) => {
                        println!("{}: error: {e}", cfg.name);
                        all = false;
                    }
                }
            }
            Ok(all)
        }
        Command::VerifyIdentities { csv, config } => {
            let cfg_path = config.unwrap_or_else(|| csv.with_file_name(experiments::CONFIG_FILE));
            let cfg = parse_sim_config(&cfg_path)?;
            let records = read_diagnostics(&csv)?;
            let r = identity_report(&records, &cfg.model(), &IdentityTolerances::default())?;
            emit(out, "identities.txt", &identity_text(&r))?;
            Ok(r.all_pass())
        }
        Command::ScatteringReport { run_dir } => {
            let r = scattering_report_from_dir(&run_dir)?;
            emit(out, "scattering.txt", &r.to_text())?;
            Ok(r.verdict)
        }
        Command::GnConstant { dim, p } => {
            let k = sharp_constant(dim, p)?;
            emit(out, "gn_constant.txt", &format!("[gn_constant]\ndim = {dim}\np = {p}\nk = {k:.12e}\n"))?;
            Ok(true)
        }
        Command::CheckGronwall { csv, c, beta } => {
            let r = check_gronwall_csv(&csv, c, beta)?;
            emit(out, "gronwall.txt", &gronwall_text(&r))?;
            Ok(r.hypotheses_ok && r.satisfied)
        }
        Command::CheckBootstrap { csv, a, b, theta } => {
            let r = check_bootstrap_csv(&csv, a, b, theta)?;
            emit(out, "bootstrap.txt", &bootstrap_text(&r))?;
            Ok(r.smallness_ok && r.hypothesis_ok && r.conclusion_ok)
        }
        Command::Convergence { config, dts } => {
            let cfg = parse_sim_config(&config)?;
            let r = convergence_study(&cfg, &dts)?;
            emit(out, "convergence.txt", &r.to_text())?;
            Ok(r.pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match execute(cli) {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_VERDICT_FAILURE,
        Err(e) => {
            eprintln!("dnls: {e}");
            EXIT_USAGE
        }
    };
    ExitCode::from(code as u8)
}
