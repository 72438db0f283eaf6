use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{to_toml, ReportKind};
use super::studies::{blowup_refinement, BlowupStudy};
use crate::diagnostics::{self, identity_report, liminf_check, CsvSink, DiagnosticsRecord, IdentityReport, IdentityTolerances, LiminfCheck};
use crate::error::{Error, Result};
use crate::grid::Field;
use crate::inequalities::{scat1_gronwall_replay, scat3_bootstrap_replay, sharp_constant, GronwallReport, Scat3Replay};
use crate::scattering::{back_propagate, scattering_report, ScatteringReport, ScatteringSampler};
use crate::solver::{checkpoint, evolve, SimConfig, Sink, TrajectorySummary};

pub const CONFIG_FILE: &str = "config.toml";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const MANIFEST_FILE: &str = "manifest.toml";

/// Appends `[name]` followed by `key = value` lines.
pub fn kv_section(out: &mut String, name: &str, pairs: &[(&str, String)]) {
    if !out.is_empty() {
        out.push('\n');
    }
    let _ = writeln!(out, "[{name}]");
    for (k, v) in pairs {
        let _ = writeln!(out, "{k} = {v}");
    }
}

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn identity_text(r: &IdentityReport) -> String {
    let mut s = String::new();
    for c in &r.checks {
        kv_section(
            &mut s,
            c.name,
            &[("residual", num(c.residual)), ("tolerance", num(c.tolerance)), ("pass", c.pass.to_string())],
        );
    }
    kv_section(&mut s, "verdict", &[("pass", r.all_pass().to_string())]);
    s
}

pub fn liminf_text(r: &LiminfCheck) -> String {
    let mut s = String::new();
    kv_section(
        &mut s,
        "liminf",
        &[("min_tail_i", num(r.min_tail_i)), ("tolerance", num(r.tolerance)), ("pass", r.pass.to_string())],
    );
    s
}

pub fn gronwall_text(r: &GronwallReport) -> String {
    let mut s = String::new();
    let mut pairs = vec![
        ("branch", format!("{:?}", r.branch).to_lowercase()),
        ("hypotheses_ok", r.hypotheses_ok.to_string()),
        ("max_hypothesis_excess", num(r.max_hypothesis_excess)),
        ("satisfied", r.satisfied.to_string()),
    ];
    if let Some(note) = &r.hypothesis_note {
        pairs.push(("note", format!("{note:?}")));
    }
    if let Some(t0) = r.t0 {
        pairs.push(("t0", num(t0)));
    }
    if !r.bound.is_empty() {
        pairs.push(("min_bound_margin", num(r.min_bound_margin)));
        pairs.push(("max_bound", num(r.bound.iter().copied().fold(0.0, f64::max))));
    }
    kv_section(&mut s, "gronwall", &pairs);
    s
}

pub fn bootstrap_text(r: &crate::inequalities::BootstrapReport) -> String {
    let mut s = String::new();
    kv_section(
        &mut s,
        "bootstrap",
        &[
            ("threshold", num(r.threshold)),
            ("smallness_value", num(r.smallness_value)),
            ("smallness_ok", r.smallness_ok.to_string()),
            ("hypothesis_ok", r.hypothesis_ok.to_string()),
            ("bound", num(r.bound)),
            ("max_x", num(r.max_x)),
            ("conclusion_ok", r.conclusion_ok.to_string()),
        ],
    );
    s
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// Writes `u` at every scattering sample time.
struct SampleWriter {
    dir: PathBuf,
    every: f64,
    count: usize,
}

impl Sink for SampleWriter {
    fn accept(&mut self, record: &DiagnosticsRecord, u: &Field) -> Result<()> {
        let k = (record.t / self.every).round();
        if (record.t - k * self.every).abs() <= 1e-9 * self.every.max(record.t) {
            checkpoint::write(self.dir.join(format!("u_{:05}.dnls", self.count)), u)?;
            self.count += 1;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestRun {
    pub name: String,
    pub package_version: String,
    pub checkpoint_version: u32,
    pub wall_time_s: f64,
    pub steps: usize,
    pub final_time: f64,
    pub blow_up: bool,
    pub verdict: bool,
    pub reports: Vec<ReportKind>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub run: ManifestRun,
    pub config: SimConfig,
}

/// Everything a run produced, in memory.
#[derive(Debug)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub summary: TrajectorySummary,
    pub records: Vec<DiagnosticsRecord>,
    pub identities: Option<IdentityReport>,
    pub scattering: Option<ScatteringReport>,
    pub liminf: Option<LiminfCheck>,
    pub gronwall: Option<GronwallReport>,
    pub bootstrap: Option<Scat3Replay>,
    pub blow_up: Option<BlowupStudy>,
    /// Reports that were requested but could not be produced, with the reason.
    pub skipped: Vec<(ReportKind, String)>,
    pub verdict: bool,
}

/// Simulates `cfg` into `out_root/<name>/` and writes the requested reports.
///
/// Layout: `config.toml`, `diagnostics.csv`, `checkpoints/{initial,final}.dnls`,
/// `samples/u_NNNNN.dnls` and `u_plus.dnls` when scattering is configured,
/// `reports/*.txt`, `manifest.toml`.
pub fn run_experiment(cfg: &SimConfig, out_root: &Path, reports: &[ReportKind]) -> Result<RunOutcome> {
    cfg.validate()?;
    let dir = out_root.join(&cfg.name);
    let report_dir = dir.join("reports");
    let ckpt_dir = dir.join("checkpoints");
    create_dir(&report_dir)?;
    create_dir(&ckpt_dir)?;
    write_text(&dir.join(CONFIG_FILE), &to_toml(cfg)?)?;

    let grid = cfg.build_grid()?;
    let u0 = cfg.initial_field(&grid)?;
    checkpoint::write(ckpt_dir.join("initial.dnls"), &u0)?;

    let csv_path = dir.join(DIAGNOSTICS_FILE);
    let csv_file = File::create(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
    let mut csv = CsvSink::new(BufWriter::new(csv_file))?;
    let mut records: Vec<DiagnosticsRecord> = Vec::new();
    let want_scattering = reports.contains(&ReportKind::Scattering);
    let scat = cfg.scattering.clone().filter(|_| want_scattering);
    let mut sampler = scat.as_ref().map(|s| ScatteringSampler::new(cfg.damping.clone(), s.sample_every));
    let mut sample_writer = match &scat {
        Some(s) => {
            let d = dir.join("samples");
            create_dir(&d)?;
            Some(SampleWriter { dir: d, every: s.sample_every, count: 0 })
        }
        None => None,
    };
    let summary = {
        let mut sinks: Vec<&mut dyn Sink> = vec![&mut csv, &mut records];
        if let Some(s) = sampler.as_mut() {
            sinks.push(s);
        }
        if let Some(w) = sample_writer.as_mut() {
            sinks.push(w);
        }
        crate::solver::evolve_from(cfg, u0, &mut sinks)?
    };
    csv.flush()?;
    checkpoint::write(ckpt_dir.join("final.dnls"), &summary.final_state)?;

    let mut outcome = RunOutcome {
        dir: dir.clone(),
        summary,
        records,
        identities: None,
        scattering: None,
        liminf: None,
        gronwall: None,
        bootstrap: None,
        blow_up: None,
        skipped: Vec::new(),
        verdict: true,
    };

    if let Some(b) = outcome.summary.blow_up {
        let study = blowup_refinement(cfg, 2)?;
        write_text(&report_dir.join("blowup.txt"), &study.to_text())?;
        outcome.verdict &= study.confirmed;
        outcome.blow_up = Some(study);
        let reason = format!("blow-up guard tripped at t = {}", b.time);
        for kind in reports {
            outcome.skipped.push((*kind, reason.clone()));
        }
    } else {
        let model = cfg.model();
        let mut k_cache: Option<f64> = None;
        let mut sharp = |cfg: &SimConfig| -> Result<f64> {
            if let Some(k) = k_cache {
                return Ok(k);
            }
            let k = sharp_constant(cfg.dim, cfg.p)?;
            k_cache = Some(k);
            Ok(k)
        };
        for kind in reports {
            match kind {
                ReportKind::Identities => {
                    let r = identity_report(&outcome.records, &model, &IdentityTolerances::default())?;
                    write_text(&report_dir.join("identities.txt"), &identity_text(&r))?;
                    outcome.verdict &= r.all_pass();
                    outcome.identities = Some(r);
                }
                ReportKind::Scattering => {
                    let Some(spec) = &scat else {
                        outcome.skipped.push((*kind, "config has no [scattering] section".into()));
                        continue;
                    };
                    let eps = spec.epsilon_factor * outcome.records[0].h1_norm;
                    let samples = sampler.take().map(|s| s.samples).unwrap_or_default();
                    let r = scattering_report(&outcome.records, &samples, &cfg.damping, spec.burn_in, eps)?;
                    write_scattering(&dir, &r)?;
                    outcome.verdict &= r.verdict;
                    outcome.scattering = Some(r);
                }
                ReportKind::Liminf => match liminf_check(&outcome.records) {
                    Ok(r) => {
                        write_text(&report_dir.join("liminf.txt"), &liminf_text(&r))?;
                        outcome.verdict &= r.pass;
                        outcome.liminf = Some(r);
                    }
                    Err(Error::InsufficientData(why)) => outcome.skipped.push((*kind, why)),
                    Err(e) => return Err(e),
                },
                ReportKind::Gronwall => {
                    let sigma = cfg.dim as f64 * (cfg.p - 1.0) / 2.0;
                    if sigma > 2.0 {
                        outcome.skipped.push((*kind, format!("sigma = {sigma} > 2: not mass-(sub)critical")));
                        continue;
                    }
                    let r = scat1_gronwall_replay(&outcome.records, &model, sharp(cfg)?)?;
                    write_text(&report_dir.join("gronwall.txt"), &gronwall_text(&r))?;
                    outcome.verdict &= r.hypotheses_ok && r.satisfied;
                    outcome.gronwall = Some(r);
                }
                ReportKind::Bootstrap => {
                    let sigma = cfg.dim as f64 * (cfg.p - 1.0) / 2.0;
                    if sigma <= 2.0 {
                        outcome.skipped.push((*kind, format!("sigma = {sigma} <= 2: not intercritical")));
                        continue;
                    }
                    let r = scat3_bootstrap_replay(&outcome.records, &model, sharp(cfg)?)?;
                    let mut text = bootstrap_text(&r.bootstrap);
                    kv_section(
                        &mut text,
                        "weight_identity",
                        &[
                            ("quadrature", num(r.weight_identity.quadrature)),
                            ("closed_form", num(r.weight_identity.closed_form)),
                            ("residual", num(r.weight_identity.residual)),
                        ],
                    );
                    kv_section(&mut text, "growth", &[("max_growth", num(r.max_growth))]);
                    write_text(&report_dir.join("bootstrap.txt"), &text)?;
                    outcome.verdict &= r.bootstrap.smallness_ok && r.bootstrap.conclusion_ok;
                    outcome.bootstrap = Some(r);
                }
            }
        }
    }
    if !outcome.skipped.is_empty() {
        let mut text = String::new();
        for (kind, why) in &outcome.skipped {
            kv_section(&mut text, &format!("{kind:?}").to_lowercase(), &[("reason", format!("{why:?}"))]);
        }
        write_text(&report_dir.join("skipped.txt"), &text)?;
    }
    let manifest = Manifest {
        run: ManifestRun {
            name: cfg.name.clone(),
            package_version: env!("CARGO_PKG_VERSION").to_string(),
            checkpoint_version: checkpoint::VERSION,
            wall_time_s: outcome.summary.wall_time.as_secs_f64(),
            steps: outcome.summary.steps,
            final_time: outcome.summary.final_time,
            blow_up: outcome.summary.blow_up.is_some(),
            verdict: outcome.verdict,
            reports: reports.to_vec(),
        },
        config: cfg.clone(),
    };
    let text = toml::to_string(&manifest).map_err(|e| Error::Config(format!("manifest: {e}")))?;
    write_text(&dir.join(MANIFEST_FILE), &text)?;
    Ok(outcome)
}

fn write_scattering(dir: &Path, r: &ScatteringReport) -> Result<()> {
    let report_dir = dir.join("reports");
    write_text(&report_dir.join("scattering.txt"), &r.to_text())?;
    if let Some(csv) = r.cauchy_csv() {
        write_text(&report_dir.join("cauchy.csv"), &csv)?;
    }
    if let Some(u) = &r.u_plus {
        checkpoint::write(dir.join("u_plus.dnls"), u)?;
    }
    Ok(())
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    toml::from_str(&text).map_err(|e| Error::Parse {
        path,
        line: 0,
        column: 0,
        message: e.message().to_string(),
    })
}

pub fn read_diagnostics(path: &Path) -> Result<Vec<DiagnosticsRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    diagnostics::read_csv(std::io::BufReader::new(file))
}

/// Rebuilds the scattering report of an existing run directory from its
/// stored config, diagnostics and `u` samples.
pub fn scattering_report_from_dir(dir: &Path) -> Result<ScatteringReport> {
    let cfg_path = dir.join(CONFIG_FILE);
    let cfg = super::config::parse_sim_config(&cfg_path)?;
    let spec = cfg
        .scattering
        .clone()
        .ok_or_else(|| Error::Config(format!("{} has no [scattering] section", cfg_path.display())))?;
    let records = read_diagnostics(&dir.join(DIAGNOSTICS_FILE))?;
    let sample_dir = dir.join("samples");
    let mut paths: Vec<PathBuf> = match fs::read_dir(&sample_dir) {
        Ok(rd) => rd
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "dnls"))
            .collect(),
        Err(e) => return Err(Error::io(&sample_dir, e)),
    };
    paths.sort();
    let mut samples = Vec::with_capacity(paths.len());
    for p in &paths {
        let u = checkpoint::read(p)?;
        let t = u.time;
        samples.push((t, back_propagate(&u, t, &cfg.damping)?));
    }
    let first = records
        .first()
        .ok_or_else(|| Error::InsufficientData("empty diagnostics".into()))?;
    let eps = spec.epsilon_factor * first.h1_norm;
    let r = scattering_report(&records, &samples, &cfg.damping, spec.burn_in, eps)?;
    write_scattering(dir, &r)?;
    Ok(r)
}

/// Runs `cfg` in memory only; convenient for tests and studies.
pub fn simulate(cfg: &SimConfig) -> Result<(TrajectorySummary, Vec<DiagnosticsRecord>)> {
    let mut records: Vec<DiagnosticsRecord> = Vec::new();
    let summary = evolve(cfg, &mut [&mut records])?;
    Ok((summary, records))
}
