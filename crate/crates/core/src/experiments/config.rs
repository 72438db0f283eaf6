use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::{InitialDataSpec, SimConfig};

/// Reports a run can produce besides its diagnostics CSV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportKind {
    Identities,
    Scattering,
    Liminf,
    /// Grönwall inequality chain of the mass-subcritical argument.
    Gronwall,
    /// Bootstrap inequality chain of the small-data argument.
    Bootstrap,
}

impl ReportKind {
    pub const ALL: [ReportKind; 5] = [
        ReportKind::Identities,
        ReportKind::Scattering,
        ReportKind::Liminf,
        ReportKind::Gronwall,
        ReportKind::Bootstrap,
    ];

    /// What a lone `run` produces when nothing is requested.
    pub fn defaults_for(cfg: &SimConfig) -> Vec<ReportKind> {
        let mut out = vec![ReportKind::Identities];
        if cfg.scattering.is_some() {
            out.push(ReportKind::Scattering);
        }
        if !cfg.damping.is_zero() {
            out.push(ReportKind::Liminf);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteHeader {
    pub name: String,
    /// Added to every run's own seed.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Reports produced for every run; empty means per-run defaults.
    #[serde(default)]
    pub reports: Vec<ReportKind>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SuiteFile {
    suite: SuiteHeader,
    run: Vec<SimConfig>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSuite {
    pub name: String,
    pub runs: Vec<SimConfig>,
    pub reports: Vec<ReportKind>,
    pub output_dir: Option<PathBuf>,
    pub seed: u64,
}

impl ExperimentSuite {
    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for run in &self.runs {
            if !seen.insert(run.name.as_str()) {
                return Err(Error::Validation(format!("duplicate run name {:?} in suite", run.name)));
            }
            run.validate()
                .map_err(|e| Error::Validation(format!("run {:?}: {e}", run.name)))?;
        }
        Ok(())
    }

    pub fn reports_for(&self, cfg: &SimConfig) -> Vec<ReportKind> {
        if self.reports.is_empty() {
            ReportKind::defaults_for(cfg)
        } else {
            self.reports.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigFile {
    Single(SimConfig),
    Suite(ExperimentSuite),
}

pub fn parse_config(path: impl AsRef<Path>) -> Result<ConfigFile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_str(&text, path)
}

/// Like [`parse_config`] but expects a single run.
pub fn parse_sim_config(path: impl AsRef<Path>) -> Result<SimConfig> {
    match parse_config(path.as_ref())? {
        ConfigFile::Single(cfg) => Ok(cfg),
        ConfigFile::Suite(_) => Err(Error::Config(format!(
            "{} is a suite; expected a single run",
            path.as_ref().display()
        ))),
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn parse_error(text: &str, path: &Path, e: toml::de::Error) -> Error {
    let (line, column) = e.span().map_or((0, 0), |s| line_column(text, s.start));
    Error::Parse {
        path: path.to_path_buf(),
        line,
        column,
        message: e.message().to_string(),
    }
}

/// `path` names the source for error messages and anchors relative profile paths.
pub fn parse_config_str(text: &str, path: &Path) -> Result<ConfigFile> {
    let table: toml::Table = toml::from_str(text).map_err(|e| parse_error(text, path, e))?;
    let base = path.parent().unwrap_or(Path::new(""));
    if table.contains_key("run") || table.contains_key("suite") {
        let file: SuiteFile = toml::from_str(text).map_err(|e| parse_error(text, path, e))?;
        let mut suite = ExperimentSuite {
            name: file.suite.name,
            runs: file.run,
            reports: file.suite.reports,
            output_dir: file.suite.output_dir.map(|d| base.join(d)),
            seed: file.suite.seed,
        };
        for run in &mut suite.runs {
            run.seed = run.seed.wrapping_add(suite.seed);
            anchor_paths(run, base);
        }
        suite.validate()?;
        Ok(ConfigFile::Suite(suite))
    } else {
        let mut cfg: SimConfig = toml::from_str(text).map_err(|e| parse_error(text, path, e))?;
        anchor_paths(&mut cfg, base);
        cfg.validate()?;
        Ok(ConfigFile::Single(cfg))
    }
}

fn anchor_paths(cfg: &mut SimConfig, base: &Path) {
    if let InitialDataSpec::ScaledProfile { path, .. } = &mut cfg.initial {
        if path.is_relative() {
            *path = base.join(&*path);
        }
    }
}

pub fn to_toml(cfg: &SimConfig) -> Result<String> {
    toml::to_string(cfg).map_err(|e| Error::Config(format!("cannot serialize config: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::damping::DampingProfile;

    const MINIMAL: &str = r#"
dim = 1
p = 3.0

[grid]
points = 256
half_length = 20.0

[time]
t_end = 1.0
dt = 0.001

[initial]
kind = "gaussian"
amplitude = 1.0
width = 1.0
"#;

    fn parse(text: &str) -> Result<ConfigFile> {
        parse_config_str(text, Path::new("mem/config.toml"))
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let ConfigFile::Single(cfg) = parse(MINIMAL).unwrap() else { panic!() };
        assert_eq!(cfg.name, "run");
        assert_eq!(cfg.mu, -1);
        assert_eq!(cfg.damping, DampingProfile::Zero);
        assert_eq!(cfg.cadence(), 0.01);
        assert_eq!(cfg.time.blowup_threshold, 1e6);
        assert!(cfg.nonlinear);
        assert!(cfg.scattering.is_none());
    }

    #[test]
    fn echo_round_trips() {
        let text = format!("damping = \"constant:a=0.5\"\n{MINIMAL}");
        let ConfigFile::Single(cfg) = parse(&text).unwrap() else { panic!() };
        let again = parse(&to_toml(&cfg).unwrap()).unwrap();
        assert_eq!(again, ConfigFile::Single(cfg));
    }

    #[test]
    fn supercritical_p_is_rejected() {
        let text = MINIMAL.replace("dim = 1\np = 3.0", "dim = 3\np = 6.0");
        let err = parse(&text).unwrap_err().to_string();
        assert!(err.contains("energy-supercritical p"), "{err}");
    }

    #[test]
    fn unknown_keys_are_errors_with_position() {
        let text = MINIMAL.replace("dt = 0.001", "dt = 0.001\ncadense = 0.1");
        match parse(&text).unwrap_err() {
            Error::Parse { line, column, message, .. } => {
                assert_eq!(line, 12);
                assert!(column >= 1);
                assert!(message.contains("cadense"), "{message}");
            }
            e => panic!("{e}"),
        }
        let text = MINIMAL.replace("width = 1.0", "width = 1.0\nspread = 2");
        assert!(matches!(parse(&text), Err(Error::Parse { .. })));
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse("dim = 1\np = = 3\n").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn bad_damping_grammar_is_reported() {
        let text = format!("damping = \"constant:b=1\"\n{MINIMAL}");
        assert!(parse(&text).is_err());
    }

    #[test]
    fn suite_with_three_runs() {
        let body = MINIMAL.trim_start();
        let mut text = String::from("[suite]\nname = \"s\"\nseed = 5\nreports = [\"identities\", \"liminf\"]\n");
        for i in 0..3 {
            text.push_str(&format!("\n[[run]]\nname = \"r{i}\"\n"));
            for line in body.lines() {
                let line = line
                    .replace("[grid]", "[run.grid]")
                    .replace("[time]", "[run.time]")
                    .replace("[initial]", "[run.initial]");
                text.push_str(&line);
                text.push('\n');
            }
        }
        let ConfigFile::Suite(s) = parse(&text).unwrap() else { panic!() };
        assert_eq!(s.runs.len(), 3);
        assert_eq!(s.runs[0].seed, 5);
        assert_eq!(s.reports, vec![ReportKind::Identities, ReportKind::Liminf]);
        let dup = text.replace("name = \"r2\"", "name = \"r1\"");
        assert!(matches!(parse(&dup), Err(Error::Validation(_))));
    }

    #[test]
    fn relative_profile_paths_are_anchored() {
        let text = MINIMAL.replace(
            "kind = \"gaussian\"\namplitude = 1.0\nwidth = 1.0",
            "kind = \"scaled_profile\"\npath = \"u.dnls\"\nscale = 2.0",
        );
        let ConfigFile::Single(cfg) = parse(&text).unwrap() else { panic!() };
        match cfg.initial {
            InitialDataSpec::ScaledProfile { path, .. } => assert_eq!(path, Path::new("mem/u.dnls")),
            _ => panic!(),
        }
    }
}
