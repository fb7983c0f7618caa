//! Run manifests: the command, output format and full configuration behind
//! every output file.
//!
//! A manifest is the config text plus a few run keys (`version`, `command`,
//! `format`, `outputs`, `jump_factor`, `suite_tol`). Tab-separated outputs carry it as a
//! `# `-prefixed header, so stripping that prefix gives a file that
//! `ssh-lindblad run` accepts.

use std::fmt::Write as _;

use anyhow::{anyhow, bail, Result};
use serde::Serialize;
use ssh_lindblad::config::RunConfig;
use ssh_lindblad::oracle::JUMP_FACTOR;

use crate::output::{format_f64, Format};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Rapidity,
    Spectrum,
    Dynamics,
    GapScan,
    DarkState,
    Validate,
}

impl Command {
    pub const ALL: [Command; 6] =
        [Command::Rapidity, Command::Spectrum, Command::Dynamics, Command::GapScan, Command::DarkState, Command::Validate];

    pub fn name(self) -> &'static str {
        match self {
            Command::Rapidity => "rapidity",
            Command::Spectrum => "spectrum",
            Command::Dynamics => "dynamics",
            Command::GapScan => "gap-scan",
            Command::DarkState => "dark-state",
            Command::Validate => "validate",
        }
    }

    pub fn from_name(s: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.name() == s)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub version: String,
    pub command: Command,
    pub format: Format,
    pub outputs: Vec<String>,
    pub jump_factor: f64,
    /// Tolerance override of the built-in validation suite (which has no config to hold it).
    pub suite_tol: Option<f64>,
    /// `None` only for the built-in validation suite.
    pub config: Option<RunConfig>,
}

impl RunManifest {
    pub fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "version = {}", self.version);
        let _ = writeln!(s, "command = {}", self.command.name());
        let _ = writeln!(s, "format = {}", self.format.name());
        let _ = writeln!(s, "outputs = {}", self.outputs.join(", "));
        if self.jump_factor != JUMP_FACTOR {
            let _ = writeln!(s, "jump_factor = {}", format_f64(self.jump_factor));
        }
        if let Some(t) = self.suite_tol {
            let _ = writeln!(s, "suite_tol = {}", format_f64(t));
        }
        if let Some(cfg) = &self.config {
            s.push_str(&cfg.to_text());
        }
        s
    }

    /// [`RunManifest::text`] with every line prefixed by `# `.
    pub fn header(&self) -> String {
        self.text().lines().map(|l| format!("# {l}\n")).collect()
    }
}

/// Manifest keys that are not config keys.
const RUN_KEYS: [&str; 6] = ["version", "command", "format", "outputs", "jump_factor", "suite_tol"];

#[derive(Debug, Clone)]
pub struct ParsedManifest {
    pub command: Command,
    pub format: Option<Format>,
    pub jump_factor: f64,
    pub suite_tol: Option<f64>,
    /// Remaining config text, with run-key lines blanked so line numbers still match.
    pub config_text: Option<String>,
}

pub fn parse_manifest(text: &str) -> Result<ParsedManifest> {
    let mut command = None;
    let mut format = None;
    let mut jump_factor = JUMP_FACTOR;
    let mut suite_tol = None;
    let mut config_lines = Vec::new();
    let mut has_config = false;
    for (idx, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("").trim();
        let run_key = content
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .filter(|(k, _)| RUN_KEYS.contains(k));
        match run_key {
            Some((key, value)) => {
                let line = idx + 1;
                match key {
                    "command" => {
                        command = Some(
                            Command::from_name(value).ok_or_else(|| anyhow!("manifest line {line}: unknown command `{value}`"))?,
                        )
                    }
                    "format" => {
                        format = Some(match value {
                            "tsv" => Format::Tsv,
                            "json" => Format::Json,
                            _ => bail!("manifest line {line}: unknown format `{value}`"),
                        })
                    }
                    "jump_factor" => {
                        jump_factor = value.parse().map_err(|_| anyhow!("manifest line {line}: bad jump_factor `{value}`"))?
                    }
                    "suite_tol" => {
                        suite_tol = Some(value.parse().map_err(|_| anyhow!("manifest line {line}: bad suite_tol `{value}`"))?)
                    }
                    _ => {}
                }
                config_lines.push(String::new());
            }
            None => {
                has_config |= !content.is_empty();
                config_lines.push(raw.to_string());
            }
        }
    }
    let command = command.ok_or_else(|| anyhow!("manifest has no `command = …` line"))?;
    Ok(ParsedManifest { command, format, jump_factor, suite_tol, config_text: has_config.then(|| config_lines.join("\n")) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ssh_lindblad::OpenChainModel;

    #[test]
    fn header_parses_back() {
        let cfg = RunConfig::new(OpenChainModel::loss_loss(0.1, 1.0, 50, 0.2, 0.2));
        let m = RunManifest {
            version: VERSION.into(),
            command: Command::GapScan,
            format: Format::Tsv,
            outputs: vec!["a.tsv".into(), "b.tsv".into()],
            jump_factor: JUMP_FACTOR,
            suite_tol: None,
            config: Some(cfg.clone()),
        };
        let stripped: String = m.header().lines().map(|l| format!("{}\n", l.strip_prefix("# ").unwrap())).collect();
        let p = parse_manifest(&stripped).unwrap();
        assert_eq!(p.command, Command::GapScan);
        assert_eq!(p.format, Some(Format::Tsv));
        assert_eq!(RunConfig::parse(&p.config_text.unwrap()).unwrap(), cfg);
    }

    #[test]
    fn config_errors_keep_file_line_numbers() {
        let p = parse_manifest("command = rapidity\nformat = tsv\nt1 = 0.5\nn_cells = x\n").unwrap();
        let err = RunConfig::parse(&p.config_text.unwrap()).unwrap_err();
        assert!(err.to_string().contains("line 4"), "{err}");
    }

    #[test]
    fn missing_command_is_an_error() {
        assert!(parse_manifest("t1 = 0.5\n").is_err());
        assert!(parse_manifest("command = plot\n").is_err());
    }
}
