//! Reading files, box specifications, and the optional graph cache.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use lo_core::behavior::Behavior;
use lo_core::boxes::{fig4_family, noisy_pr, pr_box};
use lo_core::graph::OrthogonalityGraph;
use lo_core::rational::parse_rational;
use lo_core::scenario::Scenario;
use sha2::{Digest, Sha256};

use crate::report::CliError;

/// Reads input files and records their digests.
#[derive(Debug, Default)]
pub struct Inputs {
    pub digests: BTreeMap<String, String>,
}

impl Inputs {
    pub fn read(&mut self, path: &Path) -> Result<String, CliError> {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        let mut hex = String::with_capacity(64);
        for b in Sha256::digest(&bytes) {
            let _ = write!(hex, "{b:02x}");
        }
        self.digests.insert(path.display().to_string(), hex);
        String::from_utf8(bytes)
            .map_err(|_| CliError::Usage(format!("{} is not UTF-8 text", path.display())))
    }

    /// `pr`, `noisy:q`, `fig4:xi,gamma`, or a path to a behavior JSON file.
    pub fn behavior(&mut self, spec: &str) -> Result<Behavior, CliError> {
        if spec == "pr" {
            return Ok(pr_box());
        }
        if let Some(q) = spec.strip_prefix("noisy:") {
            return Ok(noisy_pr(&parse_rational(q)?)?);
        }
        if let Some(rest) = spec.strip_prefix("fig4:") {
            let (xi, gamma) = rest
                .split_once(',')
                .ok_or_else(|| CliError::Usage(format!("expected fig4:xi,gamma, got {spec:?}")))?;
            return Ok(fig4_family(&parse_rational(xi)?, &parse_rational(gamma)?)?);
        }
        let text = self.read(Path::new(spec))?;
        Ok(Behavior::from_json_str(&text)?)
    }
}

pub fn scenario(text: &str) -> Result<Scenario, CliError> {
    Ok(Scenario::parse(text)?)
}

/// Full orthogonality graph, read from or stored in `LO_CACHE_DIR` when set.
/// A damaged cache entry is rebuilt.
pub fn full_graph(scenario: Scenario) -> Result<OrthogonalityGraph, CliError> {
    let Some(dir) = std::env::var_os("LO_CACHE_DIR").map(PathBuf::from) else {
        return Ok(OrthogonalityGraph::build(scenario)?);
    };
    let path = dir.join(format!(
        "graph-{}-{}-{}.txt",
        scenario.parties(),
        scenario.settings(),
        scenario.outcomes()
    ));
    if let Ok(text) = std::fs::read_to_string(&path) {
        if let Ok(g) = OrthogonalityGraph::from_text(&text) {
            if g.scenario() == scenario && g.is_full() {
                return Ok(g);
            }
        }
    }
    let g = OrthogonalityGraph::build(scenario)?;
    if std::fs::create_dir_all(&dir).is_ok() {
        let _ = std::fs::write(&path, g.to_text());
    }
    Ok(g)
}
