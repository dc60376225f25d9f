//! Reading and writing nets: the text format, PNML, Graphviz DOT, and
//! refinement scripts.

mod dot;
mod pnml;
mod script;
mod text;

use std::path::Path;

use thiserror::Error;

use crate::workflow::WorkflowNet;

pub use dot::{write_dot, DotError};
pub use pnml::{parse_pnml, write_pnml, PnmlError};
pub use script::{parse_refinement, write_refinement, ScriptError};
pub use text::{parse_net_text, write_net_text, TextError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Text { path: String, source: TextError },
    #[error("{path}: {source}")]
    Pnml { path: String, source: PnmlError },
    #[error("{path}: {source}")]
    Script { path: String, source: ScriptError },
}

fn read(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Read { path: path.display().to_string(), source })
}

fn is_pnml(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("pnml"))
}

/// Reads a net file, choosing PNML for `.pnml` and the text format otherwise.
pub fn load_net(path: &Path) -> Result<WorkflowNet, IoError> {
    let content = read(path)?;
    let shown = path.display().to_string();
    if is_pnml(path) {
        parse_pnml(&content).map_err(|source| IoError::Pnml { path: shown, source })
    } else {
        parse_net_text(&content).map_err(|source| IoError::Text { path: shown, source })
    }
}

/// Renders `wf` in the format implied by the extension of `path`.
pub fn render_for(path: &Path, wf: &WorkflowNet) -> String {
    if is_pnml(path) {
        write_pnml(wf)
    } else {
        write_net_text(wf)
    }
}

/// Reads a refinement script, resolving net files next to it.
pub fn load_refinement(path: &Path) -> Result<crate::andor::RefinementTree, IoError> {
    let content = read(path)?;
    parse_refinement(&content, Some(path.parent().unwrap_or(Path::new("."))))
        .map_err(|source| IoError::Script { path: path.display().to_string(), source })
}
