//! State loading and atomic file writes.

use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use tsallis_core::qstate::{eigendecompose, states};
use tsallis_core::{DensityMatrix, PureState};

/// A state read from `--input`.
#[derive(Clone, Debug)]
pub enum InputState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl InputState {
    pub fn density(&self) -> DensityMatrix {
        match self {
            Self::Pure(p) => DensityMatrix::from_pure(p),
            Self::Mixed(r) => r.clone(),
        }
    }

    /// The state vector, if the state is pure.
    pub fn pure(&self) -> Option<PureState> {
        match self {
            Self::Pure(p) => Some(p.clone()),
            Self::Mixed(r) if r.is_pure() => {
                PureState::normalized(eigendecompose(r).vector(0), r.dims().clone()).ok()
            }
            Self::Mixed(_) => None,
        }
    }

    pub fn local_dims(&self) -> Vec<usize> {
        match self {
            Self::Pure(p) => p.dims().as_slice().to_vec(),
            Self::Mixed(r) => r.dims().as_slice().to_vec(),
        }
    }
}

fn named(arg: &str) -> Result<InputState> {
    let party_count = |rest: &str, min: usize| -> Result<usize> {
        let n = if rest.is_empty() { 3 } else { rest.parse().map_err(|_| anyhow!("input_state: bad state name `@{arg}`"))? };
        if n < min {
            bail!("input_state: `@{arg}` needs at least {min} qubits");
        }
        Ok(n)
    };
    let psi = if arg == "bell" {
        states::bell()
    } else if let Some(rest) = arg.strip_prefix("ghz") {
        states::ghz(party_count(rest, 2)?)
    } else if let Some(rest) = arg.strip_prefix("w") {
        states::w(party_count(rest, 2)?)
    } else {
        bail!("input_state: unknown state name `@{arg}` (expected @bell, @ghzN or @wN)");
    };
    Ok(InputState::Pure(psi))
}

/// Reads `@bell`, `@ghzN`, `@wN`, or a JSON state file. Files holding a flat
/// `re` array are state vectors; nested arrays are density matrices.
pub fn load_state(arg: &str) -> Result<InputState> {
    if let Some(name) = arg.strip_prefix('@') {
        return named(name);
    }
    let text = std::fs::read_to_string(arg).with_context(|| format!("input_state: cannot read {arg}"))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("input_state: {arg} is not valid JSON"))?;
    let nested = value
        .get("re")
        .and_then(|re| re.as_array())
        .and_then(|rows| rows.first())
        .is_some_and(|first| first.is_array());
    let parsed = if nested {
        serde_json::from_value(value).map(InputState::Mixed)
    } else {
        serde_json::from_value(value).map(InputState::Pure)
    };
    parsed.with_context(|| format!("input_state: {arg} is not a valid state record"))
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so the target never holds a partial report.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("cannot create a file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| anyhow!("cannot write {}: {}", path.display(), e.error))?;
    Ok(())
}
