//! Resumable classification state.
//!
//! The file stores the window, the candidate count, how many candidates were
//! processed, and each class found so far as `(representative index,
//! members, fewest left columns among members)`. A SHA-256 digest of the state guards against truncated or
//! edited files; a mismatch refuses to resume.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::generate::{CandidateStream, Window};
use super::EnumerationError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub window: Window,
    pub candidates: usize,
    pub next: usize,
    pub classes: Vec<(usize, usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct Envelope {
    sha256: String,
    state: Checkpoint,
}

fn digest(state: &Checkpoint) -> Result<String, EnumerationError> {
    let body = serde_json::to_vec(state)?;
    Ok(hex::encode(Sha256::digest(&body)))
}

pub fn path_for(dir: &Path, w: &Window) -> PathBuf {
    dir.join(format!("classify-{}-{}-{}.json", w.rows, w.cols, w.vars))
}

pub fn save(
    dir: &Path,
    stream: &CandidateStream,
    next: usize,
    reps: &[usize],
    members: &[usize],
    min_cols: &[usize],
) -> Result<(), EnumerationError> {
    fs::create_dir_all(dir)?;
    let state = Checkpoint {
        window: stream.window,
        candidates: stream.len(),
        next,
        classes: (0..reps.len()).map(|i| (reps[i], members[i], min_cols[i])).collect(),
    };
    let env = Envelope {
        sha256: digest(&state)?,
        state,
    };
    let path = path_for(dir, &stream.window);
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, serde_json::to_vec(&env)?)?;
    fs::rename(tmp, path)?;
    Ok(())
}

/// Loads the state for `stream`'s window, if a file exists.
pub fn load(dir: &Path, stream: &CandidateStream) -> Result<Option<Checkpoint>, EnumerationError> {
    let path = path_for(dir, &stream.window);
    let bytes = match fs::read(&path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let corrupt = |why: &str| EnumerationError::Checkpoint(format!("{}: {why}", path.display()));
    let env: Envelope = serde_json::from_slice(&bytes).map_err(|e| corrupt(&e.to_string()))?;
    if digest(&env.state)? != env.sha256 {
        return Err(corrupt("checksum mismatch"));
    }
    let st = env.state;
    if st.window != stream.window || st.candidates != stream.len() {
        return Err(corrupt("state belongs to a different candidate list"));
    }
    if st.next > st.candidates || st.classes.iter().any(|&(r, _, _)| r >= st.next) {
        return Err(corrupt("indices out of range"));
    }
    Ok(Some(st))
}
