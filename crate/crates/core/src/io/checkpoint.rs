//! Versioned checkpoint files for resumable enumeration runs.

use super::document::DocumentError;
use super::ProblemSpec;
use crate::exact::{Int, IntVector};
use crate::stability::{BitSet, OneParamSubgroup, Problem, State};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const CHECKPOINT_SCHEMA: &str = "gitstates/checkpoint/v1";

/// One antichain member inside a checkpoint: witness entries as decimal
/// strings and the state as indices into the problem's character set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckpointState {
    pub lambda: Vec<String>,
    pub chars: Vec<usize>,
}

/// Snapshot of a long enumeration: the phase it belongs to, the
/// lexicographic rank of the last completed subset, counters, the current
/// global antichain (empty in stream mode) and the optional stream dedupe
/// hash set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub schema: String,
    pub problem_hash: String,
    /// "stable", "semistable" or "superset-stream".
    pub phase: String,
    /// Rank of the last completed subset, decimal string (u128).
    pub cursor: String,
    pub emitted: u64,
    pub antichain: Vec<CheckpointState>,
    pub dedupe_hashes: Option<Vec<String>>,
}

impl Checkpoint {
    pub fn new(problem_hash: String, phase: &str, cursor: u128, emitted: u64) -> Self {
        Checkpoint {
            schema: CHECKPOINT_SCHEMA.to_string(),
            problem_hash,
            phase: phase.to_string(),
            cursor: cursor.to_string(),
            emitted,
            antichain: Vec::new(),
            dedupe_hashes: None,
        }
    }

    pub fn cursor_value(&self) -> Result<u128, DocumentError> {
        self.cursor
            .parse()
            .map_err(|_| DocumentError::Malformed(format!("bad cursor {:?}", self.cursor)))
    }

    pub fn set_antichain(&mut self, states: &[State]) {
        self.antichain = states
            .iter()
            .map(|s| CheckpointState {
                lambda: s
                    .witness
                    .as_ref()
                    .expect("antichain states carry witnesses")
                    .0
                     .0
                    .iter()
                    .map(|x| x.to_string())
                    .collect(),
                chars: s.mask.iter().collect(),
            })
            .collect();
    }

    /// Decodes the serialized antichain against a rebuilt problem.
    pub fn antichain_states(&self, problem: &Problem) -> Result<Vec<State>, DocumentError> {
        self.antichain
            .iter()
            .map(|cs| {
                let entries = cs
                    .lambda
                    .iter()
                    .map(|t| {
                        t.parse::<Int>().map_err(|_| {
                            DocumentError::Malformed(format!("bad witness entry {t:?}"))
                        })
                    })
                    .collect::<Result<Vec<Int>, DocumentError>>()?;
                let n = problem.chars.len();
                if cs.chars.iter().any(|&i| i >= n) {
                    return Err(DocumentError::Malformed(
                        "state index outside the character set".into(),
                    ));
                }
                Ok(State {
                    mask: BitSet::from_indices(n, cs.chars.iter().copied()),
                    witness: Some(OneParamSubgroup(IntVector(entries))),
                    span_dim: None,
                })
            })
            .collect()
    }

    pub fn from_json(text: &str) -> Result<Checkpoint, DocumentError> {
        let cp: Checkpoint =
            serde_json::from_str(text).map_err(|e| DocumentError::Malformed(e.to_string()))?;
        if cp.schema != CHECKPOINT_SCHEMA {
            return Err(DocumentError::UnknownSchema(cp.schema));
        }
        Ok(cp)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("checkpoint serialization cannot fail")
    }
}

/// Deterministic identity of a problem: family, rank, canonical expression
/// and the full internal character list.
pub fn problem_hash(spec: &ProblemSpec, problem: &Problem) -> String {
    let mut hasher = Sha256::new();
    hasher.update(format!("{}{}|", spec.family, spec.rank).as_bytes());
    hasher.update(spec.rep.as_bytes());
    for c in &problem.chars {
        hasher.update(format!("|{c}").as_bytes());
    }
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checkpoint_roundtrip_and_version_gate() {
        let mut cp = Checkpoint::new("abc".into(), "stable", 123456789012345678901234567u128, 7);
        cp.antichain = vec![CheckpointState {
            lambda: vec!["1".into(), "-1".into()],
            chars: vec![0, 2, 5],
        }];
        cp.dedupe_hashes = Some(vec!["deadbeef".into()]);
        let text = cp.to_json();
        let back = Checkpoint::from_json(&text).unwrap();
        assert_eq!(back, cp);
        assert_eq!(
            back.cursor_value().unwrap(),
            123456789012345678901234567u128
        );

        let bad = text.replace("checkpoint/v1", "checkpoint/v9");
        assert!(matches!(
            Checkpoint::from_json(&bad),
            Err(DocumentError::UnknownSchema(_))
        ));
    }
}
