//! The result document: external coordinates, computed state families and
//! the statistics block.

use super::ProblemSpec;
use crate::exact::{Int, IntVector};
use crate::roots::{RootFamily, RootSystemData};
use num::{Integer, Signed, Zero};
use serde::{Deserialize, Serialize};

pub const RESULT_SCHEMA: &str = "gitstates/result/v1";

#[derive(Debug, thiserror::Error)]
pub enum DocumentError {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("unknown schema version {0:?}")]
    UnknownSchema(String),
}

/// How internal coordinates relate to the natural weight lattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleInfo {
    /// 2 when the problem has half-integral weights (spin representations),
    /// otherwise 1. External coordinates are the natural ones multiplied by
    /// this factor.
    pub char_scale: u32,
    /// The extra projection scale `n+1` for type A, recorded separately;
    /// external type-A coordinates are exponent vectors, already unscaled.
    pub a_projection_scale: Option<u32>,
    /// Common coordinate sum of the type-A exponent vectors, when defined.
    pub level: Option<i64>,
}

/// One maximal state: its witness and its characters in external
/// coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateDocument {
    /// Primitive cocharacter entries, decimal strings (cofactor growth can
    /// exceed 53-bit JSON numbers).
    pub witness: Vec<String>,
    pub characters: Vec<Vec<i64>>,
}

/// One polystable stratum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumDocument {
    pub characters: Vec<Vec<i64>>,
    pub span_dim: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimingsBlock {
    pub weights_ms: u64,
    pub stable_ms: Option<u64>,
    pub semistable_ms: Option<u64>,
    pub polystable_ms: Option<u64>,
}

/// Statistics of a run: input size, essential-set sizes, output sizes,
/// per-phase timings, and the refinement-drop telemetry.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsBlock {
    pub xi_v: usize,
    pub a3: Option<usize>,
    pub b2: Option<usize>,
    pub p_s: Option<usize>,
    pub p_ss: Option<usize>,
    pub p_ps: Option<usize>,
    pub polystable_prededup: Option<usize>,
    pub refine_dropped_stable: Option<usize>,
    pub refine_dropped_semistable: Option<usize>,
    pub assumption_full_dimensional: Option<bool>,
    pub assumption_origin_interior: Option<bool>,
    pub timings: TimingsBlock,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub schema: String,
    pub problem: ProblemSpec,
    pub scale: ScaleInfo,
    /// The full character set in external coordinates, canonical order.
    pub xi_v: Vec<Vec<i64>>,
    pub stable: Option<Vec<StateDocument>>,
    pub semistable: Option<Vec<StateDocument>>,
    pub polystable: Option<Vec<StratumDocument>>,
    pub stats: StatsBlock,
}

impl ResultDocument {
    pub fn from_json(text: &str) -> Result<ResultDocument, DocumentError> {
        let doc: ResultDocument =
            serde_json::from_str(text).map_err(|e| DocumentError::Malformed(e.to_string()))?;
        if doc.schema != RESULT_SCHEMA {
            return Err(DocumentError::UnknownSchema(doc.schema));
        }
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serialization cannot fail")
    }

    /// Copy with zeroed wall-clock fields, for determinism comparisons.
    pub fn without_timings(&self) -> ResultDocument {
        let mut doc = self.clone();
        doc.stats.timings = TimingsBlock {
            weights_ms: 0,
            stable_ms: doc.stats.timings.stable_ms.map(|_| 0),
            semistable_ms: doc.stats.timings.semistable_ms.map(|_| 0),
            polystable_ms: doc.stats.timings.polystable_ms.map(|_| 0),
        };
        doc
    }
}

fn to_i64(x: &Int) -> i64 {
    i64::try_from(x).expect("external coordinate exceeds i64")
}

/// Converts internal characters to external coordinates.
///
/// Type A inverts the scaled sum-zero projection at the recorded level (or
/// at the minimal nonnegative representative when no level is defined);
/// types B/D halve when every coordinate is even, otherwise keep doubled
/// coordinates and record scale 2; type C is the identity.
pub fn external_chars(
    data: &RootSystemData,
    level: Option<&Int>,
    universe: &[IntVector],
) -> (Vec<Vec<i64>>, ScaleInfo) {
    match data.spec.family {
        RootFamily::A => {
            let n1 = Int::from(data.ambient_dim as i64);
            let external: Vec<Vec<i64>> = universe
                .iter()
                .map(|v| {
                    let shift = match level {
                        Some(l) => l.clone(),
                        None => {
                            // minimal s >= max(0, -min v) with s ≡ -v_0 (mod n+1)
                            let min_v = v.0.iter().min().cloned().unwrap_or_else(Int::zero);
                            let base = if min_v.is_negative() {
                                -min_v
                            } else {
                                Int::zero()
                            };
                            let residue = (-&v.0[0]).mod_floor(&n1);
                            let mut s = residue;
                            while s < base {
                                s += &n1;
                            }
                            s
                        }
                    };
                    v.0.iter()
                        .map(|x| {
                            let num = x + &shift;
                            let (q, r) = num.div_rem(&n1);
                            assert!(r.is_zero(), "level representative must be integral");
                            to_i64(&q)
                        })
                        .collect()
                })
                .collect();
            (
                external,
                ScaleInfo {
                    char_scale: 1,
                    a_projection_scale: Some(data.ambient_dim as u32),
                    level: level.map(to_i64),
                },
            )
        }
        RootFamily::B | RootFamily::D => {
            let two = Int::from(2);
            let all_even = universe
                .iter()
                .all(|v| v.0.iter().all(|x| x.is_multiple_of(&two)));
            let external: Vec<Vec<i64>> = universe
                .iter()
                .map(|v| {
                    v.0.iter()
                        .map(|x| {
                            if all_even {
                                to_i64(&(x / &two))
                            } else {
                                to_i64(x)
                            }
                        })
                        .collect()
                })
                .collect();
            (
                external,
                ScaleInfo {
                    char_scale: if all_even { 1 } else { 2 },
                    a_projection_scale: None,
                    level: None,
                },
            )
        }
        RootFamily::C => (
            universe
                .iter()
                .map(|v| v.0.iter().map(to_i64).collect())
                .collect(),
            ScaleInfo {
                char_scale: 1,
                a_projection_scale: None,
                level: None,
            },
        ),
    }
}
