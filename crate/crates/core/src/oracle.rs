//! Brute-force reference implementations used to certify the optimized
//! algorithms on small instances.
//!
//! These deliberately skip every pruning step: no essential-character
//! reduction, no chamber restriction, no insertion-time filtering. Outputs
//! are reduced to canonical Weyl-orbit representatives so set-of-sets
//! equality with the optimized path is well defined.

use crate::exact::{conv_contains_origin, relint_contains_origin, span_dim, IntVector};
use crate::stability::{binomial_u128, next_subset, unrank_subset, BitSet, Problem, State};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Instances above this support size are refused; the oracles are
/// quadratic-to-exponential by design.
pub const ORACLE_SIZE_CAP: usize = 40;

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("instance too large for the oracle: |Ξ_V| = {size} > {cap}")]
    TooLarge { size: usize, cap: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointStability {
    Unstable,
    StrictlySemistable,
    Stable,
}

/// Direct Hilbert–Mumford classification of a state: stable iff the trivial
/// character is interior to the full-dimensional hull, semistable iff it is
/// in the hull at all.
pub fn point_state_stability(rank: usize, state_chars: &[IntVector]) -> PointStability {
    if state_chars.is_empty() {
        return PointStability::Unstable;
    }
    if relint_contains_origin(state_chars) && span_dim(state_chars) == rank {
        return PointStability::Stable;
    }
    if conv_contains_origin(state_chars) {
        return PointStability::StrictlySemistable;
    }
    PointStability::Unstable
}

fn check_cap(problem: &Problem) -> Result<(), OracleError> {
    if problem.chars.len() > ORACLE_SIZE_CAP {
        return Err(OracleError::TooLarge {
            size: problem.chars.len(),
            cap: ORACLE_SIZE_CAP,
        });
    }
    Ok(())
}

fn maximal_elements(states: Vec<BitSet>) -> Vec<BitSet> {
    let mut distinct: Vec<BitSet> = Vec::new();
    for s in states {
        if !distinct.contains(&s) {
            distinct.push(s);
        }
    }
    distinct
        .iter()
        .filter(|s| !distinct.iter().any(|t| s.is_strict_subset(t)))
        .cloned()
        .collect()
}

fn orbit_reps(problem: &Problem, states: Vec<BitSet>) -> Vec<BitSet> {
    let mut reps: Vec<BitSet> = states
        .into_iter()
        .map(|s| problem.canonical_orbit_rep(&s))
        .collect();
    reps.sort();
    reps.dedup();
    reps
}

/// Canonical orbit representatives of a list of computed states, for
/// comparison against the oracles.
pub fn orbit_rep_set(problem: &Problem, states: &[State]) -> Vec<BitSet> {
    orbit_reps(problem, states.iter().map(|s| s.mask.clone()).collect())
}

/// All maximal non-stable states, enumerated over every linearly independent
/// `(d-1)`-subset of the full nonzero character set with both signs of each
/// witness, reduced modulo the Weyl group.
pub fn brute_nonstable(problem: &Problem) -> Result<Vec<BitSet>, OracleError> {
    check_cap(problem)?;
    let pool: Vec<usize> = (0..problem.chars.len())
        .filter(|&i| !problem.chars[i].is_zero())
        .collect();
    let k = problem.rank() - 1;
    let dim = problem.ambient_dim();
    let mut states: Vec<BitSet> = Vec::new();
    let total = binomial_u128(pool.len(), k);
    if total == 0 {
        return Ok(Vec::new());
    }
    let mut subset = unrank_subset(pool.len(), k, 0);
    loop {
        let mut rows: Vec<IntVector> = subset
            .iter()
            .map(|&i| problem.chars[pool[i]].clone())
            .collect();
        if let Some(c) = problem.data.cochar_constraint() {
            rows.push(c);
        }
        if let Some(lambda) = crate::exact::nullspace_primitive(&rows, dim) {
            states.push(problem.halfspace_state(&lambda));
            states.push(problem.halfspace_state(&lambda.neg()));
        }
        if !next_subset(&mut subset, pool.len()) {
            break;
        }
    }
    Ok(orbit_reps(problem, maximal_elements(states)))
}

/// All maximal unstable states, enumerated over every `d`-subset of the full
/// nonzero character set (equal positive pairing construction, no chamber
/// restriction), reduced modulo the Weyl group.
pub fn brute_unstable(problem: &Problem) -> Result<Vec<BitSet>, OracleError> {
    check_cap(problem)?;
    let pool: Vec<usize> = (0..problem.chars.len())
        .filter(|&i| !problem.chars[i].is_zero())
        .collect();
    let k = problem.rank();
    let dim = problem.ambient_dim();
    let mut states: Vec<BitSet> = Vec::new();
    let total = binomial_u128(pool.len(), k);
    if total == 0 {
        return Ok(Vec::new());
    }
    let mut subset = unrank_subset(pool.len(), k, 0);
    loop {
        let first = &problem.chars[pool[subset[0]]];
        let mut rows: Vec<IntVector> = subset[1..]
            .iter()
            .map(|&i| problem.chars[pool[i]].sub(first))
            .collect();
        if let Some(c) = problem.data.cochar_constraint() {
            rows.push(c);
        }
        if let Some(lambda) = crate::exact::nullspace_primitive(&rows, dim) {
            let c = lambda.dot(first);
            if !num::Zero::is_zero(&c) {
                let lam = if num::Signed::is_negative(&c) {
                    lambda.neg()
                } else {
                    lambda
                };
                states.push(problem.strict_halfspace_state(&lam));
            }
        }
        if !next_subset(&mut subset, pool.len()) {
            break;
        }
    }
    Ok(orbit_reps(problem, maximal_elements(states)))
}

/// Result of the randomized Hilbert–Mumford cross-check.
#[derive(Clone, Debug)]
pub struct ConsistencyReport {
    pub samples: usize,
    pub disagreements: usize,
    pub first_disagreement: Option<String>,
}

impl ConsistencyReport {
    pub fn consistent(&self) -> bool {
        self.disagreements == 0
    }
}

/// Draws random subsets of `Ξ_V`, classifies each directly, and checks the
/// classification against containment in Weyl translates of the computed
/// maximal states: unstable iff some translate fits inside a member of
/// `P_ss^F`, non-stable iff likewise for `P_s^F`.
pub fn hilbert_mumford_consistency(
    problem: &Problem,
    p_s: &[State],
    p_ss: &[State],
    samples: usize,
    seed: u64,
) -> ConsistencyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = problem.chars.len();
    let weyl_count = problem.data.weyl_elements.len();
    let mut disagreements = 0;
    let mut first_disagreement = None;

    let contained_in_translate = |mask: &BitSet, family: &[State]| -> bool {
        (0..weyl_count).any(|wi| {
            let image = problem.apply_weyl_to_mask(wi, mask);
            family.iter().any(|p| image.is_subset(&p.mask))
        })
    };

    for sample in 0..samples {
        let mask = BitSet::from_indices(n, (0..n).filter(|_| rng.gen_bool(0.5)));
        let chars = problem.chars_of(&mask);
        let direct = point_state_stability(problem.rank(), &chars);
        let unstable_by_list = contained_in_translate(&mask, p_ss);
        let nonstable_by_list = contained_in_translate(&mask, p_s);
        let ok = match direct {
            PointStability::Unstable => unstable_by_list && nonstable_by_list,
            PointStability::StrictlySemistable => !unstable_by_list && nonstable_by_list,
            PointStability::Stable => !unstable_by_list && !nonstable_by_list,
        };
        if !ok {
            disagreements += 1;
            if first_disagreement.is_none() {
                first_disagreement = Some(format!(
                    "sample {sample}: direct {direct:?}, unstable-by-list {unstable_by_list}, nonstable-by-list {nonstable_by_list}, state {:?}",
                    chars
                ));
            }
        }
    }
    ConsistencyReport {
        samples,
        disagreements,
        first_disagreement,
    }
}
