//! Maximal non-stable states, maximal unstable states, and the polystable
//! stratification for a torus action with Weyl symmetry.
//!
//! The input is the indexed character set `Ξ_V` of a representation. States
//! are stored as bitmasks over that index, so subset tests cost
//! `O(|Ξ_V|/64)` words; enumeration over subsets of the essential characters
//! is partitioned into contiguous lexicographic ranges processed by
//! independent workers, and the final result is a pure function of the
//! input, independent of partitioning, worker count and flag choices.

use crate::exact::{
    conv_contains_origin, nullspace_primitive, relint_contains_origin, span_dim, Int, IntVector,
    Subspace,
};
use crate::roots::RootSystemData;
use crate::weights::WeightSystem;
use num::{Signed, Zero};
use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

/// Membership bitmask over an indexed character set.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BitSet {
    words: Vec<u64>,
    universe: usize,
}

impl BitSet {
    pub fn new(universe: usize) -> Self {
        BitSet {
            words: vec![0; universe.div_ceil(64)],
            universe,
        }
    }

    pub fn from_indices(universe: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = BitSet::new(universe);
        for i in indices {
            s.insert(i);
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.universe);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_strict_subset(&self, other: &BitSet) -> bool {
        self.is_subset(other) && self != other
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    /// 64-bit FNV-1a over the mask words; stable across runs, used for
    /// stream deduplication.
    pub fn fnv_hash(&self) -> u64 {
        let mut h = 0xcbf29ce484222325u64;
        for w in &self.words {
            for byte in w.to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        }
        h
    }
}

impl PartialOrd for BitSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BitSet {
    /// Lexicographic order on the ascending index lists; with characters
    /// sorted canonically this is the lexicographic order on sorted
    /// character lists.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.iter().cmp(other.iter())
    }
}

/// A primitive cocharacter acting as a destabilizing witness.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct OneParamSubgroup(pub IntVector);

impl OneParamSubgroup {
    /// Normalizes to the primitive vector on the same ray.
    pub fn from_vector(v: IntVector) -> Option<Self> {
        if v.is_zero() {
            return None;
        }
        Some(OneParamSubgroup(v.primitive()))
    }
}

/// A state with its provenance: the characters (as a mask over the problem's
/// `Ξ_V`), the defining one-parameter subgroup when one exists, and the span
/// dimension for polystable strata.
#[derive(Clone, Debug)]
pub struct State {
    pub mask: BitSet,
    pub witness: Option<OneParamSubgroup>,
    pub span_dim: Option<usize>,
}

impl PartialEq for State {
    fn eq(&self, other: &Self) -> bool {
        self.mask == other.mask
    }
}
impl Eq for State {}

#[derive(Clone, Debug)]
pub struct StabilityOptions {
    /// Refine with the full Weyl group instead of the ray-stabilizer subset.
    pub use_full_weyl: bool,
    /// Skip the containment direction of the antichain test for states whose
    /// zero slice certifies maximality. Result-identical on or off.
    pub fastpath: bool,
    pub workers: usize,
    /// Treat the problem as a bare torus action: no essential-character
    /// pruning, no chamber restriction, no Weyl refinement.
    pub reductive_fallback: bool,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        StabilityOptions {
            use_full_weyl: false,
            fastpath: false,
            workers: 1,
            reductive_fallback: false,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum StabilityError {
    #[error("the character set is empty")]
    EmptyCharacterSet,
    #[error("the character set spans dimension zero")]
    RankZeroSystem,
    #[error("character {0} escapes the character set under the Weyl action")]
    NotWeylClosed(String),
    #[error("assumption violated: {0}")]
    AssumptionViolated(String),
    #[error("checkpoint sink: {0}")]
    CheckpointSink(#[from] std::io::Error),
}

/// The indexed problem: root data plus the canonically sorted `Ξ_V`.
pub struct Problem {
    pub data: RootSystemData,
    pub chars: Vec<IntVector>,
    index: HashMap<IntVector, usize>,
    weyl_perms: OnceLock<Vec<Vec<u32>>>,
}

impl Problem {
    pub fn new(data: RootSystemData, mut chars: Vec<IntVector>) -> Result<Problem, StabilityError> {
        chars.sort();
        chars.dedup();
        if chars.is_empty() {
            return Err(StabilityError::EmptyCharacterSet);
        }
        let index: HashMap<IntVector, usize> = chars
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i))
            .collect();
        // Closure under the simple reflections implies closure under the
        // whole Weyl group; supports of weight systems always pass.
        for chi in &chars {
            for alpha in &data.simple_roots {
                let num = chi.dot(alpha) * Int::from(2);
                let den = alpha.dot(alpha);
                let coeff = &num / &den;
                let closed =
                    (&coeff * &den == num) && index.contains_key(&chi.sub(&alpha.scale(&coeff)));
                if !closed {
                    return Err(StabilityError::NotWeylClosed(chi.to_string()));
                }
            }
        }
        let problem = Problem {
            data,
            chars,
            index,
            weyl_perms: OnceLock::new(),
        };
        Ok(problem)
    }

    pub fn from_weight_system(
        data: RootSystemData,
        ws: &WeightSystem,
    ) -> Result<Problem, StabilityError> {
        Problem::new(data, ws.support())
    }

    pub fn rank(&self) -> usize {
        self.data.spec.rank
    }

    pub fn ambient_dim(&self) -> usize {
        self.data.ambient_dim
    }

    pub fn index_of(&self, chi: &IntVector) -> Option<usize> {
        self.index.get(chi).copied()
    }

    pub fn zero_char_index(&self) -> Option<usize> {
        self.chars.iter().position(|c| c.is_zero())
    }

    pub fn chars_of(&self, mask: &BitSet) -> Vec<IntVector> {
        mask.iter().map(|i| self.chars[i].clone()).collect()
    }

    /// Index permutations induced on `Ξ_V` by each Weyl element, built once
    /// on demand. Panics if the set is not Weyl-invariant, which cannot
    /// happen for supports of weight systems.
    pub fn weyl_index_perms(&self) -> &Vec<Vec<u32>> {
        self.weyl_perms.get_or_init(|| {
            self.data
                .weyl_elements
                .iter()
                .map(|w| {
                    self.chars
                        .iter()
                        .map(|c| {
                            let img = w.apply(c);
                            *self
                                .index
                                .get(&img)
                                .unwrap_or_else(|| panic!("character set not Weyl-closed at {img}"))
                                as u32
                        })
                        .collect()
                })
                .collect()
        })
    }

    pub fn apply_weyl_to_mask(&self, weyl_index: usize, mask: &BitSet) -> BitSet {
        let perm = &self.weyl_index_perms()[weyl_index];
        BitSet::from_indices(mask.universe(), mask.iter().map(|i| perm[i] as usize))
    }

    /// Indices (into `weyl_elements`) of the ray-stabilizing refinement set.
    pub fn w_prime_indices(&self) -> Vec<usize> {
        self.data
            .weyl_elements
            .iter()
            .enumerate()
            .filter(|(_, w)| {
                !w.is_identity() && self.data.chamber_rays.iter().any(|g| w.apply(g) == *g)
            })
            .map(|(i, _)| i)
            .collect()
    }

    /// The lexicographically least Weyl translate of a state; the canonical
    /// representative of its orbit.
    pub fn canonical_orbit_rep(&self, mask: &BitSet) -> BitSet {
        let perms = self.weyl_index_perms();
        let mut best = mask.clone();
        for wi in 0..perms.len() {
            let img = self.apply_weyl_to_mask(wi, mask);
            if img < best {
                best = img;
            }
        }
        best
    }

    fn ray_pairings(&self) -> Vec<Vec<Int>> {
        self.data
            .chamber_rays
            .iter()
            .map(|g| self.chars.iter().map(|c| g.dot(c)).collect())
            .collect()
    }

    /// The state `Ξ_{V,λ≥0}` as a mask.
    pub fn halfspace_state(&self, lambda: &IntVector) -> BitSet {
        BitSet::from_indices(
            self.chars.len(),
            self.chars
                .iter()
                .enumerate()
                .filter(|(_, c)| !lambda.dot(c).is_negative())
                .map(|(i, _)| i),
        )
    }

    /// The state `Ξ_{V,λ>0}` as a mask.
    pub fn strict_halfspace_state(&self, lambda: &IntVector) -> BitSet {
        BitSet::from_indices(
            self.chars.len(),
            self.chars
                .iter()
                .enumerate()
                .filter(|(_, c)| lambda.dot(c).is_positive())
                .map(|(i, _)| i),
        )
    }

    /// The slice `Ξ_{V,λ=0}` as a mask.
    pub fn zero_slice(&self, lambda: &IntVector) -> BitSet {
        BitSet::from_indices(
            self.chars.len(),
            self.chars
                .iter()
                .enumerate()
                .filter(|(_, c)| lambda.dot(c).is_zero())
                .map(|(i, _)| i),
        )
    }
}

/// Essential characters for the stable-locus enumeration: characters whose
/// orthogonal hyperplane meets the chamber nontrivially, one representative
/// per proportionality class (first in canonical order kept).
pub fn essential_stable(problem: &Problem) -> Vec<usize> {
    let rays = problem.ray_pairings();
    let n = problem.chars.len();
    let mut a3: Vec<usize> = Vec::new();
    let mut directions: Vec<IntVector> = Vec::new();
    for i in 0..n {
        let in_union = rays.iter().any(|p| !p[i].is_negative());
        let in_intersection = rays.iter().all(|p| p[i].is_positive());
        if !in_union || in_intersection {
            continue; // outside A1
        }
        if problem.chars[i].is_zero() {
            continue; // A2 strips the trivial character
        }
        let dir = problem.chars[i].direction();
        if directions.contains(&dir) {
            continue;
        }
        directions.push(dir);
        a3.push(i);
    }
    a3
}

/// Essential characters for the semistable-locus enumeration:
/// `B₂ = ⋃ Ξ_{V,γᵢ>0} minus the non-minimal elements of ⋂ Ξ_{V,γᵢ>0}`,
/// where `χ` dominates `χ'` when every ray pairing is strictly larger.
pub fn essential_semistable(problem: &Problem) -> Vec<usize> {
    let rays = problem.ray_pairings();
    let n = problem.chars.len();
    let b1: Vec<usize> = (0..n)
        .filter(|&i| rays.iter().any(|p| p[i].is_positive()))
        .collect();
    let k: Vec<usize> = (0..n)
        .filter(|&i| rays.iter().all(|p| p[i].is_positive()))
        .collect();
    let dominates = |i: usize, j: usize| rays.iter().all(|p| p[i] > p[j]);
    let k_nm: HashSet<usize> = k
        .iter()
        .copied()
        .filter(|&i| k.iter().any(|&j| dominates(i, j)))
        .collect();
    b1.into_iter().filter(|i| !k_nm.contains(i)).collect()
}

/// Diagnostic result of the semistable-locus precondition.
#[derive(Clone, Debug)]
pub struct AssumptionReport {
    pub full_dimensional: bool,
    pub origin_interior: bool,
    pub detail: String,
}

impl AssumptionReport {
    pub fn holds(&self) -> bool {
        self.full_dimensional && self.origin_interior
    }
}

/// Checks that the state spans the full rank and that the trivial character
/// lies in the interior of its convex hull.
pub fn assumption_check(problem: &Problem) -> AssumptionReport {
    let dim = span_dim(&problem.chars);
    let full_dimensional = dim == problem.rank();
    let origin_interior = relint_contains_origin(&problem.chars);
    let detail = match (full_dimensional, origin_interior) {
        (true, true) => "state is full-dimensional with interior trivial character".to_string(),
        (false, _) => format!("state spans dimension {dim} < rank {}", problem.rank()),
        (true, false) => "trivial character not interior to Conv(Ξ_V)".to_string(),
    };
    AssumptionReport {
        full_dimensional,
        origin_interior,
        detail,
    }
}

/// Sufficient (not necessary) maximality certificate for a non-stable state:
/// the zero slice spans a hyperplane and contains the trivial character in
/// its relative interior.
pub fn maximality_fastpath(rank: usize, zero_slice_chars: &[IntVector]) -> bool {
    if zero_slice_chars.is_empty() {
        return false;
    }
    span_dim(zero_slice_chars) + 1 == rank && relint_contains_origin(zero_slice_chars)
}

// ---------------------------------------------------------------------------
// Lexicographic k-subset enumeration with a rank cursor.
// ---------------------------------------------------------------------------

/// `C(m, k)` as u128; panics on overflow (far beyond any supported scale).
pub fn binomial_u128(m: usize, k: usize) -> u128 {
    if k > m {
        return 0;
    }
    let mut r: u128 = 1;
    for t in 1..=k {
        r = r
            .checked_mul((m - k + t) as u128)
            .expect("binomial overflow")
            / t as u128;
    }
    r
}

/// The `rank`-th k-subset of `0..m` in lexicographic order.
pub fn unrank_subset(m: usize, k: usize, mut rank: u128) -> Vec<usize> {
    let mut subset = Vec::with_capacity(k);
    let mut next = 0;
    let mut remaining = k;
    while remaining > 0 {
        let with_next = binomial_u128(m - next - 1, remaining - 1);
        if rank < with_next {
            subset.push(next);
            remaining -= 1;
        } else {
            rank -= with_next;
        }
        next += 1;
    }
    subset
}

/// Advances a k-subset of `0..m` to its lexicographic successor; `false` at
/// the end.
pub fn next_subset(subset: &mut [usize], m: usize) -> bool {
    let k = subset.len();
    for i in (0..k).rev() {
        if subset[i] < m - (k - i) {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

// ---------------------------------------------------------------------------
// Candidate generation and the antichain reduction.
// ---------------------------------------------------------------------------

enum CandidateKind {
    /// Non-stable: λ orthogonal to the subset, `Ξ_{V,λ≥0}`.
    NonStable,
    /// Unstable: λ with equal positive pairings on the subset, `Ξ_{V,λ>0}`.
    Unstable,
}

struct Candidate {
    mask: BitSet,
    witness: OneParamSubgroup,
    certified_maximal: bool,
}

struct Generator<'a> {
    problem: &'a Problem,
    pool: &'a [usize],
    kind: CandidateKind,
    chamber_restricted: bool,
    fastpath: bool,
}

impl Generator<'_> {
    /// The witness lines produced by one subset. At most one candidate in
    /// chamber-restricted mode; in fallback mode the non-stable case emits
    /// both signs.
    fn candidates_for(&self, subset: &[usize], out: &mut Vec<Candidate>) {
        let problem = self.problem;
        let dim = problem.ambient_dim();
        let mut rows: Vec<IntVector> = Vec::with_capacity(subset.len() + 1);
        match self.kind {
            CandidateKind::NonStable => {
                for &i in subset {
                    rows.push(problem.chars[self.pool[i]].clone());
                }
            }
            CandidateKind::Unstable => {
                let first = &problem.chars[self.pool[subset[0]]];
                for &i in &subset[1..] {
                    rows.push(problem.chars[self.pool[i]].sub(first));
                }
            }
        }
        if let Some(constraint) = problem.data.cochar_constraint() {
            rows.push(constraint);
        }
        let Some(lambda) = nullspace_primitive(&rows, dim) else {
            return; // dependent subset
        };

        match self.kind {
            CandidateKind::NonStable => {
                if self.chamber_restricted {
                    let lam = if problem.data.in_chamber(&lambda) {
                        lambda
                    } else {
                        let neg = lambda.neg();
                        if !problem.data.in_chamber(&neg) {
                            return;
                        }
                        neg
                    };
                    out.push(self.nonstable_candidate(lam));
                } else {
                    let neg = lambda.neg();
                    out.push(self.nonstable_candidate(lambda));
                    out.push(self.nonstable_candidate(neg));
                }
            }
            CandidateKind::Unstable => {
                let first = &problem.chars[self.pool[subset[0]]];
                let c = lambda.dot(first);
                if c.is_zero() {
                    return; // the common value must be strictly positive
                }
                let lam = if c.is_negative() {
                    lambda.neg()
                } else {
                    lambda
                };
                if self.chamber_restricted && !problem.data.in_chamber(&lam) {
                    return;
                }
                let mask = problem.strict_halfspace_state(&lam);
                out.push(Candidate {
                    mask,
                    witness: OneParamSubgroup(lam),
                    certified_maximal: false,
                });
            }
        }
    }

    fn nonstable_candidate(&self, lam: IntVector) -> Candidate {
        let problem = self.problem;
        let mask = problem.halfspace_state(&lam);
        let certified_maximal = if self.fastpath {
            let slice = problem.zero_slice(&lam);
            let slice_chars = problem.chars_of(&slice);
            maximality_fastpath(problem.rank(), &slice_chars)
        } else {
            false
        };
        Candidate {
            mask,
            witness: OneParamSubgroup(lam),
            certified_maximal,
        }
    }
}

/// Insertion-time antichain maintenance. Equal masks keep the least witness
/// so results do not depend on enumeration order or partitioning.
fn antichain_insert(retained: &mut Vec<Candidate>, cand: Candidate) {
    for s in retained.iter_mut() {
        if s.mask == cand.mask {
            if cand.witness < s.witness {
                s.witness = cand.witness;
            }
            s.certified_maximal |= cand.certified_maximal;
            return;
        }
    }
    if !cand.certified_maximal {
        for s in retained.iter() {
            if cand.mask.is_strict_subset(&s.mask) {
                return;
            }
        }
    }
    retained.retain(|s| !s.mask.is_strict_subset(&cand.mask));
    retained.push(cand);
}

fn merge_antichains(parts: Vec<Vec<Candidate>>) -> Vec<Candidate> {
    let mut merged: Vec<Candidate> = Vec::new();
    for part in parts {
        for cand in part {
            antichain_insert(&mut merged, cand);
        }
    }
    merged
}

fn enumerate_range(
    generator: &Generator<'_>,
    k: usize,
    range: std::ops::Range<u128>,
) -> Vec<Candidate> {
    let m = generator.pool.len();
    let mut retained: Vec<Candidate> = Vec::new();
    if range.is_empty() {
        return retained;
    }
    let mut seen_lambdas: HashSet<IntVector> = HashSet::new();
    let mut subset = unrank_subset(m, k, range.start);
    let mut scratch = Vec::with_capacity(2);
    let mut remaining = range.end - range.start;
    loop {
        scratch.clear();
        generator.candidates_for(&subset, &mut scratch);
        for cand in scratch.drain(..) {
            if seen_lambdas.insert(cand.witness.0.clone()) {
                antichain_insert(&mut retained, cand);
            }
        }
        remaining -= 1;
        if remaining == 0 || !next_subset(&mut subset, m) {
            break;
        }
    }
    retained
}

fn enumerate_parallel(generator: &Generator<'_>, k: usize, workers: usize) -> Vec<Candidate> {
    let m = generator.pool.len();
    let total = binomial_u128(m, k);
    let workers = workers
        .max(1)
        .min(usize::try_from(total).unwrap_or(usize::MAX).max(1));
    if workers == 1 || total <= 1 {
        return enumerate_range(generator, k, 0..total);
    }
    let bounds: Vec<u128> = (0..=workers as u128)
        .map(|i| total * i / workers as u128)
        .collect();
    let parts = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let range = bounds[w]..bounds[w + 1];
                scope.spawn(move || enumerate_range(generator, k, range))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect::<Vec<_>>()
    });
    merge_antichains(parts)
}

/// Which family of maximal states an enumeration produces.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EnumerationKind {
    /// Non-stable states `Ξ_{V,λ≥0}` from `(d-1)`-subsets.
    NonStable,
    /// Unstable states `Ξ_{V,λ>0}` from `d`-subsets.
    Unstable,
}

/// Single-worker enumeration with periodic checkpoints.
///
/// The callback receives the lexicographic rank of the last completed
/// subset together with the current global antichain, and a run resumes
/// from exactly such a pair; the final outcome is identical to an
/// uninterrupted run.
pub fn max_states_checkpointed(
    problem: &Problem,
    options: &StabilityOptions,
    kind: EnumerationKind,
    start_cursor: u128,
    seed: Vec<State>,
    checkpoint_every: u64,
    checkpoint: &mut dyn FnMut(u128, &[State]) -> std::io::Result<()>,
) -> Result<MaxStatesOutcome, StabilityError> {
    check_nonempty(problem)?;
    if kind == EnumerationKind::Unstable && !options.reductive_fallback {
        let report = assumption_check(problem);
        if !report.holds() {
            return Err(StabilityError::AssumptionViolated(report.detail));
        }
    }
    let pool: Vec<usize> = if options.reductive_fallback {
        (0..problem.chars.len())
            .filter(|&i| !problem.chars[i].is_zero())
            .collect()
    } else {
        match kind {
            EnumerationKind::NonStable => essential_stable(problem),
            EnumerationKind::Unstable => essential_semistable(problem),
        }
    };
    let k = match kind {
        EnumerationKind::NonStable => problem.rank() - 1,
        EnumerationKind::Unstable => problem.rank(),
    };
    let generator = Generator {
        problem,
        pool: &pool,
        kind: match kind {
            EnumerationKind::NonStable => CandidateKind::NonStable,
            EnumerationKind::Unstable => CandidateKind::Unstable,
        },
        chamber_restricted: !options.reductive_fallback,
        fastpath: options.fastpath && kind == EnumerationKind::NonStable,
    };

    let mut retained: Vec<Candidate> = seed
        .into_iter()
        .map(|s| Candidate {
            witness: s.witness.expect("seeded states carry witnesses"),
            mask: s.mask,
            certified_maximal: false,
        })
        .collect();
    let mut seen_lambdas: HashSet<IntVector> =
        retained.iter().map(|c| c.witness.0.clone()).collect();

    let m = pool.len();
    let total = binomial_u128(m, k);
    let snapshot = |retained: &[Candidate]| -> Vec<State> {
        let mut states: Vec<State> = retained
            .iter()
            .map(|c| State {
                mask: c.mask.clone(),
                witness: Some(c.witness.clone()),
                span_dim: None,
            })
            .collect();
        states.sort_by(|a, b| a.mask.cmp(&b.mask));
        states
    };
    if start_cursor < total {
        let mut subset = unrank_subset(m, k, start_cursor);
        let mut cursor = start_cursor;
        let mut scratch = Vec::with_capacity(2);
        loop {
            scratch.clear();
            generator.candidates_for(&subset, &mut scratch);
            for cand in scratch.drain(..) {
                if seen_lambdas.insert(cand.witness.0.clone()) {
                    antichain_insert(&mut retained, cand);
                }
            }
            if (cursor - start_cursor + 1).is_multiple_of(checkpoint_every as u128) {
                checkpoint(cursor, &snapshot(&retained))?;
            }
            cursor += 1;
            if cursor >= total || !next_subset(&mut subset, m) {
                break;
            }
        }
        checkpoint(cursor - 1, &snapshot(&retained))?;
    }

    let mut outcome = finish(problem, retained, options);
    outcome.essential = pool;
    Ok(outcome)
}

// ---------------------------------------------------------------------------
// The three main computations.
// ---------------------------------------------------------------------------

/// Output of the stable or semistable computation.
#[derive(Clone, Debug)]
pub struct MaxStatesOutcome {
    /// The maximal states, canonically sorted.
    pub states: Vec<State>,
    /// Number of candidates removed by the cross-chamber Weyl refinement;
    /// conjecturally always zero.
    pub refine_dropped: usize,
    /// Indices into the problem's `Ξ_V` of the essential character set used
    /// (`A₃` for stable, `B₂` for semistable).
    pub essential: Vec<usize>,
}

fn finish(
    problem: &Problem,
    candidates: Vec<Candidate>,
    options: &StabilityOptions,
) -> MaxStatesOutcome {
    let mut states: Vec<State> = candidates
        .into_iter()
        .map(|c| State {
            mask: c.mask,
            witness: Some(c.witness),
            span_dim: None,
        })
        .collect();
    states.sort_by(|a, b| a.mask.cmp(&b.mask));
    let (states, refine_dropped) = if options.reductive_fallback {
        (states, 0)
    } else {
        weyl_refine(problem, states, options.use_full_weyl)
    };
    MaxStatesOutcome {
        states,
        refine_dropped,
        essential: Vec::new(),
    }
}

/// Retains a state unless some refinement-set translate of it is strictly
/// contained in another candidate; also reports how many were dropped.
pub fn weyl_refine(
    problem: &Problem,
    candidates: Vec<State>,
    use_full_weyl: bool,
) -> (Vec<State>, usize) {
    let refinement: Vec<usize> = if use_full_weyl {
        (0..problem.data.weyl_elements.len()).collect()
    } else {
        problem.w_prime_indices()
    };
    let masks: Vec<BitSet> = candidates.iter().map(|s| s.mask.clone()).collect();
    let mut kept = Vec::with_capacity(candidates.len());
    let mut dropped = 0;
    for s in candidates {
        let doomed = refinement.iter().any(|&wi| {
            let image = problem.apply_weyl_to_mask(wi, &s.mask);
            masks.iter().any(|t| image.is_strict_subset(t))
        });
        if doomed {
            dropped += 1;
        } else {
            kept.push(s);
        }
    }
    (kept, dropped)
}

fn check_nonempty(problem: &Problem) -> Result<(), StabilityError> {
    if problem.chars.is_empty() {
        return Err(StabilityError::EmptyCharacterSet);
    }
    if span_dim(&problem.chars) == 0 {
        return Err(StabilityError::RankZeroSystem);
    }
    Ok(())
}

/// The set `P_s^F` of maximal non-stable states `Ξ_{V,λ≥0}` with `λ` in the
/// fundamental chamber.
pub fn stable_max_states(
    problem: &Problem,
    options: &StabilityOptions,
) -> Result<MaxStatesOutcome, StabilityError> {
    check_nonempty(problem)?;
    let pool: Vec<usize> = if options.reductive_fallback {
        (0..problem.chars.len())
            .filter(|&i| !problem.chars[i].is_zero())
            .collect()
    } else {
        essential_stable(problem)
    };
    let generator = Generator {
        problem,
        pool: &pool,
        kind: CandidateKind::NonStable,
        chamber_restricted: !options.reductive_fallback,
        fastpath: options.fastpath,
    };
    let k = problem.rank() - 1;
    let candidates = enumerate_parallel(&generator, k, options.workers);
    let mut outcome = finish(problem, candidates, options);
    outcome.essential = pool;
    Ok(outcome)
}

/// The set `P_ss^F` of maximal unstable states `Ξ_{V,λ>0}` with `λ` in the
/// fundamental chamber. Refuses to run when the full-dimensionality
/// assumption fails, unless the reductive fallback is forced.
pub fn semistable_max_states(
    problem: &Problem,
    options: &StabilityOptions,
) -> Result<MaxStatesOutcome, StabilityError> {
    check_nonempty(problem)?;
    if !options.reductive_fallback {
        let report = assumption_check(problem);
        if !report.holds() {
            return Err(StabilityError::AssumptionViolated(report.detail));
        }
    }
    let pool: Vec<usize> = if options.reductive_fallback {
        (0..problem.chars.len())
            .filter(|&i| !problem.chars[i].is_zero())
            .collect()
    } else {
        essential_semistable(problem)
    };
    let generator = Generator {
        problem,
        pool: &pool,
        kind: CandidateKind::Unstable,
        chamber_restricted: !options.reductive_fallback,
        fastpath: false,
    };
    let k = problem.rank();
    let candidates = enumerate_parallel(&generator, k, options.workers);
    let mut outcome = finish(problem, candidates, options);
    outcome.essential = pool;
    Ok(outcome)
}

/// The polystable stratification `P_ps^F` computed from `P_s^F`.
///
/// Zero slices of the maximal non-stable states whose hull contains the
/// trivial character in its relative interior are strata; slices merely
/// containing it are searched for deeper strata over the distinct proper
/// linear spans of their subsets (the matroid flats), and the result is
/// deduplicated modulo the full Weyl action by canonical orbit
/// representatives.
pub fn polystable_strata(problem: &Problem, p_s: &[State], skip_weyl_dedup: bool) -> Vec<State> {
    let (strata, _) = polystable_strata_with_prededup(problem, p_s, skip_weyl_dedup);
    strata
}

/// As [`polystable_strata`], also reporting the number of strata found
/// before the Weyl deduplication.
pub fn polystable_strata_with_prededup(
    problem: &Problem,
    p_s: &[State],
    skip_weyl_dedup: bool,
) -> (Vec<State>, usize) {
    let mut emitted: HashMap<BitSet, usize> = HashMap::new(); // mask -> span dim
    let mut pending: Vec<BitSet> = Vec::new();

    for state in p_s {
        let lambda = &state
            .witness
            .as_ref()
            .expect("stable states carry witnesses")
            .0;
        let slice = problem.zero_slice(lambda);
        if slice.is_empty() {
            continue;
        }
        let slice_chars = problem.chars_of(&slice);
        if relint_contains_origin(&slice_chars) {
            emitted
                .entry(slice.clone())
                .or_insert_with(|| span_dim(&slice_chars));
        }
        if conv_contains_origin(&slice_chars) {
            pending.push(slice);
        }
    }

    for t_mask in pending {
        let t_chars = problem.chars_of(&t_mask);
        let t_dim = span_dim(&t_chars);
        // Enumerate flats of the restriction matroid with rank below t_dim.
        let mut seen: HashSet<Subspace> = HashSet::new();
        let mut queue: Vec<Subspace> = vec![Subspace::zero(problem.ambient_dim())];
        seen.insert(queue[0].clone());
        while let Some(flat) = queue.pop() {
            let t_prime: Vec<IntVector> = t_chars
                .iter()
                .filter(|c| flat.contains(c))
                .cloned()
                .collect();
            if !t_prime.is_empty() && relint_contains_origin(&t_prime) {
                let stratum = BitSet::from_indices(
                    problem.chars.len(),
                    (0..problem.chars.len()).filter(|&i| flat.contains(&problem.chars[i])),
                );
                emitted.entry(stratum).or_insert(flat.rank());
            }
            if flat.rank() + 1 < t_dim {
                for c in &t_chars {
                    if let Some(next) = flat.extend(c) {
                        if seen.insert(next.clone()) {
                            queue.push(next);
                        }
                    }
                }
            }
        }
    }

    let prededup = emitted.len();
    let mut strata: Vec<State> = if skip_weyl_dedup {
        emitted
            .into_iter()
            .map(|(mask, dim)| State {
                mask,
                witness: None,
                span_dim: Some(dim),
            })
            .collect()
    } else {
        let mut orbits: HashMap<BitSet, (BitSet, usize)> = HashMap::new();
        for (mask, dim) in emitted {
            let key = problem.canonical_orbit_rep(&mask);
            match orbits.get_mut(&key) {
                Some(best) => {
                    if mask < best.0 {
                        *best = (mask, dim);
                    }
                }
                None => {
                    orbits.insert(key, (mask, dim));
                }
            }
        }
        orbits
            .into_values()
            .map(|(mask, dim)| State {
                mask,
                witness: None,
                span_dim: Some(dim),
            })
            .collect()
    };
    strata.sort_by(|a, b| a.mask.cmp(&b.mask));
    (strata, prededup)
}

/// Literal powerset variant of the deeper-strata search, used to validate
/// the span enumeration on small slices.
pub fn polystable_strata_powerset(
    problem: &Problem,
    p_s: &[State],
    skip_weyl_dedup: bool,
) -> Vec<State> {
    let mut emitted: HashMap<BitSet, usize> = HashMap::new();
    let mut pending: Vec<BitSet> = Vec::new();
    for state in p_s {
        let lambda = &state.witness.as_ref().expect("witness").0;
        let slice = problem.zero_slice(lambda);
        if slice.is_empty() {
            continue;
        }
        let slice_chars = problem.chars_of(&slice);
        if relint_contains_origin(&slice_chars) {
            emitted
                .entry(slice.clone())
                .or_insert_with(|| span_dim(&slice_chars));
        }
        if conv_contains_origin(&slice_chars) {
            pending.push(slice);
        }
    }
    for t_mask in pending {
        let t_indices: Vec<usize> = t_mask.iter().collect();
        assert!(t_indices.len() <= 20, "powerset fallback capped at 20");
        let t_chars = problem.chars_of(&t_mask);
        let t_dim = span_dim(&t_chars);
        for bits in 1u32..(1 << t_indices.len()) {
            let subset: Vec<IntVector> = (0..t_indices.len())
                .filter(|j| bits >> j & 1 == 1)
                .map(|j| problem.chars[t_indices[j]].clone())
                .collect();
            let sdim = span_dim(&subset);
            if sdim >= t_dim || !relint_contains_origin(&subset) {
                continue;
            }
            // Span(T') ∩ Ξ_V via rank comparison against the subset's span.
            let mut flat = Subspace::zero(problem.ambient_dim());
            for c in &subset {
                if let Some(next) = flat.extend(c) {
                    flat = next;
                }
            }
            let stratum = BitSet::from_indices(
                problem.chars.len(),
                (0..problem.chars.len()).filter(|&i| flat.contains(&problem.chars[i])),
            );
            emitted.entry(stratum).or_insert(sdim);
        }
        // the empty span: the trivial character alone, when present
        if let Some(zi) = problem.zero_char_index() {
            if t_mask.contains(zi) && t_dim > 0 {
                let stratum = BitSet::from_indices(problem.chars.len(), [zi]);
                emitted.entry(stratum).or_insert(0);
            }
        }
    }
    let mut strata: Vec<State> = if skip_weyl_dedup {
        emitted
            .into_iter()
            .map(|(mask, dim)| State {
                mask,
                witness: None,
                span_dim: Some(dim),
            })
            .collect()
    } else {
        let mut orbits: HashMap<BitSet, (BitSet, usize)> = HashMap::new();
        for (mask, dim) in emitted {
            let key = problem.canonical_orbit_rep(&mask);
            match orbits.get_mut(&key) {
                Some(best) => {
                    if mask < best.0 {
                        *best = (mask, dim);
                    }
                }
                None => {
                    orbits.insert(key, (mask, dim));
                }
            }
        }
        orbits
            .into_values()
            .map(|(mask, dim)| State {
                mask,
                witness: None,
                span_dim: Some(dim),
            })
            .collect()
    };
    strata.sort_by(|a, b| a.mask.cmp(&b.mask));
    strata
}

// ---------------------------------------------------------------------------
// Superset stream (the large-problem variant: no antichain filtering).
// ---------------------------------------------------------------------------

/// One emitted stream candidate.
pub struct StreamRecord<'a> {
    /// Lexicographic rank of the generating subset.
    pub cursor: u128,
    pub lambda: &'a IntVector,
    pub mask: &'a BitSet,
}

/// Periodic progress snapshot for checkpointing.
pub struct StreamProgress<'a> {
    /// Rank of the last completed subset.
    pub cursor: u128,
    pub emitted: u64,
    pub distinct_hashes: Option<&'a HashSet<u64>>,
}

#[derive(Clone, Debug, Default)]
pub struct StreamSummary {
    pub subsets_processed: u128,
    pub emitted: u64,
    pub distinct: Option<u64>,
    pub last_cursor: Option<u128>,
}

/// Emits every chamber-witnessed candidate state `Ξ_{V,λ≥0}` without
/// maximality filtering, resumable at a subset cursor. With `dedupe` each
/// distinct state (by 64-bit mask hash) is emitted once.
pub fn superset_stream<E>(
    problem: &Problem,
    start_cursor: u128,
    dedupe: bool,
    seeded_hashes: Option<HashSet<u64>>,
    checkpoint_every: Option<u64>,
    mut sink: impl FnMut(StreamRecord<'_>) -> Result<(), E>,
    mut checkpoint: impl FnMut(StreamProgress<'_>) -> Result<(), E>,
) -> Result<StreamSummary, E> {
    let pool = essential_stable(problem);
    let k = problem.rank() - 1;
    let m = pool.len();
    let total = binomial_u128(m, k);
    let mut summary = StreamSummary::default();
    if start_cursor >= total {
        return Ok(summary);
    }
    let mut hashes: HashSet<u64> = seeded_hashes.unwrap_or_default();
    let generator = Generator {
        problem,
        pool: &pool,
        kind: CandidateKind::NonStable,
        chamber_restricted: true,
        fastpath: false,
    };
    let mut subset = unrank_subset(m, k, start_cursor);
    let mut cursor = start_cursor;
    let mut scratch = Vec::with_capacity(1);
    loop {
        scratch.clear();
        generator.candidates_for(&subset, &mut scratch);
        for cand in scratch.drain(..) {
            if dedupe && !hashes.insert(cand.mask.fnv_hash()) {
                continue;
            }
            sink(StreamRecord {
                cursor,
                lambda: &cand.witness.0,
                mask: &cand.mask,
            })?;
            summary.emitted += 1;
        }
        summary.subsets_processed += 1;
        summary.last_cursor = Some(cursor);
        if let Some(every) = checkpoint_every {
            if summary.subsets_processed % every as u128 == 0 {
                checkpoint(StreamProgress {
                    cursor,
                    emitted: summary.emitted,
                    distinct_hashes: dedupe.then_some(&hashes),
                })?;
            }
        }
        cursor += 1;
        if cursor >= total || !next_subset(&mut subset, m) {
            break;
        }
    }
    if dedupe {
        summary.distinct = Some(hashes.len() as u64);
    }
    checkpoint(StreamProgress {
        cursor: summary.last_cursor.unwrap_or(0),
        emitted: summary.emitted,
        distinct_hashes: dedupe.then_some(&hashes),
    })?;
    Ok(summary)
}
