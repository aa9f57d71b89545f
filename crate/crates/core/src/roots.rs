//! Classical root-system data: simple and positive roots, the fundamental
//! chamber and its ray generators, and the Weyl group as explicit signed
//! permutations of the coordinate lattice.
//!
//! Coordinate conventions. Cocharacters live in `Z^n` for types B/C/D and in
//! the sum-zero sublattice of `Z^(n+1)` for type A. Characters are kept in a
//! uniformly scaled integral lattice per family so that every later test is
//! a plain integer dot product:
//!
//! * type A: the quotient-lattice class of `y` is represented by
//!   `(n+1)·y - (Σy)·(1,…,1)`, scaling all pairings by `n+1 > 0`;
//! * types B/D: coordinates are doubled so spin weights stay integral;
//! * type C: natural coordinates, scale one.
//!
//! All sign tests, convexity tests and proportionality tests downstream are
//! invariant under these positive scalings.

use crate::exact::{nullspace_primitive, pairing, Int, IntVector};
use itertools::Itertools;
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Largest supported rank. Weyl groups are materialized explicitly, so the
/// bound keeps the largest table (type B/C at rank 8) near 10^7 elements.
pub const MAX_RANK: usize = 8;

const MAX_AMBIENT: usize = MAX_RANK + 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RootFamily {
    A,
    B,
    C,
    D,
}

impl fmt::Display for RootFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RootFamily::A => "A",
            RootFamily::B => "B",
            RootFamily::C => "C",
            RootFamily::D => "D",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for RootFamily {
    type Err = RootError;
    fn from_str(s: &str) -> Result<Self, RootError> {
        match s {
            "A" | "a" => Ok(RootFamily::A),
            "B" | "b" => Ok(RootFamily::B),
            "C" | "c" => Ok(RootFamily::C),
            "D" | "d" => Ok(RootFamily::D),
            _ => Err(RootError::UnknownFamily(s.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RootSystemSpec {
    pub family: RootFamily,
    pub rank: usize,
}

impl fmt::Display for RootSystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family, self.rank)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RootError {
    #[error("unknown root family {0:?}")]
    UnknownFamily(String),
    #[error("unsupported rank {rank} for type {family} (supported: {min}..={max})")]
    UnsupportedRank {
        family: RootFamily,
        rank: usize,
        min: usize,
        max: usize,
    },
}

/// Signed permutation of the ambient coordinates: `(w·v)[j] = ±v[src[j]]`.
///
/// Type A elements use no signs, type B/C arbitrary sign flips, type D an
/// even number. The encoding is `Copy` so the full Weyl group table stays
/// compact even at rank 8.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct WeylElement {
    src: [u8; MAX_AMBIENT],
    signs: u16,
    dim: u8,
}

impl WeylElement {
    fn new(perm: &[u8], signs: u16) -> Self {
        let mut src = [0u8; MAX_AMBIENT];
        src[..perm.len()].copy_from_slice(perm);
        WeylElement {
            src,
            signs,
            dim: perm.len() as u8,
        }
    }

    pub fn identity(dim: usize) -> Self {
        let perm: Vec<u8> = (0..dim as u8).collect();
        WeylElement::new(&perm, 0)
    }

    pub fn is_identity(&self) -> bool {
        self.signs == 0 && (0..self.dim).all(|j| self.src[j as usize] == j)
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    /// Signed-permutation action; preserves the pairing when applied to both
    /// a cocharacter and a character.
    pub fn apply(&self, v: &IntVector) -> IntVector {
        assert_eq!(v.len(), self.dim());
        IntVector(
            (0..self.dim())
                .map(|j| {
                    let x = &v.0[self.src[j] as usize];
                    if self.signs >> j & 1 == 1 {
                        -x
                    } else {
                        x.clone()
                    }
                })
                .collect(),
        )
    }
}

impl fmt::Debug for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w[")?;
        for j in 0..self.dim() {
            if j > 0 {
                write!(f, " ")?;
            }
            write!(
                f,
                "{}{}",
                if self.signs >> j & 1 == 1 { "-" } else { "+" },
                self.src[j]
            )?;
        }
        write!(f, "]")
    }
}

/// Immutable root-system data shared by every stage of a computation.
#[derive(Clone)]
pub struct RootSystemData {
    pub spec: RootSystemSpec,
    pub ambient_dim: usize,
    /// Positive scale taking natural character coordinates to the internal
    /// integral lattice: `n+1` for A (combined with sum-zero projection),
    /// 2 for B/D, 1 for C.
    pub char_scale: Int,
    /// Simple roots as characters, internal scale.
    pub simple_roots: Vec<IntVector>,
    /// Positive roots as characters, internal scale.
    pub positive_roots: Vec<IntVector>,
    /// Sum of the positive roots (twice the Weyl vector), internal scale.
    pub two_rho: IntVector,
    /// Primitive generators of the fundamental chamber rays, one per simple
    /// root, in the cocharacter lattice.
    pub chamber_rays: Vec<IntVector>,
    pub weyl_elements: Vec<WeylElement>,
    /// Non-identity elements stabilizing some chamber ray; sufficient for
    /// cross-chamber maximality refinement.
    pub w_prime: Vec<WeylElement>,
}

fn unit(dim: usize, i: usize) -> IntVector {
    let mut v = IntVector::zeros(dim);
    v.0[i] = Int::one();
    v
}

fn simple_roots_raw(spec: RootSystemSpec) -> Vec<IntVector> {
    let n = spec.rank;
    let dim = ambient_dim(spec);
    let mut roots = Vec::with_capacity(n);
    let chain = match spec.family {
        RootFamily::A => n,
        _ => n - 1,
    };
    for i in 0..chain {
        let mut v = unit(dim, i);
        v = v.sub(&unit(dim, i + 1));
        roots.push(v);
    }
    match spec.family {
        RootFamily::A => {}
        RootFamily::B => roots.push(unit(dim, n - 1)),
        RootFamily::C => roots.push(unit(dim, n - 1).scale(&Int::from(2))),
        RootFamily::D => {
            let v = unit(dim, n - 2).add(&unit(dim, n - 1));
            roots.push(v);
        }
    }
    roots
}

fn positive_roots_raw(spec: RootSystemSpec) -> Vec<IntVector> {
    let n = spec.rank;
    let dim = ambient_dim(spec);
    let mut roots = Vec::new();
    match spec.family {
        RootFamily::A => {
            for i in 0..dim {
                for j in i + 1..dim {
                    roots.push(unit(dim, i).sub(&unit(dim, j)));
                }
            }
        }
        RootFamily::B | RootFamily::C | RootFamily::D => {
            for i in 0..n {
                for j in i + 1..n {
                    roots.push(unit(dim, i).sub(&unit(dim, j)));
                    roots.push(unit(dim, i).add(&unit(dim, j)));
                }
            }
            match spec.family {
                RootFamily::B => {
                    for i in 0..n {
                        roots.push(unit(dim, i));
                    }
                }
                RootFamily::C => {
                    for i in 0..n {
                        roots.push(unit(dim, i).scale(&Int::from(2)));
                    }
                }
                RootFamily::A | RootFamily::D => {}
            }
        }
    }
    roots
}

fn ambient_dim(spec: RootSystemSpec) -> usize {
    match spec.family {
        RootFamily::A => spec.rank + 1,
        _ => spec.rank,
    }
}

fn char_scale(spec: RootSystemSpec) -> Int {
    match spec.family {
        RootFamily::A => Int::from(spec.rank as i64 + 1),
        RootFamily::B | RootFamily::D => Int::from(2),
        RootFamily::C => Int::one(),
    }
}

/// Order of the Weyl group: `(n+1)!` for A_n, `2^n n!` for B_n/C_n,
/// `2^(n-1) n!` for D_n.
pub fn weyl_order(spec: RootSystemSpec) -> u128 {
    let fact = |k: usize| -> u128 { (1..=k as u128).product() };
    let n = spec.rank;
    match spec.family {
        RootFamily::A => fact(n + 1),
        RootFamily::B | RootFamily::C => (1u128 << n) * fact(n),
        RootFamily::D => (1u128 << (n - 1)) * fact(n),
    }
}

fn generate_weyl(spec: RootSystemSpec) -> Vec<WeylElement> {
    let dim = ambient_dim(spec);
    let perms: Vec<Vec<u8>> = (0..dim as u8).permutations(dim).collect();
    let mut out = Vec::with_capacity(weyl_order(spec) as usize);
    match spec.family {
        RootFamily::A => {
            for p in &perms {
                out.push(WeylElement::new(p, 0));
            }
        }
        RootFamily::B | RootFamily::C => {
            for p in &perms {
                for signs in 0..1u16 << dim {
                    out.push(WeylElement::new(p, signs));
                }
            }
        }
        RootFamily::D => {
            for p in &perms {
                for signs in 0..1u16 << dim {
                    if signs.count_ones() % 2 == 0 {
                        out.push(WeylElement::new(p, signs));
                    }
                }
            }
        }
    }
    out
}

impl RootSystemData {
    /// Canonicalize a character given in natural coordinates into the
    /// internal scaled lattice.
    pub fn canon_char(&self, natural: &IntVector) -> IntVector {
        assert_eq!(natural.len(), self.ambient_dim);
        match self.spec.family {
            RootFamily::A => {
                let s = natural.sum();
                let scaled = natural.scale(&self.char_scale);
                IntVector(scaled.0.iter().map(|x| x - &s).collect())
            }
            _ => natural.scale(&self.char_scale),
        }
    }

    /// Fundamental weight `ω_{i+1}` (0-indexed `i`) in the internal scale.
    pub fn fundamental_weight(&self, i: usize) -> IntVector {
        let n = self.spec.rank;
        let dim = self.ambient_dim;
        assert!(i < n);
        let partial = {
            let mut v = IntVector::zeros(dim);
            for j in 0..=i {
                v.0[j] = Int::one();
            }
            v
        };
        match self.spec.family {
            RootFamily::A | RootFamily::C => self.canon_char(&partial),
            RootFamily::B => {
                if i < n - 1 {
                    partial.scale(&Int::from(2))
                } else {
                    IntVector(vec![Int::one(); dim])
                }
            }
            RootFamily::D => {
                if i < n - 2 {
                    partial.scale(&Int::from(2))
                } else if i == n - 2 {
                    let mut v = vec![Int::one(); dim];
                    v[dim - 1] = -Int::one();
                    IntVector(v)
                } else {
                    IntVector(vec![Int::one(); dim])
                }
            }
        }
    }

    /// Closed-chamber membership: nonnegative pairing with every simple root.
    pub fn in_chamber(&self, lambda: &IntVector) -> bool {
        self.simple_roots
            .iter()
            .all(|a| !pairing(lambda, a).expect("dimension").is_negative())
    }

    /// The dominant Weyl-chamber representative of a weight.
    pub fn dominant_rep(&self, v: &IntVector) -> IntVector {
        match self.spec.family {
            RootFamily::A => {
                let mut w = v.0.clone();
                w.sort();
                w.reverse();
                IntVector(w)
            }
            RootFamily::B | RootFamily::C => {
                let mut w: Vec<Int> = v.0.iter().map(|x| x.abs()).collect();
                w.sort();
                w.reverse();
                IntVector(w)
            }
            RootFamily::D => {
                let negs = v.0.iter().filter(|x| x.is_negative()).count();
                let mut w: Vec<Int> = v.0.iter().map(|x| x.abs()).collect();
                w.sort();
                w.reverse();
                if negs % 2 == 1 {
                    let last = w.len() - 1;
                    w[last] = -w[last].clone();
                }
                IntVector(w)
            }
        }
    }

    /// Dominance: nonnegative pairing with every simple root (character side).
    pub fn is_dominant(&self, v: &IntVector) -> bool {
        self.simple_roots.iter().all(|a| !v.dot(a).is_negative())
    }

    /// Extra linear constraint satisfied by cocharacters, if any (the
    /// sum-zero condition for type A).
    pub fn cochar_constraint(&self) -> Option<IntVector> {
        match self.spec.family {
            RootFamily::A => Some(IntVector(vec![Int::one(); self.ambient_dim])),
            _ => None,
        }
    }
}

/// Builds the full root-system data for a classical family.
///
/// Chamber rays are computed as primitive generators of the rays of the dual
/// simplicial cone `{λ : ⟨λ,α⟩ ≥ 0 for α ∈ Δ}` inside the cocharacter
/// space; the Weyl group is materialized as the complete set of (signed)
/// coordinate permutations of the family.
pub fn build(spec: RootSystemSpec) -> Result<RootSystemData, RootError> {
    let min = match spec.family {
        RootFamily::D => 2,
        _ => 1,
    };
    if spec.rank < min || spec.rank > MAX_RANK {
        return Err(RootError::UnsupportedRank {
            family: spec.family,
            rank: spec.rank,
            min,
            max: MAX_RANK,
        });
    }

    let dim = ambient_dim(spec);
    let scale = char_scale(spec);
    let raw_simple = simple_roots_raw(spec);
    let simple_roots: Vec<IntVector> = raw_simple.iter().map(|a| a.scale(&scale)).collect();
    let positive_roots: Vec<IntVector> = positive_roots_raw(spec)
        .iter()
        .map(|a| a.scale(&scale))
        .collect();
    let mut two_rho = IntVector::zeros(dim);
    for a in &positive_roots {
        two_rho = two_rho.add(a);
    }

    let sum_zero = match spec.family {
        RootFamily::A => Some(IntVector(vec![Int::one(); dim])),
        _ => None,
    };
    let mut chamber_rays = Vec::with_capacity(spec.rank);
    for i in 0..spec.rank {
        let mut rows: Vec<IntVector> = raw_simple
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, a)| a.clone())
            .collect();
        if let Some(z) = &sum_zero {
            rows.push(z.clone());
        }
        let gamma = nullspace_primitive(&rows, dim)
            .expect("simple roots are linearly independent, so each ray is one-dimensional");
        let p = gamma.dot(&raw_simple[i]);
        assert!(!p.is_zero(), "ray generator degenerate");
        let gamma = if p.is_negative() { gamma.neg() } else { gamma };
        chamber_rays.push(gamma);
    }

    let weyl_elements = generate_weyl(spec);
    let w_prime: Vec<WeylElement> = weyl_elements
        .iter()
        .filter(|w| !w.is_identity() && chamber_rays.iter().any(|g| w.apply(g) == *g))
        .copied()
        .collect();

    Ok(RootSystemData {
        spec,
        ambient_dim: dim,
        char_scale: scale,
        simple_roots,
        positive_roots,
        two_rho,
        chamber_rays,
        weyl_elements,
        w_prime,
    })
}

/// The non-identity Weyl elements fixing some chamber ray. Exposed for
/// direct use in tests; `build` already fills `w_prime`.
pub fn compute_w_prime(data: &RootSystemData) -> Vec<WeylElement> {
    data.weyl_elements
        .iter()
        .filter(|w| !w.is_identity() && data.chamber_rays.iter().any(|g| w.apply(g) == *g))
        .copied()
        .collect()
}
