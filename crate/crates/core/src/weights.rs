//! Weight systems of representations given by expressions over irreducibles.
//!
//! An expression is built from `irrep(a1,…,ad)` (highest weight in
//! fundamental-weight coordinates), binary `dsum`/`tensor`, and `wedge(k,·)`.
//! Irreducible weight multiplicities come from Freudenthal's recursion; the
//! calculus on states follows the usual rules: direct sums take unions of
//! supports (multiplicities add), tensor products take Minkowski sums
//! (multiplicities convolve), and wedge powers collect sums over k-element
//! subsets of weight slots via the elementary-symmetric recurrence.

use crate::exact::{Int, IntVector, Rational};
use crate::roots::RootSystemData;
use num::{BigUint, One, Signed, Zero};
use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

pub type Multiplicity = BigUint;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RepExpr {
    Irrep(Vec<u64>),
    DirectSum(Box<RepExpr>, Box<RepExpr>),
    Tensor(Box<RepExpr>, Box<RepExpr>),
    Wedge(u64, Box<RepExpr>),
}

impl fmt::Display for RepExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RepExpr::Irrep(a) => {
                write!(f, "irrep(")?;
                for (i, x) in a.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
            RepExpr::DirectSum(l, r) => write!(f, "dsum({l},{r})"),
            RepExpr::Tensor(l, r) => write!(f, "tensor({l},{r})"),
            RepExpr::Wedge(k, e) => write!(f, "wedge({k},{e})"),
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("parse error at byte {pos}: {message}")]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            pos: self.pos,
            message: message.into(),
        }
    }

    fn expect(&mut self, byte: u8) -> Result<(), ParseError> {
        self.skip_ws();
        if self.pos < self.text.len() && self.text[self.pos] == byte {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected '{}'", byte as char)))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected identifier"));
        }
        Ok(std::str::from_utf8(&self.text[start..self.pos])
            .unwrap()
            .to_string())
    }

    fn integer(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        std::str::from_utf8(&self.text[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.err("integer out of range"))
    }

    fn expr(&mut self) -> Result<RepExpr, ParseError> {
        let name = self.ident()?;
        match name.as_str() {
            "irrep" => {
                self.expect(b'(')?;
                let mut coords = vec![self.integer()?];
                loop {
                    self.skip_ws();
                    if self.pos < self.text.len() && self.text[self.pos] == b',' {
                        self.pos += 1;
                        coords.push(self.integer()?);
                    } else {
                        break;
                    }
                }
                self.expect(b')')?;
                Ok(RepExpr::Irrep(coords))
            }
            "dsum" | "tensor" => {
                self.expect(b'(')?;
                let left = self.expr()?;
                self.expect(b',')?;
                let right = self.expr()?;
                self.expect(b')')?;
                if name == "dsum" {
                    Ok(RepExpr::DirectSum(Box::new(left), Box::new(right)))
                } else {
                    Ok(RepExpr::Tensor(Box::new(left), Box::new(right)))
                }
            }
            "wedge" => {
                self.expect(b'(')?;
                let k = self.integer()?;
                self.expect(b',')?;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(RepExpr::Wedge(k, Box::new(inner)))
            }
            other => Err(self.err(format!("unknown node kind {other:?}"))),
        }
    }
}

/// Parses the representation-expression grammar
/// `expr := irrep(int,…,int) | dsum(expr,expr) | tensor(expr,expr) | wedge(int,expr)`.
pub fn parse_rep_expr(text: &str) -> Result<RepExpr, ParseError> {
    let mut p = Parser {
        text: text.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.text.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

#[derive(Debug, thiserror::Error)]
pub enum WeightError {
    #[error("ambient dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("highest weight has {given} coordinates, rank is {rank}")]
    HighestWeightArity { given: usize, rank: usize },
    #[error("wedge index {k} out of range 1..={dim}")]
    WedgeOutOfRange { k: u64, dim: Multiplicity },
}

/// A finite multiset of characters: the weights of a representation with
/// their multiplicities, in the internal scaled coordinates of the root
/// system that produced them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSystem {
    /// Character → positive multiplicity, in canonical (lexicographic) order.
    pub multiplicities: BTreeMap<IntVector, Multiplicity>,
    pub total_dim: Multiplicity,
    pub ambient_dim: usize,
    /// Common coordinate sum of the natural (exponent-vector) representatives
    /// for type A; `None` for other families or mixed direct sums.
    pub level: Option<Int>,
}

impl WeightSystem {
    /// The one-dimensional trivial system: a single zero weight.
    pub fn trivial(ambient_dim: usize) -> Self {
        let mut multiplicities = BTreeMap::new();
        multiplicities.insert(IntVector::zeros(ambient_dim), Multiplicity::one());
        WeightSystem {
            multiplicities,
            total_dim: Multiplicity::one(),
            ambient_dim,
            level: Some(Int::zero()),
        }
    }

    /// The support: characters of positive multiplicity, canonically sorted.
    pub fn support(&self) -> Vec<IntVector> {
        self.multiplicities.keys().cloned().collect()
    }

    pub fn multiplicity_sum(&self) -> Multiplicity {
        self.multiplicities.values().sum()
    }
}

/// Pointwise multiplicity sum; the support is the union of supports.
pub fn dsum(a: &WeightSystem, b: &WeightSystem) -> Result<WeightSystem, WeightError> {
    if a.ambient_dim != b.ambient_dim {
        return Err(WeightError::DimensionMismatch(a.ambient_dim, b.ambient_dim));
    }
    let mut multiplicities = a.multiplicities.clone();
    for (chi, m) in &b.multiplicities {
        *multiplicities
            .entry(chi.clone())
            .or_insert_with(Multiplicity::zero) += m;
    }
    let level = match (&a.level, &b.level) {
        (Some(x), Some(y)) if x == y => Some(x.clone()),
        _ => None,
    };
    Ok(WeightSystem {
        multiplicities,
        total_dim: &a.total_dim + &b.total_dim,
        ambient_dim: a.ambient_dim,
        level,
    })
}

/// Multiplicity convolution; the support is the Minkowski sum of supports.
pub fn tensor(a: &WeightSystem, b: &WeightSystem) -> Result<WeightSystem, WeightError> {
    if a.ambient_dim != b.ambient_dim {
        return Err(WeightError::DimensionMismatch(a.ambient_dim, b.ambient_dim));
    }
    let mut multiplicities: BTreeMap<IntVector, Multiplicity> = BTreeMap::new();
    for (x, mx) in &a.multiplicities {
        for (y, my) in &b.multiplicities {
            *multiplicities
                .entry(x.add(y))
                .or_insert_with(Multiplicity::zero) += mx * my;
        }
    }
    let level = match (&a.level, &b.level) {
        (Some(x), Some(y)) => Some(x + y),
        _ => None,
    };
    Ok(WeightSystem {
        multiplicities,
        total_dim: &a.total_dim * &b.total_dim,
        ambient_dim: a.ambient_dim,
        level,
    })
}

fn binomial(n: &Multiplicity, k: u64) -> Multiplicity {
    let mut result = Multiplicity::one();
    let mut n_minus = n.clone();
    let k_big = Multiplicity::from(k);
    if k_big > *n {
        return Multiplicity::zero();
    }
    n_minus -= &k_big;
    for t in 1..=k {
        n_minus += 1u32;
        result *= &n_minus;
        result /= t;
    }
    result
}

/// Weights of the k-th wedge power: sums over k-element sub-multisets of the
/// weight slots, computed by a dynamic program over multiplicity groups
/// rather than explicit subset enumeration.
pub fn wedge_power(a: &WeightSystem, k: u64) -> Result<WeightSystem, WeightError> {
    if k < 1 || Multiplicity::from(k) > a.total_dim {
        return Err(WeightError::WedgeOutOfRange {
            k,
            dim: a.total_dim.clone(),
        });
    }
    let k = k as usize;
    let mut table: Vec<HashMap<IntVector, Multiplicity>> = vec![HashMap::new(); k + 1];
    table[0].insert(IntVector::zeros(a.ambient_dim), Multiplicity::one());

    for (w, m) in &a.multiplicities {
        // choosing j of the m identical slots contributes C(m, j) sub-multisets
        let j_max = if *m > Multiplicity::from(k as u64) {
            k
        } else {
            // m fits in usize whenever it is <= k here
            m.to_u64_digits().first().copied().unwrap_or(0) as usize
        };
        let mut coeffs = Vec::with_capacity(j_max + 1);
        let mut shifts = Vec::with_capacity(j_max + 1);
        let mut acc = IntVector::zeros(a.ambient_dim);
        for j in 0..=j_max {
            coeffs.push(binomial(m, j as u64));
            shifts.push(acc.clone());
            acc = acc.add(w);
        }
        let mut next: Vec<HashMap<IntVector, Multiplicity>> = vec![HashMap::new(); k + 1];
        for (c, sums) in table.iter().enumerate() {
            for (s, count) in sums {
                for j in 0..=j_max.min(k - c) {
                    let entry = next[c + j]
                        .entry(s.add(&shifts[j]))
                        .or_insert_with(Multiplicity::zero);
                    *entry += count * &coeffs[j];
                }
            }
        }
        table = next;
    }

    let multiplicities: BTreeMap<IntVector, Multiplicity> =
        table.pop().unwrap().into_iter().collect();
    let total_dim = binomial(&a.total_dim, k as u64);
    debug_assert_eq!(
        multiplicities.values().sum::<Multiplicity>(),
        total_dim,
        "wedge slot count must match the binomial"
    );
    let level = a.level.as_ref().map(|l| l * Int::from(k as i64));
    Ok(WeightSystem {
        multiplicities,
        total_dim,
        ambient_dim: a.ambient_dim,
        level,
    })
}

/// Solves `Σ c_i basis_i = target` exactly; `None` if inconsistent.
fn solve_in_basis(basis: &[IntVector], target: &IntVector) -> Option<Vec<Rational>> {
    let dim = target.len();
    let n = basis.len();
    // augmented [basis columns | target], Gaussian elimination over Q
    let mut m: Vec<Vec<Rational>> = (0..dim)
        .map(|r| {
            let mut row: Vec<Rational> = basis
                .iter()
                .map(|b| Rational::from_integer(b.0[r].clone()))
                .collect();
            row.push(Rational::from_integer(target.0[r].clone()));
            row
        })
        .collect();
    let mut pivot_of_col = vec![usize::MAX; n];
    let mut rank = 0;
    for c in 0..n {
        let Some(p) = (rank..dim).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = m[rank][c].clone();
        for x in m[rank].iter_mut() {
            *x /= &inv;
        }
        let pivot_row = m[rank].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != rank && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(pivot_row.iter()) {
                    let d = &f * p;
                    *x -= d;
                }
            }
        }
        pivot_of_col[c] = rank;
        rank += 1;
    }
    // inconsistent if a zero row has nonzero rhs
    for row in m.iter().skip(rank) {
        if !row[n].is_zero() {
            return None;
        }
    }
    let mut coeffs = vec![Rational::zero(); n];
    for (c, &p) in pivot_of_col.iter().enumerate() {
        if p != usize::MAX {
            coeffs[c] = m[p][n].clone();
        }
    }
    Some(coeffs)
}

fn is_nonneg_integer(x: &Rational) -> bool {
    x.is_integer() && !x.is_negative()
}

/// Weyl dimension formula, exact: `Π (λ+ρ, α) / (ρ, α)` over positive roots.
pub fn weyl_dim(
    data: &RootSystemData,
    hw_fundamental: &[u64],
) -> Result<Multiplicity, WeightError> {
    let hw = highest_weight_vector(data, hw_fundamental)?;
    let x = hw.scale(&Int::from(2)).add(&data.two_rho);
    let mut num = Int::one();
    let mut den = Int::one();
    for alpha in &data.positive_roots {
        num *= x.dot(alpha);
        den *= data.two_rho.dot(alpha);
    }
    let q = &num / &den;
    debug_assert_eq!(&q * &den, num, "Weyl dimension must be integral");
    Ok(q.to_biguint().expect("dimension positive"))
}

fn highest_weight_vector(
    data: &RootSystemData,
    hw_fundamental: &[u64],
) -> Result<IntVector, WeightError> {
    if hw_fundamental.len() != data.spec.rank {
        return Err(WeightError::HighestWeightArity {
            given: hw_fundamental.len(),
            rank: data.spec.rank,
        });
    }
    let mut hw = IntVector::zeros(data.ambient_dim);
    for (i, &a) in hw_fundamental.iter().enumerate() {
        if a > 0 {
            hw = hw.add(&data.fundamental_weight(i).scale(&Int::from(a)));
        }
    }
    Ok(hw)
}

/// Full weight multiset of the irreducible representation with the given
/// dominant highest weight, by Freudenthal's multiplicity recursion.
pub fn weights_of_irrep(
    data: &RootSystemData,
    hw_fundamental: &[u64],
) -> Result<WeightSystem, WeightError> {
    let hw = highest_weight_vector(data, hw_fundamental)?;

    // Enumerate the weight set level by level below hw. A lattice point is a
    // weight iff its dominant representative mu+ satisfies hw - mu+ >= 0 in
    // the simple-root basis.
    let is_weight = |v: &IntVector| -> bool {
        let rep = data.dominant_rep(v);
        let diff = hw.sub(&rep);
        match solve_in_basis(&data.simple_roots, &diff) {
            Some(coeffs) => coeffs.iter().all(is_nonneg_integer),
            None => false,
        }
    };

    let mut all_weights: HashSet<IntVector> = HashSet::new();
    let mut dominant_in_order: Vec<IntVector> = Vec::new();
    let mut frontier: VecDeque<IntVector> = VecDeque::new();
    all_weights.insert(hw.clone());
    dominant_in_order.push(hw.clone());
    frontier.push_back(hw.clone());
    while let Some(v) = frontier.pop_front() {
        for alpha in &data.simple_roots {
            let next = v.sub(alpha);
            if !all_weights.contains(&next) && is_weight(&next) {
                if data.dominant_rep(&next) == next {
                    dominant_in_order.push(next.clone());
                }
                all_weights.insert(next.clone());
                frontier.push_back(next.clone());
            }
        }
    }

    // Freudenthal, processed in increasing depth below hw (BFS order).
    let x = hw.scale(&Int::from(2)).add(&data.two_rho);
    let xx = x.dot(&x);
    let mut dominant_mult: HashMap<IntVector, Multiplicity> = HashMap::new();
    dominant_mult.insert(hw.clone(), Multiplicity::one());
    for mu in dominant_in_order.iter().skip(1) {
        let y = mu.scale(&Int::from(2)).add(&data.two_rho);
        let c = &xx - y.dot(&y);
        debug_assert!(c.is_positive(), "Freudenthal denominator must be positive");
        let mut rhs = Int::zero();
        for alpha in &data.positive_roots {
            let mut point = mu.add(alpha);
            let mut k = 1u64;
            while all_weights.contains(&point) {
                let m = dominant_mult
                    .get(&data.dominant_rep(&point))
                    .expect("higher weights already computed");
                let m_int = Int::from_biguint(num::bigint::Sign::Plus, m.clone());
                rhs += point.dot(alpha) * m_int;
                k += 1;
                point = mu.add(&alpha.scale(&Int::from(k as i64)));
            }
        }
        let num = rhs * Int::from(8);
        let m = &num / &c;
        debug_assert_eq!(&m * &c, num, "Freudenthal division must be exact");
        debug_assert!(m.is_positive());
        dominant_mult.insert(mu.clone(), m.to_biguint().unwrap());
    }

    // Expand dominant weights to their full Weyl orbits.
    let mut multiplicities: BTreeMap<IntVector, Multiplicity> = BTreeMap::new();
    for (mu, m) in &dominant_mult {
        for w in &data.weyl_elements {
            multiplicities
                .entry(w.apply(mu))
                .or_insert_with(|| m.clone());
        }
    }
    let total_dim = multiplicities.values().sum();

    let level = match data.spec.family {
        crate::roots::RootFamily::A => {
            let mut l = Int::zero();
            for (i, &a) in hw_fundamental.iter().enumerate() {
                l += Int::from((i as i64 + 1) * a as i64);
            }
            Some(l)
        }
        _ => None,
    };

    Ok(WeightSystem {
        multiplicities,
        total_dim,
        ambient_dim: data.ambient_dim,
        level,
    })
}

/// Evaluates a representation expression to its weight system.
pub fn evaluate(data: &RootSystemData, expr: &RepExpr) -> Result<WeightSystem, WeightError> {
    match expr {
        RepExpr::Irrep(hw) => weights_of_irrep(data, hw),
        RepExpr::DirectSum(l, r) => {
            let a = evaluate(data, l)?;
            let b = evaluate(data, r)?;
            dsum(&a, &b)
        }
        RepExpr::Tensor(l, r) => {
            let a = evaluate(data, l)?;
            let b = evaluate(data, r)?;
            tensor(&a, &b)
        }
        RepExpr::Wedge(k, inner) => {
            let a = evaluate(data, inner)?;
            wedge_power(&a, *k)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::{build, RootFamily, RootSystemSpec};

    fn data(family: RootFamily, rank: usize) -> RootSystemData {
        build(RootSystemSpec { family, rank }).unwrap()
    }

    fn dim_of(ws: &WeightSystem) -> u64 {
        ws.total_dim.to_u64_digits().first().copied().unwrap_or(0)
    }

    #[test]
    fn parse_basic_expressions() {
        assert_eq!(
            parse_rep_expr("irrep(3,0,0)").unwrap(),
            RepExpr::Irrep(vec![3, 0, 0])
        );
        assert_eq!(
            parse_rep_expr(" wedge( 2 , irrep(2, 0, 0) ) ").unwrap(),
            RepExpr::Wedge(2, Box::new(RepExpr::Irrep(vec![2, 0, 0])))
        );
        assert_eq!(
            parse_rep_expr("wedge(9,irrep(0,0,1))").unwrap(),
            RepExpr::Wedge(9, Box::new(RepExpr::Irrep(vec![0, 0, 1])))
        );
        let round =
            parse_rep_expr("dsum(tensor(irrep(1,0),irrep(0,1)),wedge(2,irrep(2,0)))").unwrap();
        assert_eq!(parse_rep_expr(&round.to_string()).unwrap(), round);
    }

    #[test]
    fn parse_errors_carry_positions() {
        let e = parse_rep_expr("irrep(3,,0)").unwrap_err();
        assert_eq!(e.pos, 8);
        assert!(parse_rep_expr("sym(2, irrep(1))").is_err());
        assert!(parse_rep_expr("irrep(1) junk").is_err());
    }

    #[test]
    fn cubic_surfaces_weight_set() {
        let d = data(RootFamily::A, 3);
        let ws = weights_of_irrep(&d, &[3, 0, 0]).unwrap();
        assert_eq!(ws.multiplicities.len(), 20);
        assert_eq!(dim_of(&ws), 20);
        assert!(ws.multiplicities.values().all(|m| m.is_one()));
        assert_eq!(ws.level, Some(Int::from(3)));
        // the 20 characters are exactly the degree-3 exponent vectors
        let expected: std::collections::BTreeSet<IntVector> = {
            let mut set = std::collections::BTreeSet::new();
            for a in 0..=3i64 {
                for b in 0..=3 - a {
                    for c in 0..=3 - a - b {
                        let y = IntVector::from_i64(&[a, b, c, 3 - a - b - c]);
                        set.insert(d.canon_char(&y));
                    }
                }
            }
            set
        };
        let got: std::collections::BTreeSet<IntVector> = ws.support().into_iter().collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn a1_sym2_weights() {
        let d = data(RootFamily::A, 1);
        let ws = weights_of_irrep(&d, &[2]).unwrap();
        let support = ws.support();
        assert_eq!(
            support,
            vec![
                IntVector::from_i64(&[-2, 2]),
                IntVector::from_i64(&[0, 0]),
                IntVector::from_i64(&[2, -2])
            ]
        );
    }

    #[test]
    fn c3_fundamental_third_dimension_14() {
        let d = data(RootFamily::C, 3);
        let ws = weights_of_irrep(&d, &[0, 0, 1]).unwrap();
        assert_eq!(dim_of(&ws), 14);
        assert_eq!(weyl_dim(&d, &[0, 0, 1]).unwrap(), Multiplicity::from(14u32));
    }

    #[test]
    fn weyl_dim_matches_multiplicity_sum() {
        let cases: Vec<(RootFamily, usize, Vec<u64>)> = vec![
            (RootFamily::A, 2, vec![4, 0]),
            (RootFamily::A, 3, vec![1, 1, 0]),
            (RootFamily::A, 4, vec![0, 0, 1, 0]),
            (RootFamily::B, 2, vec![3, 0]),
            (RootFamily::B, 3, vec![0, 0, 1]),
            (RootFamily::C, 3, vec![0, 0, 1]),
            (RootFamily::C, 2, vec![1, 1]),
            (RootFamily::D, 4, vec![0, 0, 1, 0]),
            (RootFamily::D, 5, vec![0, 0, 0, 1, 0]),
            (RootFamily::A, 3, vec![1, 1, 1]),
            (RootFamily::B, 2, vec![2, 1]),
            (RootFamily::C, 3, vec![1, 1, 0]),
        ];
        for (family, rank, hw) in cases {
            let d = data(family, rank);
            let ws = weights_of_irrep(&d, &hw).unwrap();
            assert_eq!(
                ws.multiplicity_sum(),
                weyl_dim(&d, &hw).unwrap(),
                "{family:?}{rank} {hw:?}"
            );
            assert_eq!(ws.total_dim, ws.multiplicity_sum());
        }
    }

    #[test]
    fn adjoint_of_a2_has_multiplicity_two_at_zero() {
        let d = data(RootFamily::A, 2);
        let ws = weights_of_irrep(&d, &[1, 1]).unwrap();
        assert_eq!(dim_of(&ws), 8);
        let zero = IntVector::zeros(3);
        assert_eq!(ws.multiplicities[&zero], Multiplicity::from(2u32));
    }

    #[test]
    fn support_is_weyl_invariant_with_constant_multiplicity() {
        let d = data(RootFamily::C, 2);
        let ws = weights_of_irrep(&d, &[2, 1]).unwrap();
        for w in &d.weyl_elements {
            for (chi, m) in &ws.multiplicities {
                let img = w.apply(chi);
                assert_eq!(ws.multiplicities.get(&img), Some(m));
            }
        }
    }

    #[test]
    fn dsum_behaviour() {
        let d = data(RootFamily::A, 2);
        let x = weights_of_irrep(&d, &[2, 0]).unwrap();
        let doubled = dsum(&x, &x).unwrap();
        assert_eq!(doubled.total_dim, &x.total_dim * 2u32);
        for (chi, m) in &x.multiplicities {
            assert_eq!(doubled.multiplicities[chi], m * 2u32);
        }
        let y = weights_of_irrep(&d, &[0, 1]).unwrap();
        let u = dsum(&x, &y).unwrap();
        let mut expect: Vec<IntVector> = x.support().into_iter().chain(y.support()).collect();
        expect.sort();
        expect.dedup();
        assert_eq!(u.support(), expect);
        // incompatible ambient dimensions
        let other = weights_of_irrep(&data(RootFamily::A, 3), &[1, 0, 0]).unwrap();
        assert!(dsum(&x, &other).is_err());
    }

    #[test]
    fn tensor_behaviour() {
        let d = data(RootFamily::A, 1);
        let std_rep = weights_of_irrep(&d, &[1]).unwrap();
        let sq = tensor(&std_rep, &std_rep).unwrap();
        assert_eq!(dim_of(&sq), 4);
        assert_eq!(
            sq.multiplicities[&IntVector::from_i64(&[0, 0])],
            Multiplicity::from(2u32)
        );
        assert_eq!(
            sq.multiplicities[&IntVector::from_i64(&[2, -2])],
            Multiplicity::one()
        );
        // identity under tensoring with the trivial system
        let triv = WeightSystem::trivial(2);
        assert_eq!(tensor(&std_rep, &triv).unwrap(), std_rep);
    }

    #[test]
    fn tensor_commutative_and_associative() {
        let d = data(RootFamily::A, 2);
        let a = weights_of_irrep(&d, &[1, 0]).unwrap();
        let b = weights_of_irrep(&d, &[0, 1]).unwrap();
        let c = weights_of_irrep(&d, &[2, 0]).unwrap();
        assert_eq!(tensor(&a, &b).unwrap(), tensor(&b, &a).unwrap());
        assert_eq!(
            tensor(&tensor(&a, &b).unwrap(), &c).unwrap(),
            tensor(&a, &tensor(&b, &c).unwrap()).unwrap()
        );
    }

    #[test]
    fn wedge_power_behaviour() {
        let d = data(RootFamily::A, 3);
        let quadrics = weights_of_irrep(&d, &[2, 0, 0]).unwrap();
        assert_eq!(wedge_power(&quadrics, 1).unwrap(), quadrics);
        let pencils = wedge_power(&quadrics, 2).unwrap();
        assert_eq!(pencils.support().len(), 31);
        assert_eq!(dim_of(&pencils), 45);
        assert_eq!(pencils.level, Some(Int::from(4)));
        assert!(wedge_power(&quadrics, 0).is_err());
        assert!(wedge_power(&quadrics, 11).is_err());
    }

    #[test]
    fn wedge_over_repeated_slots_counts_submultisets() {
        // slots {2, 0, 0, -2}: the second wedge power has multiplicity two
        // at each of 2, 0 and -2
        let d = data(RootFamily::A, 1);
        let std_rep = weights_of_irrep(&d, &[1]).unwrap();
        let sq = tensor(&std_rep, &std_rep).unwrap();
        let w2 = wedge_power(&sq, 2).unwrap();
        assert_eq!(dim_of(&w2), 6);
        for key in [[2i64, -2], [0, 0], [-2, 2]] {
            assert_eq!(
                w2.multiplicities[&IntVector::from_i64(&key)],
                Multiplicity::from(2u32)
            );
        }
    }

    #[test]
    fn wedge_top_power_is_determinant_character() {
        let d = data(RootFamily::A, 1);
        let x = weights_of_irrep(&d, &[2]).unwrap();
        let top = wedge_power(&x, 3).unwrap();
        assert_eq!(top.multiplicities.len(), 1);
        let (chi, m) = top.multiplicities.iter().next().unwrap();
        assert_eq!(m, &Multiplicity::one());
        // the sum of all three slot weights is the zero character
        assert!(chi.is_zero());
    }

    #[test]
    fn wedge_dimensions_sum_to_power_of_two() {
        let d = data(RootFamily::A, 2);
        let x = weights_of_irrep(&d, &[1, 0]).unwrap(); // dim 3
        let mut sum = Multiplicity::one(); // k = 0 term
        for k in 1..=3 {
            sum += wedge_power(&x, k).unwrap().total_dim;
        }
        assert_eq!(sum, Multiplicity::from(8u32));
    }

    #[test]
    fn half_spin_weights_are_doubled_odd_vectors() {
        let d = data(RootFamily::D, 4);
        let ws = weights_of_irrep(&d, &[0, 0, 1, 0]).unwrap();
        assert_eq!(dim_of(&ws), 8);
        for chi in ws.support() {
            assert!(chi.0.iter().all(|x| x.abs() == Int::one()));
            let negs = chi.0.iter().filter(|x| x.is_negative()).count();
            assert_eq!(negs % 2, 1);
        }
    }

    #[test]
    fn evaluate_expression_tree() {
        let d = data(RootFamily::A, 2);
        let e = parse_rep_expr("dsum(irrep(2,0),wedge(2,irrep(2,0)))").unwrap();
        let ws = evaluate(&d, &e).unwrap();
        assert_eq!(dim_of(&ws), 6 + 15);
        assert_eq!(ws.level, None); // levels 2 and 4 differ
    }
}
