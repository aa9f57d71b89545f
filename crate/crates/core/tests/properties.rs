//! Property tests for the kernel invariants: bilinearity, nullspace
//! orthogonality, convexity-test consistency against an independent
//! barycentric oracle, and Weyl-action invariances.

use gitstates::exact::{
    conv_contains_origin, is_linearly_independent, lp_feasible, nullspace_primitive, pairing,
    relint_contains_origin, Int, IntVector, Rational, RationalMatrix,
};
use gitstates::roots::{build, RootFamily, RootSystemSpec};
use gitstates::weights::weights_of_irrep;
use num::{Integer, One, Signed, Zero};
use proptest::prelude::*;

fn iv(v: &[i64]) -> IntVector {
    IntVector::from_i64(v)
}

fn small_vec(dim: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-6i64..=6, dim)
}

/// Solves a square-ish rational system by Gaussian elimination; independent
/// of the library's solver paths.
fn solve_exact(cols: &[Vec<Rational>], rhs: &[Rational]) -> Option<Vec<Rational>> {
    let rows = rhs.len();
    let n = cols.len();
    let mut m: Vec<Vec<Rational>> = (0..rows)
        .map(|r| {
            let mut row: Vec<Rational> = cols.iter().map(|c| c[r].clone()).collect();
            row.push(rhs[r].clone());
            row
        })
        .collect();
    let mut pivot_col_of_row = Vec::new();
    let mut rank = 0;
    for c in 0..n {
        let Some(p) = (rank..rows).find(|&i| !m[i][c].is_zero()) else {
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
                for (x, pv) in row.iter_mut().zip(pivot_row.iter()) {
                    let d = &f * pv;
                    *x -= d;
                }
            }
        }
        pivot_col_of_row.push(c);
        rank += 1;
    }
    for row in m.iter().skip(rank) {
        if !row[n].is_zero() {
            return None;
        }
    }
    let mut sol = vec![Rational::zero(); n];
    for (r, &c) in pivot_col_of_row.iter().enumerate() {
        sol[c] = m[r][n].clone();
    }
    Some(sol)
}

/// Independent convex-hull membership oracle: by Caratheodory the origin is
/// in the hull iff some affinely independent subset carries it with
/// nonnegative barycentric coordinates.
fn conv_origin_barycentric(set: &[IntVector]) -> bool {
    let n = set.len();
    if n == 0 {
        return false;
    }
    let dim = set[0].len();
    for bits in 1u32..(1 << n) {
        let subset: Vec<&IntVector> = (0..n)
            .filter(|i| bits >> i & 1 == 1)
            .map(|i| &set[i])
            .collect();
        if subset.len() > dim + 1 {
            continue;
        }
        // affine independence: {x_i - x_0} linearly independent
        let diffs: Vec<IntVector> = subset[1..].iter().map(|x| x.sub(subset[0])).collect();
        if !is_linearly_independent(&diffs) {
            continue;
        }
        // unique barycentric coordinates: sum t_i x_i = 0, sum t_i = 1
        let cols: Vec<Vec<Rational>> = subset
            .iter()
            .map(|x| {
                let mut col: Vec<Rational> =
                    x.0.iter()
                        .map(|v| Rational::from_integer(v.clone()))
                        .collect();
                col.push(Rational::one());
                col
            })
            .collect();
        let mut rhs = vec![Rational::zero(); dim];
        rhs.push(Rational::one());
        if let Some(sol) = solve_exact(&cols, &rhs) {
            // verify (the system may be rank-deficient in the row direction)
            let ok = (0..dim).all(|r| {
                let s: Rational = cols.iter().zip(sol.iter()).map(|(c, t)| &c[r] * t).sum();
                s.is_zero()
            }) && {
                let s: Rational = sol.iter().cloned().sum();
                s.is_one()
            };
            if ok && sol.iter().all(|t| !t.is_negative()) {
                return true;
            }
        }
    }
    false
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pairing_is_bilinear(
        l in small_vec(4), m in small_vec(4), x in small_vec(4),
        a in -5i64..=5, b in -5i64..=5,
    ) {
        let (l, m, x) = (iv(&l), iv(&m), iv(&x));
        let combo = l.scale(&Int::from(a)).add(&m.scale(&Int::from(b)));
        let lhs = pairing(&combo, &x).unwrap();
        let rhs = Int::from(a) * pairing(&l, &x).unwrap() + Int::from(b) * pairing(&m, &x).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn nullspace_is_orthogonal_and_primitive(rows in prop::collection::vec(small_vec(4), 3)) {
        let rows: Vec<IntVector> = rows.iter().map(|r| iv(r)).collect();
        if let Some(lam) = nullspace_primitive(&rows, 4) {
            for r in &rows {
                prop_assert!(r.dot(&lam).is_zero());
            }
            let mut g = Int::zero();
            for e in &lam.0 {
                g = g.gcd(e);
            }
            prop_assert!(g.is_one());
        } else {
            // corank is genuinely not one
            prop_assert_ne!(gitstates::exact::rank(&rows), 3);
        }
    }

    #[test]
    fn relint_implies_conv_and_permutation_invariance(
        set in prop::collection::vec(small_vec(3), 1..7),
        seed in any::<u64>(),
    ) {
        let set: Vec<IntVector> = set.iter().map(|v| iv(v)).collect();
        let conv = conv_contains_origin(&set);
        let relint = relint_contains_origin(&set);
        prop_assert!(!relint || conv, "relint must imply conv");

        // permute deterministically from the seed and duplicate one element
        let mut permuted = set.clone();
        let k = permuted.len();
        for i in 0..k {
            permuted.swap(i, (seed as usize + i * 7) % k);
        }
        permuted.push(set[seed as usize % k].clone());
        prop_assert_eq!(conv_contains_origin(&permuted), conv);
        prop_assert_eq!(relint_contains_origin(&permuted), relint);
    }

    #[test]
    fn conv_matches_barycentric_oracle(set in prop::collection::vec(small_vec(4), 1..8)) {
        let set: Vec<IntVector> = set.iter().map(|v| iv(v)).collect();
        prop_assert_eq!(conv_contains_origin(&set), conv_origin_barycentric(&set));
    }

    #[test]
    fn lp_feasibility_is_row_order_independent(
        rows in prop::collection::vec(prop::collection::vec(-4i64..=4, 4), 1..4),
        rhs in prop::collection::vec(-4i64..=4, 3),
        rotation in 0usize..3,
    ) {
        let k = rows.len();
        let mat = RationalMatrix::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rational::from_integer(Int::from(x))).collect())
                .collect(),
        );
        let rhs: Vec<Rational> = rhs
            .iter()
            .take(k)
            .map(|&x| Rational::from_integer(Int::from(x)))
            .collect();
        if rhs.len() < k {
            return Ok(());
        }
        let lower = vec![Rational::zero(); 4];
        let base = lp_feasible(&mat, &rhs, &lower);
        let mut rot_rows = mat.rows.clone();
        let mut rot_rhs = rhs.clone();
        rot_rows.rotate_left(rotation % k);
        rot_rhs.rotate_left(rotation % k);
        let rotated = lp_feasible(&RationalMatrix::new(rot_rows), &rot_rhs, &lower);
        prop_assert_eq!(base, rotated);
    }
}

#[test]
fn pairing_invariant_under_simultaneous_weyl_action() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
    for (family, rank) in [
        (RootFamily::A, 3),
        (RootFamily::B, 3),
        (RootFamily::C, 2),
        (RootFamily::D, 4),
    ] {
        let data = build(RootSystemSpec { family, rank }).unwrap();
        let dim = data.ambient_dim;
        for _ in 0..100 {
            let lam = IntVector(
                (0..dim)
                    .map(|_| Int::from(rng.gen_range(-9i64..=9)))
                    .collect(),
            );
            let chi = IntVector(
                (0..dim)
                    .map(|_| Int::from(rng.gen_range(-9i64..=9)))
                    .collect(),
            );
            let w = &data.weyl_elements[rng.gen_range(0..data.weyl_elements.len())];
            assert_eq!(w.apply(&lam).dot(&w.apply(&chi)), lam.dot(&chi));
        }
    }
}

#[test]
fn chamber_members_decompose_over_ray_generators() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for (family, rank) in [(RootFamily::A, 3), (RootFamily::B, 2), (RootFamily::C, 3)] {
        let data = build(RootSystemSpec { family, rank }).unwrap();
        let dim = data.ambient_dim;
        let mut tested = 0;
        while tested < 40 {
            let mut lam = IntVector(
                (0..dim)
                    .map(|_| Int::from(rng.gen_range(-6i64..=6)))
                    .collect(),
            );
            if matches!(family, RootFamily::A) {
                // project to the sum-zero cocharacter space, scaled
                let s = lam.sum();
                lam = IntVector(
                    lam.0
                        .iter()
                        .map(|x| x * Int::from(dim as i64) - &s)
                        .collect(),
                );
            }
            if !data.in_chamber(&lam) {
                continue;
            }
            tested += 1;
            // exact nonnegative coordinates in the simplicial cone
            let cols: Vec<Vec<Rational>> = data
                .chamber_rays
                .iter()
                .map(|g| {
                    g.0.iter()
                        .map(|x| Rational::from_integer(x.clone()))
                        .collect()
                })
                .collect();
            let rhs: Vec<Rational> = lam
                .0
                .iter()
                .map(|x| Rational::from_integer(x.clone()))
                .collect();
            let sol = solve_exact(&cols, &rhs).expect("rays span the chamber space");
            for c in &sol {
                assert!(
                    !c.is_negative(),
                    "{family:?}{rank}: negative cone coordinate"
                );
            }
        }
    }
}

#[test]
fn weight_supports_are_weyl_stable_under_random_elements() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for (family, rank, hw) in [
        (RootFamily::A, 3, vec![2, 0, 0]),
        (RootFamily::B, 2, vec![1, 1]),
        (RootFamily::D, 4, vec![0, 0, 0, 1]),
    ] {
        let data = build(RootSystemSpec { family, rank }).unwrap();
        let ws = weights_of_irrep(&data, &hw).unwrap();
        let support: std::collections::HashSet<IntVector> = ws.support().into_iter().collect();
        for _ in 0..50 {
            let w = &data.weyl_elements[rng.gen_range(0..data.weyl_elements.len())];
            for chi in &support {
                let img = w.apply(chi);
                assert!(support.contains(&img));
                assert_eq!(ws.multiplicities[&img], ws.multiplicities[chi]);
            }
        }
    }
}
