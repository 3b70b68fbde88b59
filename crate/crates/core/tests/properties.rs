use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lh_core::bisection::{
    bisection_direct, bisection_fwht, brute_force_bisection, cut_spectrum, cut_value,
    walsh_partition,
};
use lh_core::constructions::{augment_odd_b, optimize_secondary, Objective, SecondaryOptions};
use lh_core::db::{SolutionRecord, SolutionsDb};
use lh_core::designer::WiringTable;
use lh_core::ecc::{apply_equivalence, code_to_lh, diagonalize, min_weight, CodeMatrix, EquivalenceMap};
use lh_core::walsh::{fwht_in_place, walsh_algebraic, WalshIndex};
use lh_core::{GeneratorSet, LhError};

fn spanning_set(dims: std::ops::RangeInclusive<u32>, max_extra: usize) -> impl Strategy<Value = GeneratorSet> {
    dims.prop_flat_map(move |d| {
        let n = 1u32 << d;
        let max_m = (n as usize - 1).min(d as usize + max_extra);
        (Just(d), proptest::sample::subsequence((1..n).collect::<Vec<_>>(), d as usize..=max_m))
            .prop_shuffle_hops()
    })
    .prop_filter_map("hops must span", |(d, hops)| {
        let s = GeneratorSet::new(d, hops).ok()?;
        s.span_check().then_some(s)
    })
}

trait ShuffleHops {
    fn prop_shuffle_hops(self) -> BoxedStrategy<(u32, Vec<u32>)>;
}

impl<S: Strategy<Value = (u32, Vec<u32>)> + 'static> ShuffleHops for S {
    fn prop_shuffle_hops(self) -> BoxedStrategy<(u32, Vec<u32>)> {
        self.prop_flat_map(|(d, hops)| (Just(d), Just(hops).prop_shuffle()))
            .boxed()
    }
}

fn naive_fwht(f: &[i64]) -> Vec<i64> {
    let n = f.len() as u32;
    (0..n)
        .map(|k| {
            (0..n)
                .map(|x| i64::from(walsh_algebraic(k, x)) * f[x as usize])
                .sum()
        })
        .collect()
}

fn naive_min_weight(code: &CodeMatrix) -> u32 {
    let rows: Vec<u64> = code
        .rows()
        .iter()
        .map(|r| r.iter().fold(0u64, |acc, &b| acc << 1 | u64::from(b)))
        .collect();
    (1u64..1 << rows.len())
        .map(|mask| {
            rows.iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .fold(0u64, |acc, (_, r)| acc ^ r)
                .count_ones()
        })
        .min()
        .unwrap()
}

fn histogram(s: &GeneratorSet) -> Vec<u64> {
    s.distance_profile().unwrap().histogram()
}

fn sorted_cuts(s: &GeneratorSet) -> Vec<u32> {
    let mut c = cut_spectrum(s);
    c.sort_unstable();
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn walsh_orthogonality_closure_balance(d in 1u32..=8, j in any::<u32>(), k in any::<u32>()) {
        let n = 1u32 << d;
        let (j, k) = (j % n, k % n);
        let dot: i64 = (0..n)
            .map(|x| i64::from(walsh_algebraic(j, x) * walsh_algebraic(k, x)))
            .sum();
        prop_assert_eq!(dot, if j == k { i64::from(n) } else { 0 });
        for x in 0..n {
            prop_assert_eq!(
                walsh_algebraic(j, x) * walsh_algebraic(k, x),
                walsh_algebraic(j ^ k, x)
            );
        }
        if k != 0 {
            let idx = WalshIndex::new(k, n as usize).unwrap();
            let sum: i32 = (0..n).map(|x| idx.algebraic(x)).sum();
            prop_assert_eq!(sum, 0);
        }
    }

    #[test]
    fn fwht_matches_naive(d in 0u32..=8, seed in any::<u64>()) {
        let n = 1usize << d;
        let f: Vec<i64> = (0..n as u64)
            .map(|i| ((i.wrapping_mul(6364136223846793005) ^ seed) % 21) as i64 - 10)
            .collect();
        let mut fast = f.clone();
        fwht_in_place(&mut fast).unwrap();
        prop_assert_eq!(fast, naive_fwht(&f));
    }

    #[test]
    fn fwht_involution(d in 0u32..=12, f in proptest::collection::vec(-1000i64..1000, 4096)) {
        let n = 1usize << d;
        let orig = f[..n].to_vec();
        let mut v = orig.clone();
        fwht_in_place(&mut v).unwrap();
        fwht_in_place(&mut v).unwrap();
        let scaled: Vec<i64> = orig.iter().map(|x| x * n as i64).collect();
        prop_assert_eq!(v, scaled);
    }

    #[test]
    fn bisection_methods_agree(s in spanning_set(2..=4, 6)) {
        let fast = bisection_fwht(&s).unwrap();
        let direct = bisection_direct(&s).unwrap();
        prop_assert_eq!(&fast, &direct);
        prop_assert_eq!(brute_force_bisection(&s).unwrap(), fast.links);
        prop_assert_eq!(cut_value(&s, &fast.partition()).unwrap(), fast.links);
        prop_assert!(fast.b >= 1 && fast.b as usize <= s.m());
    }

    #[test]
    fn adding_a_hop_never_lowers_b(s in spanning_set(3..=6, 8), extra in any::<u32>()) {
        let n = s.n() as u32;
        let unused: Vec<u32> = (1..n).filter(|v| !s.contains(*v)).collect();
        prop_assume!(!unused.is_empty());
        let mut hops = s.hops().to_vec();
        hops.push(unused[extra as usize % unused.len()]);
        let bigger = GeneratorSet::new(s.dim(), hops).unwrap();
        prop_assert!(bisection_fwht(&bigger).unwrap().b >= bisection_fwht(&s).unwrap().b);
    }

    #[test]
    fn equivalence_preserves_invariants(s in spanning_set(3..=6, 6), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let map = EquivalenceMap::random(s.dim(), &mut rng);
        let t = apply_equivalence(&s, &map).unwrap();
        prop_assert_eq!(bisection_fwht(&t).unwrap().b, bisection_fwht(&s).unwrap().b);
        prop_assert_eq!(sorted_cuts(&t), sorted_cuts(&s));
        prop_assert_eq!(histogram(&t), histogram(&s));
        let diag = diagonalize(&s).unwrap().set;
        let units: Vec<u32> = (0..s.dim()).map(|i| 1 << i).collect();
        prop_assert_eq!(&diag.hops()[..s.dim() as usize], &units[..]);
        prop_assert_eq!(sorted_cuts(&diag), sorted_cuts(&s));
        prop_assert_eq!(histogram(&diag), histogram(&s));
    }

    #[test]
    fn eigen_equation(s in spanning_set(1..=6, 6)) {
        let a = s.adjacency().unwrap();
        let lambda = s.eigenvalues();
        let n = s.n() as u32;
        for k in 0..n {
            let u: Vec<i64> = (0..n).map(|x| i64::from(walsh_algebraic(k, x))).collect();
            let au = a.mul_vec(&u);
            for x in 0..n as usize {
                prop_assert_eq!(au[x], lambda[k as usize] * u[x]);
            }
        }
    }

    #[test]
    fn min_weight_equals_bisection(k in 2u32..=6, extra in 0usize..=8, seed in any::<u64>()) {
        let n_code = k as usize + extra;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cols: BTreeSet<u32> = (0..k).map(|i| 1 << i).collect();
        let cap = (1usize << k) - 1;
        while cols.len() < n_code.min(cap) {
            cols.insert(rand::Rng::gen_range(&mut rng, 1..1u32 << k));
        }
        let code = CodeMatrix::from_columns(k, cols.into_iter().collect()).unwrap();
        let set = code_to_lh(&code).unwrap();
        let w = naive_min_weight(&code);
        prop_assert_eq!(min_weight(&code), w);
        prop_assert_eq!(bisection_direct(&set).unwrap().b, w);
    }

    #[test]
    fn augment_raises_odd_b(s in spanning_set(3..=6, 6)) {
        let b = bisection_fwht(&s).unwrap().b;
        match augment_odd_b(&s) {
            Ok(t) => {
                prop_assert_eq!(b % 2, 1);
                prop_assert_eq!(t.m(), s.m() + 1);
                prop_assert_eq!(bisection_direct(&t).unwrap().b, b + 1);
            }
            Err(LhError::EvenBisection(e)) => prop_assert_eq!(e, b),
            Err(LhError::NoSubstitution(_)) => prop_assert_eq!(b % 2, 1),
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn wiring_is_symmetric(s in spanning_set(1..=8, 10), spare in 1u32..4) {
        let t = WiringTable::new(&s, s.m() as u32 + spare).unwrap();
        prop_assert!(t.check_symmetry());
        let mut cables = BTreeSet::new();
        for v in 0..s.n() as u32 {
            for p in 1..=s.m() as u32 {
                let u = t.peer(v, p).unwrap();
                cables.insert((v.min(u), v.max(u), p));
            }
            prop_assert_eq!(t.peer(v, s.m() as u32 + 1), None);
        }
        prop_assert_eq!(cables.len() as u64, t.cable_count());
    }

    #[test]
    fn db_round_trip(sets in proptest::collection::vec(spanning_set(3..=6, 6), 1..6)) {
        let mut db = SolutionsDb::new();
        for s in sets {
            db.insert(SolutionRecord::from_generators(s, "prop").unwrap()).unwrap();
        }
        let text = db.render();
        let back = SolutionsDb::parse(&text).unwrap();
        prop_assert_eq!(&back, &db);
        prop_assert_eq!(back.render(), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn hold_b_never_lowers_b(s in spanning_set(3..=4, 4), avg in any::<bool>(), depth in 1u8..=2) {
        let opts = SecondaryOptions {
            objective: if avg { Objective::AvgHops } else { Objective::Diameter },
            hold_b: true,
            depth,
            budget: 2_000,
        };
        let out = optimize_secondary(&s, opts).unwrap();
        prop_assert!(bisection_fwht(&out).unwrap().b >= bisection_fwht(&s).unwrap().b);
        prop_assert_eq!(out.m(), s.m());
        prop_assert!(out.span_check());
    }
}

#[test]
fn walsh_partitions_are_balanced() {
    for d in 1..=8u32 {
        let n = 1usize << d;
        for k in 1..n as u32 {
            let x = walsh_partition(WalshIndex::new(k, n).unwrap()).unwrap();
            let plus = x.signs().iter().filter(|&&s| s == 1).count();
            assert_eq!(plus, n / 2);
            assert_eq!(x.signs()[0], 1);
        }
    }
}
