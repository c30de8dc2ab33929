//! Randomized property tests: engine invariants that must hold on arbitrary
//! inputs, not just the published examples.

mod common;

use massforms_core::linalg::{rational_rank, smith_normal_form, solve_integer, Snf};
use massforms_core::num::{BigInt, One, Zero};
use massforms_core::{
    builtin, check_doubling, congruence_formula, parse_weight_file, prime_power, ratio,
    tame_formula, unit_group, CharacterSum, RamFiltration, Rat, Subgroup, WeightFunction,
};
use proptest::prelude::*;

fn small_rat() -> impl Strategy<Value = Rat> {
    (-12i64..=12, 1i64..=6).prop_map(|(n, d)| ratio(n, d))
}

const GROUPS: &[&str] = &["C2", "C4", "C6", "C2xC2", "S3", "D4", "Q8", "D5"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn character_sum_matches_complex_oracle(
        n in 1u64..=16,
        pick in any::<prop::sample::Index>(),
        x in 1u64..=100,
    ) {
        let units = unit_group(n);
        let subgroups = units.all_subgroups();
        let s = subgroups[pick.index(subgroups.len())].clone();
        let chars = common::characters(&units);
        let engine = CharacterSum::new(n, s.clone()).unwrap().eval(x).unwrap() as i64;
        let oracle = common::character_sum_oracle(&units, &chars, &s, x).unwrap();
        prop_assert_eq!(engine, oracle);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn character_sum_is_periodic_mod_n(
        n in 1u64..=20,
        pick in any::<prop::sample::Index>(),
        x in 1u64..=60,
        k in 1u64..=4,
    ) {
        let units = unit_group(n);
        let subgroups = units.all_subgroups();
        let s = subgroups[pick.index(subgroups.len())].clone();
        let cs = CharacterSum::new(n, s).unwrap();
        prop_assert_eq!(cs.eval(x).unwrap(), cs.eval(x + k * n).unwrap());
    }

    #[test]
    fn filtration_strips_trailing_trivial_and_stays_descending(
        pick in any::<prop::sample::Index>(),
        seed in any::<prop::sample::Index>(),
        extra_trivial in 0usize..=2,
    ) {
        let g = builtin(GROUPS[pick.index(GROUPS.len())]).unwrap();
        let subs = g.subgroups();
        // build a genuinely descending chain from a random starting subgroup
        let mut chain = vec![subs[seed.index(subs.len())].clone()];
        loop {
            let last = chain.last().unwrap().clone();
            let next: Vec<&Subgroup> = subs
                .iter()
                .filter(|s| s.is_subset_of(&last) && s.order() < last.order())
                .collect();
            if next.is_empty() || chain.len() >= 3 {
                break;
            }
            chain.push(next[seed.index(next.len())].clone());
        }
        let trivial = Subgroup::new(&g, vec![0]).unwrap();
        for _ in 0..extra_trivial {
            chain.push(trivial.clone());
        }
        let filt = RamFiltration::new(&g, chain.clone()).unwrap();
        prop_assert!(filt.levels().last().map(|s| s.order() > 1).unwrap_or(true));

        // reversing a strictly descending two-step chain must be rejected
        if chain[0].order() > 1 {
            let bad = vec![trivial.clone(), chain[0].clone()];
            prop_assert!(RamFiltration::new(&g, bad).is_err());
        }
    }

    #[test]
    fn weight_files_round_trip(
        pick in any::<prop::sample::Index>(),
        values in prop::collection::vec(small_rat(), 16),
    ) {
        let g = builtin(GROUPS[pick.index(GROUPS.len())]).unwrap();
        let pairs = g.maximal_pairs();
        let mut w = WeightFunction::zero(pairs.len());
        for i in 0..pairs.len() {
            w.set(i, values[i % values.len()].clone());
        }
        let mut text = String::from("# round trip\n");
        for (i, pair) in pairs.iter().enumerate() {
            text.push_str(&format!(
                "H = {} ; H' = {} ; w = {}\n",
                g.set_string(pair.outer.elements()),
                g.set_string(pair.inner.elements()),
                w.get(i),
            ));
        }
        let parsed = parse_weight_file(&g, &pairs, &text).unwrap();
        prop_assert_eq!(parsed, w);
    }

    #[test]
    fn doubling_holds_on_random_wild_chains(
        pick in any::<prop::sample::Index>(),
        cpick in any::<prop::sample::Index>(),
        dpick in any::<prop::sample::Index>(),
    ) {
        let names = common::ell_group_names();
        let g = builtin(names[pick.index(names.len())]).unwrap();
        let subs = g.subgroups();
        let nontrivial: Vec<&Subgroup> = subs.iter().filter(|s| s.order() > 1).collect();
        let c = nontrivial[cpick.index(nontrivial.len())].clone();
        let inside: Vec<&Subgroup> = subs.iter().filter(|s| s.is_subset_of(&c)).collect();
        let d = inside[dpick.index(inside.len())].clone();
        let tame = RamFiltration::tame(c.clone());
        let wild = RamFiltration::new(&g, vec![c.clone(), c, d]).unwrap();
        let report = check_doubling(&g, &tame, &wild).unwrap();
        prop_assert!(report.holds);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn smith_form_transforms_and_divisors(
        rows in 1usize..=4,
        cols in 1usize..=4,
        entries in prop::collection::vec(-9i64..=9, 16),
    ) {
        let a: Vec<Vec<BigInt>> = (0..rows)
            .map(|i| (0..cols).map(|j| BigInt::from(entries[i * cols + j])).collect())
            .collect();
        let Snf { d, u, v, divisors, rank } = smith_normal_form(&a);

        // U A V = D
        let mul = |x: &Vec<Vec<BigInt>>, y: &Vec<Vec<BigInt>>| -> Vec<Vec<BigInt>> {
            let n = x.len();
            let m = y[0].len();
            let k = y.len();
            (0..n)
                .map(|i| {
                    (0..m)
                        .map(|j| (0..k).map(|t| &x[i][t] * &y[t][j]).sum())
                        .collect()
                })
                .collect()
        };
        let uav = mul(&mul(&u, &a), &v);
        prop_assert_eq!(&uav, &d);

        for w in divisors.windows(2) {
            prop_assert!((&w[1] % &w[0]).is_zero());
        }
        prop_assert_eq!(divisors.len(), rank);

        let rational: Vec<Vec<Rat>> = a
            .iter()
            .map(|row| row.iter().map(|x| Rat::from_integer(x.clone())).collect())
            .collect();
        prop_assert_eq!(rank, rational_rank(&rational));
    }

    #[test]
    fn integer_solver_finds_planted_solutions(
        rows in 1usize..=4,
        cols in 1usize..=4,
        entries in prop::collection::vec(-9i64..=9, 16),
        planted in prop::collection::vec(-5i64..=5, 4),
    ) {
        let a: Vec<Vec<BigInt>> = (0..rows)
            .map(|i| (0..cols).map(|j| BigInt::from(entries[i * cols + j])).collect())
            .collect();
        let x: Vec<BigInt> = (0..cols).map(|j| BigInt::from(planted[j])).collect();
        let b: Vec<BigInt> = a
            .iter()
            .map(|row| row.iter().zip(&x).map(|(c, v)| c * v).sum())
            .collect();
        let solved = solve_integer(&a, &b);
        prop_assert!(solved.is_some());
        let (particular, kernel) = solved.unwrap();
        let apply = |y: &[BigInt]| -> Vec<BigInt> {
            a.iter()
                .map(|row| row.iter().zip(y).map(|(c, v)| c * v).sum())
                .collect()
        };
        prop_assert_eq!(apply(&particular), b);
        for k in &kernel {
            prop_assert!(apply(k).iter().all(|v| v.is_zero()));
        }
    }

    #[test]
    fn prime_powers_invert(x in 2u64..=97, e in -20i64..=20) {
        let pos = prime_power(x, &ratio(e, 1)).unwrap();
        let neg = prime_power(x, &ratio(-e, 1)).unwrap();
        prop_assert!((pos * neg).is_one());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn congruence_formula_matches_tame_formula_at_matching_primes(
        pick in any::<prop::sample::Index>(),
        ppick in any::<prop::sample::Index>(),
        // integer weights keep every resolved exponent integral, which
        // power evaluation requires
        values in prop::collection::vec((-12i64..=12).prop_map(|n| ratio(n, 1)), 16),
    ) {
        let g = builtin(GROUPS[pick.index(GROUPS.len())]).unwrap();
        let tame_primes: Vec<u64> = common::primes_below(60)
            .into_iter()
            .filter(|&p| !(g.order() as u64).is_multiple_of(p))
            .collect();
        let p = tame_primes[ppick.index(tame_primes.len())];
        let pairs = g.maximal_pairs();
        let mut w = WeightFunction::zero(pairs.len());
        for i in 0..pairs.len() {
            w.set(i, values[i % values.len()].clone());
        }
        let by_class = congruence_formula(&g, p % g.order() as u64).unwrap();
        let full = tame_formula(&g);
        prop_assert_eq!(
            by_class.eval(p, Some(&w)).unwrap(),
            full.eval(p, &w).unwrap()
        );
    }
}
