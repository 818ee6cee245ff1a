mod common;

use common::*;
use num_traits::{One, Zero};
use proptest::prelude::*;
use uncontentious::dist::{improving_distribution, SubsetDistribution};
use uncontentious::matroid::WeightedMatroid;
use uncontentious::offline::{alpha_star, synthesize_crm, verify_crm};
use uncontentious::rational::{int, ratio, Rational};
use uncontentious::{rng, Factor, Subset};

fn kind() -> impl Strategy<Value = FamilyKind> {
    prop::sample::select(FAMILIES.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rank_axioms(kind in kind(), n in 1usize..=6, seed in any::<u64>()) {
        let m = random_matroid(&mut rng::seeded(seed), kind, n);
        for a in Subset::all(n) {
            prop_assert!(m.rank(a) <= a.len());
            for e in 0..n {
                let grow = m.rank(a.with(e)) - m.rank(a);
                prop_assert!(grow <= 1);
            }
            for b in Subset::all(n) {
                prop_assert!(m.rank(a.union(b)) + m.rank(a.intersection(b)) <= m.rank(a) + m.rank(b));
            }
        }
    }

    #[test]
    fn map_is_feasible_and_optimal(kind in kind(), n in 1usize..=5, seed in any::<u64>()) {
        let mut r = rng::seeded(seed);
        let m = random_matroid(&mut r, kind, n);
        let d = random_distribution(&mut r, n, 10);
        let a = alpha_star(&m, &d).unwrap();
        prop_assert_eq!(a.alpha.clone(), oracle_alpha(&m, &d).map_or(Factor::Infinite, Factor::Finite));
        prop_assert!(a.alpha >= Factor::Finite(Rational::one()));

        let s = synthesize_crm(&m, &d).unwrap();
        prop_assert_eq!(Factor::reciprocal_of(&s.beta), a.alpha.clone());
        for (set, _) in d.support() {
            let choices = s.crm.get(*set).unwrap_or(&[]);
            let total: Rational = choices.iter().map(|(_, q)| q).sum();
            prop_assert!(total <= Rational::one());
            for (chosen, q) in choices {
                prop_assert!(*q >= Rational::zero());
                prop_assert!(chosen.is_subset_of(*set) && m.is_independent(*chosen));
            }
        }
        prop_assert_eq!(verify_crm(&m, &d, &s.crm).unwrap().achieved_alpha, a.alpha);
    }

    #[test]
    fn subsampling_never_hurts(kind in kind(), n in 1usize..=5, seed in any::<u64>(), num in 0i64..=8) {
        let mut r = rng::seeded(seed);
        let m = random_matroid(&mut r, kind, n);
        let d = random_distribution(&mut r, n, 10);
        let thinned = d.subsample(&ratio(num, 8)).unwrap();
        prop_assert!(alpha_star(&m, &thinned).unwrap().alpha <= alpha_star(&m, &d).unwrap().alpha);
    }

    #[test]
    fn mixing_never_exceeds_the_worst_part(kind in kind(), n in 1usize..=5, seed in any::<u64>(), w in 1i64..=7) {
        let mut r = rng::seeded(seed);
        let m = random_matroid(&mut r, kind, n);
        let (d1, d2) = (random_distribution(&mut r, n, 8), random_distribution(&mut r, n, 8));
        let mix = SubsetDistribution::mixture(&[(d1.clone(), ratio(w, 8)), (d2.clone(), ratio(8 - w, 8))]).unwrap();
        let worst = alpha_star(&m, &d1).unwrap().alpha.max(alpha_star(&m, &d2).unwrap().alpha);
        prop_assert!(alpha_star(&m, &mix).unwrap().alpha <= worst);
    }

    #[test]
    fn improving_elements_are_at_most_inverse_p(
        kind in kind(),
        n in 1usize..=5,
        seed in any::<u64>(),
        weights in prop::collection::vec(0i64..=9, 5),
        num in 1i64..8,
    ) {
        let m = random_matroid(&mut rng::seeded(seed), kind, n);
        let wm = WeightedMatroid::new(m, weights[..n].iter().map(|&w| int(w)).collect()).unwrap();
        let p = ratio(num, 8);
        let d = improving_distribution(&wm, &p).unwrap();
        prop_assert_eq!(&d, &oracle_improving_distribution(&wm, &p));
        prop_assert!(alpha_star(wm.matroid(), &d).unwrap().alpha.at_most(&(Rational::one() / &p)));
        let full = SubsetDistribution::explicit(n, &[(Subset::full(n), Rational::one())]).unwrap();
        let optimum = oracle_expected_weighted_rank(&wm, &full);
        prop_assert!(oracle_expected_weighted_rank(&wm, &d) >= (Rational::one() - &p) * optimum);
    }
}
