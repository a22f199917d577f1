//! Property-based invariants over randomly generated models, assortments, and
//! file-format round trips.

use gmchoice::chain::random_chain;
use gmchoice::estimation::Observation;
use gmchoice::gmnl::raw_choice_probabilities;
use gmchoice::io::{format_dataset, parse_dataset};
use gmchoice::lowrank::random_admissible;
use gmchoice::{Assortment, GmnlModel};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn normalized(len: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.05f64..1.0, len).prop_map(|raw| {
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|x| x / total).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Chain-computed choice probabilities form a distribution supported on
    /// the offered set plus the no-purchase state.
    #[test]
    fn chain_probabilities_are_a_distribution(
        seed in 0u64..1_000,
        n in 2usize..8,
        alpha in 0.0f64..3.0,
        mask_raw in 1u64..256,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = random_chain(n, alpha, &mut rng);
        let mask = 1 + mask_raw % ((1 << n) - 1);
        let s = Assortment::from_mask(mask, n);
        let pi = model.choice_probabilities(&s).unwrap();
        let mut total = 0.0;
        for j in 0..=n {
            let p = pi.prob(j);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&p));
            prop_assert!(j == 0 || s.contains(j) || p == 0.0);
            total += p;
        }
        prop_assert!((total - 1.0).abs() <= 1e-9);
    }

    /// The no-purchase probability never decreases as the saturation level
    /// rises, for any fixed assortment.
    #[test]
    fn no_purchase_monotone_in_saturation(
        v in normalized(7),
        alpha in 0.0f64..8.0,
        bump in 0.01f64..4.0,
        mask_raw in 1u64..64,
    ) {
        let n = v.len() - 1;
        let mask = 1 + mask_raw % ((1 << n) - 1);
        let s = Assortment::from_mask(mask, n);
        let low = GmnlModel::new(v.clone(), alpha).unwrap();
        let high = GmnlModel::new(v, alpha + bump).unwrap();
        prop_assert!(
            high.choice_probabilities(&s).no_purchase()
                >= low.choice_probabilities(&s).no_purchase() - 1e-12
        );
    }

    /// Closed-form probabilities are scale-invariant once the saturation is
    /// rescaled by the total weight.
    #[test]
    fn weight_scaling_equivalence(
        v in normalized(6),
        alpha in 0.0f64..5.0,
        scale in 0.1f64..10.0,
        mask_raw in 1u64..32,
    ) {
        let n = v.len() - 1;
        let mask = 1 + mask_raw % ((1 << n) - 1);
        let s = Assortment::from_mask(mask, n);
        let scaled: Vec<f64> = v.iter().map(|x| x * scale).collect();
        let a = raw_choice_probabilities(&v, alpha * scale, &s);
        let b = raw_choice_probabilities(&scaled, alpha, &s);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    /// Assortment mask round trip.
    #[test]
    fn assortment_mask_round_trip(n in 1usize..20, mask_raw in 1u64..u64::MAX) {
        let mask = 1 + mask_raw % ((1u64 << n) - 1).max(1);
        let s = Assortment::from_mask(mask, n);
        let back: u64 = s.members().iter().map(|i| 1u64 << (i - 1)).sum();
        prop_assert_eq!(back, mask);
        prop_assert_eq!(s.len(), mask.count_ones() as usize);
    }

    /// Dataset CSV render/parse round trip.
    #[test]
    fn dataset_csv_round_trip(
        picks in proptest::collection::vec((1u64..1024, 0usize..=10), 1..40)
    ) {
        let n = 10;
        let observations: Vec<Observation> = picks
            .into_iter()
            .map(|(mask, pick)| {
                let assortment = Assortment::from_mask(mask, n);
                let members = assortment.members();
                let choice =
                    if pick == 0 { 0 } else { members[(pick - 1) % members.len()] };
                Observation { assortment, choice }
            })
            .collect();
        let text = format_dataset(&observations);
        let back = parse_dataset(&text, n, false).unwrap();
        prop_assert_eq!(back, observations);
    }

    /// Randomly built low-rank models are valid substitution chains: every
    /// transition row sums to one with nonnegative entries.
    #[test]
    fn admissible_low_rank_rows_are_distributions(
        seed in 0u64..500,
        n in 3usize..9,
        k in 1usize..3,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alpha = 0.5 * (n as f64).ln();
        let model = random_admissible(n, k.min(n - 1), alpha, &mut rng).unwrap();
        for i in 1..=n {
            let mut row_sum = 0.0;
            for j in 0..=n {
                let r = model.rho(i, j);
                prop_assert!(r >= -1e-12);
                row_sum += r;
            }
            prop_assert!((row_sum - 1.0).abs() <= 1e-9);
        }
    }
}
