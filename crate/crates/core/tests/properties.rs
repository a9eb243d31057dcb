mod common;

use common::oracles::{depth_recurrence, level_order_fill, random_game, random_subset, Naive};
use common::wordle;
use guesscert::prover::{bound, filter_starting_guesses, EliminationConfig, LowerBounds, Verdict};
use guesscert::search::{ap_min_total, greedy_tree, ExactSolver, SearchConfig};
use guesscert::valuation::{best_n_guesses, choose_guess, evaluate, evaluate_combined};
use guesscert::{CandidateSet, CombinedValuation, Response, Valuation};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

#[test]
fn bound_matches_fill_and_recurrence() {
    for b in 1..=10u64 {
        let d = depth_recurrence(500, b as usize);
        for n in 0..=500u64 {
            let x = bound(n, b).unwrap();
            assert_eq!(x, level_order_fill(n, b), "fill n={n} b={b}");
            assert_eq!(x, d[n as usize], "recurrence n={n} b={b}");
        }
    }
}

#[test]
fn bound_shape() {
    for b in 1..=40u64 {
        for n in 0..=300u64 {
            let x = bound(n, b).unwrap();
            assert!(bound(n, b + 1).unwrap() <= x);
            let next = bound(n + 1, b).unwrap();
            assert!(next > x);
            if b + 1 >= n && n > 0 {
                assert_eq!(x, 2 * n - 1);
            }
        }
    }
}

#[test]
fn answer_is_affirmative_only_on_self() {
    let g = wordle();
    let step = g.num_secrets() / 50;
    for i in 0..50 {
        let guess = g.secret_guess((i * step) as u32);
        for j in 0..50 {
            let s = (j * step) as u32;
            assert_eq!(g.response(guess, s) == g.affirmative(), g.secret_guess(s) == guess);
        }
    }
}

fn wordle_pair() -> impl Strategy<Value = (Vec<u32>, usize)> {
    let g = wordle();
    (
        proptest::collection::btree_set(0..g.num_secrets() as u32, 0..40),
        0..g.num_guesses(),
    )
        .prop_map(|(ids, guess)| (ids.into_iter().collect(), guess))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn splits_partition_the_candidates((ids, guess) in wordle_pair()) {
        let g = wordle();
        let c = CandidateSet::from_sorted(ids);
        let split = g.split(&c, guess);
        let mut union: Vec<u32> = split.iter().flat_map(|(_, s)| s.ids().to_vec()).collect();
        let total = union.len();
        union.sort_unstable();
        union.dedup();
        prop_assert_eq!(total, union.len());
        prop_assert_eq!(union.as_slice(), c.ids());
        for (r, s) in split.iter() {
            prop_assert!(!s.is_empty());
            prop_assert_eq!(s, &g.filter(&c, guess, *r));
        }
        let in_set = g.secret_of_guess(guess).is_some_and(|s| c.contains(s));
        let affirmative = split.get(g.affirmative()).map_or(0, |s| s.len());
        prop_assert_eq!(affirmative, usize::from(in_set));
        prop_assert_eq!(g.n_splits(guess, &c), split.len());
    }

    #[test]
    fn usefulness_is_shrinking_every_split((ids, guess) in wordle_pair()) {
        let g = wordle();
        let c = CandidateSet::from_sorted(ids);
        if c.len() > 1 {
            let largest = g.split(&c, guess).iter().map(|(_, s)| s.len()).max().unwrap();
            prop_assert_eq!(g.is_useful(guess, &c), largest < c.len());
        }
    }

    #[test]
    fn filter_matches_scan((ids, guess) in wordle_pair(), code in 0u16..243) {
        let g = wordle();
        let c = CandidateSet::from_sorted(ids);
        let r = Response(code);
        let expected: Vec<u32> = c.ids().iter().copied().filter(|&s| g.response(guess, s) == r).collect();
        let got = g.filter(&c, guess, r);
        prop_assert_eq!(got.ids(), expected.as_slice());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn max_splits_is_monotone((ids, _) in wordle_pair(), keep in proptest::collection::vec(any::<bool>(), 40)) {
        let g = wordle();
        let c = CandidateSet::from_sorted(ids);
        let sub: Vec<u32> = c.ids().iter().zip(&keep).filter(|(_, k)| **k).map(|(s, _)| *s).collect();
        let sub = CandidateSet::from_sorted(sub);
        prop_assert!(g.max_splits(&sub) <= g.max_splits(&c));
        prop_assert!(g.max_splits(&c) <= c.len());
    }

    #[test]
    fn valuation_ranges((ids, guess) in wordle_pair()) {
        let g = wordle();
        let c = CandidateSet::from_sorted(ids);
        prop_assume!(!c.is_empty());
        let n = c.len() as f64;
        let info = evaluate(g, Valuation::Information, guess, &c).unwrap();
        let ess = evaluate(g, Valuation::ExpSizeSplit, guess, &c).unwrap();
        let parts = evaluate(g, Valuation::MostParts, guess, &c).unwrap();
        let one_split = g.n_splits(guess, &c) == 1;
        prop_assert!(info <= 0.0);
        prop_assert_eq!(info == 0.0, one_split);
        prop_assert!((1.0..=n).contains(&ess));
        let in_set = g.secret_of_guess(guess).is_some_and(|s| c.contains(s));
        prop_assert_eq!(ess == n, one_split && !in_set || c.len() == 1);
        prop_assert!(parts >= -(g.max_splits(&c) as f64));
        let sum_sq: f64 = g.split(&c, guess).iter().map(|(_, s)| (s.len() * s.len()) as f64).sum();
        prop_assert!((ess - sum_sq / n).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn column_sweep_matches_guess_scan(
        ids in proptest::collection::btree_set(0..2315u32, 10..60),
        slack in 0u64..40,
    ) {
        let g = wordle();
        let c = CandidateSet::from_sorted(ids.into_iter().collect());
        let mut swept = LowerBounds::new(g);
        let mut scanned = LowerBounds::new(g).without_columns();
        for level in 2..=3 {
            let truth = scanned.lb(level, &c).unwrap();
            prop_assert_eq!(swept.lb(level, &c).unwrap(), truth);
            let budget = truth.saturating_sub(slack);
            let x = LowerBounds::new(g).lb_capped(level, &c, budget).unwrap();
            prop_assert!(x <= truth);
            prop_assert!(x > budget || x == truth);
        }
    }
}

/// Lexicographic argmin over an explicit table of score vectors.
fn table_argmin(rows: &[Vec<f64>]) -> usize {
    (0..rows.len())
        .min_by(|&a, &b| rows[a].partial_cmp(&rows[b]).unwrap().then(a.cmp(&b)))
        .unwrap()
}

#[test]
fn choice_matches_exhaustive_scan_and_ignores_shifts() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..60 {
        let game = random_game(&mut rng, 10);
        let c = random_subset(&mut rng, &game, 10);
        if c.is_empty() {
            continue;
        }
        for spec in ["mostparts,inset,ess", "information", "mss,inset", "inset,ess,mostparts"] {
            let v: CombinedValuation = spec.parse().unwrap();
            let rows: Vec<Vec<f64>> = (0..game.num_guesses())
                .map(|g| evaluate_combined(&game, &v, g, &c).unwrap())
                .collect();
            let chosen = choose_guess(&game, &v, &c).unwrap();
            assert_eq!(chosen, table_argmin(&rows));
            let shifted: Vec<Vec<f64>> = rows
                .iter()
                .map(|r| r.iter().enumerate().map(|(i, x)| if i == 0 { x + 3.5 } else { *x }).collect())
                .collect();
            assert_eq!(table_argmin(&shifted), chosen);

            let mut order: Vec<usize> = (0..rows.len()).collect();
            order.sort_by(|&a, &b| rows[a].partial_cmp(&rows[b]).unwrap().then(a.cmp(&b)));
            let best = best_n_guesses(&game, &v, &c, 5).unwrap();
            assert_eq!(best, order[..5.min(order.len())]);
        }
    }
}

/// Seeds for the small-game suites; each builds its own random game.
fn seeds() -> impl Iterator<Item = u64> {
    0..220
}

#[test]
fn lower_bound_chains_and_exactness() {
    for seed in seeds() {
        let mut rng = StdRng::seed_from_u64(seed);
        let game = random_game(&mut rng, 12);
        let c = random_subset(&mut rng, &game, 12);
        let mut naive = Naive::new(&game);
        let mut lbs = LowerBounds::new(&game);
        let exact = naive.min_total(c.ids());
        let top = 2 * c.len() + 1;
        let lb: Vec<u64> = (0..=top + 2).map(|i| if i == 0 { 0 } else { lbs.lb(i, &c).unwrap() }).collect();
        for (i, &x) in lb.iter().enumerate().take(top.min(4) + 1).skip(1) {
            assert_eq!(x, naive.lb(i, c.ids()), "seed {seed} level {i}");
        }
        for i in 1..=top {
            assert!(lb[i] <= exact, "seed {seed}: LB_{i} above MinTotal");
            assert!(lb[i] <= lb[i + 2], "seed {seed}: LB_{i} > LB_{}", i + 2);
            if i % 2 == 1 {
                assert!(lb[i] <= lb[i + 1], "seed {seed}: LB_{i} > LB_{}", i + 1);
            }
        }
        assert_eq!(lb[top], exact, "seed {seed}: LB_(2|C|+1) is not exact");
        assert_eq!(ExactSolver::new(&game).min_total(&c).unwrap(), exact, "seed {seed}");

        for g in game.useful_guesses(&c).into_iter().take(4) {
            let star = naive.cost(g, c.ids());
            let v: Vec<u64> = (1..=top + 2).map(|i| lbs.v(i, g, &c).unwrap()).collect();
            for i in 0..top {
                assert!(v[i] <= v[i + 2] && v[i] <= star, "seed {seed}: V chain");
            }
            assert_eq!(v[top - 1], star, "seed {seed}: V_(2|C|+1) is not exact");
            assert_eq!(v[0], naive.v(1, g, c.ids()));
            assert_eq!(v[1], naive.v(2, g, c.ids()));
        }
    }
}

#[test]
fn capped_evaluations_are_sound() {
    for seed in seeds().take(80) {
        let mut rng = StdRng::seed_from_u64(seed);
        let game = random_game(&mut rng, 12);
        let c = random_subset(&mut rng, &game, 12);
        let mut exact = LowerBounds::new(&game);
        let mut capped = LowerBounds::new(&game).with_cache_cap(Some(8));
        for level in 1..=5 {
            let truth = exact.lb(level, &c).unwrap();
            for budget in [0, truth.saturating_sub(1), truth, truth + 3] {
                let x = capped.lb_capped(level, &c, budget).unwrap();
                if x <= budget {
                    assert_eq!(x, truth, "seed {seed} level {level} budget {budget}");
                } else {
                    assert!(x <= truth, "seed {seed} level {level} budget {budget}");
                }
            }
        }
    }
}

#[test]
fn searches_agree_with_exhaustive_min_total() {
    for seed in seeds() {
        let mut rng = StdRng::seed_from_u64(seed);
        let game = random_game(&mut rng, 12);
        let c = random_subset(&mut rng, &game, 12);
        if c.is_empty() {
            continue;
        }
        let exact = Naive::new(&game).min_total(c.ids());
        let full = SearchConfig::new(game.num_guesses()).unwrap();
        let (v, tree) = ap_min_total(&game, &c, &full).unwrap();
        assert_eq!(v, exact, "seed {seed}");
        tree.validate(&game, &c).unwrap();
        assert_eq!(tree.score(&game, &c).unwrap().total, v);

        for breadth in [1, 3] {
            let (v, tree) = ap_min_total(&game, &c, &SearchConfig::new(breadth).unwrap()).unwrap();
            assert!(v >= exact);
            assert_eq!(tree.score(&game, &c).unwrap().total, v);
        }
        let (_, opt) = ExactSolver::new(&game).optimal_tree(&c).unwrap();
        assert_eq!(opt.score(&game, &c).unwrap().total, exact);

        let greedy = greedy_tree(&game, &CombinedValuation::default_ordering(), &c).unwrap();
        greedy.validate(&game, &c).unwrap();
        let score = greedy.score(&game, &c).unwrap();
        let replayed: usize = c.ids().iter().map(|&s| greedy.turns_needed(&game, s).unwrap()).sum();
        assert_eq!(score.total, replayed as u64);
        let weighted: u64 = score.histogram.iter().enumerate().map(|(d, k)| (d as u64 + 1) * k).sum();
        assert_eq!(weighted, score.total);
    }
}

#[test]
fn elimination_never_drops_an_optimal_first_guess() {
    for seed in seeds() {
        let mut rng = StdRng::seed_from_u64(seed);
        let game = random_game(&mut rng, rng_size(seed));
        let all = game.all_secrets();
        let mut naive = Naive::new(&game);
        let exact = naive.min_total(all.ids());
        let optimal: Vec<String> = game
            .useful_guesses(&all)
            .into_iter()
            .filter(|&g| naive.cost(g, all.ids()) == exact)
            .map(|g| game.word(g).to_string())
            .collect();
        // A loose bound from the narrowest search and the tight one.
        let (loose, _) = ap_min_total(&game, &all, &SearchConfig::new(1).unwrap()).unwrap();
        for ub in [loose, exact] {
            let config = EliminationConfig {
                max_level: 2 * all.len() + 1,
                ..EliminationConfig::default()
            };
            let mut lbs = LowerBounds::new(&game);
            let cert = filter_starting_guesses(&mut lbs, ub, &config, &mut |_| {}).unwrap();
            for e in &cert.eliminations {
                assert!(!optimal.contains(&e.guess), "seed {seed}: optimal {} eliminated", e.guess);
                assert!(e.value > ub);
            }
            match &cert.verdict {
                Verdict::Optimal { min_total, starters, .. } => {
                    assert_eq!(*min_total, exact, "seed {seed}");
                    assert!(optimal.iter().all(|w| starters.contains(w)), "seed {seed}");
                }
                Verdict::Inconclusive { .. } => panic!("seed {seed}: inconclusive at the exact level"),
            }
        }
    }
}

fn rng_size(seed: u64) -> usize {
    3 + (seed % 8) as usize
}
