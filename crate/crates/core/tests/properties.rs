use luce::inversions::inversion_moments;
use luce::locallimits::{chain_probability, joint_chain_probability, lambda_finite, ChainPoset};
use luce::model::{log_luce_pmf, Algorithm};
use luce::numeric::stats::{chi_square_sf, chi_square_two_sample, Estimate};
use luce::patterns::{binomial, cocc, count_inversions, occ_estimate, occ_exact, Pattern};
use luce::{luce_pmf, rng_stream, Permutation, PermutonModel, WeightProfile, WeightVector};
use proptest::prelude::*;
use rand::Rng;
use rand_distr::Exp1;

fn all_perms(n: usize) -> Vec<Permutation> {
    Pattern::all(n).unwrap().iter().map(|p| p.to_permutation()).collect()
}

fn weights_strategy(max_n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..100.0, 1..=max_n)
}

fn perm_strategy(max_n: usize) -> impl Strategy<Value = Permutation> {
    (1..=max_n)
        .prop_flat_map(|n| Just((1..=n as u32).collect::<Vec<_>>()).prop_shuffle())
        .prop_map(|v| Permutation::new(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pmf_sums_to_one(theta in weights_strategy(6)) {
        let w = WeightVector::new(theta.clone()).unwrap();
        let total: f64 = all_perms(theta.len()).iter().map(|s| luce_pmf(&w, s).unwrap()).sum();
        prop_assert!((total - 1.0).abs() < 1e-12, "{total}");
    }

    #[test]
    fn pmf_is_scale_invariant(theta in weights_strategy(8), c in 1e-6f64..1e6, seed in any::<u64>()) {
        let w = WeightVector::new(theta.clone()).unwrap();
        let wc = WeightVector::new(theta.iter().map(|t| t * c).collect()).unwrap();
        let sigma = Algorithm::Sequential.sample(&w, &mut rng_stream(seed, 0));
        let (a, b) = (luce_pmf(&w, &sigma).unwrap(), luce_pmf(&wc, &sigma).unwrap());
        prop_assert!(((a - b) / a).abs() < 1e-12, "{a} vs {b}");
        let (la, lb) = (log_luce_pmf(&w, &sigma).unwrap(), log_luce_pmf(&wc, &sigma).unwrap());
        prop_assert!((la - lb).abs() < 1e-10);
    }

    #[test]
    fn first_draw_marginal(theta in weights_strategy(5)) {
        let w = WeightVector::new(theta.clone()).unwrap();
        let total: f64 = theta.iter().sum();
        let mut first = vec![0.0; theta.len()];
        for s in all_perms(theta.len()) {
            let i = s.as_slice().iter().position(|&v| v == 1).unwrap();
            first[i] += luce_pmf(&w, &s).unwrap();
        }
        for (p, t) in first.iter().zip(&theta) {
            prop_assert!((p - t / total).abs() < 1e-12);
        }
    }

    #[test]
    fn equal_weights_are_uniform(n in 1usize..=6, c in 0.1f64..10.0) {
        let w = WeightVector::new(vec![c; n]).unwrap();
        let fact: f64 = (1..=n).map(|i| i as f64).product();
        for s in all_perms(n) {
            prop_assert!((luce_pmf(&w, &s).unwrap() * fact - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn occurrence_counts_partition_subsets(sigma in perm_strategy(12), k in 1usize..=4) {
        prop_assume!(k <= sigma.len());
        let n = sigma.len();
        let total: u64 = Pattern::all(k).unwrap().iter().map(|p| occ_exact(p, &sigma).unwrap().count).sum();
        prop_assert_eq!(total as u128, binomial(n as u64, k as u64));
        let windows: u64 = Pattern::all(k).unwrap().iter().map(|p| cocc(p, &sigma).unwrap().count).sum();
        prop_assert_eq!(windows as usize, n - k + 1);
    }

    #[test]
    fn inversions_are_occurrences_of_21(sigma in perm_strategy(40)) {
        prop_assume!(sigma.len() >= 2);
        let p: Pattern = "21".parse().unwrap();
        prop_assert_eq!(count_inversions(&sigma), occ_exact(&p, &sigma).unwrap().count);
    }

    #[test]
    fn complementation(sigma in perm_strategy(10), k in 2usize..=3, idx in 0usize..6) {
        prop_assume!(k <= sigma.len());
        let all = Pattern::all(k).unwrap();
        let pi = &all[idx % all.len()];
        prop_assert_eq!(occ_exact(pi, &sigma).unwrap().count, occ_exact(&pi.reversed(), &sigma.reversed()).unwrap().count);
        prop_assert_eq!(cocc(pi, &sigma).unwrap().count, cocc(&pi.reversed(), &sigma.reversed()).unwrap().count);
    }

    #[test]
    fn lambda_windows_partition(theta in prop::collection::vec(0.01f64..100.0, 4..60), k in 1usize..=4) {
        let n = theta.len();
        let w = WeightVector::new(theta).unwrap();
        let total: f64 = Pattern::all(k).unwrap().iter().map(|p| lambda_finite(&w, p).unwrap()).sum();
        prop_assert!((total - (n - k + 1) as f64 / n as f64).abs() < 1e-12);
    }

    #[test]
    fn inversion_moments_match_enumeration(theta in prop::collection::vec(0.01f64..100.0, 2..=6)) {
        let w = WeightVector::new(theta.clone()).unwrap();
        let m = inversion_moments(&w).unwrap();
        let (mut e1, mut e2) = (0.0, 0.0);
        for s in all_perms(theta.len()) {
            let p = luce_pmf(&w, &s).unwrap();
            let c = count_inversions(&s) as f64;
            e1 += p * c;
            e2 += p * c * c;
        }
        prop_assert!((m.mean - e1).abs() < 1e-10, "{} vs {e1}", m.mean);
        prop_assert!((m.variance - (e2 - e1 * e1)).abs() < 1e-10);
    }

    #[test]
    fn inversion_moments_are_scale_invariant(theta in prop::collection::vec(0.01f64..100.0, 2..=30), c in 1e-3f64..1e3) {
        let a = inversion_moments(&WeightVector::new(theta.clone()).unwrap()).unwrap();
        let b = inversion_moments(&WeightVector::new(theta.iter().map(|t| t * c).collect()).unwrap()).unwrap();
        prop_assert!((a.mean / b.mean - 1.0).abs() < 1e-12);
        prop_assert!((a.variance / b.variance - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chain_probabilities_partition(rates in prop::collection::vec(0.1f64..10.0, 1..=5)) {
        let k = rates.len();
        let total: f64 = Pattern::all(k)
            .unwrap()
            .iter()
            .map(|p| {
                let order: Vec<usize> = p.as_slice().iter().map(|&v| v as usize).collect();
                chain_probability(&rates, &order).unwrap()
            })
            .sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn permuton_f_increasing_and_invertible(a in 0.0f64..20.0, b in 0.0f64..20.0, y in 0.01f64..0.999) {
        prop_assume!((a - b).abs() > 1e-9);
        for profile in [WeightProfile::Sukhatme, WeightProfile::Linear, WeightProfile::Constant(1.0)] {
            let m = PermutonModel::new(profile).unwrap();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(m.capital_f(lo).unwrap() < m.capital_f(hi).unwrap());
            let x = m.capital_f_inverse(y).unwrap();
            prop_assert!((m.capital_f(x).unwrap() - y).abs() < 1e-9);
        }
    }

    #[test]
    fn permuton_rank_shortcut(seed in any::<u64>(), n in 1usize..200) {
        let m = PermutonModel::new(WeightProfile::Sukhatme).unwrap();
        let a = m.sample_with(n, &mut rng_stream(seed, 0), false);
        let b = m.sample_with(n, &mut rng_stream(seed, 0), true);
        prop_assert_eq!(a, b);
    }
}

#[test]
fn samplers_are_equidistributed_on_small_sets() {
    for theta in [vec![1.0, 2.0, 3.0], vec![0.5, 4.0, 1.0, 2.0], vec![3.0, 1.0, 0.2, 2.0, 5.0]] {
        let n = theta.len();
        let w = WeightVector::new(theta).unwrap();
        let index = |s: &Permutation| s.as_slice().iter().fold(0usize, |acc, &v| acc * n + v as usize - 1);
        let cells = n.pow(n as u32);
        let draws = 200_000;
        let mut a = vec![0u64; cells];
        let mut b = vec![0u64; cells];
        let mut rng_a = rng_stream(21, n as u64);
        let mut rng_b = rng_stream(22, n as u64);
        for _ in 0..draws {
            a[index(&Algorithm::Sequential.sample(&w, &mut rng_a))] += 1;
            b[index(&Algorithm::Race.sample(&w, &mut rng_b))] += 1;
        }
        let (stat, df) = chi_square_two_sample(&a, &b);
    let p = chi_square_sf(stat, df);
        assert!(p > 0.001, "n={n}: p = {p}");
    }
}

#[test]
fn first_draw_marginal_by_simulation() {
    let theta: Vec<f64> = (1..=50).map(|i| 1.0 + (i % 7) as f64).collect();
    let w = WeightVector::new(theta.clone()).unwrap();
    let total: f64 = theta.iter().sum();
    let draws = 100_000u64;
    let mut hits = vec![0u64; 50];
    let mut rng = rng_stream(3, 0);
    for _ in 0..draws {
        let s = Algorithm::Sequential.sample(&w, &mut rng);
        hits[s.as_slice().iter().position(|&v| v == 1).unwrap()] += 1;
    }
    for (i, h) in hits.iter().enumerate() {
        let e = Estimate::from_hits(*h, draws);
        assert!(e.within(theta[i] / total, 4.5), "label {}: {:?}", i + 1, e);
    }
}

#[test]
fn occ_estimate_is_unbiased() {
    let w = WeightProfile::Sukhatme.weights(30).unwrap();
    let sigma = Algorithm::Sequential.sample(&w, &mut rng_stream(5, 0));
    let pi: Pattern = "132".parse().unwrap();
    let exact = occ_exact(&pi, &sigma).unwrap().proportion;
    let runs: Vec<f64> = (0..200).map(|r| occ_estimate(&pi, &sigma, 500, &mut rng_stream(6, r)).unwrap().value).collect();
    let mean = runs.iter().sum::<f64>() / 200.0;
    let var = runs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 199.0;
    assert!((mean - exact).abs() <= 4.0 * (var / 200.0).sqrt(), "{mean} vs {exact}");
}

#[test]
fn joint_chain_probability_matches_simulation() {
    let rates = [1.0, 2.5, 0.7, 1.8, 3.0, 0.4];
    let cases: [(&[usize], &[usize]); 3] = [(&[1, 2, 3, 4], &[3, 4, 5, 6]), (&[2, 1, 3], &[2, 3, 4]), (&[1, 2], &[5, 6])];
    let samples = 1_000_000u64;
    for (c1, c2) in cases {
        let exact = joint_chain_probability(&rates, c1, c2).unwrap();
        let mut rng = rng_stream(17, c1.len() as u64);
        let mut hits = 0u64;
        let mut e = [0.0f64; 6];
        for _ in 0..samples {
            for (slot, r) in e.iter_mut().zip(&rates) {
                let x: f64 = rng.sample(Exp1);
                *slot = x / r;
            }
            let increasing = |c: &[usize]| c.windows(2).all(|p| e[p[0] - 1] < e[p[1] - 1]);
            if increasing(c1) && increasing(c2) {
                hits += 1;
            }
        }
        let est = Estimate::from_hits(hits, samples);
        assert!(est.within(exact, 4.0), "{c1:?} {c2:?}: {exact} vs {est:?}");
    }
}

#[test]
fn unit_rates_count_linear_extensions() {
    let poset = ChainPoset::new(&[1, 2, 3], &[3, 4, 5]).unwrap();
    let ground = poset.ground_size();
    let fact: u64 = (1..=ground as u64).product();
    let p = poset.probability(&vec![1.0; ground]).unwrap();
    assert!((p - poset.linear_extensions() as f64 / fact as f64).abs() < 1e-14);
}
