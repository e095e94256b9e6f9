//! Noiseless runs of every mechanism against independent brute-force oracles.

use contrel_core::apps::{
    edge_index, pair_count, Alphabet, EdgeUpdate, EpisodeCounterState, GraphStream,
    SubstringCounterState,
};
use contrel_core::factor::factor_coeff;
use contrel_core::mech::{
    AverageState, BinaryTreeState, CounterState, HistogramState, InputDomain,
};
use contrel_core::privacy::{NoiseMode, NoisePlan, PrivacyBudget};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn dry(horizon: usize) -> NoisePlan {
    NoisePlan::new(PrivacyBudget::new(0.5, 1e-6).unwrap(), horizon, 0)
        .unwrap()
        .with_sigma_zero(true)
}

fn dense_counting(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let f: Vec<f64> = (0..n as i64).map(factor_coeff).collect();
    let rx: Vec<f64> = (0..n)
        .map(|i| (0..=i).map(|j| f[i - j] * x[j]).sum())
        .collect();
    (0..n)
        .map(|i| (0..=i).map(|j| f[i - j] * rx[j]).sum())
        .collect()
}

#[test]
fn counter_matches_dense_product_at_256() {
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let x: Vec<f64> = (0..256).map(|_| rng.random_range(0..2) as f64).collect();
    let oracle = dense_counting(&x);
    for mode in [NoiseMode::FixedHorizon, NoiseMode::PerStepPaper] {
        let mut c = CounterState::new(dry(256).with_mode(mode)).unwrap();
        let mut sum = 0.0;
        for (t, &xi) in x.iter().enumerate() {
            let a = c.step(xi).unwrap();
            sum += xi;
            assert!((a - oracle[t]).abs() < 1e-9);
            assert!((a - sum).abs() < 1e-9);
        }
    }
}

#[test]
fn average_matches_running_mean_at_128() {
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let x: Vec<f64> = (0..128).map(|_| rng.random::<f64>()).collect();
    for mode in [NoiseMode::FixedHorizon, NoiseMode::PerStepPaper] {
        let mut a = AverageState::new(dry(128).with_mode(mode))
            .unwrap()
            .with_domain(InputDomain::UnitInterval);
        let mut sum = 0.0;
        for (t, &xi) in x.iter().enumerate() {
            sum += xi;
            assert!((a.step(xi).unwrap() - sum / (t + 1) as f64).abs() < 1e-8);
        }
    }
}

#[test]
fn tree_and_histogram_random_cases() {
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    for _ in 0..50 {
        let horizon = rng.random_range(1..=128);
        let u = rng.random_range(1..=6);
        let mut tree = BinaryTreeState::new(dry(horizon));
        let mut hist = HistogramState::new(dry(horizon), u)
            .unwrap()
            .with_deletions(true);
        let mut counts = vec![0i64; u];
        let mut sum = 0.0;
        for _ in 0..horizon {
            let x = rng.random_range(0..2) as f64;
            sum += x;
            assert_eq!(tree.step(x).unwrap(), sum);

            let j = rng.random_range(0..u);
            let sign = if counts[j] > 0 && rng.random_bool(0.3) {
                -1
            } else {
                1
            };
            counts[j] += sign as i64;
            let out = hist.step(j, sign).unwrap();
            for (a, &b) in out.iter().zip(&counts) {
                assert!((a - b as f64).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn graph_equals_cumulative_updates() {
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    for _ in 0..30 {
        let n = rng.random_range(2..=8);
        let horizon = rng.random_range(1..=64);
        let mut g = GraphStream::new(dry(horizon), n).unwrap();
        let mut truth = vec![0.0; pair_count(n)];
        for _ in 0..horizon {
            let u = rng.random_range(0..n - 1);
            let v = rng.random_range(u + 1..n);
            let w: f64 = rng.random();
            truth[edge_index(n, u, v)] += w;
            let released = g.step(&[EdgeUpdate::new(v, u, w)]).unwrap();
            for (a, b) in released.weights().iter().zip(&truth) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }
}

fn brute_substring_count(s: &[usize], word: &[usize]) -> u64 {
    s.windows(word.len()).filter(|w| *w == word).count() as u64
}

/// Windows `(start, end)` of all minimal occurrences of `e` in `s`, by definition.
fn brute_minimal_windows(s: &[usize], e: &[usize]) -> Vec<(usize, usize)> {
    fn occurrences(
        s: &[usize],
        e: &[usize],
        from: usize,
        acc: &mut Vec<usize>,
        out: &mut Vec<(usize, usize)>,
    ) {
        if acc.len() == e.len() {
            out.push((acc[0], *acc.last().unwrap()));
            return;
        }
        for i in from..s.len() {
            if s[i] == e[acc.len()] {
                acc.push(i);
                occurrences(s, e, i + 1, acc, out);
                acc.pop();
            }
        }
    }
    let mut occ = Vec::new();
    occurrences(s, e, 0, &mut Vec::new(), &mut occ);
    occ.sort();
    occ.dedup();
    occ.iter()
        .copied()
        .filter(|&(i1, ik)| {
            !occ.iter()
                .any(|&(j1, jk)| (i1 < j1 && jk <= ik) || (i1 <= j1 && jk < ik))
        })
        .collect()
}

#[test]
fn substring_and_episode_random_streams() {
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    for case in 0..200 {
        let q = rng.random_range(1..=3);
        let max_len = rng.random_range(1..=3);
        let len = rng.random_range(1..=12);
        let letters: Vec<char> = "abc".chars().take(q).collect();
        let alphabet = Alphabet::new(&letters).unwrap();
        let stream: Vec<usize> = (0..len).map(|_| rng.random_range(0..q)).collect();

        let mut sub = SubstringCounterState::new(dry(len), alphabet.clone(), max_len).unwrap();
        let mut epi = EpisodeCounterState::new(dry(len), alphabet.clone(), max_len).unwrap();
        for t in 0..len {
            let c = letters[stream[t]];
            let s_out = sub.step(c).unwrap();
            let e_out = epi.step(c).unwrap();
            let prefix = &stream[..=t];
            let index = sub.index().clone();
            for i in 0..index.dim() {
                let word = index.word(i);
                let s_true = brute_substring_count(prefix, &word);
                assert_eq!(sub.true_counts()[i], s_true, "case {case}");
                assert!((s_out[i] - s_true as f64).abs() < 1e-9);

                let e_true = brute_minimal_windows(prefix, &word).len() as u64;
                assert_eq!(
                    epi.true_counts()[i],
                    e_true,
                    "case {case} word {word:?} prefix {prefix:?}"
                );
                assert!((e_out[i] - e_true as f64).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn episode_never_reports_multiplicity() {
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    for _ in 0..100 {
        let len = rng.random_range(1..=12);
        let stream: Vec<usize> = (0..len).map(|_| rng.random_range(0..2)).collect();
        let alphabet = Alphabet::new(&['a', 'b']).unwrap();
        let mut epi = EpisodeCounterState::new(dry(len), alphabet.clone(), 3).unwrap();
        for t in 0..len {
            let before = epi.true_counts().to_vec();
            epi.step(alphabet.letter(stream[t])).unwrap();
            for (a, b) in epi.true_counts().iter().zip(&before) {
                assert!(a - b <= 1);
            }
            let ending = |w: &[usize]| {
                brute_minimal_windows(&stream[..=t], w)
                    .iter()
                    .filter(|&&(_, end)| end == t)
                    .count()
            };
            for i in 0..epi.index().dim() {
                assert!(ending(&epi.index().word(i)) <= 1);
            }
        }
    }
}
