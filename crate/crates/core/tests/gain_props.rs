use approx::assert_relative_eq;
use proptest::prelude::*;
use seedbs::gain::{cusum_with, CusumEvaluator, CusumForm, GainEvaluator};
use seedbs::intervals::Layer;
use seedbs::oracle::naive_cusum;
use seedbs::{best_split, cusum, evaluate_all, Interval, PrefixSums};

/// Series plus an interval `(l, r]` and an interior split `s`.
fn triple() -> impl Strategy<Value = (Vec<f64>, usize, usize, usize)> {
    prop::collection::vec(-100.0f64..100.0, 2..200).prop_flat_map(|x| {
        let n = x.len();
        (Just(x), 0..n - 1).prop_flat_map(move |(x, l)| {
            (Just(x), Just(l), l + 2..=n)
                .prop_flat_map(|(x, l, r)| (Just(x), Just(l), Just(r), l + 1..r))
        })
    })
}

fn rss(x: &[f64]) -> f64 {
    let m = x.iter().sum::<f64>() / x.len() as f64;
    x.iter().map(|v| (v - m) * (v - m)).sum()
}

fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(scale)
}

proptest! {
    #[test]
    fn squared_cusum_is_rss_reduction((x, l, r, s) in triple()) {
        let ps = PrefixSums::new(&x).unwrap();
        let c = cusum(&ps, l, r, s).unwrap();
        let reduction = rss(&x[l..r]) - rss(&x[l..s]) - rss(&x[s..r]);
        let scale = x[l..r].iter().map(|v| v * v).sum::<f64>() * 1e-6;
        prop_assert!(close(c * c, reduction, scale), "{} vs {}", c * c, reduction);
    }

    #[test]
    fn prefix_cusum_matches_direct_sum((x, l, r, s) in triple()) {
        let ps = PrefixSums::new(&x).unwrap();
        let fast = cusum(&ps, l, r, s).unwrap();
        let slow = naive_cusum(&x, l, r, s).unwrap();
        let scale = x[l..r].iter().map(|v| v.abs()).fold(0.0, f64::max) * 1e-4;
        prop_assert!(close(fast, slow, scale), "{} vs {}", fast, slow);
    }

    #[test]
    fn cusum_is_antisymmetric((x, l, r, s) in triple()) {
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let a = cusum(&PrefixSums::new(&x).unwrap(), l, r, s).unwrap();
        let b = cusum(&PrefixSums::new(&neg).unwrap(), l, r, s).unwrap();
        prop_assert_eq!(a, -b);
    }

    #[test]
    fn cusum_is_shift_invariant((x, l, r, s) in triple(), shift in -1e3f64..1e3) {
        let moved: Vec<f64> = x.iter().map(|v| v + shift).collect();
        let a = cusum(&PrefixSums::new(&x).unwrap(), l, r, s).unwrap();
        let b = cusum(&PrefixSums::new(&moved).unwrap(), l, r, s).unwrap();
        // Cancellation in the prefix sums costs about |shift| * T * eps.
        let scale = (shift.abs() + 100.0) * x.len() as f64 * 1e-4;
        prop_assert!(close(a, b, scale), "{} vs {}", a, b);
    }

    #[test]
    fn best_split_finds_a_clean_step(len in 3usize..300, frac in 0.0f64..1.0, jump in 0.1f64..50.0) {
        let step = 1 + ((len - 2) as f64 * frac) as usize;
        let x: Vec<f64> = (0..len).map(|t| if t < step { 0.0 } else { jump }).collect();
        let ps = PrefixSums::new(&x).unwrap();
        let c = best_split(&ps, &Interval::new(0, len, Layer::Random).unwrap());
        prop_assert_eq!(c.split, step);
        let expect = jump * ((step * (len - step)) as f64 / len as f64).sqrt();
        assert_relative_eq!(c.gain, expect, max_relative = 1e-9);
    }

    #[test]
    fn best_split_is_max_over_splits((x, l, r, _s) in triple()) {
        let ps = PrefixSums::new(&x).unwrap();
        let (split, gain) = CusumEvaluator::new(&ps).best_split(l, r);
        let all: Vec<f64> = (l + 1..r).map(|s| cusum(&ps, l, r, s).unwrap().abs()).collect();
        let max = all.iter().copied().fold(0.0, f64::max);
        prop_assert_eq!(gain, max);
        // smallest maximiser
        prop_assert_eq!(split, l + 1 + all.iter().position(|&g| g == max).unwrap());
    }

    #[test]
    fn compensated_sums_agree((x, l, r, s) in triple()) {
        let a = cusum(&PrefixSums::new(&x).unwrap(), l, r, s).unwrap();
        let b = cusum(&PrefixSums::compensated(&x).unwrap(), l, r, s).unwrap();
        prop_assert!(close(a, b, 1e-3));
    }

    #[test]
    fn shifted_form_uses_one_more_left_count((x, l, r, s) in triple()) {
        let ps = PrefixSums::new(&x).unwrap();
        let got = cusum_with(&ps, l, r, s, CusumForm::ShiftedLeftCount).unwrap();
        let (nl, nr, n) = ((s - l + 1) as f64, (r - s) as f64, (r - l) as f64);
        let a: f64 = x[l..s].iter().sum();
        let b: f64 = x[s..r].iter().sum();
        let expect = (nr / (n * nl)).sqrt() * a - (nl / (n * nr)).sqrt() * b;
        prop_assert!(close(got, expect, 1e-3), "{} vs {}", got, expect);
    }
}

#[test]
fn parallel_and_serial_evaluation_agree() {
    let x: Vec<f64> = (0..500).map(|t| ((t * 37) % 11) as f64 - 5.0).collect();
    let ps = PrefixSums::new(&x).unwrap();
    let ivs = seedbs::seeded_intervals(&seedbs::SeededParams::new(500, 0.8, 2).unwrap()).unwrap();
    let par = evaluate_all(&ps, &ivs);
    let ser = seedbs::gain::evaluate_all_with(&CusumEvaluator::new(&ps), &ivs, false);
    assert_eq!(par, ser);
    assert!(par.iter().zip(&ivs).all(|(c, iv)| c.interval == *iv));
}
