use maoea::variation::{offspring, poly_mutate, sbx, VariationParams, VariationStreams};
use maoea::Bounds;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Textbook SBX, consuming the stream in the same order as the library:
/// pair gate, then per variable (u, sign, exchange coin).
fn sbx_oracle<R: Rng>(p1: &[f64], p2: &[f64], eta: f64, p_c: f64, lo: f64, hi: f64, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
    let gate: f64 = rng.random();
    let (mut c1, mut c2) = (p1.to_vec(), p2.to_vec());
    for i in 0..p1.len() {
        let u: f64 = rng.random();
        let negative: bool = rng.random();
        let coin: f64 = rng.random();
        if gate >= p_c || coin >= 0.5 {
            continue;
        }
        let beta = if u <= 0.5 {
            (2.0 * u).powf(1.0 / (eta + 1.0))
        } else {
            (2.0 * (1.0 - u)).powf(-1.0 / (eta + 1.0))
        };
        let b = if negative { -beta } else { beta };
        let sum = p1[i] + p2[i];
        let diff = p1[i] - p2[i];
        c1[i] = (0.5 * (sum + b * diff)).max(lo).min(hi);
        c2[i] = (0.5 * (sum - b * diff)).max(lo).min(hi);
    }
    (c1, c2)
}

/// Bounded polynomial mutation in its usual published form.
fn pm_oracle<R: Rng>(x: &[f64], eta: f64, p_m: f64, lo: f64, hi: f64, rng: &mut R) -> Vec<f64> {
    let mut y = x.to_vec();
    for v in y.iter_mut() {
        let r: f64 = rng.random();
        if r >= p_m {
            continue;
        }
        let mu: f64 = rng.random();
        let delta1 = (*v - lo) / (hi - lo);
        let delta2 = (hi - *v) / (hi - lo);
        let pow = eta + 1.0;
        let deltaq = if mu <= 0.5 {
            let val = 2.0 * mu + (1.0 - 2.0 * mu) * (1.0 - delta1).powf(pow);
            val.powf(1.0 / pow) - 1.0
        } else {
            let val = 2.0 * (1.0 - mu) + 2.0 * (mu - 0.5) * (1.0 - delta2).powf(pow);
            1.0 - val.powf(1.0 / pow)
        };
        *v = (*v + deltaq * (hi - lo)).max(lo).min(hi);
    }
    y
}

#[test]
fn sbx_matches_oracle_bit_for_bit() {
    let params = VariationParams::default();
    let bounds = Bounds::unit(2);
    let mut a = ChaCha8Rng::seed_from_u64(42);
    let mut b = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..10_000 {
        let got = sbx(&[0.2, 0.8], &[0.6, 0.4], &params, &bounds, &mut a);
        let want = sbx_oracle(&[0.2, 0.8], &[0.6, 0.4], 20.0, 1.0, 0.0, 1.0, &mut b);
        assert_eq!(got.0.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), want.0.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
        assert_eq!(got.1.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), want.1.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    }
}

#[test]
fn sbx_respects_pair_gate() {
    let params = VariationParams { p_c: 0.5, eta_c: 5.0, ..Default::default() };
    let bounds = Bounds::unit(4);
    let mut a = ChaCha8Rng::seed_from_u64(7);
    let mut b = ChaCha8Rng::seed_from_u64(7);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..2_000 {
        let p1: Vec<f64> = (0..4).map(|_| rng.random()).collect();
        let p2: Vec<f64> = (0..4).map(|_| rng.random()).collect();
        assert_eq!(sbx(&p1, &p2, &params, &bounds, &mut a), sbx_oracle(&p1, &p2, 5.0, 0.5, 0.0, 1.0, &mut b));
    }
}

#[test]
fn mutation_matches_oracle() {
    let params = VariationParams { p_m: Some(0.5), ..Default::default() };
    let bounds = Bounds::unit(5);
    let mut a = ChaCha8Rng::seed_from_u64(3);
    let mut b = ChaCha8Rng::seed_from_u64(3);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..5_000 {
        let x: Vec<f64> = (0..5).map(|_| rng.random()).collect();
        let got = poly_mutate(&x, &params, &bounds, &mut a);
        let want = pm_oracle(&x, 20.0, 0.5, 0.0, 1.0, &mut b);
        assert_eq!(got.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), want.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    }
}

#[test]
fn sbx_child_mean_is_parent_mean() {
    let params = VariationParams::default();
    let bounds = Bounds::unit(1);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let draws = 100_000;
    let children: Vec<f64> = (0..draws)
        .flat_map(|_| {
            let (c1, c2) = sbx(&[0.3], &[0.7], &params, &bounds, &mut rng);
            [c1[0], c2[0]]
        })
        .collect();
    let k = children.len() as f64;
    let mean = children.iter().sum::<f64>() / k;
    let var = children.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (k - 1.0);
    let se = (var / k).sqrt();
    assert!((mean - 0.5).abs() < 3.0 * se, "mean {mean}, se {se}");
}

#[test]
fn offspring_stay_in_bounds() {
    let bounds = Bounds::new(vec![-1.0, 0.0, 2.0], vec![1.0, 0.5, 3.0]);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let parents: Vec<Vec<f64>> = (0..20)
        .map(|_| (0..3).map(|j| rng.random_range(bounds.lower[j]..=bounds.upper[j])).collect())
        .collect();
    let params = VariationParams { p_m: Some(1.0), eta_c: 1.0, eta_m: 1.0, ..Default::default() };
    let mut streams = VariationStreams {
        mating: ChaCha8Rng::seed_from_u64(1),
        crossover: ChaCha8Rng::seed_from_u64(2),
        mutation: ChaCha8Rng::seed_from_u64(3),
    };
    for _ in 0..50 {
        let kids = offspring(&parents, 21, &params, &bounds, &mut streams);
        assert_eq!(kids.len(), 21);
        assert!(kids.iter().all(|k| bounds.contains(k)));
    }
}
