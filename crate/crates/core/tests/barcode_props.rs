use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torus_squeeze::barcode::{
    barcodes_equal, bottleneck_brute_force, bottleneck_distance, bottleneck_matching, endpoints_multiset, Bar,
    Barcode, Distance,
};
use torus_squeeze::Rat;

/// Bars with endpoints on the grid `k/4` in `[0, 10]`.
fn random_barcode(rng: &mut ChaCha8Rng, max_bars: usize, infinite: bool) -> Barcode {
    let n = rng.gen_range(0..=max_bars);
    let bars = (0..n)
        .map(|_| {
            let b = rng.gen_range(0..40);
            if infinite && rng.gen_bool(0.15) {
                Bar::infinite(Rat::frac(b, 4))
            } else {
                let d = rng.gen_range(b + 1..=40);
                Bar::finite(Rat::frac(b, 4), Rat::frac(d, 4)).unwrap()
            }
        })
        .collect();
    Barcode::new(bars)
}

fn fin(d: Distance) -> Rat {
    d.finite().cloned().expect("finite distance")
}

#[test]
fn oracle_agreement() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let total = rng.gen_range(0..=8);
        let k = rng.gen_range(0..=total);
        let a = random_barcode(&mut rng, k, true);
        let b = random_barcode(&mut rng, total - k, true);
        assert_eq!(bottleneck_brute_force(&a, &b), bottleneck_matching(&a, &b), "{a:?} {b:?}");
        assert_eq!(bottleneck_distance(&a, &b), bottleneck_matching(&a, &b));
    }
}

#[test]
fn pseudometric() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..1000 {
        let a = random_barcode(&mut rng, 6, false);
        let b = random_barcode(&mut rng, 6, false);
        let c = random_barcode(&mut rng, 6, false);
        let ab = fin(bottleneck_distance(&a, &b));
        assert_eq!(ab, fin(bottleneck_distance(&b, &a)));
        assert_eq!(fin(bottleneck_distance(&a, &a)), Rat::zero());
        let ac = fin(bottleneck_distance(&a, &c));
        let cb = fin(bottleneck_distance(&c, &b));
        assert!(ab <= ac + cb);
    }
}

#[test]
fn large_barcodes_use_the_matcher_consistently() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..50 {
        let a = random_barcode(&mut rng, 14, true);
        let b = random_barcode(&mut rng, 14, true);
        let d = bottleneck_distance(&a, &b);
        assert_eq!(d, bottleneck_matching(&a, &b));
        assert_eq!(d, bottleneck_distance(&b, &a));
    }
}

#[test]
fn zero_distance_rigidity() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..300 {
        let a = random_barcode(&mut rng, 6, true);
        // Shuffled copy: distance zero, equal, same endpoints.
        let mut bars = a.bars.clone();
        bars.reverse();
        let b = Barcode::new(bars);
        assert_eq!(bottleneck_distance(&a, &b), Distance::Finite(Rat::zero()));
        assert!(barcodes_equal(&a, &b));
        assert_eq!(endpoints_multiset(&a), endpoints_multiset(&b));
        // Perturbing one finite endpoint makes the distance positive.
        if let Some(i) = a.bars.iter().position(|x| !x.is_infinite()) {
            let mut bars = a.bars.clone();
            let old = bars[i].clone();
            bars[i] = Bar::new(old.birth() - Rat::frac(1, 8), old.death().clone()).unwrap();
            let c = Barcode::new(bars);
            assert!(fin(bottleneck_distance(&a, &c)) > Rat::zero());
            assert!(!barcodes_equal(&a, &c));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn deletion_moves_distance_by_at_most_half_length(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_barcode(&mut rng, 6, false);
        let b = random_barcode(&mut rng, 6, false);
        prop_assume!(!a.is_empty());
        let i = rng.gen_range(0..a.len());
        let h = a.bars[i].half_length().unwrap();
        let mut smaller = a.clone();
        smaller.bars.remove(i);
        let d1 = fin(bottleneck_distance(&a, &b));
        let d2 = fin(bottleneck_distance(&smaller, &b));
        prop_assert!((d1 - d2).abs() <= h);
    }
}
