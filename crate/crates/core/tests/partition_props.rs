use dscluster::bench::{gen_exhaustive, gen_random};
use dscluster::partition::lowest_element_assignment;
use dscluster::rng::rng_from_seed;
use dscluster::{
    brute_force_min_mcf, evaluate_transfer, log_sum_objective, make_evidence, metaconflict, FocalSet,
    Partition, SimpleEvidence,
};
use proptest::prelude::*;

fn instance(max_len: usize, frame: u32) -> impl Strategy<Value = Vec<SimpleEvidence>> {
    let full = (1u32 << frame) - 1;
    prop::collection::vec((1..=full, 0.01f64..0.99), 1..=max_len).prop_map(|items| {
        items
            .into_iter()
            .enumerate()
            .map(|(id, (bits, mass))| make_evidence(FocalSet::from_bits(bits as u16), mass, id).unwrap())
            .collect()
    })
}

fn with_assignment(max_len: usize, frame: u32, r: usize) -> impl Strategy<Value = (Vec<SimpleEvidence>, Vec<usize>)> {
    instance(max_len, frame).prop_flat_map(move |e| {
        let n = e.len();
        (Just(e), prop::collection::vec(0..r, n))
    })
}

// every assignment of n items to r clusters, in odometer order
fn all_assignments(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut a = vec![0; n];
    loop {
        out.push(a.clone());
        let mut i = 0;
        while i < n && a[i] == r - 1 {
            a[i] = 0;
            i += 1;
        }
        if i == n {
            return out;
        }
        a[i] += 1;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cache_survives_any_transfer_sequence(
        (e, a) in with_assignment(9, 5, 3),
        moves in prop::collection::vec((any::<prop::sample::Index>(), 0usize..3), 0..20),
    ) {
        let mut p = Partition::new(&e, a, 3).unwrap();
        for (q, k) in moves {
            let q = q.index(e.len());
            if p.cluster_of(q) == k {
                continue;
            }
            let d = evaluate_transfer(&p, &e, q, k).unwrap();
            p.apply(&d);
            prop_assert!(p.cache_error(&e) <= 1e-12);
            prop_assert!((metaconflict(&p) - d.new_mcf).abs() <= 1e-12);
        }
    }

    #[test]
    fn favorable_flag_agrees_with_ratio_test((e, a) in with_assignment(8, 4, 3)) {
        let p = Partition::new(&e, a, 3).unwrap();
        for q in 0..e.len() {
            for k in (0..3).filter(|&k| k != p.cluster_of(q)) {
                let d = evaluate_transfer(&p, &e, q, k).unwrap();
                prop_assert_eq!(d.favorable, d.favorable_by_ratio(&p), "q={} k={}", q, k);
            }
        }
    }
}

#[test]
fn log_sum_and_metaconflict_share_the_argmin() {
    let mut rng = rng_from_seed(41);
    for trial in 0..30 {
        let frame = 3 + trial % 3;
        let n = 4 + trial % 4;
        let e = gen_random(frame, n, &mut rng).unwrap();
        let mut best_mcf = (f64::INFINITY, Vec::new());
        let mut best_log = (f64::INFINITY, Vec::new());
        for a in all_assignments(n, 3) {
            let p = Partition::new(&e, a.clone(), 3).unwrap();
            let (m, l) = (metaconflict(&p), log_sum_objective(&p).unwrap());
            if m < best_mcf.0 {
                best_mcf = (m, a.clone());
            }
            if l < best_log.0 {
                best_log = (l, a);
            }
        }
        // same optimal value under either objective, and each argmin is optimal for the other
        let p = Partition::new(&e, best_log.1.clone(), 3).unwrap();
        assert!((metaconflict(&p) - best_mcf.0).abs() <= 1e-12, "trial {trial}");
        let p = Partition::new(&e, best_mcf.1.clone(), 3).unwrap();
        assert!((log_sum_objective(&p).unwrap() - best_log.0).abs() <= 1e-12, "trial {trial}");
    }
}

#[test]
fn lowest_element_partition_is_conflict_free() {
    let mut rng = rng_from_seed(5);
    for r in 2..=7 {
        let e = gen_exhaustive(r, &mut rng).unwrap();
        assert_eq!(e.len(), (1 << r) - 1);
        let p = Partition::new(&e, lowest_element_assignment(&e, r), r).unwrap();
        assert_eq!(metaconflict(&p), 0.0);
    }
    for m in [50, 60, 70] {
        let e = gen_random(6, m, &mut rng).unwrap();
        let p = Partition::new(&e, lowest_element_assignment(&e, 6), 6).unwrap();
        assert_eq!(metaconflict(&p), 0.0);
    }
}

#[test]
fn brute_force_small_cases() {
    let ev = |b: u16, m: f64, id| make_evidence(FocalSet::from_bits(b), m, id).unwrap();
    let (_, v) = brute_force_min_mcf(&[ev(1, 0.7, 0)], 2).unwrap();
    assert_eq!(v, 0.0);
    let e = [ev(1, 0.5, 0), ev(2, 0.5, 1), ev(4, 0.5, 2)];
    let (p, v) = brute_force_min_mcf(&e, 2).unwrap();
    assert!((v - 0.25).abs() <= 1e-12);
    assert!((metaconflict(&p) - v).abs() <= 1e-12);

    let e = gen_exhaustive(3, &mut rng_from_seed(9)).unwrap();
    let (_, v) = brute_force_min_mcf(&e, 3).unwrap();
    assert_eq!(v, 0.0);
}
