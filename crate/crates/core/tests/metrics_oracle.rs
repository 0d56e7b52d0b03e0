//! Evaluator equivalence against the definitional brute-force oracle on
//! random micro sequences.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use shoaltrack_core::metrics::evaluate;
use shoaltrack_testutil::fixtures::random_micro_pair;
use shoaltrack_testutil::hota_oracle::evaluate_brute_force;

#[test]
fn evaluate_matches_brute_force_on_micro_sequences() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..60 {
        let (gt, pred) = random_micro_pair(&mut rng, 3, 8);
        let got = evaluate(&gt, &pred).expect("evaluate");
        let want = evaluate_brute_force(&gt, &pred);
        let ctx = || format!("case {case}\ngt: {gt:?}\npred: {pred:?}");
        assert_eq!(got.id_switches, want.id_switches, "IDs differ: {}", ctx());
        assert_eq!(got.false_negatives, want.false_negatives, "FN differ: {}", ctx());
        assert_eq!(got.false_positives, want.false_positives, "FP differ: {}", ctx());
        for (a, b) in got.per_alpha.iter().zip(&want.per_alpha) {
            assert_eq!(a.alpha, b.alpha);
            for (x, y, name) in [
                (a.hota, b.hota, "hota"),
                (a.deta, b.deta, "deta"),
                (a.assa, b.assa, "assa"),
                (a.loca, b.loca, "loca"),
            ] {
                assert!((x - y).abs() <= 1e-12, "{name} at alpha {}: {x} vs {y}; {}", a.alpha, ctx());
            }
        }
        for (x, y, name) in [
            (got.hota, want.hota, "hota"),
            (got.deta, want.deta, "deta"),
            (got.assa, want.assa, "assa"),
            (got.loca, want.loca, "loca"),
        ] {
            assert!((x - y).abs() <= 1e-12, "{name}: {x} vs {y}; {}", ctx());
        }
    }
}
