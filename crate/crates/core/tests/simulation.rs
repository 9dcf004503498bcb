//! Monte Carlo runs checked against closed forms.

use neural_cliques::blurred::{self, DistortionKind};
use neural_cliques::harness::{
    run_experiment, Erasure, ExperimentSpec, RecoveryMode, RunOptions, Task,
};
use neural_cliques::message::random_message;
use neural_cliques::retrieval::{is_success, RetrievalConfig};
use neural_cliques::theory;
use neural_cliques::{CliqueNetwork, OrderProfile, Placement, Topology};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn density_tracks_the_law_for_several_orders() {
    let t = Topology::new(100, 64).unwrap();
    for c in [8, 12, 16, 20] {
        let mut spec = ExperimentSpec::new(Task::Density, t, OrderProfile::constant(c));
        spec.sweep = vec![10_000.0, 100_000.0, 400_000.0];
        spec.seed = 40 + c as u64;
        for p in run_experiment(&spec, RunOptions::default(), |_| {}).unwrap() {
            let th = p.theory.unwrap();
            let se = (th * (1.0 - th) / t.q_bits() as f64).sqrt();
            let z = (p.sim_rate.unwrap() - th) / se;
            assert!(
                z.abs() <= 3.0,
                "c={c} M={} measured {} predicted {th} ({z} se)",
                p.x,
                p.sim_rate.unwrap()
            );
        }
    }
}

/// The closed forms treat every edge as an independent coin of bias `d`.
/// Averaging over each competitor's Poisson message count accounts for
/// the extra spread, and the simulation should sit on that curve.
#[test]
fn recovery_matches_load_aware_prediction() {
    let t = Topology::new(100, 64).unwrap();
    for (mode, sweep) in [
        (RecoveryMode::Blind, vec![80_000.0, 100_000.0, 120_000.0]),
        (RecoveryMode::Guided, vec![125_000.0, 160_000.0, 200_000.0]),
    ] {
        let mut spec = ExperimentSpec::new(Task::Recover, t, OrderProfile::constant(12));
        spec.mode = mode;
        spec.erasure = Erasure::Count(3);
        spec.sweep = sweep;
        spec.trials = 20_000;
        spec.max_trials = 20_000;
        spec.min_errors = 0;
        spec.seed = 31;
        let k = match mode {
            RecoveryMode::Blind => theory::blind_competitors(100, 64, 12, 3),
            RecoveryMode::Guided => 3.0 * 63.0,
        };
        for p in run_experiment(&spec, RunOptions::default(), |_| {}).unwrap() {
            let th = theory::p_error_loaded(100, 64, 12, 3, k, p.x);
            let se = (th * (1.0 - th) / p.trials as f64).sqrt();
            let z = (p.sim_rate.unwrap() - th) / se;
            assert!(
                z.abs() <= 3.0,
                "{mode:?} M={} sim {} load-aware {th} ({z} se)",
                p.x,
                p.sim_rate.unwrap()
            );
            // the uniform-density form sits below the load-aware one
            assert!(p.theory.unwrap() <= th);
        }
    }
}

/// With contiguous placement a cluster outside the span is at least `c`
/// away from one span cluster, so no message ever links them and outside
/// fanals never reach the top score. Restricting decoding to the span
/// changes nothing.
#[test]
fn outside_clusters_never_compete_with_contiguous_storage() {
    let t = Topology::new(100, 64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let mut net = CliqueNetwork::new(t);
    let stored: Vec<_> = (0..40_000)
        .map(|_| random_message(&t, 12, Placement::Contiguous, &mut rng).unwrap())
        .collect();
    net.learn_all(&stored).unwrap();
    let kind = DistortionKind::PairwisePermuted;
    let mut errors = 0;
    for _ in 0..300 {
        let truth = &stored[rng.gen_range(0..stored.len())];
        let d = blurred::permute_pairwise(truth).unwrap();
        let open = blurred::decode_distorted(&net, &d, kind, 6).unwrap();
        let span: Vec<usize> = d.clusters().collect();
        let cfg = RetrievalConfig::guided(100, &span, 6).unwrap();
        assert_eq!(
            open,
            blurred::decode_distorted_with(&net, &d, kind, &cfg).unwrap()
        );
        errors += !is_success(&open, truth) as usize;
    }
    assert!(errors > 0 && errors < 60, "{errors}");
}

#[test]
fn nearby_clusters_fill_faster_under_contiguous_placement() {
    let t = Topology::new(100, 64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(62);
    let mut net = CliqueNetwork::new(t);
    for _ in 0..30_000 {
        net.learn(&random_message(&t, 12, Placement::Contiguous, &mut rng).unwrap())
            .unwrap();
    }
    let profile = OrderProfile::constant(12);
    let mean_pair: f64 = {
        let mut sum = 0.0;
        let mut n = 0;
        for a in 0..100 {
            for b in a + 1..(a + 12).min(100) {
                sum += theory::contiguous_pair_density(100, 64, &profile, a, b, 30_000.0);
                n += 1;
            }
        }
        sum / n as f64
    };
    let measured = net.span_density(12);
    assert!(
        (measured / mean_pair - 1.0).abs() < 0.01,
        "{measured} vs {mean_pair}"
    );
    assert!(measured > 4.0 * net.density());
}
