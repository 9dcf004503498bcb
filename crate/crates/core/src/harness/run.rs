//! Sweep execution with reproducible, worker-count independent seeding.
//!
//! Seeding scheme: sweep point `i` gets `point_seed(base, i)`, a SplitMix64
//! mix of the base seed and the index. The point's network is learned from
//! ChaCha8 stream 0 of that seed and trial `t` draws from stream `t + 1`,
//! so each trial's randomness depends only on `(base, i, t)`.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::spec::{Erasure, ExperimentSpec, RecoveryMode, Task};
use super::stats::binomial_interval;
use crate::blurred::{self, DistortionKind};
use crate::classify;
use crate::error::{Error, Result};
use crate::message::{random_message, OrderProfile, SparseMessage};
use crate::network::CliqueNetwork;
use crate::retrieval::{self, is_success};
use crate::theory::{self, Form};

/// One point of one curve.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvePoint {
    /// Message count, density (classification) or order (diversity).
    pub x: f64,
    /// Iteration budget of the series this point belongs to.
    pub iterations: usize,
    pub sim_rate: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub theory: Option<f64>,
    pub trials: u64,
    pub errors: u64,
    pub seed: u64,
    pub wall_time: Duration,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn point_seed(base: u64, index: u64) -> u64 {
    splitmix64(base ^ splitmix64(index))
}

fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Learns `m` messages drawn per the experiment settings.
pub fn learn_random<R: Rng + ?Sized>(
    spec: &ExperimentSpec,
    m: usize,
    rng: &mut R,
) -> Result<(CliqueNetwork, Vec<SparseMessage>)> {
    let mut net = CliqueNetwork::new(spec.topology);
    let mut messages = Vec::with_capacity(m);
    for _ in 0..m {
        let c = spec.profile.sample(rng);
        let msg = random_message(&spec.topology, c, spec.placement, rng)?;
        net.learn(&msg)?;
        messages.push(msg);
    }
    Ok((net, messages))
}

/// Outcome of one trial: `None` when excluded, otherwise a bit per
/// iteration series set on error.
type TrialFn<'a> = dyn Fn(u64) -> Result<Option<u64>> + Sync + 'a;

struct Tally {
    trials: u64,
    errors: Vec<u64>,
}

fn run_trials(spec: &ExperimentSpec, series: usize, trial: &TrialFn<'_>) -> Result<Tally> {
    let mut tally = Tally {
        trials: 0,
        errors: vec![0; series],
    };
    let mut next = 0u64;
    loop {
        let batch = spec.trials.min(spec.max_trials - next);
        let (counted, errors) = (next..next + batch)
            .into_par_iter()
            .map(trial)
            .try_fold(
                || (0u64, vec![0u64; series]),
                |(mut n, mut e), r| {
                    if let Some(mask) = r? {
                        n += 1;
                        for (s, slot) in e.iter_mut().enumerate() {
                            *slot += mask >> s & 1;
                        }
                    }
                    Ok::<_, Error>((n, e))
                },
            )
            .try_reduce(
                || (0u64, vec![0u64; series]),
                |(n1, mut e1), (n2, e2)| {
                    for (a, b) in e1.iter_mut().zip(e2) {
                        *a += b;
                    }
                    Ok((n1 + n2, e1))
                },
            )?;
        tally.trials += counted;
        for (a, b) in tally.errors.iter_mut().zip(errors) {
            *a += b;
        }
        next += batch;
        let enough = tally.errors.iter().all(|&e| e >= spec.min_errors);
        if next >= spec.max_trials || enough || batch == 0 {
            return Ok(tally);
        }
    }
}

fn mean_over_orders(profile: &OrderProfile, f: impl Fn(usize) -> f64) -> f64 {
    profile.orders().map(f).sum::<f64>() / profile.lambda() as f64
}

fn recovery_theory(spec: &ExperimentSpec, d: f64) -> f64 {
    let (chi, l) = (spec.topology.chi(), spec.topology.l());
    match (spec.mode, spec.profile, spec.erasure) {
        (RecoveryMode::Blind, OrderProfile::UniformRange { min, max }, Erasure::Fraction(a)) => {
            theory::p_error_variable(chi, l, min, max, a, d)
        }
        (RecoveryMode::Blind, p, e) => mean_over_orders(&p, |c| {
            theory::p_error_blind(chi, l, c, e.for_order(c), d, Form::Exact)
        }),
        (RecoveryMode::Guided, p, e) => {
            mean_over_orders(&p, |c| theory::p_error_guided(l, c, e.for_order(c), d))
        }
    }
}

fn rate_points(
    spec: &ExperimentSpec,
    x: f64,
    theory: Option<f64>,
    tally: &Tally,
    seed: u64,
    wall: Duration,
) -> Vec<CurvePoint> {
    spec.iterations
        .iter()
        .zip(&tally.errors)
        .map(|(&iterations, &errors)| {
            let (sim, lo, hi) = if tally.trials == 0 {
                (None, None, None)
            } else {
                let (lo, hi) = binomial_interval(errors, tally.trials);
                (
                    Some(errors as f64 / tally.trials as f64),
                    Some(lo),
                    Some(hi),
                )
            };
            CurvePoint {
                x,
                iterations,
                sim_rate: sim,
                ci_low: lo,
                ci_high: hi,
                theory,
                trials: tally.trials,
                errors,
                seed,
                wall_time: wall,
            }
        })
        .collect()
}

fn error_mask(spec: &ExperimentSpec, mut fails: impl FnMut(usize) -> Result<bool>) -> Result<u64> {
    let mut mask = 0;
    for (s, &k) in spec.iterations.iter().enumerate() {
        if fails(k)? {
            mask |= 1 << s;
        }
    }
    Ok(mask)
}

fn run_point(spec: &ExperimentSpec, x: f64, seed: u64) -> Result<Vec<CurvePoint>> {
    let start = Instant::now();
    let (chi, l) = (spec.topology.chi(), spec.topology.l());
    let m = x as usize;

    match spec.task {
        Task::Diversity => {
            let alpha = match spec.erasure {
                Erasure::Fraction(a) => a,
                Erasure::Count(_) => unreachable!("validated"),
            };
            let theory = theory::diversity_vs_order(chi, l, alpha, spec.p0, x as usize);
            Ok(vec![CurvePoint {
                x,
                iterations: spec.iterations[0],
                sim_rate: None,
                ci_low: None,
                ci_high: None,
                theory: Some(theory),
                trials: 0,
                errors: 0,
                seed,
                wall_time: start.elapsed(),
            }])
        }
        Task::Density => {
            let (net, _) = learn_random(spec, m, &mut stream(seed, 0))?;
            let q = spec.topology.q_bits();
            let (lo, hi) = binomial_interval(net.edge_count(), q);
            Ok(vec![CurvePoint {
                x,
                iterations: spec.iterations[0],
                sim_rate: Some(net.density()),
                ci_low: Some(lo),
                ci_high: Some(hi),
                theory: Some(theory::expected_density_profile(chi, l, &spec.profile, x)),
                trials: q,
                errors: net.edge_count(),
                seed,
                wall_time: start.elapsed(),
            }])
        }
        Task::Classify => {
            let (net, messages) = learn_random(spec, m, &mut stream(seed, 0))?;
            let learned: HashSet<&SparseMessage> = messages.iter().collect();
            let trial = |t: u64| -> Result<Option<u64>> {
                let mut rng = stream(seed, t + 1);
                let c = spec.profile.sample(&mut rng);
                let probe = random_message(&spec.topology, c, spec.placement, &mut rng)?;
                if learned.contains(&probe) {
                    return Ok(None);
                }
                let accepted = classify::accept(&net, &probe)?;
                Ok(Some(if accepted { u64::MAX } else { 0 }))
            };
            let tally = run_trials(spec, spec.iterations.len(), &trial)?;
            let d = net.density();
            let th = mean_over_orders(&spec.profile, |c| theory::p_type2(c, d));
            Ok(rate_points(
                spec,
                d,
                Some(th),
                &tally,
                seed,
                start.elapsed(),
            ))
        }
        Task::Recover | Task::Distorted => {
            let shared = if spec.fresh_network {
                None
            } else {
                Some(learn_random(spec, m, &mut stream(seed, 0))?)
            };
            let trial = |t: u64| -> Result<Option<u64>> {
                let mut rng = stream(seed, t + 1);
                let fresh;
                let (net, messages) = match &shared {
                    Some((n, ms)) => (n, ms),
                    None => {
                        fresh = learn_random(spec, m, &mut rng)?;
                        (&fresh.0, &fresh.1)
                    }
                };
                let truth = &messages[rng.gen_range(0..messages.len())];
                let mask = if spec.task == Task::Recover {
                    let c = truth.order();
                    let clusters: Vec<usize> = truth.clusters().collect();
                    let erased: Vec<usize> = index::sample(&mut rng, c, spec.erasure.for_order(c))
                        .into_iter()
                        .map(|i| clusters[i])
                        .collect();
                    let cue = truth.without_clusters(&erased);
                    error_mask(spec, |k| {
                        let out = match spec.mode {
                            RecoveryMode::Blind => retrieval::blind_recover(net, &cue, k)?,
                            RecoveryMode::Guided => {
                                retrieval::guided_recover(net, &cue, &clusters, k)?
                            }
                        };
                        Ok(!is_success(&out, truth))
                    })?
                } else {
                    let distorted = match spec.distortion {
                        DistortionKind::PairwisePermuted => blurred::permute_pairwise(truth)?,
                        DistortionKind::Anagram => blurred::scramble(truth, &mut rng)?,
                    };
                    error_mask(spec, |k| {
                        let out = blurred::decode_distorted(net, &distorted, spec.distortion, k)?;
                        Ok(!is_success(&out, truth))
                    })?
                };
                Ok(Some(mask))
            };
            let tally = run_trials(spec, spec.iterations.len(), &trial)?;
            let th = if spec.task == Task::Recover {
                recovery_theory(
                    spec,
                    theory::expected_density_profile(chi, l, &spec.profile, x),
                )
            } else {
                theory::p_error_distorted_contiguous(chi, l, &spec.profile, spec.distortion, x)
            };
            Ok(rate_points(
                spec,
                x,
                Some(th),
                &tally,
                seed,
                start.elapsed(),
            ))
        }
    }
}

/// Runs every sweep point, handing each finished point to `on_point` as it
/// completes, and returns all points in sweep order.
pub fn run_experiment(
    spec: &ExperimentSpec,
    options: RunOptions,
    mut on_point: impl FnMut(&CurvePoint),
) -> Result<Vec<CurvePoint>> {
    spec.validate()?;
    let pool = match options.workers {
        Some(n) => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Infeasible(format!("thread pool: {e}")))?,
        ),
        None => None,
    };
    let mut all = Vec::new();
    for (i, &x) in spec.sweep.iter().enumerate() {
        let seed = point_seed(spec.seed, i as u64);
        let points = match &pool {
            Some(p) => p.install(|| run_point(spec, x, seed))?,
            None => run_point(spec, x, seed)?,
        };
        for p in &points {
            on_point(p);
        }
        all.extend(points);
    }
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::message::Placement;
    use crate::topology::Topology;

    fn small_spec(task: Task) -> ExperimentSpec {
        let mut s = ExperimentSpec::new(
            task,
            Topology::new(20, 8).unwrap(),
            OrderProfile::constant(5),
        );
        s.erasure = Erasure::Count(2);
        s.iterations = vec![1, 3];
        s.sweep = vec![200.0, 600.0];
        s.trials = 300;
        s.max_trials = 900;
        s.min_errors = 20;
        s
    }

    #[test]
    fn seeds_differ_per_point() {
        assert_ne!(point_seed(1, 0), point_seed(1, 1));
        assert_ne!(point_seed(1, 0), point_seed(2, 0));
        assert_eq!(point_seed(5, 3), point_seed(5, 3));
    }

    #[test]
    fn worker_count_does_not_change_counts() {
        for task in [Task::Recover, Task::Classify] {
            let spec = small_spec(task);
            let serial = run_experiment(&spec, RunOptions { workers: Some(1) }, |_| {}).unwrap();
            let parallel = run_experiment(&spec, RunOptions { workers: Some(4) }, |_| {}).unwrap();
            let key = |v: &[CurvePoint]| {
                v.iter()
                    .map(|p| (p.trials, p.errors, p.seed))
                    .collect::<Vec<_>>()
            };
            assert_eq!(key(&serial), key(&parallel));
        }
    }

    #[test]
    fn streams_every_point() {
        let spec = small_spec(Task::Recover);
        let mut seen = 0;
        let pts = run_experiment(&spec, RunOptions::default(), |_| seen += 1).unwrap();
        assert_eq!(seen, pts.len());
        assert_eq!(pts.len(), 4);
        assert!(pts.iter().all(|p| p.trials >= 300 && p.theory.is_some()));
    }

    #[test]
    fn distorted_and_density_tasks() {
        let mut spec = small_spec(Task::Distorted);
        spec.placement = Placement::Contiguous;
        let pts = run_experiment(&spec, RunOptions::default(), |_| {}).unwrap();
        assert_eq!(pts.len(), 4);
        let spec = small_spec(Task::Density);
        let pts = run_experiment(&spec, RunOptions::default(), |_| {}).unwrap();
        assert_eq!(pts.len(), 2);
        assert!(pts[0].sim_rate.unwrap() < pts[1].sim_rate.unwrap());
    }

    #[test]
    fn fresh_network_mode_runs() {
        let mut spec = small_spec(Task::Recover);
        spec.fresh_network = true;
        spec.sweep = vec![100.0];
        spec.trials = 20;
        spec.max_trials = 20;
        let pts = run_experiment(&spec, RunOptions::default(), |_| {}).unwrap();
        assert_eq!(pts[0].trials, 20);
    }

    #[test]
    fn zero_trials_rejected() {
        let mut spec = small_spec(Task::Recover);
        spec.trials = 0;
        assert!(matches!(
            run_experiment(&spec, RunOptions::default(), |_| {}),
            Err(Error::Infeasible(_))
        ));
    }
}
