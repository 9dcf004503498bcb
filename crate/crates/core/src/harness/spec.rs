//! Experiment descriptions and the flat `key = value` spec file format.
//!
//! ```text
//! # blind recovery, one iteration
//! figure     = fig3
//! chi        = 100
//! l          = 64
//! order      = 12          # or a uniform range: 12..20
//! placement  = uniform     # uniform | contiguous
//! erased     = 3           # or: alpha = 0.25
//! mode       = blind       # blind | guided
//! iterations = 1, 4
//! sweep      = 40000, 60000, 80000
//! trials     = 2000
//! min_errors = 50
//! max_trials = 50000
//! seed       = 1
//! ```

use std::fmt;
use std::str::FromStr;

use crate::blurred::DistortionKind;
use crate::error::{Error, Result};
use crate::message::{OrderProfile, Placement};
use crate::topology::Topology;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FigureId {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Custom,
}

impl FigureId {
    pub fn default_task(&self) -> Option<Task> {
        Some(match self {
            FigureId::Fig2 => Task::Density,
            FigureId::Fig3 | FigureId::Fig7 => Task::Recover,
            FigureId::Fig4 => Task::Diversity,
            FigureId::Fig5 => Task::Classify,
            FigureId::Fig6 => Task::Distorted,
            FigureId::Custom => return None,
        })
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "fig2" => FigureId::Fig2,
            "fig3" => FigureId::Fig3,
            "fig4" => FigureId::Fig4,
            "fig5" => FigureId::Fig5,
            "fig6" => FigureId::Fig6,
            "fig7" => FigureId::Fig7,
            "custom" => FigureId::Custom,
            _ => return Err(Error::Message(format!("unknown figure {s:?}"))),
        })
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
            FigureId::Fig7 => "fig7",
            FigureId::Custom => "custom",
        };
        f.write_str(s)
    }
}

/// What is measured at each sweep point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Task {
    /// Measured density against the expected density.
    Density,
    /// Recovery of erased messages.
    Recover,
    /// Closed-form diversity against message order; no simulation.
    Diversity,
    /// Acceptance rate of random never-learned probes.
    Classify,
    /// Decoding of distorted messages.
    Distorted,
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "density" => Task::Density,
            "recover" => Task::Recover,
            "diversity" => Task::Diversity,
            "classify" => Task::Classify,
            "distorted" => Task::Distorted,
            _ => return Err(Error::Message(format!("unknown task {s:?}"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Erasure {
    Count(usize),
    /// Fraction of each message's order, rounded per trial.
    Fraction(f64),
}

impl Erasure {
    pub fn for_order(&self, c: usize) -> usize {
        match *self {
            Erasure::Count(k) => k,
            Erasure::Fraction(a) => crate::theory::erased_for(c, a),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecoveryMode {
    Blind,
    Guided,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub label: String,
    pub figure: FigureId,
    pub task: Task,
    pub topology: Topology,
    pub profile: OrderProfile,
    pub placement: Placement,
    pub erasure: Erasure,
    pub mode: RecoveryMode,
    pub distortion: DistortionKind,
    pub iterations: Vec<usize>,
    /// Message counts, or orders for [`Task::Diversity`].
    pub sweep: Vec<f64>,
    pub trials: u64,
    /// Keep adding batches of `trials` until every series has this many
    /// errors or `max_trials` is reached.
    pub min_errors: u64,
    pub max_trials: u64,
    pub seed: u64,
    /// Target error rate for [`Task::Diversity`].
    pub p0: f64,
    /// Learn a new network for every trial instead of one per point.
    pub fresh_network: bool,
}

impl ExperimentSpec {
    pub fn new(task: Task, topology: Topology, profile: OrderProfile) -> Self {
        ExperimentSpec {
            label: "custom".into(),
            figure: FigureId::Custom,
            task,
            topology,
            profile,
            placement: Placement::UniformClusters,
            erasure: Erasure::Count(0),
            mode: RecoveryMode::Blind,
            distortion: DistortionKind::PairwisePermuted,
            iterations: vec![1],
            sweep: Vec::new(),
            trials: 1000,
            min_errors: 0,
            max_trials: 1000,
            seed: 1,
            p0: 1e-2,
            fresh_network: false,
        }
    }

    /// Rejects specs that cannot run, before any work is done.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Infeasible(m));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.max_trials < self.trials {
            return bad("max_trials must be >= trials".into());
        }
        if self.sweep.is_empty() {
            return bad("sweep is empty".into());
        }
        if self.iterations.is_empty() || self.iterations.contains(&0) {
            return bad("iterations must list counts >= 1".into());
        }
        if self.iterations.len() > 64 {
            return bad("at most 64 iteration counts".into());
        }
        let chi = self.topology.chi();
        if self.task == Task::Diversity {
            if !(self.p0 > 0.0 && self.p0 < 1.0) {
                return bad(format!("p0 = {} outside (0, 1)", self.p0));
            }
            match self.erasure {
                Erasure::Fraction(a) if (0.0..1.0).contains(&a) => {}
                _ => return bad("diversity needs alpha in [0, 1)".into()),
            }
            if self.sweep.iter().any(|&c| c < 1.0 || c.fract() != 0.0) {
                return bad("diversity sweep must list integer orders".into());
            }
            return Ok(());
        }
        self.profile
            .validate(chi)
            .map_err(|e| Error::Infeasible(e.to_string()))?;
        if self.sweep.iter().any(|&m| m < 0.0 || m.fract() != 0.0) {
            return bad("sweep must list non-negative integer message counts".into());
        }
        if self.task == Task::Recover {
            if let Erasure::Fraction(a) = self.erasure {
                if !(0.0..1.0).contains(&a) {
                    return bad(format!("alpha = {a} outside [0, 1)"));
                }
            }
            for c in self.profile.orders() {
                let ce = self.erasure.for_order(c);
                if ce >= c {
                    return bad(format!("c_e = {ce} must be < c = {c}"));
                }
            }
        }
        if matches!(self.task, Task::Recover | Task::Distorted | Task::Classify)
            && self.sweep.contains(&0.0)
        {
            return bad("trials need at least one learned message".into());
        }
        if self.task == Task::Distorted && self.placement != Placement::Contiguous {
            return bad("distorted decoding needs contiguous placement".into());
        }
        Ok(())
    }

    /// Parses the flat key-value format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut kv: Vec<(usize, String, String)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: format!("expected key = value, got {line:?}"),
            })?;
            kv.push((i + 1, k.trim().to_string(), v.trim().to_string()));
        }
        let get = |key: &str| kv.iter().find(|(_, k, _)| k == key);
        let perr = |line: usize, msg: String| Error::Parse { line, msg };

        let figure: FigureId = match get("figure") {
            Some((ln, _, v)) => v.parse().map_err(|e: Error| perr(*ln, e.to_string()))?,
            None => FigureId::Custom,
        };
        let task = match get("task") {
            Some((ln, _, v)) => v.parse().map_err(|e: Error| perr(*ln, e.to_string()))?,
            None => figure
                .default_task()
                .ok_or_else(|| perr(0, "custom spec needs a task".into()))?,
        };
        let int = |key: &str| -> Result<Option<u64>> {
            get(key)
                .map(|(ln, _, v)| {
                    parse_number(v)
                        .filter(|x| x.fract() == 0.0 && *x >= 0.0)
                        .map(|x| x as u64)
                        .ok_or_else(|| perr(*ln, format!("{key}: expected an integer, got {v:?}")))
                })
                .transpose()
        };
        let real = |key: &str| -> Result<Option<f64>> {
            get(key)
                .map(|(ln, _, v)| {
                    parse_number(v).ok_or_else(|| perr(*ln, format!("{key}: bad number {v:?}")))
                })
                .transpose()
        };
        let list = |key: &str| -> Result<Option<Vec<f64>>> {
            get(key)
                .map(|(ln, _, v)| parse_list(v).map_err(|m| perr(*ln, format!("{key}: {m}"))))
                .transpose()
        };

        let chi = int("chi")?.ok_or_else(|| perr(0, "missing chi".into()))? as usize;
        let l = int("l")?.ok_or_else(|| perr(0, "missing l".into()))? as usize;
        let topology = Topology::new(chi, l)?;
        let profile = match get("order") {
            Some((ln, _, v)) => v.parse().map_err(|e: Error| perr(*ln, e.to_string()))?,
            None if task == Task::Diversity => OrderProfile::Constant(2),
            None => return Err(perr(0, "missing order".into())),
        };

        let mut spec = ExperimentSpec::new(task, topology, profile);
        spec.figure = figure;
        if let Some((_, _, v)) = get("label") {
            spec.label = v.clone();
        } else {
            spec.label = figure.to_string();
        }
        if let Some((ln, _, v)) = get("placement") {
            spec.placement = match v.as_str() {
                "uniform" => Placement::UniformClusters,
                "contiguous" => Placement::Contiguous,
                _ => return Err(perr(*ln, format!("unknown placement {v:?}"))),
            };
        }
        match (int("erased")?, real("alpha")?) {
            (Some(_), Some(_)) => return Err(perr(0, "give erased or alpha, not both".into())),
            (Some(k), None) => spec.erasure = Erasure::Count(k as usize),
            (None, Some(a)) => spec.erasure = Erasure::Fraction(a),
            (None, None) => {}
        }
        if let Some((ln, _, v)) = get("mode") {
            spec.mode = match v.as_str() {
                "blind" => RecoveryMode::Blind,
                "guided" => RecoveryMode::Guided,
                _ => return Err(perr(*ln, format!("unknown mode {v:?}"))),
            };
        }
        if let Some((ln, _, v)) = get("distortion") {
            spec.distortion = match v.as_str() {
                "pairwise" => DistortionKind::PairwisePermuted,
                "anagram" => DistortionKind::Anagram,
                _ => return Err(perr(*ln, format!("unknown distortion {v:?}"))),
            };
        }
        if let Some(its) = list("iterations")? {
            spec.iterations = its.into_iter().map(|x| x as usize).collect();
        }
        spec.sweep = list("sweep")?.unwrap_or_default();
        if let Some(t) = int("trials")? {
            spec.trials = t;
        }
        spec.min_errors = int("min_errors")?.unwrap_or(0);
        spec.max_trials = int("max_trials")?.unwrap_or(spec.trials);
        if let Some(s) = int("seed")? {
            spec.seed = s;
        }
        if let Some(p) = real("p0")? {
            spec.p0 = p;
        }
        if let Some((ln, _, v)) = get("fresh_network") {
            spec.fresh_network = v.parse().map_err(|_| {
                perr(
                    *ln,
                    format!("fresh_network: expected true/false, got {v:?}"),
                )
            })?;
        }
        const KNOWN: &[&str] = &[
            "figure",
            "task",
            "label",
            "chi",
            "l",
            "order",
            "placement",
            "erased",
            "alpha",
            "mode",
            "distortion",
            "iterations",
            "sweep",
            "trials",
            "min_errors",
            "max_trials",
            "seed",
            "p0",
            "fresh_network",
        ];
        if let Some((ln, k, _)) = kv.iter().find(|(_, k, _)| !KNOWN.contains(&k.as_str())) {
            return Err(perr(*ln, format!("unknown key {k:?}")));
        }
        Ok(spec)
    }

    /// True for tasks whose y-axis is an error rate (plotted on a log scale).
    pub fn is_rate(&self) -> bool {
        matches!(self.task, Task::Recover | Task::Classify | Task::Distorted)
    }
}

fn parse_number(s: &str) -> Option<f64> {
    s.trim()
        .replace('_', "")
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
}

/// Comma-separated numbers; `a:step:b` expands to an inclusive range.
fn parse_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let parts: Vec<&str> = tok.split(':').collect();
        match parts.as_slice() {
            [x] => out.push(parse_number(x).ok_or(format!("bad number {x:?}"))?),
            [a, step, b] => {
                let (a, step, b) = (
                    parse_number(a).ok_or(format!("bad number {a:?}"))?,
                    parse_number(step).ok_or(format!("bad number {step:?}"))?,
                    parse_number(b).ok_or(format!("bad number {b:?}"))?,
                );
                if step <= 0.0 {
                    return Err(format!("range step must be positive in {tok:?}"));
                }
                let n = ((b - a) / step + 1e-9).floor() as i64;
                out.extend((0..=n).map(|i| a + i as f64 * step));
            }
            _ => return Err(format!("bad list item {tok:?}")),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_full_spec() {
        let s = ExperimentSpec::parse(
            "# test\nfigure = fig3\nchi=100\nl = 64\norder = 12\nerased = 3\nmode = guided\n\
             iterations = 1, 4\nsweep = 1e4, 20_000, 30000:10000:50000\ntrials = 10\nseed = 7\n",
        )
        .unwrap();
        assert_eq!(s.task, Task::Recover);
        assert_eq!(s.mode, RecoveryMode::Guided);
        assert_eq!(s.iterations, vec![1, 4]);
        assert_eq!(s.sweep, vec![1e4, 2e4, 3e4, 4e4, 5e4]);
        assert_eq!(s.erasure, Erasure::Count(3));
        assert_eq!(s.max_trials, 10);
        assert_eq!(s.label, "fig3");
        s.validate().unwrap();
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(ExperimentSpec::parse("figure=fig2\nchi=10\nl=4\norder=3\nfoo=1").is_err());
        assert!(ExperimentSpec::parse("figure=fig2\nchi=10\nl=4\norder=x").is_err());
        assert!(ExperimentSpec::parse("chi=10\nl=4\norder=3").is_err());
    }

    #[test]
    fn infeasible_specs() {
        let base = "figure=fig3\nchi=20\nl=8\norder=5\nsweep=100\n";
        let v = |extra: &str| {
            ExperimentSpec::parse(&format!("{base}{extra}"))
                .unwrap()
                .validate()
        };
        assert!(v("erased=2").is_ok());
        assert!(matches!(v("erased=5"), Err(Error::Infeasible(_))));
        assert!(matches!(v("trials=0"), Err(Error::Infeasible(_))));
        assert!(matches!(
            v("erased=1\niterations=0"),
            Err(Error::Infeasible(_))
        ));
        let big = ExperimentSpec::parse("figure=fig3\nchi=20\nl=8\norder=21\nsweep=1").unwrap();
        assert!(matches!(big.validate(), Err(Error::Infeasible(_))));
        let nc = ExperimentSpec::parse("figure=fig6\nchi=20\nl=8\norder=5\nsweep=10").unwrap();
        assert!(matches!(nc.validate(), Err(Error::Infeasible(_))));
    }
}
