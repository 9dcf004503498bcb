//! Closed-form density, capacity and error-rate expressions.
//!
//! Every `(1 - x)^N` is evaluated as `exp(N * ln_1p(-x))` and every
//! `1 - (1 - x)^N` as `-expm1(N * ln_1p(-x))`, so tiny `x` and huge `N`
//! neither underflow nor cancel.

use statrs::function::gamma::ln_gamma;

use crate::blurred::DistortionKind;
use crate::error::{Error, Result};
use crate::message::{OrderProfile, SparseMessage};
use crate::topology::Topology;

/// Exact closed form or its small-density linearization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Form {
    #[default]
    Exact,
    SmallDensity,
}

/// `(1 - x)^n`.
pub fn pow_one_minus(x: f64, n: f64) -> f64 {
    if n == 0.0 {
        return 1.0;
    }
    (n * (-x).ln_1p()).exp()
}

/// `1 - (1 - x)^n`.
pub fn one_minus_pow_one_minus(x: f64, n: f64) -> f64 {
    if n == 0.0 || x == 0.0 {
        return 0.0;
    }
    -(n * (-x).ln_1p()).exp_m1()
}

fn resource_pairs(chi: usize, l: usize) -> f64 {
    let (chi, l) = (chi as f64, l as f64);
    chi * (chi - 1.0) * l * l
}

/// Probability that one message of order `c` covers a given potential edge.
pub fn edge_hit_probability(chi: usize, l: usize, c: usize) -> f64 {
    (c * (c - 1)) as f64 / resource_pairs(chi, l)
}

/// Expected density after `m` i.i.d. messages of order `c`.
pub fn expected_density(chi: usize, l: usize, c: usize, m: f64) -> f64 {
    one_minus_pow_one_minus(edge_hit_probability(chi, l, c), m)
}

/// Expected density for explicit per-order message counts `(c, M_c)`.
pub fn expected_density_counts(chi: usize, l: usize, counts: &[(usize, f64)]) -> f64 {
    let log_absent: f64 = counts
        .iter()
        .map(|&(c, mc)| {
            if mc == 0.0 {
                0.0
            } else {
                mc * (-edge_hit_probability(chi, l, c)).ln_1p()
            }
        })
        .sum();
    -log_absent.exp_m1()
}

/// Expected density for `m` messages drawn from `profile`; a uniform range
/// splits `m` evenly over its `lambda` orders.
pub fn expected_density_profile(chi: usize, l: usize, profile: &OrderProfile, m: f64) -> f64 {
    match *profile {
        OrderProfile::Constant(c) => expected_density(chi, l, c, m),
        OrderProfile::UniformRange { .. } => {
            let per = m / profile.lambda() as f64;
            let counts: Vec<_> = profile.orders().map(|c| (c, per)).collect();
            expected_density_counts(chi, l, &counts)
        }
    }
}

/// Number of i.i.d. messages of order `c` giving density `d`.
pub fn diversity_from_density(chi: usize, l: usize, c: usize, d: f64) -> f64 {
    (-d).ln_1p() / (-edge_hit_probability(chi, l, c)).ln_1p()
}

/// Low-density approximation `d ~ c(c-1)M / (chi(chi-1)l^2)`.
pub fn density_linear(chi: usize, l: usize, c: usize, m: f64) -> f64 {
    edge_hit_probability(chi, l, c) * m
}

/// Quadratic law `M ~ n^2 d / (c(c-1))`, `n = chi * l`.
pub fn diversity_quadratic(chi: usize, l: usize, c: usize, d: f64) -> f64 {
    let n = (chi * l) as f64;
    n * n * d / (c * (c - 1)) as f64
}

pub fn log2_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    (ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0))
        / std::f64::consts::LN_2
}

/// Information carried by one message of order `c`: cluster choice plus
/// characters, plus `log2(lambda)` for the choice of order when it varies.
pub fn message_bits(chi: usize, l: usize, c: usize, lambda: usize) -> f64 {
    let kappa = l.trailing_zeros() as f64;
    log2_binomial(chi, c) + c as f64 * kappa + (lambda as f64).log2()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Capacity {
    /// Stored information `B` in bits for the given `M`.
    pub bits: f64,
    /// `B / Q`.
    pub efficiency: f64,
    /// Message count at which `B = Q`.
    pub m_max: f64,
    /// Average information per message.
    pub bits_per_message: f64,
}

/// Information, efficiency and efficiency-1 diversity for `m` messages.
pub fn capacity(chi: usize, l: usize, profile: &OrderProfile, m: f64) -> Result<Capacity> {
    if profile.max() > chi {
        return Err(Error::Infeasible(format!(
            "order {} exceeds chi = {chi}",
            profile.max()
        )));
    }
    let q = resource_pairs(chi, l) / 2.0;
    let lambda = profile.lambda();
    let per: f64 = profile
        .orders()
        .map(|c| message_bits(chi, l, c, lambda))
        .sum::<f64>()
        / lambda as f64;
    Ok(Capacity {
        bits: m * per,
        efficiency: m * per / q,
        m_max: q / per,
        bits_per_message: per,
    })
}

/// Efficiency of an explicit message multiset, each message weighted by its
/// own order; `lambda` is the number of admissible orders.
pub fn efficiency_of(topology: &Topology, messages: &[SparseMessage], lambda: usize) -> f64 {
    let (chi, l) = (topology.chi(), topology.l());
    let total: f64 = messages
        .iter()
        .map(|m| message_bits(chi, l, m.order(), lambda))
        .sum();
    2.0 * total / resource_pairs(chi, l)
}

/// Count of fanals that could close a spurious clique in blind recovery.
pub fn blind_competitors(chi: usize, l: usize, c: usize, c_e: usize) -> f64 {
    (c_e * (l - 1) + (chi - c) * l) as f64
}

/// Blind-recovery error probability with `c_e` erased characters.
pub fn p_error_blind(chi: usize, l: usize, c: usize, c_e: usize, d: f64, form: Form) -> f64 {
    debug_assert!(c_e < c);
    let k = blind_competitors(chi, l, c, c_e);
    let x = d.powi((c - c_e) as i32);
    match form {
        Form::Exact => one_minus_pow_one_minus(x, k),
        Form::SmallDensity => k * x,
    }
}

/// Probability of blind recovery succeeding.
pub fn p_retrieve_blind(chi: usize, l: usize, c: usize, c_e: usize, d: f64) -> f64 {
    1.0 - p_error_blind(chi, l, c, c_e, d, Form::Exact)
}

/// Density at which blind recovery fails with probability `p`.
pub fn density_for_blind_error(chi: usize, l: usize, c: usize, c_e: usize, p: f64) -> f64 {
    let k = blind_competitors(chi, l, c, c_e);
    let x = -((1.0 - p).ln() / k).exp_m1();
    x.powf(1.0 / (c - c_e) as f64)
}

/// Guided-recovery error probability after one iteration.
pub fn p_error_guided(l: usize, c: usize, c_e: usize, d: f64) -> f64 {
    debug_assert!(c_e < c);
    one_minus_pow_one_minus(d.powi((c - c_e) as i32), ((l - 1) * c_e) as f64)
}

/// Approximate diversity reachable at order `c` for target error `p0`
/// with erased fraction `alpha`.
pub fn diversity_vs_order(chi: usize, l: usize, alpha: f64, p0: f64, c: usize) -> f64 {
    let n = (chi * l) as f64;
    let c = c as f64;
    (n / c).powi(2) * (p0 / n).powf(1.0 / ((1.0 - alpha) * c))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimalOrder {
    pub raw: f64,
    pub rounded: usize,
}

/// Order maximizing [`diversity_vs_order`]: `ln(n / p0) / (2(1 - alpha))`.
pub fn optimal_order(chi: usize, l: usize, alpha: f64, p0: f64) -> OptimalOrder {
    let raw = ((chi * l) as f64 / p0).ln() / (2.0 * (1.0 - alpha));
    OptimalOrder {
        raw,
        rounded: raw.round() as usize,
    }
}

/// Probability that a random probe of order `c` is accepted: `d^(c(c-1)/2)`.
pub fn p_type2(c: usize, d: f64) -> f64 {
    d.powi((c * (c - 1) / 2) as i32)
}

pub fn p_type2_from_messages(chi: usize, l: usize, c: usize, m: f64) -> f64 {
    p_type2(c, expected_density(chi, l, c, m))
}

/// Recovery error with `k` competitors when each competitor's message
/// count is Poisson rather than fixed. A competitor in `n` messages joins
/// each known fanal with probability `1 - (1 - q)^n`, `q` the chance that
/// one of its messages holds that fanal. Loaded fanals are more likely to
/// close a spurious clique, so this sits above the uniform-density forms.
pub fn p_error_loaded(chi: usize, l: usize, c: usize, c_e: usize, competitors: f64, m: f64) -> f64 {
    let lambda = m * c as f64 / (chi * l) as f64;
    if lambda <= 0.0 {
        return 0.0;
    }
    let q = (c - 1) as f64 / ((chi - 1) * l) as f64;
    let known = (c - c_e) as i32;
    let top = (lambda + 12.0 * lambda.sqrt() + 30.0).ceil() as u64;
    let mut hit = 0.0;
    for n in 0..=top {
        let nf = n as f64;
        let log_pmf = nf * lambda.ln() - lambda - ln_gamma(nf + 1.0);
        hit += log_pmf.exp() * one_minus_pow_one_minus(q, nf).powi(known);
    }
    one_minus_pow_one_minus(hit, competitors)
}

/// Error probability when decoding a pairwise-permuted message (`2c`
/// competing patterns) or an anagram (`(c-1)c` patterns).
pub fn p_error_distorted(c: usize, d: f64, kind: DistortionKind, form: Form) -> f64 {
    let patterns = match kind {
        DistortionKind::PairwisePermuted => 2 * c,
        DistortionKind::Anagram => (c - 1) * c,
    } as f64;
    let x = d.powi(c as i32 - 1);
    match form {
        Form::Exact => one_minus_pow_one_minus(x, patterns),
        Form::SmallDensity => patterns * x,
    }
}

/// Number of start positions for which a contiguous message of order `c`
/// covers both clusters `a < b`.
fn contiguous_cover(chi: usize, c: usize, a: usize, b: usize) -> usize {
    if b - a >= c || c > chi {
        return 0;
    }
    let lo = (b + 1).saturating_sub(c);
    let hi = a.min(chi - c);
    (hi + 1).saturating_sub(lo)
}

/// Expected density between clusters `a` and `b` after `m` messages placed
/// on contiguous clusters, orders drawn from `profile`. Nearby clusters
/// saturate much faster than the network-wide average.
pub fn contiguous_pair_density(
    chi: usize,
    l: usize,
    profile: &OrderProfile,
    a: usize,
    b: usize,
    m: f64,
) -> f64 {
    let (a, b) = (a.min(b), a.max(b));
    let orders: Vec<usize> = profile.orders().collect();
    let hit = orders
        .iter()
        .map(|&c| contiguous_cover(chi, c, a, b) as f64 / (chi - c + 1) as f64)
        .sum::<f64>()
        / (orders.len() * l * l) as f64;
    one_minus_pow_one_minus(hit, m)
}

/// Distorted-decoding error for contiguous placement: each competing
/// pattern needs all its `c-1` edges, each edge taken at the density of
/// its own cluster pair, averaged over start positions and orders. With
/// equal pair densities this is [`p_error_distorted`].
pub fn p_error_distorted_contiguous(
    chi: usize,
    l: usize,
    profile: &OrderProfile,
    kind: DistortionKind,
    m: f64,
) -> f64 {
    let orders: Vec<usize> = profile.orders().collect();
    let mut total = 0.0;
    for &c in &orders {
        let per_position = match kind {
            DistortionKind::PairwisePermuted => 2.0,
            DistortionKind::Anagram => (c - 1) as f64,
        };
        let starts = chi - c + 1;
        let mut sum = 0.0;
        for s in 0..starts {
            let mut log_ok = 0.0;
            for p in 0..c {
                let mut log_all = 0.0;
                for q in (0..c).filter(|&q| q != p) {
                    log_all += contiguous_pair_density(chi, l, profile, s + p, s + q, m).ln();
                }
                log_ok += per_position * (-log_all.exp()).ln_1p();
            }
            sum += -log_ok.exp_m1();
        }
        total += sum / starts as f64;
    }
    total / orders.len() as f64
}

/// Average blind error over uniformly distributed orders with
/// `c_e = alpha * c` erased, `alpha * c` taken as a real number.
pub fn p_error_variable(
    chi: usize,
    l: usize,
    c_min: usize,
    c_max: usize,
    alpha: f64,
    d: f64,
) -> f64 {
    let lambda = (c_max - c_min + 1) as f64;
    (c_min..=c_max)
        .map(|c| {
            let cf = c as f64;
            let k = alpha * cf * (l as f64 - 1.0) + ((chi - c) * l) as f64;
            one_minus_pow_one_minus(d.powf((1.0 - alpha) * cf), k)
        })
        .sum::<f64>()
        / lambda
}

/// Erased count used by simulation for order `c`: nearest integer to
/// `alpha * c`, capped at `c - 1`.
pub fn erased_for(c: usize, alpha: f64) -> usize {
    ((alpha * c as f64).round() as usize).min(c.saturating_sub(1))
}

/// Variant of [`p_error_variable`] with integer `c_e` per order, matching
/// what a simulation can realize.
pub fn p_error_variable_rounded(
    chi: usize,
    l: usize,
    c_min: usize,
    c_max: usize,
    alpha: f64,
    d: f64,
) -> f64 {
    let lambda = (c_max - c_min + 1) as f64;
    (c_min..=c_max)
        .map(|c| p_error_blind(chi, l, c, erased_for(c, alpha), d, Form::Exact))
        .sum::<f64>()
        / lambda
}

/// Named parameters for [`evaluate`].
#[derive(Clone, Debug, Default)]
pub struct TheoryParams {
    pub chi: Option<usize>,
    pub l: Option<usize>,
    pub profile: Option<OrderProfile>,
    pub m: Option<f64>,
    pub d: Option<f64>,
    pub c_e: Option<usize>,
    pub alpha: Option<f64>,
    pub p0: Option<f64>,
    pub approx: bool,
}

impl TheoryParams {
    /// Parses `key=value` pairs: `chi`, `l`, `c` (or `c=12..20`), `m`, `d`,
    /// `c_e`, `alpha`, `p0`, `approx`.
    pub fn parse<'a>(pairs: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        let mut p = TheoryParams::default();
        for kv in pairs {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Message(format!("expected key=value, got {kv:?}")))?;
            let bad = || Error::Message(format!("bad value for {k}: {v:?}"));
            let int = || v.parse::<usize>().map_err(|_| bad());
            let real = || v.parse::<f64>().map_err(|_| bad());
            match k {
                "chi" => p.chi = Some(int()?),
                "l" => p.l = Some(int()?),
                "c" => p.profile = Some(v.parse()?),
                "m" | "M" => p.m = Some(real()?),
                "d" => p.d = Some(real()?),
                "c_e" | "ce" => p.c_e = Some(int()?),
                "alpha" => p.alpha = Some(real()?),
                "p0" | "P0" => p.p0 = Some(real()?),
                "approx" => p.approx = v.parse().map_err(|_| bad())?,
                _ => return Err(Error::Message(format!("unknown parameter {k:?}"))),
            }
        }
        Ok(p)
    }

    fn need<T: Copy>(v: Option<T>, name: &str) -> Result<T> {
        v.ok_or_else(|| Error::Message(format!("missing parameter {name}")))
    }

    fn topology(&self) -> Result<Topology> {
        Topology::new(Self::need(self.chi, "chi")?, Self::need(self.l, "l")?)
    }

    fn order(&self) -> Result<usize> {
        match Self::need(self.profile, "c")? {
            OrderProfile::Constant(c) => Ok(c),
            p => Err(Error::Message(format!("need a single order, got c={p}"))),
        }
    }

    fn density(&self, t: &Topology) -> Result<f64> {
        let d = match (self.d, self.m) {
            (Some(d), _) => d,
            (None, Some(m)) => {
                let p = Self::need(self.profile, "c")?;
                expected_density_profile(t.chi(), t.l(), &p, m)
            }
            _ => return Err(Error::Message("need d or m".into())),
        };
        if !(0.0..=1.0).contains(&d) {
            return Err(Error::Infeasible(format!("density {d} outside [0, 1]")));
        }
        Ok(d)
    }

    fn erased(&self, c: usize) -> Result<usize> {
        let ce = Self::need(self.c_e, "c_e")?;
        if ce >= c {
            return Err(Error::Infeasible(format!("c_e = {ce} must be < c = {c}")));
        }
        Ok(ce)
    }

    fn form(&self) -> Form {
        if self.approx {
            Form::SmallDensity
        } else {
            Form::Exact
        }
    }
}

/// Names accepted by [`evaluate`].
pub const FORMULAS: &[&str] = &[
    "density",
    "diversity",
    "capacity",
    "p_error_blind",
    "p_error_guided",
    "diversity_vs_order",
    "optimal_order",
    "p_type2",
    "p_error_pairwise",
    "p_error_anagram",
    "p_error_variable",
    "p_error_loaded_blind",
    "p_error_loaded_guided",
    "p_error_contiguous",
];

/// Evaluates a closed form by name; returns labelled outputs.
pub fn evaluate(name: &str, p: &TheoryParams) -> Result<Vec<(&'static str, f64)>> {
    let t = p.topology();
    let (chi, l) = match &t {
        Ok(t) => (t.chi(), t.l()),
        Err(_) => (0, 0),
    };
    let out = match name {
        "density" => {
            let t = t?;
            let prof = TheoryParams::need(p.profile, "c")?;
            prof.validate(chi)?;
            let m = TheoryParams::need(p.m, "m")?;
            vec![("d", expected_density_profile(t.chi(), t.l(), &prof, m))]
        }
        "diversity" => {
            t?;
            let c = p.order()?;
            let d = TheoryParams::need(p.d, "d")?;
            if !(0.0..1.0).contains(&d) {
                return Err(Error::Infeasible(format!("density {d} outside [0, 1)")));
            }
            vec![
                ("m", diversity_from_density(chi, l, c, d)),
                ("m_quadratic", diversity_quadratic(chi, l, c, d)),
            ]
        }
        "capacity" => {
            t?;
            let prof = TheoryParams::need(p.profile, "c")?;
            let cap = capacity(chi, l, &prof, p.m.unwrap_or(0.0))?;
            vec![
                ("bits", cap.bits),
                ("efficiency", cap.efficiency),
                ("m_max", cap.m_max),
                ("bits_per_message", cap.bits_per_message),
            ]
        }
        "p_error_blind" => {
            let t = t?;
            let c = p.order()?;
            let ce = p.erased(c)?;
            let d = p.density(&t)?;
            vec![("p_e", p_error_blind(chi, l, c, ce, d, p.form()))]
        }
        "p_error_guided" => {
            let t = t?;
            let c = p.order()?;
            let ce = p.erased(c)?;
            let d = p.density(&t)?;
            vec![("p_e", p_error_guided(l, c, ce, d))]
        }
        "diversity_vs_order" | "optimal_order" => {
            t?;
            let alpha = TheoryParams::need(p.alpha, "alpha")?;
            let p0 = TheoryParams::need(p.p0, "p0")?;
            if !(0.0..1.0).contains(&alpha) || !(p0 > 0.0 && p0 < 1.0) {
                return Err(Error::Infeasible(
                    "need 0 <= alpha < 1 and 0 < p0 < 1".into(),
                ));
            }
            if name == "optimal_order" {
                let o = optimal_order(chi, l, alpha, p0);
                vec![("c_opt_raw", o.raw), ("c_opt", o.rounded as f64)]
            } else {
                vec![("m", diversity_vs_order(chi, l, alpha, p0, p.order()?))]
            }
        }
        "p_type2" => {
            let c = p.order()?;
            let d = match p.d {
                Some(d) => d,
                None => p.density(&t?)?,
            };
            vec![("p", p_type2(c, d))]
        }
        "p_error_pairwise" | "p_error_anagram" => {
            let c = p.order()?;
            let d = match p.d {
                Some(d) => d,
                None => p.density(&t?)?,
            };
            let kind = if name == "p_error_pairwise" {
                DistortionKind::PairwisePermuted
            } else {
                DistortionKind::Anagram
            };
            vec![("p_e", p_error_distorted(c, d, kind, p.form()))]
        }
        "p_error_variable" => {
            let t = t?;
            let prof = TheoryParams::need(p.profile, "c")?;
            prof.validate(chi)?;
            let alpha = TheoryParams::need(p.alpha, "alpha")?;
            let d = p.density(&t)?;
            vec![(
                "p_e",
                p_error_variable(chi, l, prof.min(), prof.max(), alpha, d),
            )]
        }
        "p_error_loaded_blind" | "p_error_loaded_guided" => {
            t?;
            let c = p.order()?;
            let ce = p.erased(c)?;
            let m = TheoryParams::need(p.m, "m")?;
            let k = if name == "p_error_loaded_blind" {
                blind_competitors(chi, l, c, ce)
            } else {
                (ce * (l - 1)) as f64
            };
            vec![("p_e", p_error_loaded(chi, l, c, ce, k, m))]
        }
        "p_error_contiguous" => {
            t?;
            let prof = TheoryParams::need(p.profile, "c")?;
            prof.validate(chi)?;
            let m = TheoryParams::need(p.m, "m")?;
            vec![
                (
                    "pairwise",
                    p_error_distorted_contiguous(
                        chi,
                        l,
                        &prof,
                        DistortionKind::PairwisePermuted,
                        m,
                    ),
                ),
                (
                    "anagram",
                    p_error_distorted_contiguous(chi, l, &prof, DistortionKind::Anagram, m),
                ),
            ]
        }
        _ => {
            return Err(Error::Message(format!(
                "unknown formula {name:?}; expected one of {}",
                FORMULAS.join(", ")
            )))
        }
    };
    Ok(out)
}
