//! Seeded property corpora.
//!
//! Every property draws its instances from [`sub_seed`]`(seed, name, index)`,
//! so a reported violation can be replayed from the suite seed and the index
//! alone. Reports contain no timing or other environment-dependent data, so
//! identical seeds give byte-identical JSON.

use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};

use crate::capacity::{
    alpha_holevo, covariant_radius_bound, holevo_capacity, info_radius, info_radius_around, subadditivity_gap,
    c_constant_at,
};
use crate::channels::{
    depolarizing, gaussian_matrix, generalized_dephasing, ic_povm, pinching, random_channel, random_density,
    random_measure_prepare, random_unit_vector, rng_from_seed, smooth_hadamard, DensityMatrix, EbVerdict,
    KrausChannel,
};
use crate::converse::{
    choose_alpha, eb_chain_report, eb_exponent_bound, generic_bound, simulate_code,
    sqrt_n_threshold, sqrt_n_total_exponent, ChainInputs, CodeSpec,
};
use crate::divergences::{
    binary_cq_divergence, max_output_alpha_norm, renyi_d, sandwiched_d, sandwiched_q, vn_relative_entropy,
};
use crate::io::num;
use crate::linalg::{
    eigh, fractional_power, max_abs_entry, partial_trace, partial_trace_mat, partial_transpose, schatten_norm,
    support_projector, trace_distance, HermitianOperator, Mat, SUPPORT_TOL,
};
use crate::optimize::OptimizerConfig;
use crate::{Complex64, Error, Result};
use rand::Rng;

/// A named group of properties.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    DivergenceProps,
    ChannelProps,
    LemmaEquality,
    Subadditivity,
    ConverseChain,
    All,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::DivergenceProps,
        Suite::ChannelProps,
        Suite::LemmaEquality,
        Suite::Subadditivity,
        Suite::ConverseChain,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::DivergenceProps => "divergence-props",
            Suite::ChannelProps => "channel-props",
            Suite::LemmaEquality => "lemma-equality",
            Suite::Subadditivity => "subadditivity",
            Suite::ConverseChain => "converse-chain",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .iter()
            .chain(std::iter::once(&Suite::All))
            .find(|x| x.name() == s)
            .copied()
            .ok_or_else(|| Error::Parse(format!("unknown suite \"{s}\"")))
    }
}

/// Outcome of one property over its corpus. A property passes when it saw at
/// least one sample and `worst_observed ≤ tolerance`.
#[derive(Clone, Debug, PartialEq)]
pub struct PropertyReport {
    pub suite: String,
    pub name: String,
    pub samples: usize,
    pub tolerance: f64,
    pub worst_observed: f64,
    pub pass: bool,
    /// First instance whose observation exceeded the tolerance.
    pub violation: Option<Value>,
}

impl PropertyReport {
    pub fn worst_slack(&self) -> f64 {
        self.tolerance - self.worst_observed
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite,
            "name": self.name,
            "samples": self.samples,
            "tolerance": num(self.tolerance),
            "worst_observed": num(self.worst_observed),
            "worst_slack": num(self.worst_slack()),
            "pass": self.pass,
            "violation": self.violation.clone().unwrap_or(Value::Null),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub suite: Suite,
    pub seed: u64,
    pub properties: Vec<PropertyReport>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(|p| p.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PropertyReport> {
        self.properties.iter().filter(|p| !p.pass)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite.name(),
            "seed": self.seed,
            "pass": self.passed(),
            "properties": self.properties.iter().map(PropertyReport::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Runs `suite`; `extra` channels join the channel and lemma corpora.
pub fn run_suite(suite: Suite, seed: u64, extra: &[KrausChannel]) -> Result<VerifyReport> {
    for ch in extra {
        if !ch.is_trace_preserving() {
            return Err(Error::NotTracePreserving(ch.tp_defect()));
        }
    }
    let mut properties = Vec::new();
    let suites: Vec<Suite> = if suite == Suite::All { Suite::ALL.to_vec() } else { vec![suite] };
    for s in suites {
        properties.extend(match s {
            Suite::DivergenceProps => divergence_props(seed),
            Suite::ChannelProps => channel_props(seed, extra),
            Suite::LemmaEquality => lemma_props(seed, extra),
            Suite::Subadditivity => subadditivity_props(seed),
            Suite::ConverseChain => converse_props(seed),
            Suite::All => unreachable!(),
        });
    }
    Ok(VerifyReport { suite, seed, properties })
}

pub fn divergence_props(seed: u64) -> Vec<PropertyReport> {
    let mut out = vec![
        fractional_power_composition(seed),
        lieb_thirring(seed),
        schatten_norm_axioms(seed),
        partial_trace_round_trip(seed),
        monotonicity(seed),
        ordering(seed),
        positivity(seed),
        self_divergence(seed),
        equality_condition(seed),
        ic_povm_distinguishes(seed),
        joint_convexity(seed),
        joint_quasi_convexity(seed),
    ];
    out.extend(limit(seed));
    out.push(unitary_invariance(seed));
    out.push(tensor_multiplicativity(seed));
    out
}

pub fn channel_props(seed: u64, extra: &[KrausChannel]) -> Vec<PropertyReport> {
    vec![
        measure_prepare_ppt(seed),
        complement_duality(seed, extra),
        conjugation_recovery(seed),
        smooth_hadamard_reduces(seed),
        eb_verdicts(seed),
    ]
}

pub fn lemma_props(seed: u64, extra: &[KrausChannel]) -> Vec<PropertyReport> {
    let mut out = lemma_equality(seed, extra);
    out.push(depolarizing_ordering(seed));
    out.push(gap_bound(seed));
    out
}

pub fn subadditivity_props(seed: u64) -> Vec<PropertyReport> {
    let mut out = vec![eb_subadditivity(seed)];
    out.extend(nu_multiplicativity(seed));
    out.push(hadamard_fixed_sigma(seed));
    out
}

pub fn converse_props(seed: u64) -> Vec<PropertyReport> {
    let mut out = eb_chain(seed);
    out.push(sqrt_threshold(seed));
    out.extend(alpha_rule(seed));
    out.push(delta_lower_bound(seed));
    out.push(simulation_dominance(seed));
    out
}

/// Per-instance seed derived from the suite seed, a property tag and an index.
pub fn sub_seed(seed: u64, tag: &str, index: u64) -> u64 {
    // FNV-1a over the tag, then a splitmix64 finalizer.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    let mut z = seed ^ h ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct Tally {
    suite: &'static str,
    name: &'static str,
    tolerance: f64,
    samples: usize,
    worst: f64,
    failures: Option<usize>,
    violation: Option<Value>,
}

impl Tally {
    /// `observed ≤ tolerance` per sample.
    fn new(suite: &'static str, name: &'static str, tolerance: f64) -> Self {
        Self {
            suite,
            name,
            tolerance,
            samples: 0,
            worst: f64::NEG_INFINITY,
            failures: None,
            violation: None,
        }
    }

    /// At most `allowed` failing samples.
    fn counting(suite: &'static str, name: &'static str, allowed: usize) -> Self {
        Self {
            failures: Some(0),
            ..Self::new(suite, name, allowed as f64)
        }
    }

    fn observe(&mut self, observed: f64, instance: impl FnOnce() -> Value) {
        self.samples += 1;
        let obs = if observed.is_nan() { f64::INFINITY } else { observed };
        self.worst = self.worst.max(obs);
        if obs > self.tolerance && self.violation.is_none() {
            let mut inst = instance();
            inst["observed"] = num(obs);
            self.violation = Some(inst);
        }
    }

    fn count(&mut self, failed: bool, instance: impl FnOnce() -> Value) {
        self.samples += 1;
        if failed {
            let f = self.failures.as_mut().expect("counting tally");
            *f += 1;
            if self.violation.is_none() {
                self.violation = Some(instance());
            }
        }
    }

    /// Records an error raised while evaluating a sample.
    fn error(&mut self, err: &Error, mut instance: Value) {
        instance["error"] = json!(err.to_string());
        match self.failures {
            Some(_) => self.count(true, || instance),
            None => self.observe(f64::INFINITY, || instance),
        }
    }

    fn finish(self) -> PropertyReport {
        let worst = match self.failures {
            Some(f) => f as f64,
            None => self.worst,
        };
        let pass = self.samples > 0 && worst <= self.tolerance;
        PropertyReport {
            suite: self.suite.into(),
            name: self.name.into(),
            samples: self.samples,
            tolerance: self.tolerance,
            worst_observed: worst,
            pass,
            // A counting property within its allowance keeps no violation.
            violation: if pass { None } else { self.violation },
        }
    }
}

fn inst(seed: u64, index: usize) -> Value {
    json!({"index": index, "seed": seed})
}

fn full_rank_density<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    random_density(d, d, rng)
}

fn unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Mat> {
    Ok(random_channel(d, d, 1, rng)?.kraus()[0].clone())
}

const DIV: &str = "divergence-props";
const CHAN: &str = "channel-props";
const LEMMA: &str = "lemma-equality";
const SUB: &str = "subadditivity";
const CONV: &str = "converse-chain";

pub const MONOTONICITY_ALPHAS: [f64; 3] = [1.1, 1.5, 2.0];

/// Random `(ρ, σ, N)` with `ρ` of random rank, `σ` of full rank and `N` a
/// random channel; dimensions cycle through 2–4.
pub fn state_triple(seed: u64, index: usize) -> Result<(DensityMatrix, DensityMatrix, KrausChannel)> {
    let mut rng = rng_from_seed(seed);
    let d_in = 2 + index % 3;
    let d_out = 2 + (index / 3) % 3;
    let rank = rng.random_range(1..=d_in);
    let rho = random_density(d_in, rank, &mut rng);
    let sigma = full_rank_density(d_in, &mut rng);
    let k = d_in.div_ceil(d_out) + index % 2;
    let ch = random_channel(d_in, d_out, k, &mut rng)?;
    Ok((rho, sigma, ch))
}

pub fn fractional_power_composition(seed: u64) -> PropertyReport {
    let mut t = Tally::new(DIV, "fractional_power_composition", 1e-8);
    for i in 0..100 {
        let s0 = sub_seed(seed, t.name, i as u64);
        let mut rng = rng_from_seed(s0);
        let d = 2 + i % 3;
        let rank = rng.random_range(1..=d);
        let pick = |rng: &mut rand_chacha::ChaCha8Rng| {
            let x: f64 = rng.random_range(0.1..1.5);
            if rng.random::<bool>() {
                x
            } else {
                -x
            }
        };
        let (s, u) = (pick(&mut rng), pick(&mut rng));
        let mut run = || -> Result<f64> {
            let rho = random_density(d, rank, &mut rng);
            let proj = support_projector(rho.op(), SUPPORT_TOL)?;
            // Lift the support spectrum away from zero to keep the powers well conditioned.
            let a = HermitianOperator::symmetrized(&(rho.as_mat() + proj.as_mat().scale(0.05)));
            let lhs = fractional_power(&fractional_power(&a, s, SUPPORT_TOL)?, u, SUPPORT_TOL)?;
            let rhs = fractional_power(&a, s * u, SUPPORT_TOL)?;
            Ok(max_abs_entry(&(lhs.as_mat() - rhs.as_mat())) / max_abs_entry(rhs.as_mat()).max(1.0))
        };
        match run() {
            Ok(v) => t.observe(v, || json!({"index": i, "seed": s0, "s": s, "t": u})),
            Err(e) => t.error(&e, inst(s0, i)),
        }
    }
    t.finish()
}

pub const LIEB_THIRRING_ALPHAS: [f64; 3] = [1.3, 2.0, 3.0];

/// `Tr{(CBC†)^α} ≤ Tr{(C†C)^α B^α}`, relative to `max(1, rhs)`.
pub fn lieb_thirring(seed: u64) -> PropertyReport {
    let mut t = Tally::new(DIV, "lieb_thirring", 1e-8);
    for i in 0..100 {
        let s0 = sub_seed(seed, t.name, i as u64);
        let mut rng = rng_from_seed(s0);
        let d = 2 + i % 3;
        let rank = rng.random_range(1..=d);
        let b = random_density(d, rank, &mut rng);
        let c = gaussian_matrix(d, d, &mut rng);
        for alpha in LIEB_THIRRING_ALPHAS {
            let run = || -> Result<f64> {
                let cbc = &c * b.as_mat() * c.adjoint();
                let lhs: f64 = eigh(&cbc)?.eigenvalues.iter().map(|l| l.max(0.0).powf(alpha)).sum();
                let ctc = eigh(&(c.adjoint() * &c))?.map(|l| l.max(0.0).powf(alpha));
                let ba = eigh(b.as_mat())?.map(|l| l.max(0.0).powf(alpha));
                let rhs = (ctc * ba).trace().re;
                Ok((lhs - rhs) / rhs.abs().max(1.0))
            };
            match run() {
                Ok(v) => t.observe(v, || json!({"index": i, "seed": s0, "alpha": alpha})),
                Err(e) => t.error(&e, inst(s0, i)),
            }
        }
    }
    t.finish()
}

/// Triangle inequality and absolute homogeneity of Schatten norms.
pub fn schatten_norm_axioms(seed: u64) -> PropertyReport {
    let mut t = Tally::new(DIV, "schatten_norm_axioms", 1e-9);
    for i in 0..100 {
        let s0 = sub_seed(seed, t.name, i as u64);
        let mut rng = rng_from_seed(s0);
        let (r, c) = (2 + i % 3, 2 + (i / 3) % 3);
        let x = gaussian_matrix(r, c, &mut rng);
        let y = gaussian_matrix(r, c, &mut rng);
        let z = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        for alpha in [1.0, 1.5, 2.0, 3.0] {
            let run = || -> Result<f64> {
                let (nx, ny) = (schatten_norm(&x, alpha)?, schatten_norm(&y, alpha)?);
                let tri = schatten_norm(&(&x + &y), alpha)? - (nx + ny);
                let hom = (schatten_norm(&x.scale(1.0).map(|e| e * z), alpha)? - z.norm() * nx).abs();
                Ok(tri.max(hom) / (nx + ny).max(1.0))
            };
            match run() {
                Ok(v) => t.observe(v, || json!({"index": i, "seed": s0, "alpha": alpha})),
                Err(e) => t.error(&e, inst(s0, i)),
            }
        }
    }
    t.finish()
}

pub fn partial_trace_round_trip(seed: u64) -> PropertyReport {
    let mut t = Tally::new(DIV, "partial_trace_round_trip", 1e-12);
    for i in 0..50 {
        let s0 = sub_seed(seed, t.name, i as u64);
        let mut rng = rng_from_seed(s0);
        let (d1, d2) = (2 + i % 3, 2 + (i / 3) % 2);
        let a = random_density(d1, 1 + i % d1, &mut rng);
        let b = random_density(d2, d2, &mut rng);
        let joint = a.tensor(&b);
        let run = || -> Result<f64> {
            let ra = partial_trace(joint.op(), &[d1, d2], &[0])?;
            let rb = partial_trace(joint.op(), &[d1, d2], &[1])?;
            Ok(max_abs_entry(&(ra.as_mat() - a.as_mat())).max(max_abs_entry(&(rb.as_mat() - b.as_mat()))))
        };
        match run() {
            Ok(v) => t.observe(v, || inst(s0, i)),
            Err(e) => t.error(&e, inst(s0, i)),
        }
    }
    t.finish()
}

pub const MONOTONICITY_TRIPLES: usize = 200;

/// `D̃_α(N(ρ)‖N(σ)) − D̃_α(ρ‖σ) ≤ 1e-7`.
pub fn monotonicity(seed: u64) -> PropertyReport {
    let mut t = Tally::new(DIV, "monotonicity", 1e-7);
    for i in 0..MONOTONICITY_TRIPLES {
        let s0 = sub_seed(seed, "state_triples", i as u64);
        let run = |alpha: f64| -> Result<f64> {
            let (rho, sigma, ch) = state_triple(s0, i)?;
            let before = sandwiched_d(rho.op(), sigma.op(), alpha)?.value;
            let after = sandwiched_d(ch.apply(&rho)?.op(), ch.apply(&sigma)?.op(), alpha)?.value;
            Ok(after - before)
        };
        for alpha in MONOTONICITY_ALPHAS {
            match run(alpha) {
                Ok(v) => t.observe(v, || json!({"index": i, "seed": s0, "alpha": alpha})),
                Err(e) => t.error(&e, inst(s0, i)),
            }
        }
    }
    t.finish()
}

/// `D̃_α(ρ‖σ) − D_α(ρ‖σ) ≤ 1e-8` on the monotonicity corpus.
pub fn ordering(seed: u64) -> PropertyReport {
    let mut t = Tally::new(DIV, "ordering", 1e-8);
    for i in 0..MONOTONICITY_TRIPLES {
        let s0 = sub_seed(seed, "state_triples", i as u64);
        for alpha in MONOTONICITY_ALPHAS {
            let run = || -> Result<f64> {
                let (rho, sigma, _) = state_triple(s0, i)?;
                Ok(sandwiched_d(rho.op(), sigma.op(), alpha)?.value - renyi_d(rho.op(), sigma.op(), alpha)?.value)
            };
            match run() {
                Ok(v) => t.observe(v, || json!({"index": i, "seed": s0, "alpha": alpha})),
                Err(e) => t.error(&e, inst(s0, i)),
            }
        }
    }
    t.finish()
}

/// `−D̃_α(ρ‖σ) ≤ 1e-9` on the monotonicity corpus and its channel outputs.
pub fn positivity(seed: u64) -> PropertyReport {
    let mut t = Tally::new(DIV, "positivity", 1e-9);
    for i in 0..MONOTONICITY_TRIPLES {
        let s0 = sub_seed(seed, "state_triples", i as u64);
        for alpha in MONOTONICITY_ALPHAS {
            let run = || -> Result<f64> {
                let (rho, sigma, ch) = state_triple(s0, i)?;
                let a = sandwiched_d(rho.op(), sigma.op(), alpha)?.value;
                let b = sandwiched_d(ch.apply(&rho)?.op(), ch.apply(&sigma)?.op(), alpha)?.value;
                Ok(-a.min(b))
            };
            match run() {
                Ok(v) => t.observe(v, || json!({"index": i, "seed": s0, "alpha": alpha})),
                Err(e) => t.error(&e, inst(s0, i)),
            }
        }
    }
    t.finish()
}

/// `|D̃_α(ρ‖ρ)| ≤ 1e-10`, including rank-deficient `ρ`.
pub fn self_divergence(seed: u64) -> PropertyReport {
    let mut t = Tally::new(DIV, "self_divergence_zero", 1e-10);
    for i in 0..MONOTONICITY_TRIPLES {
        let s0 = sub_seed(seed, "state_triples", i as u64);
        for alpha in MONOTONICITY_ALPHAS {
            let run = || -> Result<f64> {
                let (rho, _, _) = state_triple(s0, i)?;
                Ok(sandwiched_d(rho.op(), rho.op(), alpha)?.value.abs())
            };
            match run() {
                Ok(v) => t.observe(v, || json!({"index": i, "seed": s0, "alpha": alpha})),
                Err(e) => t.error(&e, inst(s0, i)),
            }
        }
    }
    t.finish()
}

const MIXING: [f64; 8] = [0.0, 1e-9, 1e-7, 1e-5, 1e-3, 1e-2, 0.1, 1.0];

/// Pairs `(ρ, (1−t)ρ + tτ)` covering near-equal and distant states.
fn equality_pair(seed: u64, index: usize) -> (DensityMatrix, DensityMatrix) {
    let mut rng = rng_from_seed(seed);
    let d = 2 + index % 3;
    let rho = random_density(d, d, &mut rng);
    let tau = random_density(d, rng.random_range(1..=d), &mut rng);
    let t = MIXING[index % MIXING.len()];
    let sigma = DensityMatrix::normalized_unchecked(&(rho.as_mat().scale(1.0 - t) + tau.as_mat().scale(t)));
    (rho, sigma)
}

pub const EQUALITY_PAIRS: usize = 240;

/// Largest trace distance among pairs with `D̃_α ≤ 1e-6`.
pub fn equality_condition(seed: u64) -> PropertyReport {
    let mut t = Tally::new(DIV, "equality_condition", 1e-3);
    for i in 0..EQUALITY_PAIRS {
        let s0 = sub_seed(seed, "equality_pairs", i as u64);
        let (rho, sigma) = equality_pair(s0, i);
        for alpha in MONOTONICITY_ALPHAS {
            let run = || -> Result<f64> {
                let d = sandwiched_d(rho.op(), sigma.op(), alpha)?.value;
                if d <= 1e-6 {
                    trace_distance(rho.op(), sigma.op())
                } else {
                    Ok(0.0)
                }
            };
            match run() {
                Ok(v) => t.observe(v, || json!({"index": i, "seed": s0, "alpha": alpha})),
                Err(e) => t.error(&e, inst(s0, i)),
            }
        }
    }
    t.finish()
}

/// An IC-POVM separates every pair at trace distance ≥ 0.01.
pub fn ic_povm_distinguishes(seed: u64) -> PropertyReport {
    let mut t = Tally::counting(DIV, "ic_povm_distinguishes", 0);
    let povms = (2..=4)
        .map(|d| ic_povm(d, &mut rng_from_seed(sub_seed(seed, "ic_povm", d as u64))))
        .collect::<Result<Vec<_>>>();
    let povms = match povms {
        Ok(p) => p,
        Err(e) => {
            t.error(&e, json!({"seed": seed}));
            return t.finish();
        }
    };
    for i in 0..EQUALITY_PAIRS {
        let s0 = sub_seed(seed, "equality_pairs", i as u64);
        let (rho, sigma) = equality_pair(s0, i);
        match trace_distance(rho.op(), sigma.op()) {
            Ok(td) if td >= 0.01 => {
                let povm = &povms[rho.dim() - 2];
                let gap = povm
                    .probabilities(&rho)
                    .iter()
                    .zip(povm.probabilities(&sigma))
                    .map(|(p, q)| (p - q).abs())
                    .fold(0.0, f64::max);
                t.count(gap <= 1e-12, || json!({"index": i, "seed": s0, "trace_distance": td}));
            }
            Ok(_) => {}
            Err(e) => t.error(&e, inst(s0, i)),
        }
    }
    t.finish()
}

fn mixtures(seed: u64, index: usize) -> (Vec<f64>, Vec<DensityMatrix>, Vec<DensityMatrix>) {
    let mut rng = rng_from_seed(seed);
    let d = 2 + index % 2;
    let k = 2 + index % 3;
    let w: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
    let z: f64 = w.iter().sum();
    let p = w.iter().map(|x| x / z).collect();
    let a = (0..k).map(|_| random_density(d, rng.random_range(1..=d), &mut rng)).collect();
    let b = (0..k).map(|_| full_rank_density(d, &mut rng)).collect();
    (p, a, b)
}

fn mix(p: &[f64], xs: &[DensityMatrix]) -> DensityMatrix {
    let d = xs[0].dim();
    let mut m = Mat::zeros(d, d);
    for (pi, x) in p.iter().zip(xs) {
        m += x.as_mat().scale(*pi);
    }
    DensityMatrix::normalized_unchecked(&m)
}

/// `Q̃_α(ΣpA‖ΣpB) − Σp Q̃_α(A‖B) ≤ 1e-8` relative to `max(1, Σp Q̃)`.
pub fn joint_convexity(seed: u64) -> PropertyReport {
    let mut t = Tally::new(DIV, "joint_convexity", 1e-8);
    for i in 0..100 {
        let s0 = sub_seed(seed, "mixtures", i as u64);
        let (p, a, b) = mixtures(s0, i);
        for alpha in MONOTONICITY_ALPHAS {
            let run = || -> Result<f64> {
                let mut avg = 0.0;
                for ((pi, ai), bi) in p.iter().zip(&a).zip(&b) {
                    avg += pi * sandwiched_q(ai.op(), bi.op(), alpha)?.value;
                }
                let joint = sandwiched_q(mix(&p, &a).op(), mix(&p, &b).op(), alpha)?.value;
                Ok((joint - avg) / avg.max(1.0))
            };
            match run() {
                Ok(v) => t.observe(v, || json!({"index": i, "seed": s0, "alpha": alpha})),
                Err(e) => t.error(&e, inst(s0, i)),
            }
        }
    }
    t.finish()
}

/// `D̃_α(ΣpA‖ΣpB) − max_x D̃_α(A_x‖B_x) ≤ 1e-7`.
pub fn joint_quasi_convexity(seed: u64) -> PropertyReport {
    let mut t = Tally::new(DIV, "joint_quasi_convexity", 1e-7);
    for i in 0..100 {
        let s0 = sub_seed(seed, "mixtures", i as u64);
        let (p, a, b) = mixtures(s0, i);
        for alpha in MONOTONICITY_ALPHAS {
            let run = || -> Result<f64> {
                let mut top = f64::NEG_INFINITY;
                for (ai, bi) in a.iter().zip(&b) {
                    top = top.max(sandwiched_d(ai.op(), bi.op(), alpha)?.value);
                }
                Ok(sandwiched_d(mix(&p, &a).op(), mix(&p, &b).op(), alpha)?.value - top)
            };
            match run() {
                Ok(v) => t.observe(v, || json!({"index": i, "seed": s0, "alpha": alpha})),
                Err(e) => t.error(&e, inst(s0, i)),
            }
        }
    }
    t.finish()
}

pub const LIMIT_PAIRS: usize = 50;

/// Errors `|D̃_{1+h} − D|` at `h = 1e-2, 1e-3, 1e-4` for one full-rank qubit pair.
pub fn limit_errors(seed: u64) -> Result<(f64, [f64; 3])> {
    let mut rng = rng_from_seed(seed);
    let rho = full_rank_density(2, &mut rng);
    let sigma = full_rank_density(2, &mut rng);
    let d = vn_relative_entropy(rho.op(), sigma.op())?.value;
    let mut errs = [0.0; 3];
    for (k, h) in [1e-2, 1e-3, 1e-4].into_iter().enumerate() {
        errs[k] = (sandwiched_d(rho.op(), sigma.op(), 1.0 + h)?.value - d).abs();
    }
    Ok((d, errs))
}

/// Accuracy at `h = 1e-4`, strict improvement over `h = 1e-2`, and a
/// monotone decrease across the three step sizes.
pub fn limit(seed: u64) -> Vec<PropertyReport> {
    let mut acc = Tally::new(DIV, "limit_accuracy", 1e-3);
    let mut strict = Tally::counting(DIV, "limit_strict_improvement", 2);
    let mut mono = Tally::counting(DIV, "limit_monotone_decrease", 2);
    for i in 0..LIMIT_PAIRS {
        let s0 = sub_seed(seed, "limit_pairs", i as u64);
        match limit_errors(s0) {
            Ok((d, e)) => {
                let instance = || json!({"index": i, "seed": s0, "errors": e.iter().map(|x| num(*x)).collect::<Vec<_>>()});
                acc.observe(e[2] / (1.0 + d.abs()), instance);
                strict.count(!(e[2] < e[0]), instance);
                mono.count(!(e[0] > e[1] && e[1] > e[2]), instance);
            }
            Err(err) => {
                acc.error(&err, inst(s0, i));
                strict.error(&err, inst(s0, i));
                mono.error(&err, inst(s0, i));
            }
        }
    }
    vec![acc.finish(), strict.finish(), mono.finish()]
}

pub fn unitary_invariance(seed: u64) -> PropertyReport {
    let mut t = Tally::new(DIV, "unitary_invariance", 1e-9);
    for i in 0..50 {
        let s0 = sub_seed(seed, t.name, i as u64);
        let mut rng = rng_from_seed(s0);
        let d = 2 + i % 3;
        let rho = random_density(d, rng.random_range(1..=d), &mut rng);
        let sigma = full_rank_density(d, &mut rng);
        for alpha in MONOTONICITY_ALPHAS {
            let mut run = || -> Result<f64> {
                let u = KrausChannel::unitary(&unitary(d, &mut rng)?)?;
                let q = sandwiched_q(rho.op(), sigma.op(), alpha)?.value;
                let qu = sandwiched_q(u.apply(&rho)?.op(), u.apply(&sigma)?.op(), alpha)?.value;
                Ok((qu - q).abs() / q.max(1.0))
            };
            match run() {
                Ok(v) => t.observe(v, || json!({"index": i, "seed": s0, "alpha": alpha})),
                Err(e) => t.error(&e, inst(s0, i)),
            }
        }
    }
    t.finish()
}

pub fn tensor_multiplicativity(seed: u64) -> PropertyReport {
    let mut t = Tally::new(DIV, "tensor_multiplicativity", 1e-9);
    for i in 0..50 {
        let s0 = sub_seed(seed, t.name, i as u64);
        let mut rng = rng_from_seed(s0);
        let (d1, d2) = (2, 2 + i % 2);
        let r1 = random_density(d1, rng.random_range(1..=d1), &mut rng);
        let r2 = random_density(d2, rng.random_range(1..=d2), &mut rng);
        let s1 = full_rank_density(d1, &mut rng);
        let s2 = full_rank_density(d2, &mut rng);
        for alpha in MONOTONICITY_ALPHAS {
            let run = || -> Result<f64> {
                let q1 = sandwiched_q(r1.op(), s1.op(), alpha)?.value;
                let q2 = sandwiched_q(r2.op(), s2.op(), alpha)?.value;
                let q = sandwiched_q(r1.tensor(&r2).op(), s1.tensor(&s2).op(), alpha)?.value;
                Ok((q - q1 * q2).abs() / (q1 * q2).max(1.0))
            };
            match run() {
                Ok(v) => t.observe(v, || json!({"index": i, "seed": s0, "alpha": alpha})),
                Err(e) => t.error(&e, inst(s0, i)),
            }
        }
    }
    t.finish()
}

/// `−λ_min` of the partial transpose of `(N ⊗ id)(ρ₁₂)` for measure-prepare `N`.
pub fn measure_prepare_ppt(seed: u64) -> PropertyReport {
    let mut t = Tally::new(CHAN, "measure_prepare_ppt", 1e-9);
    for i in 0..50 {
        let s0 = sub_seed(seed, t.name, i as u64);
        let mut rng = rng_from_seed(s0);
        let mut run = || -> Result<f64> {
            let ch = random_measure_prepare(2, 2, &mut rng)?;
            let rho = random_density(4, rng.random_range(1..=4), &mut rng);
            let out = ch.tensor(&KrausChannel::identity(2)).apply(&rho)?;
            let pt = partial_transpose(out.as_mat(), &[2, 2], 0)?;
            Ok(-eigh(&pt)?.lambda_min())
        };
        match run() {
            Ok(v) => t.observe(v, || inst(s0, i)),
            Err(e) => t.error(&e, inst(s0, i)),
        }
    }
    t.finish()
}

fn sorted_spectrum(h: &HermitianOperator, len: usize) -> Result<Vec<f64>> {
    let mut v = h.eigh()?.eigenvalues;
    v.resize(len.max(v.len()), 0.0);
    v.sort_by(|a, b| b.total_cmp(a));
    Ok(v)
}

/// Choi spectra of `N^{cc}` and `N` agree.
pub fn complement_duality(seed: u64, extra: &[KrausChannel]) -> PropertyReport {
    let mut t = Tally::new(CHAN, "complement_duality", 1e-8);
    let check = |ch: &KrausChannel| -> Result<f64> {
        let a = ch.choi();
        let b = ch.complementary().complementary().choi();
        let len = a.dim().max(b.dim());
        let (sa, sb) = (sorted_spectrum(&a, len)?, sorted_spectrum(&b, len)?);
        Ok(sa.iter().zip(&sb).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
    };
    for i in 0..30 {
        let s0 = sub_seed(seed, t.name, i as u64);
        let mut rng = rng_from_seed(s0);
        let (din, dout): (usize, usize) = (2 + i % 2, 2 + (i / 2) % 2);
        let k = din.div_ceil(dout) + i % 3;
        match random_channel(din, dout, k, &mut rng).and_then(|ch| check(&ch)) {
            Ok(v) => t.observe(v, || inst(s0, i)),
            Err(e) => t.error(&e, inst(s0, i)),
        }
    }
    for (j, ch) in extra.iter().enumerate() {
        match check(ch) {
            Ok(v) => t.observe(v, || json!({"extra_channel": j})),
            Err(e) => t.error(&e, json!({"extra_channel": j})),
        }
    }
    t.finish()
}

/// Conjugating by `X` and then by `X⁻¹` restores the channel.
pub fn conjugation_recovery(seed: u64) -> PropertyReport {
    let mut t = Tally::new(CHAN, "conjugation_recovery", 1e-8);
    for i in 0..30 {
        let s0 = sub_seed(seed, t.name, i as u64);
        let mut rng = rng_from_seed(s0);
        let (din, dout) = (2 + i % 2, 2 + (i / 2) % 2);
        let mut run = || -> Result<f64> {
            let ch = random_channel(din, dout, din.div_ceil(dout) + 1, &mut rng)?;
            let x = HermitianOperator::symmetrized(
                &(full_rank_density(dout, &mut rng).as_mat() + Mat::identity(dout, dout).scale(0.1)),
            );
            let xinv = fractional_power(&x, -1.0, SUPPORT_TOL)?;
            let back = ch.conjugated_by(&x)?.conjugated_by(&xinv)?;
            let mut worst: f64 = 0.0;
            for r in 0..din {
                for c in 0..din {
                    let mut e = Mat::zeros(din, din);
                    e[(r, c)] = Complex64::new(1.0, 0.0);
                    worst = worst.max(max_abs_entry(&(back.apply_mat(&e) - ch.apply_mat(&e))));
                }
            }
            Ok(worst)
        };
        match run() {
            Ok(v) => t.observe(v, || inst(s0, i)),
            Err(e) => t.error(&e, inst(s0, i)),
        }
    }
    t.finish()
}

/// A qubit Hadamard channel: generalized dephasing with random environment states.
pub fn random_hadamard<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<KrausChannel> {
    let env: Vec<_> = (0..d).map(|_| random_unit_vector(d, rng)).collect();
    generalized_dephasing(&env)
}

/// `Tr_F ∘ M_0` equals the original Hadamard channel on every matrix unit.
pub fn smooth_hadamard_reduces(seed: u64) -> PropertyReport {
    let mut t = Tally::new(CHAN, "smooth_hadamard_reduces", 1e-8);
    for i in 0..10 {
        let s0 = sub_seed(seed, t.name, i as u64);
        let mut rng = rng_from_seed(s0);
        let mut run = || -> Result<f64> {
            let nh = random_hadamard(2, &mut rng)?;
            let m0 = smooth_hadamard(&nh, 0.0)?;
            let (db, din) = (nh.dim_out(), nh.dim_in());
            let df = m0.dim_out() / db;
            let mut worst: f64 = 0.0;
            for r in 0..din {
                for c in 0..din {
                    let mut e = Mat::zeros(din, din);
                    e[(r, c)] = Complex64::new(1.0, 0.0);
                    let reduced = partial_trace_mat(&m0.apply_mat(&e), &[db, df], &[0])?;
                    worst = worst.max(max_abs_entry(&(reduced - nh.apply_mat(&e))));
                }
            }
            Ok(worst)
        };
        match run() {
            Ok(v) => t.observe(v, || inst(s0, i)),
            Err(e) => t.error(&e, inst(s0, i)),
        }
    }
    t.finish()
}

/// PPT verdicts at `2 ⊗ 2`: measure-prepare maps and smoothed Hadamard
/// complements are EB, unitary channels are not.
pub fn eb_verdicts(seed: u64) -> PropertyReport {
    let mut t = Tally::counting(CHAN, "eb_verdicts", 0);
    for i in 0..30 {
        let s0 = sub_seed(seed, t.name, i as u64);
        let mut rng = rng_from_seed(s0);
        let mut run = || -> Result<bool> {
            let mp = random_measure_prepare(2, 2, &mut rng)?.eb_verdict()? == EbVerdict::Yes;
            let u = KrausChannel::unitary(&unitary(2, &mut rng)?)?.eb_verdict()? == EbVerdict::No;
            let smooth = smooth_hadamard(&random_hadamard(2, &mut rng)?, 0.1)?
                .complementary()
                .eb_verdict()?
                == EbVerdict::Yes;
            Ok(mp && u && smooth)
        };
        match run() {
            Ok(ok) => t.count(!ok, || inst(s0, i)),
            Err(e) => t.error(&e, inst(s0, i)),
        }
    }
    t.finish()
}

pub const LEMMA_ALPHAS: [f64; 2] = [1.3, 2.0];
pub const LEMMA_CHANNELS: usize = 20;

/// The `i`-th random qubit channel of the lemma corpus.
pub fn lemma_channel(seed: u64, index: usize) -> Result<KrausChannel> {
    random_channel(2, 2, 1 + index % 4, &mut rng_from_seed(sub_seed(seed, "lemma_channels", index as u64)))
}

fn lemma_cfg(seed: u64, index: usize) -> OptimizerConfig {
    OptimizerConfig::default().with_seed(sub_seed(seed, "lemma_cfg", index as u64))
}

/// `|χ̃_α − K̃_α|` from the ensemble and minimax optimizers, together with
/// minimax consistency at `σ*` and the maximally-mixed bound.
pub fn lemma_equality(seed: u64, extra: &[KrausChannel]) -> Vec<PropertyReport> {
    let mut eq = Tally::new(LEMMA, "lemma_equality", 1e-3);
    let mut cons = Tally::new(LEMMA, "minimax_consistency", 1e-9);
    let mut cov = Tally::new(LEMMA, "maximally_mixed_bound", 1e-6);
    let mut channels: Vec<(Value, Result<KrausChannel>)> = (0..LEMMA_CHANNELS)
        .map(|i| (json!({"index": i, "seed": seed}), lemma_channel(seed, i)))
        .collect();
    channels.extend(extra.iter().enumerate().map(|(j, ch)| (json!({"extra_channel": j}), Ok(ch.clone()))));
    for (i, (tag, ch)) in channels.into_iter().enumerate() {
        let ch = match ch {
            Ok(ch) => ch,
            Err(e) => {
                eq.error(&e, tag);
                continue;
            }
        };
        let cfg = lemma_cfg(seed, i);
        for alpha in LEMMA_ALPHAS {
            let mut tagged = tag.clone();
            tagged["alpha"] = json!(alpha);
            let k = match info_radius(&ch, alpha, &cfg) {
                Ok(k) => k,
                Err(e) => {
                    eq.error(&e, tagged);
                    continue;
                }
            };
            match alpha_holevo(&ch, alpha, &cfg) {
                Ok(h) => eq.observe((h.value - k.value).abs(), || {
                    let mut v = tagged.clone();
                    v["chi_tilde"] = num(h.value);
                    v["k_tilde"] = num(k.value);
                    v
                }),
                Err(e) => eq.error(&e, tagged.clone()),
            }
            match info_radius_around(&ch, &k.sigma_star, alpha, &cfg.with_seed(cfg.seed ^ 1)) {
                Ok(again) => cons.observe((again.value - k.value).abs() - k.gap_estimate, || tagged.clone()),
                Err(e) => cons.error(&e, tagged.clone()),
            }
            match covariant_radius_bound(&ch, alpha, &cfg) {
                Ok(b) => cov.observe(k.value - b, || tagged.clone()),
                Err(e) => cov.error(&e, tagged.clone()),
            }
        }
    }
    vec![eq.finish(), cons.finish(), cov.finish()]
}

/// `K̃_α` of qubit depolarizing channels is non-increasing in `p`.
pub fn depolarizing_ordering(seed: u64) -> PropertyReport {
    let mut t = Tally::new(LEMMA, "depolarizing_ordering", 1e-7);
    let cfg = OptimizerConfig::default().with_seed(sub_seed(seed, "depolarizing_ordering", 0));
    let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
    for alpha in LEMMA_ALPHAS {
        let vals: Result<Vec<f64>> = grid
            .iter()
            .map(|&p| Ok(info_radius(&depolarizing(2, p)?, alpha, &cfg)?.value))
            .collect();
        match vals {
            Ok(v) => {
                for k in 1..v.len() {
                    t.observe(v[k] - v[k - 1], || json!({"alpha": alpha, "p": grid[k]}));
                }
            }
            Err(e) => t.error(&e, json!({"alpha": alpha})),
        }
    }
    t.finish()
}

/// EB channels used by the gap-bound and chain properties.
pub fn eb_corpus(seed: u64, random: usize) -> Result<Vec<(String, KrausChannel)>> {
    let mut out = vec![
        ("pinching".to_string(), pinching(&Mat::identity(2, 2))?),
        ("depolarizing_0.75".to_string(), depolarizing(2, 0.75)?),
    ];
    for k in 0..random {
        let s = sub_seed(seed, "eb_corpus", k as u64);
        out.push((format!("measure_prepare_{k}"), random_measure_prepare(2, 2, &mut rng_from_seed(s))?));
    }
    Ok(out)
}

/// `K̃_α ≤ χ + 4(α−1)(log₂c)²` at `α` halfway into the admissible window.
pub fn gap_bound(seed: u64) -> PropertyReport {
    let mut t = Tally::new(LEMMA, "radius_gap_bound", 1e-3);
    let corpus = match eb_corpus(seed, 4) {
        Ok(c) => c,
        Err(e) => {
            t.error(&e, json!({"seed": seed}));
            return t.finish();
        }
    };
    for (i, (name, ch)) in corpus.iter().enumerate() {
        let cfg = OptimizerConfig::default().with_seed(sub_seed(seed, "radius_gap_bound", i as u64));
        let run = || -> Result<(f64, f64)> {
            let cap = holevo_capacity(ch, &cfg)?;
            let c = c_constant_at(ch, &cap.sigma_star, &cfg)?.value;
            let l = c.log2();
            let alpha = 1.0 + 0.5 * 3f64.log2() / (4.0 * l);
            let k = info_radius(ch, alpha, &cfg)?.value;
            Ok((k - cap.value - 4.0 * (alpha - 1.0) * l * l, alpha))
        };
        match run() {
            Ok((v, alpha)) => t.observe(v, || json!({"channel": name, "alpha": alpha})),
            Err(e) => t.error(&e, json!({"channel": name})),
        }
    }
    t.finish()
}

pub const SUBADDITIVITY_ALPHAS: [f64; 2] = [1.5, 2.0];
pub const SUBADDITIVITY_PAIRS: usize = 10;

/// The `i`-th pair: a qubit measure-prepare channel and an arbitrary qubit channel.
pub fn subadditivity_pair(seed: u64, index: usize) -> Result<(KrausChannel, KrausChannel)> {
    let mut rng = rng_from_seed(sub_seed(seed, "subadditivity_pairs", index as u64));
    let eb = random_measure_prepare(2, 2, &mut rng)?;
    let other = random_channel(2, 2, 2, &mut rng)?;
    Ok((eb, other))
}

/// Entangled-input radius of `N_EB ⊗ N` around `σ₁* ⊗ σ₂*` minus `K̃₁ + K̃₂`.
pub fn eb_subadditivity(seed: u64) -> PropertyReport {
    let mut t = Tally::new(SUB, "eb_subadditivity", 1e-4);
    for i in 0..SUBADDITIVITY_PAIRS {
        for alpha in SUBADDITIVITY_ALPHAS {
            let cfg = OptimizerConfig::default().with_seed(sub_seed(seed, "eb_subadditivity", i as u64));
            let run = || -> Result<f64> {
                let (a, b) = subadditivity_pair(seed, i)?;
                Ok(subadditivity_gap(&a, &b, alpha, &cfg)?.gap)
            };
            match run() {
                Ok(v) => t.observe(v, || json!({"index": i, "seed": seed, "alpha": alpha})),
                Err(e) => t.error(&e, json!({"index": i, "seed": seed, "alpha": alpha})),
            }
        }
    }
    t.finish()
}

pub const NU_PAIRS: usize = 5;

/// Relative gap between `ν_α(M₁ ⊗ M₂)` and `ν_α(M₁) ν_α(M₂)`.
pub fn nu_relative_gap(m1: &KrausChannel, m2: &KrausChannel, alpha: f64, cfg: &OptimizerConfig) -> Result<f64> {
    let a = max_output_alpha_norm(m1, alpha, cfg)?.value;
    let b = max_output_alpha_norm(m2, alpha, cfg)?.value;
    let joint_cfg = cfg.with_restarts(cfg.restarts.max(crate::capacity::ENTANGLED_RESTARTS));
    let j = max_output_alpha_norm(&m1.tensor(m2), alpha, &joint_cfg)?.value;
    Ok((j - a * b).abs() / (a * b))
}

/// `ν_2` multiplicativity for EB ⊗ arbitrary pairs and for their complements.
pub fn nu_multiplicativity(seed: u64) -> Vec<PropertyReport> {
    let mut direct = Tally::new(SUB, "nu_multiplicativity_eb", 1e-3);
    let mut comp = Tally::new(SUB, "nu_multiplicativity_complements", 1e-3);
    for i in 0..NU_PAIRS {
        let cfg = OptimizerConfig::default().with_seed(sub_seed(seed, "nu_multiplicativity", i as u64));
        let instance = json!({"index": i, "seed": seed, "alpha": 2.0});
        let (a, b) = match subadditivity_pair(seed ^ 0x6e75, i) {
            Ok(p) => p,
            Err(e) => {
                direct.error(&e, instance.clone());
                comp.error(&e, instance);
                continue;
            }
        };
        match nu_relative_gap(&a, &b, 2.0, &cfg) {
            Ok(v) => direct.observe(v, || instance.clone()),
            Err(e) => direct.error(&e, instance.clone()),
        }
        match nu_relative_gap(&a.complementary(), &b.complementary(), 2.0, &cfg) {
            Ok(v) => comp.observe(v, || instance.clone()),
            Err(e) => comp.error(&e, instance.clone()),
        }
    }
    vec![direct.finish(), comp.finish()]
}

/// `K̃_α^{[σ⊗σ]}(N⊗N) − 2 K̃_α^{[σ]}(N)` for Hadamard `N`, counted only where
/// the complement of `X ∘ N` with `X = σ^{(1−α)/2α}` is certified EB.
pub fn hadamard_fixed_sigma(seed: u64) -> PropertyReport {
    let mut t = Tally::new(SUB, "hadamard_fixed_sigma", 1e-4);
    for i in 0..5 {
        let s0 = sub_seed(seed, t.name, i as u64);
        let cfg = OptimizerConfig::default().with_seed(s0);
        for alpha in [1.1, 1.5] {
            for (which, random_sigma) in [("sigma_star", false), ("random_full_rank", true)] {
                let instance = json!({"index": i, "seed": s0, "alpha": alpha, "sigma": which});
                let run = || -> Result<Option<f64>> {
                    let mut rng = rng_from_seed(s0);
                    let nh = random_hadamard(2, &mut rng)?;
                    let sigma = if random_sigma {
                        full_rank_density(2, &mut rng)
                    } else {
                        holevo_capacity(&nh, &cfg)?.sigma_star
                    };
                    let x = fractional_power(sigma.op(), (1.0 - alpha) / (2.0 * alpha), SUPPORT_TOL)?;
                    if nh.conjugated_by(&x)?.complementary().eb_verdict()? != EbVerdict::Yes {
                        return Ok(None);
                    }
                    let r = crate::capacity::fixed_sigma_subadditivity_gap(&nh, &sigma, alpha, &cfg)?;
                    Ok(Some(r.gap))
                };
                match run() {
                    Ok(Some(v)) => t.observe(v, || instance.clone()),
                    Ok(None) => {}
                    Err(e) => t.error(&e, instance.clone()),
                }
            }
        }
    }
    t.finish()
}

pub const CHAIN_MARGINS: [f64; 2] = [0.1, 0.5];

/// `eb_exponent_bound` on the EB corpus at `R = χ + 0.1` and `χ + 0.5`, then
/// `bound(2n) = bound(n)²` and monotonicity in `n` on the same numbers.
pub fn eb_chain(seed: u64) -> Vec<PropertyReport> {
    let mut steps = Tally::counting(CONV, "eb_chain_steps", 0);
    let mut doubling = Tally::new(CONV, "bound_doubling", 1e-12);
    let mut mono = Tally::new(CONV, "bound_monotone_in_n", 0.0);
    let corpus = match eb_corpus(seed, 3) {
        Ok(c) => c,
        Err(e) => {
            steps.error(&e, json!({"seed": seed}));
            return vec![steps.finish(), doubling.finish(), mono.finish()];
        }
    };
    for (i, (name, ch)) in corpus.iter().enumerate() {
        let cfg = OptimizerConfig::default().with_seed(sub_seed(seed, "eb_chain", i as u64));
        let chi = match holevo_capacity(ch, &cfg) {
            Ok(c) => c.value,
            Err(e) => {
                steps.error(&e, json!({"channel": name}));
                continue;
            }
        };
        for margin in CHAIN_MARGINS {
            let rate = chi + margin;
            let instance = json!({"channel": name, "rate": rate});
            let r = match eb_exponent_bound(ch, 10, rate, &cfg) {
                Ok(r) => r,
                Err(e) => {
                    steps.error(&e, instance);
                    continue;
                }
            };
            steps.count(r.chain.len() != 5 || !r.chain_holds(), || {
                let mut v = instance.clone();
                v["steps"] = json!(r.chain.iter().map(|s| json!({"name": s.name, "slack": num(s.slack()), "holds": s.holds})).collect::<Vec<_>>());
                v
            });
            let inputs = ChainInputs {
                chi: r.components["chi"],
                c: r.components["c"],
                k_tilde: r.components["k_tilde"],
                chi_tilde: r.components["chi_tilde"],
            };
            let mut prev = f64::INFINITY;
            for n in 1..=64 {
                match (
                    eb_chain_report(n, rate, r.alpha_used, inputs),
                    eb_chain_report(2 * n, rate, r.alpha_used, inputs),
                ) {
                    (Ok(a), Ok(b)) => {
                        doubling.observe((b.p_succ_bound - a.p_succ_bound.powi(2)).abs(), || {
                            let mut v = instance.clone();
                            v["n"] = json!(n);
                            v
                        });
                        mono.observe(a.p_succ_bound - prev, || {
                            let mut v = instance.clone();
                            v["n"] = json!(n);
                            v
                        });
                        prev = a.p_succ_bound;
                    }
                    (Err(e), _) | (_, Err(e)) => doubling.error(&e, instance.clone()),
                }
            }
        }
    }
    vec![steps.finish(), doubling.finish(), mono.finish()]
}

/// The `α = 1 + 1/√n` exponent vanishes at `n* = (4 (log₂c)²/(R−χ))²`.
pub fn sqrt_threshold(seed: u64) -> PropertyReport {
    let mut t = Tally::new(CONV, "sqrt_n_threshold", 1e-12);
    let mut rng = rng_from_seed(sub_seed(seed, "sqrt_n_threshold", 0));
    for i in 0..200 {
        let chi: f64 = rng.random_range(0.0..2.0);
        let rate = chi + rng.random_range(0.05..2.0);
        let c: f64 = rng.random_range(3.0..10.0);
        let nstar = sqrt_n_threshold(rate, chi, c);
        t.observe(sqrt_n_total_exponent(nstar, rate, chi, c).abs(), || {
            json!({"index": i, "rate": rate, "chi": chi, "c": c})
        });
    }
    t.finish()
}

/// The displayed guarantee `χ + (α−1)(log₂c)² ≤ (R+χ)/2` and the stronger
/// `χ + 4(α−1)(log₂c)² ≤ (R+χ)/2` that the chain relies on.
pub fn alpha_rule(seed: u64) -> Vec<PropertyReport> {
    let mut g = Tally::new(CONV, "choose_alpha_guarantee", 0.0);
    let mut g4 = Tally::new(CONV, "choose_alpha_gap_term", 1e-12);
    let mut rng = rng_from_seed(sub_seed(seed, "choose_alpha", 0));
    for i in 0..1000 {
        let chi: f64 = rng.random_range(0.0..3.0);
        let rate = chi + 10f64.powf(rng.random_range(-4.0..1.5));
        let c = 1.0 + 10f64.powf(rng.random_range(-1.0..2.0));
        let instance = || json!({"index": i, "rate": rate, "chi": chi, "c": c});
        match choose_alpha(rate, chi, c) {
            Ok(alpha) => {
                let l2 = c.log2().powi(2);
                let half = 0.5 * (rate + chi);
                g.observe(chi + (alpha - 1.0) * l2 - half, instance);
                g4.observe((chi + 4.0 * (alpha - 1.0) * l2 - half) / half.max(1.0), instance);
            }
            Err(e) => {
                g.error(&e, instance());
                g4.error(&e, instance());
            }
        }
    }
    vec![g.finish(), g4.finish()]
}

/// `δ̃_α(ε‖1−2^{−nR}) ≥ (α/(α−1)) log₂(1−ε) + nR` on a 1000-point grid.
pub fn delta_lower_bound(seed: u64) -> PropertyReport {
    let _ = seed;
    let mut t = Tally::new(CONV, "delta_lower_bound", 1e-9);
    for n in 1..=5u32 {
        for rate in [0.25, 0.5, 1.0, 1.5] {
            for alpha in [1.05, 1.1, 1.5, 1.8, 2.0] {
                let top = 1.0 - (-(n as f64) * rate).exp2();
                for k in 0..10 {
                    let eps = top * k as f64 / 9.0;
                    let instance = || json!({"n": n, "rate": rate, "alpha": alpha, "eps": eps});
                    match binary_cq_divergence(eps, n, rate, alpha) {
                        Ok(lhs) => {
                            let rhs = alpha / (alpha - 1.0) * (1.0 - eps).log2() + n as f64 * rate;
                            t.observe((rhs - lhs) / rhs.abs().max(1.0), instance);
                        }
                        Err(e) => t.error(&e, instance()),
                    }
                }
            }
        }
    }
    t.finish()
}

pub const DOMINANCE_ALPHAS: [f64; 3] = [1.1, 1.5, 2.0];
pub const DOMINANCE_CODEBOOKS: usize = 20;

/// Every sampled codebook's exact PGM success probability stays below
/// `generic_bound(n, R_eff, n K̃_α, α)`. Rates whose message count rounds
/// below two use the two-message code.
pub fn simulation_dominance(seed: u64) -> PropertyReport {
    let mut t = Tally::new(CONV, "simulation_dominance", 1e-9);
    let channels = [("pinching", pinching(&Mat::identity(2, 2))), ("depolarizing_0.75", depolarizing(2, 0.75))];
    let basis = || -> Result<crate::channels::Ensemble> {
        crate::channels::Ensemble::uniform(vec![DensityMatrix::basis(2, 0)?, DensityMatrix::basis(2, 1)?])
    };
    for (ci, (name, ch)) in channels.into_iter().enumerate() {
        let cfg = OptimizerConfig::default().with_seed(sub_seed(seed, "simulation_dominance", ci as u64));
        let prep = || -> Result<(KrausChannel, f64, Vec<f64>)> {
            let ch = ch?;
            let chi = holevo_capacity(&ch, &cfg)?.value;
            let radii = DOMINANCE_ALPHAS
                .iter()
                .map(|&a| Ok(info_radius(&ch, a, &cfg)?.value))
                .collect::<Result<Vec<_>>>()?;
            Ok((ch, chi, radii))
        };
        let (ch, chi, radii) = match prep() {
            Ok(x) => x,
            Err(e) => {
                t.error(&e, json!({"channel": name}));
                continue;
            }
        };
        for n in 2..=4usize {
            for margin in [0.2, 0.5] {
                let mut rate = chi + margin;
                if ((n as f64) * rate).exp2().round() < 2.0 {
                    rate = 1.0 / n as f64;
                }
                let instance = json!({"channel": name, "n": n, "rate": rate});
                let s = sub_seed(seed, "codebooks", (ci * 100 + n * 10) as u64 + (margin * 10.0) as u64);
                let run = || -> Result<(Vec<f64>, f64)> {
                    let spec = CodeSpec::new(n, rate, basis()?, s)?;
                    let sim = simulate_code(&ch, &spec, DOMINANCE_CODEBOOKS)?;
                    Ok((sim.per_codebook, sim.effective_rate))
                };
                match run() {
                    Ok((probs, r_eff)) => {
                        for (a, k) in DOMINANCE_ALPHAS.iter().zip(&radii) {
                            let bound = match generic_bound(n, r_eff, n as f64 * k, *a) {
                                Ok(b) => b.p_succ_bound,
                                Err(e) => {
                                    t.error(&e, instance.clone());
                                    continue;
                                }
                            };
                            for (j, p) in probs.iter().enumerate() {
                                t.observe(p - bound, || {
                                    let mut v = instance.clone();
                                    v["alpha"] = json!(a);
                                    v["codebook"] = json!(j);
                                    v["seed"] = json!(s);
                                    v
                                });
                            }
                        }
                    }
                    Err(e) => t.error(&e, instance),
                }
            }
        }
    }
    t.finish()
}
