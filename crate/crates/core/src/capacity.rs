//! Channel quantities: information radii, α-Holevo information, the Holevo
//! capacity, the constant `c(N)` and subadditivity gaps.

use crate::channels::{DensityMatrix, EbVerdict, Ensemble, KrausChannel};
use crate::divergences::{min_output_renyi, DivergenceKind};
use crate::linalg::{CVec, Mat, SUPPORT_TOL};
use crate::optimize::{self, Around, OptimizerConfig};
use crate::{Error, Result};

/// Restart floor for searches over entangled inputs on product channels.
pub const ENTANGLED_RESTARTS: usize = 50;

/// A minimax or fixed-`σ` radius with the optimizer's diagnostics.
#[derive(Clone, Debug)]
pub struct RadiusResult {
    /// Inner maximum evaluated at `sigma_star`, in bits.
    pub value: f64,
    pub sigma_star: DensityMatrix,
    /// Pure input attaining `value`.
    pub worst_input: DensityMatrix,
    pub restarts_used: usize,
    pub converged: bool,
    /// Distance between `value` and the certified lower bound of the dual problem.
    pub gap_estimate: f64,
    /// Weighted inputs of the final finite dual problem (minimax results only).
    pub ensemble: Option<Ensemble>,
}

pub(crate) fn check_alpha_window(alpha: f64) -> Result<()> {
    if !(alpha > 1.0 && alpha <= 2.0) {
        return Err(Error::Domain(format!("alpha must lie in (1, 2], got {alpha}")));
    }
    Ok(())
}

fn require_tp(ch: &KrausChannel) -> Result<()> {
    if !ch.is_trace_preserving() {
        return Err(Error::NotTracePreserving(ch.tp_defect()));
    }
    Ok(())
}

/// `max_ψ D(N(ψ)‖σ)` for any of the supported divergences.
pub fn radius_around(ch: &KrausChannel, sigma: &DensityMatrix, kind: DivergenceKind, cfg: &OptimizerConfig) -> Result<RadiusResult> {
    require_tp(ch)?;
    if sigma.dim() != ch.dim_out() {
        return Err(Error::DimensionMismatch {
            expected: ch.dim_out(),
            found: sigma.dim(),
        });
    }
    let around = Around::new(kind, sigma.as_mat())?;
    let search = optimize::maximize_pure(ch, &around, cfg)?;
    Ok(RadiusResult {
        value: around.to_bits(search.value),
        sigma_star: sigma.clone(),
        worst_input: DensityMatrix::pure(&search.argmax)?,
        restarts_used: search.restarts_used,
        converged: search.converged,
        gap_estimate: 0.0,
        ensemble: None,
    })
}

/// `K̃_α^{[σ]}(N) = max_ρ D̃_α(N(ρ)‖σ)`; `+∞` when some output leaves the support of `σ`.
pub fn info_radius_around(ch: &KrausChannel, sigma: &DensityMatrix, alpha: f64, cfg: &OptimizerConfig) -> Result<RadiusResult> {
    check_alpha_window(alpha)?;
    radius_around(ch, sigma, DivergenceKind::Sandwiched(alpha), cfg)
}

fn minimax_result(ch: &KrausChannel, kind: DivergenceKind, cfg: &OptimizerConfig) -> Result<RadiusResult> {
    require_tp(ch)?;
    let out = optimize::minimax(ch, kind, cfg)?;
    Ok(RadiusResult {
        value: out.value,
        sigma_star: DensityMatrix::normalized_unchecked(&out.sigma),
        worst_input: DensityMatrix::pure(&out.worst_input)?,
        restarts_used: out.restarts_used,
        converged: out.converged,
        gap_estimate: (out.value - out.lower).max(0.0),
        ensemble: dual_ensemble(&out.weights, &out.inputs)?,
    })
}

fn dual_ensemble(weights: &[f64], inputs: &[CVec]) -> Result<Option<Ensemble>> {
    let kept: Vec<usize> = (0..weights.len()).filter(|&k| weights[k] > 0.0).collect();
    if kept.is_empty() {
        return Ok(None);
    }
    let z: f64 = kept.iter().map(|&k| weights[k]).sum();
    let states = kept.iter().map(|&k| DensityMatrix::pure(&inputs[k])).collect::<Result<Vec<_>>>()?;
    Ok(Some(Ensemble::new(kept.iter().map(|&k| weights[k] / z).collect(), states)?))
}

/// `K̃_α(N) = min_σ max_ρ D̃_α(N(ρ)‖σ)`.
pub fn info_radius(ch: &KrausChannel, alpha: f64, cfg: &OptimizerConfig) -> Result<RadiusResult> {
    check_alpha_window(alpha)?;
    minimax_result(ch, DivergenceKind::Sandwiched(alpha), cfg)
}

/// `χ̃_α` of a fixed ensemble pushed through `ch`: the inner minimum over `σ` of
/// `(1/(α−1)) log₂ Σ_x p(x) Q̃_α(N(ρ_x)‖σ)`.
pub fn alpha_holevo_of_ensemble(ens: &Ensemble, ch: &KrausChannel, alpha: f64) -> Result<f64> {
    check_alpha_window(alpha)?;
    require_tp(ch)?;
    if ens.dim() != ch.dim_in() {
        return Err(Error::DimensionMismatch {
            expected: ch.dim_in(),
            found: ens.dim(),
        });
    }
    let atoms: Vec<Mat> = ens.states().iter().map(|s| ch.apply_mat(s.as_mat())).collect();
    let d = ch.dim_out();
    let mut warm = Mat::zeros(d, d);
    for (p, a) in ens.probs().iter().zip(&atoms) {
        warm += a.scale(*p);
    }
    let sol = optimize::factor_descent_sigma(&optimize::roots(&atoms)?, ens.probs(), alpha, &warm, 5000)?;
    Ok(sol.objective)
}

/// An optimized input ensemble.
#[derive(Clone, Debug)]
pub struct HolevoEnsemble {
    pub value: f64,
    pub ensemble: Ensemble,
    pub sigma: DensityMatrix,
    pub converged: bool,
}

/// `χ̃_α(N)`: maximum of [`alpha_holevo_of_ensemble`] over ensembles of at most
/// `d²` pure states.
pub fn alpha_holevo(ch: &KrausChannel, alpha: f64, cfg: &OptimizerConfig) -> Result<HolevoEnsemble> {
    check_alpha_window(alpha)?;
    require_tp(ch)?;
    let m = ch.dim_in() * ch.dim_in();
    let out = optimize::ensemble_ascent(ch, alpha, m, cfg)?;
    let states = out
        .inputs
        .iter()
        .map(DensityMatrix::pure)
        .collect::<Result<Vec<_>>>()?;
    let total: f64 = out.probs.iter().sum();
    let probs = out.probs.iter().map(|p| p / total).collect();
    Ok(HolevoEnsemble {
        value: out.value,
        ensemble: Ensemble::new(probs, states)?,
        sigma: DensityMatrix::normalized_unchecked(&out.sigma),
        converged: out.converged,
    })
}

/// `χ_D(N)` for the chosen divergence. The sandwiched case is [`alpha_holevo`];
/// the traditional and von Neumann cases use the minimax form.
pub fn generalized_holevo(ch: &KrausChannel, kind: DivergenceKind, cfg: &OptimizerConfig) -> Result<f64> {
    match kind {
        DivergenceKind::Sandwiched(alpha) => Ok(alpha_holevo(ch, alpha, cfg)?.value),
        DivergenceKind::Traditional(alpha) => {
            check_alpha_window(alpha)?;
            Ok(minimax_result(ch, kind, cfg)?.value)
        }
        DivergenceKind::VonNeumann => Ok(minimax_result(ch, kind, cfg)?.value),
    }
}

/// Holevo capacity `χ(N) = min_σ max_ρ D(N(ρ)‖σ)` with its optimal `σ*`.
pub fn holevo_capacity(ch: &KrausChannel, cfg: &OptimizerConfig) -> Result<RadiusResult> {
    minimax_result(ch, DivergenceKind::VonNeumann, cfg)
}

/// The constant `c(N)` with the quantities it was computed from.
#[derive(Clone, Debug)]
pub struct CConstant {
    pub value: f64,
    /// `max_ρ D_{3/2}(N(ρ)‖σ*)`.
    pub d_three_halves: f64,
    pub sigma_star: DensityMatrix,
    pub argmax: DensityMatrix,
    pub converged: bool,
}

/// `c(N) = max_ρ 2^{D_{3/2}(N(ρ)‖σ*)/2} + 2` with `σ*` from [`holevo_capacity`].
pub fn c_constant(ch: &KrausChannel, cfg: &OptimizerConfig) -> Result<CConstant> {
    let cap = holevo_capacity(ch, cfg)?;
    c_constant_at(ch, &cap.sigma_star, cfg)
}

/// `c(N)` evaluated at a given `σ*`.
pub fn c_constant_at(ch: &KrausChannel, sigma_star: &DensityMatrix, cfg: &OptimizerConfig) -> Result<CConstant> {
    let r = radius_around(ch, sigma_star, DivergenceKind::Traditional(1.5), cfg)?;
    if !r.value.is_finite() {
        return Err(Error::Unbounded(format!(
            "an output escapes the support of sigma* (support tolerance {SUPPORT_TOL:e})"
        )));
    }
    Ok(CConstant {
        value: (0.5 * r.value).exp2() + 2.0,
        d_three_halves: r.value,
        sigma_star: sigma_star.clone(),
        argmax: r.worst_input,
        converged: r.converged,
    })
}

/// `log₂ d − H_α^min(N)`, the radius around the maximally mixed output.
pub fn covariant_radius_bound(ch: &KrausChannel, alpha: f64, cfg: &OptimizerConfig) -> Result<f64> {
    let h = min_output_renyi(ch, alpha, cfg)?;
    Ok((ch.dim_out() as f64).log2() - h.value)
}

/// Entangled-input comparison of `N₁ ⊗ N₂` against the single-copy radii.
#[derive(Clone, Debug)]
pub struct SubadditivityReport {
    /// `joint − (k1 + k2)`; positive values beyond tolerance contradict subadditivity.
    pub gap: f64,
    pub joint: RadiusResult,
    pub k1: RadiusResult,
    pub k2: RadiusResult,
}

/// `max_ψ D̃_α((N₁⊗N₂)(ψ)‖σ₁*⊗σ₂*) − [K̃_α(N₁) + K̃_α(N₂)]` over entangled `ψ`.
pub fn subadditivity_gap(ch1: &KrausChannel, ch2: &KrausChannel, alpha: f64, cfg: &OptimizerConfig) -> Result<SubadditivityReport> {
    let k1 = info_radius(ch1, alpha, cfg)?;
    let k2 = info_radius(ch2, alpha, &cfg.with_seed(cfg.seed.wrapping_add(1)))?;
    let sigma = k1.sigma_star.tensor(&k2.sigma_star);
    let joint_cfg = cfg
        .with_restarts(cfg.restarts.max(ENTANGLED_RESTARTS))
        .with_seed(cfg.seed.wrapping_add(2));
    let joint = info_radius_around(&ch1.tensor(ch2), &sigma, alpha, &joint_cfg)?;
    Ok(SubadditivityReport {
        gap: joint.value - (k1.value + k2.value),
        joint,
        k1,
        k2,
    })
}

/// Two-copy radius around `σ ⊗ σ` compared with twice the single-copy radius.
#[derive(Clone, Debug)]
pub struct FixedSigmaReport {
    pub gap: f64,
    pub single: RadiusResult,
    pub joint: RadiusResult,
    /// PPT verdict on the complement; a Hadamard channel needs `Yes`.
    pub complement_eb: EbVerdict,
}

/// `K̃_α^{[σ⊗σ]}(N⊗N) − 2 K̃_α^{[σ]}(N)` for a Hadamard channel `N`.
pub fn fixed_sigma_subadditivity_gap(
    ch: &KrausChannel,
    sigma: &DensityMatrix,
    alpha: f64,
    cfg: &OptimizerConfig,
) -> Result<FixedSigmaReport> {
    let complement_eb = ch.complementary().eb_verdict()?;
    let single = info_radius_around(ch, sigma, alpha, cfg)?;
    if !single.value.is_finite() {
        return Err(Error::Unbounded("an output escapes the support of sigma".into()));
    }
    let joint_cfg = cfg
        .with_restarts(cfg.restarts.max(ENTANGLED_RESTARTS))
        .with_seed(cfg.seed.wrapping_add(1));
    let joint = info_radius_around(&ch.tensor(ch), &sigma.tensor(sigma), alpha, &joint_cfg)?;
    Ok(FixedSigmaReport {
        gap: joint.value - 2.0 * single.value,
        single,
        joint,
        complement_eb,
    })
}
