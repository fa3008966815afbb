//! Rényi-type divergences, entropies and output norms. Every value is in bits.

use crate::channels::{DensityMatrix, KrausChannel};
use crate::linalg::{
    eigh, fractional_power, schatten_from_values, support_contained_spec, HermitianOperator, Mat, Spectrum,
    SUPPORT_TOL,
};
use crate::optimize::{self, NormPower, OptimizerConfig, PureSearch, VonNeumannNegEntropy};
use crate::{Error, Result};

/// A divergence value in bits, or `+∞` when the support condition fails.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DivergenceValue {
    pub value: f64,
    pub support_ok: bool,
}

impl DivergenceValue {
    pub fn finite(value: f64) -> Self {
        Self {
            value,
            support_ok: true,
        }
    }

    pub fn infinite() -> Self {
        Self {
            value: f64::INFINITY,
            support_ok: false,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

/// Selects one of the divergences a channel quantity can be built from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DivergenceKind {
    Sandwiched(f64),
    Traditional(f64),
    VonNeumann,
}

impl DivergenceKind {
    pub fn evaluate(&self, a: &HermitianOperator, b: &HermitianOperator) -> Result<DivergenceValue> {
        match *self {
            DivergenceKind::Sandwiched(alpha) => sandwiched_d(a, b, alpha),
            DivergenceKind::Traditional(alpha) => renyi_d(a, b, alpha),
            DivergenceKind::VonNeumann => vn_relative_entropy(a, b),
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match *self {
            DivergenceKind::Sandwiched(a) | DivergenceKind::Traditional(a) => Some(a),
            DivergenceKind::VonNeumann => None,
        }
    }
}

pub(crate) fn check_alpha_above_one(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 1.0) {
        return Err(Error::Domain(format!("alpha must be a finite value above 1, got {alpha}")));
    }
    Ok(())
}

fn check_pair(a: &HermitianOperator, b: &HermitianOperator) -> Result<(Spectrum, Spectrum)> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: b.dim(),
            found: a.dim(),
        });
    }
    let sa = a.eigh()?;
    sa.check_psd(SUPPORT_TOL)?;
    let sb = b.eigh()?;
    sb.check_psd(SUPPORT_TOL)?;
    Ok((sa, sb))
}

/// `Tr{(Γ A Γ)^α}` for a precomputed `Γ = B^{(1−α)/2α}`; the support check is the caller's.
pub(crate) fn sandwiched_q_raw(a: &Mat, gamma: &Mat, alpha: f64) -> Result<f64> {
    let inner = gamma * a * gamma;
    let s = eigh(&inner)?;
    Ok(s.eigenvalues.iter().map(|&l| l.max(0.0).powf(alpha)).sum())
}

/// `B^{(1−α)/2α}` as a pseudo-power on the support of `B`.
pub(crate) fn sandwich_factor(sb: &Spectrum, alpha: f64) -> Mat {
    let t = (1.0 - alpha) / (2.0 * alpha);
    sb.map_on_support(SUPPORT_TOL, |l| l.powf(t))
}

/// Sandwiched quasi-relative entropy `Q̃_α(A‖B) = Tr{(B^{(1−α)/2α} A B^{(1−α)/2α})^α}`.
pub fn sandwiched_q(a: &HermitianOperator, b: &HermitianOperator, alpha: f64) -> Result<DivergenceValue> {
    check_alpha_above_one(alpha)?;
    let (_, sb) = check_pair(a, b)?;
    if !support_contained_spec(a.as_mat(), &sb, SUPPORT_TOL)? {
        return Ok(DivergenceValue::infinite());
    }
    let gamma = sandwich_factor(&sb, alpha);
    Ok(DivergenceValue::finite(sandwiched_q_raw(a.as_mat(), &gamma, alpha)?))
}

/// Sandwiched Rényi relative entropy `D̃_α(A‖B) = log₂ Q̃_α(A‖B) / (α − 1)`.
pub fn sandwiched_d(a: &HermitianOperator, b: &HermitianOperator, alpha: f64) -> Result<DivergenceValue> {
    let q = sandwiched_q(a, b, alpha)?;
    if !q.support_ok {
        return Ok(q);
    }
    Ok(DivergenceValue::finite(q.value.log2() / (alpha - 1.0)))
}

/// `Tr{A^α B^{1−α}}` with both powers taken on supports.
fn renyi_trace(sa: &Spectrum, sb: &Spectrum, alpha: f64) -> f64 {
    let a_pow = sa.map_on_support(SUPPORT_TOL, |l| l.powf(alpha));
    let b_pow = sb.map_on_support(SUPPORT_TOL, |l| l.powf(1.0 - alpha));
    (a_pow * b_pow).trace().re
}

/// Traditional Rényi relative entropy `log₂ Tr{A^α B^{1−α}} / (α − 1)` for `α > 1`,
/// with the support clause of the sandwiched definition.
pub fn renyi_d(a: &HermitianOperator, b: &HermitianOperator, alpha: f64) -> Result<DivergenceValue> {
    check_alpha_above_one(alpha)?;
    renyi_d_any(a, b, alpha)
}

/// Traditional Rényi relative entropy for any `α ∈ (0, 1) ∪ (1, ∞)`.
///
/// For `α < 1` there is no support clause; the value is `+∞` only when
/// `Tr{A^α B^{1−α}} = 0`.
pub fn renyi_d_any(a: &HermitianOperator, b: &HermitianOperator, alpha: f64) -> Result<DivergenceValue> {
    if !(alpha.is_finite() && alpha > 0.0 && alpha != 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0,1) or (1,inf), got {alpha}")));
    }
    let (sa, sb) = check_pair(a, b)?;
    if alpha > 1.0 && !support_contained_spec(a.as_mat(), &sb, SUPPORT_TOL)? {
        return Ok(DivergenceValue::infinite());
    }
    let tr = renyi_trace(&sa, &sb, alpha);
    if tr <= 0.0 {
        return Ok(DivergenceValue::infinite());
    }
    Ok(DivergenceValue::finite(tr.log2() / (alpha - 1.0)))
}

/// Von Neumann relative entropy `Tr{A log A} − Tr{A log B}` on supports.
pub fn vn_relative_entropy(a: &HermitianOperator, b: &HermitianOperator) -> Result<DivergenceValue> {
    let (sa, sb) = check_pair(a, b)?;
    if !support_contained_spec(a.as_mat(), &sb, SUPPORT_TOL)? {
        return Ok(DivergenceValue::infinite());
    }
    let thr_a = sa.support_threshold(SUPPORT_TOL);
    let a_log_a: f64 = sa
        .eigenvalues
        .iter()
        .filter(|&&l| l > thr_a)
        .map(|&l| l * l.log2())
        .sum();
    let log_b = sb.map_on_support(SUPPORT_TOL, f64::log2);
    let a_log_b = (a.as_mat() * log_b).trace().re;
    Ok(DivergenceValue::finite(a_log_a - a_log_b))
}

fn check_distribution(p: &[f64]) -> Result<()> {
    if p.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::Domain("probabilities must be finite and non-negative".into()));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::Domain(format!("probabilities sum to {total}")));
    }
    Ok(())
}

/// Classical Rényi divergence `log₂ Σ p^α q^{1−α} / (α − 1)`; `α = 1` gives the
/// Kullback–Leibler divergence.
pub fn classical_renyi(p: &[f64], q: &[f64], alpha: f64) -> Result<DivergenceValue> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: q.len(),
            found: p.len(),
        });
    }
    check_distribution(p)?;
    check_distribution(q)?;
    let escapes = p.iter().zip(q).any(|(&pi, &qi)| pi > 0.0 && qi == 0.0);
    if alpha >= 1.0 && escapes {
        return Ok(DivergenceValue::infinite());
    }
    if alpha == 1.0 {
        let kl = p
            .iter()
            .zip(q)
            .filter(|(&pi, _)| pi > 0.0)
            .map(|(&pi, &qi)| pi * (pi / qi).log2())
            .sum();
        return Ok(DivergenceValue::finite(kl));
    }
    let sum: f64 = p
        .iter()
        .zip(q)
        .filter(|(&pi, &qi)| pi > 0.0 && qi > 0.0)
        .map(|(&pi, &qi)| pi.powf(alpha) * qi.powf(1.0 - alpha))
        .sum();
    if sum <= 0.0 {
        return Ok(DivergenceValue::infinite());
    }
    Ok(DivergenceValue::finite(sum.log2() / (alpha - 1.0)))
}

/// `δ̃_α(ε ‖ 1 − 2^{−nR})`, the divergence between the binary distributions
/// `(ε, 1 − ε)` and `(1 − 2^{−nR}, 2^{−nR})`, evaluated by log-sum-exp.
pub fn binary_cq_divergence(eps: f64, n: u32, rate: f64, alpha: f64) -> Result<f64> {
    check_alpha_above_one(alpha)?;
    if !(rate.is_finite() && rate >= 0.0) {
        return Err(Error::Domain(format!("rate must be non-negative, got {rate}")));
    }
    let nr = n as f64 * rate;
    let tail = (-nr).exp2();
    let head = 1.0 - tail;
    if !(0.0..=1.0).contains(&eps) || eps > head + 1e-12 {
        return Err(Error::Domain(format!(
            "eps = {eps} must lie in [0, 1 - 2^(-nR)] = [0, {head}]"
        )));
    }
    // log₂(1 − 2^{−nR}) without cancellation.
    let log_head = (-tail).ln_1p() / std::f64::consts::LN_2;
    let t1 = if eps == 0.0 {
        f64::NEG_INFINITY
    } else {
        alpha * eps.log2() + (1.0 - alpha) * log_head
    };
    let t2 = if eps == 1.0 {
        f64::NEG_INFINITY
    } else {
        alpha * (1.0 - eps).log2() + (1.0 - alpha) * (-nr)
    };
    let m = t1.max(t2);
    let lse = m + ((t1 - m).exp2() + (t2 - m).exp2()).log2();
    Ok(lse / (alpha - 1.0))
}

/// `‖X^{1/2} A X^{1/2}‖_α` for PSD `X`.
pub fn sandwiched_alpha_norm(a: &HermitianOperator, x: &HermitianOperator, alpha: f64) -> Result<f64> {
    if alpha.is_nan() || alpha < 1.0 {
        return Err(Error::Domain(format!("alpha must be at least 1, got {alpha}")));
    }
    if a.dim() != x.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: a.dim(),
        });
    }
    let root = fractional_power(x, 0.5, SUPPORT_TOL)?;
    let inner = root.as_mat() * a.as_mat() * root.as_mat();
    let s = eigh(&inner)?;
    Ok(schatten_from_values(s.eigenvalues.into_iter(), alpha))
}

/// Rényi entropy `log₂ Tr{ρ^α} / (1 − α)`; `α = 1` gives the von Neumann entropy.
pub fn renyi_entropy(rho: &DensityMatrix, alpha: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    let s = rho.op().eigh()?;
    Ok(entropy_from_values(&s.eigenvalues, alpha))
}

pub(crate) fn entropy_from_values(values: &[f64], alpha: f64) -> f64 {
    let pos = values.iter().map(|l| l.max(0.0)).filter(|&l| l > 0.0);
    if alpha == 1.0 {
        -pos.map(|l| l * l.log2()).sum::<f64>()
    } else {
        pos.map(|l| l.powf(alpha)).sum::<f64>().log2() / (1.0 - alpha)
    }
}

/// Maximum output α-norm with its optimizer diagnostics.
#[derive(Clone, Debug)]
pub struct OutputNorm {
    pub value: f64,
    pub search: PureSearch,
}

/// `ν_α(M) = max_ψ ‖M(ψ)‖_α` over pure inputs for a completely positive map.
pub fn max_output_alpha_norm(map: &KrausChannel, alpha: f64, cfg: &OptimizerConfig) -> Result<OutputNorm> {
    if !(alpha.is_finite() && alpha >= 1.0) {
        return Err(Error::Domain(format!("alpha must be finite and at least 1, got {alpha}")));
    }
    let search = optimize::maximize_pure(map, &NormPower { alpha }, cfg)?;
    Ok(OutputNorm {
        value: search.value.max(0.0).powf(1.0 / alpha),
        search,
    })
}

/// Minimum output Rényi entropy with its optimizer diagnostics.
#[derive(Clone, Debug)]
pub struct MinOutputEntropy {
    pub value: f64,
    pub search: PureSearch,
}

/// `H_α^min(N) = min_ψ H_α(N(ψ))`; for `α > 1` this is `(α/(1−α)) log₂ ν_α(N)`.
pub fn min_output_renyi(ch: &KrausChannel, alpha: f64, cfg: &OptimizerConfig) -> Result<MinOutputEntropy> {
    if !(alpha.is_finite() && alpha >= 1.0) {
        return Err(Error::Domain(format!("alpha must be finite and at least 1, got {alpha}")));
    }
    if !ch.is_trace_preserving() {
        return Err(Error::NotTracePreserving(ch.tp_defect()));
    }
    if alpha == 1.0 {
        let search = optimize::maximize_pure(ch, &VonNeumannNegEntropy, cfg)?;
        return Ok(MinOutputEntropy {
            value: -search.value,
            search,
        });
    }
    let search = optimize::maximize_pure(ch, &NormPower { alpha }, cfg)?;
    Ok(MinOutputEntropy {
        value: search.value.log2() / (1.0 - alpha),
        search,
    })
}

/// `H_α^min` recovered from `ν_α` through `(α/(1−α)) log₂ ν_α`.
pub fn min_entropy_from_norm(nu: f64, alpha: f64) -> f64 {
    alpha / (1.0 - alpha) * nu.log2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{completely_depolarizing, depolarizing, random_density, rng_from_seed};
    use crate::linalg::{c, CVec};

    fn plus() -> HermitianOperator {
        let v = CVec::from_vec(vec![c(1.0), c(1.0)]).normalize();
        HermitianOperator::outer(&v)
    }

    fn diag(v: &[f64]) -> HermitianOperator {
        HermitianOperator::diagonal(v)
    }

    #[test]
    fn sandwiched_q_examples() {
        let mut rng = rng_from_seed(1);
        let rho = random_density(3, 2, &mut rng);
        let q = sandwiched_q(rho.op(), rho.op(), 1.5).unwrap();
        assert!((q.value - 1.0).abs() < 1e-10);
        let q = sandwiched_q(&diag(&[1.0, 0.0]), &diag(&[0.5, 0.5]), 2.0).unwrap();
        assert!((q.value - 2.0).abs() < 1e-12);
        assert!(sandwiched_q(&plus(), &diag(&[0.5, 0.5]), 1.0).is_err());
    }

    /// Closed form for the sandwiched quantity of `|+⟩⟨+|` against `diag(a, b)`:
    /// the inner operator is rank one, `Γ|+⟩⟨+|Γ` with
    /// `⟨+|Γ²|+⟩ = (a^{2t} + b^{2t})/2`, `t = (1−α)/2α`.
    fn plus_against_diag(a: f64, b: f64, alpha: f64) -> f64 {
        let t = (1.0 - alpha) / (2.0 * alpha);
        (0.5 * (a.powf(2.0 * t) + b.powf(2.0 * t))).powf(alpha)
    }

    #[test]
    fn sandwiched_q_plus_state() {
        let sigma = diag(&[2.0 / 3.0, 1.0 / 3.0]);
        let q = sandwiched_q(&plus(), &sigma, 2.0).unwrap().value;
        // At α = 2: (½(3/2)^{1/2} + ½·3^{1/2})² = (3/2 + 3 + 2·(9/2)^{1/2})/4.
        let oracle = (1.5 + 3.0 + 2.0 * 4.5f64.sqrt()) / 4.0;
        assert!((q - oracle).abs() <= 1e-10 * oracle);
        assert!((q - plus_against_diag(2.0 / 3.0, 1.0 / 3.0, 2.0)).abs() < 1e-12);

        let d = sandwiched_d(&plus(), &sigma, 2.0).unwrap().value;
        let d_trad = renyi_d(&plus(), &sigma, 2.0).unwrap().value;
        assert!((d - oracle.log2()).abs() < 1e-10);
        assert!(d < d_trad);
        // Traditional: Tr{ρ² σ^{-1}} = ⟨+|σ^{-1}|+⟩ = (3/2 + 3)/2.
        assert!((d_trad - 2.25f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn sandwiched_d_examples() {
        let mut rng = rng_from_seed(2);
        for alpha in [1.1, 1.5, 2.0] {
            let rho = random_density(2, 2, &mut rng);
            assert!(sandwiched_d(rho.op(), rho.op(), alpha).unwrap().value.abs() < 1e-10);
            let d = sandwiched_d(&diag(&[1.0, 0.0]), &diag(&[0.5, 0.5]), alpha).unwrap();
            assert!((d.value - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn support_failures_are_infinite() {
        let a = diag(&[1.0, 0.0]);
        let b = diag(&[0.0, 1.0]);
        for v in [
            sandwiched_d(&a, &b, 1.5).unwrap(),
            renyi_d(&a, &b, 1.5).unwrap(),
            vn_relative_entropy(&a, &b).unwrap(),
        ] {
            assert!(!v.support_ok);
            assert_eq!(v.value, f64::INFINITY);
        }
        let near = diag(&[0.99, 0.01]);
        assert!(sandwiched_d(&a, &near, 1.5).unwrap().support_ok);
    }

    #[test]
    fn renyi_examples() {
        let mut rng = rng_from_seed(3);
        let rho = random_density(3, 3, &mut rng);
        assert!(renyi_d(rho.op(), rho.op(), 1.7).unwrap().value.abs() < 1e-10);
        let d = renyi_d(&diag(&[1.0, 0.0]), &diag(&[0.5, 0.5]), 1.5).unwrap();
        assert!((d.value - 1.0).abs() < 1e-12);
        for _ in 0..5 {
            let p = random_density(3, 3, &mut rng);
            let q = random_density(3, 3, &mut rng);
            let pd: Vec<f64> = (0..3).map(|i| p.as_mat()[(i, i)].re).collect();
            let qd: Vec<f64> = (0..3).map(|i| q.as_mat()[(i, i)].re).collect();
            let fid: f64 = pd.iter().zip(&qd).map(|(a, b)| (a * b).sqrt()).sum();
            let d = renyi_d_any(&diag(&pd), &diag(&qd), 0.5).unwrap().value;
            assert!((d + 2.0 * fid.log2()).abs() < 1e-12);
        }
        assert!(renyi_d(&diag(&[1.0, 0.0]), &diag(&[0.5, 0.5]), 0.5).is_err());
        assert!(renyi_d_any(&diag(&[1.0, 0.0]), &diag(&[0.5, 0.5]), 1.0).is_err());
    }

    #[test]
    fn vn_examples() {
        let mut rng = rng_from_seed(4);
        let rho = random_density(2, 2, &mut rng);
        assert!(vn_relative_entropy(rho.op(), rho.op()).unwrap().value.abs() < 1e-12);
        let d = vn_relative_entropy(&diag(&[1.0, 0.0]), &diag(&[0.5, 0.5])).unwrap();
        assert!((d.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn classical_examples() {
        let p = [0.2, 0.3, 0.5];
        assert!(classical_renyi(&p, &p, 1.4).unwrap().value.abs() < 1e-14);
        let d = classical_renyi(&[1.0, 0.0], &[0.5, 0.5], 3.0).unwrap();
        assert!((d.value - 1.0).abs() < 1e-12);
        let q = [0.1, 0.6, 0.3];
        let direct = classical_renyi(&p, &q, 1.8).unwrap().value;
        let embedded = renyi_d(&diag(&p), &diag(&q), 1.8).unwrap().value;
        assert!((direct - embedded).abs() < 1e-12);
        assert!(!classical_renyi(&[0.5, 0.5], &[1.0, 0.0], 2.0).unwrap().support_ok);
        assert!(classical_renyi(&p, &q, 0.0).is_err());
    }

    #[test]
    fn binary_examples() {
        for alpha in [1.2, 2.0] {
            let v = binary_cq_divergence(0.0, 3, 0.7, alpha).unwrap();
            assert!((v - 2.1).abs() < 1e-12);
            let head = 1.0 - (-2.1f64).exp2();
            let v = binary_cq_divergence(head, 3, 0.7, alpha).unwrap();
            assert!(v.abs() < 1e-12);
        }
        // n = 2, R = 1, ε = ½, α = 2: log₂[(1/4)(3/4)^{-1} + (1/4)(1/4)^{-1}] = log₂(4/3).
        let v = binary_cq_divergence(0.5, 2, 1.0, 2.0).unwrap();
        assert!((v - (4.0f64 / 3.0).log2()).abs() < 1e-12);
        assert!(v > 0.0);
        assert!(binary_cq_divergence(0.9, 2, 1.0, 2.0).is_err());
    }

    #[test]
    fn alpha_norm_examples() {
        let mut rng = rng_from_seed(5);
        let a = random_density(3, 3, &mut rng);
        let direct = crate::linalg::schatten_norm(a.as_mat(), 1.7).unwrap();
        let via = sandwiched_alpha_norm(a.op(), &HermitianOperator::identity(3), 1.7).unwrap();
        assert!((direct - via).abs() < 1e-12);

        for alpha in [1.5, 2.0] {
            let rho = random_density(2, 2, &mut rng);
            let sigma = random_density(2, 2, &mut rng);
            let x = fractional_power(sigma.op(), (1.0 - alpha) / alpha, SUPPORT_TOL).unwrap();
            let norm = sandwiched_alpha_norm(rho.op(), &x, alpha).unwrap();
            let d = sandwiched_d(rho.op(), sigma.op(), alpha).unwrap().value;
            assert!((alpha / (alpha - 1.0) * norm.log2() - d).abs() < 1e-9);
        }
        let half = HermitianOperator::identity(2).scaled(0.5);
        let x = fractional_power(&half, -0.5, SUPPORT_TOL).unwrap();
        assert!(sandwiched_alpha_norm(&half, &x, 2.0).unwrap().log2().abs() < 1e-12);
    }

    #[test]
    fn output_norm_examples() {
        let cfg = OptimizerConfig::default();
        for alpha in [1.5, 2.0, 3.0] {
            let id = max_output_alpha_norm(&KrausChannel::identity(2), alpha, &cfg).unwrap();
            assert!((id.value - 1.0).abs() < 1e-9);
            let dep = max_output_alpha_norm(&completely_depolarizing(2), alpha, &cfg).unwrap();
            assert!((dep.value - 2f64.powf((1.0 - alpha) / alpha)).abs() < 1e-9);
        }
        let half = depolarizing(2, 0.5).unwrap();
        let nu = max_output_alpha_norm(&half, 2.0, &cfg).unwrap();
        assert!((nu.value - (0.75f64.powi(2) + 0.25f64.powi(2)).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn min_entropy_examples() {
        let cfg = OptimizerConfig::default();
        for alpha in [1.0, 1.5, 2.0] {
            let id = min_output_renyi(&KrausChannel::identity(2), alpha, &cfg).unwrap();
            assert!(id.value.abs() < 1e-8);
            let dep = min_output_renyi(&completely_depolarizing(3), alpha, &cfg).unwrap();
            assert!((dep.value - 3f64.log2()).abs() < 1e-9);
        }
        let half = depolarizing(2, 0.5).unwrap();
        for alpha in [1.5, 2.0] {
            let h = min_output_renyi(&half, alpha, &cfg).unwrap().value;
            let nu = max_output_alpha_norm(&half, alpha, &cfg).unwrap().value;
            assert!((h - min_entropy_from_norm(nu, alpha)).abs() < 1e-8);
        }
    }

    #[test]
    fn entropy_of_states() {
        let rho = DensityMatrix::maximally_mixed(4);
        for alpha in [0.5, 1.0, 2.0] {
            assert!((renyi_entropy(&rho, alpha).unwrap() - 2.0).abs() < 1e-12);
        }
        let pure = DensityMatrix::basis(3, 1).unwrap();
        assert!(renyi_entropy(&pure, 1.0).unwrap().abs() < 1e-12);
    }
}
