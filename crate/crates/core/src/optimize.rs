//! Optimizers shared by the divergence and capacity modules.
//!
//! * [`maximize_pure`]: ascent over pure inputs for objectives convex in the
//!   input state. Each step moves to the top eigenvector of the pulled-back
//!   gradient, which never decreases a convex objective.
//! * [`minimax`]: `min_σ max_ψ D(N(ψ)‖σ)` by column generation. A finite set of
//!   inputs is kept; the finite problem is solved in its dual form (weights over
//!   the set, inner minimum over `σ`), the worst input at the resulting `σ` is
//!   added, and the loop stops once the certified dual lower bound and the
//!   evaluated inner maximum agree.
//! * [`ensemble_ascent`]: direct maximization over ensembles of pure states with
//!   an inner minimization over `σ` in a square-root parametrization. It shares
//!   no iteration logic with [`minimax`].

use rand::Rng;

use crate::channels::{random_unit_vector, rng_from_seed, KrausChannel};
use crate::divergences::DivergenceKind;
use crate::linalg::{
    c, eigh, frechet, support_contained_spec, top_eigenvector, CVec, HermitianOperator, Mat, Spectrum, SUPPORT_TOL,
};
use crate::{Error, Result};

/// Eigenvalue floor inside logarithms of channel outputs.
const LOG_FLOOR: f64 = 1e-30;

/// Seeds, restart counts and tolerances for every optimizer in the crate.
#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerConfig {
    /// Random restarts for pure-state searches (the computational basis is always tried as well).
    pub restarts: usize,
    /// Relative improvement below which a local ascent stops.
    pub inner_tol: f64,
    /// Target gap, in bits, between the upper and lower minimax estimates.
    pub outer_tol: f64,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 8,
            inner_tol: 1e-12,
            outer_tol: 1e-7,
            max_iters: 500,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Domain("restarts must be at least 1".into()));
        }
        if !(self.inner_tol > 0.0 && self.outer_tol > 0.0) {
            return Err(Error::Domain("tolerances must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::Domain("max_iters must be at least 1".into()));
        }
        Ok(())
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    pub fn with_restarts(&self, restarts: usize) -> Self {
        Self {
            restarts,
            ..self.clone()
        }
    }
}

/// A function of a channel output together with its gradient in the output.
pub(crate) trait OutputObjective {
    fn value(&self, out: &Mat) -> Result<f64>;
    fn gradient(&self, out: &Mat) -> Result<Mat>;
}

fn clipped(s: &Spectrum) -> Vec<f64> {
    s.eigenvalues.iter().map(|l| l.max(0.0)).collect()
}

/// `Tr{X^α}`.
pub(crate) struct NormPower {
    pub alpha: f64,
}

impl OutputObjective for NormPower {
    fn value(&self, out: &Mat) -> Result<f64> {
        let s = eigh(out)?;
        Ok(clipped(&s).iter().map(|l| l.powf(self.alpha)).sum())
    }

    fn gradient(&self, out: &Mat) -> Result<Mat> {
        let s = eigh(out)?;
        let a = self.alpha;
        Ok(s.map(|l| a * l.max(0.0).powf(a - 1.0)))
    }
}

/// `Tr{X log₂ X}`.
pub(crate) struct VonNeumannNegEntropy;

impl OutputObjective for VonNeumannNegEntropy {
    fn value(&self, out: &Mat) -> Result<f64> {
        let s = eigh(out)?;
        Ok(clipped(&s)
            .iter()
            .filter(|&&l| l > 0.0)
            .map(|&l| l * l.log2())
            .sum())
    }

    fn gradient(&self, out: &Mat) -> Result<Mat> {
        let shift = std::f64::consts::LOG2_E;
        Ok(eigh(out)?.map(|l| l.max(LOG_FLOOR).log2() + shift))
    }
}

/// A divergence of the output from a fixed `σ`, in the form that is convex in
/// the output: `Q̃_α`, `Tr{X^α σ^{1−α}}` or `D(X‖σ)`.
pub(crate) struct Around {
    kind: DivergenceKind,
    spec: Spectrum,
    /// `σ^{(1−α)/2α}`, `σ^{1−α}` or `log₂ σ` depending on `kind`.
    factor: Mat,
}

impl Around {
    pub fn new(kind: DivergenceKind, sigma: &Mat) -> Result<Self> {
        let spec = eigh(sigma)?;
        spec.check_psd(SUPPORT_TOL)?;
        let factor = match kind {
            DivergenceKind::Sandwiched(a) => spec.map_on_support(SUPPORT_TOL, |l| l.powf((1.0 - a) / (2.0 * a))),
            DivergenceKind::Traditional(a) => spec.map_on_support(SUPPORT_TOL, |l| l.powf(1.0 - a)),
            DivergenceKind::VonNeumann => spec.map_on_support(SUPPORT_TOL, f64::log2),
        };
        Ok(Self { kind, spec, factor })
    }

    /// The raw convex objective in divergence units (bits).
    pub fn to_bits(&self, raw: f64) -> f64 {
        match self.kind {
            DivergenceKind::Sandwiched(a) | DivergenceKind::Traditional(a) => raw.log2() / (a - 1.0),
            DivergenceKind::VonNeumann => raw,
        }
    }
}

impl OutputObjective for Around {
    fn value(&self, out: &Mat) -> Result<f64> {
        if !support_contained_spec(out, &self.spec, SUPPORT_TOL)? {
            return Ok(f64::INFINITY);
        }
        match self.kind {
            DivergenceKind::Sandwiched(a) => {
                let inner = &self.factor * out * &self.factor;
                Ok(clipped(&eigh(&inner)?).iter().map(|l| l.powf(a)).sum())
            }
            DivergenceKind::Traditional(a) => {
                let pow = eigh(out)?.map(|l| l.max(0.0).powf(a));
                Ok((pow * &self.factor).trace().re)
            }
            DivergenceKind::VonNeumann => {
                let neg_entropy = VonNeumannNegEntropy.value(out)?;
                Ok(neg_entropy - (out * &self.factor).trace().re)
            }
        }
    }

    fn gradient(&self, out: &Mat) -> Result<Mat> {
        match self.kind {
            DivergenceKind::Sandwiched(a) => {
                let inner = &self.factor * out * &self.factor;
                let pow = eigh(&inner)?.map(|l| a * l.max(0.0).powf(a - 1.0));
                Ok(&self.factor * pow * &self.factor)
            }
            DivergenceKind::Traditional(a) => {
                let s = eigh(out)?;
                Ok(frechet(
                    &s,
                    |x| x.max(0.0).powf(a),
                    |x| a * x.max(0.0).powf(a - 1.0),
                    &self.factor,
                ))
            }
            DivergenceKind::VonNeumann => Ok(VonNeumannNegEntropy.gradient(out)? - &self.factor),
        }
    }
}

/// Result of a multistart search over pure inputs.
#[derive(Clone, Debug)]
pub struct PureSearch {
    /// Best objective value found (in the objective's own units).
    pub value: f64,
    pub argmax: CVec,
    pub restarts_used: usize,
    /// Whether the ascent that produced `value` met its stopping rule.
    pub converged: bool,
    pub iterations: usize,
    /// Distinct local maxima, best first.
    pub(crate) local_maxima: Vec<(f64, CVec)>,
}

struct Ascent {
    value: f64,
    psi: CVec,
    iterations: usize,
    converged: bool,
}

fn ascend<O: OutputObjective>(ch: &KrausChannel, obj: &O, mut psi: CVec, cfg: &OptimizerConfig) -> Result<Ascent> {
    let mut out = ch.apply_pure(&psi);
    let mut f = obj.value(&out)?;
    if !f.is_finite() {
        return Ok(Ascent {
            value: f,
            psi,
            iterations: 0,
            converged: true,
        });
    }
    for it in 0..cfg.max_iters {
        let g = ch.adjoint_mat(&obj.gradient(&out)?);
        let (_, v) = top_eigenvector(&g)?;
        let out_new = ch.apply_pure(&v);
        let f_new = obj.value(&out_new)?;
        if !f_new.is_finite() {
            return Ok(Ascent {
                value: f_new,
                psi: v,
                iterations: it + 1,
                converged: true,
            });
        }
        let improved = f_new > f;
        let small = f_new - f <= cfg.inner_tol * (1.0 + f.abs());
        if improved {
            psi = v;
            out = out_new;
            f = f_new;
        }
        if small {
            return Ok(Ascent {
                value: f,
                psi,
                iterations: it + 1,
                converged: true,
            });
        }
    }
    Ok(Ascent {
        value: f,
        psi,
        iterations: cfg.max_iters,
        converged: false,
    })
}

fn fidelity(a: &CVec, b: &CVec) -> f64 {
    a.dotc(b).norm_sqr()
}

/// Multistart ascent from the computational basis, any `extra` starts, and
/// `cfg.restarts` Haar-random vectors drawn from `cfg.seed`.
pub(crate) fn maximize_pure_from<O: OutputObjective>(
    ch: &KrausChannel,
    obj: &O,
    cfg: &OptimizerConfig,
    extra: &[CVec],
) -> Result<PureSearch> {
    cfg.validate()?;
    let d = ch.dim_in();
    let mut rng = rng_from_seed(cfg.seed);
    let mut starts: Vec<CVec> = (0..d)
        .map(|i| {
            let mut v = CVec::zeros(d);
            v[i] = c(1.0);
            v
        })
        .collect();
    starts.extend(extra.iter().cloned());
    for _ in 0..cfg.restarts {
        starts.push(random_unit_vector(d, &mut rng));
    }
    let mut best: Option<Ascent> = None;
    let mut maxima: Vec<(f64, CVec)> = Vec::new();
    let n_starts = starts.len();
    for start in starts {
        let run = ascend(ch, obj, start, cfg)?;
        if run.value.is_infinite() {
            return Ok(PureSearch {
                value: run.value,
                argmax: run.psi.clone(),
                restarts_used: n_starts,
                converged: true,
                iterations: run.iterations,
                local_maxima: vec![(run.value, run.psi)],
            });
        }
        if !maxima.iter().any(|(_, v)| fidelity(v, &run.psi) > 1.0 - 1e-8) {
            maxima.push((run.value, run.psi.clone()));
        }
        if best.as_ref().is_none_or(|b| run.value > b.value) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one start");
    maxima.sort_by(|a, b| b.0.total_cmp(&a.0));
    Ok(PureSearch {
        value: best.value,
        argmax: best.psi,
        restarts_used: n_starts,
        converged: best.converged,
        iterations: best.iterations,
        local_maxima: maxima,
    })
}

pub(crate) fn maximize_pure<O: OutputObjective>(ch: &KrausChannel, obj: &O, cfg: &OptimizerConfig) -> Result<PureSearch> {
    maximize_pure_from(ch, obj, cfg, &[])
}

/// `Σ p_i Q̃_α(ρ_i‖σ)`, the individual terms, and the gradient in `σ`.
pub(crate) struct SandwichedTerms {
    pub total: f64,
    pub terms: Vec<f64>,
    pub gradient: Mat,
}

/// Square roots of the atoms, cached across evaluations.
pub(crate) fn roots(atoms: &[Mat]) -> Result<Vec<Mat>> {
    atoms
        .iter()
        .map(|a| Ok(eigh(a)?.map(|l| l.max(0.0).sqrt())))
        .collect()
}

/// Uses `Q̃_α(ρ‖σ) = Tr{(ρ^{1/2} σ^γ ρ^{1/2})^α}` with `γ = (1−α)/α`; the gradient
/// is `α Df_γ(σ)[Σ p ρ^{1/2} M^{α−1} ρ^{1/2}]` with `Df_γ` the Fréchet derivative
/// of `x^γ`. `σ` must be positive definite.
pub(crate) fn sandwiched_terms(root_atoms: &[Mat], p: &[f64], s: &Spectrum, alpha: f64) -> Result<SandwichedTerms> {
    let gamma = (1.0 - alpha) / alpha;
    let sigma_pow = s.map(|l| l.powf(gamma));
    let d = s.dim();
    let mut weighted = Mat::zeros(d, d);
    let mut terms = Vec::with_capacity(root_atoms.len());
    let mut total = 0.0;
    for (r, &pi) in root_atoms.iter().zip(p) {
        let m = r * &sigma_pow * r;
        let sm = eigh(&m)?;
        let q: f64 = clipped(&sm).iter().map(|l| l.powf(alpha)).sum();
        terms.push(q);
        total += pi * q;
        if pi > 0.0 {
            let w = r * sm.map(|l| l.max(0.0).powf(alpha - 1.0)) * r;
            weighted += w.scale(pi * alpha);
        }
    }
    let gradient = frechet(
        s,
        |x| x.powf(gamma),
        |x| gamma * x.powf(gamma - 1.0),
        &weighted,
    );
    Ok(SandwichedTerms {
        total,
        terms,
        gradient,
    })
}

/// `F(σ) + λ_min(G) − Tr{σG}`: a lower bound on `min_σ F` for convex `F`.
pub(crate) fn frank_wolfe_lower(total: f64, gradient: &Mat, sigma: &Mat) -> Result<f64> {
    let lmin = eigh(gradient)?.lambda_min();
    Ok(total + lmin - (sigma * gradient).trace().re)
}

fn exp_normalized(log_sigma: &Mat) -> Result<(Mat, Spectrum)> {
    let s = eigh(log_sigma)?;
    let top = s.lambda_max();
    let vals: Vec<f64> = s.eigenvalues.iter().map(|l| (l - top).exp()).collect();
    let z: f64 = vals.iter().sum();
    let vals: Vec<f64> = vals.iter().map(|v| (v / z).max(1e-300)).collect();
    let sigma = s.with_values(&vals);
    let spec = Spectrum {
        eigenvalues: vals,
        eigenvectors: s.eigenvectors,
    };
    Ok((sigma, spec))
}

/// Solution of the inner `min_σ Σ p_i Φ(ρ_i‖σ)` for fixed weights.
#[derive(Clone, Debug)]
pub(crate) struct SigmaSolution {
    pub sigma: Mat,
    /// Per-atom divergences at `sigma`, in bits.
    pub values: Vec<f64>,
    /// Weighted objective at `sigma`, in bits.
    pub objective: f64,
    /// Certified lower bound on the exact inner minimum, in bits.
    pub lower: f64,
}

/// Matrix exponentiated-gradient descent for the sandwiched inner problem.
fn mirror_descent_sigma(root_atoms: &[Mat], p: &[f64], alpha: f64, warm: &Mat, max_iters: usize) -> Result<SigmaSolution> {
    let ws = eigh(warm)?;
    let floor = 1e-12;
    let mut log_sigma = ws.map(|l| l.max(floor).ln());
    let (mut sigma, spec) = exp_normalized(&log_sigma)?;
    log_sigma = spec.map(|l| l.ln());
    let mut t = sandwiched_terms(root_atoms, p, &spec, alpha)?;
    let mut eta = 1.0 / crate::linalg::op_norm(&t.gradient).max(1e-300);
    for _ in 0..max_iters {
        let lower = frank_wolfe_lower(t.total, &t.gradient, &sigma)?;
        if t.total - lower <= 1e-13 * t.total.abs().max(1e-300) {
            break;
        }
        let mut accepted = false;
        for _ in 0..60 {
            let trial_log = &log_sigma - t.gradient.scale(eta);
            let (trial, trial_spec) = exp_normalized(&trial_log)?;
            let tt = sandwiched_terms(root_atoms, p, &trial_spec, alpha)?;
            if tt.total < t.total {
                log_sigma = trial_spec.map(|l| l.ln());
                sigma = trial;
                t = tt;
                eta *= 1.5;
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let lower_raw = frank_wolfe_lower(t.total, &t.gradient, &sigma)?;
    let to_bits = |q: f64| q.log2() / (alpha - 1.0);
    Ok(SigmaSolution {
        values: t.terms.iter().map(|&q| to_bits(q)).collect(),
        objective: to_bits(t.total),
        lower: if lower_raw > 0.0 { to_bits(lower_raw) } else { f64::NEG_INFINITY },
        sigma: HermitianOperator::symmetrized(&sigma).into_mat(),
    })
}

/// Closed-form inner solutions for the traditional and von Neumann divergences.
fn closed_form_sigma(atoms: &[Mat], p: &[f64], kind: DivergenceKind) -> Result<SigmaSolution> {
    let d = atoms[0].nrows();
    match kind {
        DivergenceKind::VonNeumann => {
            let mut sigma = Mat::zeros(d, d);
            for (a, &pi) in atoms.iter().zip(p) {
                sigma += a.scale(pi);
            }
            let around = Around::new(kind, &sigma)?;
            let values = atoms.iter().map(|a| around.value(a)).collect::<Result<Vec<_>>>()?;
            let objective = weighted_sum(p, &values);
            Ok(SigmaSolution {
                sigma,
                values,
                objective,
                lower: objective,
            })
        }
        DivergenceKind::Traditional(alpha) => {
            let mut avg = Mat::zeros(d, d);
            for (a, &pi) in atoms.iter().zip(p) {
                avg += eigh(a)?.map(|l| l.max(0.0).powf(alpha)).scale(pi);
            }
            let root = eigh(&avg)?.map(|l| l.max(0.0).powf(1.0 / alpha));
            let tr = root.trace().re;
            let sigma = root.unscale(tr);
            let around = Around::new(kind, &sigma)?;
            let raw = atoms.iter().map(|a| around.value(a)).collect::<Result<Vec<_>>>()?;
            let values: Vec<f64> = raw.iter().map(|&q| around.to_bits(q)).collect();
            let objective = around.to_bits(weighted_sum(p, &raw));
            Ok(SigmaSolution {
                sigma,
                values,
                objective,
                lower: objective,
            })
        }
        DivergenceKind::Sandwiched(_) => unreachable!("sandwiched inner problem has no closed form"),
    }
}

fn weighted_sum(p: &[f64], v: &[f64]) -> f64 {
    p.iter().zip(v).filter(|(&pi, _)| pi > 0.0).map(|(pi, vi)| pi * vi).sum()
}

struct FiniteProblem {
    kind: DivergenceKind,
    atoms: Vec<Mat>,
    root_atoms: Vec<Mat>,
}

impl FiniteProblem {
    fn solve_sigma(&self, p: &[f64], warm: &Mat, max_iters: usize) -> Result<SigmaSolution> {
        match self.kind {
            DivergenceKind::Sandwiched(alpha) => mirror_descent_sigma(&self.root_atoms, p, alpha, warm, max_iters),
            _ => closed_form_sigma(&self.atoms, p, self.kind),
        }
    }

    fn replace(&mut self, k: usize, atom: Mat) -> Result<()> {
        self.root_atoms[k] = roots(std::slice::from_ref(&atom))?.remove(0);
        self.atoms[k] = atom;
        Ok(())
    }

    fn push(&mut self, atom: Mat) -> Result<()> {
        self.root_atoms.push(roots(std::slice::from_ref(&atom))?.remove(0));
        self.atoms.push(atom);
        Ok(())
    }
}

/// Exponentiated-gradient ascent on the weights of the finite dual problem.
fn solve_finite(prob: &FiniteProblem, p: &mut Vec<f64>, warm: &Mat, tol: f64, max_iters: usize) -> Result<SigmaSolution> {
    let inner_iters = 400;
    let mut sol = prob.solve_sigma(p, warm, inner_iters)?;
    let mut step = 1.0;
    for _ in 0..max_iters {
        let top = sol.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if top - sol.objective <= tol {
            break;
        }
        let mut accepted = false;
        for _ in 0..30 {
            let mut trial: Vec<f64> = p
                .iter()
                .zip(&sol.values)
                .map(|(&pi, &vi)| pi * ((vi - top) * step).exp2())
                .collect();
            let z: f64 = trial.iter().sum();
            trial.iter_mut().for_each(|x| *x /= z);
            let trial_sol = prob.solve_sigma(&trial, &sol.sigma, inner_iters)?;
            if trial_sol.objective > sol.objective {
                *p = trial;
                sol = trial_sol;
                step = (step * 1.5).min(1e4);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok(sol)
}

/// Outcome of [`minimax`].
#[derive(Clone, Debug)]
pub struct MinimaxOutcome {
    /// Inner maximum at `sigma`, in bits.
    pub value: f64,
    pub sigma: Mat,
    pub worst_input: CVec,
    /// Best certified lower bound on the minimax value, in bits.
    pub lower: f64,
    pub restarts_used: usize,
    pub converged: bool,
    /// Final ensemble weights and inputs of the finite problem.
    pub weights: Vec<f64>,
    pub inputs: Vec<CVec>,
}

/// `min_σ max_ψ D(N(ψ)‖σ)` for the divergence `kind`.
pub(crate) fn minimax(ch: &KrausChannel, kind: DivergenceKind, cfg: &OptimizerConfig) -> Result<MinimaxOutcome> {
    cfg.validate()?;
    let din = ch.dim_in();
    let dout = ch.dim_out();
    let mut inputs: Vec<CVec> = (0..din)
        .map(|i| {
            let mut v = CVec::zeros(din);
            v[i] = c(1.0);
            v
        })
        .collect();
    let mut prob = FiniteProblem {
        kind,
        atoms: Vec::new(),
        root_atoms: Vec::new(),
    };
    for v in &inputs {
        prob.push(ch.apply_pure(v))?;
    }
    let mut p = vec![1.0 / din as f64; din];
    let mut warm = Mat::identity(dout, dout).unscale(dout as f64);
    let mut best: Option<(f64, Mat, CVec)> = None;
    let mut lower = f64::NEG_INFINITY;
    let mut restarts_used = 0;
    let mut converged = false;
    let max_outer = 60;
    let mut rng = rng_from_seed(cfg.seed);
    for round in 0..max_outer {
        let mut sol = solve_finite(&prob, &mut p, &warm, 0.05 * cfg.outer_tol, cfg.max_iters)?;
        lower = lower.max(sol.lower);
        // Slide each active atom onto a local maximum at the current σ and re-solve.
        let around = Around::new(kind, &sol.sigma)?;
        let mut moved = false;
        for k in 0..inputs.len() {
            if p[k] <= 1e-9 {
                continue;
            }
            let run = ascend(ch, &around, inputs[k].clone(), cfg)?;
            if run.value.is_finite() && fidelity(&run.psi, &inputs[k]) < 1.0 - 1e-14 {
                prob.replace(k, ch.apply_pure(&run.psi))?;
                inputs[k] = run.psi;
                moved = true;
            }
        }
        if moved {
            sol = solve_finite(&prob, &mut p, &sol.sigma, 0.05 * cfg.outer_tol, cfg.max_iters)?;
            lower = lower.max(sol.lower);
        }
        warm = sol.sigma.clone();
        let around = Around::new(kind, &sol.sigma)?;
        let round_cfg = cfg.with_seed(rng.random());
        let extra: Vec<CVec> = inputs
            .iter()
            .zip(&p)
            .filter(|(_, &w)| w > 1e-9)
            .map(|(v, _)| v.clone())
            .collect();
        let search = maximize_pure_from(ch, &around, &round_cfg, &extra)?;
        restarts_used += search.restarts_used;
        let upper = around.to_bits(search.value);
        if best.as_ref().is_none_or(|b| upper < b.0) {
            best = Some((upper, sol.sigma.clone(), search.argmax.clone()));
        }
        let best_upper = best.as_ref().map(|b| b.0).unwrap_or(f64::INFINITY);
        if best_upper - lower <= cfg.outer_tol && round > 0 {
            converged = true;
            break;
        }
        // Add every local maximum that beats the current finite-problem value.
        let mut added = 0;
        for (val, psi) in &search.local_maxima {
            let bits = around.to_bits(*val);
            if bits <= sol.objective + 0.1 * cfg.outer_tol {
                continue;
            }
            if inputs.iter().any(|v| fidelity(v, psi) > 1.0 - 1e-10) {
                continue;
            }
            inputs.push(psi.clone());
            prob.push(ch.apply_pure(psi))?;
            p.push(0.0);
            added += 1;
        }
        if added == 0 {
            // The evaluated maximum is already an atom: the finite problem is not yet tight.
            if best_upper - lower <= cfg.outer_tol {
                converged = true;
                break;
            }
            continue;
        }
        let w = 0.2 / added as f64;
        let keep = 1.0 - 0.2;
        let n_old = p.len() - added;
        for (k, x) in p.iter_mut().enumerate() {
            *x = if k < n_old { *x * keep } else { w };
        }
        prune(&mut inputs, &mut prob, &mut p, 4 * din * din);
    }
    let (value, sigma, worst) = best.expect("at least one round");
    Ok(MinimaxOutcome {
        value,
        sigma,
        worst_input: worst,
        lower,
        restarts_used,
        converged,
        weights: p,
        inputs,
    })
}

/// Drops the lightest atoms once the finite problem exceeds `cap` atoms.
fn prune(inputs: &mut Vec<CVec>, prob: &mut FiniteProblem, p: &mut Vec<f64>, cap: usize) {
    if p.len() <= cap {
        return;
    }
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by(|&a, &b| p[b].total_cmp(&p[a]));
    order.truncate(cap);
    order.sort_unstable();
    *inputs = order.iter().map(|&k| inputs[k].clone()).collect();
    prob.atoms = order.iter().map(|&k| prob.atoms[k].clone()).collect();
    prob.root_atoms = order.iter().map(|&k| prob.root_atoms[k].clone()).collect();
    let kept: Vec<f64> = order.iter().map(|&k| p[k]).collect();
    let z: f64 = kept.iter().sum();
    *p = kept.iter().map(|x| x / z).collect();
}

/// Inner minimization of `Σ p_i Q̃_α(ρ_i‖σ)` over `σ = LL†/Tr(LL†)` by
/// gradient descent on `L` with Barzilai–Borwein steps and Armijo backtracking.
pub(crate) fn factor_descent_sigma(
    root_atoms: &[Mat],
    p: &[f64],
    alpha: f64,
    warm: &Mat,
    max_iters: usize,
) -> Result<SigmaSolution> {
    let eval = |l: &Mat| -> Result<(f64, Mat, Mat, Spectrum, Vec<f64>)> {
        let s = l * l.adjoint();
        let tr = s.trace().re;
        let sigma = s.unscale(tr);
        let spec = eigh(&sigma)?;
        if spec.lambda_min() <= 0.0 {
            return Ok((f64::INFINITY, Mat::zeros(0, 0), sigma, spec, Vec::new()));
        }
        let t = sandwiched_terms(root_atoms, p, &spec, alpha)?;
        // dF/dS = (G − Tr{Gσ} I)/Tr S and dF/dL = 2 (dF/dS) L.
        let d = sigma.nrows();
        let shift = (&t.gradient * &sigma).trace().re;
        let gs = (&t.gradient - Mat::identity(d, d).scale(shift)).unscale(tr);
        let gl = (gs * l).scale(2.0);
        Ok((t.total, gl, sigma, spec, t.terms))
    };
    let ws = eigh(warm)?;
    let mut l = ws.map(|x| x.max(1e-12).sqrt());
    let (mut f, mut g, mut sigma, mut _spec, mut terms) = eval(&l)?;
    let mut step = 1.0 / (crate::linalg::op_norm(&g).max(1e-300));
    let mut prev: Option<(Mat, Mat)> = None;
    for _ in 0..max_iters {
        let grad_sigma = {
            let t = sandwiched_terms(root_atoms, p, &eigh(&sigma)?, alpha)?;
            t.gradient
        };
        let lower = frank_wolfe_lower(f, &grad_sigma, &sigma)?;
        if f - lower <= 1e-11 * f.abs().max(1e-300) {
            break;
        }
        if let Some((l_prev, g_prev)) = &prev {
            let s_diff = &l - l_prev;
            let y_diff = &g - g_prev;
            let sy = s_diff.dotc(&y_diff).re;
            if sy > 0.0 {
                step = s_diff.norm_squared() / sy;
            }
        }
        let gnorm2 = g.norm_squared();
        let mut accepted = false;
        for _ in 0..60 {
            let trial = &l - g.scale(step);
            let (ft, gt, st, spt, tt) = eval(&trial)?;
            if ft <= f - 1e-4 * step * gnorm2 {
                prev = Some((l.clone(), g.clone()));
                l = trial;
                f = ft;
                g = gt;
                sigma = st;
                _spec = spt;
                terms = tt;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        // Keep the factor at unit scale; the objective is scale invariant.
        let nrm = l.norm();
        l.unscale_mut(nrm);
        g.scale_mut(nrm);
        prev = prev.map(|(lp, gp)| (lp.unscale(nrm), gp.scale(nrm)));
    }
    let t = sandwiched_terms(root_atoms, p, &eigh(&sigma)?, alpha)?;
    let lower_raw = frank_wolfe_lower(t.total, &t.gradient, &sigma)?;
    let to_bits = |q: f64| q.log2() / (alpha - 1.0);
    let _ = terms;
    Ok(SigmaSolution {
        values: t.terms.iter().map(|&q| to_bits(q)).collect(),
        objective: to_bits(t.total),
        lower: if lower_raw > 0.0 { to_bits(lower_raw) } else { f64::NEG_INFINITY },
        sigma: HermitianOperator::symmetrized(&sigma).into_mat(),
    })
}

/// Relative per-iteration gain at which [`ensemble_ascent`] stops.
const ENSEMBLE_STALL: f64 = 1e-10;

/// Outcome of [`ensemble_ascent`].
#[derive(Clone, Debug)]
pub struct EnsembleOutcome {
    /// `min_σ` of the ensemble objective, in bits.
    pub value: f64,
    pub probs: Vec<f64>,
    pub inputs: Vec<CVec>,
    pub sigma: Mat,
    pub converged: bool,
}

/// `min_σ (1/(α−1)) log₂ Σ p_x Q̃_α(N(ρ_x)‖σ)` for a fixed ensemble of pure inputs.
pub(crate) fn ensemble_value(
    ch: &KrausChannel,
    probs: &[f64],
    inputs: &[CVec],
    alpha: f64,
    warm: &Mat,
) -> Result<SigmaSolution> {
    let atoms: Vec<Mat> = inputs.iter().map(|v| ch.apply_pure(v)).collect();
    factor_descent_sigma(&roots(&atoms)?, probs, alpha, warm, 3000)
}

/// Maximizes the sandwiched ensemble objective over `m` weighted pure inputs by
/// alternating weight updates and gradient steps on each input vector.
pub(crate) fn ensemble_ascent(
    ch: &KrausChannel,
    alpha: f64,
    m: usize,
    cfg: &OptimizerConfig,
) -> Result<EnsembleOutcome> {
    cfg.validate()?;
    let din = ch.dim_in();
    let dout = ch.dim_out();
    let mut rng = rng_from_seed(cfg.seed ^ 0x5eed_ab1e);
    let mut best: Option<EnsembleOutcome> = None;
    let runs = cfg.restarts.clamp(1, 4);
    for run in 0..runs {
        let mut inputs: Vec<CVec> = (0..m)
            .map(|k| {
                if run == 0 && k < din {
                    let mut v = CVec::zeros(din);
                    v[k] = c(1.0);
                    v
                } else {
                    random_unit_vector(din, &mut rng)
                }
            })
            .collect();
        let mut probs = vec![1.0 / m as f64; m];
        let mut sol = ensemble_value(ch, &probs, &inputs, alpha, &Mat::identity(dout, dout).unscale(dout as f64))?;
        let mut converged = false;
        let mut p_step = 1.0;
        let mut v_step = 1.0;
        for _ in 0..cfg.max_iters {
            let before = sol.objective;
            // Weights: exponentiated-gradient step on the per-input divergences.
            let top = sol.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            for _ in 0..20 {
                let mut trial: Vec<f64> = probs
                    .iter()
                    .zip(&sol.values)
                    .map(|(&pi, &vi)| pi * ((vi - top) * p_step).exp2())
                    .collect();
                let z: f64 = trial.iter().sum();
                trial.iter_mut().for_each(|x| *x /= z);
                let ts = ensemble_value(ch, &trial, &inputs, alpha, &sol.sigma)?;
                if ts.objective > sol.objective {
                    probs = trial;
                    sol = ts;
                    p_step = (p_step * 1.5).min(1e4);
                    break;
                }
                p_step *= 0.5;
            }
            // Inputs: move each vector along (I + τ G)ψ, G the pulled-back gradient at σ.
            let around = Around::new(DivergenceKind::Sandwiched(alpha), &sol.sigma)?;
            let dirs: Vec<Mat> = inputs
                .iter()
                .map(|v| Ok(ch.adjoint_mat(&around.gradient(&ch.apply_pure(v))?)))
                .collect::<Result<Vec<_>>>()?;
            for _ in 0..20 {
                let trial: Vec<CVec> = inputs
                    .iter()
                    .zip(&dirs)
                    .map(|(v, g)| {
                        let gn = crate::linalg::op_norm(g).max(1e-300);
                        (v + (g * v).scale(v_step / gn)).normalize()
                    })
                    .collect();
                let ts = ensemble_value(ch, &probs, &trial, alpha, &sol.sigma)?;
                if ts.objective > sol.objective {
                    inputs = trial;
                    sol = ts;
                    v_step = (v_step * 2.0).min(1e6);
                    break;
                }
                v_step *= 0.5;
            }
            // Gains below ENSEMBLE_STALL are within the σ-solver's own tolerance.
            if sol.objective - before <= (cfg.inner_tol.max(ENSEMBLE_STALL)) * (1.0 + before.abs()) {
                converged = true;
                break;
            }
        }
        let outcome = EnsembleOutcome {
            value: sol.objective,
            probs,
            inputs,
            sigma: sol.sigma,
            converged,
        };
        if best.as_ref().is_none_or(|b| outcome.value > b.value) {
            best = Some(outcome);
        }
    }
    Ok(best.expect("at least one run"))
}

/// Draws an index with the probabilities `probs`.
pub(crate) fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (k, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return k;
        }
    }
    probs.len() - 1
}
