//! States, ensembles, POVMs and completely positive maps in Kraus form.
//!
//! A [`KrausChannel`] carries a trace-preserving flag so that completely
//! positive maps which are not trace preserving (for example a channel
//! conjugated by a positive operator) flow through the same type.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{
    self, c, eigh, max_abs_entry, op_norm, partial_trace_mat, partial_transpose, CVec, HermitianOperator, Mat,
    SUPPORT_TOL,
};
use crate::{Error, Result};

/// Tolerance on positivity and unit trace of density matrices.
pub const STATE_TOL: f64 = 1e-10;

/// Tolerance on `‖Σ A†A − I‖∞` for the trace-preserving flag and on POVM completeness.
pub const TP_TOL: f64 = 1e-9;

/// Minimum partial-transpose eigenvalue (of the trace-normalized Choi matrix)
/// required to call a channel interior to the entanglement-breaking set.
pub const EB_INTERIOR_MARGIN: f64 = 1e-3;

/// Deterministic generator used by every sampler in the crate.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub(crate) fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Mat {
    Mat::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

pub(crate) fn gaussian_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CVec {
    CVec::from_fn(d, |_, _| complex_gaussian(rng))
}

/// A density operator: PSD within [`STATE_TOL`] with unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(HermitianOperator);

impl DensityMatrix {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let tr = op.trace();
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidTrace(tr));
        }
        let s = op.eigh()?;
        if s.lambda_min() < -STATE_TOL {
            return Err(Error::NotPsd(s.lambda_min()));
        }
        Ok(Self(op))
    }

    pub fn from_mat(m: Mat) -> Result<Self> {
        Self::new(HermitianOperator::new(m)?)
    }

    /// `|ψ⟩⟨ψ|` for the normalization of `psi`.
    pub fn pure(psi: &CVec) -> Result<Self> {
        let norm = psi.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Domain("pure state from a zero or non-finite vector".into()));
        }
        Ok(Self(HermitianOperator::outer(&psi.unscale(norm))))
    }

    pub fn basis(d: usize, i: usize) -> Result<Self> {
        if i >= d {
            return Err(Error::Shape(format!("basis index {i} out of range for dimension {d}")));
        }
        let mut v = CVec::zeros(d);
        v[i] = c(1.0);
        Self::pure(&v)
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self(HermitianOperator::identity(d).scaled(1.0 / d as f64))
    }

    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(HermitianOperator::diagonal(probs))
    }

    /// Hermitian part of `m`, rescaled to unit trace, without positivity checks.
    pub(crate) fn normalized_unchecked(m: &Mat) -> Self {
        let h = HermitianOperator::symmetrized(m);
        let tr = h.trace();
        Self(h.scaled(1.0 / tr))
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.0
    }

    pub fn as_mat(&self) -> &Mat {
        self.0.as_mat()
    }

    pub fn into_op(self) -> HermitianOperator {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        Self(HermitianOperator::symmetrized(&linalg::tensor_product(
            self.as_mat(),
            other.as_mat(),
        )))
    }

    pub fn purity(&self) -> f64 {
        (self.as_mat() * self.as_mat()).trace().re
    }
}

/// An ensemble `{p(x), ρ_x}` of states of a common dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    probs: Vec<f64>,
    states: Vec<DensityMatrix>,
}

impl Ensemble {
    pub fn new(probs: Vec<f64>, states: Vec<DensityMatrix>) -> Result<Self> {
        if probs.len() != states.len() || probs.is_empty() {
            return Err(Error::InvalidEnsemble(format!(
                "{} probabilities for {} states",
                probs.len(),
                states.len()
            )));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidEnsemble("negative or non-finite probability".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidEnsemble(format!("probabilities sum to {total}")));
        }
        let d = states[0].dim();
        if let Some(bad) = states.iter().find(|s| s.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: bad.dim(),
            });
        }
        Ok(Self { probs, states })
    }

    pub fn uniform(states: Vec<DensityMatrix>) -> Result<Self> {
        let n = states.len().max(1);
        Self::new(vec![1.0 / n as f64; states.len()], states)
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &DensityMatrix)> {
        self.probs.iter().copied().zip(self.states.iter())
    }

    pub fn average(&self) -> DensityMatrix {
        let mut m = Mat::zeros(self.dim(), self.dim());
        for (p, s) in self.iter() {
            m += s.as_mat().scale(p);
        }
        DensityMatrix::normalized_unchecked(&m)
    }
}

/// A classical-quantum state `Σ p(x)|x⟩⟨x| ⊗ ρ_x` kept in block form.
#[derive(Clone, Debug, PartialEq)]
pub struct CqState {
    pub labels: Vec<usize>,
    pub probs: Vec<f64>,
    pub conditionals: Vec<DensityMatrix>,
}

impl CqState {
    /// Block-diagonal matrix on `X ⊗ B`.
    pub fn flatten(&self) -> HermitianOperator {
        let d = self.conditionals[0].dim();
        let n = self.labels.len();
        let mut m = Mat::zeros(n * d, n * d);
        for (x, (p, rho)) in self.probs.iter().zip(&self.conditionals).enumerate() {
            m.view_mut((x * d, x * d), (d, d)).copy_from(&rho.as_mat().scale(*p));
        }
        HermitianOperator::symmetrized(&m)
    }

    /// `ρ_X = Σ p(x)|x⟩⟨x|`.
    pub fn classical_marginal(&self) -> HermitianOperator {
        HermitianOperator::diagonal(&self.probs)
    }

    pub fn quantum_marginal(&self) -> DensityMatrix {
        let d = self.conditionals[0].dim();
        let mut m = Mat::zeros(d, d);
        for (p, rho) in self.probs.iter().zip(&self.conditionals) {
            m += rho.as_mat().scale(*p);
        }
        DensityMatrix::normalized_unchecked(&m)
    }
}

/// A POVM: PSD elements summing to the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    elements: Vec<HermitianOperator>,
}

impl Povm {
    pub fn new(elements: Vec<HermitianOperator>) -> Result<Self> {
        let Some(first) = elements.first() else {
            return Err(Error::InvalidPovm("no elements".into()));
        };
        let d = first.dim();
        let mut total = Mat::zeros(d, d);
        for (k, e) in elements.iter().enumerate() {
            if e.dim() != d {
                return Err(Error::InvalidPovm(format!("element {k} has dimension {}", e.dim())));
            }
            let lmin = e.eigh()?.lambda_min();
            if lmin < -STATE_TOL {
                return Err(Error::InvalidPovm(format!("element {k} has eigenvalue {lmin:.3e}")));
            }
            total += e.as_mat();
        }
        let defect = op_norm(&(total - Mat::identity(d, d)));
        if defect > TP_TOL {
            return Err(Error::InvalidPovm(format!("elements sum to I within {defect:.3e} only")));
        }
        Ok(Self { elements })
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    /// Outcome distribution `Tr{Λ_k ρ}`.
    pub fn probabilities(&self, rho: &DensityMatrix) -> Vec<f64> {
        self.elements
            .iter()
            .map(|e| (e.as_mat() * rho.as_mat()).trace().re)
            .collect()
    }
}

/// An isometry `V: A → B ⊗ E` with rows indexed `b · dim_e + e`.
#[derive(Clone, Debug, PartialEq)]
pub struct Isometry {
    pub matrix: Mat,
    pub dim_a: usize,
    pub dim_b: usize,
    pub dim_e: usize,
}

impl Isometry {
    /// `‖V†V − I‖∞`.
    pub fn isometry_defect(&self) -> f64 {
        op_norm(&(self.matrix.adjoint() * &self.matrix - Mat::identity(self.dim_a, self.dim_a)))
    }

    /// `Tr_E{V X V†}`.
    pub fn trace_out_env(&self, x: &Mat) -> Result<Mat> {
        let full = &self.matrix * x * self.matrix.adjoint();
        partial_trace_mat(&full, &[self.dim_b, self.dim_e], &[0])
    }

    /// `Tr_B{V X V†}`.
    pub fn trace_out_output(&self, x: &Mat) -> Result<Mat> {
        let full = &self.matrix * x * self.matrix.adjoint();
        partial_trace_mat(&full, &[self.dim_b, self.dim_e], &[1])
    }
}

/// Outcome of the PPT test on a Choi matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EbVerdict {
    Yes,
    No,
    Inconclusive,
}

/// A completely positive map `X ↦ Σ A_x X A_x†`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<Mat>,
    trace_preserving: bool,
}

impl KrausChannel {
    /// Validates shapes and finiteness; the trace-preserving flag is computed.
    pub fn new(dim_in: usize, dim_out: usize, kraus: Vec<Mat>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::Construction("channel needs at least one Kraus operator".into()));
        }
        for k in &kraus {
            if k.nrows() != dim_out || k.ncols() != dim_in {
                return Err(Error::Shape(format!(
                    "Kraus operator is {}x{}, expected {dim_out}x{dim_in}",
                    k.nrows(),
                    k.ncols()
                )));
            }
            if k.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite);
            }
        }
        let mut ch = Self {
            dim_in,
            dim_out,
            kraus,
            trace_preserving: false,
        };
        ch.trace_preserving = ch.tp_defect() <= TP_TOL;
        Ok(ch)
    }

    pub fn identity(d: usize) -> Self {
        Self::new(d, d, vec![Mat::identity(d, d)]).expect("identity channel")
    }

    pub fn unitary(u: &Mat) -> Result<Self> {
        Self::new(u.ncols(), u.nrows(), vec![u.clone()])
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[Mat] {
        &self.kraus
    }

    pub fn kraus_count(&self) -> usize {
        self.kraus.len()
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    /// `‖Σ A†A − I‖∞`.
    pub fn tp_defect(&self) -> f64 {
        let mut s = Mat::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            s += k.adjoint() * k;
        }
        op_norm(&(s - Mat::identity(self.dim_in, self.dim_in)))
    }

    /// `Σ A X A†` on an arbitrary operator.
    pub fn apply_mat(&self, x: &Mat) -> Mat {
        let mut out = Mat::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out += k * x * k.adjoint();
        }
        out
    }

    /// Heisenberg-picture action `Σ A† Y A`.
    pub fn adjoint_mat(&self, y: &Mat) -> Mat {
        let mut out = Mat::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            out += k.adjoint() * y * k;
        }
        out
    }

    /// Output on a pure input `|ψ⟩⟨ψ|`.
    pub(crate) fn apply_pure(&self, psi: &CVec) -> Mat {
        let mut out = Mat::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            let v = k * psi;
            out += &v * v.adjoint();
        }
        out
    }

    pub fn apply_op(&self, x: &HermitianOperator) -> Result<HermitianOperator> {
        self.check_input(x.dim())?;
        Ok(HermitianOperator::symmetrized(&self.apply_mat(x.as_mat())))
    }

    fn check_input(&self, d: usize) -> Result<()> {
        if d != self.dim_in {
            return Err(Error::DimensionMismatch {
                expected: self.dim_in,
                found: d,
            });
        }
        Ok(())
    }

    fn require_tp(&self) -> Result<()> {
        if !self.trace_preserving {
            return Err(Error::NotTracePreserving(self.tp_defect()));
        }
        Ok(())
    }

    /// Channel output as a density matrix; the channel must be trace preserving.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.check_input(rho.dim())?;
        self.require_tp()?;
        Ok(DensityMatrix::normalized_unchecked(&self.apply_mat(rho.as_mat())))
    }

    /// `(N ⊗ id)(|γ⟩⟨γ|)` with `|γ⟩ = Σᵢ |i⟩|i⟩`, output system first.
    pub fn choi(&self) -> HermitianOperator {
        let (din, dout) = (self.dim_in, self.dim_out);
        let mut m = Mat::zeros(dout * din, dout * din);
        for i in 0..din {
            for j in 0..din {
                let mut eij = Mat::zeros(din, din);
                eij[(i, j)] = c(1.0);
                let block = self.apply_mat(&eij);
                for a in 0..dout {
                    for b in 0..dout {
                        m[(a * din + i, b * din + j)] = block[(a, b)];
                    }
                }
            }
        }
        HermitianOperator::symmetrized(&m)
    }

    /// `N₁ ⊗ N₂` with Kraus operators `A_i ⊗ B_j`.
    pub fn tensor(&self, other: &KrausChannel) -> KrausChannel {
        let kraus = self
            .kraus
            .iter()
            .flat_map(|a| other.kraus.iter().map(move |b| a.kronecker(b)))
            .collect();
        KrausChannel::new(self.dim_in * other.dim_in, self.dim_out * other.dim_out, kraus)
            .expect("tensor of valid channels")
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &KrausChannel) -> Result<KrausChannel> {
        if next.dim_in != self.dim_out {
            return Err(Error::DimensionMismatch {
                expected: self.dim_out,
                found: next.dim_in,
            });
        }
        let kraus = next
            .kraus
            .iter()
            .flat_map(|b| self.kraus.iter().map(move |a| b * a))
            .collect();
        KrausChannel::new(self.dim_in, next.dim_out, kraus)
    }

    /// Stinespring dilation `V = Σ_x A_x ⊗ |x⟩_E`.
    pub fn stinespring(&self) -> Result<Isometry> {
        self.require_tp()?;
        Ok(self.dilation())
    }

    fn dilation(&self) -> Isometry {
        let de = self.kraus.len();
        let mut v = Mat::zeros(self.dim_out * de, self.dim_in);
        for (x, a) in self.kraus.iter().enumerate() {
            for b in 0..self.dim_out {
                for i in 0..self.dim_in {
                    v[(b * de + x, i)] = a[(b, i)];
                }
            }
        }
        Isometry {
            matrix: v,
            dim_a: self.dim_in,
            dim_b: self.dim_out,
            dim_e: de,
        }
    }

    /// The map to the environment `X ↦ Tr_B{V X V†}`; its Kraus operators are
    /// `(E_b)_{x,a} = (A_x)_{b,a}`.
    pub fn complementary(&self) -> KrausChannel {
        let de = self.kraus.len();
        let kraus = (0..self.dim_out)
            .map(|b| Mat::from_fn(de, self.dim_in, |x, a| self.kraus[x][(b, a)]))
            .collect();
        KrausChannel::new(self.dim_in, de, kraus).expect("complement of a valid map")
    }

    /// `ρ ↦ X N(ρ) X` for PSD `X`; the result is generally not trace preserving.
    pub fn conjugated_by(&self, x: &HermitianOperator) -> Result<KrausChannel> {
        if x.dim() != self.dim_out {
            return Err(Error::DimensionMismatch {
                expected: self.dim_out,
                found: x.dim(),
            });
        }
        x.eigh()?.check_psd(SUPPORT_TOL)?;
        let kraus = self.kraus.iter().map(|a| x.as_mat() * a).collect();
        KrausChannel::new(self.dim_in, self.dim_out, kraus)
    }

    /// Minimum eigenvalue of the partial transpose of the Choi matrix.
    pub fn choi_pt_min(&self) -> Result<f64> {
        let pt = partial_transpose(self.choi().as_mat(), &[self.dim_out, self.dim_in], 1)?;
        Ok(eigh(&pt)?.lambda_min())
    }

    /// PPT test on the Choi matrix; decisive only when `dim_in · dim_out ≤ 6`.
    pub fn eb_verdict(&self) -> Result<EbVerdict> {
        let choi = self.choi();
        let scale = choi.trace().abs().max(1.0);
        let pt_min = self.choi_pt_min()?;
        if pt_min < -TP_TOL * scale {
            Ok(EbVerdict::No)
        } else if self.dim_in * self.dim_out <= 6 {
            Ok(EbVerdict::Yes)
        } else {
            Ok(EbVerdict::Inconclusive)
        }
    }

    /// Whether the channel is interior to the entanglement-breaking set:
    /// trace-normalized Choi matrix of full rank and partial transpose with
    /// minimum eigenvalue above `margin`. Decisive only at `2 ⊗ 2`.
    pub fn eb_interior_verdict(&self, margin: f64) -> Result<EbVerdict> {
        let choi = self.choi();
        let tr = choi.trace();
        let choi_min = choi.eigh()?.lambda_min() / tr;
        let pt_min = self.choi_pt_min()? / tr;
        let small = self.dim_in * self.dim_out <= 4;
        if pt_min < -TP_TOL {
            return Ok(EbVerdict::No);
        }
        match (choi_min > margin && pt_min > margin, small) {
            (true, true) => Ok(EbVerdict::Yes),
            (false, true) => Ok(EbVerdict::No),
            _ => Ok(EbVerdict::Inconclusive),
        }
    }
}

/// Kraus operators `√(μᵢ νⱼ) |nⱼ⟩⟨mᵢ|` realizing `X ↦ Σ_x N_x Tr{M_x X}`.
pub fn eb_from_measure_prepare(povm: &Povm, outputs: &[DensityMatrix]) -> Result<KrausChannel> {
    if povm.len() != outputs.len() {
        return Err(Error::Shape(format!(
            "{} POVM elements for {} output states",
            povm.len(),
            outputs.len()
        )));
    }
    let din = povm.dim();
    let dout = outputs[0].dim();
    let mut kraus = Vec::new();
    for (m, n) in povm.elements().iter().zip(outputs) {
        if n.dim() != dout {
            return Err(Error::DimensionMismatch {
                expected: dout,
                found: n.dim(),
            });
        }
        let sm = m.eigh()?;
        let sn = n.op().eigh()?;
        let thr_m = sm.support_threshold(SUPPORT_TOL);
        let thr_n = sn.support_threshold(SUPPORT_TOL);
        for (i, &mu) in sm.eigenvalues.iter().enumerate() {
            if mu <= thr_m {
                continue;
            }
            let bra = sm.eigenvector(i).adjoint();
            for (j, &nu) in sn.eigenvalues.iter().enumerate() {
                if nu <= thr_n {
                    continue;
                }
                let ket = sn.eigenvector(j);
                kraus.push((&ket * &bra).scale((mu * nu).sqrt()));
            }
        }
    }
    KrausChannel::new(din, dout, kraus)
}

/// The Hadamard channel complementary to an entanglement-breaking channel.
pub fn hadamard_from_eb(eb: &KrausChannel) -> KrausChannel {
    eb.complementary()
}

/// Generalized clock-and-shift operators `X^a Z^b`, indexed `a · d + b`.
fn weyl_operators(d: usize) -> Vec<Mat> {
    let omega = |k: usize| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / d as f64);
    let mut out = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let mut w = Mat::zeros(d, d);
            for j in 0..d {
                w[((j + a) % d, j)] = omega((b * j) % d);
            }
            out.push(w);
        }
    }
    out
}

/// Kraus operators of the depolarizing channel in Weyl form (`d²` operators).
fn depolarizing_kraus(d: usize, p: f64) -> Vec<Mat> {
    let d2 = (d * d) as f64;
    weyl_operators(d)
        .into_iter()
        .enumerate()
        .map(|(k, w)| {
            let weight = if k == 0 { 1.0 - p + p / d2 } else { p / d2 };
            w.scale(weight.sqrt())
        })
        .collect()
}

/// `ρ ↦ (1 − p) ρ + p · Tr(ρ) I/d`.
pub fn depolarizing(d: usize, p: f64) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("depolarizing parameter {p} outside [0, 1]")));
    }
    let kraus: Vec<Mat> = depolarizing_kraus(d, p)
        .into_iter()
        .filter(|k| max_abs_entry(k) > 0.0)
        .collect();
    KrausChannel::new(d, d, kraus)
}

/// `ρ ↦ Tr(ρ) I/d`.
pub fn completely_depolarizing(d: usize) -> KrausChannel {
    depolarizing(d, 1.0).expect("p = 1 is in range")
}

/// `ρ ↦ Tr(ρ) τ`.
pub fn replacer(dim_in: usize, tau: &DensityMatrix) -> Result<KrausChannel> {
    let povm = Povm::new(vec![HermitianOperator::identity(dim_in)])?;
    eb_from_measure_prepare(&povm, std::slice::from_ref(tau))
}

/// Dephasing in the orthonormal basis given by the columns of `basis`.
pub fn pinching(basis: &Mat) -> Result<KrausChannel> {
    let d = basis.nrows();
    if basis.ncols() != d {
        return Err(Error::NotSquare(d, basis.ncols()));
    }
    let defect = op_norm(&(basis.adjoint() * basis - Mat::identity(d, d)));
    if defect > TP_TOL {
        return Err(Error::Domain(format!("basis is not unitary (defect {defect:.3e})")));
    }
    let kraus = (0..d)
        .map(|x| {
            let v = basis.column(x).into_owned();
            &v * v.adjoint()
        })
        .collect();
    KrausChannel::new(d, d, kraus)
}

/// Generalized dephasing `ρ ↦ Σ ρ_ij ⟨ψ_j|ψ_i⟩ |i⟩⟨j|`, a Hadamard channel whose
/// complement prepares `|ψ_i⟩` after measuring in the computational basis.
pub fn generalized_dephasing(env_states: &[CVec]) -> Result<KrausChannel> {
    let d = env_states.len();
    if d == 0 {
        return Err(Error::Construction("no environment states".into()));
    }
    let de = env_states[0].len();
    let normed: Vec<CVec> = env_states.iter().map(|v| v.normalize()).collect();
    let kraus = (0..de)
        .map(|e| Mat::from_fn(d, d, |i, j| if i == j { normed[i][e] } else { c(0.0) }))
        .collect();
    KrausChannel::new(d, d, kraus)
}

/// Qubit dephasing with environment states `|0⟩` and `cos θ|0⟩ + sin θ|1⟩`.
pub fn qubit_dephasing(theta: f64) -> KrausChannel {
    let e0 = CVec::from_vec(vec![c(1.0), c(0.0)]);
    let e1 = CVec::from_vec(vec![c(theta.cos()), c(theta.sin())]);
    generalized_dephasing(&[e0, e1]).expect("two qubit environment states")
}

/// The map `M_p: A → B ⊗ F` with `M_p(ρ) = Tr_E{W_p V ρ V† W_p†}`, where `V`
/// dilates `nh` and `W_p` is the Weyl-form Stinespring isometry of the
/// depolarizing channel on `E` (`|F| = |E|²`). Its complement is `D_p ∘ nh^c`.
pub fn smooth_hadamard(nh: &KrausChannel, p: f64) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("smoothing parameter {p} outside [0, 1]")));
    }
    nh.require_tp()?;
    let de = nh.kraus_count();
    let df = de * de;
    let wp = depolarizing_kraus(de, p);
    let (din, dout) = (nh.dim_in(), nh.dim_out());
    let mut kraus = Vec::with_capacity(de);
    for e in 0..de {
        let mut l = Mat::zeros(dout * df, din);
        for (f, kf) in wp.iter().enumerate() {
            let mut ket_f = Mat::zeros(df, 1);
            ket_f[(f, 0)] = c(1.0);
            for (x, ax) in nh.kraus().iter().enumerate() {
                let coeff = kf[(e, x)];
                if coeff.norm() == 0.0 {
                    continue;
                }
                l += ax.kronecker(&ket_f) * coeff;
            }
        }
        kraus.push(l);
    }
    KrausChannel::new(din, dout * df, kraus)
}

/// Ensemble pushed through a channel, in classical-quantum form.
pub fn cq_state(ens: &Ensemble, ch: &KrausChannel) -> Result<CqState> {
    let conditionals = ens
        .states()
        .iter()
        .map(|s| ch.apply(s))
        .collect::<Result<Vec<_>>>()?;
    Ok(CqState {
        labels: (0..ens.len()).collect(),
        probs: ens.probs().to_vec(),
        conditionals,
    })
}

/// `d²` rank-one elements `S^{-1/2} v v† S^{-1/2}` from Gaussian vectors, with the
/// Gram matrix of elements verified to have full rank `d²`.
pub fn ic_povm<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Povm> {
    if d < 2 {
        return Err(Error::Domain("IC-POVM needs d >= 2".into()));
    }
    let n = d * d;
    for _ in 0..10 {
        let vecs: Vec<CVec> = (0..n).map(|_| gaussian_vector(d, rng)).collect();
        let mut s = Mat::zeros(d, d);
        for v in &vecs {
            s += v * v.adjoint();
        }
        let s_inv_half = eigh(&s)?.map_on_support(SUPPORT_TOL, |l| l.powf(-0.5));
        let elements: Vec<HermitianOperator> = vecs
            .iter()
            .map(|v| {
                let w = &s_inv_half * v;
                HermitianOperator::outer(&w)
            })
            .collect();
        let gram = Mat::from_fn(n, n, |i, j| (elements[i].as_mat() * elements[j].as_mat()).trace());
        if eigh(&gram)?.rank(1e-10) == n {
            return Povm::new(elements);
        }
    }
    Err(Error::Construction(format!(
        "no informationally complete POVM found for d = {d} after 10 attempts"
    )))
}

/// Pure state from a normalized complex Gaussian vector.
pub fn random_pure<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    DensityMatrix::pure(&gaussian_vector(d, rng)).expect("Gaussian vector is nonzero")
}

pub(crate) fn random_unit_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CVec {
    gaussian_vector(d, rng).normalize()
}

/// Normalized Gram matrix `G G†` of a `d × rank` complex Gaussian factor.
pub fn random_density<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> DensityMatrix {
    let g = gaussian_matrix(d, rank.max(1), rng);
    DensityMatrix::normalized_unchecked(&(&g * g.adjoint()))
}

/// Channel sliced from a column-orthonormalized `(k · d_out) × d_in` Gaussian block.
pub fn random_channel<R: Rng + ?Sized>(
    d_in: usize,
    d_out: usize,
    kraus_count: usize,
    rng: &mut R,
) -> Result<KrausChannel> {
    if kraus_count == 0 || kraus_count * d_out < d_in {
        return Err(Error::Domain(format!(
            "{kraus_count} Kraus operators of size {d_out}x{d_in} cannot be trace preserving"
        )));
    }
    let g = gaussian_matrix(kraus_count * d_out, d_in, rng);
    let inv_sqrt = eigh(&(g.adjoint() * &g))?.map(|l| l.powf(-0.5));
    let v = g * inv_sqrt;
    let kraus = (0..kraus_count)
        .map(|x| v.rows(x * d_out, d_out).into_owned())
        .collect();
    KrausChannel::new(d_in, d_out, kraus)
}

/// Two-outcome measure-and-prepare channel with a random POVM `{M, I − M}` and random outputs.
pub fn random_measure_prepare<R: Rng + ?Sized>(d_in: usize, d_out: usize, rng: &mut R) -> Result<KrausChannel> {
    let g = gaussian_matrix(d_in, d_in, rng);
    let s = eigh(&(&g * g.adjoint()))?;
    // Rescale the spectrum into [0, 1] so that both M and I − M are PSD.
    let top = s.lambda_max();
    let m = HermitianOperator::symmetrized(&s.map(|l| l / top * 0.9 + 0.05 * (1.0 - l / top)));
    let rest = HermitianOperator::symmetrized(&(Mat::identity(d_in, d_in) - m.as_mat()));
    let povm = Povm::new(vec![m, rest])?;
    let outputs = vec![random_density(d_out, d_out, rng), random_density(d_out, d_out, rng)];
    eb_from_measure_prepare(&povm, &outputs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Mat, b: &Mat, tol: f64) -> bool {
        max_abs_entry(&(a - b)) <= tol
    }

    fn operator_basis(d: usize) -> Vec<Mat> {
        let mut out = Vec::new();
        for i in 0..d {
            for j in 0..d {
                let mut m = Mat::zeros(d, d);
                m[(i, j)] = c(1.0);
                out.push(m);
            }
        }
        out
    }

    fn plus() -> CVec {
        CVec::from_vec(vec![c(1.0), c(1.0)]).normalize()
    }

    #[test]
    fn density_validation() {
        assert!(matches!(
            DensityMatrix::diagonal(&[0.6, 0.6]),
            Err(Error::InvalidTrace(_))
        ));
        assert!(matches!(DensityMatrix::diagonal(&[1.5, -0.5]), Err(Error::NotPsd(_))));
        let rho = DensityMatrix::pure(&plus()).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ensemble_validation() {
        let s = vec![DensityMatrix::maximally_mixed(2), DensityMatrix::basis(2, 0).unwrap()];
        assert!(Ensemble::new(vec![0.5, 0.6], s.clone()).is_err());
        assert!(Ensemble::new(vec![-0.5, 1.5], s.clone()).is_err());
        let mixed = vec![DensityMatrix::maximally_mixed(2), DensityMatrix::maximally_mixed(3)];
        assert!(Ensemble::uniform(mixed).is_err());
        assert_eq!(Ensemble::uniform(s).unwrap().len(), 2);
    }

    #[test]
    fn apply_examples() {
        let mut rng = rng_from_seed(1);
        let rho = random_density(2, 2, &mut rng);
        let id = KrausChannel::identity(2);
        assert!(close(id.apply(&rho).unwrap().as_mat(), rho.as_mat(), 1e-14));
        let dep = completely_depolarizing(2);
        assert!(close(
            dep.apply(&rho).unwrap().as_mat(),
            DensityMatrix::maximally_mixed(2).as_mat(),
            1e-14
        ));
        let ch = random_channel(3, 2, 3, &mut rng).unwrap();
        let rho = random_density(3, 3, &mut rng);
        // Direct Kraus-sum oracle.
        let mut direct = Mat::zeros(2, 2);
        for k in ch.kraus() {
            direct += k * rho.as_mat() * k.adjoint();
        }
        let out = ch.apply(&rho).unwrap();
        assert!(close(out.as_mat(), &direct, 1e-12));
        assert!((direct.trace().re - 1.0).abs() < 1e-12);
        assert!(eigh(&direct).unwrap().lambda_min() > -1e-12);
    }

    #[test]
    fn apply_rejects_bad_inputs() {
        let ch = KrausChannel::identity(2);
        assert!(matches!(
            ch.apply(&DensityMatrix::maximally_mixed(3)),
            Err(Error::DimensionMismatch { .. })
        ));
        let shrunk = ch.conjugated_by(&HermitianOperator::identity(2).scaled(0.5)).unwrap();
        assert!(!shrunk.is_trace_preserving());
        assert!(matches!(
            shrunk.apply(&DensityMatrix::maximally_mixed(2)),
            Err(Error::NotTracePreserving(_))
        ));
    }

    #[test]
    fn choi_examples() {
        let choi = KrausChannel::identity(2).choi();
        let gamma = CVec::from_vec(vec![c(1.0), c(0.0), c(0.0), c(1.0)]);
        assert!(close(choi.as_mat(), &(&gamma * gamma.adjoint()), 1e-14));
        assert_eq!(choi.eigh().unwrap().rank(1e-10), 1);
        assert!((choi.trace() - 2.0).abs() < 1e-14);

        let choi = completely_depolarizing(2).choi();
        assert!(close(choi.as_mat(), &Mat::identity(4, 4).scale(0.5), 1e-14));

        let mut rng = rng_from_seed(2);
        let ch = random_channel(2, 3, 2, &mut rng).unwrap();
        let reduced = partial_trace_mat(ch.choi().as_mat(), &[3, 2], &[1]).unwrap();
        assert!(op_norm(&(reduced - Mat::identity(2, 2))) <= 1e-9);
    }

    #[test]
    fn measure_prepare_examples() {
        let z = Povm::new(vec![
            HermitianOperator::diagonal(&[1.0, 0.0]),
            HermitianOperator::diagonal(&[0.0, 1.0]),
        ])
        .unwrap();
        let outs = vec![DensityMatrix::basis(2, 0).unwrap(), DensityMatrix::basis(2, 1).unwrap()];
        let ch = eb_from_measure_prepare(&z, &outs).unwrap();
        let pinch = pinching(&Mat::identity(2, 2)).unwrap();
        for x in operator_basis(2) {
            assert!(close(&ch.apply_mat(&x), &pinch.apply_mat(&x), 1e-14));
        }
        assert!(ch.is_trace_preserving());

        let mut rng = rng_from_seed(3);
        let (r1, r2) = (random_density(2, 2, &mut rng), random_density(2, 2, &mut rng));
        let half = Povm::new(vec![
            HermitianOperator::identity(2).scaled(0.5),
            HermitianOperator::identity(2).scaled(0.5),
        ])
        .unwrap();
        let ch = eb_from_measure_prepare(&half, &[r1.clone(), r2.clone()]).unwrap();
        let avg = (r1.as_mat() + r2.as_mat()).scale(0.5);
        for x in operator_basis(2) {
            let want = avg.scale(x.trace().re) + avg.map(|z| z * x.trace().im * Complex64::i());
            assert!(close(&ch.apply_mat(&x), &want, 1e-13));
        }
        for k in ch.kraus() {
            assert_eq!(eigh(&(k.adjoint() * k)).unwrap().rank(1e-10), 1);
        }

        for seed in 0..10 {
            let mut rng = rng_from_seed(100 + seed);
            let ch = random_measure_prepare(2, 2, &mut rng).unwrap();
            assert!(ch.is_trace_preserving());
            assert!(ch.choi_pt_min().unwrap() >= -1e-12);
            assert_eq!(ch.eb_verdict().unwrap(), EbVerdict::Yes);
        }
    }

    #[test]
    fn measure_prepare_rejects_mismatch() {
        let povm = Povm::new(vec![HermitianOperator::identity(2)]).unwrap();
        let outs = vec![DensityMatrix::maximally_mixed(2), DensityMatrix::maximally_mixed(2)];
        assert!(matches!(eb_from_measure_prepare(&povm, &outs), Err(Error::Shape(_))));
        assert!(matches!(
            Povm::new(vec![HermitianOperator::diagonal(&[1.0, 0.5])]),
            Err(Error::InvalidPovm(_))
        ));
    }

    #[test]
    fn stinespring_examples() {
        let v = KrausChannel::identity(2).stinespring().unwrap();
        assert_eq!(v.dim_e, 1);
        assert!(close(&v.matrix, &Mat::identity(2, 2), 1e-15));

        let v = pinching(&Mat::identity(2, 2)).unwrap().stinespring().unwrap();
        assert_eq!(v.dim_e, 2);
        assert!(v.isometry_defect() < 1e-14);

        let mut rng = rng_from_seed(4);
        let ch = random_channel(2, 2, 3, &mut rng).unwrap();
        let v = ch.stinespring().unwrap();
        for x in operator_basis(2) {
            let rebuilt = v.trace_out_env(&x).unwrap();
            assert!(close(&rebuilt, &ch.apply_mat(&x), 1e-9));
        }
        assert!(v.isometry_defect() < 1e-9);

        let shrunk = ch.conjugated_by(&HermitianOperator::identity(2).scaled(0.5)).unwrap();
        assert!(matches!(shrunk.stinespring(), Err(Error::NotTracePreserving(_))));
    }

    #[test]
    fn complement_examples() {
        let comp = KrausChannel::identity(2).complementary();
        assert_eq!(comp.dim_out(), 1);
        let mut rng = rng_from_seed(5);
        let rho = random_density(2, 2, &mut rng);
        assert!((comp.apply(&rho).unwrap().as_mat()[(0, 0)].re - 1.0).abs() < 1e-14);

        let ch = random_channel(2, 2, 3, &mut rng).unwrap();
        let twice = ch.complementary().complementary();
        let a = ch.choi().eigh().unwrap().eigenvalues;
        let b = twice.choi().eigh().unwrap().eigenvalues;
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-8);
        }

        // Pinching: the environment learns the diagonal, so the complement is
        // again a dephasing channel whose output is diag(ρ).
        let pinch = pinching(&Mat::identity(2, 2)).unwrap();
        let comp = pinch.complementary();
        let rho = DensityMatrix::pure(&plus()).unwrap();
        let out = comp.apply(&rho).unwrap();
        assert!(close(out.as_mat(), &Mat::identity(2, 2).scale(0.5), 1e-14));
        assert_eq!(comp.eb_verdict().unwrap(), EbVerdict::Yes);

        // Complement of an EB channel is the same as hadamard_from_eb.
        let eb = random_measure_prepare(2, 2, &mut rng).unwrap();
        assert_eq!(hadamard_from_eb(&eb), eb.complementary());
        let v = eb.stinespring().unwrap();
        for x in operator_basis(2) {
            assert!(close(&v.trace_out_output(&x).unwrap(), &eb.complementary().apply_mat(&x), 1e-12));
        }
    }

    #[test]
    fn conjugation_examples() {
        let mut rng = rng_from_seed(6);
        let ch = random_channel(2, 2, 2, &mut rng).unwrap();
        let same = ch.conjugated_by(&HermitianOperator::identity(2)).unwrap();
        assert_eq!(same.kraus(), ch.kraus());
        let scaled = ch.conjugated_by(&HermitianOperator::identity(2).scaled(3.0)).unwrap();
        let rho = random_density(2, 2, &mut rng);
        assert!(close(
            &scaled.apply_mat(rho.as_mat()),
            &ch.apply_mat(rho.as_mat()).scale(9.0),
            1e-12
        ));
        assert!(matches!(
            ch.conjugated_by(&HermitianOperator::diagonal(&[1.0, -1.0])),
            Err(Error::NotPsd(_))
        ));

        for seed in 0..10 {
            let mut rng = rng_from_seed(200 + seed);
            let eb = random_measure_prepare(2, 2, &mut rng).unwrap();
            let x = random_density(2, 2, &mut rng).into_op();
            let conj = eb.conjugated_by(&x).unwrap();
            assert!(conj.choi_pt_min().unwrap() >= -1e-12);
            assert_eq!(conj.eb_verdict().unwrap(), EbVerdict::Yes);
        }
    }

    #[test]
    fn conjugation_inverse_on_support() {
        let mut rng = rng_from_seed(7);
        let ch = random_channel(2, 2, 2, &mut rng).unwrap();
        let x = random_density(2, 2, &mut rng).into_op();
        let x_inv = linalg::fractional_power(&x, -1.0, SUPPORT_TOL).unwrap();
        let back = ch.conjugated_by(&x).unwrap().conjugated_by(&x_inv).unwrap();
        for b in operator_basis(2) {
            assert!(close(&back.apply_mat(&b), &ch.apply_mat(&b), 1e-8));
        }
    }

    #[test]
    fn eb_verdicts() {
        assert_eq!(KrausChannel::identity(2).eb_verdict().unwrap(), EbVerdict::No);
        assert_eq!(depolarizing(2, 0.9).unwrap().eb_verdict().unwrap(), EbVerdict::Yes);
        // Choi of the qubit depolarizing channel is (1 − p)|γ⟩⟨γ| + p I/2; the partial
        // transpose of |γ⟩⟨γ| is the swap, so the minimum is 3p/2 − 1, negative below p = 2/3.
        let pt = depolarizing(2, 0.5).unwrap().choi_pt_min().unwrap();
        assert!((pt - (1.5 * 0.5 - 1.0)).abs() < 1e-12);
        assert_eq!(depolarizing(2, 0.5).unwrap().eb_verdict().unwrap(), EbVerdict::No);
        assert_eq!(completely_depolarizing(3).eb_verdict().unwrap(), EbVerdict::Inconclusive);
    }

    #[test]
    fn measure_prepare_breaks_entanglement() {
        for seed in 0..10 {
            let mut rng = rng_from_seed(300 + seed);
            let eb = random_measure_prepare(2, 2, &mut rng).unwrap();
            let rho12 = random_pure(4, &mut rng);
            let out = eb.tensor(&KrausChannel::identity(2)).apply(&rho12).unwrap();
            let pt = partial_transpose(out.as_mat(), &[2, 2], 1).unwrap();
            assert!(eigh(&pt).unwrap().lambda_min() >= -1e-12);
        }
    }

    #[test]
    fn depolarizing_examples() {
        let id = depolarizing(2, 0.0).unwrap();
        for x in operator_basis(2) {
            assert!(close(&id.apply_mat(&x), &x, 1e-14));
        }
        let full = depolarizing(3, 1.0).unwrap();
        let rho = random_density(3, 2, &mut rng_from_seed(8));
        assert!(close(
            full.apply(&rho).unwrap().as_mat(),
            DensityMatrix::maximally_mixed(3).as_mat(),
            1e-14
        ));
        let half = depolarizing(2, 0.5).unwrap();
        let out = half.apply(&DensityMatrix::basis(2, 0).unwrap()).unwrap();
        assert!(close(out.as_mat(), HermitianOperator::diagonal(&[0.75, 0.25]).as_mat(), 1e-14));
        assert!(matches!(depolarizing(2, 1.5), Err(Error::Domain(_))));
    }

    #[test]
    fn pinching_examples() {
        let pinch = pinching(&Mat::identity(3, 3)).unwrap();
        let mut rng = rng_from_seed(9);
        let rho = random_density(3, 3, &mut rng);
        let out = pinch.apply(&rho).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { rho.as_mat()[(i, i)] } else { c(0.0) };
                assert!((out.as_mat()[(i, j)] - want).norm() < 1e-14);
            }
        }
        assert!(close(pinch.apply(&out).unwrap().as_mat(), out.as_mat(), 1e-14));

        let u = eigh(&HermitianOperator::symmetrized(&gaussian_matrix(3, 3, &mut rng)).into_mat())
            .unwrap()
            .eigenvectors;
        let pinch = pinching(&u).unwrap();
        let a = pinch.apply(&random_density(3, 3, &mut rng)).unwrap();
        let b = pinch.apply(&random_density(3, 3, &mut rng)).unwrap();
        let comm = a.as_mat() * b.as_mat() - b.as_mat() * a.as_mat();
        assert!(max_abs_entry(&comm) < 1e-12);
        assert!(pinching(&Mat::identity(2, 2).scale(2.0)).is_err());
    }

    #[test]
    fn ic_povm_examples() {
        let mut rng = rng_from_seed(10);
        let povm = ic_povm(2, &mut rng).unwrap();
        assert_eq!(povm.len(), 4);
        let n = povm.len();
        let gram = Mat::from_fn(n, n, |i, j| {
            (povm.elements()[i].as_mat() * povm.elements()[j].as_mat()).trace()
        });
        assert_eq!(eigh(&gram).unwrap().rank(1e-10), 4);

        let rho = random_density(2, 2, &mut rng);
        assert_eq!(povm.probabilities(&rho), povm.probabilities(&rho.clone()));

        // Pair at trace distance 0.1: diag(0.5, 0.5) vs diag(0.6, 0.4).
        let a = DensityMatrix::diagonal(&[0.5, 0.5]).unwrap();
        let b = DensityMatrix::diagonal(&[0.6, 0.4]).unwrap();
        let (pa, pb) = (povm.probabilities(&a), povm.probabilities(&b));
        assert!(pa.iter().zip(&pb).any(|(x, y)| (x - y).abs() > 0.0));
        assert!(ic_povm(1, &mut rng).is_err());
    }

    #[test]
    fn cq_state_examples() {
        let mut rng = rng_from_seed(11);
        let ens = Ensemble::uniform(vec![random_pure(2, &mut rng)]).unwrap();
        let ch = random_channel(2, 2, 2, &mut rng).unwrap();
        let cq = cq_state(&ens, &ch).unwrap();
        assert_eq!(cq.conditionals.len(), 1);

        let ens = Ensemble::new(
            vec![0.2, 0.3, 0.5],
            (0..3).map(|_| random_density(3, 2, &mut rng)).collect(),
        )
        .unwrap();
        let cq = cq_state(&ens, &completely_depolarizing(3)).unwrap();
        for cond in &cq.conditionals {
            assert!(close(cond.as_mat(), DensityMatrix::maximally_mixed(3).as_mat(), 1e-14));
        }
        let flat = cq.flatten();
        assert_eq!(flat.dim(), 9);
        assert!((flat.trace() - 1.0).abs() < 1e-13);
        assert!(cq_state(&ens, &KrausChannel::identity(2)).is_err());
    }

    #[test]
    fn random_sampler_examples() {
        let mut rng = rng_from_seed(12);
        let psi = random_pure(3, &mut rng);
        assert!((psi.purity() - 1.0).abs() < 1e-10);
        let rho = random_density(4, 2, &mut rng);
        assert_eq!(rho.op().eigh().unwrap().rank(SUPPORT_TOL), 2);
        let ch = random_channel(3, 2, 4, &mut rng).unwrap();
        assert!(ch.tp_defect() <= 1e-9);
        assert!(random_channel(4, 1, 2, &mut rng).is_err());

        let again = random_pure(3, &mut rng_from_seed(12));
        assert_eq!(again, psi);
    }

    #[test]
    fn smooth_hadamard_examples() {
        let nh = qubit_dephasing(0.7);
        assert_eq!(nh.complementary().eb_verdict().unwrap(), EbVerdict::Yes);

        let m0 = smooth_hadamard(&nh, 0.0).unwrap();
        assert!(m0.is_trace_preserving());
        let df = nh.kraus_count() * nh.kraus_count();
        let mut ket0 = Mat::zeros(df, df);
        ket0[(0, 0)] = c(1.0);
        for x in operator_basis(2) {
            let out = m0.apply_mat(&x);
            let reduced = partial_trace_mat(&out, &[2, df], &[0]).unwrap();
            assert!(close(&reduced, &nh.apply_mat(&x), 1e-12));
            assert!(close(&out, &nh.apply_mat(&x).kronecker(&ket0), 1e-12));
        }

        for p in [0.1, 0.4, 1.0] {
            let mp = smooth_hadamard(&nh, p).unwrap();
            assert!(mp.is_trace_preserving());
            let comp = mp.complementary();
            let want = nh.complementary().then(&depolarizing(2, p).unwrap()).unwrap();
            for x in operator_basis(2) {
                assert!(close(&comp.apply_mat(&x), &want.apply_mat(&x), 1e-12));
            }
            let (a, b) = (comp.choi().eigh().unwrap(), want.choi().eigh().unwrap());
            for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
                assert!((x - y).abs() < 1e-10);
            }
            // Smoothing can only move the complement towards the interior.
            assert_eq!(comp.eb_verdict().unwrap(), EbVerdict::Yes);
            let reduced_ok = operator_basis(2).iter().all(|x| {
                let out = mp.apply_mat(x);
                close(&partial_trace_mat(&out, &[2, df], &[0]).unwrap(), &nh.apply_mat(x), 1e-12)
            });
            assert!(reduced_ok);
        }

        // p = 1: the complement is the constant map to I/|E| after nh^c.
        let comp = smooth_hadamard(&nh, 1.0).unwrap().complementary();
        let constant = nh.complementary().then(&replacer(2, &DensityMatrix::maximally_mixed(2)).unwrap()).unwrap();
        let (a, b) = (comp.choi().eigh().unwrap(), constant.choi().eigh().unwrap());
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            assert!((x - y).abs() < 1e-10);
        }
        assert!(smooth_hadamard(&nh, -0.1).is_err());
    }

    #[test]
    fn interior_verdicts() {
        let nh = qubit_dephasing(0.7);
        assert_eq!(nh.complementary().eb_interior_verdict(EB_INTERIOR_MARGIN).unwrap(), EbVerdict::No);
        let smoothed = smooth_hadamard(&nh, 0.1).unwrap().complementary();
        assert_eq!(smoothed.eb_interior_verdict(EB_INTERIOR_MARGIN).unwrap(), EbVerdict::Yes);
    }

    #[test]
    fn weyl_depolarizing_is_unital() {
        let ch = depolarizing(3, 0.3).unwrap();
        assert!(close(&ch.apply_mat(&Mat::identity(3, 3)), &Mat::identity(3, 3), 1e-13));
        assert!(ch.is_trace_preserving());
    }
}
