//! Dense complex and Hermitian matrix algebra.
//!
//! Every matrix function goes through a full Hermitian eigendecomposition.
//! Functions that are singular at zero (negative powers, logarithms) are
//! applied as pseudo-functions: eigenvalues at or below `tol · λ_max` are
//! treated as outside the support and mapped to zero.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

pub type Mat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Maximum entrywise asymmetry accepted when building a [`HermitianOperator`].
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Default relative cutoff `tol · λ_max` separating the support from the kernel.
pub const SUPPORT_TOL: f64 = 1e-10;

const EIGEN_MAX_ITERS: usize = 10_000;

#[inline]
pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// A dense complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(Mat);

impl ComplexMatrix {
    pub fn new(m: Mat) -> Result<Self> {
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(m))
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, data: &[Complex64]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Self::new(Mat::from_row_slice(rows, cols, data))
    }

    pub fn identity(n: usize) -> Self {
        Self(Mat::identity(n, n))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn as_mat(&self) -> &Mat {
        &self.0
    }

    pub fn into_mat(self) -> Mat {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// Row-major copy of the entries.
    pub fn row_major(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.0.len());
        for i in 0..self.0.nrows() {
            for j in 0..self.0.ncols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }
}

/// A Hermitian operator, stored symmetrized as `(H + H†)/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator(Mat);

impl HermitianOperator {
    /// Validates squareness, finiteness and Hermiticity within [`HERMITICITY_TOL`].
    pub fn new(m: Mat) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare(m.nrows(), m.ncols()));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let asym = hermiticity_defect(&m);
        if asym > HERMITICITY_TOL {
            return Err(Error::NotHermitian(asym));
        }
        Ok(Self::symmetrized(&m))
    }

    /// Hermitian part of `m` without validation.
    pub fn symmetrized(m: &Mat) -> Self {
        let mut h = m + m.adjoint();
        h.scale_mut(0.5);
        Self(h)
    }

    pub fn identity(d: usize) -> Self {
        Self(Mat::identity(d, d))
    }

    pub fn zeros(d: usize) -> Self {
        Self(Mat::zeros(d, d))
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let d = values.len();
        let mut m = Mat::zeros(d, d);
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = c(*v);
        }
        Self(m)
    }

    /// The rank-one operator `|v⟩⟨v|` (no normalization).
    pub fn outer(v: &CVec) -> Self {
        Self(v * v.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_mat(&self) -> &Mat {
        &self.0
    }

    pub fn into_mat(self) -> Mat {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    pub fn eigh(&self) -> Result<Spectrum> {
        herm_eigendecompose(self)
    }
}

/// Largest entrywise deviation `|H_ij − conj(H_ji)|`.
pub fn hermiticity_defect(m: &Mat) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues in ascending order with the matching unitary of eigenvectors.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Mat,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    /// Absolute cutoff `tol · max(λ_max, 0)` below which eigenvalues are off-support.
    pub fn support_threshold(&self, tol: f64) -> f64 {
        tol * self.lambda_max().max(0.0)
    }

    pub fn rank(&self, tol: f64) -> usize {
        let thr = self.support_threshold(tol);
        self.eigenvalues.iter().filter(|&&l| l > thr).count()
    }

    /// `V f(Λ) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Mat {
        let vals: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        self.with_values(&vals)
    }

    /// `V f(Λ) V†` with `f` applied on the support only; kernel eigenvalues map to zero.
    pub fn map_on_support(&self, tol: f64, f: impl Fn(f64) -> f64) -> Mat {
        let thr = self.support_threshold(tol);
        let vals: Vec<f64> = self
            .eigenvalues
            .iter()
            .map(|&l| if l > thr { f(l) } else { 0.0 })
            .collect();
        self.with_values(&vals)
    }

    pub fn with_values(&self, vals: &[f64]) -> Mat {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &lam) in vals.iter().enumerate() {
            scaled.column_mut(j).scale_mut(lam);
        }
        let out = scaled * v.adjoint();
        HermitianOperator::symmetrized(&out).into_mat()
    }

    pub fn reconstruct(&self) -> Mat {
        self.with_values(&self.eigenvalues)
    }

    pub fn eigenvector(&self, j: usize) -> CVec {
        self.eigenvectors.column(j).into_owned()
    }

    /// Errors if some eigenvalue lies below `−tol · max|λ|`.
    pub fn check_psd(&self, tol: f64) -> Result<()> {
        let scale = self
            .eigenvalues
            .iter()
            .fold(0.0f64, |acc, l| acc.max(l.abs()));
        let lmin = self.lambda_min();
        if lmin < -tol * scale {
            return Err(Error::NotPsd(lmin));
        }
        Ok(())
    }
}

/// Full Hermitian eigendecomposition with eigenvalues sorted ascending.
pub fn herm_eigendecompose(h: &HermitianOperator) -> Result<Spectrum> {
    eigh(h.as_mat())
}

/// Eigendecomposition of a matrix assumed Hermitian (only its Hermitian part is used).
pub fn eigh(m: &Mat) -> Result<Spectrum> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::NotSquare(n, m.ncols()));
    }
    if n == 0 {
        return Ok(Spectrum {
            eigenvalues: Vec::new(),
            eigenvectors: Mat::zeros(0, 0),
        });
    }
    if n == 1 {
        return Ok(Spectrum {
            eigenvalues: vec![m[(0, 0)].re],
            eigenvectors: Mat::identity(1, 1),
        });
    }
    let sym = HermitianOperator::symmetrized(m).into_mat();
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, EIGEN_MAX_ITERS)
        .ok_or(Error::EigenNonConvergence(n))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    if eigenvalues.iter().any(|l| !l.is_finite()) {
        return Err(Error::EigenNonConvergence(n));
    }
    let mut eigenvectors = Mat::zeros(n, n);
    for (j, &k) in order.iter().enumerate() {
        eigenvectors.set_column(j, &eig.eigenvectors.column(k));
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvector of the largest eigenvalue of a Hermitian matrix.
pub fn top_eigenvector(m: &Mat) -> Result<(f64, CVec)> {
    let s = eigh(m)?;
    let j = s.dim() - 1;
    Ok((s.eigenvalues[j], s.eigenvector(j)))
}

/// Pseudo-power `A^t` on the support of a PSD operator.
///
/// Eigenvalues above `support_tol · λ_max` are raised to `t`; the rest map to zero.
pub fn fractional_power(a: &HermitianOperator, t: f64, support_tol: f64) -> Result<HermitianOperator> {
    let s = a.eigh()?;
    s.check_psd(support_tol)?;
    Ok(HermitianOperator(s.map_on_support(support_tol, |l| l.powf(t))))
}

/// Schatten α-norm `(Σ σᵢ^α)^{1/α}`; `f64::INFINITY` selects the operator norm.
pub fn schatten_norm(x: &Mat, alpha: f64) -> Result<f64> {
    if alpha.is_nan() || alpha < 1.0 {
        return Err(Error::Domain(format!("Schatten norm needs alpha >= 1, got {alpha}")));
    }
    let sv = x.clone().singular_values();
    Ok(schatten_from_values(sv.iter().copied(), alpha))
}

/// Schatten norm of a Hermitian matrix from its eigenvalues (singular values are `|λ|`).
pub(crate) fn schatten_from_values(values: impl Iterator<Item = f64>, alpha: f64) -> f64 {
    let vals: Vec<f64> = values.map(f64::abs).collect();
    let top = vals.iter().fold(0.0f64, |a, &b| a.max(b));
    if top == 0.0 {
        return 0.0;
    }
    if alpha.is_infinite() {
        return top;
    }
    let sum: f64 = vals.iter().map(|v| (v / top).powf(alpha)).sum();
    top * sum.powf(1.0 / alpha)
}

/// Operator norm (largest singular value).
pub fn op_norm(x: &Mat) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    x.clone()
        .singular_values()
        .iter()
        .fold(0.0f64, |a, &b| a.max(b))
}

/// Largest entry modulus.
pub fn max_abs_entry(x: &Mat) -> f64 {
    x.iter().fold(0.0f64, |a, z| a.max(z.norm()))
}

/// Kronecker product; row index `(i_A, i_B)` maps to `i_A · rows(B) + i_B`.
pub fn tensor_product(a: &Mat, b: &Mat) -> Mat {
    a.kronecker(b)
}

/// Kronecker product of a list of matrices, left to right.
pub fn tensor_all<'a>(mats: impl IntoIterator<Item = &'a Mat>) -> Mat {
    let mut out = Mat::identity(1, 1);
    for m in mats {
        out = out.kronecker(m);
    }
    out
}

/// Digits of a row-major multi-index.
fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
    out
}

fn check_dims(n: usize, dims: &[usize]) -> Result<()> {
    let prod: usize = dims.iter().product();
    if prod != n || dims.is_empty() {
        return Err(Error::Shape(format!(
            "subsystem dimensions {dims:?} do not multiply to {n}"
        )));
    }
    Ok(())
}

/// Partial trace keeping the subsystems listed in `keep` (in their original order).
pub fn partial_trace(m: &HermitianOperator, dims: &[usize], keep: &[usize]) -> Result<HermitianOperator> {
    Ok(HermitianOperator::symmetrized(&partial_trace_mat(
        m.as_mat(),
        dims,
        keep,
    )?))
}

/// Partial trace of an arbitrary square matrix.
pub fn partial_trace_mat(m: &Mat, dims: &[usize], keep: &[usize]) -> Result<Mat> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::NotSquare(n, m.ncols()));
    }
    check_dims(n, dims)?;
    let mut kept = vec![false; dims.len()];
    for &k in keep {
        if k >= dims.len() || kept[k] {
            return Err(Error::Shape(format!("invalid keep set {keep:?} for {dims:?}")));
        }
        kept[k] = true;
    }
    let kept_dims: Vec<usize> = (0..dims.len()).filter(|&k| kept[k]).map(|k| dims[k]).collect();
    let out_dim: usize = kept_dims.iter().product();
    let split: Vec<(usize, usize)> = (0..n)
        .map(|idx| {
            let d = digits(idx, dims);
            let (mut ki, mut ti) = (0usize, 0usize);
            for k in 0..dims.len() {
                if kept[k] {
                    ki = ki * dims[k] + d[k];
                } else {
                    ti = ti * dims[k] + d[k];
                }
            }
            (ki, ti)
        })
        .collect();
    let mut out = Mat::zeros(out_dim, out_dim);
    for r in 0..n {
        let (kr, tr) = split[r];
        for col in 0..n {
            let (kc, tc) = split[col];
            if tr == tc {
                out[(kr, kc)] += m[(r, col)];
            }
        }
    }
    Ok(out)
}

/// Partial transpose on one subsystem.
pub fn partial_transpose(m: &Mat, dims: &[usize], system: usize) -> Result<Mat> {
    let n = m.nrows();
    check_dims(n, dims)?;
    if system >= dims.len() {
        return Err(Error::Shape(format!("no subsystem {system} in {dims:?}")));
    }
    let weight: usize = dims[system + 1..].iter().product();
    let mut out = Mat::zeros(n, n);
    for r in 0..n {
        let dr = (r / weight) % dims[system];
        for col in 0..n {
            let dc = (col / weight) % dims[system];
            let r2 = r - dr * weight + dc * weight;
            let c2 = col - dc * weight + dr * weight;
            out[(r2, c2)] = m[(r, col)];
        }
    }
    Ok(out)
}

/// Projector onto the eigenspaces with `λ > tol · λ_max`.
pub fn support_projector(a: &HermitianOperator, tol: f64) -> Result<HermitianOperator> {
    let s = a.eigh()?;
    s.check_psd(tol.max(SUPPORT_TOL))?;
    Ok(HermitianOperator(s.map_on_support(tol, |_| 1.0)))
}

/// Whether `supp(A) ⊆ supp(B)`: `‖(I − P_B) A (I − P_B)‖∞ ≤ tol · ‖A‖∞`.
pub fn support_contained(a: &HermitianOperator, b: &HermitianOperator, tol: f64) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: b.dim(),
            found: a.dim(),
        });
    }
    let sb = b.eigh()?;
    support_contained_spec(a.as_mat(), &sb, tol)
}

pub(crate) fn support_contained_spec(a: &Mat, sb: &Spectrum, tol: f64) -> Result<bool> {
    let thr = sb.support_threshold(tol);
    if sb.eigenvalues.iter().all(|&l| l > thr) {
        return Ok(true);
    }
    let complement = sb.map(|l| if l > thr { 0.0 } else { 1.0 });
    let leak = &complement * a * &complement;
    let leak_norm = eigh(&leak)?
        .eigenvalues
        .iter()
        .fold(0.0f64, |m, l| m.max(l.abs()));
    let a_norm = eigh(a)?
        .eigenvalues
        .iter()
        .fold(0.0f64, |m, l| m.max(l.abs()));
    Ok(leak_norm <= tol * a_norm)
}

/// Adjoint Fréchet derivative of the spectral function `f` at the operator with
/// spectrum `s`, applied to `h`: `U (Γ ∘ (U† h U)) U†`, where `Γ` holds the
/// divided differences of `f` over the eigenvalues.
pub(crate) fn frechet(s: &Spectrum, f: impl Fn(f64) -> f64, fprime: impl Fn(f64) -> f64, h: &Mat) -> Mat {
    let u = &s.eigenvectors;
    let mut inner = u.adjoint() * h * u;
    let fv: Vec<f64> = s.eigenvalues.iter().map(|&l| f(l)).collect();
    let n = s.dim();
    for i in 0..n {
        for j in 0..n {
            let (li, lj) = (s.eigenvalues[i], s.eigenvalues[j]);
            let gap = li - lj;
            let scale = li.abs().max(lj.abs()).max(1e-300);
            let g = if gap.abs() <= 1e-9 * scale {
                fprime(0.5 * (li + lj))
            } else {
                (fv[i] - fv[j]) / gap
            };
            inner[(i, j)] *= g;
        }
    }
    let out = u * inner * u.adjoint();
    HermitianOperator::symmetrized(&out).into_mat()
}

/// Trace distance `½‖A − B‖₁`.
pub fn trace_distance(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    let diff = a.as_mat() - b.as_mat();
    let s = eigh(&diff)?;
    Ok(0.5 * s.eigenvalues.iter().map(|l| l.abs()).sum::<f64>())
}
