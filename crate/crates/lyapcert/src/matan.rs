//! Small dense matrix analysis.
//!
//! The building blocks for everything else: operator norms, singular
//! spectra, gap ratio gr(L) = s₁/s₂, expansion rift ρ of a sequence,
//! the matrix absolute value |M| = √(MᵀM), logs and exponentials of
//! Hermitian matrices, and complex fractional powers P^{1+it}.
//!
//! All matrices are immutable values and all operations are pure
//! functions, so everything here is safe to share across threads.
//! Matrices are tiny (d ≤ 8 in practice); decompositions go through the
//! deterministic Jacobi solvers in [`crate::eigen`]. Operator norms are
//! pre-scaled by the largest entry so that squaring inside the Gram
//! matrix cannot overflow even for entries near 1e300.

use num_complex::Complex64;

use crate::eigen;
use crate::error::{Error, Result};

/// Dense d×d real matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    dim: usize,
    data: Vec<f64>,
}

/// Dense d×d complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

/// Complex Hermitian matrix; validated and exactly symmetrized on
/// construction (asymmetry up to 1e-12 relative to the entry scale is
/// absorbed, anything larger is rejected).
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    m: ComplexMatrix,
}

/// Sorted singular values s₁ ≥ s₂ ≥ … ≥ s_d ≥ 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSpectrum {
    pub values: Vec<f64>,
}

impl RealMatrix {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::InvalidMatrix(format!(
                "expected {dim}x{dim} entries, got {}",
                data.len()
            )));
        }
        if !data.iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite entry".into()));
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for r in rows {
            if r.len() != dim {
                return Err(Error::InvalidMatrix("ragged rows".into()));
            }
            data.extend_from_slice(r);
        }
        Self::new(dim, data)
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1.0;
        }
        Self { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![0.0; dim * dim] }
    }

    pub fn diag(entries: &[f64]) -> Self {
        let dim = entries.len();
        let mut m = Self::zeros(dim);
        for (i, &x) in entries.iter().enumerate() {
            m.data[i * dim + i] = x;
        }
        m
    }

    /// 2×2 rotation by `theta`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self { dim: 2, data: vec![c, -s, s, c] }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.data[j * d + i] = self.data[i * d + j];
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let d = self.dim;
        assert_eq!(d, other.dim, "dimension mismatch");
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a != 0.0 {
                    for j in 0..d {
                        out.data[i * d + j] += a * other.data[k * d + j];
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Self { dim: self.dim, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Self { dim: self.dim, data }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|x| c * x).collect() }
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    pub fn det(&self) -> f64 {
        eigen::det_lu(&self.data, self.dim)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Largest |(M - Mᵀ)/entry-scale|, zero for symmetric matrices.
    pub fn asymmetry(&self) -> f64 {
        let d = self.dim;
        let mut a = 0.0f64;
        for i in 0..d {
            for j in (i + 1)..d {
                a = a.max((self.data[i * d + j] - self.data[j * d + i]).abs());
            }
        }
        a
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    /// Column of the matrix as a vector.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dim;
        assert_eq!(x.len(), d);
        let mut y = vec![0.0; d];
        for i in 0..d {
            let mut s = 0.0;
            for j in 0..d {
                s += self.data[i * d + j] * x[j];
            }
            y[i] = s;
        }
        y
    }
}

impl ComplexMatrix {
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::InvalidMatrix(format!(
                "expected {dim}x{dim} entries, got {}",
                data.len()
            )));
        }
        if !data.iter().all(|x| x.re.is_finite() && x.im.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite entry".into()));
        }
        Ok(Self { dim, data })
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Self { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.data[j * d + i] = self.data[i * d + j].conj();
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let d = self.dim;
        assert_eq!(d, other.dim, "dimension mismatch");
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a != Complex64::new(0.0, 0.0) {
                    for j in 0..d {
                        out.data[i * d + j] += a * other.data[k * d + j];
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Self { dim: self.dim, data }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&x| c * x).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, x| m.max(x.norm()))
    }

    pub fn det2(&self) -> Complex64 {
        assert_eq!(self.dim, 2);
        self.data[0] * self.data[3] - self.data[1] * self.data[2]
    }

    /// Largest Hermitian asymmetry |M_ij - conj(M_ji)|.
    pub fn herm_asymmetry(&self) -> f64 {
        let d = self.dim;
        let mut a = 0.0f64;
        for i in 0..d {
            a = a.max(self.data[i * d + i].im.abs());
            for j in (i + 1)..d {
                a = a.max((self.data[i * d + j] - self.data[j * d + i].conj()).norm());
            }
        }
        a
    }
}

impl HermitianMatrix {
    /// Validates near-Hermitian input and symmetrizes it exactly as
    /// (H + H†)/2. Asymmetry beyond `1e-12 * max(1, scale)` is rejected
    /// rather than silently absorbed.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let scale = m.max_abs().max(1.0);
        let asym = m.herm_asymmetry();
        if asym > 1e-12 * scale {
            return Err(Error::InvalidMatrix(format!(
                "Hermitian asymmetry {asym:.3e} exceeds tolerance at scale {scale:.3e}"
            )));
        }
        let d = m.dim;
        let mut sym = m;
        for i in 0..d {
            sym.data[i * d + i] = Complex64::new(sym.data[i * d + i].re, 0.0);
            for j in (i + 1)..d {
                let avg = 0.5 * (sym.data[i * d + j] + sym.data[j * d + i].conj());
                sym.data[i * d + j] = avg;
                sym.data[j * d + i] = avg.conj();
            }
        }
        Ok(Self { m: sym })
    }

    pub fn from_real_symmetric(m: &RealMatrix) -> Result<Self> {
        Self::new(m.to_complex())
    }

    pub fn zeros(dim: usize) -> Self {
        Self { m: ComplexMatrix::zeros(dim) }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.m.dim
    }

    pub fn as_complex(&self) -> &ComplexMatrix {
        &self.m
    }

    /// Real and guaranteed-real eigenvalues (descending) plus unitary
    /// eigenvector columns.
    pub fn eigen(&self) -> (Vec<f64>, ComplexMatrix) {
        let (vals, vecs) = eigen::herm_eigen(&self.m.data, self.m.dim);
        (vals, ComplexMatrix { dim: self.m.dim, data: vecs })
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { m: self.m.add(&other.m) }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { m: self.m.scale(Complex64::new(c, 0.0)) }
    }

    pub fn max_abs(&self) -> f64 {
        self.m.max_abs()
    }
}

// ---------------------------------------------------------------------------
// Operator norms and singular values
// ---------------------------------------------------------------------------

/// Operator norm (largest singular value) of a real matrix.
///
/// Exact closed form for d ≤ 2; Jacobi eigendecomposition of MᵀM above
/// that. Relative accuracy ~1e-14 on well-scaled inputs.
pub fn op_norm(m: &RealMatrix) -> Result<f64> {
    if !m.is_finite() {
        return Err(Error::InvalidMatrix("non-finite entry in op_norm".into()));
    }
    Ok(op_norm_unchecked(m))
}

pub(crate) fn op_norm_unchecked(m: &RealMatrix) -> f64 {
    let d = m.dim;
    let s = m.max_abs();
    if s == 0.0 {
        return 0.0;
    }
    match d {
        1 => m.data[0].abs(),
        2 => {
            let a = m.data[0] / s;
            let b = m.data[1] / s;
            let c = m.data[2] / s;
            let e = m.data[3] / s;
            let fro2 = a * a + b * b + c * c + e * e;
            let det = a * e - b * c;
            let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt();
            s * (0.5 * (fro2 + disc)).sqrt()
        }
        _ => {
            let scaled = m.scale(1.0 / s);
            let gram = scaled.transpose().mul(&scaled);
            let (vals, _) = eigen::sym_eigen(&gram.data, d);
            s * vals[0].max(0.0).sqrt()
        }
    }
}

/// Operator norm of a complex matrix.
pub fn op_norm_c(m: &ComplexMatrix) -> Result<f64> {
    if !m.data.iter().all(|x| x.re.is_finite() && x.im.is_finite()) {
        return Err(Error::InvalidMatrix("non-finite entry in op_norm_c".into()));
    }
    let d = m.dim;
    let s = m.max_abs();
    if s == 0.0 {
        return Ok(0.0);
    }
    if d == 1 {
        return Ok(m.data[0].norm());
    }
    let scaled = m.scale(Complex64::new(1.0 / s, 0.0));
    if d == 2 {
        let fro2: f64 = scaled.data.iter().map(|x| x.norm_sqr()).sum();
        let det = scaled.det2().norm_sqr();
        let disc = (fro2 * fro2 - 4.0 * det).max(0.0).sqrt();
        return Ok(s * (0.5 * (fro2 + disc)).sqrt());
    }
    let gram = scaled.adjoint().mul(&scaled);
    let (vals, _) = eigen::herm_eigen(&gram.data, d);
    Ok(s * vals[0].max(0.0).sqrt())
}

/// All singular values, descending. Consistent with [`op_norm`] (s₁) and
/// with |det M| = ∏ sᵢ.
pub fn singular_values(m: &RealMatrix) -> Result<SingularSpectrum> {
    if !m.is_finite() {
        return Err(Error::InvalidMatrix("non-finite entry".into()));
    }
    let d = m.dim;
    let s = m.max_abs();
    if s == 0.0 {
        return Ok(SingularSpectrum { values: vec![0.0; d] });
    }
    let scaled = m.scale(1.0 / s);
    let gram = scaled.transpose().mul(&scaled);
    let (vals, _) = eigen::sym_eigen(&gram.data, d);
    let values = vals.iter().map(|&x| s * x.max(0.0).sqrt()).collect();
    Ok(SingularSpectrum { values })
}

/// Gap ratio gr(M) = s₁/s₂ ≥ 1 for invertible M with d ≥ 2.
pub fn gap_ratio(m: &RealMatrix) -> Result<f64> {
    if m.dim < 2 {
        return Err(Error::DegenerateMatrix("gap ratio needs d >= 2".into()));
    }
    let sv = singular_values(m)?;
    let s2 = sv.values[1];
    if s2 <= 0.0 {
        return Err(Error::DegenerateMatrix("second singular value is zero".into()));
    }
    Ok(sv.values[0] / s2)
}

/// log gr(M); avoids overflow when s₁/s₂ exceeds the f64 range.
pub fn log_gap_ratio(m: &RealMatrix) -> Result<f64> {
    if m.dim < 2 {
        return Err(Error::DegenerateMatrix("gap ratio needs d >= 2".into()));
    }
    let sv = singular_values(m)?;
    let s2 = sv.values[1];
    if s2 <= 0.0 {
        return Err(Error::DegenerateMatrix("second singular value is zero".into()));
    }
    Ok(sv.values[0].ln() - s2.ln())
}

/// Expansion rift ρ(L₁,…,Lₙ) = ‖Lₙ⋯L₁‖ / ∏‖Lₖ‖ ∈ (0,1].
///
/// Computed through norm-renormalized partial products so arbitrarily long
/// sequences neither overflow nor underflow.
pub fn expansion_rift(seq: &[RealMatrix]) -> Result<f64> {
    Ok(log_expansion_rift(seq)?.exp())
}

/// ln ρ(L₁,…,Lₙ) ≤ 0.
pub fn log_expansion_rift(seq: &[RealMatrix]) -> Result<f64> {
    if seq.len() < 2 {
        return Err(Error::DegenerateMatrix("expansion rift needs length >= 2".into()));
    }
    let d = seq[0].dim;
    let mut q = RealMatrix::identity(d);
    let mut log_rift = 0.0f64;
    for l in seq {
        if l.dim != d {
            return Err(Error::InvalidMatrix("dimension mismatch in sequence".into()));
        }
        let next = l.mul(&q);
        let norm_next = op_norm(&next)?;
        let norm_l = op_norm(l)?;
        if norm_next == 0.0 || norm_l == 0.0 {
            return Err(Error::DegenerateMatrix("singular matrix in sequence".into()));
        }
        // step factor ‖L q‖ / ‖L‖ ∈ (0, 1] since ‖q‖ = 1
        log_rift += norm_next.ln() - norm_l.ln();
        q = next.scale(1.0 / norm_next);
    }
    Ok(log_rift)
}

// ---------------------------------------------------------------------------
// Matrix absolute value, logarithm, exponential, complex powers
// ---------------------------------------------------------------------------

/// |M| = √(MᵀM), the symmetric PSD polar factor. Satisfies |M|² = MᵀM
/// and ‖|M|‖ = ‖M‖.
///
/// Symmetric inputs take the direct route |M| = Q|Λ|Qᵀ, which keeps tiny
/// singular values that the Gram matrix would lose to squaring.
pub fn abs_part(m: &RealMatrix) -> Result<RealMatrix> {
    if !m.is_finite() {
        return Err(Error::InvalidMatrix("non-finite entry".into()));
    }
    let d = m.dim;
    let s = m.max_abs();
    if s == 0.0 {
        return Ok(RealMatrix::zeros(d));
    }
    if m.asymmetry() <= 1e-12 * s {
        let sym = m.add(&m.transpose()).scale(0.5);
        let (vals, vecs) = eigen::sym_eigen(&sym.data, d);
        let sigmas: Vec<f64> = vals.iter().map(|&x| x.abs()).collect();
        return Ok(assemble_sym(&sigmas, &vecs, d));
    }
    let scaled = m.scale(1.0 / s);
    let gram = scaled.transpose().mul(&scaled);
    let (vals, vecs) = eigen::sym_eigen(&gram.data, d);
    // |M| = V diag(σ) Vᵀ with σ = s * sqrt(eig)
    let sigmas: Vec<f64> = vals.iter().map(|&x| s * x.max(0.0).sqrt()).collect();
    Ok(assemble_sym(&sigmas, &vecs, d))
}

/// log|M| for invertible M: V diag(ln σᵢ) Vᵀ, real symmetric.
///
/// Symmetric inputs use ln|λᵢ(M)| directly; general inputs go through
/// the Gram matrix, whose smallest eigenvalue must stay representable —
/// otherwise log|M| is not numerically recoverable from the entries and
/// the call fails rather than returning garbage.
pub fn log_abs(m: &RealMatrix) -> Result<RealMatrix> {
    if !m.is_finite() {
        return Err(Error::InvalidMatrix("non-finite entry".into()));
    }
    let d = m.dim;
    let s = m.max_abs();
    if s == 0.0 {
        return Err(Error::NotPositiveDefinite("zero matrix has no log".into()));
    }
    if m.asymmetry() <= 1e-12 * s {
        let sym = m.add(&m.transpose()).scale(0.5);
        let (vals, vecs) = eigen::sym_eigen(&sym.data, d);
        let mut logs = Vec::with_capacity(d);
        for &x in &vals {
            let a = x.abs();
            if a < 1e-300 {
                return Err(Error::NotPositiveDefinite("singular symmetric matrix".into()));
            }
            logs.push(a.ln());
        }
        return Ok(assemble_sym(&logs, &vecs, d));
    }
    let scaled = m.scale(1.0 / s);
    let gram = scaled.transpose().mul(&scaled);
    let (vals, vecs) = eigen::sym_eigen(&gram.data, d);
    let ln_s = s.ln();
    let mut logs = Vec::with_capacity(d);
    for &x in &vals {
        if x <= 1e-26 {
            return Err(Error::NotPositiveDefinite(format!(
                "singular value ratio {:.3e} too small for log|M|",
                x.max(0.0).sqrt()
            )));
        }
        logs.push(ln_s + 0.5 * x.ln());
    }
    Ok(assemble_sym(&logs, &vecs, d))
}

/// Logarithm of a positive definite Hermitian matrix.
///
/// Eigenvalues below `1e-13 * ‖P‖` are rejected as not positive definite.
pub fn log_pd(p: &HermitianMatrix) -> Result<HermitianMatrix> {
    let (vals, vecs) = p.eigen();
    let scale = vals.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return Err(Error::NotPositiveDefinite("zero matrix".into()));
    }
    let tol = 1e-13 * scale;
    for &v in &vals {
        if v <= tol {
            return Err(Error::NotPositiveDefinite(format!(
                "eigenvalue {v:.3e} <= tolerance {tol:.3e}"
            )));
        }
    }
    let logs: Vec<f64> = vals.iter().map(|&v| v.ln()).collect();
    Ok(assemble_herm(&logs, &vecs))
}

/// Real-symmetric positive definite logarithm.
pub fn log_pd_sym(p: &RealMatrix) -> Result<RealMatrix> {
    if p.asymmetry() > 1e-12 * p.max_abs().max(1.0) {
        return Err(Error::InvalidMatrix("matrix is not symmetric".into()));
    }
    let (vals, vecs) = eigen::sym_eigen(&p.data, p.dim);
    let scale = vals.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return Err(Error::NotPositiveDefinite("zero matrix".into()));
    }
    let tol = 1e-13 * scale;
    for &v in &vals {
        if v <= tol {
            return Err(Error::NotPositiveDefinite(format!(
                "eigenvalue {v:.3e} <= tolerance {tol:.3e}"
            )));
        }
    }
    let logs: Vec<f64> = vals.iter().map(|&v| v.ln()).collect();
    Ok(assemble_sym(&logs, &vecs, p.dim))
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn lambda_max(h: &HermitianMatrix) -> f64 {
    let (vals, _) = h.eigen();
    vals[0]
}

/// Largest eigenvalue of a real symmetric matrix.
pub fn lambda_max_sym(h: &RealMatrix) -> Result<f64> {
    if h.asymmetry() > 1e-12 * h.max_abs().max(1.0) {
        return Err(Error::InvalidMatrix("matrix is not symmetric".into()));
    }
    let (vals, _) = eigen::sym_eigen(&h.data, h.dim);
    Ok(vals[0])
}

/// Eigenvalues (descending) and eigenvector columns of a real symmetric
/// matrix.
pub fn sym_eigenpairs(h: &RealMatrix) -> Result<(Vec<f64>, RealMatrix)> {
    if h.asymmetry() > 1e-12 * h.max_abs().max(1.0) {
        return Err(Error::InvalidMatrix("matrix is not symmetric".into()));
    }
    let (vals, vecs) = eigen::sym_eigen(&h.data, h.dim);
    Ok((vals, RealMatrix { dim: h.dim, data: vecs }))
}

/// exp(H) for Hermitian H; positive definite by construction.
pub fn matrix_exp(h: &HermitianMatrix) -> HermitianMatrix {
    let (vals, vecs) = h.eigen();
    let exps: Vec<f64> = vals.iter().map(|&v| v.exp()).collect();
    assemble_herm(&exps, &vecs)
}

/// P^z for positive definite Hermitian P and complex exponent z,
/// via P^z = V diag(λᵢ^z) V†. For z = 1+it the result is a complex
/// matrix with ‖P^{1+it}‖ = ‖P‖.
pub fn complex_power(p: &HermitianMatrix, z: Complex64) -> Result<ComplexMatrix> {
    let (vals, vecs) = p.eigen();
    let scale = vals.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return Err(Error::NotPositiveDefinite("zero matrix".into()));
    }
    let tol = 1e-13 * scale;
    for &v in &vals {
        if v <= tol {
            return Err(Error::NotPositiveDefinite(format!(
                "eigenvalue {v:.3e} <= tolerance {tol:.3e}"
            )));
        }
    }
    // λ^z = exp(z ln λ), principal branch; λ > 0 so no cut is crossed.
    let powers: Vec<Complex64> = vals.iter().map(|&v| (z * v.ln()).exp()).collect();
    let d = p.dim();
    let mut out = ComplexMatrix::zeros(d);
    for i in 0..d {
        for j in 0..d {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..d {
                s += vecs.get(i, k) * powers[k] * vecs.get(j, k).conj();
            }
            out.set(i, j, s);
        }
    }
    Ok(out)
}

/// Checks ‖MᵀM − MMᵀ‖ ≤ tol·‖M‖²; the normality test used by the
/// certified bounds that require normal cocycle matrices.
pub fn is_normal(m: &RealMatrix, rel_tol: f64) -> Result<bool> {
    let mt = m.transpose();
    let comm = mt.mul(m).sub(&m.mul(&mt));
    let n = op_norm(m)?;
    Ok(op_norm(&comm)? <= rel_tol * n * n)
}

fn assemble_sym(vals: &[f64], vecs: &[f64], d: usize) -> RealMatrix {
    let mut out = RealMatrix::zeros(d);
    for i in 0..d {
        for j in 0..=i {
            let mut s = 0.0;
            for k in 0..d {
                s += vecs[i * d + k] * vals[k] * vecs[j * d + k];
            }
            out.data[i * d + j] = s;
            out.data[j * d + i] = s;
        }
    }
    out
}

fn assemble_herm(vals: &[f64], vecs: &ComplexMatrix) -> HermitianMatrix {
    let d = vecs.dim;
    let mut out = ComplexMatrix::zeros(d);
    for i in 0..d {
        for j in 0..=i {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..d {
                s += vecs.get(i, k) * vals[k] * vecs.get(j, k).conj();
            }
            if i == j {
                out.set(i, i, Complex64::new(s.re, 0.0));
            } else {
                out.set(i, j, s);
                out.set(j, i, s.conj());
            }
        }
    }
    HermitianMatrix { m: out }
}
