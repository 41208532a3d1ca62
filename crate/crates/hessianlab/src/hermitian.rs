//! Complex Hermitian matrices, generalized eigenvalues with respect to a
//! background form, and elementary symmetric polynomial utilities.
//!
//! Everything here is sized for desk-scale dimensions (2..=8): the
//! eigensolver is a cyclic two-sided Jacobi rotation scheme applied after a
//! Cholesky congruence reduction of the background form, and determinants and
//! adjugates are computed directly. No external linear algebra backend.

use std::sync::Arc;

use num_complex::Complex;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type Complex64 = Complex<f64>;

/// Inclusive dimension bounds for all matrices in the crate.
pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 8;

/// Cholesky pivot threshold below which a matrix counts as not positive
/// definite.
pub const PD_PIVOT_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex { re: 0.0, im: 0.0 };

fn check_dim(n: usize) -> Result<()> {
    if !(MIN_DIM..=MAX_DIM).contains(&n) {
        return Err(Error::DimensionMismatch(format!(
            "dimension {n} outside supported range {MIN_DIM}..={MAX_DIM}"
        )));
    }
    Ok(())
}

/// An n-by-n complex matrix with exact conjugate symmetry.
///
/// Hermitian symmetry is enforced structurally: constructors fill the lower
/// triangle with the conjugate of the upper triangle and zero the imaginary
/// part of the diagonal, so `get(i, j) == get(j, i).conj()` holds exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    entries: Vec<Complex64>, // row-major
}

impl HermitianMatrix {
    /// Build from a generator for the upper triangle (`i <= j`). The
    /// imaginary part returned for diagonal positions is discarded.
    pub fn from_upper<F: FnMut(usize, usize) -> Complex64>(n: usize, mut f: F) -> Result<Self> {
        check_dim(n)?;
        let mut entries = vec![ZERO; n * n];
        for i in 0..n {
            for j in i..n {
                let mut v = f(i, j);
                if i == j {
                    v = Complex64::new(v.re, 0.0);
                }
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::NonFinite(format!("entry ({i},{j}) = {v}")));
                }
                entries[i * n + j] = v;
                entries[j * n + i] = v.conj();
            }
        }
        Ok(Self { n, entries })
    }

    /// Symmetrize an arbitrary complex square array: `(M + M^H)/2`.
    pub fn from_full(n: usize, raw: &[Complex64]) -> Result<Self> {
        if raw.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries, got {}",
                n * n,
                raw.len()
            )));
        }
        Self::from_upper(n, |i, j| (raw[i * n + j] + raw[j * n + i].conj()) * 0.5)
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::from_upper(n, |_, _| ZERO)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_upper(n, |i, j| {
            if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                ZERO
            }
        })
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        Self::from_upper(values.len(), |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                ZERO
            }
        })
    }

    pub fn scaled_identity(n: usize, t: f64) -> Result<Self> {
        Self::from_upper(n, |i, j| {
            if i == j {
                Complex64::new(t, 0.0)
            } else {
                ZERO
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.n + j]
    }

    pub fn scale(&self, t: f64) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(|e| e * t).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "add: {} vs {}",
                self.n, other.n
            )));
        }
        Ok(Self {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(self.add(&other.scale(-1.0))?)
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i).re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt()
    }

    /// trace(self * other); real for Hermitian arguments, this is the pairing
    /// used for linearizations: `L h = trace(grad * h)`.
    pub fn trace_product(&self, other: &Self) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "trace_product: {} vs {}",
                self.n, other.n
            )));
        }
        let mut acc = ZERO;
        for i in 0..self.n {
            for k in 0..self.n {
                acc += self.get(i, k) * other.get(k, i);
            }
        }
        Ok(acc.re)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// Determinant (real because the matrix is Hermitian).
    pub fn det(&self) -> f64 {
        det_raw(self.n, &self.entries).re
    }

    /// Adjugate matrix: the exact gradient of the determinant in the pairing
    /// `d det(A)[h] = trace(adjugate(A) * h)`, so `trace(adj(A) * A) = n det(A)`.
    pub fn adjugate(&self) -> Self {
        let n = self.n;
        let cof = |i: usize, j: usize| -> Complex64 {
            // adj[i][j] = (-1)^{i+j} det(minor with row j and column i removed)
            let m = n - 1;
            let mut minor = Vec::with_capacity(m * m);
            for r in 0..n {
                if r == j {
                    continue;
                }
                for c in 0..n {
                    if c == i {
                        continue;
                    }
                    minor.push(self.get(r, c));
                }
            }
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            det_raw(m, &minor) * sign
        };
        Self::from_upper(n, |i, j| cof(i, j)).expect("adjugate of valid matrix")
    }

    /// Entries as nested `[re, im]` pairs, for report serialization.
    pub fn to_rows(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| {
                        let e = self.get(i, j);
                        [e.re, e.im]
                    })
                    .collect()
            })
            .collect()
    }

    /// Compact single-line rendering used in witness strings.
    pub fn brief(&self) -> String {
        let mut s = String::from("[");
        for i in 0..self.n {
            if i > 0 {
                s.push_str("; ");
            }
            for j in 0..self.n {
                if j > 0 {
                    s.push(' ');
                }
                let e = self.get(i, j);
                if e.im == 0.0 {
                    s.push_str(&format!("{:.6}", e.re));
                } else {
                    s.push_str(&format!("{:.6}{:+.6}i", e.re, e.im));
                }
            }
        }
        s.push(']');
        s
    }
}

/// Determinant of a raw row-major complex square array via LU with partial
/// pivoting. Handles any size >= 1 (used for adjugate minors).
fn det_raw(n: usize, entries: &[Complex64]) -> Complex64 {
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut a = entries.to_vec();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let mut piv = col;
        let mut best = a[col * n + col].norm();
        for r in col + 1..n {
            let mag = a[r * n + col].norm();
            if mag > best {
                best = mag;
                piv = r;
            }
        }
        if best == 0.0 {
            return ZERO;
        }
        if piv != col {
            for c in 0..n {
                a.swap(col * n + c, piv * n + c);
            }
            det = -det;
        }
        let d = a[col * n + col];
        det *= d;
        for r in col + 1..n {
            let factor = a[r * n + col] / d;
            for c in col..n {
                let sub = factor * a[col * n + c];
                a[r * n + c] -= sub;
            }
        }
    }
    det
}

/// Sorted (ascending) real spectrum of a Hermitian pencil.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumVector {
    values: Vec<f64>,
}

impl SpectrumVector {
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        Self { values }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().expect("nonempty spectrum")
    }
}

/// Lower Cholesky factor of a Hermitian positive definite matrix.
/// Fails with `NotPositiveDefinite` when a pivot drops to `PD_PIVOT_TOL`.
pub fn cholesky(b: &HermitianMatrix) -> Result<Vec<Complex64>> {
    let n = b.dim();
    let mut l = vec![ZERO; n * n];
    for j in 0..n {
        let mut pivot = b.get(j, j).re;
        for k in 0..j {
            pivot -= l[j * n + k].norm_sqr();
        }
        if pivot <= PD_PIVOT_TOL {
            return Err(Error::NotPositiveDefinite { index: j, pivot });
        }
        let ljj = pivot.sqrt();
        l[j * n + j] = Complex64::new(ljj, 0.0);
        for i in j + 1..n {
            let mut v = b.get(i, j);
            for k in 0..j {
                v -= l[i * n + k] * l[j * n + k].conj();
            }
            l[i * n + j] = v / ljj;
        }
    }
    Ok(l)
}

/// Cyclic two-sided Jacobi eigensolver for a Hermitian matrix.
/// Returns unsorted eigenvalues and the accumulated unitary (columns are
/// eigenvectors).
fn jacobi_hermitian(n: usize, c: &[Complex64]) -> Result<(Vec<f64>, Vec<Complex64>)> {
    let mut a = c.to_vec();
    let mut v = vec![ZERO; n * n];
    for i in 0..n {
        v[i * n + i] = Complex64::new(1.0, 0.0);
    }
    let frob: f64 = a.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
    if frob == 0.0 {
        return Ok((vec![0.0; n], v));
    }
    let tol = 1e-15 * frob;
    let max_sweeps = 60;
    for sweep in 0..max_sweeps {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= tol {
            return Ok(((0..n).map(|i| a[i * n + i].re).collect(), v));
        }
        let _ = sweep;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let beta = apq.norm();
                if beta <= f64::MIN_POSITIVE {
                    continue;
                }
                let phase = apq / beta;
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let tau = (aqq - app) / (2.0 * beta);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let cth = 1.0 / (1.0 + t * t).sqrt();
                let sth = t * cth;
                // column update: A <- A J with
                // J[p][p]=c, J[p][q]=s, J[q][p]=-s*conj(phase), J[q][q]=c*conj(phase)
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * cth - akq * phase.conj() * sth;
                    a[k * n + q] = akp * sth + akq * phase.conj() * cth;
                }
                // row update: A <- J^H A
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = apk * cth - aqk * phase * sth;
                    a[q * n + k] = apk * sth + aqk * phase * cth;
                }
                // the pivot is zeroed exactly; kill rounding residue
                a[p * n + q] = ZERO;
                a[q * n + p] = ZERO;
                a[p * n + p] = Complex64::new(a[p * n + p].re, 0.0);
                a[q * n + q] = Complex64::new(a[q * n + q].re, 0.0);
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = vkp * cth - vkq * phase.conj() * sth;
                    v[k * n + q] = vkp * sth + vkq * phase.conj() * cth;
                }
            }
        }
    }
    Err(Error::NoConvergence(max_sweeps))
}

/// Generalized eigenvalues and eigenvectors of the pencil `(A, B)`:
/// solutions of `det(A - lambda B) = 0` with `B` positive definite.
///
/// The pencil is reduced by the congruence `C = L^-1 A L^-H` where
/// `B = L L^H`, then diagonalized by Jacobi rotations; returned vectors
/// satisfy `A v = lambda B v`.
pub fn generalized_eigen(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
) -> Result<(SpectrumVector, Vec<Vec<Complex64>>)> {
    let n = a.dim();
    if n != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "pencil dimensions {} vs {}",
            n,
            b.dim()
        )));
    }
    let l = cholesky(b)?;
    // X = L^-1 A: forward substitution on each column of A
    let mut x = vec![ZERO; n * n];
    for col in 0..n {
        for i in 0..n {
            let mut v = a.get(i, col);
            for k in 0..i {
                v -= l[i * n + k] * x[k * n + col];
            }
            x[i * n + col] = v / l[i * n + i];
        }
    }
    // C = X L^-H: C * L^H = X, columns left to right
    let mut c = vec![ZERO; n * n];
    for j in 0..n {
        for row in 0..n {
            let mut v = x[row * n + j];
            for k in 0..j {
                v -= c[row * n + k] * l[j * n + k].conj();
            }
            c[row * n + j] = v / l[j * n + j];
        }
    }
    // symmetrize to kill rounding noise
    for i in 0..n {
        for j in i..n {
            let m = (c[i * n + j] + c[j * n + i].conj()) * 0.5;
            let m = if i == j { Complex64::new(m.re, 0.0) } else { m };
            c[i * n + j] = m;
            c[j * n + i] = m.conj();
        }
    }
    let (vals, u) = jacobi_hermitian(n, &c)?;
    // generalized vectors: v = L^-H u (back substitution per column)
    let mut vecs = vec![ZERO; n * n];
    for col in 0..n {
        for i in (0..n).rev() {
            let mut v = u[i * n + col];
            for k in i + 1..n {
                v -= l[k * n + i].conj() * vecs[k * n + col];
            }
            vecs[i * n + col] = v / l[i * n + i];
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).expect("finite eigenvalues"));
    let sorted_vals: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
    let sorted_vecs: Vec<Vec<Complex64>> = order
        .iter()
        .map(|&cidx| (0..n).map(|r| vecs[r * n + cidx]).collect())
        .collect();
    Ok((SpectrumVector { values: sorted_vals }, sorted_vecs))
}

/// Generalized eigenvalues of `(A, B)`, sorted ascending.
pub fn eigenvalues(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<SpectrumVector> {
    Ok(generalized_eigen(a, b)?.0)
}

/// q-th elementary symmetric polynomial, by the incremental product
/// expansion (Newton-Horner): each value folds in one factor `(1 + x t)`.
pub fn elementary_symmetric(values: &[f64], q: usize) -> Result<f64> {
    let n = values.len();
    if q > n {
        return Err(Error::IndexOutOfRange(format!(
            "sigma_{q} of {n} eigenvalues"
        )));
    }
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for (i, &x) in values.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            e[k] += x * e[k - 1];
        }
    }
    Ok(e[q])
}

/// All elementary symmetric polynomials `sigma_0..=sigma_n` in one pass.
pub fn elementary_symmetric_all(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for (i, &x) in values.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            e[k] += x * e[k - 1];
        }
    }
    e
}

/// Exact gradient of the determinant: `grad_det(A) = adjugate(A)`, so that
/// `d det(A)[h] = trace(grad_det(A) * h)` and `trace(grad_det(A) * A) = n det(A)`.
pub fn grad_det(a: &HermitianMatrix) -> HermitianMatrix {
    a.adjugate()
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

fn standard_normal(rng: &mut StdRng) -> f64 {
    rng.sample(StandardNormal)
}

/// Haar-like random unitary: orthonormalized rows of an i.i.d. standard
/// complex Gaussian matrix (modified Gram-Schmidt with one
/// re-orthogonalization pass). Deterministic in the rng state.
pub fn random_unitary_from(rng: &mut StdRng, n: usize) -> Vec<Complex64> {
    let mut rows: Vec<Vec<Complex64>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| Complex64::new(standard_normal(rng), standard_normal(rng)))
                .collect()
        })
        .collect();
    for i in 0..n {
        for _pass in 0..2 {
            for j in 0..i {
                let proj: Complex64 = (0..n).map(|k| rows[j][k].conj() * rows[i][k]).sum();
                for k in 0..n {
                    let sub = proj * rows[j][k];
                    rows[i][k] -= sub;
                }
            }
        }
        let norm = rows[i].iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
        for k in 0..n {
            rows[i][k] /= norm;
        }
    }
    let mut u = vec![ZERO; n * n];
    for i in 0..n {
        for j in 0..n {
            u[i * n + j] = rows[i][j];
        }
    }
    u
}

pub fn random_unitary(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = StdRng::seed_from_u64(seed);
    random_unitary_from(&mut rng, n)
}

/// Unitary conjugation `U^H diag(values) U` built exactly Hermitian.
pub fn conjugate_diagonal(n: usize, u: &[Complex64], values: &[f64]) -> HermitianMatrix {
    HermitianMatrix::from_upper(n, |i, j| {
        (0..n)
            .map(|k| u[k * n + i].conj() * values[k] * u[k * n + j])
            .sum()
    })
    .expect("conjugated diagonal is a valid Hermitian matrix")
}

/// Unitary conjugation `U^H A U` of a Hermitian matrix.
pub fn conjugate(a: &HermitianMatrix, u: &[Complex64]) -> HermitianMatrix {
    let n = a.dim();
    HermitianMatrix::from_upper(n, |i, j| {
        let mut acc = ZERO;
        for k in 0..n {
            for l in 0..n {
                acc += u[k * n + i].conj() * a.get(k, l) * u[l * n + j];
            }
        }
        acc
    })
    .expect("conjugation preserves Hermitian structure")
}

/// Deterministic random Hermitian matrix `U^H diag(lambda) U` with `lambda`
/// uniform in `[lo, hi]`. Same seed, same matrix, bit for bit.
pub fn random_hermitian(n: usize, seed: u64, lo: f64, hi: f64) -> Result<HermitianMatrix> {
    check_dim(n)?;
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(Error::InvalidConfig(format!(
            "spectrum range [{lo}, {hi}]"
        )));
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let values: Vec<f64> = (0..n)
        .map(|_| {
            if lo == hi {
                lo
            } else {
                rng.random_range(lo..hi)
            }
        })
        .collect();
    let u = random_unitary_from(&mut rng, n);
    Ok(conjugate_diagonal(n, &u, &values))
}

/// A point-dependent positive Hermitian background form `z -> B(z)`.
#[derive(Clone)]
pub struct BackgroundForm {
    n: usize,
    constant_identity: bool,
    sampler: Arc<dyn Fn(&[Complex64]) -> HermitianMatrix + Send + Sync>,
}

impl std::fmt::Debug for BackgroundForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BackgroundForm")
            .field("n", &self.n)
            .field("constant_identity", &self.constant_identity)
            .finish()
    }
}

impl BackgroundForm {
    pub fn identity(n: usize) -> Self {
        let id = HermitianMatrix::identity(n).expect("identity in supported range");
        Self {
            n,
            constant_identity: true,
            sampler: Arc::new(move |_| id.clone()),
        }
    }

    pub fn from_fn<F>(n: usize, f: F) -> Self
    where
        F: Fn(&[Complex64]) -> HermitianMatrix + Send + Sync + 'static,
    {
        Self {
            n,
            constant_identity: false,
            sampler: Arc::new(f),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_constant_identity(&self) -> bool {
        self.constant_identity
    }

    pub fn at(&self, z: &[Complex64]) -> HermitianMatrix {
        (self.sampler)(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn origin(n: usize) -> Vec<Complex64> {
        vec![ZERO; n]
    }

    #[test]
    fn diagonal_pencil_is_exact() {
        let a = HermitianMatrix::diagonal(&[1.0, 2.0, 3.0]).unwrap();
        let b = HermitianMatrix::identity(3).unwrap();
        let s = eigenvalues(&a, &b).unwrap();
        assert_eq!(s.as_slice(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn scaled_identity_background() {
        let a = HermitianMatrix::identity(4).unwrap();
        let b = HermitianMatrix::scaled_identity(4, 2.0).unwrap();
        let s = eigenvalues(&a, &b).unwrap();
        for &v in s.as_slice() {
            assert!((v - 0.5).abs() <= 1e-14);
        }
    }

    #[test]
    fn two_by_two_hand_roots() {
        // det([[2,1],[1,2]] - t I) = t^2 - 4t + 3, roots 1 and 3
        let a = HermitianMatrix::from_upper(2, |i, j| {
            if i == j {
                c(2.0, 0.0)
            } else {
                c(1.0, 0.0)
            }
        })
        .unwrap();
        let b = HermitianMatrix::identity(2).unwrap();
        let s = eigenvalues(&a, &b).unwrap();
        assert!((s.as_slice()[0] - 1.0).abs() <= 1e-12);
        assert!((s.as_slice()[1] - 3.0).abs() <= 1e-12);
    }

    #[test]
    fn pencil_residuals_within_contract() {
        for seed in 0..20u64 {
            let n = 2 + (seed as usize % 7);
            let a = random_hermitian(n, 1000 + seed, -2.0, 2.0).unwrap();
            let b = random_hermitian(n, 2000 + seed, 0.5, 3.0).unwrap();
            let (s, vecs) = generalized_eigen(&a, &b).unwrap();
            let na = a.frobenius_norm();
            let nb = b.frobenius_norm();
            for (lam, v) in s.as_slice().iter().zip(&vecs) {
                let av = a.apply(v);
                let bv = b.apply(v);
                let mut res = 0.0;
                let mut vnorm = 0.0;
                for k in 0..n {
                    res += (av[k] - bv[k] * *lam).norm_sqr();
                    vnorm += v[k].norm_sqr();
                }
                let res = res.sqrt() / vnorm.sqrt();
                assert!(
                    res <= 1e-10 * (na + lam.abs() * nb),
                    "residual {res:.3e} too large for n={n} seed={seed}"
                );
            }
        }
    }

    #[test]
    fn not_positive_definite_background() {
        let b = HermitianMatrix::diagonal(&[1.0, -1.0]).unwrap();
        let a = HermitianMatrix::identity(2).unwrap();
        match eigenvalues(&a, &b) {
            Err(Error::NotPositiveDefinite { index, .. }) => assert_eq!(index, 1),
            other => panic!("expected NotPositiveDefinite, got {other:?}"),
        }
    }

    #[test]
    fn dimension_mismatch_detected() {
        let a = HermitianMatrix::identity(2).unwrap();
        let b = HermitianMatrix::identity(3).unwrap();
        assert!(matches!(
            eigenvalues(&a, &b),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn sigma_small_cases() {
        let lam = [1.0, 2.0, 3.0];
        assert_eq!(elementary_symmetric(&lam, 0).unwrap(), 1.0);
        assert_eq!(elementary_symmetric(&lam, 1).unwrap(), 6.0);
        assert_eq!(elementary_symmetric(&lam, 2).unwrap(), 11.0);
        assert_eq!(elementary_symmetric(&lam, 3).unwrap(), 6.0);
        assert!(matches!(
            elementary_symmetric(&lam, 4),
            Err(Error::IndexOutOfRange(_))
        ));
    }

    #[test]
    fn grad_det_two_by_two_cofactors() {
        let a = HermitianMatrix::diagonal(&[2.0, 3.0]).unwrap();
        let g = grad_det(&a);
        assert_eq!(g.get(0, 0).re, 3.0);
        assert_eq!(g.get(1, 1).re, 2.0);
        assert_eq!(g.get(0, 1), ZERO);
    }

    #[test]
    fn grad_det_identity_fixed_point() {
        for n in 2..=5 {
            let id = HermitianMatrix::identity(n).unwrap();
            let g = grad_det(&id);
            assert!(g.sub(&id).unwrap().frobenius_norm() <= 1e-14);
        }
    }

    #[test]
    fn grad_det_euler_identity() {
        for seed in 0..10u64 {
            let n = 2 + (seed as usize % 5);
            let a = random_hermitian(n, 40 + seed, -1.5, 2.5).unwrap();
            let g = grad_det(&a);
            let lhs = g.trace_product(&a).unwrap();
            let rhs = n as f64 * a.det();
            assert!(
                (lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()),
                "trace(adj(A) A) = {lhs} vs n det(A) = {rhs}"
            );
        }
    }

    #[test]
    fn grad_det_matches_finite_differences() {
        let a = random_hermitian(3, 7, -1.0, 2.0).unwrap();
        let g = grad_det(&a);
        let h = 1e-5;
        // real diagonal directions
        for i in 0..3 {
            let e = HermitianMatrix::from_upper(3, |r, s| {
                if r == i && s == i {
                    c(1.0, 0.0)
                } else {
                    ZERO
                }
            })
            .unwrap();
            let fd = (a.add(&e.scale(h)).unwrap().det() - a.add(&e.scale(-h)).unwrap().det())
                / (2.0 * h);
            let exact = g.trace_product(&e).unwrap();
            assert!((fd - exact).abs() <= 1e-6, "diag {i}: {fd} vs {exact}");
        }
        // off-diagonal real and imaginary directions
        for i in 0..3 {
            for j in i + 1..3 {
                for &imag in &[false, true] {
                    let e = HermitianMatrix::from_upper(3, |r, s| {
                        if r == i && s == j {
                            if imag {
                                c(0.0, 1.0)
                            } else {
                                c(1.0, 0.0)
                            }
                        } else {
                            ZERO
                        }
                    })
                    .unwrap();
                    let fd = (a.add(&e.scale(h)).unwrap().det()
                        - a.add(&e.scale(-h)).unwrap().det())
                        / (2.0 * h);
                    let exact = g.trace_product(&e).unwrap();
                    assert!(
                        (fd - exact).abs() <= 1e-6,
                        "({i},{j},imag={imag}): {fd} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn random_hermitian_is_deterministic() {
        let a = random_hermitian(2, 1, 1.0, 2.0).unwrap();
        let b = random_hermitian(2, 1, 1.0, 2.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn random_hermitian_degenerate_range_gives_identity() {
        let a = random_hermitian(3, 7, 1.0, 1.0).unwrap();
        let id = HermitianMatrix::identity(3).unwrap();
        assert!(a.sub(&id).unwrap().frobenius_norm() <= 1e-12);
    }

    #[test]
    fn random_hermitian_spectrum_stays_in_range() {
        let a = random_hermitian(3, 5, 1.0, 4.0).unwrap();
        let id = HermitianMatrix::identity(3).unwrap();
        let s = eigenvalues(&a, &id).unwrap();
        for &v in s.as_slice() {
            assert!((1.0 - 1e-10..=4.0 + 1e-10).contains(&v), "eigenvalue {v}");
        }
    }

    #[test]
    fn background_form_sampling() {
        let beta = BackgroundForm::from_fn(2, |z| {
            let s = z.iter().map(|w| w.norm_sqr()).sum::<f64>();
            HermitianMatrix::scaled_identity(2, 1.0 + s).unwrap()
        });
        assert!(!beta.is_constant_identity());
        let z = [c(1.0, 0.0), c(0.0, 1.0)];
        assert!((beta.at(&z).get(0, 0).re - 3.0).abs() <= 1e-15);
        let a = HermitianMatrix::diagonal(&[3.0, 6.0]).unwrap();
        let s = eigenvalues(&a, &beta.at(&z)).unwrap();
        assert!((s.as_slice()[0] - 1.0).abs() <= 1e-12);
        assert!((s.as_slice()[1] - 2.0).abs() <= 1e-12);
        assert!(BackgroundForm::identity(3).is_constant_identity());
        let _ = origin(2);
    }
}
