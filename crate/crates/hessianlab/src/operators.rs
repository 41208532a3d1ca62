//! Normalized degenerate elliptic operators G(z, A) on cone families:
//! evaluation (minus infinity off the cone), gradients, linearizations, and
//! the axiom verification sweeps (homogeneity, concavity, the linearized
//! inequality, determinant comparison, Euler identity).
//!
//! Every built-in operator is normalized so that it is positively homogeneous
//! of degree one and dominates det^{1/n} on positive matrices:
//! `G = fhat(lambda)^{1/k} / delta` with
//!
//! - Monge-Ampere: fhat = prod lambda_i, k = n, delta = 1;
//! - sigma_m: fhat = sigma_m, k = m, delta = C(n,m)^{1/m} (Maclaurin);
//! - m-Monge-Ampere: fhat = prod of all m-fold sums, k = C(n,m), delta = m
//!   (arithmetic-geometric mean on each factor);
//! - interpolated (n = 2): fhat = (1-a)^2 l1 l2 + a (l1+l2)^2, k = 2,
//!   delta = 1 + a;
//! - Hessian quotient: fhat = sigma_m / sigma_l, k = m - l, delta = 1. This
//!   one is the negative control: it fails the determinant comparison.

use std::sync::Arc;

use rayon::prelude::*;

use crate::cones::{ConeFamily, ConeId, Membership};
use crate::derive_seed;
use crate::error::{Error, Result};
use crate::hermitian::{
    self, binomial, random_hermitian, BackgroundForm, Complex64, HermitianMatrix,
};
use crate::report::{Report, Witness};

type WeightFn = Arc<dyn Fn(&[Complex64]) -> f64 + Send + Sync>;
type HessianFieldFn = Arc<dyn Fn(&[Complex64]) -> Result<HermitianMatrix> + Send + Sync>;

#[derive(Clone)]
pub enum OpKind {
    MongeAmpere,
    SigmaM(usize),
    MMongeAmpere(usize),
    Interp(f64),
    HessianQuotient(usize, usize),
    Linear(CoefficientField),
    /// Pointwise convex combination with measurable weights.
    Convex(Vec<(Operator, WeightFn)>),
}

impl std::fmt::Debug for OpKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OpKind::MongeAmpere => write!(f, "MongeAmpere"),
            OpKind::SigmaM(m) => write!(f, "SigmaM({m})"),
            OpKind::MMongeAmpere(m) => write!(f, "MMongeAmpere({m})"),
            OpKind::Interp(a) => write!(f, "Interp({a})"),
            OpKind::HessianQuotient(m, l) => write!(f, "HessianQuotient({m},{l})"),
            OpKind::Linear(_) => write!(f, "Linear"),
            OpKind::Convex(parts) => write!(f, "Convex({} parts)", parts.len()),
        }
    }
}

/// Coefficient matrices `z -> a(z)` of a linear operator
/// `L h = trace(a(z) h)`.
#[derive(Clone)]
pub struct CoefficientField {
    sampler: HessianFieldFn,
}

impl CoefficientField {
    pub fn from_fn<F>(f: F) -> Self
    where
        F: Fn(&[Complex64]) -> Result<HermitianMatrix> + Send + Sync + 'static,
    {
        Self {
            sampler: Arc::new(f),
        }
    }

    pub fn constant(a: HermitianMatrix) -> Self {
        Self::from_fn(move |_| Ok(a.clone()))
    }

    pub fn at(&self, z: &[Complex64]) -> Result<HermitianMatrix> {
        (self.sampler)(z)
    }

    /// Apply to a Hessian: `trace(a(z) h)`.
    pub fn apply(&self, z: &[Complex64], h: &HermitianMatrix) -> Result<f64> {
        self.at(z)?.trace_product(h)
    }
}

#[derive(Clone)]
pub struct Operator {
    pub kind: OpKind,
    pub n: usize,
    pub cone: ConeFamily,
    pub background: BackgroundForm,
    /// Homogeneity degree of the raw operator F = (delta G)^k.
    pub degree_k: f64,
    /// Normalization constant making G dominate det^{1/n}.
    pub delta: f64,
}

impl std::fmt::Debug for Operator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Operator")
            .field("kind", &self.kind)
            .field("n", &self.n)
            .field("degree_k", &self.degree_k)
            .field("delta", &self.delta)
            .finish()
    }
}

impl Operator {
    pub fn monge_ampere(n: usize) -> Result<Self> {
        Self::monge_ampere_with_background(n, BackgroundForm::identity(n))
    }

    pub fn monge_ampere_with_background(n: usize, background: BackgroundForm) -> Result<Self> {
        Ok(Self {
            kind: OpKind::MongeAmpere,
            n,
            cone: ConeFamily::new(ConeId::GammaM(n), n, background.clone())?,
            background,
            degree_k: n as f64,
            delta: 1.0,
        })
    }

    pub fn sigma_m(n: usize, m: usize) -> Result<Self> {
        let background = BackgroundForm::identity(n);
        Ok(Self {
            kind: OpKind::SigmaM(m),
            n,
            cone: ConeFamily::new(ConeId::GammaM(m), n, background.clone())?,
            background,
            degree_k: m as f64,
            delta: binomial(n, m).powf(1.0 / m as f64),
        })
    }

    pub fn m_monge_ampere(n: usize, m: usize) -> Result<Self> {
        let background = BackgroundForm::identity(n);
        Ok(Self {
            kind: OpKind::MMongeAmpere(m),
            n,
            cone: ConeFamily::new(ConeId::MMonge(m), n, background.clone())?,
            background,
            degree_k: binomial(n, m),
            delta: m as f64,
        })
    }

    pub fn interp(a: f64) -> Result<Self> {
        let background = BackgroundForm::identity(2);
        Ok(Self {
            kind: OpKind::Interp(a),
            n: 2,
            cone: ConeFamily::new(ConeId::Interp(a), 2, background.clone())?,
            background,
            degree_k: 2.0,
            delta: 1.0 + a,
        })
    }

    pub fn hessian_quotient(n: usize, m: usize, ell: usize) -> Result<Self> {
        if ell >= m {
            return Err(Error::InvalidConfig(format!(
                "hessian quotient needs l < m, got l={ell}, m={m}"
            )));
        }
        let background = BackgroundForm::identity(n);
        Ok(Self {
            kind: OpKind::HessianQuotient(m, ell),
            n,
            cone: ConeFamily::new(ConeId::GammaM(m), n, background.clone())?,
            background,
            degree_k: (m - ell) as f64,
            delta: 1.0,
        })
    }

    /// Linear operator `G(z, A) = trace(a(z) A)`, hosted on the widest
    /// sigma cone Gamma_1.
    pub fn linear(n: usize, coeffs: CoefficientField) -> Result<Self> {
        let background = BackgroundForm::identity(n);
        Ok(Self {
            kind: OpKind::Linear(coeffs),
            n,
            cone: ConeFamily::new(ConeId::GammaM(1), n, background.clone())?,
            background,
            degree_k: 1.0,
            delta: 1.0,
        })
    }

    /// Pointwise convex combination `sum_i w_i(z) G_i(z, A)`; weights must be
    /// nonnegative and sum to one at every sampled z (checked lazily).
    pub fn convex_combination(parts: Vec<(Operator, WeightFn)>) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidConfig("empty convex combination".into()))?;
        let n = first.0.n;
        if parts.iter().any(|(op, _)| op.n != n) {
            return Err(Error::DimensionMismatch(
                "convex combination mixes dimensions".into(),
            ));
        }
        let background = first.0.background.clone();
        let cone = first.0.cone.clone();
        Ok(Self {
            kind: OpKind::Convex(parts),
            n,
            cone,
            background,
            degree_k: 1.0,
            delta: 1.0,
        })
    }

    pub fn label(&self) -> String {
        match &self.kind {
            OpKind::MongeAmpere => "ma".into(),
            OpKind::SigmaM(m) => format!("sigma_{m}"),
            OpKind::MMongeAmpere(m) => format!("m_ma_{m}"),
            OpKind::Interp(a) => format!("interp_{a}"),
            OpKind::HessianQuotient(m, l) => format!("hq_{m}_{l}"),
            OpKind::Linear(_) => "linear".into(),
            OpKind::Convex(parts) => format!("convex_{}", parts.len()),
        }
    }

    /// Raw symmetric function of the eigenvalues, before normalization.
    fn fhat(&self, lam: &[f64]) -> f64 {
        match &self.kind {
            OpKind::MongeAmpere => lam.iter().product(),
            OpKind::SigmaM(m) => {
                hermitian::elementary_symmetric(lam, *m).expect("m within range")
            }
            OpKind::MMongeAmpere(m) => {
                let mut product = 1.0;
                for_each_combination(lam.len(), *m, |subset| {
                    product *= subset.iter().map(|&i| lam[i]).sum::<f64>();
                });
                product
            }
            OpKind::Interp(a) => {
                (1.0 - a).powi(2) * lam[0] * lam[1] + a * (lam[0] + lam[1]).powi(2)
            }
            OpKind::HessianQuotient(m, l) => {
                let e = hermitian::elementary_symmetric_all(lam);
                e[*m] / e[*l]
            }
            OpKind::Linear(_) | OpKind::Convex(_) => {
                unreachable!("evaluated without eigenvalue reduction")
            }
        }
    }

    /// Normalized value `G(z, A)`; `f64::NEG_INFINITY` when `A` is not
    /// strictly inside the cone (boundary points count as outside).
    pub fn evaluate(&self, z: &[Complex64], a: &HermitianMatrix) -> Result<f64> {
        if a.dim() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "matrix dimension {} vs operator dimension {}",
                a.dim(),
                self.n
            )));
        }
        if self.cone.membership(z, a)? != Membership::Inside {
            return Ok(f64::NEG_INFINITY);
        }
        match &self.kind {
            OpKind::Linear(field) => field.apply(z, a),
            OpKind::Convex(parts) => {
                let mut total_weight = 0.0;
                let mut acc = 0.0;
                for (op, w) in parts {
                    let wi = w(z);
                    if wi < 0.0 {
                        return Err(Error::InvalidConfig(format!(
                            "negative combination weight {wi} at sampled point"
                        )));
                    }
                    total_weight += wi;
                    let gi = op.evaluate(z, a)?;
                    if gi == f64::NEG_INFINITY {
                        return Ok(f64::NEG_INFINITY);
                    }
                    acc += wi * gi;
                }
                if (total_weight - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidConfig(format!(
                        "combination weights sum to {total_weight} at sampled point"
                    )));
                }
                Ok(acc)
            }
            _ => {
                let lam = hermitian::eigenvalues(a, &self.background.at(z))?;
                let raw = self.fhat(lam.as_slice());
                Ok(raw.powf(1.0 / self.degree_k) / self.delta)
            }
        }
    }

    /// Margin of `A` inside the operator cone (smallest defining value).
    pub fn cone_margin(&self, z: &[Complex64], a: &HermitianMatrix) -> Result<f64> {
        self.cone.margin(z, a)
    }

    /// Gradient of `G(z, .)` at `A`, in the trace pairing:
    /// `d G(A)[h] = trace(gradient * h)`.
    ///
    /// Exact (adjugate chain rule) for the Monge-Ampere operator and for
    /// linear operators; Hermitian-structured central differences with one
    /// Richardson level otherwise. Requires `A` strictly inside the cone.
    pub fn gradient(&self, z: &[Complex64], a: &HermitianMatrix) -> Result<HermitianMatrix> {
        let margin = self.cone_margin(z, a)?;
        if margin <= 1e-10 {
            return Err(Error::OnConeBoundary(margin));
        }
        match &self.kind {
            OpKind::Linear(field) => field.at(z),
            OpKind::MongeAmpere => {
                // G = (det A / det B)^{1/n} / delta, so
                // dG[h] = (G/n) trace(A^{-1} h) = trace((G/(n det A)) adj(A) h)
                let g = self.evaluate(z, a)?;
                let det = a.det();
                Ok(hermitian::grad_det(a).scale(g / (self.n as f64 * det)))
            }
            _ => self.fd_gradient(z, a),
        }
    }

    fn fd_gradient(&self, z: &[Complex64], a: &HermitianMatrix) -> Result<HermitianMatrix> {
        let n = self.n;
        // base step balances the Richardson truncation (which grows with the
        // curvature of the fractional-power operators) against roundoff
        let mut h = 1e-5 * (1.0 + a.frobenius_norm());
        'step: for _ in 0..45 {
            let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
            for i in 0..n {
                for j in i..n {
                    for &imag in &[false, true] {
                        if i == j && imag {
                            continue;
                        }
                        let dir = HermitianMatrix::from_upper(n, |r, s| {
                            if r == i && s == j {
                                if imag {
                                    Complex64::new(0.0, 1.0)
                                } else {
                                    Complex64::new(1.0, 0.0)
                                }
                            } else {
                                Complex64::new(0.0, 0.0)
                            }
                        })?;
                        let diff = |step: f64| -> Result<f64> {
                            let gp = self.evaluate(z, &a.add(&dir.scale(step))?)?;
                            let gm = self.evaluate(z, &a.add(&dir.scale(-step))?)?;
                            if gp == f64::NEG_INFINITY || gm == f64::NEG_INFINITY {
                                return Ok(f64::NEG_INFINITY);
                            }
                            Ok((gp - gm) / (2.0 * step))
                        };
                        let d_full = diff(h)?;
                        let d_half = diff(h / 2.0)?;
                        if d_full == f64::NEG_INFINITY || d_half == f64::NEG_INFINITY {
                            h /= 2.0;
                            continue 'step;
                        }
                        let d = (4.0 * d_half - d_full) / 3.0;
                        if i == j {
                            entries[i * n + j] += Complex64::new(d, 0.0);
                        } else if imag {
                            entries[i * n + j] += Complex64::new(0.0, 0.5 * d);
                        } else {
                            entries[i * n + j] += Complex64::new(0.5 * d, 0.0);
                        }
                    }
                }
            }
            return HermitianMatrix::from_upper(n, |i, j| entries[i * n + j]);
        }
        Err(Error::OnConeBoundary(self.cone_margin(z, a)?))
    }

    /// G(z, Id); equals one for every normalized built-in.
    pub fn value_at_identity(&self, z: &[Complex64]) -> Result<f64> {
        self.evaluate(z, &HermitianMatrix::identity(self.n)?)
    }

    /// Linearization about a Hessian field:
    /// `z -> gradient(G)(z, hessian_field(z))`.
    pub fn linearize<F>(&self, hessian_field: F) -> CoefficientField
    where
        F: Fn(&[Complex64]) -> Result<HermitianMatrix> + Send + Sync + 'static,
    {
        let op = self.clone();
        CoefficientField::from_fn(move |z| op.gradient(z, &hessian_field(z)?))
    }

    fn origin(&self) -> Vec<Complex64> {
        vec![Complex64::new(0.0, 0.0); self.n]
    }

    /// Sample strictly inside the cone with a margin that keeps the
    /// finite-difference gradients on safe ground (the square-root-type
    /// operators lose derivative accuracy right at the boundary).
    pub fn sample_inside(&self, seed: u64) -> Result<HermitianMatrix> {
        let z = self.origin();
        for attempt in 0..10_000u64 {
            let a = self.cone.sample_inside(&z, derive_seed(seed, attempt))?;
            if self.cone.margin(&z, &a)? > 5e-2 {
                return Ok(a);
            }
        }
        Err(Error::InvalidConfig(format!(
            "could not sample well inside {}",
            self.label()
        )))
    }

    /// Homogeneity sweep: `|G(z, tA) - t G(z, A)| <= tol * t * |G(z, A)|`
    /// for sampled in-cone A and every scale t.
    pub fn check_homogeneity(&self, samples: u64, scales: &[f64], seed: u64) -> Result<Report> {
        let tol = 1e-9;
        let z = self.origin();
        let rows: Vec<(f64, Option<Witness>)> = (0..samples)
            .into_par_iter()
            .map(|i| -> Result<(f64, Option<Witness>)> {
                let a = self.sample_inside(derive_seed(seed, i))?;
                let g = self.evaluate(&z, &a)?;
                let mut worst = 0.0f64;
                for &t in scales {
                    let gt = self.evaluate(&z, &a.scale(t))?;
                    let rel = (gt - t * g).abs() / (t * g.abs()).max(f64::MIN_POSITIVE);
                    worst = worst.max(rel);
                }
                let witness = (worst > tol).then(|| Witness {
                    sample: Some(i),
                    value: worst,
                    detail: format!("relative homogeneity defect {worst:.3e} at A = {}", a.brief()),
                });
                Ok((worst, witness))
            })
            .collect::<Result<_>>()?;
        Ok(self.sweep_report("homogeneity", samples, tol, rows))
    }

    /// Midpoint concavity sweep:
    /// `G(z, (A+B)/2) >= (G(z,A) + G(z,B))/2 - tol`.
    pub fn check_concavity(&self, samples: u64, seed: u64) -> Result<Report> {
        let tol = 1e-9;
        let z = self.origin();
        let rows: Vec<(f64, Option<Witness>)> = (0..samples)
            .into_par_iter()
            .map(|i| -> Result<(f64, Option<Witness>)> {
                let a = self.sample_inside(derive_seed(seed, 2 * i))?;
                let b = self.sample_inside(derive_seed(seed, 2 * i + 1))?;
                let mid = a.add(&b)?.scale(0.5);
                let g_mid = self.evaluate(&z, &mid)?;
                let avg = 0.5 * (self.evaluate(&z, &a)? + self.evaluate(&z, &b)?);
                let violation = (avg - g_mid).max(0.0);
                let witness = (violation > tol).then(|| Witness {
                    sample: Some(i),
                    value: violation,
                    detail: format!(
                        "midpoint concavity broke by {violation:.3e}: A = {}, B = {}",
                        a.brief(),
                        b.brief()
                    ),
                });
                Ok((violation, witness))
            })
            .collect::<Result<_>>()?;
        Ok(self.sweep_report("concavity", samples, tol, rows))
    }

    /// Linearized inequality sweep: `trace(grad G(A) B) >= G(z, B) - tol`
    /// for in-cone pairs.
    pub fn check_linearized_inequality(&self, samples: u64, seed: u64) -> Result<Report> {
        let tol = 1e-7;
        let z = self.origin();
        let rows: Vec<(f64, Option<Witness>)> = (0..samples)
            .into_par_iter()
            .map(|i| -> Result<(f64, Option<Witness>)> {
                let (grad, a) = {
                    // resample if the gradient lands on the cone boundary
                    let mut out = None;
                    for retry in 0..32u64 {
                        let a =
                            self.sample_inside(derive_seed(seed, 2 * i + (retry << 40)))?;
                        match self.gradient(&z, &a) {
                            Ok(g) => {
                                out = Some((g, a));
                                break;
                            }
                            Err(Error::OnConeBoundary(_)) => continue,
                            Err(e) => return Err(e),
                        }
                    }
                    out.ok_or(Error::OnConeBoundary(0.0))?
                };
                let b = self.sample_inside(derive_seed(seed, 2 * i + 1))?;
                let lhs = grad.trace_product(&b)?;
                let rhs = self.evaluate(&z, &b)?;
                let violation = (rhs - lhs).max(0.0);
                let witness = (violation > tol).then(|| Witness {
                    sample: Some(i),
                    value: violation,
                    detail: format!(
                        "trace(grad G(A) B) = {lhs:.8} < G(B) = {rhs:.8}; A = {}, B = {}",
                        a.brief(),
                        b.brief()
                    ),
                });
                Ok((violation, witness))
            })
            .collect::<Result<_>>()?;
        Ok(self.sweep_report("linearized-inequality", samples, tol, rows))
    }

    /// Euler identity sweep: `trace(grad G(A) A) = G(z, A)` to relative
    /// tolerance.
    pub fn check_euler_identity(&self, samples: u64, seed: u64) -> Result<Report> {
        let tol = 1e-7;
        let z = self.origin();
        let rows: Vec<(f64, Option<Witness>)> = (0..samples)
            .into_par_iter()
            .map(|i| -> Result<(f64, Option<Witness>)> {
                let a = self.sample_inside(derive_seed(seed, i))?;
                let grad = self.gradient(&z, &a)?;
                let lhs = grad.trace_product(&a)?;
                let g = self.evaluate(&z, &a)?;
                let rel = (lhs - g).abs() / g.abs().max(f64::MIN_POSITIVE);
                let witness = (rel > tol).then(|| Witness {
                    sample: Some(i),
                    value: rel,
                    detail: format!(
                        "trace(grad G(A) A) = {lhs:.10} vs G(A) = {g:.10} at A = {}",
                        a.brief()
                    ),
                });
                Ok((rel, witness))
            })
            .collect::<Result<_>>()?;
        Ok(self.sweep_report("euler-identity", samples, tol, rows))
    }

    /// Determinant comparison sweep, both forms:
    /// (d)  `G(z, P) >= det_B(P)^{1/n} - tol` for positive definite P;
    /// (d') `G(z, A+P) >= G(z, A) + det_B(P)^{1/n} - tol`.
    ///
    /// A few canonical probes (identity, a strongly anisotropic diagonal)
    /// run ahead of the random samples so that operators which fail the
    /// comparison report an explicit witness.
    pub fn check_comparison(&self, samples: u64, seed: u64) -> Result<Report> {
        let tol = 1e-9;
        let z = self.origin();
        let mut probes = vec![HermitianMatrix::identity(self.n)?];
        let mut aniso = vec![1.0; self.n];
        aniso[0] = 64.0;
        probes.push(HermitianMatrix::diagonal(&aniso)?);

        let det_root = |p: &HermitianMatrix| -> Result<f64> {
            // determinant relative to the background: prod of generalized
            // eigenvalues
            let lam = hermitian::eigenvalues(p, &self.background.at(&z))?;
            Ok(lam
                .as_slice()
                .iter()
                .product::<f64>()
                .powf(1.0 / self.n as f64))
        };

        let mut rows: Vec<(f64, Option<Witness>)> = Vec::new();
        for (idx, p) in probes.iter().enumerate() {
            let g = self.evaluate(&z, p)?;
            let root = det_root(p)?;
            let violation = (root - g).max(0.0);
            let witness = (violation > tol).then(|| Witness {
                sample: None,
                value: violation,
                detail: format!(
                    "probe {idx}: G(P) = {g:.10} < det(P)^(1/n) = {root:.10} at P = {}",
                    p.brief()
                ),
            });
            rows.push((violation, witness));
        }

        let sampled: Vec<(f64, Option<Witness>)> = (0..samples)
            .into_par_iter()
            .map(|i| -> Result<(f64, Option<Witness>)> {
                let p = random_hermitian(self.n, derive_seed(seed, 3 * i), 0.05, 3.0)?;
                let g = self.evaluate(&z, &p)?;
                let root = det_root(&p)?;
                let mut violation = (root - g).max(0.0);
                let mut detail = format!(
                    "G(P) = {g:.10} < det(P)^(1/n) = {root:.10} at P = {}",
                    p.brief()
                );
                // (d'): in-cone A plus positive definite P
                let a = self.sample_inside(derive_seed(seed, 3 * i + 1))?;
                let sum = a.add(&p)?;
                let lhs = self.evaluate(&z, &sum)?;
                let rhs = self.evaluate(&z, &a)? + root;
                let v2 = (rhs - lhs).max(0.0);
                if v2 > violation {
                    violation = v2;
                    detail = format!(
                        "G(A+P) = {lhs:.10} < G(A) + det(P)^(1/n) = {rhs:.10}; A = {}, P = {}",
                        a.brief(),
                        p.brief()
                    );
                }
                let witness = (violation > tol).then(|| Witness {
                    sample: Some(i),
                    value: violation,
                    detail,
                });
                Ok((violation, witness))
            })
            .collect::<Result<_>>()?;
        rows.extend(sampled);
        Ok(self.sweep_report("comparison", samples + 2, tol, rows))
    }

    /// Ellipticity sweep: `G(z, A+P) >= G(z, A) - tol` for in-cone A and
    /// positive definite P (monotonicity in the Hessian argument).
    pub fn check_ellipticity(&self, samples: u64, seed: u64) -> Result<Report> {
        let tol = 1e-9;
        let z = self.origin();
        let rows: Vec<(f64, Option<Witness>)> = (0..samples)
            .into_par_iter()
            .map(|i| -> Result<(f64, Option<Witness>)> {
                let a = self.sample_inside(derive_seed(seed, 2 * i))?;
                let p = random_hermitian(self.n, derive_seed(seed, 2 * i + 1), 0.05, 2.0)?;
                let g0 = self.evaluate(&z, &a)?;
                let g1 = self.evaluate(&z, &a.add(&p)?)?;
                let violation = (g0 - g1).max(0.0);
                let witness = (violation > tol).then(|| Witness {
                    sample: Some(i),
                    value: violation,
                    detail: format!(
                        "G dropped by {violation:.3e} after adding P = {}",
                        p.brief()
                    ),
                });
                Ok((violation, witness))
            })
            .collect::<Result<_>>()?;
        Ok(self.sweep_report("ellipticity", samples, tol, rows))
    }

    fn sweep_report(
        &self,
        check: &str,
        samples: u64,
        tol: f64,
        rows: Vec<(f64, Option<Witness>)>,
    ) -> Report {
        let max_violation = rows.iter().map(|(v, _)| *v).fold(0.0f64, f64::max);
        let mut witnesses: Vec<Witness> = rows.into_iter().filter_map(|(_, w)| w).collect();
        // keep the worst witnesses first, cap the report size
        witnesses.sort_by(|a, b| b.value.partial_cmp(&a.value).expect("finite violations"));
        witnesses.truncate(8);
        Report {
            check: check.into(),
            subject: self.label(),
            n: self.n,
            samples,
            tolerance: tol,
            max_violation,
            witnesses,
            pass: max_violation <= tol,
        }
    }

    /// Run the whole axiom suite at the given sample count.
    pub fn verify_all(&self, samples: u64, seed: u64) -> Result<Vec<Report>> {
        Ok(vec![
            self.check_homogeneity(samples, &[0.1, 0.5, 3.0, 10.0], derive_seed(seed, 1))?,
            self.check_concavity(samples, derive_seed(seed, 2))?,
            self.check_linearized_inequality(samples, derive_seed(seed, 3))?,
            self.check_euler_identity(samples.min(500), derive_seed(seed, 4))?,
            self.check_comparison(samples, derive_seed(seed, 5))?,
            self.check_ellipticity(samples, derive_seed(seed, 6))?,
        ])
    }
}

/// Visit all m-element subsets of 0..n in lexicographic order.
fn for_each_combination<F: FnMut(&[usize])>(n: usize, m: usize, mut f: F) {
    let mut subset: Vec<usize> = (0..m).collect();
    loop {
        f(&subset);
        // find the rightmost slot that can advance
        let mut i = m;
        while i > 0 {
            i -= 1;
            if subset[i] < i + n - m {
                subset[i] += 1;
                for j in i + 1..m {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
            if i == 0 {
                return;
            }
        }
    }
}

/// The operator list exercised by the default verification suite.
pub fn standard_suite() -> Result<Vec<Operator>> {
    let mut ops = vec![Operator::monge_ampere(2)?, Operator::monge_ampere(3)?];
    for n in 2..=5 {
        for m in 1..=n {
            ops.push(Operator::sigma_m(n, m)?);
        }
    }
    for n in [3, 4] {
        for m in [2, 3] {
            ops.push(Operator::m_monge_ampere(n, m)?);
        }
    }
    for a in [0.0, 0.3, 0.7, 1.0] {
        ops.push(Operator::interp(a)?);
    }
    Ok(ops)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn origin(n: usize) -> Vec<Complex64> {
        vec![Complex64::new(0.0, 0.0); n]
    }

    #[test]
    fn monge_ampere_values() {
        let op = Operator::monge_ampere(2).unwrap();
        let z = origin(2);
        let a = HermitianMatrix::diagonal(&[1.0, 4.0]).unwrap();
        assert!((op.evaluate(&z, &a).unwrap() - 2.0).abs() <= 1e-12);
        let off = HermitianMatrix::diagonal(&[-1.0, 1.0]).unwrap();
        assert_eq!(op.evaluate(&z, &off).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn sigma_m_normalized_at_identity() {
        let op = Operator::sigma_m(3, 2).unwrap();
        let z = origin(3);
        let id = HermitianMatrix::identity(3).unwrap();
        assert!((op.evaluate(&z, &id).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn all_builtins_normalized_at_identity() {
        let z2 = origin(2);
        for op in standard_suite().unwrap() {
            let z = origin(op.n);
            let v = op.value_at_identity(&z).unwrap();
            assert!(
                (v - 1.0).abs() <= 1e-12,
                "{}: G(Id) = {v}",
                op.label()
            );
        }
        // the quotient operator is only required to sit at or above one
        let hq = Operator::hessian_quotient(3, 2, 1).unwrap();
        assert!(hq.value_at_identity(&origin(3)).unwrap() >= 1.0 - 1e-12);
        let _ = z2;
    }

    #[test]
    fn gradient_of_monge_ampere_at_identity() {
        let op = Operator::monge_ampere(2).unwrap();
        let z = origin(2);
        let id = HermitianMatrix::identity(2).unwrap();
        let g = op.gradient(&z, &id).unwrap();
        let expect = HermitianMatrix::scaled_identity(2, 0.5).unwrap();
        assert!(g.sub(&expect).unwrap().frobenius_norm() <= 1e-12);
    }

    #[test]
    fn gradient_of_sigma_one_is_constant() {
        let op = Operator::sigma_m(3, 1).unwrap();
        let z = origin(3);
        let id = HermitianMatrix::identity(3).unwrap();
        let g = op.gradient(&z, &id).unwrap();
        let expect = HermitianMatrix::scaled_identity(3, 1.0 / 3.0).unwrap();
        assert!(g.sub(&expect).unwrap().frobenius_norm() <= 1e-9);
    }

    #[test]
    fn gradient_requires_interior_point() {
        let op = Operator::monge_ampere(2).unwrap();
        let z = origin(2);
        let boundary = HermitianMatrix::diagonal(&[0.0, 1.0]).unwrap();
        assert!(matches!(
            op.gradient(&z, &boundary),
            Err(Error::OnConeBoundary(_))
        ));
    }

    #[test]
    fn euler_identity_random_samples() {
        for op in [
            Operator::monge_ampere(3).unwrap(),
            Operator::sigma_m(3, 2).unwrap(),
            Operator::m_monge_ampere(3, 2).unwrap(),
            Operator::interp(0.3).unwrap(),
        ] {
            let r = op.check_euler_identity(50, 17).unwrap();
            assert!(r.pass, "{}: {:?}", op.label(), r.witnesses.first());
        }
    }

    #[test]
    fn homogeneity_pointwise_example() {
        let op = Operator::monge_ampere(2).unwrap();
        let z = origin(2);
        let id = HermitianMatrix::identity(2).unwrap();
        let g3 = op.evaluate(&z, &id.scale(3.0)).unwrap();
        assert!((g3 - 3.0).abs() <= 1e-12);
        let r = op.check_homogeneity(200, &[0.1, 10.0], 5).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn concavity_midpoint_example_values() {
        let op = Operator::monge_ampere(3).unwrap();
        let z = origin(3);
        let a = HermitianMatrix::identity(3).unwrap();
        let b = HermitianMatrix::diagonal(&[4.0, 1.0, 1.0]).unwrap();
        let mid = op.evaluate(&z, &a.add(&b).unwrap().scale(0.5)).unwrap();
        let avg = 0.5 * (op.evaluate(&z, &a).unwrap() + op.evaluate(&z, &b).unwrap());
        assert!((mid - 2.5f64.powf(1.0 / 3.0)).abs() <= 1e-12);
        assert!((avg - 0.5 * (1.0 + 4.0f64.powf(1.0 / 3.0))).abs() <= 1e-12);
        assert!(mid >= avg);
    }

    #[test]
    fn concavity_sweeps_pass() {
        let op = Operator::sigma_m(3, 2).unwrap();
        let r = op.check_concavity(500, 23).unwrap();
        assert!(r.pass, "{:?}", r.witnesses.first());
    }

    #[test]
    fn linear_operator_concavity_is_equality() {
        let a = HermitianMatrix::diagonal(&[0.5, 0.3, 0.2]).unwrap();
        let op = Operator::linear(3, CoefficientField::constant(a)).unwrap();
        let z = origin(3);
        let x = op.sample_inside(1).unwrap();
        let y = op.sample_inside(2).unwrap();
        let mid = op.evaluate(&z, &x.add(&y).unwrap().scale(0.5)).unwrap();
        let avg = 0.5 * (op.evaluate(&z, &x).unwrap() + op.evaluate(&z, &y).unwrap());
        assert!((mid - avg).abs() <= 1e-12);
    }

    #[test]
    fn linearized_inequality_example() {
        let op = Operator::monge_ampere(2).unwrap();
        let z = origin(2);
        let a = HermitianMatrix::identity(2).unwrap();
        let b = HermitianMatrix::diagonal(&[4.0, 1.0]).unwrap();
        let grad = op.gradient(&z, &a).unwrap();
        let lhs = grad.trace_product(&b).unwrap();
        let rhs = op.evaluate(&z, &b).unwrap();
        assert!((lhs - 2.5).abs() <= 1e-12);
        assert!((rhs - 2.0).abs() <= 1e-12);
        let r = op.check_linearized_inequality(300, 31).unwrap();
        assert!(r.pass, "{:?}", r.witnesses.first());
    }

    #[test]
    fn comparison_holds_for_sigma_m() {
        let op = Operator::sigma_m(3, 2).unwrap();
        let r = op.check_comparison(500, 41).unwrap();
        assert!(r.pass, "{:?}", r.witnesses.first());
    }

    #[test]
    fn comparison_equality_at_identity_for_ma() {
        let op = Operator::monge_ampere(3).unwrap();
        let z = origin(3);
        let id = HermitianMatrix::identity(3).unwrap();
        assert!((op.evaluate(&z, &id).unwrap() - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn hessian_quotient_fails_comparison_with_explicit_witness() {
        let op = Operator::hessian_quotient(3, 2, 1).unwrap();
        let z = origin(3);
        let p = HermitianMatrix::diagonal(&[64.0, 1.0, 1.0]).unwrap();
        let g = op.evaluate(&z, &p).unwrap();
        // sigma_2 = 129, sigma_1 = 66
        assert!((g * op.delta - 129.0 / 66.0).abs() <= 1e-9);
        let root = p.det().powf(1.0 / 3.0);
        assert!((root - 4.0).abs() <= 1e-12);
        assert!(g < root);

        let r = op.check_comparison(200, 43).unwrap();
        assert!(!r.pass, "quotient operator must fail the comparison");
        let top = &r.witnesses[0];
        assert!(
            top.detail.contains("64.000000"),
            "worst witness should be the anisotropic probe, got {}",
            top.detail
        );
        assert!((r.max_violation - (4.0 - 129.0 / 66.0)).abs() <= 1e-6);
    }

    #[test]
    fn ellipticity_sweeps_pass() {
        for op in [
            Operator::monge_ampere(2).unwrap(),
            Operator::sigma_m(4, 2).unwrap(),
        ] {
            let r = op.check_ellipticity(300, 53).unwrap();
            assert!(r.pass, "{}: {:?}", op.label(), r.witnesses.first());
        }
    }

    #[test]
    fn exact_ma_gradient_matches_fd_with_good_order() {
        let op = Operator::monge_ampere(3).unwrap();
        let z = origin(3);
        let a = op.sample_inside(7).unwrap();
        let exact = op.gradient(&z, &a).unwrap();
        let fd_err = |h: f64| -> f64 {
            let mut worst = 0.0f64;
            for i in 0..3 {
                for j in i..3 {
                    for &imag in &[false, true] {
                        if i == j && imag {
                            continue;
                        }
                        let dir = HermitianMatrix::from_upper(3, |r, s| {
                            if r == i && s == j {
                                if imag {
                                    Complex64::new(0.0, 1.0)
                                } else {
                                    Complex64::new(1.0, 0.0)
                                }
                            } else {
                                Complex64::new(0.0, 0.0)
                            }
                        })
                        .unwrap();
                        let gp = op.evaluate(&z, &a.add(&dir.scale(h)).unwrap()).unwrap();
                        let gm = op.evaluate(&z, &a.add(&dir.scale(-h)).unwrap()).unwrap();
                        let fd = (gp - gm) / (2.0 * h);
                        let ex = exact.trace_product(&dir).unwrap();
                        worst = worst.max((fd - ex).abs());
                    }
                }
            }
            worst
        };
        let (e1, e2) = (fd_err(1e-2), fd_err(5e-3));
        let order = (e1 / e2).log2();
        assert!(order >= 1.8, "observed order {order}");
    }

    #[test]
    fn linearize_unnormalized_determinant_example() {
        // coefficients of the raw determinant linearization at D^2(||z||^2):
        // a(z) = adj(Id) = Id and trace(a * Id) = 3 = n det(Id)
        let field = CoefficientField::from_fn(move |_z| {
            Ok(hermitian::grad_det(&HermitianMatrix::identity(3)?))
        });
        let z = origin(3);
        let a = field.at(&z).unwrap();
        let id = HermitianMatrix::identity(3).unwrap();
        assert!(a.sub(&id).unwrap().frobenius_norm() <= 1e-14);
        assert!((field.apply(&z, &id).unwrap() - 3.0).abs() <= 1e-14);
    }

    #[test]
    fn linearize_satisfies_homogeneity_pairing() {
        let op = Operator::sigma_m(3, 2).unwrap();
        let hess = |_: &[Complex64]| HermitianMatrix::diagonal(&[1.5, 1.0, 0.8]);
        let field = op.linearize(hess);
        let z = origin(3);
        let d2u = HermitianMatrix::diagonal(&[1.5, 1.0, 0.8]).unwrap();
        let lhs = field.apply(&z, &d2u).unwrap();
        let g = op.evaluate(&z, &d2u).unwrap();
        assert!((lhs - g).abs() <= 1e-7 * g.abs());
    }

    #[test]
    fn convex_combination_keeps_axioms() {
        let w1: WeightFn = Arc::new(|z: &[Complex64]| 0.5 + 0.25 * (z[0].re).tanh());
        let w2: WeightFn = Arc::new(|z: &[Complex64]| 0.5 - 0.25 * (z[0].re).tanh());
        let op = Operator::convex_combination(vec![
            (Operator::monge_ampere(3).unwrap(), w1),
            (Operator::sigma_m(3, 3).unwrap(), w2),
        ])
        .unwrap();
        assert!(op.check_homogeneity(100, &[0.5, 2.0], 3).unwrap().pass);
        assert!(op.check_concavity(100, 5).unwrap().pass);
        assert!(op.check_comparison(100, 7).unwrap().pass);
    }

    #[test]
    fn interp_endpoints_match_neighbours() {
        let z = origin(2);
        let a = HermitianMatrix::diagonal(&[0.7, 2.3]).unwrap();
        let interp0 = Operator::interp(0.0).unwrap();
        let ma = Operator::monge_ampere(2).unwrap();
        assert!(
            (interp0.evaluate(&z, &a).unwrap() - ma.evaluate(&z, &a).unwrap()).abs() <= 1e-12
        );
        let interp1 = Operator::interp(1.0).unwrap();
        let s1 = Operator::sigma_m(2, 1).unwrap();
        assert!(
            (interp1.evaluate(&z, &a).unwrap() - s1.evaluate(&z, &a).unwrap()).abs() <= 1e-12
        );
    }
}
