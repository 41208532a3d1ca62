//! Analytic test-function corpus with exact complex Hessians, plus a
//! finite-difference complex Hessian oracle built on Wirtinger derivatives.
//!
//! The singular radial-power fields are smooth off the set { z' = 0 }
//! (z' = all coordinates but the first); their closed-form Hessians are
//! gated by the finite-difference cross-check before anything else trusts
//! them.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hermitian::{Complex64, HermitianMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularSet {
    None,
    /// The complex-codimension n-1 set { z' = 0 }.
    PrimedAxis,
}

type ValueFn = Arc<dyn Fn(&[Complex64]) -> f64 + Send + Sync>;
type HessianFn = Arc<dyn Fn(&[Complex64]) -> Result<HermitianMatrix> + Send + Sync>;

/// A real-valued field on (a ball in) C^n with an optional closed-form
/// complex Hessian.
#[derive(Clone)]
pub struct ScalarField {
    pub id: String,
    pub n: usize,
    value: ValueFn,
    exact: Option<HessianFn>,
    pub singular: SingularSet,
    /// Ball domain (center, radius); `None` means all of C^n.
    pub domain: Option<(Vec<Complex64>, f64)>,
    /// Supremum of r with the field in W^{2,r}_loc, when the field has
    /// limited Sobolev regularity (metadata only).
    pub sobolev_r_sup: Option<f64>,
}

impl std::fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScalarField")
            .field("id", &self.id)
            .field("n", &self.n)
            .field("singular", &self.singular)
            .finish()
    }
}

fn norm_sq_primed(z: &[Complex64]) -> f64 {
    z[1..].iter().map(|w| w.norm_sqr()).sum()
}

fn norm_sq(z: &[Complex64]) -> f64 {
    z.iter().map(|w| w.norm_sqr()).sum()
}

impl ScalarField {
    pub fn value(&self, z: &[Complex64]) -> f64 {
        (self.value)(z)
    }

    pub fn has_exact_hessian(&self) -> bool {
        self.exact.is_some()
    }

    /// Closed-form complex Hessian; `SingularPoint` on the singular set.
    pub fn exact_hessian(&self, z: &[Complex64]) -> Result<HermitianMatrix> {
        match &self.exact {
            Some(f) => f(z),
            None => Err(Error::InvalidConfig(format!(
                "field {} has no closed-form hessian",
                self.id
            ))),
        }
    }

    /// The Hessian used by harnesses: closed form if available, otherwise
    /// finite differences at the default step.
    pub fn hessian(&self, z: &[Complex64]) -> Result<HermitianMatrix> {
        match &self.exact {
            Some(f) => f(z),
            None => fd_hessian(self, z, default_step(z)),
        }
    }

    pub fn distance_to_singular_set(&self, z: &[Complex64]) -> f64 {
        match self.singular {
            SingularSet::None => f64::INFINITY,
            SingularSet::PrimedAxis => norm_sq_primed(z).sqrt(),
        }
    }

    pub fn distance_to_boundary(&self, z: &[Complex64]) -> f64 {
        match &self.domain {
            None => f64::INFINITY,
            Some((center, radius)) => {
                let d: f64 = z
                    .iter()
                    .zip(center)
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                radius - d
            }
        }
    }

    /// Shift the field by a constant (Hessian unchanged).
    pub fn shifted(&self, c: f64) -> ScalarField {
        let v = self.value.clone();
        ScalarField {
            id: format!("{}+{c:.6}", self.id),
            n: self.n,
            value: Arc::new(move |z| v(z) + c),
            exact: self.exact.clone(),
            singular: self.singular,
            domain: self.domain.clone(),
            sobolev_r_sup: self.sobolev_r_sup,
        }
    }

    /// Scale the field by a constant (Hessian scales along).
    pub fn scaled(&self, t: f64) -> ScalarField {
        let v = self.value.clone();
        let e = self.exact.clone();
        ScalarField {
            id: format!("{t:.6}*{}", self.id),
            n: self.n,
            value: Arc::new(move |z| t * v(z)),
            exact: e.map(|f| -> HessianFn {
                Arc::new(move |z: &[Complex64]| Ok(f(z)?.scale(t)))
            }),
            singular: self.singular,
            domain: self.domain.clone(),
            sobolev_r_sup: self.sobolev_r_sup,
        }
    }

    /// Add a multiple of Re(z_1^2); pluriharmonic, so the complex Hessian
    /// is unchanged while boundary values move.
    pub fn plus_pluriharmonic(&self, w: f64) -> ScalarField {
        let v = self.value.clone();
        ScalarField {
            id: format!("{}+{w:.3}*Re(z1^2)", self.id),
            n: self.n,
            value: Arc::new(move |z| v(z) + w * (z[0] * z[0]).re),
            exact: self.exact.clone(),
            singular: self.singular,
            domain: self.domain.clone(),
            sobolev_r_sup: self.sobolev_r_sup,
        }
    }
}

/// Default finite-difference step: 1e-4 * (1 + ||z||).
pub fn default_step(z: &[Complex64]) -> f64 {
    1e-4 * (1.0 + norm_sq(z).sqrt())
}

/// The singular radial-power solution
/// `u(z) = ||z'||^{2(1-1/n)} (1 + |z_1|^2)`, a strong solution of the
/// determinant identity checked in the counterexample module. Belongs to
/// W^{2,r}_loc exactly for r < n(n-1) (recorded as metadata).
pub fn pogorelov_u(n: usize) -> Result<ScalarField> {
    if n < 2 {
        return Err(Error::InvalidConfig("pogorelov_u needs n >= 2".into()));
    }
    let gamma = 1.0 - 1.0 / n as f64;
    let value: ValueFn = Arc::new(move |z: &[Complex64]| {
        let s = norm_sq_primed(z);
        s.powf(gamma) * (1.0 + z[0].norm_sqr())
    });
    let exact: HessianFn = Arc::new(move |z: &[Complex64]| {
        let s = norm_sq_primed(z);
        if s.sqrt() < 1e-150 {
            return Err(Error::SingularPoint);
        }
        let q = 1.0 + z[0].norm_sqr();
        let sg = s.powf(gamma);
        let sg1 = s.powf(gamma - 1.0);
        let sg2 = s.powf(gamma - 2.0);
        HermitianMatrix::from_upper(n, |i, j| {
            if i == 0 && j == 0 {
                Complex64::new(sg, 0.0)
            } else if i == 0 {
                // u_{1 bar j} = gamma s^{gamma-1} conj(z_1) z_j
                z[0].conj() * z[j] * (gamma * sg1)
            } else {
                let kron = if i == j { 1.0 } else { 0.0 };
                let rank_one = z[i].conj() * z[j] * (gamma * (gamma - 1.0) * sg2);
                (rank_one + Complex64::new(gamma * sg1 * kron, 0.0)) * q
            }
        })
    });
    Ok(ScalarField {
        id: "pogorelov_u".into(),
        n,
        value,
        exact: Some(exact),
        singular: SingularSet::PrimedAxis,
        domain: None,
        sobolev_r_sup: Some((n * (n - 1)) as f64),
    })
}

/// The smooth right-hand side paired with `pogorelov_u`:
/// `f(z) = (1 - 1/n)^n (1 + |z_1|^2)^{n-2}`.
pub fn pogorelov_f(n: usize) -> Result<ScalarField> {
    if n < 2 {
        return Err(Error::InvalidConfig("pogorelov_f needs n >= 2".into()));
    }
    let value: ValueFn = Arc::new(move |z: &[Complex64]| {
        let base = 1.0 - 1.0 / n as f64;
        base.powi(n as i32) * (1.0 + z[0].norm_sqr()).powi(n as i32 - 2)
    });
    Ok(ScalarField {
        id: "pogorelov_f".into(),
        n,
        value,
        exact: None,
        singular: SingularSet::None,
        domain: None,
        sobolev_r_sup: None,
    })
}

/// The competitor `phi(z) = ||z'||^{2(1-1/n)} (1 + R^2 - ||z'||^2)` on
/// B_R(0); independent of z_1, so its Hessian determinant vanishes.
pub fn phi_r(n: usize, radius: f64) -> Result<ScalarField> {
    if n < 3 {
        return Err(Error::InvalidConfig("phi_r needs n >= 3".into()));
    }
    if radius <= 0.0 {
        return Err(Error::InvalidConfig("phi_r needs R > 0".into()));
    }
    let gamma = 1.0 - 1.0 / n as f64;
    let w = 1.0 + radius * radius;
    let value: ValueFn = Arc::new(move |z: &[Complex64]| {
        let s = norm_sq_primed(z);
        s.powf(gamma) * (w - s)
    });
    let exact: HessianFn = Arc::new(move |z: &[Complex64]| {
        let s = norm_sq_primed(z);
        if s.sqrt() < 1e-150 {
            return Err(Error::SingularPoint);
        }
        // phi = h(s), h = w s^gamma - s^{gamma+1}
        let h1 = gamma * w * s.powf(gamma - 1.0) - (gamma + 1.0) * s.powf(gamma);
        let h2 = gamma * (gamma - 1.0) * w * s.powf(gamma - 2.0)
            - (gamma + 1.0) * gamma * s.powf(gamma - 1.0);
        HermitianMatrix::from_upper(n, |i, j| {
            if i == 0 || j == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                let kron = if i == j { 1.0 } else { 0.0 };
                z[i].conj() * z[j] * h2 + Complex64::new(h1 * kron, 0.0)
            }
        })
    });
    Ok(ScalarField {
        id: "phi_R".into(),
        n,
        value,
        exact: Some(exact),
        singular: SingularSet::PrimedAxis,
        domain: Some((vec![Complex64::new(0.0, 0.0); n], radius)),
        sobolev_r_sup: Some((n * (n - 1)) as f64),
    })
}

/// Diagonal quadratic `sum_j c_j |z_j|^2 + shift` with exact Hessian
/// diag(c).
pub fn diag_quadratic(n: usize, coeffs: &[f64], shift: f64) -> Result<ScalarField> {
    if coeffs.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} coefficients for dimension {n}",
            coeffs.len()
        )));
    }
    let c = coeffs.to_vec();
    let c2 = coeffs.to_vec();
    let value: ValueFn = Arc::new(move |z: &[Complex64]| {
        z.iter()
            .zip(&c)
            .map(|(w, &ci)| ci * w.norm_sqr())
            .sum::<f64>()
            + shift
    });
    let exact: HessianFn = Arc::new(move |_z: &[Complex64]| HermitianMatrix::diagonal(&c2));
    Ok(ScalarField {
        id: "quadratic".into(),
        n,
        value,
        exact: Some(exact),
        singular: SingularSet::None,
        domain: None,
        sobolev_r_sup: None,
    })
}

/// `||z||^2`.
pub fn quadratic(n: usize) -> Result<ScalarField> {
    diag_quadratic(n, &vec![1.0; n], 0.0)
}

/// `Re(z_1^2)`: pluriharmonic, exact Hessian zero.
pub fn pluriharmonic(n: usize) -> Result<ScalarField> {
    let value: ValueFn = Arc::new(move |z: &[Complex64]| (z[0] * z[0]).re);
    let exact: HessianFn = Arc::new(move |_z: &[Complex64]| HermitianMatrix::zero(n));
    Ok(ScalarField {
        id: "pluriharmonic".into(),
        n,
        value,
        exact: Some(exact),
        singular: SingularSet::None,
        domain: None,
        sobolev_r_sup: None,
    })
}

/// `Re(z_j)`: harmonic linear coordinate, exact Hessian zero.
pub fn re_coordinate(n: usize, j: usize) -> Result<ScalarField> {
    if j >= n {
        return Err(Error::IndexOutOfRange(format!("coordinate {j} of {n}")));
    }
    let value: ValueFn = Arc::new(move |z: &[Complex64]| z[j].re);
    let exact: HessianFn = Arc::new(move |_z: &[Complex64]| HermitianMatrix::zero(n));
    Ok(ScalarField {
        id: format!("re_z{}", j + 1),
        n,
        value,
        exact: Some(exact),
        singular: SingularSet::None,
        domain: None,
        sobolev_r_sup: None,
    })
}

/// Corpus lookup by string id for the CLI. `phi_R` takes the radius as the
/// parameter; the rest ignore it.
pub fn by_id(id: &str, n: usize, param: Option<f64>) -> Result<ScalarField> {
    match id {
        "pogorelov_u" => pogorelov_u(n),
        "pogorelov_f" => pogorelov_f(n),
        "phi_R" => phi_r(n, param.unwrap_or(0.5)),
        "quadratic" => quadratic(n),
        "pluriharmonic" => pluriharmonic(n),
        other => Err(Error::InvalidConfig(format!("unknown field id {other}"))),
    }
}

/// Finite-difference complex Hessian via Wirtinger derivatives:
/// `u_{i bar j} = 1/4 [ (d_{x_i x_j} + d_{y_i y_j}) + i (d_{x_i y_j} - d_{y_i x_j}) ] u`,
/// all second partials by central differences of step `h`. Hermitian by
/// construction; accuracy O(h^2) on smooth fields.
pub fn fd_hessian(field: &ScalarField, z: &[Complex64], h: f64) -> Result<HermitianMatrix> {
    let n = field.n;
    if z.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "point has {} coordinates, field has {n}",
            z.len()
        )));
    }
    if field.distance_to_singular_set(z) < 2.0 * h || field.distance_to_boundary(z) < 2.0 * h {
        return Err(Error::TooCloseToSingularity(h));
    }
    let eval = |offsets: &[(usize, f64)]| -> f64 {
        let mut p = z.to_vec();
        for &(axis, delta) in offsets {
            let j = axis / 2;
            if axis % 2 == 0 {
                p[j] = Complex64::new(p[j].re + delta, p[j].im);
            } else {
                p[j] = Complex64::new(p[j].re, p[j].im + delta);
            }
        }
        field.value(&p)
    };
    let f0 = eval(&[]);
    let second = |a: usize, b: usize| -> f64 {
        if a == b {
            (eval(&[(a, h)]) - 2.0 * f0 + eval(&[(a, -h)])) / (h * h)
        } else {
            (eval(&[(a, h), (b, h)]) - eval(&[(a, h), (b, -h)]) - eval(&[(a, -h), (b, h)])
                + eval(&[(a, -h), (b, -h)]))
                / (4.0 * h * h)
        }
    };
    HermitianMatrix::from_upper(n, |i, j| {
        let (xi, yi, xj, yj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
        let re = 0.25 * (second(xi, xj) + second(yi, yj));
        let im = if i == j {
            0.0
        } else {
            0.25 * (second(xi, yj) - second(yi, xj))
        };
        Complex64::new(re, im)
    })
}
