//! Cone families with membership predicates: the positive cone, the
//! sigma-polynomial cones Gamma_m, the m-sum (m-Monge-Ampere) cone, and the
//! interpolated two-dimensional cone.
//!
//! Membership is decided from the signs of the defining inequality values at
//! the computed eigenvalues, with no extra margin. Values within 1e-12 of
//! zero are reported as `Indeterminate` rather than silently rounded to a
//! side: the cones are open, so a floating boundary must not pass.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::derive_seed;
use crate::error::{Error, Result};
use crate::hermitian::{
    self, random_hermitian, random_unitary, BackgroundForm, Complex64, HermitianMatrix,
    SpectrumVector,
};
use crate::report::{Report, Witness};

/// Width of the indeterminate band around zero for membership decisions.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConeId {
    /// Positive definite matrices: every eigenvalue > 0.
    PositiveCone,
    /// sigma_q(lambda) > 0 for q = 1..=m.
    GammaM(usize),
    /// Every sum of m distinct eigenvalues > 0.
    MMonge(usize),
    /// n = 2 only: lambda_1 + a lambda_2 > 0 and lambda_2 + a lambda_1 > 0.
    Interp(f64),
}

impl ConeId {
    pub fn label(&self) -> String {
        match self {
            ConeId::PositiveCone => "positive".to_string(),
            ConeId::GammaM(m) => format!("gamma_{m}"),
            ConeId::MMonge(m) => format!("m_monge_{m}"),
            ConeId::Interp(a) => format!("interp_{a}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Inside,
    Outside,
    /// Some defining value sits inside the `BOUNDARY_TOL` band around zero.
    Indeterminate,
}

#[derive(Debug, Clone)]
pub struct ConeFamily {
    pub id: ConeId,
    pub n: usize,
    pub background: BackgroundForm,
}

impl ConeFamily {
    pub fn new(id: ConeId, n: usize, background: BackgroundForm) -> Result<Self> {
        if background.dim() != n {
            return Err(Error::DimensionMismatch(format!(
                "background dimension {} vs cone dimension {n}",
                background.dim()
            )));
        }
        match id {
            ConeId::GammaM(m) | ConeId::MMonge(m) => {
                if m == 0 || m > n {
                    return Err(Error::InvalidConfig(format!(
                        "cone order m={m} outside 1..={n}"
                    )));
                }
            }
            ConeId::Interp(a) => {
                if n != 2 {
                    return Err(Error::InvalidConfig(
                        "interpolated cone is defined for n = 2 only".into(),
                    ));
                }
                if !(0.0..=1.0).contains(&a) {
                    return Err(Error::InvalidConfig(format!(
                        "interpolation parameter a={a} outside [0, 1]"
                    )));
                }
            }
            ConeId::PositiveCone => {}
        }
        Ok(Self { id, n, background })
    }

    pub fn with_identity(id: ConeId, n: usize) -> Result<Self> {
        Self::new(id, n, BackgroundForm::identity(n))
    }

    pub fn label(&self) -> String {
        self.id.label()
    }

    /// The values of the defining strict inequalities at an eigenvalue
    /// vector. Membership means all of them are positive.
    pub fn defining_values(&self, spectrum: &SpectrumVector) -> Vec<f64> {
        let lam = spectrum.as_slice();
        match self.id {
            ConeId::PositiveCone => vec![spectrum.min()],
            ConeId::GammaM(m) => {
                let e = hermitian::elementary_symmetric_all(lam);
                (1..=m).map(|q| e[q]).collect()
            }
            // ascending order makes the smallest m-sum the sum of the first
            // m entries, which decides every other m-sum
            ConeId::MMonge(m) => vec![lam[..m].iter().sum()],
            ConeId::Interp(a) => vec![lam[0] + a * lam[1], lam[1] + a * lam[0]],
        }
    }

    /// Smallest defining value; positive margin = strictly inside.
    pub fn margin(&self, z: &[Complex64], a: &HermitianMatrix) -> Result<f64> {
        let spectrum = hermitian::eigenvalues(a, &self.background.at(z))?;
        Ok(self
            .defining_values(&spectrum)
            .into_iter()
            .fold(f64::INFINITY, f64::min))
    }

    pub fn membership(&self, z: &[Complex64], a: &HermitianMatrix) -> Result<Membership> {
        if a.dim() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "matrix dimension {} vs cone dimension {}",
                a.dim(),
                self.n
            )));
        }
        let spectrum = hermitian::eigenvalues(a, &self.background.at(z))?;
        let values = self.defining_values(&spectrum);
        if values.iter().any(|v| v.abs() < BOUNDARY_TOL) {
            return Ok(Membership::Indeterminate);
        }
        if values.iter().all(|&v| v > 0.0) {
            Ok(Membership::Inside)
        } else {
            Ok(Membership::Outside)
        }
    }

    /// Strict membership; an indeterminate boundary counts as outside.
    pub fn contains(&self, z: &[Complex64], a: &HermitianMatrix) -> Result<bool> {
        Ok(self.membership(z, a)? == Membership::Inside)
    }

    /// Rejection-sample a matrix strictly inside the cone (margin above
    /// `BOUNDARY_TOL`), deterministically from the seed.
    pub fn sample_inside(&self, z: &[Complex64], seed: u64) -> Result<HermitianMatrix> {
        let (lo, hi) = match self.id {
            ConeId::PositiveCone => (0.05, 2.5),
            _ => (-0.35, 2.5),
        };
        for attempt in 0..10_000u64 {
            let a = random_hermitian(self.n, derive_seed(seed, attempt), lo, hi)?;
            if self.margin(z, &a)? > 1e-8 {
                return Ok(a);
            }
        }
        Err(Error::InvalidConfig(format!(
            "could not sample inside cone {}",
            self.label()
        )))
    }

    /// Check that membership is invariant under unitary conjugation
    /// `A -> U^H A U`. Stated for the identity background only.
    pub fn check_unitary_invariance(&self, samples: u64, seed: u64) -> Result<Report> {
        if !self.background.is_constant_identity() {
            return Err(Error::UnsupportedBackground(
                "unitary invariance is checked for the identity background".into(),
            ));
        }
        let z = vec![Complex64::new(0.0, 0.0); self.n];
        let mut witnesses = Vec::new();
        let mut tested = 0u64;
        for i in 0..samples {
            let a = random_hermitian(self.n, derive_seed(seed, 2 * i), -2.0, 2.0)?;
            let u = random_unitary(self.n, derive_seed(seed, 2 * i + 1));
            let conj = hermitian::conjugate(&a, &u);
            let m1 = self.membership(&z, &a)?;
            let m2 = self.membership(&z, &conj)?;
            if m1 == Membership::Indeterminate || m2 == Membership::Indeterminate {
                continue;
            }
            tested += 1;
            if m1 != m2 {
                witnesses.push(Witness {
                    sample: Some(i),
                    value: -1.0,
                    detail: format!("membership {m1:?} vs {m2:?} for A = {}", a.brief()),
                });
            }
        }
        let pass = witnesses.is_empty();
        Ok(Report {
            check: "cone-unitary-invariance".into(),
            subject: self.label(),
            n: self.n,
            samples: tested,
            tolerance: 0.0,
            max_violation: if pass { 0.0 } else { 1.0 },
            witnesses,
            pass,
        })
    }

    /// Check convexity: for in-cone pairs, convex combinations at
    /// t in {0.25, 0.5, 0.75} stay in the cone.
    pub fn check_convexity(&self, samples: u64, seed: u64) -> Result<Report> {
        let z = vec![Complex64::new(0.0, 0.0); self.n];
        let mut witnesses = Vec::new();
        for i in 0..samples {
            let a = self.sample_inside(&z, derive_seed(seed, 2 * i))?;
            let b = self.sample_inside(&z, derive_seed(seed, 2 * i + 1))?;
            for &t in &[0.25, 0.5, 0.75] {
                let mix = a.scale(t).add(&b.scale(1.0 - t))?;
                if self.membership(&z, &mix)? == Membership::Outside {
                    witnesses.push(Witness {
                        sample: Some(i),
                        value: self.margin(&z, &mix)?,
                        detail: format!(
                            "t={t}: combination left the cone; A = {}, B = {}",
                            a.brief(),
                            b.brief()
                        ),
                    });
                }
            }
        }
        let pass = witnesses.is_empty();
        let max_violation = witnesses.iter().map(|w| -w.value).fold(0.0f64, f64::max);
        Ok(Report {
            check: "cone-convexity".into(),
            subject: self.label(),
            n: self.n,
            samples,
            tolerance: 0.0,
            max_violation,
            witnesses,
            pass,
        })
    }
}

/// Sample a Hermitian matrix with spectrum biased to straddle the cone
/// boundaries; used by the membership sweeps.
pub fn sample_mixed(n: usize, seed: u64) -> Result<HermitianMatrix> {
    random_hermitian(n, seed, -2.0, 2.0)
}

/// Uniform f64 in a range from a seeded rng, for CLI sweeps.
pub fn seeded_uniform(seed: u64, lo: f64, hi: f64) -> f64 {
    let mut rng = StdRng::seed_from_u64(seed);
    rng.random_range(lo..hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn origin(n: usize) -> Vec<Complex64> {
        vec![Complex64::new(0.0, 0.0); n]
    }

    fn diag_cone_member(id: ConeId, n: usize, diag: &[f64]) -> Membership {
        let cone = ConeFamily::with_identity(id, n).unwrap();
        let a = HermitianMatrix::diagonal(diag).unwrap();
        cone.membership(&origin(n), &a).unwrap()
    }

    #[test]
    fn identity_is_in_every_cone() {
        for n in 2..=5 {
            let ids: Vec<ConeId> = {
                let mut v = vec![ConeId::PositiveCone];
                for m in 1..=n {
                    v.push(ConeId::GammaM(m));
                    v.push(ConeId::MMonge(m));
                }
                if n == 2 {
                    v.push(ConeId::Interp(0.5));
                }
                v
            };
            let ones = vec![1.0; n];
            for id in ids {
                assert_eq!(
                    diag_cone_member(id, n, &ones),
                    Membership::Inside,
                    "identity must lie in {id:?} at n={n}"
                );
            }
        }
    }

    #[test]
    fn gamma_m_examples() {
        assert_eq!(
            diag_cone_member(ConeId::GammaM(3), 3, &[1.0, 1.0, 1.0]),
            Membership::Inside
        );
        // sigma_2(-1, 3) = -3 < 0 but sigma_1 = 2 > 0
        assert_eq!(
            diag_cone_member(ConeId::GammaM(2), 2, &[-1.0, 3.0]),
            Membership::Outside
        );
        assert_eq!(
            diag_cone_member(ConeId::GammaM(1), 2, &[-1.0, 3.0]),
            Membership::Inside
        );
    }

    #[test]
    fn m_monge_pair_sums() {
        // pair sums 1, 2, 5 all positive
        assert_eq!(
            diag_cone_member(ConeId::MMonge(2), 3, &[-1.0, 2.0, 3.0]),
            Membership::Inside
        );
        assert_eq!(
            diag_cone_member(ConeId::MMonge(2), 3, &[-3.0, 2.0, 3.0]),
            Membership::Outside
        );
    }

    #[test]
    fn interp_cone_matches_endpoints() {
        // a = 0 reduces to the positive cone, a = 1 to the half-plane cone
        assert_eq!(
            diag_cone_member(ConeId::Interp(0.0), 2, &[-0.1, 3.0]),
            Membership::Outside
        );
        assert_eq!(
            diag_cone_member(ConeId::Interp(1.0), 2, &[-0.1, 3.0]),
            Membership::Inside
        );
        assert_eq!(
            diag_cone_member(ConeId::Interp(0.5), 2, &[-1.0, 1.9]),
            Membership::Outside
        );
    }

    #[test]
    fn boundary_is_indeterminate() {
        assert_eq!(
            diag_cone_member(ConeId::PositiveCone, 2, &[0.0, 1.0]),
            Membership::Indeterminate
        );
        assert_eq!(
            diag_cone_member(ConeId::GammaM(2), 2, &[-1.0, 1.0]),
            Membership::Indeterminate
        );
    }

    #[test]
    fn scale_invariance_of_membership() {
        let cone = ConeFamily::with_identity(ConeId::GammaM(2), 3).unwrap();
        let z = origin(3);
        for seed in 0..50u64 {
            let a = sample_mixed(3, seed).unwrap();
            let m = cone.membership(&z, &a).unwrap();
            if m == Membership::Indeterminate {
                continue;
            }
            for &t in &[1e-3, 0.5, 2.0, 1e3] {
                let mt = cone.membership(&z, &a.scale(t)).unwrap();
                if mt != Membership::Indeterminate {
                    assert_eq!(m, mt, "scaling by {t} flipped membership");
                }
            }
        }
    }

    #[test]
    fn monotone_nesting_of_gamma_cones() {
        let z = origin(4);
        for seed in 0..100u64 {
            let a = sample_mixed(4, seed).unwrap();
            for m in (2..=4).rev() {
                let outer = ConeFamily::with_identity(ConeId::GammaM(m), 4).unwrap();
                let inner = ConeFamily::with_identity(ConeId::GammaM(m - 1), 4).unwrap();
                if outer.membership(&z, &a).unwrap() == Membership::Inside {
                    assert_ne!(
                        inner.membership(&z, &a).unwrap(),
                        Membership::Outside,
                        "Gamma_{m} member must lie in Gamma_{}",
                        m - 1
                    );
                }
            }
        }
    }

    #[test]
    fn positive_matrices_pass_every_cone() {
        let z = origin(3);
        for seed in 0..50u64 {
            let a = random_hermitian(3, 900 + seed, 0.05, 3.0).unwrap();
            for id in [
                ConeId::PositiveCone,
                ConeId::GammaM(1),
                ConeId::GammaM(2),
                ConeId::GammaM(3),
                ConeId::MMonge(2),
                ConeId::MMonge(3),
            ] {
                let cone = ConeFamily::with_identity(id, 3).unwrap();
                assert_eq!(
                    cone.membership(&z, &a).unwrap(),
                    Membership::Inside,
                    "positive definite matrix rejected by {id:?}"
                );
            }
        }
    }

    #[test]
    fn unitary_invariance_sweeps() {
        let gm = ConeFamily::with_identity(ConeId::GammaM(2), 3).unwrap();
        let r = gm.check_unitary_invariance(500, 3).unwrap();
        assert!(r.pass, "{:?}", r.witnesses.first());

        let pos = ConeFamily::with_identity(ConeId::PositiveCone, 2).unwrap();
        assert!(pos.check_unitary_invariance(100, 3).unwrap().pass);

        let interp = ConeFamily::with_identity(ConeId::Interp(0.5), 2).unwrap();
        assert!(interp.check_unitary_invariance(200, 3).unwrap().pass);
    }

    #[test]
    fn unitary_invariance_needs_identity_background() {
        let beta =
            BackgroundForm::from_fn(2, |_| HermitianMatrix::scaled_identity(2, 2.0).unwrap());
        let cone = ConeFamily::new(ConeId::GammaM(1), 2, beta).unwrap();
        assert!(matches!(
            cone.check_unitary_invariance(10, 0),
            Err(Error::UnsupportedBackground(_))
        ));
    }

    #[test]
    fn convexity_sweeps() {
        let gm = ConeFamily::with_identity(ConeId::GammaM(2), 3).unwrap();
        assert!(gm.check_convexity(500, 11).unwrap().pass);
        let pos = ConeFamily::with_identity(ConeId::PositiveCone, 3).unwrap();
        assert!(pos.check_convexity(500, 12).unwrap().pass);
        let interp = ConeFamily::with_identity(ConeId::Interp(1.0), 2).unwrap();
        assert!(interp.check_convexity(200, 13).unwrap().pass);
    }

    #[test]
    fn interp_requires_dimension_two() {
        assert!(matches!(
            ConeFamily::with_identity(ConeId::Interp(0.5), 3),
            Err(Error::InvalidConfig(_))
        ));
    }
}
