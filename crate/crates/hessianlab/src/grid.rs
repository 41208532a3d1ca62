//! Tensor-product sampling grids on balls in C^n, with quadrature weights,
//! singular-set exclusion and boundary sphere samples.

use rand::rngs::StdRng;
use rand::SeedableRng;

use crate::error::{Error, Result};
use crate::hermitian::{random_unitary_from, Complex64};

/// Volume of the unit ball in C^n (= R^{2n}): pi^n / n!.
pub fn ball_volume(n: usize, radius: f64) -> f64 {
    let mut v = 1.0f64;
    for k in 1..=n {
        v *= std::f64::consts::PI / k as f64;
    }
    v * radius.powi(2 * n as i32)
}

/// Surface measure of the unit sphere in C^n: 2 pi^n / (n-1)!, equal to
/// 2n times the unit ball volume.
pub fn sphere_measure(n: usize) -> f64 {
    2.0 * n as f64 * ball_volume(n, 1.0)
}

#[derive(Debug, Clone)]
pub struct GridPoint {
    pub z: Vec<Complex64>,
    pub weight: f64,
}

/// A sampled ball `B_radius(center)` in C^n: a cell-centered tensor grid in
/// the 2n real coordinates, restricted to the ball. Weights are uniform and
/// normalized so that they sum exactly to the ball volume.
#[derive(Debug, Clone)]
pub struct GridDomain {
    pub n: usize,
    pub center: Vec<Complex64>,
    pub radius: f64,
    pub per_axis: usize,
    pub spacing: f64,
    pub points: Vec<GridPoint>,
    /// Margin used to exclude the set { z' = 0 }, when requested.
    pub exclusion: f64,
}

impl GridDomain {
    /// Cell-centered tensor grid over the bounding box of the ball, keeping
    /// the points inside the ball.
    pub fn ball(n: usize, center: &[Complex64], radius: f64, per_axis: usize) -> Result<Self> {
        if center.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "center has {} coordinates, expected {n}",
                center.len()
            )));
        }
        if radius <= 0.0 || per_axis == 0 {
            return Err(Error::InvalidConfig(format!(
                "radius {radius}, per_axis {per_axis}"
            )));
        }
        let dims = 2 * n;
        let spacing = 2.0 * radius / per_axis as f64;
        let axis: Vec<f64> = (0..per_axis)
            .map(|k| -radius + (k as f64 + 0.5) * spacing)
            .collect();
        let total = (per_axis as u128).pow(dims as u32);
        if total > 200_000_000 {
            return Err(Error::InvalidConfig(format!(
                "grid would enumerate {total} candidate cells"
            )));
        }
        let mut points = Vec::new();
        let mut idx = vec![0usize; dims];
        loop {
            let mut r2 = 0.0;
            for d in 0..dims {
                let x = axis[idx[d]];
                r2 += x * x;
            }
            if r2 <= radius * radius {
                let z: Vec<Complex64> = (0..n)
                    .map(|j| {
                        Complex64::new(
                            center[j].re + axis[idx[2 * j]],
                            center[j].im + axis[idx[2 * j + 1]],
                        )
                    })
                    .collect();
                points.push(GridPoint { z, weight: 0.0 });
            }
            // odometer increment
            let mut d = 0;
            loop {
                idx[d] += 1;
                if idx[d] < per_axis {
                    break;
                }
                idx[d] = 0;
                d += 1;
                if d == dims {
                    break;
                }
            }
            if d == dims {
                break;
            }
        }
        if points.is_empty() {
            return Err(Error::InvalidConfig(
                "grid resolution too coarse: no points inside the ball".into(),
            ));
        }
        // normalize uniform weights to the exact ball volume
        let w = ball_volume(n, radius) / points.len() as f64;
        for p in &mut points {
            p.weight = w;
        }
        Ok(Self {
            n,
            center: center.to_vec(),
            radius,
            per_axis,
            spacing,
            points,
            exclusion: 0.0,
        })
    }

    pub fn ball_at_origin(n: usize, radius: f64, per_axis: usize) -> Result<Self> {
        Self::ball(n, &vec![Complex64::new(0.0, 0.0); n], radius, per_axis)
    }

    /// Drop points with `|| z' || < margin` (distance to the set z' = 0,
    /// where z' is the coordinate tuple without the first entry), then
    /// re-normalize weights to the retained count.
    pub fn exclude_primed_axis(mut self, margin: f64) -> Result<Self> {
        self.points.retain(|p| {
            let s: f64 = p.z[1..].iter().map(|w| w.norm_sqr()).sum();
            s.sqrt() >= margin
        });
        if self.points.is_empty() {
            return Err(Error::InvalidConfig(
                "exclusion margin removed every grid point".into(),
            ));
        }
        let w = ball_volume(self.n, self.radius) / self.points.len() as f64;
        for p in &mut self.points {
            p.weight = w;
        }
        self.exclusion = margin;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        pairwise_sum(&self.points.iter().map(|p| p.weight).collect::<Vec<_>>())
    }

    /// L^p norm of a sampled grid field with respect to the grid quadrature.
    pub fn lp_norm(&self, values: &[f64], p: f64) -> Result<f64> {
        if values.len() != self.points.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for {} grid points",
                values.len(),
                self.points.len()
            )));
        }
        let terms: Vec<f64> = values
            .iter()
            .zip(&self.points)
            .map(|(v, pt)| v.abs().powf(p) * pt.weight)
            .collect();
        Ok(pairwise_sum(&terms).powf(1.0 / p))
    }

    /// Boundary sphere sample: `count` deterministic quasi-uniform
    /// directions scaled to the ball radius around the center.
    pub fn boundary_sample(&self, count: usize, seed: u64) -> Vec<Vec<Complex64>> {
        sphere_directions(self.n, count, seed)
            .into_iter()
            .map(|dir| {
                (0..self.n)
                    .map(|j| self.center[j] + dir[j] * self.radius)
                    .collect()
            })
            .collect()
    }
}

/// Deterministic quasi-uniform unit directions on the sphere in C^n, built
/// from rows of seeded random unitaries (each row is a unit vector).
pub fn sphere_directions(n: usize, count: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let mut dirs = Vec::with_capacity(count);
    let mut rng = StdRng::seed_from_u64(seed);
    while dirs.len() < count {
        let u = random_unitary_from(&mut rng, n);
        for row in 0..n {
            if dirs.len() == count {
                break;
            }
            dirs.push((0..n).map(|c| u[row * n + c]).collect());
        }
    }
    // always include the coordinate axes among the first directions
    for j in 0..n.min(count) {
        let mut axis = vec![Complex64::new(0.0, 0.0); n];
        axis[j] = Complex64::new(1.0, 0.0);
        dirs[j] = axis;
    }
    dirs
}

/// Pairwise (cascade) summation; the reduction order is fixed by the slice
/// order, independent of threading.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        len => {
            let mid = len / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}
