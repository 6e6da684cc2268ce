//! Transverse grids and Laguerre-Gaussian input beams.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Square sampling grid centred on the beam axis, in units of the waist.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2D {
    n: usize,
    extent: f64,
    axis: Vec<f64>,
}

impl Grid2D {
    /// Uniform `n × n` grid over `[-extent, extent]²` with samples on both
    /// endpoints.
    pub fn new(n: usize, extent: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::config(
                "grid.n",
                format!("need at least 2 samples per axis, got {n}"),
            ));
        }
        if !(extent > 0.0 && extent.is_finite()) {
            return Err(Error::config(
                "grid.extent",
                format!("must be positive and finite, got {extent}"),
            ));
        }
        let last = (n - 1) as f64;
        // Integer offsets keep the axis exactly antisymmetric with exact
        // endpoints, so a centre sample (odd n) is 0 and rotated pixels share
        // r bit for bit.
        let axis = (0..n)
            .map(|i| extent * ((2 * i as i64 - (n as i64 - 1)) as f64 / last))
            .collect();
        Ok(Self { n, extent, axis })
    }

    /// Single sample at the origin. Only useful as a carrier for point data.
    pub fn point() -> Self {
        Self {
            n: 1,
            extent: 0.0,
            axis: vec![0.0],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn axis(&self) -> &[f64] {
        &self.axis
    }

    /// Distance between neighbouring samples (0 for a point grid).
    pub fn spacing(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            2.0 * self.extent / (self.n - 1) as f64
        }
    }

    /// Coordinates of flat index `k` (row-major, `x` fastest).
    pub fn coords(&self, k: usize) -> (f64, f64) {
        (self.axis[k % self.n], self.axis[k / self.n])
    }

    /// Azimuthal Nyquist guard: a ring of charge `l_max` needs at least
    /// `8·(l_max + 1)` samples per axis.
    pub fn check_charge_resolution(&self, l_max: u32) -> Result<()> {
        let need = 8 * (l_max as usize + 1);
        if self.n < need {
            return Err(Error::config(
                "grid.n",
                format!(
                    "{} samples cannot resolve topological charge {l_max}; need at least {need}",
                    self.n
                ),
            ));
        }
        Ok(())
    }
}

/// Azimuthal angle in `(-π, π]`, counterclockwise positive.
#[inline]
pub fn azimuth(x: f64, y: f64) -> f64 {
    let t = y.atan2(x);
    if t == -PI {
        PI
    } else {
        t
    }
}

/// One Laguerre-Gaussian input beam (no radial index).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LGBeamSpec {
    /// Peak-scale amplitude ε in units of γ.
    pub epsilon: f64,
    /// Topological charge l.
    pub tc: i32,
    /// Waist w, in the grid's length units.
    pub waist: f64,
}

impl LGBeamSpec {
    pub fn new(epsilon: f64, tc: i32, waist: f64) -> Self {
        Self { epsilon, tc, waist }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        if !(self.waist > 0.0 && self.waist.is_finite()) {
            return Err(Error::config(
                format!("{name}.waist"),
                format!("must be positive, got {}", self.waist),
            ));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::config(
                format!("{name}.epsilon"),
                format!("must be non-negative, got {}", self.epsilon),
            ));
        }
        Ok(())
    }

    /// Complex amplitude ε (r/w)^|l| exp(-(r/w)²) exp(i l θ) at `(x, y)`.
    #[inline]
    pub fn amplitude_at(&self, x: f64, y: f64) -> Complex64 {
        let rho = x.hypot(y) / self.waist;
        let radial = self.epsilon * rho.powi(self.tc.unsigned_abs() as i32) * (-rho * rho).exp();
        Complex64::from_polar(radial, self.tc as f64 * azimuth(x, y))
    }

    /// Radius of the intensity ring, w·√(|l|/2).
    pub fn peak_radius(&self) -> f64 {
        self.waist * (self.tc.unsigned_abs() as f64 / 2.0).sqrt()
    }
}

/// Complex amplitudes sampled on a [`Grid2D`], row-major with `x` fastest
/// and `y` increasing with the row index.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Grid2D,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: Grid2D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: &Grid2D) -> Self {
        Self {
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            grid: grid.clone(),
        }
    }

    /// Evaluates `f(x, y)` at every sample, in parallel.
    pub fn from_fn<F>(grid: &Grid2D, f: F) -> Self
    where
        F: Fn(f64, f64) -> Complex64 + Sync,
    {
        let values = (0..grid.len())
            .into_par_iter()
            .map(|k| {
                let (x, y) = grid.coords(k);
                f(x, y)
            })
            .collect();
        Self {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[j * self.grid.n + i]
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn max_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    /// Bilinear interpolation; `None` outside the sampled square.
    pub fn bilinear(&self, x: f64, y: f64) -> Option<Complex64> {
        let n = self.grid.n;
        if n < 2 {
            return (x == 0.0 && y == 0.0).then(|| self.values[0]);
        }
        let e = self.grid.extent;
        if !(x.abs() <= e && y.abs() <= e) {
            return None;
        }
        let h = self.grid.spacing();
        let fx = (x + e) / h;
        let fy = (y + e) / h;
        let i = (fx.floor() as usize).min(n - 2);
        let j = (fy.floor() as usize).min(n - 2);
        let tx = fx - i as f64;
        let ty = fy - j as f64;
        let v00 = self.get(i, j);
        let v10 = self.get(i + 1, j);
        let v01 = self.get(i, j + 1);
        let v11 = self.get(i + 1, j + 1);
        Some(v00 * ((1.0 - tx) * (1.0 - ty)) + v10 * (tx * (1.0 - ty)) + v01 * ((1.0 - tx) * ty) + v11 * (tx * ty))
    }
}

/// Builds the default-checked grid.
pub fn make_grid(n: usize, extent: f64) -> Result<Grid2D> {
    Grid2D::new(n, extent)
}

/// Samples a Laguerre-Gaussian beam onto `grid`.
pub fn sample_lg(spec: &LGBeamSpec, grid: &Grid2D) -> ComplexField {
    ComplexField::from_fn(grid, |x, y| spec.amplitude_at(x, y))
}
