//! Observables extracted from transverse fields: topological charge,
//! azimuthal intensity profiles, petal counts, peak angles, ring radii.
//!
//! Everything samples through [`FieldSampler`], implemented both by grid
//! fields (bilinear interpolation) and by [`ModelSampler`], which evaluates
//! the propagation model exactly at each requested point.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::beams::{ComplexField, Grid2D};
use crate::error::{Error, Result};
use crate::propagation::{OutputKind, Scene};

/// 0.5° azimuthal resolution.
pub const DEFAULT_AZIMUTHAL_SAMPLES: usize = 720;

/// Amplitude floor for phase measurements, relative to the field maximum.
pub const PHASE_FLOOR: f64 = 1e-12;

/// Harmonics weaker than this fraction of the mean count as no structure.
pub const STRUCTURE_THRESHOLD: f64 = 1e-6;

/// Largest allowed distance of a measured winding from an integer.
pub const WINDING_TOLERANCE: f64 = 0.05;

/// Something that can report a complex amplitude at a transverse point.
pub trait FieldSampler {
    fn sample(&self, x: f64, y: f64) -> Result<Complex64>;

    /// Largest ring radius that stays inside the sampled region.
    fn max_radius(&self) -> f64;

    /// Radial scan step used by [`ring_radius`].
    fn radial_step(&self) -> f64;

    /// Largest |amplitude| over the sampled region.
    fn peak_magnitude(&self) -> Result<f64>;
}

impl FieldSampler for ComplexField {
    fn sample(&self, x: f64, y: f64) -> Result<Complex64> {
        self.bilinear(x, y).ok_or(Error::OutOfGrid {
            radius: x.hypot(y),
            max: self.grid().extent(),
        })
    }

    fn max_radius(&self) -> f64 {
        self.grid().extent()
    }

    fn radial_step(&self) -> f64 {
        0.5 * self.grid().spacing()
    }

    fn peak_magnitude(&self) -> Result<f64> {
        Ok(self.max_norm())
    }
}

/// Exact evaluation of one output of a [`Scene`], with a reference grid
/// supplying the region and scan resolution.
#[derive(Debug, Clone)]
pub struct ModelSampler {
    pub scene: Scene,
    pub kind: OutputKind,
    pub grid: Grid2D,
}

impl ModelSampler {
    pub fn new(scene: Scene, kind: OutputKind, grid: Grid2D) -> Self {
        Self { scene, kind, grid }
    }
}

impl FieldSampler for ModelSampler {
    fn sample(&self, x: f64, y: f64) -> Result<Complex64> {
        let e = self.grid.extent();
        if !(x.abs() <= e && y.abs() <= e) {
            return Err(Error::OutOfGrid {
                radius: x.hypot(y),
                max: e,
            });
        }
        self.scene.field(self.kind, x, y)
    }

    fn max_radius(&self) -> f64 {
        self.grid.extent()
    }

    fn radial_step(&self) -> f64 {
        0.5 * self.grid.spacing()
    }

    fn peak_magnitude(&self) -> Result<f64> {
        (0..self.grid.len()).try_fold(0.0f64, |m, k| {
            let (x, y) = self.grid.coords(k);
            Ok(m.max(self.scene.field(self.kind, x, y)?.norm()))
        })
    }
}

fn check_radius(field: &impl FieldSampler, radius: f64) -> Result<()> {
    let max = field.max_radius();
    if !(radius >= 0.0 && radius <= max) {
        return Err(Error::OutOfGrid { radius, max });
    }
    Ok(())
}

fn ring_samples(field: &impl FieldSampler, radius: f64, m: usize) -> Result<Vec<Complex64>> {
    check_radius(field, radius)?;
    (0..m)
        .map(|k| {
            let theta = TAU * k as f64 / m as f64;
            field.sample(radius * theta.cos(), radius * theta.sin())
        })
        .collect()
}

/// Wraps an angle difference into (−π, π].
#[inline]
pub fn wrap_pi(a: f64) -> f64 {
    let w = a - TAU * (a / TAU).round();
    if w <= -PI {
        w + TAU
    } else if w > PI {
        w - TAU
    } else {
        w
    }
}

/// Wraps an angle into [0, 2π).
#[inline]
pub fn wrap_tau(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Unrounded winding: accumulated phase around the ring over 2π.
pub fn winding_value(field: &impl FieldSampler, radius: f64, m: usize) -> Result<f64> {
    let samples = ring_samples(field, radius, m)?;
    let floor = PHASE_FLOOR * field.peak_magnitude()?;
    if samples.iter().any(|v| !(v.norm() > floor)) {
        return Err(Error::AmplitudeFloor { radius });
    }
    let total: f64 = (0..m)
        .map(|k| wrap_pi(samples[(k + 1) % m].arg() - samples[k].arg()))
        .sum();
    Ok(total / TAU)
}

/// Topological charge measured as the phase winding on the ring of radius
/// `radius`, using [`DEFAULT_AZIMUTHAL_SAMPLES`] points.
pub fn winding_number(field: &impl FieldSampler, radius: f64) -> Result<i32> {
    winding_number_with(field, radius, DEFAULT_AZIMUTHAL_SAMPLES)
}

pub fn winding_number_with(field: &impl FieldSampler, radius: f64, m: usize) -> Result<i32> {
    let value = winding_value(field, radius, m)?;
    let rounded = value.round();
    if (value - rounded).abs() > WINDING_TOLERANCE {
        return Err(Error::NonIntegerWinding { radius, value });
    }
    Ok(rounded as i32)
}

/// Winding on the field's own intensity ring.
pub fn winding_number_auto(field: &impl FieldSampler) -> Result<i32> {
    let r = ring_radius(field)?;
    winding_number(field, r)
}

/// Intensity versus azimuth on a ring.
#[derive(Debug, Clone, PartialEq)]
pub struct AzimuthalProfile {
    pub radius: f64,
    pub thetas: Vec<f64>,
    pub intensities: Vec<f64>,
}

impl AzimuthalProfile {
    /// Builds a profile from intensities sampled uniformly over [0, 2π).
    pub fn from_intensities(radius: f64, intensities: Vec<f64>) -> Self {
        let m = intensities.len();
        Self {
            radius,
            thetas: (0..m).map(|k| TAU * k as f64 / m as f64).collect(),
            intensities,
        }
    }

    pub fn len(&self) -> usize {
        self.intensities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intensities.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.intensities.iter().sum::<f64>() / self.len() as f64
    }

    /// max − min of the intensities.
    pub fn peak_to_valley(&self) -> f64 {
        let (lo, hi) = self
            .intensities
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        hi - lo
    }

    /// Circular shift by `k` samples (rotation by 2πk/m).
    pub fn rotated(&self, k: usize) -> Self {
        let m = self.len();
        let intensities = (0..m).map(|i| self.intensities[(i + m - k % m) % m]).collect();
        Self::from_intensities(self.radius, intensities)
    }

    /// |F_k| of the discrete Fourier transform for k in 0..=m/2.
    pub fn harmonic_magnitudes(&self) -> Vec<f64> {
        let m = self.len();
        (0..=m / 2)
            .map(|k| {
                let (mut re, mut im) = (0.0, 0.0);
                for (j, &v) in self.intensities.iter().enumerate() {
                    // Reduce the phase index first so large k·j stay exact.
                    let phase = TAU * ((k * j) % m) as f64 / m as f64;
                    re += v * phase.cos();
                    im -= v * phase.sin();
                }
                re.hypot(im)
            })
            .collect()
    }
}

/// Samples `|field|²` at `m` uniform angles on the ring of radius `radius`.
pub fn azimuthal_profile(field: &impl FieldSampler, radius: f64, m: usize) -> Result<AzimuthalProfile> {
    if m < 16 {
        return Err(Error::config(
            "analysis.m",
            format!("need at least 16 azimuthal samples, got {m}"),
        ));
    }
    let samples = ring_samples(field, radius, m)?;
    Ok(AzimuthalProfile::from_intensities(
        radius,
        samples.iter().map(|v| v.norm_sqr()).collect(),
    ))
}

/// Index of the dominant azimuthal harmonic, 0 for a structureless profile.
pub fn petal_count(profile: &AzimuthalProfile) -> usize {
    let mags = profile.harmonic_magnitudes();
    let m = profile.len();
    let (best_k, best) = (1..m.div_ceil(2))
        .map(|k| (k, mags[k]))
        .fold((0, 0.0), |acc, (k, v)| if v > acc.1 { (k, v) } else { acc });
    if best < STRUCTURE_THRESHOLD * mags[0] || best == 0.0 {
        0
    } else {
        best_k
    }
}

/// Angle of the global intensity maximum in [0, 2π), refined by a parabola
/// through the discrete maximum and its two neighbours.
pub fn peak_angle(profile: &AzimuthalProfile) -> Result<f64> {
    if petal_count(profile) == 0 {
        return Err(Error::StructurelessProfile);
    }
    let m = profile.len();
    let v = &profile.intensities;
    let k = (0..m).fold(0, |best, i| if v[i] > v[best] { i } else { best });
    let (a, b, c) = (v[(k + m - 1) % m], v[k], v[(k + 1) % m]);
    let curvature = a - 2.0 * b + c;
    let offset = if curvature < 0.0 {
        (0.5 * (a - c) / curvature).clamp(-0.5, 0.5)
    } else {
        0.0
    };
    Ok(wrap_tau(TAU * (k as f64 + offset) / m as f64))
}

/// Azimuthally averaged intensity on a ring.
pub fn ring_mean_intensity(field: &impl FieldSampler, radius: f64, m: usize) -> Result<f64> {
    if radius == 0.0 {
        return Ok(field.sample(0.0, 0.0)?.norm_sqr());
    }
    Ok(ring_samples(field, radius, m)?
        .iter()
        .map(|v| v.norm_sqr())
        .sum::<f64>()
        / m as f64)
}

/// Radius of maximum azimuthally averaged intensity, scanned from the axis
/// outward at the sampler's radial step.
pub fn ring_radius(field: &impl FieldSampler) -> Result<f64> {
    ring_radius_with(field, DEFAULT_AZIMUTHAL_SAMPLES)
}

pub fn ring_radius_with(field: &impl FieldSampler, m: usize) -> Result<f64> {
    let step = field.radial_step();
    let max = field.max_radius();
    let count = if step > 0.0 { (max / step).floor() as usize } else { 0 };
    let mut best = (0.0, 0.0);
    for i in 0..=count {
        let r = (i as f64 * step).min(max);
        let mean = ring_mean_intensity(field, r, m)?;
        if mean > best.1 {
            best = (r, mean);
        }
    }
    if best.1 == 0.0 {
        return Err(Error::ZeroField);
    }
    Ok(best.0)
}
