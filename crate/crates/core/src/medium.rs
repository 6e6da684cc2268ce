//! Weak-probe steady-state response of the ladder medium.
//!
//! The coherences obey
//!
//! ```text
//! ρ̇31 = -(γ31 + iδ) ρ31 + (i/2)(Ω_s + Ω_fs) + (i/2) Ω_c ρ21
//! ρ̇21 = -γ21 ρ21       + (i/2)(Ω_p + Ω_fp) + (i/2) Ω_c* ρ31
//! ```
//!
//! with the probes treated to first order. Their fixed point is available in
//! closed form; [`evolve_coherences`] integrates the same equations in time
//! and serves as the independent check.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{self, Pair};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Medium constants in units of γ = γ31.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumParams {
    pub gamma31: f64,
    pub gamma21: f64,
    /// Common detuning δ = δ_c = δ_s (δ_p = 0).
    pub delta: f64,
    /// Lumped optical-depth constant d = α_u γ31 = α_d γ21.
    pub d: f64,
    /// Normalised medium length; always 1.
    #[serde(default = "unit_length")]
    pub length: f64,
}

fn unit_length() -> f64 {
    1.0
}

impl Default for MediumParams {
    fn default() -> Self {
        Self {
            gamma31: 1.0,
            gamma21: 0.05,
            delta: 0.0,
            d: 100.0,
            length: 1.0,
        }
    }
}

impl MediumParams {
    pub fn new(gamma31: f64, gamma21: f64, delta: f64, d: f64) -> Self {
        Self {
            gamma31,
            gamma21,
            delta,
            d,
            length: 1.0,
        }
    }

    /// Checks the main-path invariants. The lossless limit γ31 = γ21 = 0 is
    /// rejected here; tests reach it through [`MediumParams::new`] directly.
    pub fn validate(&self) -> Result<()> {
        let finite = |v: f64| v.is_finite();
        if !(self.gamma31 > 0.0 && finite(self.gamma31)) {
            return Err(Error::config("medium.gamma31", "must be positive"));
        }
        if !(self.gamma21 > 0.0 && finite(self.gamma21)) {
            return Err(Error::config("medium.gamma21", "must be positive"));
        }
        if !finite(self.delta) {
            return Err(Error::config("medium.delta", "must be finite"));
        }
        if !(self.d > 0.0 && finite(self.d)) {
            return Err(Error::config("medium.d", "must be positive"));
        }
        if self.length != 1.0 {
            return Err(Error::config("medium.length", "the medium length is normalised to 1"));
        }
        Ok(())
    }

    /// γ31 + iδ, the complex decay of ρ31.
    #[inline]
    pub fn upper_decay(&self) -> Complex64 {
        Complex64::new(self.gamma31, self.delta)
    }
}

/// Y = γ21(γ31 + iδ) + |Ω_c|²/4.
#[inline]
pub fn y_factor(p: &MediumParams, control: Complex64) -> Complex64 {
    p.upper_decay() * p.gamma21 + control.norm_sqr() / 4.0
}

/// β = √(|Ω_c|² − (iδ + γ31 − γ21)²), principal branch.
///
/// Only even combinations (cos βx, sin(βx)/β) are physical, so the branch
/// never shows up in results.
#[inline]
pub fn beta_factor(p: &MediumParams, control: Complex64) -> Complex64 {
    let mismatch = Complex64::new(p.gamma31 - p.gamma21, p.delta);
    (control.norm_sqr() - mismatch * mismatch).sqrt()
}

/// Density-matrix coherences on the |3⟩–|1⟩ and |2⟩–|1⟩ transitions.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CoherencePair {
    pub rho31: Complex64,
    pub rho21: Complex64,
}

impl CoherencePair {
    pub fn new(rho31: Complex64, rho21: Complex64) -> Self {
        Self { rho31, rho21 }
    }

    fn as_pair(&self) -> Pair {
        [self.rho31, self.rho21]
    }
}

/// Steady state split into the linear (absorption/dispersion) parts and the
/// control-mediated mixing parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyDecomposition {
    /// iγ21(Ω_s + Ω_fs) / 2Y
    pub rho31_linear: Complex64,
    /// −Ω_c(Ω_p + Ω_fp) / 4Y
    pub rho31_mixing: Complex64,
    /// i(γ31 + iδ)(Ω_p + Ω_fp) / 2Y
    pub rho21_linear: Complex64,
    /// −Ω_c*(Ω_s + Ω_fs) / 4Y
    pub rho21_mixing: Complex64,
}

impl SteadyDecomposition {
    pub fn total(&self) -> CoherencePair {
        CoherencePair {
            rho31: self.rho31_linear + self.rho31_mixing,
            rho21: self.rho21_linear + self.rho21_mixing,
        }
    }
}

/// Closed-form fixed point, decomposed by order in the control field.
///
/// `probe_p_total` is Ω_p + Ω_fp, `probe_s_total` is Ω_s + Ω_fs.
pub fn steady_decomposition(
    p: &MediumParams,
    control: Complex64,
    probe_p_total: Complex64,
    probe_s_total: Complex64,
) -> Result<SteadyDecomposition> {
    let y = y_factor(p, control);
    if y == Complex64::new(0.0, 0.0) {
        return Err(Error::DegenerateMedium);
    }
    Ok(SteadyDecomposition {
        rho31_linear: I * probe_s_total * p.gamma21 / (2.0 * y),
        rho31_mixing: -(control * probe_p_total) / (4.0 * y),
        rho21_linear: I * p.upper_decay() * probe_p_total / (2.0 * y),
        rho21_mixing: -(control.conj() * probe_s_total) / (4.0 * y),
    })
}

/// Exact steady state of the coherence equations.
pub fn steady_coherences(
    p: &MediumParams,
    control: Complex64,
    probe_p_total: Complex64,
    probe_s_total: Complex64,
) -> Result<CoherencePair> {
    steady_decomposition(p, control, probe_p_total, probe_s_total).map(|d| d.total())
}

/// Right-hand sides of the coherence equations at `state`.
pub fn coherence_rates(
    p: &MediumParams,
    control: Complex64,
    probe_p_total: Complex64,
    probe_s_total: Complex64,
    state: &CoherencePair,
) -> CoherencePair {
    let half_i = I * 0.5;
    CoherencePair {
        rho31: -p.upper_decay() * state.rho31 + half_i * probe_s_total + half_i * control * state.rho21,
        rho21: -state.rho21 * p.gamma21 + half_i * probe_p_total + half_i * control.conj() * state.rho31,
    }
}

/// Relative residual of the coherence equations at `state`: the size of each
/// right-hand side divided by the sum of the magnitudes of its terms.
pub fn steady_residual(
    p: &MediumParams,
    control: Complex64,
    probe_p_total: Complex64,
    probe_s_total: Complex64,
    state: &CoherencePair,
) -> f64 {
    let r = coherence_rates(p, control, probe_p_total, probe_s_total, state);
    let scale31 =
        (p.upper_decay() * state.rho31).norm() + 0.5 * probe_s_total.norm() + 0.5 * (control * state.rho21).norm();
    let scale21 =
        (state.rho21 * p.gamma21).norm() + 0.5 * probe_p_total.norm() + 0.5 * (control.conj() * state.rho31).norm();
    let rel = |v: f64, s: f64| if s == 0.0 { v } else { v / s };
    rel(r.rho31.norm(), scale31).max(rel(r.rho21.norm(), scale21))
}

/// RK4 time evolution of the coherences under constant drives.
#[allow(clippy::too_many_arguments)]
pub fn evolve_coherences(
    p: &MediumParams,
    control: Complex64,
    probe_p_total: Complex64,
    probe_s_total: Complex64,
    initial: CoherencePair,
    t_end: f64,
    dt: f64,
) -> Result<CoherencePair> {
    if !(dt > 0.0) || !(t_end >= 0.0) {
        return Err(Error::StepSize { dt, product: f64::NAN });
    }
    let rate = p
        .gamma31
        .abs()
        .max(p.gamma21.abs())
        .max(p.delta.abs())
        .max(control.norm());
    let product = dt * rate;
    if product > 0.1 {
        return Err(Error::StepSize { dt, product });
    }
    let steps = (t_end / dt).round() as usize;
    let h = if steps == 0 { 0.0 } else { t_end / steps as f64 };
    let rhs = |y: &Pair| {
        let r = coherence_rates(
            p,
            control,
            probe_p_total,
            probe_s_total,
            &CoherencePair::new(y[0], y[1]),
        );
        [r.rho31, r.rho21]
    };
    let end = ode::rk4_integrate(rhs, initial.as_pair(), h, steps);
    Ok(CoherencePair::new(end[0], end[1]))
}
