//! Oracle suites: the closed forms checked against independent numerics and
//! against the structural identities they must satisfy.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::beams::{Grid2D, LGBeamSpec};
use crate::error::Result;
use crate::medium::{
    beta_factor, evolve_coherences, steady_coherences, steady_residual, y_factor, CoherencePair, MediumParams,
};
use crate::propagation::{
    compose_pixel, integrate_channel_numeric, solve_channel_p, solve_channel_s, Channel, ChannelKernel, ChannelState,
    Scene,
};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub const EQUIVALENCE_TOL: f64 = 1e-7;
pub const RESIDUAL_TOL: f64 = 1e-12;
pub const CONVERGENCE_TOL: f64 = 1e-8;
pub const BRANCH_TOL: f64 = 1e-12;
pub const LOSSLESS_TOL: f64 = 1e-10;
pub const LINEARITY_TOL: f64 = 1e-12;
pub const DECOUPLED_TOL: f64 = 1e-12;
pub const ANTI_PHASE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Fast,
    Full,
}

impl Level {
    pub fn grid_n(self) -> usize {
        match self {
            Level::Fast => 64,
            Level::Full => 256,
        }
    }

    pub fn steps(self) -> usize {
        match self {
            Level::Fast => 1_000,
            Level::Full => 10_000,
        }
    }

    pub fn draws(self) -> usize {
        match self {
            Level::Fast => 50,
            Level::Full => 200,
        }
    }

    pub fn steady_draws(self) -> usize {
        match self {
            Level::Fast => 20,
            Level::Full => 100,
        }
    }
}

impl FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fast" => Ok(Level::Fast),
            "full" => Ok(Level::Full),
            _ => Err(format!("unknown level {s:?}; expected fast or full")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub cases: usize,
}

impl SuiteResult {
    fn new(name: &str, errors: impl IntoIterator<Item = f64>, tolerance: f64) -> Self {
        let (max_error, cases) = errors.into_iter().fold((0.0f64, 0), |(m, n), e| {
            // NaN must fail the suite.
            (if e.is_nan() || m.is_nan() { f64::NAN } else { m.max(e) }, n + 1)
        });
        Self {
            name: name.to_string(),
            max_error,
            tolerance,
            cases,
        }
    }

    fn failed(name: &str, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            max_error: f64::INFINITY,
            tolerance,
            cases: 0,
        }
    }

    pub fn passed(&self) -> bool {
        self.max_error <= self.tolerance
    }
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub level: Level,
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for r in &self.suites {
            let _ = writeln!(
                s,
                "{:<4} {:<28} max error {:<12.3e} tol {:.0e} ({} cases)",
                if r.passed() { "ok" } else { "FAIL" },
                r.name,
                r.max_error,
                r.tolerance,
                r.cases
            );
        }
        let _ = writeln!(
            s,
            "{}",
            if self.passed() {
                "all suites passed"
            } else {
                "verification FAILED"
            }
        );
        s
    }
}

/// Closed-form channel solver signature; swapped out by mutation checks.
pub type ChannelSolver = dyn Fn(&MediumParams, Complex64, Complex64, Channel, f64) -> Result<ChannelState> + Sync;

pub fn analytic_solver(
    p: &MediumParams,
    control: Complex64,
    boundary: Complex64,
    channel: Channel,
    z: f64,
) -> Result<ChannelState> {
    match channel {
        Channel::S => solve_channel_s(p, control, boundary, z),
        Channel::P => solve_channel_p(p, control, boundary, z),
    }
}

/// Distance between two channel states relative to the boundary amplitude
/// that drives them (the propagator is linear in it).
pub fn propagator_error(a: &ChannelState, b: &ChannelState, boundary: Complex64) -> f64 {
    let diff = (a.primary - b.primary).norm().max((a.generated - b.generated).norm());
    if boundary == ZERO {
        diff
    } else {
        diff / boundary.norm()
    }
}

/// RK4 steps that keep h·ρ ≤ 0.1 for the channel matrix's spectral bound ρ.
pub fn stable_steps(p: &MediumParams, control: Complex64, minimum: usize) -> usize {
    let y = y_factor(p, control);
    let kappa = p.d / (8.0 * y.norm() * p.length);
    let rho = kappa * (2.0 * p.gamma21.abs().max(p.upper_decay().norm()) + control.norm());
    minimum.max((10.0 * rho * p.length).ceil() as usize)
}

/// Fig.-3-parameter scene used by the grid suites: l_c = 1 control, untwisted probes.
pub fn reference_scene() -> Scene {
    let medium = MediumParams::default();
    let probe = LGBeamSpec::new(0.1 * medium.gamma21, 0, 1.0);
    Scene {
        medium,
        control: LGBeamSpec::new(4.0, 1, 1.0),
        probe_p: probe,
        probe_s: probe,
    }
}

/// Per-pixel analytic-vs-RK4 comparison of both channels over a grid.
pub fn channel_equivalence_grid(solver: &ChannelSolver, scene: &Scene, grid: &Grid2D, steps: usize) -> SuiteResult {
    let name = "channel equivalence (grid)";
    let errors: Result<Vec<f64>> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let (x, y) = grid.coords(k);
            let p = &scene.medium;
            let ctl = scene.control.amplitude_at(x, y);
            let mut worst = 0.0f64;
            for (channel, beam) in [(Channel::S, &scene.probe_s), (Channel::P, &scene.probe_p)] {
                let b = beam.amplitude_at(x, y);
                let a = solver(p, ctl, b, channel, p.length)?;
                let n = integrate_channel_numeric(p, ctl, b, channel, steps)?;
                worst = worst.max(propagator_error(&a, &n, b));
            }
            Ok(worst)
        })
        .collect();
    match errors {
        Ok(e) => SuiteResult::new(name, e, EQUIVALENCE_TOL),
        Err(_) => SuiteResult::failed(name, EQUIVALENCE_TOL),
    }
}

/// A random medium and control amplitude from the oracle-equivalence ranges.
pub fn random_draw(rng: &mut impl Rng) -> (MediumParams, Complex64) {
    let p = MediumParams::new(
        1.0,
        rng.gen_range(0.01..=1.0),
        rng.gen_range(-9.0..=9.0),
        rng.gen_range(1.0..=200.0),
    );
    let control = Complex64::from_polar(rng.gen_range(0.0..=6.0), rng.gen_range(0.0..TAU));
    (p, control)
}

pub fn channel_equivalence_random(solver: &ChannelSolver, draws: usize, min_steps: usize, seed: u64) -> SuiteResult {
    let name = "channel equivalence (random)";
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases: Vec<_> = (0..draws).map(|_| random_draw(&mut rng)).collect();
    let errors: Result<Vec<f64>> = cases
        .par_iter()
        .map(|(p, ctl)| {
            let steps = stable_steps(p, *ctl, min_steps);
            let b = Complex64::new(1.0, 0.0);
            let mut worst = 0.0f64;
            for channel in [Channel::S, Channel::P] {
                let a = solver(p, *ctl, b, channel, p.length)?;
                let n = integrate_channel_numeric(p, *ctl, b, channel, steps)?;
                worst = worst.max(propagator_error(&a, &n, b));
            }
            Ok(worst)
        })
        .collect();
    match errors {
        Ok(e) => SuiteResult::new(name, e, EQUIVALENCE_TOL),
        Err(_) => SuiteResult::failed(name, EQUIVALENCE_TOL),
    }
}

/// Steady-state residuals and time-evolution convergence over random draws.
pub fn steady_state_suites(draws: usize, seed: u64) -> [SuiteResult; 2] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases: Vec<_> = (0..draws)
        .map(|_| {
            let (p, ctl) = random_draw(&mut rng);
            let pp = Complex64::new(rng.gen_range(-0.01..0.01), rng.gen_range(-0.01..0.01));
            let ps = Complex64::new(rng.gen_range(-0.01..0.01), rng.gen_range(-0.01..0.01));
            (p, ctl, pp, ps)
        })
        .collect();
    let results: Vec<Option<(f64, f64)>> = cases
        .par_iter()
        .map(|(p, ctl, pp, ps)| {
            let steady = steady_coherences(p, *ctl, *pp, *ps).ok()?;
            let residual = steady_residual(p, *ctl, *pp, *ps, &steady);
            let rate = p.gamma31.max(p.gamma21).max(p.delta.abs()).max(ctl.norm());
            let dt = 0.05 / rate;
            let t_end = 50.0 / p.gamma21;
            let end = evolve_coherences(p, *ctl, *pp, *ps, CoherencePair::default(), t_end, dt).ok()?;
            let gap = (end.rho31 - steady.rho31).norm().max((end.rho21 - steady.rho21).norm());
            Some((residual, gap))
        })
        .collect();
    let residuals = results.iter().map(|r| r.map_or(f64::INFINITY, |r| r.0));
    let gaps = results.iter().map(|r| r.map_or(f64::INFINITY, |r| r.1));
    [
        SuiteResult::new("steady-state residual", residuals, RESIDUAL_TOL),
        SuiteResult::new("time-evolution convergence", gaps, CONVERGENCE_TOL),
    ]
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    let d = (a - b).norm();
    if d == 0.0 {
        0.0
    } else {
        d / a.norm().max(b.norm())
    }
}

/// Channel solutions evaluated with +β and −β.
pub fn beta_branch_suite(draws: usize, seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let errors = (0..draws).map(|_| {
        let (p, ctl) = random_draw(&mut rng);
        let z = rng.gen_range(0.0..=1.0);
        let beta = beta_factor(&p, ctl);
        let plus = ChannelKernel::with_beta(&p, ctl, beta, z);
        let minus = ChannelKernel::with_beta(&p, ctl, -beta, z);
        let b = Complex64::new(1.0, 0.0);
        let (sp, sm) = (plus.s_channel(&p, ctl, b), minus.s_channel(&p, ctl, b));
        let (pp, pm) = (plus.p_channel(&p, ctl, b), minus.p_channel(&p, ctl, b));
        rel(sp.primary, sm.primary)
            .max(rel(sp.generated, sm.generated))
            .max(rel(pp.primary, pm.primary))
            .max(rel(pp.generated, pm.generated))
    });
    SuiteResult::new("beta-branch invariance", errors.collect::<Vec<_>>(), BRANCH_TOL)
}

/// With zero decays and δ = 0 each channel only exchanges power.
pub fn lossless_suite(solver: &ChannelSolver, draws: usize, seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut errors = Vec::with_capacity(draws);
    for _ in 0..draws {
        let p = MediumParams::new(0.0, 0.0, 0.0, rng.gen_range(1.0..=200.0));
        let ctl = Complex64::from_polar(rng.gen_range(0.5..=6.0), rng.gen_range(0.0..TAU));
        let b = Complex64::from_polar(rng.gen_range(0.1..=2.0), rng.gen_range(0.0..TAU));
        let mut worst = 0.0f64;
        for k in 0..=20 {
            let z = k as f64 / 20.0;
            for channel in [Channel::S, Channel::P] {
                let power = match solver(&p, ctl, b, channel, z) {
                    Ok(s) => s.primary.norm_sqr() + s.generated.norm_sqr(),
                    Err(_) => f64::INFINITY,
                };
                worst = worst.max((power - b.norm_sqr()).abs() / b.norm_sqr());
            }
        }
        errors.push(worst);
    }
    SuiteResult::new("lossless conservation", errors, LOSSLESS_TOL)
}

/// Scaling both probes by c scales Ω_d and Ω_u by c.
pub fn linearity_suite(draws: usize, seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut errors = Vec::with_capacity(draws);
    for _ in 0..draws {
        let (p, ctl) = random_draw(&mut rng);
        let p0 = Complex64::new(rng.gen_range(-0.01..0.01), rng.gen_range(-0.01..0.01));
        let s0 = Complex64::new(rng.gen_range(-0.01..0.01), rng.gen_range(-0.01..0.01));
        let c = Complex64::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let err = match (compose_pixel(&p, ctl, p0, s0), compose_pixel(&p, ctl, p0 * c, s0 * c)) {
            (Ok(a), Ok(b)) => rel(b.omega_d, a.omega_d * c).max(rel(b.omega_u, a.omega_u * c)),
            _ => f64::INFINITY,
        };
        errors.push(err);
    }
    SuiteResult::new("probe linearity", errors, LINEARITY_TOL)
}

/// Ω_c = 0 reduces each channel to a single exponential.
pub fn decoupled_suite(solver: &ChannelSolver, draws: usize, seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut errors = Vec::with_capacity(draws);
    for _ in 0..draws {
        let (p, _) = random_draw(&mut rng);
        let z = rng.gen_range(0.0..=1.0);
        let b = Complex64::new(1.0, 0.0);
        let s_expected = (-p.d * z / (4.0 * p.length * p.upper_decay())).exp();
        let p_expected = Complex64::new((-p.d * z / (4.0 * p.length * p.gamma21)).exp(), 0.0);
        let err = match (solver(&p, ZERO, b, Channel::S, z), solver(&p, ZERO, b, Channel::P, z)) {
            (Ok(s), Ok(pc)) => rel(s.primary, s_expected)
                .max(rel(pc.primary, p_expected))
                .max(s.generated.norm())
                .max(pc.generated.norm()),
            _ => f64::INFINITY,
        };
        errors.push(err);
    }
    SuiteResult::new("decoupled limits", errors, DECOUPLED_TOL)
}

/// Crescent configuration: l_c = l_s = l_p = 1, equal probes.
pub fn crescent_scene(delta: f64) -> Scene {
    let medium = MediumParams {
        delta,
        ..MediumParams::default()
    };
    let probe = LGBeamSpec::new(0.1 * medium.gamma21, 1, 1.0);
    Scene {
        medium,
        control: LGBeamSpec::new(4.0, 1, 1.0),
        probe_p: probe,
        probe_s: probe,
    }
}

/// Largest relative azimuthal ripple of |Ω_d|² + |Ω_u|² over rings spanning
/// the grid.
pub fn total_intensity_ripple(scene: &Scene, max_radius: f64, rings: usize, m: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for i in 1..=rings {
        let r = max_radius * i as f64 / rings as f64;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for k in 0..m {
            let t = TAU * k as f64 / m as f64;
            let px = scene.at(r * t.cos(), r * t.sin())?;
            let total = px.omega_d.norm_sqr() + px.omega_u.norm_sqr();
            lo = lo.min(total);
            hi = hi.max(total);
        }
        if hi > 0.0 {
            worst = worst.max((hi - lo) / hi);
        }
    }
    Ok(worst)
}

/// δ = 0 crescents: the two interference terms cancel in |Ω_d|² + |Ω_u|².
pub fn anti_phase_suite() -> SuiteResult {
    let name = "delta=0 anti-phase identity";
    match total_intensity_ripple(&crescent_scene(0.0), 3.0, 60, 360) {
        Ok(r) => SuiteResult::new(name, [r], ANTI_PHASE_TOL),
        Err(_) => SuiteResult::failed(name, ANTI_PHASE_TOL),
    }
}

/// Composed δ = 0 crescent outputs on one ring, closed form against RK4.
pub fn crescent_cross_check(solver: &ChannelSolver, steps: usize) -> SuiteResult {
    let scene = crescent_scene(0.0);
    let p = scene.medium;
    let errors = (0..16).map(|k| {
        let t = TAU * k as f64 / 16.0;
        let (x, y) = (0.7 * t.cos(), 0.7 * t.sin());
        let ctl = scene.control.amplitude_at(x, y);
        let p0 = scene.probe_p.amplitude_at(x, y);
        let s0 = scene.probe_s.amplitude_at(x, y);
        let numeric = (
            integrate_channel_numeric(&p, ctl, s0, Channel::S, steps),
            integrate_channel_numeric(&p, ctl, p0, Channel::P, steps),
        );
        let analytic = (
            solver(&p, ctl, s0, Channel::S, p.length),
            solver(&p, ctl, p0, Channel::P, p.length),
        );
        match (numeric, analytic) {
            ((Ok(ns), Ok(np)), (Ok(a_s), Ok(a_p))) => {
                let d = ((p0 + ns.generated) - (p0 + a_s.generated)).norm() / p0.norm();
                let u = ((s0 + np.generated) - (s0 + a_p.generated)).norm() / s0.norm();
                d.max(u)
            }
            _ => f64::INFINITY,
        }
    });
    SuiteResult::new("crescent outputs vs RK4", errors.collect::<Vec<_>>(), EQUIVALENCE_TOL)
}

/// Runs every suite with the closed-form solver.
pub fn verify(level: Level) -> VerifyReport {
    verify_with(level, &analytic_solver)
}

/// Runs every suite with `solver` standing in for the closed forms.
pub fn verify_with(level: Level, solver: &ChannelSolver) -> VerifyReport {
    let grid = Grid2D::new(level.grid_n(), 3.0).expect("valid grid");
    let draws = level.draws();
    let [residual, convergence] = steady_state_suites(level.steady_draws(), 2);
    VerifyReport {
        level,
        suites: vec![
            channel_equivalence_grid(solver, &reference_scene(), &grid, level.steps()),
            channel_equivalence_random(solver, draws, level.steps(), 1),
            residual,
            convergence,
            beta_branch_suite(draws, 3),
            lossless_suite(solver, draws, 4),
            linearity_suite(draws, 5),
            decoupled_suite(solver, draws, 6),
            anti_phase_suite(),
            crescent_cross_check(solver, level.steps()),
        ],
    }
}
