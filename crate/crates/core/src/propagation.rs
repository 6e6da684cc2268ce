//! Channel propagation and the resultant output fields.
//!
//! Each transverse pixel propagates independently (diffraction is dropped).
//! The s-channel carries Ω_s, entering at the z = L face, and generates the
//! difference-frequency field Ω_fp; the p-channel carries Ω_p, entering at
//! z = 0, and generates the sum-frequency field Ω_fs. Distances below are
//! measured along each channel's own direction of travel.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beams::{ComplexField, LGBeamSpec};
use crate::error::{Error, Result};
use crate::medium::{beta_factor, y_factor, MediumParams};
use crate::ode;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Below this |βx| the ratio sin(βx)/β switches to its Taylor series.
pub const SINC_SERIES_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Channel {
    /// Ω_s → Ω_fp (difference frequency).
    S,
    /// Ω_p → Ω_fs (sum frequency).
    P,
}

/// Field pair of one channel after propagating a distance `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelState {
    /// Ω_s or Ω_p.
    pub primary: Complex64,
    /// Ω_fp or Ω_fs.
    pub generated: Complex64,
    pub z: f64,
}

/// The β-dependent factors shared by both channel solutions at one
/// propagation distance, with the common damping exp(−x(iδ + γ31 + γ21))
/// folded in.
#[derive(Debug, Clone, Copy)]
pub struct ChannelKernel {
    /// cos(βx)·damping
    pub cos: Complex64,
    /// sin(βx)/β·damping
    pub sinc: Complex64,
    pub z: f64,
    /// Eigenmode form, used when |Im βx| is large.
    modes: Option<Modes>,
}

/// exp(±iβx)·damping and iβ, with |Ω_c|² for cancellation-free weights.
#[derive(Debug, Clone, Copy)]
struct Modes {
    plus: Complex64,
    minus: Complex64,
    i_beta: Complex64,
    control_sq: f64,
}

impl Modes {
    /// (cos βx − m sin(βx)/β)·damping written as a mix of the two modes,
    /// w₊ = (iβ − m)/2iβ and w₋ = (iβ + m)/2iβ. Uses
    /// (iβ + m)(iβ − m) = −|Ω_c|² (since β² + m² = |Ω_c|²) to evaluate the
    /// smaller numerator without cancellation.
    fn primary(&self, m: Complex64) -> Complex64 {
        let (a, b) = (self.i_beta - m, self.i_beta + m);
        let (a, b) = if a.norm() < b.norm() {
            (-self.control_sq / b, b)
        } else {
            (a, -self.control_sq / a)
        };
        let denom = 2.0 * self.i_beta;
        self.plus * (a / denom) + self.minus * (b / denom)
    }
}

impl ChannelKernel {
    pub fn new(p: &MediumParams, control: Complex64, z: f64) -> Result<Self> {
        let y = y_factor(p, control);
        if y == ZERO {
            return Err(Error::DegenerateMedium);
        }
        Ok(Self::with_beta(p, control, beta_factor(p, control), z))
    }

    /// Same as [`ChannelKernel::new`] with β supplied by the caller, so that
    /// either root can be fed in.
    pub fn with_beta(p: &MediumParams, control: Complex64, beta: Complex64, z: f64) -> Self {
        let y = y_factor(p, control);
        let x = p.d * z / (8.0 * y * p.length);
        let bx = beta * x;
        let decay = x * Complex64::new(p.gamma31 + p.gamma21, p.delta);
        if bx.norm() < SINC_SERIES_THRESHOLD {
            let bx2 = bx * bx;
            let damp = (-decay).exp();
            return Self {
                cos: bx.cos() * damp,
                sinc: x * (1.0 - bx2 / 6.0 + bx2 * bx2 / 120.0) * damp,
                z,
                modes: None,
            };
        }
        if bx.im.abs() > 1.0 {
            // cos and sin grow like e^{|Im βx|} while the damping shrinks;
            // work with the two eigenmode exponentials instead.
            let plus = (I * bx - decay).exp();
            let minus = (-I * bx - decay).exp();
            let modes = Modes {
                plus,
                minus,
                i_beta: I * beta,
                control_sq: control.norm_sqr(),
            };
            return Self {
                cos: (plus + minus) * 0.5,
                sinc: (plus - minus) / (2.0 * I * beta),
                z,
                modes: Some(modes),
            };
        }
        let damp = (-decay).exp();
        Self {
            cos: bx.cos() * damp,
            sinc: bx.sin() / beta * damp,
            z,
            modes: None,
        }
    }

    fn primary(&self, mismatch: Complex64) -> Complex64 {
        match &self.modes {
            Some(m) => m.primary(mismatch),
            None => self.cos - mismatch * self.sinc,
        }
    }

    /// Ω_s(z), Ω_fp(z) from Ω_s at distance 0.
    pub fn s_channel(&self, p: &MediumParams, control: Complex64, s0: Complex64) -> ChannelState {
        let mismatch = Complex64::new(p.gamma21 - p.gamma31, -p.delta);
        ChannelState {
            primary: s0 * self.primary(mismatch),
            generated: -I * control.conj() * s0 * self.sinc,
            z: self.z,
        }
    }

    /// Ω_p(z), Ω_fs(z) from Ω_p at distance 0.
    pub fn p_channel(&self, p: &MediumParams, control: Complex64, p0: Complex64) -> ChannelState {
        let mismatch = Complex64::new(p.gamma31 - p.gamma21, p.delta);
        ChannelState {
            primary: p0 * self.primary(mismatch),
            generated: -I * control * p0 * self.sinc,
            z: self.z,
        }
    }
}

fn check_distance(p: &MediumParams, z: f64) -> Result<()> {
    if !(0.0..=p.length).contains(&z) {
        return Err(Error::config(
            "z",
            format!("propagation distance {z} outside [0, {}]", p.length),
        ));
    }
    Ok(())
}

/// Closed-form Ω_s and Ω_fp after distance `z` of the s-channel.
pub fn solve_channel_s(p: &MediumParams, control: Complex64, s0: Complex64, z: f64) -> Result<ChannelState> {
    check_distance(p, z)?;
    Ok(ChannelKernel::new(p, control, z)?.s_channel(p, control, s0))
}

/// Closed-form Ω_p and Ω_fs after distance `z` of the p-channel.
pub fn solve_channel_p(p: &MediumParams, control: Complex64, p0: Complex64, z: f64) -> Result<ChannelState> {
    check_distance(p, z)?;
    Ok(ChannelKernel::new(p, control, z)?.p_channel(p, control, p0))
}

/// Right-hand side of the propagation equations for one channel, with both
/// optical-depth prefactors equal to i·d/(2L).
pub fn channel_rhs(p: &MediumParams, control: Complex64, channel: Channel) -> Result<impl Fn(&ode::Pair) -> ode::Pair> {
    let y = y_factor(p, control);
    if y == ZERO {
        return Err(Error::DegenerateMedium);
    }
    let pre = I * p.d / (2.0 * p.length);
    let (own, other) = match channel {
        Channel::S => (p.gamma21.into(), p.upper_decay()),
        Channel::P => (p.upper_decay(), p.gamma21.into()),
    };
    let (to_first, to_second) = match channel {
        Channel::S => (control, control.conj()),
        Channel::P => (control.conj(), control),
    };
    // i² = −1 in the mixing terms.
    let m = [
        pre * I * own / (2.0 * y),
        -pre * to_first / (4.0 * y),
        -pre * to_second / (4.0 * y),
        pre * I * other / (2.0 * y),
    ];
    Ok(move |v: &ode::Pair| [m[0] * v[0] + m[1] * v[1], m[2] * v[0] + m[3] * v[1]])
}

/// RK4 integration of one channel from distance 0 to L.
pub fn integrate_channel_numeric(
    p: &MediumParams,
    control: Complex64,
    boundary: Complex64,
    channel: Channel,
    steps: usize,
) -> Result<ChannelState> {
    if steps < 100 {
        return Err(Error::StepCount(steps));
    }
    let rhs = channel_rhs(p, control, channel)?;
    let h = p.length / steps as f64;
    let end = ode::rk4_integrate(rhs, [boundary, ZERO], h, steps);
    Ok(ChannelState {
        primary: end[0],
        generated: end[1],
        z: p.length,
    })
}

/// Every field of interest at one pixel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelOutputs {
    pub control: Complex64,
    /// Ω_p entering at z = 0.
    pub p_in: Complex64,
    /// Ω_s entering at z = L.
    pub s_in: Complex64,
    /// Ω_s leaving at z = 0.
    pub s_out: Complex64,
    /// Ω_fp leaving at z = 0.
    pub fp_out: Complex64,
    /// Ω_p leaving at z = L.
    pub p_out: Complex64,
    /// Ω_fs leaving at z = L.
    pub fs_out: Complex64,
    /// Ω_d at z = 0: Ω_p(0) + Ω_fp(L).
    pub omega_d: Complex64,
    /// Ω_u at z = L: Ω_s(0) + Ω_fs(L).
    pub omega_u: Complex64,
}

/// Evaluates both channels across the full medium at one pixel.
pub fn compose_pixel(p: &MediumParams, control: Complex64, p0: Complex64, s0: Complex64) -> Result<PixelOutputs> {
    let kernel = ChannelKernel::new(p, control, p.length)?;
    let s = kernel.s_channel(p, control, s0);
    let pc = kernel.p_channel(p, control, p0);
    Ok(PixelOutputs {
        control,
        p_in: p0,
        s_in: s0,
        s_out: s.primary,
        fp_out: s.generated,
        p_out: pc.primary,
        fs_out: pc.generated,
        omega_d: p0 + s.generated,
        omega_u: s0 + pc.generated,
    })
}

/// Ω_d(z) = Ω_p(z) + Ω_fp(L − z) and Ω_u(z) = Ω_s(L − z) + Ω_fs(z) at an
/// interior position `z` measured from the left face.
pub fn resultant_at(
    p: &MediumParams,
    control: Complex64,
    p0: Complex64,
    s0: Complex64,
    z: f64,
) -> Result<(Complex64, Complex64)> {
    let pc = solve_channel_p(p, control, p0, z)?;
    let s = solve_channel_s(p, control, s0, p.length - z)?;
    Ok((pc.primary + s.generated, s.primary + pc.generated))
}

/// Selects one of the fields in [`PixelOutputs`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputKind {
    D,
    U,
    Fp,
    Fs,
    P,
    S,
}

impl OutputKind {
    pub const ALL: [OutputKind; 6] = [Self::D, Self::U, Self::Fp, Self::Fs, Self::P, Self::S];

    pub fn pick(self, px: &PixelOutputs) -> Complex64 {
        match self {
            Self::D => px.omega_d,
            Self::U => px.omega_u,
            Self::Fp => px.fp_out,
            Self::Fs => px.fs_out,
            Self::P => px.p_out,
            Self::S => px.s_out,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::D => "d",
            Self::U => "u",
            Self::Fp => "fp",
            Self::Fs => "fs",
            Self::P => "p",
            Self::S => "s",
        }
    }

    /// Short description including the face the field is read at.
    pub fn label(self) -> &'static str {
        match self {
            Self::D => "omega_d at z=0",
            Self::U => "omega_u at z=L",
            Self::Fp => "omega_fp at z=0",
            Self::Fs => "omega_fs at z=L",
            Self::P => "omega_p at z=L",
            Self::S => "omega_s at z=0",
        }
    }
}

impl fmt::Display for OutputKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OutputKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown field {s:?}; expected one of d, u, fp, fs, p, s"))
    }
}

/// Which face a set of constituent fields is read at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Face {
    /// z = 0: Ω_p enters, Ω_s and Ω_fp leave.
    Left,
    /// z = L: Ω_s enters, Ω_p and Ω_fs leave.
    Right,
}

/// Ω_s, Ω_fp, Ω_p, Ω_fs at one face.
#[derive(Debug, Clone)]
pub struct FaceFields {
    pub s: ComplexField,
    pub fp: ComplexField,
    pub p: ComplexField,
    pub fs: ComplexField,
}

/// Grid-sampled outputs of a full run.
#[derive(Debug, Clone)]
pub struct OutputFields {
    pub omega_d: ComplexField,
    pub omega_u: ComplexField,
    pub probe_p: ComplexField,
    pub probe_s: ComplexField,
    pub s_out: ComplexField,
    pub fp_out: ComplexField,
    pub p_out: ComplexField,
    pub fs_out: ComplexField,
}

impl OutputFields {
    pub fn get(&self, kind: OutputKind) -> &ComplexField {
        match kind {
            OutputKind::D => &self.omega_d,
            OutputKind::U => &self.omega_u,
            OutputKind::Fp => &self.fp_out,
            OutputKind::Fs => &self.fs_out,
            OutputKind::P => &self.p_out,
            OutputKind::S => &self.s_out,
        }
    }

    pub fn face(&self, face: Face) -> FaceFields {
        let zero = ComplexField::zeros(self.omega_d.grid());
        match face {
            Face::Left => FaceFields {
                s: self.s_out.clone(),
                fp: self.fp_out.clone(),
                p: self.probe_p.clone(),
                fs: zero,
            },
            Face::Right => FaceFields {
                s: self.probe_s.clone(),
                fp: zero,
                p: self.p_out.clone(),
                fs: self.fs_out.clone(),
            },
        }
    }
}

/// Propagates every pixel of the three input fields and composes Ω_d, Ω_u.
pub fn output_fields(
    p: &MediumParams,
    control_field: &ComplexField,
    probe_p: &ComplexField,
    probe_s: &ComplexField,
) -> Result<OutputFields> {
    let grid = control_field.grid();
    if probe_p.grid() != grid || probe_s.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let pixels: Vec<PixelOutputs> = (0..grid.len())
        .into_par_iter()
        .map(|k| compose_pixel(p, control_field.values()[k], probe_p.values()[k], probe_s.values()[k]))
        .collect::<Result<_>>()?;
    let field = |f: fn(&PixelOutputs) -> Complex64| {
        ComplexField::new(grid.clone(), pixels.iter().map(f).collect()).expect("grid sizes match")
    };
    Ok(OutputFields {
        omega_d: field(|px| px.omega_d),
        omega_u: field(|px| px.omega_u),
        probe_p: probe_p.clone(),
        probe_s: probe_s.clone(),
        s_out: field(|px| px.s_out),
        fp_out: field(|px| px.fp_out),
        p_out: field(|px| px.p_out),
        fs_out: field(|px| px.fs_out),
    })
}

/// Medium plus the three input beams; evaluates outputs at arbitrary
/// transverse points without going through a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scene {
    pub medium: MediumParams,
    pub control: LGBeamSpec,
    pub probe_p: LGBeamSpec,
    pub probe_s: LGBeamSpec,
}

impl Scene {
    pub fn at(&self, x: f64, y: f64) -> Result<PixelOutputs> {
        compose_pixel(
            &self.medium,
            self.control.amplitude_at(x, y),
            self.probe_p.amplitude_at(x, y),
            self.probe_s.amplitude_at(x, y),
        )
    }

    pub fn field(&self, kind: OutputKind, x: f64, y: f64) -> Result<Complex64> {
        self.at(x, y).map(|px| kind.pick(&px))
    }

    /// Largest |topological charge| among the inputs.
    pub fn max_charge(&self) -> u32 {
        [self.control.tc, self.probe_p.tc, self.probe_s.tc]
            .iter()
            .map(|l| l.unsigned_abs())
            .max()
            .unwrap_or(0)
    }
}
