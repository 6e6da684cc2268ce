//! Dual-channel optical-vortex transfer in a symmetry-broken ladder-type
//! three-level medium.
//!
//! A strong control field couples levels |2⟩ and |3⟩ while two weak probes
//! drive |1⟩→|2⟩ (Ω_p, entering at z = 0) and |1⟩→|3⟩ (Ω_s, entering at
//! z = L). Each probe seeds a three-wave-mixing process: the s-channel
//! generates the difference-frequency field Ω_fp, the p-channel the
//! sum-frequency field Ω_fs. The generated fields interfere with the
//! same-frequency probes to form the resultant outputs Ω_d (z = 0 face) and
//! Ω_u (z = L face).
//!
//! All rates and Rabi frequencies are in units of γ = γ31; transverse lengths
//! are in units of the beam waist.

pub mod analysis;
pub mod beams;
pub mod cli;
pub mod error;
pub mod medium;
pub mod ode;
pub mod propagation;
pub mod render;

pub use error::{Error, Result};
pub use num_complex::Complex64;
