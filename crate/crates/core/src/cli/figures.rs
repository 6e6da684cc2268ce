//! Parameter matrices for the figure presets.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use super::config::RunConfig;
use super::manifest::Manifest;
use super::run::{cell_label, run_cells, CellOutputs};
use crate::error::{Error, Result};
use crate::propagation::OutputKind;

/// Detuning sweep shared by the crescent figures, in units of γ.
pub const DELTA_SWEEP: [f64; 7] = [-9.0, -6.0, -3.0, 0.0, 3.0, 6.0, 9.0];
/// Control charges for the vortex-transfer figure.
pub const TRANSFER_CHARGES: [i32; 3] = [1, 2, 3];
/// Control charges for the petal figure.
pub const PETAL_CHARGES: [i32; 3] = [2, 3, 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    /// Ω_fp and Ω_fs for several l_c, untwisted probes.
    Fig3,
    /// Ω_d and Ω_u crescents versus δ, l_c = l_s = l_p = 1.
    Fig4,
    /// Azimuthal profiles of Ω_d and Ω_u versus δ.
    Fig5,
    /// Ω_d and Ω_u petals versus l_c, l_s = l_p = 1.
    Fig6,
}

impl FigureId {
    pub const ALL: [FigureId; 4] = [FigureId::Fig3, FigureId::Fig4, FigureId::Fig5, FigureId::Fig6];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
        }
    }

    /// Labelled configurations and the products each writes.
    pub(crate) fn cells(self) -> Vec<(String, RunConfig, CellOutputs)> {
        let base = RunConfig::default();
        let crescent = {
            let mut c = base.clone();
            c.control.tc = 1;
            c.probe_p.tc = 1;
            c.probe_s.tc = 1;
            c
        };
        let both = vec![OutputKind::D, OutputKind::U];
        match self {
            FigureId::Fig3 => TRANSFER_CHARGES
                .iter()
                .map(|&lc| {
                    let mut c = base.clone();
                    c.control.tc = lc;
                    let kinds = vec![OutputKind::Fp, OutputKind::Fs];
                    let wanted = CellOutputs {
                        images: kinds.clone(),
                        metrics: kinds,
                        ..Default::default()
                    };
                    (cell_label("lc", lc), c, wanted)
                })
                .collect(),
            FigureId::Fig4 | FigureId::Fig5 => DELTA_SWEEP
                .iter()
                .map(|&delta| {
                    let mut c = crescent.clone();
                    c.medium.delta = delta;
                    let wanted = if self == FigureId::Fig4 {
                        CellOutputs {
                            images: both.clone(),
                            metrics: both.clone(),
                            ..Default::default()
                        }
                    } else {
                        CellOutputs {
                            profiles: both.clone(),
                            metrics: both.clone(),
                            ..Default::default()
                        }
                    };
                    (cell_label("delta", delta), c, wanted)
                })
                .collect(),
            FigureId::Fig6 => PETAL_CHARGES
                .iter()
                .map(|&lc| {
                    let mut c = crescent.clone();
                    c.control.tc = lc;
                    let wanted = CellOutputs {
                        images: both.clone(),
                        metrics: both.clone(),
                        ..Default::default()
                    };
                    (cell_label("lc", lc), c, wanted)
                })
                .collect(),
        }
    }

    fn notes(self) -> Vec<String> {
        let mut notes = vec![
            "parameters: gamma31=1, gamma21=0.05, Omega_c=4, d=100, Omega_p0=Omega_s0=0.1*gamma21, waist=1".to_string(),
        ];
        match self {
            FigureId::Fig3 => notes.push(format!(
                "l_s=l_p=0; l_c values {TRANSFER_CHARGES:?} are a preset choice, the panel set is not listed in the source"
            )),
            FigureId::Fig4 | FigureId::Fig5 => notes.push(format!("l_c=l_s=l_p=1; delta values {DELTA_SWEEP:?}")),
            FigureId::Fig6 => notes.push(format!(
                "l_s=l_p=1, delta=0; l_c values {PETAL_CHARGES:?} are a preset choice, the panel set is not listed in the source"
            )),
        }
        notes
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::UnknownFigure(s.to_string()))
    }
}

/// Runs the preset matrix of one figure into `out_dir`.
pub fn reproduce_figure(id: FigureId, out_dir: &Path) -> Result<Manifest> {
    run_cells(&format!("figure {id}"), id.cells(), out_dir, id.notes())
}
