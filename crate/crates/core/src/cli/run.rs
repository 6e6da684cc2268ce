use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Product, RadiusChoice, RunConfig};
use super::manifest::{LabelledConfig, Manifest, OutputDir};
use crate::analysis::{
    azimuthal_profile, peak_angle, petal_count, ring_radius, winding_number_with, AzimuthalProfile, ModelSampler,
};
use crate::beams::{sample_lg, Grid2D};
use crate::error::{Error, Result};
use crate::propagation::{output_fields, OutputFields, OutputKind};
use crate::render::{encode_field_csv, encode_intensity_pgm, encode_phase_ppm, encode_profile_csv};

/// Observables of one output field on its analysis ring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldMetrics {
    pub cell: String,
    pub field: OutputKind,
    pub radius: Option<f64>,
    pub winding: Option<i32>,
    pub petals: Option<usize>,
    pub peak_angle: Option<f64>,
    pub peak_to_valley: Option<f64>,
    pub mean_intensity: Option<f64>,
    /// First analysis error hit, if any.
    pub note: Option<String>,
}

/// What a cell writes; each list names the fields to emit.
#[derive(Debug, Clone, Default)]
pub(crate) struct CellOutputs {
    pub fields: Vec<OutputKind>,
    pub images: Vec<OutputKind>,
    pub profiles: Vec<OutputKind>,
    pub metrics: Vec<OutputKind>,
}

impl CellOutputs {
    fn from_config(config: &RunConfig) -> Self {
        let pick = |p: Product| {
            if config.wants(p) {
                OutputKind::ALL.to_vec()
            } else {
                Vec::new()
            }
        };
        Self {
            fields: pick(Product::Fields),
            images: pick(Product::Images),
            profiles: pick(Product::Profiles),
            metrics: pick(Product::Metrics),
        }
    }
}

pub(crate) fn analysis_radius(config: &RunConfig, sampler: &ModelSampler) -> Result<f64> {
    match config.analysis.radius {
        RadiusChoice::Fixed(r) => Ok(r),
        RadiusChoice::Auto => ring_radius(sampler),
    }
}

pub(crate) fn field_profile(config: &RunConfig, grid: &Grid2D, kind: OutputKind) -> Result<AzimuthalProfile> {
    let sampler = ModelSampler::new(config.scene(), kind, grid.clone());
    let r = analysis_radius(config, &sampler)?;
    azimuthal_profile(&sampler, r, config.analysis.m)
}

/// Measures one output field with exact model sampling on its ring.
pub fn measure(config: &RunConfig, grid: &Grid2D, kind: OutputKind, cell: &str) -> FieldMetrics {
    let mut m = FieldMetrics {
        cell: cell.to_string(),
        field: kind,
        radius: None,
        winding: None,
        petals: None,
        peak_angle: None,
        peak_to_valley: None,
        mean_intensity: None,
        note: None,
    };
    let sampler = ModelSampler::new(config.scene(), kind, grid.clone());
    let radius = match analysis_radius(config, &sampler) {
        Ok(r) => r,
        Err(e) => {
            m.note = Some(e.to_string());
            return m;
        }
    };
    m.radius = Some(radius);
    let mut notes: Vec<String> = Vec::new();
    let mut note = |e: Error| notes.push(e.to_string());
    match winding_number_with(&sampler, radius, config.analysis.m) {
        Ok(w) => m.winding = Some(w),
        Err(e) => note(e),
    }
    match azimuthal_profile(&sampler, radius, config.analysis.m) {
        Ok(profile) => {
            m.petals = Some(petal_count(&profile));
            m.peak_to_valley = Some(profile.peak_to_valley());
            m.mean_intensity = Some(profile.mean());
            match peak_angle(&profile) {
                Ok(a) => m.peak_angle = Some(a),
                Err(e) => note(e),
            }
        }
        Err(e) => note(e),
    }
    m.note = notes.into_iter().next();
    m
}

fn opt<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map(|v| v.to_string()).unwrap_or_default()
}

pub fn encode_metrics_csv(rows: &[FieldMetrics]) -> String {
    let mut s = String::from("cell,field,radius,winding,petals,peak_angle,peak_to_valley,mean_intensity,note\n");
    for r in rows {
        let note = r.note.as_deref().unwrap_or("").replace([',', '\n'], ";");
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.cell,
            r.field,
            opt(&r.radius),
            opt(&r.winding),
            opt(&r.petals),
            opt(&r.peak_angle),
            opt(&r.peak_to_valley),
            opt(&r.mean_intensity),
            note
        );
    }
    s
}

fn join(prefix: &str, name: &str) -> String {
    if prefix.is_empty() {
        name.to_string()
    } else {
        format!("{prefix}/{name}")
    }
}

/// Computes one configuration and writes the requested products under
/// `prefix`. Returns the metrics rows and the config's warnings.
pub(crate) fn run_cell(
    config: &RunConfig,
    dir: &mut OutputDir,
    prefix: &str,
    cell: &str,
    wanted: &CellOutputs,
) -> Result<(Vec<FieldMetrics>, Vec<String>)> {
    let (grid, warnings) = config.validate()?;
    for w in &warnings {
        log::warn!("{cell}: {w}");
    }
    let needs_grid = !(wanted.fields.is_empty() && wanted.images.is_empty());
    let fields: Option<OutputFields> = if needs_grid {
        let control = sample_lg(&config.control, &grid);
        let probe_p = sample_lg(&config.probe_p, &grid);
        let probe_s = sample_lg(&config.probe_s, &grid);
        Some(output_fields(&config.medium, &control, &probe_p, &probe_s)?)
    } else {
        None
    };
    if let Some(out) = &fields {
        for &kind in &wanted.fields {
            dir.write(
                &join(prefix, &format!("field_{kind}.csv")),
                encode_field_csv(out.get(kind)).as_bytes(),
            )?;
        }
        for &kind in &wanted.images {
            let field = out.get(kind);
            dir.write(
                &join(prefix, &format!("intensity_{kind}.pgm")),
                &encode_intensity_pgm(field, &config.image)?,
            )?;
            dir.write(&join(prefix, &format!("phase_{kind}.ppm")), &encode_phase_ppm(field))?;
        }
    }
    let profiles: Vec<(OutputKind, Result<AzimuthalProfile>)> = wanted
        .profiles
        .par_iter()
        .map(|&kind| (kind, field_profile(config, &grid, kind)))
        .collect();
    for (kind, profile) in profiles {
        match profile {
            Ok(p) => dir.write(
                &join(prefix, &format!("profile_{kind}.csv")),
                encode_profile_csv(&p).as_bytes(),
            )?,
            Err(e) => log::warn!("{cell}: no profile for {kind}: {e}"),
        }
    }
    let metrics: Vec<FieldMetrics> = wanted
        .metrics
        .par_iter()
        .map(|&k| measure(config, &grid, k, cell))
        .collect();
    if !metrics.is_empty() {
        dir.write(&join(prefix, "metrics.csv"), encode_metrics_csv(&metrics).as_bytes())?;
    }
    Ok((metrics, warnings))
}

/// `fields`: one run of a configuration into `out_dir`.
pub fn run_config(config: &RunConfig, out_dir: &Path) -> Result<Manifest> {
    config.validate()?;
    let mut dir = OutputDir::create(out_dir)?;
    let wanted = CellOutputs::from_config(config);
    let (_, warnings) = run_cell(config, &mut dir, "", "run", &wanted)?;
    dir.finish(
        "fields",
        vec![LabelledConfig {
            label: "run".into(),
            config: config.clone(),
        }],
        vec![
            "fp and s are read at the z=0 face, fs and p at the z=L face; d at z=0, u at z=L".into(),
            "metrics and profiles sample the model exactly on the analysis ring".into(),
        ],
        warnings,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// Common detuning δ.
    Delta,
    /// Control topological charge l_c.
    Lc,
    /// Control amplitude ε_c.
    Amp,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Delta => "delta",
            SweepParam::Lc => "lc",
            SweepParam::Amp => "amp",
        }
    }

    pub fn apply(self, base: &RunConfig, value: f64) -> Result<RunConfig> {
        let mut c = base.clone();
        match self {
            SweepParam::Delta => c.medium.delta = value,
            SweepParam::Amp => c.control.epsilon = value,
            SweepParam::Lc => {
                if value.fract() != 0.0 || value.abs() > i32::MAX as f64 {
                    return Err(Error::config(
                        "sweep.values",
                        format!("l_c must be an integer, got {value}"),
                    ));
                }
                c.control.tc = value as i32;
            }
        }
        Ok(c)
    }
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "delta" => Ok(SweepParam::Delta),
            "lc" => Ok(SweepParam::Lc),
            "amp" => Ok(SweepParam::Amp),
            _ => Err(format!("unknown sweep parameter {s:?}; expected delta, lc or amp")),
        }
    }
}

pub(crate) fn cell_label(name: &str, value: impl std::fmt::Display) -> String {
    format!("{name}_{value}")
}

/// Runs a set of labelled cells into one directory with a shared metrics
/// table and manifest.
pub(crate) fn run_cells(
    command: &str,
    cells: Vec<(String, RunConfig, CellOutputs)>,
    out_dir: &Path,
    notes: Vec<String>,
) -> Result<Manifest> {
    for (_, c, _) in &cells {
        c.validate()?;
    }
    let mut dir = OutputDir::create(out_dir)?;
    let mut all_metrics = Vec::new();
    let mut all_warnings = Vec::new();
    let mut configs = Vec::new();
    for (label, config, wanted) in cells {
        let (metrics, warnings) = run_cell(&config, &mut dir, &label, &label, &wanted)?;
        all_metrics.extend(metrics);
        all_warnings.extend(warnings.into_iter().map(|w| format!("{label}: {w}")));
        configs.push(LabelledConfig { label, config });
    }
    if !all_metrics.is_empty() {
        dir.write("metrics.csv", encode_metrics_csv(&all_metrics).as_bytes())?;
    }
    dir.finish(command, configs, notes, all_warnings)
}

/// `sweep`: one cell per value of `param`.
pub fn sweep(param: SweepParam, values: &[f64], base: &RunConfig, out_dir: &Path) -> Result<Manifest> {
    if values.is_empty() {
        return Err(Error::config("sweep.values", "at least one value is required"));
    }
    let cells = values
        .iter()
        .map(|&v| {
            let c = param.apply(base, v)?;
            let wanted = CellOutputs::from_config(&c);
            Ok((cell_label(param.name(), v), c, wanted))
        })
        .collect::<Result<Vec<_>>>()?;
    run_cells(&format!("sweep {}", param.name()), cells, out_dir, Vec::new())
}

/// `profile`: azimuthal intensity of one output field.
pub fn profile(config: &RunConfig, kind: OutputKind, radius: RadiusChoice, out_dir: &Path) -> Result<Manifest> {
    let mut config = config.clone();
    config.analysis.radius = radius;
    let (grid, warnings) = config.validate()?;
    let p = field_profile(&config, &grid, kind)?;
    let mut dir = OutputDir::create(out_dir)?;
    dir.write(&format!("profile_{kind}.csv"), encode_profile_csv(&p).as_bytes())?;
    dir.finish(
        format!("profile {kind}"),
        vec![LabelledConfig {
            label: "profile".into(),
            config,
        }],
        vec![format!("{} sampled on the ring r = {}", kind.label(), p.radius)],
        warnings,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_param_application() {
        let base = RunConfig::default();
        assert_eq!(SweepParam::Delta.apply(&base, 3.0).unwrap().medium.delta, 3.0);
        assert_eq!(SweepParam::Lc.apply(&base, -2.0).unwrap().control.tc, -2);
        assert_eq!(SweepParam::Amp.apply(&base, 6.5).unwrap().control.epsilon, 6.5);
        assert!(SweepParam::Lc.apply(&base, 1.5).is_err());
        assert!("gamma".parse::<SweepParam>().is_err());
    }

    #[test]
    fn metrics_csv_leaves_missing_values_empty() {
        let row = FieldMetrics {
            cell: "c".into(),
            field: OutputKind::D,
            radius: Some(0.5),
            winding: None,
            petals: Some(0),
            peak_angle: None,
            peak_to_valley: Some(0.0),
            mean_intensity: Some(1.0),
            note: Some("a, b".into()),
        };
        let text = encode_metrics_csv(&[row]);
        assert_eq!(text.lines().nth(1).unwrap(), "c,d,0.5,,0,,0,1,a; b");
    }

    #[test]
    fn fig3_cell_measures_transferred_charge() {
        let mut c = RunConfig::default();
        c.control.tc = 2;
        c.grid.n = 64;
        let grid = c.validate().unwrap().0;
        assert_eq!(measure(&c, &grid, OutputKind::Fs, "x").winding, Some(2));
        assert_eq!(measure(&c, &grid, OutputKind::Fp, "x").winding, Some(-2));
    }
}
