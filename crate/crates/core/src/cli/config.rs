use std::fmt;
use std::path::Path;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::analysis::DEFAULT_AZIMUTHAL_SAMPLES;
use crate::beams::{Grid2D, LGBeamSpec};
use crate::error::{Error, Result};
use crate::medium::MediumParams;
use crate::propagation::Scene;
use crate::render::ImageSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    pub extent: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n: 256, extent: 3.0 }
    }
}

/// Products a run can write.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Product {
    Fields,
    Images,
    Profiles,
    Metrics,
}

impl Product {
    pub const ALL: [Product; 4] = [Product::Fields, Product::Images, Product::Profiles, Product::Metrics];
}

/// Ring used for profiles and phase measurements: the field's own intensity
/// ring, or a fixed radius in waist units.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum RadiusChoice {
    #[default]
    Auto,
    Fixed(f64),
}

impl fmt::Display for RadiusChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadiusChoice::Auto => f.write_str("auto"),
            RadiusChoice::Fixed(r) => write!(f, "{r}"),
        }
    }
}

impl std::str::FromStr for RadiusChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(RadiusChoice::Auto);
        }
        s.parse::<f64>()
            .map(RadiusChoice::Fixed)
            .map_err(|_| format!("expected \"auto\" or a radius, got {s:?}"))
    }
}

impl Serialize for RadiusChoice {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            RadiusChoice::Auto => s.serialize_str("auto"),
            RadiusChoice::Fixed(r) => s.serialize_f64(*r),
        }
    }
}

impl<'de> Deserialize<'de> for RadiusChoice {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::String(s) if s == "auto" => Ok(RadiusChoice::Auto),
            serde_json::Value::Number(n) => n
                .as_f64()
                .map(RadiusChoice::Fixed)
                .ok_or_else(|| de::Error::custom("radius must be a finite number")),
            other => Err(de::Error::custom(format!("expected \"auto\" or a number, got {other}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    #[serde(default)]
    pub radius: RadiusChoice,
    #[serde(default = "default_m")]
    pub m: usize,
}

fn default_m() -> usize {
    DEFAULT_AZIMUTHAL_SAMPLES
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            radius: RadiusChoice::Auto,
            m: DEFAULT_AZIMUTHAL_SAMPLES,
        }
    }
}

/// One simulation run, as read from a JSON document. Rates are in units of γ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub medium: MediumParams,
    pub control: LGBeamSpec,
    pub probe_p: LGBeamSpec,
    pub probe_s: LGBeamSpec,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default = "all_products")]
    pub outputs: Vec<Product>,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub image: ImageSpec,
}

fn all_products() -> Vec<Product> {
    Product::ALL.to_vec()
}

impl Default for RunConfig {
    /// Canonical parameters: Ω_c = 4γ, δ = 0, γ31 = γ, γ21 = 0.05γ,
    /// Ω_p0 = Ω_s0 = 0.1γ21, d = 100, with l_c = 1 and untwisted probes.
    fn default() -> Self {
        let medium = MediumParams::default();
        let probe = LGBeamSpec::new(0.1 * medium.gamma21, 0, 1.0);
        Self {
            medium,
            control: LGBeamSpec::new(4.0, 1, 1.0),
            probe_p: probe,
            probe_s: probe,
            grid: GridConfig::default(),
            outputs: all_products(),
            analysis: AnalysisConfig::default(),
            image: ImageSpec::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::config("config", e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| crate::Error::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn scene(&self) -> Scene {
        Scene {
            medium: self.medium,
            control: self.control,
            probe_p: self.probe_p,
            probe_s: self.probe_s,
        }
    }

    pub fn max_charge(&self) -> u32 {
        self.scene().max_charge()
    }

    pub fn wants(&self, product: Product) -> bool {
        self.outputs.contains(&product)
    }

    /// Checks every invariant and returns the grid plus any model-validity
    /// warnings.
    pub fn validate(&self) -> Result<(Grid2D, Vec<String>)> {
        self.medium.validate()?;
        self.control.validate("control")?;
        self.probe_p.validate("probe_p")?;
        self.probe_s.validate("probe_s")?;
        let grid = Grid2D::new(self.grid.n, self.grid.extent)?;
        let l_max = self.max_charge();
        grid.check_charge_resolution(l_max)?;
        let min_m = 16 * (l_max as usize + 1);
        if self.analysis.m < min_m {
            return Err(Error::config(
                "analysis.m",
                format!(
                    "{} azimuthal samples cannot resolve charge {l_max}; need at least {min_m}",
                    self.analysis.m
                ),
            ));
        }
        if let RadiusChoice::Fixed(r) = self.analysis.radius {
            if !(r >= 0.0 && r <= self.grid.extent) {
                return Err(Error::config(
                    "analysis.radius",
                    format!("{r} lies outside the grid half-width {}", self.grid.extent),
                ));
            }
        }
        self.image.validate()?;

        let mut warnings = Vec::new();
        let limit = 0.5 * self.medium.gamma21.min(self.medium.gamma31);
        for (name, beam) in [("probe_p", &self.probe_p), ("probe_s", &self.probe_s)] {
            if beam.epsilon > limit {
                warnings.push(format!(
                    "{name}.epsilon = {} exceeds 0.5·min(γ21, γ31) = {limit}; the weak-probe model may not hold",
                    beam.epsilon
                ));
            }
        }
        Ok((grid, warnings))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_canonical() {
        let c = RunConfig::default();
        assert_eq!(c.control.epsilon, 4.0);
        assert!((c.probe_p.epsilon - 0.005).abs() < 1e-18);
        assert_eq!(c.medium.d, 100.0);
        let (grid, warnings) = c.validate().unwrap();
        assert_eq!(grid.n(), 256);
        assert!(warnings.is_empty());
    }

    #[test]
    fn json_round_trip() {
        let mut c = RunConfig::default();
        c.analysis.radius = RadiusChoice::Fixed(0.75);
        c.outputs = vec![Product::Metrics];
        let back = RunConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn minimal_json_fills_defaults() {
        let text = r#"{
            "medium": {"gamma31": 1, "gamma21": 0.05, "delta": 0, "d": 100},
            "control": {"epsilon": 4, "tc": 2, "waist": 1},
            "probe_p": {"epsilon": 0.005, "tc": 0, "waist": 1},
            "probe_s": {"epsilon": 0.005, "tc": 0, "waist": 1}
        }"#;
        let c = RunConfig::from_json(text).unwrap();
        assert_eq!(c.grid, GridConfig::default());
        assert_eq!(c.analysis.radius, RadiusChoice::Auto);
        assert_eq!(c.outputs, Product::ALL.to_vec());
        assert_eq!(c.medium.length, 1.0);
    }

    #[test]
    fn field_level_errors() {
        let mut c = RunConfig::default();
        c.grid.n = 1;
        assert!(c.validate().unwrap_err().to_string().contains("grid.n"));

        let mut c = RunConfig::default();
        c.control.tc = 40;
        assert!(c.validate().unwrap_err().to_string().contains("grid.n"));

        let mut c = RunConfig::default();
        c.medium.gamma21 = 0.0;
        assert!(c.validate().unwrap_err().to_string().contains("medium.gamma21"));

        let mut c = RunConfig::default();
        c.probe_s.waist = -1.0;
        assert!(c.validate().unwrap_err().to_string().contains("probe_s.waist"));

        let mut c = RunConfig::default();
        c.analysis.radius = RadiusChoice::Fixed(5.0);
        assert!(c.validate().unwrap_err().to_string().contains("analysis.radius"));

        let mut c = RunConfig::default();
        c.analysis.m = 20;
        assert!(c.validate().unwrap_err().to_string().contains("analysis.m"));

        assert!(RunConfig::from_json("{\"medium\": 3}").is_err());
        assert!(RunConfig::from_json(&RunConfig::default().to_json().replace("\"grid\"", "\"grdi\"")).is_err());
    }

    #[test]
    fn strong_probe_warns() {
        let mut c = RunConfig::default();
        c.probe_p.epsilon = 0.03;
        let (_, warnings) = c.validate().unwrap();
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("probe_p"));
    }

    #[test]
    fn radius_choice_parsing() {
        assert_eq!("auto".parse::<RadiusChoice>().unwrap(), RadiusChoice::Auto);
        assert_eq!("0.5".parse::<RadiusChoice>().unwrap(), RadiusChoice::Fixed(0.5));
        assert!("near".parse::<RadiusChoice>().is_err());
    }
}
