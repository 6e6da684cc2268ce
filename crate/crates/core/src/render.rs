//! Byte-deterministic serialisation of fields and profiles: binary PGM
//! intensity maps, binary PPM hue-wheel phase maps, and CSV dumps.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::AzimuthalProfile;
use crate::beams::{ComplexField, Grid2D};
use crate::error::{Error, Result};

/// Phase-map pixels dimmer than this fraction of the field maximum are black.
pub const PHASE_MASK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode", content = "value")]
pub enum Normalization {
    PerImageMax,
    FixedScale(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImageSpec {
    pub normalization: Normalization,
    pub gamma: f64,
}

impl Default for ImageSpec {
    fn default() -> Self {
        Self {
            normalization: Normalization::PerImageMax,
            gamma: 1.0,
        }
    }
}

impl ImageSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::config("image.gamma", "must be positive"));
        }
        if let Normalization::FixedScale(v) = self.normalization {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config("image.normalization", "fixed scale must be positive"));
            }
        }
        Ok(())
    }
}

/// 8-bit quantisation with round-half-up.
#[inline]
fn quantize(v: f64) -> u8 {
    (255.0 * v + 0.5).floor().clamp(0.0, 255.0) as u8
}

/// Visits pixels top row first (largest y), left to right.
fn raster_order(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).rev().flat_map(move |j| (0..n).map(move |i| (i, j)))
}

/// Encodes |field|² as a binary greyscale PGM.
pub fn encode_intensity_pgm(field: &ComplexField, spec: &ImageSpec) -> Result<Vec<u8>> {
    spec.validate()?;
    let n = field.grid().n();
    let reference = match spec.normalization {
        Normalization::PerImageMax => field.values().iter().fold(0.0f64, |m, v| m.max(v.norm_sqr())),
        Normalization::FixedScale(v) => v,
    };
    let mut out = format!("P5\n{n} {n}\n255\n").into_bytes();
    out.extend(raster_order(n).map(|(i, j)| {
        if reference == 0.0 {
            0
        } else {
            quantize((field.get(i, j).norm_sqr() / reference).powf(spec.gamma))
        }
    }));
    Ok(out)
}

pub fn write_intensity_pgm(field: &ComplexField, spec: &ImageSpec, path: &Path) -> Result<()> {
    fs::write(path, encode_intensity_pgm(field, spec)?)?;
    Ok(())
}

/// Fully saturated, full-brightness colour for `hue` in [0, 1].
pub fn hue_to_rgb(hue: f64) -> [u8; 3] {
    let h6 = (hue * 6.0).rem_euclid(6.0);
    let sector = (h6.floor() as usize).min(5);
    let f = h6 - sector as f64;
    let (r, g, b) = match sector {
        0 => (1.0, f, 0.0),
        1 => (1.0 - f, 1.0, 0.0),
        2 => (0.0, 1.0, f),
        3 => (0.0, 1.0 - f, 1.0),
        4 => (f, 0.0, 1.0),
        _ => (1.0, 0.0, 1.0 - f),
    };
    [quantize(r), quantize(g), quantize(b)]
}

/// Hue for a complex value: arg −π maps to 0, arg 0 to 0.5.
#[inline]
pub fn phase_hue(v: Complex64) -> f64 {
    (v.arg() + PI) / TAU
}

/// Encodes arg(field) as a binary PPM on the hue wheel.
pub fn encode_phase_ppm(field: &ComplexField) -> Vec<u8> {
    let n = field.grid().n();
    let floor = PHASE_MASK * field.max_norm();
    let mut out = format!("P6\n{n} {n}\n255\n").into_bytes();
    for (i, j) in raster_order(n) {
        let v = field.get(i, j);
        if v.norm() < floor || v.norm() == 0.0 {
            out.extend([0, 0, 0]);
        } else {
            out.extend(hue_to_rgb(phase_hue(v)));
        }
    }
    out
}

pub fn write_phase_ppm(field: &ComplexField, path: &Path) -> Result<()> {
    fs::write(path, encode_phase_ppm(field))?;
    Ok(())
}

/// `x,y,re,im` rows in row-major order. Numbers use the shortest decimal
/// form that parses back to the same double (at most 17 significant digits).
pub fn encode_field_csv(field: &ComplexField) -> String {
    let mut s = String::with_capacity(48 * field.grid().len() + 16);
    s.push_str("x,y,re,im\n");
    for (k, v) in field.values().iter().enumerate() {
        let (x, y) = field.grid().coords(k);
        let _ = writeln!(s, "{x},{y},{},{}", v.re, v.im);
    }
    s
}

pub fn write_field_csv(field: &ComplexField, path: &Path) -> Result<()> {
    fs::write(path, encode_field_csv(field))?;
    Ok(())
}

/// Parses the output of [`encode_field_csv`].
pub fn decode_field_csv(text: &str, origin: &Path) -> Result<ComplexField> {
    let bad = |message: String| Error::MalformedFile {
        path: origin.to_path_buf(),
        message,
    };
    let mut lines = text.lines();
    if lines.next() != Some("x,y,re,im") {
        return Err(bad("missing header x,y,re,im".into()));
    }
    let mut coords = Vec::new();
    let mut values = Vec::new();
    for (row, line) in lines.enumerate() {
        let cols: Vec<f64> = line
            .split(',')
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| bad(format!("row {}: {e}", row + 2)))?;
        if cols.len() != 4 {
            return Err(bad(format!("row {}: expected 4 columns, got {}", row + 2, cols.len())));
        }
        coords.push((cols[0], cols[1]));
        values.push(Complex64::new(cols[2], cols[3]));
    }
    let n = (values.len() as f64).sqrt().round() as usize;
    if n == 0 || n * n != values.len() {
        return Err(bad(format!("{} rows do not form a square grid", values.len())));
    }
    let grid = if n == 1 {
        Grid2D::point()
    } else {
        Grid2D::new(n, coords[n - 1].0).map_err(|e| bad(e.to_string()))?
    };
    for (k, &(x, y)) in coords.iter().enumerate() {
        if grid.coords(k) != (x, y) {
            return Err(bad(format!(
                "row {}: coordinates ({x}, {y}) off the uniform grid",
                k + 2
            )));
        }
    }
    ComplexField::new(grid, values)
}

pub fn read_field_csv(path: &Path) -> Result<ComplexField> {
    let text = fs::read_to_string(path).map_err(|source| crate::Error::Read {
        path: path.to_path_buf(),
        source,
    })?;
    decode_field_csv(&text, path)
}

/// `theta,intensity` rows.
pub fn encode_profile_csv(profile: &AzimuthalProfile) -> String {
    let mut s = String::from("theta,intensity\n");
    for (t, v) in profile.thetas.iter().zip(&profile.intensities) {
        let _ = writeln!(s, "{t},{v}");
    }
    s
}

pub fn write_profile_csv(profile: &AzimuthalProfile, path: &Path) -> Result<()> {
    fs::write(path, encode_profile_csv(profile))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beams::make_grid;
    use proptest::prelude::*;

    fn two_by_two(intensities: [f64; 4]) -> ComplexField {
        let g = make_grid(2, 1.0).unwrap();
        ComplexField::new(g, intensities.iter().map(|v| Complex64::new(v.sqrt(), 0.0)).collect()).unwrap()
    }

    fn pixels(bytes: &[u8], header: &str) -> Vec<u8> {
        assert!(bytes.starts_with(header.as_bytes()));
        bytes[header.len()..].to_vec()
    }

    #[test]
    fn pgm_quantisation() {
        // Values listed in raster order: top row (y = +1) first.
        let f = two_by_two([0.5, 0.25, 0.0, 1.0]);
        let bytes = encode_intensity_pgm(&f, &ImageSpec::default()).unwrap();
        assert_eq!(pixels(&bytes, "P5\n2 2\n255\n"), vec![0, 255, 128, 64]);
    }

    #[test]
    fn pgm_fixed_scale_and_gamma() {
        let f = two_by_two([0.5, 0.25, 0.0, 1.0]);
        let spec = ImageSpec {
            normalization: Normalization::FixedScale(2.0),
            gamma: 0.5,
        };
        let bytes = encode_intensity_pgm(&f, &spec).unwrap();
        let expected: Vec<u8> = [0.0, 1.0, 0.5, 0.25]
            .iter()
            .map(|v: &f64| quantize((v / 2.0).sqrt()))
            .collect();
        assert_eq!(pixels(&bytes, "P5\n2 2\n255\n"), expected);
        let bad = ImageSpec {
            normalization: Normalization::FixedScale(0.0),
            gamma: 1.0,
        };
        assert!(encode_intensity_pgm(&f, &bad).is_err());
    }

    #[test]
    fn zero_field_is_black() {
        let f = ComplexField::zeros(&make_grid(4, 1.0).unwrap());
        let bytes = encode_intensity_pgm(&f, &ImageSpec::default()).unwrap();
        assert!(pixels(&bytes, "P5\n4 4\n255\n").iter().all(|&p| p == 0));
        let bytes = encode_phase_ppm(&f);
        assert!(pixels(&bytes, "P6\n4 4\n255\n").iter().all(|&p| p == 0));
    }

    #[test]
    fn constant_positive_field_is_cyan() {
        let f = ComplexField::from_fn(&make_grid(3, 1.0).unwrap(), |_, _| Complex64::new(2.0, 0.0));
        let px = pixels(&encode_phase_ppm(&f), "P6\n3 3\n255\n");
        assert_eq!(px.len(), 27);
        for rgb in px.chunks(3) {
            assert_eq!(rgb, hue_to_rgb(0.5));
            assert_eq!(rgb, [0, 255, 255]);
        }
    }

    #[test]
    fn hue_wheel_corners() {
        assert_eq!(hue_to_rgb(0.0), [255, 0, 0]);
        assert_eq!(hue_to_rgb(1.0 / 6.0), [255, 255, 0]);
        assert_eq!(hue_to_rgb(1.0 / 3.0), [0, 255, 0]);
        assert_eq!(hue_to_rgb(2.0 / 3.0), [0, 0, 255]);
        assert_eq!(hue_to_rgb(1.0), [255, 0, 0]);
    }

    #[test]
    fn vortex_phase_map_winds_once() {
        let g = make_grid(64, 1.0).unwrap();
        let f = ComplexField::from_fn(&g, |x, y| Complex64::new(x, y));
        let px = pixels(&encode_phase_ppm(&f), "P6\n64 64\n255\n");
        // Walk a square loop around the centre and count hue sector changes.
        let hue_at = |i: usize, j: usize| phase_hue(f.get(i, j));
        let mut path = Vec::new();
        for i in 8..56 {
            path.push((i, 8));
        }
        for j in 8..56 {
            path.push((56, j));
        }
        for i in (9..=56).rev() {
            path.push((i, 56));
        }
        for j in (9..=56).rev() {
            path.push((8, j));
        }
        let mut turns = 0.0;
        for w in 0..path.len() {
            let (a, b) = (path[w], path[(w + 1) % path.len()]);
            turns += crate::analysis::wrap_pi(TAU * (hue_at(b.0, b.1) - hue_at(a.0, a.1)));
        }
        assert!((turns / TAU - 1.0).abs() < 1e-9);
        assert_eq!(px.len(), 64 * 64 * 3);
    }

    #[test]
    fn single_pixel_csv() {
        let f = ComplexField::new(Grid2D::point(), vec![Complex64::new(1.0, 2.0)]).unwrap();
        assert_eq!(encode_field_csv(&f), "x,y,re,im\n0,0,1,2\n");
        let back = decode_field_csv(&encode_field_csv(&f), Path::new("mem")).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn production_csv_line_count() {
        let f = ComplexField::zeros(&make_grid(256, 3.0).unwrap());
        assert_eq!(encode_field_csv(&f).lines().count(), 65537);
    }

    #[test]
    fn malformed_csv_is_rejected() {
        let p = Path::new("mem");
        assert!(decode_field_csv("a,b\n", p).is_err());
        assert!(decode_field_csv("x,y,re,im\n0,0,1\n", p).is_err());
        assert!(decode_field_csv("x,y,re,im\n0,0,1,2\n0,0,1,2\n", p).is_err());
        assert!(decode_field_csv("x,y,re,im\n0,0,x,2\n", p).is_err());
    }

    #[test]
    fn profile_csv_rows() {
        let prof = AzimuthalProfile::from_intensities(1.0, vec![1.0, 2.0, 3.0, 4.0]);
        let text = encode_profile_csv(&prof);
        assert!(text.starts_with("theta,intensity\n0,1\n"));
        assert_eq!(text.lines().count(), 5);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn csv_round_trip_is_bit_exact(n in 2usize..12, extent in 1e-3f64..1e3, seed in proptest::collection::vec(-1e6f64..1e6, 288)) {
            let g = make_grid(n, extent).unwrap();
            let values: Vec<Complex64> = (0..n * n).map(|k| Complex64::new(seed[2 * k] * 1e-7, seed[2 * k + 1] / 3.0)).collect();
            let f = ComplexField::new(g, values).unwrap();
            let back = decode_field_csv(&encode_field_csv(&f), Path::new("mem")).unwrap();
            prop_assert_eq!(back, f);
        }

        #[test]
        fn images_are_deterministic(n in 2usize..16, a in 0.1f64..10.0) {
            let g = make_grid(n, 2.0).unwrap();
            let f = ComplexField::from_fn(&g, |x, y| Complex64::new(a * x, y - x * y));
            prop_assert_eq!(encode_phase_ppm(&f), encode_phase_ppm(&f.clone()));
            let spec = ImageSpec::default();
            prop_assert_eq!(encode_intensity_pgm(&f, &spec).unwrap(), encode_intensity_pgm(&f, &spec).unwrap());
        }
    }
}
