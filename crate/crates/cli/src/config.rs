//! Scenario file loading.
//!
//! The scenario file is JSON with strict key checking: unknown keys are
//! rejected naming the offending key, and every omitted key falls back to
//! the default scenario (20 m footprint and subarea, 2 km link at 1550 nm,
//! 1e-6 outage target). Units at this boundary are the convenient ones —
//! nm, mm, degrees — and convert to SI on the way in.

use serde::Deserialize;

use fsoplan::camera::{
    classify_resolution, pix_per_meter_to_pix_per_foot, CameraSpec, ImageRequirement,
};
use fsoplan::linkbudget::ChannelParams;
use fsoplan::optimizer::Scenario;
use fsoplan::turbulence::TurbulenceProfile;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioFile {
    pub wavelength_nm: f64,
    pub link_length_m: f64,
    pub rytov_constant: f64,
    pub outage_target: f64,
    pub ground_cn2: f64,
    /// Optional overrides for the remaining turbulence coefficients.
    pub turbulence: Option<TurbulenceOverrides>,
    pub camera: CameraFile,
    pub resolution_pix_per_m: f64,
    pub hsl_m: f64,
}

impl Default for ScenarioFile {
    fn default() -> Self {
        ScenarioFile {
            wavelength_nm: 1550.0,
            link_length_m: 2000.0,
            rytov_constant: 1.23,
            outage_target: 1e-6,
            ground_cn2: 1e-14,
            turbulence: None,
            camera: CameraFile::default(),
            resolution_pix_per_m: 100.0,
            hsl_m: 20.0,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TurbulenceOverrides {
    pub high_alt_coeff: Option<f64>,
    pub mid_alt_coeff: Option<f64>,
    pub high_scale_m: Option<f64>,
    pub mid_scale_m: Option<f64>,
    pub ground_scale_m: Option<f64>,
    pub alt_prefactor: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CameraFile {
    pub horizontal_pixels: u32,
    pub sensor_width_mm: f64,
    pub focal_min_mm: f64,
    pub focal_max_mm: f64,
    pub fov_min_deg: f64,
    pub fov_max_deg: f64,
}

impl Default for CameraFile {
    fn default() -> Self {
        CameraFile {
            horizontal_pixels: 2000,
            sensor_width_mm: 18.0,
            focal_min_mm: 10.0,
            focal_max_mm: 180.0,
            fov_min_deg: 5.0,
            fov_max_deg: 120.0,
        }
    }
}

impl ScenarioFile {
    /// Converts units and assembles a validated [`Scenario`].
    pub fn to_scenario(&self) -> Result<Scenario, String> {
        let mut profile = TurbulenceProfile {
            ground_cn2: self.ground_cn2,
            ..TurbulenceProfile::default()
        };
        if let Some(t) = &self.turbulence {
            if let Some(v) = t.high_alt_coeff {
                profile.high_alt_coeff = v;
            }
            if let Some(v) = t.mid_alt_coeff {
                profile.mid_alt_coeff = v;
            }
            if let Some(v) = t.high_scale_m {
                profile.high_scale = v;
            }
            if let Some(v) = t.mid_scale_m {
                profile.mid_scale = v;
            }
            if let Some(v) = t.ground_scale_m {
                profile.ground_scale = v;
            }
            if let Some(v) = t.alt_prefactor {
                profile.alt_prefactor = v;
            }
        }

        let required_class = classify_resolution(
            pix_per_meter_to_pix_per_foot(self.resolution_pix_per_m)
                .map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())?
        .class;

        let scenario = Scenario {
            channel: ChannelParams {
                // divide by the exact power of ten: correctly rounded, so
                // defaults reproduce the SI literals bit for bit
                wavelength: self.wavelength_nm / 1e9,
                link_length: self.link_length_m,
                rytov_constant: self.rytov_constant,
                outage_target: self.outage_target,
            },
            profile,
            camera: CameraSpec {
                horizontal_pixels: self.camera.horizontal_pixels,
                sensor_width: self.camera.sensor_width_mm / 1e3,
                focal_min: self.camera.focal_min_mm / 1e3,
                focal_max: self.camera.focal_max_mm / 1e3,
                fov_min: self.camera.fov_min_deg.to_radians(),
                fov_max: self.camera.fov_max_deg.to_radians(),
            },
            requirement: ImageRequirement {
                resolution: self.resolution_pix_per_m,
                required_class,
            },
            hsl: self.hsl_m,
        };
        scenario.validate().map_err(|e| e.to_string())?;
        Ok(scenario)
    }
}
