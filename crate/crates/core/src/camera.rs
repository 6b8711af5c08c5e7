//! Drone-camera viewing geometry.
//!
//! A nadir-pointing camera with full horizontal field of view `fov` flying at
//! altitude `A` images a ground swath of width `2·A·tan(fov/2)`. Requiring a
//! ground sampling density of `resolution` pixels per meter from a sensor
//! with `pixels` horizontal pixels fixes the swath at `pixels / resolution`,
//! so the altitude follows from the field of view alone:
//!
//! ```text
//! A = half_swath / tan(fov/2),   half_swath = pixels / (2·resolution)
//! ```
//!
//! The camera-object distance equals the altitude for nadir pointing, so the
//! optical channel length along the vertical and the imaging distance are one
//! and the same quantity. Angles are radians everywhere; degrees only exist
//! at the CLI boundary.

use serde::Serialize;

use crate::error::{require, Result};

/// `0.3048` m per foot, for the pixels-per-foot classification table.
const METERS_PER_FOOT: f64 = 0.3048;

/// Physical camera description.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraSpec {
    /// Horizontal pixel count of the sensor.
    pub horizontal_pixels: u32,
    /// Physical sensor width, meters.
    pub sensor_width: f64,
    /// Shortest focal length, meters.
    pub focal_min: f64,
    /// Longest focal length, meters.
    pub focal_max: f64,
    /// Declared lower field-of-view bound, radians.
    pub fov_min: f64,
    /// Declared upper field-of-view bound, radians.
    pub fov_max: f64,
}

impl Default for CameraSpec {
    /// 2000 px, 18 mm sensor, 10–180 mm zoom, declared FOV 5°–120°.
    fn default() -> Self {
        CameraSpec {
            horizontal_pixels: 2000,
            sensor_width: 0.018,
            focal_min: 0.010,
            focal_max: 0.180,
            fov_min: 5f64.to_radians(),
            fov_max: 120f64.to_radians(),
        }
    }
}

impl CameraSpec {
    pub fn validate(&self) -> Result<()> {
        require(
            "horizontal_pixels",
            "positive",
            self.horizontal_pixels as f64,
            self.horizontal_pixels > 0,
        )?;
        require(
            "sensor_width",
            "finite and positive",
            self.sensor_width,
            self.sensor_width > 0.0,
        )?;
        require(
            "focal_min",
            "finite and positive",
            self.focal_min,
            self.focal_min > 0.0,
        )?;
        require(
            "focal_max",
            "finite and at least focal_min",
            self.focal_max,
            self.focal_max >= self.focal_min,
        )?;
        require(
            "fov_min",
            "in (0, pi)",
            self.fov_min,
            self.fov_min > 0.0 && self.fov_min < std::f64::consts::PI,
        )?;
        require(
            "fov_max",
            "in (fov_min, pi)",
            self.fov_max,
            self.fov_max > self.fov_min && self.fov_max < std::f64::consts::PI,
        )?;
        Ok(())
    }
}

/// What the captured imagery must achieve.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageRequirement {
    /// Required ground sampling density, pixels per meter.
    pub resolution: f64,
    /// Imagery class the density supports.
    pub required_class: ResolutionClass,
}

impl Default for ImageRequirement {
    /// 100 pixels per meter, which lands in the recognition class.
    fn default() -> Self {
        ImageRequirement {
            resolution: 100.0,
            required_class: ResolutionClass::Recognition,
        }
    }
}

impl ImageRequirement {
    pub fn validate(&self) -> Result<()> {
        require(
            "resolution",
            "finite and positive",
            self.resolution,
            self.resolution > 0.0,
        )
    }
}

/// Imagery classes by ground sampling density (pixels per foot):
/// observation/detection up to 30, recognition up to 120, identification up
/// to 150.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ResolutionClass {
    ObservationDetection,
    Recognition,
    Identification,
}

/// A density's class, plus whether it exceeded the table's top bracket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResolutionClassification {
    pub class: ResolutionClass,
    /// True when the density is above 150 px/ft: better than the strongest
    /// listed class rather than a failure.
    pub beyond_table: bool,
}

/// The fully resolved viewing geometry for one field-of-view choice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ViewGeometry {
    /// Field of view, radians.
    pub fov: f64,
    /// Flight altitude (equals camera-object distance), meters.
    pub altitude: f64,
    /// Ground footprint width, meters; depends only on pixels/resolution.
    pub swath: f64,
    /// Half the swath, `pixels / (2·resolution)`, meters.
    pub half_swath: f64,
}

impl ViewGeometry {
    /// Resolves the geometry for a half-swath and field of view.
    pub fn new(half_swath: f64, fov: f64) -> Result<Self> {
        let altitude = altitude_from_fov(half_swath, fov)?;
        Ok(ViewGeometry {
            fov,
            altitude,
            swath: 2.0 * half_swath,
            half_swath,
        })
    }
}

/// Full horizontal field of view of a pinhole camera:
/// `2·atan(sensor_width / (2·focal_length))`, radians in `(0, π)`.
pub fn fov_from_focal(sensor_width: f64, focal_length: f64) -> Result<f64> {
    require(
        "sensor_width",
        "finite and positive",
        sensor_width,
        sensor_width > 0.0,
    )?;
    require(
        "focal_length",
        "finite and positive",
        focal_length,
        focal_length > 0.0,
    )?;
    Ok(2.0 * (sensor_width / (2.0 * focal_length)).atan())
}

/// Ground footprint width `pixels / resolution`, meters.
pub fn swath_width(pixels: u32, resolution: f64) -> Result<f64> {
    require("pixels", "positive", pixels as f64, pixels > 0)?;
    require(
        "resolution",
        "finite and positive",
        resolution,
        resolution > 0.0,
    )?;
    Ok(pixels as f64 / resolution)
}

/// Altitude that images exactly the required footprint at the given field of
/// view: `half_swath / tan(fov/2)`. Strictly decreasing in `fov`.
pub fn altitude_from_fov(half_swath: f64, fov: f64) -> Result<f64> {
    require(
        "half_swath",
        "finite and positive",
        half_swath,
        half_swath > 0.0,
    )?;
    require(
        "fov",
        "in (0, pi)",
        fov,
        fov > 0.0 && fov < std::f64::consts::PI,
    )?;
    Ok(half_swath / (0.5 * fov).tan())
}

/// Field of view that images the required footprint from the given altitude:
/// `2·atan(half_swath / altitude)`. Inverse of [`altitude_from_fov`].
pub fn fov_from_altitude(half_swath: f64, altitude: f64) -> Result<f64> {
    require(
        "half_swath",
        "finite and positive",
        half_swath,
        half_swath > 0.0,
    )?;
    require(
        "altitude",
        "finite and positive",
        altitude,
        altitude > 0.0,
    )?;
    Ok(2.0 * (half_swath / altitude).atan())
}

/// Classifies an image's ground sampling density (pixels per foot).
///
/// Boundaries use closed upper intervals; densities above 150 still classify
/// as identification but carry the `beyond_table` flag.
pub fn classify_resolution(density_pix_per_ft: f64) -> Result<ResolutionClassification> {
    require(
        "density",
        "finite and non-negative",
        density_pix_per_ft,
        density_pix_per_ft >= 0.0,
    )?;
    let (class, beyond_table) = if density_pix_per_ft <= 30.0 {
        (ResolutionClass::ObservationDetection, false)
    } else if density_pix_per_ft <= 120.0 {
        (ResolutionClass::Recognition, false)
    } else if density_pix_per_ft <= 150.0 {
        (ResolutionClass::Identification, false)
    } else {
        (ResolutionClass::Identification, true)
    };
    Ok(ResolutionClassification { class, beyond_table })
}

/// Converts pixels per meter to pixels per foot (multiply by 0.3048).
pub fn pix_per_meter_to_pix_per_foot(v: f64) -> Result<f64> {
    require("density", "finite and non-negative", v, v >= 0.0)?;
    Ok(v * METERS_PER_FOOT)
}
