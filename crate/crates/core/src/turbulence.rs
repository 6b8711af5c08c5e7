//! Altitude-dependent refractive index structure parameter `C_n²(A)`.
//!
//! The profile is a three-term model of turbulence strength versus altitude
//! `A` (meters):
//!
//! ```text
//! C_n²(A) = h · (p·A)¹⁰ · exp(-A/s_h)  +  m · exp(-A/s_m)  +  g · exp(-A/s_g)
//! ```
//!
//! with a high-altitude bump term, a mid-altitude exponential, and a ground
//! layer. All altitudes and decay scales are meter-denominated; there is no
//! implicit km conversion.
//!
//! The high-altitude term peaks at `A = 10·s_h`, so the profile is *not*
//! decreasing everywhere for every coefficient choice.
//! [`TurbulenceProfile::certify_monotone_decreasing`] checks strict decrease
//! over an operating interval numerically; the optimizer relies on that
//! certificate rather than assuming it.

use crate::error::{require, Result};

/// Coefficients and decay scales of the `C_n²(A)` altitude model.
#[derive(Debug, Clone, PartialEq)]
pub struct TurbulenceProfile {
    /// Scale factor of the high-altitude term, m^{-2/3}.
    pub high_alt_coeff: f64,
    /// Mid-altitude coefficient, m^{-2/3}.
    pub mid_alt_coeff: f64,
    /// Ground value `C_n²(0)` contribution, m^{-2/3}.
    pub ground_cn2: f64,
    /// e-folding scale of the high-altitude term, meters.
    pub high_scale: f64,
    /// e-folding scale of the mid-altitude term, meters.
    pub mid_scale: f64,
    /// e-folding scale of the ground layer, meters.
    pub ground_scale: f64,
    /// Multiplier applied to the altitude inside the tenth power, 1/m.
    pub alt_prefactor: f64,
}

impl Default for TurbulenceProfile {
    /// Default coefficients: `3.6e-3`, `2.7e-15` (sic — see the field docs),
    /// ground `1e-14`, scales 1000 / 1500 / 100 m, prefactor `1e-5`.
    ///
    /// The mid-altitude coefficient is an order of magnitude above the usual
    /// Hufnagel-Valley `2.7e-16`; both are expressible, this default is
    /// deliberate.
    fn default() -> Self {
        TurbulenceProfile {
            high_alt_coeff: 3.6e-3,
            mid_alt_coeff: 2.7e-15,
            ground_cn2: 1e-14,
            high_scale: 1000.0,
            mid_scale: 1500.0,
            ground_scale: 100.0,
            alt_prefactor: 1e-5,
        }
    }
}

/// Result of a monotonicity certification over an altitude interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotoneReport {
    /// True iff `C_n²` was strictly decreasing across the whole sampled grid.
    pub strictly_decreasing: bool,
    /// On failure, the highest grid altitude at which decrease-with-altitude
    /// breaks (the scan walks the interval from the top down).
    pub first_violation: Option<f64>,
}

impl TurbulenceProfile {
    /// Checks the profile invariants: finite non-negative coefficients and
    /// strictly positive scales.
    pub fn validate(&self) -> Result<()> {
        require(
            "high_alt_coeff",
            "finite and non-negative",
            self.high_alt_coeff,
            self.high_alt_coeff >= 0.0,
        )?;
        require(
            "mid_alt_coeff",
            "finite and non-negative",
            self.mid_alt_coeff,
            self.mid_alt_coeff >= 0.0,
        )?;
        require(
            "ground_cn2",
            "finite and non-negative",
            self.ground_cn2,
            self.ground_cn2 >= 0.0,
        )?;
        require(
            "high_scale",
            "finite and positive",
            self.high_scale,
            self.high_scale > 0.0,
        )?;
        require(
            "mid_scale",
            "finite and positive",
            self.mid_scale,
            self.mid_scale > 0.0,
        )?;
        require(
            "ground_scale",
            "finite and positive",
            self.ground_scale,
            self.ground_scale > 0.0,
        )?;
        require(
            "alt_prefactor",
            "finite and positive",
            self.alt_prefactor,
            self.alt_prefactor > 0.0,
        )?;
        Ok(())
    }

    /// Evaluates `C_n²` at `altitude` meters.
    ///
    /// Returns a finite non-negative value; strictly positive whenever any
    /// coefficient is positive.
    pub fn cn2_at_altitude(&self, altitude: f64) -> Result<f64> {
        self.validate()?;
        require("altitude", "finite and non-negative", altitude, altitude >= 0.0)?;
        let high = self.high_alt_coeff
            * (self.alt_prefactor * altitude).powi(10)
            * (-altitude / self.high_scale).exp();
        let mid = self.mid_alt_coeff * (-altitude / self.mid_scale).exp();
        let ground = self.ground_cn2 * (-altitude / self.ground_scale).exp();
        Ok(high + mid + ground)
    }

    /// Certifies that `C_n²` is strictly decreasing on `[alt_lo, alt_hi]`
    /// sampled at `step` meters.
    ///
    /// The scan starts at the top of the interval and walks down, because the
    /// optimizer prefers the highest altitude: the first break found this way
    /// is the boundary of the certified region below the preferred optimum.
    /// `alt_hi` is always included as a grid point.
    pub fn certify_monotone_decreasing(
        &self,
        alt_lo: f64,
        alt_hi: f64,
        step: f64,
    ) -> Result<MonotoneReport> {
        require("alt_lo", "finite and non-negative", alt_lo, alt_lo >= 0.0)?;
        require(
            "alt_hi",
            "finite and greater than alt_lo",
            alt_hi,
            alt_hi > alt_lo,
        )?;
        require("step", "finite and positive", step, step > 0.0)?;

        let mut grid = Vec::new();
        let mut k = 0u64;
        loop {
            let a = alt_lo + k as f64 * step;
            if a > alt_hi + step * 1e-9 {
                break;
            }
            grid.push(a.min(alt_hi));
            k += 1;
        }
        if *grid.last().expect("grid has the lower endpoint") < alt_hi {
            grid.push(alt_hi);
        }

        let values: Vec<f64> = grid
            .iter()
            .map(|&a| self.cn2_at_altitude(a))
            .collect::<Result<_>>()?;

        for i in (0..grid.len() - 1).rev() {
            if !(values[i] > values[i + 1]) {
                return Ok(MonotoneReport {
                    strictly_decreasing: false,
                    first_violation: Some(grid[i]),
                });
            }
        }
        Ok(MonotoneReport {
            strictly_decreasing: true,
            first_violation: None,
        })
    }
}

/// Simplified diagnostic form `delta1 · A · exp(-A / altitude_scale)`.
///
/// The bare `A·e^{-A}` shape needs a normalization scale to be usable with
/// meter-valued altitudes; `altitude_scale` supplies it. This is a diagnostic
/// only and never feeds the optimizer, which evaluates the full profile.
pub fn simplified_cn2(delta1: f64, altitude_scale: f64, altitude: f64) -> Result<f64> {
    require("delta1", "finite and positive", delta1, delta1 > 0.0)?;
    require(
        "altitude_scale",
        "finite and positive",
        altitude_scale,
        altitude_scale > 0.0,
    )?;
    require("altitude", "finite and non-negative", altitude, altitude >= 0.0)?;
    Ok(delta1 * altitude * (-altitude / altitude_scale).exp())
}
