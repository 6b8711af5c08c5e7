//! Turbulence-induced power margin for a target outage probability.
//!
//! The received intensity over the weak-turbulence channel is modelled as a
//! unit-mean lognormal with log-intensity variance `s = σ · C_n²`, where
//! `σ = K · (2π/λ)^{7/6} · L^{11/6}` collects the preselected channel
//! constants. The margin that keeps outage at or below `p0` is
//!
//! ```text
//! PM(s, p0) = exp( sqrt(-2·s·ln(2·p0)) + s/2 )
//! ```
//!
//! which is the inversion of the Chernoff bound `Q(x) ≤ ½·e^{-x²/2}` on the
//! lognormal tail. [`outage_from_margin`] is its exact algebraic inverse and
//! [`outage_exact_lognormal`] evaluates the true tail `Q(x)`; the pair brackets
//! the real outage, with the Chernoff side always conservative.
//!
//! Margins are power ratios; decibels are `10·log₁₀(linear)` throughout.

use std::f64::consts::{PI, SQRT_2};

use serde::Serialize;

use crate::error::{require, Result};

/// Floating-point slack when testing `ln(pm) ≥ s/2`: round-tripping the
/// boundary margin `e^{s/2}` through `exp`/`ln` may land a few ulps short.
const BOUNDARY_SLACK: f64 = 1e-9;

/// Optical channel constants feeding the margin model.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelParams {
    /// Carrier wavelength, meters.
    pub wavelength: f64,
    /// Link length, meters.
    pub link_length: f64,
    /// Dimensionless constant multiplying `(2π/λ)^{7/6} · L^{11/6}`; the
    /// plane-wave Rytov-variance constant 1.23 by default.
    pub rytov_constant: f64,
    /// Target outage probability, in `(0, 0.5]`.
    pub outage_target: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        ChannelParams {
            wavelength: 1550e-9,
            link_length: 2000.0,
            rytov_constant: 1.23,
            outage_target: 1e-6,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        require(
            "wavelength",
            "finite and positive",
            self.wavelength,
            self.wavelength > 0.0,
        )?;
        require(
            "link_length",
            "finite and positive",
            self.link_length,
            self.link_length > 0.0,
        )?;
        require(
            "rytov_constant",
            "finite and positive",
            self.rytov_constant,
            self.rytov_constant > 0.0,
        )?;
        require(
            "outage_target",
            "in (0, 0.5]",
            self.outage_target,
            self.outage_target > 0.0 && self.outage_target <= 0.5,
        )?;
        Ok(())
    }
}

/// A required power margin, as a linear ratio and in decibels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerMargin {
    /// Linear power ratio, ≥ 1.
    pub linear: f64,
    /// `10·log₁₀(linear)`, dB.
    pub decibels: f64,
}

impl PowerMargin {
    /// Builds a margin from a linear power ratio.
    pub fn from_linear(linear: f64) -> Result<Self> {
        Ok(PowerMargin {
            linear,
            decibels: to_decibels(linear)?,
        })
    }
}

/// `σ = K · (2π/λ)^{7/6} · L^{11/6}`, in m^{2/3} so that `σ·C_n²` is
/// dimensionless.
///
/// `K = 0` is admitted here (yielding a vacuum channel) even though
/// [`ChannelParams::validate`] demands a positive constant.
pub fn sigma_factor(params: &ChannelParams) -> Result<f64> {
    require(
        "wavelength",
        "finite and positive",
        params.wavelength,
        params.wavelength > 0.0,
    )?;
    require(
        "link_length",
        "finite and positive",
        params.link_length,
        params.link_length > 0.0,
    )?;
    require(
        "rytov_constant",
        "finite and non-negative",
        params.rytov_constant,
        params.rytov_constant >= 0.0,
    )?;
    Ok(params.rytov_constant
        * (2.0 * PI / params.wavelength).powf(7.0 / 6.0)
        * params.link_length.powf(11.0 / 6.0))
}

/// Log-intensity variance `s = σ · C_n²` of the lognormal channel.
pub fn log_intensity_variance(sigma: f64, cn2: f64) -> Result<f64> {
    require("sigma", "finite and non-negative", sigma, sigma >= 0.0)?;
    require("cn2", "finite and non-negative", cn2, cn2 >= 0.0)?;
    let s = sigma * cn2;
    require("sigma*cn2", "finite", s, true)?;
    Ok(s)
}

/// Margin required to hold outage at `p0` over a channel with log-intensity
/// variance `s`.
///
/// `p0` must lie in `(0, 0.5]`: beyond 0.5 the radicand `-2·s·ln(2·p0)` turns
/// negative. The result is ≥ 1, with equality iff `s = 0`.
pub fn power_margin(s: f64, p0: f64) -> Result<PowerMargin> {
    require("s", "finite and non-negative", s, s >= 0.0)?;
    require(
        "p0",
        "in (0, 0.5] so the radicand -2*s*ln(2*p0) is non-negative",
        p0,
        p0 > 0.0 && p0 <= 0.5,
    )?;
    let radicand = -2.0 * s * (2.0 * p0).ln();
    // ln(2*p0) <= 0 on the admitted range; clamp the -0.0 at p0 = 0.5.
    let linear = (radicand.max(0.0).sqrt() + 0.5 * s).exp();
    PowerMargin::from_linear(linear)
}

/// Shifted log-margin `ln(pm) - s/2`, validating the boundary `pm ≥ e^{s/2}`.
fn excess_log_margin(s: f64, pm_linear: f64) -> Result<f64> {
    require("s", "finite and positive", s, s > 0.0)?;
    require(
        "pm_linear",
        "at least e^{s/2}, the deterministic minimum margin",
        pm_linear,
        pm_linear > 0.0 && pm_linear.ln() >= 0.5 * s - BOUNDARY_SLACK,
    )?;
    Ok((pm_linear.ln() - 0.5 * s).max(0.0))
}

/// Outage probability implied by a margin under the Chernoff-style tail
/// model; exact algebraic inverse of [`power_margin`].
pub fn outage_from_margin(s: f64, pm_linear: f64) -> Result<f64> {
    let d = excess_log_margin(s, pm_linear)?;
    Ok(0.5 * (-(d * d) / (2.0 * s)).exp())
}

/// Exact outage of the unit-mean lognormal channel: `Q((ln pm - s/2)/√s)`.
///
/// Never exceeds [`outage_from_margin`] for the same inputs, by the Chernoff
/// bound `Q(x) ≤ ½·e^{-x²/2}` for `x ≥ 0`.
pub fn outage_exact_lognormal(s: f64, pm_linear: f64) -> Result<f64> {
    let d = excess_log_margin(s, pm_linear)?;
    Ok(q_function(d / s.sqrt()))
}

/// Standard normal upper-tail probability `Q(x) = ½·erfc(x/√2)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

/// `10·log₁₀(linear)`.
pub fn to_decibels(linear: f64) -> Result<f64> {
    require("linear", "finite and positive", linear, linear > 0.0)?;
    Ok(10.0 * linear.log10())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use proptest::prelude::*;

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        if b == 0.0 {
            return a.abs() <= tol;
        }
        ((a - b) / b).abs() <= tol
    }

    // -- sigma_factor ---------------------------------------------------------

    #[test]
    fn sigma_factor_reference_values() {
        let p2 = ChannelParams::default();
        assert!(rel_close(
            sigma_factor(&p2).unwrap(),
            7.0949548382911768e13,
            1e-12
        ));
        let p5 = ChannelParams {
            link_length: 5000.0,
            ..ChannelParams::default()
        };
        assert!(rel_close(
            sigma_factor(&p5).unwrap(),
            3.806328948549972e14,
            1e-12
        ));
    }

    #[test]
    fn sigma_factor_zero_constant_is_zero() {
        let p = ChannelParams {
            rytov_constant: 0.0,
            ..ChannelParams::default()
        };
        assert_eq!(sigma_factor(&p).unwrap(), 0.0);
    }

    #[test]
    fn sigma_factor_rejects_non_positive_geometry() {
        let mut p = ChannelParams::default();
        p.wavelength = 0.0;
        assert!(sigma_factor(&p).is_err());
        p = ChannelParams::default();
        p.link_length = -1.0;
        assert!(sigma_factor(&p).is_err());
    }

    // -- log_intensity_variance ------------------------------------------------

    #[test]
    fn variance_is_the_product() {
        let v = log_intensity_variance(7.0949548382911768e13, 1.2128627893528201e-14)
            .unwrap();
        assert!(rel_close(v, 0.86052067155021231, 1e-12));
        assert_eq!(log_intensity_variance(1e14, 0.0).unwrap(), 0.0);
        assert_eq!(log_intensity_variance(0.0, 1e-14).unwrap(), 0.0);
        assert!(log_intensity_variance(-1.0, 1e-14).is_err());
        assert!(log_intensity_variance(1.0, -1e-14).is_err());
    }

    // -- power_margin -----------------------------------------------------------

    #[test]
    fn no_turbulence_needs_no_margin() {
        let pm = power_margin(0.0, 1e-6).unwrap();
        assert_eq!(pm.linear, 1.0);
        assert_eq!(pm.decibels, 0.0);
    }

    #[test]
    fn boundary_outage_kills_the_root_term() {
        let pm = power_margin(0.5, 0.5).unwrap();
        assert!(rel_close(pm.linear, 1.2840254166877415, 1e-12));
    }

    #[test]
    fn reference_margin_value() {
        let pm = power_margin(0.861, 1e-10).unwrap();
        assert!(rel_close(pm.linear, 758.89545838680928, 1e-12));
        assert!(rel_close(pm.decibels, 28.801819537969835, 1e-12));
    }

    #[test]
    fn margin_rejects_out_of_range_targets() {
        assert!(matches!(
            power_margin(0.5, 0.6),
            Err(Error::Domain { name: "p0", .. })
        ));
        assert!(power_margin(0.5, 0.0).is_err());
        assert!(power_margin(-0.1, 0.01).is_err());
    }

    #[test]
    fn margin_increases_with_variance() {
        let mut prev = power_margin(1e-3, 1e-4).unwrap().linear;
        let mut s = 1e-3;
        while s < 3.0 {
            s += 0.05;
            let cur = power_margin(s, 1e-4).unwrap().linear;
            assert!(cur > prev, "margin not increasing at s={s}");
            prev = cur;
        }
    }

    #[test]
    fn margin_decreases_with_outage_target() {
        let mut prev = f64::INFINITY;
        for i in 0..60 {
            let p0 = 1e-12f64 * (0.5f64 / 1e-12).powf(i as f64 / 59.0);
            let cur = power_margin(0.8, p0).unwrap().linear;
            assert!(cur < prev, "margin not decreasing at p0={p0}");
            prev = cur;
        }
    }

    // -- outage inverses ----------------------------------------------------------

    #[test]
    fn inverse_at_boundary_margin_is_half() {
        let s = 0.5f64;
        let pm = (0.25f64).exp();
        assert!(rel_close(outage_from_margin(s, pm).unwrap(), 0.5, 1e-12));
        assert!(rel_close(outage_exact_lognormal(s, pm).unwrap(), 0.5, 1e-12));
    }

    #[test]
    fn inverse_reference_values() {
        assert!(rel_close(
            outage_from_margin(0.5, 9.283).unwrap(),
            0.0099880872964179742,
            1e-12
        ));
        let pm = power_margin(0.5, 0.01).unwrap().linear;
        assert!(rel_close(pm, 9.2802034132485835, 1e-12));
        assert!(rel_close(outage_from_margin(0.5, pm).unwrap(), 0.01, 1e-9));
        assert!(rel_close(
            outage_from_margin(0.861, 758.89545838680928).unwrap(),
            1e-10,
            1e-9
        ));
    }

    #[test]
    fn exact_tail_reference_values() {
        let pm = power_margin(0.5, 0.01).unwrap().linear;
        let q = outage_exact_lognormal(0.5, pm).unwrap();
        assert!(rel_close(q, 0.0025777825989020891, 1e-10), "q = {q}");
    }

    #[test]
    fn margins_below_deterministic_minimum_are_rejected() {
        let s = 0.8f64;
        let too_small = (0.5 * s).exp() * 0.999;
        assert!(outage_from_margin(s, too_small).is_err());
        assert!(outage_exact_lognormal(s, too_small).is_err());
        assert!(outage_from_margin(0.0, 2.0).is_err());
    }

    // -- q_function ------------------------------------------------------------

    #[test]
    fn q_function_reference_values() {
        assert!(rel_close(q_function(0.0), 0.5, 1e-15));
        assert!(rel_close(q_function(2.797), 0.0025789766638667342, 1e-10));
        // deep tail stays accurate in relative terms
        assert!(rel_close(q_function(7.0), 1.279812543885835e-12, 1e-9));
    }

    // -- to_decibels -------------------------------------------------------------

    #[test]
    fn decibel_conversion() {
        assert_eq!(to_decibels(1.0).unwrap(), 0.0);
        assert!(rel_close(to_decibels(10.0).unwrap(), 10.0, 1e-15));
        assert!(rel_close(to_decibels(758.9).unwrap(), 28.801845528264334, 1e-12));
        assert!(to_decibels(0.0).is_err());
        assert!(to_decibels(-3.0).is_err());
    }

    #[test]
    fn power_margin_db_field_is_consistent() {
        for &(s, p0) in &[(0.1, 1e-3), (1.7, 1e-9), (0.0, 0.2)] {
            let pm = power_margin(s, p0).unwrap();
            assert!(rel_close(pm.decibels, 10.0 * pm.linear.log10(), 1e-12));
            assert!(pm.linear >= 1.0);
        }
    }

    // -- randomized invariants ------------------------------------------------------

    proptest! {
        #[test]
        fn outage_round_trips_through_margin(
            s in 0.01f64..2.0,
            log_p0 in (1e-12f64).ln()..(0.5f64).ln(),
        ) {
            let p0 = log_p0.exp();
            let pm = power_margin(s, p0).unwrap();
            let back = outage_from_margin(s, pm.linear).unwrap();
            prop_assert!(((back - p0) / p0).abs() < 1e-9);
        }

        #[test]
        fn exact_tail_never_exceeds_chernoff_inverse(
            s in 0.01f64..2.0,
            tail_arg in 0.0f64..30.0,
        ) {
            let pm = (0.5 * s + tail_arg * s.sqrt()).exp();
            let exact = outage_exact_lognormal(s, pm).unwrap();
            let approx = outage_from_margin(s, pm).unwrap();
            prop_assert!(exact <= approx);
            if tail_arg > 1e-6 {
                prop_assert!(exact < approx);
            }
        }

        #[test]
        fn margin_is_at_least_one(s in 0.0f64..3.0, log_p0 in (1e-12f64).ln()..(0.5f64).ln()) {
            let pm = power_margin(s, log_p0.exp()).unwrap();
            prop_assert!(pm.linear >= 1.0);
            if s > 0.0 {
                prop_assert!(pm.linear > 1.0);
            }
        }
    }
}
