//! Field-of-view selection that minimizes the required power margin.
//!
//! Shrinking the field of view at a fixed ground footprint forces a higher
//! altitude, and as long as `C_n²` decreases with altitude the implication
//! chain
//!
//! ```text
//! FOV ↓  ⇒  A ↑  ⇒  C_n² ↓  ⇒  s ↓  ⇒  PM ↓
//! ```
//!
//! makes the lower end of the feasible FOV interval the optimum, with the
//! induced altitude maximal and unique. The decreasing-`C_n²` premise is
//! *certified* per scenario rather than assumed — the high-altitude bump term
//! breaks it near ten times its decay scale — and when certification fails
//! [`optimize`] falls back to the brute-force [`grid_search_oracle`].
//!
//! Feasibility gates: the footprint `pixels / resolution` must cover the
//! subarea width `hsl`, and the declared FOV bounds must intersect the
//! interval the focal-length range can actually reach.

use serde::Serialize;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::camera::{
    altitude_from_fov, fov_from_focal, swath_width, CameraSpec, ImageRequirement,
};
use crate::error::{require, Result};
use crate::linkbudget::{power_margin, sigma_factor, ChannelParams, PowerMargin};
use crate::turbulence::TurbulenceProfile;

/// Grid step of the brute-force oracle: 0.25°, sub-dB resolution across the
/// default interval at negligible cost.
pub const DEFAULT_ORACLE_STEP: f64 = std::f64::consts::PI / 720.0;

/// Number of altitude-grid intervals used when certifying monotonicity over
/// the induced altitude range.
const CERTIFICATION_INTERVALS: usize = 1000;

/// The full joint scenario consumed by the optimizer and the CLI.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub channel: ChannelParams,
    pub profile: TurbulenceProfile,
    pub camera: CameraSpec,
    pub requirement: ImageRequirement,
    /// Horizontal-sidelong width of the subarea one drone must cover, meters.
    pub hsl: f64,
}

impl Default for Scenario {
    /// The default scenario: 20 m footprint and subarea, 2 km link at
    /// 1550 nm, 1e-6 outage target.
    fn default() -> Self {
        Scenario {
            channel: ChannelParams::default(),
            profile: TurbulenceProfile::default(),
            camera: CameraSpec::default(),
            requirement: ImageRequirement::default(),
            hsl: 20.0,
        }
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.channel.validate()?;
        self.profile.validate()?;
        self.camera.validate()?;
        self.requirement.validate()?;
        require("hsl", "finite and positive", self.hsl, self.hsl > 0.0)?;
        Ok(())
    }

    /// Half the ground footprint, `pixels / (2·resolution)`, meters.
    pub fn half_swath(&self) -> Result<f64> {
        Ok(swath_width(self.camera.horizontal_pixels, self.requirement.resolution)? / 2.0)
    }
}

/// One evaluated and checked feasibility constraint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintRecord {
    pub name: &'static str,
    pub satisfied: bool,
    pub detail: String,
}

/// Feasible FOV interval plus the constraint records that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Feasibility {
    /// `Some((fov_lo, fov_hi))` in radians when the scenario is feasible.
    pub interval: Option<(f64, f64)>,
    pub diagnostics: Vec<ConstraintRecord>,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        self.interval.is_some()
    }
}

/// Outcome of [`optimize`].
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    /// Chosen field of view, radians; `None` when infeasible.
    pub fov_opt: Option<f64>,
    /// Induced altitude, meters.
    pub altitude_opt: Option<f64>,
    /// `C_n²` at the optimum altitude.
    pub cn2_at_opt: Option<f64>,
    /// Log-intensity variance at the optimum.
    pub s_at_opt: Option<f64>,
    /// Required margin at the optimum.
    pub margin: Option<PowerMargin>,
    pub feasible: bool,
    /// True when `C_n²` was strictly decreasing over the induced altitude
    /// range; false means the grid oracle picked the optimum instead.
    pub monotone_certified: bool,
    pub diagnostics: Vec<ConstraintRecord>,
}

/// One row of a FOV sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    /// Field of view, radians.
    pub fov: f64,
    /// Induced altitude, meters.
    pub altitude: f64,
    /// `C_n²` at that altitude.
    pub cn2: f64,
    /// Log-intensity variance `σ·C_n²`.
    pub log_intensity_variance: f64,
    /// Required margin, dB.
    pub margin_db: f64,
}

/// Exhaustive sweep over the feasible FOV grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSweep {
    /// Rows ascending in FOV; empty when infeasible.
    pub rows: Vec<SweepRow>,
    /// Minimizing row, ties broken toward smaller FOV; `None` when
    /// infeasible.
    pub argmin: Option<SweepRow>,
    pub diagnostics: Vec<ConstraintRecord>,
}

/// Status of one implication link across the sampled FOV range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinkStatus {
    /// Held strictly at every sampled pair.
    Strict,
    /// Never violated, but flat somewhere (non-strict).
    Flat,
    /// Violated; carries the first sampled FOV/altitude where it broke,
    /// walking from the widest FOV down.
    Broken { fov: f64, altitude: f64 },
}

impl LinkStatus {
    pub fn holds(&self) -> bool {
        !matches!(self, LinkStatus::Broken { .. })
    }
}

/// Per-link verdicts for the FOV↓ ⇒ A↑ ⇒ C_n²↓ ⇒ s↓ ⇒ PM↓ chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainReport {
    pub altitude_increases: LinkStatus,
    pub cn2_decreases: LinkStatus,
    pub variance_decreases: LinkStatus,
    pub margin_decreases: LinkStatus,
}

impl ChainReport {
    /// True when no link is broken (flat links still count as holding).
    pub fn all_links_hold(&self) -> bool {
        self.altitude_increases.holds()
            && self.cn2_decreases.holds()
            && self.variance_decreases.holds()
            && self.margin_decreases.holds()
    }

    /// Name of the first broken link in chain order, if any.
    pub fn first_broken(&self) -> Option<&'static str> {
        [
            ("altitude_increases", self.altitude_increases),
            ("cn2_decreases", self.cn2_decreases),
            ("variance_decreases", self.variance_decreases),
            ("margin_decreases", self.margin_decreases),
        ]
        .into_iter()
        .find(|(_, s)| !s.holds())
        .map(|(n, _)| n)
    }
}

// ---------------------------------------------------------------------------
// Feasibility
// ---------------------------------------------------------------------------

/// Intersects the declared FOV bounds with the interval reachable through the
/// focal-length range, and gates on the footprint covering the subarea.
pub fn feasible_fov_interval(scenario: &Scenario) -> Result<Feasibility> {
    scenario.validate()?;

    let swath = swath_width(
        scenario.camera.horizontal_pixels,
        scenario.requirement.resolution,
    )?;
    let swath_ok = swath >= scenario.hsl;
    let swath_detail = if swath_ok {
        format!("swath {swath} m covers HSL {} m", scenario.hsl)
    } else {
        format!("swath < HSL ({swath} m < {} m)", scenario.hsl)
    };

    // Long focal length -> narrow FOV, so the focal range maps to
    // [fov(f_max), fov(f_min)].
    let focal_lo = fov_from_focal(scenario.camera.sensor_width, scenario.camera.focal_max)?;
    let focal_hi = fov_from_focal(scenario.camera.sensor_width, scenario.camera.focal_min)?;

    let lo = scenario.camera.fov_min.max(focal_lo);
    let hi = scenario.camera.fov_max.min(focal_hi);
    let intersection_ok = lo <= hi;

    let diagnostics = vec![
        ConstraintRecord {
            name: "swath_vs_hsl",
            satisfied: swath_ok,
            detail: swath_detail,
        },
        ConstraintRecord {
            name: "fov_bounds",
            satisfied: intersection_ok,
            detail: format!(
                "declared FOV [{:.4}, {:.4}] deg",
                scenario.camera.fov_min.to_degrees(),
                scenario.camera.fov_max.to_degrees()
            ),
        },
        ConstraintRecord {
            name: "focal_bounds",
            satisfied: intersection_ok,
            detail: format!(
                "focal range [{}, {}] mm maps to FOV [{:.4}, {:.4}] deg",
                scenario.camera.focal_min * 1e3,
                scenario.camera.focal_max * 1e3,
                focal_lo.to_degrees(),
                focal_hi.to_degrees()
            ),
        },
    ];

    Ok(Feasibility {
        interval: (swath_ok && intersection_ok).then_some((lo, hi)),
        diagnostics,
    })
}

// ---------------------------------------------------------------------------
// Sweep rows
// ---------------------------------------------------------------------------

/// Evaluates one FOV: induced altitude, turbulence, variance, and margin.
pub fn sweep_row(scenario: &Scenario, fov: f64, p0: f64) -> Result<SweepRow> {
    let half_swath = scenario.half_swath()?;
    let sigma = sigma_factor(&scenario.channel)?;
    sweep_row_with(scenario, sigma, half_swath, fov, p0)
}

fn sweep_row_with(
    scenario: &Scenario,
    sigma: f64,
    half_swath: f64,
    fov: f64,
    p0: f64,
) -> Result<SweepRow> {
    let altitude = altitude_from_fov(half_swath, fov)?;
    let cn2 = scenario.profile.cn2_at_altitude(altitude)?;
    let s = crate::linkbudget::log_intensity_variance(sigma, cn2)?;
    let margin = power_margin(s, p0)?;
    Ok(SweepRow {
        fov,
        altitude,
        cn2,
        log_intensity_variance: s,
        margin_db: margin.decibels,
    })
}

// ---------------------------------------------------------------------------
// Optimization
// ---------------------------------------------------------------------------

/// Picks the margin-minimizing FOV.
///
/// When the turbulence profile certifies as strictly decreasing over the
/// altitudes the feasible interval induces, the optimum is the interval's
/// lower end (maximal altitude). Otherwise the grid oracle result is
/// substituted and `monotone_certified` is false. Infeasible scenarios return
/// a result with `feasible = false` and empty optimum fields, not an error.
pub fn optimize(scenario: &Scenario) -> Result<OptimizationResult> {
    let feasibility = feasible_fov_interval(scenario)?;
    let Some((fov_lo, fov_hi)) = feasibility.interval else {
        return Ok(OptimizationResult {
            fov_opt: None,
            altitude_opt: None,
            cn2_at_opt: None,
            s_at_opt: None,
            margin: None,
            feasible: false,
            monotone_certified: false,
            diagnostics: feasibility.diagnostics,
        });
    };

    let half_swath = scenario.half_swath()?;
    let alt_lo = altitude_from_fov(half_swath, fov_hi)?;
    let alt_hi = altitude_from_fov(half_swath, fov_lo)?;

    // A singleton interval has nothing to certify.
    let certified = if alt_hi - alt_lo <= alt_hi * 1e-12 {
        true
    } else {
        let step = (alt_hi - alt_lo) / CERTIFICATION_INTERVALS as f64;
        scenario
            .profile
            .certify_monotone_decreasing(alt_lo, alt_hi, step)?
            .strictly_decreasing
    };

    let fov_opt = if certified {
        fov_lo
    } else {
        // Step fine enough to resolve even a narrow interval.
        let step = DEFAULT_ORACLE_STEP.min((fov_hi - fov_lo) / 400.0);
        let sweep = grid_search_oracle(scenario, step.max(f64::MIN_POSITIVE))?;
        sweep
            .argmin
            .expect("feasible scenario has a non-empty sweep")
            .fov
    };

    let row = sweep_row(scenario, fov_opt, scenario.channel.outage_target)?;
    Ok(OptimizationResult {
        fov_opt: Some(row.fov),
        altitude_opt: Some(row.altitude),
        cn2_at_opt: Some(row.cn2),
        s_at_opt: Some(row.log_intensity_variance),
        margin: Some(power_margin(
            row.log_intensity_variance,
            scenario.channel.outage_target,
        )?),
        feasible: true,
        monotone_certified: certified,
        diagnostics: feasibility.diagnostics,
    })
}

/// Brute-force margin minimization over the feasible FOV grid.
///
/// Rows come back ascending in FOV regardless of evaluation order; ties at
/// the minimum break toward the smaller FOV. A step wider than the interval
/// degenerates to a single-point sweep at the lower end.
pub fn grid_search_oracle(scenario: &Scenario, step: f64) -> Result<GridSweep> {
    require("step", "finite and positive", step, step > 0.0)?;
    let feasibility = feasible_fov_interval(scenario)?;
    let Some((fov_lo, fov_hi)) = feasibility.interval else {
        return Ok(GridSweep {
            rows: Vec::new(),
            argmin: None,
            diagnostics: feasibility.diagnostics,
        });
    };

    let half_swath = scenario.half_swath()?;
    let sigma = sigma_factor(&scenario.channel)?;
    let p0 = scenario.channel.outage_target;

    let points = ((fov_hi - fov_lo) / step + 1e-9).floor() as usize + 1;
    let grid: Vec<f64> = (0..points).map(|k| fov_lo + k as f64 * step).collect();

    #[cfg(feature = "parallel")]
    let rows: Vec<SweepRow> = grid
        .par_iter()
        .map(|&fov| sweep_row_with(scenario, sigma, half_swath, fov, p0))
        .collect::<Result<_>>()?;
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<SweepRow> = grid
        .iter()
        .map(|&fov| sweep_row_with(scenario, sigma, half_swath, fov, p0))
        .collect::<Result<_>>()?;

    let argmin = rows
        .iter()
        .copied()
        .reduce(|best, row| if row.margin_db < best.margin_db { row } else { best });

    Ok(GridSweep {
        rows,
        argmin,
        diagnostics: feasibility.diagnostics,
    })
}

/// dB of margin saved by moving from `fov_a` to `fov_b` at outage target
/// `p0`; positive when `fov_b` needs less margin.
pub fn margin_gain(scenario: &Scenario, fov_a: f64, fov_b: f64, p0: f64) -> Result<f64> {
    let a = sweep_row(scenario, fov_a, p0)?;
    let b = sweep_row(scenario, fov_b, p0)?;
    Ok(a.margin_db - b.margin_db)
}

/// Samples `n_samples` FOVs across the feasible interval (widest first) and
/// checks every link of the monotone chain. Broken links are data, not
/// errors.
pub fn verify_monotone_chain(scenario: &Scenario, n_samples: usize) -> Result<ChainReport> {
    require(
        "n_samples",
        "at least 2",
        n_samples as f64,
        n_samples >= 2,
    )?;
    let feasibility = feasible_fov_interval(scenario)?;
    let Some((fov_lo, fov_hi)) = feasibility.interval else {
        return Err(crate::error::Error::Domain {
            name: "scenario",
            constraint: "feasible for chain verification",
            value: f64::NAN,
        });
    };

    let half_swath = scenario.half_swath()?;
    let sigma = sigma_factor(&scenario.channel)?;
    let p0 = scenario.channel.outage_target;

    // Widest FOV first: the chain reads "as FOV decreases ...".
    let rows: Vec<SweepRow> = (0..n_samples)
        .map(|k| {
            let t = k as f64 / (n_samples - 1) as f64;
            let fov = fov_hi + t * (fov_lo - fov_hi);
            sweep_row_with(scenario, sigma, half_swath, fov, p0)
        })
        .collect::<Result<_>>()?;

    let mut report = ChainReport {
        altitude_increases: LinkStatus::Strict,
        cn2_decreases: LinkStatus::Strict,
        variance_decreases: LinkStatus::Strict,
        margin_decreases: LinkStatus::Strict,
    };

    for pair in rows.windows(2) {
        let (prev, next) = (pair[0], pair[1]);
        let at = LinkStatus::Broken {
            fov: next.fov,
            altitude: next.altitude,
        };
        step_link(&mut report.altitude_increases, next.altitude, prev.altitude, at);
        step_link(&mut report.cn2_decreases, prev.cn2, next.cn2, at);
        step_link(
            &mut report.variance_decreases,
            prev.log_intensity_variance,
            next.log_intensity_variance,
            at,
        );
        step_link(&mut report.margin_decreases, prev.margin_db, next.margin_db, at);
    }
    Ok(report)
}

/// Folds one sampled pair into a link status: the link asks `hi > lo`
/// strictly; equality degrades to flat, inversion breaks it (first break
/// wins).
fn step_link(status: &mut LinkStatus, hi: f64, lo: f64, at: LinkStatus) {
    if matches!(status, LinkStatus::Broken { .. }) {
        return;
    }
    if hi > lo {
        // strict pair, keep current status
    } else if hi == lo {
        *status = LinkStatus::Flat;
    } else {
        *status = at;
    }
}
