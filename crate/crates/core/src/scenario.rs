//! Named link/receiver configurations and distance sweeps over them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bb84::{self, Bb84Params};
use crate::distance::{self, SecureDistance};
use crate::error::{Error, Result};
use crate::gmcs::{self, GmcsParams};
use crate::noise::{Adjacency, ComponentParams, LinkParams, NoiseBudget};

/// Window used for the per-gate noise columns of homodyne scenarios.
pub const REFERENCE_WINDOW_S: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Bb84,
    Gmcs,
}

impl Protocol {
    pub fn tag(&self) -> &'static str {
        match self {
            Protocol::Bb84 => "bb84",
            Protocol::Gmcs => "gmcs",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Detector {
    Bb84(Bb84Params),
    Gmcs(GmcsParams),
}

/// Every tunable input in one place.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ParameterSet {
    pub link: LinkParams,
    pub comp: ComponentParams,
    pub bb84: Bb84Params,
    pub gmcs: GmcsParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub link: LinkParams,
    pub comp: ComponentParams,
    pub detector: Detector,
    pub adjacency: Adjacency,
    pub z_grid: Vec<f64>,
}

/// Per-distance evaluation result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub z_km: f64,
    pub budget: NoiseBudget,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub scenario: String,
    pub protocol: Protocol,
    pub rows: Vec<SweepRow>,
    pub secure_distance: SecureDistance,
    /// Distance where the per-gate leakage and Raman contributions are equal.
    pub noise_crossover_km: Option<f64>,
}

impl SweepResult {
    pub fn secure_distance_km(&self) -> f64 {
        self.secure_distance.km
    }
}

/// Evenly spaced grid from `start` to `end` inclusive.
pub fn z_grid(start: f64, end: f64, step: f64) -> Result<Vec<f64>> {
    if !(start >= 0.0) || !(end >= start) || !(step > 0.0) {
        return Err(Error::Argument(format!(
            "z grid needs 0 <= start <= end and step > 0 (got {start}, {end}, {step})"
        )));
    }
    let n = ((end - start) / step + 1e-9).floor() as u32;
    Ok((0..=n).map(|i| start + f64::from(i) * step).collect())
}

/// 0–80 km in 0.5 km steps.
pub fn default_z_grid() -> Vec<f64> {
    (0..=160).map(|i| f64::from(i) * 0.5).collect()
}

impl Scenario {
    pub fn protocol(&self) -> Protocol {
        match self.detector {
            Detector::Bb84(_) => Protocol::Bb84,
            Detector::Gmcs(_) => Protocol::Gmcs,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.z_grid.is_empty() {
            return Err(Error::Argument(format!(
                "scenario `{}` has an empty z grid",
                self.name
            )));
        }
        if self.z_grid[0] < 0.0 || self.z_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Argument(format!(
                "scenario `{}`: z grid must be nonnegative and strictly increasing",
                self.name
            )));
        }
        self.link.validate()?;
        self.comp.validate()?;
        match &self.detector {
            Detector::Bb84(p) => p.validate(),
            Detector::Gmcs(p) => p.validate(),
        }
    }

    /// Components with the isolation of this scenario's adjacency class.
    pub fn effective_components(&self) -> ComponentParams {
        self.comp.with_adjacency(self.adjacency)
    }

    /// Noise budget and key rate at one distance.
    pub fn evaluate(&self, z_km: f64) -> Result<SweepRow> {
        let link = self.link.at_distance(z_km);
        let comp = self.effective_components();
        let (budget, rate) = match &self.detector {
            Detector::Bb84(params) => {
                let budget = NoiseBudget::compute(&link, &comp, params.delta_t_s, None)?;
                let point = bb84::bb84_point(&link, &comp, params)?;
                (budget, point.rate)
            }
            Detector::Gmcs(params) => {
                let (budget, point) =
                    gmcs::gmcs_link_point(&link, &comp, params, REFERENCE_WINDOW_S)?;
                (budget, point.rate)
            }
        };
        Ok(SweepRow { z_km, budget, rate })
    }

    pub fn rate_at(&self, z_km: f64) -> Result<f64> {
        self.evaluate(z_km).map(|r| r.rate)
    }
}

/// Evaluate a scenario over its distance grid. Rows come back in grid order.
pub fn run_sweep(scenario: &Scenario) -> Result<SweepResult> {
    scenario.validate()?;
    let rows = scenario
        .z_grid
        .par_iter()
        .map(|&z| scenario.evaluate(z).map_err(|e| e.at(z)))
        .collect::<Result<Vec<_>>>()?;

    let z_min = scenario.z_grid[0];
    let z_max = *scenario.z_grid.last().expect("grid is nonempty");
    let secure_distance = distance::secure_distance(
        |z| scenario.rate_at(z).map_err(|e| e.at(z)),
        z_min,
        z_max,
        distance::COARSE_STEP_KM,
        distance::TOLERANCE_KM,
    )?;

    Ok(SweepResult {
        scenario: scenario.name.clone(),
        protocol: scenario.protocol(),
        noise_crossover_km: noise_crossover(&rows),
        rows,
        secure_distance,
    })
}

/// First distance where the Raman term catches up with leakage, linearly
/// interpolated between grid rows.
pub fn noise_crossover(rows: &[SweepRow]) -> Option<f64> {
    let excess = |r: &SweepRow| r.budget.window.leak - r.budget.window.sasrs;
    rows.windows(2).find_map(|w| {
        let (d0, d1) = (excess(&w[0]), excess(&w[1]));
        if d0 > 0.0 && d1 <= 0.0 {
            Some(w[0].z_km + (w[1].z_km - w[0].z_km) * d0 / (d0 - d1))
        } else {
            None
        }
    })
}

pub const BUILTIN_NAMES: [&str; 7] = [
    "fig3-noise",
    "bb84-0dBm",
    "gmcs-none",
    "gmcs-1ch-nonadj",
    "gmcs-1ch-adj",
    "gmcs-38ch",
    "gmcs-1ch-100MHz-detector",
];

pub fn builtin_scenarios() -> Vec<Scenario> {
    builtin_scenarios_from(&ParameterSet::default())
}

/// The built-in scenarios layered over `base`. Each scenario pins the
/// classical plan (0 dBm per channel, channel count, adjacency) and its
/// detector tweaks; everything else comes from `base`.
pub fn builtin_scenarios_from(base: &ParameterSet) -> Vec<Scenario> {
    let link_with = |m: u32| LinkParams {
        classical_channel_count: m,
        p_out_w: 1e-3,
        ..base.link.clone()
    };
    let bb84 = |name: &str| Scenario {
        name: name.to_string(),
        link: link_with(1),
        comp: base.comp.clone(),
        detector: Detector::Bb84(base.bb84.clone()),
        adjacency: Adjacency::NonAdjacent,
        z_grid: default_z_grid(),
    };
    let gmcs = |name: &str, m: u32, adjacency: Adjacency, params: GmcsParams| Scenario {
        name: name.to_string(),
        link: link_with(m),
        comp: base.comp.clone(),
        detector: Detector::Gmcs(params),
        adjacency,
        z_grid: default_z_grid(),
    };
    let fast_detector = GmcsParams {
        v_el: 0.1,
        sigma_meas: 0.024,
        conservative: true,
        detector_bandwidth_hz: 100e6,
        n_lo: 4e8,
        ..base.gmcs.clone()
    };

    vec![
        bb84("fig3-noise"),
        bb84("bb84-0dBm"),
        gmcs("gmcs-none", 0, Adjacency::NonAdjacent, base.gmcs.clone()),
        gmcs(
            "gmcs-1ch-nonadj",
            1,
            Adjacency::NonAdjacent,
            base.gmcs.clone(),
        ),
        gmcs("gmcs-1ch-adj", 1, Adjacency::Adjacent, base.gmcs.clone()),
        gmcs("gmcs-38ch", 38, Adjacency::NonAdjacent, base.gmcs.clone()),
        gmcs(
            "gmcs-1ch-100MHz-detector",
            1,
            Adjacency::NonAdjacent,
            fast_detector,
        ),
    ]
}

pub fn find_builtin(name: &str, base: &ParameterSet) -> Result<Scenario> {
    builtin_scenarios_from(base)
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::UnknownScenario(name.to_string()))
}
