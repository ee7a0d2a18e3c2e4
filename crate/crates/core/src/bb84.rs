//! Asymptotic decoy-state BB84 with infinitely many decoy intensities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{ComponentParams, LinkParams, NoiseBudget};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bb84Params {
    /// Signal mean photon number. `None` means optimize over [`default_mu_grid`].
    pub mu: Option<f64>,
    /// Background rate of the unmultiplexed system, per gate.
    pub y0_base: f64,
    pub e_det: f64,
    /// Error rate of background counts.
    pub e0: f64,
    pub eta_bob: f64,
    /// Error-correction inefficiency.
    pub f_ec: f64,
    /// Detector gate window (s).
    pub delta_t_s: f64,
}

impl Default for Bb84Params {
    fn default() -> Self {
        Bb84Params {
            mu: None,
            y0_base: 5e-6,
            e_det: 0.003,
            e0: 0.5,
            eta_bob: 0.038,
            f_ec: 1.22,
            delta_t_s: 1e-9,
        }
    }
}

impl Bb84Params {
    pub fn validate(&self) -> Result<()> {
        if let Some(mu) = self.mu {
            if !(mu > 0.0) {
                return Err(Error::domain("mu", mu, "must be > 0"));
            }
        }
        if !(self.y0_base >= 0.0 && self.y0_base <= 1.0) {
            return Err(Error::domain("y0_base", self.y0_base, "must lie in [0, 1]"));
        }
        if !(0.0..=0.5).contains(&self.e_det) {
            return Err(Error::domain("e_det", self.e_det, "must lie in [0, 0.5]"));
        }
        if !(0.0..=1.0).contains(&self.e0) {
            return Err(Error::domain("e0", self.e0, "must lie in [0, 1]"));
        }
        if !(self.eta_bob > 0.0 && self.eta_bob <= 1.0) {
            return Err(Error::domain("eta_bob", self.eta_bob, "must lie in (0, 1]"));
        }
        if !(self.f_ec >= 1.0) {
            return Err(Error::domain("f_ec", self.f_ec, "must be >= 1"));
        }
        if !(self.delta_t_s > 0.0) {
            return Err(Error::domain("gate window", self.delta_t_s, "must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bb84Point {
    pub z_km: f64,
    pub mu: f64,
    /// Overall transmittance η_ch·η_DMU·η_Bob.
    pub eta: f64,
    pub y0: f64,
    pub q_mu: f64,
    pub e_mu: f64,
    pub q1: f64,
    pub e1: f64,
    /// Secure key per signal, clamped at zero.
    pub rate: f64,
}

/// Total background count probability per gate, capped at 1.
pub fn background_rate(y0_base: f64, eta_bob: f64, n_spd_window: f64) -> f64 {
    (y0_base + eta_bob * n_spd_window).min(1.0)
}

pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain("probability", p, "must lie in [0, 1]"));
    }
    if p == 0.0 || p == 1.0 {
        return Ok(0.0);
    }
    Ok(-p * p.log2() - (1.0 - p) * (1.0 - p).log2())
}

/// Gains, error rates and key rate for a given overall transmittance and
/// background rate.
pub fn decoy_point(
    z_km: f64,
    eta: f64,
    y0: f64,
    mu: f64,
    params: &Bb84Params,
) -> Result<Bb84Point> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::domain(
            "overall transmittance",
            eta,
            "must lie in (0, 1]",
        ));
    }
    if !(mu > 0.0) {
        return Err(Error::domain("mu", mu, "must be > 0"));
    }
    let detected = -(-eta * mu).exp_m1();
    let poisson_one = mu * (-mu).exp();

    let q_mu = y0 + detected;
    let q1 = (y0 + eta) * poisson_one;
    let (e_mu, e1) = if q_mu > 0.0 && q1 > 0.0 {
        (
            (params.e0 * y0 + params.e_det * detected) / q_mu,
            (params.e0 * y0 + params.e_det * eta) * poisson_one / q1,
        )
    } else {
        (0.0, 0.0)
    };

    let rate = if q_mu > 0.0 && q1 > 0.0 {
        let h_mu = binary_entropy(e_mu.min(1.0))?;
        let h_1 = binary_entropy(e1.min(1.0))?;
        (0.5 * (q1 - params.f_ec * q_mu * h_mu - q1 * h_1)).max(0.0)
    } else {
        0.0
    };

    Ok(Bb84Point {
        z_km,
        mu,
        eta,
        y0,
        q_mu,
        e_mu,
        q1,
        e1,
        rate,
    })
}

/// Decoy BB84 point at `link.fiber_length_km` with the multiplexing noise of
/// the given link. Uses `params.mu`, or the default grid optimum when unset.
pub fn bb84_point(
    link: &LinkParams,
    comp: &ComponentParams,
    params: &Bb84Params,
) -> Result<Bb84Point> {
    match params.mu {
        Some(mu) => point_at_mu(link, comp, params, mu),
        None => optimize_mu(link, comp, params, &default_mu_grid()).map(|(_, p)| p),
    }
}

fn point_at_mu(
    link: &LinkParams,
    comp: &ComponentParams,
    params: &Bb84Params,
    mu: f64,
) -> Result<Bb84Point> {
    let (eta, y0) = channel_terms(link, comp, params)?;
    decoy_point(link.fiber_length_km, eta, y0, mu, params)
}

fn channel_terms(
    link: &LinkParams,
    comp: &ComponentParams,
    params: &Bb84Params,
) -> Result<(f64, f64)> {
    params.validate()?;
    let budget = NoiseBudget::compute(link, comp, params.delta_t_s, None)?;
    let eta = budget.eta_ch * comp.eta_dmu * params.eta_bob;
    Ok((
        eta,
        background_rate(params.y0_base, params.eta_bob, budget.n_spd_window),
    ))
}

/// μ ∈ [0.05, 1.0] in steps of 0.01.
pub fn default_mu_grid() -> Vec<f64> {
    (5..=100).map(|i| f64::from(i) / 100.0).collect()
}

/// Grid argmax of the key rate over μ; ties go to the smaller μ.
pub fn optimize_mu(
    link: &LinkParams,
    comp: &ComponentParams,
    params: &Bb84Params,
    mu_grid: &[f64],
) -> Result<(f64, Bb84Point)> {
    if mu_grid.is_empty() {
        return Err(Error::Argument("mu grid is empty".into()));
    }
    let (eta, y0) = channel_terms(link, comp, params)?;
    let mut best: Option<Bb84Point> = None;
    for &mu in mu_grid {
        let p = decoy_point(link.fiber_length_km, eta, y0, mu, params)?;
        best = match best {
            Some(b) if b.rate > p.rate || (b.rate == p.rate && b.mu <= p.mu) => Some(b),
            _ => Some(p),
        };
    }
    let best = best.expect("grid is nonempty");
    Ok((best.mu, best))
}
