//! Gaussian-modulated coherent-state QKD with homodyne detection and reverse
//! reconciliation, under the realistic model (Bob's detector inefficiency and
//! electronic noise are trusted).
//!
//! All variances are in shot-noise units. The Holevo bound comes from the
//! symplectic eigenvalues of the Alice–Bob state (σ₁, σ₂) and of Alice's
//! conditional state after Bob's homodyne measurement (σ₃, σ₄).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{ComponentParams, HomodyneReceiver, LinkParams, NoiseBudget};

/// Slack allowed below zero for Θ arguments that come out of square roots.
const THETA_TOLERANCE: f64 = 1e-9;

/// Relative slack for a discriminant to count as a degenerate double root.
const DISCRIMINANT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmcsParams {
    /// Modulation variance V_A.
    pub v_a: f64,
    pub eta_bob: f64,
    /// Excess noise of the system without multiplexing, referred to input.
    pub eps0: f64,
    /// Detector electronic noise.
    pub v_el: f64,
    /// Reverse-reconciliation efficiency.
    pub gamma: f64,
    /// Local-oscillator photons per pulse.
    pub n_lo: f64,
    pub detector_bandwidth_hz: f64,
    /// Uncertainty of the excess-noise estimate.
    pub sigma_meas: f64,
    /// Add `sigma_meas` to the excess noise, referred to input.
    pub conservative: bool,
    /// Add the unmatched-mode excess noise as well (normally neglected).
    pub strict_eps_out: bool,
}

impl Default for GmcsParams {
    fn default() -> Self {
        GmcsParams {
            v_a: 10.0,
            eta_bob: 0.6,
            eps0: 0.01,
            v_el: 0.01,
            gamma: 0.9,
            n_lo: 1e8,
            detector_bandwidth_hz: 1e6,
            sigma_meas: 0.0,
            conservative: false,
            strict_eps_out: false,
        }
    }
}

impl GmcsParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.v_a > 0.0) {
            return Err(Error::domain("v_a", self.v_a, "must be > 0"));
        }
        if !(self.eta_bob > 0.0 && self.eta_bob <= 1.0) {
            return Err(Error::domain("eta_bob", self.eta_bob, "must lie in (0, 1]"));
        }
        for (what, v) in [
            ("eps0", self.eps0),
            ("v_el", self.v_el),
            ("sigma_meas", self.sigma_meas),
        ] {
            if !(v >= 0.0) {
                return Err(Error::domain(what, v, "must be >= 0"));
            }
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::domain("gamma", self.gamma, "must lie in (0, 1]"));
        }
        if !(self.n_lo > 0.0) {
            return Err(Error::domain("n_lo", self.n_lo, "must be > 0"));
        }
        if !(self.detector_bandwidth_hz > 0.0) {
            return Err(Error::domain(
                "detector bandwidth",
                self.detector_bandwidth_hz,
                "must be > 0",
            ));
        }
        Ok(())
    }

    pub fn receiver(&self) -> HomodyneReceiver {
        HomodyneReceiver {
            eta_bob: self.eta_bob,
            n_lo: self.n_lo,
            bandwidth_hz: self.detector_bandwidth_hz,
        }
    }
}

/// Θ(x) = (x+1)log₂(x+1) − x log₂x, the entropy of a thermal state with mean
/// photon number x.
pub fn theta(x: f64) -> Result<f64> {
    if x < -THETA_TOLERANCE || x.is_nan() {
        return Err(Error::domain("theta argument", x, "must be >= 0"));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    Ok((x + 1.0) * (x + 1.0).log2() - x * x.log2())
}

/// Input-referred excess noise from the intrinsic term, the matched-mode
/// multiplexing noise `eps_in` (measured at Bob) and, in conservative mode,
/// the estimation uncertainty.
pub fn total_excess_noise(
    eps0: f64,
    eps_in: f64,
    eta_ch: f64,
    eta_dmu: f64,
    eta_bob: f64,
    sigma_meas: f64,
    conservative: bool,
) -> Result<f64> {
    let eta = eta_ch * eta_dmu * eta_bob;
    if !(eta > 0.0) {
        return Err(Error::domain("overall transmittance", eta, "must be > 0"));
    }
    let mut eps = eps0 + eps_in / eta;
    if conservative {
        eps += sigma_meas / eta;
    }
    Ok(eps)
}

/// The four invariants of the closed-form covariance matrices and the
/// resulting symplectic eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymplecticSpectrum {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// σ₁..σ₄ (positive square roots).
    pub sigma: [f64; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GmcsPoint {
    pub z_km: f64,
    pub eta_ch: f64,
    /// Total input-referred excess noise.
    pub eps: f64,
    pub chi_line: f64,
    pub chi_hom: f64,
    pub chi_tot: f64,
    pub i_ab: f64,
    pub chi_be: f64,
    pub spectrum: SymplecticSpectrum,
    /// Secure key per signal, clamped at zero.
    pub rate: f64,
}

/// Larger and smaller roots of t² − s·t + p, with a near-zero negative
/// discriminant treated as a double root.
fn root_pair(which: &'static str, s: f64, p: f64) -> Result<(f64, f64)> {
    let disc = s * s - 4.0 * p;
    let disc = if disc >= 0.0 {
        disc
    } else if -disc < DISCRIMINANT_TOLERANCE * s * s {
        0.0
    } else {
        return Err(Error::Physicality { which, value: disc });
    };
    let root = disc.sqrt();
    Ok((0.5 * (s + root), 0.5 * (s - root)))
}

/// Key rate for a given channel transmittance and input-referred excess noise.
pub fn gmcs_point(
    z_km: f64,
    eta_ch: f64,
    eta_dmu: f64,
    params: &GmcsParams,
    eps: f64,
) -> Result<GmcsPoint> {
    params.validate()?;
    if !(eta_ch > 0.0 && eta_ch <= 1.0) {
        return Err(Error::domain(
            "channel transmittance",
            eta_ch,
            "must lie in (0, 1]",
        ));
    }
    if !(eps >= 0.0) {
        return Err(Error::domain("excess noise", eps, "must be >= 0"));
    }
    let t = eta_ch;
    let v = params.v_a + 1.0;
    let eta_det = eta_dmu * params.eta_bob;

    let chi_line = 1.0 / t - 1.0 + eps;
    let chi_hom = (1.0 + params.v_el) / eta_det - 1.0;
    let chi_tot = chi_line + chi_hom / t;

    let i_ab = 0.5 * ((v + chi_tot) / (1.0 + chi_tot)).log2();

    let a = v * v * (1.0 - 2.0 * t) + 2.0 * t + t * t * (v + chi_line).powi(2);
    let b = (t * (v * chi_line + 1.0)).powi(2);
    let sqrt_b = b.sqrt();
    let denom = t * (v + chi_tot);
    let c = (v * sqrt_b + t * (v + chi_line) + a * chi_hom) / denom;
    let d = sqrt_b * (v + sqrt_b * chi_hom) / denom;

    let (s1, s2) = root_pair("A^2 - 4B", a, b)?;
    let (s3, s4) = root_pair("C^2 - 4D", c, d)?;
    let sigma = [s1.sqrt(), s2.sqrt(), s3.sqrt(), s4.sqrt()];

    let g = |s: f64| theta((s - 1.0) / 2.0);
    let chi_be = g(sigma[0])? + g(sigma[1])? - g(sigma[2])? - g(sigma[3])?;

    let rate = (params.gamma * i_ab - chi_be).max(0.0);

    Ok(GmcsPoint {
        z_km,
        eta_ch,
        eps,
        chi_line,
        chi_hom,
        chi_tot,
        i_ab,
        chi_be,
        spectrum: SymplecticSpectrum { a, b, c, d, sigma },
        rate,
    })
}

/// GMCS point at `link.fiber_length_km`, including the multiplexing noise of
/// the link. Noise windows are evaluated over `gate_window_s`; the result does
/// not depend on it.
pub fn gmcs_link_point(
    link: &LinkParams,
    comp: &ComponentParams,
    params: &GmcsParams,
    gate_window_s: f64,
) -> Result<(NoiseBudget, GmcsPoint)> {
    params.validate()?;
    let budget = NoiseBudget::compute(link, comp, gate_window_s, Some(&params.receiver()))?;
    let mut eps = total_excess_noise(
        params.eps0,
        budget.eps_in,
        budget.eta_ch,
        comp.eta_dmu,
        params.eta_bob,
        params.sigma_meas,
        params.conservative,
    )?;
    if params.strict_eps_out {
        eps += budget.eps_out / (budget.eta_ch * comp.eta_dmu * params.eta_bob);
    }
    let point = gmcs_point(
        link.fiber_length_km,
        budget.eta_ch,
        comp.eta_dmu,
        params,
        eps,
    )?;
    Ok((budget, point))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn theta_examples() {
        assert_eq!(theta(0.0).unwrap(), 0.0);
        assert_relative_eq!(theta(1.0).unwrap(), 2.0, max_relative = 1e-15);
        assert_relative_eq!(theta(0.5).unwrap(), 1.377_443_751, max_relative = 1e-9);
        assert_eq!(theta(-1e-12).unwrap(), 0.0);
        assert!(theta(-1e-3).is_err());
        assert!(theta(f64::NAN).is_err());
    }

    #[test]
    fn theta_shape_on_grid() {
        let h = 1e-3;
        let xs: Vec<f64> = (1..2000).map(|i| f64::from(i) * 0.01).collect();
        for &x in &xs {
            let f = theta(x).unwrap();
            let up = theta(x + h).unwrap();
            let down = theta(x - h).unwrap();
            assert!(f > 0.0);
            assert!(up > f, "not increasing at {x}");
            assert!(up + down - 2.0 * f <= 0.0, "not concave at {x}");
        }
    }

    #[test]
    fn excess_noise_examples() {
        assert_eq!(
            total_excess_noise(0.01, 0.0, 0.5, 0.7, 0.6, 0.1, false).unwrap(),
            0.01
        );
        let eta_ch = crate::noise::channel_transmittance(20.0, 0.21).unwrap();
        let eps = total_excess_noise(0.01, 2.2e-3, eta_ch, 0.71, 0.6, 0.024, false).unwrap();
        assert!((eps - 0.0236).abs() < 2e-4, "{eps}");
        let cons = total_excess_noise(0.01, 2.2e-3, eta_ch, 0.71, 0.6, 0.024, true).unwrap();
        assert!((cons - 0.172).abs() < 2e-3, "{cons}");
        assert!(total_excess_noise(0.01, 0.0, 0.0, 0.7, 0.6, 0.0, false).is_err());
    }

    #[test]
    fn lossless_noiseless_channel() {
        let params = GmcsParams {
            v_el: 0.0,
            eta_bob: 1.0,
            ..GmcsParams::default()
        };
        let p = gmcs_point(0.0, 1.0, 1.0, &params, 0.0).unwrap();
        assert_eq!(p.chi_tot, 0.0);
        assert_relative_eq!(p.i_ab, 0.5 * 11f64.log2(), max_relative = 1e-14);
        assert!(p.chi_be.abs() < 1e-9);
        assert_relative_eq!(p.rate, 0.9 * 0.5 * 11f64.log2(), max_relative = 1e-8);
    }

    #[test]
    fn vieta_relations_hold() {
        for &(t, eps, v_el) in &[(0.9, 0.01, 0.01), (0.38, 0.0236, 0.01), (0.05, 0.2, 0.1)] {
            let params = GmcsParams {
                v_el,
                ..GmcsParams::default()
            };
            let p = gmcs_point(0.0, t, 0.71, &params, eps).unwrap();
            let s = p.spectrum;
            let sq: Vec<f64> = s.sigma.iter().map(|x| x * x).collect();
            assert_relative_eq!(sq[0] * sq[1], s.b, max_relative = 1e-9);
            assert_relative_eq!(sq[0] + sq[1], s.a, max_relative = 1e-9);
            assert_relative_eq!(sq[2] * sq[3], s.d, max_relative = 1e-9);
            assert_relative_eq!(sq[2] + sq[3], s.c, max_relative = 1e-9);
        }
    }

    #[test]
    fn rate_reported_as_exact_zero_when_insecure() {
        let p = gmcs_point(0.0, 0.01, 0.71, &GmcsParams::default(), 0.5).unwrap();
        assert_eq!(p.rate, 0.0);
        assert!(0.9 * p.i_ab - p.chi_be < 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let params = GmcsParams::default();
        assert!(gmcs_point(0.0, 0.0, 0.71, &params, 0.01).is_err());
        assert!(gmcs_point(0.0, 0.5, 0.71, &params, -0.01).is_err());
        let bad = GmcsParams {
            gamma: 1.2,
            ..GmcsParams::default()
        };
        assert!(gmcs_point(0.0, 0.5, 0.71, &bad, 0.01).is_err());
    }

    #[test]
    fn discriminant_slack() {
        assert_eq!(root_pair("x", 2.0, 1.0 + 1e-12).unwrap(), (1.0, 1.0));
        assert!(matches!(
            root_pair("x", 2.0, 1.1),
            Err(Error::Physicality { .. })
        ));
    }
}
