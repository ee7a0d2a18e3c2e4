//! Noise photons leaking into a quantum channel from co-propagating classical
//! DWDM channels.
//!
//! Three sources are tracked, each evaluated at a fixed reference point of the
//! link (A: MUX output on Alice's side, B: fiber output, C: DEMUX output on
//! Bob's side):
//!
//! - in-band amplified spontaneous emission from the classical-side EDFA,
//!   filtered by the MUX (point A),
//! - classical power leaking through the finite DEMUX isolation (point C),
//! - spontaneous anti-Stokes Raman scattering generated along the fiber
//!   (point C).
//!
//! These are then projected onto what each receiver type actually sees: photons
//! per single-photon-detector gate, photons in the local-oscillator mode of a
//! homodyne detector, and photons in the unmatched modes of its integration
//! window.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{self, PhotonEnergyModel, PLANCK, SPEED_OF_LIGHT};

/// Fiber span and classical traffic sharing it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkParams {
    pub fiber_length_km: f64,
    pub alpha_db_per_km: f64,
    /// Spontaneous Raman scattering coefficient, (km·nm)⁻¹.
    pub beta_raman: f64,
    pub classical_channel_count: u32,
    /// Classical power per channel at the fiber output (W).
    pub p_out_w: f64,
    pub lambda_quantum_nm: f64,
    pub lambda_classical_nm: f64,
    pub photon_energy: PhotonEnergyModel,
}

impl Default for LinkParams {
    fn default() -> Self {
        LinkParams {
            fiber_length_km: 0.0,
            alpha_db_per_km: 0.21,
            beta_raman: 4e-9,
            classical_channel_count: 1,
            p_out_w: 1e-3,
            lambda_quantum_nm: 1550.0,
            lambda_classical_nm: 1551.6,
            photon_energy: PhotonEnergyModel::FromWavelength,
        }
    }
}

impl LinkParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.fiber_length_km >= 0.0) {
            return Err(Error::domain(
                "fiber length",
                self.fiber_length_km,
                "must be >= 0",
            ));
        }
        if !(self.alpha_db_per_km >= 0.0) {
            return Err(Error::domain(
                "attenuation",
                self.alpha_db_per_km,
                "must be >= 0",
            ));
        }
        if !(self.beta_raman >= 0.0) {
            return Err(Error::domain(
                "Raman coefficient",
                self.beta_raman,
                "must be >= 0",
            ));
        }
        if !(self.p_out_w >= 0.0) {
            return Err(Error::domain(
                "classical output power",
                self.p_out_w,
                "must be >= 0",
            ));
        }
        if !(self.lambda_quantum_nm > 0.0) {
            return Err(Error::domain(
                "quantum wavelength",
                self.lambda_quantum_nm,
                "must be > 0",
            ));
        }
        if !(self.lambda_classical_nm > self.lambda_quantum_nm) {
            return Err(Error::domain(
                "classical wavelength",
                self.lambda_classical_nm,
                "must be longer than the quantum wavelength",
            ));
        }
        Ok(())
    }

    pub fn at_distance(&self, z_km: f64) -> LinkParams {
        LinkParams {
            fiber_length_km: z_km,
            ..self.clone()
        }
    }

    pub fn transmittance(&self) -> Result<f64> {
        channel_transmittance(self.fiber_length_km, self.alpha_db_per_km)
    }
}

/// EDFA gain setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GainPolicy {
    Fixed(f64),
    /// G = g0 / η_ch, keeping the fiber-output power constant as the span grows.
    Schedule {
        g0: f64,
    },
}

impl GainPolicy {
    pub fn resolve(&self, eta_ch: f64) -> Result<f64> {
        let g = match *self {
            GainPolicy::Fixed(g) => g,
            GainPolicy::Schedule { g0 } => {
                if !(eta_ch > 0.0) {
                    return Err(Error::domain(
                        "channel transmittance",
                        eta_ch,
                        "must be > 0",
                    ));
                }
                g0 / eta_ch
            }
        };
        if !(g >= 1.0) {
            return Err(Error::domain("EDFA gain", g, "must be >= 1"));
        }
        Ok(g)
    }
}

/// Which NF → n_sp relation to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NspConvention {
    /// n_sp = NF / 2.
    HighGain,
    /// n_sp = (NF·G − 1) / (2(G − 1)).
    Exact,
}

/// Whether the quantum channel sits next to a classical channel on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Adjacency {
    NonAdjacent,
    Adjacent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentParams {
    /// EDFA noise figure (linear).
    pub nf: f64,
    pub gain: GainPolicy,
    pub nsp_convention: NspConvention,
    /// MUX isolation toward the quantum port, non-adjacent channels (linear).
    pub xi1: f64,
    /// DEMUX isolation toward the quantum port, non-adjacent channels (linear).
    pub xi2: f64,
    /// MUX/DEMUX isolation between adjacent channels (linear).
    pub xi_adjacent: f64,
    pub eta_mux: f64,
    pub eta_dmu: f64,
    /// 3 dB channel bandwidth (Hz).
    pub delta_nu_hz: f64,
}

impl Default for ComponentParams {
    fn default() -> Self {
        ComponentParams {
            nf: 4.0,
            gain: GainPolicy::Schedule { g0: 100.0 },
            nsp_convention: NspConvention::HighGain,
            xi1: 1e-8,
            xi2: 1e-8,
            xi_adjacent: 1e-4,
            eta_mux: 0.71,
            eta_dmu: 0.71,
            delta_nu_hz: 75e9,
        }
    }
}

impl ComponentParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.nf >= 1.0) {
            return Err(Error::domain(
                "noise figure",
                self.nf,
                "linear NF must be >= 1",
            ));
        }
        for (what, v) in [
            ("MUX transmittance", self.eta_mux),
            ("DEMUX transmittance", self.eta_dmu),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::domain(what, v, "must lie in (0, 1]"));
            }
        }
        for (what, v) in [
            ("MUX isolation", self.xi1),
            ("DEMUX isolation", self.xi2),
            ("adjacent isolation", self.xi_adjacent),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::domain(what, v, "must lie in [0, 1]"));
            }
        }
        if !(self.delta_nu_hz > 0.0) {
            return Err(Error::domain(
                "channel bandwidth",
                self.delta_nu_hz,
                "must be > 0",
            ));
        }
        match self.gain {
            GainPolicy::Fixed(g) if !(g >= 1.0) => {
                Err(Error::domain("EDFA gain", g, "must be >= 1"))
            }
            GainPolicy::Schedule { g0 } if !(g0 >= 1.0) => {
                Err(Error::domain("EDFA gain schedule g0", g0, "must be >= 1"))
            }
            _ => Ok(()),
        }
    }

    /// Copy with both isolations set for the given adjacency class.
    pub fn with_adjacency(&self, adjacency: Adjacency) -> ComponentParams {
        match adjacency {
            Adjacency::NonAdjacent => self.clone(),
            Adjacency::Adjacent => ComponentParams {
                xi1: self.xi_adjacent,
                xi2: self.xi_adjacent,
                ..self.clone()
            },
        }
    }
}

/// The parts of a homodyne receiver that decide how noise photons turn into
/// excess noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomodyneReceiver {
    pub eta_bob: f64,
    /// Local-oscillator photons per pulse.
    pub n_lo: f64,
    pub bandwidth_hz: f64,
}

pub fn channel_transmittance(z_km: f64, alpha_db_per_km: f64) -> Result<f64> {
    if !(z_km >= 0.0) {
        return Err(Error::domain("fiber length", z_km, "must be >= 0"));
    }
    if !(alpha_db_per_km >= 0.0) {
        return Err(Error::domain(
            "attenuation",
            alpha_db_per_km,
            "must be >= 0",
        ));
    }
    Ok(units::db_to_linear(-alpha_db_per_km * z_km))
}

/// Exact inversion of NF = (1 + 2 n_sp (G − 1)) / G.
pub fn nsp_from_nf(nf: f64, gain: f64) -> Result<f64> {
    if !(gain > 1.0) {
        return Err(Error::domain("EDFA gain", gain, "exact n_sp needs G > 1"));
    }
    if !(nf >= 1.0) {
        return Err(Error::domain("noise figure", nf, "linear NF must be >= 1"));
    }
    Ok((nf * gain - 1.0) / (2.0 * (gain - 1.0)))
}

pub fn nsp_high_gain(nf: f64) -> f64 {
    nf / 2.0
}

pub fn spontaneous_emission_factor(nf: f64, gain: f64, convention: NspConvention) -> Result<f64> {
    match convention {
        NspConvention::HighGain => Ok(nsp_high_gain(nf)),
        NspConvention::Exact => nsp_from_nf(nf, gain),
    }
}

/// ASE photons per spatiotemporal mode, both polarizations.
pub fn ase_per_mode(n_sp: f64, gain: f64) -> Result<f64> {
    if !(n_sp >= 1.0) {
        return Err(Error::domain(
            "n_sp",
            n_sp,
            "below the spontaneous-emission limit of 1",
        ));
    }
    if !(gain >= 1.0) {
        return Err(Error::domain("EDFA gain", gain, "must be >= 1"));
    }
    Ok(2.0 * n_sp * (gain - 1.0))
}

/// In-band ASE surviving the MUX, per mode at point A.
pub fn ase_after_mux(n_ase_per_mode: f64, xi1: f64) -> f64 {
    xi1 * n_ase_per_mode
}

/// Optical power (dBm) carried by `n_ase_per_mode` photons per mode across a
/// band `delta_nu_hz`, after an insertion loss.
pub fn ase_band_power_dbm(
    n_ase_per_mode: f64,
    delta_nu_hz: f64,
    photon_energy_j: f64,
    insertion_loss_db: f64,
) -> Result<f64> {
    if !(n_ase_per_mode > 0.0) {
        return Err(Error::domain(
            "ASE photon number",
            n_ase_per_mode,
            "must be > 0",
        ));
    }
    if !(delta_nu_hz > 0.0) || !(photon_energy_j > 0.0) {
        return Err(Error::domain(
            "bandwidth / photon energy",
            delta_nu_hz.min(photon_energy_j),
            "must be > 0",
        ));
    }
    let watts =
        n_ase_per_mode * delta_nu_hz * photon_energy_j * units::db_to_linear(-insertion_loss_db);
    Ok(units::watts_to_dbm(watts))
}

/// Classical photons per second leaking through the DEMUX (point C).
pub fn leakage_rate(p_out_w: f64, xi2: f64, photon_energy_j: f64) -> f64 {
    if p_out_w == 0.0 || xi2 == 0.0 {
        return 0.0;
    }
    xi2 * p_out_w / photon_energy_j
}

/// Anti-Stokes Raman power (W) inside `delta_lambda_nm` at the fiber output.
pub fn sasrs_band_power(p_out_w: f64, beta: f64, z_km: f64, delta_lambda_nm: f64) -> f64 {
    p_out_w * beta * z_km * delta_lambda_nm
}

/// Anti-Stokes Raman photons per mode at the DEMUX output.
///
/// The band width cancels between power and mode count, leaving
/// λ³/(hc²)·P_out·β·z·η_DMU. β is per nanometre, hence the 1e9 to bring it to
/// per metre alongside λ in metres.
pub fn sasrs_per_mode(p_out_w: f64, beta: f64, z_km: f64, eta_dmu: f64, lambda_m: f64) -> f64 {
    let beta_per_km_m = beta * 1e9;
    lambda_m.powi(3) / (PLANCK * SPEED_OF_LIGHT * SPEED_OF_LIGHT)
        * p_out_w
        * beta_per_km_m
        * z_km
        * eta_dmu
}

pub fn mode_count(delta_nu_hz: f64, delta_t_s: f64) -> f64 {
    delta_nu_hz * delta_t_s
}

/// Photons per detection window, split by source.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct WindowNoise {
    pub ase: f64,
    pub leak: f64,
    pub sasrs: f64,
}

impl WindowNoise {
    pub fn total(&self) -> f64 {
        self.ase + self.leak + self.sasrs
    }
}

/// Noise photons reaching Bob inside one gate of length `delta_t_s`.
pub fn spd_window_noise(
    n_ase_at_a: f64,
    n_leak_per_s: f64,
    n_sasrs_at_c: f64,
    eta_ch: f64,
    eta_dmu: f64,
    delta_nu_hz: f64,
    delta_t_s: f64,
) -> WindowNoise {
    let modes = mode_count(delta_nu_hz, delta_t_s);
    WindowNoise {
        ase: modes * eta_ch * eta_dmu * n_ase_at_a,
        leak: n_leak_per_s * delta_t_s,
        sasrs: modes * n_sasrs_at_c,
    }
}

/// Noise photons in the LO mode and the excess noise (shot-noise units, at
/// Bob) they produce. Inputs are per classical channel; `m` channels add up.
pub fn gmcs_matched_noise(
    n_ase_at_a: f64,
    n_sasrs_at_c: f64,
    eta_ch: f64,
    eta_dmu: f64,
    m: u32,
    eta_bob: f64,
) -> (f64, f64) {
    // Half the photons share the LO polarization; a thermal state of mean n
    // has quadrature variance 2n + 1.
    let n_in = 0.5 * f64::from(m) * (eta_ch * eta_dmu * n_ase_at_a + n_sasrs_at_c);
    (n_in, 2.0 * eta_bob * n_in)
}

/// Integration time of a homodyne detector with the given electrical bandwidth.
pub fn homodyne_integration_time(bandwidth_hz: f64) -> f64 {
    1.0 / (2.0 * std::f64::consts::PI * bandwidth_hz)
}

/// Photons in the modes the LO does not select, and their excess noise
/// (Poissonian, normalized by the LO photon number).
pub fn gmcs_unmatched_noise(
    n_spd_window: f64,
    delta_t_s: f64,
    receiver: &HomodyneReceiver,
) -> Result<(f64, f64)> {
    if !(receiver.bandwidth_hz > 0.0) {
        return Err(Error::domain(
            "detector bandwidth",
            receiver.bandwidth_hz,
            "must be > 0",
        ));
    }
    if !(receiver.n_lo > 0.0) {
        return Err(Error::domain(
            "LO photon number",
            receiver.n_lo,
            "must be > 0",
        ));
    }
    if !(delta_t_s > 0.0) {
        return Err(Error::domain("gate window", delta_t_s, "must be > 0"));
    }
    let n_out = homodyne_integration_time(receiver.bandwidth_hz) / delta_t_s * n_spd_window;
    Ok((n_out, receiver.eta_bob * n_out / receiver.n_lo))
}

/// Everything the noise model produces at one fiber length.
///
/// Photon numbers are totals over all classical channels.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseBudget {
    pub z_km: f64,
    pub eta_ch: f64,
    pub gain: f64,
    pub n_ase_per_mode_at_a: f64,
    pub n_leak_per_s_at_c: f64,
    pub n_sasrs_per_mode_at_c: f64,
    pub window: WindowNoise,
    pub n_spd_window: f64,
    pub n_gmcs_matched: f64,
    pub n_gmcs_unmatched: f64,
    pub eps_in: f64,
    pub eps_out: f64,
}

impl NoiseBudget {
    /// Evaluate at `link.fiber_length_km`. Without a homodyne receiver the
    /// unmatched-mode count and both excess-noise terms are left at zero.
    pub fn compute(
        link: &LinkParams,
        comp: &ComponentParams,
        gate_window_s: f64,
        receiver: Option<&HomodyneReceiver>,
    ) -> Result<NoiseBudget> {
        link.validate()?;
        comp.validate()?;
        if !(gate_window_s > 0.0) {
            return Err(Error::domain("gate window", gate_window_s, "must be > 0"));
        }

        let z = link.fiber_length_km;
        let m = link.classical_channel_count;
        let channels = f64::from(m);
        let eta_ch = link.transmittance()?;
        let gain = comp.gain.resolve(eta_ch)?;

        let n_sp = if gain > 1.0 {
            spontaneous_emission_factor(comp.nf, gain, comp.nsp_convention)?
        } else {
            nsp_high_gain(comp.nf).max(1.0)
        };
        let ase_a = ase_after_mux(ase_per_mode(n_sp, gain)?, comp.xi1);
        let leak = leakage_rate(
            link.p_out_w,
            comp.xi2,
            link.photon_energy.energy(link.lambda_classical_nm)?,
        );
        let sasrs = sasrs_per_mode(
            link.p_out_w,
            link.beta_raman,
            z,
            comp.eta_dmu,
            link.lambda_quantum_nm * 1e-9,
        );

        let per_channel = spd_window_noise(
            ase_a,
            leak,
            sasrs,
            eta_ch,
            comp.eta_dmu,
            comp.delta_nu_hz,
            gate_window_s,
        );
        let window = WindowNoise {
            ase: channels * per_channel.ase,
            leak: channels * per_channel.leak,
            sasrs: channels * per_channel.sasrs,
        };
        let n_spd_window = window.total();

        let (n_gmcs_matched, eps_in, n_gmcs_unmatched, eps_out) = match receiver {
            Some(rx) => {
                let (n_in, eps_in) =
                    gmcs_matched_noise(ase_a, sasrs, eta_ch, comp.eta_dmu, m, rx.eta_bob);
                let (n_out, eps_out) = gmcs_unmatched_noise(n_spd_window, gate_window_s, rx)?;
                (n_in, eps_in, n_out, eps_out)
            }
            None => {
                let (n_in, _) = gmcs_matched_noise(ase_a, sasrs, eta_ch, comp.eta_dmu, m, 0.0);
                (n_in, 0.0, 0.0, 0.0)
            }
        };

        Ok(NoiseBudget {
            z_km: z,
            eta_ch,
            gain,
            n_ase_per_mode_at_a: channels * ase_a,
            n_leak_per_s_at_c: channels * leak,
            n_sasrs_per_mode_at_c: channels * sasrs,
            window,
            n_spd_window,
            n_gmcs_matched,
            n_gmcs_unmatched,
            eps_in,
            eps_out,
        })
    }
}

/// One Raman calibration reading: noise power inside the measurement band at
/// the fiber output, for a known classical output power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamanSample {
    pub z_km: f64,
    pub p_out_w: f64,
    pub p_noise_w: f64,
}

/// Least-squares β for P_noise = P_out·β·z·Δλ (a line through the origin in
/// x = P_out·z·Δλ).
pub fn fit_raman_coefficient(samples: &[RamanSample], delta_lambda_nm: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Unfittable("no measurements"));
    }
    if !(delta_lambda_nm > 0.0) {
        return Err(Error::domain(
            "measurement bandwidth",
            delta_lambda_nm,
            "must be > 0",
        ));
    }
    let (sxy, sxx) = samples.iter().fold((0.0, 0.0), |(sxy, sxx), s| {
        let x = s.p_out_w * s.z_km * delta_lambda_nm;
        (sxy + x * s.p_noise_w, sxx + x * x)
    });
    if sxx == 0.0 {
        return Err(Error::Unfittable(
            "every measurement has zero fiber length or power",
        ));
    }
    Ok(sxy / sxx)
}

/// Bench geometry for backing β out of DEMUX-port power readings: a fixed
/// launch power after the MUX and a lossy DEMUX port before the power meter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamanBench {
    /// Classical power launched into the fiber (point A), W.
    pub p_in_w: f64,
    pub alpha_db_per_km: f64,
    pub demux_insertion_loss_db: f64,
    pub delta_lambda_nm: f64,
}

impl RamanBench {
    /// Power a meter behind the DEMUX would read for a given β and span.
    pub fn expected_reading(&self, beta: f64, z_km: f64) -> Result<f64> {
        let p_out = self.p_in_w * channel_transmittance(z_km, self.alpha_db_per_km)?;
        Ok(sasrs_band_power(p_out, beta, z_km, self.delta_lambda_nm)
            * units::db_to_linear(-self.demux_insertion_loss_db))
    }

    /// Fit β from (z_km, meter reading in W) pairs.
    pub fn fit(&self, readings: &[(f64, f64)]) -> Result<f64> {
        let samples = readings
            .iter()
            .map(|&(z_km, reading)| {
                Ok(RamanSample {
                    z_km,
                    p_out_w: self.p_in_w * channel_transmittance(z_km, self.alpha_db_per_km)?,
                    p_noise_w: reading / units::db_to_linear(-self.demux_insertion_loss_db),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        fit_raman_coefficient(&samples, self.delta_lambda_nm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::PHOTON_ENERGY_1550NM;
    use approx::assert_relative_eq;

    fn paper_link() -> LinkParams {
        LinkParams {
            photon_energy: PhotonEnergyModel::Fixed(PHOTON_ENERGY_1550NM),
            ..LinkParams::default()
        }
    }

    #[test]
    fn transmittance_examples() {
        assert_eq!(channel_transmittance(0.0, 0.21).unwrap(), 1.0);
        assert_relative_eq!(
            channel_transmittance(20.0, 0.21).unwrap(),
            0.380_189_396,
            max_relative = 1e-8
        );
        assert_relative_eq!(
            channel_transmittance(40.0, 0.21).unwrap(),
            0.144_543_977,
            max_relative = 1e-8
        );
        assert!(channel_transmittance(-1.0, 0.21).is_err());
        assert!(channel_transmittance(1.0, -0.21).is_err());
    }

    #[test]
    fn nsp_conventions() {
        let nf = units::db_to_linear(5.5);
        assert_relative_eq!(
            nsp_from_nf(nf, 100.0).unwrap(),
            1.786_936_309,
            max_relative = 1e-8
        );
        assert_relative_eq!(nsp_high_gain(nf), 1.774_066_946, max_relative = 1e-8);
        // high-gain identity
        assert_relative_eq!(
            nsp_from_nf(2.0 * 1.7, 1e12).unwrap(),
            1.7,
            max_relative = 1e-9
        );
        assert!(nsp_from_nf(nf, 1.0).is_err());
        assert!(nsp_from_nf(0.5, 10.0).is_err());
    }

    #[test]
    fn ase_examples() {
        assert_eq!(ase_per_mode(1.5, 1.0).unwrap(), 0.0);
        assert_eq!(ase_per_mode(1.0, 2.0).unwrap(), 2.0);
        assert_relative_eq!(
            ase_per_mode(1.774, 100.0).unwrap(),
            351.252,
            max_relative = 1e-9
        );
        assert!(ase_per_mode(0.9, 100.0).is_err());

        assert_eq!(ase_after_mux(351.2, 0.0), 0.0);
        assert_relative_eq!(ase_after_mux(351.2, 1e-8), 3.512e-6, max_relative = 1e-12);
        assert_relative_eq!(ase_after_mux(702.4, 1e-8), 7.024e-6, max_relative = 1e-12);
    }

    #[test]
    fn ase_band_power_bench() {
        let p0 = ase_band_power_dbm(351.0, 75e9, 1.28e-19, 0.0).unwrap();
        let p1 = ase_band_power_dbm(351.0, 75e9, 1.28e-19, 0.9).unwrap();
        assert!((p0 - -24.7).abs() < 0.05, "{p0}");
        assert!((p1 - -25.6).abs() < 0.05, "{p1}");
        assert!(ase_band_power_dbm(0.0, 75e9, 1.28e-19, 0.0).is_err());
    }

    #[test]
    fn leakage_examples() {
        assert_eq!(leakage_rate(0.0, 1e-8, 1.28e-19), 0.0);
        assert_relative_eq!(
            leakage_rate(1e-3, 1e-8, 1.28e-19),
            7.8125e7,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            leakage_rate(1e-3, 1e-4, 1.28e-19),
            7.8125e11,
            max_relative = 1e-12
        );
    }

    #[test]
    fn sasrs_examples() {
        assert_eq!(sasrs_band_power(1e-3, 4e-9, 0.0, 0.6), 0.0);
        assert_relative_eq!(
            sasrs_band_power(2.511_886e-3, 2.85e-9, 20.0, 0.6),
            8.590_65e-11,
            max_relative = 1e-5
        );
        assert_relative_eq!(
            sasrs_band_power(1e-3, 4e-9, 20.0, 0.6),
            4.8e-11,
            max_relative = 1e-12
        );

        assert_eq!(sasrs_per_mode(1e-3, 4e-9, 0.0, 0.71, 1.55e-6), 0.0);
        let twenty = sasrs_per_mode(1e-3, 4e-9, 20.0, 0.71, 1.55e-6);
        let ten = sasrs_per_mode(1e-3, 4e-9, 10.0, 0.71, 1.55e-6);
        assert!((twenty - 3.55e-3).abs() < 0.01e-3, "{twenty}");
        assert_relative_eq!(ten, twenty / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn mode_count_examples() {
        assert_relative_eq!(mode_count(75e9, 1e-9), 75.0, max_relative = 1e-14);
        assert_relative_eq!(mode_count(75e9, 1.0 / 75e9), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn window_noise_at_twenty_km() {
        let budget = NoiseBudget::compute(
            &paper_link().at_distance(20.0),
            &ComponentParams::default(),
            1e-9,
            None,
        )
        .unwrap();
        assert!((budget.n_spd_window - 0.345).abs() < 0.005, "{budget:?}");
        assert!(budget.window.sasrs > budget.window.leak);
        assert_eq!(budget.n_spd_window, budget.window.total());
    }

    #[test]
    fn zero_everything_gives_zero_budget() {
        let link = LinkParams {
            p_out_w: 0.0,
            classical_channel_count: 0,
            ..paper_link().at_distance(30.0)
        };
        let comp = ComponentParams {
            gain: GainPolicy::Fixed(1.0),
            ..ComponentParams::default()
        };
        let rx = HomodyneReceiver {
            eta_bob: 0.6,
            n_lo: 1e8,
            bandwidth_hz: 1e6,
        };
        let b = NoiseBudget::compute(&link, &comp, 1e-9, Some(&rx)).unwrap();
        assert_eq!(b.n_spd_window, 0.0);
        assert_eq!(b.eps_in, 0.0);
        assert_eq!(b.eps_out, 0.0);
        assert_eq!(b.n_ase_per_mode_at_a, 0.0);
    }

    #[test]
    fn matched_mode_examples() {
        let (n, eps) = gmcs_matched_noise(3.5e-6, 3.55e-3, 0.38, 0.71, 0, 0.6);
        assert_eq!((n, eps), (0.0, 0.0));

        let rx = HomodyneReceiver {
            eta_bob: 0.6,
            n_lo: 1e8,
            bandwidth_hz: 1e6,
        };
        let b = NoiseBudget::compute(
            &paper_link().at_distance(20.0),
            &ComponentParams::default(),
            1e-9,
            Some(&rx),
        )
        .unwrap();
        assert!(
            (b.n_gmcs_matched - 1.78e-3).abs() < 0.02e-3,
            "{}",
            b.n_gmcs_matched
        );
        assert!((b.eps_in - 2.14e-3).abs() < 0.03e-3, "{}", b.eps_in);

        let link38 = LinkParams {
            classical_channel_count: 38,
            ..paper_link().at_distance(10.0)
        };
        let b38 =
            NoiseBudget::compute(&link38, &ComponentParams::default(), 1e-9, Some(&rx)).unwrap();
        assert!((b38.eps_in - 4.1e-2).abs() < 0.1e-2, "{}", b38.eps_in);
    }

    #[test]
    fn unmatched_mode_examples() {
        let rx = HomodyneReceiver {
            eta_bob: 0.6,
            n_lo: 1e8,
            bandwidth_hz: 1e6,
        };
        assert_eq!(gmcs_unmatched_noise(0.0, 1e-9, &rx).unwrap(), (0.0, 0.0));
        assert!((homodyne_integration_time(1e6) - 0.159e-6).abs() < 0.001e-6);
        let (n_out, eps_out) = gmcs_unmatched_noise(1.0, 1e-9, &rx).unwrap();
        assert!((n_out - 159.15).abs() < 0.01);
        assert!(eps_out > 1e-7 && eps_out < 1e-5);
        let bad = HomodyneReceiver {
            bandwidth_hz: 0.0,
            ..rx
        };
        assert!(gmcs_unmatched_noise(1.0, 1e-9, &bad).is_err());
    }

    #[test]
    fn raman_fit_inverts_single_point() {
        let p_noise = sasrs_band_power(1e-3, 4e-9, 25.0, 0.6);
        let beta = fit_raman_coefficient(
            &[RamanSample {
                z_km: 25.0,
                p_out_w: 1e-3,
                p_noise_w: p_noise,
            }],
            0.6,
        )
        .unwrap();
        assert_relative_eq!(beta, 4e-9, max_relative = 1e-12);
    }

    #[test]
    fn raman_fit_rejects_degenerate_input() {
        assert!(matches!(
            fit_raman_coefficient(&[], 0.6),
            Err(Error::Unfittable(_))
        ));
        let at_zero = [RamanSample {
            z_km: 0.0,
            p_out_w: 1e-3,
            p_noise_w: 1e-12,
        }];
        assert!(matches!(
            fit_raman_coefficient(&at_zero, 0.6),
            Err(Error::Unfittable(_))
        ));
    }

    #[test]
    fn validation_rejects_bad_params() {
        let link = LinkParams {
            lambda_classical_nm: 1549.0,
            ..LinkParams::default()
        };
        assert!(link.validate().is_err());
        let comp = ComponentParams {
            eta_dmu: 1.5,
            ..ComponentParams::default()
        };
        assert!(comp.validate().is_err());
        let comp = ComponentParams {
            xi1: -0.1,
            ..ComponentParams::default()
        };
        assert!(comp.validate().is_err());
        let comp = ComponentParams {
            nf: 0.9,
            ..ComponentParams::default()
        };
        assert!(comp.validate().is_err());
    }

    #[test]
    fn adjacency_overrides_isolation() {
        let comp = ComponentParams::default().with_adjacency(Adjacency::Adjacent);
        assert_eq!((comp.xi1, comp.xi2), (1e-4, 1e-4));
        let comp = ComponentParams::default().with_adjacency(Adjacency::NonAdjacent);
        assert_eq!((comp.xi1, comp.xi2), (1e-8, 1e-8));
    }
}
