//! Physical constants and the dB/linear boundary.
//!
//! Everything inside the crate is linear SI; these helpers are the only
//! place decibels are converted.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Planck constant (J·s).
pub const PLANCK: f64 = 6.626_070_15e-34;

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Rounded energy of a 1550 nm photon used in published bench arithmetic.
pub const PHOTON_ENERGY_1550NM: f64 = 1.28e-19;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    1e-3 * db_to_linear(dbm)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    linear_to_db(watts / 1e-3)
}

/// hν for a vacuum wavelength given in metres.
pub fn photon_energy(wavelength_m: f64) -> Result<f64> {
    if !(wavelength_m > 0.0) {
        return Err(Error::domain(
            "wavelength",
            wavelength_m,
            "must be positive",
        ));
    }
    Ok(PLANCK * SPEED_OF_LIGHT / wavelength_m)
}

/// How photon energies are obtained when converting powers to photon fluxes.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum PhotonEnergyModel {
    /// hc/λ from the channel wavelength.
    #[default]
    FromWavelength,
    /// One fixed value for every channel (J).
    Fixed(f64),
}

impl PhotonEnergyModel {
    pub fn energy(&self, wavelength_nm: f64) -> Result<f64> {
        match *self {
            PhotonEnergyModel::FromWavelength => photon_energy(wavelength_nm * 1e-9),
            PhotonEnergyModel::Fixed(e) if e > 0.0 => Ok(e),
            PhotonEnergyModel::Fixed(e) => {
                Err(Error::domain("photon energy", e, "must be positive"))
            }
        }
    }
}
