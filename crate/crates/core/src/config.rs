//! Sectioned key-value configuration (TOML syntax).
//!
//! ```toml
//! [link]
//! alpha_db_per_km = 0.21
//! p_out_dbm = 0.0
//!
//! [components]
//! nf_db = 6.0
//! xi1_db = -80.0
//!
//! [gmcs]
//! v_el = 0.01
//! ```
//!
//! Missing keys fall back to the library defaults, unknown keys are rejected,
//! and `*_db` / `*_dbm` keys are converted to linear units here and nowhere
//! else.

use serde::{Deserialize, Serialize};

use crate::bb84::Bb84Params;
use crate::error::{Error, Result};
use crate::gmcs::GmcsParams;
use crate::noise::{Adjacency, ComponentParams, GainPolicy, LinkParams, NspConvention};
use crate::scenario::{self, Detector, ParameterSet, Protocol, Scenario};
use crate::units::{db_to_linear, dbm_to_watts, linear_to_db, watts_to_dbm, PhotonEnergyModel};

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    link: LinkSection,
    #[serde(default)]
    components: ComponentSection,
    #[serde(default)]
    bb84: Bb84Section,
    #[serde(default)]
    gmcs: GmcsSection,
    #[serde(default)]
    scenario: ScenarioSection,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct LinkSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    fiber_length_km: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha_db_per_km: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta_raman_per_km_nm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    classical_channel_count: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p_out_dbm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda_quantum_nm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda_classical_nm: Option<f64>,
    /// Fixed photon energy; absent means hc/λ.
    #[serde(skip_serializing_if = "Option::is_none")]
    photon_energy_j: Option<f64>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct ComponentSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    nf_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gain_schedule_g0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gain_fixed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nsp_convention: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    xi1_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    xi2_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    xi_adjacent_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eta_mux: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eta_dmu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta_nu_ghz: Option<f64>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct Bb84Section {
    #[serde(skip_serializing_if = "Option::is_none")]
    mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    y0_base: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    e_det: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    e0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eta_bob: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    f_ec: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gate_window_ns: Option<f64>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct GmcsSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    v_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eta_bob: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eps0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    v_el: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_lo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    detector_bandwidth_mhz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma_meas: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    conservative: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    strict_eps_out: Option<bool>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct ScenarioSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    protocol: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    adjacency: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    z_min_km: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    z_max_km: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    z_step_km: Option<f64>,
}

/// The `[scenario]` section: a user-defined sweep over the configured
/// parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSettings {
    pub name: String,
    pub protocol: Protocol,
    pub adjacency: Adjacency,
    pub z_min_km: f64,
    pub z_max_km: f64,
    pub z_step_km: f64,
}

impl Default for ScenarioSettings {
    fn default() -> Self {
        ScenarioSettings {
            name: "custom".into(),
            protocol: Protocol::Gmcs,
            adjacency: Adjacency::NonAdjacent,
            z_min_km: 0.0,
            z_max_km: 80.0,
            z_step_km: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Config {
    pub params: ParameterSet,
    pub scenario: ScenarioSettings,
}

impl Config {
    /// Scenario described by the `[scenario]` section.
    pub fn custom_scenario(&self) -> Result<Scenario> {
        let s = &self.scenario;
        let detector = match s.protocol {
            Protocol::Bb84 => Detector::Bb84(self.params.bb84.clone()),
            Protocol::Gmcs => Detector::Gmcs(self.params.gmcs.clone()),
        };
        Ok(Scenario {
            name: s.name.clone(),
            link: self.params.link.clone(),
            comp: self.params.comp.clone(),
            detector,
            adjacency: s.adjacency,
            z_grid: scenario::z_grid(s.z_min_km, s.z_max_km, s.z_step_km)?,
        })
    }

    pub fn to_toml(&self) -> String {
        let file = ConfigFile::from_config(self);
        toml::to_string(&file).expect("config sections serialize")
    }
}

fn key_error(key: &str, message: impl Into<String>) -> Error {
    Error::Config {
        key: key.to_string(),
        message: message.into(),
    }
}

struct Checker;

impl Checker {
    fn at_least(key: &str, v: f64, min: f64) -> Result<f64> {
        if v.is_finite() && v >= min {
            Ok(v)
        } else {
            Err(key_error(
                key,
                format!("{v} is out of range (must be >= {min})"),
            ))
        }
    }

    fn positive(key: &str, v: f64) -> Result<f64> {
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(key_error(key, format!("{v} is out of range (must be > 0)")))
        }
    }

    fn unit_closed(key: &str, v: f64) -> Result<f64> {
        if (0.0..=1.0).contains(&v) {
            Ok(v)
        } else {
            Err(key_error(
                key,
                format!("{v} is out of range (must lie in [0, 1])"),
            ))
        }
    }

    fn transmittance(key: &str, v: f64) -> Result<f64> {
        if v > 0.0 && v <= 1.0 {
            Ok(v)
        } else {
            Err(key_error(
                key,
                format!("{v} is out of range (must lie in (0, 1])"),
            ))
        }
    }

    fn isolation_db(key: &str, db: f64) -> Result<f64> {
        if db.is_finite() && db <= 0.0 {
            Ok(db_to_linear(db))
        } else {
            Err(key_error(
                key,
                format!("{db} dB is out of range (isolation must be <= 0 dB)"),
            ))
        }
    }

    fn finite(key: &str, v: f64) -> Result<f64> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(key_error(key, format!("{v} is not a finite number")))
        }
    }
}

impl ConfigFile {
    fn into_config(self) -> Result<Config> {
        let d = ParameterSet::default();
        let l = self.link;
        let link = LinkParams {
            fiber_length_km: l
                .fiber_length_km
                .map(|v| Checker::at_least("link.fiber_length_km", v, 0.0))
                .transpose()?
                .unwrap_or(d.link.fiber_length_km),
            alpha_db_per_km: l
                .alpha_db_per_km
                .map(|v| Checker::at_least("link.alpha_db_per_km", v, 0.0))
                .transpose()?
                .unwrap_or(d.link.alpha_db_per_km),
            beta_raman: l
                .beta_raman_per_km_nm
                .map(|v| Checker::at_least("link.beta_raman_per_km_nm", v, 0.0))
                .transpose()?
                .unwrap_or(d.link.beta_raman),
            classical_channel_count: match l.classical_channel_count {
                Some(m) => u32::try_from(m).map_err(|_| {
                    key_error(
                        "link.classical_channel_count",
                        format!("{m} is out of range (must be >= 0)"),
                    )
                })?,
                None => d.link.classical_channel_count,
            },
            p_out_w: l
                .p_out_dbm
                .map(|v| Checker::finite("link.p_out_dbm", v).map(dbm_to_watts))
                .transpose()?
                .unwrap_or(d.link.p_out_w),
            lambda_quantum_nm: l
                .lambda_quantum_nm
                .map(|v| Checker::positive("link.lambda_quantum_nm", v))
                .transpose()?
                .unwrap_or(d.link.lambda_quantum_nm),
            lambda_classical_nm: l
                .lambda_classical_nm
                .map(|v| Checker::positive("link.lambda_classical_nm", v))
                .transpose()?
                .unwrap_or(d.link.lambda_classical_nm),
            photon_energy: match l.photon_energy_j {
                Some(e) => PhotonEnergyModel::Fixed(Checker::positive("link.photon_energy_j", e)?),
                None => PhotonEnergyModel::FromWavelength,
            },
        };
        if link.lambda_classical_nm <= link.lambda_quantum_nm {
            return Err(key_error(
                "link.lambda_classical_nm",
                "classical channels must sit at longer wavelengths than the quantum channel",
            ));
        }

        let c = self.components;
        let gain = match (c.gain_schedule_g0, c.gain_fixed) {
            (Some(_), Some(_)) => {
                return Err(key_error(
                    "components.gain_fixed",
                    "set either gain_fixed or gain_schedule_g0, not both",
                ))
            }
            (_, Some(g)) => GainPolicy::Fixed(Checker::at_least("components.gain_fixed", g, 1.0)?),
            (Some(g0), None) => GainPolicy::Schedule {
                g0: Checker::at_least("components.gain_schedule_g0", g0, 1.0)?,
            },
            (None, None) => d.comp.gain,
        };
        let comp = ComponentParams {
            nf: match c.nf_db {
                Some(db) => {
                    let nf = db_to_linear(Checker::finite("components.nf_db", db)?);
                    Checker::at_least("components.nf_db", nf, 1.0).map_err(|_| {
                        key_error(
                            "components.nf_db",
                            format!("{db} dB is out of range (must be >= 0 dB)"),
                        )
                    })?
                }
                None => d.comp.nf,
            },
            gain,
            nsp_convention: match c.nsp_convention.as_deref() {
                None => d.comp.nsp_convention,
                Some("high-gain") => NspConvention::HighGain,
                Some("exact") => NspConvention::Exact,
                Some(other) => {
                    return Err(key_error(
                        "components.nsp_convention",
                        format!("unknown value `{other}` (expected `high-gain` or `exact`)"),
                    ))
                }
            },
            xi1: c
                .xi1_db
                .map(|v| Checker::isolation_db("components.xi1_db", v))
                .transpose()?
                .unwrap_or(d.comp.xi1),
            xi2: c
                .xi2_db
                .map(|v| Checker::isolation_db("components.xi2_db", v))
                .transpose()?
                .unwrap_or(d.comp.xi2),
            xi_adjacent: c
                .xi_adjacent_db
                .map(|v| Checker::isolation_db("components.xi_adjacent_db", v))
                .transpose()?
                .unwrap_or(d.comp.xi_adjacent),
            eta_mux: c
                .eta_mux
                .map(|v| Checker::transmittance("components.eta_mux", v))
                .transpose()?
                .unwrap_or(d.comp.eta_mux),
            eta_dmu: c
                .eta_dmu
                .map(|v| Checker::transmittance("components.eta_dmu", v))
                .transpose()?
                .unwrap_or(d.comp.eta_dmu),
            delta_nu_hz: c
                .delta_nu_ghz
                .map(|v| Checker::positive("components.delta_nu_ghz", v).map(|g| g * 1e9))
                .transpose()?
                .unwrap_or(d.comp.delta_nu_hz),
        };

        let b = self.bb84;
        let bb84 = Bb84Params {
            mu: b.mu.map(|v| Checker::positive("bb84.mu", v)).transpose()?,
            y0_base: b
                .y0_base
                .map(|v| Checker::unit_closed("bb84.y0_base", v))
                .transpose()?
                .unwrap_or(d.bb84.y0_base),
            e_det: match b.e_det {
                Some(v) if (0.0..=0.5).contains(&v) => v,
                Some(v) => {
                    return Err(key_error(
                        "bb84.e_det",
                        format!("{v} is out of range (must lie in [0, 0.5])"),
                    ))
                }
                None => d.bb84.e_det,
            },
            e0: b
                .e0
                .map(|v| Checker::unit_closed("bb84.e0", v))
                .transpose()?
                .unwrap_or(d.bb84.e0),
            eta_bob: b
                .eta_bob
                .map(|v| Checker::transmittance("bb84.eta_bob", v))
                .transpose()?
                .unwrap_or(d.bb84.eta_bob),
            f_ec: b
                .f_ec
                .map(|v| Checker::at_least("bb84.f_ec", v, 1.0))
                .transpose()?
                .unwrap_or(d.bb84.f_ec),
            delta_t_s: b
                .gate_window_ns
                .map(|v| Checker::positive("bb84.gate_window_ns", v).map(|ns| ns * 1e-9))
                .transpose()?
                .unwrap_or(d.bb84.delta_t_s),
        };

        let g = self.gmcs;
        let gmcs = GmcsParams {
            v_a: g
                .v_a
                .map(|v| Checker::positive("gmcs.v_a", v))
                .transpose()?
                .unwrap_or(d.gmcs.v_a),
            eta_bob: g
                .eta_bob
                .map(|v| Checker::transmittance("gmcs.eta_bob", v))
                .transpose()?
                .unwrap_or(d.gmcs.eta_bob),
            eps0: g
                .eps0
                .map(|v| Checker::at_least("gmcs.eps0", v, 0.0))
                .transpose()?
                .unwrap_or(d.gmcs.eps0),
            v_el: g
                .v_el
                .map(|v| Checker::at_least("gmcs.v_el", v, 0.0))
                .transpose()?
                .unwrap_or(d.gmcs.v_el),
            gamma: g
                .gamma
                .map(|v| Checker::transmittance("gmcs.gamma", v))
                .transpose()?
                .unwrap_or(d.gmcs.gamma),
            n_lo: g
                .n_lo
                .map(|v| Checker::positive("gmcs.n_lo", v))
                .transpose()?
                .unwrap_or(d.gmcs.n_lo),
            detector_bandwidth_hz: g
                .detector_bandwidth_mhz
                .map(|v| Checker::positive("gmcs.detector_bandwidth_mhz", v).map(|m| m * 1e6))
                .transpose()?
                .unwrap_or(d.gmcs.detector_bandwidth_hz),
            sigma_meas: g
                .sigma_meas
                .map(|v| Checker::at_least("gmcs.sigma_meas", v, 0.0))
                .transpose()?
                .unwrap_or(d.gmcs.sigma_meas),
            conservative: g.conservative.unwrap_or(d.gmcs.conservative),
            strict_eps_out: g.strict_eps_out.unwrap_or(d.gmcs.strict_eps_out),
        };

        let s = self.scenario;
        let ds = ScenarioSettings::default();
        let scenario = ScenarioSettings {
            name: s.name.unwrap_or(ds.name),
            protocol: match s.protocol.as_deref() {
                None => ds.protocol,
                Some("bb84") => Protocol::Bb84,
                Some("gmcs") => Protocol::Gmcs,
                Some(other) => {
                    return Err(key_error(
                        "scenario.protocol",
                        format!("unknown value `{other}` (expected `bb84` or `gmcs`)"),
                    ))
                }
            },
            adjacency: match s.adjacency.as_deref() {
                None => ds.adjacency,
                Some("non-adjacent") => Adjacency::NonAdjacent,
                Some("adjacent") => Adjacency::Adjacent,
                Some(other) => {
                    return Err(key_error(
                        "scenario.adjacency",
                        format!("unknown value `{other}` (expected `adjacent` or `non-adjacent`)"),
                    ))
                }
            },
            z_min_km: s
                .z_min_km
                .map(|v| Checker::at_least("scenario.z_min_km", v, 0.0))
                .transpose()?
                .unwrap_or(ds.z_min_km),
            z_max_km: s
                .z_max_km
                .map(|v| Checker::at_least("scenario.z_max_km", v, 0.0))
                .transpose()?
                .unwrap_or(ds.z_max_km),
            z_step_km: s
                .z_step_km
                .map(|v| Checker::positive("scenario.z_step_km", v))
                .transpose()?
                .unwrap_or(ds.z_step_km),
        };
        if scenario.z_max_km < scenario.z_min_km {
            return Err(key_error("scenario.z_max_km", "must not be below z_min_km"));
        }

        Ok(Config {
            params: ParameterSet {
                link,
                comp,
                bb84,
                gmcs,
            },
            scenario,
        })
    }

    fn from_config(cfg: &Config) -> ConfigFile {
        let p = &cfg.params;
        let (gain_schedule_g0, gain_fixed) = match p.comp.gain {
            GainPolicy::Schedule { g0 } => (Some(g0), None),
            GainPolicy::Fixed(g) => (None, Some(g)),
        };
        ConfigFile {
            link: LinkSection {
                fiber_length_km: Some(p.link.fiber_length_km),
                alpha_db_per_km: Some(p.link.alpha_db_per_km),
                beta_raman_per_km_nm: Some(p.link.beta_raman),
                classical_channel_count: Some(i64::from(p.link.classical_channel_count)),
                p_out_dbm: Some(watts_to_dbm(p.link.p_out_w)),
                lambda_quantum_nm: Some(p.link.lambda_quantum_nm),
                lambda_classical_nm: Some(p.link.lambda_classical_nm),
                photon_energy_j: match p.link.photon_energy {
                    PhotonEnergyModel::Fixed(e) => Some(e),
                    PhotonEnergyModel::FromWavelength => None,
                },
            },
            components: ComponentSection {
                nf_db: Some(linear_to_db(p.comp.nf)),
                gain_schedule_g0,
                gain_fixed,
                nsp_convention: Some(
                    match p.comp.nsp_convention {
                        NspConvention::HighGain => "high-gain",
                        NspConvention::Exact => "exact",
                    }
                    .into(),
                ),
                xi1_db: Some(linear_to_db(p.comp.xi1)),
                xi2_db: Some(linear_to_db(p.comp.xi2)),
                xi_adjacent_db: Some(linear_to_db(p.comp.xi_adjacent)),
                eta_mux: Some(p.comp.eta_mux),
                eta_dmu: Some(p.comp.eta_dmu),
                delta_nu_ghz: Some(p.comp.delta_nu_hz / 1e9),
            },
            bb84: Bb84Section {
                mu: p.bb84.mu,
                y0_base: Some(p.bb84.y0_base),
                e_det: Some(p.bb84.e_det),
                e0: Some(p.bb84.e0),
                eta_bob: Some(p.bb84.eta_bob),
                f_ec: Some(p.bb84.f_ec),
                gate_window_ns: Some(p.bb84.delta_t_s / 1e-9),
            },
            gmcs: GmcsSection {
                v_a: Some(p.gmcs.v_a),
                eta_bob: Some(p.gmcs.eta_bob),
                eps0: Some(p.gmcs.eps0),
                v_el: Some(p.gmcs.v_el),
                gamma: Some(p.gmcs.gamma),
                n_lo: Some(p.gmcs.n_lo),
                detector_bandwidth_mhz: Some(p.gmcs.detector_bandwidth_hz / 1e6),
                sigma_meas: Some(p.gmcs.sigma_meas),
                conservative: Some(p.gmcs.conservative),
                strict_eps_out: Some(p.gmcs.strict_eps_out),
            },
            scenario: ScenarioSection {
                name: Some(cfg.scenario.name.clone()),
                protocol: Some(cfg.scenario.protocol.tag().into()),
                adjacency: Some(
                    match cfg.scenario.adjacency {
                        Adjacency::Adjacent => "adjacent",
                        Adjacency::NonAdjacent => "non-adjacent",
                    }
                    .into(),
                ),
                z_min_km: Some(cfg.scenario.z_min_km),
                z_max_km: Some(cfg.scenario.z_max_km),
                z_step_km: Some(cfg.scenario.z_step_km),
            },
        }
    }
}

pub fn parse_config(text: &str) -> Result<Config> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| {
        // serde's unknown-field errors carry the key name; keep the message
        // on one line.
        Error::ConfigSyntax(e.message().to_string() + &span_hint(text, e.span()))
    })?;
    file.into_config()
}

fn span_hint(text: &str, span: Option<std::ops::Range<usize>>) -> String {
    match span {
        Some(r) if r.start <= text.len() => {
            let line = text[..r.start].matches('\n').count() + 1;
            format!(" (line {line})")
        }
        _ => String::new(),
    }
}

pub fn load_config(path: &std::path::Path) -> Result<Config> {
    parse_config(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg, Config::default());
        assert_eq!(cfg.params.link.alpha_db_per_km, 0.21);
        assert_eq!(cfg.params.link.beta_raman, 4e-9);
        assert_eq!(cfg.params.comp.nf, 4.0);
        assert_eq!(cfg.params.comp.eta_mux, 0.71);
        assert_eq!(cfg.params.comp.eta_dmu, 0.71);
        assert_eq!(cfg.params.comp.xi1, 1e-8);
        assert_eq!(cfg.params.comp.xi2, 1e-8);
        assert_eq!(cfg.params.comp.delta_nu_hz, 75e9);
        assert_eq!(cfg.params.bb84.delta_t_s, 1e-9);
        assert_eq!(cfg.params.gmcs.v_a, 10.0);
        assert_eq!(cfg.params.gmcs.eta_bob, 0.6);
        assert_eq!(cfg.params.gmcs.eps0, 0.01);
        assert_eq!(cfg.params.gmcs.v_el, 0.01);
        assert_eq!(cfg.params.gmcs.gamma, 0.9);
    }

    #[test]
    fn db_keys_convert() {
        let cfg =
            parse_config("[components]\nxi1_db = -200\nxi2_db = -40\n[link]\np_out_dbm = 4.0\n")
                .unwrap();
        assert!((cfg.params.comp.xi1 / 1e-20 - 1.0).abs() < 1e-12);
        assert!((cfg.params.comp.xi2 / 1e-4 - 1.0).abs() < 1e-12);
        assert!((cfg.params.link.p_out_w / 2.511_886_431_509_58e-3 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn transmittance_out_of_range() {
        let err = parse_config("[gmcs]\neta_bob = 1.5\n").unwrap_err();
        assert!(
            matches!(&err, Error::Config { key, .. } if key == "gmcs.eta_bob"),
            "{err}"
        );
        let err = parse_config("[bb84]\neta_bob = 0\n").unwrap_err();
        assert!(err.to_string().contains("bb84.eta_bob"), "{err}");
    }

    #[test]
    fn unknown_key_is_named() {
        let err = parse_config("[link]\nalpha = 0.2\n").unwrap_err();
        assert!(err.to_string().contains("alpha"), "{err}");
        let err = parse_config("[optics]\nx = 1\n").unwrap_err();
        assert!(err.to_string().contains("optics"), "{err}");
    }

    #[test]
    fn malformed_number_is_named() {
        let err = parse_config("[link]\nalpha_db_per_km = \"fast\"\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "{msg}");
        let err = parse_config("[link]\nclassical_channel_count = -3\n").unwrap_err();
        assert!(err.to_string().contains("classical_channel_count"), "{err}");
    }

    #[test]
    fn enumerations() {
        let cfg = parse_config(
            "[components]\nnsp_convention = \"exact\"\ngain_fixed = 50\n[scenario]\nprotocol = \"bb84\"\nadjacency = \"adjacent\"\n",
        )
        .unwrap();
        assert_eq!(cfg.params.comp.nsp_convention, NspConvention::Exact);
        assert_eq!(cfg.params.comp.gain, GainPolicy::Fixed(50.0));
        assert_eq!(cfg.scenario.protocol, Protocol::Bb84);
        assert_eq!(cfg.scenario.adjacency, Adjacency::Adjacent);
        assert!(parse_config("[components]\nnsp_convention = \"low\"\n").is_err());
        assert!(parse_config("[components]\ngain_fixed = 50\ngain_schedule_g0 = 100\n").is_err());
    }

    #[test]
    fn wavelength_order_enforced() {
        let err = parse_config("[link]\nlambda_classical_nm = 1540\n").unwrap_err();
        assert!(err.to_string().contains("lambda_classical_nm"), "{err}");
    }

    #[test]
    fn custom_scenario_grid() {
        let cfg = parse_config("[scenario]\nz_max_km = 10\nz_step_km = 2.5\n").unwrap();
        let s = cfg.custom_scenario().unwrap();
        assert_eq!(s.z_grid, vec![0.0, 2.5, 5.0, 7.5, 10.0]);
        assert_eq!(s.protocol(), Protocol::Gmcs);
    }
}
