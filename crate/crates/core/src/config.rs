//! Scenario files (TOML).
//!
//! ```toml
//! m_sus = 100
//! beta = "0 dB"        # numbers are linear, strings need a dB suffix
//! rho0 = "20 dB"
//!
//! [region]
//! shape = "polygon"    # or "disk", "regular_polygon"
//! vertices = [[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]]
//! pu_rx = [3.0, 3.0]
//!
//! [[protocol]]
//! kind = "guard_zone"  # "full", "threshold", "cooperation"
//! r_f = 30.0
//! ```
//!
//! Omitted link and fading parameters take the reference defaults of
//! [`ScenarioSpec::with_defaults`].

use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::model::{Boundary, ConvexPolygon, ModelError, Protocol, Scenario, ScenarioSpec};
use crate::num::Point;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed scenario file: {0}")]
    Parse(String),
    #[error("field `{field}`: {detail}")]
    Value { field: String, detail: String },
    #[error("invalid scenario: {0}")]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Level {
    Linear(f64),
    Text(String),
}

impl Level {
    fn linear(&self, field: &str) -> Result<f64, ConfigError> {
        match self {
            Level::Linear(v) => Ok(*v),
            Level::Text(s) => parse_db(s).ok_or_else(|| ConfigError::Value {
                field: field.to_string(),
                detail: format!("expected a number or \"<x> dB\", got {s:?}"),
            }),
        }
    }
}

/// "20 dB" → 100.0
pub fn parse_db(text: &str) -> Option<f64> {
    let t = text.trim();
    let number = t.strip_suffix("dB")?.trim();
    let db: f64 = number.parse().ok()?;
    Some(10f64.powf(db / 10.0))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    m_sus: usize,
    epsilon: Option<f64>,
    p_t0: Option<Level>,
    p_t: Option<Level>,
    p_ts: Option<Level>,
    r0: Option<f64>,
    alpha: Option<f64>,
    m0: Option<f64>,
    mg: Option<f64>,
    mh: Option<f64>,
    beta: Option<Level>,
    rho0: Option<Level>,
    region: RawRegion,
    #[serde(default)]
    protocol: Vec<RawProtocol>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
enum RawRegion {
    Polygon {
        vertices: Vec<[f64; 2]>,
        pu_rx: [f64; 2],
    },
    Disk {
        radius: f64,
        #[serde(default)]
        center: [f64; 2],
        pu_rx: Option<[f64; 2]>,
    },
    RegularPolygon {
        sides: usize,
        circumradius: f64,
        #[serde(default)]
        center: [f64; 2],
        /// degrees
        #[serde(default)]
        rotation: f64,
        pu_rx: Option<[f64; 2]>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawProtocol {
    Full,
    GuardZone { r_f: f64 },
    Threshold { gamma: Level },
    Cooperation { gamma: Level, r_c: f64 },
}

/// A parsed scenario file: the raw scenario plus the protocols it lists.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFile {
    pub spec: ScenarioSpec<f64>,
    pub protocols: Vec<Protocol<f64>>,
}

impl ScenarioFile {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let raw: RawFile = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        let pt = |p: [f64; 2]| Point::new(p[0], p[1]);
        let (boundary, pu_rx) = match raw.region {
            RawRegion::Polygon { vertices, pu_rx } => {
                let poly = ConvexPolygon::new(vertices.into_iter().map(pt).collect())?;
                (Boundary::Polygon(poly), pt(pu_rx))
            }
            RawRegion::Disk { radius, center, pu_rx } => {
                let center = pt(center);
                (Boundary::Disk { center, radius }, pu_rx.map(pt).unwrap_or(center))
            }
            RawRegion::RegularPolygon {
                sides,
                circumradius,
                center,
                rotation,
                pu_rx,
            } => {
                let center = pt(center);
                let poly = ConvexPolygon::regular(sides, circumradius, center, rotation.to_radians())?;
                (Boundary::Polygon(poly), pu_rx.map(pt).unwrap_or(center))
            }
        };
        let mut spec = ScenarioSpec::with_defaults(boundary, pu_rx, raw.m_sus);
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut spec.epsilon, raw.epsilon);
        set(&mut spec.r0, raw.r0);
        set(&mut spec.alpha, raw.alpha);
        set(&mut spec.m0, raw.m0);
        set(&mut spec.mg, raw.mg);
        set(&mut spec.mh, raw.mh);
        for (field, slot, level) in [
            ("p_t0", &mut spec.p_t0, &raw.p_t0),
            ("p_t", &mut spec.p_t, &raw.p_t),
            ("p_ts", &mut spec.p_ts, &raw.p_ts),
            ("beta", &mut spec.beta, &raw.beta),
            ("rho0", &mut spec.rho0, &raw.rho0),
        ] {
            if let Some(l) = level {
                *slot = l.linear(field)?;
            }
        }
        let protocols = raw
            .protocol
            .iter()
            .map(|p| {
                Ok(match p {
                    RawProtocol::Full => Protocol::FullActivity,
                    RawProtocol::GuardZone { r_f } => Protocol::GuardZone { r_f: *r_f },
                    RawProtocol::Threshold { gamma } => Protocol::Threshold {
                        gamma: gamma.linear("gamma")?,
                    },
                    RawProtocol::Cooperation { gamma, r_c } => Protocol::Cooperation {
                        gamma: gamma.linear("gamma")?,
                        r_c: *r_c,
                    },
                })
            })
            .collect::<Result<Vec<_>, ConfigError>>()?;
        Ok(Self { spec, protocols })
    }

    /// Validates the scenario and every listed protocol.
    pub fn validate(&self) -> Result<(Scenario<f64>, Vec<Protocol<f64>>), ConfigError> {
        let scenario = self.spec.clone().validate()?;
        for p in &self.protocols {
            p.validate(&scenario)?;
        }
        Ok((scenario, self.protocols.clone()))
    }
}
