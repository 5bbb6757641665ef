//! Interference, outage and active-user analysis for underlay cognitive
//! networks with M secondary users placed uniformly in a convex region
//! around a primary receiver.
//!
//! The analytic stack is generic over the float type ([`num::Real`]); the
//! aliases at the crate root fix it to `f64`. The simulator and the scenario
//! file loader work in `f64` only.
//!
//! ```
//! use underlay_core::{presets, InterferenceKernel, Protocol};
//! use underlay_core::network_metrics::{mean_active, outage_probability};
//!
//! let scenario = presets::quadrilateral_scenario(150.0, 100).validate().unwrap();
//! let kernel = InterferenceKernel::new(&scenario, Protocol::GuardZone { r_f: 30.0 }).unwrap();
//! let pout = outage_probability(&kernel).unwrap();
//! assert!((pout - 1.54e-2).abs() < 1e-4);
//! assert!(mean_active(&kernel).unwrap() < 100.0);
//! ```

// `!(x > 0)` rejects NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod fading;
pub mod geometry;
pub mod inversion;
pub mod model;
pub mod montecarlo;
pub mod network_metrics;
pub mod num;
pub mod presets;
pub mod protocol_kernel;
pub mod quadrature;
pub mod special;

pub use montecarlo::{McEstimate, McReport, TrialRecord};
pub use num::Real;

pub type Point = num::Point<f64>;
pub type ConvexPolygon = model::ConvexPolygon<f64>;
pub type Boundary = model::Boundary<f64>;
pub type NetworkRegion = model::NetworkRegion<f64>;
pub type ScenarioSpec = model::ScenarioSpec<f64>;
pub type Scenario = model::Scenario<f64>;
pub type Protocol = model::Protocol<f64>;
pub type DistanceProfile = geometry::DistanceProfile<f64>;
pub type NakagamiPower = fading::NakagamiPower<f64>;
pub type InterferenceKernel = protocol_kernel::InterferenceKernel<f64>;
pub type CumulantSet = network_metrics::CumulantSet<f64>;
pub type Family = inversion::Family<f64>;
