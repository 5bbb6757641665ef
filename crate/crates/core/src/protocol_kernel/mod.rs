//! Statistics of the interference caused by one uniformly placed SU.
//!
//! Everything reduces to a single quadrature over the distance r: the fading
//! expectation is closed analytically by
//! [`NakagamiPower::laplace_weighted_moment`].

pub mod closed_form;

use thiserror::Error;

use crate::fading::{FadingError, NakagamiPower};
use crate::geometry::{DistanceProfile, GeometryError};
use crate::model::{ModelError, Protocol, Scenario};
use crate::num::Real;
use crate::quadrature::QuadSettings;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Fading(#[from] FadingError),
}

/// Evaluator for aₜ(s) = E[Iᵗ e^{−sI}] and related quantities of a single SU.
#[derive(Debug, Clone)]
pub struct InterferenceKernel<T> {
    scenario: Scenario<T>,
    protocol: Protocol<T>,
    profile: DistanceProfile<T>,
    fade_g: NakagamiPower<T>,
    fade_h: NakagamiPower<T>,
    settings: QuadSettings<T>,
    // |A'|-normalized cooperation disk, p = πr_c²/|A'|
    coop_fraction: T,
}

impl<T: Real> InterferenceKernel<T> {
    pub fn new(scenario: &Scenario<T>, protocol: Protocol<T>) -> Result<Self, KernelError> {
        let profile = DistanceProfile::new(scenario.region());
        Self::with_profile(scenario, protocol, profile)
    }

    /// Reuses an existing profile of the same region.
    pub fn with_profile(
        scenario: &Scenario<T>,
        protocol: Protocol<T>,
        profile: DistanceProfile<T>,
    ) -> Result<Self, KernelError> {
        protocol.validate(scenario)?;
        let coop_fraction = match protocol {
            Protocol::Cooperation { r_c, .. } => T::PI() * r_c * r_c / profile.area_prime(),
            _ => T::zero(),
        };
        Ok(Self {
            scenario: scenario.clone(),
            protocol,
            fade_g: NakagamiPower::new(scenario.mg())?,
            fade_h: NakagamiPower::new(scenario.mh())?,
            profile,
            settings: QuadSettings::relative(T::lit(1e-10)),
            coop_fraction,
        })
    }

    /// Same scenario and profile, different protocol.
    pub fn with_protocol(&self, protocol: Protocol<T>) -> Result<Self, KernelError> {
        Self::with_profile(&self.scenario, protocol, self.profile.clone())
    }

    pub fn with_settings(mut self, settings: QuadSettings<T>) -> Self {
        self.settings = settings;
        self
    }

    pub fn scenario(&self) -> &Scenario<T> {
        &self.scenario
    }

    pub fn protocol(&self) -> Protocol<T> {
        self.protocol
    }

    pub fn profile(&self) -> &DistanceProfile<T> {
        &self.profile
    }

    pub fn transmit_fading(&self) -> &NakagamiPower<T> {
        &self.fade_g
    }

    /// P(active | R = r).
    pub fn activity_probability(&self, r: T) -> Result<T, KernelError> {
        self.profile.angular_measure(r)?;
        Ok(self.activity(r))
    }

    fn activity(&self, r: T) -> T {
        match self.protocol {
            Protocol::FullActivity => guard_indicator(r, self.scenario.region().epsilon()),
            Protocol::GuardZone { r_f } => guard_indicator(r, r_f),
            Protocol::Threshold { gamma } => self.sensing_cdf(gamma, r),
            Protocol::Cooperation { gamma, .. } => {
                let f = self.sensing_cdf(gamma, r);
                let p = self.coop_fraction;
                let others = T::from_usize_lossy(self.scenario.m_sus() - 1);
                f * (T::one() - p + p * f).powf(others)
            }
        }
    }

    // F_H(γ r^α / P_TS)
    fn sensing_cdf(&self, gamma: T, r: T) -> T {
        self.fade_h
            .power_cdf(gamma * r.powf(self.scenario.alpha()) / self.scenario.p_ts())
    }

    /// Lower end of the interval where the SU can be active.
    fn active_from(&self) -> T {
        match self.protocol {
            Protocol::GuardZone { r_f } => r_f.min(self.profile.r_max()),
            _ => self.profile.epsilon(),
        }
    }

    fn extra_breaks(&self) -> Vec<T> {
        match self.protocol {
            Protocol::GuardZone { r_f } => vec![r_f],
            _ => Vec::new(),
        }
    }

    /// ∫ f_R(r)·P_active(r)·h(r) dr over the support.
    fn integrate_active<H: FnMut(T) -> T>(&self, mut h: H) -> Result<T, KernelError> {
        let lo = self.active_from();
        let hi = self.profile.r_max();
        if lo >= hi {
            return Ok(T::zero());
        }
        let extra = self.extra_breaks();
        Ok(self
            .profile
            .expectation(|r| self.activity(r) * h(r), lo, hi, &extra, &self.settings)?)
    }

    /// aₜ(s) = E[Iᵗ e^{−sI}]. For t = 0 this is the MGF M_I(s), which
    /// includes the mass of inactive SUs (I = 0).
    pub fn single_weighted_moment(&self, t: u32, s: T) -> Result<T, KernelError> {
        let pt = self.scenario.p_t();
        let alpha = self.scenario.alpha();
        if t == 0 {
            // M_I(s) = 1 − ∫ f_R P_active (1 − E[e^{−sP_T G r^{−α}}]) dr
            let m = self.fade_g.shape();
            let lost = self.integrate_active(|r| {
                let theta = s * pt * r.powf(-alpha);
                -(-m * (theta / m).ln_1p()).exp_m1()
            })?;
            return Ok(T::one() - lost);
        }
        let tt = T::from_u32(t).unwrap_or(T::one());
        self.integrate_active(|r| {
            let path = pt * r.powf(-alpha);
            path.powf(tt) * self.fade_g.laplace_weighted_moment(t, s * path)
        })
    }

    /// M_I(s) = E[e^{−sI}].
    pub fn single_mgf(&self, s: T) -> Result<T, KernelError> {
        self.single_weighted_moment(0, s)
    }

    /// μ_I(n) = E[Iⁿ] over active and inactive SUs; n = 0 gives the
    /// probability that the SU is active.
    pub fn single_moment(&self, n: u32) -> Result<T, KernelError> {
        let alpha = self.scenario.alpha();
        let nn = T::from_u32(n).unwrap_or(T::zero());
        let indicator = matches!(self.protocol, Protocol::FullActivity | Protocol::GuardZone { .. });
        let spatial = if n == 0 && indicator {
            // exact: P(R > r_f)
            let lo = self.active_from();
            if lo <= self.profile.epsilon() {
                T::one()
            } else {
                (T::one() - self.profile.cdf(lo)).max(T::zero())
            }
        } else if n == 0 {
            self.integrate_active(|_| T::one())?
        } else {
            self.integrate_active(|r| r.powf(-nn * alpha))?
        };
        Ok(self.scenario.p_t().powf(nn) * self.fade_g.power_moment(nn) * spatial)
    }
}

#[inline]
fn guard_indicator<T: Real>(r: T, r_f: T) -> T {
    if r > r_f {
        T::one()
    } else {
        T::zero()
    }
}
