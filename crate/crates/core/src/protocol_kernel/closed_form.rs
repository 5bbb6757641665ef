//! Closed forms for a PU-Rx at the center of a regular polygon (or a disk).
//! Used as independent oracles for the quadrature pipeline.

use thiserror::Error;

use crate::fading::NakagamiPower;
use crate::model::Scenario;
use crate::num::Real;
use crate::quadrature::{integrate, QuadSettings, QuadratureError};
use crate::special::{self, SpecialError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClosedFormError {
    #[error("closed form requires {0}")]
    Domain(String),
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Centered regular polygon (`sides = None` for the disk limit).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularPolygonParams<T> {
    pub sides: Option<usize>,
    pub circumradius: T,
    pub epsilon: T,
    pub p_t: T,
    pub p_ts: T,
    pub alpha: T,
    pub mg: T,
    pub mh: T,
}

impl<T: Real> RegularPolygonParams<T> {
    /// Powers, path loss and fading of `scenario`; geometry given explicitly.
    pub fn from_scenario(scenario: &Scenario<T>, sides: Option<usize>, circumradius: T) -> Self {
        Self {
            sides,
            circumradius,
            epsilon: scenario.region().epsilon(),
            p_t: scenario.p_t(),
            p_ts: scenario.p_ts(),
            alpha: scenario.alpha(),
            mg: scenario.mg(),
            mh: scenario.mh(),
        }
    }

    /// Apothem W_p (equal to W for the disk).
    pub fn apothem(&self) -> T {
        match self.sides {
            Some(l) => self.circumradius * (T::PI() / T::from_usize_lossy(l)).cos(),
            None => self.circumradius,
        }
    }

    /// |A'|
    pub fn area_prime(&self) -> T {
        let w = self.circumradius;
        let full = match self.sides {
            Some(l) => {
                let l = T::from_usize_lossy(l);
                T::lit(0.5) * l * w * w * (T::TAU() / l).sin()
            }
            None => T::PI() * w * w,
        };
        full - T::PI() * self.epsilon * self.epsilon
    }

    fn sides_t(&self) -> T {
        self.sides.map(T::from_usize_lossy).unwrap_or(T::zero())
    }

    /// ∫_{W_p}^{W} g(r) arccos(W_p/r) dr, zero for the disk.
    fn edge_integral<G: Fn(T) -> T>(&self, g: G) -> Result<T, ClosedFormError> {
        let wp = self.apothem();
        let w = self.circumradius;
        if self.sides.is_none() || w <= wp {
            return Ok(T::zero());
        }
        let set = QuadSettings::relative(T::lit(1e-12));
        Ok(integrate(|r| g(r) * (wp / r).min(T::one()).acos(), wp, w, &set)?.value)
    }
}

/// Which closed form to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedFormKind<T> {
    /// Guard-zone MGF M_I(s).
    MgfGuard { r_f: T, s: T },
    /// Guard-zone n-th moment, r_f < W_p.
    MomentGuard { r_f: T, n: u32 },
    /// Threshold-protocol n-th moment.
    MomentThreshold { gamma: T, n: u32 },
}

pub fn closed_form_regular_polygon<T: Real>(
    kind: ClosedFormKind<T>,
    params: &RegularPolygonParams<T>,
) -> Result<T, ClosedFormError> {
    let p = params;
    if let Some(l) = p.sides {
        if l < 3 {
            return Err(ClosedFormError::Domain("at least three sides".into()));
        }
    }
    if !(p.epsilon > T::zero() && p.epsilon < p.apothem()) {
        return Err(ClosedFormError::Domain("0 < epsilon < W_p".into()));
    }
    match kind {
        ClosedFormKind::MgfGuard { r_f, s } => mgf_guard(p, r_f, s),
        ClosedFormKind::MomentGuard { r_f, n } => moment_guard(p, r_f, n),
        ClosedFormKind::MomentThreshold { gamma, n } => moment_threshold(p, gamma, n),
    }
}

fn check_guard<T: Real>(p: &RegularPolygonParams<T>, r_f: T) -> Result<(), ClosedFormError> {
    if r_f >= p.epsilon && r_f <= p.apothem() {
        Ok(())
    } else {
        Err(ClosedFormError::Domain("epsilon ≤ r_f ≤ W_p".into()))
    }
}

fn mgf_guard<T: Real>(p: &RegularPolygonParams<T>, r_f: T, s: T) -> Result<T, ClosedFormError> {
    check_guard(p, r_f)?;
    if s < T::zero() {
        return Err(ClosedFormError::Domain("s ≥ 0".into()));
    }
    let m = p.mg;
    let a = p.alpha;
    let two = T::lit(2.0);
    let h = |r: T| special::hyp2f1(m, -two / a, (a - two) / a, -r.powf(-a) * s * p.p_t / m);
    let w = p.circumradius;
    let disk = T::PI() * (w * w * h(w)? - r_f * r_f * h(r_f)? + r_f * r_f - p.epsilon * p.epsilon);
    let l = p.sides_t();
    let edge = p.edge_integral(|r| two * l * r * (m / (m + r.powf(-a) * s * p.p_t)).powf(m))?;
    Ok((disk - edge) / p.area_prime())
}

fn moment_guard<T: Real>(p: &RegularPolygonParams<T>, r_f: T, n: u32) -> Result<T, ClosedFormError> {
    check_guard(p, r_f)?;
    let nn = T::from_u32(n).unwrap_or(T::zero());
    let na = nn * p.alpha;
    let two = T::lit(2.0);
    if n == 0 || (na - T::one()).abs() < T::lit(1e-12) || (na - two).abs() < T::lit(1e-12) {
        return Err(ClosedFormError::Domain("n ≥ 1 and nα ∉ {1, 2}".into()));
    }
    let w = p.circumradius;
    let wp = p.apothem();
    let gm = NakagamiPower::new(p.mg).map_err(|e| ClosedFormError::Domain(e.to_string()))?;
    let mut bracket = T::PI() * (w.powf(two - na) - r_f.powf(two - na));
    if p.sides.is_some() {
        let l = p.sides_t();
        bracket += l * (phi(w, wp, na)? - phi(wp, wp, na)?);
    }
    Ok(p.p_t.powf(nn) * gm.power_moment(nn) * two * bracket / (p.area_prime() * (two - na)))
}

/// Antiderivative helper: Φ'(r) = −(2 − nα) r^{1−nα} arccos(W_p/r).
fn phi<T: Real>(r: T, wp: T, na: T) -> Result<T, SpecialError> {
    let one = T::one();
    let half = T::lit(0.5);
    let z = (wp * wp / (r * r)).min(one);
    let f1 = special::hyp2f1(half, (na + one) * half, (na + T::lit(3.0)) * half, z)?;
    let f2 = special::hyp2f1(-half, (na - one) * half, (na + one) * half, z)?;
    let acos = (wp / r).min(one).acos();
    let num = (one - na) * ((one + na) * r.powi(3) * acos + wp.powi(3) * f1) - wp * (one + na) * r * r * f2;
    Ok(num / ((na - one) * (na + one) * r.powf(one + na)))
}

fn moment_threshold<T: Real>(p: &RegularPolygonParams<T>, gamma: T, n: u32) -> Result<T, ClosedFormError> {
    if !(gamma > T::zero()) {
        return Err(ClosedFormError::Domain("gamma > 0".into()));
    }
    let nn = T::from_u32(n).unwrap_or(T::zero());
    let a = p.alpha;
    let na = nn * a;
    let two = T::lit(2.0);
    if (na - two).abs() < T::lit(1e-12) {
        return Err(ClosedFormError::Domain("nα ≠ 2".into()));
    }
    let mh = p.mh;
    let gm = NakagamiPower::new(p.mg).map_err(|e| ClosedFormError::Domain(e.to_string()))?;
    let gamma_mh = special::gamma(mh)?;
    let k = mh * gamma / p.p_ts;
    let x = |r: T| k * r.powf(a);
    // Γ[m_h, 0, x]/Γ[m_h] = P(m_h, x)
    let lower = |r: T| special::gamma_p(mh, x(r));
    let (w, eps) = (p.circumradius, p.epsilon);
    let mut inner = w.powf(two - na) * lower(w)?
        - eps.powf(two - na) * lower(eps)?
        - k.powf(nn - two / a) * special::generalized_incomplete_gamma(mh - nn + two / a, x(eps), x(w))? / gamma_mh;
    if p.sides.is_some() {
        let l = p.sides_t();
        let edge = p.edge_integral(|r| special::gamma_p(mh, x(r)).unwrap_or(T::nan()) * r.powf(T::one() - na))?;
        inner -= l * (two - na) / T::PI() * edge;
    }
    Ok(p.p_t.powf(nn) * gm.power_moment(nn) * T::TAU() / (p.area_prime() * (two - na)) * inner)
}
