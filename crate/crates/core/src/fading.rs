//! Unit-mean Gamma power gains (Nakagami-m amplitude).

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use thiserror::Error;

use crate::num::Real;
use crate::special::{self, SpecialError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FadingError {
    #[error("Nakagami shape must be at least 0.5, got {0}")]
    BadShape(f64),
    #[error(transparent)]
    Special(#[from] SpecialError),
}

/// Power gain G ~ Gamma(shape m, rate m), so E[G] = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NakagamiPower<T> {
    m: T,
    ln_gamma_m: T,
}

impl<T: Real> NakagamiPower<T> {
    pub fn new(m: T) -> Result<Self, FadingError> {
        if !(m >= T::lit(0.5) && m.is_finite()) {
            return Err(FadingError::BadShape(m.to_f64_lossy()));
        }
        Ok(Self {
            m,
            ln_gamma_m: special::ln_gamma(m)?,
        })
    }

    pub fn shape(&self) -> T {
        self.m
    }

    /// E[Gⁿ] = Γ(m+n) / (mⁿ Γ(m)).
    pub fn power_moment(&self, n: T) -> T {
        if n == T::zero() {
            return T::one();
        }
        let m = self.m;
        if n == n.floor() && n < T::lit(64.0) {
            // Rising factorial, exact for small integer n.
            let k = n.to_usize().unwrap_or(0);
            return (0..k).fold(T::one(), |acc, i| acc * (m + T::from_usize_lossy(i)) / m);
        }
        (special::ln_gamma(m + n).unwrap_or(T::infinity()) - self.ln_gamma_m - n * m.ln()).exp()
    }

    /// F(x) = P(m, m·x).
    pub fn power_cdf(&self, x: T) -> T {
        if x <= T::zero() {
            return T::zero();
        }
        if x.is_infinite() {
            return T::one();
        }
        special::gamma_p(self.m, self.m * x).unwrap_or(T::one())
    }

    pub fn power_pdf(&self, x: T) -> T {
        if x < T::zero() {
            return T::zero();
        }
        let m = self.m;
        if x == T::zero() {
            return if m == T::one() {
                T::one()
            } else if m < T::one() {
                T::infinity()
            } else {
                T::zero()
            };
        }
        (m * m.ln() + (m - T::one()) * x.ln() - m * x - self.ln_gamma_m).exp()
    }

    /// E[Gᵗ e^{−θG}] = mᵐ Γ(m+t) / (Γ(m) (m+θ)^{m+t}).
    pub fn laplace_weighted_moment(&self, t: u32, theta: T) -> T {
        let m = self.m;
        let tt = T::from_u32(t).unwrap_or(T::zero());
        let ratio = m / (m + theta);
        // mᵐ/(m+θ)^{m+t} = (m/(m+θ))^{m+t} · m^{−t}
        let rising = (0..t).fold(T::one(), |acc, i| acc * (m + T::from_u32(i).unwrap_or(T::zero())));
        rising * ratio.powf(m + tt) / m.powi(t as i32)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        let m = self.m.to_f64_lossy();
        let g = Gamma::new(m, 1.0 / m).expect("shape validated at construction");
        T::lit(g.sample(rng))
    }
}

/// Sampler for f64 hot loops; avoids rebuilding the Gamma distribution.
#[derive(Debug, Clone, Copy)]
pub struct PowerSampler(Gamma<f64>);

impl PowerSampler {
    pub fn new(m: f64) -> Result<Self, FadingError> {
        NakagamiPower::new(m)?;
        Ok(Self(Gamma::new(m, 1.0 / m).expect("shape validated")))
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.0.sample(rng)
    }
}
