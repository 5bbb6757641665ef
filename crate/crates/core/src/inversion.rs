//! Protocol parameters for a target outage, and active-SU vs outage curves.

use std::io::{self, Write};

use rayon::prelude::*;
use thiserror::Error;

use crate::model::{Protocol, Scenario};
use crate::network_metrics::{mean_active, noise_only_outage, outage_probability, MetricsError};
use crate::num::Real;
use crate::protocol_kernel::InterferenceKernel;

pub const DEFAULT_TOL: f64 = 1e-6;
const MAX_ITER: usize = 200;
const GAMMA_LO: f64 = 1e-12;
const GAMMA_HI: f64 = 1e3;
const GAMMA_LIMIT_LO: f64 = 1e-60;
const GAMMA_LIMIT_HI: f64 = 1e30;

/// Which parameter is solved for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family<T> {
    /// Solve r_f.
    GuardZone,
    /// Solve γ.
    Threshold,
    /// Solve γ at fixed r_c.
    Cooperation { r_c: T },
}

impl<T: Real> Family<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Family::GuardZone => "guard_zone",
            Family::Threshold => "threshold",
            Family::Cooperation { .. } => "cooperation",
        }
    }

    pub fn protocol(&self, parameter: T) -> Protocol<T> {
        match *self {
            Family::GuardZone => Protocol::GuardZone { r_f: parameter },
            Family::Threshold => Protocol::Threshold { gamma: parameter },
            Family::Cooperation { r_c } => Protocol::Cooperation { gamma: parameter, r_c },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InversionError {
    #[error("target outage {target} outside the achievable range [{noise_only}, {full_activity}] (noise only, full activity)")]
    Unreachable {
        target: f64,
        noise_only: f64,
        full_activity: f64,
    },
    #[error("outage at the bracket ends ({lo_outage}, {hi_outage}) does not straddle {target}")]
    NoBracket {
        target: f64,
        lo_outage: f64,
        hi_outage: f64,
    },
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

impl From<crate::protocol_kernel::KernelError> for InversionError {
    fn from(e: crate::protocol_kernel::KernelError) -> Self {
        InversionError::Metrics(e.into())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution<T> {
    pub protocol: Protocol<T>,
    pub parameter: T,
    pub outage: T,
    pub iterations: usize,
}

struct Evaluator<'a, T: Real> {
    base: &'a InterferenceKernel<T>,
    family: Family<T>,
}

impl<T: Real> Evaluator<'_, T> {
    fn kernel(&self, parameter: T) -> Result<InterferenceKernel<T>, InversionError> {
        Ok(self.base.with_protocol(self.family.protocol(parameter))?)
    }

    fn outage(&self, parameter: T) -> Result<T, InversionError> {
        Ok(outage_probability(&self.kernel(parameter)?)?)
    }
}

/// Finds the parameter of `family` whose outage equals `target_pout`.
///
/// Outage decreases in r_f and increases in γ; both maps are bisected
/// (γ on a log scale) until |P_out − target| ≤ `tol` or the bracket is
/// narrower than 1e-9 relative.
pub fn solve_parameter<T: Real>(
    scenario: &Scenario<T>,
    family: Family<T>,
    target_pout: T,
    tol: T,
) -> Result<Solution<T>, InversionError> {
    let base = InterferenceKernel::new(scenario, Protocol::FullActivity)?;
    solve_with_kernel(&base, family, target_pout, tol)
}

fn solve_with_kernel<T: Real>(
    base: &InterferenceKernel<T>,
    family: Family<T>,
    target: T,
    tol: T,
) -> Result<Solution<T>, InversionError> {
    if !(tol > T::zero()) {
        return Err(InversionError::BadTolerance(tol.to_f64_lossy()));
    }
    let s = base.scenario();
    let noise = noise_only_outage(s.m0(), s.beta(), s.rho0());
    let full = outage_probability(base)?;
    let unreachable = || InversionError::Unreachable {
        target: target.to_f64_lossy(),
        noise_only: noise.to_f64_lossy(),
        full_activity: full.to_f64_lossy(),
    };
    if !(target >= noise - tol && target <= full + tol) {
        return Err(unreachable());
    }
    let ev = Evaluator { base, family };
    let eps = s.region().epsilon();

    if let Family::GuardZone = family {
        if (target - full).abs() <= tol {
            return Ok(Solution {
                protocol: family.protocol(eps),
                parameter: eps,
                outage: full,
                iterations: 0,
            });
        }
        // decreasing in r_f
        let (lo, hi) = (eps, s.r_max());
        let p_hi = ev.outage(hi)?;
        return bisect(|x| ev.outage(x), lo, hi, full, p_hi, target, tol, false, family);
    }

    // increasing in γ, bisected in ln γ
    let mut lo = T::lit(GAMMA_LO);
    let mut hi = T::lit(GAMMA_HI);
    let mut p_lo = ev.outage(lo)?;
    while p_lo > target + tol && lo > T::lit(GAMMA_LIMIT_LO) {
        lo *= T::lit(1e-3);
        p_lo = ev.outage(lo)?;
    }
    let mut p_hi = ev.outage(hi)?;
    while p_hi < target - tol && hi < T::lit(GAMMA_LIMIT_HI) {
        hi *= T::lit(1e3);
        p_hi = ev.outage(hi)?;
    }
    let solution = bisect(
        |u: T| ev.outage(u.exp()),
        lo.ln(),
        hi.ln(),
        p_lo,
        p_hi,
        target,
        tol,
        true,
        family,
    )?;
    let gamma = solution.parameter.exp();
    Ok(Solution {
        protocol: family.protocol(gamma),
        parameter: gamma,
        ..solution
    })
}

#[allow(clippy::too_many_arguments)]
fn bisect<T: Real, F>(
    mut f: F,
    mut lo: T,
    mut hi: T,
    f_lo: T,
    f_hi: T,
    target: T,
    tol: T,
    increasing: bool,
    family: Family<T>,
) -> Result<Solution<T>, InversionError>
where
    F: FnMut(T) -> Result<T, InversionError>,
{
    let done = |x: T, p: T, it: usize| {
        Ok(Solution {
            protocol: family.protocol(x),
            parameter: x,
            outage: p,
            iterations: it,
        })
    };
    if (f_lo - target).abs() <= tol {
        return done(lo, f_lo, 0);
    }
    if (f_hi - target).abs() <= tol {
        return done(hi, f_hi, 0);
    }
    let straddles = if increasing {
        f_lo < target && f_hi > target
    } else {
        f_lo > target && f_hi < target
    };
    if !straddles {
        return Err(InversionError::NoBracket {
            target: target.to_f64_lossy(),
            lo_outage: f_lo.to_f64_lossy(),
            hi_outage: f_hi.to_f64_lossy(),
        });
    }
    let rel = T::lit(1e-9);
    let mut best = (lo, f_lo);
    for it in 1..=MAX_ITER {
        let mid = T::lit(0.5) * (lo + hi);
        let p = f(mid)?;
        if (p - target).abs() < (best.1 - target).abs() {
            best = (mid, p);
        }
        if (p - target).abs() <= tol || (hi - lo).abs() <= rel * mid.abs().max(T::one()) {
            return done(mid, p, it);
        }
        if (p < target) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    done(best.0, best.1, MAX_ITER)
}

/// One point of a tradeoff curve.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffPoint<T> {
    pub family: Family<T>,
    pub target_pout: T,
    /// (solved parameter, mean active SUs)
    pub result: Result<(T, T), InversionError>,
}

/// Solves each grid target and evaluates the mean number of active SUs.
/// Failed points are kept with their error.
pub fn tradeoff_curve<T: Real>(
    scenario: &Scenario<T>,
    family: Family<T>,
    pout_grid: &[T],
) -> Result<Vec<TradeoffPoint<T>>, InversionError> {
    let base = InterferenceKernel::new(scenario, Protocol::FullActivity)?;
    let tol = T::lit(DEFAULT_TOL);
    Ok(pout_grid
        .par_iter()
        .map(|&target| {
            let result = solve_with_kernel(&base, family, target, tol).and_then(|sol| {
                let k = base.with_protocol(sol.protocol)?;
                Ok((sol.parameter, mean_active(&k)?))
            });
            TradeoffPoint {
                family,
                target_pout: target,
                result,
            }
        })
        .collect())
}

/// CSV with columns protocol, target_pout, solved_parameter, mean_active.
/// Failed points become `#` comment rows.
pub fn write_tradeoff_csv<T: Real, W: Write>(points: &[TradeoffPoint<T>], mut out: W, header: bool) -> io::Result<()> {
    if header {
        writeln!(out, "protocol,target_pout,solved_parameter,mean_active")?;
    }
    for p in points {
        match &p.result {
            Ok((param, active)) => writeln!(out, "{},{:e},{:e},{}", p.family.name(), p.target_pout, param, active)?,
            Err(e) => writeln!(out, "# {},{:e},error: {}", p.family.name(), p.target_pout, e)?,
        }
    }
    Ok(())
}
