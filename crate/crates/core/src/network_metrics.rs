//! Network-level quantities for M i.i.d. SUs: aggregate MGF, cumulants,
//! outage probability at the PU-Rx and the mean number of active SUs.

use thiserror::Error;

use crate::num::Real;
use crate::protocol_kernel::{InterferenceKernel, KernelError};

/// Highest cumulant order supported.
pub const MAX_CUMULANT_ORDER: usize = 6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("cumulant order must be between 1 and {MAX_CUMULANT_ORDER}, got {0}")]
    CumulantOrder(usize),
}

/// M_agg(s) = M_I(s)^M.
pub fn aggregate_mgf<T: Real>(kernel: &InterferenceKernel<T>, s: T) -> Result<T, MetricsError> {
    let m = kernel.scenario().m_sus();
    Ok(kernel.single_mgf(s)?.powi(m as i32))
}

/// Single-SU moments and cumulants plus aggregate cumulants, orders 1..=n.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulantSet<T> {
    /// μ_I(1..=n)
    pub single_moments: Vec<T>,
    /// κ_I(1..=n)
    pub single: Vec<T>,
    /// κ_agg(1..=n) = M κ_I
    pub values: Vec<T>,
}

impl<T: Real> CumulantSet<T> {
    /// κ_agg(n), 1-based.
    pub fn get(&self, n: usize) -> T {
        self.values[n - 1]
    }

    /// E[I_aggⁿ] rebuilt from the cumulants.
    pub fn aggregate_raw_moments(&self) -> Vec<T> {
        raw_from_cumulants(&self.values)
    }

    /// Aggregate mean, variance and third central moment (when available).
    pub fn aggregate_central_moments(&self) -> Vec<T> {
        let k = &self.values;
        let mut out = vec![k[0]];
        if k.len() > 1 {
            out.push(k[1]);
        }
        if k.len() > 2 {
            out.push(k[2]);
        }
        out
    }
}

fn binomial<T: Real>(n: usize, k: usize) -> T {
    (0..k).fold(T::one(), |acc, i| {
        acc * T::from_usize_lossy(n - i) / T::from_usize_lossy(i + 1)
    })
}

/// κ(n) = μ(n) − Σ_{j=1}^{n−1} C(n−1, j−1) κ(j) μ(n−j).
pub fn cumulants_from_raw<T: Real>(mu: &[T]) -> Vec<T> {
    let mut kappa: Vec<T> = Vec::with_capacity(mu.len());
    for n in 1..=mu.len() {
        let mut k = mu[n - 1];
        for j in 1..n {
            k -= binomial::<T>(n - 1, j - 1) * kappa[j - 1] * mu[n - j - 1];
        }
        kappa.push(k);
    }
    kappa
}

/// Inverse of [`cumulants_from_raw`].
pub fn raw_from_cumulants<T: Real>(kappa: &[T]) -> Vec<T> {
    let mut mu: Vec<T> = Vec::with_capacity(kappa.len());
    for n in 1..=kappa.len() {
        let mut m = kappa[n - 1];
        for j in 1..n {
            m += binomial::<T>(n - 1, j - 1) * kappa[j - 1] * mu[n - j - 1];
        }
        mu.push(m);
    }
    mu
}

pub fn cumulants<T: Real>(kernel: &InterferenceKernel<T>, n_max: usize) -> Result<CumulantSet<T>, MetricsError> {
    if n_max == 0 || n_max > MAX_CUMULANT_ORDER {
        return Err(MetricsError::CumulantOrder(n_max));
    }
    let mu = (1..=n_max as u32)
        .map(|n| kernel.single_moment(n))
        .collect::<Result<Vec<T>, _>>()?;
    let single = cumulants_from_raw(&mu);
    let m = T::from_usize_lossy(kernel.scenario().m_sus());
    let values = single.iter().map(|&k| m * k).collect();
    Ok(CumulantSet {
        single_moments: mu,
        single,
        values,
    })
}

/// Average number of active SUs, M·μ_I(0).
pub fn mean_active<T: Real>(kernel: &InterferenceKernel<T>) -> Result<T, MetricsError> {
    Ok(T::from_usize_lossy(kernel.scenario().m_sus()) * kernel.single_moment(0)?)
}

/// Link constants of the outage expression.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageLink<T> {
    pub m0: u32,
    pub m_sus: usize,
    /// β/ρ0
    pub noise_term: T,
    /// β r0^α / P_T0
    pub interference_term: T,
}

impl<T: Real> OutageLink<T> {
    pub fn of(kernel: &InterferenceKernel<T>) -> Self {
        let s = kernel.scenario();
        Self {
            m0: s.m0(),
            m_sus: s.m_sus(),
            noise_term: s.beta() / s.rho0(),
            interference_term: s.beta() * s.r0().powf(s.alpha()) / s.p_t0(),
        }
    }

    /// s* = m0 β r0^α / P_T0
    pub fn s_star(&self) -> T {
        T::from_u32(self.m0).unwrap_or(T::one()) * self.interference_term
    }
}

/// (p · q) truncated to `len` coefficients.
fn mul_truncated<T: Real>(p: &[T], q: &[T], len: usize) -> Vec<T> {
    let mut out = vec![T::zero(); len];
    for (i, &a) in p.iter().enumerate().take(len) {
        for (j, &b) in q.iter().enumerate().take(len - i) {
            out[i + j] += a * b;
        }
    }
    out
}

/// Coefficients of Q(x)^M up to x^{len−1}, by repeated squaring.
pub fn truncated_power<T: Real>(q: &[T], m: usize, len: usize) -> Vec<T> {
    let mut result = vec![T::zero(); len];
    result[0] = T::one();
    let mut base: Vec<T> = q.iter().copied().take(len).collect();
    base.resize(len, T::zero());
    let mut e = m;
    while e > 0 {
        if e & 1 == 1 {
            result = mul_truncated(&result, &base, len);
        }
        e >>= 1;
        if e > 0 {
            base = mul_truncated(&base, &base, len);
        }
    }
    result
}

/// Outage probability from the weighted moments aₜ(s*), t = 0..m0−1.
///
/// P_out = 1 − e^{−m0β/ρ0} Σ_{k<m0} m0ᵏ/k! Σ_{j≤k} C(k,j) (β/ρ0)^{k−j}
/// (βr0^α/P_T0)ʲ E[I_aggʲ e^{−s* I_agg}], where the last factor is
/// j!·[xʲ] (Σₜ aₜ xᵗ/t!)^M.
pub fn outage_from_weighted_moments<T: Real>(weighted: &[T], link: &OutageLink<T>) -> T {
    let d = link.m0 as usize;
    let mut q = Vec::with_capacity(d);
    let mut fact = T::one();
    for (t, &w) in weighted.iter().enumerate().take(d) {
        if t > 0 {
            fact *= T::from_usize_lossy(t);
        }
        q.push(w / fact);
    }
    let power = truncated_power(&q, link.m_sus, d);
    // E[I_agg^j e^{−s* I_agg}] = j! [x^j] Q^M
    let mut agg = Vec::with_capacity(d);
    let mut fact = T::one();
    for (j, &c) in power.iter().enumerate() {
        if j > 0 {
            fact *= T::from_usize_lossy(j);
        }
        agg.push(fact * c);
    }
    let m0 = T::from_u32(link.m0).unwrap_or(T::one());
    let mut success = T::zero();
    let mut k_fact = T::one();
    for k in 0..d {
        if k > 0 {
            k_fact *= T::from_usize_lossy(k);
        }
        let mut inner = T::zero();
        for (j, &e) in agg.iter().enumerate().take(k + 1) {
            inner +=
                binomial::<T>(k, j) * link.noise_term.powi((k - j) as i32) * link.interference_term.powi(j as i32) * e;
        }
        success += m0.powi(k as i32) / k_fact * inner;
    }
    success = (-m0 * link.noise_term).exp() * success;
    (T::one() - success).max(T::zero()).min(T::one())
}

/// Spatially averaged outage probability at the PU-Rx.
pub fn outage_probability<T: Real>(kernel: &InterferenceKernel<T>) -> Result<T, MetricsError> {
    let link = OutageLink::of(kernel);
    let s = link.s_star();
    let weighted = (0..link.m0)
        .map(|t| kernel.single_weighted_moment(t, s))
        .collect::<Result<Vec<T>, _>>()?;
    Ok(outage_from_weighted_moments(&weighted, &link))
}

/// Outage with no interferers, 1 − P(m0, m0β/ρ0) complement.
pub fn noise_only_outage<T: Real>(m0: u32, beta: T, rho0: T) -> T {
    let link = OutageLink {
        m0,
        m_sus: 1,
        noise_term: beta / rho0,
        interference_term: T::zero(),
    };
    let mut w = vec![T::zero(); m0 as usize];
    w[0] = T::one();
    outage_from_weighted_moments(&w, &link)
}

/// Everything `analyze` reports for one protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis<T> {
    pub cumulants: CumulantSet<T>,
    pub outage: T,
    pub mean_active: T,
}

pub fn analyze<T: Real>(kernel: &InterferenceKernel<T>, n_max: usize) -> Result<Analysis<T>, MetricsError> {
    Ok(Analysis {
        cumulants: cumulants(kernel, n_max)?,
        outage: outage_probability(kernel)?,
        mean_active: mean_active(kernel)?,
    })
}
