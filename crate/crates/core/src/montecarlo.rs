//! Monte Carlo simulator of the network model.
//!
//! Trial `i` draws from its own ChaCha stream (`seed`, stream `i`), so any
//! trial can be replayed on its own. Trials are reduced in fixed-size blocks
//! whose partial statistics are merged in block order; the result does not
//! depend on the number of worker threads.

use std::io::{self, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::fading::{FadingError, NakagamiPower, PowerSampler};
use crate::geometry::sample_uniform;
use crate::model::{ModelError, Protocol, Scenario};
use crate::num::Point;

const BLOCK: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum McError {
    #[error("number of trials must be at least 1")]
    ZeroTrials,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Fading(#[from] FadingError),
}

/// How the per-trial outage contribution is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutageEstimator {
    /// P(SINR < β | I_agg) from the Gamma CDF of the desired-link gain.
    #[default]
    Conditional,
    /// 1{SINR < β} with the drawn desired-link gain.
    Indicator,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    pub estimator: OutageEstimator,
    /// Keep every [`TrialRecord`].
    pub keep_records: bool,
}

impl McConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self {
            trials,
            seed,
            estimator: OutageEstimator::default(),
            keep_records: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub trials: u64,
}

impl McEstimate {
    /// (analytic − value)/std_error; infinite when the estimate has no spread
    /// but differs from `analytic`.
    pub fn z_score(&self, analytic: f64) -> f64 {
        let diff = analytic - self.value;
        if self.std_error > 0.0 {
            diff / self.std_error
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY.copysign(diff)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRecord {
    pub aggregate_interference: f64,
    pub active_count: u32,
    pub outage_indicator: bool,
    /// P(outage | I_agg)
    pub outage_conditional: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McReport {
    /// E[I_agg], E[I_agg²], E[I_agg³]
    pub raw_moments: [McEstimate; 3],
    pub outage: McEstimate,
    pub mean_active: McEstimate,
    pub records: Option<Vec<TrialRecord>>,
}

#[derive(Debug, Clone, Copy, Default)]
struct Running {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Running {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(&mut self, o: &Running) {
        if o.n == 0.0 {
            return;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        self.mean += d * o.n / n;
        self.m2 += o.m2 + d * d * self.n * o.n / n;
        self.n = n;
    }

    fn estimate(&self, trials: u64) -> McEstimate {
        let var = if self.n > 1.0 { self.m2 / (self.n - 1.0) } else { 0.0 };
        McEstimate {
            value: self.mean,
            std_error: (var / self.n).sqrt(),
            trials,
        }
    }
}

#[derive(Debug, Clone, Default)]
struct Block {
    stats: [Running; 5],
    records: Vec<TrialRecord>,
}

struct Simulator<'a> {
    scenario: &'a Scenario<f64>,
    protocol: Protocol<f64>,
    seed: u64,
    estimator: OutageEstimator,
    g: PowerSampler,
    h: PowerSampler,
    g0: PowerSampler,
    g0_dist: NakagamiPower<f64>,
}

struct Scratch {
    pos: Vec<Point<f64>>,
    path: Vec<f64>,
    gain: Vec<f64>,
    initial: Vec<bool>,
    inactive: Vec<usize>,
}

impl Simulator<'_> {
    fn trial(&self, index: u64, sc: &mut Scratch) -> TrialRecord {
        let s = self.scenario;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        let pu = s.region().pu_rx();
        let alpha = s.alpha();
        let m = s.m_sus();
        sc.pos.clear();
        sc.path.clear();
        sc.gain.clear();
        sc.initial.clear();
        sc.inactive.clear();
        // Every random quantity is drawn for every protocol, so protocols
        // sharing a seed see the same network.
        for i in 0..m {
            let p = sample_uniform(s.region(), &mut rng);
            let path = p.distance(pu).powf(-alpha);
            let h = self.h.sample(&mut rng);
            let g = self.g.sample(&mut rng);
            let active = match self.protocol {
                Protocol::FullActivity => true,
                Protocol::GuardZone { r_f } => p.distance(pu) > r_f,
                Protocol::Threshold { gamma } | Protocol::Cooperation { gamma, .. } => s.p_ts() * h * path <= gamma,
            };
            if !active {
                sc.inactive.push(i);
            }
            sc.pos.push(p);
            sc.path.push(path);
            sc.gain.push(g);
            sc.initial.push(active);
        }
        let g0 = self.g0.sample(&mut rng);

        let r_c2 = match self.protocol {
            Protocol::Cooperation { r_c, .. } => r_c * r_c,
            _ => 0.0,
        };
        let mut interference = 0.0;
        let mut active_count = 0u32;
        for i in 0..m {
            if !sc.initial[i] {
                continue;
            }
            // AND rule: any initially inactive neighbour within r_c vetoes.
            if r_c2 > 0.0 {
                let me = sc.pos[i];
                let vetoed = sc.inactive.iter().any(|&j| {
                    let d = sc.pos[j].sub(me);
                    d.dot(d) < r_c2
                });
                if vetoed {
                    continue;
                }
            }
            active_count += 1;
            interference += s.p_t() * sc.gain[i] * sc.path[i];
        }

        let desired = s.p_t0() * s.r0().powf(-alpha);
        let noise = s.noise_power();
        let outage_indicator = desired * g0 / (noise + interference) < s.beta();
        let threshold = s.beta() * (noise + interference) / desired;
        let outage_conditional = self.g0_dist.power_cdf(threshold);
        TrialRecord {
            aggregate_interference: interference,
            active_count,
            outage_indicator,
            outage_conditional,
        }
    }

    fn block(&self, start: u64, end: u64, keep: bool) -> Block {
        let m = self.scenario.m_sus();
        let mut sc = Scratch {
            pos: Vec::with_capacity(m),
            path: Vec::with_capacity(m),
            gain: Vec::with_capacity(m),
            initial: Vec::with_capacity(m),
            inactive: Vec::with_capacity(m),
        };
        let mut b = Block::default();
        for i in start..end {
            let rec = self.trial(i, &mut sc);
            let x = rec.aggregate_interference;
            b.stats[0].push(x);
            b.stats[1].push(x * x);
            b.stats[2].push(x * x * x);
            b.stats[3].push(match self.estimator {
                OutageEstimator::Conditional => rec.outage_conditional,
                OutageEstimator::Indicator => f64::from(u8::from(rec.outage_indicator)),
            });
            b.stats[4].push(f64::from(rec.active_count));
            if keep {
                b.records.push(rec);
            }
        }
        b
    }
}

/// Runs `trials` independent network realizations.
pub fn run(scenario: &Scenario<f64>, protocol: Protocol<f64>, trials: u64, seed: u64) -> Result<McReport, McError> {
    run_with(scenario, protocol, &McConfig::new(trials, seed))
}

pub fn run_with(scenario: &Scenario<f64>, protocol: Protocol<f64>, config: &McConfig) -> Result<McReport, McError> {
    if config.trials == 0 {
        return Err(McError::ZeroTrials);
    }
    protocol.validate(scenario)?;
    let sim = Simulator {
        scenario,
        protocol,
        seed: config.seed,
        estimator: config.estimator,
        g: PowerSampler::new(scenario.mg())?,
        h: PowerSampler::new(scenario.mh())?,
        g0: PowerSampler::new(f64::from(scenario.m0()))?,
        g0_dist: NakagamiPower::new(f64::from(scenario.m0()))?,
    };
    let n_blocks = config.trials.div_ceil(BLOCK);
    let blocks: Vec<Block> = (0..n_blocks)
        .into_par_iter()
        .map(|b| sim.block(b * BLOCK, ((b + 1) * BLOCK).min(config.trials), config.keep_records))
        .collect();

    let mut total = [Running::default(); 5];
    let mut records = config.keep_records.then(|| Vec::with_capacity(config.trials as usize));
    for b in blocks {
        for (t, s) in total.iter_mut().zip(b.stats.iter()) {
            t.merge(s);
        }
        if let Some(r) = records.as_mut() {
            r.extend(b.records);
        }
    }
    let n = config.trials;
    Ok(McReport {
        raw_moments: [total[0].estimate(n), total[1].estimate(n), total[2].estimate(n)],
        outage: total[3].estimate(n),
        mean_active: total[4].estimate(n),
        records,
    })
}

/// Writes one CSV row per trial.
pub fn write_records_csv<W: Write>(records: &[TrialRecord], mut out: W) -> io::Result<()> {
    writeln!(
        out,
        "trial,aggregate_interference,active_count,outage_indicator,outage_conditional"
    )?;
    for (i, r) in records.iter().enumerate() {
        writeln!(
            out,
            "{},{:e},{},{},{:e}",
            i,
            r.aggregate_interference,
            r.active_count,
            u8::from(r.outage_indicator),
            r.outage_conditional
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network_metrics::noise_only_outage;
    use crate::presets;

    fn quad(m: usize) -> Scenario<f64> {
        presets::quadrilateral_scenario(150.0_f64, m).validate().unwrap()
    }

    #[test]
    fn zero_trials_rejected() {
        assert_eq!(
            run(&quad(10), Protocol::FullActivity, 0, 1).unwrap_err(),
            McError::ZeroTrials
        );
    }

    #[test]
    fn guard_zone_covering_region_is_noise_only() {
        let s = quad(20);
        let rep = run(&s, Protocol::GuardZone { r_f: s.r_max() }, 2000, 3).unwrap();
        assert_eq!(rep.raw_moments[0].value, 0.0);
        assert_eq!(rep.mean_active.value, 0.0);
        let exact = noise_only_outage(3, 1.0, 100.0);
        assert!((rep.outage.value - exact).abs() < 1e-12);
    }

    #[test]
    fn cooperation_without_range_replays_threshold() {
        let s = quad(30);
        let cfg = McConfig {
            keep_records: true,
            ..McConfig::new(500, 11)
        };
        let a = run_with(&s, Protocol::Threshold { gamma: 1e-4 }, &cfg).unwrap();
        let b = run_with(&s, Protocol::Cooperation { gamma: 1e-4, r_c: 0.0 }, &cfg).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a, b);
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let s = quad(20);
        let p = Protocol::Cooperation { gamma: 1e-4, r_c: 8.0 };
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| run(&s, p, 10_000, 5).unwrap());
        let b = four.install(|| run(&s, p, 10_000, 5).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn records_respect_bounds() {
        let s = quad(25);
        let cfg = McConfig {
            keep_records: true,
            ..McConfig::new(300, 2)
        };
        let rep = run_with(&s, Protocol::Cooperation { gamma: 1e-4, r_c: 8.0 }, &cfg).unwrap();
        for r in rep.records.unwrap() {
            assert!(r.active_count <= 25);
            assert!(r.aggregate_interference >= 0.0);
            assert!((0.0..=1.0).contains(&r.outage_conditional));
        }
    }

    #[test]
    fn csv_dump_layout() {
        let recs = [TrialRecord {
            aggregate_interference: 0.5,
            active_count: 3,
            outage_indicator: true,
            outage_conditional: 0.25,
        }];
        let mut buf = Vec::new();
        write_records_csv(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().nth(1).unwrap(), "0,5e-1,3,1,2.5e-1");
    }
}
