// Shared by the integration tests and the acceptance runner.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use underlay_core::inversion::{solve_parameter, Family};
use underlay_core::model::{Boundary, ConvexPolygon, ScenarioSpec};
use underlay_core::network_metrics::{
    cumulants, noise_only_outage, outage_from_weighted_moments, outage_probability, OutageLink,
};
use underlay_core::num::Point;
use underlay_core::quadrature::QuadSettings;
use underlay_core::{presets, DistanceProfile, InterferenceKernel, Protocol, Scenario};

pub type Check = Result<(), String>;

pub fn quad(m: usize) -> Scenario {
    presets::quadrilateral_scenario(150.0_f64, m).validate().unwrap()
}

pub fn disk(w: f64, m: usize) -> Scenario {
    presets::disk_scenario(w, m).validate().unwrap()
}

pub fn hexagon(w: f64, m: usize) -> Scenario {
    presets::regular_polygon_scenario(6, w, m).validate().unwrap()
}

/// Irregular pentagon with the PU-Rx off centre.
pub fn pentagon(m: usize) -> Scenario {
    let v = [(0.0, 0.0), (120.0, -10.0), (160.0, 70.0), (90.0, 140.0), (-20.0, 90.0)];
    let poly = ConvexPolygon::new(v.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap();
    ScenarioSpec::with_defaults(Boundary::Polygon(poly), Point::new(60.0, 50.0), m)
        .validate()
        .unwrap()
}

pub fn named_scenarios() -> Vec<(&'static str, Scenario)> {
    vec![
        ("quadrilateral", quad(100)),
        ("disk", disk(100.0, 100)),
        ("hexagon", hexagon(100.0, 50)),
        ("pentagon", pentagon(80)),
    ]
}

pub fn protocols() -> [Protocol; 4] {
    [
        Protocol::FullActivity,
        Protocol::GuardZone { r_f: 20.0 },
        Protocol::Threshold { gamma: 1e-4 },
        Protocol::Cooperation { gamma: 1e-4, r_c: 5.0 },
    ]
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn mgf_normalization_and_monotonicity() -> Check {
    for (name, s) in named_scenarios() {
        for p in protocols() {
            let k = InterferenceKernel::new(&s, p).map_err(|e| e.to_string())?;
            let m0 = k.single_mgf(0.0).map_err(|e| e.to_string())?;
            ensure((m0 - 1.0).abs() <= 1e-12, || {
                format!("{name}/{}: M_I(0) = {m0}", p.name())
            })?;
            let mut prev = m0;
            for i in 0..100 {
                let s_val = 10f64.powf(-1.0 + 11.0 * f64::from(i) / 99.0);
                let v = k.single_mgf(s_val).map_err(|e| e.to_string())?;
                ensure((0.0..=1.0).contains(&v) && v <= prev + 1e-13, || {
                    format!("{name}/{}: M_I({s_val:e}) = {v} after {prev}", p.name())
                })?;
                prev = v;
            }
        }
    }
    Ok(())
}

pub fn pdf_normalization() -> Check {
    let set = QuadSettings::default();
    for (name, s) in named_scenarios() {
        let prof = DistanceProfile::new(s.region());
        let total = prof
            .expectation(|_| 1.0, prof.epsilon(), prof.r_max(), &[], &set)
            .map_err(|e| e.to_string())?;
        ensure((total - 1.0).abs() <= 1e-9, || format!("{name}: ∫f_R = {total}"))?;
        let cdf_end = prof.cdf(prof.r_max());
        ensure(
            (cdf_end - 1.0).abs() <= 1e-12 && prof.cdf(prof.epsilon()).abs() <= 1e-12,
            || format!("{name}: F_R endpoints {} {cdf_end}", prof.cdf(prof.epsilon())),
        )?;
    }
    Ok(())
}

pub fn cdf_pdf_consistency() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for (name, s) in named_scenarios() {
        let prof = DistanceProfile::new(s.region());
        let (lo, hi) = (prof.epsilon(), prof.r_max());
        let h = 1e-5 * hi;
        let peak = (0..200)
            .map(|i| prof.pdf(lo + (hi - lo) * f64::from(i) / 199.0))
            .fold(0.0, f64::max);
        let mut checked = 0;
        while checked < 100 {
            let r = rng.random_range(lo + 2.0 * h..hi - 2.0 * h);
            if prof.breakpoints().iter().any(|&b| (b - r).abs() < 2.0 * h) {
                continue;
            }
            let fd = (prof.cdf(r + h) - prof.cdf(r - h)) / (2.0 * h);
            let pdf = prof.pdf(r);
            ensure((fd - pdf).abs() <= 1e-6 * peak.max(pdf), || {
                format!("{name}: r = {r}, dF/dr = {fd}, f_R = {pdf}")
            })?;
            checked += 1;
        }
    }
    Ok(())
}

pub fn cumulant_variance_identity() -> Check {
    for (name, s) in named_scenarios() {
        for p in protocols() {
            let k = InterferenceKernel::new(&s, p).map_err(|e| e.to_string())?;
            let c = cumulants(&k, 3).map_err(|e| e.to_string())?;
            let m = s.m_sus() as f64;
            let mu = &c.single_moments;
            let var = m * (mu[1] - mu[0] * mu[0]);
            ensure(rel_diff(c.get(2), var) <= 1e-12, || {
                format!("{name}/{}: κ2 = {}, M·Var = {var}", p.name(), c.get(2))
            })?;
            let central = c.aggregate_central_moments();
            ensure(
                rel_diff(central[1], c.get(2)) <= 1e-9 && rel_diff(central[2], c.get(3)) <= 1e-9,
                || format!("{name}/{}: central {central:?} vs κ {:?}", p.name(), c.values),
            )?;
        }
    }
    Ok(())
}

/// With m0 = 1: P_out = 1 − e^{−β/ρ0} M_I(s*)^M.
pub fn rayleigh_outage_identity() -> Check {
    for (name, s) in named_scenarios() {
        let mut spec = s.to_spec();
        spec.m0 = 1.0;
        let s1 = spec.validate().map_err(|e| e.to_string())?;
        for p in protocols() {
            let k = InterferenceKernel::new(&s1, p).map_err(|e| e.to_string())?;
            let link = OutageLink::of(&k);
            let mgf = k.single_mgf(link.s_star()).map_err(|e| e.to_string())?;
            let expect = 1.0 - (-link.noise_term).exp() * mgf.powi(s1.m_sus() as i32);
            let got = outage_probability(&k).map_err(|e| e.to_string())?;
            ensure(rel_diff(got, expect) <= 1e-12, || {
                format!("{name}/{}: P_out = {got}, closed form {expect}", p.name())
            })?;
        }
    }
    Ok(())
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// E[I_agg^j e^{−s I_agg}] summed over every exponent assignment (j_1..j_M).
fn brute_force_weighted(a: &[f64], m: usize, j: usize) -> f64 {
    fn walk(a: &[f64], left_users: usize, left_power: usize, acc: f64, out: &mut f64) {
        if left_users == 0 {
            if left_power == 0 {
                *out += acc;
            }
            return;
        }
        for t in 0..=left_power {
            walk(a, left_users - 1, left_power - t, acc * a[t] / factorial(t), out);
        }
    }
    let mut out = 0.0;
    walk(a, m, j, 1.0, &mut out);
    factorial(j) * out
}

pub fn brute_force_outage(a: &[f64], link: &OutageLink<f64>) -> f64 {
    let m0 = link.m0 as f64;
    let mut success = 0.0;
    for k in 0..link.m0 as usize {
        let mut inner = 0.0;
        for j in 0..=k {
            let binom = factorial(k) / (factorial(j) * factorial(k - j));
            inner += binom
                * link.noise_term.powi((k - j) as i32)
                * link.interference_term.powi(j as i32)
                * brute_force_weighted(a, link.m_sus, j);
        }
        success += m0.powi(k as i32) / factorial(k) * inner;
    }
    1.0 - (-m0 * link.noise_term).exp() * success
}

pub fn multinomial_exactness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for m0 in 1..=3u32 {
        for m in 1..=5usize {
            for _ in 0..20 {
                let link = OutageLink {
                    m0,
                    m_sus: m,
                    noise_term: rng.random_range(0.005..0.2),
                    interference_term: rng.random_range(1.0..40.0),
                };
                // moments of a discrete single-SU interference law with an atom at 0
                let atoms: Vec<(f64, f64)> = (0..4)
                    .map(|_| (rng.random_range(0.0..0.25), rng.random_range(0.0..0.05)))
                    .collect();
                let s_star = link.s_star();
                let a: Vec<f64> = (0..m0 as i32)
                    .map(|t| {
                        let tail: f64 = atoms.iter().map(|&(w, x)| w * x.powi(t) * (-s_star * x).exp()).sum();
                        let zero_mass = 1.0 - atoms.iter().map(|a| a.0).sum::<f64>();
                        if t == 0 {
                            tail + zero_mass
                        } else {
                            tail
                        }
                    })
                    .collect();
                let fast = outage_from_weighted_moments(&a, &link);
                let slow = brute_force_outage(&a, &link);
                ensure((fast - slow).abs() <= 1e-12, || {
                    format!("m0 = {m0}, M = {m}: generating polynomial {fast}, multinomial {slow}")
                })?;
            }
        }
    }
    // real kernels, whole pipeline
    for m in 1..=5usize {
        let s = quad(m);
        for p in protocols() {
            let k = InterferenceKernel::new(&s, p).map_err(|e| e.to_string())?;
            let link = OutageLink::of(&k);
            let a = (0..link.m0)
                .map(|t| k.single_weighted_moment(t, link.s_star()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?;
            let slow = brute_force_outage(&a, &link);
            let fast = outage_probability(&k).map_err(|e| e.to_string())?;
            ensure((fast - slow).abs() <= 1e-12, || {
                format!("M = {m}/{}: {fast} vs {slow}", p.name())
            })?;
        }
    }
    Ok(())
}

pub fn inversion_round_trip() -> Check {
    let s = quad(100);
    let full = outage_probability(&InterferenceKernel::new(&s, Protocol::FullActivity).unwrap()).unwrap();
    let noise = noise_only_outage(s.m0(), s.beta(), s.rho0());
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for family in [Family::GuardZone, Family::Threshold, Family::Cooperation { r_c: 8.0 }] {
        for _ in 0..10 {
            // log-uniform between just above the noise floor and full activity
            let u: f64 = rng.random_range(0.02..0.98);
            let target = (noise.ln() + u * (full.ln() - noise.ln())).exp();
            let sol = solve_parameter(&s, family, target, 1e-6).map_err(|e| format!("{}: {e}", family.name()))?;
            let k = InterferenceKernel::new(&s, sol.protocol).map_err(|e| e.to_string())?;
            let back = outage_probability(&k).map_err(|e| e.to_string())?;
            ensure((back - target).abs() <= 1e-6, || {
                format!(
                    "{} target {target}: parameter {} gives {back}",
                    family.name(),
                    sol.parameter
                )
            })?;
        }
    }
    Ok(())
}

pub type Property = (&'static str, fn() -> Check);

pub const PROPERTY_SUITE: [Property; 7] = [
    ("MGF normalization and monotonicity", mgf_normalization_and_monotonicity),
    ("PDF normalization", pdf_normalization),
    ("CDF/PDF finite differences", cdf_pdf_consistency),
    ("cumulant-variance identity", cumulant_variance_identity),
    ("m0 = 1 outage identity", rayleigh_outage_identity),
    ("generating polynomial vs multinomial", multinomial_exactness),
    ("inversion round trip", inversion_round_trip),
];

/// Every quantity the reductions must preserve, for one protocol.
fn fingerprint(s: &Scenario, p: Protocol, s_grid: &[f64]) -> Result<Vec<f64>, String> {
    let k = InterferenceKernel::new(s, p).map_err(|e| e.to_string())?;
    let mut v = Vec::new();
    for &x in s_grid {
        v.push(k.single_mgf(x).map_err(|e| e.to_string())?);
    }
    for n in 0..=3 {
        v.push(k.single_moment(n).map_err(|e| e.to_string())?);
    }
    v.push(outage_probability(&k).map_err(|e| e.to_string())?);
    v.push(underlay_core::network_metrics::mean_active(&k).map_err(|e| e.to_string())?);
    Ok(v)
}

/// Cooperation(γ, 0) against Threshold(γ) and GuardZone(ε) against
/// FullActivity on three scenarios at ten parameter points each.
/// Returns the largest relative deviation.
pub fn reduction_identities() -> Result<f64, String> {
    let s_grid = [1.0, 1e2, 1e4];
    let mut worst: f64 = 0.0;
    for (name, s) in named_scenarios().into_iter().take(3) {
        let eps = s.region().epsilon();
        for i in 0..10 {
            let gamma = 10f64.powf(-7.0 + 5.0 * f64::from(i) / 9.0);
            let a = fingerprint(&s, Protocol::Cooperation { gamma, r_c: 0.0 }, &s_grid)?;
            let b = fingerprint(&s, Protocol::Threshold { gamma }, &s_grid)?;
            for (x, y) in a.iter().zip(&b) {
                worst = worst.max(rel_diff(*x, *y));
            }
            // guard zone at ε, probed at ten transform points
            let s_pts: Vec<f64> = (0..10).map(|j| 10f64.powi(j - 2) * (1.0 + f64::from(i))).collect();
            let g = fingerprint(&s, Protocol::GuardZone { r_f: eps }, &s_pts)?;
            let f = fingerprint(&s, Protocol::FullActivity, &s_pts)?;
            for (x, y) in g.iter().zip(&f) {
                worst = worst.max(rel_diff(*x, *y));
            }
        }
        if worst > 1e-12 {
            return Err(format!("{name}: relative deviation {worst:e}"));
        }
    }
    Ok(worst)
}

/// Quadrature pipeline against the regular-polygon closed forms
/// (L = 4, 6, 512; n = 1..3) and the 512-gon against the disk annulus.
/// Returns (worst closed-form deviation, worst disk-limit deviation).
pub fn closed_form_agreement() -> Result<(f64, f64), String> {
    use underlay_core::protocol_kernel::closed_form::{
        closed_form_regular_polygon, ClosedFormKind, RegularPolygonParams,
    };
    let w = 100.0;
    let r_f = 30.0;
    let gamma = 1e-4;
    let mut worst: f64 = 0.0;
    let mut worst_disk: f64 = 0.0;
    for sides in [4usize, 6, 512] {
        let s = presets::regular_polygon_scenario(sides, w, 50)
            .validate()
            .map_err(|e| e.to_string())?;
        let params = RegularPolygonParams::from_scenario(&s, Some(sides), w);
        let disk = RegularPolygonParams::from_scenario(&s, None, w);
        let guard = InterferenceKernel::new(&s, Protocol::GuardZone { r_f }).map_err(|e| e.to_string())?;
        let threshold = InterferenceKernel::new(&s, Protocol::Threshold { gamma }).map_err(|e| e.to_string())?;
        let mut cases: Vec<(ClosedFormKind<f64>, f64)> = Vec::new();
        for n in 1..=3u32 {
            cases.push((
                ClosedFormKind::MomentGuard { r_f, n },
                guard.single_moment(n).map_err(|e| e.to_string())?,
            ));
            cases.push((
                ClosedFormKind::MomentThreshold { gamma, n },
                threshold.single_moment(n).map_err(|e| e.to_string())?,
            ));
        }
        for s_val in [1.0, 1e2, 1e4, 1e6] {
            cases.push((
                ClosedFormKind::MgfGuard { r_f, s: s_val },
                guard.single_mgf(s_val).map_err(|e| e.to_string())?,
            ));
        }
        for (kind, quad) in cases {
            let closed = closed_form_regular_polygon(kind, &params).map_err(|e| e.to_string())?;
            let dev = rel_diff(quad, closed);
            if dev > 1e-6 {
                return Err(format!(
                    "L = {sides}, {kind:?}: quadrature {quad:e}, closed form {closed:e}"
                ));
            }
            worst = worst.max(dev);
            if sides == 512 {
                let annulus = closed_form_regular_polygon(kind, &disk).map_err(|e| e.to_string())?;
                let dev = rel_diff(quad, annulus);
                if dev > 1e-3 {
                    return Err(format!("512-gon {kind:?}: {quad:e}, disk {annulus:e}"));
                }
                worst_disk = worst_disk.max(dev);
            }
        }
    }
    Ok((worst, worst_disk))
}
