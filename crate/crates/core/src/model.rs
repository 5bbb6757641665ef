//! Scenario and protocol records, their validation, and derived quantities.

use thiserror::Error;

use crate::num::{Point, Real};

/// Vertices closer than this are considered repeated.
const VERTEX_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon vertex {index} repeats vertex {previous} (within 1e-9 m)")]
    RepeatedVertex { index: usize, previous: usize },
    #[error("polygon is not strictly convex at vertex {index} ({x}, {y})")]
    NotConvex { index: usize, x: f64, y: f64 },
    #[error("disk radius must be positive, got {0}")]
    BadDiskRadius(f64),
    #[error("PU-Rx at ({x}, {y}) is not strictly inside the region")]
    PuRxOutside { x: f64, y: f64 },
    #[error("exclusion radius epsilon = {epsilon} must be at least 1 m")]
    EpsilonTooSmall { epsilon: f64 },
    #[error("exclusion disk of radius {epsilon} exceeds the polygon: boundary is only {clearance} m from the PU-Rx")]
    ExclusionDiskExceedsRegion { epsilon: f64, clearance: f64 },
    #[error("desired-link fading parameter m0 = {0} must be a positive integer")]
    NonIntegerM0(f64),
    #[error("{name} = {value} out of range: {requirement}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },
}

fn out_of_range(name: &'static str, value: impl Real, requirement: &'static str) -> ModelError {
    ModelError::OutOfRange {
        name,
        value: value.to_f64_lossy(),
        requirement,
    }
}

/// Strictly convex polygon with counter-clockwise vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon<T> {
    vertices: Vec<Point<T>>,
}

/// One polygon side, with the outward unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge<T> {
    pub start: Point<T>,
    pub end: Point<T>,
    pub normal: Point<T>,
}

impl<T: Real> ConvexPolygon<T> {
    /// Builds a polygon from its vertex list. Clockwise input is reversed;
    /// anything else that is not strictly convex is rejected.
    pub fn new(mut vertices: Vec<Point<T>>) -> Result<Self, ModelError> {
        let n = vertices.len();
        if n < 3 {
            return Err(ModelError::TooFewVertices(n));
        }
        let tol = T::lit(VERTEX_TOL);
        for i in 0..n {
            for j in 0..i {
                if vertices[i].distance(vertices[j]) <= tol {
                    return Err(ModelError::RepeatedVertex { index: i, previous: j });
                }
            }
        }
        let reversed = signed_area(&vertices) < T::zero();
        if reversed {
            vertices.reverse();
        }
        for i in 0..n {
            let prev = vertices[(i + n - 1) % n];
            let cur = vertices[i];
            let next = vertices[(i + 1) % n];
            if !(cur.sub(prev).cross(next.sub(cur)) > T::zero()) {
                return Err(ModelError::NotConvex {
                    // index as given by the caller
                    index: if reversed { n - 1 - i } else { i },
                    x: cur.x.to_f64_lossy(),
                    y: cur.y.to_f64_lossy(),
                });
            }
        }
        Ok(Self { vertices })
    }

    /// Regular `sides`-gon inscribed in the circle of radius `circumradius`
    /// around `center`, with one vertex at angle `rotation`.
    pub fn regular(sides: usize, circumradius: T, center: Point<T>, rotation: T) -> Result<Self, ModelError> {
        if !(circumradius > T::zero()) {
            return Err(out_of_range("circumradius", circumradius, "must be positive"));
        }
        let step = T::TAU() / T::from_usize_lossy(sides.max(1));
        let vertices = (0..sides)
            .map(|k| {
                let a = rotation + step * T::from_usize_lossy(k);
                Point::new(center.x + circumradius * a.cos(), center.y + circumradius * a.sin())
            })
            .collect();
        Self::new(vertices)
    }

    pub fn vertices(&self) -> &[Point<T>] {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge<T>> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| {
            let start = self.vertices[i];
            let end = self.vertices[(i + 1) % n];
            let d = end.sub(start);
            let len = d.norm();
            Edge {
                start,
                end,
                normal: Point::new(d.y / len, -d.x / len),
            }
        })
    }

    pub fn area(&self) -> T {
        signed_area(&self.vertices)
    }

    /// Signed distance from `p` to the supporting line of each edge is
    /// negative inside; this returns the smallest interior clearance
    /// (negative when `p` is outside).
    pub fn clearance(&self, p: Point<T>) -> T {
        self.edges()
            .map(|e| -e.normal.dot(p.sub(e.start)))
            .fold(T::infinity(), T::min)
    }

    pub fn contains(&self, p: Point<T>) -> bool {
        self.edges().all(|e| e.normal.dot(p.sub(e.start)) <= T::zero())
    }
}

fn signed_area<T: Real>(v: &[Point<T>]) -> T {
    let n = v.len();
    let twice = (0..n).fold(T::zero(), |acc, i| acc + v[i].cross(v[(i + 1) % n]));
    twice * T::lit(0.5)
}

/// Outer boundary of the network region.
#[derive(Debug, Clone, PartialEq)]
pub enum Boundary<T> {
    Polygon(ConvexPolygon<T>),
    Disk { center: Point<T>, radius: T },
}

impl<T: Real> Boundary<T> {
    pub fn area(&self) -> T {
        match self {
            Boundary::Polygon(p) => p.area(),
            Boundary::Disk { radius, .. } => T::PI() * *radius * *radius,
        }
    }

    pub fn contains(&self, p: Point<T>) -> bool {
        match self {
            Boundary::Polygon(poly) => poly.contains(p),
            Boundary::Disk { center, radius } => p.distance(*center) <= *radius,
        }
    }

    /// Distance from an interior point to the nearest boundary point.
    pub fn clearance(&self, p: Point<T>) -> T {
        match self {
            Boundary::Polygon(poly) => poly.clearance(p),
            Boundary::Disk { center, radius } => *radius - p.distance(*center),
        }
    }

    /// Distance from `p` to the farthest boundary point.
    pub fn farthest_distance(&self, p: Point<T>) -> T {
        match self {
            Boundary::Polygon(poly) => poly.vertices().iter().map(|v| v.distance(p)).fold(T::zero(), T::max),
            Boundary::Disk { center, radius } => *radius + p.distance(*center),
        }
    }

    /// Minimal axis-aligned bounding box as (min corner, max corner).
    pub fn bounding_box(&self) -> (Point<T>, Point<T>) {
        match self {
            Boundary::Polygon(poly) => {
                let v = poly.vertices();
                let init = (v[0], v[0]);
                v.iter().fold(init, |(lo, hi), p| {
                    (
                        Point::new(lo.x.min(p.x), lo.y.min(p.y)),
                        Point::new(hi.x.max(p.x), hi.y.max(p.y)),
                    )
                })
            }
            Boundary::Disk { center, radius } => (
                Point::new(center.x - *radius, center.y - *radius),
                Point::new(center.x + *radius, center.y + *radius),
            ),
        }
    }
}

/// Region A with the PU-Rx and its exclusion disk B; SUs live in A' = A \ B.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkRegion<T> {
    boundary: Boundary<T>,
    pu_rx: Point<T>,
    epsilon: T,
    r_max: T,
}

impl<T: Real> NetworkRegion<T> {
    pub fn new(boundary: Boundary<T>, pu_rx: Point<T>, epsilon: T) -> Result<Self, ModelError> {
        if let Boundary::Disk { radius, .. } = &boundary {
            if !(*radius > T::zero()) {
                return Err(ModelError::BadDiskRadius(radius.to_f64_lossy()));
            }
        }
        let clearance = boundary.clearance(pu_rx);
        if !(clearance > T::zero()) {
            return Err(ModelError::PuRxOutside {
                x: pu_rx.x.to_f64_lossy(),
                y: pu_rx.y.to_f64_lossy(),
            });
        }
        if epsilon > clearance {
            return Err(ModelError::ExclusionDiskExceedsRegion {
                epsilon: epsilon.to_f64_lossy(),
                clearance: clearance.to_f64_lossy(),
            });
        }
        if !(epsilon >= T::one()) {
            return Err(ModelError::EpsilonTooSmall {
                epsilon: epsilon.to_f64_lossy(),
            });
        }
        let r_max = boundary.farthest_distance(pu_rx);
        Ok(Self {
            boundary,
            pu_rx,
            epsilon,
            r_max,
        })
    }

    pub fn boundary(&self) -> &Boundary<T> {
        &self.boundary
    }

    pub fn pu_rx(&self) -> Point<T> {
        self.pu_rx
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    /// Largest distance from the PU-Rx to any point of the region.
    pub fn r_max(&self) -> T {
        self.r_max
    }

    /// |A|
    pub fn area(&self) -> T {
        self.boundary.area()
    }

    /// |A'| = |A| − πε²
    pub fn usable_area(&self) -> T {
        self.boundary.area() - T::PI() * self.epsilon * self.epsilon
    }
}

/// Raw scenario parameters, before validation. Powers and thresholds are
/// linear; `m0` is kept real so a non-integer value can be reported.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec<T> {
    pub boundary: Boundary<T>,
    pub pu_rx: Point<T>,
    pub epsilon: T,
    pub m_sus: usize,
    pub p_t0: T,
    pub p_t: T,
    pub p_ts: T,
    pub r0: T,
    pub alpha: T,
    pub m0: T,
    pub mg: T,
    pub mh: T,
    pub beta: T,
    pub rho0: T,
}

impl<T: Real> ScenarioSpec<T> {
    /// Table I defaults (unit powers, β = 0 dB, ρ0 = 20 dB, r0 = 5 m,
    /// ε = 1 m, α = 2.5, m0 = mg = mh = 3) on the given region.
    pub fn with_defaults(boundary: Boundary<T>, pu_rx: Point<T>, m_sus: usize) -> Self {
        Self {
            boundary,
            pu_rx,
            epsilon: T::one(),
            m_sus,
            p_t0: T::one(),
            p_t: T::one(),
            p_ts: T::one(),
            r0: T::lit(5.0),
            alpha: T::lit(2.5),
            m0: T::lit(3.0),
            mg: T::lit(3.0),
            mh: T::lit(3.0),
            beta: T::one(),
            rho0: T::lit(100.0),
        }
    }

    pub fn validate(self) -> Result<Scenario<T>, ModelError> {
        let region = NetworkRegion::new(self.boundary, self.pu_rx, self.epsilon)?;
        if self.m_sus < 1 {
            return Err(out_of_range("M", T::zero(), "at least one SU"));
        }
        for (name, v) in [("p_t0", self.p_t0), ("p_t", self.p_t), ("p_ts", self.p_ts)] {
            if !(v > T::zero() && v.is_finite()) {
                return Err(out_of_range(name, v, "powers must be positive"));
            }
        }
        if !(self.r0 > T::zero()) {
            return Err(out_of_range("r0", self.r0, "must be positive"));
        }
        if !(self.alpha >= T::lit(2.0) && self.alpha <= T::lit(6.0)) {
            return Err(out_of_range("alpha", self.alpha, "2 ≤ alpha ≤ 6"));
        }
        if !(self.m0 >= T::one() && self.m0 == self.m0.floor() && self.m0 < T::lit(1e6)) {
            return Err(ModelError::NonIntegerM0(self.m0.to_f64_lossy()));
        }
        for (name, v) in [("mg", self.mg), ("mh", self.mh)] {
            if !(v >= T::lit(0.5) && v.is_finite()) {
                return Err(out_of_range(name, v, "Nakagami shape must be at least 0.5"));
            }
        }
        if !(self.beta > T::zero() && self.beta.is_finite()) {
            return Err(out_of_range("beta", self.beta, "SINR threshold must be positive"));
        }
        if !(self.rho0 > T::zero() && self.rho0.is_finite()) {
            return Err(out_of_range("rho0", self.rho0, "average SNR must be positive"));
        }
        Ok(Scenario {
            region,
            m_sus: self.m_sus,
            p_t0: self.p_t0,
            p_t: self.p_t,
            p_ts: self.p_ts,
            r0: self.r0,
            alpha: self.alpha,
            m0: self.m0.to_u32().unwrap_or(1),
            mg: self.mg,
            mh: self.mh,
            beta: self.beta,
            rho0: self.rho0,
        })
    }
}

/// A validated, immutable scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<T> {
    region: NetworkRegion<T>,
    m_sus: usize,
    p_t0: T,
    p_t: T,
    p_ts: T,
    r0: T,
    alpha: T,
    m0: u32,
    mg: T,
    mh: T,
    beta: T,
    rho0: T,
}

impl<T: Real> Scenario<T> {
    pub fn region(&self) -> &NetworkRegion<T> {
        &self.region
    }
    /// Number of SUs, M.
    pub fn m_sus(&self) -> usize {
        self.m_sus
    }
    pub fn p_t0(&self) -> T {
        self.p_t0
    }
    pub fn p_t(&self) -> T {
        self.p_t
    }
    pub fn p_ts(&self) -> T {
        self.p_ts
    }
    pub fn r0(&self) -> T {
        self.r0
    }
    pub fn alpha(&self) -> T {
        self.alpha
    }
    pub fn m0(&self) -> u32 {
        self.m0
    }
    pub fn mg(&self) -> T {
        self.mg
    }
    pub fn mh(&self) -> T {
        self.mh
    }
    pub fn beta(&self) -> T {
        self.beta
    }
    pub fn rho0(&self) -> T {
        self.rho0
    }

    /// Noise power N = P_T0 r0^{−α} / ρ0.
    pub fn noise_power(&self) -> T {
        self.p_t0 * self.r0.powf(-self.alpha) / self.rho0
    }

    pub fn r_max(&self) -> T {
        self.region.r_max()
    }

    pub fn to_spec(&self) -> ScenarioSpec<T> {
        ScenarioSpec {
            boundary: self.region.boundary.clone(),
            pu_rx: self.region.pu_rx,
            epsilon: self.region.epsilon,
            m_sus: self.m_sus,
            p_t0: self.p_t0,
            p_t: self.p_t,
            p_ts: self.p_ts,
            r0: self.r0,
            alpha: self.alpha,
            m0: T::from_u32(self.m0).unwrap_or(T::one()),
            mg: self.mg,
            mh: self.mh,
            beta: self.beta,
            rho0: self.rho0,
        }
    }

    /// Same scenario with a different SU count.
    pub fn with_m_sus(&self, m_sus: usize) -> Result<Self, ModelError> {
        ScenarioSpec {
            m_sus,
            ..self.to_spec()
        }
        .validate()
    }
}

/// SU activity protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Protocol<T> {
    /// Every SU transmits.
    FullActivity,
    /// SUs closer than `r_f` to the PU-Rx stay silent.
    GuardZone { r_f: T },
    /// An SU stays silent when the sensed PU-Rx power exceeds `gamma`.
    Threshold { gamma: T },
    /// Threshold decision combined by AND over all SUs within `r_c`.
    Cooperation { gamma: T, r_c: T },
}

impl<T: Real> Protocol<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Protocol::FullActivity => "full",
            Protocol::GuardZone { .. } => "guard_zone",
            Protocol::Threshold { .. } => "threshold",
            Protocol::Cooperation { .. } => "cooperation",
        }
    }

    /// The protocol parameter that inversion solves for, if any.
    pub fn parameter(&self) -> Option<T> {
        match *self {
            Protocol::FullActivity => None,
            Protocol::GuardZone { r_f } => Some(r_f),
            Protocol::Threshold { gamma } | Protocol::Cooperation { gamma, .. } => Some(gamma),
        }
    }

    pub fn validate(&self, scenario: &Scenario<T>) -> Result<(), ModelError> {
        match *self {
            Protocol::FullActivity => Ok(()),
            Protocol::GuardZone { r_f } => {
                if r_f >= scenario.region().epsilon() && r_f.is_finite() {
                    Ok(())
                } else {
                    Err(out_of_range("r_f", r_f, "guard radius must be at least epsilon"))
                }
            }
            Protocol::Threshold { gamma } => check_gamma(gamma),
            Protocol::Cooperation { gamma, r_c } => {
                check_gamma(gamma)?;
                if !(r_c >= T::zero() && r_c.is_finite()) {
                    return Err(out_of_range("r_c", r_c, "cooperation range must be non-negative"));
                }
                if T::PI() * r_c * r_c >= scenario.region().usable_area() {
                    return Err(out_of_range("r_c", r_c, "cooperation disk must be smaller than |A'|"));
                }
                Ok(())
            }
        }
    }
}

fn check_gamma<T: Real>(gamma: T) -> Result<(), ModelError> {
    if gamma > T::zero() && !gamma.is_nan() {
        Ok(())
    } else {
        Err(out_of_range("gamma", gamma, "activation threshold must be positive"))
    }
}

/// Validates a raw scenario together with the protocol to run on it.
pub fn validate<T: Real>(
    spec: ScenarioSpec<T>,
    protocol: Protocol<T>,
) -> Result<(Scenario<T>, Protocol<T>), ModelError> {
    let scenario = spec.validate()?;
    protocol.validate(&scenario)?;
    Ok((scenario, protocol))
}
