//! Distance distribution of a uniform point in A' = region \ exclusion disk,
//! measured from the PU-Rx.
//!
//! The density is f_R(r) = r·λ(r)/|A'|, where λ(r) is the angular length of
//! the circle of radius r around the PU-Rx that lies inside the region. For a
//! polygon λ(r) = 2π minus the union of the arcs cut off by each edge (an edge
//! at perpendicular distance d < r removes the arc of half-width arccos(d/r)
//! around its outward normal). The CDF is computed independently from the
//! exact area of the disk–region intersection.

use rand::Rng;
use thiserror::Error;

use crate::model::{Boundary, NetworkRegion};
use crate::num::{Point, Real};
use crate::quadrature::{integrate_pieces, QuadSettings, QuadratureError};

/// Breakpoints closer than this (relative to r_max) are merged.
const BREAK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("radius {r} outside the support [{lo}, {hi}]")]
    OutOfSupport { r: f64, lo: f64, hi: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

#[derive(Debug, Clone, Copy)]
struct Cut<T> {
    distance: T,
    normal_angle: T,
}

/// Precomputed piecewise description of f_R and F_R.
#[derive(Debug, Clone)]
pub struct DistanceProfile<T> {
    region: NetworkRegion<T>,
    cuts: Vec<Cut<T>>,
    breakpoints: Vec<T>,
    area_prime: T,
}

impl<T: Real> DistanceProfile<T> {
    pub fn new(region: &NetworkRegion<T>) -> Self {
        let pu = region.pu_rx();
        let eps = region.epsilon();
        let r_max = region.r_max();
        let mut cuts = Vec::new();
        let mut candidates = vec![eps, r_max];
        match region.boundary() {
            Boundary::Polygon(poly) => {
                for e in poly.edges() {
                    let distance = e.normal.dot(e.start.sub(pu));
                    cuts.push(Cut {
                        distance,
                        normal_angle: e.normal.y.atan2(e.normal.x),
                    });
                    candidates.push(distance);
                }
                candidates.extend(poly.vertices().iter().map(|v| v.distance(pu)));
            }
            Boundary::Disk { center, radius } => {
                let offset = pu.distance(*center);
                candidates.push(*radius - offset);
            }
        }
        candidates.retain(|&b| b >= eps && b <= r_max);
        candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let tol = T::lit(BREAK_TOL) * r_max.max(T::one());
        let mut breakpoints: Vec<T> = Vec::with_capacity(candidates.len());
        for b in candidates {
            match breakpoints.last() {
                Some(&last) if b - last <= tol => {}
                _ => breakpoints.push(b),
            }
        }
        // Keep the exact end points.
        if let Some(last) = breakpoints.last_mut() {
            *last = r_max;
        }
        Self {
            region: region.clone(),
            cuts,
            breakpoints,
            area_prime: region.usable_area(),
        }
    }

    pub fn region(&self) -> &NetworkRegion<T> {
        &self.region
    }

    /// Sorted critical radii from ε to r_max.
    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    /// |A'|
    pub fn area_prime(&self) -> T {
        self.area_prime
    }

    pub fn epsilon(&self) -> T {
        self.region.epsilon()
    }

    pub fn r_max(&self) -> T {
        self.region.r_max()
    }

    fn check_support(&self, r: T) -> Result<T, GeometryError> {
        let lo = self.epsilon();
        let hi = self.r_max();
        let slack = T::lit(BREAK_TOL) * hi.max(T::one());
        if r >= lo - slack && r <= hi + slack {
            Ok(r.max(lo).min(hi))
        } else {
            Err(GeometryError::OutOfSupport {
                r: r.to_f64_lossy(),
                lo: lo.to_f64_lossy(),
                hi: hi.to_f64_lossy(),
            })
        }
    }

    /// λ(r): angular length (radians) of the circle of radius `r` around the
    /// PU-Rx that lies inside the region.
    pub fn angular_measure(&self, r: T) -> Result<T, GeometryError> {
        let r = self.check_support(r)?;
        Ok(self.angular_measure_unchecked(r))
    }

    fn angular_measure_unchecked(&self, r: T) -> T {
        let tau = T::TAU();
        match self.region.boundary() {
            Boundary::Disk { center, radius } => {
                let d = self.region.pu_rx().distance(*center);
                if r <= *radius - d {
                    tau
                } else if r >= *radius + d {
                    T::zero()
                } else {
                    let c = (r * r + d * d - *radius * *radius) / (T::lit(2.0) * r * d);
                    T::lit(2.0) * c.max(-T::one()).min(T::one()).acos()
                }
            }
            Boundary::Polygon(_) => {
                let mut arcs: Vec<(T, T)> = Vec::with_capacity(2 * self.cuts.len());
                for cut in &self.cuts {
                    if cut.distance < r {
                        // Clamped so radii a hair past a breakpoint behave as the limit.
                        let half = (cut.distance / r).min(T::one()).acos();
                        let mut lo = (cut.normal_angle - half) % tau;
                        if lo < T::zero() {
                            lo += tau;
                        }
                        let hi = lo + T::lit(2.0) * half;
                        if hi > tau {
                            arcs.push((lo, tau));
                            arcs.push((T::zero(), hi - tau));
                        } else {
                            arcs.push((lo, hi));
                        }
                    }
                }
                if arcs.is_empty() {
                    return tau;
                }
                arcs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
                let mut covered = T::zero();
                let (mut cur_lo, mut cur_hi) = arcs[0];
                for &(lo, hi) in &arcs[1..] {
                    if lo <= cur_hi {
                        cur_hi = cur_hi.max(hi);
                    } else {
                        covered += cur_hi - cur_lo;
                        cur_lo = lo;
                        cur_hi = hi;
                    }
                }
                covered += cur_hi - cur_lo;
                (tau - covered).max(T::zero())
            }
        }
    }

    /// f_R(r); zero outside [ε, r_max].
    pub fn pdf(&self, r: T) -> T {
        if r < self.epsilon() || r > self.r_max() {
            return T::zero();
        }
        r * self.angular_measure_unchecked(r) / self.area_prime
    }

    /// F_R(r) from the exact area of disk(PU-Rx, r) ∩ region.
    pub fn cdf(&self, r: T) -> T {
        let eps = self.epsilon();
        if r <= eps {
            return T::zero();
        }
        if r >= self.r_max() {
            return T::one();
        }
        let area = disk_region_intersection(self.region.boundary(), self.region.pu_rx(), r);
        ((area - T::PI() * eps * eps) / self.area_prime)
            .max(T::zero())
            .min(T::one())
    }

    /// Breakpoints inside (lo, hi) plus the ends and any `extra` points.
    pub fn split_points(&self, lo: T, hi: T, extra: &[T]) -> Vec<T> {
        let mut pts = vec![lo, hi];
        pts.extend(self.breakpoints.iter().copied().filter(|&b| b > lo && b < hi));
        pts.extend(extra.iter().copied().filter(|&b| b > lo && b < hi));
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        pts
    }

    /// ∫_lo^hi g(r) f_R(r) dr, split at every breakpoint and at `extra`.
    pub fn expectation<G>(
        &self,
        mut g: G,
        lo: T,
        hi: T,
        extra: &[T],
        settings: &QuadSettings<T>,
    ) -> Result<T, GeometryError>
    where
        G: FnMut(T) -> T,
    {
        let lo = self.check_support(lo)?;
        let hi = self.check_support(hi)?;
        if hi <= lo {
            return Ok(T::zero());
        }
        let pts = self.split_points(lo, hi, extra);
        let result = integrate_pieces(|r| g(r) * self.pdf(r), &pts, settings)?;
        Ok(result.value)
    }

    /// Partial moment ∫_l^u rⁿ f_R(r) dr with the default tolerances.
    pub fn partial_moment(&self, n: T, l: T, u: T) -> Result<T, GeometryError> {
        self.partial_moment_with(n, l, u, &QuadSettings::default())
    }

    pub fn partial_moment_with(&self, n: T, l: T, u: T, settings: &QuadSettings<T>) -> Result<T, GeometryError> {
        self.expectation(|r| r.powf(n), l, u, &[], settings)
    }
}

/// Area of the intersection of the disk of radius `r` around `p` with the region.
pub fn disk_region_intersection<T: Real>(boundary: &Boundary<T>, p: Point<T>, r: T) -> T {
    match boundary {
        Boundary::Disk { center, radius } => lens_area(r, *radius, p.distance(*center)),
        Boundary::Polygon(poly) => {
            let v = poly.vertices();
            let n = v.len();
            (0..n)
                .map(|i| circle_edge_area(v[i].sub(p), v[(i + 1) % n].sub(p), r))
                .fold(T::zero(), |a, b| a + b)
        }
    }
}

/// Intersection area of two disks with radii `r1`, `r2` and center distance `d`.
fn lens_area<T: Real>(r1: T, r2: T, d: T) -> T {
    let pi = T::PI();
    if d + r1 <= r2 {
        return pi * r1 * r1;
    }
    if d + r2 <= r1 {
        return pi * r2 * r2;
    }
    if d >= r1 + r2 {
        return T::zero();
    }
    let two = T::lit(2.0);
    let c1 = ((d * d + r1 * r1 - r2 * r2) / (two * d * r1))
        .max(-T::one())
        .min(T::one());
    let c2 = ((d * d + r2 * r2 - r1 * r1) / (two * d * r2))
        .max(-T::one())
        .min(T::one());
    let k = ((-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2)).max(T::zero());
    r1 * r1 * c1.acos() + r2 * r2 * c2.acos() - T::lit(0.5) * k.sqrt()
}

/// Signed area of (disk of radius r at origin) ∩ triangle(origin, a, b).
fn circle_edge_area<T: Real>(a: Point<T>, b: Point<T>, r: T) -> T {
    let d = b.sub(a);
    let qa = d.dot(d);
    if qa == T::zero() {
        return T::zero();
    }
    let qb = a.dot(d);
    let qc = a.dot(a) - r * r;
    let disc = qb * qb - qa * qc;
    let half = T::lit(0.5);
    if disc <= T::zero() {
        // Line misses or only touches the circle: pure sector.
        return half * r * r * a.cross(b).atan2(a.dot(b));
    }
    let mut ts: [T; 4] = [T::zero(), T::one(), T::one(), T::one()];
    let mut count = 1;
    let s = disc.sqrt();
    for t in [(-qb - s) / qa, (-qb + s) / qa] {
        if t > T::zero() && t < T::one() {
            ts[count] = t;
            count += 1;
        }
    }
    ts[count] = T::one();
    count += 1;

    let mut total = T::zero();
    for w in ts[..count].windows(2) {
        let p = a.add(d.scale(w[0]));
        let q = a.add(d.scale(w[1]));
        let mid = a.add(d.scale(half * (w[0] + w[1])));
        if mid.dot(mid) <= r * r {
            total += half * p.cross(q);
        } else {
            total += half * r * r * p.cross(q).atan2(p.dot(q));
        }
    }
    total
}

/// Uniform point in A' by bounding-box rejection.
pub fn sample_uniform<T: Real, R: Rng + ?Sized>(region: &NetworkRegion<T>, rng: &mut R) -> Point<T> {
    let (lo, hi) = region.boundary().bounding_box();
    let (x0, y0) = (lo.x.to_f64_lossy(), lo.y.to_f64_lossy());
    let (w, h) = ((hi.x - lo.x).to_f64_lossy(), (hi.y - lo.y).to_f64_lossy());
    let pu = region.pu_rx();
    let eps = region.epsilon();
    loop {
        let p = Point::new(
            T::lit(x0 + w * rng.random::<f64>()),
            T::lit(y0 + h * rng.random::<f64>()),
        );
        if region.boundary().contains(p) && p.distance(pu) > eps {
            return p;
        }
    }
}
