//! Reference scenarios: the four-sided region with the PU-Rx at the
//! intersection of its diagonals, centered disks, and centered regular polygons.

use crate::model::{Boundary, ConvexPolygon, ScenarioSpec};
use crate::num::{Point, Real};

/// Vertices V1..V4 and PU-Rx position of the irregular quadrilateral with
/// scale `d`: V1 at the origin with a right angle, sides √3·d, √3·d,
/// S3, d, and the PU-Rx where the diagonals cross.
pub fn quadrilateral<T: Real>(d: T) -> (Vec<Point<T>>, Point<T>) {
    let s3 = T::lit(3.0).sqrt();
    let inv_sqrt2 = T::FRAC_1_SQRT_2();
    let v1 = Point::new(T::zero(), T::zero());
    let v2 = Point::new(s3 * d, T::zero());
    let v3 = Point::new(s3 * d * (T::one() - inv_sqrt2), T::lit(1.5).sqrt() * d);
    let v4 = Point::new(T::zero(), d);
    let angle = T::lit(3.0) * T::PI() / T::lit(8.0);
    let dv1 = s3 * d / (T::lit(2.0) * (T::lit(11.0) * T::PI() / T::lit(24.0)).sin());
    let pu = Point::new(dv1 * angle.cos(), dv1 * angle.sin());
    (vec![v1, v2, v3, v4], pu)
}

/// Table I parameters on the quadrilateral of scale `d`.
pub fn quadrilateral_scenario<T: Real>(d: T, m_sus: usize) -> ScenarioSpec<T> {
    let (v, pu) = quadrilateral(d);
    let poly = ConvexPolygon::new(v).expect("reference quadrilateral is convex");
    ScenarioSpec::with_defaults(Boundary::Polygon(poly), pu, m_sus)
}

/// Table I parameters on a disk of radius `w` with the PU-Rx at its center.
pub fn disk_scenario<T: Real>(w: T, m_sus: usize) -> ScenarioSpec<T> {
    let center = Point::new(T::zero(), T::zero());
    ScenarioSpec::with_defaults(Boundary::Disk { center, radius: w }, center, m_sus)
}

/// Table I parameters on a regular `sides`-gon inscribed in radius `w`,
/// PU-Rx at the center.
pub fn regular_polygon_scenario<T: Real>(sides: usize, w: T, m_sus: usize) -> ScenarioSpec<T> {
    let center = Point::new(T::zero(), T::zero());
    let poly = ConvexPolygon::regular(sides, w, center, T::zero()).expect("regular polygon is convex");
    ScenarioSpec::with_defaults(Boundary::Polygon(poly), center, m_sus)
}
