//! Downward-closed convex polygons in the `(R0, R1)` quadrant.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::RegionError;

/// Feasibility tolerance for float vertex enumeration.
pub const VERTEX_TOL: f64 = 1e-9;

/// `a0 R0 + a1 R1 <= rhs` with `a0, a1 >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Halfspace2D {
    pub a0: f64,
    pub a1: f64,
    pub rhs: f64,
    pub label: String,
}

impl Halfspace2D {
    pub fn r0(rhs: f64, label: impl Into<String>) -> Self {
        Self::raw(1.0, 0.0, rhs, label)
    }

    pub fn r1(rhs: f64, label: impl Into<String>) -> Self {
        Self::raw(0.0, 1.0, rhs, label)
    }

    pub fn sum(rhs: f64, label: impl Into<String>) -> Self {
        Self::raw(1.0, 1.0, rhs, label)
    }

    /// General supporting halfplane; coefficients must be nonnegative and not both zero.
    pub fn general(a0: f64, a1: f64, rhs: f64, label: impl Into<String>) -> Result<Self, RegionError> {
        let h = Self::raw(a0, a1, rhs, label);
        h.validate()?;
        Ok(h)
    }

    fn raw(a0: f64, a1: f64, rhs: f64, label: impl Into<String>) -> Self {
        Self {
            a0,
            a1,
            rhs,
            label: label.into(),
        }
    }

    fn validate(&self) -> Result<(), RegionError> {
        let ok = self.a0.is_finite()
            && self.a1.is_finite()
            && self.rhs.is_finite()
            && self.a0 >= 0.0
            && self.a1 >= 0.0
            && (self.a0 > 0.0 || self.a1 > 0.0);
        if ok {
            Ok(())
        } else {
            Err(RegionError::InvalidHalfspace(self.label.clone()))
        }
    }

    pub fn lhs(&self, p: [f64; 2]) -> f64 {
        self.a0 * p[0] + self.a1 * p[1]
    }

    pub fn holds(&self, p: [f64; 2], tol: f64) -> bool {
        self.lhs(p) <= self.rhs + tol
    }

    /// Whether this is one of the three shapes `R0`, `R1`, `R0 + R1`.
    pub fn is_standard(&self) -> bool {
        matches!((self.a0, self.a1), (1.0, 0.0) | (0.0, 1.0) | (1.0, 1.0))
    }
}

/// A bounded, convex, downward-closed region of the nonnegative quadrant.
///
/// The quadrant constraints `R0 >= 0, R1 >= 0` are implicit. An empty region
/// (origin infeasible) is a value, not an error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionPolygon {
    pub halfspaces: Vec<Halfspace2D>,
    /// Counterclockwise, starting at the origin. Empty iff the region is empty.
    pub vertices: Vec<[f64; 2]>,
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

/// Orders boundary points of a downward-closed region counterclockwise from
/// the origin and drops points interior to an edge.
fn order_ccw(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| {
        let key = |p: &[f64; 2]| {
            if p[0] == 0.0 && p[1] == 0.0 {
                (-1.0, 0.0)
            } else {
                let ang = p[1].atan2(p[0]);
                // leave the origin along the R0 axis and return along the R1 axis
                let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
                (ang, if ang > std::f64::consts::FRAC_PI_4 { -r } else { r })
            }
        };
        key(a).partial_cmp(&key(b)).unwrap()
    });
    if pts.len() <= 2 {
        return pts;
    }
    let mut changed = true;
    while changed && pts.len() > 2 {
        changed = false;
        let n = pts.len();
        for i in 0..n {
            let prev = pts[(i + n - 1) % n];
            let next = pts[(i + 1) % n];
            if cross(prev, pts[i], next).abs() <= 1e-14 {
                pts.remove(i);
                changed = true;
                break;
            }
        }
    }
    pts
}

/// Intersects the halfplanes with the nonnegative quadrant and enumerates vertices.
pub fn halfspaces_to_polygon(hs: Vec<Halfspace2D>) -> Result<RegionPolygon, RegionError> {
    if hs.is_empty() {
        return Err(RegionError::Unbounded);
    }
    for h in &hs {
        h.validate()?;
    }
    if !hs.iter().any(|h| h.a0 > 0.0) || !hs.iter().any(|h| h.a1 > 0.0) {
        return Err(RegionError::Unbounded);
    }
    if hs.iter().any(|h| h.rhs < -VERTEX_TOL) {
        return Ok(RegionPolygon {
            halfspaces: hs,
            vertices: Vec::new(),
        });
    }
    let mut lines: Vec<(f64, f64, f64)> = hs.iter().map(|h| (h.a0, h.a1, h.rhs.max(0.0))).collect();
    lines.push((1.0, 0.0, 0.0));
    lines.push((0.0, 1.0, 0.0));
    let feasible = |p: [f64; 2]| {
        p[0] >= -VERTEX_TOL && p[1] >= -VERTEX_TOL && hs.iter().all(|h| h.holds(p, VERTEX_TOL))
    };
    let mut pts: Vec<[f64; 2]> = Vec::new();
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let (a, b, c) = lines[i];
            let (d, e, f) = lines[j];
            let det = a * e - b * d;
            if det.abs() < 1e-15 {
                continue;
            }
            let p = [(c * e - b * f) / det, (a * f - c * d) / det];
            if !feasible(p) {
                continue;
            }
            let p = [p[0].max(0.0), p[1].max(0.0)];
            if pts.iter().all(|q| dist2(*q, p) > 1e-22) {
                pts.push(p);
            }
        }
    }
    Ok(RegionPolygon {
        halfspaces: hs,
        vertices: order_ccw(pts),
    })
}

impl RegionPolygon {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, p: [f64; 2], tol: f64) -> bool {
        !self.is_empty()
            && p[0] >= -tol
            && p[1] >= -tol
            && self.halfspaces.iter().all(|h| h.holds(p, tol))
    }

    /// Whether every vertex of `other` lies in `self`.
    pub fn contains_polygon(&self, other: &RegionPolygon, tol: f64) -> bool {
        other.vertices.iter().all(|&v| self.contains(v, tol))
    }

    /// Mutual containment of vertex sets.
    pub fn same_region(&self, other: &RegionPolygon, tol: f64) -> bool {
        self.contains_polygon(other, tol) && other.contains_polygon(self, tol)
    }

    /// `max λ R0 + R1` over the region with the maximizing vertex. Ties go to
    /// the vertex with the larger `R0`.
    pub fn support(&self, lambda: f64) -> Option<(f64, [f64; 2])> {
        let mut best: Option<(f64, [f64; 2])> = None;
        for &v in &self.vertices {
            let val = lambda * v[0] + v[1];
            best = match best {
                None => Some((val, v)),
                Some((bv, bp)) => {
                    if val > bv + 1e-12 || (val >= bv - 1e-12 && v[0] > bp[0]) {
                        Some((val.max(bv), v))
                    } else {
                        Some((bv, bp))
                    }
                }
            };
        }
        best
    }

    /// Euclidean distance from `p` to the region (zero inside).
    pub fn distance_to(&self, p: [f64; 2]) -> f64 {
        if self.is_empty() {
            return f64::INFINITY;
        }
        if self.contains(p, 1e-12) {
            return 0.0;
        }
        let n = self.vertices.len();
        if n == 1 {
            return dist2(p, self.vertices[0]).sqrt();
        }
        (0..n)
            .map(|i| seg_dist(p, self.vertices[i], self.vertices[(i + 1) % n]))
            .fold(f64::INFINITY, f64::min)
    }

    /// Halfspaces that hold with equality at some vertex.
    pub fn active_labels(&self) -> Vec<&str> {
        self.halfspaces
            .iter()
            .filter(|h| {
                self.vertices
                    .iter()
                    .any(|&v| (h.lhs(v) - h.rhs).abs() <= VERTEX_TOL)
            })
            .map(|h| h.label.as_str())
            .collect()
    }

    /// Checks the structural invariants: vertices feasible, counterclockwise,
    /// convex, and the region downward closed (axis projections contained).
    pub fn check_invariants(&self) -> Result<(), String> {
        for &v in &self.vertices {
            if !self.contains(v, 1e-8) {
                return Err(format!("vertex {v:?} infeasible"));
            }
            if !self.contains([v[0], 0.0], 1e-8) || !self.contains([0.0, v[1]], 1e-8) {
                return Err(format!("projections of {v:?} missing"));
            }
            let tight = self
                .halfspaces
                .iter()
                .filter(|h| (h.lhs(v) - h.rhs).abs() <= 1e-8)
                .count()
                + usize::from(v[0].abs() <= 1e-12)
                + usize::from(v[1].abs() <= 1e-12);
            if tight < 2 {
                return Err(format!("vertex {v:?} is tight on {tight} constraints"));
            }
        }
        if let Some(&first) = self.vertices.first() {
            if first != [0.0, 0.0] {
                return Err("first vertex is not the origin".into());
            }
        }
        let n = self.vertices.len();
        if n >= 3 {
            for i in 0..n {
                let c = cross(
                    self.vertices[i],
                    self.vertices[(i + 1) % n],
                    self.vertices[(i + 2) % n],
                );
                if c < -1e-12 {
                    return Err(format!("not convex/counterclockwise at vertex {i}"));
                }
            }
        }
        Ok(())
    }

    /// Text record: `halfspace a0 a1 rhs label` lines, then `vertex r0 r1` lines.
    pub fn to_record(&self) -> String {
        self.to_string()
    }

    pub fn parse_record(text: &str) -> Result<RegionPolygon, RegionError> {
        let mut halfspaces = Vec::new();
        let mut vertices = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let err = |m: &str| RegionError::Parse {
                line: i + 1,
                message: m.to_string(),
            };
            let mut parts = line.split_whitespace();
            let num = |s: Option<&str>| -> Result<f64, RegionError> {
                s.and_then(|t| t.parse().ok()).ok_or_else(|| err("expected a number"))
            };
            match parts.next() {
                Some("halfspace") => {
                    let a0 = num(parts.next())?;
                    let a1 = num(parts.next())?;
                    let rhs = num(parts.next())?;
                    let label = parts.collect::<Vec<_>>().join(" ");
                    halfspaces.push(Halfspace2D::raw(a0, a1, rhs, label));
                }
                Some("vertex") => {
                    let r0 = num(parts.next())?;
                    let r1 = num(parts.next())?;
                    vertices.push([r0, r1]);
                }
                Some("empty") | None => {}
                Some(_) => return Err(err("expected `halfspace`, `vertex` or `empty`")),
            }
        }
        Ok(RegionPolygon {
            halfspaces,
            vertices,
        })
    }
}

/// Andrew's monotone chain; counterclockwise without collinear points.
fn convex_hull(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| dist2(*a, *b) <= 1e-24);
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 1e-15 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 1e-15 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn seg_dist(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    if len2 == 0.0 {
        return dist2(p, a).sqrt();
    }
    let t = (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0);
    dist2(p, [a[0] + t * d[0], a[1] + t * d[1]]).sqrt()
}

impl fmt::Display for RegionPolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for h in &self.halfspaces {
            writeln!(
                f,
                "halfspace {:.9} {:.9} {:.9} {}",
                h.a0, h.a1, h.rhs, h.label
            )?;
        }
        if self.is_empty() {
            writeln!(f, "empty")?;
        }
        for v in &self.vertices {
            writeln!(f, "vertex {:.9} {:.9}", v[0], v[1])?;
        }
        Ok(())
    }
}

/// Convex hull of the points together with their axis projections and the
/// origin: the smallest downward-closed convex region containing them.
pub fn downward_hull(points: &[[f64; 2]], label: &str) -> RegionPolygon {
    let mut pts: Vec<[f64; 2]> = vec![[0.0, 0.0]];
    for &p in points {
        let p = [p[0].max(0.0), p[1].max(0.0)];
        pts.extend([p, [p[0], 0.0], [0.0, p[1]]]);
    }
    let max_r0 = pts.iter().map(|p| p[0]).fold(0.0, f64::max);
    let max_r1 = pts.iter().map(|p| p[1]).fold(0.0, f64::max);
    let mut vertices = convex_hull(pts);
    if let Some(i) = vertices.iter().position(|p| p[0] == 0.0 && p[1] == 0.0) {
        vertices.rotate_left(i);
    }

    let mut halfspaces = Vec::new();
    let n = vertices.len();
    for i in 0..n {
        let u = vertices[i];
        let v = vertices[(i + 1) % n];
        let (a0, a1) = (v[1] - u[1], u[0] - v[0]);
        if a0 < -1e-15 || a1 < -1e-15 || (a0.abs() <= 1e-15 && a1.abs() <= 1e-15) {
            continue; // axis edges point outwards into the negative quadrant
        }
        let (a0, a1) = (a0.max(0.0), a1.max(0.0));
        let s = if a1 > 0.0 { a1 } else { a0 };
        let (a0, a1) = (a0 / s, a1 / s);
        halfspaces.push(Halfspace2D::raw(a0, a1, a0 * u[0] + a1 * u[1], label));
    }
    if halfspaces.is_empty() {
        halfspaces.push(Halfspace2D::r0(0.0, label));
        halfspaces.push(Halfspace2D::r1(0.0, label));
    } else {
        if !halfspaces.iter().any(|h| h.a0 > 0.0) {
            halfspaces.push(Halfspace2D::r0(max_r0, label));
        }
        if !halfspaces.iter().any(|h| h.a1 > 0.0) {
            halfspaces.push(Halfspace2D::r1(max_r1, label));
        }
    }
    RegionPolygon {
        halfspaces,
        vertices,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[[f64; 2]], b: &[[f64; 2]]) -> bool {
        a.len() == b.len()
            && a
                .iter()
                .zip(b)
                .all(|(p, q)| (p[0] - q[0]).abs() < 1e-12 && (p[1] - q[1]).abs() < 1e-12)
    }

    #[test]
    fn unit_square() {
        let p = halfspaces_to_polygon(vec![Halfspace2D::r0(1.0, "a"), Halfspace2D::r1(1.0, "b")])
            .unwrap();
        assert!(close(
            &p.vertices,
            &[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]
        ));
        p.check_invariants().unwrap();
    }

    #[test]
    fn pentagon() {
        let p = halfspaces_to_polygon(vec![
            Halfspace2D::r0(1.0, "a"),
            Halfspace2D::r1(1.0, "b"),
            Halfspace2D::sum(1.5, "c"),
        ])
        .unwrap();
        assert!(close(
            &p.vertices,
            &[[0.0, 0.0], [1.0, 0.0], [1.0, 0.5], [0.5, 1.0], [0.0, 1.0]]
        ));
        p.check_invariants().unwrap();
        assert_eq!(p.active_labels(), vec!["a", "b", "c"]);
    }

    #[test]
    fn segment_on_r1_axis() {
        let p = halfspaces_to_polygon(vec![Halfspace2D::r0(0.0, "a"), Halfspace2D::r1(2.0, "b")])
            .unwrap();
        assert!(close(&p.vertices, &[[0.0, 0.0], [0.0, 2.0]]));
        p.check_invariants().unwrap();
    }

    #[test]
    fn unbounded_and_empty() {
        assert_eq!(
            halfspaces_to_polygon(vec![Halfspace2D::r0(0.0, "a")]),
            Err(RegionError::Unbounded)
        );
        assert_eq!(halfspaces_to_polygon(vec![]), Err(RegionError::Unbounded));
        let e = halfspaces_to_polygon(vec![Halfspace2D::r0(-1.0, "a"), Halfspace2D::r1(1.0, "b")])
            .unwrap();
        assert!(e.is_empty());
        let origin =
            halfspaces_to_polygon(vec![Halfspace2D::r0(1.0, "a"), Halfspace2D::r1(1.0, "b"), Halfspace2D::sum(0.0, "c")])
                .unwrap();
        assert_eq!(origin.vertices, vec![[0.0, 0.0]]);
    }

    #[test]
    fn redundant_and_collinear_constraints() {
        let p = halfspaces_to_polygon(vec![
            Halfspace2D::r0(1.0, "a"),
            Halfspace2D::r1(1.0, "b"),
            Halfspace2D::sum(2.0, "touching"),
            Halfspace2D::sum(5.0, "loose"),
        ])
        .unwrap();
        assert_eq!(p.vertices.len(), 4);
        p.check_invariants().unwrap();
    }

    #[test]
    fn support_and_distance() {
        let p = halfspaces_to_polygon(vec![
            Halfspace2D::r0(1.0, "a"),
            Halfspace2D::r1(1.0, "b"),
            Halfspace2D::sum(1.5, "c"),
        ])
        .unwrap();
        let (v, at) = p.support(0.0).unwrap();
        assert_eq!(v, 1.0);
        assert_eq!(at, [0.5, 1.0]);
        let (v, at) = p.support(1.0).unwrap();
        assert_eq!(v, 1.5);
        assert_eq!(at, [1.0, 0.5]);
        assert_eq!(p.distance_to([0.2, 0.2]), 0.0);
        assert!((p.distance_to([2.0, 0.0]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn record_round_trip() {
        let p = halfspaces_to_polygon(vec![
            Halfspace2D::r0(0.0659301, "R0<=I(U2;Y2)"),
            Halfspace2D::r1(0.4123, "R1<=I(X;Y1|U2)"),
        ])
        .unwrap();
        let text = p.to_record();
        assert!(text.starts_with("halfspace 1.000000000 0.000000000 0.065930100 R0<=I(U2;Y2)\n"));
        let back = RegionPolygon::parse_record(&text).unwrap();
        assert_eq!(back.halfspaces.len(), 2);
        assert_eq!(back.vertices.len(), 4);
        assert!(back.same_region(&p, 1e-9));
    }

    #[test]
    fn hull_of_corners() {
        let h = downward_hull(&[[1.0, 0.5], [0.5, 1.0], [0.2, 0.2]], "hull");
        assert!(close(
            &h.vertices,
            &[[0.0, 0.0], [1.0, 0.0], [1.0, 0.5], [0.5, 1.0], [0.0, 1.0]]
        ));
        h.check_invariants().unwrap();
        assert!(h.contains([0.75, 0.75], 1e-12));
        assert!(!h.contains([0.8, 0.8], 1e-12));
        let origin = downward_hull(&[], "hull");
        assert_eq!(origin.vertices, vec![[0.0, 0.0]]);
        let seg = downward_hull(&[[0.0, 0.7]], "hull");
        assert!(close(&seg.vertices, &[[0.0, 0.0], [0.0, 0.7]]));
    }
}
