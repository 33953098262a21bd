//! Compact subsets of the plane from a small whitelist of shapes, their
//! deterministic sampling, and exhaustion families for simple domains.
//!
//! Every whitelisted shape (and every union of pairwise disjoint pieces) has a
//! connected complement. This is a property of the whitelist and is not
//! checked algorithmically.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Complex;

pub type Point = [f64; 2];

fn c64(p: Point) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn pt(z: Complex64) -> Point {
    [z.re, z.im]
}

fn segment_distance(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let t = ((z - a) * d.conj()).re / d.norm_sqr();
    let t = t.clamp(0.0, 1.0);
    (z - (a + d * t)).norm()
}

fn count(length: f64, mesh: f64) -> usize {
    ((length / mesh) - 1e-9).ceil().max(1.0) as usize
}

/// Compact set description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum CompactSpec {
    /// Closed disk.
    Disk { center: Point, radius: f64 },
    Segment { start: Point, end: Point },
    /// Polygonal path through the vertices (not closed).
    Path { vertices: Vec<Point> },
    /// Filled convex polygon, vertices in order.
    Polygon { vertices: Vec<Point> },
    /// Intersection of convex pieces (disks and polygons).
    Intersection { pieces: Vec<CompactSpec> },
    /// Union of pairwise disjoint pieces.
    Union { pieces: Vec<CompactSpec> },
}

impl CompactSpec {
    pub fn disk(re: f64, im: f64, radius: f64) -> Self {
        CompactSpec::Disk {
            center: [re, im],
            radius,
        }
    }

    pub fn segment(a: Point, b: Point) -> Self {
        CompactSpec::Segment { start: a, end: b }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::DegenerateShape(m.to_string()));
        match self {
            CompactSpec::Disk { center, radius } => {
                if !(radius.is_finite() && *radius > 0.0) || !center.iter().all(|x| x.is_finite()) {
                    return bad("disk needs a positive finite radius");
                }
            }
            CompactSpec::Segment { start, end } => {
                if start == end {
                    return bad("segment endpoints coincide");
                }
            }
            CompactSpec::Path { vertices } => {
                if vertices.len() < 2 || vertices.windows(2).any(|w| w[0] == w[1]) {
                    return bad("path needs at least two distinct consecutive vertices");
                }
            }
            CompactSpec::Polygon { vertices } => {
                if vertices.len() < 3 {
                    return bad("polygon needs at least three vertices");
                }
                let n = vertices.len();
                let mut sign = 0.0f64;
                for i in 0..n {
                    let a = c64(vertices[i]);
                    let b = c64(vertices[(i + 1) % n]);
                    let c = c64(vertices[(i + 2) % n]);
                    let cross = ((b - a).conj() * (c - b)).im;
                    if cross.abs() < 1e-15 {
                        continue;
                    }
                    if sign != 0.0 && cross.signum() != sign {
                        return bad("polygon is not convex");
                    }
                    sign = cross.signum();
                }
                if sign == 0.0 {
                    return bad("polygon has zero area");
                }
            }
            CompactSpec::Intersection { pieces } => {
                if pieces.is_empty() {
                    return bad("empty intersection");
                }
                for p in pieces {
                    if !matches!(p, CompactSpec::Disk { .. } | CompactSpec::Polygon { .. }) {
                        return bad("intersections take disks and polygons only");
                    }
                    p.validate()?;
                }
            }
            CompactSpec::Union { pieces } => {
                if pieces.is_empty() {
                    return bad("empty union");
                }
                for p in pieces {
                    p.validate()?;
                }
            }
        }
        Ok(())
    }

    /// Polygon vertices oriented counter-clockwise.
    fn ccw(vertices: &[Point]) -> Vec<Complex64> {
        let v: Vec<Complex64> = vertices.iter().map(|&p| c64(p)).collect();
        let area: f64 = (0..v.len())
            .map(|i| (v[i].conj() * v[(i + 1) % v.len()]).im)
            .sum();
        if area < 0.0 {
            v.into_iter().rev().collect()
        } else {
            v
        }
    }

    /// Signed depth: positive inside a filled shape (distance to its
    /// complement), negative outside. Zero-width shapes report minus their
    /// distance.
    fn depth64(&self, z: Complex64) -> f64 {
        match self {
            CompactSpec::Disk { center, radius } => radius - (z - c64(*center)).norm(),
            CompactSpec::Polygon { vertices } => {
                let v = Self::ccw(vertices);
                let n = v.len();
                let mut inside = true;
                let mut edge = f64::INFINITY;
                for i in 0..n {
                    let (a, b) = (v[i], v[(i + 1) % n]);
                    if ((b - a).conj() * (z - a)).im < 0.0 {
                        inside = false;
                    }
                    edge = edge.min(segment_distance(z, a, b));
                }
                if inside {
                    edge
                } else {
                    -edge
                }
            }
            CompactSpec::Intersection { pieces } => pieces
                .iter()
                .map(|p| p.depth64(z))
                .fold(f64::INFINITY, f64::min),
            CompactSpec::Union { pieces } => pieces
                .iter()
                .map(|p| p.depth64(z))
                .fold(f64::NEG_INFINITY, f64::max),
            _ => -self.distance64(z),
        }
    }

    fn distance64(&self, z: Complex64) -> f64 {
        match self {
            CompactSpec::Segment { start, end } => segment_distance(z, c64(*start), c64(*end)),
            CompactSpec::Path { vertices } => vertices
                .windows(2)
                .map(|w| segment_distance(z, c64(w[0]), c64(w[1])))
                .fold(f64::INFINITY, f64::min),
            CompactSpec::Union { pieces } => pieces
                .iter()
                .map(|p| p.distance64(z))
                .fold(f64::INFINITY, f64::min),
            // For an intersection of convex pieces this is a lower bound.
            _ => (-self.depth64(z)).max(0.0),
        }
    }

    /// Euclidean distance from `z` to the set (a lower bound for
    /// intersections).
    pub fn distance(&self, z: Point) -> f64 {
        self.distance64(c64(z))
    }

    /// Distance from `z` to the complement of the set; zero for points outside
    /// and for one-dimensional shapes.
    pub fn depth(&self, z: Point) -> f64 {
        self.depth64(c64(z)).max(0.0)
    }

    pub fn contains(&self, z: Point, tol: f64) -> bool {
        self.distance(z) <= tol
    }

    /// Center and radius of a disk containing the set.
    pub fn bounding_disk(&self) -> (Point, f64) {
        match self {
            CompactSpec::Disk { center, radius } => (*center, *radius),
            CompactSpec::Intersection { pieces } => pieces
                .iter()
                .map(|p| p.bounding_disk())
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("validated"),
            _ => {
                let pts = self.extreme_points();
                let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
                for p in &pts {
                    for k in 0..2 {
                        lo[k] = lo[k].min(p[k]);
                        hi[k] = hi[k].max(p[k]);
                    }
                }
                let c = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
                let r = pts
                    .iter()
                    .map(|p| (c64(*p) - c64(c)).norm())
                    .fold(0.0, f64::max);
                (c, r)
            }
        }
    }

    fn extreme_points(&self) -> Vec<Point> {
        match self {
            CompactSpec::Disk { center, radius } => vec![
                [center[0] - radius, center[1] - radius],
                [center[0] + radius, center[1] + radius],
            ],
            CompactSpec::Segment { start, end } => vec![*start, *end],
            CompactSpec::Path { vertices } | CompactSpec::Polygon { vertices } => vertices.clone(),
            CompactSpec::Intersection { .. } => {
                let (c, r) = self.bounding_disk();
                CompactSpec::Disk { center: c, radius: r }.extreme_points()
            }
            CompactSpec::Union { pieces } => pieces.iter().flat_map(|p| p.extreme_points()).collect(),
        }
    }

    fn boundary(&self, mesh: f64) -> Vec<Complex64> {
        match self {
            CompactSpec::Disk { center, radius } => {
                let n = count(2.0 * PI * radius, mesh);
                (0..n)
                    .map(|i| c64(*center) + Complex64::from_polar(*radius, 2.0 * PI * i as f64 / n as f64))
                    .collect()
            }
            CompactSpec::Segment { start, end } => polyline(&[c64(*start), c64(*end)], mesh, false),
            CompactSpec::Path { vertices } => {
                let v: Vec<Complex64> = vertices.iter().map(|&p| c64(p)).collect();
                polyline(&v, mesh, false)
            }
            CompactSpec::Polygon { vertices } => polyline(&Self::ccw(vertices), mesh, true),
            CompactSpec::Intersection { pieces } => {
                let mut out = Vec::new();
                for (i, p) in pieces.iter().enumerate() {
                    for z in p.boundary(mesh) {
                        let inside_rest = pieces
                            .iter()
                            .enumerate()
                            .all(|(j, q)| j == i || q.depth64(z) >= -1e-12);
                        if inside_rest {
                            out.push(z);
                        }
                    }
                }
                out
            }
            CompactSpec::Union { pieces } => pieces.iter().flat_map(|p| p.boundary(mesh)).collect(),
        }
    }

    fn interior(&self, mesh: f64) -> Vec<Complex64> {
        match self {
            CompactSpec::Disk { center, radius } => {
                let rings = count(*radius, mesh);
                let mut out = vec![c64(*center)];
                for j in 1..rings {
                    let r = radius * j as f64 / rings as f64;
                    let n = count(2.0 * PI * r, mesh);
                    out.extend((0..n).map(|i| {
                        c64(*center) + Complex64::from_polar(r, 2.0 * PI * i as f64 / n as f64)
                    }));
                }
                out
            }
            CompactSpec::Polygon { .. } | CompactSpec::Intersection { .. } => {
                let (c, r) = self.bounding_disk();
                let n = count(2.0 * r, mesh);
                let h = 2.0 * r / n as f64;
                let mut out = Vec::new();
                for i in 1..n {
                    for j in 1..n {
                        let z = Complex64::new(c[0] - r + i as f64 * h, c[1] - r + j as f64 * h);
                        if self.depth64(z) > 0.0 {
                            out.push(z);
                        }
                    }
                }
                out
            }
            CompactSpec::Union { pieces } => pieces.iter().flat_map(|p| p.interior(mesh)).collect(),
            _ => Vec::new(),
        }
    }

    /// Total boundary length (perimeter of filled shapes, length of curves).
    pub fn perimeter(&self) -> f64 {
        match self {
            CompactSpec::Disk { radius, .. } => 2.0 * PI * radius,
            CompactSpec::Segment { start, end } => (c64(*end) - c64(*start)).norm(),
            CompactSpec::Path { vertices } => vertices
                .windows(2)
                .map(|w| (c64(w[1]) - c64(w[0])).norm())
                .sum(),
            CompactSpec::Polygon { vertices } => {
                let n = vertices.len();
                (0..n)
                    .map(|i| (c64(vertices[(i + 1) % n]) - c64(vertices[i])).norm())
                    .sum()
            }
            CompactSpec::Intersection { .. } => {
                // Boundary of a convex set: polygonal length of its samples.
                let b = self.boundary(1e-3);
                let mut pts = b;
                let c = pts.iter().sum::<Complex64>() / pts.len().max(1) as f64;
                pts.sort_by(|a, b| (a - c).arg().total_cmp(&(b - c).arg()));
                let n = pts.len();
                (0..n).map(|i| (pts[(i + 1) % n] - pts[i]).norm()).sum()
            }
            CompactSpec::Union { pieces } => pieces.iter().map(|p| p.perimeter()).sum(),
        }
    }
}

fn polyline(v: &[Complex64], mesh: f64, closed: bool) -> Vec<Complex64> {
    let mut out = Vec::new();
    let m = if closed { v.len() } else { v.len() - 1 };
    for i in 0..m {
        let (a, b) = (v[i], v[(i + 1) % v.len()]);
        let n = count((b - a).norm(), mesh);
        for k in 0..n {
            out.push(a + (b - a) * (k as f64 / n as f64));
        }
    }
    if !closed {
        out.push(*v.last().expect("non-empty"));
    }
    out
}

/// Sample points of a compact set.
#[derive(Clone, Debug, Serialize)]
pub struct SampledSet {
    pub points: Vec<Point>,
    pub mesh: f64,
}

impl SampledSet {
    pub fn from_points(points: Vec<Point>, mesh: f64) -> Self {
        SampledSet { points, mesh }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn complex_points(&self, prec: u32) -> Vec<Complex> {
        self.points
            .iter()
            .map(|p| Complex::with_val(prec, p[0], p[1]))
            .collect()
    }

    pub fn union(&self, other: &SampledSet) -> SampledSet {
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points);
        SampledSet {
            points,
            mesh: self.mesh.max(other.mesh),
        }
    }
}

/// Equispaced boundary samples, starting at angle 0 for disks. The number of
/// samples along each boundary component is at least its length over `mesh`.
pub fn sample(spec: &CompactSpec, mesh: f64) -> Result<SampledSet> {
    sample_with(spec, mesh, false)
}

/// Boundary samples plus an interior grid for filled shapes.
pub fn sample_with_interior(spec: &CompactSpec, mesh: f64) -> Result<SampledSet> {
    sample_with(spec, mesh, true)
}

fn sample_with(spec: &CompactSpec, mesh: f64, interior: bool) -> Result<SampledSet> {
    if !(mesh.is_finite() && mesh > 0.0) {
        return Err(Error::DegenerateShape(format!("mesh must be positive, got {mesh}")));
    }
    spec.validate()?;
    let mut pts = spec.boundary(mesh);
    if interior {
        pts.extend(spec.interior(mesh));
    }
    if pts.is_empty() {
        return Err(Error::DegenerateShape("shape produced no samples".into()));
    }
    Ok(SampledSet {
        points: pts.into_iter().map(pt).collect(),
        mesh,
    })
}

/// Open domains with explicit exhaustion families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "domain", rename_all = "snake_case")]
pub enum DomainSpec {
    Disk { center: Point, radius: f64 },
    /// Open rectangle with the given opposite corners.
    Rectangle { min: Point, max: Point },
    /// `{ |z − c| < r, Im(z − c) > 0 }`.
    HalfDisk { center: Point, radius: f64 },
    /// `{ |z − c| > r }`; listed so configs can name it, but unsupported.
    DiskComplement { center: Point, radius: f64 },
}

impl DomainSpec {
    pub fn unit_disk() -> Self {
        DomainSpec::Disk {
            center: [0.0, 0.0],
            radius: 1.0,
        }
    }

    fn check(&self) -> Result<()> {
        let ok = match self {
            DomainSpec::Disk { radius, .. } | DomainSpec::HalfDisk { radius, .. } => *radius > 0.0,
            DomainSpec::Rectangle { min, max } => min[0] < max[0] && min[1] < max[1],
            DomainSpec::DiskComplement { .. } => {
                return Err(Error::UnsupportedDomain(
                    "unbounded disk complement has no exhaustion in the shape whitelist".into(),
                ))
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::UnsupportedDomain(format!("degenerate domain {self:?}")))
        }
    }

    /// Whether `z` lies in the open domain.
    pub fn contains(&self, z: Point) -> bool {
        self.boundary_distance(z) > 0.0
    }

    /// Signed distance to the boundary, positive inside.
    pub fn boundary_distance(&self, z: Point) -> f64 {
        let w = c64(z);
        match self {
            DomainSpec::Disk { center, radius } => radius - (w - c64(*center)).norm(),
            DomainSpec::Rectangle { min, max } => {
                let inside = [z[0] - min[0], max[0] - z[0], z[1] - min[1], max[1] - z[1]];
                let d = inside.iter().cloned().fold(f64::INFINITY, f64::min);
                if d >= 0.0 {
                    d
                } else {
                    -self.closure_distance(z)
                }
            }
            DomainSpec::HalfDisk { center, radius } => {
                let u = w - c64(*center);
                let d = (radius - u.norm()).min(u.im);
                if d >= 0.0 {
                    d
                } else {
                    -self.closure_distance(z)
                }
            }
            DomainSpec::DiskComplement { center, radius } => (w - c64(*center)).norm() - radius,
        }
    }

    /// Distance from `z` to the closure of the domain.
    pub fn closure_distance(&self, z: Point) -> f64 {
        let w = c64(z);
        match self {
            DomainSpec::Disk { center, radius } => ((w - c64(*center)).norm() - radius).max(0.0),
            DomainSpec::Rectangle { min, max } => {
                let dx = (min[0] - z[0]).max(0.0).max(z[0] - max[0]);
                let dy = (min[1] - z[1]).max(0.0).max(z[1] - max[1]);
                dx.hypot(dy)
            }
            DomainSpec::HalfDisk { center, radius } => {
                let c = c64(*center);
                let u = w - c;
                if u.im >= 0.0 {
                    (u.norm() - radius).max(0.0)
                } else {
                    segment_distance(w, c - radius, c + radius)
                }
            }
            DomainSpec::DiskComplement { center, radius } => (radius - (w - c64(*center)).norm()).max(0.0),
        }
    }

    /// `max |z|` over the closure.
    pub fn modulus_bound(&self) -> f64 {
        match self {
            DomainSpec::Disk { center, radius }
            | DomainSpec::HalfDisk { center, radius }
            | DomainSpec::DiskComplement { center, radius } => c64(*center).norm() + radius,
            DomainSpec::Rectangle { min, max } => [*min, *max, [min[0], max[1]], [max[0], min[1]]]
                .iter()
                .map(|p| c64(*p).norm())
                .fold(0.0, f64::max),
        }
    }
}

fn clip_to_radius(piece: CompactSpec, extreme: f64, k: f64) -> CompactSpec {
    if extreme <= k {
        piece
    } else {
        CompactSpec::Intersection {
            pieces: vec![piece, CompactSpec::disk(0.0, 0.0, k)],
        }
    }
}

/// `L_k = { z ∈ Ω : |z| ≤ k, dist(z, ∂Ω) ≥ 1/k }`.
pub fn inner_exhaustion(domain: &DomainSpec, k: usize) -> Result<CompactSpec> {
    domain.check()?;
    if k == 0 {
        return Err(Error::InvalidArgument("exhaustion index starts at 1".into()));
    }
    let kf = k as f64;
    let m = 1.0 / kf;
    let spec = match domain {
        DomainSpec::Disk { center, radius } => {
            let r = radius - m;
            if r <= 0.0 {
                return Err(Error::DegenerateShape(format!("L_{k} is empty for radius {radius}")));
            }
            let extreme = c64(*center).norm() + r;
            clip_to_radius(CompactSpec::Disk { center: *center, radius: r }, extreme, kf)
        }
        DomainSpec::Rectangle { min, max } => {
            let (a, b) = ([min[0] + m, min[1] + m], [max[0] - m, max[1] - m]);
            if a[0] >= b[0] || a[1] >= b[1] {
                return Err(Error::DegenerateShape(format!("L_{k} is empty for {domain:?}")));
            }
            let vertices = vec![a, [b[0], a[1]], b, [a[0], b[1]]];
            let extreme = vertices.iter().map(|p| c64(*p).norm()).fold(0.0, f64::max);
            clip_to_radius(CompactSpec::Polygon { vertices }, extreme, kf)
        }
        DomainSpec::HalfDisk { center, radius } => {
            let r = radius - m;
            if r <= m {
                return Err(Error::DegenerateShape(format!("L_{k} is empty for {domain:?}")));
            }
            let (cx, cy) = (center[0], center[1]);
            let strip = CompactSpec::Polygon {
                vertices: vec![[cx - r, cy + m], [cx + r, cy + m], [cx + r, cy + r], [cx - r, cy + r]],
            };
            let mut pieces = vec![CompactSpec::Disk { center: *center, radius: r }, strip];
            if c64(*center).norm() + r > kf {
                pieces.push(CompactSpec::disk(0.0, 0.0, kf));
            }
            CompactSpec::Intersection { pieces }
        }
        DomainSpec::DiskComplement { .. } => unreachable!("rejected by check"),
    };
    spec.validate()?;
    Ok(spec)
}

/// Disk entries of one level of the outer schedule.
fn outer_level(domain: &DomainSpec, level: usize) -> Vec<(Point, f64)> {
    let delta = 0.5f64.powi(level as i32 + 1);
    let half = domain.modulus_bound() + 1.5 * level as f64;
    let steps = (half / delta).floor() as i64;
    let mut centers: Vec<Complex64> = Vec::new();
    for i in -steps..=steps {
        for j in -steps..=steps {
            centers.push(Complex64::new(i as f64 * delta, j as f64 * delta));
        }
    }
    let angle = |z: &Complex64| {
        let a = z.im.atan2(z.re);
        if a < 0.0 {
            a + 2.0 * PI
        } else {
            a
        }
    };
    centers.sort_by(|a, b| {
        angle(a)
            .total_cmp(&angle(b))
            .then(b.norm().total_cmp(&a.norm()))
    });
    let radii = (level as f64 / delta).ceil() as usize;
    let mut out = Vec::new();
    for j in 1..=radii {
        let rho = j as f64 * delta;
        for c in &centers {
            if domain.closure_distance(pt(*c)) - rho >= delta / 2.0 {
                out.push((pt(*c), rho));
            }
        }
    }
    out
}

/// `m`-th member (1-based) of a fixed countable schedule of closed disks
/// outside the closure of `Ω`.
///
/// Level `ℓ` uses lattice spacing and radius step `δ = 2^-(ℓ+1)`, radii up to
/// `ℓ`, and centers within `max|Ω̄| + 1.5ℓ`; entries are ordered by radius,
/// then argument of the center, then decreasing modulus, and kept when the
/// disk stays `δ/2` away from `Ω̄`. Every closed disk disjoint from `Ω̄` is
/// contained in some member, so the schedule is cofinal among disks (general
/// compacts with connected complement are not covered).
pub fn outer_family(domain: &DomainSpec, m: usize) -> Result<CompactSpec> {
    domain.check()?;
    if m == 0 {
        return Err(Error::InvalidArgument("outer family index starts at 1".into()));
    }
    let mut remaining = m;
    for level in 1.. {
        let entries = outer_level(domain, level);
        if remaining <= entries.len() {
            let (center, radius) = entries[remaining - 1];
            return Ok(CompactSpec::Disk { center, radius });
        }
        remaining -= entries.len();
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_and_segment_samples() {
        let s = sample(&CompactSpec::disk(0.0, 0.0, 1.0), 2.0 * PI / 8.0).unwrap();
        assert_eq!(s.len(), 8);
        assert_eq!(s.points[0], [1.0, 0.0]);
        let s = sample(&CompactSpec::segment([2.0, 0.0], [3.0, 0.0]), 0.25).unwrap();
        let xs: Vec<f64> = s.points.iter().map(|p| p[0]).collect();
        assert_eq!(xs, vec![2.0, 2.25, 2.5, 2.75, 3.0]);
    }

    #[test]
    fn union_concatenates_pieces() {
        let a = CompactSpec::disk(0.0, 0.0, 0.5);
        let b = CompactSpec::disk(2.5, 0.0, 0.25);
        let mesh = 0.1;
        let u = CompactSpec::Union { pieces: vec![a.clone(), b.clone()] };
        let su = sample(&u, mesh).unwrap();
        let (sa, sb) = (sample(&a, mesh).unwrap(), sample(&b, mesh).unwrap());
        assert_eq!(su.len(), sa.len() + sb.len());
        assert!(sa.len() as f64 >= a.perimeter() / mesh);
        assert!(sb.len() as f64 >= b.perimeter() / mesh);
    }

    #[test]
    fn degenerate_shapes() {
        assert!(matches!(sample(&CompactSpec::disk(0.0, 0.0, 0.0), 0.1), Err(Error::DegenerateShape(_))));
        assert!(matches!(
            sample(&CompactSpec::segment([1.0, 1.0], [1.0, 1.0]), 0.1),
            Err(Error::DegenerateShape(_))
        ));
        assert!(sample(&CompactSpec::disk(0.0, 0.0, 1.0), 0.0).is_err());
    }

    #[test]
    fn inner_family_examples() {
        let d = DomainSpec::unit_disk();
        assert_eq!(inner_exhaustion(&d, 2).unwrap(), CompactSpec::disk(0.0, 0.0, 0.5));
        assert_eq!(inner_exhaustion(&d, 4).unwrap(), CompactSpec::disk(0.0, 0.0, 0.75));
        assert!(inner_exhaustion(&d, 1).is_err());

        let r = DomainSpec::Rectangle { min: [0.0, 0.0], max: [4.0, 2.0] };
        let l4 = inner_exhaustion(&r, 4).unwrap();
        match &l4 {
            CompactSpec::Intersection { pieces } => {
                assert_eq!(
                    pieces[0],
                    CompactSpec::Polygon {
                        vertices: vec![[0.25, 0.25], [3.75, 0.25], [3.75, 1.75], [0.25, 1.75]]
                    }
                );
                assert_eq!(pieces[1], CompactSpec::disk(0.0, 0.0, 4.0));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(l4.contains([3.0, 1.0], 0.0));
        assert!(!l4.contains([3.75, 1.75], 1e-9));
    }

    #[test]
    fn inner_family_nests_and_stays_inside() {
        let domains = [
            DomainSpec::unit_disk(),
            DomainSpec::Rectangle { min: [0.0, 0.0], max: [4.0, 2.0] },
            DomainSpec::HalfDisk { center: [0.0, 0.0], radius: 2.0 },
        ];
        let mesh = 0.05;
        for d in &domains {
            for k in 3..8 {
                let lk = inner_exhaustion(d, k).unwrap();
                let next = inner_exhaustion(d, k + 1).unwrap();
                for p in sample_with_interior(&lk, mesh).unwrap().points {
                    assert!(d.boundary_distance(p) >= 1.0 / k as f64 - mesh, "{d:?} {k} {p:?}");
                    assert!(next.depth(p) > 0.0, "{d:?} {k} {p:?}");
                }
            }
        }
        assert!(inner_exhaustion(&DomainSpec::DiskComplement { center: [0.0, 0.0], radius: 1.0 }, 2).is_err());
    }

    #[test]
    fn outer_family_first_entry() {
        let d = DomainSpec::unit_disk();
        let k1 = outer_family(&d, 1).unwrap();
        assert_eq!(k1, CompactSpec::disk(2.5, 0.0, 0.25));
        let seg = CompactSpec::segment([2.4, 0.0], [2.6, 0.0]);
        for p in sample(&seg, 0.01).unwrap().points {
            assert!(k1.contains(p, 0.0));
        }
        for m in 1..40 {
            let km = outer_family(&d, m).unwrap();
            for p in sample_with_interior(&km, 0.05).unwrap().points {
                assert!(d.closure_distance(p) > 0.0);
            }
        }
    }
}
