//! Planar geometry shared by the terrain tree and the preload engine.
//!
//! All coordinates are world meters on the ground plane. Rectangles and
//! triangles are closed sets: touching counts as intersecting.

use nalgebra::{Point2, Vector2};
use serde::{Deserialize, Serialize};

pub type Point = Point2<f64>;
pub type Vec2 = Vector2<f64>;

/// Axis-aligned rectangle in world meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Domain {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        debug_assert!(x_min <= x_max && y_min <= y_max);
        Self {
            x_min,
            x_max,
            y_min,
            y_max,
        }
    }

    /// Smallest rectangle containing every point. `None` for an empty iterator.
    pub fn bounding(points: impl IntoIterator<Item = Point>) -> Option<Self> {
        let mut iter = points.into_iter();
        let first = iter.next()?;
        let mut d = Domain::new(first.x, first.x, first.y, first.y);
        for p in iter {
            d.x_min = d.x_min.min(p.x);
            d.x_max = d.x_max.max(p.x);
            d.y_min = d.y_min.min(p.y);
            d.y_max = d.y_max.max(p.y);
        }
        Some(d)
    }

    pub fn around(center: Point, radius: f64) -> Self {
        Domain::new(
            center.x - radius,
            center.x + radius,
            center.y - radius,
            center.y + radius,
        )
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> Point {
        Point::new(
            0.5 * (self.x_min + self.x_max),
            0.5 * (self.y_min + self.y_max),
        )
    }

    pub fn corners(&self) -> [Point; 4] {
        [
            Point::new(self.x_min, self.y_min),
            Point::new(self.x_max, self.y_min),
            Point::new(self.x_max, self.y_max),
            Point::new(self.x_min, self.y_max),
        ]
    }

    pub fn contains_point(&self, p: Point) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    pub fn contains(&self, other: &Domain) -> bool {
        other.x_min >= self.x_min
            && other.x_max <= self.x_max
            && other.y_min >= self.y_min
            && other.y_max <= self.y_max
    }

    pub fn intersects(&self, other: &Domain) -> bool {
        self.x_min <= other.x_max
            && other.x_min <= self.x_max
            && self.y_min <= other.y_max
            && other.y_min <= self.y_max
    }

    /// Overlap of interiors (shared edges do not count).
    pub fn overlaps_interior(&self, other: &Domain) -> bool {
        self.x_min < other.x_max
            && other.x_min < self.x_max
            && self.y_min < other.y_max
            && other.y_min < self.y_max
    }

    pub fn intersection(&self, other: &Domain) -> Option<Domain> {
        self.intersects(other).then(|| {
            Domain::new(
                self.x_min.max(other.x_min),
                self.x_max.min(other.x_max),
                self.y_min.max(other.y_min),
                self.y_max.min(other.y_max),
            )
        })
    }

    /// Euclidean distance from `p` to the closest point of the rectangle.
    pub fn distance_to(&self, p: Point) -> f64 {
        let dx = (self.x_min - p.x).max(0.0).max(p.x - self.x_max);
        let dy = (self.y_min - p.y).max(0.0).max(p.y - self.y_max);
        dx.hypot(dy)
    }

    pub fn intersects_disc(&self, center: Point, radius: f64) -> bool {
        self.distance_to(center) <= radius
    }

    /// Distance from the segment `a`–`b` to the closest point of the rectangle.
    pub fn distance_to_segment(&self, a: Point, b: Point) -> f64 {
        if self.clips_segment(a, b) {
            return 0.0;
        }
        let ends = self.distance_to(a).min(self.distance_to(b));
        self.corners()
            .iter()
            .map(|c| segment_distance(*c, a, b))
            .fold(ends, f64::min)
    }

    /// Liang–Barsky: does any part of the segment lie inside the rectangle?
    fn clips_segment(&self, a: Point, b: Point) -> bool {
        let d = b - a;
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for (p, q) in [
            (-d.x, a.x - self.x_min),
            (d.x, self.x_max - a.x),
            (-d.y, a.y - self.y_min),
            (d.y, self.y_max - a.y),
        ] {
            if p == 0.0 {
                if q < 0.0 {
                    return false;
                }
            } else if p < 0.0 {
                lo = lo.max(q / p);
            } else {
                hi = hi.min(q / p);
            }
        }
        lo <= hi
    }
}

/// Closed triangle; vertex order is irrelevant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle(pub [Point; 3]);

impl Triangle {
    pub fn area(&self) -> f64 {
        let [a, b, c] = self.0;
        0.5 * cross(b - a, c - a).abs()
    }

    pub fn bounding_box(&self) -> Domain {
        Domain::bounding(self.0).expect("three vertices")
    }

    pub fn contains_point(&self, p: Point) -> bool {
        let [a, b, c] = self.0;
        let d1 = cross(b - a, p - a);
        let d2 = cross(c - b, p - b);
        let d3 = cross(a - c, p - c);
        let has_neg = d1 < 0.0 || d2 < 0.0 || d3 < 0.0;
        let has_pos = d1 > 0.0 || d2 > 0.0 || d3 > 0.0;
        !(has_neg && has_pos)
    }

    /// Separating-axis test against an axis-aligned rectangle.
    pub fn intersects_domain(&self, rect: &Domain) -> bool {
        if !self.bounding_box().intersects(rect) {
            return false;
        }
        let corners = rect.corners();
        for k in 0..3 {
            let a = self.0[k];
            let b = self.0[(k + 1) % 3];
            let edge = b - a;
            let normal = Vec2::new(-edge.y, edge.x);
            if normal.norm_squared() == 0.0 {
                continue;
            }
            let (tmin, tmax) = project(&self.0, normal);
            let (rmin, rmax) = project(&corners, normal);
            if tmax < rmin || rmax < tmin {
                return false;
            }
        }
        true
    }

    /// Distance from `p` to the triangle (0 inside).
    pub fn distance_to(&self, p: Point) -> f64 {
        if self.contains_point(p) {
            return 0.0;
        }
        (0..3)
            .map(|k| segment_distance(p, self.0[k], self.0[(k + 1) % 3]))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn intersects_disc(&self, center: Point, radius: f64) -> bool {
        self.distance_to(center) <= radius
    }
}

fn project(points: &[Point], axis: Vec2) -> (f64, f64) {
    points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        let t = p.coords.dot(&axis);
        (lo.min(t), hi.max(t))
    })
}

pub fn cross(a: Vec2, b: Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

pub fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Wraps an angle into (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let mut r = a.rem_euclid(tau);
    if r > std::f64::consts::PI {
        r -= tau;
    }
    r
}
