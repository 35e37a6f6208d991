//! Planar geometry in a local metric projection.

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Self) -> T {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn midpoint(self, other: Self) -> Self {
        let half = T::lit(0.5);
        Self::new((self.x + other.x) * half, (self.y + other.y) * half)
    }

    /// Linear interpolation; `t = 0` is `self`, `t = 1` is `other`.
    pub fn lerp(self, other: Self, t: T) -> Self {
        Self::new(
            self.x + (other.x - self.x) * t,
            self.y + (other.y - self.y) * t,
        )
    }
}

/// Result of projecting a point onto a segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection<T> {
    /// Fraction along the segment, clamped to `[0, 1]`.
    pub fraction: T,
    /// Distance from the query point to the closest point of the segment.
    pub distance: T,
}

/// Closest point on segment `a`-`b` to `p`.
pub fn project_onto_segment<T: Scalar>(p: Point<T>, a: Point<T>, b: Point<T>) -> Projection<T> {
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let len2 = dx * dx + dy * dy;
    let fraction = if len2 > T::zero() {
        let t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
        t.max(T::zero()).min(T::one())
    } else {
        T::zero()
    };
    let closest = a.lerp(b, fraction);
    Projection {
        fraction,
        distance: p.distance(closest),
    }
}

/// True if `p` lies on segment `a`-`b` (exact arithmetic on the inputs).
pub fn on_segment<T: Scalar>(p: Point<T>, a: Point<T>, b: Point<T>) -> bool {
    let cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
    if cross != T::zero() {
        return false;
    }
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed point-in-polygon test: boundary points count as inside.
///
/// The ring may be given open or closed (first point repeated at the end).
pub fn polygon_contains<T: Scalar>(ring: &[Point<T>], p: Point<T>) -> bool {
    let n = ring.len();
    if n < 3 {
        return false;
    }
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (ring[j], ring[i]);
        if on_segment(p, a, b) {
            return true;
        }
        if (b.y > p.y) != (a.y > p.y) {
            let x_cross = b.x + (p.y - b.y) * (a.x - b.x) / (a.y - b.y);
            if p.x < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<Point<f64>> {
        vec![
            Point::new(0.0, 0.0),
            Point::new(10.0, 0.0),
            Point::new(10.0, 10.0),
            Point::new(0.0, 10.0),
        ]
    }

    #[test]
    fn interior_boundary_exterior() {
        let sq = square();
        assert!(polygon_contains(&sq, Point::new(5.0, 5.0)));
        assert!(polygon_contains(&sq, Point::new(10.0, 5.0)));
        assert!(polygon_contains(&sq, Point::new(0.0, 0.0)));
        assert!(!polygon_contains(&sq, Point::new(10.5, 5.0)));
        assert!(!polygon_contains(&sq, Point::new(-1.0, -1.0)));
    }

    #[test]
    fn projection_clamps_to_endpoints() {
        let a = Point::new(0.0f32, 0.0);
        let b = Point::new(100.0f32, 0.0);
        let mid = project_onto_segment(Point::new(50.0, 0.0), a, b);
        assert_eq!(mid.fraction, 0.5);
        assert_eq!(mid.distance, 0.0);
        let past = project_onto_segment(Point::new(130.0, 40.0), a, b);
        assert_eq!(past.fraction, 1.0);
        assert_eq!(past.distance, 50.0);
    }
}
