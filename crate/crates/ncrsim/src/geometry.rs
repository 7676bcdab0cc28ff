//! 2D scene geometry: node positions, wall segments, blockage tests.

use crate::error::{Result, SimError};

/// A point in the 2D deployment plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// A blocking wall segment between two distinct endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wall {
    pub a: Position,
    pub b: Position,
}

impl Wall {
    pub fn new(a: Position, b: Position) -> Result<Self> {
        if a == b {
            return Err(SimError::CoincidentPositions { context: "Wall::new" });
        }
        Ok(Self { a, b })
    }
}

/// Euclidean distance in meters.
pub fn distance(a: Position, b: Position) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

/// Angle of the ray from `from` toward `to`, in radians.
pub fn boresight_angle(from: Position, to: Position) -> Result<f64> {
    if from == to {
        return Err(SimError::CoincidentPositions { context: "boresight_angle" });
    }
    Ok((to.y - from.y).atan2(to.x - from.x))
}

/// Sign of the cross product (q - o) x (p - o); orientation of the triple.
fn orientation(o: Position, p: Position, q: Position) -> f64 {
    (p.x - o.x) * (q.y - o.y) - (p.y - o.y) * (q.x - o.x)
}

/// Is `q` within the axis-aligned bounding box of segment [a, b]?
fn in_box(a: Position, b: Position, q: Position) -> bool {
    q.x >= a.x.min(b.x) && q.x <= a.x.max(b.x) && q.y >= a.y.min(b.y) && q.y <= a.y.max(b.y)
}

/// True iff the closed segments [p1, p2] and [wall.a, wall.b] share a point.
///
/// Standard orientation test with collinear handling; touching at an endpoint
/// counts as an intersection.
pub fn segments_intersect(p1: Position, p2: Position, wall: &Wall) -> bool {
    let (a, b) = (wall.a, wall.b);
    let d1 = orientation(a, b, p1);
    let d2 = orientation(a, b, p2);
    let d3 = orientation(p1, p2, a);
    let d4 = orientation(p1, p2, b);

    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && in_box(a, b, p1))
        || (d2 == 0.0 && in_box(a, b, p2))
        || (d3 == 0.0 && in_box(p1, p2, a))
        || (d4 == 0.0 && in_box(p1, p2, b))
}

/// True iff the link [p1, p2] crosses any of the walls.
pub fn link_blocked(p1: Position, p2: Position, walls: &[Wall]) -> bool {
    walls.iter().any(|w| segments_intersect(p1, p2, w))
}
