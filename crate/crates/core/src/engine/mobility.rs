//! Random Walk with specular reflection at the world edges.

use std::f64::consts::TAU;

use rand::Rng;

use crate::geometry::{Position, Vec2};

/// Axis-aligned world rectangle `[0, width] × [0, height]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub width: f64,
    pub height: f64,
}

impl Bounds {
    pub fn contains(&self, p: Position) -> bool {
        (0.0..=self.width).contains(&p.x) && (0.0..=self.height).contains(&p.y)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Position {
        Position::new(rng.gen::<f64>() * self.width, rng.gen::<f64>() * self.height)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Walker {
    pub position: Position,
    /// Unit vector.
    pub heading: Vec2,
    /// Meters left on the current leg.
    pub leg_remaining: f64,
}

impl Walker {
    pub fn spawn<R: Rng + ?Sized>(bounds: &Bounds, legs: (f64, f64), rng: &mut R) -> Self {
        let position = bounds.sample(rng);
        let mut w = Walker { position, heading: Vec2::new(1.0, 0.0), leg_remaining: 0.0 };
        w.new_leg(legs, rng);
        w
    }

    /// Stationary walker, for hand-built layouts.
    pub fn parked(position: Position) -> Self {
        Walker { position, heading: Vec2::new(1.0, 0.0), leg_remaining: f64::INFINITY }
    }

    fn new_leg<R: Rng + ?Sized>(&mut self, legs: (f64, f64), rng: &mut R) {
        self.heading = Vec2::from_angle(rng.gen::<f64>() * TAU);
        self.leg_remaining = if legs.0 < legs.1 { rng.gen_range(legs.0..=legs.1) } else { legs.0 };
    }

    /// Advance `speed · dt` meters along the walk. Returns the path length
    /// covered, which equals `speed · dt` up to rounding.
    pub fn step<R: Rng + ?Sized>(
        &mut self,
        speed: f64,
        dt: f64,
        bounds: &Bounds,
        legs: (f64, f64),
        rng: &mut R,
    ) -> f64 {
        let mut left = speed * dt;
        let mut travelled = 0.0;
        while left > 0.0 {
            if self.leg_remaining <= 0.0 {
                self.new_leg(legs, rng);
            }
            let seg = left.min(self.leg_remaining);
            self.advance(seg, bounds);
            travelled += seg;
            left -= seg;
            self.leg_remaining -= seg;
        }
        if self.leg_remaining <= 0.0 {
            self.new_leg(legs, rng);
        }
        travelled
    }

    fn advance(&mut self, dist: f64, bounds: &Bounds) {
        let mut p = self.position.offset(self.heading.scale(dist));
        let mut h = self.heading;
        // Fold the straight path back into the box; each fold mirrors the
        // heading component normal to that wall.
        loop {
            if p.x < 0.0 {
                p.x = -p.x;
                h.dx = -h.dx;
            } else if p.x > bounds.width {
                p.x = 2.0 * bounds.width - p.x;
                h.dx = -h.dx;
            } else if p.y < 0.0 {
                p.y = -p.y;
                h.dy = -h.dy;
            } else if p.y > bounds.height {
                p.y = 2.0 * bounds.height - p.y;
                h.dy = -h.dy;
            } else {
                break;
            }
        }
        self.position = p;
        self.heading = h;
    }
}
