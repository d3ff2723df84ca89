use crate::error::{Error, Result};

/// Axis-aligned box given by its top-left `(x1, y1)` and bottom-right
/// `(x2, y2)` corners in continuous pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxRect {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

impl BoxRect {
    pub fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Result<Self> {
        let r = BoxRect { x1, y1, x2, y2 };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.x1, self.y1, self.x2, self.y2]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::invalid(format!("box {self:?} has non-finite corners")));
        }
        if self.x1 >= self.x2 || self.y1 >= self.y2 {
            return Err(Error::invalid(format!(
                "box requires x1 < x2 and y1 < y2, got ({}, {}, {}, {})",
                self.x1, self.y1, self.x2, self.y2
            )));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.x2 - self.x1
    }

    pub fn height(&self) -> f64 {
        self.y2 - self.y1
    }

    pub fn center(&self) -> (f64, f64) {
        ((self.x1 + self.x2) / 2.0, (self.y1 + self.y2) / 2.0)
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    /// Inclusive on all four edges.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.x1 <= x && x <= self.x2 && self.y1 <= y && y <= self.y2
    }

    /// Distance from an interior point to the nearest edge; 0 on the
    /// perimeter. Only meaningful when `contains(x, y)`.
    pub fn perimeter_distance(&self, x: f64, y: f64) -> f64 {
        (x - self.x1)
            .min(self.x2 - x)
            .min(y - self.y1)
            .min(self.y2 - y)
    }

    pub fn intersection_area(&self, other: &BoxRect) -> f64 {
        let w = (self.x2.min(other.x2) - self.x1.max(other.x1)).max(0.0);
        let h = (self.y2.min(other.y2) - self.y1.max(other.y1)).max(0.0);
        w * h
    }

    pub fn iou(&self, other: &BoxRect) -> f64 {
        let inter = self.intersection_area(other);
        let union = self.area() + other.area() - inter;
        if union > 0.0 {
            inter / union
        } else {
            0.0
        }
    }
}
