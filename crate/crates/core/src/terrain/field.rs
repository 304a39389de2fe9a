use crate::error::{Error, Result};
use crate::geom::{Domain, Point};

/// Regular grid of terrain elevations, row-major with `width` samples per
/// row along +X and `height` rows along +Y.
#[derive(Debug, Clone, PartialEq)]
pub struct HeightField {
    width: usize,
    height: usize,
    cell_size: f64,
    origin: Point,
    elevations: Vec<f32>,
}

/// Inclusive range of sample indices `[i0, i1] x [j0, j1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridRect {
    pub i0: usize,
    pub i1: usize,
    pub j0: usize,
    pub j1: usize,
}

impl GridRect {
    pub fn point_count(&self) -> usize {
        (self.i1 - self.i0 + 1) * (self.j1 - self.j0 + 1)
    }

    pub fn span_x(&self) -> usize {
        self.i1 - self.i0
    }

    pub fn span_y(&self) -> usize {
        self.j1 - self.j0
    }
}

impl HeightField {
    pub fn new(
        width: usize,
        height: usize,
        cell_size: f64,
        origin: Point,
        elevations: Vec<f32>,
    ) -> Result<Self> {
        if width < 2 || height < 2 {
            return Err(Error::invalid(format!(
                "height field must be at least 2x2 samples, got {width}x{height}"
            )));
        }
        if !(cell_size.is_finite() && cell_size > 0.0) {
            return Err(Error::invalid(format!("cell size must be positive, got {cell_size}")));
        }
        if !(origin.x.is_finite() && origin.y.is_finite()) {
            return Err(Error::invalid("origin must be finite"));
        }
        if elevations.len() != width * height {
            return Err(Error::invalid(format!(
                "expected {} elevations, got {}",
                width * height,
                elevations.len()
            )));
        }
        if let Some(k) = elevations.iter().position(|h| !h.is_finite()) {
            return Err(Error::invalid(format!("elevation {k} is not finite")));
        }
        Ok(Self {
            width,
            height,
            cell_size,
            origin,
            elevations,
        })
    }

    /// Builds a field by evaluating `f(i, j)` at every sample.
    pub fn from_fn(
        width: usize,
        height: usize,
        cell_size: f64,
        origin: Point,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut elevations = Vec::with_capacity(width * height);
        for j in 0..height {
            for i in 0..width {
                elevations.push(f(i, j) as f32);
            }
        }
        Self::new(width, height, cell_size, origin, elevations)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn origin(&self) -> Point {
        self.origin
    }

    pub fn elevations(&self) -> &[f32] {
        &self.elevations
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.elevations[j * self.width + i] as f64
    }

    /// World position of sample `(i, j)`.
    #[inline]
    pub fn world(&self, i: usize, j: usize) -> Point {
        Point::new(
            self.origin.x + i as f64 * self.cell_size,
            self.origin.y + j as f64 * self.cell_size,
        )
    }

    pub fn full_rect(&self) -> GridRect {
        GridRect {
            i0: 0,
            i1: self.width - 1,
            j0: 0,
            j1: self.height - 1,
        }
    }

    pub fn rect_domain(&self, r: &GridRect) -> Domain {
        let lo = self.world(r.i0, r.j0);
        let hi = self.world(r.i1, r.j1);
        Domain::new(lo.x, hi.x, lo.y, hi.y)
    }

    pub fn domain(&self) -> Domain {
        self.rect_domain(&self.full_rect())
    }

    pub fn contains_rect(&self, r: &GridRect) -> bool {
        r.i0 <= r.i1 && r.j0 <= r.j1 && r.i1 < self.width && r.j1 < self.height
    }

    /// Sample indices whose world positions fall inside `d` (closed).
    pub fn rect_covering(&self, d: &Domain) -> Option<GridRect> {
        let d = d.intersection(&self.domain())?;
        let lo_i = ((d.x_min - self.origin.x) / self.cell_size).ceil().max(0.0) as usize;
        let hi_i = ((d.x_max - self.origin.x) / self.cell_size).floor() as usize;
        let lo_j = ((d.y_min - self.origin.y) / self.cell_size).ceil().max(0.0) as usize;
        let hi_j = ((d.y_max - self.origin.y) / self.cell_size).floor() as usize;
        let r = GridRect {
            i0: lo_i,
            i1: hi_i.min(self.width - 1),
            j0: lo_j,
            j1: hi_j.min(self.height - 1),
        };
        (r.i0 <= r.i1 && r.j0 <= r.j1).then_some(r)
    }

    /// Bilinear terrain height at a world point, `None` outside the field.
    pub fn height_at(&self, p: Point) -> Option<f64> {
        if !self.domain().contains_point(p) {
            return None;
        }
        let fx = (p.x - self.origin.x) / self.cell_size;
        let fy = (p.y - self.origin.y) / self.cell_size;
        let i = (fx.floor() as usize).min(self.width - 2);
        let j = (fy.floor() as usize).min(self.height - 2);
        let tx = fx - i as f64;
        let ty = fy - j as f64;
        let h00 = self.at(i, j);
        let h10 = self.at(i + 1, j);
        let h01 = self.at(i, j + 1);
        let h11 = self.at(i + 1, j + 1);
        Some(
            (1.0 - tx) * (1.0 - ty) * h00
                + tx * (1.0 - ty) * h10
                + (1.0 - tx) * ty * h01
                + tx * ty * h11,
        )
    }

    pub fn min_elevation(&self) -> f64 {
        self.elevations.iter().copied().fold(f32::INFINITY, f32::min) as f64
    }

    pub fn max_elevation(&self) -> f64 {
        self.elevations
            .iter()
            .copied()
            .fold(f32::NEG_INFINITY, f32::max) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate() {
        let e = HeightField::new(1, 5, 1.0, Point::origin(), vec![0.0; 5]);
        assert!(matches!(e, Err(Error::InvalidInput(_))));
        let e = HeightField::new(2, 2, 0.0, Point::origin(), vec![0.0; 4]);
        assert!(e.is_err());
        let e = HeightField::new(2, 2, 1.0, Point::origin(), vec![0.0, f32::NAN, 0.0, 0.0]);
        assert!(e.is_err());
    }

    #[test]
    fn bilinear_sampling() {
        let f = HeightField::from_fn(3, 3, 10.0, Point::new(100.0, 0.0), |i, j| {
            (i * 10 + j) as f64
        })
        .unwrap();
        assert_eq!(f.height_at(Point::new(110.0, 10.0)), Some(11.0));
        assert_eq!(f.height_at(Point::new(105.0, 0.0)), Some(5.0));
        assert_eq!(f.height_at(Point::new(120.0, 20.0)), Some(22.0));
        assert_eq!(f.height_at(Point::new(99.0, 0.0)), None);
    }

    #[test]
    fn covering_rect() {
        let f = HeightField::from_fn(5, 5, 1.0, Point::origin(), |_, _| 0.0).unwrap();
        let r = f.rect_covering(&Domain::new(0.5, 2.0, -3.0, 1.5)).unwrap();
        assert_eq!(r, GridRect { i0: 1, i1: 2, j0: 0, j1: 1 });
        assert!(f.rect_covering(&Domain::new(10.0, 11.0, 0.0, 1.0)).is_none());
    }
}
