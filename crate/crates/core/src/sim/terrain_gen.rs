//! Seeded synthetic relief: value-noise fBm plus optional Gaussian peaks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::terrain::HeightField;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Peak {
    pub x: f64,
    pub y: f64,
    /// Added elevation at the summit.
    pub height: f64,
    /// Standard deviation of the bump, meters.
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TerrainRecipe {
    pub width: usize,
    pub height: usize,
    pub cell_size: f64,
    /// Elevation of the lowest noise value.
    pub base: f64,
    /// Peak-to-trough amplitude of the noise.
    pub relief: f64,
    /// Wavelength of the coarsest octave, meters.
    pub feature_scale: f64,
    pub octaves: u32,
    #[serde(default)]
    pub peaks: Vec<Peak>,
}

impl TerrainRecipe {
    pub fn validate(&self) -> Result<()> {
        if self.width < 2 || self.height < 2 {
            return Err(Error::invalid("terrain needs at least 2x2 samples"));
        }
        if !(self.cell_size > 0.0 && self.feature_scale > 0.0 && self.relief >= 0.0) {
            return Err(Error::invalid("terrain cell size, feature scale and relief must be positive"));
        }
        if self.octaves == 0 || self.octaves > 12 {
            return Err(Error::invalid("terrain octaves must lie in 1..=12"));
        }
        if self.peaks.iter().any(|p| !(p.radius > 0.0)) {
            return Err(Error::invalid("peak radius must be positive"));
        }
        Ok(())
    }
}

/// One octave of bilinear value noise on a lattice of `spacing` meters.
struct Lattice {
    spacing: f64,
    nx: usize,
    values: Vec<f64>,
}

impl Lattice {
    fn new(rng: &mut ChaCha8Rng, spacing: f64, extent_x: f64, extent_y: f64) -> Self {
        let nx = (extent_x / spacing).ceil() as usize + 2;
        let ny = (extent_y / spacing).ceil() as usize + 2;
        let values = (0..nx * ny).map(|_| rng.gen::<f64>()).collect();
        Self { spacing, nx, values }
    }

    fn at(&self, x: f64, y: f64) -> f64 {
        let (gx, gy) = (x / self.spacing, y / self.spacing);
        let (ix, iy) = (gx.floor() as usize, gy.floor() as usize);
        let smooth = |t: f64| t * t * (3.0 - 2.0 * t);
        let (tx, ty) = (smooth(gx - ix as f64), smooth(gy - iy as f64));
        let v = |i: usize, j: usize| self.values[j * self.nx + i];
        let bottom = v(ix, iy) * (1.0 - tx) + v(ix + 1, iy) * tx;
        let top = v(ix, iy + 1) * (1.0 - tx) + v(ix + 1, iy + 1) * tx;
        bottom * (1.0 - ty) + top * ty
    }
}

/// Builds the height field described by `recipe`; the same seed always
/// yields the same elevations.
pub fn generate_terrain(recipe: &TerrainRecipe, seed: u64) -> Result<HeightField> {
    recipe.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ex = (recipe.width - 1) as f64 * recipe.cell_size;
    let ey = (recipe.height - 1) as f64 * recipe.cell_size;
    let octaves: Vec<(Lattice, f64)> = (0..recipe.octaves)
        .map(|o| {
            let spacing = recipe.feature_scale / f64::from(1u32 << o);
            (Lattice::new(&mut rng, spacing, ex, ey), 0.5f64.powi(o as i32))
        })
        .collect();
    let norm: f64 = octaves.iter().map(|(_, a)| a).sum();
    let origin = Point::origin();
    let cell = recipe.cell_size;
    HeightField::from_fn(recipe.width, recipe.height, cell, origin, |i, j| {
        let (x, y) = (i as f64 * cell, j as f64 * cell);
        let noise: f64 = octaves.iter().map(|(l, a)| a * l.at(x, y)).sum::<f64>() / norm;
        let bumps: f64 = recipe
            .peaks
            .iter()
            .map(|p| {
                let r2 = (x - p.x).powi(2) + (y - p.y).powi(2);
                p.height * (-r2 / (2.0 * p.radius * p.radius)).exp()
            })
            .sum();
        recipe.base + recipe.relief * noise + bumps
    })
}
