//! Seeded synthetic populations for simulation studies.
//!
//! Units are generated from standardized latent scores
//!
//! ```text
//! Z = e1
//! X = lx·Z + sqrt(1 − lx²)·e2
//! Y = ly·X + sqrt(1 − ly²)·e3
//! ```
//!
//! and mapped to positive scales `z = 100 + 20 Z`, `x = 60 + 12 X`,
//! `y = 200 + 30 Y`. With the default loadings `lx = 0.95`, `ly = 0.9` the
//! population correlations land near `ρ_xz ≈ 0.95`, `ρ_yx ≈ 0.9`,
//! `ρ_yz ≈ 0.86`, so `z` is closely tied to `x` but only indirectly to `y`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::moments::PopulationFrame;

/// Distribution of the latent noise terms `e1, e2, e3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Noise {
    /// Standard normal.
    Gaussian,
    /// Centred unit exponential (mean 0, variance 1, skewness 2).
    Skewed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub units: usize,
    /// Loading of `X` on `Z`.
    pub x_loading: f64,
    /// Loading of `Y` on `X`.
    pub y_loading: f64,
    pub noise: Noise,
}

impl SyntheticSpec {
    /// The reference population used by the acceptance simulations.
    pub fn reference(units: usize) -> Self {
        SyntheticSpec {
            units,
            x_loading: 0.95,
            y_loading: 0.9,
            noise: Noise::Gaussian,
        }
    }
}

fn draw_noise<R: Rng>(noise: Noise, rng: &mut R) -> f64 {
    match noise {
        Noise::Gaussian => StandardNormal.sample(rng),
        Noise::Skewed => {
            let e: f64 = Exp1.sample(rng);
            e - 1.0
        }
    }
}

pub fn synthetic_population(spec: &SyntheticSpec, seed: u64) -> Result<PopulationFrame> {
    for (name, l) in [("x_loading", spec.x_loading), ("y_loading", spec.y_loading)] {
        if !(l.abs() < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "{name} = {l} must lie in (-1, 1)"
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lx, ly) = (spec.x_loading, spec.y_loading);
    let (rx, ry) = ((1.0 - lx * lx).sqrt(), (1.0 - ly * ly).sqrt());
    let mut y = Vec::with_capacity(spec.units);
    let mut x = Vec::with_capacity(spec.units);
    let mut z = Vec::with_capacity(spec.units);
    for _ in 0..spec.units {
        let zs = draw_noise(spec.noise, &mut rng);
        let xs = lx * zs + rx * draw_noise(spec.noise, &mut rng);
        let ys = ly * xs + ry * draw_noise(spec.noise, &mut rng);
        z.push(100.0 + 20.0 * zs);
        x.push(60.0 + 12.0 * xs);
        y.push(200.0 + 30.0 * ys);
    }
    PopulationFrame::new(y, x, z)
}
