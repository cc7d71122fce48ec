//! Two-phase simple random sampling without replacement.
//!
//! The first phase draws `n1` of the `N` units and observes `x` and `z` on
//! them; the second phase draws `n` of those `n1` units and observes `y`
//! (together with `x` and `z`, which the correlation and the plug-in
//! constants need on the same units).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::{central_moments, DeltaTable, PopulationFrame};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignSpec {
    #[serde(rename = "N")]
    pub population: usize,
    pub n1: usize,
    pub n: usize,
}

impl DesignSpec {
    /// `2 ≤ n ≤ n1 ≤ N`. Equality is allowed so census designs can be
    /// expressed; the interesting case is `n < n1`.
    pub fn new(population: usize, n1: usize, n: usize) -> Result<Self> {
        let d = DesignSpec { population, n1, n };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidDesign(format!(
                "n = {} must be at least 2",
                self.n
            )));
        }
        if self.n > self.n1 {
            return Err(Error::InvalidDesign(format!(
                "second phase n = {} exceeds first phase n1 = {}",
                self.n, self.n1
            )));
        }
        if self.n1 > self.population {
            return Err(Error::InvalidDesign(format!(
                "first phase n1 = {} exceeds population N = {}",
                self.n1, self.population
            )));
        }
        Ok(())
    }
}

/// Index sets of one two-phase draw, each kept sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoPhaseSample {
    first_phase: Vec<usize>,
    second_phase: Vec<usize>,
}

impl TwoPhaseSample {
    pub fn new(
        mut first_phase: Vec<usize>,
        mut second_phase: Vec<usize>,
        population: usize,
    ) -> Result<Self> {
        first_phase.sort_unstable();
        second_phase.sort_unstable();
        let bad = |msg: String| Err(Error::InvalidDesign(msg));
        if first_phase.windows(2).any(|w| w[0] == w[1])
            || second_phase.windows(2).any(|w| w[0] == w[1])
        {
            return bad("duplicate unit in sample".into());
        }
        if let Some(&i) = first_phase.last() {
            if i >= population {
                return bad(format!("unit {i} outside population of {population}"));
            }
        }
        if let Some(&i) = second_phase
            .iter()
            .find(|i| first_phase.binary_search(i).is_err())
        {
            return bad(format!("second-phase unit {i} is not in the first phase"));
        }
        Ok(TwoPhaseSample {
            first_phase,
            second_phase,
        })
    }

    pub fn first_phase(&self) -> &[usize] {
        &self.first_phase
    }

    pub fn second_phase(&self) -> &[usize] {
        &self.second_phase
    }
}

fn partial_shuffle<R: Rng + ?Sized>(pool: &mut [usize], k: usize, rng: &mut R) {
    for i in 0..k {
        let j = rng.random_range(i..pool.len());
        pool.swap(i, j);
    }
}

/// Draws a two-phase sample using the supplied generator.
pub fn draw_two_phase_with<R: Rng + ?Sized>(
    design: &DesignSpec,
    rng: &mut R,
) -> Result<TwoPhaseSample> {
    design.validate()?;
    let mut pool: Vec<usize> = (0..design.population).collect();
    partial_shuffle(&mut pool, design.n1, rng);
    pool.truncate(design.n1);
    pool.sort_unstable();
    let first_phase = pool.clone();

    partial_shuffle(&mut pool, design.n, rng);
    pool.truncate(design.n);
    pool.sort_unstable();

    Ok(TwoPhaseSample {
        first_phase,
        second_phase: pool,
    })
}

/// Seeded two-phase draw. Identical `(design, seed)` pairs give identical samples.
pub fn draw_two_phase(design: &DesignSpec, seed: u64) -> Result<TwoPhaseSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    draw_two_phase_with(design, &mut rng)
}

/// Known population mean and variance (divisor `N − 1`) of `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnownAux {
    pub mean_z: f64,
    pub var_z: f64,
}

impl KnownAux {
    pub fn new(mean_z: f64, var_z: f64) -> Result<Self> {
        if !mean_z.is_finite() || !(var_z > 0.0) || !var_z.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "known z parameters need a finite mean and positive variance (got {mean_z}, {var_z})"
            )));
        }
        Ok(KnownAux { mean_z, var_z })
    }

    pub fn from_frame(frame: &PopulationFrame) -> Result<Self> {
        let (mean, var) = mean_and_var(frame.z());
        Self::new(mean, var)
    }
}

/// Mean and variance with divisor `len − 1`, two-pass.
fn mean_and_var(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, ss / (n - 1.0))
}

/// Every sample quantity an estimator may consume.
///
/// Unstarred fields are second-phase statistics, `*_first` fields are
/// first-phase ones. Variances use divisor `n − 1` (`n1 − 1`); the moment
/// table `delta` uses divisor `n` and is computed on the second phase.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleStatistics {
    pub n: usize,
    pub n1: usize,
    pub mean_y: f64,
    pub mean_x: f64,
    pub mean_z: f64,
    pub mean_x_first: f64,
    pub mean_z_first: f64,
    pub s2_y: f64,
    pub s2_x: f64,
    pub s2_z: f64,
    pub s_yx: f64,
    pub s2_x_first: f64,
    pub s2_z_first: f64,
    pub aux: KnownAux,
    /// Sample correlation coefficient.
    pub r: f64,
    /// `x̄ / x̄*`
    pub u: f64,
    /// `s_x² / s_x*²`
    pub v: f64,
    /// `z̄* / Z̄`
    pub w: f64,
    /// `s_z*² / S_z²`
    pub a: f64,
    pub delta: DeltaTable,
    /// `s_x / x̄`; infinite when the second-phase mean of `x` is zero.
    pub cx_hat: f64,
    /// `s_z / z̄`
    pub cz_hat: f64,
}

pub fn sample_statistics(
    frame: &PopulationFrame,
    sample: &TwoPhaseSample,
    aux: &KnownAux,
) -> Result<SampleStatistics> {
    let population = frame.len();
    if sample.first_phase.last().is_some_and(|&i| i >= population) {
        return Err(Error::InvalidDesign(format!(
            "sample indexes beyond population of {population}"
        )));
    }
    let n = sample.second_phase.len();
    let n1 = sample.first_phase.len();
    if n < 2 {
        return Err(Error::InvalidDesign(format!("second phase has {n} units")));
    }

    let gather = |col: &[f64], idx: &[usize]| idx.iter().map(|&i| col[i]).collect::<Vec<f64>>();
    let ys = gather(frame.y(), &sample.second_phase);
    let xs = gather(frame.x(), &sample.second_phase);
    let zs = gather(frame.z(), &sample.second_phase);
    let x_first = gather(frame.x(), &sample.first_phase);
    let z_first = gather(frame.z(), &sample.first_phase);

    let cm = central_moments(&ys, &xs, &zs);
    for (k, name) in ["y", "x", "z"].iter().enumerate() {
        if !(cm.mu2[k] > 0.0) {
            return Err(Error::DegenerateSample(format!(
                "second-phase {name} has zero variance"
            )));
        }
    }
    let [mean_y, mean_x, mean_z] = cm.means;
    let s2_y = mean_and_var(&ys).1;
    let s2_x = mean_and_var(&xs).1;
    let s2_z = mean_and_var(&zs).1;
    let s_yx = ys
        .iter()
        .zip(&xs)
        .map(|(y, x)| (y - mean_y) * (x - mean_x))
        .sum::<f64>()
        / (n as f64 - 1.0);
    let r = cm
        .delta
        .get(1, 1, 0)
        .expect("order-2 entries always present");

    let (mean_x_first, s2_x_first) = mean_and_var(&x_first);
    let (mean_z_first, s2_z_first) = mean_and_var(&z_first);
    if !(s2_x_first > 0.0) || !(s2_z_first > 0.0) {
        return Err(Error::DegenerateSample(
            "first-phase variance is zero".into(),
        ));
    }
    if mean_x_first == 0.0 {
        return Err(Error::DegenerateSample(
            "first-phase mean of x is zero".into(),
        ));
    }
    if aux.mean_z == 0.0 {
        return Err(Error::DegenerateSample("known mean of z is zero".into()));
    }

    Ok(SampleStatistics {
        n,
        n1,
        mean_y,
        mean_x,
        mean_z,
        mean_x_first,
        mean_z_first,
        s2_y,
        s2_x,
        s2_z,
        s_yx,
        s2_x_first,
        s2_z_first,
        aux: *aux,
        r,
        u: mean_x / mean_x_first,
        v: s2_x / s2_x_first,
        w: mean_z_first / aux.mean_z,
        a: s2_z_first / aux.var_z,
        delta: cm.delta,
        cx_hat: s2_x.sqrt() / mean_x,
        cz_hat: s2_z.sqrt() / mean_z,
    })
}
