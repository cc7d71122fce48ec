//! Exact rational-arithmetic oracle over the defining sums.
//!
//! Every sum is accumulated in `BigRational`; the only floating-point steps
//! are the final square roots needed to standardize odd powers.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use twophase_core::PopulationFrame;

pub type Q = BigRational;

pub fn q(v: f64) -> Q {
    BigRational::from_float(v).expect("finite")
}

pub fn qi(v: i64) -> Q {
    BigRational::from_integer(BigInt::from(v))
}

pub fn f(v: &Q) -> f64 {
    v.to_f64().expect("representable")
}

pub fn fixture() -> PopulationFrame {
    PopulationFrame::new(
        vec![1.0, 2.0, 3.0, 4.0, 5.0, 9.0],
        vec![2.0, 1.0, 4.0, 3.0, 8.0, 6.0],
        vec![1.0, 3.0, 2.0, 5.0, 4.0, 8.0],
    )
    .unwrap()
}

pub fn mean(v: &[Q]) -> Q {
    let s: Q = v.iter().cloned().fold(Q::zero(), |a, b| a + b);
    s / qi(v.len() as i64)
}

/// Sum of centred cross-products divided by `divisor`.
pub fn co_moment(a: &[Q], b: &[Q], divisor: i64) -> Q {
    let (ma, mb) = (mean(a), mean(b));
    let s = a
        .iter()
        .zip(b)
        .fold(Q::zero(), |acc, (x, y)| acc + (x - &ma) * (y - &mb));
    s / qi(divisor)
}

pub fn pow(v: &Q, e: u8) -> Q {
    (0..e).fold(Q::one(), |acc, _| acc * v)
}

/// Exact data columns selected by `idx`.
pub struct Columns {
    pub y: Vec<Q>,
    pub x: Vec<Q>,
    pub z: Vec<Q>,
}

impl Columns {
    pub fn of(frame: &PopulationFrame, idx: &[usize]) -> Self {
        Columns {
            y: idx.iter().map(|&i| q(frame.y()[i])).collect(),
            x: idx.iter().map(|&i| q(frame.x()[i])).collect(),
            z: idx.iter().map(|&i| q(frame.z()[i])).collect(),
        }
    }

    pub fn len(&self) -> i64 {
        self.y.len() as i64
    }

    /// `μ_pqm` with divisor equal to the number of units, exact.
    pub fn mu(&self, p: u8, qq: u8, m: u8) -> Q {
        let (my, mx, mz) = (mean(&self.y), mean(&self.x), mean(&self.z));
        let mut s = Q::zero();
        for i in 0..self.y.len() {
            s += pow(&(&self.y[i] - &my), p)
                * pow(&(&self.x[i] - &mx), qq)
                * pow(&(&self.z[i] - &mz), m);
        }
        s / qi(self.len())
    }

    /// `δ_pqm`: the exact ratio `μ² / (μ_200^p μ_020^q μ_002^m)` is formed in
    /// rationals, then one square root is taken with the sign of `μ`.
    pub fn delta(&self, p: u8, qq: u8, m: u8) -> f64 {
        let mu = self.mu(p, qq, m);
        let den =
            pow(&self.mu(2, 0, 0), p) * pow(&self.mu(0, 2, 0), qq) * pow(&self.mu(0, 0, 2), m);
        let sq = (&mu * &mu) / den;
        let mag = f(&sq).sqrt();
        if mu.is_negative() {
            -mag
        } else {
            mag
        }
    }

    /// Variance with divisor `len − 1`.
    pub fn s2(&self, col: &[Q]) -> Q {
        co_moment(col, col, self.len() - 1)
    }

    /// `S_yx / (S_y S_x)` via the exact squared ratio.
    pub fn corr_yx(&self) -> f64 {
        let syx = co_moment(&self.y, &self.x, self.len() - 1);
        let sq = (&syx * &syx) / (self.s2(&self.y) * self.s2(&self.x));
        let mag = f(&sq).sqrt();
        if syx.is_negative() {
            -mag
        } else {
            mag
        }
    }
}

pub fn assert_close(label: &str, got: f64, want: f64, rel: f64) {
    let tol = rel * want.abs().max(1e-300);
    assert!(
        (got - want).abs() <= tol,
        "{label}: got {got:e}, want {want:e} (|diff| {:e} > {tol:e})",
        (got - want).abs()
    );
}

/// One instance of every estimator variant, with constants away from zero.
pub fn every_variant() -> Vec<twophase_core::EstimatorSpec> {
    use twophase_core::{EstimatorSpec as E, TdStarForm};
    let mut v = vec![
        E::SampleR,
        E::ChainRatio,
        E::GeneralizedPower([0.7, -0.4, 1.3, -0.2]),
        E::HLinear([-0.6, 0.25]),
        E::HPower([-0.6, 0.25]),
        E::TLinear([-0.5, 0.3, -0.8, 0.1]),
        E::TPower([-0.5, 0.3, -0.8, 0.1]),
        E::DifferenceType([0.4, -0.2, 0.3, 0.05]),
    ];
    v.extend(TdStarForm::ALL.iter().map(|&f| E::TdStar(f)));
    v
}
