//! Shared fringe arithmetic for the interferometric protocols.
//!
//! Every protocol here reads one scalar signal with mean `cos(theta(phi))`,
//! where `theta = multiplier * phi * gap + offset`. The model owns the
//! operating-point policy: `MaxSlope` inserts a known offset so the run sits
//! at quadrature (maximal slope, phase-independent propagated error);
//! `AtTrueValue` runs with no offset and fails when the slope vanishes.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Where the interferometer operates relative to the unknown phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize, Default)]
pub enum OperatingPointPolicy {
    /// Evaluate at the bare true phase; error out when degenerate.
    AtTrueValue,
    /// Offset the fringe by a known phase so the working point is quadrature.
    #[default]
    MaxSlope,
}

/// Slope threshold below which the inversion is refused.
pub const DEGENERATE_SLOPE: f64 = 1e-6;

#[derive(Debug, Clone, Copy)]
pub struct FringeModel<T> {
    multiplier: T,
    gap: T,
    offset: T,
    branch: i64,
}

impl<T: Scalar> FringeModel<T> {
    /// Build the model for a protocol accumulating `multiplier` phase factors
    /// per repetition, anchored at `phi_true` under `policy`.
    pub fn new(multiplier: u64, gap: T, phi_true: T, policy: OperatingPointPolicy) -> Self {
        let multiplier = T::of(multiplier as f64);
        match policy {
            OperatingPointPolicy::MaxSlope => Self {
                multiplier,
                gap,
                offset: T::FRAC_PI_2() - multiplier * phi_true * gap,
                branch: 0,
            },
            OperatingPointPolicy::AtTrueValue => {
                let theta = multiplier * phi_true * gap;
                let branch = (theta / T::PI()).floor().to_f64().unwrap_or(0.0) as i64;
                Self {
                    multiplier,
                    gap,
                    offset: T::zero(),
                    branch,
                }
            }
        }
    }

    /// Known phase offset in signal units (`theta = M phi gap + offset`).
    pub fn offset(&self) -> T {
        self.offset
    }

    /// Offset expressed as an evolution phase, `exp(-i (offset/gap) H)`.
    pub fn offset_phi(&self) -> T {
        self.offset / self.gap
    }

    pub fn theta(&self, phi: T) -> T {
        self.multiplier * phi * self.gap + self.offset
    }

    /// Mean signal `cos(theta)`.
    pub fn signal(&self, phi: T) -> T {
        self.theta(phi).cos()
    }

    /// `d signal / d phi`.
    pub fn slope(&self, phi: T) -> T {
        -self.multiplier * self.gap * self.theta(phi).sin()
    }

    /// Reject degenerate operating points (probability slope below the
    /// threshold); returns the signal slope otherwise.
    pub fn checked_slope(&self, phi_true: T) -> Result<T> {
        let slope = self.slope(phi_true);
        let p_slope = slope.abs() / T::of(2.0);
        if p_slope < T::of(DEGENERATE_SLOPE) {
            return Err(Error::DegenerateOperatingPoint {
                slope: p_slope.to_f64().unwrap_or(0.0),
                threshold: DEGENERATE_SLOPE,
            });
        }
        Ok(slope)
    }

    /// Invert a measured mean signal back to a phase on the branch the model
    /// was anchored to. Values outside `[-1, 1]` are clipped to the boundary;
    /// the flag reports whether clipping happened.
    pub fn invert(&self, mean_signal: T) -> (T, bool) {
        let clipped = mean_signal.abs() > T::one();
        let s = mean_signal.min(T::one()).max(-T::one());
        let parity_flip = self.branch.rem_euclid(2) == 1;
        let branch_signal = if parity_flip { -s } else { s };
        let t = branch_signal.acos();
        let theta = T::of(self.branch as f64) * T::PI() + t;
        let phi = (theta - self.offset) / (self.multiplier * self.gap);
        (phi, clipped)
    }
}
