//! Homogeneous Littlewood-Paley partition of unity.
//!
//! The radial profile `theta` equals 1 on [0, 3/4], 0 on [4/3, inf) and is a
//! quintic smoothstep in between. The block multiplier is
//! `psi(xi) = theta(|xi|/2) - theta(|xi|)`, the low-pass `phi(xi) = theta(|xi|)`,
//! so the dyadic sums telescope: `sum_j psi(2^-j xi) = 1` away from 0.

use crate::error::{Error, Result};
use crate::field::SpectralField;

const SUPPORT_LO: f64 = 0.75;
const SUPPORT_HI: f64 = 4.0 / 3.0;

/// Truncated dyadic partition over scales `j_min..=j_max`.
#[derive(Debug, Clone)]
pub struct DyadicPartition {
    j_min: i32,
    j_max: i32,
}

impl DyadicPartition {
    pub fn j_min(&self) -> i32 {
        self.j_min
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    pub fn scales(&self) -> impl Iterator<Item = i32> {
        self.j_min..=self.j_max
    }

    /// Radial transition profile.
    pub fn theta(r: f64) -> f64 {
        if r <= SUPPORT_LO {
            1.0
        } else if r >= SUPPORT_HI {
            0.0
        } else {
            1.0 - smoothstep((r - SUPPORT_LO) / (SUPPORT_HI - SUPPORT_LO))
        }
    }

    /// Block multiplier as a function of |xi|.
    pub fn psi_radial(r: f64) -> f64 {
        Self::theta(0.5 * r) - Self::theta(r)
    }

    /// `psi(2^-j xi)`.
    pub fn psi_block(&self, j: i32, xi: [f64; 3]) -> f64 {
        Self::psi_radial(norm3(xi) * exp2i(-j))
    }

    /// Low-pass `phi(2^-j xi)`; `phi = theta(|xi|)`.
    pub fn phi_block(&self, j: i32, xi: [f64; 3]) -> f64 {
        Self::theta(norm3(xi) * exp2i(-j))
    }

    /// Sum of the retained blocks at `xi`.
    pub fn partition_sum(&self, xi: [f64; 3]) -> f64 {
        let r = norm3(xi);
        self.scales().map(|j| Self::psi_radial(r * exp2i(-j))).sum()
    }

    /// Band on which the truncated partition sums to exactly 1:
    /// `[2^j_min * 4/3, 2^j_max * 3/4]` in |xi|.
    pub fn resolved_band(&self) -> (f64, f64) {
        (exp2i(self.j_min) * SUPPORT_HI, exp2i(self.j_max) * SUPPORT_LO)
    }

    /// Scales whose annulus `[3/4 2^j, 8/3 2^j]` meets `[r_lo, r_hi]`,
    /// clamped to the partition range. One spare block on each side is
    /// included; it evaluates to zero.
    pub fn scales_meeting(&self, r_lo: f64, r_hi: f64) -> impl Iterator<Item = i32> {
        let j_lo = ((r_lo * 3.0 / 8.0).log2().floor() as i32).max(self.j_min);
        let j_hi = ((r_hi * 4.0 / 3.0).log2().ceil() as i32).min(self.j_max);
        j_lo..=j_hi.max(j_lo - 1)
    }
}

/// Builds the partition; fails unless `j_min < j_max`.
pub fn make_partition(j_min: i32, j_max: i32) -> Result<DyadicPartition> {
    if j_min >= j_max {
        return Err(Error::InvalidRange { j_min, j_max });
    }
    Ok(DyadicPartition { j_min, j_max })
}

/// Frequency localization: multiplies every stored sample by `psi(2^-j xi)`.
pub fn apply_block(f: &SpectralField, j: i32, part: &DyadicPartition) -> Result<SpectralField> {
    if j < part.j_min() || j > part.j_max() {
        return Err(Error::InvalidScale {
            j,
            j_min: part.j_min(),
            j_max: part.j_max(),
        });
    }
    let mut out = f.clone();
    let scale = exp2i(-j);
    for (idx, xi) in f.frequencies().enumerate() {
        let m = DyadicPartition::psi_radial(norm3(xi) * scale);
        for c in 0..6 {
            out.values[idx][c] = f.values[idx][c] * m;
        }
    }
    Ok(out)
}

fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * t * (t * (6.0 * t - 15.0) + 10.0)
}

pub fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Exact power of two as f64 (handles negative exponents).
pub fn exp2i(j: i32) -> f64 {
    (j as f64).exp2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sample_xi(rng: &mut ChaCha8Rng, r_lo: f64, r_hi: f64) -> [f64; 3] {
        // log-uniform radius, uniform direction
        let r = r_lo * (r_hi / r_lo).powf(rng.random::<f64>());
        let z: f64 = rng.random_range(-1.0..1.0);
        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let s = (1.0 - z * z).sqrt();
        [r * s * phi.cos(), r * s * phi.sin(), r * z]
    }

    #[test]
    fn rejects_inverted_range() {
        assert!(matches!(
            make_partition(3, 3),
            Err(Error::InvalidRange { .. })
        ));
    }

    #[test]
    fn telescoping_sum_is_one_at_unit_radius() {
        let part = make_partition(-4, 10).unwrap();
        let s = part.partition_sum([1.0, 0.0, 0.0]);
        assert!((s - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn partition_of_unity_on_resolved_band() {
        let part = make_partition(-6, 12).unwrap();
        let (lo, hi) = part.resolved_band();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut worst = 0.0f64;
        for _ in 0..100_000 {
            let xi = sample_xi(&mut rng, lo, hi);
            worst = worst.max((part.partition_sum(xi) - 1.0).abs());
        }
        assert!(worst <= 1e-10, "residual {worst:.3e}");
    }

    #[test]
    fn psi_vanishes_outside_annulus() {
        // |xi| = 2^5 * 3 sits outside [3/4 2^5, 8/3 2^5].
        let part = make_partition(-2, 8).unwrap();
        let xi = [0.0, 2.0f64.powi(5) * 3.0, 0.0];
        assert_eq!(part.psi_block(5, xi), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let xi = sample_xi(&mut rng, 1e-2, 1e3);
            let r = norm3(xi);
            for j in part.scales() {
                if part.psi_block(j, xi) != 0.0 {
                    assert!(r >= 0.75 * exp2i(j) && r <= 8.0 / 3.0 * exp2i(j));
                }
            }
        }
    }

    #[test]
    fn blocks_two_apart_are_disjoint() {
        let part = make_partition(-3, 9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let xi = sample_xi(&mut rng, 1e-3, 1e4);
            // j = 0 versus j = 3 per the spec example, plus a generic pair.
            assert_eq!(part.psi_block(0, xi) * part.psi_block(3, xi), 0.0);
            for j in part.scales() {
                for k in part.scales() {
                    if (j - k).abs() >= 2 {
                        assert_eq!(part.psi_block(j, xi) * part.psi_block(k, xi), 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn low_pass_plus_high_blocks_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let xi = sample_xi(&mut rng, 1e-2, 1e4);
            let r = norm3(xi);
            let s: f64 = (0..=44)
                .map(|j| DyadicPartition::psi_radial(r * exp2i(-j)))
                .sum::<f64>()
                + DyadicPartition::theta(r);
            assert!((s - 1.0).abs() <= 1e-10, "xi with |xi| = {r}");
        }
    }

    #[test]
    fn profile_is_monotone_and_clamped() {
        assert_eq!(DyadicPartition::theta(0.0), 1.0);
        assert_eq!(DyadicPartition::theta(0.75), 1.0);
        assert_eq!(DyadicPartition::theta(4.0 / 3.0), 0.0);
        let mut prev = 1.0;
        for i in 0..=1000 {
            let r = 0.7 + i as f64 * (1.4 - 0.7) / 1000.0;
            let v = DyadicPartition::theta(r);
            assert!(v <= prev + 1e-15);
            assert!((0.0..=1.0).contains(&v));
            prev = v;
        }
    }
}
