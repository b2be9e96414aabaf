//! Elementary two-user channels in the deterministic and Gaussian models.
//!
//! Rates are in bits per complex symbol and all logarithms are base 2. Region
//! predicates use non-strict inequalities with a slack of [`RATE_TOL`] bits.

use crate::{Error, Result};

/// Slack applied to every rate inequality.
pub const RATE_TOL: f64 = 1e-12;

/// `log2(1 + x)`, accurate for small `x`.
pub fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / std::f64::consts::LN_2
}

/// A signal-to-noise ratio, kept in both dB and linear form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrDb {
    db: f64,
    linear: f64,
}

impl SnrDb {
    pub fn from_db(db: f64) -> Result<Self> {
        let linear = 10f64.powf(db / 10.0);
        if !db.is_finite() || !(linear > 0.0 && linear.is_finite()) {
            return Err(Error::Domain(format!(
                "SNR of {db} dB is not representable"
            )));
        }
        Ok(Self { db, linear })
    }

    pub fn from_linear(linear: f64) -> Result<Self> {
        if !(linear > 0.0 && linear.is_finite()) {
            return Err(Error::Domain(format!(
                "linear SNR {linear} must be positive and finite"
            )));
        }
        Ok(Self {
            db: 10.0 * linear.log10(),
            linear,
        })
    }

    pub fn db(self) -> f64 {
        self.db
    }

    pub fn linear(self) -> f64 {
        self.linear
    }
}

/// A nonnegative rate pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub r1: f64,
    pub r2: f64,
}

impl RatePoint {
    pub fn new(r1: f64, r2: f64) -> Result<Self> {
        if !(r1 >= 0.0 && r2 >= 0.0 && r1.is_finite() && r2.is_finite()) {
            return Err(Error::Domain(format!(
                "rates ({r1}, {r2}) must be finite and nonnegative"
            )));
        }
        Ok(Self { r1, r2 })
    }

    /// `((r1 - 1)^+, (r2 - 1)^+)`.
    pub fn minus_one_bit(self) -> Self {
        Self {
            r1: (self.r1 - 1.0).max(0.0),
            r2: (self.r2 - 1.0).max(0.0),
        }
    }
}

/// Number of signal levels above the noise: `max(0, ceil(log2 SNR))`.
pub fn det_level_count(snr: SnrDb) -> u32 {
    let l = snr.linear().log2();
    let r = l.round();
    // exact powers of two must not be pushed up by rounding in log2
    let c = if (l - r).abs() < 1e-12 { r } else { l.ceil() };
    c.max(0.0) as u32
}

pub fn awgn_capacity(snr: SnrDb) -> f64 {
    log2_1p(snr.linear())
}

fn check_order(n1: u32, n2: u32) -> Result<()> {
    if n2 > n1 {
        return Err(Error::Domain(format!(
            "n2 = {n2} exceeds n1 = {n1}; label the stronger user as user 1"
        )));
    }
    Ok(())
}

/// Deterministic MAC: `R2 <= n2`, `R1 + R2 <= n1`, with `n2 <= n1`.
pub fn det_mac_region_contains(n1: u32, n2: u32, p: RatePoint) -> Result<bool> {
    check_order(n1, n2)?;
    Ok(p.r2 <= n2 as f64 + RATE_TOL && p.r1 + p.r2 <= n1 as f64 + RATE_TOL)
}

/// Deterministic BC with the weak user on the top `n2` levels.
///
/// The weak user can only be served on levels both receivers see, while the
/// strong user takes whatever remains of its `n1` levels, so the region is
/// `R2 <= n2`, `R1 + R2 <= n1`.
pub fn det_bc_region_contains(n1: u32, n2: u32, p: RatePoint) -> Result<bool> {
    check_order(n1, n2)?;
    Ok(p.r2 <= n2 as f64 + RATE_TOL && p.r1 + p.r2 <= n1 as f64 + RATE_TOL)
}

pub fn gauss_mac_region_contains(snr1: SnrDb, snr2: SnrDb, p: RatePoint) -> bool {
    let (s1, s2) = (snr1.linear(), snr2.linear());
    p.r1 <= log2_1p(s1) + RATE_TOL
        && p.r2 <= log2_1p(s2) + RATE_TOL
        && p.r1 + p.r2 <= log2_1p(s1 + s2) + RATE_TOL
}

/// Weak-user rate of the degraded BC when a fraction `alpha` of the power
/// goes to the strong user's layer.
pub fn bc_weak_rate(s2: f64, alpha: f64) -> f64 {
    log2_1p((1.0 - alpha) * s2 / (alpha * s2 + 1.0))
}

/// Largest power fraction for the strong user that still leaves the weak
/// user rate `r2`, or `None` if `r2` exceeds `log2(1 + s2)`.
pub fn bc_max_alpha(s2: f64, r2: f64) -> Option<f64> {
    if r2 <= 0.0 {
        return Some(1.0);
    }
    // (1 - a) s2 / (a s2 + 1) >= 2^r2 - 1  <=>  a <= (1 + s2 - 2^r2) / (2^r2 s2)
    let t = r2.exp2();
    if s2 <= 0.0 || 1.0 + s2 < t {
        return None;
    }
    Some(((1.0 + s2 - t) / (t * s2)).clamp(0.0, 1.0))
}

/// Degraded Gaussian BC, `snr2 <= snr1`.
pub fn gauss_bc_region_contains(snr1: SnrDb, snr2: SnrDb, p: RatePoint) -> Result<bool> {
    let (s1, s2) = (snr1.linear(), snr2.linear());
    if s2 > s1 {
        return Err(Error::Domain(format!(
            "SNR2 = {s2} exceeds SNR1 = {s1}; label the stronger user as user 1"
        )));
    }
    // the weak-user bound shrinks as alpha grows, so take the largest alpha it allows
    let r2 = (p.r2 - RATE_TOL).max(0.0);
    Ok(match bc_max_alpha(s2, r2) {
        Some(alpha) => p.r1 <= log2_1p(alpha * s1) + RATE_TOL,
        None => false,
    })
}

/// Whether the point one bit below `det_point` in each coordinate lies in the
/// Gaussian region.
pub fn within_one_bit_check(
    det_point: RatePoint,
    gaussian_region: impl Fn(RatePoint) -> bool,
) -> bool {
    gaussian_region(det_point.minus_one_bit())
}

/// Corner points of the deterministic MAC/BC region other than the origin.
pub fn det_region_corners(n1: u32, n2: u32) -> Result<Vec<RatePoint>> {
    check_order(n1, n2)?;
    let (n1, n2) = (n1 as f64, n2 as f64);
    Ok(vec![
        RatePoint { r1: 0.0, r2: n2 },
        RatePoint {
            r1: n1 - n2,
            r2: n2,
        },
        RatePoint { r1: n1, r2: 0.0 },
    ])
}

/// `count` points along the Gaussian MAC pentagon boundary, evenly spaced
/// by arc length from `(0, C2)` to `(C1, 0)`.
pub fn gauss_mac_boundary(snr1: SnrDb, snr2: SnrDb, count: usize) -> Vec<RatePoint> {
    let (s1, s2) = (snr1.linear(), snr2.linear());
    let (c1, c2, cs) = (log2_1p(s1), log2_1p(s2), log2_1p(s1 + s2));
    let verts: [(f64, f64); 4] = [(0.0, c2), (cs - c2, c2), (c1, cs - c1), (c1, 0.0)];
    let seg_len: Vec<f64> = verts
        .windows(2)
        .map(|w| (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1))
        .collect();
    let total: f64 = seg_len.iter().sum();
    (0..count)
        .map(|i| {
            let mut s = if count > 1 {
                total * i as f64 / (count - 1) as f64
            } else {
                0.0
            };
            for (k, &len) in seg_len.iter().enumerate() {
                if s <= len || k == seg_len.len() - 1 {
                    let t = if len > 0.0 { (s / len).min(1.0) } else { 0.0 };
                    let (a, b) = (verts[k], verts[k + 1]);
                    return RatePoint {
                        r1: a.0 + t * (b.0 - a.0),
                        r2: a.1 + t * (b.1 - a.1),
                    };
                }
                s -= len;
            }
            unreachable!()
        })
        .collect()
}

/// `count` boundary points of the degraded Gaussian BC at evenly spaced
/// power splits `alpha = i / (count - 1)`.
pub fn gauss_bc_boundary(snr1: SnrDb, snr2: SnrDb, count: usize) -> Vec<(f64, RatePoint)> {
    let (s1, s2) = (snr1.linear(), snr2.linear());
    (0..count)
        .map(|i| {
            let alpha = if count > 1 {
                i as f64 / (count - 1) as f64
            } else {
                1.0
            };
            (
                alpha,
                RatePoint {
                    r1: log2_1p(alpha * s1),
                    r2: bc_weak_rate(s2, alpha),
                },
            )
        })
        .collect()
}
