//! Gaussian relay and diamond networks: relaying rates against cut-set bounds.
//!
//! Transmit and noise powers are normalized to one, so the SNR of a link is
//! the squared channel magnitude. Channel structs store magnitudes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channels::{bc_weak_rate, log2_1p, RatePoint, RATE_TOL};
use crate::par::{map_range, Exec};
use crate::{Error, Result};

/// Tolerance on every gap and sandwich inequality.
pub const GAP_TOL: f64 = 1e-9;

fn magnitude_from_db(db: f64) -> Result<f64> {
    let m = 10f64.powf(db / 20.0);
    if !m.is_finite() {
        return Err(Error::Domain(format!(
            "gain of {db} dB is not representable"
        )));
    }
    Ok(m)
}

fn check_magnitudes(values: &[f64]) -> Result<()> {
    if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::Domain(format!(
            "channel magnitude {v} must be finite and nonnegative"
        )));
    }
    Ok(())
}

/// Outcome of comparing an achievable rate with an upper bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapReport {
    pub achievable: f64,
    pub upper_bound: f64,
    pub gap: f64,
    /// The optimizing correlation (relay) or power split (diamond).
    pub argmax: Option<f64>,
    /// Whether the diamond relays were relabeled.
    pub swapped: bool,
}

impl GapReport {
    fn new(achievable: f64, upper_bound: f64, argmax: Option<f64>, swapped: bool) -> Self {
        Self {
            achievable,
            upper_bound,
            gap: upper_bound - achievable,
            argmax,
            swapped,
        }
    }
}

// ---------------------------------------------------------------------------
// Relay channel

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianRelay {
    pub h_sd: f64,
    pub h_sr: f64,
    pub h_rd: f64,
}

impl GaussianRelay {
    pub fn new(h_sd: f64, h_sr: f64, h_rd: f64) -> Result<Self> {
        check_magnitudes(&[h_sd, h_sr, h_rd])?;
        Ok(Self { h_sd, h_sr, h_rd })
    }

    /// From link SNRs `|h|^2` in dB.
    pub fn from_db(sd_db: f64, sr_db: f64, rd_db: f64) -> Result<Self> {
        Self::new(
            magnitude_from_db(sd_db)?,
            magnitude_from_db(sr_db)?,
            magnitude_from_db(rd_db)?,
        )
    }

    /// From link SNRs `|h|^2` as linear powers.
    pub fn from_powers(sd: f64, sr: f64, rd: f64) -> Result<Self> {
        check_magnitudes(&[sd, sr, rd])?;
        Self::new(sd.sqrt(), sr.sqrt(), rd.sqrt())
    }

    /// The two cut-set terms at correlation `rho`: the broadcast cut around
    /// the source and the multiple-access cut into the destination.
    pub fn cutset_terms(&self, rho: f64) -> (f64, f64) {
        let (a, b, c) = (self.h_sd.powi(2), self.h_sr.powi(2), self.h_rd.powi(2));
        (
            log2_1p((1.0 - rho * rho) * (a + b)),
            log2_1p(a + c + 2.0 * rho * self.h_sd * self.h_rd),
        )
    }
}

/// `n_sd + min((n_sr - n_sd)^+, (n_rd - n_sd)^+)`.
pub fn det_relay_capacity(n_sr: u32, n_sd: u32, n_rd: u32) -> u32 {
    n_sd + n_sr.saturating_sub(n_sd).min(n_rd.saturating_sub(n_sd))
}

/// Best of direct transmission and block-Markov decode-forward.
pub fn relay_df_rate(ch: &GaussianRelay) -> f64 {
    let (a, b, c) = (ch.h_sd.powi(2), ch.h_sr.powi(2), ch.h_rd.powi(2));
    let direct = log2_1p(a);
    let df = log2_1p(b).min(log2_1p(a + c));
    direct.max(df)
}

/// Cut-set bound and the maximizing correlation.
///
/// On `[0, 1]` the broadcast term falls and the multiple-access term rises, so
/// the max-min sits at their crossing, found by bisection; negative
/// correlations only shrink the second term.
pub fn relay_cutset_bound(ch: &GaussianRelay) -> (f64, f64) {
    let (a, b, c) = (ch.h_sd.powi(2), ch.h_sr.powi(2), ch.h_rd.powi(2));
    let first = |rho: f64| (1.0 - rho * rho) * (a + b);
    let second = |rho: f64| a + c + 2.0 * rho * ch.h_sd * ch.h_rd;
    let value = |rho: f64| {
        let (f1, f2) = ch.cutset_terms(rho);
        f1.min(f2)
    };
    // a flat second term makes rho = 0 optimal as well
    if first(0.0) <= second(0.0) || ch.h_sd * ch.h_rd == 0.0 {
        return (value(0.0), 0.0);
    }
    // first(1) = 0 <= second(1), so a crossing exists in (0, 1]
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if first(mid) > second(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (vlo, vhi) = (value(lo), value(hi));
    if vlo >= vhi {
        (vlo, lo)
    } else {
        (vhi, hi)
    }
}

pub fn relay_gap(ch: &GaussianRelay) -> GapReport {
    let (bound, rho) = relay_cutset_bound(ch);
    GapReport::new(relay_df_rate(ch), bound, Some(rho), false)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub sr_db: f64,
    pub rd_db: f64,
    pub gap: f64,
}

/// Points `lo, lo + step, ...` up to `hi` (inclusive, with rounding slack).
pub fn db_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && step.is_finite()) {
        return Err(Error::Domain("grid bounds and step must be finite".into()));
    }
    if step <= 0.0 {
        return Err(Error::Domain(format!("step {step} must be positive")));
    }
    if lo > hi {
        return Err(Error::Domain(format!(
            "lower bound {lo} exceeds upper bound {hi}"
        )));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| lo + i as f64 * step).collect())
}

/// Relay gap over a square grid of source-relay and relay-destination gains,
/// both given in dB relative to the direct link at `sd_db`. Rows are ordered
/// with the source-relay gain as the outer index.
pub fn relay_gap_sweep(sd_db: f64, lo_db: f64, hi_db: f64, step_db: f64) -> Result<Vec<SweepRow>> {
    relay_gap_sweep_with(Exec::default(), sd_db, lo_db, hi_db, step_db)
}

pub fn relay_gap_sweep_with(
    exec: Exec,
    sd_db: f64,
    lo_db: f64,
    hi_db: f64,
    step_db: f64,
) -> Result<Vec<SweepRow>> {
    let grid = db_grid(lo_db, hi_db, step_db)?;
    // validate the extreme corners once so rows cannot fail
    GaussianRelay::from_db(sd_db, sd_db + hi_db, sd_db + hi_db)?;
    let n = grid.len();
    Ok(map_range(exec, n * n, |i| {
        let (sr_db, rd_db) = (grid[i / n], grid[i % n]);
        let ch =
            GaussianRelay::from_db(sd_db, sd_db + sr_db, sd_db + rd_db).expect("validated grid");
        SweepRow {
            sr_db,
            rd_db,
            gap: relay_gap(&ch).gap,
        }
    }))
}

// ---------------------------------------------------------------------------
// Diamond network

/// Diamond channel with relays labeled so that `h_sa1 >= h_sa2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianDiamond {
    pub h_sa1: f64,
    pub h_sa2: f64,
    pub h_a1d: f64,
    pub h_a2d: f64,
    /// True when the caller's relays were swapped to meet the labeling.
    pub swapped: bool,
}

impl GaussianDiamond {
    pub fn new(h_sa1: f64, h_sa2: f64, h_a1d: f64, h_a2d: f64) -> Result<Self> {
        check_magnitudes(&[h_sa1, h_sa2, h_a1d, h_a2d])?;
        Ok(if h_sa1 >= h_sa2 {
            Self {
                h_sa1,
                h_sa2,
                h_a1d,
                h_a2d,
                swapped: false,
            }
        } else {
            Self {
                h_sa1: h_sa2,
                h_sa2: h_sa1,
                h_a1d: h_a2d,
                h_a2d: h_a1d,
                swapped: true,
            }
        })
    }

    /// From `[sa1, sa2, a1d, a2d]` link SNRs in dB.
    pub fn from_db(db: [f64; 4]) -> Result<Self> {
        Self::new(
            magnitude_from_db(db[0])?,
            magnitude_from_db(db[1])?,
            magnitude_from_db(db[2])?,
            magnitude_from_db(db[3])?,
        )
    }

    pub fn from_powers(p: [f64; 4]) -> Result<Self> {
        check_magnitudes(&p)?;
        Self::new(p[0].sqrt(), p[1].sqrt(), p[2].sqrt(), p[3].sqrt())
    }

    fn caps(&self) -> Caps {
        let (s1, s2) = (self.h_sa1.powi(2), self.h_sa2.powi(2));
        let (m1, m2) = (self.h_a1d.powi(2), self.h_a2d.powi(2));
        Caps {
            s1,
            s2,
            bc1: log2_1p(s1),
            bc2: log2_1p(s2),
            mac1: log2_1p(m1),
            mac2: log2_1p(m2),
            mac_sum: log2_1p(m1 + m2),
        }
    }
}

struct Caps {
    s1: f64,
    s2: f64,
    bc1: f64,
    bc2: f64,
    mac1: f64,
    mac2: f64,
    mac_sum: f64,
}

/// `min{max(n_sa1, n_sa2), max(n_a1d, n_a2d), n_sa1 + n_a2d, n_sa2 + n_a1d}`.
pub fn det_diamond_capacity(n_sa1: u32, n_sa2: u32, n_a1d: u32, n_a2d: u32) -> u32 {
    [
        n_sa1.max(n_sa2),
        n_a1d.max(n_a2d),
        n_sa1 + n_a2d,
        n_sa2 + n_a1d,
    ]
    .into_iter()
    .min()
    .expect("four terms")
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!("power split {alpha} outside [0, 1]")));
    }
    Ok(())
}

/// Membership in the broadcast/multiple-access intersection at power split
/// `alpha`.
pub fn diamond_region_contains(ch: &GaussianDiamond, alpha: f64, p: RatePoint) -> Result<bool> {
    check_alpha(alpha)?;
    let c = ch.caps();
    Ok(p.r1 <= log2_1p(alpha * c.s1) + RATE_TOL
        && p.r2 <= bc_weak_rate(c.s2, alpha) + RATE_TOL
        && p.r1 <= c.mac1 + RATE_TOL
        && p.r2 <= c.mac2 + RATE_TOL
        && p.r1 + p.r2 <= c.mac_sum + RATE_TOL)
}

/// Largest `R1 + R2` in the region at a fixed power split.
pub fn pdf_sum_at(ch: &GaussianDiamond, alpha: f64) -> f64 {
    let c = ch.caps();
    pdf_sum(&c, alpha)
}

fn pdf_sum(c: &Caps, alpha: f64) -> f64 {
    let r1 = log2_1p(alpha * c.s1).min(c.mac1);
    let r2 = bc_weak_rate(c.s2, alpha).min(c.mac2);
    (r1 + r2).min(c.mac_sum)
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Partial decode-forward sum rate and its power split.
///
/// A 10^-3 grid over the split picks a bracket, golden-section search refines
/// it, and the split at which the strong relay's broadcast rate meets its
/// multiple-access cap is also evaluated: the objective rises up to that
/// split and falls after it.
pub fn diamond_pdf_rate(ch: &GaussianDiamond) -> (f64, f64) {
    let c = ch.caps();
    let f = |a: f64| pdf_sum(&c, a);
    const STEPS: usize = 1000;
    let (best_i, _) = (0..=STEPS).map(|i| (i, f(i as f64 / STEPS as f64))).fold(
        (0, f64::NEG_INFINITY),
        |acc, (i, v)| if v > acc.1 { (i, v) } else { acc },
    );
    let lo = best_i.saturating_sub(1) as f64 / STEPS as f64;
    let hi = (best_i + 1).min(STEPS) as f64 / STEPS as f64;

    let mut candidates = vec![(
        best_i as f64 / STEPS as f64,
        f(best_i as f64 / STEPS as f64),
    )];
    candidates.push(golden_max(f, lo, hi, 1e-12));
    if c.s1 > 0.0 {
        let knee = ((c.mac1.exp2() - 1.0) / c.s1).clamp(0.0, 1.0);
        candidates.push((knee, f(knee)));
    }
    let (alpha, rate) = candidates
        .into_iter()
        .fold((0.0, f64::NEG_INFINITY), |acc, (a, v)| {
            if v > acc.1 {
                (a, v)
            } else {
                acc
            }
        });
    (rate, alpha)
}

/// Maximum sum rate over the relaxed region where the broadcast hop is
/// replaced by `R2 <= log(1 + |h_sa2|^2)` and `R1 + R2 <= log(1 + |h_sa1|^2)`.
pub fn diamond_rstar(ch: &GaussianDiamond) -> f64 {
    let c = ch.caps();
    // R1 <= mac1 and R2 <= min(bc2, mac2) bound the sum by their total,
    // the other two constraints bound it directly
    c.bc1.min(c.mac_sum).min(c.mac1 + c.bc2.min(c.mac2))
}

/// Power split at which the weak relay's broadcast rate equals `r2_star - 1`.
pub fn diamond_alpha_star(ch: &GaussianDiamond, r2_star: f64) -> Result<f64> {
    let s2 = ch.h_sa2.powi(2);
    let top = log2_1p(s2);
    if r2_star.is_nan() || r2_star < 1.0 {
        return Err(Error::Domain(format!("r2* = {r2_star} must be at least 1")));
    }
    if r2_star > top + RATE_TOL {
        return Err(Error::Domain(format!(
            "r2* = {r2_star} exceeds log(1 + |h_sa2|^2) = {top}"
        )));
    }
    let t = (r2_star - 1.0).exp2();
    Ok(((1.0 + s2 - t) / (t * s2)).clamp(0.0, 1.0))
}

/// Four-term upper bound on the diamond cut-set bound.
pub fn diamond_cutset_bound(ch: &GaussianDiamond) -> f64 {
    let c = ch.caps();
    [
        log2_1p(c.s1 + c.s2),
        log2_1p((ch.h_a1d + ch.h_a2d).powi(2)),
        c.bc1 + c.mac2,
        c.bc2 + c.mac1,
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiamondGap {
    /// achievable = partial decode-forward rate, upper_bound = cut-set bound,
    /// argmax = power split.
    pub report: GapReport,
    pub r_star: f64,
}

impl DiamondGap {
    pub fn r_pdf(&self) -> f64 {
        self.report.achievable
    }

    pub fn c_bar(&self) -> f64 {
        self.report.upper_bound
    }

    /// The three inequalities `0 <= R* - R_pdf <= 1`, `R* >= C - 1` and
    /// `0 <= C - R_pdf <= 2`, each within [`GAP_TOL`].
    pub fn sandwich_holds(&self) -> bool {
        let relax = self.r_star - self.r_pdf();
        (-GAP_TOL..=1.0 + GAP_TOL).contains(&relax)
            && self.r_star >= self.c_bar() - 1.0 - GAP_TOL
            && self.report.gap >= -GAP_TOL
            && self.report.gap <= 2.0 + GAP_TOL
    }
}

pub fn diamond_gap(ch: &GaussianDiamond) -> DiamondGap {
    let (rate, alpha) = diamond_pdf_rate(ch);
    DiamondGap {
        report: GapReport::new(rate, diamond_cutset_bound(ch), Some(alpha), ch.swapped),
        r_star: diamond_rstar(ch),
    }
}

/// `count` diamond gain tuples in dB, uniform on `[lo_db, hi_db]` per link
/// (log-uniform in power), from ChaCha8 seeded with `seed`.
pub fn random_diamond_db(count: usize, seed: u64, lo_db: f64, hi_db: f64) -> Vec<[f64; 4]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| std::array::from_fn(|_| rng.random_range(lo_db..=hi_db)))
        .collect()
}

pub fn diamond_gap_batch(exec: Exec, gains_db: &[[f64; 4]]) -> Result<Vec<DiamondGap>> {
    let channels = gains_db
        .iter()
        .map(|&g| GaussianDiamond::from_db(g))
        .collect::<Result<Vec<_>>>()?;
    Ok(map_range(exec, channels.len(), |i| {
        diamond_gap(&channels[i])
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn relay(a: f64, b: f64, c: f64) -> GaussianRelay {
        GaussianRelay::from_powers(a, b, c).unwrap()
    }

    fn diamond(p: [f64; 4]) -> GaussianDiamond {
        GaussianDiamond::from_powers(p).unwrap()
    }

    fn rho_grid_oracle(ch: &GaussianRelay) -> f64 {
        (0..=2_000_000)
            .map(|i| {
                let (f1, f2) = ch.cutset_terms(-1.0 + i as f64 * 1e-6);
                f1.min(f2)
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn alpha_grid_oracle(ch: &GaussianDiamond) -> f64 {
        (0..=1_000_000)
            .map(|i| pdf_sum_at(ch, i as f64 * 1e-6))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// R* by enumerating the vertices of the relaxed polytope.
    fn rstar_vertex_oracle(ch: &GaussianDiamond) -> f64 {
        let (s1, s2) = (ch.h_sa1.powi(2), ch.h_sa2.powi(2));
        let (m1, m2) = (ch.h_a1d.powi(2), ch.h_a2d.powi(2));
        // a1 r1 + a2 r2 <= b
        let cons: [(f64, f64, f64); 7] = [
            (0.0, 1.0, log2_1p(s2)),
            (1.0, 1.0, log2_1p(s1)),
            (1.0, 0.0, log2_1p(m1)),
            (0.0, 1.0, log2_1p(m2)),
            (1.0, 1.0, log2_1p(m1 + m2)),
            (-1.0, 0.0, 0.0),
            (0.0, -1.0, 0.0),
        ];
        let mut best: f64 = 0.0;
        for i in 0..cons.len() {
            for j in i + 1..cons.len() {
                let (a, b, e) = cons[i];
                let (c, d, f) = cons[j];
                let det = a * d - b * c;
                if det.abs() < 1e-12 {
                    continue;
                }
                let r1 = (e * d - b * f) / det;
                let r2 = (a * f - e * c) / det;
                if cons.iter().all(|&(x, y, z)| x * r1 + y * r2 <= z + 1e-9) {
                    best = best.max(r1 + r2);
                }
            }
        }
        best
    }

    #[test]
    fn det_relay_examples() {
        assert_eq!(det_relay_capacity(3, 1, 2), 2);
        assert_eq!(det_relay_capacity(0, 4, 0), 4);
        assert_eq!(det_relay_capacity(5, 0, 5), 5);
    }

    #[test]
    fn df_examples() {
        assert_eq!(
            relay_df_rate(&GaussianRelay::new(1.0, 0.0, 0.0).unwrap()),
            1.0
        );
        assert!((relay_df_rate(&relay(1.0, 15.0, 15.0)) - 4.0).abs() < 1e-12);
        // direct link wins when the relay is weaker than it
        assert!((relay_df_rate(&relay(3.0, 1.0, 100.0)) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cutset_examples() {
        let ch = relay(3.0, 12.0, 0.0);
        let (bound, rho) = relay_cutset_bound(&ch);
        assert_eq!(rho, 0.0);
        assert!((bound - 2.0).abs() < 1e-12);

        let ch = relay(0.0, 7.0, 30.0);
        let (bound, rho) = relay_cutset_bound(&ch);
        assert_eq!(rho, 0.0);
        assert!((bound - 3.0).abs() < 1e-12);

        let ch = relay(1.0, 15.0, 15.0);
        let (bound, rho) = relay_cutset_bound(&ch);
        // 1e-6 rho grid
        assert!((bound - 4.087_462_841).abs() < 1e-6, "{bound}");
        assert!((bound - rho_grid_oracle(&ch)).abs() < 1e-6);
        // both terms equal log2(17) at rho = 0
        assert_eq!(rho, 0.0);
        assert!(bound >= relay_df_rate(&ch));

        let ch = relay(4.0, 30.0, 9.0);
        let (bound, rho) = relay_cutset_bound(&ch);
        assert!(rho > 0.0 && rho < 1.0);
        assert!((bound - rho_grid_oracle(&ch)).abs() < 1e-6);
    }

    #[test]
    fn relay_gap_examples() {
        assert_eq!(relay_gap(&relay(0.0, 0.0, 0.0)).gap, 0.0);
        let g = relay_gap(&relay(1.0, 15.0, 15.0));
        assert!((g.gap - 0.087_462_841).abs() < 1e-6);
        // all three gains equal at 40 dB
        let g = relay_gap(&relay(1e4, 1e4, 1e4));
        assert!((g.gap - 0.999_927_871).abs() < 1e-6, "{}", g.gap);
        let off = relay_gap(&relay(1e4, 2e4, 1e4));
        assert!((off.gap - 0.415_019_106).abs() < 1e-6, "{}", off.gap);
    }

    #[test]
    fn sweep_shapes() {
        let rows = relay_gap_sweep(0.0, 5.0, 5.0, 1.0).unwrap();
        assert_eq!(rows.len(), 1);
        let ch = GaussianRelay::from_db(0.0, 5.0, 5.0).unwrap();
        assert_eq!(rows[0].gap, relay_gap(&ch).gap);

        let rows = relay_gap_sweep(0.0, 0.0, 2.0, 1.0).unwrap();
        let order: Vec<(f64, f64)> = rows.iter().map(|r| (r.sr_db, r.rd_db)).collect();
        assert_eq!(order[..4], [(0.0, 0.0), (0.0, 1.0), (0.0, 2.0), (1.0, 0.0)]);

        assert!(relay_gap_sweep(0.0, 0.0, 1.0, 0.0).is_err());
        assert!(relay_gap_sweep(0.0, 2.0, 1.0, 1.0).is_err());
        assert_eq!(db_grid(-20.0, 60.0, 1.0).unwrap().len(), 81);
        assert_eq!(db_grid(0.0, 1.0, 0.1).unwrap().len(), 11);
    }

    #[test]
    fn det_diamond_examples() {
        assert_eq!(det_diamond_capacity(4, 2, 1, 3), 3);
        assert_eq!(det_diamond_capacity(6, 0, 6, 0), 6);
        assert_eq!(det_diamond_capacity(0, 0, 4, 5), 0);
    }

    #[test]
    fn relabeling() {
        let d = GaussianDiamond::new(1.0, 2.0, 3.0, 4.0).unwrap();
        assert!(d.swapped);
        assert_eq!((d.h_sa1, d.h_sa2, d.h_a1d, d.h_a2d), (2.0, 1.0, 4.0, 3.0));
        assert!(!GaussianDiamond::new(2.0, 1.0, 3.0, 4.0).unwrap().swapped);
        assert!(GaussianDiamond::new(-1.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn region_examples() {
        let d = diamond([8.0, 3.0, 5.0, 5.0]);
        assert!(!diamond_region_contains(&d, 1.0, RatePoint::new(0.0, 0.1).unwrap()).unwrap());
        // weak-user endpoint log(1 + 3) = 2 fits under mac2 = log 6
        assert!(diamond_region_contains(&d, 0.0, RatePoint::new(0.0, 2.0).unwrap()).unwrap());
        let tight = diamond([8.0, 3.0, 5.0, 1.0]);
        assert!(!diamond_region_contains(&tight, 0.0, RatePoint::new(0.0, 2.0).unwrap()).unwrap());
        assert!(diamond_region_contains(&d, 0.3, RatePoint::new(0.0, 0.0).unwrap()).unwrap());
        assert!(diamond_region_contains(&d, 1.5, RatePoint::new(0.0, 0.0).unwrap()).is_err());
    }

    #[test]
    fn pdf_examples() {
        assert_eq!(diamond_pdf_rate(&diamond([5.0, 3.0, 0.0, 0.0])).0, 0.0);

        let d = diamond([15.0, 0.0, 7.0, 20.0]);
        let (rate, _) = diamond_pdf_rate(&d);
        assert!((rate - 3.0).abs() < 1e-12);

        let d = diamond([15.0; 4]);
        let (rate, alpha) = diamond_pdf_rate(&d);
        // 1e-6 alpha grid
        assert!((rate - 4.0).abs() < 1e-9, "{rate}");
        assert!(rate >= alpha_grid_oracle(&d) - 1e-9);
        assert!((pdf_sum_at(&d, alpha) - rate).abs() < 1e-15);
    }

    #[test]
    fn rstar_examples() {
        let g2 = 10.0;
        assert!((diamond_rstar(&diamond([g2; 4])) - log2_1p(g2)).abs() < 1e-12);
        assert!((diamond_rstar(&diamond([9.0, 0.0, 4.0, 0.0])) - log2_1p(4.0)).abs() < 1e-12);
        assert_eq!(diamond_rstar(&diamond([0.0; 4])), 0.0);
    }

    #[test]
    fn alpha_star_examples() {
        let d = diamond([9.0, 3.0, 1.0, 1.0]);
        assert!((diamond_alpha_star(&d, 1.0).unwrap() - 1.0).abs() < 1e-15);
        let a = diamond_alpha_star(&d, 2.0).unwrap();
        assert!((a - 1.0 / 3.0).abs() < 1e-15);
        assert!((bc_weak_rate(3.0, a) - 1.0).abs() < 1e-12);

        let top = log2_1p(3.0);
        let a = diamond_alpha_star(&d, top).unwrap();
        assert!((bc_weak_rate(3.0, a) - (top - 1.0)).abs() < 1e-12);

        assert!(diamond_alpha_star(&d, 0.5).is_err());
        assert!(diamond_alpha_star(&d, 2.5).is_err());
    }

    #[test]
    fn cutset_bound_examples() {
        assert_eq!(diamond_cutset_bound(&diamond([0.0; 4])), 0.0);
        let single = diamond([9.0, 0.0, 4.0, 0.0]);
        assert!((diamond_cutset_bound(&single) - log2_1p(4.0)).abs() < 1e-12);
        assert!((diamond_cutset_bound(&diamond([15.0; 4])) - 31f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn diamond_gap_examples() {
        let z = diamond_gap(&diamond([0.0; 4]));
        assert_eq!(
            (z.r_pdf(), z.r_star, z.c_bar(), z.report.gap),
            (0.0, 0.0, 0.0, 0.0)
        );
        let g = diamond_gap(&diamond([15.0; 4]));
        assert!((g.report.gap - (31f64.log2() - 4.0)).abs() < 1e-9);
        assert!(g.sandwich_holds());
    }

    #[test]
    fn random_draws_are_reproducible() {
        let a = random_diamond_db(5, 7, -20.0, 60.0);
        assert_eq!(a, random_diamond_db(5, 7, -20.0, 60.0));
        assert!(a.iter().flatten().all(|&x| (-20.0..=60.0).contains(&x)));
    }

    fn arb_power() -> impl Strategy<Value = f64> {
        (-20.0f64..60.0).prop_map(|db| 10f64.powf(db / 10.0))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn relay_gap_within_one_bit(a in arb_power(), b in arb_power(), c in arb_power()) {
            let g = relay_gap(&relay(a, b, c));
            prop_assert!(g.gap >= -GAP_TOL && g.gap <= 1.0 + GAP_TOL);
        }

        #[test]
        fn diamond_sandwich(p in proptest::array::uniform4(arb_power())) {
            prop_assert!(diamond_gap(&diamond(p)).sandwich_holds());
        }

        #[test]
        fn rstar_matches_vertices(p in proptest::array::uniform4(arb_power())) {
            let d = diamond(p);
            prop_assert!((diamond_rstar(&d) - rstar_vertex_oracle(&d)).abs() < 1e-9);
        }

        #[test]
        fn pdf_matches_alpha_grid(p in proptest::array::uniform4(-10.0f64..30.0)) {
            let d = GaussianDiamond::from_db(p).unwrap();
            let (rate, _) = diamond_pdf_rate(&d);
            let grid = alpha_grid_oracle(&d);
            prop_assert!(rate >= grid - 1e-9, "{} < {}", rate, grid);
            prop_assert!(rate <= grid + 1e-4);
        }

        #[test]
        fn region_is_inside_relaxation(
            p in proptest::array::uniform4(arb_power()),
            alpha in 0.0f64..=1.0,
            u in 0.0f64..=1.0, v in 0.0f64..=1.0,
        ) {
            let d = diamond(p);
            let c = d.caps();
            let r1 = u * log2_1p(alpha * c.s1).min(c.mac1);
            let r2 = v * bc_weak_rate(c.s2, alpha).min(c.mac2);
            let pt = RatePoint::new(r1, r2).unwrap();
            prop_assume!(diamond_region_contains(&d, alpha, pt).unwrap());
            prop_assert!(r2 <= c.bc2 + RATE_TOL);
            prop_assert!(r1 + r2 <= c.bc1 + 1e-9);
            prop_assert!(r1 <= c.mac1 + RATE_TOL && r2 <= c.mac2 + RATE_TOL);
            prop_assert!(r1 + r2 <= c.mac_sum + RATE_TOL);
        }

        #[test]
        fn scaling_gains_up_is_monotone(
            p in proptest::array::uniform4(-20.0f64..40.0),
            scale_db in 0.0f64..20.0,
        ) {
            let r = GaussianRelay::from_db(p[0], p[1], p[2]).unwrap();
            let r2 = GaussianRelay::from_db(p[0] + scale_db, p[1] + scale_db, p[2] + scale_db).unwrap();
            prop_assert!(relay_df_rate(&r2) >= relay_df_rate(&r) - 1e-12);
            prop_assert!(relay_cutset_bound(&r2).0 >= relay_cutset_bound(&r).0 - 1e-9);
            let d = GaussianDiamond::from_db(p).unwrap();
            let d2 = GaussianDiamond::from_db(p.map(|x| x + scale_db)).unwrap();
            prop_assert!(diamond_pdf_rate(&d2).0 >= diamond_pdf_rate(&d).0 - 1e-9);
            prop_assert!(diamond_cutset_bound(&d2) >= diamond_cutset_bound(&d) - 1e-12);
        }
    }
}
