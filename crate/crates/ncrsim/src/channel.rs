//! Path loss, array steering vectors, and random multipath channel synthesis.
//!
//! Channels follow a geometric millimeter-wave model: L paths, each an outer
//! product of transmit/receive steering vectors weighted by an i.i.d.
//! circularly-symmetric complex Gaussian gain, scaled so the mean entry power
//! equals the linear link gain. The first path points along the geometric
//! boresight between the endpoints; the remaining L-1 paths draw their
//! departure/arrival angles uniformly from [-pi/2, pi/2].

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Result, SimError};
use crate::geometry::{boresight_angle, distance, Position};
use crate::matrix::ComplexMatrix;
use crate::units::db_lin;

/// Line-of-sight path loss in dB (mmMAGIC-style): `19.2 log10(d) + 32.9 + 20.8 log10(fc)`.
pub fn path_loss_los_db(d_m: f64, fc_ghz: f64) -> Result<f64> {
    check_pl_args(d_m, fc_ghz)?;
    Ok(19.2 * d_m.log10() + 32.9 + 20.8 * fc_ghz.log10())
}

/// Non-line-of-sight path loss in dB: `45 log10(d) + 31 + 20 log10(fc)`.
pub fn path_loss_nlos_db(d_m: f64, fc_ghz: f64) -> Result<f64> {
    check_pl_args(d_m, fc_ghz)?;
    Ok(45.0 * d_m.log10() + 31.0 + 20.0 * fc_ghz.log10())
}

fn check_pl_args(d_m: f64, fc_ghz: f64) -> Result<()> {
    if !d_m.is_finite() || !fc_ghz.is_finite() {
        return Err(SimError::NonFinite { what: "path loss argument" });
    }
    if d_m <= 0.0 {
        return Err(SimError::OutOfRange { what: "distance", reason: "must be positive" });
    }
    if fc_ghz <= 0.0 {
        return Err(SimError::OutOfRange { what: "carrier frequency", reason: "must be positive" });
    }
    Ok(())
}

/// Uniform-linear-array steering vector with half-wavelength spacing:
/// element m (0-based) is `exp(j*pi*m*sin(angle))`. Returned as an n x 1 column.
pub fn steering_vector(n: usize, angle_rad: f64) -> ComplexMatrix {
    assert!(n >= 1, "array size must be at least 1");
    let s = angle_rad.sin();
    ComplexMatrix::from_fn(n, 1, |m, _| Complex64::from_polar(1.0, PI * m as f64 * s))
}

/// One realized link: channel matrix plus the bookkeeping that produced it.
#[derive(Debug, Clone)]
pub struct LinkRealization {
    /// n_r x n_t channel matrix.
    pub matrix: ComplexMatrix,
    /// Effective path loss in dB (endpoint antenna gains already subtracted).
    pub path_loss_db: f64,
    pub blocked: bool,
    /// Departure angle per path, radians.
    pub aod_rad: Vec<f64>,
    /// Arrival angle per path, radians.
    pub aoa_rad: Vec<f64>,
}

/// The random part of one link draw, independent of geometry and array sizes.
///
/// Sampling this once per trial and realizing it against several geometries
/// (or array-size prefixes) keeps paired Monte Carlo comparisons paired.
#[derive(Debug, Clone)]
pub struct ChannelDraw {
    /// Per-path complex gains, CN(0, 1).
    pub gains: Vec<Complex64>,
    /// Departure angles for paths 2..L.
    pub extra_aod: Vec<f64>,
    /// Arrival angles for paths 2..L.
    pub extra_aoa: Vec<f64>,
}

impl ChannelDraw {
    /// Draws gains and extra-path angles for an L-path link.
    ///
    /// Consumption order from `rng` is fixed: L complex gains (re, im pairs),
    /// then L-1 departure angles, then L-1 arrival angles.
    pub fn sample<R: Rng>(l: usize, rng: &mut R) -> Self {
        assert!(l >= 1, "need at least one path");
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let gains = (0..l)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re * inv_sqrt2, im * inv_sqrt2)
            })
            .collect();
        let extra_aod = (0..l - 1).map(|_| rng.gen_range(-FRAC_PI_2..FRAC_PI_2)).collect();
        let extra_aoa = (0..l - 1).map(|_| rng.gen_range(-FRAC_PI_2..FRAC_PI_2)).collect();
        Self { gains, extra_aod, extra_aoa }
    }

    pub fn n_paths(&self) -> usize {
        self.gains.len()
    }
}

/// Realizes a drawn link against concrete geometry and array sizes.
///
/// `endpoint_gains_db` is the sum of the two endpoint antenna gains; it is
/// subtracted from the path loss before conversion to a linear gain.
pub fn realize_channel(
    draw: &ChannelDraw,
    tx: Position,
    rx: Position,
    n_t: usize,
    n_r: usize,
    fc_ghz: f64,
    blocked: bool,
    endpoint_gains_db: f64,
) -> Result<LinkRealization> {
    if tx == rx {
        return Err(SimError::CoincidentPositions { context: "realize_channel" });
    }
    let l = draw.n_paths();
    let d = distance(tx, rx);
    let pl_raw = if blocked {
        path_loss_nlos_db(d, fc_ghz)?
    } else {
        path_loss_los_db(d, fc_ghz)?
    };
    let pl_db = pl_raw - endpoint_gains_db;
    let pl_lin = db_lin(-pl_db);

    let mut aod = Vec::with_capacity(l);
    let mut aoa = Vec::with_capacity(l);
    aod.push(boresight_angle(tx, rx)?);
    aoa.push(boresight_angle(rx, tx)?);
    aod.extend_from_slice(&draw.extra_aod);
    aoa.extend_from_slice(&draw.extra_aoa);

    let scale = (pl_lin / l as f64).sqrt();
    let mut h = ComplexMatrix::zeros(n_r, n_t);
    for p in 0..l {
        let at = steering_vector(n_t, aod[p]);
        let ar = steering_vector(n_r, aoa[p]);
        let g = draw.gains[p] * scale;
        for i in 0..n_r {
            let gi = g * ar.get(i, 0);
            for j in 0..n_t {
                let v = h.get(i, j) + gi * at.get(j, 0);
                h.set(i, j, v);
            }
        }
    }

    Ok(LinkRealization {
        matrix: h,
        path_loss_db: pl_db,
        blocked,
        aod_rad: aod,
        aoa_rad: aoa,
    })
}

/// Draws and realizes a fresh channel in one step.
#[allow(clippy::too_many_arguments)]
pub fn synthesize_channel<R: Rng>(
    tx: Position,
    rx: Position,
    n_t: usize,
    n_r: usize,
    l: usize,
    fc_ghz: f64,
    blocked: bool,
    endpoint_gains_db: f64,
    rng: &mut R,
) -> Result<LinkRealization> {
    if tx == rx {
        return Err(SimError::CoincidentPositions { context: "synthesize_channel" });
    }
    let draw = ChannelDraw::sample(l, rng);
    realize_channel(&draw, tx, rx, n_t, n_r, fc_ghz, blocked, endpoint_gains_db)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_6;

    #[test]
    fn path_loss_examples() {
        assert_relative_eq!(path_loss_los_db(1.0, 1.0).unwrap(), 32.9);
        assert!((path_loss_los_db(100.0, 28.0).unwrap() - 101.40).abs() < 0.01);
        assert!((path_loss_los_db(10.0, 28.0).unwrap() - 82.20).abs() < 0.01);
        assert_relative_eq!(path_loss_nlos_db(1.0, 1.0).unwrap(), 31.0);
        assert!((path_loss_nlos_db(100.0, 28.0).unwrap() - 149.94).abs() < 0.01);
        assert!((path_loss_nlos_db(10.0, 28.0).unwrap() - 104.94).abs() < 0.01);
        assert!(path_loss_los_db(0.0, 28.0).is_err());
        assert!(path_loss_nlos_db(10.0, -1.0).is_err());
    }

    #[test]
    fn path_loss_strictly_increasing() {
        for i in 1..60 {
            let d = i as f64 * 5.0;
            assert!(path_loss_los_db(d + 1.0, 28.0).unwrap() > path_loss_los_db(d, 28.0).unwrap());
            assert!(path_loss_nlos_db(d + 1.0, 28.0).unwrap() > path_loss_nlos_db(d, 28.0).unwrap());
            let fc = i as f64;
            assert!(path_loss_los_db(50.0, fc + 0.5).unwrap() > path_loss_los_db(50.0, fc).unwrap());
            assert!(path_loss_nlos_db(50.0, fc + 0.5).unwrap() > path_loss_nlos_db(50.0, fc).unwrap());
        }
    }

    #[test]
    fn steering_examples() {
        let v = steering_vector(2, 0.0);
        assert_eq!(v.get(0, 0), Complex64::new(1.0, 0.0));
        assert_eq!(v.get(1, 0), Complex64::new(1.0, 0.0));

        let v = steering_vector(2, std::f64::consts::FRAC_PI_2);
        assert!((v.get(1, 0) - Complex64::new(-1.0, 0.0)).norm() < 1e-12);

        // sin(pi/6) = 1/2, so the phase step is pi/2
        let v = steering_vector(4, FRAC_PI_6);
        let expect = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ];
        for (m, e) in expect.iter().enumerate() {
            assert!((v.get(m, 0) - e).norm() < 1e-12, "element {m}");
        }
    }

    #[test]
    fn steering_unit_modulus() {
        let mut rng = substream(11, &[0]);
        for _ in 0..50 {
            let n = rng.gen_range(1..24);
            let ang = rng.gen_range(-1.5..1.5);
            let v = steering_vector(n, ang);
            for m in 0..n {
                assert!((v.get(m, 0).norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let tx = Position::new(0.0, 0.0);
        let rx = Position::new(50.0, 10.0);
        let mut r1 = substream(99, &[1, 2]);
        let mut r2 = substream(99, &[1, 2]);
        let a = synthesize_channel(tx, rx, 4, 2, 3, 28.0, false, 0.0, &mut r1).unwrap();
        let b = synthesize_channel(tx, rx, 4, 2, 3, 28.0, false, 0.0, &mut r2).unwrap();
        assert_eq!(a.matrix, b.matrix);
        assert_eq!(a.aod_rad, b.aod_rad);
    }

    #[test]
    fn siso_mean_power_matches_link_gain() {
        // SISO, single path: |H|^2 averages to the linear path gain.
        let tx = Position::new(0.0, 0.0);
        let rx = Position::new(30.0, 40.0);
        let pl = db_lin(-(path_loss_los_db(50.0, 28.0).unwrap()));
        let mut rng = substream(5, &[7]);
        let n = 100_000;
        let mut acc = 0.0;
        for _ in 0..n {
            let h = synthesize_channel(tx, rx, 1, 1, 1, 28.0, false, 0.0, &mut rng).unwrap();
            acc += h.matrix.get(0, 0).norm_sqr();
        }
        let mean = acc / n as f64;
        assert!(
            (mean - pl).abs() / pl < 0.01,
            "mean {mean:e} vs pl {pl:e}"
        );
    }

    #[test]
    fn blocked_to_clear_power_ratio_matches_pathloss_gap() {
        let tx = Position::new(0.0, 0.0);
        let rx = Position::new(30.0, 40.0);
        let mut rng = substream(6, &[8]);
        let n = 60_000;
        let (mut p_los, mut p_nlos) = (0.0, 0.0);
        for _ in 0..n {
            let draw = ChannelDraw::sample(1, &mut rng);
            let a = realize_channel(&draw, tx, rx, 1, 1, 28.0, false, 0.0).unwrap();
            let b = realize_channel(&draw, tx, rx, 1, 1, 28.0, true, 0.0).unwrap();
            p_los += a.matrix.get(0, 0).norm_sqr();
            p_nlos += b.matrix.get(0, 0).norm_sqr();
        }
        let gap_db = path_loss_nlos_db(50.0, 28.0).unwrap() - path_loss_los_db(50.0, 28.0).unwrap();
        let expect = db_lin(gap_db);
        let got = p_los / p_nlos;
        assert!((got - expect).abs() / expect < 0.02, "got {got}, expect {expect}");
    }

    #[test]
    fn frobenius_concentrates_and_stays_finite() {
        let tx = Position::new(0.0, 0.0);
        let rx = Position::new(80.0, -20.0);
        let d = distance(tx, rx);
        let pl = db_lin(-path_loss_los_db(d, 28.0).unwrap());
        let (n_t, n_r) = (8, 4);
        let mut rng = substream(21, &[3]);
        let n = 4000;
        let mut acc = 0.0;
        for _ in 0..n {
            let h = synthesize_channel(tx, rx, n_t, n_r, 3, 28.0, false, 0.0, &mut rng).unwrap();
            assert!(h.matrix.all_finite());
            acc += h.matrix.frobenius_norm_sq() / (n_t as f64 * n_r as f64 * pl);
        }
        let mean = acc / n as f64;
        assert!((mean - 1.0).abs() < 0.05, "normalized Frobenius mean {mean}");
    }

    #[test]
    fn endpoint_gains_shift_the_budget() {
        let tx = Position::new(0.0, 0.0);
        let rx = Position::new(100.0, 0.0);
        let draw = ChannelDraw::sample(2, &mut substream(1, &[1]));
        let plain = realize_channel(&draw, tx, rx, 2, 2, 28.0, false, 0.0).unwrap();
        let boosted = realize_channel(&draw, tx, rx, 2, 2, 28.0, false, 36.0).unwrap();
        assert_relative_eq!(plain.path_loss_db - 36.0, boosted.path_loss_db, epsilon = 1e-12);
        let ratio = boosted.matrix.frobenius_norm_sq() / plain.matrix.frobenius_norm_sq();
        assert_relative_eq!(ratio, db_lin(36.0), max_relative = 1e-9);
    }

    #[test]
    fn coincident_positions_rejected() {
        let p = Position::new(1.0, 1.0);
        let mut rng = substream(0, &[0]);
        assert!(synthesize_channel(p, p, 2, 2, 3, 28.0, false, 0.0, &mut rng).is_err());
    }

    #[test]
    fn first_path_is_boresight() {
        let tx = Position::new(0.0, 0.0);
        let rx = Position::new(10.0, 10.0);
        let mut rng = substream(4, &[4]);
        let h = synthesize_channel(tx, rx, 2, 2, 3, 28.0, false, 0.0, &mut rng).unwrap();
        assert_relative_eq!(h.aod_rad[0], std::f64::consts::FRAC_PI_4);
        assert_relative_eq!(h.aoa_rad[0], -3.0 * std::f64::consts::FRAC_PI_4);
        assert_eq!(h.aod_rad.len(), 3);
        assert_eq!(h.aoa_rad.len(), 3);
    }
}
