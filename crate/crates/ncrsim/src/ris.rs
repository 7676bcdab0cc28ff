//! Passive reflecting-surface link model.
//!
//! Per-realization rate through `h_ru diag(e^{j theta}) h_br w`, plus the
//! closed-form channel-averaged rate under transceiver hardware impairment.
//! The two are reported on separate curves and never mixed in one average.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::beamforming::PhaseConfig;
use crate::error::{Result, SimError};
use crate::matrix::ComplexMatrix;
use crate::ncr::rate_bps;

/// Diagonal reflection matrix `diag(e^{j theta_1}, ..., e^{j theta_M})`.
pub fn reflection_matrix(phases: &PhaseConfig) -> ComplexMatrix {
    let m = phases.len();
    let mut out = ComplexMatrix::zeros(m, m);
    for (i, &t) in phases.thetas().iter().enumerate() {
        out.set(i, i, Complex64::from_polar(1.0, t));
    }
    out
}

/// Achievable rate of the surface-assisted link for one channel realization:
/// `Q log2(1 + P |h_ru Theta h_br w|^2 / sigma^2)`.
pub fn ris_rate(
    h_br: &ComplexMatrix,
    h_ru: &ComplexMatrix,
    phases: &PhaseConfig,
    w: &ComplexMatrix,
    p_mw: f64,
    sigma2_mw: f64,
    q_hz: f64,
) -> Result<f64> {
    let m = h_br.rows();
    if h_ru.rows() != 1 || h_ru.cols() != m || phases.len() != m {
        return Err(SimError::DimensionMismatch {
            context: "ris_rate",
            expected: format!("h_ru 1 x {m}, phases of length {m}"),
            found: format!("h_ru {} x {}, phases {}", h_ru.rows(), h_ru.cols(), phases.len()),
        });
    }
    if w.rows() != h_br.cols() || w.cols() != 1 {
        return Err(SimError::DimensionMismatch {
            context: "ris_rate",
            expected: format!("w {} x 1", h_br.cols()),
            found: format!("w {} x {}", w.rows(), w.cols()),
        });
    }
    Ok(rate_bps(
        q_hz,
        p_mw * ris_effective_power(h_br, h_ru, phases, w)? / sigma2_mw,
    ))
}

/// `|h_ru Theta h_br w|^2`, the transmit-power-independent part of the rate.
pub fn ris_effective_power(
    h_br: &ComplexMatrix,
    h_ru: &ComplexMatrix,
    phases: &PhaseConfig,
    w: &ComplexMatrix,
) -> Result<f64> {
    // h_br w, then the phased row sum; avoids materializing the M x M diagonal
    let hw = h_br.mul(w)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..h_br.rows() {
        acc += h_ru.get(0, i) * Complex64::from_polar(1.0, phases.thetas()[i]) * hw.get(i, 0);
    }
    Ok(acc.norm_sqr())
}

/// Statistical ingredients of the hardware-impairment rate.
#[derive(Debug, Clone, Copy)]
pub struct HwiLinkStats {
    /// Linear power attenuation of the BS-to-surface link.
    pub mu_br: f64,
    /// Linear power attenuation of the surface-to-UE link.
    pub mu_ru: f64,
    /// Linear power attenuation of the direct BS-to-UE link (0 disables it).
    pub mu_bu: f64,
    /// Phase of the direct-link term, radians.
    pub phi_bu: f64,
    /// Reflection amplitude coefficient, in (0, 1].
    pub alpha: f64,
    pub kappa_t: f64,
    pub kappa_r: f64,
    /// Element count M.
    pub m: usize,
}

/// Quadratic/linear coefficients of the impaired-rate numerator:
/// `beta = 4 alpha^2 mu_ru mu_br / pi^2` and
/// `xi = (1 - 4/pi^2) alpha^2 mu_ru mu_br + (4 alpha / pi) sqrt(mu_br mu_ru mu_bu) cos(phi_bu)`.
pub fn hwi_coefficients(stats: &HwiLinkStats) -> (f64, f64) {
    let a2 = stats.alpha * stats.alpha;
    let prod = stats.mu_ru * stats.mu_br;
    let beta = 4.0 * a2 * prod / (PI * PI);
    let xi = (1.0 - 4.0 / (PI * PI)) * a2 * prod
        + (4.0 * stats.alpha / PI) * (stats.mu_br * stats.mu_ru * stats.mu_bu).sqrt()
            * stats.phi_bu.cos();
    (beta, xi)
}

/// Channel-averaged rate under hardware impairment:
/// `Q log2(1 + s / ((kappa_t + kappa_r) s + sigma^2/P))` with
/// `s = beta M^2 + xi M + mu_bu`.
///
/// For in-range stats `s` is provably nonnegative: completing the square
/// gives `s = ((2 alpha M / pi) sqrt(mu_br mu_ru) - sqrt(mu_bu))^2 +
/// (1 - 4/pi^2) alpha^2 mu_br mu_ru M (M + c)` with nonnegative remainder
/// even at `cos(phi_bu) = -1`. A negative `s` therefore signals
/// out-of-range inputs and is reported as a domain error, never clamped.
pub fn hwi_rate(stats: &HwiLinkStats, p_mw: f64, sigma2_mw: f64, q_hz: f64) -> Result<f64> {
    if !(p_mw > 0.0) {
        return Err(SimError::OutOfRange { what: "p_mw", reason: "must be positive" });
    }
    let (beta, xi) = hwi_coefficients(stats);
    let m = stats.m as f64;
    let s = beta * m * m + xi * m + stats.mu_bu;
    if !(s >= 0.0) {
        return Err(SimError::Domain {
            reason: format!("impaired-rate numerator is negative or undefined ({s:e})"),
        });
    }
    let sinr = s / ((stats.kappa_t + stats.kappa_r) * s + sigma2_mw / p_mw);
    Ok(rate_bps(q_hz, sinr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use approx::assert_relative_eq;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn reflection_matrix_examples() {
        let id = reflection_matrix(&PhaseConfig::new(vec![0.0, 0.0]));
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) };
                assert!((id.get(i, j) - want).norm() < 1e-15);
            }
        }
        let neg = reflection_matrix(&PhaseConfig::new(vec![PI]));
        assert!((neg.get(0, 0) - c(-1.0, 0.0)).norm() < 1e-12);

        let mut rng = substream(1, &[1]);
        let phases = PhaseConfig::new((0..8).map(|_| rng.gen_range(-10.0..10.0)).collect());
        let theta = reflection_matrix(&phases);
        for i in 0..8 {
            assert!((theta.get(i, i).norm() - 1.0).abs() < 1e-12);
            assert!(phases.thetas()[i] >= 0.0 && phases.thetas()[i] < 2.0 * PI);
        }
    }

    #[test]
    fn ris_rate_unit_case() {
        let one = ComplexMatrix::from_vec(1, 1, vec![c(1.0, 0.0)]).unwrap();
        let r = ris_rate(&one, &one, &PhaseConfig::new(vec![0.0]), &one, 1.0, 1.0, 1e9).unwrap();
        assert_relative_eq!(r, 1e9, max_relative = 1e-12);
    }

    #[test]
    fn ris_rate_coherent_sum() {
        let m = 25;
        let ones_col = ComplexMatrix::from_vec(m, 1, vec![c(1.0, 0.0); m]).unwrap();
        let ones_row = ComplexMatrix::from_vec(1, m, vec![c(1.0, 0.0); m]).unwrap();
        let w = ComplexMatrix::from_vec(1, 1, vec![c(1.0, 0.0)]).unwrap();
        let r = ris_rate(
            &ones_col,
            &ones_row,
            &PhaseConfig::new(vec![0.0; m]),
            &w,
            2.0,
            1.0,
            1e9,
        )
        .unwrap();
        let want = 1e9 * (1.0 + 2.0 * (m * m) as f64).log2();
        assert_relative_eq!(r, want, max_relative = 1e-12);
    }

    #[test]
    fn ris_rate_phase_invariant_in_w() {
        let mut rng = substream(2, &[2]);
        let h_br = ComplexMatrix::from_fn(6, 3, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let h_ru = ComplexMatrix::from_fn(1, 6, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let phases = PhaseConfig::new((0..6).map(|_| rng.gen_range(0.0..6.28)).collect());
        let mut w = vec![c(0.0, 0.0); 3];
        for wi in w.iter_mut() {
            *wi = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let n = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let w: Vec<_> = w.iter().map(|z| z / n).collect();
        let wm = ComplexMatrix::column(&w);
        let rot = Complex64::from_polar(1.0, 2.1);
        let wrot = wm.scale(rot);
        let a = ris_rate(&h_br, &h_ru, &phases, &wm, 1.0, 0.1, 1e9).unwrap();
        let b = ris_rate(&h_br, &h_ru, &phases, &wrot, 1.0, 0.1, 1e9).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-12);
    }

    #[test]
    fn ris_rate_triangle_bound() {
        let mut rng = substream(3, &[3]);
        for _ in 0..100 {
            let m = rng.gen_range(2..10);
            let nb = rng.gen_range(1..6);
            let h_br = ComplexMatrix::from_fn(m, nb, |_, _| {
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let h_ru = ComplexMatrix::from_fn(1, m, |_, _| {
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let phases = PhaseConfig::new((0..m).map(|_| rng.gen_range(0.0..6.28)).collect());
            let mut w: Vec<_> = (0..nb)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let n = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for z in w.iter_mut() {
                *z /= n;
            }
            let wm = ComplexMatrix::column(&w);
            let r = ris_rate(&h_br, &h_ru, &phases, &wm, 1.0, 1.0, 1e9).unwrap();
            let bound_amp: f64 = (0..m)
                .map(|i| {
                    let row_norm = h_br.row_slice(i).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                    h_ru.get(0, i).norm() * row_norm
                })
                .sum();
            let bound = 1e9 * (1.0 + bound_amp * bound_amp).log2();
            assert!(r <= bound + 1e-9, "rate {r} above triangle bound {bound}");
        }
    }

    #[test]
    fn hwi_coefficient_examples() {
        let stats = HwiLinkStats {
            mu_br: 1.0,
            mu_ru: 1.0,
            mu_bu: 0.0,
            phi_bu: 0.0,
            alpha: 1.0,
            kappa_t: 0.0,
            kappa_r: 0.0,
            m: 1,
        };
        let (beta, xi) = hwi_coefficients(&stats);
        assert_relative_eq!(beta, 4.0 / (PI * PI), max_relative = 1e-15);
        assert_relative_eq!(xi, 1.0 - 4.0 / (PI * PI), max_relative = 1e-15);

        let half = HwiLinkStats { alpha: 0.5, ..stats };
        let (beta, xi) = hwi_coefficients(&half);
        assert_relative_eq!(beta, 1.0 / (PI * PI), max_relative = 1e-15);
        assert_relative_eq!(xi, 0.25 * (1.0 - 4.0 / (PI * PI)), max_relative = 1e-15);

        // cos(pi/2) kills the direct-link cross term
        let with_direct = HwiLinkStats { mu_bu: 3.0, phi_bu: PI / 2.0, ..stats };
        let (_, xi_direct) = hwi_coefficients(&with_direct);
        let (_, xi_plain) = hwi_coefficients(&stats);
        assert_relative_eq!(xi_direct, xi_plain, epsilon = 1e-12);
    }

    #[test]
    fn hwi_rate_unit_case_and_kappa_free_form() {
        let stats = HwiLinkStats {
            mu_br: 1.0,
            mu_ru: 1.0,
            mu_bu: 0.0,
            phi_bu: 0.0,
            alpha: 1.0,
            kappa_t: 0.0,
            kappa_r: 0.0,
            m: 1,
        };
        // numerator beta + xi = 1 at M = 1, so P = sigma^2 gives Q log2(2)
        let r = hwi_rate(&stats, 5.0, 5.0, 1e9).unwrap();
        assert_relative_eq!(r, 1e9, max_relative = 1e-12);

        let mut rng = substream(4, &[4]);
        for _ in 0..1000 {
            let stats = HwiLinkStats {
                mu_br: rng.gen_range(1e-12..1e-3),
                mu_ru: rng.gen_range(1e-12..1e-3),
                mu_bu: rng.gen_range(0.0..1e-6),
                phi_bu: rng.gen_range(0.0..PI / 2.0),
                alpha: rng.gen_range(0.05..1.0),
                kappa_t: 0.0,
                kappa_r: 0.0,
                m: rng.gen_range(1..500),
            };
            let p = rng.gen_range(1.0..1e5);
            let s2 = rng.gen_range(1e-9..1e-3);
            let (beta, xi) = hwi_coefficients(&stats);
            let m = stats.m as f64;
            let want = 1e9 * (1.0 + p * (beta * m * m + xi * m + stats.mu_bu) / s2).log2();
            let got = hwi_rate(&stats, p, s2, 1e9).unwrap();
            assert_relative_eq!(got, want, max_relative = 1e-12);
        }
    }

    #[test]
    fn hwi_power_ceiling() {
        // kappa_t = kappa_r = 0.05^2: the P -> infinity ceiling is Q log2(201)
        let stats = HwiLinkStats {
            mu_br: 1e-7,
            mu_ru: 1e-9,
            mu_bu: 0.0,
            phi_bu: PI / 4.0,
            alpha: 1.0,
            kappa_t: 0.0025,
            kappa_r: 0.0025,
            m: 100,
        };
        let r = hwi_rate(&stats, 1e30, 4e-8, 1e9).unwrap();
        let ceiling = 1e9 * (201.0f64).log2();
        assert_relative_eq!(r, ceiling, max_relative = 1e-9);
    }

    #[test]
    fn hwi_monotone_in_kappa_and_m() {
        let mut rng = substream(5, &[5]);
        for _ in 0..300 {
            let base = HwiLinkStats {
                mu_br: rng.gen_range(1e-10..1e-4),
                mu_ru: rng.gen_range(1e-10..1e-4),
                mu_bu: rng.gen_range(0.0..1e-8),
                phi_bu: rng.gen_range(0.0..PI / 2.0),
                alpha: rng.gen_range(0.1..1.0),
                kappa_t: rng.gen_range(0.0..0.01),
                kappa_r: rng.gen_range(0.0..0.01),
                m: rng.gen_range(1..400),
            };
            let p = rng.gen_range(1.0..1e5);
            let s2 = 4e-8;
            let r = hwi_rate(&base, p, s2, 1e9).unwrap();

            let worse_t = HwiLinkStats { kappa_t: base.kappa_t + 0.005, ..base };
            assert!(hwi_rate(&worse_t, p, s2, 1e9).unwrap() <= r + 1e-9);
            let worse_r = HwiLinkStats { kappa_r: base.kappa_r + 0.005, ..base };
            assert!(hwi_rate(&worse_r, p, s2, 1e9).unwrap() <= r + 1e-9);

            // xi >= 0 here since phi in [0, pi/2], so more elements never hurt
            let bigger = HwiLinkStats { m: base.m + 7, ..base };
            assert!(hwi_rate(&bigger, p, s2, 1e9).unwrap() >= r - 1e-9);
        }
    }

    #[test]
    fn hwi_numerator_nonnegative_in_contract() {
        // cos(phi_bu) = -1 with the worst-case direct-link strength still
        // leaves the numerator positive; the square completion is tight.
        let mut rng = substream(6, &[6]);
        for _ in 0..500 {
            let stats = HwiLinkStats {
                mu_br: rng.gen_range(1e-14..1e-2),
                mu_ru: rng.gen_range(1e-14..1e-2),
                mu_bu: rng.gen_range(0.0..1.0),
                phi_bu: PI,
                alpha: rng.gen_range(0.01..1.0),
                kappa_t: 0.0,
                kappa_r: 0.0,
                m: rng.gen_range(1..2000),
            };
            assert!(hwi_rate(&stats, 1.0, 1.0, 1e9).is_ok());
        }
    }

    #[test]
    fn hwi_out_of_range_stats_surface_as_domain_error() {
        // a negative attenuation coefficient breaks the invariant; the rate
        // must refuse rather than clamp
        let stats = HwiLinkStats {
            mu_br: 1e-6,
            mu_ru: 1e-6,
            mu_bu: -1.0,
            phi_bu: 0.0,
            alpha: 1.0,
            kappa_t: 0.0,
            kappa_r: 0.0,
            m: 1,
        };
        match hwi_rate(&stats, 1.0, 1.0, 1e9) {
            Err(SimError::Domain { .. }) => {}
            other => panic!("expected domain error, got {other:?}"),
        }
    }
}
