//! Beamformer construction and passive-surface phase optimization.
//!
//! Three routes to a configured link:
//!  - [`svd_beam_pair`]: matched transmit/receive beams from the dominant
//!    singular pair of a channel matrix;
//!  - [`ao_optimize`]: alternating optimization of surface phases and the
//!    transmit precoder (full channel knowledge);
//!  - [`codebook_optimize`]: exhaustive search over a Kronecker DFT codebook
//!    (no explicit channel knowledge at the surface).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Result, SimError};
use crate::matrix::ComplexMatrix;
use crate::ncr::rate_bps;
use crate::ris;

/// Unit-norm transmit/receive beam pair.
#[derive(Debug, Clone)]
pub struct BeamPair {
    /// n_t x 1 transmit beam, unit norm.
    pub tx: ComplexMatrix,
    /// n_r x 1 receive beam, unit norm.
    pub rx: ComplexMatrix,
}

/// Per-element surface phases, wrapped to [0, 2*pi).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseConfig {
    thetas: Vec<f64>,
}

impl PhaseConfig {
    pub fn new(thetas: Vec<f64>) -> Self {
        let two_pi = 2.0 * PI;
        Self {
            thetas: thetas.into_iter().map(|t| t.rem_euclid(two_pi)).collect(),
        }
    }

    /// Phases recovered from a unit-modulus codeword.
    pub fn from_codeword(v: &[Complex64]) -> Self {
        Self::new(v.iter().map(|z| z.arg()).collect())
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }
}

/// A set of M unit-modulus candidate reflection vectors of length M.
#[derive(Debug, Clone)]
pub struct Codebook {
    vectors: Vec<Vec<Complex64>>,
}

impl Codebook {
    pub fn size(&self) -> usize {
        self.vectors.len()
    }

    pub fn vector(&self, i: usize) -> &[Complex64] {
        &self.vectors[i]
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.vectors
    }
}

/// Multiplies a vector by the phase that makes its first sizeable entry
/// real-positive, pinning the free global phase.
fn fix_global_phase(v: &mut [Complex64]) {
    let pivot = v.iter().find(|z| z.norm() > 1e-12).copied();
    if let Some(p) = pivot {
        let rot = Complex64::from_polar(1.0, -p.arg());
        for z in v.iter_mut() {
            *z *= rot;
        }
    }
}

/// Dominant singular pair of `h` as a transmit/receive beam pair, so that
/// `|rx^H h tx|` equals the largest singular value.
pub fn svd_beam_pair(h: &ComplexMatrix) -> Result<BeamPair> {
    if h.frobenius_norm_sq() == 0.0 {
        return Err(SimError::ZeroMatrix { context: "svd_beam_pair" });
    }
    let (n_r, n_t) = (h.rows(), h.cols());
    let m = nalgebra::DMatrix::from_fn(n_r, n_t, |i, j| h.get(i, j));
    let svd = m.svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let k = svd
        .singular_values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("at least one singular value");

    // rows of v_t are v_k^H, so the right singular vector is the conjugate row
    let mut tx: Vec<Complex64> = v_t.row(k).iter().map(|z| z.conj()).collect();
    let mut rx: Vec<Complex64> = u.column(k).iter().copied().collect();
    fix_global_phase(&mut tx);
    fix_global_phase(&mut rx);
    let tx = ComplexMatrix::column(&tx);
    let rx = ComplexMatrix::column(&rx);
    let tn = tx.vec_norm();
    let rn = rx.vec_norm();
    Ok(BeamPair {
        tx: tx.scale(Complex64::new(1.0 / tn, 0.0)),
        rx: rx.scale(Complex64::new(1.0 / rn, 0.0)),
    })
}

/// Integer square root check.
fn perfect_square_side(m: usize) -> Option<usize> {
    let n = (m as f64).sqrt().round() as usize;
    (n * n == m).then_some(n)
}

/// Kronecker DFT codebook for a perfect-square element count M.
///
/// Each codeword is the Kronecker product of two rows of the sqrt(M)-point
/// DFT: element phases `-2*pi*(i-1)*(m-1)/sqrt(M)`. Distinct codewords are
/// orthogonal and `V^H V = M I`.
pub fn dft_codebook(m: usize) -> Result<Codebook> {
    if m == 0 {
        return Err(SimError::OutOfRange { what: "codebook size", reason: "must be at least 1" });
    }
    let n = perfect_square_side(m).ok_or(SimError::NotPerfectSquare { m })?;
    let dft_row = |i: usize| -> Vec<Complex64> {
        (0..n)
            .map(|k| Complex64::from_polar(1.0, -2.0 * PI * (i as f64) * (k as f64) / n as f64))
            .collect()
    };
    let mut vectors = Vec::with_capacity(m);
    for i in 0..n {
        let omega = dft_row(i);
        for j in 0..n {
            let inner = dft_row(j);
            let mut v = Vec::with_capacity(m);
            for &a in &omega {
                for &b in &inner {
                    v.push(a * b);
                }
            }
            vectors.push(v);
        }
    }
    Ok(Codebook { vectors })
}

/// Alternating-optimization outcome.
#[derive(Debug, Clone)]
pub struct AoResult {
    /// N_b x 1 unit-norm transmit precoder.
    pub precoder: ComplexMatrix,
    pub phases: PhaseConfig,
    pub rate_bps: f64,
    /// Achieved rate after each iteration; non-decreasing.
    pub trace: Vec<f64>,
    /// False when the loop hit `max_iter` before the rate gain fell below tol.
    pub converged: bool,
}

pub const AO_DEFAULT_TOL: f64 = 1e-6;
pub const AO_DEFAULT_MAX_ITER: usize = 100;

fn check_ris_dims(h_br: &ComplexMatrix, h_ru: &ComplexMatrix, context: &'static str) -> Result<()> {
    if h_ru.rows() != 1 || h_ru.cols() != h_br.rows() {
        return Err(SimError::DimensionMismatch {
            context,
            expected: format!("h_ru of shape 1 x {}", h_br.rows()),
            found: format!("{} x {}", h_ru.rows(), h_ru.cols()),
        });
    }
    Ok(())
}

/// Joint surface-phase / transmit-precoder optimization by alternation.
///
/// Given the precoder, each surface phase aligns its summand of
/// `h_ru diag(e^{j theta}) h_br w`; given the phases, the precoder is matched
/// to the effective row channel. Both half-steps are exact maximizers, so the
/// rate trace never decreases. Starts from a uniform-amplitude zero-phase
/// precoder.
pub fn ao_optimize(
    h_br: &ComplexMatrix,
    h_ru: &ComplexMatrix,
    p_mw: f64,
    sigma2_mw: f64,
    q_hz: f64,
    tol: f64,
    max_iter: usize,
) -> Result<AoResult> {
    check_ris_dims(h_br, h_ru, "ao_optimize")?;
    if h_br.frobenius_norm_sq() == 0.0 || h_ru.frobenius_norm_sq() == 0.0 {
        return Err(SimError::ZeroMatrix { context: "ao_optimize" });
    }
    if !(tol > 0.0) {
        return Err(SimError::OutOfRange { what: "tol", reason: "must be positive" });
    }
    let m = h_br.rows();
    let nb = h_br.cols();

    let mut w = vec![Complex64::new(1.0 / (nb as f64).sqrt(), 0.0); nb];
    let mut thetas = vec![0.0; m];
    let mut trace: Vec<f64> = Vec::new();
    let mut converged = false;

    for _ in 0..max_iter {
        // h_w = h_br w
        let mut h_w = vec![Complex64::new(0.0, 0.0); m];
        for (i, hw) in h_w.iter_mut().enumerate() {
            let row = h_br.row_slice(i);
            *hw = row.iter().zip(&w).map(|(a, b)| a * b).sum();
        }
        // phase-align every summand of h_ru Theta h_w
        for i in 0..m {
            thetas[i] = -(h_ru.get(0, i) * h_w[i]).arg();
        }
        // effective row channel h_eff = h_ru Theta h_br, then matched precoder
        let mut h_eff = vec![Complex64::new(0.0, 0.0); nb];
        for i in 0..m {
            let c = h_ru.get(0, i) * Complex64::from_polar(1.0, thetas[i]);
            let row = h_br.row_slice(i);
            for (e, &b) in h_eff.iter_mut().zip(row) {
                *e += c * b;
            }
        }
        let norm = h_eff.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for (wi, e) in w.iter_mut().zip(&h_eff) {
            *wi = e.conj() / norm;
        }
        // |h_eff w| = ||h_eff|| for the matched precoder
        let rate = rate_bps(q_hz, p_mw * norm * norm / sigma2_mw);
        let done = trace
            .last()
            .is_some_and(|&last| rate - last < tol * last.abs().max(f64::MIN_POSITIVE));
        trace.push(rate);
        if done {
            converged = true;
            break;
        }
    }

    let precoder = ComplexMatrix::column(&w);
    let phases = PhaseConfig::new(thetas);
    let rate = ris::ris_rate(h_br, h_ru, &phases, &precoder, p_mw, sigma2_mw, q_hz)?;
    Ok(AoResult {
        precoder,
        phases,
        rate_bps: rate,
        trace,
        converged,
    })
}

/// Codebook-search outcome.
#[derive(Debug, Clone)]
pub struct CodebookResult {
    /// N_b x 1 unit-norm transmit precoder, matched to the winning codeword.
    pub precoder: ComplexMatrix,
    pub best_index: usize,
    /// Winning effective-channel power `||h_ru diag(v) h_br||^2`.
    pub best_score: f64,
    pub rate_bps: f64,
}

/// Scores every codeword by received power and matches the precoder to the
/// winner. Ties break toward the lowest index.
pub fn codebook_optimize(
    h_br: &ComplexMatrix,
    h_ru: &ComplexMatrix,
    codebook: &Codebook,
    p_mw: f64,
    sigma2_mw: f64,
    q_hz: f64,
) -> Result<CodebookResult> {
    check_ris_dims(h_br, h_ru, "codebook_optimize")?;
    let m = h_br.rows();
    if codebook.size() != m {
        return Err(SimError::DimensionMismatch {
            context: "codebook_optimize",
            expected: format!("codebook of size {m}"),
            found: format!("{}", codebook.size()),
        });
    }
    let nb = h_br.cols();

    let effective_row = |v: &[Complex64]| -> Vec<Complex64> {
        let mut h_eff = vec![Complex64::new(0.0, 0.0); nb];
        for i in 0..m {
            let c = h_ru.get(0, i) * v[i];
            let row = h_br.row_slice(i);
            for (e, &b) in h_eff.iter_mut().zip(row) {
                *e += c * b;
            }
        }
        h_eff
    };

    let mut best_index = 0usize;
    let mut best_score = f64::NEG_INFINITY;
    for (i, v) in codebook.vectors().iter().enumerate() {
        let h_eff = effective_row(v);
        let score: f64 = h_eff.iter().map(|z| z.norm_sqr()).sum();
        if score > best_score {
            best_score = score;
            best_index = i;
        }
    }

    let h_best = effective_row(codebook.vector(best_index));
    let norm = h_best.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(SimError::ZeroMatrix { context: "codebook_optimize" });
    }
    let w: Vec<Complex64> = h_best.iter().map(|z| z.conj() / norm).collect();
    let precoder = ComplexMatrix::column(&w);
    let phases = PhaseConfig::from_codeword(codebook.vector(best_index));
    let rate = ris::ris_rate(h_br, h_ru, &phases, &precoder, p_mw, sigma2_mw, q_hz)?;
    Ok(CodebookResult {
        precoder,
        best_index,
        best_score,
        rate_bps: rate,
    })
}
