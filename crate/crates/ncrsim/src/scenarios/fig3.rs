//! Single-link study: UE rate vs BS transmit power.
//!
//! One BS, one co-located repeater/surface site, one UE. Six curves:
//! unclamped repeater at 90 and 100 dB gain, output-capped repeater, surface
//! with alternating optimization, surface with DFT codebook search, and the
//! closed-form hardware-impaired surface rate.

use crate::beamforming::{
    ao_optimize, codebook_optimize, dft_codebook, svd_beam_pair, AO_DEFAULT_MAX_ITER,
    AO_DEFAULT_TOL,
};
use crate::channel::{path_loss_los_db, realize_channel, ChannelDraw};
use crate::config::{ScenarioKind, SystemParams};
use crate::error::Result;
use crate::geometry::{distance, Position};
use crate::ncr::{ncr_effective_amplification, ncr_snr, rate_bps, NcrParams};
use crate::ris::{hwi_rate, ris_effective_power, HwiLinkStats};
use crate::rng::substream;
use crate::units::{db_lin, dbm_to_mw};

use super::{
    aggregate_records, run_trials, sinr_db, Method, Scene, ScenarioOutput, TrialRecord,
    DEFAULT_NCR_MAX_OUT_DBM,
};

pub const FIG3_BS: Position = Position { x: 140.0, y: 50.0 };
pub const FIG3_NODE: Position = Position { x: 0.0, y: 0.0 };
pub const FIG3_UE: Position = Position { x: 100.0, y: 0.0 };

pub const DEFAULT_POWER_GRID_DBM: [f64; 7] = [20.0, 25.0, 30.0, 35.0, 40.0, 45.0, 50.0];

/// Fixed gain settings for the unclamped repeater curves.
const UNCLAMPED_GAINS_DB: [f64; 2] = [90.0, 100.0];

struct Fig3Trial {
    gamma_bn: f64,
    gamma_nu: f64,
    /// `|h_ru Theta h_br w|^2` after alternating optimization.
    v_ao: f64,
    /// Same, for the best DFT codeword.
    v_dft: f64,
}

pub fn fig3_scene() -> Scene {
    Scene {
        bs: vec![FIG3_BS],
        ncr: vec![FIG3_NODE],
        ris: vec![FIG3_NODE],
        ue: vec![FIG3_UE],
        walls: vec![],
    }
}

pub fn run_fig3(
    params: &SystemParams,
    seed: u64,
    trials: usize,
    power_grid_dbm: Option<&[f64]>,
) -> Result<ScenarioOutput> {
    params.validate()?;
    let grid: Vec<f64> = power_grid_dbm
        .map(|g| g.to_vec())
        .unwrap_or_else(|| DEFAULT_POWER_GRID_DBM.to_vec());
    let scenario = ScenarioKind::Fig3;
    let fc = params.carrier_freq_ghz;
    let l = params.n_paths;
    let nb = params.n_bs_antennas;
    let nn = params.n_ncr_antennas_per_side;
    let m = params.n_ris_elements;
    let q = params.bandwidth_hz;
    let sigma2 = params.noise_power_mw();
    let ris_br_gain = params.bs_gain_dbi + params.node_gain_dbi;
    let ris_ru_gain = params.node_gain_dbi + params.ue_gain_dbi;
    let p_hat_dbm = params.ncr_max_out_dbm.unwrap_or(DEFAULT_NCR_MAX_OUT_DBM);
    let clamped = NcrParams::new(params.ncr_gain_db, Some(p_hat_dbm), sigma2)?;

    let codebook = dft_codebook(m)?;
    // beams are optimized once per realization at the top sweep power and
    // reused across the sweep; adaptation does not depend on transmit power
    let p_ref = dbm_to_mw(grid.iter().copied().fold(f64::NEG_INFINITY, f64::max))?;

    let per_trial: Vec<Fig3Trial> = run_trials(trials, |t| {
        let mut rng = substream(seed, &[scenario.tag(), t as u64]);
        let d_bn = ChannelDraw::sample(l, &mut rng);
        let d_nu = ChannelDraw::sample(l, &mut rng);
        let d_br = ChannelDraw::sample(l, &mut rng);
        let d_ru = ChannelDraw::sample(l, &mut rng);

        // repeater links: port-to-port budget (no dBi folding)
        let h_bn = realize_channel(&d_bn, FIG3_BS, FIG3_NODE, nb, nn, fc, false, 0.0)
            .expect("valid geometry");
        let h_nu = realize_channel(&d_nu, FIG3_NODE, FIG3_UE, nn, 1, fc, false, 0.0)
            .expect("valid geometry");
        let pair_bn = svd_beam_pair(&h_bn.matrix).expect("nonzero channel");
        let pair_nu = svd_beam_pair(&h_nu.matrix).expect("nonzero channel");
        let gamma_bn = crate::ncr::effective_gain(&h_bn.matrix, &pair_bn).expect("dims");
        let gamma_nu = crate::ncr::effective_gain(&h_nu.matrix, &pair_nu).expect("dims");

        // surface links fold the endpoint dBi gains
        let h_br = realize_channel(&d_br, FIG3_BS, FIG3_NODE, nb, m, fc, false, ris_br_gain)
            .expect("valid geometry");
        let h_ru = realize_channel(&d_ru, FIG3_NODE, FIG3_UE, m, 1, fc, false, ris_ru_gain)
            .expect("valid geometry");

        let ao = ao_optimize(
            &h_br.matrix,
            &h_ru.matrix,
            p_ref,
            sigma2,
            q,
            AO_DEFAULT_TOL,
            AO_DEFAULT_MAX_ITER,
        )
        .expect("nonzero channels");
        let v_ao = ris_effective_power(&h_br.matrix, &h_ru.matrix, &ao.phases, &ao.precoder)
            .expect("dims");
        let cb = codebook_optimize(&h_br.matrix, &h_ru.matrix, &codebook, p_ref, sigma2, q)
            .expect("dims");

        Fig3Trial {
            gamma_bn,
            gamma_nu,
            v_ao,
            v_dft: cb.best_score,
        }
    });

    // hardware-impaired closed form: geometry-only, identical across trials
    let mu_br = db_lin(-(path_loss_los_db(distance(FIG3_BS, FIG3_NODE), fc)? - ris_br_gain));
    let mu_ru = db_lin(-(path_loss_los_db(distance(FIG3_NODE, FIG3_UE), fc)? - ris_ru_gain));
    let hwi_stats = HwiLinkStats {
        mu_br,
        mu_ru,
        mu_bu: 0.0,
        phi_bu: params.hwi.phi_bu,
        alpha: params.hwi.alpha,
        kappa_t: params.hwi.kappa_t,
        kappa_r: params.hwi.kappa_r,
        m,
    };

    let clamped_label = format!("ncr_clamped_g{:.0}", params.ncr_gain_db);
    let mut raw = Vec::with_capacity(grid.len() * trials * 6);
    for &p_dbm in &grid {
        let p = dbm_to_mw(p_dbm)?;
        let r_hwi = hwi_rate(&hwi_stats, p, sigma2, q)?;
        let hwi_sinr = (2f64.powf(r_hwi / q) - 1.0).max(0.0);
        for (t, tr) in per_trial.iter().enumerate() {
            for g_db in UNCLAMPED_GAINS_DB {
                let snr = ncr_snr(p, db_lin(g_db), tr.gamma_bn, tr.gamma_nu, sigma2, sigma2);
                raw.push(TrialRecord {
                    scenario,
                    sweep_value: p_dbm,
                    method: Method::NcrUnclamped,
                    curve: format!("ncr_unclamped_g{g_db:.0}"),
                    trial_index: t,
                    rate_bps: rate_bps(q, snr),
                    sinr_db: sinr_db(snr),
                });
            }
            let g_eff = ncr_effective_amplification(p, &clamped, tr.gamma_bn);
            let snr = ncr_snr(p, g_eff, tr.gamma_bn, tr.gamma_nu, sigma2, sigma2);
            raw.push(TrialRecord {
                scenario,
                sweep_value: p_dbm,
                method: Method::NcrClamped,
                curve: clamped_label.clone(),
                trial_index: t,
                rate_bps: rate_bps(q, snr),
                sinr_db: sinr_db(snr),
            });
            for (method, v) in [(Method::RisAo, tr.v_ao), (Method::RisDft, tr.v_dft)] {
                let snr = p * v / sigma2;
                raw.push(TrialRecord {
                    scenario,
                    sweep_value: p_dbm,
                    method,
                    curve: method.name().to_string(),
                    trial_index: t,
                    rate_bps: rate_bps(q, snr),
                    sinr_db: sinr_db(snr),
                });
            }
            raw.push(TrialRecord {
                scenario,
                sweep_value: p_dbm,
                method: Method::RisHwi,
                curve: Method::RisHwi.name().to_string(),
                trial_index: t,
                rate_bps: r_hwi,
                sinr_db: sinr_db(hwi_sinr),
            });
        }
    }

    let aggregates = aggregate_records(&raw, trials);
    Ok(ScenarioOutput { scenario, aggregates, raw })
}
