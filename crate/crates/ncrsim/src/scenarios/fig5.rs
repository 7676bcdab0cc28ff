//! Blockage-bypass study: a UE track behind a wall, with and without the
//! repeater.
//!
//! Per-trial channel randomness is drawn once and re-realized at every UE
//! position, so each trial's curve is smooth in the position except at
//! blockage boundaries, where the path-loss model switches.

use crate::beamforming::svd_beam_pair;
use crate::channel::{realize_channel, ChannelDraw};
use crate::config::{ScenarioKind, SystemParams};
use crate::error::Result;
use crate::geometry::{link_blocked, Position, Wall};
use crate::ncr::{ncr_link_budget, rate_bps, NcrParams};
use crate::rng::substream;
use crate::units::dbm_to_mw;

use super::{
    aggregate_records, run_trials, sinr_db, Method, Scene, ScenarioOutput, TrialRecord,
    DEFAULT_NCR_MAX_OUT_DBM,
};

pub const FIG5_BS: Position = Position { x: 0.0, y: 0.0 };
pub const FIG5_NCR: Position = Position { x: 40.0, y: 20.0 };
pub const FIG5_WALL_A: Position = Position { x: 40.0, y: 40.0 };
pub const FIG5_WALL_B: Position = Position { x: -10.0, y: 10.0 };
/// UE track x-coordinate; the sweep moves the UE parallel to the y-axis.
pub const FIG5_UE_X: f64 = 60.0;

pub const DEFAULT_Y_GRID: [f64; 11] = [
    0.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0, 100.0,
];

pub fn fig5_scene() -> Scene {
    Scene {
        bs: vec![FIG5_BS],
        ncr: vec![FIG5_NCR],
        ris: vec![],
        ue: vec![Position::new(FIG5_UE_X, 0.0)],
        walls: vec![Wall { a: FIG5_WALL_A, b: FIG5_WALL_B }],
    }
}

pub fn run_fig5(
    params: &SystemParams,
    seed: u64,
    trials: usize,
    y_grid: Option<&[f64]>,
) -> Result<ScenarioOutput> {
    params.validate()?;
    let grid: Vec<f64> = y_grid
        .map(|g| g.to_vec())
        .unwrap_or_else(|| DEFAULT_Y_GRID.to_vec());
    let scenario = ScenarioKind::Fig5;
    let fc = params.carrier_freq_ghz;
    let l = params.n_paths;
    let nb = params.n_bs_antennas;
    let nn = params.n_ncr_antennas_per_side;
    let q = params.bandwidth_hz;
    let sigma2 = params.noise_power_mw();
    let p = dbm_to_mw(params.bs_power_dbm)?;
    let p_hat_dbm = params.ncr_max_out_dbm.unwrap_or(DEFAULT_NCR_MAX_OUT_DBM);
    let ncr = NcrParams::new(params.ncr_gain_db, Some(p_hat_dbm), sigma2)?;
    let direct_gain = params.bs_gain_dbi + params.ue_gain_dbi;
    let walls = fig5_scene().walls;

    struct Fig5Point {
        rate_direct: f64,
        snr_direct: f64,
        rate_ncr: f64,
        snr_ncr: f64,
    }

    let per_trial: Vec<Vec<Fig5Point>> = run_trials(trials, |t| {
        let mut rng = substream(seed, &[scenario.tag(), t as u64]);
        let d_dir = ChannelDraw::sample(l, &mut rng);
        let d_bn = ChannelDraw::sample(l, &mut rng);
        let d_nu = ChannelDraw::sample(l, &mut rng);

        grid.iter()
            .map(|&y0| {
                let ue = Position::new(FIG5_UE_X, y0);
                let bl_dir = link_blocked(FIG5_BS, ue, &walls);
                let bl_bn = link_blocked(FIG5_BS, FIG5_NCR, &walls);
                let bl_nu = link_blocked(FIG5_NCR, ue, &walls);

                let h_dir = realize_channel(&d_dir, FIG5_BS, ue, nb, 1, fc, bl_dir, direct_gain)
                    .expect("valid geometry");
                let pair = svd_beam_pair(&h_dir.matrix).expect("nonzero");
                let g_dir = crate::ncr::effective_gain(&h_dir.matrix, &pair).expect("dims");
                let snr_direct = p * g_dir / sigma2;

                let h_bn = realize_channel(&d_bn, FIG5_BS, FIG5_NCR, nb, nn, fc, bl_bn, 0.0)
                    .expect("valid geometry");
                let h_nu = realize_channel(&d_nu, FIG5_NCR, ue, nn, 1, fc, bl_nu, 0.0)
                    .expect("valid geometry");
                let pair_bn = svd_beam_pair(&h_bn.matrix).expect("nonzero");
                let pair_nu = svd_beam_pair(&h_nu.matrix).expect("nonzero");
                let gbn = crate::ncr::effective_gain(&h_bn.matrix, &pair_bn).expect("dims");
                let gnu = crate::ncr::effective_gain(&h_nu.matrix, &pair_nu).expect("dims");
                let budget = ncr_link_budget(p, &ncr, gbn, gnu, sigma2, q);

                Fig5Point {
                    rate_direct: rate_bps(q, snr_direct),
                    snr_direct,
                    rate_ncr: budget.rate_bps,
                    snr_ncr: budget.snr,
                }
            })
            .collect()
    });

    let mut raw = Vec::with_capacity(grid.len() * trials * 2);
    for (yi, &y0) in grid.iter().enumerate() {
        for (t, points) in per_trial.iter().enumerate() {
            let pt = &points[yi];
            raw.push(TrialRecord {
                scenario,
                sweep_value: y0,
                method: Method::DirectOnly,
                curve: Method::DirectOnly.name().to_string(),
                trial_index: t,
                rate_bps: pt.rate_direct,
                sinr_db: sinr_db(pt.snr_direct),
            });
            raw.push(TrialRecord {
                scenario,
                sweep_value: y0,
                method: Method::NcrClamped,
                curve: "ncr_path".to_string(),
                trial_index: t,
                rate_bps: pt.rate_ncr,
                sinr_db: sinr_db(pt.snr_ncr),
            });
        }
    }

    let aggregates = aggregate_records(&raw, trials);
    Ok(ScenarioOutput { scenario, aggregates, raw })
}

/// True iff the direct BS-UE link is blocked at track position `y0`.
pub fn fig5_direct_blocked(y0: f64) -> bool {
    let walls = fig5_scene().walls;
    link_blocked(FIG5_BS, Position::new(FIG5_UE_X, y0), &walls)
}
