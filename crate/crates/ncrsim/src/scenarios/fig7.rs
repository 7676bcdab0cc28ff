//! Two-cell interference study: the victim UE's rate vs the served UE's
//! angular position.
//!
//! Cell 1's repeater beam tracks its own UE around a circle; whatever leaks
//! through the repeater-to-victim channel is amplified interference at the
//! victim in cell 2. The no-interference baseline (repeater 1 disabled) is
//! emitted alongside each curve.

use std::f64::consts::PI;

use crate::beamforming::svd_beam_pair;
use crate::channel::{realize_channel, ChannelDraw};
use crate::config::{ScenarioKind, SystemParams};
use crate::error::Result;
use crate::geometry::Position;
use crate::ncr::{
    ncr_effective_amplification, ncr_forwarded_interference, rate_bps, NcrParams,
};
use crate::rng::substream;
use crate::units::dbm_to_mw;

use super::{
    aggregate_records, run_trials, sinr_db, Method, Scene, ScenarioOutput, TrialRecord,
    DEFAULT_NCR_MAX_OUT_DBM,
};

pub const FIG7_BS1: Position = Position { x: -50.0, y: 0.0 };
pub const FIG7_BS2: Position = Position { x: 250.0, y: 0.0 };
pub const FIG7_NCR1: Position = Position { x: 0.0, y: 20.0 };
pub const FIG7_NCR2: Position = Position { x: 200.0, y: 20.0 };
/// Served-UE circle radius around the origin, meters.
pub const FIG7_UE1_RADIUS: f64 = 80.0;

/// Victim positions, one per angular setting (as multiples of pi).
pub const FIG7_UE2: [(f64, Position); 3] = [
    (-0.4, Position { x: 160.0, y: -40.0 }),
    (-0.2, Position { x: 160.0, y: -20.0 }),
    (0.0, Position { x: 160.0, y: 20.0 }),
];

/// Default served-UE angle grid, as multiples of pi.
pub const DEFAULT_THETA1_GRID_PI: [f64; 21] = [
    -0.50, -0.45, -0.40, -0.35, -0.30, -0.25, -0.20, -0.15, -0.10, -0.05, 0.0, 0.05, 0.10,
    0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.50,
];

pub fn fig7_scene() -> Scene {
    Scene {
        bs: vec![FIG7_BS1, FIG7_BS2],
        ncr: vec![FIG7_NCR1, FIG7_NCR2],
        ris: vec![],
        ue: vec![
            Position::new(FIG7_UE1_RADIUS, 0.0),
            FIG7_UE2[0].1,
            FIG7_UE2[1].1,
            FIG7_UE2[2].1,
        ],
        walls: vec![],
    }
}

pub fn run_fig7(
    params: &SystemParams,
    seed: u64,
    trials: usize,
    theta1_grid_rad: Option<&[f64]>,
) -> Result<ScenarioOutput> {
    params.validate()?;
    let theta1: Vec<f64> = theta1_grid_rad
        .map(|g| g.to_vec())
        .unwrap_or_else(|| DEFAULT_THETA1_GRID_PI.iter().map(|t| t * PI).collect());
    let scenario = ScenarioKind::Fig7;
    let fc = params.carrier_freq_ghz;
    let l = params.n_paths;
    let nb = params.n_bs_antennas;
    let nn = params.n_ncr_antennas_per_side;
    let q = params.bandwidth_hz;
    let sigma2 = params.noise_power_mw();
    let p = dbm_to_mw(params.bs_power_dbm)?;
    let p_hat_dbm = params.ncr_max_out_dbm.unwrap_or(DEFAULT_NCR_MAX_OUT_DBM);
    let ncr = NcrParams::new(params.ncr_gain_db, Some(p_hat_dbm), sigma2)?;

    struct TrialOut {
        /// per (theta2 index, theta1 index): (with interference, baseline, sinr, sinr0)
        rates: Vec<Vec<(f64, f64, f64, f64)>>,
    }

    let per_trial: Vec<TrialOut> = run_trials(trials, |t| {
        let mut rng = substream(seed, &[scenario.tag(), t as u64]);
        let d_b1n1 = ChannelDraw::sample(l, &mut rng);
        let d_n1u1 = ChannelDraw::sample(l, &mut rng);
        let d_n1u2 = ChannelDraw::sample(l, &mut rng);
        let d_b2n2 = ChannelDraw::sample(l, &mut rng);
        let d_n2u2 = ChannelDraw::sample(l, &mut rng);

        // cell-1 backhaul is position-independent
        let h_b1n1 = realize_channel(&d_b1n1, FIG7_BS1, FIG7_NCR1, nb, nn, fc, false, 0.0)
            .expect("valid geometry");
        let pair_b1n1 = svd_beam_pair(&h_b1n1.matrix).expect("nonzero");
        let gbn1 = crate::ncr::effective_gain(&h_b1n1.matrix, &pair_b1n1).expect("dims");
        let g1_eff = ncr_effective_amplification(p, &ncr, gbn1);

        let rates = FIG7_UE2
            .iter()
            .map(|&(_, ue2)| {
                // victim's serving chain, independent of the served UE's angle
                let h_b2n2 = realize_channel(&d_b2n2, FIG7_BS2, FIG7_NCR2, nb, nn, fc, false, 0.0)
                    .expect("valid geometry");
                let h_n2u2 = realize_channel(&d_n2u2, FIG7_NCR2, ue2, nn, 1, fc, false, 0.0)
                    .expect("valid geometry");
                let pair_b2n2 = svd_beam_pair(&h_b2n2.matrix).expect("nonzero");
                let pair_n2u2 = svd_beam_pair(&h_n2u2.matrix).expect("nonzero");
                let gbn2 = crate::ncr::effective_gain(&h_b2n2.matrix, &pair_b2n2).expect("dims");
                let gnu2 = crate::ncr::effective_gain(&h_n2u2.matrix, &pair_n2u2).expect("dims");
                let g2_eff = ncr_effective_amplification(p, &ncr, gbn2);
                let signal = p * g2_eff * gbn2 * gnu2;
                let noise0 = sigma2 + sigma2 * g2_eff * gnu2;

                // leakage channel from repeater 1 toward this victim
                let h_n1u2 = realize_channel(&d_n1u2, FIG7_NCR1, ue2, nn, 1, fc, false, 0.0)
                    .expect("valid geometry");

                theta1
                    .iter()
                    .map(|&th| {
                        let ue1 = Position::new(
                            FIG7_UE1_RADIUS * th.cos(),
                            FIG7_UE1_RADIUS * th.sin(),
                        );
                        let h_n1u1 =
                            realize_channel(&d_n1u1, FIG7_NCR1, ue1, nn, 1, fc, false, 0.0)
                                .expect("valid geometry");
                        let beam = svd_beam_pair(&h_n1u1.matrix).expect("nonzero").tx;
                        let interference = ncr_forwarded_interference(
                            p,
                            g1_eff,
                            gbn1,
                            sigma2,
                            &h_n1u2.matrix,
                            &beam,
                            1.0,
                        )
                        .expect("dims");
                        let sinr = signal / (noise0 + interference);
                        let sinr0 = signal / noise0;
                        (rate_bps(q, sinr), rate_bps(q, sinr0), sinr, sinr0)
                    })
                    .collect()
            })
            .collect();
        TrialOut { rates }
    });

    let mut raw = Vec::with_capacity(theta1.len() * trials * FIG7_UE2.len() * 2);
    for (ci, &(t2_pi, _)) in FIG7_UE2.iter().enumerate() {
        let curve = format!("ue2_t2_{t2_pi:+.1}pi");
        let baseline = format!("{curve}_no_ncr1");
        for (ti, &th) in theta1.iter().enumerate() {
            for (t, out) in per_trial.iter().enumerate() {
                let (r_i, r_0, s_i, s_0) = out.rates[ci][ti];
                raw.push(TrialRecord {
                    scenario,
                    sweep_value: th,
                    method: Method::NcrClamped,
                    curve: curve.clone(),
                    trial_index: t,
                    rate_bps: r_i,
                    sinr_db: sinr_db(s_i),
                });
                raw.push(TrialRecord {
                    scenario,
                    sweep_value: th,
                    method: Method::NcrClamped,
                    curve: baseline.clone(),
                    trial_index: t,
                    rate_bps: r_0,
                    sinr_db: sinr_db(s_0),
                });
            }
        }
    }

    let aggregates = aggregate_records(&raw, trials);
    Ok(ScenarioOutput { scenario, aggregates, raw })
}
