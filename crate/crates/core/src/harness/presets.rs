use serde::{Deserialize, Serialize};

use super::{Criterion, ExperimentSpec, Method, Sweep};
use crate::config::{Modulation, SystemConfig};
use crate::error::{Error, Result};
use crate::metrics::PowerModel;

/// Problem size of a preset.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    /// 16 receive antennas and 100 realizations.
    #[default]
    Desk,
    /// 64 receive antennas and 1000 realizations.
    Paper,
}

pub const PRESET_NAMES: [&str; 7] = [
    "fig-sumrate",
    "fig-nmse",
    "fig-ser",
    "fig-choiceK",
    "fig-choicebeta",
    "fig-convergence",
    "fig-power",
];

fn base(scale: Scale) -> (SystemConfig, usize) {
    let (n_rx, trials) = match scale {
        Scale::Desk => (16, 100),
        Scale::Paper => (64, 1000),
    };
    let cfg = SystemConfig {
        n_users: 4,
        n_rx,
        block_len: 4,
        m_init: 3,
        m_proc: 2,
        symbol_period: 1.0,
        rolloff: 0.8,
        window_len: 4,
        n_submatrices: 8,
        search_range: 5,
        delay_dist_halfwidth: 1.0,
        rng_seed: 1,
        ..Default::default()
    };
    (cfg, trials)
}

fn spec(
    name: &str,
    scale: Scale,
    criterion: Criterion,
    modulation: Modulation,
    system: SystemConfig,
    trials: usize,
    sweep: Sweep,
) -> ExperimentSpec {
    ExperimentSpec {
        scenario: name.to_string(),
        criterion,
        modulation,
        n_realizations: trials,
        scale,
        output: Some(format!("results/{name}.csv")),
        system,
        sweep,
        power: PowerModel::default(),
    }
}

/// Named figure recipe at the given scale.
pub fn preset(name: &str, scale: Scale) -> Result<ExperimentSpec> {
    use Method::*;
    let (cfg, trials) = base(scale);
    let paper = scale == Scale::Paper;
    let snr = vec![-5.0, 0.0, 5.0, 10.0, 15.0, 20.0];
    let out = match name {
        "fig-sumrate" => spec(
            name,
            scale,
            Criterion::SumRate,
            Modulation::Gaussian,
            cfg,
            trials,
            Sweep {
                snr_db: snr,
                m_init: vec![3, 4, 5, 6],
                algorithms: if paper {
                    vec![
                        Nyquist,
                        Uniform,
                        InitialPattern,
                        Gevd,
                        SlRgs,
                        SimplifiedBfs,
                        SimplifiedRgs,
                    ]
                } else {
                    vec![Nyquist, Uniform, InitialPattern, Gevd, SlRgs, SimplifiedRgs]
                },
                ..Default::default()
            },
        ),
        "fig-nmse" | "fig-ser" => spec(
            name,
            scale,
            Criterion::Mse,
            Modulation::Qpsk,
            SystemConfig {
                block_len: 100,
                ..cfg
            },
            trials,
            Sweep {
                snr_db: if name == "fig-ser" {
                    vec![0.0, 5.0, 10.0, 15.0]
                } else {
                    snr
                },
                m_init: vec![3],
                algorithms: vec![Nyquist, Uniform, Gevd, SlRgs, SimplifiedBfs, SimplifiedRgs],
                ..Default::default()
            },
        ),
        "fig-choiceK" => spec(
            name,
            scale,
            Criterion::SumRate,
            Modulation::Gaussian,
            cfg,
            trials,
            Sweep {
                snr_db: vec![10.0],
                m_init: vec![3],
                algorithms: vec![SimplifiedRgs],
                n_submatrices: if paper {
                    vec![1, 2, 4, 8, 16, 32, 64, 128]
                } else {
                    vec![1, 2, 4, 8, 16, 32]
                },
                ..Default::default()
            },
        ),
        "fig-choicebeta" => spec(
            name,
            scale,
            Criterion::SumRate,
            Modulation::Gaussian,
            cfg,
            trials,
            Sweep {
                snr_db: vec![10.0],
                m_init: vec![3],
                algorithms: vec![SimplifiedRgs],
                search_range: vec![1, 2, 3, 4, 5, 6, 8, 10],
                ..Default::default()
            },
        ),
        "fig-convergence" => spec(
            name,
            scale,
            Criterion::Convergence,
            Modulation::Gaussian,
            cfg,
            trials,
            Sweep {
                snr_db: vec![10.0],
                m_init: vec![3],
                algorithms: vec![SlRgs],
                ..Default::default()
            },
        ),
        "fig-power" => spec(
            name,
            scale,
            Criterion::Power,
            Modulation::Qpsk,
            SystemConfig { n_rx: 64, ..cfg },
            0,
            Sweep {
                snr_db: Vec::new(),
                m_init: (1..=6).collect(),
                algorithms: Vec::new(),
                bits: (1..=8).collect(),
                ..Default::default()
            },
        ),
        _ => {
            return Err(Error::Config(format!(
                "unknown preset {name:?}; known: {}",
                PRESET_NAMES.join(", ")
            )));
        }
    };
    Ok(out)
}

/// Every preset at the given scale.
pub fn preset_figures(scale: Scale) -> Vec<ExperimentSpec> {
    PRESET_NAMES
        .iter()
        .map(|n| preset(n, scale).expect("built-in preset"))
        .collect()
}
