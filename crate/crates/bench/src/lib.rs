//! Benchmark fixtures.

use dynovs::config::{Modulation, SystemConfig};
use dynovs::signal_model::{draw_realization, trial_rng, OversampledModel};
use dynovs::QuantizedStatistics;

/// Desk-scale window configuration: 4 users, 16 antennas, `M = 3`,
/// `M' = 2`, windows of 4 symbols, 8 submatrices and search range 5.
pub fn desk_config() -> SystemConfig {
    SystemConfig {
        n_users: 4,
        n_rx: 16,
        block_len: 100,
        window_len: 4,
        m_init: 3,
        m_proc: 2,
        n_submatrices: 8,
        search_range: 5,
        noise_var: 0.4,
        ..Default::default()
    }
}

/// Window model and its quantized statistics for one seeded realization.
pub fn window_fixture(cfg: &SystemConfig, seed: u64) -> (OversampledModel, QuantizedStatistics) {
    let r = draw_realization(cfg, Modulation::Qpsk, &mut trial_rng(seed, 0));
    let model =
        OversampledModel::build(cfg, &r.h_flat, &r.delays, cfg.window_len).expect("valid config");
    let stats = QuantizedStatistics::compute(&model, cfg.noise_var).expect("valid statistics");
    (model, stats)
}
