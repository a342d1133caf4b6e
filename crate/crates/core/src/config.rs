//! Scenario parameters shared by every stage of the simulator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Transmit symbol alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modulation {
    /// Gray-mapped QPSK with points `(±1 ± j)/√2`.
    Qpsk,
    /// Unit-variance circular complex Gaussian symbols.
    Gaussian,
}

/// All scalar parameters of one uplink scenario.
///
/// `m_init` is the initial oversampling factor (samples per symbol period
/// taken by the 1-bit ADCs) and `m_proc` the rate kept after dimension
/// reduction. Times are in seconds; the default symbol period is 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SystemConfig {
    pub n_users: usize,
    pub n_rx: usize,
    pub block_len: usize,
    pub m_init: usize,
    pub m_proc: usize,
    pub symbol_period: f64,
    pub rolloff: f64,
    pub noise_var: f64,
    pub window_len: usize,
    pub n_submatrices: usize,
    pub search_range: usize,
    pub delay_dist_halfwidth: f64,
    pub rng_seed: u64,
    /// Offset of the second selected sample in a Nyquist interval of the
    /// quasi-uniform initial pattern. `None` picks `ceil(M / M')`.
    pub pattern_alpha: Option<usize>,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            n_users: 4,
            n_rx: 16,
            block_len: 4,
            m_init: 3,
            m_proc: 2,
            symbol_period: 1.0,
            rolloff: 0.8,
            noise_var: 0.4,
            window_len: 4,
            n_submatrices: 8,
            search_range: 5,
            delay_dist_halfwidth: 1.0,
            rng_seed: 1,
            pattern_alpha: None,
        }
    }
}

impl SystemConfig {
    /// Checks the scalar invariants that do not depend on the reduction
    /// granularity.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("n_users", self.n_users),
            ("n_rx", self.n_rx),
            ("block_len", self.block_len),
            ("m_init", self.m_init),
            ("m_proc", self.m_proc),
            ("window_len", self.window_len),
            ("n_submatrices", self.n_submatrices),
            ("search_range", self.search_range),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        if self.m_proc > self.m_init {
            return Err(Error::Config(format!(
                "m_proc ({}) exceeds m_init ({})",
                self.m_proc, self.m_init
            )));
        }
        if self.n_rx < self.n_users {
            return Err(Error::Config(format!(
                "n_rx ({}) smaller than n_users ({})",
                self.n_rx, self.n_users
            )));
        }
        if !(0.0..=1.0).contains(&self.rolloff) {
            return Err(Error::Config(format!(
                "rolloff {} outside [0, 1]",
                self.rolloff
            )));
        }
        if !(self.symbol_period > 0.0) {
            return Err(Error::Config("symbol_period must be positive".into()));
        }
        if !(self.noise_var > 0.0) || !self.noise_var.is_finite() {
            return Err(Error::Config(format!(
                "noise_var {} must be positive",
                self.noise_var
            )));
        }
        if !(self.delay_dist_halfwidth >= 0.0) {
            return Err(Error::Config(
                "delay_dist_halfwidth must be non-negative".into(),
            ));
        }
        if let Some(alpha) = self.pattern_alpha {
            if alpha == 0 || alpha >= self.m_init {
                return Err(Error::Config(format!(
                    "pattern_alpha {alpha} must lie in 1..{}",
                    self.m_init
                )));
            }
        }
        Ok(())
    }

    /// Checks that `n_submatrices` splits a reduction over `n_symbols`
    /// symbols into equal blocks on both the input and output side.
    pub fn validate_partition(&self, n_symbols: usize) -> Result<()> {
        let k = self.n_submatrices;
        let rows = self.m_proc * n_symbols * self.n_rx;
        let cols = self.m_init * n_symbols * self.n_rx;
        if !rows.is_multiple_of(k) || !cols.is_multiple_of(k) {
            return Err(Error::Config(format!(
                "n_submatrices {k} must divide both {rows} and {cols}"
            )));
        }
        Ok(())
    }

    /// Full validation for a block of `block_len` symbols processed in
    /// windows of `window_len`.
    pub fn validate_windows(&self) -> Result<()> {
        if !self.block_len.is_multiple_of(self.window_len) {
            return Err(Error::Config(format!(
                "block_len {} is not a multiple of window_len {}",
                self.block_len, self.window_len
            )));
        }
        Ok(())
    }

    /// Copy with a different oversampling pair.
    pub fn with_rates(&self, m_init: usize, m_proc: usize) -> Self {
        Self {
            m_init,
            m_proc,
            ..self.clone()
        }
    }

    /// Sample spacing `T / M` at the initial rate.
    pub fn sample_spacing(&self) -> f64 {
        self.symbol_period / self.m_init as f64
    }
}

/// Noise variance for a given SNR, with SNR = 10 log10(N_t / σ²).
pub fn noise_var_from_snr_db(n_users: usize, snr_db: f64) -> f64 {
    n_users as f64 * 10f64.powf(-snr_db / 10.0)
}
