//! Operation counting for the matrix kernels.
//!
//! Kernels report closed-form multiply/add counts into a thread-local
//! counter, tagged with the phase that is active on the current thread.
//! [`measure`] runs a closure against a fresh counter and hands the result
//! back, so counts from concurrent trials never mix.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::AddAssign;

use serde::{Deserialize, Serialize};

/// Algorithm phase a count is attributed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Statistics,
    PatternDesign,
    ReductionApply,
    Detection,
    Evaluation,
    Other,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Phase::Statistics => "statistics",
            Phase::PatternDesign => "pattern_design",
            Phase::ReductionApply => "reduction_apply",
            Phase::Detection => "detection",
            Phase::Evaluation => "evaluation",
            Phase::Other => "other",
        };
        f.write_str(s)
    }
}

/// Multiply and add counts. Complex operations count once each.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCount {
    pub mults: u64,
    pub adds: u64,
}

impl OpCount {
    pub fn total(&self) -> u64 {
        self.mults + self.adds
    }
}

impl AddAssign for OpCount {
    fn add_assign(&mut self, rhs: Self) {
        self.mults += rhs.mults;
        self.adds += rhs.adds;
    }
}

/// Per-phase operation tallies.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlopCounter {
    phases: BTreeMap<Phase, OpCount>,
}

impl FlopCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, phase: Phase, mults: u64, adds: u64) {
        *self.phases.entry(phase).or_default() += OpCount { mults, adds };
    }

    pub fn phase(&self, phase: Phase) -> OpCount {
        self.phases.get(&phase).copied().unwrap_or_default()
    }

    pub fn total(&self) -> OpCount {
        let mut t = OpCount::default();
        for c in self.phases.values() {
            t += *c;
        }
        t
    }

    pub fn phases(&self) -> impl Iterator<Item = (Phase, OpCount)> + '_ {
        self.phases.iter().map(|(p, c)| (*p, *c))
    }

    pub fn merge(&mut self, other: &FlopCounter) {
        for (p, c) in other.phases() {
            *self.phases.entry(p).or_default() += c;
        }
    }
}

struct State {
    counter: FlopCounter,
    phase: Phase,
}

thread_local! {
    static STATE: RefCell<State> = RefCell::new(State { counter: FlopCounter::new(), phase: Phase::Other });
}

/// Adds counts to the active phase of this thread.
pub fn record(mults: u64, adds: u64) {
    STATE.with(|s| {
        let mut s = s.borrow_mut();
        let phase = s.phase;
        s.counter.record(phase, mults, adds);
    });
}

/// Runs `f` with `phase` as the active tag, restoring the previous one.
pub fn in_phase<T>(phase: Phase, f: impl FnOnce() -> T) -> T {
    let prev = STATE.with(|s| std::mem::replace(&mut s.borrow_mut().phase, phase));
    let out = f();
    STATE.with(|s| s.borrow_mut().phase = prev);
    out
}

/// Runs `f` against an empty counter and returns what it recorded.
///
/// Counts recorded inside are also added to the enclosing counter, so
/// nested measurements compose.
pub fn measure<T>(f: impl FnOnce() -> T) -> (T, FlopCounter) {
    let outer = STATE.with(|s| std::mem::take(&mut s.borrow_mut().counter));
    let out = f();
    let inner = STATE.with(|s| {
        let mut s = s.borrow_mut();
        let inner = std::mem::replace(&mut s.counter, outer);
        s.counter.merge(&inner);
        inner
    });
    (out, inner)
}

// Closed-form counts for the kernels in `linalg`.

/// `(p x q) * (q x r)` product.
pub fn matmul(p: usize, q: usize, r: usize) {
    let n = (p * q * r) as u64;
    record(n, n.saturating_sub((p * r) as u64));
}

/// Cholesky factorization of an `n x n` Hermitian matrix.
pub fn cholesky(n: usize) {
    let n = n as u64;
    record(n * n * n / 6 + n * n / 2, n * n * n / 6);
}

/// Two triangular solves with `n x n` factors for `k` right-hand sides.
pub fn chol_solve(n: usize, k: usize) {
    let (n, k) = (n as u64, k as u64);
    record(n * n * k, n * n * k);
}

/// Hermitian eigendecomposition; the usual `9 n^3` estimate for
/// tridiagonalization plus QL iterations with vectors.
pub fn hermitian_eig(n: usize) {
    let n = n as u64;
    record(9 * n * n * n / 2, 9 * n * n * n / 2);
}
