//! Elementary step counter shared by every engine.
//!
//! Counts letter comparisons and rewrite operations (letters inserted plus
//! letters removed). Counters are per thread so concurrent queries do not mix.

use std::cell::Cell;

thread_local! {
    static CMP: Cell<u64> = const { Cell::new(0) };
    static REWRITE: Cell<u64> = const { Cell::new(0) };
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepCount {
    pub comparisons: u64,
    pub rewrites: u64,
}

impl StepCount {
    pub fn total(&self) -> u64 {
        self.comparisons + self.rewrites
    }
}

#[inline]
pub fn cmp(n: u64) {
    CMP.with(|c| c.set(c.get() + n));
}

#[inline]
pub fn rewrite(n: u64) {
    REWRITE.with(|c| c.set(c.get() + n));
}

pub fn snapshot() -> StepCount {
    StepCount {
        comparisons: CMP.with(|c| c.get()),
        rewrites: REWRITE.with(|c| c.get()),
    }
}

pub fn reset() {
    CMP.with(|c| c.set(0));
    REWRITE.with(|c| c.set(0));
}

/// Runs `f` and returns its result with the steps it spent.
pub fn measure<T>(f: impl FnOnce() -> T) -> (T, StepCount) {
    let before = snapshot();
    let out = f();
    let after = snapshot();
    (
        out,
        StepCount {
            comparisons: after.comparisons - before.comparisons,
            rewrites: after.rewrites - before.rewrites,
        },
    )
}
