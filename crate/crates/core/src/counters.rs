//! Thread-local work counters.
//!
//! The solvers report work in machine-independent units so that complexity
//! claims can be tested without timing anything. Counters are per thread;
//! call [`reset`] before a measured region and [`snapshot`] after it.

use std::cell::Cell;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    /// Edge relaxations performed by every propagation-style loop.
    pub relaxations: u64,
    pub locate_calls: u64,
    pub kcycle_calls: u64,
    /// Auxiliary cells currently held by tracked scratch buffers.
    pub aux_cells: u64,
    /// High-water mark of `aux_cells` since the last reset.
    pub peak_aux_cells: u64,
}

thread_local! {
    static COUNTERS: Cell<Counters> = Cell::new(Counters::default());
}

fn update(f: impl FnOnce(&mut Counters)) {
    COUNTERS.with(|c| {
        let mut v = c.get();
        f(&mut v);
        c.set(v);
    });
}

pub fn snapshot() -> Counters {
    COUNTERS.with(|c| c.get())
}

/// Zeroes every counter. Live [`AuxGuard`]s keep their cells accounted.
pub fn reset() {
    update(|c| {
        let live = c.aux_cells;
        *c = Counters { aux_cells: live, peak_aux_cells: live, ..Counters::default() };
    });
}

/// Restarts peak tracking from the current level.
pub fn reset_peak() {
    update(|c| c.peak_aux_cells = c.aux_cells);
}

pub fn add_relaxations(n: u64) {
    update(|c| c.relaxations += n);
}

pub fn inc_locate() {
    update(|c| c.locate_calls += 1);
}

pub fn inc_kcycle() {
    update(|c| c.kcycle_calls += 1);
}

/// Accounts `cells` auxiliary cells until dropped.
#[must_use]
pub struct AuxGuard(u64);

impl AuxGuard {
    pub fn new(cells: usize) -> Self {
        let cells = cells as u64;
        update(|c| {
            c.aux_cells += cells;
            c.peak_aux_cells = c.peak_aux_cells.max(c.aux_cells);
        });
        AuxGuard(cells)
    }
}

impl Drop for AuxGuard {
    fn drop(&mut self) {
        let cells = self.0;
        update(|c| c.aux_cells -= cells);
    }
}
