//! Field-operation instrumentation.
//!
//! Walk code is generic over [`OpCounter`]; the unit type `()` counts nothing
//! and compiles away, [`OpTally`] records every operation.

/// Sink for field-operation events.
pub trait OpCounter {
    fn add(&mut self, count: u64);
    fn sub(&mut self, count: u64);
    fn mul(&mut self, count: u64);
    /// A standalone reduction modulo `Q` (of an unreduced input or result).
    fn reduce(&mut self, count: u64);
}

impl OpCounter for () {
    #[inline(always)]
    fn add(&mut self, _: u64) {}
    #[inline(always)]
    fn sub(&mut self, _: u64) {}
    #[inline(always)]
    fn mul(&mut self, _: u64) {}
    #[inline(always)]
    fn reduce(&mut self, _: u64) {}
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpTally {
    pub adds: u64,
    pub subs: u64,
    pub muls: u64,
    pub reductions: u64,
}

impl OpTally {
    pub fn total(&self) -> u64 {
        self.adds + self.subs + self.muls + self.reductions
    }
}

impl OpCounter for OpTally {
    fn add(&mut self, count: u64) {
        self.adds += count;
    }
    fn sub(&mut self, count: u64) {
        self.subs += count;
    }
    fn mul(&mut self, count: u64) {
        self.muls += count;
    }
    fn reduce(&mut self, count: u64) {
        self.reductions += count;
    }
}
