//! Operation counters and the bit-operation cost functional.
//!
//! Convention: one field addition or multiplication over F_p costs
//! `ceil(log2 p)^2` bit operations; one table lookup costs its key bits plus
//! its value bits.

use std::ops::{Add, AddAssign};

use crate::field::ceil_log2;

/// Receiver for operation counts emitted by the engines.
///
/// Engines report in bulk (one call per level or block), so implementations
/// can afford to be simple.
pub trait CostSink {
    fn field_adds(&mut self, n: u64);
    fn field_muls(&mut self, n: u64);
    /// `count` lookups, each with the given key and value widths.
    fn lookups(&mut self, count: u64, key_bits: u64, value_bits: u64);
    /// One recursive call entered at `depth` (0 is the top level).
    fn call_at_depth(&mut self, _depth: usize) {}
}

/// Discards all counts.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoCost;

impl CostSink for NoCost {
    #[inline(always)]
    fn field_adds(&mut self, _: u64) {}
    #[inline(always)]
    fn field_muls(&mut self, _: u64) {}
    #[inline(always)]
    fn lookups(&mut self, _: u64, _: u64, _: u64) {}
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CostCounters {
    pub field_adds: u64,
    pub field_muls: u64,
    pub lookups: u64,
    pub lookup_key_bits: u64,
    pub lookup_value_bits: u64,
    pub wall_ns: u64,
    /// Recursive calls entered at each depth.
    pub calls_by_depth: Vec<u64>,
}

impl CostCounters {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn snapshot(&self) -> CostCounters {
        self.clone()
    }

    pub fn reset(&mut self) {
        *self = Self::default();
    }

    pub fn field_ops(&self) -> u64 {
        self.field_adds + self.field_muls
    }

    pub fn lookup_bits(&self) -> u64 {
        self.lookup_key_bits + self.lookup_value_bits
    }

    pub fn bitop_cost(&self, p: u16) -> u64 {
        bitop_cost(self, p)
    }
}

pub fn bitop_cost(c: &CostCounters, p: u16) -> u64 {
    let w = ceil_log2(p as u64) as u64;
    c.field_ops() * w * w + c.lookup_bits()
}

impl CostSink for CostCounters {
    #[inline]
    fn field_adds(&mut self, n: u64) {
        self.field_adds += n;
    }

    #[inline]
    fn field_muls(&mut self, n: u64) {
        self.field_muls += n;
    }

    #[inline]
    fn lookups(&mut self, count: u64, key_bits: u64, value_bits: u64) {
        self.lookups += count;
        self.lookup_key_bits += count * key_bits;
        self.lookup_value_bits += count * value_bits;
    }

    fn call_at_depth(&mut self, depth: usize) {
        if self.calls_by_depth.len() <= depth {
            self.calls_by_depth.resize(depth + 1, 0);
        }
        self.calls_by_depth[depth] += 1;
    }
}

impl AddAssign<&CostCounters> for CostCounters {
    fn add_assign(&mut self, rhs: &CostCounters) {
        self.field_adds += rhs.field_adds;
        self.field_muls += rhs.field_muls;
        self.lookups += rhs.lookups;
        self.lookup_key_bits += rhs.lookup_key_bits;
        self.lookup_value_bits += rhs.lookup_value_bits;
        self.wall_ns += rhs.wall_ns;
        if self.calls_by_depth.len() < rhs.calls_by_depth.len() {
            self.calls_by_depth.resize(rhs.calls_by_depth.len(), 0);
        }
        for (a, b) in self.calls_by_depth.iter_mut().zip(&rhs.calls_by_depth) {
            *a += b;
        }
    }
}

impl Add for CostCounters {
    type Output = CostCounters;

    fn add(mut self, rhs: CostCounters) -> CostCounters {
        self += &rhs;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cost_examples() {
        assert_eq!(CostCounters::new().bitop_cost(3), 0);

        let mut c = CostCounters::new();
        c.field_adds(10);
        assert_eq!(c.bitop_cost(2), 10);

        let mut c = CostCounters::new();
        c.lookups(1, 8, 8);
        assert_eq!(c.bitop_cost(3), 16);

        let mut c = CostCounters::new();
        c.field_muls(5);
        assert_eq!(c.bitop_cost(3), 20);
    }

    #[test]
    fn lifecycle() {
        let mut c = CostCounters::new();
        c.field_adds(4);
        c.call_at_depth(2);
        let snap = c.snapshot();
        c.field_adds(4);
        assert_eq!(snap.field_adds, 4);
        assert_eq!(c.field_adds, 8);
        assert_eq!(snap.calls_by_depth, vec![0, 0, 1]);
        c.reset();
        assert_eq!(c.snapshot(), CostCounters::default());
    }

    fn arb_counters() -> impl Strategy<Value = CostCounters> {
        (
            0u64..1 << 30,
            0u64..1 << 30,
            0u64..1 << 20,
            0u64..64,
            0u64..64,
        )
            .prop_map(|(a, m, l, kb, vb)| {
                let mut c = CostCounters::new();
                c.field_adds(a);
                c.field_muls(m);
                c.lookups(l, kb, vb);
                c
            })
    }

    proptest! {
        #[test]
        fn bitop_cost_is_additive(a in arb_counters(), b in arb_counters(), p in prop::sample::select(vec![2u16, 3, 5, 7, 251])) {
            let sum = a.clone() + b.clone();
            prop_assert_eq!(a.bitop_cost(p) + b.bitop_cost(p), sum.bitop_cost(p));
        }
    }
}
