//! SplitMix64, used for all seeded input generation and spot-checks so that
//! records can be regenerated from a seed alone.

use crate::field::{FieldCtx, FieldMatrix, FieldVec};

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform-ish value in `[0, bound)`; modulo bias is negligible for the
    /// bounds used here.
    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }

    pub fn element(&mut self, ctx: &FieldCtx) -> u8 {
        self.below(ctx.p() as u64) as u8
    }

    pub fn elements(&mut self, ctx: &FieldCtx, len: usize) -> Vec<u8> {
        (0..len).map(|_| self.element(ctx)).collect()
    }

    pub fn field_vec(&mut self, ctx: &FieldCtx, len: usize) -> FieldVec {
        FieldVec::new(ctx, self.elements(ctx, len)).expect("reduced by construction")
    }

    pub fn field_matrix(&mut self, ctx: &FieldCtx, rows: usize, cols: usize) -> FieldMatrix {
        FieldMatrix::new(ctx, rows, cols, self.elements(ctx, rows * cols))
            .expect("reduced by construction")
    }
}

/// Derives an independent stream seed from a base seed and cell coordinates.
pub fn mix_seed(base: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(base, |acc, &x| {
        SplitMix64::new(acc ^ x.wrapping_mul(0x9E37_79B9_7F4A_7C15)).next_u64()
    })
}
