//! Precomputed lookup tables for `M^{(x)k} v` over every `v` in F_p^K.
//!
//! Entries live in one dense array indexed by the packed key of the input
//! vector. The fill walks keys in order and derives each entry from an
//! earlier one by linearity, `T[v + e_i] = T[v] + column_i`, which costs `K`
//! additions per entry.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::sync::Arc;

use crate::cost::CostSink;
use crate::error::{Error, Result};
use crate::field::{pack_unchecked, unpack_into, FieldCtx, FieldMatrix, FieldVec};
use crate::kron::kron_entry;
use crate::rng::SplitMix64;

/// Default memory cap for table builds: 256 MiB.
pub const DEFAULT_MEM_CAP: u64 = 256 << 20;

/// Number of random entries checked against the dense product after a build.
pub const SPOT_CHECKS: usize = 100;

const MAGIC: &[u8; 4] = b"FFTT";
const VERSION: u8 = 1;

#[derive(Clone, Debug)]
pub struct TransformTable {
    ctx: FieldCtx,
    base: FieldMatrix,
    k: u32,
    block_len: usize,
    values: Vec<u8>,
}

/// Bytes needed to store the table of `base^{(x)k}` over F_p, saturating at
/// `u64::MAX`.
pub fn table_bytes(p: u16, d: usize, k: u32) -> u64 {
    let block_len = match (d as u128).checked_pow(k) {
        Some(b) if b <= u32::MAX as u128 => b,
        _ => return u64::MAX,
    };
    let entries = match (p as u128).checked_pow(block_len as u32) {
        Some(e) => e,
        None => return u64::MAX,
    };
    entries
        .checked_mul(block_len)
        .and_then(|b| u64::try_from(b).ok())
        .unwrap_or(u64::MAX)
}

pub fn build_table(
    ctx: &FieldCtx,
    base: &FieldMatrix,
    k: u32,
    mem_cap: u64,
) -> Result<TransformTable> {
    TransformTable::build(ctx, base, k, mem_cap)
}

impl TransformTable {
    pub fn build(ctx: &FieldCtx, base: &FieldMatrix, k: u32, mem_cap: u64) -> Result<Self> {
        let block_len = Self::check_shape(ctx, base, k, mem_cap)?;
        let p = ctx.p() as usize;
        let entries = ctx.key_space(block_len).expect("bounded by mem cap") as usize;

        let columns: Vec<Vec<u8>> = (0..block_len)
            .map(|j| (0..block_len).map(|i| kron_entry(base, k, i, j)).collect())
            .collect();

        let mut values = vec![0u8; entries * block_len];
        let mut digits = vec![0usize; block_len];
        let mut radix_pow = vec![1usize; block_len];
        for i in 1..block_len {
            radix_pow[i] = radix_pow[i - 1] * p;
        }
        for key in 1..entries {
            // Increment the mixed-radix counter; `pos` is where the carry stops,
            // and every lower digit is now zero.
            let mut pos = 0;
            loop {
                digits[pos] += 1;
                if digits[pos] < p {
                    break;
                }
                digits[pos] = 0;
                pos += 1;
            }
            let prev = key - radix_pow[pos];
            let (done, rest) = values.split_at_mut(key * block_len);
            let src = &done[prev * block_len..(prev + 1) * block_len];
            for ((dst, &s), &c) in rest[..block_len].iter_mut().zip(src).zip(&columns[pos]) {
                *dst = ctx.add(s, c);
            }
        }

        let table = Self {
            ctx: ctx.clone(),
            base: base.clone(),
            k,
            block_len,
            values,
        };
        table.spot_check(SPOT_CHECKS, 0x5eed ^ k as u64)?;
        Ok(table)
    }

    fn check_shape(ctx: &FieldCtx, base: &FieldMatrix, k: u32, mem_cap: u64) -> Result<usize> {
        if !base.is_square() {
            return Err(Error::NonSquareBase {
                rows: base.rows(),
                cols: base.cols(),
            });
        }
        ctx.ensure_same(base.ctx())?;
        if k == 0 {
            return Err(Error::IncompatibleTable(
                "exponent k must be at least 1".into(),
            ));
        }
        let required = table_bytes(ctx.p(), base.rows(), k);
        if required > mem_cap {
            return Err(Error::MemCapExceeded {
                required,
                cap: mem_cap,
            });
        }
        Ok(base.rows().pow(k))
    }

    /// Compares `count` random entries (or all of them, for small tables)
    /// against the dense product computed from the Kronecker entry formula.
    pub fn spot_check(&self, count: usize, seed: u64) -> Result<()> {
        let entries = self.len() as u64;
        let mut rng = SplitMix64::new(seed);
        let keys: Vec<u64> = if entries <= count as u64 {
            (0..entries).collect()
        } else {
            let mut keys: Vec<u64> = (0..count).map(|_| rng.below(entries)).collect();
            keys.push(0);
            keys.push(entries - 1);
            keys
        };
        let mut v = vec![0u8; self.block_len];
        for key in keys {
            unpack_into(&self.ctx, key, &mut v)?;
            let expected = self.dense_apply(&v);
            if expected != self.entry(key) {
                return Err(Error::SpotCheckFailed(format!(
                    "entry {key} is {:?}, dense product gives {:?}",
                    self.entry(key),
                    expected
                )));
            }
        }
        Ok(())
    }

    fn dense_apply(&self, v: &[u8]) -> Vec<u8> {
        let f = &self.ctx;
        (0..self.block_len)
            .map(|i| {
                v.iter().enumerate().fold(0u8, |acc, (j, &x)| {
                    f.add(acc, f.mul(kron_entry(&self.base, self.k, i, j), x))
                })
            })
            .collect()
    }

    /// Checks every entry against its predecessor under the linearity
    /// recurrence and all columns against the entry formula.
    fn verify_exhaustive(&self) -> Result<()> {
        let p = self.ctx.p() as u64;
        let block = self.block_len;
        if self.entry(0).iter().any(|&e| e != 0) {
            return Err(Error::SpotCheckFailed(
                "entry 0 is not the zero vector".into(),
            ));
        }
        let mut pow = 1u64;
        for i in 0..block {
            let col = self.entry(pow);
            for (r, &e) in col.iter().enumerate() {
                if e != kron_entry(&self.base, self.k, r, i) {
                    return Err(Error::SpotCheckFailed(format!(
                        "column {i} differs at row {r}"
                    )));
                }
            }
            pow = pow.saturating_mul(p);
        }
        let mut digits = vec![0u64; block];
        let mut radix_pow = vec![1u64; block];
        for i in 1..block {
            radix_pow[i] = radix_pow[i - 1] * p;
        }
        for key in 1..self.len() as u64 {
            let mut pos = 0;
            loop {
                digits[pos] += 1;
                if digits[pos] < p {
                    break;
                }
                digits[pos] = 0;
                pos += 1;
            }
            let prev = self.entry(key - radix_pow[pos]);
            let col = self.entry(radix_pow[pos]);
            let cur = self.entry(key);
            let ok = cur
                .iter()
                .zip(prev)
                .zip(col)
                .all(|((&c, &a), &b)| c == self.ctx.add(a, b));
            if !ok {
                return Err(Error::SpotCheckFailed(format!(
                    "entry {key} breaks linearity"
                )));
            }
        }
        Ok(())
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn base(&self) -> &FieldMatrix {
        &self.base
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Block length `K = d^k`.
    pub fn block_len(&self) -> usize {
        self.block_len
    }

    /// Number of entries, `p^K`.
    pub fn len(&self) -> usize {
        self.values.len() / self.block_len
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn size_bytes(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn entry(&self, key: u64) -> &[u8] {
        let start = key as usize * self.block_len;
        &self.values[start..start + self.block_len]
    }

    /// Key and value widths in bits charged per lookup.
    pub fn lookup_bits(&self) -> (u64, u64) {
        (
            self.ctx.key_bits(self.block_len),
            self.block_len as u64 * self.ctx.element_bits() as u64,
        )
    }

    pub fn lookup(&self, v: &FieldVec, sink: &mut impl CostSink) -> Result<FieldVec> {
        self.ctx.ensure_same(v.ctx())?;
        if v.len() != self.block_len {
            return Err(Error::LengthMismatch {
                expected: self.block_len,
                actual: v.len(),
            });
        }
        let key = pack_unchecked(self.ctx.p() as u64, v.as_slice());
        let (kb, vb) = self.lookup_bits();
        sink.lookups(1, kb, vb);
        Ok(FieldVec::from_raw(&self.ctx, self.entry(key).to_vec()))
    }

    /// Serializes as `FFTT`, version, `p`, `d`, `k` (little-endian u16) and
    /// then every entry in key order, one byte per element.
    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&[VERSION])?;
        w.write_all(&self.ctx.p().to_le_bytes())?;
        w.write_all(&(self.base.rows() as u16).to_le_bytes())?;
        w.write_all(&(self.k as u16).to_le_bytes())?;
        w.write_all(&self.values)?;
        Ok(())
    }

    /// Loads a table written by [`TransformTable::write_to`] for the given
    /// base matrix, rejecting it unless every entry verifies.
    pub fn read_from(mut r: impl Read, base: &FieldMatrix, mem_cap: u64) -> Result<Self> {
        let mut header = [0u8; 11];
        r.read_exact(&mut header)
            .map_err(|_| Error::Format("truncated table header".into()))?;
        if &header[..4] != MAGIC {
            return Err(Error::Format("bad table magic".into()));
        }
        if header[4] != VERSION {
            return Err(Error::Format(format!(
                "unsupported table version {}",
                header[4]
            )));
        }
        let p = u16::from_le_bytes([header[5], header[6]]);
        let d = u16::from_le_bytes([header[7], header[8]]) as usize;
        let k = u16::from_le_bytes([header[9], header[10]]) as u32;
        let ctx = base.ctx().clone();
        if p != ctx.p() {
            return Err(Error::FieldMismatch {
                expected: ctx.p(),
                actual: p,
            });
        }
        if d != base.rows() {
            return Err(Error::IncompatibleTable(format!(
                "table base is {d}x{d}, expected {}x{}",
                base.rows(),
                base.cols()
            )));
        }
        let block_len = Self::check_shape(&ctx, base, k, mem_cap)?;
        let expected = table_bytes(p, d, k) as usize;
        let mut values = Vec::with_capacity(expected);
        r.read_to_end(&mut values)?;
        if values.len() != expected {
            return Err(Error::Format(format!(
                "table body has {} bytes, expected {expected}",
                values.len()
            )));
        }
        if let Some(&bad) = values.iter().find(|&&e| e as u16 >= p) {
            return Err(Error::InvalidElement {
                value: bad as u64,
                p,
            });
        }
        let table = Self {
            ctx,
            base: base.clone(),
            k,
            block_len,
            values,
        };
        table.spot_check(SPOT_CHECKS, 0x10ad ^ k as u64)?;
        table.verify_exhaustive()?;
        Ok(table)
    }
}

/// Builds each `(p, base, k)` table at most once.
#[derive(Default)]
pub struct TableCache {
    tables: HashMap<(u16, usize, Vec<u8>, u32), Arc<TransformTable>>,
}

impl TableCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_build(
        &mut self,
        ctx: &FieldCtx,
        base: &FieldMatrix,
        k: u32,
        mem_cap: u64,
    ) -> Result<Arc<TransformTable>> {
        let key = (ctx.p(), base.rows(), base.as_slice().to_vec(), k);
        if let Some(t) = self.tables.get(&key) {
            return Ok(Arc::clone(t));
        }
        let table = Arc::new(TransformTable::build(ctx, base, k, mem_cap)?);
        self.tables.insert(key, Arc::clone(&table));
        Ok(table)
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }
}
