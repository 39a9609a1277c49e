//! Table-driven arithmetic over small prime fields.
//!
//! Elements are stored as `u8`, so the modulus is limited to `p <= 256`.
//! Every operation is a single index into a precomputed table.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest supported modulus.
pub const MAX_MODULUS: u32 = 256;

struct Tables {
    p: u16,
    add: Vec<u8>,
    sub: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
}

/// Handle to the arithmetic tables of F_p. Cloning is cheap.
#[derive(Clone)]
pub struct FieldCtx {
    tables: Arc<Tables>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p())
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p() == other.p()
    }
}

impl Eq for FieldCtx {}

fn is_prime(p: u32) -> bool {
    p >= 2
        && (2..)
            .take_while(|d| d * d <= p)
            .all(|d| !p.is_multiple_of(d))
}

/// Builds the context for F_p.
pub fn make_field(p: u32) -> Result<FieldCtx> {
    if p < 2 {
        return Err(Error::ModulusTooSmall(p));
    }
    if p > MAX_MODULUS {
        return Err(Error::ModulusTooLarge(p));
    }
    if !is_prime(p) {
        return Err(Error::CompositeModulus(p));
    }
    let n = p as usize;
    let mut add = vec![0u8; n * n];
    let mut sub = vec![0u8; n * n];
    let mut mul = vec![0u8; n * n];
    for a in 0..n {
        for b in 0..n {
            add[a * n + b] = ((a + b) % n) as u8;
            sub[a * n + b] = ((a + n - b) % n) as u8;
            mul[a * n + b] = ((a * b) % n) as u8;
        }
    }
    let neg = (0..n).map(|a| ((n - a) % n) as u8).collect();
    Ok(FieldCtx {
        tables: Arc::new(Tables {
            p: p as u16,
            add,
            sub,
            mul,
            neg,
        }),
    })
}

impl FieldCtx {
    pub fn new(p: u32) -> Result<Self> {
        make_field(p)
    }

    #[inline]
    pub fn p(&self) -> u16 {
        self.tables.p
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.tables.add[a as usize * self.tables.p as usize + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.tables.sub[a as usize * self.tables.p as usize + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.tables.mul[a as usize * self.tables.p as usize + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.tables.neg[a as usize]
    }

    /// Reduces a signed integer into `[0, p)`.
    pub fn reduce(&self, x: i64) -> u8 {
        x.rem_euclid(self.p() as i64) as u8
    }

    pub fn check(&self, e: u64) -> Result<u8> {
        if e < self.p() as u64 {
            Ok(e as u8)
        } else {
            Err(Error::InvalidElement {
                value: e,
                p: self.p(),
            })
        }
    }

    /// `ceil(log2 p)`: bits needed to store one element.
    pub fn element_bits(&self) -> u32 {
        ceil_log2(self.p() as u64)
    }

    /// `ceil(len * log2 p)`: bits of a packed key over `len` elements.
    pub fn key_bits(&self, len: usize) -> u64 {
        (len as f64 * (self.p() as f64).log2()).ceil() as u64
    }

    /// `p^len`, or `None` if it does not fit in 64 bits.
    pub fn key_space(&self, len: usize) -> Option<u64> {
        (self.p() as u64).checked_pow(u32::try_from(len).ok()?)
    }

    pub(crate) fn ensure_same(&self, other: &FieldCtx) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::FieldMismatch {
                expected: self.p(),
                actual: other.p(),
            })
        }
    }
}

pub(crate) fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// Dense vector over F_p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldVec {
    ctx: FieldCtx,
    data: Vec<u8>,
}

impl FieldVec {
    pub fn new(ctx: &FieldCtx, data: Vec<u8>) -> Result<Self> {
        for &e in &data {
            ctx.check(e as u64)?;
        }
        Ok(Self {
            ctx: ctx.clone(),
            data,
        })
    }

    pub fn zeros(ctx: &FieldCtx, len: usize) -> Self {
        Self {
            ctx: ctx.clone(),
            data: vec![0; len],
        }
    }

    pub fn from_i64(ctx: &FieldCtx, values: &[i64]) -> Self {
        Self {
            ctx: ctx.clone(),
            data: values.iter().map(|&x| ctx.reduce(x)).collect(),
        }
    }

    /// Elements are assumed reduced.
    pub(crate) fn from_raw(ctx: &FieldCtx, data: Vec<u8>) -> Self {
        debug_assert!(data.iter().all(|&e| (e as u16) < ctx.p()));
        Self {
            ctx: ctx.clone(),
            data,
        }
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<u8> {
        self.data
    }

    pub fn get(&self, i: usize) -> u8 {
        self.data[i]
    }

    pub fn scale(&self, a: u8) -> Self {
        let data = self.data.iter().map(|&e| self.ctx.mul(a, e)).collect();
        Self::from_raw(&self.ctx, data)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.ctx.ensure_same(&other.ctx)?;
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| self.ctx.add(a, b))
            .collect();
        Ok(Self::from_raw(&self.ctx, data))
    }
}

/// Dense row-major matrix over F_p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldMatrix {
    ctx: FieldCtx,
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl FieldMatrix {
    pub fn new(ctx: &FieldCtx, rows: usize, cols: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        for &e in &data {
            ctx.check(e as u64)?;
        }
        Ok(Self {
            ctx: ctx.clone(),
            rows,
            cols,
            data,
        })
    }

    pub(crate) fn from_raw(ctx: &FieldCtx, rows: usize, cols: usize, data: Vec<u8>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self {
            ctx: ctx.clone(),
            rows,
            cols,
            data,
        }
    }

    pub fn zeros(ctx: &FieldCtx, rows: usize, cols: usize) -> Self {
        Self::from_raw(ctx, rows, cols, vec![0; rows * cols])
    }

    pub fn identity(ctx: &FieldCtx, n: usize) -> Self {
        let mut m = Self::zeros(ctx, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from signed integer rows, reducing each entry mod p.
    pub fn from_rows(ctx: &FieldCtx, rows: &[&[i64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::LengthMismatch {
                expected: cols,
                actual: bad.len(),
            });
        }
        let data = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| ctx.reduce(x)))
            .collect();
        Ok(Self::from_raw(ctx, rows.len(), cols, data))
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, e: u8) -> Result<()> {
        let e = self.ctx.check(e as u64)?;
        self.data[r * self.cols + c] = e;
        Ok(())
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<u8> {
        self.data
    }

    pub fn scale(&self, a: u8) -> Self {
        let data = self.data.iter().map(|&e| self.ctx.mul(a, e)).collect();
        Self::from_raw(&self.ctx, self.rows, self.cols, data)
    }

    /// Dense matrix-vector product.
    pub fn mul_vec(&self, v: &[u8]) -> Result<Vec<u8>> {
        if v.len() != self.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                actual: v.len(),
            });
        }
        let f = &self.ctx;
        Ok((0..self.rows)
            .map(|r| {
                self.data[r * self.cols..(r + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .fold(0u8, |acc, (&m, &x)| f.add(acc, f.mul(m, x)))
            })
            .collect())
    }
}

/// Packs `v` into the mixed-radix integer `sum v[i] * p^i`.
pub fn pack_key(v: &FieldVec) -> Result<u64> {
    pack_slice(v.ctx(), v.as_slice())
}

pub(crate) fn pack_slice(ctx: &FieldCtx, v: &[u8]) -> Result<u64> {
    if ctx.key_space(v.len()).is_none() {
        return Err(Error::KeyOverflow {
            p: ctx.p(),
            len: v.len(),
        });
    }
    Ok(pack_unchecked(ctx.p() as u64, v))
}

#[inline]
pub(crate) fn pack_unchecked(p: u64, v: &[u8]) -> u64 {
    v.iter().rev().fold(0u64, |key, &e| key * p + e as u64)
}

/// Inverse of [`pack_key`].
pub fn unpack_key(key: u64, len: usize, ctx: &FieldCtx) -> Result<FieldVec> {
    let mut out = vec![0u8; len];
    unpack_into(ctx, key, &mut out)?;
    Ok(FieldVec::from_raw(ctx, out))
}

pub(crate) fn unpack_into(ctx: &FieldCtx, key: u64, out: &mut [u8]) -> Result<()> {
    let len = out.len();
    let in_range = match ctx.key_space(len) {
        Some(space) => key < space,
        // p^len exceeds 64 bits, so every u64 is in range.
        None => true,
    };
    if !in_range {
        return Err(Error::KeyOutOfRange {
            key,
            len,
            p: ctx.p(),
        });
    }
    let p = ctx.p() as u64;
    let mut rest = key;
    for e in out.iter_mut() {
        *e = (rest % p) as u8;
        rest /= p;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> FieldCtx {
        make_field(p).unwrap()
    }

    #[test]
    fn small_field_examples() {
        let f3 = f(3);
        assert_eq!(f3.add(1, 1), 2);
        assert_eq!(f3.sub(1, 1), 0);
        assert_eq!(f3.sub(0, 1), 2);
        let f2 = f(2);
        assert_eq!(f2.neg(1), 1);
    }

    #[test]
    fn rejects_bad_moduli() {
        assert!(matches!(make_field(4), Err(Error::CompositeModulus(4))));
        assert!(matches!(make_field(255), Err(Error::CompositeModulus(255))));
        assert!(matches!(make_field(257), Err(Error::ModulusTooLarge(257))));
        assert!(matches!(make_field(1), Err(Error::ModulusTooSmall(1))));
        assert!(make_field(251).is_ok());
    }

    #[test]
    fn tables_match_modular_arithmetic() {
        for p in [2u32, 3, 5, 7, 13, 251] {
            let ctx = f(p);
            let step = if p > 20 { 7 } else { 1 };
            for a in (0..p).step_by(step) {
                for b in (0..p).step_by(step) {
                    let (a8, b8) = (a as u8, b as u8);
                    assert_eq!(ctx.add(a8, b8) as u32, (a + b) % p);
                    assert_eq!(ctx.sub(a8, b8) as u32, (a + p - b) % p);
                    assert_eq!(ctx.mul(a8, b8) as u32, (a * b) % p);
                }
                assert_eq!(ctx.neg(a as u8) as u32, (p - a) % p);
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for p in [2u32, 3, 5, 7] {
            let ctx = f(p);
            let els: Vec<u8> = (0..p as u8).collect();
            for &a in &els {
                for &b in &els {
                    assert_eq!(ctx.add(a, b), ctx.add(b, a));
                    assert_eq!(ctx.mul(a, b), ctx.mul(b, a));
                    for &c in &els {
                        assert_eq!(ctx.add(ctx.add(a, b), c), ctx.add(a, ctx.add(b, c)));
                        assert_eq!(ctx.mul(ctx.mul(a, b), c), ctx.mul(a, ctx.mul(b, c)));
                        assert_eq!(
                            ctx.mul(a, ctx.add(b, c)),
                            ctx.add(ctx.mul(a, b), ctx.mul(a, c))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn pack_examples() {
        let f3 = f(3);
        assert_eq!(
            pack_key(&FieldVec::new(&f3, vec![1, 2]).unwrap()).unwrap(),
            7
        );
        let f2 = f(2);
        assert_eq!(pack_key(&FieldVec::zeros(&f2, 3)).unwrap(), 0);
        let f5 = f(5);
        assert_eq!(
            pack_key(&FieldVec::new(&f5, vec![4, 4, 4]).unwrap()).unwrap(),
            124
        );
    }

    #[test]
    fn unpack_examples() {
        let f3 = f(3);
        assert_eq!(unpack_key(7, 2, &f3).unwrap().as_slice(), &[1, 2]);
        let f2 = f(2);
        assert_eq!(unpack_key(5, 3, &f2).unwrap().as_slice(), &[1, 0, 1]);
        assert!(matches!(
            unpack_key(9, 2, &f3),
            Err(Error::KeyOutOfRange { key: 9, .. })
        ));
    }

    #[test]
    fn pack_overflow() {
        let f3 = f(3);
        assert!(pack_key(&FieldVec::zeros(&f3, 40)).is_ok());
        assert!(matches!(
            pack_key(&FieldVec::zeros(&f3, 41)),
            Err(Error::KeyOverflow { p: 3, len: 41 })
        ));
    }

    #[test]
    fn pack_roundtrip_exhaustive() {
        // Every key space with p^len <= 2^16.
        for (p, len) in [(3u32, 4usize), (2, 16), (5, 6), (7, 5), (251, 2)] {
            let ctx = f(p);
            let space = ctx.key_space(len).unwrap();
            assert!(space <= 1 << 16);
            for key in 0..space {
                let v = unpack_key(key, len, &ctx).unwrap();
                assert_eq!(pack_key(&v).unwrap(), key);
            }
        }
    }

    #[test]
    fn bit_widths() {
        assert_eq!(f(2).element_bits(), 1);
        assert_eq!(f(3).element_bits(), 2);
        assert_eq!(f(5).element_bits(), 3);
        assert_eq!(f(251).element_bits(), 8);
        assert_eq!(f(3).key_bits(4), 7);
        assert_eq!(f(2).key_bits(8), 8);
    }

    #[test]
    fn vec_rejects_unreduced() {
        let f3 = f(3);
        assert!(matches!(
            FieldVec::new(&f3, vec![0, 3]),
            Err(Error::InvalidElement { value: 3, p: 3 })
        ));
    }

    #[test]
    fn matrix_from_rows_reduces() {
        let f3 = f(3);
        let h = FieldMatrix::from_rows(&f3, &[&[1, 1], &[1, -1]]).unwrap();
        assert_eq!(h.as_slice(), &[1, 1, 1, 2]);
        assert_eq!(h.mul_vec(&[1, 1]).unwrap(), vec![2, 0]);
    }
}
