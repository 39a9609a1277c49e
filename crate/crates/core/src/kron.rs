//! Kronecker-power transforms `M^{(x)m} v`.
//!
//! Three routes are provided: a dense quadratic product built from the entry
//! formula, Yates' recursion (one `d x d` application per digit position),
//! and Yates' recursion over blocks of `k` digits where each `K = d^k` block
//! is resolved with one [`TransformTable`] lookup.
//!
//! Index convention: position `i` of a length-`d^m` vector has base-`d`
//! digits `i_0 .. i_{m-1}` (least significant first), and
//! `M^{(x)m}[i, j] = prod_s M[i_s, j_s]`.

use std::path::Path;

use crate::cost::CostSink;
use crate::error::{Error, Result};
use crate::field::{pack_unchecked, FieldCtx, FieldMatrix, FieldVec};
use crate::table::{table_bytes, TransformTable, DEFAULT_MEM_CAP};

/// Default largest length accepted by [`apply_naive`].
pub const NAIVE_GUARD: usize = 1 << 14;

/// `H_2 = [[1, 1], [1, -1]]`.
pub fn hadamard(ctx: &FieldCtx) -> FieldMatrix {
    FieldMatrix::from_rows(ctx, &[&[1, 1], &[1, -1]]).expect("2x2 literal")
}

/// `[[1, 1], [1, 0]]`, whose Kronecker powers evaluate multilinear
/// polynomials over F_2.
pub fn polyeval(ctx: &FieldCtx) -> FieldMatrix {
    FieldMatrix::from_rows(ctx, &[&[1, 1], &[1, 0]]).expect("2x2 literal")
}

/// Parses a base matrix: a `d p` header line followed by `d` rows of `d`
/// integers. Entries are reduced mod p; `p` must match `ctx`.
pub fn parse_base_matrix(text: &str, ctx: &FieldCtx) -> Result<FieldMatrix> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty matrix file".into()))?;
    let nums: Vec<u64> = header
        .split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| Error::Format(format!("bad header token {t:?}")))
        })
        .collect::<Result<_>>()?;
    let [d, p] = nums[..] else {
        return Err(Error::Format("header must be \"d p\"".into()));
    };
    if p != ctx.p() as u64 {
        return Err(Error::FieldMismatch {
            expected: ctx.p(),
            actual: p as u16,
        });
    }
    let d = d as usize;
    if d == 0 {
        return Err(Error::Format("matrix dimension must be positive".into()));
    }
    let mut data = Vec::with_capacity(d * d);
    for r in 0..d {
        let line = lines
            .next()
            .ok_or_else(|| Error::Format(format!("missing row {r}")))?;
        let row: Vec<i64> = line
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::Format(format!("bad entry {t:?}")))
            })
            .collect::<Result<_>>()?;
        if row.len() != d {
            return Err(Error::Format(format!(
                "row {r} has {} entries, expected {d}",
                row.len()
            )));
        }
        data.extend(row.into_iter().map(|x| ctx.reduce(x)));
    }
    if lines.next().is_some() {
        return Err(Error::Format("trailing rows after matrix".into()));
    }
    FieldMatrix::new(ctx, d, d, data)
}

/// Resolves `hadamard`, `polyeval` or a path to a matrix file.
pub fn base_matrix(name: &str, ctx: &FieldCtx) -> Result<FieldMatrix> {
    match name {
        "hadamard" => Ok(hadamard(ctx)),
        "polyeval" => Ok(polyeval(ctx)),
        path => parse_base_matrix(&std::fs::read_to_string(Path::new(path))?, ctx),
    }
}

/// Entry `(i, j)` of `base^{(x)m}`.
pub fn kron_entry(base: &FieldMatrix, m: u32, mut i: usize, mut j: usize) -> u8 {
    let d = base.rows();
    let f = base.ctx();
    let mut acc = 1u8;
    for _ in 0..m {
        acc = f.mul(acc, base.get(i % d, j % d));
        i /= d;
        j /= d;
    }
    acc
}

#[derive(Clone, Debug)]
pub struct KronSpec {
    ctx: FieldCtx,
    base: FieldMatrix,
    m: u32,
    len: usize,
}

impl KronSpec {
    pub fn new(ctx: &FieldCtx, base: &FieldMatrix, m: u32) -> Result<Self> {
        if !base.is_square() {
            return Err(Error::NonSquareBase {
                rows: base.rows(),
                cols: base.cols(),
            });
        }
        ctx.ensure_same(base.ctx())?;
        let len = base
            .rows()
            .checked_pow(m)
            .ok_or_else(|| Error::DimensionMismatch(format!("{}^{m} overflows", base.rows())))?;
        Ok(Self {
            ctx: ctx.clone(),
            base: base.clone(),
            m,
            len,
        })
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn base(&self) -> &FieldMatrix {
        &self.base
    }

    pub fn d(&self) -> usize {
        self.base.rows()
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// `N = d^m`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn check_input(&self, v: &FieldVec) -> Result<()> {
        self.ctx.ensure_same(v.ctx())?;
        if v.len() != self.len {
            return Err(Error::LengthMismatch {
                expected: self.len,
                actual: v.len(),
            });
        }
        Ok(())
    }
}

/// Dense `O(N^2)` product. Each row of the Kronecker power is expanded one
/// digit at a time and never the whole matrix.
pub fn apply_naive(
    spec: &KronSpec,
    v: &FieldVec,
    guard: usize,
    sink: &mut impl CostSink,
) -> Result<FieldVec> {
    spec.check_input(v)?;
    if spec.len > guard {
        return Err(Error::GuardExceeded {
            len: spec.len,
            guard,
        });
    }
    let f = &spec.ctx;
    let d = spec.d();
    let n = spec.len;
    let x = v.as_slice();
    let mut row = Vec::with_capacity(n);
    let mut next = Vec::with_capacity(n);
    let mut out = vec![0u8; n];
    let mut muls = 0u64;
    for (i, o) in out.iter_mut().enumerate() {
        // row[j] over the digits processed so far; digit s of j has weight d^s.
        row.clear();
        row.push(1u8);
        let mut rest = i;
        for _ in 0..spec.m {
            let digit = rest % d;
            rest /= d;
            next.clear();
            for c in 0..d {
                let e = spec.base.get(digit, c);
                next.extend(row.iter().map(|&r| f.mul(e, r)));
            }
            muls += next.len() as u64;
            std::mem::swap(&mut row, &mut next);
        }
        *o = row
            .iter()
            .zip(x)
            .fold(0u8, |acc, (&a, &b)| f.add(acc, f.mul(a, b)));
    }
    sink.field_muls(muls + (n * n) as u64);
    sink.field_adds((n * n.saturating_sub(1)) as u64);
    Ok(FieldVec::from_raw(f, out))
}

/// Applies `base` across the digit with weight `stride`.
fn dense_level(base: &FieldMatrix, data: &mut [u8], stride: usize, sink: &mut impl CostSink) {
    let f = base.ctx();
    let d = base.rows();
    let span = stride * d;
    let mut x = vec![0u8; d];
    for start in (0..data.len()).step_by(span) {
        for off in start..start + stride {
            for (i, xi) in x.iter_mut().enumerate() {
                *xi = data[off + i * stride];
            }
            for r in 0..d {
                let mut acc = 0u8;
                for (c, &xc) in x.iter().enumerate() {
                    acc = f.add(acc, f.mul(base.get(r, c), xc));
                }
                data[off + r * stride] = acc;
            }
        }
    }
    let groups = (data.len() / d) as u64;
    sink.field_muls(groups * (d * d) as u64);
    sink.field_adds(groups * (d * (d - 1)) as u64);
}

/// Applies the table's block operator across the `k` digits starting at
/// weight `stride`.
fn table_level(table: &TransformTable, data: &mut [u8], stride: usize, sink: &mut impl CostSink) {
    let block = table.block_len();
    let p = table.ctx().p() as u64;
    let span = stride * block;
    let mut x = vec![0u8; block];
    for start in (0..data.len()).step_by(span) {
        for off in start..start + stride {
            for (i, xi) in x.iter_mut().enumerate() {
                *xi = data[off + i * stride];
            }
            let y = table.entry(pack_unchecked(p, &x));
            for (i, &yi) in y.iter().enumerate() {
                data[off + i * stride] = yi;
            }
        }
    }
    let (kb, vb) = table.lookup_bits();
    sink.lookups((data.len() / block) as u64, kb, vb);
}

fn check_table(spec: &KronSpec, table: &TransformTable) -> Result<()> {
    spec.ctx.ensure_same(table.ctx())?;
    if table.base() != &spec.base {
        return Err(Error::IncompatibleTable(
            "table base differs from transform base".into(),
        ));
    }
    Ok(())
}

/// Yates' recursion. With a table whose `k` divides `m`, the recursion runs
/// over `m / k` levels of the block operator `base^{(x)k}`, each resolved by
/// lookup.
pub fn apply_yates(
    spec: &KronSpec,
    v: &FieldVec,
    block: Option<&TransformTable>,
    sink: &mut impl CostSink,
) -> Result<FieldVec> {
    spec.check_input(v)?;
    let mut data = v.as_slice().to_vec();
    match block {
        None => {
            let mut stride = 1;
            for _ in 0..spec.m {
                dense_level(&spec.base, &mut data, stride, sink);
                stride *= spec.d();
            }
        }
        Some(table) => {
            check_table(spec, table)?;
            if !spec.m.is_multiple_of(table.k()) {
                return Err(Error::IncompatibleTable(format!(
                    "table exponent {} does not divide {}",
                    table.k(),
                    spec.m
                )));
            }
            let mut stride = 1;
            for _ in 0..spec.m / table.k() {
                table_level(table, &mut data, stride, sink);
                stride *= table.block_len();
            }
        }
    }
    Ok(FieldVec::from_raw(&spec.ctx, data))
}

/// Table levels over the lowest `m'` digits (the largest multiple of `k` not
/// above `m`), then plain Yates levels for the remaining `m - m'` digits.
pub fn apply_table_split(
    spec: &KronSpec,
    v: &FieldVec,
    table: &TransformTable,
    sink: &mut impl CostSink,
) -> Result<FieldVec> {
    spec.check_input(v)?;
    check_table(spec, table)?;
    let mut data = v.as_slice().to_vec();
    let table_digits = table_part(&mut data, spec.m, table, sink);
    let mut stride = spec.d().pow(table_digits);
    for _ in table_digits..spec.m {
        dense_level(&spec.base, &mut data, stride, sink);
        stride *= spec.d();
    }
    Ok(FieldVec::from_raw(&spec.ctx, data))
}

/// Runs table levels on the low digits; returns how many digits they covered.
fn table_part(data: &mut [u8], m: u32, table: &TransformTable, sink: &mut impl CostSink) -> u32 {
    let levels = m / table.k();
    let mut stride = 1;
    for _ in 0..levels {
        table_level(table, data, stride, sink);
        stride *= table.block_len();
    }
    levels * table.k()
}

/// Butterfly layers `lo..hi` of the fast Walsh-Hadamard transform.
/// Each layer costs exactly `N` additions/subtractions.
fn fwht_layers(ctx: &FieldCtx, data: &mut [u8], lo: u32, hi: u32, sink: &mut impl CostSink) {
    for layer in lo..hi {
        let h = 1usize << layer;
        for start in (0..data.len()).step_by(2 * h) {
            let (left, right) = data[start..start + 2 * h].split_at_mut(h);
            for (a, b) in left.iter_mut().zip(right.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = ctx.add(x, y);
                *b = ctx.sub(x, y);
            }
        }
        sink.field_adds(data.len() as u64);
    }
}

/// In-place fast Walsh-Hadamard transform; `data.len()` must be a power of two.
pub fn fwht_in_place(ctx: &FieldCtx, data: &mut [u8], sink: &mut impl CostSink) -> Result<()> {
    let n = log2_exact(data.len())?;
    fwht_layers(ctx, data, 0, n, sink);
    Ok(())
}

fn log2_exact(len: usize) -> Result<u32> {
    if len.is_power_of_two() {
        Ok(len.trailing_zeros())
    } else {
        Err(Error::LengthNotPowerOfTwo(len))
    }
}

/// Block-size choice for the table-accelerated transform.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WhtParams {
    /// `log_d N`.
    pub n: u32,
    /// Digits per table block.
    pub k: u32,
    /// `K = d^k`.
    pub block_len: usize,
    /// Largest multiple of `k` not above `n`; equals `n` when `k | n`.
    pub n_prime: u32,
    /// No useful table exists; the transform runs without one.
    pub fallback: bool,
}

impl WhtParams {
    /// Parameters for an explicitly chosen `k` (with `d = 2`).
    pub fn with_k(n: u32, k: u32) -> Result<Self> {
        Self::with_k_radix(n, k, 2)
    }

    pub fn with_k_radix(n: u32, k: u32, d: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::IncompatibleTable(format!("k = {k} outside 1..={n}")));
        }
        Ok(Self {
            n,
            k,
            block_len: d.pow(k),
            n_prime: n - n % k,
            fallback: false,
        })
    }

    fn fallback(n: u32, d: usize) -> Self {
        Self {
            n,
            k: 1,
            block_len: d,
            n_prime: n,
            fallback: true,
        }
    }

    pub fn divides(&self) -> bool {
        self.n_prime == self.n
    }
}

/// `k = floor(log2(n / (2 log2 p)))`, shrunk until the table fits `mem_cap`.
/// Falls back when that leaves `k < 1`.
pub fn choose_wht_params(n: u32, p: u16, mem_cap: u64) -> WhtParams {
    choose_kron_params(n, 2, p, mem_cap)
}

/// Generalization to a `d x d` base: the largest `k` with
/// `d^k <= log2(d^n) / (2 log2 p)`. Identical to [`choose_wht_params`] for `d = 2`.
pub fn choose_kron_params(n: u32, d: usize, p: u16, mem_cap: u64) -> WhtParams {
    if d < 2 {
        return WhtParams::fallback(n, d);
    }
    let budget = n as f64 * (d as f64).log2() / (2.0 * (p as f64).log2());
    let mut k = 0u32;
    while (d as f64).powi(k as i32 + 1) <= budget {
        k += 1;
    }
    while k > 0 && table_bytes(p, d, k) > mem_cap {
        k -= 1;
    }
    if k == 0 {
        return WhtParams::fallback(n, d);
    }
    WhtParams::with_k_radix(n, k, d).expect("k <= n by construction")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WhtAlgo {
    Naive,
    Fwht,
    Table,
}

impl std::str::FromStr for WhtAlgo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Self::Naive),
            "fwht" => Ok(Self::Fwht),
            "table" => Ok(Self::Table),
            other => Err(Error::Format(format!(
                "unknown transform algorithm {other:?}"
            ))),
        }
    }
}

impl WhtAlgo {
    pub fn name(self) -> &'static str {
        match self {
            Self::Naive => "naive",
            Self::Fwht => "fwht",
            Self::Table => "table",
        }
    }
}

/// Walsh-Hadamard transform `H_N v`. For `algo = Table` without explicit
/// parameters, [`choose_wht_params`] picks them under [`DEFAULT_MEM_CAP`].
pub fn wht(
    ctx: &FieldCtx,
    v: &FieldVec,
    algo: WhtAlgo,
    params: Option<&WhtParams>,
    sink: &mut impl CostSink,
) -> Result<FieldVec> {
    let n = log2_exact(v.len())?;
    ctx.ensure_same(v.ctx())?;
    match algo {
        WhtAlgo::Naive => {
            let spec = KronSpec::new(ctx, &hadamard(ctx), n)?;
            apply_naive(&spec, v, NAIVE_GUARD, sink)
        }
        WhtAlgo::Fwht => {
            let mut data = v.as_slice().to_vec();
            fwht_layers(ctx, &mut data, 0, n, sink);
            Ok(FieldVec::from_raw(ctx, data))
        }
        WhtAlgo::Table => {
            let params = params
                .copied()
                .unwrap_or_else(|| choose_wht_params(n, ctx.p(), DEFAULT_MEM_CAP));
            if params.fallback {
                return wht(ctx, v, WhtAlgo::Fwht, None, sink);
            }
            let table = TransformTable::build(ctx, &hadamard(ctx), params.k, DEFAULT_MEM_CAP)?;
            wht_table(ctx, v, &table, sink)
        }
    }
}

/// Table-accelerated transform with a prebuilt `H_2` table: table levels on
/// the low `n'` bits, then plain butterflies on the remaining `n - n'` bits.
pub fn wht_table(
    ctx: &FieldCtx,
    v: &FieldVec,
    table: &TransformTable,
    sink: &mut impl CostSink,
) -> Result<FieldVec> {
    let n = log2_exact(v.len())?;
    ctx.ensure_same(v.ctx())?;
    ctx.ensure_same(table.ctx())?;
    if table.base() != &hadamard(ctx) {
        return Err(Error::IncompatibleTable(
            "table is not built from H_2".into(),
        ));
    }
    let mut data = v.as_slice().to_vec();
    let n_prime = table_part(&mut data, n, table, sink);
    fwht_layers(ctx, &mut data, n_prime, n, sink);
    Ok(FieldVec::from_raw(ctx, data))
}

/// Evaluates the multilinear polynomial over F_2 with coefficient vector
/// `coeffs` at every point of F_2^n.
///
/// Bit `i` of a coefficient index selects variable `x_i`. Bit `i` of an output
/// index is `1 - x_i`: index 0 is the all-ones point, the last index is the
/// origin.
pub fn eval_multilinear(
    ctx: &FieldCtx,
    coeffs: &FieldVec,
    mem_cap: u64,
    sink: &mut impl CostSink,
) -> Result<FieldVec> {
    if ctx.p() != 2 {
        return Err(Error::WrongField(ctx.p()));
    }
    let n = log2_exact(coeffs.len())?;
    let spec = KronSpec::new(ctx, &polyeval(ctx), n)?;
    let params = choose_wht_params(n, 2, mem_cap);
    if params.fallback {
        return apply_yates(&spec, coeffs, None, sink);
    }
    let table = TransformTable::build(ctx, spec.base(), params.k, mem_cap)?;
    apply_table_split(&spec, coeffs, &table, sink)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::{CostCounters, NoCost};
    use crate::field::make_field;
    use crate::rng::SplitMix64;

    fn f(p: u32) -> FieldCtx {
        make_field(p).unwrap()
    }

    /// Dense product with every entry from the entry formula; shares nothing
    /// with the row expansion in `apply_naive`.
    fn entrywise(spec: &KronSpec, v: &[u8]) -> Vec<u8> {
        let c = spec.ctx();
        (0..spec.len())
            .map(|i| {
                (0..spec.len()).fold(0u8, |acc, j| {
                    c.add(acc, c.mul(kron_entry(spec.base(), spec.m(), i, j), v[j]))
                })
            })
            .collect()
    }

    #[test]
    fn naive_matches_entry_formula() {
        let mut rng = SplitMix64::new(1);
        for p in [2, 3, 5] {
            let ctx = f(p);
            let odd = FieldMatrix::from_rows(&ctx, &[&[1, 2, 0], &[0, 1, 1], &[2, 0, 1]]).unwrap();
            for (base, m) in [(hadamard(&ctx), 5), (polyeval(&ctx), 4), (odd, 3)] {
                let spec = KronSpec::new(&ctx, &base, m).unwrap();
                let v = rng.field_vec(&ctx, spec.len());
                let got = apply_naive(&spec, &v, NAIVE_GUARD, &mut NoCost).unwrap();
                assert_eq!(got.as_slice(), entrywise(&spec, v.as_slice()).as_slice());
            }
        }
    }

    #[test]
    fn naive_examples() {
        let f3 = f(3);
        let h = hadamard(&f3);
        let spec = KronSpec::new(&f3, &h, 1).unwrap();
        let v = FieldVec::new(&f3, vec![2, 1]).unwrap();
        let got = apply_naive(&spec, &v, NAIVE_GUARD, &mut NoCost).unwrap();
        assert_eq!(got.as_slice(), h.mul_vec(&[2, 1]).unwrap().as_slice());

        let spec = KronSpec::new(&f3, &h, 2).unwrap();
        let e0 = FieldVec::new(&f3, vec![1, 0, 0, 0]).unwrap();
        let got = apply_naive(&spec, &e0, NAIVE_GUARD, &mut NoCost).unwrap();
        assert_eq!(got.as_slice(), &[1, 1, 1, 1]);

        let z = FieldVec::zeros(&f3, 4);
        assert_eq!(apply_naive(&spec, &z, NAIVE_GUARD, &mut NoCost).unwrap(), z);
    }

    #[test]
    fn naive_errors() {
        let f3 = f(3);
        let spec = KronSpec::new(&f3, &hadamard(&f3), 15).unwrap();
        let v = FieldVec::zeros(&f3, 1 << 15);
        assert!(matches!(
            apply_naive(&spec, &v, NAIVE_GUARD, &mut NoCost),
            Err(Error::GuardExceeded {
                len: 32768,
                guard: 16384
            })
        ));
        assert!(matches!(
            apply_naive(&spec, &FieldVec::zeros(&f3, 3), NAIVE_GUARD, &mut NoCost),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn yates_matches_naive() {
        let mut rng = SplitMix64::new(2);
        let f3 = f(3);
        let spec = KronSpec::new(&f3, &hadamard(&f3), 3).unwrap();
        for _ in 0..20 {
            let v = rng.field_vec(&f3, 8);
            let a = apply_yates(&spec, &v, None, &mut NoCost).unwrap();
            let b = apply_naive(&spec, &v, NAIVE_GUARD, &mut NoCost).unwrap();
            assert_eq!(a, b);
        }
        let spec1 = KronSpec::new(&f3, &polyeval(&f3), 1).unwrap();
        let v = rng.field_vec(&f3, 2);
        assert_eq!(
            apply_yates(&spec1, &v, None, &mut NoCost).unwrap(),
            apply_naive(&spec1, &v, NAIVE_GUARD, &mut NoCost).unwrap()
        );
    }

    #[test]
    fn yates_with_table_matches_pure_yates() {
        let mut rng = SplitMix64::new(3);
        let f3 = f(3);
        let odd = FieldMatrix::from_rows(&f3, &[&[1, 2, 0], &[0, 1, 1], &[2, 0, 1]]).unwrap();
        for (base, m, k) in [(hadamard(&f3), 4, 2), (polyeval(&f3), 6, 3), (odd, 4, 2)] {
            let spec = KronSpec::new(&f3, &base, m).unwrap();
            let t = TransformTable::build(&f3, &base, k, DEFAULT_MEM_CAP).unwrap();
            let v = rng.field_vec(&f3, spec.len());
            let plain = apply_yates(&spec, &v, None, &mut NoCost).unwrap();
            let fast = apply_yates(&spec, &v, Some(&t), &mut NoCost).unwrap();
            assert_eq!(plain, fast);
        }
    }

    #[test]
    fn yates_table_errors() {
        let f3 = f(3);
        let h = hadamard(&f3);
        let spec = KronSpec::new(&f3, &h, 5).unwrap();
        let t = TransformTable::build(&f3, &h, 2, DEFAULT_MEM_CAP).unwrap();
        let v = FieldVec::zeros(&f3, 32);
        assert!(matches!(
            apply_yates(&spec, &v, Some(&t), &mut NoCost),
            Err(Error::IncompatibleTable(_))
        ));
        let other = TransformTable::build(&f3, &polyeval(&f3), 1, DEFAULT_MEM_CAP).unwrap();
        assert!(matches!(
            apply_yates(&spec, &v, Some(&other), &mut NoCost),
            Err(Error::IncompatibleTable(_))
        ));
        // The split path accepts k not dividing m.
        let plain = apply_yates(&spec, &v, None, &mut NoCost).unwrap();
        assert_eq!(
            apply_table_split(&spec, &v, &t, &mut NoCost).unwrap(),
            plain
        );
    }

    #[test]
    fn param_examples() {
        let p = choose_wht_params(16, 3, DEFAULT_MEM_CAP);
        assert_eq!((p.k, p.block_len, p.n_prime, p.fallback), (2, 4, 16, false));
        let p = choose_wht_params(16, 2, DEFAULT_MEM_CAP);
        assert_eq!((p.k, p.block_len, p.n_prime, p.fallback), (3, 8, 15, false));
        assert!(!p.divides());
        let p = choose_wht_params(4, 3, DEFAULT_MEM_CAP);
        assert!(p.fallback);
        assert_eq!(p.k, 1);
        assert!(choose_wht_params(0, 3, DEFAULT_MEM_CAP).fallback);
    }

    #[test]
    fn params_respect_mem_cap() {
        // p = 2, n = 64: the formula gives k = 5, whose 2^32-entry table is over the default cap.
        assert_eq!(choose_wht_params(64, 2, DEFAULT_MEM_CAP).k, 4);
        let p = choose_wht_params(64, 2, 4096);
        assert_eq!(p.k, 3);
        assert!(table_bytes(2, 2, p.k) <= 4096);
        assert!(choose_wht_params(64, 2, 1).fallback);
    }

    #[test]
    fn param_invariants_hold_everywhere() {
        for p in [2u16, 3, 5, 7, 251] {
            for n in 0..=64u32 {
                let w = choose_wht_params(n, p, DEFAULT_MEM_CAP);
                assert!(w.k >= 1);
                assert_eq!(w.block_len, 1 << w.k);
                if w.fallback {
                    continue;
                }
                assert_eq!(w.n_prime % w.k, 0);
                if n % w.k != 0 {
                    assert!(n - w.k < w.n_prime && w.n_prime < n);
                } else {
                    assert_eq!(w.n_prime, n);
                }
                // p^K <= sqrt(N) when not clamped by memory.
                let lhs = w.block_len as f64 * (p as f64).log2();
                assert!(lhs <= n as f64 / 2.0 + 1e-9, "p={p} n={n} k={}", w.k);
            }
        }
    }

    #[test]
    fn wht_examples() {
        let f3 = f(3);
        let v = FieldVec::new(&f3, vec![1, 1]).unwrap();
        for algo in [WhtAlgo::Naive, WhtAlgo::Fwht, WhtAlgo::Table] {
            assert_eq!(
                wht(&f3, &v, algo, None, &mut NoCost).unwrap().as_slice(),
                &[2, 0]
            );
        }
        let one = FieldVec::new(&f3, vec![2]).unwrap();
        for algo in [WhtAlgo::Naive, WhtAlgo::Fwht, WhtAlgo::Table] {
            assert_eq!(wht(&f3, &one, algo, None, &mut NoCost).unwrap(), one);
        }
        assert!(matches!(
            wht(
                &f3,
                &FieldVec::zeros(&f3, 6),
                WhtAlgo::Fwht,
                None,
                &mut NoCost
            ),
            Err(Error::LengthNotPowerOfTwo(6))
        ));
    }

    #[test]
    fn wht_algorithms_agree() {
        let mut rng = SplitMix64::new(4);
        for p in [2, 3, 5] {
            let ctx = f(p);
            for n in 1..=10u32 {
                let v = rng.field_vec(&ctx, 1 << n);
                let a = wht(&ctx, &v, WhtAlgo::Naive, None, &mut NoCost).unwrap();
                let b = wht(&ctx, &v, WhtAlgo::Fwht, None, &mut NoCost).unwrap();
                assert_eq!(a, b);
                let max_k = if p == 2 { 3 } else { 2 };
                for k in 1..=n.min(max_k) {
                    let params = WhtParams::with_k(n, k).unwrap();
                    let c = wht(&ctx, &v, WhtAlgo::Table, Some(&params), &mut NoCost).unwrap();
                    assert_eq!(a, c, "p={p} n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn wht_involution() {
        let mut rng = SplitMix64::new(5);
        let f3 = f(3);
        for n in 1..=10u32 {
            let v = rng.field_vec(&f3, 1 << n);
            let once = wht(&f3, &v, WhtAlgo::Fwht, None, &mut NoCost).unwrap();
            let twice = wht(&f3, &once, WhtAlgo::Table, None, &mut NoCost).unwrap();
            let scale = ((1u64 << n) % 3) as u8;
            assert_eq!(twice, v.scale(scale));
        }
    }

    #[test]
    fn fwht_counts_exact() {
        let f3 = f(3);
        let v = FieldVec::zeros(&f3, 1 << 12);
        let mut c = CostCounters::new();
        wht(&f3, &v, WhtAlgo::Fwht, None, &mut c).unwrap();
        assert_eq!(c.field_adds, 12 * 4096);
        assert_eq!(c.field_muls, 0);
    }

    #[test]
    fn table_counts_exact() {
        let f3 = f(3);
        let v = FieldVec::zeros(&f3, 1 << 12);
        let mut c = CostCounters::new();
        let params = WhtParams::with_k(12, 2).unwrap();
        wht(&f3, &v, WhtAlgo::Table, Some(&params), &mut c).unwrap();
        assert_eq!(c.lookups, 6 * 1024);
        assert_eq!(c.field_muls, 0);
        assert_eq!(c.field_adds, 0);

        // k = 3 on n = 10: three table levels, one butterfly layer.
        let f2 = f(2);
        let v = FieldVec::zeros(&f2, 1 << 10);
        let mut c = CostCounters::new();
        let params = WhtParams::with_k(10, 3).unwrap();
        wht(&f2, &v, WhtAlgo::Table, Some(&params), &mut c).unwrap();
        assert_eq!(c.lookups, 3 * (1024 / 8));
        assert_eq!(c.field_adds, 1024);
    }

    #[test]
    fn polyeval_examples() {
        let f2 = f(2);
        let c = FieldVec::new(&f2, vec![1, 1]).unwrap();
        assert_eq!(
            eval_multilinear(&f2, &c, DEFAULT_MEM_CAP, &mut NoCost)
                .unwrap()
                .as_slice(),
            &[0, 1]
        );
        let mut e0 = vec![0u8; 32];
        e0[0] = 1;
        let e0 = FieldVec::new(&f2, e0).unwrap();
        let out = eval_multilinear(&f2, &e0, DEFAULT_MEM_CAP, &mut NoCost).unwrap();
        assert!(out.as_slice().iter().all(|&x| x == 1));
        let f3 = f(3);
        assert!(matches!(
            eval_multilinear(&f3, &FieldVec::zeros(&f3, 4), DEFAULT_MEM_CAP, &mut NoCost),
            Err(Error::WrongField(3))
        ));
    }

    #[test]
    fn polyeval_brute_force_n8() {
        let f2 = f(2);
        let mut rng = SplitMix64::new(6);
        let coeffs = rng.field_vec(&f2, 256);
        let got = eval_multilinear(&f2, &coeffs, DEFAULT_MEM_CAP, &mut NoCost).unwrap();
        for o in 0..256usize {
            // Point: x_i = 1 - bit i of o; monomial S survives iff S is inside ones(x).
            let ones = !o & 0xff;
            let val = (0..256usize)
                .filter(|&s| s & !ones == 0)
                .fold(0u8, |acc, s| acc ^ coeffs.get(s));
            assert_eq!(got.get(o), val, "point {o}");
        }
    }

    #[test]
    fn parse_base_matrix_file() {
        let f3 = f(3);
        let m = parse_base_matrix("2 3\n1 1\n1 -1\n", &f3).unwrap();
        assert_eq!(m, hadamard(&f3));
        assert!(matches!(
            parse_base_matrix("2 5\n1 1\n1 -1\n", &f3),
            Err(Error::FieldMismatch { .. })
        ));
        assert!(parse_base_matrix("2 3\n1 1\n", &f3).is_err());
        assert!(parse_base_matrix("2 3\n1 1 1\n1 1\n", &f3).is_err());
        assert!(parse_base_matrix("", &f3).is_err());
    }
}
