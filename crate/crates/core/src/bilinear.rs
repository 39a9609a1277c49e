//! Matrix multiplication from a bilinear identity
//!
//! ```text
//! sum_{i,j,k} X_ij Y_jk Z_ik = sum_l (sum alpha_ijl X_ij)(sum beta_jkl Y_jk)(sum gamma_ikl Z_ik)
//! ```
//!
//! The recursion splits each operand into `t x t` blocks, forms `r` block
//! products and accumulates them into the output blocks. Below the base-case
//! size `S` it either multiplies directly or reads the product from a
//! [`ProductTable`] holding every pair of small matrices.

use std::fmt;

use crate::cost::CostSink;
use crate::error::{Error, Result};
use crate::field::{ceil_log2, pack_unchecked, unpack_into, FieldCtx, FieldMatrix};
use crate::rng::SplitMix64;
use crate::table::{DEFAULT_MEM_CAP, SPOT_CHECKS};

/// Coefficients of a `<t, t, t; r>` identity, stored as small integers and
/// reduced into the field at use.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearIdentity {
    t: usize,
    r: usize,
    /// Indexed `[l][i][j]`, flattened.
    alpha: Vec<i64>,
    beta: Vec<i64>,
    gamma: Vec<i64>,
}

/// Which coefficient tensor a slot belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tensor {
    Alpha,
    Beta,
    Gamma,
}

/// First monomial `X_{i,j} Y_{j',k'} Z_{i',k''}` whose coefficient differs
/// between the two sides of the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterexampleReport {
    pub x: (usize, usize),
    pub y: (usize, usize),
    pub z: (usize, usize),
    pub lhs: u8,
    pub rhs: u8,
}

impl fmt::Display for CounterexampleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "coefficient of X[{},{}] Y[{},{}] Z[{},{}] is {} on the right, expected {}",
            self.x.0, self.x.1, self.y.0, self.y.1, self.z.0, self.z.1, self.rhs, self.lhs
        )
    }
}

impl BilinearIdentity {
    pub fn new(
        t: usize,
        r: usize,
        alpha: Vec<i64>,
        beta: Vec<i64>,
        gamma: Vec<i64>,
    ) -> Result<Self> {
        if t == 0 || r == 0 {
            return Err(Error::Format("t and r must be positive".into()));
        }
        let want = r * t * t;
        for (name, v) in [("alpha", &alpha), ("beta", &beta), ("gamma", &gamma)] {
            if v.len() != want {
                return Err(Error::Format(format!(
                    "{name} has {} coefficients, expected {want}",
                    v.len()
                )));
            }
        }
        Ok(Self {
            t,
            r,
            alpha,
            beta,
            gamma,
        })
    }

    /// Strassen's `<2, 2, 2; 7>` identity.
    pub fn strassen() -> Self {
        // Per product l: alpha over A blocks [11, 12, 21, 22], beta over B
        // blocks, gamma over C blocks.
        #[rustfmt::skip]
        let rows: [([i64; 4], [i64; 4], [i64; 4]); 7] = [
            ([1, 0, 0, 1],  [1, 0, 0, 1],  [1, 0, 0, 1]),  // (A11+A22)(B11+B22)
            ([0, 0, 1, 1],  [1, 0, 0, 0],  [0, 0, 1, -1]), // (A21+A22)B11
            ([1, 0, 0, 0],  [0, 1, 0, -1], [0, 1, 0, 1]),  // A11(B12-B22)
            ([0, 0, 0, 1],  [-1, 0, 1, 0], [1, 0, 1, 0]),  // A22(B21-B11)
            ([1, 1, 0, 0],  [0, 0, 0, 1],  [-1, 1, 0, 0]), // (A11+A12)B22
            ([-1, 0, 1, 0], [1, 1, 0, 0],  [0, 0, 0, 1]),  // (A21-A11)(B11+B12)
            ([0, 1, 0, -1], [0, 0, 1, 1],  [1, 0, 0, 0]),  // (A12-A22)(B21+B22)
        ];
        let mut alpha = Vec::with_capacity(28);
        let mut beta = Vec::with_capacity(28);
        let mut gamma = Vec::with_capacity(28);
        for (a, b, g) in rows {
            alpha.extend(a);
            beta.extend(b);
            gamma.extend(g);
        }
        Self::new(2, 7, alpha, beta, gamma).expect("static shape")
    }

    /// The trivial `<t, t, t; t^3>` identity, one product per `(i, j, k)`.
    pub fn schoolbook(t: usize) -> Self {
        let r = t * t * t;
        let mut alpha = vec![0; r * t * t];
        let mut beta = vec![0; r * t * t];
        let mut gamma = vec![0; r * t * t];
        for i in 0..t {
            for j in 0..t {
                for k in 0..t {
                    let l = (i * t + j) * t + k;
                    alpha[l * t * t + i * t + j] = 1;
                    beta[l * t * t + j * t + k] = 1;
                    gamma[l * t * t + i * t + k] = 1;
                }
            }
        }
        Self::new(t, r, alpha, beta, gamma).expect("static shape")
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// `log_t r`.
    pub fn tau(&self) -> f64 {
        (self.r as f64).ln() / (self.t as f64).ln()
    }

    fn idx(&self, l: usize, a: usize, b: usize) -> usize {
        (l * self.t + a) * self.t + b
    }

    pub fn coefficient(&self, which: Tensor, l: usize, a: usize, b: usize) -> i64 {
        let i = self.idx(l, a, b);
        match which {
            Tensor::Alpha => self.alpha[i],
            Tensor::Beta => self.beta[i],
            Tensor::Gamma => self.gamma[i],
        }
    }

    pub fn set_coefficient(&mut self, which: Tensor, l: usize, a: usize, b: usize, value: i64) {
        let i = self.idx(l, a, b);
        match which {
            Tensor::Alpha => self.alpha[i] = value,
            Tensor::Beta => self.beta[i] = value,
            Tensor::Gamma => self.gamma[i] = value,
        }
    }

    /// Checks all `t^6` monomial coefficients over F_p.
    pub fn verify(&self, ctx: &FieldCtx) -> std::result::Result<(), CounterexampleReport> {
        verify_identity(ctx, self)
    }

    /// Parses `t r` followed by, for each product, the `t x t` alpha, beta and
    /// gamma blocks as whitespace-separated integers.
    pub fn parse(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace().map(|tok| {
            tok.parse::<i64>()
                .map_err(|_| Error::Format(format!("bad identity token {tok:?}")))
        });
        let mut next = |what: &str| {
            tokens
                .next()
                .unwrap_or_else(|| Err(Error::Format(format!("identity file ends before {what}"))))
        };
        let t = next("t")?;
        let r = next("r")?;
        if t <= 0 || r <= 0 {
            return Err(Error::Format(format!("invalid shape t={t} r={r}")));
        }
        let (t, r) = (t as usize, r as usize);
        let block = t * t;
        let mut alpha = Vec::with_capacity(r * block);
        let mut beta = Vec::with_capacity(r * block);
        let mut gamma = Vec::with_capacity(r * block);
        for l in 0..r {
            for (dst, name) in [
                (&mut alpha, "alpha"),
                (&mut beta, "beta"),
                (&mut gamma, "gamma"),
            ] {
                for _ in 0..block {
                    dst.push(next(&format!("{name} block of product {l}"))?);
                }
            }
        }
        if tokens.next().is_some() {
            return Err(Error::Format("trailing tokens in identity file".into()));
        }
        Self::new(t, r, alpha, beta, gamma)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.t, self.r);
        for l in 0..self.r {
            for tensor in [&self.alpha, &self.beta, &self.gamma] {
                out.push('\n');
                for a in 0..self.t {
                    let row: Vec<String> = (0..self.t)
                        .map(|b| tensor[self.idx(l, a, b)].to_string())
                        .collect();
                    out.push_str(&row.join(" "));
                    out.push('\n');
                }
            }
        }
        out
    }
}

/// Compares both sides of the identity on every monomial
/// `X_{i,j} Y_{j',k'} Z_{i',k''}`. The left side is 1 exactly when `i = i'`,
/// `j = j'` and `k' = k''`.
pub fn verify_identity(
    ctx: &FieldCtx,
    id: &BilinearIdentity,
) -> std::result::Result<(), CounterexampleReport> {
    let t = id.t;
    let reduce = |v: &[i64]| v.iter().map(|&x| ctx.reduce(x)).collect::<Vec<u8>>();
    let (alpha, beta, gamma) = (reduce(&id.alpha), reduce(&id.beta), reduce(&id.gamma));
    for i in 0..t {
        for j in 0..t {
            for j2 in 0..t {
                for k2 in 0..t {
                    for i3 in 0..t {
                        for k3 in 0..t {
                            let rhs = (0..id.r).fold(0u8, |acc, l| {
                                let term = ctx.mul(
                                    ctx.mul(alpha[id.idx(l, i, j)], beta[id.idx(l, j2, k2)]),
                                    gamma[id.idx(l, i3, k3)],
                                );
                                ctx.add(acc, term)
                            });
                            let lhs = u8::from(i == i3 && j == j2 && k2 == k3);
                            if lhs != rhs {
                                return Err(CounterexampleReport {
                                    x: (i, j),
                                    y: (j2, k2),
                                    z: (i3, k3),
                                    lhs,
                                    rhs,
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Schoolbook product, also the oracle for everything else here.
pub fn mm_naive(x: &FieldMatrix, y: &FieldMatrix) -> Result<FieldMatrix> {
    mm_naive_counted(x, y, &mut crate::cost::NoCost)
}

pub fn mm_naive_counted(
    x: &FieldMatrix,
    y: &FieldMatrix,
    sink: &mut impl CostSink,
) -> Result<FieldMatrix> {
    x.ctx().ensure_same(y.ctx())?;
    if x.cols() != y.rows() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} times {}x{}",
            x.rows(),
            x.cols(),
            y.rows(),
            y.cols()
        )));
    }
    let data = naive_product(
        x.ctx(),
        x.as_slice(),
        y.as_slice(),
        x.rows(),
        x.cols(),
        y.cols(),
        sink,
    );
    Ok(FieldMatrix::from_raw(x.ctx(), x.rows(), y.cols(), data))
}

fn naive_product(
    f: &FieldCtx,
    x: &[u8],
    y: &[u8],
    rows: usize,
    inner: usize,
    cols: usize,
    sink: &mut impl CostSink,
) -> Vec<u8> {
    let mut out = vec![0u8; rows * cols];
    for i in 0..rows {
        for k in 0..cols {
            out[i * cols + k] = (0..inner).fold(0u8, |acc, j| {
                f.add(acc, f.mul(x[i * inner + j], y[j * cols + k]))
            });
        }
    }
    let cells = (rows * cols) as u64;
    sink.field_muls(cells * inner as u64);
    sink.field_adds(cells * inner.saturating_sub(1) as u64);
    out
}

/// Base-case size selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MmParams {
    /// `floor(sqrt(log2 n / (4 log2 p)))`, at least 1.
    pub s: usize,
    pub mem_cap: u64,
    /// Base-case size actually used after the memory clamp.
    pub effective_s: usize,
    pub override_s: Option<usize>,
}

/// Bytes for product tables of every size `1..=s_max`, saturating.
pub fn product_table_bytes(p: u16, s_max: usize) -> u64 {
    (1..=s_max).fold(0u64, |acc, s| {
        let cells = (s * s) as u32;
        let entries = (p as u64).checked_pow(2 * cells);
        entries
            .and_then(|e| e.checked_mul(cells as u64))
            .and_then(|b| acc.checked_add(b))
            .unwrap_or(u64::MAX)
    })
}

pub fn choose_mm_params(n: usize, p: u16, mem_cap: u64, override_s: Option<usize>) -> MmParams {
    let formula = if n <= 1 {
        1
    } else {
        let x = 0.25 * (n as f64).log2() / (p as f64).log2();
        (x.sqrt().floor() as usize).max(1)
    };
    let mut effective = override_s.unwrap_or(formula).max(1);
    while effective > 1 && product_table_bytes(p, effective) > mem_cap {
        effective -= 1;
    }
    MmParams {
        s: formula,
        mem_cap,
        effective_s: effective,
        override_s,
    }
}

/// Products of every pair of `s' x s'` matrices for `s' <= s_max`.
#[derive(Clone, Debug)]
pub struct ProductTable {
    ctx: FieldCtx,
    s_max: usize,
    /// `by_size[s - 1]` holds `p^{2 s^2}` products of `s^2` elements each.
    by_size: Vec<Vec<u8>>,
}

pub fn build_product_table(ctx: &FieldCtx, s_max: usize, mem_cap: u64) -> Result<ProductTable> {
    ProductTable::build(ctx, s_max, mem_cap)
}

impl ProductTable {
    pub fn build(ctx: &FieldCtx, s_max: usize, mem_cap: u64) -> Result<Self> {
        let required = product_table_bytes(ctx.p(), s_max);
        if required > mem_cap {
            return Err(Error::MemCapExceeded {
                required,
                cap: mem_cap,
            });
        }
        let mut by_size = Vec::with_capacity(s_max);
        for s in 1..=s_max {
            let cells = s * s;
            let entries = ctx.key_space(2 * cells).expect("bounded by mem cap") as usize;
            let mut values = vec![0u8; entries * cells];
            let mut operands = vec![0u8; 2 * cells];
            for (key, out) in values.chunks_exact_mut(cells).enumerate() {
                unpack_into(ctx, key as u64, &mut operands)?;
                let (a, b) = operands.split_at(cells);
                let prod = naive_product(ctx, a, b, s, s, s, &mut crate::cost::NoCost);
                out.copy_from_slice(&prod);
            }
            by_size.push(values);
        }
        let table = Self {
            ctx: ctx.clone(),
            s_max,
            by_size,
        };
        table.spot_check(SPOT_CHECKS, 0xab)?;
        Ok(table)
    }

    /// Compares random entries of every size against [`mm_naive`], decoding
    /// the operands from the key independently of the build loop.
    pub fn spot_check(&self, count: usize, seed: u64) -> Result<()> {
        let mut rng = SplitMix64::new(seed);
        for s in 1..=self.s_max {
            let entries = (self.by_size[s - 1].len() / (s * s)) as u64;
            let keys: Vec<u64> = if entries <= count as u64 {
                (0..entries).collect()
            } else {
                (0..count as u64).collect()
            };
            for key in keys {
                let (a, b) = if entries <= count as u64 {
                    let mut ops = vec![0u8; 2 * s * s];
                    unpack_into(&self.ctx, key, &mut ops)?;
                    let (x, y) = ops.split_at(s * s);
                    (
                        FieldMatrix::from_raw(&self.ctx, s, s, x.to_vec()),
                        FieldMatrix::from_raw(&self.ctx, s, s, y.to_vec()),
                    )
                } else {
                    (
                        rng.field_matrix(&self.ctx, s, s),
                        rng.field_matrix(&self.ctx, s, s),
                    )
                };
                let expected = mm_naive(&a, &b)?;
                let got = self.product(&a, &b, &mut crate::cost::NoCost)?;
                if got != expected {
                    return Err(Error::SpotCheckFailed(format!(
                        "product table size {s} disagrees with the schoolbook product"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn s_max(&self) -> usize {
        self.s_max
    }

    /// Entries stored for size `s`.
    pub fn entries(&self, s: usize) -> usize {
        self.by_size[s - 1].len() / (s * s)
    }

    pub fn size_bytes(&self) -> usize {
        self.by_size.iter().map(Vec::len).sum()
    }

    /// Key and value widths in bits for one size-`s` lookup.
    pub fn lookup_bits(&self, s: usize) -> (u64, u64) {
        let cells = s * s;
        (
            self.ctx.key_bits(2 * cells),
            cells as u64 * ceil_log2(self.ctx.p() as u64) as u64,
        )
    }

    /// Looks up `a * b` for square operands of size at most `s_max`.
    pub fn product(
        &self,
        a: &FieldMatrix,
        b: &FieldMatrix,
        sink: &mut impl CostSink,
    ) -> Result<FieldMatrix> {
        let s = a.rows();
        if !a.is_square() || b.rows() != s || b.cols() != s {
            return Err(Error::DimensionMismatch(
                "product table needs equal square operands".into(),
            ));
        }
        if s == 0 || s > self.s_max {
            return Err(Error::DimensionMismatch(format!(
                "size {s} outside product table range 1..={}",
                self.s_max
            )));
        }
        self.ctx.ensure_same(a.ctx())?;
        self.ctx.ensure_same(b.ctx())?;
        let out = self.lookup_raw(a.as_slice(), b.as_slice(), s, sink);
        Ok(FieldMatrix::from_raw(&self.ctx, s, s, out.to_vec()))
    }

    fn lookup_raw(&self, a: &[u8], b: &[u8], s: usize, sink: &mut impl CostSink) -> &[u8] {
        let p = self.ctx.p() as u64;
        let cells = s * s;
        // A occupies the low digits of the key, B the high ones.
        let key = pack_unchecked(p, b) * p.pow(cells as u32) + pack_unchecked(p, a);
        let (kb, vb) = self.lookup_bits(s);
        sink.lookups(1, kb, vb);
        let start = key as usize * cells;
        &self.by_size[s - 1][start..start + cells]
    }
}

/// Padded size `S * t^j`, the smallest such value not below `n`.
pub fn padded_size(n: usize, base: usize, t: usize) -> usize {
    if n <= base {
        return n;
    }
    let mut size = base;
    while size < n {
        size *= t;
    }
    size
}

/// Recursive block multiplication with base-case size `params.effective_s`.
///
/// Operands are zero-padded to `S * t^j` and the product cropped. Block
/// products at each level are accumulated in ascending `l`.
pub fn mm_recursive(
    x: &FieldMatrix,
    y: &FieldMatrix,
    id: &BilinearIdentity,
    params: &MmParams,
    table: Option<&ProductTable>,
    sink: &mut impl CostSink,
) -> Result<FieldMatrix> {
    let ctx = x.ctx();
    ctx.ensure_same(y.ctx())?;
    let n = x.rows();
    if !x.is_square() || !y.is_square() || y.rows() != n {
        return Err(Error::DimensionMismatch(format!(
            "expected equal square operands, got {}x{} and {}x{}",
            x.rows(),
            x.cols(),
            y.rows(),
            y.cols()
        )));
    }
    verify_identity(ctx, id).map_err(Error::UnverifiedIdentity)?;
    if id.t < 2 {
        return Err(Error::DimensionMismatch(
            "identity must split into t >= 2 blocks".into(),
        ));
    }
    let base = params.effective_s.max(1);
    if let Some(tab) = table {
        ctx.ensure_same(tab.ctx())?;
        if tab.s_max() < base.min(n.max(1)) {
            return Err(Error::IncompatibleTable(format!(
                "product table covers sizes up to {}, base case needs {}",
                tab.s_max(),
                base
            )));
        }
    }
    if n == 0 {
        return Ok(FieldMatrix::zeros(ctx, 0, 0));
    }

    let size = padded_size(n, base, id.t);
    let pad = |m: &FieldMatrix| {
        if size == n {
            return m.as_slice().to_vec();
        }
        let mut out = vec![0u8; size * size];
        for r in 0..n {
            out[r * size..r * size + n].copy_from_slice(&m.as_slice()[r * n..(r + 1) * n]);
        }
        out
    };
    let coeffs = Reduced::new(ctx, id);
    let engine = Engine {
        ctx,
        coeffs: &coeffs,
        base,
        table,
    };
    let z = engine.multiply(&pad(x), &pad(y), size, 0, sink);
    let data = if size == n {
        z
    } else {
        (0..n)
            .flat_map(|r| z[r * size..r * size + n].iter().copied())
            .collect()
    };
    Ok(FieldMatrix::from_raw(ctx, n, n, data))
}

/// Identity coefficients reduced into the field.
struct Reduced {
    t: usize,
    r: usize,
    alpha: Vec<u8>,
    beta: Vec<u8>,
    gamma: Vec<u8>,
}

impl Reduced {
    fn new(ctx: &FieldCtx, id: &BilinearIdentity) -> Self {
        let red = |v: &[i64]| v.iter().map(|&c| ctx.reduce(c)).collect();
        Self {
            t: id.t,
            r: id.r,
            alpha: red(&id.alpha),
            beta: red(&id.beta),
            gamma: red(&id.gamma),
        }
    }

    fn block<'a>(&self, v: &'a [u8], l: usize) -> impl Iterator<Item = (usize, usize, u8)> + 'a {
        let t = self.t;
        let start = l * t * t;
        v[start..start + t * t]
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(move |(idx, &c)| (idx / t, idx % t, c))
    }
}

struct Engine<'a> {
    ctx: &'a FieldCtx,
    coeffs: &'a Reduced,
    base: usize,
    table: Option<&'a ProductTable>,
}

impl Engine<'_> {
    fn multiply(
        &self,
        x: &[u8],
        y: &[u8],
        m: usize,
        depth: usize,
        sink: &mut impl CostSink,
    ) -> Vec<u8> {
        sink.call_at_depth(depth);
        if m <= self.base {
            return match self.table {
                Some(tab) => tab.lookup_raw(x, y, m, sink).to_vec(),
                None => naive_product(self.ctx, x, y, m, m, m, sink),
            };
        }
        let t = self.coeffs.t;
        let h = m / t;
        let mut z = vec![0u8; m * m];
        let mut touched = vec![false; t * t];
        for l in 0..self.coeffs.r {
            let a = self.combine(x, m, h, &self.coeffs.alpha, l, sink);
            let b = self.combine(y, m, h, &self.coeffs.beta, l, sink);
            let c = self.multiply(&a, &b, h, depth + 1, sink);
            for (i, k, g) in self.coeffs.block(&self.coeffs.gamma, l) {
                let first = !std::mem::replace(&mut touched[i * t + k], true);
                self.accumulate(&mut z, m, h, i, k, &c, g, first, sink);
            }
        }
        z
    }

    /// `sum_{a,b} coeff[l][a][b] * block(a, b)` over the nonzero coefficients.
    fn combine(
        &self,
        src: &[u8],
        m: usize,
        h: usize,
        coeffs: &[u8],
        l: usize,
        sink: &mut impl CostSink,
    ) -> Vec<u8> {
        let f = self.ctx;
        let mut out = vec![0u8; h * h];
        let cells = (h * h) as u64;
        for (term, (bi, bj, c)) in self.coeffs.block(coeffs, l).enumerate() {
            for r in 0..h {
                let row = &src[(bi * h + r) * m + bj * h..(bi * h + r) * m + bj * h + h];
                let dst = &mut out[r * h..(r + 1) * h];
                for (o, &e) in dst.iter_mut().zip(row) {
                    let e = if c == 1 { e } else { f.mul(c, e) };
                    *o = if term == 0 { e } else { f.add(*o, e) };
                }
            }
            if c != 1 {
                sink.field_muls(cells);
            }
            if term > 0 {
                sink.field_adds(cells);
            }
        }
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn accumulate(
        &self,
        z: &mut [u8],
        m: usize,
        h: usize,
        bi: usize,
        bk: usize,
        c: &[u8],
        g: u8,
        first: bool,
        sink: &mut impl CostSink,
    ) {
        let f = self.ctx;
        for r in 0..h {
            let dst = &mut z[(bi * h + r) * m + bk * h..(bi * h + r) * m + bk * h + h];
            for (o, &e) in dst.iter_mut().zip(&c[r * h..(r + 1) * h]) {
                let e = if g == 1 { e } else { f.mul(g, e) };
                *o = if first { e } else { f.add(*o, e) };
            }
        }
        let cells = (h * h) as u64;
        if g != 1 {
            sink.field_muls(cells);
        }
        if !first {
            sink.field_adds(cells);
        }
    }
}

/// Default parameters: the base-size formula under [`DEFAULT_MEM_CAP`].
pub fn default_mm_params(n: usize, p: u16) -> MmParams {
    choose_mm_params(n, p, DEFAULT_MEM_CAP, None)
}
