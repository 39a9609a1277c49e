//! Binary matrix files: `FFM1`, `p` (u16), `rows` (u64), `cols` (u64), all
//! little-endian, then the row-major elements one byte each. Vectors are
//! stored as single-row matrices.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::field::{make_field, FieldCtx, FieldMatrix, FieldVec};

const MAGIC: &[u8; 4] = b"FFM1";

pub fn write_matrix(mut w: impl Write, m: &FieldMatrix) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&m.ctx().p().to_le_bytes())?;
    w.write_all(&(m.rows() as u64).to_le_bytes())?;
    w.write_all(&(m.cols() as u64).to_le_bytes())?;
    w.write_all(m.as_slice())?;
    Ok(())
}

/// Reads a matrix, building the field named in its header.
pub fn read_matrix(mut r: impl Read) -> Result<FieldMatrix> {
    let mut header = [0u8; 22];
    r.read_exact(&mut header)
        .map_err(|_| Error::Format("truncated matrix header".into()))?;
    if &header[..4] != MAGIC {
        return Err(Error::Format("bad matrix magic".into()));
    }
    let p = u16::from_le_bytes([header[4], header[5]]);
    let rows = u64::from_le_bytes(header[6..14].try_into().expect("8 bytes"));
    let cols = u64::from_le_bytes(header[14..22].try_into().expect("8 bytes"));
    let ctx = make_field(p as u32)?;
    let len = rows
        .checked_mul(cols)
        .and_then(|n| usize::try_from(n).ok())
        .ok_or_else(|| Error::Format(format!("matrix {rows}x{cols} too large")))?;
    let mut data = Vec::with_capacity(len);
    r.take(len as u64 + 1).read_to_end(&mut data)?;
    if data.len() != len {
        return Err(Error::Format(format!(
            "matrix body has {} bytes, expected {len}",
            data.len()
        )));
    }
    FieldMatrix::new(&ctx, rows as usize, cols as usize, data)
}

/// Like [`read_matrix`], but the header must name `ctx`'s field.
pub fn read_matrix_in(r: impl Read, ctx: &FieldCtx) -> Result<FieldMatrix> {
    let m = read_matrix(r)?;
    ctx.ensure_same(m.ctx())?;
    Ok(m)
}

pub fn write_vec(w: impl Write, v: &FieldVec) -> Result<()> {
    let m = FieldMatrix::new(v.ctx(), 1, v.len(), v.as_slice().to_vec())?;
    write_matrix(w, &m)
}

pub fn read_vec(r: impl Read, ctx: &FieldCtx) -> Result<FieldVec> {
    let m = read_matrix_in(r, ctx)?;
    if m.rows() != 1 {
        return Err(Error::Format(format!(
            "expected a single-row vector, got {} rows",
            m.rows()
        )));
    }
    FieldVec::new(ctx, m.into_vec())
}
