//! Method of Four Russians over small fields.
//!
//! Write each coefficient as `a = Σ_d α_d φ_d(a)` with `φ_d(a) ∈ {0, 1}`.
//! Then for a block of `k` rows of `B`,
//!
//! ```text
//! Σ_t a_t B_{sk+t} = Σ_d α_d Σ_t φ_d(a_t) B_{sk+t}
//! ```
//!
//! and each inner sum is a 0/1 combination of rows, i.e. one lookup into a
//! table of all `2^k` such combinations. The `φ_d` bits of a row of `A` are
//! read straight off its bit planes, so table indices cost a shift and a mask.
//!
//! F3 uses the basis `{1, -1}`: one table add and one table subtract.
//! The binary fields use the power basis `{1, 2, 4}` and combine lookups by
//! Horner's rule, doubling the accumulator between them.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::{BitslicedMatrix, RowOps};

pub const MAX_K: usize = 16;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct M4rmParams {
    /// Table index width; `None` picks [`choose_k`] of the inner dimension.
    pub k: Option<usize>,
    /// Worker threads partitioning the rows of `C`. 0 or 1 runs inline.
    pub threads: usize,
}

impl M4rmParams {
    pub fn with_k(k: usize) -> Self {
        M4rmParams {
            k: Some(k),
            ..Self::default()
        }
    }

    pub fn with_threads(self, threads: usize) -> Self {
        M4rmParams { threads, ..self }
    }
}

/// Default table width: `clamp(floor(log2 l) - 2, 1, 10)`.
pub fn choose_k(l: usize) -> usize {
    if l == 0 {
        return 1;
    }
    let lg = (usize::BITS - 1 - l.leading_zeros()) as usize;
    lg.saturating_sub(2).clamp(1, 10)
}

#[inline(always)]
fn gray(pos: usize) -> usize {
    pos ^ (pos >> 1)
}

/// All `2^k` 0/1 combinations of a block of rows of `B`, in Gray-code order:
/// entry `g` is `Σ_t bit_t(gray(g)) B_{start+t}`, built from entry `g - 1`
/// with a single row addition or subtraction.
#[derive(Clone, Debug)]
pub struct GrayTable {
    k: usize,
    ops: RowOps,
    entries: Vec<u64>,
    pos_of_mask: Vec<u32>,
    row_ops: usize,
}

impl GrayTable {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        1 << self.k
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Row additions/subtractions spent building the table.
    pub fn row_operations(&self) -> usize {
        self.row_ops
    }

    /// The entry at Gray position `pos`.
    pub fn entry(&self, pos: usize) -> &[u64] {
        let len = self.ops.row_len();
        &self.entries[pos * len..(pos + 1) * len]
    }

    /// The combination selecting rows by the bits of `mask`.
    #[inline]
    pub fn for_mask(&self, mask: usize) -> &[u64] {
        self.entry(self.pos_of_mask[mask] as usize)
    }

    /// Decoded entry at Gray position `pos`, for inspection.
    pub fn entry_residues(&self, pos: usize) -> Vec<u32> {
        let field = self.ops.field;
        let wpr = self.ops.wpr;
        let row = self.entry(pos);
        let cols = wpr * crate::W;
        (0..cols)
            .map(|j| {
                let p = (0..field.planes()).fold(0u8, |p, d| {
                    p | (((row[d * wpr + j / crate::W] >> (j % crate::W)) & 1) as u8) << d
                });
                field.decode(p).expect("valid pattern")
            })
            .collect()
    }
}

/// Builds the table for rows `s*k .. s*k + k` of `b` (fewer for the last
/// block when `k` does not divide the row count).
pub fn build_table(b: &BitslicedMatrix, s: usize, k: usize) -> Result<GrayTable> {
    if !(1..=MAX_K).contains(&k) {
        return Err(Error::Unsupported(format!("table width k = {k}")));
    }
    let start = s
        .checked_mul(k)
        .filter(|&x| x < b.rows())
        .ok_or_else(|| Error::DimensionMismatch(format!("block {s} of width {k} past {} rows", b.rows())))?;
    let width = k.min(b.rows() - start);
    let ops = b.ops();
    let len = ops.row_len();
    let size = 1usize << width;
    let mut entries = vec![0u64; size * len];
    let mut pos_of_mask = vec![0u32; size];
    for pos in 1..size {
        let t = pos.trailing_zeros() as usize;
        let (prev, cur) = entries[(pos - 1) * len..(pos + 1) * len].split_at_mut(len);
        cur.copy_from_slice(prev);
        let src = b.row_words(start + t);
        if gray(pos) >> t & 1 == 1 {
            ops.add(cur, src);
        } else {
            ops.sub(cur, src);
        }
        pos_of_mask[gray(pos)] = pos as u32;
    }
    Ok(GrayTable {
        k: width,
        ops,
        entries,
        pos_of_mask,
        row_ops: size - 1,
    })
}

/// `k` bits of a plane row starting at column `start`.
#[inline(always)]
fn bits_at(words: &[u64], start: usize, k: usize) -> usize {
    let (w, o) = (start / 64, start % 64);
    let mut v = words[w] >> o;
    if o + k > 64 {
        v |= words[w + 1] << (64 - o);
    }
    (v & ((1u64 << k) - 1)) as usize
}

fn check_product(a: &BitslicedMatrix, b: &BitslicedMatrix) -> Result<()> {
    if a.field() != b.field() {
        return Err(Error::FieldMismatch {
            left: a.field().to_string(),
            right: b.field().to_string(),
        });
    }
    if a.cols() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "inner dimensions {} and {}",
            a.cols(),
            b.rows()
        )));
    }
    Ok(())
}

/// Adds the contribution of one table block to row `i` of `C`.
#[inline]
fn accumulate_block(
    ops: &RowOps,
    a: &BitslicedMatrix,
    table: &GrayTable,
    start: usize,
    i: usize,
    c_row: &mut [u64],
    scratch: &mut Vec<u64>,
) {
    let k = table.k;
    match ops.field {
        Field::F2 => {
            let idx = bits_at(a.plane_row(i, 0), start, k);
            if idx != 0 {
                ops.add(c_row, table.for_mask(idx));
            }
        }
        Field::F3 => {
            // φ_0 (coefficient is 1) = unit & !sign = unit ^ sign; φ_1 (coefficient is -1) = sign
            let unit = bits_at(a.plane_row(i, 0), start, k);
            let sign = bits_at(a.plane_row(i, 1), start, k);
            let plus = unit ^ sign;
            if plus != 0 {
                ops.add(c_row, table.for_mask(plus));
            }
            if sign != 0 {
                ops.sub(c_row, table.for_mask(sign));
            }
        }
        _ => {
            let planes = ops.field.planes();
            let mut idx = [0usize; 3];
            for (d, slot) in idx.iter_mut().enumerate().take(planes) {
                *slot = bits_at(a.plane_row(i, d), start, k);
            }
            let Some(top) = (0..planes).rev().find(|&d| idx[d] != 0) else {
                return;
            };
            if top == 0 {
                ops.add(c_row, table.for_mask(idx[0]));
                return;
            }
            scratch.clear();
            scratch.extend_from_slice(table.for_mask(idx[top]));
            for d in (0..top).rev() {
                if idx[d] != 0 {
                    ops.double_add(scratch, table.for_mask(idx[d]));
                } else {
                    ops.double(scratch);
                }
            }
            ops.add(c_row, scratch);
        }
    }
}

/// `C = AB` by the Method of Four Russians.
pub fn m4rm_multiply(a: &BitslicedMatrix, b: &BitslicedMatrix, params: M4rmParams) -> Result<BitslicedMatrix> {
    check_product(a, b)?;
    let (m, l, n) = (a.rows(), a.cols(), b.cols());
    let k = params.k.unwrap_or_else(|| choose_k(l));
    if !(1..=MAX_K).contains(&k) {
        return Err(Error::Unsupported(format!("table width k = {k}")));
    }
    let mut c = BitslicedMatrix::zero(a.field(), m, n)?;
    if m == 0 || n == 0 || l == 0 {
        return Ok(c);
    }
    let ops = c.ops();
    let row_len = ops.row_len();
    let pool = if params.threads > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(params.threads)
                .build()
                .map_err(|e| Error::Unsupported(e.to_string()))?,
        )
    } else {
        None
    };
    let mut scratch = Vec::with_capacity(row_len);
    for s in 0..l.div_ceil(k) {
        let table = build_table(b, s, k)?;
        let start = s * k;
        let rows = c.data_mut().chunks_exact_mut(row_len);
        match &pool {
            None => {
                for (i, c_row) in rows.enumerate() {
                    accumulate_block(&ops, a, &table, start, i, c_row, &mut scratch);
                }
            }
            Some(pool) => pool.install(|| {
                c.data_mut()
                    .par_chunks_exact_mut(row_len)
                    .enumerate()
                    .for_each_init(Vec::new, |scratch, (i, c_row)| {
                        accumulate_block(&ops, a, &table, start, i, c_row, scratch)
                    })
            }),
        }
    }
    Ok(c)
}

/// `C = AB` one coefficient at a time: `C_i = Σ_j a_ij B_j` with a scaled
/// row accumulation per nonzero `a_ij`. No tables.
pub fn classical_multiply(a: &BitslicedMatrix, b: &BitslicedMatrix) -> Result<BitslicedMatrix> {
    check_product(a, b)?;
    let (m, l, n) = (a.rows(), a.cols(), b.cols());
    let mut c = BitslicedMatrix::zero(a.field(), m, n)?;
    if m == 0 || n == 0 || l == 0 {
        return Ok(c);
    }
    let field = a.field();
    let ops = c.ops();
    let mut scaled = Vec::with_capacity(ops.row_len());
    let mut tmp = Vec::new();
    for i in 0..m {
        for j in 0..l {
            let coef = a.get(i, j)?;
            let src = b.row_words(j);
            let dst = c.row_words_mut(i);
            match (field, coef) {
                (_, 0) => {}
                (_, 1) => ops.add(dst, src),
                (Field::F3, _) => ops.sub(dst, src),
                _ => {
                    scaled.clear();
                    scaled.extend_from_slice(src);
                    ops.scale(&mut scaled, coef, &mut tmp);
                    ops.add(dst, &scaled);
                }
            }
        }
    }
    Ok(c)
}
