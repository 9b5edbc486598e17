//! Bit-plane matrix storage.
//!
//! A row of an `m x n` matrix over a field with `r` planes is a contiguous
//! run of `r * words_per_row` words: plane 0 first, then plane 1, and so on.
//! Plane `d` of a row holds bit `d` of every entry's pattern, entry `j` in
//! lane `j % 64` of word `j / 64`. Lanes past column `n` in the last word are
//! padding and always hold the all-zero pattern, which is canonical zero in
//! every supported field.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::kernels::*;
use crate::oracle::{DenseMatrix, Ring};
use crate::W;

/// Row operations for one field and row width.
#[derive(Clone, Copy, Debug)]
pub(crate) struct RowOps {
    pub field: Field,
    pub wpr: usize,
    tail: u64,
}

// Indexed loops over slices cut to one length: the bounds checks vanish
// and LLVM vectorizes these, which it does not do for the zipped form.

#[inline(always)]
fn binary2(dst: &mut [u64], src: &[u64], wpr: usize, f: impl Fn([u64; 2], [u64; 2]) -> [u64; 2]) {
    let (d0, d1) = dst.split_at_mut(wpr);
    let (s0, s1) = src.split_at(wpr);
    let (d1, s0, s1) = (&mut d1[..wpr], &s0[..wpr], &s1[..wpr]);
    for i in 0..wpr {
        let [r0, r1] = f([d0[i], d1[i]], [s0[i], s1[i]]);
        d0[i] = r0;
        d1[i] = r1;
    }
}

#[inline(always)]
fn binary3(dst: &mut [u64], src: &[u64], wpr: usize, f: impl Fn([u64; 3], [u64; 3]) -> [u64; 3]) {
    let (d0, rest) = dst.split_at_mut(wpr);
    let (d1, d2) = rest.split_at_mut(wpr);
    let (d1, d2) = (&mut d1[..wpr], &mut d2[..wpr]);
    let (s0, s1, s2) = (&src[..wpr], &src[wpr..2 * wpr], &src[2 * wpr..3 * wpr]);
    for i in 0..wpr {
        let [r0, r1, r2] = f([d0[i], d1[i], d2[i]], [s0[i], s1[i], s2[i]]);
        d0[i] = r0;
        d1[i] = r1;
        d2[i] = r2;
    }
}

#[inline(always)]
fn unary2(dst: &mut [u64], wpr: usize, f: impl Fn([u64; 2]) -> [u64; 2]) {
    let (d0, d1) = dst.split_at_mut(wpr);
    let d1 = &mut d1[..wpr];
    for i in 0..wpr {
        let [r0, r1] = f([d0[i], d1[i]]);
        d0[i] = r0;
        d1[i] = r1;
    }
}

#[inline(always)]
fn unary3(dst: &mut [u64], wpr: usize, f: impl Fn([u64; 3]) -> [u64; 3]) {
    let (d0, rest) = dst.split_at_mut(wpr);
    let (d1, d2) = rest.split_at_mut(wpr);
    let (d1, d2) = (&mut d1[..wpr], &mut d2[..wpr]);
    for i in 0..wpr {
        let [r0, r1, r2] = f([d0[i], d1[i], d2[i]]);
        d0[i] = r0;
        d1[i] = r1;
        d2[i] = r2;
    }
}

impl RowOps {
    pub fn new(field: Field, cols: usize) -> Self {
        let wpr = cols.div_ceil(W);
        let rem = cols % W;
        let tail = if rem == 0 { u64::MAX } else { (1u64 << rem) - 1 };
        RowOps { field, wpr, tail }
    }

    /// Words in one row across all planes.
    pub fn row_len(&self) -> usize {
        self.wpr * self.field.planes()
    }

    fn mask_tail(&self, row: &mut [u64]) {
        if self.wpr == 0 {
            return;
        }
        for plane in row.chunks_exact_mut(self.wpr) {
            plane[self.wpr - 1] &= self.tail;
        }
    }

    /// `dst <- dst + src`
    pub fn add(&self, dst: &mut [u64], src: &[u64]) {
        let w = self.wpr;
        match self.field {
            Field::F2 => dst.iter_mut().zip(src).for_each(|(d, s)| *d ^= s),
            Field::F3 => binary2(dst, src, w, f3_add),
            Field::Z4 => binary2(dst, src, w, z4_add),
            Field::F5 => binary3(dst, src, w, f5_add),
            Field::F7 => binary3(dst, src, w, f7_add),
            Field::Z8 => binary3(dst, src, w, z8_add),
        }
    }

    /// `dst <- dst - src`
    pub fn sub(&self, dst: &mut [u64], src: &[u64]) {
        let w = self.wpr;
        match self.field {
            Field::F2 => dst.iter_mut().zip(src).for_each(|(d, s)| *d ^= s),
            Field::F3 => binary2(dst, src, w, f3_sub),
            Field::Z4 => binary2(dst, src, w, |a, b| z4_add(a, z4_neg(b))),
            Field::F5 => binary3(dst, src, w, |a, b| f5_add(a, f5_neg(b))),
            Field::F7 => {
                binary3(dst, src, w, |a, b| f7_add(a, f7_neg(b)));
                self.mask_tail(dst);
            }
            Field::Z8 => binary3(dst, src, w, |a, b| z8_add(a, z8_neg(b))),
        }
    }

    /// `dst <- 2 dst + src`, one Horner step.
    pub fn double_add(&self, dst: &mut [u64], src: &[u64]) {
        let w = self.wpr;
        match self.field {
            Field::F2 => dst.copy_from_slice(src),
            // 2d = -d in F3
            Field::F3 => binary2(dst, src, w, |d, s| f3_sub(s, d)),
            Field::Z4 => binary2(dst, src, w, |d, s| z4_add(z4_double(d), s)),
            Field::F5 => binary3(dst, src, w, |d, s| f5_add(f5_double(d), s)),
            Field::F7 => binary3(dst, src, w, |d, s| f7_add(f7_double(d), s)),
            Field::Z8 => binary3(dst, src, w, |d, s| z8_add(z8_double(d), s)),
        }
    }

    pub fn neg(&self, dst: &mut [u64]) {
        let w = self.wpr;
        match self.field {
            Field::F2 => {}
            Field::F3 => unary2(dst, w, f3_neg),
            Field::Z4 => unary2(dst, w, z4_neg),
            Field::F5 => unary3(dst, w, f5_neg),
            Field::F7 => {
                unary3(dst, w, f7_neg);
                self.mask_tail(dst);
            }
            Field::Z8 => unary3(dst, w, z8_neg),
        }
    }

    pub fn double(&self, dst: &mut [u64]) {
        let w = self.wpr;
        match self.field {
            Field::F2 => dst.fill(0),
            Field::F3 => unary2(dst, w, f3_neg),
            Field::Z4 => unary2(dst, w, z4_double),
            Field::F5 => unary3(dst, w, f5_double),
            Field::F7 => unary3(dst, w, f7_double),
            Field::Z8 => unary3(dst, w, z8_double),
        }
    }

    pub fn reduce(&self, dst: &mut [u64]) {
        match self.field {
            Field::F5 => unary3(dst, self.wpr, f5_reduce),
            Field::F7 => unary3(dst, self.wpr, f7_reduce),
            _ => {}
        }
    }

    /// `dst <- c * dst` by Horner over the bits of `c`.
    pub fn scale(&self, dst: &mut [u64], c: u32, scratch: &mut Vec<u64>) {
        match (self.field, c) {
            (_, 0) => dst.fill(0),
            (_, 1) => {}
            (Field::F3, _) => self.neg(dst),
            _ => {
                scratch.clear();
                scratch.extend_from_slice(dst);
                let top = 31 - c.leading_zeros();
                for bit in (0..top).rev() {
                    if c >> bit & 1 == 1 {
                        self.double_add(dst, scratch);
                    } else {
                        self.double(dst);
                    }
                }
            }
        }
    }
}

/// How [`row_accumulate`] combines rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Accumulate {
    Add,
    Sub,
}

/// A borrowed row across all planes.
#[derive(Clone, Copy, Debug)]
pub struct RowRef<'a> {
    field: Field,
    cols: usize,
    words: &'a [u64],
}

/// A mutably borrowed row across all planes.
#[derive(Debug)]
pub struct RowMut<'a> {
    field: Field,
    cols: usize,
    words: &'a mut [u64],
}

impl RowRef<'_> {
    pub fn plane(&self, d: usize) -> &[u64] {
        let wpr = self.cols.div_ceil(W);
        &self.words[d * wpr..(d + 1) * wpr]
    }
}

impl RowMut<'_> {
    pub fn plane(&self, d: usize) -> &[u64] {
        let wpr = self.cols.div_ceil(W);
        &self.words[d * wpr..(d + 1) * wpr]
    }
}

/// `dst <- dst ± src` elementwise, word by word through the field kernels.
pub fn row_accumulate(dst: &mut RowMut<'_>, src: &RowRef<'_>, mode: Accumulate) -> Result<()> {
    if dst.field != src.field {
        return Err(Error::FieldMismatch {
            left: dst.field.to_string(),
            right: src.field.to_string(),
        });
    }
    if dst.cols != src.cols {
        return Err(Error::DimensionMismatch(format!(
            "row lengths {} and {}",
            dst.cols, src.cols
        )));
    }
    let ops = RowOps::new(dst.field, dst.cols);
    match mode {
        Accumulate::Add => ops.add(dst.words, src.words),
        Accumulate::Sub => ops.sub(dst.words, src.words),
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct BitslicedMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    wpr: usize,
    data: Vec<u64>,
}

impl BitslicedMatrix {
    pub fn zero(field: Field, rows: usize, cols: usize) -> Result<Self> {
        let wpr = cols.div_ceil(W);
        let len = rows
            .checked_mul(wpr)
            .and_then(|x| x.checked_mul(field.planes()))
            .filter(|&x| x <= isize::MAX as usize / 8)
            .ok_or(Error::Overflow(rows, cols))?;
        Ok(BitslicedMatrix {
            field,
            rows,
            cols,
            wpr,
            data: vec![0; len],
        })
    }

    pub fn identity(field: Field, n: usize) -> Result<Self> {
        let mut m = Self::zero(field, n, n)?;
        for i in 0..n {
            m.set(i, i, 1)?;
        }
        Ok(m)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn words_per_row(&self) -> usize {
        self.wpr
    }

    pub(crate) fn ops(&self) -> RowOps {
        RowOps::new(self.field, self.cols)
    }

    pub(crate) fn row_len(&self) -> usize {
        self.wpr * self.field.planes()
    }

    pub fn data(&self) -> &[u64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [u64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> RowRef<'_> {
        let len = self.row_len();
        RowRef {
            field: self.field,
            cols: self.cols,
            words: &self.data[i * len..(i + 1) * len],
        }
    }

    pub fn row_mut(&mut self, i: usize) -> RowMut<'_> {
        let len = self.row_len();
        RowMut {
            field: self.field,
            cols: self.cols,
            words: &mut self.data[i * len..(i + 1) * len],
        }
    }

    pub(crate) fn row_words(&self, i: usize) -> &[u64] {
        let len = self.row_len();
        &self.data[i * len..(i + 1) * len]
    }

    pub(crate) fn row_words_mut(&mut self, i: usize) -> &mut [u64] {
        let len = self.row_len();
        &mut self.data[i * len..(i + 1) * len]
    }

    /// Plane `d` of row `i`.
    pub fn plane_row(&self, i: usize, d: usize) -> &[u64] {
        let start = i * self.row_len() + d * self.wpr;
        &self.data[start..start + self.wpr]
    }

    fn check_index(&self, i: usize, j: usize) -> Result<()> {
        if i < self.rows && j < self.cols {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                row: i,
                col: j,
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    /// The raw stored pattern of entry `(i, j)`; indices must be in range.
    pub(crate) fn pattern(&self, i: usize, j: usize) -> u8 {
        let (w, bit) = (j / W, j % W);
        let base = i * self.row_len() + w;
        (0..self.field.planes()).fold(0u8, |p, d| {
            p | (((self.data[base + d * self.wpr] >> bit) & 1) as u8) << d
        })
    }

    fn set_pattern(&mut self, i: usize, j: usize, pattern: u8) {
        let (w, bit) = (j / W, j % W);
        let base = i * self.row_len() + w;
        for d in 0..self.field.planes() {
            let word = &mut self.data[base + d * self.wpr];
            *word = (*word & !(1 << bit)) | (u64::from(pattern >> d & 1) << bit);
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Result<u32> {
        self.check_index(i, j)?;
        let p = self.pattern(i, j);
        Ok(self.field.decode(p).expect("stored patterns are valid"))
    }

    pub fn set(&mut self, i: usize, j: usize, value: u32) -> Result<()> {
        self.check_index(i, j)?;
        let e = self.field.check_residue(value)?;
        self.set_pattern(i, j, self.field.canonical(e));
        Ok(())
    }

    pub fn from_dense(dense: &DenseMatrix) -> Result<Self> {
        let field = match dense.ring() {
            Ring::Base(f) => *f,
            other => return Err(Error::Unsupported(format!("bitsliced storage of {other}"))),
        };
        let mut m = Self::zero(field, dense.rows(), dense.cols())?;
        for i in 0..dense.rows() {
            for (j, &v) in dense.row(i).iter().enumerate() {
                m.set(i, j, v)?;
            }
        }
        Ok(m)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let data = (0..self.rows)
            .flat_map(|i| (0..self.cols).map(move |j| (i, j)))
            .map(|(i, j)| self.field.decode(self.pattern(i, j)).expect("valid pattern"))
            .collect();
        DenseMatrix::new(Ring::Base(self.field), self.rows, self.cols, data).expect("shape")
    }

    /// Uniform residues, deterministic in `seed`.
    pub fn random(field: Field, rows: usize, cols: usize, seed: u64) -> Result<Self> {
        let mut m = Self::zero(field, rows, cols)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = field.order();
        let planes = field.planes();
        let wpr = m.wpr;
        if wpr == 0 {
            return Ok(m);
        }
        for row in m.data.chunks_exact_mut(planes * wpr) {
            for j in 0..cols {
                let p = field.canonical(rng.gen_range(0..q));
                for d in 0..planes {
                    row[d * wpr + j / W] |= u64::from(p >> d & 1) << (j % W);
                }
            }
        }
        Ok(m)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field.to_string(),
                right: other.field.to_string(),
            });
        }
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    fn zip_rows(&self, other: &Self, f: impl Fn(&RowOps, &mut [u64], &[u64])) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        let ops = self.ops();
        let len = self.row_len();
        if len > 0 {
            for (d, s) in out.data.chunks_exact_mut(len).zip(other.data.chunks_exact(len)) {
                f(&ops, d, s);
            }
        }
        Ok(out)
    }

    fn map_rows(&self, f: impl Fn(&RowOps, &mut [u64])) -> Self {
        let mut out = self.clone();
        let ops = self.ops();
        let len = self.row_len();
        if len > 0 {
            out.data.chunks_exact_mut(len).for_each(|r| f(&ops, r));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_rows(other, |ops, d, s| ops.add(d, s))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_rows(other, |ops, d, s| ops.sub(d, s))
    }

    pub fn neg(&self) -> Self {
        self.map_rows(|ops, r| ops.neg(r))
    }

    pub fn scalar_mul(&self, c: u32) -> Result<Self> {
        let c = self.field.check_residue(c)?;
        let mut out = self.clone();
        let ops = self.ops();
        let len = self.row_len();
        let mut scratch = Vec::with_capacity(len);
        if len > 0 {
            for r in out.data.chunks_exact_mut(len) {
                ops.scale(r, c, &mut scratch);
            }
        }
        Ok(out)
    }

    /// Rewrites every lane to its canonical pattern.
    pub fn reduce_canonical(&self) -> Self {
        self.map_rows(|ops, r| ops.reduce(r))
    }

    pub fn equals(&self, other: &Self) -> bool {
        if self.check_same(other).is_err() {
            return false;
        }
        match self.field {
            Field::F5 | Field::F7 => self.reduce_canonical().data == other.reduce_canonical().data,
            _ => self.data == other.data,
        }
    }

    /// True if every padding lane holds the zero pattern.
    pub fn padding_is_zero(&self) -> bool {
        let ops = self.ops();
        if ops.tail == u64::MAX || self.wpr == 0 {
            return true;
        }
        self.data
            .chunks_exact(self.wpr)
            .all(|plane| plane[self.wpr - 1] & !ops.tail == 0)
    }

    /// True if every lane (including padding) is a valid pattern.
    pub fn is_valid(&self) -> bool {
        match self.field {
            // (unit, sign) = (0, 1) is the only invalid F3 pattern
            Field::F3 => self.data.chunks_exact(2 * self.wpr.max(1)).all(|row| {
                let (u, s) = row.split_at(self.wpr);
                u.iter().zip(s).all(|(u, s)| s & !u == 0)
            }),
            _ => true,
        }
    }
}

impl PartialEq for BitslicedMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other)
    }
}

impl Eq for BitslicedMatrix {}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(field: Field, rows: &[Vec<u32>]) -> DenseMatrix {
        DenseMatrix::from_rows(Ring::Base(field), rows).unwrap()
    }

    #[test]
    fn zero_matrices() {
        let z = BitslicedMatrix::zero(Field::F3, 2, 2).unwrap();
        assert_eq!(z.to_dense(), dense(Field::F3, &[vec![0, 0], vec![0, 0]]));
        let e = BitslicedMatrix::zero(Field::F7, 0, 5).unwrap();
        assert!(e.equals(&e));
        assert_eq!(BitslicedMatrix::zero(Field::F5, 1, 70).unwrap().words_per_row(), 2);
        assert!(matches!(
            BitslicedMatrix::zero(Field::F7, usize::MAX, 1000),
            Err(Error::Overflow(..))
        ));
    }

    #[test]
    fn get_set() {
        let mut m = BitslicedMatrix::zero(Field::F5, 3, 3).unwrap();
        assert_eq!(m.get(1, 1).unwrap(), 0);
        m.set(1, 2, 4).unwrap();
        assert_eq!(m.get(1, 2).unwrap(), 4);
        assert!(m.set(0, 0, 5).is_err());
        assert!(m.get(3, 0).is_err());

        let mut t = BitslicedMatrix::zero(Field::F3, 1, 1).unwrap();
        t.set(0, 0, 2).unwrap();
        assert_eq!(t.pattern(0, 0), 0b11);
        assert_eq!(t.plane_row(0, 0), &[1]);
        assert_eq!(t.plane_row(0, 1), &[1]);
    }

    #[test]
    fn dense_roundtrips() {
        let d = dense(Field::F3, &[vec![1, 2], vec![0, 1]]);
        assert_eq!(BitslicedMatrix::from_dense(&d).unwrap().to_dense(), d);

        let e = DenseMatrix::zeros(Ring::Base(Field::F5), 0, 0);
        assert_eq!(BitslicedMatrix::from_dense(&e).unwrap().to_dense(), e);

        let long = DenseMatrix::random(Ring::Base(Field::F7), 1, 130, 9);
        let m = BitslicedMatrix::from_dense(&long).unwrap();
        assert_eq!(m.words_per_row(), 3);
        assert_eq!(m.to_dense(), long);
        assert!(m.padding_is_zero());
    }

    #[test]
    fn row_accumulate_f3() {
        let a = BitslicedMatrix::from_dense(&dense(Field::F3, &[vec![1, 2, 0]])).unwrap();
        let b = BitslicedMatrix::from_dense(&dense(Field::F3, &[vec![1, 1, 1]])).unwrap();
        let mut c = a.clone();
        row_accumulate(&mut c.row_mut(0), &b.row(0), Accumulate::Add).unwrap();
        assert_eq!(c.to_dense(), dense(Field::F3, &[vec![2, 0, 1]]));

        let zero = BitslicedMatrix::zero(Field::F3, 1, 3).unwrap();
        let mut d = a.clone();
        row_accumulate(&mut d.row_mut(0), &zero.row(0), Accumulate::Sub).unwrap();
        assert_eq!(d, a);
    }

    #[test]
    fn row_accumulate_f5_and_errors() {
        let a = BitslicedMatrix::from_dense(&dense(Field::F5, &[vec![4]])).unwrap();
        let mut c = a.clone();
        row_accumulate(&mut c.row_mut(0), &a.row(0), Accumulate::Add).unwrap();
        assert_eq!(c.get(0, 0).unwrap(), 3);

        let other = BitslicedMatrix::zero(Field::F7, 1, 1).unwrap();
        assert!(row_accumulate(&mut c.row_mut(0), &other.row(0), Accumulate::Add).is_err());
        let wide = BitslicedMatrix::zero(Field::F5, 1, 2).unwrap();
        assert!(row_accumulate(&mut c.row_mut(0), &wide.row(0), Accumulate::Add).is_err());
    }

    #[test]
    fn f7_negation_keeps_padding_zero() {
        let a = BitslicedMatrix::random(Field::F7, 3, 70, 4).unwrap();
        let n = a.neg();
        assert!(n.padding_is_zero());
        assert!(a.sub(&a).unwrap().padding_is_zero());
        assert!(a
            .add(&n)
            .unwrap()
            .equals(&BitslicedMatrix::zero(Field::F7, 3, 70).unwrap()));
    }

    #[test]
    fn reduce_canonical_lanes() {
        let mut m = BitslicedMatrix::zero(Field::F7, 1, 2).unwrap();
        m.set_pattern(0, 0, 7);
        m.set_pattern(0, 1, 3);
        let r = m.reduce_canonical();
        assert_eq!((r.pattern(0, 0), r.pattern(0, 1)), (0, 3));

        let mut f = BitslicedMatrix::zero(Field::F5, 1, 1).unwrap();
        f.set_pattern(0, 0, 6);
        assert_eq!(f.reduce_canonical().pattern(0, 0), 1);
        let mut g = BitslicedMatrix::zero(Field::F5, 1, 1).unwrap();
        g.set(0, 0, 1).unwrap();
        assert!(f.equals(&g));
        g.set(0, 0, 2).unwrap();
        assert!(!f.equals(&g));
    }

    #[test]
    fn scalar_mul_cases() {
        let a = BitslicedMatrix::random(Field::F7, 4, 4, 11).unwrap();
        assert!(a
            .scalar_mul(0)
            .unwrap()
            .equals(&BitslicedMatrix::zero(Field::F7, 4, 4).unwrap()));
        assert!(a.scalar_mul(1).unwrap().equals(&a));
        assert_eq!(a.scalar_mul(3).unwrap().to_dense(), a.to_dense().scalar_mul(3).unwrap());
    }

    #[test]
    fn random_is_seeded() {
        let a = BitslicedMatrix::random(Field::F3, 100, 100, 1).unwrap();
        let b = BitslicedMatrix::random(Field::F3, 100, 100, 1).unwrap();
        let c = BitslicedMatrix::random(Field::F3, 100, 100, 2).unwrap();
        assert!(a.equals(&b));
        assert!(!a.equals(&c));
        assert!(a.padding_is_zero() && a.is_valid());
    }

    #[test]
    fn random_f3_frequencies() {
        // 10^4 samples, p = 1/3: sigma = sqrt(n p (1-p)) ~ 47.1, so 5 sigma ~ 236
        let m = BitslicedMatrix::random(Field::F3, 100, 100, 5).unwrap().to_dense();
        for e in 0..3 {
            let count = m.data().iter().filter(|&&v| v == e).count() as f64;
            assert!((count - 10_000.0 / 3.0).abs() < 236.0, "residue {e}: {count}");
        }
    }

    #[test]
    fn mismatched_shapes_compare_false() {
        let a = BitslicedMatrix::zero(Field::F3, 2, 2).unwrap();
        let b = BitslicedMatrix::zero(Field::F3, 2, 3).unwrap();
        let c = BitslicedMatrix::zero(Field::F5, 2, 2).unwrap();
        assert!(!a.equals(&b));
        assert!(!a.equals(&c));
        assert!(a.add(&b).is_err());
    }
}
