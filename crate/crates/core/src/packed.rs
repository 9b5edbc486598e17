//! Integer-packed rows: the classical alternative to bitslicing.
//!
//! Each element occupies a 3-bit slot, 21 slots per 64-bit word, with the
//! top bit of every slot kept free so that integer addition cannot carry
//! from one slot into the next.

use crate::error::{Error, Result};
use crate::field::Field;

pub const BITS_PER_SLOT: usize = 3;
pub const SLOTS_PER_WORD: usize = 64 / BITS_PER_SLOT;

const fn every_slot(pattern: u64) -> u64 {
    let mut m = 0;
    let mut i = 0;
    while i < SLOTS_PER_WORD {
        m |= pattern << (i * BITS_PER_SLOT);
        i += 1;
    }
    m
}

/// `011` in every slot.
pub const LOW_MASK: u64 = every_slot(0b011);
/// `100` in every slot.
pub const HIGH_MASK: u64 = every_slot(0b100);

/// Slotwise `dst <- (dst + src) mod 4`: one add and one mask per word.
#[inline]
pub fn z4_padded_add_words(dst: &mut [u64], src: &[u64]) {
    for (d, &s) in dst.iter_mut().zip(src) {
        *d = d.wrapping_add(s) & LOW_MASK;
    }
}

/// Slotwise F3 addition in 5 operations per word. With `x` the low two
/// bits and `y` the top bit of each slot sum, `x + y/4` drops 4 and adds 1,
/// i.e. subtracts 3. Slots hold values in `0..=3`, with 3 standing for 0;
/// that set is closed under this addition.
#[inline]
pub fn f3_packed_add_words(dst: &mut [u64], src: &[u64]) {
    for (d, &s) in dst.iter_mut().zip(src) {
        let c = d.wrapping_add(s);
        *d = (c & LOW_MASK) + ((c & HIGH_MASK) >> 2);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackedRow {
    field: Field,
    len: usize,
    words: Vec<u64>,
}

impl PackedRow {
    pub fn zero(field: Field, len: usize) -> Result<Self> {
        if !matches!(field, Field::F3 | Field::Z4) {
            return Err(Error::Unsupported(format!("packed rows over {field}")));
        }
        Ok(PackedRow {
            field,
            len,
            words: vec![0; len.div_ceil(SLOTS_PER_WORD)],
        })
    }

    pub fn from_values(field: Field, values: &[u32]) -> Result<Self> {
        let mut row = Self::zero(field, values.len())?;
        for (i, &v) in values.iter().enumerate() {
            row.set(i, v)?;
        }
        Ok(row)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    /// The raw slot content.
    pub fn slot(&self, i: usize) -> u32 {
        let (w, s) = (i / SLOTS_PER_WORD, i % SLOTS_PER_WORD * BITS_PER_SLOT);
        (self.words[w] >> s & 0b111) as u32
    }

    /// The residue held in slot `i`.
    pub fn get(&self, i: usize) -> u32 {
        self.slot(i) % self.field.order()
    }

    pub fn set(&mut self, i: usize, v: u32) -> Result<()> {
        if i >= self.len {
            return Err(Error::IndexOutOfRange {
                row: 0,
                col: i,
                rows: 1,
                cols: self.len,
            });
        }
        let v = self.field.check_residue(v)?;
        let (w, s) = (i / SLOTS_PER_WORD, i % SLOTS_PER_WORD * BITS_PER_SLOT);
        self.words[w] = self.words[w] & !(0b111 << s) | (v as u64) << s;
        Ok(())
    }

    pub fn values(&self) -> Vec<u32> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field.to_string(),
                right: other.field.to_string(),
            });
        }
        if self.len != other.len {
            return Err(Error::DimensionMismatch(format!(
                "lengths {} and {}",
                self.len, other.len
            )));
        }
        Ok(())
    }
}

pub fn z4_padded_add(a: &PackedRow, b: &PackedRow) -> Result<PackedRow> {
    a.check(b)?;
    if a.field != Field::Z4 {
        return Err(Error::Unsupported(format!("z4 padded add over {}", a.field)));
    }
    let mut c = a.clone();
    z4_padded_add_words(&mut c.words, &b.words);
    Ok(c)
}

pub fn f3_packed_row_add(a: &PackedRow, b: &PackedRow) -> Result<PackedRow> {
    a.check(b)?;
    if a.field != Field::F3 {
        return Err(Error::Unsupported(format!("f3 packed add over {}", a.field)));
    }
    let mut c = a.clone();
    f3_packed_add_words(&mut c.words, &b.words);
    Ok(c)
}

/// Entries of a length-`n` dot product over F_p that fit in a 53-bit
/// mantissa without overflow: `floor(53 / log2(n (p-1)^2))`, with the bit
/// width clamped to at least 1.
pub fn double_packing_capacity(n: u64, p: u64) -> u32 {
    let bits = ((n as f64) * ((p.saturating_sub(1)) as f64).powi(2)).log2().max(1.0);
    (53.0 / bits).floor() as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn masks() {
        assert_eq!(LOW_MASK & 0o777, 0o333);
        assert_eq!(HIGH_MASK & 0o777, 0o444);
        assert_eq!((LOW_MASK | HIGH_MASK).count_ones(), 63);
        assert_eq!(SLOTS_PER_WORD, 21);
    }

    #[test]
    fn z4_examples() {
        let a = PackedRow::from_values(Field::Z4, &[3, 2]).unwrap();
        let b = PackedRow::from_values(Field::Z4, &[2, 3]).unwrap();
        assert_eq!(z4_padded_add(&a, &b).unwrap().values(), [1, 1]);
        let z = PackedRow::zero(Field::Z4, 2).unwrap();
        assert_eq!(z4_padded_add(&z, &a).unwrap(), a);
    }

    #[test]
    fn z4_all_pairs_in_one_word() {
        let (xs, ys): (Vec<u32>, Vec<u32>) = (0..16).map(|i| (i / 4, i % 4)).unzip();
        let a = PackedRow::from_values(Field::Z4, &xs).unwrap();
        let b = PackedRow::from_values(Field::Z4, &ys).unwrap();
        let c = z4_padded_add(&a, &b).unwrap();
        assert_eq!(c.words().len(), 1);
        for i in 0..16 {
            assert_eq!(c.slot(i), (xs[i] + ys[i]) % 4);
        }
    }

    #[test]
    fn f3_all_pairs_in_one_word() {
        let (xs, ys): (Vec<u32>, Vec<u32>) = (0..9).map(|i| (i / 3, i % 3)).unzip();
        let a = PackedRow::from_values(Field::F3, &xs).unwrap();
        let b = PackedRow::from_values(Field::F3, &ys).unwrap();
        let c = f3_packed_row_add(&a, &b).unwrap();
        for i in 0..9 {
            assert_eq!(c.get(i), (xs[i] + ys[i]) % 3);
            assert!(c.slot(i) <= 3);
        }
        let two = PackedRow::from_values(Field::F3, &[2]).unwrap();
        assert_eq!(f3_packed_row_add(&two, &two).unwrap().values(), [1]);
        let z = PackedRow::zero(Field::F3, 9).unwrap();
        assert_eq!(f3_packed_row_add(&z, &a).unwrap(), a);
    }

    #[test]
    fn f3_lazy_slots_stay_closed() {
        // raw slot values 0..=3, with 3 standing for 0
        for x in 0..4u64 {
            for y in 0..4u64 {
                let mut d = [x << 60];
                f3_packed_add_words(&mut d, &[y << 60]);
                let r = d[0] >> 60;
                assert!(r <= 3);
                assert_eq!(r % 3, (x + y) % 3);
            }
        }
    }

    #[test]
    fn repeated_adds_over_many_words() {
        let xs: Vec<u32> = (0..100).map(|i| i % 3).collect();
        let mut acc = PackedRow::zero(Field::F3, 100).unwrap();
        let a = PackedRow::from_values(Field::F3, &xs).unwrap();
        for _ in 0..7 {
            acc = f3_packed_row_add(&acc, &a).unwrap();
        }
        let expect: Vec<u32> = xs.iter().map(|x| x * 7 % 3).collect();
        assert_eq!(acc.values(), expect);
    }

    #[test]
    fn capacity() {
        assert_eq!(double_packing_capacity(1000, 5), 3);
        assert_eq!(double_packing_capacity(1000, 7), 3);
        assert_eq!(double_packing_capacity(1, 2), 53);
    }

    #[test]
    fn errors() {
        assert!(PackedRow::zero(Field::F5, 3).is_err());
        let a = PackedRow::zero(Field::F3, 3).unwrap();
        let b = PackedRow::zero(Field::Z4, 3).unwrap();
        assert!(f3_packed_row_add(&a, &b).is_err());
        assert!(z4_padded_add(&a, &a).is_err());
        let mut c = PackedRow::zero(Field::F3, 3).unwrap();
        assert!(c.set(3, 1).is_err());
        assert!(c.set(0, 3).is_err());
    }
}
