//! Word-parallel field arithmetic on bit planes.
//!
//! Every routine here is bit-positionwise: lane `i` of each output depends
//! only on lane `i` of each input. Planes are passed least-significant
//! first, so `[a0, a1, a2]` holds bits 0, 1, 2 of each lane. F3 planes are
//! `[unit, sign]`.
//!
//! Each routine is a literal transcription of the matching
//! [`KernelProgram`](programs::KernelProgram) in [`programs`]; the two are
//! checked against each other, including on lanes holding invalid patterns.

use std::fmt::Debug;
use std::ops::{BitAnd, BitOr, BitXor, Not};

use crate::error::{Error, Result};

pub mod programs;

pub use programs::KernelProgram;

/// A machine word whose bits are independent element lanes.
pub trait Word:
    Copy
    + Eq
    + Debug
    + Send
    + Sync
    + BitAnd<Output = Self>
    + BitOr<Output = Self>
    + BitXor<Output = Self>
    + Not<Output = Self>
{
    const BITS: u32;
    const ZERO: Self;
    const ONES: Self;

    fn lane(self, i: u32) -> bool;
    fn with_lane(self, i: u32, bit: bool) -> Self;
}

impl Word for bool {
    const BITS: u32 = 1;
    const ZERO: Self = false;
    const ONES: Self = true;

    fn lane(self, _i: u32) -> bool {
        self
    }

    fn with_lane(self, _i: u32, bit: bool) -> Self {
        bit
    }
}

macro_rules! impl_word {
    ($($t:ty),*) => {$(
        impl Word for $t {
            const BITS: u32 = <$t>::BITS;
            const ZERO: Self = 0;
            const ONES: Self = <$t>::MAX;

            #[inline(always)]
            fn lane(self, i: u32) -> bool {
                self >> i & 1 == 1
            }

            #[inline(always)]
            fn with_lane(self, i: u32, bit: bool) -> Self {
                (self & !(1 << i)) | (<$t>::from(bit) << i)
            }
        }
    )*};
}

impl_word!(u8, u16, u32, u64, u128);

#[inline(always)]
fn half_add<T: Word>(a: T, b: T) -> (T, T) {
    (a ^ b, a & b)
}

#[inline(always)]
fn full_add<T: Word>(a: T, b: T, c: T) -> (T, T) {
    let t = a ^ b;
    (t ^ c, (a & b) | (t & c))
}

/// Lanewise grade-school sum of an `n`-bit and an `m`-bit integer.
///
/// The longer operand determines `n`. The result has `n + 1` planes, or `n`
/// when `drop_final_carry` is set. Cost: `3m + 2n - 3` operations with the
/// carry kept (`m - 1` full adders, `n - m + 1` half adders).
pub fn adder_chain<T: Word>(a: &[T], b: &[T], drop_final_carry: bool) -> Result<Vec<T>> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput);
    }
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let n = long.len();
    let mut out = Vec::with_capacity(n + 1);
    let last = n - 1;
    let mut carry = T::ZERO;
    for (i, &x) in long.iter().enumerate() {
        let keep_carry = i < last || !drop_final_carry;
        match (i, short.get(i)) {
            (0, Some(&y)) => {
                let (s, c) = half_add(x, y);
                out.push(s);
                carry = c;
            }
            (_, Some(&y)) if keep_carry => {
                let (s, c) = full_add(x, y, carry);
                out.push(s);
                carry = c;
            }
            (_, Some(&y)) => out.push(x ^ y ^ carry),
            (_, None) if keep_carry => {
                let (s, c) = half_add(x, carry);
                out.push(s);
                carry = c;
            }
            (_, None) => out.push(x ^ carry),
        }
    }
    if !drop_final_carry {
        out.push(carry);
    }
    Ok(out)
}

#[inline(always)]
fn add3<T: Word>(a: [T; 3], b: [T; 3]) -> [T; 4] {
    let (s0, c0) = half_add(a[0], b[0]);
    let (s1, c1) = full_add(a[1], b[1], c0);
    let (s2, c2) = full_add(a[2], b[2], c1);
    [s0, s1, s2, c2]
}

/// `Z/4` addition in 4 operations.
#[inline(always)]
pub fn z4_add<T: Word>(a: [T; 2], b: [T; 2]) -> [T; 2] {
    [a[0] ^ b[0], (a[1] ^ b[1]) ^ (a[0] & b[0])]
}

#[inline(always)]
pub fn z4_neg<T: Word>(a: [T; 2]) -> [T; 2] {
    [a[0], a[1] ^ a[0]]
}

#[inline(always)]
pub fn z4_double<T: Word>(a: [T; 2]) -> [T; 2] {
    [T::ZERO, a[0]]
}

/// F3 addition in 6 operations; `x0 ^ y1` and `x1 ^ y0` are shared.
#[inline(always)]
pub fn f3_add<T: Word>(x: [T; 2], y: [T; 2]) -> [T; 2] {
    let p = x[0] ^ y[1];
    let q = x[1] ^ y[0];
    let s = p ^ x[1];
    let t = q ^ y[1];
    [s | t, p & q]
}

/// F3 negation: flip the sign bit of units.
#[inline(always)]
pub fn f3_neg<T: Word>(a: [T; 2]) -> [T; 2] {
    [a[0], a[0] ^ a[1]]
}

/// F3 subtraction in 6 operations.
#[inline(always)]
pub fn f3_sub<T: Word>(x: [T; 2], y: [T; 2]) -> [T; 2] {
    let t = x[0] ^ y[0];
    [t | (x[1] ^ y[1]), (t ^ y[1]) & (y[0] ^ x[1])]
}

/// Folds a 4-bit lane (value 0..=14) into 3 bits, preserving it mod 5.
/// 8 operations.
#[inline(always)]
pub fn f5_fold5<T: Word>(s: [T; 4]) -> [T; 3] {
    let t = s[2] | s[1];
    let r2 = s[0] ^ t;
    let r1 = (r2 & s[0]) ^ (s[3] ^ s[1]);
    let r0 = (t ^ s[2]) | (r1 & s[3]);
    [r0, r1, r2]
}

/// The readable 13-operation fold: `8 = 3 (mod 5)` and `4 = -1 (mod 5)`, so
/// `s = (4*!s3 + 2*s3 + !s2) + (2*s1 + s0) (mod 5)`; that sum is at most 8,
/// and the single out-of-range value 8 is mapped onto 3.
#[inline(always)]
pub fn f5_fold5_readable<T: Word>(s: [T; 4]) -> [T; 3] {
    let n = [!s[2], s[3], !s[3]];
    let (e0, c0) = half_add(n[0], s[0]);
    let (e1, c1) = full_add(n[1], s[1], c0);
    let (e2, e3) = half_add(n[2], c1);
    [e0 | e3, e1 | e3, e2]
}

/// F5 addition: 3-bit adder (12 ops) then fold5 (8 ops).
#[inline(always)]
pub fn f5_add<T: Word>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    f5_fold5(add3(a, b))
}

/// F5 doubling in 2 ops. `2a = 2a0 + 4a1 + 3a2 (mod 5)`: plane 2 takes
/// `a1`, and `(a2 & !a0) + 2(a0 ^ a2)` is congruent to `2a0 + 3a2` in all
/// four cases.
#[inline(always)]
pub fn f5_double<T: Word>(a: [T; 3]) -> [T; 3] {
    let t = a[0] ^ a[2];
    [a[2] & t, t, a[1]]
}

/// F5 negation: fold5 of `a1 a0 0 a2` (worth `-a mod 5`), 4 ops.
#[inline(always)]
pub fn f5_neg<T: Word>(a: [T; 3]) -> [T; 3] {
    let r2 = a[2] ^ a[0];
    let r1 = (r2 & a[2]) ^ a[1];
    [r1 & a[1], r1, r2]
}

/// Canonical F5 representative (5, 6, 7 become 0, 1, 2) in 6 ops.
#[inline(always)]
pub fn f5_reduce<T: Word>(a: [T; 3]) -> [T; 3] {
    let g = a[2] & (a[1] | a[0]);
    let r0 = a[0] ^ g;
    [r0, a[1] ^ (g & r0), a[2] ^ g]
}

/// F7 addition in 17 ops: the carry out of the 3-bit sum is worth 8 = 1,
/// so it is added back in; that second addition cannot overflow.
#[inline(always)]
pub fn f7_add<T: Word>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    let [s0, s1, s2, s3] = add3(a, b);
    let (r0, c0) = half_add(s0, s3);
    let (r1, c1) = half_add(s1, c0);
    [r0, r1, s2 ^ c1]
}

/// F7 doubling is a plane rotation.
#[inline(always)]
pub fn f7_double<T: Word>(a: [T; 3]) -> [T; 3] {
    [a[2], a[0], a[1]]
}

/// F7 negation: `7 - v`.
#[inline(always)]
pub fn f7_neg<T: Word>(a: [T; 3]) -> [T; 3] {
    [!a[0], !a[1], !a[2]]
}

/// Canonical F7 representative: only 7 changes (to 0).
#[inline(always)]
pub fn f7_reduce<T: Word>(a: [T; 3]) -> [T; 3] {
    let t = a[0] & a[1] & a[2];
    [a[0] ^ t, a[1] ^ t, a[2] ^ t]
}

/// `Z/8` addition with the final carry dropped (9 ops).
#[inline(always)]
pub fn z8_add<T: Word>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    let (s0, c0) = half_add(a[0], b[0]);
    let (s1, c1) = full_add(a[1], b[1], c0);
    [s0, s1, a[2] ^ b[2] ^ c1]
}

#[inline(always)]
pub fn z8_double<T: Word>(a: [T; 3]) -> [T; 3] {
    [T::ZERO, a[0], a[1]]
}

/// Two's complement negation, 3 ops.
#[inline(always)]
pub fn z8_neg<T: Word>(a: [T; 3]) -> [T; 3] {
    [a[0], a[1] ^ a[0], a[2] ^ (a[1] | a[0])]
}
