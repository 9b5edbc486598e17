//! The small fields and rings supported by the bitsliced representation.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A base ring whose elements are stored across bit planes.
///
/// `F3` uses a (unit, sign) encoding: `0 = (0,0)`, `1 = (1,0)`, `-1 = (1,1)`.
/// `F5` and `F7` use plain 3-bit binary with non-unique representatives
/// (any pattern `v` stands for `v mod p`). `Z4` and `Z8` are binary with
/// the final carry dropped. `F2` is a single plane with addition = XOR.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    F2,
    F3,
    F5,
    F7,
    Z4,
    Z8,
}

impl Field {
    pub const ALL: [Field; 6] = [Field::F2, Field::F3, Field::F5, Field::F7, Field::Z4, Field::Z8];

    /// The prime fields multiplied by the benchmarks and acceptance runs.
    pub const PRIMES: [Field; 4] = [Field::F2, Field::F3, Field::F5, Field::F7];

    pub fn name(self) -> &'static str {
        match self {
            Field::F2 => "f2",
            Field::F3 => "f3",
            Field::F5 => "f5",
            Field::F7 => "f7",
            Field::Z4 => "z4",
            Field::Z8 => "z8",
        }
    }

    /// Number of residues (p for a prime field, 2^k for `Z/2^k`).
    pub fn order(self) -> u32 {
        match self {
            Field::F2 => 2,
            Field::F3 => 3,
            Field::F5 => 5,
            Field::F7 => 7,
            Field::Z4 => 4,
            Field::Z8 => 8,
        }
    }

    pub fn is_field(self) -> bool {
        !matches!(self, Field::Z4 | Field::Z8)
    }

    /// Bits per element, i.e. the number of planes.
    pub fn planes(self) -> usize {
        match self {
            Field::F2 => 1,
            Field::F3 | Field::Z4 => 2,
            Field::F5 | Field::F7 | Field::Z8 => 3,
        }
    }

    /// Residue represented by an `r`-bit pattern (bit d = plane d), or
    /// `None` if the pattern is not a legal representation.
    pub fn decode(self, pattern: u8) -> Option<u32> {
        if pattern as usize >= 1 << self.planes() {
            return None;
        }
        match self {
            Field::F3 => match pattern {
                0b00 => Some(0),
                0b01 => Some(1),
                0b11 => Some(2),
                _ => None,
            },
            _ => Some(pattern as u32 % self.order()),
        }
    }

    /// Canonical pattern stored for a residue. The residue must be in range.
    pub fn canonical(self, residue: u32) -> u8 {
        debug_assert!(residue < self.order());
        match self {
            Field::F3 => [0b00, 0b01, 0b11][residue as usize],
            _ => residue as u8,
        }
    }

    pub fn check_residue(self, value: u32) -> Result<u32> {
        if value < self.order() {
            Ok(value)
        } else {
            Err(Error::InvalidResidue {
                value,
                field: self.name().to_string(),
            })
        }
    }

    /// Additive basis α_0..α_{r-1}: `{1, -1}` for F3, the power basis
    /// `{1, 2, 4}` (truncated to r) otherwise.
    pub fn additive_basis(self) -> Vec<u32> {
        match self {
            Field::F3 => vec![1, 2],
            _ => (0..self.planes()).map(|d| (1u32 << d) % self.order()).collect(),
        }
    }

    /// φ_d(a): the 0/1 coefficient of basis element `d` in residue `a`.
    pub fn basis_coefficient(self, d: usize, residue: u32) -> u32 {
        match self {
            Field::F3 => u32::from(residue == [1, 2][d]),
            _ => (residue >> d) & 1,
        }
    }

    pub fn spec(self) -> FieldSpec {
        let r = self.planes();
        let decode: Vec<Option<u32>> = (0..1u8 << r).map(|p| self.decode(p)).collect();
        FieldSpec {
            field: self,
            name: self.name(),
            order: self.order(),
            bits_per_element: r,
            valid_patterns: (0..1u8 << r).filter(|&p| decode[p as usize].is_some()).collect(),
            decode,
            canonical: (0..self.order()).map(|e| self.canonical(e)).collect(),
            additive_basis: self.additive_basis(),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Field::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownField(s.to_string()))
    }
}

/// Tabulated description of a [`Field`]'s representation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldSpec {
    pub field: Field,
    pub name: &'static str,
    pub order: u32,
    pub bits_per_element: usize,
    pub valid_patterns: Vec<u8>,
    /// Indexed by pattern.
    pub decode: Vec<Option<u32>>,
    /// Indexed by residue.
    pub canonical: Vec<u8>,
    pub additive_basis: Vec<u32>,
}

impl FieldSpec {
    pub fn phi(&self, d: usize, residue: u32) -> u32 {
        self.field.basis_coefficient(d, residue)
    }
}
