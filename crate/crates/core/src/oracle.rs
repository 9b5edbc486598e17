//! Slow reference arithmetic.
//!
//! Everything here uses plain integer arithmetic on residues with no bit
//! tricks, and serves as ground truth for the bitsliced code. Extension
//! field elements are encoded as integers `c0 + c1 p + c2 p^2` over their
//! coefficients in the power basis `1, α, α^2`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::extension::ExtFieldSpec;
use crate::field::Field;

/// A base ring or an extension field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Ring {
    Base(Field),
    Ext(ExtFieldSpec),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ElementOp {
    Add,
    Sub,
    Neg,
    Mul,
    Double,
    Reduce,
}

impl ElementOp {
    pub fn arity(self) -> usize {
        match self {
            ElementOp::Add | ElementOp::Sub | ElementOp::Mul => 2,
            ElementOp::Neg | ElementOp::Double | ElementOp::Reduce => 1,
        }
    }
}

impl Ring {
    pub fn name(&self) -> String {
        match self {
            Ring::Base(f) => f.name().to_string(),
            Ring::Ext(e) => e.name(),
        }
    }

    pub fn order(&self) -> u32 {
        match self {
            Ring::Base(f) => f.order(),
            Ring::Ext(e) => e.order(),
        }
    }

    pub fn check(&self, value: u32) -> Result<u32> {
        if value < self.order() {
            Ok(value)
        } else {
            Err(Error::InvalidResidue {
                value,
                field: self.name(),
            })
        }
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        match self {
            Ring::Base(f) => (a + b) % f.order(),
            Ring::Ext(e) => e.zip_coeffs(a, b, |x, y| x + y),
        }
    }

    pub fn neg(&self, a: u32) -> u32 {
        match self {
            Ring::Base(f) => (f.order() - a) % f.order(),
            Ring::Ext(e) => {
                let p = e.base.order();
                e.map_coeffs(a, |x| (p - x) % p)
            }
        }
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match self {
            Ring::Base(f) => a * b % f.order(),
            Ring::Ext(e) => e.mul(a, b),
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Ring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.parse::<Field>() {
            Ok(f) => Ok(Ring::Base(f)),
            Err(_) => ExtFieldSpec::from_name(s).map(Ring::Ext),
        }
    }
}

/// Textbook result of `op` on `operands`.
///
/// `Reduce` accepts any stored pattern value of a base ring and returns its
/// residue; the other operations require valid residues.
pub fn oracle_element(ring: &Ring, op: ElementOp, operands: &[u32]) -> Result<u32> {
    if operands.len() != op.arity() {
        return Err(Error::DimensionMismatch(format!(
            "{op:?} takes {} operands, got {}",
            op.arity(),
            operands.len()
        )));
    }
    if op == ElementOp::Reduce {
        return match ring {
            Ring::Base(f) => Ok(operands[0] % f.order()),
            Ring::Ext(_) => ring.check(operands[0]),
        };
    }
    for &v in operands {
        ring.check(v)?;
    }
    let a = operands[0];
    Ok(match op {
        ElementOp::Add => ring.add(a, operands[1]),
        ElementOp::Sub => ring.sub(a, operands[1]),
        ElementOp::Mul => ring.mul(a, operands[1]),
        ElementOp::Neg => ring.neg(a),
        ElementOp::Double => ring.add(a, a),
        ElementOp::Reduce => unreachable!(),
    })
}

/// Row-major matrix of canonical residues.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseMatrix {
    ring: Ring,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl DenseMatrix {
    pub fn new(ring: Ring, rows: usize, cols: usize, data: Vec<u32>) -> Result<Self> {
        let len = rows.checked_mul(cols).ok_or(Error::Overflow(rows, cols))?;
        if data.len() != len {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix given {} entries",
                data.len()
            )));
        }
        for &v in &data {
            ring.check(v)?;
        }
        Ok(DenseMatrix { ring, rows, cols, data })
    }

    pub fn zeros(ring: Ring, rows: usize, cols: usize) -> Self {
        DenseMatrix {
            ring,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(ring: Ring, n: usize) -> Self {
        let mut m = DenseMatrix::zeros(ring, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(ring: Ring, rows: &[Vec<u32>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        DenseMatrix::new(ring, rows.len(), cols, rows.concat())
    }

    /// Uniform residues from a seeded generator.
    pub fn random(ring: Ring, rows: usize, cols: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = ring.order();
        let data = (0..rows * cols).map(|_| rng.gen_range(0..q)).collect();
        DenseMatrix { ring, rows, cols, data }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    fn check_same(&self, other: &DenseMatrix) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::FieldMismatch {
                left: self.ring.name(),
                right: other.ring.name(),
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

    fn zip_with(&self, other: &DenseMatrix, f: impl Fn(u32, u32) -> u32) -> Result<DenseMatrix> {
        self.check_same(other)?;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(DenseMatrix { data, ..self.clone() })
    }

    pub fn add(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.zip_with(other, |a, b| self.ring.add(a, b))
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.zip_with(other, |a, b| self.ring.sub(a, b))
    }

    pub fn neg(&self) -> DenseMatrix {
        DenseMatrix {
            data: self.data.iter().map(|&a| self.ring.neg(a)).collect(),
            ..self.clone()
        }
    }

    pub fn scalar_mul(&self, c: u32) -> Result<DenseMatrix> {
        self.ring.check(c)?;
        Ok(DenseMatrix {
            data: self.data.iter().map(|&a| self.ring.mul(a, c)).collect(),
            ..self.clone()
        })
    }

    pub fn multiply(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        oracle_multiply(self, other)
    }
}

/// Schoolbook product. Base rings accumulate each dot product in a `u64`
/// and reduce once; extension fields accumulate per polynomial coefficient
/// and reduce by the defining polynomial once per entry.
pub fn oracle_multiply(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.ring != b.ring {
        return Err(Error::FieldMismatch {
            left: a.ring.name(),
            right: b.ring.name(),
        });
    }
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "inner dimensions {} and {}",
            a.cols, b.rows
        )));
    }
    let (m, l, n) = (a.rows, a.cols, b.cols);
    let mut c = DenseMatrix::zeros(a.ring.clone(), m, n);
    match &a.ring {
        Ring::Base(f) => {
            let q = f.order() as u64;
            for i in 0..m {
                for j in 0..n {
                    let acc: u64 = (0..l).map(|t| a.get(i, t) as u64 * b.get(t, j) as u64).sum();
                    c.set(i, j, (acc % q) as u32);
                }
            }
        }
        Ring::Ext(e) => {
            let deg = e.degree();
            let mut acc = vec![0u64; 2 * deg - 1];
            for i in 0..m {
                for j in 0..n {
                    acc.iter_mut().for_each(|x| *x = 0);
                    for t in 0..l {
                        let x = e.coeffs(a.get(i, t));
                        let y = e.coeffs(b.get(t, j));
                        for (u, &xu) in x.iter().enumerate() {
                            for (v, &yv) in y.iter().enumerate() {
                                acc[u + v] += xu as u64 * yv as u64;
                            }
                        }
                    }
                    c.set(i, j, e.reduce_poly(&acc));
                }
            }
        }
    }
    Ok(c)
}

impl fmt::Display for DenseMatrix {
    /// The dense text exchange format: `field m n`, then one line per row.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} {}", self.ring, self.rows, self.cols)?;
        for i in 0..self.rows {
            let cells: Vec<String> = self
                .row(i)
                .iter()
                .map(|&v| match &self.ring {
                    Ring::Base(_) => v.to_string(),
                    Ring::Ext(e) => e.coeffs(v).iter().map(u32::to_string).collect::<Vec<_>>().join(","),
                })
                .collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for DenseMatrix {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or_else(|| Error::parse(1, "missing header"))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        let [field, m, n] = parts[..] else {
            return Err(Error::parse(hline, "header must be `field m n`"));
        };
        let ring: Ring = field.parse()?;
        let dim = |s: &str| s.parse::<usize>().map_err(|_| Error::parse(hline, "bad dimension"));
        let (m, n) = (dim(m)?, dim(n)?);
        let mut data = Vec::with_capacity(m.saturating_mul(n).min(1 << 24));
        let mut seen_rows = 0;
        for (lineno, line) in lines {
            if seen_rows == m {
                return Err(Error::parse(lineno, "too many rows"));
            }
            let cells: Vec<&str> = line.split_whitespace().collect();
            if cells.len() != n {
                return Err(Error::parse(
                    lineno,
                    format!("expected {n} entries, got {}", cells.len()),
                ));
            }
            for cell in cells {
                let v = match &ring {
                    Ring::Base(_) => cell.parse::<u32>().ok(),
                    Ring::Ext(e) => cell
                        .split(',')
                        .map(|c| c.parse::<u32>().ok())
                        .collect::<Option<Vec<_>>>()
                        .and_then(|cs| e.from_coeffs(&cs).ok()),
                }
                .ok_or_else(|| Error::parse(lineno, format!("bad entry `{cell}`")))?;
                data.push(ring.check(v).map_err(|e| Error::parse(lineno, e.to_string()))?);
            }
            seen_rows += 1;
        }
        // an m x 0 matrix prints m blank lines, which the filter drops
        if seen_rows != m && !(n == 0 && seen_rows == 0) {
            return Err(Error::parse(
                text.lines().count(),
                format!("expected {m} rows, got {seen_rows}"),
            ));
        }
        DenseMatrix::new(ring, m, n, data)
    }
}
