//! Matrices over `F_{p^n}` for `n` in {2, 3}.
//!
//! A matrix `A = A0 + αA1 + ... + α^{n-1}A_{n-1}` is stored as its `n`
//! base-field coefficient matrices. Products are formed as polynomials in
//! `α` with matrix coefficients, using 3 base multiplications for `n = 2`
//! (Karatsuba) and 6 for `n = 3`, then reduced by the defining polynomial,
//! which only needs additions and scalar multiples.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::m4rm::{m4rm_multiply, M4rmParams};
use crate::matrix::BitslicedMatrix;
use crate::oracle::{DenseMatrix, Ring};

/// `F_p[x] / (f)` for a monic irreducible `f` of degree 2 or 3.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtFieldSpec {
    pub base: Field,
    /// Low coefficients `c0..c_{n-1}` of `f = x^n + Σ c_i x^i`.
    low: Vec<u32>,
}

impl ExtFieldSpec {
    pub fn new(base: Field, low: &[u32]) -> Result<Self> {
        if !matches!(base, Field::F2 | Field::F3 | Field::F5) {
            return Err(Error::Unsupported(format!("extensions of {base}")));
        }
        if !(2..=3).contains(&low.len()) {
            return Err(Error::Unsupported(format!("degree {}", low.len())));
        }
        let p = base.order();
        for &c in low {
            base.check_residue(c)?;
        }
        let spec = ExtFieldSpec {
            base,
            low: low.to_vec(),
        };
        // a polynomial of degree at most 3 without roots is irreducible
        if let Some(r) = (0..p).find(|&r| spec.eval_defining(r) == 0) {
            return Err(Error::Reducible(format!(
                "{} has root {r} over {base}",
                spec.poly_string()
            )));
        }
        Ok(spec)
    }

    pub fn f4() -> Self {
        Self::new(Field::F2, &[1, 1]).unwrap()
    }

    pub fn f8() -> Self {
        Self::new(Field::F2, &[1, 1, 0]).unwrap()
    }

    pub fn f9() -> Self {
        Self::new(Field::F3, &[1, 0]).unwrap()
    }

    pub fn f25() -> Self {
        Self::new(Field::F5, &[3, 0]).unwrap()
    }

    pub fn f27() -> Self {
        Self::new(Field::F3, &[1, 2, 0]).unwrap()
    }

    pub fn all() -> Vec<Self> {
        vec![Self::f4(), Self::f8(), Self::f9(), Self::f25(), Self::f27()]
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "f4" | "gf4" => Ok(Self::f4()),
            "f8" | "gf8" => Ok(Self::f8()),
            "f9" | "gf9" => Ok(Self::f9()),
            "f25" | "gf25" => Ok(Self::f25()),
            "f27" | "gf27" => Ok(Self::f27()),
            _ => Err(Error::UnknownField(name.to_string())),
        }
    }

    pub fn name(&self) -> String {
        format!("f{}", self.order())
    }

    pub fn degree(&self) -> usize {
        self.low.len()
    }

    pub fn order(&self) -> u32 {
        self.base.order().pow(self.degree() as u32)
    }

    /// Low coefficients of the defining polynomial.
    pub fn defining_low(&self) -> &[u32] {
        &self.low
    }

    fn eval_defining(&self, x: u32) -> u32 {
        let p = self.base.order();
        let mut v = 1;
        for &c in self.low.iter().rev() {
            v = (v * x + c) % p;
        }
        v
    }

    /// The defining polynomial, e.g. `x^2 + x + 1`; coefficients as residues.
    pub fn poly_string(&self) -> String {
        let mut terms = vec![format!("x^{}", self.degree())];
        for (i, &c) in self.low.iter().enumerate().rev() {
            let mono = match i {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            };
            match (c, i) {
                (0, _) => {}
                (1, 0) => terms.push("1".to_string()),
                (1, _) => terms.push(mono),
                _ => terms.push(format!("{c}{mono}")),
            }
        }
        terms.join(" + ")
    }

    /// Coefficients of `1, α, α^2` of an encoded element.
    pub fn coeffs(&self, mut v: u32) -> Vec<u32> {
        let p = self.base.order();
        (0..self.degree())
            .map(|_| {
                let c = v % p;
                v /= p;
                c
            })
            .collect()
    }

    pub fn from_coeffs(&self, cs: &[u32]) -> Result<u32> {
        if cs.len() != self.degree() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for degree {}",
                cs.len(),
                self.degree()
            )));
        }
        let p = self.base.order();
        let mut v = 0;
        for &c in cs.iter().rev() {
            v = v * p + self.base.check_residue(c)?;
        }
        Ok(v)
    }

    fn encode_mod(&self, cs: impl DoubleEndedIterator<Item = u64>) -> u32 {
        let p = self.base.order() as u64;
        cs.rev().fold(0, |v, c| v * p + c % p) as u32
    }

    pub fn zip_coeffs(&self, a: u32, b: u32, f: impl Fn(u32, u32) -> u32) -> u32 {
        let (x, y) = (self.coeffs(a), self.coeffs(b));
        self.encode_mod(x.iter().zip(&y).map(|(&u, &v)| f(u, v) as u64))
    }

    pub fn map_coeffs(&self, a: u32, f: impl Fn(u32) -> u32) -> u32 {
        self.encode_mod(self.coeffs(a).into_iter().map(|u| f(u) as u64))
    }

    /// Reduces `Σ acc_i x^i` (any length) modulo the defining polynomial.
    pub fn reduce_poly(&self, acc: &[u64]) -> u32 {
        let p = self.base.order() as u64;
        let n = self.degree();
        let mut c: Vec<u64> = acc.iter().map(|&x| x % p).collect();
        c.resize(c.len().max(n), 0);
        for d in (n..c.len()).rev() {
            let top = c[d];
            c[d] = 0;
            for (i, &li) in self.low.iter().enumerate() {
                // x^n = -Σ c_i x^i
                c[d - n + i] = (c[d - n + i] + top * (p - li as u64)) % p;
            }
        }
        self.encode_mod(c[..n].iter().copied())
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        let (x, y) = (self.coeffs(a), self.coeffs(b));
        let mut acc = vec![0u64; 2 * self.degree() - 1];
        for (i, &u) in x.iter().enumerate() {
            for (j, &v) in y.iter().enumerate() {
                acc[i + j] += u as u64 * v as u64;
            }
        }
        self.reduce_poly(&acc)
    }

    /// Human-readable element, e.g. `α + 1` or `2α^2`.
    pub fn element_string(&self, v: u32) -> String {
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs(v).iter().enumerate().rev() {
            let mono = match i {
                0 => String::new(),
                1 => "α".to_string(),
                _ => format!("α^{i}"),
            };
            match (c, i) {
                (0, _) => {}
                (1, 0) => terms.push("1".to_string()),
                (1, _) => terms.push(mono),
                _ => terms.push(format!("{c}{mono}")),
            }
        }
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        }
    }
}

impl fmt::Display for ExtFieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for ExtFieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_name(s)
    }
}

#[derive(Clone, Debug)]
pub struct ExtMatrix {
    spec: ExtFieldSpec,
    coeffs: Vec<BitslicedMatrix>,
}

impl ExtMatrix {
    pub fn new(spec: ExtFieldSpec, coeffs: Vec<BitslicedMatrix>) -> Result<Self> {
        if coeffs.len() != spec.degree() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficient matrices for degree {}",
                coeffs.len(),
                spec.degree()
            )));
        }
        let (r, c) = (coeffs[0].rows(), coeffs[0].cols());
        for m in &coeffs {
            if m.field() != spec.base {
                return Err(Error::FieldMismatch {
                    left: m.field().to_string(),
                    right: spec.base.to_string(),
                });
            }
            if (m.rows(), m.cols()) != (r, c) {
                return Err(Error::DimensionMismatch("coefficient shapes differ".into()));
            }
        }
        Ok(ExtMatrix { spec, coeffs })
    }

    pub fn zero(spec: ExtFieldSpec, rows: usize, cols: usize) -> Result<Self> {
        let coeffs = (0..spec.degree())
            .map(|_| BitslicedMatrix::zero(spec.base, rows, cols))
            .collect::<Result<_>>()?;
        Ok(ExtMatrix { spec, coeffs })
    }

    pub fn identity(spec: ExtFieldSpec, n: usize) -> Result<Self> {
        let mut m = Self::zero(spec, n, n)?;
        m.coeffs[0] = BitslicedMatrix::identity(m.spec.base, n)?;
        Ok(m)
    }

    pub fn random(spec: ExtFieldSpec, rows: usize, cols: usize, seed: u64) -> Result<Self> {
        let coeffs = (0..spec.degree() as u64)
            .map(|i| BitslicedMatrix::random(spec.base, rows, cols, seed.wrapping_mul(31).wrapping_add(i)))
            .collect::<Result<_>>()?;
        Ok(ExtMatrix { spec, coeffs })
    }

    pub fn spec(&self) -> &ExtFieldSpec {
        &self.spec
    }

    pub fn rows(&self) -> usize {
        self.coeffs[0].rows()
    }

    pub fn cols(&self) -> usize {
        self.coeffs[0].cols()
    }

    /// `A0, A1, ...` in increasing powers of `α`.
    pub fn coeffs(&self) -> &[BitslicedMatrix] {
        &self.coeffs
    }

    pub fn get(&self, i: usize, j: usize) -> Result<u32> {
        let cs = self.coeffs.iter().map(|m| m.get(i, j)).collect::<Result<Vec<_>>>()?;
        self.spec.from_coeffs(&cs)
    }

    pub fn from_dense(dense: &DenseMatrix) -> Result<Self> {
        let Ring::Ext(spec) = dense.ring() else {
            return Err(Error::Unsupported(format!(
                "{} is not an extension field",
                dense.ring()
            )));
        };
        let (r, c) = (dense.rows(), dense.cols());
        let mut m = Self::zero(spec.clone(), r, c)?;
        for i in 0..r {
            for j in 0..c {
                for (d, x) in spec.coeffs(dense.get(i, j)).into_iter().enumerate() {
                    m.coeffs[d].set(i, j, x)?;
                }
            }
        }
        Ok(m)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(Ring::Ext(self.spec.clone()), self.rows(), self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.set(i, j, self.get(i, j).expect("valid coefficients"));
            }
        }
        out
    }

    pub fn equals(&self, other: &Self) -> bool {
        self.spec == other.spec && self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a.equals(b))
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::FieldMismatch {
                left: self.spec.name(),
                right: other.spec.name(),
            });
        }
        Ok(())
    }

    fn zip(
        &self,
        other: &Self,
        f: impl Fn(&BitslicedMatrix, &BitslicedMatrix) -> Result<BitslicedMatrix>,
    ) -> Result<Self> {
        self.check_same(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| f(a, b))
            .collect::<Result<_>>()?;
        Ok(ExtMatrix {
            spec: self.spec.clone(),
            coeffs,
        })
    }
}

impl PartialEq for ExtMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other)
    }
}

pub fn ext_add(a: &ExtMatrix, b: &ExtMatrix) -> Result<ExtMatrix> {
    a.zip(b, BitslicedMatrix::add)
}

pub fn ext_sub(a: &ExtMatrix, b: &ExtMatrix) -> Result<ExtMatrix> {
    a.zip(b, BitslicedMatrix::sub)
}

pub fn ext_neg(a: &ExtMatrix) -> ExtMatrix {
    ExtMatrix {
        spec: a.spec.clone(),
        coeffs: a.coeffs.iter().map(BitslicedMatrix::neg).collect(),
    }
}

/// `dst += c * src` using only add, sub and scalar multiplication.
fn add_multiple(dst: &BitslicedMatrix, src: &BitslicedMatrix, c: u32) -> Result<BitslicedMatrix> {
    let p = src.field().order();
    match c % p {
        0 => Ok(dst.clone()),
        1 => dst.add(src),
        x if x == p - 1 => dst.sub(src),
        x => dst.add(&src.scalar_mul(x)?),
    }
}

/// Reduces `Σ x^i P_i` (2n-1 matrices) modulo the defining polynomial.
pub fn poly_reduce(ps: &[BitslicedMatrix], spec: &ExtFieldSpec) -> Result<Vec<BitslicedMatrix>> {
    let n = spec.degree();
    if ps.len() != 2 * n - 1 {
        return Err(Error::DimensionMismatch(format!(
            "{} coefficients, expected {}",
            ps.len(),
            2 * n - 1
        )));
    }
    let p = spec.base.order();
    let mut c = ps.to_vec();
    for d in (n..c.len()).rev() {
        for (i, &li) in spec.low.iter().enumerate() {
            c[d - n + i] = add_multiple(&c[d - n + i], &c[d], p - li)?;
        }
    }
    c.truncate(n);
    Ok(c)
}

fn check_product(a: &ExtMatrix, b: &ExtMatrix, degree: usize) -> Result<()> {
    a.check_same(b)?;
    if a.spec.degree() != degree {
        return Err(Error::Unsupported(format!(
            "{} has degree {}, expected {degree}",
            a.spec,
            a.spec.degree()
        )));
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

type BaseMul<'a> = dyn Fn(&BitslicedMatrix, &BitslicedMatrix) -> Result<BitslicedMatrix> + 'a;

/// Karatsuba: `P0 = A0B0`, `P2 = A1B1`, `P1 = (A0+A1)(B0+B1) - P0 - P2`.
pub fn ext_multiply_quadratic_with(a: &ExtMatrix, b: &ExtMatrix, mul: &BaseMul<'_>) -> Result<ExtMatrix> {
    check_product(a, b, 2)?;
    let [a0, a1] = &a.coeffs[..] else { unreachable!() };
    let [b0, b1] = &b.coeffs[..] else { unreachable!() };
    let p0 = mul(a0, b0)?;
    let p2 = mul(a1, b1)?;
    let p1 = mul(&a0.add(a1)?, &b0.add(b1)?)?.sub(&p0)?.sub(&p2)?;
    ExtMatrix::new(a.spec.clone(), poly_reduce(&[p0, p1, p2], &a.spec)?)
}

/// Six products for the five coefficients of a product of quadratics.
pub fn ext_multiply_cubic_with(a: &ExtMatrix, b: &ExtMatrix, mul: &BaseMul<'_>) -> Result<ExtMatrix> {
    check_product(a, b, 3)?;
    let [a0, a1, a2] = &a.coeffs[..] else { unreachable!() };
    let [b0, b1, b2] = &b.coeffs[..] else { unreachable!() };
    let c0 = mul(a0, b0)?;
    let c4 = mul(a2, b2)?;
    let m1 = mul(a1, b1)?;
    let c1 = mul(&a0.add(a1)?, &b0.add(b1)?)?.sub(&c0)?.sub(&m1)?;
    let c3 = mul(&a2.add(a1)?, &b2.add(b1)?)?.sub(&c4)?.sub(&m1)?;
    let c2 = mul(&a0.add(a2)?, &b0.add(b2)?)?.sub(&c0)?.sub(&c4)?.add(&m1)?;
    ExtMatrix::new(a.spec.clone(), poly_reduce(&[c0, c1, c2, c3, c4], &a.spec)?)
}

pub fn ext_multiply_quadratic(a: &ExtMatrix, b: &ExtMatrix, params: M4rmParams) -> Result<ExtMatrix> {
    ext_multiply_quadratic_with(a, b, &|x, y| m4rm_multiply(x, y, params))
}

pub fn ext_multiply_cubic(a: &ExtMatrix, b: &ExtMatrix, params: M4rmParams) -> Result<ExtMatrix> {
    ext_multiply_cubic_with(a, b, &|x, y| m4rm_multiply(x, y, params))
}

/// Product by degree, also returning the number of base multiplications.
pub fn ext_multiply_counted(a: &ExtMatrix, b: &ExtMatrix, params: M4rmParams) -> Result<(ExtMatrix, usize)> {
    let count = AtomicUsize::new(0);
    let mul = |x: &BitslicedMatrix, y: &BitslicedMatrix| {
        count.fetch_add(1, Ordering::Relaxed);
        m4rm_multiply(x, y, params)
    };
    let c = match a.spec.degree() {
        2 => ext_multiply_quadratic_with(a, b, &mul)?,
        _ => ext_multiply_cubic_with(a, b, &mul)?,
    };
    Ok((c, count.into_inner()))
}

pub fn ext_multiply(a: &ExtMatrix, b: &ExtMatrix, params: M4rmParams) -> Result<ExtMatrix> {
    ext_multiply_counted(a, b, params).map(|(c, _)| c)
}
