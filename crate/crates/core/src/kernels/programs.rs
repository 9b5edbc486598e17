//! Kernels as [`SequentialProgram`]s, so operation counts are data.
//!
//! Programs are assembled with a small constant-folding builder. NOT is
//! expressed as XOR with an extra all-ones input, which is always the last
//! input when present.

use crate::field::Field;
use crate::oracle::{oracle_element, ElementOp, Ring};
use crate::search::program::{projections, Instr, Op, Output, SequentialProgram};

use super::*;

/// A symbolic bit during program construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bit {
    Zero,
    One,
    Val(usize),
}

pub struct Builder {
    inputs: usize,
    one: Option<usize>,
    instrs: Vec<Instr>,
}

impl Builder {
    /// `inputs` data inputs, plus an all-ones input at position `inputs`
    /// when `const_one` is set.
    pub fn new(inputs: usize, const_one: bool) -> Self {
        Builder {
            inputs,
            one: const_one.then_some(inputs),
            instrs: Vec::new(),
        }
    }

    pub fn input(&self, i: usize) -> Bit {
        assert!(i < self.inputs);
        Bit::Val(i)
    }

    pub fn inputs(&self, range: std::ops::Range<usize>) -> Vec<Bit> {
        range.map(|i| self.input(i)).collect()
    }

    fn total_inputs(&self) -> usize {
        self.inputs + usize::from(self.one.is_some())
    }

    fn emit(&mut self, op: Op, a: usize, b: usize) -> Bit {
        let pos = self.total_inputs() + self.instrs.len();
        self.instrs.push(Instr {
            op,
            lhs: a.min(b),
            rhs: a.max(b),
        });
        Bit::Val(pos)
    }

    fn one_pos(&self) -> usize {
        self.one.expect("kernel needs the constant-one input")
    }

    pub fn and(&mut self, a: Bit, b: Bit) -> Bit {
        match (a, b) {
            (Bit::Zero, _) | (_, Bit::Zero) => Bit::Zero,
            (Bit::One, x) | (x, Bit::One) => x,
            (Bit::Val(x), Bit::Val(y)) if x == y => a,
            (Bit::Val(x), Bit::Val(y)) => self.emit(Op::And, x, y),
        }
    }

    pub fn or(&mut self, a: Bit, b: Bit) -> Bit {
        match (a, b) {
            (Bit::One, _) | (_, Bit::One) => Bit::One,
            (Bit::Zero, x) | (x, Bit::Zero) => x,
            (Bit::Val(x), Bit::Val(y)) if x == y => a,
            (Bit::Val(x), Bit::Val(y)) => self.emit(Op::Or, x, y),
        }
    }

    pub fn xor(&mut self, a: Bit, b: Bit) -> Bit {
        match (a, b) {
            (Bit::Zero, x) | (x, Bit::Zero) => x,
            (Bit::One, Bit::One) => Bit::Zero,
            (Bit::One, Bit::Val(x)) | (Bit::Val(x), Bit::One) => {
                let one = self.one_pos();
                self.emit(Op::Xor, x, one)
            }
            (Bit::Val(x), Bit::Val(y)) if x == y => Bit::Zero,
            (Bit::Val(x), Bit::Val(y)) => self.emit(Op::Xor, x, y),
        }
    }

    pub fn not(&mut self, a: Bit) -> Bit {
        self.xor(a, Bit::One)
    }

    pub fn finish(self, outs: &[Bit]) -> SequentialProgram {
        let one = self.one;
        let outputs = outs
            .iter()
            .map(|b| match *b {
                Bit::Zero => Output::Zero,
                Bit::One => Output::Value(one.expect("constant-one output needs the const input")),
                Bit::Val(p) => Output::Value(p),
            })
            .collect();
        SequentialProgram::new(self.inputs + usize::from(one.is_some()), self.instrs, outputs)
            .expect("builder emits well-formed programs")
    }
}

/// Grade-school adder built from half and full adders; see [`adder_chain`].
pub fn build_adder(b: &mut Builder, x: &[Bit], y: &[Bit], drop_final_carry: bool) -> Vec<Bit> {
    let (long, short) = if x.len() >= y.len() { (x, y) } else { (y, x) };
    let last = long.len() - 1;
    let mut out = Vec::with_capacity(long.len() + 1);
    let mut carry = Bit::Zero;
    for (i, &a) in long.iter().enumerate() {
        let keep = i < last || !drop_final_carry;
        let c = short.get(i).copied();
        match c {
            Some(c) if i > 0 => {
                let t = b.xor(a, c);
                out.push(b.xor(t, carry));
                if keep {
                    let g = b.and(a, c);
                    let p = b.and(t, carry);
                    carry = b.or(g, p);
                }
            }
            Some(c) => {
                out.push(b.xor(a, c));
                if keep {
                    carry = b.and(a, c);
                }
            }
            None => {
                out.push(b.xor(a, carry));
                if keep {
                    carry = b.and(a, carry);
                }
            }
        }
    }
    if !drop_final_carry {
        out.push(carry);
    }
    out
}

pub fn build_fold5(b: &mut Builder, s: [Bit; 4]) -> [Bit; 3] {
    let t = b.or(s[2], s[1]);
    let r2 = b.xor(s[0], t);
    let u = b.and(r2, s[0]);
    let w = b.xor(s[3], s[1]);
    let r1 = b.xor(u, w);
    let v = b.xor(t, s[2]);
    let z = b.and(r1, s[3]);
    let r0 = b.or(v, z);
    [r0, r1, r2]
}

pub fn build_fold5_readable(b: &mut Builder, s: [Bit; 4]) -> [Bit; 3] {
    let n0 = b.not(s[2]);
    let n2 = b.not(s[3]);
    let e = build_adder(b, &[n0, s[3], n2], &[s[0], s[1]], false);
    let r0 = b.or(e[0], e[3]);
    let r1 = b.or(e[1], e[3]);
    [r0, r1, e[2]]
}

/// A kernel in program form, paired with its hand-inlined word routine.
#[derive(Clone)]
pub struct KernelProgram {
    pub name: &'static str,
    pub program: SequentialProgram,
    /// Input index of the all-ones constant, if the program uses NOT.
    pub const_one: Option<usize>,
    /// The field and element operation this kernel implements, if any.
    pub semantics: Option<(Field, ElementOp)>,
    fast: fn(&[u64]) -> Vec<u64>,
}

impl std::fmt::Debug for KernelProgram {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KernelProgram")
            .field("name", &self.name)
            .field("op_count", &self.op_count())
            .finish()
    }
}

impl KernelProgram {
    pub fn op_count(&self) -> usize {
        self.program.len()
    }

    /// Number of data inputs (excluding the constant).
    pub fn data_inputs(&self) -> usize {
        self.program.inputs() - usize::from(self.const_one.is_some())
    }

    pub fn outputs(&self) -> usize {
        self.program.outputs().len()
    }

    /// Runs the interpreted program on data inputs, supplying the constant.
    pub fn interpret(&self, inputs: &[u64]) -> Vec<u64> {
        let mut all = inputs.to_vec();
        if self.const_one.is_some() {
            all.push(u64::MAX);
        }
        self.program.eval(&all).expect("input arity")
    }

    /// Runs the inlined word routine.
    pub fn fast(&self, inputs: &[u64]) -> Vec<u64> {
        (self.fast)(inputs)
    }

    /// The serialized program, prefixed with a comment naming the kernel.
    pub fn to_text(&self) -> String {
        let mut s = format!("# kernel {}", self.name);
        if let Some(c) = self.const_one {
            s.push_str(&format!(" (in{c} is all ones)"));
        }
        s.push('\n');
        s.push_str(&self.program.to_string());
        s
    }

    pub fn by_name(name: &str) -> Option<KernelProgram> {
        all().into_iter().find(|k| k.name == name)
    }
}

/// A lane on which a kernel disagrees with the oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelMismatch {
    pub kernel: &'static str,
    /// Input lane: bit `i` is data input `i`.
    pub pattern: u64,
    pub got: u8,
    pub acceptable: Vec<u8>,
}

impl std::fmt::Display for KernelMismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: input pattern {:#b} gave {:#b}, expected one of {:?}",
            self.kernel, self.pattern, self.got, self.acceptable
        )
    }
}

impl KernelProgram {
    /// Acceptable output patterns on input lane `pattern`, or `None` when
    /// the lane holds an invalid operand. Kernels without field semantics
    /// are the folds: a 4-bit value to a congruent 3-bit value.
    pub fn acceptable(&self, pattern: u64) -> Option<Vec<u8>> {
        let Some((field, op)) = self.semantics else {
            return (pattern < 15).then(|| (0..8u8).filter(|&u| u64::from(u) % 5 == pattern % 5).collect());
        };
        let r = field.planes();
        let raw: Vec<u8> = (0..op.arity())
            .map(|a| (pattern >> (a * r) & ((1 << r) - 1)) as u8)
            .collect();
        let operands: Vec<u32> = raw.iter().map(|&p| field.decode(p)).collect::<Option<_>>()?;
        let operands = if op == ElementOp::Reduce {
            vec![raw[0] as u32]
        } else {
            operands
        };
        let expect = oracle_element(&Ring::Base(field), op, &operands).ok()?;
        Some(if op == ElementOp::Reduce {
            vec![field.canonical(expect)]
        } else {
            (0..1u8 << r).filter(|&p| field.decode(p) == Some(expect)).collect()
        })
    }

    /// Checks planes produced by running this kernel on every input lane at
    /// once (the projections of its data inputs). Returns the number of
    /// lanes checked.
    pub fn check_lanes(&self, outputs: &[u64]) -> Result<usize, KernelMismatch> {
        let mut checked = 0;
        for pattern in 0..1u64 << self.data_inputs() {
            let Some(acceptable) = self.acceptable(pattern) else {
                continue;
            };
            let got = outputs
                .iter()
                .enumerate()
                .fold(0u8, |p, (o, w)| p | ((w >> pattern & 1) as u8) << o);
            if !acceptable.contains(&got) {
                return Err(KernelMismatch {
                    kernel: self.name,
                    pattern,
                    got,
                    acceptable,
                });
            }
            checked += 1;
        }
        Ok(checked)
    }

    /// Exhaustive check of both the word routine and the interpreted program.
    pub fn check_exhaustive(&self) -> Result<usize, KernelMismatch> {
        let inputs = projections(self.data_inputs());
        self.check_lanes(&self.fast(&inputs))?;
        self.check_lanes(&self.interpret(&inputs))
    }
}

fn a2(x: &[u64]) -> [u64; 2] {
    [x[0], x[1]]
}
fn a3(x: &[u64]) -> [u64; 3] {
    [x[0], x[1], x[2]]
}
fn a4(x: &[u64]) -> [u64; 4] {
    [x[0], x[1], x[2], x[3]]
}

fn kernel(
    name: &'static str,
    inputs: usize,
    const_one: bool,
    semantics: Option<(Field, ElementOp)>,
    fast: fn(&[u64]) -> Vec<u64>,
    body: impl FnOnce(&mut Builder) -> Vec<Bit>,
) -> KernelProgram {
    let mut b = Builder::new(inputs, const_one);
    let outs = body(&mut b);
    KernelProgram {
        name,
        program: b.finish(&outs),
        const_one: const_one.then_some(inputs),
        semantics,
        fast,
    }
}

/// Program for `adder_chain` on an `n`-bit and an `m`-bit operand
/// (inputs `a0..a_{n-1}, b0..b_{m-1}`).
pub fn adder_program(n: usize, m: usize, drop_final_carry: bool) -> SequentialProgram {
    let mut b = Builder::new(n + m, false);
    let x = b.inputs(0..n);
    let y = b.inputs(n..n + m);
    let out = build_adder(&mut b, &x, &y, drop_final_carry);
    b.finish(&out)
}

/// Every named kernel.
pub fn all() -> Vec<KernelProgram> {
    use ElementOp::*;
    use Field::*;
    vec![
        kernel(
            "f2_add",
            2,
            false,
            Some((F2, Add)),
            |x| vec![x[0] ^ x[1]],
            |b| {
                let (x, y) = (b.input(0), b.input(1));
                vec![b.xor(x, y)]
            },
        ),
        kernel(
            "z4_add",
            4,
            false,
            Some((Z4, Add)),
            |x| z4_add(a2(x), a2(&x[2..])).to_vec(),
            |b| {
                let r0 = b.xor(b.input(0), b.input(2));
                let t = b.xor(b.input(1), b.input(3));
                let c = b.and(b.input(0), b.input(2));
                vec![r0, b.xor(t, c)]
            },
        ),
        kernel(
            "z4_neg",
            2,
            false,
            Some((Z4, Neg)),
            |x| z4_neg(a2(x)).to_vec(),
            |b| {
                let r1 = b.xor(b.input(1), b.input(0));
                vec![b.input(0), r1]
            },
        ),
        kernel(
            "z4_double",
            2,
            false,
            Some((Z4, Double)),
            |x| z4_double(a2(x)).to_vec(),
            |b| vec![Bit::Zero, b.input(0)],
        ),
        kernel(
            "f3_add",
            4,
            false,
            Some((F3, Add)),
            |x| f3_add(a2(x), a2(&x[2..])).to_vec(),
            |b| {
                let [xu, xs, yu, ys] = [0, 1, 2, 3].map(|i| b.input(i));
                let p = b.xor(xu, ys);
                let q = b.xor(xs, yu);
                let s = b.xor(p, xs);
                let t = b.xor(q, ys);
                let sign = b.and(p, q);
                let unit = b.or(s, t);
                vec![unit, sign]
            },
        ),
        kernel(
            "f3_neg",
            2,
            false,
            Some((F3, Neg)),
            |x| f3_neg(a2(x)).to_vec(),
            |b| {
                let s = b.xor(b.input(0), b.input(1));
                vec![b.input(0), s]
            },
        ),
        kernel(
            "f3_sub",
            4,
            false,
            Some((F3, Sub)),
            |x| f3_sub(a2(x), a2(&x[2..])).to_vec(),
            |b| {
                let [xu, xs, yu, ys] = [0, 1, 2, 3].map(|i| b.input(i));
                let t = b.xor(xu, yu);
                let d = b.xor(xs, ys);
                let unit = b.or(t, d);
                let e = b.xor(t, ys);
                let f = b.xor(yu, xs);
                vec![unit, b.and(e, f)]
            },
        ),
        kernel(
            "f5_fold5",
            4,
            false,
            None,
            |x| f5_fold5(a4(x)).to_vec(),
            |b| {
                let s = [0, 1, 2, 3].map(|i| b.input(i));
                build_fold5(b, s).to_vec()
            },
        ),
        kernel(
            "f5_fold5_readable",
            4,
            true,
            None,
            |x| f5_fold5_readable(a4(x)).to_vec(),
            |b| {
                let s = [0, 1, 2, 3].map(|i| b.input(i));
                build_fold5_readable(b, s).to_vec()
            },
        ),
        kernel(
            "f5_add",
            6,
            false,
            Some((F5, Add)),
            |x| f5_add(a3(x), a3(&x[3..])).to_vec(),
            |b| {
                let (x, y) = (b.inputs(0..3), b.inputs(3..6));
                let s = build_adder(b, &x, &y, false);
                build_fold5(b, [s[0], s[1], s[2], s[3]]).to_vec()
            },
        ),
        kernel(
            "f5_double",
            3,
            false,
            Some((F5, Double)),
            |x| f5_double(a3(x)).to_vec(),
            |b| {
                let a = b.inputs(0..3);
                let t = b.xor(a[0], a[2]);
                let r0 = b.and(a[2], t);
                vec![r0, t, a[1]]
            },
        ),
        kernel(
            "f5_neg",
            3,
            false,
            Some((F5, Neg)),
            |x| f5_neg(a3(x)).to_vec(),
            |b| {
                let a = b.inputs(0..3);
                build_fold5(b, [a[2], Bit::Zero, a[0], a[1]]).to_vec()
            },
        ),
        kernel(
            "f5_reduce",
            3,
            false,
            Some((F5, Reduce)),
            |x| f5_reduce(a3(x)).to_vec(),
            |b| {
                let a = b.inputs(0..3);
                let o = b.or(a[1], a[0]);
                let g = b.and(a[2], o);
                let r0 = b.xor(a[0], g);
                let h = b.and(g, r0);
                let r1 = b.xor(a[1], h);
                let r2 = b.xor(a[2], g);
                vec![r0, r1, r2]
            },
        ),
        kernel(
            "f7_add",
            6,
            false,
            Some((F7, Add)),
            |x| f7_add(a3(x), a3(&x[3..])).to_vec(),
            |b| {
                let (x, y) = (b.inputs(0..3), b.inputs(3..6));
                let s = build_adder(b, &x, &y, false);
                build_adder(b, &s[..3], &s[3..], true)
            },
        ),
        kernel(
            "f7_double",
            3,
            false,
            Some((F7, Double)),
            |x| f7_double(a3(x)).to_vec(),
            |b| {
                let a = b.inputs(0..3);
                vec![a[2], a[0], a[1]]
            },
        ),
        kernel(
            "f7_neg",
            3,
            true,
            Some((F7, Neg)),
            |x| f7_neg(a3(x)).to_vec(),
            |b| b.inputs(0..3).into_iter().map(|a| b.not(a)).collect(),
        ),
        kernel(
            "f7_reduce",
            3,
            false,
            Some((F7, Reduce)),
            |x| f7_reduce(a3(x)).to_vec(),
            |b| {
                let a = b.inputs(0..3);
                let t = b.and(a[0], a[1]);
                let t = b.and(t, a[2]);
                a.into_iter().map(|x| b.xor(x, t)).collect()
            },
        ),
        kernel(
            "z8_add",
            6,
            false,
            Some((Z8, Add)),
            |x| z8_add(a3(x), a3(&x[3..])).to_vec(),
            |b| {
                let (x, y) = (b.inputs(0..3), b.inputs(3..6));
                build_adder(b, &x, &y, true)
            },
        ),
        kernel(
            "z8_double",
            3,
            false,
            Some((Z8, Double)),
            |x| z8_double(a3(x)).to_vec(),
            |b| vec![Bit::Zero, b.input(0), b.input(1)],
        ),
        kernel(
            "z8_neg",
            3,
            false,
            Some((Z8, Neg)),
            |x| z8_neg(a3(x)).to_vec(),
            |b| {
                let a = b.inputs(0..3);
                let r1 = b.xor(a[1], a[0]);
                let o = b.or(a[1], a[0]);
                vec![a[0], r1, b.xor(a[2], o)]
            },
        ),
    ]
}
