//! Straight-line boolean programs over ∧, ∨, ⊕.
//!
//! Values are addressed by position: inputs occupy `0..n`, instruction `k`
//! writes position `n + k`. In the signed convention where inputs are
//! `v_{-n}..v_{-1}`, position `p` is index `p - n`, and the constraint
//! `-n <= i < j < k` becomes `lhs < rhs < n + k`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kernels::Word;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    And,
    Or,
    Xor,
}

impl Op {
    pub const ALL: [Op; 3] = [Op::And, Op::Or, Op::Xor];

    #[inline(always)]
    pub fn apply<T: Word>(self, a: T, b: T) -> T {
        match self {
            Op::And => a & b,
            Op::Or => a | b,
            Op::Xor => a ^ b,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Op::And => "and",
            Op::Or => "or",
            Op::Xor => "xor",
        }
    }
}

impl FromStr for Op {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "and" => Ok(Op::And),
            "or" => Ok(Op::Or),
            "xor" => Ok(Op::Xor),
            other => Err(Error::MalformedProgram(format!("unknown op `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Instr {
    pub op: Op,
    pub lhs: usize,
    pub rhs: usize,
}

/// A program output: a computed or input value, or the constant-zero plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Output {
    Value(usize),
    Zero,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SequentialProgram {
    inputs: usize,
    instrs: Vec<Instr>,
    outputs: Vec<Output>,
}

impl SequentialProgram {
    pub fn new(inputs: usize, instrs: Vec<Instr>, outputs: Vec<Output>) -> Result<Self> {
        for (k, ins) in instrs.iter().enumerate() {
            if !(ins.lhs < ins.rhs && ins.rhs < inputs + k) {
                return Err(Error::MalformedProgram(format!(
                    "instruction {k} references ({}, {}) with {inputs} inputs",
                    ins.lhs, ins.rhs
                )));
            }
        }
        let nvalues = inputs + instrs.len();
        for out in &outputs {
            if let Output::Value(p) = *out {
                if p >= nvalues {
                    return Err(Error::MalformedProgram(format!("output references position {p}")));
                }
            }
        }
        Ok(SequentialProgram {
            inputs,
            instrs,
            outputs,
        })
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    /// Number of instructions (the program's operation count).
    pub fn len(&self) -> usize {
        self.instrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instrs.is_empty()
    }

    pub fn instructions(&self) -> &[Instr] {
        &self.instrs
    }

    pub fn outputs(&self) -> &[Output] {
        &self.outputs
    }

    /// Evaluates every value of the program by `v_k <- v_i *_k v_j`.
    pub fn values<T: Word>(&self, inputs: &[T]) -> Result<Vec<T>> {
        if inputs.len() != self.inputs {
            return Err(Error::MalformedProgram(format!(
                "expected {} inputs, got {}",
                self.inputs,
                inputs.len()
            )));
        }
        let mut v = Vec::with_capacity(self.inputs + self.instrs.len());
        v.extend_from_slice(inputs);
        for ins in &self.instrs {
            let x = ins.op.apply(v[ins.lhs], v[ins.rhs]);
            v.push(x);
        }
        Ok(v)
    }

    pub fn eval<T: Word>(&self, inputs: &[T]) -> Result<Vec<T>> {
        let v = self.values(inputs)?;
        Ok(self
            .outputs
            .iter()
            .map(|o| match *o {
                Output::Value(p) => v[p],
                Output::Zero => T::ZERO,
            })
            .collect())
    }

    /// Evaluates a single assignment given as a bit mask over the inputs.
    pub fn eval_assignment(&self, assignment: u64) -> Result<Vec<bool>> {
        let inputs: Vec<bool> = (0..self.inputs).map(|i| assignment >> i & 1 == 1).collect();
        self.eval(&inputs)
    }

    /// Evaluates all `2^n` assignments at once, assignment `a` in lane `a`.
    /// Requires `n <= 6`.
    pub fn eval_truth_tables(&self) -> Result<Vec<u64>> {
        if self.inputs > 6 {
            return Err(Error::Unsupported(format!("truth tables for {} inputs", self.inputs)));
        }
        self.eval(&projections(self.inputs))
    }

    fn fmt_ref(&self, pos: usize) -> String {
        if pos < self.inputs {
            format!("in{pos}")
        } else {
            format!("v{}", pos - self.inputs)
        }
    }
}

/// Truth tables of the input projections: bit `a` of table `i` is bit `i` of `a`.
pub fn projections(n: usize) -> Vec<u64> {
    let patterns = 1usize << n;
    (0..n)
        .map(|i| (0..patterns).filter(|a| a >> i & 1 == 1).fold(0u64, |t, a| t | 1 << a))
        .collect()
}

impl fmt::Display for SequentialProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# inputs {}", self.inputs)?;
        for (k, ins) in self.instrs.iter().enumerate() {
            writeln!(
                f,
                "v{k} = {}({}, {})",
                ins.op.name(),
                self.fmt_ref(ins.lhs),
                self.fmt_ref(ins.rhs)
            )?;
        }
        let outs: Vec<String> = self
            .outputs
            .iter()
            .map(|o| match *o {
                Output::Value(p) => self.fmt_ref(p),
                Output::Zero => "zero".to_string(),
            })
            .collect();
        writeln!(f, "out = {}", outs.join(", "))
    }
}

enum RawRef {
    Input(usize),
    Value(usize),
    Zero,
}

fn parse_ref(s: &str, line: usize) -> Result<RawRef> {
    let s = s.trim();
    let num = |rest: &str| {
        rest.parse::<usize>()
            .map_err(|_| Error::parse(line, format!("bad reference `{s}`")))
    };
    if s == "zero" {
        Ok(RawRef::Zero)
    } else if let Some(rest) = s.strip_prefix("in") {
        Ok(RawRef::Input(num(rest)?))
    } else if let Some(rest) = s.strip_prefix('v') {
        Ok(RawRef::Value(num(rest)?))
    } else {
        Err(Error::parse(line, format!("bad reference `{s}`")))
    }
}

impl FromStr for SequentialProgram {
    type Err = Error;

    /// Parses the text form. The input count comes from a `# inputs N`
    /// comment when present, otherwise from the largest `in<i>` referenced.
    fn from_str(text: &str) -> Result<Self> {
        let mut declared = None;
        let mut raw: Vec<(Op, RawRef, RawRef, usize)> = Vec::new();
        let mut raw_out: Option<(Vec<RawRef>, usize)> = None;

        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                let mut words = comment.split_whitespace();
                if words.next() == Some("inputs") {
                    let n = words
                        .next()
                        .and_then(|w| w.parse().ok())
                        .ok_or_else(|| Error::parse(lineno, "bad `# inputs` header"))?;
                    declared = Some(n);
                }
                continue;
            }
            if raw_out.is_some() {
                return Err(Error::parse(lineno, "content after `out` line"));
            }
            let (lhs, rhs) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(lineno, "expected `=`"))?;
            let lhs = lhs.trim();
            if lhs == "out" {
                let refs = rhs
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| parse_ref(s, lineno))
                    .collect::<Result<Vec<_>>>()?;
                raw_out = Some((refs, lineno));
                continue;
            }
            let k: usize = lhs
                .strip_prefix('v')
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::parse(lineno, format!("bad target `{lhs}`")))?;
            if k != raw.len() {
                return Err(Error::parse(lineno, format!("expected v{}, found v{k}", raw.len())));
            }
            let rhs = rhs.trim();
            let open = rhs.find('(').ok_or_else(|| Error::parse(lineno, "expected `(`"))?;
            let body = rhs[open + 1..]
                .strip_suffix(')')
                .ok_or_else(|| Error::parse(lineno, "expected `)`"))?;
            let op: Op = rhs[..open].parse().map_err(|_| Error::parse(lineno, "unknown op"))?;
            let (a, b) = body
                .split_once(',')
                .ok_or_else(|| Error::parse(lineno, "expected two operands"))?;
            raw.push((op, parse_ref(a, lineno)?, parse_ref(b, lineno)?, lineno));
        }

        let (raw_out, _) = raw_out.ok_or_else(|| Error::parse(text.lines().count(), "missing `out` line"))?;
        let max_input = raw
            .iter()
            .flat_map(|(_, a, b, _)| [a, b])
            .chain(raw_out.iter())
            .filter_map(|r| match r {
                RawRef::Input(i) => Some(i + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0);
        let inputs = declared.unwrap_or(max_input);
        if max_input > inputs {
            return Err(Error::MalformedProgram(format!(
                "input in{} exceeds declared count {inputs}",
                max_input - 1
            )));
        }
        let resolve = |r: &RawRef, line: usize| -> Result<usize> {
            match *r {
                RawRef::Input(i) => Ok(i),
                RawRef::Value(j) => Ok(inputs + j),
                RawRef::Zero => Err(Error::parse(line, "`zero` is only valid as an output")),
            }
        };
        let mut instrs = Vec::with_capacity(raw.len());
        for (op, a, b, line) in &raw {
            let (x, y) = (resolve(a, *line)?, resolve(b, *line)?);
            if x == y {
                return Err(Error::parse(*line, "operands must be distinct"));
            }
            instrs.push(Instr {
                op: *op,
                lhs: x.min(y),
                rhs: x.max(y),
            });
        }
        let outputs = raw_out
            .iter()
            .map(|r| match *r {
                RawRef::Zero => Output::Zero,
                RawRef::Input(i) => Output::Value(i),
                RawRef::Value(j) => Output::Value(inputs + j),
            })
            .collect();
        SequentialProgram::new(inputs, instrs, outputs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_xor_of_two_inputs() {
        let p = SequentialProgram::new(
            2,
            vec![Instr {
                op: Op::Xor,
                lhs: 0,
                rhs: 1,
            }],
            vec![Output::Value(2)],
        )
        .unwrap();
        assert_eq!(p.eval_assignment(0b01).unwrap(), vec![true]);
        assert_eq!(p.eval_assignment(0b11).unwrap(), vec![false]);
    }

    #[test]
    fn empty_program_echoes_inputs() {
        let p = SequentialProgram::new(3, vec![], vec![Output::Value(2), Output::Value(0)]).unwrap();
        assert_eq!(p.eval(&[1u8, 2, 4]).unwrap(), vec![4, 1]);
    }

    #[test]
    fn rejects_forward_reference() {
        let bad = SequentialProgram::new(
            2,
            vec![Instr {
                op: Op::And,
                lhs: 1,
                rhs: 2,
            }],
            vec![],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn text_roundtrip() {
        let text = "# inputs 3\nv0 = and(in0, in2)\nv1 = or(in1, v0)\nout = v1, zero, in0\n";
        let p: SequentialProgram = text.parse().unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.to_string(), text);
        assert_eq!(p.to_string().parse::<SequentialProgram>().unwrap(), p);
    }

    #[test]
    fn parse_infers_inputs_and_normalizes_operand_order() {
        let p: SequentialProgram = "v0 = xor(in3, in1)\nout = v0".parse().unwrap();
        assert_eq!(p.inputs(), 4);
        assert_eq!(p.instructions()[0].lhs, 1);
    }

    #[test]
    fn parse_errors() {
        assert!("v0 = nand(in0, in1)\nout = v0".parse::<SequentialProgram>().is_err());
        assert!("v1 = and(in0, in1)\nout = v0".parse::<SequentialProgram>().is_err());
        assert!("v0 = and(in0, in0)\nout = v0".parse::<SequentialProgram>().is_err());
        assert!("v0 = and(in0, v0)\nout = v0".parse::<SequentialProgram>().is_err());
        assert!("v0 = and(in0, in1)".parse::<SequentialProgram>().is_err());
    }

    #[test]
    fn truth_tables_of_projections() {
        assert_eq!(projections(2), vec![0b1010, 0b1100]);
    }
}
