//! Target functions for the program search.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::oracle::{oracle_element, ElementOp, Ring};

/// Most inputs (including the constant) a spec may have: truth tables are
/// single 64-bit words.
pub const MAX_INPUTS: usize = 6;
pub const MAX_OUTPUTS: usize = 6;

/// A boolean function with don't-cares and several acceptable outputs.
///
/// Input patterns and output tuples are integers: bit `i` of a pattern is
/// input `i`, bit `o` of a tuple is output `o`. Patterns with no entry are
/// don't-care. With `const_one` set, the program gets one extra input,
/// placed after the data inputs, that is always 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionSpec {
    inputs: usize,
    outputs: usize,
    const_one: bool,
    /// Care pattern -> bitset of acceptable tuples.
    targets: BTreeMap<u32, u64>,
}

impl FunctionSpec {
    pub fn new(inputs: usize, outputs: usize) -> Result<Self> {
        if inputs > MAX_INPUTS {
            return Err(Error::Unsupported(format!("{inputs} inputs")));
        }
        if outputs == 0 || outputs > MAX_OUTPUTS {
            return Err(Error::Unsupported(format!("{outputs} outputs")));
        }
        Ok(FunctionSpec {
            inputs,
            outputs,
            const_one: false,
            targets: BTreeMap::new(),
        })
    }

    /// Adds a constant-one input.
    pub fn with_const_one(mut self) -> Result<Self> {
        if self.inputs + 1 > MAX_INPUTS {
            return Err(Error::Unsupported(format!("{} inputs", self.inputs + 1)));
        }
        self.const_one = true;
        Ok(self)
    }

    /// Marks `pattern` as cared about, accepting each of `tuples`.
    pub fn allow(&mut self, pattern: u32, tuples: &[u32]) -> Result<()> {
        if pattern >> self.inputs != 0 {
            return Err(Error::Unsupported(format!(
                "pattern {pattern:b} for {} inputs",
                self.inputs
            )));
        }
        if tuples.is_empty() {
            return Err(Error::EmptyInput);
        }
        let set = self.targets.entry(pattern).or_insert(0);
        for &t in tuples {
            if t >> self.outputs != 0 {
                return Err(Error::Unsupported(format!("tuple {t:b} for {} outputs", self.outputs)));
            }
            *set |= 1 << t;
        }
        Ok(())
    }

    /// Data inputs, not counting the constant.
    pub fn inputs(&self) -> usize {
        self.inputs
    }

    /// Inputs of a program implementing this spec.
    pub fn program_inputs(&self) -> usize {
        self.inputs + usize::from(self.const_one)
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn const_one(&self) -> bool {
        self.const_one
    }

    /// Care patterns with their acceptable-tuple bitsets.
    pub fn targets(&self) -> impl Iterator<Item = (u32, u64)> + '_ {
        self.targets.iter().map(|(&p, &s)| (p, s))
    }

    pub fn care_count(&self) -> usize {
        self.targets.len()
    }

    pub fn acceptable(&self, pattern: u32) -> Option<Vec<u32>> {
        self.targets
            .get(&pattern)
            .map(|&s| (0..1u32 << self.outputs).filter(|t| s >> t & 1 == 1).collect())
    }

    /// Truth-table lane of a data pattern, setting the constant input.
    pub fn lane(&self, pattern: u32) -> u32 {
        if self.const_one {
            pattern | 1 << self.inputs
        } else {
            pattern
        }
    }

    /// Spec of a field operation on its bitsliced representation. Operand
    /// patterns that are not legal representations are don't-care; every
    /// representation of the result is acceptable, except for `Reduce`,
    /// which must produce the canonical one.
    pub fn for_op(field: Field, op: ElementOp) -> Result<Self> {
        let r = field.planes();
        let arity = op.arity();
        let mut spec = FunctionSpec::new(r * arity, r)?;
        let ring = Ring::Base(field);
        for pattern in 0..1u32 << (r * arity) {
            let operands: Option<Vec<u32>> = (0..arity)
                .map(|a| field.decode((pattern >> (a * r) & ((1 << r) - 1)) as u8))
                .collect();
            let Some(operands) = operands else { continue };
            let operands = if op == ElementOp::Reduce {
                vec![pattern]
            } else {
                operands
            };
            let result = oracle_element(&ring, op, &operands)?;
            let tuples: Vec<u32> = if op == ElementOp::Reduce {
                vec![field.canonical(result) as u32]
            } else {
                (0..1u32 << r)
                    .filter(|&t| field.decode(t as u8) == Some(result))
                    .collect()
            };
            spec.allow(pattern, &tuples)?;
        }
        Ok(spec)
    }

    /// The 4-bit to 3-bit fold: any 3-bit value congruent mod 5 to the input.
    pub fn fold5() -> Self {
        let mut spec = FunctionSpec::new(4, 3).expect("in range");
        for v in 0..15 {
            let tuples: Vec<u32> = (0..8).filter(|u| u % 5 == v % 5).collect();
            spec.allow(v, &tuples).expect("in range");
        }
        spec
    }

    /// Names accepted by [`FunctionSpec::builtin`].
    pub fn builtin_names() -> Vec<String> {
        let mut names = vec!["xor2".to_string(), "fold5".to_string()];
        for f in Field::ALL {
            for op in ["add", "sub", "neg", "double", "mul", "reduce"] {
                if Self::builtin(&format!("{}-{op}", f.name())).is_ok() {
                    names.push(format!("{}-{op}", f.name()));
                }
            }
        }
        names
    }

    /// `xor2`, `fold5`, or `<field>-<op>` such as `f3-add`.
    pub fn builtin(name: &str) -> Result<Self> {
        let lower = name.to_ascii_lowercase();
        match lower.as_str() {
            "xor2" => {
                let mut spec = FunctionSpec::new(2, 1)?;
                for p in 0..4 {
                    spec.allow(p, &[(p & 1) ^ (p >> 1)])?;
                }
                return Ok(spec);
            }
            "fold5" => return Ok(Self::fold5()),
            _ => {}
        }
        let unknown = || Error::Unsupported(format!("unknown search target `{name}`"));
        let (field, op) = lower.split_once('-').ok_or_else(unknown)?;
        let field: Field = field.parse().map_err(|_| unknown())?;
        let op = match op {
            "add" => ElementOp::Add,
            "sub" => ElementOp::Sub,
            "neg" => ElementOp::Neg,
            "double" => ElementOp::Double,
            "mul" => ElementOp::Mul,
            "reduce" => ElementOp::Reduce,
            _ => return Err(unknown()),
        };
        Self::for_op(field, op)
    }

    fn fmt_bits(v: u32, width: usize) -> String {
        (0..width)
            .rev()
            .map(|i| if v >> i & 1 == 1 { '1' } else { '0' })
            .collect()
    }
}

impl fmt::Display for FunctionSpec {
    /// `inputs n`, `outputs m`, optional `const1`, then one line per care
    /// pattern: `pattern -> {tuple, ...}` in binary, bit 0 rightmost.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "inputs {}", self.inputs)?;
        writeln!(f, "outputs {}", self.outputs)?;
        if self.const_one {
            writeln!(f, "const1")?;
        }
        for (p, _) in self.targets() {
            let tuples: Vec<String> = self
                .acceptable(p)
                .unwrap_or_default()
                .into_iter()
                .map(|t| Self::fmt_bits(t, self.outputs))
                .collect();
            writeln!(f, "{} -> {{{}}}", Self::fmt_bits(p, self.inputs), tuples.join(", "))?;
        }
        Ok(())
    }
}

fn parse_bits(s: &str, line: usize) -> Result<(u32, usize)> {
    let s = s.trim();
    if s.is_empty() || s.len() > 32 {
        return Err(Error::parse(line, format!("bad bit string `{s}`")));
    }
    u32::from_str_radix(s, 2)
        .map(|v| (v, s.len()))
        .map_err(|_| Error::parse(line, format!("bad bit string `{s}`")))
}

impl FromStr for FunctionSpec {
    type Err = Error;

    /// Reads the format written by `Display`. `outputs` may be omitted, in
    /// which case the width of the first tuple is used. `#` starts a comment.
    fn from_str(text: &str) -> Result<Self> {
        let mut inputs = None;
        let mut outputs = None;
        let mut const_one = false;
        let mut rows = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let number = |rest: &str| {
                rest.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::parse(line_no, format!("bad count in `{line}`")))
            };
            if let Some(rest) = line.strip_prefix("inputs") {
                inputs = Some(number(rest)?);
            } else if let Some(rest) = line.strip_prefix("outputs") {
                outputs = Some(number(rest)?);
            } else if line == "const1" {
                const_one = true;
            } else if let Some((pat, set)) = line.split_once("->") {
                let (p, pw) = parse_bits(pat, line_no)?;
                let set = set.trim();
                let inner = set
                    .strip_prefix('{')
                    .and_then(|s| s.strip_suffix('}'))
                    .ok_or_else(|| Error::parse(line_no, "tuples must be in braces"))?;
                let tuples = inner
                    .split(',')
                    .map(|t| parse_bits(t, line_no))
                    .collect::<Result<Vec<_>>>()?;
                rows.push((line_no, p, pw, tuples));
            } else {
                return Err(Error::parse(line_no, format!("unrecognized line `{line}`")));
            }
        }
        let inputs = inputs.ok_or_else(|| Error::parse(1, "missing `inputs` header"))?;
        let outputs = match outputs {
            Some(m) => m,
            None => rows
                .first()
                .and_then(|r| r.3.first())
                .map(|t| t.1)
                .ok_or_else(|| Error::parse(1, "missing `outputs` header"))?,
        };
        let mut spec = FunctionSpec::new(inputs, outputs)?;
        if const_one {
            spec = spec.with_const_one()?;
        }
        for (line_no, p, pw, tuples) in rows {
            if pw != inputs || tuples.iter().any(|t| t.1 != outputs) {
                return Err(Error::parse(line_no, "bit string width does not match header"));
            }
            let ts: Vec<u32> = tuples.into_iter().map(|t| t.0).collect();
            spec.allow(p, &ts).map_err(|e| Error::parse(line_no, e.to_string()))?;
        }
        Ok(spec)
    }
}
