//! Straight-line programs and an exhaustive search for short ones.
//!
//! The search enumerates programs of length 0, 1, 2, ... and stops at the
//! first length with a program meeting the target, so a result is minimal and
//! `None` proves that no program within the bound exists. Candidates are
//! scored by their truth tables: every value is a 64-bit word whose bit `a`
//! is the value under input assignment `a`.
//!
//! Instructions at each position are tried in the order `(lhs, rhs, op)`
//! with `and < or < xor`, so a single-threaded search returns the first
//! program in that order among the ones the pruning keeps. Pruning only
//! discards programs for which a program of the same length survives, or
//! which cannot be minimal:
//!
//! - a value that is zero on every care pattern, or equal there to an
//!   earlier value, can be replaced by that value and the instruction
//!   dropped;
//! - adjacent independent instructions can be swapped, so when instruction
//!   `k` does not read instruction `k - 1` its care-restricted truth table
//!   must be the larger;
//! - in a minimal program every computed value is read later or is an
//!   output, and every output needs a value that agrees with it wherever
//!   the target forces its bit; both give lower bounds on the instructions
//!   still needed.

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub mod program;
pub mod spec;

pub use program::{projections, Instr, Op, Output, SequentialProgram};
pub use spec::FunctionSpec;

/// Longest program the search will attempt.
pub const MAX_SEARCH_LEN: usize = 10;
const MAX_VALUES: usize = spec::MAX_INPUTS + MAX_SEARCH_LEN;

/// `N(n, l) = 3^l Π_{k<l} C(k + n, 2)`: programs of length `l` on `n` inputs.
pub fn count_programs(n: usize, len: usize) -> BigUint {
    let mut total = BigUint::from(1u32);
    for k in 0..len {
        let m = (k + n) as u64;
        total *= BigUint::from(3 * (m * m.saturating_sub(1) / 2));
    }
    total
}

/// Every program of length `len` on `n` inputs, with no outputs. Only for
/// tiny parameters.
pub fn enumerate_programs(n: usize, len: usize) -> Vec<Vec<Instr>> {
    let mut out = vec![Vec::new()];
    for k in 0..len {
        let positions = n + k;
        let mut next = Vec::new();
        for prefix in &out {
            for lhs in 0..positions {
                for rhs in lhs + 1..positions {
                    for op in Op::ALL {
                        let mut p = prefix.clone();
                        p.push(Instr { op, lhs, rhs });
                        next.push(p);
                    }
                }
            }
        }
        out = next;
    }
    out
}

/// Whether `prog` meets `spec` on every care pattern.
pub fn verify_program(prog: &SequentialProgram, spec: &FunctionSpec) -> bool {
    if prog.inputs() != spec.program_inputs() || prog.outputs().len() != spec.outputs() {
        return false;
    }
    let Ok(tables) = prog.eval_truth_tables() else {
        return false;
    };
    spec.targets().all(|(pattern, allowed)| {
        let lane = spec.lane(pattern);
        let tuple = tables
            .iter()
            .enumerate()
            .fold(0u32, |t, (o, tt)| t | ((tt >> lane & 1) as u32) << o);
        allowed >> tuple & 1 == 1
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub max_len: usize,
    /// Worker threads; 0 or 1 searches inline.
    pub threads: usize,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub program: Option<SequentialProgram>,
    /// Lengths shown to have no program.
    pub exhausted: Vec<usize>,
    /// Instructions placed over the whole search.
    pub nodes: u64,
}

/// Shortest program for `spec` with at most `options.max_len` instructions.
pub fn search(spec: &FunctionSpec, options: SearchOptions) -> Result<SearchOutcome> {
    let n = spec.program_inputs();
    if n + options.max_len > MAX_VALUES || options.max_len > MAX_SEARCH_LEN {
        return Err(Error::Unsupported(format!("search length {}", options.max_len)));
    }
    let pool = if options.threads > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(options.threads)
                .build()
                .map_err(|e| Error::Unsupported(e.to_string()))?,
        )
    } else {
        None
    };
    let searcher = Searcher::new(spec);
    let mut outcome = SearchOutcome {
        program: None,
        exhausted: Vec::new(),
        nodes: 0,
    };
    for len in 0..=options.max_len {
        let (found, nodes) = match &pool {
            Some(pool) => pool.install(|| searcher.run_parallel(len)),
            None => searcher.run(len),
        };
        outcome.nodes += nodes;
        if let Some(prog) = found {
            debug_assert!(verify_program(&prog, spec));
            outcome.program = Some(prog);
            return Ok(outcome);
        }
        outcome.exhausted.push(len);
    }
    Ok(outcome)
}

struct Searcher {
    n: usize,
    m: usize,
    care: u64,
    /// Per output, care lanes where every acceptable tuple agrees on its bit.
    forced_mask: Vec<u64>,
    forced_val: Vec<u64>,
    /// `(lane, acceptable tuples)` per care pattern.
    lanes: Vec<(u32, u64)>,
    inputs: Vec<u64>,
}

#[derive(Clone, Copy)]
struct State {
    vals: [u64; MAX_VALUES],
    /// Care-restricted values.
    cvals: [u64; MAX_VALUES],
    instrs: [Instr; MAX_SEARCH_LEN],
    /// Bitset of positions read by some instruction.
    read: u32,
    /// Bitset of outputs that some value could serve.
    served: u32,
}

impl Searcher {
    fn new(spec: &FunctionSpec) -> Self {
        let m = spec.outputs();
        let lanes: Vec<(u32, u64)> = spec.targets().map(|(p, s)| (spec.lane(p), s)).collect();
        let care = lanes.iter().fold(0u64, |c, &(l, _)| c | 1 << l);
        let mut forced_mask = vec![0u64; m];
        let mut forced_val = vec![0u64; m];
        for &(lane, allowed) in &lanes {
            for o in 0..m {
                let tuples = (0..1u32 << m).filter(|t| allowed >> t & 1 == 1);
                let (mut any0, mut any1) = (false, false);
                for t in tuples {
                    if t >> o & 1 == 1 {
                        any1 = true;
                    } else {
                        any0 = true;
                    }
                }
                if any0 != any1 {
                    forced_mask[o] |= 1 << lane;
                    if any1 {
                        forced_val[o] |= 1 << lane;
                    }
                }
            }
        }
        let n = spec.program_inputs();
        Searcher {
            n,
            m,
            care,
            forced_mask,
            forced_val,
            lanes,
            inputs: projections(n),
        }
    }

    #[inline(always)]
    fn serves(&self, v: u64) -> u32 {
        let mut s = 0;
        for o in 0..self.m {
            if (v ^ self.forced_val[o]) & self.forced_mask[o] == 0 {
                s |= 1 << o;
            }
        }
        s
    }

    fn initial(&self) -> State {
        let mut st = State {
            vals: [0; MAX_VALUES],
            cvals: [0; MAX_VALUES],
            instrs: [Instr {
                op: Op::And,
                lhs: 0,
                rhs: 0,
            }; MAX_SEARCH_LEN],
            read: 0,
            served: self.serves(0),
        };
        for (i, &v) in self.inputs.iter().enumerate() {
            st.vals[i] = v;
            st.cvals[i] = v & self.care;
            st.served |= self.serves(v);
        }
        st
    }

    fn run(&self, len: usize) -> (Option<SequentialProgram>, u64) {
        let mut st = self.initial();
        let mut nodes = 0;
        let found = if len == 0 {
            self.finish(&st, 0)
        } else {
            self.dfs(&mut st, 0, len, &mut nodes)
        };
        (found, nodes)
    }

    /// Splits on the first instruction; the lowest branch with a result
    /// wins, so the answer matches the single-threaded one.
    fn run_parallel(&self, len: usize) -> (Option<SequentialProgram>, u64) {
        if len == 0 {
            return self.run(0);
        }
        let st = self.initial();
        let firsts: Vec<Instr> = self.candidates(&st, 0).collect();
        let nodes = std::sync::atomic::AtomicU64::new(0);
        let found = firsts.par_iter().find_map_first(|&ins| {
            let mut st = st;
            let mut local = 0;
            let r = self.place(&mut st, 0, len, ins, &mut local);
            nodes.fetch_add(local, std::sync::atomic::Ordering::Relaxed);
            r
        });
        (found, nodes.into_inner())
    }

    fn candidates<'a>(&'a self, _st: &'a State, k: usize) -> impl Iterator<Item = Instr> + 'a {
        let positions = self.n + k;
        (0..positions).flat_map(move |lhs| {
            (lhs + 1..positions).flat_map(move |rhs| Op::ALL.into_iter().map(move |op| Instr { op, lhs, rhs }))
        })
    }

    fn dfs(&self, st: &mut State, k: usize, len: usize, nodes: &mut u64) -> Option<SequentialProgram> {
        let positions = self.n + k;
        for lhs in 0..positions {
            for rhs in lhs + 1..positions {
                for op in Op::ALL {
                    if let Some(p) = self.place(st, k, len, Instr { op, lhs, rhs }, nodes) {
                        return Some(p);
                    }
                }
            }
        }
        None
    }

    /// Tries `ins` at position `k`, recursing if it survives pruning.
    #[inline(always)]
    fn place(&self, st: &mut State, k: usize, len: usize, ins: Instr, nodes: &mut u64) -> Option<SequentialProgram> {
        let positions = self.n + k;
        let Instr { op, lhs, rhs } = ins;
        let v = op.apply(st.vals[lhs], st.vals[rhs]);
        let cv = v & self.care;
        if cv == 0 || st.cvals[..positions].contains(&cv) {
            return None;
        }
        if k > 0 && rhs != positions - 1 && cv < st.cvals[positions - 1] {
            return None;
        }
        let remaining = len - k - 1;
        let computed = ((1u32 << positions) - 1) & !((1u32 << self.n) - 1);
        let read = st.read | 1 << lhs | 1 << rhs;
        let unread = (computed & !read).count_ones() as usize + 1;
        if unread > self.m + remaining {
            return None;
        }
        let served = st.served | self.serves(v);
        let missing = self.m - served.count_ones() as usize;
        if missing > remaining {
            return None;
        }
        if remaining == 0 && self.serves(v) == 0 {
            return None;
        }
        *nodes += 1;
        let saved = (st.read, st.served);
        st.vals[positions] = v;
        st.cvals[positions] = cv;
        st.instrs[k] = ins;
        st.read = read;
        st.served = served;
        let r = if remaining == 0 {
            self.finish(st, len)
        } else {
            self.dfs(st, k + 1, len, nodes)
        };
        (st.read, st.served) = saved;
        r
    }

    /// Picks outputs among the values of a complete program.
    fn finish(&self, st: &State, len: usize) -> Option<SequentialProgram> {
        let total = self.n + len;
        if st.served.count_ones() as usize != self.m {
            return None;
        }
        let computed = ((1u32 << total) - 1) & !((1u32 << self.n) - 1);
        let unread = computed & !st.read;
        // every unread computed value must be an output
        if (0..total).any(|p| unread >> p & 1 == 1 && self.serves(st.vals[p]) == 0) {
            return None;
        }
        let mut cands: Vec<Vec<(Output, u64)>> = vec![Vec::new(); self.m];
        for (o, list) in cands.iter_mut().enumerate() {
            for p in 0..total {
                if self.serves(st.vals[p]) >> o & 1 == 1 {
                    list.push((Output::Value(p), st.vals[p]));
                }
            }
            if self.serves(0) >> o & 1 == 1 {
                list.push((Output::Zero, 0));
            }
        }
        let mut chosen = Vec::with_capacity(self.m);
        let mut partial = vec![0u32; self.lanes.len()];
        if !self.choose(&cands, 0, &mut partial, &mut chosen) {
            return None;
        }
        SequentialProgram::new(self.n, st.instrs[..len].to_vec(), chosen).ok()
    }

    /// Depth-first choice of output `o`, keeping for each care lane the
    /// tuple prefix chosen so far and checking it extends to an acceptable tuple.
    fn choose(&self, cands: &[Vec<(Output, u64)>], o: usize, partial: &mut [u32], chosen: &mut Vec<Output>) -> bool {
        if o == self.m {
            return true;
        }
        let prefix_mask = (1u32 << (o + 1)) - 1;
        for &(out, v) in &cands[o] {
            let ok = self.lanes.iter().zip(partial.iter()).all(|(&(lane, allowed), &t)| {
                let t = t | ((v >> lane & 1) as u32) << o;
                (0..1u32 << self.m).any(|u| allowed >> u & 1 == 1 && u & prefix_mask == t)
            });
            if !ok {
                continue;
            }
            for ((lane, _), t) in self.lanes.iter().zip(partial.iter_mut()) {
                *t |= ((v >> lane & 1) as u32) << o;
            }
            chosen.push(out);
            if self.choose(cands, o + 1, partial, chosen) {
                return true;
            }
            chosen.pop();
            for t in partial.iter_mut() {
                *t &= !(1 << o);
            }
        }
        false
    }
}
