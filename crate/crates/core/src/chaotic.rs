//! Asynchronous iterations of Boolean maps and the product generators built
//! on them.
//!
//! A system of `n` Boolean cells is an `n`-bit word (cell `i` of the vector
//! is bit `i - 1`; this convention is fixed repo-wide). At every step a
//! subset of cells, encoded as a bitmask, is replaced by the corresponding
//! components of `f`. Strategies are finite stored mask sequences; every
//! operation depends only on the consumed prefix.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::seed::SeedExpander;
use crate::xorlike::{uniform_range, Xor128, XorShift32, XorShift64, XorWow};

/// System state: an `n`-bit unsigned word.
pub type StateWord = u64;

/// Explicit truth table of `f: B^n -> B^n`, for `1 <= n <= 16`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanFunction {
    n: u32,
    table: Vec<StateWord>,
}

impl BooleanFunction {
    pub const MAX_DIMENSION: u32 = 16;

    pub fn new(n: u32, table: Vec<StateWord>) -> Result<Self> {
        if n == 0 || n > Self::MAX_DIMENSION {
            return Err(Error::Domain(format!(
                "function dimension must be in 1..={}, got {n}",
                Self::MAX_DIMENSION
            )));
        }
        if table.len() != 1 << n {
            return Err(Error::Domain(format!(
                "truth table must have 2^{n} entries, got {}",
                table.len()
            )));
        }
        let mask = Self::mask_for(n);
        if let Some(bad) = table.iter().find(|&&v| v > mask) {
            return Err(Error::Domain(format!(
                "table entry {bad:#x} exceeds the {n}-bit state space"
            )));
        }
        Ok(Self { n, table })
    }

    /// `f(x) = (not x_1, ..., not x_n)`.
    pub fn negation(n: u32) -> Result<Self> {
        let mask = Self::mask_for(n);
        Self::new(n, (0..=mask).map(|x| !x & mask).collect())
    }

    pub fn identity(n: u32) -> Result<Self> {
        let mask = Self::mask_for(n);
        Self::new(n, (0..=mask).collect())
    }

    pub fn constant(n: u32, value: StateWord) -> Result<Self> {
        let mask = Self::mask_for(n);
        Self::new(n, vec![value & mask; (1usize << n).max(1)])
    }

    fn mask_for(n: u32) -> u64 {
        if n >= 64 {
            u64::MAX
        } else {
            (1u64 << n) - 1
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// All-ones mask of the state space.
    pub fn full_mask(&self) -> u64 {
        Self::mask_for(self.n)
    }

    pub fn eval(&self, x: StateWord) -> StateWord {
        self.table[x as usize]
    }

    /// Serialize as text: first line `n`, then `2^n` hexadecimal `f(x)`
    /// values in ascending `x` order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{}", self.n).unwrap();
        for v in &self.table {
            writeln!(out, "{v:x}").unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let n: u32 = lines
            .next()
            .ok_or_else(|| Error::Parse("empty function file".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad dimension line: {e}")))?;
        if n == 0 || n > Self::MAX_DIMENSION {
            return Err(Error::Parse(format!("dimension {n} out of range 1..=16")));
        }
        let mut table = Vec::with_capacity(1 << n);
        for line in lines {
            let v = u64::from_str_radix(line, 16)
                .map_err(|e| Error::Parse(format!("bad table entry {line:?}: {e}")))?;
            table.push(v);
        }
        Self::new(n, table)
    }

    pub fn to_file<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn from_file<P: AsRef<Path>>(path: P) -> Result<Self> {
        Self::from_text(&fs::read_to_string(path)?)
    }
}

/// Finite prefix of a subset strategy: term `k` is a bitmask naming the
/// cells updated at step `k` (bit `i - 1` set means cell `i` is updated).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetStrategy {
    n: u32,
    terms: Vec<u64>,
}

impl SubsetStrategy {
    pub fn new(n: u32, terms: Vec<u64>) -> Result<Self> {
        if n == 0 || n > 64 {
            return Err(Error::Domain(format!("strategy width must be in 1..=64, got {n}")));
        }
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        if let Some(bad) = terms.iter().find(|&&t| t > mask) {
            return Err(Error::Domain(format!(
                "strategy term {bad:#x} exceeds the {n}-bit cell range"
            )));
        }
        Ok(Self { n, terms })
    }

    /// Strategy of singleton subsets from 1-based coordinates.
    pub fn singletons(n: u32, coords: &[u32]) -> Result<Self> {
        let terms = coords
            .iter()
            .map(|&i| {
                if i == 0 || i > n {
                    Err(Error::Domain(format!("coordinate {i} out of 1..={n}")))
                } else {
                    Ok(1u64 << (i - 1))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, terms)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn terms(&self) -> &[u64] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Replace cell `i` (1-based) of `x` by component `i` of `f(x)`.
pub fn apply_single(f: &BooleanFunction, i: u32, x: StateWord) -> Result<StateWord> {
    if i == 0 || i > f.n() {
        return Err(Error::Domain(format!("cell index {i} out of 1..={}", f.n())));
    }
    let bit = 1u64 << (i - 1);
    Ok((x & !bit) | (f.eval(x) & bit))
}

/// Replace every cell named by `mask` with the corresponding component of
/// `f(x)`; cells outside `mask` keep their state.
pub fn apply_subset(f: &BooleanFunction, mask: u64, x: StateWord) -> StateWord {
    let mask = mask & f.full_mask();
    (x & !mask) | (f.eval(x) & mask)
}

/// One round of the xor form: flips exactly the cells named by `s`.
/// Agrees with `apply_subset(negation, s, x)` for all inputs.
pub fn xor_ci_step(x: StateWord, s: u64) -> StateWord {
    x ^ s
}

/// Full trajectory of the iterations driven by `strategy`, starting at
/// (and including) `x0`.
pub fn iterate(f: &BooleanFunction, x0: StateWord, strategy: &SubsetStrategy) -> Vec<StateWord> {
    let mut traj = Vec::with_capacity(strategy.len() + 1);
    let mut x = x0 & f.full_mask();
    traj.push(x);
    for &mask in strategy.terms() {
        x = apply_subset(f, mask, x);
        traj.push(x);
    }
    traj
}

/// One output of the single-cell PRNG: draws `k = b + u` with `u` uniform in
/// `1..=b`, then performs `k + 1` single-cell updates at coordinates drawn
/// uniformly in `1..=n`. The literal loop bound `i = 0..k` of the published
/// pseudocode is kept, so the update count lies in `b + 2 ..= 2b + 1`.
pub fn algorithm1_next(
    f: &BooleanFunction,
    b: u64,
    x0: StateWord,
    strat_rng: &mut XorShift32,
    len_rng: &mut XorShift32,
) -> Result<StateWord> {
    if b == 0 {
        return Err(Error::Domain("iteration floor b must be >= 1".into()));
    }
    let k = b + uniform_range(len_rng, b)?;
    let mut x = x0 & f.full_mask();
    for _ in 0..=k {
        let s = uniform_range(strat_rng, u64::from(f.n()))? as u32;
        x = apply_single(f, s, x)?;
    }
    Ok(x)
}

/// Sequential product generator: a 32-bit state xor-folded with six 32-bit
/// halves drawn from three independent xor-like sources per output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CiSequential {
    x: u32,
    xorshift: XorShift64,
    xor128: Xor128,
    xorwow: XorWow,
}

impl CiSequential {
    /// Initial 32-bit state of the reference implementation.
    pub const DEFAULT_X: u32 = 123_123_123;

    pub fn new(x: u32, xorshift: XorShift64, xor128: Xor128, xorwow: XorWow) -> Self {
        Self { x, xorshift, xor128, xorwow }
    }

    /// The reference configuration: `x = 123123123` and the documented
    /// default seeds of the three sub-generators.
    pub fn with_reference_seeds() -> Self {
        Self {
            x: Self::DEFAULT_X,
            xorshift: XorShift64::new(XorShift64::DEFAULT_SEED).unwrap(),
            xor128: Xor128::with_default_seed(),
            xorwow: XorWow::with_default_seed(),
        }
    }

    /// Deterministic seeding of all registers from one 64-bit master seed.
    pub fn from_master_seed(seed: u64) -> Self {
        let mut exp = SeedExpander::new(seed);
        Self::seed_from_expander(&mut exp)
    }

    /// Draw order (documented for replay): xorshift64 register, xor128
    /// registers x,y,z,w, xorwow registers x,y,z,w,v,d, then the 32-bit x.
    pub fn seed_from_expander(exp: &mut SeedExpander) -> Self {
        let xs = XorShift64::new(exp.next_nonzero_u64()).unwrap();
        let x128 = Xor128::new([
            exp.next_nonzero_u64(),
            exp.next_u64(),
            exp.next_u64(),
            exp.next_u64(),
        ])
        .unwrap();
        let xw = XorWow::new([
            exp.next_nonzero_u64(),
            exp.next_u64(),
            exp.next_u64(),
            exp.next_u64(),
            exp.next_u64(),
            exp.next_u64(),
        ])
        .unwrap();
        Self::new(exp.next_u32(), xs, x128, xw)
    }

    pub fn state(&self) -> u32 {
        self.x
    }

    /// One output, xoring the six 32-bit extracts in the reference statement
    /// order: low(t1), high(t2), high(t3), low(t2), high(t1), low(t3).
    pub fn next_u32(&mut self) -> u32 {
        let t1 = self.xorshift.next_u64();
        let t2 = self.xor128.next_u64();
        let t3 = self.xorwow.next_u64();
        let mut x = self.x;
        x ^= t1 as u32;
        x ^= (t2 >> 32) as u32;
        x ^= (t3 >> 32) as u32;
        x ^= t2 as u32;
        x ^= (t1 >> 32) as u32;
        x ^= t3 as u32;
        self.x = x;
        x
    }
}
