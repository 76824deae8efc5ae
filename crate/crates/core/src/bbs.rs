//! Blum Blum Shub over word-sized moduli and the grid kernel built from it.
//!
//! Squaring stays below 2^32 because the modulus stays below 2^16, so every
//! step is a single 32-bit modular square. Each kernel round assembles a
//! 32-bit word from eight 4-bit draws, widens the short periods with two
//! variable shifts, and folds in two shared cells chosen by combination
//! arrays; thread states persist through a rotation at kernel exit.

use std::thread;

use crate::error::{Error, Result};
use crate::seed::SeedExpander;
use crate::xorlike::{uniform_range, XorShift32};

/// Primes `p ≡ 3 (mod 4)` in `[131, 251]`; every distinct pair multiplies to
/// less than 2^16.
pub const BBS_PRIME_POOL: [u32; 13] = [131, 139, 151, 163, 167, 179, 191, 199, 211, 223, 227, 239, 251];

/// Filler masks for the variable shifts: a shift of `s` keeps exactly `s`
/// fresh low bits.
pub const ARRAY_SHIFT: [u32; 4] = [0, 1, 3, 7];

/// One modular-squaring state: `x` in `(1, M-1)` coprime to `M = p*q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BbsState {
    x: u32,
    m: u32,
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Checks that `m` is a product of two distinct primes, both congruent to
/// 3 mod 4, below 2^16.
fn validate_modulus(m: u32) -> Result<()> {
    if m >= 1 << 16 {
        return Err(Error::Domain(format!("modulus {m} must be below 2^16")));
    }
    let mut p = 0;
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            p = d;
            break;
        }
        d += 1;
    }
    if p == 0 {
        return Err(Error::Domain(format!("modulus {m} is not a semiprime")));
    }
    let q = m / p;
    if p == q || !is_prime(q) {
        return Err(Error::Domain(format!(
            "modulus {m} must be a product of two distinct primes"
        )));
    }
    if p % 4 != 3 || q % 4 != 3 {
        return Err(Error::Domain(format!(
            "factors of {m} must both be congruent to 3 mod 4"
        )));
    }
    Ok(())
}

impl BbsState {
    /// Rejects degenerate orbits at construction: `x` in `{0, 1, M-1}`
    /// collapses onto the fixed point 1, and any factor shared with `M`
    /// leaks out of the residue group.
    pub fn new(x: u32, m: u32) -> Result<Self> {
        validate_modulus(m)?;
        if x <= 1 || x >= m - 1 {
            return Err(Error::InvalidSeed(format!(
                "seed {x} outside the open interval (1, {})",
                m - 1
            )));
        }
        if gcd(x, m) != 1 {
            return Err(Error::InvalidSeed(format!("seed {x} shares a factor with {m}")));
        }
        Ok(Self { x, m })
    }

    pub fn state(&self) -> u32 {
        self.x
    }

    pub fn modulus(&self) -> u32 {
        self.m
    }

    /// One modular square; returns the 4 low bits of the new state.
    pub fn next4(&mut self) -> u32 {
        // m < 2^16 keeps x^2 < 2^32; the u64 product documents the headroom.
        let sq = u64::from(self.x) * u64::from(self.x);
        debug_assert!(sq < 1 << 32);
        self.x = (sq % u64::from(self.m)) as u32;
        self.x & 15
    }
}

/// Draws two distinct pool primes and returns their product.
pub fn bbs_keygen(rng: &mut XorShift32) -> u32 {
    let i = (uniform_range(rng, BBS_PRIME_POOL.len() as u64).expect("k >= 1") - 1) as usize;
    let mut j = (uniform_range(rng, BBS_PRIME_POOL.len() as u64 - 1).expect("k >= 1") - 1) as usize;
    if j >= i {
        j += 1;
    }
    BBS_PRIME_POOL[i] * BBS_PRIME_POOL[j]
}

/// Per-thread kernel state: eight squaring states plus the running word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BbsThreadState {
    bbs: [BbsState; 8],
    x: u32,
}

impl BbsThreadState {
    pub fn new(bbs: [BbsState; 8], x: u32) -> Self {
        Self { bbs, x }
    }

    pub fn x(&self) -> u32 {
        self.x
    }

    pub fn states(&self) -> &[BbsState; 8] {
        &self.bbs
    }

    /// Low 3 bits of the first and second squaring states, the combination
    /// array selectors (read before the round loop).
    pub fn selectors(&self) -> (usize, usize) {
        ((self.bbs[0].x & 7) as usize, (self.bbs[1].x & 7) as usize)
    }
}

/// One kernel round for a single thread: eight nibbles, two variable shifts
/// with their fillers (second draws from the first two states), the shared
/// fold, and the running xor. Returns `(t, x)` where `t` is the value the
/// thread publishes to the shared array and `x` the emitted word.
pub fn bbs_kernel_next(ts: &mut BbsThreadState, shmem_o1: u32, shmem_o2: u32) -> (u32, u32) {
    let mut t: u32 = 0;
    for i in 0..8 {
        t <<= 4;
        t |= ts.bbs[i].next4();
    }
    let shift = ts.bbs[2].next4() & 3;
    t <<= shift;
    t |= ts.bbs[0].next4() & ARRAY_SHIFT[shift as usize];
    let shift = ts.bbs[6].next4() & 3;
    t <<= shift;
    t |= ts.bbs[1].next4() & ARRAY_SHIFT[shift as usize];
    t ^= shmem_o1 ^ shmem_o2;
    ts.x ^= t;
    (t, ts.x)
}

/// Rotates the persisted slots: state `k` is stored in place `k + 1`, the
/// last one wraps to place 1. Slot contents are moved, never mutated.
pub fn rotate_states(ts: &mut BbsThreadState) {
    ts.bbs.rotate_right(1);
}

/// Grid geometry with the sixteen combination arrays.
#[derive(Debug, Clone)]
pub struct BbsGridConfig {
    pub threads: usize,
    pub combination_size: usize,
    pub combs: Vec<Vec<usize>>,
}

impl BbsGridConfig {
    pub fn new(threads: usize, combs: Vec<Vec<usize>>) -> Result<Self> {
        if combs.len() != 16 {
            return Err(Error::Config(format!(
                "expected 16 combination arrays, got {}",
                combs.len()
            )));
        }
        let c = combs[0].len();
        if c == 0 || combs.iter().any(|a| a.len() != c) {
            return Err(Error::Config(
                "combination arrays must be nonempty and of equal size".into(),
            ));
        }
        let config = Self { threads, combination_size: c, combs };
        config.validate()?;
        Ok(config)
    }

    /// Default arrays: array `j` offsets the block by `j`.
    pub fn with_default_combs(threads: usize, combination_size: usize) -> Result<Self> {
        let combs = (0..16)
            .map(|j| {
                (0..combination_size)
                    .map(|o| (o + j) % combination_size)
                    .collect()
            })
            .collect();
        Self::new(threads, combs)
    }

    fn validate(&self) -> Result<()> {
        if self.threads == 0 {
            return Err(Error::Config("grid needs at least one thread".into()));
        }
        let c = self.combination_size;
        for (idx, comb) in self.combs.iter().enumerate() {
            if let Some(&bad) = comb.iter().find(|&&v| v >= c) {
                return Err(Error::Config(format!(
                    "combination array {idx} entry {bad} outside 0..{c}"
                )));
            }
            // any array can be selected by any thread
            for t in 0..self.threads {
                let offset = t % c;
                let partner = t - offset + comb[offset];
                if partner >= self.threads {
                    return Err(Error::Config(format!(
                        "thread {t} with array {idx} combines with {partner}, beyond the {} threads",
                        self.threads
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Lockstep grid over [`BbsThreadState`] slots.
#[derive(Debug, Clone)]
pub struct BbsGrid {
    config: BbsGridConfig,
    slots: Vec<BbsThreadState>,
    shmem: Vec<u32>,
}

impl BbsGrid {
    /// Seeding order (documented for replay): one xorshift32 keygen source
    /// from the expander, then per thread eight (modulus, seed) pairs — the
    /// modulus from the keygen source, the seed by rejection from the
    /// expander — followed by the state word and the shared cell.
    pub fn new(config: BbsGridConfig, master_seed: u64) -> Result<Self> {
        let mut exp = SeedExpander::new(master_seed);
        let mut keygen_rng = XorShift32::new(exp.next_nonzero_u32())?;
        let mut slots = Vec::with_capacity(config.threads);
        let mut shmem = Vec::with_capacity(config.threads);
        for _ in 0..config.threads {
            let mut states = Vec::with_capacity(8);
            for _ in 0..8 {
                let m = bbs_keygen(&mut keygen_rng);
                let state = loop {
                    let x = 2 + exp.next_below(u64::from(m) - 3) as u32;
                    if let Ok(s) = BbsState::new(x, m) {
                        break s;
                    }
                };
                states.push(state);
            }
            let bbs: [BbsState; 8] = states.try_into().expect("eight states");
            slots.push(BbsThreadState::new(bbs, exp.next_u32()));
            shmem.push(exp.next_u32());
        }
        Ok(Self { config, slots, shmem })
    }

    pub fn config(&self) -> &BbsGridConfig {
        &self.config
    }

    /// One kernel invocation: per-thread partners fixed from the pre-loop
    /// selectors, `n` lockstep rounds, rotation in the epilogue. Output is
    /// `out[n * thread + i]`.
    pub fn run(&mut self, n: usize, workers: usize) -> Vec<u32> {
        if n == 0 {
            for slot in &mut self.slots {
                rotate_states(slot);
            }
            return Vec::new();
        }
        let threads = self.slots.len();
        let c = self.config.combination_size;
        let partners: Vec<(usize, usize)> = self
            .slots
            .iter()
            .enumerate()
            .map(|(t, slot)| {
                let (s1, s2) = slot.selectors();
                let offset = t % c;
                (
                    t - offset + self.config.combs[s1][offset],
                    t - offset + self.config.combs[8 + s2][offset],
                )
            })
            .collect();

        let mut out = vec![0u32; threads * n];
        let workers = workers.clamp(1, threads);
        let chunk = threads.div_ceil(workers);
        let mut next = vec![0u32; threads];
        for round in 0..n {
            let prev = &self.shmem;
            let partners = &partners;
            if workers == 1 {
                for (i, (slot, cell)) in
                    self.slots.iter_mut().zip(next.iter_mut()).enumerate()
                {
                    let (o1, o2) = partners[i];
                    let (t, x) = bbs_kernel_next(slot, prev[o1], prev[o2]);
                    *cell = t;
                    out[i * n + round] = x;
                }
                std::mem::swap(&mut self.shmem, &mut next);
                continue;
            }
            thread::scope(|scope| {
                for (chunk_idx, ((slot_chunk, next_chunk), out_chunk)) in self
                    .slots
                    .chunks_mut(chunk)
                    .zip(next.chunks_mut(chunk))
                    .zip(out.chunks_mut(chunk * n))
                    .enumerate()
                {
                    scope.spawn(move || {
                        let base = chunk_idx * chunk;
                        for (i, (slot, cell)) in
                            slot_chunk.iter_mut().zip(next_chunk.iter_mut()).enumerate()
                        {
                            let (o1, o2) = partners[base + i];
                            let (t, x) = bbs_kernel_next(slot, prev[o1], prev[o2]);
                            *cell = t;
                            out_chunk[i * n + round] = x;
                        }
                    });
                }
            });
            std::mem::swap(&mut self.shmem, &mut next);
        }
        for slot in &mut self.slots {
            rotate_states(slot);
        }
        out
    }
}
