//! Deterministic CPU simulation of the per-thread generator grids.
//!
//! Logical threads advance in lockstep rounds: within a round every thread
//! reads the previous round's shared array, then all writes commit at once.
//! Output is therefore a pure function of (master seed, configuration, round
//! count), byte-identical whatever the number of OS workers. A hazard mode
//! exists to emulate unsynchronized same-round reads; it is deterministic
//! (thread order) but intentionally outside every contract.

use std::thread;

use crate::chaotic::CiSequential;
use crate::error::{Error, Result};
use crate::seed::SeedExpander;
use crate::xorlike::Xor128x32;

/// Shared-array read discipline for the combining kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HazardMode {
    /// Two-phase rounds: snapshot reads, then commits.
    #[default]
    Lockstep,
    /// Reads see same-round writes of lower-indexed threads. Excluded from
    /// all determinism contracts; runs single-worker.
    SameRound,
}

/// Grid geometry and combination arrays of the space-efficient kernel.
#[derive(Debug, Clone)]
pub struct GridConfig {
    pub threads: usize,
    pub combination_size: usize,
    pub comb1: Vec<usize>,
    pub comb2: Vec<usize>,
    pub hazard: HazardMode,
}

impl GridConfig {
    pub fn new(threads: usize, comb1: Vec<usize>, comb2: Vec<usize>) -> Result<Self> {
        if comb1.len() != comb2.len() || comb1.is_empty() {
            return Err(Error::Config(
                "combination arrays must be nonempty and of equal size".into(),
            ));
        }
        let config = Self {
            threads,
            combination_size: comb1.len(),
            comb1,
            comb2,
            hazard: HazardMode::Lockstep,
        };
        config.validate()?;
        Ok(config)
    }

    /// Default wiring: `comb1` is the identity block, `comb2` the reversed
    /// block.
    pub fn with_default_combs(threads: usize, combination_size: usize) -> Result<Self> {
        let comb1: Vec<usize> = (0..combination_size).collect();
        let comb2: Vec<usize> = (0..combination_size).rev().collect();
        Self::new(threads, comb1, comb2)
    }

    fn validate(&self) -> Result<()> {
        if self.threads == 0 {
            return Err(Error::Config("grid needs at least one thread".into()));
        }
        let c = self.combination_size;
        for (name, comb) in [("comb1", &self.comb1), ("comb2", &self.comb2)] {
            if let Some(&bad) = comb.iter().find(|&&v| v >= c) {
                return Err(Error::Config(format!(
                    "{name} entry {bad} outside 0..{c}"
                )));
            }
        }
        // Threads whose partner index leaves the grid are invalid
        // configurations, not silently wrapped.
        for t in 0..self.threads {
            let offset = t % c;
            for comb in [&self.comb1, &self.comb2] {
                let partner = t - offset + comb[offset];
                if partner >= self.threads {
                    return Err(Error::Config(format!(
                        "thread {t} combines with {partner}, beyond the {} threads",
                        self.threads
                    )));
                }
            }
        }
        Ok(())
    }

    fn partners(&self) -> Vec<(usize, usize)> {
        (0..self.threads)
            .map(|t| {
                let offset = t % self.combination_size;
                (
                    t - offset + self.comb1[offset],
                    t - offset + self.comb2[offset],
                )
            })
            .collect()
    }
}

/// Storage estimate of the reference layout: per thread, the three wide
/// generators counted as 32-bit register pairs plus the seed word and the
/// per-call output block. Returns (32-bit words, bytes).
pub fn memory_footprint(threads: u64, per_call: u64) -> (u64, u64) {
    let words = threads * ((4 + 5 + 6) * 2 + (1 + per_call));
    (words, words * 4)
}

// ---------------------------------------------------------------------------
// naive grid: every thread runs the full sequential generator privately
// ---------------------------------------------------------------------------

/// Grid of independent sequential generators.
#[derive(Debug, Clone)]
pub struct NaiveGrid {
    slots: Vec<CiSequential>,
}

impl NaiveGrid {
    /// Expands the master seed into per-thread parameters, thread by thread
    /// in index order (same draw order as [`CiSequential::from_master_seed`]
    /// for the first slot).
    pub fn new(master_seed: u64, threads: usize) -> Result<Self> {
        if threads == 0 {
            return Err(Error::Config("grid needs at least one thread".into()));
        }
        let mut exp = SeedExpander::new(master_seed);
        let slots = (0..threads)
            .map(|_| CiSequential::seed_from_expander(&mut exp))
            .collect();
        Ok(Self { slots })
    }

    pub fn threads(&self) -> usize {
        self.slots.len()
    }

    /// `n` outputs per thread, laid out as `out[n * thread + i]`. Threads are
    /// fully independent, so any worker split yields identical output.
    pub fn run(&mut self, n: usize, workers: usize) -> Vec<u32> {
        if n == 0 {
            return Vec::new();
        }
        let threads = self.slots.len();
        let mut out = vec![0u32; threads * n];
        let workers = workers.clamp(1, threads);
        let chunk = threads.div_ceil(workers);
        thread::scope(|scope| {
            for (slot_chunk, out_chunk) in self
                .slots
                .chunks_mut(chunk)
                .zip(out.chunks_mut(chunk * n))
            {
                scope.spawn(move || {
                    for (slot, words) in slot_chunk.iter_mut().zip(out_chunk.chunks_mut(n)) {
                        for w in words.iter_mut() {
                            *w = slot.next_u32();
                        }
                    }
                });
            }
        });
        out
    }
}

/// Seed + run in one call.
pub fn naive_kernel_run(master_seed: u64, threads: usize, n: usize, workers: usize) -> Result<Vec<u32>> {
    Ok(NaiveGrid::new(master_seed, threads)?.run(n, workers))
}

// ---------------------------------------------------------------------------
// improved grid: one narrow generator per thread plus a shared array
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
struct ImprovedSlot {
    rng: Xor128x32,
    x: u32,
}

/// Grid for the shared-memory kernel: per thread one 32-bit xor128 and the
/// running state word; one shared cell per thread.
#[derive(Debug, Clone)]
pub struct ImprovedGrid {
    config: GridConfig,
    slots: Vec<ImprovedSlot>,
    shmem: Vec<u32>,
    partners: Vec<(usize, usize)>,
}

impl ImprovedGrid {
    /// Per-thread draw order (documented for replay): four nonzero-checked
    /// xor128 registers, the state word `x`, then the shared cell.
    pub fn new(master_seed: u64, config: GridConfig) -> Result<Self> {
        config.validate()?;
        let mut exp = SeedExpander::new(master_seed);
        let mut slots = Vec::with_capacity(config.threads);
        let mut shmem = Vec::with_capacity(config.threads);
        for _ in 0..config.threads {
            let rng = Xor128x32::new([
                exp.next_nonzero_u32(),
                exp.next_u32(),
                exp.next_u32(),
                exp.next_u32(),
            ])
            .expect("first register nonzero");
            let x = exp.next_u32();
            shmem.push(exp.next_u32());
            slots.push(ImprovedSlot { rng, x });
        }
        let partners = config.partners();
        Ok(Self { config, slots, shmem, partners })
    }

    pub fn config(&self) -> &GridConfig {
        &self.config
    }

    /// `n` lockstep rounds; output `out[n * thread + i]`.
    pub fn run(&mut self, n: usize, workers: usize) -> Vec<u32> {
        match self.config.hazard {
            HazardMode::Lockstep => self.run_lockstep(n, workers),
            HazardMode::SameRound => self.run_same_round(n),
        }
    }

    fn run_lockstep(&mut self, n: usize, workers: usize) -> Vec<u32> {
        if n == 0 {
            return Vec::new();
        }
        let threads = self.slots.len();
        let mut out = vec![0u32; threads * n];
        let workers = workers.clamp(1, threads);
        let chunk = threads.div_ceil(workers);
        let mut next = vec![0u32; threads];
        for round in 0..n {
            let prev = &self.shmem;
            let partners = &self.partners;
            if workers == 1 {
                for (i, (slot, cell)) in
                    self.slots.iter_mut().zip(next.iter_mut()).enumerate()
                {
                    let (o1, o2) = partners[i];
                    let t = slot.rng.next_u32() ^ prev[o1] ^ prev[o2];
                    *cell = t;
                    slot.x ^= t;
                    out[i * n + round] = slot.x;
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
                            let t = slot.rng.next_u32() ^ prev[o1] ^ prev[o2];
                            *cell = t;
                            slot.x ^= t;
                            out_chunk[i * n + round] = slot.x;
                        }
                    });
                }
            });
            std::mem::swap(&mut self.shmem, &mut next);
        }
        out
    }

    /// Deterministic emulation of the unsynchronized kernel: threads update
    /// the live shared array in index order.
    fn run_same_round(&mut self, n: usize) -> Vec<u32> {
        let threads = self.slots.len();
        let mut out = vec![0u32; threads * n];
        for round in 0..n {
            for t in 0..threads {
                let (o1, o2) = self.partners[t];
                let val = self.slots[t].rng.next_u32() ^ self.shmem[o1] ^ self.shmem[o2];
                self.shmem[t] = val;
                self.slots[t].x ^= val;
                out[t * n + round] = self.slots[t].x;
            }
        }
        out
    }
}

/// Seed + run in one call.
pub fn improved_kernel_run(
    master_seed: u64,
    config: GridConfig,
    n: usize,
    workers: usize,
) -> Result<Vec<u32>> {
    Ok(ImprovedGrid::new(master_seed, config)?.run(n, workers))
}
