//! The phase-space metric and the constructive disorder witnesses.
//!
//! A phase point pairs a stored strategy prefix with a state. The distance
//! adds the Hamming distance between states to a base-10 series over the
//! symmetric differences of strategy terms; truncating the series after `K`
//! stored terms costs at most `10^-K`, which every result carries as an
//! explicit bound.

use crate::chaotic::{apply_subset, iterate, BooleanFunction, SubsetStrategy};
use crate::error::{Error, Result};

/// A point of the phase space: strategy prefix plus current state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhasePoint {
    pub strategy: SubsetStrategy,
    pub state: u64,
}

impl PhasePoint {
    pub fn new(strategy: SubsetStrategy, state: u64) -> Result<Self> {
        let n = strategy.n();
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        if state > mask {
            return Err(Error::Domain(format!(
                "state {state:#x} exceeds the {n}-bit space"
            )));
        }
        Ok(Self { strategy, state })
    }

    pub fn n(&self) -> u32 {
        self.strategy.n()
    }
}

/// Distance value with the truncation error bound of the strategy series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Distance {
    pub value: f64,
    /// The discarded tail of the series is at most this.
    pub truncation_bound: f64,
    /// Number of strategy terms the series actually consumed.
    pub prefix_len: usize,
}

/// `d(X, Y) = hamming(E, E') + (9/n) * sum_k |S-term diff|_k / 10^k`, summed
/// over the common stored prefix (its length bounds the truncation error by
/// `10^-K`). The integer part is exactly the Hamming distance; the k-th
/// decimal digit is nonzero exactly when the k-th terms differ.
pub fn distance(x: &PhasePoint, y: &PhasePoint) -> Result<Distance> {
    if x.n() != y.n() {
        return Err(Error::Domain(format!(
            "phase points of different widths: {} vs {}",
            x.n(),
            y.n()
        )));
    }
    let n = f64::from(x.n());
    let k = x.strategy.len().min(y.strategy.len());
    let d_e = (x.state ^ y.state).count_ones() as f64;
    let mut d_s = 0.0;
    let mut scale = 1.0;
    for idx in 0..k {
        scale /= 10.0;
        let diff = (x.strategy.terms()[idx] ^ y.strategy.terms()[idx]).count_ones();
        d_s += f64::from(diff) * scale;
    }
    Ok(Distance {
        value: d_e + 9.0 / n * d_s,
        truncation_bound: 10f64.powi(-(k.min(320) as i32)),
        prefix_len: k,
    })
}

/// Axiom check over every ordered pair and unordered triple of the sample.
#[derive(Debug, Clone, Default)]
pub struct MetricReport {
    pub points: usize,
    pub pairs_checked: usize,
    pub triples_checked: usize,
    pub identity_failures: usize,
    pub symmetry_failures: usize,
    pub triangle_failures: usize,
}

impl MetricReport {
    pub fn passed(&self) -> bool {
        self.identity_failures == 0 && self.symmetry_failures == 0 && self.triangle_failures == 0
    }
}

/// Checks, over the sample: `d(X, Y) = 0` exactly when state and stored
/// prefixes agree; symmetry bit-exact; triangle inequality up to twice the
/// truncation bound.
pub fn metric_axiom_suite(sample: &[PhasePoint]) -> Result<MetricReport> {
    let mut report = MetricReport {
        points: sample.len(),
        ..MetricReport::default()
    };
    let m = sample.len();
    let mut d = vec![0.0f64; m * m];
    let mut bound = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            let dist = distance(&sample[i], &sample[j])?;
            d[i * m + j] = dist.value;
            bound = bound.max(dist.truncation_bound);
        }
    }
    for i in 0..m {
        for j in 0..m {
            report.pairs_checked += 1;
            let dij = d[i * m + j];
            let prefix = sample[i].strategy.len().min(sample[j].strategy.len());
            let equal = sample[i].state == sample[j].state
                && sample[i].strategy.terms()[..prefix] == sample[j].strategy.terms()[..prefix];
            if (dij == 0.0) != equal {
                report.identity_failures += 1;
            }
            if dij.to_bits() != d[j * m + i].to_bits() {
                report.symmetry_failures += 1;
            }
        }
    }
    for i in 0..m {
        for j in (i + 1)..m {
            for l in (j + 1)..m {
                report.triples_checked += 1;
                // all three rotations of the inequality
                let (a, b, c) = (d[i * m + j], d[j * m + l], d[i * m + l]);
                let slack = 2.0 * bound + 1e-12;
                if c > a + b + slack || a > c + b + slack || b > a + c + slack {
                    report.triangle_failures += 1;
                }
            }
        }
    }
    Ok(report)
}

/// Number of leading strategy terms that must agree so the strategy series
/// stays strictly below `eps` (the discarded tail is then at most
/// `10^-k <= eps / 10`).
fn agreement_length(eps: f64) -> usize {
    let k = (-eps.log10()).ceil() as i64 + 1;
    k.max(0) as usize
}

/// A verified point of the `eps`-ball around X whose orbit reaches the
/// target state.
#[derive(Debug, Clone)]
pub struct TransitivityWitness {
    pub point: PhasePoint,
    /// Iterations after which the witness orbit sits on the target state.
    pub steps: usize,
    /// Distance from X actually achieved (with truncation bound).
    pub achieved: Distance,
}

/// Constructs a witness of strong transitivity for the negation dynamics:
/// keep the first `k0` terms of X's strategy, splice in the one subset that
/// maps the orbit onto the target state, then continue with the target's
/// strategy. Only the negation update makes the splice subset directly
/// computable (the set of differing coordinates), which is why the witness
/// is restricted to it.
pub fn transitivity_witness(
    x: &PhasePoint,
    y_target: &PhasePoint,
    eps: f64,
) -> Result<TransitivityWitness> {
    if eps <= 0.0 {
        return Err(Error::Domain("transitivity ball radius must be positive".into()));
    }
    if x.n() != y_target.n() {
        return Err(Error::Domain("phase points of different widths".into()));
    }
    let k0 = agreement_length(eps);
    if x.strategy.len() < k0 {
        return Err(Error::Domain(format!(
            "stored prefix of length {} cannot guarantee a ball of radius {eps} (needs {k0})",
            x.strategy.len()
        )));
    }
    // State of the orbit of X after consuming k0 terms (negation: xor fold).
    let mut reached = x.state;
    for &term in &x.strategy.terms()[..k0] {
        reached ^= term;
    }
    let splice = reached ^ y_target.state;

    let mut terms = Vec::with_capacity(k0 + 1 + y_target.strategy.len());
    terms.extend_from_slice(&x.strategy.terms()[..k0]);
    terms.push(splice);
    terms.extend_from_slice(y_target.strategy.terms());
    let point = PhasePoint::new(SubsetStrategy::new(x.n(), terms)?, x.state)?;

    // Replay check: the witness orbit must sit on the target state after
    // k0 + 1 steps.
    let mut replay = point.state;
    for &term in &point.strategy.terms()[..=k0] {
        replay ^= term;
    }
    if replay != y_target.state {
        return Err(Error::Certificate(
            "transitivity replay did not reach the target state".into(),
        ));
    }
    let achieved = distance(x, &point)?;
    if achieved.value >= eps {
        return Err(Error::Certificate(format!(
            "witness left the ball: d = {} >= {eps}",
            achieved.value
        )));
    }
    Ok(TransitivityWitness { point, steps: k0 + 1, achieved })
}

/// A verified periodic strategy prefix near X.
#[derive(Debug, Clone)]
pub struct PeriodicWitness {
    /// One period: the kept prefix of X followed by the return path.
    pub block: Vec<u64>,
    pub period: usize,
    pub achieved: Distance,
}

/// Builds a periodic point within `eps` of X: keep `t1` terms of X's
/// strategy, then append a shortest return path (over subset-labeled arcs)
/// from the reached state back to X's state, and repeat the block forever.
/// Needs a return path to exist; on graphs that are not strongly connected
/// the search fails with a certificate error. Capped at `n <= 10` (the
/// subset-arc search touches `2^n` arcs per vertex).
pub fn periodic_point_witness(
    f: &BooleanFunction,
    x: &PhasePoint,
    eps: f64,
) -> Result<PeriodicWitness> {
    if eps <= 0.0 {
        return Err(Error::Domain("periodic ball radius must be positive".into()));
    }
    if f.n() != x.n() {
        return Err(Error::Domain("function and phase point widths differ".into()));
    }
    if f.n() > 10 {
        return Err(Error::Resource("periodic witness search capped at n = 10".into()));
    }
    let t1 = agreement_length(eps);
    if x.strategy.len() < t1 {
        return Err(Error::Domain(format!(
            "stored prefix of length {} cannot guarantee a ball of radius {eps} (needs {t1})",
            x.strategy.len()
        )));
    }
    let kept = &x.strategy.terms()[..t1];
    let prefix_strategy = SubsetStrategy::new(f.n(), kept.to_vec())?;
    let reached = *iterate(f, x.state, &prefix_strategy).last().unwrap();

    let path = subset_return_path(f, reached, x.state)?;
    let mut block = kept.to_vec();
    block.extend_from_slice(&path);
    let period = block.len();

    // Replay: one period returns to X's state.
    let block_strategy = SubsetStrategy::new(f.n(), block.clone())?;
    if *iterate(f, x.state, &block_strategy).last().unwrap() != x.state {
        return Err(Error::Certificate("periodic replay did not close the loop".into()));
    }

    // Distance to (repeated block, state); compare over X's stored prefix.
    let mut repeated = Vec::with_capacity(x.strategy.len());
    while repeated.len() < x.strategy.len().max(period) {
        repeated.extend_from_slice(&block);
    }
    let periodic_point = PhasePoint::new(SubsetStrategy::new(f.n(), repeated)?, x.state)?;
    let achieved = distance(x, &periodic_point)?;
    if achieved.value >= eps {
        return Err(Error::Certificate(format!(
            "periodic point left the ball: d = {} >= {eps}",
            achieved.value
        )));
    }
    Ok(PeriodicWitness { block, period, achieved })
}

/// Breadth-first search over subset-labeled arcs for a path of length >= 1
/// from `from` to `to`; returns the subset labels along the path.
fn subset_return_path(f: &BooleanFunction, from: u64, to: u64) -> Result<Vec<u64>> {
    let n = f.n();
    let size = 1u64 << n;
    let subset_count = 1u64 << n; // labels 0 .. 2^n - 1 (the empty set included)
    let mut parent: Vec<Option<(u64, u64)>> = vec![None; size as usize]; // (prev state, label)
    let mut queue = std::collections::VecDeque::new();

    // Seed with all one-step successors so the path has length >= 1.
    for label in 0..subset_count {
        let next = apply_subset(f, label, from);
        if parent[next as usize].is_none() {
            parent[next as usize] = Some((from, label));
            queue.push_back(next);
        }
        if next == to {
            return Ok(vec![label]);
        }
    }
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for label in 0..subset_count {
            let next = apply_subset(f, label, v);
            if parent[next as usize].is_none() {
                parent[next as usize] = Some((v, label));
                queue.push_back(next);
            }
        }
    }
    if parent[to as usize].is_none() {
        return Err(Error::Certificate(format!(
            "no return path from state {from:#x} to {to:#x}; the subset graph is not strongly connected there"
        )));
    }
    // Parent links form a forest rooted at the seed layer, whose vertices
    // store `from` as predecessor; every link is a real arc, so the chain is
    // a valid walk from `from`.
    let mut labels = Vec::new();
    let mut cur = to;
    loop {
        let (prev, label) = parent[cur as usize].unwrap();
        labels.push(label);
        if prev == from {
            break;
        }
        cur = prev;
    }
    labels.reverse();
    Ok(labels)
}
