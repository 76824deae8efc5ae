//! Desk-scale statistical battery.
//!
//! Stands in for the external heavyweight suites: the toolkit emits raw
//! streams for those and runs this quick screen internally. Every test maps
//! its statistic to a p-value that is small for too-irregular streams and
//! close to 1 for too-regular ones; the pass flag demands the p-value avoid
//! both `alpha`-tails.

use serde::Serialize;
use statrs::function::erf::erfc;
use statrs::function::gamma::gamma_ur;

/// Upper regularized incomplete gamma with the zero-statistic edge handled
/// (a perfectly flat fit has p = 1; statrs rejects x = 0).
fn igamc(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else {
        gamma_ur(a, x)
    }
}

use crate::error::{Error, Result};
use crate::stream::Word32Source;

/// Packed bit stream; bit `i` of the stream is bit `i % 64` of word
/// `i / 64`, matching LSB-first reading of the little-endian serialization.
#[derive(Debug, Clone)]
pub struct BitBuffer {
    words: Vec<u64>,
    bits: usize,
}

impl BitBuffer {
    pub fn from_u32_words(words32: &[u32]) -> Self {
        let mut words = Vec::with_capacity(words32.len().div_ceil(2));
        for pair in words32.chunks(2) {
            let lo = u64::from(pair[0]);
            let hi = pair.get(1).map_or(0, |&w| u64::from(w)) << 32;
            words.push(lo | hi);
        }
        Self { words, bits: words32.len() * 32 }
    }

    /// Collects `count` 32-bit outputs of a generator.
    pub fn from_source(gen: &mut dyn Word32Source, count: usize) -> Self {
        let words32: Vec<u32> = (0..count).map(|_| gen.next_word()).collect();
        Self::from_u32_words(&words32)
    }

    pub fn zeros(bits: usize) -> Self {
        Self { words: vec![0; bits.div_ceil(64)], bits }
    }

    /// The strictly alternating stream 0101...
    pub fn alternating(bits: usize) -> Self {
        Self {
            words: vec![0xAAAA_AAAA_AAAA_AAAA; bits.div_ceil(64)],
            bits,
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut words = vec![0u64; bits.len().div_ceil(64)];
        for (i, &b) in bits.iter().enumerate() {
            if b {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        Self { words, bits: bits.len() }
    }

    pub fn len(&self) -> usize {
        self.bits
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn bit(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    fn ones(&self) -> u64 {
        let full = self.bits / 64;
        let mut count: u64 = self.words[..full].iter().map(|w| u64::from(w.count_ones())).sum();
        let rem = self.bits % 64;
        if rem > 0 {
            count += u64::from((self.words[full] & ((1u64 << rem) - 1)).count_ones());
        }
        count
    }

    /// Hamming weight of `stream XOR (stream >> lag)` over the overlap.
    fn lag_mismatches(&self, lag: usize) -> u64 {
        debug_assert!((1..64).contains(&lag));
        let span = self.bits - lag; // positions 0 .. span
        let mut count = 0u64;
        for j in 0..self.words.len() {
            let next = self.words.get(j + 1).copied().unwrap_or(0);
            let shifted = (self.words[j] >> lag) | (next << (64 - lag));
            let mut v = self.words[j] ^ shifted;
            let base = j * 64;
            if base >= span {
                break;
            }
            let valid = span - base;
            if valid < 64 {
                v &= (1u64 << valid) - 1;
            }
            count += u64::from(v.count_ones());
        }
        count
    }

    fn byte(&self, i: usize) -> u8 {
        ((self.words[i / 8] >> (8 * (i % 8))) & 0xFF) as u8
    }
}

/// Statistic, p-value and the two-sided pass flag of one test.
#[derive(Debug, Clone, Serialize)]
pub struct TestReport {
    pub name: String,
    pub statistic: f64,
    pub p_value: f64,
    pub pass: bool,
}

impl TestReport {
    fn new(name: &str, statistic: f64, p_value: f64, alpha: f64) -> Self {
        let p_value = p_value.clamp(0.0, 1.0);
        Self {
            name: name.to_string(),
            statistic,
            p_value,
            pass: p_value >= alpha && p_value <= 1.0 - alpha,
        }
    }
}

/// Runs the screen: monobit, block frequency (128-bit blocks), runs, serial
/// 2-bit, byte chi-square and the first eight autocorrelation lags. Needs at
/// least 10^6 bits.
pub fn run_battery(stream: &BitBuffer, alpha: f64) -> Result<Vec<TestReport>> {
    if stream.len() < 1_000_000 {
        return Err(Error::Domain(format!(
            "battery needs at least 10^6 bits, got {}",
            stream.len()
        )));
    }
    if !(0.0..0.5).contains(&alpha) {
        return Err(Error::Domain(format!("alpha = {alpha} out of [0, 0.5)")));
    }
    let mut reports = vec![
        monobit(stream, alpha),
        block_frequency(stream, alpha),
        runs(stream, alpha),
        serial_2bit(stream, alpha),
        byte_chi_square(stream, alpha),
    ];
    for lag in 1..=8 {
        reports.push(autocorrelation(stream, lag, alpha));
    }
    Ok(reports)
}

fn monobit(stream: &BitBuffer, alpha: f64) -> TestReport {
    let n = stream.len() as f64;
    let ones = stream.ones() as f64;
    let s_obs = (2.0 * ones - n).abs() / n.sqrt();
    TestReport::new("monobit", s_obs, erfc(s_obs / std::f64::consts::SQRT_2), alpha)
}

fn block_frequency(stream: &BitBuffer, alpha: f64) -> TestReport {
    const M: usize = 128;
    let blocks = stream.len() / M;
    let mut chi2 = 0.0;
    for b in 0..blocks {
        let mut ones = 0u32;
        for i in 0..M {
            ones += u32::from(stream.bit(b * M + i));
        }
        let pi = f64::from(ones) / M as f64;
        chi2 += (pi - 0.5) * (pi - 0.5);
    }
    chi2 *= 4.0 * M as f64;
    TestReport::new(
        "block_frequency",
        chi2,
        igamc(blocks as f64 / 2.0, chi2 / 2.0),
        alpha,
    )
}

fn runs(stream: &BitBuffer, alpha: f64) -> TestReport {
    let n = stream.len() as f64;
    let pi = stream.ones() as f64 / n;
    // Frequency prerequisite: a grossly unbalanced stream has no meaningful
    // runs statistic; report a hard fail.
    if (pi - 0.5).abs() >= 2.0 / n.sqrt() {
        return TestReport::new("runs", f64::NAN, 0.0, alpha);
    }
    let transitions = stream.lag_mismatches(1);
    let v = transitions as f64 + 1.0;
    let p = erfc((v - 2.0 * n * pi * (1.0 - pi)).abs() / (2.0 * (2.0 * n).sqrt() * pi * (1.0 - pi)));
    TestReport::new("runs", v, p, alpha)
}

fn serial_2bit(stream: &BitBuffer, alpha: f64) -> TestReport {
    let n = stream.len();
    // cyclic overlapping pattern counts
    let s1 = stream.ones();
    let mut c11 = 0u64;
    for i in 0..n {
        let a = stream.bit(i);
        let b = stream.bit((i + 1) % n);
        c11 += u64::from(a && b);
    }
    let c01 = s1 - c11; // pairs (0,1): second is 1 but not both
    let c10 = s1 - c11;
    let c00 = n as u64 + c11 - 2 * s1;
    let nf = n as f64;
    let psi1 = (2.0 / nf) * ((s1 as f64).powi(2) + (nf - s1 as f64).powi(2)) - nf;
    let psi2 = (4.0 / nf)
        * ((c00 as f64).powi(2) + (c01 as f64).powi(2) + (c10 as f64).powi(2) + (c11 as f64).powi(2))
        - nf;
    let delta = psi2 - psi1;
    TestReport::new("serial_2bit", delta, igamc(1.0, delta / 2.0), alpha)
}

fn byte_chi_square(stream: &BitBuffer, alpha: f64) -> TestReport {
    let bytes = stream.len() / 8;
    let mut counts = [0u64; 256];
    for i in 0..bytes {
        counts[stream.byte(i) as usize] += 1;
    }
    let expect = bytes as f64 / 256.0;
    let chi2: f64 = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expect;
            d * d / expect
        })
        .sum();
    TestReport::new("byte_chi_square", chi2, igamc(255.0 / 2.0, chi2 / 2.0), alpha)
}

fn autocorrelation(stream: &BitBuffer, lag: usize, alpha: f64) -> TestReport {
    let overlap = (stream.len() - lag) as f64;
    let mismatches = stream.lag_mismatches(lag) as f64;
    let matches = overlap - mismatches;
    let z = (2.0 * matches - overlap) / overlap.sqrt();
    TestReport::new(
        &format!("autocorrelation_lag_{lag}"),
        z,
        erfc(z.abs() / std::f64::consts::SQRT_2),
        alpha,
    )
}
