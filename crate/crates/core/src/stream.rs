//! Byte-exact stream serialization for external test batteries, plus the
//! wall-clock throughput probe.

use std::io::Write;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::chaotic::CiSequential;
use crate::error::{Error, Result};
use crate::xorlike::{Xor128, Xor128x32, XorShift32, XorShift64, XorWow};

/// Anything that yields a 32-bit word stream. The 64-bit generators expose
/// their low halves.
pub trait Word32Source {
    fn next_word(&mut self) -> u32;
}

impl Word32Source for XorShift32 {
    fn next_word(&mut self) -> u32 {
        self.next_u32()
    }
}

impl Word32Source for XorShift64 {
    fn next_word(&mut self) -> u32 {
        self.next_u64() as u32
    }
}

impl Word32Source for Xor128 {
    fn next_word(&mut self) -> u32 {
        self.next_u64() as u32
    }
}

impl Word32Source for XorWow {
    fn next_word(&mut self) -> u32 {
        self.next_u64() as u32
    }
}

impl Word32Source for Xor128x32 {
    fn next_word(&mut self) -> u32 {
        self.next_u32()
    }
}

impl Word32Source for CiSequential {
    fn next_word(&mut self) -> u32 {
        self.next_u32()
    }
}

/// Replays a precomputed word buffer (kernel output, test vectors).
#[derive(Debug, Clone)]
pub struct BufferedWords {
    words: Vec<u32>,
    pos: usize,
}

impl BufferedWords {
    pub fn new(words: Vec<u32>) -> Self {
        Self { words, pos: 0 }
    }
}

impl Word32Source for BufferedWords {
    fn next_word(&mut self) -> u32 {
        let w = self.words[self.pos % self.words.len()];
        self.pos += 1;
        w
    }
}

/// Serialization formats. `RawLe32` is the byte-exact little-endian word
/// layout; `Hex` prints one zero-padded lowercase word per line; `Bits`
/// prints each word's 32 bits least-significant first, unseparated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitFormat {
    RawLe32,
    Hex,
    Bits,
}

impl std::str::FromStr for EmitFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw-le32" | "raw" => Ok(Self::RawLe32),
            "hex" => Ok(Self::Hex),
            "bits" => Ok(Self::Bits),
            other => Err(Error::Parse(format!(
                "unknown format {other:?}; expected raw-le32, hex or bits"
            ))),
        }
    }
}

/// Streams `count` words into the sink.
pub fn emit<W: Write>(
    gen: &mut dyn Word32Source,
    count: u64,
    format: EmitFormat,
    sink: &mut W,
) -> Result<()> {
    match format {
        EmitFormat::RawLe32 => {
            let mut buf = Vec::with_capacity(4096);
            let mut remaining = count;
            while remaining > 0 {
                buf.clear();
                let batch = remaining.min(1024);
                for _ in 0..batch {
                    buf.extend_from_slice(&gen.next_word().to_le_bytes());
                }
                sink.write_all(&buf)?;
                remaining -= batch;
            }
        }
        EmitFormat::Hex => {
            for _ in 0..count {
                writeln!(sink, "{:08x}", gen.next_word())?;
            }
        }
        EmitFormat::Bits => {
            let mut line = String::with_capacity(32);
            for _ in 0..count {
                let w = gen.next_word();
                line.clear();
                for i in 0..32 {
                    line.push(if (w >> i) & 1 == 1 { '1' } else { '0' });
                }
                sink.write_all(line.as_bytes())?;
            }
        }
    }
    sink.flush()?;
    Ok(())
}

/// Parses bytes produced by [`emit`] back into words.
pub fn parse_words(format: EmitFormat, bytes: &[u8]) -> Result<Vec<u32>> {
    match format {
        EmitFormat::RawLe32 => {
            if !bytes.len().is_multiple_of(4) {
                return Err(Error::Parse(format!(
                    "raw stream of {} bytes is not word-aligned",
                    bytes.len()
                )));
            }
            Ok(bytes
                .chunks_exact(4)
                .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
                .collect())
        }
        EmitFormat::Hex => std::str::from_utf8(bytes)
            .map_err(|e| Error::Parse(e.to_string()))?
            .lines()
            .map(|l| u32::from_str_radix(l.trim(), 16).map_err(|e| Error::Parse(e.to_string())))
            .collect(),
        EmitFormat::Bits => {
            let text = std::str::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))?;
            let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
            if !chars.len().is_multiple_of(32) {
                return Err(Error::Parse(format!(
                    "bit stream of {} digits is not word-aligned",
                    chars.len()
                )));
            }
            chars
                .chunks(32)
                .map(|chunk| {
                    let mut w = 0u32;
                    for (i, &c) in chunk.iter().enumerate() {
                        match c {
                            '1' => w |= 1 << i,
                            '0' => {}
                            other => {
                                return Err(Error::Parse(format!("bad bit digit {other:?}")))
                            }
                        }
                    }
                    Ok(w)
                })
                .collect()
        }
    }
}

/// Wall-clock throughput of 32-bit outputs with host metadata.
#[derive(Debug, Clone, Serialize)]
pub struct ThroughputReport {
    pub generator: String,
    pub words: u64,
    pub seconds: f64,
    pub samples_per_sec: f64,
    pub os: &'static str,
    pub arch: &'static str,
}

/// Runs the generator for at least `duration` (>= 1 s) and reports the rate.
pub fn benchmark(
    gen: &mut dyn Word32Source,
    name: &str,
    duration: Duration,
) -> Result<ThroughputReport> {
    if duration < Duration::from_secs(1) {
        return Err(Error::Domain("benchmark duration must be at least 1 s".into()));
    }
    let start = Instant::now();
    let mut words = 0u64;
    let mut sink = 0u32;
    while start.elapsed() < duration {
        for _ in 0..65_536 {
            sink = sink.wrapping_add(gen.next_word());
        }
        words += 65_536;
    }
    std::hint::black_box(sink);
    let seconds = start.elapsed().as_secs_f64();
    Ok(ThroughputReport {
        generator: name.to_string(),
        words,
        seconds,
        samples_per_sec: words as f64 / seconds,
        os: std::env::consts::OS,
        arch: std::env::consts::ARCH,
    })
}
