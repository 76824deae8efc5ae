//! Cumulative-xor post-treatment as a block-string transform, with the
//! prefix-xor bijection that relates its output distribution to its input's.
//!
//! These operations are test machinery, not a security proof: the
//! asymptotic indistinguishability statement is not testable, so the crate
//! ships only the constructive maps plus measure-preservation checks built
//! on them.

use crate::error::{Error, Result};

/// `k` blocks of `width` bits each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockString {
    width: u32,
    blocks: Vec<u64>,
}

impl BlockString {
    pub fn new(width: u32, blocks: Vec<u64>) -> Result<Self> {
        if width == 0 || width > 64 {
            return Err(Error::Domain(format!("block width {width} out of 1..=64")));
        }
        let mask = Self::mask(width);
        if let Some(bad) = blocks.iter().find(|&&b| b > mask) {
            return Err(Error::Domain(format!("block {bad:#x} wider than {width} bits")));
        }
        Ok(Self { width, blocks })
    }

    fn mask(width: u32) -> u64 {
        if width == 64 {
            u64::MAX
        } else {
            (1u64 << width) - 1
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn blocks(&self) -> &[u64] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// The post-treatment as a string map: block `j` of the output is
/// `x0 ^ s0 ^ h_1 ^ ... ^ h_j`. Output length equals the input block count.
pub fn construct_x(x0: u64, s0: u64, h_blocks: &BlockString) -> Result<BlockString> {
    if h_blocks.is_empty() {
        return Err(Error::Domain("construct_x needs at least one block".into()));
    }
    let mask = BlockString::mask(h_blocks.width());
    if x0 > mask || s0 > mask {
        return Err(Error::Domain("x0 and s0 must fit the block width".into()));
    }
    phi_y(x0 ^ s0, h_blocks)
}

/// Prefix-xor map: block `j` of the output is `y ^ w_1 ^ ... ^ w_j`.
pub fn phi_y(y: u64, w: &BlockString) -> Result<BlockString> {
    let mask = BlockString::mask(w.width());
    if y > mask {
        return Err(Error::Domain("y must fit the block width".into()));
    }
    let mut acc = y;
    let blocks = w
        .blocks()
        .iter()
        .map(|&b| {
            acc ^= b;
            acc
        })
        .collect();
    BlockString::new(w.width(), blocks)
}

/// Constructive inverse: `w_1 = z_1 ^ y`, `w_j = z_j ^ z_{j-1}`.
pub fn phi_y_inverse(y: u64, z: &BlockString) -> Result<BlockString> {
    let mask = BlockString::mask(z.width());
    if y > mask {
        return Err(Error::Domain("y must fit the block width".into()));
    }
    let mut prev = y;
    let blocks = z
        .blocks()
        .iter()
        .map(|&b| {
            let w = b ^ prev;
            prev = b;
            w
        })
        .collect();
    BlockString::new(z.width(), blocks)
}

/// The distinguisher wrapper of the reduction: draw `y`, transform the
/// input through the prefix-xor map, hand it to the caller's test statistic.
pub fn distinguisher_wrapper<D, Y>(d: D, w: &BlockString, y_source: &mut Y) -> Result<bool>
where
    D: Fn(&BlockString) -> bool,
    Y: FnMut() -> u64,
{
    let y = y_source() & BlockString::mask(w.width());
    Ok(d(&phi_y(y, w)?))
}
