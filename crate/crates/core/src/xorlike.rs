//! Marsaglia xor-like generators used as strategy sources.
//!
//! All step functions are bit-exact transcriptions of the published
//! recurrences. Constants and default seeds, which the literature fixes but
//! this crate merely adopts, are recorded here:
//!
//! | generator  | registers            | recurrence                                              | default seed(s)                                      |
//! |------------|----------------------|---------------------------------------------------------|------------------------------------------------------|
//! | xorshift32 | `z` (u32)            | `z^=z<<13; z^=z>>17; z^=z<<5`                           | 2463534242                                           |
//! | xorshift64 | `x` (u64)            | `x^=x<<13; x^=x>>7; x^=x<<17`                           | 88172645463325252                                    |
//! | xor128     | `x,y,z,w` (u64)      | `t=x^(x<<11); x=y; y=z; z=w; w=(w^(w>>19))^(t^(t>>8))`  | 123456789, 362436069, 521288629, 88675123            |
//! | xorwow     | `x,y,z,w,v,d` (u64)  | `t=x^(x>>2); x=y; y=z; z=w; w=v; v=(v^(v<<4))^(t^(t<<1)); d+=362437; out=d+v` | 123456789, 362436069, 521288629, 88675123, 5783321, 6615241 |
//!
//! `xor128` and `xorwow` run the 32-bit recurrences widened to 64-bit words;
//! the shift constants and seed values are kept as published. A 32-bit xor128
//! variant ([`Xor128x32`]) is provided for the space-efficient kernel, where
//! the wide registers are replaced by `u32`.

use crate::error::{Error, Result};

/// 32-bit xorshift with the (13, 17, 5) triple. Period `2^32 - 1` over the
/// nonzero states; zero is an absorbing fixed point and is rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct XorShift32 {
    z: u32,
}

impl XorShift32 {
    pub const DEFAULT_SEED: u32 = 2_463_534_242;

    pub fn new(seed: u32) -> Result<Self> {
        if seed == 0 {
            return Err(Error::InvalidSeed("xorshift32 seed must be nonzero".into()));
        }
        Ok(Self { z: seed })
    }

    pub fn state(&self) -> u32 {
        self.z
    }

    /// One round: `z ^= z<<13; z ^= z>>17; z ^= z<<5`; returns the new state.
    pub fn next_u32(&mut self) -> u32 {
        let mut z = self.z;
        z ^= z << 13;
        z ^= z >> 17;
        z ^= z << 5;
        self.z = z;
        z
    }
}

/// 64-bit single-register xorshift with the (13, 7, 17) triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct XorShift64 {
    x: u64,
}

impl XorShift64 {
    pub const DEFAULT_SEED: u64 = 88_172_645_463_325_252;

    pub fn new(seed: u64) -> Result<Self> {
        if seed == 0 {
            return Err(Error::InvalidSeed("xorshift64 seed must be nonzero".into()));
        }
        Ok(Self { x: seed })
    }

    pub fn state(&self) -> u64 {
        self.x
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.x;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.x = x;
        x
    }
}

/// Four-register xor128, widened to 64-bit words.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Xor128 {
    x: u64,
    y: u64,
    z: u64,
    w: u64,
}

impl Xor128 {
    pub const DEFAULT_SEED: [u64; 4] = [123_456_789, 362_436_069, 521_288_629, 88_675_123];

    pub fn new(seed: [u64; 4]) -> Result<Self> {
        if seed == [0; 4] {
            return Err(Error::InvalidSeed("xor128 seed must not be all-zero".into()));
        }
        let [x, y, z, w] = seed;
        Ok(Self { x, y, z, w })
    }

    pub fn with_default_seed() -> Self {
        Self::new(Self::DEFAULT_SEED).expect("default seed is nonzero")
    }

    pub fn next_u64(&mut self) -> u64 {
        let t = self.x ^ (self.x << 11);
        self.x = self.y;
        self.y = self.z;
        self.z = self.w;
        self.w = (self.w ^ (self.w >> 19)) ^ (t ^ (t >> 8));
        self.w
    }
}

/// Five shift registers plus a Weyl counter, widened to 64-bit words.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct XorWow {
    x: u64,
    y: u64,
    z: u64,
    w: u64,
    v: u64,
    d: u64,
}

impl XorWow {
    pub const DEFAULT_SEED: [u64; 6] = [
        123_456_789,
        362_436_069,
        521_288_629,
        88_675_123,
        5_783_321,
        6_615_241,
    ];

    /// `seed[..5]` are the shift registers (must not be all-zero), `seed[5]`
    /// is the additive counter (unrestricted).
    pub fn new(seed: [u64; 6]) -> Result<Self> {
        if seed[..5] == [0; 5] {
            return Err(Error::InvalidSeed(
                "xorwow shift registers must not be all-zero".into(),
            ));
        }
        let [x, y, z, w, v, d] = seed;
        Ok(Self { x, y, z, w, v, d })
    }

    pub fn with_default_seed() -> Self {
        Self::new(Self::DEFAULT_SEED).expect("default seed is nonzero")
    }

    pub fn next_u64(&mut self) -> u64 {
        let t = self.x ^ (self.x >> 2);
        self.x = self.y;
        self.y = self.z;
        self.z = self.w;
        self.w = self.v;
        self.v = (self.v ^ (self.v << 4)) ^ (t ^ (t << 1));
        self.d = self.d.wrapping_add(362_437);
        self.d.wrapping_add(self.v)
    }
}

/// xor128 with the 64-bit registers replaced by 32-bit words, as used by the
/// space-efficient kernel. Same shift constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Xor128x32 {
    x: u32,
    y: u32,
    z: u32,
    w: u32,
}

impl Xor128x32 {
    pub fn new(seed: [u32; 4]) -> Result<Self> {
        if seed == [0; 4] {
            return Err(Error::InvalidSeed("xor128 seed must not be all-zero".into()));
        }
        let [x, y, z, w] = seed;
        Ok(Self { x, y, z, w })
    }

    pub fn next_u32(&mut self) -> u32 {
        let t = self.x ^ (self.x << 11);
        self.x = self.y;
        self.y = self.z;
        self.z = self.w;
        self.w = (self.w ^ (self.w >> 19)) ^ (t ^ (t >> 8));
        self.w
    }
}

/// Unbiased integer in `1..=k` by rejection sampling on the raw 32-bit
/// output, treated as a word in `0..2^32`. With `k = 2^32` every draw is
/// accepted. `k = 0` is a domain error, `k > 2^32` exceeds the source range.
pub fn uniform_range(rng: &mut XorShift32, k: u64) -> Result<u64> {
    const RANGE: u64 = 1 << 32;
    if k == 0 {
        return Err(Error::Domain("uniform_range needs k >= 1".into()));
    }
    if k > RANGE {
        return Err(Error::Domain(format!(
            "uniform_range k = {k} exceeds the 32-bit source range"
        )));
    }
    let limit = RANGE / k * k;
    loop {
        let v = u64::from(rng.next_u32());
        if v < limit {
            return Ok(v % k + 1);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xorshift32_single_step_from_one() {
        let mut g = XorShift32::new(1).unwrap();
        assert_eq!(g.next_u32(), 270_369);
    }

    #[test]
    fn xorshift32_default_seed_step() {
        let mut g = XorShift32::new(XorShift32::DEFAULT_SEED).unwrap();
        assert_eq!(g.next_u32(), 723_471_715);
    }

    #[test]
    fn zero_seeds_rejected() {
        assert!(XorShift32::new(0).is_err());
        assert!(XorShift64::new(0).is_err());
        assert!(Xor128::new([0; 4]).is_err());
        assert!(Xor128x32::new([0; 4]).is_err());
        assert!(XorWow::new([0, 0, 0, 0, 0, 7]).is_err());
        // Counter-only nonzero is still a degenerate shift register.
        assert!(XorWow::new([1, 0, 0, 0, 0, 0]).is_ok());
    }

    #[test]
    fn xorshift64_single_step_from_one() {
        // Hand evaluation of the three shift-xor steps with triple (13, 7, 17).
        let mut g = XorShift64::new(1).unwrap();
        assert_eq!(g.next_u64(), 1_082_269_761);
    }

    #[test]
    fn xorshift64_default_seed_step() {
        let mut g = XorShift64::new(XorShift64::DEFAULT_SEED).unwrap();
        assert_eq!(g.next_u64(), 8_748_534_153_485_358_512);
    }

    #[test]
    fn xor128_default_seed_outputs() {
        // Straight-line evaluation of the published update, frozen.
        let mut g = Xor128::with_default_seed();
        assert_eq!(g.next_u64(), 252_977_563_114);
        assert_eq!(g.next_u64(), 646_616_338_854);
        assert_eq!(g.next_u64(), 476_657_867_818);
    }

    #[test]
    fn xorwow_default_seed_outputs() {
        let mut g = XorWow::with_default_seed();
        assert_eq!(g.next_u64(), 246_875_399);
        assert_eq!(g.next_u64(), 3_690_007_200);
        assert_eq!(g.next_u64(), 57_099_155_853);
    }

    #[test]
    fn uniform_range_k1_is_always_one() {
        let mut g = XorShift32::new(42).unwrap();
        for _ in 0..100 {
            assert_eq!(uniform_range(&mut g, 1).unwrap(), 1);
        }
    }

    #[test]
    fn uniform_range_k0_rejected() {
        let mut g = XorShift32::new(42).unwrap();
        assert!(uniform_range(&mut g, 0).is_err());
        assert!(uniform_range(&mut g, (1 << 32) + 1).is_err());
    }

    #[test]
    fn uniform_range_full_width_accepts_every_draw() {
        // k = 2^32 leaves no rejection region: output is draw + 1.
        let mut g = XorShift32::new(7).unwrap();
        let mut probe = g;
        for _ in 0..1000 {
            let raw = u64::from(probe.next_u32());
            assert_eq!(uniform_range(&mut g, 1 << 32).unwrap(), raw + 1);
        }
    }

    #[test]
    fn uniform_range_k3_chi_square() {
        // Chi-square against the flat distribution over {1, 2, 3};
        // 3 * 10^6 draws, each frequency within 1% of 1/3.
        let mut g = XorShift32::new(0xDEADBEEF).unwrap();
        let n = 3_000_000usize;
        let mut counts = [0u64; 3];
        for _ in 0..n {
            let v = uniform_range(&mut g, 3).unwrap();
            counts[(v - 1) as usize] += 1;
        }
        let expect = n as f64 / 3.0;
        let mut chi2 = 0.0;
        for &c in &counts {
            let diff = c as f64 - expect;
            chi2 += diff * diff / expect;
            assert!(
                (c as f64 - expect).abs() / expect < 0.01,
                "frequency off by more than 1%: {counts:?}"
            );
        }
        // df = 2; chi2 below 20 is a ~4.5e-5 tail.
        assert!(chi2 < 20.0, "chi2 = {chi2}");
    }

    // ----- 16-bit analogs used as reference-loop oracles -----

    fn xorshift16_step(mut z: u16) -> u16 {
        z ^= z << 7;
        z ^= z >> 9;
        z ^= z << 8;
        z
    }

    #[test]
    fn analog16_full_period_cycle_walk() {
        // The (7, 9, 8) 16-bit analog walks a single cycle through every
        // nonzero state, the reduced-width stand-in for the 2^32 - 1 period.
        let mut z = 1u16;
        let mut steps = 0u32;
        loop {
            z = xorshift16_step(z);
            steps += 1;
            assert_ne!(z, 0);
            if z == 1 {
                break;
            }
        }
        assert_eq!(steps, 65_535);
    }

    #[test]
    fn full_width_period_lower_bound() {
        // Cycle-walk a bounded prefix at full width: no return within 10^6
        // steps for sampled seeds.
        for seed in [1u32, 0xCAFE, 0x1234_5678, 0xFFFF_FFFF] {
            let mut g = XorShift32::new(seed).unwrap();
            for _ in 0..1_000_000 {
                assert_ne!(g.next_u32(), seed);
            }
        }
    }

    #[test]
    fn uniform_range_exhaustive_16bit_analog() {
        // Sweep every nonzero 16-bit state once, apply the analog rejection
        // mapping, and demand counts within 1 of each other (the state 0,
        // which never occurs, accounts for the single missing draw).
        const RANGE: u32 = 1 << 16;
        for k in [2u32, 3, 5, 16, 256, 1 << 16] {
            let limit = RANGE / k * k;
            let mut counts = vec![0u32; k as usize];
            let mut z = 1u16;
            loop {
                z = xorshift16_step(z);
                let v = u32::from(z);
                if v < limit {
                    counts[(v % k) as usize] += 1;
                }
                if z == 1 {
                    break;
                }
            }
            let lo = *counts.iter().min().unwrap();
            let hi = *counts.iter().max().unwrap();
            assert!(hi - lo <= 1, "k={k}: counts not flat: min={lo} max={hi}");
        }
    }

    // ----- bijectivity: exhaustive at 8-bit analog, inverse map at full width -----

    fn xorshift8_step(mut z: u8) -> u8 {
        z ^= z << 3;
        z ^= z >> 5;
        z ^= z << 4;
        z
    }

    #[test]
    fn analog8_step_bijective() {
        let mut seen = [false; 256];
        for s in 0..=255u8 {
            let t = xorshift8_step(s);
            assert!(!seen[t as usize]);
            seen[t as usize] = true;
        }
        assert_eq!(xorshift8_step(0), 0);
    }

    // Inverses of the individual xor-shift stages, for full-width bijection
    // checks. `x ^= x << s` is inverted by repeated re-application.
    fn undo_xls(mut x: u64, s: u32) -> u64 {
        let mut shift = s;
        while shift < 64 {
            x ^= x << shift;
            shift *= 2;
        }
        x
    }

    fn undo_xrs(mut x: u64, s: u32) -> u64 {
        let mut shift = s;
        while shift < 64 {
            x ^= x >> shift;
            shift *= 2;
        }
        x
    }

    #[test]
    fn xorshift64_step_invertible_at_full_width() {
        let mut seed = 0x9E37_79B9_7F4A_7C15u64;
        for _ in 0..10_000 {
            seed = seed.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1);
            if seed == 0 {
                continue;
            }
            let mut g = XorShift64::new(seed).unwrap();
            let out = g.next_u64();
            let back = undo_xls(undo_xrs(undo_xls(out, 17), 7), 13);
            assert_eq!(back, seed);
        }
    }

    #[test]
    fn xor128_step_invertible_at_full_width() {
        // Recover (x, y, z, w) from the post-step state.
        let mut seed = 1u64;
        for _ in 0..10_000 {
            seed = seed.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1);
            let start = [seed, seed.rotate_left(17), !seed, seed ^ 0xABCD] ;
            let mut g = Xor128::new(start).unwrap();
            g.next_u64();
            let (nx, ny, nz, nw) = (g.x, g.y, g.z, g.w);
            let w_old = nz;
            let t = undo_xrs(nw ^ (w_old ^ (w_old >> 19)), 8);
            let x_old = undo_xls(t, 11);
            assert_eq!([x_old, nx, ny, nz], start);
        }
    }

    #[test]
    fn xorwow_step_invertible_at_full_width() {
        let mut seed = 3u64;
        for _ in 0..10_000 {
            seed = seed.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1);
            let start = [seed | 1, seed ^ 5, seed >> 3, !seed, seed.rotate_left(9), seed ^ 0xFF];
            let mut g = XorWow::new(start).unwrap();
            g.next_u64();
            let v_old = g.w;
            let t = undo_xls(g.v ^ (v_old ^ (v_old << 4)), 1);
            let x_old = undo_xrs(t, 2);
            let d_old = g.d.wrapping_sub(362_437);
            assert_eq!([x_old, g.x, g.y, g.z, g.w, d_old], start);
        }
    }

    #[test]
    fn determinism_identical_seeds() {
        let mut a = XorShift32::new(99).unwrap();
        let mut b = XorShift32::new(99).unwrap();
        for _ in 0..10_000 {
            assert_eq!(a.next_u32(), b.next_u32());
        }
    }
}
