//! Blum-Goldwasser probabilistic encryption, classic and with the
//! cumulative-keystream mask.
//!
//! The keystream is the squaring chain `x_{i+1} = x_i^2 mod N` seeded by
//! `x_0 = r^2 mod N`; decryption recovers `x_0` from `y = x_L` with the two
//! prime-power exponentiations and a CRT recombination. The classic scheme
//! masks message bits with the least-significant keystream bits. The variant
//! works on blocks of `nu = floor(log2 log2 N)` bits and masks block `i`
//! with the running xor `b_0 ^ ... ^ b_i` plus the public word `S0`;
//! decryption inverts with the same running xor (undoing a single `b_i`
//! would leave the accumulated prefix in place).

use crate::error::{Error, Result};
use crate::xorlike::{uniform_range, XorShift32};

/// Square-and-multiply `a^e mod m` for `m >= 2`, 64-bit inputs.
pub fn modpow(a: u64, e: u64, m: u64) -> Result<u64> {
    if m < 2 {
        return Err(Error::Arithmetic(format!("modulus {m} must be >= 2")));
    }
    let m128 = u128::from(m);
    let mut base = u128::from(a) % m128;
    let mut exp = e;
    let mut acc: u128 = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m128;
        }
        base = base * base % m128;
        exp >>= 1;
    }
    Ok(acc as u64)
}

/// Extended-gcd inverse of `a` modulo `m`.
pub fn modinv(a: u64, m: u64) -> Result<u64> {
    if m < 2 {
        return Err(Error::Arithmetic(format!("modulus {m} must be >= 2")));
    }
    let (mut old_r, mut r) = (i128::from(a % m), i128::from(m));
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return Err(Error::Arithmetic(format!("{a} is not invertible modulo {m}")));
    }
    let m128 = i128::from(m);
    Ok(((old_s % m128 + m128) % m128) as u64)
}

/// Securely extractable bits per keystream step: `floor(log2 log2 N)`.
/// Needs `N >= 4` so the value is at least 1.
pub fn block_bits(n: u64) -> Result<u32> {
    if n < 4 {
        return Err(Error::Domain(format!("modulus {n} too small for a block size")));
    }
    let log2n = 63 - n.leading_zeros(); // floor(log2 n), crossing no power boundary
    Ok(31 - log2n.leading_zeros())
}

/// Keystream-masked units plus the chain tail `y = x_0^(2^L) mod N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BgCiphertext {
    /// Masked units, each `unit_bits` wide.
    pub units: Vec<u64>,
    /// 1 for the classic bit-level scheme, `nu` for the block variant.
    pub unit_bits: u32,
    pub y: u64,
}

impl BgCiphertext {
    /// Text form: length, unit width, hex units, decimal `y`.
    pub fn to_text(&self) -> String {
        let units: Vec<String> = self.units.iter().map(|u| format!("{u:x}")).collect();
        format!(
            "L {}\nunit {}\nc {}\ny {}\n",
            self.units.len(),
            self.unit_bits,
            units.join(" "),
            self.y
        )
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut l = None;
        let mut unit_bits = None;
        let mut units = None;
        let mut y = None;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            match key {
                "L" => l = Some(parse_dec(rest)?),
                "unit" => unit_bits = Some(parse_dec(rest)? as u32),
                "c" => {
                    units = Some(
                        rest.split_whitespace()
                            .map(|tok| {
                                u64::from_str_radix(tok, 16)
                                    .map_err(|e| Error::Parse(format!("bad unit {tok:?}: {e}")))
                            })
                            .collect::<Result<Vec<_>>>()?,
                    )
                }
                "y" => y = Some(parse_dec(rest)?),
                other => return Err(Error::Parse(format!("unknown ciphertext field {other:?}"))),
            }
        }
        let (Some(l), Some(unit_bits), Some(units), Some(y)) = (l, unit_bits, units, y) else {
            return Err(Error::Parse("ciphertext file misses a field".into()));
        };
        if units.len() as u64 != l {
            return Err(Error::Parse(format!(
                "ciphertext declares L = {l} but carries {} units",
                units.len()
            )));
        }
        Ok(Self { units, unit_bits, y })
    }
}

fn parse_dec(tok: &str) -> Result<u64> {
    tok.trim()
        .parse()
        .map_err(|e| Error::Parse(format!("bad integer {tok:?}: {e}")))
}

fn check_r(n: u64, r: u64) -> Result<()> {
    if r == 0 || r > n {
        return Err(Error::Domain(format!("r = {r} outside 1..={n}")));
    }
    if gcd64(r, n) != 1 {
        // A shared factor would hand the holder a divisor of N; refuse.
        return Err(Error::Domain(format!("r = {r} shares a factor with the modulus")));
    }
    Ok(())
}

fn gcd64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn square_chain_mask(n: u64, r: u64, len: usize, bits: u32) -> Result<(Vec<u64>, u64)> {
    let mask = (1u64 << bits) - 1;
    let mut x = modpow(r, 2, n)?;
    let mut ks = Vec::with_capacity(len);
    for _ in 0..len {
        ks.push(x & mask);
        x = modpow(x, 2, n)?;
    }
    Ok((ks, x))
}

/// Classic bit-level encryption of `msg` under the public modulus.
pub fn bg_encrypt(n: u64, msg: &[bool], r: u64) -> Result<BgCiphertext> {
    check_r(n, r)?;
    let (ks, y) = square_chain_mask(n, r, msg.len(), 1)?;
    let units = msg
        .iter()
        .zip(&ks)
        .map(|(&m, &b)| u64::from(m) ^ b)
        .collect();
    Ok(BgCiphertext { units, unit_bits: 1, y })
}

/// Recovers `x_0` from the chain tail with the secret factorization.
fn recover_x0(p: u64, q: u64, len: usize, y: u64) -> Result<u64> {
    let n = p * q;
    if y >= n {
        return Err(Error::Parse(format!("ciphertext tail y = {y} not reduced modulo {n}")));
    }
    // Exponents reduced by Fermat; a reduction to zero is the exact case
    // y^(k(p-1)) = 1 for the coprime y of well-formed ciphertexts, which is
    // what modpow returns for exponent 0.
    let ep = modpow((p + 1) / 4, len as u64, p - 1)?;
    let eq = modpow((q + 1) / 4, len as u64, q - 1)?;
    let rp = modpow(y % p, ep, p)?;
    let rq = modpow(y % q, eq, q)?;
    let n128 = u128::from(n);
    let term_p = u128::from(q) * u128::from(modinv(q % p, p)?) % n128 * u128::from(rp) % n128;
    let term_q = u128::from(p) * u128::from(modinv(p % q, q)?) % n128 * u128::from(rq) % n128;
    Ok(((term_p + term_q) % n128) as u64)
}

/// Classic decryption under the secret factorization `(p, q)`.
pub fn bg_decrypt(p: u64, q: u64, ct: &BgCiphertext) -> Result<Vec<bool>> {
    if ct.unit_bits != 1 {
        return Err(Error::Parse(format!(
            "classic decryption expects 1-bit units, got {}",
            ct.unit_bits
        )));
    }
    let n = p * q;
    let x0 = recover_x0(p, q, ct.units.len(), ct.y)?;
    let mut x = x0;
    let mut msg = Vec::with_capacity(ct.units.len());
    for &c in &ct.units {
        msg.push(c ^ (x & 1) == 1);
        x = modpow(x, 2, n)?;
    }
    Ok(msg)
}

/// Block-level encryption with the cumulative keystream and the public mask
/// word `S0 < 2^nu`: unit `i` is `m_i ^ (b_0 ^ ... ^ b_i) ^ S0`.
pub fn cbg_encrypt(n: u64, s0: u64, blocks: &[u64], r: u64) -> Result<BgCiphertext> {
    check_r(n, r)?;
    let nu = block_bits(n)?;
    let cap = 1u64 << nu;
    if s0 >= cap {
        return Err(Error::Domain(format!("S0 = {s0} needs more than {nu} bits")));
    }
    if let Some(bad) = blocks.iter().find(|&&b| b >= cap) {
        return Err(Error::Domain(format!("message block {bad:#x} wider than {nu} bits")));
    }
    let (ks, y) = square_chain_mask(n, r, blocks.len(), nu)?;
    let mut cumulative = 0u64;
    let units = blocks
        .iter()
        .zip(&ks)
        .map(|(&m, &b)| {
            cumulative ^= b;
            m ^ cumulative ^ s0
        })
        .collect();
    Ok(BgCiphertext { units, unit_bits: nu, y })
}

/// Inverts the cumulative mask: `m_i = c_i ^ (b_0 ^ ... ^ b_i) ^ S0`.
pub fn cbg_decrypt(p: u64, q: u64, s0: u64, ct: &BgCiphertext) -> Result<Vec<u64>> {
    let n = p * q;
    let nu = block_bits(n)?;
    if ct.unit_bits != nu {
        return Err(Error::Parse(format!(
            "ciphertext units are {} bits wide, key expects {nu}",
            ct.unit_bits
        )));
    }
    let x0 = recover_x0(p, q, ct.units.len(), ct.y)?;
    let mask = (1u64 << nu) - 1;
    let mut x = x0;
    let mut cumulative = 0u64;
    let mut blocks = Vec::with_capacity(ct.units.len());
    for &c in &ct.units {
        cumulative ^= x & mask;
        blocks.push(c ^ cumulative ^ (s0 & mask));
        x = modpow(x, 2, n)?;
    }
    Ok(blocks)
}

/// Splits a bit string into `width`-bit blocks, first bit most significant.
/// Lengths that are not a multiple of `width` are refused; padding would
/// change the message.
pub fn bits_to_blocks(bits: &[bool], width: u32) -> Result<Vec<u64>> {
    if width == 0 || width > 64 {
        return Err(Error::Domain(format!("block width {width} out of 1..=64")));
    }
    if !bits.len().is_multiple_of(width as usize) {
        return Err(Error::Domain(format!(
            "message of {} bits is not a multiple of the {width}-bit unit",
            bits.len()
        )));
    }
    Ok(bits
        .chunks(width as usize)
        .map(|chunk| chunk.iter().fold(0u64, |acc, &b| (acc << 1) | u64::from(b)))
        .collect())
}

pub fn blocks_to_bits(blocks: &[u64], width: u32) -> Vec<bool> {
    blocks
        .iter()
        .flat_map(|&b| (0..width).rev().map(move |i| (b >> i) & 1 == 1))
        .collect()
}

/// Key material: secret factorization plus the optional public mask word of
/// the block variant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BgKeyPair {
    pub p: u64,
    pub q: u64,
    pub s0: Option<u64>,
}

/// Primes `p ≡ 3 (mod 4)` used by the desk-scale key generator (same pool as
/// the squaring kernel; large-modulus keys are out of scope).
const BG_PRIME_POOL: [u64; 13] = [131, 139, 151, 163, 167, 179, 191, 199, 211, 223, 227, 239, 251];

impl BgKeyPair {
    pub fn n(&self) -> u64 {
        self.p * self.q
    }

    pub fn block_bits(&self) -> Result<u32> {
        block_bits(self.n())
    }

    /// Draws distinct pool primes; the variant additionally draws the public
    /// mask `S0` over the full `nu`-bit range.
    pub fn generate(rng: &mut XorShift32, chaotic: bool) -> Result<Self> {
        let i = (uniform_range(rng, BG_PRIME_POOL.len() as u64)? - 1) as usize;
        let mut j = (uniform_range(rng, BG_PRIME_POOL.len() as u64 - 1)? - 1) as usize;
        if j >= i {
            j += 1;
        }
        let (p, q) = (BG_PRIME_POOL[i], BG_PRIME_POOL[j]);
        let s0 = if chaotic {
            let nu = block_bits(p * q)?;
            Some(uniform_range(rng, 1 << nu)? - 1)
        } else {
            None
        };
        Ok(Self { p, q, s0 })
    }

    /// Public key file: decimal `N`, plus `S0` for the variant.
    pub fn public_text(&self) -> String {
        match self.s0 {
            Some(s0) => format!("N {}\nS0 {}\n", self.n(), s0),
            None => format!("N {}\n", self.n()),
        }
    }

    /// Secret key file: decimal `p`, `q`, plus `S0` for the variant.
    pub fn secret_text(&self) -> String {
        match self.s0 {
            Some(s0) => format!("p {}\nq {}\nS0 {}\n", self.p, self.q, s0),
            None => format!("p {}\nq {}\n", self.p, self.q),
        }
    }

    pub fn from_secret_text(text: &str) -> Result<Self> {
        let fields = parse_key_fields(text)?;
        let p = *fields
            .iter()
            .find(|(k, _)| k == "p")
            .map(|(_, v)| v)
            .ok_or_else(|| Error::Parse("secret key misses p".into()))?;
        let q = *fields
            .iter()
            .find(|(k, _)| k == "q")
            .map(|(_, v)| v)
            .ok_or_else(|| Error::Parse("secret key misses q".into()))?;
        let s0 = fields.iter().find(|(k, _)| k == "S0").map(|(_, v)| *v);
        Ok(Self { p, q, s0 })
    }
}

/// Public key as read back from its file form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BgPublicKey {
    pub n: u64,
    pub s0: Option<u64>,
}

impl BgPublicKey {
    pub fn from_text(text: &str) -> Result<Self> {
        let fields = parse_key_fields(text)?;
        let n = *fields
            .iter()
            .find(|(k, _)| k == "N")
            .map(|(_, v)| v)
            .ok_or_else(|| Error::Parse("public key misses N".into()))?;
        let s0 = fields.iter().find(|(k, _)| k == "S0").map(|(_, v)| *v);
        Ok(Self { n, s0 })
    }
}

fn parse_key_fields(text: &str) -> Result<Vec<(String, u64)>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|line| {
            let (key, rest) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| Error::Parse(format!("bad key line {line:?}")))?;
            Ok((key.to_string(), parse_dec(rest)?))
        })
        .collect()
}
