//! Counter-based random streams.
//!
//! Every draw is a pure function of `(seed, stream index, channel, block counter)`
//! fed through Philox4x32-10, so the randomness of path `i` can be produced on
//! any worker without replaying the draws of paths `0..i`.

use rand_core::RngCore;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

const PHILOX_M0: u32 = 0xD251_1F53;
const PHILOX_M1: u32 = 0xCD9E_8D57;
const PHILOX_W0: u32 = 0x9E37_79B9;
const PHILOX_W1: u32 = 0xBB67_AE85;

#[inline(always)]
fn mulhilo(a: u32, b: u32) -> (u32, u32) {
    let p = u64::from(a) * u64::from(b);
    ((p >> 32) as u32, p as u32)
}

#[inline(always)]
fn philox_round(c: [u32; 4], k: [u32; 2]) -> [u32; 4] {
    let (hi0, lo0) = mulhilo(PHILOX_M0, c[0]);
    let (hi1, lo1) = mulhilo(PHILOX_M1, c[2]);
    [hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0]
}

#[inline(always)]
fn philox_bump(k: [u32; 2]) -> [u32; 2] {
    [k[0].wrapping_add(PHILOX_W0), k[1].wrapping_add(PHILOX_W1)]
}

/// One Philox4x32 block with 10 rounds.
#[inline]
pub fn philox4x32_10(counter: [u32; 4], key: [u32; 2]) -> [u32; 4] {
    let mut c = counter;
    let mut k = key;
    for round in 0..10 {
        if round > 0 {
            k = philox_bump(k);
        }
        c = philox_round(c, k);
    }
    c
}

/// `LANES` consecutive blocks with interleaved rounds, held word-major
/// (`w[word][lane]`). The rounds are latency-bound, so independent chains
/// fill the pipeline.
#[inline]
fn philox_lanes(mut w: [[u32; LANES]; 4], key: [u32; 2]) -> [[u32; LANES]; 4] {
    let mut k = key;
    for round in 0..10 {
        if round > 0 {
            k = philox_bump(k);
        }
        let mut next = [[0u32; LANES]; 4];
        for j in 0..LANES {
            let p0 = u64::from(PHILOX_M0) * u64::from(w[0][j]);
            let p1 = u64::from(PHILOX_M1) * u64::from(w[2][j]);
            next[0][j] = (p1 >> 32) as u32 ^ w[1][j] ^ k[0];
            next[1][j] = p1 as u32;
            next[2][j] = (p0 >> 32) as u32 ^ w[3][j] ^ k[1];
            next[3][j] = p0 as u32;
        }
        w = next;
    }
    w
}

/// Independent sub-sequences of one stream.
///
/// Wiener increments live on their own channel so that auxiliary draws
/// (thresholds, bridge minima) never shift the Gaussian sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u16)]
pub enum Channel {
    Increments = 0,
    Bridge = 1,
    Aux = 2,
    Inversion = 3,
}

/// Address of one reproducible random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub index: u64,
}

impl RngStream {
    pub fn new(seed: u64, index: u64) -> Self {
        Self { seed, index }
    }

    pub fn rng(&self, channel: Channel) -> PhiloxRng {
        PhiloxRng::new(*self, channel)
    }

    /// A stream under an unrelated master seed, for experiments that need
    /// several independent families of paths with the same indices.
    pub fn derive(&self, tag: u64) -> Self {
        Self {
            seed: splitmix64(self.seed ^ splitmix64(tag)),
            index: self.index,
        }
    }
}

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Sequential view of one channel of a stream.
///
/// Counter layout: word 0 and the low half of word 1 hold the block counter,
/// the high half of word 1 holds the channel, words 2 and 3 hold the stream
/// index. The key is the master seed.
#[derive(Debug, Clone)]
pub struct PhiloxRng {
    key: [u32; 2],
    index: [u32; 2],
    channel: u16,
    block: u64,
    buf: [u32; BUF_WORDS],
    pos: usize,
}

const LANES: usize = 4;
const BUF_WORDS: usize = 4 * LANES;

impl PhiloxRng {
    pub fn new(stream: RngStream, channel: Channel) -> Self {
        Self {
            key: [stream.seed as u32, (stream.seed >> 32) as u32],
            index: [stream.index as u32, (stream.index >> 32) as u32],
            channel: channel as u16,
            block: 0,
            buf: [0; BUF_WORDS],
            pos: BUF_WORDS,
        }
    }

    #[inline]
    fn refill(&mut self) {
        debug_assert!(self.block < 1 << 48, "philox block counter exhausted");
        let mut w = [[0u32; LANES]; 4];
        for j in 0..LANES {
            let block = self.block + j as u64;
            w[0][j] = block as u32;
            w[1][j] = ((block >> 32) as u32 & 0xFFFF) | (u32::from(self.channel) << 16);
            w[2][j] = self.index[0];
            w[3][j] = self.index[1];
        }
        let out = philox_lanes(w, self.key);
        for j in 0..LANES {
            for word in 0..4 {
                self.buf[4 * j + word] = out[word][j];
            }
        }
        self.block += LANES as u64;
        self.pos = 0;
    }

    /// Uniform draw in the open interval (0, 1).
    #[inline]
    pub fn open01(&mut self) -> f64 {
        ((self.next_u64() >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
    }

    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(self)
    }

    /// Exponential draw with the given rate; a zero rate yields `+inf`.
    #[inline]
    pub fn exponential(&mut self, rate: f64) -> f64 {
        let e: f64 = Exp1.sample(self);
        e / rate
    }
}

impl RngCore for PhiloxRng {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        if self.pos >= BUF_WORDS {
            self.refill();
        }
        let v = self.buf[self.pos];
        self.pos += 1;
        v
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        if self.pos + 1 < BUF_WORDS {
            let lo = u64::from(self.buf[self.pos]);
            let hi = u64::from(self.buf[self.pos + 1]);
            self.pos += 2;
            return lo | (hi << 32);
        }
        let lo = u64::from(self.next_u32());
        let hi = u64::from(self.next_u32());
        lo | (hi << 32)
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        rand_core::impls::fill_bytes_via_next(self, dst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Known-answer vectors of the reference Philox4x32-10.
    #[test]
    fn philox_known_answers() {
        assert_eq!(
            philox4x32_10([0, 0, 0, 0], [0, 0]),
            [0x6627_e8d5, 0xe169_c58d, 0xbc57_ac4c, 0x9b00_dbd8]
        );
        assert_eq!(
            philox4x32_10([u32::MAX; 4], [u32::MAX; 2]),
            [0x408f_276d, 0x41c8_3b0e, 0xa20b_c7c6, 0x6d54_51fd]
        );
        assert_eq!(
            philox4x32_10(
                [0x243f_6a88, 0x85a3_08d3, 0x1319_8a2e, 0x0370_7344],
                [0xa409_3822, 0x299f_31d0]
            ),
            [0xd16c_fe09, 0x94fd_cceb, 0x5001_e420, 0x2412_6ea1]
        );
    }

    #[test]
    fn stream_words_follow_block_counter() {
        let s = RngStream::new(0x0123_4567_89ab_cdef, 0x0000_0002_0000_0001);
        let mut r = s.rng(Channel::Aux);
        let words: Vec<u32> = (0..24).map(|_| r.next_u32()).collect();
        for block in 0..6u32 {
            let expect = philox4x32_10([block, 2 << 16, 1, 2], [0x89ab_cdef, 0x0123_4567]);
            assert_eq!(&words[4 * block as usize..4 * block as usize + 4], &expect);
        }
    }

    #[test]
    fn same_address_same_sequence() {
        let s = RngStream::new(42, 7);
        let a: Vec<u64> = {
            let mut r = s.rng(Channel::Increments);
            (0..100).map(|_| r.next_u64()).collect()
        };
        // Drawing from other streams and channels in between changes nothing.
        let mut other = RngStream::new(42, 8).rng(Channel::Increments);
        let mut aux = s.rng(Channel::Aux);
        let mut r = s.rng(Channel::Increments);
        let b: Vec<u64> = (0..100)
            .map(|_| {
                other.next_u64();
                aux.next_u32();
                r.next_u64()
            })
            .collect();
        assert_eq!(a, b);
    }

    #[test]
    fn distinct_addresses_differ() {
        let mut a = RngStream::new(1, 0).rng(Channel::Increments);
        let mut b = RngStream::new(1, 1).rng(Channel::Increments);
        let mut c = RngStream::new(2, 0).rng(Channel::Increments);
        let mut d = RngStream::new(1, 0).rng(Channel::Aux);
        let xs: Vec<u64> = (0..4).map(|_| a.next_u64()).collect();
        for r in [&mut b, &mut c, &mut d] {
            let ys: Vec<u64> = (0..4).map(|_| r.next_u64()).collect();
            assert_ne!(xs, ys);
        }
    }

    #[test]
    fn open01_stays_open() {
        let mut r = RngStream::new(3, 3).rng(Channel::Aux);
        for _ in 0..100_000 {
            let u = r.open01();
            assert!(u > 0.0 && u < 1.0);
        }
    }

    #[test]
    fn uniform_mean_and_pair_correlation() {
        // Adjacent streams should look uncorrelated.
        let n = 200_000;
        let mut a = RngStream::new(9, 0).rng(Channel::Increments);
        let mut b = RngStream::new(9, 1).rng(Channel::Increments);
        let (mut sa, mut sb, mut sab) = (0.0, 0.0, 0.0);
        for _ in 0..n {
            let x = a.open01() - 0.5;
            let y = b.open01() - 0.5;
            sa += x;
            sb += y;
            sab += x * y;
        }
        let nf = n as f64;
        // sd of each mean is sqrt(1/12/n) ~ 6.5e-4, of the cross moment 1/12/sqrt(n) ~ 1.9e-4
        assert!((sa / nf).abs() < 4.0 * 6.5e-4);
        assert!((sb / nf).abs() < 4.0 * 6.5e-4);
        assert!((sab / nf).abs() < 4.0 * 1.9e-4);
    }
}
