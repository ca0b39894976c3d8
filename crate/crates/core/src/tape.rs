//! Seed-addressable random tape.
//!
//! Every random quantity consumed by the samplers is a pure function of
//! `(seed, purpose, address)` rather than of a draw sequence. Weights and
//! positions are addressed by vertex id, edge coins by the unordered vertex
//! pair. This is what makes differently-ordered samplers (naive vs bucketed,
//! any worker count) agree bit for bit: they read the same tape cells, just
//! in a different order.
//!
//! Values are produced by the splitmix64 finalizer, a fixed integer mixing
//! permutation, so the tape is stable across platforms and thread counts.

use crate::VertexId;

const WEIGHT_TAG: u64 = 0x01;
const POSITION_TAG: u64 = 0x02;
const EDGE_TAG: u64 = 0x03;

/// Golden-ratio increment used to spread purpose tags over the seed space.
const PHI64: u64 = 0x9e37_79b9_7f4a_7c15;

/// splitmix64 finalizer: a bijective avalanche mix on 64 bits.
#[inline(always)]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Map 64 random bits to a uniform `f64` in `[0, 1)` using the top 53 bits.
#[inline(always)]
fn unit_f64(bits: u64) -> f64 {
    const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
    (bits >> 11) as f64 * SCALE
}

/// Deterministic random tape keyed by a 64-bit seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomTape {
    seed: u64,
    weight_base: u64,
    position_base: u64,
    edge_base: u64,
}

impl RandomTape {
    pub fn new(seed: u64) -> Self {
        RandomTape {
            seed,
            weight_base: mix64(seed ^ WEIGHT_TAG.wrapping_mul(PHI64)),
            position_base: mix64(seed ^ POSITION_TAG.wrapping_mul(PHI64)),
            edge_base: mix64(seed ^ EDGE_TAG.wrapping_mul(PHI64)),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform `[0, 1)` cell backing the weight of vertex `v`.
    #[inline]
    pub fn weight_unit(&self, v: VertexId) -> f64 {
        unit_f64(mix64(self.weight_base ^ v as u64))
    }

    /// Uniform `[0, 1)` cell backing coordinate `k` of vertex `v`.
    #[inline]
    pub fn position_unit(&self, v: VertexId, k: usize) -> f64 {
        let h = mix64(self.position_base ^ v as u64);
        unit_f64(mix64(h ^ (k as u64).wrapping_mul(PHI64)))
    }

    /// Edge coin for the unordered pair `{u, v}`, uniform in `[0, 1)`.
    ///
    /// Symmetric by construction: the address is `(min, max)`.
    #[inline]
    pub fn pair_coin(&self, u: VertexId, v: VertexId) -> f64 {
        let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
        unit_f64(mix64(mix64(self.edge_base ^ lo as u64) ^ hi as u64))
    }

    /// Precomputed row state for coins `{u, v}` with fixed `u` and `v > u`.
    ///
    /// `EdgeRow::coin(v)` equals `pair_coin(u, v)` but costs a single mix.
    /// The caller must uphold `v > u`; this is the samplers' hot path.
    #[inline]
    pub fn edge_row(&self, u: VertexId) -> EdgeRow {
        EdgeRow {
            row_base: mix64(self.edge_base ^ u as u64),
        }
    }
}

/// Hot-path view of the edge-coin tape for a fixed lower endpoint.
#[derive(Debug, Clone, Copy)]
pub struct EdgeRow {
    row_base: u64,
}

impl EdgeRow {
    /// Raw 64-bit cell for `{u, v}`, `v > u`.
    #[inline(always)]
    pub fn coin_bits(&self, v: VertexId) -> u64 {
        mix64(self.row_base ^ v as u64)
    }

    /// Uniform `[0, 1)` coin for `{u, v}`, `v > u`.
    #[inline(always)]
    pub fn coin(&self, v: VertexId) -> f64 {
        unit_f64(self.coin_bits(v))
    }
}

/// Integer threshold for prefiltering coins against a probability envelope.
///
/// Guarantee: `unit_f64(bits) < p_hat` implies `bits < threshold`, so a
/// `bits >= threshold` rejection can never drop a pair that the exact
/// comparison would accept for any true probability `p <= p_hat`.
#[inline]
pub fn envelope_threshold(p_hat: f64) -> u64 {
    if p_hat >= 1.0 {
        return u64::MAX;
    }
    if p_hat <= 0.0 {
        // Coins are in [0, 1); a zero envelope still admits the coin 0.0.
        return 1 << 11;
    }
    // unit_f64(bits) < p_hat  =>  bits < p_hat * 2^64 + 2^11.
    let scaled = (p_hat * (1u64 << 53) as f64).ceil() as u128;
    let bound = (scaled << 11) + (1 << 11);
    if bound >= u64::MAX as u128 {
        u64::MAX
    } else {
        bound as u64
    }
}
