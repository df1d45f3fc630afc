//! Platform-stable hashing for flow 5-tuples and data keys.
//!
//! FNV-1a over the input bytes followed by the SplitMix64 finalizer, so every
//! input bit affects every output bit. Nothing here depends on the std
//! `Hasher` machinery, whose output is not guaranteed stable across releases.

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

pub fn stable_hash(bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    avalanche(h)
}

#[inline]
fn avalanche(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Maps a hash onto `[0, 1)` using its top 53 bits, which is exactly
/// `h / 2^64` truncated to double precision.
#[inline]
pub fn unit_interval(h: u64) -> f64 {
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// The transport 5-tuple that identifies a flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FiveTuple {
    pub src: u32,
    pub dst: u32,
    pub src_port: u16,
    pub dst_port: u16,
    pub protocol: u8,
}

impl FiveTuple {
    pub fn tcp(src: u32, dst: u32, src_port: u16, dst_port: u16) -> Self {
        Self {
            src,
            dst,
            src_port,
            dst_port,
            protocol: 6,
        }
    }

    /// Little-endian field concatenation in declaration order.
    pub fn canonical_bytes(&self) -> [u8; 13] {
        let mut out = [0u8; 13];
        out[0..4].copy_from_slice(&self.src.to_le_bytes());
        out[4..8].copy_from_slice(&self.dst.to_le_bytes());
        out[8..10].copy_from_slice(&self.src_port.to_le_bytes());
        out[10..12].copy_from_slice(&self.dst_port.to_le_bytes());
        out[12] = self.protocol;
        out
    }

    pub fn hash(&self) -> u64 {
        stable_hash(&self.canonical_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        // FNV-1a of the empty string is the offset basis
        assert_eq!(stable_hash(b""), avalanche(FNV_OFFSET));
        assert_ne!(stable_hash(b"a"), stable_hash(b"b"));
        assert_eq!(unit_interval(0), 0.0);
        assert!(unit_interval(u64::MAX) < 1.0);
    }

    #[test]
    fn tuple_fields_all_matter() {
        let base = FiveTuple::tcp(1, 2, 1000, 80);
        let variants = [
            FiveTuple { src: 9, ..base },
            FiveTuple { dst: 9, ..base },
            FiveTuple { src_port: 9, ..base },
            FiveTuple { dst_port: 9, ..base },
            FiveTuple { protocol: 17, ..base },
        ];
        for v in variants {
            assert_ne!(v.hash(), base.hash());
        }
        assert_eq!(base.hash(), FiveTuple::tcp(1, 2, 1000, 80).hash());
    }
}
