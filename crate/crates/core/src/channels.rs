//! Compact channel sets.
//!
//! Channels are indexed `0..C` with `C <= 64`, so a set fits in one word and
//! the per-round neighbourhood operations become a handful of bit ops.

use std::fmt;

pub const MAX_CHANNELS: usize = 64;

#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct ChannelSet(u64);

impl ChannelSet {
    pub const EMPTY: ChannelSet = ChannelSet(0);

    /// All channels `0..count`.
    pub fn full(count: usize) -> Self {
        assert!(count <= MAX_CHANNELS, "at most {MAX_CHANNELS} channels supported");
        if count == MAX_CHANNELS {
            ChannelSet(u64::MAX)
        } else {
            ChannelSet((1u64 << count) - 1)
        }
    }

    pub fn from_bits(bits: u64) -> Self {
        ChannelSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn from_channels<I: IntoIterator<Item = usize>>(channels: I) -> Self {
        let mut set = ChannelSet::EMPTY;
        for k in channels {
            set.insert(k);
        }
        set
    }

    #[inline]
    pub fn contains(self, k: usize) -> bool {
        k < MAX_CHANNELS && self.0 & (1u64 << k) != 0
    }

    #[inline]
    pub fn insert(&mut self, k: usize) {
        assert!(k < MAX_CHANNELS);
        self.0 |= 1u64 << k;
    }

    #[inline]
    pub fn remove(&mut self, k: usize) {
        if k < MAX_CHANNELS {
            self.0 &= !(1u64 << k);
        }
    }

    #[inline]
    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn union(self, other: ChannelSet) -> ChannelSet {
        ChannelSet(self.0 | other.0)
    }

    #[inline]
    pub fn intersection(self, other: ChannelSet) -> ChannelSet {
        ChannelSet(self.0 & other.0)
    }

    #[inline]
    pub fn difference(self, other: ChannelSet) -> ChannelSet {
        ChannelSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: ChannelSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Ascending channel indices.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let k = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(k)
            }
        })
    }

    /// Bitstring of length `count`, channel 0 first.
    pub fn to_bitstring(self, count: usize) -> String {
        (0..count).map(|k| if self.contains(k) { '1' } else { '0' }).collect()
    }

    pub fn parse_bitstring(s: &str) -> Option<Self> {
        if s.len() > MAX_CHANNELS {
            return None;
        }
        let mut set = ChannelSet::EMPTY;
        for (k, c) in s.chars().enumerate() {
            match c {
                '1' => set.insert(k),
                '0' => {}
                _ => return None,
            }
        }
        Some(set)
    }
}

impl fmt::Debug for ChannelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for ChannelSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        ChannelSet::from_channels(iter)
    }
}
