//! Bit buffers and MSB-first integer packing.

use std::ops::{Deref, DerefMut};

use rand::Rng;

/// An ordered sequence of bits.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct BitBuffer(Vec<bool>);

impl BitBuffer {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn with_capacity(capacity: usize) -> Self {
        Self(Vec::with_capacity(capacity))
    }

    /// Draws `len` independent equiprobable bits.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Self {
        Self((0..len).map(|_| rng.random::<bool>()).collect())
    }

    /// The `width`-bit MSB-first binary representation of `value`.
    pub fn from_uint(value: usize, width: usize) -> Self {
        let mut b = Self::with_capacity(width);
        b.push_uint(value, width);
        b
    }

    pub fn push_uint(&mut self, value: usize, width: usize) {
        debug_assert!(width >= usize::BITS as usize || value >> width == 0);
        self.0.extend((0..width).rev().map(|shift| (value >> shift) & 1 == 1));
    }

    pub fn into_inner(self) -> Vec<bool> {
        self.0
    }

    /// Number of positions where `self` and `other` differ.
    pub fn hamming(&self, other: &[bool]) -> usize {
        hamming_slices(&self.0, other)
    }
}

/// Reads `bits` as an MSB-first unsigned integer.
pub fn bits_to_uint(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | usize::from(b))
}

pub fn hamming_slices(a: &[bool], b: &[bool]) -> usize {
    assert_eq!(a.len(), b.len(), "hamming distance of unequal lengths");
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

impl Deref for BitBuffer {
    type Target = Vec<bool>;
    fn deref(&self) -> &Vec<bool> {
        &self.0
    }
}

impl DerefMut for BitBuffer {
    fn deref_mut(&mut self) -> &mut Vec<bool> {
        &mut self.0
    }
}

impl From<Vec<bool>> for BitBuffer {
    fn from(v: Vec<bool>) -> Self {
        Self(v)
    }
}

impl From<&[u8]> for BitBuffer {
    /// Builds a buffer from 0/1 values; any nonzero byte is a one.
    fn from(v: &[u8]) -> Self {
        Self(v.iter().map(|&b| b != 0).collect())
    }
}

impl FromIterator<bool> for BitBuffer {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}
