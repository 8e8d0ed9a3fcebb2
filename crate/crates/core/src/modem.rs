//! Gray-coded square M-QAM.
//!
//! A symbol label is the MSB-first integer value of its `log2 M` bits. The
//! upper half of the label selects the in-phase level and the lower half the
//! quadrature level, each through a binary reflected Gray code. Zero bits map
//! to positive amplitudes, so label 0 sits in the first quadrant.

use crate::bits::{bits_to_uint, BitBuffer};
use crate::config::SUPPORTED_QAM_ORDERS;
use crate::error::{Error, Result};
use crate::ComplexSample;

#[derive(Debug, Clone, PartialEq)]
pub struct QamConstellation {
    order: usize,
    bits_per_symbol: usize,
    points: Vec<ComplexSample>,
}

/// Converts a reflected Gray code word to its position along the axis.
fn gray_to_level(gray: usize) -> usize {
    let mut level = gray;
    let mut shift = gray >> 1;
    while shift != 0 {
        level ^= shift;
        shift >>= 1;
    }
    level
}

impl QamConstellation {
    pub fn new(order: usize) -> Result<Self> {
        if !SUPPORTED_QAM_ORDERS.contains(&order) {
            return Err(Error::UnsupportedOrder(order));
        }
        let bits_per_symbol = order.trailing_zeros() as usize;
        let half = bits_per_symbol / 2;
        let side = 1usize << half;
        let mask = side - 1;
        // Average energy of the odd-integer grid is 2(M-1)/3.
        let scale = (1.5 / (order as f64 - 1.0)).sqrt();
        let amplitude = |gray: usize| ((side - 1) as f64 - 2.0 * gray_to_level(gray) as f64) * scale;
        let points = (0..order)
            .map(|label| ComplexSample::new(amplitude(label >> half), amplitude(label & mask)))
            .collect();
        Ok(Self {
            order,
            bits_per_symbol,
            points,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    pub fn points(&self) -> &[ComplexSample] {
        &self.points
    }

    pub fn point(&self, label: usize) -> ComplexSample {
        self.points[label]
    }

    pub fn label_bits(&self, label: usize) -> BitBuffer {
        BitBuffer::from_uint(label, self.bits_per_symbol)
    }

    /// Maps exactly `log2 M` bits to their constellation point.
    pub fn modulate(&self, bits: &[bool]) -> Result<ComplexSample> {
        Ok(self.point(self.label_of(bits)?))
    }

    pub fn label_of(&self, bits: &[bool]) -> Result<usize> {
        if bits.len() != self.bits_per_symbol {
            return Err(Error::BitCount {
                expected: self.bits_per_symbol,
                actual: bits.len(),
            });
        }
        Ok(bits_to_uint(bits))
    }

    /// Coherent ML decision `argmin_s |y - h s|^2`; ties go to the lowest
    /// label.
    pub fn demodulate_ml(&self, y: ComplexSample, h: ComplexSample) -> Result<(usize, BitBuffer)> {
        if h.norm_sqr() == 0.0 {
            return Err(Error::ZeroChannelGain);
        }
        let label = self.nearest(y, h).0;
        Ok((label, self.label_bits(label)))
    }

    /// Lowest-label minimiser of `|y - h s|^2` and its value. Accepts `h = 0`.
    pub(crate) fn nearest(&self, y: ComplexSample, h: ComplexSample) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (label, &s) in self.points.iter().enumerate() {
            let d = (y - h * s).norm_sqr();
            if d < best.1 {
                best = (label, d);
            }
        }
        best
    }

    pub fn average_energy(&self) -> f64 {
        self.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / self.order as f64
    }
}
