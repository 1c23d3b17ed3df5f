//! Fixed-point spin encoding of a signal vector.
//!
//! Coordinate `i` is represented by `P` bits `q_{i,0..P}` (least significant first) as
//! `x_i = c_min_i + d_i * Σ_p q_{i,p} 2^p`. A spin vector stores the blocks of all
//! coordinates back to back, `q_{0,0..P}, q_{1,0..P}, …`, optionally followed by one
//! ancilla bit per coordinate. Bit `p` of coordinate `i` lives at index `P*i + p`.
//!
//! Every format must be able to represent zero in every coordinate; the bit pattern that
//! decodes to zero is the coordinate's *zero code*.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};

/// Relative tolerance (in units of `d_i`) for accepting a real as representable.
pub const REPRESENTABLE_TOL: f64 = 1e-9;

/// Widest supported block; keeps code integers exact in `f64`.
pub const MAX_BITS: usize = 52;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct FixedPointFormat {
    c_min: Vec<f64>,
    d: Vec<f64>,
    #[cfg_attr(feature = "serde", serde(rename = "P"))]
    bits: usize,
    #[cfg_attr(feature = "serde", serde(skip))]
    zero_index: Vec<u64>,
}

impl FixedPointFormat {
    pub fn new(c_min: Vec<f64>, d: Vec<f64>, bits: usize) -> Result<Self> {
        Error::check_len("format scale vector", c_min.len(), d.len())?;
        if bits == 0 || bits > MAX_BITS {
            return Err(Error::InvalidFormat(format!(
                "bits per coordinate must be in 1..={MAX_BITS}, got {bits}"
            )));
        }
        let levels = (1u64 << bits) as f64;
        let mut zero_index = Vec::with_capacity(c_min.len());
        for (i, (&c, &di)) in c_min.iter().zip(&d).enumerate() {
            if !(di > 0.0) || !di.is_finite() {
                return Err(Error::InvalidFormat(format!(
                    "coordinate {i}: scale d must be positive and finite, got {di}"
                )));
            }
            if !c.is_finite() {
                return Err(Error::InvalidFormat(format!(
                    "coordinate {i}: c_min must be finite, got {c}"
                )));
            }
            let t = -c / di;
            let r = libm::round(t);
            if (t - r).abs() > REPRESENTABLE_TOL || r < 0.0 || r >= levels {
                return Err(Error::InvalidFormat(format!(
                    "coordinate {i}: zero is not representable with c_min={c}, d={di}, P={bits}"
                )));
            }
            zero_index.push(r as u64);
        }
        Ok(FixedPointFormat {
            c_min,
            d,
            bits,
            zero_index,
        })
    }

    /// Same `c_min` and `d` for all `n` coordinates.
    pub fn uniform(n: usize, c_min: f64, d: f64, bits: usize) -> Result<Self> {
        Self::new(vec![c_min; n], vec![d; n], bits)
    }

    /// `P = 1`, values `{0, 1}`.
    pub fn binary(n: usize) -> Self {
        Self::uniform(n, 0.0, 1.0, 1).expect("binary format is valid")
    }

    /// Number of coordinates `N`.
    #[inline]
    pub fn len(&self) -> usize {
        self.c_min.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.c_min.is_empty()
    }

    /// Bits per coordinate `P`.
    #[inline]
    pub fn bits(&self) -> usize {
        self.bits
    }

    /// `N * P`
    #[inline]
    pub fn data_spins(&self) -> usize {
        self.len() * self.bits
    }

    pub fn c_min(&self) -> &[f64] {
        &self.c_min
    }

    pub fn scale(&self) -> &[f64] {
        &self.d
    }

    /// Position of bit `p` of coordinate `i` in the spin vector.
    #[inline]
    pub fn spin_index(&self, i: usize, p: usize) -> usize {
        self.bits * i + p
    }

    pub fn decode_coordinate(&self, i: usize, bits: &[u8]) -> f64 {
        assert_eq!(bits.len(), self.bits, "coordinate block must have P bits");
        self.c_min[i] + self.d[i] * block_value(bits) as f64
    }

    /// Bits (LSB first) that decode to zero in coordinate `i`.
    pub fn zero_code(&self, i: usize) -> Vec<u8> {
        int_to_bits(self.zero_index[i], self.bits)
    }

    /// Zero code of coordinate `i` as an integer.
    pub fn zero_code_value(&self, i: usize) -> u64 {
        self.zero_index[i]
    }

    /// Code integer for `value` in coordinate `i`, if representable.
    pub fn code_of(&self, i: usize, value: f64) -> Option<u64> {
        let t = (value - self.c_min[i]) / self.d[i];
        let r = libm::round(t);
        let levels = (1u64 << self.bits) as f64;
        if (t - r).abs() <= REPRESENTABLE_TOL && r >= 0.0 && r < levels {
            Some(r as u64)
        } else {
            None
        }
    }

    pub fn encode_vector(&self, x: &[f64], with_ancilla: bool) -> Result<SpinVector> {
        Error::check_len("signal", self.len(), x.len())?;
        let extra = if with_ancilla { self.len() } else { 0 };
        let mut bits = Vec::with_capacity(self.data_spins() + extra);
        for (i, &v) in x.iter().enumerate() {
            let code = self
                .code_of(i, v)
                .ok_or(Error::Unrepresentable { index: i, value: v })?;
            bits.extend(int_to_bits(code, self.bits));
        }
        bits.resize(self.data_spins() + extra, 0);
        Ok(SpinVector(bits))
    }

    /// Accepts `N*P` bits or `N*P + N` (the ancilla tail is ignored).
    pub fn decode_vector(&self, q: &[u8]) -> Result<Vec<f64>> {
        let data = self.data_spins();
        if q.len() != data && q.len() != data + self.len() {
            return Err(Error::DimensionMismatch {
                what: "spin vector",
                expected: data,
                found: q.len(),
            });
        }
        Ok(q[..data]
            .chunks_exact(self.bits)
            .enumerate()
            .map(|(i, block)| self.decode_coordinate(i, block))
            .collect())
    }

    /// Number of coordinate blocks that differ from their zero code.
    pub fn block_cardinality(&self, q: &[u8]) -> usize {
        q[..self.data_spins()]
            .chunks_exact(self.bits)
            .enumerate()
            .filter(|(i, block)| block_value(block) != self.zero_index[*i])
            .count()
    }

    /// A nonzero representable value of coordinate `i`, uniform over the `2^P − 1`
    /// nonzero codes.
    pub fn sample_nonzero<R: Rng + ?Sized>(&self, i: usize, rng: &mut R) -> Result<f64> {
        let nonzero_codes = (1u64 << self.bits) - 1;
        if nonzero_codes == 0 {
            return Err(Error::invalid("format has no nonzero values"));
        }
        let mut code = rng.random_range(0..nonzero_codes);
        if code >= self.zero_index[i] {
            code += 1;
        }
        Ok(self.c_min[i] + self.d[i] * code as f64)
    }

    /// All nonzero representable values of coordinate `i`, ascending.
    pub fn nonzero_values(&self, i: usize) -> Vec<f64> {
        (0..1u64 << self.bits)
            .filter(|&c| c != self.zero_index[i])
            .map(|c| self.c_min[i] + self.d[i] * c as f64)
            .collect()
    }
}

/// Binary spin assignment. Entries are 0 or 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpinVector(Vec<u8>);

impl SpinVector {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(Error::invalid(format!(
                "spin {pos} is {}, not 0 or 1",
                bits[pos]
            )));
        }
        Ok(SpinVector(bits))
    }

    pub fn zeros(len: usize) -> Self {
        SpinVector(vec![0; len])
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<u8> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl core::ops::Deref for SpinVector {
    type Target = [u8];
    fn deref(&self) -> &[u8] {
        &self.0
    }
}

fn block_value(bits: &[u8]) -> u64 {
    bits.iter()
        .enumerate()
        .fold(0u64, |acc, (p, &b)| acc | (u64::from(b & 1) << p))
}

fn int_to_bits(value: u64, bits: usize) -> Vec<u8> {
    (0..bits).map(|p| ((value >> p) & 1) as u8).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decode_two_bit_signed_example() {
        let f = FixedPointFormat::uniform(1, -1.0, 1.0, 2).unwrap();
        assert_eq!(f.decode_coordinate(0, &[1, 0]), 0.0);
        assert_eq!(f.decode_coordinate(0, &[0, 1]), 1.0);
        assert_eq!(f.decode_coordinate(0, &[1, 1]), 2.0);
        assert_eq!(f.decode_coordinate(0, &[0, 0]), -1.0);
    }

    #[test]
    fn decode_three_bit_half_scale() {
        let f = FixedPointFormat::uniform(1, 0.0, 0.5, 3).unwrap();
        assert_eq!(f.decode_coordinate(0, &[1, 0, 1]), 2.5);
    }

    #[test]
    fn zero_codes() {
        let f = FixedPointFormat::uniform(1, -1.0, 1.0, 2).unwrap();
        assert_eq!(f.zero_code(0), vec![1, 0]);
        for p in 1..6 {
            let f = FixedPointFormat::uniform(2, 0.0, 1.0, p).unwrap();
            assert_eq!(f.zero_code(1), vec![0; p]);
        }
        let f = FixedPointFormat::uniform(1, -6.0, 1.0, 4).unwrap();
        assert_eq!(f.zero_code(0), vec![0, 1, 1, 0]);
    }

    #[test]
    fn zero_must_be_representable() {
        assert!(matches!(
            FixedPointFormat::uniform(1, 1.0, 1.0, 2),
            Err(Error::InvalidFormat(_))
        ));
        assert!(FixedPointFormat::uniform(1, -0.5, 1.0, 2).is_err());
        // -c/d = 4 needs three bits
        assert!(FixedPointFormat::uniform(1, -4.0, 1.0, 2).is_err());
        assert!(FixedPointFormat::uniform(1, -4.0, 1.0, 3).is_ok());
    }

    #[test]
    fn rejects_nonpositive_scale_and_bad_bits() {
        assert!(FixedPointFormat::uniform(1, 0.0, -1.0, 2).is_err());
        assert!(FixedPointFormat::uniform(1, 0.0, 0.0, 2).is_err());
        assert!(FixedPointFormat::uniform(1, 0.0, 1.0, 0).is_err());
        assert!(FixedPointFormat::new(vec![0.0], vec![1.0, 1.0], 1).is_err());
    }

    #[test]
    fn encode_zero_vector_is_concatenated_zero_codes() {
        let f = FixedPointFormat::new(vec![-1.0, -6.0], vec![1.0, 1.0], 4).unwrap();
        let q = f.encode_vector(&[0.0, 0.0], false).unwrap();
        let mut expected = f.zero_code(0);
        expected.extend(f.zero_code(1));
        assert_eq!(q.as_slice(), expected.as_slice());
    }

    #[test]
    fn encode_signed_two_bit() {
        let f = FixedPointFormat::uniform(1, -1.0, 1.0, 2).unwrap();
        assert_eq!(f.encode_vector(&[2.0], false).unwrap().as_slice(), &[1, 1]);
    }

    #[test]
    fn encode_with_ancilla_pads_zeros() {
        let f = FixedPointFormat::uniform(2, 0.0, 1.0, 3).unwrap();
        let q = f.encode_vector(&[5.0, 2.0], true).unwrap();
        assert_eq!(q.as_slice(), &[1, 0, 1, 0, 1, 0, 0, 0]);
        assert_eq!(f.decode_vector(&q).unwrap(), vec![5.0, 2.0]);
    }

    #[test]
    fn encode_rejects_unrepresentable() {
        let f = FixedPointFormat::uniform(3, 0.0, 1.0, 2).unwrap();
        assert_eq!(
            f.encode_vector(&[1.0, 0.5, 0.0], false),
            Err(Error::Unrepresentable {
                index: 1,
                value: 0.5
            })
        );
        assert!(f.encode_vector(&[4.0, 0.0, 0.0], false).is_err());
        assert!(f.encode_vector(&[-1.0, 0.0, 0.0], false).is_err());
    }

    #[test]
    fn encode_absorbs_roundoff() {
        let f = FixedPointFormat::uniform(1, 0.0, 0.1, 4).unwrap();
        let q = f.encode_vector(&[0.1 + 0.2], false).unwrap();
        assert_eq!(q.as_slice(), &[1, 1, 0, 0]);
    }

    #[test]
    fn decode_vector_cases() {
        let f = FixedPointFormat::uniform(1, -1.0, 1.0, 2).unwrap();
        assert_eq!(
            f.decode_vector(&[0, 1]).unwrap(),
            vec![f.decode_coordinate(0, &[0, 1])]
        );

        let f = FixedPointFormat::uniform(3, 0.0, 1.0, 2).unwrap();
        assert_eq!(f.decode_vector(&[0; 6]).unwrap(), vec![0.0; 3]);
        // ancilla tail is accepted and ignored
        assert_eq!(
            f.decode_vector(&[1, 0, 0, 0, 0, 1, 1, 1, 1]).unwrap(),
            vec![1.0, 0.0, 2.0]
        );
        assert!(matches!(
            f.decode_vector(&[0; 7]),
            Err(Error::DimensionMismatch { .. })
        ));
        // swapping blocks swaps entries
        assert_eq!(
            f.decode_vector(&[0, 1, 1, 0, 0, 0]).unwrap(),
            vec![2.0, 1.0, 0.0]
        );
        assert_eq!(
            f.decode_vector(&[1, 0, 0, 1, 0, 0]).unwrap(),
            vec![1.0, 2.0, 0.0]
        );
    }

    #[test]
    fn spin_vector_rejects_non_binary() {
        assert!(SpinVector::new(vec![0, 1, 2]).is_err());
        assert!(SpinVector::new(vec![0, 1, 1]).is_ok());
    }

    #[test]
    fn nonzero_values_two_bit_unsigned() {
        let f = FixedPointFormat::uniform(1, 0.0, 1.0, 2).unwrap();
        assert_eq!(f.nonzero_values(0), vec![1.0, 2.0, 3.0]);
        let f = FixedPointFormat::binary(1);
        assert_eq!(f.nonzero_values(0), vec![1.0]);
    }
}
