use crate::error::{Error, Result};

const SIGN: u32 = 0x8000_0000;

/// Monotone unsigned key for a finite `f32`: negatives flip every bit,
/// non-negatives flip the sign bit. `-0.0` and `+0.0` get adjacent keys.
#[inline]
pub fn sortable_key(x: f32) -> Result<u32> {
    if !x.is_finite() {
        return Err(Error::NonFiniteScore { index: 0 });
    }
    Ok(key_unchecked(x))
}

#[inline]
pub(crate) fn key_unchecked(x: f32) -> u32 {
    let bits = x.to_bits();
    if bits & SIGN != 0 {
        !bits
    } else {
        bits ^ SIGN
    }
}

/// Inverse of [`sortable_key`].
#[inline]
pub fn key_to_f32(key: u32) -> f32 {
    if key & SIGN != 0 {
        f32::from_bits(key ^ SIGN)
    } else {
        f32::from_bits(!key)
    }
}
