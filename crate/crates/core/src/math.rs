//! Float helpers available with and without `std`.
//!
//! `sqrt` is correctly rounded per IEEE 754 in both backends, so results are
//! bit-identical regardless of which feature is active.

#[cfg(feature = "std")]
#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    x.sqrt()
}

#[cfg(all(not(feature = "std"), feature = "libm"))]
#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

/// Sign-bit clear; exact on every input including NaN payloads.
#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    f64::from_bits(x.to_bits() & 0x7FFF_FFFF_FFFF_FFFF)
}

/// Integer power by binary exponentiation. The evaluation order is part of
/// the kernel-distance definition and must not change.
#[inline]
pub(crate) fn powi(base: f64, mut exp: u32) -> f64 {
    let mut acc = 1.0;
    let mut b = base;
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= b;
        }
        b *= b;
        exp >>= 1;
    }
    acc
}
