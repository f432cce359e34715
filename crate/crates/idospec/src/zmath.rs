//! Tiny complex-arithmetic helpers shared across the numerical modules.

use num_complex::Complex64;

pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// `w * exp(shift)`, computed as `exp(ln w + shift)` so that huge exponential
/// factors cancel in the exponent instead of overflowing as intermediates.
/// Zero is mapped to zero.
pub(crate) fn scaled_by_exp(w: Complex64, shift: Complex64) -> Complex64 {
    if w == Complex64::ZERO {
        return Complex64::ZERO;
    }
    (w.ln() + shift).exp()
}
