"""High-precision float backend.

Objective values reach ~1e16 * N while the verifier works at eps_0 = 1e-10,
so 53-bit floats cannot resolve the quantities of interest.  All float-path
numerics run through this module, backed by gmpy2.mpfr (mpmath as a
fallback) with a configurable precision of at least 128 bits.
"""

from __future__ import annotations

from fractions import Fraction

try:
    import gmpy2

    _HAVE_GMPY2 = True
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    import mpmath

    _HAVE_GMPY2 = False

DEFAULT_PRECISION = 192

_precision = DEFAULT_PRECISION

if _HAVE_GMPY2:
    gmpy2.get_context().precision = _precision
else:  # pragma: no cover
    mpmath.mp.prec = _precision


def set_precision(bits: int) -> None:
    """Set the working precision (significand bits) for the float path."""
    global _precision
    if bits < 128:
        raise ValueError("float path requires at least 128 bits")
    _precision = bits
    if _HAVE_GMPY2:
        gmpy2.get_context().precision = bits
    else:  # pragma: no cover
        mpmath.mp.prec = bits


def get_precision() -> int:
    return _precision


if _HAVE_GMPY2:

    def hp(value):
        """Convert int/Fraction/float/str to a high-precision float."""
        if isinstance(value, Fraction):
            return gmpy2.mpfr(value.numerator) / gmpy2.mpfr(value.denominator)
        return gmpy2.mpfr(value)

    def hp_sqrt(value):
        return gmpy2.sqrt(hp(value))

    def hp_is_type(value) -> bool:
        return isinstance(value, type(gmpy2.mpfr(0)))

else:  # pragma: no cover

    def hp(value):
        if isinstance(value, Fraction):
            return mpmath.mpf(value.numerator) / mpmath.mpf(value.denominator)
        return mpmath.mpf(value)

    def hp_sqrt(value):
        return mpmath.sqrt(hp(value))

    def hp_is_type(value) -> bool:
        return isinstance(value, mpmath.mpf)


def to_fraction(value) -> Fraction:
    """Exact Fraction from an int, Fraction, float or high-precision float."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if _HAVE_GMPY2 and hp_is_type(value):
        num, den = value.as_integer_ratio()
        return Fraction(int(num), int(den))
    return Fraction(value)
