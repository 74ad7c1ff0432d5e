"""Exact comparison of dyadic power sums sum_j a_j * 2^(-j*s).

Cover values are sums of terms 2^(-j*s) over cube levels j.  When s is (or
rounds to) a rational p/q with q <= 64 these sums are compared exactly so
that self-similar ties in the cover DP are decided deterministically; for
other exponents comparisons fall back to doubles with a relative tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

_SNAP_DENOMINATOR = 64
_SNAP_RTOL = 1e-9
_FLOAT_RTOL = 1e-12


def snap_exponent(s: float) -> Fraction | None:
    """Nearest rational p/q with q <= 64, or None if s is not close to one."""
    frac = Fraction(s).limit_denominator(_SNAP_DENOMINATOR)
    if abs(float(frac) - s) <= _SNAP_RTOL * max(1.0, abs(s)):
        return frac
    return None


def _iroot(x: int, q: int) -> int:
    """Floor of the integer q-th root of x >= 0."""
    if x < 2 or q == 1:
        return x
    r = 1 << ((x.bit_length() - 1) // q + 1)
    while True:
        nr = ((q - 1) * r + x // r ** (q - 1)) // q
        if nr >= r:
            return r
        r = nr


def add_terms(acc: dict, other: dict) -> dict:
    for j, mult in other.items():
        acc[j] = acc.get(j, 0) + mult
    return acc


@dataclass(frozen=True)
class ExponentContext:
    """Comparison context for level-multiplicity dicts {level: count}."""

    s: float
    frac: Fraction | None

    @classmethod
    def create(cls, s: float) -> "ExponentContext":
        return cls(float(s), snap_exponent(float(s)))

    def to_float(self, terms: dict) -> float:
        return float(sum(mult * 2.0 ** (-j * self.s) for j, mult in sorted(terms.items())))

    def compare(self, a: dict, b: dict) -> int:
        """Sign of value(a) - value(b): -1, 0 or +1."""
        diff = dict(a)
        for j, mult in b.items():
            diff[j] = diff.get(j, 0) - mult
        diff = {j: m for j, m in diff.items() if m != 0}
        if not diff:
            return 0
        if self.frac is None:
            va = self.to_float(a)
            vb = self.to_float(b)
            if abs(va - vb) <= _FLOAT_RTOL * max(abs(va), abs(vb), 1e-300):
                return 0
            return -1 if va < vb else 1
        return self._compare_exact(diff)

    def _compare_exact(self, diff: dict) -> int:
        # value = sum_j m_j * mu^(j*p) with mu = 2^(-1/q); group exponents by
        # residue mod q so the value becomes sum_r c_r * mu^r with c_r exactly
        # representable.  The mu^r are linearly independent over Q, so all
        # c_r = 0 iff the value is zero.
        p, q = self.frac.numerator, self.frac.denominator
        coeff: dict[int, Fraction] = {}
        for j, mult in diff.items():
            e = j * p
            r = e % q
            coeff[r] = coeff.get(r, Fraction(0)) + Fraction(mult, 1 << (e // q))
        coeff = {r: c for r, c in coeff.items() if c != 0}
        if not coeff:
            return 0
        if len(coeff) == 1:
            ((_, c),) = coeff.items()
            return 1 if c > 0 else -1
        bits = 64
        while True:
            lo = Fraction(0)
            hi = Fraction(0)
            for r, c in coeff.items():
                # 2^(-r/q) lies in [t, t+1] / 2^bits with t the floor root
                t = _iroot(1 << (bits * q - r), q)
                b_lo = Fraction(t, 1 << bits)
                b_hi = Fraction(t + 1, 1 << bits)
                if c >= 0:
                    lo += c * b_lo
                    hi += c * b_hi
                else:
                    lo += c * b_hi
                    hi += c * b_lo
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            bits *= 2
