"""Exact invariant eigenfunctions as rational polynomials in x = cos^2 r.

The operator L_mu(phi) = phi'' + drift phi' + mu phi maps monomials in
x = cos^2 r to

    L_mu(x^m) = (mu - gap(m)) x^m + D(m) x^(m-1),

so the eigenfunction for mu = gap(k) is a degree-k polynomial obtained by
back-substitution.  Everything here is done with ``fractions.Fraction``;
floats only appear in :func:`evaluate`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .model import SpaceSpec

__all__ = [
    "EigenPolynomial",
    "ZeroCount",
    "apply_L",
    "eigenfunction",
    "count_zeros",
    "evaluate",
    "sturm_sequence",
    "count_roots",
]

Poly = tuple  # ascending Fraction coefficients, no trailing zeros


def _trim(coeffs: Sequence) -> Poly:
    c = [Fraction(v) for v in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class EigenPolynomial:
    """p_k with p_k(1) = 1; ``coeffs[m]`` multiplies x^m."""

    space: SpaceSpec
    k: int
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))
        if len(self.coeffs) != self.k + 1:
            raise ValueError(f"degree must be exactly k = {self.k}")

    def __call__(self, x):
        """Exact value for rational x, float value otherwise."""
        return _horner(self.coeffs, x)

    def evaluate(self, r: float) -> float:
        return evaluate(self, r)

    def as_floats(self) -> list[float]:
        return [float(c) for c in self.coeffs]


class ZeroCount(NamedTuple):
    count: int
    all_simple: bool


def _horner(coeffs, x):
    acc = 0 * x
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def apply_L(space: SpaceSpec, mu, poly: Sequence) -> Poly:
    """Apply L_mu to a polynomial in x = cos^2 r, exactly."""
    mu = Fraction(mu)
    c = _trim(poly)
    out = [Fraction(0)] * max(len(c), 1)
    for m, cm in enumerate(c):
        out[m] += (mu - space.gap(m)) * cm
        if m > 0:
            out[m - 1] += space.lowering(m) * cm
    return _trim(out)


def eigenfunction(space: SpaceSpec, k: int) -> EigenPolynomial:
    if k < 0:
        raise ValueError("k must be >= 0")
    mu = space.gap(k)
    c = [Fraction(0)] * (k + 1)
    c[k] = Fraction(1)
    for m in range(k - 1, -1, -1):
        # (gap(k) - gap(m)) c_m + D(m+1) c_{m+1} = 0; gap is strictly increasing
        c[m] = -space.lowering(m + 1) * c[m + 1] / (mu - space.gap(m))
    total = sum(c)
    return EigenPolynomial(space, k, tuple(v / total for v in c))


def evaluate(poly: EigenPolynomial, r: float) -> float:
    if not -1e-15 <= r <= math.pi / 2 + 1e-15:
        raise ValueError(f"r must lie in [0, pi/2], got {r}")
    x = math.cos(r) ** 2
    return float(_horner([float(v) for v in poly.coeffs], x))


# --- exact polynomial arithmetic for Sturm sequences ---------------------


def _derivative(p: Poly) -> Poly:
    return _trim([m * p[m] for m in range(1, len(p))])


def _divmod(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    if not den:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(num)
    q = [Fraction(0)] * max(len(num) - len(den) + 1, 1)
    lead = den[-1]
    while len(r) >= len(den) and any(r):
        shift = len(r) - len(den)
        f = r[-1] / lead
        q[shift] = f
        for i, d in enumerate(den):
            r[shift + i] -= f * d
        r.pop()
        r = list(_trim(r))
    return _trim(q), _trim(r)


def sturm_sequence(p: Sequence) -> list[Poly]:
    p = _trim(p)
    seq = [p, _derivative(p)]
    while seq[-1]:
        _, rem = _divmod(seq[-2], seq[-1])
        if not rem:
            break
        seq.append(tuple(-v for v in rem))
    return [s for s in seq if s]


def _sign_changes(seq: list[Poly], x: Fraction) -> int:
    signs = [v for v in (_horner(s, x) for s in seq) if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def count_roots(p: Sequence, lo=0, hi=1) -> int:
    """Distinct real roots of p in the open interval (lo, hi)."""
    lo, hi = Fraction(lo), Fraction(hi)
    p = _trim(p)
    if not p:
        raise ValueError("the zero polynomial has infinitely many roots")
    # strip endpoint roots so that the Sturm count refers to (lo, hi)
    for e in (lo, hi):
        while len(p) > 1 and _horner(p, e) == 0:
            p, _ = _divmod(p, (-e, Fraction(1)))
    seq = sturm_sequence(p)
    return _sign_changes(seq, lo) - _sign_changes(seq, hi)


def count_zeros(poly: EigenPolynomial) -> ZeroCount:
    """Zeros of p_k in (0, 1); x = cos^2 r maps (0, pi/2) onto (0, 1) bijectively."""
    p = poly.coeffs
    seq = sturm_sequence(p)
    # the last Sturm polynomial is gcd(p, p') up to a constant
    simple = len(seq[-1]) == 1
    return ZeroCount(count_roots(p, 0, 1), simple)
