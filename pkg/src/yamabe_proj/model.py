"""Projective-space geometry and the coefficients of the reduced ODE.

An invariant function on CP^n (under U(n)) or HP^n (under Sp(n)) depends
only on the orbit parameter r in [0, pi/2].  Writing u = w + 1, the equation
-Delta u + lambda u = lambda u^(q-1) becomes

    w'' + drift(r) w' = G(w),   G(w) = lambda [(w + 1) - (w + 1)^(q-1)],

with drift(r) = (A cos^2 r - B) / (cos r sin r).  The drift is the
logarithmic derivative of the orbit volume sin^sigma(r) cos^gamma(r), so
A = sigma + gamma and B = gamma.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import ConfigError, DomainError, InvalidExponentError, PositivityError

__all__ = [
    "Family",
    "SpaceSpec",
    "ProblemSpec",
    "drift",
    "nonlinearity",
    "nonlinearity_dw",
    "bifurcation_eigenvalue",
    "volume_weight",
]


class Family(str, enum.Enum):
    CP = "cp"
    HP = "hp"

    @classmethod
    def parse(cls, value) -> "Family":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ConfigError(f"unknown space family {value!r}; expected 'cp' or 'hp'") from None


@dataclass(frozen=True)
class SpaceSpec:
    """A projective space CP^n or HP^n with its cohomogeneity-one data."""

    family: Family
    n: int

    def __post_init__(self):
        object.__setattr__(self, "family", Family.parse(self.family))
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise ConfigError(f"n must be an integer >= 1, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def real_dimension(self) -> int:
        return 2 * self.n if self.family is Family.CP else 4 * self.n

    @property
    def drift_constants(self) -> tuple[int, int]:
        """(A, B) in drift = (A cos^2 r - B) / (cos r sin r)."""
        if self.family is Family.CP:
            return 2 * self.n, 1
        return 4 * self.n + 2, 3

    @property
    def weight_exponents(self) -> tuple[int, int]:
        """(sigma, gamma) in the orbit volume sin^sigma cos^gamma."""
        if self.family is Family.CP:
            return 2 * self.n - 1, 1
        return 4 * self.n - 1, 3

    @property
    def critical_exponent(self) -> float:
        """p_d = 2d / (d - 2); infinite for the surface CP^1."""
        d = self.real_dimension
        return 2.0 * d / (d - 2) if d > 2 else math.inf

    def gap(self, k: int) -> int:
        """Eigenvalue of -Laplacian on the k-th invariant eigenspace."""
        if k < 0:
            raise ValueError("k must be >= 0")
        if self.family is Family.CP:
            return 4 * k * (k + self.n)
        return 4 * k * (k + 2 * self.n + 1)

    def lowering(self, m: int) -> int:
        """Coefficient D(m) of x^(m-1) in L(x^m); x = cos^2 r."""
        if self.family is Family.CP:
            return 4 * m * m
        return 4 * m * (m + 1)

    def __str__(self):
        return f"{self.family.value.upper()}^{self.n}"


@dataclass(frozen=True)
class ProblemSpec:
    """A subcritical problem: space, exponent q and parameter lambda."""

    space: SpaceSpec
    q: float
    lam: float

    def __post_init__(self):
        check_exponent(self.space, self.q)
        if not math.isfinite(self.lam) or self.lam < 0:
            raise ConfigError(f"lambda must be a finite real >= 0, got {self.lam!r}")
        object.__setattr__(self, "q", float(self.q))
        object.__setattr__(self, "lam", float(self.lam))

    def with_lambda(self, lam: float) -> "ProblemSpec":
        return ProblemSpec(self.space, self.q, lam)


def check_exponent(space: SpaceSpec, q: float) -> None:
    """Raise unless 2 < q < p_d (p_d infinite in real dimension 2)."""
    if not isinstance(q, (int, float)) or not math.isfinite(q):
        raise InvalidExponentError(f"q must be a finite real, got {q!r}")
    if q <= 2:
        raise InvalidExponentError(f"q must satisfy q > 2, got q = {q}")
    p = space.critical_exponent
    if q >= p:
        raise InvalidExponentError(
            f"q must be subcritical for {space}: q < {p:g}, got q = {q}"
        )


def drift(space: SpaceSpec, r: float) -> float:
    if not 0.0 < r < math.pi / 2:
        raise DomainError(f"drift is singular at r = {r}; need 0 < r < pi/2")
    A, B = space.drift_constants
    c, s = math.cos(r), math.sin(r)
    return (A * c * c - B) / (c * s)


def nonlinearity(problem: ProblemSpec, w: float) -> float:
    """G(w) = lambda [(w + 1) - (w + 1)^(q - 1)]."""
    if not w > -1:
        raise PositivityError(f"u = w + 1 must be positive, got w = {w}")
    u = w + 1.0
    return problem.lam * (u - u ** (problem.q - 1.0))


def nonlinearity_dw(problem: ProblemSpec, w: float) -> float:
    """dG/dw = lambda [1 - (q - 1)(w + 1)^(q - 2)]."""
    if not w > -1:
        raise PositivityError(f"u = w + 1 must be positive, got w = {w}")
    return problem.lam * (1.0 - (problem.q - 1.0) * (w + 1.0) ** (problem.q - 2.0))


def bifurcation_eigenvalue(space: SpaceSpec, q: float, k: int) -> float:
    """lambda_k = gap(k) / (q - 2)."""
    if not q > 2:
        raise InvalidExponentError(f"q must satisfy q > 2, got q = {q}")
    return space.gap(k) / (q - 2.0)


def volume_weight(space: SpaceSpec, r: float) -> float:
    sigma, gamma = space.weight_exponents
    return math.sin(r) ** sigma * math.cos(r) ** gamma
