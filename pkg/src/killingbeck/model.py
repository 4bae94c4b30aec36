"""Domain types and parameter algebra for V(r) = a r^2 + b r - c/r in N dimensions.

Natural units (hbar = c = 1) throughout; conversion to femtometres lives in
:mod:`killingbeck.quarkonium`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

__all__ = [
    "PotentialParams",
    "Channel",
    "DerivedParams",
    "derive_alpha",
    "q_polynomial",
    "solve_k",
    "derive_transform_params",
    "lambda_of_energy",
    "epsilon_of_energy",
]


def _finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class PotentialParams:
    """Strengths of the harmonic, linear and Coulomb terms plus the reduced mass."""

    a: float
    b: float
    c: float
    mu: float

    def __post_init__(self) -> None:
        for name in ("a", "b", "c", "mu"):
            object.__setattr__(self, name, _finite(name, getattr(self, name)))
        if self.a <= 0:
            raise ValueError(f"harmonic strength a must be > 0, got {self.a}")
        if self.mu <= 0:
            raise ValueError(f"reduced mass mu must be > 0, got {self.mu}")

    def potential(self, r):
        """V(r); accepts scalars or numpy arrays with r > 0."""
        return self.a * r * r + self.b * r - self.c / r

    def replace(self, **changes) -> "PotentialParams":
        fields = {"a": self.a, "b": self.b, "c": self.c, "mu": self.mu}
        fields.update(changes)
        return PotentialParams(**fields)


def _as_int(name: str, value) -> int:
    if isinstance(value, bool) or int(value) != value:
        raise ValueError(f"{name} must be an integer, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class Channel:
    """Quantum numbers of a state: pole order ``n``, angular ``l``, dimension ``dim``."""

    n: int
    l: int
    dim: int = 3

    def __post_init__(self) -> None:
        for name in ("n", "l", "dim"):
            object.__setattr__(self, name, _as_int(name, getattr(self, name)))
        if self.n < 0:
            raise ValueError(f"n must be >= 0, got {self.n}")
        if self.l < 0:
            raise ValueError(f"l must be >= 0, got {self.l}")
        if self.dim < 2:
            raise ValueError(f"dimension must be >= 2, got {self.dim}")

    def separation_constant(self) -> int:
        return self.l * (self.l + self.dim - 2)

    def label(self) -> str:
        return f"n={self.n},l={self.l},N={self.dim}"


@dataclass(frozen=True)
class DerivedParams:
    """Abbreviations used by the reduced and transformed equations.

    ``epsilon`` and ``lam`` depend on the energy and are ``None`` when no
    energy was supplied.
    """

    alpha: float
    beta: float
    gamma: float
    eta: float
    q: float
    epsilon: Optional[float] = None
    lam: Optional[float] = None


def derive_alpha(p: PotentialParams) -> float:
    """Gaussian width of the large-r asymptote, sqrt(mu a / 2)."""
    return math.sqrt(p.mu * p.a / 2.0)


def q_polynomial(k: float, ch: Channel) -> float:
    """Coefficient of f/r left over after inserting r^k exp(-alpha r^2) f(r)."""
    return k * (k - 1) + k * (ch.dim - 1) - ch.separation_constant()


def solve_k(ch: Channel) -> tuple[int, int]:
    """Both roots of ``q_polynomial(k) = 0``; only the first is regular at the origin."""
    return ch.l, -(ch.l + ch.dim - 2)


def lambda_of_energy(E: float, p: PotentialParams, ch: Channel) -> float:
    alpha = derive_alpha(p)
    return p.mu * E / (2.0 * alpha) - (ch.l + ch.dim / 2.0 - 2.0)


def epsilon_of_energy(E: float, p: PotentialParams, ch: Channel) -> float:
    alpha = derive_alpha(p)
    return 2.0 * p.mu * E - 2.0 * alpha * ch.dim - 4.0 * alpha * ch.l


def derive_transform_params(
    p: PotentialParams, ch: Channel, energy: Optional[float] = None
) -> DerivedParams:
    """Collect alpha, beta, gamma, eta and Q at k = l (and epsilon, lambda if ``energy``)."""
    alpha = derive_alpha(p)
    k = solve_k(ch)[0]
    return DerivedParams(
        alpha=alpha,
        beta=p.mu * p.b / (2.0 * alpha),
        gamma=(3.0 - 2.0 * ch.l - ch.dim) / (4.0 * alpha),
        eta=2.0 * k + ch.dim - 1.0,
        q=q_polynomial(k, ch),
        epsilon=None if energy is None else epsilon_of_energy(energy, p, ch),
        lam=None if energy is None else lambda_of_energy(energy, p, ch),
    )
