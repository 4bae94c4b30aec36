"""Analytic spectrum, eigenfunctions and normalisation from the Laplace-transform solution.

The three pole-matching relations are exposed as residual reporters only.
With gamma fixed by (l, N) they cannot hold simultaneously for a physical
channel (the first one forces n + 1 = 3 - 2l - N), so nothing here enforces
them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import (
    Channel,
    PotentialParams,
    derive_alpha,
    derive_transform_params,
    lambda_of_energy,
)

__all__ = [
    "DomainError",
    "IdentityResiduals",
    "ClosedFormState",
    "PowerGaussianExp",
    "identity_relations",
    "identity_residuals",
    "energy_eigenvalue",
    "exact_solvability_constraint",
    "normalization_constant",
    "log_normalization_constant",
    "radial_wavefunction",
    "rms_radius",
    "oscillator_frequency",
    "oscillator_energy",
    "solve",
]

_LOG_MAX = math.log(np.finfo(float).max)


class DomainError(ValueError):
    """Raised when a radial function is evaluated at r < 0."""


@dataclass(frozen=True)
class IdentityResiduals:
    """Left minus right side of each pole-matching relation; all zero when they hold.

    pole_order : gamma - (n+1)/(4 alpha)
    coulomb    : gamma beta - mu c/(2 alpha)
    energy     : (n+1)(n+2) - (n+1) lambda - (mu c/(2 alpha)) beta
    """

    pole_order: float
    coulomb: float
    energy: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.pole_order, self.coulomb, self.energy)

    def all_zero(self, atol: float = 0.0) -> bool:
        return all(abs(x) <= atol for x in self.as_tuple())


def identity_relations(
    order: float, alpha: float, beta: float, gamma: float, lam: float, kappa: float
) -> IdentityResiduals:
    """Pure-algebra form of the relations for an arbitrary (possibly unphysical) pole order.

    ``order`` is n + 1 and ``kappa`` is mu c / (2 alpha).
    """
    return IdentityResiduals(
        pole_order=gamma - order / (4.0 * alpha),
        coulomb=gamma * beta - kappa,
        energy=order * (order + 1.0) - order * lam - kappa * beta,
    )


def energy_eigenvalue(ch: Channel, p: PotentialParams) -> float:
    """sqrt(a/(2 mu)) (2n + 2l + N) - b^2/(4a)."""
    return math.sqrt(p.a / (2.0 * p.mu)) * (2 * ch.n + 2 * ch.l + ch.dim) - p.b**2 / (4.0 * p.a)


def identity_residuals(ch: Channel, p: PotentialParams) -> IdentityResiduals:
    E = energy_eigenvalue(ch, p)
    d = derive_transform_params(p, ch, energy=E)
    kappa = p.mu * p.c / (2.0 * d.alpha)
    return identity_relations(ch.n + 1.0, d.alpha, d.beta, d.gamma, d.lam, kappa)


def exact_solvability_constraint(ch: Channel, p: PotentialParams) -> float:
    """Coulomb strength c = b (2n + 2l + N - 1)/(4 alpha).

    For n = 0 this makes r^l exp(-alpha r^2 - beta r) an exact solution of the
    radial equation at the closed-form energy. For n > 0 the trial function is
    not an exact solution for any c; the value is still returned.
    """
    alpha = derive_alpha(p)
    return p.b * (2 * ch.n + 2 * ch.l + ch.dim - 1) / (4.0 * alpha)


def log_normalization_constant(ch: Channel, p: PotentialParams) -> float:
    d = derive_transform_params(p, ch)
    order = ch.l + ch.n + ch.dim / 2.0
    inner = (
        math.log(2.0)
        + order * math.log(2.0 * d.alpha)
        - math.lgamma(order)
        - d.beta**2 / (2.0 * d.alpha)
    )
    return math.lgamma(ch.n + 1.0) + 0.5 * inner


def normalization_constant(ch: Channel, p: PotentialParams) -> float:
    """n! {2 (2 alpha)^(l+n+N/2) / Gamma(l+n+N/2) * exp(-beta^2/(2 alpha))}^(1/2).

    Exact for b = 0. For b != 0 the Gaussian integral is taken with the shift
    r + beta/(2 alpha) replaced by r, so the norm is only approximately one.
    """
    logc = log_normalization_constant(ch, p)
    if logc > _LOG_MAX:
        raise OverflowError(f"normalization constant overflows for {ch.label()} (log C = {logc:.1f})")
    return math.exp(logc)


@dataclass(frozen=True)
class PowerGaussianExp:
    """R(r) = A r^k exp(-alpha r^2 - beta r), evaluated in log space.

    Carries analytic first and second derivatives so residual checks do not
    mix finite-difference error into the result.
    """

    log_amplitude: float
    power: float
    alpha: float
    beta: float
    sign: float = 1.0

    @property
    def amplitude(self) -> float:
        return self.sign * math.exp(self.log_amplitude)

    def _check(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if np.any(r < 0):
            raise DomainError("radial function evaluated at r < 0")
        return r

    def __call__(self, r):
        r = self._check(r)
        with np.errstate(divide="ignore"):
            logr = np.log(r)
        if self.power == 0:
            logr = np.zeros_like(r)
        out = self.sign * np.exp(self.log_amplitude + self.power * logr - self.alpha * r * r - self.beta * r)
        return out if out.ndim else float(out)

    def log_derivative(self, r):
        """R'/R = k/r - 2 alpha r - beta (r > 0)."""
        r = np.asarray(r, dtype=float)
        return self.power / r - 2.0 * self.alpha * r - self.beta

    def derivatives(self, r):
        """(R, R', R'') at r > 0."""
        r = self._check(r)
        R = np.asarray(self(r), dtype=float)
        w = self.log_derivative(r)
        dw = -self.power / (r * r) - 2.0 * self.alpha
        return R, R * w, R * (w * w + dw)

    @property
    def abscissa(self) -> float:
        """Exponential growth rate bound; -inf when the Gaussian factor is present."""
        return -math.inf if self.alpha > 0 else -self.beta

    def scaled(self, factor: float) -> "PowerGaussianExp":
        if factor == 0:
            raise ValueError("scale factor must be nonzero")
        return PowerGaussianExp(
            self.log_amplitude + math.log(abs(factor)),
            self.power,
            self.alpha,
            self.beta,
            self.sign * math.copysign(1.0, factor),
        )


def radial_wavefunction(ch: Channel, p: PotentialParams) -> PowerGaussianExp:
    """(C/n!) r^(l+n) exp(-sqrt(mu a/2) r^2 - b sqrt(mu/(2a)) r)."""
    d = derive_transform_params(p, ch)
    log_amp = log_normalization_constant(ch, p) - math.lgamma(ch.n + 1.0)
    # b sqrt(mu/(2a)) == mu b/(2 alpha) == beta
    return PowerGaussianExp(log_amp, float(ch.l + ch.n), d.alpha, p.b * math.sqrt(p.mu / (2.0 * p.a)))


def rms_radius(ch: Channel, p: PotentialParams) -> float:
    """sqrt((l + n + N/2)/(2 alpha)) in natural units.

    The moment ratio of the density r^(2l+2n+N-1) exp(-2 alpha r^2), i.e. with
    the linear term dropped. N = 3 gives the usual (l + n + 3/2) numerator.
    """
    alpha = derive_alpha(p)
    return math.sqrt((ch.l + ch.n + ch.dim / 2.0) / (2.0 * alpha))


def oscillator_frequency(p: PotentialParams) -> float:
    """omega for a = mu omega^2 / 2."""
    return math.sqrt(2.0 * p.a / p.mu)


def oscillator_energy(n_prime: int, omega: float) -> float:
    """omega (n' + 3/2) with n' = n + l, the three-dimensional oscillator case."""
    return omega * (n_prime + 1.5)


@dataclass(frozen=True)
class ClosedFormState:
    channel: Channel
    params: PotentialParams
    energy: float
    norm_constant: float
    residuals: IdentityResiduals

    def wavefunction(self) -> PowerGaussianExp:
        return radial_wavefunction(self.channel, self.params)


def solve(ch: Channel, p: PotentialParams) -> ClosedFormState:
    return ClosedFormState(
        channel=ch,
        params=p,
        energy=energy_eigenvalue(ch, p),
        norm_constant=normalization_constant(ch, p),
        residuals=identity_residuals(ch, p),
    )
