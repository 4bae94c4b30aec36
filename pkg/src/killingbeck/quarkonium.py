"""Quark-antiquark masses, rms radii in fm, and potential-parameter fits."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .closed_form import energy_eigenvalue, rms_radius
from .model import Channel, PotentialParams

__all__ = [
    "HBARC_GEV_FM",
    "QuarkSystem",
    "FitProblem",
    "StateResidual",
    "FitResult",
    "GoldenReference",
    "GOLDEN_RMS_RADII",
    "reduced_mass",
    "state_mass",
    "rms_radius_fm",
    "fit_parameters",
    "compare_golden",
]

# hbar c in GeV fm, rounded to four figures on purpose
HBARC_GEV_FM = 0.1973

FIT_PARAMETERS = ("a", "b", "c")
N_STARTS = 8
MAX_ITER = 5000
X_TOL = 1e-12
F_TOL = 1e-24


def reduced_mass(m1: float, m2: float) -> float:
    if not (m1 > 0 and m2 > 0):
        raise ValueError(f"quark masses must be positive, got {m1}, {m2}")
    return m1 * m2 / (m1 + m2)


@dataclass(frozen=True)
class QuarkSystem:
    m1: float
    m2: float
    params: PotentialParams
    label: str = ""

    def __post_init__(self) -> None:
        mu = reduced_mass(self.m1, self.m2)
        if not math.isclose(self.params.mu, mu, rel_tol=1e-12):
            raise ValueError(f"params.mu = {self.params.mu} is not the reduced mass {mu}")

    @classmethod
    def build(cls, m1: float, m2: float, a: float, b: float, c: float, label: str = "") -> "QuarkSystem":
        return cls(m1, m2, PotentialParams(a, b, c, reduced_mass(m1, m2)), label)

    def with_params(self, **changes: float) -> "QuarkSystem":
        return QuarkSystem(self.m1, self.m2, self.params.replace(**changes), self.label)


def state_mass(sys: QuarkSystem, ch: Channel) -> float:
    """m1 + m2 + E(n, l, N) in GeV."""
    return sys.m1 + sys.m2 + energy_eigenvalue(ch, sys.params)


def rms_radius_fm(sys: QuarkSystem, ch: Channel) -> float:
    return rms_radius(ch, sys.params) * HBARC_GEV_FM


@dataclass(frozen=True)
class GoldenReference:
    """A published radius that can only be checked with externally fitted parameters."""

    label: str
    channel: Channel
    rms_fm: float
    requires_external_parameters: bool = True


GOLDEN_RMS_RADII = (
    GoldenReference("bb 1S (Upsilon)", Channel(0, 0, 3), 0.2672),
    GoldenReference("cc 1S (J/psi)", Channel(0, 0, 3), 0.4839),
)


def compare_golden(sys: QuarkSystem, ref: GoldenReference, rel_tol: float = 1e-3) -> dict:
    """Predicted vs published radius; meaningful only for user-supplied parameters."""
    predicted = rms_radius_fm(sys, ref.channel)
    return {
        "label": ref.label,
        "predicted_fm": predicted,
        "reference_fm": ref.rms_fm,
        "relative_error": abs(predicted - ref.rms_fm) / ref.rms_fm,
        "matches": math.isclose(predicted, ref.rms_fm, rel_tol=rel_tol),
    }


@dataclass(frozen=True)
class FitProblem:
    observations: tuple[tuple[Channel, float], ...]
    free: tuple[str, ...]
    bounds: Mapping[str, tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "observations", tuple((ch, float(m)) for ch, m in self.observations))
        object.__setattr__(self, "free", tuple(self.free))
        if not self.free:
            raise ValueError("no free parameters")
        unknown = set(self.free) - set(FIT_PARAMETERS)
        if unknown or len(set(self.free)) != len(self.free):
            raise ValueError(f"free parameters must be distinct names from {FIT_PARAMETERS}, got {self.free}")
        if len(self.observations) < len(self.free):
            raise ValueError(
                f"{len(self.observations)} observations cannot determine {len(self.free)} parameters"
            )
        for name in self.free:
            if name not in self.bounds:
                raise ValueError(f"missing bounds for free parameter {name!r}")
            lo, hi = self.bounds[name]
            if not lo < hi:
                raise ValueError(f"empty bounds for {name!r}: ({lo}, {hi})")
        if "a" in self.free and self.bounds["a"][0] <= 0:
            raise ValueError("lower bound of a must be > 0")


@dataclass(frozen=True)
class StateResidual:
    channel: Channel
    observed: float
    predicted: float

    @property
    def residual(self) -> float:
        return self.predicted - self.observed


@dataclass(frozen=True)
class FitResult:
    params: PotentialParams
    residuals: tuple[StateResidual, ...]
    objective: float
    converged: bool
    iterations: int
    simplex_diameter: float
    best_start: int
    start_objectives: tuple[float, ...]


def fit_parameters(fp: FitProblem, sys: QuarkSystem, seed: int = 0, n_starts: int = N_STARTS) -> FitResult:
    """Least-squares fit of the free potential strengths to the observed masses.

    Bounded Nelder-Mead from ``n_starts`` uniform random starts; the best
    objective wins, ties going to the earliest start. The mass formula is
    single-valued per channel, so conflicting observations simply leave an
    irreducible residual. The energy depends on b only through b^2, so the
    sign of b is fixed by its bounds.
    """
    # canonical order makes the objective independent of how observations were listed
    obs = sorted(fp.observations, key=lambda o: (o[0].dim, o[0].l, o[0].n, o[1]))
    channels = [ch for ch, _ in obs]
    observed = np.array([m for _, m in obs])
    lows = np.array([fp.bounds[k][0] for k in fp.free])
    highs = np.array([fp.bounds[k][1] for k in fp.free])

    def system_at(x) -> QuarkSystem:
        return sys.with_params(**dict(zip(fp.free, map(float, x))))

    def objective(x) -> float:
        s = system_at(x)
        pred = np.array([state_mass(s, ch) for ch in channels])
        return float(np.sum((pred - observed) ** 2))

    rng = np.random.default_rng(seed)
    starts = rng.uniform(lows, highs, size=(n_starts, len(fp.free)))
    runs = []
    for x0 in starts:
        res = minimize(
            objective,
            x0,
            method="Nelder-Mead",
            bounds=list(zip(lows, highs)),
            options={"maxiter": MAX_ITER, "xatol": X_TOL, "fatol": F_TOL},
        )
        simplex = res.final_simplex[0]
        diameter = float(np.max(np.abs(simplex - simplex[0])))
        runs.append((float(res.fun), res.x, int(res.nit), diameter))

    best = min(range(len(runs)), key=lambda i: (runs[i][0], i))
    fun, x, nit, diameter = runs[best]
    fitted = system_at(x)
    residuals = tuple(
        StateResidual(ch, m, state_mass(fitted, ch)) for ch, m in fp.observations
    )
    return FitResult(
        params=fitted.params,
        residuals=residuals,
        objective=fun,
        converged=diameter <= 1e3 * X_TOL and nit < MAX_ITER,
        iterations=nit,
        simplex_diameter=diameter,
        best_start=best,
        start_objectives=tuple(r[0] for r in runs),
    )
