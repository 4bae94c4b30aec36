"""Finite-difference ground truth for the hyperradial equation.

The radial equation is reduced to u'' + [2 mu (E - V) - L_eff/r^2] u = 0 with
u = r^((N-1)/2) R, discretised with the 3-point stencil on a uniform grid
r_i = i h (Dirichlet at 0 and r_max), and solved by Sturm-sequence bisection.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import CubicSpline
from scipy.linalg import LinAlgError, solve_banded

from .closed_form import rms_radius
from .model import Channel, PotentialParams, derive_alpha

__all__ = [
    "ConvergenceError",
    "RadialGrid",
    "GridFunction",
    "EffectiveProblem",
    "TridiagonalOperator",
    "default_grid",
    "reduce_to_normal_form",
    "discretize",
    "sturm_count",
    "lowest_eigenvalues",
    "eigenvalue_by_index",
    "eigenfunction",
    "richardson",
    "oracle_eigenvalues",
    "oracle_eigenpair",
    "shooting_node_count",
    "sign_changes",
    "quadrature_norm",
    "expectation_r2",
    "ode_residual",
]

MIN_STEPS = 100
DEFAULT_STEPS = 4000


class ConvergenceError(RuntimeError):
    """Inverse iteration did not settle."""


@dataclass(frozen=True)
class RadialGrid:
    """Interior points r_i = i h, i = 1..steps, with h = r_max / (steps + 1).

    Both r = 0 and r = r_max are Dirichlet boundary points and never evaluated.
    """

    r_max: float
    steps: int = DEFAULT_STEPS

    def __post_init__(self) -> None:
        if not (math.isfinite(self.r_max) and self.r_max > 0):
            raise ValueError(f"r_max must be positive, got {self.r_max}")
        if int(self.steps) != self.steps or self.steps < MIN_STEPS:
            raise ValueError(f"grid needs at least {MIN_STEPS} interior points, got {self.steps}")
        object.__setattr__(self, "steps", int(self.steps))

    @property
    def h(self) -> float:
        return self.r_max / (self.steps + 1)

    @property
    def r_min(self) -> float:
        return self.h

    @property
    def points(self) -> np.ndarray:
        return self.h * np.arange(1, self.steps + 1)

    def closed_points(self) -> np.ndarray:
        """Interior points plus both boundary points."""
        return self.h * np.arange(0, self.steps + 2)

    def refined(self) -> "RadialGrid":
        """Same box, half the spacing; every interior point of ``self`` is kept."""
        return RadialGrid(self.r_max, 2 * self.steps + 1)


def default_grid(
    p: PotentialParams, ch: Channel, steps: int = DEFAULT_STEPS, r_max: Optional[float] = None
) -> RadialGrid:
    """Box with 2 alpha r_max^2 >= 80 and r_max >= 3 rms radius.

    A negative linear term pushes the density outward by |b| mu/(4 alpha^2);
    the box is widened by that shift.
    """
    if r_max is None:
        alpha = derive_alpha(p)
        shift = max(0.0, -p.mu * p.b / (4.0 * alpha * alpha))
        r_max = max(math.sqrt(80.0 / (2.0 * alpha)), 3.0 * rms_radius(ch, p)) + shift
    return RadialGrid(float(r_max), steps)


def sign_changes(values, rel_threshold: float = 1e-8) -> int:
    """Sign changes in a sampled function, ignoring samples below rel_threshold * max|v|."""
    v = np.asarray(values, dtype=float)
    scale = np.max(np.abs(v)) if v.size else 0.0
    if scale == 0:
        return 0
    keep = v[np.abs(v) > rel_threshold * scale]
    return int(np.count_nonzero(np.signbit(keep[1:]) != np.signbit(keep[:-1])))


@dataclass(frozen=True)
class GridFunction:
    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.steps,):
            raise ValueError(f"expected {self.grid.steps} values, got shape {values.shape}")
        object.__setattr__(self, "values", values)

    def norm(self) -> float:
        return float(np.sum(self.values**2) * self.grid.h)

    def sign_changes(self, rel_threshold: float = 1e-8) -> int:
        return sign_changes(self.values, rel_threshold)

    def interpolate(self, r) -> np.ndarray:
        """Cubic spline through the interior values and the zero boundary values."""
        spline = CubicSpline(self.grid.closed_points(), np.concatenate(([0.0], self.values, [0.0])))
        return spline(np.asarray(r, dtype=float))

    def radial(self, dim: int, r) -> np.ndarray:
        """R(r) = u(r) / r^((N-1)/2) at r > 0."""
        r = np.asarray(r, dtype=float)
        return self.interpolate(r) / r ** ((dim - 1) / 2.0)


@dataclass(frozen=True)
class EffectiveProblem:
    params: PotentialParams
    l: int
    dim: int
    centrifugal_coefficient: float = field(init=False)

    def __post_init__(self) -> None:
        lam = self.l * (self.l + self.dim - 2) + (self.dim - 1) * (self.dim - 3) / 4.0
        big_l = self.l + (self.dim - 3) / 2.0
        if not math.isclose(lam, big_l * (big_l + 1.0), rel_tol=1e-14, abs_tol=1e-14):
            raise AssertionError("centrifugal coefficient forms disagree")
        object.__setattr__(self, "centrifugal_coefficient", lam)

    def effective_potential(self, r):
        r = np.asarray(r, dtype=float)
        return self.params.potential(r) + self.centrifugal_coefficient / (2.0 * self.params.mu * r * r)


def reduce_to_normal_form(p: PotentialParams, ch: Channel) -> EffectiveProblem:
    return EffectiveProblem(p, ch.l, ch.dim)


@dataclass(frozen=True)
class TridiagonalOperator:
    """Symmetric tridiagonal matrix: ``diagonal`` (n) and ``offdiagonal`` (n-1)."""

    diagonal: np.ndarray
    offdiagonal: np.ndarray
    grid: Optional[RadialGrid] = None

    @property
    def size(self) -> int:
        return len(self.diagonal)

    def dense(self) -> np.ndarray:
        return np.diag(self.diagonal) + np.diag(self.offdiagonal, 1) + np.diag(self.offdiagonal, -1)

    def gershgorin(self) -> tuple[float, float]:
        e = np.abs(self.offdiagonal)
        radius = np.concatenate((e, [0.0])) + np.concatenate(([0.0], e))
        return float(np.min(self.diagonal - radius)), float(np.max(self.diagonal + radius))


def discretize(ep: EffectiveProblem, g: RadialGrid) -> TridiagonalOperator:
    """-u''/(2 mu) + V_eff u with the 3-point second difference."""
    if g.steps < MIN_STEPS:
        raise ValueError(f"grid too coarse: {g.steps} < {MIN_STEPS}")
    h2mu = ep.params.mu * g.h * g.h
    diagonal = 1.0 / h2mu + ep.effective_potential(g.points)
    offdiagonal = np.full(g.steps - 1, -0.5 / h2mu)
    return TridiagonalOperator(diagonal, offdiagonal, g)


def sturm_count(op: TridiagonalOperator, x: float) -> int:
    """Number of eigenvalues strictly below x (negative pivots of LDL^T of T - x)."""
    d = op.diagonal.tolist()
    e2 = (op.offdiagonal**2).tolist()
    pivmin = 1e-300
    q = d[0] - x
    count = 1 if q < 0 else 0
    for i in range(1, len(d)):
        if abs(q) < pivmin:
            q = -pivmin if q < 0 else pivmin
        q = d[i] - x - e2[i - 1] / q
        if q < 0:
            count += 1
    return count


def _tolerance(x: float) -> float:
    return 1e-12 * max(1.0, abs(x))


def eigenvalue_by_index(
    op: TridiagonalOperator, k: int, bracket: Optional[tuple[float, float]] = None
) -> float:
    """k-th (0-based) eigenvalue by bisection on Sturm counts.

    ``bracket`` is a hint; it is verified and discarded if it does not isolate index k.
    """
    if not 0 <= k < op.size:
        raise ValueError(f"eigenvalue index {k} outside 0..{op.size - 1}")
    if bracket is not None:
        lo, hi = bracket
        if not (sturm_count(op, lo) <= k < sturm_count(op, hi)):
            bracket = None
    if bracket is None:
        lo, hi = op.gershgorin()
        lo -= 1.0 + abs(lo) * 1e-12
        hi += 1.0 + abs(hi) * 1e-12
    while hi - lo > _tolerance(0.5 * (lo + hi)):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if sturm_count(op, mid) > k:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def lowest_eigenvalues(op: TridiagonalOperator, count: int) -> np.ndarray:
    """The ``count`` smallest eigenvalues, ascending."""
    if not 1 <= count <= op.size:
        raise ValueError(f"count must be in 1..{op.size}, got {count}")
    lo, hi = op.gershgorin()
    lo -= 1.0 + abs(lo) * 1e-12
    hi += 1.0 + abs(hi) * 1e-12
    out: list[float] = []
    for k in range(count):
        floor = out[-1] - _tolerance(out[-1]) if out else lo
        out.append(eigenvalue_by_index(op, k, (floor, hi)))
    return np.array(out)


def eigenfunction(op: TridiagonalOperator, E: float, seed: int = 0, max_sweeps: int = 10) -> GridFunction:
    """Inverse iteration at shift E; normalised to sum(u^2) h = 1, first component positive."""
    if op.grid is None:
        raise ValueError("operator carries no grid")
    n = op.size
    bands = np.zeros((3, n))
    bands[0, 1:] = op.offdiagonal
    bands[1] = op.diagonal - E
    bands[2, :-1] = op.offdiagonal
    x = np.random.default_rng(seed).standard_normal(n)
    x /= np.linalg.norm(x)
    h = op.grid.h

    def _fix(v: np.ndarray) -> np.ndarray:
        v = v / math.sqrt(np.sum(v * v) * h)
        first = np.flatnonzero(np.abs(v) > 1e-12 * np.max(np.abs(v)))[0]
        return -v if v[first] < 0 else v

    prev = None
    for _ in range(max_sweeps):
        try:
            y = solve_banded((1, 1), bands, x, check_finite=False)
        except LinAlgError:
            bands[1] = op.diagonal - (E + _tolerance(E))
            y = solve_banded((1, 1), bands, x, check_finite=False)
        y = _fix(y)
        if prev is not None and np.max(np.abs(y - prev)) < 1e-10 * np.max(np.abs(y)):
            return GridFunction(op.grid, y)
        prev = y
        x = y / np.linalg.norm(y)
    raise ConvergenceError(f"inverse iteration at E = {E} did not converge in {max_sweeps} sweeps")


def richardson(coarse, fine):
    """Cancel the h^2 error term between spacing h and h/2."""
    return (4.0 * np.asarray(fine) - np.asarray(coarse)) / 3.0


def oracle_eigenvalues(
    p: PotentialParams,
    ch: Channel,
    count: int,
    grid: Optional[RadialGrid] = None,
    extrapolate: bool = True,
) -> np.ndarray:
    """Lowest ``count`` eigenvalues of channel (l, N); Richardson-extrapolated by default."""
    grid = grid or default_grid(p, ch)
    ep = reduce_to_normal_form(p, ch)
    coarse = lowest_eigenvalues(discretize(ep, grid), count)
    if not extrapolate:
        return coarse
    fine_op = discretize(ep, grid.refined())
    fine = []
    for k, e in enumerate(coarse):
        # h^2 error shrinks by 4 on refinement, so a window of the coarse error scale suffices
        width = 1e-2 * max(1.0, abs(e))
        fine.append(eigenvalue_by_index(fine_op, k, (e - width, e + width)))
    return richardson(coarse, np.array(fine))


def oracle_eigenpair(
    p: PotentialParams, ch: Channel, index: Optional[int] = None, grid: Optional[RadialGrid] = None
) -> tuple[float, GridFunction]:
    """Extrapolated eigenvalue and grid eigenfunction of state ``index`` (default ch.n)."""
    index = ch.n if index is None else index
    grid = grid or default_grid(p, ch)
    ep = reduce_to_normal_form(p, ch)
    op = discretize(ep, grid)
    e_coarse = eigenvalue_by_index(op, index)
    u = eigenfunction(op, e_coarse)
    width = 1e-2 * max(1.0, abs(e_coarse))
    e_fine = eigenvalue_by_index(discretize(ep, grid.refined()), index, (e_coarse - width, e_coarse + width))
    return float(richardson(e_coarse, e_fine)), u


def shooting_node_count(ep: EffectiveProblem, E: float, grid: RadialGrid) -> int:
    """Nodes of the Numerov outward solution at energy E; equals the number of levels below E."""
    r = grid.points
    h2 = grid.h * grid.h
    k = 2.0 * ep.params.mu * (E - ep.effective_potential(r))
    f = 1.0 + h2 * k / 12.0
    big_l = ep.l + (ep.dim - 3) / 2.0
    u = np.empty_like(r)
    u[0] = r[0] ** (big_l + 1.0)
    u[1] = r[1] ** (big_l + 1.0)
    nodes = 0
    for i in range(1, len(r) - 1):
        u[i + 1] = ((12.0 - 10.0 * f[i]) * u[i] - f[i - 1] * u[i - 1]) / f[i + 1]
        if u[i + 1] == 0.0 or (u[i + 1] < 0) != (u[i] < 0):
            nodes += 1
        if abs(u[i + 1]) > 1e200:
            u[: i + 2] *= 1e-200
    return nodes


def _radial_integrate(integrand, g: RadialGrid) -> float:
    """Composite Simpson on [0, r_max] plus an exponential-tail estimate past r_max."""
    r = g.closed_points()
    vals = np.asarray(integrand(r), dtype=float)
    total = float(simpson(vals, x=r))
    end, before = vals[-1], vals[-2]
    if end > 0 and before > end:
        decay = (math.log(before) - math.log(end)) / g.h
        total += end / decay
    return total


def quadrature_norm(R, ch: Channel, g: RadialGrid) -> float:
    """Integral of R(r)^2 r^(N-1) over r >= 0."""
    return _radial_integrate(lambda r: np.asarray(R(r)) ** 2 * r ** (ch.dim - 1), g)


def expectation_r2(R, ch: Channel, g: RadialGrid) -> float:
    """<r^2> with the normalisation divided out."""
    num = _radial_integrate(lambda r: np.asarray(R(r)) ** 2 * r ** (ch.dim + 1), g)
    return num / quadrature_norm(R, ch, g)


def ode_residual(R, E: float, p: PotentialParams, ch: Channel, sample: Sequence[float]) -> float:
    """Max |radial-equation left side| over ``sample``, scaled by max(1, max|R|).

    R must provide analytic ``derivatives(r) -> (R, R', R'')``.
    """
    if not hasattr(R, "derivatives"):
        raise TypeError("ode_residual needs a radial function with analytic derivatives")
    r = np.asarray(sample, dtype=float)
    if np.any(r <= 0):
        raise ValueError("residual samples must satisfy r > 0")
    f, df, d2f = R.derivatives(r)
    res = (
        d2f
        + (ch.dim - 1) / r * df
        - ch.separation_constant() / (r * r) * f
        + 2.0 * p.mu * (E - p.potential(r)) * f
    )
    return float(np.max(np.abs(res)) / max(1.0, float(np.max(np.abs(f)))))
