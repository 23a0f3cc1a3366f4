"""Precision-limit references and the reflectivities where the lossy ECS QFI
drops below them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .ecs import EcsScenario, photon_moments, qfi_analytic
from .errors import DegenerateLimit

SCAN_STEP = 0.01
DEFAULT_FTOL = 1e-10
MAX_BISECTIONS = 200

# crossing name -> limit attribute
CROSSING_LIMITS = {"R_A": "hofmann", "R_B": "heisenberg", "R_C": "shot_noise"}


@dataclass(frozen=True)
class PrecisionLimits:
    """QFI thresholds: shot noise ``n``, Heisenberg ``n^2`` and Hofmann ``<n^2>``."""

    shot_noise: float
    heisenberg: float
    hofmann: float

    @property
    def number_variance(self) -> float:
        return self.hofmann - self.heisenberg


def limits_for(alpha: complex) -> PrecisionLimits:
    if abs(alpha) == 0:
        raise DegenerateLimit("alpha = 0 carries no photons")
    n, n2 = photon_moments(alpha)
    return PrecisionLimits(n, n * n, n2)


@dataclass(frozen=True)
class Crossing:
    """Root of ``F(R) = limit``; ``R`` is None when F never reaches the limit."""

    name: str
    limit: float
    R: float | None = None
    bracket: tuple[float, float] | None = None
    residual: float | None = None
    evaluations: int = 0

    @property
    def absent(self) -> bool:
        return self.R is None


@dataclass(frozen=True)
class CrossingReport:
    alpha: complex
    tolerance: float
    limits: PrecisionLimits
    crossings: dict[str, Crossing] = field(default_factory=dict)

    @property
    def R_A(self) -> Crossing:
        return self.crossings["R_A"]

    @property
    def R_B(self) -> Crossing:
        return self.crossings["R_B"]

    @property
    def R_C(self) -> Crossing:
        return self.crossings["R_C"]


def qfi_at_reflectivity(alpha: complex, R: float) -> float:
    return qfi_analytic(EcsScenario(alpha, 1.0 - R)).F


def _bisect(g, lo, hi, g_lo, tolerance, ftol):
    """Bisection on a sign change ``g(lo) > 0 >= g(hi)``."""
    evals = 0
    mid, g_mid = lo, g_lo
    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        g_mid = g(mid)
        evals += 1
        if g_mid > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < tolerance and abs(g_mid) < ftol:
            break
    return mid, (lo, hi), g_mid, evals


def find_crossings(
    alpha: complex,
    tolerance: float = 1e-6,
    ftol: float = DEFAULT_FTOL,
    scan_step: float = SCAN_STEP,
) -> CrossingReport:
    """Reflectivities ``R_A``, ``R_B``, ``R_C`` where the QFI meets the
    Hofmann, Heisenberg and shot-noise limits.

    Each root is bracketed by a scan of ``R`` in steps of ``scan_step`` and
    refined by bisection until the bracket is narrower than ``tolerance`` and
    ``|F - limit| < ftol``. A limit that F never exceeds on the scan is
    reported as absent.
    """
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    lims = limits_for(alpha)
    n_steps = int(round(1.0 / scan_step))
    grid = np.linspace(0.0, 1.0, n_steps + 1)
    f_grid = np.array([qfi_at_reflectivity(alpha, r) for r in grid])
    out = {}
    for name, attr in CROSSING_LIMITS.items():
        limit = getattr(lims, attr)
        g_grid = f_grid - limit
        idx = np.nonzero((g_grid[:-1] > 0) & (g_grid[1:] <= 0))[0]
        if idx.size == 0:
            out[name] = Crossing(name, limit)
            continue
        i = int(idx[0])
        if g_grid[i + 1] == 0:
            out[name] = Crossing(name, limit, float(grid[i + 1]), (float(grid[i + 1]),) * 2, 0.0)
            continue

        def g(r, limit=limit):
            return qfi_at_reflectivity(alpha, r) - limit

        root, bracket, resid, evals = _bisect(g, grid[i], grid[i + 1], g_grid[i], tolerance, ftol)
        out[name] = Crossing(name, limit, float(root), (float(bracket[0]), float(bracket[1])), float(resid), evals)
    return CrossingReport(complex(alpha), tolerance, lims, out)


@dataclass(frozen=True)
class SweepRow:
    R: float
    T: float
    F: float
    shot_noise: float
    heisenberg: float
    hofmann: float
    flags: tuple[str, ...] = ()


def sweep_qfi(alpha: complex, R_grid) -> list[SweepRow]:
    """QFI and the three limits at each reflectivity, sorted by ``R``.

    A point that fails is returned with an ``error:`` flag and ``F = nan``
    rather than aborting the sweep.
    """
    n, n2 = photon_moments(alpha)
    rows = []
    for R in sorted(float(r) for r in R_grid):
        if not 0.0 <= R <= 1.0:
            rows.append(SweepRow(R, 1.0 - R, math.nan, n, n * n, n2, (f"error:R={R!r} outside [0, 1]",)))
            continue
        try:
            res = qfi_analytic(EcsScenario(alpha, 1.0 - R))
        except (ArithmeticError, ValueError) as exc:
            rows.append(SweepRow(R, 1.0 - R, math.nan, n, n * n, n2, (f"error:{exc}",)))
            continue
        rows.append(SweepRow(R, 1.0 - R, res.F, n, n * n, n2, res.flags))
    return rows
