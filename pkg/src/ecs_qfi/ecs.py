"""Closed-form QFI of an entangled coherent state in a lossy Mach-Zehnder
interferometer.

Loss is modelled by a beam splitter of transmission ``T`` on each arm. The
reduced state is a rank-2 operator on ``|alpha',0>`` and ``|0,alpha'>`` with
``alpha' = alpha sqrt(T)``; all results depend on ``|alpha|^2`` only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DegenerateLimit, FullLoss
from .rank2 import NonorthogonalRank2


def _one_minus_exp(x: float) -> float:
    """``1 - e^{-x}`` without cancellation at small ``x``."""
    return -math.expm1(-x)


@dataclass(frozen=True)
class EcsScenario:
    """Input amplitude ``alpha`` and arm transmission ``T``."""

    alpha: complex
    T: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "T", float(self.T))
        if not 0.0 <= self.T <= 1.0:
            raise ValueError(f"transmission must lie in [0, 1], got {self.T}")

    @property
    def R(self) -> float:
        return 1.0 - self.T

    @property
    def intensity(self) -> float:
        """``|alpha|^2``."""
        return abs(self.alpha) ** 2

    @property
    def alpha_prime(self) -> complex:
        return self.alpha * math.sqrt(self.T)

    @property
    def beta_prime(self) -> complex:
        return self.alpha * math.sqrt(self.R)

    @property
    def N_alpha(self) -> float:
        return 1.0 / math.sqrt(2.0 * (1.0 + math.exp(-self.intensity)))

    @property
    def n_bar(self) -> float:
        """Mean total photon number ``2 N^2 |alpha|^2``."""
        return self.intensity / (1.0 + math.exp(-self.intensity))

    @property
    def overlap(self) -> float:
        """``<alpha',0|0,alpha'> = e^{-|alpha'|^2}``."""
        return math.exp(-self.intensity * self.T)

    def as_rank2(self) -> NonorthogonalRank2:
        """The reduced state as ``a=d=N^2``, ``b=N^2 e^{-|beta'|^2}``, ``p=e^{-|alpha'|^2}``."""
        n2 = self.N_alpha**2
        return NonorthogonalRank2(n2, n2, n2 * math.exp(-self.intensity * self.R), self.overlap)


@dataclass(frozen=True)
class EigenTilde:
    lambda_plus: float
    lambda_minus: float
    v_plus: float
    v_minus: float


@dataclass(frozen=True)
class EcsQfiBreakdown:
    """Every intermediate of the analytic QFI.

    ``var_plus``/``var_minus`` are the variances of ``a_2^dag a_2`` in the
    eigenstates of ``lambda_plus``/``lambda_minus``; ``transition`` is
    ``|H_12|^2``. ``F`` is the simplified closed form, ``F_assembled`` the
    two-component sum built from the pieces.
    """

    lambda_plus: float
    lambda_minus: float
    v_plus: float
    v_minus: float
    var_plus: float
    var_minus: float
    transition: float
    F: float
    F_assembled: float
    flags: tuple[str, ...] = field(default=())


def _require_alpha(s: EcsScenario):
    if s.intensity == 0:
        raise DegenerateLimit("alpha = 0 carries no photons")


def _sqrt_x(s: EcsScenario) -> float:
    a = s.intensity
    return math.sqrt(2 * math.exp(-a) + math.exp(-2 * a * s.T) + math.exp(-2 * a * s.R))


def _eigenvalues(s: EcsScenario) -> tuple[float, float]:
    a = s.intensity
    lam_p = 0.5 + _sqrt_x(s) / (2 + 2 * math.exp(-a))
    # lambda_- from lambda_+ lambda_- = det keeps relative accuracy near purity
    det = s.N_alpha**4 * _one_minus_exp(2 * a * s.T) * _one_minus_exp(2 * a * s.R)
    return lam_p, det / lam_p


def _weights(s: EcsScenario) -> tuple[float, float]:
    """``v_pm^2 / (1 - p^2)``, cancellation-free for small ``|alpha'|^2``."""
    a = s.intensity
    root = _sqrt_x(s)
    shift = math.exp(-a) + math.exp(-2 * a * s.T)
    u = math.exp(-a * s.R) + math.exp(-a * s.T)
    w_minus = u * u / (2 * root * (root + shift))
    w_plus = (0.5 + shift / (2 * root)) / _one_minus_exp(2 * a * s.T)
    return w_plus, w_minus


def eigen_tilde(s: EcsScenario) -> EigenTilde:
    """Eigenvalues of the reduced state and the real amplitudes ``v_pm``.

    ``v_pm^2 = 1/2 +- (e^{-|a|^2} + e^{-2|a'|^2}) / (2 sqrt(2e^{-|a|^2} + e^{-2|a'|^2} + e^{-2|b'|^2}))``.
    """
    _require_alpha(s)
    lam_p, lam_m = _eigenvalues(s)
    root = _sqrt_x(s)
    shift = math.exp(-s.intensity) + math.exp(-2 * s.intensity * s.T)
    vp2 = 0.5 + shift / (2 * root)
    if s.T > 0:
        vm2 = _weights(s)[1] * _one_minus_exp(2 * s.intensity * s.T)
    else:
        vm2 = max(1.0 - vp2, 0.0)
    return EigenTilde(lam_p, lam_m, math.sqrt(vp2), math.sqrt(vm2))


def variances_and_transition(s: EcsScenario) -> tuple[float, float, float]:
    """``(Var_+(H), Var_-(H), |H_12|^2)`` for ``H = a_2^dag a_2``.

    With ``w_pm = v_pm^2 / (1 - p^2)`` and ``A = |alpha'|^2``:
    ``Var_+ = w_- (A^2 + A - w_- A^2)``, ``Var_- = w_+ (A^2 + A - w_+ A^2)``,
    ``|H_12|^2 = w_+ w_- A^2``.

    Raises:
        FullLoss: at ``T = 0``, where both basis kets collapse onto vacuum.
    """
    _require_alpha(s)
    if s.T == 0:
        raise FullLoss("T = 0: the reduced state is the vacuum")
    w_plus, w_minus = _weights(s)
    big_a = s.intensity * s.T
    var_plus = w_minus * (big_a**2 + big_a - w_minus * big_a**2)
    var_minus = w_plus * (big_a**2 + big_a - w_plus * big_a**2)
    transition = w_plus * w_minus * big_a**2
    return max(var_plus, 0.0), max(var_minus, 0.0), transition


def qfi_closed_form(s: EcsScenario) -> float:
    """``F = n T [2 + (2|a|^2 - n - n (1 - e^{-2|a|^2 R}) / (1 - e^{-2|a|^2 T})) T]``."""
    if s.intensity == 0 or s.T == 0:
        return 0.0
    if s.T == 1:
        return lossless_qfi(s.alpha)
    a, n = s.intensity, s.n_bar
    ratio = _one_minus_exp(2 * a * s.R) / _one_minus_exp(2 * a * s.T)
    return n * s.T * (2 + (2 * a - n - n * ratio) * s.T)


def qfi_analytic(s: EcsScenario) -> EcsQfiBreakdown:
    """Analytic QFI with every intermediate quantity.

    ``alpha = 0`` and ``T = 0`` return ``F = 0`` with a ``"degenerate"`` or
    ``"full_loss"`` flag instead of raising.
    """
    if s.intensity == 0:
        return EcsQfiBreakdown(1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, ("degenerate",))
    if s.T == 0:
        return EcsQfiBreakdown(1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, ("full_loss",))
    eig = eigen_tilde(s)
    var_p, var_m, trans = variances_and_transition(s)
    lp, lm = eig.lambda_plus, eig.lambda_minus
    assembled = 4 * lp * var_p + 4 * lm * var_m - 16 * lp * lm * trans
    flags = ("lossless",) if s.T == 1 else ()
    return EcsQfiBreakdown(
        lp, lm, eig.v_plus, eig.v_minus, var_p, var_m, trans,
        qfi_closed_form(s), assembled, flags,
    )


def photon_moments(alpha: complex) -> tuple[float, float]:
    """Mean and second moment of the total photon number of the ECS."""
    a = abs(alpha) ** 2
    n = a / (1.0 + math.exp(-a))
    return n, (1.0 + a) * n


def lossless_qfi(alpha: complex) -> float:
    """``F = n (2 + 2|alpha|^2 - n)`` at ``T = 1``, equal to ``2<n^2> - n^2``."""
    a = abs(alpha) ** 2
    if a == 0:
        raise DegenerateLimit("alpha = 0 carries no photons")
    n, _ = photon_moments(alpha)
    return n * (2 + 2 * a - n)
