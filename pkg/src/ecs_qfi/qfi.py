"""Quantum Fisher information from spectral decompositions.

For a family ``rho(phi) = U rho0 U^dag`` with ``U = exp(-i phi H)`` and
``rho0 = sum_i p_i |i><i|`` the QFI only needs the support of ``rho0``::

    F = 4 [ sum_i p_i Var_i(H) - sum_{i != j} 2 p_i p_j / (p_i + p_j) |H_ij|^2 ]

:func:`qfi_finite_difference` is an independent route that differentiates
the density matrix numerically and sums over the full eigenbasis.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatch,
    NonHermitianInput,
    NotNormalized,
    NotPhysical,
    StepTooSmall,
    ZeroInformation,
)

SUPPORT_CUTOFF = 1e-12
ORTHONORMAL_TOL = 1e-10
NEGATIVE_CLAMP = 1e-10
NOISE_FLOOR = 1e-13
HERMITIAN_TOL = 1e-10


@dataclass(frozen=True)
class SpectralDecomposition:
    """Weights ``p_i`` (descending) and orthonormal kets, one per row of ``kets``."""

    weights: np.ndarray
    kets: np.ndarray

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        k = np.atleast_2d(np.asarray(self.kets, dtype=complex))
        if w.ndim != 1 or k.shape[0] != w.size:
            raise DimensionMismatch(f"{w.size} weights for {k.shape[0]} kets")
        if np.any(w <= 0) or np.any(w > 1 + ORTHONORMAL_TOL):
            raise NotPhysical("weights must lie in (0, 1]")
        if w.sum() > 1 + ORTHONORMAL_TOL:
            raise NotPhysical(f"weights sum to {w.sum()!r} > 1")
        overlaps = k.conj() @ k.T
        if np.abs(overlaps - np.eye(w.size)).max(initial=0.0) > ORTHONORMAL_TOL:
            raise NotNormalized("kets are not orthonormal")
        order = np.argsort(-w, kind="stable")
        object.__setattr__(self, "weights", w[order])
        object.__setattr__(self, "kets", k[order])

    @classmethod
    def from_density(cls, rho, cutoff: float = SUPPORT_CUTOFF) -> "SpectralDecomposition":
        """Diagonalise a dense density matrix and keep eigenvalues above ``cutoff``."""
        rho = _check_hermitian(rho)
        vals, vecs = scipy.linalg.eigh(rho, subset_by_value=(cutoff, np.inf))
        return cls(vals, vecs.T)

    @property
    def dim(self) -> int:
        return self.kets.shape[1]

    @property
    def rank(self) -> int:
        return self.weights.size

    @property
    def components(self) -> list[tuple[float, np.ndarray]]:
        return list(zip(self.weights.tolist(), self.kets))

    def density(self) -> np.ndarray:
        return (self.kets.T * self.weights) @ self.kets.conj()


@dataclass(frozen=True)
class GeneratorStats:
    """Per-eigenstate variances ``Var_i(H)`` and transitions ``|H_ij|^2`` (zero diagonal)."""

    variances: np.ndarray
    transitions: np.ndarray


@dataclass(frozen=True)
class QfiResult:
    value: float
    classical_term: float
    mean_variance_term: float
    transition_term: float

    def __float__(self) -> float:
        return self.value


def _as_matrix(op) -> np.ndarray:
    return np.asarray(getattr(op, "matrix", op))


def _check_hermitian(rho) -> np.ndarray:
    rho = np.asarray(getattr(rho, "matrix", rho), dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {rho.shape}")
    scale = max(1.0, float(np.abs(rho).max(initial=0.0)))
    if np.abs(rho - rho.conj().T).max(initial=0.0) > HERMITIAN_TOL * scale:
        raise NonHermitianInput("density matrix is not Hermitian")
    return (rho + rho.conj().T) / 2


def _apply(generator, kets: np.ndarray) -> np.ndarray:
    """``H |k>`` for each row of ``kets``; a 1-D generator is read as a diagonal."""
    h = _as_matrix(generator)
    if h.ndim == 1:
        if h.size != kets.shape[1]:
            raise DimensionMismatch(f"generator of size {h.size} on kets of dim {kets.shape[1]}")
        return kets * h
    if h.shape != (kets.shape[1], kets.shape[1]):
        raise DimensionMismatch(f"generator of shape {h.shape} on kets of dim {kets.shape[1]}")
    return kets @ h.T


def generator_stats(decomp: SpectralDecomposition, generator) -> GeneratorStats:
    hk = _apply(generator, decomp.kets)
    # h[i, j] = <i|H|j>
    h = decomp.kets.conj() @ hk.T
    second = np.einsum("ij,ij->i", hk.conj(), hk).real
    variances = second - np.diag(h).real ** 2
    variances = np.where(variances > -NEGATIVE_CLAMP, np.maximum(variances, 0.0), variances)
    transitions = np.abs(h) ** 2
    np.fill_diagonal(transitions, 0.0)
    transitions = (transitions + transitions.T) / 2
    return GeneratorStats(variances, transitions)


def qfi_unitary(decomp: SpectralDecomposition, generator) -> QfiResult:
    """QFI of ``exp(-i phi H) rho0 exp(i phi H)`` from the support of ``rho0``.

    Args:
        decomp: spectral decomposition of ``rho0``.
        generator: Hermitian ``H`` as a dense matrix, a ``DenseOperator`` or,
            for diagonal generators, the 1-D array of its diagonal.

    Returns:
        QfiResult with ``classical_term`` identically zero (weights do not
        depend on ``phi``).
    """
    stats = generator_stats(decomp, generator)
    p = decomp.weights
    mean_var = 4.0 * float(p @ stats.variances)
    harmonic = 2.0 * np.outer(p, p) / (p[:, None] + p[None, :])
    transition = 4.0 * float(np.sum(harmonic * stats.transitions))
    value = mean_var - transition
    if value >= -NEGATIVE_CLAMP:
        value = max(value, 0.0)
    return QfiResult(value, 0.0, mean_var, transition)


def qfi_pure(ket, generator) -> float:
    """``4 (<H^2> - <H>^2)`` for a normalised ket."""
    ket = np.asarray(getattr(ket, "amplitudes", ket), dtype=complex)
    if abs(np.vdot(ket, ket).real - 1) > ORTHONORMAL_TOL:
        raise NotNormalized(f"ket has norm^2 {np.vdot(ket, ket).real!r}")
    hk = _apply(generator, ket[None, :])[0]
    mean = np.vdot(ket, hk).real
    var = np.vdot(hk, hk).real - mean**2
    return 4.0 * max(var, 0.0) if var > -NEGATIVE_CLAMP else 4.0 * var


def _central(family, phi, step):
    return (np.asarray(family(phi + step)) - np.asarray(family(phi - step))) / (2 * step)


def qfi_finite_difference(
    rho_family: Callable[[float], np.ndarray],
    phi: float,
    step: float = 1e-5,
    cutoff: float = SUPPORT_CUTOFF,
    richardson: bool = False,
) -> float:
    """QFI from a numerically differentiated density-matrix family.

    Diagonalises ``rho(phi)`` fully and evaluates
    ``sum_{k,l: p_k + p_l > cutoff} 2 |<k| d rho |l>|^2 / (p_k + p_l)`` with
    ``d rho`` from a central difference. With ``richardson=True`` the
    derivative is refined as ``(4 D(h/2) - D(h)) / 3``.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    if phi + step == phi or phi - step == phi:
        raise StepTooSmall(f"step {step!r} is lost against phi = {phi!r}")
    rho = _check_hermitian(rho_family(phi))
    vals, vecs = np.linalg.eigh(rho)
    drho = _central(rho_family, phi, step)
    if richardson:
        drho = (4 * _central(rho_family, phi, step / 2) - drho) / 3
    diff_norm = np.abs(drho).max(initial=0.0) * 2 * step
    if 0 < diff_norm < NOISE_FLOOR * np.abs(rho).max():
        raise StepTooSmall(f"difference {diff_norm:.2e} is below the noise floor")
    d = vecs.conj().T @ drho @ vecs
    denom = vals[:, None] + vals[None, :]
    mask = denom > cutoff
    return float(np.sum(2 * np.abs(d[mask]) ** 2 / denom[mask]))


def cramer_rao_bound(qfi: float, repetitions: int = 1) -> float:
    """Lower bound ``1 / (nu F)`` on the variance of an unbiased phase estimator."""
    if qfi <= 0:
        raise ZeroInformation(f"QFI must be positive, got {qfi!r}")
    if repetitions < 1:
        raise ValueError(f"repetitions must be >= 1, got {repetitions}")
    return 1.0 / (repetitions * qfi)
