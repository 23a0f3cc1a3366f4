"""Truncated Fock-space representation of the lossy ECS interferometer.

Vectors are stored mode-major with occupations ascending and row-major
flattening: the amplitude of ``|n_0, n_1, ...>`` sits at
``np.ravel_multi_index((n_0, n_1, ...), (n_max + 1,) * modes)``. Mode indices
are 0-based, so the phase-carrying mode ``a_2`` of the interferometer is
mode 1 and the loss environments of modes 0 and 1 are modes 2 and 3.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.stats import poisson

from .errors import DimensionCap, DimensionMismatch, TruncationTooLossy
from .qfi import SUPPORT_CUTOFF, SpectralDecomposition, qfi_unitary

DEFAULT_MAX_DIM = 10**6
DEFAULT_TAIL_TOL = 1e-10
ADAPTIVE_TAIL = 1e-12
MIN_N_MAX = 15


def max_dim_from_env() -> int:
    return int(os.environ.get("QFI_MAX_DIM", DEFAULT_MAX_DIM))


@dataclass(frozen=True)
class FockSpace:
    """``modes`` bosonic modes, each truncated at ``n_max`` photons.

    ``tail_tolerance`` is the largest probability a coherent state may lose to
    the truncation before :class:`TruncationTooLossy` is raised.
    """

    n_max: int
    modes: int = 2
    tail_tolerance: float = DEFAULT_TAIL_TOL
    max_dim: int = field(default_factory=max_dim_from_env)

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")
        if self.modes not in (1, 2, 4):
            raise ValueError(f"modes must be 1, 2 or 4, got {self.modes}")
        if self.dim > self.max_dim:
            raise DimensionCap(f"dimension {self.dim} exceeds cap {self.max_dim}")

    @classmethod
    def adaptive(cls, alpha: complex, modes: int = 2, **kwargs) -> "FockSpace":
        """Smallest ``n_max >= 15`` whose Poisson(|alpha|^2) tail is below 1e-12."""
        return cls(adaptive_n_max(alpha), modes, **kwargs)

    @property
    def local_dim(self) -> int:
        return self.n_max + 1

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.local_dim,) * self.modes

    @property
    def dim(self) -> int:
        return self.local_dim**self.modes

    def index(self, occupations) -> int:
        return int(np.ravel_multi_index(tuple(occupations), self.shape))

    def occupations(self, mode: int) -> np.ndarray:
        """Photon number of ``mode`` for every basis state, in storage order."""
        if not 0 <= mode < self.modes:
            raise ValueError(f"mode {mode} not in a {self.modes}-mode space")
        n = np.arange(self.local_dim, dtype=float)
        shape = [1] * self.modes
        shape[mode] = self.local_dim
        return np.broadcast_to(n.reshape(shape), self.shape).ravel()


def adaptive_n_max(alpha: complex, tail: float = ADAPTIVE_TAIL, minimum: int = MIN_N_MAX) -> int:
    mean = abs(alpha) ** 2
    n = minimum
    while mean > 0 and poisson.sf(n, mean) >= tail:
        n += 1
    return n


@dataclass(frozen=True)
class FockVector:
    space: FockSpace
    amplitudes: np.ndarray
    truncation_loss: float = 0.0

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def expectation(self, op) -> complex:
        m = getattr(op, "matrix", op)
        return complex(np.vdot(self.amplitudes, m @ self.amplitudes))

    def density(self) -> "DenseOperator":
        return DenseOperator(self.space, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DenseOperator:
    space: FockSpace
    matrix: np.ndarray

    def __post_init__(self):
        if self.matrix.shape != (self.space.dim, self.space.dim):
            raise DimensionMismatch(f"matrix {self.matrix.shape} on space of dim {self.space.dim}")

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return bool(np.abs(self.matrix - self.matrix.conj().T).max(initial=0.0) <= tol)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def eigvalsh(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


def coherent_amplitudes(alpha: complex, n_max: int, tail_tolerance: float = DEFAULT_TAIL_TOL):
    """Renormalised single-mode coherent amplitudes and the discarded tail mass."""
    mean = abs(alpha) ** 2
    c = np.empty(n_max + 1, dtype=complex)
    c[0] = math.exp(-mean / 2)
    for n in range(1, n_max + 1):
        c[n] = c[n - 1] * alpha / math.sqrt(n)
    loss = float(poisson.sf(n_max, mean)) if mean > 0 else 0.0
    if loss > tail_tolerance:
        raise TruncationTooLossy(
            f"|alpha|={abs(alpha):.6g} at n_max={n_max} drops {loss:.3e} > {tail_tolerance:.1e}"
        )
    return c / np.linalg.norm(c), loss


def product_ket(space: FockSpace, factors) -> np.ndarray:
    """Tensor product of one single-mode amplitude vector per mode."""
    if len(factors) != space.modes:
        raise DimensionMismatch(f"{len(factors)} factors for {space.modes} modes")
    out = np.ones(1, dtype=complex)
    for f in factors:
        out = np.kron(out, f)
    return out


def _vacuum(space: FockSpace) -> np.ndarray:
    v = np.zeros(space.local_dim, dtype=complex)
    v[0] = 1.0
    return v


def coherent_ket(alpha: complex, space: FockSpace, mode: int | None = None) -> FockVector:
    """Coherent state ``|alpha>`` in ``mode`` (others vacuum).

    For a single-mode space ``mode`` may be omitted.

    Raises:
        TruncationTooLossy: if the Poisson tail beyond ``n_max`` exceeds
            ``space.tail_tolerance``.
    """
    if mode is None:
        if space.modes != 1:
            raise ValueError("mode must be given for a multi-mode space")
        mode = 0
    c, loss = coherent_amplitudes(alpha, space.n_max, space.tail_tolerance)
    factors = [_vacuum(space)] * space.modes
    factors[mode] = c
    return FockVector(space, product_ket(space, factors), loss)


def ecs_normalization(alpha: complex) -> float:
    """``N_alpha = 1 / sqrt(2 (1 + e^{-|alpha|^2}))``."""
    return 1.0 / math.sqrt(2.0 * (1.0 + math.exp(-abs(alpha) ** 2)))


def ecs_ket(alpha: complex, space: FockSpace) -> FockVector:
    """``N_alpha (|alpha, 0> + |0, alpha>)`` on a two-mode space."""
    if space.modes != 2:
        raise ValueError("ECS lives on a two-mode space")
    c, loss = coherent_amplitudes(alpha, space.n_max, space.tail_tolerance)
    vac = _vacuum(space)
    psi = ecs_normalization(alpha) * (np.kron(c, vac) + np.kron(vac, c))
    # truncation leaves a residue of order `loss` in the norm
    return FockVector(space, psi / np.linalg.norm(psi), loss)


def beam_splitter_coherent(alpha1: complex, alpha2: complex, T: float) -> tuple[complex, complex]:
    """Output labels of ``B^T |alpha1>|alpha2>``, itself a product of coherent states."""
    if not 0.0 <= T <= 1.0:
        raise ValueError(f"transmission must lie in [0, 1], got {T}")
    t, r = math.sqrt(T), math.sqrt(1.0 - T)
    return alpha1 * t + alpha2 * r, alpha1 * r - alpha2 * t


def _default_space(alpha, T, modes, space):
    if space is not None:
        if space.modes != modes:
            raise ValueError(f"expected a {modes}-mode space, got {space.modes}")
        return space
    return FockSpace.adaptive(alpha, modes)


def build_rho12_direct(alpha: complex, T: float, space: FockSpace | None = None) -> DenseOperator:
    """Loss-affected ECS assembled from its four-term closed expression.

    ``N^2 [|a',0><a',0| + e^{-|b'|^2}(|a',0><0,a'| + h.c.) + |0,a'><0,a'|]``
    with ``a' = alpha sqrt(T)`` and ``b' = alpha sqrt(1-T)``.
    """
    space = _default_space(alpha, T, 2, space)
    a_out, b_out = beam_splitter_coherent(alpha, 0.0, T)
    c, _ = coherent_amplitudes(a_out, space.n_max, space.tail_tolerance)
    vac = _vacuum(space)
    psi1, psi2 = np.kron(c, vac), np.kron(vac, c)
    cross = math.exp(-abs(b_out) ** 2)
    n2 = ecs_normalization(alpha) ** 2
    m = np.outer(psi1, psi1.conj()) + np.outer(psi2, psi2.conj())
    off = cross * np.outer(psi1, psi2.conj())
    m = n2 * (m + off + off.conj().T)
    # renormalise the truncation residue, which matters only for forced small n_max
    return DenseOperator(space, m / np.trace(m).real)


def partial_trace(ket: FockVector, keep) -> DenseOperator:
    """Reduced density matrix of a pure state on the modes listed in ``keep``."""
    space = ket.space
    keep = list(keep)
    drop = [m for m in range(space.modes) if m not in keep]
    tensor = ket.amplitudes.reshape(space.shape).transpose(keep + drop)
    d_keep = space.local_dim ** len(keep)
    mat = tensor.reshape(d_keep, -1)
    reduced = FockSpace(space.n_max, len(keep), space.tail_tolerance, space.max_dim)
    return DenseOperator(reduced, mat @ mat.conj().T)


def lossy_ecs_environment_ket(alpha: complex, T: float, space: FockSpace) -> FockVector:
    """Four-mode pure state after the fictitious beam splitters (0,2) and (1,3)."""
    # branch |alpha,0>: mode 0 mixes with env 2, mode 1 (vacuum) with env 3
    a0, e2 = beam_splitter_coherent(alpha, 0.0, T)
    a1, e3 = beam_splitter_coherent(0.0, 0.0, T)
    # branch |0,alpha>
    b0, f2 = beam_splitter_coherent(0.0, 0.0, T)
    b1, f3 = beam_splitter_coherent(alpha, 0.0, T)
    amp = {}
    loss = 0.0
    for label in {a0, e2, a1, e3, b0, f2, b1, f3}:
        amp[label], l = coherent_amplitudes(label, space.n_max, space.tail_tolerance)
        loss = max(loss, l)
    psi = product_ket(space, [amp[a0], amp[a1], amp[e2], amp[e3]])
    psi = psi + product_ket(space, [amp[b0], amp[b1], amp[f2], amp[f3]])
    psi = ecs_normalization(alpha) * psi
    return FockVector(space, psi / np.linalg.norm(psi), loss)


def build_rho12_via_environment(alpha: complex, T: float, space: FockSpace | None = None) -> DenseOperator:
    """Loss-affected ECS by evolving with the environment and tracing it out."""
    if space is None:
        space = FockSpace.adaptive(alpha, 4)
    elif space.modes != 4:
        raise ValueError(f"expected a 4-mode space, got {space.modes}")
    return partial_trace(lossy_ecs_environment_ket(alpha, T, space), keep=(0, 1))


def number_operator(space: FockSpace, mode: int, power: int = 1) -> DenseOperator:
    """``(a_mode^dag a_mode)^power`` as a dense diagonal matrix."""
    if power < 1:
        raise ValueError(f"power must be >= 1, got {power}")
    return DenseOperator(space, np.diag(space.occupations(mode) ** power))


def numeric_qfi_lossy(
    alpha: complex,
    T: float,
    space: FockSpace | None = None,
    cutoff: float = SUPPORT_CUTOFF,
) -> float:
    """QFI of the lossy ECS by dense diagonalisation, generator ``a_2^dag a_2``."""
    rho = build_rho12_direct(alpha, T, space)
    decomp = SpectralDecomposition.from_density(rho.matrix, cutoff)
    # diagonal generator: pass the diagonal to skip a dense matmul
    return qfi_unitary(decomp, rho.space.occupations(1)).value


def dump_json(op: DenseOperator, path) -> None:
    """Write ``op`` as JSON: header plus row-major ``[re, im]`` pairs."""
    m = np.asarray(op.matrix, dtype=complex).ravel()
    payload = {
        "n_max": op.space.n_max,
        "modes": op.space.modes,
        "dim": op.space.dim,
        "data": [[float(z.real), float(z.imag)] for z in m],
    }
    Path(path).write_text(json.dumps(payload))


def load_json(path) -> DenseOperator:
    payload = json.loads(Path(path).read_text())
    space = FockSpace(payload["n_max"], payload["modes"], max_dim=max(payload["dim"], 1))
    data = np.array(payload["data"], dtype=float)
    m = (data[:, 0] + 1j * data[:, 1]).reshape(space.dim, space.dim)
    return DenseOperator(space, m)
