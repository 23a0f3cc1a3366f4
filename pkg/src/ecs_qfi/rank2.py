"""Closed-form spectra of 2x2 density matrices and of rank-2 operators on a
nonorthogonal pair of kets.

Two routes are provided for the nonorthogonal case:

* :func:`eig_nonorthogonal` recasts the operator into the Gram-Schmidt basis
  ``Phi1 = Psi1``, ``Phi2 = (Psi2 - p Psi1) / sqrt(1 - |p|^2)`` and reuses the
  (det, <sigma_3>, tau) parametrisation of :func:`eig_general_qubit`.
* :func:`eig_nonorthogonal_direct` solves the non-Hermitian coefficient
  eigenproblem in the original ``Psi`` basis and normalises with the Gram
  matrix.

Both must agree; the test-suite checks that they do.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BasisCollapse, DegenerateSpectrum, NotPhysical

DEGENERACY_TOL = 1e-12
PHYSICALITY_TOL = 1e-12
TRACE_TOL = 1e-12
COLLAPSE_TOL = 1e-12
PHASE_TOL = 1e-14

PHI_BASIS = "phi"
PSI_BASIS = "psi"


@dataclass(frozen=True)
class GeneralQubitDensity:
    """``[[eta, xi e^{i tau}], [xi e^{-i tau}, 1 - eta]]``.

    ``det`` slightly below zero (down to ``-1e-12``) is clamped to zero.
    """

    eta: float
    xi: float
    tau: float = 0.0

    def __post_init__(self):
        if self.xi < 0:
            raise NotPhysical(f"off-diagonal magnitude must be >= 0, got {self.xi}")
        if not -PHYSICALITY_TOL <= self.eta <= 1 + PHYSICALITY_TOL:
            raise NotPhysical(f"diagonal element outside [0, 1]: {self.eta}")
        if self.eta * (1 - self.eta) - self.xi**2 < -PHYSICALITY_TOL:
            raise NotPhysical(f"negative determinant {self.eta * (1 - self.eta) - self.xi**2:.3e}")
        object.__setattr__(self, "tau", float(self.tau) % (2 * math.pi))

    @classmethod
    def from_matrix(cls, matrix) -> "GeneralQubitDensity":
        m = np.asarray(matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
        if abs(np.trace(m) - 1) > TRACE_TOL or abs(m[0, 1] - np.conj(m[1, 0])) > TRACE_TOL:
            raise NotPhysical("matrix is not a unit-trace Hermitian 2x2 matrix")
        return cls(float(m[0, 0].real), float(abs(m[0, 1])), float(cmath.phase(m[0, 1])))

    @property
    def det(self) -> float:
        return max(self.eta * (1 - self.eta) - self.xi**2, 0.0)

    @property
    def sigma3(self) -> float:
        return 2 * self.eta - 1

    @property
    def matrix(self) -> np.ndarray:
        off = self.xi * cmath.exp(1j * self.tau)
        return np.array([[self.eta, off], [off.conjugate(), 1 - self.eta]], dtype=complex)


@dataclass(frozen=True)
class NonorthogonalRank2:
    """``a|Psi1><Psi1| + b|Psi1><Psi2| + b*|Psi2><Psi1| + d|Psi2><Psi2|``.

    ``p = <Psi1|Psi2>`` for unit-norm kets ``Psi1``, ``Psi2``. The operator is
    required to have unit trace and to be positive semidefinite.
    """

    a: float
    d: float
    b: complex
    p: complex

    def __post_init__(self):
        object.__setattr__(self, "b", complex(self.b))
        object.__setattr__(self, "p", complex(self.p))
        if abs(self.p) >= 1 - COLLAPSE_TOL:
            raise BasisCollapse(f"|p| = {abs(self.p)!r} leaves no second direction")
        if self.a < -PHYSICALITY_TOL or self.d < -PHYSICALITY_TOL:
            raise NotPhysical(f"diagonal coefficients must be >= 0, got a={self.a}, d={self.d}")
        if abs(self.trace - 1) > TRACE_TOL:
            raise NotPhysical(f"trace {self.trace!r} is not 1")
        if self.gram_factor * (self.a * self.d - abs(self.b) ** 2) < -PHYSICALITY_TOL:
            raise NotPhysical("operator is not positive semidefinite")

    @property
    def gram_factor(self) -> float:
        """``1 - |p|^2``."""
        return 1.0 - abs(self.p) ** 2

    @property
    def trace(self) -> float:
        return self.a + self.d + 2 * (self.b * self.p.conjugate()).real

    @property
    def coefficients(self) -> np.ndarray:
        """Hermitian coefficient matrix ``[[a, b], [b*, d]]`` on the Psi kets."""
        return np.array([[self.a, self.b], [self.b.conjugate(), self.d]], dtype=complex)

    @property
    def gram(self) -> np.ndarray:
        return np.array([[1.0, self.p], [self.p.conjugate(), 1.0]], dtype=complex)


@dataclass(frozen=True)
class Orthogonalized:
    """The operator written on the Gram-Schmidt basis, with its invariants."""

    density: GeneralQubitDensity
    matrix: np.ndarray = field(repr=False)
    det: float
    sigma3: float
    phase: complex
    phase_defined: bool


@dataclass(frozen=True)
class SpectralPair:
    """Eigenvalues ``lambda_plus >= lambda_minus`` and the coefficients of the
    corresponding eigenvectors on ``basis`` (``"phi"`` or ``"psi"``).

    ``overlap`` is ``<Psi1|Psi2>`` for the psi basis and 0 for phi.
    """

    lambda_plus: float
    lambda_minus: float
    coeffs_plus: np.ndarray
    coeffs_minus: np.ndarray
    basis: str = PHI_BASIS
    overlap: complex = 0j

    @property
    def gram(self) -> np.ndarray:
        p = self.overlap
        return np.array([[1.0, p], [np.conj(p), 1.0]], dtype=complex)

    @property
    def eigenvalues(self) -> tuple[float, float]:
        return self.lambda_plus, self.lambda_minus

    def inner(self, u, v) -> complex:
        """``<u|v>`` for two coefficient vectors on this pair's basis."""
        return complex(np.conj(u) @ self.gram @ v)

    def reconstruct(self) -> np.ndarray:
        """``sum_i lambda_i |i><i|`` as a coefficient matrix on the basis kets."""
        up, um = self.coeffs_plus, self.coeffs_minus
        return self.lambda_plus * np.outer(up, up.conj()) + self.lambda_minus * np.outer(um, um.conj())


@dataclass(frozen=True)
class NonorthogonalEigen:
    """Same eigenvectors, expressed on the Gram-Schmidt and the original basis."""

    phi: SpectralPair
    psi: SpectralPair
    orthogonalized: Orthogonalized

    @property
    def lambda_plus(self) -> float:
        return self.phi.lambda_plus

    @property
    def lambda_minus(self) -> float:
        return self.phi.lambda_minus


def _fix_phase(vec: np.ndarray) -> tuple[np.ndarray, complex]:
    """Rotate ``vec`` so its largest-magnitude entry is real positive.

    Returns the rotated vector and the unit factor applied.
    """
    k = int(np.argmax(np.abs(vec)))
    if abs(vec[k]) == 0:
        return vec, 1.0 + 0j
    factor = complex(abs(vec[k]) / vec[k])
    out = vec * factor
    out[k] = abs(vec[k])
    return out, factor


def _split(s: float, sigma3: float, xi: float) -> tuple[float, float]:
    """``v_+, v_-`` from ``v_pm^2 = (s +- sigma3) / (2 s)``.

    The smaller square is rewritten through ``s^2 - sigma3^2 = 4 xi^2`` to
    avoid cancellation when the off-diagonal is tiny.
    """
    big = (s + abs(sigma3)) / (2 * s)
    small = 2 * xi**2 / (s * (s + abs(sigma3)))
    vp2, vm2 = (big, small) if sigma3 >= 0 else (small, big)
    return math.sqrt(vp2), math.sqrt(vm2)


def _eig_from_invariants(det: float, sigma3: float, xi: float, phase: complex):
    # s^2 = 1 - 4 det = sigma3^2 + 4 xi^2 for unit trace; hypot is the stable form
    s = min(math.hypot(sigma3, 2 * xi), 1.0)
    if s * s <= DEGENERACY_TOL:
        raise DegenerateSpectrum(f"1 - 4 det = {s * s:.3e} is below {DEGENERACY_TOL}")
    lam_p, lam_m = (1 + s) / 2, (1 - s) / 2
    vp, vm = _split(s, sigma3, xi)
    plus = np.array([vp * phase, vm], dtype=complex)
    minus = np.array([-vm * phase, vp], dtype=complex)
    return lam_p, lam_m, plus, minus


def eig_general_qubit(rho: GeneralQubitDensity) -> SpectralPair:
    """Eigen-decomposition of a general 2x2 density matrix.

    Args:
        rho: the density matrix in ``(eta, xi, tau)`` form.

    Returns:
        SpectralPair on the computational (phi) basis. Eigenvectors are
        ``(v_+ e^{i tau}, v_-)`` and ``(-v_- e^{i tau}, v_+)`` up to the global
        phase convention (largest entry real positive).

    Raises:
        DegenerateSpectrum: if ``1 - 4 det <= 1e-12``.
    """
    lam_p, lam_m, plus, minus = _eig_from_invariants(
        rho.det, rho.sigma3, rho.xi, cmath.exp(1j * rho.tau)
    )
    plus, _ = _fix_phase(plus)
    minus, _ = _fix_phase(minus)
    return SpectralPair(lam_p, lam_m, plus, minus, PHI_BASIS)


def orthogonalize(op: NonorthogonalRank2) -> Orthogonalized:
    """Matrix of ``op`` on the Gram-Schmidt basis built from ``Psi1, Psi2``.

    If ``|b + d p| < 1e-14`` the off-diagonal phase is undefined; it is set
    to 1 and ``phase_defined`` is False.
    """
    a, b, d, p = op.a, op.b, op.d, op.p
    q = op.gram_factor
    r = math.sqrt(q)
    top = a + 2 * (b * p.conjugate()).real + d * abs(p) ** 2
    off = (b + d * p) * r
    matrix = np.array([[top, off], [off.conjugate(), d * q]], dtype=complex)
    mag = abs(b + d * p)
    defined = mag >= PHASE_TOL
    phase = (b + d * p) / mag if defined else 1.0 + 0j
    det = max(q * (a * d - abs(b) ** 2), 0.0)
    sigma3 = 1 - 2 * d * q
    density = GeneralQubitDensity(
        min(max(top, 0.0), 1.0), abs(off), cmath.phase(phase) if defined else 0.0
    )
    return Orthogonalized(density, matrix, det, sigma3, phase, defined)


def eig_nonorthogonal(op: NonorthogonalRank2) -> NonorthogonalEigen:
    """Eigenpairs of ``op`` via orthogonalisation, on both bases.

    The psi-basis coefficients follow from ``Phi2 = (Psi2 - p Psi1)/sqrt(1-|p|^2)``:
    ``(c1, c2)_phi -> (c1 - p c2 / sqrt(1-|p|^2), c2 / sqrt(1-|p|^2))_psi``.
    The same global phase is applied to both representations.
    """
    orth = orthogonalize(op)
    xi = abs(op.b + op.d * op.p) * math.sqrt(op.gram_factor)
    lam_p, lam_m, plus, minus = _eig_from_invariants(orth.det, orth.sigma3, xi, orth.phase)
    r = math.sqrt(op.gram_factor)
    back = np.array([[1.0, -op.p / r], [0.0, 1.0 / r]], dtype=complex)
    phi_vecs, psi_vecs = [], []
    for vec in (plus, minus):
        fixed, factor = _fix_phase(vec)
        phi_vecs.append(fixed)
        psi_vecs.append(back @ (vec * factor))
    return NonorthogonalEigen(
        phi=SpectralPair(lam_p, lam_m, phi_vecs[0], phi_vecs[1], PHI_BASIS),
        psi=SpectralPair(lam_p, lam_m, psi_vecs[0], psi_vecs[1], PSI_BASIS, op.p),
        orthogonalized=orth,
    )


def coefficient_matrix(op: NonorthogonalRank2) -> np.ndarray:
    """Action of ``op`` on ``c1 Psi1 + c2 Psi2`` written on ``(c1, c2)``."""
    a, b, d, p = op.a, op.b, op.d, op.p
    bc, pc = b.conjugate(), p.conjugate()
    return np.array([[a + b * pc, a * p + b], [bc + d * pc, bc * p + d]], dtype=complex)


def _null_vector(m: np.ndarray, lam: float) -> np.ndarray:
    # two candidate kernel vectors of the 2x2 (m - lam); keep the better-conditioned one
    u = np.array([m[0, 1], lam - m[0, 0]])
    w = np.array([lam - m[1, 1], m[1, 0]])
    return u if np.linalg.norm(u) >= np.linalg.norm(w) else w


def eig_nonorthogonal_direct(op: NonorthogonalRank2) -> SpectralPair:
    """Eigenpairs of ``op`` from its non-Hermitian coefficient matrix.

    Eigenvectors are normalised so that
    ``|c1|^2 + |c2|^2 + 2 Re(p c1* c2) = 1``.
    """
    m = coefficient_matrix(op)
    tr = (m[0, 0] + m[1, 1]).real
    disc = ((m[0, 0] - m[1, 1]) ** 2 + 4 * m[0, 1] * m[1, 0]).real
    if disc <= DEGENERACY_TOL:
        raise DegenerateSpectrum(f"discriminant {disc:.3e} is below {DEGENERACY_TOL}")
    s = math.sqrt(disc)
    lam_p, lam_m = (tr + s) / 2, (tr - s) / 2
    gram = op.gram
    vecs = []
    for lam in (lam_p, lam_m):
        c = _null_vector(m, lam)
        if not np.any(c):
            # m - lam vanishes identically only for a scalar m, excluded above
            raise DegenerateSpectrum("coefficient matrix is scalar")
        c = c / math.sqrt((np.conj(c) @ gram @ c).real)
        vecs.append(_fix_phase(c)[0])
    return SpectralPair(lam_p, max(lam_m, 0.0), vecs[0], vecs[1], PSI_BASIS, op.p)
