"""Acceptance criteria, each checked at its stated tolerance and time budget.

A one-line PASS/FAIL per criterion is printed in the terminal summary.
"""

import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from ecs_qfi.ecs import EcsScenario, lossless_qfi, photon_moments, qfi_analytic
from ecs_qfi.fock import FockSpace, build_rho12_direct, build_rho12_via_environment, numeric_qfi_lossy
from ecs_qfi.limits import find_crossings
from ecs_qfi.qfi import qfi_finite_difference
from ecs_qfi.rank2 import eig_nonorthogonal, eig_nonorthogonal_direct

from .conftest import ACCEPTANCE, random_rank2, same_up_to_phase


@contextmanager
def criterion(num, budget):
    """Time the body, record pass/fail, and enforce the runtime budget."""
    detail = {"text": ""}
    start = time.perf_counter()
    try:
        yield detail
    except BaseException as exc:
        ACCEPTANCE[num] = (False, f"{type(exc).__name__}: {exc}".splitlines()[0])
        raise
    elapsed = time.perf_counter() - start
    ok = elapsed < budget
    ACCEPTANCE[num] = (ok, f"{detail['text']} [{elapsed:.3f} s / {budget} s]")
    assert ok, f"criterion {num} took {elapsed:.3f} s, budget {budget} s"


def test_criterion_1_crossings_at_alpha_2():
    expected = {"R_A": 0.03, "R_B": 0.07, "R_C": 0.52}
    with criterion(1, 1.0) as d:
        rep = find_crossings(2.0)
        found = {name: rep.crossings[name].R for name in expected}
        d["text"] = ", ".join(f"{k}={v:.6f}" for k, v in found.items())
        for name, target in expected.items():
            assert found[name] is not None
            assert abs(found[name] - target) <= 0.01, (name, found[name])


def test_criterion_2_lossless_identities():
    with criterion(2, 0.1) as d:
        worst = 0.0
        for alpha in (0.5, 1, 2, 4):
            f = lossless_qfi(alpha)
            n, n2 = photon_moments(alpha)
            rel = abs(f - (2 * n2 - n * n)) / f
            worst = max(worst, rel)
            assert rel < 1e-10
            bound = n * n + 2 * n
            # F >= bound, allowing 1e-10 relative slack
            assert f >= bound * (1 - 1e-10)
        d["text"] = f"max rel dev from 2<n^2> - n^2: {worst:.1e}"


ORACLE_T = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99, 1.0]
FD_POINTS = [(2.0, 0.5), (2.0, 0.9), (1.0, 0.3), (1.0, 0.99)]


def lossy_family(alpha, T):
    rho = build_rho12_direct(alpha, T).matrix
    n2 = FockSpace.adaptive(alpha).occupations(1)

    def family(phi):
        u = np.exp(-1j * phi * n2)
        return u[:, None] * rho * u.conj()[None, :]

    return family


def test_criterion_3_oracle_equivalence():
    with criterion(3, 60.0) as d:
        worst = 0.0
        for alpha in (0.5, 1, 2, 3):
            for T in ORACLE_T:
                f = qfi_analytic(EcsScenario(alpha, T)).F
                rel = abs(f - numeric_qfi_lossy(alpha, T)) / f
                worst = max(worst, rel)
                assert rel < 1e-6, (alpha, T, rel)
        worst_fd = 0.0
        for alpha, T in FD_POINTS:
            f = qfi_analytic(EcsScenario(alpha, T)).F
            num = numeric_qfi_lossy(alpha, T)
            fd = qfi_finite_difference(lossy_family(alpha, T), 0.3, step=1e-4, richardson=True)
            rel = max(abs(fd - f) / f, abs(fd - num) / num)
            worst_fd = max(worst_fd, rel)
            assert rel < 1e-5, (alpha, T, rel)
        d["text"] = f"44 grid points, max rel {worst:.1e}; finite difference max rel {worst_fd:.1e}"


def test_criterion_4_shot_noise_tolerance():
    with criterion(4, 1.0) as d:
        s = EcsScenario(2, 0.5)
        n, a = s.n_bar, s.intensity
        excess = qfi_analytic(s).F - n
        assert excess > 0
        assert excess == pytest.approx(n / 2 * (a - n), rel=1e-12)
        grid = np.round(np.arange(520, 1001) / 1000, 12)
        margins = [qfi_analytic(EcsScenario(2, T)).F - n for T in grid]
        assert min(margins) >= 0
        d["text"] = f"F(0.5) - n = {excess:.6f}; min margin on T >= 0.52: {min(margins):.3e}"


def test_criterion_5_dual_route_spectra():
    rng = np.random.default_rng(5)
    with criterion(5, 5.0) as d:
        worst = np.zeros(3)
        for _ in range(1000):
            op = random_rank2(rng)
            a, b = eig_nonorthogonal(op), eig_nonorthogonal_direct(op)
            eig = max(abs(a.lambda_plus - b.lambda_plus), abs(a.lambda_minus - b.lambda_minus))
            vec = max(
                same_up_to_phase(a.psi.coeffs_plus, b.coeffs_plus, op.gram),
                same_up_to_phase(a.psi.coeffs_minus, b.coeffs_minus, op.gram),
            )
            rec = max(
                np.abs(a.phi.reconstruct() - a.orthogonalized.matrix).max(),
                np.abs(a.psi.reconstruct() - op.coefficients).max(),
                np.abs(b.reconstruct() - op.coefficients).max(),
            )
            worst = np.maximum(worst, [eig, vec, rec])
            assert eig < 1e-9 and vec < 1e-9 and rec < 1e-12
        d["text"] = "max eigenvalue/eigenvector/reconstruction error {:.1e}/{:.1e}/{:.1e}".format(*worst)


def test_criterion_6_state_construction_duality():
    with criterion(6, 30.0) as d:
        worst = 0.0
        for alpha in (1, 2):
            for T in (0.3, 0.5, 0.8):
                diff = np.abs(build_rho12_via_environment(alpha, T).matrix - build_rho12_direct(alpha, T).matrix).max()
                worst = max(worst, diff)
                assert diff < 1e-10, (alpha, T, diff)
        d["text"] = f"max entrywise difference {worst:.1e}"


def test_criterion_7_truncation_at_fifteen():
    # tail beyond 15 photons at mean 4 is ~5e-6, so the default tail guard is relaxed
    space = FockSpace(15, 2, tail_tolerance=1e-4)
    with criterion(7, 5.0) as d:
        worst = 0.0
        for T in (0.1, 0.3, 0.5, 0.7, 0.8, 0.9, 0.99, 1.0):
            f = qfi_analytic(EcsScenario(2, T)).F
            rel = abs(numeric_qfi_lossy(2, T, space) - f) / f
            worst = max(worst, rel)
            assert rel < 1e-4, (T, rel)
        assert not math.isnan(worst)
        d["text"] = f"n_max=15, max rel error {worst:.1e}"
