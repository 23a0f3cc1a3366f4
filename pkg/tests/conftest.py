import mpmath as mp
import numpy as np
import pytest

from ecs_qfi.rank2 import NonorthogonalRank2


def mp_qfi(alpha_abs, T, dps=40):
    """High-precision evaluation of the lossy-ECS closed form (independent oracle)."""
    with mp.workdps(dps):
        a = mp.mpf(alpha_abs) ** 2
        T = mp.mpf(T)
        n = a / (1 + mp.e ** (-a))
        if T == 1:
            return float(n * (2 + 2 * a - n))
        ratio = (1 - mp.e ** (-2 * a * (1 - T))) / (1 - mp.e ** (-2 * a * T))
        return float(n * T * (2 + (2 * a - n - n * ratio) * T))


def random_rank2(rng, max_overlap=0.95, min_gap=1e-3):
    """Random physical NonorthogonalRank2 with a well-separated spectrum."""
    while True:
        g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        c = g @ g.conj().T
        p = max_overlap * rng.uniform() ** 0.5 * np.exp(2j * np.pi * rng.uniform())
        trace = c[0, 0].real + c[1, 1].real + 2 * (c[0, 1] * np.conj(p)).real
        c = c / trace
        op = NonorthogonalRank2(c[0, 0].real, c[1, 1].real, c[0, 1], p)
        # 1 - 4 det of the orthogonalised matrix
        det = (1 - abs(p) ** 2) * (op.a * op.d - abs(op.b) ** 2)
        if 1 - 4 * det > min_gap:
            return op


def same_up_to_phase(u, v, gram=None):
    """Max entrywise distance between ``u`` and ``v`` after aligning the global phase."""
    gram = np.eye(len(u)) if gram is None else gram
    ov = np.conj(v) @ gram @ u
    phase = ov / abs(ov)
    return float(np.abs(u - v * phase).max())


@pytest.fixture
def rng():
    return np.random.default_rng(20130601)


# criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")
