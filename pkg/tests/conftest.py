import numpy as np
import pytest

from binrrr.model import Responses

ACCEPTANCE_LINES = []


def record(criterion: str, ok: bool, detail: str) -> bool:
    line = f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def record_skip(criterion: str, reason: str) -> None:
    line = f"[SKIP] {criterion}: {reason}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def central_diff(f, M, eps=1e-5):
    """Five-point central differences of a scalar function of a matrix."""
    M = np.asarray(M, dtype=np.float64)
    G = np.zeros_like(M)
    for idx in np.ndindex(M.shape):
        vals = []
        for k in (-2, -1, 1, 2):
            Mk = M.copy()
            Mk[idx] += k * eps
            vals.append(f(Mk))
        G[idx] = (vals[0] - 8 * vals[1] + 8 * vals[2] - vals[3]) / (12 * eps)
    return G


def rel_err(a, b):
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300))


def random_instance(rng, n=4, p=3, q=2, missing=0.0):
    X = rng.standard_normal((n, p))
    M = rng.standard_normal((p, q))
    Y = np.where(rng.random((n, q)) < 0.5, 1, -1)
    mask = rng.random((n, q)) >= missing
    mask.flat[rng.integers(n * q)] = True
    return M, X, Responses(Y, mask)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
