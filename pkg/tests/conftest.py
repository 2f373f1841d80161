import itertools

import numpy as np
import pytest

from sigscore.tensor_algebra import TruncatedTensor


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_tensor(rng, dim, order, scalar=None, scale=1.0):
    levels = [np.array([rng.uniform(-scale, scale) if scalar is None else scalar])]
    levels += [rng.uniform(-scale, scale, dim ** k) for k in range(1, order + 1)]
    return TruncatedTensor(dim, order, tuple(levels))


def naive_mul(a, b):
    """Word-by-word product: coefficient of w is sum over splits w = uv of a[u] * b[v]."""
    d, n = a.dim, a.order
    coeffs = {(): a.scalar * b.scalar}
    for k in range(1, n + 1):
        for word in itertools.product(range(1, d + 1), repeat=k):
            total = 0.0
            for cut in range(k + 1):
                u, v = word[:cut], word[cut:]
                au = a.scalar if not u else a[u]
                bv = b.scalar if not v else b[v]
                total += au * bv
            coeffs[word] = total
    levels = [np.array([coeffs[()]])]
    for k in range(1, n + 1):
        levels.append(np.array([coeffs[w] for w in itertools.product(range(1, d + 1), repeat=k)]))
    return TruncatedTensor(d, n, tuple(levels))


def linear_accuracy(coords, labels):
    """Best accuracy of a threshold on the Fisher discriminant direction."""
    coords = np.asarray(coords, float)
    labels = np.asarray(labels, bool)
    a, b = coords[labels], coords[~labels]
    within = np.cov(a.T) + np.cov(b.T) + 1e-12 * np.eye(coords.shape[1])
    w = np.linalg.solve(within, a.mean(0) - b.mean(0))
    proj = coords @ w
    order = np.argsort(proj)
    ordered = labels[order]
    # predict True above the cut; cut k leaves k points below
    true_above = np.r_[ordered.sum(), ordered.sum() - np.cumsum(ordered)]
    false_below = np.r_[0, np.cumsum(~ordered)]
    return float(np.max(true_above + false_below) / len(labels))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
