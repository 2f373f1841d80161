"""PCA-adaptive t-SNE and PCA(2) + k-means views of an image set.

Everything stochastic draws from ``numpy.random.default_rng(seed)``, so a
given seed reproduces the same layout and clustering.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from .tensor_algebra import ContractError

__all__ = [
    "PCAResult",
    "Embedding",
    "Clustering",
    "TSNEResult",
    "explained_variance_ratios",
    "pca_adaptive",
    "pca2",
    "kmeans",
    "kmeans_plus_plus",
    "conditional_probabilities",
    "joint_probabilities",
    "tsne",
    "pca_adaptive_tsne",
    "write_points_csv",
]

MACHINE_EPS = np.finfo(np.float64).eps


class PCAResult(NamedTuple):
    projected: np.ndarray
    q: int
    explained: float


def _svd(data) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    x = np.asarray(data, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 2:
        raise ContractError(f"PCA needs an (n >= 2, p) matrix, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ContractError("PCA input contains non-finite values")
    centered = x - x.mean(axis=0)
    u, s, vt = np.linalg.svd(centered, full_matrices=False)
    # sign convention: largest |loading| of each axis is positive
    flip = np.sign(vt[np.arange(vt.shape[0]), np.argmax(np.abs(vt), axis=1)])
    flip[flip == 0] = 1.0
    u *= flip
    vt *= flip[:, None]
    rank_tol = s[0] * max(x.shape) * MACHINE_EPS if s.size else 0.0
    s = np.where(s > rank_tol, s, 0.0)
    return u, s, vt


def explained_variance_ratios(data) -> np.ndarray:
    """Fraction of total variance carried by each principal axis, descending."""
    _, s, _ = _svd(data)
    var = s ** 2
    total = var.sum()
    if total == 0.0:
        raise ContractError("data has zero variance; nothing to embed")
    return var / total


def pca_adaptive(data, variance_target: float = 0.99) -> PCAResult:
    """Project onto the fewest principal axes whose cumulative variance reaches the target."""
    if not 0.0 < variance_target <= 1.0:
        raise ContractError(f"variance_target must lie in (0, 1], got {variance_target}")
    u, s, _ = _svd(data)
    var = s ** 2
    total = var.sum()
    if total == 0.0:
        raise ContractError("data has zero variance; nothing to embed (q = 0)")
    cum = np.cumsum(var) / total
    q = int(np.searchsorted(cum, variance_target - 1e-12) + 1)
    q = min(q, int(np.count_nonzero(s)))
    return PCAResult(u[:, :q] * s[:q], q, float(min(cum[q - 1], 1.0)))


def pca2(data) -> np.ndarray:
    """First two principal coordinates; missing axes (rank < 2) are zero."""
    u, s, _ = _svd(data)
    out = np.zeros((u.shape[0], 2))
    q = min(2, s.size)
    out[:, :q] = u[:, :q] * s[:q]
    return out


@dataclass
class Clustering:
    assignments: np.ndarray
    centroids: np.ndarray
    inertia: float
    k: int
    n_iter: int = 0
    init_inertia: float = float("nan")
    history: list[float] = field(default_factory=list)


def _sq_dists(x: np.ndarray, c: np.ndarray) -> np.ndarray:
    d = (np.sum(x * x, axis=1)[:, None] - 2.0 * x @ c.T + np.sum(c * c, axis=1)[None, :])
    return np.maximum(d, 0.0)


def _assign(x: np.ndarray, c: np.ndarray) -> tuple[np.ndarray, float]:
    d = _sq_dists(x, c)
    labels = np.argmin(d, axis=1)
    # exact inertia from explicit differences, not the expanded form
    inertia = float(np.sum((x - c[labels]) ** 2))
    return labels, inertia


def kmeans_plus_plus(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    centers = [x[rng.integers(n)]]
    closest = np.sum((x - centers[0]) ** 2, axis=1)
    for _ in range(1, k):
        total = closest.sum()
        if total == 0.0:
            idx = rng.integers(n)
        else:
            idx = int(np.searchsorted(np.cumsum(closest), rng.random() * total, side="right"))
            idx = min(idx, n - 1)
        centers.append(x[idx])
        closest = np.minimum(closest, np.sum((x - x[idx]) ** 2, axis=1))
    return np.array(centers)


def kmeans(data, k: int, seed: int = 0, max_iter: int = 300, tol: float = 1e-4) -> Clustering:
    """Lloyd's algorithm from a k-means++ start.

    Stops once no centroid moves more than ``tol`` or after ``max_iter``
    rounds.  ``history`` holds the inertia after every assignment step, which
    Lloyd's algorithm guarantees never increases.
    """
    x = np.asarray(data, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    n = x.shape[0]
    if not 1 <= k <= n:
        raise ContractError(f"k must satisfy 1 <= k <= n = {n}, got {k}")
    rng = np.random.default_rng(seed)
    centroids = kmeans_plus_plus(x, k, rng)
    labels, inertia = _assign(x, centroids)
    init_inertia = inertia
    history = [inertia]
    it = 0
    for it in range(1, max_iter + 1):
        new = centroids.copy()
        for j in range(k):
            members = x[labels == j]
            if len(members):
                new[j] = members.mean(axis=0)
        shift = float(np.max(np.linalg.norm(new - centroids, axis=1)))
        centroids = new
        labels, inertia = _assign(x, centroids)
        history.append(inertia)
        if shift < tol:
            break
    return Clustering(labels, centroids, inertia, k, it, init_inertia, history)


def _entropy_and_probs(dist_row: np.ndarray, beta: float) -> tuple[float, np.ndarray]:
    shifted = dist_row - dist_row.min()
    p = np.exp(-shifted * beta)
    total = p.sum()
    h = np.log(total) + beta * np.dot(shifted, p) / total
    return h, p / total


def conditional_probabilities(data, perplexity: float = 30.0, tol: float = 1e-5,
                              max_steps: int = 200) -> tuple[np.ndarray, np.ndarray]:
    """Row-stochastic Gaussian affinities with per-row bandwidth set by bisection.

    Each row's precision ``beta`` is searched until the entropy (nats) is
    within ``tol`` of ``log(perplexity)``.  Returns ``(P, beta)``.
    """
    x = np.asarray(data, dtype=np.float64)
    n = x.shape[0]
    sq = np.sum(x * x, axis=1)
    dist = np.maximum(sq[:, None] - 2.0 * x @ x.T + sq[None, :], 0.0)
    target = np.log(perplexity)
    p = np.zeros((n, n))
    betas = np.ones(n)
    for i in range(n):
        row = np.delete(dist[i], i)
        beta, lo, hi = 1.0, 0.0, np.inf
        h, pi = _entropy_and_probs(row, beta)
        for _ in range(max_steps):
            diff = h - target
            if abs(diff) < tol:
                break
            if diff > 0:
                lo = beta
                beta = beta * 2.0 if hi == np.inf else 0.5 * (beta + hi)
            else:
                hi = beta
                beta = beta / 2.0 if lo == 0.0 else 0.5 * (beta + lo)
            h, pi = _entropy_and_probs(row, beta)
        p[i, np.arange(n) != i] = pi
        betas[i] = beta
    return p, betas


def joint_probabilities(data, perplexity: float = 30.0) -> np.ndarray:
    p, _ = conditional_probabilities(data, perplexity)
    joint = (p + p.T) / (2.0 * p.shape[0])
    return np.maximum(joint, 1e-12)


def _check_perplexity(n: int, perplexity: float):
    if n < 5:
        raise ContractError(f"t-SNE needs at least 5 points, got {n}")
    if not 0 < perplexity < (n - 1) / 3.0:
        raise ContractError(
            f"perplexity {perplexity} infeasible for {n} points (need < {(n - 1) / 3.0:.4g})")


@dataclass
class TSNEResult:
    coords: np.ndarray
    kl: float
    kl_history: list[tuple[int, float]]


def _tie_groups(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """First-occurrence index of each distinct row, and each row's group id."""
    _, first, inverse = np.unique(x, axis=0, return_index=True, return_inverse=True)
    order = np.argsort(first)
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size)
    return first[order], rank[inverse.reshape(-1)]


def tsne(data, perplexity: float = 30.0, iterations: int = 1000, seed: int = 0,
         learning_rate: float = 200.0, early_exaggeration: float = 12.0,
         exaggeration_iters: int = 250, momentum: tuple[float, float] = (0.5, 0.8),
         init_std: float = 1e-4, kl_every: int = 10) -> TSNEResult:
    """Exact t-SNE to two dimensions.

    Plain gradient descent with momentum and per-coordinate adaptive gains;
    the affinities are multiplied by ``early_exaggeration`` for the first
    ``exaggeration_iters`` steps, and the momentum switches from
    ``momentum[0]`` to ``momentum[1]`` at the same point.  The layout is
    re-centred every step.  The KL divergence (against the unexaggerated
    affinities) is recorded every ``kl_every`` steps.

    Identical input rows start at the same point.  Their mutual force is then
    zero and every other force on them agrees, so they stay together; the
    descent is therefore run once per distinct row, weighted by multiplicity,
    which is the same trajectory without round-off pulling twins apart.
    """
    x = np.asarray(data, dtype=np.float64)
    n = x.shape[0]
    _check_perplexity(n, perplexity)
    p = joint_probabilities(x, perplexity)
    np.fill_diagonal(p, 0.0)
    p_safe = np.maximum(p, 1e-12)

    reps, group = _tie_groups(x)
    g = reps.size
    mult = np.bincount(group, minlength=g).astype(np.float64)
    # affinity of one member of each group to every other group
    pg = np.zeros((g, g))
    np.add.at(pg.T, group, p[reps].T)
    np.fill_diagonal(pg, 0.0)
    twin_pairs = float(np.sum(mult * (mult - 1.0)))

    rng = np.random.default_rng(seed)
    y = (init_std * rng.standard_normal((n, 2)))[reps]
    y -= mult @ y / n
    velocity = np.zeros_like(y)
    gains = np.ones_like(y)
    history = []
    kl = float("nan")
    for it in range(iterations):
        exaggerate = it < exaggeration_iters
        mom = momentum[0] if exaggerate else momentum[1]
        pe = pg * early_exaggeration if exaggerate else pg
        sq = np.sum(y * y, axis=1)
        num = 1.0 / (1.0 + np.maximum(sq[:, None] - 2.0 * y @ y.T + sq[None, :], 0.0))
        np.fill_diagonal(num, 0.0)
        z = mult @ num @ mult + twin_pairs
        q = np.maximum(num / z, 1e-12)
        w = (pe - q * mult[None, :]) * num
        grad = 4.0 * (np.sum(w, axis=1)[:, None] * y - w @ y)
        same = (grad > 0) == (velocity > 0)
        gains = np.where(same, gains * 0.8, gains + 0.2)
        np.maximum(gains, 0.01, out=gains)
        velocity = mom * velocity - learning_rate * gains * grad
        y = y + velocity
        y -= mult @ y / n
        if (it + 1) % kl_every == 0 or it == iterations - 1:
            kl = _kl(p_safe, y[group])
            history.append((it + 1, kl))
    return TSNEResult(y[group], kl, history)


def _kl(p_safe: np.ndarray, y: np.ndarray) -> float:
    sq = np.sum(y * y, axis=1)
    num = 1.0 / (1.0 + np.maximum(sq[:, None] - 2.0 * y @ y.T + sq[None, :], 0.0))
    off = ~np.eye(p_safe.shape[0], dtype=bool)
    num[~off] = 0.0
    q = np.maximum(num / num.sum(), 1e-12)
    pv, qv = p_safe[off], q[off]
    return float(np.sum(pv * np.log(pv / qv)))


@dataclass
class Embedding:
    coords: np.ndarray
    pca_components_kept: int
    variance_explained: float
    final_kl: float
    seed: int
    perplexity: float = 30.0
    iterations: int = 1000
    kl_history: list = field(default_factory=list)

    def metadata(self) -> dict:
        return {
            "pca_components_kept": self.pca_components_kept,
            "variance_explained": self.variance_explained,
            "final_kl": self.final_kl,
            "seed": self.seed,
            "perplexity": self.perplexity,
            "iterations": self.iterations,
            "n_points": int(self.coords.shape[0]),
        }


def pca_adaptive_tsne(images, perplexity: float = 30.0, seed: int = 0,
                      variance_target: float = 0.99, iterations: int = 1000,
                      **tsne_kwargs) -> Embedding:
    """Flatten, keep the principal axes covering ``variance_target``, then t-SNE."""
    x = np.asarray(images, dtype=np.float64)
    x = x.reshape(x.shape[0], -1)
    _check_perplexity(x.shape[0], perplexity)
    reduced = pca_adaptive(x, variance_target)
    # identical images must project to identical rows; SVD round-off need not agree
    reps, group = _tie_groups(x)
    result = tsne(reduced.projected[reps][group], perplexity=perplexity, iterations=iterations,
                  seed=seed, **tsne_kwargs)
    return Embedding(result.coords, reduced.q, reduced.explained, result.kl, seed,
                     perplexity, iterations, result.kl_history)


def write_points_csv(path, ids: Sequence[str], coords: np.ndarray,
                     labels: Sequence, metadata: dict | None = None) -> Path:
    """``id,x,y,label`` rows plus an optional ``<stem>.meta.json`` sidecar."""
    path = Path(path)
    if len(ids) != len(coords) or len(labels) != len(coords):
        raise ContractError("ids, coords and labels must have the same length")
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["id", "x", "y", "label"])
            for i, (x, y), lab in zip(ids, coords.tolist(), labels):
                writer.writerow([i, repr(x), repr(y), lab])
        if metadata is not None:
            sidecar = path.with_suffix(".meta.json")
            sidecar.write_text(json.dumps(metadata, indent=2, sort_keys=True) + "\n",
                               encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path
