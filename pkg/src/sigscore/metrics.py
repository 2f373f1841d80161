"""Element-wise mean signatures and the RMSE/MAE scores built on them."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ._parallel import ordered_map
from .signature import as_stream, flatten, sig_dim, stream_signature
from .tensor_algebra import ContractError, tensor_log

__all__ = [
    "KINDS",
    "MeanSignature",
    "ScoreReport",
    "CompensatedSum",
    "mean_signature",
    "mean_signatures",
    "score",
    "score_streams",
    "spectrum_export",
    "component_word",
    "score_means",
    "read_spectrum",
]

KINDS = ("signature", "log_signature")


class CompensatedSum:
    """Vectorised Neumaier summation of equally shaped arrays."""

    def __init__(self, size: int):
        self.total = np.zeros(size)
        self.comp = np.zeros(size)
        self.count = 0

    def add(self, x: np.ndarray):
        t = self.total + x
        big = np.abs(self.total) >= np.abs(x)
        self.comp += np.where(big, (self.total - t) + x, (x - t) + self.total)
        self.total = t
        self.count += 1

    def value(self) -> np.ndarray:
        return self.total + self.comp


@dataclass(frozen=True, eq=False)
class MeanSignature:
    kind: str
    dim: int
    order: int
    values: np.ndarray
    sample_count: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ContractError(f"unknown kind {self.kind!r}")
        vals = np.array(self.values, dtype=np.float64).reshape(-1)
        if vals.size != sig_dim(self.dim, self.order):
            raise ContractError(
                f"{vals.size} values for dim={self.dim}, order={self.order}; "
                f"expected {sig_dim(self.dim, self.order)}")
        if self.sample_count < 1:
            raise ContractError("sample_count must be >= 1")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def word(self, index: int) -> tuple[int, ...]:
        return component_word(index, self.dim)

    def _check_matches(self, other: "MeanSignature"):
        if (self.kind, self.dim, self.order) != (other.kind, other.dim, other.order):
            raise ContractError(
                f"cannot compare {self.kind}(d={self.dim}, N={self.order}) with "
                f"{other.kind}(d={other.dim}, N={other.order})")


def component_word(index: int, dim: int) -> tuple[int, ...]:
    """1-based word for a 0-based position in a flattened signature."""
    k = 1
    while index >= dim ** k:
        index -= dim ** k
        k += 1
    word = []
    for _ in range(k):
        index, r = divmod(index, dim)
        word.append(r + 1)
    return tuple(reversed(word))


def _check_dims(streams) -> int:
    if not streams:
        raise ContractError("need at least one stream")
    dims = {s.dim for s in streams}
    if len(dims) != 1:
        raise ContractError(f"streams have mixed dimensions {sorted(dims)}")
    return dims.pop()


def mean_signatures(streams: Iterable, order: int = 3,
                    kinds: Sequence[str] = KINDS,
                    threads: int | None = None) -> dict[str, MeanSignature]:
    """Mean signature and/or log-signature of a sample set in one pass.

    Each stream's signature is computed once and reused for its logarithm.
    Per-stream work may run on ``threads`` workers; the reduction is always a
    sequential compensated sum in input order, so the result does not depend
    on the thread count.
    """
    streams = [as_stream(s) for s in streams]
    d = _check_dims(streams)
    for kind in kinds:
        if kind not in KINDS:
            raise ContractError(f"unknown kind {kind!r}")

    def work(s):
        sig = stream_signature(s, order)
        out = {}
        if "signature" in kinds:
            out["signature"] = flatten(sig)
        if "log_signature" in kinds:
            out["log_signature"] = flatten(tensor_log(sig))
        return out

    size = sig_dim(d, order)
    sums = {kind: CompensatedSum(size) for kind in kinds}
    for vecs in ordered_map(work, streams, threads):
        for kind, v in vecs.items():
            sums[kind].add(v)
    m = len(streams)
    return {kind: MeanSignature(kind, d, order, acc.value() / m, m)
            for kind, acc in sums.items()}


def mean_signature(streams: Iterable, order: int = 3, kind: str = "signature",
                   threads: int | None = None) -> MeanSignature:
    return mean_signatures(streams, order, (kind,), threads)[kind]


def score(original: MeanSignature, synthetic: MeanSignature) -> tuple[float, float]:
    """``(rmse, mae)`` between two mean signatures over all components."""
    original._check_matches(synthetic)
    diff = synthetic.values - original.values
    n = diff.size
    rmse = math.sqrt(math.fsum(diff * diff) / n)
    mae = math.fsum(np.abs(diff)) / n
    return rmse, mae


@dataclass
class ScoreReport:
    rmse_sig: float
    mae_sig: float
    rmse_logsig: float
    mae_logsig: float
    order: int
    dim: int
    sample_counts: tuple[int, int]
    preprocessing: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "rmse_sig": self.rmse_sig,
            "mae_sig": self.mae_sig,
            "rmse_logsig": self.rmse_logsig,
            "mae_logsig": self.mae_logsig,
            "order": self.order,
            "dim": self.dim,
            "sample_counts": {"original": self.sample_counts[0],
                              "synthetic": self.sample_counts[1]},
            "preprocessing": dict(self.preprocessing),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "ScoreReport":
        counts = d["sample_counts"]
        return cls(d["rmse_sig"], d["mae_sig"], d["rmse_logsig"], d["mae_logsig"],
                   d["order"], d["dim"], (counts["original"], counts["synthetic"]),
                   d.get("preprocessing", {}))

    def pretty(self) -> str:
        rows = [("RMSE Signature", self.rmse_sig), ("MAE Signature", self.mae_sig),
                ("RMSE log-signature", self.rmse_logsig),
                ("MAE log-signature", self.mae_logsig)]
        lines = [f"order {self.order}, dim {self.dim}, "
                 f"samples {self.sample_counts[0]} vs {self.sample_counts[1]}"]
        lines += [f"{name:<20} {value:.6g}" for name, value in rows]
        return "\n".join(lines) + "\n"


def score_means(original: dict[str, MeanSignature], synthetic: dict[str, MeanSignature],
                preprocessing: dict | None = None) -> ScoreReport:
    rs, ms = score(original["signature"], synthetic["signature"])
    rl, ml = score(original["log_signature"], synthetic["log_signature"])
    ref = original["signature"]
    return ScoreReport(rs, ms, rl, ml, ref.order, ref.dim,
                       (ref.sample_count, synthetic["signature"].sample_count),
                       preprocessing or {})


def score_streams(original: Iterable, synthetic: Iterable, order: int = 3,
                  threads: int | None = None,
                  preprocessing: dict | None = None) -> ScoreReport:
    """All four scores between two sample sets of streams."""
    a = mean_signatures(original, order, threads=threads)
    b = mean_signatures(synthetic, order, threads=threads)
    return score_means(a, b, preprocessing)


def spectrum_export(ms_original: MeanSignature, ms_synthetic: MeanSignature, path) -> Path:
    """Write ``index,original,synthetic`` rows, one per component (1-based index).

    Values use Python's shortest round-trip float repr, so the file is
    reproducible byte for byte.
    """
    ms_original._check_matches(ms_synthetic)
    path = Path(path)
    lines = ["index,original,synthetic\n"]
    lines += [f"{i},{a!r},{b!r}\n" for i, (a, b) in enumerate(
        zip(ms_original.values.tolist(), ms_synthetic.values.tolist()), start=1)]
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.writelines(lines)
    except OSError as exc:
        raise OSError(f"cannot write spectrum to {path}: {exc.strerror or exc}") from exc
    return path


def read_spectrum(path) -> tuple[np.ndarray, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 1], data[:, 2]
