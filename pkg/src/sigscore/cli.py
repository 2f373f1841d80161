"""``sigscore`` command line.

Subcommands: ``score``, ``stats``, ``spectrum``, ``embed`` and ``cluster``.
Reports are JSON by default; ``--pretty`` prints a table instead.  Exit code
0 means the computation finished; a rejected hypothesis is a result, not a
failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from ._parallel import THREADS_ENV
from .embed import kmeans, pca2, pca_adaptive_tsne, write_points_csv
from .ingest import ImageSet, load_directory
from .metrics import mean_signatures, score_means, spectrum_export
from .stats import run_pipeline
from .tensor_algebra import ContractError

log = logging.getLogger("sigscore")

COMMANDS = ("score", "stats", "spectrum", "embed", "cluster")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    original_dir: Path
    synthetic_dir: Path | None = None
    order: int = 3
    size: int = 64
    alpha: float = 0.05
    perplexity: float = 30.0
    iterations: int = 1000
    variance_target: float = 0.99
    k: int | None = None
    seed: int = 0
    output: Path | None = None
    column_mode: bool = False
    kind: str = "signature"
    threads: int | None = None
    skip_corrupt: bool = False
    pretty: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.order < 1:
            raise UsageError(f"--order must be >= 1, got {self.order}")
        if self.size < 2:
            raise UsageError(f"--size must be >= 2, got {self.size}")
        if not 0.0 < self.alpha < 1.0:
            raise UsageError(f"--alpha must lie in (0, 1), got {self.alpha}")
        if self.threads is not None and self.threads < 0:
            raise UsageError("--threads must be >= 0")
        if self.command != "cluster" and self.synthetic_dir is None:
            raise UsageError(f"{self.command} needs --synthetic")
        if self.command == "cluster" and (self.k is None or self.k < 1):
            raise UsageError("cluster needs --k >= 1")
        if self.command in ("spectrum", "embed", "cluster") and self.output is None:
            raise UsageError(f"{self.command} needs --out")

    @property
    def preprocessing(self) -> dict:
        return {"size": self.size, "grayscale": True, "column_mode": self.column_mode,
                "resize": "bilinear"}

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "RunConfig":
        return cls(
            command=ns.command,
            original_dir=Path(ns.original),
            synthetic_dir=Path(ns.synthetic) if getattr(ns, "synthetic", None) else None,
            order=getattr(ns, "order", 3),
            size=ns.size,
            alpha=getattr(ns, "alpha", 0.05),
            perplexity=getattr(ns, "perplexity", 30.0),
            iterations=getattr(ns, "iterations", 1000),
            variance_target=getattr(ns, "variance_target", 0.99),
            k=getattr(ns, "k", None),
            seed=getattr(ns, "seed", 0),
            output=Path(ns.out) if ns.out else None,
            column_mode=getattr(ns, "column_mode", False),
            kind=getattr(ns, "kind", "signature"),
            threads=ns.threads,
            skip_corrupt=ns.skip_corrupt,
            pretty=getattr(ns, "pretty", False),
        )


def _load(directory: Path, cfg: RunConfig, what: str) -> ImageSet:
    images = load_directory(directory, cfg.size, cfg.skip_corrupt, cfg.threads)
    if len(images) == 0:
        raise UsageError(f"no readable PNG/JPEG images in {what} directory {directory}")
    log.info("loaded %d %s images from %s", len(images), what, directory)
    return images


def _emit(text: str, output: Path | None):
    if output is None:
        sys.stdout.write(text)
    else:
        output.write_text(text, encoding="utf-8")


def cmd_score(cfg: RunConfig) -> int:
    orig = _load(cfg.original_dir, cfg, "original")
    synth = _load(cfg.synthetic_dir, cfg, "synthetic")
    a = mean_signatures(orig.streams(cfg.column_mode), cfg.order, threads=cfg.threads)
    b = mean_signatures(synth.streams(cfg.column_mode), cfg.order, threads=cfg.threads)
    report = score_means(a, b, cfg.preprocessing)
    _emit(report.pretty() if cfg.pretty else report.to_json(), cfg.output)
    return 0


def cmd_stats(cfg: RunConfig) -> int:
    orig = _load(cfg.original_dir, cfg, "original")
    synth = _load(cfg.synthetic_dir, cfg, "synthetic")
    report = run_pipeline(orig.descriptors, synth.descriptors, cfg.alpha)
    _emit(report.pretty() if cfg.pretty else report.to_json(), cfg.output)
    return 0


def cmd_spectrum(cfg: RunConfig) -> int:
    orig = _load(cfg.original_dir, cfg, "original")
    synth = _load(cfg.synthetic_dir, cfg, "synthetic")
    kinds = (cfg.kind,)
    a = mean_signatures(orig.streams(cfg.column_mode), cfg.order, kinds, cfg.threads)
    b = mean_signatures(synth.streams(cfg.column_mode), cfg.order, kinds, cfg.threads)
    spectrum_export(a[cfg.kind], b[cfg.kind], cfg.output)
    return 0


def _ids(images: ImageSet, prefix: str) -> list[str]:
    return [f"{prefix}:{rel}" for rel in images.relative_ids()]


def cmd_embed(cfg: RunConfig) -> int:
    orig = _load(cfg.original_dir, cfg, "original")
    synth = _load(cfg.synthetic_dir, cfg, "synthetic")
    data = np.vstack([orig.flat(), synth.flat()])
    emb = pca_adaptive_tsne(data, cfg.perplexity, cfg.seed, cfg.variance_target,
                            cfg.iterations)
    labels = ["original"] * len(orig) + ["synthetic"] * len(synth)
    meta = emb.metadata() | {"variance_target": cfg.variance_target,
                             "preprocessing": cfg.preprocessing}
    write_points_csv(cfg.output, _ids(orig, "original") + _ids(synth, "synthetic"),
                     emb.coords, labels, meta)
    return 0


def cmd_cluster(cfg: RunConfig) -> int:
    sets = [("original", _load(cfg.original_dir, cfg, "original"))]
    if cfg.synthetic_dir is not None:
        sets.append(("synthetic", _load(cfg.synthetic_dir, cfg, "synthetic")))
    data = np.vstack([s.flat() for _, s in sets])
    ids = [i for name, s in sets for i in _ids(s, name)]
    if cfg.k > data.shape[0]:
        raise UsageError(f"--k {cfg.k} exceeds the number of images ({data.shape[0]})")
    plane = pca2(data)
    clusters = kmeans(plane, cfg.k, cfg.seed)
    meta = {"k": cfg.k, "seed": cfg.seed, "inertia": clusters.inertia,
            "n_iter": clusters.n_iter, "centroids": clusters.centroids.tolist(),
            "preprocessing": cfg.preprocessing}
    write_points_csv(cfg.output, ids, plane, clusters.assignments.tolist(), meta)
    return 0


HANDLERS = {"score": cmd_score, "stats": cmd_stats, "spectrum": cmd_spectrum,
            "embed": cmd_embed, "cluster": cmd_cluster}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sigscore",
        description="Compare an original and a synthetic image set with signature "
                    "scores, rank statistics and 2-D embeddings.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def common(p, synthetic_required=True):
        p.add_argument("--original", required=True, metavar="DIR",
                       help="directory of original images (PNG/JPEG, searched recursively)")
        p.add_argument("--synthetic", required=synthetic_required, metavar="DIR",
                       help="directory of synthetic images")
        p.add_argument("--size", type=int, default=64,
                       help="images are resized to SIZE x SIZE grayscale (default 64)")
        p.add_argument("--out", metavar="PATH", help="output file")
        p.add_argument("--threads", type=int, default=None,
                       help=f"worker threads, 0 = one per CPU (default: ${THREADS_ENV} or 0); "
                            "never changes the numbers")
        p.add_argument("--skip-corrupt", action="store_true",
                       help="skip undecodable files instead of aborting")
        p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    def signature_opts(p):
        p.add_argument("--order", type=int, default=3, help="truncation order N (default 3)")
        p.add_argument("--column-mode", action="store_true",
                       help="use image columns instead of rows as stream points")

    p = sub.add_parser("score", help="RMSE/MAE of mean signatures and log-signatures")
    common(p)
    signature_opts(p)
    p.add_argument("--pretty", action="store_true", help="human-readable table instead of JSON")

    p = sub.add_parser("stats", help="Levene / normality / Kruskal-Wallis on mean intensity")
    common(p)
    p.add_argument("--alpha", type=float, default=0.05, help="significance level (default 0.05)")
    p.add_argument("--pretty", action="store_true", help="human-readable table instead of JSON")

    p = sub.add_parser("spectrum", help="per-component mean signature table (CSV)")
    common(p)
    signature_opts(p)
    p.add_argument("--kind", choices=("signature", "log_signature"), default="signature",
                   help="which transform to export (default signature)")

    p = sub.add_parser("embed", help="PCA-adaptive t-SNE of both sets (CSV + .meta.json)")
    common(p)
    p.add_argument("--perplexity", type=float, default=30.0, help="t-SNE perplexity (default 30)")
    p.add_argument("--iterations", type=int, default=1000, help="t-SNE iterations (default 1000)")
    p.add_argument("--variance-target", type=float, default=0.99,
                   help="PCA keeps the fewest axes explaining this fraction (default 0.99)")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")

    p = sub.add_parser("cluster", help="PCA(2) + k-means (CSV + .meta.json)")
    common(p, synthetic_required=False)
    p.add_argument("--k", type=int, required=True, help="number of clusters")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = RunConfig.from_args(ns)
    except UsageError as exc:
        parser.error(str(exc))
    try:
        return HANDLERS[cfg.command](cfg)
    except UsageError as exc:
        print(f"sigscore {cfg.command}: {exc}", file=sys.stderr)
        return 2
    except (ContractError, OSError, ArithmeticError) as exc:
        print(f"sigscore {cfg.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
