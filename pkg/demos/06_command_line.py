"""
The sigscore command line
=========================

Write two small PNG folders and run each subcommand on them.
"""

import tempfile
from pathlib import Path

from sigscore.cli import main
from sigscore.textures import save_pngs, texture_family

work = Path(tempfile.mkdtemp(prefix="sigscore-demo-"))
save_pngs(texture_family("blobs", 40, 64, seed=1), work / "original")
save_pngs(texture_family("blobs", 40, 64, seed=2), work / "synthetic")
dirs = ["--original", str(work / "original"), "--synthetic", str(work / "synthetic")]

# same as: sigscore score --original DIR --synthetic DIR --pretty
main(["score", *dirs, "--pretty"])
main(["stats", *dirs, "--pretty"])
main(["spectrum", *dirs, "--size", "16", "--out", str(work / "spectrum.csv")])
main(["embed", *dirs, "--size", "32", "--perplexity", "20", "--out", str(work / "embed.csv")])
main(["cluster", *dirs, "--k", "2", "--out", str(work / "clusters.csv")])

for name in ("spectrum.csv", "embed.csv", "embed.meta.json", "clusters.csv"):
    print(name, "->", (work / name).read_text().splitlines()[:2])
print("outputs in", work)
