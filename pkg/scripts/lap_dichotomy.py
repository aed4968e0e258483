"""Weighted resolvent norms near the threshold for free, barrier and 3D radial kernels."""

from __future__ import annotations

import argparse
from dataclasses import dataclass
from pathlib import Path

from thresholdscope.lapnorm import WeightPair, default_path, lap_sweep


@dataclass
class Config:
    s: float = 1.1
    L: float = 60.0
    points: int = 600
    kmax: int = 8
    out: Path = Path("results/lap_dichotomy")


def main(cfg: Config) -> None:
    cfg.out.mkdir(parents=True, exist_ok=True)
    w = WeightPair(cfg.s, cfg.s)
    path = default_path(0.0, range(1, cfg.kmax + 1))
    for name, family in (("free1d", "free1d"), ("barrier1d", ("barrier1d", 1.0)), ("radial3d", "radial3d")):
        sw = lap_sweep(family, w, path, L=cfg.L, n=cfg.points)
        (cfg.out / f"{name}.csv").write_text(sw.to_csv())
        print(f"{name:10s} {sw.classification:24s} slope {sw.fit_exponent:+.3f}  norms " + " ".join(f"{v:.4g}" for v in sw.norms))


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kmax", type=int, default=Config.kmax)
    ap.add_argument("--points", type=int, default=Config.points)
    ap.add_argument("--out", type=Path, default=Config.out)
    a = ap.parse_args()
    main(Config(kmax=a.kmax, points=a.points, out=a.out))
