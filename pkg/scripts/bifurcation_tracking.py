"""Eigenvalues emerging from the threshold under V - eps 1_[-1,1].

At a virtual level (V = 0, or the resonant well of depth pi^2/4) an
eigenvalue E ~ -c eps^2 appears for every eps > 0; at a regular threshold
(a repulsive barrier) none appears nearby.
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass
from pathlib import Path

from thresholdscope.bifurcation import DEFAULT_EPSILONS, resonant_well_depth, track_bifurcation
from thresholdscope.potentials import Potential


@dataclass
class Config:
    epsilons: tuple[float, ...] = DEFAULT_EPSILONS
    out: Path = Path("results/bifurcation")


def main(cfg: Config) -> None:
    cfg.out.mkdir(parents=True, exist_ok=True)
    W = Potential.indicator(-1.0, 1.0, 1.0)
    cases = {
        "free": Potential.zero(),
        "resonant_well": Potential.indicator(-1.0, 1.0, -resonant_well_depth()),
        "barrier": Potential.indicator(-1.0, 1.0, 1.0),
    }
    for name, V in cases.items():
        path = track_bifurcation(V, W, 0.0, cfg.epsilons)
        if path.law_fit is None:
            print(f"{name:14s} regular threshold; eigenvalue counts near 0: {path.absent_counts}")
            continue
        (cfg.out / f"{name}.csv").write_text(path.to_csv())
        print(f"{name:14s} |E| ~ {path.law_fit[1]:.4f} eps^{path.law_fit[0]:.4f}")
        for eps, E in zip(path.epsilons, path.eigenvalues):
            print(f"    eps={eps:<8g} E={E.real:.6e}{E.imag:+.1e}i")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Config.out)
    main(Config(out=ap.parse_args().out))
