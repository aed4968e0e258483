"""Ground state of a shallow square well: E_g / g^2 -> -1 as g -> 0."""

from __future__ import annotations

import argparse
import csv
from dataclasses import dataclass, field
from pathlib import Path

from thresholdscope.bifurcation import power_law_fit, shallow_well_eigenvalue


@dataclass
class Config:
    depths: list[float] = field(default_factory=lambda: [0.3, 0.1, 3e-2, 1e-2, 3e-3, 1e-3, 1e-4])
    out: Path = Path("results/shallow_well.csv")


def main(cfg: Config) -> None:
    cfg.out.parent.mkdir(parents=True, exist_ok=True)
    Es = [shallow_well_eigenvalue(g).real for g in cfg.depths]
    with open(cfg.out, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["g", "E", "E_over_g2"])
        for g, E in zip(cfg.depths, Es):
            wr.writerow([g, E, E / g**2])
            print(f"g={g:<8g} E={E:.6e}  E/g^2={E / g**2:.6f}")
    slope, pref = power_law_fit(cfg.depths[-3:], Es[-3:])
    print(f"log-log slope over the three smallest depths: {slope:.4f} (prefactor {pref:.4f})")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Config.out)
    main(Config(out=ap.parse_args().out))
