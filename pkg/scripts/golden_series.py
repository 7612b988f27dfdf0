"""Print the Σ(2,3,7) series from the engine and the Brieskorn oracle side by side.

    python scripts/golden_series.py --lattice A2 --qmax 17
"""

import argparse
import time
from dataclasses import dataclass
from fractions import Fraction

from plumbseries.assignments import parse_assignment
from plumbseries.laurent import canonical_text
from plumbseries.lattice import build_lattice
from plumbseries.oracles import brieskorn_series
from plumbseries.plumbing import star
from plumbseries.series import Tau, Truncation, leading_shift, y_closed
from plumbseries.spinc import spinc_classes
from plumbseries.theorems import compare


@dataclass(frozen=True)
class GoldenConfig:
    lattice: str = "A1"
    xi: str = "identity"
    qmax: int = 96
    workers: int = 1


def run(cfg: GoldenConfig) -> bool:
    lattice = build_lattice(cfg.lattice)
    tree = star(-1, [[-2], [-3], [-7]])
    xi = parse_assignment(cfg.xi, tree, lattice)
    tau = Tau(lattice, spinc_classes(tree, lattice)[0], xi)
    q_max = leading_shift(tree, tau) + Fraction(cfg.qmax)

    start = time.perf_counter()
    engine = y_closed(tree, tau, Truncation(q_max=q_max, workers=cfg.workers))
    mid = time.perf_counter()
    oracle = brieskorn_series([-1, [-2], [-3], [-7]], lattice, list(xi.values), q_max)
    end = time.perf_counter()

    print(f"engine ({mid - start:.2f}s): {canonical_text(engine)}")
    print(f"oracle ({end - mid:.2f}s): {canonical_text(oracle)}")
    verdict = compare(engine, oracle).verdict
    print("verdict:", verdict)
    return verdict == "equal"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lattice", default=GoldenConfig.lattice)
    ap.add_argument("--xi", default=GoldenConfig.xi)
    ap.add_argument("--qmax", type=int, default=GoldenConfig.qmax)
    ap.add_argument("--workers", type=int, default=GoldenConfig.workers)
    args = ap.parse_args()
    raise SystemExit(0 if run(GoldenConfig(**vars(args))) else 1)


if __name__ == "__main__":
    main()
