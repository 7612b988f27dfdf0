"""Sweep seeded Neumann-move fixtures and tally transport verdicts per move kind."""

import argparse
from collections import Counter
from dataclasses import dataclass

from plumbseries.fixtures import move_fixtures
from plumbseries.lattice import build_lattice
from plumbseries.series import Truncation, y_closed
from plumbseries.theorems import compare, transport

KINDS = ("A+", "A-", "B+", "B-", "C")


@dataclass(frozen=True)
class SweepConfig:
    seed: int = 7
    per_kind: int = 20
    lattice: str = "A1"
    t_min: int = -16
    max_size: int = 4


def sweep(cfg: SweepConfig) -> dict[str, Counter]:
    lattice = build_lattice(cfg.lattice)
    tr = Truncation(t_height_min=cfg.t_min)
    tally = {}
    for kind in KINDS:
        counts = Counter()
        for tree, tau, move in move_fixtures(cfg.seed, kind, 10 * cfg.per_kind, lattice,
                                             sizes=tuple(range(2, cfg.max_size + 1))):
            lhs = y_closed(tree, tau, tr)
            if not lhs:
                counts["empty"] += 1
                continue
            big, big_tau = transport(tree, tau, move)
            counts[compare(lhs, y_closed(big, big_tau, tr)).verdict] += 1
            if counts["equal"] + counts["unequal"] == cfg.per_kind:
                break
        tally[kind] = counts
    return tally


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    for name, default in vars(SweepConfig()).items():
        ap.add_argument(f"--{name.replace('_', '-')}", type=type(default), default=default)
    cfg = SweepConfig(**vars(ap.parse_args()))
    bad = 0
    for kind, counts in sweep(cfg).items():
        print(f"{kind:3s} equal={counts['equal']:3d} unequal={counts['unequal']:3d} skipped-empty={counts['empty']}")
        bad += counts["unequal"]
    raise SystemExit(1 if bad else 0)


if __name__ == "__main__":
    main()
