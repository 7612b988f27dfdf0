"""Check the gluing and splitting formulas on the bundled fixtures, with their mutations."""

import argparse
from dataclasses import dataclass

from plumbseries.assignments import enumerate_assignments
from plumbseries.fixtures import gluing_fixtures, splitting_fixtures
from plumbseries.lattice import build_lattice
from plumbseries.plumbing import glue_trees, split_layout
from plumbseries.series import Tau, Truncation, prefactor, y_closed
from plumbseries.spinc import spinc_classes
from plumbseries.theorems import compare, gluing_lhs, gluing_rhs, split_data, split_rep, splitting_rhs


@dataclass(frozen=True)
class SurgeryConfig:
    classes: int = 4
    assignments: int = 2
    q_span: int = 12
    t_min: int = -8


def _weights(tree):
    return [w for _, w in tree.vertices]


def gluing(cfg: SurgeryConfig) -> int:
    failures = 0
    for tp, tm, name in gluing_fixtures():
        lat = build_lattice(name)
        glued = glue_trees(tp, tm)
        tr = Truncation(q_max=prefactor(glued, lat)[1] + cfg.q_span)
        ok = caught = total = 0
        for a in spinc_classes(glued, lat)[:cfg.classes]:
            for xi in enumerate_assignments(glued, lat)[:cfg.assignments]:
                ap, am = split_rep(a, tp, tm)
                lhs = gluing_lhs(tp, tm, a, xi, tr)
                ok += compare(lhs, gluing_rhs(tp, tm, ap, am, xi, tr).series).verdict == "equal"
                mutated = gluing_rhs(tp, tm, ap, am, xi, tr, mutate_gamma_zero=True).series
                caught += compare(lhs, mutated).verdict == "unequal"
                total += 1
        failures += total - ok
        print(f"glue {name} {_weights(tp)} * {_weights(tm)}: {ok}/{total} equal, mutation caught {caught}")
    return failures


def splitting(cfg: SurgeryConfig) -> int:
    failures = 0
    for t1, v1, t2, v2, e, name in splitting_fixtures():
        lat = build_lattice(name)
        tree = split_layout(t1, v1, t2, v2, e).tree
        ok = caught = total = 0
        for a in spinc_classes(tree, lat)[:cfg.classes]:
            for xi in enumerate_assignments(tree, lat)[:cfg.assignments]:
                data = split_data(t1, v1, t2, v2, e, Tau(lat, a, xi))
                lhs = y_closed(tree, data.tau, Truncation(t_height_min=cfg.t_min))
                ok += compare(lhs, splitting_rhs(data, cfg.t_min)).verdict == "equal"
                caught += compare(lhs, splitting_rhs(data, cfg.t_min, drop_r_factor=True)).verdict == "unequal"
                total += 1
        failures += total - ok
        print(f"split {name} {_weights(t1)}@{v1} | {_weights(t2)}@{v2} e={e}: "
              f"{ok}/{total} equal, mutation caught {caught}")
    return failures


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    for name, default in vars(SurgeryConfig()).items():
        ap.add_argument(f"--{name.replace('_', '-')}", type=int, default=default)
    cfg = SurgeryConfig(**vars(ap.parse_args()))
    raise SystemExit(1 if gluing(cfg) + splitting(cfg) else 0)


if __name__ == "__main__":
    main()
