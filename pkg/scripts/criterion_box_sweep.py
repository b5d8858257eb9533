"""Sweep reflection vectors in a box and tally Galois labels per (t, d).

Checks the closed-form induced matrix against the explicit oracle on the way.
"""

import argparse
from collections import Counter
from dataclasses import dataclass

from heegner_lab.reflections import (
    box_vectors,
    defines_reflection,
    explicit_perp,
    induced_disc_matrix,
    induced_disc_oracle,
    lift,
    numerical_label,
)


@dataclass
class SweepConfig:
    pairs: tuple = ((1, 1), (1, 2), (1, 3), (2, 1), (2, 3), (3, 2), (2, 5))
    bound: int = 6
    msq_bound: int = 24


def sweep(cfg: SweepConfig) -> dict:
    table = {}
    for t, d in cfg.pairs:
        L = explicit_perp(t, d)
        labels, mismatches = Counter(), 0
        for beta in box_vectors(cfg.bound, cfg.msq_bound):
            if beta.square(t, d) >= 0 or not defines_reflection(L, lift(beta, t, d)):
                continue
            labels[numerical_label(t, d, beta)] += 1
            mismatches += induced_disc_matrix(t, d, beta) != induced_disc_oracle(t, d, beta)
        table[(t, d)] = (labels, mismatches)
    return table


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--bound", type=int, default=SweepConfig.bound)
    ap.add_argument("--msq-bound", type=int, default=SweepConfig.msq_bound)
    args = ap.parse_args()
    cfg = SweepConfig(bound=args.bound, msq_bound=args.msq_bound)
    print(f"{'(t,d)':>8} {'id':>6} {'s':>6} {'-s':>6} {'-id':>6} {'nontriv':>8} {'mismatch':>9}")
    for (t, d), (labels, bad) in sweep(cfg).items():
        row = [labels[k] for k in ("id", "s", "minus_s", "minus_id", "nontrivial")]
        print(f"{str((t, d)):>8} " + " ".join(f"{x:>6}" for x in row[:4]) + f" {row[4]:>8} {bad:>9}")


if __name__ == "__main__":
    main()
