"""Tabulate normality verdicts over a grid of (t, d, gamma)."""

import argparse
from collections import Counter
from dataclasses import dataclass

from heegner_lab.errors import BudgetExceeded
from heegner_lab.hk import normality
from heegner_lab.hperp import admissible_c


@dataclass
class SurveyConfig:
    t_max: int = 10
    d_max: int = 30
    budget: int = 20000
    show_failures: int = 15


def survey(cfg: SurveyConfig):
    counts, failures = Counter(), []
    for t in range(1, cfg.t_max + 1):
        for d in range(1, cfg.d_max + 1):
            for g in range(1, 2 * t + 1):
                if not admissible_c(t, d, g):
                    continue
                try:
                    v = normality(t, d, g, budget=cfg.budget)
                except BudgetExceeded:
                    counts["over_budget"] += 1
                    continue
                counts[(v.status, v.reason)] += 1
                if v.status == "not_normal":
                    failures.append((t, d, g, v.witness[0].matrix))
    return counts, failures


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t-max", type=int, default=SurveyConfig.t_max)
    ap.add_argument("--d-max", type=int, default=SurveyConfig.d_max)
    args = ap.parse_args()
    cfg = SurveyConfig(t_max=args.t_max, d_max=args.d_max)
    counts, failures = survey(cfg)
    for key, n in sorted(counts.items(), key=str):
        print(f"{str(key):50} {n}")
    print(f"\nfirst non-normal cases (t, d, gamma, witness):")
    for row in failures[: cfg.show_failures]:
        print("  ", row)


if __name__ == "__main__":
    main()
