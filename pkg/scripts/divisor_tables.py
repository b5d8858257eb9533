"""Ramification classes and period-image status for K3^[m]-type, divisibility 1."""

import argparse
from dataclasses import dataclass

from heegner_lab.hk import image_status, normality
from heegner_lab.reflections import enumerate_ramification_classes


@dataclass
class TableConfig:
    m: int = 2
    d_min: int = 1
    d_max: int = 25
    jobs: int = 1


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=TableConfig.m)
    ap.add_argument("--d-min", type=int, default=TableConfig.d_min)
    ap.add_argument("--d-max", type=int, default=TableConfig.d_max)
    ap.add_argument("--jobs", type=int, default=TableConfig.jobs)
    a = ap.parse_args()
    cfg = TableConfig(a.m, a.d_min, a.d_max, a.jobs)
    for d in range(cfg.d_min, cfg.d_max + 1):
        v = normality(cfg.m - 1, d, 1)
        if v.status not in ("normal", "normal_stable"):
            print(f"d={d:3}: skipped ({v.status})")
            continue
        enum = enumerate_ramification_classes(cfg.m, d, jobs=cfg.jobs, check_normality=False)
        print(f"d={d:3}: {len(enum.classes)} class(es)")
        for cls in enum.classes:
            extra = ""
            if cfg.m == 2:
                rep = image_status(d, cls)
                extra = f" disc={rep.disc_Kperp:<5} {rep.image_status} {rep.excluded_rule or ''}"
            print(f"    beta^2={cls.beta_sq:<5} div={cls.div:<3} beta_*={cls.beta_star}{extra}")


if __name__ == "__main__":
    main()
