"""Brute-force the image of the monodromy group of (L, h) in O(A_{h-perp}).

Expected: the stable part acts trivially; the +-stable part adds one class
exactly when t > 1 and gamma <= 2.  Cases with omega != 1 are included.
"""

import argparse
from dataclasses import dataclass

from heegner_lab.hk import monodromy_image
from heegner_lab.hperp import admissible_c, make_polarization


@dataclass
class ImageConfig:
    t_max: int = 8
    d_max: int = 15


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t-max", type=int, default=ImageConfig.t_max)
    ap.add_argument("--d-max", type=int, default=ImageConfig.d_max)
    a = ap.parse_args()
    cfg = ImageConfig(a.t_max, a.d_max)
    n = bad = omega = 0
    for t in range(1, cfg.t_max + 1):
        for d in range(1, cfg.d_max + 1):
            for g in range(1, 2 * t + 1):
                for c in admissible_c(t, d, g):
                    pol = make_polarization(t, d, g, c)
                    im = monodromy_image(pol)
                    want = 1 if t == 1 or g > 2 else 2
                    n += 1
                    omega += pol.omega != 1
                    if len(im.tilde) != 1 or len(im.hat) != want:
                        bad += 1
                        print("unexpected:", (t, d, g, c), len(im.tilde), len(im.hat))
    print(f"{n} polarizations ({omega} with omega != 1), {bad} unexpected")


if __name__ == "__main__":
    main()
