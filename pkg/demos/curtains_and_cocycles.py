"""Degenerate curtain examples and the affine group side of the picture.

Curtains are product-like legendrian families indexed by a constant phi:
phi = 1 gives genuinely special legendrian samples with degenerate m,
phi = 0 gives the maximally non-special control. On the group side a
coboundary cocycle over two Lorentz generators is extended to random
words, serialized, and the fuchsian model checks that exact leaves sit at
constant cosmological time offset in the future cone.
"""

import numpy as np

from minkcsc.equivariance import (Cocycle, coboundary, cone_position_check,
                                  fuchsian_time, leaf_samples)
from minkcsc.minkowski import boost, spatial_rotation
from minkcsc.slstructure import nullity, sl_defect
from minkcsc.surfaces import curtain_build


def main():
    print("curtain samples over a 2-dimensional base")
    charts = [np.zeros(2), np.array([0.3, -0.6])]
    for phi in (1.0, 0.0):
        ds = [abs(sl_defect(s.frame, np.pi / 2))
              for s in curtain_build(3, (0, 1), phi, [0.0, 0.5],
                                     chart_points=charts)]
        ns = [nullity(s.frame)
              for s in curtain_build(3, (0, 1), phi, [0.0, 0.5],
                                     chart_points=charts)]
        print(f"  phi = {phi}: |defect| range [{min(ds):.1e}, {max(ds):.1e}],"
              f" m-nullity {sorted(set(ns))}")

    print("a coboundary cocycle over two generators")
    gens = {"a": boost(np.array([1.0, 0, 0, 0]), 0.7),
            "b": spatial_rotation([[0.0, -1, 0], [1, 0, 0], [0, 0, 1]])}
    coc = coboundary(gens, np.array([0.2, -0.4, 0.1, 0.3]))
    rng = np.random.default_rng(2)
    names = ["a", "b", "-a", "-b"]
    worst = 0.0
    for _ in range(50):
        u = [names[i] for i in rng.integers(0, 4, 3)]
        w = [names[i] for i in rng.integers(0, 4, 3)]
        lhs = coc.extend(u + w)
        rhs = coc.extend(u) + coc.word(u).linear.apply(coc.extend(w))
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    print(f"  cocycle identity defect over 50 word pairs: {worst:.2e}")
    back = Cocycle.from_json(coc.to_json())
    print(f"  JSON round trip preserves generators: {set(back.generators)}")

    print("leaves sit at constant cosmological time offset")
    for k in (0.8, 1.25):
        samples = leaf_samples(k, 20, rng)
        rep = cone_position_check(samples, k)
        t = fuchsian_time(samples[0])
        print(f"  k = {k}: time = {t:.6f} (= k^2), offset 1/k dev"
              f" {rep['max_offset_deviation']:.1e}, passed = {rep['passed']}")


if __name__ == "__main__":
    main()
