#!/usr/bin/env python3
"""Classic values and the character-decomposition identity.

Evaluates the strip evaluators at points with known closed forms, then
exercises the decomposition of a rational-parameter zeta into Dirichlet
L-values, which is the package's main internal cross-check.
"""

import numpy as np

from critlab import (
    character_group,
    dedekind_abelian,
    dirichlet_l,
    hurwitz_from_characters,
    hurwitz_zeta,
    zeta,
)


def main():
    print("== classic points ==")
    print(f"zeta(2)              = {zeta(2 + 0j).real:.15f}   (pi^2/6 = {np.pi**2 / 6:.15f})")
    print(f"zeta(2, 1/2)         = {hurwitz_zeta(2 + 0j, 1, 2).real:.15f}   (pi^2/2 = {np.pi**2 / 2:.15f})")
    chi4 = character_group(4)[1]
    print(f"L(2, chi_-4)         = {dirichlet_l(2 + 0j, chi4).real:.15f}   (Catalan)")
    print(f"L(1, chi_-4)         = {dirichlet_l(1 + 0j, chi4).real:.15f}   (pi/4 = {np.pi / 4:.15f})")
    zqi = dedekind_abelian(2 + 0j, [character_group(1)[0], chi4])
    print(f"zeta_Q(i)(2)         = {zqi.real:.15f}   (= zeta(2) * Catalan)")

    print("\n== decomposition identity, q = 12 ==")
    rng = np.random.default_rng(1)
    for _ in range(4):
        s = complex(0.5 + 1.5 * rng.random(), -40 + 80 * rng.random())
        lhs = hurwitz_zeta(s, 5, 12)
        rhs = hurwitz_from_characters(s, 5, 12)
        print(f"s = {s:.4f}:  |direct - character sum| = {abs(lhs - rhs):.3e}")

    print("\n== behaviour on the critical line ==")
    for t in (14.134725, 21.022040, 25.010858):
        v = zeta(0.5 + 1j * t)
        print(f"|zeta(1/2 + {t}i)| = {abs(v):.3e}   (a zero of zeta)")


if __name__ == "__main__":
    main()
