"""Both sides of the Grassmannian integration formula by Monte Carlo.

Independent Haar subspaces are compared with the nested sampler that first
picks their common intersection and then the subspaces through it, weighted
by C * Omega^(n-d-l).  Agreement within a few standard errors is the check.
"""

from intgeom import PetkantschinConfig, delta_constant
from intgeom.petkantschin import integrand_by_name, verify

cases = [(3, (1, 1), 0), (4, (1, 1), 1), (5, (1, 2), 0)]
for n, ks, d in cases:
    l = sum(ks)
    print(f"n={n} k={list(ks)} d={d}: C = {delta_constant(n, ks, l, d):.6f}")
    for name in ("one", "zonal"):
        cfg = PetkantschinConfig(n, ks, l, d, integrand_by_name(name, n), samples=200_000, seed=1)
        (c,) = verify(cfg).checks
        print(f"  {name:<5} lhs {c.details['lhs']:.5f}  rhs {c.details['rhs']:.5f} +- {c.details['rhs_se']:.5f}"
              f"  z {c.details['z']:.2f}  {c.verdict}")
