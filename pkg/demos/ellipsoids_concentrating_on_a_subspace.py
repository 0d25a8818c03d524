"""Flattened ellipsoids approximate the uniform measure on a great subsphere.

With semi-axis 1 along F and eps across it, rho^k / Z tends weakly to the
uniform measure on S^{n-1} cap F.  The tail of rho^k decays only like 1/s
away from F, so the error falls roughly like 1 / log(1/eps), and for a
single test function it need not fall monotonically at coarse eps.
"""

import numpy as np

from intgeom import haar_subspace
from intgeom.harmonics import random_spectrum, synthesize
from intgeom.starbody import gz_weak_error

n, k = 4, 2
F = haar_subspace(n, n - k, 0)
f = synthesize(random_spectrum(n, 6, 1))
print(f"{'eps':>8} {'error':>12} {'error*log(1/eps)':>18}")
for eps in (0.3, 0.1, 0.03, 0.01, 1e-3, 1e-4):
    e = gz_weak_error(F, eps, k, f)
    print(f"{eps:>8g} {e:>12.4e} {e * np.log(1 / eps):>18.4f}")
