"""The cube of R^5 is not an intersection body, but the cube of R^4 is.

Every origin-symmetric convex body in R^n with n <= 4 is an intersection
body; in R^5 the cube already fails.  The smoothed transform of rho^k for
the cube finds a direction where it is clearly negative, which certifies
non-membership in I_1 up to the stated quadrature bound.
"""

import numpy as np

from intgeom import LpBall, i_k_test

for n in (4, 5):
    v = i_k_test(LpBall(n, np.inf), 1, L=12)
    print(f"cube of R^{n}: {v.verdict:<8} margin {v.margin:+.4f}  bound {v.truncation_bound:.4f}")
    if v.verdict == "negative":
        print("  witness direction", np.round(v.witness, 4))

# raising the level repairs membership: the cube of R^5 is in I_2
v = i_k_test(LpBall(5, np.inf), 2, L=12)
print(f"cube of R^5 at k=2: {v.verdict} (margin {v.margin:.3f})")
