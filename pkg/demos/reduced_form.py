"""The symplectic group as a momentum level set, and the reduced form on the quotient.

Tangent vectors to Sp(2d) come from right translation by sp(2d).  The
canonical form evaluated on them matches -1/2 times the Siegel form on
their projections, and directions along the unitary fiber drop out.
"""

import numpy as np

from siegelwp.reduction import is_on_level_J, level_tangent, reduced_form_check
from siegelwp.sampling import random_sp_algebra, random_symplectic, random_u_algebra

rng = np.random.default_rng(7)
for d in (1, 2, 3):
    Z = random_symplectic(d, rng)
    print(f"d={d}: ||M(Z) - J|| = {is_on_level_J(Z).residual:.1e}")
    worst = 0.0
    for _ in range(200):
        v, w = (level_tangent(Z, random_sp_algebra(d, rng)) for _ in range(2))
        lhs, rhs = reduced_form_check(Z, v, w)
        worst = max(worst, abs(lhs - rhs))
    lhs, rhs = reduced_form_check(Z, level_tangent(Z, random_u_algebra(d, rng)), w)
    print(f"      worst |Omega - (-1/2 Omega_Sigma)| over 200 pairs: {worst:.1e}")
    print(f"      vertical direction gives ({lhs:.1e}, {rhs:.1e})")
