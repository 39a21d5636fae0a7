"""A walk around the Siegel upper half space.

Start at the base point iI, move it with symplectic matrices, recover the
move from the Iwasawa factors, and watch the unitary fiber collapse under
the quotient map.
"""

import numpy as np

from siegelwp import SiegelPoint, mobius_act, section
from siegelwp.spgroup import embed_unitary, iwasawa, project_to_siegel
from siegelwp.sampling import random_symplectic, random_unitary_pair

rng = np.random.default_rng(1)
d = 2
base = SiegelPoint.base(d)

S = random_symplectic(d, rng)
X = mobius_act(S, base)
print("S . iI =\n", np.round(X.C, 4))
print("eigenvalues of Im:", np.round(np.linalg.eigvalsh(X.B), 4), "(positive, so still in the space)")

# the section reaches X from the base point with a lower-triangular matrix
T = section(X)
print("section(X) . iI reproduces X:", np.allclose(mobius_act(T, base).C, X.C))

# S and section(X) differ by a unitary in the fiber
P, L, u = iwasawa(S)
print("Iwasawa: P symmetric", np.allclose(P, P.T), "| L eigenvalues", np.round(np.linalg.eigvalsh(L), 4))
print("unitary factor |det| =", round(abs(np.linalg.det(u.as_complex())), 12))

for k in range(3):
    F = S @ embed_unitary(random_unitary_pair(d, rng))
    print(f"fiber sample {k}: projection moves by",
          f"{np.linalg.norm(project_to_siegel(F).C - X.C):.1e}")
