"""How well a single Gaussian solves the Schrodinger equation as hbar shrinks.

For an anharmonic well the residual of the propagated packet, measured in
the grid L2 norm and divided by hbar, decreases with hbar.  The energy
expectation differs from the reduced Hamiltonian by an O(hbar^2) amount.
"""

from siegelwp import HellerState, SimParams, heller_rhs
from siegelwp.dynamics import hamiltonian
from siegelwp.integrate import convergence_slope
from siegelwp.potentials import quartic_1d
from siegelwp.wavepacket import expectation_energy, residual_norm

V = quartic_1d(omega2=1.0, lam=0.1)
s = HellerState.from_AB([0.5], [0.3], [[0.2]], [[1.0]])

print("hbar    ||R||/hbar (plain)   ||R||/hbar (corrected)")
for hbar in (1.0, 0.1, 0.01):
    row = []
    for corrected in (False, True):
        prm = SimParams(hbar=hbar, corrected=corrected)
        row.append(residual_norm(s, heller_rhs(s, V, prm), V, prm) / hbar)
    print(f"{hbar:<6g}  {row[0]:.5f}              {row[1]:.5f}")

hbars = [0.5, 0.25, 0.125]
gaps = []
for hbar in hbars:
    prm = SimParams(hbar=hbar)
    gaps.append(abs(expectation_energy(s, V, prm) - hamiltonian("reduced_extended", s, V, prm)))
    print(f"hbar={hbar:<6g} <psi|H psi> - Hbar = {gaps[-1]:.4e}")
print(f"log-log slope {convergence_slope(hbars, gaps):.3f}")
