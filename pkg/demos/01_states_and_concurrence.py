"""
State families and genuine multipartite concurrence
====================================================

Build the three input families and the protocol's output state, read off
their X-state entries, and compare the X-state concurrence formula with the
closed forms.
"""
import numpy as np

from steerlab import states, measures
from steerlab.states import FamilyParams, extract_x_params

params = FamilyParams(theta1=0.1, p1=0.5, p2=0.5, theta3=0.1, p3=0.5)

for family in (1, 2, 3, 4):
    rho = states.family_state(family, params)
    x = extract_x_params(rho)
    print(f"rho{family}: a={np.round(x.a, 4)} b={np.round(x.b, 4)} |gamma|={np.round(abs(x.gamma), 4)}")
    print(f"   C_GM matrix={measures.cgm_x(x):.6f}  closed={measures.cgm_closed(family, params):.6f}")

# Pure states: the bipartition-purity definition agrees with the X formula.
for theta in (0.1, 0.4, np.pi / 4):
    psi = np.zeros(8)
    psi[0], psi[7] = np.cos(theta), np.sin(theta)
    print(f"theta={theta:.3f}  pure={measures.cgm_pure(psi):.6f}  sin(2 theta)={np.sin(2 * theta):.6f}")

# Bilocal ranges of the inputs at theta = 0.1
print("p3 upper bound at theta3 = 0.1:", states.bilocal_limit(3, FamilyParams(theta3=0.1)))
