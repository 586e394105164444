"""
Simulating the sequential measurement protocol
===============================================

Distribute rho1, rho2, rho3 over nine qubits, let every party Bell-measure two
of its particles, and look for the configurations whose post-selected state
matches the closed-form output.
"""
from steerlab import protocol, states, measures
from steerlab.states import extract_x_params

t1, t3, p3 = 0.1, 0.1, 0.5
inputs = states.rho1(t1, 0.5), states.rho2(0.5), states.rho3(t3, p3)
target = states.rho4_closed(t1, t3, p3)

hits = protocol.search_pairings(*inputs, target)
print(f"{len(hits)} of 27 x 64 configurations reproduce the output state")
for h in hits[:4]:
    print(h.pairing.keep, [o.value for o in h.outcomes], f"prob={h.success_prob:.3e}")

# The output does not depend on the noise in rho1 and rho2.
for p1, p2 in [(0.2, 0.2), (0.9, 0.5)]:
    g = protocol.assemble_global(states.rho1(t1, p1), states.rho2(p2), states.rho3(t3, p3))
    res = protocol.run_smp(g, protocol.CANONICAL_PAIRING, protocol.CANONICAL_OUTCOMES, target)
    cgm = measures.cgm_x(extract_x_params(res.post_state, 1e-10))
    print(f"p1={p1} p2={p2}: distance={res.distance_to_closed:.1e} prob={res.success_prob:.3e} C_GM={cgm:.6f}")
