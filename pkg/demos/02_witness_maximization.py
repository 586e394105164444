"""
Maximizing the genuine steering witness
========================================

Optimize the normalized witness over measurement settings for each family
and compare with the closed-form maxima. Values above 1 certify genuine
steering; GHZ reaches the maximum of 2.
"""
from steerlab import states, steering, measures
from steerlab.optimize import OptimizerConfig
from steerlab.states import FamilyParams

cfg = OptimizerConfig(multistarts=16, seed=7)

report = steering.violates_genuine_steering(states.rho2(1.0), cfg)
print(f"GHZ: best={report.best:.8f} (untrusted {report.party.name}), S_gen={measures.s_gen(report.best).s_gen:.6f}")
print("settings:", report.per_party[report.party].settings.to_json())

params = FamilyParams(theta1=0.1, p1=0.5, p2=0.5, theta3=0.1, p3=0.5)
for family in (1, 2, 3, 4):
    rho = states.family_state(family, params)
    r = steering.violates_genuine_steering(rho, cfg.derive(family))
    closed = steering.closed_S(family, params)
    print(f"rho{family}: numeric={r.best:.8f} closed={closed:.8f} violated={r.violated}")
