"""
The mixed equilibrium three ways
================================

With ongoing costs tied to rewards (O = k R+), the equilibrium mix depends
only on robustness and intensity gaps. We compute it from the closed form,
from the indifference conditions on the bimatrix, and by brute-force support
enumeration.
"""

# %%
from pathlib import Path

from wmgame import (
    build_payoff_matrix,
    indifference_residuals,
    mixed_2x2_closed_form,
    mixed_2x2_from_matrix,
    mixed_2x2_simplified,
    solve,
    structural_deltas,
    support_enumeration,
)
from wmgame.cli import load_scenario

scenario = load_scenario(Path(__file__).parent / "data" / "worked.json")
print(structural_deltas(scenario))

# %%
# Closed forms, simplified and general.
print("simplified:", mixed_2x2_simplified(scenario))
print("general:   ", mixed_2x2_closed_form(scenario))

# %%
# The matrix route never looks at the structure, only at payoff differences.
m = build_payoff_matrix(scenario)
profile = mixed_2x2_from_matrix(m)
print("matrix:    ", profile)
print("residuals: ", indifference_residuals(m, profile))

# %%
# The oracle lists every equilibrium, pure ones included.
for p, res in support_enumeration(m):
    print("oracle:    ", p, res)

# %%
# ``solve`` picks the most specific route and records what it tried.
report = solve(scenario.with_costs(o_att=0.3))
print(report.mixed_method, report.mixed)
print(report.diagnostics)
