"""
Building the payoff bimatrix
============================

A defender (Alice) picks a watermark intensity, an attacker (Bob) picks an
attack intensity. Each pair yields a payoff for both players.
"""

# %%
# Load the worked scenario shipped next to this script.
from pathlib import Path

from wmgame import asr, build_payoff_matrix, csr_simplified, pure_equilibria, validate_scenario
from wmgame.cli import load_scenario

scenario = load_scenario(Path(__file__).parent / "data" / "worked.json")
print("alphas", scenario.alphas, "betas", scenario.betas)
print("valid:", validate_scenario(scenario).ok)

# %%
# The rates behind the payoffs. CSR is the marked model's blended success
# after attack; ASR is how often the attack succeeds.
c = scenario.costs
for i, a in enumerate(scenario.alphas):
    for j, b in enumerate(scenario.betas):
        r = scenario.robustness[i][j]
        print(f"alpha={a} beta={b}  CSR={csr_simplified(a, c.lam, b, r):.4f}  ASR={asr(r):.2f}")

# %%
# The bimatrix itself. Rows are Alice's choices, columns Bob's.
m = build_payoff_matrix(scenario)
print("Alice\n", m.u_alice)
print("Bob\n", m.u_bob)

# %%
# No cell is a mutual best response here, so any equilibrium must be mixed.
print("pure equilibria:", pure_equilibria(m))

# %%
# Initial costs shift every payoff by a constant and do not move best
# responses.
richer = build_payoff_matrix(scenario.with_costs(i_def=50.0, i_att=20.0))
print("Alice shift:", (m.u_alice - richer.u_alice).round(12).ravel())
