"""
Where does a mixed equilibrium exist?
=====================================

Alice mixes only if the attack-intensity gap lies inside an open interval set
by k and the robustness gaps. Sweeping parameters maps out the region.
"""

# %%
import tempfile
from pathlib import Path

from wmgame import Axis, SweepSpec, feasibility_interval, scan, structural_deltas
from wmgame.cli import load_scenario
from wmgame.region import export_region_csv, render_region_svg

scenario = load_scenario(Path(__file__).parent / "data" / "worked.json")
d = structural_deltas(scenario)
iv = feasibility_interval(scenario.costs.k, d.d_r_1star, d.d_r_2star)
print(f"interval for d_beta: ({iv.lower:.3f}, {iv.upper:.3f}); here d_beta = {d.d_beta:.3f}")

# %%
# One axis: raise Bob's strong attack intensity.
for p in scan(SweepSpec(scenario, [Axis("betas.1", 0.3, 0.9, 7)])):
    print(p.coordinates[0][1], p.classification, p.pr_alpha1, p.pr_beta1)

# %%
# Two axes, exported as CSV and SVG.
spec = SweepSpec(scenario, [Axis("betas.1", 0.15, 1.0, 60), Axis("robustness.1.1", 0.0, 1.0, 60)])
points = scan(spec, workers=4)
counts = {}
for p in points:
    counts[p.classification] = counts.get(p.classification, 0) + 1
print(counts)

out = Path(tempfile.mkdtemp())
export_region_csv(points, out / "region.csv")
render_region_svg(points, out / "region.svg")
print("wrote", out / "region.csv", "and", out / "region.svg")
