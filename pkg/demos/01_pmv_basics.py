"""
PMV and PPD at a desk
=====================

Fanger's heat-balance comfort vote for a few everyday situations, and how
it moves with air temperature and clothing.
"""

import numpy as np

from comfortloop.comfort import PmvInputs, clothing_surface_temp, compute_pmv, pmv, pmv_to_ppd

# light office clothing, seated typing, still air
office = PmvInputs(air_temp=22.0, mean_radiant_temp=22.0, air_velocity=0.1,
                   rel_humidity=60.0, metabolic_rate=1.2, clothing_insulation=0.5)
vote = compute_pmv(office)
print(f"22 degC office: PMV {vote:+.3f}, PPD {pmv_to_ppd(vote):.1f} %")

# the clothing surface temperature comes from a damped fixed-point iteration
tcl, hc, iterations = clothing_surface_temp(office)
print(f"clothing surface {tcl:.2f} degC, convective coefficient {hc:.2f} W/m2K, "
      f"{iterations} iterations")

# sweep air temperature (radiant follows air) for two clothing levels
temps = np.arange(18.0, 30.5, 1.0)
print("\n ta   PMV@0.5clo  PMV@1.0clo")
for ta in temps:
    print(f"{ta:4.0f}   {pmv(ta, ta, 0.1, 50, 1.2, 0.5):+8.2f}   {pmv(ta, ta, 0.1, 50, 1.2, 1.0):+8.2f}")

# PPD never drops below 5 %: someone is always unhappy
for p in (-2, -1, -0.5, 0, 0.5, 1, 2):
    print(f"PMV {p:+.1f} -> PPD {pmv_to_ppd(p):5.1f} %")
