"""
Closing the loop
================

Calibrate, then let wearables stream through the hub while the controller
drives a simulated room from 28 degC down to the group setpoint. Halfway
through, one wearable goes quiet for ten minutes.
"""

import numpy as np

from comfortloop.simkit import Dropout, five_occupant_scenario, run_scenario

config = five_occupant_scenario(duration=5400.0,
                                dropouts=[Dropout("w-05", 1800.0, 2400.0)])
trace = run_scenario(config)
s = trace.summary

print(f"t0 {s['initial_t0']:.2f} degC, band {s['band'][0]:.2f}..{s['band'][1]:.2f}")
for c in s["commands"]:
    print(f"  t={c['issued_at']:6.0f}s  setpoint -> {c['target_temp']:.2f}  ({c['reason']})")

# air temperature every ten minutes
for t in range(0, int(config.duration) + 1, 600):
    i = int(np.searchsorted(trace.times, t))
    print(f"  {t:5d}s  {trace.air_temps[i]:6.2f} degC")

print(f"converged: {s['converged']} (since {s['convergence_time']} s)")
print(f"mean squared comfort {s['start_mean_tci_sq']:.2f} -> {s['end_mean_tci_sq']:.2f}")

trace.write("closed_loop_out")
print("trace written to closed_loop_out/")
