"""
One setpoint for five people
============================

Each occupant's neutral temperature is where the predicted comfort index
crosses zero. The group setpoint is searched within one standard deviation
of the mean neutral temperature.
"""

from dataclasses import replace

from comfortloop.predictor import predict_tci
from comfortloop.simkit import calibrate, five_occupant_scenario, make_occupants

# the steepest occupant (w-05) reacts three times as strongly as the rest
config = replace(five_occupant_scenario(),
                 occupants=make_occupants([21, 22, 23, 24, 25], [0.5, 0.5, 0.5, 0.5, 1.5]))
cal = calibrate(config)

for oid, prof in sorted(cal.profiles.items()):
    print(f"{oid}: neutral {prof.neutral_temp:.2f} degC, "
          f"sensitivity {prof.sensitivity:.2f} per degC")

g = cal.group
print(f"\nmean {g.t_bar:.2f}  sigma {g.sigma:.3f}  band {g.band[0]:.2f}..{g.band[1]:.2f}")
print(f"selected setpoint {g.t0:.2f} degC (pulled above the mean by w-05)")

# the objective along the band
for temp, cost in g.objective_trace[::4]:
    marker = "  <-" if temp == g.t0 else ""
    print(f"  {temp:6.2f}  {cost:7.3f}{marker}")

print("\npredicted comfort at the setpoint:")
for oid, fn in sorted(cal.feature_fns.items()):
    print(f"  {oid} {predict_tci(cal.model, fn(g.t0)):+.2f}")
