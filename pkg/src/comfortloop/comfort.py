"""Fanger PMV / PPD and the thermal comfort index scale.

The PMV routine follows the ISO 7730 heat-balance formulation. The clothing
surface temperature is solved by a damped fixed point expressed in
hundredths of kelvin, which keeps the convective term implicit and makes
the iteration contractive even at high air speeds.
"""

import math
from dataclasses import dataclass

from .errors import NonConvergence, NotFinite, OutOfRange

TCI_MIN = -3.0
TCI_MAX = 3.0

MET_W_M2 = 58.15
CLO_M2K_W = 0.155

TCL_TOLERANCE = 1e-5  # degC
TCL_DAMPING = 0.5
TCL_MAX_ITER = 150

PMV_LIMITS = {
    "air_temp": (-10.0, 50.0),
    "mean_radiant_temp": (-10.0, 50.0),
    "air_velocity": (0.0, 5.0),
    "rel_humidity": (0.0, 100.0),
    "metabolic_rate": (0.7, 4.0),
    "clothing_insulation": (0.0, 2.0),
}


@dataclass(frozen=True)
class PmvInputs:
    """The six inputs of the Fanger model.

    Units: degC for temperatures, m/s, percent RH, met and clo.
    """

    air_temp: float
    mean_radiant_temp: float
    air_velocity: float
    rel_humidity: float
    metabolic_rate: float
    clothing_insulation: float

    def validate(self):
        for name, (lo, hi) in PMV_LIMITS.items():
            value = getattr(self, name)
            if not lo <= value <= hi:
                raise OutOfRange(name, value, lo, hi)
        return self


def saturation_pressure(temp):
    """Saturated water vapour pressure in kPa at ``temp`` degC."""
    return math.exp(16.6536 - 4030.183 / (temp + 235.0))


def clothing_area_factor(icl):
    if icl <= 0.078:
        return 1.0 + 1.29 * icl
    return 1.05 + 0.645 * icl


def clothing_surface_temp(inputs: PmvInputs):
    """Solve the clothing heat balance for t_cl.

    Returns ``(t_cl, h_c, iterations)``; ``h_c`` is the convective
    coefficient at the converged surface temperature, taken as the larger of
    the natural and forced convection estimates.
    """
    ta, tr = inputs.air_temp, inputs.mean_radiant_temp
    icl = CLO_M2K_W * inputs.clothing_insulation
    mw = inputs.metabolic_rate * MET_W_M2
    fcl = clothing_area_factor(icl)
    hc_forced = 12.1 * math.sqrt(inputs.air_velocity)

    taa = ta + 273.0
    tra = tr + 273.0
    p1 = icl * fcl
    p2 = p1 * 3.96
    p3 = p1 * 100.0
    p4 = p1 * taa
    p5 = 308.7 - 0.028 * mw + p2 * (tra / 100.0) ** 4

    # x is t_cl in hundreds of kelvin
    x = (taa + (35.5 - ta) / (3.5 * icl + 0.1)) / 100.0
    tol = TCL_TOLERANCE / 100.0
    for n in range(1, TCL_MAX_ITER + 1):
        hc = max(2.38 * abs(100.0 * x - taa) ** 0.25, hc_forced)
        x_next = (p5 + p4 * hc - p2 * x**4) / (100.0 + p3 * hc)
        if abs(x_next - x) < tol:
            x = x_next
            hc = max(2.38 * abs(100.0 * x - taa) ** 0.25, hc_forced)
            return 100.0 * x - 273.0, hc, n
        x = TCL_DAMPING * x + (1.0 - TCL_DAMPING) * x_next
    raise NonConvergence(
        f"clothing surface temperature did not converge in {TCL_MAX_ITER} iterations "
        f"for {inputs}"
    )


def heat_losses(inputs: PmvInputs):
    """Individual heat-loss terms in W/m2, keyed by pathway."""
    inputs.validate()
    ta, tr = inputs.air_temp, inputs.mean_radiant_temp
    m = inputs.metabolic_rate * MET_W_M2
    mw = m  # no external work
    pa = inputs.rel_humidity * 10.0 * saturation_pressure(ta)  # Pa
    fcl = clothing_area_factor(CLO_M2K_W * inputs.clothing_insulation)
    tcl, hc, _ = clothing_surface_temp(inputs)

    return {
        "skin_diffusion": 3.05e-3 * (5733.0 - 6.99 * mw - pa),
        "sweat": 0.42 * (mw - MET_W_M2) if mw > MET_W_M2 else 0.0,
        "latent_respiration": 1.7e-5 * m * (5867.0 - pa),
        "dry_respiration": 0.0014 * m * (34.0 - ta),
        "radiation": 3.96e-8 * fcl * ((tcl + 273.0) ** 4 - (tr + 273.0) ** 4),
        "convection": fcl * hc * (tcl - ta),
    }


def compute_pmv(inputs: PmvInputs) -> float:
    """Predicted mean vote for ``inputs``.

    Raises OutOfRange for inputs outside the model's validity limits and
    NonConvergence if the clothing temperature solve stalls. The result is
    not clamped.
    """
    losses = heat_losses(inputs)
    m = inputs.metabolic_rate * MET_W_M2
    sensitivity = 0.303 * math.exp(-0.036 * m) + 0.028
    # fixed summation order keeps the result bit-stable
    total = 0.0
    for key in ("skin_diffusion", "sweat", "latent_respiration",
                "dry_respiration", "radiation", "convection"):
        total += losses[key]
    return sensitivity * (m - total)


def pmv(ta, tr, vel, rh, met, clo):
    """Positional shorthand for :func:`compute_pmv`."""
    return compute_pmv(PmvInputs(ta, tr, vel, rh, met, clo))


def pmv_to_ppd(pmv_value: float) -> float:
    """Predicted percentage dissatisfied, in percent (5 at neutral)."""
    p2 = pmv_value * pmv_value
    return 100.0 - 95.0 * math.exp(-0.03353 * p2 * p2 - 0.2179 * p2)


def clamp_tci(raw: float) -> float:
    if not math.isfinite(raw):
        raise NotFinite(f"TCI value {raw!r} is not finite")
    return min(TCI_MAX, max(TCI_MIN, float(raw)))
