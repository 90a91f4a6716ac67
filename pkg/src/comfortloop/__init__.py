"""Physiology-driven group thermostat setpoints.

Submodules:

- :mod:`comfortloop.comfort` -- PMV/PPD and the TCI scale
- :mod:`comfortloop.predictor` -- featurisation and the ridge TCI model
- :mod:`comfortloop.profile` -- neutral temperatures and group setpoint selection
- :mod:`comfortloop.control` -- the setpoint controller state machine
- :mod:`comfortloop.simkit` -- room plant, synthetic occupants, scenario runner
- :mod:`comfortloop.gateway` -- telemetry hub and wire protocol
"""

__version__ = "0.1.0"

from .comfort import PmvInputs, clamp_tci, compute_pmv, pmv, pmv_to_ppd  # noqa: E402
from .control import Controller, ControllerState, Phase, Reason, SetpointCommand  # noqa: E402
from .gateway import Gateway, GatewayServer, NodeKind, NodeStatus  # noqa: E402
from .predictor import (  # noqa: E402
    EnvSample,
    PhysioSample,
    TciModel,
    extract_features,
    predict_tci,
    train_tci_model,
)
from .profile import (  # noqa: E402
    GroupThermalProfile,
    OccupantProfile,
    build_group_profile,
    estimate_neutral_temp,
    select_setpoint,
)
from .simkit import RoomPlant, ScenarioConfig, SyntheticOccupant, run_scenario  # noqa: E402
