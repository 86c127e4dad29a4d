"""phoneline: discrete-event simulation and techno-economic analysis of an
automated end-of-life phone disassembly and sorting line."""

__version__ = "0.1.0"

from .config import ScenarioConfig, load_scenario
from .stations import SimReport, run_replications, run_simulation
from .tea import TeaReport, build_tea_report

__all__ = [
    "ScenarioConfig",
    "SimReport",
    "TeaReport",
    "build_tea_report",
    "load_scenario",
    "run_replications",
    "run_simulation",
    "__version__",
]
