"""Trident-quaternion strapdown inertial navigation toolkit.

One unified kinematic differential equation carries attitude, velocity and
position; a Chebyshev functional-iterative integrator solves it to near
machine precision, benchmarked against a classical two-sample algorithm on an
analytic coning-flight scenario.
"""

from .algebra import DualQuaternion, Quaternion, TridentNumber, TridentQuaternion
from .chebyshev import TimeMap, TridentChebSeries
from .earth import EarthModel, GeodeticPosition
from .kinematics import NavState, TridentTwist, TwistVariant
from .tqfilter import ImuWindow, SolveReport, SolverConfig
from .trajectory import ScenarioParams

__version__ = "0.1.0"

__all__ = [
    "DualQuaternion",
    "EarthModel",
    "GeodeticPosition",
    "ImuWindow",
    "NavState",
    "Quaternion",
    "ScenarioParams",
    "SolveReport",
    "SolverConfig",
    "TimeMap",
    "TridentChebSeries",
    "TridentNumber",
    "TridentQuaternion",
    "TridentTwist",
    "TwistVariant",
    "__version__",
]
