"""Named initial states of the (S, A) register.

Spin labels map onto the computational basis as ``|up> = |1>`` and
``|down> = |0>``: the excited level is the one the damping operator
``[[0, sqrt(1 - r)], [0, 0]]`` lowers. A state written as
``a|uu> + b|ud> + c|du> + d|dd>`` (first label S, second A) therefore has
computational amplitudes ``(d, c, b, a)`` on ``|00>, |01>, |10>, |11>``.
"""
import math

import numpy as np

from .errors import StateError
from .qlinalg import PureState

WITNESS_ABC = (0.05, 0.95, 0.17)


def bell_state() -> PureState:
    """``(|00> + |11>)/sqrt(2)``."""
    return PureState(np.array([1, 0, 0, 1]) / math.sqrt(2), (2, 2))


def spin_state(a: float, b: float, c: float) -> PureState:
    """``a|uu> + b|ud> + c|du> + d|dd>`` with ``d = sqrt(1 - a^2 - b^2 - c^2)``."""
    rest = 1.0 - a * a - b * b - c * c
    if rest < -1e-12:
        raise StateError(f"a^2 + b^2 + c^2 = {1 - rest:.12g} exceeds 1")
    d = math.sqrt(max(rest, 0.0))
    return PureState(np.array([d, c, b, a], dtype=complex), (2, 2))


def witness_state() -> PureState:
    """The asymmetric witness state with (a, b, c) = (0.05, 0.95, 0.17)."""
    return spin_state(*WITNESS_ABC)


def pure_concurrence(psi: PureState) -> float:
    """``2 |a00 a11 - a01 a10|`` for a two-qubit pure state."""
    v = psi.amps
    return float(2 * abs(v[0] * v[3] - v[1] * v[2]))
