"""Instantaneous capture point of the linear inverted pendulum."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from pushrec.centroidal_model import GRAVITY, STATE_DIM, State
from pushrec.errors import InvalidArgument


@dataclass(frozen=True)
class IcpParams:
    omega0: float

    def __post_init__(self):
        if not self.omega0 > 0:
            raise InvalidArgument("omega0 must be positive")

    @classmethod
    def from_height(cls, com_height: float, gravity_accel: float = GRAVITY) -> "IcpParams":
        if not com_height > 0:
            raise InvalidArgument("CoM height must be positive")
        return cls(float(np.sqrt(gravity_accel / com_height)))


def compute_icp(state, p: IcpParams) -> np.ndarray:
    gamma = state.as_vector() if isinstance(state, State) else np.asarray(state, dtype=float)
    return gamma[0:2] + gamma[3:5] / p.omega0


def icp_extraction_matrix(p: IcpParams) -> np.ndarray:
    """Linear map ``C`` with ``C @ gamma == compute_icp(gamma, p)``."""
    c = np.zeros((2, STATE_DIM))
    c[0, 0] = c[1, 1] = 1.0
    c[0, 3] = c[1, 4] = 1.0 / p.omega0
    return c
