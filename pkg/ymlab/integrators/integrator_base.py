# Copyright 2024 ymlab developers

# Licensed under the Apache License, Version 2.0 (the "License"); you may not
# use this file except in compliance with the License. You may obtain a copy of
# the License at http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
# WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
# License for the specific language governing permissions and limitations under
# the License.


import logging
from abc import ABCMeta, abstractmethod
from dataclasses import dataclass

import numpy as np

from ymlab.exceptions import StepRejectedError
from ymlab.lattice import GaugePotential
from ymlab.lie_algebra import dagger, project_skew_array

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FlowState:
    A: GaugePotential
    tau: float = 0.0

    def __post_init__(self):
        if not self.tau >= 0:
            raise ValueError("FlowState time tau must be nonnegative.")


class IntegratorBase(metaclass=ABCMeta):
    """
    Explicit time stepper for a Lie-algebra valued evolution dA/dt = rhs(A).

    ``rhs`` maps raw potential values of shape (m, *extents, n, n) to an array
    of the same shape. Subclasses implement ``compute_increment``; ``step``
    checks the stability bound, re-projects onto skew-Hermitian matrices and
    records how far the update drifted before the projection.
    """

    def __init__(self, grid, rhs, cfl_fraction=0.1, verbose=False):
        if not 0 < cfl_fraction:
            raise ValueError("cfl_fraction must be positive.")
        self.grid = grid
        self.rhs = rhs
        self.cfl_fraction = cfl_fraction
        self.verbose = verbose

        self.last_drift = 0.0
        self.steps_taken = 0

    @property
    def dt_max(self):
        return self.cfl_fraction * self.grid.h**2

    def check_step(self, dt):
        if not (dt > 0 and dt <= self.dt_max * (1 + 1e-12)):
            raise StepRejectedError(dt, self.dt_max)

    def step(self, state, dt, rhs0=None):
        """
        Advance ``state`` (a FlowState) by ``dt``.

        ``rhs0`` optionally supplies rhs(state.A.values) when the caller already
        has it.
        """
        self.check_step(dt)
        if state.A.grid != self.grid:
            raise ValueError("State grid does not match the integrator grid.")
        values = self.compute_increment(state.A.values, dt, rhs0)
        self.last_drift = float(np.max(np.abs(values + dagger(values)))) if values.size else 0.0
        self.steps_taken += 1
        if self.verbose:
            logger.info(
                "step %d: tau = %.6g, skew drift = %.3e",
                self.steps_taken,
                state.tau + dt,
                self.last_drift,
            )
        return FlowState(GaugePotential(self.grid, project_skew_array(values)), state.tau + dt)

    @abstractmethod
    def compute_increment(self, values, dt, rhs0=None):
        # Return the raw values after one step of size dt.
        raise NotImplementedError
