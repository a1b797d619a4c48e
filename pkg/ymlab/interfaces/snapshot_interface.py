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

import numpy as np

from ymlab.exceptions import InvalidProbeError
from ymlab.integrators.integrator_base import FlowState
from ymlab.interfaces.interface_base import InterfaceBase
from ymlab.lattice import ScalarField, curvature, energy_density
from ymlab.snapshot_io import read_snapshot

logger = logging.getLogger(__name__)


class SnapshotInterface(InterfaceBase):
    """Energy densities of a flow run, linearly interpolated between snapshots."""

    def __init__(self, snapshots, verbose=False):
        if not snapshots:
            raise ValueError("SnapshotInterface needs at least one snapshot.")
        snapshots = sorted(snapshots, key=lambda state: state.tau)
        self._grid = snapshots[0].A.grid
        if any(state.A.grid != self._grid for state in snapshots):
            raise ValueError("Snapshots live on different grids.")
        self.times = np.array([state.tau for state in snapshots])
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("Snapshot times must be distinct.")
        self.densities = [energy_density(curvature(state.A)) for state in snapshots]
        self.verbose = verbose
        if verbose:
            logger.info(
                "Loaded %d snapshots spanning tau in [%g, %g]",
                len(snapshots),
                self.times[0],
                self.times[-1],
            )

    @classmethod
    def from_files(cls, paths, verbose=False):
        states = [FlowState(*read_snapshot(path)) for path in paths]
        return cls(states, verbose=verbose)

    @property
    def grid(self):
        return self._grid

    @property
    def max_spacing(self):
        return float(np.max(np.diff(self.times))) if len(self.times) > 1 else 0.0

    def check_spacing(self, rho_min):
        """Warn when the snapshot spacing exceeds rho_min^2 / 4."""
        ok = self.max_spacing <= rho_min**2 / 4.0
        if not ok:
            logger.warning(
                "Snapshot spacing %.3g exceeds rho_min^2/4 = %.3g; time interpolation error "
                "may dominate the quadrature.",
                self.max_spacing,
                rho_min**2 / 4.0,
            )
        return ok

    def check_probe(self, tau, rho):
        super().check_probe(tau, rho)
        time = tau - rho**2
        slack = 1e-12 * max(1.0, abs(self.times[-1]))
        if time < self.times[0] - slack or time > self.times[-1] + slack:
            raise InvalidProbeError(
                "Invalid probe: time tau - rho^2 = %g lies outside the snapshot span [%g, %g]."
                % (time, self.times[0], self.times[-1])
            )

    def get_energy_density(self, time):
        index = int(np.searchsorted(self.times, time, side="right")) - 1
        index = min(max(index, 0), len(self.times) - 1)
        if index == len(self.times) - 1:
            return self.densities[index]
        t0, t1 = self.times[index], self.times[index + 1]
        weight = min(max((time - t0) / (t1 - t0), 0.0), 1.0)
        if weight == 0.0:
            return self.densities[index]
        values = (1.0 - weight) * self.densities[index].values + weight * self.densities[
            index + 1
        ].values
        return ScalarField(self._grid, values)
