# Copyright 2024 ymlab developers

# Licensed under the Apache License, Version 2.0 (the "License"); you may not
# use this file except in compliance with the License. You may obtain a copy of
# the License at http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
# WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
# License for the specific language governing permissions and limitations under
# the License.


# Run with the demo extra installed: pip install "ymlab/[demo]"

import matplotlib.pyplot as plt
import numpy as np

from ymlab.density import DensityEvaluator, QuadratureConfig
from ymlab.integrators import FlowConfig, run_flow
from ymlab.integrators.initial_data import make_initial
from ymlab.integrators.yang_mills_flow import discrete_symbol_norm2
from ymlab.interfaces import SnapshotInterface
from ymlab.lattice import Grid

grid = Grid(m=3, extents=(16, 16, 16), h=0.2)
A0 = make_initial(grid, 1, "abelian_wave", seed=3, wave_numbers=(1, 0, 0))

snapshots, ledger = run_flow(FlowConfig(T=0.1, dt=0.002, snapshot_cadence=5), A0)

# The abelian wave is an eigenmode of the lattice operator, so the energy decays
# exactly as exp(-2 |k_d|^2 tau).
rows = ledger.as_dicts()
tau = np.array([row["tau"] for row in rows])
ym = np.array([row["ym"] for row in rows])
dissipation = np.array([row["dissipation_cum"] for row in rows])
predicted = ledger.ym0 * np.exp(-2.0 * discrete_symbol_norm2(grid, (1, 0, 0)) * tau)

# Density ladder at the grid center, at the final time
evaluator = DensityEvaluator(SnapshotInterface(snapshots), QuadratureConfig())
scales = [0.2, 0.2 / np.sqrt(2.0), 0.1]
ladder = evaluator.ladder(grid.center, tau[-1], scales)

fig, ax = plt.subplots(2, 1)
ax[0].plot(tau, ym, color="C0", label="YM")
ax[0].plot(tau, predicted, color="black", linestyle="--", label="exp(-2|k_d|^2 tau)")
ax[0].plot(tau, ym + dissipation, color="C1", label="YM + dissipation")
ax[0].set_xlabel("tau")
ax[0].set_ylabel("Energy")
ax[0].grid()
ax[0].legend()

ax[1].plot(ladder.scales, ladder.values, marker="o", color="C0")
ax[1].set_xlabel("rho")
ax[1].set_ylabel("theta at grid center")
ax[1].invert_xaxis()
ax[1].grid()

print("relative energy residual: %.3e" % ledger.relative_residual())
plt.show()
