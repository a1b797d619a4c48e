# Copyright 2024 ymlab developers

# Licensed under the Apache License, Version 2.0 (the "License"); you may not
# use this file except in compliance with the License. You may obtain a copy of
# the License at http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
# WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
# License for the specific language governing permissions and limitations under
# the License.


"""
Semi-discrete Yang-Mills flow dA/dt = -nabla* F(A) with its energy ledger.

With |F|^2 summed over ordered pairs, d/dt YM = -4 ||dA/dt||^2 holds exactly
for the lattice operators, so the ledger accumulates 4 * int ||dA/dt||^2.
"""

import logging
import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from ymlab.exceptions import FlowInstabilityError
from ymlab.integrators.forward_euler_integrator import ForwardEulerIntegrator
from ymlab.integrators.integrator_base import FlowState
from ymlab.integrators.rk4_integrator import RK4Integrator
from ymlab.lattice import (
    GaugePotential,
    curvature,
    curvature_values,
    divergence_star_values,
    energy_density,
)
from ymlab.lie_algebra import killing_form
from ymlab.reports import LEDGER_FIELDS, write_csv

logger = logging.getLogger(__name__)

DISSIPATION_FACTOR = 4.0

INTEGRATORS = {
    "rk4": RK4Integrator,
    "forward_euler": ForwardEulerIntegrator,
}


def flow_rhs_values(grid, a):
    f = curvature_values(grid, a)
    pairs = {pair: p for p, pair in enumerate(combinations(range(grid.m), 2))}
    zero = np.zeros_like(a[0])

    def component(mu, nu):
        if mu == nu:
            return zero
        if mu < nu:
            return f[pairs[(mu, nu)]]
        return -f[pairs[(nu, mu)]]

    return -divergence_star_values(grid, a, component)


def flow_rhs(A):
    """-nabla* F(A), shaped like the potential."""
    return GaugePotential(A.grid, flow_rhs_values(A.grid, A.values))


def rhs_norm2(grid, values):
    return grid.volume_element * float(np.sum(killing_form(values, values, check=False)))


def ym_of_values(grid, a):
    return energy_density(curvature(GaugePotential(grid, a))).total()


def discrete_symbol_norm2(grid, wave_numbers):
    """|k_d|^2 = sum_mu sin^2(k_mu h) / h^2 for k_mu = 2 pi n_mu / L_mu."""
    total = 0.0
    for n_mu, length in zip(wave_numbers, grid.lengths):
        k = 2.0 * math.pi * n_mu / length
        total += math.sin(k * grid.h) ** 2 / grid.h**2
    return total


@dataclass(frozen=True)
class FlowConfig:
    T: float
    dt: float = None
    cfl_fraction: float = 0.1
    snapshot_cadence: int = 1
    integrator: str = "rk4"
    growth_limit: float = 0.01
    residual_tolerance: float = 1e-3

    def __post_init__(self):
        if not self.T >= 0:
            raise ValueError("flow.T must be nonnegative.")
        if self.dt is not None and not self.dt > 0:
            raise ValueError("flow.dt must be positive.")
        if int(self.snapshot_cadence) != self.snapshot_cadence or self.snapshot_cadence < 1:
            raise ValueError("flow.snapshot_cadence must be a positive integer.")
        if self.integrator not in INTEGRATORS:
            raise ValueError(
                "flow.integrator must be one of %s, got %r."
                % (sorted(INTEGRATORS), self.integrator)
            )

    def step_plan(self, h):
        """Returns ``(n_steps, dt)`` covering [0, T] with the cadence dividing n_steps."""
        cadence = int(self.snapshot_cadence)
        if self.T == 0:
            return 0, 0.0
        if self.dt is None:
            dt_max = self.cfl_fraction * h**2
            n_steps = max(1, math.ceil(self.T / dt_max - 1e-9))
            n_steps = cadence * math.ceil(n_steps / cadence)
            return n_steps, self.T / n_steps
        n_steps = int(round(self.T / self.dt))
        if n_steps < 1 or abs(n_steps * self.dt - self.T) > 1e-9 * self.T:
            raise ValueError(
                "flow.dt = %g does not divide T = %g into whole steps." % (self.dt, self.T)
            )
        if n_steps % cadence:
            raise ValueError(
                "flow.snapshot_cadence = %d does not divide the step count %d." % (cadence, n_steps)
            )
        return n_steps, self.T / n_steps


@dataclass(frozen=True)
class LedgerRow:
    tau: float
    ym: float
    dissipation_cum: float
    residual: float


class EnergyLedger:
    """Per-step record of YM(tau) and the accumulated dissipation."""

    def __init__(self):
        self.rows = []

    def append(self, tau, ym, dissipation_cum):
        ym0 = self.rows[0].ym if self.rows else ym
        self.rows.append(LedgerRow(tau, ym, dissipation_cum, ym + dissipation_cum - ym0))

    @property
    def ym(self):
        return np.array([row.ym for row in self.rows])

    @property
    def ym0(self):
        return self.rows[0].ym

    def relative_residual(self):
        if not self.rows or self.ym0 == 0:
            return 0.0
        return abs(self.rows[-1].residual) / self.ym0

    def increases(self, slack=1e-10):
        """Indices of rows whose energy rose above the previous row beyond ``slack``."""
        ym = self.ym
        return [i for i in range(1, len(ym)) if ym[i] > ym[i - 1] * (1 + slack) + 1e-300]

    def as_dicts(self):
        return [
            {"tau": r.tau, "ym": r.ym, "dissipation_cum": r.dissipation_cum, "residual": r.residual}
            for r in self.rows
        ]

    def write_csv(self, path):
        write_csv(path, LEDGER_FIELDS, self.as_dicts())


def make_integrator(config, grid, verbose=False):
    return INTEGRATORS[config.integrator](
        grid,
        lambda values: flow_rhs_values(grid, values),
        cfl_fraction=config.cfl_fraction,
        verbose=verbose,
    )


def run_flow(config, A0, verbose=False):
    """
    Evolve ``A0`` to time ``config.T``.

    Returns ``(snapshots, ledger)``: the FlowStates at every ``snapshot_cadence``
    steps (the initial and final states included) and one ledger row per step.
    """
    grid = A0.grid
    n_steps, dt = config.step_plan(grid.h)
    integrator = make_integrator(config, grid, verbose=verbose)
    if n_steps:
        integrator.check_step(dt)

    state = FlowState(A0, 0.0)
    ledger = EnergyLedger()
    ym = ym_of_values(grid, state.A.values)
    rhs = flow_rhs_values(grid, state.A.values)
    power = rhs_norm2(grid, rhs)
    dissipation = 0.0
    ledger.append(0.0, ym, dissipation)
    snapshots = [state]
    logger.info("Flow run: %d steps of dt = %.6g, YM(0) = %.6g", n_steps, dt, ym)

    max_drift = 0.0
    for step in range(1, n_steps + 1):
        state = integrator.step(state, dt, rhs0=rhs)
        state = FlowState(state.A, step * dt)
        max_drift = max(max_drift, integrator.last_drift)
        ym_new = ym_of_values(grid, state.A.values)
        if not math.isfinite(ym_new) or ym_new > (1.0 + config.growth_limit) * ym + 1e-300:
            raise FlowInstabilityError(
                "Energy grew from %.6g to %.6g at step %d (tau = %.6g); growth limit %.0f%%."
                % (ym, ym_new, step, state.tau, 100 * config.growth_limit)
            )
        if ym_new > ym * (1 + 1e-10):
            logger.warning("YM increased at step %d: %.12g -> %.12g", step, ym, ym_new)
        rhs = flow_rhs_values(grid, state.A.values)
        power_new = rhs_norm2(grid, rhs)
        dissipation += DISSIPATION_FACTOR * 0.5 * dt * (power + power_new)
        ym, power = ym_new, power_new
        ledger.append(state.tau, ym, dissipation)
        if step % config.snapshot_cadence == 0:
            snapshots.append(state)

    residual = ledger.relative_residual()
    logger.info(
        "Flow done: YM(T) = %.6g, relative energy residual %.3e, max skew drift %.3e",
        ym,
        residual,
        max_drift,
    )
    if residual > config.residual_tolerance:
        logger.warning(
            "Energy ledger residual %.3e exceeds tolerance %.1e",
            residual,
            config.residual_tolerance,
        )
    return snapshots, ledger
