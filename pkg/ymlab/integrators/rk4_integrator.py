# Copyright 2024 ymlab developers

# Licensed under the Apache License, Version 2.0 (the "License"); you may not
# use this file except in compliance with the License. You may obtain a copy of
# the License at http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
# WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
# License for the specific language governing permissions and limitations under
# the License.


from ymlab.integrators.integrator_base import IntegratorBase


class RK4Integrator(IntegratorBase):
    """Classical fourth-order Runge-Kutta."""

    order = 4

    def compute_increment(self, values, dt, rhs0=None):
        k1 = self.rhs(values) if rhs0 is None else rhs0
        k2 = self.rhs(values + 0.5 * dt * k1)
        k3 = self.rhs(values + 0.5 * dt * k2)
        k4 = self.rhs(values + dt * k3)
        return values + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
