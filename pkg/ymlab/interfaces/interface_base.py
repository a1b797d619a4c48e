# Copyright 2024 ymlab developers

# Licensed under the Apache License, Version 2.0 (the "License"); you may not
# use this file except in compliance with the License. You may obtain a copy of
# the License at http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
# WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
# License for the specific language governing permissions and limitations under
# the License.


from abc import ABCMeta, abstractmethod

from ymlab.exceptions import InvalidProbeError


class InterfaceBase(metaclass=ABCMeta):
    """
    Source of energy densities |F|^2 for the density machinery.

    ``density_at(tau, rho)`` validates a probe and returns the ScalarField read
    at time tau - rho^2.
    """

    def density_at(self, tau, rho):
        self.check_probe(tau, rho)
        return self.get_energy_density(tau - rho**2)

    def check_probe(self, tau, rho):
        if not rho > 0:
            raise InvalidProbeError("Invalid probe: rho = %g must be positive." % rho)
        if not rho**2 < tau:
            raise InvalidProbeError(
                "Invalid probe: rho^2 = %g must be smaller than tau = %g." % (rho**2, tau)
            )

    @property
    @abstractmethod
    def grid(self):
        raise NotImplementedError

    @abstractmethod
    def get_energy_density(self, time):
        raise NotImplementedError
