# Copyright 2024 ymlab developers

# Licensed under the Apache License, Version 2.0 (the "License"); you may not
# use this file except in compliance with the License. You may obtain a copy of
# the License at http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
# WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
# License for the specific language governing permissions and limitations under
# the License.

from ymlab.integrators.forward_euler_integrator import ForwardEulerIntegrator
from ymlab.integrators.integrator_base import FlowState, IntegratorBase
from ymlab.integrators.rk4_integrator import RK4Integrator
from ymlab.integrators.yang_mills_flow import (
    DISSIPATION_FACTOR,
    INTEGRATORS,
    EnergyLedger,
    FlowConfig,
    flow_rhs,
    run_flow,
)
