# Copyright 2024 ymlab developers

# Licensed under the Apache License, Version 2.0 (the "License"); you may not
# use this file except in compliance with the License. You may obtain a copy of
# the License at http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
# WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
# License for the specific language governing permissions and limitations under
# the License.

"""Error types raised by the ymlab modules.

All argument errors derive from ``ValueError`` so callers that only care about
"bad input" can catch that; numerical failures derive from ``RuntimeError``.
"""


class DimensionMismatchError(ValueError):
    pass


class StepRejectedError(ValueError):
    """Raised when a time step violates the explicit stability bound."""

    def __init__(self, dt, dt_max):
        self.dt = dt
        self.dt_max = dt_max
        super().__init__(
            "Step dt = %.6g rejected; admissible range is 0 < dt <= %.6g "
            "(cfl_fraction * h**2)." % (dt, dt_max)
        )


class FlowInstabilityError(RuntimeError):
    pass


class InvalidProbeError(ValueError):
    pass


class WrapContaminationError(ValueError):
    pass


class InsufficientLadderError(ValueError):
    pass


class ConfigError(ValueError):
    """Configuration error; ``field`` holds the dotted path of the offending entry."""

    def __init__(self, field, message):
        self.field = field
        super().__init__("%s: %s" % (field, message))
