# Copyright 2024 ymlab developers

# Licensed under the Apache License, Version 2.0 (the "License"); you may not
# use this file except in compliance with the License. You may obtain a copy of
# the License at http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
# WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
# License for the specific language governing permissions and limitations under
# the License.


"""Named experiment presets; each is an overlay on ``experiment.DEFAULT_CONFIG``."""

import copy

PRESETS = {
    "flat": {
        "grid": {"m": 3, "extents": [8, 8, 8], "h": 0.25},
        "group": {"n": 1},
        "flow": {"T": 0.01, "initial": {"kind": "flat"}},
        "density": {"rho_ladder": [0.09, 0.08, 0.07]},
        "singular": {"source": "flow", "epsilon": 1.0},
    },
    "abelian-heatwave": {
        "grid": {"m": 3, "extents": [16, 16, 16], "h": 0.2},
        "group": {"n": 1},
        "flow": {
            "T": 0.1,
            "dt": 0.002,
            "initial": {
                "kind": "abelian_wave",
                "seed": 3,
                "amplitude": 1.0,
                "wave_numbers": [1, 0, 0],
            },
        },
        "singular": {"source": "flow", "epsilon": 1.0},
    },
    "su2-identity": {
        "grid": {"m": 3, "extents": [16, 16, 16], "h": 0.2},
        "group": {"n": 2},
        "flow": {
            "T": 0.05,
            "dt": 0.0005,
            "initial": {"kind": "random_bump", "seed": 7, "amplitude": 0.5},
        },
        "singular": {"source": "flow", "epsilon": 1.0},
    },
    "planted-tube": {
        "grid": {"m": 5, "extents": [12, 12, 12, 12, 12], "h": 1.0},
        "group": {"n": 1},
        "flow": {"T": 0.0, "initial": {"kind": "flat"}},
        "density": {"rho_ladder": [1.41, 1.19, 1.0], "r_trunc": 4.0, "tail_tolerance": 0.2},
        "singular": {
            "source": "tube",
            "epsilon": "auto",
            "tau": 100.0,
            "plane_samples": 50,
            "tube": {"alpha": 4.0, "r0": 2.0, "amplitude": 1.0, "plane_axes": [0]},
        },
    },
}


def get_preset(name):
    if name not in PRESETS:
        raise KeyError("Unknown preset %r; available: %s" % (name, ", ".join(sorted(PRESETS))))
    return copy.deepcopy(PRESETS[name])
