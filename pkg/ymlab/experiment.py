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
Experiment configuration, orchestration and persistence.

An experiment is described by one nested dictionary (loaded from YAML and
merged over ``DEFAULT_CONFIG``). ``Experiment`` builds the field source it
names (a flow run or a planted tube), then writes every diagnostic as CSV into
the output directory together with a config echo and a hashed manifest.
"""

import copy
import logging
import math
import os

import numpy as np
import yaml

from ymlab import __version__, reports
from ymlab.density import (
    DensityEvaluator,
    QuadratureConfig,
    default_rho_ladder,
    global_density_ratio,
    lipschitz_modulus,
    lipschitz_uniformity,
    monotonicity_constant,
    rescaling_check,
    sample_ball,
)
from ymlab.exceptions import ConfigError
from ymlab.geometry import Plane, SyntheticTube, grassmann_sample
from ymlab.integrators.initial_data import INITIAL_KINDS, make_initial
from ymlab.integrators.yang_mills_flow import INTEGRATORS, FlowConfig, run_flow
from ymlab.interfaces import SnapshotInterface, StaticFieldInterface
from ymlab.lattice import Grid, curvature, energy_density
from ymlab.presets import get_preset
from ymlab.singular_set import (
    calibrate_tube_epsilon,
    cone_concentration_test,
    directional_density_test,
    extract_singular_set,
    liminf_field,
    pde_residual,
    slice_finiteness_fraction,
    slice_ladder,
)
from ymlab.snapshot_io import write_snapshot
from ymlab.utilities import file_sha256

logger = logging.getLogger(__name__)

IDENTITY_QUADRATURE = QuadratureConfig(r_trunc=8.0, tail_tolerance=1e-4)
IDENTITY_TOLERANCES = {
    "dissipation": 1e-3,
    "energy_inequality": 0.0,
    "rescaling": 1e-4,
    "global_integral": 1e-4,
    "monotonicity": 1e3,
}

DEFAULT_CONFIG = {
    "grid": {"m": 3, "extents": [16, 16, 16], "h": 0.2},
    "group": {"n": 1},
    "flow": {
        "integrator": "rk4",
        "T": 0.05,
        "dt": None,
        "cfl_fraction": 0.1,
        "snapshot_cadence": 1,
        "growth_limit": 0.01,
        "residual_tolerance": 1e-3,
        "initial": {"kind": "flat", "seed": 0, "amplitude": 1.0, "wave_numbers": None},
    },
    "density": {
        "rho_ladder": None,
        "r_trunc": 8.0,
        "tail_tolerance": 1e-4,
        "J": 3,
        "tau": None,
        "lipschitz": {"radius": 1.0, "pair_count": 16, "seed": 0},
    },
    "singular": {
        "source": "flow",
        "epsilon": 1.0,
        "tau": None,
        "s_list": [0.1, 0.3, 0.5],
        "r_ladder": None,
        "t_grid": [0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0],
        "plane_samples": 50,
        "seed": 0,
        "tube": {"alpha": 4.0, "r0": None, "amplitude": 1.0, "plane_axes": None},
    },
    "output": {"directory": "ymlab_output", "formats": ["csv", "ymf1"]},
}

def deep_merge(base, overlay, path=""):
    """Copy of ``base`` updated with ``overlay``; unknown keys are configuration errors."""
    merged = copy.deepcopy(base)
    if overlay is None:
        return merged
    if not isinstance(overlay, dict):
        raise ConfigError(path or "config", "expected a mapping, got %r" % (overlay,))
    for key, value in overlay.items():
        field = "%s.%s" % (path, key) if path else str(key)
        if key not in merged:
            raise ConfigError(field, "unknown key")
        if isinstance(merged[key], dict):
            merged[key] = deep_merge(merged[key], value, field)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def _is_number(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)


def _is_int(value):
    return isinstance(value, int) and not isinstance(value, bool)


def _require(condition, field, message):
    if not condition:
        raise ConfigError(field, message)


def _validate_scales(values, field, minimum=1):
    _require(isinstance(values, list) and len(values) >= minimum, field,
             "must be a list of at least %d positive numbers" % minimum)
    _require(all(_is_number(v) and v > 0 for v in values), field, "entries must be positive")
    _require(all(b < a for a, b in zip(values, values[1:])), field, "must be strictly descending")


def validate_config(config):
    """Merge ``config`` over DEFAULT_CONFIG and check every field; returns the merged dict."""
    config = deep_merge(DEFAULT_CONFIG, config)

    grid = config["grid"]
    _require(_is_int(grid["m"]) and grid["m"] >= 2, "grid.m", "must be an integer >= 2")
    m = grid["m"]
    _require(isinstance(grid["extents"], list) and len(grid["extents"]) == m, "grid.extents",
             "must list m = %d extents" % m)
    _require(all(_is_int(e) and e >= 4 for e in grid["extents"]), "grid.extents",
             "entries must be integers >= 4")
    _require(_is_number(grid["h"]) and grid["h"] > 0, "grid.h", "must be positive")
    _require(_is_int(config["group"]["n"]) and config["group"]["n"] >= 1, "group.n",
             "must be an integer >= 1")

    flow = config["flow"]
    _require(flow["integrator"] in INTEGRATORS, "flow.integrator",
             "must be one of %s" % ", ".join(sorted(INTEGRATORS)))
    _require(_is_number(flow["T"]) and flow["T"] >= 0, "flow.T", "must be a number >= 0")
    _require(flow["dt"] is None or (_is_number(flow["dt"]) and flow["dt"] > 0), "flow.dt",
             "must be null or positive")
    _require(_is_number(flow["cfl_fraction"]) and flow["cfl_fraction"] > 0, "flow.cfl_fraction",
             "must be positive")
    _require(_is_int(flow["snapshot_cadence"]) and flow["snapshot_cadence"] >= 1,
             "flow.snapshot_cadence", "must be an integer >= 1")
    _require(_is_number(flow["growth_limit"]) and flow["growth_limit"] > 0, "flow.growth_limit",
             "must be positive")
    _require(_is_number(flow["residual_tolerance"]) and flow["residual_tolerance"] > 0,
             "flow.residual_tolerance", "must be positive")
    initial = flow["initial"]
    _require(initial["kind"] in INITIAL_KINDS, "flow.initial.kind",
             "must be one of %s" % ", ".join(INITIAL_KINDS))
    _require(_is_int(initial["seed"]) and initial["seed"] >= 0, "flow.initial.seed",
             "must be a nonnegative integer")
    _require(_is_number(initial["amplitude"]) and initial["amplitude"] >= 0,
             "flow.initial.amplitude", "must be a number >= 0")
    waves = initial["wave_numbers"]
    _require(waves is None or (isinstance(waves, list) and len(waves) == m
                               and all(_is_int(w) for w in waves)),
             "flow.initial.wave_numbers", "must be null or a list of m = %d integers" % m)
    if flow["T"] > 0:
        try:
            FlowConfig(
                T=flow["T"],
                dt=flow["dt"],
                cfl_fraction=flow["cfl_fraction"],
                snapshot_cadence=flow["snapshot_cadence"],
            ).step_plan(grid["h"])
        except ValueError as error:
            raise ConfigError("flow.dt", str(error)) from error
        dt_max = flow["cfl_fraction"] * grid["h"] ** 2
        _require(flow["dt"] is None or flow["dt"] <= dt_max * (1 + 1e-12), "flow.dt",
                 "exceeds cfl_fraction * h**2 = %g" % dt_max)

    density = config["density"]
    if density["rho_ladder"] is not None:
        _validate_scales(density["rho_ladder"], "density.rho_ladder", minimum=3)
    _require(_is_number(density["r_trunc"]) and density["r_trunc"] > 0, "density.r_trunc",
             "must be positive")
    _require(_is_number(density["tail_tolerance"]) and density["tail_tolerance"] > 0,
             "density.tail_tolerance", "must be positive")
    ladder_length = 3 if density["rho_ladder"] is None else len(density["rho_ladder"])
    _require(_is_int(density["J"]) and 1 <= density["J"] <= ladder_length, "density.J",
             "must be an integer between 1 and the ladder length")
    _require(density["tau"] is None or (_is_number(density["tau"]) and density["tau"] > 0),
             "density.tau", "must be null or positive")
    lipschitz = density["lipschitz"]
    _require(_is_number(lipschitz["radius"]) and lipschitz["radius"] > 0,
             "density.lipschitz.radius", "must be positive")
    _require(_is_int(lipschitz["pair_count"]) and lipschitz["pair_count"] >= 1,
             "density.lipschitz.pair_count", "must be an integer >= 1")
    _require(_is_int(lipschitz["seed"]) and lipschitz["seed"] >= 0, "density.lipschitz.seed",
             "must be a nonnegative integer")

    singular = config["singular"]
    _require(singular["source"] in ("flow", "tube"), "singular.source", "must be 'flow' or 'tube'")
    epsilon = singular["epsilon"]
    _require(epsilon == "auto" or (_is_number(epsilon) and epsilon >= 0) or epsilon == math.inf,
             "singular.epsilon", "must be a number >= 0 or 'auto'")
    _require(epsilon != "auto" or singular["source"] == "tube", "singular.epsilon",
             "'auto' needs a planted tube source")
    _require(singular["tau"] is None or (_is_number(singular["tau"]) and singular["tau"] > 0),
             "singular.tau", "must be null or positive")
    _require(isinstance(singular["s_list"], list) and all(
        _is_number(s) and 0 < s < 1 for s in singular["s_list"]), "singular.s_list",
        "entries must lie in (0, 1)")
    if singular["r_ladder"] is not None:
        _validate_scales(singular["r_ladder"], "singular.r_ladder")
    _require(isinstance(singular["t_grid"], list) and len(singular["t_grid"]) > 0
             and all(_is_number(t) for t in singular["t_grid"]), "singular.t_grid",
             "must be a nonempty list of numbers")
    _require(_is_int(singular["plane_samples"]) and singular["plane_samples"] >= 0,
             "singular.plane_samples", "must be a nonnegative integer")
    _require(_is_int(singular["seed"]) and singular["seed"] >= 0, "singular.seed",
             "must be a nonnegative integer")
    tube = singular["tube"]
    _require(_is_number(tube["alpha"]) and tube["alpha"] > 0, "singular.tube.alpha",
             "must be positive")
    _require(tube["r0"] is None or (_is_number(tube["r0"]) and tube["r0"] >= 2 * grid["h"]),
             "singular.tube.r0", "must be null or at least 2h")
    _require(_is_number(tube["amplitude"]) and tube["amplitude"] >= 0,
             "singular.tube.amplitude", "must be a number >= 0")
    axes = tube["plane_axes"]
    _require(axes is None or (isinstance(axes, list) and len(set(axes)) == len(axes)
                              and all(_is_int(a) and 0 <= a < m for a in axes)
                              and len(axes) < m),
             "singular.tube.plane_axes", "must be null or distinct axis indices below m")

    output = config["output"]
    _require(isinstance(output["directory"], str) and output["directory"], "output.directory",
             "must be a nonempty path")
    _require(isinstance(output["formats"], list) and set(output["formats"]) <= {"csv", "ymf1"},
             "output.formats", "entries must be 'csv' or 'ymf1'")
    return config


def load_config(path=None, preset=None, seed=None):
    """Preset (if any), then the YAML file (if any), then the seed override; validated."""
    config = {}
    if preset is not None:
        try:
            config = get_preset(preset)
        except KeyError as error:
            raise ConfigError("preset", str(error.args[0])) from error
    if path is not None:
        with open(path) as handle:
            overlay = yaml.safe_load(handle) or {}
        config = deep_merge(validate_config(config), overlay)
    if seed is not None:
        config = deep_merge(validate_config(config), {
            "flow": {"initial": {"seed": seed}},
            "singular": {"seed": seed},
        })
    return validate_config(config)


def echo_config(config, directory):
    path = os.path.join(directory, "config_echo.yaml")
    with open(path, "w") as handle:
        yaml.safe_dump(config, handle, sort_keys=True)
    return path


def write_manifest(directory):
    """manifest.yaml listing every other file in ``directory`` with its sha256."""
    files = []
    for root, _, names in os.walk(directory):
        for name in sorted(names):
            path = os.path.join(root, name)
            relative = os.path.relpath(path, directory)
            if relative == "manifest.yaml":
                continue
            files.append(
                {"path": relative, "sha256": file_sha256(path), "bytes": os.path.getsize(path)}
            )
    files.sort(key=lambda entry: entry["path"])
    path = os.path.join(directory, "manifest.yaml")
    with open(path, "w") as handle:
        yaml.safe_dump({"ymlab_version": __version__, "files": files}, handle, sort_keys=True)
    return path


def _status(ok):
    return "PASS" if ok else "FAIL"


class Experiment:
    """
    One configured experiment: a field source plus the diagnostics run on it.

    Every public diagnostic writes its CSV into the output directory and returns
    the lines of its human-readable summary.
    """

    def __init__(self, config, output_dir=None, workers=1, verbose=False):
        self.config = validate_config(config)
        self.output_dir = output_dir or self.config["output"]["directory"]
        self.workers = max(1, int(workers))
        self.verbose = verbose
        os.makedirs(self.output_dir, exist_ok=True)
        echo_config(self.config, self.output_dir)

        grid = self.config["grid"]
        self.grid = Grid(m=grid["m"], extents=tuple(grid["extents"]), h=grid["h"])
        self.n = self.config["group"]["n"]
        density = self.config["density"]
        self.quad = QuadratureConfig(density["r_trunc"], density["tail_tolerance"])
        self.j = density["J"]
        self.failures = []

        self._flow = None
        self._source = None
        self._singular = None

    def path(self, name):
        return os.path.join(self.output_dir, name)

    def _log(self, message, *args):
        if self.verbose:
            logger.info(message, *args)
        else:
            logger.debug(message, *args)

    # Field sources

    def flow_config(self):
        flow = self.config["flow"]
        return FlowConfig(
            T=flow["T"],
            dt=flow["dt"],
            cfl_fraction=flow["cfl_fraction"],
            snapshot_cadence=flow["snapshot_cadence"],
            integrator=flow["integrator"],
            growth_limit=flow["growth_limit"],
            residual_tolerance=flow["residual_tolerance"],
        )

    def initial_potential(self):
        initial = self.config["flow"]["initial"]
        options = {}
        if initial["kind"] == "abelian_wave" and initial["wave_numbers"] is not None:
            options["wave_numbers"] = tuple(initial["wave_numbers"])
        return make_initial(
            self.grid, self.n, initial["kind"], initial["seed"], initial["amplitude"], **options
        )

    def flow(self):
        """Run the configured flow once; writes the ledger and the snapshots."""
        if self._flow is None:
            snapshots, ledger = run_flow(self.flow_config(), self.initial_potential(), self.verbose)
            formats = self.config["output"]["formats"]
            if "csv" in formats:
                ledger.write_csv(self.path("ledger.csv"))
            if "ymf1" in formats:
                os.makedirs(self.path("snapshots"), exist_ok=True)
                for index, state in enumerate(snapshots):
                    name = os.path.join("snapshots", "snapshot_%05d.ymf1" % index)
                    write_snapshot(self.path(name), state.A, state.tau)
            self._flow = (snapshots, ledger)
        return self._flow

    def tube(self):
        tube = self.config["singular"]["tube"]
        axes = tube["plane_axes"]
        if axes is None:
            axes = list(range(max(self.grid.m - 4, 0)))
        r0 = 2.0 * self.grid.h if tube["r0"] is None else tube["r0"]
        return SyntheticTube(
            Plane.coordinate(self.grid.m, axes),
            tuple(self.grid.center),
            r0,
            tube["alpha"],
            tube["amplitude"],
        )

    def source(self):
        """Returns ``(evaluator, tau, ym0)`` for the configured field source."""
        if self._source is None:
            if self.config["singular"]["source"] == "tube":
                e = self.tube().density(self.grid)
                interface = StaticFieldInterface(e)
                tau = self.config["singular"]["tau"] or 1.0 + 2.0 * max(self.rho_ladder()) ** 2
                ym0 = e.total()
            else:
                snapshots, ledger = self.flow()
                interface = SnapshotInterface(snapshots, verbose=self.verbose)
                interface.check_spacing(min(self.rho_ladder()))
                tau = snapshots[-1].tau
                ym0 = ledger.ym0
            if self.config["density"]["tau"] is not None:
                tau = self.config["density"]["tau"]
            evaluator = DensityEvaluator(interface, self.quad, self.workers, self.verbose)
            self._source = (evaluator, tau, ym0)
        return self._source

    def rho_ladder(self):
        ladder = self.config["density"]["rho_ladder"]
        return list(ladder) if ladder is not None else default_rho_ladder(self.grid, self.quad)

    def probe_point(self):
        return np.array(self.grid.center, dtype=float)

    def final_density(self):
        if self.config["singular"]["source"] == "tube":
            return self.tube().density(self.grid)
        snapshots, _ = self.flow()
        return energy_density(curvature(snapshots[-1].A))

    # Diagnostics

    def flow_run(self):
        snapshots, ledger = self.flow()
        increases = ledger.increases()
        lines = [
            "flow: %d ledger rows, %d snapshots" % (len(ledger.rows), len(snapshots)),
            "YM(0) = %.12g, YM(T) = %.12g" % (ledger.ym0, ledger.rows[-1].ym),
            "relative energy residual = %.3e" % ledger.relative_residual(),
            "energy increases: %d" % len(increases),
        ]
        return lines

    def density_ladder(self):
        evaluator, tau, _ = self.source()
        ladder = evaluator.ladder(self.probe_point(), tau, self.rho_ladder())
        rows = [{"rho": r, "theta": v} for r, v in zip(ladder.scales, ladder.values)]
        reports.write_csv(self.path("ladder.csv"), reports.LADDER_FIELDS, rows)
        return ["ladder at z = grid center, tau = %g: %s" % (
            tau, ", ".join("%.6g" % v for v in ladder.values))]

    def density_probe(self, probes_path):
        evaluator, _, _ = self.source()
        probes = reports.read_probes(probes_path, self.grid.m)
        rows = []
        for z, tau, rho in probes:
            value = evaluator.theta(z, tau, rho)
            rows.append(reports.point_row(z, tau=tau, rho=rho, theta=value))
        reports.write_csv(
            self.path("probes_theta.csv"), reports.probe_result_fields(self.grid.m), rows
        )
        return ["density-probe: %d probes evaluated" % len(rows)]

    def epsilon(self):
        epsilon = self.config["singular"]["epsilon"]
        if epsilon != "auto":
            return float(epsilon)
        evaluator, tau, _ = self.source()
        _, liminf = liminf_field(evaluator, tau, self.rho_ladder(), self.j)
        distance = self.tube().distance_field(self.grid)
        half = 0.5 * self.grid.h
        return calibrate_tube_epsilon(liminf, distance, half, half)

    def singular_extract(self, epsilon=None):
        evaluator, tau, _ = self.source()
        epsilon = self.epsilon() if epsilon is None else float(epsilon)
        S = extract_singular_set(evaluator, self.grid, tau, epsilon, self.rho_ladder(), self.j)
        reports.write_csv(
            self.path("singular_set.csv"), reports.singular_set_fields(self.grid.m), S.as_rows()
        )
        self._singular = S
        return ["singular set at tau = %g, epsilon = %.6g: %d sites" % (tau, epsilon, len(S))]

    def diag_monotonicity(self):
        evaluator, tau, ym0 = self.source()
        ladder = evaluator.ladder(self.probe_point(), tau, self.rho_ladder())
        constant, rows = monotonicity_constant(ladder, ym0)
        reports.write_csv(self.path("monotonicity.csv"), reports.MONOTONICITY_FIELDS, rows)
        ok = constant <= IDENTITY_TOLERANCES["monotonicity"]
        if not ok:
            self.failures.append("monotonicity")
        return ["%s monotonicity: C = %.6g (cap %.0e)" % (
            _status(ok), constant, IDENTITY_TOLERANCES["monotonicity"])]

    def cone_direction(self, inside_plane=True):
        if self.config["singular"]["source"] == "tube":
            plane = self.tube().plane
            if inside_plane and plane.k:
                return Plane(self.grid.m, plane.frame[:1])
            axes = np.eye(self.grid.m)
            axis = next(a for a in range(self.grid.m) if plane.distance(axes[a]) > 0.5)
            return Plane.coordinate(self.grid.m, [axis])
        return Plane.coordinate(self.grid.m, [0 if inside_plane else 1])

    def r_ladder(self):
        r_ladder = self.config["singular"]["r_ladder"]
        if r_ladder is not None:
            return list(r_ladder)
        radii, r = [], self.grid.half_period
        while r >= 4.0 * self.grid.h * (1 - 1e-12):
            radii.append(r)
            r /= 2.0
        return radii or [4.0 * self.grid.h]

    def diag_cone(self):
        if self._singular is None:
            self.singular_extract()
        S = self._singular
        evaluator, tau, _ = self.source()
        z_bar = self.probe_point()
        W = self.cone_direction()
        radii = self.r_ladder()
        rows = []
        for s in self.config["singular"]["s_list"]:
            hits = cone_concentration_test(S, z_bar, W, s, radii)
            for r, hit in zip(radii, hits):
                rows.append({"r": r, "s": s, "nonempty": int(hit)})
        reports.write_csv(self.path("cone.csv"), reports.CONE_FIELDS, rows)
        t_grid = self.config["singular"]["t_grid"]
        scales = self.rho_ladder()
        omega = self.cone_direction(False).frame[0]
        along = directional_density_test(evaluator, z_bar, W.frame[0], t_grid, scales, tau, self.j)
        across = directional_density_test(evaluator, z_bar, omega, t_grid, scales, tau, self.j)
        hit_count = sum(row["nonempty"] for row in rows)
        return [
            "cone tests: %d of %d (r, s) pairs nonempty" % (hit_count, len(rows)),
            "directional density: along %.6g, across %.6g" % (along, across),
        ]

    def diag_slice(self):
        if self.grid.m < 4:
            return ["slice: skipped (m < 4)"]
        evaluator, tau, _ = self.source()
        singular = self.config["singular"]
        rng = np.random.default_rng(singular["seed"])
        planes = [grassmann_sample(self.grid.m, 4, rng) for _ in range(singular["plane_samples"])]
        if not planes:
            return ["slice: skipped (no plane samples)"]
        scales = self.rho_ladder()
        table = slice_ladder(evaluator, self.probe_point(), planes, scales, tau)
        rows = [
            {"plane_id": p, "rho": rho, "slice_value": float(table[p, k])}
            for p in range(len(planes))
            for k, rho in enumerate(scales)
        ]
        reports.write_csv(self.path("slice.csv"), reports.SLICE_FIELDS, rows)
        reports.write_csv(
            self.path("planes.csv"), reports.plane_fields(self.grid.m), reports.plane_rows(planes)
        )
        fraction = slice_finiteness_fraction(table)
        ok = fraction >= 0.9
        if not ok:
            self.failures.append("slice")
        return [
            "%s slice finiteness: %.0f%% of %d planes" % (_status(ok), 100 * fraction, len(planes))
        ]

    def diag_pde(self, refinements=3):
        evaluator, tau, _ = self.source()
        scales = self.rho_ladder()
        rho = scales[len(scales) // 2]
        z = self.probe_point()
        support_radius = self.quad.r_trunc * rho
        oracle = None
        if self.config["singular"]["source"] == "tube":
            # a static density solves the evolution with residual exactly theta / rho^2
            oracle = evaluator(z, tau, rho) / rho**2
        rows, residuals = [], []
        widths = (0.5 * self.grid.h, rho**2 / 20.0, rho / 20.0)
        for level in range(refinements):
            factor = 2.0**-level
            residual = pde_residual(
                evaluator, z, tau, rho, tuple(w * factor for w in widths), support_radius
            )
            residuals.append(residual)
            rows.append(reports.point_row(z, tau=tau, rho=rho, residual=residual, oracle=oracle))
        fields = reports.pde_residual_fields(self.grid.m)
        reports.write_csv(self.path("pde_residual.csv"), fields, rows)
        self._log("density-evolution residuals under stencil refinement: %s", residuals)
        line = "pde residual at rho = %.4g: %s" % (rho, ", ".join("%.4e" % r for r in residuals))
        if oracle is not None:
            line += " (static oracle %.4e)" % oracle
        return [line]

    def identity_suite(self):
        rows = []

        def record(check, value, tolerance, ok):
            rows.append(
                {"check": check, "value": value, "tolerance": tolerance, "status": _status(ok)}
            )
            if not ok:
                self.failures.append(check)

        if self.config["singular"]["source"] == "flow" and self.config["flow"]["T"] > 0:
            _, ledger = self.flow()
            residual = ledger.relative_residual()
            tol = IDENTITY_TOLERANCES["dissipation"]
            record("dissipation", residual, tol, residual <= tol)
            increases = len(ledger.increases())
            record("energy_inequality", increases, 0, increases == 0)

        e = self.final_density()
        half = self.grid.half_period
        rng = np.random.default_rng(self.config["singular"]["seed"])
        rho = min(min(self.rho_ladder()), half / (math.sqrt(2.0) * IDENTITY_QUADRATURE.r_trunc))
        worst = 0.0
        for _ in range(10):
            offset = rng.random(self.grid.m) * np.array(self.grid.lengths)
            z_bar = np.array(self.grid.origin) + offset
            x = sample_ball(rng, self.grid.m, 1.0, 1)[0]
            worst = max(worst, rescaling_check(e, z_bar, x, rho, IDENTITY_QUADRATURE))
        tol = IDENTITY_TOLERANCES["rescaling"]
        record("rescaling", worst, tol, worst <= tol)

        rho_max = half / IDENTITY_QUADRATURE.r_trunc
        worst = 0.0
        for factor in (1.0, 0.9, 0.8):
            ratio = global_density_ratio(e, factor * rho_max, IDENTITY_QUADRATURE)
            worst = max(worst, abs(ratio - 1.0))
        tol = IDENTITY_TOLERANCES["global_integral"]
        record("global_integral", worst, tol, worst <= tol)

        reports.write_csv(self.path("identity.csv"), reports.IDENTITY_FIELDS, rows)
        return ["%s %s: %.3e (tolerance %g)" % (r["status"], r["check"], r["value"], r["tolerance"])
                for r in rows]

    def diag_lipschitz(self):
        evaluator, tau, _ = self.source()
        lipschitz = self.config["density"]["lipschitz"]
        moduli = []
        for rho in self.rho_ladder():
            e = evaluator.interface.density_at(tau, rho)
            moduli.append(lipschitz_modulus(
                e, self.probe_point(), rho, lipschitz["radius"], lipschitz["pair_count"],
                lipschitz["seed"], self.quad, self.workers,
            ))
        ok, ratio = lipschitz_uniformity(moduli)
        return ["%s lipschitz uniformity: finer/coarsest modulus ratio %.3g" % (_status(ok), ratio)]

    def finish(self):
        write_manifest(self.output_dir)

    def run(self):
        lines = []
        if self.config["singular"]["source"] == "flow":
            lines += self.flow_run()
        lines += self.density_ladder()
        lines += self.identity_suite()
        lines += self.diag_monotonicity()
        lines += self.diag_lipschitz()
        lines += self.singular_extract()
        lines += self.diag_cone()
        lines += self.diag_slice()
        lines += self.diag_pde()
        self.finish()
        return lines


def run_experiment(config, output_dir=None, workers=1, verbose=False):
    """Run every diagnostic of ``config``; returns ``(experiment, summary_lines)``."""
    experiment = Experiment(config, output_dir, workers, verbose)
    lines = experiment.run()
    return experiment, lines
