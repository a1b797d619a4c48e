# Copyright 2024 ymlab developers

# Licensed under the Apache License, Version 2.0 (the "License"); you may not
# use this file except in compliance with the License. You may obtain a copy of
# the License at http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
# WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
# License for the specific language governing permissions and limitations under
# the License.


import math
import os

import numpy as np
import pytest
import yaml

from ymlab import __version__
from ymlab.exceptions import ConfigError
from ymlab.experiment import (
    DEFAULT_CONFIG,
    Experiment,
    load_config,
    run_experiment,
    validate_config,
)
from ymlab.integrators.yang_mills_flow import discrete_symbol_norm2
from ymlab.presets import PRESETS, get_preset
from ymlab.reports import read_csv
from ymlab.utilities import file_sha256


def test_presets_validate():
    for name in PRESETS:
        config = validate_config(get_preset(name))
        assert set(config) == set(DEFAULT_CONFIG)
    with pytest.raises(KeyError):
        get_preset("nonexistent")
    preset = get_preset("flat")
    preset["grid"]["h"] = 99.0
    assert PRESETS["flat"]["grid"]["h"] == 0.25


@pytest.mark.parametrize(
    "overlay, field",
    [
        ({"grid": {"size": 3}}, "grid.size"),
        ({"grid": {"m": 2}}, "grid.extents"),
        ({"grid": {"h": 0}}, "grid.h"),
        ({"group": {"n": 0}}, "group.n"),
        ({"flow": {"T": 0.1, "dt": 0.05}}, "flow.dt"),
        ({"flow": {"T": 0.1, "dt": 0.003}}, "flow.dt"),
        ({"flow": {"initial": {"kind": "vortex"}}}, "flow.initial.kind"),
        ({"density": {"rho_ladder": [0.1, 0.2, 0.3]}}, "density.rho_ladder"),
        ({"density": {"rho_ladder": [0.3, 0.2]}}, "density.rho_ladder"),
        ({"density": {"J": 4}}, "density.J"),
        ({"singular": {"epsilon": "auto"}}, "singular.epsilon"),
        ({"singular": {"s_list": [1.5]}}, "singular.s_list"),
        ({"singular": {"tube": {"r0": 0.1}}}, "singular.tube.r0"),
        ({"output": {"formats": ["hdf5"]}}, "output.formats"),
        ({"flow": 3}, "flow"),
    ],
)
def test_config_errors(overlay, field):
    with pytest.raises(ConfigError) as info:
        validate_config(overlay)
    assert info.value.field == field


def test_load_config(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text(yaml.safe_dump({"flow": {"T": 0.02}}))
    config = load_config(str(path), preset="flat", seed=5)
    assert config["grid"]["extents"] == [8, 8, 8]
    assert config["flow"]["T"] == 0.02
    assert config["flow"]["initial"]["seed"] == 5
    assert config["singular"]["seed"] == 5
    with pytest.raises(ConfigError):
        load_config(preset="nonexistent")


def test_flat_run(tmp_path):
    experiment, lines = run_experiment(get_preset("flat"), str(tmp_path))
    assert experiment.failures == []
    assert any("relative energy residual" in line for line in lines)
    for name in (
        "config_echo.yaml",
        "ledger.csv",
        "ladder.csv",
        "identity.csv",
        "monotonicity.csv",
        "singular_set.csv",
        "cone.csv",
        "pde_residual.csv",
        "manifest.yaml",
        os.path.join("snapshots", "snapshot_00000.ymf1"),
    ):
        assert os.path.exists(tmp_path / name), name
    assert not os.path.exists(tmp_path / "slice.csv")

    ledger = read_csv(tmp_path / "ledger.csv")
    assert [float(row["ym"]) for row in ledger] == [0.0, 0.0, 0.0]
    ladder = read_csv(tmp_path / "ladder.csv")
    assert [float(row["rho"]) for row in ladder] == [0.09, 0.08, 0.07]
    assert all(float(row["theta"]) == 0.0 for row in ladder)
    assert read_csv(tmp_path / "singular_set.csv") == []
    statuses = {row["check"]: row["status"] for row in read_csv(tmp_path / "identity.csv")}
    assert statuses == {
        "dissipation": "PASS",
        "energy_inequality": "PASS",
        "rescaling": "PASS",
        "global_integral": "PASS",
    }


def test_config_echo_and_manifest(tmp_path):
    experiment, _ = run_experiment(get_preset("flat"), str(tmp_path))
    with open(tmp_path / "config_echo.yaml") as handle:
        assert yaml.safe_load(handle) == experiment.config
    with open(tmp_path / "manifest.yaml") as handle:
        manifest = yaml.safe_load(handle)
    assert manifest["ymlab_version"] == __version__
    paths = [entry["path"] for entry in manifest["files"]]
    assert paths == sorted(paths)
    assert "manifest.yaml" not in paths
    for entry in manifest["files"]:
        path = tmp_path / entry["path"]
        assert entry["sha256"] == file_sha256(path)
        assert entry["bytes"] == os.path.getsize(path)


def test_abelian_heatwave_decay(tmp_path):
    config = get_preset("abelian-heatwave")
    experiment = Experiment(config, str(tmp_path))
    lines = experiment.flow_run()
    assert any("energy increases: 0" in line for line in lines)
    _, ledger = experiment.flow()
    k2 = discrete_symbol_norm2(experiment.grid, (1, 0, 0))
    assert ledger.ym[-1] / ledger.ym0 == pytest.approx(math.exp(-2 * k2 * 0.1), rel=1e-6)
    experiment.identity_suite()
    assert experiment.failures == []


def test_planted_tube_run(tmp_path):
    config = get_preset("planted-tube")
    config["singular"]["plane_samples"] = 4
    experiment = Experiment(config, str(tmp_path))
    experiment.singular_extract()
    rows = read_csv(tmp_path / "singular_set.csv")
    assert len(rows) == 12
    center = experiment.grid.center
    for row in rows:
        assert [float(row["z%d" % i]) for i in range(2, 6)] == pytest.approx(list(center[1:]))

    lines = experiment.diag_cone()
    cone = read_csv(tmp_path / "cone.csv")
    assert {(float(row["r"]), float(row["s"])) for row in cone} == {
        (r, s) for r in (6.0,) for s in (0.1, 0.3, 0.5)
    }
    assert all(row["nonempty"] == "1" for row in cone)
    assert len(lines) == 2

    experiment.diag_slice()
    slices = read_csv(tmp_path / "slice.csv")
    assert len(slices) == 4 * 3
    planes = read_csv(tmp_path / "planes.csv")
    assert len(planes) == 4 * 4
    frame = np.array([[float(row["v%d" % i]) for i in range(1, 6)] for row in planes[:4]])
    assert np.allclose(frame @ frame.T, np.eye(4))


def test_density_probe(tmp_path):
    probes = tmp_path / "probes.csv"
    probes.write_text("z1,z2,z3,tau,rho\n1.0,1.0,1.0,0.01,0.08\n0.5,0.2,1.1,0.01,0.07\n")
    experiment = Experiment(get_preset("flat"), str(tmp_path / "out"))
    experiment.density_probe(str(probes))
    rows = read_csv(tmp_path / "out" / "probes_theta.csv")
    assert len(rows) == 2
    assert list(rows[0]) == ["z1", "z2", "z3", "tau", "rho", "theta"]
    assert float(rows[1]["theta"]) == 0.0

    bad = tmp_path / "bad.csv"
    bad.write_text("z1,z2,tau,rho\n1.0,1.0,0.01,0.08\n")
    with pytest.raises(ValueError):
        experiment.density_probe(str(bad))


def test_abelian_heatwave_monotonicity_and_lipschitz(tmp_path):
    experiment = Experiment(get_preset("abelian-heatwave"), str(tmp_path))
    lines = experiment.diag_monotonicity()
    assert lines[0].startswith("PASS")
    rows = read_csv(tmp_path / "monotonicity.csv")
    scales = len(experiment.rho_ladder())
    assert len(rows) == scales * (scales - 1) // 2
    constants = [float(row["C"]) for row in rows]
    assert max(constants) <= 1e3
    assert all(c >= 0 for c in constants)

    lines = experiment.diag_lipschitz()
    assert lines[0].startswith("PASS")
    assert experiment.failures == []


def test_planted_tube_slices_and_pde_residual(tmp_path):
    experiment = Experiment(get_preset("planted-tube"), str(tmp_path))
    lines = experiment.diag_slice()
    assert lines == ["PASS slice finiteness: 100% of 50 planes"]

    experiment.diag_pde(refinements=4)
    rows = read_csv(tmp_path / "pde_residual.csv")
    assert len(rows) == 4
    oracle = float(rows[0]["oracle"])
    assert oracle > 0
    assert all(float(row["oracle"]) == oracle for row in rows)
    assert float(rows[-1]["residual"]) == pytest.approx(oracle, rel=1e-2)
    assert experiment.failures == []
