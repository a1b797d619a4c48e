# Copyright 2024 ymlab developers

# Licensed under the Apache License, Version 2.0 (the "License"); you may not
# use this file except in compliance with the License. You may obtain a copy of
# the License at http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
# WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
# License for the specific language governing permissions and limitations under
# the License.


import os

import yaml

from ymlab.cli import EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, build_parser, main

UNSTABLE_CONFIG = {
    "grid": {"m": 3, "extents": [8, 8, 8], "h": 0.5},
    "flow": {
        "integrator": "forward_euler",
        "cfl_fraction": 1.0,
        "dt": 0.25,
        "T": 12.5,
        "initial": {"kind": "random_bump", "seed": 1},
    },
}


def test_parser_subcommands():
    parser = build_parser()
    args = parser.parse_args(["singular-extract", "--preset", "flat", "--epsilon", "2.5"])
    assert args.command == "singular-extract"
    assert args.epsilon == 2.5
    assert args.workers == 1


def test_usage_errors(tmp_path, capsys):
    assert main([]) == EXIT_USAGE
    assert main(["flow-run", "--preset", "nonexistent", "--output", str(tmp_path)]) == EXIT_USAGE
    assert "invalid config" in capsys.readouterr().err
    assert main(["flow-run", "--config", str(tmp_path / "missing.yaml")]) == EXIT_USAGE
    assert main(["flow-run", "--preset", "flat", "--workers", "0"]) == EXIT_USAGE


def test_invalid_config_file(tmp_path, capsys):
    path = tmp_path / "config.yaml"
    path.write_text(yaml.safe_dump({"grid": {"h": -1.0}}))
    assert main(["flow-run", "--config", str(path), "--output", str(tmp_path / "out")]) == (
        EXIT_USAGE
    )
    assert "grid.h" in capsys.readouterr().err


def test_flow_run(tmp_path, capsys):
    output = tmp_path / "out"
    assert main(["flow-run", "--preset", "flat", "--output", str(output)]) == EXIT_OK
    assert "relative energy residual" in capsys.readouterr().out
    for name in ("ledger.csv", "config_echo.yaml", "manifest.yaml"):
        assert os.path.exists(output / name)


def test_invalid_probe(tmp_path, capsys):
    probes = tmp_path / "probes.csv"
    probes.write_text("z1,z2,z3,tau,rho\n0.5,0.5,0.5,0.01,0.2\n")
    argv = ["density-probe", "--preset", "flat", "--probes", str(probes)]
    assert main(argv + ["--output", str(tmp_path / "out")]) == EXIT_USAGE
    assert "invalid probe" in capsys.readouterr().err


def test_malformed_probes(tmp_path):
    probes = tmp_path / "probes.csv"
    probes.write_text("z1,tau,rho\n0.5,0.01,0.05\n")
    argv = ["density-probe", "--preset", "flat", "--probes", str(probes)]
    assert main(argv + ["--output", str(tmp_path / "out")]) == EXIT_USAGE


def test_huge_epsilon_gives_empty_set(tmp_path):
    output = tmp_path / "out"
    argv = ["singular-extract", "--preset", "flat", "--epsilon", "1e9", "--output", str(output)]
    assert main(argv) == EXIT_OK
    assert (output / "singular_set.csv").read_text() == "z1,z2,z3,liminf_theta\n"


def test_flow_instability(tmp_path, capsys):
    path = tmp_path / "unstable.yaml"
    path.write_text(yaml.safe_dump(UNSTABLE_CONFIG))
    argv = ["flow-run", "--config", str(path), "--output", str(tmp_path / "out")]
    assert main(argv) == EXIT_NUMERICAL
    assert "flow instability" in capsys.readouterr().err


def test_identity_suite_default_preset(tmp_path, capsys):
    output = tmp_path / "out"
    assert main(["identity-suite", "--output", str(output)]) == EXIT_OK
    out = capsys.readouterr().out
    for check in ("dissipation", "energy_inequality", "rescaling", "global_integral"):
        assert "PASS %s" % check in out
    assert "FAIL" not in out
    assert os.path.exists(output / "identity.csv")
