# Copyright 2024 ymlab developers

# Licensed under the Apache License, Version 2.0 (the "License"); you may not
# use this file except in compliance with the License. You may obtain a copy of
# the License at http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
# WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
# License for the specific language governing permissions and limitations under
# the License.


"""CSV schemas of the files written by the diagnostics and the command line."""

import csv

LEDGER_FIELDS = ["tau", "ym", "dissipation_cum", "residual"]
LADDER_FIELDS = ["rho", "theta"]
SLICE_FIELDS = ["plane_id", "rho", "slice_value"]
CONE_FIELDS = ["r", "s", "nonempty"]
MONOTONICITY_FIELDS = ["rho", "rho_prime", "theta_rho", "theta_rho_prime", "C"]
IDENTITY_FIELDS = ["check", "value", "tolerance", "status"]


def point_fields(m):
    return ["z%d" % (i + 1) for i in range(m)]


def probe_fields(m):
    return point_fields(m) + ["tau", "rho"]


def probe_result_fields(m):
    return probe_fields(m) + ["theta"]


def singular_set_fields(m):
    return point_fields(m) + ["liminf_theta"]


def pde_residual_fields(m):
    return point_fields(m) + ["tau", "rho", "residual", "oracle"]


def plane_fields(m):
    return ["plane_id"] + ["v%d" % (i + 1) for i in range(m)]


def point_row(z, **extra):
    row = {"z%d" % (i + 1): float(v) for i, v in enumerate(z)}
    row.update(extra)
    return row


def write_csv(path, fieldnames, rows):
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as handle:
        return list(csv.DictReader(handle))


def read_probes(path, m):
    """Probe batch rows ``z1..zm,tau,rho`` as ``(z, tau, rho)`` tuples."""
    fields = probe_fields(m)
    probes = []
    for line, row in enumerate(read_csv(path), start=2):
        missing = [f for f in fields if f not in row or row[f] in (None, "")]
        if missing:
            raise ValueError("%s line %d: missing column(s) %s." % (path, line, ", ".join(missing)))
        z = [float(row["z%d" % (i + 1)]) for i in range(m)]
        probes.append((z, float(row["tau"]), float(row["rho"])))
    return probes


def plane_rows(planes):
    rows = []
    for plane_id, plane in enumerate(planes):
        for vector in plane.frame:
            row = {"plane_id": plane_id}
            row.update({"v%d" % (i + 1): float(v) for i, v in enumerate(vector)})
            rows.append(row)
    return rows
