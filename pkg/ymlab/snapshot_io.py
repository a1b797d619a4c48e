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
YMF1 snapshot files.

Layout (little-endian): the 4-byte magic ``YMF1``; int32 m, int32 n; int32
extents[m]; float64 h; float64 origin[m]; float64 tau; then the potential
values as complex128, site-major (C order over the extents) and component-major
within a site, each n x n matrix row-major.
"""

import logging

import numpy as np

from ymlab.lattice import GaugePotential, Grid

logger = logging.getLogger(__name__)

MAGIC = b"YMF1"


def encode_snapshot(A, tau):
    grid = A.grid
    m = grid.m
    header = [
        MAGIC,
        np.array([m, A.n], dtype="<i4").tobytes(),
        np.array(grid.extents, dtype="<i4").tobytes(),
        np.array([grid.h], dtype="<f8").tobytes(),
        np.array(grid.origin, dtype="<f8").tobytes(),
        np.array([tau], dtype="<f8").tobytes(),
    ]
    # (m, *extents, n, n) -> (*extents, m, n, n)
    data = np.moveaxis(A.values, 0, m)
    return b"".join(header) + np.ascontiguousarray(data, dtype="<c16").tobytes()


def decode_snapshot(payload):
    """Returns ``(GaugePotential, tau)`` from the bytes of a YMF1 file."""
    if payload[:4] != MAGIC:
        raise ValueError("Not a YMF1 snapshot (magic %r)." % payload[:4])
    offset = 4
    m, n = (int(v) for v in np.frombuffer(payload, dtype="<i4", count=2, offset=offset))
    offset += 8
    if m < 2 or n < 1:
        raise ValueError("Corrupt YMF1 header: m = %d, n = %d." % (m, n))
    extents = tuple(int(v) for v in np.frombuffer(payload, dtype="<i4", count=m, offset=offset))
    offset += 4 * m
    h = float(np.frombuffer(payload, dtype="<f8", count=1, offset=offset)[0])
    offset += 8
    origin = tuple(np.frombuffer(payload, dtype="<f8", count=m, offset=offset).tolist())
    offset += 8 * m
    tau = float(np.frombuffer(payload, dtype="<f8", count=1, offset=offset)[0])
    offset += 8

    grid = Grid(m=m, extents=extents, h=h, origin=origin)
    count = grid.n_sites * m * n * n
    if len(payload) - offset != 16 * count:
        raise ValueError(
            "YMF1 payload holds %d bytes of field data, expected %d."
            % (len(payload) - offset, 16 * count)
        )
    data = np.frombuffer(payload, dtype="<c16", count=count, offset=offset)
    data = data.reshape(extents + (m, n, n)).astype(complex)
    return GaugePotential(grid, np.moveaxis(data, m, 0)), tau


def write_snapshot(path, A, tau):
    with open(path, "wb") as handle:
        handle.write(encode_snapshot(A, tau))
    logger.debug("Wrote snapshot tau = %.6g to %s", tau, path)


def read_snapshot(path):
    with open(path, "rb") as handle:
        return decode_snapshot(handle.read())
