# Copyright 2024 ymlab developers

# Licensed under the Apache License, Version 2.0 (the "License"); you may not
# use this file except in compliance with the License. You may obtain a copy of
# the License at http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
# WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
# License for the specific language governing permissions and limitations under
# the License.


"""Planes, cones and synthetic codimension-4 concentrations in R^m."""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import subspace_angles
from scipy.stats import ks_2samp, special_ortho_group

from ymlab.lattice import ScalarField
from ymlab.utilities import wrap_displacement

logger = logging.getLogger(__name__)

FRAME_TOLERANCE = 1e-12


class Plane:
    """A k-dimensional linear subspace of R^m given by an orthonormal frame of shape (k, m)."""

    def __init__(self, m, frame):
        frame = np.array(frame, dtype=float).reshape(-1, m)
        k = frame.shape[0]
        if k > m:
            raise ValueError("A plane in R^%d cannot have dimension %d." % (m, k))
        if k and np.max(np.abs(frame @ frame.T - np.eye(k))) > FRAME_TOLERANCE:
            raise ValueError("Plane frame is not orthonormal within %.0e." % FRAME_TOLERANCE)
        frame.setflags(write=False)
        self.m = m
        self.frame = frame

    @property
    def k(self):
        return self.frame.shape[0]

    @classmethod
    def span(cls, vectors, m=None):
        """Orthonormalise the given vectors (rows) by QR."""
        vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
        m = vectors.shape[1] if m is None else m
        if vectors.size == 0:
            return cls(m, np.zeros((0, m)))
        q, r = np.linalg.qr(vectors.T)
        if np.min(np.abs(np.diag(r))) < 1e-10:
            raise ValueError("Vectors spanning a plane must be linearly independent.")
        return cls(m, (q * np.sign(np.diag(r))).T)

    @classmethod
    def coordinate(cls, m, axes):
        return cls(m, np.eye(m)[list(axes)])

    def project(self, v):
        v = np.asarray(v, dtype=float)
        return (v @ self.frame.T) @ self.frame

    def distance(self, v):
        """Distance of v (or each row of v) to the plane."""
        v = np.asarray(v, dtype=float)
        return np.linalg.norm(v - self.project(v), axis=-1)

    def rotated(self, rotation):
        return Plane(self.m, self.frame @ np.asarray(rotation).T)


@dataclass(frozen=True)
class Cone:
    """X(apex, V, s) = {z != apex : dist(z - apex, V) < s |z - apex|}, cut at |z - apex| < r."""

    apex: tuple
    plane: Plane
    s: float
    r: float = math.inf

    def __post_init__(self):
        if not 0 < self.s < 1:
            raise ValueError("Cone aperture s must lie in (0, 1).")
        if not self.r > 0:
            raise ValueError("Cone radius r must be positive.")
        if len(self.apex) != self.plane.m:
            raise ValueError("Cone apex must have m = %d coordinates." % self.plane.m)
        object.__setattr__(self, "apex", tuple(float(v) for v in self.apex))


def contains_points(cone, points, periods=None):
    """Vectorised cone membership for an (N, m) array; ``periods`` wraps displacements."""
    d = np.atleast_2d(np.asarray(points, dtype=float)) - np.array(cone.apex)
    if periods is not None:
        d = wrap_displacement(d, np.asarray(periods, dtype=float))
    norm = np.linalg.norm(d, axis=1)
    inside = (norm > 0) & (cone.plane.distance(d) < cone.s * norm)
    if math.isfinite(cone.r):
        inside &= norm < cone.r
    return inside


def cone_contains(cone, z):
    return bool(contains_points(cone, [z])[0])


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def grassmann_sample(m, k, seed):
    """
    Rotation-invariant random k-plane in R^m: QR of a Gaussian m x k frame.

    The column signs are fixed by the diagonal of R so the map from Gaussian
    frames to planes is well defined; rank-deficient draws are redrawn.
    """
    if not 1 <= k <= m - 1:
        raise ValueError("Grassmann samples need 1 <= k <= m - 1 (m = %d, k = %d)." % (m, k))
    rng = _rng(seed)
    while True:
        gaussian = rng.standard_normal((m, k))
        q, r = np.linalg.qr(gaussian)
        diagonal = np.diag(r)
        if np.min(np.abs(diagonal)) > 1e-10:
            return Plane(m, (q * np.sign(diagonal)).T)
        logger.warning("Degenerate Gaussian frame drawn; redrawing.")


def principal_angles(first, second):
    """Principal angles between two planes, in descending order."""
    return subspace_angles(first.frame.T, second.frame.T)


def random_rotation(m, seed):
    return special_ortho_group.rvs(m, random_state=_rng(seed))


def rotation_invariance_pvalue(m, k, samples, seed):
    """
    Two-sample KS p-value of the largest principal angle to a fixed plane,
    comparing fresh samples with rotated fresh samples.
    """
    rng = _rng(seed)
    reference = Plane.coordinate(m, range(k))
    rotation = random_rotation(m, rng)
    plain = [principal_angles(grassmann_sample(m, k, rng), reference)[0] for _ in range(samples)]
    rotated = [
        principal_angles(grassmann_sample(m, k, rng).rotated(rotation), reference)[0]
        for _ in range(samples)
    ]
    return float(ks_2samp(plain, rotated).pvalue)


@dataclass(frozen=True)
class SyntheticTube:
    """
    amplitude * max(dist(y, anchor + P), r0)^-alpha around the affine plane anchor + P.

    P has dimension m - 4 by default; k = 0 gives a point concentration.
    """

    plane: Plane
    anchor: tuple
    r0: float
    alpha: float = 4.0
    amplitude: float = 1.0

    def __post_init__(self):
        if len(self.anchor) != self.plane.m:
            raise ValueError("Tube anchor must have m = %d coordinates." % self.plane.m)
        if not self.r0 > 0:
            raise ValueError("Tube core radius r0 must be positive.")
        if self.amplitude < 0:
            raise ValueError("Tube amplitude must be nonnegative.")
        object.__setattr__(self, "anchor", tuple(float(v) for v in self.anchor))

    def distance_field(self, grid):
        """Nearest-image distance of every site to the affine plane."""
        displacements = [
            grid.broadcast_axis(d, axis)
            for axis, d in enumerate(grid.axis_displacements(np.array(self.anchor)))
        ]
        dist2 = np.zeros(grid.extents)
        for d in displacements:
            dist2 = dist2 + d**2
        for vector in self.plane.frame:
            along = sum(v * d for v, d in zip(vector, displacements))
            dist2 = dist2 - along**2
        return np.sqrt(np.maximum(dist2, 0.0))

    def density(self, grid):
        values = self.amplitude * np.maximum(self.distance_field(grid), self.r0) ** (-self.alpha)
        return ScalarField(grid, values)


def synthetic_tube_density(grid, plane, alpha=4.0, r0=None, amplitude=1.0, anchor=None):
    """ScalarField of a planted tube; r0 defaults to 2h and must not be smaller."""
    r0 = 2.0 * grid.h if r0 is None else r0
    if r0 < 2.0 * grid.h * (1 - 1e-12):
        raise ValueError("Tube core radius r0 = %g must be at least 2h = %g." % (r0, 2 * grid.h))
    anchor = tuple(grid.center) if anchor is None else anchor
    return SyntheticTube(plane, anchor, r0, alpha, amplitude).density(grid)
