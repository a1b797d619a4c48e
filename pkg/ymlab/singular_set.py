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
Singular-set extraction and the cone, slicing, directional and density-evolution
diagnostics built on a density evaluator.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from scipy.special import gamma

from ymlab.density import DEFAULT_LIMINF_SCALES, DensityLadder, gaussian_kernel
from ymlab.exceptions import InsufficientLadderError, InvalidProbeError
from ymlab.geometry import Cone, contains_points
from ymlab.utilities import ordered_map

logger = logging.getLogger(__name__)


@dataclass
class SingularCandidateSet:
    grid: object
    tau: float
    epsilon: float
    points: list = field(default_factory=list)
    ladders: list = field(default_factory=list)
    j: int = DEFAULT_LIMINF_SCALES

    def __post_init__(self):
        for ladder in self.ladders:
            if min(ladder.values[-self.j:]) < self.epsilon:
                raise ValueError("Candidate point below the threshold epsilon = %g." % self.epsilon)

    def __len__(self):
        return len(self.points)

    @property
    def liminf_values(self):
        return [min(ladder.values[-self.j:]) for ladder in self.ladders]

    def as_rows(self):
        rows = []
        for z, value in zip(self.points, self.liminf_values):
            row = {"z%d" % (i + 1): float(v) for i, v in enumerate(z)}
            row["liminf_theta"] = value
            rows.append(row)
        return rows


def _descending(scales):
    scales = [float(s) for s in scales]
    if any(b >= a for a, b in zip(scales, scales[1:])):
        raise ValueError("Ladder scales must be strictly descending.")
    return scales


def liminf_field(theta_fn, tau, scales, j=DEFAULT_LIMINF_SCALES):
    """Min over the finest j scales of theta at every grid site."""
    scales = _descending(scales)
    if len(scales) < 3 or j > len(scales):
        raise InsufficientLadderError("Singular-set extraction needs at least 3 ladder scales.")
    fields = theta_fn.ladder_fields(tau, scales)
    return fields, np.min(fields[-j:], axis=0)


def extract_singular_set(theta_fn, grid, tau, epsilon, scales, j=DEFAULT_LIMINF_SCALES):
    """All grid sites whose liminf estimate reaches epsilon, with their ladders."""
    scales = _descending(scales)
    fields, liminf = liminf_field(theta_fn, tau, scales, j)
    selected = np.argwhere(liminf >= epsilon)
    points, ladders = [], []
    for index in selected:
        index = tuple(int(i) for i in index)
        z = tuple(float(v) for v in grid.site_positions(index)[0])
        values = tuple(float(fields[(k,) + index]) for k in range(len(scales)))
        points.append(z)
        ladders.append(DensityLadder(z, tau, tuple(scales), values))
    logger.info(
        "Singular set at tau = %g, epsilon = %g: %d of %d sites",
        tau,
        epsilon,
        len(points),
        grid.n_sites,
    )
    return SingularCandidateSet(grid, tau, epsilon, points, ladders, j)


def calibrate_tube_epsilon(liminf, distance, near_radius, far_radius):
    """
    Midpoint between the smallest liminf within ``near_radius`` of a planted plane
    and the largest liminf farther than ``far_radius`` from it.
    """
    near = liminf[distance <= near_radius]
    far = liminf[distance > far_radius]
    if near.size == 0:
        raise ValueError("No grid sites within near_radius = %g of the plane." % near_radius)
    low = float(np.min(near))
    high = float(np.max(far)) if far.size else 0.0
    if not high < low:
        logger.warning("Planted plane is not separated: near min %.3g <= far max %.3g", low, high)
    return 0.5 * (low + high)


def cone_concentration_test(S, z_bar, W, s, r_ladder):
    """For each radius r, whether S meets the cone X(z_bar, r, W, s)."""
    points = np.array(S.points, dtype=float).reshape(-1, S.grid.m)
    results = []
    for r in r_ladder:
        cone = Cone(tuple(z_bar), W, s, r)
        hit = bool(np.any(contains_points(cone, points, S.grid.lengths))) if len(points) else False
        results.append(hit)
    return results


def directional_profile(theta_fn, z_bar, omega, t_grid, rho_ladder, tau, j=DEFAULT_LIMINF_SCALES):
    """Per t, the min over the finest j scales of theta^rho(z_bar + rho t omega, tau)."""
    rho_ladder = _descending(rho_ladder)
    omega = np.asarray(omega, dtype=float)
    omega = omega / np.linalg.norm(omega)
    z_bar = np.asarray(z_bar, dtype=float)

    def profile(t):
        values = [theta_fn(z_bar + rho * t * omega, tau, rho) for rho in rho_ladder]
        return min(values[-j:])

    return ordered_map(profile, list(t_grid), getattr(theta_fn, "workers", 1))


def directional_density_test(
    theta_fn, z_bar, omega, t_grid, rho_ladder, tau, j=DEFAULT_LIMINF_SCALES
):
    return float(min(directional_profile(theta_fn, z_bar, omega, t_grid, rho_ladder, tau, j)))


def sphere_area(dimension):
    """Area of the unit sphere S^(dimension - 1) in R^dimension."""
    return 2.0 * math.pi ** (dimension / 2.0) / gamma(dimension / 2.0)


def slice_nodes(r_slice, spacing):
    """Tensor-product nodes with the given spacing inside the 4-ball |Y| <= r_slice."""
    count = int(math.floor(r_slice / spacing + 1e-9))
    axis = spacing * np.arange(-count, count + 1)
    mesh = np.stack(np.meshgrid(axis, axis, axis, axis, indexing="ij"), axis=-1).reshape(-1, 4)
    return mesh[np.sum(mesh**2, axis=1) <= r_slice**2 * (1 + 1e-12)]


def periodic_interpolator(grid, values):
    """Linear interpolation of a site field, valid at any point of the torus."""
    padded = np.pad(values, [(0, 1)] * grid.m, mode="wrap")
    axes = [grid.origin[a] + grid.h * np.arange(grid.extents[a] + 1) for a in range(grid.m)]
    interpolator = RegularGridInterpolator(axes, padded)
    origin = np.array(grid.origin)
    lengths = np.array(grid.lengths)

    def evaluate(points):
        wrapped = origin + np.mod(np.asarray(points, float) - origin, lengths)
        return interpolator(wrapped)

    return evaluate


class SliceQuadrature:
    """rho^-4 theta^rho(z_bar + Y) integrated over Y in 4-planes, at one scale."""

    def __init__(self, theta_fn, tau, rho, r_slice=None, spacing=None):
        grid = theta_fn.grid
        if grid.m < 4:
            raise ValueError("Slicing by 4-planes needs m >= 4.")
        self.grid = grid
        self.rho = rho
        self.r_slice = grid.half_period if r_slice is None else r_slice
        self.spacing = 0.5 * grid.h if spacing is None else spacing
        self.nodes = slice_nodes(self.r_slice, self.spacing)
        self.evaluate = periodic_interpolator(grid, theta_fn.theta_field(tau, rho) * rho**-4.0)

    def integral(self, z_bar, plane, weight_power=0):
        if plane.k != 4:
            raise ValueError("Slices are taken along 4-planes, got k = %d." % plane.k)
        points = np.asarray(z_bar, float) + self.nodes @ plane.frame
        values = self.evaluate(points)
        if weight_power:
            values = values * np.linalg.norm(self.nodes, axis=1) ** weight_power
        return float(np.sum(values)) * self.spacing**4


def slice_integral(theta_fn, z_bar, U, rho, tau, r_slice=None, spacing=None):
    """int_{|Y| <= r_slice, Y in U} rho^-4 theta^rho(z_bar + Y, tau) dY."""
    return SliceQuadrature(theta_fn, tau, rho, r_slice, spacing).integral(z_bar, U)


def slice_ladder(theta_fn, z_bar, planes, scales, tau, r_slice=None, spacing=None):
    """Slice integrals, shape (len(planes), len(scales)); one theta field per scale."""
    scales = _descending(scales)
    table = np.zeros((len(planes), len(scales)))
    for k, rho in enumerate(scales):
        quadrature = SliceQuadrature(theta_fn, tau, rho, r_slice, spacing)
        values = ordered_map(
            lambda plane: quadrature.integral(z_bar, plane), planes, getattr(theta_fn, "workers", 1)
        )
        table[:, k] = values
    return table


def slice_finiteness_fraction(table, factor=2.0):
    """Fraction of planes whose finer-scale minimum stays within ``factor`` x the coarsest."""
    table = np.asarray(table, dtype=float)
    if table.size == 0 or table.shape[1] < 2:
        return 1.0
    finite = np.min(table[:, 1:], axis=1) <= factor * table[:, 0] + 1e-300
    return float(np.mean(finite))


def fubini_slice_average(theta_fn, z_bar, planes, rho, tau, r_slice=None, spacing=None):
    """
    Returns ``(slice_average, ball_integral)``.

    slice_average = (|S^(m-1)| / |S^3|) * mean over planes of
    int_U rho^-4 theta |Y|^(m-4) dY; averaged over rotation-invariant planes it
    reproduces ball_integral = int_{|x - z_bar| <= r_slice} rho^-4 theta dx.
    """
    grid = theta_fn.grid
    quadrature = SliceQuadrature(theta_fn, tau, rho, r_slice, spacing)
    weighted = [quadrature.integral(z_bar, plane, weight_power=grid.m - 4) for plane in planes]
    average = sphere_area(grid.m) / sphere_area(4) * float(np.mean(weighted))

    field_values = theta_fn.theta_field(tau, rho) * rho**-4.0
    inside = grid.squared_distances(np.asarray(z_bar, float)) <= quadrature.r_slice**2
    ball = grid.volume_element * float(np.sum(np.where(inside, field_values, 0.0)))
    return average, ball


def pde_residual(theta_fn, z, tau, rho, widths, support_radius=None):
    """
    d_tau theta - Lap_z theta - (theta - (rho / 2) d_rho theta) / rho^2 by central
    differences of theta evaluations with stencil widths (dz, dtau, drho).

    With ``support_radius`` every stencil point sums over the same sites, the ball of that
    radius around z; ``theta_fn`` must then accept a ``support`` keyword.
    """
    dz, dtau, drho = widths
    if not (dz > 0 and dtau > 0 and drho > 0) or not drho < rho:
        raise ValueError("Stencil widths must be positive with drho < rho.")
    z = np.asarray(z, dtype=float)
    if support_radius is None:
        evaluate = theta_fn
    else:
        support = (z, float(support_radius))

        def evaluate(point, t, r):
            return theta_fn(point, t, r, support=support)

    try:
        center = evaluate(z, tau, rho)
        d_tau = (evaluate(z, tau + dtau, rho) - evaluate(z, tau - dtau, rho)) / (2 * dtau)
        d_rho = (evaluate(z, tau, rho + drho) - evaluate(z, tau, rho - drho)) / (2 * drho)
        laplacian = 0.0
        for axis in range(len(z)):
            step = np.zeros(len(z))
            step[axis] = dz
            laplacian += evaluate(z + step, tau, rho) - 2 * center + evaluate(z - step, tau, rho)
        laplacian /= dz**2
    except InvalidProbeError as error:
        raise ValueError("Inadmissible stencil: %s" % error) from error
    return d_tau - laplacian - (center - 0.5 * rho * d_rho) / rho**2


def pde_residual_static_terms(e, z, rho, r_trunc):
    """
    Kernel-moment quadrature of each term of the density-evolution residual for a
    time-independent energy density: theta, Lap_z theta and d_rho theta.
    """
    grid = e.grid
    m = grid.m
    r2 = grid.squared_distances(np.asarray(z, float))
    weights = gaussian_kernel(r2, rho, r_trunc) * e.values * rho ** (4 - m) * grid.volume_element
    theta_value = float(np.sum(weights))
    laplacian = float(np.sum(weights * (r2 / (4 * rho**4) - m / (2 * rho**2))))
    d_rho = float(np.sum(weights * ((4 - m) / rho + r2 / (2 * rho**3))))
    residual = -laplacian - (theta_value - 0.5 * rho * d_rho) / rho**2
    return {"theta": theta_value, "laplacian": laplacian, "d_rho": d_rho, "residual": residual}
