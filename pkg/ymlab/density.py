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
Parabolic density

    theta^rho(z, tau) = rho^(4-m) int exp(-|z-y|^2 / 4 rho^2) |F|^2(y, tau - rho^2) dy.

The Gaussian is truncated at |z - y| <= r_trunc * rho and displacements use the
nearest periodic image, so the truncation ball must fit inside half a period.
"""

import logging
import math
from collections import OrderedDict
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.optimize import brentq
from scipy.stats import chi2

from ymlab.exceptions import (
    InsufficientLadderError,
    InvalidProbeError,
    WrapContaminationError,
)
from ymlab.utilities import ordered_map

logger = logging.getLogger(__name__)

DEFAULT_LIMINF_SCALES = 3
DEFAULT_C_CAP = 1e3


@dataclass(frozen=True)
class QuadratureConfig:
    r_trunc: float = 8.0
    tail_tolerance: float = 1e-4

    def __post_init__(self):
        if not self.r_trunc > 0:
            raise ValueError("density.r_trunc must be positive.")
        if not self.tail_tolerance > 0:
            raise ValueError("density.tail_tolerance must be positive.")

    def tail_mass(self, m):
        """Fraction of the m-dimensional Gaussian mass outside the truncation ball."""
        return float(chi2.sf(self.r_trunc**2 / 2.0, m))

    def check(self, grid, rho, radius=None):
        """``radius`` overrides r_trunc * rho as the extent the wrap check guards."""
        if not rho > 0:
            raise InvalidProbeError("Invalid probe: rho = %g must be positive." % rho)
        tail = self.tail_mass(grid.m)
        if tail > self.tail_tolerance:
            raise ValueError(
                "Gaussian tail mass %.2e outside r_trunc = %g exceeds tail_tolerance %.1e (m = %d)."
                % (tail, self.r_trunc, self.tail_tolerance, grid.m)
            )
        if radius is None:
            radius = self.r_trunc * rho
        if radius > grid.half_period * (1 + 1e-12):
            raise WrapContaminationError(
                "Truncation radius %g exceeds half the shortest period %g."
                % (radius, grid.half_period)
            )


DEFAULT_QUADRATURE = QuadratureConfig()


@dataclass(frozen=True)
class DensityProbe:
    z: tuple
    tau: float
    rho: float

    def __post_init__(self):
        if not self.rho > 0 or not self.rho**2 < self.tau:
            raise InvalidProbeError(
                "Invalid probe: need 0 < rho and rho^2 < tau (rho = %g, tau = %g)."
                % (self.rho, self.tau)
            )
        object.__setattr__(self, "z", tuple(float(v) for v in self.z))


@dataclass(frozen=True)
class DensityLadder:
    z: tuple
    tau: float
    scales: tuple
    values: tuple = field(default=())

    def __post_init__(self):
        scales = tuple(float(s) for s in self.scales)
        values = tuple(float(v) for v in self.values)
        if len(values) != len(scales):
            raise ValueError("DensityLadder needs one value per scale.")
        if any(b >= a for a, b in zip(scales, scales[1:])):
            raise ValueError("DensityLadder scales must be strictly descending.")
        if scales and not scales[-1] ** 2 < self.tau:
            raise InvalidProbeError("Invalid probe: finest scale squared must be below tau.")
        if any(v < 0 for v in values):
            raise ValueError("Density values must be nonnegative.")
        object.__setattr__(self, "z", tuple(float(v) for v in self.z))
        object.__setattr__(self, "scales", scales)
        object.__setattr__(self, "values", values)


def gaussian_kernel(r2, rho, r_trunc):
    """exp(-r^2 / 4 rho^2) inside the truncation ball, 0 outside."""
    return np.where(r2 <= (r_trunc * rho) ** 2, np.exp(-r2 / (4.0 * rho**2)), 0.0)


def theta(e, z, rho, quad=DEFAULT_QUADRATURE, support=None):
    """
    theta^rho at the (possibly off-grid) point z of the energy density snapshot e.

    ``support`` is an optional (center, radius) pair: the kernel is then summed over
    the sites within radius of center instead of the ball of radius r_trunc * rho
    around z, so nearby points sharing a support vary smoothly in z and rho.
    """
    grid = e.grid
    z = np.asarray(z, dtype=float)
    r2 = grid.squared_distances(z)
    if support is None:
        quad.check(grid, rho)
        kernel = gaussian_kernel(r2, rho, quad.r_trunc)
    else:
        center, radius = np.asarray(support[0], dtype=float), float(support[1])
        offset = float(np.linalg.norm(grid.displacement(center, z)))
        quad.check(grid, rho, radius + offset)
        inside = grid.squared_distances(center) <= radius**2
        kernel = np.where(inside, np.exp(-r2 / (4.0 * rho**2)), 0.0)
    total = float(np.sum(kernel * e.values))
    return rho ** (4 - grid.m) * grid.volume_element * total


def theta_points(e, points, rho, quad=DEFAULT_QUADRATURE, workers=1):
    return np.array(ordered_map(lambda z: theta(e, z, rho, quad), points, workers))


def theta_field(e, rho, quad=DEFAULT_QUADRATURE):
    """theta^rho at every grid site, by circular convolution with the truncated kernel."""
    grid = e.grid
    quad.check(grid, rho)
    offsets = grid.squared_distances(np.array(grid.origin))
    kernel = gaussian_kernel(offsets, rho, quad.r_trunc)
    axes = tuple(range(grid.m))
    conv = np.fft.irfftn(
        np.fft.rfftn(e.values, axes=axes) * np.fft.rfftn(kernel, axes=axes),
        s=grid.extents,
        axes=axes,
    )
    return np.maximum(rho ** (4 - grid.m) * grid.volume_element * conv, 0.0)


def global_density_integral(e, rho, quad=DEFAULT_QUADRATURE):
    """rho^-4 int theta^rho(z) dz as a Riemann sum over all sites."""
    return rho**-4.0 * e.grid.volume_element * float(np.sum(theta_field(e, rho, quad)))


def global_density_ratio(e, rho, quad=DEFAULT_QUADRATURE):
    """global_density_integral / ((4 pi)^(m/2) YM); 1 up to quadrature and truncation."""
    energy = e.total()
    if energy == 0:
        return 1.0
    return global_density_integral(e, rho, quad) / ((4.0 * math.pi) ** (e.grid.m / 2.0) * energy)


def rescaling_check(e, z_bar, x, rho, quad=DEFAULT_QUADRATURE):
    """
    Relative residual of the sqrt(2)-rescaling identity.

    The left side int exp(-|x - x'|^2 / 8) rho^4 e(z_bar + rho x') dx' is summed
    in rescaled coordinates x' = (y - z_bar) / rho; the right side is
    2^((m-4)/2) theta^(sqrt(2) rho)(z_bar + rho x). Both truncate at
    sqrt(2) r_trunc in x' units.
    """
    grid = e.grid
    rho_bar = math.sqrt(2.0) * rho
    quad.check(grid, rho_bar)
    z = np.asarray(z_bar, float) + rho * np.asarray(x, float)
    d2 = grid.squared_distances(z) / rho**2
    weights = np.where(d2 <= 2.0 * quad.r_trunc**2, np.exp(-d2 / 8.0), 0.0)
    lhs = (grid.h / rho) ** grid.m * float(np.sum(weights * (rho**4 * e.values)))
    rhs = 2.0 ** ((grid.m - 4) / 2.0) * theta(e, z, rho_bar, quad)
    return abs(lhs - rhs) / (abs(rhs) + np.finfo(float).eps)


def sample_ball(rng, m, radius, count):
    directions = rng.standard_normal((count, m))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = radius * rng.random(count) ** (1.0 / m)
    return directions * radii[:, None]


def lipschitz_modulus(e, z_bar, rho, radius, pair_count, seed, quad=DEFAULT_QUADRATURE, workers=1):
    """
    Max over sampled pairs x, x' in B_radius of
    |theta(z_bar + rho x) - theta(z_bar + rho x')| / |x - x'|.
    """
    if pair_count < 1:
        raise ValueError("pair_count must be at least 1.")
    rng = np.random.default_rng(seed)
    m = e.grid.m
    x = sample_ball(rng, m, radius, pair_count)
    x_tilde = sample_ball(rng, m, radius, pair_count)
    z_bar = np.asarray(z_bar, float)
    points = [z_bar + rho * p for p in np.concatenate([x, x_tilde])]
    values = theta_points(e, points, rho, quad, workers)
    differences = np.abs(values[:pair_count] - values[pair_count:])
    distances = np.linalg.norm(x - x_tilde, axis=1)
    return float(np.max(differences / distances))


def lipschitz_uniformity(moduli, factor=2.0):
    """
    ``moduli`` ordered from the coarsest to the finest scale.

    Returns ``(ok, ratio)`` with ratio = max finer modulus / coarsest modulus;
    ok when no finer-scale modulus exceeds ``factor`` times the coarsest.
    """
    moduli = np.asarray(moduli, dtype=float)
    coarsest = moduli[0]
    finer = moduli[1:].max() if len(moduli) > 1 else 0.0
    if coarsest <= 0:
        ok = finer <= 1e-14
        return ok, 0.0 if ok else math.inf
    ratio = float(finer / coarsest)
    return ratio <= factor, ratio


def liminf_estimate(ladder, j=DEFAULT_LIMINF_SCALES):
    """Min over the finest j scales of the ladder."""
    if len(ladder.values) < 3:
        raise InsufficientLadderError(
            "liminf estimate needs at least 3 scales, ladder has %d." % len(ladder.values)
        )
    if j > len(ladder.values):
        raise InsufficientLadderError(
            "j = %d exceeds the ladder length %d." % (j, len(ladder.values))
        )
    return min(ladder.values[-j:])


def default_rho_ladder(grid, quad=DEFAULT_QUADRATURE):
    """Geometric ladder, ratio 1/sqrt(2), from min(L) / (2 r_trunc) down to 2h."""
    rho_max = min(grid.lengths) / (2.0 * quad.r_trunc)
    rho_min = 2.0 * grid.h
    scales = []
    rho = rho_max
    while rho >= rho_min * (1 - 1e-12):
        scales.append(rho)
        rho /= math.sqrt(2.0)
    if len(scales) < 3:
        scales = [rho_max, rho_max / math.sqrt(2.0), rho_max / 2.0]
    return scales


class DensityEvaluator:
    """theta^rho(z, tau) over an interface, i.e. the density evaluator handed to the diagnostics."""

    def __init__(
        self, interface, quad=DEFAULT_QUADRATURE, workers=1, verbose=False, max_cached_fields=8
    ):
        if max_cached_fields < 1:
            raise ValueError("max_cached_fields must be at least 1.")
        self.interface = interface
        self.quad = quad
        self.workers = workers
        self.verbose = verbose
        self.max_cached_fields = max_cached_fields
        self._fields = OrderedDict()

    @property
    def grid(self):
        return self.interface.grid

    def __call__(self, z, tau, rho, support=None):
        return self.theta(z, tau, rho, support)

    def theta(self, z, tau, rho, support=None):
        return theta(self.interface.density_at(tau, rho), z, rho, self.quad, support)

    def theta_points(self, points, tau, rho):
        e = self.interface.density_at(tau, rho)
        return theta_points(e, points, rho, self.quad, self.workers)

    def theta_field(self, tau, rho):
        key = (float(tau), float(rho))
        if key in self._fields:
            self._fields.move_to_end(key)
            return self._fields[key]
        e = self.interface.density_at(tau, rho)
        values = theta_field(e, rho, self.quad)
        values.setflags(write=False)
        self._fields[key] = values
        # least recently used first
        while len(self._fields) > self.max_cached_fields:
            self._fields.popitem(last=False)
        return values

    def ladder(self, z, tau, scales):
        values = [self.theta(z, tau, rho) for rho in scales]
        return DensityLadder(tuple(z), tau, tuple(scales), tuple(values))

    def ladder_fields(self, tau, scales):
        """theta at every site for every scale, shape (len(scales), *extents)."""
        fields = ordered_map(lambda rho: self.theta_field(tau, rho), scales, self.workers)
        if self.verbose:
            logger.info("Evaluated %d theta fields at tau = %g", len(scales), tau)
        return np.stack(fields)


def density_ladder(evaluator, z, tau, scales):
    return evaluator.ladder(z, tau, scales)


def fit_monotonicity_constant(theta_rho, theta_rho_prime, rho, rho_prime, ym0, c_max=1e12):
    """
    Smallest C >= 0 with theta_rho <= C exp(C (rho' - rho)) theta_rho' + C (rho'^2 - rho^2) ym0.

    Returns inf when no finite C exists (both right-hand terms vanish).
    """
    if not rho < rho_prime:
        raise ValueError("Monotonicity pairs need rho < rho_prime.")
    if theta_rho <= 0:
        return 0.0
    gap = rho_prime - rho
    area = rho_prime**2 - rho**2

    def slack(c):
        return c * math.exp(min(c * gap, 700.0)) * theta_rho_prime + c * area * ym0 - theta_rho

    if theta_rho_prime <= 0 and ym0 <= 0:
        return math.inf
    lo, hi = 0.0, 1.0
    while slack(hi) < 0:
        lo, hi = hi, 2.0 * hi
        if hi > c_max:
            return math.inf
    return float(brentq(slack, lo, hi, xtol=1e-12, rtol=1e-10))


def monotonicity_constant(ladder, ym0):
    """
    Largest per-pair fitted constant over all ladder pairs rho < rho'.

    Returns ``(C, rows)``; the rows feed the monotonicity report.
    """
    rows = []
    for i, j in combinations(range(len(ladder.scales)), 2):
        # scales descend, so scale j is the smaller rho
        rho, rho_prime = ladder.scales[j], ladder.scales[i]
        c = fit_monotonicity_constant(ladder.values[j], ladder.values[i], rho, rho_prime, ym0)
        rows.append(
            {
                "rho": rho,
                "rho_prime": rho_prime,
                "theta_rho": ladder.values[j],
                "theta_rho_prime": ladder.values[i],
                "C": c,
            }
        )
    constant = max((row["C"] for row in rows), default=0.0)
    return constant, rows
