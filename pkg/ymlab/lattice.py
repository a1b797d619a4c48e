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
Periodic lattice discretisation of gauge potentials and their curvature.

Fields store their values as complex arrays of shape
``(*components, *extents, n, n)``: leading component axes, then one axis per
spatial dimension, then the n x n matrix. Every spatial derivative is the
second-order central difference with periodic wrap, which is exactly
skew-adjoint for the lattice sum; the adjoint ``divergence_star`` relies on it.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from ymlab.exceptions import DimensionMismatchError
from ymlab.lie_algebra import (
    commutator_array,
    conjugate_array,
    dagger,
    killing_form,
)
from ymlab.utilities import wrap_displacement

FIELD_TOLERANCE = 1e-10


@dataclass(frozen=True)
class Grid:
    m: int
    extents: tuple
    h: float
    origin: tuple = None

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 2:
            raise ValueError("Grid dimension m must be an integer >= 2.")
        extents = tuple(int(e) for e in self.extents)
        if len(extents) != self.m:
            raise ValueError("Grid needs one extent per axis (m = %d)." % self.m)
        if min(extents) < 4:
            raise ValueError("Every grid extent must be at least 4 sites.")
        if not self.h > 0:
            raise ValueError("Grid spacing h must be positive.")
        origin = (0.0,) * self.m if self.origin is None else tuple(float(o) for o in self.origin)
        if len(origin) != self.m:
            raise ValueError("Grid origin must have m = %d entries." % self.m)
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "extents", extents)
        object.__setattr__(self, "h", float(self.h))
        object.__setattr__(self, "origin", origin)

    @property
    def n_sites(self):
        return int(np.prod(self.extents))

    @property
    def lengths(self):
        return tuple(e * self.h for e in self.extents)

    @property
    def volume_element(self):
        return self.h**self.m

    @property
    def half_period(self):
        return 0.5 * min(self.lengths)

    @property
    def center(self):
        return np.array(self.origin) + self.h * (np.array(self.extents) // 2)

    def coordinates(self, axis):
        return self.origin[axis] + self.h * np.arange(self.extents[axis])

    def site_positions(self, indices):
        indices = np.atleast_2d(np.asarray(indices))
        return np.array(self.origin) + self.h * indices

    def displacement(self, a, b):
        """Nearest-image displacement b - a."""
        difference = np.asarray(b, float) - np.asarray(a, float)
        return wrap_displacement(difference, np.array(self.lengths))

    def axis_displacements(self, z):
        """Per-axis nearest-image displacements from z to every site coordinate."""
        return [
            wrap_displacement(self.coordinates(axis) - z[axis], self.lengths[axis])
            for axis in range(self.m)
        ]

    def broadcast_axis(self, values, axis):
        shape = [1] * self.m
        shape[axis] = -1
        return np.reshape(values, shape)

    def squared_distances(self, z):
        z = np.asarray(z, dtype=float)
        if z.shape != (self.m,):
            raise ValueError("Point must have m = %d coordinates." % self.m)
        r2 = np.zeros((1,) * self.m)
        for axis, d in enumerate(self.axis_displacements(z)):
            r2 = r2 + self.broadcast_axis(d**2, axis)
        return r2


def _skew_residual(values):
    if not np.size(values):
        return 0.0
    return float(np.max(np.abs(values + dagger(values))))


class LieField:
    """A Lie(U(n))-valued lattice field with any number of leading components."""

    def __init__(self, grid, values, tol=FIELD_TOLERANCE):
        values = np.array(values, dtype=complex)
        m = grid.m
        if values.ndim < m + 2 or values.shape[-1] != values.shape[-2]:
            raise DimensionMismatchError(
                "Field values must end with the spatial axes and an n x n matrix."
            )
        if values.shape[-2 - m : -2] != grid.extents:
            raise DimensionMismatchError(
                "Field spatial shape %s does not match grid extents %s."
                % (values.shape[-2 - m : -2], grid.extents)
            )
        scale = max(1.0, float(np.max(np.abs(values)))) if values.size else 1.0
        if _skew_residual(values) > tol * scale:
            raise ValueError("Field components are not skew-Hermitian within %.0e." % tol)
        values.setflags(write=False)
        self.grid = grid
        self.values = values

    @property
    def n(self):
        return self.values.shape[-1]

    @property
    def component_shape(self):
        return self.values.shape[: self.values.ndim - self.grid.m - 2]

    def zeros_like(self):
        return type(self)(self.grid, np.zeros_like(self.values))


class GaugePotential(LieField):
    """A = (A_1, ..., A_m) with one Lie(U(n)) matrix per axis and site."""

    def __init__(self, grid, values, tol=FIELD_TOLERANCE):
        super().__init__(grid, values, tol)
        if self.component_shape != (grid.m,):
            raise DimensionMismatchError(
                "GaugePotential needs m = %d components, got %s." % (grid.m, self.component_shape)
            )

    @classmethod
    def zeros(cls, grid, n):
        return cls(grid, np.zeros((grid.m,) + grid.extents + (n, n), dtype=complex))


class CurvatureField(LieField):
    """F_{mu nu} for mu < nu, packed in ``pairs`` order; F_{nu mu} = -F_{mu nu}."""

    def __init__(self, grid, values, tol=FIELD_TOLERANCE):
        super().__init__(grid, values, tol)
        self.pairs = list(combinations(range(grid.m), 2))
        if self.component_shape != (len(self.pairs),):
            raise DimensionMismatchError(
                "CurvatureField needs %d packed components, got %s."
                % (len(self.pairs), self.component_shape)
            )
        self._index = {pair: p for p, pair in enumerate(self.pairs)}

    def component(self, mu, nu):
        if mu == nu:
            return np.zeros_like(self.values[0])
        if mu < nu:
            return self.values[self._index[(mu, nu)]]
        return -self.values[self._index[(nu, mu)]]

    def full(self):
        """The antisymmetric m x m array of components as a LieField."""
        m = self.grid.m
        full = np.zeros((m, m) + self.values.shape[1:], dtype=complex)
        for (mu, nu), p in self._index.items():
            full[mu, nu] = self.values[p]
            full[nu, mu] = -self.values[p]
        return LieField(self.grid, full)


class ScalarField:
    def __init__(self, grid, values):
        values = np.array(values, dtype=float)
        if values.shape != grid.extents:
            raise DimensionMismatchError(
                "Scalar field shape %s does not match grid extents %s."
                % (values.shape, grid.extents)
            )
        if values.size and float(np.min(values)) < -1e-12 * max(1.0, float(np.max(values))):
            raise ValueError("Scalar (energy density) field values must be nonnegative.")
        values = np.maximum(values, 0.0)
        values.setflags(write=False)
        self.grid = grid
        self.values = values

    def total(self):
        return self.grid.volume_element * float(np.sum(self.values))


def _check_grid(a, b):
    if a.grid != b.grid:
        raise DimensionMismatchError("Fields live on different grids.")


def difference(values, axis, h):
    # (f(x + h) - f(x - h)) / 2h along the given array axis
    return (np.roll(values, -1, axis=axis) - np.roll(values, 1, axis=axis)) / (2.0 * h)


def _spatial_axis(grid, values, mu):
    return values.ndim - 2 - grid.m + mu


def _check_axis(grid, mu):
    if int(mu) != mu or not 0 <= mu < grid.m:
        raise ValueError("Axis mu = %s out of range for m = %d." % (mu, grid.m))
    return int(mu)


def curvature_values(grid, a):
    """Packed F_{mu nu}, mu < nu, from raw potential values of shape (m, *extents, n, n)."""
    pairs = list(combinations(range(grid.m), 2))
    out = np.empty((len(pairs),) + a.shape[1:], dtype=complex)
    for p, (mu, nu) in enumerate(pairs):
        out[p] = (
            difference(a[nu], mu, grid.h)
            - difference(a[mu], nu, grid.h)
            + commutator_array(a[mu], a[nu])
        )
    return out


def divergence_star_values(grid, a, component):
    """
    (nabla* S)_nu = -sum_mu (D_mu S_{mu nu} + [A_mu, S_{mu nu}]).

    ``component(mu, nu)`` returns S_{mu nu} with shape (*extents, n, n).
    """
    m = grid.m
    out = np.zeros_like(a)
    for nu in range(m):
        for mu in range(m):
            s = component(mu, nu)
            out[nu] -= difference(s, mu, grid.h) + commutator_array(a[mu], s)
    return out


def curvature(A):
    return CurvatureField(A.grid, curvature_values(A.grid, A.values))


def covariant_derivative(A, B, mu):
    """nabla_mu B = D_mu B + [A_mu, B] (adjoint action) for a field of any component shape."""
    _check_grid(A, B)
    mu = _check_axis(A.grid, mu)
    if A.n != B.n:
        raise DimensionMismatchError("Potential has n = %d, field has n = %d." % (A.n, B.n))
    values = difference(B.values, _spatial_axis(A.grid, B.values, mu), A.grid.h)
    values = values + commutator_array(A.values[mu], B.values)
    return LieField(A.grid, values)


def covariant_gradient(A, B):
    """The 2-tensor (nabla B)_{mu nu} = nabla_mu B_nu, component shape (m, *B.component_shape)."""
    return LieField(
        A.grid, np.stack([covariant_derivative(A, B, mu).values for mu in range(A.grid.m)])
    )


def divergence_star(A, S):
    """
    Adjoint of nabla with respect to ``field_inner``.

    ``S`` is a CurvatureField or any LieField with component shape (m, m).
    """
    _check_grid(A, S)
    if isinstance(S, CurvatureField):
        component = S.component
    else:
        if S.component_shape != (A.grid.m, A.grid.m):
            raise DimensionMismatchError("divergence_star needs an m x m tensor field.")
        def component(mu, nu):
            return S.values[mu, nu]
    return LieField(A.grid, divergence_star_values(A.grid, A.values, component))


def field_inner(B, C):
    """(B, C) = h^m sum_sites sum_components <B, C>."""
    _check_grid(B, C)
    if B.values.shape != C.values.shape:
        raise DimensionMismatchError(
            "Field shapes %s and %s differ." % (B.values.shape, C.values.shape)
        )
    return B.grid.volume_element * float(np.sum(killing_form(B.values, C.values)))


def energy_density(F):
    """|F|^2 summed over ordered pairs, i.e. 2 sum_{mu<nu} <F_{mu nu}, F_{mu nu}>."""
    values = 2.0 * np.sum(killing_form(F.values, F.values), axis=0)
    return ScalarField(F.grid, np.maximum(values, 0.0))


def ym_energy(F):
    return energy_density(F).total()


def gauge_transform_constant(A, g):
    if A.n != g.n:
        raise DimensionMismatchError("Potential has n = %d, group element n = %d." % (A.n, g.n))
    return GaugePotential(A.grid, conjugate_array(A.values, g.entries))


def conjugate_field(F, g):
    if F.n != g.n:
        raise DimensionMismatchError("Field has n = %d, group element n = %d." % (F.n, g.n))
    return type(F)(F.grid, conjugate_array(F.values, g.entries))


def discrete_divergence(A):
    """sum_mu D_mu A_mu as a single-component field."""
    values = sum(difference(A.values[mu], mu, A.grid.h) for mu in range(A.grid.m))
    return LieField(A.grid, values[np.newaxis])


def shift_scalar_field(e, steps):
    """Translate a scalar field by whole lattice steps: result(x + steps*h) = e(x)."""
    shift = tuple(int(s) for s in steps)
    return ScalarField(e.grid, np.roll(e.values, shift, axis=tuple(range(e.grid.m))))
