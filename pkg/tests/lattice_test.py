# Copyright 2024 ymlab developers

# Licensed under the Apache License, Version 2.0 (the "License"); you may not
# use this file except in compliance with the License. You may obtain a copy of
# the License at http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
# WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
# License for the specific language governing permissions and limitations under
# the License.


import numpy as np
import pytest

from ymlab.exceptions import DimensionMismatchError
from ymlab.lattice import (
    CurvatureField,
    GaugePotential,
    Grid,
    LieField,
    ScalarField,
    conjugate_field,
    covariant_gradient,
    curvature,
    discrete_divergence,
    divergence_star,
    energy_density,
    field_inner,
    gauge_transform_constant,
    shift_scalar_field,
    ym_energy,
)
from ymlab.lie_algebra import (
    GroupElement,
    commutator_array,
    killing_form,
    project_skew_array,
    random_group_element,
)


def random_field(grid, components, n, rng):
    shape = tuple(components) + grid.extents + (n, n)
    raw = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return LieField(grid, project_skew_array(raw))


def constant_potential(grid, matrices):
    n = matrices[0].shape[0]
    values = np.zeros((grid.m,) + grid.extents + (n, n), dtype=complex)
    for mu, matrix in enumerate(matrices):
        values[mu] = matrix
    return GaugePotential(grid, values)


X = np.array([[0, 1], [-1, 0]], dtype=complex)
Y = np.array([[0, 1j], [1j, 0]])


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid(1, (8,), 0.1)
    with pytest.raises(ValueError):
        Grid(2, (8, 3), 0.1)
    with pytest.raises(ValueError):
        Grid(2, (8, 8), 0.0)
    with pytest.raises(ValueError):
        Grid(3, (8, 8), 0.1)

    grid = Grid(2, (8, 10), 0.5)
    assert grid.n_sites == 80
    assert grid.lengths == (4.0, 5.0)
    assert grid.half_period == 2.0
    assert np.allclose(grid.center, [2.0, 2.5])
    assert np.allclose(grid.displacement([0.25, 0.0], [3.75, 0.0]), [-0.5, 0.0])


def test_squared_distances_wrap():
    grid = Grid(2, (8, 8), 1.0)
    r2 = grid.squared_distances([0.0, 0.0])
    assert r2.shape == (8, 8)
    assert r2[7, 0] == pytest.approx(1.0)
    assert r2[4, 4] == pytest.approx(32.0)


def test_field_validation():
    grid = Grid(2, (4, 4), 1.0)
    with pytest.raises(DimensionMismatchError):
        LieField(grid, np.zeros((2, 5, 4, 2, 2)))
    with pytest.raises(ValueError):
        LieField(grid, np.ones((2, 4, 4, 2, 2)))
    with pytest.raises(DimensionMismatchError):
        GaugePotential(grid, np.zeros((3, 4, 4, 1, 1)))
    with pytest.raises(ValueError):
        ScalarField(grid, -np.ones((4, 4)))


def test_curvature_constant_potential_is_commutator():
    grid = Grid(2, (4, 4), 1.0)
    F = curvature(constant_potential(grid, [X, Y]))
    assert F.pairs == [(0, 1)]
    assert np.allclose(F.values[0], commutator_array(X, Y))
    assert np.allclose(F.component(1, 0), -F.values[0])
    assert np.allclose(F.component(0, 0), 0.0)

    e = energy_density(F)
    expected = 2.0 * float(killing_form(commutator_array(X, Y), commutator_array(X, Y)))
    assert np.allclose(e.values, expected)
    assert ym_energy(F) == pytest.approx(expected * 16)


def test_curvature_abelian_wave():
    grid = Grid(2, (16, 16), 0.25)
    k = 2.0 * np.pi / grid.lengths[0]
    x = grid.coordinates(0)
    values = np.zeros((2, 16, 16, 1, 1), dtype=complex)
    values[1, :, :, 0, 0] = 1j * np.sin(k * x)[:, np.newaxis]
    F = curvature(GaugePotential(grid, values))
    expected = 1j * np.cos(k * x) * np.sin(k * grid.h) / grid.h
    assert np.allclose(F.values[0, :, :, 0, 0], expected[:, np.newaxis])


def test_packed_pair_order():
    grid = Grid(4, (4, 4, 4, 4), 1.0)
    F = curvature(GaugePotential.zeros(grid, 1))
    assert F.pairs == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    full = F.full()
    assert full.component_shape == (4, 4)
    with pytest.raises(DimensionMismatchError):
        CurvatureField(grid, np.zeros((3, 4, 4, 4, 4, 1, 1)))


def test_divergence_star_is_adjoint():
    rng = np.random.default_rng(11)
    grid = Grid(2, (4, 5), 0.7)
    for _ in range(100):
        A = GaugePotential(grid, random_field(grid, (2,), 2, rng).values)
        B = random_field(grid, (2,), 2, rng)
        S = random_field(grid, (2, 2), 2, rng)
        lhs = field_inner(covariant_gradient(A, B), S)
        rhs = field_inner(B, divergence_star(A, S))
        assert abs(lhs - rhs) < 1e-10 * max(1.0, abs(lhs))


def test_divergence_star_accepts_curvature():
    rng = np.random.default_rng(12)
    grid = Grid(3, (4, 4, 4), 0.5)
    A = GaugePotential(grid, random_field(grid, (3,), 2, rng).values)
    F = curvature(A)
    assert np.allclose(divergence_star(A, F).values, divergence_star(A, F.full()).values)


def test_gauge_equivariance_of_curvature():
    rng = np.random.default_rng(13)
    grid = Grid(3, (4, 4, 4), 0.5)
    A = GaugePotential(grid, random_field(grid, (3,), 2, rng).values)
    g = random_group_element(2, rng)
    F = curvature(A)
    F_gauged = curvature(gauge_transform_constant(A, g))
    assert np.allclose(F_gauged.values, conjugate_field(F, g).values, atol=1e-10)
    assert np.allclose(energy_density(F_gauged).values, energy_density(F).values, atol=1e-9)


def test_gauge_dimension_mismatch():
    grid = Grid(2, (4, 4), 1.0)
    with pytest.raises(DimensionMismatchError):
        gauge_transform_constant(GaugePotential.zeros(grid, 2), GroupElement.identity(3))


def test_shift_scalar_field():
    grid = Grid(2, (4, 4), 1.0)
    values = np.zeros((4, 4))
    values[0, 0] = 1.0
    shifted = shift_scalar_field(ScalarField(grid, values), (1, 3))
    assert shifted.values[1, 3] == 1.0
    assert shifted.total() == pytest.approx(1.0)



def test_discrete_divergence_of_waves():
    grid = Grid(2, (16, 16), 0.25)
    k = 2.0 * np.pi / grid.lengths[0]
    x = grid.coordinates(0)

    transverse = np.zeros((2, 16, 16, 1, 1), dtype=complex)
    transverse[1, :, :, 0, 0] = 1j * np.sin(k * x)[:, np.newaxis]
    div = discrete_divergence(GaugePotential(grid, transverse))
    assert div.values.shape == (1, 16, 16, 1, 1)
    assert np.allclose(div.values, 0.0)

    longitudinal = np.zeros((2, 16, 16, 1, 1), dtype=complex)
    longitudinal[0, :, :, 0, 0] = 1j * np.sin(k * x)[:, np.newaxis]
    div = discrete_divergence(GaugePotential(grid, longitudinal))
    expected = 1j * np.cos(k * x) * np.sin(k * grid.h) / grid.h
    assert np.allclose(div.values[0, :, :, 0, 0], expected[:, np.newaxis])
