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

import numpy as np
import pytest

from ymlab.density import DensityEvaluator, DensityLadder, QuadratureConfig
from ymlab.geometry import Plane, SyntheticTube, grassmann_sample
from ymlab.interfaces import StaticFieldInterface
from ymlab.lattice import Grid, ScalarField
from ymlab.singular_set import (
    SingularCandidateSet,
    calibrate_tube_epsilon,
    cone_concentration_test,
    directional_density_test,
    extract_singular_set,
    fubini_slice_average,
    liminf_field,
    pde_residual,
    pde_residual_static_terms,
    slice_finiteness_fraction,
    slice_integral,
    slice_ladder,
    slice_nodes,
    sphere_area,
)

TUBE_SCALES = [1.41, 1.19, 1.0]
TUBE_TAU = 10.0


@pytest.fixture(scope="module")
def planted():
    grid = Grid(5, (12,) * 5, 1.0)
    tube = SyntheticTube(Plane.coordinate(5, [0]), tuple(grid.center), r0=2.0)
    interface = StaticFieldInterface(tube.density(grid))
    evaluator = DensityEvaluator(interface, QuadratureConfig(r_trunc=4.0, tail_tolerance=0.2))
    _, liminf = liminf_field(evaluator, TUBE_TAU, TUBE_SCALES)
    epsilon = calibrate_tube_epsilon(liminf, tube.distance_field(grid), 0.5, 0.5)
    singular = extract_singular_set(evaluator, grid, TUBE_TAU, epsilon, TUBE_SCALES)
    return grid, evaluator, epsilon, singular


@pytest.fixture(scope="module")
def noise5():
    grid = Grid(5, (12,) * 5, 1.0)
    rng = np.random.default_rng(41)
    return DensityEvaluator(StaticFieldInterface(ScalarField(grid, rng.random(grid.extents))))


def test_planted_tube_recovered(planted):
    grid, _, _, singular = planted
    assert len(singular) == 12
    transverse = np.array(singular.points)[:, 1:]
    assert np.allclose(transverse, grid.center[1:])
    assert sorted(p[0] for p in singular.points) == pytest.approx(list(grid.coordinates(0)))
    rows = singular.as_rows()
    assert set(rows[0]) == {"z1", "z2", "z3", "z4", "z5", "liminf_theta"}


def test_singular_set_shrinks_with_epsilon(planted):
    grid, evaluator, epsilon, singular = planted
    lower = extract_singular_set(evaluator, grid, TUBE_TAU, 0.5 * epsilon, TUBE_SCALES)
    assert set(singular.points) <= set(lower.points)
    empty = extract_singular_set(evaluator, grid, TUBE_TAU, 1e9, TUBE_SCALES)
    assert len(empty) == 0
    assert empty.as_rows() == []


def test_candidate_set_validation():
    grid = Grid(2, (4, 4), 1.0)
    ladder = DensityLadder((0.0, 0.0), 1.0, (0.3, 0.2, 0.1), (1.0, 0.5, 2.0))
    with pytest.raises(ValueError):
        SingularCandidateSet(grid, 1.0, 1.0, [(0.0, 0.0)], [ladder])
    accepted = SingularCandidateSet(grid, 1.0, 1.0, [(0.0, 0.0)], [ladder], j=1)
    assert accepted.liminf_values == [2.0]


def test_calibrate_tube_epsilon():
    liminf = np.array([5.0, 4.0, 1.0, 2.0])
    distance = np.array([0.0, 0.0, 1.0, 2.0])
    assert calibrate_tube_epsilon(liminf, distance, 0.5, 0.5) == pytest.approx(3.0)
    with pytest.raises(ValueError):
        calibrate_tube_epsilon(liminf, distance + 1.0, 0.5, 0.5)


def test_cone_concentration(planted):
    grid, _, _, singular = planted
    z_bar = grid.center
    along = Plane.coordinate(5, [0])
    across = Plane.coordinate(5, [1])
    assert cone_concentration_test(singular, z_bar, along, 0.5, [6.0, 4.0]) == [True, True]
    assert cone_concentration_test(singular, z_bar, across, 0.1, [1.0, 0.5]) == [False, False]
    assert cone_concentration_test(singular, z_bar, across, 0.1, [6.0]) == [False]


def test_cone_concentration_empty_set():
    grid = Grid(2, (4, 4), 1.0)
    empty = SingularCandidateSet(grid, 1.0, 1.0)
    assert cone_concentration_test(empty, grid.center, Plane.coordinate(2, [0]), 0.5, [1.0]) == [
        False
    ]


def test_directional_density(planted):
    grid, evaluator, epsilon, _ = planted
    along = directional_density_test(
        evaluator, grid.center, [1, 0, 0, 0, 0], [0.0, 1.0, 2.5], TUBE_SCALES, TUBE_TAU
    )
    across = directional_density_test(
        evaluator, grid.center, [0, 1, 0, 0, 0], [3.0], TUBE_SCALES, TUBE_TAU
    )
    on_axis = directional_density_test(
        evaluator, grid.center, [1, 0, 0, 0, 0], [0.0], TUBE_SCALES, TUBE_TAU
    )
    assert on_axis >= epsilon
    assert along > across
    assert across < epsilon


def test_sphere_area():
    assert sphere_area(2) == pytest.approx(2 * math.pi)
    assert sphere_area(3) == pytest.approx(4 * math.pi)
    assert sphere_area(4) == pytest.approx(2 * math.pi**2)


def test_slice_nodes():
    nodes = slice_nodes(1.0, 1.0)
    # the origin and the 8 unit vectors
    assert len(nodes) == 9
    assert np.max(np.linalg.norm(nodes, axis=1)) <= 1.0


def test_slice_of_constant_field():
    grid = Grid(4, (8,) * 4, 1.0)
    e = ScalarField(grid, np.full(grid.extents, 3.0))
    evaluator = DensityEvaluator(StaticFieldInterface(e))
    rho, tau = 0.5, 1.0
    level = evaluator.theta_field(tau, rho)[0, 0, 0, 0] * rho**-4
    plane = grassmann_sample(4, 4 - 1, seed=0)
    with pytest.raises(ValueError):
        slice_integral(evaluator, grid.center, plane, rho, tau)
    full = Plane.coordinate(4, range(4))
    value = slice_integral(evaluator, grid.center, full, rho, tau)
    nodes = slice_nodes(grid.half_period, 0.5 * grid.h)
    assert value == pytest.approx(level * len(nodes) * (0.5 * grid.h) ** 4, rel=1e-9)
    ball = math.pi**2 / 2 * grid.half_period**4
    assert value == pytest.approx(level * ball, rel=0.05)


def test_slice_ladder_finite(noise5):
    grid = noise5.grid
    planes = [grassmann_sample(5, 4, seed=s) for s in range(3)]
    scales = [0.75, 0.6, 0.5]
    table = slice_ladder(noise5, grid.center, planes, scales, 1.0, r_slice=3.0, spacing=1.0)
    assert table.shape == (3, 3)
    assert np.all(table > 0)
    assert slice_finiteness_fraction(table) == 1.0


def test_slice_finiteness_fraction():
    table = [[1.0, 1.5, 1.8], [1.0, 3.0, 2.5], [1.0, 0.5, 4.0], [2.0, 5.0, 6.0]]
    assert slice_finiteness_fraction(table) == 0.5
    assert slice_finiteness_fraction(np.zeros((0, 3))) == 1.0
    assert slice_finiteness_fraction([[1.0], [2.0]]) == 1.0


def test_fubini_slice_average(noise5):
    grid = noise5.grid
    z_bar = grid.center + 0.5 * grid.h
    planes = [grassmann_sample(5, 4, seed=100 + s) for s in range(20)]
    average, ball = fubini_slice_average(noise5, z_bar, planes, 0.75, 4.0)
    assert ball > 0
    assert average == pytest.approx(ball, rel=0.05)


def test_pde_residual_static_field():
    grid = Grid(2, (128, 128), 1.0)
    rng = np.random.default_rng(43)
    e = ScalarField(grid, rng.random(grid.extents))
    rho, r_trunc = 4.0, 12.0
    evaluator = DensityEvaluator(StaticFieldInterface(e), QuadratureConfig(r_trunc=r_trunc))
    z = grid.center + np.array([0.3, -0.2])
    terms = pde_residual_static_terms(e, z, rho, r_trunc)
    assert terms["residual"] == pytest.approx(terms["theta"] / rho**2, rel=1e-10)
    assert terms["theta"] == pytest.approx(evaluator(z, 100.0, rho), rel=1e-12)

    widths = (0.005 * rho, 0.005 * rho, 0.002 * rho)
    residual = pde_residual(evaluator, z, 100.0, rho, widths)
    assert residual == pytest.approx(terms["residual"], rel=1e-4)


def test_pde_residual_inadmissible_stencil(noise5):
    z = noise5.grid.center
    with pytest.raises(ValueError):
        pde_residual(noise5, z, 4.0, 0.5, (0.1, 0.1, 0.5))
    with pytest.raises(ValueError, match="Inadmissible"):
        pde_residual(noise5, z, 0.3, 0.5, (0.1, 0.1, 0.1))


def test_pde_residual_on_planted_tube_approaches_static_value(planted):
    grid, evaluator, _, _ = planted
    z = grid.center
    rho = TUBE_SCALES[1]
    support_radius = evaluator.quad.r_trunc * rho
    e = evaluator.interface.density_at(TUBE_TAU, rho)
    terms = pde_residual_static_terms(e, z, rho, evaluator.quad.r_trunc)
    target = evaluator(z, TUBE_TAU, rho) / rho**2
    assert terms["residual"] == pytest.approx(target, rel=1e-10)

    widths = np.array([0.5 * grid.h, rho**2 / 20.0, rho / 20.0])
    residuals = [
        pde_residual(evaluator, z, TUBE_TAU, rho, tuple(widths * 2.0**-level), support_radius)
        for level in range(4)
    ]
    assert residuals[-1] == pytest.approx(target, rel=1e-2)
    assert abs(residuals[3] - residuals[2]) < abs(residuals[1] - residuals[0]) + 1e-9


def test_pde_residual_support_must_fit(planted):
    grid, evaluator, _, _ = planted
    with pytest.raises(ValueError):
        pde_residual(evaluator, grid.center, TUBE_TAU, 1.0, (0.5, 0.05, 0.05), 5.8)


def test_planted_tube_ladder_on_plane(planted):
    grid, evaluator, _, _ = planted
    for shift in (0.0, 3.0):
        z = grid.center + np.array([shift, 0.0, 0.0, 0.0, 0.0])
        values = evaluator.ladder(z, TUBE_TAU, TUBE_SCALES).values
        assert max(values) < 2.0 * min(values)


def test_planted_tube_slices_finite(planted):
    grid, evaluator, _, _ = planted
    rng = np.random.default_rng(0)
    planes = [grassmann_sample(5, 4, rng) for _ in range(50)]
    table = slice_ladder(evaluator, grid.center, planes, TUBE_SCALES, TUBE_TAU)
    assert table.shape == (50, 3)
    assert slice_finiteness_fraction(table) >= 0.9
