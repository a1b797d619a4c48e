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
from ymlab.lie_algebra import (
    GroupElement,
    LieElement,
    commutator,
    gauge_conjugate,
    killing_inner,
    project_skew,
    random_group_element,
    random_lie_element,
)

B_REAL = LieElement(np.array([[0, 1], [-1, 0]], dtype=complex))
C_IMAG = LieElement(np.array([[0, 1j], [1j, 0]]))


def random_triple(rng, n=3):
    return [random_lie_element(n, rng) for _ in range(3)]


def test_killing_inner_examples():
    assert killing_inner(LieElement.zero(2), LieElement.zero(2)) == 0.0
    i_identity = LieElement(1j * np.eye(2))
    assert killing_inner(i_identity, i_identity) == pytest.approx(2.0, abs=1e-12)
    assert killing_inner(B_REAL, C_IMAG) == pytest.approx(0.0, abs=1e-12)


def test_killing_inner_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        killing_inner(LieElement.zero(2), LieElement.zero(3))
    with pytest.raises(ValueError):
        commutator(LieElement.zero(1), LieElement.zero(2))


def test_killing_inner_symmetric_bilinear_positive():
    rng = np.random.default_rng(0)
    for _ in range(50):
        B, C, D = random_triple(rng)
        assert killing_inner(B, C) == pytest.approx(killing_inner(C, B), abs=1e-12)
        combined = LieElement(2.0 * B.entries - 0.5 * C.entries)
        expected = 2.0 * killing_inner(B, D) - 0.5 * killing_inner(C, D)
        assert killing_inner(combined, D) == pytest.approx(expected, abs=1e-11)
        assert killing_inner(B, B) > 0


def test_commutator_examples():
    assert commutator(B_REAL, B_REAL).allclose(LieElement.zero(2))
    expected = np.array([[2j, 0], [0, -2j]])
    assert commutator(B_REAL, C_IMAG).allclose(expected)
    a, b = LieElement(np.array([[0.3j]])), LieElement(np.array([[-1.7j]]))
    assert commutator(a, b).allclose(LieElement.zero(1))


def test_adjoint_action_skew_and_jacobi():
    rng = np.random.default_rng(1)
    for _ in range(50):
        A, B, C = random_triple(rng)
        lhs = killing_inner(commutator(A, B), C)
        rhs = -killing_inner(B, commutator(A, C))
        assert lhs == pytest.approx(rhs, abs=1e-12)
        jacobi = (
            commutator(A, commutator(B, C)).entries
            + commutator(B, commutator(C, A)).entries
            + commutator(C, commutator(A, B)).entries
        )
        assert np.max(np.abs(jacobi)) < 1e-12


def test_gauge_conjugate():
    rng = np.random.default_rng(2)
    B, C, _ = random_triple(rng, n=2)
    assert gauge_conjugate(B, GroupElement.identity(2)).allclose(B)
    center = LieElement(1j * np.eye(2))
    g = random_group_element(2, rng)
    assert gauge_conjugate(center, g).allclose(center)
    conjugated = killing_inner(gauge_conjugate(B, g), gauge_conjugate(C, g))
    assert conjugated == pytest.approx(killing_inner(B, C), abs=1e-12)
    with pytest.raises(DimensionMismatchError):
        gauge_conjugate(B, GroupElement.identity(3))


def test_project_skew():
    rng = np.random.default_rng(3)
    B = random_lie_element(3, rng)
    assert project_skew(B.entries).allclose(B)
    assert project_skew(np.eye(2)).allclose(LieElement.zero(2))
    projected = project_skew(np.array([[1, 2], [0, -1]], dtype=complex))
    assert projected.allclose(np.array([[0, 1], [-1, 0]]))


def test_invalid_elements():
    with pytest.raises(ValueError):
        LieElement(np.eye(2))
    with pytest.raises(ValueError):
        GroupElement(2.0 * np.eye(2))
    with pytest.raises(ValueError):
        LieElement(np.zeros((2, 3)))


def test_random_group_element_abelian():
    g = random_group_element(1, np.random.default_rng(4))
    assert abs(abs(g.entries[0, 0]) - 1.0) < 1e-12
    assert random_lie_element(2, np.random.default_rng(5), traceless=True).entries.trace() == (
        pytest.approx(0.0, abs=1e-12)
    )
