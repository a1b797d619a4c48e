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
Small-matrix arithmetic on the Lie algebra u(n) of skew-Hermitian matrices.

Scalar operations take ``LieElement``/``GroupElement`` values; the ``*_array``
variants act on stacks of matrices with shape ``(..., n, n)`` and are what the
lattice code uses site-parallel.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from ymlab.exceptions import DimensionMismatchError

ALGEBRA_TOLERANCE = 1e-12


def dagger(entries):
    return np.conj(np.swapaxes(entries, -1, -2))


def _scaled_tolerance(*arrays, tol=ALGEBRA_TOLERANCE):
    # Absolute 1e-12 for O(1) entries, relative for larger ones.
    scale = 1.0
    for array in arrays:
        if np.size(array):
            scale *= max(1.0, float(np.max(np.abs(array))))
    return tol * scale


def is_skew_hermitian(entries, tol=ALGEBRA_TOLERANCE):
    entries = np.asarray(entries)
    residual = np.abs(entries + dagger(entries))
    return bool(np.all(residual <= _scaled_tolerance(entries, tol=tol)))


def is_unitary(entries, tol=ALGEBRA_TOLERANCE):
    entries = np.asarray(entries)
    n = entries.shape[-1]
    residual = np.abs(entries @ dagger(entries) - np.eye(n))
    return bool(np.all(residual <= tol * max(1.0, n)))


def _square_matrix(entries, name):
    entries = np.array(entries, dtype=complex)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.shape[0] < 1:
        raise ValueError("%s entries must be a square n x n matrix, got shape %s." % (
            name, entries.shape))
    return entries


@dataclass(frozen=True, eq=False)
class LieElement:
    """An n x n skew-Hermitian matrix, i.e. an element of Lie(U(n))."""

    entries: np.ndarray

    def __post_init__(self):
        entries = _square_matrix(self.entries, "LieElement")
        if not is_skew_hermitian(entries):
            raise ValueError("LieElement entries are not skew-Hermitian within 1e-12.")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def n(self):
        return self.entries.shape[0]

    @classmethod
    def zero(cls, n):
        return cls(np.zeros((n, n), dtype=complex))

    def allclose(self, other, atol=ALGEBRA_TOLERANCE):
        entries = other.entries if isinstance(other, LieElement) else np.asarray(other)
        return entries.shape == self.entries.shape and np.allclose(
            self.entries, entries, rtol=0.0, atol=atol
        )


@dataclass(frozen=True, eq=False)
class GroupElement:
    """An n x n unitary matrix, i.e. an element of U(n)."""

    entries: np.ndarray

    def __post_init__(self):
        entries = _square_matrix(self.entries, "GroupElement")
        if not is_unitary(entries):
            raise ValueError("GroupElement entries are not unitary within 1e-12.")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def n(self):
        return self.entries.shape[0]

    @classmethod
    def identity(cls, n):
        return cls(np.eye(n, dtype=complex))


def _check_same_dimension(a, b):
    if a.n != b.n:
        raise DimensionMismatchError(
            "Dimension mismatch: n = %d and n = %d." % (a.n, b.n)
        )


def killing_form(B, C, check=True):
    """
    Killing form <B, C> = -trace(BC) over stacks of matrices, shape (..., n, n).

    The result is real on u(n); the imaginary residual is checked against the
    algebra tolerance and discarded.
    """
    B = np.asarray(B)
    C = np.asarray(C)
    if B.shape[-2:] != C.shape[-2:]:
        raise DimensionMismatchError(
            "Matrix shapes %s and %s differ." % (B.shape[-2:], C.shape[-2:])
        )
    value = -np.einsum("...ij,...ji->...", B, C)
    if check and np.size(value):
        tol = _scaled_tolerance(B, C) * B.shape[-1]
        if float(np.max(np.abs(value.imag))) > tol:
            raise ValueError(
                "Killing form has an imaginary part above %.1e; inputs are not in u(n)." % tol
            )
    return value.real


def killing_inner(B, C):
    _check_same_dimension(B, C)
    return float(killing_form(B.entries, C.entries))


def commutator_array(B, C):
    return B @ C - C @ B


def commutator(B, C):
    _check_same_dimension(B, C)
    return LieElement(commutator_array(B.entries, C.entries))


def conjugate_array(values, g):
    # g X g* on every matrix of the stack
    g = np.asarray(g)
    return g @ values @ dagger(g)


def gauge_conjugate(B, g):
    _check_same_dimension(B, g)
    return LieElement(conjugate_array(B.entries, g.entries))


def project_skew_array(values):
    values = np.asarray(values)
    return 0.5 * (values - dagger(values))


def project_skew(M):
    M = _square_matrix(M, "project_skew")
    return LieElement(project_skew_array(M))


def random_lie_element(n, rng, scale=1.0, traceless=False):
    raw = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    entries = project_skew_array(scale * raw)
    if traceless and n > 1:
        entries = entries - np.trace(entries) / n * np.eye(n)
    return LieElement(entries)


def random_group_element(n, rng):
    # exp of a skew-Hermitian matrix is unitary; works for n = 1 as well
    return GroupElement(expm(random_lie_element(n, rng).entries))
