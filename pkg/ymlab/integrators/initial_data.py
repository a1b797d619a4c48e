# Copyright 2024 ymlab developers

# Licensed under the Apache License, Version 2.0 (the "License"); you may not
# use this file except in compliance with the License. You may obtain a copy of
# the License at http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
# WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
# License for the specific language governing permissions and limitations under
# the License.


import logging

import numpy as np

from ymlab.lattice import GaugePotential
from ymlab.lie_algebra import project_skew_array

logger = logging.getLogger(__name__)

INITIAL_KINDS = ("flat", "abelian_wave", "random_bump", "two_bump")


def discrete_symbol(grid, wave_numbers):
    """s_mu = sin(k_mu h) / h, the symbol of the central difference on exp(i k.x)."""
    k = 2.0 * np.pi * np.asarray(wave_numbers, dtype=float) / np.array(grid.lengths)
    return np.sin(k * grid.h) / grid.h


def wave_polarization(grid, wave_numbers, rng, polarization=None):
    """A unit polarization orthogonal to the discrete symbol, so the wave is divergence-free."""
    symbol = discrete_symbol(grid, wave_numbers)
    eps = rng.standard_normal(grid.m) if polarization is None else np.array(polarization, float)
    norm2 = float(symbol @ symbol)
    if norm2 > 0:
        eps = eps - (eps @ symbol) / norm2 * symbol
    size = float(np.linalg.norm(eps))
    if size < 1e-12:
        raise ValueError("Polarization is parallel to the wave vector; no transverse part left.")
    return eps / size


def _phase(grid, wave_numbers):
    phase = 0.0
    for axis, n_mu in enumerate(wave_numbers):
        k = 2.0 * np.pi * n_mu / grid.lengths[axis]
        phase = phase + grid.broadcast_axis(k * grid.coordinates(axis), axis)
    return np.broadcast_to(phase, grid.extents)


def abelian_wave(grid, n, rng, amplitude=1.0, wave_numbers=None, polarization=None):
    """A_nu = i amplitude eps_nu sin(k.x) * I_n with a discretely divergence-free eps."""
    if wave_numbers is None:
        wave_numbers = (1,) + (0,) * (grid.m - 1)
    if len(wave_numbers) != grid.m:
        raise ValueError("wave_numbers needs m = %d integers." % grid.m)
    eps = wave_polarization(grid, wave_numbers, rng, polarization)
    profile = np.sin(_phase(grid, wave_numbers))
    values = np.zeros((grid.m,) + grid.extents + (n, n), dtype=complex)
    for nu in range(grid.m):
        values[nu] = (1j * amplitude * eps[nu] * profile)[..., None, None] * np.eye(n)
    return values


def _band_limited_noise(grid, n, rng, band):
    noise = rng.standard_normal((grid.m,) + grid.extents + (n, n)) + 1j * rng.standard_normal(
        (grid.m,) + grid.extents + (n, n)
    )
    axes = tuple(range(1, grid.m + 1))
    spectrum = np.fft.fftn(noise, axes=axes)
    mask = np.ones(grid.extents, dtype=bool)
    for axis, extent in enumerate(grid.extents):
        modes = np.abs(np.fft.fftfreq(extent, d=1.0 / extent))
        mask = mask & grid.broadcast_axis(modes <= band, axis)
    spectrum = spectrum * mask[None, ..., None, None]
    values = project_skew_array(np.fft.ifftn(spectrum, axes=axes))
    if n > 1:
        trace = np.trace(values, axis1=-2, axis2=-1)
        values = values - trace[..., None, None] / n * np.eye(n)
    return values


def _gaussian_envelope(grid, center, width):
    return np.exp(-grid.squared_distances(center) / (2.0 * width**2))


def random_bump(grid, n, rng, amplitude=1.0, band=2, centers=None, width=None):
    """
    Band-limited noise (Fourier modes |n_mu| <= band per axis) under Gaussian envelopes.

    For n > 1 the values are traceless, i.e. su(n) valued. The result is scaled
    so that the largest entry modulus equals ``amplitude``.
    """
    if centers is None:
        centers = [grid.center]
    if width is None:
        width = min(grid.lengths) / 8.0
    noise = _band_limited_noise(grid, n, rng, band)
    envelope = sum(_gaussian_envelope(grid, np.asarray(c, float), width) for c in centers)
    values = noise * envelope[None, ..., None, None]
    peak = float(np.max(np.abs(values)))
    if peak > 0:
        values = values * (amplitude / peak)
    return values


def make_initial(grid, n, kind, seed=0, amplitude=1.0, **options):
    """
    Deterministic initial potential of the given kind.

    ``options`` are forwarded to the generator: ``wave_numbers`` and
    ``polarization`` for abelian_wave, ``band`` and ``width`` for the bumps.
    """
    if kind not in INITIAL_KINDS:
        raise ValueError("Initial kind must be one of %s, got %r." % (INITIAL_KINDS, kind))
    rng = np.random.default_rng(seed)
    if kind == "flat":
        return GaugePotential.zeros(grid, n)
    if kind == "abelian_wave":
        values = abelian_wave(grid, n, rng, amplitude, **options)
    elif kind == "random_bump":
        values = random_bump(grid, n, rng, amplitude, **options)
    else:
        offset = np.zeros(grid.m)
        offset[0] = grid.lengths[0] / 4.0
        centers = [grid.center - offset, grid.center + offset]
        options.setdefault("width", min(grid.lengths) / 12.0)
        values = random_bump(grid, n, rng, amplitude, centers=centers, **options)
    logger.debug("Initial data %s (n = %d, seed = %s)", kind, n, seed)
    return GaugePotential(grid, values)
