"""Histograms of per-particle agitation energy."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .pointsys import ParticleCloud, affine_fit, relative


class DegenerateInputError(ValueError):
    pass


@dataclass(frozen=True)
class Histogram:
    """Bins ``[(j-1) delta, j delta)``, ``j = 1..J``, of the normalised energy ``xi``.

    ``values`` are mass fractions divided by ``delta``. ``share_top_bin`` is
    the top bin index obtained when energies are instead measured as shares
    of the total agitation energy (each share is at most one).
    """

    delta: float
    values: np.ndarray
    counts: np.ndarray
    n: int
    xi: np.ndarray
    share_top_bin: int

    @property
    def top_bin(self) -> int:
        nz = np.nonzero(self.counts)[0]
        return int(nz[-1]) + 1

    @property
    def mass(self) -> float:
        return float(self.delta * self.values.sum())

    @property
    def first_moment(self) -> float:
        j = np.arange(1, self.values.size + 1)
        return float(self.delta ** 2 * np.sum((j - 0.5) * self.values))

    @property
    def top_mass_fraction(self) -> float:
        return float(self.delta * self.values[self.top_bin - 1])

    def edges(self) -> np.ndarray:
        return self.delta * np.arange(self.values.size + 1)


def agitation_energies(cloud: ParticleCloud, G=None) -> np.ndarray:
    """Per-particle agitation energy ``m |G sdot|^2 / 2`` after an affine fit."""
    fit = affine_fit(cloud, G)
    w = fit.spatial_shuffle_rates
    return 0.5 * cloud.masses * np.einsum("ia,ia->i", w, w)


def histogram(source, delta: float = 0.1, masses=None, G=None) -> Histogram:
    """Bin particles by ``xi = (e_i / m_i) / e_bar`` weighting each by its mass fraction.

    ``source`` is a :class:`ParticleCloud` (energies come from an affine fit)
    or a sequence of specific energies ``e_i / m_i`` (equal masses unless
    ``masses`` is given). ``e_bar`` is the agitation energy per unit mass of
    the whole system, so the mass-weighted mean of ``xi`` is one.
    """
    if not (delta > 0.0 and math.isfinite(delta)):
        raise ValueError("delta must be positive")
    floor = 0.0
    if isinstance(source, ParticleCloud):
        m = source.masses
        specific = agitation_energies(source, G) / m
        # shuffle rates of an exactly affine field are pure roundoff
        _, _, _, yd = relative(source)
        floor = 1e-24 * float(m @ np.einsum("ia,ia->i", yd, yd)) / m.sum()
    else:
        specific = np.asarray(source, dtype=float).reshape(-1)
        m = np.ones_like(specific) if masses is None else np.asarray(masses, dtype=float).reshape(-1)
        if m.shape != specific.shape or np.any(m <= 0.0):
            raise ValueError("masses must be positive and match the energies")
        if np.any(specific < 0.0) or not np.all(np.isfinite(specific)):
            raise ValueError("specific energies must be finite and non-negative")
    frac = m / m.sum()
    e_bar = float(frac @ specific)
    if not e_bar > floor:
        raise DegenerateInputError("total agitation energy is zero")
    xi = specific / e_bar
    idx = np.floor(xi / delta).astype(int)
    nbins = int(idx.max()) + 1
    values = np.bincount(idx, weights=frac, minlength=nbins) / delta
    counts = np.bincount(idx, minlength=nbins)
    share = m * specific / np.sum(m * specific)
    share_top = int(np.floor(share.max() / delta)) + 1
    return Histogram(float(delta), values, counts, int(specific.size), xi, share_top)
