"""Periodic hypercubic lattices, their momentum grids and the coupling structure factor.

Sites are linearized row-major: the coordinate along the *last* axis varies
fastest, so site ``i`` of a ``(L0, L1)`` cluster sits at ``(i // L1, i % L1)``.
ED basis states inherit this ordering bit for bit.

Two normalizations of the structure factor are in common use.
Summing the couplings over *ordered* pairs and dividing by N gives
``gamma_0 = z * J``; the bond-counted form used here,
``gamma_k = J * sum_a cos(k_a)``, gives ``gamma_0 = z * J / 2``. Only the latter
reproduces the low-field gap ``2 sqrt(J * Omega)`` of the square lattice and
agrees with exact diagonalization.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod

import numpy as np


@dataclass(frozen=True)
class LatticeSpec:
    """Periodic hypercubic lattice of ``N = L**d`` sites.

    ``extents`` overrides the per-axis lengths for rectangular clusters such
    as a 3x4 plaquette; ``L`` is then only a label (the largest extent).
    """

    d: int
    L: int
    extents: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise ValueError(f"lattice dimension must be 1, 2 or 3, got d={self.d}")
        if self.extents is None:
            if self.L < 2:
                raise ValueError(f"linear size must be >= 2, got L={self.L}")
            object.__setattr__(self, "extents", (int(self.L),) * self.d)
        else:
            ext = tuple(int(x) for x in self.extents)
            if len(ext) != self.d:
                raise ValueError(f"extents {ext} do not match d={self.d}")
            if min(ext) < 2:
                raise ValueError(f"every extent must be >= 2, got {ext}")
            object.__setattr__(self, "extents", ext)
            object.__setattr__(self, "L", max(ext))

    @property
    def n_sites(self) -> int:
        return prod(self.extents)

    @property
    def coordination(self) -> int:
        return 2 * self.d

    @property
    def is_hypercubic(self) -> bool:
        return len(set(self.extents)) == 1


def site_coordinates(spec: LatticeSpec) -> np.ndarray:
    """Integer coordinates of every site, shape (N, d), row-major order."""
    grids = np.meshgrid(*[np.arange(n) for n in spec.extents], indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def neighbor_table(spec: LatticeSpec) -> np.ndarray:
    """Nearest neighbours under periodic wrapping, shape (N, z).

    Column ``2a`` holds the +1 neighbour along axis ``a``, column ``2a + 1`` the
    -1 neighbour. For an extent of 2 both entries name the same site.
    """
    coords = site_coordinates(spec)
    ext = np.array(spec.extents)
    table = np.empty((spec.n_sites, spec.coordination), dtype=np.int64)
    for a in range(spec.d):
        for col, step in ((2 * a, 1), (2 * a + 1, -1)):
            shifted = coords.copy()
            shifted[:, a] = (shifted[:, a] + step) % ext[a]
            table[:, col] = np.ravel_multi_index(shifted.T, spec.extents)
    return table


def bonds(spec: LatticeSpec) -> np.ndarray:
    """Distinct undirected nearest-neighbour bonds as (i, j) rows with i < j.

    A wrap-around bond on an extent-2 axis coincides with the direct bond and
    is kept once.
    """
    table = neighbor_table(spec)
    pairs = set()
    for i, row in enumerate(table):
        for j in row:
            if i != j:
                pairs.add((min(i, int(j)), max(i, int(j))))
    return np.array(sorted(pairs), dtype=np.int64).reshape(-1, 2)


def momentum_grid(spec: LatticeSpec) -> np.ndarray:
    """All N grid momenta ``k_a = 2 pi n_a / L_a``, shape (N, d), same ordering as sites."""
    return 2.0 * np.pi * site_coordinates(spec) / np.array(spec.extents)


def negated_index(spec: LatticeSpec) -> np.ndarray:
    """Index of ``-k`` (mod 2 pi) for every grid momentum."""
    coords = site_coordinates(spec)
    ext = np.array(spec.extents)
    return np.ravel_multi_index(((-coords) % ext).T, spec.extents)


def gamma_k(k: np.ndarray, coupling: float = 1.0) -> np.ndarray:
    """Structure factor ``J * sum_a cos(k_a)`` for one momentum (d,) or a stack (..., d)."""
    k = np.asarray(k, dtype=float)
    return coupling * np.cos(k).sum(axis=-1)


def build_lattice(d: int, L: int, extents: tuple[int, ...] | None = None):
    """Return ``(spec, neighbor_table, momenta)`` for a periodic lattice."""
    spec = LatticeSpec(d, L, extents)
    return spec, neighbor_table(spec), momentum_grid(spec)
