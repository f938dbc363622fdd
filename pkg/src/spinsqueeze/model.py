"""Problem definition and the observable record shared by the LSW and ED solvers."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

from .lattice import LatticeSpec


class NumericalError(RuntimeError):
    """A solver left its range of validity or failed to converge."""


class GaplessModeError(NumericalError):
    pass


class MagnetizationCollapseError(NumericalError):
    pass


class PhysicalityError(NumericalError):
    pass


class NormDriftError(NumericalError):
    pass


class ConvergenceError(NumericalError):
    pass


@dataclass(frozen=True)
class ModelSpec:
    """Nearest-neighbour XXZ model in a uniform transverse field.

    H = -J sum_<ij> (Sx_i Sx_j + Sy_i Sy_j - delta Sz_i Sz_j) - omega sum_i Sx_i

    with ferromagnetic in-plane coupling ``J > 0`` and ``-1 < delta <= 1``.
    """

    lattice: LatticeSpec
    delta: float = 1.0
    omega: float = 1.0
    coupling: float = 1.0

    def __post_init__(self):
        if not self.coupling > 0:
            raise ValueError(f"coupling must be positive, got {self.coupling}")
        if not -1.0 < self.delta <= 1.0:
            raise ValueError(f"anisotropy must lie in (-1, 1], got {self.delta}")
        if not self.omega >= 0:
            raise ValueError(f"field must be non-negative, got {self.omega}")

    @classmethod
    def hypercubic(cls, d, L, delta=1.0, omega=1.0, coupling=1.0, extents=None):
        return cls(LatticeSpec(d, L, extents), float(delta), float(omega), float(coupling))

    @property
    def n_sites(self) -> int:
        return self.lattice.n_sites

    @property
    def d(self) -> int:
        return self.lattice.d

    def with_omega(self, omega: float) -> "ModelSpec":
        return replace(self, omega=float(omega))


@dataclass(frozen=True)
class SpinObservables:
    """Collective-spin moments of one state.

    Variances are of the total spin, not per spin. ``gap`` is NaN when the
    producing method has no spectrum at hand.
    """

    n_sites: int
    jx: float
    var_jz: float
    var_jy: float
    cov_yz: float = 0.0
    var_jx: float = math.nan
    fq: float = math.nan
    gap: float = math.nan

    @property
    def jx_per_spin(self) -> float:
        return self.jx / self.n_sites

    @property
    def min_perp_var(self) -> float:
        """Smallest variance in the plane orthogonal to the mean spin (taken along x)."""
        mean = 0.5 * (self.var_jy + self.var_jz)
        half_diff = 0.5 * (self.var_jy - self.var_jz)
        return mean - math.sqrt(half_diff**2 + self.cov_yz**2)

    @property
    def xi2(self) -> float:
        """Wineland squeezing parameter N min_perp Var / <Jx>^2."""
        if self.jx == 0:
            return math.nan
        return self.n_sites * self.min_perp_var / self.jx**2

    @property
    def inv_xi2(self) -> float:
        return self.jx**2 / (self.n_sites * self.min_perp_var)

    @property
    def var_bound(self) -> float:
        """The upper end of the metrological chain, 4 Var(Jy) / N."""
        return 4.0 * self.var_jy / self.n_sites

    @property
    def uncertainty_ratio(self) -> float:
        """Var(Jy) Var(Jz) / (<Jx>^2 / 4); 1 for a minimal-uncertainty state."""
        return 4.0 * self.var_jy * self.var_jz / self.jx**2

    def as_row(self) -> dict:
        row = asdict(self)
        row["jx_per_spin"] = self.jx_per_spin
        row["xi2"] = self.xi2
        return row
