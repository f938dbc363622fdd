"""Static linear spin-wave theory of the field-polarized XXZ model.

Holstein-Primakoff bosons are quantized along the field (x) axis, so that
``Sy ~ (b + b^dag)/2`` and ``Sz ~ (b - b^dag)/(2i)``. The quadratic Hamiltonian

    H = E_mf + 1/2 sum_k [2 A_k b_k^dag b_k + B_k (b_k b_-k + h.c.)]

has

    A_k = gamma_0 + (delta - 1) gamma_k / 2 + omega
    B_k = -(delta + 1) gamma_k / 2

with ``gamma_k = J sum_a cos k_a``. The minus sign on ``B_k`` is what makes
``Var(Jz)`` vanish as ``omega -> 0``; with the opposite sign it would diverge.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy import stats

from .lattice import gamma_k, momentum_grid
from .model import GaplessModeError, MagnetizationCollapseError, ModelSpec, SpinObservables


class BogoliubovMode(NamedTuple):
    k: np.ndarray
    gamma: float
    A: float
    B: float
    eps: float
    u: float
    v: float


@dataclass(frozen=True)
class BogoliubovModes:
    """All modes of one model, stored as parallel arrays (index 0 is k = 0)."""

    k: np.ndarray
    gamma: np.ndarray
    A: np.ndarray
    B: np.ndarray
    eps: np.ndarray
    u: np.ndarray
    v: np.ndarray

    def __len__(self):
        return len(self.A)

    def __getitem__(self, i) -> BogoliubovMode:
        return BogoliubovMode(self.k[i], self.gamma[i], self.A[i], self.B[i],
                              self.eps[i], self.u[i], self.v[i])

    def __iter__(self):
        return (self[i] for i in range(len(self)))


def mode_coefficients(model: ModelSpec, omega: float | None = None):
    """``(k, gamma_k, A_k, B_k)`` on the model's momentum grid.

    ``omega`` overrides the model field; only ``A_k`` depends on it.
    """
    k = momentum_grid(model.lattice)
    gam = gamma_k(k, model.coupling)
    gamma0 = model.d * model.coupling
    field = model.omega if omega is None else omega
    A = gamma0 + 0.5 * (model.delta - 1.0) * gam + field
    B = -0.5 * (model.delta + 1.0) * gam
    return k, gam, A, B


def build_modes(model: ModelSpec) -> BogoliubovModes:
    k, gam, A, B = mode_coefficients(model)
    eps2 = (A - B) * (A + B)
    if np.any(eps2 <= 0) or np.any(A <= 0):
        bad = int(np.argmin(eps2))
        raise GaplessModeError(
            f"gapless mode at k={k[bad].tolist()} (omega={model.omega}, delta={model.delta})")
    eps = np.sqrt(eps2)
    # v^2 = (A/eps - 1)/2 written without the cancellation at large field
    v2 = 0.5 * B**2 / (eps * (A + eps))
    u = np.sqrt(1.0 + v2)
    v = np.sign(B) * np.sqrt(v2)
    return BogoliubovModes(k, gam, A, B, eps, u, v)


def lsw_observables(modes: BogoliubovModes, model: ModelSpec) -> SpinObservables:
    n = model.n_sites
    jx = 0.5 * n - float(np.sum(modes.v**2))
    if jx <= 0:
        raise MagnetizationCollapseError(
            f"spin-wave depletion exceeds the moment (<Jx>={jx:.4g}, omega={model.omega})")
    A0, B0, eps0 = modes.A[0], modes.B[0], modes.eps[0]
    var_jz = 0.25 * n * (A0 + B0) / eps0
    var_jy = 0.25 * n * (A0 - B0) / eps0
    return SpinObservables(
        n_sites=n, jx=jx, var_jz=float(var_jz), var_jy=float(var_jy), cov_yz=0.0,
        fq=float(4.0 * var_jy / n), gap=float(np.min(modes.eps)))


def lsw_ground_energy(modes: BogoliubovModes, model: ModelSpec) -> float:
    """Mean-field energy plus the Bogoliubov zero-point shift ``sum_k (eps_k - A_k)/2``."""
    n = model.n_sites
    e_mf = -0.25 * model.coupling * model.d * n - 0.5 * model.omega * n
    return float(e_mf + 0.5 * np.sum(modes.eps - modes.A))


def lsw_gap(model: ModelSpec) -> float:
    return float(np.min(build_modes(model).eps))


def solve(model: ModelSpec) -> SpinObservables:
    return lsw_observables(build_modes(model), model)


def adiabatic_time_estimate(model: ModelSpec, omega_f: float, omega_max: float | None = None,
                            n_grid: int = 400) -> float:
    """Ramp duration ``(min gap)^-2`` (units of 1/J) for a ramp ending at ``omega_f``.

    The gap is minimized over a log grid from ``omega_f`` to ``omega_max``
    (default: well into the field-dominated regime, where the gap only grows).
    """
    if not omega_f > 0:
        raise ValueError("final field must be positive")
    J = model.coupling
    if omega_max is None:
        omega_max = max(1e3 * J, 10.0 * omega_f)
    grid = np.geomspace(omega_f, omega_max, n_grid)
    gaps = [lsw_gap(model.with_omega(w)) for w in grid]
    gmin = min(gaps)
    return float((J / gmin) ** 2 / J)


ROW_FIELDS = ("d", "delta", "L", "omega", "jx_per_spin", "var_jz", "var_jy", "cov_yz",
              "xi2", "fq", "gap", "error")


def observables_row(model: ModelSpec, obs: SpinObservables | None, error: str = "") -> dict:
    row = {"d": model.d, "delta": model.delta, "L": model.lattice.L, "omega": model.omega}
    if obs is None:
        row.update({key: float("nan") for key in ROW_FIELDS[4:-1]})
    else:
        row.update(jx_per_spin=obs.jx_per_spin, var_jz=obs.var_jz, var_jy=obs.var_jy,
                   cov_yz=obs.cov_yz, xi2=obs.xi2, fq=obs.fq, gap=obs.gap)
    row["error"] = error
    return row


def sweep(template: ModelSpec, omegas: Iterable[float], sizes: Sequence[int] | None = None) -> list[dict]:
    """LSW observables on an (L, omega) grid, one row per point, ordered by key.

    A failing point becomes a row with NaN observables and the error message;
    the sweep carries on.
    """
    omegas = sorted(float(w) for w in omegas)
    sizes = sorted(sizes) if sizes else [template.lattice.L]
    rows = []
    for L in sizes:
        base = ModelSpec.hypercubic(template.d, L, template.delta, 0.0, template.coupling)
        for w in omegas:
            model = base.with_omega(w)
            try:
                rows.append(observables_row(model, solve(model)))
            except (GaplessModeError, MagnetizationCollapseError) as exc:
                rows.append(observables_row(model, None, f"{type(exc).__name__}: {exc}"))
    return rows


@dataclass(frozen=True)
class PowerLawFit:
    slope: float
    intercept: float
    stderr: float
    n_points: int

    def __iter__(self):
        return iter((self.slope, self.intercept, self.stderr))


def fit_power_law(rows: Sequence[dict], column: str, window: tuple[float, float],
                  x: str = "omega") -> PowerLawFit:
    """Least-squares slope of log(column) against log(omega) inside ``window`` (inclusive)."""
    lo, hi = window
    pts = [(r[x], r[column]) for r in rows
           if lo * (1 - 1e-12) <= r[x] <= hi * (1 + 1e-12) and not r.get("error")]
    if len(pts) < 3:
        raise ValueError(f"need at least 3 points in {window}, got {len(pts)}")
    xs, ys = np.array(pts, dtype=float).T
    if np.any(ys <= 0) or np.any(xs <= 0):
        raise ValueError(f"power-law fit needs positive data in column {column!r}")
    res = stats.linregress(np.log(xs), np.log(ys))
    return PowerLawFit(float(res.slope), float(res.intercept), float(res.stderr), len(pts))
