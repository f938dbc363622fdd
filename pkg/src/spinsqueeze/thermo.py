"""Entropy from tabulated energies by piecewise-linear interpolation, and squeezing/entropy maps.

The energy is interpolated linearly between grid temperatures, which gives the
specific heat at the interval midpoints. The specific heat is then interpolated
linearly between midpoints and ``c(T)/T`` is integrated in closed form. On a
segment ``c(T) = c_a + m (T - T_a)`` the integral over ``[t0, t1]`` is

    (c_a - m T_a) log(t1 / t0) + m (t1 - t0)

which is exact for constant and linear specific heats.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

log = logging.getLogger(__name__)

ANCHORS = ("zero-at-tmin", "value-at-tmax", "ln2-at-infinity")
META_KEYS = ("d", "L", "delta")


@dataclass(frozen=True)
class EnergyTable:
    T: np.ndarray
    e: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        T = np.asarray(self.T, dtype=float)
        e = np.asarray(self.e, dtype=float)
        if T.shape != e.shape or T.ndim != 1:
            raise ValueError("T and e must be 1-d arrays of equal length")
        if len(T) < 2:
            raise ValueError("an energy table needs at least 2 temperatures")
        if np.any(T <= 0):
            raise ValueError("temperatures must be positive")
        if np.any(np.diff(T) == 0):
            raise ValueError("duplicate temperatures in energy table")
        if np.any(np.diff(T) < 0):
            raise ValueError("temperatures must be strictly increasing")
        if np.any(np.diff(e) < -1e-12 * max(1.0, float(np.max(np.abs(e))))):
            log.warning("energy decreases with temperature somewhere; specific heat will be negative")
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "e", e)


@dataclass(frozen=True)
class EntropyCurve:
    T: np.ndarray       # grid temperatures
    s: np.ndarray       # entropy per spin at T
    T_mid: np.ndarray
    c_mid: np.ndarray
    anchor: dict
    meta: dict = field(default_factory=dict)

    def c_at_grid(self) -> np.ndarray:
        """Specific heat at the grid temperatures from the same piecewise-linear model."""
        return _c_model(self.T_mid, self.c_mid)(self.T)

    def __call__(self, T):
        return np.interp(T, self.T, self.s)


def specific_heat_midpoints(table: EnergyTable):
    """``(T_mid, c_mid)``: finite-difference specific heat at interval midpoints."""
    T, e = table.T, table.e
    T_mid = 0.5 * (T[1:] + T[:-1])
    c_mid = np.diff(e) / np.diff(T)
    if np.any(c_mid < -1e-9):
        log.warning("negative specific heat at %d midpoints", int(np.sum(c_mid < -1e-9)))
    return T_mid, c_mid


def _segment_integral(c_a, T_a, slope, t0, t1):
    return (c_a - slope * T_a) * np.log(t1 / t0) + slope * (t1 - t0)


def _c_model(T_mid, c_mid):
    slopes = np.diff(c_mid) / np.diff(T_mid)

    def c_of(T):
        T = np.asarray(T, dtype=float)
        seg = np.clip(np.searchsorted(T_mid, T) - 1, 0, len(slopes) - 1)
        return c_mid[seg] + slopes[seg] * (T - T_mid[seg])

    return c_of


def entropy_increments(T: np.ndarray, c_mid: np.ndarray, boundary: str = "linear") -> np.ndarray:
    """Entropy change ``s(T_{k+1}) - s(T_k)`` for every grid interval.

    Each interval splits at its midpoint. The lower half uses the specific-heat
    line through midpoints k-1/2 and k+1/2, the upper half the line through
    k+1/2 and k+3/2. At the two ends of the grid the missing neighbour is
    replaced by extending the nearest line (``boundary="linear"``) or by a
    constant continuation of the end midpoint (``boundary="constant"``).
    """
    T = np.asarray(T, dtype=float)
    c = np.asarray(c_mid, dtype=float)
    if len(c) != len(T) - 1:
        raise ValueError("need one specific-heat value per grid interval")
    if len(c) < 3:
        raise ValueError(f"entropy increments need at least 3 midpoints, got {len(c)}")
    if boundary not in ("linear", "constant"):
        raise ValueError(f"unknown boundary rule {boundary!r}")
    Tm = 0.5 * (T[1:] + T[:-1])
    slopes = np.diff(c) / np.diff(Tm)  # slope on [Tm_j, Tm_{j+1}]
    n = len(c)
    # lower half of interval k lies on segment k-1 (extend segment 0 for k = 0)
    lo_seg = np.arange(n) - 1
    hi_seg = np.arange(n)
    lo_slope = slopes[np.clip(lo_seg, 0, n - 2)]
    hi_slope = slopes[np.clip(hi_seg, 0, n - 2)]
    if boundary == "constant":
        lo_slope = np.where(lo_seg < 0, 0.0, lo_slope)
        hi_slope = np.where(hi_seg > n - 2, 0.0, hi_slope)
    # every line is anchored at the interval's own midpoint: c(Tm_k) = c_k
    ds_lo = _segment_integral(c, Tm, lo_slope, T[:-1], Tm)
    ds_hi = _segment_integral(c, Tm, hi_slope, Tm, T[1:])
    return ds_lo + ds_hi


def entropy_curve(table: EnergyTable, anchor: str = "zero-at-tmin", anchor_value: float = 0.0,
                  boundary: str = "linear", gap: float | None = None) -> EntropyCurve:
    """Cumulative entropy per spin on the table's grid.

    ``zero-at-tmin`` sets ``s(T_min) = anchor_value`` (default 0);
    ``value-at-tmax`` sets ``s(T_max) = anchor_value``. ``ln2-at-infinity``
    cannot be honoured from a finite grid and is refused.
    """
    if anchor not in ANCHORS:
        raise ValueError(f"anchor must be one of {ANCHORS}, got {anchor!r}")
    if anchor == "ln2-at-infinity":
        log.warning("ln2-at-infinity anchoring is not supported on a finite grid")
        raise ValueError("anchor 'ln2-at-infinity' is unsupported; use value-at-tmax with ln 2")
    T_mid, c_mid = specific_heat_midpoints(table)
    ds = entropy_increments(table.T, c_mid, boundary)
    s = np.concatenate([[0.0], np.cumsum(ds)])
    if anchor == "zero-at-tmin":
        if gap is not None and not gap > 5.0 * table.T[0]:
            log.warning("T_min=%g is not well below the gap %g; zero-at-tmin anchoring is biased",
                        table.T[0], gap)
        s = s + anchor_value
        at = float(table.T[0])
    else:
        s = s - s[-1] + anchor_value
        at = float(table.T[-1])
    info = {"rule": anchor, "temperature": at, "value": float(anchor_value), "boundary": boundary}
    return EntropyCurve(table.T, s, T_mid, c_mid, info, dict(table.meta))


def _meta_signature(meta: dict):
    return tuple((k, meta.get(k)) for k in META_KEYS)


def join_squeezing_entropy(squeezing_rows, curves: dict, meta: dict | None = None):
    """Attach entropy to (omega, T, xi2) rows via the entropy curve of each field.

    ``curves`` maps omega to an :class:`EntropyCurve`. Rows whose temperature
    falls outside their curve's grid are not extrapolated; the field is
    reported in the returned ``problems`` list instead.

    Returns ``(rows, problems)`` with rows sorted by (omega, T).
    """
    if meta is not None:
        want = _meta_signature(meta)
        for w, curve in curves.items():
            if curve.meta and _meta_signature(curve.meta) != want:
                raise ValueError(f"metadata mismatch for omega={w}: {curve.meta} vs {meta}")
    out, problems = [], []
    by_omega: dict[float, list] = {}
    for row in squeezing_rows:
        by_omega.setdefault(float(row["omega"]), []).append(row)
    for w in sorted(by_omega):
        curve = curves.get(w)
        if curve is None:
            problems.append({"omega": w, "problem": "no entropy curve for this field"})
            continue
        lo, hi = curve.T[0], curve.T[-1]
        outside = 0
        for row in sorted(by_omega[w], key=lambda r: r["T"]):
            T = float(row["T"])
            if not lo * (1 - 1e-12) <= T <= hi * (1 + 1e-12):
                outside += 1
                continue
            out.append({"omega": w, "T": T, "s": float(curve(T)), "xi2": float(row["xi2"])})
        if outside:
            problems.append({"omega": w, "problem": f"{outside} temperatures outside [{lo}, {hi}]"})
    return out, problems
