"""Time-dependent linear spin-wave theory along a smooth field ramp.

The Gaussian boson state is tracked through ``G_k = <b_k^dag b_k>`` and
``F_k = <b_k b_-k>``; the Heisenberg equations of the quadratic Hamiltonian give

    dG_k/dt = -2 B_k Im F_k
    dF_k/dt = -i [2 A_k(t) F_k + B_k (1 + G_k + G_-k)]

for every k including k = 0. ``literal_k0=True`` multiplies both right-hand
sides at k = 0 by 2, the variant written with a ``(1 + delta_k0)`` factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .lattice import negated_index
from .model import ModelSpec, PhysicalityError, SpinObservables
from .spinwave import build_modes, mode_coefficients


def smooth_step(x):
    """Ramp profile F(x) on [0, 1]: 0 -> 1, flat to all orders at both ends."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0) + 0.0  # + 0.0 turns -0.0 into 0.0
    out = np.empty_like(x)
    lo = x < 0.5
    with np.errstate(divide="ignore", over="ignore"):
        out[lo] = 0.5 * np.exp(2.0 - 1.0 / x[lo])
        out[~lo] = 1.0 - 0.5 * np.exp(2.0 - 1.0 / (1.0 - x[~lo]))
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class RampSchedule:
    omega_i: float
    omega_f: float
    tau: float
    hold: float = 0.0

    def __post_init__(self):
        if not self.omega_i > self.omega_f > 0:
            raise ValueError(f"need omega_i > omega_f > 0, got {self.omega_i}, {self.omega_f}")
        if not self.tau > 0:
            raise ValueError(f"ramp duration must be positive, got {self.tau}")
        if self.hold < 0:
            raise ValueError("hold time must be non-negative")

    @property
    def duration(self) -> float:
        return self.tau + self.hold

    def __call__(self, t):
        return schedule_value(self, t)


@dataclass(frozen=True)
class ConstantField:
    """Hold the field fixed for ``duration``; used for stationarity checks."""

    omega: float
    duration: float

    @property
    def omega_i(self) -> float:
        return self.omega

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        val = np.full_like(t, self.omega)
        return val if np.ndim(val) else float(val)


def schedule_value(ramp: RampSchedule, t):
    t = np.asarray(t, dtype=float)
    f = smooth_step(t / ramp.tau)
    val = (1.0 - f) * ramp.omega_i + f * ramp.omega_f  # exact at both ends
    return val if np.ndim(val) else float(val)


@dataclass
class ModePairState:
    G: np.ndarray  # real occupations
    F: np.ndarray  # complex anomalous amplitudes

    def copy(self):
        return ModePairState(self.G.copy(), self.F.copy())

    def physicality_excess(self) -> float:
        """Largest ``|F|^2 - G(G+1)``; zero or negative for a physical Gaussian state."""
        return float(np.max(np.abs(self.F) ** 2 - self.G * (self.G + 1.0)))


def ground_state_pairs(model: ModelSpec) -> ModePairState:
    modes = build_modes(model)
    return ModePairState(modes.v**2, (-modes.u * modes.v).astype(complex))


def pair_observables(state: ModePairState, n_sites: int) -> SpinObservables:
    jx = 0.5 * n_sites - float(np.sum(state.G))
    G0, F0 = state.G[0], state.F[0]
    var_jz = 0.25 * n_sites * (1.0 + 2.0 * G0 - 2.0 * F0.real)
    var_jy = 0.25 * n_sites * (1.0 + 2.0 * G0 + 2.0 * F0.real)
    return SpinObservables(n_sites=n_sites, jx=jx, var_jz=float(var_jz), var_jy=float(var_jy),
                           fq=float(4.0 * var_jy / n_sites))


def _rhs(G, F, A, B, neg, k0_factor):
    dG = -2.0 * B * F.imag
    dF = -1j * (2.0 * A * F + B * (1.0 + G + G[neg]))
    if k0_factor != 1.0:
        dG[0] *= k0_factor
        dF[0] *= k0_factor
    return dG, dF


def integrate_step(state: ModePairState, A_of_t, B, dt, t=0.0, neg=None,
                   literal_k0=False) -> ModePairState:
    """One classical fourth-order Runge-Kutta step of the pair equations.

    ``A_of_t`` is either a callable ``t -> A_k`` or a fixed array.
    ``neg[k]`` indexes ``-k``; identity when omitted (valid for G symmetric in k).
    """
    if neg is None:
        neg = np.arange(len(B))
    A_at = A_of_t if callable(A_of_t) else (lambda _t: A_of_t)
    fac = 2.0 if literal_k0 else 1.0
    G, F = state.G, state.F
    h = 0.5 * dt
    A0, Ah, A1 = A_at(t), A_at(t + h), A_at(t + dt)
    g1, f1 = _rhs(G, F, A0, B, neg, fac)
    g2, f2 = _rhs(G + h * g1, F + h * f1, Ah, B, neg, fac)
    g3, f3 = _rhs(G + h * g2, F + h * f2, Ah, B, neg, fac)
    g4, f4 = _rhs(G + dt * g3, F + dt * f3, A1, B, neg, fac)
    G_new = G + dt / 6.0 * (g1 + 2 * g2 + 2 * g3 + g4)
    F_new = F + dt / 6.0 * (f1 + 2 * f2 + 2 * f3 + f4)
    if not (np.all(np.isfinite(G_new)) and np.all(np.isfinite(F_new))):
        raise FloatingPointError("pair amplitudes overflowed")
    return ModePairState(G_new, F_new)


@dataclass
class Trace:
    """Sampled time series of a ramp; ``final`` holds the observables at the last step."""

    t: np.ndarray
    omega: np.ndarray
    observables: list
    final: SpinObservables
    extra: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(o, name) for o in self.observables])

    def rows(self, method: str = "tlsw") -> list[dict]:
        return [{"method": method, "t": float(t), "omega": float(w), "jx_per_spin": o.jx_per_spin,
                 "var_jz": o.var_jz, "xi2": o.xi2}
                for t, w, o in zip(self.t, self.omega, self.observables)]


def default_dt(model: ModelSpec, omega_max: float, safety: float = 0.1) -> float:
    _, _, A, _ = mode_coefficients(model, omega=omega_max)
    return safety / float(np.max(np.abs(A)))


def evolve(template: ModelSpec, ramp: RampSchedule | ConstantField, dt: float | None = None,
           stride: int = 1, literal_k0: bool = False, state: ModePairState | None = None,
           check_tol: float = 1e-6) -> Trace:
    """Integrate the pair equations from the ground state at ``omega_i`` through ``tau + hold``.

    The number of steps is ``ceil(duration / dt)``; dt is shrunk slightly so the
    last step lands exactly on the end time. Samples are taken every ``stride``
    steps, plus the first and last.
    """
    if dt is None:
        dt = default_dt(template, ramp.omega_i)
    n_steps = max(1, math.ceil(ramp.duration / dt - 1e-9))
    dt = ramp.duration / n_steps
    _, _, A_base, B = mode_coefficients(template, omega=0.0)
    if dt * float(np.max(np.abs(A_base + ramp.omega_i))) > 0.1 + 1e-12:
        raise ValueError("time step too coarse: need dt * max_k A_k <= 0.1")
    neg = negated_index(template.lattice)
    if state is None:
        state = ground_state_pairs(template.with_omega(ramp.omega_i))
    n = template.n_sites

    def A_of_t(t):
        return A_base + ramp(t)

    ts, ws, obs = [0.0], [ramp(0.0)], [pair_observables(state, n)]
    for step in range(1, n_steps + 1):
        t0 = (step - 1) * dt
        state = integrate_step(state, A_of_t, B, dt, t=t0, neg=neg, literal_k0=literal_k0)
        if step % stride == 0 or step == n_steps:
            excess = state.physicality_excess()
            if excess > check_tol:
                raise PhysicalityError(
                    f"|F|^2 exceeds G(G+1) by {excess:.3g} at t={step * dt:.4g}; reduce dt")
            ts.append(step * dt)
            ws.append(ramp(step * dt))
            obs.append(pair_observables(state, n))
    return Trace(np.array(ts), np.array(ws), obs, obs[-1], {"state": state, "dt": dt})
