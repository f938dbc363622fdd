"""Exact diagonalization of the XXZ model in the full 2^N computational basis.

Basis state ``s`` has spin i up (Sz = +1/2) when bit i of ``s`` is set; site
indices follow :mod:`spinsqueeze.lattice`. The field term breaks Jz
conservation, so no symmetry sectors are used.

The Hamiltonian is real and stoquastic. ``Jy = i K`` with ``K`` real
antisymmetric, which keeps every operator real in storage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator, eigsh

from .dynamics import Trace
from .lattice import bonds, site_coordinates
from .model import ConvergenceError, ModelSpec, NormDriftError, SpinObservables

MAX_SITES = 24
MAX_SPARSE_SITES = 20
MAX_DENSE_SITES = 12
MAX_EVOLVE_SITES = 16
RESIDUAL_TOL = 1e-8
SEED = 20211022


def _check_size(n, limit, what):
    if n > limit:
        raise ValueError(f"{what} supports at most {limit} spins, got N={n}")


def _flip_matrix(n_sites, masks, weights):
    """Sparse sum_m w_m |s ^ mask_m><s| over all basis states s."""
    dim = 1 << n_sites
    states = np.arange(dim, dtype=np.int64)
    rows, cols, vals = [], [], []
    for mask, w in zip(masks, weights):
        w = np.broadcast_to(np.asarray(w, dtype=float), (dim,))
        keep = w != 0
        rows.append((states ^ mask)[keep])
        cols.append(states[keep])
        vals.append(w[keep])
    if not rows:
        return sp.csr_matrix((dim, dim))
    return sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                         shape=(dim, dim))


def _bit(states, i):
    return (states >> i) & 1


class SpinOperators:
    """Collective spin operators on N sites (sparse; Jz stored as its diagonal)."""

    def __init__(self, n_sites: int):
        _check_size(n_sites, MAX_SPARSE_SITES, "sparse operators")
        self.n_sites = n_sites
        states = np.arange(1 << n_sites, dtype=np.int64)
        ups = sum(_bit(states, i) for i in range(n_sites))
        self.jz = (ups - 0.5 * n_sites).astype(float)
        masks = [1 << i for i in range(n_sites)]
        self.jx = _flip_matrix(n_sites, masks, [0.5] * n_sites)
        # <s^m|Sy_i|s> = +i/2 if spin i of s is up, -i/2 if down
        self.k = _flip_matrix(n_sites, masks, [np.where(_bit(states, i), 0.5, -0.5)
                                               for i in range(n_sites)])

    def apply_jy(self, psi):
        return 1j * (self.k @ psi)


def _interaction_terms(model: ModelSpec, coupling: float):
    """Diagonal and off-diagonal pieces of -J sum_<ij>(SxSx + SySy - delta SzSz).

    ``coupling`` multiplies the XY part only; the Ising part always uses the model's J.
    """
    n = model.n_sites
    states = np.arange(1 << n, dtype=np.int64)
    diag = np.zeros(1 << n)
    masks, weights = [], []
    for i, j in bonds(model.lattice):
        bi, bj = _bit(states, i), _bit(states, j)
        diag += model.coupling * model.delta * 0.25 * np.where(bi == bj, 1.0, -1.0)
        masks.append((1 << int(i)) | (1 << int(j)))
        weights.append(np.where(bi != bj, -0.5 * coupling, 0.0))
    return diag, masks, weights


def build_hamiltonian(model: ModelSpec, staggered: bool = False, matrix_free: bool = False):
    """Sparse (CSR) Hamiltonian, or a LinearOperator when ``matrix_free``.

    ``staggered=True`` applies a pi rotation about z to one sublattice of a
    bipartite lattice (all extents even): the XY coupling becomes ``-J``, the
    Ising term is unchanged and the field picks up the sign
    ``(-1)^(sum of coordinates)``. The spectrum is unchanged.
    """
    n = model.n_sites
    _check_size(n, MAX_SITES, "exact diagonalization")
    coupling = -model.coupling if staggered else model.coupling
    if staggered:
        eps = np.where(site_coordinates(model.lattice).sum(axis=1) % 2 == 0, 1.0, -1.0)
    else:
        eps = np.ones(n)
    if matrix_free or n > MAX_SPARSE_SITES:
        return _matrix_free(model, coupling, eps)
    diag, masks, weights = _interaction_terms(model, coupling)
    masks += [1 << i for i in range(n)]
    weights += [-0.5 * model.omega * e for e in eps]
    return (_flip_matrix(n, masks, weights) + sp.diags(diag)).tocsr()


def _matrix_free(model, coupling, eps):
    n = model.n_sites
    dim = 1 << n
    diag, masks, weights = _interaction_terms(model, coupling)
    field = [(1 << i, -0.5 * model.omega * e) for i, e in enumerate(eps)]
    states = np.arange(dim, dtype=np.int64)

    def matvec(x):
        x = np.asarray(x).reshape(-1)
        y = diag * x
        for mask, w in zip(masks, weights):
            # (H x)[s ^ m] += w[s] x[s]  <=>  y[s] += w[s ^ m] x[s ^ m]
            idx = states ^ mask
            y += w[idx] * x[idx]
        for mask, w in field:
            y += w * x[states ^ mask]
        return y

    return LinearOperator((dim, dim), matvec=matvec, rmatvec=matvec, dtype=float)


@dataclass
class GroundState:
    energies: np.ndarray  # lowest eigenvalues, ascending
    state: np.ndarray     # normalized ground-state vector
    residuals: np.ndarray

    @property
    def e0(self) -> float:
        return float(self.energies[0])

    @property
    def e1(self) -> float:
        return float(self.energies[1])

    @property
    def gap(self) -> float:
        return self.e1 - self.e0


def _fix_phase(vec):
    i = int(np.argmax(np.abs(vec)))
    phase = vec[i] / abs(vec[i])
    return vec / phase


def ground_and_gap(model: ModelSpec, n_levels: int = 2, dense: bool | None = None) -> GroundState:
    """Lowest ``n_levels`` eigenpairs (Lanczos, or dense ``eigh`` for small N)."""
    n = model.n_sites
    _check_size(n, MAX_SITES, "exact diagonalization")
    dim = 1 << n
    if dense is None:
        dense = dim <= 256
    if dense:
        _check_size(n, MAX_DENSE_SITES, "dense diagonalization")
        H = build_hamiltonian(model)
        E, V = np.linalg.eigh(H.toarray())
        E, V = E[:n_levels], V[:, :n_levels]
    else:
        H = build_hamiltonian(model)
        v0 = np.random.default_rng(SEED).standard_normal(dim)
        try:
            E, V = eigsh(H, k=n_levels, which="SA", v0=v0, tol=1e-12, maxiter=50 * dim)
        except Exception as exc:  # ArpackNoConvergence carries partial results
            raise ConvergenceError(f"Lanczos did not converge for N={n}: {exc}") from exc
        order = np.argsort(E)
        E, V = E[order], V[:, order]
    res = np.array([np.linalg.norm(H @ V[:, i] - E[i] * V[:, i]) for i in range(len(E))])
    if np.any(res > RESIDUAL_TOL * max(1.0, np.max(np.abs(E)))):
        raise ConvergenceError(f"eigenpair residuals {res} exceed {RESIDUAL_TOL}")
    return GroundState(E, _fix_phase(V[:, 0]), res)


def state_observables(psi, model: ModelSpec, ops: SpinOperators | None = None,
                      gap: float = math.nan) -> SpinObservables:
    """Collective-spin moments of a pure state; ``fq`` is the pure-state QFI 4 Var(Jy)/N."""
    ops = ops or SpinOperators(model.n_sites)
    psi = np.asarray(psi)
    norm2 = float(np.vdot(psi, psi).real)
    jx_psi = ops.jx @ psi
    jy_psi = ops.apply_jy(psi)
    jz_psi = ops.jz * psi
    mx = np.vdot(psi, jx_psi).real / norm2
    my = np.vdot(psi, jy_psi).real / norm2
    mz = np.vdot(psi, jz_psi).real / norm2
    var_x = np.vdot(jx_psi, jx_psi).real / norm2 - mx**2
    var_y = np.vdot(jy_psi, jy_psi).real / norm2 - my**2
    var_z = np.vdot(jz_psi, jz_psi).real / norm2 - mz**2
    cov = np.vdot(jy_psi, jz_psi).real / norm2 - my * mz
    n = model.n_sites
    return SpinObservables(n_sites=n, jx=float(mx), var_jz=float(max(var_z, 0.0)),
                           var_jy=float(max(var_y, 0.0)), cov_yz=float(cov),
                           var_jx=float(max(var_x, 0.0)), fq=float(4.0 * var_y / n), gap=gap)


def ground_observables(model: ModelSpec, ops: SpinOperators | None = None) -> SpinObservables:
    gs = ground_and_gap(model)
    return state_observables(gs.state, model, ops, gap=gs.gap)


class ThermalSolver:
    """Full-spectrum thermodynamics of one model (N <= 12).

    The spectrum and the matrix ``|<m|Jy|n>|^2`` are computed once and reused
    for every temperature.
    """

    def __init__(self, model: ModelSpec):
        _check_size(model.n_sites, MAX_DENSE_SITES, "thermal (full-spectrum) mode")
        self.model = model
        ops = SpinOperators(model.n_sites)
        H = build_hamiltonian(model).toarray()
        self.energies, V = np.linalg.eigh(H)
        del H
        jx_v = ops.jx @ V
        self._jx_n = np.einsum("sn,sn->n", V, jx_v)
        self._jx2_n = np.einsum("sn,sn->n", jx_v, jx_v)
        del jx_v
        jz_v = ops.jz[:, None] * V
        self._jz_n = np.einsum("sn,sn->n", V, jz_v)
        self._jz2_n = np.einsum("sn,sn->n", jz_v, jz_v)
        del jz_v
        k_v = ops.k @ V
        self._jy2_n = np.einsum("sn,sn->n", k_v, k_v)
        kmat = V.T @ k_v  # <m|Jy|n> = i kmat[m, n]
        del k_v, V
        self._jy_elem2 = kmat**2
        self._jy_n = np.zeros_like(self.energies)  # diagonal of an antisymmetric matrix

    @cached_property
    def ground_gap(self) -> float:
        return float(self.energies[1] - self.energies[0])

    def weights(self, T: float) -> np.ndarray:
        E = self.energies
        if T <= 0:
            ground = np.isclose(E, E[0], rtol=0, atol=1e-10 * max(1.0, abs(E[0])))
            return ground / ground.sum()
        w = np.exp(-(E - E[0]) / T)
        return w / w.sum()

    def qfi_density(self, p: np.ndarray, cutoff: float = 1e-18) -> float:
        """(2/N) sum_nm (p_n - p_m)^2/(p_n + p_m) |<m|Jy|n>|^2."""
        live = np.flatnonzero(p > cutoff * p.max())
        dead = np.setdiff1d(np.arange(len(p)), live)
        pl = p[live]
        num = (pl[:, None] - pl[None, :]) ** 2
        den = pl[:, None] + pl[None, :]
        inner = np.sum(num / den * self._jy_elem2[np.ix_(live, live)])
        # (p_n - 0)^2 / p_n = p_n for every live-dead pair, counted twice
        cross = 2.0 * np.sum(pl[:, None] * self._jy_elem2[np.ix_(live, dead)])
        return float(2.0 * (inner + cross) / self.model.n_sites)

    def at(self, T: float):
        """``(SpinObservables, energy per spin, entropy per spin)`` at temperature T."""
        p = self.weights(T)
        n = self.model.n_sites
        mx, my, mz = p @ self._jx_n, p @ self._jy_n, p @ self._jz_n
        var_x = p @ self._jx2_n - mx**2
        var_y = p @ self._jy2_n - my**2
        var_z = p @ self._jz2_n - mz**2
        obs = SpinObservables(n_sites=n, jx=float(mx), var_jz=float(var_z), var_jy=float(var_y),
                              cov_yz=0.0, var_jx=float(var_x), fq=self.qfi_density(p),
                              gap=self.ground_gap)
        e = float(p @ self.energies) / n
        nz = p[p > 0]
        s = float(-np.sum(nz * np.log(nz))) / n
        return obs, e, s


def thermal_observables(model: ModelSpec, T: float):
    return ThermalSolver(model).at(T)


def evolve_ramp(template: ModelSpec, ramp, dt: float, stride: int = 1,
                norm_tol: float = 1e-8) -> Trace:
    """Fourth-order Runge-Kutta Schroedinger evolution from the ground state at ``omega_i``.

    The mean-field energy ``-N omega(t)/2`` is subtracted from H at every
    instant; this only changes a global phase but keeps the propagated
    frequencies small, which is what holds the norm to ``norm_tol``.
    """
    n = template.n_sites
    _check_size(n, MAX_EVOLVE_SITES, "time evolution")
    ops = SpinOperators(n)
    h_int = build_hamiltonian(template.with_omega(0.0))
    psi = ground_and_gap(template.with_omega(ramp.omega_i)).state.astype(complex)

    def rhs(t, x):
        w = ramp(t)
        return -1j * (h_int @ x - w * (ops.jx @ x) + 0.5 * n * w * x)

    n_steps = max(1, math.ceil(ramp.duration / dt - 1e-9))
    dt = ramp.duration / n_steps
    ts, ws, obs = [0.0], [ramp(0.0)], [state_observables(psi, template, ops)]
    for step in range(1, n_steps + 1):
        t = (step - 1) * dt
        k1 = rhs(t, psi)
        k2 = rhs(t + 0.5 * dt, psi + 0.5 * dt * k1)
        k3 = rhs(t + 0.5 * dt, psi + 0.5 * dt * k2)
        k4 = rhs(t + dt, psi + dt * k3)
        psi = psi + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if step % stride == 0 or step == n_steps:
            drift = abs(np.linalg.norm(psi) - 1.0)
            if drift > norm_tol:
                raise NormDriftError(f"norm drifted by {drift:.3g} at t={step * dt:.4g}; reduce dt")
            ts.append(step * dt)
            ws.append(ramp(step * dt))
            obs.append(state_observables(psi, template, ops))
    return Trace(np.array(ts), np.array(ws), obs, obs[-1], {"state": psi, "dt": dt})
