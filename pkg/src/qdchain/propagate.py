"""Deterministic time evolution of a state vector under a sector Hamiltonian.

The default method is spectral: the Hamiltonian is time independent between
protocol events, so one eigendecomposition gives the state at any time to
diagonalization accuracy. An adaptive Runge-Kutta path is kept as a cross
check and as the automatic fallback when the eigenvector matrix of a
non-Hermitian Hamiltonian is ill conditioned.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.integrate import solve_ivp

from .hilbert import StateVector, occupation

# eigenvector condition number beyond which spectral results are not trusted
_SPECTRAL_COND_LIMIT = 1e8


class IntegrationError(RuntimeError):
    """Adaptive stepping failed (step-size underflow or solver breakdown)."""


@dataclass(frozen=True)
class EvolutionPlan:
    """Output sample times, method selection and stepping tolerance."""

    t_grid: np.ndarray
    method: str = "spectral"
    tol: float = 1e-10

    def __post_init__(self):
        grid = np.asarray(self.t_grid, dtype=float)
        if grid.ndim != 1 or grid.size == 0:
            raise ValueError("t_grid must be a non-empty 1d array")
        if grid.size > 1 and not np.all(np.diff(grid) > 0):
            raise ValueError("t_grid must be strictly increasing")
        if grid[0] < 0:
            raise ValueError("t_grid must start at tau >= 0")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.method not in ("spectral", "stepping"):
            raise ValueError(f"unknown method {self.method!r}")
        object.__setattr__(self, "t_grid", grid)


@dataclass
class EvolutionSamples:
    """State amplitudes sampled on a time grid (times[k] <-> amps[k])."""

    basis: object
    times: np.ndarray
    amps: np.ndarray  # (len(times), dim) complex

    def state_at(self, k):
        return StateVector(self.basis, self.amps[k].copy())

    def occupations(self):
        """Per-dot occupation at every sample time, shape (T, n)."""
        return np.array([occupation(self.state_at(k)) for k in range(len(self.times))])

    def norm2(self):
        return np.sum(np.abs(self.amps) ** 2, axis=1)

    def to_csv(self, path):
        """Columns: tau, dot_1 ... dot_n, norm2."""
        occ = self.occupations()
        n = occ.shape[1]
        header = "tau," + ",".join(f"dot_{j}" for j in range(1, n + 1)) + ",norm2"
        data = np.column_stack([self.times, occ, self.norm2()])
        np.savetxt(path, data, delimiter=",", header=header, comments="")


class SpectralPropagator:
    """Eigendecomposition-based propagator for a fixed Hamiltonian.

    For gamma = 0 the matrix is real symmetric and the decomposition is
    orthogonal; otherwise a general complex decomposition is used and
    `cond` reports the eigenvector conditioning.
    """

    def __init__(self, ham):
        a = ham.dense()
        if np.abs(a.imag).max(initial=0.0) == 0.0:
            w, v = np.linalg.eigh(a.real)
            self.evals = w.astype(complex)
            self.vecs = v
            self._vinv = v.T
            self.cond = 1.0
        else:
            w, v = scipy.linalg.eig(a)
            self.evals = w
            self.vecs = v
            self._vinv = np.linalg.inv(v)
            # 1-norm condition estimate; the inverse is already available
            self.cond = float(np.linalg.norm(v, 1) * np.linalg.norm(self._vinv, 1))

    @property
    def well_conditioned(self):
        return self.cond <= _SPECTRAL_COND_LIMIT

    def coefficients(self, amps):
        return self._vinv @ amps

    def state(self, coeffs, tau):
        """Amplitudes at time tau from eigenbasis coefficients at tau = 0."""
        return self.vecs @ (np.exp(-1j * self.evals * tau) * coeffs)

    def states(self, coeffs, taus):
        """Amplitudes at several times, shape (len(taus), dim)."""
        phases = np.exp(-1j * np.outer(np.asarray(taus), self.evals))
        return (phases * coeffs) @ self.vecs.T

    def norm2(self, coeffs, tau):
        psi = self.state(coeffs, tau)
        return float(np.vdot(psi, psi).real)


def _evolve_stepping(ham, psi0, t_grid, tol):
    mat = ham.matrix

    def rhs(_tau, y):
        return -1j * (mat @ y)

    t_end = float(t_grid[-1])
    if t_end == 0.0:
        return np.array([psi0.amps])
    sol = solve_ivp(
        rhs,
        (0.0, t_end),
        psi0.amps.astype(complex),
        t_eval=t_grid,
        method="DOP853",
        rtol=tol,
        atol=tol,
    )
    if not sol.success:
        reached = sol.t[-1] if sol.t.size else 0.0
        raise IntegrationError(f"adaptive stepping failed at tau = {reached:g}: {sol.message}")
    return sol.y.T


def evolve(ham, psi0, plan, check_norm=True):
    """Propagate psi0 under ham, sampling at plan.t_grid.

    Returns an :class:`EvolutionSamples`. With gamma = 0 the norm is
    conserved; with gamma > 0 it is non-increasing.
    """
    if psi0.basis != ham.basis:
        raise ValueError(
            f"state basis {psi0.basis.kind}/n={psi0.basis.n} does not match "
            f"Hamiltonian basis {ham.basis.kind}/n={ham.basis.n}"
        )
    if check_norm and abs(psi0.norm2() - 1.0) > 1e-12:
        raise ValueError(f"initial state is not normalized: |psi|^2 = {psi0.norm2()!r}")
    t_grid = plan.t_grid
    method = plan.method
    if method == "spectral":
        prop = SpectralPropagator(ham)
        if prop.well_conditioned:
            amps = prop.states(prop.coefficients(psi0.amps), t_grid)
        else:
            method = "stepping"
    if method == "stepping":
        amps = _evolve_stepping(ham, psi0, t_grid, plan.tol)
    return EvolutionSamples(ham.basis, np.asarray(t_grid, dtype=float), amps)


def survival_probability(samples):
    """Total squared norm at each sample time."""
    return samples.norm2()
