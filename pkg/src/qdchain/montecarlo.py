"""Quantum-jump trajectory engine and its density-operator validation oracle.

A trajectory propagates the state under the effective Hamiltonian, whose
decay term makes the squared norm decrease monotonically. A jump fires when
the squared norm reaches a uniform random number r: the electron on the last
dot is removed, the state is renormalized, the sector drops by one electron
and a fresh r is drawn. The run ends at the vacuum or at tau_end.

Every trajectory owns a counter-based random stream keyed by (master seed,
trajectory index), so parallel and serial runs produce bit-identical
ensembles.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .hamiltonian import build_sector
from .hilbert import SectorBasis, Spin, StateVector, index_2e, occupation
from .model import sample_disorder
from .propagate import SpectralPropagator

# time resolution (units of 1/t0) to which a norm crossing is localized
JUMP_TIME_TOL = 1e-6

# reserved stream index for an ensemble-shared disorder draw
_SHARED_DRAW_INDEX = 2**64 - 1


@dataclass(frozen=True)
class InitialState:
    """Basis-state descriptor: which dots are occupied at tau = 0."""

    sector: str  # "1e" | "2e"
    dots: tuple[int, ...]
    spins: tuple[Spin, ...] = (Spin.UP, Spin.DOWN)

    def __post_init__(self):
        if self.sector == "1e":
            if len(self.dots) != 1:
                raise ValueError("1e initial state needs exactly one dot")
        elif self.sector == "2e":
            if len(self.dots) != 2 or not self.dots[0] < self.dots[1]:
                raise ValueError("2e initial state needs an ordered dot pair i < j")
        else:
            raise ValueError(f"unknown sector {self.sector!r}")

    def to_state(self, n):
        if self.sector == "1e":
            basis = SectorBasis.one_electron(n, self.spins[0])
            return StateVector.basis_state(basis, self.dots[0])
        basis = SectorBasis.two_electron(n, self.spins[:2])
        return StateVector.basis_state(basis, self.dots)


@dataclass
class TrajectoryRecord:
    """Outcome of one stochastic trajectory."""

    seed: tuple[int, int]  # (master seed, trajectory index)
    jump_times: list[float]
    disorder_draw: object  # the ChainParams actually used
    samples: np.ndarray | None = None  # per-dot occupations on the sample grid


@dataclass
class DetectorSignal:
    """Ensemble click rate per unit time per trajectory, with standard errors."""

    bin_edges: np.ndarray
    signal: np.ndarray
    stderr: np.ndarray
    n_trajectories: int

    @property
    def bin_centers(self):
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])

    def to_csv(self, path):
        data = np.column_stack([self.bin_centers, self.signal, self.stderr])
        np.savetxt(path, data, delimiter=",", header="tau_mid,signal,stderr", comments="")


def trajectory_rng(seed, index):
    """Counter-based random stream for one trajectory."""
    key = np.array([seed % 2**64, index % 2**64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def project_jump(state):
    """Remove the electron on the last dot and renormalize.

    A 2e state collapses onto the surviving electron's 1e amplitudes
    A_i = B_{i,n}; the survivor keeps the spin tag of the left slot. A 1e
    state collapses to the vacuum (returned as None).
    """
    n = state.basis.n
    if state.basis.kind == "1e":
        return None
    amps = np.zeros(n, dtype=complex)
    for i in range(1, n):
        amps[i - 1] = state.amps[index_2e(i, n, n)]
    norm = np.linalg.norm(amps)
    if norm == 0.0:
        raise ValueError("jump fired with no amplitude on the last dot")
    basis = SectorBasis.one_electron(n, state.basis.spins[0])
    return StateVector(basis, amps / norm)


def _bisect_crossing(norm_of, t_lo, t_hi, r):
    """Locate norm_of(t) = r on [t_lo, t_hi] where norm_of is non-increasing."""
    while t_hi - t_lo > JUMP_TIME_TOL:
        mid = 0.5 * (t_lo + t_hi)
        if norm_of(mid) > r:
            t_lo = mid
        else:
            t_hi = mid
    return 0.5 * (t_lo + t_hi)


def run_trajectory(params, disorder, initial, seed, tau_end, t_grid=None, index=0,
                   fixed_draw=None):
    """Run one quantum-jump trajectory and return its record.

    If *disorder* is given, a fresh static realization is drawn from the
    trajectory's own stream (pass *fixed_draw* to reuse one realization
    across an ensemble). With gamma = 0 the record simply has no jumps.
    If *t_grid* is given, normalized per-dot occupations are sampled there
    (zeros once the system has emptied).
    """
    rng = trajectory_rng(seed, index)
    if fixed_draw is not None:
        draw = fixed_draw
    elif disorder is not None:
        draw = sample_disorder(params, disorder, rng)
    else:
        draw = params
    state = initial.to_state(params.n)
    jump_times = []
    samples = np.zeros((len(t_grid), params.n)) if t_grid is not None else None

    tau = 0.0
    while state is not None and tau < tau_end:
        ham = build_sector(draw, state.basis.kind, state.basis.spins)
        prop = SpectralPropagator(ham)
        coeffs = prop.coefficients(state.amps)
        seg_norm2 = lambda t: prop.norm2(coeffs, t - tau)  # noqa: E731

        if params.gamma > 0:
            r = rng.uniform()
            jumped = seg_norm2(tau_end) < r
            seg_end = _bisect_crossing(seg_norm2, tau, tau_end, r) if jumped else tau_end
        else:
            jumped = False
            seg_end = tau_end

        if samples is not None:
            in_seg = (t_grid >= tau) & (t_grid < seg_end) if jumped else (t_grid >= tau)
            for k in np.nonzero(in_seg)[0]:
                psi = StateVector(ham.basis, prop.state(coeffs, t_grid[k] - tau))
                n2 = psi.norm2()
                if n2 > 0:
                    samples[k] = occupation(psi) / n2

        if not jumped:
            break
        jump_times.append(seg_end)
        pre_jump = StateVector(ham.basis, prop.state(coeffs, seg_end - tau))
        state = project_jump(pre_jump)
        tau = seg_end

    return TrajectoryRecord((seed, index), jump_times, draw, samples)


def _run_chunk(args):
    params, disorder, initial, seed, tau_end, t_grid, lo, hi, fixed_draw = args
    return [
        run_trajectory(params, disorder, initial, seed, tau_end, t_grid, index=k,
                       fixed_draw=fixed_draw)
        for k in range(lo, hi)
    ]


def run_ensemble(params, disorder, initial, n_trajectories, tau_end, seed,
                 t_grid=None, threads=1, redraw_disorder=True):
    """Run an ensemble of independent trajectories, in index order.

    The result is bit-identical for any thread count: trajectory k depends
    only on (seed, k). With redraw_disorder=False a single realization is
    drawn from a reserved stream and shared by the whole ensemble.
    """
    if n_trajectories < 1:
        raise ValueError("need at least one trajectory")
    fixed_draw = None
    if disorder is not None and not redraw_disorder:
        fixed_draw = sample_disorder(
            params, disorder, trajectory_rng(seed, _SHARED_DRAW_INDEX)
        )
    if threads <= 1:
        return _run_chunk(
            (params, disorder, initial, seed, tau_end, t_grid, 0, n_trajectories, fixed_draw)
        )
    bounds = np.linspace(0, n_trajectories, threads + 1).astype(int)
    chunks = [
        (params, disorder, initial, seed, tau_end, t_grid, lo, hi, fixed_draw)
        for lo, hi in zip(bounds[:-1], bounds[1:])
        if hi > lo
    ]
    records = []
    with ProcessPoolExecutor(max_workers=threads) as pool:
        for part in pool.map(_run_chunk, chunks):
            records.extend(part)
    return records


def detector_signal(records, bin_edges):
    """Histogram all jump times into clicks per unit time per trajectory.

    The standard error per bin comes from the sample variance of the
    per-trajectory bin counts.
    """
    if not records:
        raise ValueError("detector_signal needs at least one trajectory record")
    bin_edges = np.asarray(bin_edges, dtype=float)
    widths = np.diff(bin_edges)
    n = len(records)
    count_sum = np.zeros(len(widths))
    count_sq = np.zeros(len(widths))
    for rec in records:
        c, _ = np.histogram(rec.jump_times, bin_edges)
        count_sum += c
        count_sq += c.astype(float) ** 2
    mean = count_sum / n
    if n > 1:
        var = np.maximum(count_sq - n * mean**2, 0.0) / (n - 1)
    else:
        var = np.zeros_like(mean)
    return DetectorSignal(bin_edges, mean / widths, np.sqrt(var / n) / widths, n)


def average_occupations(records):
    """Ensemble mean of the sampled occupation snapshots."""
    samples = [rec.samples for rec in records if rec.samples is not None]
    if not samples:
        raise ValueError("records carry no occupation samples")
    return np.mean(samples, axis=0)


@dataclass
class OracleResult:
    times: np.ndarray
    populations: np.ndarray  # (T, n) diagonal of the density matrix
    flux: np.ndarray  # gamma * rho_nn per time
    leaked: np.ndarray  # probability already delivered to the detector


def master_equation_oracle(params, initial, t_grid, rtol=1e-10, atol=1e-12):
    """Exact ensemble populations of the 1e sector via direct rho integration.

    Integrates d rho / d tau = -i [H, rho] - (gamma/2) {P_n, rho} together
    with the leaked probability (the vacuum feed gamma * rho_nn), using an
    independent dense Runge-Kutta route. Limited to n <= 32.

    *initial* is a normalized 1e StateVector.
    """
    n = params.n
    if n > 32:
        raise ValueError(f"density-matrix oracle is limited to n <= 32, got {n}")
    if initial.basis.kind != "1e":
        raise ValueError("oracle handles the 1e sector only")
    ham = build_sector(params, "1e", initial.basis.spins)
    h = ham.dense()
    h_coh = h.copy()
    h_coh[n - 1, n - 1] = h_coh[n - 1, n - 1].real  # strip the decay term
    gamma = params.gamma
    proj = np.zeros((n, n))
    proj[n - 1, n - 1] = 1.0

    def rhs(_tau, y):
        rho = y[:-1].reshape(n, n)
        drho = -1j * (h_coh @ rho - rho @ h_coh) - 0.5 * gamma * (proj @ rho + rho @ proj)
        dleak = gamma * rho[n - 1, n - 1].real
        return np.concatenate([drho.ravel(), [dleak]])

    rho0 = np.outer(initial.amps, initial.amps.conj()).astype(complex)
    y0 = np.concatenate([rho0.ravel(), [0.0]])
    t_grid = np.asarray(t_grid, dtype=float)
    sol = solve_ivp(rhs, (0.0, float(t_grid[-1])), y0, t_eval=t_grid,
                    method="DOP853", rtol=rtol, atol=atol)
    if not sol.success:
        raise RuntimeError(f"oracle integration failed: {sol.message}")
    rhos = sol.y[:-1].T.reshape(len(t_grid), n, n)
    pops = np.real(np.einsum("tii->ti", rhos))
    return OracleResult(t_grid, pops, gamma * pops[:, n - 1], np.real(sol.y[-1]))
