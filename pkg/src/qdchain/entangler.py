"""Three-step electron-pair entangling protocol on an even chain.

Step 1 transfers the two end electrons to an adjacent dot pair (L, R) in the
interior: the L-R bond is closed and each half-chain carries its own optimal
coupling profile, so after a quarter period pi/(2 t0) each electron sits at
its entangler dot. Step 2 applies a pulsed Heisenberg exchange between the
two trapped spins; the pulse t_e(tau) = t_e_max * sech((tau - peak)/delta_tau)
with rate J = 4 t_e^2 / u accumulates the rotation angle theta = integral of
J. Step 3 mirrors step 1 and returns the electrons to the chain ends.

With theta = pi/2 an opposite-spin input |1 up, n down> ends in the
maximally entangled combination (|up, down> + i |down, up>)/sqrt(2) across
the chain; theta = pi swaps the two spins (times i).

The orbital motion is frozen during the pulse (barriers high): step 2 acts
on the spin amplitudes only, with the pulse integrated in time so the
overlap traces rise smoothly through the exchange window.

Because the entangler bond stays closed during transport, one electron lives
on dots 1..L and the other on dots L+1..n for the entire run. The pair
amplitudes therefore form a (left dot) x (right dot) matrix evolving under
the two independent half-chain Hamiltonians, which is how the engine
propagates them; with v > 0 the single cross term on the pair (L, L+1)
couples the halves and a dense propagator over the cross block is used
instead.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg
from scipy.integrate import quad

from .hamiltonian import build_1e
from .hilbert import SectorBasis, StateVector, index_2e
from .model import ChainParams, optimal_couplings, sample_disorder
from .montecarlo import _bisect_crossing, trajectory_rng

# spin-pair sector order used throughout this module
SECTORS = ("uu", "ud", "du", "dd")

# exchange window half-width in units of delta_tau; sech^2 beyond this is < 3e-7
PULSE_PAD = 8.0


@dataclass(frozen=True)
class ExchangePulse:
    """Hyperbolic-secant tunneling pulse between the entangler dots."""

    t_e_max: float
    delta_tau: float
    u: float
    tau_peak: float = 0.0

    def __post_init__(self):
        if self.t_e_max < 0 or self.delta_tau <= 0 or self.u <= 0:
            raise ValueError("pulse needs t_e_max >= 0 and positive width and u")

    def coupling(self, tau):
        # sech via decaying exponentials; 1/cosh overflows far in the tails
        x = np.abs((np.asarray(tau, dtype=float) - self.tau_peak) / self.delta_tau)
        return self.t_e_max * 2.0 * np.exp(-x) / (1.0 + np.exp(-2.0 * x))

    def exchange_rate(self, tau):
        """Instantaneous Heisenberg rate J(tau) = 4 t_e(tau)^2 / u."""
        return 4.0 * self.coupling(tau) ** 2 / self.u

    def area_to(self, tau):
        """Angle accumulated from the far past up to *tau*."""
        scale = 4.0 * self.t_e_max**2 * self.delta_tau / self.u
        return scale * (math.tanh((tau - self.tau_peak) / self.delta_tau) + 1.0)

    def adiabaticity_warnings(self):
        """Advisory: both t_e_max and 1/delta_tau should sit well below u."""
        warnings = []
        if self.u < 10.0 * self.t_e_max:
            warnings.append(
                f"pulse amplitude t_e_max = {self.t_e_max:g} is not small against u = {self.u:g}"
            )
        if self.u < 10.0 / self.delta_tau:
            warnings.append(
                f"pulse bandwidth 1/delta_tau = {1.0 / self.delta_tau:g} is not small "
                f"against u = {self.u:g}"
            )
        return warnings


def pulse_area(pulse, method="exact"):
    """Total rotation angle theta = integral of J(tau) over the pulse.

    The sech envelope integrates in closed form to 8 t_e_max^2 delta_tau / u;
    method="quad" evaluates the same integral by adaptive quadrature (the
    route to use for non-sech envelopes).
    """
    if method == "exact":
        return 8.0 * pulse.t_e_max**2 * pulse.delta_tau / pulse.u
    if method == "quad":
        val, _err = quad(pulse.exchange_rate, -np.inf, np.inf, limit=200)
        return val
    raise ValueError(f"unknown method {method!r}")


def width_for_area(t_e_max, u, theta=math.pi / 2):
    """Pulse width delta_tau that makes the total angle equal *theta*."""
    if t_e_max <= 0 or u <= 0:
        raise ValueError("t_e_max and u must be positive")
    return theta * u / (8.0 * t_e_max**2)


def exchange_unitary(theta):
    """4x4 spin-pair rotation in the sector order (uu, ud, du, dd).

    Same-spin sectors pick up the phase e^{i theta/2}; the opposite-spin
    block rotates as cos(theta/2) I + i sin(theta/2) X. theta = pi/2 sends
    |ud> to (|ud> + i |du>)/sqrt(2); theta = pi sends it to i |du>. The
    global phase is a fixed convention, chosen so both endpoints hold
    exactly.
    """
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    phase = np.exp(0.5j * theta)
    u = np.zeros((4, 4), dtype=complex)
    u[0, 0] = phase
    u[3, 3] = phase
    u[1, 1] = u[2, 2] = c
    u[1, 2] = u[2, 1] = 1j * s
    return u


@dataclass(frozen=True)
class ProtocolSchedule:
    """Timeline of the three steps and the entangler location."""

    entangler_pair: tuple[int, int]  # (L, R), adjacent dots
    pulse: ExchangePulse
    step1_duration: float
    step3_duration: float

    def __post_init__(self):
        left, right = self.entangler_pair
        if right != left + 1:
            raise ValueError("entangler dots must be adjacent (R = L + 1)")
        if self.step1_duration <= 0 or self.step3_duration <= 0:
            raise ValueError("step durations must be positive")

    @property
    def pulse_window(self):
        return 2.0 * PULSE_PAD * self.pulse.delta_tau

    @property
    def tau_end(self):
        return self.step1_duration + self.pulse_window + self.step3_duration

    def positioned_pulse(self):
        """The pulse centered inside its window on the protocol time axis."""
        return replace(
            self.pulse, tau_peak=self.step1_duration + PULSE_PAD * self.pulse.delta_tau
        )


def entangler_couplings(n, left, t0=1.0):
    """Bond profile with a closed (L, L+1) bond and per-half optimal profiles."""
    if not (1 <= left < n):
        raise ValueError(f"entangler position {left} out of range for n={n}")
    couplings = np.zeros(n - 1)
    if left >= 2:
        couplings[: left - 1] = optimal_couplings(left, t0)
    right_len = n - left
    if right_len >= 2:
        couplings[left:] = optimal_couplings(right_len, t0)
    return list(couplings)


def entangler_chain(n, t0=1.0, eps0=0.0, v=0.0, u=100.0, gamma=0.0, left=None):
    """ChainParams for the protocol; the entangler defaults to the middle."""
    if n < 4 or n % 2:
        raise ValueError("protocol chain needs an even dot count n >= 4")
    if left is None:
        left = n // 2
    return ChainParams(
        n, (eps0,) * n, tuple(entangler_couplings(n, left, t0)), v=v, u=u, gamma=gamma
    )


def default_schedule(params, t_e_max, theta=math.pi / 2, t0=1.0, left=None):
    """Quarter-period transfers plus a pulse sized for the given angle."""
    if params.u is None:
        raise ValueError("the exchange pulse needs a finite on-site repulsion u")
    if left is None:
        left = params.n // 2
    pulse = ExchangePulse(t_e_max, width_for_area(t_e_max, params.u, theta), params.u)
    quarter = math.pi / (2.0 * t0)
    return ProtocolSchedule((left, left + 1), pulse, quarter, quarter)


@dataclass
class SpinPairState:
    """Spin-resolved two-electron state: one orbital vector per spin sector.

    Sector vectors are unnormalized; the physical state is the direct sum
    over sectors and its total squared norm is the survival probability.
    """

    basis: SectorBasis
    sectors: np.ndarray  # (4, dim) complex, ordered as SECTORS

    @classmethod
    def product(cls, n, spins, dots):
        basis = SectorBasis.two_electron(n)
        sectors = np.zeros((4, basis.dim), dtype=complex)
        label = "".join("u" if str(s).startswith("u") else "d" for s in spins)
        sectors[SECTORS.index(label), index_2e(dots[0], dots[1], n)] = 1.0
        return cls(basis, sectors)

    def norm2(self):
        return float(np.sum(np.abs(self.sectors) ** 2))

    def apply_spin(self, unitary):
        return SpinPairState(self.basis, unitary @ self.sectors)

    def sector_state(self, label):
        return StateVector(self.basis, self.sectors[SECTORS.index(label)].copy())


@dataclass
class ProtocolResult:
    """Averaged overlap traces and fidelity statistics of a protocol run."""

    times: np.ndarray | None
    overlaps: np.ndarray | None  # (T, 4): phi0..phi3 ensemble averages
    fidelities: np.ndarray  # per trajectory; 0 for trajectories that lost an electron
    n_jumped: int
    trap_warnings: list[str]
    final_state: SpinPairState | None = None  # single-trajectory runs only

    @property
    def fidelity_mean(self):
        """Jump-inclusive average (lost trajectories count as zero)."""
        return float(np.mean(self.fidelities))

    @property
    def fidelity_mean_surviving(self):
        """Average over trajectories that kept both electrons."""
        kept = self.fidelities[self.fidelities > 0.0]
        return float(np.mean(kept)) if kept.size else 0.0

    def to_csv(self, path):
        data = np.column_stack([self.times, self.overlaps])
        np.savetxt(path, data, delimiter=",", header="tau,phi0,phi1,phi2,phi3",
                   comments="")


class _SplitPropagator:
    """Cross-block evolution with independent halves (v = 0).

    The pair amplitudes form a matrix Psi[a, b] over (left dot a+1, right
    dot L+1+b); the halves evolve independently, so Psi(tau) is obtained
    from two one-electron eigendecompositions. Detection acts on the last
    dot of the right half.
    """

    def __init__(self, draw, left):
        m = draw.n - left
        lp = ChainParams(left, draw.eps[:left], draw.couplings[: left - 1])
        rp = ChainParams(m, draw.eps[left:], draw.couplings[left:], gamma=draw.gamma)
        wl, vl = np.linalg.eigh(build_1e(lp).dense().real)
        self.wl = wl
        self.vl = vl
        hr = build_1e(rp).dense()
        if draw.gamma == 0.0:
            wr, vr = np.linalg.eigh(hr.real)
            self.wr = wr.astype(complex)
            self.vr = vr.astype(complex)
            self._vrinv = self.vr.T
        else:
            wr, vr = scipy.linalg.eig(hr)
            self.wr = wr
            self.vr = vr
            self._vrinv = np.linalg.inv(vr)

    def coefficients(self, psi):
        return self.vl.T @ psi @ self._vrinv.T

    def state(self, coeffs, dt):
        pl = np.exp(-1j * self.wl * dt)
        pr = np.exp(-1j * self.wr * dt)
        return self.vl @ (pl[:, None] * coeffs * pr[None, :]) @ self.vr.T

    def states(self, coeffs, dts):
        return np.array([self.state(coeffs, dt) for dt in dts])


class _CrossBlockPropagator:
    """Dense propagator over the cross block, for v > 0.

    The interdot repulsion adds v on the single adjacent pair (L, L+1),
    which couples the two halves; everything else matches the split form.
    """

    def __init__(self, draw, left):
        m = draw.n - left
        self.shape = (left, m)
        lp = ChainParams(left, draw.eps[:left], draw.couplings[: left - 1])
        rp = ChainParams(m, draw.eps[left:], draw.couplings[left:], gamma=draw.gamma)
        h = np.kron(build_1e(lp).dense(), np.eye(m)) + np.kron(
            np.eye(left), build_1e(rp).dense()
        )
        h[(left - 1) * m, (left - 1) * m] += draw.v
        w, v = scipy.linalg.eig(h)
        self.w = w
        self.v = v
        self._vinv = np.linalg.inv(v)

    def coefficients(self, psi):
        return self._vinv @ psi.ravel()

    def state(self, coeffs, dt):
        flat = self.v @ (np.exp(-1j * self.w * dt) * coeffs)
        return flat.reshape(self.shape)

    def states(self, coeffs, dts):
        phases = np.exp(-1j * np.outer(dts, self.w))
        return ((phases * coeffs) @ self.v.T).reshape(len(dts), *self.shape)


def _spin_vector(spin):
    """(up, down) amplitude pair from a label or an explicit pair."""
    if isinstance(spin, str):
        return np.array([1.0, 0.0] if spin.startswith("u") else [0.0, 1.0], complex)
    vec = np.asarray(spin, dtype=complex)
    if vec.shape != (2,):
        raise ValueError("a spin is a label ('u'/'d') or an (up, down) amplitude pair")
    norm = np.linalg.norm(vec)
    if norm == 0:
        raise ValueError("spin amplitudes cannot both vanish")
    return vec / norm


def _initial_sector_coefficients(spins):
    """Sector coefficients of a product spin pair, in SECTORS order."""
    a, b = _spin_vector(spins[0]), _spin_vector(spins[1])
    return np.array([a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]])


def _protocol_targets(left, m):
    """Overlap targets phi0..phi3 as (sector, (row, col), weight) term lists."""
    ends = (0, m - 1)  # pair (1, n)
    mid = (left - 1, 0)  # pair (L, L+1)
    iud, idu = SECTORS.index("ud"), SECTORS.index("du")
    inv = 1.0 / math.sqrt(2.0)
    return [
        [(iud, ends, 1.0)],
        [(iud, mid, 1.0)],
        [(iud, mid, inv), (idu, mid, 1j * inv)],
        [(iud, ends, inv), (idu, ends, 1j * inv)],
    ]


def _overlaps(sectors, targets, norm2):
    out = np.zeros(len(targets))
    if norm2 <= 0.0:
        return out
    for k, terms in enumerate(targets):
        amp = sum(np.conj(w) * sectors[s][pos] for s, pos, w in terms)
        out[k] = abs(amp) ** 2 / norm2
    return out


def _sample_grid(schedule, dt):
    """Sample times covering the three steps, including the exact boundaries."""
    t1 = schedule.step1_duration
    t2 = t1 + schedule.pulse_window
    t3 = schedule.tau_end
    grid = np.concatenate([
        np.arange(0.0, t1, dt), [t1],
        np.arange(t1 + dt, t2, dt), [t2],
        np.arange(t2 + dt, t3, dt), [t3],
    ])
    return np.unique(grid)


def _run_protocol_trajectory(params, schedule, disorder, seed, index, spins,
                             t_grid, targets):
    """One trajectory: returns (trace or None, fidelity, jumped, poor_trapping,
    final cross-block sectors or None)."""
    rng = trajectory_rng(seed, index)
    draw = sample_disorder(params, disorder, rng) if disorder is not None else params
    left = schedule.entangler_pair[0]
    if draw.couplings[left - 1] != 0.0:
        # the barrier is held closed; coupling noise cannot reopen it
        couplings = list(draw.couplings)
        couplings[left - 1] = 0.0
        draw = replace(draw, couplings=tuple(couplings))

    n = params.n
    m = n - left
    if draw.v == 0.0:
        prop = _SplitPropagator(draw, left)
    else:
        prop = _CrossBlockPropagator(draw, left)
    pulse = schedule.positioned_pulse()
    theta_total = pulse_area(schedule.pulse)
    t1 = schedule.step1_duration
    t2 = t1 + schedule.pulse_window
    trace = np.zeros((len(t_grid), 4)) if t_grid is not None else None

    sectors = np.zeros((4, left, m), dtype=complex)
    sectors[:, 0, m - 1] = _initial_sector_coefficients(spins)

    def transport(sectors, t_from, t_to, r):
        """Evolve all sectors over [t_from, t_to]; returns (sectors, jumped).

        The jump threshold r is absolute: the total norm starts at 1 and
        only decreases during transport (it is frozen during the pulse), so
        one uniform draw covers the whole trajectory.
        """
        occupied = [s for s in range(4) if np.any(sectors[s])]
        coeffs = {s: prop.coefficients(sectors[s]) for s in occupied}

        def norm2_at(t):
            return sum(
                float(np.sum(np.abs(prop.state(coeffs[s], t - t_from)) ** 2))
                for s in occupied
            )

        jumped = params.gamma > 0 and norm2_at(t_to) < r
        horizon = _bisect_crossing(norm2_at, t_from, t_to, r) if jumped else t_to
        if trace is not None:
            idx = np.nonzero((t_grid >= t_from) & (t_grid <= horizon))[0]
            if idx.size:
                snaps = np.zeros((4, idx.size, left, m), dtype=complex)
                for s in occupied:
                    snaps[s] = prop.states(coeffs[s], t_grid[idx] - t_from)
                norms = np.sum(np.abs(snaps) ** 2, axis=(0, 2, 3))
                for k, terms in enumerate(targets):
                    amp = sum(
                        np.conj(w) * snaps[s][:, pos[0], pos[1]] for s, pos, w in terms
                    )
                    trace[idx, k] = np.abs(amp) ** 2 / norms
        if jumped:
            return None, True
        out = np.zeros_like(sectors)
        for s in occupied:
            out[s] = prop.state(coeffs[s], t_to - t_from)
        return out, False

    r = rng.uniform() if params.gamma > 0 else 0.0
    sectors, jumped = transport(sectors, 0.0, t1, r)
    if jumped:
        return trace, 0.0, True, False, None

    norm2 = float(np.sum(np.abs(sectors) ** 2))
    trapped = float(np.sum(np.abs(sectors[:, left - 1, 0]) ** 2)) / norm2
    poor = trapped < 1.0 - 1e-3
    if trace is not None:
        for k in np.nonzero((t_grid > t1) & (t_grid < t2))[0]:
            snap = np.tensordot(exchange_unitary(pulse.area_to(t_grid[k])), sectors, 1)
            trace[k] = _overlaps(snap, targets, norm2)
    sectors = np.tensordot(exchange_unitary(theta_total), sectors, 1)

    sectors, jumped = transport(sectors, t2, schedule.tau_end, r)
    if jumped:
        return trace, 0.0, True, poor, None

    final_norm2 = float(np.sum(np.abs(sectors) ** 2))
    fidelity = _overlaps(sectors, targets, final_norm2)[3]
    return trace, fidelity, False, poor, sectors


def _protocol_chunk(args):
    (params, schedule, disorder, seed, spins, t_grid, targets, lo, hi) = args
    return [
        _run_protocol_trajectory(params, schedule, disorder, seed, k, spins,
                                 t_grid, targets)
        for k in range(lo, hi)
    ]


def _embed_cross_block(sectors, n, left):
    """Lift cross-block sector matrices back onto the full pair basis."""
    basis = SectorBasis.two_electron(n)
    full = np.zeros((4, basis.dim), dtype=complex)
    for s in range(4):
        for a in range(left):
            for b in range(n - left):
                full[s, index_2e(a + 1, left + 1 + b, n)] = sectors[s, a, b]
    return SpinPairState(basis, full)


def run_protocol(params, schedule, disorder=None, n_trajectories=1, seed=0,
                 spins=("u", "d"), sample_dt=0.02, collect_traces=True, threads=1):
    """Run the three-step protocol, optionally Monte Carlo averaged.

    Overlap traces are ensemble means of |<phi_i|psi(tau)>|^2 for the four
    reference states: the initial end pair, the trapped entangler pair, the
    entangled entangler pair and the entangled end pair. Trajectories that
    lose an electron contribute zero fidelity (and zero overlap from the
    jump onward). Single-trajectory runs also expose the final state on the
    full pair basis.
    """
    left = schedule.entangler_pair[0]
    if not (1 <= left < params.n):
        raise ValueError(f"entangler pair {schedule.entangler_pair} does not fit n={params.n}")
    if params.couplings[left - 1] != 0.0:
        raise ValueError(
            f"the entangler bond ({left}, {left + 1}) must be closed during "
            f"transport, got coupling {params.couplings[left - 1]:g}"
        )
    targets = _protocol_targets(left, params.n - left)
    t_grid = _sample_grid(schedule, sample_dt) if collect_traces else None

    if threads <= 1 or n_trajectories == 1:
        results = _protocol_chunk(
            (params, schedule, disorder, seed, spins, t_grid, targets, 0, n_trajectories)
        )
    else:
        bounds = np.linspace(0, n_trajectories, threads + 1).astype(int)
        chunks = [
            (params, schedule, disorder, seed, spins, t_grid, targets, lo, hi)
            for lo, hi in zip(bounds[:-1], bounds[1:])
            if hi > lo
        ]
        results = []
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for part in pool.map(_protocol_chunk, chunks):
                results.extend(part)

    fidelities = np.array([res[1] for res in results])
    n_jumped = sum(1 for res in results if res[2])
    warnings = []
    n_poor = sum(1 for res in results if res[3])
    if n_poor:
        warnings.append(
            f"trapped population below 1 - 1e-3 in {n_poor} of "
            f"{n_trajectories} trajectories"
        )
    overlaps = None
    if collect_traces:
        overlaps = np.mean([res[0] for res in results], axis=0)
    final_state = None
    if n_trajectories == 1 and results[0][4] is not None:
        final_state = _embed_cross_block(results[0][4], params.n, left)
    return ProtocolResult(t_grid, overlaps, fidelities, n_jumped, warnings, final_state)
