"""Basis enumeration and state vectors for the 1e and hard-core 2e sectors.

One-electron basis states are |j>, j = 1..n (electron on dot j). Two-electron
basis states are ordered pairs |i, j> with 1 <= i < j <= n; double occupancy
is excluded structurally, so the dimension is n(n-1)/2. Pairs are flattened
row-major: (1,2), (1,3), ..., (1,n), (2,3), ... so that file outputs are
stable.

The four two-electron spin configurations evolve under identical equations,
so a basis carries the spin assignment as a label only; orbital amplitudes
are not duplicated per spin sector.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


class Spin(enum.Enum):
    UP = "up"
    DOWN = "down"

    def __str__(self):
        return self.value


def dim_2e(n):
    """Number of hard-core pair states on n dots."""
    return n * (n - 1) // 2


def index_2e(i, j, n):
    """Flat index of the pair (i, j), 1 <= i < j <= n, in row-major order."""
    if not (1 <= i < j <= n):
        raise ValueError(f"pair ({i}, {j}) out of range for n={n} (need 1 <= i < j <= n)")
    return (i - 1) * (2 * n - i) // 2 + (j - i - 1)


def pair_from_index(k, n):
    """Inverse of :func:`index_2e`."""
    if not (0 <= k < dim_2e(n)):
        raise ValueError(f"pair index {k} out of range for n={n}")
    i = 1
    row = n - 1  # pairs starting at dot i
    while k >= row:
        k -= row
        i += 1
        row -= 1
    return i, i + 1 + k


@dataclass(frozen=True)
class SectorBasis:
    """Enumerated basis of one particle-number sector.

    kind is "1e" or "2e"; spins is a single Spin for 1e and an ordered
    (Spin, Spin) pair for 2e (spin of the left and right electron).
    """

    kind: str
    n: int
    spins: tuple

    def __post_init__(self):
        if self.kind not in ("1e", "2e"):
            raise ValueError(f"unknown sector kind {self.kind!r}")
        if self.kind == "2e" and self.n < 2:
            raise ValueError("two-electron sector needs at least two dots")

    @classmethod
    def one_electron(cls, n, spin=Spin.UP):
        return cls("1e", n, (spin,))

    @classmethod
    def two_electron(cls, n, spins=(Spin.UP, Spin.DOWN)):
        return cls("2e", n, tuple(spins))

    @property
    def dim(self):
        return self.n if self.kind == "1e" else dim_2e(self.n)

    @property
    def spin_label(self):
        return "".join("u" if s is Spin.UP else "d" for s in self.spins)

    def pairs(self):
        """All (i, j) pairs in flat order (2e only)."""
        if self.kind != "2e":
            raise ValueError("pairs() is only defined for the 2e sector")
        return [(i, j) for i in range(1, self.n) for j in range(i + 1, self.n + 1)]

    def index_of(self, state):
        """Flat index of a basis state: a dot number (1e) or an (i, j) pair (2e)."""
        if self.kind == "1e":
            j = int(state)
            if not (1 <= j <= self.n):
                raise ValueError(f"dot {j} out of range 1..{self.n}")
            return j - 1
        i, j = state
        return index_2e(i, j, self.n)

    def dot_n_mask(self):
        """Boolean mask of basis states that occupy the last dot."""
        if self.kind == "1e":
            mask = np.zeros(self.n, dtype=bool)
            mask[self.n - 1] = True
            return mask
        mask = np.zeros(self.dim, dtype=bool)
        for i in range(1, self.n):
            mask[index_2e(i, self.n, self.n)] = True
        return mask


@dataclass
class StateVector:
    """Complex amplitudes over one sector basis."""

    basis: SectorBasis
    amps: np.ndarray

    def __post_init__(self):
        self.amps = np.asarray(self.amps, dtype=complex)
        if self.amps.shape != (self.basis.dim,):
            raise ValueError(
                f"amplitude vector has shape {self.amps.shape}, "
                f"expected ({self.basis.dim},)"
            )

    @classmethod
    def basis_state(cls, basis, state):
        amps = np.zeros(basis.dim, dtype=complex)
        amps[basis.index_of(state)] = 1.0
        return cls(basis, amps)

    def norm2(self):
        return float(np.vdot(self.amps, self.amps).real)

    def normalized(self):
        return StateVector(self.basis, self.amps / np.sqrt(self.norm2()))

    def copy(self):
        return StateVector(self.basis, self.amps.copy())


def occupation_1e(state):
    """Per-dot probabilities |A_j|^2; sums to the squared norm."""
    if state.basis.kind != "1e":
        raise ValueError(f"expected a 1e state, got sector {state.basis.kind!r}")
    return np.abs(state.amps) ** 2


@lru_cache(maxsize=None)
def _pair_dot_indices(n):
    """0-based dot indices (left, right) of every pair in flat order."""
    pairs = [(i, j) for i in range(1, n) for j in range(i + 1, n + 1)]
    left = np.array([p[0] - 1 for p in pairs])
    right = np.array([p[1] - 1 for p in pairs])
    return left, right


def occupation_2e(state):
    """Per-dot occupation, each pair amplitude counting toward both dots.

    The total over dots is twice the squared norm (two electrons).
    """
    if state.basis.kind != "2e":
        raise ValueError(f"expected a 2e state, got sector {state.basis.kind!r}")
    n = state.basis.n
    weights = np.abs(state.amps) ** 2
    left, right = _pair_dot_indices(n)
    return np.bincount(left, weights, minlength=n) + np.bincount(right, weights, minlength=n)


def occupation(state):
    return occupation_1e(state) if state.basis.kind == "1e" else occupation_2e(state)


def state_to_csv(state, path):
    """Write (index, re, im) rows; the header names the sector and spins."""
    with open(path, "w") as fh:
        fh.write(f"# sector={state.basis.kind} n={state.basis.n} spins={state.basis.spin_label}\n")
        fh.write("index,re,im\n")
        for k, a in enumerate(state.amps):
            fh.write(f"{k},{float(a.real)!r},{float(a.imag)!r}\n")


def state_from_csv(path, basis):
    """Read a state written by :func:`state_to_csv` (basis supplied by caller)."""
    rows = np.loadtxt(path, delimiter=",", skiprows=2)
    rows = np.atleast_2d(rows)
    amps = np.zeros(basis.dim, dtype=complex)
    for k, re, im in rows:
        amps[int(k)] = re + 1j * im
    return StateVector(basis, amps)
