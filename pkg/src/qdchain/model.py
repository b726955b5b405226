"""Chain configuration, coupling profiles, disorder sampling and parameter estimates.

All energies and couplings are expressed in units of the tunneling scale t0,
all times in units of 1/t0, with hbar = 1. SI units appear only in
:func:`estimate_parameters`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

# SI constants (CODATA 2018)
_E_CHARGE = 1.602176634e-19  # C
_EPS0 = 8.8541878128e-12  # F/m
_HBAR = 1.054571817e-34  # J s
_M_ELECTRON = 9.1093837015e-31  # kg


@dataclass(frozen=True)
class ChainParams:
    """Physical description of one chain run.

    Attributes
    ----------
    n : int
        Number of dots (>= 1).
    eps : tuple of float
        On-site energy of each dot, length n.
    couplings : tuple of float
        Tunneling amplitude of each bond (dot j to dot j+1), length n - 1.
    v : float
        Nearest-neighbor interdot repulsion.
    u : float or None
        On-site repulsion; None means effectively infinite (hard-core only).
        Double occupancy is excluded structurally either way; u only enters
        regime validation and the exchange pulse.
    gamma : float
        Detector coupling on the last dot.
    """

    n: int
    eps: tuple[float, ...]
    couplings: tuple[float, ...]
    v: float = 0.0
    u: float | None = None
    gamma: float = 0.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"need at least one dot, got n={self.n}")
        if len(self.eps) != self.n:
            raise ValueError(f"expected {self.n} on-site energies, got {len(self.eps)}")
        if len(self.couplings) != self.n - 1:
            raise ValueError(
                f"expected {self.n - 1} couplings, got {len(self.couplings)}"
            )
        if self.v < 0:
            raise ValueError("interdot repulsion v must be >= 0")
        if self.gamma < 0:
            raise ValueError("detector coupling gamma must be >= 0")
        # frozen dataclass: normalize sequences to tuples via object.__setattr__
        object.__setattr__(self, "eps", tuple(float(e) for e in self.eps))
        object.__setattr__(self, "couplings", tuple(float(t) for t in self.couplings))

    @classmethod
    def uniform(cls, n, eps0=0.0, t0=1.0, v=0.0, u=None, gamma=0.0):
        """Chain with equal on-site energies and equal couplings."""
        return cls(n, (eps0,) * n, (t0,) * max(n - 1, 0), v=v, u=u, gamma=gamma)

    @classmethod
    def optimal(cls, n, eps0=0.0, t0=1.0, v=0.0, u=None, gamma=0.0):
        """Chain with the mirror-symmetric coupling profile t0*sqrt((n-j)j)."""
        return cls(n, (eps0,) * n, tuple(optimal_couplings(n, t0)), v=v, u=u, gamma=gamma)


@dataclass(frozen=True)
class DisorderSpec:
    """Gaussian fluctuation magnitudes for energies and couplings.

    delta_eps and delta_t are standard deviations (in units of t0).
    """

    delta_eps: float = 0.0
    delta_t: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.delta_eps < 0 or self.delta_t < 0:
            raise ValueError("disorder magnitudes must be >= 0")

    @property
    def is_trivial(self):
        return self.delta_eps == 0.0 and self.delta_t == 0.0


@dataclass(frozen=True)
class MaterialParams:
    """Material constants for a 2D disk-shaped dot.

    eps_r is the relative permittivity, m_star the effective mass as a
    fraction of the free electron mass, radius the dot radius in meters.
    Defaults are the usual GaAs values.
    """

    eps_r: float = 13.0
    m_star: float = 0.067
    radius: float = 50e-9

    def __post_init__(self):
        if self.eps_r <= 0 or self.m_star <= 0 or self.radius <= 0:
            raise ValueError("material parameters must be strictly positive")


def optimal_couplings(n, t0=1.0):
    """Bond profile t0*sqrt((n-j)j), j = 1..n-1.

    This profile makes all eigenfrequencies commensurate, so an end-localized
    electron is transferred to the opposite end without dispersion and the
    dynamics is exactly periodic.
    """
    if n < 2:
        raise ValueError(f"optimal couplings need n >= 2 dots, got {n}")
    if t0 <= 0:
        raise ValueError("coupling scale t0 must be positive")
    j = np.arange(1, n)
    return list(t0 * np.sqrt((n - j) * j))


def sample_disorder(params, spec, rng):
    """Draw one static disorder realization of *params*.

    Each on-site energy is drawn Normal(eps_j, delta_eps^2) and each coupling
    Normal(t_j, delta_t^2) from *rng* (draw order: energies first, then
    couplings). Negative sampled couplings are kept; the sign is a physical
    phase. The draw is deterministic given the rng state.
    """
    if spec.is_trivial:
        return params
    eps = rng.normal(params.eps, spec.delta_eps) if spec.delta_eps > 0 else np.asarray(params.eps)
    if spec.delta_t > 0 and params.n > 1:
        couplings = rng.normal(params.couplings, spec.delta_t)
    else:
        couplings = np.asarray(params.couplings)
    return replace(params, eps=tuple(eps), couplings=tuple(couplings))


def validate_regime(params, tau_max):
    """Advisory checks of the Coulomb-blockade / tight-binding assumptions.

    Returns a list of human-readable warnings, one per violated inequality:

    * u must exceed every tunneling amplitude (Coulomb blockade),
    * u must exceed 4 * t_max^2 * tau_max (spin exchange negligible during
      the run),
    * gamma should stay below the tunneling scale (detector slower than the
      coherent dynamics).

    u = None (hard-core sentinel) skips the u checks. Never raises.
    """
    warnings = []
    t_max = max((abs(t) for t in params.couplings), default=0.0)
    if params.u is not None:
        if params.u <= t_max:
            warnings.append(
                f"Coulomb blockade marginal: u = {params.u:g} does not exceed "
                f"max coupling {t_max:g}"
            )
        bound = 4.0 * t_max**2 * tau_max
        if params.u < bound:
            warnings.append(
                f"residual spin exchange not negligible: u = {params.u:g} vs "
                f"4 t_max^2 tau_max = {bound:g}"
            )
    if t_max > 0 and params.gamma > t_max:
        warnings.append(
            f"detector coupling gamma = {params.gamma:g} exceeds max coupling "
            f"{t_max:g}; switching is not fast on the detection time scale"
        )
    return warnings


def estimate_parameters(mat):
    """Charging energy and level spacing of a 2D disk-shaped dot.

    Uses u = e^2 / C_g with the self-capacitance C_g = 8 eps_r eps0 R, and
    the single-particle level spacing delta_eps = hbar^2 pi / (m* R^2).
    Returns a dict with both values in joules and in micro-eV.
    """
    if mat.radius <= 0:
        raise ValueError("dot radius must be positive")
    c_g = 8.0 * mat.eps_r * _EPS0 * mat.radius
    u_joule = _E_CHARGE**2 / c_g
    de_joule = _HBAR**2 * math.pi / (mat.m_star * _M_ELECTRON * mat.radius**2)
    to_uev = 1e6 / _E_CHARGE
    return {
        "u_joule": u_joule,
        "delta_eps_joule": de_joule,
        "u_uev": u_joule * to_uev,
        "delta_eps_uev": de_joule * to_uev,
    }


def chain_from_dict(doc):
    """Build (ChainParams, DisorderSpec | None) from a JSON-style dict.

    Expected keys: n, eps0, t0, coupling_profile ("uniform" | "optimal" |
    list of n-1 couplings), v, u (null for hard-core only), gamma, and an
    optional disorder object {delta_eps, delta_t, seed}.
    """
    try:
        n = int(doc["n"])
    except KeyError:
        raise ValueError("chain config needs a dot count 'n'") from None
    eps0 = float(doc.get("eps0", 0.0))
    t0 = float(doc.get("t0", 1.0))
    profile = doc.get("coupling_profile", "uniform")
    if isinstance(profile, str):
        if profile == "uniform":
            couplings = [t0] * (n - 1)
        elif profile == "optimal":
            couplings = optimal_couplings(n, t0) if n > 1 else []
        else:
            raise ValueError(f"unknown coupling profile {profile!r}")
    else:
        couplings = [float(t) for t in profile]
    u = doc.get("u")
    params = ChainParams(
        n,
        (eps0,) * n,
        tuple(couplings),
        v=float(doc.get("v", 0.0)),
        u=None if u is None else float(u),
        gamma=float(doc.get("gamma", 0.0)),
    )
    disorder = None
    if "disorder" in doc and doc["disorder"] is not None:
        d = doc["disorder"]
        disorder = DisorderSpec(
            delta_eps=float(d.get("delta_eps", 0.0)),
            delta_t=float(d.get("delta_t", 0.0)),
            seed=int(d.get("seed", 0)),
        )
    return params, disorder


def load_chain(path):
    """Read a chain configuration from a JSON file."""
    with open(path) as fh:
        return chain_from_dict(json.load(fh))
