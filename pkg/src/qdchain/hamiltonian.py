"""Effective Hamiltonians of the 1e and hard-core 2e sectors.

The amplitude equations are, with open boundaries (t_{0,1} = t_{n,n+1} = 0),

    i dA_j/dtau  = eps_j A_j + t_{j-1,j} A_{j-1} + t_{j,j+1} A_{j+1}

for one electron, and for a hard-core pair (i < j)

    i dB_ij/dtau = (eps_i + eps_j + V [j-i=1]) B_ij
                   + t_{i-1,i} B_{i-1,j} + t_{i,i+1} B_{i+1,j}
                   + t_{j-1,j} B_{i,j-1} + t_{j,j+1} B_{i,j+1},

where hops that would put both electrons on one dot are absent. Detection on
the last dot adds -i gamma/2 to the diagonal of every basis state occupying
dot n, which makes the matrix non-Hermitian and the norm non-increasing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sparse

from .hilbert import SectorBasis, Spin, index_2e


@dataclass(frozen=True)
class SectorHamiltonian:
    """Sparse effective Hamiltonian over one sector basis."""

    basis: SectorBasis
    matrix: sparse.csr_matrix  # complex, dim x dim
    gamma: float

    @property
    def dim(self):
        return self.basis.dim

    def hermitian_part(self):
        """The coherent part (the matrix with the decay diagonal removed)."""
        h = self.matrix.copy().tolil()
        mask = self.basis.dot_n_mask()
        for k in np.nonzero(mask)[0]:
            h[k, k] = h[k, k] + 0.5j * self.gamma
        return h.tocsr()

    def dense(self):
        return self.matrix.toarray()

    def to_matrix_market(self, path):
        """Dump the matrix in MatrixMarket coordinate format."""
        from scipy.io import mmwrite

        mmwrite(path, self.matrix.tocoo())


def build_1e(params, spin=Spin.UP):
    """Tridiagonal one-electron Hamiltonian for *params*."""
    n = params.n
    diag = np.array(params.eps, dtype=complex)
    diag[n - 1] -= 0.5j * params.gamma
    if n == 1:
        mat = sparse.csr_matrix(np.array([[diag[0]]]))
    else:
        t = np.asarray(params.couplings, dtype=complex)
        mat = sparse.diags([t, diag, t], offsets=[-1, 0, 1], format="csr", dtype=complex)
    return SectorHamiltonian(SectorBasis.one_electron(n, spin), mat, params.gamma)


def build_2e(params, spins=(Spin.UP, Spin.DOWN)):
    """Hard-core pair Hamiltonian over the basis of ordered pairs (i < j)."""
    n = params.n
    if n < 2:
        raise ValueError("two-electron sector needs n >= 2")
    eps = params.eps
    t = params.couplings
    basis = SectorBasis.two_electron(n, spins)
    rows, cols, vals = [], [], []

    def add(r, c, x):
        rows.append(r)
        cols.append(c)
        vals.append(x)

    for i in range(1, n):
        for j in range(i + 1, n + 1):
            k = index_2e(i, j, n)
            e = eps[i - 1] + eps[j - 1]
            if j - i == 1:
                e += params.v
            if j == n:
                e -= 0.5j * params.gamma
            add(k, k, e)
            # hops of the left electron; i -> i+1 blocked when it would hit j
            if i > 1:
                add(k, index_2e(i - 1, j, n), t[i - 2])
            if i + 1 < j:
                add(k, index_2e(i + 1, j, n), t[i - 1])
            # hops of the right electron; j -> j-1 blocked when it would hit i
            if j - 1 > i:
                add(k, index_2e(i, j - 1, n), t[j - 2])
            if j < n:
                add(k, index_2e(i, j + 1, n), t[j - 1])

    mat = sparse.coo_matrix(
        (np.array(vals, dtype=complex), (rows, cols)), shape=(basis.dim, basis.dim)
    ).tocsr()
    return SectorHamiltonian(basis, mat, params.gamma)


def build_sector(params, kind, spins=None):
    if kind == "1e":
        return build_1e(params, spins[0] if spins else Spin.UP)
    if kind == "2e":
        return build_2e(params, spins or (Spin.UP, Spin.DOWN))
    raise ValueError(f"unknown sector kind {kind!r}")
