"""Brute-force many-body reference in the occupation-number basis.

Basis convention: index ``i`` encodes the bitstring ``b`` with mode 0 as the
most significant bit, and the basis state is
``(f_0^dag)^{b_0} (f_1^dag)^{b_1} ... (f_{N-1}^dag)^{b_{N-1}} |0>``.
Hence ``f_j`` picks up the sign ``(-1)^(number of occupied modes < j)``.

Reduced density matrices of arbitrary (also disconnected) mode subsets are
taken after reordering the creation operators so that the subset comes
first; each amplitude gets the parity of that reordering restricted to the
occupied modes.  Skipping this sign is exactly the Jordan-Wigner pitfall
for disconnected subsets.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

from ._linalg import canonical_subspace_basis
from .errors import SizeGuardError
from .model import Boundary, ModeHamiltonian, build_chain_xx
from .freefermion import _label

MAX_MODES = 14
MAX_DENSE_DIM = 4096


def _guard(n: int, max_modes: int = MAX_MODES) -> None:
    if n > max_modes:
        dim = 2**n
        raise SizeGuardError(
            f"N={n} exceeds the guard N<={max_modes}: Fock dimension {dim}, "
            f"a dense complex matrix would need {dim * dim * 16 / 2**30:.1f} GiB"
        )


@lru_cache(maxsize=None)
def _bits(n: int) -> np.ndarray:
    idx = np.arange(2**n)
    b = ((idx[:, None] >> np.arange(n - 1, -1, -1)[None, :]) & 1).astype(np.int8)
    b.setflags(write=False)
    return b


def occupation_bits(n: int) -> np.ndarray:
    """``(2^n, n)`` array; row ``i`` is the occupation bitstring of basis state ``i``."""
    return _bits(n)


def particle_numbers(n: int) -> np.ndarray:
    return _bits(n).sum(axis=1)


@lru_cache(maxsize=None)
def _annihilator(n: int, j: int) -> sp.csr_matrix:
    bits = _bits(n)
    src = np.flatnonzero(bits[:, j] == 1)
    dst = src - (1 << (n - 1 - j))
    sign = 1.0 - 2.0 * (bits[src, :j].sum(axis=1) % 2)
    return sp.csr_matrix((sign.astype(complex), (dst, src)), shape=(2**n, 2**n))


def annihilation_operator(n: int, j: int) -> sp.csr_matrix:
    _guard(n)
    return _annihilator(n, j)


def creation_operator(n: int, j: int) -> sp.csr_matrix:
    return annihilation_operator(n, j).conj().T.tocsr()


def majorana_operators(n: int) -> list[sp.csr_matrix]:
    """``[w_0, ..., w_{2n-1}]`` with ``w_{2j} = f^dag + f`` and ``w_{2j+1} = -i (f^dag - f)``."""
    out = []
    for j in range(n):
        f = annihilation_operator(n, j)
        fd = f.conj().T
        out.append((fd + f).tocsr())
        out.append((-1j * (fd - f)).tocsr())
    return out


def number_operator(n: int) -> sp.csr_matrix:
    _guard(n)
    return sp.diags(particle_numbers(n).astype(complex), format="csr")


def build_quadratic_matrix(h: ModeHamiltonian, max_modes: int = MAX_MODES) -> sp.csr_matrix:
    """``sum_ij h_ij f_i^dag f_j + mu N`` on the full Fock space."""
    n = h.n_modes
    _guard(n, max_modes)
    hsp = np.asarray(h.single_particle)
    dim = 2**n
    out = sp.csr_matrix((dim, dim), dtype=complex)
    for i, j in zip(*np.nonzero(hsp)):
        out = out + hsp[i, j] * (creation_operator(n, i) @ annihilation_operator(n, j))
    return out.tocsr()


def build_interacting_matrix(
    n: int, g: float, boundary: Boundary = "open", max_modes: int = MAX_MODES
) -> sp.csr_matrix:
    """XX chain (amplitude 1/2) plus ``g sum_j n_j n_{j+1}`` over the chain bonds."""
    _guard(n, max_modes)
    h = build_chain_xx(n, boundary, 0.5)
    out = build_quadratic_matrix(h, max_modes)
    bits = _bits(n).astype(float)
    bonds = [(j, j + 1) for j in range(n - 1)]
    if boundary == "periodic" and n > 2:
        bonds.append((n - 1, 0))
    diag = sum(bits[:, i] * bits[:, j] for i, j in bonds)
    return (out + g * sp.diags(diag.astype(complex))).tocsr()


def build_majorana_matrix(hm: np.ndarray, max_modes: int = MAX_MODES) -> sp.csr_matrix:
    """``(i/4) sum_ab hm_ab w_a w_b`` on the full Fock space."""
    hm = np.asarray(hm)
    n = hm.shape[0] // 2
    _guard(n, max_modes)
    w = majorana_operators(n)
    out = sp.csr_matrix((2**n, 2**n), dtype=complex)
    for a, b in zip(*np.nonzero(hm)):
        out = out + (0.25j * hm[a, b]) * (w[a] @ w[b])
    return out.tocsr()


def _canonical_eigvecs(vals: np.ndarray, vecs: np.ndarray, tol: float) -> np.ndarray:
    """Fix phases and resolve degeneracies deterministically."""
    vecs = vecs.copy()
    start = 0
    while start < len(vals):
        stop = start + 1
        while stop < len(vals) and vals[stop] - vals[start] <= tol:
            stop += 1
        vecs[:, start:stop] = canonical_subspace_basis(vecs[:, start:stop])
        start = stop
    return vecs


def eigensolve(
    matrix,
    sector: Optional[int] = None,
    n_states: Optional[int] = None,
    degeneracy_tol: float = 1e-9,
) -> list[tuple[float, np.ndarray]]:
    """Eigenpairs sorted by energy, amplitudes embedded in the full Fock space.

    ``sector`` restricts to fixed particle number.  Inside a degenerate
    cluster (energies within ``degeneracy_tol * max(1, |E|)``) the basis is
    replaced by a canonical one: pivots on the lexicographically smallest
    dominant bitstrings, each pivot amplitude real positive.
    """
    dim = matrix.shape[0]
    n = int(round(math.log2(dim)))
    _guard(n)
    if sector is None:
        idx = np.arange(dim)
    else:
        idx = np.flatnonzero(particle_numbers(n) == sector)
    if idx.size > MAX_DENSE_DIM:
        raise SizeGuardError(f"dense block of dimension {idx.size} exceeds {MAX_DENSE_DIM}")
    sub = matrix[idx][:, idx]
    sub = sub.toarray() if sp.issparse(sub) else np.asarray(sub)
    vals, vecs = np.linalg.eigh(sub)
    if n_states is not None:
        # keep the whole last degenerate cluster so the canonical basis is well defined
        cut = min(n_states, len(vals))
        while cut < len(vals) and vals[cut] - vals[cut - 1] <= degeneracy_tol * max(1.0, abs(vals[cut])):
            cut += 1
        vals, vecs = vals[:cut], vecs[:, :cut]
    tol = degeneracy_tol * max(1.0, float(np.abs(vals).max(initial=0.0)))
    vecs = _canonical_eigvecs(vals, vecs, tol)
    out = []
    for k in range(len(vals)):
        psi = np.zeros(dim, dtype=complex)
        psi[idx] = vecs[:, k]
        out.append((float(vals[k]), psi))
    return out


def vacuum(n: int) -> np.ndarray:
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = 1.0
    return psi


def normal_mode_state(modes: np.ndarray, s: Sequence[int]) -> np.ndarray:
    """``(a_0^dag)^{s_0} ... (a_{N-1}^dag)^{s_{N-1}} |0>`` with ``a_k^dag = sum_i modes[i, k] f_i^dag``."""
    modes = np.asarray(modes)
    n = modes.shape[0]
    s = _label(s, n)
    psi = vacuum(n)
    creators = [creation_operator(n, i) for i in range(n)]
    for k in reversed(np.flatnonzero(s)):
        psi = sum(modes[i, k] * (creators[i] @ psi) for i in range(n))
    return psi


def normal_form_state(r: np.ndarray, s: Sequence[int]) -> np.ndarray:
    """Eigenstate ``|E_s>`` of a Majorana normal form with rows ``r``.

    The new annihilators are ``a_k = (w'_{2k} - i w'_{2k+1}) / 2`` with
    ``w' = r w``.  Their common vacuum is the null vector of
    ``sum_k a_k^dag a_k``; labelled modes are then filled.
    """
    r = np.asarray(r)
    n = r.shape[0] // 2
    s = _label(s, n)
    w = majorana_operators(n)
    wp = [sum(r[a, b] * w[b] for b in range(2 * n) if r[a, b] != 0) for a in range(2 * n)]
    ann = [0.5 * (wp[2 * k] - 1j * wp[2 * k + 1]) for k in range(n)]
    count = sum(a.conj().T @ a for a in ann)
    vals, vecs = np.linalg.eigh(count.toarray())
    psi = vecs[:, 0]
    for k in reversed(np.flatnonzero(s)):
        psi = ann[k].conj().T @ psi
    return psi / np.linalg.norm(psi)


def reorder_amplitudes(psi: np.ndarray, order: Sequence[int]) -> np.ndarray:
    """Amplitudes after reordering creation operators into ``order``.

    ``order`` lists all modes; position ``p`` of the new basis holds mode
    ``order[p]``.  The sign of every basis state is the parity of the
    permutation restricted to its occupied modes.
    """
    psi = np.asarray(psi)
    n = int(round(math.log2(psi.size)))
    order = [int(o) for o in order]
    if sorted(order) != list(range(n)):
        raise ValueError("order must be a permutation of all modes")
    bits = _bits(n)
    parity = np.zeros(bits.shape[0], dtype=np.int64)
    for p in range(n):
        for q in range(p + 1, n):
            if order[p] > order[q]:
                parity += bits[:, order[p]] & bits[:, order[q]]
    new_bits = bits[:, order].astype(np.int64)
    new_index = new_bits @ (1 << np.arange(n - 1, -1, -1))
    out = np.empty_like(psi)
    out[new_index] = psi * (1 - 2 * (parity % 2))
    return out


def reduced_density_matrix(psi: np.ndarray, subset: Sequence[int]) -> np.ndarray:
    """Fermionic reduced state on ``subset`` (basis ordered like ``subset``, first mode MSB)."""
    psi = np.asarray(psi)
    n = int(round(math.log2(psi.size)))
    subset = [int(i) for i in subset]
    if len(set(subset)) != len(subset) or any(not 0 <= i < n for i in subset):
        raise ValueError("subset must hold distinct modes in range")
    rest = [i for i in range(n) if i not in subset]
    amp = reorder_amplitudes(psi, subset + rest).reshape(2 ** len(subset), 2 ** len(rest))
    return amp @ amp.conj().T


def rdm_entropy(rho: np.ndarray, alpha: float = 1.0) -> float:
    """Renyi entropy (bits) of a density matrix.

    Eigenvalues below 1e-12 are dropped and those within 1e-12 of 1 are set to 1.
    """
    rho = np.asarray(rho)
    if np.abs(rho - rho.conj().T).max() > 1e-10:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > 1e-10:
        raise ValueError("density matrix trace differs from 1")
    lam = np.linalg.eigvalsh(rho)
    if lam.min() < -1e-10:
        raise ValueError("density matrix is not positive semidefinite")
    lam = lam[lam > 1e-12]
    lam[lam > 1.0 - 1e-12] = 1.0
    if alpha == 1:
        value = -np.sum(lam * np.log2(lam))
    elif math.isinf(alpha):
        value = -np.log2(lam.max())
    elif alpha > 0:
        value = np.log2(np.sum(lam**alpha)) / (1.0 - alpha)
    else:
        raise ValueError("alpha must be positive")
    return float(value) + 0.0  # no negative zero


def correlation_from_state(psi: np.ndarray) -> np.ndarray:
    """``C[i, j] = <psi| f_i^dag f_j |psi>``."""
    psi = np.asarray(psi)
    n = int(round(math.log2(psi.size)))
    fs = [annihilation_operator(n, j) @ psi for j in range(n)]
    return np.array([[np.vdot(fs[i], fs[j]) for j in range(n)] for i in range(n)])


def covariance_from_state(psi: np.ndarray) -> np.ndarray:
    """``Gamma[j, k] = (i/2) <psi| [w_j, w_k] |psi>`` (real)."""
    psi = np.asarray(psi)
    n = int(round(math.log2(psi.size)))
    w = [op @ psi for op in majorana_operators(n)]
    m = 2 * n
    g = np.zeros((m, m))
    for j in range(m):
        for k in range(m):
            if j != k:
                # <w_j w_k> - <w_k w_j> = 2i Im <w_j psi | w_k psi>
                g[j, k] = 0.5 * (1j * (np.vdot(w[j], w[k]) - np.vdot(w[k], w[j]))).real
    return g
