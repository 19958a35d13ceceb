"""Majorana normal forms and Gaussian covariance matrices.

A real antisymmetric ``hm`` is brought to ``hm = R^T [(+) eps_k J2] R`` with
``J2 = [[0, -1], [1, 0]]``, ``eps_k >= 0`` and ``R`` orthogonal.  Row
``2k`` and ``2k+1`` of ``R`` (0-based) are the vectors ``r_{2k-1}, r_{2k}``
of mode ``k`` in 1-based notation; they satisfy ``hm r1 = eps r2`` and
``hm r2 = -eps r1``.  The new annihilators are ``a_k = (w'_{2k} - i w'_{2k+1})/2``
with ``w' = R w``.

Three constructions differ only in the basis picked inside degenerate
eigenspaces:

``generic``
    Hermitian eigendecomposition of ``-i hm``.
``max_entangled``
    Real SVD of the A-B block; every eigenstate then has ``Gamma_B = 0``.
``number_conserving``
    Fermionic normal modes; every eigenstate is also an ``N`` eigenstate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Optional, Sequence

import numpy as np

from ._linalg import canonical_subspace_basis
from .errors import InvariantViolation, SublatticeViolation
from .freefermion import _label, _phase_anchor, binary_renyi, sublattice_eigenbasis
from .model import (
    HERMITIAN_RTOL,
    MajoranaHamiltonian,
    MajoranaPartition,
    ModeHamiltonian,
    check_majorana_sublattice,
)

Construction = Literal["generic", "max_entangled", "number_conserving"]

J2 = np.array([[0.0, -1.0], [1.0, 0.0]])
PAIR_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class MajoranaNormalForm:
    """``hm = R^T [(+) eps_k J2] R``.

    For ``number_conserving`` forms, ``pairing_map[k]`` is the partner of
    mode ``k`` (A-modes map to themselves) and ``hole_modes`` marks normal
    modes whose Majorana occupation is the complement of the fermionic one.
    """

    r: np.ndarray
    energies: np.ndarray
    construction: Construction
    partition: Optional[MajoranaPartition] = None
    pairing_map: Optional[np.ndarray] = None
    hole_modes: Optional[np.ndarray] = None

    @property
    def n_modes(self) -> int:
        return self.energies.size

    def block_diagonal(self) -> np.ndarray:
        return np.kron(np.diag(self.energies), J2)

    def reconstruct(self) -> np.ndarray:
        return self.r.T @ self.block_diagonal() @ self.r


def _as_majorana(hm) -> MajoranaHamiltonian:
    if isinstance(hm, MajoranaHamiltonian):
        return hm
    m = np.asarray(hm)
    return MajoranaHamiltonian(m.shape[0], m)


def _freeze(*arrays):
    for a in arrays:
        if a is not None:
            a.setflags(write=False)


def number_operator_matrix(n: int) -> np.ndarray:
    """``1_N (x) J2``: ``N = (i/4) w^T n w + N/2``."""
    return np.kron(np.eye(n), J2)


def normal_form(hm) -> MajoranaNormalForm:
    h = _as_majorana(hm)
    m = np.asarray(h.hm)
    dim = h.n_majorana
    w, v = np.linalg.eigh(-1j * m)
    tol = 1e-10 * max(1.0, float(np.abs(w).max(initial=0.0)))
    pos = np.flatnonzero(w > tol)
    pos = pos[np.argsort(-w[pos], kind="stable")]
    psi = v[:, pos]
    for k in range(psi.shape[1]):
        i = _phase_anchor(psi[:, k])
        psi[:, k] *= np.conj(psi[i, k]) / abs(psi[i, k])

    inner = psi.conj().T @ psi
    cross = psi.T @ psi
    if np.abs(inner - np.eye(len(pos))).max(initial=0) > 1e-10 or np.abs(cross).max(initial=0) > 1e-10:
        raise InvariantViolation("eigenvectors of -i hm violate the conjugation relations")

    rows = np.zeros((dim, dim))
    rows[0 : 2 * len(pos) : 2] = math.sqrt(2.0) * psi.real.T
    rows[1 : 2 * len(pos) : 2] = -math.sqrt(2.0) * psi.imag.T
    n_kernel = dim - 2 * len(pos)
    if n_kernel:
        # kernel of a real antisymmetric matrix: pick a real orthonormal basis
        _, sv, vt = np.linalg.svd(m)
        kern = vt[np.argsort(sv, kind="stable")[:n_kernel]].T
        rows[2 * len(pos) :] = canonical_subspace_basis(kern).T.real
    energies = np.concatenate([w[pos], np.zeros(n_kernel // 2)])
    _freeze(rows, energies)
    return MajoranaNormalForm(rows, energies, "generic", h.partition)


def max_entangled_normal_form(hm) -> MajoranaNormalForm:
    """Normal form whose B-components are real, so ``Gamma_B = 0`` for all labels."""
    h = _as_majorana(hm)
    verdict = check_majorana_sublattice(h)
    if not verdict.ok:
        raise SublatticeViolation(
            f"no generalized sublattice symmetry ({verdict.status}) at {verdict.witness}",
            verdict.witness,
        )
    part = verdict.partition
    a, b = list(part.a_idx), list(part.b_idx)
    m = np.asarray(h.hm)
    u, d, wt = np.linalg.svd(m[np.ix_(a, b)], full_matrices=True)
    wmat = wt.T
    order = np.argsort(-d, kind="stable")
    d, wmat = d[order], wmat[:, order]
    upair = u[:, order]
    for k in range(len(b)):
        i = _phase_anchor(wmat[:, k])
        if wmat[i, k] < 0:
            wmat[:, k] *= -1
            upair[:, k] *= -1

    dim = h.n_majorana
    rows = np.zeros((dim, dim))
    nb = len(b)
    for k in range(nb):
        rows[2 * k, b] = wmat[:, k]
        rows[2 * k + 1, a] = upair[:, k]
    rest = u[:, len(b) :]
    if rest.shape[1]:
        rest = canonical_subspace_basis(rest).real
    for l in range(rest.shape[1]):
        rows[2 * nb + l, a] = rest[:, l]
    energies = np.concatenate([d, np.zeros(rest.shape[1] // 2)])
    _freeze(rows, energies)
    return MajoranaNormalForm(rows, energies, "max_entangled", part)


def extract_hopping(hm) -> np.ndarray:
    """Invert ``hm = Im h (x) 1 + Re h (x) J2`` for a number-conserving ``hm``."""
    m = np.asarray(_as_majorana(hm).hm)
    return m[1::2, 0::2] + 1j * m[0::2, 0::2]


def check_number_conserving(hm, tol: float = 1e-10) -> float:
    """Return ``max |[hm, 1 (x) J2]|``; raise if it exceeds ``tol * max(1, |hm|)``."""
    h = _as_majorana(hm)
    m = np.asarray(h.hm)
    nop = number_operator_matrix(h.n_modes)
    err = float(np.abs(m @ nop - nop @ m).max())
    if err > tol * max(1.0, float(np.abs(m).max(initial=0.0))):
        raise ValueError(f"hm does not commute with the number operator (|[hm, n]| = {err:.3g})")
    return err


def number_conserving_normal_form(hm) -> MajoranaNormalForm:
    """Normal form built from the fermionic normal modes.

    Negative-energy fermionic modes ``k + |B|`` enter as holes so that all
    ``eps_k >= 0``; their Majorana occupation is ``1 - s_k``.
    """
    h = _as_majorana(hm)
    check_number_conserving(h)
    hop = extract_hopping(h)
    scale = max(1.0, float(np.abs(hop).max(initial=0.0)))
    hop[np.abs(hop) <= HERMITIAN_RTOL * scale] = 0.0
    mode_part = None
    if h.partition is not None:
        if not h.partition.mode_aligned():
            raise ValueError("number-conserving form needs a partition aligned with fermionic modes")
        mode_part = h.partition.to_modes()
    basis = sublattice_eigenbasis(ModeHamiltonian(h.n_modes, hop, 0.0, mode_part))

    u = basis.modes.T
    rows = np.kron(u.real, np.eye(2)) + np.kron(u.imag, J2)
    nb, n = basis.nb, basis.n_modes
    holes = np.zeros(n, dtype=bool)
    holes[nb : 2 * nb] = True
    rows[2 * np.flatnonzero(holes) + 1] *= -1
    pairing = np.arange(n)
    pairing[:nb] = np.arange(nb, 2 * nb)
    pairing[nb : 2 * nb] = np.arange(nb)
    energies = np.abs(np.asarray(basis.energies))
    _freeze(rows, energies, pairing, holes)
    return MajoranaNormalForm(
        rows, energies, "number_conserving", basis.partition.to_majorana(), pairing, holes
    )


def fermion_to_majorana_label(nf: MajoranaNormalForm, s: Sequence[int]) -> np.ndarray:
    """Map a fermionic occupation label to the normal-form label of ``nf``."""
    s = _label(s, nf.n_modes)
    if nf.hole_modes is None:
        return s
    return s ^ nf.hole_modes.astype(np.int64)


def covariance_of_eigenstate(nf: MajoranaNormalForm, s: Sequence[int]) -> np.ndarray:
    """``Gamma_s = -sum_k (-1)^{s_k} (r2 r1^T - r1 r2^T)``."""
    s = _label(s, nf.n_modes)
    sign = 1.0 - 2.0 * s
    r1, r2 = nf.r[0::2], nf.r[1::2]
    half = -(r2.T * sign) @ r1
    return half - half.T


def eigenstate_energy(nf: MajoranaNormalForm, s: Sequence[int]) -> float:
    """Energy of ``|E_s>`` under ``(i/4) w^T hm w``."""
    s = _label(s, nf.n_modes)
    return float(-0.5 * np.sum((1.0 - 2.0 * s) * nf.energies))


def majorana_modes(fermion_modes: Sequence[int]) -> list[int]:
    return [m for j in fermion_modes for m in (2 * j, 2 * j + 1)]


def mode_spectrum(gamma: np.ndarray, subset: Sequence[int]) -> np.ndarray:
    """Mode spectrum of the restriction of ``gamma`` to ``subset`` (one value per pair)."""
    subset = list(subset)
    if len(subset) % 2:
        raise ValueError("Majorana subset must have even size")
    if not subset:
        return np.zeros(0)
    sv = np.linalg.svd(np.asarray(gamma)[np.ix_(subset, subset)], compute_uv=False)
    sv = np.sort(sv)[::-1]
    if np.abs(sv[0::2] - sv[1::2]).max() > PAIR_TOL:
        raise InvariantViolation("singular values of the covariance block are not paired")
    nu = sv[0::2]
    if nu.max() > 1 + 1e-10:
        raise InvariantViolation(f"mode spectrum value {nu.max():.12g} exceeds 1")
    return np.minimum(nu, 1.0)


def entropy_from_modes(nu: Sequence[float], alpha: float = 1.0) -> float:
    nu = np.asarray(nu, dtype=float)
    if nu.size and (nu.min() < -1e-12 or nu.max() > 1 + 1e-12):
        raise ValueError("mode spectrum values must lie in [0, 1]")
    return binary_renyi((1.0 + np.clip(nu, 0.0, 1.0)) / 2.0, alpha)


def majorana_singlet_count(nf: MajoranaNormalForm, s: Sequence[int]) -> int:
    """Singlets between A and B: pairs ``(k, pairing_map[k])`` with equal occupation."""
    if nf.construction != "number_conserving" or nf.pairing_map is None:
        raise ValueError("singlet count needs a number_conserving normal form")
    s = _label(s, nf.n_modes)
    nb = nf.partition.n_b_modes
    return int(np.sum(1 - (s[:nb] ^ s[nf.pairing_map[:nb]])))
