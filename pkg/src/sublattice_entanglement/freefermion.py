"""Number-conserving free fermions with sublattice symmetry.

The single-particle matrix ``h = [[0, h_AB], [h_AB^dag, 0]]`` is
diagonalized through the SVD of ``h_AB``.  With singular triplets
``h_AB y_k = d_k x_k`` the normal modes are

* ``k < |B|``:          ``(x_k, y_k) / sqrt(2)`` with energy ``+d_k``
* ``|B| <= k < 2|B|``:  ``(x_k, -y_k) / sqrt(2)`` with energy ``-d_k``
* ``k >= 2|B|``:        A-only zero modes spanning the complement of the x_k.

An eigenstate label ``s`` (0/1 per normal mode) fills the modes with
``s[k] = 1``.  Its B-entanglement is the number of pairs ``(k, k+|B|)``
with exactly one member filled.  Entropies are in units of log 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Optional, Sequence

import numpy as np
from scipy.special import xlogy

from .errors import SublatticeViolation
from .model import ModeHamiltonian, ModePartition, check_sublattice

ZeroPolicy = Literal["max_entangled", "empty", "filled"]

CLAMP_WINDOW = 1e-12


def _phase_anchor(v: np.ndarray) -> int:
    """First index whose magnitude is maximal up to round-off."""
    mag = np.abs(v)
    return int(np.flatnonzero(mag >= mag.max() * (1 - 1e-9))[0])


@dataclass(frozen=True, eq=False)
class NormalModeBasis:
    """Eigenbasis of the hopping matrix in the paired labelling.

    ``modes[:, k]`` is the normal mode psi_k (unit norm) with energy
    ``energies[k]``.  ``m_z`` counts spurious zero modes, i.e. pairs whose
    singular value is below ``zero_tol``.
    """

    energies: np.ndarray
    modes: np.ndarray
    na: int
    nb: int
    m_z: int
    zero_tol: float
    partition: ModePartition

    @property
    def n_modes(self) -> int:
        return self.na + self.nb


def sublattice_eigenbasis(h: ModeHamiltonian) -> NormalModeBasis:
    verdict = check_sublattice(h)
    if not verdict.ok:
        raise SublatticeViolation(
            f"hopping is not sublattice symmetric ({verdict.status}) at {verdict.witness}",
            verdict.witness,
        )
    part = verdict.partition
    a, b = list(part.a_modes), list(part.b_modes)
    na, nb = len(a), len(b)
    hop = np.asarray(h.hop)
    x, d, yh = np.linalg.svd(hop[np.ix_(a, b)], full_matrices=True)
    y = yh.conj().T
    order = np.argsort(-d, kind="stable")
    d = d[order]
    x_pair, y = x[:, order], y[:, order]

    # gauge: largest component of each y_k real positive, x_k rotated along
    for k in range(nb):
        i = _phase_anchor(y[:, k])
        ph = np.conj(y[i, k]) / abs(y[i, k])
        y[:, k] *= ph
        x_pair[:, k] *= ph
    zero_a = x[:, nb:].copy()
    for l in range(na - nb):
        i = _phase_anchor(zero_a[:, l])
        zero_a[:, l] *= np.conj(zero_a[i, l]) / abs(zero_a[i, l])

    n = na + nb
    modes = np.zeros((n, n), dtype=complex)
    r2 = 1.0 / math.sqrt(2.0)
    modes[np.ix_(a, range(nb))] = r2 * x_pair
    modes[np.ix_(b, range(nb))] = r2 * y
    modes[np.ix_(a, range(nb, 2 * nb))] = r2 * x_pair
    modes[np.ix_(b, range(nb, 2 * nb))] = -r2 * y
    modes[np.ix_(a, range(2 * nb, n))] = zero_a
    energies = np.concatenate([d, -d, np.zeros(na - nb)])

    zero_tol = 1e-10 * max(1.0, float(d.max(initial=0.0)))
    m_z = int((d < zero_tol).sum())
    modes.setflags(write=False)
    energies.setflags(write=False)
    return NormalModeBasis(energies, modes, na, nb, m_z, zero_tol, part)


def _label(s: Sequence[int], n: int) -> np.ndarray:
    s = np.asarray(s, dtype=np.int64)
    if s.shape != (n,) or np.any((s != 0) & (s != 1)):
        raise ValueError(f"label must be a 0/1 vector of length {n}")
    return s


def all_labels(n: int) -> np.ndarray:
    """All ``2^n`` labels, row ``i`` is the binary expansion of ``i`` (s[0] most significant)."""
    idx = np.arange(2**n)
    return ((idx[:, None] >> np.arange(n - 1, -1, -1)[None, :]) & 1).astype(np.int64)


def label_energy_and_number(basis: NormalModeBasis, s: Sequence[int], mu: float = 0.0) -> tuple[float, int]:
    s = _label(s, basis.n_modes)
    return float(s @ (basis.energies + mu)), int(s.sum())


def singlet_count(basis: NormalModeBasis, s: Sequence[int]) -> int:
    s = _label(s, basis.n_modes)
    nb = basis.nb
    return int(np.sum(s[:nb] ^ s[nb : 2 * nb]))


def ground_state_label(
    basis: NormalModeBasis, mu: float = 0.0, zero_policy: ZeroPolicy = "max_entangled"
) -> np.ndarray:
    """Minimal-energy label.

    Modes with ``|e + mu| <= zero_tol`` are free.  ``empty``/``filled`` set
    them all alike; ``max_entangled`` fills exactly one member of every pair
    that can be made to contribute a singlet and leaves A-modes empty.
    """
    e = basis.energies + mu
    tol = basis.zero_tol
    s = (e < -tol).astype(np.int64)
    free = np.abs(e) <= tol
    if zero_policy == "filled":
        s[free] = 1
    elif zero_policy == "max_entangled":
        nb = basis.nb
        for k in range(nb):
            p, q = k, k + nb
            if free[p] and free[q]:
                s[p], s[q] = 1, 0
            elif free[p]:
                s[p] = 1 - s[q]
            elif free[q]:
                s[q] = 1 - s[p]
    elif zero_policy != "empty":
        raise ValueError(f"unknown zero policy {zero_policy!r}")
    return s


def correlation_matrix(
    basis: NormalModeBasis, s: Sequence[int], subset: Optional[Sequence[int]] = None
) -> np.ndarray:
    """``C[i, j] = <f_i^dag f_j> = sum_k s_k conj(psi_k(i)) psi_k(j)``.

    With ``subset`` only that block is formed (rows/columns in subset order).
    """
    s = _label(s, basis.n_modes)
    u = basis.modes if subset is None else basis.modes[list(subset)]
    occ = np.flatnonzero(s)
    u = u[:, occ]
    return u.conj() @ u.T


def _clamp_probabilities(lam: np.ndarray) -> np.ndarray:
    if lam.size and (lam.min() < -CLAMP_WINDOW or lam.max() > 1 + CLAMP_WINDOW):
        raise ValueError(f"occupation {lam.min():.3g}..{lam.max():.3g} outside [0, 1]")
    lam = np.clip(lam, 0.0, 1.0)
    # round-off below the window would otherwise leak into alpha < 1 at order sqrt(eps)
    lam[lam < CLAMP_WINDOW] = 0.0
    lam[lam > 1.0 - CLAMP_WINDOW] = 1.0
    return lam


def binary_renyi(lam: np.ndarray, alpha: float = 1.0) -> float:
    """Sum of two-outcome Renyi entropies of ``(lam, 1 - lam)`` in bits."""
    lam = _clamp_probabilities(np.asarray(lam, dtype=float))
    mu = 1.0 - lam
    if alpha == 1:
        total = -(xlogy(lam, lam) + xlogy(mu, mu)).sum() / math.log(2)
    elif math.isinf(alpha):
        total = -np.log2(np.maximum(lam, mu)).sum()
    elif alpha > 0:
        total = (np.log2(lam**alpha + mu**alpha) / (1.0 - alpha)).sum()
    else:
        raise ValueError("alpha must be positive")
    return float(total) + 0.0  # no negative zero


def renyi_entropy(c: np.ndarray, subset: Sequence[int], alpha: float = 1.0) -> float:
    """Renyi entropy of the Gaussian state with correlation matrix ``c`` on ``subset``."""
    subset = list(subset)
    if not subset:
        return 0.0
    block = np.asarray(c)[np.ix_(subset, subset)]
    return binary_renyi(np.linalg.eigvalsh(block), alpha)


def analytic_entropy_density(mu: float) -> float:
    """Thermodynamic-limit B entropy density of the XX chain ground state."""
    if mu < 0:
        raise ValueError("formula holds for mu >= 0 only")
    if mu > 1:
        return 0.0
    return 2.0 - (2.0 / math.pi) * math.acos(-mu)
