"""Quadratic fermionic Hamiltonians with sublattice symmetry.

Two representations are provided:

* :class:`ModeHamiltonian` -- a number-conserving model
  ``H = sum_ij hop[i, j] f_i^dag f_j + mu * N`` on ``N`` fermionic modes,
  optionally carrying a bipartition of the modes into sublattices A and B.
* :class:`MajoranaHamiltonian` -- ``H_M = (i/4) w^T hm w`` with ``hm`` real
  antisymmetric on ``2N`` Majorana operators
  ``w[2j] = f_j^dag + f_j`` and ``w[2j+1] = -i (f_j^dag - f_j)``.

All indices in the Python API are 0-based.  The JSON form written by
:func:`to_json` uses 1-based indices.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Literal, Optional, Sequence

import numpy as np

from .errors import SublatticeViolation

HERMITIAN_RTOL = 1e-12

Boundary = Literal["open", "periodic"]
Topology = Literal["chain_nn", "dense"]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def _as_index_tuple(idx: Sequence[int]) -> tuple[int, ...]:
    return tuple(sorted(int(i) for i in idx))


@dataclass(frozen=True)
class ModePartition:
    """Bipartition of fermionic modes; swapped on construction so ``|A| >= |B|``."""

    a_modes: tuple[int, ...]
    b_modes: tuple[int, ...]

    def __post_init__(self):
        a, b = _as_index_tuple(self.a_modes), _as_index_tuple(self.b_modes)
        if set(a) & set(b):
            raise ValueError("partition blocks overlap")
        if len(a) < len(b):
            a, b = b, a
        object.__setattr__(self, "a_modes", a)
        object.__setattr__(self, "b_modes", b)

    @property
    def n_modes(self) -> int:
        return len(self.a_modes) + len(self.b_modes)

    def signs(self) -> np.ndarray:
        """Diagonal of the chiral operator S (+1 on A, -1 on B)."""
        s = np.ones(self.n_modes)
        s[list(self.b_modes)] = -1.0
        return s

    def to_majorana(self) -> "MajoranaPartition":
        a = [m for j in self.a_modes for m in (2 * j, 2 * j + 1)]
        b = [m for j in self.b_modes for m in (2 * j, 2 * j + 1)]
        return MajoranaPartition(tuple(a), tuple(b))


@dataclass(frozen=True)
class MajoranaPartition:
    """Bipartition of Majorana indices into even-sized blocks, ``|A_M| >= |B_M|``."""

    a_idx: tuple[int, ...]
    b_idx: tuple[int, ...]

    def __post_init__(self):
        a, b = _as_index_tuple(self.a_idx), _as_index_tuple(self.b_idx)
        if set(a) & set(b):
            raise ValueError("partition blocks overlap")
        if len(a) % 2 or len(b) % 2:
            raise ValueError("Majorana partition blocks must have even size")
        if len(a) < len(b):
            a, b = b, a
        object.__setattr__(self, "a_idx", a)
        object.__setattr__(self, "b_idx", b)

    @property
    def n_b_modes(self) -> int:
        """Number of fermionic modes carried by block B."""
        return len(self.b_idx) // 2

    def mode_aligned(self) -> bool:
        """True if both Majoranas of every fermionic mode share a block."""
        b = set(self.b_idx)
        return all((2 * (m // 2) in b) == (2 * (m // 2) + 1 in b) for m in self.a_idx + self.b_idx)

    def to_modes(self) -> ModePartition:
        if not self.mode_aligned():
            raise ValueError("Majorana partition does not split along fermionic modes")
        return ModePartition(
            tuple(sorted({m // 2 for m in self.a_idx})),
            tuple(sorted({m // 2 for m in self.b_idx})),
        )


@dataclass(frozen=True, eq=False)
class ModeHamiltonian:
    """Number-conserving quadratic Hamiltonian ``sum hop_ij f_i^dag f_j + mu N``.

    The chemical potential is kept apart from ``hop`` so the sublattice
    structure of the hopping part stays checkable.  ``hop`` must be Hermitian
    to ``1e-12 * max(1, max|hop|)``; violating input is rejected rather than
    symmetrised.
    """

    n_modes: int
    hop: np.ndarray
    mu: float = 0.0
    partition: Optional[ModePartition] = None

    def __post_init__(self):
        hop = np.asarray(self.hop, dtype=complex)
        n = int(self.n_modes)
        if n < 1 or hop.shape != (n, n):
            raise ValueError(f"hop must be {n}x{n}, got {hop.shape}")
        scale = max(1.0, float(np.abs(hop).max(initial=0.0)))
        if np.abs(hop - hop.conj().T).max() > HERMITIAN_RTOL * scale:
            raise ValueError("hop is not Hermitian")
        if self.partition is not None and sorted(
            self.partition.a_modes + self.partition.b_modes
        ) != list(range(n)):
            raise ValueError("partition does not cover all modes exactly once")
        object.__setattr__(self, "n_modes", n)
        object.__setattr__(self, "hop", _frozen(hop))
        object.__setattr__(self, "mu", float(self.mu))

    @property
    def single_particle(self) -> np.ndarray:
        """Full single-particle matrix ``hop + mu * 1``."""
        return self.hop + self.mu * np.eye(self.n_modes)


@dataclass(frozen=True, eq=False)
class MajoranaHamiltonian:
    """``H_M = (i/4) w^T hm w`` with ``hm`` real antisymmetric.

    ``constant`` records the additive shift relative to the second-quantized
    Hamiltonian it came from: ``(i/4) w^T hm w = H + constant``.
    ``partition`` is ``None`` when no sublattice structure is asserted.
    """

    n_majorana: int
    hm: np.ndarray
    partition: Optional[MajoranaPartition] = None
    constant: float = 0.0

    def __post_init__(self):
        hm = np.asarray(self.hm)
        if np.iscomplexobj(hm):
            if np.abs(hm.imag).max(initial=0.0) > HERMITIAN_RTOL * max(1.0, np.abs(hm).max()):
                raise ValueError("hm must be real")
            hm = hm.real
        hm = np.asarray(hm, dtype=float)
        n = int(self.n_majorana)
        if n % 2 or hm.shape != (n, n):
            raise ValueError(f"hm must be an even-dimensional {n}x{n} matrix")
        scale = max(1.0, float(np.abs(hm).max(initial=0.0)))
        if np.abs(hm + hm.T).max(initial=0.0) > HERMITIAN_RTOL * scale:
            raise ValueError("hm is not antisymmetric")
        if self.partition is not None and sorted(
            self.partition.a_idx + self.partition.b_idx
        ) != list(range(n)):
            raise ValueError("partition does not cover all Majorana indices")
        object.__setattr__(self, "hm", _frozen(0.5 * (hm - hm.T)))
        object.__setattr__(self, "n_majorana", n)

    @property
    def n_modes(self) -> int:
        return self.n_majorana // 2


# --------------------------------------------------------------------------
# builders
# --------------------------------------------------------------------------


def build_chain_xx(n: int, boundary: Boundary = "open", amplitude: float = 0.5) -> ModeHamiltonian:
    """Nearest-neighbour hopping chain with uniform real amplitude.

    Even (0-based) sites form block A, odd sites block B.  A periodic chain
    needs even ``n`` to stay bipartite.
    """
    if n < 2:
        raise ValueError("chain needs n >= 2")
    if boundary not in ("open", "periodic"):
        raise ValueError(f"unknown boundary {boundary!r}")
    if boundary == "periodic" and n % 2:
        raise SublatticeViolation(
            f"periodic chain with odd n={n} is not bipartite", witness=(n - 1, 0)
        )
    hop = np.zeros((n, n))
    for j in range(n - 1):
        hop[j, j + 1] = hop[j + 1, j] = amplitude
    if boundary == "periodic" and n > 2:
        hop[n - 1, 0] = hop[0, n - 1] = amplitude
    part = ModePartition(tuple(range(0, n, 2)), tuple(range(1, n, 2)))
    return ModeHamiltonian(n, hop, 0.0, part)


def build_random_bipartite(
    n_a: int, n_b: int, topology: Topology = "chain_nn", seed: int = 0
) -> ModeHamiltonian:
    """Random real hopping between sublattices, i.i.d. standard normal.

    ``chain_nn`` couples neighbours on an open chain whose even sites are A,
    so it needs ``n_a - n_b <= 1``.  ``dense`` fills the whole A-B block with
    A = modes ``0..n_a-1``.  Uses ``numpy.random.Generator(PCG64(seed))``.
    """
    if not n_a >= n_b >= 1:
        raise ValueError("need n_a >= n_b >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    n = n_a + n_b
    hop = np.zeros((n, n))
    if topology == "chain_nn":
        if n_a - n_b > 1:
            raise ValueError("an alternating chain needs n_a - n_b <= 1")
        t = rng.standard_normal(n - 1)
        for j in range(n - 1):
            hop[j, j + 1] = hop[j + 1, j] = t[j]
        part = ModePartition(tuple(range(0, n, 2)), tuple(range(1, n, 2)))
    elif topology == "dense":
        block = rng.standard_normal((n_a, n_b))
        hop[:n_a, n_a:] = block
        hop[n_a:, :n_a] = block.T
        part = ModePartition(tuple(range(n_a)), tuple(range(n_a, n)))
    else:
        raise ValueError(f"unknown topology {topology!r}")
    return ModeHamiltonian(n, hop, 0.0, part)


def with_chemical_potential(h: ModeHamiltonian, mu: float) -> ModeHamiltonian:
    return replace(h, mu=float(mu))


# --------------------------------------------------------------------------
# symmetry checks
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SublatticeVerdict:
    """Outcome of a sublattice check.

    ``status`` is one of ``"symmetric"``, ``"violated"``,
    ``"no_partition_found"``.  On success ``signs`` is the diagonal of S with
    ``S hop S = -hop``; on failure ``witness`` is an offending index pair.
    """

    status: str
    partition: Optional[ModePartition | MajoranaPartition] = None
    witness: Optional[tuple[int, int]] = None
    signs: Optional[np.ndarray] = field(default=None, compare=False)

    @property
    def ok(self) -> bool:
        return self.status == "symmetric"


def _coupling_tol(m: np.ndarray) -> float:
    return HERMITIAN_RTOL * max(1.0, float(np.abs(m).max(initial=0.0)))


def _same_block_witness(m: np.ndarray, block_of: np.ndarray) -> Optional[tuple[int, int]]:
    nz = np.abs(m) > _coupling_tol(m)
    bad = nz & (block_of[:, None] == block_of[None, :])
    if not bad.any():
        return None
    i, j = np.argwhere(np.triu(bad | bad.T))[0]
    return int(i), int(j)


def _two_color(m: np.ndarray) -> tuple[Optional[np.ndarray], Optional[tuple[int, int]]]:
    """BFS 2-colouring of the graph of nonzero couplings."""
    n = m.shape[0]
    nz = np.abs(m) > _coupling_tol(m)
    diag = np.flatnonzero(np.diag(nz))
    if diag.size:
        return None, (int(diag[0]), int(diag[0]))
    nbrs = [np.flatnonzero(nz[i] | nz[:, i]) for i in range(n)]
    color = np.full(n, -1)
    for root in range(n):
        if color[root] >= 0:
            continue
        color[root] = 0
        queue = deque([root])
        while queue:
            i = queue.popleft()
            for j in nbrs[i]:
                if color[j] < 0:
                    color[j] = 1 - color[i]
                    queue.append(j)
                elif color[j] == color[i]:
                    return None, (min(i, int(j)), max(i, int(j)))
    return color, None


def _components(m: np.ndarray, color: np.ndarray) -> list[np.ndarray]:
    nz = np.abs(m) > _coupling_tol(m)
    n = m.shape[0]
    seen = np.zeros(n, bool)
    comps = []
    for root in range(n):
        if seen[root]:
            continue
        stack, comp = [root], []
        seen[root] = True
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in np.flatnonzero(nz[i] | nz[:, i]):
                if not seen[j]:
                    seen[j] = True
                    stack.append(int(j))
        comps.append(np.array(sorted(comp)))
    return comps


def check_sublattice(h: ModeHamiltonian) -> SublatticeVerdict:
    """Verify the stored partition, or 2-colour the hopping graph if none.

    Only ``hop`` is inspected; ``mu`` is exempt.  A diagonal entry can never
    be sublattice symmetric and is reported as ``violated`` in both modes.
    """
    hop = np.asarray(h.hop)
    if h.partition is not None:
        sgn = h.partition.signs()
        w = _same_block_witness(hop, (sgn < 0).astype(int))
        if w is not None:
            return SublatticeVerdict("violated", h.partition, w)
        return SublatticeVerdict("symmetric", h.partition, None, sgn)
    color, w = _two_color(hop)
    if color is None:
        status = "violated" if w[0] == w[1] else "no_partition_found"
        return SublatticeVerdict(status, None, w)
    part = ModePartition(tuple(np.flatnonzero(color == 0)), tuple(np.flatnonzero(color == 1)))
    return SublatticeVerdict("symmetric", part, None, part.signs())


def check_majorana_sublattice(hm: MajoranaHamiltonian) -> SublatticeVerdict:
    """Generalized sublattice check on the Majorana level.

    Without a stored partition a 2-colouring is searched; connected
    components are flipped as needed to make both blocks even.
    """
    m = np.asarray(hm.hm)
    if hm.partition is not None:
        block = np.zeros(hm.n_majorana, int)
        block[list(hm.partition.b_idx)] = 1
        w = _same_block_witness(m, block)
        if w is not None:
            return SublatticeVerdict("violated", hm.partition, w)
        return SublatticeVerdict("symmetric", hm.partition, None, 1.0 - 2.0 * block)
    color, w = _two_color(m)
    if color is None:
        status = "violated" if w[0] == w[1] else "no_partition_found"
        return SublatticeVerdict(status, None, w)
    if int((color == 0).sum()) % 2:
        # total is even, so some component has odd size; flipping it fixes parity
        for comp in _components(m, color):
            if comp.size % 2:
                color[comp] = 1 - color[comp]
                break
    part = MajoranaPartition(tuple(np.flatnonzero(color == 0)), tuple(np.flatnonzero(color == 1)))
    block = np.zeros(hm.n_majorana, int)
    block[list(part.b_idx)] = 1
    return SublatticeVerdict("symmetric", part, None, 1.0 - 2.0 * block)


# --------------------------------------------------------------------------
# Majorana map
# --------------------------------------------------------------------------


def _creation_coefficients(n: int) -> np.ndarray:
    """Rows give f_j^dag = sum_a P[j, a] w_a."""
    p = np.zeros((n, 2 * n), dtype=complex)
    for j in range(n):
        p[j, 2 * j] = 0.5
        p[j, 2 * j + 1] = 0.5j
    return p


def to_majorana(h: ModeHamiltonian, pairing: Optional[np.ndarray] = None) -> MajoranaHamiltonian:
    """Rewrite ``h`` (plus optional pairing) as ``(i/4) w^T hm w``.

    The pairing term is ``(1/2) sum_ij (pairing[i, j] f_i^dag f_j^dag + h.c.)``
    with ``pairing`` antisymmetric.  A nonzero ``mu`` puts ``J2`` blocks on
    the diagonal, so the Majorana partition is dropped in that case.
    """
    n = h.n_modes
    p = _creation_coefficients(n)
    q = p.conj()
    coeff = p.T @ h.single_particle @ q
    if pairing is not None:
        delta = np.asarray(pairing, dtype=complex)
        if delta.shape != (n, n):
            raise ValueError("pairing has the wrong shape")
        if np.abs(delta + delta.T).max() > _coupling_tol(delta):
            raise ValueError("pairing must be antisymmetric")
        coeff = coeff + 0.5 * (p.T @ delta @ p + q.T @ delta.conj().T @ q)
    # w_a w_b = [w_a, w_b]/2 + delta_ab, so only the antisymmetric part survives
    hm = -2j * (coeff - coeff.T)
    constant = -float(np.trace(coeff).real)
    part = None
    if h.partition is not None and h.mu == 0.0:
        part = h.partition.to_majorana()
        if pairing is not None and _same_block_witness(
            np.asarray(pairing), (h.partition.signs() < 0).astype(int)
        ) is not None:
            part = None
    return MajoranaHamiltonian(2 * n, hm, part, constant)


# --------------------------------------------------------------------------
# serialisation
# --------------------------------------------------------------------------


def to_dict(h: ModeHamiltonian) -> dict:
    hop = np.asarray(h.hop)
    out = {
        "n": h.n_modes,
        "hop_real": hop.real.tolist(),
        "hop_imag": hop.imag.tolist(),
        "mu": h.mu,
        "partition": None,
    }
    if h.partition is not None:
        out["partition"] = {
            "a": [i + 1 for i in h.partition.a_modes],
            "b": [i + 1 for i in h.partition.b_modes],
        }
    return out


def from_dict(d: dict) -> ModeHamiltonian:
    hop = np.asarray(d["hop_real"], dtype=float) + 1j * np.asarray(d["hop_imag"], dtype=float)
    part = d.get("partition")
    partition = None
    if part:
        partition = ModePartition(tuple(i - 1 for i in part["a"]), tuple(i - 1 for i in part["b"]))
    return ModeHamiltonian(int(d["n"]), hop, float(d.get("mu", 0.0)), partition)


def to_json(h: ModeHamiltonian) -> str:
    return json.dumps(to_dict(h))


def from_json(text: str) -> ModeHamiltonian:
    return from_dict(json.loads(text))
