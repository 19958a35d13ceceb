"""Small linear-algebra helpers shared by several modules."""

from __future__ import annotations

import numpy as np


def canonical_subspace_basis(q: np.ndarray) -> np.ndarray:
    """Basis-independent orthonormal basis of ``span(q)``.

    Greedy: pick the coordinate ``b`` with the largest projector weight
    ``P[b, b]`` (ties go to the smallest index), take ``P e_b`` normalised,
    deflate, repeat.  The result depends only on the projector ``q q^dag``,
    and every vector has a real positive entry at its pivot coordinate.
    Columns are returned sorted by pivot.
    """
    q = np.array(q, copy=True)
    dim, m = q.shape
    vecs, pivots = [], []
    for _ in range(m):
        weight = np.einsum("ij,ij->i", q.conj(), q).real
        top = weight.max()
        b = int(np.flatnonzero(weight >= top * (1 - 1e-9))[0])
        c = q[b].conj() / np.sqrt(weight[b])
        v = q @ c
        vecs.append(v)
        pivots.append(b)
        q = q - np.outer(v, c.conj())
    order = np.argsort(pivots, kind="stable")
    out = np.stack([vecs[i] for i in order], axis=1) if vecs else np.zeros((dim, 0), q.dtype)
    return out
