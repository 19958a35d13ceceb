import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sublattice_entanglement import freefermion as ff
from sublattice_entanglement.errors import SublatticeViolation
from sublattice_entanglement.model import (
    ModeHamiltonian,
    ModePartition,
    build_chain_xx,
    build_random_bipartite,
    with_chemical_potential,
)

ALPHAS = (0.5, 1.0, 2.0, math.inf)

models = st.builds(
    lambda seed, n_b, extra, dense: build_random_bipartite(
        n_b + extra, n_b, "dense" if dense or extra > 1 else "chain_nn", seed
    ),
    st.integers(0, 2**32 - 1),
    st.integers(1, 4),
    st.integers(0, 2),
    st.booleans(),
)


def h2_oracle(p):
    p = mpmath.mpf(p)
    return float(-(p * mpmath.log(p, 2) + (1 - p) * mpmath.log(1 - p, 2)))


def test_xx_two_sites_basis():
    b = ff.sublattice_eigenbasis(build_chain_xx(2))
    np.testing.assert_allclose(b.energies, [0.5, -0.5], atol=1e-15)
    r = 1 / math.sqrt(2)
    np.testing.assert_allclose(np.abs(b.modes[:, 0] @ np.array([r, r])), 1, atol=1e-14)
    np.testing.assert_allclose(np.abs(b.modes[:, 1] @ np.array([r, -r])), 1, atol=1e-14)


def test_xx_four_sites_spectrum():
    b = ff.sublattice_eigenbasis(build_chain_xx(4))
    c1, c2 = math.cos(math.pi / 5), math.cos(2 * math.pi / 5)
    np.testing.assert_allclose(b.energies, [c1, c2, -c1, -c2], atol=1e-14)
    assert b.m_z == 0


def test_non_symmetric_rejected():
    hop = np.array(build_chain_xx(4).hop)
    hop[0, 2] = hop[2, 0] = 1.0
    with pytest.raises(SublatticeViolation):
        ff.sublattice_eigenbasis(ModeHamiltonian(4, hop, 0.0, build_chain_xx(4).partition))


@settings(max_examples=40, deadline=None)
@given(models)
def test_basis_invariants(h):
    b = ff.sublattice_eigenbasis(h)
    u, e = b.modes, b.energies
    a_idx, b_idx = list(b.partition.a_modes), list(b.partition.b_modes)
    scale = max(1.0, np.abs(h.hop).max())
    np.testing.assert_allclose(u.conj().T @ u, np.eye(b.n_modes), atol=1e-10)
    np.testing.assert_allclose(h.hop @ u, u * e, atol=1e-10 * scale)
    nb = b.nb
    np.testing.assert_array_equal(e[nb : 2 * nb], -e[:nb])
    np.testing.assert_allclose(u[np.ix_(b_idx, range(2 * nb, b.n_modes))], 0, atol=1e-15)
    assert np.all(np.abs(e[2 * nb :]) <= b.zero_tol)
    np.testing.assert_array_equal(u[np.ix_(b_idx, range(nb, 2 * nb))], -u[np.ix_(b_idx, range(nb))])
    np.testing.assert_array_equal(u[np.ix_(a_idx, range(nb, 2 * nb))], u[np.ix_(a_idx, range(nb))])


def test_square_full_rank_has_no_zero_modes():
    b = ff.sublattice_eigenbasis(build_random_bipartite(5, 5, "dense", 9))
    assert b.m_z == 0 and b.na == b.nb == 5
    assert np.all(np.abs(b.energies) > 1e-3)


def test_spurious_zero_modes_counted():
    hab = np.outer([1.0, 2.0, 0.5], [1.0, -1.0, 3.0])  # rank one
    hop = np.zeros((6, 6))
    hop[:3, 3:] = hab
    hop[3:, :3] = hab.T
    h = ModeHamiltonian(6, hop, 0.0, ModePartition((0, 1, 2), (3, 4, 5)))
    b = ff.sublattice_eigenbasis(h)
    assert b.m_z == 2
    s = ff.ground_state_label(b, 0.0, "max_entangled")
    c = ff.correlation_matrix(b, s)
    assert ff.renyi_entropy(c, b.partition.b_modes) == pytest.approx(3.0, abs=1e-8)


def test_label_energy_examples():
    b = ff.sublattice_eigenbasis(build_chain_xx(2))
    assert ff.label_energy_and_number(b, [0, 0]) == (0.0, 0)
    e, n = ff.label_energy_and_number(b, [0, 1])
    assert e == pytest.approx(-0.5) and n == 1
    e, n = ff.label_energy_and_number(b, [1, 1])
    assert e == pytest.approx(0.0, abs=1e-15) and n == 2


@pytest.mark.parametrize("s, expected", [((0, 0, 0, 0), 0), ((1, 1, 0, 0), 2), ((1, 1, 1, 1), 0), ((1, 0, 0, 1), 2), ((1, 0, 1, 0), 0), ((1, 0, 1, 1), 1)])
def test_singlet_count_examples(s, expected):
    b = ff.sublattice_eigenbasis(build_chain_xx(4))
    assert ff.singlet_count(b, s) == expected


def test_bad_label_rejected():
    b = ff.sublattice_eigenbasis(build_chain_xx(4))
    with pytest.raises(ValueError):
        ff.singlet_count(b, [1, 2, 0, 0])
    with pytest.raises(ValueError):
        ff.singlet_count(b, [1, 0, 0])


def test_all_labels_order():
    labels = ff.all_labels(3)
    assert labels.shape == (8, 3)
    np.testing.assert_array_equal(labels[1], [0, 0, 1])
    np.testing.assert_array_equal(labels[4], [1, 0, 0])


def test_ground_state_xx_four():
    b = ff.sublattice_eigenbasis(build_chain_xx(4))
    s = ff.ground_state_label(b, 0.0, "max_entangled")
    np.testing.assert_array_equal(s, [0, 0, 1, 1])
    assert ff.singlet_count(b, s) == 2


def test_ground_state_large_mu_is_vacuum():
    b = ff.sublattice_eigenbasis(build_chain_xx(8))
    s = ff.ground_state_label(b, 2.0)
    assert s.sum() == 0
    assert ff.renyi_entropy(ff.correlation_matrix(b, s), b.partition.b_modes) == 0.0


@pytest.mark.parametrize("seed", range(5))
def test_policies_agree_without_zero_modes(seed):
    b = ff.sublattice_eigenbasis(build_random_bipartite(4, 4, "chain_nn", seed))
    labels = [ff.ground_state_label(b, 0.0, p) for p in ("max_entangled", "empty", "filled")]
    for s in labels[1:]:
        np.testing.assert_array_equal(s, labels[0])


def test_policies_differ_on_a_modes():
    b = ff.sublattice_eigenbasis(build_random_bipartite(5, 2, "dense", 3))
    empty = ff.ground_state_label(b, 0.0, "empty")
    filled = ff.ground_state_label(b, 0.0, "filled")
    assert filled.sum() - empty.sum() == 3
    for s in (empty, filled, ff.ground_state_label(b, 0.0, "max_entangled")):
        assert ff.singlet_count(b, s) == 2
    with pytest.raises(ValueError):
        ff.ground_state_label(b, 0.0, "half")


def test_correlation_examples():
    b = ff.sublattice_eigenbasis(build_chain_xx(2))
    np.testing.assert_array_equal(ff.correlation_matrix(b, [0, 0]), 0)
    np.testing.assert_allclose(ff.correlation_matrix(b, [1, 1]), np.eye(2), atol=1e-15)
    c = ff.correlation_matrix(b, [0, 1])
    np.testing.assert_allclose(np.abs(c), 0.5, atol=1e-15)
    np.testing.assert_allclose(c.diagonal(), 0.5, atol=1e-15)


@settings(max_examples=25, deadline=None)
@given(models, st.data())
def test_correlation_is_projector(h, data):
    b = ff.sublattice_eigenbasis(h)
    s = np.array(data.draw(st.lists(st.integers(0, 1), min_size=b.n_modes, max_size=b.n_modes)))
    c = ff.correlation_matrix(b, s)
    np.testing.assert_allclose(c, c.conj().T, atol=1e-14)
    np.testing.assert_allclose(c @ c, c, atol=1e-8)
    assert np.trace(c).real == pytest.approx(s.sum(), abs=1e-10)
    sub = [2, 0] if b.n_modes > 2 else [1]
    np.testing.assert_allclose(ff.correlation_matrix(b, s, sub), c[np.ix_(sub, sub)], atol=1e-15)


@settings(max_examples=25, deadline=None)
@given(models)
def test_quantization_all_labels(h):
    b = ff.sublattice_eigenbasis(h)
    bm = list(b.partition.b_modes)
    for s in ff.all_labels(b.n_modes):
        c = ff.correlation_matrix(b, s)
        lam = np.linalg.eigvalsh(c[np.ix_(bm, bm)])
        assert np.min(np.abs(lam[:, None] - np.array([0.0, 0.5, 1.0])), axis=1).max() < 1e-8
        n = ff.singlet_count(b, s)
        for alpha in ALPHAS:
            assert abs(ff.renyi_entropy(c, bm, alpha) - n) < 1e-8


@settings(max_examples=25, deadline=None)
@given(models)
def test_max_entangled_ground_state(h):
    b = ff.sublattice_eigenbasis(h)
    s = ff.ground_state_label(b, 0.0, "max_entangled")
    c = ff.correlation_matrix(b, s)
    bm = list(b.partition.b_modes)
    assert ff.renyi_entropy(c, bm) == pytest.approx(b.nb, abs=1e-8)
    block = c[np.ix_(bm, bm)]
    assert np.abs(block - np.diag(block.diagonal())).max(initial=0.0) < 1e-8


def test_every_minimal_label_is_maximal_when_regular():
    h = build_random_bipartite(4, 4, "dense", 11)
    b = ff.sublattice_eigenbasis(h)
    labels = ff.all_labels(8)
    energies = np.array([ff.label_energy_and_number(b, s)[0] for s in labels])
    ground = labels[np.abs(energies - energies.min()) < 1e-10]
    assert len(ground) == 1 and b.m_z == 0
    assert all(ff.singlet_count(b, s) == 4 for s in ground)


def test_chemical_potential_inert():
    h = build_chain_xx(10, "periodic")
    b0 = ff.sublattice_eigenbasis(h)
    b1 = ff.sublattice_eigenbasis(with_chemical_potential(h, 0.37))
    np.testing.assert_array_equal(b0.modes, b1.modes)
    s = ff.all_labels(10)[123]
    e0, _ = ff.label_energy_and_number(b0, s, 0.0)
    e1, n = ff.label_energy_and_number(b1, s, 0.37)
    assert e1 == pytest.approx(e0 + 0.37 * n)


def test_binary_entropy_values():
    assert ff.binary_renyi(np.array([0.5])) == 1.0
    assert ff.binary_renyi(np.array([0.8])) == pytest.approx(h2_oracle("0.8"), abs=1e-14)
    assert round(ff.binary_renyi(np.array([0.8])), 4) == 0.7219
    for alpha in ALPHAS:
        assert ff.binary_renyi(np.array([0.5, 0.0, 1.0]), alpha) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("alpha", [0.5, 2.0, 3.0])
def test_binary_renyi_general(alpha):
    p = 0.3
    expected = math.log2(p**alpha + (1 - p) ** alpha) / (1 - alpha)
    assert ff.binary_renyi(np.array([p]), alpha) == pytest.approx(expected, rel=1e-14)
    assert ff.binary_renyi(np.array([p]), math.inf) == pytest.approx(-math.log2(0.7), rel=1e-14)


def test_clamp_window():
    assert ff.binary_renyi(np.array([-5e-13, 1 + 5e-13])) == 0.0
    with pytest.raises(ValueError):
        ff.binary_renyi(np.array([-1e-9]))
    with pytest.raises(ValueError):
        ff.binary_renyi(np.array([0.5]), 0.0)


@pytest.mark.parametrize("mu, expected", [(0.0, 1.0), (1.0, 0.0), (0.5, 2 / 3), (1.5, 0.0)])
def test_analytic_density(mu, expected):
    assert ff.analytic_entropy_density(mu) == pytest.approx(expected, abs=1e-15)


def test_analytic_density_negative_mu():
    with pytest.raises(ValueError):
        ff.analytic_entropy_density(-0.1)


def test_empty_subset_entropy():
    b = ff.sublattice_eigenbasis(build_chain_xx(2))
    assert ff.renyi_entropy(ff.correlation_matrix(b, [0, 1]), []) == 0.0
