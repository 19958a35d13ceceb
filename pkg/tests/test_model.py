import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sublattice_entanglement import majorana as mj
from sublattice_entanglement.errors import SublatticeViolation
from sublattice_entanglement.model import (
    MajoranaHamiltonian,
    ModeHamiltonian,
    ModePartition,
    build_chain_xx,
    build_random_bipartite,
    check_majorana_sublattice,
    check_sublattice,
    from_dict,
    from_json,
    to_dict,
    to_json,
    to_majorana,
    with_chemical_potential,
)

J2 = np.array([[0.0, -1.0], [1.0, 0.0]])


def test_xx_open_four_sites():
    h = build_chain_xx(4, "open", 0.5)
    off = np.diag(h.hop, 1)
    np.testing.assert_array_equal(off, 0.5)
    assert np.count_nonzero(h.hop) == 6
    assert h.partition.a_modes == (0, 2)
    assert h.partition.b_modes == (1, 3)


def test_xx_two_sites_spectrum():
    h = build_chain_xx(2)
    np.testing.assert_allclose(np.linalg.eigvalsh(h.single_particle), [-0.5, 0.5], atol=1e-15)


def test_periodic_odd_chain_rejected():
    with pytest.raises(SublatticeViolation):
        build_chain_xx(3, "periodic")


def test_periodic_even_chain_wraps():
    h = build_chain_xx(6, "periodic")
    assert h.hop[0, 5] == 0.5 and h.hop[5, 0] == 0.5
    assert check_sublattice(h).ok


@pytest.mark.parametrize("topology", ["chain_nn", "dense"])
def test_random_builder_is_pure(topology):
    a = build_random_bipartite(6, 6, topology, 7)
    b = build_random_bipartite(6, 6, topology, 7)
    assert a.hop.tobytes() == b.hop.tobytes()
    c = build_random_bipartite(6, 6, topology, 8)
    assert not np.array_equal(a.hop, c.hop)


def test_dense_intra_block_zero():
    h = build_random_bipartite(6, 6, "dense", 1)
    a, b = list(h.partition.a_modes), list(h.partition.b_modes)
    assert np.all(h.hop[np.ix_(a, a)] == 0)
    assert np.all(h.hop[np.ix_(b, b)] == 0)
    assert np.all(h.hop[np.ix_(a, b)] != 0)


@pytest.mark.parametrize(
    "args",
    [(4, 4, "chain_nn"), (5, 4, "chain_nn"), (6, 6, "dense"), (7, 3, "dense"), (3, 1, "dense")],
)
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_chiral_relation_exact(args, seed):
    h = build_random_bipartite(*args, seed)
    sgn = check_sublattice(h).signs
    np.testing.assert_array_equal(sgn[:, None] * h.hop * sgn[None, :], -h.hop)
    np.testing.assert_array_equal(sgn, h.partition.signs())


def test_chain_nn_rejects_unbalanced():
    with pytest.raises(ValueError):
        build_random_bipartite(5, 3, "chain_nn", 0)


def test_chemical_potential_keeps_hopping():
    h = build_chain_xx(6)
    h2 = with_chemical_potential(h, 0.5)
    np.testing.assert_array_equal(h2.hop, h.hop)
    assert check_sublattice(h2).ok
    np.testing.assert_allclose(
        np.linalg.eigvalsh(h2.single_particle), np.linalg.eigvalsh(h.single_particle) + 0.5, atol=1e-14
    )
    h0 = with_chemical_potential(h, 0.0)
    assert h0.mu == 0.0 and h0.partition == h.partition
    np.testing.assert_array_equal(h0.hop, h.hop)


def test_check_open_chain_even_odd():
    h = build_chain_xx(5)
    h = ModeHamiltonian(5, h.hop)  # drop the stored partition, force the search
    v = check_sublattice(h)
    assert v.status == "symmetric"
    assert v.partition.a_modes == (0, 2, 4) and v.partition.b_modes == (1, 3)


def test_same_block_coupling_witness():
    base = build_chain_xx(4)
    hop = np.array(base.hop)
    hop[0, 2] = hop[2, 0] = 0.1
    v = check_sublattice(ModeHamiltonian(4, hop, 0.0, base.partition))
    assert v.status == "violated"
    assert v.witness == (0, 2)


def test_onsite_energy_is_violation():
    hop = np.array(build_chain_xx(4).hop)
    hop[1, 1] = 0.3
    v = check_sublattice(ModeHamiltonian(4, hop))
    assert v.status == "violated"
    assert v.witness == (1, 1)


def test_odd_cycle_has_no_partition():
    hop = np.ones((3, 3)) - np.eye(3)
    v = check_sublattice(ModeHamiltonian(3, hop))
    assert v.status == "no_partition_found"
    assert not v.ok


def test_non_hermitian_rejected():
    hop = np.array([[0, 1.0], [0.5, 0]])
    with pytest.raises(ValueError, match="Hermitian"):
        ModeHamiltonian(2, hop)


def test_partition_orders_blocks():
    p = ModePartition((1,), (0, 2))
    assert p.a_modes == (0, 2) and p.b_modes == (1,)


def test_json_roundtrip_is_one_based():
    h = build_random_bipartite(3, 2, "dense", 4)
    d = json.loads(to_json(h))
    assert sorted(d["partition"]["a"] + d["partition"]["b"]) == [1, 2, 3, 4, 5]
    back = from_json(to_json(h))
    np.testing.assert_array_equal(back.hop, h.hop)
    assert back.partition == h.partition
    assert from_dict(to_dict(h)).mu == h.mu


# --- Majorana image -------------------------------------------------------


def test_single_mode_majorana():
    eps = 0.7
    hm = to_majorana(ModeHamiltonian(1, [[0.0]], eps))
    np.testing.assert_allclose(hm.hm, eps * J2, atol=1e-15)
    assert hm.constant == pytest.approx(-eps / 2)


def test_xx_two_sites_majorana_blocks():
    hm = to_majorana(build_chain_xx(2)).hm
    np.testing.assert_allclose(hm[0:2, 0:2], 0, atol=1e-15)
    np.testing.assert_allclose(hm[0:2, 2:4], 0.5 * J2, atol=1e-15)
    np.testing.assert_allclose(hm[2:4, 0:2], 0.5 * J2, atol=1e-15)


def test_real_hopping_tensor_pattern():
    h = build_random_bipartite(4, 3, "dense", 3)
    hm = to_majorana(h).hm
    np.testing.assert_allclose(hm, np.kron(h.hop.real, J2), atol=1e-14)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 4), st.integers(0, 2))
def test_majorana_symmetry_check_agrees(seed, n_b, extra):
    h = build_random_bipartite(n_b + extra, n_b, "dense", seed)
    ferm = check_sublattice(h)
    maj = check_majorana_sublattice(to_majorana(h))
    assert ferm.ok and maj.ok
    assert maj.partition == ferm.partition.to_majorana()


def test_complex_hopping_tensor_pattern():
    rng = np.random.default_rng(5)
    hab = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    hop = np.zeros((4, 4), dtype=complex)
    hop[:2, 2:] = hab
    hop[2:, :2] = hab.conj().T
    h = ModeHamiltonian(4, hop)
    hm = to_majorana(h).hm
    np.testing.assert_allclose(hm, np.kron(hop.imag, np.eye(2)) + np.kron(hop.real, J2), atol=1e-14)
    assert mj.check_number_conserving(hm) < 1e-12


def test_pairing_breaking_bipartition_drops_partition():
    h = build_chain_xx(4)
    delta = np.zeros((4, 4))
    delta[0, 2], delta[2, 0] = 0.3, -0.3
    assert to_majorana(h, delta).partition is None
    ok = np.zeros((4, 4))
    ok[0, 1], ok[1, 0] = 0.3, -0.3
    assert to_majorana(h, ok).partition is not None


def test_majorana_hamiltonian_rejects_symmetric():
    with pytest.raises(ValueError):
        MajoranaHamiltonian(2, np.eye(2))
