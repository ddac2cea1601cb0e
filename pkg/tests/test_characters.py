from math import gcd

import numpy as np
import pytest

from critlab.characters import character_group, euler_phi, principal_character
from critlab.errors import DomainError

MODULI = [1, 3, 4, 5, 8, 12, 24, 35]


def test_q1_trivial():
    (chi,) = character_group(1)
    assert chi.is_principal
    for n in (1, 2, 17, -3):
        assert chi(n) == 1


def test_q4_nonprincipal():
    group = character_group(4)
    assert len(group) == 2
    assert group[0].is_principal and not group[1].is_principal
    assert group[1](3) == pytest.approx(-1)
    assert group[1](2) == 0


def test_q5_values_at_2():
    group = character_group(5)
    assert len(group) == 4
    vals = sorted(np.round(np.angle([chi(2) for chi in group]) / (np.pi / 2)).astype(int))
    assert vals == [-1, 0, 1, 2]  # 1, i, -1, -i in some order


@pytest.mark.parametrize("q", MODULI)
def test_group_size_and_uniqueness(q):
    group = character_group(q)
    assert len(group) == euler_phi(q)
    assert sum(chi.is_principal for chi in group) == 1
    tables = {tuple(np.round(chi.values, 9)) for chi in group}
    assert len(tables) == len(group)


@pytest.mark.parametrize("q", MODULI)
def test_closed_under_multiplication(q):
    group = character_group(q)
    tables = {tuple(np.round(chi.values, 8)) for chi in group}
    for c1 in group:
        for c2 in group:
            prod = c1.values * c2.values
            assert tuple(np.round(prod, 8)) in tables


@pytest.mark.parametrize("q", MODULI)
def test_support_and_multiplicativity(q):
    for chi in character_group(q):
        assert chi(1) == 1
        for n in range(q):
            if gcd(n, q) > 1:
                assert chi(n) == 0
            else:
                assert abs(abs(chi(n)) - 1) < 1e-12  # root of unity modulus
        for m in range(1, min(q, 12) + 1):
            for n in range(1, min(q, 12) + 1):
                assert chi(m * n) == pytest.approx(chi(m) * chi(n), abs=1e-12)


def test_orthogonality_all_q_to_100():
    # sum_a chi(a) conj(chi'(a)) = phi(q) [chi = chi'], exactly to 1e-12
    for q in range(1, 101):
        group = character_group(q)
        V = np.vstack([chi.values for chi in group])
        gram = V @ np.conj(V.T)
        expected = euler_phi(q) * np.eye(len(group))
        assert np.max(np.abs(gram - expected)) < 1e-12


def test_parity_and_primitivity():
    g4 = character_group(4)
    assert g4[1].parity == 1 and g4[1].is_primitive
    assert principal_character(4).parity == 0
    # mod 8: the character agreeing with the mod-4 one is imprimitive
    g8 = character_group(8)
    lifted = [chi for chi in g8 if not chi.is_principal and chi.induced_modulus(4)]
    assert len(lifted) == 1 and not lifted[0].is_primitive
    prim = [chi for chi in g8 if chi.is_primitive]
    assert len(prim) == 2  # the two conductor-8 characters


def test_gauss_sum_chi4():
    chi = character_group(4)[1]
    assert chi.gauss_sum() == pytest.approx(2j, abs=1e-12)


def test_bad_modulus():
    with pytest.raises(DomainError):
        character_group(0)
