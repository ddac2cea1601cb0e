import numpy as np
import pytest

from critlab.characters import character_group
from critlab.errors import DataError, DomainError
from critlab.satake import (
    a_pi,
    lambda_pi,
    satake_from_character,
    satake_from_csv,
    satake_from_table,
    zeta_spec,
)


def test_character_spec_values():
    z = zeta_spec()
    assert z.degree == 1
    assert z.alpha(7)[0] == 1
    chi4 = satake_from_character(character_group(4)[1])
    assert chi4.alpha(3)[0] == pytest.approx(-1)
    assert chi4.alpha(2)[0] == 0  # ramified p | q


def test_lambda_pi_values(primetable):
    z = zeta_spec()
    assert lambda_pi(z, 8, primetable) == pytest.approx(np.log(2))
    assert lambda_pi(z, 6, primetable) == 0
    chi4 = satake_from_character(character_group(4)[1])
    # chi(3)^2 log 3 = log 3, by direct evaluation
    assert lambda_pi(chi4, 9, primetable) == pytest.approx(np.log(3), abs=1e-12)
    with pytest.raises(DomainError):
        lambda_pi(z, 1, primetable)


def test_a_pi_power_sums():
    spec = satake_from_table(2, "toy", {7: [1j, -1j]})
    assert a_pi(spec, 7, 1) == pytest.approx(0)
    assert a_pi(spec, 7, 2) == pytest.approx(-2)  # (i)^2 + (-i)^2


def test_grc_bound_on_lambda(primetable):
    # |lambda(n)| <= m Lambda(n) for all n <= 1e5, for asserted tables
    lam = primetable.von_mangoldt_array(100_000)
    for spec in (zeta_spec(), satake_from_character(character_group(4)[1])):
        m = spec.degree
        for n in range(2, 100_001, 37):  # stride keeps runtime sane; hits prime powers too
            assert abs(lambda_pi(spec, n, primetable)) <= m * lam[n] + 1e-12
        for n in (4, 8, 9, 25, 27, 32, 243, 1024, 59049, 65536):
            assert abs(lambda_pi(spec, n, primetable)) <= m * lam[n] + 1e-12


def test_table_bounds_enforced():
    with pytest.raises(DomainError):
        satake_from_table(1, "bad", {5: [1.5]}, grc_asserted=True)
    # generic bound p^(1/2 - 1/(m^2+1)) for unasserted tables
    satake_from_table(1, "ok", {5: [5 ** (0.5 - 1 / 2) * 0.99]}, grc_asserted=False)
    with pytest.raises(DomainError):
        satake_from_table(1, "bad2", {5: [5**0.5]}, grc_asserted=False)
    with pytest.raises(DomainError):
        satake_from_table(2, "shape", {5: [1.0]})


def test_csv_import_roundtrip(tmp_path):
    path = tmp_path / "table.csv"
    path.write_text(
        "prime,j,re_alpha,im_alpha\n"
        "2,1,0.6,0.8\n2,2,0.6,-0.8\n"
        "3,1,1.0,0.0\n3,2,-1.0,0.0\n"
    )
    spec = satake_from_csv(str(path), degree=2, label="csvtoy")
    assert spec.alpha(2)[0] == pytest.approx(0.6 + 0.8j)
    assert spec.alpha(3).tolist() == [1, -1]
    with pytest.raises(DataError):
        spec.alpha(5)
    bad = tmp_path / "bad.csv"
    bad.write_text("prime,j,re_alpha,im_alpha\n2,1,1.0,0.0\n")
    with pytest.raises(DataError):
        satake_from_csv(str(bad), degree=2, label="incomplete")
