from math import exp, log, sqrt

import numpy as np
import pytest
from scipy.special import ndtr

from critlab.deviations import (
    TailGrid,
    empirical_phi,
    fubini_check,
    joint_tail_ratio,
    large_deviation_profile,
    mass_concentration_check,
    selberg_clt_test,
)
from critlab.errors import DomainError, ResolutionError, StatisticsError
from critlab.lfunc import dirichlet_id, zeta_id


def synthetic_tg(rows, T=1e5):
    return TailGrid.from_samples(rows, T)


# ------------------------------------------------------------------ phi


def test_phi_trivials(rng):
    tg = synthetic_tg(rng.standard_normal(5000))
    assert empirical_phi(tg, [-1e3]) == 1.0
    # partially -inf thresholds collapse to the remaining marginals
    tg2 = synthetic_tg(np.vstack([rng.standard_normal(5000), rng.standard_normal(5000)]))
    marginal = empirical_phi(synthetic_tg(tg2.samples[1] * tg2.normalization), [0.3])
    assert empirical_phi(tg2, [-np.inf, 0.3]) == pytest.approx(marginal)


def test_phi_monotone(rng):
    tg = synthetic_tg(rng.standard_normal(20000))
    vals = [empirical_phi(tg, [v]) for v in np.linspace(-3, 3, 25)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_phi_zeta_gaussian_band(shared_cache):
    tg = TailGrid.build([zeta_id()], 1e6, cache=shared_cache)
    phi = empirical_phi(tg, [1.0])
    gauss = 1.0 - ndtr(1.0)  # 0.1587
    assert 0.3 * gauss <= phi <= 3.0 * gauss


def test_tailgrid_counts_and_csv(tmp_path, rng):
    tg = synthetic_tg(np.vstack([rng.standard_normal(400), rng.standard_normal(400)]))
    path = tmp_path / "tails.csv"
    tg.to_csv(str(path), v_grid=np.array([-1.0, 0.0, 1.0]))
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "V_1,V_2,phi,count"
    assert len(lines) == 1 + 9
    with pytest.raises(DomainError):
        tg.tail_count([0.0])  # wrong arity


# ------------------------------------------------------------------ CLT


def test_clt_synthetic_self_test(rng):
    T = 1e6
    norm = sqrt(0.5 * log(log(T)))
    sample = rng.standard_normal(100_000) * norm

    class G:
        values = sample
        t1 = T

    rep = selberg_clt_test(G())
    assert rep.ks_distance < 0.01
    assert abs(rep.normalized_mean) < 0.02
    assert rep.sample_variance == pytest.approx(norm**2, rel=0.05)


@pytest.mark.parametrize("n", [10_000, 100_000])
def test_clt_ks_critical_value(n, rng):
    T = 1e6
    norm = sqrt(0.5 * log(log(T)))

    class G:
        values = rng.standard_normal(n) * norm
        t1 = T

    rep = selberg_clt_test(G())
    assert rep.ks_distance < 1.63 / sqrt(n)  # 1% critical value


def test_clt_needs_samples(rng):
    class G:
        values = rng.standard_normal(100)
        t1 = 1e5

    with pytest.raises(StatisticsError):
        selberg_clt_test(G())


def test_clt_zeta_mean_small(shared_cache):
    # the integrated log|zeta| is tiny relative to its spread
    g = shared_cache.grid(zeta_id(), 1.0, 1e5, np.pi / log(1e5))
    rep = selberg_clt_test(g, T=1e5)
    assert abs(rep.normalized_mean) <= 0.2


# ------------------------------------------------------------- joint tails


def test_joint_ratio_r1_zero(rng):
    tg = synthetic_tg(rng.standard_normal(10_000))
    assert joint_tail_ratio(tg, [0.5]) == 0.0


def test_joint_ratio_perfect_dependence(rng):
    row = rng.standard_normal(20_000)
    tg = synthetic_tg(np.vstack([row, row]))
    V = 0.8
    marginal = empirical_phi(synthetic_tg(row), [V])
    got = joint_tail_ratio(tg, [V, V])
    assert got == pytest.approx(-log(marginal), abs=1e-12)
    assert got > 0


def test_joint_ratio_permutation_null(rng):
    # an independent shuffle of the same values should show no coupling
    row = rng.standard_normal(50_000)
    tg = synthetic_tg(np.vstack([row, rng.permutation(row)]))
    V = [0.5, 0.5]
    joint = tg.tail_count(V)
    p = empirical_phi(synthetic_tg(row), [0.5])
    se = 3.0 * sqrt(joint) / joint  # 3 binomial standard errors on log scale
    assert abs(joint_tail_ratio(tg, V)) <= se + 3.0 * sqrt((1 - p) / (p * tg.n)) * 2
    assert abs(joint_tail_ratio(tg, V)) < 0.1


def test_joint_ratio_empty_cell(rng):
    tg = synthetic_tg(rng.standard_normal(1000))
    with pytest.raises(StatisticsError):
        joint_tail_ratio(tg, [50.0])


# --------------------------------------------------------- large deviations


def test_ldp_guard_and_monotonicity(rng):
    tg = synthetic_tg(rng.standard_normal(50_000))
    rep = large_deviation_profile(tg, [1e-3])
    assert rep["ratio"] is None  # 0/0 guard path returns the raw pair
    assert rep["log_phi"] < 0 and rep["gaussian_exponent"] < 0
    phis = [large_deviation_profile(tg, [c])["phi_fraction"] for c in (0.2, 0.5, 0.9)]
    assert phis[0] >= phis[1] >= phis[2]
    with pytest.raises(DomainError):
        large_deviation_profile(tg, [-1.0])


def test_ldp_zeta_band(shared_cache):
    # measured desk ratios sit near 2.1: the Gaussian tail's log-correction
    # ln(V sqrt(2pi)) is comparable to V^2/2 at loglog-scale heights
    for T in (1e5, 1e6):
        tg = TailGrid.build([zeta_id()], T, cache=shared_cache)
        rep = large_deviation_profile(tg, [1.0])
        assert 1.5 <= rep["ratio"] <= 3.0


# ------------------------------------------------------------------ fubini


def test_fubini_constant_closed_form():
    T = 1e5
    tg = synthetic_tg(np.ones(1000), T=T)  # |L| = e everywhere
    rep = fubini_check(tg, [0.5], v_step=1e-3)
    assert rep["lhs"] == pytest.approx(exp(1.0), rel=1e-12)
    assert rep["relative_gap"] < 1e-3


def test_fubini_halving_gap(rng):
    tg = synthetic_tg(np.ones(1000))
    g1 = fubini_check(tg, [0.5], v_step=2e-3)["relative_gap"]
    g2 = fubini_check(tg, [0.5], v_step=1e-3)["relative_gap"]
    assert g2 <= 0.6 * g1 + 1e-9


def test_fubini_resolution_error(rng):
    tg = synthetic_tg(rng.standard_normal(5000))
    with pytest.raises(ResolutionError):
        fubini_check(tg, [1.0], v_step=2.0)


def test_fubini_r1_zeta(shared_cache):
    tg = TailGrid.build([zeta_id()], 1e5, cache=shared_cache)
    rep = fubini_check(tg, [1.0], v_step=0.01)
    assert rep["relative_gap"] < 0.05


def test_fubini_r2_zeta_chi4(shared_cache):
    tg = TailGrid.build([zeta_id(), dirichlet_id(4, 1)], 1e5, cache=shared_cache)
    rep = fubini_check(tg, [1.0, 1.0], v_step=0.01)
    assert rep["relative_gap"] < 0.08
    with pytest.raises(DomainError):
        fubini_check(tg, [1.0], v_step=0.01)  # arity mismatch


# ------------------------------------------------------ mass concentration


def test_mass_concentration_shape(shared_cache):
    tg = TailGrid.build([zeta_id()], 1e6, cache=shared_cache)
    k = 1.0 / sqrt(2.0)
    wide = mass_concentration_check(tg, [k], 1.0)
    mid = mass_concentration_check(tg, [k], 0.3)
    tiny = mass_concentration_check(tg, [k], 0.05)
    # derived desk values: 0.82 / 0.35 / 0.06 (the asymptotic concentration
    # toward 1 is far away at loglog 1e6 = 2.6)
    assert wide["central_fraction"] >= 0.7
    assert 0.25 <= mid["central_fraction"] <= 0.55
    assert tiny["central_fraction"] <= 0.15
    assert wide["central_fraction"] > mid["central_fraction"] > tiny["central_fraction"]
    assert sum(wide["boxes"].values()) == pytest.approx(1.0, abs=1e-9)


def test_mass_concentration_r2(rng):
    rows = np.vstack([rng.standard_normal(30_000), rng.standard_normal(30_000)])
    tg = synthetic_tg(rows, T=1e5)
    rep = mass_concentration_check(tg, [0.5, 0.5], 0.5, v_step=0.02)
    assert sum(rep["boxes"].values()) == pytest.approx(1.0, abs=1e-9)
    assert 0.0 < rep["central_fraction"] < 1.0
    with pytest.raises(DomainError):
        mass_concentration_check(tg, [0.5, 0.5], 0.0)
