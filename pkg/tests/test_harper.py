from dataclasses import replace
from math import exp, factorial, log, sqrt

import numpy as np
import pytest

from critlab.characters import character_group
from critlab.errors import DomainError, EmptyScheduleError, ResourceError
from critlab.grid import log_abs_grid
from critlab.harper import (
    PolyBank,
    build_schedule,
    chandee_audit,
    classify_sets,
    k_hat,
    smoothed_lambda,
    truncation_ratio,
    truncation_remainder,
)
from critlab.lfunc import zeta_id
from critlab.satake import satake_from_character, satake_from_table, zeta_spec

Z = zeta_spec()


# ---------------------------------------------------------------- schedule


def test_schedule_example():
    s = build_schedule(1e6, [1.0], [Z], beta=0.01, eps=0.2)
    assert s.J == 3
    assert np.allclose(s.theta, [0.01, 0.01 * np.e, 0.01 * np.e**2])
    # the next theta, 0.2009..., exceeds eps = 0.2
    assert 0.01 * np.e**3 > 0.2
    assert s.Kj[0] == pytest.approx(0.01**-0.75, rel=1e-12)
    assert s.Kj[0] == pytest.approx(31.6228, abs=2e-4)
    assert np.allclose(s.Tj, 1e6 ** s.theta)


def test_k_hat():
    chi4 = satake_from_character(character_group(4)[1])
    assert k_hat([1.0], [Z]) == 1.0
    assert k_hat([2.0], [Z]) == 4.0  # sum k^2 dominates
    toy2 = satake_from_table(2, "toy", {2: [1, 1]})
    assert k_hat([1.0, 1.0], [toy2, chi4]) == 3.0  # sum m k = 3 > 2 = sum k^2


def test_exact_schedule_fails_loudly():
    with pytest.raises(EmptyScheduleError) as exc:
        build_schedule(1e6, [1.0], [Z], exact=True)
    assert exc.value.min_T == float("inf")
    assert "exp(exp(exp" in str(exc.value)
    with pytest.raises(DomainError):
        build_schedule(1e6, [1.0], [Z], beta=0.3, eps=0.2)
    with pytest.raises(DomainError):
        build_schedule(50.0, [1.0], [Z])


def test_schedule_dump_format():
    s = build_schedule(1e5, [1.0], [Z], beta=0.05, eps=0.7)
    text = s.dump()
    assert "J=3" in text and "theta_1=0.05" in text and text.endswith("\n")


# ------------------------------------------------------------ smooth weights


def test_smoothed_lambda_values(primetable):
    x = exp(10.0)
    got = smoothed_lambda(x, 2, [1.0], [Z], primetable=primetable)
    # independent implementation of the same display
    lam2 = log(2.0)
    want = (lam2 / lam2) * (log(x / 2.0) / (2.0 ** (1.0 / log(x)) * log(x)))
    assert got == pytest.approx(want, rel=1e-12)
    assert got.real == pytest.approx(0.868360, abs=1e-6)
    assert smoothed_lambda(13.0, 13, [1.0], [Z], primetable=primetable) == 0
    assert smoothed_lambda(100.0, 6, [1.0], [Z], primetable=primetable) == 0
    with pytest.raises(DomainError):
        smoothed_lambda(10.0, 11, [1.0], [Z], primetable=primetable)
    with pytest.raises(DomainError):
        smoothed_lambda(10.0, 1, [1.0], [Z], primetable=primetable)


def test_weight_bound_invariant(primetable):
    chi4 = satake_from_character(character_group(4)[1])
    s = build_schedule(1e5, [1.0, 1.0], [Z, chi4], beta=0.05, eps=0.7)
    bank = PolyBank.build(s, [1.0, 1.0], [Z, chi4], primetable=primetable)
    km = 2.0  # sum k_j m_j
    for key, wt in bank.weights.items():
        if len(wt):
            assert np.max(np.abs(wt)) <= km + 1e-12


# ------------------------------------------------------------- bank evals


@pytest.fixture(scope="module")
def bank100k():
    s = build_schedule(1e5, [1.0], [Z], beta=0.05, eps=0.7)
    return s, PolyBank.build(s, [1.0], [Z])


def test_eval_p_basics(bank100k):
    s, bank = bank100k
    ts = np.array([0.0, 2.5, 77.1])
    assert len(bank.block_primes[0]) == 0  # first block below the least prime
    p2 = bank.eval_P(2, s.J, ts)
    assert p2[0].real > 0 and abs(p2[0].imag) < 1e-14  # t=0: positive sum
    conj_check = bank.eval_P(2, s.J, -ts)
    assert np.allclose(conj_check, np.conj(bank.eval_P(2, s.J, ts)), atol=1e-12)
    with pytest.raises(DomainError):
        bank.eval_P(0, 1, ts)
    with pytest.raises(DomainError):
        bank.eval_P(2, 1, ts)  # s < j


def test_eval_p_empty_block():
    # beta small enough that the first block holds no primes
    s = build_schedule(1e5, [1.0], [Z], beta=0.01, eps=0.3)
    bank = PolyBank.build(s, [1.0], [Z])
    assert len(bank.block_primes[0]) == 0
    assert np.all(bank.eval_P(1, s.J, np.array([1.0, 2.0])) == 0)


def test_eval_n_multinomial_identity(bank100k):
    # with the total cap, N equals the truncated exponential of P exactly
    s, bank = bank100k
    ts = np.array([0.0, 1.3, 19.0])
    for j in (2, 3):
        cap = int(bank.n_caps[j - 1])
        P = bank.eval_P(j, s.J, ts)
        expP = sum(P**c / float(factorial(c)) for c in range(cap + 1))
        N = bank.eval_N(j, s.J, ts)
        assert np.max(np.abs(N - expP)) < 1e-8 * max(1.0, np.max(np.abs(N)))


def test_eval_n_vs_enumeration(bank100k):
    s, bank = bank100k
    ts = np.array([0.0, 5.0])
    for j in (1, 2):
        if bank.support_size(j) > 1e6:
            continue
        a = bank.eval_N(j, s.J, ts)
        b = bank.eval_N_enumerated(j, s.J, ts)
        assert np.max(np.abs(a - b)) < 1e-10
    assert np.allclose(bank.eval_N(1, s.J, np.array([0.0])).imag, 0.0, atol=1e-14)


def test_enumeration_budget(bank100k):
    s, bank = bank100k
    big_j = s.J  # the last block is combinatorially huge
    size = bank.support_size(big_j)
    if size > 10_000_000:
        with pytest.raises(ResourceError) as exc:
            bank.eval_N_enumerated(big_j, s.J, np.array([0.0]))
        assert exc.value.required == size and exc.value.budget == 10_000_000
    else:
        pytest.skip("support unexpectedly small")


def test_eval_m(bank100k):
    s, bank = bank100k
    ts = np.array([0.0, 0.7])
    m = bank.eval_M(s.J, ts)
    assert m[0].real >= 1 - np.sum(np.abs(bank.m_weights[s.J]))  # leading-term positivity
    assert abs(m[0].imag) < 1e-14


def test_eval_m_brute_small_T():
    # T = 120: log T < 5, so the long-prime support is exactly {2, 3}
    s = build_schedule(120.0, [1.0], [Z], beta=0.2, eps=0.6)
    bank = PolyBank.build(s, [1.0], [Z])
    assert bank.m_primes.tolist() == [2, 3]
    wt = bank.m_weights[s.J]
    cap = bank.m_cap
    ts = np.array([0.0, 0.7])
    m = bank.eval_M(s.J, ts)

    def brute(t):
        total = 0j
        s_eval = 1.0 + 2j * t
        for e1 in range(cap + 1):
            for e2 in range(cap + 1 - e1):
                term = wt[0] ** e1 / float(factorial(e1))
                term *= wt[1] ** e2 / float(factorial(e2))
                total += term * (2.0**e1 * 3.0**e2) ** (-s_eval)
        return total

    for i, t in enumerate(ts):
        assert m[i] == pytest.approx(brute(t), abs=1e-10)


def test_eval_m_empty_support():
    # cutoff x below 4 leaves no p with p^2 <= x: the product support is {1}
    s = build_schedule(150.0, [1.0], [Z], beta=0.05, eps=0.12)
    bank = PolyBank.build(s, [1.0], [Z])
    assert len(bank.m_primes) == 0
    assert np.all(bank.eval_M(s.J, np.array([0.0, 1.0])) == 1.0)


# ------------------------------------------------------------- truncation


def test_truncation_exact_cases():
    assert truncation_ratio(0.0, 0.0) == 1.0
    assert abs(truncation_ratio(2.0 + 0j, 2.0) - 1.0) < 1e-10
    # 21-term factorial tail bound oracle: sum_{j>20} 2^j/j! < 2^21/21! * 1.2
    tail_bound = 2.0**21 / float(factorial(21)) * 1.2
    assert abs(truncation_remainder(2.0 + 0j, 2.0)) < 3 * tail_bound
    with pytest.raises(DomainError):
        truncation_ratio(3.0 + 0j, 2.0)


def test_truncation_randomized_bound(rng):
    for _ in range(200):
        V = 10.0 * rng.random()
        r = V * sqrt(rng.random())
        D = r * np.exp(2j * np.pi * rng.random())
        rem = truncation_remainder(D, V)
        assert abs(rem) <= 2.0 * exp(-9.0 * V)
        if V < 3.0:  # direct ratio resolves the same quantity here
            assert truncation_ratio(D, V) == pytest.approx(1.0 + rem, abs=1e-11)


# ----------------------------------------------------------- classification


def test_classification_partition_and_scaling(bank100k):
    s, bank = bank100k
    g = log_abs_grid(zeta_id(), 1e5, 1.02e5, 0.05)
    rep = classify_sets(s, bank, g)
    assert sum(rep["measures"].values()) == pytest.approx(1.0, abs=1e-12)
    # thresholds unreachable -> everything good
    s_hi = replace(s, Kj=s.Kj * 1e6)
    rep_hi = classify_sets(s_hi, bank, g)
    assert rep_hi["good_fraction"] == 1.0
    # thresholds at zero -> everything lands in the first nonempty block
    s_lo = replace(s, Kj=s.Kj * 0.0)
    rep_lo = classify_sets(s_lo, bank, g)
    assert rep_lo["good_fraction"] == 0.0
    labels = rep_lo["labels"]
    first_nonempty = next(j for j in range(1, s.J + 1) if len(bank.block_primes[j - 1]))
    assert np.all(labels // 1000 == first_nonempty)


def test_classification_desk_default():
    s = build_schedule(1e5, [1.0], [Z], beta=0.01, eps=0.2)
    bank = PolyBank.build(s, [1.0], [Z])
    g = log_abs_grid(zeta_id(), 1e5, 1.05e5, 0.05)
    rep = classify_sets(s, bank, g)
    assert rep["good_fraction"] >= 0.99


# ------------------------------------------------------------------ audit


def test_chandee_additive_term_arithmetic():
    T = 1e4
    g = log_abs_grid(zeta_id(), T, T + 200.0, 0.05)
    x = 40.0
    r1 = chandee_audit([1.0], [Z], x, [g], T)
    r2 = chandee_audit([1.0], [Z], 2 * x, [g], T)
    want = 1.0 * log(T) * (1.0 / log(x) - 1.0 / log(2 * x))
    assert r1["additive_term"] - r2["additive_term"] == pytest.approx(want, rel=1e-12)


def test_chandee_clamped_point_inflates_slack():
    # a clamped near-zero pushes log|L| down, so slack spikes there
    g = log_abs_grid(zeta_id(), 10.0, 20.0, 1e-3, clamp_floor=-8.0)
    assert g.clamped_count >= 1
    rep = chandee_audit([1.0], [Z], 50.0, [g], 10.0)
    idx = np.nonzero(g.clamped)[0][0]
    # recompute the slack of that point from the report pieces
    assert rep["quantiles"]["q99"] > rep["mean_slack"]
    assert rep["clamped_count"] == g.clamped_count
    del idx


def test_chandee_domain():
    g = log_abs_grid(zeta_id(), 100.0, 110.0, 0.1)
    with pytest.raises(DomainError):
        chandee_audit([1.0], [Z], 5.0, [g], 100.0)  # x < e^2
    with pytest.raises(DomainError):
        chandee_audit([1.0], [Z], 1e9, [g], 100.0)  # x > T^2


# ------------------------------------------------- good-set moment property


@pytest.mark.slow
def test_good_set_moment_band(shared_cache):
    # (1/T) integral of |M|^2 prod_j |N_j|^2 over [T, 2T], against
    # (log T)^{sum k^2}: stays inside a fixed band across three decades
    # (measured 0.13-0.15 with these knobs)
    from critlab.moments import simpson_uniform

    bands = {}
    for T in (1e4, 1e5, 1e6):
        sch = build_schedule(T, [1.0], [Z], beta=0.05, eps=0.7)
        bank = PolyBank.build(sch, [1.0], [Z])
        delta = 2.0
        g = shared_cache.grid(zeta_id(), T, 2.0 * T, delta)
        ts = g.ts
        prod = np.abs(bank.eval_M(sch.J, ts)) ** 2
        for j in range(1, sch.J + 1):
            prod = prod * np.abs(bank.eval_N(j, sch.J, ts)) ** 2
        bands[T] = simpson_uniform(prod, delta) / T / log(T)
    assert all(1e-2 <= b <= 1e2 for b in bands.values()), bands
