import itertools
import math

import numpy as np
import pytest

from sbmlab import divergence, errors, model


def random_params(rng, k):
    p = rng.dirichlet(np.ones(k) * 5)
    Q = rng.uniform(0.5, 10.0, size=(k, k))
    Q = (Q + Q.T) / 2
    return model.build_params(k, p, Q, "logarithmic")


def test_d_t_identical_profiles_zero():
    mu = np.array([1.0, 2.0, 3.0])
    for t in (0.0, 0.3, 0.5, 1.0):
        assert divergence.d_t(mu, mu, t) == pytest.approx(0.0, abs=1e-14)


def test_d_t_hellinger_half():
    mu = np.array([4.5, 0.5])
    nu = np.array([0.5, 4.5])
    expected = 0.5 * np.sum((np.sqrt(mu) - np.sqrt(nu)) ** 2)
    assert divergence.d_t(mu, nu, 0.5) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(2.0, abs=1e-12)


def test_d_t_direct_formula():
    mu, nu, t = (1.0, 2.0), (2.0, 1.0), 0.25
    direct = sum(t * m + (1 - t) * v - m**t * v ** (1 - t) for m, v in zip(mu, nu))
    assert divergence.d_t(mu, nu, t) == pytest.approx(direct, abs=1e-12)


def test_d_t_length_mismatch():
    with pytest.raises(errors.LengthMismatch):
        divergence.d_t([1.0, 2.0], [1.0, 2.0, 3.0], 0.5)


def test_d_t_zero_entry_strict():
    with pytest.raises(errors.ZeroEntry):
        divergence.d_t([1.0, 0.0], [1.0, 2.0], 0.5)
    # extended mode accepts zeros with the 0^s = 0 convention
    value = divergence.d_t([1.0, 0.0], [1.0, 2.0], 0.5, strict=False)
    assert value == pytest.approx(0.5 * (np.sqrt(2.0) - 0.0) ** 2, abs=1e-12)


def test_ch_divergence_symmetric_closed_form():
    params = model.build_params(2, [0.5, 0.5], [[9, 1], [1, 9]], "logarithmic")
    t1 = divergence.profile(params, 0)
    t2 = divergence.profile(params, 1)
    value, tstar = divergence.ch_divergence(t1, t2)
    assert value == pytest.approx(0.5 * (np.sqrt(9) - np.sqrt(1)) ** 2, abs=1e-10)
    assert tstar == pytest.approx(0.5, abs=1e-6)


def test_ch_divergence_grid_oracle():
    mu = np.array([1.0, 3.0])
    nu = np.array([2.0, 2.0])
    value, _ = divergence.ch_divergence(mu, nu)
    ts = np.linspace(0, 1, 100001)
    grid = np.max([divergence.d_t(mu, nu, t) for t in ts])
    assert value == pytest.approx(grid, abs=1e-8)


def test_ch_divergence_properties():
    rng = np.random.default_rng(0)
    for _ in range(30):
        k = rng.integers(2, 5)
        mu = rng.uniform(0.2, 8.0, size=k)
        nu = rng.uniform(0.2, 8.0, size=k)
        v1, _ = divergence.ch_divergence(mu, nu)
        v2, _ = divergence.ch_divergence(nu, mu)
        assert v1 >= -1e-12
        assert v1 == pytest.approx(v2, abs=1e-10)
        # lower-bounded by the Hellinger point t = 1/2
        assert v1 >= divergence.d_t(mu, nu, 0.5) - 1e-12
        # homogeneity
        c = rng.uniform(0.1, 10.0)
        vc, _ = divergence.ch_divergence(c * mu, c * nu)
        assert vc == pytest.approx(c * v1, rel=1e-9, abs=1e-12)
    # zero iff equal
    mu = rng.uniform(0.5, 5.0, size=3)
    assert divergence.ch_divergence(mu, mu)[0] == pytest.approx(0.0, abs=1e-10)


def test_profile_examples():
    params = model.build_params(2, [0.5, 0.5], [[9, 1], [1, 9]], "logarithmic")
    assert np.allclose(divergence.profile(params, 0), [4.5, 0.5])
    p3 = model.build_params(3, [0.2, 0.3, 0.5],
                            [[1, 2, 3], [2, 5, 4], [3, 4, 6]], "logarithmic")
    assert np.allclose(divergence.profile(p3, 0), [0.2, 0.6, 1.5])
    with pytest.raises(errors.IndexOutOfRange):
        divergence.profile(params, 2)


def test_divergence_matrix_symmetric_three_block():
    # uniform 3-block with alpha=16, beta=1: every off-diagonal D+ = (4-1)^2/3
    params = model.build_params(3, np.ones(3) / 3,
                                np.where(np.eye(3, dtype=bool), 16.0, 1.0),
                                "logarithmic")
    report = divergence.divergence_matrix(params)
    for i in range(3):
        assert report.dplus[i, i] == 0.0
        for j in range(3):
            if i != j:
                assert report.dplus[i, j] == pytest.approx(3.0, abs=1e-9)


def brute_force_finest(dplus, k):
    def partitions(items):
        if not items:
            yield []
            return
        head, rest = items[0], items[1:]
        for smaller in partitions(rest):
            for i, part in enumerate(smaller):
                yield smaller[:i] + [[head] + part] + smaller[i + 1:]
            yield [[head]] + smaller

    best = None
    for part in partitions(list(range(k))):
        ok = all(
            dplus[i, j] >= 1.0
            for a, b in itertools.combinations(range(len(part)), 2)
            for i in part[a] for j in part[b]
        )
        if ok and (best is None or len(part) > len(best)):
            best = part
    return {frozenset(g) for g in best}


def test_finest_partition_vs_brute_force():
    rng = np.random.default_rng(7)
    for _ in range(30):
        k = int(rng.integers(2, 6))
        params = random_params(rng, k)
        report = divergence.finest_partition(params)
        expected = brute_force_finest(report.dplus, k)
        assert {frozenset(g) for g in report.finest} == expected


def test_finest_partition_singletons():
    params = model.build_params(3, np.ones(3) / 3,
                                np.where(np.eye(3, dtype=bool), 16.0, 1.0),
                                "logarithmic")
    report = divergence.finest_partition(params)
    assert report.finest == ((0,), (1,), (2,))


def test_exact_recovery_verdicts():
    solvable = model.build_params(2, [0.5, 0.5], [[25, 4], [4, 25]], "logarithmic")
    part = ((0,), (1,))
    assert divergence.exact_recovery_solvable(solvable, part) == "solvable"
    hard = model.build_params(2, [0.5, 0.5], [[5, 4], [4, 5]], "logarithmic")
    assert divergence.exact_recovery_solvable(hard, part) == "not_solvable"
    # single part: no cross pairs, vacuously solvable
    assert divergence.exact_recovery_solvable(hard, ((0, 1),)) == "solvable"
    with pytest.raises(errors.BadPartition):
        divergence.exact_recovery_solvable(hard, ((0,),))


def test_min_cross_divergence():
    params = model.build_params(2, [0.5, 0.5], [[25, 4], [4, 25]], "logarithmic")
    d = divergence.min_cross_divergence(params, ((0,), (1,)))
    assert d == pytest.approx(0.5 * (5 - 2) ** 2, abs=1e-9)
    assert math.isinf(divergence.min_cross_divergence(params, ((0, 1),)))
