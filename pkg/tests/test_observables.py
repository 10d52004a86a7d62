import math
from fractions import Fraction
from math import comb
from random import Random

import pytest

from oracles import all_contents, random_rational_beta
from pushtasep.dynamics import stationary_distribution
from pushtasep.montecarlo import extract_flux, simulate
from pushtasep.observables import (
    CorrelationReport,
    correlation_reports,
    current_by_colouring,
    current_defining_sum,
    current_multi,
    current_single,
    density_by_colouring,
    density_multi,
    density_single,
    exact_current,
    exact_density,
    f_poly,
    full_content,
    g_poly,
    rotate,
    site_density,
    three_species_T,
    three_species_content,
    two_point,
    two_point_matrix,
)
from pushtasep.states import Content
from pushtasep.symmetric import TwoColumnShape, determinant, elementary, s2, schur_hook_content

ONE_TWO_THREE = [Fraction(1), Fraction(2), Fraction(3)]


def test_density_single_examples():
    assert density_single(2, ONE_TWO_THREE, 0) == Fraction(5, 11)
    assert density_single(3, [Fraction(2)] * 5, 4) == Fraction(3, 5)
    beta = [Fraction(1), Fraction(4, 3), Fraction(2), Fraction(1, 5)]
    assert sum(density_single(2, beta, j) for j in range(4)) == 2


def test_current_single_examples():
    assert current_single(1, ONE_TWO_THREE) == Fraction(1, 6)
    for L in range(2, 7):
        for n1 in range(1, L):
            assert current_single(n1, [Fraction(1)] * L) == Fraction(comb(L, n1 - 1), comb(L, n1))


@pytest.mark.parametrize("L", range(2, 6))
def test_current_defining_sum(L):
    rng = Random(L)
    for n1 in range(1, L):
        beta = random_rational_beta(rng, L)
        dist = stationary_distribution(Content((L - n1, n1)), beta)
        j = current_single(n1, beta)
        assert current_defining_sum(n1, beta, dist) == j
        assert exact_current(dist, beta, 1) == j


def test_multispecies_reduce_to_single():
    beta = [Fraction(3), Fraction(1, 2), Fraction(2), Fraction(5)]
    content = Content((2, 2))
    assert density_multi(content, beta, 1) == density_single(2, beta, 0)
    assert current_multi(content, beta, 1) == current_single(2, beta)


def test_three_site_examples():
    dist = stationary_distribution(Content((1, 1, 1)), ONE_TWO_THREE)
    content = Content((1, 1, 1))
    assert density_multi(content, ONE_TWO_THREE, 2) == exact_density(dist, 2, 0)
    assert sum(density_multi(content, ONE_TWO_THREE, i) for i in range(3)) == 1
    assert current_multi(content, ONE_TWO_THREE, 2) == elementary(0, ONE_TWO_THREE) / elementary(1, ONE_TWO_THREE)
    total = sum(current_multi(content, ONE_TWO_THREE, i) for i in (1, 2))
    assert total == current_single(2, ONE_TWO_THREE)


@pytest.mark.parametrize("content", all_contents(5, 3), ids=str)
def test_density_and_current_against_exact(content):
    beta = random_rational_beta(Random(3 * content.L + content.s), content.L)
    dist = stationary_distribution(content, beta)
    for site in range(content.L):
        for sp in range(content.s + 1):
            value = site_density(content, beta, sp, site)
            assert value == exact_density(dist, sp, site)
            assert 0 <= value <= 1
    for sp in range(1, content.s + 1):
        value = current_multi(content, beta, sp)
        assert value == exact_current(dist, beta, sp)
        assert value == current_by_colouring(content, beta, sp)
        assert value >= 0
        assert density_multi(content, beta, sp) == density_by_colouring(content, beta, sp)
    for bond in range(content.L - 1):
        assert exact_current(dist, beta, content.s, bond) == current_multi(content, beta, content.s)


def test_three_species_blocks():
    rng = Random(21)
    for L in (4, 5, 6):
        for s_count in range(1, L - 1):
            for t_count in range(1, L - s_count):
                content = three_species_content(s_count, t_count, L)
                assert content.n(2) == s_count and content.n(1) == t_count
                beta = random_rational_beta(rng, L)
                dist = stationary_distribution(content, beta)
                t1 = dist.event(lambda c: c[0] == 0 and c[1] == 1)
                t2 = dist.event(lambda c: c[0] == 1 and c[1] == 0)
                assert three_species_T(s_count, t_count, beta, 1) == t1
                assert three_species_T(s_count, t_count, beta, 2) == t2
    with pytest.raises(ValueError):
        three_species_T(0, 1, [Fraction(1)] * 4, 1)


def test_three_species_homogeneous_rotation():
    content = three_species_content(1, 2, 5)
    beta = [Fraction(1)] * 5
    dist = stationary_distribution(content, beta)
    t1 = three_species_T(1, 2, beta, 1)
    for k in range(5):
        assert dist.event(lambda c: c[k] == 0 and c[(k + 1) % 5] == 1) == t1


@pytest.mark.parametrize("L", [4, 5, 6])
def test_f_g_symmetric_in_tail(L):
    rng = Random(L)
    beta = random_rational_beta(rng, L)
    tail = beta[2:]
    rng.shuffle(tail)
    other = beta[:2] + tail
    for j in range(L):
        for i in range(L):
            assert f_poly(j, i, beta) == f_poly(j, i, other)
            assert g_poly(j, i, beta) == g_poly(j, i, other)


def test_f_homogeneous_against_hook_content():
    L, n = 5, 3
    ones = [Fraction(1)] * L

    def hc(a, b):
        return schur_hook_content(TwoColumnShape(a, b).partition(), n) if a >= 0 else 0

    for j, i in [(0, 1), (0, 2), (1, 3), (2, 4), (0, 4)]:
        expected = determinant([
            [1, hc(L - j - 2, 0), hc(L - i - 2, 0)],
            [-2, hc(L - j - 2, 1), hc(L - i - 2, 1)],
            [1, hc(L - j - 1, 0), hc(L - i - 1, 0)],
        ])
        assert f_poly(j, i, ones) == expected
    assert s2(-1, 2, ones[2:]) == 0


def test_two_point_examples():
    beta = [Fraction(k) for k in range(1, 6)]
    assert all(two_point(j, j, beta) == 0 for j in range(5))
    reports = correlation_reports(beta)
    assert all(r.agrees for row in reports for r in row)
    with pytest.raises(ValueError):
        two_point(5, 0, beta)


@pytest.mark.parametrize("L", [3, 4, 5, 6])
def test_two_point_marginals(L):
    rng = Random(100 + L)
    beta = random_rational_beta(rng, L)
    mat = two_point_matrix(beta)
    content = full_content(L)
    assert sum(map(sum, mat)) == 1
    for j in range(L):
        assert sum(mat[j]) == density_multi(content, beta, j)
        assert sum(mat[r][j] for r in range(L)) == site_density(content, beta, j, 1)
        assert all(0 <= v <= 1 for v in mat[j])
    tail = beta[2:]
    rng.shuffle(tail)
    assert two_point_matrix(beta[:2] + tail) == mat


def test_rotation():
    assert rotate([1, 2, 3, 4], 1) == [2, 3, 4, 1]


def test_species_two_current_by_flux_counting():
    content = Content((1, 1, 1))
    horizon = 2e4
    traj = simulate(content, [1, 2, 3], (0, 1, 2), horizon, seed=2024)
    counts = len(extract_flux(traj, 2, min_species=2).times)
    exact = current_multi(content, ONE_TWO_THREE, 2)
    report = CorrelationReport(exact, exact, counts / horizon, math.sqrt(counts) / horizon)
    assert report.agrees
    assert abs(report.mc_value - float(exact)) < 4 * report.mc_stderr
