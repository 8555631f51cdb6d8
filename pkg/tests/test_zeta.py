import math

import numpy as np
import pytest

from sftlab import zeta as Z
from sftlab.ensemble import EnsembleParams, sample_bits_batch
from sftlab.errors import DomainError
from sftlab.orbits import count_orbits, enumerate_orbits, orbit_windows


def test_alpha_zero_is_one():
    zt = Z.zeta_inverse(2, 1, 0.0, 5)
    assert zt.value == 1.0 and zt.tail_bound == 0.0 and not zt.divergent


def test_frozen_small_product():
    # direct product from independently computed orbit counts 2, 1, 2
    alpha = 0.25
    expect = ((1 - alpha) ** 2) * (1 - alpha ** 2) * ((1 - alpha ** 3) ** 2)
    zt = Z.zeta_inverse(2, 1, alpha, 3)
    assert zt.value == pytest.approx(expect, abs=1e-12)
    assert zt.value == pytest.approx(0.51099, abs=5e-5)


def test_divergence_sentinel():
    for alpha in (0.5, 0.75, 1.0):
        zt = Z.zeta_inverse(2, 1, alpha, 10)
        assert zt.divergent and zt.value == 0.0 and zt.log_value == -math.inf


def test_domain_error():
    with pytest.raises(DomainError):
        Z.zeta_inverse(2, 1, -0.1, 5)


def test_independence_bound_equals_truncation():
    for n in (4, 6, 9, 12):
        for alpha in (0.1, 0.3, 0.45):
            assert Z.independence_upper_bound(2, 1, alpha, n) == \
                Z.zeta_inverse(2, 1, alpha, n // 2).value
    # defined above the threshold too, and monotone decreasing in n
    prev = 1.0
    for n in range(2, 16, 2):
        v = Z.independence_upper_bound(2, 1, 0.6, n)
        assert v <= prev + 1e-15
        prev = v


def test_tail_bound_certifies_truncation_error():
    for alpha in (0.1, 0.25, 0.4):
        for j_lo, j_hi in [(3, 12), (5, 20), (10, 30)]:
            lo = Z.zeta_inverse(2, 1, alpha, j_lo)
            hi = Z.zeta_inverse(2, 1, alpha, j_hi)
            assert abs(hi.log_value - lo.log_value) <= lo.tail_bound
    # d = 2 as well
    lo = Z.zeta_inverse(2, 2, 0.1, 3)
    hi = Z.zeta_inverse(2, 2, 0.1, 8)
    assert abs(hi.log_value - lo.log_value) <= lo.tail_bound


def test_tail_constant_reported():
    zt = Z.zeta_inverse(2, 1, 0.3, 8)
    assert zt.tail_constant >= 1.0
    assert zt.tail_bound >= 0.0


def test_monte_carlo_matches_independence_product():
    # frequency of "every orbit of size <= n/2 is missing a window" vs the
    # product, which is exact by disjointness of those window sets
    alpha, n, trials = 0.3, 6, 10000
    params = EnsembleParams(2, 1, n, alpha, 77)
    orbs = enumerate_orbits(2, 1, n // 2)
    masks = []
    for o in orbs:
        codes = sorted(orbit_windows(o, n))
        masks.append(codes)
    bits = sample_bits_batch(params, range(trials))
    all_forbidden = np.ones(trials, dtype=bool)
    for codes in masks:
        all_forbidden &= ~bits[:, codes].all(axis=1)
    p = Z.independence_upper_bound(2, 1, alpha, n)
    freq = all_forbidden.mean()
    assert abs(freq - p) <= 3 * math.sqrt(p * (1 - p) / trials)


def test_full_shift_closed_form_d1():
    # Artin-Mazur: the binary full shift has zeta 1/(1 - 2t), so the inverse
    # at alpha < 1/2 is 1 - 2*alpha; the deep truncation must certify it
    for alpha in (0.05, 0.2, 0.35, 0.45):
        zt = Z.zeta_inverse(2, 1, alpha, 30)
        limit = 1.0 - 2.0 * alpha
        assert zt.value >= limit - 1e-12
        assert zt.value - limit <= zt.value * (1.0 - math.exp(-zt.tail_bound)) + 1e-12


def test_independence_upper_bound_alpha_one():
    assert Z.independence_upper_bound(2, 1, 1.0, 8) == 0.0
