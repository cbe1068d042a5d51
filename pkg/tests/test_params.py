import math

import numpy as np
import pytest

from cmainj.errors import InvalidDimension
from cmainj.params import (
    clip_threshold,
    clip_threshold_mean,
    default_parameters,
    expected_norm,
)


def test_default_lambda_and_mu():
    p = default_parameters(10)
    assert p.lam == 10  # 4 + floor(3 ln 10) = 4 + 6
    assert p.mu == 5


def test_table_values_n10():
    p = default_parameters(10)
    assert p.c_y == pytest.approx(4.828944326835046, rel=1e-12)
    assert p.c_ym == pytest.approx(6.138802621666247, rel=1e-12)
    assert p.c_c == pytest.approx(4.0 / 14.0, rel=1e-12)
    assert p.c_m == 1.0
    assert p.alpha_cov == 2.0
    assert p.delta_sigma_max == 1.0


def test_weights_n10():
    p = default_parameters(10, 10)
    want = [0.4562726469, 0.2707530970, 0.1622311172, 0.0852335471, 0.0255095918]
    assert np.allclose(p.weights, want, atol=1e-9)
    assert p.mu_w == pytest.approx(3.1672992814107017, rel=1e-10)
    assert p.weights.sum() == pytest.approx(1.0, abs=1e-14)


def test_rates_n10():
    p = default_parameters(10, 10)
    assert p.c_sigma == pytest.approx(0.3196142529106334, rel=1e-12)
    assert p.d_sigma == pytest.approx(1.3196142529106334, rel=1e-12)
    assert p.c_1 == pytest.approx(0.015283824524751714, rel=1e-12)
    assert p.c_mu == pytest.approx(0.02015428276120837, rel=1e-12)
    assert p.c_1 + p.c_mu <= 1.0


def test_expected_norm_formula_values():
    # frozen from direct evaluation of sqrt(n)(1 - 1/(4n) + 1/(21 n^2))
    assert expected_norm(1) == pytest.approx(0.7976190476190477, rel=1e-14)
    assert expected_norm(2) == pytest.approx(1.254272742818995, rel=1e-14)
    assert expected_norm(7) == pytest.approx(2.553831379703503, rel=1e-14)
    assert expected_norm(100) == pytest.approx(9.97504761904762, rel=1e-14)


@pytest.mark.parametrize("n", [1, 2, 5, 10, 40, 100])
def test_expected_norm_against_gamma_oracle(n):
    exact = math.sqrt(2.0) * math.gamma((n + 1) / 2.0) / math.gamma(n / 2.0)
    rel = abs(expected_norm(n) - exact) / exact
    assert rel < 1e-3
    if n >= 10:
        assert rel < 2e-4


def test_clip_thresholds():
    assert clip_threshold(2) == pytest.approx(math.sqrt(2) + 1.0)
    assert clip_threshold_mean(10) == pytest.approx(math.sqrt(20) + 20.0 / 12.0)


def test_invariants_across_dims():
    for n in (1, 2, 3, 7, 20, 40):
        p = default_parameters(n)
        assert np.all(p.weights > 0)
        assert 1.0 <= p.mu_w <= p.mu + 1e-12
        assert 0 < p.c_sigma <= 1 and 0 < p.c_c <= 1 and 0 < p.c_1 <= 1


def test_explicit_lambda():
    p = default_parameters(10, 6)
    assert p.lam == 6 and p.mu == 3


def test_errors():
    with pytest.raises(InvalidDimension):
        default_parameters(0)
    with pytest.raises(InvalidDimension):
        default_parameters(10, 1)
    with pytest.raises(InvalidDimension):
        expected_norm(0)


def test_lambda_2_edge():
    p = default_parameters(5, 2)
    assert p.mu == 1
    assert p.weights.tolist() == [1.0]
    assert p.mu_w == pytest.approx(1.0)
    assert p.c_mu == 0.0


def test_with_overrides():
    p = default_parameters(10)
    q = p.with_overrides(c_y=math.inf, delta_sigma_max=0.6)
    assert math.isinf(q.c_y) and q.delta_sigma_max == 0.6
    assert p.c_y != q.c_y  # original untouched
