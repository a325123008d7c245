"""Accuracy and identity tests for the log-gamma/beta kernel.

Reference values were computed offline with 40-digit arbitrary-precision
arithmetic and frozen here; the absolute error of ln Gamma equals the
relative error of Gamma itself.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from limitlaw import log_beta, log_gamma, log_gamma_complex
from limitlaw.gammakit import log_gamma_array

# (x, ln Gamma(x)) frozen from a 40-digit offline evaluation.
LOG_GAMMA_ORACLE = [
    (0.01, 4.599479878042021722514),
    (0.05, 2.968879201051730825355),
    (0.1, 2.25271265173420595987),
    (0.25, 1.288022524698077457371),
    (0.5, 0.5723649429247000870717),
    (1.5, -0.1207822376352452223455),
    (2.5, 0.2846828704729191596325),
    (7.0, 6.57925121201010099506),
    (25.0, 54.78472939811231919009),
    (60.5, 186.5789178333378528681),
    (100.0, 359.134205369575398776),
    (143.7, 568.5981384138910008335),
    (170.0, 701.4372638087370853465),
]

# ln Gamma(2 + 3i) frozen from the same offline evaluation.
LOG_GAMMA_2_3I = complex(-2.092851753092733349564189, 2.302396543466867626153708)


class TestLogGamma:
    def test_gamma_of_one(self):
        assert log_gamma(1.0) == 0.0

    def test_gamma_of_half(self):
        assert log_gamma(0.5) == pytest.approx(math.log(math.sqrt(math.pi)), abs=1e-15)

    def test_gamma_of_five(self):
        assert log_gamma(5.0) == pytest.approx(math.log(24.0), abs=1e-14)

    @pytest.mark.parametrize("x,expected", LOG_GAMMA_ORACLE)
    def test_oracle_accuracy(self, x, expected):
        # abs error of the log <= 1e-13 <=> Gamma accurate to 1e-13 relative
        assert abs(log_gamma(x) - expected) <= 1e-13

    @pytest.mark.parametrize("bad", [0.0, -1.0, -0.5, math.nan, math.inf])
    def test_domain_errors(self, bad):
        with pytest.raises(ValueError):
            log_gamma(bad)

    @given(st.floats(min_value=0.5, max_value=50.0))
    def test_recurrence(self, x):
        assert abs(log_gamma(x + 1.0) - log_gamma(x) - math.log(x)) <= 1e-12

    @given(st.floats(min_value=0.01, max_value=0.99))
    def test_reflection(self, x):
        lhs = log_gamma(x) + log_gamma(1.0 - x)
        rhs = math.log(math.pi / abs(math.sin(math.pi * x)))
        assert abs(lhs - rhs) <= 1e-11

    @given(st.floats(min_value=0.1, max_value=40.0))
    @settings(max_examples=200)
    def test_duplication(self, x):
        lhs = log_gamma(2.0 * x)
        rhs = (
            (2.0 * x - 1.0) * math.log(2.0)
            - 0.5 * math.log(math.pi)
            + log_gamma(x)
            + log_gamma(x + 0.5)
        )
        assert abs(lhs - rhs) <= 1e-11

    def test_continuity_across_stirling_cutover(self):
        xs = np.linspace(19.5, 20.5, 101)
        vals = np.array([log_gamma(float(x)) for x in xs])
        assert np.all(np.diff(vals) > 0)  # ln Gamma is increasing there
        assert np.max(np.abs(np.diff(vals))) < 0.05


class TestLogGammaArray:
    def test_matches_scalar_kernel(self):
        xs = np.concatenate([np.geomspace(0.01, 19.9, 50), np.linspace(20.0, 170.0, 50)])
        vec = log_gamma_array(xs)
        for x, v in zip(xs, vec):
            assert abs(v - log_gamma(float(x))) <= 2e-13

    @pytest.mark.parametrize("x,expected", LOG_GAMMA_ORACLE)
    def test_oracle_accuracy(self, x, expected):
        assert abs(float(log_gamma_array(np.array([x]))[0]) - expected) <= 1e-13

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            log_gamma_array(np.array([1.0, -2.0]))
        with pytest.raises(ValueError):
            log_gamma_array(np.array([1.0, math.nan]))

    def test_empty_input(self):
        assert log_gamma_array(np.array([])).size == 0


class TestLogGammaComplex:
    def test_gamma_of_one(self):
        assert log_gamma_complex(1 + 0j) == 0 + 0j

    def test_gamma_of_half(self):
        v = log_gamma_complex(0.5 + 0j)
        assert v.real == pytest.approx(math.log(math.sqrt(math.pi)), abs=1e-13)
        assert v.imag == 0.0

    def test_oracle_2_plus_3i(self):
        v = log_gamma_complex(2 + 3j)
        assert abs(v - LOG_GAMMA_2_3I) <= 1e-13 * abs(LOG_GAMMA_2_3I)

    @given(
        st.floats(min_value=0.05, max_value=20.0),
        st.floats(min_value=-30.0, max_value=30.0),
    )
    def test_conjugate_symmetry(self, re, im):
        s = complex(re, im)
        assert log_gamma_complex(s.conjugate()) == complex(log_gamma_complex(s)).conjugate()

    @pytest.mark.parametrize("c", [0.25, 0.5, 2.0])
    def test_branch_continuity_along_vertical_contour(self, c):
        # walking a vertical line must never produce a 2*pi phase jump
        u = np.linspace(-80.0, 80.0, 8001)
        values = log_gamma_complex(c + 1j * u)
        assert np.max(np.abs(np.diff(values.imag))) < 0.5

    def test_vectorized_matches_scalar(self):
        s = np.array([0.5 + 1j, 2 + 3j, 4 - 2j])
        vec = log_gamma_complex(s)
        for i, si in enumerate(s):
            assert vec[i] == complex(log_gamma_complex(complex(si)))

    @pytest.mark.parametrize("bad", [0 + 1j, -1 + 0.5j, -3 - 2j])
    def test_left_half_plane_rejected(self, bad):
        with pytest.raises(ValueError):
            log_gamma_complex(bad)

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            log_gamma_complex(complex(math.nan, 1.0))


class TestLogBeta:
    def test_one_one(self):
        assert log_beta(1.0, 1.0) == 0.0

    def test_half_half(self):
        assert log_beta(0.5, 0.5) == pytest.approx(math.log(math.pi), abs=1e-14)

    def test_half_three_halves(self):
        # Gamma(1/2) Gamma(3/2) / Gamma(2) = pi/2
        assert log_beta(0.5, 1.5) == pytest.approx(math.log(math.pi / 2.0), abs=1e-14)

    def test_symmetry(self):
        assert log_beta(0.3, 2.7) == log_beta(2.7, 0.3)

    def test_matches_gamma_decomposition(self):
        for a, b in [(0.5, 4.0), (1.25, 1.25), (10.0, 0.1)]:
            direct = log_beta(a, b)
            composed = log_gamma(a) + log_gamma(b) - log_gamma(a + b)
            assert direct == pytest.approx(composed, abs=1e-12)

    @pytest.mark.parametrize("a,b", [(0.0, 1.0), (1.0, 0.0), (-1.0, 2.0), (math.nan, 1.0)])
    def test_domain_errors(self, a, b):
        with pytest.raises(ValueError):
            log_beta(a, b)
