import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import log_mp
from rsfeat.kernels import default_kernels, log_value, make_log_kernel
from rsfeat.pipeline import PipelineConfig


def test_center_coefficient_sigma_one():
    k = make_log_kernel(1.0, 5, dc_correct=False)
    assert k.coeffs[2, 2] == pytest.approx(-1 / math.pi, rel=1e-15)
    assert k.coeffs[2, 2] == pytest.approx(-0.3183099, abs=1e-7)


def test_zero_of_radial_factor():
    # x^2 + y^2 = 2 sigma^2 at offset (1, 1) for sigma = 1
    k = make_log_kernel(1.0, 5, dc_correct=False)
    assert k.coeffs[3, 3] == 0.0
    assert k.coeffs[1, 1] == 0.0


@pytest.mark.parametrize("sigma", [0.3, 0.5, 1.0, 2.7, 20.0])
def test_dc_corrected_sums_to_zero(sigma):
    assert abs(make_log_kernel(sigma, 5, True).coeffs.sum()) <= 1e-12


@pytest.mark.parametrize("sigma", [0.5, 1.0, 20.0])
@pytest.mark.parametrize("size", [3, 5, 7])
def test_matches_high_precision(sigma, size):
    k = make_log_kernel(sigma, size, dc_correct=False)
    r = size // 2
    for y in range(-r, r + 1):
        for x in range(-r, r + 1):
            ref = float(log_mp(x, y, sigma))
            got = k.coeffs[r + y, r + x]
            if ref == 0.0:
                assert got == 0.0
            else:
                assert abs(got - ref) <= 1e-12 * abs(ref)


@settings(max_examples=80, deadline=None)
@given(st.floats(0.3, 25.0), st.sampled_from([3, 5, 7, 9]), st.booleans())
def test_eight_fold_symmetry(sigma, size, dc):
    c = make_log_kernel(sigma, size, dc).coeffs
    assert np.array_equal(c, c.T)
    assert np.array_equal(c, c[::-1, ::-1])
    assert np.array_equal(c, c[::-1, :])


@settings(max_examples=40, deadline=None)
@given(st.floats(0.3, 25.0))
def test_monotone_truncation(sigma):
    small = make_log_kernel(sigma, 5, False).coeffs
    big = make_log_kernel(sigma, 9, False).coeffs
    assert np.array_equal(big[2:7, 2:7], small)


def test_scalar_form_agrees():
    k = make_log_kernel(0.5, 5, False)
    assert k.coeffs[2, 4] == pytest.approx(log_value(2, 0, 0.5), rel=1e-15)


@pytest.mark.parametrize("sigma, size", [(0, 5), (-1, 5), (1, 4), (1, 1), (1, 2.5)])
def test_invalid_arguments(sigma, size):
    with pytest.raises(ValueError):
        make_log_kernel(sigma, size)


class TestDefaultKernels:
    def test_defaults(self):
        low, high = default_kernels(PipelineConfig())
        assert low.size == high.size == 5
        assert (low.sigma, high.sigma) == (0.5, 20.0)
        assert not np.array_equal(low.coeffs, high.coeffs)
        # 1/(pi sigma^4) falls with sigma; compare uncorrected centres
        raw_low = make_log_kernel(low.sigma, 5, False).coeffs[2, 2]
        raw_high = make_log_kernel(high.sigma, 5, False).coeffs[2, 2]
        assert abs(raw_low) > abs(raw_high)
        assert abs(low.coeffs[2, 2]) > abs(high.coeffs[2, 2])

    def test_size_override(self):
        low, high = default_kernels(PipelineConfig(kernel_size=7))
        assert low.coeffs.shape == high.coeffs.shape == (7, 7)

    def test_equal_parameters_equal_kernels(self):
        low, high = default_kernels(PipelineConfig(log_low=2.0, log_high=2.0))
        assert low == high

    def test_variance_reading(self):
        low, high = default_kernels(PipelineConfig(interpret_as_variance=True))
        assert low.sigma == pytest.approx(math.sqrt(0.5))
        assert high.sigma == pytest.approx(math.sqrt(20))


def test_format_grid_nine_digits():
    text = make_log_kernel(1.0, 3, False).format_grid()
    rows = text.splitlines()
    assert len(rows) == 3 and all(len(r.split()) == 3 for r in rows)
    assert rows[1].split()[1] == "-0.318309886"
