import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sigscore.tensor_algebra import (
    ContractError,
    TruncatedTensor,
    level_index,
    tensor_add,
    tensor_exp,
    tensor_log,
    tensor_mul,
    unit,
    zero,
)

from conftest import naive_mul, random_tensor


def vec(d, n, level1, level0=0.0):
    levels = [np.array([level0]), np.asarray(level1, float)]
    levels += [np.zeros(d ** k) for k in range(2, n + 1)]
    return TruncatedTensor(d, n, tuple(levels))


class TestLayout:
    def test_level_sizes(self):
        t = zero(3, 3)
        assert [lvl.size for lvl in t.levels] == [1, 3, 9, 27]

    def test_row_major_offsets(self):
        assert level_index((1, 1), 2) == 0
        assert level_index((1, 2), 2) == 1
        assert level_index((2, 1), 2) == 2
        assert level_index((2, 1, 3), 4) == (1 * 4 + 0) * 4 + 2

    def test_wrong_level_size_rejected(self):
        with pytest.raises(ContractError):
            TruncatedTensor(2, 2, (np.ones(1), np.zeros(2), np.zeros(3)))

    def test_wrong_level_count_rejected(self):
        with pytest.raises(ContractError):
            TruncatedTensor(2, 2, (np.ones(1), np.zeros(2)))

    def test_levels_are_read_only_copies(self):
        lvl = np.zeros(2)
        t = TruncatedTensor(2, 1, (np.ones(1), lvl))
        lvl[0] = 5.0
        assert t[1] == 0.0
        with pytest.raises(ValueError):
            t.levels[1][0] = 1.0


class TestMul:
    def test_unit_is_identity(self, rng):
        x = random_tensor(rng, 3, 3)
        assert tensor_mul(unit(3, 3), x).allclose(x, atol=0)
        assert tensor_mul(x, unit(3, 3)).allclose(x, atol=0)

    def test_single_outer_product(self):
        out = tensor_mul(vec(2, 2, [1, 0]), vec(2, 2, [0, 1]))
        assert out.scalar == 0.0
        assert np.all(out.level(1) == 0)
        assert out[1, 2] == 1.0
        assert np.count_nonzero(out.level(2)) == 1

    def test_one_plus_e1_times_one_plus_e2(self):
        out = tensor_mul(vec(2, 2, [1, 0], 1.0), vec(2, 2, [0, 1], 1.0))
        assert out.scalar == 1.0
        np.testing.assert_array_equal(out.level(1), [1, 1])
        np.testing.assert_array_equal(out.level(2), [0, 1, 0, 0])

    def test_mismatch_rejected(self):
        with pytest.raises(ContractError):
            tensor_mul(zero(2, 2), zero(3, 2))
        with pytest.raises(ContractError):
            tensor_mul(zero(2, 2), zero(2, 3))

    def test_matches_naive_reference(self, rng):
        for _ in range(25):
            a, b = random_tensor(rng, 2, 3), random_tensor(rng, 2, 3)
            assert tensor_mul(a, b).max_abs_diff(naive_mul(a, b)) < 1e-12

    @pytest.mark.parametrize("d,n", [(1, 4), (3, 2), (4, 3)])
    def test_matches_naive_reference_other_shapes(self, rng, d, n):
        a, b = random_tensor(rng, d, n), random_tensor(rng, d, n)
        assert tensor_mul(a, b).max_abs_diff(naive_mul(a, b)) < 1e-12

    def test_associative_and_distributive(self, rng):
        for _ in range(20):
            a, b, c = (random_tensor(rng, 3, 3) for _ in range(3))
            left = tensor_mul(tensor_mul(a, b), c)
            right = tensor_mul(a, tensor_mul(b, c))
            scale = max(1.0, max(np.abs(lvl).max() for lvl in left.levels))
            assert left.max_abs_diff(right) <= 1e-10 * scale
            dist = tensor_mul(a, tensor_add(b, c))
            split = tensor_add(tensor_mul(a, b), tensor_mul(a, c))
            assert dist.max_abs_diff(split) <= 1e-10 * scale


class TestExpLog:
    def test_exp_zero_is_unit(self):
        assert tensor_exp(zero(3, 3)).allclose(unit(3, 3), atol=0)

    def test_exp_basis_vector(self):
        out = tensor_exp(vec(2, 2, [1, 0]))
        np.testing.assert_array_equal(out.level(1), [1, 0])
        np.testing.assert_array_equal(out.level(2), [0.5, 0, 0, 0])

    def test_exp_cubic_term(self):
        a, b = 0.7, -1.3
        out = tensor_exp(vec(2, 3, [a, b]))
        assert out[1, 1, 1] == pytest.approx(a ** 3 / 6, abs=1e-15)
        assert out[2, 1, 2] == pytest.approx(b * a * b / 6, abs=1e-15)

    def test_exp_requires_zero_scalar(self):
        with pytest.raises(ContractError):
            tensor_exp(unit(2, 2))

    def test_log_unit_is_zero(self):
        assert tensor_log(unit(3, 3)).allclose(zero(3, 3), atol=0)

    def test_log_requires_unit_scalar(self):
        with pytest.raises(ContractError):
            tensor_log(zero(2, 2))

    def test_log_of_product_of_exps_is_bch(self):
        x = tensor_mul(tensor_exp(vec(2, 2, [1, 0])), tensor_exp(vec(2, 2, [0, 1])))
        out = tensor_log(x)
        np.testing.assert_allclose(out.level(1), [1, 1], atol=1e-15)
        np.testing.assert_allclose(out.level(2), [0, 0.5, -0.5, 0], atol=1e-15)

    def test_exp_matches_power_series(self, rng):
        x = random_tensor(rng, 2, 4, scalar=0.0)
        series = unit(2, 4)
        power = unit(2, 4)
        fact = 1.0
        for k in range(1, 5):
            power = tensor_mul(power, x)
            fact *= k
            series = tensor_add(series, power * (1.0 / fact))
        assert tensor_exp(x).max_abs_diff(series) < 1e-14

    def test_round_trip(self, rng):
        for _ in range(50):
            d, n = int(rng.integers(1, 5)), int(rng.integers(1, 5))
            x = random_tensor(rng, d, n, scalar=0.0)
            assert tensor_log(tensor_exp(x)).max_abs_diff(x) < 1e-12

    def test_group_inverse(self, rng):
        for _ in range(50):
            x = random_tensor(rng, 3, 3, scalar=0.0)
            prod = tensor_mul(tensor_exp(x), tensor_exp(-x))
            assert prod.max_abs_diff(unit(3, 3)) < 1e-10


coeff = st.floats(-1, 1, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(d=st.integers(1, 4), n=st.integers(1, 4), data=st.data())
def test_exp_log_inverse_property(d, n, data):
    size = sum(d ** k for k in range(1, n + 1))
    flat = data.draw(st.lists(coeff, min_size=size, max_size=size))
    levels, start = [np.zeros(1)], 0
    for k in range(1, n + 1):
        levels.append(np.array(flat[start:start + d ** k]))
        start += d ** k
    x = TruncatedTensor(d, n, tuple(levels))
    assert tensor_log(tensor_exp(x)).max_abs_diff(x) < 1e-12
    g = tensor_exp(x)
    assert tensor_exp(tensor_log(g)).max_abs_diff(g) < 1e-12
