import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ovdestripe.image import (
    InvalidImageError, OffsetOperator, apply_offset_diff, apply_offset_diff_adjoint,
    center_crop, inscribed_extent, normalize, operator_spectrum, rotate, rotated_shape,
)


def dense_diff_matrix(rows, cols, op):
    """Explicit matrix of the periodic offset difference on a flattened grid."""
    n = rows * cols
    m = np.zeros((n, n))
    for i in range(rows):
        for j in range(cols):
            k = i * cols + j
            m[k, k] += 1.0
            m[k, ((i + op.a) % rows) * cols + (j + op.b) % cols] -= 1.0
    return m


class TestNormalize:
    def test_affine(self):
        np.testing.assert_allclose(normalize([[0, 50, 100]]), [[0.0, 0.5, 1.0]])

    def test_negative_values(self):
        np.testing.assert_allclose(normalize([[-1, 0, 3]]), [[0.0, 0.25, 1.0]])

    def test_constant_maps_to_zero(self):
        np.testing.assert_array_equal(normalize([[7, 7, 7]]), [[0.0, 0.0, 0.0]])

    @pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
    def test_rejects_non_finite(self, bad):
        with pytest.raises(InvalidImageError):
            normalize([[0.0, bad]])

    def test_rejects_wrong_rank(self):
        with pytest.raises(InvalidImageError):
            normalize([1.0, 2.0])


def test_offset_operator_rejects_zero():
    with pytest.raises(ValueError):
        OffsetOperator(0, 0)


class TestOffsetDiff:
    def test_row_example(self):
        out = apply_offset_diff([[1.0, 2.0, 3.0]], OffsetOperator(0, -1))
        np.testing.assert_array_equal(out, [[-2.0, 1.0, 1.0]])

    def test_checkerboard_diagonal(self):
        out = apply_offset_diff([[0.0, 1.0], [1.0, 0.0]], OffsetOperator(-1, -1))
        np.testing.assert_array_equal(out, np.zeros((2, 2)))

    @pytest.mark.parametrize("a,b", [(-1, 0), (0, -1), (-2, -1), (3, -7), (-9, -4)])
    def test_constant_in_kernel(self, a, b):
        img = np.full((12, 9), 0.37)
        op = OffsetOperator(a, b)
        assert np.all(apply_offset_diff(img, op) == 0)
        assert np.all(apply_offset_diff_adjoint(img, op) == 0)

    @pytest.mark.parametrize("a,b", [(-1, 0), (0, -1), (-2, -1), (1, -3), (4, -5)])
    def test_matches_dense_matrix(self, a, b):
        rng = np.random.default_rng(abs(a * 10 + b))
        op = OffsetOperator(a, b)
        u = rng.standard_normal((5, 7))
        m = dense_diff_matrix(5, 7, op)
        np.testing.assert_allclose(apply_offset_diff(u, op).ravel(), m @ u.ravel(), atol=1e-14)
        np.testing.assert_allclose(apply_offset_diff_adjoint(u, op).ravel(), m.T @ u.ravel(),
                                   atol=1e-14)

    def test_adjoint_row_example(self):
        op = OffsetOperator(0, -1)
        v = np.array([[-2.0, 1.0, 1.0]])
        expected = dense_diff_matrix(1, 3, op).T @ v.ravel()
        np.testing.assert_allclose(apply_offset_diff_adjoint(v, op).ravel(), expected)
        # D^T = [[1,0,-1],[-1,1,0],[0,-1,1]]^T applied by hand
        np.testing.assert_allclose(expected, [-3.0, 0.0, 3.0])

    def test_adjoint_identity_double_sum(self):
        rng = np.random.default_rng(0)
        op = OffsetOperator(-2, -1)
        u = rng.standard_normal((4, 4))
        v = rng.standard_normal((4, 4))
        du = apply_offset_diff(u, op)
        lhs = sum(du[i, j] * v[i, j] for i in range(4) for j in range(4))
        dtv = apply_offset_diff_adjoint(v, op)
        rhs = sum(u[i, j] * dtv[i, j] for i in range(4) for j in range(4))
        assert abs(lhs - rhs) < 1e-12


offsets = st.tuples(st.integers(-9, 9), st.integers(-9, 9)).filter(lambda ab: ab != (0, 0))


@settings(max_examples=100, deadline=None)
@given(ab=offsets, rows=st.integers(1, 16), cols=st.integers(1, 16), seed=st.integers(0, 2**32 - 1))
def test_adjointness_property(ab, rows, cols, seed):
    rng = np.random.default_rng(seed)
    op = OffsetOperator(*ab)
    u = rng.standard_normal((rows, cols))
    v = rng.standard_normal((rows, cols))
    lhs = np.vdot(apply_offset_diff(u, op), v)
    rhs = np.vdot(u, apply_offset_diff_adjoint(v, op))
    assert abs(lhs - rhs) < 1e-10


@settings(max_examples=60, deadline=None)
@given(ab=offsets, rows=st.integers(1, 16), cols=st.integers(1, 16), seed=st.integers(0, 2**32 - 1))
def test_spectral_equivalence_property(ab, rows, cols, seed):
    rng = np.random.default_rng(seed)
    op = OffsetOperator(*ab)
    g = rng.standard_normal((rows, cols))
    lam = operator_spectrum(op, rows, cols)
    via_fft = np.fft.ifft2(lam * np.fft.fft2(g)).real
    assert np.max(np.abs(via_fft - apply_offset_diff(g, op))) < 1e-9


class TestOperatorSpectrum:
    @pytest.mark.parametrize("a,b", [(-1, 0), (0, -1), (-2, -1), (5, -3)])
    def test_dc_is_zero(self, a, b):
        assert operator_spectrum(OffsetOperator(a, b), 6, 10)[0, 0] == 0

    def test_random_8x8_against_fft(self):
        rng = np.random.default_rng(3)
        g = rng.random((8, 8))
        op = OffsetOperator(-2, -1)
        lhs = np.fft.fft2(apply_offset_diff(g, op))
        rhs = operator_spectrum(op, 8, 8) * np.fft.fft2(g)
        assert np.max(np.abs(lhs - rhs)) < 1e-10

    def test_horizontal_modulus(self):
        n = 13
        lam = operator_spectrum(OffsetOperator(0, -1), 1, n)[0]
        v = np.arange(n)
        np.testing.assert_allclose(np.abs(lam) ** 2, 2 - 2 * np.cos(2 * np.pi * v / n), atol=1e-12)

    def test_rejects_empty_grid(self):
        with pytest.raises(ValueError):
            operator_spectrum(OffsetOperator(0, -1), 0, 4)


def smooth_image(rows, cols, seed=0):
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[0:rows, 0:cols] / max(rows, cols)
    img = np.zeros((rows, cols))
    for _ in range(4):
        f = rng.uniform(0.5, 2.0, 2)
        img += np.cos(2 * np.pi * (f[0] * x + f[1] * y) + rng.uniform(0, 6))
    return normalize(img)


class TestRotate:
    def test_zero_angle_is_identity(self):
        img = np.random.default_rng(0).random((40, 33))
        out = rotate(img, 0.0)
        assert out.shape == img.shape
        np.testing.assert_array_equal(out, img)

    @pytest.mark.parametrize("n", [20, 31])
    def test_quarter_turn_nearest(self, n):
        img = np.random.default_rng(n).random((n, n))
        np.testing.assert_array_equal(rotate(img, 90.0, "nearest"), np.rot90(img))

    def test_quarter_turn_bilinear_is_exact_too(self):
        img = np.random.default_rng(1).random((24, 24))
        np.testing.assert_allclose(rotate(img, 90.0), np.rot90(img), atol=1e-12)

    def test_crop_has_no_padding(self):
        # a strictly positive image: any padding constant would show up as a 0
        img = 1.0 + np.random.default_rng(2).random((64, 80))
        for angle in (5.0, 17.3, 45.0, 71.0, 133.0):
            out = rotate(img, angle)
            assert out.min() >= 1.0

    def test_crop_size_at_45(self):
        out = rotate(np.ones((101, 101)), 45.0)
        # inscribed square of a square rotated by 45 deg has side L / sqrt(2)
        assert abs(out.shape[0] - 1 - 100 / np.sqrt(2)) <= 2
        assert out.shape[0] % 2 == 1

    def test_counter_clockwise_sense(self):
        img = np.zeros((41, 41))
        img[5, 20] = 1.0  # a dot straight above the center
        out = rotate(img, 90.0, "nearest")
        i, j = np.unravel_index(np.argmax(out), out.shape)
        # counter-clockwise by 90 deg moves "up" to "left"
        assert (i, j) == (20, 5)

    def test_degenerate_crop(self):
        with pytest.raises(InvalidImageError):
            rotate(np.ones((18, 18)), 45.0)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            rotate(np.ones((32, 32)), 10.0, method="bicubic")

    @pytest.mark.parametrize("angle", [7.0, 23.5, 38.0, -12.0])
    def test_round_trip_smooth(self, angle):
        img = smooth_image(128, 128)
        back = rotate(rotate(img, angle), -angle)
        ref = center_crop(img, back.shape)
        assert np.mean(np.abs(back - ref)) < 0.02

    def test_inscribed_extent_identity_and_swap(self):
        assert inscribed_extent(30, 20, 0.0) == (30, 20)
        w, h = inscribed_extent(30, 20, 90.0)
        assert (w, h) == (20, 30)


@pytest.mark.parametrize("angle", [0.0, 7.5, 30.0, 45.0, 90.0, 121.0])
@pytest.mark.parametrize("shape", [(40, 40), (41, 60)])
def test_rotated_shape_predicts_rotate(angle, shape):
    assert rotated_shape(shape, angle) == rotate(np.zeros(shape), angle).shape
