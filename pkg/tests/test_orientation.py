import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ovdestripe.image import rotate
from ovdestripe.orientation import (
    CandidateDirection, OrientationUndeterminable, circular_distance, dominant_frequency,
    enumerate_candidates, estimate_orientation, frequency_to_angle, offset_angle,
    select_candidate,
)
from ovdestripe.simulator import (
    StripeSpec, add_stripes, random_angles, rotation_margin, simulate_group, synthetic_base,
)

TABLE_R2 = [
    ((-1, 0), 0.0), ((-2, -1), 26.6), ((-1, -1), 45.0), ((-1, -2), 63.4),
    ((0, -1), 90.0), ((1, -2), 116.6), ((1, -1), 135.0), ((2, -1), 153.4),
]


def brute_force_directions(r):
    """Distinct lattice directions (mod 180 deg) reachable inside the template."""
    dirs = set()
    for a in range(-r, r + 1):
        for b in range(-r, r + 1):
            if (a, b) == (0, 0):
                continue
            # slope as an exact rational, vertical lines as None
            dirs.add(None if b == 0 else Fraction(a, b))
    return dirs


def stripe_image(theta_deg, shape=(512, 512), period=4.0):
    """Cosine stripes whose crests run at ``theta_deg`` from the upward vertical."""
    i, j = np.mgrid[0:shape[0], 0:shape[1]].astype(float)
    t = math.radians(theta_deg)
    across = -i * math.sin(t) + j * math.cos(t)
    return np.cos(2 * np.pi * across / period)


class TestCandidates:
    def test_r2_table(self):
        cands = enumerate_candidates(2)
        assert [((c.a, c.b), round(c.theta_deg, 1)) for c in cands] == TABLE_R2

    def test_r1(self):
        assert [c.theta_deg for c in enumerate_candidates(1)] == [0.0, 45.0, 90.0, 135.0]

    def test_r9_count_and_gap(self):
        cands = enumerate_candidates(9)
        expected = 1 + sum(sum(1 for a in range(-9, 10) if math.gcd(abs(a), b) == 1)
                           for b in range(1, 10))
        assert len(cands) == expected == len(brute_force_directions(9))
        angles = [c.theta_deg for c in cands] + [180.0]
        assert max(np.diff(angles)) <= 6.4

    @pytest.mark.parametrize("r", range(1, 16))
    def test_invariants(self, r):
        cands = enumerate_candidates(r)
        angles = [c.theta_deg for c in cands]
        assert angles == sorted(angles)
        assert len(set(np.round(angles, 9))) == len(angles)
        assert 0.0 in angles and 90.0 in angles
        for c in cands:
            assert 0 <= c.theta_deg < 180
            assert c.b <= 0
            if c.b == 0:
                assert c.a == -1
            else:
                assert math.gcd(abs(c.a), abs(c.b)) == 1
        # mirror symmetry: theta and 180 - theta both present
        for t in angles:
            if t not in (0.0, 90.0):
                assert np.min(np.abs(np.array(angles) - (180.0 - t))) < 1e-9

    def test_r0_rejected(self):
        with pytest.raises(ValueError):
            enumerate_candidates(0)

    def test_candidate_is_an_operator(self):
        c = enumerate_candidates(2)[1]
        assert isinstance(c, CandidateDirection)
        assert (c.a, c.b) == (-2, -1)


class TestDominantFrequency:
    def test_vertical_tone(self):
        j = np.arange(64)
        e = np.tile(np.cos(2 * np.pi * 5 * j / 64), (48, 1))
        assert dominant_frequency(e) == (0, 5)

    def test_horizontal_tone(self):
        i = np.arange(48)
        e = np.tile(np.cos(2 * np.pi * 3 * i / 48)[:, None], (1, 64))
        assert dominant_frequency(e) == (-3, 0)

    def test_two_tones(self):
        i, j = np.mgrid[0:64, 0:64]
        e = np.cos(2 * np.pi * (4 * i + 7 * j) / 64) + 0.5 * np.cos(2 * np.pi * 9 * j / 64)
        du, dv = dominant_frequency(e)
        # canonical half-plane representative of (4, 7)
        assert (du, dv) == (-4, -7)

    def test_ties_break_lexicographically(self):
        i, j = np.mgrid[0:32, 0:32]
        e = np.cos(2 * np.pi * 3 * i / 32) + np.cos(2 * np.pi * 5 * j / 32)
        assert dominant_frequency(e) == (-3, 0)

    def test_zero_image_undeterminable(self):
        with pytest.raises(OrientationUndeterminable):
            dominant_frequency(np.zeros((16, 16)))

    def test_constant_image_undeterminable(self):
        with pytest.raises(OrientationUndeterminable):
            dominant_frequency(np.full((16, 16), 3.0))


class TestFrequencyToAngle:
    @pytest.mark.parametrize("shape", [(64, 64), (100, 37)])
    def test_axes(self, shape):
        assert frequency_to_angle(0, 5, *shape) == pytest.approx(0.0)
        assert frequency_to_angle(-3, 0, *shape) == pytest.approx(90.0)

    def test_oblique_534(self):
        e = stripe_image(34.0)
        theta = frequency_to_angle(*dominant_frequency(e), 512, 512)
        assert circular_distance(theta, 34.0) <= 0.5

    def test_non_square_grid(self):
        e = stripe_image(30.0, shape=(256, 512))
        theta = frequency_to_angle(*dominant_frequency(e), 256, 512)
        assert circular_distance(theta, 30.0) <= 0.5

    def test_candidate_offsets_map_to_their_angle(self):
        for c in enumerate_candidates(5):
            # a frequency perpendicular to (a, b) on a square grid
            du, dv = c.b, -c.a
            assert circular_distance(frequency_to_angle(du, dv, 97, 97), c.theta_deg) < 1e-9


class TestSelectCandidate:
    def test_nearest_r2(self):
        c = select_candidate(27.0, enumerate_candidates(2))
        assert (c.a, c.b) == (-2, -1)
        assert c.theta_deg == pytest.approx(26.565, abs=1e-3)

    def test_wraps_around_180(self):
        assert select_candidate(179.5, enumerate_candidates(2)).theta_deg == 0.0

    @pytest.mark.parametrize("r", [1, 2, 9, 15])
    def test_ninety_exact(self, r):
        assert select_candidate(90.0, enumerate_candidates(r)).theta_deg == 90.0

    def test_tie_goes_to_smaller_angle(self):
        cands = enumerate_candidates(1)
        assert select_candidate(22.5, cands).theta_deg == 0.0
        # 157.5 is equidistant from 135 and 0 (= 180); the smaller angle wins
        assert select_candidate(157.5, cands).theta_deg == 0.0

    def test_empty(self):
        with pytest.raises(ValueError):
            select_candidate(10.0, [])

    @settings(max_examples=50, deadline=None)
    @given(theta=st.floats(0, 180, exclude_max=True), seed=st.integers(0, 1000))
    def test_order_invariant(self, theta, seed):
        cands = enumerate_candidates(9)
        shuffled = list(cands)
        np.random.default_rng(seed).shuffle(shuffled)
        assert select_candidate(theta, shuffled) == select_candidate(theta, cands)

    @settings(max_examples=50, deadline=None)
    @given(theta=st.floats(0, 180, exclude_max=True))
    def test_minimizes_distance(self, theta):
        cands = enumerate_candidates(9)
        best = select_candidate(theta, cands)
        assert all(circular_distance(best.theta_deg, theta) <= circular_distance(c.theta_deg, theta)
                   for c in cands)


def test_offset_angle_range():
    assert offset_angle(-1, 0) == 0.0
    assert offset_angle(1, 0) == 0.0
    assert offset_angle(0, 1) == pytest.approx(90.0)


class TestEstimateOrientation:
    def test_flat_plus_vertical_stripes(self):
        clean = np.full((128, 128), 0.5)
        y, _ = add_stripes(clean, StripeSpec("random", "vertical", seed=3))
        res = estimate_orientation(y)
        assert circular_distance(res.theta_stripe_deg, 0.0) < 0.5
        assert (res.chosen.a, res.chosen.b) == (-1, 0)

    def test_zero_image(self):
        with pytest.raises(OrientationUndeterminable):
            estimate_orientation(np.zeros((32, 32)))

    def test_stripe_free_image_does_not_crash(self):
        res = estimate_orientation(synthetic_base(128, seed=4))
        assert 0 <= res.theta_stripe_deg < 180

    def test_rotated_vertical_stripes_16(self):
        clean = synthetic_base(300, seed=1)
        y, _ = add_stripes(clean, StripeSpec("random", "vertical", seed=1))
        res = estimate_orientation(rotate(y, 16.0))
        assert circular_distance(res.theta_stripe_deg, 16.0) <= 1.0

    def test_ten_random_rotations(self):
        base = synthetic_base(rotation_margin(256), seed=8)
        spec = StripeSpec("random", "vertical", seed=8)
        angles = random_angles(10, seed=8, low=0.0, high=180.0)
        errs = [circular_distance(estimate_orientation(c.degraded).theta_stripe_deg, c.angle_deg)
                for c in simulate_group(base, spec, angles, 256)]
        assert np.mean(errs) <= 0.5

    def test_rotational_consistency(self):
        base = synthetic_base(rotation_margin(256), seed=2)
        spec = StripeSpec("random", "vertical", seed=2)
        angles = np.arange(5.0, 180.0, 10.0)
        for case in simulate_group(base, spec, angles, 256):
            est = estimate_orientation(case.degraded).theta_stripe_deg
            assert circular_distance(est, case.angle_deg) <= 1.0, case.angle_deg
