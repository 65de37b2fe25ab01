from __future__ import annotations

import json
import math

import pytest

from wirebend.errors import TargetUnreachable, VersionError
from wirebend.machine import (
    MachineProfile,
    SpringbackCurve,
    actual_angle,
    commanded_for,
    default_springback,
    load_profile,
    max_actual_angle,
    min_feed,
    profile_from_dict,
    save_profile,
)


def make_profile(gap: float) -> MachineProfile:
    return MachineProfile(20.0, 10.0, 1.6, gap, 135.0, 15.0, default_springback())


class TestMinFeed:
    def test_zero_gap_is_exactly_zero(self):
        assert min_feed(make_profile(0.0)) == 0.0

    def test_two_mm_gap_matches_scalar_evaluation(self):
        # independent oracle: sqrt(CD^2 - CB^2) instead of CD*sin(acos(CB/CD))
        cb = 20.0 / 2 + 10.0 / 2 + 1.6
        cd = cb + 2.0
        oracle = math.sqrt(cd * cd - cb * cb)
        assert min_feed(make_profile(2.0)) == pytest.approx(oracle, abs=1e-9)
        assert min_feed(make_profile(2.0)) == pytest.approx(8.390470785, abs=1e-6)

    def test_large_gap_approaches_cd(self):
        gap = 1e9
        cb = 16.6
        cd = cb + gap
        assert min_feed(make_profile(gap)) / cd == pytest.approx(1.0, abs=1e-6)

    def test_positive_gap_bounds(self):
        for gap in (0.1, 1.0, 2.0, 5.0, 50.0):
            profile = make_profile(gap)
            cd = 16.6 + gap
            assert 0.0 < min_feed(profile) < cd


class TestActualAngle:
    def test_dead_zone(self, profile):
        assert actual_angle(profile, 0.0) == 0.0
        assert actual_angle(profile, 15.0) == 0.0
        assert actual_angle(profile, 7.5) == 0.0

    def test_at_calibration_sample(self, profile):
        # read back the table the fixture loads
        assert actual_angle(profile, 85.0) == pytest.approx(80.0)
        assert actual_angle(profile, 45.0) == pytest.approx(36.0)

    def test_interpolates_between_samples(self, profile):
        assert actual_angle(profile, 20.0) == pytest.approx(6.0)  # midway 15->25

    def test_clamps_beyond_table(self, profile):
        assert actual_angle(profile, 100.0) == pytest.approx(80.0)

    def test_monotone_non_decreasing(self, profile):
        values = [actual_angle(profile, c) for c in range(0, 136)]
        assert all(b >= a for a, b in zip(values, values[1:]))

    def test_rejects_out_of_range(self, profile):
        with pytest.raises(ValueError):
            actual_angle(profile, -1.0)
        with pytest.raises(ValueError):
            actual_angle(profile, 150.0)


class TestCommandedFor:
    def test_zero_target_emits_no_bend(self, profile):
        assert commanded_for(profile, 0.0) == 0.0

    def test_inverse_of_actual_angle(self, profile):
        # oracle: bisection over actual_angle
        for target in (5.0, 12.0, 36.0, 45.0, 70.0):
            lo, hi = 15.0, 135.0
            for _ in range(60):
                mid = (lo + hi) / 2
                if actual_angle(profile, mid) < target:
                    lo = mid
                else:
                    hi = mid
            assert commanded_for(profile, target) == pytest.approx(hi, abs=1e-9)

    def test_identity_on_sample_points(self, profile):
        for commanded, actual in profile.springback.samples[1:]:
            assert commanded_for(profile, actual) == pytest.approx(commanded, abs=1e-9)

    def test_overshoots_every_positive_target(self, profile):
        for target in (0.5, 1.0, 10.0, 45.0, 79.0):
            commanded = commanded_for(profile, target)
            assert commanded > target
            assert commanded > profile.min_plastic_deg

    def test_unreachable_target(self, profile):
        limit = max_actual_angle(profile)
        with pytest.raises(TargetUnreachable):
            commanded_for(profile, limit + 1.0)


class TestValidation:
    def test_springback_requires_increasing_commanded(self):
        with pytest.raises(ValueError):
            SpringbackCurve(((15, 0), (15, 5)))

    def test_springback_requires_nondecreasing_actual(self):
        with pytest.raises(ValueError):
            SpringbackCurve(((15, 0), (25, 10), (35, 5)))

    def test_springback_first_actual_zero(self):
        with pytest.raises(ValueError):
            SpringbackCurve(((15, 1),))

    def test_profile_curve_must_anchor_at_min_plastic(self):
        with pytest.raises(ValueError):
            MachineProfile(20, 10, 1.6, 2, 135, 10, default_springback())

    def test_angle_window(self):
        with pytest.raises(ValueError):
            MachineProfile(20, 10, 1.6, 2, 200, 15, default_springback())

    def test_positive_lengths(self):
        with pytest.raises(ValueError):
            MachineProfile(0, 10, 1.6, 2, 135, 15, default_springback())
        with pytest.raises(ValueError):
            MachineProfile(20, 10, 1.6, -1, 135, 15, default_springback())


class TestProfileFile:
    def test_round_trip(self, profile, tmp_path):
        path = tmp_path / "m.json"
        save_profile(profile, path)
        loaded = load_profile(path)
        assert loaded == profile

    def test_version_gate(self, profile, tmp_path):
        path = tmp_path / "m.json"
        save_profile(profile, path)
        data = json.loads(path.read_text())
        data["version"] = 99
        with pytest.raises(VersionError):
            profile_from_dict(data)
