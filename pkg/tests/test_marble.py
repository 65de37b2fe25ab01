from __future__ import annotations

import math

import numpy as np
import pytest

from wirebend.compiler import check_path_constraints
from wirebend.errors import InfeasibleTrack
from wirebend.machine import min_feed
from wirebend.marble import TrackSpec, clip_stations, generate_track
from wirebend.paths import Polyline3, SimplifyParams, simplify


def straight_center(length=500.0, height=300.0):
    return Polyline3.from_list([[0, height, 0], [length, height, 0]])


class TestGenerateTrack:
    def test_four_rails_default_gauge_and_clips(self, profile):
        track = generate_track(TrackSpec(center_path=straight_center()), profile)
        assert len(track.rails) == 4
        gauge = np.linalg.norm(track.rails[0].points[0] - track.rails[1].points[0])
        assert gauge == pytest.approx(16.0 * math.sin(math.radians(45.0)), abs=1e-9)
        assert gauge == pytest.approx(11.3137, abs=1e-3)
        assert len(track.clip_positions) == 11
        stations = [c.point[0] for c in track.clip_positions]
        assert stations == pytest.approx(list(np.arange(0.0, 501.0, 50.0)))

    def test_marble_cannot_fall_through(self, profile):
        for contact in (30.0, 45.0, 60.0, 89.0):
            spec = TrackSpec(center_path=straight_center(), rail_contact_deg=contact)
            track = generate_track(spec, profile)
            gauge = np.linalg.norm(track.rails[0].points[0] - track.rails[1].points[0])
            assert gauge < spec.marble_diameter_mm

    def test_short_path_gets_two_clips(self, profile):
        spec = TrackSpec(center_path=straight_center(length=30.0))
        track = generate_track(spec, profile)
        assert len(track.clip_positions) == 2
        assert track.clip_positions[0].point[0] == pytest.approx(0.0)
        assert track.clip_positions[1].point[0] == pytest.approx(30.0)

    def test_rails_equidistant_on_straights(self, profile):
        track = generate_track(TrackSpec(center_path=straight_center()), profile)
        center = straight_center().points
        for rail in track.rails:
            d = np.linalg.norm(rail.points - center, axis=1)
            assert np.ptp(d) < 1e-6

    def test_upper_rails_seat_on_marble_sphere(self, profile):
        spec = TrackSpec(center_path=straight_center())
        track = generate_track(spec, profile)
        center = straight_center().points
        for rail in track.rails[:2]:
            d = np.linalg.norm(rail.points - center, axis=1)
            assert d == pytest.approx(spec.marble_diameter_mm / 2.0, abs=1e-9)

    def test_supports_at_both_ends_reach_floor(self, profile):
        track = generate_track(TrackSpec(center_path=straight_center()), profile)
        assert len(track.supports) == 2
        for tower in track.supports:
            ys = tower.points[:, 1]
            assert ys.min() == pytest.approx(0.0)
            assert ys.max() > 250.0

    def test_supports_and_rails_fabricable(self, profile):
        track = generate_track(TrackSpec(center_path=straight_center()), profile)
        params = SimplifyParams(
            smoothing_strength=0.0,
            min_reduction_ratio=0.0,
            min_feed_mm=min_feed(profile),
            min_bend_deg=profile.min_plastic_deg,
        )
        for wire in track.rails + track.supports:
            cleaned = simplify(wire, params)
            assert check_path_constraints(cleaned, profile) == []

    def test_curved_path_rails_follow(self, profile):
        center = Polyline3.from_list(
            [[0, 300, 0], [200, 300, 0], [200, 280, 200], [0, 260, 200]]
        )
        track = generate_track(TrackSpec(center_path=center), profile)
        for rail in track.rails:
            assert rail.n_points == center.n_points

    def test_too_tight_curvature_rejected(self, profile):
        # consecutive triple with a ~5 mm circumradius; marble radius is 8
        center = Polyline3.from_list([[0, 300, 0], [7, 300, 5], [14, 300, 0]])
        with pytest.raises(InfeasibleTrack):
            generate_track(TrackSpec(center_path=center), profile)

    def test_track_below_floor_rejected(self, profile):
        with pytest.raises(InfeasibleTrack):
            generate_track(TrackSpec(center_path=straight_center(height=5.0)), profile)

    def test_marble_must_exceed_wire(self, profile):
        spec = TrackSpec(center_path=straight_center(), marble_diameter_mm=3.0)
        with pytest.raises(InfeasibleTrack):
            generate_track(spec, profile)

    def test_clip_frames_orthonormal(self, profile):
        track = generate_track(TrackSpec(center_path=straight_center()), profile)
        for clip in track.clip_positions:
            frame = np.asarray(clip.frame)
            assert np.allclose(frame @ frame.T, np.eye(3), atol=1e-9)


class TestClipStations:
    def test_exact_multiple_includes_end_once(self):
        assert clip_stations(500.0, 50.0) == pytest.approx(list(np.arange(0.0, 501.0, 50.0)))

    def test_non_multiple_appends_end(self):
        assert clip_stations(120.0, 50.0) == pytest.approx([0.0, 50.0, 100.0, 120.0])

    def test_short_path(self):
        assert clip_stations(30.0, 50.0) == pytest.approx([0.0, 30.0])
