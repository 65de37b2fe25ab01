"""Marble track generation: four parallel rails, truss supports and clip
positions along a drawn centre path.

The centre path traces the marble centre. The two upper rails carry the
marble and sit where a sphere of the given diameter contacts them at the
configured contact angle; the two lower rails stiffen the channel one
marble radius below. 3D-printed clips lock the four rails together at a
fixed arc-length spacing; their positions and frames are exported for
printing, mesh generation happens elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleTrack
from .machine import MachineProfile, min_feed
from .paths import Polyline3

UP = np.array([0.0, 1.0, 0.0])


@dataclass(frozen=True)
class TrackSpec:
    center_path: Polyline3
    marble_diameter_mm: float = 16.0
    clip_spacing_mm: float = 50.0
    rail_contact_deg: float = 45.0

    def __post_init__(self):
        if self.marble_diameter_mm <= 0:
            raise ValueError("marble_diameter_mm must be > 0")
        if self.clip_spacing_mm <= 0:
            raise ValueError("clip_spacing_mm must be > 0")
        if not 0.0 < self.rail_contact_deg < 90.0:
            raise ValueError("rail_contact_deg must be in (0, 90)")


@dataclass(frozen=True)
class ClipPosition:
    point: tuple[float, float, float]
    # frame rows: tangent, normal (toward track up), binormal (lateral)
    frame: tuple[tuple[float, float, float], ...]


@dataclass
class TrackSet:
    rails: list[Polyline3]
    supports: list[Polyline3]
    clip_positions: list[ClipPosition] = field(default_factory=list)


def _vertex_tangents(pts: np.ndarray) -> np.ndarray:
    vec = np.diff(pts, axis=0)
    d = vec / np.linalg.norm(vec, axis=1)[:, None]
    tangents = np.empty_like(pts)
    tangents[0] = d[0]
    tangents[-1] = d[-1]
    if len(pts) > 2:
        mid = d[:-1] + d[1:]
        nrm = np.linalg.norm(mid, axis=1)
        bad = nrm < 1e-9
        mid[bad] = d[:-1][bad]
        nrm[bad] = 1.0
        tangents[1:-1] = mid / nrm[:, None]
    return tangents


def _lateral(tangent: np.ndarray) -> np.ndarray:
    lat = np.cross(UP, tangent)
    n = np.linalg.norm(lat)
    if n < 1e-9:
        # vertical tangent: fall back to a fixed horizontal axis
        lat = np.cross(tangent, np.array([1.0, 0.0, 0.0]))
        n = np.linalg.norm(lat)
        if n < 1e-9:
            lat = np.array([0.0, 0.0, 1.0])
            n = 1.0
    return lat / n


def _min_curvature_radius(pts: np.ndarray) -> float:
    """Smallest circumradius over consecutive vertex triples; inf if straight."""
    best = math.inf
    for i in range(1, len(pts) - 1):
        a, b, c = pts[i - 1], pts[i], pts[i + 1]
        ab, bc, ca = b - a, c - b, a - c
        area2 = np.linalg.norm(np.cross(ab, bc))
        if area2 < 1e-12:
            continue
        r = (
            np.linalg.norm(ab) * np.linalg.norm(bc) * np.linalg.norm(ca) / (2.0 * area2)
        )
        best = min(best, float(r))
    return best


def clip_stations(arc_length: float, spacing: float) -> list[float]:
    """Arc-length stations: every multiple of the spacing, plus the far end."""
    stations = []
    s = 0.0
    while s < arc_length - 1e-9:
        stations.append(s)
        s += spacing
    stations.append(arc_length)
    return stations


def _point_at_arc_length(pts: np.ndarray, seg_len: np.ndarray, s: float):
    """Point and segment index at arc length ``s`` along the polyline."""
    remaining = s
    for i, length in enumerate(seg_len):
        if remaining <= length or i == len(seg_len) - 1:
            t = min(max(remaining / length, 0.0), 1.0)
            return pts[i] + t * (pts[i + 1] - pts[i]), i
        remaining -= length
    return pts[-1], len(seg_len) - 1


def _support_tower(
    base_center: np.ndarray, top_y: float, lateral: np.ndarray, width: float, profile: MachineProfile
) -> Polyline3:
    """Zig-zag truss from the floor plane up to the rail height.

    A single wire alternating between two posts ``width`` apart; rung
    height is chosen so every strut clears the minimum feed and every
    zig-zag bend stays inside the machine's angle window.
    """
    height = top_y
    if height <= 0:
        raise InfeasibleTrack("track lies at or below the floor plane; no room for supports")
    rung = max(1.2 * min_feed(profile), 12.0)
    n = max(1, int(math.ceil(height / rung)))
    ys = np.linspace(0.0, height, n + 1)
    pts = []
    ground = base_center * np.array([1.0, 0.0, 1.0])
    for i, y in enumerate(ys):
        side = -0.5 if i % 2 == 0 else 0.5
        pts.append(ground + side * width * lateral + y * UP)
    return Polyline3(np.asarray(pts))


def generate_track(spec: TrackSpec, profile: MachineProfile) -> TrackSet:
    """Expand a drawn centre path into a fabricable 4-rail marble track."""
    center = spec.center_path
    pts = center.points
    marble_r = spec.marble_diameter_mm / 2.0
    wire_r = profile.wire_diameter_mm / 2.0
    if spec.marble_diameter_mm <= 2.0 * profile.wire_diameter_mm:
        raise InfeasibleTrack("marble must be larger than twice the wire diameter")

    r_min = _min_curvature_radius(pts)
    if r_min < marble_r + wire_r:
        raise InfeasibleTrack(
            f"curvature radius {r_min:.1f} mm tighter than marble+wire radius "
            f"{marble_r + wire_r:.1f} mm; rails would self-intersect"
        )

    contact = math.radians(spec.rail_contact_deg)
    gauge = spec.marble_diameter_mm * math.sin(contact)
    seat_drop = marble_r * math.cos(contact)

    tangents = _vertex_tangents(pts)
    laterals = np.stack([_lateral(t) for t in tangents])

    offsets = [
        (+gauge / 2.0, -seat_drop),  # upper pair seats the marble
        (-gauge / 2.0, -seat_drop),
        (+gauge / 2.0, -seat_drop - marble_r),  # lower structural pair
        (-gauge / 2.0, -seat_drop - marble_r),
    ]
    rails = [
        Polyline3(pts + side * laterals + drop * UP) for side, drop in offsets
    ]

    lowest_rail_drop = seat_drop + marble_r
    supports = []
    for idx in (0, len(pts) - 1):
        top_y = float(pts[idx][1]) - lowest_rail_drop
        supports.append(
            _support_tower(pts[idx].copy(), top_y, laterals[idx], gauge, profile)
        )

    seg_len = center.segment_lengths()
    clips = []
    for s in clip_stations(center.arc_length(), spec.clip_spacing_mm):
        point, seg_idx = _point_at_arc_length(pts, seg_len, s)
        vec = pts[seg_idx + 1] - pts[seg_idx]
        tangent = vec / np.linalg.norm(vec)
        binormal = _lateral(tangent)
        normal = np.cross(binormal, tangent)
        clips.append(
            ClipPosition(
                point=tuple(map(float, point)),
                frame=(
                    tuple(map(float, tangent)),
                    tuple(map(float, normal)),
                    tuple(map(float, binormal)),
                ),
            )
        )
    return TrackSet(rails=rails, supports=supports, clip_positions=clips)
