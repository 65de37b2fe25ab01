"""Parametric wire connector generators, crimp-splice linking and the
load-capacity estimator.

Every generator emits a single wire with two free endpoints, built so
each bend clears the plastic-deformation floor and each feed clears the
head-geometry minimum for the given machine profile. World convention:
y is up, the floor is y = 0.

Undersizing drives the grip: wraps and jaws are generated slightly
smaller than the object they hold so the wire's spring force clamps it
(interference grip). ``grip_factor`` is the relative undersize.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import TYPE_CHECKING, Mapping

import numpy as np

from .compiler import check_path_constraints
from .errors import EndpointOccupied, InfeasibleSpec, SelfSplice
from .geometry import unit
from .machine import MachineProfile, min_feed
from .paths import Polyline3

if TYPE_CHECKING:  # pragma: no cover - import cycle guard, typing only
    from .scene_io import Scene

DEFAULT_GRIP_FACTOR = 0.05

# One-shot calibration of the capacity estimator against the measured
# pull-out load of the reference cup-on-table-edge connector (351 g).
# Dimensionless; absorbs contact sharing and section effects the simple
# yield-cantilever model ignores.
CAPACITY_CALIBRATION = 3.131

GRAMS_PER_NEWTON = 1.0 / 9.80665e-3


class ConnectorKind(str, Enum):
    PEGBOARD_PIN = "PegboardPin"
    TABLE_EDGE_CLIP = "TableEdgeClip"
    CYLINDER_WRAP = "CylinderWrap"
    HOOK = "Hook"
    CLAMP = "Clamp"
    CUP_HOLDER = "CupHolder"


# required parameter names and optional defaults per kind
_PARAM_SCHEMA: dict[ConnectorKind, tuple[set[str], dict[str, float | bool]]] = {
    ConnectorKind.CYLINDER_WRAP: (
        {"object_diameter_mm"},
        {"grip_factor": DEFAULT_GRIP_FACTOR, "wrap_turns": 1.25},
    ),
    ConnectorKind.TABLE_EDGE_CLIP: (
        {"edge_thickness_mm", "depth_mm"},
        {"grip_factor": DEFAULT_GRIP_FACTOR},
    ),
    ConnectorKind.PEGBOARD_PIN: (
        set(),
        {"hole_spacing_mm": 25.4, "hole_diameter_mm": 6.35, "panel_thickness_mm": 5.0},
    ),
    ConnectorKind.CLAMP: (
        {"jaw_gap_mm"},
        {"two_axis": False, "jaw_depth_mm": 0.0, "grip_factor": DEFAULT_GRIP_FACTOR},
    ),
    ConnectorKind.CUP_HOLDER: (
        {"cup_diameter_mm", "ring_drop_mm"},
        {"grip_factor": DEFAULT_GRIP_FACTOR},
    ),
    ConnectorKind.HOOK: ({"opening_mm", "shank_mm"}, {}),
}


@dataclass(frozen=True)
class ConnectorSpec:
    kind: ConnectorKind
    params: Mapping[str, float | bool] = field(default_factory=dict)

    def __post_init__(self):
        kind = ConnectorKind(self.kind)
        object.__setattr__(self, "kind", kind)
        required, defaults = _PARAM_SCHEMA[kind]
        known = required | set(defaults)
        unknown = set(self.params) - known
        if unknown:
            raise ValueError(f"{kind.value}: unknown parameters {sorted(unknown)}")
        missing = required - set(self.params)
        if missing:
            raise ValueError(f"{kind.value}: missing parameters {sorted(missing)}")
        merged = dict(defaults)
        merged.update(self.params)
        for name, value in merged.items():
            if name == "two_axis":
                merged[name] = bool(value)
                continue
            merged[name] = float(value)
            if name == "grip_factor":
                if not 0.0 < merged[name] <= 0.15:
                    raise ValueError("grip_factor must be in (0, 0.15]")
            elif name == "jaw_depth_mm":
                if merged[name] < 0:
                    raise ValueError("jaw_depth_mm must be >= 0")
            elif merged[name] <= 0:
                raise ValueError(f"{name} must be > 0")
        object.__setattr__(self, "params", merged)

    def __getitem__(self, name: str):
        return self.params[name]


def spec_from_dict(data: Mapping) -> ConnectorSpec:
    return ConnectorSpec(kind=ConnectorKind(data["kind"]), params=dict(data.get("params", {})))


@dataclass(frozen=True)
class Endpoint:
    which: str  # "start" | "end"
    point: tuple[float, float, float]
    tangent: tuple[float, float, float]  # direction the wire leaves the part


@dataclass(frozen=True)
class WirePart:
    """A fabricable single-wire piece. Labels are assigned by the scene."""

    path: Polyline3
    label: int = 0

    def endpoint(self, which: str) -> Endpoint:
        pts = self.path.points
        if which == "start":
            tangent = unit(tuple(pts[0] - pts[1]))
            return Endpoint("start", tuple(map(float, pts[0])), tangent)
        if which == "end":
            tangent = unit(tuple(pts[-1] - pts[-2]))
            return Endpoint("end", tuple(map(float, pts[-1])), tangent)
        raise ValueError(f"endpoint must be 'start' or 'end', got {which!r}")

    @property
    def endpoints(self) -> tuple[Endpoint, Endpoint]:
        return (self.endpoint("start"), self.endpoint("end"))

    def with_label(self, label: int) -> "WirePart":
        return replace(self, label=label)


@dataclass(frozen=True)
class Splice:
    part_a: int
    end_a: str
    part_b: int
    end_b: str
    sleeve_length_mm: float = 10.0

    def __post_init__(self):
        for end in (self.end_a, self.end_b):
            if end not in ("start", "end"):
                raise ValueError(f"splice ends must be 'start' or 'end', got {end!r}")
        if self.sleeve_length_mm <= 0:
            raise ValueError("sleeve_length_mm must be > 0")
        if self.part_a == self.part_b and self.end_a == self.end_b:
            raise ValueError("a splice cannot join an endpoint to itself")

    def ends(self) -> tuple[tuple[int, str], tuple[int, str]]:
        return ((self.part_a, self.end_a), (self.part_b, self.end_b))


class ClosedLoopWarning(UserWarning):
    """Both splice ends sit on one part within sleeve reach: a closed loop."""


@dataclass(frozen=True)
class OrientationWarning:
    splice_index: int
    part_a: int
    part_b: int
    height_delta_mm: float
    message: str


@dataclass(frozen=True)
class WireMaterial:
    youngs_modulus_gpa: float
    yield_strength_mpa: float


ALUMINUM_WIRE = WireMaterial(youngs_modulus_gpa=69.0, yield_strength_mpa=95.0)


# ---------------------------------------------------------------------------
# generator helpers


def _arc_step_deg(radius: float, profile: MachineProfile, ladder=(30.0, 45.0, 60.0, 90.0)) -> float:
    """Coarsest-acceptable polygonal step for an arc of the given radius.

    Finer steps look rounder but shrink the chord below the minimum feed
    and the per-vertex turn below the plastic floor.
    """
    feed_floor = min_feed(profile)
    for step in ladder:
        if step < profile.min_plastic_deg + 1.0 or step > profile.max_bend_deg:
            continue
        chord = 2.0 * radius * math.sin(math.radians(step / 2.0))
        if chord >= feed_floor:
            return step
    raise InfeasibleSpec(
        f"radius {radius:.2f} mm cannot be approximated within feed/bend limits"
    )


def _tail_length(profile: MachineProfile) -> float:
    return max(1.5 * min_feed(profile), 12.0)


def _extend_ends(pts: list[tuple[float, float, float]], tail: float) -> list:
    """Lengthen the first and last segments by ``tail`` without adding bends."""
    first = np.asarray(pts[0], float)
    second = np.asarray(pts[1], float)
    last = np.asarray(pts[-1], float)
    prev = np.asarray(pts[-2], float)
    pts = list(pts)
    pts[0] = tuple(first - tail * (second - first) / np.linalg.norm(second - first))
    pts[-1] = tuple(last + tail * (last - prev) / np.linalg.norm(last - prev))
    return pts


def _horizontal_arc(
    center: tuple[float, float, float],
    radius: float,
    start_deg: float,
    sweep_deg: float,
    step_deg: float,
    y_drift_total: float = 0.0,
) -> list[tuple[float, float, float]]:
    """Polygonal arc in the horizontal plane, optional linear y drift."""
    n = max(1, int(round(sweep_deg / step_deg)))
    pts = []
    for i in range(n + 1):
        a = math.radians(start_deg + sweep_deg * i / n)
        y = center[1] + y_drift_total * i / n
        pts.append(
            (center[0] + radius * math.cos(a), y, center[2] + radius * math.sin(a))
        )
    return pts


def _finalize(pts, profile: MachineProfile, kind: ConnectorKind) -> WirePart:
    path = Polyline3.from_list(pts)
    violations = check_path_constraints(path, profile)
    if violations:
        raise InfeasibleSpec(
            f"{kind.value} parameters force infeasible geometry: {violations[0]}"
        )
    return WirePart(path=path)


# ---------------------------------------------------------------------------
# generators


def _gen_cylinder_wrap(spec: ConnectorSpec, profile: MachineProfile) -> WirePart:
    obj_d = spec["object_diameter_mm"]
    grip = spec["grip_factor"]
    turns = spec["wrap_turns"]
    ring_d = obj_d * (1.0 - grip)
    radius = ring_d / 2.0
    step = _arc_step_deg(radius, profile)
    pitch = 2.0 * profile.wire_diameter_mm  # per full turn, keeps coils apart
    pts = _horizontal_arc(
        (0.0, 0.0, 0.0), radius, 0.0, 360.0 * turns, step, y_drift_total=-pitch * turns
    )
    pts = _extend_ends(pts, _tail_length(profile))
    return _finalize(pts, profile, ConnectorKind.CYLINDER_WRAP)


def _gen_table_edge_clip(spec: ConnectorSpec, profile: MachineProfile) -> WirePart:
    thickness = spec["edge_thickness_mm"]
    depth = spec["depth_mm"]
    gap = thickness * (1.0 - spec["grip_factor"])
    pts = [
        (depth, 0.0, 0.0),  # on the table top, pointing inward
        (0.0, 0.0, 0.0),  # table edge, top
        (0.0, -gap, 0.0),  # table edge, bottom
        (0.8 * depth, -gap, 0.0),  # under the table
    ]
    return _finalize(pts, profile, ConnectorKind.TABLE_EDGE_CLIP)


def _gen_pegboard_pin(spec: ConnectorSpec, profile: MachineProfile) -> WirePart:
    spacing = spec["hole_spacing_mm"]
    hole_d = spec["hole_diameter_mm"]
    panel = spec["panel_thickness_mm"]
    if profile.wire_diameter_mm + 0.2 > hole_d:
        raise InfeasibleSpec(
            f"wire {profile.wire_diameter_mm} mm does not fit a {hole_d} mm pegboard hole"
        )
    reach = max(2.0 * min_feed(profile), 25.0)
    drop = max(1.2 * min_feed(profile), 12.0)
    behind = panel + 2.0
    pts = [
        (-reach, 0.0, 0.0),  # free mounting tail in front of the board
        (behind, 0.0, 0.0),  # through the lower hole
        (behind, spacing, 0.0),  # up behind the panel
        (-2.0, spacing, 0.0),  # back out through the upper hole
        (-2.0, spacing - drop, 0.0),  # front stub resting on the board face
    ]
    return _finalize(pts, profile, ConnectorKind.PEGBOARD_PIN)


def _gen_clamp(spec: ConnectorSpec, profile: MachineProfile) -> WirePart:
    gap = spec["jaw_gap_mm"] * (1.0 - spec["grip_factor"])
    depth = spec["jaw_depth_mm"] or max(1.5 * min_feed(profile), 20.0)
    lead = max(min_feed(profile), 10.0)
    pts = [
        (0.0, depth, 0.0),  # jaw, grips along +x
        (0.0, 0.0, 0.0),
        (gap, 0.0, 0.0),
        (gap, depth, 0.0),  # jaw, grips along -x
    ]
    if spec["two_axis"]:
        pts += [
            (gap, depth, -lead),  # bridge out of the first grip plane
            (gap, 0.0, -lead),  # jaw, grips along -z
            (gap, 0.0, -lead - gap),
            (gap, depth, -lead - gap),  # jaw, grips along +z
        ]
    return _finalize(pts, profile, ConnectorKind.CLAMP)


def _gen_cup_holder(spec: ConnectorSpec, profile: MachineProfile) -> WirePart:
    cup_d = spec["cup_diameter_mm"]
    drop = spec["ring_drop_mm"]
    ring_d = cup_d * (1.0 - spec["grip_factor"])
    radius = ring_d / 2.0
    step = _arc_step_deg(radius, profile)
    pitch = 2.0 * profile.wire_diameter_mm
    rise = max(1.5 * min_feed(profile), 15.0)
    if drop - pitch < min_feed(profile):
        raise InfeasibleSpec("ring_drop_mm leaves no room for the under-support drop")
    pts = _horizontal_arc((0.0, 0.0, 0.0), radius, 0.0, 360.0, step, y_drift_total=-pitch)
    # entry tail: lengthen the first chord outward
    start_tail = _tail_length(profile)
    first = np.asarray(pts[0], float)
    second = np.asarray(pts[1], float)
    pts[0] = tuple(first - start_tail * (second - first) / np.linalg.norm(second - first))
    # under-support: drop from the ring, cross beneath the cup centre, rise
    exit_pt = np.asarray(pts[-1], float)
    pts.append((exit_pt[0], -drop, exit_pt[2]))
    pts.append((-exit_pt[0], -drop, -exit_pt[2]))
    pts.append((-exit_pt[0], -drop + rise, -exit_pt[2]))
    return _finalize(pts, profile, ConnectorKind.CUP_HOLDER)


def _gen_hook(spec: ConnectorSpec, profile: MachineProfile) -> WirePart:
    opening = spec["opening_mm"]
    shank = spec["shank_mm"]
    radius = opening / 2.0
    feed_floor = min_feed(profile)
    if shank < feed_floor:
        raise InfeasibleSpec(f"shank_mm must be at least the minimum feed {feed_floor:.2f}")
    step = None
    for n_seg in (4, 3, 2):
        s = 180.0 / n_seg
        chord = 2.0 * radius * math.sin(math.radians(s / 2.0))
        if chord >= feed_floor and s / 2.0 >= profile.min_plastic_deg and s <= profile.max_bend_deg:
            step = s
            break
    if step is None:
        raise InfeasibleSpec(f"opening_mm {opening} too small for this machine head")
    n_seg = int(round(180.0 / step))
    tip = max(1.2 * feed_floor, 0.35 * opening)
    pts: list[tuple[float, float, float]] = [(0.0, shank, 0.0), (0.0, 0.0, 0.0)]
    for i in range(1, n_seg + 1):
        a = math.radians(180.0 + i * step)
        pts.append((radius + radius * math.cos(a), radius * math.sin(a), 0.0))
    pts.append((opening, tip, 0.0))
    return _finalize(pts, profile, ConnectorKind.HOOK)


_GENERATORS = {
    ConnectorKind.CYLINDER_WRAP: _gen_cylinder_wrap,
    ConnectorKind.TABLE_EDGE_CLIP: _gen_table_edge_clip,
    ConnectorKind.PEGBOARD_PIN: _gen_pegboard_pin,
    ConnectorKind.CLAMP: _gen_clamp,
    ConnectorKind.CUP_HOLDER: _gen_cup_holder,
    ConnectorKind.HOOK: _gen_hook,
}


def generate(spec: ConnectorSpec, profile: MachineProfile) -> WirePart:
    """Build the wire part for a connector spec on the given machine.

    Deterministic: identical spec and profile produce the identical path.
    Raises :class:`InfeasibleSpec` when the parameters force a feed or
    bend outside the machine's envelope.
    """
    return _GENERATORS[ConnectorKind(spec.kind)](spec, profile)


# ---------------------------------------------------------------------------
# linking and checks


def link(scene: "Scene", splice: Splice) -> "Scene":
    """Record a crimp splice, synthesizing a straight bridge wire when the
    endpoints sit farther apart than the sleeve can span."""
    part_a = scene.part(splice.part_a)
    part_b = scene.part(splice.part_b)
    taken = {end for s in scene.splices for end in s.ends()}
    for end in splice.ends():
        if end in taken:
            raise EndpointOccupied(f"endpoint {end} is already spliced")

    pa = np.asarray(part_a.endpoint(splice.end_a).point)
    pb = np.asarray(part_b.endpoint(splice.end_b).point)
    distance = float(np.linalg.norm(pa - pb))

    if splice.part_a == splice.part_b:
        if distance > splice.sleeve_length_mm:
            raise SelfSplice(
                f"both ends on part {splice.part_a} are {distance:.1f} mm apart, "
                f"beyond the {splice.sleeve_length_mm:.1f} mm sleeve"
            )
        warnings.warn(
            f"splice closes part {splice.part_a} into a loop", ClosedLoopWarning
        )
    elif distance > splice.sleeve_length_mm:
        scene.add_part(Polyline3(np.stack([pa, pb])))

    scene.splices.append(splice)
    return scene


def check_orientation(
    scene: "Scene", gravity=(0.0, -1.0, 0.0), tolerance_mm: float = 2.0
) -> list[OrientationWarning]:
    """Warn about spliced endpoint pairs at mismatched heights.

    A height offset between the two crimped ends twists the assembled
    structure's grasp away from the intended orientation.
    """
    g = np.asarray(gravity, dtype=float)
    up = -g / np.linalg.norm(g)
    out: list[OrientationWarning] = []
    for idx, splice in enumerate(scene.splices):
        ea = scene.part(splice.part_a).endpoint(splice.end_a)
        eb = scene.part(splice.part_b).endpoint(splice.end_b)
        delta = abs(float(np.dot(ea.point, up) - np.dot(eb.point, up)))
        if delta > tolerance_mm:
            out.append(
                OrientationWarning(
                    splice_index=idx,
                    part_a=splice.part_a,
                    part_b=splice.part_b,
                    height_delta_mm=delta,
                    message=(
                        f"splice {idx}: endpoint heights differ by {delta:.1f} mm; "
                        "the held object will sit rotated"
                    ),
                )
            )
    return out


def estimate_capacity(
    part: WirePart,
    material: WireMaterial,
    load_point,
    wire_diameter_mm: float = 1.6,
) -> float:
    """Rough holding capacity in grams-force at a load point.

    Yield-limited cantilever: capacity scales with the cube of the wire
    diameter and inversely with the lever arm from the load point to the
    nearest anchored wire end. Calibrated once against a measured pull
    test; an indication, not physics.
    """
    load = np.asarray(load_point, dtype=float)
    lo = part.path.points.min(axis=0) - 10.0
    hi = part.path.points.max(axis=0) + 10.0
    if np.any(load < lo) or np.any(load > hi):
        raise ValueError("load point lies outside the part's working volume")
    anchors = [part.path.points[0], part.path.points[-1]]
    lever = max(min(float(np.linalg.norm(load - a)) for a in anchors), 1.0)
    section_modulus = math.pi * wire_diameter_mm**3 / 32.0  # mm^3
    moment_capacity = material.yield_strength_mpa * section_modulus  # N*mm
    newtons = CAPACITY_CALIBRATION * moment_capacity / lever
    return newtons * GRAMS_PER_NEWTON
