"""Compile polylines to FEED/ROTATE/BEND programs and simulate them back.

Conventions (required for deterministic machine CSVs):

* positive BEND is counter-clockwise about the +z axis of the current
  bend frame; ROTATE is right-handed about the feed axis;
* the first bend plane defines the zero-rotation reference, so a leading
  ROTATE is never emitted;
* rotations are kept in (-90, 90] by flipping the bend sign instead of
  spinning the wire more than a quarter turn.

``simulate`` is the independent oracle for ``compile_path``: feeding a
compiled program through it reproduces the source geometry up to the
rigid transform that moves the wire start to the origin along +x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import ConstraintViolation, TargetUnreachable
from .geometry import cross, dot, norm, rotate_about, signed_angle_deg, unit, vadd, vscale, vsub
from .machine import MachineProfile, actual_angle, commanded_for, min_feed
from .paths import Polyline3

OpKind = Literal["FEED", "ROTATE", "BEND"]

# slack for float comparisons against machine limits
_TOL_MM = 1e-6
_TOL_DEG = 1e-6


@dataclass(frozen=True)
class Instruction:
    op: OpKind
    value: float

    def __post_init__(self):
        if self.op == "FEED":
            if self.value <= 0:
                raise ValueError("FEED length must be > 0")
        elif self.op == "BEND":
            if not 0 < abs(self.value) <= 180:
                raise ValueError("BEND magnitude must be in (0, 180]")
        elif self.op == "ROTATE":
            if not -180 < self.value <= 180:
                raise ValueError("ROTATE must be in (-180, 180]")
        else:
            raise ValueError(f"unknown instruction op {self.op!r}")


def feed(length_mm: float) -> Instruction:
    return Instruction("FEED", float(length_mm))


def rotate(deg: float) -> Instruction:
    return Instruction("ROTATE", float(deg))


def bend(deg: float) -> Instruction:
    return Instruction("BEND", float(deg))


@dataclass(frozen=True)
class BendProgram:
    """Validated FEED/ROTATE/BEND sequence."""

    instructions: tuple[Instruction, ...]

    def __post_init__(self):
        ins = tuple(self.instructions)
        object.__setattr__(self, "instructions", ins)
        if not ins:
            raise ValueError("a program needs at least one instruction")
        if ins[0].op != "FEED" or ins[-1].op != "FEED":
            raise ValueError("a program must begin and end with FEED")
        for a, b in zip(ins, ins[1:]):
            if a.op == b.op:
                raise ValueError(f"consecutive {a.op} instructions are not allowed")

    def __len__(self) -> int:
        return len(self.instructions)

    def bends(self) -> list[Instruction]:
        return [i for i in self.instructions if i.op == "BEND"]

    def total_feed(self) -> float:
        return sum(i.value for i in self.instructions if i.op == "FEED")


def check_path_constraints(path: Polyline3, profile: MachineProfile) -> list[dict]:
    """Machine-feasibility violations of a path, empty when compilable."""
    violations: list[dict] = []
    feed_floor = min_feed(profile)
    lengths = path.segment_lengths()
    for idx, length in enumerate(lengths):
        if length < feed_floor - _TOL_MM:
            violations.append(
                {
                    "kind": "short_segment",
                    "segment": idx,
                    "length_mm": float(length),
                    "min_feed_mm": feed_floor,
                }
            )
    if path.n_points > 2:
        turns = path.turn_angles_deg()
        for k, turn in enumerate(turns):
            vertex = k + 1
            if turn < profile.min_plastic_deg - _TOL_DEG:
                violations.append(
                    {
                        "kind": "shallow_bend",
                        "vertex": vertex,
                        "turn_deg": float(turn),
                        "min_plastic_deg": profile.min_plastic_deg,
                    }
                )
            elif turn > profile.max_bend_deg + _TOL_DEG:
                violations.append(
                    {
                        "kind": "overbend",
                        "vertex": vertex,
                        "turn_deg": float(turn),
                        "max_bend_deg": profile.max_bend_deg,
                    }
                )
    return violations


def compile_path(path: Polyline3, profile: MachineProfile) -> BendProgram:
    """Decompose a feasible polyline into machine instructions.

    Feeds are the segment lengths; each bend is the vertex turn angle;
    rotations carry the signed dihedral between consecutive bend planes.
    """
    violations = check_path_constraints(path, profile)
    if violations:
        first = violations[0]
        raise ConstraintViolation(f"path violates machine constraints: {first}", violations)

    pts = [tuple(map(float, p)) for p in path.points]
    dirs = [unit(vsub(b, a)) for a, b in zip(pts, pts[1:])]
    lengths = [norm(vsub(b, a)) for a, b in zip(pts, pts[1:])]

    instructions: list[Instruction] = [feed(lengths[0])]
    axis: tuple[float, float, float] | None = None
    for k in range(1, len(pts) - 1):
        d_in, d_out = dirs[k - 1], dirs[k]
        c = cross(d_in, d_out)
        if norm(c) < 1e-12 and dot(d_in, d_out) < 0:
            raise ConstraintViolation(
                f"vertex {k} folds back on itself; its bend plane is undefined",
                [{"kind": "fold_back", "vertex": k}],
            )
        turn = math.degrees(math.atan2(norm(c), dot(d_in, d_out)))
        vertex_axis = unit(c)
        sign = 1.0
        if axis is not None:
            phi = signed_angle_deg(axis, vertex_axis, d_in)
            if abs(phi) > 90.0 + 1e-12:
                # spin the shorter way and bend downward instead
                phi = phi - math.copysign(180.0, phi)
                sign = -1.0
            if abs(phi) > 1e-9:
                instructions.append(rotate(phi))
        instructions.append(bend(sign * turn))
        # after the bend the machine axis coincides with the vertex's bend
        # normal (or its opposite); snap exactly to avoid drift
        axis = vertex_axis if sign > 0 else vscale(vertex_axis, -1.0)
        instructions.append(feed(lengths[k]))
    return BendProgram(tuple(instructions))


def simulate(
    program: BendProgram, profile: MachineProfile, with_springback: bool = False
) -> Polyline3:
    """Forward kinematics of a program from the origin along +x.

    With springback enabled every bend lands at its calibrated achieved
    angle instead of the commanded one.
    """
    pos = (0.0, 0.0, 0.0)
    heading = (1.0, 0.0, 0.0)
    axis = (0.0, 0.0, 1.0)
    points = [pos]
    for ins in program.instructions:
        if ins.op == "FEED":
            pos = vadd(pos, vscale(heading, ins.value))
            points.append(pos)
        elif ins.op == "ROTATE":
            axis = _reorthogonalize(rotate_about(axis, heading, ins.value), heading)
        else:  # BEND
            angle = ins.value
            if with_springback:
                angle = math.copysign(actual_angle(profile, abs(ins.value)), ins.value)
            if abs(angle) > 1e-15:
                heading = _reorthogonalize(rotate_about(heading, axis, angle), axis)
    return Polyline3(np.array(points, dtype=np.float64))


def _reorthogonalize(v, reference):
    """Strip float drift: unit length and exact perpendicularity to ``reference``.

    Rotations preserve both properties analytically, but letting the
    rounding errors compound multiplicatively ruins long programs.
    """
    v = vsub(v, vscale(reference, dot(v, reference)))
    return unit(v)


def compensate(program: BendProgram, profile: MachineProfile) -> BendProgram:
    """Over-extend every bend so the achieved angles match the targets.

    Single-application contract: the input carries target angles, the
    output carries commanded angles. FEED and ROTATE pass through.
    """
    out: list[Instruction] = []
    bend_index = 0
    for ins in program.instructions:
        if ins.op != "BEND":
            out.append(ins)
            continue
        try:
            commanded = commanded_for(profile, abs(ins.value))
        except TargetUnreachable as exc:
            raise TargetUnreachable(f"bend {bend_index}: {exc}") from exc
        out.append(bend(math.copysign(commanded, ins.value)))
        bend_index += 1
    return BendProgram(tuple(out))
