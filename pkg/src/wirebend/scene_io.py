"""Scene container, persistence, machine CSV export and the numbered
assembly manifest.

Export formats are frozen byte-for-byte:

* coordinate CSV: one ``x,y,z`` row per point, millimetres, three
  decimals, LF endings, no header (a ``header`` flag exists for bender
  software that wants one), exactly one trailing LF;
* instruction CSV: ``FEED,<mm>`` / ``ROTATE,<deg>`` / ``BEND,<deg>``
  rows, same formatting rules;
* scene files and assembly plans: versioned JSON.

Part files are named ``part_<label>.csv`` so the numbers users see on
screen match the files they feed to the machine.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path


from .compiler import BendProgram, Instruction, check_path_constraints, compile_path
from .connectors import Splice, WirePart
from .errors import ConstraintViolation, UnknownLabel, VersionError
from .machine import MachineProfile
from .marble import ClipPosition
from .paths import Polyline3

SCENE_SCHEMA_VERSION = 1
PLAN_SCHEMA_VERSION = 1


@dataclass
class Scene:
    """A design document: labelled wire parts plus the splices joining them."""

    parts: list[WirePart] = field(default_factory=list)
    splices: list[Splice] = field(default_factory=list)
    next_label: int = 1
    profile_ref: str = "default"
    clip_positions: list[ClipPosition] = field(default_factory=list)

    def add_part(self, part: WirePart | Polyline3) -> WirePart:
        """Attach a part, assigning the next dense label."""
        if isinstance(part, Polyline3):
            part = WirePart(path=part)
        labelled = part.with_label(self.next_label)
        self.parts.append(labelled)
        self.next_label += 1
        return labelled

    def part(self, label: int) -> WirePart:
        for p in self.parts:
            if p.label == label:
                return p
        raise UnknownLabel(f"no part labelled {label}")

    def remove_part(self, label: int) -> None:
        """Delete a part, keeping labels dense by renumbering the tail.

        Splices referencing the part are dropped; the rest are remapped
        to the shifted labels.
        """
        self.part(label)  # raises UnknownLabel
        self.parts = [p for p in self.parts if p.label != label]
        mapping = {}
        for i, p in enumerate(self.parts, start=1):
            mapping[p.label] = i
        self.parts = [p.with_label(i) for i, p in enumerate(self.parts, start=1)]
        kept = []
        for s in self.splices:
            if s.part_a == label or s.part_b == label:
                continue
            kept.append(
                Splice(
                    part_a=mapping[s.part_a],
                    end_a=s.end_a,
                    part_b=mapping[s.part_b],
                    end_b=s.end_b,
                    sleeve_length_mm=s.sleeve_length_mm,
                )
            )
        self.splices = kept
        self.next_label = len(self.parts) + 1

    def copy(self) -> "Scene":
        return copy.deepcopy(self)


@dataclass(frozen=True)
class AssemblyStep:
    part_label: int
    file_name: str
    action: str  # "bend" | "splice"
    counterpart_label: int | None = None


@dataclass
class AssemblyPlan:
    steps: list[AssemblyStep] = field(default_factory=list)


@dataclass
class AssemblyExport:
    files: dict[str, bytes]
    plan: AssemblyPlan


def _fmt(value: float) -> str:
    # round first so near-zero negatives cannot print as -0.000
    return f"{round(float(value), 3) + 0.0:.3f}"


# ---------------------------------------------------------------------------
# CSV formats


def export_coords_csv(part: WirePart, header: bool = False) -> bytes:
    lines = []
    if header:
        lines.append("x,y,z")
    for x, y, z in part.path.points:
        lines.append(f"{_fmt(x)},{_fmt(y)},{_fmt(z)}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def parse_coords_csv(data: bytes) -> Polyline3:
    rows = []
    for line in data.decode("utf-8").splitlines():
        line = line.strip()
        if not line or line.lower().startswith("x,"):
            continue
        rows.append([float(v) for v in line.split(",")])
    return Polyline3.from_list(rows)


def export_program_csv(program: BendProgram) -> bytes:
    lines = [f"{ins.op},{_fmt(ins.value)}" for ins in program.instructions]
    return ("\n".join(lines) + "\n").encode("utf-8")


def parse_program_csv(data: bytes) -> BendProgram:
    instructions = []
    for line in data.decode("utf-8").splitlines():
        line = line.strip()
        if not line:
            continue
        op, value = line.split(",")
        instructions.append(Instruction(op=op, value=float(value)))
    return BendProgram(tuple(instructions))


# ---------------------------------------------------------------------------
# assembly export


def part_file_name(label: int) -> str:
    return f"part_{label}.csv"


def export_assembly(
    scene: Scene, profile: MachineProfile, file_format: str = "coords"
) -> AssemblyExport:
    """One machine CSV per part plus ordered bend-then-splice steps.

    ``file_format`` selects coordinate CSVs (default) or FEED/ROTATE/BEND
    instruction CSVs for benders that consume them directly. All
    constraint problems are aggregated before anything is written.
    """
    if file_format not in ("coords", "frb"):
        raise ValueError(f"unknown export format {file_format!r}")

    violations: list[dict] = []
    labels = {p.label for p in scene.parts}
    for part in scene.parts:
        for v in check_path_constraints(part.path, profile):
            violations.append({"part": part.label, **v})
    for idx, splice in enumerate(scene.splices):
        for label in (splice.part_a, splice.part_b):
            if label not in labels:
                violations.append(
                    {"kind": "dangling_splice", "splice": idx, "part": label}
                )
    if violations:
        raise ConstraintViolation(
            f"{len(violations)} constraint problem(s) block export", violations
        )

    files: dict[str, bytes] = {}
    steps: list[AssemblyStep] = []
    for part in sorted(scene.parts, key=lambda p: p.label):
        name = part_file_name(part.label)
        if file_format == "coords":
            files[name] = export_coords_csv(part)
        else:
            files[name] = export_program_csv(compile_path(part.path, profile))
        steps.append(AssemblyStep(part_label=part.label, file_name=name, action="bend"))
    for splice in scene.splices:
        steps.append(
            AssemblyStep(
                part_label=splice.part_a,
                file_name=part_file_name(splice.part_a),
                action="splice",
                counterpart_label=splice.part_b,
            )
        )
    return AssemblyExport(files=files, plan=AssemblyPlan(steps=steps))


def plan_to_dict(plan: AssemblyPlan) -> dict:
    return {
        "version": PLAN_SCHEMA_VERSION,
        "steps": [
            {
                "part_label": s.part_label,
                "file_name": s.file_name,
                "action": s.action,
                **(
                    {"counterpart_label": s.counterpart_label}
                    if s.counterpart_label is not None
                    else {}
                ),
            }
            for s in plan.steps
        ],
    }


def plan_to_json(plan: AssemblyPlan) -> bytes:
    return (json.dumps(plan_to_dict(plan), indent=2) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# scene persistence


def scene_to_dict(scene: Scene) -> dict:
    data: dict = {
        "version": SCENE_SCHEMA_VERSION,
        "profile_ref": scene.profile_ref,
        "next_label": scene.next_label,
        "parts": [
            {"label": p.label, "points": p.path.to_list()} for p in scene.parts
        ],
        "splices": [
            {
                "part_a": s.part_a,
                "end_a": s.end_a,
                "part_b": s.part_b,
                "end_b": s.end_b,
                "sleeve_length_mm": s.sleeve_length_mm,
            }
            for s in scene.splices
        ],
    }
    if scene.clip_positions:
        data["clip_positions"] = [
            {"point": list(c.point), "frame": [list(row) for row in c.frame]}
            for c in scene.clip_positions
        ]
    return data


def scene_from_dict(data: dict) -> Scene:
    version = data.get("version")
    if version != SCENE_SCHEMA_VERSION:
        raise VersionError(f"unsupported scene version: {version!r}")
    scene = Scene(
        profile_ref=data.get("profile_ref", "default"),
        next_label=int(data.get("next_label", 1)),
    )
    for entry in data.get("parts", []):
        scene.parts.append(
            WirePart(path=Polyline3.from_list(entry["points"]), label=int(entry["label"]))
        )
    for entry in data.get("splices", []):
        scene.splices.append(
            Splice(
                part_a=int(entry["part_a"]),
                end_a=entry["end_a"],
                part_b=int(entry["part_b"]),
                end_b=entry["end_b"],
                sleeve_length_mm=float(entry["sleeve_length_mm"]),
            )
        )
    for entry in data.get("clip_positions", []):
        scene.clip_positions.append(
            ClipPosition(
                point=tuple(float(v) for v in entry["point"]),
                frame=tuple(tuple(float(v) for v in row) for row in entry["frame"]),
            )
        )
    labels = [p.label for p in scene.parts]
    if labels != list(range(1, len(labels) + 1)):
        raise ValueError(f"part labels must be dense from 1, got {labels}")
    return scene


def scene_to_json(scene: Scene) -> bytes:
    return (json.dumps(scene_to_dict(scene), indent=2) + "\n").encode("utf-8")


def save_scene(scene: Scene, path: str | Path) -> None:
    with open(path, "wb") as fh:
        fh.write(scene_to_json(scene))


def load_scene(path: str | Path) -> Scene:
    with open(path, "r", encoding="utf-8") as fh:
        return scene_from_dict(json.load(fh))


def scenes_equal(a: Scene, b: Scene) -> bool:
    return scene_to_dict(a) == scene_to_dict(b)
