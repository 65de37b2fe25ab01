"""Batch command-line interface over the full pipeline.

Geometry travels as JSON (``{"points": [[x, y, z], ...]}``), machine
outputs as CSV. Exit codes: 0 success, 2 constraint/feasibility problem,
3 I/O or format problem. Diagnostics go to stderr so stdout stays
byte-deterministic for identical inputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import scene_io
from .compiler import compensate, compile_path, simulate
from .connectors import (
    ALUMINUM_WIRE,
    Splice,
    WireMaterial,
    check_orientation,
    estimate_capacity,
    generate,
    link,
    spec_from_dict,
)
from .errors import ConstraintViolation, VersionError, WirebendError
from .geometry import kabsch_align, random_rotation
from .machine import MachineProfile, load_profile, min_feed, min_feed_formula
from .marble import TrackSpec, generate_track
from .paths import Polyline3, SimplifyParams, deplanarize, detect_conflicts, simplify

EXIT_OK = 0
EXIT_CONSTRAINT = 2
EXIT_IO = 3


def _read_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _read_polyline(path: str) -> Polyline3:
    data = _read_json(path)
    return Polyline3.from_list(data["points"])


def _write_polyline(path: str, poly: Polyline3) -> None:
    payload = {"points": poly.to_list()}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _write_bytes(path: str, data: bytes) -> None:
    Path(path).write_bytes(data)


def _profile(args) -> MachineProfile:
    profile = load_profile(args.profile)
    print(f"[machine] {min_feed_formula(profile)}", file=sys.stderr)
    return profile


def _simplify_params(args, profile: MachineProfile) -> SimplifyParams:
    return SimplifyParams(
        smoothing_strength=args.smoothing,
        min_reduction_ratio=args.min_reduction,
        min_feed_mm=min_feed(profile),
        min_bend_deg=profile.min_plastic_deg,
    )


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_simplify(args) -> int:
    profile = _profile(args)
    poly = _read_polyline(args.input)
    out = simplify(poly, _simplify_params(args, profile))
    _write_polyline(args.out, out)
    print(f"simplified {poly.n_points} -> {out.n_points} points", file=sys.stderr)
    return EXIT_OK


def _cmd_deplanarize(args) -> int:
    poly = _read_polyline(args.input)
    _write_polyline(args.out, deplanarize(poly, args.epsilon))
    return EXIT_OK


def _cmd_collide(args) -> int:
    poly = _read_polyline(args.input)
    if args.profile:
        profile = _profile(args)
        threshold = args.threshold if args.threshold is not None else profile.max_bend_deg
        proximity = args.proximity if args.proximity is not None else 2.0 * profile.wire_diameter_mm
    else:
        threshold = args.threshold if args.threshold is not None else 135.0
        proximity = args.proximity if args.proximity is not None else 3.2
    report = detect_conflicts(poly, threshold_deg=threshold, proximity_mm=proximity)
    payload = {
        "conflict_count": len(report),
        "conflicts": [
            {
                "segment_a": c.segment_a,
                "segment_b": c.segment_b,
                "closest_point_a": list(c.closest_point_a),
                "closest_point_b": list(c.closest_point_b),
                "min_distance_mm": c.min_distance_mm,
            }
            for c in report.conflicts
        ],
    }
    json.dump(payload, sys.stdout, indent=2)
    print()
    return EXIT_OK


def _cmd_compile(args) -> int:
    profile = _profile(args)
    program = compile_path(_read_polyline(args.input), profile)
    _write_bytes(args.out, scene_io.export_program_csv(program))
    return EXIT_OK


def _cmd_simulate(args) -> int:
    profile = _profile(args)
    program = scene_io.parse_program_csv(Path(args.input).read_bytes())
    poly = simulate(program, profile, with_springback=args.springback)
    _write_polyline(args.out, poly)
    return EXIT_OK


def _cmd_compensate(args) -> int:
    profile = _profile(args)
    program = scene_io.parse_program_csv(Path(args.input).read_bytes())
    _write_bytes(args.out, scene_io.export_program_csv(compensate(program, profile)))
    return EXIT_OK


def _cmd_connector_gen(args) -> int:
    profile = _profile(args)
    spec = spec_from_dict(_read_json(args.spec))
    part = generate(spec, profile)
    _write_polyline(args.out, part.path)
    return EXIT_OK


def _cmd_track_gen(args) -> int:
    profile = _profile(args)
    data = _read_json(args.spec)
    spec = TrackSpec(
        center_path=Polyline3.from_list(data["center"]["points"]),
        marble_diameter_mm=float(data.get("marble_diameter_mm", 16.0)),
        clip_spacing_mm=float(data.get("clip_spacing_mm", 50.0)),
        rail_contact_deg=float(data.get("rail_contact_deg", 45.0)),
    )
    track = generate_track(spec, profile)
    payload = {
        "rails": [{"points": r.to_list()} for r in track.rails],
        "supports": [{"points": s.to_list()} for s in track.supports],
        "clip_positions": [
            {"point": list(c.point), "frame": [list(row) for row in c.frame]}
            for c in track.clip_positions
        ],
    }
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    return EXIT_OK


def _cmd_link(args) -> int:
    scene = scene_io.load_scene(args.scene)
    splice = Splice(
        part_a=args.part_a,
        end_a=args.end_a,
        part_b=args.part_b,
        end_b=args.end_b,
        sleeve_length_mm=args.sleeve,
    )
    link(scene, splice)
    scene_io.save_scene(scene, args.out)
    return EXIT_OK


def _cmd_check_orientation(args) -> int:
    scene = scene_io.load_scene(args.scene)
    gravity = tuple(float(v) for v in args.gravity.split(","))
    warnings_list = check_orientation(scene, gravity=gravity, tolerance_mm=args.tolerance)
    payload = {
        "warnings": [
            {
                "splice_index": w.splice_index,
                "part_a": w.part_a,
                "part_b": w.part_b,
                "height_delta_mm": w.height_delta_mm,
                "message": w.message,
            }
            for w in warnings_list
        ]
    }
    json.dump(payload, sys.stdout, indent=2)
    print()
    return EXIT_OK


def _cmd_capacity(args) -> int:
    scene = scene_io.load_scene(args.scene)
    part = scene.part(args.part)
    load_point = tuple(float(v) for v in args.load.split(","))
    material = ALUMINUM_WIRE
    if args.material:
        e, sy = (float(v) for v in args.material.split(","))
        material = WireMaterial(youngs_modulus_gpa=e, yield_strength_mpa=sy)
    grams = estimate_capacity(
        part, material, load_point, wire_diameter_mm=args.wire_diameter
    )
    print(f"{grams:.1f}")
    return EXIT_OK


def _cmd_export(args) -> int:
    profile = _profile(args)
    scene = scene_io.load_scene(args.scene)
    result = scene_io.export_assembly(scene, profile, file_format=args.format)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, data in result.files.items():
        (out_dir / name).write_bytes(data)
    (out_dir / "assembly_plan.json").write_bytes(scene_io.plan_to_json(result.plan))
    print(f"wrote {len(result.files)} part file(s) to {out_dir}", file=sys.stderr)
    return EXIT_OK


def _cmd_roundtrip_check(args) -> int:
    profile = _profile(args)
    rng = np.random.default_rng(args.seed)
    feed_floor = min_feed(profile)
    worst = 0.0
    for _ in range(args.n):
        poly = _random_feasible_polyline(rng, profile, feed_floor)
        rot = random_rotation(rng)
        shift = rng.uniform(-500.0, 500.0, size=3)
        moved = poly.transformed(rotation=rot, translation=shift)
        rebuilt = simulate(compile_path(moved, profile), profile)
        aligned = kabsch_align(rebuilt.points, moved.points)
        worst = max(worst, float(np.abs(aligned - moved.points).max()))
    print(f"max vertex error over {args.n} paths: {worst:.3e} mm")
    if worst >= args.tolerance:
        print(f"round-trip error exceeds {args.tolerance} mm", file=sys.stderr)
        return EXIT_CONSTRAINT
    return EXIT_OK


def _random_feasible_polyline(
    rng: np.random.Generator, profile: MachineProfile, feed_floor: float
) -> Polyline3:
    """Random constraint-satisfying polyline, built from a random program."""
    from .compiler import BendProgram, bend as mk_bend, feed as mk_feed, rotate as mk_rotate

    n_vertices = int(rng.integers(3, 51))
    instructions = [mk_feed(rng.uniform(max(feed_floor, 1.0), 60.0))]
    for k in range(n_vertices - 2):
        if k > 0:
            phi = float(rng.uniform(-180.0, 180.0))
            if abs(phi) > 1e-9:
                instructions.append(mk_rotate(phi))
        angle = float(rng.uniform(profile.min_plastic_deg, profile.max_bend_deg))
        instructions.append(mk_bend(angle))
        instructions.append(mk_feed(rng.uniform(max(feed_floor, 1.0), 60.0)))
    return simulate(BendProgram(tuple(instructions)), profile)


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wirebend",
        description="Compile 3D wire designs into CNC bender programs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_profile(p, required=True):
        p.add_argument("--profile", required=required, help="machine profile JSON")

    p = sub.add_parser("simplify", help="make a drawn path fabricable")
    p.add_argument("input")
    add_profile(p)
    p.add_argument("--out", required=True)
    p.add_argument("--smoothing", type=float, default=0.4)
    p.add_argument("--min-reduction", type=float, default=0.0)
    p.set_defaults(func=_cmd_simplify)

    p = sub.add_parser("deplanarize", help="break up planar bend runs")
    p.add_argument("input")
    p.add_argument("--epsilon", type=float, default=5.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_deplanarize)

    p = sub.add_parser("collide", help="report potential fabrication collisions")
    p.add_argument("input")
    add_profile(p, required=False)
    p.add_argument("--threshold", type=float, default=None, help="turn threshold, deg")
    p.add_argument("--proximity", type=float, default=None, help="clearance, mm")
    p.set_defaults(func=_cmd_collide)

    p = sub.add_parser("compile", help="polyline JSON -> FEED/ROTATE/BEND CSV")
    p.add_argument("input")
    add_profile(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_compile)

    p = sub.add_parser("simulate", help="program CSV -> polyline JSON")
    p.add_argument("input")
    add_profile(p)
    p.add_argument("--springback", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("compensate", help="replace bend targets with commanded angles")
    p.add_argument("input")
    add_profile(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_compensate)

    p = sub.add_parser("connector", help="parametric connector tools")
    csub = p.add_subparsers(dest="connector_command", required=True)
    g = csub.add_parser("gen", help="generate a connector wire from a spec JSON")
    g.add_argument("spec")
    add_profile(g)
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_connector_gen)

    p = sub.add_parser("track", help="marble track tools")
    tsub = p.add_subparsers(dest="track_command", required=True)
    g = tsub.add_parser("gen", help="expand a centre path into rails/supports/clips")
    g.add_argument("spec")
    add_profile(g)
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_track_gen)

    p = sub.add_parser("link", help="splice two wire endpoints in a scene")
    p.add_argument("scene")
    p.add_argument("--part-a", type=int, required=True)
    p.add_argument("--end-a", choices=["start", "end"], required=True)
    p.add_argument("--part-b", type=int, required=True)
    p.add_argument("--end-b", choices=["start", "end"], required=True)
    p.add_argument("--sleeve", type=float, default=10.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_link)

    p = sub.add_parser("check-orientation", help="warn about height-misaligned splices")
    p.add_argument("scene")
    p.add_argument("--gravity", default="0,-1,0")
    p.add_argument("--tolerance", type=float, default=2.0)
    p.set_defaults(func=_cmd_check_orientation)

    p = sub.add_parser("capacity", help="estimate holding capacity in grams")
    p.add_argument("scene")
    p.add_argument("--part", type=int, required=True)
    p.add_argument("--load", required=True, help="x,y,z load point, mm")
    p.add_argument("--material", default=None, help="youngs_GPa,yield_MPa")
    p.add_argument("--wire-diameter", type=float, default=1.6)
    p.set_defaults(func=_cmd_capacity)

    p = sub.add_parser("export", help="scene -> machine CSVs + assembly plan")
    p.add_argument("scene")
    add_profile(p)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--format", choices=["coords", "frb"], default="coords")
    p.set_defaults(func=_cmd_export)

    p = sub.add_parser("roundtrip-check", help="randomized compile/simulate self-test")
    add_profile(p)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--tolerance", type=float, default=1e-6)
    p.set_defaults(func=_cmd_roundtrip_check)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConstraintViolation as exc:
        print(f"constraint violation: {exc}", file=sys.stderr)
        for v in exc.violations:
            print(f"  {v}", file=sys.stderr)
        return EXIT_CONSTRAINT
    except WirebendError as exc:
        if isinstance(exc, VersionError):
            print(f"file format error: {exc}", file=sys.stderr)
            return EXIT_IO
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONSTRAINT
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_CONSTRAINT


if __name__ == "__main__":
    sys.exit(main())
