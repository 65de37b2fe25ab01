"""Physical model of the wire bender head and its springback behaviour.

The head is described by four lengths measured off the machine: die
diameter D1, pin diameter D2, wire diameter D3 and an optional clearance
gap G. Two derived quantities drive everything downstream:

    CD = D1/2 + D2/2 + D3 + G
    CB = D1/2 + D2/2 + D3
    A  = acos(CB / CD)
    minimum feed = CD * sin(A)

i.e. the shortest wire length that may separate two consecutive bends.
Note the tangency angle is acos(CB/CD); the ratio the other way round is
> 1 for any positive gap and has no arc-cosine.

Springback: commanded bend angles below ``min_plastic_deg`` stay in the
elastic regime and leave the wire straight. Above it, the achieved angle
is interpolated from a calibration table of (commanded, actual) pairs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .errors import TargetUnreachable, VersionError

PROFILE_SCHEMA_VERSION = 1

# Calibration measured for 1.6 mm aluminium on our bender. Only the
# (15, 0) dead-zone anchor is load-bearing; replace the rest by
# recalibrating against your own machine.
DEFAULT_SPRINGBACK_SAMPLES: tuple[tuple[float, float], ...] = (
    (15.0, 0.0),
    (25.0, 12.0),
    (35.0, 24.0),
    (45.0, 36.0),
    (55.0, 47.0),
    (65.0, 58.0),
    (75.0, 69.0),
    (85.0, 80.0),
)


@dataclass(frozen=True)
class SpringbackCurve:
    """Ordered (commanded_deg, actual_deg) calibration samples."""

    samples: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.samples) < 1:
            raise ValueError("springback curve needs at least one sample")
        object.__setattr__(
            self, "samples", tuple((float(c), float(a)) for c, a in self.samples)
        )
        cs = [c for c, _ in self.samples]
        acts = [a for _, a in self.samples]
        if any(b <= a for a, b in zip(cs, cs[1:])):
            raise ValueError("commanded angles must be strictly increasing")
        if any(b < a for a, b in zip(acts, acts[1:])):
            raise ValueError("actual angles must be non-decreasing")
        if abs(acts[0]) > 1e-9:
            raise ValueError("first calibration sample must have actual angle 0")


def default_springback() -> SpringbackCurve:
    return SpringbackCurve(DEFAULT_SPRINGBACK_SAMPLES)


@dataclass(frozen=True)
class MachineProfile:
    """Bender head geometry, feasible angle range and springback calibration."""

    die_diameter_mm: float
    pin_diameter_mm: float
    wire_diameter_mm: float
    clearance_gap_mm: float
    max_bend_deg: float
    min_plastic_deg: float
    springback: SpringbackCurve

    def __post_init__(self):
        for name in ("die_diameter_mm", "pin_diameter_mm", "wire_diameter_mm"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.clearance_gap_mm < 0:
            raise ValueError("clearance_gap_mm must be >= 0")
        if not (0 < self.min_plastic_deg < self.max_bend_deg <= 180):
            raise ValueError("need 0 < min_plastic_deg < max_bend_deg <= 180")
        first_c, first_a = self.springback.samples[0]
        if abs(first_c - self.min_plastic_deg) > 1e-9 or abs(first_a) > 1e-9:
            raise ValueError(
                "springback curve must start at (min_plastic_deg, 0); "
                f"got ({first_c}, {first_a})"
            )


def min_feed(profile: MachineProfile) -> float:
    """Shortest feed between adjacent bends imposed by the head geometry.

    Zero when the clearance gap is zero (the tangency angle collapses);
    approaches CD as the gap grows.
    """
    cb = profile.die_diameter_mm / 2 + profile.pin_diameter_mm / 2 + profile.wire_diameter_mm
    cd = cb + profile.clearance_gap_mm
    a = math.acos(cb / cd)
    return cd * math.sin(a)


def min_feed_formula(profile: MachineProfile) -> str:
    """Human-readable trace of the evaluated head-geometry relations."""
    cb = profile.die_diameter_mm / 2 + profile.pin_diameter_mm / 2 + profile.wire_diameter_mm
    cd = cb + profile.clearance_gap_mm
    a = math.degrees(math.acos(cb / cd))
    return (
        f"CD = D1/2 + D2/2 + D3 + G = {cd:.4f} mm; "
        f"CB = D1/2 + D2/2 + D3 = {cb:.4f} mm; "
        f"A = acos(CB/CD) = {a:.4f} deg; "
        f"min feed = CD*sin(A) = {min_feed(profile):.4f} mm"
    )


def actual_angle(profile: MachineProfile, commanded_deg: float) -> float:
    """Achieved bend angle for a commanded angle, after elastic recovery.

    Zero throughout the elastic dead zone, piecewise-linear over the
    calibration table, clamped at the last sample beyond it.
    """
    if commanded_deg < 0 or commanded_deg > profile.max_bend_deg + 1e-9:
        raise ValueError(
            f"commanded angle {commanded_deg} outside [0, {profile.max_bend_deg}]"
        )
    samples = profile.springback.samples
    if commanded_deg <= samples[0][0]:
        return 0.0
    if commanded_deg >= samples[-1][0]:
        return samples[-1][1]
    for (c0, a0), (c1, a1) in zip(samples, samples[1:]):
        if commanded_deg <= c1:
            t = (commanded_deg - c0) / (c1 - c0)
            return a0 + t * (a1 - a0)
    return samples[-1][1]  # unreachable


def max_actual_angle(profile: MachineProfile) -> float:
    """Largest achievable bend angle within the machine's commanded range."""
    return actual_angle(profile, profile.max_bend_deg)


def commanded_for(profile: MachineProfile, target_actual_deg: float) -> float:
    """Commanded angle whose achieved angle equals ``target_actual_deg``.

    The inverse of :func:`actual_angle` by interpolation. Zero targets
    emit no bend at all; any positive target over-extends past the
    elastic dead zone. On flat calibration spans the smallest commanded
    angle is returned.
    """
    if target_actual_deg < 0:
        raise TargetUnreachable(f"negative bend target {target_actual_deg}")
    if target_actual_deg == 0:
        return 0.0
    reachable = max_actual_angle(profile)
    if target_actual_deg > reachable + 1e-9:
        raise TargetUnreachable(
            f"target {target_actual_deg} deg exceeds achievable "
            f"{reachable} deg at max bend {profile.max_bend_deg} deg"
        )
    samples = profile.springback.samples
    target = min(target_actual_deg, samples[-1][1])
    for (c0, a0), (c1, a1) in zip(samples, samples[1:]):
        if target <= a1:
            if a1 == a0:
                return c0
            t = (target - a0) / (a1 - a0)
            commanded = c0 + t * (c1 - c0)
            return min(commanded, profile.max_bend_deg)
    return min(samples[-1][0], profile.max_bend_deg)


def profile_to_dict(profile: MachineProfile) -> dict:
    return {
        "version": PROFILE_SCHEMA_VERSION,
        "die_diameter_mm": profile.die_diameter_mm,
        "pin_diameter_mm": profile.pin_diameter_mm,
        "wire_diameter_mm": profile.wire_diameter_mm,
        "clearance_gap_mm": profile.clearance_gap_mm,
        "max_bend_deg": profile.max_bend_deg,
        "min_plastic_deg": profile.min_plastic_deg,
        "springback": [[c, a] for c, a in profile.springback.samples],
    }


def profile_from_dict(data: dict) -> MachineProfile:
    version = data.get("version")
    if version != PROFILE_SCHEMA_VERSION:
        raise VersionError(f"unsupported machine profile version: {version!r}")
    try:
        return MachineProfile(
            die_diameter_mm=float(data["die_diameter_mm"]),
            pin_diameter_mm=float(data["pin_diameter_mm"]),
            wire_diameter_mm=float(data["wire_diameter_mm"]),
            clearance_gap_mm=float(data["clearance_gap_mm"]),
            max_bend_deg=float(data["max_bend_deg"]),
            min_plastic_deg=float(data["min_plastic_deg"]),
            springback=SpringbackCurve(
                tuple((float(c), float(a)) for c, a in data["springback"])
            ),
        )
    except KeyError as exc:
        raise ValueError(f"machine profile missing field {exc}") from exc


def load_profile(path: str | Path) -> MachineProfile:
    with open(path, "r", encoding="utf-8") as fh:
        return profile_from_dict(json.load(fh))


def save_profile(profile: MachineProfile, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(profile_to_dict(profile), fh, indent=2)
        fh.write("\n")
