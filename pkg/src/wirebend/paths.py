"""Polyline representation, fabrication-aware simplification, planar-bend
break-up and the segment-pair conflict detector.

All distances are millimetres, all angles degrees. A vertex "turn" is the
exterior angle between its incoming and outgoing segment directions; zero
means collinear, approaching 180 means a fold-back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import Unsimplifiable
from .geometry import segment_closest_points

MIN_SEGMENT_MM = 1e-6

# Turns below this are treated as "no bend at all". Such vertices are not
# fabricable (they would compile to a zero bend) and always count as noise.
ZERO_TURN_DEG = 1e-7

# Bend planes whose unit normals agree beyond this dot product count as
# "same plane, same turning direction" for run detection.
COPLANAR_DOT = 0.999


@dataclass(frozen=True)
class Polyline3:
    """Ordered 3D point list; the universal design geometry.

    Wraps an immutable (n, 3) float64 array, n >= 2, with consecutive
    points at least ``MIN_SEGMENT_MM`` apart.
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError("points must have shape (n, 3)")
        if pts.shape[0] < 2:
            raise ValueError("a polyline needs at least two points")
        seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        if np.any(seg <= MIN_SEGMENT_MM):
            idx = int(np.argmax(seg <= MIN_SEGMENT_MM))
            raise ValueError(f"consecutive points {idx} and {idx + 1} coincide")
        pts = pts.copy()
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_list(cls, pts) -> "Polyline3":
        return cls(np.asarray(pts, dtype=np.float64))

    def to_list(self) -> list[list[float]]:
        return [[float(x), float(y), float(z)] for x, y, z in self.points]

    @property
    def n_points(self) -> int:
        return int(self.points.shape[0])

    def segment_vectors(self) -> np.ndarray:
        return np.diff(self.points, axis=0)

    def segment_lengths(self) -> np.ndarray:
        return np.linalg.norm(self.segment_vectors(), axis=1)

    def directions(self) -> np.ndarray:
        vec = self.segment_vectors()
        return vec / np.linalg.norm(vec, axis=1)[:, None]

    def turn_angles_deg(self) -> np.ndarray:
        """Exterior angle at each interior vertex (length n-2)."""
        d = self.directions()
        a, b = d[:-1], d[1:]
        crossn = np.linalg.norm(np.cross(a, b), axis=1)
        dots = np.einsum("ij,ij->i", a, b)
        return np.degrees(np.arctan2(crossn, dots))

    def bend_normals(self) -> np.ndarray:
        """Unit bend-plane normal per interior vertex; zero rows where collinear."""
        d = self.directions()
        c = np.cross(d[:-1], d[1:])
        n = np.linalg.norm(c, axis=1)
        out = np.zeros_like(c)
        ok = n > 1e-12
        out[ok] = c[ok] / n[ok, None]
        return out

    def arc_length(self) -> float:
        return float(self.segment_lengths().sum())

    def total_turn_deg(self) -> float:
        return float(np.abs(self.turn_angles_deg()).sum())

    def transformed(self, rotation: np.ndarray | None = None, translation=None) -> "Polyline3":
        pts = self.points
        if rotation is not None:
            pts = pts @ np.asarray(rotation, dtype=np.float64).T
        if translation is not None:
            pts = pts + np.asarray(translation, dtype=np.float64)
        return Polyline3(pts)

    def reversed(self) -> "Polyline3":
        return Polyline3(self.points[::-1])

    def __eq__(self, other) -> bool:
        return isinstance(other, Polyline3) and np.array_equal(self.points, other.points)

    def __hash__(self):
        return hash(self.points.tobytes())


@dataclass(frozen=True)
class SimplifyParams:
    """User-adjustable simplification settings plus machine-derived floors."""

    smoothing_strength: float
    min_reduction_ratio: float
    min_feed_mm: float
    min_bend_deg: float

    def __post_init__(self):
        if not 0.0 <= self.smoothing_strength <= 1.0:
            raise ValueError("smoothing_strength must be in [0, 1]")
        if not 0.0 <= self.min_reduction_ratio < 1.0:
            raise ValueError("min_reduction_ratio must be in [0, 1)")
        if self.min_feed_mm < 0:
            raise ValueError("min_feed_mm must be >= 0")
        if self.min_bend_deg < 0:
            raise ValueError("min_bend_deg must be >= 0")


@dataclass(frozen=True)
class Conflict:
    segment_a: int
    segment_b: int
    closest_point_a: tuple[float, float, float]
    closest_point_b: tuple[float, float, float]
    min_distance_mm: float


@dataclass
class CollisionReport:
    conflicts: list[Conflict] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.conflicts)


# ---------------------------------------------------------------------------
# simplification


def _turns_deg(pts: np.ndarray) -> np.ndarray:
    vec = np.diff(pts, axis=0)
    d = vec / np.linalg.norm(vec, axis=1)[:, None]
    crossn = np.linalg.norm(np.cross(d[:-1], d[1:]), axis=1)
    dots = np.einsum("ij,ij->i", d[:-1], d[1:])
    return np.degrees(np.arctan2(crossn, dots))


def _total_turn(pts: np.ndarray) -> float:
    if len(pts) < 3:
        return 0.0
    return float(np.abs(_turns_deg(pts)).sum())


def _noise_mask(pts: np.ndarray, min_feed: float, min_bend: float) -> np.ndarray:
    """True at interior vertices that are not fabricable as drawn.

    A vertex is noise when its turn is below the bendable floor or one of
    its segments is shorter than the minimum feed. Everything else is a
    deliberate bend and is never touched.
    """
    n = len(pts)
    mask = np.zeros(n, dtype=bool)
    if n < 3:
        return mask
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    turns = _turns_deg(pts)
    floor = max(min_bend, ZERO_TURN_DEG)
    interior = np.arange(1, n - 1)
    mask[interior] = (
        (turns < floor) | (seg[:-1] < min_feed) | (seg[1:] < min_feed)
    )
    return mask


def _smooth(pts: np.ndarray, params: SimplifyParams) -> np.ndarray:
    """Laplacian passes over noise vertices only; endpoints pinned.

    One pass per 0.2 of smoothing strength, each blending a vertex toward
    its neighbour midpoint by the strength. A pass that would raise the
    total turn is discarded (smoothing must never add wiggle).
    """
    w = params.smoothing_strength
    if w <= 0.0 or len(pts) < 3:
        return pts
    passes = int(math.ceil(w / 0.2 - 1e-9))
    out = pts
    for _ in range(passes):
        mask = _noise_mask(out, params.min_feed_mm, params.min_bend_deg)
        if not mask.any():
            break
        cand = out.copy()
        mid = 0.5 * (out[:-2] + out[2:])
        rows = np.where(mask[1:-1])[0]
        cand[rows + 1] = out[rows + 1] + w * (mid[rows] - out[rows + 1])
        if _valid_spacing(cand) and _total_turn(cand) <= _total_turn(out) + 1e-12:
            out = cand
        else:
            break
    return out


def _valid_spacing(pts: np.ndarray) -> bool:
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    return bool(np.all(seg > MIN_SEGMENT_MM))


def _dp_keep(pts: np.ndarray, tol: float) -> set[int]:
    """Douglas-Peucker survivor indices at a given tolerance (iterative)."""
    n = len(pts)
    keep = {0, n - 1}
    stack = [(0, n - 1)]
    while stack:
        lo, hi = stack.pop()
        if hi - lo < 2:
            continue
        a, b = pts[lo], pts[hi]
        ab = b - a
        ab2 = float(ab @ ab)
        rel = pts[lo + 1 : hi] - a
        if ab2 <= 1e-18:
            dist = np.linalg.norm(rel, axis=1)
        else:
            t = np.clip((rel @ ab) / ab2, 0.0, 1.0)
            dist = np.linalg.norm(rel - t[:, None] * ab, axis=1)
        k = int(np.argmax(dist))
        if dist[k] > tol:
            idx = lo + 1 + k
            keep.add(idx)
            stack.append((lo, idx))
            stack.append((idx, hi))
    return keep


def _reduce(pts: np.ndarray, params: SimplifyParams) -> np.ndarray:
    """Drop noise vertices, sweeping the DP tolerance until the reduction
    ratio is met or no removable vertex remains.

    Deliberate bends (feasible turn, feasible feeds) are excluded from
    removal, so an already-clean path passes through untouched.
    """
    n0 = len(pts)
    noise = _noise_mask(pts, params.min_feed_mm, params.min_bend_deg)
    removable = set(np.where(noise)[0])
    if not removable:
        return pts
    target = int(math.floor(n0 * (1.0 - params.min_reduction_ratio)))
    floor_keep = set(range(n0)) - removable

    diag = float(np.linalg.norm(pts.max(axis=0) - pts.min(axis=0)))
    if diag <= 0:
        return pts
    best = pts
    for tol in np.geomspace(diag * 1e-6, diag, 48):
        keep = sorted(_dp_keep(pts, float(tol)) | floor_keep)
        cand = pts[keep]
        if _valid_spacing(cand):
            best = cand
        if len(keep) <= max(target, len(floor_keep)):
            break
    return best


def _repair(pts: np.ndarray, params: SimplifyParams) -> np.ndarray:
    """Enforce the hard posts: every segment >= min feed, every interior
    turn >= min bend. One vertex removed per iteration, worst first."""
    min_feed = params.min_feed_mm
    floor = max(params.min_bend_deg, ZERO_TURN_DEG)
    pts = np.asarray(pts, dtype=np.float64)
    while len(pts) > 2:
        seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        short = np.where(seg < min_feed)[0]
        if short.size:
            i = int(short[np.argmin(seg[short])])
            victim = _short_segment_victim(pts, seg, i)
            if victim is None:
                raise Unsimplifiable(
                    f"segment {i} shorter than the minimum feed cannot be merged"
                )
            pts = np.delete(pts, victim, axis=0)
            continue
        turns = _turns_deg(pts)
        bad = np.where(turns < floor)[0]
        if bad.size:
            i = int(bad[np.argmin(turns[bad])]) + 1
            cand = np.delete(pts, i, axis=0)
            if not _valid_spacing(cand):
                raise Unsimplifiable(f"removing vertex {i} collapses the path")
            pts = cand
            continue
        break
    return pts


def _short_segment_victim(pts: np.ndarray, seg: np.ndarray, i: int) -> int | None:
    """Pick which endpoint of short segment i to drop.

    Interior endpoints only; dropping the endpoint shared with the longer
    neighbouring segment merges the short run into that neighbour. Skips
    a choice that would create coincident points.
    """
    candidates = []
    if i > 0:
        candidates.append((seg[i - 1], i))  # merges into the segment before
    if i + 1 < len(seg):
        candidates.append((seg[i + 1], i + 1))  # merges into the segment after
    candidates.sort(key=lambda c: (-c[0], c[1]))
    for _, v in candidates:
        cand = np.delete(pts, v, axis=0)
        if _valid_spacing(cand):
            return v
    return None


def simplify(path: Polyline3, params: SimplifyParams) -> Polyline3:
    """Make a drawn path fabricable: smooth noise, drop redundant points,
    then merge away every sub-feed segment and sub-bendable kink.

    Deliberate bends survive untouched, which makes the operation exactly
    idempotent. A two-point straight wire is always a legal result.
    """
    pts = _smooth(path.points, params)
    pts = _reduce(pts, params)
    pts = _repair(pts, params)
    return Polyline3(pts)


# ---------------------------------------------------------------------------
# planar-bend break-up


def deplanarize(path: Polyline3, epsilon_deg: float) -> Polyline3:
    """Break up runs of 3+ coplanar same-direction bends.

    Run vertices are pushed out of the shared bend plane by alternating
    offsets so consecutive bend planes end up at least ``epsilon_deg``
    apart. Displacements stay within tan(epsilon) times the adjacent
    segment length; every vertex outside a run, and both endpoints, are
    untouched.
    """
    if not 0.0 < epsilon_deg <= 10.0:
        raise ValueError("epsilon_deg must be in (0, 10]")
    pts = path.points.copy()
    n = len(pts)
    if n < 5:  # fewer than 3 interior bends
        return Polyline3(pts)

    turns = path.turn_angles_deg()
    normals = path.bend_normals()
    seg = path.segment_lengths()
    is_bend = turns > ZERO_TURN_DEG

    runs = []
    run: list[int] = []
    for k in range(len(turns)):  # k indexes interior vertex k+1
        if not is_bend[k]:
            if len(run) >= 3:
                runs.append(run)
            run = []
            continue
        if run and float(normals[run[-1]] @ normals[k]) > COPLANAR_DOT and run[-1] == k - 1:
            run.append(k)
        else:
            if len(run) >= 3:
                runs.append(run)
            run = [k]
    if len(run) >= 3:
        runs.append(run)

    h_cap = math.tan(math.radians(epsilon_deg))
    for run in runs:
        plane_n = normals[run[0]]
        for j, k in enumerate(run):
            v = k + 1  # vertex index
            h = h_cap * min(seg[v - 1], seg[v])
            pts[v] = pts[v] + ((-1.0) ** j) * h * plane_n
    return Polyline3(pts)


# ---------------------------------------------------------------------------
# conflict detection


def detect_conflicts(
    path: Polyline3, threshold_deg: float, proximity_mm: float
) -> CollisionReport:
    """Flag non-adjacent segment pairs that risk colliding during bending.

    A pair conflicts when the segments pass within ``proximity_mm`` of
    each other, or when every bend between them lies in one shared plane
    turning the same way and the accumulated turn exceeds
    ``threshold_deg`` (the wire curls back through the machine head).
    Pairs connected by straight wire only never conflict. Each conflict
    carries the closest-point pair for display.
    """
    pts = path.points
    nseg = len(pts) - 1
    report = CollisionReport()
    if nseg < 3:
        return report

    turns = path.turn_angles_deg()
    normals = path.bend_normals()
    is_bend = turns > ZERO_TURN_DEG

    for i in range(nseg - 2):
        # state of the bend chain between segment i and the current j:
        # bends live at interior vertices i+1 .. j, i.e. turn indices i .. j-1
        accum = 0.0
        coplanar = True
        any_bend = False
        last_normal: np.ndarray | None = None

        def fold_in(k: int):
            nonlocal accum, coplanar, any_bend, last_normal
            if not is_bend[k]:
                return
            if last_normal is not None and float(last_normal @ normals[k]) <= COPLANAR_DOT:
                coplanar = False
            accum += float(turns[k])
            any_bend = True
            last_normal = normals[k]

        fold_in(i)
        for j in range(i + 2, nseg):
            fold_in(j - 1)
            if not any_bend:
                continue  # same straight rod; cannot self-collide
            pa, pb, dist = segment_closest_points(pts[i], pts[i + 1], pts[j], pts[j + 1])
            turn_flag = coplanar and accum > threshold_deg
            if dist < proximity_mm or turn_flag:
                report.conflicts.append(
                    Conflict(
                        segment_a=i,
                        segment_b=j,
                        closest_point_a=tuple(float(x) for x in pa),
                        closest_point_b=tuple(float(x) for x in pb),
                        min_distance_mm=dist,
                    )
                )
    return report
