"""Low-level 3D vector math used by the geometry pipeline.

Hot inner loops (forward kinematics, per-vertex frame transport) work on
plain float tuples, which is considerably faster than creating thousands
of tiny numpy arrays. Bulk operations (alignment, batched angles) use
numpy.
"""

from __future__ import annotations

import math

import numpy as np

Vec3 = tuple[float, float, float]

EPS = 1e-12


def vadd(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def vsub(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def vscale(a: Vec3, s: float) -> Vec3:
    return (a[0] * s, a[1] * s, a[2] * s)


def dot(a: Vec3, b: Vec3) -> float:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def cross(a: Vec3, b: Vec3) -> Vec3:
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def norm(a: Vec3) -> float:
    return math.sqrt(dot(a, a))


def unit(a: Vec3) -> Vec3:
    n = norm(a)
    if n < EPS:
        raise ValueError("cannot normalize a near-zero vector")
    return (a[0] / n, a[1] / n, a[2] / n)


def angle_between_deg(a: Vec3, b: Vec3) -> float:
    """Unsigned angle between two vectors in degrees, atan2-stable near 0/180."""
    c = cross(a, b)
    return math.degrees(math.atan2(norm(c), dot(a, b)))


def signed_angle_deg(a: Vec3, b: Vec3, axis: Vec3) -> float:
    """Signed angle from ``a`` to ``b`` about ``axis`` (right-handed), in (-180, 180]."""
    ang = math.degrees(math.atan2(dot(cross(a, b), axis), dot(a, b)))
    if ang <= -180.0:
        ang += 360.0
    return ang


def rotate_about(v: Vec3, axis: Vec3, angle_deg: float) -> Vec3:
    """Rodrigues rotation of ``v`` about unit ``axis`` by ``angle_deg``."""
    th = math.radians(angle_deg)
    c, s = math.cos(th), math.sin(th)
    k = axis
    kv = cross(k, v)
    kd = dot(k, v) * (1.0 - c)
    return (
        v[0] * c + kv[0] * s + k[0] * kd,
        v[1] * c + kv[1] * s + k[1] * kd,
        v[2] * c + kv[2] * s + k[2] * kd,
    )


def segment_closest_points(
    p1: np.ndarray, q1: np.ndarray, p2: np.ndarray, q2: np.ndarray
) -> tuple[np.ndarray, np.ndarray, float]:
    """Closest points between segments [p1,q1] and [p2,q2].

    Returns (point_on_first, point_on_second, distance). Handles all the
    degenerate cases (parallel, zero-length) by clamping the parameters.
    """
    d1 = q1 - p1
    d2 = q2 - p2
    r = p1 - p2
    a = float(d1 @ d1)
    e = float(d2 @ d2)
    f = float(d2 @ r)

    if a <= EPS and e <= EPS:
        return p1, p2, float(np.linalg.norm(r))
    if a <= EPS:
        s = 0.0
        t = min(1.0, max(0.0, f / e))
    else:
        c = float(d1 @ r)
        if e <= EPS:
            t = 0.0
            s = min(1.0, max(0.0, -c / a))
        else:
            b = float(d1 @ d2)
            denom = a * e - b * b
            if denom > EPS:
                s = min(1.0, max(0.0, (b * f - c * e) / denom))
            else:
                s = 0.0
            t = (b * s + f) / e
            if t < 0.0:
                t = 0.0
                s = min(1.0, max(0.0, -c / a))
            elif t > 1.0:
                t = 1.0
                s = min(1.0, max(0.0, (b - c) / a))
    ca = p1 + s * d1
    cb = p2 + t * d2
    return ca, cb, float(np.linalg.norm(ca - cb))


def kabsch_align(moving: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Best-fit rigid transform of ``moving`` onto ``target`` (same vertex count).

    Returns the transformed copy of ``moving``. Reflections are excluded so
    the result is a proper rotation plus translation.
    """
    mc = moving.mean(axis=0)
    tc = target.mean(axis=0)
    h = (moving - mc).T @ (target - tc)
    u, _, vt = np.linalg.svd(h)
    d = np.sign(np.linalg.det(vt.T @ u.T))
    flip = np.diag([1.0, 1.0, d])
    rot = vt.T @ flip @ u.T
    return (moving - mc) @ rot.T + tc


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Uniform-ish random proper rotation matrix."""
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q *= np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q
