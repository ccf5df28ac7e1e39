"""Parametric synthetic human hand over the fixed 26-vertex skeleton.

Drives the simulated teleop loop and the tests: a literal rest pose (flat
right hand, wrist at the origin, fingers along +y, palm normal +z) plus a
small parameter set (per-finger curl, spread, thumb curl/sweep).  The rest
pose numbers are frozen constants; the browser companion replicates them
verbatim, so the all-zero pose is bit-identical across both.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import skeleton
from .geometry import rotate_about_axis
from .model import HandFrame, Pose

# Rest-pose vertex positions, meters, indexed per the skeleton layout.
REST_POSITIONS = (
    (0.000, 0.000, 0.000),   # wrist
    (0.000, 0.045, 0.000),   # palm
    (0.022, 0.020, 0.000),   # thumb metacarpal
    (0.048, 0.042, 0.000),   # thumb proximal
    (0.075, 0.062, 0.000),   # thumb distal
    (0.094, 0.077, 0.000),   # thumb tip
    (0.028, 0.052, 0.000),   # index metacarpal
    (0.030, 0.095, 0.000),   # index proximal
    (0.030, 0.135, 0.000),   # index intermediate
    (0.030, 0.158, 0.000),   # index distal
    (0.030, 0.180, 0.000),   # index tip
    (0.010, 0.054, 0.000),   # middle metacarpal
    (0.010, 0.100, 0.000),   # middle proximal
    (0.010, 0.145, 0.000),   # middle intermediate
    (0.010, 0.171, 0.000),   # middle distal
    (0.010, 0.195, 0.000),   # middle tip
    (-0.010, 0.052, 0.000),  # ring metacarpal
    (-0.010, 0.095, 0.000),  # ring proximal
    (-0.010, 0.138, 0.000),  # ring intermediate
    (-0.010, 0.163, 0.000),  # ring distal
    (-0.010, 0.185, 0.000),  # ring tip
    (-0.028, 0.048, 0.000),  # little metacarpal
    (-0.030, 0.088, 0.000),  # little proximal
    (-0.030, 0.120, 0.000),  # little intermediate
    (-0.030, 0.139, 0.000),  # little distal
    (-0.030, 0.156, 0.000),  # little tip
)

# Joint bend at full curl, radians, proximal/intermediate/distal.
CURL_BEND = (1.45, 1.6, 1.1)

# Spread fan per finger at spread=1, radians about +z at the proximal joint.
# Signed so positive spread fans the fingers apart (index toward +x).
SPREAD_FAN = {"index": -0.14, "middle": -0.03, "ring": 0.07, "little": 0.17}

THUMB_SWEEP_MAX = 0.9   # rad about +z at the thumb metacarpal
THUMB_BEND = (0.6, 0.9)  # rad at proximal/distal joints at full thumb curl

FINGERS = ("index", "middle", "ring", "little")


@dataclass(frozen=True)
class HandParams:
    """Pose parameters; all default to the flat rest pose."""

    curl: dict = field(default_factory=dict)  # finger -> [0,1]
    spread: float = 0.0                       # [-1, 1]
    thumb_curl: float = 0.0                   # [0, 1]
    thumb_sweep: float = 0.0                  # [0, 1], toward the palm center

    def curl_of(self, finger: str) -> float:
        return float(self.curl.get(finger, 0.0))


def rest_vertices() -> np.ndarray:
    return np.array(REST_POSITIONS, dtype=float)


def pose_vertices(params: HandParams) -> np.ndarray:
    pts = rest_vertices()

    for finger in FINGERS:
        chain = skeleton.FINGER_CHAINS[finger]  # proximal..tip
        spread_angle = params.spread * SPREAD_FAN[finger]
        if spread_angle != 0.0:
            pivot = pts[chain[0]].copy()
            for v in chain[1:]:
                pts[v] = pivot + rotate_about_axis(pts[v] - pivot, (0.0, 0.0, 1.0), spread_angle)
        c = params.curl_of(finger)
        if c != 0.0:
            axis = rotate_about_axis((1.0, 0.0, 0.0), (0.0, 0.0, 1.0), spread_angle)
            for j, bend in zip(range(3), CURL_BEND):
                pivot = pts[chain[j]].copy()
                for v in chain[j + 1:]:
                    pts[v] = pivot + rotate_about_axis(pts[v] - pivot, axis, -c * bend)

    # thumb: sweep whole chain about +z at the metacarpal, then curl
    sweep = params.thumb_sweep * THUMB_SWEEP_MAX
    tchain = (skeleton.THUMB_METACARPAL,) + skeleton.FINGER_CHAINS["thumb"]
    if sweep != 0.0:
        pivot = pts[tchain[0]].copy()
        for v in tchain[1:]:
            pts[v] = pivot + rotate_about_axis(pts[v] - pivot, (0.0, 0.0, 1.0), sweep)
    if params.thumb_curl != 0.0:
        d = pts[skeleton.THUMB_TIP] - pts[skeleton.THUMB_METACARPAL]
        d[2] = 0.0
        n = np.linalg.norm(d)
        if n > 0.0:
            d /= n
            axis = np.cross((0.0, 0.0, 1.0), d)
            for j, bend in zip((skeleton.THUMB_PROXIMAL, skeleton.THUMB_DISTAL), THUMB_BEND):
                pivot = pts[j].copy()
                for v in range(j + 1, skeleton.THUMB_TIP + 1):
                    pts[v] = pivot + rotate_about_axis(pts[v] - pivot, axis, params.thumb_curl * bend)
    return pts


def make_frame(t: float, params: HandParams | None = None) -> HandFrame:
    """HandFrame at time t; vertex orientations are identity quaternions."""
    pts = pose_vertices(params or HandParams())
    poses = tuple(Pose(position=(float(p[0]), float(p[1]), float(p[2])),
                       orientation=(0.0, 0.0, 0.0, 1.0)) for p in pts)
    return HandFrame(t=t, vertices=poses)
