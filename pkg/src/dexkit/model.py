"""Core domain types: tracked hand frames, robot joint state, and commands.

All angles are radians, all lengths meters, all times seconds.  Every type
here is an immutable value and can be shared freely between tasks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import skeleton
from .errors import NonFiniteValue, NonUnitQuaternion, WrongVertexCount

QUAT_UNIT_TOL = 1e-6


@dataclass(frozen=True)
class Pose:
    """Position (m) plus unit orientation quaternion (qx, qy, qz, qw)."""

    position: tuple[float, float, float]
    orientation: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 1.0)


@dataclass(frozen=True)
class HandFrame:
    """One tracked human-hand sample: 26 vertex poses and a timestamp."""

    t: float
    vertices: tuple[Pose, ...]

    def positions(self) -> np.ndarray:
        """All vertex positions as a (26, 3) array."""
        return np.array([v.position for v in self.vertices], dtype=float)

    def position(self, index: int) -> np.ndarray:
        return np.asarray(self.vertices[index].position, dtype=float)


@dataclass(frozen=True)
class AllegroState:
    """16 joint positions, 16 joint efforts, timestamp.

    Joint order is [index(4), middle(4), ring(4), thumb(4)]; joint 0 of
    each non-thumb finger is the root/abduction joint.
    """

    t: float
    q: tuple[float, ...]
    tau: tuple[float, ...] = field(default=(0.0,) * skeleton.NUM_JOINTS)

    def __post_init__(self):
        if len(self.q) != skeleton.NUM_JOINTS or len(self.tau) != skeleton.NUM_JOINTS:
            raise WrongVertexCount(
                f"expected {skeleton.NUM_JOINTS} joints, got q={len(self.q)} tau={len(self.tau)}"
            )


@dataclass(frozen=True)
class JointCommand:
    """Relative target joint positions: 16 deltas applied to the current q."""

    t: float
    dq: tuple[float, ...]

    def __post_init__(self):
        if len(self.dq) != skeleton.NUM_JOINTS:
            raise WrongVertexCount(f"expected {skeleton.NUM_JOINTS} deltas, got {len(self.dq)}")


@dataclass(frozen=True)
class EpisodeFrame:
    """One recorded demonstration step: state, command, and image references.

    Image references are paths relative to the episode directory.
    """

    t: float
    q: tuple[float, ...]
    tau: tuple[float, ...]
    dq: tuple[float, ...]
    image_top: str
    image_wrist: str

    def to_record(self) -> dict:
        return {
            "t": self.t,
            "q": list(self.q),
            "tau": list(self.tau),
            "dq": list(self.dq),
            "image_top": self.image_top,
            "image_wrist": self.image_wrist,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "EpisodeFrame":
        return cls(
            t=float(rec["t"]),
            q=tuple(float(v) for v in rec["q"]),
            tau=tuple(float(v) for v in rec["tau"]),
            dq=tuple(float(v) for v in rec["dq"]),
            image_top=str(rec["image_top"]),
            image_wrist=str(rec["image_wrist"]),
        )


def validate_hand_frame(frame: HandFrame) -> None:
    """Check every hand-frame invariant, raising on the first violation.

    Raises:
        WrongVertexCount: not exactly 26 vertices.
        NonFiniteValue: NaN/inf in t or any pose, or negative t.
        NonUnitQuaternion: an orientation further than 1e-6 from unit norm.
    """
    if len(frame.vertices) != skeleton.VERTEX_COUNT:
        raise WrongVertexCount(
            f"expected {skeleton.VERTEX_COUNT} vertices, got {len(frame.vertices)}"
        )
    if not math.isfinite(frame.t) or frame.t < 0.0:
        raise NonFiniteValue(f"timestamp must be finite and non-negative, got {frame.t}")
    for i, pose in enumerate(frame.vertices):
        for c in pose.position:
            if not math.isfinite(c):
                raise NonFiniteValue(f"vertex {i} has non-finite position component {c}")
        for c in pose.orientation:
            if not math.isfinite(c):
                raise NonFiniteValue(f"vertex {i} has non-finite orientation component {c}")
        n = math.sqrt(sum(c * c for c in pose.orientation))
        if abs(n - 1.0) > QUAT_UNIT_TOL:
            raise NonUnitQuaternion(f"vertex {i} orientation norm {n} deviates from 1")


def identity_frame(t: float = 0.0) -> HandFrame:
    """Frame of 26 identity poses; useful as a validation fixture."""
    return HandFrame(t=t, vertices=tuple(Pose((0.0, 0.0, 0.0)) for _ in range(skeleton.VERTEX_COUNT)))


def clamp_to_limits(q, limits) -> np.ndarray:
    """Clamp each joint value into its [lo, hi] interval."""
    q = np.asarray(q, dtype=float)
    lo = np.array([l for l, _ in limits], dtype=float)
    hi = np.array([h for _, h in limits], dtype=float)
    return np.clip(q, lo, hi)


def frame_positions_transformed(frame: HandFrame, rotation, translation) -> HandFrame:
    """Apply a rigid transform to every vertex of a frame (orientation kept)."""
    from .geometry import matrix_to_quat, quat_multiply, quat_to_matrix

    rotation = np.asarray(rotation, dtype=float)
    translation = np.asarray(translation, dtype=float)
    rq = matrix_to_quat(rotation)
    verts = []
    for pose in frame.vertices:
        p = rotation @ np.asarray(pose.position) + translation
        o = quat_multiply(rq, pose.orientation)
        verts.append(Pose(tuple(float(x) for x in p), tuple(float(x) for x in o)))
    return HandFrame(t=frame.t, vertices=tuple(verts))
