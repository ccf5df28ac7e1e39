"""Robot rig configuration: DH tables, joint limits, and retargeting constants.

The defaults describe the four-fingered hand used throughout: three fingers
on a common palm plane (index/middle/ring at x = +45/0/-45 mm, pointing +y,
palm normal +z) and a thumb mounted on the index side.  Everything here is
serializable to a single JSON file so a rig can be swapped via ``--rig`` or
the ``DEXKIT_RIG`` environment variable.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import skeleton
from .geometry import normalize, rot_x, rot_z
from .kinematics import (
    FINGER_DH_ROWS,
    THUMB_DH_ROWS,
    DhChain,
    DhRow,
    IkParams,
)

PI = math.pi

_DEFAULT_LIMITS = tuple((-PI / 2, PI / 2) for _ in range(skeleton.NUM_JOINTS))

# Palm-plane anchor points in the robot base frame (meters).
_DEFAULT_ANCHORS = {
    "index_root": (0.045, 0.0, 0.0),
    "middle_root": (0.0, 0.0, 0.0),
    "ring_root": (-0.045, 0.0, 0.0),
    "wrist": (0.0, -0.095, 0.0),
    "thumb_root": (0.060, -0.045, -0.008),
}

# Finger chains point +y and curl toward -z (local x -> +y, local z -> -z).
_FINGER_BASE_ROTATION = ((0.0, 1.0, 0.0), (1.0, 0.0, 0.0), (0.0, 0.0, -1.0))

# Thumb chain aimed across the palm; tuned so synthesized operator motion
# keeps the thumb target inside its reachable shell.
_THUMB_BASE_ROTATION = tuple(
    tuple(float(v) for v in row) for row in (rot_z(math.pi) @ rot_x(math.pi / 6))
)

# Which skeleton vertices anchor the human hand plane.
_DEFAULT_HUMAN_ANCHORS = {
    "index_root": skeleton.INDEX_PROXIMAL,
    "ring_root": skeleton.RING_PROXIMAL,
    "middle_root": skeleton.MIDDLE_PROXIMAL,
    "wrist": skeleton.WRIST,
}


@dataclass(frozen=True)
class RigConfig:
    """Full kinematic and retargeting description of one robot hand."""

    dh_finger: tuple[DhRow, ...] = FINGER_DH_ROWS
    dh_thumb: tuple[DhRow, ...] = THUMB_DH_ROWS
    joint_limits: tuple = _DEFAULT_LIMITS
    thumb_tip_offset: float = 0.023
    finger_tip_offset: float = 0.034
    plane_offset_sign: float = 1.0  # finger offsets move along sign * plane normal
    anchors: dict = field(default_factory=lambda: dict(_DEFAULT_ANCHORS))
    finger_base_rotation: tuple = _FINGER_BASE_ROTATION
    thumb_base_rotation: tuple = _THUMB_BASE_ROTATION
    human_anchors: dict = field(default_factory=lambda: dict(_DEFAULT_HUMAN_ANCHORS))
    pinky_hold_pose: tuple = (0.0, 0.0, 0.0, 0.0)
    max_step: float = 0.08
    ik: IkParams = field(default_factory=IkParams)

    def __post_init__(self):
        for rows in (self.dh_finger, self.dh_thumb):
            for r in rows:
                for v in (r.trans_x, r.trans_z, r.rot_x, r.rot_z_offset):
                    if not math.isfinite(v):
                        raise ValueError(f"non-finite DH entry in {r}")
        if self.thumb_tip_offset < 0 or self.finger_tip_offset < 0:
            raise ValueError("tip offsets must be non-negative")
        if len(self.joint_limits) != skeleton.NUM_JOINTS:
            raise ValueError("need limits for all 16 joints")
        for lo, hi in self.joint_limits:
            if not lo < hi:
                raise ValueError(f"joint limit {lo} !< {hi}")

    # -- derived geometry ---------------------------------------------------

    def anchor(self, name: str) -> np.ndarray:
        return np.asarray(self.anchors[name], dtype=float)

    def plane_frame(self) -> np.ndarray:
        """Orthonormal palm frame [x y n] built from the plane anchors."""
        i = self.anchor("index_root")
        r = self.anchor("ring_root")
        w = self.anchor("wrist")
        x = normalize(i - r)
        n = normalize(np.cross(i - w, r - w))
        y = np.cross(n, x)
        return np.column_stack([x, y, n])

    def plane_normal(self) -> np.ndarray:
        return self.plane_frame()[:, 2]

    def finger_root(self, finger: str) -> np.ndarray:
        if finger == "thumb":
            return self.anchor("thumb_root")
        return self.anchor(f"{finger}_root")

    def limits_for(self, finger: str) -> tuple:
        group = self.joint_limits[skeleton.JOINT_SLICES[finger]]
        if finger == "thumb":
            return tuple(group)
        return tuple(group[1:])  # root joint fixed, not an IK variable

    def chain(self, finger: str) -> DhChain:
        if finger == "thumb":
            return DhChain(rows=self.dh_thumb, base_rotation=self.thumb_base_rotation,
                           base_position=tuple(self.anchor("thumb_root")),
                           limits=self.limits_for("thumb"))
        return DhChain(rows=self.dh_finger, base_rotation=self.finger_base_rotation,
                       base_position=tuple(self.finger_root(finger)),
                       limits=self.limits_for(finger))

    def chains(self) -> dict:
        return {f: self.chain(f) for f in skeleton.FINGER_ORDER}

    def robot_link_lengths(self, finger: str) -> tuple[float, ...]:
        rows = self.dh_thumb if finger == "thumb" else self.dh_finger
        return tuple(abs(r.trans_x) for r in rows)

    # -- serialization --------------------------------------------------------

    def to_dict(self) -> dict:
        def rows_out(rows):
            return [
                {"trans_x": r.trans_x, "trans_z": r.trans_z, "rot_x": r.rot_x,
                 "rot_z_offset": r.rot_z_offset, "joint": r.joint_index}
                for r in rows
            ]

        return {
            "dh_finger": rows_out(self.dh_finger),
            "dh_thumb": rows_out(self.dh_thumb),
            "joint_limits": [[lo, hi] for lo, hi in self.joint_limits],
            "thumb_tip_offset": self.thumb_tip_offset,
            "finger_tip_offset": self.finger_tip_offset,
            "plane_offset_sign": self.plane_offset_sign,
            "anchors": {k: list(v) for k, v in self.anchors.items()},
            "finger_base_rotation": [list(r) for r in self.finger_base_rotation],
            "thumb_base_rotation": [list(r) for r in self.thumb_base_rotation],
            "human_anchors": dict(self.human_anchors),
            "pinky_hold_pose": list(self.pinky_hold_pose),
            "max_step": self.max_step,
            "ik": {"damping": self.ik.damping, "step_clamp": self.ik.step_clamp,
                   "max_iters": self.ik.max_iters, "tol": self.ik.tol},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RigConfig":
        def rows_in(rows):
            return tuple(
                DhRow(float(r["trans_x"]), float(r["trans_z"]), float(r["rot_x"]),
                      float(r["rot_z_offset"]),
                      None if r["joint"] is None else int(r["joint"]))
                for r in rows
            )

        ik = d.get("ik", {})
        return cls(
            dh_finger=rows_in(d["dh_finger"]),
            dh_thumb=rows_in(d["dh_thumb"]),
            joint_limits=tuple((float(lo), float(hi)) for lo, hi in d["joint_limits"]),
            thumb_tip_offset=float(d["thumb_tip_offset"]),
            finger_tip_offset=float(d["finger_tip_offset"]),
            plane_offset_sign=float(d.get("plane_offset_sign", 1.0)),
            anchors={k: tuple(float(x) for x in v) for k, v in d["anchors"].items()},
            finger_base_rotation=tuple(tuple(float(x) for x in r) for r in d["finger_base_rotation"]),
            thumb_base_rotation=tuple(tuple(float(x) for x in r) for r in d["thumb_base_rotation"]),
            human_anchors={k: int(v) for k, v in d["human_anchors"].items()},
            pinky_hold_pose=tuple(float(x) for x in d["pinky_hold_pose"]),
            max_step=float(d["max_step"]),
            ik=IkParams(damping=float(ik.get("damping", 0.05)),
                        step_clamp=float(ik.get("step_clamp", 0.2)),
                        max_iters=int(ik.get("max_iters", 50)),
                        tol=float(ik.get("tol", 1e-4))),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def config_hash(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            f.write(self.to_json())
            f.write("\n")

    @classmethod
    def load(cls, path) -> "RigConfig":
        with open(path, "r", encoding="utf-8") as f:
            return cls.from_dict(json.load(f))


def default_rig() -> RigConfig:
    return RigConfig()


def with_thumb_base(rig: RigConfig, rotation, position) -> RigConfig:
    """Convenience for rig tuning experiments."""
    anchors = dict(rig.anchors)
    anchors["thumb_root"] = tuple(float(v) for v in position)
    return replace(rig, thumb_base_rotation=tuple(tuple(float(v) for v in row) for row in rotation),
                   anchors=anchors)
