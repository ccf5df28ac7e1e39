"""Human-hand to robot-hand retargeting.

Pipeline per frame: align the human palm plane onto the robot palm plane,
scale each finger's tip offset by its human/robot length ratio, apply the
fingertip correction offsets, then solve per-finger position IK.  The three
non-thumb root joints are always commanded to zero and the little finger is
never consumed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import skeleton
from .errors import DegenerateHand, ZeroRobotLength
from .geometry import matrix_to_quat, normalize, quat_to_matrix
from .kinematics import IkResult, solve_ik
from .model import HandFrame, JointCommand
from .rig import RigConfig

# Anchor triangles smaller than this are treated as collinear (m^2).
MIN_ANCHOR_AREA = 1e-8


@dataclass(frozen=True)
class AlignmentFrame:
    """Rigid transform taking human-hand coordinates to robot-base coordinates."""

    rotation: tuple[float, float, float, float]  # unit quaternion (qx,qy,qz,qw)
    translation: tuple[float, float, float]
    anchors: dict  # human anchor positions this alignment was built from

    def matrix(self) -> np.ndarray:
        return quat_to_matrix(np.asarray(self.rotation))

    def apply(self, point) -> np.ndarray:
        return self.matrix() @ np.asarray(point, dtype=float) + np.asarray(self.translation)

    def rotate(self, vec) -> np.ndarray:
        return self.matrix() @ np.asarray(vec, dtype=float)


@dataclass(frozen=True)
class RetargetResult:
    q_target: tuple[float, ...]
    ik: dict  # finger name -> IkResult
    ik_targets: dict  # finger name -> fingertip target in robot base frame

    @property
    def all_converged(self) -> bool:
        return all(r.converged for r in self.ik.values())


def _hand_plane_frame(positions: np.ndarray, rig: RigConfig) -> tuple[np.ndarray, dict]:
    idx = positions[rig.human_anchors["index_root"]]
    ring = positions[rig.human_anchors["ring_root"]]
    wrist = positions[rig.human_anchors["wrist"]]
    middle = positions[rig.human_anchors["middle_root"]]

    cross = np.cross(idx - wrist, ring - wrist)
    if 0.5 * float(np.linalg.norm(cross)) <= MIN_ANCHOR_AREA:
        raise DegenerateHand("index/ring/wrist anchors are collinear")

    x = normalize(idx - ring)
    n = normalize(cross)
    y = np.cross(n, x)
    frame = np.column_stack([x, y, n])
    anchors = {"index_root": tuple(idx), "ring_root": tuple(ring),
               "wrist": tuple(wrist), "middle_root": tuple(middle)}
    return frame, anchors


def compute_alignment(frame: HandFrame, rig: RigConfig) -> AlignmentFrame:
    """Rigid transform mapping the human palm plane onto the robot's.

    The rotation carries the human plane frame onto the robot plane frame;
    the translation then makes the middle-finger roots coincide.
    """
    positions = frame.positions()
    human_frame, anchors = _hand_plane_frame(positions, rig)
    rotation = rig.plane_frame() @ human_frame.T
    translation = rig.anchor("middle_root") - rotation @ np.asarray(anchors["middle_root"])
    return AlignmentFrame(rotation=tuple(matrix_to_quat(rotation)),
                          translation=tuple(translation), anchors=anchors)


def compute_scale(frame: HandFrame, rig: RigConfig, finger: str) -> float:
    """Length ratio k = sum(human segments) / sum(robot links) for one finger.

    Human segments run root→tip along the finger chain (three for fingers,
    two for the thumb, the metacarpal never enters); robot link lengths are
    the TransX entries of the rig's DH rows.
    """
    positions = frame.positions()
    chain = skeleton.FINGER_CHAINS[finger]
    human = 0.0
    for a, b in zip(chain[:-1], chain[1:]):
        human += float(np.linalg.norm(positions[b] - positions[a]))
    robot = sum(rig.robot_link_lengths(finger))
    if robot <= 0.0:
        raise ZeroRobotLength(f"rig DH rows for {finger} have zero total length")
    return human / robot


def scale_target(frame: HandFrame, alignment: AlignmentFrame, k: float,
                 rig: RigConfig, finger: str) -> np.ndarray:
    """Raw fingertip target: the human tip offset from its own finger root,
    rotated into the robot frame and divided by k to land at robot scale."""
    positions = frame.positions()
    chain = skeleton.FINGER_CHAINS[finger]
    offset = positions[chain[-1]] - positions[chain[0]]
    return rig.finger_root(finger) + alignment.rotate(offset) / k


def apply_tip_offsets(raw_targets: dict, rig: RigConfig) -> dict:
    """Fingertip corrections: thumb toward the robot wrist anchor, fingers
    along the configured plane-normal direction (toward the palm)."""
    wrist = rig.anchor("wrist")
    normal = rig.plane_normal()
    out = {}
    for finger, target in raw_targets.items():
        target = np.asarray(target, dtype=float)
        if finger == "thumb":
            out[finger] = target + rig.thumb_tip_offset * normalize(wrist - target)
        else:
            out[finger] = target + rig.finger_tip_offset * rig.plane_offset_sign * normal
    return out


def retarget_frame(frame: HandFrame, q_current, rig: RigConfig,
                   warm_starts: dict | None = None) -> tuple[RetargetResult, JointCommand]:
    """Full per-frame retargeting: alignment, scaling, offsets, per-finger IK.

    ``warm_starts`` maps finger name to the previous IK solution and is
    updated in place; missing entries seed at mid-range.  Non-convergence is
    reported in the result while the command still uses best-effort angles.
    """
    q_current = np.asarray(q_current, dtype=float)
    alignment = compute_alignment(frame, rig)

    raw = {}
    for finger in skeleton.FINGER_ORDER:
        k = compute_scale(frame, rig, finger)
        raw[finger] = scale_target(frame, alignment, k, rig, finger)
    targets = apply_tip_offsets(raw, rig)

    q_target = np.zeros(skeleton.NUM_JOINTS)
    ik_results = {}
    for finger in skeleton.FINGER_ORDER:
        chain = rig.chain(finger)
        seed = warm_starts.get(finger) if warm_starts is not None else None
        if seed is None:
            seed = chain.mid_range()
        result = solve_ik(chain, targets[finger], seed, rig.ik)
        ik_results[finger] = result
        if warm_starts is not None:
            warm_starts[finger] = result.theta
        sl = skeleton.JOINT_SLICES[finger]
        if finger == "thumb":
            q_target[sl] = result.theta
        else:
            q_target[sl.start] = 0.0  # root joint held at zero
            q_target[sl.start + 1:sl.stop] = result.theta

    dq = np.clip(q_target - q_current, -rig.max_step, rig.max_step)
    result = RetargetResult(
        q_target=tuple(float(v) for v in q_target),
        ik=ik_results,
        ik_targets={f: tuple(float(v) for v in targets[f]) for f in skeleton.FINGER_ORDER},
    )
    return result, JointCommand(t=frame.t, dq=tuple(float(v) for v in dq))
