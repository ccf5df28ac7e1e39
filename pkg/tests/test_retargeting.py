"""Retargeting pipeline: palm alignment, length scaling, tip offsets, IK.

The invariance and scale examples here are the small fast versions; the
500-frame sweeps live in the acceptance suite.
"""

import math

import numpy as np
import pytest

from dexkit import skeleton
from dexkit.errors import DegenerateHand
from dexkit.geometry import quat_to_matrix
from dexkit.handmodel import FINGERS, HandParams, make_frame
from dexkit.model import HandFrame, Pose, frame_positions_transformed
from dexkit.retargeting import (
    apply_tip_offsets,
    compute_alignment,
    compute_scale,
    retarget_frame,
    scale_target,
)
from dexkit.rig import default_rig

RIG = default_rig()
Q0 = (0.0,) * skeleton.NUM_JOINTS


def rot_z_matrix(angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def with_vertices(frame, replacements):
    verts = list(frame.vertices)
    for index, pos in replacements.items():
        verts[index] = Pose(tuple(float(c) for c in pos))
    return HandFrame(t=frame.t, vertices=tuple(verts))


# -- alignment ----------------------------------------------------------------

def test_rest_pose_alignment_is_identity_rotation():
    # the synthetic rest hand lies in the same plane orientation as the rig
    align = compute_alignment(make_frame(0.0), RIG)
    assert np.allclose(quat_to_matrix(align.rotation), np.eye(3), atol=1e-12)
    # translation carries the human middle root onto the robot middle root
    assert np.allclose(align.translation, [-0.010, -0.100, 0.0], atol=1e-12)


def test_alignment_cancels_a_rigid_motion():
    rot = rot_z_matrix(math.pi / 2)
    moved = frame_positions_transformed(make_frame(0.0), rot, (0.2, -0.1, 0.4))
    align = compute_alignment(moved, RIG)
    assert np.allclose(quat_to_matrix(align.rotation), rot_z_matrix(-math.pi / 2), atol=1e-9)
    # middle root still lands exactly on the robot anchor
    middle = moved.position(skeleton.MIDDLE_PROXIMAL)
    assert np.allclose(align.apply(middle), RIG.anchor("middle_root"), atol=1e-12)


def test_collinear_anchors_raise_degenerate_hand():
    frame = make_frame(0.0)
    bad = with_vertices(frame, {
        RIG.human_anchors["index_root"]: (0.00, 0.10, 0.0),
        RIG.human_anchors["ring_root"]: (0.00, 0.20, 0.0),
        RIG.human_anchors["wrist"]: (0.00, 0.00, 0.0),
    })
    with pytest.raises(DegenerateHand):
        compute_alignment(bad, RIG)


# -- scaling ------------------------------------------------------------------

def test_scale_example_finger():
    # index chain with segments 0.040 + 0.030 + 0.030 = 0.100 m
    frame = with_vertices(make_frame(0.0), {
        skeleton.INDEX_PROXIMAL: (0.0, 0.10, 0.0),
        skeleton.INDEX_INTERMEDIATE: (0.0, 0.14, 0.0),
        skeleton.INDEX_DISTAL: (0.0, 0.17, 0.0),
        skeleton.INDEX_TIP: (0.0, 0.20, 0.0),
    })
    k = compute_scale(frame, RIG, "index")
    assert math.isclose(k, 0.10 / 0.1361, rel_tol=0.0, abs_tol=1e-12)


def test_scale_example_thumb():
    frame = with_vertices(make_frame(0.0), {
        skeleton.THUMB_PROXIMAL: (0.0, 0.00, 0.0),
        skeleton.THUMB_DISTAL: (0.0, 0.04, 0.0),
        skeleton.THUMB_TIP: (0.0, 0.09, 0.0),
    })
    k = compute_scale(frame, RIG, "thumb")
    assert math.isclose(k, 0.09 / 0.1107, rel_tol=0.0, abs_tol=1e-12)


def test_scale_is_translation_invariant():
    frame = make_frame(0.0)
    moved = frame_positions_transformed(frame, np.eye(3), (1.0, 2.0, 3.0))
    for finger in ("index", "middle", "ring", "thumb"):
        assert math.isclose(compute_scale(frame, RIG, finger),
                            compute_scale(moved, RIG, finger), abs_tol=1e-12)


def test_scaled_target_starts_at_finger_root():
    # zero human tip offset puts the target exactly on the robot finger root
    frame = with_vertices(make_frame(0.0), {
        skeleton.INDEX_TIP: tuple(make_frame(0.0).position(skeleton.INDEX_PROXIMAL)),
    })
    align = compute_alignment(frame, RIG)
    target = scale_target(frame, align, 1.0, RIG, "index")
    assert np.allclose(target, RIG.anchor("index_root"), atol=1e-12)


# -- tip offsets --------------------------------------------------------------

def test_thumb_offset_shifts_toward_wrist_by_constant():
    raw = {"thumb": np.array([0.05, 0.02, 0.01])}
    out = apply_tip_offsets(raw, RIG)["thumb"]
    shift = out - raw["thumb"]
    assert abs(np.linalg.norm(shift) - RIG.thumb_tip_offset) < 1e-9
    # direction: exactly along raw -> wrist anchor
    to_wrist = RIG.anchor("wrist") - raw["thumb"]
    cos = float(shift @ to_wrist / (np.linalg.norm(shift) * np.linalg.norm(to_wrist)))
    assert abs(cos - 1.0) < 1e-12


def test_finger_offset_shifts_along_plane_normal_by_constant():
    raw = {"index": np.array([0.04, 0.05, -0.03])}
    out = apply_tip_offsets(raw, RIG)["index"]
    shift = out - raw["index"]
    assert abs(np.linalg.norm(shift) - RIG.finger_tip_offset) < 1e-9
    expected = RIG.finger_tip_offset * RIG.plane_offset_sign * RIG.plane_normal()
    assert np.allclose(shift, expected, atol=1e-12)


# -- full frame retargeting ---------------------------------------------------

def curled_frame(t=0.0, c=0.15):
    return make_frame(t, HandParams(curl={f: c for f in FINGERS},
                                    thumb_curl=0.5 * c, thumb_sweep=0.6 * c))


def test_retarget_converges_on_operating_pose():
    result, cmd = retarget_frame(curled_frame(), Q0, RIG)
    assert result.all_converged
    assert len(cmd.dq) == skeleton.NUM_JOINTS


def test_root_joints_are_exactly_zero():
    result, cmd = retarget_frame(curled_frame(), Q0, RIG)
    for j in skeleton.ROOT_JOINT_INDICES:
        assert result.q_target[j] == 0.0
        assert cmd.dq[j] == 0.0


def test_little_finger_is_never_consumed():
    result, _ = retarget_frame(curled_frame(), Q0, RIG)
    assert set(result.ik) == {"index", "middle", "ring", "thumb"}
    assert set(result.ik_targets) == {"index", "middle", "ring", "thumb"}


def test_command_deltas_respect_max_step():
    q_far = (1.5,) * skeleton.NUM_JOINTS
    _, cmd = retarget_frame(curled_frame(), q_far, RIG)
    assert all(abs(d) <= RIG.max_step + 1e-15 for d in cmd.dq)


def test_retarget_is_deterministic():
    r1, c1 = retarget_frame(curled_frame(), Q0, RIG)
    r2, c2 = retarget_frame(curled_frame(), Q0, RIG)
    assert r1.q_target == r2.q_target
    assert c1.dq == c2.dq


def test_fixed_point_when_already_at_target():
    result, _ = retarget_frame(curled_frame(), Q0, RIG)
    _, cmd = retarget_frame(curled_frame(), result.q_target, RIG)
    assert all(abs(d) < 1e-12 for d in cmd.dq)


def test_warm_starts_are_recorded():
    warm = {}
    retarget_frame(curled_frame(), Q0, RIG, warm_starts=warm)
    assert set(warm) == {"index", "middle", "ring", "thumb"}
    assert len(warm["thumb"]) == 4 and len(warm["index"]) == 3


def test_rigid_motion_invariance_small():
    frame = curled_frame()
    _, cmd = retarget_frame(frame, Q0, RIG)
    rot = rot_z_matrix(1.1) @ np.array([[1, 0, 0], [0, 0, -1], [0, 1, 0]], dtype=float)
    moved = frame_positions_transformed(frame, rot, (0.5, -0.2, 0.9))
    _, cmd2 = retarget_frame(moved, Q0, RIG)
    assert max(abs(a - b) for a, b in zip(cmd.dq, cmd2.dq)) < 1e-9


def test_uniform_scale_invariance_small():
    frame = curled_frame()
    _, cmd = retarget_frame(frame, Q0, RIG)
    for s in (0.5, 1.7):
        scaled = HandFrame(t=frame.t, vertices=tuple(
            Pose(tuple(s * c for c in p.position), p.orientation) for p in frame.vertices))
        _, cmd2 = retarget_frame(scaled, Q0, RIG)
        assert max(abs(a - b) for a, b in zip(cmd.dq, cmd2.dq)) < 1e-9


def test_ik_reaches_the_offset_targets():
    from dexkit.kinematics import fk

    result, _ = retarget_frame(curled_frame(), Q0, RIG)
    for finger in ("index", "middle", "ring", "thumb"):
        tip = fk(RIG.chain(finger), result.ik[finger].theta)
        err = np.linalg.norm(tip - np.asarray(result.ik_targets[finger]))
        assert err <= RIG.ik.tol
